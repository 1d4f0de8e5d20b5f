#![allow(dead_code)]

use kgonal::collar::{CollaredDiagram, TreeOfDiagrams, Visit};
use kgonal::walls::{IntraSegment, WallStep};
use kgonal::{Complex2, ComplexBuilder, Incidence, Presentation};

/// Polygons reading `words`, glued pairwise at `(face, pos, face, pos)`; equal letters
/// are glued directly and inverse letters reversed.
pub fn glue(words: &[Vec<i32>], pairs: &[(usize, usize, usize, usize)]) -> Complex2 {
    let mut b = ComplexBuilder::new();
    let f: Vec<usize> = words.iter().map(|w| b.add_polygon(w)).collect();
    glue_into(&mut b, &f, pairs);
    b.build(true).0
}

pub fn glue_into(b: &mut ComplexBuilder, ids: &[usize], pairs: &[(usize, usize, usize, usize)]) {
    for &(f1, i1, f2, i2) in pairs {
        let a = b.face_incidence(ids[f1], i1);
        let c = b.face_incidence(ids[f2], i2);
        let c = if b.letter(a) == b.letter(c) { c } else { c.reversed() };
        b.identify(a, c).unwrap();
    }
}

pub const COMMUTATOR: [i32; 4] = [1, 2, -1, -2];
/// Second relator used for planted pillows.
pub const PILLOW: [i32; 4] = [1, 2, 3, 3];

pub fn grid_presentation() -> Presentation {
    Presentation::new(3, 4, Some(0.1), vec![COMMUTATOR.to_vec(), PILLOW.to_vec()]).unwrap()
}

/// Cells of an `n×n` grid, ring first in counterclockwise order from the lower left, then
/// the interior row by row; with the collaring visits of the ring.
pub fn grid_layout(n: usize) -> (Vec<(usize, usize)>, Vec<Visit>, Vec<bool>) {
    assert!(n >= 3);
    let mut ring = Vec::new();
    let mut visits = Vec::new();
    let mut welds = Vec::new();
    let mut push = |cell: (usize, usize), in_pos: usize, out_pos: usize, corner: bool| {
        ring.push(cell);
        visits.push(Visit { face: visits.len(), in_pos, out_pos });
        welds.push(corner);
    };
    push((0, 0), 2, 1, true);
    for c in 1..n - 1 {
        push((0, c), 3, 1, false);
    }
    push((0, n - 1), 3, 2, true);
    for r in 1..n - 1 {
        push((r, n - 1), 0, 2, false);
    }
    push((n - 1, n - 1), 0, 3, true);
    for c in (1..n - 1).rev() {
        push((n - 1, c), 1, 3, false);
    }
    push((n - 1, 0), 1, 0, true);
    for r in (1..n - 1).rev() {
        push((r, 0), 2, 0, false);
    }
    let mut cells = ring;
    for r in 1..n - 1 {
        for c in 1..n - 1 {
            cells.push((r, c));
        }
    }
    (cells, visits, welds)
}

/// Adjacent cell pairs `(left/below, pos, right/above, pos)` in grid coordinates.
pub fn grid_adjacencies(n: usize) -> Vec<((usize, usize), usize, (usize, usize), usize)> {
    let mut out = Vec::new();
    for r in 0..n {
        for c in 0..n {
            if c + 1 < n {
                out.push(((r, c), 1, (r, c + 1), 3));
            }
            if r + 1 < n {
                out.push(((r, c), 2, (r + 1, c), 0));
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Plant {
    None,
    /// Two mirrored faces in the basis along one edge.
    BasisPair,
    /// A copy of a ladder face glued onto it along every edge.
    Bubble,
    /// A copy of a ladder face on one edge, mirrored again onto the basis side.
    LadderPair,
}

pub struct Planted {
    pub diagram: CollaredDiagram,
    pub base_faces: usize,
    pub base_edges: usize,
    pub base_vertices: usize,
}

/// A square grid collared by its outer ring, with one planted reduction configuration
/// selected by `slot`.
pub fn planted_grid(n: usize, plant: Plant, slot: usize) -> Planted {
    let (cells, visits, welds) = grid_layout(n);
    let ring_len = visits.len();
    let id = |cell: (usize, usize)| cells.iter().position(|&x| x == cell).unwrap();
    let is_ring = |cell: (usize, usize)| id(cell) < ring_len;
    let adj = grid_adjacencies(n);
    let mut skip = None;
    match plant {
        Plant::BasisPair => {
            let cands: Vec<usize> = (0..adj.len()).filter(|&a| !is_ring(adj[a].0) || !is_ring(adj[a].2)).collect();
            skip = Some(cands[slot % cands.len()]);
        }
        Plant::LadderPair => {
            let cands: Vec<usize> = (0..adj.len()).filter(|&a| is_ring(adj[a].0) != is_ring(adj[a].2)).collect();
            skip = Some(cands[slot % cands.len()]);
        }
        Plant::None | Plant::Bubble => {}
    }
    let mut b = ComplexBuilder::new();
    let ids: Vec<usize> = cells.iter().map(|_| b.add_polygon(&COMMUTATOR)).collect();
    let pairs: Vec<(usize, usize, usize, usize)> = adj
        .iter()
        .enumerate()
        .filter(|&(a, _)| Some(a) != skip)
        .map(|(_, &(x, i, y, j))| (id(x), i, id(y), j))
        .collect();
    glue_into(&mut b, &ids, &pairs);
    let base = {
        let mut whole = b.clone();
        if let Some(a) = skip {
            let (x, i, y, j) = adj[a];
            glue_into(&mut whole, &ids, &[(id(x), i, id(y), j)]);
        }
        whole.build(true).0
    };
    match plant {
        Plant::None => {}
        Plant::Bubble => {
            let c = ids[slot % ring_len];
            let copy = b.add_polygon(&COMMUTATOR);
            for t in 0..4 {
                let (a, z) = (b.face_incidence(c, t), b.face_incidence(copy, t));
                b.identify(a, z).unwrap();
            }
        }
        Plant::LadderPair => {
            let (mut x, mut i, mut y, mut j) = adj[skip.unwrap()];
            if !is_ring(x) {
                std::mem::swap(&mut x, &mut y);
                std::mem::swap(&mut i, &mut j);
            }
            let (xf, yf) = (ids[id(x)], ids[id(y)]);
            let c1 = b.add_polygon(&COMMUTATOR);
            let c2 = b.add_polygon(&COMMUTATOR);
            let all = [xf, yf, c1, c2];
            glue_into(&mut b, &all, &[(2, i, 0, i), (3, i, 1, j)]);
            for t in (0..4).filter(|&t| t != i) {
                glue_into(&mut b, &all, &[(2, t, 3, t)]);
            }
        }
        Plant::BasisPair => {
            let (x, i, y, j) = adj[skip.unwrap()];
            let (xf, yf) = (ids[id(x)], ids[id(y)]);
            let l = b.letter(b.face_incidence(xf, i));
            let word = pillow_reading(l);
            let c1 = b.add_polygon(&word);
            let c2 = b.add_polygon(&word);
            let all = [xf, yf, c1, c2];
            glue_into(&mut b, &all, &[(2, 0, 0, i), (3, 0, 1, j), (2, 1, 3, 1), (2, 2, 3, 2), (2, 3, 3, 3)]);
        }
    }
    let complex = b.build(true).0;
    let p = inner_boundary(&complex, ring_len, n);
    Planted {
        diagram: CollaredDiagram { complex, ladder_faces: ring_len, visits, welds, sources: vec![0; ring_len], p },
        base_faces: base.face_count(),
        base_edges: base.edges().len(),
        base_vertices: base.vertex_count(),
    }
}

/// The reading of the pillow relator, or its inverse, starting with letter `l`.
fn pillow_reading(l: i32) -> Vec<i32> {
    let fwd = PILLOW.to_vec();
    let inv: Vec<i32> = PILLOW.iter().rev().map(|x| -x).collect();
    for base in [fwd, inv] {
        for r in 0..4 {
            let w: Vec<i32> = (0..4).map(|t| base[(r + t) % 4]).collect();
            if w[0] == l {
                return w;
            }
        }
    }
    unreachable!("pillow relator carries every letter of the commutator")
}

/// Ring incidences on edges shared with the interior of the original grid.
fn inner_boundary(c: &Complex2, ring: usize, n: usize) -> Vec<Incidence> {
    let interior = (n - 2) * (n - 2);
    let mut on_interior = std::collections::HashSet::new();
    for f in ring..ring + interior {
        for inc in &c.faces()[f].boundary {
            on_interior.insert(inc.edge);
        }
    }
    let mut out = Vec::new();
    for f in 0..ring {
        for inc in &c.faces()[f].boundary {
            if on_interior.contains(&inc.edge) {
                out.push(*inc);
            }
        }
    }
    out
}

/// Figure-eight configuration: an intra-segment leaving face `c`, looping once through
/// `f`, `g`, `h` and back through `f`, and returning to `c`.
pub struct FigureEight {
    pub y: Complex2,
    pub lambda: IntraSegment,
    pub p: Presentation,
    pub max_faces: usize,
}

/// Square model. With `connected` the loop's inner side is filled away from `c`, so every
/// corner is shell; otherwise the filling of the loop runs through `f`.
pub fn square_figure_eight(connected: bool) -> FigureEight {
    let words = vec![vec![-3, -4, 5, 6], vec![1, 2, 3, 4], vec![7, 8, 9, -2], vec![-7, -1, 11, -8]];
    let y = glue(&words, &[(0, 1, 1, 3), (1, 2, 0, 0), (1, 1, 2, 3), (2, 1, 3, 3), (3, 1, 1, 0)]);
    let step = |face, in_pos, out_pos| WallStep { face, in_pos, out_pos };
    let lambda = IntraSegment {
        start_face: 0,
        start_pos: 1,
        steps: vec![step(1, 3, 1), step(2, 3, 1), step(3, 3, 1), step(1, 0, 2)],
        end_face: 0,
        end_pos: 0,
    };
    let extra = if connected {
        vec![vec![5, 9, 10, 11], vec![-11, -10, -9, 6]]
    } else {
        vec![vec![1, 9, 10, 11], vec![-11, -10, -9, 2]]
    };
    let mut rel = words;
    rel.extend(extra);
    FigureEight { y, lambda, p: Presentation::new(11, 4, Some(0.1), rel).unwrap(), max_faces: 2 }
}

/// Hexagonal analogue of the connected square figure eight.
pub fn hex_figure_eight() -> FigureEight {
    let words = vec![
        vec![-5, -4, 7, 8, 9, 10],
        vec![1, 2, 3, 4, 5, 6],
        vec![11, 12, 13, -1, 14, 15],
        vec![-2, 16, 17, -11, 18, 19],
    ];
    let y = glue(&words, &[(0, 1, 1, 3), (1, 4, 0, 0), (1, 0, 2, 3), (2, 0, 3, 3), (3, 0, 1, 1)]);
    let step = |face, in_pos, out_pos| WallStep { face, in_pos, out_pos };
    let lambda = IntraSegment {
        start_face: 0,
        start_pos: 1,
        steps: vec![step(1, 3, 0), step(2, 3, 0), step(3, 3, 0), step(1, 1, 4)],
        end_face: 0,
        end_pos: 0,
    };
    let mut rel = words;
    rel.extend([vec![12, 13, 20, 21, 22, 23], vec![-23, -22, -21, -20, 16, 17]]);
    FigureEight { y, lambda, p: Presentation::new(23, 6, Some(0.1), rel).unwrap(), max_faces: 2 }
}

/// A tree of diagrams with a single component.
pub fn single_tree(d: CollaredDiagram, main_face: usize) -> TreeOfDiagrams {
    TreeOfDiagrams {
        component: vec![0; d.complex.face_count()],
        complex: d.complex.clone(),
        main_face,
        twins: Vec::new(),
        gluings: Vec::new(),
        diagrams: vec![d],
        missing: Vec::new(),
        violations: Vec::new(),
    }
}

/// Every midpoint id, grouped by an independent union-find over antipodal positions.
pub fn brute_wall_partition(y: &Complex2, k: usize) -> Vec<usize> {
    let m = y.edges().len();
    let mut parent: Vec<usize> = (0..m).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            x = p[x];
        }
        x
    }
    for f in y.faces() {
        for i in 0..k / 2 {
            let a = root(&mut parent, f.boundary[i].edge);
            let b = root(&mut parent, f.boundary[i + k / 2].edge);
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let roots: Vec<usize> = (0..m).map(|e| root(&mut parent, e)).collect();
    let mut label = std::collections::HashMap::new();
    roots.iter().map(|r| { let n = label.len(); *label.entry(*r).or_insert(n) }).collect()
}

/// `faces` random words over `n` generators, with random same-generator position pairs
/// identified; identifications that would reverse an edge onto itself are skipped.
pub fn random_glued<R: rand::Rng>(k: usize, faces: usize, n: i32, gluings: usize, rng: &mut R) -> Complex2 {
    let mut b = ComplexBuilder::new();
    let ids: Vec<usize> = (0..faces)
        .map(|_| {
            let w: Vec<i32> = (0..k).map(|_| rng.gen_range(1..=n) * if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
            b.add_polygon(&w)
        })
        .collect();
    for _ in 0..gluings {
        let (f1, i1) = (ids[rng.gen_range(0..faces)], rng.gen_range(0..k));
        let (f2, i2) = (ids[rng.gen_range(0..faces)], rng.gen_range(0..k));
        let a = b.face_incidence(f1, i1);
        let c = b.face_incidence(f2, i2);
        let (la, lc) = (b.letter(a), b.letter(c));
        if la.abs() != lc.abs() {
            continue;
        }
        let c = if la == lc { c } else { c.reversed() };
        let mut trial = b.clone();
        if trial.identify(a, c).is_ok() {
            b = trial;
        }
    }
    b.build(true).0
}
