//! Standard and bent hypergraphs on edge midpoints of even-k complexes.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::complex::{Complex2, ComplexError};
use crate::presentation::{inverse_word, rotate, Presentation, Word};
use crate::violation::{ViolationKind, ViolationRecord};
use crate::UnionFind;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WallError {
    #[error("walls need an even face length, got {0}")]
    OddK(usize),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("face {0} is not a crossing")]
    NotCrossing(usize),
    #[error("ear not unique at this scale: face {face} has {found} candidate segments")]
    EarNotUnique { face: usize, found: usize },
    #[error("ear of square crossing {face} joins non-consecutive positions {ends:?}")]
    EarNotConsecutive { face: usize, ends: (usize, usize) },
    #[error("faces {0} and {1} do not lie on one standard wall")]
    DifferentWalls(usize, usize),
    #[error("unknown wall component {0}")]
    UnknownComponent(usize),
}

pub type Result<T> = std::result::Result<T, WallError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WallKind {
    Standard,
    Bent,
}

/// A chord inside `face` joining the midpoints at boundary positions `i` and `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WallEdge {
    pub face: usize,
    pub i: usize,
    pub j: usize,
    pub kind: WallKind,
    /// Complex edges whose midpoints the chord joins.
    pub from: usize,
    pub to: usize,
}

/// Chords over the midpoints of a complex, with midpoint components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallGraph {
    k: usize,
    edges: Vec<WallEdge>,
    component: Vec<usize>,
    component_count: usize,
}

impl WallGraph {
    fn from_edges(k: usize, midpoints: usize, edges: Vec<WallEdge>) -> Self {
        let mut uf = UnionFind::new(midpoints);
        for e in &edges {
            uf.union(e.from, e.to);
        }
        let component = uf.labels();
        WallGraph { k, edges, component, component_count: uf.count() }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[WallEdge] {
        &self.edges
    }

    pub fn midpoint_count(&self) -> usize {
        self.component.len()
    }

    /// Component label of the midpoint of complex edge `e`.
    pub fn component_of(&self, e: usize) -> usize {
        self.component[e]
    }

    pub fn edge_component(&self, w: usize) -> usize {
        self.component[self.edges[w].from]
    }

    pub fn component_count(&self) -> usize {
        self.component_count
    }

    /// Midpoint partition as component labels in complex edge order.
    pub fn partition(&self) -> &[usize] {
        &self.component
    }

    /// Wall edges per component.
    pub fn component_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.component_count];
        for w in 0..self.edges.len() {
            sizes[self.edge_component(w)] += 1;
        }
        sizes
    }

    pub fn edges_in_face(&self, f: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&w| self.edges[w].face == f).collect()
    }

    /// Lines `W <component> <face> <i> <j> <kind>`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (w, e) in self.edges.iter().enumerate() {
            let kind = match e.kind {
                WallKind::Standard => "standard",
                WallKind::Bent => "bent",
            };
            writeln!(s, "W {} {} {} {} {kind}", self.edge_component(w), e.face, e.i, e.j).unwrap();
        }
        s
    }

    fn adjacency(&self, skip_face: Option<usize>) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.component.len()];
        for (w, e) in self.edges.iter().enumerate() {
            if Some(e.face) == skip_face {
                continue;
            }
            adj[e.from].push((w, e.to));
            if e.from != e.to {
                adj[e.to].push((w, e.from));
            }
        }
        adj
    }
}

fn check_even(y: &Complex2, k: usize) -> Result<()> {
    if k % 2 == 1 {
        return Err(WallError::OddK(k));
    }
    y.check_k_gonal(k)?;
    Ok(())
}

/// One chord per antipodal pair of positions in every face.
pub fn trace_standard_walls(y: &Complex2, k: usize) -> Result<WallGraph> {
    check_even(y, k)?;
    let h = k / 2;
    let mut edges = Vec::with_capacity(h * y.face_count());
    for (f, face) in y.faces().iter().enumerate() {
        for i in 0..h {
            edges.push(WallEdge {
                face: f,
                i,
                j: i + h,
                kind: WallKind::Standard,
                from: face.boundary[i].edge,
                to: face.boundary[i + h].edge,
            });
        }
    }
    Ok(WallGraph::from_edges(k, y.edges().len(), edges))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceClass {
    Regular,
    /// Chords starting at positions `first < second` share a component.
    Crossing { first: usize, second: usize },
    /// Three or more chords of one component.
    Triple,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub classes: Vec<FaceClass>,
    pub violations: Vec<ViolationRecord>,
}

impl Classification {
    pub fn crossings(&self) -> Vec<usize> {
        (0..self.classes.len()).filter(|&f| matches!(self.classes[f], FaceClass::Crossing { .. })).collect()
    }
}

pub fn classify_faces(y: &Complex2, walls: &WallGraph) -> Classification {
    let h = walls.k / 2;
    let mut classes = Vec::with_capacity(y.face_count());
    let mut violations = Vec::new();
    for (f, face) in y.faces().iter().enumerate() {
        let comps: Vec<usize> = (0..h).map(|i| walls.component_of(face.boundary[i].edge)).collect();
        let mut by_comp: HashMap<usize, Vec<usize>> = HashMap::new();
        for (i, &c) in comps.iter().enumerate() {
            by_comp.entry(c).or_default().push(i);
        }
        let mut worst: Vec<(usize, Vec<usize>)> = by_comp.into_iter().filter(|(_, v)| v.len() >= 2).collect();
        worst.sort();
        let class = match worst.iter().map(|(_, v)| v.len()).max() {
            None => FaceClass::Regular,
            Some(2) if worst.len() == 1 => FaceClass::Crossing { first: worst[0].1[0], second: worst[0].1[1] },
            Some(_) => {
                for (c, chords) in &worst {
                    if chords.len() >= 3 {
                        let mut witness = vec![f, *c];
                        witness.extend(chords);
                        violations.push(ViolationRecord::new(ViolationKind::TripleIntersection, witness));
                    }
                }
                FaceClass::Triple
            }
        };
        classes.push(class);
    }
    Classification { classes, violations }
}

/// One chord traversal of a wall path: entering `face` at `in_pos`, leaving at `out_pos`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WallStep {
    pub face: usize,
    pub in_pos: usize,
    pub out_pos: usize,
}

/// A wall path that starts and ends at face middles.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntraSegment {
    pub start_face: usize,
    pub start_pos: usize,
    pub steps: Vec<WallStep>,
    pub end_face: usize,
    pub end_pos: usize,
}

impl IntraSegment {
    pub fn reversed(&self) -> Self {
        IntraSegment {
            start_face: self.end_face,
            start_pos: self.end_pos,
            steps: self
                .steps
                .iter()
                .rev()
                .map(|s| WallStep { face: s.face, in_pos: s.out_pos, out_pos: s.in_pos })
                .collect(),
            end_face: self.start_face,
            end_pos: self.start_pos,
        }
    }

    /// Complex edges crossed, in order.
    pub fn midpoints(&self, y: &Complex2) -> Vec<usize> {
        let mut out = vec![y.faces()[self.start_face].boundary[self.start_pos].edge];
        for s in &self.steps {
            out.push(y.faces()[s.face].boundary[s.out_pos].edge);
        }
        out
    }

    /// Faces whose interior the segment visits, middles included.
    pub fn faces(&self) -> Vec<usize> {
        let mut out = vec![self.start_face];
        out.extend(self.steps.iter().map(|s| s.face));
        out.push(self.end_face);
        out
    }
}

/// The segment closing a crossing from outside: it leaves at `ends.0`, returns at `ends.1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ear {
    pub face: usize,
    pub ends: (usize, usize),
    /// Wall edge ids along the outside path.
    pub path: Vec<usize>,
    pub segment: IntraSegment,
}

impl Ear {
    pub fn enters(&self, walls: &WallGraph, face: usize) -> bool {
        self.path.iter().any(|&w| walls.edges[w].face == face)
    }
}

pub fn ear_of_crossing(y: &Complex2, walls: &WallGraph, c: usize) -> Result<Ear> {
    ear_with_cap(y, walls, c, 2 * y.face_count())
}

/// The unique simple path of at most `cap` wall edges, avoiding the chords of `c`, between two
/// distinct positions of `c` on its repeated wall.
pub fn ear_with_cap(y: &Complex2, walls: &WallGraph, c: usize, cap: usize) -> Result<Ear> {
    let face = y.faces().get(c).ok_or(ComplexError::UnknownFace(c))?;
    let k = walls.k;
    let comp = match classify_face(walls, face) {
        Some(comp) => comp,
        None => return Err(WallError::NotCrossing(c)),
    };
    let positions: Vec<usize> = (0..k).filter(|&p| walls.component_of(face.boundary[p].edge) == comp).collect();
    let mut at_edge: HashMap<usize, Vec<usize>> = HashMap::new();
    for &p in &positions {
        at_edge.entry(face.boundary[p].edge).or_default().push(p);
    }
    let adj = walls.adjacency(Some(c));
    let mut found: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    for &p in &positions {
        let start = face.boundary[p].edge;
        for &q in &at_edge[&start] {
            if q > p {
                found.push((p, q, Vec::new()));
            }
        }
        let mut visited = HashSet::from([start]);
        let mut path = Vec::new();
        ear_dfs(&adj, &at_edge, start, p, cap, &mut visited, &mut path, &mut found);
        if found.len() > 1 {
            break;
        }
    }
    if found.len() != 1 {
        return Err(WallError::EarNotUnique { face: c, found: found.len() });
    }
    let (p, q, path) = found.pop().unwrap();
    let ends = (p, q);
    if k == 4 && (q + k - p) % k != 1 && (p + k - q) % k != 1 {
        return Err(WallError::EarNotConsecutive { face: c, ends });
    }
    let segment = segment_of(y, walls, c, p, q, &path);
    Ok(Ear { face: c, ends, path, segment })
}

#[allow(clippy::too_many_arguments)]
fn ear_dfs(
    adj: &[Vec<(usize, usize)>],
    at_edge: &HashMap<usize, Vec<usize>>,
    v: usize,
    p: usize,
    cap: usize,
    visited: &mut HashSet<usize>,
    path: &mut Vec<usize>,
    found: &mut Vec<(usize, usize, Vec<usize>)>,
) {
    if path.len() == cap || found.len() > 1 {
        return;
    }
    for &(w, u) in &adj[v] {
        if visited.contains(&u) {
            continue;
        }
        path.push(w);
        if let Some(qs) = at_edge.get(&u) {
            for &q in qs {
                if q > p {
                    found.push((p, q, path.clone()));
                }
            }
        } else {
            visited.insert(u);
            ear_dfs(adj, at_edge, u, p, cap, visited, path, found);
            visited.remove(&u);
        }
        path.pop();
    }
}

fn classify_face(walls: &WallGraph, face: &crate::complex::Face) -> Option<usize> {
    let h = walls.k / 2;
    let comps: Vec<usize> = (0..h).map(|i| walls.component_of(face.boundary[i].edge)).collect();
    let mut repeated = None;
    for a in 0..h {
        for b in a + 1..h {
            if comps[a] == comps[b] {
                if repeated.is_some_and(|r| r != comps[a]) {
                    return None;
                }
                repeated = Some(comps[a]);
            }
        }
    }
    let comp = repeated?;
    (comps.iter().filter(|&&x| x == comp).count() == 2).then_some(comp)
}

/// Follows the wall path as chord traversals from position `p` of `c` to position `q`.
fn segment_of(y: &Complex2, walls: &WallGraph, c: usize, p: usize, q: usize, path: &[usize]) -> IntraSegment {
    let mut steps = Vec::with_capacity(path.len());
    let mut at = y.faces()[c].boundary[p].edge;
    for &w in path {
        let e = walls.edges[w];
        let (in_pos, out_pos) = if e.from == at { (e.i, e.j) } else { (e.j, e.i) };
        steps.push(WallStep { face: e.face, in_pos, out_pos });
        at = if e.from == at { e.to } else { e.from };
    }
    IntraSegment { start_face: c, start_pos: p, steps, end_face: c, end_pos: q }
}

/// Bent chord pairs inside a crossing, given the positions of the repeated wall and the ear.
pub fn bent_template(k: usize, first: usize, second: usize, ears: (usize, usize)) -> Vec<(usize, usize)> {
    let h = k / 2;
    let ends = [first, first + h, second, second + h];
    let dist = |a: usize, b: usize| {
        let d = (a + k - b) % k;
        d.min(k - d)
    };
    let mut out = Vec::new();
    for (x, &a) in ends.iter().enumerate() {
        for &b in &ends[x + 1..] {
            let keep = if k == 4 {
                dist(a, b) == 1 && (usize::from(a == ears.0 || a == ears.1) + usize::from(b == ears.0 || b == ears.1)) == 1
            } else {
                dist(a, b) == 2
            };
            if keep {
                out.push((a.min(b), a.max(b)));
            }
        }
    }
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BentWalls {
    pub graph: WallGraph,
    pub ears: Vec<Ear>,
}

/// Replaces the crossing chords of every crossing by the model's bent chords.
pub fn build_bent_walls(y: &Complex2, walls: &WallGraph) -> Result<BentWalls> {
    let k = walls.k;
    let h = k / 2;
    let classes = classify_faces(y, walls);
    let mut ears = Vec::new();
    let mut edges = Vec::with_capacity(walls.edges.len());
    for (f, face) in y.faces().iter().enumerate() {
        let bent = match classes.classes[f] {
            FaceClass::Crossing { first, second } => {
                let ear = ear_of_crossing(y, walls, f)?;
                let chords = bent_template(k, first, second, ear.ends);
                ears.push(ear);
                Some((first, second, chords))
            }
            _ => None,
        };
        for i in 0..h {
            if bent.as_ref().is_some_and(|(a, b, _)| i == *a || i == *b) {
                continue;
            }
            edges.push(WallEdge {
                face: f,
                i,
                j: i + h,
                kind: WallKind::Standard,
                from: face.boundary[i].edge,
                to: face.boundary[i + h].edge,
            });
        }
        if let Some((_, _, chords)) = bent {
            for (i, j) in chords {
                edges.push(WallEdge {
                    face: f,
                    i,
                    j,
                    kind: WallKind::Bent,
                    from: face.boundary[i].edge,
                    to: face.boundary[j].edge,
                });
            }
        }
    }
    Ok(BentWalls { graph: WallGraph::from_edges(k, y.edges().len(), edges), ears })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CrossingOrder {
    Less,
    Greater,
    Incomparable,
    Violation(ViolationRecord),
}

pub fn crossing_order(y: &Complex2, walls: &WallGraph, c1: usize, c2: usize) -> Result<CrossingOrder> {
    let same = |a: usize, b: usize| {
        let fa = y.faces().get(a).and_then(|f| classify_face(walls, f));
        let fb = y.faces().get(b).and_then(|f| classify_face(walls, f));
        fa.is_some() && fa == fb
    };
    if c1 == c2 || !same(c1, c2) {
        return Err(WallError::DifferentWalls(c1, c2));
    }
    let e1 = ear_of_crossing(y, walls, c1)?;
    let e2 = ear_of_crossing(y, walls, c2)?;
    Ok(match (e1.enters(walls, c2), e2.enters(walls, c1)) {
        (true, true) => CrossingOrder::Violation(ViolationRecord::new(ViolationKind::MutualEars, vec![c1, c2])),
        (true, false) => CrossingOrder::Greater,
        (false, true) => CrossingOrder::Less,
        (false, false) => CrossingOrder::Incomparable,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeWitness {
    /// Wall edge ids around a cycle.
    Cycle(Vec<usize>),
    /// Two wall edges meeting inside one face.
    Intersecting(usize, usize),
}

/// Whether two chords of one face cross.
pub fn chords_intersect(k: usize, a: &WallEdge, b: &WallEdge) -> bool {
    if a.face != b.face || (a.i, a.j) == (b.i, b.j) {
        return false;
    }
    if a.kind == WallKind::Standard && b.kind == WallKind::Standard {
        return true;
    }
    let inside = |x: usize, lo: usize, hi: usize| (x + k - lo) % k > 0 && (x + k - lo) % k < (hi + k - lo) % k;
    let shared = [b.i, b.j].iter().any(|&x| x == a.i || x == a.j);
    !shared && inside(b.i, a.i, a.j) != inside(b.j, a.i, a.j)
}

/// Whether a component is acyclic with no two of its chords crossing; otherwise a witness.
pub fn wall_is_embedded_tree(walls: &WallGraph, component: usize) -> Result<(bool, Option<TreeWitness>)> {
    if component >= walls.component_count {
        return Err(WallError::UnknownComponent(component));
    }
    let members: Vec<usize> = (0..walls.edges.len()).filter(|&w| walls.edge_component(w) == component).collect();
    let mut uf = UnionFind::new(walls.midpoint_count());
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); walls.midpoint_count()];
    for &w in &members {
        let e = walls.edges[w];
        if !uf.union(e.from, e.to) {
            let mut cycle = tree_path(&adj, e.to, e.from);
            cycle.push(w);
            return Ok((false, Some(TreeWitness::Cycle(cycle))));
        }
        adj[e.from].push((w, e.to));
        adj[e.to].push((w, e.from));
    }
    for (x, &a) in members.iter().enumerate() {
        for &b in &members[x + 1..] {
            if chords_intersect(walls.k, &walls.edges[a], &walls.edges[b]) {
                return Ok((false, Some(TreeWitness::Intersecting(a, b))));
            }
        }
    }
    Ok((true, None))
}

fn tree_path(adj: &[Vec<(usize, usize)>], from: usize, to: usize) -> Vec<usize> {
    let mut prev: HashMap<usize, (usize, usize)> = HashMap::new();
    let mut queue = VecDeque::from([from]);
    let mut seen = HashSet::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &(w, u) in &adj[v] {
            if seen.insert(u) {
                prev.insert(u, (w, v));
                queue.push_back(u);
            }
        }
    }
    let mut path = Vec::new();
    let mut v = to;
    while v != from {
        let (w, p) = prev[&v];
        path.push(w);
        v = p;
    }
    path.reverse();
    path
}

/// Connected components of the complement of one wall component.
pub fn complement_components(y: &Complex2, walls: &WallGraph, component: usize) -> Result<usize> {
    if component >= walls.component_count {
        return Err(WallError::UnknownComponent(component));
    }
    let k = walls.k;
    let mut uf = UnionFind::new(y.vertex_count());
    for (f, face) in y.faces().iter().enumerate() {
        let chords: Vec<(usize, usize)> = walls
            .edges_in_face(f)
            .into_iter()
            .filter(|&w| walls.edge_component(w) == component)
            .map(|w| (walls.edges[w].i, walls.edges[w].j))
            .collect();
        // Corner t sits between positions t-1 and t; chord (i, j) puts corners i+1..=j on one side.
        let side = |t: usize| -> Vec<bool> {
            chords.iter().map(|&(i, j)| (t + k - i - 1) % k < (j + k - i) % k).collect()
        };
        let mut regions: HashMap<Vec<bool>, usize> = HashMap::new();
        for t in 0..k {
            let v = y.start(face.boundary[t]);
            match regions.get(&side(t)) {
                Some(&u) => {
                    uf.union(u, v);
                }
                None => {
                    regions.insert(side(t), v);
                }
            }
        }
    }
    Ok(uf.count())
}

/// A relator reading with equal antipodal letters and the element it yields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exchanger {
    pub relator: usize,
    pub rotation: usize,
    pub inverted: bool,
    pub g: Word,
}

/// First reading `w` (by relator, then inversion, then rotation) with `w[0] = w[k/2]`.
pub fn find_wall_exchanger(p: &Presentation) -> Option<Exchanger> {
    let k = p.k();
    if k % 2 == 1 || k == 0 {
        return None;
    }
    let h = k / 2;
    for (j, r) in p.relators().iter().enumerate() {
        for inverted in [false, true] {
            let base = if inverted { inverse_word(r) } else { r.clone() };
            for rotation in 0..k {
                let w = rotate(&base, rotation);
                if w[0] == w[h] {
                    return Some(Exchanger { relator: j, rotation, inverted, g: w[..h].to_vec() });
                }
            }
        }
    }
    None
}
