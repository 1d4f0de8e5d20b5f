//! Planar disc diagrams: planarity checks, cut paths, the easy cutting inequality and a
//! shelling enumeration of small reduced discs.

use std::collections::{HashMap, HashSet};

use super::canon::canonical_key;
use super::search::SearchResult;
use super::{Complex2, ComplexBuilder, ComplexError, Incidence, Result};
use crate::presentation::{inverse_word, rotate, Letter, Presentation};
use crate::UnionFind;

/// A complex verified to be a topological disc (or a single point).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscDiagram {
    complex: Complex2,
    boundary: Vec<Incidence>,
}

impl DiscDiagram {
    pub fn new(complex: Complex2) -> Result<Self> {
        let boundary = disc_boundary(&complex)?;
        Ok(DiscDiagram { complex, boundary })
    }

    pub fn complex(&self) -> &Complex2 {
        &self.complex
    }

    /// The boundary circuit starting from its lowest edge id.
    pub fn boundary(&self) -> &[Incidence] {
        &self.boundary
    }

    pub fn boundary_word(&self) -> Vec<Letter> {
        self.boundary.iter().map(|&i| self.complex.letter(i)).collect()
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary.iter().any(|&i| self.complex.start(i) == v)
    }
}

fn not_planar(msg: impl Into<String>) -> ComplexError {
    ComplexError::NotPlanar(msg.into())
}

fn disc_boundary(c: &Complex2) -> Result<Vec<Incidence>> {
    if c.face_count() == 0 {
        return if c.edges().is_empty() && c.vertex_count() <= 1 {
            Ok(Vec::new())
        } else {
            Err(not_planar("edges without faces"))
        };
    }
    if !c.is_connected() {
        return Err(not_planar("disconnected"));
    }
    let deg = c.degrees();
    if let Some(e) = deg.iter().position(|&d| d == 0 || d > 2) {
        return Err(not_planar(format!("edge {e} has degree {}", deg[e])));
    }
    let chi = c.vertex_count() as i64 - c.edges().len() as i64 + c.face_count() as i64;
    if chi != 1 {
        return Err(not_planar(format!("Euler characteristic {chi}")));
    }
    if !deg.contains(&1) {
        return Err(not_planar("no boundary"));
    }
    // Link nodes are edge ends: 2e for the tail of e, 2e+1 for its head.
    let node = |inc: Incidence, at_end: bool| 2 * inc.edge + usize::from(inc.forward == at_end);
    let mut link = UnionFind::new(2 * c.edges().len());
    for f in c.faces() {
        let m = f.boundary.len();
        for i in 0..m {
            let (a, b) = (f.boundary[i], f.boundary[(i + 1) % m]);
            link.union(node(a, true), node(b, false));
        }
    }
    let mut roots_at: Vec<HashSet<usize>> = vec![HashSet::new(); c.vertex_count()];
    for (id, e) in c.edges().iter().enumerate() {
        roots_at[e.from].insert(link.find(2 * id));
        roots_at[e.to].insert(link.find(2 * id + 1));
    }
    if let Some(v) = roots_at.iter().position(|r| r.len() != 1) {
        return Err(not_planar(format!("vertex {v} has a disconnected link")));
    }
    let mut ends_at: Vec<Vec<Incidence>> = vec![Vec::new(); c.vertex_count()];
    for (id, e) in c.edges().iter().enumerate() {
        if deg[id] == 1 {
            ends_at[e.from].push(Incidence::new(id, true));
            ends_at[e.to].push(Incidence::new(id, false));
        }
    }
    if let Some(v) = ends_at.iter().position(|x| !x.is_empty() && x.len() != 2) {
        return Err(not_planar(format!("vertex {v} pinches the boundary")));
    }
    let first = Incidence::new(deg.iter().position(|&d| d == 1).unwrap_or(0), true);
    let mut cycle = vec![first];
    let mut cur = first;
    loop {
        let v = c.end(cur);
        let next = *ends_at[v].iter().find(|&&i| i.edge != cur.edge || ends_at[v][0].edge == ends_at[v][1].edge).unwrap();
        if next.edge == first.edge {
            break;
        }
        cycle.push(next);
        cur = next;
        if cycle.len() > c.edges().len() {
            return Err(not_planar("boundary does not close"));
        }
    }
    if cycle.len() != deg.iter().filter(|&&d| d == 1).count() {
        return Err(not_planar("more than one boundary circle"));
    }
    Ok(cycle)
}

/// Faces on each side of a cut along `path`, as dual components avoiding the cut edges.
fn sides_of(c: &Complex2, faces: &[usize], cut: &HashSet<usize>) -> Vec<Vec<usize>> {
    let index: HashMap<usize, usize> = faces.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let mut uf = UnionFind::new(faces.len());
    let mut owner: HashMap<usize, usize> = HashMap::new();
    for &f in faces {
        for inc in &c.faces()[f].boundary {
            if cut.contains(&inc.edge) {
                continue;
            }
            if let Some(&g) = owner.get(&inc.edge) {
                uf.union(index[&f], index[&g]);
            } else {
                owner.insert(inc.edge, f);
            }
        }
    }
    let labels = uf.labels();
    let mut out = vec![Vec::new(); uf.count()];
    for (i, &f) in faces.iter().enumerate() {
        out[labels[i]].push(f);
    }
    out
}

/// A shortest boundary-to-boundary edge path splitting `d` into two parts, each holding at
/// least a quarter of the boundary edges; `None` for at most one face or when no such path exists.
pub fn cut_path_search(d: &DiscDiagram) -> Option<Vec<Incidence>> {
    let c = d.complex();
    if c.face_count() <= 1 {
        return None;
    }
    let deg = c.degrees();
    let on_boundary: Vec<bool> = (0..c.vertex_count()).map(|v| d.is_boundary_vertex(v)).collect();
    let boundary_edges: HashSet<usize> = d.boundary().iter().map(|i| i.edge).collect();
    let total = boundary_edges.len();
    let all_faces: Vec<usize> = (0..c.face_count()).collect();
    let mut out_of: Vec<Vec<Incidence>> = vec![Vec::new(); c.vertex_count()];
    for (id, e) in c.edges().iter().enumerate() {
        if deg[id] == 2 {
            out_of[e.from].push(Incidence::new(id, true));
            out_of[e.to].push(Incidence::new(id, false));
        }
    }
    let accept = |path: &[Incidence]| -> bool {
        let cut: HashSet<usize> = path.iter().map(|i| i.edge).collect();
        let sides = sides_of(c, &all_faces, &cut);
        sides.len() == 2
            && sides.iter().all(|side| {
                let edges: HashSet<usize> =
                    side.iter().flat_map(|&f| c.faces()[f].boundary.iter().map(|i| i.edge)).collect();
                4 * edges.intersection(&boundary_edges).count() >= total
            })
    };
    for len in 1..=c.edges().len() {
        let mut found = None;
        for start in 0..c.vertex_count() {
            if on_boundary[start] {
                let mut path = Vec::new();
                let mut visited = vec![false; c.vertex_count()];
                visited[start] = true;
                if extend(c, &out_of, &on_boundary, len, start, &mut visited, &mut path, &accept) {
                    found = Some(path);
                    break;
                }
            }
        }
        if found.is_some() {
            return found;
        }
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn extend(
    c: &Complex2,
    out_of: &[Vec<Incidence>],
    on_boundary: &[bool],
    len: usize,
    v: usize,
    visited: &mut [bool],
    path: &mut Vec<Incidence>,
    accept: &dyn Fn(&[Incidence]) -> bool,
) -> bool {
    for &inc in &out_of[v] {
        let w = c.end(inc);
        if visited[w] {
            continue;
        }
        let last = path.len() + 1 == len;
        if last != on_boundary[w] {
            continue;
        }
        path.push(inc);
        if last {
            if accept(path) {
                return true;
            }
        } else {
            visited[w] = true;
            if extend(c, out_of, on_boundary, len, w, visited, path, accept) {
                return true;
            }
            visited[w] = false;
        }
        path.pop();
    }
    false
}

/// A disc basis `Z` with hull `H` and the constant `K` of the easy cutting inequality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HullDecomposition {
    pub disc_basis: Vec<usize>,
    pub hull: Vec<usize>,
    pub k_const: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EasyCutReport {
    pub holds: bool,
    pub whole: i64,
    pub first: i64,
    pub second: i64,
    pub cut_length: usize,
    /// Faces of `Y'` and `Y''`.
    pub sides: [Vec<usize>; 2],
}

/// Checks `|∂̃Y| ≥ |∂̃Y'| + |∂̃Y''| − K|γ| − K`, where each side is one component of the cut
/// basis plus the hull faces `hull_side` assigns to it (`false` for `Y'`).
pub fn verify_easy_cutting(
    y: &Complex2,
    hull: &HullDecomposition,
    gamma: &[Incidence],
    hull_side: &[bool],
) -> Result<EasyCutReport> {
    let mut seen = vec![0u8; y.face_count()];
    for &f in hull.disc_basis.iter().chain(&hull.hull) {
        if f >= y.face_count() {
            return Err(ComplexError::UnknownFace(f));
        }
        seen[f] += 1;
    }
    if seen.iter().any(|&s| s != 1) {
        return Err(ComplexError::BadCut("basis and hull must partition the faces".into()));
    }
    if hull_side.len() != hull.hull.len() {
        return Err(ComplexError::BadCut("one side per hull face is required".into()));
    }
    let whole = y.gen_boundary();
    if gamma.is_empty() && hull.disc_basis.len() <= 1 {
        return Ok(EasyCutReport {
            holds: true,
            whole,
            first: whole,
            second: 0,
            cut_length: 0,
            sides: [(0..y.face_count()).collect(), Vec::new()],
        });
    }
    let cut: HashSet<usize> = gamma.iter().map(|i| i.edge).collect();
    let parts = sides_of(y, &hull.disc_basis, &cut);
    if parts.len() != 2 {
        return Err(ComplexError::BadCut(format!("{} basis components", parts.len())));
    }
    let mut sides = [parts[0].clone(), parts[1].clone()];
    for (&f, &s) in hull.hull.iter().zip(hull_side) {
        sides[usize::from(s)].push(f);
    }
    let first = y.face_subcomplex(&sides[0]).0.gen_boundary();
    let second = y.face_subcomplex(&sides[1]).0.gen_boundary();
    let rhs = first + second - hull.k_const * gamma.len() as i64 - hull.k_const;
    Ok(EasyCutReport { holds: whole >= rhs, whole, first, second, cut_length: gamma.len(), sides })
}

#[derive(Clone, Copy)]
struct BoundaryEdge {
    letter: Letter,
    /// Id of the owning face's reading started at this edge.
    attachment: usize,
    face: usize,
    pos: usize,
}

struct Shelling<'a> {
    k: usize,
    readings: Vec<Vec<Letter>>,
    attachment_id: HashMap<Vec<Letter>, usize>,
    by_prefix: HashMap<&'a [Letter], Vec<usize>>,
}

struct ShellState {
    faces: Vec<usize>,
    glue: Vec<(usize, usize, usize, usize)>,
    boundary: Vec<BoundaryEdge>,
    cancel: usize,
}

/// Reduced, nonsingular planar disc diagrams over `p` with at most `max_faces` faces and
/// `Cancel > k(d + epsilon)|D|`, built by gluing faces one boundary arc at a time.
pub fn disc_isoperimetry_violations(p: &Presentation, max_faces: usize, epsilon: f64) -> Result<SearchResult> {
    if p.relators().is_empty() || max_faces == 0 {
        return Ok(SearchResult::default());
    }
    let d = p.density().ok_or(ComplexError::UndefinedDensity)?;
    let k = p.k();
    let mut readings = Vec::new();
    for r in p.relators() {
        for base in [r.clone(), inverse_word(r)] {
            for rot in 0..k {
                readings.push(rotate(&base, rot));
            }
        }
    }
    let mut attachment_id = HashMap::new();
    for w in &readings {
        let next = attachment_id.len();
        attachment_id.entry(w.clone()).or_insert(next);
    }
    let owned = readings.clone();
    let mut by_prefix: HashMap<&[Letter], Vec<usize>> = HashMap::new();
    for (i, w) in owned.iter().enumerate() {
        for l in 1..k {
            by_prefix.entry(&w[..l]).or_default().push(i);
        }
    }
    let sh = Shelling { k, readings, attachment_id, by_prefix };
    let threshold = k as f64 * (d + epsilon);
    let mut result = SearchResult::default();
    let mut keys = HashSet::new();
    for (j, r) in p.relators().iter().enumerate() {
        let root = j * 2 * k;
        let boundary = (0..k)
            .map(|i| BoundaryEdge { letter: r[i], attachment: sh.attachment_id[&rotate(r, i)], face: 0, pos: i })
            .collect();
        let mut state = ShellState { faces: vec![root], glue: Vec::new(), boundary, cancel: 0 };
        sh.grow(&mut state, max_faces, threshold, &mut result, &mut keys);
    }
    Ok(result)
}

impl Shelling<'_> {
    fn grow(
        &self,
        s: &mut ShellState,
        max_faces: usize,
        threshold: f64,
        out: &mut SearchResult,
        keys: &mut HashSet<Vec<i64>>,
    ) {
        out.states += 1;
        let m = s.faces.len();
        if s.cancel as f64 > threshold * m as f64 {
            let c = self.build(s);
            if keys.insert(canonical_key(&c)) {
                out.complexes.push(c);
            }
        }
        if m == max_faces {
            return;
        }
        let k = self.k;
        let len = s.boundary.len();
        let last = m + 1 == max_faces;
        for l in 1..k.min(len) {
            if last && (s.cancel + l) as f64 <= threshold * (m + 1) as f64 {
                continue;
            }
            for start in 0..len {
                let arc: Vec<BoundaryEdge> = (0..l).map(|t| s.boundary[(start + t) % len]).collect();
                let key: Vec<Letter> = arc.iter().rev().map(|e| -e.letter).collect();
                let Some(cands) = self.by_prefix.get(key.as_slice()) else { continue };
                for &reading in cands {
                    let u = &self.readings[reading];
                    // Face position q covers arc edge l-1-q, traversed against the boundary.
                    let folds = (0..l).any(|q| {
                        let along = inverse_word(&rotate(u, q + 1));
                        self.attachment_id.get(&along) == Some(&arc[l - 1 - q].attachment)
                    });
                    if folds {
                        continue;
                    }
                    let f = m;
                    let fresh: Vec<BoundaryEdge> = (l..k)
                        .map(|q| BoundaryEdge {
                            letter: u[q],
                            attachment: self.attachment_id[&rotate(u, q)],
                            face: f,
                            pos: q,
                        })
                        .collect();
                    let saved = s.boundary.clone();
                    let mut next = Vec::with_capacity(len - l + k - l);
                    next.extend(fresh);
                    next.extend((0..len - l).map(|t| saved[(start + l + t) % len]));
                    s.boundary = next;
                    s.faces.push(reading);
                    for (q, e) in arc.iter().rev().enumerate() {
                        s.glue.push((f, q, e.face, e.pos));
                    }
                    s.cancel += l;
                    self.grow(s, max_faces, threshold, out, keys);
                    s.cancel -= l;
                    s.glue.truncate(s.glue.len() - l);
                    s.faces.pop();
                    s.boundary = saved;
                }
            }
        }
    }

    fn build(&self, s: &ShellState) -> Complex2 {
        let mut b = ComplexBuilder::new();
        let ids: Vec<usize> = s.faces.iter().map(|&r| b.add_polygon(&self.readings[r])).collect();
        for &(f, q, g, r) in &s.glue {
            let a = b.face_incidence(ids[f], q);
            let c = b.face_incidence(ids[g], r);
            b.identify(a, c.reversed()).expect("arc letters match");
        }
        b.build(true).0
    }
}
