//! Finite combinatorial 2-complexes with letter-labelled edges.

mod builder;
pub mod canon;
pub mod disc;
pub mod search;

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::presentation::{inverse_word, rotate, Letter, Presentation, Word};

pub use builder::{BuildError, BuildMap, ComplexBuilder};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComplexError {
    #[error("unknown edge {0}")]
    UnknownEdge(usize),
    #[error("unknown face {0}")]
    UnknownFace(usize),
    #[error("edge {edge} references vertex {vertex} outside 0..{count}")]
    UnknownVertex { edge: usize, vertex: usize, count: usize },
    #[error("edge {0} has the zero label")]
    ZeroLabel(usize),
    #[error("face {0} has an empty or open attaching path")]
    OpenPath(usize),
    #[error("face {face} has {len} sides, expected {k}")]
    NotKGonal { face: usize, len: usize, k: usize },
    #[error("face {0} does not read a relator")]
    NotFulfilled(usize),
    #[error("not a planar disc diagram: {0}")]
    NotPlanar(String),
    #[error("cut path does not partition the disc basis: {0}")]
    BadCut(String),
    #[error("presentation density is undefined")]
    UndefinedDensity,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, ComplexError>;

/// A directed edge incidence inside a face boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Incidence {
    pub edge: usize,
    pub forward: bool,
}

impl Incidence {
    pub fn new(edge: usize, forward: bool) -> Self {
        Incidence { edge, forward }
    }

    pub fn reversed(self) -> Self {
        Incidence { edge: self.edge, forward: !self.forward }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub label: Letter,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Face {
    pub boundary: Vec<Incidence>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Complex2 {
    vertex_count: usize,
    edges: Vec<Edge>,
    faces: Vec<Face>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MetricReport {
    pub face_count: usize,
    pub gen_boundary: i64,
    pub cancellation: i64,
    /// `|∂̃Y| - ((k-2)/2)|Y|`; undefined for odd k.
    pub deviation: Option<i64>,
}

/// How one face sits on a relator cell: the face reads `rotate(r, rotation)`, or the
/// same for `r^{-1}` when `inverted`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CellMap {
    pub relator: usize,
    pub rotation: usize,
    pub inverted: bool,
}

impl CellMap {
    /// Position in the relator (not its inverse) hit by face position `i`.
    pub fn cell_position(&self, i: usize, k: usize) -> usize {
        let t = (self.rotation + i) % k;
        if self.inverted {
            k - 1 - t
        } else {
            t
        }
    }
}

/// All ways a cyclic word reads a relator of `p`.
pub fn cell_maps(word: &[Letter], p: &Presentation) -> Vec<CellMap> {
    let k = word.len();
    let mut out = Vec::new();
    if k != p.k() {
        return out;
    }
    for (j, r) in p.relators().iter().enumerate() {
        for (inverted, base) in [(false, r.clone()), (true, inverse_word(r))] {
            for rotation in 0..k {
                if (0..k).all(|i| base[(rotation + i) % k] == word[i]) {
                    out.push(CellMap { relator: j, rotation, inverted });
                }
            }
        }
    }
    out
}

impl Complex2 {
    pub fn new(vertex_count: usize, edges: Vec<Edge>, faces: Vec<Face>) -> Result<Self> {
        for (id, e) in edges.iter().enumerate() {
            for v in [e.from, e.to] {
                if v >= vertex_count {
                    return Err(ComplexError::UnknownVertex { edge: id, vertex: v, count: vertex_count });
                }
            }
            if e.label == 0 {
                return Err(ComplexError::ZeroLabel(id));
            }
        }
        let c = Complex2 { vertex_count, edges, faces };
        for (id, f) in c.faces.iter().enumerate() {
            if f.boundary.is_empty() {
                return Err(ComplexError::OpenPath(id));
            }
            for inc in &f.boundary {
                if inc.edge >= c.edges.len() {
                    return Err(ComplexError::UnknownEdge(inc.edge));
                }
            }
            let m = f.boundary.len();
            for i in 0..m {
                if c.end(f.boundary[i]) != c.start(f.boundary[(i + 1) % m]) {
                    return Err(ComplexError::OpenPath(id));
                }
            }
        }
        Ok(c)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn start(&self, inc: Incidence) -> usize {
        let e = &self.edges[inc.edge];
        if inc.forward {
            e.from
        } else {
            e.to
        }
    }

    pub fn end(&self, inc: Incidence) -> usize {
        self.start(inc.reversed())
    }

    pub fn letter(&self, inc: Incidence) -> Letter {
        let l = self.edges[inc.edge].label;
        if inc.forward {
            l
        } else {
            -l
        }
    }

    pub fn face_word(&self, f: usize) -> Word {
        self.faces[f].boundary.iter().map(|&inc| self.letter(inc)).collect()
    }

    /// The face word read from position `i`, in the direction that traverses that edge forwards.
    pub fn attachment_word(&self, f: usize, i: usize) -> Word {
        let w = self.face_word(f);
        if self.faces[f].boundary[i].forward {
            rotate(&w, i)
        } else {
            inverse_word(&rotate(&w, i + 1))
        }
    }

    pub fn check_k_gonal(&self, k: usize) -> Result<()> {
        match self.faces.iter().position(|f| f.boundary.len() != k) {
            Some(face) => Err(ComplexError::NotKGonal { face, len: self.faces[face].boundary.len(), k }),
            None => Ok(()),
        }
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.edges.len()];
        for f in &self.faces {
            for inc in &f.boundary {
                deg[inc.edge] += 1;
            }
        }
        deg
    }

    pub fn edge_degree(&self, e: usize) -> Result<usize> {
        if e >= self.edges.len() {
            return Err(ComplexError::UnknownEdge(e));
        }
        Ok(self.faces.iter().flat_map(|f| &f.boundary).filter(|inc| inc.edge == e).count())
    }

    pub fn gen_boundary(&self) -> i64 {
        self.degrees().iter().map(|&d| 2 - d as i64).sum()
    }

    pub fn metrics(&self, k: usize) -> Result<MetricReport> {
        self.check_k_gonal(k)?;
        let deg = self.degrees();
        let gen_boundary: i64 = deg.iter().map(|&d| 2 - d as i64).sum();
        let cancellation: i64 = deg.iter().map(|&d| d as i64 - 1).sum();
        let face_count = self.faces.len();
        let deviation = (k % 2 == 0).then(|| gen_boundary - ((k as i64 - 2) / 2) * face_count as i64);
        Ok(MetricReport { face_count, gen_boundary, cancellation, deviation })
    }

    pub fn external_edge_count(&self, f: usize) -> Result<usize> {
        let face = self.faces.get(f).ok_or(ComplexError::UnknownFace(f))?;
        let deg = self.degrees();
        Ok(face.boundary.iter().filter(|inc| deg[inc.edge] == 1).count())
    }

    pub fn parity_check(&self, k: usize) -> Result<bool> {
        self.check_k_gonal(k)?;
        Ok(self.gen_boundary() % 2 == 0)
    }

    /// Searches for cell maps of all faces that are injective on the link of every edge.
    pub fn fulfilling_map(&self, p: &Presentation) -> Option<Vec<CellMap>> {
        let k = p.k();
        if self.faces.iter().any(|f| f.boundary.len() != k) {
            return None;
        }
        let options: Vec<Vec<CellMap>> = (0..self.faces.len()).map(|f| cell_maps(&self.face_word(f), p)).collect();
        if options.iter().any(|o| o.is_empty()) {
            return None;
        }
        let mut used: HashMap<(usize, usize, usize), usize> = HashMap::new();
        let mut chosen = Vec::with_capacity(self.faces.len());
        if self.assign_maps(0, &options, &mut used, &mut chosen, k) {
            Some(chosen)
        } else {
            None
        }
    }

    fn assign_maps(
        &self,
        f: usize,
        options: &[Vec<CellMap>],
        used: &mut HashMap<(usize, usize, usize), usize>,
        chosen: &mut Vec<CellMap>,
        k: usize,
    ) -> bool {
        if f == self.faces.len() {
            return true;
        }
        for &m in &options[f] {
            let keys: Vec<_> =
                self.faces[f].boundary.iter().enumerate().map(|(i, inc)| (inc.edge, m.relator, m.cell_position(i, k))).collect();
            let distinct: BTreeSet<_> = keys.iter().collect();
            if distinct.len() != keys.len() || keys.iter().any(|key| used.contains_key(key)) {
                continue;
            }
            for key in &keys {
                used.insert(*key, f);
            }
            chosen.push(m);
            if self.assign_maps(f + 1, options, used, chosen, k) {
                return true;
            }
            chosen.pop();
            for key in &keys {
                used.remove(key);
            }
        }
        false
    }

    pub fn is_fulfilled_by(&self, p: &Presentation) -> bool {
        self.fulfilling_map(p).is_some()
    }

    /// Pairs of distinct faces sharing an edge whose attachment words from that edge coincide.
    pub fn find_reduction_pairs(&self, p: &Presentation) -> Result<Vec<(usize, usize)>> {
        for f in 0..self.faces.len() {
            if cell_maps(&self.face_word(f), p).is_empty() {
                return Err(ComplexError::NotFulfilled(f));
            }
        }
        Ok(self.folds())
    }

    /// Fold detection without reference to a presentation.
    pub fn folds(&self) -> Vec<(usize, usize)> {
        let mut at_edge: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.edges.len()];
        for (f, face) in self.faces.iter().enumerate() {
            for (i, inc) in face.boundary.iter().enumerate() {
                at_edge[inc.edge].push((f, i));
            }
        }
        let mut pairs = BTreeSet::new();
        for incs in &at_edge {
            for (a, &(f1, i1)) in incs.iter().enumerate() {
                for &(f2, i2) in &incs[a + 1..] {
                    if f1 != f2 && self.attachment_word(f1, i1) == self.attachment_word(f2, i2) {
                        pairs.insert((f1.min(f2), f1.max(f2)));
                    }
                }
            }
        }
        pairs.into_iter().collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return true;
        }
        let mut uf = crate::UnionFind::new(self.vertex_count);
        for e in &self.edges {
            uf.union(e.from, e.to);
        }
        uf.count() == 1
    }

    /// The subcomplex generated by a set of faces; returns it with the old→new face map.
    pub fn face_subcomplex(&self, faces: &[usize]) -> (Complex2, Vec<Option<usize>>) {
        let mut keep_face = vec![false; self.faces.len()];
        for &f in faces {
            keep_face[f] = true;
        }
        let mut edge_map = vec![None; self.edges.len()];
        let mut vertex_map = vec![None; self.vertex_count];
        let mut edges = Vec::new();
        let mut vcount = 0;
        let mut face_map = vec![None; self.faces.len()];
        let mut new_faces = Vec::new();
        for (f, face) in self.faces.iter().enumerate() {
            if !keep_face[f] {
                continue;
            }
            let mut boundary = Vec::with_capacity(face.boundary.len());
            for inc in &face.boundary {
                let id = *edge_map[inc.edge].get_or_insert_with(|| {
                    let e = self.edges[inc.edge];
                    let mut map_v = |v: usize| {
                        *vertex_map[v].get_or_insert_with(|| {
                            vcount += 1;
                            vcount - 1
                        })
                    };
                    let (from, to) = (map_v(e.from), map_v(e.to));
                    edges.push(Edge { from, to, label: e.label });
                    edges.len() - 1
                });
                boundary.push(Incidence::new(id, inc.forward));
            }
            face_map[f] = Some(new_faces.len());
            new_faces.push(Face { boundary });
        }
        (Complex2 { vertex_count: vcount, edges, faces: new_faces }, face_map)
    }

    /// Disjoint union; returns the union and per-part (vertex, edge, face) offsets.
    pub fn disjoint_union(parts: &[&Complex2]) -> (Complex2, Vec<(usize, usize, usize)>) {
        let mut out = Complex2::default();
        let mut offsets = Vec::new();
        for p in parts {
            let (vo, eo, fo) = (out.vertex_count, out.edges.len(), out.faces.len());
            offsets.push((vo, eo, fo));
            out.vertex_count += p.vertex_count;
            out.edges.extend(p.edges.iter().map(|e| Edge { from: e.from + vo, to: e.to + vo, label: e.label }));
            out.faces.extend(p.faces.iter().map(|f| Face {
                boundary: f.boundary.iter().map(|inc| Incidence::new(inc.edge + eo, inc.forward)).collect(),
            }));
        }
        (out, offsets)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "V {}", self.vertex_count).unwrap();
        for (id, e) in self.edges.iter().enumerate() {
            writeln!(s, "E {id} {} {} {}", e.from, e.to, e.label).unwrap();
        }
        for (id, f) in self.faces.iter().enumerate() {
            let incs: Vec<String> =
                f.boundary.iter().map(|inc| format!("{}{}", if inc.forward { '+' } else { '-' }, inc.edge)).collect();
            writeln!(s, "F {id} {}", incs.join(" ")).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut vertex_count = None;
        let mut edges: Vec<(usize, Edge)> = Vec::new();
        let mut faces: Vec<(usize, Face)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let err = |msg: &str| ComplexError::Parse { line: i + 1, msg: msg.to_string() };
            let toks: Vec<&str> = line.split_whitespace().collect();
            let num = |t: &str| t.parse::<usize>().map_err(|_| err(&format!("bad integer `{t}`")));
            match toks.first().copied() {
                None => continue,
                Some("V") if toks.len() == 2 => vertex_count = Some(num(toks[1])?),
                Some("E") if toks.len() == 5 => {
                    let label = toks[4].parse::<Letter>().map_err(|_| err("bad label"))?;
                    edges.push((num(toks[1])?, Edge { from: num(toks[2])?, to: num(toks[3])?, label }));
                }
                Some("F") if toks.len() >= 2 => {
                    let boundary = toks[2..]
                        .iter()
                        .map(|t| {
                            let (sign, rest) = t.split_at(1);
                            let forward = match sign {
                                "+" => true,
                                "-" => false,
                                _ => return Err(err("incidence needs an explicit sign")),
                            };
                            Ok(Incidence::new(num(rest)?, forward))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    faces.push((num(toks[1])?, Face { boundary }));
                }
                _ => return Err(err("unrecognised line")),
            }
        }
        let vertex_count = vertex_count.ok_or(ComplexError::Parse { line: 1, msg: "missing V line".into() })?;
        edges.sort_by_key(|(id, _)| *id);
        faces.sort_by_key(|(id, _)| *id);
        if edges.iter().enumerate().any(|(i, (id, _))| i != *id) || faces.iter().enumerate().any(|(i, (id, _))| i != *id) {
            return Err(ComplexError::Parse { line: 0, msg: "ids must be 0..count without gaps".into() });
        }
        Complex2::new(vertex_count, edges.into_iter().map(|(_, e)| e).collect(), faces.into_iter().map(|(_, f)| f).collect())
    }
}
