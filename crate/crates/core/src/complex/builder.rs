use thiserror::Error;

use super::{Complex2, Edge, Face, Incidence};
use crate::presentation::Letter;
use crate::UnionFind;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BuildError {
    #[error("cannot identify incidences reading {0} and {1}")]
    LabelMismatch(Letter, Letter),
    #[error("identification would reverse edge {0} onto itself")]
    SelfReversal(usize),
}

/// Mutable assembly of a complex with edge and vertex identifications.
#[derive(Clone, Debug, Default)]
pub struct ComplexBuilder {
    vertices: UnionFind,
    edge_parent: Vec<(usize, bool)>,
    edges: Vec<Edge>,
    faces: Vec<Option<Vec<Incidence>>>,
}

/// Where raw builder ids ended up after [`ComplexBuilder::build`].
#[derive(Clone, Debug, Default)]
pub struct BuildMap {
    pub face: Vec<Option<usize>>,
    /// New edge id and whether the raw edge runs against it.
    pub edge: Vec<Option<(usize, bool)>>,
    pub vertex: Vec<Option<usize>>,
}

impl BuildMap {
    pub fn incidence(&self, inc: Incidence) -> Option<Incidence> {
        self.edge[inc.edge].map(|(e, flip)| Incidence::new(e, inc.forward != flip))
    }
}

impl ComplexBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Starts from a copy of an existing complex; raw ids equal the complex's ids.
    pub fn from_complex(c: &Complex2) -> Self {
        let mut b = Self::new();
        for _ in 0..c.vertex_count() {
            b.add_vertex();
        }
        for e in c.edges() {
            b.add_edge(e.from, e.to, e.label);
        }
        for f in c.faces() {
            b.add_face(f.boundary.clone());
        }
        b
    }

    pub fn add_vertex(&mut self) -> usize {
        self.vertices.push()
    }

    pub fn add_edge(&mut self, from: usize, to: usize, label: Letter) -> usize {
        self.edges.push(Edge { from, to, label });
        self.edge_parent.push((self.edges.len() - 1, false));
        self.edges.len() - 1
    }

    pub fn add_face(&mut self, boundary: Vec<Incidence>) -> usize {
        self.faces.push(Some(boundary));
        self.faces.len() - 1
    }

    /// A polygon with fresh vertices and edges reading `word`.
    pub fn add_polygon(&mut self, word: &[Letter]) -> usize {
        let first = self.vertices.len();
        let k = word.len();
        for _ in 0..k {
            self.add_vertex();
        }
        let boundary =
            (0..k).map(|i| Incidence::new(self.add_edge(first + i, first + (i + 1) % k, word[i]), true)).collect();
        self.add_face(boundary)
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn face_boundary(&self, f: usize) -> Option<&[Incidence]> {
        self.faces[f].as_deref()
    }

    pub fn face_incidence(&self, f: usize, i: usize) -> Incidence {
        let b = self.faces[f].as_ref().expect("face removed");
        b[i % b.len()]
    }

    pub fn remove_face(&mut self, f: usize) {
        self.faces[f] = None;
    }

    fn find_edge(&mut self, e: usize) -> (usize, bool) {
        let (p, flip) = self.edge_parent[e];
        if p == e {
            return (e, false);
        }
        let (root, pflip) = self.find_edge(p);
        self.edge_parent[e] = (root, flip ^ pflip);
        (root, flip ^ pflip)
    }

    /// The incidence expressed on the representative edge.
    pub fn resolve(&mut self, inc: Incidence) -> Incidence {
        let (root, flip) = self.find_edge(inc.edge);
        Incidence::new(root, inc.forward != flip)
    }

    pub fn letter(&self, inc: Incidence) -> Letter {
        let l = self.edges[inc.edge].label;
        if inc.forward {
            l
        } else {
            -l
        }
    }

    pub fn start(&mut self, inc: Incidence) -> usize {
        let e = self.edges[inc.edge];
        self.vertices.find(if inc.forward { e.from } else { e.to })
    }

    pub fn end(&mut self, inc: Incidence) -> usize {
        self.start(inc.reversed())
    }

    pub fn same_vertex(&mut self, u: usize, v: usize) -> bool {
        self.vertices.find(u) == self.vertices.find(v)
    }

    pub fn identify_vertices(&mut self, u: usize, v: usize) {
        self.vertices.union(u, v);
    }

    /// Makes traversal `a` and traversal `b` the same directed edge.
    pub fn identify(&mut self, a: Incidence, b: Incidence) -> Result<(), BuildError> {
        let (la, lb) = (self.letter(a), self.letter(b));
        if la != lb {
            return Err(BuildError::LabelMismatch(la, lb));
        }
        let (ra, rb) = (self.resolve(a), self.resolve(b));
        if ra.edge == rb.edge {
            return if ra.forward == rb.forward { Ok(()) } else { Err(BuildError::SelfReversal(ra.edge)) };
        }
        self.edge_parent[rb.edge] = (ra.edge, ra.forward != rb.forward);
        let ea = self.edges[a.edge];
        let eb = self.edges[b.edge];
        let (sa, ta) = if a.forward { (ea.from, ea.to) } else { (ea.to, ea.from) };
        let (sb, tb) = if b.forward { (eb.from, eb.to) } else { (eb.to, eb.from) };
        self.vertices.union(sa, sb);
        self.vertices.union(ta, tb);
        Ok(())
    }

    /// Compacts ids. With `drop_unused`, edges and vertices not on a surviving face are removed.
    pub fn build(&mut self, drop_unused: bool) -> (Complex2, BuildMap) {
        let raw_edges = self.edges.len();
        let mut used = vec![!drop_unused; raw_edges];
        for f in self.faces.iter().flatten() {
            for inc in f {
                used[inc.edge] = true;
            }
        }
        let mut root_used = vec![false; raw_edges];
        for e in 0..raw_edges {
            if used[e] {
                let (r, _) = self.find_edge(e);
                root_used[r] = true;
            }
        }
        let mut map = BuildMap {
            face: vec![None; self.faces.len()],
            edge: vec![None; raw_edges],
            vertex: vec![None; self.vertices.len()],
        };
        let mut vertex_ids = vec![None; self.vertices.len()];
        let mut vcount = 0;
        let mut new_vertex = |this: &mut Self, v: usize, vertex_ids: &mut Vec<Option<usize>>| {
            let r = this.vertices.find(v);
            *vertex_ids[r].get_or_insert_with(|| {
                vcount += 1;
                vcount - 1
            })
        };
        let mut edge_ids = vec![None; raw_edges];
        let mut edges = Vec::new();
        for e in 0..raw_edges {
            if root_used[e] && self.find_edge(e).0 == e {
                let raw = self.edges[e];
                let from = new_vertex(self, raw.from, &mut vertex_ids);
                let to = new_vertex(self, raw.to, &mut vertex_ids);
                edge_ids[e] = Some(edges.len());
                edges.push(Edge { from, to, label: raw.label });
            }
        }
        if !drop_unused {
            for v in 0..self.vertices.len() {
                new_vertex(self, v, &mut vertex_ids);
            }
        }
        for e in 0..raw_edges {
            let (r, flip) = self.find_edge(e);
            if let Some(id) = edge_ids[r] {
                map.edge[e] = Some((id, flip));
            }
        }
        for v in 0..self.vertices.len() {
            let r = self.vertices.find(v);
            map.vertex[v] = vertex_ids[r];
        }
        let mut faces = Vec::new();
        for (f, face) in self.faces.iter().enumerate() {
            if let Some(b) = face {
                map.face[f] = Some(faces.len());
                faces.push(Face { boundary: b.iter().map(|&inc| map.incidence(inc).expect("face edge kept")).collect() });
            }
        }
        let c = Complex2::new(vcount, edges, faces).expect("builder output is a valid complex");
        (c, map)
    }
}
