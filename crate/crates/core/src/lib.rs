//! Combinatorics of random groups in the k-gonal model: presentations, labelled 2-complexes,
//! walls, trees of loops, collared diagrams and a seeded Monte Carlo driver.

pub mod collar;
pub mod complex;
pub mod harness;
pub mod loops;
pub mod presentation;
pub mod violation;
pub mod walls;

pub use complex::{CellMap, Complex2, ComplexBuilder, ComplexError, Edge, Face, Incidence, MetricReport};
pub use presentation::{Letter, Presentation, PresentationError, Word};
pub use violation::{ViolationKind, ViolationRecord};

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug, Default)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    sets: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n], sets: n }
    }

    /// Adds a singleton and returns its id.
    pub fn push(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.size.push(1);
        self.sets += 1;
        self.parent.len() - 1
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when the two were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        self.sets -= 1;
        true
    }

    pub fn count(&self) -> usize {
        self.sets
    }

    /// Labels 0.. in order of first appearance.
    pub fn labels(&mut self) -> Vec<usize> {
        let mut map = std::collections::HashMap::new();
        (0..self.len())
            .map(|x| {
                let r = self.find(x);
                let next = map.len();
                *map.entry(r).or_insert(next)
            })
            .collect()
    }
}
