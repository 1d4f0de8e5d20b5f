//! Closed walks with double points, sub-loop removal and trees of loops.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use rand::Rng;
use thiserror::Error;

use crate::UnionFind;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LoopError {
    #[error("empty walk")]
    Empty,
    #[error("point {0} occurs three or more times")]
    TriplePoint(usize),
    #[error("the basepoint recurs inside the walk")]
    BasepointRepeated,
    #[error("({x}, {y}) is not a sub-loop of this walk")]
    InvalidInterval { x: usize, y: usize },
    #[error("the full loop cannot be removed")]
    FullLoop,
}

pub type Result<T> = std::result::Result<T, LoopError>;

/// A cyclic sequence of point ids; position 0 is the basepoint, closing the walk.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClosedWalk {
    points: Vec<usize>,
}

impl ClosedWalk {
    pub fn new(points: Vec<usize>) -> Result<Self> {
        if points.is_empty() {
            return Err(LoopError::Empty);
        }
        let mut seen: HashMap<usize, usize> = HashMap::new();
        for &p in &points[1..] {
            if p == points[0] {
                return Err(LoopError::BasepointRepeated);
            }
            let n = seen.entry(p).or_insert(0);
            *n += 1;
            if *n > 2 {
                return Err(LoopError::TriplePoint(p));
            }
        }
        Ok(ClosedWalk { points })
    }

    /// Reads whitespace-separated tokens; ids follow first appearance and the names are returned.
    pub fn parse(text: &str) -> Result<(Self, Vec<String>)> {
        let mut names: Vec<String> = Vec::new();
        let mut ids: HashMap<&str, usize> = HashMap::new();
        let mut points = Vec::new();
        for tok in text.split_whitespace() {
            let next = ids.len();
            let id = *ids.entry(tok).or_insert_with(|| {
                names.push(tok.to_string());
                next
            });
            points.push(id);
        }
        Ok((ClosedWalk::new(points)?, names))
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Ids occurring twice.
    pub fn double_points(&self) -> usize {
        let mut count: HashMap<usize, usize> = HashMap::new();
        for &p in &self.points {
            *count.entry(p).or_insert(0) += 1;
        }
        count.values().filter(|&&c| c == 2).count()
    }

    /// Ordered pairs of consecutive point ids, closure included.
    pub fn edge_multiset(&self) -> BTreeMap<(usize, usize), usize> {
        let n = self.points.len();
        let mut out = BTreeMap::new();
        for i in 0..n {
            *out.entry((self.points[i], self.points[(i + 1) % n])).or_insert(0) += 1;
        }
        out
    }
}

/// Positions `x < y` carrying the same point, or `(0, len)` for the whole walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubLoop {
    pub x: usize,
    pub y: usize,
}

fn sub_loops_of(points: &[usize]) -> Vec<SubLoop> {
    let mut first: HashMap<usize, usize> = HashMap::new();
    let mut out = Vec::new();
    for (i, &p) in points.iter().enumerate() {
        if let Some(&x) = first.get(&p) {
            out.push(SubLoop { x, y: i });
        } else {
            first.insert(p, i);
        }
    }
    out.push(SubLoop { x: 0, y: points.len() });
    out.sort();
    out
}

pub fn find_sub_loops(w: &ClosedWalk) -> Vec<SubLoop> {
    sub_loops_of(&w.points)
}

/// Deletes positions `x+1..=y`; the walk keeps `x`, which becomes a bridge.
pub fn remove_sub_loop(w: &ClosedWalk, s: SubLoop) -> Result<(ClosedWalk, usize)> {
    if s.x == 0 && s.y == w.len() {
        return Err(LoopError::FullLoop);
    }
    if s.x >= s.y || s.y >= w.len() || w.points[s.x] != w.points[s.y] {
        return Err(LoopError::InvalidInterval { x: s.x, y: s.y });
    }
    let mut points = w.points[..=s.x].to_vec();
    points.extend_from_slice(&w.points[s.y + 1..]);
    Ok((ClosedWalk { points }, s.x))
}

/// One removal: the interval in original positions and the surviving bridge position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BridgeStep {
    pub removed: SubLoop,
    pub bridge: usize,
}

/// Simple cycles over vertex ids (original walk positions) with their point labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeOfLoops {
    pub cycles: Vec<Vec<usize>>,
    /// Point id of each vertex id.
    pub labels: Vec<usize>,
    pub bridge_history: Vec<BridgeStep>,
}

impl TreeOfLoops {
    /// Vertex → cycles containing it, for vertices on two or more cycles.
    pub fn shared_vertices(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut at: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (c, cycle) in self.cycles.iter().enumerate() {
            let distinct: HashSet<usize> = cycle.iter().copied().collect();
            for v in distinct {
                at.entry(v).or_default().push(c);
            }
        }
        at.retain(|_, cs| cs.len() > 1);
        for cs in at.values_mut() {
            cs.sort();
        }
        at
    }

    /// Pairs of cycles sharing a vertex.
    pub fn dual_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for cs in self.shared_vertices().values() {
            for (i, &a) in cs.iter().enumerate() {
                for &b in &cs[i + 1..] {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Ordered label pairs along every cycle, closure included.
    pub fn edge_multiset(&self) -> BTreeMap<(usize, usize), usize> {
        let mut out = BTreeMap::new();
        for cycle in &self.cycles {
            let n = cycle.len();
            for i in 0..n {
                *out.entry((self.labels[cycle[i]], self.labels[cycle[(i + 1) % n]])).or_insert(0) += 1;
            }
        }
        out
    }

    /// Cycles as lines of names, then `;` and the bridge history as `x-y:bridge` entries.
    pub fn dump(&self, names: &[String]) -> String {
        let name = |v: usize| names.get(self.labels[v]).cloned().unwrap_or_else(|| self.labels[v].to_string());
        let mut s = String::new();
        for cycle in &self.cycles {
            let line: Vec<String> = cycle.iter().map(|&v| name(v)).collect();
            writeln!(s, "{}", line.join(" ")).unwrap();
        }
        s.push(';');
        for step in &self.bridge_history {
            write!(s, " {}-{}:{}", step.removed.x, step.removed.y, name(step.bridge)).unwrap();
        }
        s.push('\n');
        s
    }
}

#[derive(Clone, Debug)]
struct Builder {
    labels: Vec<usize>,
    current: Vec<usize>,
    bridges: HashSet<usize>,
    cycles: Vec<Vec<usize>>,
    history: Vec<BridgeStep>,
}

impl Builder {
    fn new(w: &ClosedWalk) -> Self {
        Builder {
            labels: w.points.clone(),
            current: (0..w.len()).collect(),
            bridges: HashSet::new(),
            cycles: Vec::new(),
            history: Vec::new(),
        }
    }

    fn minimal(&self) -> Vec<SubLoop> {
        let pts: Vec<usize> = self.current.iter().map(|&v| self.labels[v]).collect();
        let loops: Vec<SubLoop> = sub_loops_of(&pts).into_iter().filter(|s| s.y < pts.len()).collect();
        loops
            .iter()
            .copied()
            .filter(|s| !loops.iter().any(|t| t != s && s.x <= t.x && t.y <= s.y))
            .collect()
    }

    fn remove(&mut self, s: SubLoop) {
        self.cycles.push(self.current[s.x..s.y].to_vec());
        let (vx, vy) = (self.current[s.x], self.current[s.y]);
        for &v in &self.current[s.x..=s.y] {
            self.bridges.remove(&v);
        }
        self.bridges.insert(vx);
        self.history.push(BridgeStep { removed: SubLoop { x: vx, y: vy }, bridge: vx });
        self.current.drain(s.x + 1..=s.y);
    }

    fn finish(mut self) -> TreeOfLoops {
        self.cycles.push(self.current.clone());
        TreeOfLoops { cycles: self.cycles, labels: self.labels, bridge_history: self.history }
    }
}

/// Removes minimal sub-loops, smallest left endpoint first, until only the whole walk is left.
pub fn build_tree_of_loops(w: &ClosedWalk) -> TreeOfLoops {
    let mut b = Builder::new(w);
    while let Some(&s) = b.minimal().first() {
        b.remove(s);
    }
    b.finish()
}

/// The trees from every sequence of minimal sub-loop choices.
pub fn all_trees_of_loops(w: &ClosedWalk) -> Vec<TreeOfLoops> {
    fn go(b: Builder, out: &mut Vec<TreeOfLoops>) {
        let options = b.minimal();
        if options.is_empty() {
            out.push(b.finish());
            return;
        }
        for s in options {
            let mut next = b.clone();
            next.remove(s);
            go(next, out);
        }
    }
    let mut out = Vec::new();
    go(Builder::new(w), &mut out);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeCondition {
    /// The cycles do not form a connected union.
    Connected,
    /// Two cycles share more than one vertex or an edge.
    PairwiseIntersection,
    /// The dual graph is not a tree.
    DualTree,
    /// Some cycle repeats a vertex.
    SimpleCycles,
}

/// `Ok` when all conditions hold, otherwise the first failing one.
pub fn verify_tree_of_loops(t: &TreeOfLoops) -> std::result::Result<(), TreeCondition> {
    for cycle in &t.cycles {
        let distinct: HashSet<usize> = cycle.iter().collect::<HashSet<_>>().into_iter().copied().collect();
        if distinct.len() != cycle.len() || cycle.is_empty() {
            return Err(TreeCondition::SimpleCycles);
        }
    }
    let vertices: Vec<usize> = {
        let mut v: Vec<usize> = t.cycles.iter().flatten().copied().collect();
        v.sort();
        v.dedup();
        v
    };
    let index: HashMap<usize, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut uf = UnionFind::new(vertices.len());
    for cycle in &t.cycles {
        for w in cycle.windows(2) {
            uf.union(index[&w[0]], index[&w[1]]);
        }
    }
    if uf.count() > 1 {
        return Err(TreeCondition::Connected);
    }
    let edges = |cycle: &[usize]| -> HashSet<(usize, usize)> {
        let n = cycle.len();
        (0..n).filter(|_| n > 1).map(|i| (cycle[i].min(cycle[(i + 1) % n]), cycle[i].max(cycle[(i + 1) % n]))).collect()
    };
    for (a, ca) in t.cycles.iter().enumerate() {
        let va: HashSet<usize> = ca.iter().copied().collect();
        for cb in &t.cycles[a + 1..] {
            let common = cb.iter().filter(|v| va.contains(v)).count();
            if common > 1 || edges(ca).intersection(&edges(cb)).next().is_some() {
                return Err(TreeCondition::PairwiseIntersection);
            }
        }
    }
    let dual = t.dual_edges();
    let mut duf = UnionFind::new(t.cycles.len());
    for &(a, b) in &dual {
        duf.union(a, b);
    }
    if duf.count() != 1 || dual.len() + 1 != t.cycles.len() {
        return Err(TreeCondition::DualTree);
    }
    Ok(())
}

/// Number of cycles through each vertex.
pub fn cycles_per_vertex(t: &TreeOfLoops) -> BTreeMap<usize, usize> {
    let mut out = BTreeMap::new();
    for cycle in &t.cycles {
        for &v in cycle.iter().collect::<HashSet<_>>() {
            *out.entry(v).or_insert(0) += 1;
        }
    }
    out
}

/// A random admissible walk of `len` positions: each interior point reuses an open id with
/// probability one half.
pub fn random_admissible_walk<R: Rng>(len: usize, rng: &mut R) -> ClosedWalk {
    let len = len.max(1);
    let mut points = vec![0];
    let mut open: Vec<usize> = Vec::new();
    let mut next = 1;
    for _ in 1..len {
        if !open.is_empty() && rng.gen_bool(0.5) {
            let i = rng.gen_range(0..open.len());
            points.push(open.swap_remove(i));
        } else {
            points.push(next);
            open.push(next);
            next += 1;
        }
    }
    ClosedWalk { points }
}
