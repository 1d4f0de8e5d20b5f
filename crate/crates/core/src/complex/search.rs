//! Exhaustive search over small complexes fulfilled by a presentation.

use std::collections::{HashSet, VecDeque};

use super::canon::canonical_key;
use super::{Complex2, ComplexBuilder, ComplexError, Result};
use crate::presentation::Presentation;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Distinct search states explored before giving up.
    pub max_states: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_states: 1_000_000 }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SearchResult {
    pub complexes: Vec<Complex2>,
    pub truncated: bool,
    pub states: usize,
}

/// Faces are copies of relator cells read in the cell's own orientation; `class[f*k + i]`
/// names the edge carrying position `i` of face `f`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct State {
    types: Vec<u16>,
    class: Vec<u16>,
}

struct Ctx<'a> {
    p: &'a Presentation,
    k: usize,
}

impl Ctx<'_> {
    fn letter(&self, s: &State, inc: usize) -> i32 {
        self.p.relators()[s.types[inc / self.k] as usize][inc % self.k]
    }

    fn classes(&self, s: &State) -> usize {
        s.class.iter().map(|&c| c as usize + 1).max().unwrap_or(0)
    }

    fn members(&self, s: &State) -> Vec<Vec<usize>> {
        let mut m = vec![Vec::new(); self.classes(s)];
        for (i, &c) in s.class.iter().enumerate() {
            m[c as usize].push(i);
        }
        m
    }

    fn cell_key(&self, s: &State, inc: usize) -> (u16, usize) {
        (s.types[inc / self.k], inc % self.k)
    }

    fn compatible(&self, s: &State, a: &[usize], b: &[usize]) -> bool {
        if self.letter(s, a[0]).abs() != self.letter(s, b[0]).abs() {
            return false;
        }
        a.iter().all(|&x| b.iter().all(|&y| self.cell_key(s, x) != self.cell_key(s, y)))
    }

    fn canonical(&self, s: &State) -> State {
        let k = self.k;
        let m = s.types.len();
        let members = self.members(s);
        let signature = |f: usize| -> Vec<(usize, usize)> {
            (0..k)
                .map(|i| {
                    let cls = &members[s.class[f * k + i] as usize];
                    let mut faces: Vec<usize> = cls.iter().map(|x| x / k).collect();
                    faces.dedup();
                    (cls.len(), faces.len())
                })
                .collect()
        };
        let sigs: Vec<_> = (0..m).map(signature).collect();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| (s.types[a], &sigs[a]).cmp(&(s.types[b], &sigs[b])));
        let mut blocks: Vec<(usize, usize)> = Vec::new();
        let mut start = 0;
        for i in 1..=m {
            if i == m || (s.types[order[i]], &sigs[order[i]]) != (s.types[order[start]], &sigs[order[start]]) {
                blocks.push((start, i));
                start = i;
            }
        }
        let mut best: Option<Vec<u16>> = None;
        let mut perm = order.clone();
        permute_blocks(&mut perm, &blocks, 0, &mut |perm| {
            let mut relabel = vec![u16::MAX; members.len()];
            let mut next = 0u16;
            let mut enc = Vec::with_capacity(m * k);
            for &f in perm {
                for i in 0..k {
                    let c = s.class[f * k + i] as usize;
                    if relabel[c] == u16::MAX {
                        relabel[c] = next;
                        next += 1;
                    }
                    enc.push(relabel[c]);
                }
            }
            if best.as_ref().map_or(true, |b| enc < *b) {
                best = Some(enc);
            }
        });
        State { types: order.iter().map(|&f| s.types[f]).collect(), class: best.unwrap_or_default() }
    }

    fn children(&self, s: &State, max_faces: usize) -> Vec<State> {
        let k = self.k;
        let members = self.members(s);
        let mut out = Vec::new();
        for a in 0..members.len() {
            for b in a + 1..members.len() {
                if self.compatible(s, &members[a], &members[b]) {
                    let class = s
                        .class
                        .iter()
                        .map(|&c| if c as usize == b { a as u16 } else { c })
                        .collect();
                    out.push(State { types: s.types.clone(), class });
                }
            }
        }
        if s.types.len() < max_faces {
            let fresh = members.len() as u16;
            for (j, r) in self.p.relators().iter().enumerate() {
                for pos in 0..k {
                    for (c, cls) in members.iter().enumerate() {
                        let clash = cls.iter().any(|&x| self.cell_key(s, x) == (j as u16, pos));
                        if self.letter(s, cls[0]).abs() != r[pos].abs() || clash {
                            continue;
                        }
                        let mut types = s.types.clone();
                        types.push(j as u16);
                        let mut class = s.class.clone();
                        class.extend((0..k).map(|i| if i == pos { c as u16 } else { fresh + i as u16 }));
                        out.push(normalize(State { types, class }));
                    }
                }
            }
        }
        out
    }

    fn to_complex(&self, s: &State) -> Complex2 {
        let k = self.k;
        let mut b = ComplexBuilder::new();
        let faces: Vec<usize> = s.types.iter().map(|&t| b.add_polygon(&self.p.relators()[t as usize])).collect();
        for cls in self.members(s) {
            let first = b.face_incidence(faces[cls[0] / k], cls[0] % k);
            for &x in &cls[1..] {
                let inc = b.face_incidence(faces[x / k], x % k);
                let inc = if b.letter(inc) == b.letter(first) { inc } else { inc.reversed() };
                b.identify(first, inc).expect("class members share a generator");
            }
        }
        b.build(true).0
    }
}

fn normalize(s: State) -> State {
    let mut relabel = std::collections::HashMap::new();
    let class = s
        .class
        .iter()
        .map(|c| {
            let next = relabel.len() as u16;
            *relabel.entry(*c).or_insert(next)
        })
        .collect();
    State { types: s.types, class }
}

fn permute_blocks(perm: &mut Vec<usize>, blocks: &[(usize, usize)], b: usize, visit: &mut dyn FnMut(&[usize])) {
    if b == blocks.len() {
        visit(perm);
        return;
    }
    let (lo, hi) = blocks[b];
    heap_permute(perm, lo, hi, hi - lo, &mut |perm| permute_blocks(perm, blocks, b + 1, visit));
}

fn heap_permute(perm: &mut Vec<usize>, lo: usize, hi: usize, n: usize, visit: &mut dyn FnMut(&mut Vec<usize>)) {
    if n <= 1 {
        visit(perm);
        return;
    }
    for i in 0..n - 1 {
        heap_permute(perm, lo, hi, n - 1, visit);
        if n % 2 == 0 {
            perm.swap(lo + i, lo + n - 1);
        } else {
            perm.swap(lo, lo + n - 1);
        }
    }
    heap_permute(perm, lo, hi, n - 1, visit);
}

/// Walks every connected complex fulfilled by `p` with at most `max_faces` faces, calling
/// `keep` on each; kept complexes are returned without isomorphic duplicates.
fn explore(
    p: &Presentation,
    max_faces: usize,
    budget: SearchBudget,
    keep: &dyn Fn(usize, usize) -> bool,
) -> SearchResult {
    let k = p.k();
    let ctx = Ctx { p, k };
    let mut result = SearchResult::default();
    if max_faces == 0 || p.relators().is_empty() {
        return result;
    }
    let mut seen: HashSet<State> = HashSet::new();
    let mut queue = VecDeque::new();
    for j in 0..p.relators().len() {
        let s = State { types: vec![j as u16], class: (0..k as u16).collect() };
        if seen.insert(s.clone()) {
            queue.push_back(s);
        }
    }
    let mut keys = HashSet::new();
    while let Some(s) = queue.pop_front() {
        result.states += 1;
        if keep(s.types.len(), ctx.classes(&s)) {
            let c = ctx.to_complex(&s);
            if keys.insert(canonical_key(&c)) {
                result.complexes.push(c);
            }
        }
        for child in ctx.children(&s, max_faces) {
            let canon = ctx.canonical(&child);
            if !seen.contains(&canon) {
                if seen.len() >= budget.max_states {
                    result.truncated = true;
                    return result;
                }
                seen.insert(canon.clone());
                queue.push_back(canon);
            }
        }
    }
    result
}

/// Every connected complex fulfilled by `p` with at most `max_faces` faces, up to isomorphism.
pub fn enumerate_fulfilled(p: &Presentation, max_faces: usize, budget: SearchBudget) -> SearchResult {
    explore(p, max_faces, budget, &|_, _| true)
}

pub fn local_isoperimetry_violations(p: &Presentation, max_faces: usize, epsilon: f64) -> Result<SearchResult> {
    local_isoperimetry_violations_with(p, max_faces, epsilon, SearchBudget::default())
}

/// Complexes fulfilled by `p` with `Cancel(Y) > k(d + epsilon)|Y|`.
pub fn local_isoperimetry_violations_with(
    p: &Presentation,
    max_faces: usize,
    epsilon: f64,
    budget: SearchBudget,
) -> Result<SearchResult> {
    if p.relators().is_empty() {
        return Ok(SearchResult::default());
    }
    let d = p.density().ok_or(ComplexError::UndefinedDensity)?;
    let k = p.k();
    let threshold = k as f64 * (d + epsilon);
    Ok(explore(p, max_faces, budget, &|faces, edges| {
        let cancel = (k * faces - edges) as f64;
        cancel > threshold * faces as f64
    }))
}
