//! Isomorphism-invariant keys for labelled 2-complexes.

use super::{Complex2, Incidence};
use crate::presentation::Letter;

struct Reading {
    incs: Vec<Incidence>,
}

fn readings(c: &Complex2, f: usize) -> (Vec<Letter>, Vec<Reading>) {
    let b = &c.faces()[f].boundary;
    let m = b.len();
    let mut all = Vec::with_capacity(2 * m);
    for s in 0..m {
        all.push((0..m).map(|i| b[(s + i) % m]).collect::<Vec<_>>());
        all.push((0..m).map(|i| b[(s + m - i) % m].reversed()).collect::<Vec<_>>());
    }
    let word = |incs: &[Incidence]| incs.iter().map(|&i| c.letter(i)).collect::<Vec<_>>();
    let best = all.iter().map(|r| word(r)).min().unwrap_or_default();
    let mut chosen: Vec<Reading> = Vec::new();
    for r in all {
        if word(&r) == best && !chosen.iter().any(|x| x.incs == r) {
            chosen.push(Reading { incs: r });
        }
    }
    (best, chosen)
}

struct Search<'a> {
    c: &'a Complex2,
    slots: Vec<usize>,
    groups: Vec<Vec<usize>>,
    readings: Vec<Vec<Reading>>,
    used: Vec<bool>,
    edge_label: Vec<u32>,
    vertex_label: Vec<u32>,
    next_edge: u32,
    next_vertex: u32,
    current: Vec<u32>,
    best: Option<Vec<u32>>,
}

const UNSET: u32 = u32::MAX;

impl Search<'_> {
    fn run(&mut self, slot: usize) {
        if slot == self.slots.len() {
            if self.best.as_ref().map_or(true, |b| self.current < *b) {
                self.best = Some(self.current.clone());
            }
            return;
        }
        let g = self.slots[slot];
        for idx in 0..self.groups[g].len() {
            let f = self.groups[g][idx];
            if self.used[f] {
                continue;
            }
            for r in 0..self.readings[f].len() {
                let (saved_e, saved_v) = (self.next_edge, self.next_vertex);
                let start = self.current.len();
                let mut touched_e = Vec::new();
                let mut touched_v = Vec::new();
                for t in 0..self.readings[f][r].incs.len() {
                    let inc = self.readings[f][r].incs[t];
                    if self.edge_label[inc.edge] == UNSET {
                        self.edge_label[inc.edge] = self.next_edge;
                        self.next_edge += 1;
                        touched_e.push(inc.edge);
                    }
                    let v = self.c.start(inc);
                    if self.vertex_label[v] == UNSET {
                        self.vertex_label[v] = self.next_vertex;
                        self.next_vertex += 1;
                        touched_v.push(v);
                    }
                    self.current.push(self.edge_label[inc.edge]);
                    self.current.push(self.vertex_label[v]);
                }
                let worse = self.best.as_ref().is_some_and(|b| self.current[..] > b[..self.current.len()]);
                if !worse {
                    self.used[f] = true;
                    self.run(slot + 1);
                    self.used[f] = false;
                }
                self.current.truncate(start);
                for e in touched_e {
                    self.edge_label[e] = UNSET;
                }
                for v in touched_v {
                    self.vertex_label[v] = UNSET;
                }
                self.next_edge = saved_e;
                self.next_vertex = saved_v;
            }
        }
    }
}

/// A key equal for two complexes iff they are isomorphic as labelled complexes
/// (faces may be re-read from any corner in either direction). Edges and vertices
/// not on any face are only counted.
pub fn canonical_key(c: &Complex2) -> Vec<i64> {
    let nf = c.face_count();
    let mut words = Vec::with_capacity(nf);
    let mut reads = Vec::with_capacity(nf);
    for f in 0..nf {
        let (w, r) = readings(c, f);
        words.push(w);
        reads.push(r);
    }
    let mut order: Vec<usize> = (0..nf).collect();
    order.sort_by(|&a, &b| words[a].cmp(&words[b]));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slots = Vec::new();
    for (i, &f) in order.iter().enumerate() {
        if i == 0 || words[f] != words[order[i - 1]] {
            groups.push(Vec::new());
        }
        groups.last_mut().unwrap().push(f);
        slots.push(groups.len() - 1);
    }
    let mut s = Search {
        c,
        slots,
        groups,
        readings: reads,
        used: vec![false; nf],
        edge_label: vec![UNSET; c.edges().len()],
        vertex_label: vec![UNSET; c.vertex_count()],
        next_edge: 0,
        next_vertex: 0,
        current: Vec::new(),
        best: None,
    };
    s.run(0);
    let mut key = vec![nf as i64];
    for &f in &order {
        key.push(words[f].len() as i64);
        key.extend(words[f].iter().map(|&l| l as i64));
    }
    key.extend(s.best.unwrap_or_default().into_iter().map(i64::from));
    key.push(c.edges().len() as i64);
    key.push(c.vertex_count() as i64);
    key
}
