//! Ladders of cycles, collared diagrams, their reduction, and trees of diagrams.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::complex::{BuildError, Complex2, ComplexBuilder, ComplexError, Incidence};
use crate::loops::{ClosedWalk, LoopError, TreeOfLoops};
use crate::presentation::{free_reduce, inverse_word, rotate, Letter, Presentation, Word};
use crate::violation::{ViolationKind, ViolationRecord};
use crate::walls::{IntraSegment, WallStep};
use crate::UnionFind;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CollarError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Loop(#[from] LoopError),
    #[error("surgery failed: {0}")]
    Surgery(#[from] BuildError),
    #[error("cycle realization is not injected: {0}")]
    NotInjected(String),
    #[error("the ladder is a Möbius band")]
    Mobius,
    #[error("consecutive segments do not meet at face {0}")]
    Broken(usize),
    #[error("segment {0} prolongs its successor")]
    Prolongs(usize),
    #[error("rung {0} joins different generators")]
    RungMismatch(usize),
    #[error("disc boundary does not match the gluing path")]
    BoundaryMismatch,
    #[error("empty cycle")]
    Empty,
}

pub type Result<T> = std::result::Result<T, CollarError>;

/// A cycle passing through `face`, entering at `in_pos` and leaving at `out_pos`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Visit {
    pub face: usize,
    pub in_pos: usize,
    pub out_pos: usize,
}

/// A cyclic chain of intra-segments meeting at welds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NCycle {
    segments: Vec<IntraSegment>,
}

impl NCycle {
    pub fn new(segments: Vec<IntraSegment>, k: usize) -> Result<Self> {
        if segments.is_empty() {
            return Err(CollarError::Empty);
        }
        let n = segments.len();
        for i in 0..n {
            let (a, b) = (&segments[i], &segments[(i + 1) % n]);
            if a.end_face != b.start_face {
                return Err(CollarError::Broken(i));
            }
            if (a.end_pos + k / 2) % k == b.start_pos {
                return Err(CollarError::Prolongs(i));
            }
        }
        Ok(NCycle { segments })
    }

    /// Splits a cyclic visit list at the flagged welds; the first visit is a weld when none is.
    pub fn from_visits(visits: &[Visit], welds: &[bool]) -> Result<Self> {
        if visits.is_empty() {
            return Err(CollarError::Empty);
        }
        let n = visits.len();
        let weld_at: Vec<usize> = (0..n).filter(|&i| welds[i]).collect();
        let weld_at = if weld_at.is_empty() { vec![0] } else { weld_at };
        let mut segments = Vec::new();
        for (s, &w) in weld_at.iter().enumerate() {
            let next = weld_at[(s + 1) % weld_at.len()];
            let mut steps = Vec::new();
            let mut i = (w + 1) % n;
            while i != next {
                let v = visits[i];
                steps.push(WallStep { face: v.face, in_pos: v.in_pos, out_pos: v.out_pos });
                i = (i + 1) % n;
            }
            segments.push(IntraSegment {
                start_face: visits[w].face,
                start_pos: visits[w].out_pos,
                steps,
                end_face: visits[next].face,
                end_pos: visits[next].in_pos,
            });
        }
        Ok(NCycle { segments })
    }

    pub fn segments(&self) -> &[IntraSegment] {
        &self.segments
    }

    /// Visits in order, flagged when they are welds.
    pub fn visits(&self) -> Vec<(Visit, bool)> {
        let n = self.segments.len();
        let mut out = Vec::new();
        for i in 0..n {
            let prev = &self.segments[(i + n - 1) % n];
            let s = &self.segments[i];
            out.push((Visit { face: s.start_face, in_pos: prev.end_pos, out_pos: s.start_pos }, true));
            for st in &s.steps {
                out.push((Visit { face: st.face, in_pos: st.in_pos, out_pos: st.out_pos }, false));
            }
        }
        out
    }
}

/// Boundary circuits of a complex whose edges have degree at most two, each read along the
/// first face met; circuits are listed by their lowest edge.
pub fn boundary_circuits(c: &Complex2) -> Vec<Vec<Incidence>> {
    let deg = c.degrees();
    let mut at_edge: Vec<Vec<(usize, usize)>> = vec![Vec::new(); c.edges().len()];
    for (f, face) in c.faces().iter().enumerate() {
        for (i, inc) in face.boundary.iter().enumerate() {
            at_edge[inc.edge].push((f, i));
        }
    }
    let mut used = vec![false; c.edges().len()];
    let mut out = Vec::new();
    for e in 0..c.edges().len() {
        if deg[e] != 1 || used[e] {
            continue;
        }
        let (f0, i0) = at_edge[e][0];
        let mut state = (f0, i0, true);
        let mut circuit = Vec::new();
        loop {
            let (f, i, fwd) = state;
            let inc = c.faces()[f].boundary[i];
            used[inc.edge] = true;
            circuit.push(if fwd { inc } else { inc.reversed() });
            let k = c.faces()[f].boundary.len();
            let mut cur = (f, i, fwd);
            let next = loop {
                let (g, p, d) = cur;
                let kg = c.faces()[g].boundary.len();
                let j = if d { (p + 1) % kg } else { (p + kg - 1) % kg };
                let inc_j = c.faces()[g].boundary[j];
                if deg[inc_j.edge] == 1 {
                    break (g, j, d);
                }
                // Which end of the edge we stand at, as seen from face g.
                let at_start = d;
                let tail = inc_j.forward == at_start;
                let &(h, q) = at_edge[inc_j.edge].iter().find(|&&(h, q)| (h, q) != (g, j)).unwrap_or(&(g, j));
                let inc_q = c.faces()[h].boundary[q];
                let q_starts_here = inc_q.forward == tail;
                cur = if q_starts_here { (h, q, false) } else { (h, q, true) };
                let _ = k;
            };
            state = next;
            if state == (f0, i0, true) || circuit.len() > 4 * c.edges().len() + 4 {
                break;
            }
        }
        out.push(circuit);
    }
    out
}

/// The unfolded carrier of a cycle: one face copy per visit, consecutive copies glued at rungs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ladder {
    pub complex: Complex2,
    pub visits: Vec<Visit>,
    pub welds: Vec<bool>,
    /// Face of the ambient complex (or relator) each copy comes from.
    pub sources: Vec<usize>,
    /// Generator of the fundamental group used for gluing.
    pub p: Vec<Incidence>,
    /// Both boundary circuits, a collapsed side appearing as an empty circuit first.
    pub circuits: Vec<Vec<Incidence>>,
}

impl Ladder {
    pub fn word(&self, circuit: &[Incidence]) -> Word {
        circuit.iter().map(|&i| self.complex.letter(i)).collect()
    }

    /// The ladder glued along the first circuit that bounds a disc within the budget.
    pub fn fill(&self, filler: &Filler, max_faces: usize) -> Option<(Ladder, Filling)> {
        self.circuits.iter().find_map(|c| {
            filler.fill(&self.word(c), max_faces).filling.map(|f| (Ladder { p: c.clone(), ..self.clone() }, f))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LadderOutcome {
    Ladder(Ladder),
    Violation(ViolationRecord),
}

/// Builds a ladder from face words; visit faces index `words`.
pub fn ladder_from_words(words: &[Word], visits: &[Visit], welds: &[bool]) -> Result<Ladder> {
    let n = visits.len();
    if n == 0 {
        return Err(CollarError::Empty);
    }
    let mut b = ComplexBuilder::new();
    let copies: Vec<usize> = visits.iter().map(|v| b.add_polygon(&words[v.face])).collect();
    let mut flips = 0;
    for t in 0..n {
        let (v, w) = (visits[t], visits[(t + 1) % n]);
        let a = b.face_incidence(copies[t], v.out_pos);
        let c = b.face_incidence(copies[(t + 1) % n], w.in_pos);
        let (la, lc) = (b.letter(a), b.letter(c));
        if la == lc {
            flips += 1;
            b.identify(a, c)?;
        } else if la == -lc {
            b.identify(a, c.reversed())?;
        } else {
            return Err(CollarError::RungMismatch(t));
        }
    }
    if flips % 2 == 1 {
        return Err(CollarError::Mobius);
    }
    let (complex, _) = b.build(true);
    let mut circuits = boundary_circuits(&complex);
    if circuits.len() < 2 {
        circuits.insert(0, Vec::new());
    }
    let p = circuits[0].clone();
    let copy_visits = visits
        .iter()
        .enumerate()
        .map(|(t, v)| Visit { face: t, in_pos: v.in_pos, out_pos: v.out_pos })
        .collect();
    Ok(Ladder {
        complex,
        visits: copy_visits,
        welds: welds.to_vec(),
        sources: visits.iter().map(|v| v.face).collect(),
        p,
        circuits,
    })
}

pub fn ladder_of_cycle(c: &NCycle, y: &Complex2) -> Result<LadderOutcome> {
    let flagged = c.visits();
    let visits: Vec<Visit> = flagged.iter().map(|(v, _)| *v).collect();
    let welds: Vec<bool> = flagged.iter().map(|(_, w)| *w).collect();
    for v in &visits {
        if v.face >= y.face_count() {
            return Err(ComplexError::UnknownFace(v.face).into());
        }
    }
    let edge_at = |v: &Visit, pos: usize| y.faces()[v.face].boundary[pos].edge;
    if visits.len() == 1 {
        let v = visits[0];
        if edge_at(&v, v.in_pos) == edge_at(&v, v.out_pos) {
            return Ok(LadderOutcome::Violation(ViolationRecord::new(ViolationKind::ShortLoop, vec![v.face, v.in_pos, v.out_pos])));
        }
        return Err(CollarError::NotInjected("a single visit must close on itself".into()));
    }
    let mut faces = HashSet::new();
    let mut rungs = HashSet::new();
    for (t, v) in visits.iter().enumerate() {
        if !faces.insert(v.face) {
            return Err(CollarError::NotInjected(format!("face {} visited twice", v.face)));
        }
        let next = visits[(t + 1) % visits.len()];
        if edge_at(v, v.out_pos) != edge_at(&next, next.in_pos) {
            return Err(CollarError::NotInjected(format!("visits {t} and its successor do not share the rung")));
        }
        if !rungs.insert(edge_at(v, v.out_pos)) {
            return Err(CollarError::NotInjected(format!("edge {} crossed twice", edge_at(v, v.out_pos))));
        }
    }
    let words: Vec<Word> = (0..y.face_count()).map(|f| y.face_word(f)).collect();
    Ok(LadderOutcome::Ladder(ladder_from_words(&words, &visits, &welds)?))
}

/// A disc filling with the incidence carrying each letter of the boundary word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filling {
    pub complex: Complex2,
    pub boundary: Vec<Incidence>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FillingOutcome {
    pub filling: Option<Filling>,
    /// Set when the face budget ran out before a filling was found.
    pub exhausted: bool,
}

#[derive(Clone)]
struct FillState {
    builder: ComplexBuilder,
    boundary: Vec<Incidence>,
}

impl FillState {
    fn word(&self) -> Word {
        self.boundary.iter().map(|&i| self.builder.letter(i)).collect()
    }

    /// Folds cyclically adjacent inverse pairs until none remain.
    fn reduce(&mut self) {
        loop {
            let n = self.boundary.len();
            if n < 2 {
                return;
            }
            let w = self.word();
            let Some(i) = (0..n).find(|&i| w[i] == -w[(i + 1) % n]) else { return };
            let j = (i + 1) % n;
            let (a, b) = (self.boundary[i], self.boundary[j]);
            if self.builder.identify(a, b.reversed()).is_err() {
                return;
            }
            if j == 0 {
                self.boundary.remove(i);
                self.boundary.remove(0);
            } else {
                self.boundary.drain(i..=j);
            }
        }
    }
}

/// Bounded search for a disc with boundary word `word` over `p` using at most `max_faces` faces.
pub fn find_filling_disc(word: &[Letter], p: &Presentation, max_faces: usize) -> FillingOutcome {
    Filler::new(p).fill(word, max_faces)
}

/// Reusable filling search over one presentation.
pub struct Filler {
    readings: Readings,
}

impl Filler {
    pub fn new(p: &Presentation) -> Self {
        Filler { readings: Readings::new(p) }
    }

    pub fn fill(&self, word: &[Letter], max_faces: usize) -> FillingOutcome {
        fill_with(&self.readings, word, max_faces)
    }
}

fn fill_with(readings: &Readings, word: &[Letter], max_faces: usize) -> FillingOutcome {
    let mut builder = ComplexBuilder::new();
    let n = word.len();
    let boundary: Vec<Incidence> = if n == 0 {
        Vec::new()
    } else {
        let first = builder.add_vertex();
        let mut vs = vec![first];
        for _ in 1..n {
            vs.push(builder.add_vertex());
        }
        (0..n).map(|i| Incidence::new(builder.add_edge(vs[i], vs[(i + 1) % n], word[i]), true)).collect()
    };
    let original = boundary.clone();
    let mut start = FillState { builder, boundary };
    start.reduce();
    for budget in 0..=max_faces {
        if let Some(mut done) = fill_dfs(&start, readings, budget) {
            let (complex, map) = done.builder.build(false);
            let boundary = original.iter().map(|&i| map.incidence(i).expect("boundary edge survives")).collect();
            return FillingOutcome { filling: Some(Filling { complex, boundary }), exhausted: false };
        }
    }
    FillingOutcome { filling: None, exhausted: true }
}

/// Cyclic readings of the relators and their inverses, indexed by every prefix.
struct Readings {
    k: usize,
    all: Vec<Word>,
    by_prefix: HashMap<Word, Vec<usize>>,
}

impl Readings {
    fn new(p: &Presentation) -> Self {
        let k = p.k();
        let mut all: Vec<Word> = Vec::new();
        let mut seen = HashSet::new();
        for r in p.relators() {
            for base in [r.clone(), inverse_word(r)] {
                for rot in 0..k {
                    let w = rotate(&base, rot);
                    if seen.insert(w.clone()) {
                        all.push(w);
                    }
                }
            }
        }
        let mut by_prefix: HashMap<Word, Vec<usize>> = HashMap::new();
        for (i, w) in all.iter().enumerate() {
            for l in 1..=k {
                by_prefix.entry(w[..l].to_vec()).or_default().push(i);
            }
        }
        Readings { k, all, by_prefix }
    }
}

fn insert_face(s: &FillState, r: &[Letter], start: usize, l: usize) -> Option<FillState> {
    let n = s.boundary.len();
    let k = r.len();
    let mut next = s.clone();
    let f = next.builder.add_polygon(r);
    let glued = (0..l).all(|t| {
        let a = next.builder.face_incidence(f, t);
        next.builder.identify(a, s.boundary[(start + t) % n]).is_ok()
    });
    if !glued {
        return None;
    }
    let mut boundary: Vec<Incidence> = (l..k).rev().map(|t| next.builder.face_incidence(f, t).reversed()).collect();
    boundary.extend((0..n - l).map(|t| s.boundary[(start + l + t) % n]));
    next.boundary = boundary;
    next.reduce();
    Some(next)
}

fn cyclic_reduced_len(w: &[Letter]) -> usize {
    let r = free_reduce(w);
    let mut lo = 0;
    let mut hi = r.len();
    while hi - lo >= 2 && r[lo] == -r[hi - 1] {
        lo += 1;
        hi -= 1;
    }
    hi - lo
}

fn fill_dfs(s: &FillState, readings: &Readings, budget: usize) -> Option<FillState> {
    if s.boundary.is_empty() {
        return Some(s.clone());
    }
    if budget == 0 {
        return None;
    }
    let w = s.word();
    let n = w.len();
    let k = readings.k;
    // Each face shortens a cyclically reduced word by at most k letters.
    if n > budget * k {
        return None;
    }
    if budget == 1 {
        // One face closes the disc only when the word is itself a relator reading.
        if n != k {
            return None;
        }
        for start in 0..n {
            let u = rotate(&w, start);
            if readings.by_prefix.get(&u).is_some() {
                if let Some(done) = insert_face(s, &u, start, k).filter(|d| d.boundary.is_empty()) {
                    return Some(done);
                }
            }
        }
        return None;
    }
    for l in (1..=k.min(n)).rev() {
        for start in 0..n {
            let u: Word = (0..l).map(|t| w[(start + t) % n]).collect();
            let Some(matches) = readings.by_prefix.get(&u) else { continue };
            for &ri in matches {
                let r = &readings.all[ri];
                let mut letters: Word = r[l..].iter().rev().map(|&x| -x).collect();
                letters.extend((0..n - l).map(|t| w[(start + l + t) % n]));
                if cyclic_reduced_len(&letters) > (budget - 1) * k {
                    continue;
                }
                let Some(next) = insert_face(s, r, start, l) else { continue };
                if let Some(done) = fill_dfs(&next, readings, budget - 1) {
                    return Some(done);
                }
            }
        }
    }
    None
}

/// `D = L ∪_P A` with ladder faces first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollaredDiagram {
    pub complex: Complex2,
    pub ladder_faces: usize,
    pub visits: Vec<Visit>,
    pub welds: Vec<bool>,
    pub sources: Vec<usize>,
    pub p: Vec<Incidence>,
}

impl CollaredDiagram {
    /// Ladder faces holding welds.
    pub fn corners(&self) -> Vec<usize> {
        (0..self.visits.len()).filter(|&t| self.welds[t]).map(|t| self.visits[t].face).collect()
    }

    pub fn basis_faces(&self) -> Vec<usize> {
        (self.ladder_faces..self.complex.face_count()).collect()
    }

    /// At least half of the face's edges are external.
    pub fn is_shell(&self, f: usize) -> bool {
        let k = self.complex.faces()[f].boundary.len();
        2 * self.complex.external_edge_count(f).unwrap_or(0) >= k
    }

    /// Letters of every ladder face and the visits, which reduction must keep.
    pub fn collar_signature(&self) -> (Vec<Word>, Vec<Visit>, Vec<usize>) {
        ((0..self.ladder_faces).map(|f| self.complex.face_word(f)).collect(), self.visits.clone(), self.corners())
    }
}

pub fn assemble_collared(ladder: &Ladder, disc: &Filling) -> Result<CollaredDiagram> {
    let pw: Word = ladder.p.iter().map(|&i| ladder.complex.letter(i)).collect();
    let dw: Word = disc.boundary.iter().map(|&i| disc.complex.letter(i)).collect();
    if pw != dw {
        return Err(CollarError::BoundaryMismatch);
    }
    let (union, offsets) = Complex2::disjoint_union(&[&ladder.complex, &disc.complex]);
    let eo = offsets[1].1;
    let mut b = ComplexBuilder::from_complex(&union);
    for (a, d) in ladder.p.iter().zip(&disc.boundary) {
        b.identify(*a, Incidence::new(d.edge + eo, d.forward))?;
    }
    let (complex, map) = b.build(true);
    let p = ladder.p.iter().map(|&i| map.incidence(i).expect("ladder edge kept")).collect();
    Ok(CollaredDiagram {
        complex,
        ladder_faces: ladder.complex.face_count(),
        visits: ladder.visits.clone(),
        welds: ladder.welds.clone(),
        sources: ladder.sources.clone(),
        p,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub diagram: CollaredDiagram,
    pub violations: Vec<ViolationRecord>,
    /// Face counts after each step, starting with the input.
    pub face_counts: Vec<usize>,
}

/// Incidences of face `f` read from position `i` in the direction of that edge.
fn along(c: &Complex2, f: usize, i: usize) -> Vec<Incidence> {
    let b = &c.faces()[f].boundary;
    let k = b.len();
    if b[i].forward {
        (0..k).map(|t| b[(i + t) % k]).collect()
    } else {
        (0..k).map(|t| b[(i + k - t) % k].reversed()).collect()
    }
}

/// A shared edge position pair at which `f1` and `f2` fold.
fn fold_site(c: &Complex2, f1: usize, f2: usize) -> Option<(usize, usize)> {
    for (i, a) in c.faces()[f1].boundary.iter().enumerate() {
        for (j, b) in c.faces()[f2].boundary.iter().enumerate() {
            if a.edge == b.edge && c.attachment_word(f1, i) == c.attachment_word(f2, j) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Removes reduction pairs until none is left, keeping ladder faces.
pub fn reduce_collared(d: &CollaredDiagram, p: &Presentation) -> Result<Reduction> {
    let mut cur = d.clone();
    let mut violations = Vec::new();
    let mut face_counts = vec![cur.complex.face_count()];
    loop {
        let pairs = cur.complex.find_reduction_pairs(p)?;
        let l = cur.ladder_faces;
        let mut acted = false;
        for &(f1, f2) in &pairs {
            if f2 < l {
                let rec = ViolationRecord::new(ViolationKind::LadderFold, vec![f1, f2]);
                if !violations.contains(&rec) {
                    violations.push(rec);
                }
                continue;
            }
            let (i, j) = fold_site(&cur.complex, f1, f2).expect("pair has a fold site");
            let mut b = ComplexBuilder::from_complex(&cur.complex);
            for (x, y) in along(&cur.complex, f1, i).into_iter().zip(along(&cur.complex, f2, j)) {
                b.identify(x, y)?;
            }
            b.remove_face(f2);
            if f1 >= l {
                b.remove_face(f1);
            }
            let (complex, map) = b.build(true);
            cur.p = cur.p.iter().map(|&i| map.incidence(i).expect("ladder edge kept")).collect();
            cur.complex = complex;
            face_counts.push(cur.complex.face_count());
            acted = true;
            break;
        }
        if !acted {
            return Ok(Reduction { diagram: cur, violations, face_counts });
        }
    }
}

/// Where each walk position sits in the ambient complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WalkPoint {
    Middle { face: usize, in_pos: usize, out_pos: usize },
    Midpoint { edge: usize },
}

/// The closed walk `[M(c), E(x1), M(f1), E(x2), …]` traced by a segment from `c` back to `c`.
pub fn walk_of_segment(lambda: &IntraSegment, y: &Complex2) -> Result<(ClosedWalk, Vec<WalkPoint>)> {
    if lambda.start_face != lambda.end_face {
        return Err(CollarError::Broken(lambda.start_face));
    }
    let fc = y.face_count();
    let edge = |f: usize, p: usize| y.faces()[f].boundary[p].edge;
    let c = lambda.start_face;
    let mut points = vec![WalkPoint::Middle { face: c, in_pos: lambda.end_pos, out_pos: lambda.start_pos }];
    points.push(WalkPoint::Midpoint { edge: edge(c, lambda.start_pos) });
    for s in &lambda.steps {
        points.push(WalkPoint::Middle { face: s.face, in_pos: s.in_pos, out_pos: s.out_pos });
        points.push(WalkPoint::Midpoint { edge: edge(s.face, s.out_pos) });
    }
    let ids = points
        .iter()
        .map(|p| match *p {
            WalkPoint::Middle { face, .. } => face,
            WalkPoint::Midpoint { edge } => fc + edge,
        })
        .collect();
    Ok((ClosedWalk::new(ids)?, points))
}

/// Twin corners glued by the tree of diagrams with the gluing-lemma measurement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluingCheck {
    pub face: usize,
    pub first: Vec<usize>,
    pub second: Vec<usize>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeOfDiagrams {
    pub complex: Complex2,
    pub component: Vec<usize>,
    pub main_face: usize,
    /// Identified face pairs, as ids in the disjoint union before gluing.
    pub twins: Vec<(usize, usize)>,
    pub gluings: Vec<GluingCheck>,
    pub diagrams: Vec<CollaredDiagram>,
    /// Cycles left without a filling within the budget.
    pub missing: Vec<usize>,
    pub violations: Vec<ViolationRecord>,
}

impl TreeOfDiagrams {
    pub fn component_count(&self) -> usize {
        self.component.iter().copied().max().map_or(0, |m| m + 1)
    }

    /// The complex text followed by `TWIN` and `MAIN` lines.
    pub fn dump(&self) -> String {
        let mut s = self.complex.to_text();
        for (a, b) in &self.twins {
            writeln!(s, "TWIN {a} {b}").unwrap();
        }
        writeln!(s, "MAIN {}", self.main_face).unwrap();
        s
    }
}

fn face_components(c: &Complex2) -> Vec<usize> {
    let mut uf = UnionFind::new(c.face_count());
    let mut owner: HashMap<usize, usize> = HashMap::new();
    for (f, face) in c.faces().iter().enumerate() {
        for inc in &face.boundary {
            match owner.get(&inc.edge) {
                Some(&g) => {
                    uf.union(f, g);
                }
                None => {
                    owner.insert(inc.edge, f);
                }
            }
        }
    }
    uf.labels()
}

/// Visits and welds of each cycle of `t`, realised through `points`.
pub fn cycle_visits(t: &TreeOfLoops, points: &[WalkPoint]) -> Vec<(Vec<Visit>, Vec<bool>, Vec<usize>)> {
    let n = points.len();
    let mut partner: HashMap<usize, usize> = HashMap::new();
    for a in 0..n {
        for b in a + 1..n {
            if t.labels[a] == t.labels[b] {
                partner.insert(a, b);
                partner.insert(b, a);
            }
        }
    }
    let bridges: HashSet<usize> = t.bridge_history.iter().map(|s| s.bridge).collect();
    let mut out = Vec::new();
    for (ci, cycle) in t.cycles.iter().enumerate() {
        let m = cycle.len();
        let mut visits = Vec::new();
        let mut welds = Vec::new();
        let mut vertices = Vec::new();
        for (idx, &v) in cycle.iter().enumerate() {
            let WalkPoint::Middle { face, .. } = points[v] else { continue };
            let pred = cycle[(idx + m - 1) % m];
            let succ = cycle[(idx + 1) % m];
            let mut options = vec![v];
            options.extend(partner.get(&v));
            let pos_of = |u: usize| match points[u] {
                WalkPoint::Middle { in_pos, out_pos, .. } => (in_pos, out_pos),
                WalkPoint::Midpoint { .. } => unreachable!(),
            };
            let same = |a: usize, b: usize| t.labels[a] == t.labels[b];
            let in_pos = options
                .iter()
                .find(|&&u| same((u + n - 1) % n, pred))
                .map(|&u| pos_of(u).0)
                .unwrap_or(pos_of(v).0);
            let out_pos = options
                .iter()
                .find(|&&u| same((u + 1) % n, succ))
                .map(|&u| pos_of(u).1)
                .unwrap_or(pos_of(v).1);
            let is_x = ci + 1 < t.cycles.len() && t.bridge_history[ci].bridge == v;
            let weld = v == 0 || bridges.contains(&v) || is_x;
            visits.push(Visit { face, in_pos, out_pos });
            welds.push(weld);
            vertices.push(v);
        }
        out.push((visits, welds, vertices));
    }
    out
}

/// Collared diagrams of every cycle of `t`, glued at shell twin corners.
pub fn assemble_tree_of_diagrams(
    t: &TreeOfLoops,
    points: &[WalkPoint],
    y: &Complex2,
    p: &Presentation,
    max_faces: usize,
) -> Result<TreeOfDiagrams> {
    let k = p.k();
    let mut diagrams = Vec::new();
    let mut missing = Vec::new();
    let mut violations = Vec::new();
    let mut vertex_face: Vec<HashMap<usize, usize>> = Vec::new();
    let filler = Filler::new(p);
    for (ci, (visits, welds, vertices)) in cycle_visits(t, points).into_iter().enumerate() {
        if visits.is_empty() {
            missing.push(ci);
            vertex_face.push(HashMap::new());
            continue;
        }
        let cycle = NCycle::from_visits(&visits, &welds)?;
        let ladder = match ladder_of_cycle(&cycle, y)? {
            LadderOutcome::Ladder(l) => l,
            LadderOutcome::Violation(v) => {
                violations.push(v);
                missing.push(ci);
                vertex_face.push(HashMap::new());
                continue;
            }
        };
        let Some((ladder, filling)) = ladder.fill(&filler, max_faces) else {
            missing.push(ci);
            vertex_face.push(HashMap::new());
            continue;
        };
        let collared = assemble_collared(&ladder, &filling)?;
        let reduced = reduce_collared(&collared, p)?;
        violations.extend(reduced.violations);
        // Visits are emitted starting at the first weld, so the cycle's visit order is rotated.
        let order = cycle.visits();
        let mut map = HashMap::new();
        for (t_idx, (v, _)) in order.iter().enumerate() {
            if let Some(pos) = visits.iter().position(|w| w == v) {
                map.insert(vertices[pos], reduced.diagram.visits[t_idx].face);
            }
        }
        vertex_face.push(map);
        diagrams.push((ci, reduced.diagram));
    }
    let parts: Vec<&Complex2> = diagrams.iter().map(|(_, d)| &d.complex).collect();
    let (union, offsets) = Complex2::disjoint_union(&parts);
    let offset_of: HashMap<usize, usize> = diagrams.iter().zip(&offsets).map(|((ci, _), o)| (*ci, o.2)).collect();
    let index_of: HashMap<usize, usize> = diagrams.iter().enumerate().map(|(i, (ci, _))| (*ci, i)).collect();
    let mut b = ComplexBuilder::from_complex(&union);
    let mut twins = Vec::new();
    let mut gluings = Vec::new();
    for (&v, cs) in &t.shared_vertices() {
        if cs.len() != 2 || !matches!(points[v], WalkPoint::Middle { .. }) {
            continue;
        }
        let (a, c) = (cs[0], cs[1]);
        let (Some(&fa), Some(&fc)) = (vertex_face[a].get(&v), vertex_face[c].get(&v)) else { continue };
        let (da, dc) = (&diagrams[index_of[&a]].1, &diagrams[index_of[&c]].1);
        if !(da.is_shell(fa) && dc.is_shell(fc)) {
            continue;
        }
        let inner = |d: &CollaredDiagram, f: usize| -> Vec<usize> {
            let deg = d.complex.degrees();
            (0..k).filter(|&i| deg[d.complex.faces()[f].boundary[i].edge] >= 2).collect()
        };
        let (ga, gc) = (inner(da, fa), inner(dc, fc));
        let holds = if k == 4 {
            ga.len() + gc.len() == 4 && ga.iter().all(|x| !gc.contains(x))
        } else {
            ga.len() + gc.len() >= 4
        };
        let WalkPoint::Middle { face, .. } = points[v] else { unreachable!() };
        gluings.push(GluingCheck { face, first: ga, second: gc, holds });
        let (ua, uc) = (fa + offset_of[&a], fc + offset_of[&c]);
        for i in 0..k {
            let x = b.face_incidence(ua, i);
            let z = b.face_incidence(uc, i);
            b.identify(x, z)?;
        }
        b.remove_face(uc);
        twins.push((ua, uc));
    }
    let (complex, map) = b.build(true);
    let last = t.cycles.len() - 1;
    let main_raw = vertex_face.get(last).and_then(|m| m.get(&0)).map(|f| f + offset_of.get(&last).copied().unwrap_or(0));
    let main_face = main_raw.and_then(|f| map.face[f]).unwrap_or(0);
    let component = face_components(&complex);
    let tree = TreeOfDiagrams { complex, component, main_face, twins, gluings, diagrams: diagrams.into_iter().map(|(_, d)| d).collect(), missing, violations };
    let mut tree = tree;
    if tree.component_count() > 1 {
        tree.violations.push(ViolationRecord::new(ViolationKind::Disconnected, vec![tree.component_count()]));
    }
    Ok(tree)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeviationReport {
    pub faces: usize,
    pub gen_boundary: i64,
    /// `|∂̃| ≤ 2|D| + 2` (hex) or `|∂̃| ≤ |D| + 1` (square).
    pub inequality: bool,
    pub main_external: usize,
    /// Four external edges on the main face (hex) or two (square).
    pub main_rule: bool,
    /// Per-face share of the boundary deviation.
    pub contributions: Vec<f64>,
    pub contributions_ok: bool,
    pub gluings_ok: bool,
    /// Even generalized boundary length.
    pub parity: bool,
    pub connected: bool,
}

impl DeviationReport {
    pub fn passes(&self) -> bool {
        self.inequality && self.contributions_ok && self.gluings_ok && self.connected
    }
}

pub fn check_deviation_theorem(dt: &TreeOfDiagrams, k: usize) -> Result<DeviationReport> {
    let c = &dt.complex;
    let m = c.metrics(k)?;
    let deg = c.degrees();
    let (slope, cap, main_ext, per_face) = if k == 4 { (1, 1, 2, 1.0) } else { (2, 2, 4, 2.0) };
    let contributions: Vec<f64> = c
        .faces()
        .iter()
        .map(|f| f.boundary.iter().map(|i| (2.0 - deg[i.edge] as f64) / deg[i.edge] as f64).sum::<f64>() - slope as f64)
        .collect();
    let main_external = if dt.main_face < c.face_count() { c.external_edge_count(dt.main_face)? } else { 0 };
    Ok(DeviationReport {
        faces: m.face_count,
        gen_boundary: m.gen_boundary,
        inequality: m.gen_boundary <= slope * m.face_count as i64 + cap,
        main_external,
        main_rule: main_external == main_ext,
        contributions_ok: contributions.iter().all(|&x| x <= per_face + 1e-9),
        contributions,
        gluings_ok: dt.gluings.iter().all(|g| g.holds),
        parity: m.gen_boundary % 2 == 0,
        connected: dt.component_count() <= 1,
    })
}

/// Largest face count allowed for a theorem-passing tree of diagrams, if the bound is finite.
pub fn size_bound(k: usize, d: f64, epsilon: f64) -> Option<usize> {
    let denom = if k == 4 { 3.0 - 8.0 * d - epsilon } else { 2.0 * (1.0 - 3.0 * d - epsilon) };
    (denom > 0.0).then(|| ((1.0 / denom) - 1e-9).ceil().max(0.0) as usize)
}

/// Whether a word is trivial in the free group.
pub fn freely_trivial(w: &[Letter]) -> bool {
    free_reduce(w).is_empty()
}
