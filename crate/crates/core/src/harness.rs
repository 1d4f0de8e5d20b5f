//! Seeded Monte Carlo scans over random presentations, emitted as CSV.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::collar::{
    assemble_collared, ladder_from_words, Filler, reduce_collared, CollarError, CollaredDiagram, Visit,
};
use crate::complex::disc::disc_isoperimetry_violations;
use crate::complex::{Complex2, ComplexError};
use crate::presentation::{sample_presentation, Presentation, PresentationError, Word};
use crate::violation::ViolationKind;
use crate::walls::{build_bent_walls, classify_faces, find_wall_exchanger, trace_standard_walls, wall_is_embedded_tree};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Collar(#[from] CollarError),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    Square,
    Hex,
}

impl Model {
    pub fn k(self) -> usize {
        match self {
            Model::Square => 4,
            Model::Hex => 6,
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Square => "square",
            Model::Hex => "hex",
        })
    }
}

impl FromStr for Model {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "square" => Ok(Model::Square),
            "hex" => Ok(Model::Hex),
            _ => Err(format!("unknown model `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    WallCycles,
    TripleIntersections,
    Isoperimetry,
    BentTree,
    Exchanger,
}

impl Check {
    pub const ALL: [Check; 5] =
        [Check::WallCycles, Check::TripleIntersections, Check::Isoperimetry, Check::BentTree, Check::Exchanger];

    pub fn name(self) -> &'static str {
        match self {
            Check::WallCycles => "wall-cycles",
            Check::TripleIntersections => "triple-intersections",
            Check::Isoperimetry => "isoperimetry",
            Check::BentTree => "bent-tree",
            Check::Exchanger => "exchanger",
        }
    }
}

impl FromStr for Check {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Check::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| format!("unknown check `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub model: Model,
    pub n_values: Vec<usize>,
    pub d_values: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
    pub checks: BTreeSet<Check>,
    /// Face budget for the disc enumeration.
    pub max_faces: usize,
    /// Longest closed ladder probed for wall cycles.
    pub ladder_max: usize,
    /// Face budget when filling a probe ladder.
    pub fill_max: usize,
    pub epsilon: f64,
    /// Worker count; zero lets the pool decide.
    pub threads: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            model: Model::Hex,
            n_values: vec![3],
            d_values: vec![0.2],
            trials: 1,
            master_seed: 0,
            checks: Check::ALL.into_iter().collect(),
            max_faces: 4,
            ladder_max: 3,
            fill_max: 2,
            epsilon: 0.05,
            threads: 0,
        }
    }
}

fn parse_list<T: FromStr>(v: &str) -> std::result::Result<Vec<T>, String> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|_| format!("bad value `{s}`")))
        .collect()
}

fn parse_n(v: &str) -> std::result::Result<Vec<usize>, String> {
    if let Some((a, b)) = v.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| format!("bad range `{v}`"))?;
        let b: usize = b.trim().parse().map_err(|_| format!("bad range `{v}`"))?;
        return Ok((a..=b).collect());
    }
    parse_list(v)
}

impl ExperimentConfig {
    /// Reads `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| HarnessError::Config { line: idx + 1, message };
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected `key = value`".into()))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| v.parse::<usize>().map_err(|_| err(format!("bad integer `{v}`")));
            match key {
                "model" => cfg.model = value.parse().map_err(err)?,
                "n" => cfg.n_values = parse_n(value).map_err(err)?,
                "d" => cfg.d_values = parse_list(value).map_err(err)?,
                "trials" => cfg.trials = num(value)?,
                "seed" => cfg.master_seed = value.parse().map_err(|_| err(format!("bad seed `{value}`")))?,
                "checks" => cfg.checks = parse_list(value).map_err(err)?.into_iter().collect(),
                "max_faces" => cfg.max_faces = num(value)?,
                "ladder_max" => cfg.ladder_max = num(value)?,
                "fill_max" => cfg.fill_max = num(value)?,
                "epsilon" => cfg.epsilon = value.parse().map_err(|_| err(format!("bad epsilon `{value}`")))?,
                "threads" => cfg.threads = num(value)?,
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(HarnessError::Invalid("trials must be at least 1".into()));
        }
        if self.n_values.is_empty() || self.n_values.contains(&0) {
            return Err(HarnessError::Invalid("n values must be positive".into()));
        }
        if self.d_values.is_empty() || self.d_values.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
            return Err(HarnessError::Invalid("d values must lie strictly inside (0, 1)".into()));
        }
        if !(self.epsilon >= 0.0) {
            return Err(HarnessError::Invalid("epsilon must be non-negative".into()));
        }
        Ok(())
    }

    /// Grid cells in emission order, `n` outermost.
    pub fn cells(&self) -> Vec<(usize, f64)> {
        self.n_values.iter().flat_map(|&n| self.d_values.iter().map(move |&d| (n, d))).collect()
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one trial, independent of scheduling.
pub fn trial_seed(master: u64, cell: usize, trial: usize) -> u64 {
    splitmix(splitmix(splitmix(master) ^ cell as u64) ^ trial as u64)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrialRecord {
    pub model: String,
    pub n: usize,
    pub k: usize,
    pub d: f64,
    pub trial: usize,
    pub seed: u64,
    pub wall_components: usize,
    pub max_wall: usize,
    pub crossings: usize,
    pub cycle_violations: usize,
    pub triple_violations: usize,
    pub isoperimetry_violations: usize,
    pub bent_tree_failures: usize,
    pub exchanger_found: usize,
}

pub const CSV_HEADER: [&str; 14] = [
    "model",
    "n",
    "k",
    "d",
    "trial",
    "seed",
    "wall_components",
    "max_wall",
    "crossings",
    "cycle_violations",
    "triple_violations",
    "isoperimetry_violations",
    "bent_tree_failures",
    "exchanger_found",
];

impl TrialRecord {
    fn fields(&self) -> [String; 14] {
        [
            self.model.clone(),
            self.n.to_string(),
            self.k.to_string(),
            self.d.to_string(),
            self.trial.to_string(),
            self.seed.to_string(),
            self.wall_components.to_string(),
            self.max_wall.to_string(),
            self.crossings.to_string(),
            self.cycle_violations.to_string(),
            self.triple_violations.to_string(),
            self.isoperimetry_violations.to_string(),
            self.bent_tree_failures.to_string(),
            self.exchanger_found.to_string(),
        ]
    }
}

/// Closed straight ladders of up to `max_len` relator cells, one per rotation and reversal
/// class; cells are `(relator, in_pos)` with the exit antipodal to the entry.
pub fn ladder_probes(p: &Presentation, max_len: usize) -> Vec<Vec<(usize, usize)>> {
    let k = p.k();
    if k % 2 == 1 || max_len == 0 || p.relators().is_empty() {
        return Vec::new();
    }
    let h = k / 2;
    let rel = p.relators();
    let cells: Vec<(usize, usize)> = (0..rel.len()).flat_map(|j| (0..k).map(move |i| (j, i))).collect();
    let mut by_gen: HashMap<i32, Vec<(usize, usize)>> = HashMap::new();
    for &(j, i) in &cells {
        by_gen.entry(rel[j][i].abs()).or_default().push((j, i));
    }
    let exit = |(j, i): (usize, usize)| rel[j][(i + h) % k];
    let flip = |(j, i): (usize, usize)| (j, (i + h) % k);
    let canonical = |seq: &[(usize, usize)]| -> bool {
        let n = seq.len();
        let rev: Vec<(usize, usize)> = seq.iter().rev().map(|&c| flip(c)).collect();
        for s in [seq, &rev[..]] {
            for r in 0..n {
                let rotated: Vec<_> = (0..n).map(|t| s[(t + r) % n]).collect();
                if rotated[..] < seq[..] {
                    return false;
                }
                if r > 0 && std::ptr::eq(s, seq) && rotated[..] == seq[..] {
                    return false;
                }
            }
        }
        true
    };
    let mut out = Vec::new();
    let mut seq = Vec::new();
    fn grow(
        seq: &mut Vec<(usize, usize)>,
        max_len: usize,
        by_gen: &HashMap<i32, Vec<(usize, usize)>>,
        exit: &dyn Fn((usize, usize)) -> i32,
        closes: &dyn Fn(&[(usize, usize)]) -> bool,
        out: &mut Vec<Vec<(usize, usize)>>,
        rel: &[Word],
    ) {
        let last = *seq.last().unwrap();
        if closes(seq) {
            out.push(seq.clone());
        }
        if seq.len() == max_len {
            return;
        }
        let Some(next) = by_gen.get(&exit(last).abs()) else { return };
        let h = rel[0].len() / 2;
        for &c in next {
            if c < seq[0] {
                continue;
            }
            // A copy glued to a copy of the same cell at the same position is a fold.
            if c.0 == last.0 && c.1 == (last.1 + h) % rel[0].len() {
                continue;
            }
            seq.push(c);
            grow(seq, max_len, by_gen, exit, closes, out, rel);
            seq.pop();
        }
    }
    let closes = |s: &[(usize, usize)]| -> bool {
        let n = s.len();
        let (last, first) = (s[n - 1], s[0]);
        if exit(last).abs() != rel[first.0][first.1].abs() {
            return false;
        }
        if n > 1 && first.0 == last.0 && first.1 == (last.1 + h) % k {
            return false;
        }
        let same = (0..n).filter(|&t| exit(s[t]) == rel[s[(t + 1) % n].0][s[(t + 1) % n].1]).count();
        same % 2 == 0 && canonical(s)
    };
    for &c in &cells {
        seq.push(c);
        grow(&mut seq, max_len, &by_gen, &exit, &closes, &mut out, rel);
        seq.pop();
    }
    out
}

/// Probe ladders as complexes together with the reduced collared diagram of each fillable one.
pub fn probe_cycles(
    p: &Presentation,
    max_len: usize,
    fill_max: usize,
    fill: bool,
) -> Result<(Vec<Complex2>, Vec<CollaredDiagram>)> {
    let h = p.k() / 2;
    let mut ladders = Vec::new();
    let mut collared = Vec::new();
    let probes = ladder_probes(p, max_len);
    let filler = (fill && !probes.is_empty()).then(|| Filler::new(p));
    for probe in probes {
        let visits: Vec<Visit> =
            probe.iter().map(|&(j, i)| Visit { face: j, in_pos: i, out_pos: (i + h) % p.k() }).collect();
        let welds = vec![false; visits.len()];
        let ladder = match ladder_from_words(p.relators(), &visits, &welds) {
            Ok(l) => l,
            Err(CollarError::Mobius) => continue,
            Err(e) => return Err(e.into()),
        };
        if let Some(filler) = &filler {
            if let Some((ladder, filling)) = ladder.fill(filler, fill_max) {
                let d = assemble_collared(&ladder, &filling)?;
                collared.push(reduce_collared(&d, p)?.diagram);
            }
        }
        ladders.push(ladder.complex);
    }
    Ok((ladders, collared))
}

#[derive(Default)]
struct WallStats {
    components: usize,
    max_wall: usize,
    crossings: usize,
    triples: usize,
    bent_failures: usize,
}

fn wall_stats(complexes: &[&Complex2], k: usize, bent: bool) -> Result<WallStats> {
    let mut s = WallStats::default();
    for y in complexes {
        let walls = trace_standard_walls(y, k).map_err(|e| HarnessError::Invalid(e.to_string()))?;
        s.components += walls.component_count();
        s.max_wall = s.max_wall.max(walls.component_sizes().into_iter().max().unwrap_or(0));
        let classes = classify_faces(y, &walls);
        s.crossings += classes.crossings().len();
        s.triples += classes.violations.iter().filter(|v| v.kind == ViolationKind::TripleIntersection).count();
        if bent {
            s.bent_failures += match build_bent_walls(y, &walls) {
                Ok(b) => (0..b.graph.component_count())
                    .filter(|&c| !matches!(wall_is_embedded_tree(&b.graph, c), Ok((true, _))))
                    .count(),
                Err(_) => 1,
            };
        }
    }
    Ok(s)
}

pub fn run_trial(cfg: &ExperimentConfig, cell: usize, n: usize, d: f64, trial: usize) -> Result<TrialRecord> {
    let k = cfg.model.k();
    let seed = trial_seed(cfg.master_seed, cell, trial);
    let p = sample_presentation(n, k, d, seed)?;
    let has = |c: Check| cfg.checks.contains(&c);
    let want_discs = has(Check::Isoperimetry) || has(Check::TripleIntersections) || has(Check::BentTree);
    let want_fill = has(Check::WallCycles) || has(Check::TripleIntersections) || has(Check::BentTree);
    let (ladders, collared) = probe_cycles(&p, cfg.ladder_max, cfg.fill_max, want_fill)?;
    let discs = if want_discs {
        disc_isoperimetry_violations(&p, cfg.max_faces, cfg.epsilon)?.complexes
    } else {
        Vec::new()
    };
    let mut all: Vec<&Complex2> = ladders.iter().collect();
    all.extend(collared.iter().map(|c| &c.complex));
    all.extend(discs.iter());
    let stats = wall_stats(&all, k, has(Check::BentTree))?;
    let suspects: Vec<&Complex2> = collared.iter().map(|c| &c.complex).chain(discs.iter()).collect();
    let suspect_stats = wall_stats(&suspects, k, has(Check::BentTree))?;
    Ok(TrialRecord {
        model: cfg.model.to_string(),
        n,
        k,
        d,
        trial,
        seed,
        wall_components: stats.components,
        max_wall: stats.max_wall,
        crossings: stats.crossings,
        cycle_violations: if has(Check::WallCycles) { collared.len() } else { 0 },
        triple_violations: if has(Check::TripleIntersections) { suspect_stats.triples } else { 0 },
        isoperimetry_violations: if has(Check::Isoperimetry) { discs.len() } else { 0 },
        bent_tree_failures: if has(Check::BentTree) { suspect_stats.bent_failures } else { 0 },
        exchanger_found: usize::from(has(Check::Exchanger) && find_wall_exchanger(&p).is_some()),
    })
}

/// Every trial of the grid, in cell then trial order.
pub fn run_scan(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let tasks: Vec<(usize, usize, f64, usize)> = cfg
        .cells()
        .into_iter()
        .enumerate()
        .flat_map(|(c, (n, d))| (0..cfg.trials).map(move |t| (c, n, d, t)))
        .collect();
    let work = || tasks.par_iter().map(|&(c, n, d, t)| run_trial(cfg, c, n, d, t)).collect::<Result<Vec<_>>>();
    if cfg.threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| HarnessError::Invalid(e.to_string()))?;
        pool.install(work)
    } else {
        work()
    }
}

pub fn write_csv<W: Write>(records: &[TrialRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r.fields())?;
    }
    w.flush().map_err(|source| HarnessError::Io { path: PathBuf::from("<csv>"), source })?;
    Ok(())
}

pub fn scan_to_string(cfg: &ExperimentConfig) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&run_scan(cfg)?, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub fn scan_to_path(cfg: &ExperimentConfig, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })?;
    write_csv(&run_scan(cfg)?, std::io::BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round() {
        let cfg = ExperimentConfig::parse("model = square\nn = 2..4\nd = 0.1, 0.2\ntrials = 3 # three\nchecks =\n").unwrap();
        assert_eq!(cfg.model, Model::Square);
        assert_eq!(cfg.n_values, vec![2, 3, 4]);
        assert_eq!(cfg.cells().len(), 6);
        assert!(cfg.checks.is_empty());
        assert!(matches!(ExperimentConfig::parse("d = 1.0"), Err(HarnessError::Invalid(_))));
        assert!(matches!(ExperimentConfig::parse("colour = red"), Err(HarnessError::Config { line: 1, .. })));
    }

    #[test]
    fn seeds_are_spread() {
        let a: BTreeSet<u64> = (0..10).flat_map(|c| (0..10).map(move |t| trial_seed(1, c, t))).collect();
        assert_eq!(a.len(), 100);
    }

    #[test]
    fn probes_in_commutator_group() {
        let p = Presentation::new(2, 4, Some(0.1), vec![vec![1, 2, -1, -2]]).unwrap();
        let probes = ladder_probes(&p, 2);
        assert!(!probes.is_empty());
        let (ladders, collared) = probe_cycles(&p, 2, 2, true).unwrap();
        assert!(ladders.len() <= probes.len());
        assert!(collared.len() <= ladders.len());
    }

    #[test]
    fn empty_checks_leave_counters_zero() {
        let cfg = ExperimentConfig { checks: BTreeSet::new(), ..Default::default() };
        let rec = run_trial(&cfg, 0, 3, 0.2, 0).unwrap();
        assert_eq!(rec.cycle_violations + rec.isoperimetry_violations + rec.exchanger_found, 0);
    }
}
