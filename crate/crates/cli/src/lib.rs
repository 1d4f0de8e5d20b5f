//! Command dispatch for the `kgonal` binary.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use kgonal::complex::search::{enumerate_fulfilled, local_isoperimetry_violations, SearchBudget};
use kgonal::harness::{scan_to_path, scan_to_string, ExperimentConfig, HarnessError, Model};
use kgonal::loops::{build_tree_of_loops, ClosedWalk, LoopError};
use kgonal::presentation::{relator_count, sample_presentation};
use kgonal::walls::{build_bent_walls, classify_faces, find_wall_exchanger, trace_standard_walls, wall_is_embedded_tree};
use kgonal::{Complex2, ComplexError, Presentation, PresentationError, ViolationRecord};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Walls(#[from] kgonal::walls::WallError),
    #[error(transparent)]
    Loops(#[from] LoopError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
}

#[derive(Parser, Debug)]
#[command(name = "kgonal", version, about = "Random groups in the k-gonal model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelArg {
    Square,
    Hex,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::Square => Model::Square,
            ModelArg::Hex => Model::Hex,
        }
    }
}

#[derive(Args, Debug)]
struct Common {
    /// Write output here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with status 2 when violation records are reported.
    #[arg(long)]
    strict: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw a random presentation.
    Sample {
        #[arg(long)]
        n: usize,
        /// Relator length; defaults to the model's.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        d: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "hex")]
        model: ModelArg,
        #[command(flatten)]
        common: Common,
    },
    /// Trace the standard walls of a complex.
    TraceWalls {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long, value_enum, default_value = "hex")]
        model: ModelArg,
        #[command(flatten)]
        common: Common,
    },
    /// Bend the walls at crossings and test each for being an embedded tree.
    BentWalls {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long, value_enum, default_value = "hex")]
        model: ModelArg,
        #[command(flatten)]
        common: Common,
    },
    /// Decompose a closed walk into a tree of loops.
    TreeOfLoops {
        #[arg(long)]
        walk: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// List fulfilled complexes and report local isoperimetry violations.
    EnumerateDiagrams {
        #[arg(long)]
        pres: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_faces: usize,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Look for a relator with equal antipodal letters.
    FindExchanger {
        #[arg(long)]
        pres: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a Monte Carlo scan described by a config file.
    Scan {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        model: Option<ModelArg>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        max_faces: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn emit(common: &Common, text: &str) -> Result<(), CliError> {
    match &common.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io { path: path.clone(), source }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })
        }
    }
}

/// Output text and the number of violation records in it.
fn execute(cmd: &Command) -> Result<(String, usize), CliError> {
    let mut s = String::new();
    let mut violations = 0;
    match cmd {
        Command::Sample { n, k, d, seed, model, .. } => {
            let k = k.unwrap_or(Model::from(*model).k());
            if !(*d > 0.0 && *d < 1.0) {
                return Err(CliError::Usage(format!("--d must lie strictly inside (0, 1), got {d}")));
            }
            relator_count(*n, k, *d)?;
            s = sample_presentation(*n, k, *d, *seed)?.to_text();
        }
        Command::TraceWalls { complex, model, .. } => {
            let y = Complex2::from_text(&read(complex)?)?;
            let walls = trace_standard_walls(&y, Model::from(*model).k())?;
            s.push_str(&walls.dump());
            let classes = classify_faces(&y, &walls);
            for f in classes.crossings() {
                writeln!(s, "C {f}").unwrap();
            }
            violations += push_records(&mut s, &classes.violations);
        }
        Command::BentWalls { complex, model, .. } => {
            let y = Complex2::from_text(&read(complex)?)?;
            let walls = trace_standard_walls(&y, Model::from(*model).k())?;
            let bent = build_bent_walls(&y, &walls)?;
            s.push_str(&bent.graph.dump());
            for c in 0..bent.graph.component_count() {
                let (tree, _) = wall_is_embedded_tree(&bent.graph, c)?;
                writeln!(s, "T {c} {}", if tree { "tree" } else { "not-tree" }).unwrap();
                if !tree {
                    violations += push_records(
                        &mut s,
                        &[ViolationRecord::new(kgonal::ViolationKind::WallNotTree, vec![c])],
                    );
                }
            }
        }
        Command::TreeOfLoops { walk, .. } => {
            let (w, names) = ClosedWalk::parse(&read(walk)?)?;
            s = build_tree_of_loops(&w).dump(&names);
        }
        Command::EnumerateDiagrams { pres, max_faces, epsilon, .. } => {
            let p = Presentation::from_text(&read(pres)?)?;
            let all = enumerate_fulfilled(&p, *max_faces, SearchBudget::default());
            for (i, c) in all.complexes.iter().enumerate() {
                writeln!(s, "# complex {i}").unwrap();
                s.push_str(&c.to_text());
            }
            if all.truncated {
                writeln!(s, "# truncated after {} states", all.states).unwrap();
            }
            let bad = local_isoperimetry_violations(&p, *max_faces, *epsilon)?;
            let records: Vec<ViolationRecord> = bad
                .complexes
                .iter()
                .map(|c| {
                    let id = all.complexes.iter().position(|x| x == c).unwrap_or(usize::MAX);
                    ViolationRecord::new(kgonal::ViolationKind::Isoperimetry, vec![id, c.face_count()])
                })
                .collect();
            violations += push_records(&mut s, &records);
        }
        Command::FindExchanger { pres, .. } => {
            let p = Presentation::from_text(&read(pres)?)?;
            match find_wall_exchanger(&p) {
                Some(x) => {
                    let g: Vec<String> = x.g.iter().map(|l| l.to_string()).collect();
                    writeln!(s, "{}", g.join(" ")).unwrap();
                }
                None => s.push_str("none\n"),
            }
        }
        Command::Scan { .. } => unreachable!("scan writes its own output"),
    }
    Ok((s, violations))
}

fn push_records(s: &mut String, records: &[ViolationRecord]) -> usize {
    for r in records {
        writeln!(s, "{r}").unwrap();
    }
    records.len()
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    if let Command::Scan { config, seed, model, epsilon, max_faces, common } = &cli.command {
        let mut cfg = ExperimentConfig::load(config)?;
        if let Some(seed) = seed {
            cfg.master_seed = *seed;
        }
        if let Some(m) = model {
            cfg.model = (*m).into();
        }
        if let Some(e) = epsilon {
            cfg.epsilon = *e;
        }
        if let Some(m) = max_faces {
            cfg.max_faces = *m;
        }
        match &common.out {
            Some(path) => scan_to_path(&cfg, path)?,
            None => emit(common, &scan_to_string(&cfg)?)?,
        }
        return Ok(0);
    }
    let (text, violations) = execute(&cli.command)?;
    let common = match &cli.command {
        Command::Sample { common, .. }
        | Command::TraceWalls { common, .. }
        | Command::BentWalls { common, .. }
        | Command::TreeOfLoops { common, .. }
        | Command::EnumerateDiagrams { common, .. }
        | Command::FindExchanger { common, .. }
        | Command::Scan { common, .. } => common,
    };
    emit(common, &text)?;
    Ok(if common.strict && violations > 0 { 2 } else { 0 })
}

/// Runs the command line `args` (program name first) and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
