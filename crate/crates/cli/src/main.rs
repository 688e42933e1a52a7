use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use eargen::canon::{canonical_form, canonical_key};
use eargen::engine::{Counters, Family, JobSpec};
use eargen::families::{TwoConnConfig, TwoConnected};
use eargen::graph6;
use eargen::parallel::{collect_run, parallel_run, RunSummary, Split};
use eargen::reconstruction::{EdgeReconstruction, ReconConfig};
use eargen::saturation::{self, SatConfig, UniquelySaturated};
use eargen::{ConfigError, Graph};

const EXIT_USAGE: u8 = 2;
const EXIT_INVARIANT: u8 = 3;
const EXIT_COLLISION: u8 = 4;

/// Isomorph-free generation of 2-connected graphs by canonical ear
/// augmentation.
///
/// Exit codes: 0 success, 1 I/O error, 2 usage or input error, 3 a
/// verification failed, 4 two non-isomorphic graphs share an edge deck.
#[derive(Parser, Debug)]
#[command(name = "eargen", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate 2-connected graphs.
    Gen {
        #[arg(long)]
        max_n: usize,
        /// Upper bound on the number of edges.
        #[arg(long)]
        max_e: Option<usize>,
        /// Only output graphs with exactly `max-n` vertices (and `max-e`
        /// edges, if given).
        #[arg(long)]
        exact: bool,
        /// Check that the output is 2-connected and free of isomorphs.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Search for uniquely K_r-saturated graphs with no dominating vertex.
    Saturate {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        max_n: usize,
        /// Keep searching below graphs that have a dominating vertex.
        #[arg(long)]
        no_dominating_prune: bool,
        /// Re-check every solution with brute-force verifiers.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Search sparse 2-connected graphs for edge-deck collisions.
    Reconstruct {
        #[arg(long)]
        max_n: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Print the canonical form of each graph6 line.
    Canon {
        /// Input file; standard input when absent.
        input: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Print the report only.
    #[arg(long)]
    count_only: bool,
    /// Write graphs here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 1, conflicts_with = "job")]
    workers: usize,
    /// Run only job `i` of `K`, e.g. `3/16`.
    #[arg(long)]
    job: Option<JobArg>,
    /// Depth of the search tree at which work is divided between jobs.
    #[arg(long, default_value_t = 1)]
    split_depth: usize,
}

#[derive(Clone, Copy, Debug)]
struct JobArg {
    index: usize,
    count: usize,
}

impl FromStr for JobArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (i, k) = s.split_once('/').ok_or("expected i/K")?;
        let index = i.trim().parse().map_err(|e| format!("job index: {e}"))?;
        let count = k.trim().parse().map_err(|e| format!("job count: {e}"))?;
        Ok(JobArg { index, count })
    }
}

enum Failure {
    Usage(String),
    Io(io::Error),
    Invariant(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

struct RunReport<'a> {
    mode: &'static str,
    config: String,
    run: &'a RunArgs,
    counts: &'a std::collections::BTreeMap<(usize, usize), u64>,
    counters: &'a Counters,
    elapsed: Duration,
    extra: Vec<String>,
}

impl fmt::Display for RunReport<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mode: {}", self.mode)?;
        writeln!(f, "config: {}", self.config)?;
        match self.run.job {
            Some(j) => writeln!(f, "job: {}/{} split_depth={}", j.index, j.count, self.run.split_depth)?,
            None => writeln!(f, "workers: {} split_depth={}", self.run.workers, self.run.split_depth)?,
        }
        for (&(n, e), c) in self.counts {
            writeln!(f, "count n={n} e={e}: {c}")?;
        }
        let mut by_n = std::collections::BTreeMap::<usize, u64>::new();
        for (&(n, _), c) in self.counts {
            *by_n.entry(n).or_default() += c;
        }
        for (n, c) in by_n {
            writeln!(f, "count n={n}: {c}")?;
        }
        writeln!(f, "total: {}", self.counters.solutions)?;
        let c = self.counters;
        writeln!(
            f,
            "nodes={} pruned={} augmentations={} accepted={}",
            c.nodes, c.pruned, c.augmentations, c.accepted
        )?;
        for line in &self.extra {
            writeln!(f, "{line}")?;
        }
        writeln!(f, "elapsed: {:.3}s", self.elapsed.as_secs_f64())?;
        let out = match (&self.run.output, self.run.count_only) {
            (_, true) => "none".to_string(),
            (Some(p), false) => p.display().to_string(),
            (None, false) => "stdout".to_string(),
        };
        write!(f, "output: {out}")
    }
}

fn execute<F: Family>(fam: &F, run: &RunArgs, keep: bool) -> Result<RunSummary<F::Tally>, Failure> {
    match run.job {
        Some(j) => Ok(collect_run(fam, Some(JobSpec::new(j.index, j.count, run.split_depth)?), keep)?),
        None => Ok(parallel_run(fam, &Split::new(run.workers, run.split_depth)?, keep)?),
    }
}

fn open_output(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_graphs(graphs: &[Graph], path: &Option<PathBuf>) -> io::Result<()> {
    let mut lines: Vec<String> = graphs.iter().map(graph6::encode).collect();
    lines.sort_unstable();
    let mut out = open_output(path)?;
    for line in lines {
        writeln!(out, "{line}")?;
    }
    out.flush()
}

fn gen(max_n: usize, max_e: Option<usize>, exact: bool, verify: bool, run: &RunArgs) -> Result<(), Failure> {
    let cfg = TwoConnConfig::new(max_n, max_e, exact)?;
    let fam = TwoConnected::new(cfg);
    let start = Instant::now();
    let summary = execute(&fam, run, !run.count_only || verify)?;
    let elapsed = start.elapsed();
    let mut extra = Vec::new();
    if verify {
        let mut keys: Vec<_> = summary.solutions.iter().map(canonical_key).collect();
        keys.sort_unstable();
        let before = keys.len();
        keys.dedup();
        if keys.len() != before {
            return Err(Failure::Invariant(format!("{} duplicate isomorphism classes", before - keys.len())));
        }
        if let Some(g) = summary.solutions.iter().find(|g| !g.is_two_connected()) {
            return Err(Failure::Invariant(format!("{} is not 2-connected", graph6::encode(g))));
        }
        extra.push(format!("verified: {} graphs, distinct and 2-connected", before));
    }
    if !run.count_only {
        write_graphs(&summary.solutions, &run.output)?;
    }
    let report = RunReport {
        mode: "gen",
        config: format!(
            "max_n={max_n} max_e={} exact={exact}",
            max_e.map_or("none".to_string(), |e| e.to_string())
        ),
        run,
        counts: &summary.counts,
        counters: &summary.counters,
        elapsed,
        extra,
    };
    eprintln!("{report}");
    Ok(())
}

fn saturate(r: usize, max_n: usize, no_prune: bool, verify: bool, run: &RunArgs) -> Result<(), Failure> {
    let cfg = SatConfig::new(r, max_n)?.with_dominating_prune(!no_prune);
    let fam = UniquelySaturated::new(cfg);
    let start = Instant::now();
    let summary = execute(&fam, run, true)?;
    let elapsed = start.elapsed();
    let mut extra = Vec::new();
    let mut sorted = summary.solutions.clone();
    sorted.sort_by_key(graph6::encode);
    for g in &sorted {
        let rep = saturation::saturation_report(g, r);
        extra.push(format!(
            "solution {}: degrees={:?} regular={} dominating={} completions(0/1/2+)={}/{}/{}",
            graph6::encode(g),
            rep.degrees,
            rep.regular,
            rep.dominating,
            rep.completions[0],
            rep.completions[1],
            rep.completions[2]
        ));
        if verify {
            if !saturation::verify_uniquely_saturated(g, r) || rep.dominating {
                return Err(Failure::Invariant(format!("{} fails the saturation check", graph6::encode(g))));
            }
            if g.n() > r && !saturation::is_k_connected(g, r - 2) {
                return Err(Failure::Invariant(format!("{} is not {}-connected", graph6::encode(g), r - 2)));
            }
        }
    }
    if verify {
        extra.push(format!("verified: {} solutions", sorted.len()));
    }
    if !run.count_only {
        write_graphs(&summary.solutions, &run.output)?;
    }
    let report = RunReport {
        mode: "saturate",
        config: format!("r={r} max_n={max_n} dominating_prune={}", !no_prune),
        run,
        counts: &summary.counts,
        counters: &summary.counters,
        elapsed,
        extra,
    };
    eprintln!("{report}");
    Ok(())
}

/// Returns whether a collision was found.
fn reconstruct(max_n: usize, run: &RunArgs) -> Result<bool, Failure> {
    let cfg = ReconConfig::new(max_n)?;
    let fam = EdgeReconstruction::new(cfg);
    let start = Instant::now();
    let summary = execute(&fam, run, false)?;
    let elapsed = start.elapsed();
    let t = &summary.tally;
    let mut pairs: Vec<String> = t
        .collisions
        .iter()
        .map(|(a, b)| format!("{} {}", graph6::encode(a), graph6::encode(b)))
        .collect();
    pairs.sort_unstable();
    {
        let mut out = open_output(&run.output)?;
        if !run.count_only {
            for p in &pairs {
                writeln!(out, "{p}")?;
            }
        }
        writeln!(out, "graphs={} collisions={}", summary.counters.solutions, pairs.len())?;
        out.flush()?;
    }
    let extra = vec![
        format!("edge_bound={}", cfg.edge_bound),
        format!(
            "children={} duplicates={} detectable={} compared={}",
            t.raw_children, t.duplicates, t.detectable, t.compared
        ),
        format!(
            "pairs passing degree/card-degree/deck stages: {}/{}/{}",
            t.stage_pairs[0], t.stage_pairs[1], t.stage_pairs[2]
        ),
    ];
    let report = RunReport {
        mode: "reconstruct",
        config: format!("max_n={max_n}"),
        run,
        counts: &summary.counts,
        counters: &summary.counters,
        elapsed,
        extra,
    };
    eprintln!("{report}");
    Ok(!pairs.is_empty())
}

fn canon(input: &Option<PathBuf>, output: &Option<PathBuf>) -> Result<(), Failure> {
    let reader: Box<dyn BufRead> = match input {
        Some(p) => Box::new(BufReader::new(File::open(p)?)),
        None => Box::new(BufReader::new(io::stdin().lock())),
    };
    let mut out = open_output(output)?;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let g = graph6::decode(line.trim()).map_err(|e| Failure::Usage(format!("line {}: {e}", i + 1)))?;
        writeln!(out, "{}", graph6::encode(&canonical_form(&g).canonical_graph()))?;
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen {
            max_n,
            max_e,
            exact,
            verify,
            run,
        } => gen(*max_n, *max_e, *exact, *verify, run).map(|_| false),
        Command::Saturate {
            r,
            max_n,
            no_dominating_prune,
            verify,
            run,
        } => saturate(*r, *max_n, *no_dominating_prune, *verify, run).map(|_| false),
        Command::Reconstruct { max_n, run } => reconstruct(*max_n, run),
        Command::Canon { input, output } => canon(input, output).map(|_| false),
    };
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(EXIT_COLLISION),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(EXIT_INVARIANT)
        }
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
