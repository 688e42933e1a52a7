//! Running a search as many independent jobs.
//!
//! A run with `workers > 1` is cut into `jobs` residue classes of the nodes
//! at a fixed split depth (see [`JobSpec`]). Jobs share nothing, so results
//! merge by addition. With the `parallel` feature the jobs run on a rayon
//! pool; without it they run one after another.

use std::collections::BTreeMap;

use crate::engine::{run, Counters, Family, JobSpec, Tally};
use crate::error::ConfigError;
use crate::graph::Graph;

/// Everything a run produces, merged across jobs.
#[derive(Clone, Debug, Default)]
pub struct RunSummary<T> {
    /// Solutions, when requested. Order depends on the job split.
    pub solutions: Vec<Graph>,
    /// Solutions per `(vertices, edges)`.
    pub counts: BTreeMap<(usize, usize), u64>,
    pub counters: Counters,
    pub tally: T,
}

impl<T: Tally> RunSummary<T> {
    pub fn merge(&mut self, other: Self) {
        self.solutions.extend(other.solutions);
        for (k, v) in other.counts {
            *self.counts.entry(k).or_default() += v;
        }
        self.counters.merge(&other.counters);
        self.tally.merge(other.tally);
    }
}

/// Run one job (or the whole search) and collect its output.
pub fn collect_run<F: Family>(fam: &F, job: Option<JobSpec>, keep: bool) -> Result<RunSummary<F::Tally>, ConfigError> {
    let mut solutions = Vec::new();
    let mut counts = BTreeMap::new();
    let stats = run(fam, job, |g| {
        *counts.entry((g.n(), g.m())).or_default() += 1;
        if keep {
            solutions.push(*g);
        }
    })?;
    Ok(RunSummary {
        solutions,
        counts,
        counters: stats.counters,
        tally: stats.tally,
    })
}

/// How to cut a run into jobs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Split {
    pub workers: usize,
    /// Number of residue classes; more jobs than workers balances load.
    pub jobs: usize,
    pub split_depth: usize,
}

impl Split {
    pub fn new(workers: usize, split_depth: usize) -> Result<Self, ConfigError> {
        if workers == 0 {
            return Err(ConfigError::Workers);
        }
        Ok(Split {
            workers,
            jobs: if workers == 1 { 1 } else { workers * 16 },
            split_depth,
        })
    }

    pub fn with_jobs(mut self, jobs: usize) -> Result<Self, ConfigError> {
        if jobs == 0 {
            return Err(ConfigError::JobModulus);
        }
        self.jobs = jobs;
        Ok(self)
    }
}

fn job_list(split: &Split) -> Result<Vec<Option<JobSpec>>, ConfigError> {
    if split.jobs == 1 {
        return Ok(vec![None]);
    }
    (0..split.jobs)
        .map(|i| JobSpec::new(i, split.jobs, split.split_depth).map(Some))
        .collect()
}

fn merge_all<T: Tally>(parts: Vec<RunSummary<T>>) -> RunSummary<T> {
    let mut total = RunSummary::default();
    for part in parts {
        total.merge(part);
    }
    total
}

/// Run every job of `split` one after another on the calling thread.
pub fn sequential_run<F: Family>(fam: &F, split: &Split, keep: bool) -> Result<RunSummary<F::Tally>, ConfigError> {
    let parts = job_list(split)?
        .into_iter()
        .map(|job| collect_run(fam, job, keep))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(merge_all(parts))
}

/// Run every job of `split` on a pool of `split.workers` threads.
#[cfg(feature = "parallel")]
pub fn parallel_run<F: Family>(fam: &F, split: &Split, keep: bool) -> Result<RunSummary<F::Tally>, ConfigError> {
    use rayon::prelude::*;

    let jobs = job_list(split)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(split.workers)
        .build()
        .map_err(|e| ConfigError::ThreadPool(e.to_string()))?;
    let parts = pool.install(|| {
        jobs.into_par_iter()
            .map(|job| collect_run(fam, job, keep))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(merge_all(parts))
}

/// Without the `parallel` feature this is [`sequential_run`].
#[cfg(not(feature = "parallel"))]
pub fn parallel_run<F: Family>(fam: &F, split: &Split, keep: bool) -> Result<RunSummary<F::Tally>, ConfigError> {
    sequential_run(fam, split, keep)
}
