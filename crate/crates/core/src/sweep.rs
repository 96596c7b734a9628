//! Seeded parameter sweeps: for every `(n, q)` cell and trial, generate a
//! jigsaw, reconstruct it from its deck and record the outcome as a CSV row.
//!
//! Sweep files are TOML:
//!
//! ```toml
//! n = [10, 20]
//! q = [2, 10000]          # absolute colour counts
//! q_multiples = [0.5, 2]  # q = round(m * n)
//! alpha = [-4, 0, 4]      # q = round(n / sqrt(e) + ln n + alpha)
//! trials = 200
//! seed = 1
//! k = 3                   # optional, default max(1, ceil(ln n))
//! budget = 1000000        # optional, node budget per window search
//! jobs = 8                # optional, worker threads
//! record_time = false     # optional, fill the ms column
//! ```

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

use crate::jigsaw::{Jigsaw, JigsawParams};
use crate::reconstruct::{reconstruct, verify, DEFAULT_BUDGET};
use crate::rng::derive_seed;
use crate::window::default_k;

pub const CSV_HEADER: &str = "n,q,k,trial,seed,outcome,reason,s,nodes,ms";

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub n: Vec<u32>,
    #[serde(default)]
    pub q: Vec<u32>,
    #[serde(default)]
    pub q_multiples: Vec<f64>,
    #[serde(default)]
    pub alpha: Vec<f64>,
    pub trials: u32,
    pub seed: u64,
    pub k: Option<u32>,
    pub budget: Option<u64>,
    pub jobs: Option<usize>,
    #[serde(default)]
    pub record_time: bool,
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid sweep: {0}")]
    Invalid(String),
    #[error("could not start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl SweepSpec {
    pub fn from_toml(text: &str) -> Result<Self, SweepError> {
        let spec: SweepSpec = toml::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), SweepError> {
        let bad = |m: &str| Err(SweepError::Invalid(m.to_string()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.n.is_empty() || self.n.contains(&0) {
            return bad("n must be a non-empty list of positive sides");
        }
        if self.q.is_empty() && self.q_multiples.is_empty() && self.alpha.is_empty() {
            return bad("give at least one of q, q_multiples, alpha");
        }
        if self.q.iter().any(|&q| q < 2) {
            return bad("absolute q values must be at least 2");
        }
        if self.q_multiples.iter().chain(&self.alpha).any(|x| !x.is_finite()) {
            return bad("q_multiples and alpha must be finite");
        }
        if self.jobs == Some(0) {
            return bad("jobs must be at least 1");
        }
        Ok(())
    }

    /// The `(n, q)` cells in sweep order: for each `n`, the absolute values,
    /// then the multiples of `n`, then the points of the line
    /// `q = n/√e + ln n + α`. Derived values are rounded and raised to at
    /// least 2; repeats within an `n` are dropped.
    pub fn cells(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for &n in &self.n {
            let nf = n as f64;
            let line = nf / std::f64::consts::E.sqrt() + nf.ln();
            let derived = self
                .q_multiples
                .iter()
                .map(|m| m * nf)
                .chain(self.alpha.iter().map(|a| line + a))
                .map(|x| x.round().max(2.0) as u32);
            let mut seen = Vec::new();
            for q in self.q.iter().copied().chain(derived) {
                if !seen.contains(&q) {
                    seen.push(q);
                    out.push((n, q));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepRow {
    pub n: u32,
    pub q: u32,
    pub k: u32,
    pub trial: u32,
    pub seed: u64,
    /// `exact` or `failure`.
    pub outcome: &'static str,
    /// Empty for exact rows.
    pub reason: String,
    pub s: usize,
    pub nodes: u64,
    pub ms: u64,
}

impl SweepRow {
    pub fn is_exact(&self) -> bool {
        self.outcome == "exact"
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.n, self.q, self.k, self.trial, self.seed, self.outcome, self.reason, self.s, self.nodes, self.ms
        )
    }
}

/// Runs one trial. An exact reconstruction that differs from the
/// generated jigsaw is reported as a failure with reason `other_preimage`.
pub fn run_trial(n: u32, q: u32, trial: u32, spec: &SweepSpec) -> SweepRow {
    let params = JigsawParams::new(n, q).expect("cells hold valid parameters");
    let seed = derive_seed(&[spec.seed, n as u64, q as u64, trial as u64]);
    let k = spec.k.unwrap_or_else(|| default_k(n));
    let j = Jigsaw::generate(params, seed);
    let deck = j.deck();
    let report = reconstruct(&deck, k, spec.budget.unwrap_or(DEFAULT_BUDGET));
    let (outcome, reason) = match report.jigsaw() {
        Some(found) => {
            assert!(verify(found, &deck), "exact reconstruction must reproduce the deck");
            if *found == j {
                ("exact", String::new())
            } else {
                ("failure", "other_preimage".to_string())
            }
        }
        None => ("failure", report.reason().unwrap().to_string()),
    };
    SweepRow {
        n,
        q,
        k,
        trial,
        seed,
        outcome,
        reason,
        s: report.telemetry.bulk_side,
        nodes: report.telemetry.windows.nodes_expanded_total,
        ms: if spec.record_time { report.telemetry.ms } else { 0 },
    }
}

/// All rows in `(cell, trial)` order, computed on `jobs` worker threads
/// (the spec's `jobs`, else the rayon default).
pub fn sweep(spec: &SweepSpec, jobs: Option<usize>) -> Result<Vec<SweepRow>, SweepError> {
    spec.validate()?;
    let tasks: Vec<(u32, u32, u32)> = spec
        .cells()
        .into_iter()
        .flat_map(|(n, q)| (0..spec.trials).map(move |t| (n, q, t)))
        .collect();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs.or(spec.jobs) {
        pool = pool.num_threads(j);
    }
    let pool = pool.build()?;
    Ok(pool.install(|| tasks.par_iter().map(|&(n, q, t)| run_trial(n, q, t, spec)).collect()))
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.to_csv())?;
    }
    out.flush()
}
