//! Monte Carlo campaign runner.
//!
//! Trials are sharded over a rayon pool; each trial derives its own RNG
//! stream from (seed, trial index), so aggregated counts are identical for
//! any worker count. Per-point results carry both the any-mask failure count
//! and per-mask counts.

use crate::blocks::Block;
use crate::decoder::Decoder;
use crate::noise::sample_trial;
use crate::template::BlockKind;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialStats {
    pub kind: BlockKind,
    pub d: u32,
    pub p_e: f64,
    pub p_p: f64,
    pub trials: u64,
    /// trials where at least one mask parity was misrecovered
    pub failures: u64,
    pub per_mask_failures: Vec<u64>,
    pub seed: u64,
    pub wall_seconds: f64,
    /// set when a run was cut short (fewer trials than requested)
    pub truncated: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct LogicalErrorEstimate {
    pub rate: f64,
    pub stderr: f64,
}

impl TrialStats {
    pub fn estimate(&self) -> LogicalErrorEstimate {
        let rate = self.failures as f64 / self.trials.max(1) as f64;
        LogicalErrorEstimate {
            rate,
            stderr: (rate * (1.0 - rate) / self.trials.max(1) as f64).sqrt(),
        }
    }
}

struct Counts {
    any: u64,
    per_mask: Vec<u64>,
}

impl Counts {
    fn zero(k: usize) -> Counts {
        Counts { any: 0, per_mask: vec![0; k] }
    }
    fn merge(mut self, o: Counts) -> Counts {
        self.any += o.any;
        for (a, b) in self.per_mask.iter_mut().zip(o.per_mask) {
            *a += b;
        }
        self
    }
}

pub fn run_point(block: &Block, p_e: f64, p_p: f64, trials: u64, seed: u64) -> TrialStats {
    let start = std::time::Instant::now();
    let g = &block.graph;
    let decoder = Decoder::new(g);
    let fallible: Vec<usize> =
        (0..g.edges.len()).filter(|&ei| !g.edges[ei].perfect).collect();
    let nmasks = block.masks.len();

    let counts = (0..trials)
        .into_par_iter()
        .fold(
            || Counts::zero(nmasks),
            |mut acc, trial| {
                let noise = sample_trial(g.edges.len(), &fallible, p_e, p_p, seed, trial);
                let mut syndrome = vec![false; g.checks.len()];
                for (ei, e) in g.edges.iter().enumerate() {
                    if noise.error[ei] {
                        syndrome[e.a] ^= true;
                        if let Some(b) = e.b {
                            syndrome[b] ^= true;
                        }
                    }
                }
                let correction = decoder.decode(&noise.erased, &syndrome);
                let mut any = false;
                for (mi, mask) in block.masks.iter().enumerate() {
                    let mut parity = false;
                    for (ei, &in_mask) in mask.edges.iter().enumerate() {
                        if in_mask && (noise.error[ei] ^ correction[ei]) {
                            parity ^= true;
                        }
                    }
                    if parity {
                        acc.per_mask[mi] += 1;
                        any = true;
                    }
                }
                if any {
                    acc.any += 1;
                }
                acc
            },
        )
        .reduce(|| Counts::zero(nmasks), Counts::merge);

    TrialStats {
        kind: block.kind,
        d: block.d,
        p_e,
        p_p,
        trials,
        failures: counts.any,
        per_mask_failures: counts.per_mask,
        seed,
        wall_seconds: start.elapsed().as_secs_f64(),
        truncated: false,
    }
}

/// CSV header for result rows; per-mask counts are semicolon-joined.
pub const CSV_HEADER: &str = "kind,d,p_E,p_P,trials,failures,per_mask_failures,seed";

pub fn csv_row(s: &TrialStats) -> String {
    let per_mask = s
        .per_mask_failures
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(";");
    format!(
        "{},{},{},{},{},{},{},{}",
        s.kind, s.d, s.p_e, s.p_p, s.trials, s.failures, per_mask, s.seed
    )
}

pub fn parse_csv_row(line: &str) -> Option<TrialStats> {
    let f: Vec<&str> = line.split(',').collect();
    if f.len() != 8 {
        return None;
    }
    Some(TrialStats {
        kind: f[0].parse().ok()?,
        d: f[1].parse().ok()?,
        p_e: f[2].parse().ok()?,
        p_p: f[3].parse().ok()?,
        trials: f[4].parse().ok()?,
        failures: f[5].parse().ok()?,
        per_mask_failures: if f[6].is_empty() {
            Vec::new()
        } else {
            f[6].split(';').map(|c| c.parse()).collect::<Result<_, _>>().ok()?
        },
        seed: f[7].parse().ok()?,
        wall_seconds: 0.0,
        truncated: false,
    })
}

/// The adjudication parity of one mask against an error + correction pair.
pub fn mask_failed(mask: &crate::graph::Mask, error: &[bool], correction: &[bool]) -> bool {
    mask.edges
        .iter()
        .enumerate()
        .filter(|&(ei, &m)| m && (error[ei] ^ correction[ei]))
        .count()
        % 2
        == 1
}

/// Fully sequential reference implementation used to pin down determinism.
pub fn run_point_serial(block: &Block, p_e: f64, p_p: f64, trials: u64, seed: u64) -> TrialStats {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    pool.install(|| run_point(block, p_e, p_p, trials, seed))
}

