use super::decoder::{class_resolved_weights, decode_shot, DecodeOutcome, DecodingContext};
use super::pattern::sample_error;
use crate::error::{domain, Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// One domain-wall energy sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapSample {
    pub shot: u64,
    /// `2(w_opp − w_same)`.
    pub delta_e: i64,
    pub h_error: u8,
    pub w_same: u32,
    pub w_opp: u32,
}

/// Aggregate of a failure-rate run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotSummary {
    /// Shots decoded (timeouts excluded).
    pub shots: u64,
    /// Tie-weighted failure count.
    pub failures: f64,
    pub pfail_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub ties: u64,
    pub timeouts: u64,
    pub seed: u64,
    /// Per-logical tie-weighted failure counts.
    pub logical_failures: Vec<f64>,
}

/// Wilson score interval at 95% for `successes` out of `n`.
pub fn wilson_interval(successes: f64, n: f64) -> (f64, f64) {
    if n <= 0.0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let phat = successes / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).max(0.0).sqrt() / denom;
    let lo = if successes <= 0.0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes >= n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

fn check(p: f64, shots: u64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("p = {p} outside [0,1]"));
    }
    if shots == 0 {
        return domain("shots must be at least 1");
    }
    Ok(())
}

/// Decodes `shots` samples in parallel; results do not depend on the
/// number of worker threads.
pub fn run_failure_rate(ctx: &DecodingContext, p: f64, shots: u64, seed: u64) -> Result<ShotSummary> {
    check(p, shots)?;
    let n = ctx.geometry.n_qubits();
    let k = ctx.geometry.n_cuts();
    let results: Vec<Option<(u32, bool, Vec<u32>)>> = (0..shots)
        .into_par_iter()
        .map(|s| {
            let e = sample_error(n, p, s, seed);
            match decode_shot(ctx, &e) {
                Ok(d) => Ok(Some((d.fail_twelfths, d.outcome == DecodeOutcome::Tie, d.logical_twelfths))),
                Err(Error::Timeout(_)) => Ok(None),
                Err(err) => Err(err),
            }
        })
        .collect::<Result<_>>()?;
    let mut twelfths = 0u64;
    let mut logical = vec![0u64; k];
    let (mut done, mut ties, mut timeouts) = (0u64, 0u64, 0u64);
    for r in results {
        match r {
            Some((f, tie, lt)) => {
                done += 1;
                twelfths += f as u64;
                ties += u64::from(tie);
                for (a, b) in logical.iter_mut().zip(lt) {
                    *a += b as u64;
                }
            }
            None => timeouts += 1,
        }
    }
    let failures = twelfths as f64 / 12.0;
    let pfail_hat = if done > 0 { failures / done as f64 } else { f64::NAN };
    let (ci_low, ci_high) = wilson_interval(failures, done as f64);
    Ok(ShotSummary {
        shots: done,
        failures,
        pfail_hat,
        ci_low,
        ci_high,
        ties,
        timeouts,
        seed,
        logical_failures: logical.into_iter().map(|t| t as f64 / 12.0).collect(),
    })
}

/// Gap samples in shot order; timed-out shots are dropped and counted.
pub fn run_gap_samples(ctx: &DecodingContext, p: f64, shots: u64, seed: u64) -> Result<(Vec<GapSample>, u64)> {
    check(p, shots)?;
    let n = ctx.geometry.n_qubits();
    let results: Vec<Option<GapSample>> = (0..shots)
        .into_par_iter()
        .map(|s| {
            let e = sample_error(n, p, s, seed);
            match class_resolved_weights(ctx, &e) {
                Ok(w) => Ok(Some(GapSample {
                    shot: s,
                    delta_e: w.delta_e(),
                    h_error: w.error_class,
                    w_same: w.w_same(),
                    w_opp: w.w_opp(),
                })),
                Err(Error::Timeout(_)) => Ok(None),
                Err(err) => Err(err),
            }
        })
        .collect::<Result<_>>()?;
    let timeouts = results.iter().filter(|r| r.is_none()).count() as u64;
    Ok((results.into_iter().flatten().collect(), timeouts))
}

/// Tie-weighted failure fraction of a gap stream.
pub fn gap_failure_fraction(samples: &[GapSample]) -> f64 {
    let f: f64 = samples
        .iter()
        .map(|s| match s.delta_e.cmp(&0) {
            std::cmp::Ordering::Less => 1.0,
            std::cmp::Ordering::Equal => 0.5,
            std::cmp::Ordering::Greater => 0.0,
        })
        .sum();
    f / samples.len() as f64
}
