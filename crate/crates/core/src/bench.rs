//! Scaling, truncation and cusp measurements.

use std::time::Instant;

use serde::Serialize;

use crate::analytic;
use crate::error::{invalid, Result};
use crate::lattice::{build_whip, pair_indices, sink_pair};
use crate::par::{self, Exec};
use crate::propagation::{early_eval_unchecked, early_eval_with_stats};

pub const DEFAULT_REPEATS: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingSample {
    #[serde(rename = "L")]
    pub l: usize,
    pub theta: f64,
    /// Median wall time over the timed repeats.
    pub wall_ns: u64,
    pub max_strings: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingReport {
    pub time_slope: f64,
    pub strings_slope: f64,
    pub samples: Vec<ScalingSample>,
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Coefficient of determination of a linear fit.
pub fn r_squared(x: &[f64], y: &[f64]) -> f64 {
    let (k, c) = linear_fit(x, y);
    let my = y.iter().sum::<f64>() / y.len() as f64;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - (k * a + c)).powi(2)).sum();
    let ss_tot: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    1.0 - ss_res / ss_tot
}

pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly).0
}

fn median(v: &mut [u64]) -> u64 {
    v.sort_unstable();
    v[v.len() / 2]
}

/// Times early evaluation of the sink pair on each size: one warm-up run,
/// then the median of `repeats` runs. Always single-threaded.
pub fn scaling_run(ls: &[usize], theta: f64, repeats: usize) -> Result<ScalingReport> {
    let mut distinct = ls.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(invalid("scaling needs at least four distinct sizes"));
    }
    if repeats == 0 {
        return Err(invalid("repeats must be positive"));
    }
    let mut samples = Vec::with_capacity(distinct.len());
    for &l in &distinct {
        let c = build_whip(2, l)?;
        let pair = sink_pair(l)?;
        let (value, stats) = early_eval_with_stats(&c, &pair, theta, None)?;
        let (a, b) = pair_indices(&c, &pair)?;
        let mut times: Vec<u64> = (0..repeats)
            .map(|_| {
                let t = Instant::now();
                let (v, _) = early_eval_unchecked(&c, a, b, theta, None);
                let ns = t.elapsed().as_nanos() as u64;
                std::hint::black_box(v);
                ns
            })
            .collect();
        samples.push(ScalingSample {
            l,
            theta,
            wall_ns: median(&mut times),
            max_strings: stats.max_strings,
            value,
        });
    }
    let x: Vec<f64> = samples.iter().map(|s| s.l as f64).collect();
    let t: Vec<f64> = samples.iter().map(|s| s.wall_ns.max(1) as f64).collect();
    let m: Vec<f64> = samples.iter().map(|s| s.max_strings as f64).collect();
    Ok(ScalingReport {
        time_slope: loglog_slope(&x, &t),
        strings_slope: loglog_slope(&x, &m),
        samples,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncationRow {
    pub theta: f64,
    pub cutoff: u32,
    pub error: f64,
    pub model: f64,
}

/// `|zz_series(θ, ℒ₀) - zz_closed_form(θ)|` on a grid.
pub fn truncation_transition(thetas: &[f64], cutoffs: &[u32]) -> Vec<TruncationRow> {
    let mut rows = Vec::with_capacity(thetas.len() * cutoffs.len());
    for &theta in thetas {
        let exact = analytic::zz_closed_form(theta);
        for &cutoff in cutoffs {
            rows.push(TruncationRow {
                theta,
                cutoff,
                error: (analytic::zz_series(theta, cutoff) - exact).abs(),
                model: analytic::truncation_error_model(theta, cutoff),
            });
        }
    }
    rows
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayClass {
    Power,
    Exponential,
    Zero,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub theta: f64,
    /// Slope of `ln error` against `ln ℒ₀`.
    pub power_slope: f64,
    pub power_r2: f64,
    /// Slope of `ln error` against `ℒ₀`.
    pub exp_rate: f64,
    pub exp_r2: f64,
    pub class: DecayClass,
}

/// Classifies the error decay of one θ by whichever log fit is straighter.
pub fn fit_decay(theta: f64, rows: &[TruncationRow]) -> DecayFit {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.theta == theta && r.error > 0.0)
        .map(|r| (r.cutoff as f64, r.error.ln()))
        .collect();
    if pts.len() < 3 {
        return DecayFit {
            theta,
            power_slope: 0.0,
            power_r2: 1.0,
            exp_rate: 0.0,
            exp_r2: 1.0,
            class: DecayClass::Zero,
        };
    }
    let l: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ll: Vec<f64> = l.iter().map(|v| v.ln()).collect();
    let e: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let (power_r2, exp_r2) = (r_squared(&ll, &e), r_squared(&l, &e));
    DecayFit {
        theta,
        power_slope: linear_fit(&ll, &e).0,
        power_r2,
        exp_rate: linear_fit(&l, &e).0,
        exp_r2,
        class: if exp_r2 > power_r2 {
            DecayClass::Exponential
        } else {
            DecayClass::Power
        },
    }
}

pub const CUSP_STEP: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CuspRow {
    #[serde(rename = "L")]
    pub l: usize,
    pub theta: f64,
    pub value: f64,
    pub second_derivative: f64,
}

/// Early-eval values and centred second differences on
/// `center ± half_width` with step `h`, for each size.
pub fn cusp_scan(ls: &[usize], center: f64, half_width: f64, h: f64, exec: Exec) -> Result<Vec<CuspRow>> {
    if h <= 0.0 || half_width < h {
        return Err(invalid("cusp window must contain at least one step"));
    }
    let n = (half_width / h).round() as i64;
    let mut rows = Vec::new();
    for &l in ls {
        let c = build_whip(2, l)?;
        let (a, b) = pair_indices(&c, &sink_pair(l)?)?;
        let thetas: Vec<f64> = (-n - 1..=n + 1).map(|k| center + k as f64 * h).collect();
        let values = par::map(exec, &thetas, |&t| early_eval_unchecked(&c, a, b, t, None).0);
        for k in 1..thetas.len() - 1 {
            rows.push(CuspRow {
                l,
                theta: thetas[k],
                value: values[k],
                second_derivative: (values[k + 1] - 2.0 * values[k] + values[k - 1]) / (h * h),
            });
        }
    }
    Ok(rows)
}

/// Largest `|f''|` per size, in the order sizes first appear.
pub fn cusp_peaks(rows: &[CuspRow]) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = Vec::new();
    for r in rows {
        let v = r.second_derivative.abs();
        match out.iter_mut().find(|(l, _)| *l == r.l) {
            Some(e) => e.1 = e.1.max(v),
            None => out.push((r.l, v)),
        }
    }
    out
}

/// Host description written into benchmark metadata.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnvInfo {
    pub cpu_model: String,
    pub logical_cores: usize,
    pub parallel_feature: bool,
    pub version: &'static str,
}

pub fn env_info() -> EnvInfo {
    let cpu_model = std::fs::read_to_string("/proc/cpuinfo")
        .ok()
        .and_then(|s| {
            s.lines()
                .find(|l| l.starts_with("model name"))
                .and_then(|l| l.split(':').nth(1))
                .map(|m| m.trim().to_string())
        })
        .unwrap_or_else(|| "unknown".into());
    EnvInfo {
        cpu_model,
        logical_cores: std::thread::available_parallelism().map_or(1, |n| n.get()),
        parallel_feature: cfg!(feature = "parallel"),
        version: env!("CARGO_PKG_VERSION"),
    }
}
