//! Invariant suites run by `whiplab verify`.

use std::f64::consts::{FRAC_PI_4, PI};

use serde::Serialize;

use crate::analytic::{self, brute};
use crate::error::{invalid, Result};
use crate::lattice::{build_cycle, build_whip, lower_boundary, pair_indices, sink_pair, CycleStyle};
use crate::par::Exec;
use crate::pauli::{Pauli, PauliString};
use crate::propagation::{early_eval_expectation, naive_expectation, zz_observable, TruncationPolicy};
use crate::statevector::{
    phase_point_checks, run_circuit, symmetry_check, symmetry_operator_sites, z_string,
};
use crate::wala::{self, bottom_rotations_commute, build_wala, plaquette_scan, WalaVariant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Engines,
    Analytic,
    Symmetry,
    Phasepoints,
    Wala,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Engines, Suite::Analytic, Suite::Symmetry, Suite::Phasepoints, Suite::Wala];

    pub fn parse(s: &str) -> Result<Suite> {
        Ok(match s {
            "engines" => Suite::Engines,
            "analytic" => Suite::Analytic,
            "symmetry" => Suite::Symmetry,
            "phasepoints" => Suite::Phasepoints,
            "wala" => Suite::Wala,
            _ => return Err(invalid(format!("unknown suite {s:?}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn bound(name: &str, err: f64, tol: f64) -> Check {
        Check {
            name: name.into(),
            passed: err <= tol,
            detail: format!("max error {err:.3e} (tol {tol:.0e})"),
        }
    }

    fn flag(name: &str, ok: bool, detail: String) -> Check {
        Check {
            name: name.into(),
            passed: ok,
            detail,
        }
    }
}

/// `count` angles spread over `(-π, π]` by the golden-ratio sequence.
pub fn spread_angles(count: usize) -> Vec<f64> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    (1..=count).map(|k| PI - 2.0 * PI * (k as f64 * g).fract()).collect()
}

pub fn run(suite: Suite) -> Result<Vec<Check>> {
    match suite {
        Suite::Engines => engines(),
        Suite::Analytic => Ok(analytic_suite()),
        Suite::Symmetry => symmetry(),
        Suite::Phasepoints => phasepoints(),
        Suite::Wala => wala_suite(),
    }
}

fn engines() -> Result<Vec<Check>> {
    let thetas = spread_angles(20);
    let mut out = Vec::new();
    let (mut naive_err, mut sv_err, mut period_err) = (0.0f64, 0.0f64, 0.0f64);
    for l in 2..=4 {
        let c = build_whip(2, l)?;
        let pair = sink_pair(l)?;
        let (a, b) = pair_indices(&c, &pair)?;
        let obs = zz_observable(a, b)?;
        for &t in &thetas {
            let early = early_eval_expectation(&c, &pair, t)?;
            let naive = naive_expectation(&c, &obs, t, &TruncationPolicy::exact())?.0;
            let sv = run_circuit(&c, t)?.expectation(&obs, Exec::default());
            naive_err = naive_err.max((early - naive).abs());
            sv_err = sv_err.max((naive - sv).abs());
            period_err = period_err.max((early - early_eval_expectation(&c, &pair, t + 2.0 * PI)?).abs());
        }
    }
    out.push(Check::bound("early = naive (L = 2..4)", naive_err, 1e-12));
    out.push(Check::bound("naive = statevector (L = 2..4)", sv_err, 1e-12));
    out.push(Check::bound("2π periodicity", period_err, 1e-12));
    let mut cyc = 0.0f64;
    for n in [4, 7, 8, 12] {
        let c = build_cycle(n, CycleStyle::UniformHalf)?;
        let s = crate::lattice::cycle_sink(n);
        let obs = zz_observable(s - 1, s)?;
        for &t in &thetas[..5] {
            let v = naive_expectation(&c, &obs, t, &TruncationPolicy::exact())?.0;
            cyc = cyc.max((v - analytic::cycle_expectation(t, n as u32)).abs());
        }
    }
    out.push(Check::bound("cycle closed form", cyc, 1e-12));
    let mut chain = 0.0f64;
    let c = build_whip(1, 8)?;
    let obs = crate::pauli::PauliSum::from_terms(c.edges().into_iter().map(|(a, b)| (PauliString::z_pair(a, b), 1.0)));
    for &t in &thetas[..5] {
        let v = naive_expectation(&c, &obs, t, &TruncationPolicy::exact())?.0;
        chain = chain.max((v + 7.0 * t.sin()).abs());
    }
    out.push(Check::bound("1-d chain energy -(L-1)sinθ", chain, 1e-12));
    Ok(out)
}

fn analytic_suite() -> Vec<Check> {
    let mut out = Vec::new();
    let mut lgv_ok = true;
    for l in 1..=5 {
        for w in 1..=5 {
            lgv_ok &= analytic::lgv_count(l, w).to_f64() as u64 == brute::lgv(l, w);
        }
    }
    out.push(Check::flag("lgv_count = enumeration (l, w ≤ 5)", lgv_ok, "25 cases".into()));
    let gamma = (1..=40)
        .map(|k| (analytic::cycle_count_layer(k).to_f64() / analytic::cycle_count_gamma(k) - 1.0).abs())
        .fold(0.0, f64::max);
    out.push(Check::bound("layer counts = Gamma form (ℒ ≤ 40)", gamma, 1e-9));
    let ratio = (analytic::asymptotic_cycle_ratio(100) - 1.0).abs();
    out.push(Check::bound("asymptotic count ratio at l = w = 100", ratio, 0.02));
    let series = [0.1, 0.3, -0.5, 1.2, 2.0]
        .iter()
        .map(|&t| (analytic::zz_series(t, 400) - analytic::zz_closed_form(t)).abs())
        .fold(0.0, f64::max);
    out.push(Check::bound("series → closed form off criticality", series, 1e-12));
    let grid: Vec<f64> = (0..1000).map(|i| -PI + 2.0 * PI * i as f64 / 1000.0).collect();
    let decomp = grid
        .iter()
        .filter(|t| t.cos().abs() > 1e-9)
        .map(|&t| (analytic::order_parameter_closed_form(t) - analytic::order_parameter_decomposition(t)).abs())
        .fold(0.0, f64::max);
    out.push(Check::bound("order parameter decomposition", decomp, 1e-12));
    let corr = grid
        .iter()
        .map(|&t| {
            let c1 = analytic::correlation_closed_form(t, 1);
            (c1 - analytic::zz_closed_form(t).powi(2))
                .abs()
                .max((analytic::correlation_closed_form(t, 3) - c1.powi(3)).abs())
        })
        .fold(0.0, f64::max);
    out.push(Check::bound("correlation power identity", corr, 1e-12));
    out
}

fn symmetry() -> Result<Vec<Check>> {
    let worst = spread_angles(10)
        .into_iter()
        .map(|t| symmetry_check(3, t).map(|f| 1.0 - f))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let t = z_string(&symmetry_operator_sites(3));
    let anti = lower_boundary(3)
        .into_iter()
        .all(|q| !t.commutes_with(&PauliString::single(q, Pauli::X)));
    Ok(vec![
        Check::bound("T̂ maps θ to θ+π (L = 3)", worst, 1e-10),
        Check::flag("{T̂, ∂X} = 0", anti, "every lower-boundary X anticommutes".into()),
    ])
}

fn phasepoints() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for l in [2, 3] {
        let r = phase_point_checks(l)?;
        out.push(Check::flag(
            &format!("special points (L = {l})"),
            r.passed(1e-10),
            format!(
                "entropy {:.1e}, GHZ overlaps {:.12}/{:.12}, Clifford dev {:.1e} over {} strings",
                r.product_max_entropy,
                r.ghz_overlap_plus,
                r.ghz_overlap_minus,
                r.clifford_max_deviation,
                r.clifford_strings_checked
            ),
        ));
    }
    Ok(out)
}

fn wala_suite() -> Result<Vec<Check>> {
    let w = run_circuit(&build_wala(WalaVariant::WithPt), FRAC_PI_4)?;
    let wo = run_circuit(&build_wala(WalaVariant::WithoutPt), FRAC_PI_4)?;
    let grid: Vec<f64> = (0..65).map(|i| -PI / 2.0 + PI * i as f64 / 64.0).collect();
    let rows = plaquette_scan(WalaVariant::WithoutPt, &grid, Exec::default())?;
    let bottom = rows
        .iter()
        .map(|r| (r.plaquettes[5] - analytic::wala_plaquette_no_pt(r.theta, 1)).abs())
        .fold(0.0, f64::max);
    let mut vertex = 0.0f64;
    for v in [WalaVariant::WithPt, WalaVariant::WithoutPt] {
        for r in plaquette_scan(v, &grid, Exec::default())? {
            vertex = r.vertices.iter().map(|z| (z - 1.0).abs()).fold(vertex, f64::max);
        }
    }
    Ok(vec![
        Check::bound("toric-code equality at π/4", 1.0 - w.fidelity(&wo), 1e-10),
        Check::bound("bottom plaquette = sin⁵2θ", bottom, 1e-12),
        Check::bound("vertex operators stay 1", vertex, 1e-10),
        Check::flag(
            "half-angle bottom rotations commute",
            bottom_rotations_commute(),
            format!("shared target link {}", wala::faces()[4].target),
        ),
    ])
}
