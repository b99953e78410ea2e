//! One PASS/FAIL line per primary acceptance criterion.
//!
//! Each check also has a wall-clock budget; exceeding it fails the check.
//! Checks run one after another so the scaling timings see an idle machine.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use whiplab::analytic::{self, brute, Boundary};
use whiplab::bench::{fit_decay, loglog_slope, scaling_run, truncation_transition, DecayClass};
use whiplab::lattice::{build_cycle, build_whip, diagonal_pair, lower_boundary, pair_indices, sink_pair, CycleStyle};
use whiplab::par::{self, Exec};
use whiplab::pauli::{Pauli, PauliString, PauliSum};
use whiplab::propagation::{early_eval_expectation, early_eval_unchecked, naive_expectation, zz_observable, TruncationPolicy};
use whiplab::statevector::{
    entanglement, order_parameter_finite, run_circuit, symmetry_check, symmetry_operator_sites, z_string, DenseState,
};
use whiplab::vqe::{tfim_vqe, worst_rel_error, x_grid, z2_vqe, Ansatz};
use whiplab::wala::{build_wala, plaquette_scan, WalaVariant};
use whiplab::Result;

const SEED: u64 = 20240;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn random_thetas(n: usize, stream: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    rng.set_stream(stream);
    (0..n).map(|_| rng.gen_range(-PI..PI)).collect()
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

fn ghz() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for d in 1..=3 {
        let c = build_whip(d, 2)?;
        let n = c.num_qubits();
        let st = run_circuit(&c, -PI / (2.0 * d as f64))?;
        let f = st.fidelity(&DenseState::cat(n, 0, (1 << n) - 1));
        worst = worst.max(1.0 - f);
        parts.push(format!("d={d} 1-F={:.1e}", 1.0 - f));
    }
    outcome(worst <= 1e-10, parts.join(", "))
}

fn cross_engine() -> Result<Outcome> {
    let thetas = random_thetas(20, 1);
    let mut worst = 0.0f64;
    for l in 2..=4 {
        let c = build_whip(2, l)?;
        let pair = sink_pair(l)?;
        let (a, b) = pair_indices(&c, &pair)?;
        let obs = zz_observable(a, b)?;
        for &t in &thetas {
            let sv = run_circuit(&c, t)?.expectation(&obs, Exec::default());
            let naive = naive_expectation(&c, &obs, t, &TruncationPolicy::exact())?.0;
            let early = early_eval_expectation(&c, &pair, t)?;
            worst = worst.max((sv - naive).abs()).max((sv - early).abs()).max((naive - early).abs());
        }
    }
    outcome(worst <= 1e-12, format!("max pairwise deviation {worst:.2e} over 60 points"))
}

fn cusp() -> Result<Outcome> {
    let l = 64;
    let c = build_whip(2, l)?;
    let (a, b) = pair_indices(&c, &sink_pair(l)?)?;
    let n = 541;
    let thetas: Vec<f64> = (0..n).map(|i| -0.45 * PI + 0.9 * PI * i as f64 / (n - 1) as f64).collect();
    let values = par::map(Exec::Parallel, &thetas, |&t| early_eval_unchecked(&c, a, b, t, None).0);
    let (mut off, mut near) = ((0.0f64, 0.0), (0.0f64, 0.0));
    for (&t, &v) in thetas.iter().zip(&values) {
        let e = (v - analytic::zz_closed_form(t)).abs();
        let slot = if (t.abs() - FRAC_PI_4).abs() <= 0.02 { &mut near } else { &mut off };
        if e > slot.0 {
            *slot = (e, t);
        }
    }
    outcome(
        off.0 <= 2e-3 && near.0 <= 2e-2,
        format!(
            "L=64, {n} points: off-window max {:.2e} at θ={:.4} (tol 2e-3), window max {:.2e} at θ={:.4} (tol 2e-2)",
            off.0, off.1, near.0, near.1
        ),
    )
}

fn combinatorics() -> Result<Outcome> {
    let mut lgv_bad = 0;
    for l in 1..=5 {
        for w in 1..=5 {
            lgv_bad += usize::from(analytic::lgv_count(l, w).to_f64() as u64 != brute::lgv(l, w));
        }
    }
    let gamma = max_of((1..=40).map(|k| (analytic::cycle_count_layer(k).to_f64() / analytic::cycle_count_gamma(k) - 1.0).abs()));
    let ratio = analytic::asymptotic_cycle_ratio(100);
    outcome(
        lgv_bad == 0 && gamma <= 1e-9 && (ratio - 1.0).abs() <= 0.02,
        format!("lgv mismatches {lgv_bad}/25, Gamma rel. error {gamma:.1e}, asymptotic ratio {ratio:.5}"),
    )
}

/// Least-squares ξ⁻¹ from `ln C = -r/ξ + c`, where the pair at offset d is
/// `r = 2d` steps apart.
fn fit_inverse_xi(values: &[f64]) -> f64 {
    let d: Vec<f64> = (1..=values.len()).map(|k| 2.0 * k as f64).collect();
    let ln: Vec<f64> = values.iter().map(|v| v.abs().ln()).collect();
    -whiplab::bench::linear_fit(&d, &ln).0
}

fn correlation() -> Result<Outcome> {
    let l = 40;
    let c = build_whip(2, l)?;
    let pairs: Vec<(usize, usize)> = (1..=5)
        .map(|d| diagonal_pair(l, d).and_then(|p| pair_indices(&c, &p)))
        .collect::<Result<_>>()?;
    let thetas: Vec<f64> = (0..=90)
        .map(|i| -0.45 * PI + 0.9 * PI * i as f64 / 90.0)
        .filter(|t| (t.abs() - FRAC_PI_4).abs() >= 0.05)
        .collect();
    let jobs: Vec<(f64, usize)> = thetas.iter().flat_map(|&t| (1..=5).map(move |d| (t, d))).collect();
    let errs = par::map(Exec::Parallel, &jobs, |&(t, d)| {
        let (a, b) = pairs[d - 1];
        let v = early_eval_unchecked(&c, a, b, t, None).0;
        ((v - analytic::correlation_closed_form(t, d as u32)).abs(), t, d)
    });
    let worst = errs.iter().copied().fold((0.0, 0.0, 0), |m, e| if e.0 > m.0 { e } else { m });

    let phis = [0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1];
    let closed: Vec<f64> = phis
        .iter()
        .map(|&p| {
            let vals: Vec<f64> = (1..=5).map(|d| analytic::correlation_closed_form(FRAC_PI_4 + p, d)).collect();
            fit_inverse_xi(&vals) / p
        })
        .collect();
    let nu_ok = closed.iter().all(|r| (1.9..=2.1).contains(r));

    let lf = 128;
    let cf = build_whip(2, lf)?;
    let fpairs: Vec<(usize, usize)> = (1..=5)
        .map(|d| diagonal_pair(lf, d).and_then(|p| pair_indices(&cf, &p)))
        .collect::<Result<_>>()?;
    let fjobs: Vec<(f64, usize)> = [0.02, 0.05, 0.1].iter().flat_map(|&p| (1..=5).map(move |d| (p, d))).collect();
    let fvals = par::map(Exec::Parallel, &fjobs, |&(p, d)| {
        let (a, b) = fpairs[d - 1];
        early_eval_unchecked(&cf, a, b, FRAC_PI_4 + p, None).0
    });
    let finite: Vec<String> = fvals
        .chunks(5)
        .zip([0.02, 0.05, 0.1])
        .map(|(v, p)| format!("{:.2}", fit_inverse_xi(v) / p))
        .collect();

    let (lo, hi) = closed.iter().fold((f64::MAX, f64::MIN), |(a, b), &r| (a.min(r), b.max(r)));
    outcome(
        worst.0 <= 1e-3 && nu_ok,
        format!(
            "L=40 max error {:.2e} at θ={:.4}, d={} (tol 1e-3); closed-form ξ⁻¹/|φ| in [{lo:.3}, {hi:.3}]; \
             L=128 data fit at φ=0.02/0.05/0.1: {}",
            worst.0,
            worst.1,
            worst.2,
            finite.join("/")
        ),
    )
}

fn order_parameter() -> Result<Outcome> {
    let grid: Vec<f64> = (0..1000).map(|i| -PI + 2.0 * PI * i as f64 / 1000.0).collect();
    let decomp = max_of(
        grid.iter()
            .filter(|t| t.cos().abs() > 1e-9)
            .map(|&t| (analytic::order_parameter_closed_form(t) - analytic::order_parameter_decomposition(t)).abs()),
    );
    let sv_grid: Vec<f64> = (0..=64).map(|i| -PI + 2.0 * PI * i as f64 / 64.0).collect();
    let dev = sv_grid
        .iter()
        .map(|&t| Ok((order_parameter_finite(4, t)? - analytic::order_parameter_closed_form(t)).abs()))
        .collect::<Result<Vec<f64>>>()?;
    let everywhere = max_of(dev);
    let special = [0.0, FRAC_PI_2, -FRAC_PI_2]
        .iter()
        .map(|&t| Ok((order_parameter_finite(4, t)? - analytic::order_parameter_closed_form(t)).abs()))
        .collect::<Result<Vec<f64>>>()?;
    let special = max_of(special);
    outcome(
        decomp <= 1e-12 && everywhere < 0.15 && special < 0.02,
        format!("identity {decomp:.1e}; L=4 max deviation {everywhere:.4} (tol 0.15), at 0,±π/2 {special:.2e} (tol 0.02)"),
    )
}

fn entanglement_phases() -> Result<Outcome> {
    let c = build_whip(2, 4)?;
    let half: Vec<usize> = (0..8).collect();
    let gap = |t: f64| -> Result<f64> { Ok(entanglement(&run_circuit(&c, t)?, &half)?.lowest_gap()) };
    let (g_broken, g_sym) = (gap(0.35 * PI)?, gap(0.15 * PI)?);
    let mut obc = 0.0f64;
    let chain = build_whip(1, 8)?;
    for t in random_thetas(5, 2) {
        let st = run_circuit(&chain, t)?;
        let (_, want) = analytic::entropy_1d_obc(t);
        let mut want = want.to_vec();
        want.sort_by(|a, b| b.total_cmp(a));
        for cut in 1..8 {
            let sp = entanglement(&st, &(0..cut).collect::<Vec<_>>())?;
            let err = max_of(sp.lambdas.iter().enumerate().map(|(k, &l)| (l - want.get(k).copied().unwrap_or(0.0)).abs()));
            obc = obc.max(err);
        }
    }
    outcome(
        g_broken < 1e-8 && g_sym > 1e-3 && obc <= 1e-10,
        format!(
            "L=4 top-half cut gap {g_broken:.3e} at 0.35π (tol 1e-8), {g_sym:.3e} at 0.15π (need >1e-3); \
             1-d OBC spectrum error {obc:.1e}"
        ),
    )
}

fn symmetry() -> Result<Outcome> {
    let worst = max_of(
        random_thetas(10, 3)
            .into_iter()
            .map(|t| symmetry_check(3, t).map(|f| 1.0 - f))
            .collect::<Result<Vec<f64>>>()?,
    );
    let t = z_string(&symmetry_operator_sites(3));
    let anti = lower_boundary(3)
        .into_iter()
        .all(|q| !t.commutes_with(&PauliString::single(q, Pauli::X)));
    outcome(worst <= 1e-10 && anti, format!("1-F max {worst:.1e}; anticommutes with every boundary X: {anti}"))
}

fn wala() -> Result<Outcome> {
    let w = run_circuit(&build_wala(WalaVariant::WithPt), FRAC_PI_4)?;
    let wo = run_circuit(&build_wala(WalaVariant::WithoutPt), FRAC_PI_4)?;
    let toric = 1.0 - w.fidelity(&wo);
    let grid: Vec<f64> = (0..65).map(|i| -PI / 2.0 + PI * i as f64 / 64.0).collect();
    let bottom = max_of(
        plaquette_scan(WalaVariant::WithoutPt, &grid, Exec::default())?
            .iter()
            .map(|r| (r.plaquettes[5] - (2.0 * r.theta).sin().powi(5)).abs()),
    );
    let mut vertex = 0.0f64;
    for v in [WalaVariant::WithPt, WalaVariant::WithoutPt] {
        for r in plaquette_scan(v, &grid, Exec::default())? {
            vertex = r.vertices.iter().map(|z| (z - 1.0).abs()).fold(vertex, f64::max);
        }
    }
    outcome(
        toric <= 1e-10 && bottom <= 1e-12 && vertex <= 1e-10,
        format!("1-F {toric:.1e}; bottom plaquette error {bottom:.1e}; vertex deviation {vertex:.1e}"),
    )
}

fn vqe() -> Result<Outcome> {
    let xs = x_grid(21);
    let t_wo = worst_rel_error(&tfim_vqe(4, Ansatz::WithoutPt, &xs, Exec::Parallel)?);
    let t_w = worst_rel_error(&tfim_vqe(4, Ansatz::WithPt, &xs, Exec::Parallel)?);
    let z_wo = worst_rel_error(&z2_vqe(Ansatz::WithoutPt, &xs, Exec::Parallel)?);
    let z_w = worst_rel_error(&z2_vqe(Ansatz::WithPt, &xs, Exec::Parallel)?);
    let ok = (t_wo - 0.15).abs() <= 0.02
        && (t_w - 0.10).abs() <= 0.02
        && (z_wo - 0.067).abs() <= 0.01
        && (z_w - 0.041).abs() <= 0.01;
    outcome(
        ok,
        format!("TFIM 4×4 without/with {t_wo:.4}/{t_w:.4} (0.15/0.10 ± 0.02); Z₂ cube {z_wo:.4}/{z_w:.4} (0.067/0.041 ± 0.01)"),
    )
}

fn scaling() -> Result<Outcome> {
    let r = scaling_run(&[16, 32, 64, 128], FRAC_PI_4, 5)?;
    let cut: Vec<u32> = (3..=8).map(|k| 1 << k).collect();
    let rows = truncation_transition(&[FRAC_PI_4, -FRAC_PI_4], &cut);
    let slopes: Vec<f64> = [FRAC_PI_4, -FRAC_PI_4].iter().map(|&t| fit_decay(t, &rows).power_slope).collect();
    let power_ok = slopes.iter().all(|s| (s + 0.5).abs() <= 0.15);
    let small = truncation_transition(&[0.15], &[1, 2, 3, 4, 5, 6]);
    let exp = fit_decay(0.15, &small);
    let ok = (r.strings_slope - 2.0).abs() <= 0.2
        && (3.3..=4.6).contains(&r.time_slope)
        && power_ok
        && exp.class == DecayClass::Exponential;
    outcome(
        ok,
        format!(
            "strings slope {:.3}, time slope {:.3}; truncation slope at ±π/4 {:.3}/{:.3}; θ=0.15 {:?} (rate {:.3})",
            r.strings_slope, r.time_slope, slopes[0], slopes[1], exp.class, exp.exp_rate
        ),
    )
}

fn one_d() -> Result<Outcome> {
    let thetas = random_thetas(10, 4);
    let mut obc = 0.0f64;
    for l in [4, 8] {
        let c = build_whip(1, l)?;
        let obs = PauliSum::from_terms(c.edges().into_iter().map(|(a, b)| (PauliString::z_pair(a, b), 1.0)));
        for &t in &thetas {
            let naive = naive_expectation(&c, &obs, t, &TruncationPolicy::exact())?.0;
            let sv = run_circuit(&c, t)?.expectation(&obs, Exec::default());
            let per_edge = -t.sin();
            obc = obc.max((naive / (l - 1) as f64 - per_edge).abs()).max((sv / (l - 1) as f64 - per_edge).abs());
        }
    }
    let ring = |n: usize, t: f64| -> Result<f64> {
        let c = build_cycle(n, CycleStyle::Bipolar)?;
        let obs = PauliSum::from_terms(c.edges().into_iter().map(|(a, b)| (PauliString::z_pair(a, b), 1.0)));
        Ok(run_circuit(&c, t)?.expectation(&obs, Exec::default()))
    };
    let pbc = max_of(
        thetas
            .iter()
            .map(|&t| Ok((ring(8, t)? - analytic::energy_1d(t, 8, Boundary::Periodic, 1.0)).abs()))
            .collect::<Result<Vec<f64>>>()?,
    );
    let ls: Vec<usize> = (8..=14).collect();
    let mut per_edge = Vec::new();
    let mut cycle_share = Vec::new();
    let mut sv_match = 0.0f64;
    for &l in &ls {
        let e = ring(l, FRAC_PI_4)?;
        sv_match = sv_match.max((e - analytic::energy_1d(FRAC_PI_4, l as u32, Boundary::Periodic, 1.0)).abs());
        per_edge.push(e / l as f64);
        cycle_share.push(analytic::energy_1d_cycle_term(FRAC_PI_4, l as u32, 1.0).abs() / l as f64);
    }
    let x: Vec<f64> = ls.iter().map(|&l| l as f64).collect();
    let share_slope = loglog_slope(&x, &cycle_share);
    let toward = per_edge
        .iter()
        .zip(&ls)
        .all(|(e, &l)| (e + 1.0).abs() <= 2.0 / l as f64 + 1e-12);
    let ok = obc <= 1e-12 && pbc <= 1e-12 && sv_match <= 1e-12 && (share_slope + 1.0).abs() <= 0.05 && toward;
    outcome(
        ok,
        format!(
            "OBC per-edge error {obc:.1e}; PBC L=8 error {pbc:.1e}; π/4 L=8..14 per-edge {:.4}..{:.4} (within 2/L of -1), \
             |cycle term|/L slope {share_slope:.3}",
            per_edge[0],
            per_edge[per_edge.len() - 1]
        ),
    )
}

type Criterion = (&'static str, u64, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("scaling", 600, scaling),
        ("ghz_exactness", 1, ghz),
        ("cross_engine_equality", 30, cross_engine),
        ("cusp_closed_form", 300, cusp),
        ("combinatorics", 10, combinatorics),
        ("correlation_and_nu", 300, correlation),
        ("order_parameter", 60, order_parameter),
        ("entanglement_phases", 60, entanglement_phases),
        ("symmetry", 10, symmetry),
        ("wala", 60, wala),
        ("vqe_tables", 1800, vqe),
        ("one_d_null_result", 60, one_d),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, budget, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let in_budget = elapsed <= Duration::from_secs(budget);
        let (passed, detail) = match result {
            Ok(o) => (o.passed && in_budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!passed);
        let tag = if passed { "PASS" } else { "FAIL" };
        let over = if in_budget { "" } else { ", over budget" };
        println!("[{tag}] {name}: {detail} ({:.2}s of {budget}s{over})", elapsed.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
