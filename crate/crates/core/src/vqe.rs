//! One-parameter variational runs against exact ground energies.
//!
//! The transverse-field Ising model `H(x) = -(1-x)ΣX_i - xΣZ_iZ_j` on an open
//! L×L lattice uses the whip circuit (with the transition) or the comb-tree
//! circuit (without). The Z₂ gauge model on one cube uses the two WALA
//! variants. Exact energies come from a matrix-free Lanczos solver.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::lattice::{build_whip, build_whip_no_pt, WhipCircuit};
use crate::par::{self, Exec};
use crate::pauli::{Pauli, PauliString, PauliSum};
use crate::statevector::run_circuit;
use crate::wala::{self, build_wala, WalaVariant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ansatz {
    WithPt,
    WithoutPt,
}

impl Ansatz {
    pub fn name(self) -> &'static str {
        match self {
            Ansatz::WithPt => "with_pt",
            Ansatz::WithoutPt => "without_pt",
        }
    }

    fn wala(self) -> WalaVariant {
        match self {
            Ansatz::WithPt => WalaVariant::WithPt,
            Ansatz::WithoutPt => WalaVariant::WithoutPt,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VqeResult {
    pub x: f64,
    pub theta_star: f64,
    pub e_vqe: f64,
    pub e_exact: f64,
    pub rel_error: f64,
    pub ansatz: Ansatz,
}

/// `n` uniform points on `[0, 1]`, endpoints included.
pub fn x_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

pub const DEFAULT_X_POINTS: usize = 21;

pub fn worst_rel_error(results: &[VqeResult]) -> f64 {
    results.iter().map(|r| r.rel_error).fold(0.0, f64::max)
}

const LANCZOS_MAX_ITER: usize = 400;
const LANCZOS_TOL: f64 = 1e-12;

/// Lowest eigenvalue of a real symmetric operator given only its action,
/// by plain Lanczos (no reorthogonalization).
pub fn lanczos_ground<F>(dim: usize, apply: F) -> Result<f64>
where
    F: Fn(&[f64], &mut [f64]),
{
    if dim == 0 {
        return Err(invalid("empty operator"));
    }
    // Mostly uniform, with a deterministic ripple to avoid symmetric traps.
    let mut v: Vec<f64> = (0..dim).map(|i| 1.0 + 0.01 * ((i * 7919) % 13) as f64).collect();
    let n0 = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|a| *a /= n0);
    let mut v_prev = vec![0.0; dim];
    let mut w = vec![0.0; dim];
    let (mut alphas, mut betas) = (Vec::new(), Vec::new());
    let mut beta_prev = 0.0;
    let mut last = f64::INFINITY;
    for k in 0..LANCZOS_MAX_ITER.min(dim) {
        apply(&v, &mut w);
        let alpha = dot(&v, &w);
        for i in 0..dim {
            w[i] -= alpha * v[i] + beta_prev * v_prev[i];
        }
        let beta = dot(&w, &w).sqrt();
        alphas.push(alpha);
        let exhausted = beta < 1e-12 || k + 1 == dim;
        if k % 5 == 4 || exhausted {
            let e = tridiagonal_min(&alphas, &betas);
            if exhausted || (e - last).abs() < LANCZOS_TOL * e.abs().max(1.0) {
                return Ok(e);
            }
            last = e;
        }
        betas.push(beta);
        std::mem::swap(&mut v_prev, &mut v);
        for i in 0..dim {
            v[i] = w[i] / beta;
        }
        beta_prev = beta;
    }
    Err(Error::Eigensolver(format!(
        "Lanczos did not converge in {LANCZOS_MAX_ITER} steps"
    )))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn tridiagonal_min(alphas: &[f64], betas: &[f64]) -> f64 {
    let n = alphas.len();
    let t = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j {
            betas[i]
        } else if j + 1 == i {
            betas[j]
        } else {
            0.0
        }
    });
    SymmetricEigen::new(t).eigenvalues.min()
}

/// Action of a sum of `X^f Z^z` terms (disjoint masks) on a real vector.
fn apply_real_sum(terms: &[(usize, usize, f64)], v: &[f64], out: &mut [f64]) {
    for (b, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for &(flip, zmask, c) in terms {
            let sign = if (b & zmask).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            acc += c * sign * v[b ^ flip];
        }
        *o = acc;
    }
}

/// Exact ground energy of a Hamiltonian built from X and Z letters.
pub fn ground_energy(h: &PauliSum, n: usize) -> Result<f64> {
    let mut terms = Vec::with_capacity(h.len());
    for (p, c) in h.iter() {
        let (mut flip, mut zmask) = (0usize, 0usize);
        for &(q, l) in p.letters() {
            match l {
                Pauli::X => flip |= 1 << q,
                Pauli::Z => zmask |= 1 << q,
                Pauli::Y => return Err(invalid("ground_energy takes X/Z Hamiltonians only")),
            }
        }
        terms.push((flip, zmask, c));
    }
    lanczos_ground(1 << n, |v, out| apply_real_sum(&terms, v, out))
}

pub fn tfim_hamiltonian(l: usize, x: f64) -> Result<PauliSum> {
    let c = build_whip(2, l)?;
    let mut h = PauliSum::new();
    for q in 0..c.num_qubits() {
        h.add(PauliString::single(q, Pauli::X), -(1.0 - x));
    }
    for (a, b) in c.edges() {
        h.add(PauliString::z_pair(a, b), -x);
    }
    Ok(h)
}

/// Minimizes a 2π-periodic function: 64-point scan of (-π, π], then golden
/// section inside the brackets of the 8 best scan points.
pub fn minimize_periodic<F: Fn(f64) -> f64>(f: F) -> Result<(f64, f64)> {
    const COARSE: usize = 64;
    const STARTS: usize = 8;
    let h = 2.0 * PI / COARSE as f64;
    let grid: Vec<(f64, f64)> = (1..=COARSE)
        .map(|k| {
            let t = -PI + h * k as f64;
            (t, f(t))
        })
        .collect();
    minimize_from_scan(&f, &grid, h, STARTS)
}

fn minimize_from_scan<F: Fn(f64) -> f64>(
    f: &F,
    grid: &[(f64, f64)],
    h: f64,
    starts: usize,
) -> Result<(f64, f64)> {
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| grid[a].1.total_cmp(&grid[b].1));
    let mut best = grid[order[0]];
    for &k in order.iter().take(starts) {
        let (t, v) = golden_section(f, grid[k].0 - h, grid[k].0 + h, 1e-8);
        if v < best.1 {
            best = (t, v);
        }
    }
    if !best.1.is_finite() {
        return Err(Error::Optimizer("objective is not finite".into()));
    }
    Ok((wrap_angle(best.0), best.1))
}

fn wrap_angle(t: f64) -> f64 {
    let w = (t + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

fn golden_section<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `θ ↦ (a, b, k)` with `E(x, θ) = -(1-x)·a - x·b - k`.
type Landscape<'a> = dyn Fn(f64) -> Result<(f64, f64, f64)> + Sync + 'a;

fn run_vqe(
    landscape: &Landscape,
    exact: &(dyn Fn(f64) -> Result<f64> + Sync),
    ansatz: Ansatz,
    xs: &[f64],
    exec: Exec,
) -> Result<Vec<VqeResult>> {
    if xs.is_empty() {
        return Err(invalid("x grid is empty"));
    }
    if xs.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(invalid("x must lie in [0, 1]"));
    }
    const COARSE: usize = 64;
    let h = 2.0 * PI / COARSE as f64;
    let thetas: Vec<f64> = (1..=COARSE).map(|k| -PI + h * k as f64).collect();
    let coarse: Vec<(f64, f64, f64)> = par::map(exec, &thetas, |&t| landscape(t))
        .into_iter()
        .collect::<Result<_>>()?;
    par::map(exec, xs, |&x| {
        let energy = |abk: (f64, f64, f64)| -(1.0 - x) * abk.0 - x * abk.1 - abk.2;
        let grid: Vec<(f64, f64)> = thetas.iter().zip(&coarse).map(|(&t, &abk)| (t, energy(abk))).collect();
        let f = |t: f64| landscape(t).map(energy).unwrap_or(f64::INFINITY);
        let (theta_star, e_vqe) = minimize_from_scan(&f, &grid, h, 8)?;
        let e_exact = exact(x)?;
        Ok(VqeResult {
            x,
            theta_star,
            e_vqe,
            e_exact,
            rel_error: ((e_vqe - e_exact) / e_exact).abs(),
            ansatz,
        })
    })
    .into_iter()
    .collect()
}

fn tfim_circuit(l: usize, ansatz: Ansatz) -> Result<WhipCircuit> {
    match ansatz {
        Ansatz::WithPt => build_whip(2, l),
        Ansatz::WithoutPt => build_whip_no_pt(l),
    }
}

/// TFIM on an open L×L lattice.
pub fn tfim_vqe(l: usize, ansatz: Ansatz, xs: &[f64], exec: Exec) -> Result<Vec<VqeResult>> {
    let c = tfim_circuit(l, ansatz)?;
    let xsum = PauliSum::from_terms((0..c.num_qubits()).map(|q| (PauliString::single(q, Pauli::X), 1.0)));
    let lattice = build_whip(2, l)?;
    let zzsum = PauliSum::from_terms(lattice.edges().into_iter().map(|(a, b)| (PauliString::z_pair(a, b), 1.0)));
    let landscape = |t: f64| -> Result<(f64, f64, f64)> {
        let st = run_circuit(&c, t)?;
        Ok((st.expectation(&xsum, Exec::Sequential), st.expectation(&zzsum, Exec::Sequential), 0.0))
    };
    let n = c.num_qubits();
    let exact = |x: f64| ground_energy(&tfim_hamiltonian(l, x)?, n);
    run_vqe(&landscape, &exact, ansatz, xs, exec)
}

/// Z₂ gauge model on one cube, measured in the gauge-invariant sector.
///
/// Both ansätze keep every `Z⁺_v` at 1, so energies drop the constant
/// vertex term: `E = -(1-x)Σ⟨X□⟩ - xΣ⟨Z_l⟩`.
pub fn z2_vqe(ansatz: Ansatz, xs: &[f64], exec: Exec) -> Result<Vec<VqeResult>> {
    let c = build_wala(ansatz.wala());
    let landscape = |t: f64| -> Result<(f64, f64, f64)> {
        let row = wala::plaquette_point(&c, t)?;
        Ok((row.plaquettes.iter().sum(), row.link_z_sum, 0.0))
    };
    run_vqe(&landscape, &z2_sector_ground, ansatz, xs, exec)
}

/// Vertex weight that pushes every gauge-violating state above the sector
/// spectrum: any violation flips at least two vertices, costing `4λ`, while
/// the remaining terms span at most `2·(6 + 12)`.
const GAUGE_PENALTY: f64 = 10.0;

/// Ground energy of `-(1-x)ΣX□ - xΣZ_l` restricted to `Z⁺_v = 1`.
pub fn z2_sector_ground(x: f64) -> Result<f64> {
    let mut h = PauliSum::new();
    for (p, c) in wala::z2_hamiltonian(x).iter() {
        let vertex = p.letters().len() == 3;
        h.add(p.clone(), if vertex { c * GAUGE_PENALTY } else { c });
    }
    Ok(ground_energy(&h, wala::NUM_LINKS)? + GAUGE_PENALTY * wala::NUM_VERTICES as f64)
}
