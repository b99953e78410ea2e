//! Dense statevector engine: the exact reference for every other engine.
//!
//! Qubit `q` is bit `q` of the basis index (bit 0 least significant), and
//! qubit numbers follow the owning circuit's row-major site order.

use std::io::{self, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::lattice::{self, build_whip, Circuit};
use crate::par::{self, Exec};
use crate::pauli::{InitialState, Pauli, PauliString, PauliSum};

pub const DEFAULT_QUBIT_CAP: usize = 22;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Bit masks of a Pauli string: `flip` has X and Y, `sign` has Y and Z.
#[derive(Clone, Copy, Debug)]
struct Masks {
    flip: usize,
    sign: usize,
    /// `i^{#Y}` times the string's own phase.
    phase: Complex64,
}

impl Masks {
    fn of(p: &PauliString) -> Masks {
        let (mut flip, mut sign, mut ny) = (0usize, 0usize, 0u8);
        for &(q, l) in p.letters() {
            match l {
                Pauli::X => flip |= 1 << q,
                Pauli::Y => {
                    flip |= 1 << q;
                    sign |= 1 << q;
                    ny += 1;
                }
                Pauli::Z => sign |= 1 << q,
            }
        }
        Masks {
            flip,
            sign,
            phase: i_pow(ny + p.phase().power()),
        }
    }

    /// Amplitude of `P|ψ⟩` at basis state `b`.
    #[inline]
    fn apply_at(&self, amps: &[Complex64], b: usize) -> Complex64 {
        let src = b ^ self.flip;
        let odd = (src & self.sign).count_ones() & 1 == 1;
        let v = self.phase * amps[src];
        if odd {
            -v
        } else {
            v
        }
    }
}

fn i_pow(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    pub fn product(n: usize, init: InitialState) -> DenseState {
        let dim = 1usize << n;
        let amps = match init {
            InitialState::Plus => vec![Complex64::new((dim as f64).sqrt().recip(), 0.0); dim],
            InitialState::Zero => {
                let mut v = vec![ZERO; dim];
                v[0] = Complex64::new(1.0, 0.0);
                v
            }
        };
        DenseState { n, amps }
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<DenseState> {
        if !amps.len().is_power_of_two() {
            return Err(invalid("amplitude count must be a power of two"));
        }
        Ok(DenseState {
            n: amps.len().trailing_zeros() as usize,
            amps,
        })
    }

    /// `(|a⟩ + |b⟩)/√2` for two distinct basis states.
    pub fn cat(n: usize, a: usize, b: usize) -> DenseState {
        let mut amps = vec![ZERO; 1 << n];
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amps[a] = h;
        amps[b] = h;
        DenseState { n, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `exp(-i·α/2·G)|ψ⟩`.
    pub fn apply_rotation(&mut self, generator: &PauliString, alpha: f64, exec: Exec) {
        let m = Masks::of(generator);
        let (s, c) = (alpha / 2.0).sin_cos();
        let minus_i_s = Complex64::new(0.0, -s);
        let src = std::mem::take(&mut self.amps);
        let mut out = vec![ZERO; src.len()];
        par::for_each_indexed(exec, &mut out, |b, o| {
            *o = c * src[b] + minus_i_s * m.apply_at(&src, b);
        });
        self.amps = out;
    }

    /// `P|ψ⟩`.
    pub fn apply_string(&self, p: &PauliString) -> DenseState {
        let m = Masks::of(p);
        let amps = (0..self.amps.len()).map(|b| m.apply_at(&self.amps, b)).collect();
        DenseState { n: self.n, amps }
    }

    /// `⟨ψ|P|ψ⟩`.
    pub fn expectation_string(&self, p: &PauliString, exec: Exec) -> Complex64 {
        let m = Masks::of(p);
        let amps = &self.amps;
        let re = par::sum_range(exec, amps.len(), |b| {
            (amps[b].conj() * m.apply_at(amps, b)).re
        });
        let im = par::sum_range(exec, amps.len(), |b| {
            (amps[b].conj() * m.apply_at(amps, b)).im
        });
        Complex64::new(re, im)
    }

    /// `⟨ψ|O|ψ⟩` for a Hermitian Pauli sum.
    pub fn expectation(&self, obs: &PauliSum, exec: Exec) -> f64 {
        obs.iter()
            .map(|(p, c)| {
                let m = Masks::of(p);
                let amps = &self.amps;
                c * par::sum_range(exec, amps.len(), |b| {
                    (amps[b].conj() * m.apply_at(amps, b)).re
                })
            })
            .sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &DenseState) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Phase-insensitive overlap `|⟨self|other⟩|`.
    pub fn fidelity(&self, other: &DenseState) -> f64 {
        self.inner(other).norm()
    }

    /// Flat little-endian dump: `(re, im)` as two f64 per amplitude, basis order.
    pub fn write_le(&self, mut w: impl Write) -> io::Result<()> {
        let mut buf = Vec::with_capacity(self.amps.len() * 16);
        for a in &self.amps {
            buf.extend_from_slice(&a.re.to_le_bytes());
            buf.extend_from_slice(&a.im.to_le_bytes());
        }
        w.write_all(&buf)
    }

    pub fn read_le(bytes: &[u8]) -> Result<DenseState> {
        if !bytes.len().is_multiple_of(16) {
            return Err(invalid("state dump length must be a multiple of 16"));
        }
        let f = |s: &[u8]| f64::from_le_bytes(s.try_into().expect("8 bytes"));
        let amps = bytes
            .chunks_exact(16)
            .map(|c| Complex64::new(f(&c[..8]), f(&c[8..])))
            .collect();
        DenseState::from_amplitudes(amps)
    }
}

/// Runs a circuit from its declared initial product state.
pub fn run_circuit<C: Circuit + ?Sized>(circuit: &C, theta: f64) -> Result<DenseState> {
    run_circuit_with(circuit, theta, Exec::default(), DEFAULT_QUBIT_CAP)
}

pub fn run_circuit_with<C: Circuit + ?Sized>(
    circuit: &C,
    theta: f64,
    exec: Exec,
    cap: usize,
) -> Result<DenseState> {
    let n = circuit.num_qubits();
    if n > cap {
        return Err(Error::QubitCap { qubits: n, cap });
    }
    let mut st = DenseState::product(n, circuit.initial_state());
    for r in circuit.rotations() {
        st.apply_rotation(&r.generator, r.angle(theta), exec);
    }
    Ok(st)
}

/// Schmidt data of a bipartition.
#[derive(Clone, Debug, Serialize)]
pub struct EntanglementSpectrum {
    pub entropy: f64,
    /// Schmidt weights `λ_α`, descending.
    pub lambdas: Vec<f64>,
    /// `ξ_α = -ln λ_α`, ascending; `+∞` for vanishing weights.
    pub xi: Vec<f64>,
}

impl EntanglementSpectrum {
    /// `ξ_1 - ξ_0`.
    pub fn lowest_gap(&self) -> f64 {
        match self.xi.as_slice() {
            [a, b, ..] => b - a,
            _ => f64::INFINITY,
        }
    }
}

/// Entanglement of subsystem `a` (qubit list) with its complement.
pub fn entanglement(state: &DenseState, a: &[usize]) -> Result<EntanglementSpectrum> {
    let n = state.n;
    let mut in_a = vec![false; n];
    for &q in a {
        if q >= n || in_a[q] {
            return Err(invalid(format!("bad qubit {q} in bipartition")));
        }
        in_a[q] = true;
    }
    if a.is_empty() || a.len() == n {
        return Err(invalid("bipartition must be non-empty and proper"));
    }
    let b: Vec<usize> = (0..n).filter(|&q| !in_a[q]).collect();
    let (da, db) = (1usize << a.len(), 1usize << b.len());
    let mut m = DMatrix::<Complex64>::zeros(da, db);
    for (idx, &amp) in state.amps.iter().enumerate() {
        let row = a
            .iter()
            .enumerate()
            .fold(0, |acc, (k, &q)| acc | (((idx >> q) & 1) << k));
        let col = b
            .iter()
            .enumerate()
            .fold(0, |acc, (k, &q)| acc | (((idx >> q) & 1) << k));
        m[(row, col)] = amp;
    }
    let sv = m.singular_values();
    let mut lambdas: Vec<f64> = sv.iter().map(|s| s * s).collect();
    lambdas.sort_by(|x, y| y.total_cmp(x));
    let entropy = lambdas
        .iter()
        .filter(|&&l| l > 1e-300)
        .map(|&l| -l * l.ln())
        .sum();
    let xi = lambdas
        .iter()
        .map(|&l| if l > 1e-300 { -l.ln() } else { f64::INFINITY })
        .collect();
    Ok(EntanglementSpectrum {
        entropy,
        lambdas,
        xi,
    })
}

/// Sites of the boundary symmetry operator `T̂ = Π Z_i`: every boundary site
/// of the 2-d lattice except the source and sink corners.
pub fn symmetry_operator_sites(l: usize) -> Vec<usize> {
    lattice::boundary_without_corners(l)
}

pub fn z_string(sites: &[usize]) -> PauliString {
    PauliString::from_letters(sites.iter().map(|&q| (q, Pauli::Z)))
}

/// `|⟨φ(θ+π)| Π_{i∈sites} Z_i |φ(θ)⟩|` on the `L×L` whip circuit.
pub fn symmetry_fidelity(l: usize, theta: f64, sites: &[usize]) -> Result<f64> {
    let c = build_whip(2, l)?;
    let a = run_circuit(&c, theta)?;
    let b = run_circuit(&c, theta + std::f64::consts::PI)?;
    Ok(b.fidelity(&a.apply_string(&z_string(sites))))
}

pub fn symmetry_check(l: usize, theta: f64) -> Result<f64> {
    symmetry_fidelity(l, theta, &symmetry_operator_sites(l))
}

/// `Σ_{i∈B'} X_i` over the lower boundary.
pub fn lower_boundary_x(l: usize) -> PauliSum {
    PauliSum::from_terms(
        lattice::lower_boundary(l)
            .into_iter()
            .map(|q| (PauliString::single(q, Pauli::X), 1.0)),
    )
}

/// `⟨∂X⟩/(2L-2)` on the `L×L` whip state.
pub fn order_parameter_finite(l: usize, theta: f64) -> Result<f64> {
    let c = build_whip(2, l)?;
    let st = run_circuit(&c, theta)?;
    Ok(st.expectation(&lower_boundary_x(l), Exec::default()) / (2 * l - 2) as f64)
}

/// Numerical summary of the special points of the phase diagram.
#[derive(Clone, Debug, Serialize)]
pub struct PhasePointReport {
    pub l: usize,
    /// Largest single-site entropy at θ = 0 and θ = π.
    pub product_max_entropy: f64,
    /// `|⟨φ(3π/4)|φ(-π/4)⟩|`.
    pub ghz_overlap_plus: f64,
    /// `|⟨φ(-3π/4)|φ(π/4)⟩|`.
    pub ghz_overlap_minus: f64,
    /// Largest distance of a Pauli expectation from {0, ±1} at θ = ±π/2.
    pub clifford_max_deviation: f64,
    pub clifford_strings_checked: usize,
}

impl PhasePointReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.product_max_entropy < tol
            && (1.0 - self.ghz_overlap_plus).abs() < tol
            && (1.0 - self.ghz_overlap_minus).abs() < tol
            && self.clifford_max_deviation < tol
    }
}

/// Deterministic spread of Pauli strings over `n` qubits, at most `limit` of them.
fn sample_strings(n: usize, limit: usize) -> Vec<PauliString> {
    let total = 1u64 << (2 * n);
    let stride = (total / limit as u64).max(1) | 1;
    let mut out = Vec::new();
    let mut k = 0u64;
    while k < total && out.len() < limit {
        let letters = (0..n).filter_map(|q| match (k >> (2 * q)) & 3 {
            1 => Some((q, Pauli::X)),
            2 => Some((q, Pauli::Y)),
            3 => Some((q, Pauli::Z)),
            _ => None,
        });
        out.push(PauliString::from_letters(letters));
        k += stride;
    }
    out
}

pub fn phase_point_checks(l: usize) -> Result<PhasePointReport> {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
    let c = build_whip(2, l)?;
    let n = c.num_qubits();
    let mut product_max_entropy: f64 = 0.0;
    for theta in [0.0, PI] {
        let st = run_circuit(&c, theta)?;
        for q in 0..n {
            product_max_entropy = product_max_entropy.max(entanglement(&st, &[q])?.entropy);
        }
    }
    let ghz_overlap_plus =
        run_circuit(&c, 3.0 * FRAC_PI_4)?.fidelity(&run_circuit(&c, -FRAC_PI_4)?);
    let ghz_overlap_minus =
        run_circuit(&c, -3.0 * FRAC_PI_4)?.fidelity(&run_circuit(&c, FRAC_PI_4)?);
    let strings = sample_strings(n, 4096);
    let mut clifford_max_deviation: f64 = 0.0;
    for theta in [FRAC_PI_2, -FRAC_PI_2] {
        let st = run_circuit(&c, theta)?;
        for p in &strings {
            let v = st.expectation_string(p, Exec::default()).re;
            let dev = [0.0, 1.0, -1.0]
                .iter()
                .map(|t| (v - t).abs())
                .fold(f64::INFINITY, f64::min);
            clifford_max_deviation = clifford_max_deviation.max(dev);
        }
    }
    Ok(PhasePointReport {
        l,
        product_max_entropy,
        ghz_overlap_plus,
        ghz_overlap_minus,
        clifford_max_deviation,
        clifford_strings_checked: strings.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_cycle, build_whip_no_pt, sink_pair, CycleStyle};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn zz(a: usize, b: usize) -> PauliSum {
        PauliSum::single(PauliString::z_pair(a, b))
    }

    #[test]
    fn ghz_points() {
        for (d, theta) in [(1, -FRAC_PI_2), (2, -FRAC_PI_4), (3, -PI / 6.0)] {
            let c = build_whip(d, 2).unwrap();
            let st = run_circuit(&c, theta).unwrap();
            let n = c.num_qubits();
            let ghz = DenseState::cat(n, 0, (1 << n) - 1);
            assert!(1.0 - st.fidelity(&ghz) < 1e-12, "d={d}");
        }
    }

    #[test]
    fn antiferro_ghz() {
        let c = build_whip(2, 2).unwrap();
        let st = run_circuit(&c, FRAC_PI_4).unwrap();
        // Sites with odd coordinate sum are qubits 1 and 2.
        let pattern = 0b0110;
        let ghz = DenseState::cat(4, pattern, 0b1111 ^ pattern);
        assert!(1.0 - st.fidelity(&ghz) < 1e-12);
    }

    #[test]
    fn norm_is_preserved_gate_by_gate() {
        let c = build_whip(2, 3).unwrap();
        let mut st = DenseState::product(9, InitialState::Plus);
        for r in c.rotations() {
            st.apply_rotation(&r.generator, r.angle(0.83), Exec::Sequential);
            assert!((st.norm_sq() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_matches_closed_form_on_two_qubits() {
        // exp(-iα/2 Z0 Y1)|+0⟩ checked against cos·ψ - i·sin·ZY ψ by hand.
        let g = PauliString::zy(0, 1);
        let alpha = 0.9;
        let mut st = DenseState::product(2, InitialState::Zero);
        st.apply_rotation(&g, alpha, Exec::Sequential);
        // Z0=+1 on |00⟩: a0' = cos a0, a1' = +sin a0 in the target's bit.
        let (s, c) = (alpha / 2.0).sin_cos();
        let a = st.amplitudes();
        assert!((a[0] - Complex64::new(c, 0.0)).norm() < 1e-15);
        assert!((a[2] - Complex64::new(s, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn sequential_and_parallel_kernels_agree() {
        let c = build_whip(2, 4).unwrap();
        let a = run_circuit_with(&c, 0.41, Exec::Sequential, 22).unwrap();
        let b = run_circuit_with(&c, 0.41, Exec::Parallel, 22).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn qubit_cap() {
        let c = build_whip(2, 5).unwrap();
        assert_eq!(
            run_circuit_with(&c, 0.1, Exec::Sequential, 20),
            Err(Error::QubitCap { qubits: 25, cap: 20 })
        );
    }

    #[test]
    fn chain_edges_are_minus_sin() {
        let c = build_whip(1, 6).unwrap();
        let st = run_circuit(&c, 0.7).unwrap();
        for (a, b) in c.edges() {
            let v = st.expectation(&zz(a, b), Exec::default());
            assert!((v + 0.7f64.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn cycle_sink_edge() {
        let theta = PI / 6.0;
        let c = build_cycle(8, CycleStyle::UniformHalf).unwrap();
        let st = run_circuit(&c, theta).unwrap();
        let sink = lattice::cycle_sink(8);
        let v = st.expectation(&zz(sink - 1, sink), Exec::default());
        let (s, co) = theta.sin_cos();
        assert!((v - (-s * co + (-s).powi(7) * co)).abs() < 1e-12);
        assert!((v + 0.43978).abs() < 1e-5);
    }

    #[test]
    fn product_state_expectations() {
        let st = DenseState::product(3, InitialState::Plus);
        let z = PauliSum::single(PauliString::from_letters([(1, Pauli::Z), (2, Pauli::X)]));
        assert!(st.expectation(&z, Exec::default()).abs() < 1e-15);
        let x = PauliSum::single(PauliString::from_letters([(0, Pauli::X), (2, Pauli::X)]));
        assert!((st.expectation(&x, Exec::default()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn entanglement_of_product_and_bell() {
        let st = DenseState::product(4, InitialState::Plus);
        let e = entanglement(&st, &[0, 1]).unwrap();
        assert!(e.entropy.abs() < 1e-12);
        assert!(e.xi[1].is_infinite() || e.xi[1] > 20.0);
        let bell = DenseState::cat(2, 0, 3);
        let e = entanglement(&bell, &[0]).unwrap();
        assert!((e.entropy - 2f64.ln()).abs() < 1e-12);
        assert!(e.lowest_gap() < 1e-12);
        assert!(entanglement(&bell, &[]).is_err());
        assert!(entanglement(&bell, &[0, 1]).is_err());
    }

    #[test]
    fn chain_middle_cut_spectrum() {
        for theta in [0.3, 1.1, -2.0] {
            let c = build_whip(1, 6).unwrap();
            let st = run_circuit(&c, theta).unwrap();
            let e = entanglement(&st, &[0, 1, 2]).unwrap();
            let mut expect = [(theta / 2.0).cos().powi(2), (theta / 2.0).sin().powi(2)];
            expect.sort_by(|a, b| b.total_cmp(a));
            assert!((e.lambdas[0] - expect[0]).abs() < 1e-10);
            assert!((e.lambdas[1] - expect[1]).abs() < 1e-10);
            assert!(e.lambdas[2..].iter().all(|&l| l < 1e-10));
        }
    }

    #[test]
    fn symmetry_operator_maps_theta_to_theta_plus_pi() {
        for theta in [0.0, 0.3, -1.2, 2.5] {
            assert!(1.0 - symmetry_check(3, theta).unwrap() < 1e-10, "θ={theta}");
        }
        let id = symmetry_fidelity(3, 0.3, &[]).unwrap();
        assert!(id < 0.999, "identity should not be a symmetry: {id}");
    }

    #[test]
    fn symmetry_anticommutes_with_boundary_x() {
        for l in 2..=6 {
            let t = z_string(&symmetry_operator_sites(l));
            for (p, _) in lower_boundary_x(l).iter() {
                assert!(!t.commutes_with(p));
            }
        }
    }

    #[test]
    fn order_parameter_at_zero() {
        assert!((order_parameter_finite(3, 0.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phase_points() {
        let r = phase_point_checks(2).unwrap();
        assert!(r.passed(1e-10), "{r:?}");
        assert_eq!(r.clifford_strings_checked, 256);
    }

    #[test]
    fn dump_round_trip() {
        let c = build_whip_no_pt(2).unwrap();
        let st = run_circuit(&c, 0.2).unwrap();
        let mut buf = Vec::new();
        st.write_le(&mut buf).unwrap();
        assert_eq!(buf.len(), 16 * 16);
        assert_eq!(DenseState::read_le(&buf).unwrap(), st);
    }

    #[test]
    fn xxxy_rotation_matches_generic_kernel_oracle() {
        // Compare the masked kernel against explicit cos·ψ - i sin·Pψ.
        let g = PauliString::from_letters([(0, Pauli::X), (1, Pauli::X), (2, Pauli::X), (3, Pauli::Y)]);
        let mut st = run_circuit(&build_whip(2, 2).unwrap(), 0.4).unwrap();
        let before = st.clone();
        let alpha = 1.3;
        st.apply_rotation(&g, alpha, Exec::Sequential);
        let pg = before.apply_string(&g);
        let (s, c) = (alpha / 2.0).sin_cos();
        for (k, a) in st.amplitudes().iter().enumerate() {
            let e = before.amplitudes()[k] * c - Complex64::new(0.0, s) * pg.amplitudes()[k];
            assert!((a - e).norm() < 1e-14);
        }
    }

    #[test]
    fn sink_pair_is_nearest_neighbour() {
        let c = build_whip(2, 3).unwrap();
        let (a, b) = sink_pair(3).unwrap();
        let (qa, qb) = lattice::pair_indices(&c, &(a, b)).unwrap();
        assert!(c.edges().contains(&(qa.min(qb), qa.max(qb))));
    }
}
