//! Closed forms, series and exact path counts for whip circuits.
//!
//! Conventions: `⟨ZZ⟩` is the nearest-neighbour correlator at the sink of the
//! 2-d whip circuit in the infinite-lattice limit, and the Ising energy density
//! is `⟨H⟩ = -⟨ZZ⟩` for `H = -(1/|E|) Σ Z_i Z_j`. Removable singularities are
//! replaced by their limits.

use std::f64::consts::{FRAC_PI_4, PI};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use statrs::function::gamma::ln_gamma;

/// Exact non-negative path count.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathCount(pub BigUint);

impl PathCount {
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::INFINITY)
    }

    /// Natural logarithm, accurate for values far beyond f64 range.
    pub fn ln(&self) -> f64 {
        let bits = self.0.bits();
        if bits < 1000 {
            return self.to_f64().ln();
        }
        let shift = bits - 64;
        let top = (&self.0 >> shift).to_f64().expect("64-bit value");
        top.ln() + shift as f64 * std::f64::consts::LN_2
    }
}

impl std::fmt::Display for PathCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for PathCount {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl From<u64> for PathCount {
    fn from(v: u64) -> Self {
        PathCount(BigUint::from(v))
    }
}

/// `C(n, k)`, zero when `k < 0` or `k > n`.
pub fn binomial(n: i64, k: i64) -> BigUint {
    if n < 0 || k < 0 || k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

fn sub_sat(a: BigUint, b: BigUint) -> BigUint {
    if a >= b {
        a - b
    } else {
        BigUint::zero()
    }
}

/// Number of cycles with an `l × w` bounding rectangle closing the sink pair,
/// from the binomial (LGV) form `C(n,w-1)² - C(n,w)·C(n,w-2)`, `n = l+w-2`.
pub fn lgv_count(l: u32, w: u32) -> PathCount {
    assert!(l >= 1 && w >= 1, "lgv_count needs l, w >= 1");
    let n = (l + w - 2) as i64;
    let w = w as i64;
    let a = binomial(n, w - 1);
    let b = binomial(n, w) * binomial(n, w - 2);
    PathCount(sub_sat(&a * &a, b))
}

/// `lw/((l+w-1)(l+w)²)·C(l+w,l)²` evaluated in floating point.
pub fn lgv_product_form(l: u32, w: u32) -> f64 {
    let (lf, wf) = (l as f64, w as f64);
    let s = lf + wf;
    let ln_c = ln_gamma(s + 1.0) - ln_gamma(lf + 1.0) - ln_gamma(wf + 1.0);
    (lf * wf / ((s - 1.0) * s * s)).ln().exp() * (2.0 * ln_c).exp()
}

/// Cycles closing after `ℒ` layers: `Σ_{w=1}^{ℒ-1} N_C(w, ℒ)` with
/// `l = ℒ - w`; `ℒ = 1` is the local term and counts as 1.
pub fn cycle_count_layer(layer: u32) -> PathCount {
    assert!(layer >= 1, "layer index starts at 1");
    if layer == 1 {
        return PathCount(BigUint::one());
    }
    let mut total = BigUint::zero();
    for w in 1..layer {
        total += lgv_count(layer - w, w).0;
    }
    PathCount(total)
}

/// `4^{ℒ-1}·Γ(ℒ-½)/(√π·ℒ!)` in floating point.
pub fn cycle_count_gamma(layer: u32) -> f64 {
    let l = layer as f64;
    ((l - 1.0) * 4f64.ln() + ln_gamma(l - 0.5) - 0.5 * PI.ln() - ln_gamma(l + 1.0)).exp()
}

/// `N_C(l, l)` over the large-cycle asymptote `2/(π|C|²)·2^{|C|}`, `|C| = 4l`.
pub fn asymptotic_cycle_ratio(l: u32) -> f64 {
    let c = 4.0 * l as f64;
    let ln_asym = 2f64.ln() - PI.ln() - 2.0 * c.ln() + c * 2f64.ln();
    (lgv_count(l, l).ln() - ln_asym).exp()
}

/// Pauli paths joining the diagonal pair at separation `d` that meet after
/// `w` and `l` extra steps: `C(m,w)C(m,l) - C(m,w-1)C(m,l-1)`, `m = d+l+w-1`.
pub fn correlation_path_count(d: u32, w: u32, l: u32) -> PathCount {
    assert!(d >= 1, "separation must be positive");
    let m = (d + l + w) as i64 - 1;
    let (w, l) = (w as i64, l as i64);
    let a = binomial(m, w) * binomial(m, l);
    let b = binomial(m, w - 1) * binomial(m, l - 1);
    PathCount(sub_sat(a, b))
}

/// Angle canonicalised to `(-π, π]`.
pub fn canonical_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// `(|cos2θ| - 1)/sin2θ`, zero where `sin2θ = 0`.
pub fn zz_closed_form(theta: f64) -> f64 {
    let (s, c) = (2.0 * theta).sin_cos();
    if s == 0.0 {
        return 0.0;
    }
    (c.abs() - 1.0) / s
}

/// `lim ⟨H⟩ = -⟨ZZ⟩ = (1 - |cos2θ|)/sin2θ`.
pub fn energy_density_2d(theta: f64) -> f64 {
    -zz_closed_form(theta)
}

/// `∂θ⟨ZZ⟩ = 2(cos2θ - sign(cos2θ))/sin²2θ`. At a cusp the value depends on
/// the side; `side > 0` takes the limit from above.
pub fn zz_derivative(theta: f64, side: f64) -> f64 {
    let (s, c) = (2.0 * theta).sin_cos();
    let sigma = if c.abs() < 1e-15 {
        // cos2θ decreases through zero when sin2θ > 0.
        if (side > 0.0) == (s > 0.0) {
            -1.0
        } else {
            1.0
        }
    } else {
        c.signum()
    };
    if s.abs() < 1e-12 {
        // ⟨ZZ⟩ is -tanθ where cos2θ > 0 and -cotθ where cos2θ < 0.
        return if sigma > 0.0 {
            -1.0 / theta.cos().powi(2)
        } else {
            1.0 / theta.sin().powi(2)
        };
    }
    2.0 * (c - sigma) / (s * s)
}

/// `∂²θ⟨ZZ⟩`: `-2tanθ·sec²θ` where `cos2θ > 0`, `-2cotθ·csc²θ` where `cos2θ < 0`.
pub fn zz_second_derivative(theta: f64) -> f64 {
    if (2.0 * theta).cos() > 0.0 {
        let t = theta.tan();
        -2.0 * t * (1.0 + t * t)
    } else {
        let (s, c) = theta.sin_cos();
        -2.0 * c / (s * s * s)
    }
}

/// Partial sum through `ℒ₀` layers of
/// `-Σ 4^{ℒ-1}Γ(ℒ-½)/(√π ℒ!)·(cosθ sinθ)^{2ℒ-1}`.
pub fn zz_series(theta: f64, cutoff: u32) -> f64 {
    assert!(cutoff >= 1, "cutoff must be at least 1");
    let x = theta.cos() * theta.sin();
    let mut term = x;
    let mut sum = 0.0;
    for layer in 1..=cutoff {
        sum += term;
        let l = layer as f64;
        term *= 4.0 * (l - 0.5) / (l + 1.0) * x * x;
    }
    -sum
}

/// `-sinθcosθ + (-sinθ)^{n-1}cosθ` on a half-angle cycle of length `n`.
pub fn cycle_expectation(theta: f64, n: u32) -> f64 {
    assert!(n >= 3, "cycle length must be at least 3");
    let (s, c) = theta.sin_cos();
    -s * c + (-s).powi(n as i32 - 1) * c
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Boundary {
    Open,
    Periodic,
}

/// `⟨H_J⟩` for `H_J = J·Σ Z_i Z_{i+1}` on the 1-d whip chain (open) or the
/// bipolar cycle (periodic).
pub fn energy_1d(theta: f64, l: u32, boundary: Boundary, j: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    match boundary {
        Boundary::Open => {
            assert!(l >= 2);
            -j * (l as f64 - 1.0) * s
        }
        Boundary::Periodic => {
            assert!(l >= 3);
            let s2 = (2.0 * theta).sin();
            let local = (l as f64 - 2.0) * s2 + 2.0 * s * c;
            let cycle = 2.0 * (-s2).powi(l as i32 - 2) * s * c;
            -j * (local + cycle)
        }
    }
}

/// Cycle part of the periodic energy, `-J·2(-sin2θ)^{L-2}sinθcosθ`.
pub fn energy_1d_cycle_term(theta: f64, l: u32, j: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    -j * 2.0 * (-(2.0 * theta).sin()).powi(l as i32 - 2) * s * c
}

/// Half-chain entanglement of the 1-d whip state: weights
/// `(cos²(θ/2), sin²(θ/2))` and their entropy.
pub fn entropy_1d_obc(theta: f64) -> (f64, [f64; 2]) {
    let l0 = (theta / 2.0).cos().powi(2);
    let l1 = (theta / 2.0).sin().powi(2);
    let h = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
    (h(l0) + h(l1), [l0, l1])
}

/// `[sin2θ/(1+|cos2θ|)]^{2d}`.
pub fn correlation_closed_form(theta: f64, d: u32) -> f64 {
    let (s, c) = (2.0 * theta).sin_cos();
    (s / (1.0 + c.abs())).powi(2 * d as i32)
}

/// `ξ⁻¹ = ln(cos2φ/(1-|sin2φ|))` with `φ = θ - π/4`.
pub fn inverse_correlation_length(theta: f64) -> f64 {
    let phi = theta - FRAC_PI_4;
    let (s, c) = (2.0 * phi).sin_cos();
    (c / (1.0 - s.abs())).ln()
}

/// `ξ`, infinite at the critical point.
pub fn correlation_length(theta: f64) -> f64 {
    let inv = inverse_correlation_length(theta);
    if inv <= 0.0 {
        f64::INFINITY
    } else {
        inv.recip()
    }
}

/// `(cos2θ + |cos2θ|)/(2cosθ)`, zero wherever `cos2θ ≤ 0`.
pub fn order_parameter_closed_form(theta: f64) -> f64 {
    let c2 = (2.0 * theta).cos();
    if c2 <= 0.0 {
        return 0.0;
    }
    c2 / theta.cos()
}

/// `cos³θ - cosθ·sin²θ·(sin2θ/(1+|cos2θ|))²`.
pub fn order_parameter_decomposition(theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let r = correlation_closed_form(theta, 1);
    c * c * c - c * s * s * r
}

/// `⟨H⟩` on the `L×L` comb-tree circuit:
/// `(1/2L)[(L+1)sin2θ + Σ_{ℒ=1}^{L-1}(sin2θ)^{2ℒ+1}]`.
pub fn energy_density_no_pt(theta: f64, l: u32) -> f64 {
    let s = (2.0 * theta).sin();
    let lf = l as f64;
    let cycles: f64 = (1..l).map(|k| s.powi(2 * k as i32 + 1)).sum();
    ((lf + 1.0) * s + cycles) / (2.0 * lf)
}

/// `(sin2θ)^{4ℒ+1}`, the ungated bottom plaquette of a WALA column of height `ℒ`.
pub fn wala_plaquette_no_pt(theta: f64, layer: u32) -> f64 {
    (2.0 * theta).sin().powi(4 * layer as i32 + 1)
}

/// Asymptotic size of the series truncation error: `ℒ₀^{-1/2}` at a critical
/// angle, `|sin2θ|^{2ℒ₀-1}/(-ℒ₀^{3/2}·ln|sin2θ|)` elsewhere.
pub fn truncation_error_model(theta: f64, cutoff: u32) -> f64 {
    let s = (2.0 * theta).sin().abs();
    let l = cutoff as f64;
    if (1.0 - s).abs() < 1e-14 {
        return l.powf(-0.5);
    }
    if s == 0.0 {
        return 0.0;
    }
    s.powf(2.0 * l - 1.0) / (-l.powf(1.5) * s.ln())
}

/// Exhaustive path enumeration, the oracle for the closed-form counts.
pub mod brute {
    /// Direct LGV enumeration: vertex-disjoint pairs of monotone lattice paths
    /// from `(w-1, l)` and `(w, l-1)` down to `(0,1)` and `(0,0)`.
    pub fn lgv(l: u32, w: u32) -> u64 {
        let (l, w) = (l as i32, w as i32);
        let starts = [(w - 1, l), (w, l - 1)];
        let ends = [(0, 1), (0, 0)];
        let paths = |from: (i32, i32), to: (i32, i32)| paths_down(from, to);
        let mut count = 0;
        for perm in [[0usize, 1], [1, 0]] {
            let p0 = paths(starts[0], ends[perm[0]]);
            let p1 = paths(starts[1], ends[perm[1]]);
            for a in &p0 {
                for b in &p1 {
                    if a.iter().all(|v| !b.contains(v)) {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    fn paths_down(from: (i32, i32), to: (i32, i32)) -> Vec<Vec<(i32, i32)>> {
        if from.0 < to.0 || from.1 < to.1 {
            return vec![];
        }
        if from == to {
            return vec![vec![from]];
        }
        let mut out = Vec::new();
        for next in [(from.0 - 1, from.1), (from.0, from.1 - 1)] {
            for mut p in paths_down(next, to) {
                p.insert(0, from);
                out.push(p);
            }
        }
        out
    }

    fn paths_up(from: (i32, i32), to: (i32, i32)) -> Vec<Vec<(i32, i32)>> {
        paths_down(to, from)
    }

    /// Vertex-disjoint path pairs from `(d,0)→(d+w, d+l-1)` and `(0,d)→(d+w-1, d+l)`.
    pub fn correlation(d: u32, w: u32, l: u32) -> u64 {
        let (d, w, l) = (d as i32, w as i32, l as i32);
        let p0 = paths_up((d, 0), (d + w, d + l - 1));
        let p1 = paths_up((0, d), (d + w - 1, d + l));
        let mut count = 0;
        for a in &p0 {
            for b in &p1 {
                if a.iter().all(|v| !b.contains(v)) {
                    count += 1;
                }
            }
        }
        count
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_8};

    #[test]
    fn lgv_small_values() {
        assert_eq!(lgv_count(1, 1), PathCount::from(1));
        assert_eq!(lgv_count(2, 2), PathCount::from(3));
        assert_eq!(lgv_count(2, 1), PathCount::from(1));
        for l in 1..=5 {
            for w in 1..=5 {
                assert_eq!(lgv_count(l, w).to_f64() as u64, brute::lgv(l, w), "({l},{w})");
                assert_eq!(lgv_count(l, w), lgv_count(w, l));
                let rel = (lgv_product_form(l, w) / lgv_count(l, w).to_f64() - 1.0).abs();
                assert!(rel < 1e-12, "({l},{w})");
            }
        }
    }

    #[test]
    fn layer_counts() {
        assert_eq!(cycle_count_layer(1), PathCount::from(1));
        assert_eq!(cycle_count_layer(2), PathCount::from(1));
        assert_eq!(cycle_count_layer(3), PathCount::from(2));
        for layer in 1..=40 {
            let exact = cycle_count_layer(layer).to_f64();
            assert!((cycle_count_gamma(layer) / exact - 1.0).abs() < 1e-9, "ℒ={layer}");
        }
        for layer in 2..=7u32 {
            let brute: u64 = (1..layer).map(|w| brute::lgv(layer - w, w)).sum();
            assert_eq!(cycle_count_layer(layer).to_f64() as u64, brute);
        }
    }

    #[test]
    fn asymptotic_ratio() {
        assert!((asymptotic_cycle_ratio(20) - 1.0).abs() < 0.10);
        assert!((asymptotic_cycle_ratio(100) - 1.0).abs() < 0.02);
        let small = asymptotic_cycle_ratio(2);
        assert!(small.is_finite() && small > 0.0);
        assert!(asymptotic_cycle_ratio(400).is_finite());
    }

    #[test]
    fn correlation_counts() {
        for d in 1..=4 {
            assert_eq!(correlation_path_count(d, 0, 0), PathCount::from(1));
        }
        for w in 0..=4 {
            for l in 0..=4 {
                assert_eq!(correlation_path_count(1, w, l), lgv_count(l + 1, w + 1));
                for d in 1..=3 {
                    assert_eq!(
                        correlation_path_count(d, w, l).to_f64() as u64,
                        brute::correlation(d, w, l),
                        "d={d} w={w} l={l}"
                    );
                }
            }
        }
    }

    #[test]
    fn big_counts_stay_exact() {
        let c = cycle_count_layer(60);
        assert!(c.0.bits() > 64);
        assert!((c.ln() - cycle_count_gamma(60).ln()).abs() < 1e-9);
    }

    #[test]
    fn zz_values() {
        assert!((zz_closed_form(-FRAC_PI_4) - 1.0).abs() < 1e-15);
        assert!((zz_closed_form(FRAC_PI_4) + 1.0).abs() < 1e-15);
        assert_eq!(zz_closed_form(0.0), 0.0);
        assert!((zz_closed_form(FRAC_PI_8) - (1.0 - 2f64.sqrt())).abs() < 1e-12);
        assert!((energy_density_2d(-FRAC_PI_4) + 1.0).abs() < 1e-15);
        assert!((energy_density_2d(FRAC_PI_4) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn series_values() {
        let t = 0.77;
        assert!((zz_series(t, 1) + t.sin() * t.cos()).abs() < 1e-15);
        assert!((zz_series(-FRAC_PI_4, 1) - 0.5).abs() < 1e-15);
        assert!((zz_series(0.3, 200) - zz_closed_form(0.3)).abs() < 1e-10);
        for k in 0..200 {
            let theta = -PI + k as f64 * 2.0 * PI / 200.0;
            if (2.0 * theta).sin().abs() <= 0.98 {
                assert!((zz_series(theta, 10_000) - zz_closed_form(theta)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn series_terms_match_exact_counts() {
        // Coefficient of (cs)^{2ℒ-1} in the series equals the exact count.
        let theta = 0.5 * 0.9f64.asin();
        let cs = theta.cos() * theta.sin();
        for layer in 1..=12u32 {
            let prev = if layer > 1 { zz_series(theta, layer - 1) } else { 0.0 };
            let coeff = (prev - zz_series(theta, layer)) / cs.powi(2 * layer as i32 - 1);
            assert!((coeff / cycle_count_layer(layer).to_f64() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn derivative_jump_at_cusp() {
        let below = zz_derivative(FRAC_PI_4, -1.0);
        let above = zz_derivative(FRAC_PI_4, 1.0);
        assert!(((below - above).abs() - 4.0).abs() < 1e-12);
        let h = 1e-6;
        for theta in [0.1, 0.5, -0.3, 1.2] {
            let fd = (zz_closed_form(theta + h) - zz_closed_form(theta - h)) / (2.0 * h);
            assert!((fd - zz_derivative(theta, 1.0)).abs() < 1e-6);
            let fd2 = (zz_closed_form(theta + 1e-4) - 2.0 * zz_closed_form(theta)
                + zz_closed_form(theta - 1e-4))
                / 1e-8;
            assert!((fd2 - zz_second_derivative(theta)).abs() < 1e-4, "θ={theta}");
        }
    }

    #[test]
    fn cycle_and_1d_values() {
        assert!((cycle_expectation(PI / 6.0, 8) + 0.43978).abs() < 1e-5);
        assert_eq!(cycle_expectation(0.0, 5), 0.0);
        assert!(cycle_expectation(-FRAC_PI_2, 8).abs() < 1e-15);
        assert!((energy_1d(0.4, 6, Boundary::Open, 1.0) + 5.0 * 0.4f64.sin()).abs() < 1e-15);
        assert!((energy_1d(-FRAC_PI_4, 8, Boundary::Periodic, -1.0) + 8.0).abs() < 1e-12);
        assert_eq!(energy_1d(0.0, 8, Boundary::Periodic, 1.0), 0.0);
    }

    #[test]
    fn entropy_values() {
        let (s, sp) = entropy_1d_obc(0.0);
        assert_eq!(s, 0.0);
        assert_eq!(sp, [1.0, 0.0]);
        let (s, sp) = entropy_1d_obc(FRAC_PI_2);
        assert!((s - 2f64.ln()).abs() < 1e-15);
        assert!((sp[0] - 0.5).abs() < 1e-15);
        let (s, _) = entropy_1d_obc(PI / 3.0);
        assert!((s - 0.56233).abs() < 1e-5);
    }

    #[test]
    fn correlation_values() {
        assert!((correlation_closed_form(-FRAC_PI_4, 3) - 1.0).abs() < 1e-15);
        assert_eq!(correlation_closed_form(0.4, 0), 1.0);
        assert!((correlation_closed_form(FRAC_PI_8, 1) - 0.171573).abs() < 1e-6);
        assert!(correlation_length(FRAC_PI_4).is_infinite());
        assert!((inverse_correlation_length(FRAC_PI_4 + 0.1) - 0.2013468).abs() < 1e-6);
        let phi = 1e-4;
        assert!((inverse_correlation_length(FRAC_PI_4 + phi) / phi - 2.0).abs() < 1e-3);
    }

    #[test]
    fn order_values() {
        assert_eq!(order_parameter_closed_form(0.0), 1.0);
        assert_eq!(order_parameter_closed_form(0.5), order_parameter_closed_form(0.5));
        for k in 0..=10 {
            let t = FRAC_PI_4 + k as f64 * FRAC_PI_2 / 10.0;
            assert!(order_parameter_closed_form(t).abs() < 1e-15);
        }
        assert!((order_parameter_closed_form(FRAC_PI_8) - 0.765367).abs() < 1e-6);
        assert_eq!(order_parameter_closed_form(FRAC_PI_2), 0.0);
        assert_eq!(order_parameter_closed_form(-FRAC_PI_2), 0.0);
    }

    #[test]
    fn no_pt_energy() {
        for l in 2..10 {
            assert!((energy_density_no_pt(-FRAC_PI_4, l) + 1.0).abs() < 1e-12);
            assert_eq!(energy_density_no_pt(0.0, l), 0.0);
        }
        // Large L tends to +sin2θ/2.
        let t = 0.3;
        assert!((energy_density_no_pt(t, 4000) - 0.5 * (2.0 * t).sin()).abs() < 1e-3);
    }

    #[test]
    fn wala_and_truncation_models() {
        assert!((wala_plaquette_no_pt(FRAC_PI_4, 1) - 1.0).abs() < 1e-15);
        assert_eq!(wala_plaquette_no_pt(0.0, 1), 0.0);
        assert!((truncation_error_model(FRAC_PI_4, 16) - 0.25).abs() < 1e-12);
        let a = truncation_error_model(0.15, 10);
        let b = truncation_error_model(0.15, 20);
        assert!(b < a * 1e-2);
        assert!(truncation_error_model(0.4, 1).is_finite());
    }

    proptest! {
        #[test]
        fn canonical_angle_is_idempotent(t in -50.0f64..50.0) {
            let c = canonical_angle(t);
            prop_assert!(c > -PI && c <= PI);
            prop_assert_eq!(canonical_angle(c), c);
            prop_assert!(((t - c) / (2.0 * PI) - ((t - c) / (2.0 * PI)).round()).abs() < 1e-9);
        }

        #[test]
        fn correlation_powers(t in -PI..PI, d in 1u32..6) {
            let one = correlation_closed_form(t, 1);
            prop_assert!((correlation_closed_form(t, d) - one.powi(d as i32)).abs() < 1e-12);
            prop_assert!((one - zz_closed_form(t).powi(2)).abs() < 1e-12);
        }

        #[test]
        fn order_decomposition(t in -PI..PI) {
            prop_assert!((order_parameter_closed_form(t) - order_parameter_decomposition(t)).abs() < 1e-12);
            prop_assert!((order_parameter_closed_form(t + PI).abs() - order_parameter_closed_form(t).abs()).abs() < 1e-12);
        }

        #[test]
        fn energy_is_pi_periodic(t in -PI..PI) {
            prop_assert!((energy_density_2d(t + PI) - energy_density_2d(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_forms_are_continuous() {
        // Slopes are bounded by 4, so a 40M-point grid resolves jumps below 1e-6.
        let n = 40_000_000;
        let step = 2.0 * PI / n as f64;
        let fs: [fn(f64) -> f64; 3] = [zz_closed_form, order_parameter_closed_form, |t| {
            correlation_closed_form(t, 1)
        }];
        for f in fs {
            let mut prev = f(-PI + step);
            let mut worst: f64 = 0.0;
            for k in 2..=n {
                let v = f(-PI + k as f64 * step);
                worst = worst.max((v - prev).abs());
                prev = v;
            }
            assert!(worst < 1e-6, "max jump {worst}");
        }
    }
}
