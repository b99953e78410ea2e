//! Heisenberg-picture Pauli propagation.
//!
//! [`naive_expectation`] conjugates a full [`PauliSum`] backward through every
//! layer and evaluates the survivors on the initial product state.
//! [`early_eval_expectation`] specialises to `⟨Z_aZ_b⟩` on 2-d whip circuits:
//! once all gates targeting a site are applied the site is never touched
//! again, so its `X` evaluates to 1 and its `Z` to 0 straight away. Every
//! surviving term is then a product of at most two `Z`s, and one
//! substitution per site, `Z_j → Σ_p w_pj Z_p`, carries the state back to the
//! source.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::lattice::{pair_indices, Circuit, CircuitKind, Site, WhipCircuit};
use crate::pauli::{conjugate_by, PauliString, PauliSum};

/// Default cap on the number of live terms in the naive engine.
pub const DEFAULT_TERM_BUDGET: usize = 20_000_000;

/// Optional truncations for [`naive_expectation`]; all `None` means exact.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncationPolicy {
    /// Stop after this many layers (counted back from the last) and keep only
    /// terms that no remaining gate can change.
    pub layer_cutoff: Option<usize>,
    /// Drop terms with `|c|` below this after each layer.
    pub coeff_floor: Option<f64>,
    /// Drop strings heavier than this after each layer.
    pub weight_cap: Option<usize>,
    /// Fail once more than this many terms are alive.
    pub term_budget: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            layer_cutoff: None,
            coeff_floor: None,
            weight_cap: None,
            term_budget: DEFAULT_TERM_BUDGET,
        }
    }
}

impl TruncationPolicy {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn is_exact(&self) -> bool {
        self.layer_cutoff.is_none() && self.coeff_floor.is_none() && self.weight_cap.is_none()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PropagationStats {
    /// Largest number of live terms after any layer.
    pub max_terms: usize,
    /// Number of (term, gate) pairs that split into two terms.
    pub total_branchings: usize,
    pub layers_processed: usize,
}

/// `⟨ψ_0| U† O U |ψ_0⟩` by back-propagating `obs` through the circuit.
pub fn naive_expectation<C: Circuit + ?Sized>(
    circuit: &C,
    obs: &PauliSum,
    theta: f64,
    policy: &TruncationPolicy,
) -> Result<(f64, PropagationStats)> {
    let rotations = circuit.rotations();
    let layers = circuit.layer_ranges();
    let init = circuit.initial_state();
    let mut sum = obs.clone();
    let mut stats = PropagationStats {
        max_terms: sum.len(),
        ..Default::default()
    };
    for (done, layer) in layers.iter().rev().enumerate() {
        if policy.layer_cutoff == Some(done) {
            let remaining = &rotations[..layer.end];
            let closed = sum.iter().filter(|(p, _)| {
                remaining.iter().all(|r| p.commutes_with(&r.generator))
            });
            let mut value = 0.0;
            for (p, c) in closed {
                value += c * init.evaluate(p)?;
            }
            return Ok((value, stats));
        }
        for r in &rotations[layer.clone()] {
            let (next, branched) = conjugate_by(&sum, &r.generator, r.angle(theta));
            sum = next;
            stats.total_branchings += branched;
        }
        if let Some(floor) = policy.coeff_floor {
            sum.retain(|_, c| c.abs() >= floor);
        }
        if let Some(cap) = policy.weight_cap {
            sum.retain(|p, _| p.weight() <= cap);
        }
        stats.layers_processed = done + 1;
        stats.max_terms = stats.max_terms.max(sum.len());
        if sum.len() > policy.term_budget {
            return Err(Error::TermBudget {
                layer: layers.len() - done,
                terms: sum.len(),
                budget: policy.term_budget,
            });
        }
    }
    Ok((sum.evaluate(init)?, stats))
}

/// Early-evaluation state: `Σ c_ab Z_a Z_b + scalar` with `a < b`.
///
/// `pairs` is an ordered map kept as a key-sorted vector, so each
/// substitution is one linear sweep plus a merge.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FrontState {
    pub pairs: Vec<((usize, usize), f64)>,
    pub scalar: f64,
    kept: Vec<((usize, usize), f64)>,
    fresh: Vec<((usize, usize), f64)>,
}

impl FrontState {
    pub fn new(a: usize, b: usize) -> Self {
        FrontState {
            pairs: vec![((a.min(b), a.max(b)), 1.0)],
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Sites carrying a `Z` in some live term, ascending.
    pub fn front(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.pairs.iter().flat_map(|&((a, b), _)| [a, b]).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Replaces `Z_j` by `Σ w_p Z_p` in every term; a full sweep over the map.
    /// Returns whether any term contained `j`.
    fn substitute(&mut self, j: usize, weights: &[(usize, f64)]) -> bool {
        self.kept.clear();
        self.fresh.clear();
        for &((a, b), c) in &self.pairs {
            if a != j && b != j {
                self.kept.push(((a, b), c));
                continue;
            }
            let other = if a == j { b } else { a };
            for &(p, w) in weights {
                if p == other {
                    self.scalar += c * w;
                } else {
                    self.fresh.push(((other.min(p), other.max(p)), c * w));
                }
            }
        }
        if self.kept.len() == self.pairs.len() {
            return false;
        }
        self.fresh.sort_unstable_by_key(|e| e.0);
        self.pairs.clear();
        let mut fresh = self.fresh.iter().peekable();
        let push = |pairs: &mut Vec<((usize, usize), f64)>, k: (usize, usize), c: f64| match pairs.last_mut() {
            Some(last) if last.0 == k => last.1 += c,
            _ => pairs.push((k, c)),
        };
        for &(k, c) in &self.kept {
            while let Some(&&(fk, fc)) = fresh.peek() {
                if fk > k {
                    break;
                }
                push(&mut self.pairs, fk, fc);
                fresh.next();
            }
            push(&mut self.pairs, k, c);
        }
        for &(fk, fc) in fresh {
            push(&mut self.pairs, fk, fc);
        }
        true
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EarlyStats {
    /// Largest number of live pair terms after any layer.
    pub max_strings: usize,
    /// Largest number of distinct sites in live terms after any layer.
    pub max_front: usize,
    /// Layers processed after the first one that touched the observable.
    pub active_layers: usize,
}

/// Checks that `circuit` is a 2-d circuit the early-evaluation engine handles:
/// every site has at most two incoming gates, all applied before any gate
/// the site controls.
fn check_early_circuit(circuit: &WhipCircuit) -> Result<()> {
    if circuit.d != 2 || !matches!(circuit.kind, CircuitKind::Whip | CircuitKind::NoPtTree) {
        return Err(Error::UnsupportedCircuit(format!(
            "early evaluation needs a 2-d whip or tree circuit, got {:?} with d={}",
            circuit.kind, circuit.d
        )));
    }
    circuit.validate()?;
    if circuit.predecessors().iter().any(|p| p.len() > 2) {
        return Err(Error::UnsupportedCircuit(
            "a site has more than two incoming gates".into(),
        ));
    }
    Ok(())
}

/// Exact `⟨Z_a Z_b⟩` on a 2-d whip (or comb-tree) circuit by early evaluation.
pub fn early_eval_expectation(circuit: &WhipCircuit, pair: &(Site, Site), theta: f64) -> Result<f64> {
    early_eval_with_stats(circuit, pair, theta, None).map(|(v, _)| v)
}

/// As [`early_eval_expectation`], optionally truncated after `layer_cutoff`
/// active layers, with statistics.
pub fn early_eval_with_stats(
    circuit: &WhipCircuit,
    pair: &(Site, Site),
    theta: f64,
    layer_cutoff: Option<usize>,
) -> Result<(f64, EarlyStats)> {
    check_early_circuit(circuit)?;
    let (a, b) = pair_indices(circuit, pair)?;
    Ok(early_eval_unchecked(circuit, a, b, theta, layer_cutoff))
}

/// Early evaluation on qubit indices, skipping circuit validation.
pub fn early_eval_unchecked(
    circuit: &WhipCircuit,
    a: usize,
    b: usize,
    theta: f64,
    layer_cutoff: Option<usize>,
) -> (f64, EarlyStats) {
    let mut incoming: Vec<Vec<(usize, f64)>> = vec![Vec::new(); circuit.num_qubits()];
    for g in &circuit.gates {
        incoming[g.target].push((g.control, g.multiplier_f64() * theta));
    }
    let mut state = FrontState::new(a, b);
    let mut stats = EarlyStats {
        max_strings: 1,
        max_front: 2,
        active_layers: 0,
    };
    let mut weights = Vec::with_capacity(2);
    let mut started = false;
    for layer in circuit.layers.iter().rev() {
        if layer_cutoff.is_some_and(|c| stats.active_layers >= c) {
            break;
        }
        let mut last_target = usize::MAX;
        for g in &circuit.gates[layer.clone()] {
            let j = g.target;
            if j == last_target {
                continue;
            }
            last_target = j;
            let inc = &incoming[j];
            weights.clear();
            for (k, &(p, alpha)) in inc.iter().enumerate() {
                let others: f64 = inc
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != k)
                    .map(|(_, &(_, beta))| beta.cos())
                    .product();
                weights.push((p, -alpha.sin() * others));
            }
            started |= state.substitute(j, &weights);
        }
        if started {
            stats.active_layers += 1;
        }
        stats.max_strings = stats.max_strings.max(state.len());
        stats.max_front = stats.max_front.max(state.front().len());
    }
    // Terms left over still carry a Z on the source, which evaluates to 0.
    (state.scalar, stats)
}

/// Validates an early-evaluation pair without running it.
pub fn check_early_pair(circuit: &WhipCircuit, pair: &(Site, Site)) -> Result<()> {
    check_early_circuit(circuit)?;
    pair_indices(circuit, pair).map(|_| ())
}

/// `Z_a Z_b` as a Pauli sum.
pub fn zz_observable(a: usize, b: usize) -> Result<PauliSum> {
    if a == b {
        return Err(invalid("pair sites must differ"));
    }
    Ok(PauliSum::single(PauliString::z_pair(a, b)))
}
