//! Sparse Pauli strings with phase tracking, real-coefficient Pauli sums, and
//! Heisenberg-picture conjugation by Pauli rotations `exp(-i·α/2·G)`.
//!
//! Qubits are addressed by index; the circuit that owns them maps indices to
//! lattice sites.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Coefficients below this magnitude are dropped as underflow debris.
pub const PRUNE_FLOOR: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    /// Single-site product `self·other` as (letter or identity, power of i).
    pub fn times(self, other: Pauli) -> (Option<Pauli>, u8) {
        use Pauli::*;
        match (self, other) {
            (a, b) if a == b => (None, 0),
            (X, Y) => (Some(Z), 1),
            (Y, Z) => (Some(X), 1),
            (Z, X) => (Some(Y), 1),
            (Y, X) => (Some(Z), 3),
            (Z, Y) => (Some(X), 3),
            (X, Z) => (Some(Y), 3),
            _ => unreachable!(),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Global phase restricted to the fourth roots of unity, stored as a power of i.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: u8) -> Phase {
        Phase(k % 4)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// ±1 for real phases.
    pub fn sign(self) -> Option<f64> {
        match self.0 {
            0 => Some(1.0),
            2 => Some(-1.0),
            _ => None,
        }
    }

}

impl std::ops::Mul for Phase {
    type Output = Phase;

    fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }
}

/// Tensor product of single-qubit Paulis times a phase.
///
/// Letters are kept sorted by qubit with identities omitted, so structural
/// equality is operator equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    letters: Vec<(usize, Pauli)>,
    phase: Phase,
}

impl PauliString {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Builds a string from `(qubit, letter)` pairs. Repeated qubits are multiplied
    /// left to right, so the result is always canonical.
    pub fn from_letters(letters: impl IntoIterator<Item = (usize, Pauli)>) -> Self {
        letters
            .into_iter()
            .fold(Self::identity(), |acc, (q, p)| {
                acc.multiply(&PauliString {
                    letters: vec![(q, p)],
                    phase: Phase::ONE,
                })
            })
    }

    pub fn single(qubit: usize, p: Pauli) -> Self {
        Self {
            letters: vec![(qubit, p)],
            phase: Phase::ONE,
        }
    }

    pub fn z_pair(a: usize, b: usize) -> Self {
        Self::from_letters([(a, Pauli::Z), (b, Pauli::Z)])
    }

    /// `Z_control · Y_target`, the generator of a whip gate.
    pub fn zy(control: usize, target: usize) -> Self {
        Self::from_letters([(control, Pauli::Z), (target, Pauli::Y)])
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn letters(&self) -> &[(usize, Pauli)] {
        &self.letters
    }

    pub fn weight(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn get(&self, qubit: usize) -> Option<Pauli> {
        self.letters
            .binary_search_by_key(&qubit, |&(q, _)| q)
            .ok()
            .map(|i| self.letters[i].1)
    }

    /// Same letters, phase reset to +1.
    pub fn unphased(&self) -> Self {
        Self {
            letters: self.letters.clone(),
            phase: Phase::ONE,
        }
    }

    /// Product `self · other` with accumulated phase.
    pub fn multiply(&self, other: &PauliString) -> PauliString {
        let mut letters = Vec::with_capacity(self.letters.len() + other.letters.len());
        let mut power = self.phase.0 + other.phase.0;
        let (a, b) = (&self.letters, &other.letters);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let (qa, pa) = a[i];
            let (qb, pb) = b[j];
            if qa < qb {
                letters.push((qa, pa));
                i += 1;
            } else if qb < qa {
                letters.push((qb, pb));
                j += 1;
            } else {
                let (p, k) = pa.times(pb);
                power += k;
                if let Some(p) = p {
                    letters.push((qa, p));
                }
                i += 1;
                j += 1;
            }
        }
        letters.extend_from_slice(&a[i..]);
        letters.extend_from_slice(&b[j..]);
        PauliString {
            letters,
            phase: Phase::from_power(power),
        }
    }

    /// Whether the two strings commute (even number of clashing sites).
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let (a, b) = (&self.letters, &other.letters);
        let (mut i, mut j) = (0, 0);
        let mut clashes = 0usize;
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    if a[i].1 != b[j].1 {
                        clashes += 1;
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        clashes.is_multiple_of(2)
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.letters.last().map(|&(q, _)| q)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase.0 {
            0 => "",
            1 => "i·",
            2 => "-",
            _ => "-i·",
        };
        write!(f, "{prefix}")?;
        if self.letters.is_empty() {
            return write!(f, "I");
        }
        for (k, (q, p)) in self.letters.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}{}", p.symbol(), q)?;
        }
        Ok(())
    }
}

/// Product state the circuit starts from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum InitialState {
    /// `|+⟩^N`
    Plus,
    /// `|0⟩^N`
    Zero,
}

impl InitialState {
    pub fn evaluate(self, p: &PauliString) -> Result<f64> {
        match self {
            InitialState::Plus => evaluate_on_plus(p),
            InitialState::Zero => evaluate_on_zero(p),
        }
    }
}

/// `⟨+|^N p |+⟩^N`: X and identity give 1, any Y or Z gives 0.
pub fn evaluate_on_plus(p: &PauliString) -> Result<f64> {
    let sign = p.phase.sign().ok_or(Error::NonHermitian)?;
    if p.letters.iter().all(|&(_, l)| l == Pauli::X) {
        Ok(sign)
    } else {
        Ok(0.0)
    }
}

/// `⟨0|^N p |0⟩^N`: Z and identity give 1, any X or Y gives 0.
pub fn evaluate_on_zero(p: &PauliString) -> Result<f64> {
    let sign = p.phase.sign().ok_or(Error::NonHermitian)?;
    if p.letters.iter().all(|&(_, l)| l == Pauli::Z) {
        Ok(sign)
    } else {
        Ok(0.0)
    }
}

/// A rotation `exp(-i·(multiplier·θ/2)·generator)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rotation {
    pub generator: PauliString,
    pub multiplier: f64,
}

impl Rotation {
    pub fn angle(&self, theta: f64) -> f64 {
        self.multiplier * theta
    }
}

/// Real linear combination of phase-free Pauli strings.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PauliSum {
    terms: BTreeMap<PauliString, f64>,
}

impl PauliSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (PauliString, f64)>) -> Self {
        let mut s = Self::new();
        for (p, c) in terms {
            s.add(p, c);
        }
        s
    }

    pub fn single(p: PauliString) -> Self {
        Self::from_terms([(p, 1.0)])
    }

    /// Adds `c·p`. A real phase on `p` is folded into the coefficient.
    ///
    /// # Panics
    /// If `p` carries a phase of ±i; that would make the sum non-Hermitian.
    pub fn add(&mut self, p: PauliString, c: f64) {
        let sign = p
            .phase
            .sign()
            .expect("PauliSum terms must have a real phase");
        let key = if p.phase == Phase::ONE { p } else { p.unphased() };
        self.add_unphased(key, sign * c);
    }

    fn add_unphased(&mut self, key: PauliString, c: f64) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                if c.abs() >= PRUNE_FLOOR {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                let v = *o.get() + c;
                if v.abs() < PRUNE_FLOOR {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, p: &PauliString) -> f64 {
        self.terms.get(p).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, f64)> {
        self.terms.iter().map(|(p, &c)| (p, c))
    }

    /// `Σ c_I²`, the squared Frobenius norm divided by `2^N`.
    pub fn norm_sq(&self) -> f64 {
        self.terms.values().map(|c| c * c).sum()
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&PauliString, f64) -> bool) {
        self.terms.retain(|p, c| keep(p, *c));
    }

    pub fn scaled(&self, k: f64) -> PauliSum {
        PauliSum::from_terms(self.iter().map(|(p, c)| (p.clone(), k * c)))
    }

    pub fn evaluate(&self, init: InitialState) -> Result<f64> {
        self.iter()
            .try_fold(0.0, |acc, (p, c)| Ok(acc + c * init.evaluate(p)?))
    }

    /// Largest coefficient difference against `other` over the union of terms.
    pub fn max_abs_diff(&self, other: &PauliSum) -> f64 {
        let a = self.iter().map(|(p, c)| (c - other.get(p)).abs());
        let b = other
            .iter()
            .filter(|(p, _)| !self.terms.contains_key(p))
            .map(|(_, c)| c.abs());
        a.chain(b).fold(0.0, f64::max)
    }
}

impl FromIterator<(PauliString, f64)> for PauliSum {
    fn from_iter<T: IntoIterator<Item = (PauliString, f64)>>(iter: T) -> Self {
        Self::from_terms(iter)
    }
}

/// `U† P U` for `U = exp(-i·α/2·G)`, applied term by term.
///
/// Commuting terms pass through; an anticommuting `P` becomes
/// `cos α·P + i·sin α·G·P`, where `i·G·P` is a real-phased string.
/// Returns the new sum and the number of terms that branched.
pub fn conjugate_by(sum: &PauliSum, generator: &PauliString, alpha: f64) -> (PauliSum, usize) {
    let (s, c) = alpha.sin_cos();
    let mut out = PauliSum::new();
    let mut branched = 0;
    for (p, coeff) in sum.iter() {
        if p.commutes_with(generator) {
            out.add_unphased(p.clone(), coeff);
            continue;
        }
        branched += 1;
        out.add_unphased(p.clone(), c * coeff);
        let gp = generator.multiply(p);
        // G·P = i^k Q with k odd, so i·G·P = i^{k+1} Q is real.
        let phase = Phase::from_power(gp.phase.0 + 1);
        let sign = phase.sign().expect("anticommuting product has phase ±i");
        out.add_unphased(gp.unphased(), sign * s * coeff);
    }
    (out, branched)
}

/// Conjugation by a whip gate at angle θ (rotation angle `multiplier·θ`).
pub fn conjugate(sum: &PauliSum, gate: &crate::lattice::ZYGate, theta: f64) -> PauliSum {
    let g = PauliString::zy(gate.control, gate.target);
    conjugate_by(sum, &g, gate.multiplier_f64() * theta).0
}
