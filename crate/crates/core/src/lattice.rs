//! Whip circuits on lattice DAGs.
//!
//! A whip circuit is an ordered list of `exp(-i·(m·θ/2)·Z_c Y_t)` rotations
//! grouped into commuting layers. On the d-dimensional hypercubic lattice the
//! source is the all-zero corner and layer `k` holds every gate whose target
//! has coordinate sum `k`. Qubits are numbered row-major over coordinates.
//!
//! The text dump format is one gate per line:
//!
//! ```text
//! layer control_coords target_coords num/den
//! 1 0,0 0,1 2/1
//! ```

use std::fmt::Write as _;
use std::ops::Range;

use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::pauli::{InitialState, PauliString, Rotation};

/// Lattice coordinates, 0-indexed per axis.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Site(pub Vec<usize>);

impl Site {
    pub fn new(coords: impl Into<Vec<usize>>) -> Self {
        Site(coords.into())
    }

    pub fn coords(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coord_sum(&self) -> usize {
        self.0.iter().sum()
    }

    /// Comma-separated coordinates, as used by the dump format.
    pub fn label(&self) -> String {
        self.0
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    fn parse(s: &str) -> Result<Site> {
        s.split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Site)
            .map_err(|e| invalid(format!("bad coordinates {s:?}: {e}")))
    }
}

/// `exp(-i·(m·θ/2)·Z_control·Y_target)` with qubit indices into the owning circuit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZYGate {
    pub control: usize,
    pub target: usize,
    pub multiplier: Ratio<u32>,
}

impl ZYGate {
    pub fn multiplier_f64(&self) -> f64 {
        self.multiplier.to_f64().expect("finite ratio")
    }

    pub fn generator(&self) -> PauliString {
        PauliString::zy(self.control, self.target)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CycleStyle {
    /// Every edge a half-angle gate.
    UniformHalf,
    /// The sink's two incoming gates half-angle, all others full-angle.
    Bipolar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CircuitKind {
    Whip,
    Cycle(CycleStyle),
    /// Spanning comb tree with full-angle gates.
    NoPtTree,
}

/// Anything that can be run as an ordered list of Pauli rotations.
pub trait Circuit {
    fn num_qubits(&self) -> usize;
    fn initial_state(&self) -> InitialState;
    fn rotations(&self) -> Vec<Rotation>;
    /// Consecutive index ranges of mutually commuting rotations.
    fn layer_ranges(&self) -> Vec<Range<usize>>;
}

/// `(layer, control, target, multiplier)` as read back from a dump.
pub type DumpRecord = (usize, Site, Site, Ratio<u32>);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WhipCircuit {
    pub kind: CircuitKind,
    pub d: usize,
    pub shape: Vec<usize>,
    /// `sites[q]` is the lattice site of qubit `q`.
    pub sites: Vec<Site>,
    pub gates: Vec<ZYGate>,
    pub layers: Vec<Range<usize>>,
}

impl WhipCircuit {
    pub fn num_qubits(&self) -> usize {
        self.sites.len()
    }

    pub fn side(&self) -> usize {
        self.shape[0]
    }

    /// Row-major qubit index of `site`.
    pub fn index_of(&self, site: &Site) -> Option<usize> {
        if site.dim() != self.shape.len() {
            return None;
        }
        let mut idx = 0;
        for (&c, &n) in site.coords().iter().zip(&self.shape) {
            if c >= n {
                return None;
            }
            idx = idx * n + c;
        }
        Some(idx)
    }

    pub fn site(&self, q: usize) -> &Site {
        &self.sites[q]
    }

    /// Incoming gates per qubit, as `(control, multiplier)`.
    pub fn predecessors(&self) -> Vec<Vec<(usize, f64)>> {
        let mut preds = vec![Vec::new(); self.num_qubits()];
        for g in &self.gates {
            preds[g.target].push((g.control, g.multiplier_f64()));
        }
        preds
    }

    /// Undirected edge list `(a, b)` with `a < b`, one per gate.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.gates
            .iter()
            .map(|g| (g.control.min(g.target), g.control.max(g.target)))
            .collect()
    }

    /// Checks the structural invariants: in-range qubits, layers covering the
    /// gate list, a single source, a single sink (one parent per site for the
    /// tree), and every site a target of gates that come before any gate it
    /// controls.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_qubits();
        let mut next = 0;
        for r in &self.layers {
            if r.start != next || r.end <= r.start {
                return Err(invalid("layers must tile the gate list"));
            }
            next = r.end;
        }
        if next != self.gates.len() {
            return Err(invalid("layers must tile the gate list"));
        }
        let mut indeg = vec![0usize; n];
        let mut outdeg = vec![0usize; n];
        let mut first_control = vec![usize::MAX; n];
        let mut last_target = vec![0usize; n];
        for (k, g) in self.gates.iter().enumerate() {
            if g.control >= n || g.target >= n || g.control == g.target {
                return Err(invalid(format!("gate {k} has bad qubits")));
            }
            if g.multiplier == Ratio::from_integer(0) {
                return Err(invalid(format!("gate {k} has zero multiplier")));
            }
            indeg[g.target] += 1;
            outdeg[g.control] += 1;
            first_control[g.control] = first_control[g.control].min(k);
            last_target[g.target] = last_target[g.target].max(k);
        }
        let sources = (0..n).filter(|&q| indeg[q] == 0).count();
        let sinks = (0..n).filter(|&q| outdeg[q] == 0).count();
        if sources != 1 {
            return Err(invalid(format!("expected one source, found {sources}")));
        }
        // A spanning tree has one sink per leaf; lattice DAGs and cycles have one.
        if self.kind != CircuitKind::NoPtTree && sinks != 1 {
            return Err(invalid(format!("expected one sink, found {sinks}")));
        }
        if self.kind == CircuitKind::NoPtTree && indeg.iter().any(|&d| d > 1) {
            return Err(invalid("tree sites must have one parent"));
        }
        for q in 0..n {
            if indeg[q] > 0 && first_control[q] != usize::MAX && last_target[q] > first_control[q]
            {
                return Err(invalid(format!("qubit {q} controls before it is finished")));
            }
        }
        Ok(())
    }

    /// Text dump, one gate per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (l, r) in self.layers.iter().enumerate() {
            for g in &self.gates[r.clone()] {
                let _ = writeln!(
                    out,
                    "{} {} {} {}/{}",
                    l + 1,
                    self.sites[g.control].label(),
                    self.sites[g.target].label(),
                    g.multiplier.numer(),
                    g.multiplier.denom()
                );
            }
        }
        out
    }

    /// Parses a dump back into `(layer, control, target, multiplier)` records.
    pub fn parse_dump(text: &str) -> Result<Vec<DumpRecord>> {
        let mut out = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(invalid(format!("line {}: expected 4 fields", no + 1)));
            }
            let layer = fields[0]
                .parse()
                .map_err(|e| invalid(format!("line {}: {e}", no + 1)))?;
            let (num, den) = fields[3]
                .split_once('/')
                .ok_or_else(|| invalid(format!("line {}: multiplier needs num/den", no + 1)))?;
            let parse = |s: &str| {
                s.parse::<u32>()
                    .map_err(|e| invalid(format!("line {}: {e}", no + 1)))
            };
            let (num, den) = (parse(num)?, parse(den)?);
            if den == 0 {
                return Err(invalid(format!("line {}: zero denominator", no + 1)));
            }
            out.push((
                layer,
                Site::parse(fields[1])?,
                Site::parse(fields[2])?,
                Ratio::new(num, den),
            ));
        }
        Ok(out)
    }
}

impl Circuit for WhipCircuit {
    fn num_qubits(&self) -> usize {
        self.sites.len()
    }

    fn initial_state(&self) -> InitialState {
        InitialState::Plus
    }

    fn rotations(&self) -> Vec<Rotation> {
        self.gates
            .iter()
            .map(|g| Rotation {
                generator: g.generator(),
                multiplier: g.multiplier_f64(),
            })
            .collect()
    }

    fn layer_ranges(&self) -> Vec<Range<usize>> {
        self.layers.clone()
    }
}

/// All sites of a `shape` box in row-major (lexicographic) order.
fn box_sites(shape: &[usize]) -> Vec<Site> {
    let total: usize = shape.iter().product();
    (0..total)
        .map(|mut idx| {
            let mut coords = vec![0; shape.len()];
            for k in (0..shape.len()).rev() {
                coords[k] = idx % shape[k];
                idx /= shape[k];
            }
            Site(coords)
        })
        .collect()
}

/// Stable-sorts `(layer, gate)` records and cuts them into layer ranges.
fn layered(gates: Vec<(usize, ZYGate)>) -> (Vec<ZYGate>, Vec<Range<usize>>) {
    let mut gates = gates;
    gates.sort_by_key(|(layer, _)| *layer);
    let mut layers = Vec::new();
    let mut start = 0;
    for k in 1..=gates.len() {
        if k == gates.len() || gates[k].0 != gates[start].0 {
            layers.push(start..k);
            start = k;
        }
    }
    (gates.into_iter().map(|(_, g)| g).collect(), layers)
}

/// The d-dimensional Ising whip circuit on an `L^d` lattice.
///
/// Each gate into site `j` has multiplier `d/deg⁻_j`, so for d=2 bulk gates are
/// half-angle and upper-boundary gates full-angle.
pub fn build_whip(d: usize, l: usize) -> Result<WhipCircuit> {
    if d < 1 {
        return Err(invalid("dimension must be at least 1"));
    }
    if l < 2 {
        return Err(invalid("side length must be at least 2"));
    }
    let shape = vec![l; d];
    let sites = box_sites(&shape);
    let index = |coords: &[usize]| coords.iter().fold(0, |acc, &c| acc * l + c);
    let mut gates = Vec::new();
    for (t, site) in sites.iter().enumerate() {
        let preds: Vec<usize> = (0..d)
            .filter(|&a| site.0[a] > 0)
            .map(|a| {
                let mut c = site.0.clone();
                c[a] -= 1;
                index(&c)
            })
            .collect();
        let deg = preds.len() as u32;
        for p in preds {
            gates.push((
                site.coord_sum(),
                ZYGate {
                    control: p,
                    target: t,
                    multiplier: Ratio::new(d as u32, deg),
                },
            ));
        }
    }
    let (gates, layers) = layered(gates);
    Ok(WhipCircuit {
        kind: CircuitKind::Whip,
        d,
        shape,
        sites,
        gates,
        layers,
    })
}

/// Ring of `n` sites with source 0 and sink `n/2`; two branches run from the
/// source to the sink, and gates are layered by distance from the source.
pub fn build_cycle(n: usize, style: CycleStyle) -> Result<WhipCircuit> {
    if n < 3 {
        return Err(invalid("cycle length must be at least 3"));
    }
    let sink = cycle_sink(n);
    let sites = (0..n).map(|i| Site(vec![i])).collect();
    let mult = |target: usize| match style {
        CycleStyle::UniformHalf => Ratio::from_integer(1),
        CycleStyle::Bipolar if target == sink => Ratio::from_integer(1),
        CycleStyle::Bipolar => Ratio::from_integer(2),
    };
    let mut gates = Vec::new();
    for t in 1..=sink {
        gates.push((
            t,
            ZYGate {
                control: t - 1,
                target: t,
                multiplier: mult(t),
            },
        ));
    }
    for t in 1..=(n - sink) {
        let target = n - t;
        let control = if t == 1 { 0 } else { n - t + 1 };
        gates.push((
            t,
            ZYGate {
                control,
                target,
                multiplier: mult(target),
            },
        ));
    }
    let (gates, layers) = layered(gates);
    Ok(WhipCircuit {
        kind: CircuitKind::Cycle(style),
        d: 1,
        shape: vec![n],
        sites,
        gates,
        layers,
    })
}

/// Sink site of [`build_cycle`].
pub fn cycle_sink(n: usize) -> usize {
    n / 2
}

/// Comb spanning tree on the `L×L` lattice: a spine down column 0 and teeth
/// along each row, all full-angle gates, layered by depth from the source.
pub fn build_whip_no_pt(l: usize) -> Result<WhipCircuit> {
    if l < 2 {
        return Err(invalid("side length must be at least 2"));
    }
    let shape = vec![l, l];
    let sites = box_sites(&shape);
    let mut gates = Vec::new();
    for r in 0..l {
        for c in 0..l {
            if r == 0 && c == 0 {
                continue;
            }
            let control = if c > 0 { r * l + c - 1 } else { (r - 1) * l };
            gates.push((
                r + c,
                ZYGate {
                    control,
                    target: r * l + c,
                    multiplier: Ratio::from_integer(2),
                },
            ));
        }
    }
    let (gates, layers) = layered(gates);
    Ok(WhipCircuit {
        kind: CircuitKind::NoPtTree,
        d: 2,
        shape,
        sites,
        gates,
        layers,
    })
}

/// Site at offset `(a, b)` from the sink, measured back toward the source.
/// `(0,0)` is the sink and `(0,1)` its neighbour in the same row.
pub fn from_sink(l: usize, a: usize, b: usize) -> Result<Site> {
    if a >= l || b >= l {
        return Err(invalid(format!("offset ({a},{b}) outside a {l}×{l} lattice")));
    }
    Ok(Site(vec![l - 1 - a, l - 1 - b]))
}

/// Nearest-neighbour pair at the sink, `(0,0)` and `(0,1)` in sink offsets.
pub fn sink_pair(l: usize) -> Result<(Site, Site)> {
    Ok((from_sink(l, 0, 0)?, from_sink(l, 0, 1)?))
}

/// Diagonal pair at sink offsets `(d,0)` and `(0,d)`; both lie on one front.
pub fn diagonal_pair(l: usize, d: usize) -> Result<(Site, Site)> {
    if d == 0 {
        return Err(invalid("separation must be positive"));
    }
    Ok((from_sink(l, d, 0)?, from_sink(l, 0, d)?))
}

/// Qubit index pair for two sites of a circuit.
pub fn pair_indices(c: &WhipCircuit, pair: &(Site, Site)) -> Result<(usize, usize)> {
    let a = c
        .index_of(&pair.0)
        .ok_or_else(|| invalid(format!("site {:?} not in circuit", pair.0)))?;
    let b = c
        .index_of(&pair.1)
        .ok_or_else(|| invalid(format!("site {:?} not in circuit", pair.1)))?;
    if a == b {
        return Err(invalid("pair sites must differ"));
    }
    Ok((a, b))
}

/// Lower boundary of the 2-d lattice: bottom row and right column, sink excluded.
pub fn lower_boundary(l: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..l - 1).map(|c| (l - 1) * l + c).collect();
    out.extend((0..l - 1).map(|r| r * l + l - 1));
    out.sort_unstable();
    out
}

/// Lattice boundary sites of the 2-d lattice with the source and sink removed.
pub fn boundary_without_corners(l: usize) -> Vec<usize> {
    let sink = l * l - 1;
    boundary_sites(l)
        .into_iter()
        .filter(|&q| q != 0 && q != sink)
        .collect()
}

/// Every site on the edge of the 2-d lattice.
pub fn boundary_sites(l: usize) -> Vec<usize> {
    (0..l * l)
        .filter(|&q| {
            let (r, c) = (q / l, q % l);
            r == 0 || c == 0 || r == l - 1 || c == l - 1
        })
        .collect()
}
