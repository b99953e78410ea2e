//! θ sweeps over any engine, circuit and observable.

use std::time::Instant;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::lattice::{
    build_cycle, build_whip, build_whip_no_pt, cycle_sink, diagonal_pair, pair_indices, sink_pair, Circuit,
    CycleStyle, Site, WhipCircuit,
};
use crate::par::{self, Exec};
use crate::pauli::{PauliString, PauliSum};
use crate::propagation::{check_early_pair, early_eval_expectation, naive_expectation, TruncationPolicy};
use crate::statevector::{lower_boundary_x, run_circuit_with, DEFAULT_QUBIT_CAP};
use crate::wala::{self, build_wala, WalaCircuit, WalaVariant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Naive,
    Early,
    Statevector,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Naive => "naive",
            Engine::Early => "early",
            Engine::Statevector => "statevector",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum CircuitSpec {
    Whip { d: usize, l: usize },
    NoPt { l: usize },
    Cycle { n: usize, style: CycleStyle },
    Wala { variant: WalaVariant },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum ObservableSpec {
    /// Nearest-neighbour pair at the sink (for cycles: the last gated edge).
    Zz,
    /// `Z_a Z_b` on explicit lattice sites.
    Pair(Site, Site),
    /// Same-front pair at offset `(d,0),(0,d)` from the sink.
    Diagonal(usize),
    /// `-(1/|E|) Σ Z_i Z_j` over lattice edges.
    Energy,
    /// `Σ X` over the lower boundary.
    Order,
    /// `X□_p` for a 1-based cube plaquette.
    Plaquette(usize),
    /// `Z⁺_v` for vertex index `v` in `0..8`.
    Vertex(usize),
}

/// A built circuit ready to evaluate.
#[derive(Clone, Debug)]
pub enum Built {
    Lattice(WhipCircuit),
    Wala(WalaCircuit),
}

impl CircuitSpec {
    /// Linear size reported in scan rows.
    pub fn size(&self) -> usize {
        match *self {
            CircuitSpec::Whip { l, .. } | CircuitSpec::NoPt { l } => l,
            CircuitSpec::Cycle { n, .. } => n,
            CircuitSpec::Wala { .. } => 1,
        }
    }

    pub fn build(&self) -> Result<Built> {
        Ok(match *self {
            CircuitSpec::Whip { d, l } => Built::Lattice(build_whip(d, l)?),
            CircuitSpec::NoPt { l } => Built::Lattice(build_whip_no_pt(l)?),
            CircuitSpec::Cycle { n, style } => Built::Lattice(build_cycle(n, style)?),
            CircuitSpec::Wala { variant } => Built::Wala(build_wala(variant)),
        })
    }
}

impl Built {
    pub fn dump(&self) -> String {
        match self {
            Built::Lattice(c) => c.dump(),
            Built::Wala(c) => c.dump(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        match self {
            Built::Lattice(c) => c.num_qubits(),
            Built::Wala(c) => Circuit::num_qubits(c),
        }
    }

    pub fn circuit(&self) -> &dyn Circuit {
        match self {
            Built::Lattice(c) => c,
            Built::Wala(c) => c,
        }
    }
}

/// Resolved observable: a site pair (usable by every engine) or a general sum.
#[derive(Clone, Debug)]
pub enum Resolved {
    Pair(Site, Site, PauliSum),
    Sum(PauliSum),
}

impl Resolved {
    pub fn sum(&self) -> &PauliSum {
        match self {
            Resolved::Pair(_, _, s) | Resolved::Sum(s) => s,
        }
    }
}

fn pair(c: &WhipCircuit, a: Site, b: Site) -> Result<Resolved> {
    let (i, j) = pair_indices(c, &(a.clone(), b.clone()))?;
    Ok(Resolved::Pair(a, b, PauliSum::single(PauliString::z_pair(i, j))))
}

/// Builds the observable for a circuit, rejecting meaningless combinations.
pub fn resolve(spec: &CircuitSpec, built: &Built, obs: &ObservableSpec) -> Result<Resolved> {
    match (built, obs) {
        (Built::Lattice(c), ObservableSpec::Zz) => match spec {
            CircuitSpec::Cycle { n, .. } => {
                let s = cycle_sink(*n);
                pair(c, c.sites[s - 1].clone(), c.sites[s].clone())
            }
            CircuitSpec::Whip { d: 1, l } => pair(c, Site::new([l - 2]), Site::new([l - 1])),
            _ if c.d == 2 => {
                let (a, b) = sink_pair(c.side())?;
                pair(c, a, b)
            }
            _ => Err(invalid("zz observable is defined for 1-d, 2-d and cycle circuits")),
        },
        (Built::Lattice(c), ObservableSpec::Pair(a, b)) => pair(c, a.clone(), b.clone()),
        (Built::Lattice(c), ObservableSpec::Diagonal(d)) if c.d == 2 => {
            let (a, b) = diagonal_pair(c.side(), *d)?;
            pair(c, a, b)
        }
        (Built::Lattice(c), ObservableSpec::Energy) => {
            let edges = match spec {
                CircuitSpec::NoPt { l } => build_whip(2, *l)?.edges(),
                _ => c.edges(),
            };
            let k = -1.0 / edges.len() as f64;
            Ok(Resolved::Sum(PauliSum::from_terms(
                edges.into_iter().map(|(a, b)| (PauliString::z_pair(a, b), k)),
            )))
        }
        (Built::Lattice(c), ObservableSpec::Order) if c.d == 2 => Ok(Resolved::Sum(lower_boundary_x(c.side()))),
        (Built::Wala(_), ObservableSpec::Plaquette(p)) if (1..=wala::NUM_PLAQUETTES).contains(p) => {
            Ok(Resolved::Sum(PauliSum::single(wala::faces()[p - 1].plaquette())))
        }
        (Built::Wala(_), ObservableSpec::Vertex(v)) if *v < wala::NUM_VERTICES => {
            Ok(Resolved::Sum(PauliSum::single(wala::vertex_operators()[*v].clone())))
        }
        _ => Err(invalid(format!("observable {obs:?} does not apply to this circuit"))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub theta: f64,
    /// `None` when the engine failed at this point.
    pub value: Option<f64>,
    pub engine: Engine,
    #[serde(rename = "L")]
    pub l: usize,
    pub wall_ns: u64,
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub engine: Engine,
    pub circuit: CircuitSpec,
    pub observable: ObservableSpec,
    pub policy: TruncationPolicy,
    pub qubit_cap: usize,
}

impl ScanConfig {
    pub fn new(engine: Engine, circuit: CircuitSpec, observable: ObservableSpec) -> Self {
        ScanConfig {
            engine,
            circuit,
            observable,
            policy: TruncationPolicy::default(),
            qubit_cap: DEFAULT_QUBIT_CAP,
        }
    }
}

/// Checks the configuration and builds what the scan needs.
pub fn prepare(cfg: &ScanConfig) -> Result<(Built, Resolved)> {
    let built = cfg.circuit.build()?;
    let obs = resolve(&cfg.circuit, &built, &cfg.observable)?;
    match (cfg.engine, &built, &obs) {
        (Engine::Early, Built::Lattice(c), Resolved::Pair(a, b, _)) => check_early_pair(c, &(a.clone(), b.clone()))?,
        (Engine::Early, _, _) => {
            return Err(Error::UnsupportedCircuit(
                "early evaluation takes a Z-pair observable on a 2-d lattice circuit".into(),
            ))
        }
        (Engine::Statevector, b, _) if b.num_qubits() > cfg.qubit_cap => {
            return Err(Error::QubitCap {
                qubits: b.num_qubits(),
                cap: cfg.qubit_cap,
            })
        }
        _ => {}
    }
    Ok((built, obs))
}

fn evaluate(cfg: &ScanConfig, built: &Built, obs: &Resolved, theta: f64) -> Result<f64> {
    match cfg.engine {
        Engine::Early => match (built, obs) {
            (Built::Lattice(c), Resolved::Pair(a, b, _)) => early_eval_expectation(c, &(a.clone(), b.clone()), theta),
            _ => unreachable!("validated in prepare"),
        },
        Engine::Naive => naive_expectation(built.circuit(), obs.sum(), theta, &cfg.policy).map(|(v, _)| v),
        Engine::Statevector => {
            let st = run_circuit_with(built.circuit(), theta, Exec::Sequential, cfg.qubit_cap)?;
            Ok(st.expectation(obs.sum(), Exec::Sequential))
        }
    }
}

/// One row per θ, in grid order. Engine failures are recorded per row.
pub fn scan_expectation(cfg: &ScanConfig, thetas: &[f64], exec: Exec) -> Result<Vec<ScanRow>> {
    if thetas.is_empty() {
        return Err(invalid("θ grid is empty"));
    }
    let (built, obs) = prepare(cfg)?;
    let l = cfg.circuit.size();
    Ok(par::map(exec, thetas, |&theta| {
        let t = Instant::now();
        let r = evaluate(cfg, &built, &obs, theta);
        let wall_ns = t.elapsed().as_nanos() as u64;
        let (value, error) = match r {
            Ok(v) => (Some(v), None),
            Err(e) => (None, Some(e.to_string())),
        };
        ScanRow {
            theta,
            value,
            engine: cfg.engine,
            l,
            wall_ns,
            error,
        }
    }))
}

/// Parses `start:stop:count`, endpoints included.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(invalid(format!("grid must be start:stop:count, got {spec:?}")));
    }
    let num = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| invalid(format!("bad number {s:?} in grid")))
    };
    let (start, stop) = (num(parts[0])?, num(parts[1])?);
    let count: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| invalid(format!("bad count {:?} in grid", parts[2])))?;
    grid(start, stop, count)
}

pub fn grid(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    match count {
        0 => Err(invalid("grid count must be at least 1")),
        1 => Ok(vec![start]),
        _ => {
            let h = (stop - start) / (count - 1) as f64;
            Ok((0..count)
                .map(|i| if i + 1 == count { stop } else { start + h * i as f64 })
                .collect())
        }
    }
}
