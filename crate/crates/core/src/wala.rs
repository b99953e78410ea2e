//! Weight-adjustable loop ansatz on a single cube.
//!
//! The twelve links of the unit cube are qubits, starting in `|0⟩`. Each
//! plaquette gate is `exp(-i·(m·θ/2)·X X X Y)` with `Y` on the face's target
//! link. Link indices: x-links `2y+z`, y-links `4+2x+z`, z-links `8+2x+y`.
//!
//! Plaquettes, in application order: 1 top (z=1), 2 north (y=1), 3 west
//! (x=0), 4 east (x=1), 5 bottom (z=0), 6 south (y=0). Without the
//! transition, plaquettes 1–5 are applied at full angle and 6 is implied by
//! the others. With it, 5 and 6 share the target link `x(0,0)` and are each
//! applied at half angle.

use std::ops::Range;

use serde::Serialize;

use crate::error::Result;
use crate::lattice::Circuit;
use crate::par::{self, Exec};
use crate::pauli::{InitialState, Pauli, PauliString, PauliSum, Rotation};
use crate::statevector::run_circuit;

pub const NUM_LINKS: usize = 12;
pub const NUM_PLAQUETTES: usize = 6;
pub const NUM_VERTICES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WalaVariant {
    WithPt,
    WithoutPt,
}

impl WalaVariant {
    pub fn name(self) -> &'static str {
        match self {
            WalaVariant::WithPt => "with_pt",
            WalaVariant::WithoutPt => "without_pt",
        }
    }
}

pub fn x_link(y: usize, z: usize) -> usize {
    2 * y + z
}

pub fn y_link(x: usize, z: usize) -> usize {
    4 + 2 * x + z
}

pub fn z_link(x: usize, y: usize) -> usize {
    8 + 2 * x + y
}

/// A face of the cube: its four links and the link carrying `Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Face {
    /// 1-based plaquette label.
    pub label: usize,
    pub name: &'static str,
    pub links: [usize; 4],
    pub target: usize,
}

/// The six faces in application order.
pub fn faces() -> [Face; NUM_PLAQUETTES] {
    [
        Face {
            label: 1,
            name: "top",
            links: [x_link(0, 1), x_link(1, 1), y_link(0, 1), y_link(1, 1)],
            target: x_link(1, 1),
        },
        Face {
            label: 2,
            name: "north",
            links: [x_link(1, 0), x_link(1, 1), z_link(0, 1), z_link(1, 1)],
            target: x_link(1, 0),
        },
        Face {
            label: 3,
            name: "west",
            links: [y_link(0, 0), y_link(0, 1), z_link(0, 0), z_link(0, 1)],
            target: z_link(0, 0),
        },
        Face {
            label: 4,
            name: "east",
            links: [y_link(1, 0), y_link(1, 1), z_link(1, 0), z_link(1, 1)],
            target: y_link(1, 0),
        },
        Face {
            label: 5,
            name: "bottom",
            links: [x_link(0, 0), x_link(1, 0), y_link(0, 0), y_link(1, 0)],
            target: x_link(0, 0),
        },
        Face {
            label: 6,
            name: "south",
            links: [x_link(0, 0), x_link(0, 1), z_link(0, 0), z_link(1, 0)],
            target: x_link(0, 0),
        },
    ]
}

impl Face {
    /// `X X X Y` with `Y` on the target link.
    pub fn generator(&self) -> PauliString {
        PauliString::from_letters(self.links.iter().map(|&l| {
            (l, if l == self.target { Pauli::Y } else { Pauli::X })
        }))
    }

    /// `X□_p`.
    pub fn plaquette(&self) -> PauliString {
        PauliString::from_letters(self.links.iter().map(|&l| (l, Pauli::X)))
    }
}

/// `Z⁺_v`: Z on the three links meeting at vertex `(a, b, c)`.
pub fn vertex_operator(a: usize, b: usize, c: usize) -> PauliString {
    PauliString::from_letters([(x_link(b, c), Pauli::Z), (y_link(a, c), Pauli::Z), (z_link(a, b), Pauli::Z)])
}

pub fn vertex_operators() -> Vec<PauliString> {
    (0..NUM_VERTICES)
        .map(|v| vertex_operator(v >> 2 & 1, v >> 1 & 1, v & 1))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlaquetteGate {
    pub face: Face,
    /// 2 for `exp(-iθXXXY)`, 1 for `exp(-iθXXXY/2)`.
    pub multiplier: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WalaCircuit {
    pub variant: WalaVariant,
    pub gates: Vec<PlaquetteGate>,
}

pub fn build_wala(variant: WalaVariant) -> WalaCircuit {
    let f = faces();
    let gates = match variant {
        WalaVariant::WithoutPt => f[..5]
            .iter()
            .map(|&face| PlaquetteGate { face, multiplier: 2 })
            .collect(),
        WalaVariant::WithPt => f
            .iter()
            .map(|&face| PlaquetteGate {
                face,
                multiplier: if face.label >= 5 { 1 } else { 2 },
            })
            .collect(),
    };
    WalaCircuit { variant, gates }
}

impl WalaCircuit {
    /// Text dump, one gate per line: `order target links... num/den`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, g) in self.gates.iter().enumerate() {
            let links: Vec<String> = g.face.links.iter().map(|l| l.to_string()).collect();
            out.push_str(&format!(
                "{} {} {} {}/1\n",
                i + 1,
                g.face.target,
                links.join(","),
                g.multiplier
            ));
        }
        out
    }
}

impl Circuit for WalaCircuit {
    fn num_qubits(&self) -> usize {
        NUM_LINKS
    }

    fn initial_state(&self) -> InitialState {
        InitialState::Zero
    }

    fn rotations(&self) -> Vec<Rotation> {
        self.gates
            .iter()
            .map(|g| Rotation {
                generator: g.face.generator(),
                multiplier: g.multiplier as f64,
            })
            .collect()
    }

    fn layer_ranges(&self) -> Vec<Range<usize>> {
        (0..self.gates.len()).map(|i| i..i + 1).collect()
    }
}

/// Whether the two half-angle bottom rotations commute.
pub fn bottom_rotations_commute() -> bool {
    let f = faces();
    f[4].target == f[5].target && f[4].generator().commutes_with(&f[5].generator())
}

/// `H(x) = -(1-x)ΣX□ - xΣZ_l - ΣZ⁺_v`.
pub fn z2_hamiltonian(x: f64) -> PauliSum {
    let mut h = PauliSum::new();
    for f in faces() {
        h.add(f.plaquette(), -(1.0 - x));
    }
    for l in 0..NUM_LINKS {
        h.add(PauliString::single(l, Pauli::Z), -x);
    }
    for v in vertex_operators() {
        h.add(v, -1.0);
    }
    h
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlaquetteRow {
    pub theta: f64,
    /// `⟨X□_p⟩` for plaquettes 1–6.
    pub plaquettes: [f64; NUM_PLAQUETTES],
    /// `⟨Z⁺_v⟩` for the eight vertices.
    pub vertices: [f64; NUM_VERTICES],
    /// `⟨Z_l⟩` summed over links.
    pub link_z_sum: f64,
}

pub fn plaquette_point(circuit: &WalaCircuit, theta: f64) -> Result<PlaquetteRow> {
    let st = run_circuit(circuit, theta)?;
    let ev = |p: &PauliString| st.expectation_string(p, Exec::Sequential).re;
    let f = faces();
    let v = vertex_operators();
    Ok(PlaquetteRow {
        theta,
        plaquettes: std::array::from_fn(|i| ev(&f[i].plaquette())),
        vertices: std::array::from_fn(|i| ev(&v[i])),
        link_z_sum: (0..NUM_LINKS).map(|l| ev(&PauliString::single(l, Pauli::Z))).sum(),
    })
}

/// Statevector plaquette and vertex expectations over a θ grid.
pub fn plaquette_scan(variant: WalaVariant, thetas: &[f64], exec: Exec) -> Result<Vec<PlaquetteRow>> {
    let c = build_wala(variant);
    par::map(exec, thetas, |&t| plaquette_point(&c, t)).into_iter().collect()
}
