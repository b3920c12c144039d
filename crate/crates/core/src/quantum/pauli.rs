use std::fmt;

use serde::{Deserialize, Serialize};

use super::ket::{JointState, C64};
use super::mode::{Mode, Photon, Pol};

/// 2×2 complex matrix acting on the polarization qubit, row-major.
pub type Matrix2 = [[C64; 2]; 2];

/// Local operation applied by Alice to one photon's polarization.
///
/// Convention: `σz|H⟩ = |H⟩`, `σz|V⟩ = -|V⟩`, `σx|H⟩ = |V⟩` and
/// `iσy = σz·σx`, so `iσy|H⟩ = -|V⟩` and `iσy|V⟩ = |H⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Z,
    IY,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::Z, Pauli::X, Pauli::IY];

    pub fn matrix(self) -> Matrix2 {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        match self {
            Pauli::I => [[l, o], [o, l]],
            Pauli::X => [[o, l], [l, o]],
            Pauli::Z => [[l, o], [o, -l]],
            Pauli::IY => [[o, l], [-l, o]],
        }
    }

    /// Whether the operation exchanges H and V.
    pub fn flips_polarization(self) -> bool {
        matches!(self, Pauli::X | Pauli::IY)
    }

    /// `σz·self` up to global phase.
    pub fn times_z(self) -> Pauli {
        match self {
            Pauli::I => Pauli::Z,
            Pauli::Z => Pauli::I,
            Pauli::X => Pauli::IY,
            Pauli::IY => Pauli::X,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Pauli::I => "I",
            Pauli::X => "σx",
            Pauli::Z => "σz",
            Pauli::IY => "iσy",
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

pub fn matmul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn dagger(a: &Matrix2) -> Matrix2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

/// Apply `m` to the polarization of one photon, identity on its frequency
/// and on the other photon.
pub fn apply_local_matrix(m: &Matrix2, subsystem: Photon, s: &JointState) -> JointState {
    let mut out = JointState::zero();
    let src = s.amplitudes();
    let dst = out.amplitudes_mut();
    for mode in Mode::all() {
        for other in 0..4 {
            let from = match subsystem {
                Photon::A => mode.index() * 4 + other,
                Photon::B => other * 4 + mode.index(),
            };
            let amp = src[from];
            if amp == C64::new(0.0, 0.0) {
                continue;
            }
            for target in Pol::ALL {
                let coeff = m[target.index()][mode.pol.index()];
                let tm = Mode::new(target, mode.freq);
                let to = match subsystem {
                    Photon::A => tm.index() * 4 + other,
                    Photon::B => other * 4 + tm.index(),
                };
                dst[to] += coeff * amp;
            }
        }
    }
    out
}

pub fn apply_local(op: Pauli, subsystem: Photon, s: &JointState) -> JointState {
    apply_local_matrix(&op.matrix(), subsystem, s)
}
