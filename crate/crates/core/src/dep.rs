//! The eight doubly entangled basis states and the dense-coding table.
//!
//! Starting from `Ψ+ = (|H,ωs⟩|V,ωi⟩ + |V,ωs'⟩|H,ωi'⟩)/√2`, a Pauli pair
//! `opA ⊗ opB` lands on one of `Φ±, Ψ±, Γ±, Υ±`. Exactly two pairs reach
//! each state (`(A, B)` and `(σz·A, σz·B)`), and each state carries a 3-bit
//! codeword.
//!
//! The codeword depends only on the final state, since that is all Bob can
//! recover. Pairs whose operation on photon `a` is `σz` or `iσy` therefore
//! use the same codeword as their `I` / `σx` partners
//! (e.g. `σz⊗I → Ψ− → 001`).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::QuantumError;
use crate::quantum::{
    apply_local, equal_up_to_global_phase, joint_index, Freq, JointState, Mode, Pauli, Photon,
    Pol, C64,
};

pub const TABLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Phi,
    Psi,
    Gamma,
    Upsilon,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Phi, Family::Psi, Family::Gamma, Family::Upsilon];

    pub fn symbol(self) -> &'static str {
        match self {
            Family::Phi => "Φ",
            Family::Psi => "Ψ",
            Family::Gamma => "Γ",
            Family::Upsilon => "Υ",
        }
    }

    /// The two product terms `(a mode, b mode)` of the family's states. The
    /// first term carries amplitude `+1/√2`, the second the sign.
    pub fn terms(self) -> [(Mode, Mode); 2] {
        use Freq::{Plain, Primed};
        use Pol::{H, V};
        let m = Mode::new;
        match self {
            Family::Phi => [(m(H, Plain), m(H, Plain)), (m(V, Primed), m(V, Primed))],
            Family::Psi => [(m(H, Plain), m(V, Plain)), (m(V, Primed), m(H, Primed))],
            Family::Gamma => [(m(V, Plain), m(H, Plain)), (m(H, Primed), m(V, Primed))],
            Family::Upsilon => [(m(V, Plain), m(V, Plain)), (m(H, Primed), m(H, Primed))],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// One of the eight DEP basis states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DepLabel {
    pub family: Family,
    pub sign: Sign,
}

impl DepLabel {
    pub const fn new(family: Family, sign: Sign) -> DepLabel {
        DepLabel { family, sign }
    }

    /// All eight labels in codeword order (`000` first).
    pub fn all() -> [DepLabel; 8] {
        let mut out = [DepLabel::new(Family::Psi, Sign::Plus); 8];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = Codeword::new(i as u8).label();
        }
        out
    }
}

impl fmt::Display for DepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.sign {
            Sign::Plus => "+",
            Sign::Minus => "-",
        };
        write!(f, "{}{s}", self.family.symbol())
    }
}

/// 3-bit key word `b2 b1 b0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Codeword(u8);

impl Codeword {
    pub fn new(bits: u8) -> Codeword {
        assert!(bits < 8, "codeword out of range: {bits}");
        Codeword(bits)
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    /// Bits most-significant first.
    pub fn to_bits(self) -> [bool; 3] {
        [self.0 & 4 != 0, self.0 & 2 != 0, self.0 & 1 != 0]
    }

    pub fn all() -> impl Iterator<Item = Codeword> {
        (0..8).map(Codeword)
    }

    /// Inverse of [`label_to_codeword`].
    pub fn label(self) -> DepLabel {
        let family = match self.0 >> 1 {
            0 => Family::Psi,
            1 => Family::Phi,
            2 => Family::Upsilon,
            _ => Family::Gamma,
        };
        let sign = if self.0 & 1 == 0 { Sign::Plus } else { Sign::Minus };
        DepLabel::new(family, sign)
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:03b}", self.0)
    }
}

/// Operation on photon `a` and on photon `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EncodingPair {
    pub op_a: Pauli,
    pub op_b: Pauli,
}

impl EncodingPair {
    pub const fn new(op_a: Pauli, op_b: Pauli) -> EncodingPair {
        EncodingPair { op_a, op_b }
    }

    pub fn all() -> impl Iterator<Item = EncodingPair> {
        Pauli::ALL
            .into_iter()
            .flat_map(|a| Pauli::ALL.into_iter().map(move |b| EncodingPair::new(a, b)))
    }

    /// The other pair reaching the same state: `(σz·A, σz·B)`.
    pub fn partner(self) -> EncodingPair {
        EncodingPair::new(self.op_a.times_z(), self.op_b.times_z())
    }

    /// `(opA ⊗ opB) s`.
    pub fn apply(self, s: &JointState) -> JointState {
        apply_local(self.op_a, Photon::A, &apply_local(self.op_b, Photon::B, s))
    }
}

impl fmt::Display for EncodingPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}⊗{}", self.op_a, self.op_b)
    }
}

/// Amplitudes `(η1, η2)` of the source state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceAmplitudes {
    pub eta1: C64,
    pub eta2: C64,
}

pub fn dep_basis(label: DepLabel) -> JointState {
    let [(a0, b0), (a1, b1)] = label.family.terms();
    // same rounding as `source_state` with equal amplitudes
    let amp = C64::new(1.0, 0.0) / 2f64.sqrt();
    let mut s = JointState::zero();
    let amps = s.amplitudes_mut();
    amps[joint_index(a0, b0)] = amp;
    amps[joint_index(a1, b1)] = amp * label.sign.factor();
    s
}

pub fn psi_plus() -> JointState {
    dep_basis(DepLabel::new(Family::Psi, Sign::Plus))
}

/// `η1'|H,ωs⟩|V,ωi⟩ + η2'|V,ωs'⟩|H,ωi'⟩` with `η'` normalized.
pub fn source_state(a: SourceAmplitudes) -> Result<JointState, QuantumError> {
    let norm = (a.eta1.norm_sqr() + a.eta2.norm_sqr()).sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(QuantumError::InvalidArgument(
            "source amplitudes must not both be zero".into(),
        ));
    }
    let [(a0, b0), (a1, b1)] = Family::Psi.terms();
    let mut s = JointState::zero();
    let amps = s.amplitudes_mut();
    amps[joint_index(a0, b0)] = a.eta1 / norm;
    amps[joint_index(a1, b1)] = a.eta2 / norm;
    Ok(s)
}

/// Upper block of the key table: Ψ±→00x, Φ±→01x, Υ±→10x, Γ±→11x, `x`
/// set for the minus sign.
pub fn label_to_codeword(label: DepLabel) -> Codeword {
    let hi = match label.family {
        Family::Psi => 0,
        Family::Phi => 1,
        Family::Upsilon => 2,
        Family::Gamma => 3,
    };
    let lo = match label.sign {
        Sign::Plus => 0,
        Sign::Minus => 1,
    };
    Codeword::new(hi << 1 | lo)
}

pub fn classify(s: &JointState, tol: f64) -> Option<DepLabel> {
    DepLabel::all()
        .into_iter()
        .find(|&l| equal_up_to_global_phase(s, &dep_basis(l), tol))
}

/// The state reached by applying `e` to `Ψ+`.
pub fn encoding_to_label(e: EncodingPair) -> DepLabel {
    classify(&e.apply(&psi_plus()), TABLE_TOL)
        .expect("Pauli pairs map Ψ+ onto the DEP basis")
}

pub fn codeword_to_encodings(c: Codeword) -> [EncodingPair; 2] {
    let target = c.label();
    let mut found = EncodingPair::all().filter(|&e| encoding_to_label(e) == target);
    let first = found.next().expect("two pairs per label");
    let second = found.next().expect("two pairs per label");
    debug_assert!(found.next().is_none());
    [first, second]
}
