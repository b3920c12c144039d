//! Labels for the single-photon mode space.
//!
//! Each photon lives in a 4-dimensional space spanned by polarization
//! (`H`, `V`) times two frequency bins. Photon `a` carries `ωs` / `ωs'`,
//! photon `b` carries `ωi` / `ωi'`. The local index is `pol * 2 + freq`
//! and the joint index of a two-photon state is `index_a * 4 + index_b`.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pol {
    H,
    V,
}

impl Pol {
    pub const ALL: [Pol; 2] = [Pol::H, Pol::V];

    pub fn index(self) -> usize {
        match self {
            Pol::H => 0,
            Pol::V => 1,
        }
    }

    pub fn from_index(i: usize) -> Pol {
        if i == 0 {
            Pol::H
        } else {
            Pol::V
        }
    }

    pub fn flipped(self) -> Pol {
        match self {
            Pol::H => Pol::V,
            Pol::V => Pol::H,
        }
    }
}

/// Frequency bin of a photon: the unprimed (`ωs`, `ωi`) or primed
/// (`ωs'`, `ωi'`) member of the pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Freq {
    Plain,
    Primed,
}

impl Freq {
    pub const ALL: [Freq; 2] = [Freq::Plain, Freq::Primed];

    pub fn index(self) -> usize {
        match self {
            Freq::Plain => 0,
            Freq::Primed => 1,
        }
    }

    pub fn from_index(i: usize) -> Freq {
        if i == 0 {
            Freq::Plain
        } else {
            Freq::Primed
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Photon {
    A,
    B,
}

impl fmt::Display for Photon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Photon::A => f.write_str("a"),
            Photon::B => f.write_str("b"),
        }
    }
}

/// One basis mode `(pol, freq)` of a single photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mode {
    pub pol: Pol,
    pub freq: Freq,
}

impl Mode {
    pub const fn new(pol: Pol, freq: Freq) -> Mode {
        Mode { pol, freq }
    }

    pub fn index(self) -> usize {
        self.pol.index() * 2 + self.freq.index()
    }

    pub fn from_index(i: usize) -> Mode {
        assert!(i < 4, "local mode index out of range: {i}");
        Mode::new(Pol::from_index(i / 2), Freq::from_index(i % 2))
    }

    pub fn all() -> impl Iterator<Item = Mode> {
        (0..4).map(Mode::from_index)
    }

    /// Human-readable label, e.g. `(V,ωi')`.
    pub fn label(self, photon: Photon) -> String {
        let base = match photon {
            Photon::A => "ωs",
            Photon::B => "ωi",
        };
        let prime = if self.freq == Freq::Primed { "'" } else { "" };
        format!("({:?},{base}{prime})", self.pol)
    }
}

pub fn joint_index(a: Mode, b: Mode) -> usize {
    a.index() * 4 + b.index()
}
