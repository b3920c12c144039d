use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelConfig;
use crate::error::ProtocolError;

pub const DEFAULT_PAIRS: usize = 10_000;
pub const DEFAULT_DECOY_FRACTION: f64 = 0.1;
pub const DEFAULT_SAMPLE_FRACTION: f64 = 0.1;
pub const DEFAULT_QBER_THRESHOLD: f64 = 0.05;

/// Which security check runs between Step 1 and Step 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStrategy {
    Decoy,
    #[serde(rename = "wc")]
    WavelengthConverter,
    Both,
}

impl CheckStrategy {
    pub fn uses_decoys(self) -> bool {
        matches!(self, CheckStrategy::Decoy | CheckStrategy::Both)
    }

    pub fn uses_converter(self) -> bool {
        matches!(self, CheckStrategy::WavelengthConverter | CheckStrategy::Both)
    }
}

impl fmt::Display for CheckStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStrategy::Decoy => "decoy",
            CheckStrategy::WavelengthConverter => "wc",
            CheckStrategy::Both => "both",
        })
    }
}

impl FromStr for CheckStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "decoy" => Ok(CheckStrategy::Decoy),
            "wc" => Ok(CheckStrategy::WavelengthConverter),
            "both" => Ok(CheckStrategy::Both),
            other => Err(format!("unknown check strategy `{other}` (expected decoy, wc or both)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub n_pairs: usize,
    /// Probability that any slot of the transmitted `b` sequence is a decoy.
    pub decoy_fraction: f64,
    pub check_strategy: CheckStrategy,
    /// Fraction of delivered pairs consumed by the wavelength-converter check.
    pub check_sample_fraction: f64,
    pub qber_threshold: f64,
    pub channel: ChannelConfig,
    pub seed: u64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            n_pairs: DEFAULT_PAIRS,
            decoy_fraction: DEFAULT_DECOY_FRACTION,
            check_strategy: CheckStrategy::Both,
            check_sample_fraction: DEFAULT_SAMPLE_FRACTION,
            qber_threshold: DEFAULT_QBER_THRESHOLD,
            channel: ChannelConfig::default(),
            seed: 0,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<(), ProtocolError> {
        let bad = |msg: String| Err(ProtocolError::InvalidConfig(msg));
        if self.n_pairs == 0 {
            return bad("n_pairs must be positive".into());
        }
        if !(0.0..1.0).contains(&self.decoy_fraction) {
            return bad(format!("decoy_fraction {} outside [0, 1)", self.decoy_fraction));
        }
        if !(self.check_sample_fraction > 0.0 && self.check_sample_fraction <= 1.0) {
            return bad(format!(
                "check_sample_fraction {} outside (0, 1]",
                self.check_sample_fraction
            ));
        }
        if !(self.qber_threshold > 0.0 && self.qber_threshold < 1.0) {
            return bad(format!("qber_threshold {} outside (0, 1)", self.qber_threshold));
        }
        self.channel
            .validate()
            .map_err(|e| ProtocolError::InvalidConfig(e.to_string()))
    }
}
