//! Photon transport: optional loss and an intercept-resend eavesdropper.

use serde::{Deserialize, Serialize};

use crate::device::{single_photon_measurement, single_photon_state, Basis, SingleOutcome};
use crate::error::QuantumError;
use crate::quantum::{
    partial_measure, tensor, JointState, LocalState, Photon, SeededGenerator, C64,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EveStrategy {
    /// Always measure `(pol, freq)` in H/V.
    Z,
    /// Always measure `(±, freq)`.
    X,
    /// Fair coin between Z and X per photon.
    RandomZx,
}

impl EveStrategy {
    pub fn pick_basis(self, g: &mut SeededGenerator) -> Basis {
        match self {
            EveStrategy::Z => Basis::Z,
            EveStrategy::X => Basis::X,
            EveStrategy::RandomZx => Basis::random(g),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EveTargets {
    /// The Step-1 `b` sequence, decoys included.
    B,
    /// The Step-4 `a` sequence.
    A,
    Both,
}

impl EveTargets {
    pub fn hits_b(self) -> bool {
        matches!(self, EveTargets::B | EveTargets::Both)
    }

    pub fn hits_a(self) -> bool {
        matches!(self, EveTargets::A | EveTargets::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EveConfig {
    pub strategy: EveStrategy,
    pub targets: EveTargets,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub loss_probability: f64,
    pub eve: Option<EveConfig>,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig { loss_probability: 0.0, eve: None }
    }
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<(), QuantumError> {
        check_probability(self.loss_probability)
    }

    fn eve_on(&self, photon: Photon) -> Option<EveStrategy> {
        self.eve.and_then(|e| {
            let hit = match photon {
                Photon::A => e.targets.hits_a(),
                Photon::B => e.targets.hits_b(),
            };
            hit.then_some(e.strategy)
        })
    }
}

/// What Eve saw: her basis, polarization bit and frequency.
pub type EveRecord = SingleOutcome;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmissionRecord {
    pub delivered: bool,
    pub eve: Option<EveRecord>,
}

impl TransmissionRecord {
    pub fn eve_measured(&self) -> bool {
        self.eve.is_some()
    }
}

fn check_probability(p: f64) -> Result<(), QuantumError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(QuantumError::InvalidArgument(format!("probability {p} outside [0, 1]")))
    }
}

pub fn apply_loss(p: f64, g: &mut SeededGenerator) -> Result<bool, QuantumError> {
    check_probability(p)?;
    // p = 0 and p = 1 never consume a draw
    if p == 0.0 {
        return Ok(true);
    }
    if p == 1.0 {
        return Ok(false);
    }
    Ok(!g.bernoulli(p))
}

/// Eve measures one photon of a pair in her basis and resends the
/// eigenstate she saw. The output is a product state.
pub fn ir_attack_entangled(
    s: &JointState,
    subsystem: Photon,
    strategy: EveStrategy,
    g: &mut SeededGenerator,
) -> (JointState, EveRecord) {
    let basis = strategy.pick_basis(g);
    let (record, collapsed) = partial_measure(s, subsystem, &single_photon_measurement(basis), g);
    let fresh = single_photon_state(record.basis, record.bit, record.freq);
    // conditional state of the photon Eve did not touch
    let mut remote = LocalState::zero();
    let src = collapsed.amplitudes();
    for other in 0..4 {
        let mut acc = C64::new(0.0, 0.0);
        for (local, f) in fresh.amplitudes().iter().enumerate() {
            let idx = match subsystem {
                Photon::A => local * 4 + other,
                Photon::B => other * 4 + local,
            };
            acc += f.conj() * src[idx];
        }
        remote.amplitudes_mut()[other] = acc;
    }
    let remote = remote.normalized().expect("collapsed state has a remote factor");
    let resent = match subsystem {
        Photon::A => tensor(&fresh, &remote),
        Photon::B => tensor(&remote, &fresh),
    };
    (resent, record)
}

pub fn ir_attack_decoy(
    s: &LocalState,
    strategy: EveStrategy,
    g: &mut SeededGenerator,
) -> (LocalState, EveRecord) {
    let basis = strategy.pick_basis(g);
    let (record, _) = single_photon_measurement(basis).measure(s, g);
    (single_photon_state(record.basis, record.bit, record.freq), record)
}

/// A configured channel carrying one photon sequence.
#[derive(Debug, Clone, Copy)]
pub struct Channel {
    config: ChannelConfig,
}

impl Channel {
    pub fn new(config: ChannelConfig) -> Result<Channel, QuantumError> {
        config.validate()?;
        Ok(Channel { config })
    }

    pub fn config(&self) -> &ChannelConfig {
        &self.config
    }

    /// Send `photon` of a pair. Eve acts before loss, so she may also
    /// intercept photons that never reach Bob.
    pub fn transmit_entangled(
        &self,
        s: &JointState,
        photon: Photon,
        g: &mut SeededGenerator,
    ) -> (JointState, TransmissionRecord) {
        let (state, eve) = match self.config.eve_on(photon) {
            Some(strategy) => {
                let (out, rec) = ir_attack_entangled(s, photon, strategy, g);
                (out, Some(rec))
            }
            None => (*s, None),
        };
        let delivered = apply_loss(self.config.loss_probability, g).expect("validated");
        (state, TransmissionRecord { delivered, eve })
    }

    /// Send a decoy in the `b` sequence.
    pub fn transmit_decoy(
        &self,
        s: &LocalState,
        g: &mut SeededGenerator,
    ) -> (LocalState, TransmissionRecord) {
        let (state, eve) = match self.config.eve_on(Photon::B) {
            Some(strategy) => {
                let (out, rec) = ir_attack_decoy(s, strategy, g);
                (out, Some(rec))
            }
            None => (*s, None),
        };
        let delivered = apply_loss(self.config.loss_probability, g).expect("validated");
        (state, TransmissionRecord { delivered, eve })
    }
}
