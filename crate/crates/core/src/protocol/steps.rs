//! The individual protocol steps. [`super::session`] chains them.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::channel::{Channel, TransmissionRecord};
use crate::dep::{
    codeword_to_encodings, encoding_to_label, psi_plus, Codeword, EncodingPair, Family, Sign,
};
use crate::device::{
    decode, measure_single, single_photon_state, wavelength_convert_global, Basis,
    MeasurementDevice, SingleOutcome,
};
use crate::error::ProtocolError;
use crate::quantum::{
    apply_local, tensor_qubits, Freq, JointState, Ket, LocalState, Pauli, Photon,
    ProjectiveMeasurement, Qubit, SeededGenerator,
};

use super::transcript::{MessageKind, Party, Payload, Transcript};

/// One DEP pair: Alice's secret choices plus the physical state as it moves
/// through the protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct PairRecord {
    pub codeword: Codeword,
    pub encoding: EncodingPair,
    pub state: JointState,
    pub b_transit: Option<TransmissionRecord>,
    pub a_transit: Option<TransmissionRecord>,
    pub checked: bool,
}

impl PairRecord {
    pub fn b_delivered(&self) -> bool {
        self.b_transit.is_some_and(|t| t.delivered)
    }

    pub fn a_delivered(&self) -> bool {
        self.a_transit.is_some_and(|t| t.delivered)
    }

    /// Delivered in Step 1 and not consumed by a check.
    pub fn survives_checks(&self) -> bool {
        self.b_delivered() && !self.checked
    }
}

/// Entry of the transmitted `b` sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Slot {
    Pair(usize),
    Decoy(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DecoyPolarization {
    H,
    V,
    Diagonal,
    Antidiagonal,
}

impl DecoyPolarization {
    pub const ALL: [DecoyPolarization; 4] = [
        DecoyPolarization::H,
        DecoyPolarization::V,
        DecoyPolarization::Diagonal,
        DecoyPolarization::Antidiagonal,
    ];

    pub fn basis(self) -> Basis {
        match self {
            DecoyPolarization::H | DecoyPolarization::V => Basis::Z,
            _ => Basis::X,
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            DecoyPolarization::H | DecoyPolarization::Diagonal => 0,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoyPhoton {
    /// Index in the mixed `b` sequence.
    pub position: usize,
    pub freq: Freq,
    pub pol: DecoyPolarization,
    pub state: LocalState,
    pub transit: Option<TransmissionRecord>,
}

impl DecoyPhoton {
    pub fn delivered(&self) -> bool {
        self.transit.is_some_and(|t| t.delivered)
    }
}

/// Step 1: prepare `n` copies of `Ψ+`, draw a codeword and one of its two
/// realizations per pair, and apply the `b` half of the realization.
pub fn step1_prepare_and_encode(
    n_pairs: usize,
    g: &mut SeededGenerator,
) -> (Vec<PairRecord>, Vec<Slot>) {
    let realizations: Vec<[EncodingPair; 2]> = Codeword::all().map(codeword_to_encodings).collect();
    let source = psi_plus();
    let pairs: Vec<PairRecord> = (0..n_pairs)
        .map(|_| {
            let codeword = Codeword::new(g.below(8) as u8);
            let encoding = realizations[codeword.bits() as usize][g.below(2)];
            PairRecord {
                codeword,
                encoding,
                state: apply_local(encoding.op_b, Photon::B, &source),
                b_transit: None,
                a_transit: None,
                checked: false,
            }
        })
        .collect();
    let sequence = (0..n_pairs).map(Slot::Pair).collect();
    (pairs, sequence)
}

/// Interleave decoys into the `b` sequence. Before each pair photon, slots
/// keep turning into decoys with probability `decoy_fraction`, so decoys
/// make up that fraction of the transmitted sequence on average.
pub fn insert_decoys(
    b_sequence: Vec<Slot>,
    decoy_fraction: f64,
    g: &mut SeededGenerator,
) -> (Vec<Slot>, Vec<DecoyPhoton>) {
    if decoy_fraction <= 0.0 {
        return (b_sequence, Vec::new());
    }
    let mut mixed = Vec::with_capacity(b_sequence.len());
    let mut decoys = Vec::new();
    for slot in b_sequence {
        while g.bernoulli(decoy_fraction) {
            let freq = if g.coin() { Freq::Primed } else { Freq::Plain };
            let pol = DecoyPolarization::ALL[g.below(4)];
            decoys.push(DecoyPhoton {
                position: mixed.len(),
                freq,
                pol,
                state: single_photon_state(pol.basis(), pol.bit(), freq),
                transit: None,
            });
            mixed.push(Slot::Decoy(decoys.len() - 1));
        }
        mixed.push(slot);
    }
    (mixed, decoys)
}

/// Send the mixed `b` sequence through the channel in order.
pub fn transmit_b_sequence(
    sequence: &[Slot],
    pairs: &mut [PairRecord],
    decoys: &mut [DecoyPhoton],
    channel: &Channel,
    g: &mut SeededGenerator,
) {
    for slot in sequence {
        match *slot {
            Slot::Pair(i) => {
                let (state, rec) = channel.transmit_entangled(&pairs[i].state, Photon::B, g);
                pairs[i].state = state;
                pairs[i].b_transit = Some(rec);
            }
            Slot::Decoy(j) => {
                let (state, rec) = channel.transmit_decoy(&decoys[j].state, g);
                decoys[j].state = state;
                decoys[j].transit = Some(rec);
            }
        }
    }
}

/// Bob's measurement of one delivered decoy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoyMeasurement {
    pub decoy: usize,
    pub outcome: SingleOutcome,
}

/// Bob measures every delivered decoy in a uniformly random basis.
pub fn measure_decoys(decoys: &[DecoyPhoton], g: &mut SeededGenerator) -> Vec<DecoyMeasurement> {
    decoys
        .iter()
        .enumerate()
        .filter(|(_, d)| d.delivered())
        .map(|(j, d)| {
            let basis = Basis::random(g);
            DecoyMeasurement { decoy: j, outcome: measure_single(&d.state, Photon::B, basis, g) }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoyCheck {
    pub measured: usize,
    pub matched: usize,
    pub errors: usize,
    /// Errors where the frequency disagreed. Counted in `errors` as well.
    pub freq_mismatches: usize,
    pub qber: f64,
    pub proceed: bool,
}

fn conclude(
    transcript: &mut Transcript,
    check: &str,
    qber: f64,
    threshold: f64,
) -> bool {
    transcript.send(
        Party::Alice,
        MessageKind::OutcomeComparison,
        Payload::ErrorRate { check: check.to_string(), qber },
    );
    let proceed = qber <= threshold;
    if proceed {
        transcript.send(Party::Alice, MessageKind::Proceed, Payload::Reason(check.to_string()));
    } else {
        transcript.send(
            Party::Alice,
            MessageKind::Abort,
            Payload::Reason(format!("{check} error rate {qber} above {threshold}")),
        );
    }
    proceed
}

/// Compare Bob's decoy results against Alice's registry on basis-matched
/// positions. Polarization bit and frequency must both agree.
pub fn decoy_check(
    decoys: &[DecoyPhoton],
    bob: &[DecoyMeasurement],
    threshold: f64,
    transcript: &mut Transcript,
) -> Result<DecoyCheck, ProtocolError> {
    transcript.send(
        Party::Alice,
        MessageKind::Positions,
        Payload::Positions(decoys.iter().map(|d| d.position).collect()),
    );
    transcript.send(
        Party::Bob,
        MessageKind::BasisDeclaration,
        Payload::Bases(bob.iter().map(|m| m.outcome.basis).collect()),
    );
    let matched: Vec<&DecoyMeasurement> = bob
        .iter()
        .filter(|m| decoys[m.decoy].pol.basis() == m.outcome.basis)
        .collect();
    transcript.send(
        Party::Alice,
        MessageKind::Positions,
        Payload::Positions(matched.iter().map(|m| decoys[m.decoy].position).collect()),
    );
    transcript.send(
        Party::Bob,
        MessageKind::OutcomeComparison,
        Payload::Outcomes(matched.iter().map(|m| m.outcome.bit).collect()),
    );
    if matched.is_empty() {
        transcript.send(
            Party::Alice,
            MessageKind::Abort,
            Payload::Reason("decoy check has no basis-matched decoys".into()),
        );
        return Err(ProtocolError::IndeterminateCheck("decoy"));
    }
    let mut errors = 0;
    let mut freq_mismatches = 0;
    for m in &matched {
        let d = &decoys[m.decoy];
        let freq_ok = d.freq == m.outcome.freq;
        if !freq_ok {
            freq_mismatches += 1;
        }
        if !freq_ok || d.pol.bit() != m.outcome.bit {
            errors += 1;
        }
    }
    let qber = errors as f64 / matched.len() as f64;
    let proceed = conclude(transcript, "decoy", qber, threshold);
    Ok(DecoyCheck {
        measured: bob.len(),
        matched: matched.len(),
        errors,
        freq_mismatches,
        qber,
        proceed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WcCheck {
    pub sampled: usize,
    pub matched_z: usize,
    pub errors_z: usize,
    pub matched_x: usize,
    pub errors_x: usize,
    pub qber: f64,
    pub proceed: bool,
}

impl WcCheck {
    pub fn matched(&self) -> usize {
        self.matched_z + self.matched_x
    }

    pub fn z_error_rate(&self) -> Option<f64> {
        (self.matched_z > 0).then(|| self.errors_z as f64 / self.matched_z as f64)
    }

    pub fn x_error_rate(&self) -> Option<f64> {
        (self.matched_x > 0).then(|| self.errors_x as f64 / self.matched_x as f64)
    }
}

fn qubit_eigenstate(basis: Basis, bit: u8) -> Qubit {
    let h = Qubit::basis(0);
    let v = Qubit::basis(1);
    match (basis, bit) {
        (Basis::Z, 0) => h,
        (Basis::Z, _) => v,
        (Basis::X, 0) => FRAC_1_SQRT_2 * (h + v),
        (Basis::X, _) => FRAC_1_SQRT_2 * (h - v),
    }
}

/// Local polarization measurement of both converted photons.
pub fn polarization_pair_measurement(
    basis_a: Basis,
    basis_b: Basis,
) -> ProjectiveMeasurement<4, (u8, u8)> {
    let mut outcomes = Vec::with_capacity(4);
    for bit_a in 0..2u8 {
        for bit_b in 0..2u8 {
            let v: Ket<4> =
                tensor_qubits(&qubit_eigenstate(basis_a, bit_a), &qubit_eigenstate(basis_b, bit_b));
            outcomes.push(((bit_a, bit_b), v));
        }
    }
    ProjectiveMeasurement::from_basis(outcomes).expect("product of qubit bases is complete")
}

/// Whether Alice's and Bob's results should agree in `basis`, given the
/// Bell state left by Alice's Step-1 operation.
pub fn expected_agreement(op_b: Pauli, basis: Basis) -> bool {
    let label = encoding_to_label(EncodingPair::new(Pauli::I, op_b));
    match basis {
        Basis::Z => label.family == Family::Phi,
        Basis::X => label.sign == Sign::Plus,
    }
}

/// Wavelength-converter check. Bob picks positions among delivered pairs,
/// both sides erase frequency and measure in random bases, and matched
/// results are tested against the Bell correlation Alice expects.
/// Sampled pairs are consumed.
pub fn wc_check(
    pairs: &mut [PairRecord],
    sample_fraction: f64,
    threshold: f64,
    transcript: &mut Transcript,
    g: &mut SeededGenerator,
) -> Result<WcCheck, ProtocolError> {
    let candidates: Vec<usize> = (0..pairs.len()).filter(|&i| pairs[i].survives_checks()).collect();
    let count = ((candidates.len() as f64) * sample_fraction).ceil() as usize;
    let count = count.min(candidates.len());
    let mut sampled: Vec<usize> = rand::seq::index::sample(g, candidates.len(), count)
        .into_iter()
        .map(|k| candidates[k])
        .collect();
    sampled.sort_unstable();
    transcript.send(Party::Bob, MessageKind::Positions, Payload::Positions(sampled.clone()));

    let mut alice_bases = Vec::with_capacity(sampled.len());
    let mut bob_bases = Vec::with_capacity(sampled.len());
    let mut check = WcCheck {
        sampled: sampled.len(),
        matched_z: 0,
        errors_z: 0,
        matched_x: 0,
        errors_x: 0,
        qber: 0.0,
        proceed: false,
    };
    for &i in &sampled {
        let pair = &mut pairs[i];
        pair.checked = true;
        let basis_a = Basis::random(g);
        let basis_b = Basis::random(g);
        alice_bases.push(basis_a);
        bob_bases.push(basis_b);
        let converted = wavelength_convert_global(&pair.state)?;
        let ((bit_a, bit_b), _) =
            polarization_pair_measurement(basis_a, basis_b).measure(converted.ket(), g);
        if basis_a != basis_b {
            continue;
        }
        let violated = (bit_a == bit_b) != expected_agreement(pair.encoding.op_b, basis_a);
        match basis_a {
            Basis::Z => {
                check.matched_z += 1;
                check.errors_z += violated as usize;
            }
            Basis::X => {
                check.matched_x += 1;
                check.errors_x += violated as usize;
            }
        }
    }
    transcript.send(Party::Alice, MessageKind::BasisDeclaration, Payload::Bases(alice_bases));
    transcript.send(Party::Bob, MessageKind::BasisDeclaration, Payload::Bases(bob_bases));

    if check.matched() == 0 {
        transcript.send(
            Party::Alice,
            MessageKind::Abort,
            Payload::Reason("wavelength-converter check has no basis-matched pairs".into()),
        );
        return Err(ProtocolError::IndeterminateCheck("wc"));
    }
    check.qber = (check.errors_z + check.errors_x) as f64 / check.matched() as f64;
    check.proceed = conclude(transcript, "wc", check.qber, threshold);
    Ok(check)
}

/// Step 4: complete each surviving pair's encoding on photon `a` and send
/// the `a` sequence. Returns the pair indices in sending order.
pub fn step4_encode_a(
    pairs: &mut [PairRecord],
    channel: &Channel,
    g: &mut SeededGenerator,
) -> Vec<usize> {
    let mut sent = Vec::new();
    for (i, pair) in pairs.iter_mut().enumerate() {
        if !pair.survives_checks() {
            continue;
        }
        let encoded = apply_local(pair.encoding.op_a, Photon::A, &pair.state);
        let (state, rec) = channel.transmit_entangled(&encoded, Photon::A, g);
        pair.state = state;
        pair.a_transit = Some(rec);
        sent.push(i);
    }
    sent
}

/// Step 5: joint measurement of every pair whose two photons reached Bob.
/// Returns `(pair index, decoded codeword)` in pair order.
pub fn step5_decode_and_sift(
    pairs: &[PairRecord],
    device: &MeasurementDevice,
    g: &mut SeededGenerator,
) -> Vec<(usize, Codeword)> {
    pairs
        .iter()
        .enumerate()
        .filter(|(_, p)| p.survives_checks() && p.a_delivered())
        .map(|(i, p)| {
            let (outcome, _) = device.measure(&p.state, g);
            (i, decode(outcome).1)
        })
        .collect()
}
