use serde::{Deserialize, Serialize};

use crate::channel::{Channel, EveRecord};
use crate::dep::{Codeword, EncodingPair};
use crate::device::MeasurementDevice;
use crate::error::ProtocolError;
use crate::quantum::SeededGenerator;

use super::config::ProtocolConfig;
use super::steps::{
    decoy_check, insert_decoys, measure_decoys, step1_prepare_and_encode, step4_encode_a,
    step5_decode_and_sift, transmit_b_sequence, wc_check, DecoyCheck, WcCheck,
};
use super::transcript::{MessageKind, Party, Payload, Transcript};

/// Generator stream per protocol stage. Each stage draws from its own
/// stream so that, for example, enabling decoys does not reshuffle
/// Alice's codewords.
mod stream {
    pub const ENCODE: u64 = 1;
    pub const DECOYS: u64 = 2;
    pub const CHANNEL_B: u64 = 3;
    pub const BOB_DECOYS: u64 = 4;
    pub const WC_CHECK: u64 = 5;
    pub const CHANNEL_A: u64 = 6;
    pub const DEVICE: u64 = 7;
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub pairs: usize,
    pub decoys: usize,
    /// Pairs consumed by the wavelength-converter check.
    pub checked: usize,
    /// Pairs with a photon lost in either transmission.
    pub lost: usize,
    pub decoys_lost: usize,
    /// Pairs contributing key bits.
    pub key_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub decoy_qber: Option<f64>,
    pub wc_qber: Option<f64>,
    pub aborted: bool,
    pub abort_reason: Option<String>,
    pub alice_key: Vec<bool>,
    pub bob_key: Vec<bool>,
    /// Fraction of mismatched key bits; 0 when there is no key.
    pub final_qber: f64,
    pub counts: Counts,
    pub decoy_check: Option<DecoyCheck>,
    pub wc_check: Option<WcCheck>,
    pub config: ProtocolConfig,
    pub seed: u64,
}

impl RunReport {
    pub fn key_len(&self) -> usize {
        self.alice_key.len()
    }
}

/// Ground truth for one pair, for analysis outside the protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct PairTrace {
    pub codeword: Codeword,
    pub encoding: EncodingPair,
    pub eve_b: Option<EveRecord>,
    pub eve_a: Option<EveRecord>,
    pub checked: bool,
    pub bob_codeword: Option<Codeword>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionTrace {
    pub pairs: Vec<PairTrace>,
    pub transcript: Transcript,
}

pub fn run_session(config: &ProtocolConfig) -> Result<RunReport, ProtocolError> {
    run_session_traced(config).map(|(r, _)| r)
}

pub fn run_session_traced(
    config: &ProtocolConfig,
) -> Result<(RunReport, SessionTrace), ProtocolError> {
    config.validate()?;
    let gen = |s| SeededGenerator::new(config.seed, s);
    let channel = Channel::new(config.channel)?;
    let mut transcript = Transcript::new();

    // Step 1
    let (mut pairs, b_sequence) = step1_prepare_and_encode(config.n_pairs, &mut gen(stream::ENCODE));
    let (b_sequence, mut decoys) = if config.check_strategy.uses_decoys() {
        insert_decoys(b_sequence, config.decoy_fraction, &mut gen(stream::DECOYS))
    } else {
        (b_sequence, Vec::new())
    };
    transmit_b_sequence(&b_sequence, &mut pairs, &mut decoys, &channel, &mut gen(stream::CHANNEL_B));

    // Step 2: Bob reports which slots arrived
    let arrived: Vec<usize> = b_sequence
        .iter()
        .enumerate()
        .filter(|(_, slot)| match **slot {
            super::steps::Slot::Pair(i) => pairs[i].b_delivered(),
            super::steps::Slot::Decoy(j) => decoys[j].delivered(),
        })
        .map(|(k, _)| k)
        .collect();
    transcript.send(Party::Bob, MessageKind::Positions, Payload::Positions(arrived));

    // Step 3
    let mut abort_reason: Option<String> = None;
    let mut decoy_result = None;
    let mut wc_result = None;
    if config.check_strategy.uses_decoys() {
        let bob = measure_decoys(&decoys, &mut gen(stream::BOB_DECOYS));
        match decoy_check(&decoys, &bob, config.qber_threshold, &mut transcript) {
            Ok(c) => {
                if !c.proceed {
                    abort_reason = Some(format!("decoy error rate {} above threshold", c.qber));
                }
                decoy_result = Some(c);
            }
            Err(e) => abort_reason = Some(e.to_string()),
        }
    }
    if config.check_strategy.uses_converter() {
        match wc_check(
            &mut pairs,
            config.check_sample_fraction,
            config.qber_threshold,
            &mut transcript,
            &mut gen(stream::WC_CHECK),
        ) {
            Ok(c) => {
                if !c.proceed && abort_reason.is_none() {
                    abort_reason =
                        Some(format!("wavelength-converter error rate {} above threshold", c.qber));
                }
                wc_result = Some(c);
            }
            Err(e @ ProtocolError::IndeterminateCheck(_)) => {
                abort_reason.get_or_insert(e.to_string());
            }
            Err(e) => return Err(e),
        }
    }

    let mut alice_key = Vec::new();
    let mut bob_key = Vec::new();
    let mut bob_codewords = vec![None; pairs.len()];
    if abort_reason.is_none() {
        // Step 4
        let sent = step4_encode_a(&mut pairs, &channel, &mut gen(stream::CHANNEL_A));
        let arrived: Vec<usize> = sent.into_iter().filter(|&i| pairs[i].a_delivered()).collect();
        transcript.send(Party::Bob, MessageKind::Positions, Payload::Positions(arrived));

        // Step 5
        let device = MeasurementDevice::new();
        for (i, c) in step5_decode_and_sift(&pairs, &device, &mut gen(stream::DEVICE)) {
            alice_key.extend(pairs[i].codeword.to_bits());
            bob_key.extend(c.to_bits());
            bob_codewords[i] = Some(c);
        }
    }

    let mismatches = alice_key.iter().zip(&bob_key).filter(|(a, b)| a != b).count();
    let final_qber = if alice_key.is_empty() {
        0.0
    } else {
        mismatches as f64 / alice_key.len() as f64
    };
    let counts = Counts {
        pairs: pairs.len(),
        decoys: decoys.len(),
        checked: pairs.iter().filter(|p| p.checked).count(),
        lost: pairs
            .iter()
            .filter(|p| !p.b_delivered() || (p.a_transit.is_some() && !p.a_delivered()))
            .count(),
        decoys_lost: decoys.iter().filter(|d| !d.delivered()).count(),
        key_pairs: alice_key.len() / 3,
    };
    let report = RunReport {
        decoy_qber: decoy_result.map(|c| c.qber),
        wc_qber: wc_result.map(|c| c.qber),
        aborted: abort_reason.is_some(),
        abort_reason,
        alice_key,
        bob_key,
        final_qber,
        counts,
        decoy_check: decoy_result,
        wc_check: wc_result,
        config: *config,
        seed: config.seed,
    };
    let trace = SessionTrace {
        pairs: pairs
            .iter()
            .zip(bob_codewords)
            .map(|(p, bob_codeword)| PairTrace {
                codeword: p.codeword,
                encoding: p.encoding,
                eve_b: p.b_transit.and_then(|t| t.eve),
                eve_a: p.a_transit.and_then(|t| t.eve),
                checked: p.checked,
                bob_codeword,
            })
            .collect(),
        transcript,
    };
    Ok((report, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{ChannelConfig, EveConfig, EveStrategy, EveTargets};
    use crate::protocol::config::CheckStrategy;

    fn cfg(n: usize, check: CheckStrategy) -> ProtocolConfig {
        ProtocolConfig { n_pairs: n, check_strategy: check, seed: 99, ..ProtocolConfig::default() }
    }

    #[test]
    fn ideal_sessions_agree_for_every_strategy() {
        for check in [CheckStrategy::Decoy, CheckStrategy::WavelengthConverter, CheckStrategy::Both] {
            let r = run_session(&cfg(2000, check)).unwrap();
            assert!(!r.aborted, "{check}: {:?}", r.abort_reason);
            assert_eq!(r.alice_key, r.bob_key);
            assert_eq!(r.final_qber, 0.0);
            assert_eq!(r.key_len(), 3 * (r.counts.pairs - r.counts.checked));
            assert_eq!(r.decoy_qber.is_some(), check.uses_decoys());
            assert_eq!(r.wc_qber.is_some(), check.uses_converter());
        }
    }

    #[test]
    fn eve_triggers_abort() {
        let eve = EveConfig { strategy: EveStrategy::RandomZx, targets: EveTargets::B };
        let config = ProtocolConfig {
            channel: ChannelConfig { loss_probability: 0.0, eve: Some(eve) },
            ..cfg(3000, CheckStrategy::Decoy)
        };
        let r = run_session(&config).unwrap();
        assert!(r.aborted);
        assert!(r.alice_key.is_empty() && r.bob_key.is_empty());
        assert!(r.decoy_qber.unwrap() > 0.15);
    }

    #[test]
    fn decoy_check_without_decoys_aborts() {
        let config = ProtocolConfig { decoy_fraction: 0.0, ..cfg(100, CheckStrategy::Decoy) };
        let r = run_session(&config).unwrap();
        assert!(r.aborted);
        assert_eq!(r.decoy_qber, None);
    }

    #[test]
    fn loss_is_excluded_from_key() {
        let config = ProtocolConfig {
            channel: ChannelConfig { loss_probability: 0.2, eve: None },
            ..cfg(3000, CheckStrategy::Both)
        };
        let (r, trace) = run_session_traced(&config).unwrap();
        assert!(!r.aborted);
        assert!(r.counts.lost > 0);
        assert_eq!(r.alice_key, r.bob_key);
        let key_pairs = trace.pairs.iter().filter(|p| p.bob_codeword.is_some()).count();
        assert_eq!(key_pairs, r.counts.key_pairs);
        assert_eq!(r.counts.key_pairs, r.counts.pairs - r.counts.checked - r.counts.lost);
        assert!(trace.pairs.iter().all(|p| !(p.checked && p.bob_codeword.is_some())));
    }

    #[test]
    fn invalid_config_is_rejected() {
        let config = ProtocolConfig { n_pairs: 0, ..ProtocolConfig::default() };
        assert!(matches!(run_session(&config), Err(ProtocolError::InvalidConfig(_))));
    }

    #[test]
    fn deterministic_given_seed() {
        let eve = EveConfig { strategy: EveStrategy::X, targets: EveTargets::Both };
        let config = ProtocolConfig {
            channel: ChannelConfig { loss_probability: 0.1, eve: Some(eve) },
            qber_threshold: 0.9,
            ..cfg(1000, CheckStrategy::Both)
        };
        let a = serde_json::to_string(&run_session(&config).unwrap()).unwrap();
        let b = serde_json::to_string(&run_session(&config).unwrap()).unwrap();
        assert_eq!(a, b);
        let other = ProtocolConfig { seed: 100, ..config };
        assert_ne!(a, serde_json::to_string(&run_session(&other).unwrap()).unwrap());
    }
}
