//! The two-step protocol: Alice encodes the `b` half of each pair and
//! sends it (with optional decoys), the pair runs through one or both
//! security checks, then Alice completes the encoding on `a` and Bob
//! decodes both photons jointly.

pub mod config;
pub mod session;
pub mod steps;
pub mod transcript;

pub use config::{CheckStrategy, ProtocolConfig};
pub use session::{run_session, run_session_traced, Counts, PairTrace, RunReport, SessionTrace};
pub use steps::{
    decoy_check, insert_decoys, measure_decoys, step1_prepare_and_encode, step4_encode_a,
    step5_decode_and_sift, transmit_b_sequence, wc_check, DecoyCheck, DecoyMeasurement,
    DecoyPhoton, DecoyPolarization, PairRecord, Slot, WcCheck,
};
pub use transcript::{Message, MessageKind, Party, Payload, Transcript};
