//! Small dense complex linear algebra over the labeled two-photon mode
//! space: state vectors, local polarization operations and projective
//! measurements.

pub mod ket;
pub mod measurement;
pub mod mode;
pub mod pauli;
pub mod rng;

pub use ket::{
    equal_up_to_global_phase, tensor, tensor_qubits, JointState, Ket, LocalState, Qubit, C64,
    NORM_TOL,
};
pub use measurement::{
    born_distribution, measure_projective, partial_distribution, partial_measure,
    ProjectiveMeasurement,
};
pub use mode::{joint_index, Freq, Mode, Photon, Pol};
pub use pauli::{apply_local, apply_local_matrix, Matrix2, Pauli};
pub use rng::SeededGenerator;
