use super::ket::{JointState, Ket, LocalState, C64};
use super::mode::Photon;
use super::rng::SeededGenerator;
use crate::error::QuantumError;

/// Completeness and orthogonality tolerance for measurement construction.
pub const COMPLETENESS_TOL: f64 = 1e-12;

/// A complete projective measurement on an `N`-dimensional space.
///
/// Each outcome owns an orthonormal set of vectors spanning its projector's
/// range. Construction rejects sets whose projectors do not sum to the
/// identity.
#[derive(Debug, Clone)]
pub struct ProjectiveMeasurement<const N: usize, L> {
    outcomes: Vec<(L, Vec<Ket<N>>)>,
}

impl<const N: usize, L: Clone> ProjectiveMeasurement<N, L> {
    pub fn new(outcomes: Vec<(L, Vec<Ket<N>>)>) -> Result<Self, QuantumError> {
        let vectors: Vec<&Ket<N>> = outcomes.iter().flat_map(|(_, vs)| vs.iter()).collect();
        for (i, u) in vectors.iter().enumerate() {
            for (j, v) in vectors.iter().enumerate().skip(i) {
                let expected = if i == j { 1.0 } else { 0.0 };
                let ip = u.inner(v);
                if (ip - C64::new(expected, 0.0)).norm() > COMPLETENESS_TOL {
                    return Err(QuantumError::MalformedMeasurement(format!(
                        "basis vectors {i} and {j} have inner product {ip}, expected {expected}"
                    )));
                }
            }
        }
        let covered = vectors.len();
        let m = ProjectiveMeasurement { outcomes };
        let defect = m.completeness_defect();
        if defect > COMPLETENESS_TOL {
            return Err(QuantumError::MalformedMeasurement(format!(
                "projectors miss the identity by {defect:e} ({covered} of {N} dimensions covered)"
            )));
        }
        Ok(m)
    }

    /// Rank-1 measurement in an orthonormal basis, one outcome per vector.
    pub fn from_basis(basis: Vec<(L, Ket<N>)>) -> Result<Self, QuantumError> {
        Self::new(basis.into_iter().map(|(l, v)| (l, vec![v])).collect())
    }

    pub fn outcomes(&self) -> impl Iterator<Item = &L> {
        self.outcomes.iter().map(|(l, _)| l)
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// Max-entry deviation of `Σ P_k` from the identity.
    pub fn completeness_defect(&self) -> f64 {
        let mut sum = vec![[C64::new(0.0, 0.0); N]; N];
        for (_, vs) in &self.outcomes {
            for v in vs {
                let a = v.amplitudes();
                for (r, row) in sum.iter_mut().enumerate() {
                    for (c, cell) in row.iter_mut().enumerate() {
                        *cell += a[r] * a[c].conj();
                    }
                }
            }
        }
        let mut worst: f64 = 0.0;
        for (r, row) in sum.iter().enumerate() {
            for (c, cell) in row.iter().enumerate() {
                let id = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((cell - C64::new(id, 0.0)).norm());
            }
        }
        worst
    }

    fn project(&self, k: usize, s: &Ket<N>) -> Ket<N> {
        let mut out = Ket::<N>::zero();
        for v in &self.outcomes[k].1 {
            out = out + v.scale(v.inner(s));
        }
        out
    }

    // vectors within an outcome are orthonormal, so this equals ‖P_k s‖²
    fn probability(&self, k: usize, s: &Ket<N>) -> f64 {
        self.outcomes[k].1.iter().map(|v| v.inner(s).norm_sqr()).sum()
    }

    /// Born-rule probabilities for each outcome, in construction order.
    pub fn born_distribution(&self, s: &Ket<N>) -> Vec<(L, f64)> {
        (0..self.outcomes.len())
            .map(|k| (self.outcomes[k].0.clone(), self.probability(k, s)))
            .collect()
    }

    /// Sample an outcome and return the renormalized post-measurement state.
    pub fn measure(&self, s: &Ket<N>, g: &mut SeededGenerator) -> (L, Ket<N>) {
        let probs: Vec<f64> = (0..self.outcomes.len()).map(|k| self.probability(k, s)).collect();
        let k = g.sample_weighted(&probs);
        let post = self
            .project(k, s)
            .normalized()
            .expect("sampled outcome has positive probability");
        (self.outcomes[k].0.clone(), post)
    }
}

pub fn born_distribution<const N: usize, L: Clone>(
    s: &Ket<N>,
    m: &ProjectiveMeasurement<N, L>,
) -> Vec<(L, f64)> {
    m.born_distribution(s)
}

pub fn measure_projective<const N: usize, L: Clone>(
    s: &Ket<N>,
    m: &ProjectiveMeasurement<N, L>,
    g: &mut SeededGenerator,
) -> (L, Ket<N>) {
    m.measure(s, g)
}

/// Apply a local projector `P = Σ |v⟩⟨v|` to one photon of a joint state.
fn project_local(vs: &[LocalState], subsystem: Photon, s: &JointState) -> JointState {
    let src = s.amplitudes();
    let mut out = JointState::zero();
    for v in vs {
        let va = v.amplitudes();
        // contract v† with the chosen factor, then re-expand along v
        let mut remote = [C64::new(0.0, 0.0); 4];
        for (other, r) in remote.iter_mut().enumerate() {
            for (local, vl) in va.iter().enumerate() {
                let idx = match subsystem {
                    Photon::A => local * 4 + other,
                    Photon::B => other * 4 + local,
                };
                *r += vl.conj() * src[idx];
            }
        }
        let dst = out.amplitudes_mut();
        for (other, r) in remote.iter().enumerate() {
            for (local, vl) in va.iter().enumerate() {
                let idx = match subsystem {
                    Photon::A => local * 4 + other,
                    Photon::B => other * 4 + local,
                };
                dst[idx] += vl * r;
            }
        }
    }
    out
}

/// Outcome probabilities of measuring one photon of a joint state.
pub fn partial_distribution<L: Clone>(
    s: &JointState,
    subsystem: Photon,
    local: &ProjectiveMeasurement<4, L>,
) -> Vec<(L, f64)> {
    local
        .outcomes
        .iter()
        .map(|(l, vs)| (l.clone(), project_local(vs, subsystem, s).norm_sqr()))
        .collect()
}

/// Measure one photon of a joint state in a complete local measurement.
pub fn partial_measure<L: Clone>(
    s: &JointState,
    subsystem: Photon,
    local: &ProjectiveMeasurement<4, L>,
    g: &mut SeededGenerator,
) -> (L, JointState) {
    let probs: Vec<f64> = partial_distribution(s, subsystem, local)
        .into_iter()
        .map(|(_, p)| p)
        .collect();
    let k = g.sample_weighted(&probs);
    let (label, vs) = &local.outcomes[k];
    let post = project_local(vs, subsystem, s)
        .normalized()
        .expect("sampled outcome has positive probability");
    (label.clone(), post)
}
