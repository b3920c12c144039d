use std::ops::{Add, Index, Mul, Neg, Sub};

use num_complex::Complex64;

use super::mode::{joint_index, Mode};

pub type C64 = Complex64;

pub const NORM_TOL: f64 = 1e-12;

/// Fixed-dimension complex state vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ket<const N: usize> {
    amps: [C64; N],
}

/// Single-photon state over the 4 `(pol, freq)` modes.
pub type LocalState = Ket<4>;
/// Two-photon state over the 16-dim product space, index `a * 4 + b`.
pub type JointState = Ket<16>;
/// Polarization qubit.
pub type Qubit = Ket<2>;

impl<const N: usize> Ket<N> {
    pub const DIM: usize = N;

    pub fn zero() -> Self {
        Ket { amps: [C64::new(0.0, 0.0); N] }
    }

    pub fn from_amplitudes(amps: [C64; N]) -> Self {
        Ket { amps }
    }

    /// Build from real amplitudes.
    pub fn from_real(re: [f64; N]) -> Self {
        let mut amps = [C64::new(0.0, 0.0); N];
        for (a, r) in amps.iter_mut().zip(re) {
            *a = C64::new(r, 0.0);
        }
        Ket { amps }
    }

    pub fn basis(i: usize) -> Self {
        assert!(i < N, "basis index {i} out of range for dimension {N}");
        let mut k = Self::zero();
        k.amps[i] = C64::new(1.0, 0.0);
        k
    }

    pub fn amplitudes(&self) -> &[C64; N] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64; N] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL * N as f64
    }

    /// Returns the normalized vector, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n <= f64::EPSILON {
            return None;
        }
        Some(self.scale(C64::new(1.0 / n, 0.0)))
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = *self;
        for a in out.amps.iter_mut() {
            *a *= c;
        }
        out
    }

    /// Indices with non-negligible amplitude.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        (0..N).filter(|&i| self.amps[i].norm() > tol).collect()
    }
}

impl<const N: usize> Index<usize> for Ket<N> {
    type Output = C64;

    fn index(&self, i: usize) -> &C64 {
        &self.amps[i]
    }
}

impl<const N: usize> Add for Ket<N> {
    type Output = Ket<N>;

    fn add(mut self, rhs: Ket<N>) -> Ket<N> {
        for (a, b) in self.amps.iter_mut().zip(rhs.amps) {
            *a += b;
        }
        self
    }
}

impl<const N: usize> Sub for Ket<N> {
    type Output = Ket<N>;

    fn sub(self, rhs: Ket<N>) -> Ket<N> {
        self + (-rhs)
    }
}

impl<const N: usize> Neg for Ket<N> {
    type Output = Ket<N>;

    fn neg(self) -> Ket<N> {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl<const N: usize> Mul<Ket<N>> for f64 {
    type Output = Ket<N>;

    fn mul(self, rhs: Ket<N>) -> Ket<N> {
        rhs.scale(C64::new(self, 0.0))
    }
}

impl LocalState {
    pub fn mode(m: Mode) -> LocalState {
        LocalState::basis(m.index())
    }
}

impl JointState {
    pub fn product_mode(a: Mode, b: Mode) -> JointState {
        JointState::basis(joint_index(a, b))
    }
}

/// Tensor product `a ⊗ b` with joint index `ia * 4 + ib`.
pub fn tensor(a: &LocalState, b: &LocalState) -> JointState {
    let mut out = JointState::zero();
    for ia in 0..4 {
        for ib in 0..4 {
            out.amps[ia * 4 + ib] = a.amps[ia] * b.amps[ib];
        }
    }
    out
}

/// Qubit tensor product, index `ia * 2 + ib`.
pub fn tensor_qubits(a: &Qubit, b: &Qubit) -> Ket<4> {
    let mut out = Ket::<4>::zero();
    for ia in 0..2 {
        for ib in 0..2 {
            out.amps[ia * 2 + ib] = a.amps[ia] * b.amps[ib];
        }
    }
    out
}

/// True iff `|⟨s1|s2⟩| >= 1 - tol`.
pub fn equal_up_to_global_phase<const N: usize>(s1: &Ket<N>, s2: &Ket<N>, tol: f64) -> bool {
    s1.inner(s2).norm() >= 1.0 - tol
}
