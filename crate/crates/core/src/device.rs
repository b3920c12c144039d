//! Bob's joint measurement apparatus and the single-photon decoy detector.
//!
//! Each photon enters a wavelength-division multiplexer and a polarizing
//! beam splitter. Together these route it to one of two output ports
//! (photon `a` to ports 1/3, photon `b` to ports 2/4). Each port holds one
//! H-polarized and one V-polarized mode. A wavelength converter erases the
//! frequency of the mode that reached the port. A quarter-wave plate and
//! a ±45° beam splitter then measure σx. Per photon this is a complete
//! 4-outcome measurement with rank-1 projectors
//! `(|h⟩ ± |v⟩)/√2`, where `h` and `v` are the port's two modes. The joint
//! device is their product: 16 rank-1 outcomes over the two-photon space,
//! so disturbed states outside the DEP basis still produce a click.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dep::{label_to_codeword, Codeword, DepLabel, Family, Sign};
use crate::error::QuantumError;
use crate::quantum::{
    tensor, Freq, JointState, Ket, LocalState, Mode, Photon, Pol, ProjectiveMeasurement, Qubit,
    SeededGenerator, C64,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Port {
    P1,
    P2,
    P3,
    P4,
}

impl Port {
    pub fn number(self) -> u8 {
        match self {
            Port::P1 => 1,
            Port::P2 => 2,
            Port::P3 => 3,
            Port::P4 => 4,
        }
    }

    pub fn photon(self) -> Photon {
        match self {
            Port::P1 | Port::P3 => Photon::A,
            Port::P2 | Port::P4 => Photon::B,
        }
    }

    pub fn ports_of(photon: Photon) -> [Port; 2] {
        match photon {
            Photon::A => [Port::P1, Port::P3],
            Photon::B => [Port::P2, Port::P4],
        }
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Routing rule from a photon mode to a device port.
pub type PortMap = fn(Photon, Mode) -> Port;

/// Standard routing: a mode goes to the "same" port as the DEP terms that
/// share it (`|H,ωs⟩`, `|V,ωs'⟩` to port 1; `|H,ωi⟩`, `|V,ωi'⟩` to port 2).
pub fn port_of(photon: Photon, mode: Mode) -> Port {
    let aligned = matches!(
        (mode.pol, mode.freq),
        (Pol::H, Freq::Plain) | (Pol::V, Freq::Primed)
    );
    match (photon, aligned) {
        (Photon::A, true) => Port::P1,
        (Photon::A, false) => Port::P3,
        (Photon::B, true) => Port::P2,
        (Photon::B, false) => Port::P4,
    }
}

/// σx eigenvalue sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum XResult {
    Plus,
    Minus,
}

impl XResult {
    pub fn factor(self) -> f64 {
        match self {
            XResult::Plus => 1.0,
            XResult::Minus => -1.0,
        }
    }

    fn symbol(self) -> char {
        match self {
            XResult::Plus => '+',
            XResult::Minus => '-',
        }
    }
}

/// Full record of one joint detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DeviceOutcome {
    pub port_a: Port,
    pub port_b: Port,
    pub x_a: XResult,
    pub x_b: XResult,
}

impl fmt::Display for DeviceOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{},{})",
            self.port_a,
            self.port_b,
            self.x_a.symbol(),
            self.x_b.symbol()
        )
    }
}

/// Ports triggered by each family.
pub const PORT_TABLE: [(Family, Port, Port); 4] = [
    (Family::Phi, Port::P1, Port::P2),
    (Family::Psi, Port::P1, Port::P4),
    (Family::Gamma, Port::P3, Port::P2),
    (Family::Upsilon, Port::P3, Port::P4),
];

/// Whether parallel σx results (`xA == xB`) decode to the `+` sign, per
/// family. Obtained by expanding each DEP state in the device basis; the
/// unit tests re-derive it.
pub const PARALLEL_IS_PLUS: [(Family, bool); 4] = [
    (Family::Phi, true),
    (Family::Psi, true),
    (Family::Gamma, true),
    (Family::Upsilon, true),
];

pub fn family_of_ports(port_a: Port, port_b: Port) -> Option<Family> {
    PORT_TABLE
        .iter()
        .find(|(_, a, b)| *a == port_a && *b == port_b)
        .map(|(f, _, _)| *f)
}

pub fn decode(o: DeviceOutcome) -> (DepLabel, Codeword) {
    let family = family_of_ports(o.port_a, o.port_b)
        .unwrap_or_else(|| panic!("ports {} and {} are not a device outcome", o.port_a, o.port_b));
    let parallel_is_plus = PARALLEL_IS_PLUS
        .iter()
        .find(|(f, _)| *f == family)
        .map(|(_, p)| *p)
        .expect("every family has a sign rule");
    let parallel = o.x_a == o.x_b;
    let sign = if parallel == parallel_is_plus { Sign::Plus } else { Sign::Minus };
    let label = DepLabel::new(family, sign);
    (label, label_to_codeword(label))
}

/// The `(H-mode, V-mode)` pair routed to `port`.
fn port_modes(port_map: PortMap, port: Port) -> Result<(Mode, Mode), QuantumError> {
    let photon = port.photon();
    let modes: Vec<Mode> = Mode::all().filter(|&m| port_map(photon, m) == port).collect();
    for m in Mode::all() {
        let p = port_map(photon, m);
        if p.photon() != photon {
            return Err(QuantumError::MalformedMeasurement(format!(
                "photon {photon} mode {} routed to port {p}, which belongs to the other photon",
                m.label(photon)
            )));
        }
    }
    let h = modes.iter().filter(|m| m.pol == Pol::H).collect::<Vec<_>>();
    let v = modes.iter().filter(|m| m.pol == Pol::V).collect::<Vec<_>>();
    match (h.as_slice(), v.as_slice()) {
        ([h], [v]) => Ok((**h, **v)),
        _ => Err(QuantumError::MalformedMeasurement(format!(
            "port {port} must receive exactly one H and one V mode, got {}",
            modes.iter().map(|m| m.label(photon)).collect::<Vec<_>>().join(" ")
        ))),
    }
}

/// Per-port frequency erasure: the port's H mode becomes `|H⟩`, its V mode
/// `|V⟩`.
pub fn convert_in_port_with(
    port_map: PortMap,
    port: Port,
    content: &LocalState,
) -> Result<Qubit, QuantumError> {
    let (h, v) = port_modes(port_map, port)?;
    for m in Mode::all() {
        if m != h && m != v && content[m.index()].norm() > 1e-12 {
            return Err(QuantumError::InvalidInput(format!(
                "amplitude on {} is outside port {port}",
                m.label(port.photon())
            )));
        }
    }
    Ok(Qubit::from_amplitudes([content[h.index()], content[v.index()]]))
}

pub fn convert_in_port(port: Port, content: &LocalState) -> Result<Qubit, QuantumError> {
    convert_in_port_with(port_of, port, content)
}

/// Two-photon polarization state after frequency erasure, index
/// `pol_a * 2 + pol_b` over `{HH, HV, VH, VV}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationPairState(pub Ket<4>);

impl PolarizationPairState {
    pub fn ket(&self) -> &Ket<4> {
        &self.0
    }

    pub fn amplitude(&self, a: Pol, b: Pol) -> C64 {
        self.0[a.index() * 2 + b.index()]
    }

    /// `(|HH⟩ ± |VV⟩)/√2` for Φ, `(|HV⟩ ± |VH⟩)/√2` for Ψ.
    pub fn bell(correlated: bool, sign: Sign) -> PolarizationPairState {
        let (i, j) = if correlated { (0, 3) } else { (1, 2) };
        let mut k = Ket::<4>::zero();
        k.amplitudes_mut()[i] = C64::new(FRAC_1_SQRT_2, 0.0);
        k.amplitudes_mut()[j] = C64::new(sign.factor() * FRAC_1_SQRT_2, 0.0);
        PolarizationPairState(k)
    }
}

/// Erase both photons' frequency labels (`ωs, ωs' → ωs0`, `ωi, ωi' → ωi0`),
/// adding amplitudes that share a polarization pair.
///
/// The map is norm-preserving on states where each polarization pair
/// occurs with at most one frequency pair, which covers the DEP basis and
/// every intercept-resend output. Other inputs are renormalized; inputs
/// whose amplitudes cancel completely are rejected.
pub fn wavelength_convert_global(s: &JointState) -> Result<PolarizationPairState, QuantumError> {
    let mut out = Ket::<4>::zero();
    for ma in Mode::all() {
        for mb in Mode::all() {
            let amp = s[ma.index() * 4 + mb.index()];
            out.amplitudes_mut()[ma.pol.index() * 2 + mb.pol.index()] += amp;
        }
    }
    let k = out.normalized().ok_or_else(|| {
        QuantumError::InvalidInput("frequency erasure annihilates the state".into())
    })?;
    Ok(PolarizationPairState(k))
}

/// The composite Bell-state analyzer.
#[derive(Debug, Clone)]
pub struct MeasurementDevice {
    measurement: ProjectiveMeasurement<16, DeviceOutcome>,
}

impl MeasurementDevice {
    pub fn new() -> MeasurementDevice {
        Self::with_port_map(port_of).expect("standard routing forms a complete measurement")
    }

    /// Build the device for an arbitrary routing rule. Fails when the rule
    /// does not give every port one H and one V mode of its own photon.
    pub fn with_port_map(port_map: PortMap) -> Result<MeasurementDevice, QuantumError> {
        let local = |photon: Photon| -> Result<Vec<(Port, XResult, LocalState)>, QuantumError> {
            let mut out = Vec::with_capacity(4);
            for port in Port::ports_of(photon) {
                let (h, v) = port_modes(port_map, port)?;
                for x in [XResult::Plus, XResult::Minus] {
                    let vec = FRAC_1_SQRT_2 * (LocalState::mode(h) + x.factor() * LocalState::mode(v));
                    out.push((port, x, vec));
                }
            }
            Ok(out)
        };
        let a_basis = local(Photon::A)?;
        let b_basis = local(Photon::B)?;
        let mut basis = Vec::with_capacity(16);
        for (port_a, x_a, va) in &a_basis {
            for (port_b, x_b, vb) in &b_basis {
                let outcome = DeviceOutcome { port_a: *port_a, port_b: *port_b, x_a: *x_a, x_b: *x_b };
                basis.push((outcome, tensor(va, vb)));
            }
        }
        Ok(MeasurementDevice { measurement: ProjectiveMeasurement::from_basis(basis)? })
    }

    pub fn measurement(&self) -> &ProjectiveMeasurement<16, DeviceOutcome> {
        &self.measurement
    }

    pub fn distribution(&self, s: &JointState) -> Vec<(DeviceOutcome, f64)> {
        self.measurement.born_distribution(s)
    }

    pub fn measure(&self, s: &JointState, g: &mut SeededGenerator) -> (DeviceOutcome, JointState) {
        self.measurement.measure(s, g)
    }
}

impl Default for MeasurementDevice {
    fn default() -> Self {
        MeasurementDevice::new()
    }
}

pub fn device_measure(s: &JointState, g: &mut SeededGenerator) -> (DeviceOutcome, JointState) {
    MeasurementDevice::new().measure(s, g)
}

/// Single-photon polarization basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    pub fn random(g: &mut SeededGenerator) -> Basis {
        if g.coin() {
            Basis::X
        } else {
            Basis::Z
        }
    }
}

/// Result of a single-photon detection: frequency from the WDM and one
/// polarization bit (`0` = H or +, `1` = V or −).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SingleOutcome {
    pub basis: Basis,
    pub bit: u8,
    pub freq: Freq,
}

/// Eigenstate of `basis` with polarization bit `bit` at frequency `freq`.
pub fn single_photon_state(basis: Basis, bit: u8, freq: Freq) -> LocalState {
    let h = LocalState::mode(Mode::new(Pol::H, freq));
    let v = LocalState::mode(Mode::new(Pol::V, freq));
    match (basis, bit) {
        (Basis::Z, 0) => h,
        (Basis::Z, _) => v,
        (Basis::X, 0) => FRAC_1_SQRT_2 * (h + v),
        (Basis::X, _) => FRAC_1_SQRT_2 * (h - v),
    }
}

/// WDM plus polarization analysis in `basis`, as a 4-outcome measurement.
pub fn single_photon_measurement(basis: Basis) -> ProjectiveMeasurement<4, SingleOutcome> {
    let mut outcomes = Vec::with_capacity(4);
    for freq in Freq::ALL {
        for bit in 0..2u8 {
            outcomes.push((SingleOutcome { basis, bit, freq }, single_photon_state(basis, bit, freq)));
        }
    }
    ProjectiveMeasurement::from_basis(outcomes).expect("single-photon bases are orthonormal")
}

/// Measure a lone photon (a decoy) in `basis`.
pub fn measure_single(
    s: &LocalState,
    photon: Photon,
    basis: Basis,
    g: &mut SeededGenerator,
) -> SingleOutcome {
    // both photons share the same local structure; `photon` only selects
    // which WDM the photon passes through
    let _ = photon;
    single_photon_measurement(basis).measure(s, g).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dep::{dep_basis, Codeword};
    use crate::quantum::equal_up_to_global_phase;

    fn l(family: Family, sign: Sign) -> DepLabel {
        DepLabel::new(family, sign)
    }

    #[test]
    fn routing_examples() {
        use Freq::*;
        assert_eq!(port_of(Photon::A, Mode::new(Pol::H, Plain)), Port::P1);
        assert_eq!(port_of(Photon::A, Mode::new(Pol::V, Plain)), Port::P3);
        assert_eq!(port_of(Photon::B, Mode::new(Pol::V, Plain)), Port::P4);
        assert_eq!(port_of(Photon::A, Mode::new(Pol::V, Primed)), Port::P1);
        assert_eq!(port_of(Photon::A, Mode::new(Pol::H, Primed)), Port::P3);
        assert_eq!(port_of(Photon::B, Mode::new(Pol::H, Plain)), Port::P2);
        assert_eq!(port_of(Photon::B, Mode::new(Pol::V, Primed)), Port::P2);
        assert_eq!(port_of(Photon::B, Mode::new(Pol::H, Primed)), Port::P4);
    }

    #[test]
    fn every_dep_term_routes_to_its_table_ports() {
        for (family, pa, pb) in PORT_TABLE {
            for (ma, mb) in family.terms() {
                assert_eq!(port_of(Photon::A, ma), pa, "{family:?}");
                assert_eq!(port_of(Photon::B, mb), pb, "{family:?}");
            }
        }
    }

    #[test]
    fn port_conversion() {
        let hs = LocalState::mode(Mode::new(Pol::H, Freq::Plain));
        let vs1 = LocalState::mode(Mode::new(Pol::V, Freq::Primed));
        assert_eq!(convert_in_port(Port::P1, &hs).unwrap(), Qubit::basis(0));

        let sup = FRAC_1_SQRT_2 * (hs + vs1);
        let q = convert_in_port(Port::P1, &sup).unwrap();
        assert!(equal_up_to_global_phase(&q, &(FRAC_1_SQRT_2 * (Qubit::basis(0) + Qubit::basis(1))), 1e-15));
        assert!((q.norm() - 1.0).abs() < 1e-12);

        assert!(matches!(convert_in_port(Port::P3, &hs), Err(QuantumError::InvalidInput(_))));
    }

    #[test]
    fn joint_port_conversion_of_psi_gives_bell() {
        for sign in [Sign::Plus, Sign::Minus] {
            let s = dep_basis(l(Family::Psi, sign));
            // Ψ lives in ports (1,4); convert each photon's port content
            let mut pair = Ket::<4>::zero();
            for ia in 0..4 {
                for ib in 0..4 {
                    let amp = s[ia * 4 + ib];
                    if amp.norm() == 0.0 {
                        continue;
                    }
                    let qa = convert_in_port(Port::P1, &LocalState::basis(ia)).unwrap();
                    let qb = convert_in_port(Port::P4, &LocalState::basis(ib)).unwrap();
                    pair = pair + crate::quantum::tensor_qubits(&qa, &qb).scale(amp);
                }
            }
            let want = PolarizationPairState::bell(false, sign);
            assert!(equal_up_to_global_phase(&pair, want.ket(), 1e-12));
        }
    }

    #[test]
    fn global_conversion_examples() {
        let phi_p = wavelength_convert_global(&dep_basis(l(Family::Phi, Sign::Plus))).unwrap();
        assert!(equal_up_to_global_phase(phi_p.ket(), PolarizationPairState::bell(true, Sign::Plus).ket(), 1e-12));
        let psi_m = wavelength_convert_global(&dep_basis(l(Family::Psi, Sign::Minus))).unwrap();
        assert!(equal_up_to_global_phase(psi_m.ket(), PolarizationPairState::bell(false, Sign::Minus).ket(), 1e-12));
        let gamma_p = wavelength_convert_global(&dep_basis(l(Family::Gamma, Sign::Plus))).unwrap();
        assert!(equal_up_to_global_phase(gamma_p.ket(), PolarizationPairState::bell(false, Sign::Plus).ket(), 1e-12));
    }

    #[test]
    fn global_conversion_rejects_cancelling_input() {
        let a = JointState::basis(0);
        let b = JointState::basis(5); // (H,ωs')(H,ωi') also erases to HH
        assert!(wavelength_convert_global(&(FRAC_1_SQRT_2 * (a - b))).is_err());
    }

    #[test]
    fn device_is_complete() {
        let dev = MeasurementDevice::new();
        assert_eq!(dev.measurement().len(), 16);
        assert!(dev.measurement().completeness_defect() < 1e-12);
    }

    #[test]
    fn sign_rule_table_matches_expansion() {
        let dev = MeasurementDevice::new();
        for (family, parallel_is_plus) in PARALLEL_IS_PLUS {
            let dist = dev.distribution(&dep_basis(l(family, Sign::Plus)));
            let parallel_mass: f64 = dist
                .iter()
                .filter(|(o, _)| o.x_a == o.x_b)
                .map(|(_, p)| p)
                .sum();
            let expected = if parallel_is_plus { 1.0 } else { 0.0 };
            assert!((parallel_mass - expected).abs() < 1e-12, "{family:?}");
        }
    }

    #[test]
    fn every_dep_state_decodes_deterministically() {
        let dev = MeasurementDevice::new();
        for label in DepLabel::all() {
            for (o, p) in dev.distribution(&dep_basis(label)) {
                if p > 1e-12 {
                    assert_eq!(decode(o).0, label, "{o}");
                    assert!((p - 0.5).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn decode_examples() {
        use XResult::*;
        let o = |pa, pb, xa, xb| DeviceOutcome { port_a: pa, port_b: pb, x_a: xa, x_b: xb };
        assert_eq!(
            decode(o(Port::P1, Port::P2, Plus, Plus)),
            (l(Family::Phi, Sign::Plus), Codeword::new(0b010))
        );
        assert_eq!(
            decode(o(Port::P1, Port::P4, Minus, Plus)),
            (l(Family::Psi, Sign::Minus), Codeword::new(0b001))
        );
        assert_eq!(decode(o(Port::P3, Port::P4, Plus, Minus)).0.family, Family::Upsilon);
    }

    #[test]
    fn bad_port_map_is_rejected() {
        fn everything_to_one(p: Photon, _: Mode) -> Port {
            match p {
                Photon::A => Port::P1,
                Photon::B => Port::P2,
            }
        }
        assert!(MeasurementDevice::with_port_map(everything_to_one).is_err());
    }

    #[test]
    fn single_photon_examples() {
        let mut g = SeededGenerator::new(9, 0);
        let h = single_photon_state(Basis::Z, 0, Freq::Plain);
        for _ in 0..100 {
            let o = measure_single(&h, Photon::B, Basis::Z, &mut g);
            assert_eq!((o.bit, o.freq), (0, Freq::Plain));
        }
        let minus = single_photon_state(Basis::X, 1, Freq::Primed);
        for _ in 0..100 {
            let o = measure_single(&minus, Photon::B, Basis::X, &mut g);
            assert_eq!((o.bit, o.freq), (1, Freq::Primed));
        }
        let plus = single_photon_state(Basis::X, 0, Freq::Plain);
        let dist = single_photon_measurement(Basis::Z).born_distribution(&plus);
        for (o, p) in dist {
            let want = if o.freq == Freq::Plain { 0.5 } else { 0.0 };
            assert!((p - want).abs() < 1e-12);
        }
    }
}
