//! Exhaustive machine check of the encoding table and the device's port
//! table.
//!
//! The printed encoding table has two blocks. The lower block (operations
//! with `σz` or `iσy` on photon `a`) repeats keys `000`–`111` against a
//! shifted state column, e.g. `000  σz⊗I  Ψ−`, although `Ψ−` is `001` in
//! the upper block. The state column is what Bob can decode, so the
//! checks compare states and report the lower-block keys as corrected.

use std::fmt::Write as _;

use crate::dep::{label_to_codeword, psi_plus, Codeword, DepLabel, Family, Sign, TABLE_TOL};
use crate::device::{decode, port_of, MeasurementDevice, PortMap, PORT_TABLE};
use crate::quantum::{apply_local_matrix, equal_up_to_global_phase, Matrix2, Pauli, Photon};

/// Operator and routing conventions under test. Tests swap these to
/// inject faults.
#[derive(Clone, Copy)]
pub struct Conventions {
    pub pauli: fn(Pauli) -> Matrix2,
    pub port_map: PortMap,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions { pauli: Pauli::matrix, port_map: port_of }
    }
}

/// One printed row: key, operation on `a`, operation on `b`, state.
pub struct TableRow {
    pub printed_key: u8,
    pub op_a: Pauli,
    pub op_b: Pauli,
    pub state: DepLabel,
}

const fn row(printed_key: u8, op_a: Pauli, op_b: Pauli, family: Family, sign: Sign) -> TableRow {
    TableRow { printed_key, op_a, op_b, state: DepLabel::new(family, sign) }
}

/// The encoding table as printed, including the inconsistent lower-block
/// keys.
pub const ENCODING_TABLE: [TableRow; 16] = {
    use Family::*;
    use Pauli::*;
    use Sign::*;
    [
        row(0b000, I, I, Psi, Plus),
        row(0b001, I, Z, Psi, Minus),
        row(0b010, I, X, Phi, Plus),
        row(0b011, I, IY, Phi, Minus),
        row(0b100, X, I, Upsilon, Plus),
        row(0b101, X, Z, Upsilon, Minus),
        row(0b110, X, X, Gamma, Plus),
        row(0b111, X, IY, Gamma, Minus),
        row(0b000, Z, I, Psi, Minus),
        row(0b001, Z, Z, Psi, Plus),
        row(0b010, Z, X, Phi, Minus),
        row(0b011, Z, IY, Phi, Plus),
        row(0b100, IY, I, Upsilon, Minus),
        row(0b101, IY, Z, Upsilon, Plus),
        row(0b110, IY, X, Gamma, Minus),
        row(0b111, IY, IY, Gamma, Plus),
    ]
};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub group: &'static str,
    pub name: String,
    pub passed: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerificationReport {
    pub rows: Vec<CheckRow>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| !r.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut group = "";
        for r in &self.rows {
            if r.group != group {
                group = r.group;
                let _ = writeln!(out, "{group}");
            }
            let mark = if r.passed { "PASS" } else { "FAIL" };
            let _ = write!(out, "  [{mark}] {}", r.name);
            if let Some(note) = &r.note {
                let _ = write!(out, "  ({note})");
            }
            out.push('\n');
        }
        let passed = self.rows.iter().filter(|r| r.passed).count();
        let _ = writeln!(out, "summary: {passed}/{} checks passed", self.rows.len());
        for r in self.failures() {
            let _ = writeln!(out, "failed: {} / {}", r.group, r.name);
        }
        out
    }
}

const GROUP_ENCODING: &str = "encoding table: operation pairs applied to Ψ+";
const GROUP_CODEWORDS: &str = "codeword map";
const GROUP_PORTS: &str = "port table: triggered ports per state";
const GROUP_DISCRIMINATION: &str = "eight-state discrimination";

pub fn verify_tables(conv: &Conventions) -> VerificationReport {
    let mut rows = Vec::new();
    let source = psi_plus();

    for r in &ENCODING_TABLE {
        let state = apply_local_matrix(
            &(conv.pauli)(r.op_a),
            Photon::A,
            &apply_local_matrix(&(conv.pauli)(r.op_b), Photon::B, &source),
        );
        let passed = equal_up_to_global_phase(&state, &crate::dep::dep_basis(r.state), TABLE_TOL);
        let canonical = label_to_codeword(r.state);
        let printed = Codeword::new(r.printed_key);
        let note = (canonical != printed)
            .then(|| format!("printed key {printed} corrected to {canonical}, the key of {}", r.state));
        rows.push(CheckRow {
            group: GROUP_ENCODING,
            name: format!("{canonical}  {}⊗{}  -> {}", r.op_a, r.op_b, r.state),
            passed,
            note,
        });
    }

    let mut seen: Vec<Codeword> = DepLabel::all().into_iter().map(label_to_codeword).collect();
    seen.sort();
    seen.dedup();
    let round_trip = Codeword::all().all(|c| label_to_codeword(c.label()) == c);
    rows.push(CheckRow {
        group: GROUP_CODEWORDS,
        name: "label to codeword is a bijection on 8 elements".into(),
        passed: seen.len() == 8 && round_trip,
        note: None,
    });

    for (family, port_a, port_b) in PORT_TABLE {
        for sign in [Sign::Plus, Sign::Minus] {
            let label = DepLabel::new(family, sign);
            let routed: Vec<_> = family
                .terms()
                .iter()
                .map(|(ma, mb)| ((conv.port_map)(Photon::A, *ma), (conv.port_map)(Photon::B, *mb)))
                .collect();
            let passed = routed.iter().all(|&(a, b)| a == port_a && b == port_b);
            let note = (!passed).then(|| {
                let got: Vec<String> = routed.iter().map(|(a, b)| format!("{a},{b}")).collect();
                format!("routed to {}", got.join(" and "))
            });
            rows.push(CheckRow {
                group: GROUP_PORTS,
                name: format!("{label} -> ports {port_a},{port_b}"),
                passed,
                note,
            });
        }
    }

    match MeasurementDevice::with_port_map(conv.port_map) {
        Ok(device) => {
            for label in DepLabel::all() {
                let dist = device.distribution(&crate::dep::dep_basis(label));
                let correct: f64 = dist
                    .iter()
                    .filter(|(o, _)| crate::device::family_of_ports(o.port_a, o.port_b).is_some())
                    .filter(|(o, _)| decode(*o).0 == label)
                    .map(|(_, p)| p)
                    .sum();
                let passed = (correct - 1.0).abs() <= TABLE_TOL;
                rows.push(CheckRow {
                    group: GROUP_DISCRIMINATION,
                    name: format!("{label} decodes to {label} with probability 1"),
                    passed,
                    note: (!passed).then(|| format!("probability {correct}")),
                });
            }
        }
        Err(e) => {
            for label in DepLabel::all() {
                rows.push(CheckRow {
                    group: GROUP_DISCRIMINATION,
                    name: format!("{label} decodes to {label} with probability 1"),
                    passed: false,
                    note: Some(format!("device could not be built: {e}")),
                });
            }
        }
    }

    VerificationReport { rows }
}
