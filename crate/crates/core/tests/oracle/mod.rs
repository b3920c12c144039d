//! Reference computations used by the integration tests.
//!
//! Everything here is written against raw amplitude arrays with its own
//! index bookkeeping, so it stays independent of the library's
//! measurement, routing and encoding code.

#![allow(dead_code, clippy::needless_range_loop)]

use num_complex::Complex64 as C;

pub const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

pub type Amps16 = [C; 16];
pub type Rho4 = [[C; 4]; 4];

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

/// Local index: pol * 2 + freq (H=0, V=1; unprimed=0, primed=1).
pub fn local(pol: usize, freq: usize) -> usize {
    pol * 2 + freq
}

pub fn joint(a: usize, b: usize) -> usize {
    a * 4 + b
}

/// The eight DEP states written out term by term.
/// `family`: 0 Φ, 1 Ψ, 2 Γ, 3 Υ; `minus` picks the sign.
pub fn dep_state(family: usize, minus: bool) -> Amps16 {
    // (pol_a, pol_b) of the unprimed term; the primed term flips both
    let (pa, pb) = match family {
        0 => (0, 0),
        1 => (0, 1),
        2 => (1, 0),
        _ => (1, 1),
    };
    let mut s = [c(0.0); 16];
    s[joint(local(pa, 0), local(pb, 0))] = c(S);
    s[joint(local(1 - pa, 1), local(1 - pb, 1))] = c(if minus { -S } else { S });
    s
}

pub fn psi_plus() -> Amps16 {
    dep_state(1, false)
}

/// Pauli matrices on polarization: 0 I, 1 σx, 2 σz, 3 iσy (= σz σx).
pub fn pauli(k: usize) -> [[f64; 2]; 2] {
    match k {
        0 => [[1.0, 0.0], [0.0, 1.0]],
        1 => [[0.0, 1.0], [1.0, 0.0]],
        2 => [[1.0, 0.0], [0.0, -1.0]],
        _ => [[0.0, 1.0], [-1.0, 0.0]],
    }
}

/// Apply a polarization matrix to photon a (`on_a`) or b.
pub fn apply_pol(m: [[f64; 2]; 2], on_a: bool, s: &Amps16) -> Amps16 {
    let mut out = [c(0.0); 16];
    for ia in 0..4 {
        for ib in 0..4 {
            let amp = s[joint(ia, ib)];
            let (idx, other) = if on_a { (ia, ib) } else { (ib, ia) };
            let (pol, freq) = (idx / 2, idx % 2);
            for new_pol in 0..2 {
                let k = m[new_pol][pol];
                if k == 0.0 {
                    continue;
                }
                let n = local(new_pol, freq);
                let j = if on_a { joint(n, other) } else { joint(other, n) };
                out[j] += amp * k;
            }
        }
    }
    out
}

pub fn inner(a: &Amps16, b: &Amps16) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Reduced density matrix of photon a (`keep_a`) or b.
pub fn reduced(s: &Amps16, keep_a: bool) -> Rho4 {
    let mut rho = [[c(0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = c(0.0);
            for k in 0..4 {
                let (x, y) = if keep_a { (joint(i, k), joint(j, k)) } else { (joint(k, i), joint(k, j)) };
                acc += s[x] * s[y].conj();
            }
            rho[i][j] = acc;
        }
    }
    rho
}

pub fn purity(rho: &Rho4) -> f64 {
    let mut tr = c(0.0);
    for i in 0..4 {
        for k in 0..4 {
            tr += rho[i][k] * rho[k][i];
        }
    }
    tr.re
}

/// `⟨v|ρ|v⟩`.
pub fn expectation(rho: &Rho4, v: &[C; 4]) -> f64 {
    let mut acc = c(0.0);
    for i in 0..4 {
        for j in 0..4 {
            acc += v[i].conj() * rho[i][j] * v[j];
        }
    }
    acc.re
}

/// Single-photon eigenvectors: Z basis bit 0/1 = H/V, X basis bit 0/1 =
/// (H ± V)/√2, at frequency `freq`.
pub fn single_vector(x_basis: bool, bit: usize, freq: usize) -> [C; 4] {
    let mut v = [c(0.0); 4];
    if x_basis {
        v[local(0, freq)] = c(S);
        v[local(1, freq)] = c(if bit == 0 { S } else { -S });
    } else {
        v[local(bit, freq)] = c(1.0);
    }
    v
}

/// Device basis vector for one photon: port content `(h_mode, v_mode)` and
/// σx sign, written straight from the routing table.
fn port_vector(h_mode: usize, v_mode: usize, plus: bool) -> [C; 4] {
    let mut v = [c(0.0); 4];
    v[h_mode] = c(S);
    v[v_mode] = c(if plus { S } else { -S });
    v
}

/// `(port number, h mode, v mode)` for each port.
/// Port 1: (H,ωs), (V,ωs'); port 3: (H,ωs'), (V,ωs);
/// port 2: (H,ωi), (V,ωi'); port 4: (H,ωi'), (V,ωi).
pub const PORTS_A: [(u8, usize, usize); 2] = [(1, 0, 3), (3, 1, 2)];
pub const PORTS_B: [(u8, usize, usize); 2] = [(2, 0, 3), (4, 1, 2)];

/// Analytic device distribution keyed by `(port_a, port_b, plus_a, plus_b)`.
pub fn device_distribution(s: &Amps16) -> Vec<((u8, u8, bool, bool), f64)> {
    let mut out = Vec::with_capacity(16);
    for &(pa, ha, va) in &PORTS_A {
        for xa in [true, false] {
            let vec_a = port_vector(ha, va, xa);
            for &(pb, hb, vb) in &PORTS_B {
                for xb in [true, false] {
                    let vec_b = port_vector(hb, vb, xb);
                    let mut amp = c(0.0);
                    for ia in 0..4 {
                        for ib in 0..4 {
                            amp += (vec_a[ia] * vec_b[ib]).conj() * s[joint(ia, ib)];
                        }
                    }
                    out.push(((pa, pb, xa, xb), amp.norm_sqr()));
                }
            }
        }
    }
    out
}

/// Z-basis intercept of photon b on a state whose every term has a
/// distinct b mode. Returns `(probability, b mode, post state)` per branch.
fn z_intercept_b(s: &Amps16) -> Vec<(f64, usize, Amps16)> {
    let mut out = Vec::new();
    for mb in 0..4 {
        let mut post = [c(0.0); 16];
        let mut p = 0.0;
        for ma in 0..4 {
            post[joint(ma, mb)] = s[joint(ma, mb)];
            p += s[joint(ma, mb)].norm_sqr();
        }
        if p > 1e-15 {
            for a in post.iter_mut() {
                *a /= p.sqrt();
            }
            out.push((p, mb, post));
        }
    }
    out
}

/// Erase frequencies: polarization-pair amplitudes `[HH, HV, VH, VV]`.
fn erase_frequencies(s: &Amps16) -> [C; 4] {
    let mut out = [c(0.0); 4];
    for ia in 0..4 {
        for ib in 0..4 {
            out[(ia / 2) * 2 + ib / 2] += s[joint(ia, ib)];
        }
    }
    let n: f64 = out.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in out.iter_mut() {
        *a /= n;
    }
    out
}

fn qubit(x_basis: bool, bit: usize) -> [C; 2] {
    match (x_basis, bit) {
        (false, 0) => [c(1.0), c(0.0)],
        (false, _) => [c(0.0), c(1.0)],
        (true, 0) => [c(S), c(S)],
        (true, _) => [c(S), c(-S)],
    }
}

/// Probability that two photons of a polarization pair both measured in
/// the same basis give equal bits.
fn agreement_probability(pair: &[C; 4], x_basis: bool) -> f64 {
    let mut p = 0.0;
    for bit in 0..2 {
        let q = qubit(x_basis, bit);
        let mut amp = c(0.0);
        for i in 0..2 {
            for j in 0..2 {
                amp += (q[i] * q[j]).conj() * pair[i * 2 + j];
            }
        }
        p += amp.norm_sqr();
    }
    p
}

/// Expected agreement for the Step-1 Bell state (`op_b` index as in
/// [`pauli`]): Φ states agree in Z, `+` states agree in X.
fn expected_agreement(op_b: usize, x_basis: bool) -> bool {
    // I -> Ψ+, σx -> Φ+, σz -> Ψ-, iσy -> Φ-
    let (phi, plus) = match op_b {
        0 => (false, true),
        1 => (true, true),
        2 => (false, false),
        _ => (true, false),
    };
    if x_basis {
        plus
    } else {
        phi
    }
}

/// Outcome-tree expectation of the wavelength-converter check error rates
/// `(matched Z, matched X, pooled)` with a Z-basis intercept of photon b
/// (`eve = true`) or without Eve.
pub fn wc_error_rates(eve: bool) -> (f64, f64, f64) {
    let mut err = [0.0f64; 2];
    let mut mass = [0.0f64; 2];
    for op_b in 0..4 {
        let state = apply_pol(pauli(op_b), false, &psi_plus());
        let branches = if eve {
            z_intercept_b(&state)
        } else {
            vec![(1.0, usize::MAX, state)]
        };
        for (p_branch, _, post) in branches {
            let pair = erase_frequencies(&post);
            for (k, x_basis) in [(0, false), (1, true)] {
                // matched bases occur with probability 1/4 each
                let w = 0.25 * p_branch * 0.25;
                let agree = agreement_probability(&pair, x_basis);
                let p_err = if expected_agreement(op_b, x_basis) { 1.0 - agree } else { agree };
                err[k] += w * p_err;
                mass[k] += w;
            }
        }
    }
    (err[0] / mass[0], err[1] / mass[1], (err[0] + err[1]) / (mass[0] + mass[1]))
}

/// Outcome-tree decoy error rate on basis-matched decoys for an Eve who
/// measures Z with probability `p_z` and X otherwise. Returns
/// `(error on Z-prepared, error on X-prepared, overall)`.
pub fn decoy_error_rates(p_z: f64) -> (f64, f64, f64) {
    let mut per_basis = [0.0f64; 2];
    for prep_x in [false, true] {
        let mut e = 0.0;
        for bit in 0..2 {
            for freq in 0..2 {
                let prep = single_vector(prep_x, bit, freq);
                for (eve_x, p_eve) in [(false, p_z), (true, 1.0 - p_z)] {
                    for eve_bit in 0..2 {
                        let ev = single_vector(eve_x, eve_bit, freq);
                        let p_outcome: f64 =
                            ev.iter().zip(&prep).map(|(a, b)| a.conj() * b).sum::<C>().norm_sqr();
                        // Bob measures the resent state in the preparation basis
                        let bob_right = single_vector(prep_x, bit, freq);
                        let p_right: f64 =
                            bob_right.iter().zip(&ev).map(|(a, b)| a.conj() * b).sum::<C>().norm_sqr();
                        e += 0.25 * p_eve * p_outcome * (1.0 - p_right);
                    }
                }
            }
        }
        per_basis[prep_x as usize] = e;
    }
    (per_basis[0], per_basis[1], 0.5 * (per_basis[0] + per_basis[1]))
}

/// Codeword bits of a label under the key assignment
/// Ψ±→00x, Φ±→01x, Υ±→10x, Γ±→11x.
fn codeword_of(family: usize, minus: bool) -> usize {
    let hi = match family {
        1 => 0,
        0 => 1,
        3 => 2,
        _ => 3,
    };
    hi << 1 | minus as usize
}

/// The DEP label reached from Ψ+ by `(op_a, op_b)`, by brute-force overlap.
pub fn label_of_pair(op_a: usize, op_b: usize) -> (usize, bool) {
    let s = apply_pol(pauli(op_a), true, &apply_pol(pauli(op_b), false, &psi_plus()));
    for family in 0..4 {
        for minus in [false, true] {
            if inner(&dep_state(family, minus), &s).norm() > 1.0 - 1e-12 {
                return (family, minus);
            }
        }
    }
    panic!("pair ({op_a},{op_b}) leaves the DEP basis");
}

/// Mutual information (bits) between Eve's b-photon record and the final
/// codeword, with Alice's 16 operation pairs equally likely and Eve
/// measuring in Z with probability `p_z`.
pub fn eve_codeword_information(p_z: f64) -> f64 {
    use std::collections::HashMap;
    // record = (basis, bit, freq)
    let mut joint_p: HashMap<((bool, usize, usize), usize), f64> = HashMap::new();
    for op_a in 0..4 {
        for op_b in 0..4 {
            let (family, minus) = label_of_pair(op_a, op_b);
            let cw = codeword_of(family, minus);
            let state = apply_pol(pauli(op_b), false, &psi_plus());
            let rho_b = reduced(&state, false);
            for (eve_x, p_eve) in [(false, p_z), (true, 1.0 - p_z)] {
                if p_eve == 0.0 {
                    continue;
                }
                for bit in 0..2 {
                    for freq in 0..2 {
                        let p = expectation(&rho_b, &single_vector(eve_x, bit, freq));
                        if p > 1e-15 {
                            *joint_p.entry(((eve_x, bit, freq), cw)).or_default() += p * p_eve / 16.0;
                        }
                    }
                }
            }
        }
    }
    mutual_information(&joint_p)
}

pub fn mutual_information<R, Y>(joint_p: &std::collections::HashMap<(R, Y), f64>) -> f64
where
    R: std::hash::Hash + Eq + Clone,
    Y: std::hash::Hash + Eq + Clone,
{
    use std::collections::HashMap;
    let total: f64 = joint_p.values().sum();
    let mut pr: HashMap<R, f64> = HashMap::new();
    let mut py: HashMap<Y, f64> = HashMap::new();
    for ((r, y), p) in joint_p {
        *pr.entry(r.clone()).or_default() += p / total;
        *py.entry(y.clone()).or_default() += p / total;
    }
    joint_p
        .iter()
        .filter(|(_, &p)| p > 0.0)
        .map(|((r, y), &p)| {
            let p = p / total;
            p * (p / (pr[r] * py[y])).log2()
        })
        .sum()
}

/// Total variation distance between two distributions over the same keys.
pub fn total_variation<K: PartialEq>(a: &[(K, f64)], b: &[(K, f64)]) -> f64 {
    0.5 * a
        .iter()
        .map(|(k, pa)| {
            let pb = b.iter().find(|(kb, _)| kb == k).map(|(_, p)| *p).unwrap_or(0.0);
            (pa - pb).abs()
        })
        .sum::<f64>()
}
