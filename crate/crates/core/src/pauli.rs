//! Symplectic Pauli-string algebra with exact phase tracking.
//!
//! An N-qubit Pauli string is stored as two bit vectors plus a phase
//! exponent: the operator is `i^phase · ⊗_q X^{x_q} Z^{z_q}`, with qubit 0
//! the leftmost factor of the tensor product. In this encoding the local
//! operator with both bits set is XZ = -iY, so a label `Y` contributes one
//! unit to the phase exponent. Products, commutation and conjugation by the
//! Clifford generators {H, Rx(pi/2), CNOT} are all word-wise bit operations:
//!
//! * product phase picks up `i^2` for every qubit where the left factor has
//!   a Z crossing the right factor's X,
//! * two strings commute iff the symplectic form
//!   `<x_P, z_Q> + <x_Q, z_P>` vanishes mod 2,
//! * H swaps x and z (sign flip on XZ), Rx(pi/2) maps z into x with an
//!   `i^3` on any Z component, and CNOT(c,t) updates `x_t ^= x_c`,
//!   `z_c ^= z_t` with no extra sign.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const WORD_BITS: usize = 64;

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

fn get_bit(words: &[u64], i: usize) -> bool {
    words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
}

fn set_bit(words: &mut [u64], i: usize, v: bool) {
    let mask = 1u64 << (i % WORD_BITS);
    if v {
        words[i / WORD_BITS] |= mask;
    } else {
        words[i / WORD_BITS] &= !mask;
    }
}

fn and_popcount(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

/// One of the three Clifford generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "gate")]
pub enum CliffordGate {
    /// Hadamard on one qubit.
    H { qubit: usize },
    /// Rotation Rx(pi/2) = (I - iX)/sqrt(2) on one qubit.
    #[serde(rename = "RX90")]
    Rx90 { qubit: usize },
    /// Controlled-NOT.
    #[serde(rename = "CNOT")]
    Cnot { control: usize, target: usize },
}

impl CliffordGate {
    fn validate(&self, n: usize) -> Result<()> {
        match *self {
            CliffordGate::H { qubit } | CliffordGate::Rx90 { qubit } => {
                if qubit >= n {
                    return Err(Error::IndexOutOfRange { index: qubit, n });
                }
            }
            CliffordGate::Cnot { control, target } => {
                if control >= n {
                    return Err(Error::IndexOutOfRange { index: control, n });
                }
                if target >= n {
                    return Err(Error::IndexOutOfRange { index: target, n });
                }
                if control == target {
                    return Err(Error::DegenerateCnot(control));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for CliffordGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CliffordGate::H { qubit } => write!(f, "H({qubit})"),
            CliffordGate::Rx90 { qubit } => write!(f, "RX90({qubit})"),
            CliffordGate::Cnot { control, target } => write!(f, "CNOT({control},{target})"),
        }
    }
}

/// An ordered list of Clifford gates on a fixed register.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliffordCircuit {
    pub n_qubits: usize,
    pub gates: Vec<CliffordGate>,
}

impl CliffordCircuit {
    pub fn new(n_qubits: usize) -> Self {
        CliffordCircuit { n_qubits, gates: Vec::new() }
    }

    pub fn push(&mut self, gate: CliffordGate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Flat text rendering, one gate per line: `h q[i]`, `rx(pi/2) q[i]`,
    /// `cx q[c],q[t]`.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            match *g {
                CliffordGate::H { qubit } => out.push_str(&format!("h q[{qubit}];\n")),
                CliffordGate::Rx90 { qubit } => out.push_str(&format!("rx(pi/2) q[{qubit}];\n")),
                CliffordGate::Cnot { control, target } => {
                    out.push_str(&format!("cx q[{control}],q[{target}];\n"))
                }
            }
        }
        out
    }
}

/// N-qubit Pauli operator in the symplectic bit-pair encoding.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    /// Operator = i^phase · prod_q X^{x_q} Z^{z_q}, phase mod 4.
    phase: u8,
}

impl PauliString {
    /// The identity string on `n` qubits.
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        PauliString { n, x: vec![0; w], z: vec![0; w], phase: 0 }
    }

    /// Build from a text label such as `"XZIY"`, qubit 0 leftmost.
    ///
    /// `phase_exp` is the external exponent: the operator equals
    /// `i^phase_exp` times the labelled tensor product.
    pub fn from_labels(labels: &str, phase_exp: u8) -> Result<Self> {
        let mut s = PauliString::identity(labels.chars().count());
        let mut y_count = 0u32;
        for (q, c) in labels.chars().enumerate() {
            match c {
                'I' => {}
                'X' => set_bit(&mut s.x, q, true),
                'Z' => set_bit(&mut s.z, q, true),
                'Y' => {
                    set_bit(&mut s.x, q, true);
                    set_bit(&mut s.z, q, true);
                    y_count += 1;
                }
                other => return Err(Error::InvalidLabel(other)),
            }
        }
        // Y = i·XZ, so each Y raises the internal exponent by one.
        s.phase = ((phase_exp as u32 + y_count) % 4) as u8;
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Internal phase exponent of the XZ-ordered encoding.
    pub fn phase_exp(&self) -> u8 {
        self.phase
    }

    pub fn x_bit(&self, q: usize) -> bool {
        get_bit(&self.x, q)
    }

    pub fn z_bit(&self, q: usize) -> bool {
        get_bit(&self.z, q)
    }

    fn y_count(&self) -> u32 {
        and_popcount(&self.x, &self.z)
    }

    /// Label text, qubit 0 leftmost.
    pub fn label(&self) -> String {
        (0..self.n)
            .map(|q| match (self.x_bit(q), self.z_bit(q)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            })
            .collect()
    }

    /// External phase exponent: operator = i^k · (labelled tensor product).
    pub fn label_phase_exp(&self) -> u8 {
        ((self.phase as u32 + 4 - self.y_count() % 4) % 4) as u8
    }

    /// True iff the string contains only Z and I factors.
    pub fn is_diagonal(&self) -> bool {
        self.x.iter().all(|w| *w == 0)
    }

    pub fn is_identity_bits(&self) -> bool {
        self.is_diagonal() && self.z.iter().all(|w| *w == 0)
    }

    /// Qubits carrying an X or Y factor, ascending.
    pub fn x_support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.x_bit(q)).collect()
    }

    /// Qubits carrying any non-identity factor, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&q| self.x_bit(q) || self.z_bit(q))
            .collect()
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    /// Copy with the phase exponent replaced.
    pub fn with_phase(&self, phase: u8) -> Self {
        let mut s = self.clone();
        s.phase = phase % 4;
        s
    }

    /// Bit-content key ignoring the phase (deterministic ordering).
    pub fn key(&self) -> PauliKey {
        PauliKey { x: self.x.clone(), z: self.z.clone() }
    }

    /// Matrix product `self · other` with the phase tracked mod 4.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        if self.n != other.n {
            return Err(Error::QubitMismatch(self.n, other.n));
        }
        // Reordering Z^{z_P} past X^{x_Q} contributes (-1) per overlap.
        let crossings = and_popcount(&self.z, &other.x);
        let phase = ((self.phase as u32 + other.phase as u32 + 2 * crossings) % 4) as u8;
        let x = self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect();
        let z = self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect();
        Ok(PauliString { n: self.n, x, z, phase })
    }

    /// Symplectic commutation test.
    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::QubitMismatch(self.n, other.n));
        }
        let s = and_popcount(&self.x, &other.z) + and_popcount(&other.x, &self.z);
        Ok(s % 2 == 0)
    }

    /// Conjugation `g · self · g†` by a single Clifford gate.
    pub fn apply_gate(&self, gate: CliffordGate) -> Result<PauliString> {
        gate.validate(self.n)?;
        let mut s = self.clone();
        match gate {
            CliffordGate::H { qubit } => {
                let xb = get_bit(&s.x, qubit);
                let zb = get_bit(&s.z, qubit);
                // H X H = Z, H Z H = X, H (XZ) H = ZX = -XZ.
                if xb && zb {
                    s.phase = (s.phase + 2) % 4;
                }
                set_bit(&mut s.x, qubit, zb);
                set_bit(&mut s.z, qubit, xb);
            }
            CliffordGate::Rx90 { qubit } => {
                // Rx X Rx† = X, Rx Z Rx† = -iXZ, Rx (XZ) Rx† = -iZ.
                if get_bit(&s.z, qubit) {
                    let xb = get_bit(&s.x, qubit);
                    set_bit(&mut s.x, qubit, !xb);
                    s.phase = (s.phase + 3) % 4;
                }
            }
            CliffordGate::Cnot { control, target } => {
                // X_c -> X_c X_t, Z_t -> Z_c Z_t; signs cancel in XZ order.
                let xc = get_bit(&s.x, control);
                let zt = get_bit(&s.z, target);
                if xc {
                    let xt = get_bit(&s.x, target);
                    set_bit(&mut s.x, target, !xt);
                }
                if zt {
                    let zc = get_bit(&s.z, control);
                    set_bit(&mut s.z, control, !zc);
                }
            }
        }
        Ok(s)
    }

    /// Conjugation by a whole circuit, gates applied in order.
    pub fn apply_circuit(&self, circuit: &CliffordCircuit) -> Result<PauliString> {
        let mut s = self.clone();
        for &g in &circuit.gates {
            s = s.apply_gate(g)?;
        }
        Ok(s)
    }

    /// Sign of a diagonal conjugation result.
    ///
    /// A Hermitian string stays Hermitian under Clifford conjugation, so the
    /// phase exponent is 0 or 2; anything else reports an error.
    pub fn hermitian_sign(&self) -> Result<f64> {
        match self.label_phase_exp() {
            0 => Ok(1.0),
            2 => Ok(-1.0),
            _ => Err(Error::UnverifiedCircuit(format!(
                "string {} has non-Hermitian phase i^{}",
                self.label(),
                self.label_phase_exp()
            ))),
        }
    }

    /// Z-mask in basis-index space (qubit 0 = most significant bit).
    pub fn z_index_mask(&self) -> u64 {
        let mut m = 0u64;
        for q in 0..self.n {
            if self.z_bit(q) {
                m |= 1 << (self.n - 1 - q);
            }
        }
        m
    }

    /// X-mask in basis-index space (qubit 0 = most significant bit).
    pub fn x_index_mask(&self) -> u64 {
        let mut m = 0u64;
        for q in 0..self.n {
            if self.x_bit(q) {
                m |= 1 << (self.n - 1 - q);
            }
        }
        m
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.label_phase_exp() {
            0 => write!(f, "{}", self.label()),
            1 => write!(f, "i{}", self.label()),
            2 => write!(f, "-{}", self.label()),
            _ => write!(f, "-i{}", self.label()),
        }
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("PauliString", 2)?;
        st.serialize_field("label", &self.label())?;
        st.serialize_field("phase_exp", &self.label_phase_exp())?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            label: String,
            #[serde(default)]
            phase_exp: u8,
        }
        let r = Repr::deserialize(de)?;
        PauliString::from_labels(&r.label, r.phase_exp).map_err(serde::de::Error::custom)
    }
}

/// Phase-free bit content of a string, used as a map key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliKey {
    x: Vec<u64>,
    z: Vec<u64>,
}

impl PauliKey {
    pub fn to_string_on(&self, n: usize) -> PauliString {
        let mut s = PauliString { n, x: self.x.clone(), z: self.z.clone(), phase: 0 };
        s.phase = (s.y_count() % 4) as u8;
        s
    }
}

/// A real-weighted Hermitian Pauli string.
///
/// The stored string always equals its plain label operator (internal phase
/// = number of Y factors), so the weight carries all sign information.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedPauli {
    #[serde(flatten)]
    pub string: PauliString,
    pub weight: f64,
}

/// Accumulated real linear combination of Pauli strings.
///
/// Keys are the phase-free bit patterns; weights are folded so that each
/// entry means `weight · (label operator)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: BTreeMap<PauliKey, f64>,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Self {
        PauliSum { n: n_qubits, terms: BTreeMap::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Add `w` times the label operator of `s` (its internal phase must make
    /// the operator Hermitian, i.e. label phase 0 or 2).
    pub fn add(&mut self, s: &PauliString, w: f64) -> Result<()> {
        if s.n_qubits() != self.n {
            return Err(Error::QubitMismatch(s.n_qubits(), self.n));
        }
        let signed = w * s.hermitian_sign()?;
        *self.terms.entry(s.key()).or_insert(0.0) += signed;
        Ok(())
    }

    pub fn add_weighted(&mut self, wp: &WeightedPauli) -> Result<()> {
        self.add(&wp.string, wp.weight)
    }

    /// Add a multiple of the identity.
    pub fn add_constant(&mut self, c: f64) {
        let id = PauliString::identity(self.n);
        *self.terms.entry(id.key()).or_insert(0.0) += c;
    }

    /// Remove entries with |weight| below `threshold`.
    pub fn prune(&mut self, threshold: f64) {
        self.terms.retain(|_, w| w.abs() >= threshold);
    }

    pub fn get(&self, key: &PauliKey) -> Option<f64> {
        self.terms.get(key).copied()
    }

    /// Deterministic iteration over the accumulated strings.
    pub fn iter(&self) -> impl Iterator<Item = WeightedPauli> + '_ {
        self.terms.iter().map(|(k, &w)| WeightedPauli {
            string: k.to_string_on(self.n),
            weight: w,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(label: &str) -> PauliString {
        PauliString::from_labels(label, 0).unwrap()
    }

    #[test]
    fn labels_round_trip() {
        for label in ["II", "Z", "XY", "IXYZ", "YYYY"] {
            for phase in 0..4u8 {
                let s = PauliString::from_labels(label, phase).unwrap();
                assert_eq!(s.label(), label);
                assert_eq!(s.label_phase_exp(), phase);
            }
        }
    }

    #[test]
    fn identity_case() {
        let s = p("II");
        assert!(s.is_diagonal());
        assert!(s.is_identity_bits());
        assert_eq!(s.phase_exp(), 0);
    }

    #[test]
    fn z_encoding() {
        let s = p("Z");
        assert!(!s.x_bit(0));
        assert!(s.z_bit(0));
        assert!(s.is_diagonal());
    }

    #[test]
    fn invalid_label_rejected() {
        assert!(matches!(
            PauliString::from_labels("XQ", 0),
            Err(Error::InvalidLabel('Q'))
        ));
    }

    #[test]
    fn self_inverse_product() {
        let x = p("X");
        let r = x.multiply(&x).unwrap();
        assert!(r.is_identity_bits());
        assert_eq!(r.phase_exp(), 0);
    }

    #[test]
    fn xy_product_is_iz() {
        let r = p("X").multiply(&p("Y")).unwrap();
        assert_eq!(r.label(), "Z");
        assert_eq!(r.label_phase_exp(), 1);
        let r = p("Y").multiply(&p("X")).unwrap();
        assert_eq!(r.label(), "Z");
        assert_eq!(r.label_phase_exp(), 3);
    }

    #[test]
    fn size_mismatch_errors() {
        assert!(p("XX").multiply(&p("X")).is_err());
        assert!(p("XX").commutes(&p("X")).is_err());
    }

    #[test]
    fn commutation_basics() {
        assert!(p("XX").commutes(&p("YY")).unwrap());
        assert!(!p("XY").commutes(&p("XX")).unwrap());
        for label in ["XYZI", "YYYY", "IIII"] {
            let s = p(label);
            assert!(s.commutes(&s).unwrap());
        }
    }

    #[test]
    fn commutation_vs_product_phase() {
        // P and Q commute iff PQ and QP carry the same phase; otherwise the
        // phases differ by two.
        let labels = ["XX", "XY", "ZI", "YZ", "IZ", "YY"];
        for a in labels {
            for b in labels {
                let pa = p(a);
                let pb = p(b);
                let ab = pa.multiply(&pb).unwrap();
                let ba = pb.multiply(&pa).unwrap();
                let diff = (ab.phase_exp() + 4 - ba.phase_exp()) % 4;
                if pa.commutes(&pb).unwrap() {
                    assert_eq!(diff, 0);
                } else {
                    assert_eq!(diff, 2);
                }
            }
        }
    }

    #[test]
    fn hadamard_z_to_x() {
        let s = p("Z").apply_gate(CliffordGate::H { qubit: 0 }).unwrap();
        assert_eq!(s.label(), "X");
        assert_eq!(s.label_phase_exp(), 0);
    }

    #[test]
    fn rx90_signs() {
        let s = p("Z").apply_gate(CliffordGate::Rx90 { qubit: 0 }).unwrap();
        assert_eq!(s.label(), "Y");
        assert_eq!(s.label_phase_exp(), 2); // Z -> -Y
        let s = p("Y").apply_gate(CliffordGate::Rx90 { qubit: 0 }).unwrap();
        assert_eq!(s.label(), "Z");
        assert_eq!(s.label_phase_exp(), 0); // Y -> Z
        let s = p("X").apply_gate(CliffordGate::Rx90 { qubit: 0 }).unwrap();
        assert_eq!(s.label(), "X");
        assert_eq!(s.label_phase_exp(), 0);
    }

    #[test]
    fn cnot_reference_rows() {
        // Written as (first qubit ⊗ second qubit) with control on the second.
        let g = CliffordGate::Cnot { control: 1, target: 0 };
        let cases = [("ZZ", "ZI"), ("IZ", "IZ"), ("XX", "IX"), ("XI", "XI")];
        for (input, want) in cases {
            let s = p(input).apply_gate(g).unwrap();
            assert_eq!(s.label(), want, "CNOT on {input}");
            assert_eq!(s.label_phase_exp(), 0);
        }
    }

    #[test]
    fn empty_circuit_is_identity() {
        let c = CliffordCircuit::new(4);
        let s = p("XYZI");
        assert_eq!(s.apply_circuit(&c).unwrap(), s);
    }

    #[test]
    fn worked_cnot_chain_clears_x_component() {
        // Four CNOTs with control on the larger index, then H, acting on a
        // string with X/Y on qubits 2..=5 (0-based).
        let mut c = CliffordCircuit::new(8);
        c.push(CliffordGate::Cnot { control: 3, target: 2 }).unwrap();
        c.push(CliffordGate::Cnot { control: 4, target: 3 }).unwrap();
        c.push(CliffordGate::Cnot { control: 5, target: 4 }).unwrap();
        c.push(CliffordGate::H { qubit: 5 }).unwrap();
        let s = p("IIYYXXII").apply_circuit(&c).unwrap();
        assert!(s.is_diagonal());
        assert_eq!(s.label(), "IIZIIZII");
    }

    #[test]
    fn conjugation_preserves_commutation() {
        let gates = [
            CliffordGate::H { qubit: 0 },
            CliffordGate::Rx90 { qubit: 1 },
            CliffordGate::Cnot { control: 1, target: 0 },
            CliffordGate::Cnot { control: 0, target: 1 },
        ];
        let labels = ["XX", "XY", "ZZ", "YI", "IZ", "YX"];
        for g in gates {
            for a in labels {
                for b in labels {
                    let pa = p(a);
                    let pb = p(b);
                    let ca = pa.apply_gate(g).unwrap();
                    let cb = pb.apply_gate(g).unwrap();
                    assert_eq!(
                        pa.commutes(&pb).unwrap(),
                        ca.commutes(&cb).unwrap(),
                        "{a} vs {b} under {g}"
                    );
                }
            }
        }
    }

    #[test]
    fn disjoint_sum_counterexample_members_anticommute() {
        // A = XY + IY and B = XX + IX commute as sums, yet every member of A
        // anticommutes with every member of B.
        let a = [p("XY"), p("IY")];
        let b = [p("XX"), p("IX")];
        for ai in &a {
            for bj in &b {
                assert!(!ai.commutes(bj).unwrap());
            }
        }
    }

    #[test]
    fn gate_validation() {
        let s = p("XX");
        assert!(s.apply_gate(CliffordGate::H { qubit: 2 }).is_err());
        assert!(s
            .apply_gate(CliffordGate::Cnot { control: 1, target: 1 })
            .is_err());
    }

    #[test]
    fn pauli_sum_accumulates_and_prunes() {
        let mut sum = PauliSum::new(2);
        sum.add(&p("XX"), 0.5).unwrap();
        sum.add(&p("XX"), 0.25).unwrap();
        // A string with label phase 2 contributes with a flipped sign.
        sum.add(&PauliString::from_labels("XX", 2).unwrap(), 0.25).unwrap();
        sum.add(&p("ZI"), 1e-15).unwrap();
        sum.prune(1e-12);
        assert_eq!(sum.len(), 1);
        let got: Vec<_> = sum.iter().collect();
        assert_eq!(got[0].string.label(), "XX");
        assert!((got[0].weight - 0.5).abs() < 1e-15);
    }

    #[test]
    fn json_rendering() {
        let s = PauliString::from_labels("XZY", 2).unwrap();
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"label":"XZY","phase_exp":2}"#);
        let back: PauliString = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
    }
}
