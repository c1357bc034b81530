//! Dense-matrix oracles shared by the integration tests.
//!
//! Everything here is built from first principles — 2x2 Pauli matrices,
//! Kronecker products, and occupation-number ladder operators with explicit
//! parity signs — so it stays independent of the symplectic implementation
//! it checks. Index convention matches the crate: qubit/mode 0 is the most
//! significant bit of a basis index.

#![allow(dead_code)]

use num_complex::Complex64;

use hamgroup::fermion::RawTerm;
use hamgroup::pauli::{CliffordCircuit, CliffordGate, PauliString};

pub type C = Complex64;

#[derive(Clone, Debug)]
pub struct CMat {
    pub dim: usize,
    pub data: Vec<C>,
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        CMat { dim, data: vec![C::new(0.0, 0.0); dim * dim] }
    }

    pub fn eye(dim: usize) -> Self {
        let mut m = CMat::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C::new(1.0, 0.0);
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> C {
        self.data[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: C) {
        self.data[r * self.dim + c] = v;
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = CMat::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a == C::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn kron(&self, other: &CMat) -> CMat {
        let d = self.dim * other.dim;
        let mut out = CMat::zeros(d);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self.get(i, j);
                for k in 0..other.dim {
                    for l in 0..other.dim {
                        out.set(
                            i * other.dim + k,
                            j * other.dim + l,
                            a * other.get(k, l),
                        );
                    }
                }
            }
        }
        out
    }

    pub fn dagger(&self) -> CMat {
        let mut out = CMat::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    pub fn scale(&self, s: C) -> CMat {
        CMat { dim: self.dim, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!(self.dim, other.dim);
        CMat {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        self.add(&other.scale(C::new(-1.0, 0.0)))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &CMat, tol: f64) -> bool {
        self.dim == other.dim && self.sub(other).max_abs() <= tol
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j && self.get(i, j).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn commutator_norm(&self, other: &CMat) -> f64 {
        self.matmul(other).sub(&other.matmul(self)).max_abs()
    }
}

pub fn pauli_i() -> CMat {
    CMat::eye(2)
}

pub fn pauli_x() -> CMat {
    let mut m = CMat::zeros(2);
    m.set(0, 1, C::new(1.0, 0.0));
    m.set(1, 0, C::new(1.0, 0.0));
    m
}

pub fn pauli_y() -> CMat {
    let mut m = CMat::zeros(2);
    m.set(0, 1, C::new(0.0, -1.0));
    m.set(1, 0, C::new(0.0, 1.0));
    m
}

pub fn pauli_z() -> CMat {
    let mut m = CMat::zeros(2);
    m.set(0, 0, C::new(1.0, 0.0));
    m.set(1, 1, C::new(-1.0, 0.0));
    m
}

/// Dense matrix of a Pauli string, from its label and external phase only.
pub fn matrix_of(p: &PauliString) -> CMat {
    let mut m = CMat::eye(1);
    for c in p.label().chars() {
        let f = match c {
            'I' => pauli_i(),
            'X' => pauli_x(),
            'Y' => pauli_y(),
            'Z' => pauli_z(),
            _ => unreachable!(),
        };
        m = m.kron(&f);
    }
    let ip = match p.label_phase_exp() % 4 {
        0 => C::new(1.0, 0.0),
        1 => C::new(0.0, 1.0),
        2 => C::new(-1.0, 0.0),
        _ => C::new(0.0, -1.0),
    };
    m.scale(ip)
}

/// Dense unitary of one gate on an n-qubit register.
pub fn gate_unitary(gate: CliffordGate, n: usize) -> CMat {
    match gate {
        CliffordGate::H { qubit } => single_qubit_unitary(
            &{
                let mut h = CMat::zeros(2);
                let s = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                h.set(0, 0, s);
                h.set(0, 1, s);
                h.set(1, 0, s);
                h.set(1, 1, -s);
                h
            },
            qubit,
            n,
        ),
        CliffordGate::Rx90 { qubit } => single_qubit_unitary(
            &{
                let mut r = CMat::zeros(2);
                let s = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                let mi = C::new(0.0, -1.0);
                r.set(0, 0, s);
                r.set(0, 1, mi * s);
                r.set(1, 0, mi * s);
                r.set(1, 1, s);
                r
            },
            qubit,
            n,
        ),
        CliffordGate::Cnot { control, target } => {
            let dim = 1 << n;
            let mut u = CMat::zeros(dim);
            let cm = 1usize << (n - 1 - control);
            let tm = 1usize << (n - 1 - target);
            for b in 0..dim {
                let out = if b & cm != 0 { b ^ tm } else { b };
                u.set(out, b, C::new(1.0, 0.0));
            }
            u
        }
    }
}

fn single_qubit_unitary(u2: &CMat, qubit: usize, n: usize) -> CMat {
    let mut m = CMat::eye(1);
    for q in 0..n {
        let f = if q == qubit { u2.clone() } else { CMat::eye(2) };
        m = m.kron(&f);
    }
    m
}

pub fn circuit_unitary(circuit: &CliffordCircuit) -> CMat {
    let mut u = CMat::eye(1 << circuit.n_qubits);
    for &g in &circuit.gates {
        u = gate_unitary(g, circuit.n_qubits).matmul(&u);
    }
    u
}

/// U P U† for a dense unitary.
pub fn conjugate(u: &CMat, p: &CMat) -> CMat {
    u.matmul(p).matmul(&u.dagger())
}

// ---------------------------------------------------------------------------
// Fermionic ladder operators in the occupation basis (no qubit mapping):
// a†_j |n0..nj..> = (-1)^(sum_{m<j} n_m) (1 - n_j) |..n_j+1..>
// ---------------------------------------------------------------------------

pub fn creation_matrix(mode: usize, n_modes: usize) -> CMat {
    let dim = 1 << n_modes;
    let mask = 1usize << (n_modes - 1 - mode);
    let mut m = CMat::zeros(dim);
    for b in 0..dim {
        if b & mask == 0 {
            let parity = (0..mode)
                .filter(|&q| b & (1 << (n_modes - 1 - q)) != 0)
                .count();
            let sign = if parity % 2 == 0 { 1.0 } else { -1.0 };
            m.set(b | mask, b, C::new(sign, 0.0));
        }
    }
    m
}

pub fn annihilation_matrix(mode: usize, n_modes: usize) -> CMat {
    creation_matrix(mode, n_modes).dagger()
}

/// Dense matrix of one raw ladder product.
pub fn raw_term_matrix(term: &RawTerm, n_modes: usize) -> CMat {
    let dim = 1 << n_modes;
    let mut m = CMat::eye(dim);
    for &c in &term.creation {
        m = m.matmul(&creation_matrix(c, n_modes));
    }
    for &a in &term.annihilation {
        m = m.matmul(&annihilation_matrix(a, n_modes));
    }
    m.scale(C::new(term.coeff, 0.0))
}

/// Dense Hamiltonian of a raw term list.
pub fn raw_hamiltonian_matrix(terms: &[RawTerm], n_modes: usize) -> CMat {
    let mut h = CMat::zeros(1 << n_modes);
    for t in terms {
        h = h.add(&raw_term_matrix(t, n_modes));
    }
    h
}

/// Dense matrix of a weighted-string sum.
pub fn strings_matrix(
    strings: impl IntoIterator<Item = hamgroup::pauli::WeightedPauli>,
    n: usize,
) -> CMat {
    let mut h = CMat::zeros(1 << n);
    for w in strings {
        h = h.add(&matrix_of(&w.string).scale(C::new(w.weight, 0.0)));
    }
    h
}

/// Quadratic form <psi|M|psi> for a dense matrix and a statevector.
pub fn quadratic_form(m: &CMat, amps: &[C]) -> C {
    assert_eq!(m.dim, amps.len());
    let mut acc = C::new(0.0, 0.0);
    for i in 0..m.dim {
        for j in 0..m.dim {
            acc += amps[i].conj() * m.get(i, j) * amps[j];
        }
    }
    acc
}

/// All 4^n phase-0 strings on n qubits.
pub fn all_strings(n: usize) -> Vec<PauliString> {
    let letters = ['I', 'X', 'Y', 'Z'];
    let mut out = Vec::with_capacity(4usize.pow(n as u32));
    for idx in 0..4usize.pow(n as u32) {
        let mut label = String::with_capacity(n);
        let mut v = idx;
        for _ in 0..n {
            label.push(letters[v % 4]);
            v /= 4;
        }
        out.push(PauliString::from_labels(&label, 0).unwrap());
    }
    out
}

/// Every generator gate on n qubits.
pub fn all_gates(n: usize) -> Vec<CliffordGate> {
    let mut gates = Vec::new();
    for q in 0..n {
        gates.push(CliffordGate::H { qubit: q });
        gates.push(CliffordGate::Rx90 { qubit: q });
    }
    for c in 0..n {
        for t in 0..n {
            if c != t {
                gates.push(CliffordGate::Cnot { control: c, target: t });
            }
        }
    }
    gates
}
