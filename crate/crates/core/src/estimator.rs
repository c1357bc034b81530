//! Dense statevector engine for desk-scale verification.
//!
//! Amplitude index convention: qubit 0 is the most significant bit of the
//! basis index, matching the leftmost-first label order of
//! [`PauliString`](crate::pauli::PauliString). Gate kernels act in place on
//! a buffer; grouped evaluation clones the input state once per group, so
//! parallel group evaluations never share mutable state.

use num_complex::Complex64;

use crate::circuit::PreparedGroup;
use crate::pauli::{CliffordCircuit, CliffordGate, WeightedPauli};
use crate::rng::SplitMix64;
use crate::{Error, Result};

/// Hard cap keeping buffers comfortably in memory.
pub const MAX_QUBITS: usize = 14;

/// Normalized pure state on up to [`MAX_QUBITS`] qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    fn check_size(n: usize) -> Result<()> {
        if n > MAX_QUBITS {
            return Err(Error::StateTooLarge { n, max: MAX_QUBITS });
        }
        Ok(())
    }

    /// |0...0>.
    pub fn zero(n: usize) -> Result<Self> {
        Self::check_size(n)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    /// Computational basis state; `bits[q]` is the value of qubit q.
    pub fn basis(n: usize, bits: &[bool]) -> Result<Self> {
        Self::check_size(n)?;
        if bits.len() != n {
            return Err(Error::QubitMismatch(bits.len(), n));
        }
        let mut index = 0usize;
        for (q, &b) in bits.iter().enumerate() {
            if b {
                index |= 1 << (n - 1 - q);
            }
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    /// Haar-like random state: normalized complex normals, seeded.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        Self::check_size(n)?;
        let mut g = SplitMix64::keyed(seed, &[0x5747_4154_45u64, n as u64]);
        let mut amps: Vec<Complex64> = (0..1usize << n)
            .map(|_| Complex64::new(g.standard_normal(), g.standard_normal()))
            .collect();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        Ok(StateVector { n, amps })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        Self::check_size(n)?;
        if amps.len() != 1 << n {
            return Err(Error::QubitMismatch(amps.len(), 1 << n));
        }
        Ok(StateVector { n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn bit_mask(&self, qubit: usize) -> usize {
        1 << (self.n - 1 - qubit)
    }

    /// Apply one gate in place.
    pub fn apply_gate(&mut self, gate: CliffordGate) -> Result<()> {
        match gate {
            CliffordGate::H { qubit } => {
                if qubit >= self.n {
                    return Err(Error::IndexOutOfRange { index: qubit, n: self.n });
                }
                let mask = self.bit_mask(qubit);
                let inv = std::f64::consts::FRAC_1_SQRT_2;
                for i in 0..self.amps.len() {
                    if i & mask == 0 {
                        let a = self.amps[i];
                        let b = self.amps[i | mask];
                        self.amps[i] = (a + b) * inv;
                        self.amps[i | mask] = (a - b) * inv;
                    }
                }
            }
            CliffordGate::Rx90 { qubit } => {
                if qubit >= self.n {
                    return Err(Error::IndexOutOfRange { index: qubit, n: self.n });
                }
                let mask = self.bit_mask(qubit);
                let inv = std::f64::consts::FRAC_1_SQRT_2;
                let mi = Complex64::new(0.0, -1.0);
                for i in 0..self.amps.len() {
                    if i & mask == 0 {
                        let a = self.amps[i];
                        let b = self.amps[i | mask];
                        self.amps[i] = (a + mi * b) * inv;
                        self.amps[i | mask] = (mi * a + b) * inv;
                    }
                }
            }
            CliffordGate::Cnot { control, target } => {
                if control >= self.n {
                    return Err(Error::IndexOutOfRange { index: control, n: self.n });
                }
                if target >= self.n {
                    return Err(Error::IndexOutOfRange { index: target, n: self.n });
                }
                if control == target {
                    return Err(Error::DegenerateCnot(control));
                }
                let cm = self.bit_mask(control);
                let tm = self.bit_mask(target);
                for i in 0..self.amps.len() {
                    if i & cm != 0 && i & tm == 0 {
                        self.amps.swap(i, i | tm);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &CliffordCircuit) -> Result<()> {
        if circuit.n_qubits != self.n {
            return Err(Error::QubitMismatch(circuit.n_qubits, self.n));
        }
        for &g in &circuit.gates {
            self.apply_gate(g)?;
        }
        Ok(())
    }
}

/// Direct expectation `sum_i w_i <psi|P_i|psi>` by sparse string action.
pub fn expectation_direct(
    strings: impl IntoIterator<Item = WeightedPauli>,
    state: &StateVector,
) -> Result<f64> {
    let n = state.n_qubits();
    let mut total = 0.0f64;
    for w in strings {
        if w.string.n_qubits() != n {
            return Err(Error::QubitMismatch(w.string.n_qubits(), n));
        }
        let xmask = w.string.x_index_mask() as usize;
        let zmask = w.string.z_index_mask() as usize;
        let phase = w.string.phase_exp();
        // <psi|P|psi> with P|b> = i^phase (-1)^(z.b) |b ^ x>.
        let mut acc = Complex64::new(0.0, 0.0);
        for b in 0..state.amps.len() {
            let sign = if (b & zmask).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            acc += state.amps[b ^ xmask].conj() * state.amps[b] * sign;
        }
        let ip = match phase % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        let val = ip * acc;
        total += w.weight * val.re;
        if val.im.abs() > 1e-10 {
            return Err(Error::UnverifiedCircuit(format!(
                "non-real expectation {} for {}",
                val.im,
                w.string.label()
            )));
        }
    }
    Ok(total)
}

fn check_prepared(groups: &[PreparedGroup], n: usize) -> Result<()> {
    for g in groups {
        if g.circuit.n_qubits != n {
            return Err(Error::QubitMismatch(g.circuit.n_qubits, n));
        }
        for e in &g.diagonal.entries {
            if !e.diagonal.is_diagonal() {
                return Err(Error::UnverifiedCircuit(format!(
                    "entry {} is not diagonal",
                    e.diagonal.label()
                )));
            }
        }
    }
    Ok(())
}

/// Grouped expectation: rotate a copy of the state by each group's circuit
/// and accumulate `w · sign · <U psi| D |U psi>` from computational-basis
/// probabilities only.
pub fn expectation_grouped(groups: &[PreparedGroup], state: &StateVector) -> Result<f64> {
    check_prepared(groups, state.n_qubits())?;
    let mut total = 0.0f64;
    for g in groups {
        let mut rotated = state.clone();
        rotated.apply_circuit(&g.circuit)?;
        for (b, amp) in rotated.amps.iter().enumerate() {
            let prob = amp.norm_sqr();
            if prob == 0.0 {
                continue;
            }
            let mut value = 0.0;
            for e in &g.diagonal.entries {
                let zmask = e.diagonal.z_index_mask() as usize;
                let parity = if (b & zmask).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                value += e.weight * e.sign * parity;
            }
            total += prob * value;
        }
    }
    Ok(total)
}

/// Shot-sampled grouped estimate with `shots_per_group` multinomial draws
/// per group. Returns (estimate, standard error); deterministic for a fixed
/// seed. Samples are consumed streamingly, never stored.
pub fn sample_grouped(
    groups: &[PreparedGroup],
    state: &StateVector,
    shots_per_group: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    if shots_per_group == 0 {
        return Err(Error::InvalidParams("need at least one shot".into()));
    }
    check_prepared(groups, state.n_qubits())?;
    let mut estimate = 0.0f64;
    let mut variance = 0.0f64;
    for (gi, g) in groups.iter().enumerate() {
        let mut rotated = state.clone();
        rotated.apply_circuit(&g.circuit)?;
        // Inverse-CDF sampling over the rotated distribution.
        let mut cdf = Vec::with_capacity(rotated.amps.len());
        let mut acc = 0.0f64;
        for a in &rotated.amps {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        let norm = acc;
        let zmasks: Vec<usize> = g
            .diagonal
            .entries
            .iter()
            .map(|e| e.diagonal.z_index_mask() as usize)
            .collect();
        let mut rng = SplitMix64::keyed(seed, &[0x53414d50u64, gi as u64]);
        let mut sum = 0.0f64;
        let mut sum_sq = 0.0f64;
        for _ in 0..shots_per_group {
            let u = rng.uniform() * norm;
            let b = match cdf.binary_search_by(|p| p.partial_cmp(&u).unwrap()) {
                Ok(i) => i + 1,
                Err(i) => i,
            }
            .min(cdf.len() - 1);
            let mut value = 0.0;
            for (e, &zmask) in g.diagonal.entries.iter().zip(&zmasks) {
                let parity = if (b & zmask).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                value += e.weight * e.sign * parity;
            }
            sum += value;
            sum_sq += value * value;
        }
        let shots = shots_per_group as f64;
        let mean = sum / shots;
        let var = (sum_sq / shots - mean * mean).max(0.0);
        estimate += mean;
        variance += var / shots;
    }
    Ok((estimate, variance.sqrt()))
}
