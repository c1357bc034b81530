//! Hermitian-paired excitation operators and their Jordan-Wigner expansion.
//!
//! A canonical [`ExcitationTerm`] with coefficient `c` stands for the
//! operator `c · (op + op†) / 2`, where `op` is the normal-ordered product
//! of creation operators (indices ascending) and annihilation operators
//! (indices descending). Reordering a raw operator into this form flips the
//! sign once per transposition; operators with a repeated creation or a
//! repeated annihilation index vanish.
//!
//! Under the Jordan-Wigner mapping
//!
//! ```text
//! a†_j = Z^(j) ⊗ (X - iY)/2,    a_j = Z^(j) ⊗ (X + iY)/2
//! ```
//!
//! (a parity chain of Z on every qubit below j), the Hermitian pairing
//! cancels every imaginary-weight string exactly: singles expand to the two
//! X..X / Y..Y chain strings, doubles with four distinct indices to eight
//! strings, doubles with one repeated index to the four hole/chain patterns
//! on the two remaining active indices, and fully diagonal operators to Z/I
//! strings only.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::pauli::{PauliKey, PauliString, WeightedPauli};
use crate::{Error, Result};

/// Default cutoff below which merged coefficients and cancelled strings are
/// dropped (Hartree).
pub const DEFAULT_THRESHOLD: f64 = 1e-12;

/// A raw `coeff · a†..a..` product, as produced from integral tables.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTerm {
    pub creation: Vec<usize>,
    pub annihilation: Vec<usize>,
    pub coeff: f64,
}

impl RawTerm {
    pub fn new(creation: Vec<usize>, annihilation: Vec<usize>, coeff: f64) -> Self {
        RawTerm { creation, annihilation, coeff }
    }
}

/// Structural class of a canonical excitation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arity {
    /// Number operators and their products: only Z/I strings.
    Diagonal,
    /// One creation, one annihilation, distinct indices.
    Single,
    /// Two-body with exactly one index shared between the creation and
    /// annihilation lists.
    RepeatedDouble,
    /// Two-body on four distinct indices.
    DisjointDouble,
}

/// Canonical Hermitian-paired excitation: `coefficient · (op + op†) / 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcitationTerm {
    /// Creation indices, ascending.
    pub creation: Vec<usize>,
    /// Annihilation indices, descending.
    pub annihilation: Vec<usize>,
    /// Real coefficient (Hartree).
    pub coefficient: f64,
}

impl ExcitationTerm {
    /// Canonicalize an operator, tracking the reordering sign.
    /// Returns `None` when the operator vanishes (repeated ladder index).
    pub fn canonicalize(
        creation: &[usize],
        annihilation: &[usize],
        coeff: f64,
    ) -> Option<ExcitationTerm> {
        let (c_sorted, c_swaps) = sort_count(creation, false)?;
        let (a_sorted, a_swaps) = sort_count(annihilation, true)?;
        let sign = if (c_swaps + a_swaps) % 2 == 0 { 1.0 } else { -1.0 };
        Some(ExcitationTerm {
            creation: c_sorted,
            annihilation: a_sorted,
            coefficient: sign * coeff,
        })
    }

    fn check_canonical(&self) -> Result<()> {
        let asc = self.creation.windows(2).all(|w| w[0] < w[1]);
        let desc = self.annihilation.windows(2).all(|w| w[0] > w[1]);
        let len_ok = matches!(self.creation.len(), 1 | 2)
            && self.creation.len() == self.annihilation.len();
        if !(asc && desc && len_ok) {
            return Err(Error::NonCanonicalTerm(format!("{:?}", self)));
        }
        Ok(())
    }

    /// Key identifying the operator part (no coefficient).
    pub fn op_key(&self) -> (Vec<usize>, Vec<usize>) {
        (self.creation.clone(), self.annihilation.clone())
    }

    /// Canonical key of the Hermitian conjugate operator. The conjugate of a
    /// canonical term is already canonical, with no reordering sign.
    pub fn conj_key(&self) -> (Vec<usize>, Vec<usize>) {
        let mut c: Vec<usize> = self.annihilation.clone();
        c.sort_unstable();
        let mut a: Vec<usize> = self.creation.clone();
        a.sort_unstable_by(|x, y| y.cmp(x));
        (c, a)
    }

    /// Sorted set of distinct indices touched by the excitation.
    pub fn active_indices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .creation
            .iter()
            .chain(self.annihilation.iter())
            .copied()
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn max_index(&self) -> usize {
        *self
            .creation
            .iter()
            .chain(self.annihilation.iter())
            .max()
            .expect("term has indices")
    }

    pub fn arity(&self) -> Arity {
        let mut c = self.creation.clone();
        let mut a = self.annihilation.clone();
        c.sort_unstable();
        a.sort_unstable();
        if c == a {
            return Arity::Diagonal;
        }
        if self.creation.len() == 1 {
            return Arity::Single;
        }
        let shared = self
            .creation
            .iter()
            .filter(|i| self.annihilation.contains(i))
            .count();
        match shared {
            0 => Arity::DisjointDouble,
            1 => Arity::RepeatedDouble,
            _ => Arity::Diagonal,
        }
    }
}

fn sort_count(indices: &[usize], descending: bool) -> Option<(Vec<usize>, usize)> {
    let mut v = indices.to_vec();
    let mut swaps = 0usize;
    // Insertion sort with transposition count; lists have length 1 or 2 in
    // practice but the count must be exact for longer inputs too.
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 {
            let out_of_order = if descending { v[j - 1] < v[j] } else { v[j - 1] > v[j] };
            if out_of_order {
                v.swap(j - 1, j);
                swaps += 1;
                j -= 1;
            } else {
                break;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None; // a†a† or aa on the same index
    }
    Some((v, swaps))
}

/// Pair raw operators with their Hermitian conjugates and merge
/// coefficients into canonical terms.
///
/// For a conjugate pair the merged coefficient is the sum of the two raw
/// values; a self-conjugate operator keeps its own. Terms with a merged
/// |coefficient| below `threshold` are dropped. A conjugate pair whose raw
/// coefficients disagree beyond tolerance signals a non-Hermitian input.
pub fn reduce_hermitian(raw: &[RawTerm], threshold: f64) -> Result<Vec<ExcitationTerm>> {
    type Key = (Vec<usize>, Vec<usize>);
    let mut amounts: BTreeMap<Key, f64> = BTreeMap::new();
    for t in raw {
        if let Some(c) = ExcitationTerm::canonicalize(&t.creation, &t.annihilation, t.coeff) {
            *amounts.entry(c.op_key()).or_insert(0.0) += c.coefficient;
        }
    }

    let mut out = Vec::new();
    let keys: Vec<Key> = amounts.keys().cloned().collect();
    for key in keys {
        let Some(&h) = amounts.get(&key) else { continue };
        let probe = ExcitationTerm {
            creation: key.0.clone(),
            annihilation: key.1.clone(),
            coefficient: h,
        };
        let conj = probe.conj_key();
        let coefficient = if conj == key {
            amounts.remove(&key);
            h
        } else {
            let h_conj = amounts.remove(&conj).unwrap_or(0.0);
            amounts.remove(&key);
            let scale = 1.0 + h.abs().max(h_conj.abs());
            if (h - h_conj).abs() > 1e-9 * scale {
                return Err(Error::NonHermitian {
                    key: format!("{:?}", key),
                    a: h,
                    b: h_conj,
                });
            }
            h + h_conj
        };
        if coefficient.abs() >= threshold {
            out.push(ExcitationTerm {
                creation: key.0,
                annihilation: key.1,
                coefficient,
            });
        }
    }
    out.sort_by(|a, b| a.op_key().cmp(&b.op_key()));
    Ok(out)
}

/// One ladder operator as a two-string sum: chain ⊗ X and chain ⊗ Y parts.
fn ladder_parts(n: usize, index: usize, dagger: bool) -> [(Complex64, PauliString); 2] {
    let mut chain = String::new();
    for q in 0..n {
        chain.push(if q < index { 'Z' } else { 'I' });
    }
    let mut x_label: Vec<char> = chain.chars().collect();
    x_label[index] = 'X';
    let mut y_label = x_label.clone();
    y_label[index] = 'Y';
    let x_part = PauliString::from_labels(&x_label.iter().collect::<String>(), 0).unwrap();
    let y_part = PauliString::from_labels(&y_label.iter().collect::<String>(), 0).unwrap();
    let iy = if dagger {
        Complex64::new(0.0, -0.5)
    } else {
        Complex64::new(0.0, 0.5)
    };
    [(Complex64::new(0.5, 0.0), x_part), (iy, y_part)]
}

/// Multiply out a ladder-operator product into phase-free strings with
/// complex coefficients, accumulated by bit pattern.
fn expand_ladder_product(
    n: usize,
    factors: &[(usize, bool)],
) -> BTreeMap<PauliKey, Complex64> {
    let mut acc: Vec<(Complex64, PauliString)> =
        vec![(Complex64::new(1.0, 0.0), PauliString::identity(n))];
    for &(index, dagger) in factors {
        let parts = ladder_parts(n, index, dagger);
        let mut next = Vec::with_capacity(acc.len() * 2);
        for (c, p) in &acc {
            for (d, q) in &parts {
                let prod = p.multiply(q).expect("equal qubit count");
                let phase = Complex64::i().powu(prod.phase_exp() as u32);
                next.push((c * d * phase, prod.with_phase(0)));
            }
        }
        acc = next;
    }
    let mut map: BTreeMap<PauliKey, Complex64> = BTreeMap::new();
    for (c, p) in acc {
        *map.entry(p.key()).or_insert(Complex64::new(0.0, 0.0)) += c;
    }
    map
}

/// Expand `coefficient · (op + op†) / 2` into real-weighted Pauli strings.
///
/// All imaginary components cancel exactly; any residual beyond numerical
/// noise reports an error. Strings whose real weight cancels to zero are
/// dropped.
pub fn jw_excitation(term: &ExcitationTerm, n_qubits: usize) -> Result<Vec<WeightedPauli>> {
    term.check_canonical()?;
    if term.max_index() >= n_qubits {
        return Err(Error::IndexOutOfRange { index: term.max_index(), n: n_qubits });
    }

    let mut factors: Vec<(usize, bool)> = Vec::new();
    for &c in &term.creation {
        factors.push((c, true));
    }
    for &a in &term.annihilation {
        factors.push((a, false));
    }
    let fwd = expand_ladder_product(n_qubits, &factors);

    // op† expands to the same bit patterns; conjugate the coefficient and
    // flip the sign once per qubit carrying both X and Z (reversing XZ).
    let mut total: BTreeMap<PauliKey, Complex64> = BTreeMap::new();
    for (key, c) in &fwd {
        let s = key.to_string_on(n_qubits);
        let y_parity = if s.x_support().iter().filter(|&&q| s.z_bit(q)).count() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        let entry = total.entry(key.clone()).or_insert(Complex64::new(0.0, 0.0));
        *entry += c + c.conj() * y_parity;
    }

    let scale = term.coefficient / 2.0;
    let mut out = Vec::new();
    for (key, c) in total {
        let s = key.to_string_on(n_qubits);
        // Weight relative to the label operator: label = i^{#Y} · (XZ form).
        let y_count = s.x_support().iter().filter(|&&q| s.z_bit(q)).count() as u32;
        let w = c * Complex64::i().powu((4 - y_count % 4) % 4);
        debug_assert!(w.im.abs() < 1e-12 * (1.0 + w.re.abs()));
        if w.im.abs() > 1e-9 * (1.0 + w.re.abs()) {
            return Err(Error::NonCanonicalTerm(format!(
                "imaginary weight {} survived cancellation for {:?}",
                w.im, term
            )));
        }
        let weight = scale * w.re;
        if weight != 0.0 {
            out.push(WeightedPauli { string: s, weight });
        }
    }
    Ok(out)
}
