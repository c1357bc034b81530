//! Clifford circuit synthesis that simultaneously diagonalizes a commuting
//! group.
//!
//! Strings are processed in ascending order of their largest X/Y position
//! (label order breaks ties). Each string is first conjugated through the
//! circuit accumulated so far; if it is still not diagonal, a CNOT chain
//! runs over its X-component positions in ascending order with control on
//! the larger index of each consecutive pair, leaving a single X or Y on
//! the largest position, which one H or Rx(pi/2) then kills. Re-conjugating
//! later strings through the accumulated circuit absorbs any Z factors the
//! earlier passes rearranged, so each qubit is touched O(1) times and the
//! whole group costs O(N) gates.

use serde::{Deserialize, Serialize};

use crate::grouping::{CommutingGroup, GroupSector};
use crate::pauli::{CliffordCircuit, CliffordGate, PauliString, WeightedPauli};
use crate::{Error, Result};

/// Final diagonal image of one group member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalEntry {
    /// The input string (label form).
    pub source: PauliString,
    /// Its weight in the Hamiltonian.
    pub weight: f64,
    /// The conjugated string; X-component empty.
    pub diagonal: PauliString,
    /// Sign acquired under conjugation, +1 or -1.
    pub sign: f64,
}

/// Per-group diagonalization output: the circuit plus every member's
/// diagonal image and sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalForm {
    pub entries: Vec<DiagonalEntry>,
}

/// Synthesize the diagonalizing circuit for a pairwise-commuting set of
/// weighted strings. Fails if any member remains non-diagonal after the
/// final sweep (a non-conforming group is never silently skipped).
pub fn diagonalize_strings(
    strings: &[WeightedPauli],
    n_qubits: usize,
) -> Result<(CliffordCircuit, DiagonalForm)> {
    let mut order: Vec<usize> = (0..strings.len()).collect();
    let sort_key = |w: &WeightedPauli| -> (usize, String) {
        let key = w
            .string
            .support()
            .last()
            .copied()
            .map(|q| q + 1)
            .unwrap_or(0);
        (key, w.string.label())
    };
    order.sort_by(|&a, &b| sort_key(&strings[a]).cmp(&sort_key(&strings[b])));

    let mut circuit = CliffordCircuit::new(n_qubits);
    for &i in &order {
        let mut cur = strings[i].string.apply_circuit(&circuit)?;
        if cur.is_diagonal() {
            continue;
        }
        let xs = cur.x_support();
        for pair in xs.windows(2) {
            let gate = CliffordGate::Cnot { control: pair[1], target: pair[0] };
            circuit.push(gate)?;
            cur = cur.apply_gate(gate)?;
        }
        let last = *xs.last().expect("non-diagonal string has X support");
        debug_assert!(cur.x_bit(last));
        let gate = if cur.z_bit(last) {
            CliffordGate::Rx90 { qubit: last }
        } else {
            CliffordGate::H { qubit: last }
        };
        circuit.push(gate)?;
        cur = cur.apply_gate(gate)?;
        if !cur.is_diagonal() {
            return Err(Error::NotDiagonalized(strings[i].string.label()));
        }
    }

    // Final sweep: every member must be diagonal under the full circuit.
    let mut entries = Vec::with_capacity(strings.len());
    for w in strings {
        let d = w.string.apply_circuit(&circuit)?;
        if !d.is_diagonal() {
            return Err(Error::NotDiagonalized(w.string.label()));
        }
        let sign = d.hermitian_sign()?;
        entries.push(DiagonalEntry {
            source: w.string.clone(),
            weight: w.weight,
            diagonal: d.with_phase(0),
            sign,
        });
    }
    Ok((circuit, DiagonalForm { entries }))
}

/// Synthesize for a [`CommutingGroup`]; diagonal groups get an empty
/// circuit.
pub fn diagonalize_group(
    group: &CommutingGroup,
    n_qubits: usize,
) -> Result<(CliffordCircuit, DiagonalForm)> {
    diagonalize_strings(&group.strings, n_qubits)
}

/// Verification report for one (group, circuit) pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub all_diagonal: bool,
    pub gate_count: usize,
    pub gate_bound: usize,
    pub within_bound: bool,
    pub signs: Vec<f64>,
    pub failures: Vec<String>,
}

/// Re-conjugate every member through the circuit and report diagonality,
/// the gate count against the 3N bound, and the per-string signs.
pub fn verify_diagonalization(group: &CommutingGroup, circuit: &CliffordCircuit) -> VerifyReport {
    let mut report = VerifyReport {
        all_diagonal: true,
        gate_count: circuit.len(),
        gate_bound: 3 * circuit.n_qubits,
        within_bound: circuit.len() <= 3 * circuit.n_qubits,
        signs: Vec::with_capacity(group.strings.len()),
        failures: Vec::new(),
    };
    for w in &group.strings {
        match w.string.apply_circuit(circuit) {
            Ok(d) => {
                if !d.is_diagonal() {
                    report.all_diagonal = false;
                    report.failures.push(format!("{} not diagonal", w.string.label()));
                    report.signs.push(0.0);
                } else {
                    match d.hermitian_sign() {
                        Ok(s) => report.signs.push(s),
                        Err(e) => {
                            report.all_diagonal = false;
                            report.failures.push(e.to_string());
                            report.signs.push(0.0);
                        }
                    }
                }
            }
            Err(e) => {
                report.all_diagonal = false;
                report.failures.push(e.to_string());
                report.signs.push(0.0);
            }
        }
    }
    report
}

/// A group bundled with its verified circuit and diagonal form, ready for
/// grouped estimation.
#[derive(Debug, Clone)]
pub struct PreparedGroup {
    pub sector: GroupSector,
    pub circuit: CliffordCircuit,
    pub diagonal: DiagonalForm,
}

/// Diagonalize and verify every group of a partition.
pub fn prepare_groups(groups: &[CommutingGroup], n_qubits: usize) -> Result<Vec<PreparedGroup>> {
    groups
        .iter()
        .map(|g| {
            let (circuit, diagonal) = diagonalize_group(g, n_qubits)?;
            Ok(PreparedGroup { sector: g.sector, circuit, diagonal })
        })
        .collect()
}
