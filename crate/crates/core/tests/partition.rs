//! Whole-pipeline partition checks: group counts, coverage, conservation,
//! and commutation on real and synthetic inputs.

mod common;

use hamgroup::fermion::jw_excitation;
use hamgroup::grouping::{
    partition_terms, spin_predicted_counts, verify_partition, GroupSector, Partition,
};
use hamgroup::hamiltonian::{parse_fcidump, synth_chain, synth_dense, HamiltonianSpec};
use hamgroup::pauli::PauliSum;

fn partition_spec(spec: &HamiltonianSpec, threshold: f64) -> Partition {
    let terms = spec.to_spin_orbital_terms(threshold).unwrap();
    partition_terms(&terms, spec.n_qubits(), spec.core_energy, threshold).unwrap()
}

fn h2_spec() -> HamiltonianSpec {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/data/h2_sto3g.fcidump"
    ))
    .unwrap();
    parse_fcidump(&text).unwrap()
}

#[test]
fn h2_partitions_into_two_groups() {
    let p = partition_spec(&h2_spec(), 1e-12);
    assert_eq!(p.n_strings(), 15);
    assert_eq!(p.n_qubits, 4);
    assert_eq!(p.n_groups(), 2);
    let sectors: Vec<GroupSector> = p.groups.iter().map(|g| g.sector).collect();
    assert!(sectors.contains(&GroupSector::Diagonal));
    assert!(sectors.contains(&GroupSector::CrossDouble));
    verify_partition(&p).unwrap();
}

#[test]
fn dense_n16_reproduces_factorized_double_counts() {
    let spec = synth_dense(8, 31).unwrap();
    let p = partition_spec(&spec, 1e-12);
    let pure = p
        .groups
        .iter()
        .filter(|g| g.sector == GroupSector::PureDouble)
        .count();
    let cross = p
        .groups
        .iter()
        .filter(|g| g.sector == GroupSector::CrossDouble)
        .count();
    assert_eq!(pure, 35);
    assert_eq!(cross, 196);
    assert_eq!(spin_predicted_counts(16), 231);
}

#[test]
fn dense_n8_counts() {
    let spec = synth_dense(4, 13).unwrap();
    let p = partition_spec(&spec, 1e-12);
    let pure = p
        .groups
        .iter()
        .filter(|g| g.sector == GroupSector::PureDouble)
        .count();
    let cross = p
        .groups
        .iter()
        .filter(|g| g.sector == GroupSector::CrossDouble)
        .count();
    assert_eq!(pure, 1);
    assert_eq!(cross, 18);
    assert_eq!(spin_predicted_counts(8), 19);
    // Triple sector: at least two halves per perfectly packed bundle
    // (C(8,3) = 56 units, two disjoint triples per bundle), with bounded
    // first-fit slack.
    let triples = p
        .groups
        .iter()
        .filter(|g| matches!(g.sector, GroupSector::TripleBlue | GroupSector::TripleRed))
        .count();
    assert!((56..=72).contains(&triples), "triple groups: {triples}");
}

#[test]
fn conservation_and_commutation_on_sparse_instances() {
    for seed in [1u64, 2, 3] {
        let spec = synth_chain(4, 2, seed).unwrap();
        let terms = spec.to_spin_orbital_terms(1e-12).unwrap();
        let p = partition_terms(&terms, spec.n_qubits(), spec.core_energy, 1e-12).unwrap();
        verify_partition(&p).unwrap();

        // Rebuild the expansion independently and compare multisets.
        let mut expect = PauliSum::new(spec.n_qubits());
        for t in &terms {
            for w in jw_excitation(t, spec.n_qubits()).unwrap() {
                expect.add_weighted(&w).unwrap();
            }
        }
        expect.add_constant(spec.core_energy);
        expect.prune(1e-12);
        let mut grouped = PauliSum::new(spec.n_qubits());
        for g in &p.groups {
            for w in &g.strings {
                grouped.add_weighted(w).unwrap();
            }
        }
        assert_eq!(grouped, expect);
    }
}

#[test]
fn every_group_string_appears_once() {
    let spec = synth_dense(3, 41).unwrap();
    let p = partition_spec(&spec, 1e-12);
    let mut seen = std::collections::HashSet::new();
    for g in &p.groups {
        for w in &g.strings {
            assert!(seen.insert(w.string.label()), "{} duplicated", w.string.label());
        }
    }
    assert_eq!(seen.len(), p.n_strings());
}

#[test]
fn diagonal_group_is_unique_and_diagonal() {
    let spec = synth_dense(3, 55).unwrap();
    let p = partition_spec(&spec, 1e-12);
    let diag: Vec<_> = p
        .groups
        .iter()
        .filter(|g| g.sector == GroupSector::Diagonal)
        .collect();
    assert_eq!(diag.len(), 1);
    for w in &diag[0].strings {
        assert!(w.string.is_diagonal());
    }
    for g in &p.groups {
        if g.sector != GroupSector::Diagonal {
            for w in &g.strings {
                assert!(!w.string.is_diagonal());
            }
        }
    }
}

#[test]
fn chain_hamiltonian_group_count_saturates() {
    // Fixed interaction width: the group count must stop growing with
    // system size while the string count keeps growing linearly.
    let mut counts = Vec::new();
    let mut strings = Vec::new();
    for n_spatial in [8, 12, 16, 20] {
        let spec = synth_chain(n_spatial, 2, 7).unwrap();
        let p = partition_spec(&spec, 1e-12);
        counts.push(p.n_groups());
        strings.push(p.n_strings());
    }
    assert!(strings[3] > strings[2] && strings[2] > strings[1]);
    assert_eq!(counts[1], counts[2], "chain group count should saturate: {counts:?}");
    assert_eq!(counts[2], counts[3], "chain group count should saturate: {counts:?}");
}

#[test]
fn empty_hamiltonian_has_no_groups() {
    let p = partition_terms(&[], 4, 0.0, 1e-12).unwrap();
    assert_eq!(p.n_groups(), 0);
    assert_eq!(p.n_strings(), 0);
}

#[test]
fn doubles_only_input_yields_only_double_sectors() {
    // Strip the one-body integrals: every surviving non-diagonal string
    // sits in a double or triple sector driven by two-body terms.
    let mut spec = synth_dense(8, 77).unwrap();
    spec.one_body.clear();
    let p = partition_spec(&spec, 1e-12);
    let doubles = p
        .groups
        .iter()
        .filter(|g| matches!(g.sector, GroupSector::PureDouble | GroupSector::CrossDouble))
        .count();
    assert_eq!(doubles, 231);
}
