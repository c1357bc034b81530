//! Spin-factorized partition of a Hamiltonian into commuting groups.
//!
//! After Jordan-Wigner expansion and cross-term cancellation, every
//! surviving string falls into one of four shapes:
//!
//! * diagonal (Z/I only) — all such strings share one computational-basis
//!   group;
//! * two X/Y positions with equal letters — singles and repeated-index
//!   doubles; these live on 3-index sets and split into two commuting
//!   halves per set ("blue" and "red"), scheduled by a k=3 partition over
//!   all qubits;
//! * four X/Y positions, all in one spin half — same-spin doubles,
//!   scheduled by a k=4 partition over that half, with the alpha and beta
//!   schedules concatenated class by class;
//! * four X/Y positions, two per spin half — cross doubles, scheduled by
//!   pairing the round-robin matchings of the two halves at every rotation
//!   offset, so each (alpha-pair, beta-pair) combination appears exactly
//!   once.
//!
//! Sparse inputs are first-fit packed in dense-schedule order, which
//! reproduces the dense schedule when nothing is missing. Every emitted
//! group is verified pairwise-commuting; a verifier failure aborts the
//! partition rather than emitting a bad group.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::baranyai::{self, binomial, SubsetSchedule};
use crate::fermion::{jw_excitation, Arity, ExcitationTerm};
use crate::pauli::{PauliKey, PauliString, PauliSum, WeightedPauli};
use crate::{Error, Result};

/// Sector of a classified excitation term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TermSector {
    Diagonal,
    /// Singles and one-repeat doubles; lives on a (padded) 3-index set.
    Triple,
    AlphaDouble,
    BetaDouble,
    CrossDouble,
}

/// Classification of one term: its sector and sorted active index set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermClass {
    pub sector: TermSector,
    pub active_indices: Vec<usize>,
}

/// Sector label of an emitted commuting group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupSector {
    Diagonal,
    PureDouble,
    CrossDouble,
    TripleBlue,
    TripleRed,
}

/// Schedule coordinates of a group. Absent fields do not apply to the
/// sector; `overflow` numbers groups the greedy packer had to open beyond
/// the dense schedule.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ScheduleId {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub class: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub beta_class: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rotation: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub overflow: Option<usize>,
}

/// A verified set of mutually commuting weighted strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutingGroup {
    pub sector: GroupSector,
    pub schedule_id: ScheduleId,
    pub strings: Vec<WeightedPauli>,
    /// Index sets of the schedule units packed into this group (pairwise
    /// disjoint except for the diagonal group, which has none).
    #[serde(default)]
    pub units: Vec<Vec<usize>>,
    /// Positions in the caller's term list contributing strings here.
    #[serde(skip)]
    pub term_indices: Vec<usize>,
}

/// Result of a full partition: the accumulated expansion and its groups.
#[derive(Debug, Clone)]
pub struct Partition {
    pub n_qubits: usize,
    pub expansion: PauliSum,
    pub groups: Vec<CommutingGroup>,
}

impl Partition {
    pub fn n_strings(&self) -> usize {
        self.expansion.len()
    }

    pub fn n_groups(&self) -> usize {
        self.groups.len()
    }
}

/// Serialized form of a partition, the `groups` output format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupsFile {
    pub n_qubits: usize,
    pub groups: Vec<CommutingGroup>,
}

impl GroupsFile {
    pub fn from_partition(p: &Partition) -> Self {
        GroupsFile { n_qubits: p.n_qubits, groups: p.groups.clone() }
    }
}

fn spin_of(index: usize, n_qubits: usize) -> bool {
    // false = alpha (first half), true = beta.
    index >= n_qubits / 2
}

/// Assign every term its sector, enforcing the spin selection rule.
pub fn classify_terms(
    terms: &[ExcitationTerm],
    n_qubits: usize,
) -> Result<Vec<TermClass>> {
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        if t.max_index() >= n_qubits {
            return Err(Error::IndexOutOfRange { index: t.max_index(), n: n_qubits });
        }
        let alpha_count = t
            .creation
            .iter()
            .chain(t.annihilation.iter())
            .filter(|&&i| !spin_of(i, n_qubits))
            .count();
        if alpha_count % 2 != 0 {
            return Err(Error::SpinForbidden(format!("{t:?}")));
        }
        let active = t.active_indices();
        let sector = match t.arity() {
            Arity::Diagonal => TermSector::Diagonal,
            Arity::Single | Arity::RepeatedDouble => TermSector::Triple,
            Arity::DisjointDouble => {
                let alphas = active.iter().filter(|&&i| !spin_of(i, n_qubits)).count();
                match alphas {
                    4 => TermSector::AlphaDouble,
                    0 => TermSector::BetaDouble,
                    2 => TermSector::CrossDouble,
                    _ => return Err(Error::SpinForbidden(format!("{t:?}"))),
                }
            }
        };
        out.push(TermClass { sector, active_indices: active });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Schedules
// ---------------------------------------------------------------------------

/// Round-robin 1-factorization of the pairs of [v] (circle method).
/// Even v: v-1 rounds of v/2 disjoint pairs. Odd v: v rounds of (v-1)/2
/// pairs, one vertex sitting out per round. Every pair appears exactly once.
pub fn circle_matchings(v: usize) -> Vec<Vec<(usize, usize)>> {
    let mut rounds = Vec::new();
    if v < 2 {
        return rounds;
    }
    if v % 2 == 0 {
        let m = v - 1;
        for r in 0..m {
            let mut round = vec![(r, v - 1)];
            for i in 1..v / 2 {
                let a = (r + i) % m;
                let b = (r + m - i) % m;
                round.push((a.min(b), a.max(b)));
            }
            round.sort_unstable();
            rounds.push(round);
        }
    } else {
        for r in 0..v {
            let mut round = Vec::new();
            for i in 1..=(v - 1) / 2 {
                let a = (r + i) % v;
                let b = (r + v - i) % v;
                round.push((a.min(b), a.max(b)));
            }
            round.sort_unstable();
            rounds.push(round);
        }
    }
    rounds
}

/// Same-spin schedule: k=4 classes over the alpha half concatenated with
/// the shifted beta classes. Subsets containing virtual (embedding)
/// elements are dropped; the class count is preserved.
pub fn pure_spin_schedule(n_qubits: usize) -> Result<Vec<Vec<Vec<usize>>>> {
    if n_qubits % 2 != 0 {
        return Err(Error::InvalidParams("qubit count must be even".into()));
    }
    let m = n_qubits / 2;
    if m < 4 {
        return Ok(Vec::new());
    }
    let sched = baranyai::baranyai_partition(m, 4)?;
    let mut classes = Vec::with_capacity(sched.len());
    for class in &sched.classes {
        let mut combined = Vec::new();
        for subset in class {
            if subset.iter().all(|&e| e < m) {
                combined.push(subset.clone());
            }
        }
        for subset in class {
            if subset.iter().all(|&e| e < m) {
                combined.push(subset.iter().map(|&e| e + m).collect());
            }
        }
        classes.push(combined);
    }
    Ok(classes)
}

/// One cross-double group: a rotation pairing of an alpha matching with a
/// beta matching. Pairs are in spin-orbital coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossGroupSlot {
    pub alpha_class: usize,
    pub beta_class: usize,
    pub rotation: usize,
    pub combos: Vec<((usize, usize), (usize, usize))>,
}

/// Cross-double schedule: for every alpha matching A, beta matching B and
/// rotation offset, pair A's i-th pair with B's (i+offset)-th pair. Every
/// (alpha-pair, beta-pair) combination appears in exactly one group.
pub fn cross_double_schedule(n_qubits: usize) -> Result<Vec<CrossGroupSlot>> {
    if n_qubits % 2 != 0 {
        return Err(Error::InvalidParams("qubit count must be even".into()));
    }
    let m = n_qubits / 2;
    let rounds = circle_matchings(m);
    let mut out = Vec::new();
    let Some(first) = rounds.first() else {
        return Ok(out);
    };
    let pairs_per_round = first.len();
    for (a, alpha_round) in rounds.iter().enumerate() {
        for (b, beta_round) in rounds.iter().enumerate() {
            for rot in 0..pairs_per_round {
                let mut combos = Vec::with_capacity(pairs_per_round);
                for i in 0..pairs_per_round {
                    let ap = alpha_round[i];
                    let bp = beta_round[(i + rot) % pairs_per_round];
                    combos.push((ap, (bp.0 + m, bp.1 + m)));
                }
                out.push(CrossGroupSlot {
                    alpha_class: a,
                    beta_class: b,
                    rotation: rot,
                    combos,
                });
            }
        }
    }
    Ok(out)
}

/// k=3 schedule over all qubit indices (embedded when 3 does not divide N);
/// each class later splits into a blue and a red group.
pub fn triple_schedule(n_qubits: usize) -> Result<SubsetSchedule> {
    baranyai::baranyai_partition(n_qubits, 3)
}

/// Closed-form dense group count for the double-excitation sectors.
pub fn spin_predicted_counts(n_qubits: usize) -> u64 {
    let m = n_qubits / 2;
    let pure = if m < 4 {
        0
    } else {
        let r4 = m % 4;
        if r4 == 0 {
            binomial(m - 1, 3)
        } else {
            binomial(m + 4 - r4 - 1, 3)
        }
    };
    let cross = if m < 2 {
        0
    } else {
        let r2 = m % 2;
        binomial(m, 2)
            * if r2 == 0 {
                binomial(m - 1, 1)
            } else {
                binomial(m + 2 - r2 - 1, 1)
            }
    };
    pure + cross
}

/// Dense prediction across all sectors (doubles + both triple halves + the
/// diagonal group), used as the yardstick for real inputs.
pub fn predicted_group_total(n_qubits: usize) -> u64 {
    let triples = if n_qubits >= 3 {
        2 * baranyai::predicted_class_count(n_qubits, 3)
    } else {
        0
    };
    spin_predicted_counts(n_qubits) + triples + 1
}

// ---------------------------------------------------------------------------
// String classification
// ---------------------------------------------------------------------------

enum StringShape {
    Diagonal,
    Triple { pair: (usize, usize), ends_y: bool },
    PureDouble { unit: Vec<usize> },
    CrossDouble { alpha: (usize, usize), beta: (usize, usize) },
}

fn classify_string(s: &PauliString, n_qubits: usize) -> Result<StringShape> {
    let xs = s.x_support();
    match xs.len() {
        0 => Ok(StringShape::Diagonal),
        2 => {
            let a_y = s.z_bit(xs[0]);
            let b_y = s.z_bit(xs[1]);
            if a_y != b_y {
                return Err(Error::UnclassifiableString(s.label()));
            }
            if spin_of(xs[0], n_qubits) != spin_of(xs[1], n_qubits) {
                return Err(Error::UnclassifiableString(format!(
                    "{} has mixed-spin X/Y pair",
                    s.label()
                )));
            }
            Ok(StringShape::Triple { pair: (xs[0], xs[1]), ends_y: a_y })
        }
        4 => {
            let alphas: Vec<usize> = xs
                .iter()
                .copied()
                .filter(|&q| !spin_of(q, n_qubits))
                .collect();
            match alphas.len() {
                4 | 0 => Ok(StringShape::PureDouble { unit: xs }),
                2 => {
                    let betas: Vec<usize> = xs
                        .iter()
                        .copied()
                        .filter(|&q| spin_of(q, n_qubits))
                        .collect();
                    Ok(StringShape::CrossDouble {
                        alpha: (alphas[0], alphas[1]),
                        beta: (betas[0], betas[1]),
                    })
                }
                _ => Err(Error::UnclassifiableString(s.label())),
            }
        }
        _ => Err(Error::UnclassifiableString(s.label())),
    }
}

// ---------------------------------------------------------------------------
// Packing
// ---------------------------------------------------------------------------

struct GroupDraft {
    sector: GroupSector,
    schedule_id: ScheduleId,
    strings: Vec<usize>,
    units: BTreeMap<Vec<usize>, ()>,
    mask: u128,
}

fn index_mask(indices: &[usize]) -> u128 {
    indices.iter().fold(0u128, |m, &e| m | (1u128 << e))
}

/// First-fit over unit-keyed strings, ordered by dense-schedule position.
/// `positions[unit]` must exist for every present unit.
fn pack_units(
    sector: GroupSector,
    units: &BTreeMap<Vec<usize>, Vec<usize>>,
    positions: &HashMap<Vec<usize>, (usize, usize, ScheduleId)>,
    drafts: &mut Vec<GroupDraft>,
) -> Result<()> {
    let mut ordered: Vec<(&Vec<usize>, (usize, usize, &ScheduleId))> = Vec::new();
    for unit in units.keys() {
        let Some((c, s, id)) = positions.get(unit) else {
            return Err(Error::SubsetNotInSchedule(unit.clone()));
        };
        ordered.push((unit, (*c, *s, id)));
    }
    ordered.sort_by(|a, b| (a.1 .0, a.1 .1, a.0).cmp(&(b.1 .0, b.1 .1, b.0)));

    let start = drafts.len();
    for (unit, (_, _, id)) in ordered {
        let mask = index_mask(unit);
        let slot = drafts[start..]
            .iter()
            .position(|d| d.mask & mask == 0)
            .map(|i| i + start);
        let gi = match slot {
            Some(g) => g,
            None => {
                drafts.push(GroupDraft {
                    sector,
                    schedule_id: id.clone(),
                    strings: Vec::new(),
                    units: BTreeMap::new(),
                    mask: 0,
                });
                drafts.len() - 1
            }
        };
        drafts[gi].mask |= mask;
        drafts[gi].units.insert(unit.clone(), ());
        drafts[gi].strings.extend_from_slice(&units[unit]);
    }
    Ok(())
}

/// Partition canonical terms into verified commuting groups.
pub fn partition_hamiltonian(
    terms: &[ExcitationTerm],
    n_qubits: usize,
) -> Result<Partition> {
    partition_terms(terms, n_qubits, 0.0, crate::fermion::DEFAULT_THRESHOLD)
}

/// Full pipeline with an additive constant (core energy) and a string-level
/// cancellation threshold.
pub fn partition_terms(
    terms: &[ExcitationTerm],
    n_qubits: usize,
    constant: f64,
    threshold: f64,
) -> Result<Partition> {
    if n_qubits > 128 {
        return Err(Error::InvalidParams(
            "partitioning supports up to 128 qubits".into(),
        ));
    }
    // Validates the spin rule and canonical form up front.
    let _classes = classify_terms(terms, n_qubits)?;

    let mut expansion = PauliSum::new(n_qubits);
    let mut per_term: Vec<Vec<PauliKey>> = Vec::with_capacity(terms.len());
    for t in terms {
        let strings = jw_excitation(t, n_qubits)?;
        per_term.push(strings.iter().map(|w| w.string.key()).collect());
        for w in &strings {
            expansion.add_weighted(w)?;
        }
    }
    if constant != 0.0 {
        expansion.add_constant(constant);
    }
    expansion.prune(threshold);

    let weighted: Vec<WeightedPauli> = expansion.iter().collect();

    // Classify surviving strings.
    let mut diagonal: Vec<usize> = Vec::new();
    let mut triple_strings: Vec<usize> = Vec::new();
    let mut pure_units: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    let mut cross_units: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (i, w) in weighted.iter().enumerate() {
        match classify_string(&w.string, n_qubits)? {
            StringShape::Diagonal => diagonal.push(i),
            StringShape::Triple { .. } => triple_strings.push(i),
            StringShape::PureDouble { unit } => {
                pure_units.entry(unit).or_default().push(i);
            }
            StringShape::CrossDouble { alpha, beta } => {
                let unit = vec![alpha.0, alpha.1, beta.0, beta.1];
                cross_units.entry(unit).or_default().push(i);
            }
        }
    }

    let mut drafts: Vec<GroupDraft> = Vec::new();

    // Diagonal sector: one computational-basis group.
    if !diagonal.is_empty() {
        drafts.push(GroupDraft {
            sector: GroupSector::Diagonal,
            schedule_id: ScheduleId::default(),
            strings: diagonal,
            units: BTreeMap::new(),
            mask: 0,
        });
    }

    // Same-spin doubles.
    if !pure_units.is_empty() {
        let classes = pure_spin_schedule(n_qubits)?;
        let mut positions: HashMap<Vec<usize>, (usize, usize, ScheduleId)> = HashMap::new();
        for (c, class) in classes.iter().enumerate() {
            for (s, subset) in class.iter().enumerate() {
                positions.insert(
                    subset.clone(),
                    (c, s, ScheduleId { class: Some(c), ..Default::default() }),
                );
            }
        }
        pack_units(GroupSector::PureDouble, &pure_units, &positions, &mut drafts)?;
    }

    // Cross doubles.
    if !cross_units.is_empty() {
        let slots = cross_double_schedule(n_qubits)?;
        let mut positions: HashMap<Vec<usize>, (usize, usize, ScheduleId)> = HashMap::new();
        for (g, slot) in slots.iter().enumerate() {
            for (i, (ap, bp)) in slot.combos.iter().enumerate() {
                positions.insert(
                    vec![ap.0, ap.1, bp.0, bp.1],
                    (
                        g,
                        i,
                        ScheduleId {
                            class: Some(slot.alpha_class),
                            beta_class: Some(slot.beta_class),
                            rotation: Some(slot.rotation),
                            ..Default::default()
                        },
                    ),
                );
            }
        }
        // Guard against a combo absent from the schedule (would indicate a
        // coverage bug).
        for unit in cross_units.keys() {
            if !positions.contains_key(unit) {
                return Err(Error::SubsetNotInSchedule(unit.clone()));
            }
        }
        pack_units(GroupSector::CrossDouble, &cross_units, &positions, &mut drafts)?;
    }

    // Triple sector: string-level greedy with the structural blue/red rule
    // and an explicit commutation check on every placement.
    if !triple_strings.is_empty() {
        pack_triples(
            n_qubits,
            &weighted,
            &triple_strings,
            &mut drafts,
        )?;
    }

    // Assemble, verify, and attribute terms.
    let mut groups = Vec::with_capacity(drafts.len());
    for d in drafts {
        let strings: Vec<WeightedPauli> =
            d.strings.iter().map(|&i| weighted[i].clone()).collect();
        groups.push(CommutingGroup {
            sector: d.sector,
            schedule_id: d.schedule_id,
            strings,
            units: d.units.into_keys().collect(),
            term_indices: Vec::new(),
        });
    }

    let mut key_to_group: HashMap<PauliKey, usize> = HashMap::new();
    for (g, group) in groups.iter().enumerate() {
        for w in &group.strings {
            key_to_group.insert(w.string.key(), g);
        }
    }
    for (ti, keys) in per_term.iter().enumerate() {
        let mut seen = std::collections::HashSet::new();
        for key in keys {
            if let Some(&g) = key_to_group.get(key) {
                if seen.insert(g) {
                    groups[g].term_indices.push(ti);
                }
            }
        }
    }

    let partition = Partition { n_qubits, expansion, groups };
    verify_partition(&partition)?;
    Ok(partition)
}

/// Repeated-index position of a triple-sector string: the one place where
/// its Z pattern deviates from the plain parity chain between the X/Y ends.
/// `None` means a pure chain string (a bare single), which needs a pad.
fn hole_position(s: &PauliString, pair: (usize, usize)) -> Result<Option<usize>> {
    let (a, b) = pair;
    let mut deviations = Vec::new();
    for q in 0..s.n_qubits() {
        if q == a || q == b {
            continue;
        }
        let in_chain = q > a && q < b;
        if in_chain != s.z_bit(q) {
            deviations.push(q);
        }
    }
    match deviations.len() {
        0 => Ok(None),
        1 => Ok(Some(deviations[0])),
        _ => Err(Error::UnclassifiableString(s.label())),
    }
}

/// Translation-stable ordering key for a triple-sector unit: the anchor
/// spatial orbital followed by the (spatial offset, spin) shape of the
/// members. Growing a banded system extends the unit stream without
/// reshuffling it, so the first-fit packing saturates.
fn spatial_unit_key(unit: &[usize], n_qubits: usize) -> (usize, Vec<(usize, u8)>) {
    let m = n_qubits / 2;
    let spatial = |i: usize| if i < m { i } else { i - m };
    let spin = |i: usize| u8::from(i >= m);
    let base = unit.iter().map(|&i| spatial(i)).min().unwrap_or(0);
    let mut shape: Vec<(usize, u8)> = unit
        .iter()
        .map(|&i| (spatial(i) - base, spin(i)))
        .collect();
    shape.sort_unstable();
    (base, shape)
}

/// Unit-level packer for the triple sector.
///
/// Strings with a repeated index carry a canonical 3-index unit. Bare
/// singles join a sibling unit already holding their X/Y pair if the
/// matching color half accepts them (commutation checked, not assumed) and
/// otherwise stand alone as a 2-index unit. Units are then first-fit packed
/// by index disjointness in spatial order; every packed bundle emits its
/// blue and red halves as separate groups.
fn pack_triples(
    n_qubits: usize,
    weighted: &[WeightedPauli],
    string_idxs: &[usize],
    drafts: &mut Vec<GroupDraft>,
) -> Result<()> {
    // Color of a string given the I/Z pattern at its unit's third index;
    // an absent pad behaves as identity.
    let color_on = |s: &PauliString, ends_y: bool, third: Option<usize>| -> bool {
        let third_z = third.map(|t| s.z_bit(t)).unwrap_or(false);
        ends_y == third_z
    };

    struct Unit {
        blue: Vec<usize>,
        red: Vec<usize>,
    }
    let mut units: BTreeMap<Vec<usize>, Unit> = BTreeMap::new();
    // pair -> third indices of the hole units containing it.
    let mut siblings: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();

    // Pass 1: strings with a canonical repeated index.
    let mut singles: Vec<(usize, (usize, usize), bool, String)> = Vec::new();
    for &i in string_idxs {
        let s = &weighted[i].string;
        let StringShape::Triple { pair, ends_y } = classify_string(s, n_qubits)? else {
            return Err(Error::UnclassifiableString(s.label()));
        };
        match hole_position(s, pair)? {
            Some(hole) => {
                let mut key = vec![pair.0, pair.1, hole];
                key.sort_unstable();
                let unit = units
                    .entry(key)
                    .or_insert(Unit { blue: Vec::new(), red: Vec::new() });
                if color_on(s, ends_y, Some(hole)) {
                    unit.blue.push(i);
                } else {
                    unit.red.push(i);
                }
                siblings.entry(pair).or_default().push(hole);
            }
            None => singles.push((i, pair, ends_y, s.label())),
        }
    }
    for thirds in siblings.values_mut() {
        thirds.sort_unstable();
        thirds.dedup();
    }

    // Pass 2: bare singles.
    singles.sort_by(|x, y| {
        let kx = (spatial_unit_key(&[x.1 .0, x.1 .1], n_qubits), &x.3);
        let ky = (spatial_unit_key(&[y.1 .0, y.1 .1], n_qubits), &y.3);
        kx.cmp(&ky)
    });
    for (i, pair, ends_y, _) in singles {
        let s = &weighted[i].string;
        let mut placed = false;
        if let Some(thirds) = siblings.get(&pair) {
            for &j in thirds {
                let mut key = vec![pair.0, pair.1, j];
                key.sort_unstable();
                let blue = color_on(s, ends_y, Some(j));
                let unit = units.get_mut(&key).expect("sibling unit exists");
                let half = if blue { &unit.blue } else { &unit.red };
                let mut ok = true;
                for &other in half {
                    if !s.commutes(&weighted[other].string)? {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    if blue {
                        unit.blue.push(i);
                    } else {
                        unit.red.push(i);
                    }
                    placed = true;
                    break;
                }
            }
        }
        if !placed {
            let key = vec![pair.0, pair.1];
            let unit = units
                .entry(key)
                .or_insert(Unit { blue: Vec::new(), red: Vec::new() });
            if color_on(s, ends_y, None) {
                unit.blue.push(i);
            } else {
                unit.red.push(i);
            }
        }
    }

    // Pass 3: first-fit by index disjointness in spatial order.
    let mut ordered: Vec<(&Vec<usize>, &Unit)> = units.iter().collect();
    ordered.sort_by(|a, b| {
        (spatial_unit_key(a.0, n_qubits), a.0).cmp(&(spatial_unit_key(b.0, n_qubits), b.0))
    });

    struct Bundle {
        mask: u128,
        units: Vec<Vec<usize>>,
        blue: Vec<usize>,
        red: Vec<usize>,
    }
    let mut bundles: Vec<Bundle> = Vec::new();
    for (key, unit) in ordered {
        let mask = index_mask(key);
        let slot = bundles.iter().position(|b| b.mask & mask == 0);
        let bi = match slot {
            Some(b) => b,
            None => {
                bundles.push(Bundle {
                    mask: 0,
                    units: Vec::new(),
                    blue: Vec::new(),
                    red: Vec::new(),
                });
                bundles.len() - 1
            }
        };
        let b = &mut bundles[bi];
        b.mask |= mask;
        b.units.push(key.clone());
        b.blue.extend_from_slice(&unit.blue);
        b.red.extend_from_slice(&unit.red);
    }

    for (seq, b) in bundles.into_iter().enumerate() {
        for (strings, sector) in [
            (b.blue, GroupSector::TripleBlue),
            (b.red, GroupSector::TripleRed),
        ] {
            if strings.is_empty() {
                continue;
            }
            drafts.push(GroupDraft {
                sector,
                schedule_id: ScheduleId { class: Some(seq), ..Default::default() },
                strings,
                units: b.units.iter().cloned().map(|u| (u, ())).collect(),
                mask: b.mask,
            });
        }
    }
    Ok(())
}

/// Check every partition invariant: pairwise commutation inside each group,
/// unit disjointness, and conservation of the expansion multiset.
pub fn verify_partition(p: &Partition) -> Result<()> {
    let mut rebuilt = PauliSum::new(p.n_qubits);
    for (g, group) in p.groups.iter().enumerate() {
        for (i, a) in group.strings.iter().enumerate() {
            for b in &group.strings[i + 1..] {
                if !a.string.commutes(&b.string)? {
                    return Err(Error::GroupNotCommuting(format!(
                        "group {g} ({:?}): {} vs {}",
                        group.sector,
                        a.string.label(),
                        b.string.label()
                    )));
                }
            }
            rebuilt.add_weighted(a)?;
        }
        if group.sector != GroupSector::Diagonal {
            let mut mask = 0u128;
            for unit in &group.units {
                let m = index_mask(unit);
                if mask & m != 0 {
                    return Err(Error::GroupNotCommuting(format!(
                        "group {g} has overlapping units"
                    )));
                }
                mask |= m;
            }
        }
    }
    if rebuilt != p.expansion {
        return Err(Error::GroupNotCommuting(
            "group contents do not reproduce the expansion".into(),
        ));
    }
    Ok(())
}

/// Pairwise commutation check over a deserialized groups file.
pub fn verify_groups_file(file: &GroupsFile) -> Result<()> {
    for (g, group) in file.groups.iter().enumerate() {
        for (i, a) in group.strings.iter().enumerate() {
            for b in &group.strings[i + 1..] {
                if !a.string.commutes(&b.string)? {
                    return Err(Error::GroupNotCommuting(format!(
                        "group {g}: {} vs {}",
                        a.string.label(),
                        b.string.label()
                    )));
                }
            }
        }
    }
    Ok(())
}
