//! Molecular-integral ingestion and synthetic benchmark Hamiltonians.
//!
//! Integrals are stored spatially in chemists' notation with 1-based
//! indices, the way FCIDUMP files write them: a two-body line
//! `g p q r s` means (pq|rs), with the full 8-fold real-integral symmetry
//! implied. The spin-orbital expansion uses a blocked layout, alpha spin on
//! qubits `0 .. n_spatial`, beta on `n_spatial .. 2 n_spatial`, and emits
//!
//! ```text
//! H = sum_pq h_pq a†_{p,s} a_{q,s}
//!   + 1/2 sum_pqrs (pq|rs) a†_{p,s} a†_{r,t} a_{s',t} a_{q',s}
//! ```
//!
//! summed over both spins s, t, so only spin-conserving terms ever appear.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::fermion::{reduce_hermitian, ExcitationTerm, RawTerm};
use crate::rng::SplitMix64;
use crate::{Error, Result};

/// Canonical key for a symmetric one-body pair (1-based).
fn one_key(p: u32, q: u32) -> (u32, u32) {
    (p.min(q), p.max(q))
}

/// Canonical key under the 8-fold symmetry of real integrals (1-based).
fn two_key(p: u32, q: u32, r: u32, s: u32) -> (u32, u32, u32, u32) {
    let mut best = (u32::MAX, u32::MAX, u32::MAX, u32::MAX);
    for (a, b, c, d) in [
        (p, q, r, s),
        (q, p, r, s),
        (p, q, s, r),
        (q, p, s, r),
        (r, s, p, q),
        (s, r, p, q),
        (r, s, q, p),
        (s, r, q, p),
    ] {
        best = best.min((a, b, c, d));
    }
    best
}

/// One- and two-electron integral tables for one molecule or model system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub n_spatial: usize,
    #[serde(default)]
    pub n_electrons: usize,
    /// Constant energy offset (nuclear repulsion), Hartree.
    pub core_energy: f64,
    /// h_pq on canonical keys, 1-based spatial indices.
    pub one_body: BTreeMap<(u32, u32), f64>,
    /// (pq|rs) on canonical keys, 1-based spatial indices.
    pub two_body: BTreeMap<(u32, u32, u32, u32), f64>,
}

impl HamiltonianSpec {
    pub fn new(n_spatial: usize) -> Self {
        HamiltonianSpec {
            n_spatial,
            n_electrons: 0,
            core_energy: 0.0,
            one_body: BTreeMap::new(),
            two_body: BTreeMap::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.n_spatial
    }

    pub fn set_one_body(&mut self, p: u32, q: u32, v: f64) {
        self.one_body.insert(one_key(p, q), v);
    }

    pub fn set_two_body(&mut self, p: u32, q: u32, r: u32, s: u32, v: f64) {
        self.two_body.insert(two_key(p, q, r, s), v);
    }

    pub fn h1(&self, p: u32, q: u32) -> f64 {
        self.one_body.get(&one_key(p, q)).copied().unwrap_or(0.0)
    }

    pub fn h2(&self, p: u32, q: u32, r: u32, s: u32) -> f64 {
        self.two_body
            .get(&two_key(p, q, r, s))
            .copied()
            .unwrap_or(0.0)
    }

    /// Spin-orbital index in the blocked layout (0-based spatial input).
    fn spin_orbital(&self, spatial0: usize, beta: bool) -> usize {
        if beta {
            self.n_spatial + spatial0
        } else {
            spatial0
        }
    }

    /// Expand the integral tables into raw spin-orbital ladder products.
    pub fn raw_spin_orbital_terms(&self) -> Vec<RawTerm> {
        let mut raw = Vec::new();
        for (&(p, q), &h) in &self.one_body {
            if h == 0.0 {
                continue;
            }
            // Canonical key stores p <= q once; emit both orientations.
            let pairs: &[(u32, u32)] = if p == q { &[(p, q)] } else { &[(p, q), (q, p)] };
            for &(a, b) in pairs {
                for beta in [false, true] {
                    raw.push(RawTerm::new(
                        vec![self.spin_orbital(a as usize - 1, beta)],
                        vec![self.spin_orbital(b as usize - 1, beta)],
                        h,
                    ));
                }
            }
        }
        for (&key, &g) in &self.two_body {
            if g == 0.0 {
                continue;
            }
            // Expand the canonical key back to its distinct permutations.
            let (p, q, r, s) = key;
            let mut perms = vec![
                (p, q, r, s),
                (q, p, r, s),
                (p, q, s, r),
                (q, p, s, r),
                (r, s, p, q),
                (s, r, p, q),
                (r, s, q, p),
                (s, r, q, p),
            ];
            perms.sort_unstable();
            perms.dedup();
            for (a, b, c, d) in perms {
                // (ab|cd) · 1/2 · a†_{a,s} a†_{c,t} a_{d,t} a_{b,s}
                for s_beta in [false, true] {
                    for t_beta in [false, true] {
                        let c1 = self.spin_orbital(a as usize - 1, s_beta);
                        let c2 = self.spin_orbital(c as usize - 1, t_beta);
                        let a1 = self.spin_orbital(d as usize - 1, t_beta);
                        let a2 = self.spin_orbital(b as usize - 1, s_beta);
                        if c1 == c2 || a1 == a2 {
                            continue;
                        }
                        raw.push(RawTerm::new(vec![c1, c2], vec![a1, a2], 0.5 * g));
                    }
                }
            }
        }
        raw
    }

    /// Canonical Hermitian-paired excitation terms in the blocked layout.
    pub fn to_spin_orbital_terms(&self, threshold: f64) -> Result<Vec<ExcitationTerm>> {
        reduce_hermitian(&self.raw_spin_orbital_terms(), threshold)
    }
}

// ---------------------------------------------------------------------------
// FCIDUMP
// ---------------------------------------------------------------------------

/// Parse FCIDUMP text: a namelist header (`&FCI NORB=..., NELEC=..., ... &END`
/// or terminated by `/`), then integral lines `value i j k l`. The line with
/// all-zero indices carries the core energy; `k = l = 0` marks a one-body
/// integral.
pub fn parse_fcidump(text: &str) -> Result<HamiltonianSpec> {
    let mut lines = text.lines().enumerate();

    // Collect the header through its terminator; it may span lines.
    let mut header = String::new();
    let mut header_done = false;
    let mut body_start = 0usize;
    for (i, line) in lines.by_ref() {
        let t = line.trim();
        if header.is_empty() && !t.to_ascii_uppercase().starts_with("&FCI") {
            return Err(Error::Parse { line: i + 1, msg: "expected &FCI namelist".into() });
        }
        header.push(' ');
        header.push_str(t);
        let upper = header.to_ascii_uppercase();
        if upper.contains("&END") || upper.contains("$END") || t.ends_with('/') || t == "/" {
            header_done = true;
            body_start = i + 1;
            break;
        }
    }
    if !header_done {
        return Err(Error::Parse { line: 1, msg: "unterminated namelist header".into() });
    }

    let norb = parse_header_int(&header, "NORB")
        .ok_or_else(|| Error::Parse { line: 1, msg: "NORB missing from header".into() })?;
    let nelec = parse_header_int(&header, "NELEC").unwrap_or(0);
    // ORBSYM and MS2 are accepted but not used downstream.
    let _ = parse_header_int(&header, "MS2");

    let mut spec = HamiltonianSpec::new(norb);
    spec.n_electrons = nelec;

    for (i, line) in text.lines().enumerate().skip(body_start) {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        if fields.len() < 5 {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("expected `value i j k l`, got `{t}`"),
            });
        }
        let value: f64 = fields[0]
            .replace(['D', 'd'], "E")
            .parse()
            .map_err(|_| Error::Parse { line: i + 1, msg: format!("bad value `{}`", fields[0]) })?;
        let idx: Vec<u32> = fields[1..5]
            .iter()
            .map(|f| {
                f.parse::<u32>()
                    .map_err(|_| Error::Parse { line: i + 1, msg: format!("bad index `{f}`") })
            })
            .collect::<Result<_>>()?;
        let (p, q, r, s) = (idx[0], idx[1], idx[2], idx[3]);
        for &ix in &idx {
            if ix as usize > norb {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("index {ix} exceeds NORB={norb}"),
                });
            }
        }
        match (p, q, r, s) {
            (0, 0, 0, 0) => spec.core_energy = value,
            (_, _, 0, 0) => {
                if p == 0 || q == 0 {
                    return Err(Error::Parse { line: i + 1, msg: "bad one-body indices".into() });
                }
                spec.set_one_body(p, q, value);
            }
            _ => {
                if p == 0 || q == 0 || r == 0 || s == 0 {
                    return Err(Error::Parse { line: i + 1, msg: "bad two-body indices".into() });
                }
                spec.set_two_body(p, q, r, s, value);
            }
        }
    }
    Ok(spec)
}

fn parse_header_int(header: &str, key: &str) -> Option<usize> {
    let upper = header.to_ascii_uppercase();
    let pos = upper.find(&format!("{key}="))?;
    let rest = &upper[pos + key.len() + 1..];
    let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
    digits.parse().ok()
}

/// Render a spec as FCIDUMP text (canonical entries only).
pub fn write_fcidump(spec: &HamiltonianSpec) -> String {
    let mut out = format!(
        "&FCI NORB={},NELEC={},MS2=0,\n  ORBSYM={}\n  ISYM=1,\n&END\n",
        spec.n_spatial,
        spec.n_electrons,
        vec!["1"; spec.n_spatial].join(",") + ",",
    );
    for (&(p, q, r, s), &v) in &spec.two_body {
        out.push_str(&format!(" {v:.16E}  {p}  {q}  {r}  {s}\n"));
    }
    for (&(p, q), &v) in &spec.one_body {
        out.push_str(&format!(" {v:.16E}  {p}  {q}  0  0\n"));
    }
    out.push_str(&format!(" {:.16E}  0  0  0  0\n", spec.core_energy));
    out
}

// ---------------------------------------------------------------------------
// Native JSON format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct JsonSpec {
    n_spatial: usize,
    #[serde(default)]
    n_electrons: usize,
    core: f64,
    one_body: Vec<(u32, u32, f64)>,
    two_body: Vec<(u32, u32, u32, u32, f64)>,
}

/// Serialize to the native JSON form
/// `{"n_spatial":…, "core":…, "one_body":[[p,q,v]…], "two_body":[[p,q,r,s,v]…]}`.
pub fn to_json(spec: &HamiltonianSpec) -> String {
    let j = JsonSpec {
        n_spatial: spec.n_spatial,
        n_electrons: spec.n_electrons,
        core: spec.core_energy,
        one_body: spec.one_body.iter().map(|(&(p, q), &v)| (p, q, v)).collect(),
        two_body: spec
            .two_body
            .iter()
            .map(|(&(p, q, r, s), &v)| (p, q, r, s, v))
            .collect(),
    };
    serde_json::to_string_pretty(&j).expect("spec serializes")
}

pub fn from_json(text: &str) -> Result<HamiltonianSpec> {
    let j: JsonSpec = serde_json::from_str(text)?;
    let mut spec = HamiltonianSpec::new(j.n_spatial);
    spec.n_electrons = j.n_electrons;
    spec.core_energy = j.core;
    for (p, q, v) in j.one_body {
        spec.set_one_body(p, q, v);
    }
    for (p, q, r, s, v) in j.two_body {
        spec.set_two_body(p, q, r, s, v);
    }
    Ok(spec)
}

// ---------------------------------------------------------------------------
// Synthetic benchmark systems
// ---------------------------------------------------------------------------

/// Fully connected system: every symmetry-allowed integral nonzero, with
/// deterministic pseudorandom values in ±[0.01, 1].
pub fn synth_dense(n_spatial: usize, seed: u64) -> Result<HamiltonianSpec> {
    synth(n_spatial, None, seed)
}

/// Banded system: integrals vanish unless all spatial indices fit in a
/// window of width `w`, i.e. `max(p,q,r,s) - min(p,q,r,s) <= w`.
pub fn synth_chain(n_spatial: usize, width: usize, seed: u64) -> Result<HamiltonianSpec> {
    synth(n_spatial, Some(width), seed)
}

fn synth(n_spatial: usize, width: Option<usize>, seed: u64) -> Result<HamiltonianSpec> {
    if n_spatial == 0 {
        return Err(Error::InvalidParams("n_spatial must be positive".into()));
    }
    let n = n_spatial as u32;
    let mut spec = HamiltonianSpec::new(n_spatial);
    spec.n_electrons = n_spatial;
    spec.core_energy = SplitMix64::keyed(seed, &[0]).uniform_range(0.1, 1.0);

    let within = |vals: &[u32]| -> bool {
        match width {
            None => true,
            Some(w) => {
                let lo = *vals.iter().min().unwrap();
                let hi = *vals.iter().max().unwrap();
                (hi - lo) as usize <= w
            }
        }
    };

    for p in 1..=n {
        for q in p..=n {
            if !within(&[p, q]) {
                continue;
            }
            let mut g = SplitMix64::keyed(seed, &[1, p as u64, q as u64]);
            let v = g.sign() * g.uniform_range(0.01, 1.0);
            spec.set_one_body(p, q, v);
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    for p in 1..=n {
        for q in 1..=n {
            for r in 1..=n {
                for s in 1..=n {
                    let key = two_key(p, q, r, s);
                    if !seen.insert(key) || !within(&[p, q, r, s]) {
                        continue;
                    }
                    let (a, b, c, d) = key;
                    let mut g = SplitMix64::keyed(
                        seed,
                        &[2, a as u64, b as u64, c as u64, d as u64],
                    );
                    let v = g.sign() * g.uniform_range(0.01, 1.0);
                    spec.set_two_body(a, b, c, d, v);
                }
            }
        }
    }
    Ok(spec)
}
