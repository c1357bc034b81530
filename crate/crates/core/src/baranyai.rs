//! Exact partition of the k-subsets of an n-set into classes of disjoint
//! subsets, built by staged integral max flow.
//!
//! When k divides n, the k-subsets of [n] split into C(n-1, k-1) classes,
//! each a perfect partition of [n] into n/k disjoint subsets, with every
//! subset appearing in exactly one class. The construction processes ground
//! elements one at a time: each class holds n/k partial subsets that always
//! partition the processed prefix, and a flow network decides which partial
//! subset of each class receives the next element.
//!
//! Stage m (m elements placed) network:
//!
//! * source -> class c, capacity 1
//! * class c -> node for distinct partial content A (|A| < k), capacity =
//!   multiplicity of A among c's slots
//! * A -> sink, capacity C(n-m-1, k-|A|-1)
//!
//! A fractional flow `mult · (k-|A|) / (n-m)` saturates both cuts, so an
//! integral maximum flow of value C(n-1, k-1) always exists; Ford-Fulkerson
//! with breadth-first augmentation (deterministic edge order) finds it.
//!
//! When k does not divide n, the ground set is embedded into
//! n' = n + k - (n mod k) elements; consumers drop subsets that contain the
//! virtual elements. The alternative of covering [n] with schedules over the
//! smaller n - (n mod k) space needs C(n-r-1, k-1) · C(n, r) classes, which
//! exceeds the embedded count C(n+k-r-1, k-1) for n >> r.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Binomial coefficient as u64 (exact for the sizes used here).
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// Class count of the partition: C(n-1, k-1) when k | n, otherwise the
/// embedded count C(n+k-r-1, k-1) with r = n mod k.
pub fn predicted_class_count(n: usize, k: usize) -> u64 {
    let r = n % k;
    if r == 0 {
        binomial(n - 1, k - 1)
    } else {
        binomial(n + k - r - 1, k - 1)
    }
}

/// A complete schedule: `classes[c]` lists n/k pairwise disjoint k-subsets
/// covering [n]; every k-subset of [n] appears in exactly one class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetSchedule {
    /// Ground-set size after embedding.
    pub n: usize,
    pub k: usize,
    /// Original ground-set size before embedding (equals `n` when k | n).
    pub embedded_from: usize,
    pub classes: Vec<Vec<Vec<usize>>>,
    #[serde(default = "schedule_version")]
    pub version: u32,
}

fn schedule_version() -> u32 {
    1
}

impl SubsetSchedule {
    /// Number of classes.
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Map from subset to its (class, slot) position.
    pub fn position_index(&self) -> HashMap<Vec<usize>, (usize, usize)> {
        let mut map = HashMap::new();
        for (c, class) in self.classes.iter().enumerate() {
            for (s, subset) in class.iter().enumerate() {
                map.insert(subset.clone(), (c, s));
            }
        }
        map
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("schedule serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

// ---------------------------------------------------------------------------
// Ford-Fulkerson max flow with BFS augmentation.
// ---------------------------------------------------------------------------

/// Flow network on dense node ids; edges carry integer capacities and are
/// explored in insertion order so the augmenting paths are deterministic.
pub struct FlowNetwork {
    n_nodes: usize,
    // edge i: (to, capacity); edge i^1 is the reverse edge.
    to: Vec<usize>,
    cap: Vec<i64>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub fn new(n_nodes: usize) -> Self {
        FlowNetwork { n_nodes, to: Vec::new(), cap: Vec::new(), adj: vec![Vec::new(); n_nodes] }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: i64) -> usize {
        let id = self.to.len();
        self.to.push(to);
        self.cap.push(cap);
        self.adj[from].push(id);
        self.to.push(from);
        self.cap.push(0);
        self.adj[to].push(id + 1);
        id
    }

    /// Residual capacity consumed on the forward edge (i.e. flow sent).
    pub fn flow_on(&self, edge: usize) -> i64 {
        self.cap[edge ^ 1]
    }

    /// Maximum flow from `source` to `sink`.
    pub fn max_flow(&mut self, source: usize, sink: usize) -> i64 {
        let mut total = 0i64;
        let mut parent: Vec<Option<usize>> = vec![None; self.n_nodes];
        loop {
            parent.iter_mut().for_each(|p| *p = None);
            let mut queue = std::collections::VecDeque::new();
            queue.push_back(source);
            parent[source] = Some(usize::MAX);
            while let Some(u) = queue.pop_front() {
                if u == sink {
                    break;
                }
                for &e in &self.adj[u] {
                    let v = self.to[e];
                    if parent[v].is_none() && self.cap[e] > 0 {
                        parent[v] = Some(e);
                        queue.push_back(v);
                    }
                }
            }
            if parent[sink].is_none() {
                break;
            }
            // Bottleneck along the path.
            let mut bottleneck = i64::MAX;
            let mut v = sink;
            while v != source {
                let e = parent[v].unwrap();
                bottleneck = bottleneck.min(self.cap[e]);
                v = self.to[e ^ 1];
            }
            let mut v = sink;
            while v != source {
                let e = parent[v].unwrap();
                self.cap[e] -= bottleneck;
                self.cap[e ^ 1] += bottleneck;
                v = self.to[e ^ 1];
            }
            total += bottleneck;
        }
        total
    }
}

/// One stage of the construction: route element `m` (0-based) into one slot
/// of every class. `slots[c]` are the current partial subsets of class c.
fn solve_stage(n: usize, k: usize, m: usize, slots: &mut [Vec<Vec<usize>>]) -> Result<()> {
    let n_classes = slots.len();

    // Distinct partial contents with remaining room, and per-class
    // multiplicities. BTreeMap gives deterministic node numbering.
    let mut content_ids: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for class in slots.iter() {
        for slot in class {
            if slot.len() < k {
                let next = content_ids.len();
                content_ids.entry(slot.clone()).or_insert(next);
            }
        }
    }
    let n_contents = content_ids.len();

    // Node layout: 0 = source, 1..=n_classes = classes,
    // then contents, then sink.
    let source = 0;
    let class_node = |c: usize| 1 + c;
    let content_node = |id: usize| 1 + n_classes + id;
    let sink = 1 + n_classes + n_contents;
    let mut net = FlowNetwork::new(sink + 1);

    for c in 0..n_classes {
        net.add_edge(source, class_node(c), 1);
    }
    // class -> content edges, remembering ids for readback.
    let mut class_content_edges: Vec<Vec<(usize, Vec<usize>)>> = vec![Vec::new(); n_classes];
    for (c, class) in slots.iter().enumerate() {
        let mut mult: BTreeMap<&Vec<usize>, i64> = BTreeMap::new();
        for slot in class {
            if slot.len() < k {
                *mult.entry(slot).or_insert(0) += 1;
            }
        }
        for (content, count) in mult {
            let id = content_ids[content];
            let e = net.add_edge(class_node(c), content_node(id), count);
            class_content_edges[c].push((e, content.clone()));
        }
    }
    for (content, &id) in &content_ids {
        let cap = binomial(n - m - 1, k - content.len() - 1) as i64;
        net.add_edge(content_node(id), sink, cap);
    }

    let want = n_classes as i64;
    let got = net.max_flow(source, sink);
    if got != want {
        return Err(Error::FlowShortfall { got, want });
    }

    // Each class pushed exactly one unit through one content edge; place the
    // element into the lowest-index slot with that content.
    for (c, edges) in class_content_edges.iter().enumerate() {
        let mut placed = false;
        for (e, content) in edges {
            if net.flow_on(*e) > 0 {
                let slot = slots[c]
                    .iter_mut()
                    .find(|s| *s == content)
                    .expect("content present in class");
                slot.push(m);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::FlowShortfall { got: 0, want: 1 });
        }
    }
    Ok(())
}

/// Build a complete schedule for the k-subsets of [n].
///
/// When k does not divide n the construction runs over the embedded
/// n' = n + k - (n mod k); the returned schedule records `embedded_from`.
/// Deterministic: identical inputs produce identical schedules.
pub fn baranyai_partition(n: usize, k: usize) -> Result<SubsetSchedule> {
    if k == 0 || n < k {
        return Err(Error::InvalidParams(format!(
            "need n >= k >= 1, got n={n}, k={k}"
        )));
    }
    let r = n % k;
    let n_embed = if r == 0 { n } else { n + k - r };
    let n_classes = binomial(n_embed - 1, k - 1) as usize;
    let per_class = n_embed / k;

    let mut slots: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); per_class]; n_classes];
    for m in 0..n_embed {
        solve_stage(n_embed, k, m, &mut slots)?;
    }

    // Keep slot order deterministic inside each class.
    for class in &mut slots {
        class.sort();
    }
    Ok(SubsetSchedule { n: n_embed, k, embedded_from: n, classes: slots, version: 1 })
}

/// Check every type invariant of a schedule; used by tests and the verify
/// pipeline.
pub fn validate_schedule(s: &SubsetSchedule) -> Result<()> {
    let expected = predicted_class_count(s.embedded_from, s.k);
    if s.classes.len() as u64 != expected {
        return Err(Error::InvalidParams(format!(
            "class count {} != predicted {expected}",
            s.classes.len()
        )));
    }
    let per_class = s.n / s.k;
    let mut seen: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for (c, class) in s.classes.iter().enumerate() {
        if class.len() != per_class {
            return Err(Error::InvalidParams(format!("class {c} has {} subsets", class.len())));
        }
        let mut cover = vec![false; s.n];
        for subset in class {
            if subset.len() != s.k {
                return Err(Error::InvalidParams(format!("subset {subset:?} has wrong size")));
            }
            for &e in subset {
                if e >= s.n || cover[e] {
                    return Err(Error::InvalidParams(format!(
                        "class {c} does not partition the ground set"
                    )));
                }
                cover[e] = true;
            }
            *seen.entry(subset.clone()).or_insert(0) += 1;
        }
        if !cover.iter().all(|&b| b) {
            return Err(Error::InvalidParams(format!("class {c} misses elements")));
        }
    }
    let total = binomial(s.n, s.k);
    if seen.len() as u64 != total || seen.values().any(|&v| v != 1) {
        return Err(Error::InvalidParams(
            "subsets are not covered exactly once".into(),
        ));
    }
    Ok(())
}

/// First-fit packing of present subsets, ordered by their position in the
/// dense schedule. A subset joins the first group in which it is
/// index-disjoint from every member; otherwise it opens a new group. With
/// every subset of the schedule present, the output reproduces the classes.
pub fn greedy_pack(present: &[Vec<usize>], schedule: &SubsetSchedule) -> Result<Vec<Vec<Vec<usize>>>> {
    if schedule.n > 128 {
        return Err(Error::InvalidParams(
            "greedy packing supports ground sets up to 128 elements".into(),
        ));
    }
    let index = schedule.position_index();
    let mut ordered: Vec<(usize, usize, &Vec<usize>)> = Vec::with_capacity(present.len());
    let mut dedup = std::collections::HashSet::new();
    for subset in present {
        let mut sorted = subset.clone();
        sorted.sort_unstable();
        if !dedup.insert(sorted.clone()) {
            return Err(Error::DuplicateSubset(subset.clone()));
        }
        match index.get(&sorted) {
            Some(&(c, s)) => ordered.push((c, s, subset)),
            None => return Err(Error::SubsetNotInSchedule(subset.clone())),
        }
    }
    ordered.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

    let mut groups: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut masks: Vec<u128> = Vec::new();
    for (_, _, subset) in ordered {
        let mask: u128 = subset.iter().fold(0, |m, &e| m | 1u128 << e);
        match masks.iter().position(|&gm| gm & mask == 0) {
            Some(g) => {
                groups[g].push(subset.clone());
                masks[g] |= mask;
            }
            None => {
                groups.push(vec![subset.clone()]);
                masks.push(mask);
            }
        }
    }
    Ok(groups)
}

/// Enumerate all k-subsets of [n] in lexicographic order.
pub fn all_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        let remaining = k - current.len();
        for e in start..=n.saturating_sub(remaining) {
            current.push(e);
            rec(e + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(0, n, k, &mut current, &mut out);
    out
}

/// In-process schedule cache keyed by (n, k); read-shared behind a mutex.
#[derive(Default)]
pub struct ScheduleCache {
    inner: std::sync::Mutex<HashMap<(usize, usize), std::sync::Arc<SubsetSchedule>>>,
}

impl ScheduleCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, n: usize, k: usize) -> Result<std::sync::Arc<SubsetSchedule>> {
        let mut guard = self.inner.lock().expect("cache lock");
        if let Some(s) = guard.get(&(n, k)) {
            return Ok(s.clone());
        }
        let built = std::sync::Arc::new(baranyai_partition(n, k)?);
        guard.insert((n, k), built.clone());
        Ok(built)
    }
}
