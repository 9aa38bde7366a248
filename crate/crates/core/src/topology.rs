//! Structural digraphs: construction, validation, distance metrics and the
//! experiment families.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::TopologyError;
use crate::symbol::CellId;

/// On-disk digraph form: `{"nodes": [..], "arcs": [[p, c], ..], "general": g}`.
/// Carries no invariants; convert with [`Digraph::try_from`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigraphFile {
    pub nodes: Vec<u32>,
    pub arcs: Vec<(u32, u32)>,
    pub general: u32,
}

/// Verdicts of [`validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub irreflexive: bool,
    pub simple: bool,
    pub strongly_connected: bool,
}

impl ValidationReport {
    pub fn all_ok(&self) -> bool {
        self.irreflexive && self.simple && self.strongly_connected
    }
}

/// Size, general eccentricity and diameter of a digraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyMetrics {
    pub size: usize,
    pub eccentricity: u32,
    pub diameter: u32,
    pub strongly_connected: bool,
}

/// An irreflexive digraph without duplicate arcs, with a designated general.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    nodes: BTreeSet<CellId>,
    arcs: BTreeSet<(CellId, CellId)>,
    children: BTreeMap<CellId, Vec<CellId>>,
    general: CellId,
}

impl Digraph {
    pub fn new(
        nodes: impl IntoIterator<Item = CellId>,
        arcs: impl IntoIterator<Item = (CellId, CellId)>,
        general: CellId,
    ) -> Result<Self, TopologyError> {
        let nodes: BTreeSet<CellId> = nodes.into_iter().collect();
        let mut set = BTreeSet::new();
        for (p, c) in arcs {
            if p == c {
                return Err(TopologyError::SelfLoop(p));
            }
            if !nodes.contains(&p) || !nodes.contains(&c) {
                return Err(TopologyError::UnknownEndpoint(p, c));
            }
            if !set.insert((p, c)) {
                return Err(TopologyError::DuplicateArc(p, c));
            }
        }
        if !nodes.contains(&general) {
            return Err(TopologyError::UnknownGeneral(general));
        }
        let mut children: BTreeMap<CellId, Vec<CellId>> =
            nodes.iter().map(|&n| (n, Vec::new())).collect();
        for &(p, c) in &set {
            children.get_mut(&p).expect("endpoint checked").push(c);
        }
        Ok(Digraph {
            nodes,
            arcs: set,
            children,
            general,
        })
    }

    /// Builds from 1-based node numbers `1..=n`, silently merging repeated
    /// arcs. Used by the generators.
    fn from_numbered(n: u32, arcs: impl IntoIterator<Item = (u32, u32)>, general: u32) -> Self {
        let arcs: BTreeSet<(CellId, CellId)> = arcs
            .into_iter()
            .map(|(p, c)| (CellId(p), CellId(c)))
            .collect();
        Digraph::new((1..=n).map(CellId), arcs, CellId(general))
            .expect("generator produced an invalid digraph")
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = CellId> + '_ {
        self.nodes.iter().copied()
    }

    pub fn arcs(&self) -> impl ExactSizeIterator<Item = (CellId, CellId)> + '_ {
        self.arcs.iter().copied()
    }

    pub fn general(&self) -> CellId {
        self.general
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, cell: CellId) -> bool {
        self.nodes.contains(&cell)
    }

    pub fn has_arc(&self, parent: CellId, child: CellId) -> bool {
        self.arcs.contains(&(parent, child))
    }

    pub fn children(&self, cell: CellId) -> &[CellId] {
        self.children.get(&cell).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn outdegree(&self, cell: CellId) -> usize {
        self.children(cell).len()
    }

    /// The same digraph with another general.
    pub fn with_general(&self, general: CellId) -> Result<Self, TopologyError> {
        if !self.contains(general) {
            return Err(TopologyError::UnknownGeneral(general));
        }
        Ok(Digraph {
            general,
            ..self.clone()
        })
    }

    /// BFS distances from `source`; unreachable cells are absent.
    pub fn distances_from(&self, source: CellId) -> BTreeMap<CellId, u32> {
        let mut dist = BTreeMap::new();
        dist.insert(source, 0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let d = dist[&u];
            for &v in self.children(u) {
                if let Entry::Vacant(slot) = dist.entry(v) {
                    slot.insert(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Maximum BFS distance from `source`, or `None` if some cell is
    /// unreachable from it.
    pub fn eccentricity(&self, source: CellId) -> Option<u32> {
        let dist = self.distances_from(source);
        (dist.len() == self.len()).then(|| dist.values().copied().max().unwrap_or(0))
    }

    pub fn is_strongly_connected(&self) -> bool {
        let Some(&root) = self.nodes.iter().next() else {
            return true;
        };
        if self.distances_from(root).len() != self.len() {
            return false;
        }
        // Reachability back to the root over reversed arcs.
        let mut parents: BTreeMap<CellId, Vec<CellId>> = BTreeMap::new();
        for &(p, c) in &self.arcs {
            parents.entry(c).or_default().push(p);
        }
        let mut seen = BTreeSet::from([root]);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &p in parents.get(&u).into_iter().flatten() {
                if seen.insert(p) {
                    queue.push_back(p);
                }
            }
        }
        seen.len() == self.len()
    }

    pub fn validate(&self) -> ValidationReport {
        ValidationReport {
            irreflexive: true,
            simple: true,
            strongly_connected: self.is_strongly_connected(),
        }
    }

    /// Size, general eccentricity and diameter. Fails on digraphs that are
    /// not strongly connected, where some distance is infinite.
    pub fn metrics(&self) -> Result<TopologyMetrics, TopologyError> {
        let mut diameter = 0;
        for u in self.nodes() {
            diameter = diameter.max(
                self.eccentricity(u)
                    .ok_or(TopologyError::NotStronglyConnected)?,
            );
        }
        Ok(TopologyMetrics {
            size: self.len(),
            eccentricity: self.eccentricity(self.general).expect("strongly connected"),
            diameter,
            strongly_connected: true,
        })
    }

    pub fn to_file(&self) -> DigraphFile {
        DigraphFile {
            nodes: self.nodes.iter().map(|c| c.0).collect(),
            arcs: self.arcs.iter().map(|(p, c)| (p.0, c.0)).collect(),
            general: self.general.0,
        }
    }
}

/// Checks a raw digraph without rejecting it, so every defect is reported.
pub fn validate(file: &DigraphFile) -> ValidationReport {
    let irreflexive = file.arcs.iter().all(|(p, c)| p != c);
    let simple = file.arcs.iter().collect::<BTreeSet<_>>().len() == file.arcs.len();
    let nodes: BTreeSet<u32> = file.nodes.iter().copied().collect();
    let endpoints_ok = file
        .arcs
        .iter()
        .all(|(p, c)| nodes.contains(p) && nodes.contains(c));
    let strongly_connected = endpoints_ok
        && nodes.contains(&file.general)
        && Digraph::new(
            nodes.iter().map(|&n| CellId(n)),
            file.arcs
                .iter()
                .filter(|(p, c)| p != c)
                .map(|&(p, c)| (CellId(p), CellId(c)))
                .collect::<BTreeSet<_>>(),
            CellId(file.general),
        )
        .is_ok_and(|d| d.is_strongly_connected());
    ValidationReport {
        irreflexive,
        simple,
        strongly_connected,
    }
}

impl TryFrom<DigraphFile> for Digraph {
    type Error = TopologyError;

    fn try_from(file: DigraphFile) -> Result<Self, Self::Error> {
        Digraph::new(
            file.nodes.into_iter().map(CellId),
            file.arcs.into_iter().map(|(p, c)| (CellId(p), CellId(c))),
            CellId(file.general),
        )
    }
}

impl Serialize for Digraph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_file().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Digraph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let file = DigraphFile::deserialize(deserializer)?;
        Digraph::try_from(file).map_err(serde::de::Error::custom)
    }
}

/// Directed cycle `1 → 2 → … → n → 1`, general 1.
pub fn ring(n: u32) -> Result<Digraph, TopologyError> {
    if n < 2 {
        return Err(TopologyError::InvalidParameters(format!(
            "a ring needs at least 2 cells, got {n}"
        )));
    }
    Ok(Digraph::from_numbered(
        n,
        (1..=n).map(|i| (i, i % n + 1)),
        1,
    ))
}

/// A main cycle through one anchor per unit, where unit `i` is a directed
/// cycle through its anchor and `extra[i]` further cells. Anchors come first
/// in each unit's numbering, so the general (node 1) is the first anchor.
fn anchored_units(extra: &[u32]) -> Digraph {
    let mut arcs = Vec::new();
    let mut anchors = Vec::new();
    let mut next = 1;
    for &e in extra {
        let unit: Vec<u32> = (next..=next + e).collect();
        next += e + 1;
        for w in 0..unit.len() {
            arcs.push((unit[w], unit[(w + 1) % unit.len()]));
        }
        anchors.push(unit[0]);
    }
    if anchors.len() > 1 {
        for w in 0..anchors.len() {
            arcs.push((anchors[w], anchors[(w + 1) % anchors.len()]));
        }
    }
    Digraph::from_numbered(next - 1, arcs, 1)
}

/// Main ring linking `main_len` smaller rings.
///
/// `sub_size == 2`: the main cycle `1 → 2 → … → 2m → 1` where each pair
/// `(2i-1, 2i)` also has the reverse arc, so every small ring shares one arc
/// with the main cycle. N = 2·main_len.
///
/// `sub_size == 3`: `main_len` anchors on a main cycle, each carrying a
/// directed cycle through itself and four more cells. N = 5·main_len.
pub fn ring_of_rings(main_len: u32, sub_size: u32) -> Result<Digraph, TopologyError> {
    if main_len == 0 {
        return Err(TopologyError::InvalidParameters(
            "main ring length must be at least 1".into(),
        ));
    }
    match sub_size {
        2 => {
            let n = 2 * main_len;
            let forward = (1..=n).map(|i| (i, i % n + 1));
            let back = (1..=n).step_by(2).map(|i| (i + 1, i));
            Ok(Digraph::from_numbered(n, forward.chain(back), 1))
        }
        3 => Ok(anchored_units(&vec![4; main_len as usize])),
        _ => Err(TopologyError::InvalidParameters(format!(
            "sub-ring size must be 2 or 3, got {sub_size}"
        ))),
    }
}

/// Main ring linking `k` rings; the `i`-th (from 1) passes through its anchor
/// and `i` further cells. N = k(k+3)/2.
pub fn increasing_rings(k: u32) -> Result<Digraph, TopologyError> {
    if k == 0 {
        return Err(TopologyError::InvalidParameters(
            "k must be at least 1".into(),
        ));
    }
    Ok(anchored_units(&(1..=k).collect::<Vec<_>>()))
}

/// Ten-cell digraph used as the running example: general 1, eccentricity 4.
pub fn sample_ten() -> Digraph {
    let arcs = [
        (1, 2),
        (1, 3),
        (1, 4),
        (2, 6),
        (3, 5),
        (4, 2),
        (4, 6),
        (4, 7),
        (5, 1),
        (6, 3),
        (6, 8),
        (6, 9),
        (7, 9),
        (8, 5),
        (9, 10),
        (10, 4),
    ];
    Digraph::from_numbered(10, arcs, 1)
}

/// Random strongly connected digraph: a directed Hamiltonian cycle over a
/// random permutation of `1..=n`, plus `extra_arc_fraction` of the remaining
/// possible arcs chosen at random. Deterministic per seed. The general is 1.
pub fn random_strongly_connected(
    n: u32,
    extra_arc_fraction: f64,
    seed: u64,
) -> Result<Digraph, TopologyError> {
    if n == 0 {
        return Err(TopologyError::InvalidParameters(
            "n must be at least 1".into(),
        ));
    }
    if !(0.0..=1.0).contains(&extra_arc_fraction) {
        return Err(TopologyError::InvalidParameters(format!(
            "extra arc fraction {extra_arc_fraction} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<u32> = (1..=n).collect();
    order.shuffle(&mut rng);
    let mut arcs: BTreeSet<(u32, u32)> = BTreeSet::new();
    if n > 1 {
        for w in 0..order.len() {
            arcs.insert((order[w], order[(w + 1) % order.len()]));
        }
    }
    let mut rest: Vec<(u32, u32)> = (1..=n)
        .flat_map(|p| (1..=n).map(move |c| (p, c)))
        .filter(|&(p, c)| p != c && !arcs.contains(&(p, c)))
        .collect();
    rest.shuffle(&mut rng);
    let extra = (rest.len() as f64 * extra_arc_fraction).round() as usize;
    arcs.extend(rest.into_iter().take(extra));
    Ok(Digraph::from_numbered(n, arcs, 1))
}
