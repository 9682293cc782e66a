//! Distribution network data model and the on-disk network format.
//!
//! A network is an undirected graph of buses and lines together with a set of
//! designated root buses (sources acting as slack) and, for restoration
//! studies, a set of faulted lines that are forced open. All types are
//! immutable after construction and safe to share across threads.
//!
//! The on-disk format is a single JSON document with top-level keys
//! `buses[]`, `lines[]`, `roots[]`, `faulted_lines[]`; see
//! `docs/network-format.md` for the field-by-field description and
//! `docs/network.schema.json` for a machine-readable schema.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of a bus (positive integer, unique within a network).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BusId(pub u32);

/// Identifier of a line (positive integer, unique within a network).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LineId(pub u32);

impl fmt::Display for BusId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for LineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn default_v_min() -> f64 {
    0.9
}

fn default_v_max() -> f64 {
    1.1
}

fn default_weight() -> f64 {
    1.0
}

/// A bus: load point and/or power source.
///
/// Per-unit quantities throughout. Non-source buses must have zero
/// generation capacity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: BusId,
    /// Active demand, per unit (>= 0).
    #[serde(default)]
    pub p_load: f64,
    /// Reactive demand, per unit.
    #[serde(default)]
    pub q_load: f64,
    /// Load priority weight for restoration (>= 0).
    #[serde(default = "default_weight")]
    pub weight: f64,
    #[serde(default)]
    pub is_source: bool,
    /// Active generation capacity, per unit (0 for non-sources).
    #[serde(default)]
    pub p_gen_max: f64,
    /// Reactive generation capacity, per unit (0 for non-sources).
    #[serde(default)]
    pub q_gen_max: f64,
    #[serde(default = "default_v_min")]
    pub v_min: f64,
    #[serde(default = "default_v_max")]
    pub v_max: f64,
}

/// A switchable line with impedance and an optional current limit.
///
/// The ordered pair (`from_bus`, `to_bus`) is the line's reference
/// direction; fictitious and real flows are signed relative to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub id: LineId,
    pub from_bus: BusId,
    pub to_bus: BusId,
    /// Series resistance, per unit (>= 0).
    pub r: f64,
    /// Series reactance, per unit.
    pub x: f64,
    /// Current limit, per unit; unbounded when omitted.
    #[serde(default)]
    pub i_max: Option<f64>,
}

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error in {path} at line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate bus id {0}")]
    DuplicateBus(BusId),
    #[error("duplicate line id {0}")]
    DuplicateLine(LineId),
    #[error("bus id {0} is not a positive integer")]
    NonPositiveBusId(u32),
    #[error("line id {0} is not a positive integer")]
    NonPositiveLineId(u32),
    #[error("line {0} connects bus {1} to itself")]
    SelfLoop(LineId, BusId),
    #[error("line {line} references unknown bus {bus}")]
    UnknownEndpoint { line: LineId, bus: BusId },
    #[error("line {0} has negative resistance")]
    NegativeResistance(LineId),
    #[error("bus {0} has negative active load")]
    NegativeLoad(BusId),
    #[error("bus {0} has negative priority weight")]
    NegativeWeight(BusId),
    #[error("bus {bus} has invalid voltage bounds (v_min {v_min} must be below v_max {v_max})")]
    BadVoltageBounds { bus: BusId, v_min: f64, v_max: f64 },
    #[error("bus {0} is not a source but has generation capacity")]
    NonSourceGeneration(BusId),
    #[error("network has no root buses")]
    NoRoots,
    #[error("root {0} is not a bus in the network")]
    UnknownRoot(BusId),
    #[error("root {0} is not a source bus")]
    RootNotSource(BusId),
    #[error("faulted line {0} is not a line in the network")]
    UnknownFaultedLine(LineId),
    #[error("graph is disconnected: bus {0} is unreachable from bus {1}")]
    Disconnected(BusId, BusId),
    #[error("unknown bus id {0}")]
    UnknownBus(BusId),
}

/// Errors raised when a topology assignment does not match a network.
#[derive(Debug, Error)]
pub enum AssignmentError {
    #[error("assignment is missing line {0}")]
    MissingLine(LineId),
    #[error("assignment references unknown line {0}")]
    UnknownLine(LineId),
    #[error("faulted line {0} is closed in the assignment")]
    ClosedFaultedLine(LineId),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct NetworkFile {
    buses: Vec<Bus>,
    lines: Vec<Line>,
    roots: Vec<BusId>,
    #[serde(default)]
    faulted_lines: Vec<LineId>,
}

/// An immutable, validated distribution network.
#[derive(Debug, Clone)]
pub struct Network {
    buses: Vec<Bus>,
    lines: Vec<Line>,
    roots: BTreeSet<BusId>,
    faulted: BTreeSet<LineId>,
    bus_index: BTreeMap<BusId, usize>,
    line_index: BTreeMap<LineId, usize>,
    /// adjacency[bus idx] = (line idx, neighbor bus idx), ascending line id.
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl Network {
    /// Build and validate a network from its parts.
    pub fn new(
        mut buses: Vec<Bus>,
        mut lines: Vec<Line>,
        roots: impl IntoIterator<Item = BusId>,
        faulted: impl IntoIterator<Item = LineId>,
    ) -> Result<Self, NetworkError> {
        buses.sort_by_key(|b| b.id);
        lines.sort_by_key(|l| l.id);

        let mut bus_index = BTreeMap::new();
        for (i, bus) in buses.iter().enumerate() {
            if bus.id.0 == 0 {
                return Err(NetworkError::NonPositiveBusId(bus.id.0));
            }
            if bus_index.insert(bus.id, i).is_some() {
                return Err(NetworkError::DuplicateBus(bus.id));
            }
            if bus.p_load < 0.0 {
                return Err(NetworkError::NegativeLoad(bus.id));
            }
            if bus.weight < 0.0 {
                return Err(NetworkError::NegativeWeight(bus.id));
            }
            if !(bus.v_min < bus.v_max) {
                return Err(NetworkError::BadVoltageBounds {
                    bus: bus.id,
                    v_min: bus.v_min,
                    v_max: bus.v_max,
                });
            }
            if !bus.is_source && (bus.p_gen_max != 0.0 || bus.q_gen_max != 0.0) {
                return Err(NetworkError::NonSourceGeneration(bus.id));
            }
        }

        let mut line_index = BTreeMap::new();
        let mut adjacency = vec![Vec::new(); buses.len()];
        for (i, line) in lines.iter().enumerate() {
            if line.id.0 == 0 {
                return Err(NetworkError::NonPositiveLineId(line.id.0));
            }
            if line_index.insert(line.id, i).is_some() {
                return Err(NetworkError::DuplicateLine(line.id));
            }
            if line.from_bus == line.to_bus {
                return Err(NetworkError::SelfLoop(line.id, line.from_bus));
            }
            if line.r < 0.0 {
                return Err(NetworkError::NegativeResistance(line.id));
            }
            let fi = *bus_index.get(&line.from_bus).ok_or(NetworkError::UnknownEndpoint {
                line: line.id,
                bus: line.from_bus,
            })?;
            let ti = *bus_index.get(&line.to_bus).ok_or(NetworkError::UnknownEndpoint {
                line: line.id,
                bus: line.to_bus,
            })?;
            adjacency[fi].push((i, ti));
            adjacency[ti].push((i, fi));
        }
        for adj in &mut adjacency {
            adj.sort_by_key(|&(li, _)| lines[li].id);
        }

        let roots: BTreeSet<BusId> = roots.into_iter().collect();
        if roots.is_empty() {
            return Err(NetworkError::NoRoots);
        }
        for &root in &roots {
            let idx = bus_index.get(&root).ok_or(NetworkError::UnknownRoot(root))?;
            if !buses[*idx].is_source {
                return Err(NetworkError::RootNotSource(root));
            }
        }

        let faulted: BTreeSet<LineId> = faulted.into_iter().collect();
        for &line in &faulted {
            if !line_index.contains_key(&line) {
                return Err(NetworkError::UnknownFaultedLine(line));
            }
        }

        let network = Network {
            buses,
            lines,
            roots,
            faulted,
            bus_index,
            line_index,
            adjacency,
        };

        // The full graph (faulted lines included) must be connected.
        if let Some(first) = network.buses.first() {
            let mut seen = vec![false; network.buses.len()];
            let mut queue = std::collections::VecDeque::from([0usize]);
            seen[0] = true;
            while let Some(u) = queue.pop_front() {
                for &(_, v) in &network.adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            if let Some(unreached) = seen.iter().position(|&s| !s) {
                return Err(NetworkError::Disconnected(
                    network.buses[unreached].id,
                    first.id,
                ));
            }
        }

        Ok(network)
    }

    /// Parse and validate a network file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, NetworkError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| NetworkError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let file: NetworkFile =
            serde_json::from_str(&text).map_err(|e| NetworkError::Parse {
                path: path.display().to_string(),
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
        Network::new(file.buses, file.lines, file.roots, file.faulted_lines)
    }

    /// Serialize to the canonical on-disk form (keys in declaration order,
    /// elements ascending by id, trailing newline). Byte-stable.
    pub fn to_canonical_json(&self) -> String {
        let file = NetworkFile {
            buses: self.buses.clone(),
            lines: self.lines.clone(),
            roots: self.roots.iter().copied().collect(),
            faulted_lines: self.faulted.iter().copied().collect(),
        };
        let mut text = serde_json::to_string_pretty(&file).expect("network serialization");
        text.push('\n');
        text
    }

    /// Write the canonical form to a file.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), NetworkError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_canonical_json()).map_err(|source| NetworkError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn buses(&self) -> &[Bus] {
        &self.buses
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn roots(&self) -> &BTreeSet<BusId> {
        &self.roots
    }

    pub fn faulted_lines(&self) -> &BTreeSet<LineId> {
        &self.faulted
    }

    pub fn is_root(&self, bus: BusId) -> bool {
        self.roots.contains(&bus)
    }

    pub fn is_faulted(&self, line: LineId) -> bool {
        self.faulted.contains(&line)
    }

    pub fn bus(&self, id: BusId) -> Result<&Bus, NetworkError> {
        self.bus_index
            .get(&id)
            .map(|&i| &self.buses[i])
            .ok_or(NetworkError::UnknownBus(id))
    }

    pub fn line(&self, id: LineId) -> Option<&Line> {
        self.line_index.get(&id).map(|&i| &self.lines[i])
    }

    pub fn bus_count(&self) -> usize {
        self.buses.len()
    }

    pub fn line_count(&self) -> usize {
        self.lines.len()
    }

    pub fn root_count(&self) -> usize {
        self.roots.len()
    }

    /// Source buses (substations and DGs), ascending id.
    pub fn sources(&self) -> impl Iterator<Item = &Bus> {
        self.buses.iter().filter(|b| b.is_source)
    }

    pub(crate) fn bus_idx(&self, id: BusId) -> Option<usize> {
        self.bus_index.get(&id).copied()
    }

    pub(crate) fn line_idx(&self, id: LineId) -> Option<usize> {
        self.line_index.get(&id).copied()
    }

    pub(crate) fn bus_at(&self, idx: usize) -> &Bus {
        &self.buses[idx]
    }

    pub(crate) fn line_at(&self, idx: usize) -> &Line {
        &self.lines[idx]
    }

    /// (line index, neighbor bus index) pairs, ascending line id.
    pub(crate) fn adjacent(&self, bus_idx: usize) -> &[(usize, usize)] {
        &self.adjacency[bus_idx]
    }

    /// Number of lines incident to a bus.
    pub fn degree(&self, bus: BusId) -> Result<usize, NetworkError> {
        let idx = self.bus_idx(bus).ok_or(NetworkError::UnknownBus(bus))?;
        Ok(self.adjacency[idx].len())
    }

    /// Ids of lines incident to a bus, ascending.
    pub fn incident_lines(&self, bus: BusId) -> Result<Vec<LineId>, NetworkError> {
        let idx = self.bus_idx(bus).ok_or(NetworkError::UnknownBus(bus))?;
        Ok(self.adjacency[idx]
            .iter()
            .map(|&(li, _)| self.lines[li].id)
            .collect())
    }

    /// Connected components of the subgraph induced by closed lines.
    ///
    /// Every bus appears in exactly one component (buses with no closed
    /// incident line are singletons). Components are sorted by their
    /// smallest bus id; buses within a component ascend.
    pub fn components_under(
        &self,
        assignment: &TopologyAssignment,
    ) -> Result<Vec<Vec<BusId>>, AssignmentError> {
        assignment.check_cover(self)?;
        let mut seen = vec![false; self.buses.len()];
        let mut components = Vec::new();
        for start in 0..self.buses.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut queue = std::collections::VecDeque::from([start]);
            let mut comp = vec![self.buses[start].id];
            while let Some(u) = queue.pop_front() {
                for &(li, v) in &self.adjacency[u] {
                    if !seen[v] && assignment.is_closed(self.lines[li].id) {
                        seen[v] = true;
                        comp.push(self.buses[v].id);
                        queue.push_back(v);
                    }
                }
            }
            comp.sort();
            components.push(comp);
        }
        components.sort_by_key(|c| c[0]);
        Ok(components)
    }

    /// Total weighted load over all load buses: `sum_i weight_i` for buses
    /// with nonzero demand.
    pub fn total_load_weight(&self) -> f64 {
        self.buses
            .iter()
            .filter(|b| b.has_load())
            .map(|b| b.weight)
            .sum()
    }
}

impl Bus {
    /// True when the bus carries any demand.
    pub fn has_load(&self) -> bool {
        self.p_load > 0.0 || self.q_load != 0.0
    }
}

impl Line {
    /// The endpoint opposite to `bus`.
    pub fn other_end(&self, bus: BusId) -> BusId {
        if bus == self.from_bus {
            self.to_bus
        } else {
            self.from_bus
        }
    }
}

/// A 0/1 switch assignment over a network's lines, optionally with
/// parent-orientation, fictitious-flow, and load-pickup witnesses.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TopologyAssignment {
    /// Line status: true = closed (a = 1).
    pub line_status: BTreeMap<LineId, bool>,
    /// Parent relation: (line, child end) -> 1 when the other end is the
    /// child's parent.
    pub parent: Option<BTreeMap<(LineId, BusId), bool>>,
    /// Fictitious flow per line, signed along the reference direction.
    pub flow: Option<BTreeMap<LineId, f64>>,
    /// Load pickup status per bus (restoration only).
    pub load_pickup: Option<BTreeMap<BusId, bool>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct AssignmentFile {
    a: BTreeMap<u32, u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<BTreeMap<String, u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    f: Option<BTreeMap<u32, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    load_pickup: Option<BTreeMap<u32, u8>>,
}

#[derive(Debug, Error)]
pub enum AssignmentParseError {
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error in {path} at line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("malformed b key {0:?}: expected \"<line>:<child bus>\"")]
    BadParentKey(String),
}

impl TopologyAssignment {
    /// Assignment with every line closed except the network's faulted ones.
    pub fn all_closed(network: &Network) -> Self {
        let line_status = network
            .lines()
            .iter()
            .map(|l| (l.id, !network.is_faulted(l.id)))
            .collect();
        TopologyAssignment {
            line_status,
            ..Default::default()
        }
    }

    /// Assignment closing exactly `closed`, opening every other line.
    pub fn from_closed_lines(network: &Network, closed: &[LineId]) -> Self {
        let closed: BTreeSet<LineId> = closed.iter().copied().collect();
        let line_status = network
            .lines()
            .iter()
            .map(|l| (l.id, closed.contains(&l.id)))
            .collect();
        TopologyAssignment {
            line_status,
            ..Default::default()
        }
    }

    pub fn is_closed(&self, line: LineId) -> bool {
        self.line_status.get(&line).copied().unwrap_or(false)
    }

    /// Number of closed lines.
    pub fn closed_count(&self) -> usize {
        self.line_status.values().filter(|&&c| c).count()
    }

    /// Closed line ids, ascending.
    pub fn closed_lines(&self) -> Vec<LineId> {
        self.line_status
            .iter()
            .filter_map(|(&id, &c)| c.then_some(id))
            .collect()
    }

    /// Verify the keys of `a` cover exactly the network's lines.
    pub fn check_cover(&self, network: &Network) -> Result<(), AssignmentError> {
        for line in network.lines() {
            if !self.line_status.contains_key(&line.id) {
                return Err(AssignmentError::MissingLine(line.id));
            }
        }
        for &id in self.line_status.keys() {
            if network.line(id).is_none() {
                return Err(AssignmentError::UnknownLine(id));
            }
        }
        Ok(())
    }

    /// `check_cover` plus: faulted lines must be open.
    pub fn check_against(&self, network: &Network) -> Result<(), AssignmentError> {
        self.check_cover(network)?;
        for &line in network.faulted_lines() {
            if self.is_closed(line) {
                return Err(AssignmentError::ClosedFaultedLine(line));
            }
        }
        Ok(())
    }

    /// The a-vector ordered by ascending line id, for lexicographic
    /// tie-breaking and display.
    pub fn a_vector(&self) -> Vec<bool> {
        self.line_status.values().copied().collect()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, AssignmentParseError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| AssignmentParseError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let file: AssignmentFile =
            serde_json::from_str(&text).map_err(|e| AssignmentParseError::Parse {
                path: path.display().to_string(),
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
        let mut parent = None;
        if let Some(b) = file.b {
            let mut map = BTreeMap::new();
            for (key, value) in b {
                let (line, bus) = key
                    .split_once(':')
                    .and_then(|(l, c)| Some((l.parse().ok()?, c.parse().ok()?)))
                    .ok_or_else(|| AssignmentParseError::BadParentKey(key.clone()))?;
                map.insert((LineId(line), BusId(bus)), value != 0);
            }
            parent = Some(map);
        }
        Ok(TopologyAssignment {
            line_status: file
                .a
                .into_iter()
                .map(|(id, v)| (LineId(id), v != 0))
                .collect(),
            parent,
            flow: file
                .f
                .map(|f| f.into_iter().map(|(id, v)| (LineId(id), v)).collect()),
            load_pickup: file.load_pickup.map(|p| {
                p.into_iter().map(|(id, v)| (BusId(id), v != 0)).collect()
            }),
        })
    }

    /// Canonical JSON form (keys ascending, trailing newline).
    pub fn to_canonical_json(&self) -> String {
        let file = AssignmentFile {
            a: self
                .line_status
                .iter()
                .map(|(&id, &c)| (id.0, c as u8))
                .collect(),
            b: self.parent.as_ref().map(|b| {
                b.iter()
                    .map(|(&(line, bus), &v)| (format!("{}:{}", line.0, bus.0), v as u8))
                    .collect()
            }),
            f: self
                .flow
                .as_ref()
                .map(|f| f.iter().map(|(&id, &v)| (id.0, v)).collect()),
            load_pickup: self.load_pickup.as_ref().map(|p| {
                p.iter().map(|(&id, &v)| (id.0, v as u8)).collect()
            }),
        };
        let mut text = serde_json::to_string_pretty(&file).expect("assignment serialization");
        text.push('\n');
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testnets::{fig1, fig2};

    #[test]
    fn fig_fixtures_have_documented_shape() {
        let fig1 = fig1();
        assert_eq!(fig1.bus_count(), 6);
        assert_eq!(fig1.line_count(), 6);
        assert_eq!(fig1.roots().len(), 1);
        assert_eq!(fig1.sources().count(), 2);

        let fig2 = fig2();
        assert_eq!(fig2.bus_count(), 4);
        assert_eq!(fig2.line_count(), 4);
        assert_eq!(fig2.roots().len(), 2);
    }

    #[test]
    fn duplicate_bus_id_is_rejected_by_name() {
        let mut buses = fig2().buses().to_vec();
        buses.push(buses[1].clone());
        let lines = fig2().lines().to_vec();
        let err = Network::new(buses, lines, [BusId(1), BusId(4)], []).unwrap_err();
        match err {
            NetworkError::DuplicateBus(id) => assert_eq!(id, BusId(2)),
            other => panic!("expected DuplicateBus, got {other}"),
        }
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        let buses = vec![
            Bus {
                id: BusId(1),
                p_load: 0.0,
                q_load: 0.0,
                weight: 1.0,
                is_source: true,
                p_gen_max: 1.0,
                q_gen_max: 1.0,
                v_min: 0.9,
                v_max: 1.1,
            },
            Bus {
                id: BusId(2),
                p_load: 0.1,
                q_load: 0.0,
                weight: 1.0,
                is_source: false,
                p_gen_max: 0.0,
                q_gen_max: 0.0,
                v_min: 0.9,
                v_max: 1.1,
            },
        ];
        let err = Network::new(buses, vec![], [BusId(1)], []).unwrap_err();
        assert!(matches!(err, NetworkError::Disconnected(BusId(2), BusId(1))));
    }

    #[test]
    fn root_must_be_source() {
        let net = fig2();
        let err = Network::new(
            net.buses().to_vec(),
            net.lines().to_vec(),
            [BusId(2)],
            [],
        )
        .unwrap_err();
        assert!(matches!(err, NetworkError::RootNotSource(BusId(2))));
    }

    #[test]
    fn degree_and_incident_lines_ascend() {
        let net = fig2();
        assert_eq!(net.degree(BusId(1)).unwrap(), 2);
        assert_eq!(
            net.incident_lines(BusId(4)).unwrap(),
            vec![LineId(3), LineId(4)]
        );
        assert!(net.degree(BusId(99)).is_err());
    }

    #[test]
    fn degree_sum_is_twice_line_count() {
        for net in [fig1(), fig2()] {
            let total: usize = net
                .buses()
                .iter()
                .map(|b| net.degree(b.id).unwrap())
                .sum();
            assert_eq!(total, 2 * net.line_count());
        }
    }

    #[test]
    fn components_all_closed_is_single() {
        let net = fig2();
        let assignment = TopologyAssignment::all_closed(&net);
        let comps = net.components_under(&assignment).unwrap();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].len(), 4);
    }

    #[test]
    fn pseudo_root_assignment_splits_fig1_in_two() {
        let net = fig1();
        // Close everything but line 3 = (3,4): tree {1,2,3} plus cycle {4,5,6}.
        let assignment = TopologyAssignment::from_closed_lines(
            &net,
            &[LineId(1), LineId(2), LineId(4), LineId(5), LineId(6)],
        );
        let comps = net.components_under(&assignment).unwrap();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0], vec![BusId(1), BusId(2), BusId(3)]);
        assert_eq!(comps[1], vec![BusId(4), BusId(5), BusId(6)]);
    }

    #[test]
    fn assignment_cover_is_enforced() {
        let net = fig2();
        let mut assignment = TopologyAssignment::all_closed(&net);
        assignment.line_status.remove(&LineId(2));
        assert!(matches!(
            net.components_under(&assignment),
            Err(AssignmentError::MissingLine(LineId(2)))
        ));
    }

    #[test]
    fn canonical_json_round_trips_bit_exactly() {
        let net = fig1();
        let dir = std::env::temp_dir().join("radiality-network-roundtrip");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("fig1.json");
        net.save(&path).unwrap();
        let reloaded = Network::load(&path).unwrap();
        assert_eq!(net.to_canonical_json(), reloaded.to_canonical_json());
        std::fs::remove_file(&path).ok();
    }
}
