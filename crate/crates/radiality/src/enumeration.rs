//! Brute-force ground truth on small networks: enumerate assignments
//! satisfying a constraint set, enumerate rooted spanning forests by
//! backtracking, and hunt for assignments that satisfy the spanning-tree
//! constraints without being radial.

use thiserror::Error;

use crate::constraints::ConstraintSet;
use crate::network::{LineId, Network, TopologyAssignment};
use crate::union_find::UnionFind;
use crate::verify::{check_radial, scf_feasible, st_feasible};

/// Guard for full 2^|E| scans.
pub const DEFAULT_LINE_GUARD: usize = 24;
/// Guard for the forest backtracker.
pub const DEFAULT_FOREST_CAP: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum EnumerationError {
    #[error("network has {lines} lines; exhaustive scan is limited to {guard}")]
    TooManyLines { lines: usize, guard: usize },
    #[error("forest count exceeds the cap of {0}")]
    ForestCapExceeded(u64),
}

/// All line-status assignments satisfying the chosen constraint set, in
/// ascending binary order of the a-vector (line ids ascending, first line
/// most significant).
pub fn enumerate_feasible(
    network: &Network,
    set: ConstraintSet,
) -> Result<Vec<TopologyAssignment>, EnumerationError> {
    enumerate_feasible_with(network, set, DEFAULT_LINE_GUARD)
}

pub fn enumerate_feasible_with(
    network: &Network,
    set: ConstraintSet,
    guard: usize,
) -> Result<Vec<TopologyAssignment>, EnumerationError> {
    let mut out = Vec::new();
    for_each_assignment(network, guard, |assignment| {
        let keep = match set {
            ConstraintSet::St => st_feasible(network, assignment).0,
            ConstraintSet::Scf0 => {
                scf_feasible(network, assignment).0
                    && assignment.closed_count()
                        == network.bus_count() - network.root_count()
            }
            ConstraintSet::ScfSt => {
                st_feasible(network, assignment).0 && scf_feasible(network, assignment).0
            }
        };
        if keep {
            out.push(assignment.clone());
        }
    })?;
    Ok(out)
}

/// Visit every assignment with faulted lines open, ascending binary order.
pub fn for_each_assignment(
    network: &Network,
    guard: usize,
    mut visit: impl FnMut(&TopologyAssignment),
) -> Result<(), EnumerationError> {
    let e = network.line_count();
    if e > guard {
        return Err(EnumerationError::TooManyLines {
            lines: e,
            guard,
        });
    }
    let line_ids: Vec<LineId> = network.lines().iter().map(|l| l.id).collect();
    let mut faulted_mask: u64 = 0;
    for (k, line) in network.lines().iter().enumerate() {
        if network.is_faulted(line.id) {
            faulted_mask |= 1 << (e - 1 - k);
        }
    }
    let mut assignment = TopologyAssignment::from_closed_lines(network, &[]);
    for mask in 0u64..(1u64 << e) {
        if mask & faulted_mask != 0 {
            continue;
        }
        for (k, &id) in line_ids.iter().enumerate() {
            let closed = (mask >> (e - 1 - k)) & 1 == 1;
            assignment.line_status.insert(id, closed);
        }
        visit(&assignment);
    }
    Ok(())
}

/// First assignment (ascending binary order) satisfying the spanning-tree
/// constraints but failing radiality, with its parent witness attached.
///
/// Small networks are scanned exhaustively. Larger ones are searched
/// constructively: strand a rootless cycle (plus whatever hangs off it)
/// and span the remaining buses from the roots; the first stranding that
/// leaves the rest spannable yields a counterexample.
pub fn find_st_counterexample(network: &Network) -> Option<TopologyAssignment> {
    if network.line_count() <= DEFAULT_LINE_GUARD {
        let mut found = None;
        for_each_assignment(network, DEFAULT_LINE_GUARD, |assignment| {
            if found.is_some() {
                return;
            }
            let (ok, witness) = st_feasible(network, assignment);
            if !ok {
                return;
            }
            let report = check_radial(network, assignment).expect("covered assignment");
            if !report.is_radial {
                let mut hit = assignment.clone();
                hit.parent = witness;
                found = Some(hit);
            }
        })
        .expect("guard admits the scan");
        return found;
    }

    for cycle in rootless_simple_cycles(network) {
        if let Some(assignment) = strand_cycle(network, &cycle) {
            let (ok, witness) = st_feasible(network, &assignment);
            debug_assert!(ok);
            if ok {
                let mut hit = assignment;
                hit.parent = witness;
                return Some(hit);
            }
        }
    }
    None
}

/// Simple cycles over non-faulted lines that avoid every root, in a
/// deterministic order (by start bus, then discovery).
pub(crate) fn rootless_simple_cycles(network: &Network) -> Vec<Vec<LineId>> {
    let n = network.bus_count();
    let mut cycles = Vec::new();
    let usable =
        |li: usize| -> bool { !network.is_faulted(network.line_at(li).id) };

    // Standard smallest-start enumeration: grow paths from `start` through
    // buses with a larger index only, closing back on `start`.
    for start in 0..n {
        if network.is_root(network.bus_at(start).id) {
            continue;
        }
        let mut path_buses = vec![start];
        let mut path_lines: Vec<usize> = Vec::new();
        let mut on_path = vec![false; n];
        on_path[start] = true;

        struct Frame {
            bus: usize,
            next_edge: usize,
        }
        let mut stack = vec![Frame {
            bus: start,
            next_edge: 0,
        }];
        while let Some(frame) = stack.last_mut() {
            let u = frame.bus;
            let adjacency = network.adjacent(u);
            if frame.next_edge >= adjacency.len() {
                stack.pop();
                on_path[u] = false;
                path_buses.pop();
                path_lines.pop();
                continue;
            }
            let (li, v) = adjacency[frame.next_edge];
            frame.next_edge += 1;
            if !usable(li) {
                continue;
            }
            if v == start && path_buses.len() >= 3 {
                // Close the cycle; dedupe to one orientation by requiring
                // the second bus to be smaller than the last.
                if path_buses[1] < *path_buses.last().expect("nonempty path") {
                    let mut cycle: Vec<LineId> = path_lines
                        .iter()
                        .map(|&l| network.line_at(l).id)
                        .collect();
                    cycle.push(network.line_at(li).id);
                    cycle.sort();
                    cycles.push(cycle);
                }
                continue;
            }
            if v <= start || on_path[v] || network.is_root(network.bus_at(v).id) {
                continue;
            }
            on_path[v] = true;
            path_buses.push(v);
            path_lines.push(li);
            stack.push(Frame {
                bus: v,
                next_edge: 0,
            });
        }
    }
    cycles
}

/// Build an ST-feasible, non-radial assignment stranding `cycle` as a
/// pseudo-root: the cycle keeps its lines, buses that lose root access hang
/// off it as trees, and the rest is spanned from the roots. `None` when the
/// remaining graph cannot be spanned.
pub(crate) fn strand_cycle(network: &Network, cycle: &[LineId]) -> Option<TopologyAssignment> {
    strand_cycles(network, std::slice::from_ref(&cycle.to_vec())).map(|(a, _)| a)
}

/// Multi-cycle form of [`strand_cycle`]: strand several disjoint cycles at
/// once. Also returns the served-bus mask (true = bus stays connected to a
/// root). `None` when the cycles share a bus or the construction fails.
pub(crate) fn strand_cycles(
    network: &Network,
    cycles: &[Vec<LineId>],
) -> Option<(TopologyAssignment, Vec<bool>)> {
    let n = network.bus_count();
    let mut in_cycle_bus = vec![false; n];
    for cycle in cycles {
        let mut members = Vec::new();
        for &lid in cycle {
            let line = network.line(lid).expect("cycle line");
            members.push(network.bus_idx(line.from_bus).expect("endpoint"));
            members.push(network.bus_idx(line.to_bus).expect("endpoint"));
        }
        members.sort_unstable();
        members.dedup();
        for idx in members {
            if in_cycle_bus[idx] {
                return None; // cycles overlap
            }
            in_cycle_bus[idx] = true;
        }
    }

    // Which buses still reach a root when the cycle's buses are removed?
    let mut reach = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    for &root in network.roots() {
        let idx = network.bus_idx(root).expect("root bus");
        if !in_cycle_bus[idx] {
            reach[idx] = true;
            queue.push_back(idx);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &(li, v) in network.adjacent(u) {
            if network.is_faulted(network.line_at(li).id) {
                continue;
            }
            if !reach[v] && !in_cycle_bus[v] {
                reach[v] = true;
                queue.push_back(v);
            }
        }
    }

    let mut closed: Vec<LineId> = cycles.iter().flatten().copied().collect();

    // Hang stranded buses (unreachable, outside the cycle) onto the cycle
    // by BFS; fail if any cannot attach.
    let mut attached = in_cycle_bus.clone();
    let mut queue: std::collections::VecDeque<usize> = (0..n)
        .filter(|&i| in_cycle_bus[i])
        .collect();
    while let Some(u) = queue.pop_front() {
        for &(li, v) in network.adjacent(u) {
            if network.is_faulted(network.line_at(li).id) {
                continue;
            }
            if !attached[v] && !reach[v] {
                attached[v] = true;
                closed.push(network.line_at(li).id);
                queue.push_back(v);
            }
        }
    }
    if (0..n).any(|i| !reach[i] && !attached[i]) {
        return None;
    }

    // Span the reachable side from the roots.
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    for &root in network.roots() {
        let idx = network.bus_idx(root).expect("root bus");
        if reach[idx] {
            seen[idx] = true;
            queue.push_back(idx);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &(li, v) in network.adjacent(u) {
            if network.is_faulted(network.line_at(li).id) {
                continue;
            }
            if reach[v] && !seen[v] {
                seen[v] = true;
                closed.push(network.line_at(li).id);
                queue.push_back(v);
            }
        }
    }
    if (0..n).any(|i| reach[i] && !seen[i]) {
        return None;
    }

    Some((TopologyAssignment::from_closed_lines(network, &closed), reach))
}

/// All rooted spanning forests (every bus in exactly one tree, one root per
/// tree), generated by backtracking over edge inclusion with union-find
/// pruning. Never materializes the full 2^|E| space.
pub fn enumerate_rooted_spanning_forests(
    network: &Network,
) -> Result<Vec<TopologyAssignment>, EnumerationError> {
    enumerate_rooted_spanning_forests_with(network, DEFAULT_FOREST_CAP)
}

pub fn enumerate_rooted_spanning_forests_with(
    network: &Network,
    cap: u64,
) -> Result<Vec<TopologyAssignment>, EnumerationError> {
    let mut out = Vec::new();
    for_each_rooted_spanning_forest(network, cap, |closed| {
        out.push(TopologyAssignment::from_closed_lines(network, closed));
        true
    })?;
    Ok(out)
}

/// Streaming form of the forest enumerator; the callback may return `false`
/// to stop early. Returns the number of forests visited.
pub fn for_each_rooted_spanning_forest(
    network: &Network,
    cap: u64,
    mut visit: impl FnMut(&[LineId]) -> bool,
) -> Result<u64, EnumerationError> {
    let n = network.bus_count();
    let needed = n - network.root_count();

    // Root-count per union-find class.
    let mut uf = UnionFind::new(n);
    let mut root_count = vec![0usize; n];
    for &root in network.roots() {
        root_count[network.bus_idx(root).expect("root bus")] += 1;
    }

    let usable: Vec<bool> = network
        .lines()
        .iter()
        .map(|l| !network.is_faulted(l.id))
        .collect();

    struct Search<'a> {
        network: &'a Network,
        usable: Vec<bool>,
        uf: UnionFind,
        root_count: Vec<usize>,
        closed: Vec<LineId>,
        count: u64,
        cap: u64,
        stopped: bool,
    }

    impl<'a> Search<'a> {
        fn run(
            &mut self,
            idx: usize,
            needed: usize,
            visit: &mut impl FnMut(&[LineId]) -> bool,
        ) -> Result<(), EnumerationError> {
            if self.stopped {
                return Ok(());
            }
            let e = self.network.line_count();
            if self.closed.len() == needed {
                self.count += 1;
                if self.count > self.cap {
                    return Err(EnumerationError::ForestCapExceeded(self.cap));
                }
                if !visit(&self.closed) {
                    self.stopped = true;
                }
                return Ok(());
            }
            if idx == e {
                return Ok(());
            }
            // Not enough lines left to reach the target count.
            let remaining_usable = (idx..e).filter(|&i| self.usable[i]).count();
            if self.closed.len() + remaining_usable < needed {
                return Ok(());
            }

            // Include line idx when it neither closes a cycle nor joins two
            // rooted components.
            if self.usable[idx] {
                let line = self.network.line_at(idx);
                let u = self.network.bus_idx(line.from_bus).expect("endpoint");
                let v = self.network.bus_idx(line.to_bus).expect("endpoint");
                let (ru, rv) = (self.uf.find(u), self.uf.find(v));
                if ru != rv && !(self.root_count[ru] > 0 && self.root_count[rv] > 0) {
                    let record = self.uf.union(u, v).expect("distinct components");
                    let merged = self.uf.find(u);
                    let other = if merged == ru { rv } else { ru };
                    let moved = self.root_count[other];
                    self.root_count[merged] += moved;
                    self.root_count[other] -= moved;
                    self.closed.push(line.id);

                    self.run(idx + 1, needed, visit)?;

                    self.closed.pop();
                    self.root_count[other] += moved;
                    self.root_count[merged] -= moved;
                    self.uf.undo(record);
                }
            }
            // Exclude line idx.
            self.run(idx + 1, needed, visit)
        }
    }

    let mut search = Search {
        network,
        usable,
        uf: std::mem::replace(&mut uf, UnionFind::new(0)),
        root_count,
        closed: Vec::with_capacity(needed),
        count: 0,
        cap,
        stopped: false,
    };
    search.run(0, needed, &mut visit)?;
    Ok(search.count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::BusId;
    use crate::testnets::{fig1, fig2};

    #[test]
    fn fig1_scf0_equals_rooted_spanning_forests() {
        let net = fig1();
        let scf0 = enumerate_feasible(&net, ConstraintSet::Scf0).unwrap();
        let forests = enumerate_rooted_spanning_forests(&net).unwrap();
        // The cycle {4,5,6} contributes the choice of which edge to open.
        assert_eq!(forests.len(), 3);
        let scf0_sets: Vec<_> = scf0.iter().map(|a| a.closed_lines()).collect();
        let forest_sets: Vec<_> = forests.iter().map(|a| a.closed_lines()).collect();
        let mut sorted_scf0 = scf0_sets.clone();
        sorted_scf0.sort();
        let mut sorted_forests = forest_sets.clone();
        sorted_forests.sort();
        assert_eq!(sorted_scf0, sorted_forests);
        for a in &scf0 {
            assert!(check_radial(&net, a).unwrap().is_radial);
        }
    }

    #[test]
    fn fig1_st_is_strictly_larger_and_contains_the_pseudo_root() {
        let net = fig1();
        let st = enumerate_feasible(&net, ConstraintSet::St).unwrap();
        let scf0 = enumerate_feasible(&net, ConstraintSet::Scf0).unwrap();
        assert!(st.len() > scf0.len());
        let pseudo = TopologyAssignment::from_closed_lines(
            &net,
            &[LineId(1), LineId(2), LineId(4), LineId(5), LineId(6)],
        );
        assert!(st.iter().any(|a| a.line_status == pseudo.line_status));
        assert!(!scf0.iter().any(|a| a.line_status == pseudo.line_status));
    }

    #[test]
    fn fig2_scfst_matches_scf0() {
        let net = fig2();
        let scf0 = enumerate_feasible(&net, ConstraintSet::Scf0).unwrap();
        let scf_st = enumerate_feasible(&net, ConstraintSet::ScfSt).unwrap();
        let to_sets = |list: &[TopologyAssignment]| {
            let mut v: Vec<_> = list.iter().map(|a| a.closed_lines()).collect();
            v.sort();
            v
        };
        assert_eq!(to_sets(&scf0), to_sets(&scf_st));
        assert_eq!(scf0.len(), 4);
    }

    #[test]
    fn fig1_counterexample_strands_a_pseudo_root_on_the_cycle() {
        let net = fig1();
        let found = find_st_counterexample(&net).unwrap();
        // First in ascending binary order: line 1 open, the rest closed,
        // stranding {2..6} as cycle {4,5,6} with the 2-3-4 tail.
        assert_eq!(
            found.closed_lines(),
            vec![LineId(2), LineId(3), LineId(4), LineId(5), LineId(6)]
        );
        assert!(found.parent.is_some());
        let report = check_radial(&net, &found).unwrap();
        assert!(!report.is_radial);
        assert_eq!(report.pseudo_root_components.len(), 1);
        let comp = &report.components[report.pseudo_root_components[0]];
        assert_eq!(
            comp.cycle.as_ref().unwrap(),
            &vec![LineId(4), LineId(5), LineId(6)]
        );
        // The Fig.-style assignment (tree {1,2,3} + cycle {4,5,6}) is also
        // in the ST-feasible set, later in the order.
        let figure = TopologyAssignment::from_closed_lines(
            &net,
            &[LineId(1), LineId(2), LineId(4), LineId(5), LineId(6)],
        );
        assert!(st_feasible(&net, &figure).0);
    }

    #[test]
    fn tree_network_has_no_counterexample() {
        // 4-bus single-root tree: no cycle can exist.
        use crate::network::{Bus, Line};
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
                p_load: 0.01,
                q_load: 0.0,
                weight: 1.0,
                is_source: false,
                p_gen_max: 0.0,
                q_gen_max: 0.0,
                v_min: 0.9,
                v_max: 1.1,
            },
            Bus {
                id: BusId(3),
                p_load: 0.01,
                q_load: 0.0,
                weight: 1.0,
                is_source: false,
                p_gen_max: 0.0,
                q_gen_max: 0.0,
                v_min: 0.9,
                v_max: 1.1,
            },
            Bus {
                id: BusId(4),
                p_load: 0.01,
                q_load: 0.0,
                weight: 1.0,
                is_source: false,
                p_gen_max: 0.0,
                q_gen_max: 0.0,
                v_min: 0.9,
                v_max: 1.1,
            },
        ];
        let lines = vec![
            Line {
                id: LineId(1),
                from_bus: BusId(1),
                to_bus: BusId(2),
                r: 0.01,
                x: 0.01,
                i_max: None,
            },
            Line {
                id: LineId(2),
                from_bus: BusId(2),
                to_bus: BusId(3),
                r: 0.01,
                x: 0.01,
                i_max: None,
            },
            Line {
                id: LineId(3),
                from_bus: BusId(2),
                to_bus: BusId(4),
                r: 0.01,
                x: 0.01,
                i_max: None,
            },
        ];
        let net = Network::new(buses, lines, [BusId(1)], []).unwrap();
        assert!(find_st_counterexample(&net).is_none());
        // A single-root tree admits exactly one forest: everything closed.
        let forests = enumerate_rooted_spanning_forests(&net).unwrap();
        assert_eq!(forests.len(), 1);
        assert_eq!(forests[0].closed_count(), 3);
    }

    #[test]
    fn fig2_has_no_counterexample() {
        // Roots 1 and 4 sit on the only cycle, so no rootless cycle exists.
        assert!(find_st_counterexample(&fig2()).is_none());
    }

    #[test]
    fn fig2_forests_hold_one_root_each() {
        let net = fig2();
        let forests = enumerate_rooted_spanning_forests(&net).unwrap();
        assert_eq!(forests.len(), 4);
        for forest in &forests {
            assert_eq!(forest.closed_count(), 2);
            let report = check_radial(&net, forest).unwrap();
            assert!(report.is_radial);
            for comp in &report.components {
                assert_eq!(comp.roots.len(), 1);
            }
        }
    }

    #[test]
    fn guard_rejects_oversized_scans() {
        let net = fig1();
        assert!(matches!(
            enumerate_feasible_with(&net, ConstraintSet::St, 4),
            Err(EnumerationError::TooManyLines { .. })
        ));
    }

    #[test]
    fn forest_cap_is_enforced() {
        let net = fig2();
        assert!(matches!(
            enumerate_rooted_spanning_forests_with(&net, 2),
            Err(EnumerationError::ForestCapExceeded(2))
        ));
    }
}
