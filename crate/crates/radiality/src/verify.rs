//! Structural verification of topology assignments.
//!
//! [`check_radial`] diagnoses an assignment against the two forest
//! conditions (every non-root bus connected to a root; closed-line count
//! equal to `|N| - |R|`) and reports pseudo-roots: rootless components that
//! carry a cycle whose buses parent each other circularly.
//!
//! [`st_feasible`] decides whether some parent orientation satisfies the
//! spanning-tree constraints for a given line status, via the structural
//! characterization: each closed component over n buses with e closed lines
//! and r roots must satisfy (r = 1 and e = n-1) or (r = 0 and e = n).
//! [`scf_feasible`] decides the single-commodity-flow counterpart, which
//! holds exactly when every non-root bus is reachable from a root.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::network::{AssignmentError, BusId, LineId, Network, TopologyAssignment};

/// One connected component of the closed-line subgraph.
#[derive(Debug, Clone, Serialize)]
pub struct ComponentReport {
    /// Buses in the component, ascending.
    pub buses: Vec<BusId>,
    /// Closed lines inside the component, ascending.
    pub lines: Vec<LineId>,
    /// Root buses contained in the component.
    pub roots: Vec<BusId>,
    /// A witness cycle (line ids) when the component is not a tree.
    pub cycle: Option<Vec<LineId>>,
}

/// Structural diagnosis of an assignment.
#[derive(Debug, Clone, Serialize)]
pub struct ForestReport {
    pub components: Vec<ComponentReport>,
    /// Every non-root bus reaches a root over closed lines.
    pub condition1_ok: bool,
    /// Closed-line count equals `|N| - |R|`.
    pub condition2_ok: bool,
    pub is_radial: bool,
    /// Indices into `components` of rootless components containing a cycle.
    pub pseudo_root_components: Vec<usize>,
}

/// BFS forest plus per-component line partition over the closed subgraph.
struct ComponentStructure {
    /// Component index per bus index.
    comp_of: Vec<usize>,
    /// (line idx, parent bus idx) for every non-seed bus of the BFS forest.
    parent_edge: Vec<Option<(usize, usize)>>,
    /// Bus indices per component, in BFS discovery order.
    comp_buses: Vec<Vec<usize>>,
    /// Closed line indices per component, ascending.
    comp_lines: Vec<Vec<usize>>,
    /// Closed non-tree line indices per component, ascending.
    comp_extra: Vec<Vec<usize>>,
}

fn component_structure(network: &Network, assignment: &TopologyAssignment) -> ComponentStructure {
    let n = network.bus_count();
    let mut comp_of = vec![usize::MAX; n];
    let mut parent_edge: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut comp_buses: Vec<Vec<usize>> = Vec::new();

    for start in 0..n {
        if comp_of[start] != usize::MAX {
            continue;
        }
        let ci = comp_buses.len();
        comp_of[start] = ci;
        let mut members = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &(li, v) in network.adjacent(u) {
                if comp_of[v] == usize::MAX && assignment.is_closed(network.line_at(li).id) {
                    comp_of[v] = ci;
                    parent_edge[v] = Some((li, u));
                    members.push(v);
                    queue.push_back(v);
                }
            }
        }
        comp_buses.push(members);
    }

    let mut comp_lines = vec![Vec::new(); comp_buses.len()];
    let mut comp_extra = vec![Vec::new(); comp_buses.len()];
    for (li, line) in network.lines().iter().enumerate() {
        if !assignment.is_closed(line.id) {
            continue;
        }
        let u = network.bus_idx(line.from_bus).expect("endpoint exists");
        let v = network.bus_idx(line.to_bus).expect("endpoint exists");
        let ci = comp_of[u];
        comp_lines[ci].push(li);
        let is_tree = parent_edge[u].map(|(pl, _)| pl) == Some(li)
            || parent_edge[v].map(|(pl, _)| pl) == Some(li);
        if !is_tree {
            comp_extra[ci].push(li);
        }
    }

    ComponentStructure {
        comp_of,
        parent_edge,
        comp_buses,
        comp_lines,
        comp_extra,
    }
}

fn build_reports(network: &Network, structure: &ComponentStructure) -> Vec<ComponentReport> {
    let mut reports: Vec<ComponentReport> = structure
        .comp_buses
        .iter()
        .enumerate()
        .map(|(ci, members)| {
            let mut buses: Vec<BusId> =
                members.iter().map(|&b| network.bus_at(b).id).collect();
            buses.sort();
            let roots = buses
                .iter()
                .copied()
                .filter(|&b| network.is_root(b))
                .collect();
            let lines = structure.comp_lines[ci]
                .iter()
                .map(|&li| network.line_at(li).id)
                .collect();
            let cycle = structure.comp_extra[ci]
                .first()
                .map(|&li| witness_cycle(network, &structure.parent_edge, li));
            ComponentReport {
                buses,
                lines,
                roots,
                cycle,
            }
        })
        .collect();
    reports.sort_by_key(|c| c.buses[0]);
    reports
}

/// Close the fundamental cycle of a non-tree edge through the BFS forest.
fn witness_cycle(
    network: &Network,
    parent_edge: &[Option<(usize, usize)>],
    extra_line: usize,
) -> Vec<LineId> {
    let line = network.line_at(extra_line);
    let u = network.bus_idx(line.from_bus).expect("endpoint exists");
    let v = network.bus_idx(line.to_bus).expect("endpoint exists");
    // Ancestor chains (bus, line toward parent) from each endpoint.
    let chain = |mut x: usize| -> Vec<(usize, usize)> {
        let mut path = Vec::new();
        while let Some((li, p)) = parent_edge[x] {
            path.push((x, li));
            x = p;
        }
        path.push((x, usize::MAX));
        path
    };
    let up_u = chain(u);
    let up_v = chain(v);
    // Drop the common suffix (everything from the lowest common ancestor
    // up to the BFS root); what remains on each side is the path down to
    // the endpoints.
    let mut common = 0;
    while common < up_u.len()
        && common < up_v.len()
        && up_u[up_u.len() - 1 - common].0 == up_v[up_v.len() - 1 - common].0
    {
        common += 1;
    }
    let mut lines: Vec<LineId> = up_u[..up_u.len() - common]
        .iter()
        .chain(up_v[..up_v.len() - common].iter())
        .map(|&(_, li)| network.line_at(li).id)
        .collect();
    lines.push(line.id);
    lines.sort();
    lines.dedup();
    lines
}

/// Check an assignment for radiality and diagnose its components.
pub fn check_radial(
    network: &Network,
    assignment: &TopologyAssignment,
) -> Result<ForestReport, AssignmentError> {
    assignment.check_against(network)?;

    let structure = component_structure(network, assignment);
    let components = build_reports(network, &structure);

    let condition1_ok = components.iter().all(|c| !c.roots.is_empty());
    let closed = assignment.closed_count();
    let condition2_ok = closed == network.bus_count() - network.root_count();
    let is_radial = condition1_ok && condition2_ok;

    let pseudo_root_components = components
        .iter()
        .enumerate()
        .filter(|(_, c)| c.cycle.is_some() && c.roots.is_empty())
        .map(|(i, _)| i)
        .collect();

    if is_radial {
        // The two conditions together force one root per component and no
        // cycles; anything else is a bug in the analysis above.
        debug_assert!(components
            .iter()
            .all(|c| c.roots.len() == 1 && c.cycle.is_none()));
    }

    Ok(ForestReport {
        components,
        condition1_ok,
        condition2_ok,
        is_radial,
        pseudo_root_components,
    })
}

/// Decide whether a parent orientation exists for the given line status,
/// and produce one when it does.
///
/// Feasible iff every closed component is a rooted tree (one root,
/// `e = n - 1`) or a rootless unicyclic graph (`e = n`); the witness orients
/// trees toward their root and cycles circularly, with hanging trees
/// pointing toward the cycle.
pub fn st_feasible(
    network: &Network,
    assignment: &TopologyAssignment,
) -> (bool, Option<BTreeMap<(LineId, BusId), bool>>) {
    if assignment.check_cover(network).is_err() {
        return (false, None);
    }
    let structure = component_structure(network, assignment);

    for (ci, members) in structure.comp_buses.iter().enumerate() {
        let n = members.len();
        let e = structure.comp_lines[ci].len();
        let r = members
            .iter()
            .filter(|&&b| network.is_root(network.bus_at(b).id))
            .count();
        let rooted_tree = r == 1 && e == n - 1;
        let rootless_unicyclic = r == 0 && e == n;
        if !(rooted_tree || rootless_unicyclic) {
            return (false, None);
        }
    }

    // Build the witness. Every (line, end) pair appears; open lines and
    // non-child ends stay 0.
    let mut b: BTreeMap<(LineId, BusId), bool> = BTreeMap::new();
    for line in network.lines() {
        b.insert((line.id, line.from_bus), false);
        b.insert((line.id, line.to_bus), false);
    }

    for (ci, members) in structure.comp_buses.iter().enumerate() {
        let buses: Vec<BusId> = members.iter().map(|&i| network.bus_at(i).id).collect();
        let roots: Vec<BusId> = buses
            .iter()
            .copied()
            .filter(|&id| network.is_root(id))
            .collect();
        if roots.len() == 1 {
            orient_toward(network, assignment, &buses, &roots, &mut b);
        } else if let Some(&extra) = structure.comp_extra[ci].first() {
            let cycle_lines = witness_cycle(network, &structure.parent_edge, extra);
            let cycle_buses = orient_cycle(network, &cycle_lines, &mut b);
            orient_toward(network, assignment, &buses, &cycle_buses, &mut b);
        }
    }
    (true, Some(b))
}

/// Orient the parent pointers of every bus in `buses` toward the nearest
/// anchor via BFS (ascending tie-breaking); anchors get no parent.
fn orient_toward(
    network: &Network,
    assignment: &TopologyAssignment,
    buses: &[BusId],
    anchors: &[BusId],
    b: &mut BTreeMap<(LineId, BusId), bool>,
) {
    let member: std::collections::BTreeSet<BusId> = buses.iter().copied().collect();
    let mut visited: std::collections::BTreeSet<BusId> = anchors.iter().copied().collect();
    let mut queue: VecDeque<BusId> = anchors.iter().copied().collect();
    while let Some(p) = queue.pop_front() {
        let p_idx = network.bus_idx(p).expect("component bus");
        for &(li, c_idx) in network.adjacent(p_idx) {
            let line = network.line_at(li);
            if !assignment.is_closed(line.id) {
                continue;
            }
            let c = network.bus_at(c_idx).id;
            if member.contains(&c) && !visited.contains(&c) {
                visited.insert(c);
                b.insert((line.id, c), true); // p is c's parent
                queue.push_back(c);
            }
        }
    }
}

/// Orient a cycle circularly (each bus parents its successor) and return
/// the cycle's buses. Starts at the smallest bus id, heading toward its
/// smaller cycle neighbor.
fn orient_cycle(
    network: &Network,
    cycle_lines: &[LineId],
    b: &mut BTreeMap<(LineId, BusId), bool>,
) -> Vec<BusId> {
    let mut neighbors: BTreeMap<BusId, Vec<(LineId, BusId)>> = BTreeMap::new();
    for &lid in cycle_lines {
        let line = network.line(lid).expect("cycle line");
        neighbors
            .entry(line.from_bus)
            .or_default()
            .push((lid, line.to_bus));
        neighbors
            .entry(line.to_bus)
            .or_default()
            .push((lid, line.from_bus));
    }
    let start = *neighbors.keys().next().expect("nonempty cycle");
    let mut order = vec![start];
    let mut prev = start;
    let mut current = neighbors[&start]
        .iter()
        .map(|&(_, nb)| nb)
        .min()
        .expect("cycle neighbor");
    while current != start {
        order.push(current);
        let next = neighbors[&current]
            .iter()
            .map(|&(_, nb)| nb)
            .find(|&nb| nb != prev)
            .expect("cycle continues");
        prev = current;
        current = next;
    }
    // child -> parent along the traversal: order[i]'s parent is order[i+1].
    for i in 0..order.len() {
        let child = order[i];
        let parent = order[(i + 1) % order.len()];
        let line = neighbors[&child]
            .iter()
            .find(|&&(_, nb)| nb == parent)
            .map(|&(lid, _)| lid)
            .expect("cycle edge");
        b.insert((line, child), true);
    }
    order
}

/// Decide single-commodity-flow feasibility for the given line status and
/// produce a witness flow accumulating one unit of demand per non-root bus.
pub fn scf_feasible(
    network: &Network,
    assignment: &TopologyAssignment,
) -> (bool, Option<BTreeMap<LineId, f64>>) {
    if assignment.check_cover(network).is_err() {
        return (false, None);
    }
    let n = network.bus_count();

    // Multi-source BFS from all roots, ascending tie-breaking by bus id.
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n]; // (line idx, parent idx)
    let mut children: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &root in network.roots() {
        let idx = network.bus_idx(root).expect("root bus");
        seen[idx] = true;
        queue.push_back(idx);
        order.push(idx);
    }
    while let Some(u) = queue.pop_front() {
        for &(li, v) in network.adjacent(u) {
            if seen[v] || !assignment.is_closed(network.line_at(li).id) {
                continue;
            }
            seen[v] = true;
            parent[v] = Some((li, u));
            children[u].push((li, v));
            order.push(v);
            queue.push_back(v);
        }
    }

    if !seen.iter().all(|&s| s) {
        return (false, None);
    }

    // Accumulate subtree demands bottom-up, one unit per non-root bus.
    let mut subtree = vec![0.0f64; n];
    for &u in order.iter().rev() {
        if !network.is_root(network.bus_at(u).id) {
            subtree[u] += 1.0;
        }
        if let Some((_, p)) = parent[u] {
            subtree[p] += subtree[u];
        }
    }

    let mut flow: BTreeMap<LineId, f64> =
        network.lines().iter().map(|l| (l.id, 0.0)).collect();
    for v in 0..n {
        if let Some((li, p)) = parent[v] {
            let line = network.line_at(li);
            // Positive along the reference direction (from -> to).
            let signed = if network.bus_at(p).id == line.from_bus {
                subtree[v]
            } else {
                -subtree[v]
            };
            flow.insert(line.id, signed);
        }
    }

    debug_assert!(flow
        .values()
        .all(|f| f.abs() <= network.bus_count() as f64));
    (true, Some(flow))
}

/// (`|S| == |R|`, every bus carries active demand): the side conditions
/// under which power flow alone can substitute for connectivity.
pub fn check_conditions_3_4(network: &Network) -> (bool, bool) {
    let sources = network.sources().count();
    let all_loaded = network.buses().iter().all(|b| b.p_load > 0.0);
    (sources == network.root_count(), all_loaded)
}
