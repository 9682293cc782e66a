//! Radial power flow by backward/forward sweep, operational-limit checking,
//! and linearized branch-flow rows for exported models.
//!
//! The sweep treats each component's root as its slack bus at 1.0 pu. A
//! backward pass accumulates complex branch powers leaf-to-root including
//! the `I^2 (r + jx)` series loss evaluated at the receiving end; a forward
//! pass updates voltages root-to-leaf. Iteration stops when the largest
//! voltage change falls below 1e-10 pu (at most 100 passes).

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::model::{LinearModel, ModelProvenance, RowBody, Sense, Term, VarKind, VarRole};
use crate::network::{AssignmentError, BusId, LineId, Network, TopologyAssignment};
use crate::verify::{check_radial, ForestReport};

pub const SWEEP_TOLERANCE: f64 = 1e-10;
pub const SWEEP_MAX_ITERATIONS: usize = 100;

/// An operational limit exceeded by a solved power flow.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Violation {
    VMin { bus: BusId, v: f64 },
    VMax { bus: BusId, v: f64 },
    IMax { line: LineId, i: f64 },
    GenCapacity { root: BusId, excess: f64 },
}

/// Solution of a radial power flow.
#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    /// Voltage magnitude per bus, per unit.
    pub v: BTreeMap<BusId, f64>,
    /// Sending-end active flow per line, signed along the reference
    /// direction; zero on open lines.
    pub p_flow: BTreeMap<LineId, f64>,
    /// Sending-end reactive flow per line.
    pub q_flow: BTreeMap<LineId, f64>,
    /// Active series loss per line.
    pub line_loss: BTreeMap<LineId, f64>,
    pub total_loss: f64,
    pub violations: Vec<Violation>,
    pub converged: bool,
    /// Refinement passes that still moved a voltage by at least the
    /// tolerance; 0 when the flat start is already exact.
    pub iterations: usize,
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("assignment is not radial: condition1={condition1_ok}, condition2={condition2_ok}")]
    NonRadial {
        condition1_ok: bool,
        condition2_ok: bool,
    },
    #[error(transparent)]
    Assignment(#[from] AssignmentError),
}

/// Solve the power flow on a radial assignment.
///
/// `pickup` masks bus demands (restoration); absent entries default to
/// served. Limit violations are reported, never fatal; non-convergence is
/// reported through `converged`.
pub fn sweep(
    network: &Network,
    assignment: &TopologyAssignment,
    pickup: Option<&BTreeMap<BusId, bool>>,
) -> Result<SweepResult, SweepError> {
    let report = check_radial(network, assignment)?;
    if !report.is_radial {
        return Err(SweepError::NonRadial {
            condition1_ok: report.condition1_ok,
            condition2_ok: report.condition2_ok,
        });
    }
    Ok(sweep_radial(network, assignment, pickup, &report))
}

/// The sweep proper, assuming `report` proves radiality.
pub(crate) fn sweep_radial(
    network: &Network,
    assignment: &TopologyAssignment,
    pickup: Option<&BTreeMap<BusId, bool>>,
    report: &ForestReport,
) -> SweepResult {
    let n = network.bus_count();
    let served = |bus: BusId| -> bool {
        pickup
            .and_then(|p| p.get(&bus).copied())
            .unwrap_or(true)
    };

    let s_load: Vec<Complex64> = network
        .buses()
        .iter()
        .map(|b| {
            if served(b.id) {
                Complex64::new(b.p_load, b.q_load)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();

    // BFS forest over closed lines from every root (each component is a
    // tree with exactly one root).
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    for &root in network.roots() {
        let idx = network.bus_idx(root).expect("root bus");
        seen[idx] = true;
        order.push(idx);
        queue.push_back(idx);
    }
    while let Some(u) = queue.pop_front() {
        for &(li, v) in network.adjacent(u) {
            if !seen[v] && assignment.is_closed(network.line_at(li).id) {
                seen[v] = true;
                parent[v] = Some((li, u));
                order.push(v);
                queue.push_back(v);
            }
        }
    }
    debug_assert!(seen.iter().all(|&s| s));

    let mut v = vec![Complex64::new(1.0, 0.0); n];
    // Complex power entering each bus's parent line: receiving end, and
    // sending end after adding the series loss.
    let mut s_recv = vec![Complex64::new(0.0, 0.0); n];
    let mut s_send = vec![Complex64::new(0.0, 0.0); n];

    let mut iterations = 0;
    let mut converged = false;
    for _ in 0..SWEEP_MAX_ITERATIONS {
        // Backward: accumulate powers leaf to root.
        let mut acc = s_load.clone();
        for &u in order.iter().rev() {
            if let Some((li, p)) = parent[u] {
                let line = network.line_at(li);
                let z = Complex64::new(line.r, line.x);
                let recv = acc[u];
                let i_sq = recv.norm_sqr() / v[u].norm_sqr();
                let send = recv + z * i_sq;
                s_recv[u] = recv;
                s_send[u] = send;
                acc[p] += send;
            }
        }
        // Forward: update voltages root to leaf.
        let mut delta: f64 = 0.0;
        for &u in order.iter() {
            match parent[u] {
                None => {
                    delta = delta.max((v[u] - Complex64::new(1.0, 0.0)).norm());
                    v[u] = Complex64::new(1.0, 0.0);
                }
                Some((li, p)) => {
                    let line = network.line_at(li);
                    let z = Complex64::new(line.r, line.x);
                    let current = (s_send[u] / v[p]).conj();
                    let new_v = v[p] - z * current;
                    delta = delta.max((new_v - v[u]).norm());
                    v[u] = new_v;
                }
            }
        }
        if delta < SWEEP_TOLERANCE {
            converged = true;
            break;
        }
        iterations += 1;
    }

    // Collect flows, losses, and limit checks.
    let mut p_flow: BTreeMap<LineId, f64> =
        network.lines().iter().map(|l| (l.id, 0.0)).collect();
    let mut q_flow = p_flow.clone();
    let mut line_loss = p_flow.clone();
    let mut total_loss = 0.0;
    let mut violations = Vec::new();

    for u in 0..n {
        if let Some((li, p)) = parent[u] {
            let line = network.line_at(li);
            let loss = (s_send[u] - s_recv[u]).re;
            total_loss += loss;
            line_loss.insert(line.id, loss);
            let signed = if network.bus_at(p).id == line.from_bus {
                s_send[u]
            } else {
                -s_send[u]
            };
            p_flow.insert(line.id, signed.re);
            q_flow.insert(line.id, signed.im);
            if let Some(i_max) = line.i_max {
                let i = s_send[u].norm() / v[p].norm();
                if i > i_max {
                    violations.push(Violation::IMax { line: line.id, i });
                }
            }
        }
    }

    let v_out: BTreeMap<BusId, f64> = network
        .buses()
        .iter()
        .enumerate()
        .map(|(i, b)| (b.id, v[i].norm()))
        .collect();

    for bus in network.buses() {
        let vm = v_out[&bus.id];
        if vm < bus.v_min {
            violations.push(Violation::VMin { bus: bus.id, v: vm });
        } else if vm > bus.v_max {
            violations.push(Violation::VMax { bus: bus.id, v: vm });
        }
    }

    // Per-component generation capacity versus net injection at the slack.
    // Capacity aggregates every source inside the component, so non-root
    // sources back up their island's root.
    for comp in &report.components {
        let root = comp.roots[0];
        let root_idx = network.bus_idx(root).expect("root bus");
        let mut injection = s_load[root_idx];
        for &(li, child) in network.adjacent(root_idx) {
            if assignment.is_closed(network.line_at(li).id)
                && parent[child] == Some((li, root_idx))
            {
                injection += s_send[child];
            }
        }
        let mut p_cap = 0.0;
        let mut q_cap = 0.0;
        for &bus in &comp.buses {
            let b = network.bus(bus).expect("component bus");
            if b.is_source {
                p_cap += b.p_gen_max;
                q_cap += b.q_gen_max;
            }
        }
        let p_excess = injection.re - p_cap;
        let q_excess = injection.im - q_cap;
        let excess = p_excess.max(q_excess);
        if excess > 1e-12 {
            violations.push(Violation::GenCapacity { root, excess });
        }
    }

    SweepResult {
        v: v_out,
        p_flow,
        q_flow,
        line_loss,
        total_loss,
        violations,
        converged,
        iterations,
    }
}

/// Linearized branch-flow rows over the same line binaries as the
/// radiality builders: loss-less P/Q balances per non-root bus, voltage
/// drops deactivated by big-M on open lines, and switched flow caps.
///
/// Per line: one `vdrop` record `|v_f - v_t - r fp - x fq| <= M (1 - a)`
/// with `M = 2 (v_max - v_min)`, plus `|fp| <= P a` and `|fq| <= Q a`
/// where P, Q are the network's total demands.
pub fn lindistflow_rows(network: &Network) -> LinearModel {
    lindistflow(network, false)
}

/// Restoration variant: balances read `... = load * pickup` with one
/// pickup binary per load bus.
pub fn lindistflow_rows_with_pickup(network: &Network) -> LinearModel {
    lindistflow(network, true)
}

fn lindistflow(network: &Network, with_pickup: bool) -> LinearModel {
    let mut model = LinearModel::new("lindistflow");

    let a: Vec<_> = network
        .lines()
        .iter()
        .map(|line| {
            let ub = if network.is_faulted(line.id) { 0.0 } else { 1.0 };
            model
                .add_role_variable(VarRole::LineStatus(line.id), VarKind::Binary, 0.0, ub)
                .expect("fresh line-status variable")
        })
        .collect();

    let v_lo = network.buses().iter().map(|b| b.v_min).fold(f64::INFINITY, f64::min);
    let v_hi = network
        .buses()
        .iter()
        .map(|b| b.v_max)
        .fold(f64::NEG_INFINITY, f64::max);
    let m_v = 2.0 * (v_hi - v_lo);
    let m_p: f64 = network.buses().iter().map(|b| b.p_load).sum();
    let m_q: f64 = network.buses().iter().map(|b| b.q_load.abs()).sum();

    let volt: BTreeMap<BusId, _> = network
        .buses()
        .iter()
        .map(|bus| {
            let (lb, ub) = if network.is_root(bus.id) {
                (1.0, 1.0)
            } else {
                (bus.v_min, bus.v_max)
            };
            let id = model
                .add_role_variable(VarRole::Voltage(bus.id), VarKind::Continuous, lb, ub)
                .expect("fresh voltage variable");
            (bus.id, id)
        })
        .collect();

    let fp: Vec<_> = network
        .lines()
        .iter()
        .map(|line| {
            model
                .add_role_variable(VarRole::ActiveFlow(line.id), VarKind::Continuous, -m_p, m_p)
                .expect("fresh flow variable")
        })
        .collect();
    let fq: Vec<_> = network
        .lines()
        .iter()
        .map(|line| {
            model
                .add_role_variable(
                    VarRole::ReactiveFlow(line.id),
                    VarKind::Continuous,
                    -m_q,
                    m_q,
                )
                .expect("fresh flow variable")
        })
        .collect();

    let pickup: BTreeMap<BusId, _> = if with_pickup {
        network
            .buses()
            .iter()
            .filter(|b| b.has_load())
            .map(|bus| {
                let id = model
                    .add_role_variable(VarRole::Pickup(bus.id), VarKind::Binary, 0.0, 1.0)
                    .expect("fresh pickup variable");
                (bus.id, id)
            })
            .collect()
    } else {
        BTreeMap::new()
    };

    // Loss-less balances at non-root buses: inflow - outflow = demand.
    for bus in network.buses() {
        if network.is_root(bus.id) {
            continue;
        }
        let mut p_terms = Vec::new();
        let mut q_terms = Vec::new();
        for (idx, line) in network.lines().iter().enumerate() {
            let sign = if line.to_bus == bus.id {
                1.0
            } else if line.from_bus == bus.id {
                -1.0
            } else {
                continue;
            };
            p_terms.push(Term::new(fp[idx], sign));
            q_terms.push(Term::new(fq[idx], sign));
        }
        let (p_rhs, q_rhs) = match pickup.get(&bus.id) {
            Some(&pk) => {
                p_terms.push(Term::new(pk, -bus.p_load));
                q_terms.push(Term::new(pk, -bus.q_load));
                (0.0, 0.0)
            }
            None if with_pickup => (0.0, 0.0), // no load to serve
            None => (bus.p_load, bus.q_load),
        };
        model
            .add_row(
                format!("pbal_n{}", bus.id),
                RowBody::Linear {
                    terms: p_terms,
                    sense: Sense::Eq,
                    rhs: p_rhs,
                },
            )
            .expect("balance row");
        model
            .add_row(
                format!("qbal_n{}", bus.id),
                RowBody::Linear {
                    terms: q_terms,
                    sense: Sense::Eq,
                    rhs: q_rhs,
                },
            )
            .expect("balance row");
    }

    for (idx, line) in network.lines().iter().enumerate() {
        // Voltage drop active only when closed:
        // |v_f - v_t - r fp - x fq| <= M_v (1 - a).
        model
            .add_row(
                format!("vdrop_l{}", line.id),
                RowBody::AbsRange {
                    value: vec![
                        Term::new(volt[&line.from_bus], 1.0),
                        Term::new(volt[&line.to_bus], -1.0),
                        Term::new(fp[idx], -line.r),
                        Term::new(fq[idx], -line.x),
                    ],
                    bound_const: m_v,
                    bound: vec![Term::new(a[idx], -m_v)],
                },
            )
            .expect("voltage-drop row");
        // Switched flow boxes.
        model
            .add_row(
                format!("pcap_l{}", line.id),
                RowBody::AbsRange {
                    value: vec![Term::new(fp[idx], 1.0)],
                    bound_const: 0.0,
                    bound: vec![Term::new(a[idx], m_p)],
                },
            )
            .expect("flow-cap row");
        model
            .add_row(
                format!("qcap_l{}", line.id),
                RowBody::AbsRange {
                    value: vec![Term::new(fq[idx], 1.0)],
                    bound_const: 0.0,
                    bound: vec![Term::new(a[idx], m_q)],
                },
            )
            .expect("flow-cap row");
    }

    model.set_provenance(ModelProvenance::LinDistFlow);
    model
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testnets::{fig2, two_bus};

    /// Independent two-bus ladder: repeated substitution on the receiving
    /// voltage of the quadratic v2 = 1 - z (s / v2)*.
    fn two_bus_reference_loss(r: f64, x: f64, p: f64, q: f64) -> f64 {
        let z = Complex64::new(r, x);
        let s = Complex64::new(p, q);
        let mut v2 = Complex64::new(1.0, 0.0);
        for _ in 0..200 {
            let next = Complex64::new(1.0, 0.0) - z * (s / v2).conj();
            if (next - v2).norm() < 1e-14 {
                v2 = next;
                break;
            }
            v2 = next;
        }
        let i = (s / v2).norm();
        r * i * i
    }

    #[test]
    fn two_bus_loss_matches_reference_to_1e10() {
        let net = two_bus();
        let assignment = TopologyAssignment::all_closed(&net);
        let result = sweep(&net, &assignment, None).unwrap();
        assert!(result.converged);
        let reference = two_bus_reference_loss(0.01, 0.01, 0.1, 0.05);
        assert!(
            (result.total_loss - reference).abs() < 1e-10,
            "sweep {} vs reference {}",
            result.total_loss,
            reference
        );
        assert!(result.violations.is_empty());
    }

    #[test]
    fn zero_load_network_converges_immediately() {
        let net = fig2();
        let zero: Vec<_> = net
            .buses()
            .iter()
            .cloned()
            .map(|mut b| {
                b.p_load = 0.0;
                b.q_load = 0.0;
                b
            })
            .collect();
        let net =
            Network::new(zero, net.lines().to_vec(), [BusId(1), BusId(4)], []).unwrap();
        let assignment =
            TopologyAssignment::from_closed_lines(&net, &[LineId(1), LineId(2)]);
        let result = sweep(&net, &assignment, None).unwrap();
        assert!(result.converged);
        assert_eq!(result.iterations, 0);
        assert_eq!(result.total_loss, 0.0);
        assert!(result.v.values().all(|&v| v == 1.0));
    }

    #[test]
    fn non_radial_input_is_an_error() {
        let net = fig2();
        let err = sweep(&net, &TopologyAssignment::all_closed(&net), None).unwrap_err();
        assert!(matches!(err, SweepError::NonRadial { .. }));
    }

    #[test]
    fn power_balances_generation_against_load_and_loss() {
        let net = crate::testnets::fig1();
        let assignment = TopologyAssignment::from_closed_lines(
            &net,
            &[LineId(1), LineId(2), LineId(3), LineId(4), LineId(5)],
        );
        let result = sweep(&net, &assignment, None).unwrap();
        assert!(result.converged);
        // Root injection = line 1 sending-end flow (+ no root load).
        let injection = result.p_flow[&LineId(1)];
        let served: f64 = net
            .buses()
            .iter()
            .filter(|b| !net.is_root(b.id))
            .map(|b| b.p_load)
            .sum();
        assert!((injection - (served + result.total_loss)).abs() < 1e-9);
    }

    #[test]
    fn pickup_masks_demand() {
        let net = two_bus();
        let assignment = TopologyAssignment::all_closed(&net);
        let pickup = BTreeMap::from([(BusId(2), false)]);
        let result = sweep(&net, &assignment, Some(&pickup)).unwrap();
        assert_eq!(result.total_loss, 0.0);
        assert_eq!(result.p_flow[&LineId(1)], 0.0);
    }

    #[test]
    fn capacity_excess_is_reported_per_root() {
        let net = two_bus();
        let mut buses = net.buses().to_vec();
        buses[0].p_gen_max = 0.05; // below the 0.1 pu demand
        let tight = Network::new(buses, net.lines().to_vec(), [BusId(1)], []).unwrap();
        let result =
            sweep(&tight, &TopologyAssignment::all_closed(&tight), None).unwrap();
        assert!(result
            .violations
            .iter()
            .any(|v| matches!(v, Violation::GenCapacity { root: BusId(1), .. })));
    }

    #[test]
    fn lindistflow_shapes_match_construction_rule() {
        let net = fig2();
        let model = lindistflow_rows(&net);
        let balances = model
            .rows()
            .iter()
            .filter(|r| r.name.starts_with("pbal_") || r.name.starts_with("qbal_"))
            .count();
        assert_eq!(balances, 4); // 2 per non-root bus
        let drops: Vec<_> = model
            .rows()
            .iter()
            .filter(|r| r.name.starts_with("vdrop_"))
            .collect();
        assert_eq!(drops.len(), 4); // one record per line, a pair when expanded
        let expanded_drops = model
            .expanded_rows()
            .iter()
            .filter(|(name, ..)| name.starts_with("vdrop_"))
            .count();
        assert_eq!(expanded_drops, 2 * net.line_count());
    }

    #[test]
    fn two_bus_lindistflow_rows() {
        let net = two_bus();
        let model = lindistflow_rows(&net);
        let balances = model
            .rows()
            .iter()
            .filter(|r| r.name.contains("bal_"))
            .count();
        assert_eq!(balances, 2);
        let drops = model
            .rows()
            .iter()
            .filter(|r| r.name.starts_with("vdrop_"))
            .count();
        assert_eq!(drops, 1);
    }

    #[test]
    fn zero_impedance_drop_degenerates_to_voltage_equality() {
        let net = two_bus();
        let mut lines = net.lines().to_vec();
        lines[0].r = 0.0;
        lines[0].x = 0.0;
        let net = Network::new(net.buses().to_vec(), lines, [BusId(1)], []).unwrap();
        let model = lindistflow_rows(&net);
        let drop = model
            .rows()
            .iter()
            .find(|r| r.name == "vdrop_l1")
            .unwrap();
        match &drop.body {
            RowBody::AbsRange { value, .. } => {
                // Flow terms vanish; only v_1 - v_2 remains.
                let nonzero = value.iter().filter(|t| t.coeff != 0.0).count();
                assert_eq!(nonzero, 2);
            }
            other => panic!("unexpected body {other:?}"),
        }
    }
}
