//! Builders for the radiality constraint sets over a network.
//!
//! Three families are supported, all sharing the same line-status binaries
//! `a_l`:
//!
//! * **ST** — the parent-child (spanning tree) constraints: per line, the
//!   pair rule `b_l_from + b_l_to = a_l`; root buses never act as a child
//!   (their `b` is fixed to 0 through bounds, not rows); every non-root bus
//!   has exactly one parent.
//! * **SCF** — single-commodity flow: a fictitious unit demand at each
//!   non-root bus balanced through flows `F_l` that a disconnected line
//!   forces to zero via `|F_l| <= M a_l`.
//! * **SCF0** = SCF plus the edge-count equality `sum(a) = |N| - |R|`;
//!   **SCF+ST** = ST plus SCF (the edge-count row is implied by ST and is
//!   not emitted).
//!
//! Faulted lines get their `a` fixed to 0 through variable bounds in every
//! builder, which keeps row counts independent of the fault set.

use crate::model::{
    LinearModel, ModelError, ModelProvenance, ModelSize, RowBody, Sense, Term, VarId, VarKind,
    VarRole,
};
use crate::network::Network;

/// Which radiality constraint set an operation should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintSet {
    St,
    Scf0,
    ScfSt,
}

impl ConstraintSet {
    pub fn label(&self) -> &'static str {
        match self {
            ConstraintSet::St => "st",
            ConstraintSet::Scf0 => "scf0",
            ConstraintSet::ScfSt => "scf-st",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "st" => Some(ConstraintSet::St),
            "scf0" => Some(ConstraintSet::Scf0),
            "scf-st" | "scf_st" | "scfst" => Some(ConstraintSet::ScfSt),
            _ => None,
        }
    }

    /// Build this set's model over a network.
    pub fn build(&self, network: &Network) -> LinearModel {
        match self {
            ConstraintSet::St => build_st(network),
            ConstraintSet::Scf0 => build_scf0(network),
            ConstraintSet::ScfSt => build_scf_st(network),
        }
    }
}

/// Tunables for the SCF rows. `big_m` defaults to the bus count and
/// `demand` to 1 per non-root bus.
#[derive(Debug, Clone, Copy)]
pub struct ScfParams {
    pub big_m: Option<f64>,
    pub demand: f64,
}

impl Default for ScfParams {
    fn default() -> Self {
        ScfParams {
            big_m: None,
            demand: 1.0,
        }
    }
}

impl ScfParams {
    fn resolved_m(&self, network: &Network) -> f64 {
        self.big_m.unwrap_or(network.bus_count() as f64)
    }
}

/// Declare one `a` binary per line; faulted lines are fixed open.
fn add_line_status_vars(model: &mut LinearModel, network: &Network) -> Vec<VarId> {
    network
        .lines()
        .iter()
        .map(|line| {
            let ub = if network.is_faulted(line.id) { 0.0 } else { 1.0 };
            model
                .add_role_variable(VarRole::LineStatus(line.id), VarKind::Binary, 0.0, ub)
                .expect("fresh line-status variable")
        })
        .collect()
}

fn add_st_rows(model: &mut LinearModel, network: &Network, a: &[VarId]) {
    // b variables per line end; a root end is fixed to 0 through its bounds.
    let mut b_vars = Vec::with_capacity(network.line_count());
    for line in network.lines() {
        let mut pair = Vec::with_capacity(2);
        for child in [line.from_bus, line.to_bus] {
            let ub = if network.is_root(child) { 0.0 } else { 1.0 };
            let id = model
                .add_role_variable(VarRole::ParentChild(line.id, child), VarKind::Binary, 0.0, ub)
                .expect("fresh parent variable");
            pair.push(id);
        }
        b_vars.push((pair[0], pair[1]));
    }

    // Pair rule: b_l_from + b_l_to - a_l = 0.
    for (idx, line) in network.lines().iter().enumerate() {
        let (bf, bt) = b_vars[idx];
        model
            .add_row(
                format!("pair_l{}", line.id),
                RowBody::Linear {
                    terms: vec![Term::new(bf, 1.0), Term::new(bt, 1.0), Term::new(a[idx], -1.0)],
                    sense: Sense::Eq,
                    rhs: 0.0,
                },
            )
            .expect("pair row");
    }

    // Exactly one parent per non-root bus.
    for bus in network.buses() {
        if network.is_root(bus.id) {
            continue;
        }
        let terms = network
            .incident_lines(bus.id)
            .expect("bus of the network")
            .into_iter()
            .map(|line| {
                let var = model
                    .var_by_name(&format!("b_{}_{}", line, bus.id))
                    .expect("declared parent variable");
                Term::new(var, 1.0)
            })
            .collect();
        model
            .add_row(
                format!("one_parent_n{}", bus.id),
                RowBody::Linear {
                    terms,
                    sense: Sense::Eq,
                    rhs: 1.0,
                },
            )
            .expect("one-parent row");
    }
}

fn add_edge_count_row(model: &mut LinearModel, network: &Network, a: &[VarId]) {
    let rhs = network.bus_count() as f64 - network.root_count() as f64;
    model
        .add_row(
            "edge_count",
            RowBody::Linear {
                terms: a.iter().map(|&v| Term::new(v, 1.0)).collect(),
                sense: Sense::Eq,
                rhs,
            },
        )
        .expect("edge-count row");
}

fn add_scf_rows(model: &mut LinearModel, network: &Network, a: &[VarId], params: &ScfParams) {
    let m = params.resolved_m(network);

    let flows: Vec<VarId> = network
        .lines()
        .iter()
        .map(|line| {
            let (lb, ub) = if network.is_faulted(line.id) {
                (0.0, 0.0)
            } else {
                (-m, m)
            };
            model
                .add_role_variable(VarRole::FictitiousFlow(line.id), VarKind::Continuous, lb, ub)
                .expect("fresh flow variable")
        })
        .collect();

    // Flow balance at each non-root bus: inflow - outflow = demand.
    for bus in network.buses() {
        if network.is_root(bus.id) {
            continue;
        }
        let mut terms = Vec::new();
        for (idx, line) in network.lines().iter().enumerate() {
            if line.to_bus == bus.id {
                terms.push(Term::new(flows[idx], 1.0));
            } else if line.from_bus == bus.id {
                terms.push(Term::new(flows[idx], -1.0));
            }
        }
        model
            .add_row(
                format!("balance_n{}", bus.id),
                RowBody::Linear {
                    terms,
                    sense: Sense::Eq,
                    rhs: params.demand,
                },
            )
            .expect("balance row");
    }

    // Disconnection forces zero flow: |F_l| <= M a_l, one record per line.
    for (idx, line) in network.lines().iter().enumerate() {
        model
            .add_row(
                format!("flow_cap_l{}", line.id),
                RowBody::AbsRange {
                    value: vec![Term::new(flows[idx], 1.0)],
                    bound_const: 0.0,
                    bound: vec![Term::new(a[idx], m)],
                },
            )
            .expect("flow-cap row");
    }
}

/// Parent-child (spanning tree) constraints.
pub fn build_st(network: &Network) -> LinearModel {
    let mut model = LinearModel::new("st");
    let a = add_line_status_vars(&mut model, network);
    add_st_rows(&mut model, network, &a);
    model.set_provenance(ModelProvenance::St);
    model
}

/// The single edge-count equality `sum(a) = |N| - |R|`.
pub fn build_edge_count(network: &Network) -> LinearModel {
    let mut model = LinearModel::new("edge_count");
    let a = add_line_status_vars(&mut model, network);
    add_edge_count_row(&mut model, network, &a);
    model.set_provenance(ModelProvenance::EdgeCount);
    model
}

/// Single-commodity flow constraints with default parameters.
pub fn build_scf(network: &Network) -> LinearModel {
    build_scf_with(network, &ScfParams::default())
}

pub fn build_scf_with(network: &Network, params: &ScfParams) -> LinearModel {
    let mut model = LinearModel::new("scf");
    let a = add_line_status_vars(&mut model, network);
    add_scf_rows(&mut model, network, &a, params);
    model.set_provenance(ModelProvenance::Scf);
    model
}

/// SCF0: single-commodity flow plus the edge-count equality.
pub fn build_scf0(network: &Network) -> LinearModel {
    build_scf0_with(network, &ScfParams::default())
}

pub fn build_scf0_with(network: &Network, params: &ScfParams) -> LinearModel {
    let mut model = LinearModel::new("scf0");
    let a = add_line_status_vars(&mut model, network);
    add_scf_rows(&mut model, network, &a, params);
    add_edge_count_row(&mut model, network, &a);
    model.set_provenance(ModelProvenance::Scf0);
    model
}

/// SCF+ST: parent-child plus single-commodity flow. The edge-count row is
/// implied by the parent-child rows and is not emitted.
pub fn build_scf_st(network: &Network) -> LinearModel {
    build_scf_st_with(network, &ScfParams::default())
}

pub fn build_scf_st_with(network: &Network, params: &ScfParams) -> LinearModel {
    let mut model = LinearModel::new("scf_st");
    let a = add_line_status_vars(&mut model, network);
    add_st_rows(&mut model, network, &a);
    add_scf_rows(&mut model, network, &a, params);
    model.set_provenance(ModelProvenance::ScfSt);
    model
}

/// Size of a radiality model under the standard accounting: auxiliary
/// variables only (`a` binaries are common to every set and excluded), each
/// abs-range record counts as one inequation, root fixings live in bounds.
pub fn model_size(model: &LinearModel) -> Result<ModelSize, ModelError> {
    match model.provenance() {
        Some(
            ModelProvenance::St
            | ModelProvenance::EdgeCount
            | ModelProvenance::Scf
            | ModelProvenance::Scf0
            | ModelProvenance::ScfSt,
        ) => {}
        Some(other) => return Err(ModelError::UnsizedProvenance(other)),
        None => return Err(ModelError::UnsizedProvenance(ModelProvenance::Assembled)),
    }
    let n_vars = model
        .variables()
        .iter()
        .filter(|v| !matches!(v.role, VarRole::LineStatus(_)))
        .count();
    let (_, n_inequations, n_equations) = model.raw_counts();
    Ok(ModelSize {
        n_vars,
        n_inequations,
        n_equations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Bus, BusId, Line, LineId};
    use crate::testnets::{fig1, fig2};

    fn rows_named(model: &LinearModel, prefix: &str) -> usize {
        model
            .rows()
            .iter()
            .filter(|r| r.name.starts_with(prefix))
            .count()
    }

    #[test]
    fn st_on_fig2_declares_pairs_and_parent_rows() {
        let model = build_st(&fig2());
        let binaries = model
            .variables()
            .iter()
            .filter(|v| v.kind == VarKind::Binary)
            .count();
        assert_eq!(binaries, 12); // 4 a + 8 b
        assert_eq!(rows_named(&model, "pair_l"), 4);
        assert_eq!(rows_named(&model, "one_parent_n"), 2);

        // Root fixings for buses 1 and 4 live in bounds, not rows.
        for name in ["b_1_1", "b_2_1", "b_3_4", "b_4_4"] {
            let var = model.var(model.var_by_name(name).unwrap());
            assert_eq!(var.ub, 0.0, "{name} should be fixed to 0");
        }
        let free = model.var(model.var_by_name("b_1_2").unwrap());
        assert_eq!(free.ub, 1.0);
    }

    #[test]
    fn st_on_fig1_row_counts() {
        let model = build_st(&fig1());
        assert_eq!(rows_named(&model, "pair_l"), 6);
        assert_eq!(rows_named(&model, "one_parent_n"), 5); // buses 2..6
    }

    #[test]
    fn single_line_root_fixing_forces_load_side_parent() {
        // Smallest instance: one root, one load bus, one line.
        let net = crate::testnets::two_bus();
        let model = build_st(&net);
        assert_eq!(model.var(model.var_by_name("b_1_1").unwrap()).ub, 0.0);
        // The pair rule then reads b_1_2 = a_1.
        assert_eq!(rows_named(&model, "pair_l"), 1);
        assert_eq!(rows_named(&model, "one_parent_n"), 1);
    }

    #[test]
    fn edge_count_rhs_matches_bus_and_root_counts() {
        let fig2_model = build_edge_count(&fig2());
        let row = &fig2_model.rows()[0];
        match &row.body {
            RowBody::Linear { rhs, sense, terms } => {
                assert_eq!(*rhs, 2.0);
                assert_eq!(*sense, Sense::Eq);
                assert_eq!(terms.len(), 4);
            }
            other => panic!("unexpected body {other:?}"),
        }

        let fig1_model = build_edge_count(&fig1());
        match &fig1_model.rows()[0].body {
            RowBody::Linear { rhs, .. } => assert_eq!(*rhs, 5.0),
            other => panic!("unexpected body {other:?}"),
        }

        // Degenerate forest of isolated roots: every bus a root.
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
                p_load: 0.0,
                q_load: 0.0,
                weight: 1.0,
                is_source: true,
                p_gen_max: 1.0,
                q_gen_max: 1.0,
                v_min: 0.9,
                v_max: 1.1,
            },
        ];
        let lines = vec![Line {
            id: LineId(1),
            from_bus: BusId(1),
            to_bus: BusId(2),
            r: 0.01,
            x: 0.01,
            i_max: None,
        }];
        let all_roots = Network::new(buses, lines, [BusId(1), BusId(2)], []).unwrap();
        match &build_edge_count(&all_roots).rows()[0].body {
            RowBody::Linear { rhs, .. } => assert_eq!(*rhs, 0.0),
            other => panic!("unexpected body {other:?}"),
        }
    }

    #[test]
    fn scf_on_fig2_has_expected_shape() {
        let model = build_scf(&fig2());
        let flows = model
            .variables()
            .iter()
            .filter(|v| matches!(v.role, VarRole::FictitiousFlow(_)))
            .count();
        assert_eq!(flows, 4);
        assert_eq!(rows_named(&model, "balance_n"), 2); // buses 2 and 3
        assert_eq!(rows_named(&model, "flow_cap_l"), 4);

        // M defaults to the bus count.
        for line in fig2().lines() {
            let var = model.var(model.var_by_name(&format!("F_{}", line.id)).unwrap());
            assert_eq!((var.lb, var.ub), (-4.0, 4.0));
        }
    }

    #[test]
    fn scf_on_fig1_has_five_balances_with_m_six() {
        let model = build_scf(&fig1());
        assert_eq!(rows_named(&model, "balance_n"), 5);
        let var = model.var(model.var_by_name("F_1").unwrap());
        assert_eq!((var.lb, var.ub), (-6.0, 6.0));
    }

    #[test]
    fn scf_without_non_root_buses_has_no_balance_rows() {
        let buses = vec![Bus {
            id: BusId(1),
            p_load: 0.0,
            q_load: 0.0,
            weight: 1.0,
            is_source: true,
            p_gen_max: 1.0,
            q_gen_max: 1.0,
            v_min: 0.9,
            v_max: 1.1,
        }];
        let net = Network::new(buses, vec![], [BusId(1)], []).unwrap();
        let model = build_scf(&net);
        assert_eq!(rows_named(&model, "balance_n"), 0);
    }

    #[test]
    fn composed_sets_union_their_parts() {
        let net = fig2();
        let scf0 = build_scf0(&net);
        assert_eq!(scf0.raw_counts(), (8, 4, 3)); // 4a+4F, 4 caps, 2 bal + count

        let scf_st = build_scf_st(&net);
        assert_eq!(scf_st.raw_counts(), (16, 4, 8)); // 4a+8b+4F; 4 pair + 2 parent + 2 bal

        let fig1_scf0 = build_scf0(&fig1());
        assert_eq!(fig1_scf0.raw_counts(), (12, 6, 6));
    }

    #[test]
    fn scf_params_are_overridable() {
        let model = build_scf_with(
            &fig2(),
            &ScfParams {
                big_m: Some(10.0),
                demand: 2.0,
            },
        );
        let var = model.var(model.var_by_name("F_1").unwrap());
        assert_eq!((var.lb, var.ub), (-10.0, 10.0));
        match &model
            .rows()
            .iter()
            .find(|r| r.name == "balance_n2")
            .unwrap()
            .body
        {
            RowBody::Linear { rhs, .. } => assert_eq!(*rhs, 2.0),
            other => panic!("unexpected body {other:?}"),
        }
    }

    #[test]
    fn faulted_lines_are_fixed_through_bounds() {
        let base = fig1();
        let net = Network::new(
            base.buses().to_vec(),
            base.lines().to_vec(),
            [BusId(1)],
            [LineId(2)],
        )
        .unwrap();
        for model in [build_st(&net), build_scf0(&net), build_scf_st(&net)] {
            let a = model.var(model.var_by_name("a_2").unwrap());
            assert_eq!((a.lb, a.ub), (0.0, 0.0));
        }
        // Row counts unchanged relative to the healthy network.
        let healthy = build_scf0(&base);
        let faulted = build_scf0(&net);
        assert_eq!(healthy.raw_counts(), faulted.raw_counts());
    }

    #[test]
    fn size_accounting_counts_auxiliaries_only() {
        let net = fig2();
        let size = model_size(&build_scf0(&net)).unwrap();
        assert_eq!(
            size,
            ModelSize {
                n_vars: 4,
                n_inequations: 4,
                n_equations: 3
            }
        );
        assert!(model_size(&crate::power_flow::lindistflow_rows(&net)).is_err());
    }
}
