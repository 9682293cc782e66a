//! Integer bound propagation over a linear model.
//!
//! Repeatedly tightens variable domains using row activity bounds until a
//! fixed point: for a row `sum(c_i x_i) <= r`, each variable's bound is
//! derived from the minimal activity of the remaining terms; equalities
//! tighten in both directions and binaries round to {0,1}. This is the
//! sub-problem view a branch-and-bound solver sees after fixing some of the
//! line binaries, and it is where the redundant parent-child rows of the
//! combined constraint set pay off.

use std::collections::BTreeMap;

use crate::model::{LinearModel, RowBody, Sense, Term, VarId, VarKind};
use crate::network::LineId;

const EPS: f64 = 1e-9;

/// Variable domains indexed like the model's variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Domains(pub Vec<(f64, f64)>);

impl Domains {
    pub fn of_model(model: &LinearModel) -> Self {
        Domains(model.variables().iter().map(|v| (v.lb, v.ub)).collect())
    }

    pub fn get(&self, id: VarId) -> (f64, f64) {
        self.0[id.0]
    }

    pub fn fix(&mut self, id: VarId, value: f64) {
        self.0[id.0] = (value, value);
    }

    pub fn is_fixed(&self, id: VarId) -> bool {
        let (lb, ub) = self.0[id.0];
        (ub - lb).abs() < EPS
    }

    /// Fixed value if the domain is a point.
    pub fn fixed_value(&self, id: VarId) -> Option<f64> {
        let (lb, ub) = self.0[id.0];
        ((ub - lb).abs() < EPS).then_some(0.5 * (lb + ub))
    }
}

/// Result of propagation: either new domains or a proof of emptiness
/// naming the violated row.
#[derive(Debug, Clone)]
pub enum Propagation {
    Feasible(Domains),
    Infeasible { row: String },
}

impl Propagation {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Propagation::Feasible(_))
    }
}

/// Run bound propagation to a fixed point starting from the given domains.
pub fn propagate(model: &LinearModel, domains: Domains) -> Propagation {
    Propagator::new(model).run(domains)
}

/// Reusable propagation engine with the row expansion precomputed, for
/// callers that propagate the same model many times.
pub struct Propagator {
    rows: Vec<(String, Vec<Term>, Sense, f64)>,
    kinds: Vec<VarKind>,
}

impl Propagator {
    pub fn new(model: &LinearModel) -> Self {
        Propagator {
            rows: model.expanded_rows(),
            kinds: model.variables().iter().map(|v| v.kind).collect(),
        }
    }

    pub fn run(&self, mut domains: Domains) -> Propagation {
        let max_passes = 4 * (self.kinds.len() + self.rows.len()) + 8;
        for _ in 0..max_passes {
            let mut changed = false;
            for (name, terms, sense, rhs) in &self.rows {
                match tighten_row(&self.kinds, &mut domains, terms, *sense, *rhs) {
                    RowOutcome::Infeasible => {
                        return Propagation::Infeasible { row: name.clone() }
                    }
                    RowOutcome::Changed => changed = true,
                    RowOutcome::Unchanged => {}
                }
            }
            if !changed {
                break;
            }
        }
        Propagation::Feasible(domains)
    }
}

enum RowOutcome {
    Unchanged,
    Changed,
    Infeasible,
}

fn tighten_row(
    kinds: &[VarKind],
    domains: &mut Domains,
    terms: &[Term],
    sense: Sense,
    rhs: f64,
) -> RowOutcome {
    let mut outcome = RowOutcome::Unchanged;
    let passes: &[(bool, f64)] = match sense {
        // Treat `>=` as `<=` with flipped signs; equalities run both.
        Sense::Le => &[(false, 1.0)],
        Sense::Ge => &[(true, 1.0)],
        Sense::Eq => &[(false, 1.0), (true, 1.0)],
    };
    for &(flip, _) in passes {
        let sign = if flip { -1.0 } else { 1.0 };
        let bound = sign * rhs;
        // Minimal activity of sign*terms.
        let mut min_activity = 0.0;
        for t in terms {
            let c = sign * t.coeff;
            let (lb, ub) = domains.get(t.var);
            min_activity += if c >= 0.0 { c * lb } else { c * ub };
        }
        if min_activity > bound + EPS {
            return RowOutcome::Infeasible;
        }
        for t in terms {
            let c = sign * t.coeff;
            if c.abs() < EPS {
                continue;
            }
            let (lb, ub) = domains.get(t.var);
            let own_min = if c >= 0.0 { c * lb } else { c * ub };
            let slack = bound - (min_activity - own_min);
            // c * x <= slack
            if c > 0.0 {
                let new_ub = slack / c;
                if new_ub < ub - EPS {
                    let rounded = round_bound(kinds, t.var, new_ub, false);
                    if rounded < lb - EPS {
                        return RowOutcome::Infeasible;
                    }
                    domains.0[t.var.0].1 = rounded;
                    outcome = RowOutcome::Changed;
                }
            } else {
                let new_lb = slack / c;
                if new_lb > lb + EPS {
                    let rounded = round_bound(kinds, t.var, new_lb, true);
                    if rounded > ub + EPS {
                        return RowOutcome::Infeasible;
                    }
                    domains.0[t.var.0].0 = rounded;
                    outcome = RowOutcome::Changed;
                }
            }
        }
    }
    outcome
}

fn round_bound(kinds: &[VarKind], var: VarId, value: f64, is_lower: bool) -> f64 {
    match kinds[var.0] {
        VarKind::Binary => {
            if is_lower {
                if value > EPS {
                    1.0
                } else {
                    0.0
                }
            } else if value < 1.0 - EPS {
                0.0
            } else {
                1.0
            }
        }
        VarKind::Continuous => value,
    }
}

/// Propagated view of one constraint set's sub-problem: the domains of the
/// unfixed line binaries plus the equality rows that survive substitution,
/// re-expressed over line binaries.
#[derive(Debug, Clone)]
pub struct SubproblemView {
    pub feasible: bool,
    /// Domain per line id (only lines not fixed by the caller).
    pub free_domains: BTreeMap<LineId, (f64, f64)>,
    /// Reduced equality rows `sum(a_l) = rhs` over free lines (after
    /// substituting fixed variables and aliases), ascending by line set.
    pub sum_rules: Vec<(Vec<LineId>, f64)>,
    /// Row that proved emptiness, when infeasible.
    pub conflict_row: Option<String>,
}

/// Apply fixings to a radiality model, propagate, and summarize the
/// resulting sub-problem over the line binaries.
pub fn subproblem_view(
    model: &LinearModel,
    fixings: &BTreeMap<LineId, bool>,
) -> SubproblemView {
    let mut domains = Domains::of_model(model);
    for (&line, &value) in fixings {
        if let Some(var) = model.line_status_var(line) {
            domains.fix(var, value as u8 as f64);
        }
    }
    match propagate(model, domains) {
        Propagation::Infeasible { row } => SubproblemView {
            feasible: false,
            free_domains: BTreeMap::new(),
            sum_rules: Vec::new(),
            conflict_row: Some(row),
        },
        Propagation::Feasible(domains) => {
            let mut free_domains = BTreeMap::new();
            for var in model.variables() {
                if let crate::model::VarRole::LineStatus(line) = var.role {
                    if !fixings.contains_key(&line) {
                        let id = model.var_by_name(&var.name).expect("declared");
                        free_domains.insert(line, domains.get(id));
                    }
                }
            }
            let sum_rules = reduce_equalities(model, &domains);
            SubproblemView {
                feasible: true,
                free_domains,
                sum_rules,
                conflict_row: None,
            }
        }
    }
}

/// Substitute fixed variables into the equality rows, collapse aliases
/// (x = y pairs with zero residual), and keep rows whose support maps
/// entirely onto unfixed line binaries.
fn reduce_equalities(model: &LinearModel, domains: &Domains) -> Vec<(Vec<LineId>, f64)> {
    // Alias resolution: representative[v] = line binary equal to v.
    let mut alias: Vec<Option<VarId>> = (0..model.variables().len())
        .map(|i| {
            matches!(
                model.var(VarId(i)).role,
                crate::model::VarRole::LineStatus(_)
            )
            .then_some(VarId(i))
        })
        .collect();

    // One alias pass is enough for the parent-pair shape b + b' = a with
    // one side fixed; run twice to let chains settle.
    for _ in 0..2 {
        for row in model.rows() {
            let RowBody::Linear { terms, sense, rhs } = &row.body else {
                continue;
            };
            if *sense != Sense::Eq {
                continue;
            }
            let mut residual = *rhs;
            let mut unfixed: Vec<Term> = Vec::new();
            for t in terms {
                match domains.fixed_value(t.var) {
                    Some(v) => residual -= t.coeff * v,
                    None => unfixed.push(*t),
                }
            }
            if unfixed.len() == 2 && residual.abs() < EPS {
                let (p, q) = (unfixed[0], unfixed[1]);
                // c*p - c*q = 0  =>  p = q
                if (p.coeff + q.coeff).abs() < EPS {
                    match (alias[p.var.0], alias[q.var.0]) {
                        (Some(rep), None) => alias[q.var.0] = Some(rep),
                        (None, Some(rep)) => alias[p.var.0] = Some(rep),
                        _ => {}
                    }
                }
            }
        }
    }

    let mut rules: Vec<(Vec<LineId>, f64)> = Vec::new();
    for row in model.rows() {
        let RowBody::Linear { terms, sense, rhs } = &row.body else {
            continue;
        };
        if *sense != Sense::Eq {
            continue;
        }
        let mut residual = *rhs;
        let mut support: Vec<LineId> = Vec::new();
        let mut well_formed = true;
        for t in terms {
            match domains.fixed_value(t.var) {
                Some(v) => residual -= t.coeff * v,
                None => {
                    let Some(rep) = alias[t.var.0] else {
                        well_formed = false;
                        break;
                    };
                    if (t.coeff - 1.0).abs() > EPS {
                        well_formed = false;
                        break;
                    }
                    match model.var(rep).role {
                        crate::model::VarRole::LineStatus(line) => support.push(line),
                        _ => {
                            well_formed = false;
                            break;
                        }
                    }
                }
            }
        }
        if !well_formed || support.len() < 2 {
            continue;
        }
        support.sort();
        support.dedup();
        if !rules.iter().any(|(s, _)| *s == support) {
            rules.push((support, residual));
        }
    }
    rules.sort_by(|a, b| a.0.cmp(&b.0));
    rules
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::{build_scf0, build_scf_st};
    use crate::testnets::fig2;

    #[test]
    fn fixing_the_first_line_distinguishes_the_sets() {
        let net = fig2();
        let fixings = BTreeMap::from([(LineId(1), true)]);

        let scf0 = subproblem_view(&build_scf0(&net), &fixings);
        assert!(scf0.feasible);
        // All three remaining binaries stay free in [0,1]...
        for line in [2u32, 3, 4] {
            assert_eq!(scf0.free_domains[&LineId(line)], (0.0, 1.0));
        }
        // ...with the single counting rule over them.
        assert_eq!(
            scf0.sum_rules,
            vec![(vec![LineId(2), LineId(3), LineId(4)], 1.0)]
        );

        let scf_st = subproblem_view(&build_scf_st(&net), &fixings);
        assert!(scf_st.feasible);
        // The parent logic forces the root-to-root line open...
        assert_eq!(scf_st.free_domains[&LineId(3)], (0.0, 0.0));
        // ...and leaves a two-line exchange.
        assert!(scf_st
            .sum_rules
            .contains(&(vec![LineId(2), LineId(4)], 1.0)));
    }

    #[test]
    fn no_fixings_leaves_all_binaries_free() {
        let net = fig2();
        let view = subproblem_view(&build_scf0(&net), &BTreeMap::new());
        assert!(view.feasible);
        assert_eq!(view.free_domains.len(), 4);
        assert!(view
            .free_domains
            .values()
            .all(|&(lb, ub)| lb == 0.0 && ub == 1.0));
    }

    #[test]
    fn contradictory_fixings_are_reported_infeasible() {
        let net = fig2();
        // Closing everything violates the edge-count equality.
        let fixings: BTreeMap<LineId, bool> =
            net.lines().iter().map(|l| (l.id, true)).collect();
        let view = subproblem_view(&build_scf0(&net), &fixings);
        assert!(!view.feasible);
        assert!(view.conflict_row.is_some());
    }
}
