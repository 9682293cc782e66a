//! Solver-agnostic mixed-integer linear model representation.
//!
//! A [`LinearModel`] is a flat list of typed, bounded variables plus a list
//! of named constraint records. Two-sided absolute-value constraints such as
//! `|F| <= M a` are stored as a single [`RowBody::AbsRange`] record so that
//! model-size accounting counts them once; exporters expand each record into
//! its two linear rows.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::network::{BusId, LineId};

/// Index of a variable inside its model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Continuous,
}

/// What a variable stands for. Determines its exported name and whether it
/// counts as an auxiliary variable in size accounting (line-status binaries
/// are common to every constraint set and are not counted).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarRole {
    /// Switch status `a` of a line.
    LineStatus(LineId),
    /// Parent indicator `b` for (line, child end).
    ParentChild(LineId, BusId),
    /// Fictitious commodity flow `F` on a line.
    FictitiousFlow(LineId),
    /// Load pickup status of a bus.
    Pickup(BusId),
    /// Bus voltage magnitude.
    Voltage(BusId),
    /// Active power flow on a line.
    ActiveFlow(LineId),
    /// Reactive power flow on a line.
    ReactiveFlow(LineId),
    /// Epigraph/auxiliary variable.
    Aux,
}

impl VarRole {
    /// The stable exported name for this role.
    pub fn name(&self) -> Option<String> {
        match self {
            VarRole::LineStatus(l) => Some(format!("a_{l}")),
            VarRole::ParentChild(l, child) => Some(format!("b_{l}_{child}")),
            VarRole::FictitiousFlow(l) => Some(format!("F_{l}")),
            VarRole::Pickup(b) => Some(format!("pickup_{b}")),
            VarRole::Voltage(b) => Some(format!("v_{b}")),
            VarRole::ActiveFlow(l) => Some(format!("fp_{l}")),
            VarRole::ReactiveFlow(l) => Some(format!("fq_{l}")),
            VarRole::Aux => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lb: f64,
    pub ub: f64,
    pub role: VarRole,
}

/// One linear term `coeff * var`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub var: VarId,
    pub coeff: f64,
}

impl Term {
    pub fn new(var: VarId, coeff: f64) -> Self {
        Term { var, coeff }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Eq,
    Le,
    Ge,
}

impl Sense {
    pub fn symbol(&self) -> &'static str {
        match self {
            Sense::Eq => "=",
            Sense::Le => "<=",
            Sense::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone)]
pub enum RowBody {
    Linear {
        terms: Vec<Term>,
        sense: Sense,
        rhs: f64,
    },
    /// `|sum(value)| <= bound_const + sum(bound)`, stored as one record.
    AbsRange {
        value: Vec<Term>,
        bound_const: f64,
        bound: Vec<Term>,
    },
}

#[derive(Debug, Clone)]
pub struct Row {
    pub name: String,
    pub body: RowBody,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjSense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone)]
pub struct Objective {
    pub sense: ObjSense,
    pub terms: Vec<Term>,
}

/// Which builder produced a model. Size accounting is defined for the
/// radiality builders only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelProvenance {
    St,
    EdgeCount,
    Scf,
    Scf0,
    ScfSt,
    LinDistFlow,
    Assembled,
}

/// Model size per the standard accounting: auxiliary variables (everything
/// except the line-status binaries), inequations (each abs-range record
/// counts once), and equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelSize {
    pub n_vars: usize,
    pub n_inequations: usize,
    pub n_equations: usize,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("variable name {0:?} is already declared")]
    DuplicateVariable(String),
    #[error("row name {0:?} is already declared")]
    DuplicateRow(String),
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("variable {name:?} is declared as {ours:?} here and {theirs:?} in the merged model")]
    KindMismatch {
        name: String,
        ours: VarKind,
        theirs: VarKind,
    },
    #[error("size accounting is not defined for {0:?} models")]
    UnsizedProvenance(ModelProvenance),
}

/// A well-formed-by-construction mixed-integer linear model.
///
/// Every term references a declared variable (enforced by the typed
/// [`VarId`] handles), and variable and row names are unique.
#[derive(Debug, Clone)]
pub struct LinearModel {
    name: String,
    vars: Vec<Variable>,
    rows: Vec<Row>,
    objective: Option<Objective>,
    by_name: BTreeMap<String, VarId>,
    provenance: Option<ModelProvenance>,
}

impl LinearModel {
    pub fn new(name: impl Into<String>) -> Self {
        LinearModel {
            name: name.into(),
            vars: Vec::new(),
            rows: Vec::new(),
            objective: None,
            by_name: BTreeMap::new(),
            provenance: None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn provenance(&self) -> Option<ModelProvenance> {
        self.provenance
    }

    pub fn set_provenance(&mut self, provenance: ModelProvenance) {
        self.provenance = Some(provenance);
    }

    pub fn add_variable(
        &mut self,
        name: impl Into<String>,
        kind: VarKind,
        lb: f64,
        ub: f64,
        role: VarRole,
    ) -> Result<VarId, ModelError> {
        let name = name.into();
        if self.by_name.contains_key(&name) {
            return Err(ModelError::DuplicateVariable(name));
        }
        let id = VarId(self.vars.len());
        self.by_name.insert(name.clone(), id);
        self.vars.push(Variable {
            name,
            kind,
            lb,
            ub,
            role,
        });
        Ok(id)
    }

    /// Declare a variable named after its role.
    pub fn add_role_variable(
        &mut self,
        role: VarRole,
        kind: VarKind,
        lb: f64,
        ub: f64,
    ) -> Result<VarId, ModelError> {
        let name = role.name().expect("role with a canonical name");
        self.add_variable(name, kind, lb, ub, role)
    }

    pub fn add_row(&mut self, name: impl Into<String>, body: RowBody) -> Result<(), ModelError> {
        let name = name.into();
        if self.rows.iter().any(|r| r.name == name) {
            return Err(ModelError::DuplicateRow(name));
        }
        self.rows.push(Row { name, body });
        Ok(())
    }

    pub fn set_objective(&mut self, sense: ObjSense, terms: Vec<Term>) {
        self.objective = Some(Objective { sense, terms });
    }

    pub fn objective(&self) -> Option<&Objective> {
        self.objective.as_ref()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.vars[id.0]
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    /// The variable holding the switch status of `line`, if declared.
    pub fn line_status_var(&self, line: LineId) -> Option<VarId> {
        self.by_name
            .get(&format!("a_{line}"))
            .copied()
            .filter(|&id| matches!(self.vars[id.0].role, VarRole::LineStatus(_)))
    }

    /// Fix a variable by shrinking its bounds to a point.
    pub fn fix_variable(&mut self, id: VarId, value: f64) {
        self.vars[id.0].lb = value;
        self.vars[id.0].ub = value;
    }

    /// All rows in purely linear form; each abs-range record expands into a
    /// `_hi` (<=) and a `_lo` (>=) row.
    pub fn expanded_rows(&self) -> Vec<(String, Vec<Term>, Sense, f64)> {
        let mut out = Vec::new();
        for row in &self.rows {
            match &row.body {
                RowBody::Linear { terms, sense, rhs } => {
                    out.push((row.name.clone(), terms.clone(), *sense, *rhs));
                }
                RowBody::AbsRange {
                    value,
                    bound_const,
                    bound,
                } => {
                    // value - bound <= bound_const
                    let mut hi = value.clone();
                    hi.extend(bound.iter().map(|t| Term::new(t.var, -t.coeff)));
                    out.push((format!("{}_hi", row.name), hi, Sense::Le, *bound_const));
                    // value + bound >= -bound_const
                    let mut lo = value.clone();
                    lo.extend(bound.iter().copied());
                    out.push((format!("{}_lo", row.name), lo, Sense::Ge, -bound_const));
                }
            }
        }
        out
    }

    /// Raw counts over the model as declared: (total variables, inequality
    /// records including one per abs-range, equality rows).
    pub fn raw_counts(&self) -> (usize, usize, usize) {
        let mut ineq = 0;
        let mut eq = 0;
        for row in &self.rows {
            match &row.body {
                RowBody::Linear { sense: Sense::Eq, .. } => eq += 1,
                RowBody::Linear { .. } | RowBody::AbsRange { .. } => ineq += 1,
            }
        }
        (self.vars.len(), ineq, eq)
    }

    /// Merge another model into this one, unioning variables by name.
    ///
    /// Shared variables must agree on kind; their bounds are intersected.
    /// Row names must not collide. The result is tagged
    /// [`ModelProvenance::Assembled`].
    pub fn absorb(&mut self, other: &LinearModel) -> Result<(), ModelError> {
        let mut remap = Vec::with_capacity(other.vars.len());
        for var in &other.vars {
            match self.by_name.get(&var.name) {
                Some(&existing) => {
                    let ours = &mut self.vars[existing.0];
                    if ours.kind != var.kind {
                        return Err(ModelError::KindMismatch {
                            name: var.name.clone(),
                            ours: ours.kind,
                            theirs: var.kind,
                        });
                    }
                    ours.lb = ours.lb.max(var.lb);
                    ours.ub = ours.ub.min(var.ub);
                    remap.push(existing);
                }
                None => {
                    let id = self.add_variable(
                        var.name.clone(),
                        var.kind,
                        var.lb,
                        var.ub,
                        var.role,
                    )?;
                    remap.push(id);
                }
            }
        }
        let remap_terms = |terms: &[Term]| -> Vec<Term> {
            terms
                .iter()
                .map(|t| Term::new(remap[t.var.0], t.coeff))
                .collect()
        };
        for row in &other.rows {
            let body = match &row.body {
                RowBody::Linear { terms, sense, rhs } => RowBody::Linear {
                    terms: remap_terms(terms),
                    sense: *sense,
                    rhs: *rhs,
                },
                RowBody::AbsRange {
                    value,
                    bound_const,
                    bound,
                } => RowBody::AbsRange {
                    value: remap_terms(value),
                    bound_const: *bound_const,
                    bound: remap_terms(bound),
                },
            };
            self.add_row(row.name.clone(), body)?;
        }
        if let Some(obj) = &other.objective {
            self.objective = Some(Objective {
                sense: obj.sense,
                terms: remap_terms(&obj.terms),
            });
        }
        self.provenance = Some(ModelProvenance::Assembled);
        Ok(())
    }
}
