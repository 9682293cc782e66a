//! Radiality constraint sets for distribution-system reconfiguration and
//! restoration, with exact verification, brute-force oracles, a radial
//! power-flow solver, a desk-scale optimizer, and LP/MPS model export.
//!
//! The central objects:
//!
//! * [`network::Network`] — immutable bus/line graph with designated roots.
//! * [`constraints`] — builders for the ST, SCF0, and SCF+ST constraint
//!   sets as a solver-agnostic mixed-integer linear model.
//! * [`verify`] — radiality checking, pseudo-root diagnosis, and exact
//!   feasibility deciders for the constraint sets.
//! * [`enumeration`] — exhaustive ground truth on small networks.
//! * [`power_flow`] — backward/forward sweep on radial topologies plus
//!   linearized branch-flow rows for exported models.
//! * [`optimizer`] — enumerate and branch-and-bound solvers for minimum-loss
//!   reconfiguration and weighted-pickup restoration, with an integer
//!   propagation engine that exposes how the constraint sets tighten
//!   sub-problem domains.
//! * [`export`] — deterministic LP and MPS writers with re-parsers.
//! * [`scenario`] — seeded restoration scenario generation and the
//!   spanning-tree failure detector used by the batch studies.

pub mod constraints;
pub mod enumeration;
pub mod export;
pub mod model;
pub mod network;
pub mod optimizer;
pub mod power_flow;
pub mod propagate;
pub mod scenario;
pub mod testnets;
mod union_find;
pub mod verify;

pub use constraints::{
    build_edge_count, build_scf, build_scf0, build_scf_st, build_st, model_size, ConstraintSet,
    ScfParams,
};
pub use model::{LinearModel, ModelSize};
pub use network::{Bus, BusId, Line, LineId, Network, TopologyAssignment};
pub use verify::{check_conditions_3_4, check_radial, scf_feasible, st_feasible, ForestReport};
