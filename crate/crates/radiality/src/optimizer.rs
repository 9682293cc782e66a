//! Desk-scale reconfiguration and restoration solvers.
