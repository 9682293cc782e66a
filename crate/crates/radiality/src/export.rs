//! LP and MPS model writers.
