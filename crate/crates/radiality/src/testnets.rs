//! Small example networks used throughout the test suite and docs.
//!
//! `fig1` is the classic pseudo-root demonstrator: a 6-bus network with one
//! designated root (bus 1), a second non-root source at bus 5, and a single
//! cycle on buses {4,5,6}. `fig2` is the 4-bus, 2-root square used for the
//! propagation examples. Both match the fixture files under `fixtures/`.

use crate::network::{Bus, BusId, Line, LineId, Network};

fn load_bus(id: u32, p: f64, q: f64, weight: f64) -> Bus {
    Bus {
        id: BusId(id),
        p_load: p,
        q_load: q,
        weight,
        is_source: false,
        p_gen_max: 0.0,
        q_gen_max: 0.0,
        v_min: 0.9,
        v_max: 1.1,
    }
}

fn source_bus(id: u32, p_cap: f64, q_cap: f64) -> Bus {
    Bus {
        id: BusId(id),
        p_load: 0.0,
        q_load: 0.0,
        weight: 1.0,
        is_source: true,
        p_gen_max: p_cap,
        q_gen_max: q_cap,
        v_min: 0.9,
        v_max: 1.1,
    }
}

fn line(id: u32, from: u32, to: u32) -> Line {
    Line {
        id: LineId(id),
        from_bus: BusId(from),
        to_bus: BusId(to),
        r: 0.01,
        x: 0.01,
        i_max: None,
    }
}

/// Six buses, root {1}, second source at bus 5, one cycle on {4,5,6}.
///
/// Lines: 1:(1,2) 2:(2,3) 3:(3,4) 4:(4,5) 5:(5,6) 6:(6,4).
pub fn fig1() -> Network {
    let mut bus5 = load_bus(5, 0.01, 0.005, 1.0);
    bus5.is_source = true;
    bus5.p_gen_max = 0.05;
    bus5.q_gen_max = 0.05;
    let buses = vec![
        source_bus(1, 1.0, 1.0),
        load_bus(2, 0.01, 0.005, 1.0),
        load_bus(3, 0.01, 0.005, 10.0),
        load_bus(4, 0.01, 0.005, 1.0),
        bus5,
        load_bus(6, 0.01, 0.005, 1.0),
    ];
    let lines = vec![
        line(1, 1, 2),
        line(2, 2, 3),
        line(3, 3, 4),
        line(4, 4, 5),
        line(5, 5, 6),
        line(6, 6, 4),
    ];
    Network::new(buses, lines, [BusId(1)], []).expect("fig1 fixture")
}

/// `fig1` after a fault on line 2 = (2,3), with bus 5 promoted to a root so
/// the cycle side can be restored.
pub fn fig1_faulted() -> Network {
    let base = fig1();
    Network::new(
        base.buses().to_vec(),
        base.lines().to_vec(),
        [BusId(1), BusId(5)],
        [LineId(2)],
    )
    .expect("fig1 faulted fixture")
}

/// Four buses in a square, roots {1,4}.
///
/// Lines: 1:(1,2) 2:(1,3) 3:(2,4) 4:(3,4).
pub fn fig2() -> Network {
    let buses = vec![
        source_bus(1, 1.0, 1.0),
        load_bus(2, 0.01, 0.005, 1.0),
        load_bus(3, 0.01, 0.005, 1.0),
        source_bus(4, 1.0, 1.0),
    ];
    let lines = vec![line(1, 1, 2), line(2, 1, 3), line(3, 2, 4), line(4, 3, 4)];
    Network::new(buses, lines, [BusId(1), BusId(4)], []).expect("fig2 fixture")
}

/// Root feeding a single load bus over one line: r = x = 0.01,
/// load 0.1 + j0.05.
pub fn two_bus() -> Network {
    let buses = vec![source_bus(1, 1.0, 1.0), load_bus(2, 0.1, 0.05, 1.0)];
    let lines = vec![line(1, 1, 2)];
    Network::new(buses, lines, [BusId(1)], []).expect("two-bus fixture")
}
