#![allow(dead_code)]

use std::f64::consts::LN_2;

use elliptic_drum::geometry::EllipseGeometry;
use elliptic_drum::mathieu::{ModeIndex, Parity};
use elliptic_drum::qsolve::{solve_mode, ModeSpec, SolverConfig};

/// `β₀` of the 5:3 ellipse.
pub const BETA0: f64 = LN_2;

/// Roots of `Ce_g(q; ln 2) = 0`, rows `g = 0..=5`, columns `k = 1..=4`,
/// from a 45-digit determinant-and-series computation.
pub const ORACLE_EVEN: [[f64; 4]; 6] = [
    [1.735307967, 11.35637836, 29.79532673, 57.01053371],
    [3.352244998, 14.62741648, 34.84385979, 63.84792931],
    [5.653014523, 18.48701572, 40.4576892, 71.24042749],
    [8.657649771, 22.96758157, 46.65786273, 79.20406577],
    [12.36889599, 28.09956919, 53.46332848, 87.75370396],
    [16.77920823, 33.91346782, 60.89124962, 96.9031151],
];

/// Roots of `Se_g(q; ln 2) = 0`, rows `g = 1..=5`.
pub const ORACLE_ODD: [[f64; 4]; 5] = [
    [5.430076129, 19.47848675, 42.30611248, 73.9084393],
    [7.819102501, 23.63569194, 48.24838776, 81.64181128],
    [10.80371317, 28.36672458, 54.75005963, 89.92702298],
    [14.40606109, 33.69626223, 61.82934281, 98.77838888],
    [18.6368644, 39.64570815, 69.50289996, 108.2093017],
];

/// First roots for the two high orders, same computation.
pub const ORACLE_E11_K1: f64 = 56.64660965;
pub const ORACLE_E13_K1: f64 = 74.43671121;

pub fn geometry() -> EllipseGeometry {
    EllipseGeometry::from_semiaxes(5.0, 3.0).unwrap()
}

pub fn index(parity: Parity, g: u32) -> ModeIndex {
    ModeIndex::new(parity, g).unwrap()
}

pub fn oracle(parity: Parity, g: u32, k: usize) -> f64 {
    match parity {
        Parity::Even => ORACLE_EVEN[g as usize][k - 1],
        Parity::Odd => ORACLE_ODD[g as usize - 1][k - 1],
    }
}

/// Every `(parity, g)` of the two tables.
pub fn table_orders() -> Vec<(Parity, u32)> {
    let mut v: Vec<(Parity, u32)> = (0..=5).map(|g| (Parity::Even, g)).collect();
    v.extend((1..=5).map(|g| (Parity::Odd, g)));
    v
}

pub fn solve(parity: Parity, g: u32, k: usize) -> ModeSpec {
    solve_mode(index(parity, g), k, BETA0, &SolverConfig::default()).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Second derivative by a Richardson-extrapolated central difference.
pub fn second_difference<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}

pub fn report(n: &str, pass: bool, detail: impl std::fmt::Display) {
    println!(
        "[criterion {n}] {}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}
