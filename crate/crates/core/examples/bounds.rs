//! CGRL, trust-region and Lagrangian bounds for every sequence of a small
//! two-action instance, plus the bound-optimal sequence of each method.

use minmax_bounds::benchmark::search_bound_optimal;
use minmax_bounds::instance::{LipschitzPair, Transition};
use minmax_bounds::{BoundReport, Instance, Method, SolverConfig};
use std::error::Error;
use std::f64::consts::SQRT_2;

pub fn sample_instance() -> Result<Instance, Box<dyn Error>> {
    let stay = vec![
        Transition::new([0.5, 0.5], 1.0, [0.5, 0.5]),
        Transition::new([0.2, 0.7], 0.9, [0.2, 0.7]),
        Transition::new([0.8, 0.3], 1.1, [0.8, 0.3]),
    ];
    let push = vec![
        Transition::new([0.5, 0.5], 1.0, [0.81416, 0.81416]),
        Transition::new([0.8, 0.8], 1.6, [1.11416, 1.11416]),
        Transition::new([0.3, 0.6], 0.9, [0.61416, 0.91416]),
    ];
    Ok(Instance::new(
        2,
        LipschitzPair { lf: 1.0, lrho: SQRT_2 },
        [0.5772, 0.5772],
        vec![("stay".into(), stay), ("push".into(), push)],
    )?)
}

pub fn run_example() -> Result<Vec<BoundReport>, Box<dyn Error>> {
    let inst = sample_instance()?;
    let solver = SolverConfig::default();
    let mut reports = Vec::new();
    for seq in inst.sequences() {
        let report = BoundReport::compute(&inst, seq, &Method::ALL, &solver)?;
        println!("{}", serde_json::to_string(&report)?);
        reports.push(report);
    }
    for method in Method::ALL {
        let (seq, value) = search_bound_optimal(&inst, method, &solver)?;
        println!("{method}: ({}, {}) with bound {value:.6}", inst.label(seq.u0), inst.label(seq.u1));
    }
    Ok(reports)
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example().map(|_| ())
}
