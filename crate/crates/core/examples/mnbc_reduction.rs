//! A {0,2} integer feasibility system encoded as "a point far from one
//! centre but inside every ball", checked exhaustively on the cube.

use minmax_bounds::mnbc::{check_bruteforce, encode, BruteforceReport, ZeroTwoFeasibility};
use std::error::Error;

pub fn run_example() -> Result<Vec<BruteforceReport>, Box<dyn Error>> {
    // x1 + x2 + x3 <= 2 together with x1 - x2 <= 0 and -x3 <= -2.
    let feasible = ZeroTwoFeasibility {
        a: vec![vec![1, 1, 1], vec![1, -1, 0], vec![0, 0, -1]],
        b: vec![2, 0, -2],
        dimension: None,
    };
    // x1 + x2 >= 4 and x1 + x2 <= 2 cannot both hold.
    let infeasible = ZeroTwoFeasibility {
        a: vec![vec![-1, -1], vec![1, 1]],
        b: vec![-4, 2],
        dimension: None,
    };
    let mut reports = Vec::new();
    for (name, system) in [("feasible", feasible), ("infeasible", infeasible)] {
        let m = encode(&system)?;
        let report = check_bruteforce(&system)?;
        println!(
            "{name}: {} balls, threshold {:.3}, ip {} / mnbc {}, witness {:?}",
            m.balls.len(),
            m.threshold,
            report.ip_feasible,
            report.mnbc_feasible_on_cube,
            report.witness
        );
        reports.push(report);
    }
    Ok(reports)
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example().map(|_| ())
}
