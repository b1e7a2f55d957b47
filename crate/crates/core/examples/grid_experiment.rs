//! Bound-optimal sequences on ever finer grid samples of the benchmark.

use minmax_bounds::benchmark::{run_grid_experiment, to_csv, BenchmarkConfig, ExperimentRow};
use minmax_bounds::SolverConfig;
use std::error::Error;

pub fn run_example() -> Result<Vec<ExperimentRow>, Box<dyn Error>> {
    let cfg = BenchmarkConfig::default();
    let rows = run_grid_experiment(5, &cfg, &SolverConfig::default())?;
    print!("{}", to_csv(&rows, false));
    for row in &rows {
        println!("n = {:3}: J* - B_LD = {:.4}", row.cardinality, row.j_star - row.b_ld);
    }
    Ok(rows)
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example().map(|_| ())
}
