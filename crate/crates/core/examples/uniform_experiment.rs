//! Averages over uniformly drawn samples; a handful of trials keeps it quick.

use minmax_bounds::benchmark::{run_uniform_experiment, to_csv, BenchmarkConfig, ExperimentRow};
use minmax_bounds::SolverConfig;
use std::error::Error;

pub fn run_example() -> Result<Vec<ExperimentRow>, Box<dyn Error>> {
    let cfg = BenchmarkConfig::default();
    let rows = run_uniform_experiment(4, 5, 2024, &cfg, &SolverConfig::default())?;
    print!("{}", to_csv(&rows, true));
    Ok(rows)
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example().map(|_| ())
}
