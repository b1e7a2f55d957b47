//! The dual function of one sequence: closed-form single-pair point, the
//! full solver, and what the interior phase buys over plain projected ascent.

use minmax_bounds::benchmark::BenchmarkConfig;
use minmax_bounds::lagrangian::{closed_form_pair_dual, dual_objective, solve_dual, DualSolution};
use minmax_bounds::stage_bounds::{tr_pair_bound, tr_second_stage};
use minmax_bounds::SolverConfig;
use std::error::Error;

pub fn run_example() -> Result<(DualSolution, DualSolution), Box<dyn Error>> {
    let cfg = BenchmarkConfig::default();
    let inst = cfg.uniform_sample(8, 8);
    let seq = inst.sequence("0", "0.1")?;

    let (_, (k0, k1)) = tr_second_stage(&inst, seq);
    let pair = closed_form_pair_dual(&inst, seq, k0, k1).ok_or("degenerate trust-region pair")?;
    let point = pair.embed(inst.transitions(seq.u0).len(), inst.transitions(seq.u1).len(), k0, k1);
    println!(
        "pair ({k0}, {k1}): lambda0 = {:.6}, mu0 = {:.6}, g = {:.9}, B''_TR = {:.9}",
        pair.lambda0,
        pair.mu0,
        dual_objective(&inst, seq, &point)?,
        tr_pair_bound(&inst, seq, k0, k1)
    );

    let full = solve_dual(&inst, seq, &SolverConfig::default())?;
    let plain = solve_dual(
        &inst,
        seq,
        &SolverConfig {
            barrier_phase: false,
            ..SolverConfig::default()
        },
    )?;
    for (name, sol) in [("interior + ascent", &full), ("ascent only", &plain)] {
        println!(
            "{name:>17}: g = {:.9} after {} iterations, converged = {}",
            sol.bound, sol.iterations, sol.converged
        );
    }
    Ok((full, plain))
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example().map(|_| ())
}
