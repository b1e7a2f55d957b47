//! Every bound of a random d = 2 instance against a grid search of the
//! second-stage problem.

use minmax_bounds::instance::{LipschitzPair, Transition};
use minmax_bounds::oracle::{sandwich, SandwichReport, DEFAULT_RESOLUTION};
use minmax_bounds::{Instance, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::error::Error;
use std::f64::consts::SQRT_2;

pub fn run_example() -> Result<Vec<SandwichReport>, Box<dyn Error>> {
    // Contractions with 1-Lipschitz dynamics and sqrt(2)-Lipschitz rewards,
    // so every dynamics ball contains the true successor of x0.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut transitions = |scale: f64, shift: [f64; 2], n: usize| -> Vec<Transition> {
        (0..n)
            .map(|_| {
                let x = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)];
                let y = [scale * x[1] + shift[0], scale * x[0] + shift[1]];
                Transition::new(x, x[0] - x[1] + 1.0, y)
            })
            .collect()
    };
    let (a, b) = (transitions(0.6, [0.2, 0.1], 3), transitions(0.5, [0.4, 0.3], 4));
    let inst = Instance::new(
        2,
        LipschitzPair { lf: 1.0, lrho: SQRT_2 },
        [0.5, 0.5],
        vec![("a".into(), a), ("b".into(), b)],
    )?;
    let solver = SolverConfig::default();
    let mut reports = Vec::new();
    for seq in inst.sequences() {
        let r = sandwich(&inst, seq, DEFAULT_RESOLUTION, &solver)?;
        println!(
            "({}, {}): cgrl {:.4} <= tr {:.4} <= ld {:.4} <= grid {:.4} (+{:.1e}): {}",
            inst.label(seq.u0),
            inst.label(seq.u1),
            r.b_cgrl,
            r.b_tr,
            r.b_ld,
            r.reference,
            r.grid_optimum.tolerance,
            r.holds()
        );
        reports.push(r);
    }
    Ok(reports)
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example().map(|_| ())
}
