//! The farthest point of a dynamics ball from a second-stage state, in
//! closed form and by brute-force sphere sampling.

use minmax_bounds::instance::{LipschitzPair, Transition};
use minmax_bounds::oracle::{closed_form_distance, verify_tr_by_sphere_sampling};
use minmax_bounds::stage_bounds::{tr_maximizer, tr_pair_bound};
use minmax_bounds::Instance;
use std::error::Error;

pub fn run_example() -> Result<(f64, f64), Box<dyn Error>> {
    let inst = Instance::new(
        3,
        LipschitzPair { lf: 0.8, lrho: 1.5 },
        [0.0, 0.0, 0.0],
        vec![
            ("a".into(), vec![Transition::new([0.3, 0.1, -0.2], 0.5, [1.0, 0.5, 0.0])]),
            ("b".into(), vec![Transition::new([0.2, 0.9, 0.4], 1.2, [0.0, 0.0, 0.0])]),
        ],
    )?;
    let seq = inst.sequence("a", "b")?;
    let closed = closed_form_distance(&inst, seq, 0, 0);
    let sampled = verify_tr_by_sphere_sampling(&inst, seq, 0, 0, 100_000, 1);
    println!("maximizer {:?}", tr_maximizer(&inst, seq, 0, 0).as_slice());
    println!("distance: closed form {closed:.6}, best of 1e5 samples {sampled:.6}");
    println!("B''_TR(0, 0) = {:.6}", tr_pair_bound(&inst, seq, 0, 0));
    Ok((closed, sampled))
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example().map(|_| ())
}
