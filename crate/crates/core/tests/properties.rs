mod common;

use common::KnownSystem;
use minmax_bounds::benchmark::BenchmarkConfig;
use minmax_bounds::instance::{
    load_instance, save_instance, validate_instance, ActionId, Instance, LipschitzPair, SequencePair, Transition,
};
use minmax_bounds::lagrangian::{closed_form_pair_dual, solve_dual, DualPoint, DualProblem, SolverConfig};
use minmax_bounds::mnbc::{check_point, encode, MnbcInstance, ZeroTwoFeasibility};
use minmax_bounds::oracle::{first_ball_box, second_stage_grid_optimum};
use minmax_bounds::stage_bounds::{
    cgrl_bound, first_stage_argmax, tr_bound, tr_maximizer, tr_pair_bound, tr_second_stage,
};
use minmax_bounds::vector::dist;
use proptest::collection::vec;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Coordinates drawn mostly from a range, sometimes from a few fixed values so
/// that coincident states show up.
fn coord() -> impl Strategy<Value = f64> {
    prop_oneof![
        6 => -1.0..2.0f64,
        1 => Just(0.0),
        1 => Just(0.5),
        1 => Just(1.0),
    ]
}

fn point(d: usize) -> impl Strategy<Value = Vec<f64>> {
    vec(coord(), d)
}

fn transition(d: usize) -> impl Strategy<Value = Transition> {
    (point(d), -2.0..3.0f64, point(d)).prop_map(|(x, r, y)| Transition::new(x, r, y))
}

fn instance(max_d: usize, max_n: usize) -> impl Strategy<Value = Instance> {
    (1..=max_d).prop_flat_map(move |d| {
        (
            point(d),
            0.1..2.5f64,
            0.1..2.5f64,
            vec(transition(d), 1..=max_n),
            vec(transition(d), 1..=max_n),
        )
            .prop_map(move |(x0, lf, lrho, f0, f1)| {
                Instance::new(d, LipschitzPair { lf, lrho }, x0, vec![("a".into(), f0), ("b".into(), f1)])
                    .unwrap()
            })
    })
}

fn ab(inst: &Instance) -> SequencePair {
    inst.sequence("a", "b").unwrap()
}

/// Strictly feasible dual point from raw positive weights.
fn feasible_point(inst: &Instance, lambda: &[f64], mu: &[f64], stretch: f64) -> DualPoint {
    let n0 = inst.transitions(ActionId(0)).len();
    let n1 = inst.transitions(ActionId(1)).len();
    let mu: Vec<f64> = mu.iter().cycle().take(n1).copied().collect();
    let lambda: Vec<f64> = lambda.iter().cycle().take(n0).copied().collect();
    let m: f64 = mu.iter().sum();
    let l: f64 = lambda.iter().sum();
    let scale = m * inst.lrho().powi(2) * stretch / l;
    DualPoint::new(lambda.iter().map(|v| v * scale).collect(), mu)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn bounds_are_ordered(inst in instance(3, 5)) {
        let seq = ab(&inst);
        let cgrl = cgrl_bound(&inst, seq).0;
        let tr = tr_bound(&inst, seq).0;
        let ld = minmax_bounds::ld_bound(&inst, seq, &SolverConfig::default()).unwrap().0;
        prop_assert!(cgrl <= tr + 1e-9, "{} > {}", cgrl, tr);
        prop_assert!(tr <= ld + 1e-9, "{} > {}", tr, ld);
    }

    #[test]
    fn single_first_transition_makes_cgrl_exact(inst in instance(3, 5)) {
        let mut raw = inst.to_raw();
        raw.transitions["a"].truncate(1);
        let inst = validate_instance(raw).unwrap();
        let seq = ab(&inst);
        prop_assert!((cgrl_bound(&inst, seq).0 - tr_bound(&inst, seq).0).abs() <= 1e-9);
    }

    #[test]
    fn cgrl_splits_at_a_shared_first_stage_argmax(inst in instance(3, 5)) {
        let seq = ab(&inst);
        let (cgrl, (k0, k1)) = cgrl_bound(&inst, seq);
        let (r0, _) = first_stage_argmax(&inst, seq.u0);
        let t = &inst.transitions(seq.u0)[k0];
        if t.r - inst.lrho() * dist(&t.x, inst.initial_state()) == r0 {
            prop_assert!((cgrl - r0 - tr_pair_bound(&inst, seq, k0, k1)).abs() <= 1e-9);
        }
    }

    #[test]
    fn maximizer_is_feasible_and_attains_the_pair_value(inst in instance(4, 4), i in 0usize..16, j in 0usize..16) {
        let seq = ab(&inst);
        let k0 = i % inst.transitions(seq.u0).len();
        let k1 = j % inst.transitions(seq.u1).len();
        let a = &inst.transitions(seq.u0)[k0];
        let b = &inst.transitions(seq.u1)[k1];
        let x = tr_maximizer(&inst, seq, k0, k1);
        let radius = inst.lf() * dist(&a.x, inst.initial_state());
        prop_assert!(dist(&x, &a.y) <= radius + 1e-12);
        let value = b.r - inst.lrho() * dist(&x, &b.x);
        prop_assert!((value - tr_pair_bound(&inst, seq, k0, k1)).abs() <= 1e-9);
    }

    #[test]
    fn adding_transitions_never_lowers_closed_form_bounds(inst in instance(3, 4), extra in transition(3), first in any::<bool>()) {
        let d = inst.dimension();
        let extra = Transition::new(extra.x[..d].to_vec(), extra.r, extra.y[..d].to_vec());
        let seq = ab(&inst);
        let action = if first { seq.u0 } else { seq.u1 };
        let bigger = inst.with_transition(action, extra).unwrap();
        prop_assert!(cgrl_bound(&bigger, seq).0 >= cgrl_bound(&inst, seq).0);
        prop_assert!(tr_bound(&bigger, seq).0 >= tr_bound(&inst, seq).0);
    }

    #[test]
    fn closed_form_point_is_strictly_feasible(inst in instance(3, 3)) {
        let seq = ab(&inst);
        let lrho2 = inst.lrho().powi(2);
        for k0 in 0..inst.transitions(seq.u0).len() {
            for k1 in 0..inst.transitions(seq.u1).len() {
                if let Some(cf) = closed_form_pair_dual(&inst, seq, k0, k1) {
                    prop_assert!(cf.lambda0 / cf.mu0 > lrho2);
                    prop_assert!((cf.lambda0 / cf.mu0 - lrho2 * cf.k_factor).abs() <= 1e-9 * cf.lambda0 / cf.mu0);
                }
            }
        }
    }

    #[test]
    fn dual_is_concave_along_segments(
        inst in instance(3, 4),
        lp in vec(0.05..1.0f64, 4), mp in vec(0.05..1.0f64, 4),
        lq in vec(0.05..1.0f64, 4), mq in vec(0.05..1.0f64, 4),
        sp in 1.05..5.0f64, sq in 1.05..5.0f64, t in 0.0..1.0f64,
    ) {
        let problem = DualProblem::new(&inst, ab(&inst));
        let p = feasible_point(&inst, &lp, &mp, sp);
        let q = feasible_point(&inst, &lq, &mq, sq);
        let mix = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| t * x + (1.0 - t) * y).collect() };
        let r = DualPoint::new(mix(&p.lambda, &q.lambda), mix(&p.mu, &q.mu));
        let (gp, gq, gr) = (problem.objective(&p).unwrap(), problem.objective(&q).unwrap(), problem.objective(&r).unwrap());
        prop_assert!(gr >= t * gp + (1.0 - t) * gq - 1e-7 * (1.0 + gp.abs() + gq.abs()), "{} < {} / {}", gr, gp, gq);
    }

    #[test]
    fn dual_value_ignores_translation(inst in instance(3, 4), shift in point(3), lp in vec(0.05..1.0f64, 4), mp in vec(0.05..1.0f64, 4)) {
        let seq = ab(&inst);
        let moved = inst.translated(&shift[..inst.dimension()]).unwrap();
        let p = feasible_point(&inst, &lp, &mp, 2.0);
        let a = DualProblem::new(&inst, seq).objective(&p).unwrap();
        let b = DualProblem::new(&moved, seq).objective(&p).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()), "{} vs {}", a, b);
    }

    #[test]
    fn every_iterate_is_a_valid_warm_started_bound(inst in instance(3, 5), cap in 0usize..25) {
        let seq = ab(&inst);
        let config = SolverConfig { max_iterations: cap, ..SolverConfig::default() };
        let sol = solve_dual(&inst, seq, &config).unwrap();
        prop_assert!(sol.iterations <= cap);
        prop_assert!(sol.point.m_sum() >= config.margin_m);
        prop_assert!(sol.point.cone_gap(inst.lrho()) >= config.margin_c, "{:?} gap {}", sol, sol.point.cone_gap(inst.lrho()));
        prop_assert!(sol.bound >= tr_second_stage(&inst, seq).0 - 1e-9);
        let g = DualProblem::anchored(&inst, seq).objective(&sol.point).unwrap();
        prop_assert!((g - sol.bound).abs() <= 1e-9 * (1.0 + g.abs()), "{} vs {} at {:?}", g, sol.bound, sol.point);
    }

    #[test]
    fn more_iterations_never_lower_the_bound(inst in instance(3, 5), cap in 1usize..30) {
        let seq = ab(&inst);
        let short = solve_dual(&inst, seq, &SolverConfig { max_iterations: cap, ..SolverConfig::default() }).unwrap();
        let long = solve_dual(&inst, seq, &SolverConfig { max_iterations: cap + 10, ..SolverConfig::default() }).unwrap();
        prop_assert!(long.bound >= short.bound);
    }

    #[test]
    fn instances_survive_a_json_round_trip(inst in instance(4, 4)) {
        let back = load_instance(&save_instance(&inst)).unwrap();
        prop_assert_eq!(back.to_raw(), inst.to_raw());
    }

    #[test]
    fn validation_is_idempotent(inst in instance(3, 4)) {
        let once = validate_instance(inst.to_raw()).unwrap();
        let twice = validate_instance(once.to_raw()).unwrap();
        prop_assert_eq!(once.to_raw(), inst.to_raw());
        prop_assert_eq!(twice.to_raw(), once.to_raw());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn grid_refinement_does_not_raise_the_optimum(seed in any::<u64>(), n0 in 1usize..4, n1 in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let system = KnownSystem::random(&mut rng);
        let inst = system.sample(&mut rng, &[n0, n1], 0.1);
        for seq in inst.sequences() {
            let region = first_ball_box(&inst, seq);
            let coarse = second_stage_grid_optimum(&inst, seq, &region, 61).unwrap();
            let fine = second_stage_grid_optimum(&inst, seq, &region, 121).unwrap();
            prop_assert!(fine.value <= coarse.value + coarse.tolerance);
        }
    }
}

proptest! {
    #[test]
    fn benchmark_constants_are_valid(x in vec(-1.0..2.0f64, 2), y in vec(-1.0..2.0f64, 2), u in prop_oneof![Just(0.0), Just(0.1)]) {
        let cfg = BenchmarkConfig::default();
        let (fx, rx) = cfg.true_dynamics(&x, u);
        let (fy, ry) = cfg.true_dynamics(&y, u);
        let gap = dist(&x, &y);
        prop_assert!((rx - ry).abs() <= cfg.lipschitz().lrho * gap + 1e-12);
        prop_assert!(dist(&fx, &fy) <= cfg.lipschitz().lf * gap + 1e-12);
    }

    #[test]
    fn extra_samples_never_raise_dispersion(seed in any::<u64>(), x in vec(0.0..1.0f64, 2)) {
        let cfg = BenchmarkConfig { dispersion_resolution: 41, ..BenchmarkConfig::default() };
        let inst = cfg.uniform_sample(8, seed);
        let bigger = inst.with_transition(ActionId(1), Transition::new(x, 0.0, [0.0, 0.0])).unwrap();
        prop_assert!(cfg.dispersion(&bigger) <= cfg.dispersion(&inst));
    }

    #[test]
    fn cube_is_carved_out_exactly(d in 1usize..7, mask in any::<u64>(), bumps in vec(0.0..2.0f64, 7)) {
        let f = ZeroTwoFeasibility { a: vec![], b: vec![], dimension: Some(d) };
        let m = encode(&f).unwrap();
        prop_assert_eq!(m.balls.len(), 2 * d);
        let corner: Vec<f64> = (0..d).map(|i| if mask >> i & 1 == 1 { 2.0 } else { 0.0 }).collect();
        prop_assert!(check_point(&m, &corner));
        // Moving one coordinate off {0, 2} inside [0, 2] breaks the norm constraint.
        let mut off = corner.clone();
        let i = (mask as usize / 7) % d;
        off[i] = bumps[i].clamp(1e-3, 2.0 - 1e-3);
        prop_assert!(!check_point(&norm_only(&m), &off));
    }

    #[test]
    fn encoding_has_one_ball_per_row(rows in vec(vec(-3i64..=3, 3), 0..5)) {
        let rows: Vec<Vec<i64>> = rows.into_iter().filter(|r| r.iter().any(|v| *v != 0)).collect();
        let b = vec![0; rows.len()];
        let p = rows.len();
        let m = encode(&ZeroTwoFeasibility { a: rows, b, dimension: Some(3) }).unwrap();
        prop_assert_eq!(m.balls.len(), 2 * 3 + p);
    }
}

fn norm_only(m: &MnbcInstance) -> MnbcInstance {
    MnbcInstance { center: m.center.clone(), threshold: m.threshold, balls: vec![] }
}

#[test]
fn shared_first_stage_argmax_does_not_force_equal_bounds() {
    let inst = Instance::new(
        1,
        LipschitzPair { lf: 1.0, lrho: 1.0 },
        [0.0],
        vec![
            ("a".into(), vec![Transition::new([1.0], 1.0, [0.0]), Transition::new([0.1], -1.0, [0.0])]),
            ("b".into(), vec![Transition::new([0.0], 0.0, [0.0])]),
        ],
    )
    .unwrap();
    let seq = ab(&inst);
    let (cgrl, (k0, _)) = cgrl_bound(&inst, seq);
    assert_eq!(k0, first_stage_argmax(&inst, seq.u0).1);
    assert!((cgrl + 1.0).abs() < 1e-12);
    assert!((tr_bound(&inst, seq).0 + 0.1).abs() < 1e-12);
}

#[test]
fn grid_sample_dispersion_shrinks() {
    let cfg = BenchmarkConfig::default();
    let values: Vec<f64> = (1..=8).map(|i| cfg.dispersion(&cfg.grid_sample(i))).collect();
    for w in values.windows(2) {
        assert!(w[1] < w[0], "{values:?}");
    }
}

#[test]
fn translated_instances_keep_their_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let system = KnownSystem::random(&mut rng);
    let inst = system.sample(&mut rng, &[3, 4], 0.05);
    let moved = inst.translated(&[5.0, -3.0]).unwrap();
    for seq in inst.sequences() {
        assert!((cgrl_bound(&inst, seq).0 - cgrl_bound(&moved, seq).0).abs() < 1e-9);
        assert!((tr_bound(&inst, seq).0 - tr_bound(&moved, seq).0).abs() < 1e-9);
        let a = solve_dual(&inst, seq, &SolverConfig::default()).unwrap().bound;
        let b = solve_dual(&moved, seq, &SolverConfig::default()).unwrap().bound;
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }
}
