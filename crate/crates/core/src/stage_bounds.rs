//! Closed-form bounds for a fixed action sequence `(u0, u1)`.
//!
//! The two-stage problem decouples: the first stage has the closed form
//! `max_k0 r^k0 - L_rho ||x0 - x^k0||`, and the second stage is bounded below by
//! keeping one dynamics ball `k0` and one reward interval `k1`, which leaves a
//! trust-region subproblem whose maximizer lies on the line through `x^k1` and
//! `y^k0`. All argmaxes break ties on the smallest index (pair) in
//! lexicographic order.

use crate::instance::{ActionId, Instance, SequencePair, Transition};
use crate::vector::{dist, Vector};

/// Index pair `(k0, k1)` into `F^(u0) × F^(u1)`.
pub type PairIndex = (usize, usize);

/// `r - L_rho ||x0 - x||` for one first-stage transition.
fn first_stage_candidate(inst: &Instance, t: &Transition) -> f64 {
    t.r - inst.lrho() * inst.initial_state().dist(&t.x)
}

/// First-stage optimum `r̂0*` together with the attaining `k0`.
pub fn first_stage_argmax(inst: &Instance, u0: ActionId) -> (f64, usize) {
    argmax(
        inst.transitions(u0)
            .iter()
            .map(|t| first_stage_candidate(inst, t)),
    )
    .expect("validated instances have nonempty transition sets")
}

/// First-stage optimum `r̂0*`.
pub fn first_stage_value(inst: &Instance, u0: ActionId) -> f64 {
    first_stage_argmax(inst, u0).0
}

/// The CGRL bound and its lexicographically smallest attaining pair.
pub fn cgrl_bound(inst: &Instance, seq: SequencePair) -> (f64, PairIndex) {
    let (lf, lrho) = (inst.lf(), inst.lrho());
    let x0 = inst.initial_state();
    let f0 = inst.transitions(seq.u0);
    let f1 = inst.transitions(seq.u1);
    pair_argmax(f0.len(), f1.len(), |k0, k1| {
        let a = &f0[k0];
        let b = &f1[k1];
        a.r - lrho * (1.0 + lf) * a.x.dist(x0) + b.r - lrho * a.y.dist(&b.x)
    })
}

/// Trust-region value `B''_TR(k0, k1) = r^k1 - L_rho (||y^k0 - x^k1|| + L_f ||x0 - x^k0||)`.
pub fn tr_pair_bound(inst: &Instance, seq: SequencePair, k0: usize, k1: usize) -> f64 {
    let a = &inst.transitions(seq.u0)[k0];
    let b = &inst.transitions(seq.u1)[k1];
    b.r - inst.lrho() * (a.y.dist(&b.x) + inst.lf() * inst.initial_state().dist(&a.x))
}

/// Maximizer of `||x - x^k1||` over the ball `||x - y^k0|| <= L_f ||x0 - x^k0||`.
///
/// When `y^k0 = x^k1` every point of the sphere is optimal; the point along the
/// first coordinate axis is returned.
pub fn tr_maximizer(inst: &Instance, seq: SequencePair, k0: usize, k1: usize) -> Vector {
    let a = &inst.transitions(seq.u0)[k0];
    let b = &inst.transitions(seq.u1)[k1];
    let radius = inst.lf() * inst.initial_state().dist(&a.x);
    let away = a.y.sub(&b.x);
    let gap = away.norm();
    if gap > 0.0 {
        a.y.offset(&away, radius / gap)
    } else {
        let mut e1 = vec![0.0; inst.dimension()];
        e1[0] = 1.0;
        a.y.offset(&e1, radius)
    }
}

/// `r̂0* + max_{k0,k1} B''_TR(k0, k1)` and the attaining pair. All
/// `n0 * n1` pairs are evaluated.
pub fn tr_bound(inst: &Instance, seq: SequencePair) -> (f64, PairIndex) {
    let r0 = first_stage_value(inst, seq.u0);
    let (best, pair) = tr_second_stage(inst, seq);
    (r0 + best, pair)
}

/// `max_{k0,k1} B''_TR(k0, k1)` without the first-stage term.
pub fn tr_second_stage(inst: &Instance, seq: SequencePair) -> (f64, PairIndex) {
    let lf = inst.lf();
    let lrho = inst.lrho();
    let x0 = inst.initial_state();
    let f0 = inst.transitions(seq.u0);
    let f1 = inst.transitions(seq.u1);
    let radii: Vec<f64> = f0.iter().map(|t| lf * dist(x0, &t.x)).collect();
    pair_argmax(f0.len(), f1.len(), |k0, k1| {
        f1[k1].r - lrho * (f0[k0].y.dist(&f1[k1].x) + radii[k0])
    })
}

/// First maximum of a sequence; `None` when empty. NaN never wins.
pub(crate) fn argmax(values: impl Iterator<Item = f64>) -> Option<(f64, usize)> {
    let mut best: Option<(f64, usize)> = None;
    for (i, v) in values.enumerate() {
        match best {
            Some((b, _)) if !(v > b) => {}
            _ => best = Some((v, i)),
        }
    }
    best
}

fn pair_argmax(n0: usize, n1: usize, mut value: impl FnMut(usize, usize) -> f64) -> (f64, PairIndex) {
    let mut best = (f64::NEG_INFINITY, (0, 0));
    for k0 in 0..n0 {
        for k1 in 0..n1 {
            let v = value(k0, k1);
            if v > best.0 {
                best = (v, (k0, k1));
            }
        }
    }
    best
}
