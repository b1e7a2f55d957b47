//! Path following on a log-barrier version of the dual.
//!
//! The merit `g / t + sum log p + log D + log M + log(cap - sum p)` is what the
//! epigraph form of the dual (`tau >= |v|^2 / D`, `sigma >= s^2 / (4M)`, two
//! rotated cones) reduces to once `tau` and `sigma` are maximized out, so it
//! inherits self-concordance: damped Newton steps stay inside the domain and
//! centre quickly even where `g` is badly conditioned (small `D`). A centred
//! point at weight `t` is within `nu t` of the capped optimum, with `nu` the
//! barrier parameter `n0 + n1 + 5`.

use super::{DualPoint, DualProblem, SolverConfig};
use crate::vector::dot;
use nalgebra::{DMatrix, DVector};

/// Barrier weight of the first centring round, relative to `(1 + |g|) / nu`.
const START_WEIGHT: f64 = 1e-2;
const WEIGHT_SHRINK: f64 = 0.1;
/// Certified once `nu t` is below this, relative to `1 + |g|`.
const TARGET_GAP: f64 = 1e-10;
/// Squared Newton decrement below which a point counts as centred.
const CENTRED: f64 = 1e-10;
/// Above this squared decrement steps are damped and line searched; below it
/// full steps are safe, and merit differences drown in rounding anyway.
const DAMPED: f64 = 0.0625;
/// Cap on the total multiplier mass, relative to the start. Without it the
/// barrier drifts to infinity wherever `g` flattens, where `g` cannot be
/// evaluated accurately.
const MASS_CAP: f64 = 1e3;

pub(super) struct InteriorOutcome {
    /// Best multipliers by `g` among iterates inside the margin cone.
    pub best: Option<(DualPoint, f64)>,
    pub steps: usize,
    /// Centred at a weight whose gap bound is below the target, with the mass
    /// cap pushing back by less than the gradient tolerance.
    pub certified: bool,
}

struct Barrier<'a> {
    problem: &'a DualProblem,
    cap: f64,
}

impl Barrier<'_> {
    fn domain(&self, p: &DualPoint) -> Option<(f64, f64, f64)> {
        if p.lambda.iter().chain(&p.mu).any(|v| !(*v > 0.0)) {
            return None;
        }
        let m = p.m_sum();
        let cone_gap = p.l_sum() - m * self.problem.lrho2;
        let room = self.cap - p.l_sum() - m;
        (cone_gap > 0.0 && room > 0.0).then_some((m, cone_gap, room))
    }

    fn merit(&self, p: &DualPoint, t: f64) -> f64 {
        let Some((m, cone_gap, room)) = self.domain(p) else {
            return f64::NEG_INFINITY;
        };
        self.problem.raw_value(p) / t
            + p.lambda.iter().chain(&p.mu).map(|v| v.ln()).sum::<f64>()
            + cone_gap.ln()
            + m.ln()
            + room.ln()
    }

    /// Newton direction and squared decrement at `p`.
    fn newton(&self, p: &DualPoint, t: f64) -> Option<(DualPoint, f64)> {
        let (m, cone_gap, room) = self.domain(p)?;
        let problem = self.problem;
        let (n0, n1) = (problem.n0(), problem.n1());
        let n = n0 + n1;
        let d = problem.dimension;
        let lrho2 = problem.lrho2;
        let (_, grad) = problem.raw_value_and_gradient(p);
        let v = problem.residual(p);
        let s = 1.0 - 2.0 * dot(&problem.rewards, &p.mu);
        let x: Vec<f64> = p.lambda.iter().chain(&p.mu).copied().collect();

        // -Hessian = diag(1 / p^2) + U U^T; with S = diag(p) the scaled system
        // is I + W W^T, W = S U, solved through a thin QR of W.
        let k = d + 4;
        let quad = (2.0 / (t * cone_gap)).sqrt();
        let reward_weight = (0.5 / (m * t)).sqrt();
        let mut w = DMatrix::<f64>::zeros(n, k);
        let mut rhs = DVector::<f64>::zeros(n);
        for i in 0..n {
            let lambda_side = i < n0;
            let b = if lambda_side { 1.0 } else { -lrho2 };
            let point: &[f64] = if lambda_side { &problem.ys[i] } else { &problem.xs[i - n0] };
            let coef = if lambda_side { -1.0 } else { lrho2 };
            for c in 0..d {
                w[(i, c)] = x[i] * quad * (coef * point[c] - v[c] * b / cone_gap);
            }
            if !lambda_side {
                w[(i, d)] = x[i] * reward_weight * (-2.0 * problem.rewards[i - n0] - s / m);
                w[(i, d + 2)] = x[i] / m;
            }
            w[(i, d + 1)] = x[i] * b / cone_gap;
            w[(i, d + 3)] = x[i] / room;
            let g = if lambda_side { grad.lambda[i] } else { grad.mu[i - n0] };
            let mass_term = if lambda_side { 0.0 } else { 1.0 / m };
            let full = g / t + 1.0 / x[i] + b / cone_gap + mass_term - 1.0 / room;
            rhs[i] = x[i] * full;
        }
        let qr = w.qr();
        let (q, r) = (qr.q(), qr.r());
        let qt_rhs = q.transpose() * &rhs;
        let small = DMatrix::<f64>::identity(r.nrows(), r.nrows()) + &r * r.transpose();
        let inner = small.cholesky()?.solve(&qt_rhs);
        let z = &rhs - &q * &qt_rhs + &q * inner;
        let decrement = rhs.dot(&z);
        let dir: Vec<f64> = z.iter().zip(&x).map(|(zi, xi)| zi * xi).collect();
        if !(decrement.is_finite() && dir.iter().all(|v| v.is_finite())) {
            return None;
        }
        Some((
            DualPoint {
                lambda: dir[..n0].to_vec(),
                mu: dir[n0..].to_vec(),
            },
            decrement,
        ))
    }
}

fn advance(p: &DualPoint, dir: &DualPoint, alpha: f64) -> DualPoint {
    let step = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + alpha * y).collect();
    DualPoint {
        lambda: step(&p.lambda, &dir.lambda),
        mu: step(&p.mu, &dir.mu),
    }
}

pub(super) fn interior_phase(
    problem: &DualProblem,
    start: &DualPoint,
    budget: usize,
    config: &SolverConfig,
    inside: &dyn Fn(&DualPoint) -> bool,
) -> InteriorOutcome {
    let nu = (problem.n0() + problem.n1() + 5) as f64;
    let mut outcome = InteriorOutcome {
        best: None,
        steps: 0,
        certified: false,
    };
    let mut p = interior_start(start, problem.lrho2);
    let g = problem.raw_value(&p);
    if !g.is_finite() {
        return outcome;
    }
    let barrier = Barrier {
        problem,
        cap: MASS_CAP * (p.l_sum() + p.m_sum()),
    };
    if barrier.domain(&p).is_none() {
        return outcome;
    }

    let mut t = START_WEIGHT * (1.0 + g.abs()) / nu;
    'rounds: loop {
        let mut previous = f64::INFINITY;
        loop {
            if inside(&p) {
                let value = problem.raw_value(&p);
                if value.is_finite() && outcome.best.as_ref().map_or(true, |(_, v)| value > *v) {
                    outcome.best = Some((p.clone(), value));
                }
            }
            if outcome.steps >= budget {
                break 'rounds;
            }
            let Some((dir, decrement)) = barrier.newton(&p, t) else {
                break 'rounds;
            };
            // Full steps converge quadratically; once they stop doing so the
            // decrement is rounding noise.
            if !(decrement > CENTRED) || (previous <= DAMPED && decrement > 0.25 * previous) {
                break;
            }
            previous = decrement;
            outcome.steps += 1;
            let damped = decrement > DAMPED;
            let mut alpha = if damped { 1.0 / (1.0 + decrement.sqrt()) } else { 1.0 };
            let current = if damped { barrier.merit(&p, t) } else { 0.0 };
            let mut next = None;
            for _ in 0..60 {
                let cand = advance(&p, &dir, alpha);
                let ok = if damped {
                    barrier.merit(&cand, t) >= current + config.armijo * alpha * decrement
                } else {
                    barrier.domain(&cand).is_some()
                };
                if ok {
                    next = Some(cand);
                    break;
                }
                alpha *= config.backtracking;
            }
            match next {
                Some(cand) => p = cand,
                None => break 'rounds,
            }
        }
        let value = problem.raw_value(&p);
        if nu * t <= TARGET_GAP * (1.0 + value.abs()) {
            let room = barrier.cap - p.l_sum() - p.m_sum();
            outcome.certified = t / room <= config.gradient_tolerance;
            break;
        }
        t *= WEIGHT_SHRINK;
    }
    outcome
}

/// Interior point near `p`: every multiplier made positive and the cone
/// margin kept.
fn interior_start(p: &DualPoint, lrho2: f64) -> DualPoint {
    let (n0, n1) = (p.lambda.len() as f64, p.mu.len() as f64);
    let eps_mu = 1e-3 * p.m_sum().max(f64::MIN_POSITIVE) / n1;
    let eps_lambda = 2.0 * lrho2 * n1 * eps_mu / n0;
    DualPoint {
        lambda: p.lambda.iter().map(|l| l + eps_lambda).collect(),
        mu: p.mu.iter().map(|m| m + eps_mu).collect(),
    }
}

