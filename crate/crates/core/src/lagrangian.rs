//! Lagrangian relaxation of the second-stage problem.
//!
//! Dualizing every reward-interval constraint (multipliers `mu`, one per
//! transition of `F^(u1)`) and every dynamics-ball constraint (multipliers
//! `lambda`, one per transition of `F^(u0)`) and minimizing the Lagrangian in
//! closed form gives the concave dual function
//!
//! ```text
//! g(lambda, mu) = -||L_rho^2 X mu - Y lambda||^2 / (L - M L_rho^2)
//!                 - (1 - 2 r^T mu)^2 / (4 M)
//!                 + sum_k0 lambda_k0 (||y^k0||^2 - L_f^2 ||x^k0 - x0||^2)
//!                 + sum_k1 mu_k1 ((r^k1)^2 - L_rho^2 ||x^k1||^2)
//! ```
//!
//! with `M = sum mu`, `L = sum lambda`, defined on the open cone
//! `M > 0, L > M L_rho^2`. Any point of that cone yields a valid lower bound on
//! the second-stage optimum (weak duality), so the ascent solver below is safe
//! to stop at any iteration.
//!
//! `g` is invariant under a common translation of all states and shifts by `c`
//! when every reward is shifted by `c`. [`DualProblem`] evaluates it in such a
//! recentred frame, which keeps the degenerate warm starts (huge multipliers)
//! free of cancellation.

use crate::instance::{Instance, SequencePair};
use crate::stage_bounds::{first_stage_value, tr_second_stage};
use crate::vector::{dist, dot, norm_sq};
use thiserror::Error;

mod interior;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LagrangianError {
    #[error("infeasible dual point: {0}")]
    InfeasibleDualPoint(String),
    #[error("no strictly feasible starting point could be built for this sequence")]
    DegenerateInstance,
}

/// Dual solver settings.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Stop once `||P(p + grad) - p||_inf` falls below this.
    pub gradient_tolerance: f64,
    /// Every iterate keeps `M >= margin_m`.
    pub margin_m: f64,
    /// Every iterate keeps `L - M L_rho^2 >= margin_c`.
    pub margin_c: f64,
    /// Step length tried on the first iteration; later ones use the
    /// Barzilai-Borwein length.
    pub initial_step: f64,
    /// Step shrink factor during backtracking.
    pub backtracking: f64,
    /// Armijo sufficient-increase constant.
    pub armijo: f64,
    /// Run interior Newton steps on a log-barrier version of `g` before the
    /// projected ascent. Plain gradient steps stall in the narrow valley of
    /// `g` near `L - M L_rho^2 = 0`; the Newton steps cross it.
    pub barrier_phase: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 5000,
            gradient_tolerance: 1e-8,
            margin_m: 1e-12,
            margin_c: 1e-12,
            initial_step: 1.0,
            backtracking: 0.5,
            armijo: 1e-4,
            barrier_phase: true,
        }
    }
}

/// Multipliers `(lambda, mu)` of the dualized constraints.
#[derive(Clone, Debug, PartialEq)]
pub struct DualPoint {
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
}

impl DualPoint {
    pub fn new(lambda: Vec<f64>, mu: Vec<f64>) -> Self {
        Self { lambda, mu }
    }

    /// `M`.
    pub fn m_sum(&self) -> f64 {
        self.mu.iter().sum()
    }

    /// `L`.
    pub fn l_sum(&self) -> f64 {
        self.lambda.iter().sum()
    }

    /// `L - M L_rho^2`; the second cone coordinate.
    pub fn cone_gap(&self, lrho: f64) -> f64 {
        self.l_sum() - self.m_sum() * (lrho * lrho)
    }

    fn check(&self, n0: usize, n1: usize, lrho2: f64) -> Result<(), LagrangianError> {
        if self.lambda.len() != n0 || self.mu.len() != n1 {
            return Err(LagrangianError::InfeasibleDualPoint(format!(
                "expected {n0} lambdas and {n1} mus, got {} and {}",
                self.lambda.len(),
                self.mu.len()
            )));
        }
        if let Some(v) = self.lambda.iter().chain(&self.mu).find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(LagrangianError::InfeasibleDualPoint(format!(
                "multiplier {v} is not a finite nonnegative number"
            )));
        }
        let m = self.m_sum();
        if !(m > 0.0) {
            return Err(LagrangianError::InfeasibleDualPoint(format!("M = {m} <= 0")));
        }
        let gap = self.l_sum() - self.m_sum() * lrho2;
        if !(gap > 0.0) {
            return Err(LagrangianError::InfeasibleDualPoint(format!(
                "L - M L_rho^2 = {gap} <= 0"
            )));
        }
        Ok(())
    }
}

/// Stationary point of the single-pair dual.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedFormDual {
    pub lambda0: f64,
    pub mu0: f64,
    /// `K = 1 + ||y^k0 - x^k1|| / (L_f ||x^k0 - x0||)`, so that
    /// `lambda0 / mu0 = L_rho^2 K`.
    pub k_factor: f64,
}

impl ClosedFormDual {
    /// Full-size dual point with the pair's multipliers and zeros elsewhere.
    pub fn embed(&self, n0: usize, n1: usize, k0: usize, k1: usize) -> DualPoint {
        let mut lambda = vec![0.0; n0];
        let mut mu = vec![0.0; n1];
        lambda[k0] = self.lambda0;
        mu[k1] = self.mu0;
        DualPoint { lambda, mu }
    }
}

/// Distances that drive the single-pair dual: `(||x^k0 - x0||, ||y^k0 - x^k1||)`.
fn pair_distances(inst: &Instance, seq: SequencePair, k0: usize, k1: usize) -> (f64, f64) {
    let a = &inst.transitions(seq.u0)[k0];
    let b = &inst.transitions(seq.u1)[k1];
    (dist(&a.x, inst.initial_state()), dist(&a.y, &b.x))
}

fn closed_form_from_distances(lf: f64, lrho: f64, radius_src: f64, gap: f64) -> ClosedFormDual {
    let scaled = lf * radius_src;
    ClosedFormDual {
        lambda0: lrho / (2.0 * scaled),
        mu0: 1.0 / (2.0 * lrho * (gap + scaled)),
        k_factor: 1.0 + gap / scaled,
    }
}

/// The zero-gap dual point of the pair `(k0, k1)`.
///
/// `None` when `x^k0 = x0` or `y^k0 = x^k1`: in both cases the single-pair dual
/// optimum is not attained inside the open cone.
pub fn closed_form_pair_dual(
    inst: &Instance,
    seq: SequencePair,
    k0: usize,
    k1: usize,
) -> Option<ClosedFormDual> {
    let (radius_src, gap) = pair_distances(inst, seq, k0, k1);
    if radius_src == 0.0 || gap == 0.0 {
        return None;
    }
    Some(closed_form_from_distances(inst.lf(), inst.lrho(), radius_src, gap))
}

/// Gradient of `g` split by multiplier block.
#[derive(Clone, Debug, PartialEq)]
pub struct DualGradient {
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
}

/// Precomputed data of the dual for one sequence, in a recentred frame.
#[derive(Clone, Debug)]
pub struct DualProblem {
    lrho2: f64,
    /// `y^k0 - c` for `k0` in `F^(u0)`.
    ys: Vec<Vec<f64>>,
    /// `x^k1 - c` for `k1` in `F^(u1)`.
    xs: Vec<Vec<f64>>,
    /// `r^k1 - rho`.
    rewards: Vec<f64>,
    /// Linear coefficients of `lambda` and `mu`.
    lin_lambda: Vec<f64>,
    lin_mu: Vec<f64>,
    reward_shift: f64,
    dimension: usize,
}

impl DualProblem {
    /// Frame centred on the mean of the relevant states and rewards.
    pub fn new(inst: &Instance, seq: SequencePair) -> Self {
        let f0 = inst.transitions(seq.u0);
        let f1 = inst.transitions(seq.u1);
        let d = inst.dimension();
        let mut center = vec![0.0; d];
        let count = (f0.len() + f1.len()) as f64;
        for p in f0.iter().map(|t| &t.y).chain(f1.iter().map(|t| &t.x)) {
            for (c, v) in center.iter_mut().zip(p.iter()) {
                *c += v / count;
            }
        }
        let reward = f1.iter().map(|t| t.r).sum::<f64>() / f1.len() as f64;
        Self::centered_at(inst, seq, &center, reward)
    }

    /// Frame centred on `y^k0` and `r^k1` of the trust-region argmax pair,
    /// where the solver works. Huge multipliers on that pair cost no precision.
    pub fn anchored(inst: &Instance, seq: SequencePair) -> Self {
        let (_, (k0, k1)) = tr_second_stage(inst, seq);
        let center = inst.transitions(seq.u0)[k0].y.as_slice();
        let reward = inst.transitions(seq.u1)[k1].r;
        Self::centered_at(inst, seq, center, reward)
    }

    /// Frame with states shifted by `-center` and rewards by `-reward`.
    pub fn centered_at(inst: &Instance, seq: SequencePair, center: &[f64], reward: f64) -> Self {
        let lf2 = inst.lf() * inst.lf();
        let lrho2 = inst.lrho() * inst.lrho();
        let x0 = inst.initial_state();
        let shift = |v: &[f64]| -> Vec<f64> { v.iter().zip(center).map(|(a, c)| a - c).collect() };
        let f0 = inst.transitions(seq.u0);
        let f1 = inst.transitions(seq.u1);
        let ys: Vec<Vec<f64>> = f0.iter().map(|t| shift(&t.y)).collect();
        let xs: Vec<Vec<f64>> = f1.iter().map(|t| shift(&t.x)).collect();
        let rewards: Vec<f64> = f1.iter().map(|t| t.r - reward).collect();
        let lin_lambda = f0
            .iter()
            .zip(&ys)
            .map(|(t, y)| norm_sq(y) - lf2 * crate::vector::dist_sq(&t.x, x0))
            .collect();
        let lin_mu = xs
            .iter()
            .zip(&rewards)
            .map(|(x, r)| r * r - lrho2 * norm_sq(x))
            .collect();
        Self {
            lrho2,
            ys,
            xs,
            rewards,
            lin_lambda,
            lin_mu,
            reward_shift: reward,
            dimension: inst.dimension(),
        }
    }

    pub fn n0(&self) -> usize {
        self.ys.len()
    }

    pub fn n1(&self) -> usize {
        self.xs.len()
    }

    /// `v = L_rho^2 X mu - Y lambda` in the current frame.
    fn residual(&self, p: &DualPoint) -> Vec<f64> {
        let mut v = vec![0.0; self.dimension];
        for (x, m) in self.xs.iter().zip(&p.mu) {
            if *m != 0.0 {
                for (vi, xi) in v.iter_mut().zip(x) {
                    *vi += self.lrho2 * m * xi;
                }
            }
        }
        for (y, l) in self.ys.iter().zip(&p.lambda) {
            if *l != 0.0 {
                for (vi, yi) in v.iter_mut().zip(y) {
                    *vi -= l * yi;
                }
            }
        }
        v
    }

    /// `g` without any feasibility check; `-inf` outside the open cone.
    fn raw_value(&self, p: &DualPoint) -> f64 {
        let m = p.m_sum();
        let gap = p.l_sum() - m * self.lrho2;
        if !(m > 0.0 && gap > 0.0) {
            return f64::NEG_INFINITY;
        }
        let v = self.residual(p);
        let s = 1.0 - 2.0 * dot(&self.rewards, &p.mu);
        -norm_sq(&v) / gap - s * s / (4.0 * m)
            + dot(&self.lin_lambda, &p.lambda)
            + dot(&self.lin_mu, &p.mu)
            + self.reward_shift
    }

    fn check(&self, p: &DualPoint) -> Result<(), LagrangianError> {
        p.check(self.n0(), self.n1(), self.lrho2)
    }

    /// The dual objective `g(lambda, mu)`.
    pub fn objective(&self, p: &DualPoint) -> Result<f64, LagrangianError> {
        self.check(p)?;
        Ok(self.raw_value(p))
    }

    /// `g` and its analytic gradient.
    pub fn objective_and_gradient(&self, p: &DualPoint) -> Result<(f64, DualGradient), LagrangianError> {
        self.check(p)?;
        Ok(self.raw_value_and_gradient(p))
    }

    fn raw_value_and_gradient(&self, p: &DualPoint) -> (f64, DualGradient) {
        let m = p.m_sum();
        let gap = p.l_sum() - m * self.lrho2;
        let v = self.residual(p);
        let v2 = norm_sq(&v);
        let s = 1.0 - 2.0 * dot(&self.rewards, &p.mu);
        let value = -v2 / gap - s * s / (4.0 * m)
            + dot(&self.lin_lambda, &p.lambda)
            + dot(&self.lin_mu, &p.mu)
            + self.reward_shift;

        let q = v2 / (gap * gap);
        let lambda = self
            .ys
            .iter()
            .zip(&self.lin_lambda)
            .map(|(y, c)| 2.0 * dot(&v, y) / gap + q + c)
            .collect();
        let mu = self
            .xs
            .iter()
            .zip(self.rewards.iter().zip(&self.lin_mu))
            .map(|(x, (r, c))| {
                -2.0 * self.lrho2 * dot(&v, x) / gap - self.lrho2 * q
                    + s * r / m
                    + s * s / (4.0 * m * m)
                    + c
            })
            .collect();
        (value, DualGradient { lambda, mu })
    }
}

/// `g(lambda, mu)` for the sequence's second-stage problem.
pub fn dual_objective(inst: &Instance, seq: SequencePair, p: &DualPoint) -> Result<f64, LagrangianError> {
    DualProblem::new(inst, seq).objective(p)
}

/// Analytic gradient of [`dual_objective`].
pub fn dual_gradient(
    inst: &Instance,
    seq: SequencePair,
    p: &DualPoint,
) -> Result<DualGradient, LagrangianError> {
    Ok(DualProblem::new(inst, seq).objective_and_gradient(p)?.1)
}

/// Result of [`solve_dual`].
#[derive(Clone, Debug, PartialEq)]
pub struct DualSolution {
    /// `g` at `point`; a valid lower bound on the second-stage optimum.
    pub bound: f64,
    pub point: DualPoint,
    /// Newton steps plus ascent steps.
    pub iterations: usize,
    /// The interior phase certified the optimum, or the projected gradient
    /// norm fell below the tolerance.
    pub converged: bool,
}

/// Relative size of the artificial gap used when the closed form sits on the
/// boundary of the cone.
const BOUNDARY_NUDGE: f64 = 1e-10;
/// Multiplier used for `mu` when the pair's reward interval collapses to a point.
const LARGE_MULTIPLIER: f64 = 1e10;

/// Pair multipliers whose dual value is within about `1e-10` of `B''_TR(k0, k1)`,
/// also in the cases where the exact optimum lies on the cone boundary or at
/// infinity.
fn pair_warm_start(inst: &Instance, seq: SequencePair, k0: usize, k1: usize) -> (f64, f64) {
    let (lf, lrho) = (inst.lf(), inst.lrho());
    let (radius_src, gap) = pair_distances(inst, seq, k0, k1);
    if radius_src > 0.0 {
        // y^k0 = x^k1 puts lambda0 / mu0 exactly on L_rho^2; push K off 1.
        let gap = gap.max(BOUNDARY_NUDGE * lf * radius_src);
        let cf = closed_form_from_distances(lf, lrho, radius_src, gap);
        (cf.lambda0, cf.mu0)
    } else {
        // Zero-radius ball: the optimum needs lambda -> infinity.
        let mu = if gap > 0.0 {
            1.0 / (2.0 * lrho * gap)
        } else {
            LARGE_MULTIPLIER
        };
        (mu * lrho * lrho * (1.0 + 1.0 / BOUNDARY_NUDGE), mu)
    }
}

/// Maximizes `g` from the trust-region warm start.
///
/// An interior Newton phase (see `interior`) does the bulk of the work and
/// usually certifies the optimum to about `1e-10`; projected gradient ascent
/// then continues from the best point found unless that certificate holds.
/// Both phases share `max_iterations`. The returned bound is never below
/// `max_{k0,k1} B''_TR(k0, k1)` (up to rounding), and it is `g` at a point
/// strictly inside the margin cone.
pub fn solve_dual(
    inst: &Instance,
    seq: SequencePair,
    config: &SolverConfig,
) -> Result<DualSolution, LagrangianError> {
    let (_, (k0, k1)) = tr_second_stage(inst, seq);
    let problem = DualProblem::anchored(inst, seq);
    let (n0, n1) = (problem.n0(), problem.n1());
    let lrho2 = problem.lrho2;

    let inside = |p: &DualPoint| {
        let m = p.m_sum();
        m >= config.margin_m && p.l_sum() - m * lrho2 >= config.margin_c
    };

    let (l0, m0) = pair_warm_start(inst, seq, k0, k1);
    let mut point = ClosedFormDual {
        lambda0: l0,
        mu0: m0,
        k_factor: l0 / (m0 * lrho2),
    }
    .embed(n0, n1, k0, k1);
    if !(inside(&point) && problem.raw_value(&point).is_finite()) {
        point = DualPoint {
            lambda: vec![2.0 * lrho2 / n0 as f64; n0],
            mu: vec![1.0 / n1 as f64; n1],
        };
        if !inside(&point) {
            return Err(LagrangianError::DegenerateInstance);
        }
    }
    let mut iterations = 0;
    let mut certified = false;
    if config.barrier_phase {
        let warm_value = problem.raw_value(&point);
        let outcome = interior::interior_phase(&problem, &point, config.max_iterations, config, &inside);
        iterations = outcome.steps;
        // The certificate bounds the optimum over the mass cap, which contains
        // the warm start, so it holds for whichever point is kept.
        certified = outcome.certified;
        if let Some((p, v)) = outcome.best {
            if v > warm_value {
                point = p;
            }
        }
    }
    let (value, grad) = problem.raw_value_and_gradient(&point);
    let mut state = AscentState { point, value, grad };
    let mut previous: Option<(DualPoint, DualGradient)> = None;
    let mut step = config.initial_step;
    let mut converged = false;

    while iterations < config.max_iterations {
        if projected_gradient_norm(&state.point, &state.grad, lrho2, config.margin_c) <= config.gradient_tolerance {
            converged = true;
            break;
        }
        if let Some((prev_point, prev_grad)) = &previous {
            // Barzilai-Borwein length for the concave objective.
            let mut ss = 0.0;
            let mut sy = 0.0;
            for (s, y) in diff_pairs(&state.point, prev_point, &state.grad, prev_grad) {
                ss += s * s;
                sy -= s * y;
            }
            if sy > 0.0 && ss > 0.0 {
                step = (ss / sy).clamp(1e-14, 1e14);
            }
        }
        // A certified interior point only gets the stationarity test above.
        if certified {
            break;
        }
        let Some(next) = line_search(&problem, &state, step, config, &inside) else {
            break;
        };
        previous = Some((state.point, state.grad));
        state = next;
        iterations += 1;
    }
    if !converged {
        converged = certified
            || projected_gradient_norm(&state.point, &state.grad, lrho2, config.margin_c) <= config.gradient_tolerance;
    }

    Ok(DualSolution {
        bound: state.value,
        point: state.point,
        iterations,
        converged,
    })
}

struct AscentState {
    point: DualPoint,
    value: f64,
    grad: DualGradient,
}

fn diff_pairs<'a>(
    p: &'a DualPoint,
    q: &'a DualPoint,
    gp: &'a DualGradient,
    gq: &'a DualGradient,
) -> impl Iterator<Item = (f64, f64)> + 'a {
    let s = p.lambda.iter().zip(&q.lambda).chain(p.mu.iter().zip(&q.mu)).map(|(a, b)| a - b);
    let y = gp.lambda.iter().zip(&gq.lambda).chain(gp.mu.iter().zip(&gq.mu)).map(|(a, b)| a - b);
    s.zip(y)
}

/// Euclidean projection onto `{lambda >= 0, mu >= 0, L - M L_rho^2 >= margin}`.
///
/// The minimizer is `P_+(z + alpha b)` with `b = (1, -L_rho^2)` and the
/// smallest `alpha >= 0` that restores the margin; the margin as a function of
/// `alpha` is piecewise linear and nondecreasing, so a walk over the sorted
/// breakpoints finds it exactly.
fn project_onto_cone(lambda: &[f64], mu: &[f64], lrho2: f64, margin: f64) -> DualPoint {
    let at = |alpha: f64| -> DualPoint {
        DualPoint {
            lambda: lambda.iter().map(|z| (z + alpha).max(0.0)).collect(),
            mu: mu.iter().map(|z| (z - alpha * lrho2).max(0.0)).collect(),
        }
    };
    let plain = at(0.0);
    if plain.l_sum() - plain.m_sum() * lrho2 >= margin {
        return plain;
    }
    let mut breaks: Vec<f64> = lambda
        .iter()
        .filter(|z| **z < 0.0)
        .map(|z| -z)
        .chain(mu.iter().filter(|z| **z > 0.0).map(|z| z / lrho2))
        .collect();
    breaks.sort_by(f64::total_cmp);
    let margin_at = |alpha: f64| {
        let p = at(alpha);
        p.l_sum() - p.m_sum() * lrho2
    };
    // Slope on (lo, next break): active lambdas count 1, active mus L_rho^4.
    let mut lo = 0.0;
    let mut h_lo = margin_at(0.0);
    for &hi in breaks.iter().chain(std::iter::once(&f64::INFINITY)) {
        // Compared in the same form as the breakpoints, so ties are exact.
        let active_lambda = lambda.iter().filter(|z| -**z <= lo).count();
        let active_mu = mu.iter().filter(|z| **z / lrho2 >= hi).count();
        let slope = active_lambda as f64 + lrho2 * lrho2 * active_mu as f64;
        if slope > 0.0 {
            let alpha = lo + (margin - h_lo) / slope;
            if alpha <= hi {
                let mut p = at(alpha);
                // Rounding can leave the margin a few ulps short.
                let short = margin - (p.l_sum() - p.m_sum() * lrho2);
                if short > 0.0 {
                    if let Some((i, _)) = p.lambda.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)) {
                        p.lambda[i] += short * (1.0 + 1e-12) + f64::MIN_POSITIVE;
                    }
                }
                return p;
            }
        }
        if hi.is_infinite() {
            break;
        }
        lo = hi;
        h_lo = margin_at(hi);
    }
    // No lambda can grow (n0 = 0 is impossible for validated instances).
    plain
}

/// `||P(p + grad) - p||_inf` with `P` the projection on the margin cone.
fn projected_gradient_norm(p: &DualPoint, grad: &DualGradient, lrho2: f64, margin: f64) -> f64 {
    let lambda: Vec<f64> = p.lambda.iter().zip(&grad.lambda).map(|(x, g)| x + g).collect();
    let mu: Vec<f64> = p.mu.iter().zip(&grad.mu).map(|(x, g)| x + g).collect();
    let q = project_onto_cone(&lambda, &mu, lrho2, margin);
    q.lambda
        .iter()
        .chain(&q.mu)
        .zip(p.lambda.iter().chain(&p.mu))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Backtracking along the projected arc. The projection keeps the second cone
/// margin; a candidate with too little `M` is pulled back along the segment
/// from the current point.
fn line_search(
    problem: &DualProblem,
    state: &AscentState,
    mut step: f64,
    config: &SolverConfig,
    inside: &dyn Fn(&DualPoint) -> bool,
) -> Option<AscentState> {
    let advance = |x: &[f64], g: &[f64], t: f64| -> Vec<f64> { x.iter().zip(g).map(|(a, b)| a + t * b).collect() };
    for _ in 0..200 {
        let mut cand = project_onto_cone(
            &advance(&state.point.lambda, &state.grad.lambda, step),
            &advance(&state.point.mu, &state.grad.mu, step),
            problem.lrho2,
            config.margin_c,
        );
        if !inside(&cand) {
            cand = pull_into_cone(&state.point, &cand, problem.lrho2, config);
        }
        let mut increase = 0.0;
        let mut moved = false;
        for ((c, x), g) in cand
            .lambda
            .iter()
            .chain(&cand.mu)
            .zip(state.point.lambda.iter().chain(&state.point.mu))
            .zip(state.grad.lambda.iter().chain(&state.grad.mu))
        {
            increase += g * (c - x);
            moved |= c != x;
        }
        if !moved {
            return None;
        }
        if inside(&cand) {
            let value = problem.raw_value(&cand);
            if value.is_finite() && value >= state.value + config.armijo * increase {
                let (value, grad) = problem.raw_value_and_gradient(&cand);
                return Some(AscentState { point: cand, value, grad });
            }
        }
        step *= config.backtracking;
    }
    None
}

/// Moves `cand` towards `from` until both cone margins hold again. Both
/// constraints are affine, so the feasible part of the segment is an interval
/// starting at `from`.
fn pull_into_cone(from: &DualPoint, cand: &DualPoint, lrho2: f64, config: &SolverConfig) -> DualPoint {
    let margins = |p: &DualPoint| {
        let m = p.m_sum();
        [m - config.margin_m, p.l_sum() - m * lrho2 - config.margin_c]
    };
    let a = margins(from);
    let b = margins(cand);
    let mut theta: f64 = 1.0;
    for (ca, cb) in a.into_iter().zip(b) {
        if cb < 0.0 {
            theta = theta.min(ca / (ca - cb));
        }
    }
    let theta = 0.5 * theta;
    let blend = |x: &[f64], y: &[f64]| -> Vec<f64> {
        x.iter().zip(y).map(|(a, b)| a + theta * (b - a)).collect()
    };
    DualPoint {
        lambda: blend(&from.lambda, &cand.lambda),
        mu: blend(&from.mu, &cand.mu),
    }
}

/// `B_LD = r̂0* + max g`, plus the solver report.
pub fn ld_bound(
    inst: &Instance,
    seq: SequencePair,
    config: &SolverConfig,
) -> Result<(f64, DualSolution), LagrangianError> {
    let solution = solve_dual(inst, seq, config)?;
    Ok((first_stage_value(inst, seq.u0) + solution.bound, solution))
}
