//! Brute-force references for small instances: a grid optimum of the
//! second-stage problem, sphere sampling of the trust-region geometry, and a
//! weak-duality spot check.

use crate::instance::{Instance, SequencePair};
use crate::lagrangian::{dual_objective, ld_bound, DualPoint, LagrangianError, SolverConfig};
use crate::stage_bounds::{cgrl_bound, first_stage_value, tr_bound, tr_maximizer};
use crate::vector::{dist, dist_sq, Vector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub const DEFAULT_RESOLUTION: usize = 201;
pub const MAX_DIMENSION: usize = 3;
pub const MIN_RESOLUTION: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("no grid point satisfies the ball constraints")]
    NoFeasiblePoint,
    #[error("grid oracle supports d <= {MAX_DIMENSION}, got {0}")]
    DimensionTooLarge(usize),
    #[error("resolution must be at least {MIN_RESOLUTION}, got {0}")]
    ResolutionTooSmall(usize),
    #[error("box has {found} axes but the instance has dimension {expected}")]
    BoxDimension { expected: usize, found: usize },
    #[error(transparent)]
    Dual(#[from] LagrangianError),
}

/// Axis-aligned search region `[lower_i, upper_i]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxisBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl AxisBox {
    pub fn around(center: &[f64], radius: f64) -> Self {
        Self {
            lower: center.iter().map(|c| c - radius).collect(),
            upper: center.iter().map(|c| c + radius).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Diagonal of one grid cell at `resolution` points per axis.
    pub fn cell_diagonal(&self, resolution: usize) -> f64 {
        let steps = (resolution - 1) as f64;
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| ((u - l) / steps).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    fn grid_point(&self, resolution: usize, mut index: usize, out: &mut [f64]) {
        let steps = (resolution - 1) as f64;
        for ((o, l), u) in out.iter_mut().zip(&self.lower).zip(&self.upper) {
            let i = index % resolution;
            index /= resolution;
            *o = l + (u - l) * i as f64 / steps;
        }
    }
}

/// Bounding box of the first dynamics ball, which contains every feasible
/// second-stage state.
pub fn first_ball_box(inst: &Instance, seq: SequencePair) -> AxisBox {
    let t = &inst.transitions(seq.u0)[0];
    AxisBox::around(&t.y, inst.lf() * dist(&t.x, inst.initial_state()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridOptimum {
    pub value: f64,
    pub point: Vector,
    /// Cell diagonal times `L_rho`.
    pub tolerance: f64,
}

/// Minimum over feasible grid points of the smallest feasible second-stage
/// reward, `max_k1 (r^k1 - L_rho ||x - x^k1||)`.
pub fn second_stage_grid_optimum(
    inst: &Instance,
    seq: SequencePair,
    region: &AxisBox,
    resolution: usize,
) -> Result<GridOptimum, OracleError> {
    let d = inst.dimension();
    if d > MAX_DIMENSION {
        return Err(OracleError::DimensionTooLarge(d));
    }
    if resolution < MIN_RESOLUTION {
        return Err(OracleError::ResolutionTooSmall(resolution));
    }
    if region.dim() != d {
        return Err(OracleError::BoxDimension { expected: d, found: region.dim() });
    }
    let lf2 = inst.lf() * inst.lf();
    let lrho = inst.lrho();
    let x0 = inst.initial_state();
    let balls: Vec<(&[f64], f64)> = inst
        .transitions(seq.u0)
        .iter()
        .map(|t| {
            let r2 = lf2 * dist_sq(&t.x, x0);
            (t.y.as_slice(), r2 + 1e-12 * (1.0 + r2))
        })
        .collect();
    let f1 = inst.transitions(seq.u1);

    let total = resolution.pow(d as u32);
    let best = (0..total)
        .into_par_iter()
        .map_init(
            || vec![0.0; d],
            |x, index| {
                region.grid_point(resolution, index, x);
                if balls.iter().any(|(c, r2)| dist_sq(x, c) > *r2) {
                    return None;
                }
                let mut lower = f64::NEG_INFINITY;
                let mut upper = f64::INFINITY;
                for t in f1 {
                    let spread = lrho * dist(x, &t.x);
                    lower = lower.max(t.r - spread);
                    upper = upper.min(t.r + spread);
                }
                (lower <= upper).then_some((lower, index))
            },
        )
        .flatten()
        .reduce_with(|a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });

    let (value, index) = best.ok_or(OracleError::NoFeasiblePoint)?;
    let mut point = vec![0.0; d];
    region.grid_point(resolution, index, &mut point);
    Ok(GridOptimum {
        value,
        point: point.into(),
        tolerance: region.cell_diagonal(resolution) * lrho,
    })
}

/// Largest `||x - x^k1||` over `samples` uniform points of the sphere of
/// centre `y^k0` and radius `L_f ||x0 - x^k0||`.
pub fn verify_tr_by_sphere_sampling(
    inst: &Instance,
    seq: SequencePair,
    k0: usize,
    k1: usize,
    samples: usize,
    seed: u64,
) -> f64 {
    let a = &inst.transitions(seq.u0)[k0];
    let target = &inst.transitions(seq.u1)[k1].x;
    let radius = inst.lf() * dist(&a.x, inst.initial_state());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = inst.dimension();
    let mut direction = vec![0.0; d];
    let mut best = f64::NEG_INFINITY;
    for _ in 0..samples {
        let norm = loop {
            for c in direction.iter_mut() {
                *c = StandardNormal.sample(&mut rng);
            }
            let n = crate::vector::norm_sq(&direction).sqrt();
            if n > 0.0 {
                break n;
            }
        };
        let point = a.y.offset(&direction, radius / norm);
        best = best.max(dist(&point, target));
    }
    best
}

/// Distance from the closed-form maximizer to `x^k1`.
pub fn closed_form_distance(inst: &Instance, seq: SequencePair, k0: usize, k1: usize) -> f64 {
    dist(&tr_maximizer(inst, seq, k0, k1), &inst.transitions(seq.u1)[k1].x)
}

/// Whether `g(p)` stays below the grid optimum plus its tolerance.
pub fn check_weak_duality(
    inst: &Instance,
    seq: SequencePair,
    p: &DualPoint,
    region: &AxisBox,
    resolution: usize,
) -> Result<bool, OracleError> {
    let g = dual_objective(inst, seq, p)?;
    let grid = second_stage_grid_optimum(inst, seq, region, resolution)?;
    Ok(g <= grid.value + grid.tolerance)
}

/// Every bound of one sequence next to the grid reference.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichReport {
    pub r0_star: f64,
    pub b_cgrl: f64,
    pub b_tr: f64,
    pub b_ld: f64,
    pub grid_optimum: GridOptimum,
    /// `r0_star + grid_optimum.value`.
    pub reference: f64,
    pub cgrl_le_tr: bool,
    pub tr_le_ld: bool,
    pub ld_le_reference: bool,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.cgrl_le_tr && self.tr_le_ld && self.ld_le_reference
    }
}

/// Checks `cgrl <= tr <= ld <= r0* + grid + tol` for one sequence.
pub fn sandwich(
    inst: &Instance,
    seq: SequencePair,
    resolution: usize,
    config: &SolverConfig,
) -> Result<SandwichReport, OracleError> {
    const SLACK: f64 = 1e-9;
    let grid = second_stage_grid_optimum(inst, seq, &first_ball_box(inst, seq), resolution)?;
    let r0_star = first_stage_value(inst, seq.u0);
    let b_cgrl = cgrl_bound(inst, seq).0;
    let b_tr = tr_bound(inst, seq).0;
    let b_ld = ld_bound(inst, seq, config)?.0;
    let reference = r0_star + grid.value;
    Ok(SandwichReport {
        r0_star,
        b_cgrl,
        b_tr,
        b_ld,
        cgrl_le_tr: b_cgrl <= b_tr + SLACK,
        tr_le_ld: b_tr <= b_ld + SLACK,
        ld_le_reference: b_ld <= reference + grid.tolerance + SLACK,
        reference,
        grid_optimum: grid,
    })
}
