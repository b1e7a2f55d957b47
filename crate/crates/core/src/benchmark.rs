//! The linear two-action benchmark `f(x, u) = x + 3.1416 u 1_d`,
//! `rho(x, u) = sum_i x_i`, its sample generators and the two experiment
//! protocols (grid samples and averaged uniform samples).

use crate::instance::{ActionId, Instance, LipschitzPair, SequencePair, Transition};
use crate::lagrangian::{LagrangianError, SolverConfig};
pub use crate::report::{bound, Method};
use crate::vector::{dist, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkConfig {
    pub dimension: usize,
    /// `(label, value)` for every action, in instance order.
    pub actions: Vec<(String, f64)>,
    pub step_scale: f64,
    pub initial_scale: f64,
    /// Sampling and dispersion region `[lower, upper]^d`.
    pub box_lower: f64,
    pub box_upper: f64,
    pub dispersion_resolution: usize,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            dimension: 2,
            actions: vec![("0".into(), 0.0), ("0.1".into(), 0.1)],
            step_scale: 3.1416,
            initial_scale: 0.5772,
            box_lower: 0.0,
            box_upper: 1.0,
            dispersion_resolution: 101,
        }
    }
}

impl BenchmarkConfig {
    pub fn initial_state(&self) -> Vector {
        Vector::filled(self.dimension, self.initial_scale)
    }

    pub fn lipschitz(&self) -> LipschitzPair {
        LipschitzPair {
            lf: 1.0,
            lrho: (self.dimension as f64).sqrt(),
        }
    }

    /// `(f(x, u), rho(x, u))`.
    pub fn true_dynamics(&self, x: &[f64], u: f64) -> (Vector, f64) {
        let shift = self.step_scale * u;
        let next = x.iter().map(|v| v + shift).collect::<Vec<_>>();
        (next.into(), x.iter().sum())
    }

    /// Two-stage return of the action indices `(u0, u1)`.
    pub fn true_return(&self, seq: SequencePair) -> f64 {
        let x0 = self.initial_state();
        let (x1, r0) = self.true_dynamics(&x0, self.actions[seq.u0.0].1);
        let (_, r1) = self.true_dynamics(&x1, self.actions[seq.u1.0].1);
        r0 + r1
    }

    fn sequences(&self) -> impl Iterator<Item = SequencePair> + '_ {
        let n = self.actions.len();
        (0..n).flat_map(move |a| (0..n).map(move |b| SequencePair::new(ActionId(a), ActionId(b))))
    }

    /// Best two-stage return over every action sequence.
    pub fn j_star(&self) -> f64 {
        self.sequences()
            .map(|s| self.true_return(s))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn transition(&self, x: Vec<f64>, u: f64) -> Transition {
        let (y, r) = self.true_dynamics(&x, u);
        Transition { x: x.into(), r, y }
    }

    fn build(&self, per_action: Vec<Vec<Transition>>) -> Instance {
        let actions = self
            .actions
            .iter()
            .map(|(label, _)| label.clone())
            .zip(per_action)
            .collect();
        Instance::new(self.dimension, self.lipschitz(), self.initial_state(), actions)
            .expect("benchmark samples are valid by construction")
    }

    /// States `(i_1/i, ..., i_d/i)` for `i_j in 1..=i`, under every action.
    pub fn grid_sample(&self, i: usize) -> Instance {
        assert!(i >= 1, "grid index must be positive");
        let d = self.dimension;
        let count = i.pow(d as u32);
        let states: Vec<Vec<f64>> = (0..count)
            .map(|mut flat| {
                let mut x = vec![0.0; d];
                for c in x.iter_mut() {
                    *c = (flat % i + 1) as f64 / i as f64;
                    flat /= i;
                }
                x.reverse();
                x
            })
            .collect();
        let per_action = self
            .actions
            .iter()
            .map(|(_, u)| states.iter().map(|x| self.transition(x.clone(), *u)).collect())
            .collect();
        self.build(per_action)
    }

    /// `c` transitions with uniform states, split evenly across actions.
    pub fn uniform_sample(&self, c: usize, seed: u64) -> Instance {
        self.uniform_sample_with(c, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn uniform_sample_with<R: Rng>(&self, c: usize, rng: &mut R) -> Instance {
        let n = self.actions.len();
        assert!(c >= n && c % n == 0, "cardinality must be a positive multiple of the action count");
        let per_action = self
            .actions
            .iter()
            .map(|(_, u)| {
                (0..c / n)
                    .map(|_| {
                        let x = (0..self.dimension)
                            .map(|_| rng.gen_range(self.box_lower..self.box_upper))
                            .collect();
                        self.transition(x, *u)
                    })
                    .collect()
            })
            .collect();
        self.build(per_action)
    }

    /// Grid estimate of the sample dispersion: the largest distance from a
    /// point of the box to the nearest sampled state, worst case over actions.
    pub fn dispersion(&self, inst: &Instance) -> f64 {
        dispersion(inst, self.box_lower, self.box_upper, self.dispersion_resolution)
    }
}

/// Max over a `resolution^d` grid of `[lower, upper]^d` of the distance to the
/// nearest sampled state, maximized over actions.
pub fn dispersion(inst: &Instance, lower: f64, upper: f64, resolution: usize) -> f64 {
    let d = inst.dimension();
    assert!(resolution >= 2, "dispersion needs at least two points per axis");
    let step = (upper - lower) / (resolution - 1) as f64;
    let total = resolution.pow(d as u32);
    (0..inst.action_count())
        .map(|a| {
            let states = inst.transitions(ActionId(a));
            (0..total)
                .into_par_iter()
                .map(|mut flat| {
                    let mut x = vec![0.0; d];
                    for c in x.iter_mut() {
                        *c = lower + step * (flat % resolution) as f64;
                        flat /= resolution;
                    }
                    states
                        .iter()
                        .map(|t| dist(&t.x, &x))
                        .fold(f64::INFINITY, f64::min)
                })
                .reduce(|| 0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Sequence maximizing the chosen bound; ties go to the lexicographically
/// first sequence.
pub fn search_bound_optimal(
    inst: &Instance,
    method: Method,
    solver: &SolverConfig,
) -> Result<(SequencePair, f64), LagrangianError> {
    let mut best: Option<(SequencePair, f64)> = None;
    for seq in inst.sequences() {
        let value = bound(inst, seq, method, solver)?;
        if best.map_or(true, |(_, b)| value > b) {
            best = Some((seq, value));
        }
    }
    Ok(best.expect("instances have at least one action"))
}

/// One cardinality of an experiment (or the average over trials).
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    pub cardinality: usize,
    pub b_cgrl: f64,
    pub b_tr: f64,
    pub b_ld: f64,
    pub ret_cgrl: f64,
    pub ret_tr: f64,
    pub ret_ld: f64,
    pub j_star: f64,
    pub dispersion: f64,
}

impl ExperimentRow {
    /// Violated row invariants, empty when the row is consistent.
    pub fn violations(&self, tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        if self.b_cgrl > self.b_tr + tol {
            out.push(format!("b_cgrl {} > b_tr {}", self.b_cgrl, self.b_tr));
        }
        if self.b_tr > self.b_ld + tol {
            out.push(format!("b_tr {} > b_ld {}", self.b_tr, self.b_ld));
        }
        for (name, ret) in [("cgrl", self.ret_cgrl), ("tr", self.ret_tr), ("ld", self.ret_ld)] {
            if ret > self.j_star + tol {
                out.push(format!("ret_{name} {ret} > j_star {}", self.j_star));
            }
        }
        out
    }

    /// `(J*_2 - B*_LD) / dispersion`.
    pub fn gap_ratio(&self) -> f64 {
        (self.j_star - self.b_ld) / self.dispersion
    }

    fn values(&self) -> [f64; 8] {
        [
            self.b_cgrl,
            self.b_tr,
            self.b_ld,
            self.ret_cgrl,
            self.ret_tr,
            self.ret_ld,
            self.j_star,
            self.dispersion,
        ]
    }
}

/// Bound-optimal search for all three methods on one sample.
pub fn evaluate_sample(
    config: &BenchmarkConfig,
    inst: &Instance,
    solver: &SolverConfig,
) -> Result<ExperimentRow, LagrangianError> {
    let mut b = [0.0; 3];
    let mut ret = [0.0; 3];
    for (i, method) in Method::ALL.into_iter().enumerate() {
        let (seq, value) = search_bound_optimal(inst, method, solver)?;
        b[i] = value;
        ret[i] = config.true_return(seq);
    }
    Ok(ExperimentRow {
        cardinality: inst.total_transitions(),
        b_cgrl: b[0],
        b_tr: b[1],
        b_ld: b[2],
        ret_cgrl: ret[0],
        ret_tr: ret[1],
        ret_ld: ret[2],
        j_star: config.j_star(),
        dispersion: config.dispersion(inst),
    })
}

/// One row per `i in 1..=i_max` on `grid_sample(i)`.
pub fn run_grid_experiment(
    i_max: usize,
    config: &BenchmarkConfig,
    solver: &SolverConfig,
) -> Result<Vec<ExperimentRow>, LagrangianError> {
    (1..=i_max)
        .into_par_iter()
        .map(|i| evaluate_sample(config, &config.grid_sample(i), solver))
        .collect()
}

/// Seed of trial `trial` at grid index `i`.
pub fn trial_rng(seed: u64, i: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((i as u64) << 32) | trial as u64);
    rng
}

/// Per cardinality `c_i = 2 i^2`, averages over `trials` uniform samples.
pub fn run_uniform_experiment(
    i_max: usize,
    trials: usize,
    seed: u64,
    config: &BenchmarkConfig,
    solver: &SolverConfig,
) -> Result<Vec<ExperimentRow>, LagrangianError> {
    assert!(trials >= 1, "at least one trial is needed");
    let units: Vec<(usize, usize)> = (1..=i_max)
        .flat_map(|i| (0..trials).map(move |t| (i, t)))
        .collect();
    let rows: Vec<ExperimentRow> = units
        .par_iter()
        .map(|&(i, t)| {
            let c = config.actions.len() * i.pow(config.dimension as u32);
            let inst = config.uniform_sample_with(c, &mut trial_rng(seed, i, t));
            evaluate_sample(config, &inst, solver)
        })
        .collect::<Result<_, _>>()?;
    Ok(rows.chunks(trials).map(average).collect())
}

fn average(rows: &[ExperimentRow]) -> ExperimentRow {
    let n = rows.len() as f64;
    let mut sums = [0.0; 8];
    for row in rows {
        for (s, v) in sums.iter_mut().zip(row.values()) {
            *s += v;
        }
    }
    let [b_cgrl, b_tr, b_ld, ret_cgrl, ret_tr, ret_ld, j_star, dispersion] = sums.map(|s| s / n);
    ExperimentRow {
        cardinality: rows[0].cardinality,
        b_cgrl,
        b_tr,
        b_ld,
        ret_cgrl,
        ret_tr,
        ret_ld,
        j_star,
        dispersion,
    }
}

const VALUE_COLUMNS: [&str; 8] = [
    "b_cgrl", "b_tr", "b_ld", "ret_cgrl", "ret_tr", "ret_ld", "j_star", "dispersion",
];

/// CSV text; `averaged` prefixes every value column with `avg_`.
pub fn to_csv(rows: &[ExperimentRow], averaged: bool) -> String {
    let prefix = if averaged { "avg_" } else { "" };
    let mut out = String::from("cardinality");
    for name in VALUE_COLUMNS {
        let _ = write!(out, ",{prefix}{name}");
    }
    out.push('\n');
    for row in rows {
        let _ = write!(out, "{}", row.cardinality);
        for v in row.values() {
            let _ = write!(out, ",{v:.16e}");
        }
        out.push('\n');
    }
    out
}
