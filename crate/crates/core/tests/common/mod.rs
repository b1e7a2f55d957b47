#![allow(dead_code)]

use minmax_bounds::instance::{Instance, LipschitzPair, SequencePair, Transition};
use rand::Rng;
use std::f64::consts::SQRT_2;

/// Contraction `x -> s R(theta) x + shift` with reward
/// `c + w.x + amp sin(v.x)`, Lipschitz below 1 and sqrt(2) respectively.
#[derive(Clone, Debug)]
pub struct ActionModel {
    scale: f64,
    theta: f64,
    shift: [f64; 2],
    offset: f64,
    slope: [f64; 2],
    amplitude: f64,
    frequency: [f64; 2],
}

impl ActionModel {
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let angle = rng.gen_range(0.0..std::f64::consts::TAU);
        let slope_norm = rng.gen_range(0.0..1.0);
        let freq_angle = rng.gen_range(0.0..std::f64::consts::TAU);
        let freq_norm = rng.gen_range(1.0..4.0);
        Self {
            scale: rng.gen_range(0.3..0.7),
            theta: rng.gen_range(0.0..std::f64::consts::TAU),
            shift: [rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)],
            offset: rng.gen_range(-1.0..1.0),
            slope: [slope_norm * angle.cos(), slope_norm * angle.sin()],
            amplitude: 0.4 / freq_norm * rng.gen_range(0.0..1.0),
            frequency: [freq_norm * freq_angle.cos(), freq_norm * freq_angle.sin()],
        }
    }

    pub fn step(&self, x: [f64; 2]) -> [f64; 2] {
        let (s, c) = self.theta.sin_cos();
        [
            self.scale * (c * x[0] - s * x[1]) + self.shift[0],
            self.scale * (s * x[0] + c * x[1]) + self.shift[1],
        ]
    }

    pub fn reward(&self, x: [f64; 2]) -> f64 {
        let lin = self.slope[0] * x[0] + self.slope[1] * x[1];
        let wave = self.frequency[0] * x[0] + self.frequency[1] * x[1];
        self.offset + lin + self.amplitude * wave.sin()
    }
}

/// A two-action system on `R^2` consistent with `L_f = 1`, `L_rho = sqrt 2`.
#[derive(Clone, Debug)]
pub struct KnownSystem {
    pub models: Vec<ActionModel>,
    pub x0: [f64; 2],
}

impl KnownSystem {
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        Self {
            models: vec![ActionModel::random(rng), ActionModel::random(rng)],
            x0: [rng.gen_range(0.2..0.8), rng.gen_range(0.2..0.8)],
        }
    }

    /// `counts[u]` transitions per action with states in `[0,1]^2`, each at
    /// least `min_gap` away from `x0`.
    pub fn sample<R: Rng>(&self, rng: &mut R, counts: &[usize], min_gap: f64) -> Instance {
        let actions = self
            .models
            .iter()
            .zip(counts)
            .enumerate()
            .map(|(u, (m, n))| {
                let ts = (0..*n)
                    .map(|_| {
                        let x = loop {
                            let x = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)];
                            if ((x[0] - self.x0[0]).powi(2) + (x[1] - self.x0[1]).powi(2)).sqrt() >= min_gap {
                                break x;
                            }
                        };
                        Transition::new(x, m.reward(x), m.step(x))
                    })
                    .collect();
                (format!("u{u}"), ts)
            })
            .collect();
        Instance::new(2, LipschitzPair { lf: 1.0, lrho: SQRT_2 }, self.x0, actions).unwrap()
    }

    pub fn true_return(&self, seq: SequencePair) -> f64 {
        let a = &self.models[seq.u0.0];
        let b = &self.models[seq.u1.0];
        a.reward(self.x0) + b.reward(a.step(self.x0))
    }
}

fn random_point<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.gen_range(0.0..1.0)).collect()
}

/// Unstructured instance, with a fair share of degenerate coincidences
/// (`x = x0`, `y = x'` for some u1-state, duplicated transitions).
pub fn arbitrary_instance<R: Rng>(rng: &mut R, d: usize, max_n: usize) -> Instance {
    let x0 = random_point(rng, d);
    let lipschitz = LipschitzPair {
        lf: rng.gen_range(0.2..2.0),
        lrho: rng.gen_range(0.2..2.0),
    };
    let n1 = rng.gen_range(1..=max_n);
    let f1: Vec<Transition> = (0..n1)
        .map(|_| Transition::new(random_point(rng, d), rng.gen_range(-1.0..2.0), random_point(rng, d)))
        .collect();
    let n0 = rng.gen_range(1..=max_n);
    let mut f0: Vec<Transition> = Vec::with_capacity(n0);
    for _ in 0..n0 {
        let x = if rng.gen_bool(0.15) { x0.clone() } else { random_point(rng, d) };
        let y = if rng.gen_bool(0.15) {
            f1[rng.gen_range(0..n1)].x.to_vec()
        } else {
            random_point(rng, d)
        };
        f0.push(Transition::new(x, rng.gen_range(-1.0..2.0), y));
    }
    if rng.gen_bool(0.1) {
        let dup = f0[0].clone();
        f0.push(dup);
    }
    Instance::new(d, lipschitz, x0, vec![("a".into(), f0), ("b".into(), f1)]).unwrap()
}
