//! Reduction from `{0,2}`-programming feasibility to the "maximal norm under
//! ball constraints" decision problem, plus exhaustive checkers.
//!
//! The MNBC question asks for `x` with `||x - center||^2 >= threshold` and
//! `||x - y^i||^2 <= gamma_i` for every ball. The encoding below carves
//! `{0,2}^d` out of `R^d` with `2d` balls and the norm constraint, then adds one
//! ball per inequality `a^T x <= b` that contains exactly the cube points
//! satisfying it.

use crate::vector::{dist_sq, dot, norm_sq, Vector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAX_BRUTEFORCE_DIMENSION: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MnbcError {
    #[error("inequality {row} has an all-zero coefficient row")]
    ZeroRow { row: usize },
    #[error("right-hand side of inequality {row} is {value}, expected an even integer")]
    OddRhs { row: usize, value: i64 },
    #[error("expected {expected} entries in {context}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        found: usize,
    },
    #[error("system has no inequalities; a \"dimension\" field is required")]
    MissingDimension,
    #[error("exhaustive check supports d <= {MAX_BRUTEFORCE_DIMENSION}, got {0}")]
    DimensionTooLarge(usize),
    #[error("dimension must be positive")]
    ZeroDimension,
}

/// `A x <= b` over `x in {0,2}^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroTwoFeasibility {
    pub a: Vec<Vec<i64>>,
    pub b: Vec<i64>,
    /// Needed only when there are no inequalities.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
}

impl ZeroTwoFeasibility {
    /// Checks shape, nonzero rows and even right-hand sides; returns `d`.
    pub fn validate(&self) -> Result<usize, MnbcError> {
        let d = match (self.a.first(), self.dimension) {
            (Some(row), _) => row.len(),
            (None, Some(d)) => d,
            (None, None) => return Err(MnbcError::MissingDimension),
        };
        if d == 0 {
            return Err(MnbcError::ZeroDimension);
        }
        if let Some(declared) = self.dimension {
            if declared != d {
                return Err(MnbcError::DimensionMismatch {
                    context: "dimension field".into(),
                    expected: declared,
                    found: d,
                });
            }
        }
        if self.b.len() != self.a.len() {
            return Err(MnbcError::DimensionMismatch {
                context: "b".into(),
                expected: self.a.len(),
                found: self.b.len(),
            });
        }
        for (row, (coeffs, rhs)) in self.a.iter().zip(&self.b).enumerate() {
            if coeffs.len() != d {
                return Err(MnbcError::DimensionMismatch {
                    context: format!("row {row} of a"),
                    expected: d,
                    found: coeffs.len(),
                });
            }
            if coeffs.iter().all(|c| *c == 0) {
                return Err(MnbcError::ZeroRow { row });
            }
            if rhs % 2 != 0 {
                return Err(MnbcError::OddRhs { row, value: *rhs });
            }
        }
        Ok(d)
    }

    pub fn satisfied_by(&self, x: &[f64]) -> bool {
        self.a.iter().zip(&self.b).all(|(row, rhs)| {
            let lhs: f64 = row.iter().zip(x).map(|(a, v)| *a as f64 * v).sum();
            lhs <= *rhs as f64
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vector,
    pub radius_sq: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MnbcInstance {
    pub center: Vector,
    pub threshold: f64,
    pub balls: Vec<Ball>,
}

/// How an inequality ball is pushed away from its hyperplane.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CenterRule {
    /// `y = ȳ - r a / ||a||`, so that `||y - ȳ|| = r`.
    #[default]
    Normalized,
    /// `y = ȳ - r a`, which only matches the line above when `||a|| = 1`.
    Literal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EncodeOptions {
    pub center_rule: CenterRule,
    /// Replace `b` by `min(b, max_{x in {0,2}^d} a^T x)`. Without it, rows that
    /// are slack on the whole cube can cut off feasible points.
    pub clamp_rhs: bool,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        Self {
            center_rule: CenterRule::Normalized,
            clamp_rhs: true,
        }
    }
}

pub fn encode(f: &ZeroTwoFeasibility) -> Result<MnbcInstance, MnbcError> {
    encode_with(f, EncodeOptions::default())
}

pub fn encode_with(f: &ZeroTwoFeasibility, options: EncodeOptions) -> Result<MnbcInstance, MnbcError> {
    let d = f.validate()?;
    let df = d as f64;
    let ones = vec![1.0; d];
    let mut balls = Vec::with_capacity(2 * d + f.a.len());
    for i in 0..d {
        for v in [0.0, 2.0] {
            let mut c = ones.clone();
            c[i] = v;
            balls.push(Ball {
                center: c.into(),
                radius_sq: df + 3.0,
            });
        }
    }
    for (row, rhs) in f.a.iter().zip(&f.b) {
        let a: Vec<f64> = row.iter().map(|v| *v as f64).collect();
        let cube_max: i64 = row.iter().map(|v| 2 * (*v).max(0)).sum();
        let rhs = if options.clamp_rhs { (*rhs).min(cube_max) } else { *rhs } as f64;
        let a_sq = norm_sq(&a);
        let a_norm = a_sq.sqrt();
        let r = (0.5 * df * a_norm + 1.0).ceil();
        let t = (rhs + 1.0 - dot(&a, &ones)) / a_sq;
        let foot: Vec<f64> = ones.iter().zip(&a).map(|(o, ai)| o + t * ai).collect();
        let scale = match options.center_rule {
            CenterRule::Normalized => r / a_norm,
            CenterRule::Literal => r,
        };
        let center: Vec<f64> = foot.iter().zip(&a).map(|(y, ai)| y - scale * ai).collect();
        balls.push(Ball {
            center: center.into(),
            radius_sq: r * r,
        });
    }
    Ok(MnbcInstance {
        center: ones.into(),
        threshold: df,
        balls,
    })
}

pub fn check_point(m: &MnbcInstance, x: &[f64]) -> bool {
    dist_sq(x, &m.center) >= m.threshold && m.balls.iter().all(|b| dist_sq(x, &b.center) <= b.radius_sq)
}

/// Outcome of enumerating `{0,2}^d`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BruteforceReport {
    pub ip_feasible: bool,
    pub mnbc_feasible_on_cube: bool,
    /// First cube point (in enumeration order) satisfying `A x <= b`.
    pub witness: Option<Vec<f64>>,
    /// Cube points where the two checks disagree.
    pub mismatches: usize,
}

impl BruteforceReport {
    pub fn agrees(&self) -> bool {
        self.ip_feasible == self.mnbc_feasible_on_cube
    }
}

fn cube_point(d: usize, mask: u64) -> Vec<f64> {
    (0..d).map(|i| if mask >> i & 1 == 1 { 2.0 } else { 0.0 }).collect()
}

pub fn check_bruteforce(f: &ZeroTwoFeasibility) -> Result<BruteforceReport, MnbcError> {
    check_bruteforce_with(f, EncodeOptions::default())
}

pub fn check_bruteforce_with(
    f: &ZeroTwoFeasibility,
    options: EncodeOptions,
) -> Result<BruteforceReport, MnbcError> {
    let d = f.validate()?;
    if d > MAX_BRUTEFORCE_DIMENSION {
        return Err(MnbcError::DimensionTooLarge(d));
    }
    let m = encode_with(f, options)?;
    let outcomes: Vec<(bool, bool)> = (0..1u64 << d)
        .into_par_iter()
        .map(|mask| {
            let x = cube_point(d, mask);
            (f.satisfied_by(&x), check_point(&m, &x))
        })
        .collect();
    let witness = outcomes.iter().position(|o| o.0).map(|i| cube_point(d, i as u64));
    Ok(BruteforceReport {
        ip_feasible: witness.is_some(),
        mnbc_feasible_on_cube: outcomes.iter().any(|o| o.1),
        witness,
        mismatches: outcomes.iter().filter(|o| o.0 != o.1).count(),
    })
}

/// Random system with `d <= max_d`, `p <= max_p`, entries in `[-3, 3]` and
/// even right-hand sides.
pub fn random_feasibility<R: Rng>(rng: &mut R, max_d: usize, max_p: usize) -> ZeroTwoFeasibility {
    let d = rng.gen_range(1..=max_d);
    let p = rng.gen_range(0..=max_p);
    let mut a = Vec::with_capacity(p);
    let mut b = Vec::with_capacity(p);
    while a.len() < p {
        let row: Vec<i64> = (0..d).map(|_| rng.gen_range(-3..=3)).collect();
        if row.iter().all(|v| *v == 0) {
            continue;
        }
        let rhs: i64 = rng.gen_range(-3 * d as i64..=3 * d as i64);
        a.push(row);
        b.push(2 * rhs.div_euclid(2));
    }
    ZeroTwoFeasibility {
        a,
        b,
        dimension: Some(d),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn system(a: Vec<Vec<i64>>, b: Vec<i64>) -> ZeroTwoFeasibility {
        ZeroTwoFeasibility { a, b, dimension: None }
    }

    #[test]
    fn one_dimensional_encoding() {
        let m = encode(&system(vec![vec![2]], vec![0])).unwrap();
        assert_eq!(m.center.as_slice(), &[1.0]);
        assert_eq!(m.threshold, 1.0);
        assert_eq!(m.balls.len(), 3);
        assert_eq!(m.balls[0].center.as_slice(), &[0.0]);
        assert_eq!(m.balls[1].center.as_slice(), &[2.0]);
        assert_eq!(m.balls[0].radius_sq, 4.0);
        assert!((m.balls[2].center[0] + 1.5).abs() < 1e-15);
        assert_eq!(m.balls[2].radius_sq, 4.0);
        assert!(check_point(&m, &[0.0]));
        assert!(!check_point(&m, &[2.0]));
        assert!(!check_point(&m, &[1.0]));
    }

    #[test]
    fn literal_rule_differs_for_non_unit_rows() {
        let options = EncodeOptions {
            center_rule: CenterRule::Literal,
            ..EncodeOptions::default()
        };
        let m = encode_with(&system(vec![vec![2]], vec![0]), options).unwrap();
        assert!((m.balls[2].center[0] + 3.5).abs() < 1e-15);
    }

    #[test]
    fn empty_system_keeps_the_whole_cube() {
        let f = ZeroTwoFeasibility {
            a: vec![],
            b: vec![],
            dimension: Some(3),
        };
        let m = encode(&f).unwrap();
        assert_eq!(m.balls.len(), 6);
        assert!(check_point(&m, &[0.0, 0.0, 0.0]));
        let r = check_bruteforce(&f).unwrap();
        assert!(r.ip_feasible && r.mnbc_feasible_on_cube);
        assert_eq!(r.mismatches, 0);
    }

    #[test]
    fn zero_row_and_odd_rhs_are_rejected() {
        assert_eq!(
            encode(&system(vec![vec![1, 0], vec![0, 0]], vec![0, 0])),
            Err(MnbcError::ZeroRow { row: 1 })
        );
        assert_eq!(
            encode(&system(vec![vec![1]], vec![1])),
            Err(MnbcError::OddRhs { row: 0, value: 1 })
        );
        let missing = ZeroTwoFeasibility { a: vec![], b: vec![], dimension: None };
        assert_eq!(encode(&missing), Err(MnbcError::MissingDimension));
    }

    #[test]
    fn forced_corner() {
        let f = system(vec![vec![-1, 0], vec![0, -1]], vec![-2, -2]);
        let r = check_bruteforce(&f).unwrap();
        assert!(r.ip_feasible && r.mnbc_feasible_on_cube);
        assert_eq!(r.witness, Some(vec![2.0, 2.0]));
        assert_eq!(r.mismatches, 0);
    }

    #[test]
    fn infeasible_system() {
        let f = system(vec![vec![2], vec![-2]], vec![0, -4]);
        let r = check_bruteforce(&f).unwrap();
        assert!(!r.ip_feasible && !r.mnbc_feasible_on_cube);
    }

    #[test]
    fn center_point_fails_the_norm_constraint() {
        let m = encode(&system(vec![vec![1, 1]], vec![2])).unwrap();
        assert!(!check_point(&m, &[1.0, 1.0]));
    }

    #[test]
    fn redundant_rows_need_clamping() {
        // Found by random search: without the clamp a cube point that
        // satisfies every row falls outside an inequality ball.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let raw = EncodeOptions { clamp_rhs: false, ..EncodeOptions::default() };
        let mut raw_mismatch = false;
        for _ in 0..3000 {
            let f = random_feasibility(&mut rng, 6, 4);
            assert_eq!(check_bruteforce(&f).unwrap().mismatches, 0, "{f:?}");
            raw_mismatch |= check_bruteforce_with(&f, raw).unwrap().mismatches > 0;
        }
        assert!(raw_mismatch);
    }

    #[test]
    fn json_round_trip() {
        let f: ZeroTwoFeasibility = serde_json::from_str(r#"{"a": [[2, -1]], "b": [2]}"#).unwrap();
        assert_eq!(f.validate(), Ok(2));
        let m = encode(&f).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        assert!(text.contains("\"radius_sq\""));
        let back: MnbcInstance = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }
}
