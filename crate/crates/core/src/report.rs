//! Per-sequence bound summaries, as emitted by the command-line tool.

use crate::instance::{Instance, SequencePair};
use crate::lagrangian::{ld_bound, LagrangianError, SolverConfig};
use crate::stage_bounds::{cgrl_bound, first_stage_value, tr_bound, PairIndex};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Cgrl,
    Tr,
    Ld,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Cgrl, Method::Tr, Method::Ld];

    pub fn name(self) -> &'static str {
        match self {
            Method::Cgrl => "cgrl",
            Method::Tr => "tr",
            Method::Ld => "ld",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method {s:?}, expected cgrl, tr or ld"))
    }
}

/// Value of one lower bound for one sequence.
pub fn bound(
    inst: &Instance,
    seq: SequencePair,
    method: Method,
    solver: &SolverConfig,
) -> Result<f64, LagrangianError> {
    Ok(match method {
        Method::Cgrl => cgrl_bound(inst, seq).0,
        Method::Tr => tr_bound(inst, seq).0,
        Method::Ld => ld_bound(inst, seq, solver)?.0,
    })
}

/// Action labels of a sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceLabels {
    pub u0: String,
    pub u1: String,
}

impl SequenceLabels {
    pub fn of(inst: &Instance, seq: SequencePair) -> Self {
        Self {
            u0: inst.label(seq.u0).to_string(),
            u1: inst.label(seq.u1).to_string(),
        }
    }
}

/// Bounds of one sequence; fields of methods that were not run are `null`.
/// Transition indices are 0-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub sequence: SequenceLabels,
    pub r0_star: f64,
    pub b_cgrl: Option<f64>,
    pub b_tr: Option<f64>,
    pub b_ld: Option<f64>,
    pub cgrl_argmax_pair: Option<PairIndex>,
    pub tr_argmax_pair: Option<PairIndex>,
    pub ld_iterations: Option<usize>,
    pub ld_converged: Option<bool>,
}

impl BoundReport {
    pub fn compute(
        inst: &Instance,
        seq: SequencePair,
        methods: &[Method],
        solver: &SolverConfig,
    ) -> Result<Self, LagrangianError> {
        let mut report = BoundReport {
            sequence: SequenceLabels::of(inst, seq),
            r0_star: first_stage_value(inst, seq.u0),
            b_cgrl: None,
            b_tr: None,
            b_ld: None,
            cgrl_argmax_pair: None,
            tr_argmax_pair: None,
            ld_iterations: None,
            ld_converged: None,
        };
        for method in methods {
            match method {
                Method::Cgrl => {
                    let (b, pair) = cgrl_bound(inst, seq);
                    report.b_cgrl = Some(b);
                    report.cgrl_argmax_pair = Some(pair);
                }
                Method::Tr => {
                    let (b, pair) = tr_bound(inst, seq);
                    report.b_tr = Some(b);
                    report.tr_argmax_pair = Some(pair);
                }
                Method::Ld => {
                    let (b, sol) = ld_bound(inst, seq, solver)?;
                    report.b_ld = Some(b);
                    report.ld_iterations = Some(sol.iterations);
                    report.ld_converged = Some(sol.converged);
                }
            }
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{LipschitzPair, Transition};

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>(), Ok(m));
        }
        assert!("sdp".parse::<Method>().is_err());
    }

    #[test]
    fn report_fills_only_requested_methods() {
        let inst = Instance::new(
            1,
            LipschitzPair { lf: 1.0, lrho: 1.0 },
            [0.0],
            vec![
                ("a".into(), vec![Transition::new([0.5], 1.0, [0.2])]),
                ("b".into(), vec![Transition::new([0.1], 2.0, [0.0])]),
            ],
        )
        .unwrap();
        let seq = inst.sequence("a", "b").unwrap();
        let r = BoundReport::compute(&inst, seq, &[Method::Tr], &SolverConfig::default()).unwrap();
        assert_eq!(r.tr_argmax_pair, Some((0, 0)));
        assert!(r.b_cgrl.is_none() && r.b_ld.is_none() && r.ld_converged.is_none());
        let json = serde_json::to_value(&r).unwrap();
        assert!(json["b_ld"].is_null());
        assert_eq!(json["sequence"]["u0"], "a");
        assert_eq!(json["tr_argmax_pair"], serde_json::json!([0, 0]));
    }
}
