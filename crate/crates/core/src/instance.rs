//! Problem data: the batch of one-step transitions per action, the Lipschitz
//! constants and the initial state, plus the JSON file format.
//!
//! A [`RawInstance`] is exactly what the file contains. [`validate_instance`]
//! turns it into an [`Instance`], which is immutable and indexes actions densely
//! in the order of the `actions` list.

use crate::vector::Vector;
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstanceError {
    #[error("parse error at line {line}, column {column}: {message}")]
    ParseError {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        found: usize,
    },
    #[error("action {action:?} has an empty transition set")]
    EmptyTransitionSet { action: String },
    #[error("Lipschitz constant {name} must be positive and finite, got {value}")]
    NonPositiveLipschitz { name: &'static str, value: f64 },
    #[error("unknown action {0:?}")]
    UnknownAction(String),
    #[error("duplicate action label {0:?}")]
    DuplicateAction(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
}

/// One sampled transition `(x, r, y)` for a fixed action.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub x: Vector,
    pub r: f64,
    pub y: Vector,
}

impl Transition {
    pub fn new(x: impl Into<Vector>, r: f64, y: impl Into<Vector>) -> Self {
        Self {
            x: x.into(),
            r,
            y: y.into(),
        }
    }
}

/// Known upper bounds on the Lipschitz constants of the dynamics (`lf`) and of
/// the reward (`lrho`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipschitzPair {
    pub lf: f64,
    pub lrho: f64,
}

/// The on-disk instance, field for field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawInstance {
    pub dimension: usize,
    pub lipschitz: LipschitzPair,
    pub initial_state: Vector,
    pub actions: Vec<String>,
    pub transitions: IndexMap<String, Vec<Transition>>,
}

/// Dense index of an action in [`Instance::actions`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionId(pub usize);

/// A two-stage action sequence `(u0, u1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SequencePair {
    pub u0: ActionId,
    pub u1: ActionId,
}

impl SequencePair {
    pub fn new(u0: ActionId, u1: ActionId) -> Self {
        Self { u0, u1 }
    }
}

/// A validated instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    dimension: usize,
    lipschitz: LipschitzPair,
    initial_state: Vector,
    actions: Vec<String>,
    transitions: Vec<Vec<Transition>>,
}

impl Instance {
    /// Builds and validates an instance from `(label, transitions)` pairs.
    pub fn new(
        dimension: usize,
        lipschitz: LipschitzPair,
        initial_state: impl Into<Vector>,
        actions: Vec<(String, Vec<Transition>)>,
    ) -> Result<Self, InstanceError> {
        let raw = RawInstance {
            dimension,
            lipschitz,
            initial_state: initial_state.into(),
            actions: actions.iter().map(|(l, _)| l.clone()).collect(),
            transitions: actions.into_iter().collect(),
        };
        validate_instance(raw)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn lipschitz(&self) -> LipschitzPair {
        self.lipschitz
    }

    pub fn lf(&self) -> f64 {
        self.lipschitz.lf
    }

    pub fn lrho(&self) -> f64 {
        self.lipschitz.lrho
    }

    pub fn initial_state(&self) -> &Vector {
        &self.initial_state
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    pub fn label(&self, action: ActionId) -> &str {
        &self.actions[action.0]
    }

    pub fn action_id(&self, label: &str) -> Result<ActionId, InstanceError> {
        self.actions
            .iter()
            .position(|a| a == label)
            .map(ActionId)
            .ok_or_else(|| InstanceError::UnknownAction(label.to_string()))
    }

    /// Transitions `F^(u)` of one action.
    pub fn transitions(&self, action: ActionId) -> &[Transition] {
        &self.transitions[action.0]
    }

    pub fn total_transitions(&self) -> usize {
        self.transitions.iter().map(Vec::len).sum()
    }

    pub fn sequence(&self, u0: &str, u1: &str) -> Result<SequencePair, InstanceError> {
        Ok(SequencePair::new(self.action_id(u0)?, self.action_id(u1)?))
    }

    /// All of `U²` in lexicographic index order.
    pub fn sequences(&self) -> impl Iterator<Item = SequencePair> + '_ {
        let m = self.actions.len();
        (0..m).flat_map(move |a| (0..m).map(move |b| SequencePair::new(ActionId(a), ActionId(b))))
    }

    pub fn to_raw(&self) -> RawInstance {
        RawInstance {
            dimension: self.dimension,
            lipschitz: self.lipschitz,
            initial_state: self.initial_state.clone(),
            actions: self.actions.clone(),
            transitions: self
                .actions
                .iter()
                .cloned()
                .zip(self.transitions.iter().cloned())
                .collect(),
        }
    }

    /// Same instance with one more transition appended to `F^(action)`.
    pub fn with_transition(&self, action: ActionId, t: Transition) -> Result<Self, InstanceError> {
        let mut raw = self.to_raw();
        raw.transitions[action.0].push(t);
        validate_instance(raw)
    }

    /// Every state (initial state, all `x` and `y`) shifted by `shift`.
    pub fn translated(&self, shift: &[f64]) -> Result<Self, InstanceError> {
        let mut raw = self.to_raw();
        raw.initial_state = raw.initial_state.translated(shift);
        for set in raw.transitions.values_mut() {
            for t in set.iter_mut() {
                t.x = t.x.translated(shift);
                t.y = t.y.translated(shift);
            }
        }
        validate_instance(raw)
    }

    /// Same data with different Lipschitz constants.
    pub fn with_lipschitz(&self, lipschitz: LipschitzPair) -> Result<Self, InstanceError> {
        let mut raw = self.to_raw();
        raw.lipschitz = lipschitz;
        validate_instance(raw)
    }
}

impl fmt::Display for SequencePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u0.0, self.u1.0)
    }
}

fn check_dim(v: &Vector, d: usize, context: impl FnOnce() -> String) -> Result<(), InstanceError> {
    if v.dim() != d {
        return Err(InstanceError::DimensionMismatch {
            context: context(),
            expected: d,
            found: v.dim(),
        });
    }
    if !v.is_finite() {
        return Err(InstanceError::NonFinite(context()));
    }
    Ok(())
}

/// Checks every instance invariant and re-indexes the transitions by action.
pub fn validate_instance(raw: RawInstance) -> Result<Instance, InstanceError> {
    let RawInstance {
        dimension,
        lipschitz,
        initial_state,
        actions,
        mut transitions,
    } = raw;

    if dimension == 0 {
        return Err(InstanceError::DimensionMismatch {
            context: "dimension".into(),
            expected: 1,
            found: 0,
        });
    }
    for (name, value) in [("lf", lipschitz.lf), ("lrho", lipschitz.lrho)] {
        if !(value > 0.0 && value.is_finite()) {
            return Err(InstanceError::NonPositiveLipschitz { name, value });
        }
    }
    check_dim(&initial_state, dimension, || "initial_state".into())?;

    let mut seen = HashSet::new();
    for a in &actions {
        if !seen.insert(a.as_str()) {
            return Err(InstanceError::DuplicateAction(a.clone()));
        }
    }
    if let Some(unknown) = transitions.keys().find(|k| !seen.contains(k.as_str())) {
        return Err(InstanceError::UnknownAction(unknown.clone()));
    }

    let mut indexed = Vec::with_capacity(actions.len());
    for a in &actions {
        let set = transitions.swap_remove(a).unwrap_or_default();
        if set.is_empty() {
            return Err(InstanceError::EmptyTransitionSet { action: a.clone() });
        }
        for (k, t) in set.iter().enumerate() {
            check_dim(&t.x, dimension, || format!("transitions[{a:?}][{k}].x"))?;
            check_dim(&t.y, dimension, || format!("transitions[{a:?}][{k}].y"))?;
            if !t.r.is_finite() {
                return Err(InstanceError::NonFinite(format!("transitions[{a:?}][{k}].r")));
            }
        }
        indexed.push(set);
    }

    Ok(Instance {
        dimension,
        lipschitz,
        initial_state,
        actions,
        transitions: indexed,
    })
}

pub fn load_instance(text: &str) -> Result<Instance, InstanceError> {
    let raw: RawInstance = serde_json::from_str(text).map_err(|e| InstanceError::ParseError {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    validate_instance(raw)
}

pub fn save_instance(instance: &Instance) -> String {
    serde_json::to_string_pretty(&instance.to_raw()).expect("instance serializes")
}
