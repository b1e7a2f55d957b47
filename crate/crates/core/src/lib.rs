//! Lower bounds for two-stage min-max generalization in deterministic
//! Lipschitz systems learned from a batch of transitions.
//!
//! Given sampled transitions `(x, r, y)` for every action, Lipschitz constants
//! of the unknown dynamics and reward, and an initial state, the crate
//! computes three lower bounds on the worst-case return of a two-step action
//! sequence: the chained-transition bound ([`stage_bounds::cgrl_bound`]), the
//! trust-region bound ([`stage_bounds::tr_bound`]) and the Lagrangian dual
//! bound ([`lagrangian::ld_bound`]). They satisfy `cgrl <= tr <= ld`.

pub mod benchmark;
pub mod cli;
pub mod instance;
pub mod lagrangian;
pub mod mnbc;
pub mod oracle;
pub mod report;
pub mod stage_bounds;
pub mod vector;

pub use instance::{load_instance, save_instance, Instance, InstanceError, SequencePair, Transition};
pub use lagrangian::{ld_bound, solve_dual, SolverConfig};
pub use report::{BoundReport, Method};
