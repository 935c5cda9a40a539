//! Exact solver for `P||Cmax`: schedule `n` jobs with known integer
//! durations on `m` identical machines so that the maximum machine load (the
//! makespan) is minimal.
//!
//! The crate is organized around the decision question "does a schedule with
//! makespan at most `U` exist?":
//!
//! * [`instance`] — problem model, schedules, partial assignments, and an
//!   exhaustive reference solver for small instances.
//! * [`bounds`] — lower and upper bounding pipeline (trivial bounds, list
//!   scheduling, subset-sum heuristics, local search, and bound lifting over
//!   structured sub-instances).
//! * [`ret`] — the range equivalency table, an implicit oracle for "these two
//!   machine loads admit exactly the same completions".
//! * [`solver`] — the branch-and-bound search with dominance rules, the
//!   fill-up rule, and conflict-driven memoization of explored states.

pub mod bounds;
pub mod budget;
pub mod instance;
pub mod ret;
pub mod rng;
pub mod solver;

pub use budget::{Budget, BudgetMeter};
pub use instance::{
    brute_force_optimum, validate_schedule, DecisionInstance, Instance, InstanceError,
    PartialAssignment, Schedule,
};
