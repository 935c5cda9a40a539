//! Lower-bound lifting over structured sub-instances.
//!
//! In any feasible schedule there are `alpha` machines that together process
//! at least `lambda_alpha(n, m)` jobs. Restricting to the `beta` largest jobs
//! and keeping the `lambda_alpha(beta, m)` smallest of them on `alpha`
//! machines therefore yields a sub-instance whose lower bounds are valid for
//! the original instance. Only `beta = gamma * m + alpha` needs to be
//! considered, so O(n) sub-instances arise in total.

use super::{lpt, trivial_lower_bound, ExactSolver};
use crate::budget::Budget;
use crate::instance::Instance;

/// One lifting sub-instance: the `jobs` (sorted non-increasingly) on `alpha`
/// machines, derived from the `beta` largest jobs of the parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftSubInstance {
    pub alpha: usize,
    pub beta: usize,
    pub jobs: Vec<u64>,
}

impl LiftSubInstance {
    pub fn instance(&self) -> Instance {
        Instance::from_sorted(self.jobs.clone(), self.alpha)
            .expect("lift sub-instances are non-empty and sorted")
    }
}

/// Guaranteed number of jobs on some `alpha` machines when `n` jobs run on
/// `m` machines.
fn lambda(alpha: usize, n: usize, m: usize) -> usize {
    alpha * (n / m) + alpha.min(n - (n / m) * m)
}

/// All lifting sub-instances of `instance`.
pub fn lift_subinstances(instance: &Instance) -> Vec<LiftSubInstance> {
    let n = instance.jobs();
    let m = instance.machines();
    let mut subs = Vec::new();
    for alpha in 1..=m {
        let max_gamma = if n > alpha { (n - alpha) / m } else { 0 };
        for gamma in 1..=max_gamma {
            let beta = gamma * m + alpha;
            let take = lambda(alpha, beta, m);
            debug_assert!(take >= 1 && take <= beta);
            let jobs = instance.weights()[beta - take..beta].to_vec();
            subs.push(LiftSubInstance { alpha, beta, jobs });
        }
    }
    subs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftMode {
    /// Bound every sub-instance heuristically.
    Lift,
    /// Additionally solve promising sub-instances exactly.
    LiftPlusPlus,
}

/// Lifted lower bound for `instance`.
///
/// The base value is the trivial bound of the instance itself, maximized with
/// the trivial bound of every sub-instance. In [`LiftMode::LiftPlusPlus`],
/// sub-instances whose quick upper bound (one LPT run) exceeds the current
/// best are solved exactly, splitting `budget` evenly among them; solves that
/// run out of budget simply keep the heuristic bound.
pub fn lift_lower_bound(
    instance: &Instance,
    mode: LiftMode,
    budget: Budget,
    solver: Option<&dyn ExactSolver>,
) -> u64 {
    let mut lower = trivial_lower_bound(instance);
    let subs = lift_subinstances(instance);
    let sub_instances: Vec<Instance> = subs.iter().map(|s| s.instance()).collect();
    for sub in &sub_instances {
        lower = lower.max(trivial_lower_bound(sub));
    }

    if mode == LiftMode::Lift || budget.is_empty() {
        return lower;
    }
    let Some(solver) = solver else {
        return lower;
    };

    let candidates: Vec<&Instance> = sub_instances
        .iter()
        .filter(|sub| lpt(sub).makespan() > lower)
        .collect();
    if candidates.is_empty() {
        return lower;
    }
    let per_candidate = budget.divide(candidates.len() as u64);
    for sub in candidates {
        if lpt(sub).makespan() <= lower {
            continue;
        }
        if let Some(optimum) = solver.optimum_within(sub, per_candidate) {
            lower = lower.max(optimum);
        }
    }
    lower
}
