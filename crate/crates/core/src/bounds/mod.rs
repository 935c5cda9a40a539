//! Lower- and upper-bounding pipeline.
//!
//! Bounds are cheap compared to exact search and close many instances
//! outright: the pipeline runs techniques of increasing cost and stops as
//! soon as the lower and upper bound meet.

mod lift;
mod local_search;
mod subset_sum;

pub use lift::{lift_lower_bound, lift_subinstances, LiftMode, LiftSubInstance};
pub use local_search::{mss, s4};
pub use subset_sum::subset_sum_best;

use crate::budget::{Budget, BudgetMeter};
use crate::instance::{DecisionInstance, Instance, Schedule};

/// A lower/upper bound pair with an optional witness schedule whose makespan
/// equals the upper bound.
#[derive(Debug, Clone)]
pub struct Bounds {
    pub lower: u64,
    pub upper: u64,
    pub witness: Option<Schedule>,
}

impl Bounds {
    /// True when the bounds prove optimality without search.
    pub fn tight(&self) -> bool {
        self.lower == self.upper
    }
}

/// Handle to an exact solver, used to solve lifting sub-instances.
pub trait ExactSolver {
    /// Proven optimum of `instance`, or `None` when the budget ran out.
    fn optimum_within(&self, instance: &Instance, budget: Budget) -> Option<u64>;
}

impl<F> ExactSolver for F
where
    F: Fn(&Instance, Budget) -> Option<u64>,
{
    fn optimum_within(&self, instance: &Instance, budget: Budget) -> Option<u64> {
        self(instance, budget)
    }
}

/// Classic lower bound: the average load rounded up, the largest job, and —
/// when some machine must take two jobs — the smallest such pair.
pub fn trivial_lower_bound(instance: &Instance) -> u64 {
    let m = instance.machines();
    let mut lower = instance
        .total_work()
        .div_ceil(m as u64)
        .max(instance.weight(0));
    if instance.jobs() > m {
        lower = lower.max(instance.weight(m - 1) + instance.weight(m));
    }
    lower
}

/// Longest-processing-time-first list scheduling: each job, in non-increasing
/// duration order, goes to the currently least loaded machine (ties broken by
/// machine index).
pub fn lpt(instance: &Instance) -> Schedule {
    let m = instance.machines();
    let mut loads = vec![0u64; m];
    let mut assignment = Vec::with_capacity(instance.jobs());
    for job in 0..instance.jobs() {
        let target = (0..m).min_by_key(|&x| (loads[x], x)).unwrap();
        loads[target] += instance.weight(job);
        assignment.push(target);
    }
    Schedule::new(instance, assignment).expect("list schedule is valid")
}

/// List scheduling with an exact-fit shortcut, for the decision question
/// "makespan <= bound?".
///
/// Before each list step, if some machine's remaining space equals the next
/// job's duration exactly, the job goes there (lowest such machine);
/// otherwise it goes to the least loaded machine. Fails as soon as a job does
/// not fit under the bound.
pub fn lpt_pp(decision: DecisionInstance<'_>) -> Option<Schedule> {
    let instance = decision.instance;
    let bound = decision.bound;
    let m = instance.machines();
    let mut loads = vec![0u64; m];
    let mut assignment = Vec::with_capacity(instance.jobs());
    for job in 0..instance.jobs() {
        let w = instance.weight(job);
        let exact_fit = (0..m).find(|&x| bound - loads[x] == w);
        let target = match exact_fit {
            Some(x) => x,
            None => {
                let x = (0..m).min_by_key(|&x| (loads[x], x)).unwrap();
                if loads[x] + w > bound {
                    return None;
                }
                x
            }
        };
        loads[target] += w;
        assignment.push(target);
    }
    Some(Schedule::new(instance, assignment).expect("list schedule is valid"))
}

/// Greedy machine-by-machine packing via subset sums, for the decision
/// question "makespan <= bound?".
///
/// Fills machines in index order, each with a still-unassigned subset of
/// maximum total duration under the bound; succeeds iff no job remains after
/// the last machine.
pub fn ms_pp(decision: DecisionInstance<'_>) -> Option<Schedule> {
    let instance = decision.instance;
    let mut assignment = vec![usize::MAX; instance.jobs()];
    let mut unassigned: Vec<usize> = (0..instance.jobs()).collect();
    for machine in 0..instance.machines() {
        if unassigned.is_empty() {
            break;
        }
        let weights: Vec<u64> = unassigned.iter().map(|&j| instance.weight(j)).collect();
        let (_, chosen) = subset_sum_best(&weights, decision.bound);
        // Remove in descending position order to keep indices stable.
        for &k in chosen.iter().rev() {
            assignment[unassigned[k]] = machine;
            unassigned.remove(k);
        }
    }
    if !unassigned.is_empty() {
        return None;
    }
    Some(Schedule::new(instance, assignment).expect("all jobs were assigned"))
}

/// Decision heuristics usable in [`search_upper_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heuristic {
    LptPp,
    MsPp,
}

impl Heuristic {
    fn attempt(self, instance: &Instance, bound: u64) -> Option<Schedule> {
        let decision = instance.decision(bound);
        match self {
            Heuristic::LptPp => lpt_pp(decision),
            Heuristic::MsPp => ms_pp(decision),
        }
    }
}

/// Probing below this gap is a plain ascending scan; above it, bisection.
const LINEAR_SCAN_LIMIT: u64 = 4096;

/// Probes candidate makespans in `[lower, upper_init]` with a decision
/// heuristic and returns the best upper bound established.
///
/// For small ranges the scan is ascending and stops at the first success;
/// large ranges are bisected, treating heuristic success as if it were
/// monotone in the bound (any success yields a valid bound either way, so
/// this only affects quality). The result is never worse than `upper_init`;
/// `upper_init` must itself be a valid upper bound. Each probe consumes one
/// unit of `probes`.
pub fn search_upper_bound(
    instance: &Instance,
    lower: u64,
    upper_init: u64,
    heuristic: Heuristic,
    probes: &mut BudgetMeter,
) -> Bounds {
    debug_assert!(lower <= upper_init);
    let mut best: Option<Schedule> = None;
    if upper_init - lower <= LINEAR_SCAN_LIMIT {
        for bound in lower..=upper_init {
            if !probes.take() {
                break;
            }
            if let Some(schedule) = heuristic.attempt(instance, bound) {
                best = Some(schedule);
                break;
            }
        }
    } else {
        let mut lo = lower;
        let mut hi = upper_init;
        while lo < hi {
            if !probes.take() {
                break;
            }
            let mid = lo + (hi - lo) / 2;
            match heuristic.attempt(instance, mid) {
                Some(schedule) => {
                    hi = schedule.makespan();
                    best = Some(schedule);
                }
                None => lo = mid + 1,
            }
        }
    }
    Bounds {
        lower,
        upper: best.as_ref().map_or(upper_init, Schedule::makespan),
        witness: best,
    }
}

/// Budget shares of the pipeline stages, cheap to expensive.
const LIFT_SHARE: u32 = 10;
const LPT_PP_SHARE: u32 = 15;
const MS_PP_SHARE: u32 = 15;
const S4_SHARE: u32 = 30;
const LIFT_PP_SHARE: u32 = 30;

/// Full bounding pipeline.
///
/// Always computes the trivial lower bound and an LPT schedule; with a
/// non-empty budget it then runs lifting, bound scans with both decision
/// heuristics, pair local search, and finally exact lifting, stopping as
/// soon as the bounds meet. Deterministic for unit budgets and a fixed seed.
pub fn compute_bounds(
    instance: &Instance,
    budget: Budget,
    seed: u64,
    solver: Option<&dyn ExactSolver>,
) -> Bounds {
    let start = lpt(instance);
    let mut bounds = Bounds {
        lower: trivial_lower_bound(instance),
        upper: start.makespan(),
        witness: Some(start),
    };
    debug_assert!(bounds.lower <= bounds.upper);
    if bounds.tight() {
        return bounds;
    }

    if !budget.slice(LIFT_SHARE).is_empty() {
        bounds.lower = bounds
            .lower
            .max(lift_lower_bound(instance, LiftMode::Lift, Budget::Units(0), None));
        if bounds.tight() {
            return bounds;
        }
    }

    for (share, heuristic) in [
        (LPT_PP_SHARE, Heuristic::LptPp),
        (MS_PP_SHARE, Heuristic::MsPp),
    ] {
        let slice = budget.slice(share);
        if slice.is_empty() {
            continue;
        }
        let mut probes = BudgetMeter::start(slice);
        let found =
            search_upper_bound(instance, bounds.lower, bounds.upper, heuristic, &mut probes);
        if found.upper < bounds.upper {
            bounds.upper = found.upper;
            bounds.witness = found.witness;
        }
        if bounds.tight() {
            return bounds;
        }
    }

    let s4_slice = budget.slice(S4_SHARE);
    if !s4_slice.is_empty() {
        let witness = bounds.witness.as_ref().expect("pipeline keeps a witness");
        let found = s4(instance, witness, bounds.lower, s4_slice, seed);
        if found.upper < bounds.upper {
            bounds.upper = found.upper;
            bounds.witness = found.witness;
        }
        if bounds.tight() {
            return bounds;
        }
    }

    let lift_pp_slice = budget.slice(LIFT_PP_SHARE);
    if !lift_pp_slice.is_empty() && solver.is_some() {
        bounds.lower = bounds.lower.max(lift_lower_bound(
            instance,
            LiftMode::LiftPlusPlus,
            lift_pp_slice,
            solver,
        ));
        debug_assert!(bounds.lower <= bounds.upper);
    }
    bounds
}
