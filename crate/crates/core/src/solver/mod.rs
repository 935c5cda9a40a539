//! Branch-and-bound search for the exact optimum.
//!
//! The search answers decision questions "can the current partial assignment
//! be completed with makespan at most `U`?" and solves the optimization
//! problem by maintaining the best schedule found (makespan `U + 1`) while
//! searching under `U`; every improvement tightens `U` and the search
//! continues inside the same recursion until exhaustion proves optimality.
//!
//! Pruning is layered and individually toggleable:
//!
//! * machine symmetries — identical loads, or identical equivalence ids from
//!   the [range table](crate::ret) (which subsumes the load rule);
//! * interchangeable equal jobs and the fewer-jobs-than-machines rule;
//! * dedicated base cases for three remaining jobs, a single remaining
//!   duration, an optional two-duration dynamic program, and greedy
//!   completion once only droppable jobs remain;
//! * the fill-up rule: when a machine's load is equivalent to the fullest
//!   admissible load for the next job, that one branch suffices, and a bound
//!   improvement deep inside it can be returned without re-search;
//! * a memo of explored states keyed by sorted equivalence ids, which prunes
//!   revisits of equivalent dead-ends.

mod search;
mod two_duration;

pub use two_duration::{two_duration_feasible, TwoDurationSplit};

use std::time::{Duration, Instant};

use crate::bounds::{lpt, trivial_lower_bound, Bounds, ExactSolver};
use crate::budget::Budget;
use crate::instance::{Instance, Schedule};
use crate::ret::{compute_irrelevance, Ret, DEFAULT_MEMORY_CAP};
use search::{Mode, Search};

/// Default cap on memoized states.
pub const DEFAULT_STATE_MEMO_CAP: usize = 1 << 26;

/// Toggles and resource limits for one solve.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Classic dominance rules: identical-load merging, equal-job ordering,
    /// the three-jobs-left base case, and fewer-jobs-than-machines.
    pub base_rules: bool,
    /// Slot-counting base case when all remaining durations are equal.
    pub equal_duration_rule: bool,
    /// Merge machines whose loads share a range-table id (subsumes the
    /// identical-load rule).
    pub equivalence_rule: bool,
    /// The fill-up rule.
    pub fill_up_rule: bool,
    /// Accept a fill-up improvement without re-searching the node when the
    /// new optimum exceeds the filled machine's load.
    pub fill_up_shortcut: bool,
    /// Drop smallest jobs that any completion can re-add greedily.
    pub irrelevance: bool,
    /// Memoize explored states and prune revisits.
    pub state_memo: bool,
    /// Two-duration dynamic-program base case.
    pub two_duration_dp: bool,
    pub budget: Budget,
    pub state_memo_cap: usize,
    pub ret_memory_cap: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Preset::Cdsm.config()
    }
}

impl SolverConfig {
    /// Applies flag implications: the state memo needs equivalence ids.
    pub fn normalized(&self) -> Self {
        let mut config = self.clone();
        if config.state_memo {
            config.equivalence_rule = true;
        }
        config
    }

    /// True when any enabled rule needs the range table.
    fn needs_ret(&self) -> bool {
        self.equivalence_rule || self.fill_up_rule || self.state_memo
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }
}

/// Cumulative rule sets, each extending the previous one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Classic rules only.
    Base,
    /// Plus the single-duration base case.
    R5,
    /// Plus range-table machine merging.
    R6,
    /// Plus the fill-up rule.
    Fur,
    /// Plus irrelevant-job elimination.
    Irr,
    /// Plus the explored-state memo.
    Cdsm,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Base,
        Preset::R5,
        Preset::R6,
        Preset::Fur,
        Preset::Irr,
        Preset::Cdsm,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Base => "base",
            Preset::R5 => "r5",
            Preset::R6 => "r6",
            Preset::Fur => "fur",
            Preset::Irr => "irr",
            Preset::Cdsm => "cdsm",
        }
    }

    pub fn from_name(name: &str) -> Option<Preset> {
        Preset::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn config(&self) -> SolverConfig {
        let level = *self as usize;
        SolverConfig {
            base_rules: true,
            equal_duration_rule: level >= Preset::R5 as usize,
            equivalence_rule: level >= Preset::R6 as usize,
            fill_up_rule: level >= Preset::Fur as usize,
            fill_up_shortcut: level >= Preset::Fur as usize,
            irrelevance: level >= Preset::Irr as usize,
            state_memo: level >= Preset::Cdsm as usize,
            two_duration_dp: false,
            budget: Budget::Unlimited,
            state_memo_cap: DEFAULT_STATE_MEMO_CAP,
            ret_memory_cap: DEFAULT_MEMORY_CAP,
        }
    }
}

/// Per-solve counters.
#[derive(Debug, Clone, Default)]
pub struct SolveStats {
    /// Calls into the search that passed the memo lookup.
    pub explored_nodes: u64,
    pub memo_hits: u64,
    pub memo_stores: u64,
    pub fill_up_applications: u64,
    /// Times a better schedule replaced the incumbent.
    pub improvements: u64,
    pub last_three_applications: u64,
    pub equal_duration_applications: u64,
    pub two_duration_applications: u64,
    /// Greedy completions: droppable tails and exhausted-prefix leaves.
    pub tail_completions: u64,
    pub infeasibility_prunes: u64,
    pub ret_rebuilds: u64,
    /// The table exceeded its memory cap and dependent rules were disabled.
    pub ret_disabled: bool,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// The schedule is a proven optimum.
    Optimal,
    /// The budget ran out; the schedule is the best found so far.
    Timeout,
}

/// Result of an optimization solve.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub makespan: u64,
    pub schedule: Schedule,
    pub initial_lower: u64,
    pub initial_upper: u64,
    pub stats: SolveStats,
}

/// Result of a decision solve.
#[derive(Debug, Clone)]
pub enum DecisionOutcome {
    Feasible(Schedule),
    Infeasible,
    Timeout,
}

#[derive(Debug, Clone)]
pub struct DecisionResult {
    pub outcome: DecisionOutcome,
    pub stats: SolveStats,
}

/// Greedy completion for a single remaining duration.
///
/// Feasibility is exactly the slot count `sum_x (bound - load_x) / duration
/// >= count`; when it holds, each job goes to the lowest-index machine that
/// still fits it, and the returned machine list realizes the completion.
pub fn equal_duration_completion(
    loads: &[u64],
    bound: u64,
    duration: u64,
    count: usize,
) -> Option<Vec<usize>> {
    assert!(duration > 0);
    let slots: u64 = loads
        .iter()
        .filter(|&&load| load <= bound)
        .map(|&load| (bound - load) / duration)
        .sum();
    if slots < count as u64 {
        return None;
    }
    let mut loads = loads.to_vec();
    let mut picks = Vec::with_capacity(count);
    for _ in 0..count {
        let x = (0..loads.len())
            .find(|&x| loads[x] <= bound && bound - loads[x] >= duration)
            .expect("slot count guarantees a fit");
        loads[x] += duration;
        picks.push(x);
    }
    Some(picks)
}

/// Solves the optimization problem starting from precomputed bounds.
///
/// The witness seeds the incumbent (falling back to a list schedule when
/// absent) and the search runs under `makespan - 1`. Tight bounds return
/// without exploring a node; an exhausted budget returns the best schedule
/// found so far as [`SolveStatus::Timeout`].
pub fn solve_optimal(instance: &Instance, bounds: &Bounds, config: &SolverConfig) -> SolveResult {
    let started = Instant::now();
    let config = config.normalized();
    let mut stats = SolveStats::default();

    let mut best = match &bounds.witness {
        Some(witness) => witness.clone(),
        None => lpt(instance),
    };
    let initial_upper = best.makespan();
    let lower = bounds.lower.min(initial_upper);
    let initial_lower = lower;

    let finish = |status, best: Schedule, mut stats: SolveStats| {
        stats.elapsed = started.elapsed();
        SolveResult {
            status,
            makespan: best.makespan(),
            schedule: best,
            initial_lower,
            initial_upper,
            stats,
        }
    };

    if best.makespan() == lower {
        return finish(SolveStatus::Optimal, best, stats);
    }
    if config.budget.is_empty() {
        return finish(SolveStatus::Timeout, best, stats);
    }

    let mut bound = best.makespan() - 1;
    let n = instance.jobs();
    let mut rho = if config.irrelevance {
        compute_irrelevance(instance, bound)
    } else {
        n
    };
    // With every job droppable, the greedy completion of the empty
    // assignment already beats the bound; repeat until some job survives.
    while rho == 0 {
        let completion = lpt(instance);
        debug_assert!(completion.makespan() <= bound);
        stats.improvements += 1;
        best = completion;
        if best.makespan() == lower {
            return finish(SolveStatus::Optimal, best, stats);
        }
        bound = best.makespan() - 1;
        rho = compute_irrelevance(instance, bound);
    }

    let mut search = Search::new(
        instance,
        config,
        Mode::Optimize,
        Some(best),
        bound,
        lower,
        rho,
        stats,
    );
    let interrupted = search.run().is_err();
    let (best, stats) = search.into_parts();
    let status = if interrupted {
        SolveStatus::Timeout
    } else {
        SolveStatus::Optimal
    };
    finish(status, best.expect("optimization always has an incumbent"), stats)
}

/// Decides whether a schedule with makespan at most `bound` exists,
/// returning a witness when it does.
pub fn solve_decision(instance: &Instance, bound: u64, config: &SolverConfig) -> DecisionResult {
    let started = Instant::now();
    let config = config.normalized();
    let mut stats = SolveStats::default();

    let done = |outcome, mut stats: SolveStats| {
        stats.elapsed = started.elapsed();
        DecisionResult { outcome, stats }
    };

    if config.budget.is_empty() {
        return done(DecisionOutcome::Timeout, stats);
    }
    let n = instance.jobs();
    let rho = if config.irrelevance {
        compute_irrelevance(instance, bound)
    } else {
        n
    };
    if rho == 0 {
        let completion = lpt(instance);
        debug_assert!(completion.makespan() <= bound);
        stats.improvements += 1;
        return done(DecisionOutcome::Feasible(completion), stats);
    }

    let mut search = Search::new(
        instance,
        config,
        Mode::Decide,
        None,
        bound,
        0,
        rho,
        stats,
    );
    let run = search.run();
    let (best, stats) = search.into_parts();
    let outcome = match run {
        Err(_) => DecisionOutcome::Timeout,
        Ok(true) => DecisionOutcome::Feasible(best.expect("a feasible run records a witness")),
        Ok(false) => DecisionOutcome::Infeasible,
    };
    done(outcome, stats)
}

pub(crate) fn build_ret_or_degrade(
    instance: &Instance,
    bound: u64,
    rho: usize,
    config: &mut SolverConfig,
    stats: &mut SolveStats,
) -> Option<Ret> {
    if !config.needs_ret() {
        return None;
    }
    match Ret::build(instance, bound, rho, config.ret_memory_cap) {
        Ok(ret) => Some(ret),
        Err(error) => {
            log::warn!("range table unavailable ({error}); disabling dependent rules");
            stats.ret_disabled = true;
            config.equivalence_rule = false;
            config.fill_up_rule = false;
            config.state_memo = false;
            None
        }
    }
}

/// An [`ExactSolver`] handle backed by this search, for lifting
/// sub-instances inside the bounding pipeline.
#[derive(Debug, Clone, Default)]
pub struct CdsmSolver {
    pub config: SolverConfig,
}

impl ExactSolver for CdsmSolver {
    fn optimum_within(&self, instance: &Instance, budget: Budget) -> Option<u64> {
        let config = self.config.clone().with_budget(budget);
        let bounds = Bounds {
            lower: trivial_lower_bound(instance),
            upper: lpt(instance).makespan(),
            witness: Some(lpt(instance)),
        };
        let result = solve_optimal(instance, &bounds, &config);
        (result.status == SolveStatus::Optimal).then_some(result.makespan)
    }
}
