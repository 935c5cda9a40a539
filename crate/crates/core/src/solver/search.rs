//! The recursive search.
//!
//! One `Search` owns the entire mutable state of a solve: the partial
//! assignment, the incumbent, the current decision bound, the range table and
//! the state memo. `node` explores the subtree under the current partial
//! assignment and returns whether it improved the incumbent to a completion
//! within the bound that held at entry; when it returns, the incumbent is an
//! optimal completion of that partial assignment.
//!
//! A node runs passes in a loop: each pass either proves the subtree
//! exhausted under the current bound or improves the incumbent, which
//! tightens the bound and requires a fresh pass because every pruning rule
//! depends on it. Gists are stored only when the final pass exhausted the
//! subtree, so a stored state always means "not completable within the bound
//! valid at storage time" (and, a fortiori, any smaller bound).

use std::collections::HashSet;

use crate::budget::BudgetMeter;
use crate::instance::{Instance, PartialAssignment, Schedule};
use crate::ret::{compute_irrelevance, Ret, RetUpdate};

use super::two_duration::two_duration_feasible;
use super::{build_ret_or_degrade, equal_duration_completion, SolveStats, SolverConfig};

/// Work guard for the two-duration program: skip when `count^2 * machines`
/// exceeds this.
const TWO_DURATION_WORK_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum Mode {
    /// Tighten the incumbent until exhaustion proves it optimal.
    Optimize,
    /// Stop at the first completion within the fixed bound.
    Decide,
}

/// The budget ran out; unwind and report the best schedule so far.
pub(super) struct Interrupted;

enum Pass {
    /// The incumbent improved; the node must be searched again under the
    /// tightened bound.
    Improved,
    /// No completion within the current bound exists below this node.
    Exhausted,
    /// The incumbent improved and the fill-up argument already proves it
    /// optimal for this node; no re-search is needed.
    ImprovedAndProven,
}

struct StateMemo {
    set: HashSet<Vec<u32>>,
    cap: usize,
}

impl StateMemo {
    fn contains(&self, key: &[u32]) -> bool {
        self.set.contains(key)
    }

    /// Inserts unless the cap is reached; lookups continue either way.
    fn store(&mut self, key: Vec<u32>) -> bool {
        if self.set.len() < self.cap {
            self.set.insert(key)
        } else {
            false
        }
    }

    fn clear(&mut self) {
        self.set.clear();
    }
}

pub(super) struct Search<'a> {
    instance: &'a Instance,
    config: SolverConfig,
    mode: Mode,
    best: Option<Schedule>,
    /// Current decision bound; in optimize mode the incumbent's makespan is
    /// always `bound + 1`.
    bound: u64,
    /// Proven lower bound; an incumbent reaching it ends the search.
    lower: u64,
    /// Jobs `rho..n` can be dropped and re-added greedily under `bound`.
    rho: usize,
    ret: Option<Ret>,
    memo: Option<StateMemo>,
    partial: PartialAssignment,
    fur_assigned: Vec<bool>,
    /// `prefix_work[k]` = total duration of jobs `0..k`.
    prefix_work: Vec<u64>,
    meter: BudgetMeter,
    stats: SolveStats,
    stop: bool,
}

impl<'a> Search<'a> {
    #[allow(clippy::too_many_arguments)]
    pub(super) fn new(
        instance: &'a Instance,
        mut config: SolverConfig,
        mode: Mode,
        best: Option<Schedule>,
        bound: u64,
        lower: u64,
        rho: usize,
        mut stats: SolveStats,
    ) -> Self {
        let ret = build_ret_or_degrade(instance, bound, rho, &mut config, &mut stats);
        let memo = config.state_memo.then(|| StateMemo {
            set: HashSet::new(),
            cap: config.state_memo_cap,
        });
        let mut prefix_work = Vec::with_capacity(instance.jobs() + 1);
        prefix_work.push(0);
        for job in 0..instance.jobs() {
            prefix_work.push(prefix_work[job] + instance.weight(job));
        }
        Self {
            instance,
            meter: BudgetMeter::start(config.budget),
            config,
            mode,
            best,
            bound,
            lower,
            rho,
            ret,
            memo,
            partial: PartialAssignment::new(instance),
            fur_assigned: vec![false; instance.jobs()],
            prefix_work,
            stats,
            stop: false,
        }
    }

    pub(super) fn run(&mut self) -> Result<bool, Interrupted> {
        self.node()
    }

    pub(super) fn into_parts(self) -> (Option<Schedule>, SolveStats) {
        (self.best, self.stats)
    }

    fn node(&mut self) -> Result<bool, Interrupted> {
        if self.memo.is_some() {
            if let Some(key) = self.state_key() {
                if self.memo.as_ref().unwrap().contains(&key) {
                    self.stats.memo_hits += 1;
                    return Ok(false);
                }
            }
        }
        self.stats.explored_nodes += 1;
        if !self.meter.take() {
            return Err(Interrupted);
        }

        let mut improved = false;
        let fully_explored = loop {
            if self.stop {
                break false;
            }
            match self.pass()? {
                Pass::Improved => improved = true,
                Pass::Exhausted => break true,
                Pass::ImprovedAndProven => {
                    improved = true;
                    break true;
                }
            }
        };

        if fully_explored {
            if let Some(key) = self.state_key() {
                if let Some(memo) = &mut self.memo {
                    if memo.store(key) {
                        self.stats.memo_stores += 1;
                    }
                }
            }
        }
        Ok(improved)
    }

    /// One full exploration attempt under the current bound.
    fn pass(&mut self) -> Result<Pass, Interrupted> {
        let depth = self.partial.depth();
        // A node can go stale when the bound decreased under it.
        if self.partial.max_load() > self.bound {
            self.stats.infeasibility_prunes += 1;
            return Ok(Pass::Exhausted);
        }
        if depth >= self.rho {
            self.stats.tail_completions += 1;
            let schedule = self.finish_schedule(&[]);
            return Ok(self.improve(schedule));
        }
        if self.space_infeasible(depth) {
            self.stats.infeasibility_prunes += 1;
            return Ok(Pass::Exhausted);
        }
        if self.config.base_rules && self.rho - depth == 3 {
            return Ok(self.last_three(depth));
        }
        if self.config.two_duration_dp {
            if let Some(pass) = self.two_duration(depth) {
                return Ok(pass);
            }
        }
        if self.config.equal_duration_rule
            && self.instance.weight(depth) == self.instance.weight(self.rho - 1)
        {
            return Ok(self.equal_duration(depth));
        }
        if self.config.fill_up_rule && self.ret.is_some() {
            if let Some(machine) = self.fill_up_candidate(depth) {
                return self.fill_up(depth, machine);
            }
        }
        self.branch(depth)
    }

    /// Sorted equivalence ids of the machine loads plus the next job index;
    /// `None` whenever the memo key would be undefined.
    fn state_key(&self) -> Option<Vec<u32>> {
        if !self.config.state_memo {
            return None;
        }
        let ret = self.ret.as_ref()?;
        let depth = self.partial.depth();
        if depth >= self.rho {
            return None;
        }
        let loads = self.partial.loads();
        if loads.iter().any(|&load| load > self.bound) {
            return None;
        }
        let mut key: Vec<u32> = loads.iter().map(|&load| ret.id_fast(depth, load)).collect();
        key.sort_unstable();
        key.push(depth as u32);
        Some(key)
    }

    fn space_infeasible(&self, depth: usize) -> bool {
        let smallest = self.instance.weight(self.rho - 1);
        let remaining_work = self.prefix_work[self.rho] - self.prefix_work[depth];
        insufficient_free_space(self.partial.loads(), self.bound, smallest, remaining_work)
    }

    /// Base case once only droppable jobs remain (which includes plain
    /// leaves): greedy completion always fits.
    fn finish_schedule(&self, extension: &[usize]) -> Schedule {
        let depth = self.partial.depth();
        let n = self.instance.jobs();
        let mut assignment = self.partial.decisions().to_vec();
        assignment.extend_from_slice(extension);
        let mut loads = self.partial.loads().to_vec();
        for (offset, &machine) in extension.iter().enumerate() {
            loads[machine] += self.instance.weight(depth + offset);
        }
        for job in depth + extension.len()..n {
            let target = (0..loads.len())
                .min_by_key(|&x| (loads[x], x))
                .expect("at least one machine");
            loads[target] += self.instance.weight(job);
            assignment.push(target);
        }
        let schedule =
            Schedule::new(self.instance, assignment).expect("completion assigns every job");
        debug_assert!(
            schedule.makespan() <= self.bound,
            "droppable jobs must fit greedily"
        );
        schedule
    }

    /// Exactly three relevant jobs remain: place each on the least loaded
    /// machine, or place the first on the second least loaded instead; no
    /// other completion needs to be considered.
    fn last_three(&mut self, depth: usize) -> Pass {
        self.stats.last_three_applications += 1;
        let weights = [
            self.instance.weight(depth),
            self.instance.weight(depth + 1),
            self.instance.weight(depth + 2),
        ];
        let loads = self.partial.loads();
        let m = loads.len();
        let run_option = |second_least_first: bool| -> (u64, [usize; 3]) {
            let mut sim = loads.to_vec();
            let mut picks = [0usize; 3];
            for (k, &w) in weights.iter().enumerate() {
                let target = if k == 0 && second_least_first {
                    let mut order: Vec<usize> = (0..m).collect();
                    order.sort_unstable_by_key(|&x| (sim[x], x));
                    order[1]
                } else {
                    (0..m).min_by_key(|&x| (sim[x], x)).unwrap()
                };
                sim[target] += w;
                picks[k] = target;
            }
            (sim.iter().copied().max().unwrap(), picks)
        };

        let (mut best_makespan, mut best_picks) = run_option(false);
        if m >= 2 {
            let (alt_makespan, alt_picks) = run_option(true);
            if alt_makespan < best_makespan {
                best_makespan = alt_makespan;
                best_picks = alt_picks;
            }
        }
        if best_makespan > self.bound {
            return Pass::Exhausted;
        }
        let schedule = self.finish_schedule(&best_picks);
        self.improve(schedule)
    }

    /// All relevant remaining jobs share one duration: slot counting decides
    /// feasibility outright.
    fn equal_duration(&mut self, depth: usize) -> Pass {
        self.stats.equal_duration_applications += 1;
        let duration = self.instance.weight(depth);
        let count = self.rho - depth;
        match equal_duration_completion(self.partial.loads(), self.bound, duration, count) {
            Some(picks) => {
                let schedule = self.finish_schedule(&picks);
                self.improve(schedule)
            }
            None => Pass::Exhausted,
        }
    }

    /// Exactly two distinct durations remain: the dynamic program decides
    /// feasibility. `None` when the situation does not apply.
    fn two_duration(&mut self, depth: usize) -> Option<Pass> {
        let weights = self.instance.weights();
        let high = weights[depth];
        let low = weights[self.rho - 1];
        if high == low {
            return None;
        }
        let split = depth + weights[depth..self.rho].partition_point(|&w| w > low);
        if weights[split - 1] != high {
            return None; // three or more distinct durations
        }
        let count_high = split - depth;
        let count_low = self.rho - split;
        let (dur_a, count_a, dur_b, count_b, a_is_high) = if count_high <= count_low {
            (high, count_high, low, count_low, true)
        } else {
            (low, count_low, high, count_high, false)
        };
        let machines = self.partial.loads().len() as u64;
        if (count_a as u64).pow(2) * machines > TWO_DURATION_WORK_CAP {
            return None;
        }
        self.stats.two_duration_applications += 1;
        match two_duration_feasible(
            self.partial.loads(),
            self.bound,
            dur_a,
            count_a,
            dur_b,
            count_b,
        ) {
            None => Some(Pass::Exhausted),
            Some(per_machine) => {
                let mut high_picks = Vec::with_capacity(count_high);
                let mut low_picks = Vec::with_capacity(count_low);
                for (machine, &(a, b)) in per_machine.iter().enumerate() {
                    let (h, l) = if a_is_high { (a, b) } else { (b, a) };
                    high_picks.extend(std::iter::repeat(machine).take(h));
                    low_picks.extend(std::iter::repeat(machine).take(l));
                }
                high_picks.extend(low_picks);
                let schedule = self.finish_schedule(&high_picks);
                Some(self.improve(schedule))
            }
        }
    }

    /// First machine, least loaded first, whose load is equivalent to the
    /// fullest load that still admits the next job.
    fn fill_up_candidate(&self, depth: usize) -> Option<usize> {
        let ret = self.ret.as_ref()?;
        let w = self.instance.weight(depth);
        if w > self.bound {
            return None;
        }
        let target = ret.id_fast(depth, self.bound - w);
        let loads = self.partial.loads();
        let mut order: Vec<usize> = (0..loads.len())
            .filter(|&x| loads[x] + w <= self.bound)
            .collect();
        order.sort_unstable_by_key(|&x| (loads[x], x));
        order
            .into_iter()
            .find(|&x| ret.id_fast(depth, loads[x]) == target)
    }

    /// The fill-up rule: assigning the job to `machine` is the only branch
    /// that needs exploring. When the recursion improves the incumbent to a
    /// makespan above the filled load, that improvement is already optimal
    /// for this node; otherwise the node is re-searched under the new bound.
    fn fill_up(&mut self, depth: usize, machine: usize) -> Result<Pass, Interrupted> {
        self.stats.fill_up_applications += 1;
        let load_before = self.partial.load(machine);
        let w = self.instance.weight(depth);
        let rho_before = self.rho;
        self.partial
            .apply(self.instance, machine)
            .expect("fill-up target fits");
        self.fur_assigned[depth] = true;
        let result = self.node();
        self.fur_assigned[depth] = false;
        self.partial.undo(self.instance).expect("depth is positive");
        if !result? {
            return Ok(Pass::Exhausted);
        }
        if self.stop {
            return Ok(Pass::Improved);
        }
        // The no-re-search shortcut transfers the child's optimality proof
        // through the fill-up swap argument. That argument lives in the
        // reduced instance, so it only carries over to the tightened bound
        // while the set of droppable jobs is unchanged; if jobs re-entered,
        // the node must be searched again under the new view.
        let new_makespan = self.bound + 1;
        if self.config.fill_up_shortcut
            && self.rho == rho_before
            && new_makespan > load_before + w
        {
            return Ok(Pass::ImprovedAndProven);
        }
        Ok(Pass::Improved)
    }

    /// General branching over the surviving candidate machines.
    fn branch(&mut self, depth: usize) -> Result<Pass, Interrupted> {
        for machine in self.candidate_machines(depth) {
            self.partial
                .apply(self.instance, machine)
                .expect("candidate fits");
            let result = self.node();
            self.partial.undo(self.instance).expect("depth is positive");
            if result? {
                // The bound moved; every rule must be re-derived.
                return Ok(Pass::Improved);
            }
        }
        Ok(Pass::Exhausted)
    }

    /// Machines worth branching on for the job at `depth`, least loaded
    /// first: fit filter, then the fewer-jobs-than-machines rule, the
    /// equal-jobs ordering rule, and finally one representative per
    /// equivalence class.
    ///
    /// When the ordering rule constrains this job, classes are formed by
    /// identical load only. Exchanging the futures of two equal-load
    /// machines never changes any load, so deeper ordering constraints can
    /// always be repaired by permuting equal jobs; the broader table-id
    /// merge exchanges futures between machines of different loads, which
    /// can strand a completion on the wrong side of the ordering chain (a
    /// class may straddle the previous job's machine with only its lower
    /// member surviving).
    fn candidate_machines(&self, depth: usize) -> Vec<usize> {
        let w = self.instance.weight(depth);
        let loads = self.partial.loads();
        let m = loads.len();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_unstable_by_key(|&x| (loads[x], x));
        order.retain(|&x| loads[x] + w <= self.bound);
        if self.config.base_rules {
            let remaining = self.rho - depth;
            if remaining < m {
                order.truncate(remaining);
            }
        }
        let mut order_constrained = false;
        if self.config.base_rules && depth >= 1 {
            let prev = depth - 1;
            if self.instance.weight(prev) == w && !self.fur_assigned[prev] {
                // Equal jobs are interchangeable, so their machine indices
                // can be assumed non-decreasing (matching the lowest-index
                // representative choice below).
                let prev_machine = self.partial.decisions()[prev];
                order.retain(|&x| x >= prev_machine);
                order_constrained = true;
            }
        }
        if self.config.equivalence_rule && self.ret.is_some() && !order_constrained {
            let ret = self.ret.as_ref().unwrap();
            let mut seen: Vec<u32> = Vec::with_capacity(order.len());
            order.retain(|&x| {
                let id = ret.id_fast(depth, loads[x]);
                if seen.contains(&id) {
                    false
                } else {
                    seen.push(id);
                    true
                }
            });
        } else if self.config.base_rules || self.config.equivalence_rule {
            let mut seen: Vec<u64> = Vec::with_capacity(order.len());
            order.retain(|&x| {
                if seen.contains(&loads[x]) {
                    false
                } else {
                    seen.push(loads[x]);
                    true
                }
            });
        }
        order
    }

    /// Records a completion within the current bound. In decide mode this
    /// ends the search; in optimize mode it tightens the bound, refreshes the
    /// relevance index and the table, and requests a re-search.
    fn improve(&mut self, schedule: Schedule) -> Pass {
        debug_assert!(schedule.makespan() <= self.bound);
        self.stats.improvements += 1;
        if self.mode == Mode::Decide {
            self.best = Some(schedule);
            self.stop = true;
            return Pass::Improved;
        }

        let makespan = schedule.makespan();
        debug_assert!(self
            .best
            .as_ref()
            .is_none_or(|b| makespan < b.makespan()));
        self.best = Some(schedule);
        if makespan <= self.lower {
            self.stop = true;
            return Pass::Improved;
        }
        self.bound = makespan - 1;
        let new_rho = if self.config.irrelevance {
            compute_irrelevance(self.instance, self.bound)
        } else {
            self.instance.jobs()
        };
        debug_assert!(new_rho >= self.rho, "relevance never shrinks with the bound");
        if let Some(ret) = &mut self.ret {
            match ret.update_for_bound(
                self.instance,
                self.bound,
                new_rho,
                self.config.ret_memory_cap,
            ) {
                Ok(RetUpdate::ShiftOnly) => {}
                Ok(RetUpdate::Rebuilt) => {
                    self.stats.ret_rebuilds += 1;
                    if let Some(memo) = &mut self.memo {
                        memo.clear();
                    }
                }
                Err(error) => {
                    log::warn!("range table update failed ({error}); disabling dependent rules");
                    self.stats.ret_disabled = true;
                    self.ret = None;
                    self.memo = None;
                    self.config.equivalence_rule = false;
                    self.config.fill_up_rule = false;
                    self.config.state_memo = false;
                }
            }
        }
        self.rho = new_rho;
        Pass::Improved
    }
}

/// Machines whose space cannot take even the smallest remaining job
/// contribute nothing; infeasible when the usable space is below the
/// remaining work.
pub(crate) fn insufficient_free_space(
    loads: &[u64],
    bound: u64,
    smallest_remaining: u64,
    remaining_work: u64,
) -> bool {
    let mut free = 0u64;
    for &load in loads {
        debug_assert!(load <= bound);
        let space = bound - load;
        if space >= smallest_remaining {
            free += space;
        }
    }
    free < remaining_work
}
