//! Problem model: instances, schedules, partial assignments, and an
//! exhaustive reference solver for small instances.
//!
//! An instance consists of `n` integer job durations and `m` identical
//! machines. Durations are kept sorted in non-increasing order; all indexing
//! of jobs and machines is 0-based inside this crate (converters to 1-based
//! external formats live in the CLI).

use thiserror::Error;

/// Default job-count cap for [`brute_force_optimum`].
pub const BRUTE_FORCE_DEFAULT_CAP: usize = 14;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("job {index} has non-positive duration {value}")]
    NonPositiveWeight { index: usize, value: i64 },
    #[error("an instance needs at least one job and one machine")]
    EmptyInstance,
    #[error("total work does not fit in 64 bits")]
    WeightSumOverflow,
    #[error("durations must be sorted in non-increasing order")]
    NotSorted,
    #[error("assignment has {got} entries but the instance has {expected} jobs")]
    LengthMismatch { expected: usize, got: usize },
    #[error("job {index} is assigned to machine {machine} but only {machines} machines exist")]
    MachineIndexOutOfRange {
        index: usize,
        machine: usize,
        machines: usize,
    },
    #[error("all jobs are already assigned")]
    DepthOverflow,
    #[error("no decision left to undo")]
    DepthUnderflow,
    #[error("{jobs} jobs exceed the exhaustive-search cap of {cap}")]
    InstanceTooLarge { jobs: usize, cap: usize },
}

/// A `P||Cmax` instance: job durations sorted non-increasingly plus a
/// machine count. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    weights: Vec<u64>,
    machines: usize,
    total: u64,
}

impl Instance {
    /// Builds an instance from raw durations in arbitrary order.
    ///
    /// Returns the instance together with a permutation `perm` such that
    /// `perm[k]` is the original position of the job now at sorted position
    /// `k`; callers that must report results in the input order use it to
    /// translate assignments back.
    pub fn normalize(raw: &[i64], machines: usize) -> Result<(Self, Vec<usize>), InstanceError> {
        if raw.is_empty() || machines == 0 {
            return Err(InstanceError::EmptyInstance);
        }
        for (index, &value) in raw.iter().enumerate() {
            if value <= 0 {
                return Err(InstanceError::NonPositiveWeight { index, value });
            }
        }
        let mut perm: Vec<usize> = (0..raw.len()).collect();
        // Stable order: duration descending, original position ascending.
        perm.sort_by(|&a, &b| raw[b].cmp(&raw[a]).then(a.cmp(&b)));
        let weights: Vec<u64> = perm.iter().map(|&i| raw[i] as u64).collect();
        let instance = Self::from_sorted(weights, machines)?;
        Ok((instance, perm))
    }

    /// Builds an instance from durations that are already sorted
    /// non-increasingly.
    pub fn from_sorted(weights: Vec<u64>, machines: usize) -> Result<Self, InstanceError> {
        if weights.is_empty() || machines == 0 {
            return Err(InstanceError::EmptyInstance);
        }
        if let Some(index) = weights.iter().position(|&w| w == 0) {
            return Err(InstanceError::NonPositiveWeight { index, value: 0 });
        }
        if weights.windows(2).any(|w| w[0] < w[1]) {
            return Err(InstanceError::NotSorted);
        }
        let mut total: u64 = 0;
        for &w in &weights {
            total = total
                .checked_add(w)
                .ok_or(InstanceError::WeightSumOverflow)?;
        }
        Ok(Self {
            weights,
            machines,
            total,
        })
    }

    pub fn jobs(&self) -> usize {
        self.weights.len()
    }

    pub fn machines(&self) -> usize {
        self.machines
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn weight(&self, job: usize) -> u64 {
        self.weights[job]
    }

    pub fn total_work(&self) -> u64 {
        self.total
    }

    /// Views this instance as a decision question "is there a schedule with
    /// makespan at most `bound`?".
    pub fn decision(&self, bound: u64) -> DecisionInstance<'_> {
        DecisionInstance {
            instance: self,
            bound,
        }
    }
}

/// A decision-problem view of an instance: feasible iff a schedule with
/// makespan `<= bound` exists. Feasibility requires `bound >= w_1`, which is
/// checked where needed rather than assumed.
#[derive(Debug, Clone, Copy)]
pub struct DecisionInstance<'a> {
    pub instance: &'a Instance,
    pub bound: u64,
}

impl<'a> DecisionInstance<'a> {
    pub fn new(instance: &'a Instance, bound: u64) -> Self {
        Self { instance, bound }
    }

    /// True iff even the largest job fits under the bound.
    pub fn largest_fits(&self) -> bool {
        self.instance.weights[0] <= self.bound
    }
}

/// A complete assignment of jobs to machines with derived loads and makespan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    assignment: Vec<usize>,
    loads: Vec<u64>,
    makespan: u64,
}

impl Schedule {
    /// Validates `assignment` (one 0-based machine per sorted job) against
    /// the instance and derives loads and makespan.
    pub fn new(instance: &Instance, assignment: Vec<usize>) -> Result<Self, InstanceError> {
        if assignment.len() != instance.jobs() {
            return Err(InstanceError::LengthMismatch {
                expected: instance.jobs(),
                got: assignment.len(),
            });
        }
        let mut loads = vec![0u64; instance.machines()];
        for (index, &machine) in assignment.iter().enumerate() {
            if machine >= instance.machines() {
                return Err(InstanceError::MachineIndexOutOfRange {
                    index,
                    machine,
                    machines: instance.machines(),
                });
            }
            loads[machine] += instance.weight(index);
        }
        let makespan = loads.iter().copied().max().unwrap_or(0);
        Ok(Self {
            assignment,
            loads,
            makespan,
        })
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn loads(&self) -> &[u64] {
        &self.loads
    }

    pub fn makespan(&self) -> u64 {
        self.makespan
    }
}

/// Load report produced by [`validate_schedule`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleReport {
    pub loads: Vec<u64>,
    pub makespan: u64,
    /// `Some(makespan <= bound)` when a bound was supplied.
    pub feasible: Option<bool>,
}

/// Checks an assignment against an instance and reports loads, makespan and,
/// if `bound` is given, feasibility.
pub fn validate_schedule(
    instance: &Instance,
    assignment: &[usize],
    bound: Option<u64>,
) -> Result<ScheduleReport, InstanceError> {
    let schedule = Schedule::new(instance, assignment.to_vec())?;
    Ok(ScheduleReport {
        feasible: bound.map(|u| schedule.makespan() <= u),
        makespan: schedule.makespan(),
        loads: schedule.loads,
    })
}

/// A prefix of job-to-machine decisions with incrementally maintained loads.
///
/// Jobs are assigned in sorted order: the decision at depth `l` places job
/// `l`. Applying and undoing a decision are exact inverses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialAssignment {
    decisions: Vec<usize>,
    loads: Vec<u64>,
}

impl PartialAssignment {
    pub fn new(instance: &Instance) -> Self {
        Self {
            decisions: Vec::with_capacity(instance.jobs()),
            loads: vec![0; instance.machines()],
        }
    }

    /// Number of assigned jobs.
    pub fn depth(&self) -> usize {
        self.decisions.len()
    }

    pub fn loads(&self) -> &[u64] {
        &self.loads
    }

    pub fn load(&self, machine: usize) -> u64 {
        self.loads[machine]
    }

    pub fn decisions(&self) -> &[usize] {
        &self.decisions
    }

    /// Assigns the next unassigned job to `machine`.
    pub fn apply(&mut self, instance: &Instance, machine: usize) -> Result<(), InstanceError> {
        let depth = self.depth();
        if depth >= instance.jobs() {
            return Err(InstanceError::DepthOverflow);
        }
        if machine >= instance.machines() {
            return Err(InstanceError::MachineIndexOutOfRange {
                index: depth,
                machine,
                machines: instance.machines(),
            });
        }
        self.loads[machine] += instance.weight(depth);
        self.decisions.push(machine);
        Ok(())
    }

    /// Reverts the most recent decision and returns the machine it used.
    pub fn undo(&mut self, instance: &Instance) -> Result<usize, InstanceError> {
        let machine = self.decisions.pop().ok_or(InstanceError::DepthUnderflow)?;
        self.loads[machine] -= instance.weight(self.depth());
        Ok(machine)
    }

    /// Largest current machine load.
    pub fn max_load(&self) -> u64 {
        self.loads.iter().copied().max().unwrap_or(0)
    }
}

/// Exact minimum makespan by depth-first enumeration, for test oracles and
/// tiny sub-instances.
///
/// Identical-load machines are interchangeable, so only the first machine of
/// each distinct load is branched on; branches whose new load already reaches
/// the best known makespan are cut. Refuses instances with more than
/// [`BRUTE_FORCE_DEFAULT_CAP`] jobs; use [`brute_force_optimum_with_cap`] to
/// override.
pub fn brute_force_optimum(instance: &Instance) -> Result<(u64, Schedule), InstanceError> {
    brute_force_optimum_with_cap(instance, BRUTE_FORCE_DEFAULT_CAP)
}

/// See [`brute_force_optimum`].
pub fn brute_force_optimum_with_cap(
    instance: &Instance,
    cap: usize,
) -> Result<(u64, Schedule), InstanceError> {
    if instance.jobs() > cap {
        return Err(InstanceError::InstanceTooLarge {
            jobs: instance.jobs(),
            cap,
        });
    }

    // Greedy seed so the enumeration starts with a decent incumbent.
    let m = instance.machines();
    let mut seed_assignment = Vec::with_capacity(instance.jobs());
    let mut seed_loads = vec![0u64; m];
    for job in 0..instance.jobs() {
        let target = (0..m).min_by_key(|&x| (seed_loads[x], x)).unwrap();
        seed_loads[target] += instance.weight(job);
        seed_assignment.push(target);
    }

    let mut best_assignment = seed_assignment;
    let mut best = seed_loads.iter().copied().max().unwrap();

    let mut loads = vec![0u64; m];
    let mut current = vec![0usize; instance.jobs()];
    enumerate(
        instance,
        0,
        &mut loads,
        &mut current,
        &mut best,
        &mut best_assignment,
    );

    let schedule = Schedule::new(instance, best_assignment)?;
    debug_assert_eq!(schedule.makespan(), best);
    Ok((best, schedule))
}

fn enumerate(
    instance: &Instance,
    job: usize,
    loads: &mut Vec<u64>,
    current: &mut Vec<usize>,
    best: &mut u64,
    best_assignment: &mut Vec<usize>,
) {
    if job == instance.jobs() {
        let makespan = loads.iter().copied().max().unwrap();
        if makespan < *best {
            *best = makespan;
            best_assignment.copy_from_slice(current);
        }
        return;
    }
    let w = instance.weight(job);
    let mut seen_loads: Vec<u64> = Vec::with_capacity(loads.len());
    for machine in 0..loads.len() {
        let load = loads[machine];
        if seen_loads.contains(&load) {
            continue;
        }
        seen_loads.push(load);
        if load + w >= *best {
            continue;
        }
        loads[machine] += w;
        current[job] = machine;
        enumerate(instance, job + 1, loads, current, best, best_assignment);
        loads[machine] -= w;
    }
}
