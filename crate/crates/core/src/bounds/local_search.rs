//! Subset-sum local search on machine pairs.
//!
//! Both searches repeat the same move: pick two distinct machines at random
//! and redistribute their combined jobs optimally across the pair, which a
//! single subset-sum targeting the balanced split achieves. They differ in
//! how they escape local minima: the single-start search perturbs the current
//! schedule, the multi-start baseline throws it away and restarts from a
//! fresh random assignment.

use super::subset_sum::subset_sum_best;
use super::Bounds;
use crate::budget::{Budget, BudgetMeter};
use crate::instance::{Instance, Schedule};
use crate::rng::SplitMix64;

/// Largest number of jobs a single perturbation may displace.
const MAX_PERTURBATION: usize = 16;

struct PairSearch<'a> {
    instance: &'a Instance,
    assignment: Vec<usize>,
    loads: Vec<u64>,
    /// Consecutive pair moves that changed nothing.
    stale_moves: u32,
    /// Moves without change that define a local minimum.
    stale_limit: u32,
}

impl<'a> PairSearch<'a> {
    fn new(instance: &'a Instance, assignment: Vec<usize>) -> Self {
        let mut loads = vec![0u64; instance.machines()];
        for (job, &machine) in assignment.iter().enumerate() {
            loads[machine] += instance.weight(job);
        }
        let m = instance.machines() as u32;
        Self {
            instance,
            assignment,
            loads,
            stale_moves: 0,
            stale_limit: (m * (m - 1) / 2).clamp(1, 64),
        }
    }

    fn makespan(&self) -> u64 {
        self.loads.iter().copied().max().unwrap()
    }

    fn schedule(&self) -> Schedule {
        Schedule::new(self.instance, self.assignment.clone())
            .expect("pair moves preserve assignment validity")
    }

    fn at_local_minimum(&self) -> bool {
        self.stale_moves >= self.stale_limit
    }

    /// Rebalances one random machine pair; returns whether the pair improved.
    fn pair_move(&mut self, rng: &mut SplitMix64) -> bool {
        let m = self.instance.machines();
        let first = rng.index(m);
        let mut second = rng.index(m - 1);
        if second >= first {
            second += 1;
        }
        let (x, y) = (first.min(second), first.max(second));

        let combined_load = self.loads[x] + self.loads[y];
        let old_max = self.loads[x].max(self.loads[y]);
        if combined_load == 0 {
            self.stale_moves += 1;
            return false;
        }
        let jobs: Vec<usize> = (0..self.instance.jobs())
            .filter(|&j| self.assignment[j] == x || self.assignment[j] == y)
            .collect();
        let weights: Vec<u64> = jobs.iter().map(|&j| self.instance.weight(j)).collect();
        let (light_side, chosen) = subset_sum_best(&weights, combined_load / 2);
        let new_max = combined_load - light_side;
        if new_max >= old_max {
            self.stale_moves += 1;
            return false;
        }

        for &j in &jobs {
            self.assignment[j] = x;
        }
        for &k in &chosen {
            self.assignment[jobs[k]] = y;
        }
        self.loads[x] = new_max;
        self.loads[y] = light_side;
        self.stale_moves = 0;
        true
    }

    /// Moves up to `count` random jobs off one random machine.
    fn perturb(&mut self, count: usize, rng: &mut SplitMix64) {
        let m = self.instance.machines();
        let victim = rng.index(m);
        let jobs_on_victim: Vec<usize> = (0..self.instance.jobs())
            .filter(|&j| self.assignment[j] == victim)
            .collect();
        let moved = count.min(jobs_on_victim.len());
        if moved == 0 {
            self.stale_moves = 0;
            return;
        }
        for pick in rng.distinct_indices(jobs_on_victim.len(), moved) {
            let job = jobs_on_victim[pick];
            let target = rng.index(m);
            let w = self.instance.weight(job);
            self.loads[self.assignment[job]] -= w;
            self.loads[target] += w;
            self.assignment[job] = target;
        }
        self.stale_moves = 0;
    }
}

fn random_assignment(instance: &Instance, rng: &mut SplitMix64) -> Vec<usize> {
    (0..instance.jobs())
        .map(|_| rng.index(instance.machines()))
        .collect()
}

/// Single-start pair search seeded with a high-quality schedule.
///
/// Runs pair moves until a local minimum, then perturbs: removes `i` jobs
/// (starting at 2) from a random machine and reassigns them randomly. `i`
/// grows by one after every perturbation that did not lead to a new best
/// schedule, capped at `min(n, 16)`, and resets to 2 on improvement. Returns
/// the best schedule seen; never worse than `start`, stops early at `lower`.
pub fn s4(
    instance: &Instance,
    start: &Schedule,
    lower: u64,
    budget: Budget,
    seed: u64,
) -> Bounds {
    let mut best = start.clone();
    if instance.machines() >= 2 {
        let mut rng = SplitMix64::new(seed);
        let mut meter = BudgetMeter::start(budget);
        let mut search = PairSearch::new(instance, start.assignment().to_vec());
        let mut perturbation = 2usize;
        let perturbation_cap = instance.jobs().min(MAX_PERTURBATION).max(2);
        let mut best_before_perturb = best.makespan();

        while best.makespan() > lower && meter.take() {
            if search.at_local_minimum() {
                if best.makespan() < best_before_perturb {
                    perturbation = 2;
                } else {
                    perturbation = (perturbation + 1).min(perturbation_cap);
                }
                best_before_perturb = best.makespan();
                search.perturb(perturbation, &mut rng);
            } else if search.pair_move(&mut rng) && search.makespan() < best.makespan() {
                best = search.schedule();
            }
        }
    }
    Bounds {
        lower,
        upper: best.makespan(),
        witness: Some(best),
    }
}

/// Multi-start baseline: starts from a random assignment and fully restarts
/// whenever the pair search reaches a local minimum.
pub fn mss(instance: &Instance, lower: u64, budget: Budget, seed: u64) -> Bounds {
    let mut rng = SplitMix64::new(seed);
    let mut search = PairSearch::new(instance, random_assignment(instance, &mut rng));
    let mut best = search.schedule();

    if instance.machines() >= 2 {
        let mut meter = BudgetMeter::start(budget);
        while best.makespan() > lower && meter.take() {
            if search.at_local_minimum() {
                search = PairSearch::new(instance, random_assignment(instance, &mut rng));
            } else if search.pair_move(&mut rng) && search.makespan() < best.makespan() {
                best = search.schedule();
            }
        }
    }
    Bounds {
        lower,
        upper: best.makespan(),
        witness: Some(best),
    }
}
