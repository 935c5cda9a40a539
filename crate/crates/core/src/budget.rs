//! Work budgets for bounding heuristics and the exact solver.
//!
//! A budget is either unlimited, a wall-clock deadline, or a deterministic
//! number of work units. Unit budgets exist so that tests and reports are
//! reproducible: a "unit" is one heuristic iteration or one explored search
//! node, never a clock read.

use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    Unlimited,
    /// Wall-clock budget.
    Time(Duration),
    /// Deterministic budget counted in work units.
    Units(u64),
}

impl Budget {
    /// A proportional slice: `percent` of the units, or of the duration.
    pub fn slice(&self, percent: u32) -> Budget {
        match *self {
            Budget::Unlimited => Budget::Unlimited,
            Budget::Time(d) => Budget::Time(d.mul_f64(percent as f64 / 100.0)),
            Budget::Units(u) => Budget::Units(u * percent as u64 / 100),
        }
    }

    /// Splits evenly across `parts` consumers.
    pub fn divide(&self, parts: u64) -> Budget {
        debug_assert!(parts > 0);
        match *self {
            Budget::Unlimited => Budget::Unlimited,
            Budget::Time(d) => Budget::Time(d / parts as u32),
            Budget::Units(u) => Budget::Units(u / parts),
        }
    }

    /// True for budgets that permit no work at all.
    pub fn is_empty(&self) -> bool {
        match *self {
            Budget::Unlimited => false,
            Budget::Time(d) => d.is_zero(),
            Budget::Units(u) => u == 0,
        }
    }
}

/// Tracks consumption against a [`Budget`].
///
/// Time budgets are only polled every `POLL_INTERVAL` units to keep the check
/// off the hot path; unit budgets are exact.
#[derive(Debug, Clone)]
pub struct BudgetMeter {
    budget: Budget,
    used: u64,
    deadline: Option<Instant>,
}

impl BudgetMeter {
    /// Clock reads are amortized over this many units.
    pub const POLL_INTERVAL: u64 = 1 << 12;

    pub fn start(budget: Budget) -> Self {
        let deadline = match budget {
            Budget::Time(d) => Some(Instant::now() + d),
            _ => None,
        };
        Self {
            budget,
            used: 0,
            deadline,
        }
    }

    /// Records one unit of work; returns `false` once the budget is spent.
    pub fn take(&mut self) -> bool {
        self.used += 1;
        !self.exhausted()
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn exhausted(&self) -> bool {
        match self.budget {
            Budget::Unlimited => false,
            Budget::Units(limit) => self.used >= limit,
            Budget::Time(_) => {
                if self.used % Self::POLL_INTERVAL != 0 {
                    return false;
                }
                Instant::now() >= self.deadline.unwrap()
            }
        }
    }

    /// Like [`exhausted`](Self::exhausted) but always reads the clock for
    /// time budgets; used at entry points rather than per node.
    pub fn exhausted_now(&self) -> bool {
        match self.budget {
            Budget::Unlimited => false,
            Budget::Units(limit) => self.used >= limit,
            Budget::Time(_) => Instant::now() >= self.deadline.unwrap(),
        }
    }
}
