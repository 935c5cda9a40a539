//! Range equivalency table: an implicit oracle for load equivalence.
//!
//! For a decision bound `U`, define `phi(i, u)` as the set of subsets of the
//! jobs from `i` onward that still fit on a machine already loaded to `u`
//! without exceeding `U`. Two loads with equal `phi` sets are interchangeable
//! for every purpose the search cares about. The table stores one row per
//! job and one column per load; equal ids within a row certify equal `phi`
//! sets, so the equivalence test is two array reads instead of a
//! combinatorial comparison.
//!
//! Rows are built from the smallest relevant job upward. The bottom row has
//! two ranges split where the smallest job stops fitting; each higher row
//! starts at id 1 in the rightmost column and, walking left, keeps its id
//! exactly while both the cell below and the cell below shifted by the row's
//! job duration keep theirs.
//!
//! When the bound decreases during search the whole table would shift left by
//! the same amount, so instead of rebuilding, queries add an offset. Only
//! when the set of relevant jobs grows must rows be rebuilt, bottom-up, and
//! the rebuild stops at the first row whose equivalence ranges come out
//! unchanged, since identical ranges below imply identical ranges above.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::instance::Instance;

/// Default memory cap for table construction: 2 GiB.
pub const DEFAULT_MEMORY_CAP: u64 = 2 << 30;

/// Job-count cap for the exponential [`phi_enumerate`] oracle.
pub const PHI_ENUMERATE_CAP: usize = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RetError {
    #[error("table would need {required} bytes, above the cap of {cap}")]
    MemoryCapExceeded { required: u64, cap: u64 },
    #[error("bound {bound} exceeds the 32-bit id space")]
    BoundTooLarge { bound: u64 },
    #[error("query outside the table: job {job}, load {load}, bound {bound}")]
    OutOfRange { job: usize, load: u64, bound: u64 },
    #[error("{jobs} jobs exceed the enumeration cap of {cap}")]
    InstanceTooLarge { jobs: usize, cap: usize },
    #[error("load {load} exceeds the bound {bound}")]
    LoadAboveBound { load: u64, bound: u64 },
}

/// How the smallest jobs can be dropped: while the other jobs' total work is
/// below `m * (U - w + 1)` for the smallest job's duration `w`, some machine
/// must end low enough to take that job afterwards, so the decision instance
/// with and without it are equivalent. Returns the count of surviving jobs
/// after applying this reduction repeatedly.
pub fn compute_irrelevance(instance: &Instance, bound: u64) -> usize {
    let m = instance.machines() as u64;
    let weights = instance.weights();
    let mut rho = instance.jobs();
    let mut remaining_total = instance.total_work();
    while rho >= 1 {
        let w = weights[rho - 1];
        if w > bound {
            break;
        }
        let others = remaining_total - w;
        if others < m.saturating_mul(bound - w + 1) {
            remaining_total = others;
            rho -= 1;
        } else {
            break;
        }
    }
    rho
}

/// Outcome of [`Ret::update_for_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RetUpdate {
    /// Only the query offset moved; stored search state stays comparable.
    ShiftOnly,
    /// Rows were rebuilt; any state keyed on ids must be discarded.
    Rebuilt,
}

/// The table itself. One row per relevant job, one column per load value in
/// `[0, built_bound]`; queries for the current (possibly smaller) bound are
/// answered through a column offset.
#[derive(Debug, Clone)]
pub struct Ret {
    rows: Vec<u32>,
    width: usize,
    built_bound: u64,
    bound: u64,
    relevant: usize,
}

impl Ret {
    /// Builds the table for `bound` covering jobs `0..relevant`.
    pub fn build(
        instance: &Instance,
        bound: u64,
        relevant: usize,
        memory_cap: u64,
    ) -> Result<Self, RetError> {
        assert!(relevant >= 1, "a table needs at least one relevant job");
        assert!(relevant <= instance.jobs());
        if bound >= u32::MAX as u64 {
            return Err(RetError::BoundTooLarge { bound });
        }
        let width = bound as usize + 1;
        let required = relevant as u64 * width as u64 * 4;
        if required > memory_cap {
            return Err(RetError::MemoryCapExceeded {
                required,
                cap: memory_cap,
            });
        }

        let mut ret = Self {
            rows: vec![0; relevant * width],
            width,
            built_bound: bound,
            bound,
            relevant,
        };
        base_row(ret.row_mut(relevant - 1), instance.weight(relevant - 1));
        for job in (0..relevant.saturating_sub(1)).rev() {
            let (row, below) = ret.row_pair_mut(job);
            derived_row(row, below, instance.weight(job));
        }
        Ok(ret)
    }

    pub fn relevant(&self) -> usize {
        self.relevant
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn offset(&self) -> u64 {
        self.built_bound - self.bound
    }

    /// Equivalence id of `load` in the row of `job`.
    pub fn id(&self, job: usize, load: u64) -> Result<u32, RetError> {
        if job >= self.relevant || load > self.bound {
            return Err(RetError::OutOfRange {
                job,
                load,
                bound: self.bound,
            });
        }
        Ok(self.id_fast(job, load))
    }

    /// Unchecked variant for the search hot path.
    #[inline]
    pub(crate) fn id_fast(&self, job: usize, load: u64) -> u32 {
        debug_assert!(job < self.relevant && load <= self.bound);
        let column = (load + self.offset()) as usize;
        self.rows[job * self.width + column]
    }

    /// True iff loads `u` and `v` admit exactly the same completions from
    /// `job` onward.
    pub fn equivalent(&self, job: usize, u: u64, v: u64) -> Result<bool, RetError> {
        Ok(self.id(job, u)? == self.id(job, v)?)
    }

    /// Adjusts the table after the search bound decreased to `new_bound`,
    /// with `new_relevant` the relevance count recomputed for it.
    ///
    /// If the relevant set is unchanged this only moves the query offset.
    /// Otherwise rows are rebuilt from the new bottom row upward, stopping at
    /// the first row whose equivalence ranges match the stored row, and the
    /// caller must discard id-derived state.
    pub fn update_for_bound(
        &mut self,
        instance: &Instance,
        new_bound: u64,
        new_relevant: usize,
        memory_cap: u64,
    ) -> Result<RetUpdate, RetError> {
        assert!(new_bound <= self.bound, "the bound only ever decreases");
        if new_relevant == self.relevant {
            self.bound = new_bound;
            return Ok(RetUpdate::ShiftOnly);
        }
        debug_assert!(
            new_relevant > self.relevant,
            "a smaller bound cannot shrink the relevant set"
        );
        let required = new_relevant as u64 * self.width as u64 * 4;
        if required > memory_cap {
            return Err(RetError::MemoryCapExceeded {
                required,
                cap: memory_cap,
            });
        }

        self.bound = new_bound;
        let old_relevant = self.relevant;
        self.rows.resize(new_relevant * self.width, 0);
        self.relevant = new_relevant;

        base_row(self.row_mut(new_relevant - 1), instance.weight(new_relevant - 1));
        let mut scratch = vec![0u32; self.width];
        for job in (0..new_relevant - 1).rev() {
            {
                let below = self.row(job + 1);
                derived_row(&mut scratch, below, instance.weight(job));
            }
            if job < old_relevant && same_ranges(&scratch, self.row(job)) {
                break;
            }
            self.row_mut(job).copy_from_slice(&scratch);
        }
        Ok(RetUpdate::Rebuilt)
    }

    fn row(&self, job: usize) -> &[u32] {
        &self.rows[job * self.width..(job + 1) * self.width]
    }

    fn row_mut(&mut self, job: usize) -> &mut [u32] {
        &mut self.rows[job * self.width..(job + 1) * self.width]
    }

    /// Mutable row for `job` together with the immutable row below it.
    fn row_pair_mut(&mut self, job: usize) -> (&mut [u32], &[u32]) {
        let (left, right) = self.rows.split_at_mut((job + 1) * self.width);
        (&mut left[job * self.width..], &right[..self.width])
    }
}

/// Bottom row: two ranges split where the job stops fitting, or a single
/// range if it fits nowhere.
fn base_row(row: &mut [u32], weight: u64) {
    let width = row.len() as u64;
    for (column, cell) in row.iter_mut().enumerate() {
        *cell = if column as u64 + weight < width { 2 } else { 1 };
    }
}

/// Row above `below` for a job of the given duration: walking right to left,
/// the id is kept while both the cell below and the cell below shifted by
/// the duration keep theirs, and incremented otherwise.
fn derived_row(row: &mut [u32], below: &[u32], weight: u64) {
    let width = below.len();
    let shifted = |column: usize| -> u32 {
        let target = column as u64 + weight;
        if target < width as u64 {
            below[target as usize]
        } else {
            0
        }
    };
    row[width - 1] = 1;
    for column in (0..width - 1).rev() {
        let change =
            below[column] != below[column + 1] || shifted(column) != shifted(column + 1);
        row[column] = row[column + 1] + change as u32;
    }
}

/// True iff two rows have their range boundaries at the same positions.
fn same_ranges(a: &[u32], b: &[u32]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    (0..a.len() - 1).all(|c| (a[c] != a[c + 1]) == (b[c] != b[c + 1]))
}

/// Explicit enumeration of `phi(first_job, load)`: every subset of the jobs
/// `first_job..n` whose added duration keeps the machine at or below `bound`.
/// Subsets are returned as bitmasks with bit `b` standing for job
/// `first_job + b`. Exponential; refuses more than [`PHI_ENUMERATE_CAP`]
/// trailing jobs.
pub fn phi_enumerate(
    instance: &Instance,
    bound: u64,
    first_job: usize,
    load: u64,
) -> Result<BTreeSet<u32>, RetError> {
    let k = instance.jobs() - first_job;
    if k > PHI_ENUMERATE_CAP {
        return Err(RetError::InstanceTooLarge {
            jobs: k,
            cap: PHI_ENUMERATE_CAP,
        });
    }
    if load > bound {
        return Err(RetError::LoadAboveBound { load, bound });
    }
    let mut subsets = BTreeSet::new();
    for mask in 0u32..1 << k {
        let added: u64 = (0..k)
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| instance.weight(first_job + b))
            .sum();
        if load + added <= bound {
            subsets.insert(mask);
        }
    }
    Ok(subsets)
}
