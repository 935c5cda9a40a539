//! Feasibility of completions when exactly two job durations remain.
//!
//! With `count_a` jobs of duration `dur_a` and `count_b` of `dur_b` left, a
//! completion under the bound exists iff, after placing all `a`-jobs, the
//! machines still offer at least `count_b` slots of size `dur_b`. The table
//! `T(x, k)` holds the maximum number of `b`-slots on the first `x + 1`
//! machines when they carry `k` of the `a`-jobs; the recurrence maximizes
//! over how many `a`-jobs the machine `x` takes.

/// Per-machine `(a_jobs, b_jobs)` counts of a feasible completion.
pub type TwoDurationSplit = Vec<(usize, usize)>;

/// Decides whether the remaining two-duration jobs fit under `bound` on top
/// of `loads`, and reconstructs one per-machine split if they do.
///
/// Works regardless of which duration is larger. Runs in
/// `O(m * count_a^2)`; callers that can choose should pass the rarer
/// duration as `a`.
pub fn two_duration_feasible(
    loads: &[u64],
    bound: u64,
    dur_a: u64,
    count_a: usize,
    dur_b: u64,
    count_b: usize,
) -> Option<TwoDurationSplit> {
    assert!(dur_a > 0 && dur_b > 0);
    let m = loads.len();
    if loads.iter().any(|&l| l > bound) {
        return None;
    }

    // Per-machine ceiling on a-jobs, and prefix/suffix sums that bound which
    // table entries can matter: the first x machines cannot carry more than
    // their combined ceiling, and must carry whatever the rest cannot.
    let kmax: Vec<usize> = loads
        .iter()
        .map(|&l| (((bound - l) / dur_a) as usize).min(count_a))
        .collect();
    let mut prefix = vec![0usize; m];
    let mut acc = 0usize;
    for x in 0..m {
        acc = (acc + kmax[x]).min(count_a);
        prefix[x] = acc;
    }
    if prefix[m - 1] < count_a {
        return None;
    }
    let mut suffix_after = vec![0usize; m];
    let mut acc = 0usize;
    for x in (0..m).rev() {
        suffix_after[x] = acc;
        acc = (acc + kmax[x]).min(count_a);
    }

    let slots = |x: usize, k: usize| -> u64 { (bound - loads[x] - k as u64 * dur_a) / dur_b };

    let mut value: Vec<Option<u64>> = vec![None; count_a + 1];
    let mut choice = vec![vec![0usize; count_a + 1]; m];
    for k in count_a.saturating_sub(suffix_after[0])..=prefix[0] {
        value[k] = Some(slots(0, k));
        choice[0][k] = k;
    }
    for x in 1..m {
        let mut next: Vec<Option<u64>> = vec![None; count_a + 1];
        let lo = count_a.saturating_sub(suffix_after[x]);
        for k in lo..=prefix[x].min(count_a) {
            let mut best: Option<u64> = None;
            for i in 0..=k.min(kmax[x]) {
                if let Some(below) = value[k - i] {
                    let candidate = below + slots(x, i);
                    if best.is_none() || candidate > best.unwrap() {
                        best = Some(candidate);
                        choice[x][k] = i;
                    }
                }
            }
            next[k] = best;
        }
        value = next;
    }

    let total_b_slots = value[count_a]?;
    if (total_b_slots as u128) < count_b as u128 {
        return None;
    }

    let mut split = vec![(0usize, 0usize); m];
    let mut k = count_a;
    for x in (0..m).rev() {
        let taken = choice[x][k];
        split[x].0 = taken;
        k -= taken;
    }
    debug_assert_eq!(k, 0);
    let mut remaining_b = count_b;
    for (x, entry) in split.iter_mut().enumerate() {
        let here = (slots(x, entry.0) as usize).min(remaining_b);
        entry.1 = here;
        remaining_b -= here;
    }
    debug_assert_eq!(remaining_b, 0);
    Some(split)
}
