//! Pseudo-polynomial subset-sum with witness reconstruction.

/// Maximum achievable subset sum `<= capacity` plus one witness subset,
/// returned as ascending item indices.
///
/// Runs the classic 0/1 reachability DP. `owner[c]` remembers the first item
/// that made value `c` reachable, so a witness chain can be walked backwards
/// without storing per-item table snapshots: each owner strictly precedes the
/// owner of the remainder it extends.
pub fn subset_sum_best(items: &[u64], capacity: u64) -> (u64, Vec<usize>) {
    let total: u64 = items.iter().sum();
    let cap = capacity.min(total) as usize;
    if cap == 0 || items.is_empty() {
        return (0, Vec::new());
    }

    let mut reachable = vec![false; cap + 1];
    let mut owner = vec![u32::MAX; cap + 1];
    reachable[0] = true;
    for (index, &weight) in items.iter().enumerate() {
        let w = weight as usize;
        if w > cap {
            continue;
        }
        // Descending so an item is used at most once.
        for c in (w..=cap).rev() {
            if !reachable[c] && reachable[c - w] {
                reachable[c] = true;
                owner[c] = index as u32;
            }
        }
    }

    let best = (0..=cap).rev().find(|&c| reachable[c]).unwrap_or(0);
    let mut chosen = Vec::new();
    let mut c = best;
    while c > 0 {
        let index = owner[c] as usize;
        chosen.push(index);
        c -= items[index] as usize;
    }
    chosen.reverse();
    (best as u64, chosen)
}
