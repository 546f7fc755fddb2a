//! Brute-force reference for the solver: plain enumeration of every legal
//! choice, no bitsets and no pruning.

#![allow(dead_code)]

/// One legal window choice as (item index, quantity) pairs.
pub type Choice = Vec<(usize, u32)>;

/// Every legal choice from a pool of `kcal.len()` items.
pub fn window_choices(kcal: &[u32], min_items: u32, max_items: u32, max_qty: u32) -> Vec<Choice> {
    let n = kcal.len();
    let mut out = Vec::new();
    let mut qty = vec![0u32; n];
    loop {
        let used = qty.iter().filter(|&&q| q > 0).count() as u32;
        if used >= min_items && used <= max_items {
            out.push(qty.iter().enumerate().filter(|(_, &q)| q > 0).map(|(i, &q)| (i, q)).collect());
        }
        // odometer over 0..=max_qty per item
        let mut i = 0;
        while i < n {
            if qty[i] < max_qty {
                qty[i] += 1;
                break;
            }
            qty[i] = 0;
            i += 1;
        }
        if i == n {
            return out;
        }
    }
}

pub fn choice_total(kcal: &[u32], choice: &Choice) -> u32 {
    choice.iter().map(|&(i, q)| kcal[i] * q).sum()
}

/// Sorted distinct window totals.
pub fn window_sums(kcal: &[u32], min_items: u32, max_items: u32, max_qty: u32) -> Vec<u32> {
    let mut sums: Vec<u32> = window_choices(kcal, min_items, max_items, max_qty)
        .iter()
        .map(|c| choice_total(kcal, c))
        .collect();
    sums.sort_unstable();
    sums.dedup();
    sums
}

/// Sorted distinct sums a + b over a ∈ xs, b ∈ ys.
pub fn pair_sums(xs: &[u32], ys: &[u32]) -> Vec<u32> {
    let top = xs.last().copied().unwrap_or(0) + ys.last().copied().unwrap_or(0);
    let mut hit = vec![false; top as usize + 1];
    for &x in xs {
        for &y in ys {
            hit[(x + y) as usize] = true;
        }
    }
    hit.iter().enumerate().filter(|(_, &h)| h).map(|(s, _)| s as u32).collect()
}

/// Sorted distinct day totals of three windows.
pub fn day_sums(windows: &[Vec<u32>; 3], min_items: u32, max_items: u32, max_qty: u32) -> Vec<u32> {
    let [a, b, c] = windows.each_ref().map(|w| window_sums(w, min_items, max_items, max_qty));
    pair_sums(&pair_sums(&a, &b), &c)
}

pub fn min_deviation(sums: &[u32], target: u32) -> Option<u32> {
    sums.iter().map(|&s| s.abs_diff(target)).min()
}

pub fn feasible(sums: &[u32], target: u32, tol: u32) -> bool {
    sums.iter().any(|&s| s.abs_diff(target) <= tol)
}
