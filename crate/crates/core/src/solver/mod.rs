//! Exact reachable-calorie computation over meal windows.
//!
//! A window offers a small pool of items; a legal choice picks between
//! `min_items_per_window` and `max_items_per_window` distinct items, each
//! with a quantity in `1..=max_quantity_per_item`. The solver computes the
//! exact set of achievable totals (bitset DP over sums), decides whether a
//! day total can land inside a tolerance band, and finds a best day plan.

mod sumset;

use serde::{Deserialize, Serialize};

use crate::catalog::FoodItem;

pub use sumset::ReachableSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionConstraints {
    pub min_items_per_window: u32,
    pub max_items_per_window: u32,
    pub max_quantity_per_item: u32,
}

impl Default for SelectionConstraints {
    fn default() -> Self {
        Self {
            min_items_per_window: 1,
            max_items_per_window: 3,
            max_quantity_per_item: 10,
        }
    }
}

impl SelectionConstraints {
    /// Exactly three items per window.
    pub fn exact_three() -> Self {
        Self {
            min_items_per_window: 3,
            max_items_per_window: 3,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let (lo, hi) = (self.min_items_per_window, self.max_items_per_window);
        if !(1 <= lo && lo <= hi && hi <= 6) {
            return Err(format!("item bounds must satisfy 1 ≤ min ≤ max ≤ 6, got {lo}..{hi}"));
        }
        if self.max_quantity_per_item < 1 {
            return Err("max_quantity_per_item must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pick {
    pub item_id: String,
    pub quantity: u32,
}

impl Pick {
    pub fn new(item_id: impl Into<String>, quantity: u32) -> Self {
        Self {
            item_id: item_id.into(),
            quantity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowChoice {
    pub picks: Vec<Pick>,
    pub total_kcal: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PickError {
    #[error("item \"{0}\" is not offered in this window")]
    NotInPool(String),
    #[error("item \"{0}\" picked more than once")]
    Duplicate(String),
    #[error("item \"{item}\" quantity {quantity} outside 1..={max}")]
    Quantity { item: String, quantity: u32, max: u32 },
    #[error("{count} items picked, allowed {min}..={max}")]
    ItemCount { count: usize, min: u32, max: u32 },
}

impl WindowChoice {
    /// Validates `picks` against `pool` and computes the total.
    pub fn from_picks(
        pool: &[FoodItem],
        picks: &[Pick],
        constraints: &SelectionConstraints,
    ) -> Result<WindowChoice, PickError> {
        let count = picks.len();
        if count < constraints.min_items_per_window as usize
            || count > constraints.max_items_per_window as usize
        {
            return Err(PickError::ItemCount {
                count,
                min: constraints.min_items_per_window,
                max: constraints.max_items_per_window,
            });
        }
        let mut total = 0u32;
        for (i, pick) in picks.iter().enumerate() {
            if picks[..i].iter().any(|p| p.item_id == pick.item_id) {
                return Err(PickError::Duplicate(pick.item_id.clone()));
            }
            let item = pool
                .iter()
                .find(|it| it.id == pick.item_id)
                .ok_or_else(|| PickError::NotInPool(pick.item_id.clone()))?;
            if pick.quantity < 1 || pick.quantity > constraints.max_quantity_per_item {
                return Err(PickError::Quantity {
                    item: pick.item_id.clone(),
                    quantity: pick.quantity,
                    max: constraints.max_quantity_per_item,
                });
            }
            total += pick.quantity * item.kcal_per_unit;
        }
        Ok(WindowChoice {
            picks: picks.to_vec(),
            total_kcal: total,
        })
    }

    pub fn item_count(&self) -> usize {
        self.picks.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DayPlan {
    pub breakfast: WindowChoice,
    pub lunch: WindowChoice,
    pub dinner: WindowChoice,
    pub day_total_kcal: u32,
}

impl DayPlan {
    pub fn new(breakfast: WindowChoice, lunch: WindowChoice, dinner: WindowChoice) -> Self {
        let day_total_kcal = breakfast.total_kcal + lunch.total_kcal + dinner.total_kcal;
        Self {
            breakfast,
            lunch,
            dinner,
            day_total_kcal,
        }
    }

    pub fn windows(&self) -> [&WindowChoice; 3] {
        [&self.breakfast, &self.lunch, &self.dinner]
    }

    pub fn item_count(&self) -> usize {
        self.windows().iter().map(|w| w.item_count()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolverError {
    #[error("window {window} cannot satisfy the minimum item count")]
    NoValidPlan { window: usize },
}

/// Three meal pools in breakfast, lunch, dinner order.
pub type DayPools<'a> = [&'a [FoodItem]; 3];

/// Largest total any legal choice from `pool` can reach.
fn window_upper_bound(pool: &[FoodItem], c: &SelectionConstraints) -> u32 {
    let mut kcal: Vec<u32> = pool.iter().map(|i| i.kcal_per_unit).collect();
    kcal.sort_unstable_by(|a, b| b.cmp(a));
    kcal.iter()
        .take(c.max_items_per_window as usize)
        .sum::<u32>()
        * c.max_quantity_per_item
}

/// Exact set of window totals.
pub fn window_reachable(pool: &[FoodItem], c: &SelectionConstraints) -> ReachableSet {
    window_reachable_capped(pool, c, window_upper_bound(pool, c))
}

/// Exact set of window totals up to `cap`; larger totals are discarded.
pub fn window_reachable_capped(pool: &[FoodItem], c: &SelectionConstraints, cap: u32) -> ReachableSet {
    let max_items = c.max_items_per_window as usize;
    // layers[j]: totals using exactly j distinct items among those processed
    let mut layers: Vec<ReachableSet> = (0..=max_items).map(|_| ReachableSet::empty(cap)).collect();
    layers[0].insert(0);
    for item in pool {
        for j in (0..max_items).rev() {
            if layers[j].is_empty() {
                continue;
            }
            let (lower, upper) = layers.split_at_mut(j + 1);
            let (src, dst) = (&lower[j], &mut upper[0]);
            for q in 1..=c.max_quantity_per_item {
                let shift = q * item.kcal_per_unit;
                if shift > cap {
                    break;
                }
                dst.or_shifted(src, shift);
            }
        }
    }
    let mut out = ReachableSet::empty(cap);
    for layer in layers.iter().skip(c.min_items_per_window as usize) {
        out.union_with(layer);
    }
    out
}

/// Exact set of day totals up to `cap`.
pub fn day_reachable(windows: DayPools<'_>, c: &SelectionConstraints, cap: u32) -> ReachableSet {
    let [a, b, d] = windows.map(|pool| window_reachable_capped(pool, c, cap));
    a.sumset(&b, cap).sumset(&d, cap)
}

/// True iff some legal day plan totals within `target ± tol`.
pub fn feasible(windows: DayPools<'_>, c: &SelectionConstraints, target: u32, tol: u32) -> bool {
    let lo = target.saturating_sub(tol);
    let hi = target + tol;
    let [a, b, d] = windows.map(|pool| window_reachable_capped(pool, c, hi));
    let ab = a.sumset(&b, hi);
    if ab.is_empty() {
        return false;
    }
    let hit = d.iter().any(|last| ab.intersects_range(lo.saturating_sub(last), hi - last));
    hit
}

/// Best legal choice for each reachable window total: fewest items, then
/// lexicographically smallest picks (by item id, then quantity).
struct WindowTable {
    // pool sorted by id; picks refer to positions in it
    order: Vec<FoodItem>,
    // indexed by total: (item count, rank among kept choices in lexicographic order)
    by_total: Vec<Option<(usize, usize)>>,
    picks_by_rank: Vec<Vec<(usize, u32)>>,
    // totals whose kept choice uses exactly k items, and the same totals in rank order
    by_count: Vec<ReachableSet>,
    ranked: Vec<Vec<(usize, u32)>>,
}

impl WindowTable {
    fn build(pool: &[FoodItem], c: &SelectionConstraints, cap: u32) -> WindowTable {
        let mut order: Vec<FoodItem> = pool.to_vec();
        order.sort_by(|a, b| a.id.cmp(&b.id));
        let refs: Vec<&FoodItem> = order.iter().collect();

        // Depth-first order visits choices lexicographically, so the first
        // choice seen for a total is the smallest at its item count.
        let mut best: Vec<Option<Vec<(usize, u32)>>> = vec![None; cap as usize + 1];
        let mut current: Vec<(usize, u32)> = Vec::new();
        enumerate_choices(&refs, c, cap, 0, 0, &mut current, &mut |total, picks| {
            let slot = &mut best[total as usize];
            if slot.as_ref().is_none_or(|kept| picks.len() < kept.len()) {
                *slot = Some(picks.to_vec());
            }
        });

        let mut kept: Vec<(u32, Vec<(usize, u32)>)> = best
            .into_iter()
            .enumerate()
            .filter_map(|(t, p)| p.map(|p| (t as u32, p)))
            .collect();
        kept.sort_by(|a, b| a.1.cmp(&b.1));
        let slots = c.max_items_per_window as usize + 1;
        let mut by_total = vec![None; cap as usize + 1];
        let mut by_count: Vec<ReachableSet> = (0..slots).map(|_| ReachableSet::empty(cap)).collect();
        let mut ranked = vec![Vec::new(); slots];
        let mut picks_by_rank = Vec::with_capacity(kept.len());
        for (rank, (total, picks)) in kept.into_iter().enumerate() {
            by_count[picks.len()].insert(total);
            ranked[picks.len()].push((rank, total));
            by_total[total as usize] = Some((picks.len(), rank));
            picks_by_rank.push(picks);
        }
        WindowTable {
            order,
            by_total,
            picks_by_rank,
            by_count,
            ranked,
        }
    }

    fn get(&self, total: u32) -> Option<(usize, usize)> {
        self.by_total.get(total as usize).copied().flatten()
    }

    fn choice(&self, total: u32) -> WindowChoice {
        let (_, rank) = self.get(total).expect("reachable total");
        WindowChoice {
            picks: self.picks_by_rank[rank]
                .iter()
                .map(|&(i, q)| Pick::new(self.order[i].id.clone(), q))
                .collect(),
            total_kcal: total,
        }
    }

    fn totals(&self, cap: u32) -> ReachableSet {
        let mut set = ReachableSet::empty(cap);
        for k in &self.by_count {
            set.union_with(k);
        }
        set
    }
}

type PlanKey = (usize, usize, usize, usize);

/// Smallest (item count, r0, r1, r2) decomposition of `sum` across the three
/// windows. `tail[k1][k2]` holds the sums of window-1 totals using k1 items
/// and window-2 totals using k2 items.
fn decompose(tables: &[WindowTable; 3], tail: &[Vec<ReachableSet>], sum: u32) -> Option<(PlanKey, [u32; 3])> {
    let slots = tables[0].by_count.len();
    for n in 0..3 * slots {
        let mut best: Option<(PlanKey, [u32; 3])> = None;
        for k0 in 0..slots {
            for k1 in 0..slots {
                let Some(k2) = n.checked_sub(k0 + k1).filter(|&k2| k2 < slots) else {
                    continue;
                };
                let rest = &tail[k1][k2];
                let Some(&(r0, s0)) = tables[0].ranked[k0]
                    .iter()
                    .find(|&&(_, s0)| s0 <= sum && rest.contains(sum - s0))
                else {
                    continue;
                };
                let &(r1, s1) = tables[1].ranked[k1]
                    .iter()
                    .find(|&&(_, s1)| s1 <= sum - s0 && tables[2].by_count[k2].contains(sum - s0 - s1))
                    .expect("tail sum decomposes");
                let s2 = sum - s0 - s1;
                let r2 = tables[2].get(s2).expect("member total").1;
                let key = (n, r0, r1, r2);
                if best.as_ref().is_none_or(|(k, _)| key < *k) {
                    best = Some((key, [s0, s1, s2]));
                }
            }
        }
        if best.is_some() {
            return best;
        }
    }
    None
}

fn enumerate_choices(
    order: &[&FoodItem],
    c: &SelectionConstraints,
    cap: u32,
    next: usize,
    total: u32,
    current: &mut Vec<(usize, u32)>,
    visit: &mut dyn FnMut(u32, &[(usize, u32)]),
) {
    if current.len() >= c.min_items_per_window as usize {
        visit(total, current);
    }
    if current.len() == c.max_items_per_window as usize {
        return;
    }
    for i in next..order.len() {
        for q in 1..=c.max_quantity_per_item {
            let t = total + q * order[i].kcal_per_unit;
            if t > cap {
                break;
            }
            current.push((i, q));
            enumerate_choices(order, c, cap, i + 1, t, current, visit);
            current.pop();
        }
    }
}

/// Day plan minimizing |total − target|; ties go to fewer items, then to the
/// lexicographically smallest picks compared window by window.
pub fn best_plan(windows: DayPools<'_>, c: &SelectionConstraints, target: u32) -> Result<DayPlan, SolverError> {
    // Minimal day total, reached with one cheapest item per window when min = 1.
    let mut floor = 0u32;
    for (w, pool) in windows.iter().enumerate() {
        let min = window_reachable(pool, c)
            .min()
            .ok_or(SolverError::NoValidPlan { window: w })?;
        floor += min;
    }
    // Try a tight cap first; it settles the answer whenever the optimum lies
    // within it. Any total above max(2·target, floor) is farther from target
    // than a total already known to exist, so the loose cap always settles.
    let loose = floor.max(target.saturating_mul(2));
    let tight = target.saturating_add(NEAR_SLACK);
    if tight < loose {
        if let Some(plan) = plan_within(windows, c, target, tight) {
            return Ok(plan);
        }
    }
    Ok(plan_within(windows, c, target, loose).expect("floor total is reachable"))
}

/// Extra room above the target for the first, cheap pass of [`best_plan`].
const NEAR_SLACK: u32 = 64;

/// Best plan among totals ≤ `cap`, or `None` when a total above `cap` could
/// still be closer to `target`.
fn plan_within(windows: DayPools<'_>, c: &SelectionConstraints, target: u32, cap: u32) -> Option<DayPlan> {
    let tables = windows.map(|pool| WindowTable::build(pool, c, cap));
    let sets: Vec<ReachableSet> = tables.iter().map(|t| t.totals(cap)).collect();
    let day = sets[0].sumset(&sets[1], cap).sumset(&sets[2], cap);
    let deviation = day.nearest(target)?.abs_diff(target);
    if target.saturating_add(deviation) > cap {
        return None;
    }

    let candidates: Vec<u32> = [target.checked_sub(deviation), Some(target + deviation)]
        .into_iter()
        .flatten()
        .filter(|&s| day.contains(s))
        .collect();
    let tail: Vec<Vec<ReachableSet>> = tables[1]
        .by_count
        .iter()
        .map(|a| tables[2].by_count.iter().map(|b| a.sumset(b, cap)).collect())
        .collect();
    let (_, [s0, s1, s2]) = candidates
        .iter()
        .filter_map(|&sum| decompose(&tables, &tail, sum))
        .min_by(|a, b| a.0.cmp(&b.0))
        .expect("a candidate day total decomposes");
    Some(DayPlan::new(tables[0].choice(s0), tables[1].choice(s1), tables[2].choice(s2)))
}
