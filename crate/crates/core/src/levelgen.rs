//! Deterministic level generation.
//!
//! A level covers one age. It has six windows (male breakfast, lunch, dinner,
//! then female), each offering six distinct items: one rice, one bread and
//! four items from the remaining categories. A sampled level is kept only if
//! the solver certifies both genders can reach the 1-star band; otherwise
//! the whole level is resampled from the next PRNG stream.
//!
//! Draw order per window (all from one SplitMix64 stream): rice index, bread
//! index, then a partial Fisher–Yates over the concatenated non-staple pool
//! (catalog order) for the four remaining slots.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, FoodCategory, FoodItem};
use crate::requirements::{CalorieRequirementTable, Gender, RequirementsError};
use crate::rng::{level_seed, stream_seed, SplitMix64};
use crate::solver::{self, SelectionConstraints};

pub const WINDOW_SIZE: usize = 6;
pub const DEFAULT_LEVEL_COUNT: usize = 96;
/// Width of the 1-star band; a level is winnable if a plan lands inside it.
pub const WINNABILITY_TOLERANCE: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MealSlot {
    Breakfast,
    Lunch,
    Dinner,
}

impl MealSlot {
    pub const ALL: [MealSlot; 3] = [MealSlot::Breakfast, MealSlot::Lunch, MealSlot::Dinner];
}

impl fmt::Display for MealSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MealSlot::Breakfast => "breakfast",
            MealSlot::Lunch => "lunch",
            MealSlot::Dinner => "dinner",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowPool {
    pub gender: Gender,
    pub meal: MealSlot,
    pub item_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    #[serde(rename = "level")]
    pub level_number: u32,
    pub age: u32,
    pub seed: u64,
    pub male_target: u32,
    pub female_target: u32,
    pub windows: Vec<WindowPool>,
}

impl Level {
    pub fn target(&self, gender: Gender) -> u32 {
        match gender {
            Gender::Male => self.male_target,
            Gender::Female => self.female_target,
        }
    }

    pub fn window(&self, gender: Gender, meal: MealSlot) -> &WindowPool {
        let offset = match gender {
            Gender::Male => 0,
            Gender::Female => 3,
        };
        let index = MealSlot::ALL.iter().position(|&m| m == meal).expect("meal slot");
        &self.windows[offset + index]
    }

    /// Resolves a gender's three pools against the catalog.
    pub fn pools(&self, catalog: &Catalog, gender: Gender) -> Result<[Vec<FoodItem>; 3], String> {
        let resolve = |meal| -> Result<Vec<FoodItem>, String> {
            self.window(gender, meal)
                .item_ids
                .iter()
                .map(|id| {
                    catalog
                        .get(id)
                        .cloned()
                        .ok_or_else(|| format!("item \"{id}\" not in catalog"))
                })
                .collect()
        };
        Ok([resolve(MealSlot::Breakfast)?, resolve(MealSlot::Lunch)?, resolve(MealSlot::Dinner)?])
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("level serializes")
    }
}

/// How the two staple slots of a window are filled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StapleRule {
    /// One rice item and one bread item.
    #[default]
    OneEach,
    /// Two items drawn from rice ∪ bread.
    TwoFromUnion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelGenConfig {
    pub constraints: SelectionConstraints,
    pub staple_rule: StapleRule,
    pub tolerance: u32,
    pub max_resamples: u32,
    /// Require the requirement table to span exactly `level_count` ages.
    pub strict_span: bool,
    pub level_count: usize,
}

impl Default for LevelGenConfig {
    fn default() -> Self {
        Self {
            constraints: SelectionConstraints::default(),
            staple_rule: StapleRule::OneEach,
            tolerance: WINNABILITY_TOLERANCE,
            max_resamples: 1000,
            strict_span: true,
            level_count: DEFAULT_LEVEL_COUNT,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LevelGenError {
    #[error(transparent)]
    AgeOutOfRange(#[from] RequirementsError),
    #[error("no winnable level for age {age} after {attempts} samples")]
    UnwinnableCatalog { age: u32, attempts: u32 },
    #[error("catalog cannot fill a window: {0}")]
    InsufficientItems(String),
    #[error("requirement table spans {found} ages, expected {expected}")]
    SpanMismatch { expected: usize, found: usize },
    #[error("invalid selection constraints: {0}")]
    InvalidConstraints(String),
}

struct CategoryPools<'a> {
    rice: Vec<&'a FoodItem>,
    bread: Vec<&'a FoodItem>,
    staples: Vec<&'a FoodItem>,
    others: Vec<&'a FoodItem>,
}

impl<'a> CategoryPools<'a> {
    fn new(catalog: &'a Catalog, rule: StapleRule) -> Result<Self, LevelGenError> {
        let of = |cat| catalog.items.iter().filter(move |i| i.category == cat);
        let pools = CategoryPools {
            rice: of(FoodCategory::Rice).collect(),
            bread: of(FoodCategory::Bread).collect(),
            staples: catalog.items.iter().filter(|i| i.category.is_staple()).collect(),
            others: catalog.items.iter().filter(|i| !i.category.is_staple()).collect(),
        };
        let staples_ok = match rule {
            StapleRule::OneEach => !pools.rice.is_empty() && !pools.bread.is_empty(),
            StapleRule::TwoFromUnion => pools.staples.len() >= 2,
        };
        if !staples_ok {
            return Err(LevelGenError::InsufficientItems("not enough rice/bread items".into()));
        }
        if pools.others.len() < WINDOW_SIZE - 2 {
            return Err(LevelGenError::InsufficientItems(format!(
                "{} non-staple items, need {}",
                pools.others.len(),
                WINDOW_SIZE - 2
            )));
        }
        Ok(pools)
    }

    fn sample_window(&self, rule: StapleRule, rng: &mut SplitMix64) -> Vec<String> {
        let mut ids = Vec::with_capacity(WINDOW_SIZE);
        match rule {
            StapleRule::OneEach => {
                ids.push(self.rice[rng.below(self.rice.len() as u64) as usize].id.clone());
                ids.push(self.bread[rng.below(self.bread.len() as u64) as usize].id.clone());
            }
            StapleRule::TwoFromUnion => ids.extend(partial_shuffle(&self.staples, 2, rng)),
        }
        ids.extend(partial_shuffle(&self.others, WINDOW_SIZE - 2, rng));
        ids
    }
}

/// First `k` elements of a Fisher–Yates shuffle of `items`.
fn partial_shuffle(items: &[&FoodItem], k: usize, rng: &mut SplitMix64) -> Vec<String> {
    let mut order: Vec<usize> = (0..items.len()).collect();
    for i in 0..k {
        let j = i + rng.below((order.len() - i) as u64) as usize;
        order.swap(i, j);
    }
    order[..k].iter().map(|&i| items[i].id.clone()).collect()
}

/// Generates the level for `age`. Deterministic in all arguments.
pub fn generate_level(
    catalog: &Catalog,
    reqs: &CalorieRequirementTable,
    age: u32,
    seed: u64,
    cfg: &LevelGenConfig,
) -> Result<Level, LevelGenError> {
    cfg.constraints.validate().map_err(LevelGenError::InvalidConstraints)?;
    let male_target = reqs.daily_target(age, Gender::Male)?;
    let female_target = reqs.daily_target(age, Gender::Female)?;
    let level_number = age - reqs.age_min() + 1;
    let pools = CategoryPools::new(catalog, cfg.staple_rule)?;

    for stream in 0..cfg.max_resamples {
        let mut rng = SplitMix64::new(stream_seed(seed, stream));
        let mut windows = Vec::with_capacity(6);
        for gender in Gender::ALL {
            for meal in MealSlot::ALL {
                windows.push(WindowPool {
                    gender,
                    meal,
                    item_ids: pools.sample_window(cfg.staple_rule, &mut rng),
                });
            }
        }
        let level = Level {
            level_number,
            age,
            seed,
            male_target,
            female_target,
            windows,
        };
        if is_winnable(&level, catalog, cfg) {
            return Ok(level);
        }
    }
    Err(LevelGenError::UnwinnableCatalog {
        age,
        attempts: cfg.max_resamples,
    })
}

/// Both genders can land within `cfg.tolerance` of their targets.
pub fn is_winnable(level: &Level, catalog: &Catalog, cfg: &LevelGenConfig) -> bool {
    Gender::ALL.iter().all(|&g| match level.pools(catalog, g) {
        Ok([b, l, d]) => solver::feasible([&b, &l, &d], &cfg.constraints, level.target(g), cfg.tolerance),
        Err(_) => false,
    })
}

/// Generates one level per age of the table, level `i` for `age_min + i − 1`.
pub fn generate_all_levels(
    catalog: &Catalog,
    reqs: &CalorieRequirementTable,
    master_seed: u64,
    cfg: &LevelGenConfig,
) -> Result<Vec<Level>, LevelGenError> {
    if cfg.strict_span && reqs.span_len() != cfg.level_count {
        return Err(LevelGenError::SpanMismatch {
            expected: cfg.level_count,
            found: reqs.span_len(),
        });
    }
    (1..=reqs.span_len() as u32)
        .map(|n| {
            let age = reqs.age_min() + n - 1;
            generate_level(catalog, reqs, age, level_seed(master_seed, n), cfg)
        })
        .collect()
}

/// Structural and winnability violations of a level; empty when valid.
pub fn audit_level(
    level: &Level,
    catalog: &Catalog,
    reqs: &CalorieRequirementTable,
    cfg: &LevelGenConfig,
) -> Vec<String> {
    let mut problems = Vec::new();
    if level.windows.len() != 6 {
        problems.push(format!("{} windows, expected 6", level.windows.len()));
        return problems;
    }
    let order = Gender::ALL.iter().flat_map(|&g| MealSlot::ALL.map(|m| (g, m)));
    for (window, (gender, meal)) in level.windows.iter().zip(order) {
        let name = format!("{gender} {meal}");
        if (window.gender, window.meal) != (gender, meal) {
            problems.push(format!("window order broken at {name}"));
        }
        if window.item_ids.len() != WINDOW_SIZE {
            problems.push(format!("{name}: {} items", window.item_ids.len()));
        }
        let mut ids = window.item_ids.clone();
        ids.sort();
        ids.dedup();
        if ids.len() != window.item_ids.len() {
            problems.push(format!("{name}: duplicate items"));
        }
        let cats: Vec<Option<FoodCategory>> = window
            .item_ids
            .iter()
            .map(|id| catalog.get(id).map(|i| i.category))
            .collect();
        if cats.contains(&None) {
            problems.push(format!("{name}: unknown item"));
            continue;
        }
        let count = |c| cats.iter().filter(|&&x| x == Some(c)).count();
        let (rice, bread) = (count(FoodCategory::Rice), count(FoodCategory::Bread));
        let staple_ok = match cfg.staple_rule {
            StapleRule::OneEach => rice == 1 && bread == 1,
            StapleRule::TwoFromUnion => rice + bread == 2,
        };
        if !staple_ok {
            problems.push(format!("{name}: {rice} rice and {bread} bread items"));
        }
    }
    for g in Gender::ALL {
        match reqs.daily_target(level.age, g) {
            Ok(t) if t == level.target(g) => {}
            _ => problems.push(format!("{g} target does not match the table")),
        }
    }
    if problems.is_empty() && !is_winnable(level, catalog, cfg) {
        problems.push(format!("not winnable at ±{}", cfg.tolerance));
    }
    problems
}
