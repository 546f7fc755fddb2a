use std::collections::HashSet;

use foodcal_core::levelgen::{self, LevelGenConfig, StapleRule};
use foodcal_core::rng::level_seed;
use foodcal_core::solver::{self, WindowChoice};
use foodcal_core::{CalorieRequirementTable, Catalog, FoodCategory, Gender, Level, MealSlot};
use proptest::prelude::*;

fn engine() -> (Catalog, CalorieRequirementTable) {
    (Catalog::builtin(), CalorieRequirementTable::builtin())
}

fn check_structure(level: &Level, catalog: &Catalog, rule: StapleRule) -> Result<(), String> {
    if level.windows.len() != 6 {
        return Err(format!("level {} has {} windows", level.level_number, level.windows.len()));
    }
    for w in &level.windows {
        let ids: HashSet<&str> = w.item_ids.iter().map(String::as_str).collect();
        if w.item_ids.len() != 6 || ids.len() != 6 {
            return Err(format!("level {} {} {}: {:?}", level.level_number, w.gender, w.meal, w.item_ids));
        }
        let mut rice = 0;
        let mut bread = 0;
        for id in &w.item_ids {
            match catalog.get(id).ok_or(format!("unknown item {id}"))?.category {
                FoodCategory::Rice => rice += 1,
                FoodCategory::Bread => bread += 1,
                _ => {}
            }
        }
        let ok = match rule {
            StapleRule::OneEach => rice == 1 && bread == 1,
            StapleRule::TwoFromUnion => rice + bread == 2,
        };
        if !ok {
            return Err(format!("level {} window has {rice} rice / {bread} bread", level.level_number));
        }
    }
    Ok(())
}

/// Certifies a level by asking for a witness plan and re-adding it by hand.
fn certified(level: &Level, catalog: &Catalog, cfg: &LevelGenConfig) -> bool {
    Gender::ALL.iter().all(|&g| {
        let [b, l, d] = level.pools(catalog, g).unwrap();
        let Ok(plan) = solver::best_plan([&b, &l, &d], &cfg.constraints, level.target(g)) else {
            return false;
        };
        let mut total = 0;
        for (pool, choice) in [&b, &l, &d].into_iter().zip(plan.windows()) {
            match WindowChoice::from_picks(pool, &choice.picks, &cfg.constraints) {
                Ok(c) => total += c.total_kcal,
                Err(_) => return false,
            }
        }
        total.abs_diff(level.target(g)) <= cfg.tolerance
    })
}

#[test]
fn all_levels_structure_and_mapping() {
    let (cat, reqs) = engine();
    let cfg = LevelGenConfig::default();
    let levels = levelgen::generate_all_levels(&cat, &reqs, 0, &cfg).unwrap();
    assert_eq!(levels.len(), 96);
    for (i, level) in levels.iter().enumerate() {
        assert_eq!(level.level_number as usize, i + 1);
        assert_eq!(level.age, 3 + i as u32);
        assert_eq!(level.male_target, reqs.daily_target(level.age, Gender::Male).unwrap());
        assert_eq!(level.female_target, reqs.daily_target(level.age, Gender::Female).unwrap());
        let order: Vec<(Gender, MealSlot)> = level.windows.iter().map(|w| (w.gender, w.meal)).collect();
        let want: Vec<(Gender, MealSlot)> =
            Gender::ALL.iter().flat_map(|&g| MealSlot::ALL.map(|m| (g, m))).collect();
        assert_eq!(order, want);
        check_structure(level, &cat, StapleRule::OneEach).unwrap();
        assert!(levelgen::audit_level(level, &cat, &reqs, &cfg).is_empty());
    }
}

#[test]
fn matches_reference_sampler() {
    // Windows produced by a separate implementation of the sampling procedure.
    let (cat, reqs) = engine();
    let levels = levelgen::generate_all_levels(&cat, &reqs, 0, &LevelGenConfig::default()).unwrap();
    let ids = |n: usize, w: usize| levels[n - 1].windows[w].item_ids.clone();
    assert_eq!(ids(1, 0), ["fried_rice", "puri", "singara", "begun_bharta", "chicken_korma", "hilsa_curry"]);
    assert_eq!(ids(1, 4), ["polao", "roti", "duck_curry", "jackfruit", "chingri_malai", "watermelon"]);
    assert_eq!(ids(2, 2), ["biriyani", "naan", "singara", "rui_fish_curry", "fuchka", "shutki_bhuna"]);
    assert_eq!(ids(50, 3), ["fried_rice", "roti", "beef_curry", "chingri_malai", "apple", "boiled_egg"]);
    assert_eq!(ids(50, 5), ["plain_rice", "slice_bread", "begun_bharta", "singara", "chicken_curry", "chotpoti"]);
}

#[test]
fn union_mode_levels_are_winnable() {
    let (cat, reqs) = engine();
    let cfg = LevelGenConfig {
        staple_rule: StapleRule::TwoFromUnion,
        ..LevelGenConfig::default()
    };
    for level in levelgen::generate_all_levels(&cat, &reqs, 99, &cfg).unwrap() {
        check_structure(&level, &cat, StapleRule::TwoFromUnion).unwrap();
        assert!(certified(&level, &cat, &cfg));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn pure_function_of_inputs(seed in any::<u64>()) {
        let (cat, reqs) = engine();
        let cfg = LevelGenConfig::default();
        let a = levelgen::generate_all_levels(&cat, &reqs, seed, &cfg).unwrap();
        let b = levelgen::generate_all_levels(&cat, &reqs, seed, &cfg).unwrap();
        prop_assert_eq!(&a, &b);
        for n in [1u32, 48, 96] {
            let single = levelgen::generate_level(&cat, &reqs, 2 + n, level_seed(seed, n), &cfg).unwrap();
            prop_assert_eq!(&single, &a[n as usize - 1]);
        }
    }

    #[test]
    fn every_level_has_a_checked_witness(seed in any::<u64>()) {
        let (cat, reqs) = engine();
        let cfg = LevelGenConfig::default();
        for level in levelgen::generate_all_levels(&cat, &reqs, seed, &cfg).unwrap() {
            prop_assert!(check_structure(&level, &cat, StapleRule::OneEach).is_ok());
            prop_assert!(certified(&level, &cat, &cfg), "level {} not certified", level.level_number);
        }
    }
}
