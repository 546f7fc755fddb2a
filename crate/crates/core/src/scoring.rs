//! Star awards, level passing and player progress.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::levelgen::{Level, MealSlot};
use crate::requirements::Gender;
use crate::solver::{DayPlan, Pick, PickError, SelectionConstraints, WindowChoice};

pub const DEFAULT_PASS_THRESHOLD: u32 = 4;

/// Deviation limits for 3, 2 and 1 stars. Bands are symmetric and
/// checked in that order; anything outside the last band earns nothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum StarBands {
    /// Absolute kcal deviation.
    Absolute { three: u32, two: u32, one: u32 },
    /// Deviation as a percentage of the required kcal.
    Percent { three: u32, two: u32, one: u32 },
}

impl Default for StarBands {
    fn default() -> Self {
        StarBands::Absolute {
            three: 5,
            two: 10,
            one: 20,
        }
    }
}

impl StarBands {
    pub fn stars(&self, selected: u32, required: u32) -> u8 {
        let deviation = selected.abs_diff(required) as u64;
        let within = |limit: u32| match self {
            StarBands::Absolute { .. } => deviation <= limit as u64,
            StarBands::Percent { .. } => deviation * 100 <= limit as u64 * required as u64,
        };
        let (three, two, one) = match *self {
            StarBands::Absolute { three, two, one } | StarBands::Percent { three, two, one } => (three, two, one),
        };
        if within(three) {
            3
        } else if within(two) {
            2
        } else if within(one) {
            1
        } else {
            0
        }
    }
}

/// Stars under the default ±5 / ±10 / ±20 kcal bands.
pub fn score_stars(selected: u32, required: u32) -> u8 {
    StarBands::default().stars(selected, required)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoringConfig {
    pub bands: StarBands,
    pub pass_threshold: u32,
    pub constraints: SelectionConstraints,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        Self {
            bands: StarBands::default(),
            pass_threshold: DEFAULT_PASS_THRESHOLD,
            constraints: SelectionConstraints::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarAward {
    pub gender: Gender,
    pub selected_kcal: u32,
    pub required_kcal: u32,
    pub stars: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelResult {
    pub level_number: u32,
    pub male: StarAward,
    pub female: StarAward,
    pub total_stars: u32,
    pub passed: bool,
    pub attempt_number: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayerProfile {
    pub player_id: String,
    pub levels_tried: BTreeSet<u32>,
    pub levels_passed: BTreeSet<u32>,
    pub attempt_counts: BTreeMap<u32, u32>,
    pub best_stars: BTreeMap<u32, u32>,
}

impl PlayerProfile {
    pub fn new(player_id: impl Into<String>) -> Self {
        Self {
            player_id: player_id.into(),
            ..Self::default()
        }
    }

    pub fn summary(&self, total_levels: u32) -> ProfileSummary {
        profile_summary(self, total_levels)
    }

    pub fn check_invariants(&self) -> Result<(), String> {
        if !self.levels_passed.is_subset(&self.levels_tried) {
            return Err("passed levels not all tried".into());
        }
        for level in &self.levels_tried {
            if self.attempt_counts.get(level).copied().unwrap_or(0) < 1 {
                return Err(format!("level {level} tried without attempts"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileSummary {
    pub total_levels: u32,
    pub levels_tried: u32,
    pub levels_passed: u32,
    pub total_attempts: u32,
}

pub fn profile_summary(profile: &PlayerProfile, total_levels: u32) -> ProfileSummary {
    ProfileSummary {
        total_levels,
        levels_tried: profile.levels_tried.len() as u32,
        levels_passed: profile.levels_passed.len() as u32,
        total_attempts: profile.attempt_counts.values().sum(),
    }
}

/// Picks for one gender's breakfast, lunch and dinner.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MealPicks {
    pub breakfast: Vec<Pick>,
    pub lunch: Vec<Pick>,
    pub dinner: Vec<Pick>,
}

impl MealPicks {
    pub fn get(&self, meal: MealSlot) -> &[Pick] {
        match meal {
            MealSlot::Breakfast => &self.breakfast,
            MealSlot::Lunch => &self.lunch,
            MealSlot::Dinner => &self.dinner,
        }
    }

    pub fn get_mut(&mut self, meal: MealSlot) -> &mut Vec<Pick> {
        match meal {
            MealSlot::Breakfast => &mut self.breakfast,
            MealSlot::Lunch => &mut self.lunch,
            MealSlot::Dinner => &mut self.dinner,
        }
    }
}

impl From<&DayPlan> for MealPicks {
    fn from(plan: &DayPlan) -> Self {
        MealPicks {
            breakfast: plan.breakfast.picks.clone(),
            lunch: plan.lunch.picks.clone(),
            dinner: plan.dinner.picks.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Submission {
    #[serde(rename = "level")]
    pub level_number: u32,
    pub male: MealPicks,
    pub female: MealPicks,
}

impl Submission {
    pub fn picks(&self, gender: Gender) -> &MealPicks {
        match gender {
            Gender::Male => &self.male,
            Gender::Female => &self.female,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScoringError {
    #[error("{gender} {meal}: {source}")]
    IllegalPick {
        gender: Gender,
        meal: MealSlot,
        #[source]
        source: PickError,
    },
    #[error("submission is for level {submitted}, not level {expected}")]
    LevelMismatch { submitted: u32, expected: u32 },
    #[error("level references unknown item: {0}")]
    UnknownItem(String),
}

/// Validates a gender's picks into a day plan.
pub fn plan_for(
    level: &Level,
    catalog: &Catalog,
    gender: Gender,
    picks: &MealPicks,
    constraints: &SelectionConstraints,
) -> Result<DayPlan, ScoringError> {
    let pools = level.pools(catalog, gender).map_err(ScoringError::UnknownItem)?;
    let mut choices = Vec::with_capacity(3);
    for (meal, pool) in MealSlot::ALL.iter().zip(&pools) {
        let choice = WindowChoice::from_picks(pool, picks.get(*meal), constraints).map_err(|source| {
            ScoringError::IllegalPick {
                gender,
                meal: *meal,
                source,
            }
        })?;
        choices.push(choice);
    }
    let dinner = choices.pop().expect("three windows");
    let lunch = choices.pop().expect("three windows");
    let breakfast = choices.pop().expect("three windows");
    Ok(DayPlan::new(breakfast, lunch, dinner))
}

/// Scores a submission and returns the updated profile. The input profile is
/// never modified; an illegal submission leaves progress untouched.
pub fn evaluate_submission(
    level: &Level,
    submission: &Submission,
    profile: &PlayerProfile,
    catalog: &Catalog,
    cfg: &ScoringConfig,
) -> Result<(LevelResult, PlayerProfile), ScoringError> {
    if submission.level_number != level.level_number {
        return Err(ScoringError::LevelMismatch {
            submitted: submission.level_number,
            expected: level.level_number,
        });
    }
    let mut awards = Vec::with_capacity(2);
    for gender in Gender::ALL {
        let plan = plan_for(level, catalog, gender, submission.picks(gender), &cfg.constraints)?;
        let required = level.target(gender);
        awards.push(StarAward {
            gender,
            selected_kcal: plan.day_total_kcal,
            required_kcal: required,
            stars: cfg.bands.stars(plan.day_total_kcal, required),
        });
    }
    let female = awards.pop().expect("female award");
    let male = awards.pop().expect("male award");

    let n = level.level_number;
    let total_stars = male.stars as u32 + female.stars as u32;
    let passed = total_stars >= cfg.pass_threshold;

    let mut updated = profile.clone();
    updated.levels_tried.insert(n);
    let attempts = updated.attempt_counts.entry(n).or_insert(0);
    *attempts += 1;
    let attempt_number = *attempts;
    if passed {
        updated.levels_passed.insert(n);
    }
    let best = updated.best_stars.entry(n).or_insert(0);
    *best = (*best).max(total_stars);

    Ok((
        LevelResult {
            level_number: n,
            male,
            female,
            total_stars,
            passed,
            attempt_number,
        },
        updated,
    ))
}

/// Where a player is within one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SessionPhase {
    /// Filling window `index` (0..6, male breakfast first).
    Selecting { index: usize },
    /// All windows filled, awaiting submit.
    Review,
    Finished(LevelResult),
}

/// Walks one level window by window: select, advance, review, submit.
#[derive(Debug, Clone)]
pub struct PlaySession<'a> {
    level: &'a Level,
    catalog: &'a Catalog,
    cfg: ScoringConfig,
    draft: Submission,
    phase: SessionPhase,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SessionError {
    #[error("action not allowed in phase {0}")]
    WrongPhase(&'static str),
    #[error(transparent)]
    Scoring(#[from] ScoringError),
}

fn window_slot(index: usize) -> (Gender, MealSlot) {
    let gender = if index < 3 { Gender::Male } else { Gender::Female };
    (gender, MealSlot::ALL[index % 3])
}

impl<'a> PlaySession<'a> {
    pub fn new(level: &'a Level, catalog: &'a Catalog, cfg: ScoringConfig) -> Self {
        Self {
            level,
            catalog,
            cfg,
            draft: Submission {
                level_number: level.level_number,
                male: MealPicks::default(),
                female: MealPicks::default(),
            },
            phase: SessionPhase::Selecting { index: 0 },
        }
    }

    pub fn phase(&self) -> &SessionPhase {
        &self.phase
    }

    pub fn draft(&self) -> &Submission {
        &self.draft
    }

    /// Replaces the current window's picks; returns the window's running total.
    pub fn select(&mut self, picks: Vec<Pick>) -> Result<u32, SessionError> {
        let SessionPhase::Selecting { index } = self.phase else {
            return Err(SessionError::WrongPhase("select"));
        };
        let (gender, meal) = window_slot(index);
        let pools = self
            .level
            .pools(self.catalog, gender)
            .map_err(ScoringError::UnknownItem)?;
        let pool = &pools[index % 3];
        let choice = WindowChoice::from_picks(pool, &picks, &self.cfg.constraints)
            .map_err(|source| ScoringError::IllegalPick { gender, meal, source })?;
        let target = match gender {
            Gender::Male => &mut self.draft.male,
            Gender::Female => &mut self.draft.female,
        };
        *target.get_mut(meal) = picks;
        Ok(choice.total_kcal)
    }

    /// Moves to the next window once the current one holds a legal choice.
    pub fn advance(&mut self) -> Result<(), SessionError> {
        let SessionPhase::Selecting { index } = self.phase else {
            return Err(SessionError::WrongPhase("advance"));
        };
        let (gender, meal) = window_slot(index);
        let picks = self.draft.picks(gender).get(meal);
        let pools = self
            .level
            .pools(self.catalog, gender)
            .map_err(ScoringError::UnknownItem)?;
        WindowChoice::from_picks(&pools[index % 3], picks, &self.cfg.constraints)
            .map_err(|source| ScoringError::IllegalPick { gender, meal, source })?;
        self.phase = if index == 5 {
            SessionPhase::Review
        } else {
            SessionPhase::Selecting { index: index + 1 }
        };
        Ok(())
    }

    pub fn back(&mut self) -> Result<(), SessionError> {
        self.phase = match self.phase {
            SessionPhase::Selecting { index } if index > 0 => SessionPhase::Selecting { index: index - 1 },
            SessionPhase::Review => SessionPhase::Selecting { index: 5 },
            _ => return Err(SessionError::WrongPhase("back")),
        };
        Ok(())
    }

    pub fn submit(&mut self, profile: &PlayerProfile) -> Result<(LevelResult, PlayerProfile), SessionError> {
        if self.phase != SessionPhase::Review {
            return Err(SessionError::WrongPhase("submit"));
        }
        let (result, updated) = evaluate_submission(self.level, &self.draft, profile, self.catalog, &self.cfg)?;
        self.phase = SessionPhase::Finished(result.clone());
        Ok((result, updated))
    }
}
