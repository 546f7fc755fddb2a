//! Engine for the FoodCalorie planning game.
//!
//! A level asks the player to plan breakfast, lunch and dinner for a male and
//! a female of a given age, picking from six-item pools. Day totals are
//! scored against each gender's daily calorie target with symmetric star
//! bands. Levels are generated deterministically and certified winnable by an
//! exact reachable-sum solver.

pub mod analytics;
pub mod catalog;
pub mod levelgen;
pub mod requirements;
pub mod rng;
pub mod scoring;
pub mod solver;
pub mod store;

pub use catalog::{Catalog, FoodCategory, FoodItem, MeasurementUnit, ValidationMode};
pub use levelgen::{Level, LevelGenConfig, MealSlot, WindowPool};
pub use requirements::{CalorieRequirementTable, Gender, RequirementRow};
pub use scoring::{LevelResult, PlayerProfile, ScoringConfig, StarAward, Submission};
pub use solver::{DayPlan, Pick, ReachableSet, SelectionConstraints, WindowChoice};
