//! Daily calorie targets per age and gender.
//!
//! Each row carries the sedentary and moderately-active recommendation; the
//! game target is their mean, rounded half-up.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub const REQUIREMENTS_ENV: &str = "FOODCAL_REQS";

const DEFAULT_TABLE_JSON: &str = include_str!("../data/requirements.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Male,
    Female,
}

impl Gender {
    pub const ALL: [Gender; 2] = [Gender::Male, Gender::Female];

    pub fn as_str(self) -> &'static str {
        match self {
            Gender::Male => "male",
            Gender::Female => "female",
        }
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Gender {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "male" | "m" => Ok(Gender::Male),
            "female" | "f" => Ok(Gender::Female),
            other => Err(format!("unknown gender \"{other}\"")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequirementRow {
    pub age: u32,
    pub gender: Gender,
    #[serde(rename = "sedentary_kcal")]
    pub sedentary_kcal: u32,
    #[serde(rename = "moderate_kcal")]
    pub moderate_kcal: u32,
}

impl RequirementRow {
    /// Mean of the two activity levels, half-up.
    pub fn target(&self) -> u32 {
        (self.sedentary_kcal + self.moderate_kcal).div_ceil(2)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RequirementsError {
    #[error("cannot read requirement table {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed requirement table: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("incomplete requirement table: {}", .0.join(", "))]
    Coverage(Vec<String>),
    #[error("invalid requirement table: {}", .0.join("; "))]
    Validation(Vec<String>),
    #[error("age {age} outside table span {min}..={max}")]
    AgeOutOfRange { age: u32, min: u32, max: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CalorieRequirementTable {
    rows: BTreeMap<(u32, Gender), RequirementRow>,
    age_min: u32,
    age_max: u32,
}

impl CalorieRequirementTable {
    pub fn builtin() -> CalorieRequirementTable {
        CalorieRequirementTable::from_json_str(DEFAULT_TABLE_JSON)
            .expect("builtin requirement table is valid")
    }

    pub fn from_env() -> Result<CalorieRequirementTable, RequirementsError> {
        match std::env::var_os(REQUIREMENTS_ENV) {
            Some(path) => load_requirement_table(Path::new(&path)),
            None => Ok(CalorieRequirementTable::builtin()),
        }
    }

    pub fn from_json_str(json: &str) -> Result<CalorieRequirementTable, RequirementsError> {
        let rows: Vec<RequirementRow> = serde_json::from_str(json)?;
        CalorieRequirementTable::from_rows(rows)
    }

    /// Builds a table whose span is the min..=max age present in `rows`.
    pub fn from_rows(rows: Vec<RequirementRow>) -> Result<CalorieRequirementTable, RequirementsError> {
        let age_min = rows.iter().map(|r| r.age).min();
        let age_max = rows.iter().map(|r| r.age).max();
        match (age_min, age_max) {
            (Some(min), Some(max)) => CalorieRequirementTable::with_span(rows, min, max),
            _ => Err(RequirementsError::Coverage(vec!["table has no rows".into()])),
        }
    }

    pub fn with_span(
        rows: Vec<RequirementRow>,
        age_min: u32,
        age_max: u32,
    ) -> Result<CalorieRequirementTable, RequirementsError> {
        let mut problems = Vec::new();
        let mut map = BTreeMap::new();
        for row in rows {
            if row.age < age_min || row.age > age_max {
                problems.push(format!("{} age {} outside span {age_min}..={age_max}", row.gender, row.age));
            }
            if row.sedentary_kcal == 0 {
                problems.push(format!("{} age {}: sedentary_kcal must be positive", row.gender, row.age));
            }
            if row.moderate_kcal < row.sedentary_kcal {
                problems.push(format!(
                    "{} age {}: moderate_kcal {} < sedentary_kcal {}",
                    row.gender, row.age, row.moderate_kcal, row.sedentary_kcal
                ));
            }
            if map.insert((row.age, row.gender), row).is_some() {
                problems.push(format!("{} age {} listed twice", row.gender, row.age));
            }
        }
        if !problems.is_empty() {
            return Err(RequirementsError::Validation(problems));
        }

        let missing: Vec<String> = (age_min..=age_max)
            .flat_map(|age| Gender::ALL.map(|g| (age, g)))
            .filter(|key| !map.contains_key(key))
            .map(|(age, g)| format!("{g} age {age} missing"))
            .collect();
        if !missing.is_empty() {
            return Err(RequirementsError::Coverage(missing));
        }

        Ok(CalorieRequirementTable {
            rows: map,
            age_min,
            age_max,
        })
    }

    pub fn age_min(&self) -> u32 {
        self.age_min
    }

    pub fn age_max(&self) -> u32 {
        self.age_max
    }

    pub fn span_len(&self) -> usize {
        (self.age_max - self.age_min + 1) as usize
    }

    pub fn row(&self, age: u32, gender: Gender) -> Result<&RequirementRow, RequirementsError> {
        self.rows
            .get(&(age, gender))
            .ok_or(RequirementsError::AgeOutOfRange {
                age,
                min: self.age_min,
                max: self.age_max,
            })
    }

    pub fn rows(&self) -> impl Iterator<Item = &RequirementRow> {
        self.rows.values()
    }

    pub fn daily_target(&self, age: u32, gender: Gender) -> Result<u32, RequirementsError> {
        self.row(age, gender).map(RequirementRow::target)
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<&RequirementRow> = self.rows.values().collect();
        serde_json::to_string_pretty(&rows).expect("rows serialize")
    }
}

pub fn load_requirement_table(path: &Path) -> Result<CalorieRequirementTable, RequirementsError> {
    let text = std::fs::read_to_string(path).map_err(|source| RequirementsError::Io {
        path: path.display().to_string(),
        source,
    })?;
    CalorieRequirementTable::from_json_str(&text)
}
