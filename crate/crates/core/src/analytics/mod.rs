//! Pre/post study statistics: descriptive moments, the pooled two-sample
//! t-test, and per-group knowledge gain and attempt averages.

pub mod report;
pub mod special;

use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use special::student_t_two_tailed;

/// Level numbers played in the study, in CSV column order.
pub const STUDY_LEVELS: [u32; 5] = [5, 20, 35, 46, 65];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profession {
    Student,
    Doctor,
    ServiceHolder,
    Teacher,
    Housewife,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Proficiency {
    Beginner,
    Intermediate,
    Expert,
}

impl fmt::Display for Profession {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profession::Student => "student",
            Profession::Doctor => "doctor",
            Profession::ServiceHolder => "service_holder",
            Profession::Teacher => "teacher",
            Profession::Housewife => "housewife",
        })
    }
}

impl fmt::Display for Proficiency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Proficiency::Beginner => "beginner",
            Proficiency::Intermediate => "intermediate",
            Proficiency::Expert => "expert",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRecord {
    pub participant_id: String,
    pub age: u32,
    pub profession: Profession,
    pub proficiency: Proficiency,
    pub pre_score: f64,
    pub post_score: f64,
    pub attempts_per_level: BTreeMap<u32, u32>,
}

#[derive(Debug, Deserialize)]
struct CsvRow {
    participant_id: String,
    age: u32,
    profession: Profession,
    proficiency: Proficiency,
    pre_score: f64,
    post_score: f64,
    attempts_l5: u32,
    attempts_l20: u32,
    attempts_l35: u32,
    attempts_l46: u32,
    attempts_l65: u32,
}

#[derive(Debug, thiserror::Error)]
pub enum AnalyticsError {
    #[error("sample of size {0} is too small (need at least 2)")]
    SampleTooSmall(usize),
    #[error("zero pooled variance with different means; t is unbounded")]
    PerfectSeparation,
    #[error("no records")]
    NoRecords,
    #[error("cannot read study data: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed study CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("participant {id}: {field} {value} outside [0, 1]")]
    ScoreRange { id: String, field: &'static str, value: f64 },
}

pub fn read_study_csv(reader: impl Read) -> Result<Vec<StudyRecord>, AnalyticsError> {
    let mut out = Vec::new();
    for row in csv::Reader::from_reader(reader).deserialize::<CsvRow>() {
        let row = row?;
        for (field, value) in [("pre_score", row.pre_score), ("post_score", row.post_score)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(AnalyticsError::ScoreRange {
                    id: row.participant_id,
                    field,
                    value,
                });
            }
        }
        let attempts = [
            row.attempts_l5,
            row.attempts_l20,
            row.attempts_l35,
            row.attempts_l46,
            row.attempts_l65,
        ];
        out.push(StudyRecord {
            participant_id: row.participant_id,
            age: row.age,
            profession: row.profession,
            proficiency: row.proficiency,
            pre_score: row.pre_score,
            post_score: row.post_score,
            attempts_per_level: STUDY_LEVELS.into_iter().zip(attempts).collect(),
        });
    }
    Ok(out)
}

pub fn load_study_csv(path: &Path) -> Result<Vec<StudyRecord>, AnalyticsError> {
    read_study_csv(std::fs::File::open(path)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Descriptive {
    pub mean: f64,
    pub sd: f64,
    pub variance: f64,
}

/// Mean, sample standard deviation and sample variance (n − 1 denominator).
pub fn descriptive_stats(sample: &[f64]) -> Result<Descriptive, AnalyticsError> {
    let n = sample.len();
    if n < 2 {
        return Err(AnalyticsError::SampleTooSmall(n));
    }
    let mean = sample.iter().sum::<f64>() / n as f64;
    let variance = sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Ok(Descriptive {
        mean,
        sd: variance.sqrt(),
        variance,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StudySummary {
    pub n_pre: usize,
    pub n_post: usize,
    pub mean_pre: f64,
    pub mean_post: f64,
    pub sd_pre: f64,
    pub sd_post: f64,
    pub var_pre: f64,
    pub var_post: f64,
    pub t_value: f64,
    pub degrees_of_freedom: u32,
    pub p_value_two_tailed: f64,
}

/// Student's equal-variance two-sample t-test; `t` is positive when `b`'s
/// mean exceeds `a`'s.
pub fn pooled_t_test(a: &[f64], b: &[f64]) -> Result<StudySummary, AnalyticsError> {
    let da = descriptive_stats(a)?;
    let db = descriptive_stats(b)?;
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let df = a.len() + b.len() - 2;
    let pooled = ((n1 - 1.0) * da.variance + (n2 - 1.0) * db.variance) / df as f64;
    let diff = db.mean - da.mean;
    let (t, p) = if pooled == 0.0 {
        if diff != 0.0 {
            return Err(AnalyticsError::PerfectSeparation);
        }
        (0.0, 1.0)
    } else {
        let t = diff / (pooled * (1.0 / n1 + 1.0 / n2)).sqrt();
        (t, student_t_two_tailed(t, df as f64))
    };
    Ok(StudySummary {
        n_pre: a.len(),
        n_post: b.len(),
        mean_pre: da.mean,
        mean_post: db.mean,
        sd_pre: da.sd,
        sd_post: db.sd,
        var_pre: da.variance,
        var_post: db.variance,
        t_value: t,
        degrees_of_freedom: df as u32,
        p_value_two_tailed: p,
    })
}

/// Pre vs post t-test over study records.
pub fn study_summary(records: &[StudyRecord]) -> Result<StudySummary, AnalyticsError> {
    let pre: Vec<f64> = records.iter().map(|r| r.pre_score).collect();
    let post: Vec<f64> = records.iter().map(|r| r.post_score).collect();
    pooled_t_test(&pre, &post)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKey {
    Profession,
    Proficiency,
    /// Ten-year buckets, e.g. "30-39".
    AgeBucket,
}

impl GroupKey {
    pub const ALL: [GroupKey; 3] = [GroupKey::Profession, GroupKey::Proficiency, GroupKey::AgeBucket];

    pub fn label(&self, record: &StudyRecord) -> String {
        match self {
            GroupKey::Profession => record.profession.to_string(),
            GroupKey::Proficiency => record.proficiency.to_string(),
            GroupKey::AgeBucket => {
                let lo = record.age / 10 * 10;
                format!("{lo}-{}", lo + 9)
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GroupKey::Profession => "profession",
            GroupKey::Proficiency => "proficiency",
            GroupKey::AgeBucket => "age",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupEnhancement {
    pub participants: usize,
    pub mean_pre_pct: f64,
    pub mean_post_pct: f64,
    pub delta_pct: f64,
}

fn group_by<'a>(records: &'a [StudyRecord], key: GroupKey) -> BTreeMap<String, Vec<&'a StudyRecord>> {
    let mut groups: BTreeMap<String, Vec<&StudyRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(key.label(r)).or_default().push(r);
    }
    groups
}

/// Mean pre/post score per group, in percent, with the gain.
pub fn group_enhancement(
    records: &[StudyRecord],
    key: GroupKey,
) -> Result<BTreeMap<String, GroupEnhancement>, AnalyticsError> {
    if records.is_empty() {
        return Err(AnalyticsError::NoRecords);
    }
    Ok(group_by(records, key)
        .into_iter()
        .map(|(label, rs)| {
            let n = rs.len() as f64;
            let pre = 100.0 * rs.iter().map(|r| r.pre_score).sum::<f64>() / n;
            let post = 100.0 * rs.iter().map(|r| r.post_score).sum::<f64>() / n;
            let g = GroupEnhancement {
                participants: rs.len(),
                mean_pre_pct: pre,
                mean_post_pct: post,
                delta_pct: post - pre,
            };
            (label, g)
        })
        .collect())
}

/// Mean attempts per study level for each group.
pub fn average_attempts(records: &[StudyRecord], key: GroupKey) -> BTreeMap<String, f64> {
    group_by(records, key)
        .into_iter()
        .map(|(label, rs)| {
            let per_record: Vec<f64> = rs
                .iter()
                .map(|r| {
                    let levels = r.attempts_per_level.len().max(1) as f64;
                    r.attempts_per_level.values().sum::<u32>() as f64 / levels
                })
                .collect();
            (label, per_record.iter().sum::<f64>() / per_record.len() as f64)
        })
        .collect()
}
