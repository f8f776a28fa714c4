//! QRA tests: group measurements for an (object, measurand) pair, compare
//! their conditions of measurement, classify the test, and compute precision.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    ConditionSchema, ConditionValue, GroupError, Measurand, Measurement, ObjectRef, QraDataset,
};
use crate::precision::{cv_star_pipeline, PrecisionResult, StatsError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QraError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("measurements mix objects or measurands ({0})")]
    MixedGroup(String),
    #[error("no measurements to compare")]
    NoMeasurements,
    #[error("condition `{0}` is not in the dataset schema")]
    UnknownCondition(String),
}

impl QraError {
    /// True for failures of the statistics rather than of the data lookup.
    pub fn is_computation(&self) -> bool {
        matches!(
            self,
            QraError::Stats(_) | QraError::Group(GroupError::EmptyGroup { .. })
        )
    }
}

pub type Result<T> = std::result::Result<T, QraError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    /// Every value is Known and all labels are equal.
    AllSame,
    /// At least two Known labels differ.
    Differs,
    /// Some value is Unknown and no two Known labels differ.
    HasUnknown,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::AllSame => "AllSame",
            Verdict::Differs => "Differs",
            Verdict::HasUnknown => "HasUnknown",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    Repeatability,
    Reproducibility,
    Indeterminate,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Repeatability => "Repeatability",
            Classification::Reproducibility => "Reproducibility",
            Classification::Indeterminate => "Indeterminate",
        }
    }
}

/// Per-measurement condition values in schema order, plus a per-condition
/// verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionDiffMatrix {
    pub conditions: Vec<String>,
    pub rows: Vec<Vec<ConditionValue>>,
    pub verdicts: Vec<Verdict>,
}

impl ConditionDiffMatrix {
    pub fn verdict(&self, condition: &str) -> Option<Verdict> {
        self.conditions
            .iter()
            .position(|c| c == condition)
            .map(|i| self.verdicts[i])
    }

    pub fn classification(&self) -> Classification {
        classify(&self.verdicts)
    }
}

/// Repeatability when every condition is the same, reproducibility when any
/// condition is known to differ, indeterminate otherwise.
pub fn classify(verdicts: &[Verdict]) -> Classification {
    if verdicts.contains(&Verdict::Differs) {
        Classification::Reproducibility
    } else if verdicts.iter().all(|v| *v == Verdict::AllSame) {
        Classification::Repeatability
    } else {
        Classification::Indeterminate
    }
}

fn column_verdict<'a>(values: impl Iterator<Item = &'a ConditionValue>) -> Verdict {
    let mut first: Option<&str> = None;
    let mut unknown = false;
    for v in values {
        match v.label() {
            None => unknown = true,
            Some(l) => match first {
                None => first = Some(l),
                Some(f) if f != l => return Verdict::Differs,
                Some(_) => {}
            },
        }
    }
    if unknown {
        Verdict::HasUnknown
    } else {
        Verdict::AllSame
    }
}

/// Builds the condition matrix for measurements of a single (object,
/// measurand) pair.
pub fn condition_diff<'a, I>(
    measurements: I,
    schema: &ConditionSchema,
) -> Result<ConditionDiffMatrix>
where
    I: IntoIterator<Item = &'a Measurement>,
{
    let measurements: Vec<&Measurement> = measurements.into_iter().collect();
    let first = measurements.first().ok_or(QraError::NoMeasurements)?;
    if let Some(odd) = measurements
        .iter()
        .find(|m| m.object != first.object || m.measurand != first.measurand)
    {
        return Err(QraError::MixedGroup(format!(
            "{}/{} vs {}/{}",
            first.object, first.measurand, odd.object, odd.measurand
        )));
    }
    let conditions: Vec<String> = schema.names().map(str::to_string).collect();
    let rows: Vec<Vec<ConditionValue>> = measurements
        .iter()
        .map(|m| conditions.iter().map(|c| m.condition(c).clone()).collect())
        .collect();
    let verdicts = (0..conditions.len())
        .map(|col| column_verdict(rows.iter().map(|r| &r[col])))
        .collect();
    Ok(ConditionDiffMatrix {
        conditions,
        rows,
        verdicts,
    })
}

/// Result of one QRA test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QraReport {
    pub object: ObjectRef,
    pub measurand: Measurand,
    pub measurements: Vec<Measurement>,
    /// Group members filtered out by a subgroup predicate.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub excluded: Vec<Measurement>,
    pub diff: ConditionDiffMatrix,
    pub classification: Classification,
    pub precision: PrecisionResult,
}

impl QraReport {
    pub fn values(&self) -> Vec<f64> {
        self.measurements.iter().map(|m| m.value).collect()
    }
}

/// One conjunct of a subgroup filter: `condition` must be Known and equal to
/// `label`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionMatch {
    pub condition: String,
    pub label: String,
}

impl ConditionMatch {
    pub fn new(condition: impl Into<String>, label: impl Into<String>) -> Self {
        ConditionMatch {
            condition: condition.into(),
            label: label.into(),
        }
    }

    pub fn matches(&self, m: &Measurement) -> bool {
        m.condition(&self.condition).label() == Some(self.label.as_str())
    }
}

/// QRA test over the full group.
pub fn run_qra_test(dataset: &QraDataset, object: &str, measurand: &str) -> Result<QraReport> {
    subgroup_assess_by(dataset, object, measurand, |_| true)
}

/// QRA test over the measurements matching every condition in `predicate`.
pub fn subgroup_assess(
    dataset: &QraDataset,
    object: &str,
    measurand: &str,
    predicate: &[ConditionMatch],
) -> Result<QraReport> {
    if let Some(bad) = predicate
        .iter()
        .find(|p| !dataset.schema.contains(&p.condition))
    {
        return Err(QraError::UnknownCondition(bad.condition.clone()));
    }
    subgroup_assess_by(dataset, object, measurand, |m| {
        predicate.iter().all(|p| p.matches(m))
    })
}

/// QRA test over the measurements accepted by an arbitrary filter.
pub fn subgroup_assess_by<F>(
    dataset: &QraDataset,
    object: &str,
    measurand: &str,
    keep: F,
) -> Result<QraReport>
where
    F: Fn(&Measurement) -> bool,
{
    let group = dataset.group(object, measurand)?;
    let (included, excluded): (Vec<&Measurement>, Vec<&Measurement>) =
        group.into_iter().partition(|m| keep(m));
    if included.is_empty() {
        return Err(GroupError::EmptyGroup {
            object: object.to_string(),
            measurand: measurand.to_string(),
        }
        .into());
    }
    // `group` has already checked both ids.
    let object_ref = dataset.object(object).cloned().expect("declared object");
    let measurand_ref = dataset
        .measurand(measurand)
        .cloned()
        .expect("declared measurand");

    let values: Vec<f64> = included.iter().map(|m| m.value).collect();
    let precision = cv_star_pipeline(&values, measurand_ref.scale_min)?;
    let diff = condition_diff(included.iter().copied(), &dataset.schema)?;
    Ok(QraReport {
        object: object_ref,
        measurand: measurand_ref,
        classification: diff.classification(),
        measurements: included.into_iter().cloned().collect(),
        excluded: excluded.into_iter().cloned().collect(),
        diff,
        precision,
    })
}

/// Runs a QRA test for every pair with at least two measurements, in order of
/// first appearance in the dataset.
pub fn assess_all(dataset: &QraDataset) -> Result<Vec<QraReport>> {
    let pairs: Vec<(String, String)> = dataset
        .pairs()
        .into_iter()
        .filter(|(_, _, n)| *n >= 2)
        .map(|(o, m, _)| (o, m))
        .collect();
    pairs
        .par_iter()
        .map(|(o, m)| run_qra_test(dataset, o, m))
        .collect()
}
