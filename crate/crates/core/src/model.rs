//! Measurements, measurands, objects and conditions of measurement.

use std::collections::BTreeMap;
use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueKind {
    Continuous,
    Percentage,
}

impl ValueKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ValueKind::Continuous => "continuous",
            ValueKind::Percentage => "percentage",
        }
    }
}

impl std::str::FromStr for ValueKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "continuous" => Ok(ValueKind::Continuous),
            "percentage" => Ok(ValueKind::Percentage),
            other => Err(format!(
                "unknown value kind `{other}` (expected continuous or percentage)"
            )),
        }
    }
}

/// The quantity intended to be measured, with the scale metadata needed to
/// shift values so that the scale starts at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurand {
    pub id: String,
    pub display_name: String,
    pub unit: String,
    #[serde(default)]
    pub scale_min: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale_max: Option<f64>,
    pub value_kind: ValueKind,
}

impl Measurand {
    /// A continuous measurand on `[0, ∞)` with the id doubling as display name.
    pub fn new(id: impl Into<String>) -> Self {
        let id = id.into();
        Measurand {
            display_name: id.clone(),
            id,
            unit: String::new(),
            scale_min: 0.0,
            scale_max: None,
            value_kind: ValueKind::Continuous,
        }
    }

    pub fn with_scale(mut self, min: f64, max: Option<f64>) -> Self {
        self.scale_min = min;
        self.scale_max = max;
        self
    }

    pub fn with_unit(mut self, unit: impl Into<String>) -> Self {
        self.unit = unit.into();
        self
    }

    pub fn with_display_name(mut self, name: impl Into<String>) -> Self {
        self.display_name = name.into();
        self
    }

    pub fn with_kind(mut self, kind: ValueKind) -> Self {
        self.value_kind = kind;
        self
    }
}

/// The thing measured: a ready-to-use system variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectRef {
    pub id: String,
    pub display_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

impl ObjectRef {
    pub fn new(id: impl Into<String>) -> Self {
        let id = id.into();
        ObjectRef {
            display_name: id.clone(),
            id,
            description: None,
        }
    }

    pub fn with_display_name(mut self, name: impl Into<String>) -> Self {
        self.display_name = name.into();
        self
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        self.description = Some(description.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionCategory {
    ObjectCondition,
    MeasurementMethod,
    MeasurementProcedure,
}

impl ConditionCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            ConditionCategory::ObjectCondition => "object_condition",
            ConditionCategory::MeasurementMethod => "measurement_method",
            ConditionCategory::MeasurementProcedure => "measurement_procedure",
        }
    }
}

impl std::str::FromStr for ConditionCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "object_condition" => Ok(ConditionCategory::ObjectCondition),
            "measurement_method" => Ok(ConditionCategory::MeasurementMethod),
            "measurement_procedure" => Ok(ConditionCategory::MeasurementProcedure),
            other => Err(format!("unknown condition category `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionDef {
    pub name: String,
    pub category: ConditionCategory,
}

/// Ordered, categorized condition names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionSchema {
    pub conditions: Vec<ConditionDef>,
}

impl ConditionSchema {
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.conditions.iter().map(|c| c.name.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&ConditionDef> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.get(name).is_some()
    }

    pub fn len(&self) -> usize {
        self.conditions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conditions.is_empty()
    }
}

impl Default for ConditionSchema {
    fn default() -> Self {
        default_condition_schema()
    }
}

/// The seven conditions of measurement: two object conditions, two
/// measurement-method conditions, three measurement-procedure conditions.
pub fn default_condition_schema() -> ConditionSchema {
    use ConditionCategory::*;
    let defs = [
        ("system_code", ObjectCondition),
        ("compile_training_info", ObjectCondition),
        ("method_specification", MeasurementMethod),
        ("implementation", MeasurementMethod),
        ("procedure", MeasurementProcedure),
        ("test_set", MeasurementProcedure),
        ("performed_by", MeasurementProcedure),
    ];
    ConditionSchema {
        conditions: defs
            .into_iter()
            .map(|(name, category)| ConditionDef {
                name: name.to_string(),
                category,
            })
            .collect(),
    }
}

/// Value of one condition for one measurement.
///
/// Known values compare by label. `Unknown` never matches anything,
/// including another `Unknown`; use [`ConditionValue::matches`] for that
/// comparison. The derived `PartialEq` is structural and exists for data
/// round-trips.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Option<String>", into = "Option<String>")]
pub enum ConditionValue {
    Known(String),
    Unknown,
}

impl ConditionValue {
    pub fn known(label: impl Into<String>) -> Self {
        ConditionValue::Known(label.into())
    }

    pub fn label(&self) -> Option<&str> {
        match self {
            ConditionValue::Known(l) => Some(l),
            ConditionValue::Unknown => None,
        }
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, ConditionValue::Unknown)
    }

    /// Same-condition-value test.
    pub fn matches(&self, other: &ConditionValue) -> bool {
        match (self, other) {
            (ConditionValue::Known(a), ConditionValue::Known(b)) => a == b,
            _ => false,
        }
    }
}

impl From<Option<String>> for ConditionValue {
    fn from(v: Option<String>) -> Self {
        match v {
            Some(l) if !l.is_empty() => ConditionValue::Known(l),
            _ => ConditionValue::Unknown,
        }
    }
}

impl From<ConditionValue> for Option<String> {
    fn from(v: ConditionValue) -> Self {
        match v {
            ConditionValue::Known(l) => Some(l),
            ConditionValue::Unknown => None,
        }
    }
}

impl fmt::Display for ConditionValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConditionValue::Known(l) => f.write_str(l),
            ConditionValue::Unknown => f.write_str("?"),
        }
    }
}

/// One measured quantity value for an (object, measurand) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub object: String,
    pub measurand: String,
    pub value: f64,
    pub conditions: BTreeMap<String, ConditionValue>,
    #[serde(default)]
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<NaiveDate>,
}

impl Measurement {
    pub fn new(object: impl Into<String>, measurand: impl Into<String>, value: f64) -> Self {
        Measurement {
            object: object.into(),
            measurand: measurand.into(),
            value,
            conditions: BTreeMap::new(),
            source: String::new(),
            timestamp: None,
        }
    }

    pub fn with_condition(mut self, name: impl Into<String>, value: ConditionValue) -> Self {
        self.conditions.insert(name.into(), value);
        self
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self
    }

    /// Condition value, `Unknown` when absent.
    pub fn condition(&self, name: &str) -> &ConditionValue {
        static UNKNOWN: ConditionValue = ConditionValue::Unknown;
        self.conditions.get(name).unwrap_or(&UNKNOWN)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown measurand `{0}`")]
    UnknownMeasurand(String),
    #[error("no measurements for object `{object}` and measurand `{measurand}`")]
    EmptyGroup { object: String, measurand: String },
}

/// A complete set of measurements with its declarations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QraDataset {
    pub schema: ConditionSchema,
    pub objects: Vec<ObjectRef>,
    pub measurands: Vec<Measurand>,
    pub measurements: Vec<Measurement>,
}

impl QraDataset {
    pub fn object(&self, id: &str) -> Option<&ObjectRef> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub fn measurand(&self, id: &str) -> Option<&Measurand> {
        self.measurands.iter().find(|m| m.id == id)
    }

    /// All measurements for the pair, in dataset order.
    pub fn group(&self, object: &str, measurand: &str) -> Result<Vec<&Measurement>, GroupError> {
        if self.object(object).is_none() {
            return Err(GroupError::UnknownObject(object.to_string()));
        }
        if self.measurand(measurand).is_none() {
            return Err(GroupError::UnknownMeasurand(measurand.to_string()));
        }
        let found: Vec<_> = self
            .measurements
            .iter()
            .filter(|m| m.object == object && m.measurand == measurand)
            .collect();
        if found.is_empty() {
            return Err(GroupError::EmptyGroup {
                object: object.to_string(),
                measurand: measurand.to_string(),
            });
        }
        Ok(found)
    }

    /// Distinct (object, measurand) pairs with their sizes, ordered by first
    /// appearance.
    pub fn pairs(&self) -> Vec<(String, String, usize)> {
        let mut out: Vec<(String, String, usize)> = Vec::new();
        for m in &self.measurements {
            match out
                .iter_mut()
                .find(|(o, q, _)| *o == m.object && *q == m.measurand)
            {
                Some(entry) => entry.2 += 1,
                None => out.push((m.object.clone(), m.measurand.clone(), 1)),
            }
        }
        out
    }
}

/// Free-function form of [`QraDataset::group`].
pub fn group<'a>(
    dataset: &'a QraDataset,
    object: &str,
    measurand: &str,
) -> Result<Vec<&'a Measurement>, GroupError> {
    dataset.group(object, measurand)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_schema_layout() {
        let schema = default_condition_schema();
        assert_eq!(schema.len(), 7);
        let count = |c| schema.conditions.iter().filter(|d| d.category == c).count();
        assert_eq!(count(ConditionCategory::ObjectCondition), 2);
        assert_eq!(count(ConditionCategory::MeasurementMethod), 2);
        assert_eq!(count(ConditionCategory::MeasurementProcedure), 3);
        assert_eq!(schema.conditions[0].name, "system_code");
        assert_eq!(
            schema.conditions[0].category,
            ConditionCategory::ObjectCondition
        );
        assert_eq!(
            schema.names().collect::<Vec<_>>(),
            [
                "system_code",
                "compile_training_info",
                "method_specification",
                "implementation",
                "procedure",
                "test_set",
                "performed_by"
            ]
        );
        assert_eq!(schema, default_condition_schema());
    }

    #[test]
    fn unknown_matches_nothing() {
        let a = ConditionValue::known("x");
        assert!(a.matches(&ConditionValue::known("x")));
        assert!(!a.matches(&ConditionValue::known("y")));
        assert!(!a.matches(&ConditionValue::Unknown));
        assert!(!ConditionValue::Unknown.matches(&ConditionValue::Unknown));
    }

    #[test]
    fn condition_value_serde() {
        let v: Vec<ConditionValue> = serde_json::from_str(r#"["a", null, ""]"#).unwrap();
        assert_eq!(
            v,
            vec![
                ConditionValue::known("a"),
                ConditionValue::Unknown,
                ConditionValue::Unknown
            ]
        );
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"["a",null,null]"#);
    }

    fn tiny() -> QraDataset {
        QraDataset {
            schema: default_condition_schema(),
            objects: vec![ObjectRef::new("A"), ObjectRef::new("B")],
            measurands: vec![Measurand::new("m")],
            measurements: vec![
                Measurement::new("A", "m", 1.0),
                Measurement::new("B", "m", 2.0),
                Measurement::new("A", "m", 3.0),
            ],
        }
    }

    #[test]
    fn group_errors() {
        let ds = tiny();
        assert_eq!(
            ds.group("Z", "m"),
            Err(GroupError::UnknownObject("Z".into()))
        );
        assert_eq!(
            ds.group("A", "q"),
            Err(GroupError::UnknownMeasurand("q".into()))
        );
        let mut ds2 = ds.clone();
        ds2.objects.push(ObjectRef::new("C"));
        assert!(matches!(
            ds2.group("C", "m"),
            Err(GroupError::EmptyGroup { .. })
        ));
        let values: Vec<f64> = ds
            .group("A", "m")
            .unwrap()
            .iter()
            .map(|m| m.value)
            .collect();
        assert_eq!(values, [1.0, 3.0]);
        assert_eq!(
            ds.pairs(),
            vec![("A".into(), "m".into(), 2), ("B".into(), "m".into(), 1)]
        );
    }
}
