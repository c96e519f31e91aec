//! Key/value world model against which behavior preconditions are evaluated.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::time::SimTime;

/// A scalar situation value as written in catalog and scenario files.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Bool(a), Scalar::Bool(b)) => a == b,
            (Scalar::Int(a), Scalar::Int(b)) => a == b,
            (Scalar::Float(a), Scalar::Float(b)) => a == b,
            (Scalar::Int(a), Scalar::Float(b)) | (Scalar::Float(b), Scalar::Int(a)) => {
                (*a as f64) == *b
            }
            (Scalar::Str(a), Scalar::Str(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Bool(v) => write!(f, "{v}"),
            Scalar::Int(v) => write!(f, "{v}"),
            Scalar::Float(v) => write!(f, "{v}"),
            Scalar::Str(v) => write!(f, "{v}"),
        }
    }
}

impl From<bool> for Scalar {
    fn from(v: bool) -> Self {
        Scalar::Bool(v)
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::Int(v)
    }
}

impl From<&str> for Scalar {
    fn from(v: &str) -> Self {
        Scalar::Str(v.to_string())
    }
}

/// One equality condition `key == value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SituationCondition {
    pub key: String,
    pub value: Scalar,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SituationMutation {
    pub at: SimTime,
    pub key: String,
    pub value: Scalar,
}

/// Situation store with a timestamped mutation log.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SituationStore {
    values: BTreeMap<String, Scalar>,
    log: Vec<SituationMutation>,
}

impl SituationStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_values<I, K>(values: I) -> Self
    where
        I: IntoIterator<Item = (K, Scalar)>,
        K: Into<String>,
    {
        Self {
            values: values.into_iter().map(|(k, v)| (k.into(), v)).collect(),
            log: Vec::new(),
        }
    }

    pub fn get(&self, key: &str) -> Option<&Scalar> {
        self.values.get(key)
    }

    pub fn set(&mut self, key: impl Into<String>, value: Scalar, at: SimTime) {
        let key = key.into();
        self.log.push(SituationMutation {
            at,
            key: key.clone(),
            value: value.clone(),
        });
        self.values.insert(key, value);
    }

    /// True iff every condition holds. A missing key never satisfies a condition.
    pub fn holds_all(&self, conditions: &[SituationCondition]) -> bool {
        conditions
            .iter()
            .all(|c| self.values.get(&c.key).is_some_and(|v| *v == c.value))
    }

    pub fn values(&self) -> &BTreeMap<String, Scalar> {
        &self.values
    }

    pub fn log(&self) -> &[SituationMutation] {
        &self.log
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjunction_requires_every_condition() {
        let store = SituationStore::from_values([("a", Scalar::Bool(true)), ("b", Scalar::Int(2))]);
        let ok = vec![
            SituationCondition {
                key: "a".into(),
                value: true.into(),
            },
            SituationCondition {
                key: "b".into(),
                value: Scalar::Float(2.0),
            },
        ];
        assert!(store.holds_all(&ok));
        let one_failing = vec![
            SituationCondition {
                key: "a".into(),
                value: true.into(),
            },
            SituationCondition {
                key: "b".into(),
                value: 3.into(),
            },
        ];
        assert!(!store.holds_all(&one_failing));
        assert!(store.holds_all(&[]));
        assert!(!store.holds_all(&[SituationCondition {
            key: "missing".into(),
            value: true.into()
        }]));
    }

    #[test]
    fn mutations_are_logged() {
        let mut store = SituationStore::new();
        store.set("flying", true.into(), SimTime::from_millis(1500));
        assert_eq!(store.get("flying"), Some(&Scalar::Bool(true)));
        assert_eq!(store.log().len(), 1);
        assert_eq!(store.log()[0].at, SimTime::from_millis(1500));
    }
}
