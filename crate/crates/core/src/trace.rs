//! Trace records: one per activation change or termination.

use std::fmt::Write as _;

use serde::Serialize;

use crate::catalog::Catalog;
use crate::coordinator::{ActivationDelta, DeltaEntry};
use crate::csp::{Priority, TerminationCause};
use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Change {
    #[serde(rename = "+")]
    Activate,
    #[serde(rename = "-")]
    Deactivate,
}

impl Change {
    pub fn symbol(self) -> char {
        match self {
            Change::Activate => '+',
            Change::Deactivate => '-',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceLine {
    pub time: SimTime,
    pub behavior: String,
    pub priority: Priority,
    pub change: Change,
    pub success: bool,
    pub cause: Option<TerminationCause>,
}

#[derive(Serialize)]
struct JsonLine<'a> {
    t_ms: u64,
    behavior: &'a str,
    #[serde(rename = "P")]
    priority: Priority,
    #[serde(rename = "T")]
    change: Change,
    #[serde(rename = "S")]
    success: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    cause: Option<TerminationCause>,
}

impl TraceLine {
    pub fn to_json(&self) -> String {
        let line = JsonLine {
            t_ms: self.time.as_millis(),
            behavior: &self.behavior,
            priority: self.priority,
            change: self.change,
            success: if self.success { "Y" } else { "N" },
            cause: self.cause,
        };
        serde_json::to_string(&line).expect("trace line serializes")
    }

    pub fn to_text(&self, width: usize) -> String {
        let mut s = format!(
            "{:>9}  {:<width$}  {:>2}  {}  {}",
            self.time.to_string(),
            self.behavior,
            self.priority,
            self.change.symbol(),
            if self.success { 'Y' } else { 'N' },
        );
        if let Some(c) = self.cause {
            let _ = write!(s, "  {c}");
        }
        s
    }
}

pub fn text_header(width: usize) -> String {
    format!(
        "{:>9}  {:<width$}  {:>2}  T  S  cause",
        "time", "behavior", "P"
    )
}

/// Name column width for a catalog.
pub fn name_width(catalog: &Catalog) -> usize {
    catalog
        .behavior_ids()
        .map(|b| catalog.behavior_name(b).len())
        .chain(catalog.task_ids().map(|t| catalog.task_name(t).len()))
        .max()
        .unwrap_or(0)
        .max("behavior".len())
}

/// Lines for one delta; coordinator-initiated stops carry INTERRUPTED.
pub fn delta_lines(catalog: &Catalog, delta: &ActivationDelta, time: SimTime) -> Vec<TraceLine> {
    let line = |e: &DeltaEntry, change, cause| TraceLine {
        time,
        behavior: e.subject.name(catalog).to_string(),
        priority: e.priority,
        change,
        success: e.success,
        cause,
    };
    let mut out = Vec::with_capacity(delta.len());
    for e in &delta.deactivations {
        out.push(line(
            e,
            Change::Deactivate,
            Some(e.cause.unwrap_or(TerminationCause::Interrupted)),
        ));
    }
    for e in &delta.activations {
        out.push(line(e, Change::Activate, None));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> TraceLine {
        TraceLine {
            time: SimTime::from_millis(5500),
            behavior: "PNPLocalizer".into(),
            priority: 1,
            change: Change::Deactivate,
            success: true,
            cause: Some(TerminationCause::SituationChange),
        }
    }

    #[test]
    fn json_shape() {
        assert_eq!(
            sample().to_json(),
            r#"{"t_ms":5500,"behavior":"PNPLocalizer","P":1,"T":"-","S":"Y","cause":"SITUATION_CHANGE"}"#
        );
        let act = TraceLine {
            change: Change::Activate,
            cause: None,
            success: false,
            ..sample()
        };
        assert_eq!(
            act.to_json(),
            r#"{"t_ms":5500,"behavior":"PNPLocalizer","P":1,"T":"+","S":"N"}"#
        );
    }

    #[test]
    fn text_shape() {
        assert_eq!(
            sample().to_text(14),
            "    5.500  PNPLocalizer     1  -  Y  SITUATION_CHANGE"
        );
        assert_eq!(
            text_header(14),
            "     time  behavior         P  T  S  cause"
        );
    }
}
