//! Versioned report envelope shared by every CLI command. JSON is the machine
//! interface; [`Report::to_text`] renders the same structure for people.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::conditions::{ClassReport, ConditionReport, DerivedMatrix, RegularityReport};
use crate::oracle::OracleReport;
use crate::space::Verdict;

pub const REPORT_VERSION: u32 = 1;

/// Observed traces keep this many final values unless full traces are asked for.
pub const TRACE_TAIL: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub version: u32,
    pub command: String,
    /// The flags that determine the result, normalized.
    pub query: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derived_matrix: Option<DerivedMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table_cell: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub conditions: Vec<ConditionReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<String>,
    /// Command-specific payload.
    #[serde(skip_serializing_if = "Value::is_null")]
    pub result: Value,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn trim(mut conditions: Vec<ConditionReport>, full: bool) -> Vec<ConditionReport> {
    if !full {
        for c in &mut conditions {
            let len = c.observed.len();
            if len > TRACE_TAIL {
                c.observed.drain(..len - TRACE_TAIL);
            }
        }
    }
    conditions
}

fn condition_witnesses(conditions: &[ConditionReport]) -> Vec<String> {
    conditions
        .iter()
        .filter_map(|c| c.witness.as_ref().map(|w| format!("{}: {} {}: {}", c.id, w.axis, w.index, w.detail)))
        .collect()
}

impl Report {
    pub fn new(command: impl Into<String>, query: BTreeMap<String, Value>) -> Self {
        Report {
            version: REPORT_VERSION,
            command: command.into(),
            query,
            verdict: None,
            derived_matrix: None,
            table_cell: None,
            conditions: Vec::new(),
            witnesses: Vec::new(),
            result: Value::Null,
            notes: Vec::new(),
        }
    }

    pub fn with_result(mut self, result: impl Serialize) -> Self {
        self.result = serde_json::to_value(result).expect("report payloads serialize");
        self
    }

    pub fn from_class(command: &str, query: BTreeMap<String, Value>, class: &ClassReport, full_trace: bool) -> Self {
        let mut r = Report::new(command, query);
        r.verdict = Some(class.verdict);
        r.derived_matrix = class.derived_matrix.clone();
        r.table_cell = Some(class.table_cell.clone());
        r.witnesses = condition_witnesses(&class.per_condition);
        r.witnesses.extend(
            class
                .side_checks
                .iter()
                .filter(|s| s.verdict == Verdict::Violated)
                .map(|s| format!("{}: {}", s.label, s.note)),
        );
        r.conditions = trim(class.per_condition.clone(), full_trace);
        r.notes = class.notes.clone();
        if !class.side_checks.is_empty() {
            r.result = serde_json::json!({ "side_checks": class.side_checks });
        }
        r
    }

    pub fn from_regularity(query: BTreeMap<String, Value>, reg: &RegularityReport, full_trace: bool) -> Self {
        let mut r = Report::new("regularity", query);
        r.verdict = Some(reg.verdict);
        r.witnesses = condition_witnesses(&reg.conditions);
        r.conditions = trim(reg.conditions.clone(), full_trace);
        r
    }

    pub fn from_oracle(query: BTreeMap<String, Value>, o: &OracleReport) -> Self {
        let mut r = Report::new("oracle", query);
        r.verdict = Some(o.verdict);
        r.witnesses = o.witnesses.clone();
        r.result = serde_json::json!({
            "samples": o.samples,
            "agreement": o.agreement,
            "per_sample": o.per_sample,
        });
        r
    }

    /// 0 satisfied, 1 violated, 2 inconclusive; 0 for reports without a verdict.
    pub fn exit_code(&self) -> i32 {
        self.verdict.map_or(0, Verdict::exit_code)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} (report v{})", self.command, self.version);
        for (k, v) in &self.query {
            let _ = writeln!(out, "  {k}: {}", plain(v));
        }
        if let Some(cell) = &self.table_cell {
            let _ = writeln!(out, "table cell: {cell}");
        }
        if let Some(d) = &self.derived_matrix {
            let _ = writeln!(out, "derived matrix {}: {} ({})", d.symbol, d.name, d.formula);
        }
        for c in &self.conditions {
            let value = c.value.map(|v| format!("  value {v:.6}")).unwrap_or_default();
            let _ = writeln!(out, "  {:<4} {:<12} {}{value}", c.id.as_str(), c.verdict.to_string(), c.statement);
            for n in &c.notes {
                let _ = writeln!(out, "         {n}");
            }
        }
        if !self.result.is_null() {
            render_value(&mut out, &self.result, 1);
        }
        for w in &self.witnesses {
            let _ = writeln!(out, "witness: {w}");
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        if let Some(v) = self.verdict {
            let _ = writeln!(out, "verdict: {v}");
        }
        out
    }
}

const TEXT_ITEMS: usize = 3;

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn render_value(out: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, item) in map {
                match item {
                    Value::Object(_) => {
                        let _ = writeln!(out, "{pad}{k}:");
                        render_value(out, item, depth + 1);
                    }
                    Value::Array(items) if items.iter().any(|i| i.is_object()) => {
                        let _ = writeln!(out, "{pad}{k}:");
                        for i in items.iter().take(TEXT_ITEMS) {
                            let _ = writeln!(out, "{pad}  - {}", compact(i));
                        }
                        if items.len() > TEXT_ITEMS {
                            let _ = writeln!(out, "{pad}  ... {} more (see --json)", items.len() - TEXT_ITEMS);
                        }
                    }
                    other => {
                        let _ = writeln!(out, "{pad}{k}: {}", plain(other));
                    }
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", plain(other));
        }
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::Object(map) => {
            let parts: Vec<String> = map.iter().map(|(k, x)| format!("{k}={}", plain(x))).collect();
            parts.join(", ")
        }
        other => plain(other),
    }
}
