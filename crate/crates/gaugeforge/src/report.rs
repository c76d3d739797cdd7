//! Deterministic reports: sorted keys, floats as 17-significant-digit strings, no timing.

use std::collections::BTreeMap;

use gaugeforge_core::netlang::print::rational_string;
use gaugeforge_core::verdict::{conj, Evidence, Tag, Verdict};
use gaugeforge_core::Q;
use serde_json::{json, Map, Value};

use crate::error::{EXIT_FAILS, EXIT_HOLDS, EXIT_INCONCLUSIVE};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

/// One check: what was asked, which result of the theory it exercises, and the verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub name: String,
    pub anchor: String,
    pub verdict: Verdict,
    pub details: BTreeMap<String, Value>,
}

impl Record {
    pub fn new(name: impl Into<String>, anchor: impl Into<String>, verdict: Verdict) -> Self {
        Record { name: name.into(), anchor: anchor.into(), verdict, details: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: Value) -> Self {
        self.details.insert(key.into(), value);
        self
    }

    /// A failed operation reported as a `Fails` record.
    /// An error caused by a verdict keeps that verdict's tag when it is Inconclusive.
    pub fn caused(name: impl Into<String>, anchor: impl Into<String>, err: impl std::fmt::Display, cause: Option<&Verdict>) -> Self {
        let note = Evidence::Exact { note: err.to_string() };
        let Some(v) = cause else { return Record::new(name, anchor, Verdict::fails(note)) };
        let verdict = if v.is_inconclusive() { Verdict::inconclusive(note) } else { Verdict::fails(note) };
        Record::new(name, anchor, verdict).with("cause", verdict_json(v))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub records: Vec<Record>,
}

pub fn num(v: f64) -> Value {
    Value::String(float(v))
}

pub fn float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

pub fn rat(q: &Q) -> Value {
    Value::String(rational_string(q))
}

pub fn verdict_json(v: &Verdict) -> Value {
    json!({ "tag": v.tag.as_str(), "evidence": evidence_json(&v.evidence) })
}

fn evidence_json(e: &Evidence) -> Value {
    match e {
        Evidence::Symbolic { lhs, rhs, note } => json!({ "kind": "symbolic", "lhs": lhs, "rhs": rhs, "note": note }),
        Evidence::Bound { ln_h, eps0, slope } => json!({ "kind": "bound", "ln_h": num(*ln_h), "eps0": rat(eps0), "slope": num(*slope) }),
        Evidence::Witness { index, value, note } => json!({ "kind": "witness", "index": rat(index), "value": num(*value), "note": note }),
        Evidence::Cut { index, points } => json!({ "kind": "cut", "index": rat(index), "points": points }),
        Evidence::Trend { slope, points, note } => json!({ "kind": "trend", "slope": num(*slope), "points": points, "note": note }),
        Evidence::Exact { note } => json!({ "kind": "exact", "note": note }),
        Evidence::Parts(parts) => {
            let parts: Vec<Value> = parts.iter().map(|(n, v)| json!({ "name": n, "verdict": verdict_json(v) })).collect();
            json!({ "kind": "parts", "parts": parts })
        }
    }
}

impl Report {
    pub fn new(command: impl Into<String>, config: BTreeMap<String, String>) -> Self {
        Report { command: command.into(), config, records: Vec::new() }
    }

    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn tag(&self) -> Tag {
        conj(self.records.iter().map(|r| r.verdict.tag))
    }

    pub fn exit_code(&self) -> i32 {
        exit_code(self.tag())
    }

    pub fn to_value(&self) -> Value {
        let records: Vec<Value> = self
            .records
            .iter()
            .map(|r| {
                let details: Map<String, Value> = r.details.clone().into_iter().collect();
                json!({ "name": r.name, "anchor": r.anchor, "verdict": verdict_json(&r.verdict), "details": details })
            })
            .collect();
        json!({
            "tool": "gaugeforge",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "config": self.config,
            "records": records,
            "verdict": self.tag().as_str(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("report values serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("gaugeforge {} {}\n", env!("CARGO_PKG_VERSION"), self.command);
        for r in &self.records {
            s.push_str(&format!("[{:<12}] {} ({})\n", r.verdict.tag.as_str(), r.name, r.anchor));
            for (path, leaf) in r.verdict.leaves() {
                if !path.is_empty() && !leaf.is_holds() {
                    s.push_str(&format!("    {:<12} {}\n", leaf.tag.as_str(), path));
                }
            }
            for (k, v) in &r.details {
                s.push_str(&format!("    {k}: {}\n", text_value(v)));
            }
        }
        s.push_str(&format!("verdict: {}\n", self.tag().as_str()));
        s
    }

    pub fn render(&self, f: Format) -> String {
        match f {
            Format::Json => self.to_json(),
            Format::Text => self.to_text(),
        }
    }
}

fn text_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn exit_code(t: Tag) -> i32 {
    match t {
        Tag::Holds => EXIT_HOLDS,
        Tag::Fails => EXIT_FAILS,
        Tag::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(float(0.1), "1.0000000000000001e-1");
        assert_eq!(float(f64::INFINITY), "inf");
    }

    #[test]
    fn keys_are_sorted_and_exit_codes_follow_tags() {
        let mut r = Report::new("t", BTreeMap::new());
        r.push(Record::new("a", "x", Verdict::exact(true, "ok")).with("zeta", json!(1)).with("alpha", json!(2)));
        let s = r.to_json();
        assert!(s.find("\"alpha\"").unwrap() < s.find("\"zeta\"").unwrap());
        assert!(s.find("\"anchor\"").unwrap() < s.find("\"verdict\"").unwrap());
        assert_eq!(r.exit_code(), 0);
        r.push(Record::new("b", "x", Verdict::inconclusive(Evidence::Exact { note: "?".into() })));
        assert_eq!(r.exit_code(), 3);
        r.push(Record::new("c", "x", Verdict::exact(false, "no")));
        assert_eq!(r.exit_code(), 1);
    }
}
