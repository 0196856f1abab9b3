//! The run report: a JSON document, with the text form rendered from it.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// Failed, and the scenario declares this failure as expected.
    ExpectedFail,
}

impl Status {
    fn tag(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::ExpectedFail => "XFAIL",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">")]
    Above,
    #[serde(rename = "<=")]
    AtMost,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Below => "<",
            Relation::Above => ">",
            Relation::AtMost => "<=",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, relation: Relation, tolerance: f64) -> Self {
        let ok = match relation {
            Relation::Below => value < tolerance,
            Relation::Above => value > tolerance,
            Relation::AtMost => value <= tolerance,
        };
        Check {
            name: name.into(),
            value,
            relation,
            tolerance,
            status: if ok { Status::Pass } else { Status::Fail },
            detail: None,
        }
    }

    pub fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self::new(name, value, Relation::Below, tolerance)
    }

    pub fn above(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self::new(name, value, Relation::Above, tolerance)
    }

    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self::new(name, value, Relation::AtMost, tolerance)
    }

    /// A check that could not be evaluated; it fails with `value = NaN`.
    pub fn failed(name: impl Into<String>, tolerance: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            value: f64::NAN,
            relation: Relation::Below,
            tolerance,
            status: Status::Fail,
            detail: Some(detail.into()),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Section {
    pub name: String,
    pub checks: Vec<Check>,
    pub data: Map<String, Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Section {
    pub fn new(name: impl Into<String>) -> Self {
        Section {
            name: name.into(),
            checks: Vec::new(),
            data: Map::new(),
            notes: Vec::new(),
        }
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn put(&mut self, key: &str, value: impl Serialize) {
        self.data.insert(
            key.to_string(),
            serde_json::to_value(value).expect("serializable report data"),
        );
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Binding {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub scenario: String,
    pub seed: u64,
    pub bindings: Vec<Binding>,
    pub sections: Vec<Section>,
    pub status: Status,
}

impl Report {
    pub fn new(
        command: &str,
        scenario: &str,
        seed: u64,
        bindings: Vec<Binding>,
        sections: Vec<Section>,
    ) -> Self {
        let failed = sections
            .iter()
            .flat_map(|s| &s.checks)
            .any(|c| c.status == Status::Fail);
        Report {
            command: command.into(),
            scenario: scenario.into(),
            seed,
            bindings,
            sections,
            status: if failed { Status::Fail } else { Status::Pass },
        }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Human-readable rendering of the JSON document.
    pub fn to_text(&self) -> String {
        let doc = serde_json::to_value(self).expect("report serializes");
        let mut out = String::new();
        let _ = writeln!(
            out,
            "weylconn {} -- scenario {} (seed {})",
            self.command, self.scenario, self.seed
        );
        if !self.bindings.is_empty() {
            let b: Vec<String> = self
                .bindings
                .iter()
                .map(|b| format!("{}={}", b.name, b.value))
                .collect();
            let _ = writeln!(out, "bindings: {}", b.join(", "));
        }
        for (section, json) in self
            .sections
            .iter()
            .zip(doc["sections"].as_array().into_iter().flatten())
        {
            let _ = writeln!(out, "\n[{}]", section.name);
            for c in &section.checks {
                let _ = write!(
                    out,
                    "  {:<5} {}: {} {} {}",
                    c.status.tag(),
                    c.name,
                    fmt_num(c.value),
                    c.relation.symbol(),
                    fmt_num(c.tolerance)
                );
                if let Some(d) = &c.detail {
                    let _ = write!(out, "  ({d})");
                }
                out.push('\n');
            }
            if let Some(data) = json["data"].as_object() {
                for (k, v) in data {
                    let _ = writeln!(out, "  {k}: {}", render(v));
                }
            }
            for n in &section.notes {
                let _ = writeln!(out, "  note: {n}");
            }
        }
        let _ = writeln!(out, "\nstatus: {}", self.status.tag());
        out
    }
}

fn fmt_num(v: f64) -> String {
    if v == 0.0 || (1e-3..1e6).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:.6e}")
    }
}

fn render(v: &Value) -> String {
    match v {
        Value::Number(n) => n.as_f64().map(fmt_num).unwrap_or_else(|| n.to_string()),
        Value::Array(items) => format!(
            "[{}]",
            items.iter().map(render).collect::<Vec<_>>().join(", ")
        ),
        Value::Object(map) => format!(
            "{{{}}}",
            map.iter()
                .map(|(k, v)| format!("{k}: {}", render(v)))
                .collect::<Vec<_>>()
                .join(", ")
        ),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_aggregation() {
        let mut s = Section::new("x");
        s.check(Check::below("a", 1e-12, 1e-10));
        let r = Report::new("verify", "demo", 0, vec![], vec![s.clone()]);
        assert!(r.passed());
        s.check(Check::below("b", 1.0, 1e-10));
        let r = Report::new("verify", "demo", 0, vec![], vec![s]);
        assert!(!r.passed());
        assert!(r.to_text().contains("FAIL  b: 1 < 1.000000e-10"));
    }

    #[test]
    fn json_is_stable() {
        let mut s = Section::new("x");
        s.put("zeta", 1.5);
        s.put("alpha", vec![1.0, 2.0]);
        let r = Report::new("c", "n", 3, vec![], vec![s]);
        let j = r.to_json();
        assert_eq!(j, r.clone().to_json());
        assert!(j.find("alpha").unwrap() < j.find("zeta").unwrap());
    }
}
