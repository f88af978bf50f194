use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::config::Format;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of one invocation. `data` must be a JSON object; its fields are
/// flattened into the top level of the JSON rendering.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(flatten)]
    pub data: serde_json::Map<String, Value>,
    /// Extra lines for the text rendering only.
    #[serde(skip)]
    pub body: Vec<String>,
}

impl Report {
    pub fn new(command: impl Into<String>, seed: u64) -> Self {
        Report { command: command.into(), seed, passed: true, checks: Vec::new(), data: Default::default(), body: Vec::new() }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.passed &= passed;
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        for c in checks {
            self.passed &= c.passed;
            self.checks.push(c);
        }
    }

    /// Panics if `value` does not serialize; every payload here is plain data.
    pub fn insert(&mut self, key: &str, value: impl Serialize) {
        self.data.insert(key.to_string(), serde_json::to_value(value).expect("serializable payload"));
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.body.push(s.into());
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("serializable report");
                s.push('\n');
                s
            }
            Format::Text => self.render_text(),
            Format::Csv => self.render_csv(),
        }
    }

    fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} (seed {})", self.command, self.seed);
        for l in &self.body {
            let _ = writeln!(s, "{l}");
        }
        if !self.body.is_empty() && !self.checks.is_empty() {
            s.push('\n');
        }
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let _ = writeln!(s, "{} {:width$}  {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        let _ = writeln!(s, "{}", if self.passed { "ALL PASS" } else { "SOME CHECKS FAILED" });
        s
    }

    fn render_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["command", "check", "passed", "detail"]).expect("in-memory write");
        for c in &self.checks {
            w.write_record([self.command.as_str(), &c.name, if c.passed { "true" } else { "false" }, &c.detail])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_state_and_renderings() {
        let mut r = Report::new("demo", 7);
        r.check("first", true, "ok");
        r.insert("value", 3);
        assert!(r.passed);
        r.check("second, quoted", false, "x=\"1\"");
        assert!(!r.passed);
        let j: Value = serde_json::from_str(&r.render(Format::Json)).unwrap();
        assert_eq!(j["value"], 3);
        assert_eq!(j["checks"][1]["passed"], false);
        let csv = r.render(Format::Csv);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.contains("\"second, quoted\""));
        let text = r.render(Format::Text);
        assert!(text.contains("FAIL second, quoted") && text.ends_with("SOME CHECKS FAILED\n"));
    }
}
