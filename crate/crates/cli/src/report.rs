//! Run reports: what was run, on which inputs, and how each check came out.

use std::fmt::Write as _;
use std::time::Duration;

use moonshine::Verdict;
use serde::Serialize;

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub verdict: &'static str,
    /// The truncation window the verdict is guaranteed on, when one applies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<String>,
    pub detail: String,
}

/// Timing is kept out of the serialized form so that reports are
/// byte-identical across runs.
#[derive(Debug, Clone, Serialize, Default)]
pub struct RunReport {
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub checks: Vec<Check>,
    /// Lines the command printed as its result.
    pub output: Vec<String>,
    #[serde(skip)]
    pub timings: Vec<(String, Duration)>,
}

impl RunReport {
    pub fn new(command: Vec<String>) -> Self {
        RunReport {
            command,
            ..Default::default()
        }
    }

    pub fn check(&mut self, name: impl Into<String>, verdict: Verdict, window: Option<String>, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            verdict: verdict.as_str(),
            window,
            detail: detail.into(),
        });
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.output.push(s.into());
    }

    pub fn time(&mut self, what: impl Into<String>, d: Duration) {
        self.timings.push((what.into(), d));
    }

    /// 0 when every check passes (or there are none), 1 on any failure,
    /// 3 when nothing failed but something was inconclusive.
    pub fn exit_code(&self) -> i32 {
        let fail = Verdict::Fail.as_str();
        let inconclusive = Verdict::Inconclusive.as_str();
        if self.checks.iter().any(|c| c.verdict == fail) {
            1
        } else if self.checks.iter().any(|c| c.verdict == inconclusive) {
            3
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn human(&self) -> String {
        let mut out = String::new();
        for l in &self.output {
            let _ = writeln!(out, "{l}");
        }
        for c in &self.checks {
            let _ = write!(out, "{}: {}", c.name, c.verdict);
            if let Some(w) = &c.window {
                let _ = write!(out, " [window {w}]");
            }
            if !c.detail.is_empty() {
                let _ = write!(out, " ({})", c.detail);
            }
            out.push('\n');
        }
        out
    }
}
