use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Version of the report document layout.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Undetermined,
    Fail,
}

impl Verdict {
    /// Fail dominates undetermined, which dominates pass.
    pub fn and(self, other: Verdict) -> Verdict {
        self.max(other)
    }
}

/// A single statistic. Exact-mode reports only carry `Exact` and `Count`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum Stat {
    /// Exact rational written as `p/q`.
    Exact(String),
    Count(u64),
    Real(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub mode: Mode,
    pub parameters: BTreeMap<String, String>,
    pub verdict: Verdict,
    pub statistics: BTreeMap<String, Stat>,
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<VerificationReport>,
    /// Wall-clock runtime; the only field allowed to differ between reruns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>, mode: Mode) -> Self {
        VerificationReport {
            check: check.into(),
            mode,
            parameters: BTreeMap::new(),
            verdict: Verdict::Pass,
            statistics: BTreeMap::new(),
            seed: None,
            notes: Vec::new(),
            counterexample: None,
            children: Vec::new(),
            timing_ms: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn stat(&mut self, key: &str, value: Stat) {
        self.statistics.insert(key.to_string(), value);
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Records a failure; the first counterexample is kept.
    pub fn fail(&mut self, counterexample: impl Into<String>) {
        self.verdict = Verdict::Fail;
        if self.counterexample.is_none() {
            self.counterexample = Some(counterexample.into());
        }
    }

    pub fn undetermined(&mut self, why: impl Into<String>) {
        self.verdict = self.verdict.and(Verdict::Undetermined);
        self.notes.push(why.into());
    }

    /// Adds a sub-result and folds its verdict into this one.
    pub fn push_child(&mut self, child: VerificationReport) {
        self.verdict = self.verdict.and(child.verdict);
        if child.verdict == Verdict::Fail && self.counterexample.is_none() {
            self.counterexample = Some(format!("{}: {}", child.check, child.counterexample.clone().unwrap_or_default()));
        }
        self.children.push(child);
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Exact reports hold no floating statistics; Monte Carlo reports carry a
    /// seed. Applies recursively.
    pub fn is_well_formed(&self) -> bool {
        let own = match self.mode {
            Mode::Exact => !self.statistics.values().any(|s| matches!(s, Stat::Real(_))),
            Mode::MonteCarlo => self.seed.is_some(),
        };
        own && self.children.iter().all(Self::is_well_formed)
    }

    /// Copy with every timing field cleared, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.timing_ms = None;
        r.children = r.children.iter().map(Self::without_timing).collect();
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Indented one-line-per-check text rendering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.render(0, &mut out);
        out
    }

    fn render(&self, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        let verdict = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Undetermined => "UNDETERMINED",
        };
        out.push_str(&format!("{pad}[{verdict}] {} ({:?})", self.check, self.mode));
        if let Some(seed) = self.seed {
            out.push_str(&format!(" seed={seed}"));
        }
        out.push('\n');
        for (k, v) in &self.statistics {
            let v = match v {
                Stat::Exact(s) | Stat::Text(s) => s.clone(),
                Stat::Count(n) => n.to_string(),
                Stat::Real(x) => format!("{x:.6}"),
            };
            out.push_str(&format!("{pad}    {k} = {v}\n"));
        }
        if let Some(c) = &self.counterexample {
            out.push_str(&format!("{pad}    counterexample: {c}\n"));
        }
        for n in &self.notes {
            out.push_str(&format!("{pad}    note: {n}\n"));
        }
        for c in &self.children {
            c.render(depth + 1, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts_fold() {
        let mut r = VerificationReport::new("parent", Mode::Exact);
        r.push_child(VerificationReport::new("ok", Mode::Exact));
        assert!(r.passed());
        let mut u = VerificationReport::new("u", Mode::Exact);
        u.undetermined("scan ran out");
        r.push_child(u);
        assert_eq!(r.verdict, Verdict::Undetermined);
        let mut f = VerificationReport::new("f", Mode::Exact);
        f.fail("x");
        r.push_child(f);
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.counterexample.as_deref(), Some("f: x"));
    }

    #[test]
    fn well_formedness() {
        let mut r = VerificationReport::new("a", Mode::Exact);
        r.stat("p", Stat::Exact("1/2".into()));
        assert!(r.is_well_formed());
        r.stat("chi2", Stat::Real(1.0));
        assert!(!r.is_well_formed());
        let mc = VerificationReport::new("b", Mode::MonteCarlo);
        assert!(!mc.is_well_formed());
        assert!(mc.with_seed(3).is_well_formed());
    }

    #[test]
    fn json_round_trip() {
        let mut r = VerificationReport::new("a", Mode::MonteCarlo).param("n", 3).with_seed(9);
        r.stat("chi2", Stat::Real(0.25));
        r.timing_ms = Some(12);
        let back: VerificationReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.without_timing().timing_ms, None);
    }
}
