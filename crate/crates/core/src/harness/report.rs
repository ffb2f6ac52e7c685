use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// Run settings a report depends on.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub samples: usize,
    pub max_degree: usize,
    pub gamma: f64,
    pub tolerances: BTreeMap<String, f64>,
}

/// JSON numbers cannot hold NaN or infinities; those travel as strings.
mod float_json {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    fn to_repr(x: f64) -> Repr {
        if x.is_finite() {
            Repr::Num(x)
        } else {
            Repr::Text(x.to_string())
        }
    }

    fn from_repr<E: serde::de::Error>(r: Repr) -> Result<f64, E> {
        match r {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "NaN" => Ok(f64::NAN),
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                _ => Err(E::custom(format!("not a number: {t}"))),
            },
        }
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        to_repr(*x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|x| to_repr(*x)))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            Vec::<Repr>::deserialize(d)?.into_iter().map(from_repr).collect()
        }
    }
}

/// One cell of a suite: a parameter tuple and its per-sample ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub suite: String,
    pub parameters: BTreeMap<String, f64>,
    #[serde(with = "float_json::vec")]
    pub ratios: Vec<f64>,
    #[serde(with = "float_json")]
    pub min: f64,
    #[serde(with = "float_json")]
    pub median: f64,
    #[serde(with = "float_json")]
    pub max: f64,
    /// What the verdict compares against, e.g. a max/min bound.
    pub bound: Option<f64>,
    pub verdict: Verdict,
    /// Samples left out as degenerate.
    pub excluded: usize,
    pub notes: Vec<String>,
    pub provenance: Provenance,
}

/// (min, median, max) of the finite values, NaN when empty.
pub fn summarize(values: &[f64]) -> (f64, f64, f64) {
    let mut v: Vec<f64> = values.to_vec();
    if v.is_empty() {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let median = if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) };
    (v[0], median, v[n - 1])
}

impl RatioReport {
    pub fn new(suite: &str, parameters: &[(&str, f64)], ratios: Vec<f64>, provenance: Provenance) -> Self {
        let (min, median, max) = summarize(&ratios);
        RatioReport {
            suite: suite.to_string(),
            parameters: parameters.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            ratios,
            min,
            median,
            max,
            bound: None,
            verdict: Verdict::Fail,
            excluded: 0,
            notes: Vec::new(),
            provenance,
        }
    }

    pub fn spread(&self) -> f64 {
        self.max / self.min
    }

    fn all_positive_finite(&self) -> bool {
        !self.ratios.is_empty() && self.ratios.iter().all(|r| r.is_finite() && *r > 0.0)
    }

    /// Pass iff ratios are positive, finite and max/min <= bound.
    pub fn judge_spread(mut self, bound: f64) -> Self {
        self.bound = Some(bound);
        self.verdict = Verdict::from_bool(self.all_positive_finite() && self.spread() <= bound);
        self
    }

    /// Pass iff every ratio is finite and at most `bound`.
    pub fn judge_max(mut self, bound: f64) -> Self {
        self.bound = Some(bound);
        self.verdict = Verdict::from_bool(!self.ratios.is_empty() && self.ratios.iter().all(|r| r.is_finite()) && self.max <= bound);
        self
    }

    /// Pass iff every ratio is finite and at least `bound`.
    pub fn judge_min(mut self, bound: f64) -> Self {
        self.bound = Some(bound);
        self.verdict = Verdict::from_bool(self.all_positive_finite() && self.min >= bound);
        self
    }

    /// Pass iff every ratio lies in [lo, hi]; the bound records hi.
    pub fn judge_range(mut self, lo: f64, hi: f64) -> Self {
        self.bound = Some(hi);
        self.verdict = Verdict::from_bool(self.all_positive_finite() && self.min >= lo && self.max <= hi);
        self
    }

    /// Forces failure with a reason.
    pub fn fail(mut self, why: impl Into<String>) -> Self {
        self.verdict = Verdict::Fail;
        self.notes.push(why.into());
        self
    }

    pub fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }

    pub fn with_excluded(mut self, n: usize) -> Self {
        self.excluded = n;
        if n > 0 {
            self.notes.push(format!("{n} degenerate sample(s) excluded"));
        }
        self
    }

    fn label(&self) -> String {
        let p: Vec<String> = self.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{} [{}]", self.suite, p.join(", "))
    }
}

/// 0 when every verdict passes, 1 otherwise.
pub fn exit_code(reports: &[RatioReport]) -> i32 {
    if reports.iter().all(|r| r.verdict.passed()) {
        0
    } else {
        1
    }
}

pub fn to_json(reports: &[RatioReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

/// Parses a report file and checks the per-report invariants.
pub fn validate_report_json(s: &str) -> Result<Vec<RatioReport>> {
    let reports: Vec<RatioReport> = serde_json::from_str(s).map_err(|e| Error::Config(format!("report schema: {e}")))?;
    for r in &reports {
        if r.suite.is_empty() {
            return Err(Error::Config("report with empty suite id".into()));
        }
        let (min, median, max) = summarize(&r.ratios);
        let same = |a: f64, b: f64| (a.is_nan() && b.is_nan()) || a == b;
        if !(same(min, r.min) && same(median, r.median) && same(max, r.max)) {
            return Err(Error::Config(format!("{}: summary does not match ratios", r.label())));
        }
        if r.verdict.passed() && !(r.max >= r.median && r.median >= r.min) {
            return Err(Error::Config(format!("{}: passing report breaks max >= median >= min", r.label())));
        }
    }
    Ok(reports)
}

pub fn to_markdown(reports: &[RatioReport]) -> String {
    let mut s = String::from("| suite | parameters | n | min | median | max | max/min | bound | verdict | notes |\n");
    s.push_str("|---|---|---|---|---|---|---|---|---|---|\n");
    for r in reports {
        let params: Vec<String> = r.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let bound = r.bound.map(|b| format!("{b:.3e}")).unwrap_or_else(|| "-".into());
        let verdict = if r.verdict.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(
            s,
            "| {} | {} | {} | {:.4e} | {:.4e} | {:.4e} | {:.3} | {} | {} | {} |",
            r.suite,
            params.join(", "),
            r.ratios.len(),
            r.min,
            r.median,
            r.max,
            r.spread(),
            bound,
            verdict,
            r.notes.join("; ").replace('|', "/")
        );
    }
    s
}

/// Writes `report.json` and `report.md` into `dir`.
pub fn report_emit(reports: &[RatioReport], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(dir.join("report.json"), to_json(reports)).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(dir.join("report.md"), to_markdown(reports)).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}
