//! Aggregate pass-rate statistics over a run.
//!
//! * delivery = delivered plans / plans
//! * micro(category) = passed applicable checks / applicable checks
//! * macro(category) = plans with no failure in the category / plans
//! * final = plans with no failure in either category / plans
//!
//! Rates are exact hundredths of a percent, rounded half-up.

use std::fmt;
use std::ops::Sub;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::constraints::{Category, ConstraintOutcome, Status};

/// A percentage with two fractional digits, stored as hundredths.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Percent(i64);

impl Percent {
    pub const ZERO: Percent = Percent(0);
    pub const HUNDRED: Percent = Percent(10_000);

    pub const fn from_hundredths(h: i64) -> Self {
        Percent(h)
    }

    pub const fn hundredths(self) -> i64 {
        self.0
    }

    /// `num / den * 100`, rounded half-up to two decimals.
    pub fn from_ratio(num: u64, den: u64) -> Self {
        assert!(den > 0, "ratio with zero denominator");
        let n = u128::from(num) * 20_000 + u128::from(den);
        Percent((n / (2 * u128::from(den))) as i64)
    }

    pub fn abs(self) -> Self {
        Percent(self.0.abs())
    }

    /// Delta form with explicit sign: `+3.89`, `-1.00`, `0.00`.
    pub fn signed(self) -> String {
        if self.0 > 0 {
            format!("+{self}")
        } else {
            self.to_string()
        }
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 100.0
    }
}

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let a = self.0.unsigned_abs();
        write!(f, "{sign}{}.{:02}", a / 100, a % 100)
    }
}

impl std::str::FromStr for Percent {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v: f64 = s.trim().trim_start_matches('+').parse().map_err(|_| format!("invalid percent {s:?}"))?;
        if !v.is_finite() {
            return Err(format!("invalid percent {s:?}"));
        }
        Ok(Percent((v * 100.0).round() as i64))
    }
}

impl Sub for Percent {
    type Output = Percent;
    fn sub(self, rhs: Percent) -> Percent {
        Percent(self.0 - rhs.0)
    }
}

impl Serialize for Percent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.as_f64())
    }
}

impl<'de> Deserialize<'de> for Percent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        Ok(Percent((v * 100.0).round() as i64))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("run has no plans")]
    EmptyRun,
    #[error("registry mismatch: {0}")]
    RegistryMismatch(String),
}

/// Outcomes for one plan of a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanEvaluation {
    pub query_id: String,
    pub delivered: bool,
    pub outcomes: Vec<ConstraintOutcome>,
}

impl PlanEvaluation {
    pub fn failures(&self) -> impl Iterator<Item = &ConstraintOutcome> {
        self.outcomes.iter().filter(|o| o.status == Status::Fail)
    }

    pub fn passes_category(&self, c: Category) -> bool {
        !self.failures().any(|o| o.category == c)
    }

    pub fn passes_all(&self) -> bool {
        self.failures().next().is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub run_id: String,
    /// Enabled constraint ids, catalogue order.
    pub registry: Vec<String>,
    pub plans: Vec<PlanEvaluation>,
    pub delivery_rate: Percent,
    pub commonsense_micro: Percent,
    pub commonsense_macro: Percent,
    pub hard_micro: Percent,
    pub hard_macro: Percent,
    pub final_pass_rate: Percent,
}

/// Per-metric differences `b - a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDelta {
    pub delivery_rate: Percent,
    pub commonsense_micro: Percent,
    pub commonsense_macro: Percent,
    pub hard_micro: Percent,
    pub hard_macro: Percent,
    pub final_pass_rate: Percent,
}

impl ReportDelta {
    pub fn values(&self) -> [Percent; 6] {
        [
            self.delivery_rate,
            self.commonsense_micro,
            self.commonsense_macro,
            self.hard_micro,
            self.hard_macro,
            self.final_pass_rate,
        ]
    }
}

pub const METRIC_NAMES: [&str; 6] = [
    "delivery_rate",
    "commonsense_micro",
    "commonsense_macro",
    "hard_micro",
    "hard_macro",
    "final_pass_rate",
];

impl EvaluationReport {
    /// Rates in [`METRIC_NAMES`] order.
    pub fn values(&self) -> [Percent; 6] {
        [
            self.delivery_rate,
            self.commonsense_micro,
            self.commonsense_macro,
            self.hard_micro,
            self.hard_macro,
            self.final_pass_rate,
        ]
    }

    pub fn csv_header() -> String {
        format!("run_id,{}", METRIC_NAMES.join(","))
    }

    pub fn csv_row(&self) -> String {
        let vals: Vec<String> = self.values().iter().map(ToString::to_string).collect();
        format!("{},{}", self.run_id, vals.join(","))
    }
}

fn micro(plans: &[PlanEvaluation], c: Category) -> Percent {
    let (mut passed, mut total) = (0u64, 0u64);
    for o in plans.iter().flat_map(|p| &p.outcomes).filter(|o| o.category == c) {
        match o.status {
            Status::Pass => {
                passed += 1;
                total += 1;
            }
            Status::Fail => total += 1,
            Status::NotApplicable => {}
        }
    }
    if total == 0 {
        Percent::HUNDRED
    } else {
        Percent::from_ratio(passed, total)
    }
}

fn share(plans: &[PlanEvaluation], pred: impl Fn(&PlanEvaluation) -> bool) -> Percent {
    let hits = plans.iter().filter(|p| pred(p)).count() as u64;
    Percent::from_ratio(hits, plans.len() as u64)
}

/// Aggregates per-plan outcomes. Not-applicable outcomes count in no
/// denominator. With no applicable checks in a category, its micro rate is
/// vacuously 100.
pub fn compute_metrics(
    run_id: &str,
    registry: &[String],
    plans: Vec<PlanEvaluation>,
) -> Result<EvaluationReport, MetricsError> {
    if plans.is_empty() {
        return Err(MetricsError::EmptyRun);
    }
    for p in &plans {
        if let Some(o) = p.outcomes.iter().find(|o| !registry.contains(&o.constraint_id)) {
            return Err(MetricsError::RegistryMismatch(format!(
                "plan {} has outcome for unregistered constraint {}",
                p.query_id, o.constraint_id
            )));
        }
    }
    Ok(EvaluationReport {
        run_id: run_id.to_string(),
        registry: registry.to_vec(),
        delivery_rate: share(&plans, |p| p.delivered),
        commonsense_micro: micro(&plans, Category::Commonsense),
        commonsense_macro: share(&plans, |p| p.passes_category(Category::Commonsense)),
        hard_micro: micro(&plans, Category::Hard),
        hard_macro: share(&plans, |p| p.passes_category(Category::Hard)),
        final_pass_rate: share(&plans, PlanEvaluation::passes_all),
        plans,
    })
}

pub fn diff_reports(a: &EvaluationReport, b: &EvaluationReport) -> Result<ReportDelta, MetricsError> {
    if a.registry != b.registry {
        return Err(MetricsError::RegistryMismatch(format!(
            "{} and {} were checked against different constraint sets",
            a.run_id, b.run_id
        )));
    }
    Ok(ReportDelta {
        delivery_rate: b.delivery_rate - a.delivery_rate,
        commonsense_micro: b.commonsense_micro - a.commonsense_micro,
        commonsense_macro: b.commonsense_macro - a.commonsense_macro,
        hard_micro: b.hard_micro - a.hard_micro,
        hard_macro: b.hard_macro - a.hard_macro,
        final_pass_rate: b.final_pass_rate - a.final_pass_rate,
    })
}

/// Renders a pass-rate table. Each row after the first shows non-zero
/// changes from the previous row in parentheses, e.g. `6.67 (+3.89)`.
pub fn render_table(rows: &[(&str, &EvaluationReport)]) -> String {
    let header = [
        "Run",
        "Delivery Rate",
        "Commonsense Micro",
        "Commonsense Macro",
        "Hard Micro",
        "Hard Macro",
        "Final Pass Rate",
    ];
    let mut table: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
    for (i, (label, r)) in rows.iter().enumerate() {
        let delta = (i > 0).then(|| diff_reports(rows[i - 1].1, r).ok()).flatten();
        let mut cells = vec![label.to_string()];
        for (k, v) in r.values().iter().enumerate() {
            let cell = match delta.map(|d| d.values()[k]) {
                Some(d) if d != Percent::ZERO => format!("{v} ({})", d.signed()),
                _ => v.to_string(),
            };
            cells.push(cell);
        }
        table.push(cells);
    }
    let widths: Vec<usize> = (0..header.len())
        .map(|c| table.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (i, row) in table.iter().enumerate() {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        out.push_str(&format!("| {} |\n", cells.join(" | ")));
        if i == 0 {
            let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
            out.push_str(&format!("|-{}-|\n", rule.join("-|-")));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_up_rounding() {
        assert_eq!(Percent::from_ratio(5, 180).to_string(), "2.78");
        assert_eq!(Percent::from_ratio(12, 180).to_string(), "6.67");
        assert_eq!(Percent::from_ratio(10, 180).to_string(), "5.56");
        assert_eq!(Percent::from_ratio(1, 8).to_string(), "12.50");
        assert_eq!(Percent::from_ratio(1, 3).to_string(), "33.33");
        assert_eq!(Percent::from_ratio(2, 3).to_string(), "66.67");
        assert_eq!(Percent::from_ratio(1, 1).to_string(), "100.00");
        // 0.125% -> exactly halfway between 0.12 and 0.13
        assert_eq!(Percent::from_ratio(1, 800).to_string(), "0.13");
    }

    #[test]
    fn signed_deltas() {
        assert_eq!(Percent::from_hundredths(389).signed(), "+3.89");
        assert_eq!(Percent::from_hundredths(-100).signed(), "-1.00");
        assert_eq!(Percent::ZERO.signed(), "0.00");
    }

    #[test]
    fn json_is_numeric() {
        let p = Percent::from_hundredths(278);
        assert_eq!(serde_json::to_string(&p).unwrap(), "2.78");
        let back: Percent = serde_json::from_str("2.78").unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn empty_run_is_an_error() {
        assert_eq!(compute_metrics("r", &[], vec![]), Err(MetricsError::EmptyRun));
    }
}
