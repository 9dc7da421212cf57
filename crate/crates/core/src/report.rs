//! Structured comparison records shared by the table checks and the CLI.

use crate::rat::{fmt_q, Q};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Severity {
    ExactMatch,
    CertifiedEqual,
    SignFlip,
    Structural,
}

impl Severity {
    pub fn is_match(self) -> bool {
        matches!(self, Severity::ExactMatch | Severity::CertifiedEqual)
    }

    pub fn classify(derived: &Q, printed: &Q) -> Severity {
        if derived == printed {
            Severity::ExactMatch
        } else if *derived == -printed.clone() {
            Severity::SignFlip
        } else {
            Severity::Structural
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Severity::ExactMatch => "exact-match",
            Severity::CertifiedEqual => "certified-equal",
            Severity::SignFlip => "sign-flip",
            Severity::Structural => "structural",
        }
    }
}

/// One sampled comparison.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DiscrepancyEntry {
    pub table: String,
    pub entry: String,
    pub n: i64,
    pub p_or_t: String,
    pub derived: String,
    pub printed: String,
    pub delta: String,
    pub severity: Severity,
}

impl DiscrepancyEntry {
    pub fn exact(table: &str, entry: &str, n: i64, x: &str, derived: &Q, printed: &Q) -> Self {
        DiscrepancyEntry {
            table: table.into(),
            entry: entry.into(),
            n,
            p_or_t: x.into(),
            derived: fmt_q(derived),
            printed: fmt_q(printed),
            delta: fmt_q(&(derived - printed)),
            severity: Severity::classify(derived, printed),
        }
    }
}

/// Aggregate verdict for one `(table, entry)` over every sample.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EntryVerdict {
    pub table: String,
    pub entry: String,
    pub verdict: Severity,
    pub samples: usize,
    pub mismatches: usize,
    /// Samples needed to certify a polynomial identity of the known degree.
    pub required_samples: usize,
}

/// Decay-order fit of `printed full − printed expansion` as `t → -∞`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayCheck {
    pub entry: String,
    pub n: i64,
    pub t_samples: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `k` in `|residual| ~ |t|^{-k}`; `None` when the residual is identically zero.
    pub fitted_order: Option<f64>,
    pub printed_order: f64,
    pub consistent: bool,
    pub note: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub entries: Vec<DiscrepancyEntry>,
    pub verdicts: Vec<EntryVerdict>,
    pub decay_checks: Vec<DecayCheck>,
}

impl DiscrepancyReport {
    pub fn merge(&mut self, other: DiscrepancyReport) {
        self.entries.extend(other.entries);
        self.verdicts.extend(other.verdicts);
        self.decay_checks.extend(other.decay_checks);
    }

    /// Sorts everything into a canonical order so reports are reproducible.
    pub fn canonicalize(&mut self) {
        self.entries.sort();
        self.entries.dedup();
        self.verdicts.sort();
        self.verdicts.dedup();
        self.decay_checks.sort_by(|a, b| (a.entry.as_str(), a.n).cmp(&(b.entry.as_str(), b.n)));
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &DiscrepancyEntry> {
        self.entries.iter().filter(|e| !e.severity.is_match())
    }

    pub fn all_match(&self) -> bool {
        self.verdicts.iter().all(|v| v.verdict.is_match())
            && self.decay_checks.iter().all(|d| d.consistent)
    }

    /// Distinct `(table, entry)` pairs with at least one mismatch.
    pub fn discrepant_entries(&self) -> Vec<(String, String)> {
        let mut v: Vec<(String, String)> = self
            .verdicts
            .iter()
            .filter(|v| !v.verdict.is_match())
            .map(|v| (v.table.clone(), v.entry.clone()))
            .collect();
        v.sort();
        v.dedup();
        v
    }
}
