//! Verification reports shared by the axiom, Kannan and counterexample checks.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::spaces::Point;

/// The tuple that violated an inequality by the largest amount.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub points: Vec<Point>,
    pub lhs: f64,
    pub rhs: f64,
    pub deficit: f64,
}

impl Witness {
    fn precedes(&self, other: &Witness) -> bool {
        match self.deficit.total_cmp(&other.deficit) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => {
                let a = self.points.iter().map(|p| p.sort_key());
                let b = other.points.iter().map(|p| p.sort_key());
                a.partial_cmp(b) == Some(Ordering::Less)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomEntry {
    pub axiom: String,
    pub pass: bool,
    pub violations: usize,
    pub worst: Option<Witness>,
    pub checks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub title: String,
    pub entries: Vec<AxiomEntry>,
}

impl VerificationReport {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            entries: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn entry(&self, axiom: &str) -> Option<&AxiomEntry> {
        self.entries.iter().find(|e| e.axiom == axiom)
    }

    pub fn total_violations(&self) -> usize {
        self.entries.iter().map(|e| e.violations).sum()
    }

    pub(crate) fn push(&mut self, tally: Tally) {
        self.entries.push(tally.finish());
    }

    /// Appends another report's entries with their axiom ids prefixed.
    pub(crate) fn absorb(&mut self, prefix: &str, other: VerificationReport) {
        for mut e in other.entries {
            e.axiom = format!("{prefix}:{}", e.axiom);
            self.entries.push(e);
        }
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        for e in &self.entries {
            let verdict = if e.pass { "pass" } else { "FAIL" };
            write!(f, "  {:<20} {verdict}  {} checks, {} violations", e.axiom, e.checks, e.violations)?;
            if let Some(w) = &e.worst {
                let pts: Vec<String> = w.points.iter().map(|p| p.to_string()).collect();
                write!(
                    f,
                    "  worst at ({}): lhs={} rhs={} deficit={:e}",
                    pts.join(", "),
                    w.lhs,
                    w.rhs,
                    w.deficit
                )?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Running count for one axiom; the worst witness does not depend on the
/// order in which tuples are recorded.
#[derive(Debug, Clone)]
pub(crate) struct Tally {
    axiom: String,
    checks: usize,
    violations: usize,
    worst: Option<Witness>,
}

impl Tally {
    pub fn new(axiom: impl Into<String>) -> Self {
        Self {
            axiom: axiom.into(),
            checks: 0,
            violations: 0,
            worst: None,
        }
    }

    pub fn record(&mut self, ok: bool, points: &[Point], lhs: f64, rhs: f64) {
        self.checks += 1;
        if ok {
            return;
        }
        self.violations += 1;
        let w = Witness {
            points: points.to_vec(),
            lhs,
            rhs,
            deficit: lhs - rhs,
        };
        if self.worst.as_ref().is_none_or(|cur| w.precedes(cur)) {
            self.worst = Some(w);
        }
    }

    pub fn finish(self) -> AxiomEntry {
        AxiomEntry {
            axiom: self.axiom,
            pass: self.violations == 0,
            violations: self.violations,
            worst: self.worst,
            checks: self.checks,
        }
    }
}
