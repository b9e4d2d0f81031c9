//! Verification reports and the seeded suites behind `pdq verify`.

use serde::Serialize;

mod suites;

pub use suites::{
    generator_relation, laplacian_norms, run_suite, theta_family, Suite, SuiteConfig, SuiteHeader, SuiteReport, ORACLE_FLUXES,
    ORACLE_SAMPLES,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// `value <= threshold`
    Upper,
    /// `value >= threshold`
    Lower,
}

/// One named numerical check: the worst value observed against a threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub bound: Bound,
    pub threshold: f64,
    /// Largest deviation seen (upper bounds) or smallest value (lower bounds).
    pub max_deviation: f64,
    pub samples: usize,
    pub passed: bool,
    /// First failing input, when there is one.
    pub witness: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            bound: Bound::Upper,
            threshold: tolerance,
            max_deviation: 0.0,
            samples: 0,
            passed: true,
            witness: None,
        }
    }

    pub fn lower(name: impl Into<String>, floor: f64) -> Self {
        Check {
            name: name.into(),
            bound: Bound::Lower,
            threshold: floor,
            max_deviation: f64::INFINITY,
            samples: 0,
            passed: true,
            witness: None,
        }
    }

    pub fn single(name: impl Into<String>, tolerance: f64, deviation: f64) -> Self {
        let mut c = Check::new(name, tolerance);
        c.record(deviation, || "single input".to_string());
        c
    }

    pub fn lower_bound(name: impl Into<String>, floor: f64, value: f64) -> Self {
        let mut c = Check::lower(name, floor);
        c.record(value, || "single input".to_string());
        c
    }

    /// Folds in one observation; `witness` is only evaluated on the first
    /// failure.
    pub fn record(&mut self, value: f64, witness: impl FnOnce() -> String) {
        self.samples += 1;
        // empty float sums are -0.0
        let value = value + 0.0;
        let ok = match self.bound {
            Bound::Upper => {
                self.max_deviation = self.max_deviation.max(value);
                value <= self.threshold
            }
            Bound::Lower => {
                self.max_deviation = self.max_deviation.min(value);
                value >= self.threshold
            }
        };
        // NaN fails both comparisons
        if !ok {
            if self.passed {
                self.witness = Some(format!("{} (value {value:e})", witness()));
            }
            self.passed = false;
            if value.is_nan() {
                self.max_deviation = f64::NAN;
            }
        }
    }

    /// Records a boolean property (deviation 0 or 1).
    pub fn record_bool(&mut self, holds: bool, witness: impl FnOnce() -> String) {
        self.record(if holds { 0.0 } else { 1.0 }, witness);
    }

    pub fn merge(&mut self, other: &Check) {
        self.samples += other.samples;
        self.max_deviation = match self.bound {
            Bound::Upper => self.max_deviation.max(other.max_deviation),
            Bound::Lower => self.max_deviation.min(other.max_deviation),
        };
        if !other.passed {
            if self.passed {
                self.witness = other.witness.clone();
            }
            self.passed = false;
        }
    }
}

/// A named collection of checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub name: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(name: impl Into<String>) -> Self {
        Report {
            name: name.into(),
            passed: true,
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    /// Merges a report into this one check by check, matching on name.
    pub fn absorb(&mut self, other: &Report) {
        for c in &other.checks {
            match self.checks.iter_mut().find(|x| x.name == c.name) {
                Some(existing) => existing.merge(c),
                None => self.checks.push(c.clone()),
            }
        }
        self.passed = self.checks.iter().all(|c| c.passed);
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}
