//! Violation bookkeeping shared by every validator in the crate.
//!
//! Validators never fail with an error when an axiom is violated; they record
//! the magnitude of each checked instance and keep the worst offender per check.

use std::collections::BTreeMap;
use std::fmt;

/// Cap on the number of individual violations retained in a report.
const MAX_LISTED: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub check: String,
    pub witness: String,
    pub magnitude: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckSummary {
    pub instances: usize,
    pub max_violation: f64,
    pub worst_witness: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub tolerance: f64,
    pub checks: BTreeMap<String, CheckSummary>,
    pub violations: Vec<Violation>,
    pub violation_count: usize,
}

impl ValidationReport {
    pub fn new(tolerance: f64) -> Self {
        Self { tolerance, checks: BTreeMap::new(), violations: Vec::new(), violation_count: 0 }
    }

    /// Records one checked instance. Non-finite magnitudes count as violations.
    pub fn record(&mut self, check: &str, witness: impl FnOnce() -> String, magnitude: f64) {
        let magnitude = if magnitude.is_nan() { f64::INFINITY } else { magnitude };
        let entry = self.checks.entry(check.to_string()).or_insert_with(|| CheckSummary {
            instances: 0,
            max_violation: 0.0,
            worst_witness: String::new(),
        });
        entry.instances += 1;
        let failed = magnitude > self.tolerance;
        let worst = magnitude > entry.max_violation || (entry.worst_witness.is_empty() && failed);
        if !worst && !failed {
            return;
        }
        let witness = witness();
        if worst {
            entry.max_violation = magnitude;
            entry.worst_witness = witness.clone();
        }
        if failed {
            self.push_violation(check, witness, magnitude);
        }
    }

    fn push_violation(&mut self, check: &str, witness: String, magnitude: f64) {
        self.violation_count += 1;
        if self.violations.len() < MAX_LISTED {
            self.violations.push(Violation { check: check.to_string(), witness, magnitude });
        }
    }

    /// Records a structural (non-numeric) failure.
    pub fn fail(&mut self, check: &str, witness: String) {
        self.record(check, move || witness, f64::INFINITY);
    }

    /// Marks a check as performed even when it had no instances.
    pub fn touch(&mut self, check: &str) {
        self.checks.entry(check.to_string()).or_insert_with(|| CheckSummary {
            instances: 0,
            max_violation: 0.0,
            worst_witness: String::new(),
        });
    }

    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }

    pub fn max_violation(&self) -> f64 {
        self.checks.values().map(|c| c.max_violation).fold(0.0, f64::max)
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|(_, c)| c.max_violation > self.tolerance)
            .map(|(k, _)| k.as_str())
            .collect()
    }

    pub fn merge(&mut self, other: ValidationReport) {
        for (name, summary) in other.checks {
            let entry = self.checks.entry(name).or_insert_with(|| CheckSummary {
                instances: 0,
                max_violation: 0.0,
                worst_witness: String::new(),
            });
            entry.instances += summary.instances;
            if summary.max_violation > entry.max_violation {
                entry.max_violation = summary.max_violation;
                entry.worst_witness = summary.worst_witness;
            }
        }
        self.violation_count += other.violation_count;
        for v in other.violations {
            if self.violations.len() < MAX_LISTED {
                self.violations.push(v);
            }
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return write!(f, "pass (max violation {:.3e})", self.max_violation());
        }
        write!(f, "{} violation(s)", self.violation_count)?;
        for name in self.failed_checks() {
            let c = &self.checks[name];
            write!(f, "; {name}: {:.3e} at {}", c.max_violation, c.worst_witness)?;
        }
        Ok(())
    }
}
