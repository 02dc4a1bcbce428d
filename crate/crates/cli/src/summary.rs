//! Pass/fail bookkeeping for a run.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    /// Dotted name of the invariant, `module.property`.
    pub invariant: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Summary {
    pub checks: Vec<Check>,
}

impl Summary {
    pub fn check(&mut self, invariant: impl Into<String>, passed: bool, detail: impl Into<String>) -> bool {
        let check = Check {
            invariant: invariant.into(),
            passed,
            detail: detail.into(),
        };
        log::info!("{}", line(&check));
        self.checks.push(check);
        passed
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// One line per check followed by the overall verdict.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&line(c));
            out.push('\n');
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        out.push_str(&format!(
            "{} {passed}/{} checks passed\n",
            if self.all_passed() { "OK" } else { "FAILED" },
            self.checks.len()
        ));
        out
    }
}

fn line(c: &Check) -> String {
    format!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.invariant, c.detail)
}
