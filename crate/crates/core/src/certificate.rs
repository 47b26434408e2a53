use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// One numeric test: passes when `measured <= threshold`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub name: String,
    pub value: Complex64,
}

/// Machine-readable verdict with every threshold it was judged against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub checks: Vec<Check>,
    pub witnesses: Vec<Witness>,
    pub notes: Vec<String>,
}

impl Default for Certificate {
    fn default() -> Self {
        Self::new()
    }
}

impl Certificate {
    pub fn new() -> Self {
        Certificate {
            verdict: Verdict::Pass,
            checks: Vec::new(),
            witnesses: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Records a check. NaN measurements fail.
    pub fn check(&mut self, name: impl Into<String>, measured: f64, threshold: f64) -> bool {
        let passed = measured <= threshold;
        self.checks.push(Check {
            name: name.into(),
            measured,
            threshold,
            passed,
        });
        if !passed {
            self.verdict = Verdict::Fail;
        }
        passed
    }

    /// Like [`Certificate::check`], but a miss only downgrades to
    /// Inconclusive.
    pub fn soft_check(&mut self, name: impl Into<String>, measured: f64, threshold: f64) -> bool {
        let passed = measured <= threshold;
        let name = name.into();
        if !passed {
            self.inconclusive(format!("{name}: {measured:e} exceeds {threshold:e}"));
        }
        self.checks.push(Check {
            name,
            measured,
            threshold,
            passed,
        });
        passed
    }

    pub fn witness(&mut self, name: impl Into<String>, value: Complex64) {
        self.witnesses.push(Witness {
            name: name.into(),
            value,
        });
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn fail(&mut self, reason: impl Into<String>) {
        self.verdict = Verdict::Fail;
        self.note(reason);
    }

    /// Downgrades a passing certificate; failures stay failures.
    pub fn inconclusive(&mut self, reason: impl Into<String>) {
        if self.verdict == Verdict::Pass {
            self.verdict = Verdict::Inconclusive;
        }
        self.note(reason);
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Largest measured value over checks whose name starts with `prefix`.
    pub fn worst(&self, prefix: &str) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.name.starts_with(prefix))
            .map(|c| c.measured)
            .fold(0.0, f64::max)
    }

    /// Appends another certificate's checks under a name prefix.
    pub fn absorb(&mut self, prefix: &str, other: &Certificate) {
        for c in &other.checks {
            self.checks.push(Check {
                name: format!("{prefix}.{}", c.name),
                ..c.clone()
            });
        }
        for w in &other.witnesses {
            self.witness(format!("{prefix}.{}", w.name), w.value);
        }
        for n in &other.notes {
            self.note(format!("{prefix}: {n}"));
        }
        match other.verdict {
            Verdict::Fail => self.verdict = Verdict::Fail,
            Verdict::Inconclusive => self.inconclusive(format!("{prefix} inconclusive")),
            Verdict::Pass => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_follows_checks() {
        let mut c = Certificate::new();
        assert!(c.check("a", 0.5, 1.0));
        assert!(c.passed());
        c.inconclusive("sparse sampling");
        assert_eq!(c.verdict, Verdict::Inconclusive);
        assert!(!c.check("b", f64::NAN, 1.0));
        assert_eq!(c.verdict, Verdict::Fail);
        c.inconclusive("late");
        assert_eq!(c.verdict, Verdict::Fail);
    }

    #[test]
    fn soft_checks_only_downgrade() {
        let mut c = Certificate::new();
        assert!(!c.soft_check("a", 2.0, 1.0));
        assert_eq!(c.verdict, Verdict::Inconclusive);
        let mut outer = Certificate::new();
        outer.absorb("inner", &c);
        assert_eq!(outer.verdict, Verdict::Inconclusive);
        assert!(!outer.get("inner.a").unwrap().passed);
    }
}
