use serde::Serialize;

/// Outcome of an exact check over a finite set of cases.
///
/// `global` is true when the verdict covers every input (a symbolic identity)
/// rather than the sampled cases only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub global: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckReport {
    pub fn pass(name: impl Into<String>, cases: usize) -> Self {
        CheckReport {
            name: name.into(),
            passed: true,
            cases,
            global: false,
            witness: None,
        }
    }

    pub fn fail(name: impl Into<String>, cases: usize, witness: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            passed: false,
            cases,
            global: false,
            witness: Some(witness.into()),
        }
    }

    pub fn global(mut self) -> Self {
        self.global = true;
        self
    }

    /// Conjunction; the first failure's witness wins.
    pub fn and(self, other: CheckReport) -> CheckReport {
        let witness = self.witness.clone().or_else(|| other.witness.clone());
        CheckReport {
            name: self.name,
            passed: self.passed && other.passed,
            cases: self.cases + other.cases,
            global: self.global && other.global,
            witness: if self.passed && other.passed {
                None
            } else {
                witness
            },
        }
    }
}
