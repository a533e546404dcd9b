//! Named pass/fail outcomes shared by the verification routines.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Check {
    pub name: String,
    /// `None` when the check passed; otherwise the first counterexample.
    pub witness: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, witness: Option<String>) -> Self {
        Check {
            name: name.into(),
            witness,
        }
    }

    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None => write!(f, "{}: pass", self.name),
            Some(w) => write!(f, "{}: fail ({w})", self.name),
        }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(Check::passed)
}

/// Runs `body` once per trial until it reports a failure.
pub(crate) fn first_failure(
    trials: usize,
    mut body: impl FnMut(usize) -> crate::Result<Option<String>>,
) -> crate::Result<Option<String>> {
    for t in 0..trials {
        if let Some(w) = body(t)? {
            return Ok(Some(format!("trial {t}: {w}")));
        }
    }
    Ok(None)
}
