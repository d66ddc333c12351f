//! Verdicts and the uniform report record emitted by the suites.

use std::fmt;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    /// Error dominates Fail dominates Pass; empty input passes.
    pub fn combine(it: impl IntoIterator<Item = Status>) -> Status {
        it.into_iter().max().unwrap_or(Status::Pass)
    }

    pub fn is_pass(self) -> bool {
        self == Status::Pass
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        })
    }
}

/// How a check decides: exactly, or numerically against a tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Tolerance {
    Exact,
    Numeric { tol: f64, max_deviation: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub check: String,
    pub status: Status,
    #[serde(flatten)]
    pub tolerance: Tolerance,
    pub details: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

impl Report {
    pub fn exact(check: impl Into<String>, ok: bool, details: Value) -> Self {
        Self {
            check: check.into(),
            status: Status::from_bool(ok),
            tolerance: Tolerance::Exact,
            details,
            runtime_ms: None,
        }
    }

    pub fn numeric(check: impl Into<String>, tol: f64, max_deviation: f64, details: Value) -> Self {
        Self {
            check: check.into(),
            status: Status::from_bool(max_deviation <= tol),
            tolerance: Tolerance::Numeric { tol, max_deviation },
            details,
            runtime_ms: None,
        }
    }

    pub fn error(check: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            status: Status::Error,
            tolerance: Tolerance::Exact,
            details: Value::String(message.into()),
            runtime_ms: None,
        }
    }

    pub fn with_status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }

    /// One human-readable line.
    pub fn summary(&self) -> String {
        match self.tolerance {
            Tolerance::Exact => format!("{:<5} {} (exact)", self.status, self.check),
            Tolerance::Numeric { tol, max_deviation } => {
                format!(
                    "{:<5} {} (max deviation {max_deviation:.3e}, tol {tol:.1e})",
                    self.status, self.check
                )
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combine_orders_verdicts() {
        assert_eq!(Status::combine([]), Status::Pass);
        assert_eq!(Status::combine([Status::Pass, Status::Fail]), Status::Fail);
        assert_eq!(
            Status::combine([Status::Error, Status::Fail]),
            Status::Error
        );
    }

    #[test]
    fn exact_reports_carry_no_tolerance() {
        let r = Report::exact("x", true, Value::Null);
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["mode"], "exact");
        assert!(v.get("tol").is_none());
        let n = Report::numeric("y", 1e-6, 2e-6, Value::Null);
        assert_eq!(n.status, Status::Fail);
        let v = serde_json::to_value(&n).unwrap();
        assert_eq!(v["tol"], 1e-6);
    }
}
