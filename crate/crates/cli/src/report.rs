use fprange::error::Error;
use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_WITNESS: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_PARSE: i32 = 4;
pub const EXIT_NO_PROGRESS: i32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
}

/// Result of one command before it is wrapped in a [`Report`].
#[derive(Debug, Default)]
pub struct Outcome {
    pub result: Value,
    pub checks: Vec<Check>,
    /// Set when the input breaks a hypothesis and the result carries the witness.
    pub witness: bool,
}

impl Outcome {
    pub fn new(result: impl Serialize) -> Self {
        Outcome {
            result: serde_json::to_value(result).expect("reports serialize"),
            checks: Vec::new(),
            witness: false,
        }
    }

    pub fn check(&mut self, name: &str, ok: bool) -> &mut Self {
        self.checks.push(Check {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
        });
        self
    }

    /// `None` records the check as skipped.
    pub fn check_opt(&mut self, name: &str, ok: Option<bool>) -> &mut Self {
        self.checks.push(Check {
            name: name.into(),
            status: match ok {
                Some(true) => Status::Pass,
                Some(false) => Status::Fail,
                None => Status::Skipped,
            },
        });
        self
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorInfo {
    pub kind: &'static str,
    pub message: String,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    /// What the computation establishes, in one line.
    pub realizes: &'static str,
    pub config: RunConfig,
    pub result: Option<Value>,
    pub error: Option<ErrorInfo>,
    pub checks: Vec<Check>,
    pub ok: bool,
    pub exit_code: i32,
}

pub fn error_kind(e: &Error) -> (&'static str, i32) {
    match e {
        Error::BudgetExceeded { .. } => ("budget", EXIT_BUDGET),
        Error::FullRange | Error::FullRangeWitness { .. } => ("full_range", EXIT_WITNESS),
        Error::NoProgress { .. } => ("no_progress", EXIT_NO_PROGRESS),
        Error::WitnessSearchFailed(_) | Error::Corrupt(_) => ("internal", EXIT_CHECK_FAILED),
        Error::Syntax { .. } | Error::Overflow { .. } => ("parse", EXIT_PARSE),
        _ => ("input", EXIT_PARSE),
    }
}

impl Report {
    pub fn build(command: &str, realizes: &'static str, config: RunConfig, out: Result<Outcome, Error>) -> Self {
        match out {
            Ok(o) => {
                let failed = o.checks.iter().any(|c| c.status == Status::Fail);
                let exit_code = if failed {
                    EXIT_CHECK_FAILED
                } else if o.witness {
                    EXIT_WITNESS
                } else {
                    EXIT_OK
                };
                Report {
                    command: command.into(),
                    realizes,
                    config,
                    result: Some(o.result),
                    error: None,
                    ok: !failed,
                    checks: o.checks,
                    exit_code,
                }
            }
            Err(e) => {
                let (kind, exit_code) = error_kind(&e);
                Report {
                    command: command.into(),
                    realizes,
                    config,
                    result: None,
                    error: Some(ErrorInfo {
                        kind,
                        message: e.to_string(),
                    }),
                    checks: Vec::new(),
                    ok: false,
                    exit_code,
                }
            }
        }
    }
}
