//! Outcome records shared by the SRW report and the verification manifest.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// a paper claim that the oracle contradicts, reported rather than asserted
    Flagged,
    Note,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub identity: String,
    pub status: Status,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ks_stat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub critical: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
    pub note: String,
}

impl Check {
    pub fn new(identity: impl Into<String>, status: Status, note: impl Into<String>) -> Self {
        Check {
            identity: identity.into(),
            status,
            pass: matches!(status, Status::Pass | Status::Note),
            ks_stat: None,
            critical: None,
            value: None,
            reference: None,
            note: note.into(),
        }
    }

    /// Asserted when `strict`, otherwise a failure only raises a flag.
    pub fn judged(identity: impl Into<String>, ok: bool, strict: bool, note: impl Into<String>) -> Self {
        let status = match (ok, strict) {
            (true, _) => Status::Pass,
            (false, true) => Status::Fail,
            (false, false) => Status::Flagged,
        };
        Check::new(identity, status, note)
    }

    pub fn ks(mut self, stat: f64, critical: f64) -> Self {
        self.ks_stat = Some(stat);
        self.critical = Some(critical);
        self
    }

    pub fn compare(mut self, value: f64, reference: f64) -> Self {
        self.value = Some(value);
        self.reference = Some(reference);
        self
    }
}

/// 0 when everything passed, 2 on any failure, 3 when only flags remain.
pub fn exit_code(checks: &[Check]) -> i32 {
    if checks.iter().any(|c| c.status == Status::Fail) {
        2
    } else if checks.iter().any(|c| c.status == Status::Flagged) {
        3
    } else {
        0
    }
}
