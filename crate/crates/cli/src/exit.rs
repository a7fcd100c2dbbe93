use std::fmt;

use photonsphere::Error;

/// Process exit statuses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    VerificationFailure = 1,
    Refused = 2,
    Config = 64,
    Buchdahl = 65,
    Io = 74,
}

#[derive(Debug)]
pub struct CliError {
    pub status: Status,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self { status: Status::Config, message: message.into() }
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Self { status: Status::Io, message: format!("{}: {err}", path.display()) }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = match self.status {
            Status::Refused => "refused",
            Status::Buchdahl => "rejected",
            Status::VerificationFailure => "verification failed",
            Status::Io => "i/o error",
            Status::Config => "configuration error",
            Status::Success => "ok",
        };
        write!(f, "{label}: {}", self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Buchdahl { .. } => Status::Buchdahl,
            Error::AuditFailed { .. }
            | Error::PsiBound { .. }
            | Error::NoMinimalBoundary
            | Error::NoReflectedEnd
            | Error::NonPositiveConformalFactor { .. }
            | Error::GuardBand { .. } => Status::Refused,
            Error::Integration { .. }
            | Error::NotNull { .. }
            | Error::NotRigid
            | Error::ReconstructionMismatch { .. } => Status::VerificationFailure,
            _ => Status::Config,
        };
        Self { status, message: e.to_string() }
    }
}
