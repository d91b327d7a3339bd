use ldsm_core::Error;

/// Failure categories with their process exit codes.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Numerical(String),
    Usage(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Numerical(m) | CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Io(_) | Error::Parse { .. } | Error::Metadata(_) => CliError::Io(msg),
            Error::Parameter(_)
            | Error::UnknownShape(_)
            | Error::InvalidCurve(_)
            | Error::DegenerateCurve { .. } => CliError::Usage(msg),
            Error::UnsupportedOrder { .. }
            | Error::Domain(_)
            | Error::Dimension(_)
            | Error::Singular { .. }
            | Error::NoConvergence { .. }
            | Error::Forward { .. }
            | Error::Resonance { .. }
            | Error::Truncation { .. }
            | Error::Fit(_) => CliError::Numerical(msg),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn categories() {
        assert_eq!(CliError::from(Error::Io("x".into())).exit_code(), 3);
        assert_eq!(CliError::from(Error::UnknownShape("x".into())).exit_code(), 2);
        assert_eq!(CliError::from(Error::Fit("x".into())).exit_code(), 1);
        assert_eq!(CliError::from(Error::Parse { line: 1, msg: "x".into() }).exit_code(), 3);
    }
}
