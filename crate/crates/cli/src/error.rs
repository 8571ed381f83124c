use std::fmt::{self, Display};

use urysohn_ifs::io::IoError;
use urysohn_ifs::moduli::ModulusError;
use urysohn_ifs::{HutchinsonError, KatetovError, MeasureError, MetricError};

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Invalid = 1,
    NonConvergence = 2,
    Malformed = 3,
}

#[derive(Debug)]
pub struct CliError {
    pub exit: Exit,
    /// Structured error name from the owning module.
    pub name: String,
    pub detail: String,
}

impl CliError {
    pub fn malformed(name: &str, detail: impl Display) -> Self {
        CliError {
            exit: Exit::Malformed,
            name: name.into(),
            detail: detail.to_string(),
        }
    }

    pub fn missing(field: &str) -> Self {
        CliError::malformed("MissingField", format!("config has no `{field}`"))
    }

    pub fn invalid(detail: impl Display) -> Self {
        let detail = detail.to_string();
        CliError {
            exit: Exit::Invalid,
            name: leading_name(&detail),
            detail,
        }
    }

    pub fn io(detail: impl Display) -> Self {
        CliError::malformed("Io", detail)
    }
}

fn leading_name(text: &str) -> String {
    text.split(|c: char| !c.is_alphanumeric())
        .next()
        .unwrap_or("")
        .to_string()
}

impl Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.detail.starts_with(&self.name) {
            write!(f, "{}", self.detail)
        } else {
            write!(f, "{}: {}", self.name, self.detail)
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Metric(m) => m.into(),
            IoError::Modulus(m) => m.into(),
            IoError::Measure(m) => m.into(),
            other => CliError::malformed(&other.name(), other),
        }
    }
}

impl From<MetricError> for CliError {
    fn from(e: MetricError) -> Self {
        CliError::invalid(e)
    }
}

impl From<ModulusError> for CliError {
    fn from(e: ModulusError) -> Self {
        CliError::invalid(e)
    }
}

impl From<MeasureError> for CliError {
    fn from(e: MeasureError) -> Self {
        CliError::invalid(e)
    }
}

impl From<KatetovError> for CliError {
    fn from(e: KatetovError) -> Self {
        CliError::invalid(e)
    }
}

impl<S: fmt::Debug> From<HutchinsonError<S>> for CliError {
    fn from(e: HutchinsonError<S>) -> Self {
        let mut err = CliError::invalid(&e);
        if matches!(e, HutchinsonError::NonConvergence { .. }) {
            err.exit = Exit::NonConvergence;
        }
        err
    }
}
