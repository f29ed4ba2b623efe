use std::fmt;
use std::path::Path;

use mdml::codegen::CodegenError;
use mdml::linker::LinkError;
use mdml::mlcore::MlError;
use mdml::modelconv::ConvError;
use mdml::platform::PlatformError;

/// Process exit codes. Stable: scripts branch on them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Parse = 1,
    /// Model errors and invalid command lines.
    Semantic = 2,
    Rejected = 3,
    Io = 4,
    Numeric = 5,
}

#[derive(Debug)]
pub struct CliError {
    pub status: Status,
    pub message: String,
}

impl CliError {
    pub fn new(status: Status, message: impl Into<String>) -> Self {
        CliError {
            status,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(Status::Semantic, message)
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        Self::new(Status::Io, format!("{}: {err}", path.display()))
    }

    /// `err` while reading or interpreting `path`.
    pub fn ml(path: &Path, err: MlError) -> Self {
        let status = match err {
            MlError::NonFinite { .. } => Status::Numeric,
            MlError::Architecture(_) | MlError::Config(_) => Status::Semantic,
            MlError::Data(_) | MlError::Dimension { .. } | MlError::Overflow => Status::Io,
        };
        Self::new(status, format!("{}: {err}", path.display()))
    }

    pub fn conv(path: &Path, err: ConvError) -> Self {
        Self::new(Status::Io, format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<PlatformError> for CliError {
    fn from(e: PlatformError) -> Self {
        let status = match e {
            PlatformError::File { .. } => Status::Io,
            PlatformError::Duplicate(_) | PlatformError::Invalid { .. } => Status::Semantic,
        };
        CliError::new(status, format!("platform registry: {e}"))
    }
}

/// Prints every diagnostic of a failed link to stderr and maps it to a status.
pub fn link_failure(e: LinkError) -> CliError {
    match e {
        LinkError::Io { file, message } => CliError::new(Status::Io, format!("{file}: {message}")),
        LinkError::Parse { file, errors } => {
            for err in &errors {
                eprintln!("{file}:{err}");
            }
            CliError::new(Status::Parse, format!("{file}: {} syntax error(s)", errors.len()))
        }
        LinkError::Semantic(diags) => {
            for d in &diags {
                eprintln!("{d}");
            }
            let n = diags.iter().filter(|d| d.is_error()).count();
            CliError::new(Status::Semantic, format!("{n} model error(s)"))
        }
    }
}

pub fn codegen_failure(e: CodegenError) -> CliError {
    let status = match &e {
        CodegenError::Rejected(_) => Status::Rejected,
        CodegenError::Io { .. } => Status::Io,
        CodegenError::Semantic(diags) => {
            for d in diags {
                eprintln!("{d}");
            }
            Status::Semantic
        }
        CodegenError::Ml(MlError::NonFinite { .. }) => Status::Numeric,
        _ => Status::Semantic,
    };
    CliError::new(status, e.to_string())
}
