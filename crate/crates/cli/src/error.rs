use std::fmt;

use colrep::compose::ComposeError;
use colrep::hash_family::HashFamilyError;
use colrep::ingredient::IngredientError;
use colrep::recover::RecoverError;
use colrep::sweep::SweepError;

/// Process exit codes. Clap reports usage errors with code 2.
pub mod code {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const IO: i32 = 3;
    pub const PARSE: i32 = 4;
    pub const PROPERTY_FAILED: i32 = 5;
    pub const MISMATCH: i32 = 6;
    pub const NOT_LINEAR: i32 = 7;
    pub const INSUFFICIENT_ROWS: i32 = 8;
    pub const RECOVERY_FAILED: i32 = 9;
    pub const INVALID_PARAMETER: i32 = 10;
    pub const MISSING_SYMBOL: i32 = 11;
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new(code::IO, message)
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(code::PARSE, message)
    }

    pub fn param(message: impl Into<String>) -> Self {
        Self::new(code::INVALID_PARAMETER, message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<HashFamilyError> for CliError {
    fn from(e: HashFamilyError) -> Self {
        use HashFamilyError::*;
        let code = match &e {
            Io(_) => code::IO,
            Format(_) | Empty | RaggedRow { .. } | ZeroAlphabet(_) | SymbolOutOfRange { .. } => {
                code::PARSE
            }
            ContainsMissingSymbol => code::MISSING_SYMBOL,
            NotLinear(_) | BadRowLabels(_) => code::NOT_LINEAR,
            RowCountMismatch { .. } | DimensionMismatch { .. } => code::MISMATCH,
            _ => code::INVALID_PARAMETER,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<IngredientError> for CliError {
    fn from(e: IngredientError) -> Self {
        use IngredientError::*;
        let code = match &e {
            Io(_) => code::IO,
            Format(_) => code::PARSE,
            DimensionMismatch { .. } => code::MISMATCH,
            BadParameter(_) | DuplicateNodes | SparsityTooLarge { .. } => code::INVALID_PARAMETER,
            _ => code::RECOVERY_FAILED,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<ComposeError> for CliError {
    fn from(e: ComposeError) -> Self {
        match e {
            ComposeError::HashFamily(e) => e.into(),
            ComposeError::Ingredient(e) => e.into(),
            ComposeError::Io(m) => CliError::io(m),
            ComposeError::Format(m) => CliError::parse(format!("malformed composition file: {m}")),
            ComposeError::RowOutOfRange { .. } => CliError::param(e.to_string()),
            other => CliError::new(code::MISMATCH, other.to_string()),
        }
    }
}

impl From<RecoverError> for CliError {
    fn from(e: RecoverError) -> Self {
        use RecoverError::*;
        let code = match &e {
            DimensionMismatch { .. } => code::MISMATCH,
            NotLinearPattern(_) => code::NOT_LINEAR,
            InsufficientRows { .. } => code::INSUFFICIENT_ROWS,
            MissingSymbolPresent => code::MISSING_SYMBOL,
            BadParameter(_) => code::INVALID_PARAMETER,
            _ => code::RECOVERY_FAILED,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::HashFamily(e) => e.into(),
            SweepError::Ingredient(e) => e.into(),
            SweepError::Recover(e) => e.into(),
            SweepError::BadConfig(m) => CliError::param(m),
            other => CliError::new(code::RECOVERY_FAILED, other.to_string()),
        }
    }
}
