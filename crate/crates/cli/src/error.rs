use barcode_lab::crofton::CroftonError;
use barcode_lab::entropy::EntropyError;
use barcode_lab::filtration::FiltrationError;
use barcode_lab::synthetic::SyntheticError;
use barcode_lab::twist::CurveError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("budget refused: {0}")]
    Budget(String),
    #[error("{0}")]
    Run(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Budget(_) => 3,
            _ => 1,
        }
    }
}

impl From<FiltrationError> for CliError {
    fn from(e: FiltrationError) -> Self {
        match e {
            FiltrationError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            FiltrationError::InvalidGrid(_) => CliError::Config(e.to_string()),
            _ => CliError::Run(e.to_string()),
        }
    }
}

impl From<CroftonError> for CliError {
    fn from(e: CroftonError) -> Self {
        match e {
            CroftonError::BudgetExhausted(_) => CliError::Budget(e.to_string()),
            CroftonError::Curve(_) => CliError::Run(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<EntropyError> for CliError {
    fn from(e: EntropyError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<SyntheticError> for CliError {
    fn from(e: SyntheticError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<CurveError> for CliError {
    fn from(e: CurveError) -> Self {
        CliError::Run(e.to_string())
    }
}
