use irrev_core::symstates::BasisConvention;
use irrev_core::ProbVector;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Convention {
    Column,
    Row,
}

impl From<Convention> for BasisConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Column => BasisConvention::Column,
            Convention::Row => BasisConvention::Row,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Show {
    Eigs,
    Ptrace,
    Ptranspose,
    Twirl,
}

/// Parses `a,b,c,…` into a probability vector of length `d`. No renormalization.
pub fn parse_lambda(text: &str, d: usize) -> Result<ProbVector, CliError> {
    let values = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("cannot parse {s:?} as a number")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if values.len() != d {
        return Err(CliError::Usage(format!(
            "lambda has {} entries but --d is {d}",
            values.len()
        )));
    }
    ProbVector::new(values).map_err(|e| CliError::Usage(e.to_string()))
}
