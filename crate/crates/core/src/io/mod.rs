//! Text formats and seeded random instance generators.

mod generate;
mod stp;
mod wtap_format;

pub use generate::{gen_steiner, gen_wtap, GeneratorConfig};
pub use stp::{parse_stp, write_stp};
pub use wtap_format::{parse_wtap, write_wtap};

use crate::error::{Error, Result};

pub(crate) const CONTRACT_HINT: &str = " (contract zero-weight edges before solving)";

/// Parses a strictly positive, finite decimal weight.
pub(crate) fn parse_weight(token: &str, line: usize, hint: &'static str) -> Result<f64> {
    let value: f64 = token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid weight {token:?}"),
    })?;
    if !value.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("weight {token:?} is not finite"),
        });
    }
    if value <= 0.0 {
        return Err(Error::NonPositiveWeight {
            line,
            value: token.to_string(),
            hint,
        });
    }
    Ok(value)
}

/// Parses a 1-based vertex number in `1..=n` and returns it 0-based.
pub(crate) fn parse_vertex(token: &str, n: usize, line: usize) -> Result<usize> {
    match token.parse::<usize>() {
        Ok(v) if (1..=n).contains(&v) => Ok(v - 1),
        _ => Err(Error::Parse {
            line,
            message: format!("vertex {token:?} is not in 1..={n}"),
        }),
    }
}

pub(crate) fn parse_count(token: &str, line: usize) -> Result<usize> {
    token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid count {token:?}"),
    })
}
