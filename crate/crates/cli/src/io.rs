//! JSON loading and saving. Inputs may be inline JSON, a file path, or `-`
//! for stdin.

use std::fs;
use std::io::Read;
use std::path::Path;

use capprox::{FunctionExpr, C64};
use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] capprox::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    /// Schema violation; `field` is a path like `.points[2]`.
    #[error("{origin}: invalid input at {field}: {message}")]
    Schema {
        origin: String,
        field: String,
        message: String,
    },

    #[error("invalid argument: {0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use capprox::Error as E;
        match self {
            CliError::Io { .. } => 4,
            CliError::Schema { .. } | CliError::Usage(_) => 2,
            CliError::Core(e) => match e.root() {
                E::Argument(_)
                | E::DimensionMismatch { .. }
                | E::Parse(_)
                | E::ResourceBudget { .. }
                | E::NotMeasurable { .. } => 2,
                _ => 3,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn read_source(arg: &str) -> CliResult<(String, String)> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(("<inline>".into(), arg.to_string()));
    }
    let io_err = |source| CliError::Io {
        path: arg.to_string(),
        source,
    };
    if arg == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(io_err)?;
        return Ok(("<stdin>".into(), s));
    }
    Ok((arg.to_string(), fs::read_to_string(arg).map_err(io_err)?))
}

/// Parse with field-path error messages. A missing field is reported at the
/// path it would have had, e.g. `.mesh`.
pub fn parse_json<T: DeserializeOwned>(origin: &str, text: &str) -> CliResult<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let base = e.path().to_string();
        let message = e.inner().to_string();
        let field = match message
            .strip_prefix("missing field `")
            .and_then(|r| r.split('`').next())
        {
            Some(name) if base == "." => format!(".{name}"),
            Some(name) => format!("{base}.{name}"),
            None => base,
        };
        CliError::Schema {
            origin: origin.to_string(),
            field,
            message,
        }
    })
}

pub fn load<T: DeserializeOwned>(arg: &str) -> CliResult<T> {
    let (origin, text) = read_source(arg)?;
    parse_json(&origin, &text)
}

pub fn save<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string(value).expect("serializable value");
    text.push('\n');
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// A complex constant such as `2`, `-1.5+0.25i` or `3i`.
pub fn parse_complex(s: &str) -> CliResult<C64> {
    let e = FunctionExpr::parse(s, 1)?;
    match e.to_polynomial() {
        Some(p) if p.degree() == 0 => Ok(e.eval(&[C64::new(0.0, 0.0)])?),
        _ => Err(CliError::Usage(format!("{s:?} is not a complex constant"))),
    }
}

/// Comma-separated complex coordinates.
pub fn parse_point(s: &str) -> CliResult<Vec<C64>> {
    s.split(',').map(|c| parse_complex(c.trim())).collect()
}
