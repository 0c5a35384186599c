use std::fmt::Display;
use std::fs;
use std::path::Path;

use ilpk::format::{self, Format, Instance};
use ilpk::{Error, SearchBox, TableInstance, DEFAULT_NODE_CAP};
use serde_json::Value;

pub const EXIT_OK: u8 = 0;
pub const EXIT_DISAGREE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_CAP: u8 = 3;
pub const EXIT_YES: u8 = 10;
pub const EXIT_NO: u8 = 20;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SearchSpaceExceeded { .. } | Error::TableTooLarge { .. } => EXIT_CAP,
            Error::Internal(_) => EXIT_DISAGREE,
            Error::Parse { .. } | Error::Validation(_) | Error::InvalidInput(_) => EXIT_USAGE,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn with_path<T, E: Display>(path: &Path, r: Result<T, E>) -> CliResult<T> {
    r.map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

pub fn read(path: &Path) -> CliResult<String> {
    with_path(path, fs::read_to_string(path))
}

pub fn write(path: &Path, text: &str) -> CliResult<()> {
    with_path(path, fs::write(path, text))
}

pub fn write_json(path: &Path, value: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    write(path, &text)
}

/// An input file: one of the JSON formats or a tbl-v1 table.
pub enum Input {
    Json(Instance),
    Table(TableInstance),
}

pub fn read_input(path: &Path) -> CliResult<Input> {
    let text = read(path)?;
    if text.trim_start().starts_with("tbl-v1") {
        return Ok(Input::Table(with_path(path, TableInstance::parse(&text))?));
    }
    let fmt = with_path(path, format::detect_format(&text))?;
    Ok(Input::Json(with_path(
        path,
        format::parse_instance(&text, fmt),
    )?))
}

pub fn read_instance(path: &Path) -> CliResult<Instance> {
    match read_input(path)? {
        Input::Json(i) => Ok(i),
        Input::Table(_) => Err(CliError::usage(format!(
            "{}: a table file is not accepted here",
            path.display()
        ))),
    }
}

pub fn read_box(path: &Path) -> CliResult<SearchBox> {
    with_path(path, format::parse_box(&read(path)?))
}

pub fn read_graph(path: &Path) -> CliResult<ilpk::GraphInstance> {
    let text = read(path)?;
    match with_path(path, format::detect_format(&text))? {
        Format::Graph => with_path(path, format::parse_graph(&text)),
        _ => Err(CliError::usage(format!(
            "{}: expected a graph file",
            path.display()
        ))),
    }
}

/// `--node-cap`, else `ILPK_NODE_CAP`, else the library default.
pub fn node_cap(flag: Option<u64>) -> CliResult<u64> {
    if let Some(cap) = flag {
        return Ok(cap);
    }
    match std::env::var("ILPK_NODE_CAP") {
        Ok(s) => s.trim().parse().map_err(|_| {
            CliError::usage(format!("ILPK_NODE_CAP={s:?} is not a nonnegative integer"))
        }),
        Err(_) => Ok(DEFAULT_NODE_CAP),
    }
}
