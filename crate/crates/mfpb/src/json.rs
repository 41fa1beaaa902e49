//! JSON file helpers with path-aware errors.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{CliError, Result};

/// Parses `path`; errors name the file and the JSON path of the bad value.
pub fn read<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    from_str(path, &text)
}

pub fn from_str<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|source| CliError::Json { path: path.to_path_buf(), source })
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data structures serialize");
    s.push('\n');
    s
}

pub fn write<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_string(value)).map_err(|e| CliError::io(path, e))
}
