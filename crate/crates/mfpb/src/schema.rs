//! Dataset schema: which CSV columns hold the label, the protected groups and
//! the features.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::json;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureSpec {
    pub column: String,
    pub kind: FeatureKind,
}

/// One protected attribute: rows whose value is in `protected_values` form
/// the protected group, all others the non-protected group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtectedSpec {
    pub column: String,
    pub protected_values: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingPolicy {
    /// Reject the file at the first missing or unparseable value.
    #[default]
    Error,
    /// Skip rows with missing or unparseable values.
    DropRow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSchema {
    pub label_column: String,
    pub positive_label: String,
    pub protected: Vec<ProtectedSpec>,
    pub features: Vec<FeatureSpec>,
    #[serde(default)]
    pub missing_policy: MissingPolicy,
}

impl DatasetSchema {
    /// Structural checks that do not need the data file.
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.protected.is_empty() {
            return Err("at least one protected attribute is required".into());
        }
        if self.features.is_empty() {
            return Err("at least one feature column is required".into());
        }
        let mut seen = HashSet::new();
        for p in &self.protected {
            if p.column == self.label_column {
                return Err(format!("label column '{}' cannot be protected", p.column));
            }
            if !seen.insert(p.column.as_str()) {
                return Err(format!("protected column '{}' listed twice", p.column));
            }
            if p.protected_values.is_empty() {
                return Err(format!("protected column '{}' has no protected values", p.column));
            }
        }
        let mut seen = HashSet::new();
        for f in &self.features {
            if f.column == self.label_column {
                return Err(format!("label column '{}' cannot be a feature", f.column));
            }
            if !seen.insert(f.column.as_str()) {
                return Err(format!("feature column '{}' listed twice", f.column));
            }
        }
        Ok(())
    }

    /// Reads and validates a schema file.
    pub fn load(path: &Path) -> Result<Self> {
        let schema: DatasetSchema = json::read(path)?;
        schema.validate().map_err(|message| CliError::Schema { path: path.to_path_buf(), message })?;
        Ok(schema)
    }
}
