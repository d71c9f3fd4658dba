use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigEntry {
    pub csv_path: PathBuf,
    pub event_month: u32,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchConfig {
    pub entries: Vec<ConfigEntry>,
    pub alpha: f64,
    pub output_dir: PathBuf,
    /// Recorded in every diagnostics file; the pipeline itself draws no random numbers.
    pub seed: u64,
    pub jobs: usize,
    pub svg: bool,
}

#[derive(Deserialize)]
struct Row {
    csv_path: String,
    event_month: u32,
    label: String,
}

impl BatchConfig {
    pub fn new(entries: Vec<ConfigEntry>, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            entries,
            alpha: 0.05,
            output_dir: output_dir.into(),
            seed: 0,
            jobs: 1,
            svg: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.entries.is_empty() {
            bail!("config has no entries");
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            bail!("alpha must lie in (0, 1), got {}", self.alpha);
        }
        if self.jobs == 0 {
            bail!("jobs must be at least 1");
        }
        let mut seen = HashSet::new();
        for e in &self.entries {
            if !(1..=12).contains(&e.event_month) {
                bail!("entry {:?}: event_month {} is not in 1..=12", e.label, e.event_month);
            }
            if !seen.insert(file_stem(&e.label)) {
                bail!("duplicate label {:?}", e.label);
            }
        }
        Ok(())
    }
}

/// Reads `csv_path,event_month,label` rows. Relative paths resolve against
/// the config file's directory.
pub fn load_entries(config_path: &Path) -> Result<Vec<ConfigEntry>> {
    let text = fs::read_to_string(config_path).with_context(|| format!("reading {}", config_path.display()))?;
    parse_entries(&text, config_path.parent().unwrap_or(Path::new(".")))
}

pub fn parse_entries(text: &str, base_dir: &Path) -> Result<Vec<ConfigEntry>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    for want in ["csv_path", "event_month", "label"] {
        if !headers.iter().any(|h| h == want) {
            bail!("config header must contain {want}; found {:?}", headers.iter().collect::<Vec<_>>());
        }
    }
    let mut entries = Vec::new();
    for (i, row) in reader.deserialize::<Row>().enumerate() {
        let row = row.with_context(|| format!("config row {}", i + 2))?;
        let path = PathBuf::from(&row.csv_path);
        entries.push(ConfigEntry {
            csv_path: if path.is_absolute() { path } else { base_dir.join(path) },
            event_month: row.event_month,
            label: row.label,
        });
    }
    Ok(entries)
}

/// File-name-safe form of a label.
pub fn file_stem(label: &str) -> String {
    let stem: String = label
        .trim()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    if stem.is_empty() {
        "_".into()
    } else {
        stem
    }
}
