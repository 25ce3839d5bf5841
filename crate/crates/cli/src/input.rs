//! Reading seed files with line/column diagnostics.

use std::fmt;
use std::path::Path;

use supercluster::compat::Mode;
use supercluster::seed::{QuantumSeed, SeedError, SeedInput};

/// Either a fresh input (`quiver`, `lambda`, optional `mode`) or a full seed
/// state as printed by `mutate --format json`.
#[derive(Debug, Clone)]
pub enum SeedSource {
    Input(SeedInput),
    State(Box<QuantumSeed>),
}

#[derive(Debug)]
pub struct Malformed(pub String);

impl fmt::Display for Malformed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Malformed {}

fn located(origin: &str, err: &serde_json::Error) -> Malformed {
    if err.line() == 0 {
        Malformed(format!("{origin}: {err}"))
    } else {
        Malformed(format!("{origin}:{}:{}: {err}", err.line(), err.column()))
    }
}

/// Parses `text`; `origin` names the source in diagnostics.
pub fn parse_source(origin: &str, text: &str) -> Result<SeedSource, Malformed> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| located(origin, &e))?;
    if value.get("vars").is_some() {
        let seed: QuantumSeed = serde_json::from_str(text).map_err(|e| located(origin, &e))?;
        Ok(SeedSource::State(Box::new(seed)))
    } else {
        let input: SeedInput = serde_json::from_str(text).map_err(|e| located(origin, &e))?;
        Ok(SeedSource::Input(input))
    }
}

pub fn read_source(path: &Path) -> Result<SeedSource, Malformed> {
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Malformed(format!("{origin}: {e}")))?;
    parse_source(&origin, &text)
}

impl SeedSource {
    /// Mode used for checking: the override, else the file's, else strict.
    pub fn mode(&self, over: Option<Mode>) -> Mode {
        match self {
            SeedSource::Input(i) => over.or(i.mode).unwrap_or_default(),
            SeedSource::State(s) => over.unwrap_or(s.mode()),
        }
    }

    /// Builds the seed. A stored state keeps its variables; a mode override
    /// only matters for fresh inputs.
    pub fn into_seed(self, over: Option<Mode>) -> Result<QuantumSeed, SeedError> {
        match self {
            SeedSource::Input(mut i) => {
                if over.is_some() {
                    i.mode = over;
                }
                QuantumSeed::from_input(i, Mode::Strict)
            }
            SeedSource::State(s) => Ok(*s),
        }
    }
}
