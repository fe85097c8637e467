//! Game file formats: JSON (canonical), CSV (payoff grid only) and the
//! stochastic-game JSON consumed by the meta-game builder.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{GameError, SymmetricGame, DEFAULT_EPSILON};
use crate::metagame::{MetagameError, StochasticGame};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: invalid JSON: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("{path}: invalid CSV: {detail}")]
    Csv { path: String, detail: String },
    #[error("{path}: \"n\" is {declared} but payoff_row has {rows} rows")]
    SizeMismatch {
        path: String,
        declared: usize,
        rows: usize,
    },
    #[error("{path}: {detail}")]
    Stochastic { path: String, detail: String },
    #[error("{path}: {source}")]
    Game { path: String, source: GameError },
    #[error("{path}: {source}")]
    Metagame {
        path: String,
        source: MetagameError,
    },
}

/// On-disk symmetric game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub payoff_row: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

impl GameFile {
    pub fn from_game(game: &SymmetricGame) -> Self {
        GameFile {
            n: game.n(),
            labels: Some(game.labels().to_vec()),
            payoff_row: game.payoff_rows(),
            epsilon: Some(game.epsilon()),
        }
    }

    pub fn into_game(self, path: &str) -> Result<SymmetricGame, IoError> {
        if self.payoff_row.len() != self.n {
            return Err(IoError::SizeMismatch {
                path: path.to_string(),
                declared: self.n,
                rows: self.payoff_row.len(),
            });
        }
        SymmetricGame::new(
            self.n,
            self.payoff_row,
            self.labels,
            self.epsilon.unwrap_or(DEFAULT_EPSILON),
        )
        .map_err(|source| IoError::Game {
            path: path.to_string(),
            source,
        })
    }
}

/// Reads `path`, or stdin when `path` is `-`.
pub fn read_source(path: &str) -> Result<String, IoError> {
    let mut text = String::new();
    let result = if path == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    result.map_err(|source| IoError::Read {
        path: path.to_string(),
        source,
    })?;
    Ok(text)
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), IoError> {
    std::fs::write(path, contents).map_err(|source| IoError::Write {
        path: path.display().to_string(),
        source,
    })
}

pub fn parse_game_json(text: &str, path: &str) -> Result<SymmetricGame, IoError> {
    let file: GameFile = serde_json::from_str(text).map_err(|source| IoError::Json {
        path: path.to_string(),
        source,
    })?;
    file.into_game(path)
}

/// Square grid of row-player payoffs, no header; labels default to `s1..sn`.
pub fn parse_game_csv(text: &str, path: &str) -> Result<SymmetricGame, IoError> {
    let csv_err = |detail: String| IoError::Csv {
        path: path.to_string(),
        detail,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_err(e.to_string()))?;
        let row = record
            .iter()
            .enumerate()
            .map(|(j, field)| {
                field
                    .parse::<f64>()
                    .map_err(|_| csv_err(format!("row {}, column {}: {field:?} is not a number", i + 1, j + 1)))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    SymmetricGame::from_rows(rows).map_err(|source| IoError::Game {
        path: path.to_string(),
        source,
    })
}

/// JSON unless the path ends in `.csv` or the content does not start with `{`.
pub fn parse_game(text: &str, path: &str) -> Result<SymmetricGame, IoError> {
    let is_csv = path.to_ascii_lowercase().ends_with(".csv") || !text.trim_start().starts_with('{');
    if is_csv {
        parse_game_csv(text, path)
    } else {
        parse_game_json(text, path)
    }
}

pub fn load_game(path: &str) -> Result<SymmetricGame, IoError> {
    parse_game(&read_source(path)?, path)
}

/// Pretty JSON; reparses to an identical game.
pub fn game_to_json(game: &SymmetricGame) -> String {
    serde_json::to_string_pretty(&GameFile::from_game(game)).expect("game file serializes")
}

/// Single-line JSON for JSONL streams.
pub fn game_to_json_line(game: &SymmetricGame) -> String {
    serde_json::to_string(&GameFile::from_game(game)).expect("game file serializes")
}

/// On-disk stochastic game; per-triple maps are keyed `"x|a1|a2"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StochasticGameFile {
    pub states: Vec<String>,
    pub actions: Vec<String>,
    pub initial_dist: Vec<f64>,
    pub discount1: f64,
    pub discount2: f64,
    pub transitions: BTreeMap<String, Vec<f64>>,
    pub reward1: BTreeMap<String, f64>,
    pub reward2: BTreeMap<String, f64>,
}

impl StochasticGameFile {
    pub fn into_game(self, path: &str) -> Result<StochasticGame, IoError> {
        let err = |detail: String| IoError::Stochastic {
            path: path.to_string(),
            detail,
        };
        let mut keys = Vec::new();
        for x in &self.states {
            for a1 in &self.actions {
                for a2 in &self.actions {
                    keys.push(format!("{x}|{a1}|{a2}"));
                }
            }
        }
        for (name, present) in [
            ("transitions", self.transitions.keys().collect::<Vec<_>>()),
            ("reward1", self.reward1.keys().collect()),
            ("reward2", self.reward2.keys().collect()),
        ] {
            if let Some(extra) = present.iter().find(|k| !keys.contains(k)) {
                return Err(err(format!("{name}: unknown key {extra:?}")));
            }
        }
        let mut transitions = Vec::with_capacity(keys.len());
        let mut reward1 = Vec::with_capacity(keys.len());
        let mut reward2 = Vec::with_capacity(keys.len());
        for key in &keys {
            let missing = |name: &str| err(format!("{name}: missing key {key:?}"));
            transitions.push(self.transitions.get(key).cloned().ok_or_else(|| missing("transitions"))?);
            reward1.push(*self.reward1.get(key).ok_or_else(|| missing("reward1"))?);
            reward2.push(*self.reward2.get(key).ok_or_else(|| missing("reward2"))?);
        }
        StochasticGame::new(
            self.states,
            self.actions,
            self.initial_dist,
            transitions,
            reward1,
            reward2,
            self.discount1,
            self.discount2,
        )
        .map_err(|source| IoError::Metagame {
            path: path.to_string(),
            source,
        })
    }
}

pub fn parse_stochastic_json(text: &str, path: &str) -> Result<StochasticGame, IoError> {
    let file: StochasticGameFile = serde_json::from_str(text).map_err(|source| IoError::Json {
        path: path.to_string(),
        source,
    })?;
    file.into_game(path)
}

pub fn load_stochastic_game(path: &str) -> Result<StochasticGame, IoError> {
    parse_stochastic_json(&read_source(path)?, path)
}
