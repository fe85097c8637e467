//! Two-player symmetric normal-form games.
//!
//! Only the row player's payoff matrix is stored. The column player's payoff
//! follows from symmetry: `J2(a, b) = J1(b, a)`. A consequence used all over
//! the crate is that the payoff a player earns by playing `own` against an
//! opponent playing `opponent` is `payoff_row[own][opponent]` regardless of
//! which seat the player occupies.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance used when the caller does not supply one.
pub const DEFAULT_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("a game needs at least one strategy")]
    Empty,
    #[error("payoff matrix must be {expected}x{expected}: {detail}")]
    DimensionMismatch { expected: usize, detail: String },
    #[error("payoff entry ({row}, {col}) is not finite: {value}")]
    NonFiniteEntry { row: usize, col: usize, value: f64 },
    #[error("expected {expected} labels, got {actual}")]
    LabelCountMismatch { expected: usize, actual: usize },
    #[error("duplicate strategy label {0:?}")]
    DuplicateLabel(String),
    #[error("epsilon must be finite and non-negative, got {0}")]
    InvalidEpsilon(f64),
    #[error("strategy index {index} out of range for a game with {n} strategies")]
    IndexOutOfRange { index: usize, n: usize },
}

/// One of the two seats at the table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Player::One => 1,
            Player::Two => 2,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// A joint strategy `(row, col)`: the row player's and column player's strategy indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct JointStrategy {
    pub row: usize,
    pub col: usize,
}

impl JointStrategy {
    pub const fn new(row: usize, col: usize) -> Self {
        JointStrategy { row, col }
    }

    /// Strategy held by `player`.
    pub fn strategy_of(self, player: Player) -> usize {
        match player {
            Player::One => self.row,
            Player::Two => self.col,
        }
    }

    /// Returns a copy where `player` switched to `strategy`.
    pub fn with(self, player: Player, strategy: usize) -> Self {
        match player {
            Player::One => JointStrategy::new(strategy, self.col),
            Player::Two => JointStrategy::new(self.row, strategy),
        }
    }

    /// Dense node index `row * n + col` used by every joint digraph.
    pub fn index(self, n: usize) -> usize {
        self.row * n + self.col
    }

    pub fn from_index(index: usize, n: usize) -> Self {
        JointStrategy::new(index / n, index % n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetricGame {
    n: usize,
    labels: Vec<String>,
    /// Row-major `n * n` row-player payoffs.
    payoff: Vec<f64>,
    epsilon: f64,
}

impl SymmetricGame {
    /// Validating constructor. `labels` defaults to `s1..sn`.
    pub fn new(
        n: usize,
        payoff_row: Vec<Vec<f64>>,
        labels: Option<Vec<String>>,
        epsilon: f64,
    ) -> Result<Self, GameError> {
        if n == 0 {
            return Err(GameError::Empty);
        }
        if payoff_row.len() != n {
            return Err(GameError::DimensionMismatch {
                expected: n,
                detail: format!("got {} rows", payoff_row.len()),
            });
        }
        let mut payoff = Vec::with_capacity(n * n);
        for (i, row) in payoff_row.iter().enumerate() {
            if row.len() != n {
                return Err(GameError::DimensionMismatch {
                    expected: n,
                    detail: format!("row {} has {} entries", i, row.len()),
                });
            }
            for (j, &value) in row.iter().enumerate() {
                if !value.is_finite() {
                    return Err(GameError::NonFiniteEntry { row: i, col: j, value });
                }
                payoff.push(value);
            }
        }
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(GameError::InvalidEpsilon(epsilon));
        }
        let labels = match labels {
            Some(labels) => {
                if labels.len() != n {
                    return Err(GameError::LabelCountMismatch {
                        expected: n,
                        actual: labels.len(),
                    });
                }
                let mut seen = HashSet::new();
                for label in &labels {
                    if !seen.insert(label.as_str()) {
                        return Err(GameError::DuplicateLabel(label.clone()));
                    }
                }
                labels
            }
            None => default_labels(n),
        };
        Ok(SymmetricGame {
            n,
            labels,
            payoff,
            epsilon,
        })
    }

    /// Square matrix of row-player payoffs with default labels and tolerance.
    pub fn from_rows(payoff_row: Vec<Vec<f64>>) -> Result<Self, GameError> {
        let n = payoff_row.len();
        SymmetricGame::new(n, payoff_row, None, DEFAULT_EPSILON)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, s: usize) -> &str {
        &self.labels[s]
    }

    /// Payoff to whoever plays `own` against an opponent playing `opponent`.
    ///
    /// Panics if either index is out of range; use [`SymmetricGame::payoff`]
    /// for checked access.
    #[inline]
    pub fn value(&self, own: usize, opponent: usize) -> f64 {
        self.payoff[own * self.n + opponent]
    }

    pub fn payoff_rows(&self) -> Vec<Vec<f64>> {
        self.payoff.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// Same game with a different comparison tolerance.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self, GameError> {
        SymmetricGame::new(self.n, self.payoff_rows(), Some(self.labels.clone()), epsilon)
    }

    pub fn check_index(&self, s: usize) -> Result<(), GameError> {
        if s < self.n {
            Ok(())
        } else {
            Err(GameError::IndexOutOfRange { index: s, n: self.n })
        }
    }

    /// `J^player(joint)`.
    pub fn payoff(&self, player: Player, joint: JointStrategy) -> Result<f64, GameError> {
        self.check_index(joint.row)?;
        self.check_index(joint.col)?;
        Ok(match player {
            Player::One => self.value(joint.row, joint.col),
            Player::Two => self.value(joint.col, joint.row),
        })
    }

    fn column_max(&self, opponent: usize) -> f64 {
        (0..self.n)
            .map(|s| self.value(s, opponent))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Whether `candidate` is within epsilon of the best payoff against `opponent`.
    #[inline]
    pub fn is_best_response(&self, candidate: usize, opponent: usize) -> bool {
        self.value(candidate, opponent) >= self.column_max(opponent) - self.epsilon
    }

    /// Sorted set of best responses to `s`; never empty.
    pub fn best_responses(&self, s: usize) -> Result<Vec<usize>, GameError> {
        self.check_index(s)?;
        Ok(self.best_responses_unchecked(s))
    }

    fn best_responses_unchecked(&self, s: usize) -> Vec<usize> {
        let best = self.column_max(s);
        (0..self.n)
            .filter(|&c| self.value(c, s) >= best - self.epsilon)
            .collect()
    }

    /// `table[s][c]` is true iff `c` best-responds to `s`.
    pub fn best_response_table(&self) -> Vec<Vec<bool>> {
        (0..self.n)
            .map(|s| {
                let best = self.column_max(s);
                (0..self.n)
                    .map(|c| self.value(c, s) >= best - self.epsilon)
                    .collect()
            })
            .collect()
    }

    /// Strategies `s` with `s` in `B(s)`, i.e. `(s, s)` is a pure Nash equilibrium.
    pub fn self_best_response_strategies(&self) -> Vec<usize> {
        (0..self.n).filter(|&s| self.is_best_response(s, s)).collect()
    }

    /// Unordered pairs `(a, b)`, `a < b`, that best-respond to each other.
    pub fn mutual_best_response_pairs(&self) -> Vec<(usize, usize)> {
        let table = self.best_response_table();
        let mut pairs = Vec::new();
        for a in 0..self.n {
            for b in (a + 1)..self.n {
                if table[a][b] && table[b][a] {
                    pairs.push((a, b));
                }
            }
        }
        pairs
    }

    /// Moves of a player currently on `own` against `opponent` that count as a
    /// strict best-response improvement.
    ///
    /// A move to `c` qualifies iff `c` is a best response to `opponent` and
    /// `own` is not. Under exact arithmetic this is the same as "best response
    /// with strictly larger payoff"; under a tolerance it keeps the joint
    /// digraph and the Kronecker formula over `A_B` in exact agreement.
    pub fn strict_improvements(&self, own: usize, opponent: usize) -> Vec<usize> {
        let best = self.column_max(opponent);
        let threshold = best - self.epsilon;
        if self.value(own, opponent) >= threshold {
            return Vec::new();
        }
        (0..self.n)
            .filter(|&c| self.value(c, opponent) >= threshold)
            .collect()
    }

    /// Moves (including staying on `own`) whose payoff against `opponent` is
    /// at least the current payoff, within epsilon.
    pub fn weak_improvements(&self, own: usize, opponent: usize) -> Vec<usize> {
        let current = self.value(own, opponent);
        (0..self.n)
            .filter(|&c| self.value(c, opponent) >= current - self.epsilon)
            .collect()
    }

    /// True iff `to` is not dominated by `from`: some opponent strategy gives
    /// `to` at least the payoff of `from`.
    pub fn not_dominated_by(&self, from: usize, to: usize) -> bool {
        (0..self.n).any(|s| self.value(to, s) >= self.value(from, s) - self.epsilon)
    }
}

pub fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("s{i}")).collect()
}
