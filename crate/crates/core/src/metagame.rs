//! Meta-games: flattening a small two-player stochastic game into a
//! symmetric normal-form game over stationary deterministic strategies.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::game::{GameError, SymmetricGame, DEFAULT_EPSILON};

/// Default bound on `|A|^|X|`.
pub const DEFAULT_STRATEGY_CAP: usize = 4096;

const STOCHASTIC_TOLERANCE: f64 = 1e-12;
const RESIDUAL_TOLERANCE: f64 = 1e-10;
const SYMMETRY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetagameError {
    #[error("stochastic game needs at least one state and one action")]
    Empty,
    #[error("duplicate {kind} name {name:?}")]
    DuplicateName { kind: &'static str, name: String },
    #[error("{what}: expected length {expected}, got {actual}")]
    Shape {
        what: String,
        expected: usize,
        actual: usize,
    },
    #[error("{what} is not a probability vector (entries >= 0, sum 1)")]
    NotADistribution { what: String },
    #[error("{what} = {value} is not finite")]
    NonFinite { what: String, value: f64 },
    #[error("discount for player {player} must lie in (0, 1), got {value}")]
    InvalidDiscount { player: u8, value: f64 },
    #[error("{count} strategies exceed the cap of {cap}")]
    ExplosionCap { count: String, cap: usize },
    #[error("strategy does not assign a valid action to every state")]
    InvalidStrategy,
    #[error("policy evaluation system is singular")]
    SingularSystem,
    #[error("policy evaluation residual {0:e} exceeds tolerance")]
    ResidualTooLarge(f64),
    #[error("meta-game is not symmetric: J1(s{i}, s{j}) = {j1} but J2(s{j}, s{i}) = {j2}", i = .row + 1, j = .col + 1)]
    AsymmetryDetected { row: usize, col: usize, j1: f64, j2: f64 },
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Two-player stochastic game with a shared action set.
///
/// Per-triple data is indexed by `(x * m + a1) * m + a2` where `m` is the
/// number of actions.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticGame {
    states: Vec<String>,
    actions: Vec<String>,
    initial_dist: Vec<f64>,
    transitions: Vec<Vec<f64>>,
    reward1: Vec<f64>,
    reward2: Vec<f64>,
    discount1: f64,
    discount2: f64,
}

/// Stationary deterministic strategy: action index per state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy(pub Vec<usize>);

impl StochasticGame {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        states: Vec<String>,
        actions: Vec<String>,
        initial_dist: Vec<f64>,
        transitions: Vec<Vec<f64>>,
        reward1: Vec<f64>,
        reward2: Vec<f64>,
        discount1: f64,
        discount2: f64,
    ) -> Result<Self, MetagameError> {
        if states.is_empty() || actions.is_empty() {
            return Err(MetagameError::Empty);
        }
        check_unique("state", &states)?;
        check_unique("action", &actions)?;
        let k = states.len();
        let triples = k * actions.len() * actions.len();

        check_distribution("initial distribution", &initial_dist, k)?;
        check_len("transitions", transitions.len(), triples)?;
        for (t, row) in transitions.iter().enumerate() {
            check_distribution(&format!("transition row {t}"), row, k)?;
        }
        for (name, rewards) in [("reward1", &reward1), ("reward2", &reward2)] {
            check_len(name, rewards.len(), triples)?;
            if let Some((t, &value)) = rewards.iter().enumerate().find(|(_, v)| !v.is_finite()) {
                return Err(MetagameError::NonFinite {
                    what: format!("{name}[{t}]"),
                    value,
                });
            }
        }
        for (player, value) in [(1u8, discount1), (2u8, discount2)] {
            if !(value > 0.0 && value < 1.0) {
                return Err(MetagameError::InvalidDiscount { player, value });
            }
        }
        Ok(StochasticGame {
            states,
            actions,
            initial_dist,
            transitions,
            reward1,
            reward2,
            discount1,
            discount2,
        })
    }

    /// One-state game whose stage game is the symmetric matrix game `rows`
    /// (row-player payoffs), repeated forever with discount `beta`.
    pub fn from_matrix_game(rows: &[Vec<f64>], beta: f64) -> Result<Self, MetagameError> {
        let m = rows.len();
        let mut reward1 = Vec::with_capacity(m * m);
        let mut reward2 = Vec::with_capacity(m * m);
        for (a1, row) in rows.iter().enumerate() {
            check_len(&format!("row {a1}"), row.len(), m)?;
        }
        for (a1, row) in rows.iter().enumerate() {
            for (a2, &v) in row.iter().enumerate() {
                reward1.push(v);
                reward2.push(rows[a2][a1]);
            }
        }
        StochasticGame::new(
            vec!["x".into()],
            (1..=m).map(|a| format!("a{a}")).collect(),
            vec![1.0],
            vec![vec![1.0]; m * m],
            reward1,
            reward2,
            beta,
            beta,
        )
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn initial_dist(&self) -> &[f64] {
        &self.initial_dist
    }

    pub fn discounts(&self) -> (f64, f64) {
        (self.discount1, self.discount2)
    }

    fn triple(&self, x: usize, a1: usize, a2: usize) -> usize {
        let m = self.actions.len();
        (x * m + a1) * m + a2
    }

    pub fn transition(&self, x: usize, a1: usize, a2: usize) -> &[f64] {
        &self.transitions[self.triple(x, a1, a2)]
    }

    pub fn reward(&self, player: u8, x: usize, a1: usize, a2: usize) -> f64 {
        let t = self.triple(x, a1, a2);
        if player == 1 {
            self.reward1[t]
        } else {
            self.reward2[t]
        }
    }

    /// `|A|^|X|`, or `None` on overflow.
    pub fn strategy_count(&self) -> Option<usize> {
        u32::try_from(self.states.len())
            .ok()
            .and_then(|k| self.actions.len().checked_pow(k))
    }
}

fn check_unique(kind: &'static str, names: &[String]) -> Result<(), MetagameError> {
    let mut seen = std::collections::HashSet::new();
    for name in names {
        if !seen.insert(name) {
            return Err(MetagameError::DuplicateName {
                kind,
                name: name.clone(),
            });
        }
    }
    Ok(())
}

fn check_len(what: &str, actual: usize, expected: usize) -> Result<(), MetagameError> {
    if actual == expected {
        Ok(())
    } else {
        Err(MetagameError::Shape {
            what: what.to_string(),
            expected,
            actual,
        })
    }
}

fn check_distribution(what: &str, p: &[f64], len: usize) -> Result<(), MetagameError> {
    check_len(what, p.len(), len)?;
    let valid = p.iter().all(|&v| v.is_finite() && v >= 0.0)
        && (p.iter().sum::<f64>() - 1.0).abs() <= STOCHASTIC_TOLERANCE;
    if valid {
        Ok(())
    } else {
        Err(MetagameError::NotADistribution {
            what: what.to_string(),
        })
    }
}

/// All `|A|^|X|` strategies in lexicographic order of the action tuple
/// `(a(x_1), ..., a(x_k))`; the last state's action varies fastest.
pub fn enumerate_strategies(
    sg: &StochasticGame,
    cap: usize,
) -> Result<Vec<DeterministicStrategy>, MetagameError> {
    let k = sg.states.len();
    let m = sg.actions.len();
    let count = match sg.strategy_count() {
        Some(c) if c <= cap => c,
        Some(c) => {
            return Err(MetagameError::ExplosionCap {
                count: c.to_string(),
                cap,
            })
        }
        None => {
            return Err(MetagameError::ExplosionCap {
                count: format!("{m}^{k}"),
                cap,
            })
        }
    };
    let mut out = Vec::with_capacity(count);
    let mut digits = vec![0usize; k];
    for _ in 0..count {
        out.push(DeterministicStrategy(digits.clone()));
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < m {
                break;
            }
            *d = 0;
        }
    }
    Ok(out)
}

/// Expected discounted payoffs `(J1, J2)` of the joint strategy `(s1, s2)`,
/// from solving `(I - beta P_s) v = r` exactly for each player.
pub fn evaluate_joint(
    sg: &StochasticGame,
    s1: &DeterministicStrategy,
    s2: &DeterministicStrategy,
) -> Result<(f64, f64), MetagameError> {
    let k = sg.states.len();
    let m = sg.actions.len();
    for s in [s1, s2] {
        if s.0.len() != k || s.0.iter().any(|&a| a >= m) {
            return Err(MetagameError::InvalidStrategy);
        }
    }
    let p = DMatrix::from_fn(k, k, |x, y| sg.transition(x, s1.0[x], s2.0[x])[y]);
    let d = DVector::from_column_slice(&sg.initial_dist);
    let mut values = [0.0; 2];
    for (slot, (player, beta)) in [(1u8, sg.discount1), (2u8, sg.discount2)].into_iter().enumerate() {
        let r = DVector::from_fn(k, |x, _| sg.reward(player, x, s1.0[x], s2.0[x]));
        let system = DMatrix::identity(k, k) - &p * beta;
        let v = system
            .clone()
            .lu()
            .solve(&r)
            .ok_or(MetagameError::SingularSystem)?;
        let residual = (&system * &v - &r).amax();
        if residual.is_nan() || residual > RESIDUAL_TOLERANCE {
            return Err(MetagameError::ResidualTooLarge(residual));
        }
        values[slot] = d.dot(&v);
    }
    Ok((values[0], values[1]))
}

/// Meta-game over all deterministic strategies, with symmetry verified.
pub fn build_meta_game(sg: &StochasticGame, cap: usize) -> Result<SymmetricGame, MetagameError> {
    let strategies = enumerate_strategies(sg, cap)?;
    let n = strategies.len();
    let mut j1 = vec![vec![0.0; n]; n];
    let mut j2 = vec![vec![0.0; n]; n];
    for (i, si) in strategies.iter().enumerate() {
        for (j, sj) in strategies.iter().enumerate() {
            let (a, b) = evaluate_joint(sg, si, sj)?;
            j1[i][j] = a;
            j2[i][j] = b;
        }
    }
    for i in 0..n {
        for j in 0..n {
            if (j1[i][j] - j2[j][i]).abs() > SYMMETRY_TOLERANCE {
                return Err(MetagameError::AsymmetryDetected {
                    row: i,
                    col: j,
                    j1: j1[i][j],
                    j2: j2[j][i],
                });
            }
        }
    }
    let labels: Vec<String> = strategies
        .iter()
        .map(|s| {
            s.0.iter()
                .map(|&a| sg.actions[a].as_str())
                .collect::<Vec<_>>()
                .join("/")
        })
        .collect();
    match SymmetricGame::new(n, j1.clone(), Some(labels), DEFAULT_EPSILON) {
        Ok(game) => Ok(game),
        // Action names containing '/' can collide; fall back to s1..sn.
        Err(GameError::DuplicateLabel(_)) => Ok(SymmetricGame::new(n, j1, None, DEFAULT_EPSILON)?),
        Err(e) => Err(e.into()),
    }
}
