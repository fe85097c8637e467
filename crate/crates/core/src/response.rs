//! Response digraphs of a symmetric game.
//!
//! Strategy-level graphs have `n` nodes. Joint graphs have `n^2` nodes with
//! joint strategy `(i, j)` at index `i * n + j`.

use serde::{Deserialize, Serialize};

use crate::digraph::Digraph;
use crate::game::{JointStrategy, Player, SymmetricGame};

/// Which self-play dynamics / joint digraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Strictly best-response moves.
    Strict,
    /// Weakly better-response moves.
    Weak,
}

impl Variant {
    /// Strategies a player on `own` may move to against `opponent`,
    /// excluding staying put.
    pub fn deviations(self, game: &SymmetricGame, own: usize, opponent: usize) -> Vec<usize> {
        let mut moves = match self {
            Variant::Strict => game.strict_improvements(own, opponent),
            Variant::Weak => game.weak_improvements(own, opponent),
        };
        moves.retain(|&s| s != own);
        moves
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Strict => "strict",
            Variant::Weak => "weak",
        })
    }
}

/// `G_B`: edge `a -> b` iff `b` best-responds to `a`.
pub fn best_response_digraph(game: &SymmetricGame) -> Digraph {
    let table = game.best_response_table();
    let successors = table
        .iter()
        .map(|row| (0..row.len()).filter(|&b| row[b]).collect())
        .collect();
    Digraph::from_successors(successors, game.labels().to_vec())
}

/// `G_N`: edge `a -> b` iff some opponent strategy gives `b` at least the payoff of `a`.
pub fn non_dominated_digraph(game: &SymmetricGame) -> Digraph {
    let n = game.n();
    let successors = (0..n)
        .map(|a| (0..n).filter(|&b| game.not_dominated_by(a, b)).collect())
        .collect();
    Digraph::from_successors(successors, game.labels().to_vec())
}

/// `G_ST^J`: single-player strictly best-response moves.
pub fn joint_strict_br_digraph(game: &SymmetricGame) -> Digraph {
    joint_digraph(game, Variant::Strict)
}

/// `G_WR^J`: single-player weakly better-response moves. No self-loops.
pub fn joint_weak_br_digraph(game: &SymmetricGame) -> Digraph {
    joint_digraph(game, Variant::Weak)
}

pub fn joint_digraph(game: &SymmetricGame, variant: Variant) -> Digraph {
    let n = game.n();
    let mut successors = Vec::with_capacity(n * n);
    for r in 0..n * n {
        let joint = JointStrategy::from_index(r, n);
        let mut succ = Vec::new();
        for player in [Player::One, Player::Two] {
            let own = joint.strategy_of(player);
            let opponent = joint.strategy_of(player.other());
            for s in variant.deviations(game, own, opponent) {
                succ.push(joint.with(player, s).index(n));
            }
        }
        successors.push(succ);
    }
    Digraph::from_successors(successors, joint_names(game))
}

/// Display names `(a,b)` for every joint strategy in index order.
pub fn joint_names(game: &SymmetricGame) -> Vec<String> {
    let n = game.n();
    (0..n * n)
        .map(|r| {
            let j = JointStrategy::from_index(r, n);
            format!("({},{})", game.label(j.row), game.label(j.col))
        })
        .collect()
}
