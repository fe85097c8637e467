//! Brute-force references, random game generation and theorem-level checks.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra;
use crate::digraph::Digraph;
use crate::game::{GameError, SymmetricGame, DEFAULT_EPSILON};
use crate::metrics;
use crate::response::{self, Variant};

/// Largest digraph accepted by [`brute_force_scc`].
pub const BRUTE_FORCE_MAX_NODES: usize = 64;

/// Default rejection-sampling budget for [`random_game`].
pub const DEFAULT_MAX_ATTEMPTS: usize = 10_000;

/// Above this `n` the dense `n^2 x n^2` identity check is skipped.
pub const KRONECKER_MAX_N: usize = 32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("brute-force SCC supports at most {BRUTE_FORCE_MAX_NODES} nodes, got {0}")]
    TooLarge(usize),
    #[error("payoff range is empty: low {low} > high {high}")]
    EmptyRange { low: i64, high: i64 },
    #[error("no game satisfied the filter after {attempts} attempts")]
    FilterExhausted { attempts: usize },
    #[error(transparent)]
    Game(#[from] GameError),
}

/// SCC partition by pairwise reachability closure; blocks sorted, ordered
/// by smallest member.
pub fn brute_force_scc(g: &Digraph) -> Result<Vec<Vec<usize>>, OracleError> {
    let n = g.node_count();
    if n > BRUTE_FORCE_MAX_NODES {
        return Err(OracleError::TooLarge(n));
    }
    let mut reach: Vec<u64> = (0..n)
        .map(|u| g.successors(u).iter().fold(1u64 << u, |acc, &v| acc | (1u64 << v)))
        .collect();
    for k in 0..n {
        for i in 0..n {
            if reach[i] & (1u64 << k) != 0 {
                reach[i] |= reach[k];
            }
        }
    }
    let mut assigned = vec![false; n];
    let mut blocks = Vec::new();
    for u in 0..n {
        if assigned[u] {
            continue;
        }
        let block: Vec<usize> = (u..n)
            .filter(|&v| reach[u] & (1u64 << v) != 0 && reach[v] & (1u64 << u) != 0)
            .collect();
        for &v in &block {
            assigned[v] = true;
        }
        blocks.push(block);
    }
    Ok(blocks)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GameFilter {
    pub no_self_best_response: bool,
    pub no_mutual_best_response_pairs: bool,
    /// Every best-response set is a singleton.
    pub generic_best_responses: bool,
}

impl GameFilter {
    pub fn accepts(&self, game: &SymmetricGame) -> bool {
        (!self.no_self_best_response || game.self_best_response_strategies().is_empty())
            && (!self.no_mutual_best_response_pairs || game.mutual_best_response_pairs().is_empty())
            && (!self.generic_best_responses
                || game.best_response_table().iter().all(|row| row.iter().filter(|&&b| b).count() == 1))
    }
}

/// Uniform integer payoffs in `[low, high]`, rejection-sampled until
/// `filter` accepts. Deterministic in `seed`.
pub fn random_game(
    n: usize,
    low: i64,
    high: i64,
    filter: GameFilter,
    seed: u64,
    max_attempts: usize,
) -> Result<SymmetricGame, OracleError> {
    if low > high {
        return Err(OracleError::EmptyRange { low, high });
    }
    if n == 0 {
        return Err(GameError::Empty.into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..max_attempts {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(low..=high) as f64).collect())
            .collect();
        let game = SymmetricGame::new(n, rows, None, DEFAULT_EPSILON)?;
        if filter.accepts(&game) {
            return Ok(game);
        }
    }
    Err(OracleError::FilterExhausted {
        attempts: max_attempts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimRecord {
    pub id: &'static str,
    /// Whether the game satisfies the claim's hypothesis.
    pub applicable: bool,
    pub verdict: Verdict,
    pub witness: Value,
}

/// Every claim evaluated on one game; carries the game so a violation is
/// reproducible from the report alone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub n: usize,
    pub labels: Vec<String>,
    pub payoff_row: Vec<Vec<f64>>,
    pub claims: Vec<ClaimRecord>,
}

impl TheoremReport {
    pub fn claim(&self, id: &str) -> Option<&ClaimRecord> {
        self.claims.iter().find(|c| c.id == id)
    }

    pub fn violations(&self) -> Vec<&ClaimRecord> {
        self.claims
            .iter()
            .filter(|c| c.verdict == Verdict::Violated)
            .collect()
    }

    pub fn all_applicable_hold(&self) -> bool {
        self.violations().is_empty()
    }
}

pub const CLAIM_BD_EQUALS_STRICT: &str = "bd_equals_strict_selfplay";
pub const CLAIM_ND_EQUALS_WEAK_SINGLETON: &str = "nd_equals_weak_selfplay_singleton";
pub const CLAIM_WEAK_SUBSET_ND: &str = "weak_selfplay_subset_nd";
pub const CLAIM_BD_SUBSET_ND: &str = "bd_subset_nd";
pub const CLAIM_STRICT_SUBSET_ND: &str = "strict_selfplay_subset_nd";
pub const CLAIM_ND_UNIQUE_SINK: &str = "nd_unique_sink";
pub const CLAIM_BD_SINKS_AT_LEAST_THREE: &str = "bd_sinks_at_least_three";
pub const CLAIM_KRONECKER_IDENTITY: &str = "kronecker_identity";

fn verdict(applicable: bool, holds: bool) -> Verdict {
    match (applicable, holds) {
        (false, _) => Verdict::NotApplicable,
        (true, true) => Verdict::Holds,
        (true, false) => Verdict::Violated,
    }
}

fn relation(left: &BTreeSet<usize>, right: &BTreeSet<usize>) -> &'static str {
    match (left.is_subset(right), right.is_subset(left)) {
        (true, true) => "equal",
        (true, false) => "proper_subset",
        (false, true) => "proper_superset",
        (false, false) => "incomparable",
    }
}

fn named(game: &SymmetricGame, set: &BTreeSet<usize>) -> Vec<String> {
    set.iter().map(|&s| game.label(s).to_string()).collect()
}

fn record(id: &'static str, applicable: bool, holds: bool, witness: Value) -> ClaimRecord {
    ClaimRecord {
        id,
        applicable,
        verdict: verdict(applicable, holds),
        witness,
    }
}

/// Evaluates every claim on `game`. Hypothesis-gated claims still record the
/// observed sets when not applicable.
pub fn check_theorems(game: &SymmetricGame) -> TheoremReport {
    let n = game.n();
    let bd = metrics::evaluate_bd(game);
    let nd = metrics::evaluate_nd(game);
    let q_st = metrics::joint_preferred_strategies(game, Variant::Strict);
    let q_wr = metrics::joint_preferred_strategies(game, Variant::Weak);
    let (q_b, q_n) = (&bd.preferred, &nd.preferred);

    let self_br = game.self_best_response_strategies();
    let mutual = game.mutual_best_response_pairs();
    let hypothesis = self_br.is_empty() && mutual.is_empty();
    let hypothesis_witness = json!({
        "self_best_response": self_br.iter().map(|&s| game.label(s)).collect::<Vec<_>>(),
        "mutual_best_response_pairs": mutual
            .iter()
            .map(|&(a, b)| [game.label(a), game.label(b)])
            .collect::<Vec<_>>(),
    });

    let mut claims = Vec::with_capacity(8);

    claims.push(record(
        CLAIM_BD_EQUALS_STRICT,
        hypothesis,
        q_b == &q_st,
        json!({
            "bd": named(game, q_b),
            "strict_selfplay": named(game, &q_st),
            "bd_vs_strict_selfplay": relation(q_b, &q_st),
            "hypothesis": hypothesis_witness,
        }),
    ));

    let nd_sinks = &nd.sink_equilibria.components;
    let singleton = nd_sinks.len() == 1 && nd_sinks[0].len() == 1;
    claims.push(record(
        CLAIM_ND_EQUALS_WEAK_SINGLETON,
        singleton,
        q_n == &q_wr,
        json!({
            "nd": named(game, q_n),
            "weak_selfplay": named(game, &q_wr),
            "nd_vs_weak_selfplay": relation(q_n, &q_wr),
        }),
    ));

    claims.push(record(
        CLAIM_WEAK_SUBSET_ND,
        true,
        q_wr.is_subset(q_n),
        json!({
            "weak_selfplay": named(game, &q_wr),
            "nd": named(game, q_n),
            "outside_nd": named(game, &q_wr.difference(q_n).copied().collect()),
        }),
    ));

    claims.push(record(
        CLAIM_BD_SUBSET_ND,
        true,
        q_b.is_subset(q_n),
        json!({
            "bd": named(game, q_b),
            "nd": named(game, q_n),
            "outside_nd": named(game, &q_b.difference(q_n).copied().collect()),
        }),
    ));

    claims.push(record(
        CLAIM_STRICT_SUBSET_ND,
        hypothesis,
        q_st.is_subset(q_n),
        json!({
            "strict_selfplay": named(game, &q_st),
            "nd": named(game, q_n),
            "hypothesis": hypothesis_witness,
        }),
    ));

    claims.push(record(
        CLAIM_ND_UNIQUE_SINK,
        true,
        nd_sinks.len() == 1,
        json!({ "nd_sink_equilibria": sink_labels(game, nd_sinks) }),
    ));

    let bd_sinks = &bd.sink_equilibria.components;
    claims.push(record(
        CLAIM_BD_SINKS_AT_LEAST_THREE,
        hypothesis,
        bd_sinks.iter().all(|c| c.len() >= 3),
        json!({
            "bd_sink_equilibria": sink_labels(game, bd_sinks),
            "hypothesis": hypothesis_witness,
        }),
    ));

    claims.push(kronecker_claim(game));

    TheoremReport {
        n,
        labels: game.labels().to_vec(),
        payoff_row: game.payoff_rows(),
        claims,
    }
}

fn sink_labels(game: &SymmetricGame, components: &[Vec<usize>]) -> Vec<Vec<String>> {
    components
        .iter()
        .map(|c| c.iter().map(|&s| game.label(s).to_string()).collect())
        .collect()
}

fn kronecker_claim(game: &SymmetricGame) -> ClaimRecord {
    let n = game.n();
    if n > KRONECKER_MAX_N {
        return record(
            CLAIM_KRONECKER_IDENTITY,
            false,
            true,
            json!({ "skipped": format!("n = {n} exceeds {KRONECKER_MAX_N}") }),
        );
    }
    let a_b = response::best_response_digraph(game).adjacency_matrix();
    let direct = response::joint_strict_br_digraph(game).adjacency_matrix();
    match algebra::joint_strict_adjacency_from_formula(&a_b) {
        Ok(formula) => {
            let diff = formula.as_matrix().differing_entries(direct.as_matrix());
            let names = response::joint_names(game);
            let shown: Vec<[&str; 2]> = diff
                .iter()
                .take(16)
                .map(|&(i, j)| [names[i].as_str(), names[j].as_str()])
                .collect();
            record(
                CLAIM_KRONECKER_IDENTITY,
                true,
                diff.is_empty(),
                json!({ "differing_entries": diff.len(), "first_differences": shown }),
            )
        }
        Err(e) => record(
            CLAIM_KRONECKER_IDENTITY,
            true,
            false,
            json!({ "error": e.to_string() }),
        ),
    }
}
