//! Best-dominating (BD) and non-dominated (ND) strategy metrics.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::digraph::SinkEquilibriumSet;
use crate::game::{JointStrategy, SymmetricGame};
use crate::response::{self, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    /// Best-dominating: sinks of the best-response digraph.
    Bd,
    /// Non-dominated: the sink of the non-dominated digraph.
    Nd,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub kind: MetricKind,
    pub sink_equilibria: SinkEquilibriumSet,
    /// Union of all sink equilibria.
    pub preferred: BTreeSet<usize>,
    /// 1 for preferred strategies, 0 otherwise.
    pub metric_values: Vec<f64>,
}

impl EvaluationReport {
    fn from_sinks(kind: MetricKind, n: usize, sink_equilibria: SinkEquilibriumSet) -> Self {
        let preferred: BTreeSet<usize> = sink_equilibria.nodes().into_iter().collect();
        let metric_values = (0..n)
            .map(|s| if preferred.contains(&s) { 1.0 } else { 0.0 })
            .collect();
        EvaluationReport {
            kind,
            sink_equilibria,
            preferred,
            metric_values,
        }
    }

    /// Every preferred strategy scores strictly above every other one.
    pub fn satisfies_metric_property(&self) -> bool {
        let (mut min_in, mut max_out) = (f64::INFINITY, f64::NEG_INFINITY);
        for (s, &v) in self.metric_values.iter().enumerate() {
            if self.preferred.contains(&s) {
                min_in = min_in.min(v);
            } else {
                max_out = max_out.max(v);
            }
        }
        min_in > max_out
    }
}

pub fn evaluate_bd(game: &SymmetricGame) -> EvaluationReport {
    let sinks = response::best_response_digraph(game).sink_equilibria();
    EvaluationReport::from_sinks(MetricKind::Bd, game.n(), sinks)
}

pub fn evaluate_nd(game: &SymmetricGame) -> EvaluationReport {
    let sinks = response::non_dominated_digraph(game).sink_equilibria();
    EvaluationReport::from_sinks(MetricKind::Nd, game.n(), sinks)
}

/// Sink equilibria of the joint digraph for `variant`, as joint strategies.
pub fn joint_sink_equilibria(game: &SymmetricGame, variant: Variant) -> Vec<Vec<JointStrategy>> {
    let n = game.n();
    response::joint_digraph(game, variant)
        .sink_equilibria()
        .components
        .into_iter()
        .map(|c| c.into_iter().map(|r| JointStrategy::from_index(r, n)).collect())
        .collect()
}

/// Strategies appearing in either seat of any joint sink equilibrium.
pub fn joint_preferred_strategies(game: &SymmetricGame, variant: Variant) -> BTreeSet<usize> {
    strategies_in(&joint_sink_equilibria(game, variant))
}

pub fn strategies_in(components: &[Vec<JointStrategy>]) -> BTreeSet<usize> {
    components
        .iter()
        .flatten()
        .flat_map(|j| [j.row, j.col])
        .collect()
}
