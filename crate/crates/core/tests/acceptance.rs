//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runtime bounds are part of each criterion.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use sinkrank::algebra::{self, Matrix};
use sinkrank::digraph::Digraph;
use sinkrank::game::{JointStrategy, SymmetricGame};
use sinkrank::io;
use sinkrank::metagame::{self, DeterministicStrategy, StochasticGame, DEFAULT_STRATEGY_CAP};
use sinkrank::metrics::{self, joint_preferred_strategies, joint_sink_equilibria};
use sinkrank::oracle::{self, GameFilter, Verdict, DEFAULT_MAX_ATTEMPTS};
use sinkrank::response::{self, Variant};
use sinkrank::selfplay::{self, SelfPlayConfig};

type Check = Result<String, String>;
type Criterion = (&'static str, &'static str, Duration, fn() -> Check);

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn load(name: &str) -> SymmetricGame {
    io::load_game(&fixture(name)).expect("fixture loads")
}

fn figure_games() -> Vec<(&'static str, SymmetricGame)> {
    ["fig2.json", "fig3.json", "fig4.json", "fig5.json"]
        .into_iter()
        .map(|f| (f, load(f)))
        .collect()
}

/// `s1`-based names to indices.
fn set(items: &[usize]) -> BTreeSet<usize> {
    items.iter().map(|&s| s - 1).collect()
}

fn partition(blocks: Vec<Vec<usize>>) -> BTreeSet<BTreeSet<usize>> {
    blocks.into_iter().map(|b| b.into_iter().collect()).collect()
}

fn joint_partition(blocks: Vec<Vec<JointStrategy>>) -> BTreeSet<BTreeSet<(usize, usize)>> {
    blocks
        .into_iter()
        .map(|b| b.into_iter().map(|j| (j.row, j.col)).collect())
        .collect()
}

/// Joint blocks from `s1`-based pairs.
fn joint_blocks(blocks: &[&[(usize, usize)]]) -> BTreeSet<BTreeSet<(usize, usize)>> {
    blocks
        .iter()
        .map(|b| b.iter().map(|&(i, j)| (i - 1, j - 1)).collect())
        .collect()
}

fn expect_eq<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, expected {want:?}"))
    }
}

fn ac1_fixture_exactness() -> Check {
    let fig2 = load("fig2.json");
    let bd = metrics::evaluate_bd(&fig2);
    expect_eq("fig2 Q_B", partition(bd.sink_equilibria.components.clone()), partition(vec![vec![0, 1]]))?;
    expect_eq(
        "fig2 Q_ST^J",
        joint_partition(joint_sink_equilibria(&fig2, Variant::Strict)),
        joint_blocks(&[&[(1, 1)], &[(1, 2)], &[(2, 1)], &[(2, 2)], &[(3, 3)]]),
    )?;
    let q_st = joint_preferred_strategies(&fig2, Variant::Strict);
    if !(bd.preferred.is_subset(&q_st) && bd.preferred != q_st) {
        return Err(format!("fig2: Q_B# {:?} not a proper subset of Q_ST^J# {:?}", bd.preferred, q_st));
    }

    let fig3 = load("fig3.json");
    expect_eq(
        "fig3 Q_B",
        partition(metrics::evaluate_bd(&fig3).sink_equilibria.components),
        partition(vec![vec![0, 1, 2]]),
    )?;
    expect_eq(
        "fig3 Q_ST^J",
        joint_partition(joint_sink_equilibria(&fig3, Variant::Strict)),
        joint_blocks(&[&[(1, 1)]]),
    )?;

    let fig4 = load("fig4.json");
    expect_eq(
        "fig4 Q_N",
        partition(metrics::evaluate_nd(&fig4).sink_equilibria.components),
        partition(vec![vec![0, 1]]),
    )?;
    expect_eq(
        "fig4 Q_WR^J",
        joint_partition(joint_sink_equilibria(&fig4, Variant::Weak)),
        joint_blocks(&[&[(1, 1)]]),
    )?;

    let fig5 = load("fig5.json");
    let edges: BTreeSet<(usize, usize)> = response::best_response_digraph(&fig5).edges().collect();
    let expected: BTreeSet<(usize, usize)> = [(1, 2), (2, 3), (3, 1), (4, 3), (5, 4), (6, 8), (7, 6), (8, 7), (9, 8)]
        .into_iter()
        .map(|(a, b)| (a - 1, b - 1))
        .collect();
    expect_eq("fig5 G_B edges", edges, expected)?;
    let q_b = metrics::evaluate_bd(&fig5).preferred;
    let q_n = metrics::evaluate_nd(&fig5).preferred;
    expect_eq("fig5 Q_B#", q_b.clone(), set(&[1, 2, 3, 6, 7, 8]))?;
    expect_eq("fig5 Q_N#", q_n.clone(), set(&[1, 2, 3, 4, 6, 7, 8]))?;
    expect_eq("fig5 Q_ST^J#", joint_preferred_strategies(&fig5, Variant::Strict), q_b)?;
    expect_eq("fig5 Q_WR^J#", joint_preferred_strategies(&fig5, Variant::Weak), q_n)?;
    Ok("all four games exact".into())
}

fn ac2_selfplay_at_scale() -> Check {
    let game = load("fig5.json");
    let config = SelfPlayConfig {
        tau_max: 300,
        memory_length: 10,
        seed: 1,
        initial: None,
    };
    let published: [(Variant, [Option<f64>; 9]); 2] = [
        (
            Variant::Strict,
            [Some(0.5490), Some(0.5487), Some(0.5489), None, None, Some(0.4504), Some(0.4504), Some(0.4504), None],
        ),
        (
            Variant::Weak,
            [Some(0.7041), Some(0.6827), Some(0.8287), Some(0.5774), None, Some(0.6368), Some(0.6421), Some(0.8040), None],
        ),
    ];
    let mut notes = Vec::new();
    for (variant, reference) in published {
        let batch = selfplay::batch_frequencies(&game, variant, &config, 10_000).map_err(|e| e.to_string())?;
        let zero: BTreeSet<usize> = match variant {
            Variant::Strict => set(&[4, 5, 9]),
            Variant::Weak => set(&[5, 9]),
        };
        for (s, &f) in batch.frequencies.iter().enumerate() {
            let ok = if zero.contains(&s) { f == 0.0 } else { f >= 0.2 };
            if !ok {
                return Err(format!("{variant}: s{} has frequency {f:.4}", s + 1));
            }
        }
        let comparison: Vec<String> = batch
            .frequencies
            .iter()
            .zip(reference)
            .enumerate()
            .map(|(s, (f, r))| match r {
                Some(r) => format!("s{}={f:.4}(ref {r:.4})", s + 1),
                None => format!("s{}={f:.4}(ref 0)", s + 1),
            })
            .collect();
        println!("      {variant}: {}", comparison.join(" "));
        notes.push(format!("{variant} ok"));
    }
    Ok(notes.join(", "))
}

fn kronecker_matches(game: &SymmetricGame) -> Result<(), String> {
    let a_b = response::best_response_digraph(game).adjacency_matrix();
    let direct = response::joint_strict_br_digraph(game).adjacency_matrix();
    let formula = algebra::joint_strict_adjacency_from_formula(&a_b).map_err(|e| e.to_string())?;
    let diff = formula.as_matrix().differing_entries(direct.as_matrix());
    if diff.is_empty() {
        Ok(())
    } else {
        Err(format!(
            "{} differing entries on {}",
            diff.len(),
            io::game_to_json_line(game)
        ))
    }
}

fn ac3_kronecker_identity() -> Check {
    for (name, g) in figure_games() {
        kronecker_matches(&g).map_err(|e| format!("{name}: {e}"))?;
    }
    (0..1000u64).into_par_iter().try_for_each(|i| {
        let n = 2 + (i % 7) as usize;
        // Narrow ranges force best-response ties.
        let high = if i % 2 == 0 { 2 } else { 9 };
        let g = oracle::random_game(n, 0, high, GameFilter::default(), 3_000 + i, 1).map_err(|e| e.to_string())?;
        kronecker_matches(&g)
    })?;

    let fig2 = load("fig2.json");
    let a_b = response::best_response_digraph(&fig2).adjacency_matrix().into_matrix();
    let cartesian = algebra::cartesian_product_adjacency(&a_b, &a_b).map_err(|e| e.to_string())?;
    let a_st: Matrix = response::joint_strict_br_digraph(&fig2).adjacency_matrix().into_matrix();
    let differing = cartesian.differing_entries(&a_st).len();
    if differing == 0 {
        return Err("Cartesian product coincides with A_ST^J on fig2".into());
    }
    Ok(format!("4 fixtures + 1000 random games; fig2 Cartesian differs in {differing} entries"))
}

fn ac4_theorem_suite() -> Check {
    let unconditional = [
        oracle::CLAIM_BD_SUBSET_ND,
        oracle::CLAIM_WEAK_SUBSET_ND,
        oracle::CLAIM_ND_UNIQUE_SINK,
        oracle::CLAIM_ND_EQUALS_WEAK_SINGLETON,
        oracle::CLAIM_KRONECKER_IDENTITY,
    ];
    let singleton_cases: usize = (0..1000u64)
        .into_par_iter()
        .map(|i| {
            let n = 2 + (i % 6) as usize;
            let g = oracle::random_game(n, 0, 9, GameFilter::default(), 10_000 + i, 1).map_err(|e| e.to_string())?;
            let report = oracle::check_theorems(&g);
            for id in unconditional {
                if report.claim(id).map(|c| c.verdict) == Some(Verdict::Violated) {
                    return Err(format!("{id} violated: {}", serde_json::to_string(&report).unwrap()));
                }
            }
            let applied = report.claim(oracle::CLAIM_ND_EQUALS_WEAK_SINGLETON).unwrap().applicable;
            Ok(usize::from(applied))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;

    let filter = GameFilter {
        no_self_best_response: true,
        no_mutual_best_response_pairs: true,
        generic_best_responses: false,
    };
    let gated = [
        oracle::CLAIM_BD_EQUALS_STRICT,
        oracle::CLAIM_STRICT_SUBSET_ND,
        oracle::CLAIM_BD_SINKS_AT_LEAST_THREE,
    ];
    (0..500u64).into_par_iter().try_for_each(|i| {
        let n = 3 + (i % 5) as usize;
        let g = oracle::random_game(n, 0, 9, filter, 20_000 + i, DEFAULT_MAX_ATTEMPTS).map_err(|e| e.to_string())?;
        let report = oracle::check_theorems(&g);
        for id in gated {
            if report.claim(id).map(|c| c.verdict) != Some(Verdict::Holds) {
                return Err(format!("{id} not holding: {}", serde_json::to_string(&report).unwrap()));
            }
        }
        Ok(())
    })?;
    Ok(format!(
        "1000 unfiltered ({singleton_cases} with singleton ND sink) + 500 filtered, zero violations"
    ))
}

fn ac5_scc_oracle() -> Check {
    for seed in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(0..=12usize);
        let density: f64 = rng.gen_range(0.0..0.5);
        let edges: Vec<(usize, usize)> = (0..n * n)
            .filter(|_| rng.gen_bool(density))
            .map(|r| (r / n, r % n))
            .collect();
        let g = Digraph::from_edges(n, edges).map_err(|e| e.to_string())?;
        let brute = oracle::brute_force_scc(&g).map_err(|e| e.to_string())?;
        if partition(brute) != partition(g.scc_decompose().components) {
            return Err(format!("seed {seed}: partitions differ"));
        }
    }
    Ok("1000 digraphs".into())
}

fn trace_invariants(game: &SymmetricGame, seed: u64) -> Result<(), String> {
    let n = game.n();
    for variant in [Variant::Strict, Variant::Weak] {
        let graph = response::joint_digraph(game, variant);
        let sinks = graph.sink_equilibria();
        let config = SelfPlayConfig {
            tau_max: 300,
            memory_length: 10,
            seed,
            initial: None,
        };
        let trace = selfplay::run_self_play(game, variant, &config).map_err(|e| e.to_string())?;
        let mut absorbed: Option<usize> = None;
        for (t, ep) in trace.episodes.iter().enumerate() {
            let (u, v) = (ep.pre.index(n), ep.post.index(n));
            if u != v && !graph.has_edge(u, v) {
                return Err(format!("{variant} episode {t}: {u} -> {v} is not an edge"));
            }
            if let Some(c) = absorbed.or_else(|| sinks.component_containing(u)) {
                if sinks.component_containing(v) != Some(c) {
                    return Err(format!("{variant} episode {t}: left sink equilibrium {c}"));
                }
                absorbed = Some(c);
            }
        }
    }
    Ok(())
}

fn ac6_trace_invariants() -> Check {
    for (name, g) in figure_games() {
        for seed in 0..20 {
            trace_invariants(&g, seed).map_err(|e| format!("{name}: {e}"))?;
        }
    }
    (0..100u64).into_par_iter().try_for_each(|i| {
        let n = 2 + (i % 7) as usize;
        let high = if i % 2 == 0 { 3 } else { 9 };
        let g = oracle::random_game(n, 0, high, GameFilter::default(), 40_000 + i, 1).map_err(|e| e.to_string())?;
        trace_invariants(&g, i).map_err(|e| format!("{e} on {}", io::game_to_json_line(&g)))
    })?;
    Ok("4 fixtures x 20 seeds + 100 random games, both variants".into())
}

/// `sum_{t<100} beta^t E[r_t]` by propagating the state distribution.
fn truncated_value(sg: &StochasticGame, s1: &DeterministicStrategy, s2: &DeterministicStrategy, player: u8) -> f64 {
    let (b1, b2) = sg.discounts();
    let beta = if player == 1 { b1 } else { b2 };
    let k = sg.states().len();
    let mut dist = sg.initial_dist().to_vec();
    let (mut total, mut weight) = (0.0, 1.0);
    for _ in 0..100 {
        let mut next = vec![0.0; k];
        for x in 0..k {
            let (a1, a2) = (s1.0[x], s2.0[x]);
            total += weight * dist[x] * sg.reward(player, x, a1, a2);
            for (y, p) in sg.transition(x, a1, a2).iter().enumerate() {
                next[y] += dist[x] * p;
            }
        }
        dist = next;
        weight *= beta;
    }
    total
}

fn ac7_metagame() -> Check {
    for (name, g) in figure_games() {
        let rows = g.payoff_rows();
        for beta in [0.5, 0.9] {
            let sg = StochasticGame::from_matrix_game(&rows, beta).map_err(|e| e.to_string())?;
            let meta = metagame::build_meta_game(&sg, DEFAULT_STRATEGY_CAP).map_err(|e| e.to_string())?;
            for (i, row) in rows.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    let err = (meta.value(i, j) - v / (1.0 - beta)).abs();
                    if err > 1e-9 {
                        return Err(format!("{name} beta={beta}: entry ({i},{j}) off by {err:e}"));
                    }
                }
            }
        }
    }
    let file_game = io::load_game(&fixture("fig2.json")).unwrap();
    let one_state = io::load_stochastic_game(&fixture("stoch_one_state.json")).map_err(|e| e.to_string())?;
    let meta = metagame::build_meta_game(&one_state, DEFAULT_STRATEGY_CAP).map_err(|e| e.to_string())?;
    for i in 0..3 {
        for j in 0..3 {
            if (meta.value(i, j) - file_game.value(i, j) / 0.5).abs() > 1e-9 {
                return Err("one-state fixture file does not scale by 1/(1-beta)".into());
            }
        }
    }

    let sg = io::load_stochastic_game(&fixture("stoch_two_state.json")).map_err(|e| e.to_string())?;
    let strategies = metagame::enumerate_strategies(&sg, DEFAULT_STRATEGY_CAP).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for a in &strategies {
        for b in &strategies {
            let (j1, j2) = metagame::evaluate_joint(&sg, a, b).map_err(|e| e.to_string())?;
            worst = worst
                .max((j1 - truncated_value(&sg, a, b, 1)).abs())
                .max((j2 - truncated_value(&sg, a, b, 2)).abs());
        }
    }
    if worst > 1e-8 {
        return Err(format!("2-state fixture deviates from truncated sum by {worst:e}"));
    }

    let asym = io::load_stochastic_game(&fixture("stoch_asymmetric.json")).map_err(|e| e.to_string())?;
    match metagame::build_meta_game(&asym, DEFAULT_STRATEGY_CAP) {
        Err(metagame::MetagameError::AsymmetryDetected { .. }) => {}
        other => return Err(format!("asymmetric fixture not rejected: {other:?}")),
    }
    Ok(format!("embedding within 1e-9, 2-state max deviation {worst:.1e}, asymmetry rejected"))
}

fn ac8_determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_sinkrank"))
            .args(["selfplay", &fixture("fig5.json"), "--seed", "42", "--runs", "2000", "--csv"])
            .arg(&path)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(format!("selfplay exited with {:?}", status.status.code()));
        }
        outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    if outputs[0] != outputs[1] {
        return Err("CSV outputs differ".into());
    }
    Ok(format!("{} identical bytes", outputs[0].len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("AC1", "fixture exactness", Duration::from_secs(1), ac1_fixture_exactness),
        ("AC2", "self-play at full scale", Duration::from_secs(30), ac2_selfplay_at_scale),
        ("AC3", "Kronecker identity", Duration::from_secs(10), ac3_kronecker_identity),
        ("AC4", "theorem property suite", Duration::from_secs(60), ac4_theorem_suite),
        ("AC5", "SCC oracle equivalence", Duration::from_secs(60), ac5_scc_oracle),
        ("AC6", "self-play trace invariants", Duration::from_secs(60), ac6_trace_invariants),
        ("AC7", "metagame correctness", Duration::from_secs(60), ac7_metagame),
        ("AC8", "selfplay CSV determinism", Duration::from_secs(60), ac8_determinism),
    ];
    let mut failures = 0;
    for (id, title, bound, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > bound => Err(format!("{detail}; took {elapsed:.2?}, bound {bound:?}")),
            other => other,
        };
        match result {
            Ok(detail) => println!("PASS {id} {title} ({elapsed:.2?}): {detail}"),
            Err(reason) => {
                failures += 1;
                println!("FAIL {id} {title} ({elapsed:.2?}): {reason}");
            }
        }
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
