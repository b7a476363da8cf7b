//! Acceptance gate: runs each criterion at its stated scale and tolerance,
//! prints one PASS/FAIL line per criterion and exits non-zero on failure.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use nectar_core::adversary::{Strategy, StrategyKind};
use nectar_core::graph::{
    byz_partitionable_oracle, gen_bridge_attack, gen_drone, gen_topology, generalized_wheel, gnp_connected, star,
    vertex_connectivity, DroneParams, Graph, NodeId, NodeSet, TopologyKind,
};
use nectar_core::harness::{run_scenario, simulate, Placement, RepSummary, ScenarioConfig, SimOptions, TopologySpec};
use nectar_core::nectar::check_message_bound;
use nectar_core::simnet::Transcript;
use nectar_core::{Protocol, Verdict};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{brute_force_kappa, components_without, correct_partitioned, random_graph};

const NECTAR_KINDS: [StrategyKind; 6] = [
    StrategyKind::Silent,
    StrategyKind::CorrectFacade,
    StrategyKind::OneSided,
    StrategyKind::WithholdOwnEdges,
    StrategyKind::FakeByzEdges,
    StrategyKind::StaleChainInject,
];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

/// Counters shared by criteria that aggregate over other criteria's runs.
#[derive(Default)]
struct Tally {
    agreement_runs: usize,
    agreement_failures: Vec<String>,
    bound_runs: usize,
    bound_failures: Vec<String>,
}

impl Tally {
    fn nectar(&mut self, label: &str, tr: &Transcript) {
        self.agreement_runs += 1;
        if tr.agreed_verdict().is_none() {
            self.agreement_failures.push(label.to_string());
        }
        self.bound(label, tr);
    }

    fn bound(&mut self, label: &str, tr: &Transcript) {
        self.bound_runs += 1;
        if !check_message_bound(tr).ok() {
            self.bound_failures.push(label.to_string());
        }
    }

    fn reps(&mut self, label: &str, reps: &[RepSummary]) {
        for r in reps {
            self.agreement_runs += 1;
            if !r.agreement {
                self.agreement_failures.push(format!("{label} seed {}", r.seed));
            }
            self.bound_runs += 1;
            if r.bound_violations > 0 {
                self.bound_failures.push(format!("{label} seed {}", r.seed));
            }
        }
    }
}

fn nectar_run(g: &Graph, byz: &BTreeMap<NodeId, Strategy>, t: usize, seed: u64) -> Transcript {
    simulate(Protocol::Nectar, g, byz, t, seed, &SimOptions::default()).expect("simulation runs")
}

fn correct_verdicts(tr: &Transcript) -> impl Iterator<Item = Option<Verdict>> + '_ {
    tr.correct_nodes().map(|v| tr.decisions[v].map(|d| d.verdict))
}

/// True iff some subset of `byz` separates the remaining nodes (test-side).
fn some_byz_subset_cuts(g: &Graph, byz: &[NodeId]) -> bool {
    (1u32..1 << byz.len()).any(|mask| {
        let mut removed = vec![false; g.n()];
        for (i, &b) in byz.iter().enumerate() {
            if mask >> i & 1 == 1 {
                removed[b] = true;
            }
        }
        components_without(g, &removed) >= 2
    })
}

/// Confirmed outputs only where the Byzantine nodes really cut the graph.
fn validity_holds(g: &Graph, byz: &[NodeId], tr: &Transcript) -> bool {
    let confirmed = tr.correct_nodes().any(|v| tr.decisions[v].is_some_and(|d| d.confirmed));
    !confirmed || some_byz_subset_cuts(g, byz)
}

fn strategy_for<R: Rng>(kind: StrategyKind, g: &Graph, node: NodeId, byz: &NodeSet, rng: &mut R) -> Strategy {
    match kind {
        StrategyKind::OneSided => {
            let mut nbrs: Vec<NodeId> = g.neighbors(node).iter().copied().filter(|&w| !byz.contains(w)).collect();
            nbrs.shuffle(rng);
            let half = nbrs.len().div_ceil(2);
            Strategy::OneSided { favored: Some(nbrs[..half].iter().copied().collect()) }
        }
        other => Strategy::default_for(other),
    }
}

fn c1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut cases, mut complete_cases, mut other) = (0, 0, 0);
    for _ in 0..600 {
        let n = rng.gen_range(4..=8);
        let p = rng.gen_range(0.2..0.95);
        let g = random_graph(&mut rng, n, p);
        let kappa = vertex_connectivity(&g);
        for t in 0..=3 {
            cases += 1;
            if byz_partitionable_oracle(&g, t).unwrap() != (kappa <= t) {
                // K_n has no vertex cut at all, yet κ(K_n) = n - 1.
                if g.edges().count() == n * (n - 1) / 2 {
                    complete_cases += 1;
                } else {
                    other += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome::new(
        complete_cases + other == 0 && secs < 30.0,
        format!(
            "600 graphs, {cases} (graph, t) cases, mismatches: {complete_cases} on complete graphs with t >= n - 1, \
             {other} elsewhere; {secs:.2}s"
        ),
    )
}

fn c2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut mismatches = Vec::new();
    for i in 0..250 {
        let n = rng.gen_range(1..=8);
        let p = rng.gen_range(0.1..1.0);
        let g = random_graph(&mut rng, n, p);
        let (flow, brute) = (vertex_connectivity(&g), brute_force_kappa(&g));
        if flow != brute {
            mismatches.push(format!("graph {i}: max-flow {flow}, brute force {brute}"));
        }
    }
    Outcome::new(mismatches.is_empty(), format!("250 graphs, {} mismatches {:?}", mismatches.len(), mismatches.first()))
}

/// A graph on at most 20 nodes with κ ≥ 2t.
fn sensitive_graph<R: Rng>(t: usize, i: usize, rng: &mut R) -> Graph {
    loop {
        let seed = rng.gen();
        let g = match i % 3 {
            0 => {
                let k = 2 * t + rng.gen_range(0..=1);
                let n = rng.gen_range(k + 3..=20);
                let n = if n * k % 2 == 1 { n - 1 } else { n };
                gen_topology(TopologyKind::KRegular, n, k, seed)
            }
            1 => gen_topology(TopologyKind::GeneralizedWheel, rng.gen_range(2 * t + 3..=20), 2 * t + 1, seed),
            _ => generalized_wheel(rng.gen_range(2 * t + 3..=16), 2 * t),
        };
        if let Ok(g) = g {
            if vertex_connectivity(&g) >= 2 * t {
                return g;
            }
        }
    }
}

fn c3(tally: &mut Tally) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut runs, mut bad) = (0, Vec::new());
    for t in [1, 2] {
        for kind in NECTAR_KINDS {
            for i in 0..9 {
                let g = sensitive_graph(t, i, &mut rng);
                let byz: NodeSet = rand::seq::index::sample(&mut rng, g.n(), t).into_iter().collect();
                let strategies: BTreeMap<NodeId, Strategy> =
                    byz.iter().map(|b| (b, strategy_for(kind, &g, b, &byz, &mut rng))).collect();
                let tr = nectar_run(&g, &strategies, t, rng.gen());
                let label = format!("t={t} {kind:?} #{i}");
                runs += 1;
                if !correct_verdicts(&tr).all(|v| v == Some(Verdict::NotPartitionable)) {
                    bad.push(label.clone());
                }
                let byz_list: Vec<NodeId> = byz.iter().collect();
                if !validity_holds(&g, &byz_list, &tr) {
                    bad.push(format!("{label} (validity)"));
                }
                tally.nectar(&label, &tr);
            }
        }
    }
    Outcome::new(bad.is_empty(), format!("{runs} runs over {} strategies, failures {:?}", NECTAR_KINDS.len(), bad))
}

fn c5(tally: &mut Tally) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut runs, mut not_part, mut invalid, mut confirmed_runs) = (0, 0, Vec::new(), 0);
    let mut scenarios: Vec<(String, Graph, NodeSet)> = Vec::new();
    for i in 0..90 {
        let (n1, n2, b) = (rng.gen_range(1..=8), rng.gen_range(1..=8), rng.gen_range(1..=3));
        let density = [0.3, 0.5, 0.8][i % 3];
        let (g, byz) = gen_bridge_attack(n1, n2, b, density, rng.gen()).expect("bridge graph");
        scenarios.push((format!("bridge({n1},{n2},{b},{density}) #{i}"), g, byz));
    }
    for i in 0..30 {
        let n = rng.gen_range(3..=12);
        scenarios.push((format!("star({n}) #{i}"), star(n), NodeSet::from([0])));
    }
    for (i, (label, g, byz)) in scenarios.iter().enumerate() {
        let byz_list: Vec<NodeId> = byz.iter().collect();
        assert!(correct_partitioned(g, &byz_list), "{label}: Byzantine set is not a cut");
        let kind = NECTAR_KINDS[i % NECTAR_KINDS.len()];
        let strategies: BTreeMap<NodeId, Strategy> =
            byz.iter().map(|b| (b, strategy_for(kind, g, b, byz, &mut rng))).collect();
        let tr = nectar_run(g, &strategies, byz.len(), rng.gen());
        runs += 1;
        not_part += correct_verdicts(&tr).filter(|v| *v == Some(Verdict::NotPartitionable)).count();
        let confirmed = tr.correct_nodes().any(|v| tr.decisions[v].is_some_and(|d| d.confirmed));
        if confirmed {
            confirmed_runs += 1;
            if !correct_partitioned(g, &byz_list) {
                invalid.push(label.clone());
            }
        }
        tally.nectar(&format!("{label} {kind:?}"), &tr);
    }
    Outcome::new(
        not_part == 0 && invalid.is_empty(),
        format!(
            "{runs} cut scenarios, {not_part} NOT_PARTITIONABLE outputs, {confirmed_runs} runs with confirmed outputs, {} invalid",
            invalid.len()
        ),
    )
}

fn c6(tally: &mut Tally) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut differing, mut injected) = (Vec::new(), 0);
    for pair in 0..50 {
        let n = [10, 12, 14][pair % 3];
        let g = gen_topology(TopologyKind::KRegular, n, 4, rng.gen()).unwrap();
        let byz: Vec<NodeId> = rand::seq::index::sample(&mut rng, n, 2).into_iter().collect();
        let seed = rng.gen();
        let with = |s: Strategy| byz.iter().map(|&b| (b, s.clone())).collect::<BTreeMap<_, _>>();
        let a = nectar_run(&g, &with(Strategy::StaleChainInject), 2, seed);
        let b = nectar_run(&g, &with(Strategy::CorrectFacade), 2, seed);
        if byz.iter().any(|&v| a.bytes_sent[v] > b.bytes_sent[v]) {
            injected += 1;
        }
        if a.correct_nodes().any(|v| a.discovered[v] != b.discovered[v]) {
            differing.push(pair);
        }
        tally.nectar(&format!("stale pair {pair}"), &a);
        tally.nectar(&format!("clean pair {pair}"), &b);
    }
    Outcome::new(
        differing.is_empty() && injected == 50,
        format!(
            "50 seeded pairs, {injected} with injected traffic, {} with differing discovered matrices",
            differing.len()
        ),
    )
}

fn bridge_config(protocol: Protocol, byz: usize) -> ScenarioConfig {
    let correct = 35 - byz;
    let (n1, n2) = (correct.div_ceil(2), correct / 2);
    // Filter poisoning runs on a partitioned graph with the Byzantine nodes
    // spread over both sides; the signed protocols face the bridge.
    let topology = match protocol {
        Protocol::Mtg => TopologySpec::SplitSides { n1, n2, byz, density: 0.3 },
        _ => TopologySpec::Bridge { n1, n2, byz, density: 0.3 },
    };
    let mut cfg = ScenarioConfig::new(protocol, topology);
    cfg.id = format!("bridge-{protocol}-{byz}");
    cfg.byzantine = Placement::Construction;
    cfg.t = if protocol == Protocol::Nectar { byz } else { 0 };
    cfg.strategy = match protocol {
        Protocol::Mtg => Strategy::AllOnesFilter,
        _ => Strategy::OneSided { favored: None },
    };
    cfg.seed = 7000 + 100 * byz as u64;
    cfg
}

fn c7(tally: &mut Tally) -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for byz in 1..=4 {
        let mut rates = BTreeMap::new();
        for protocol in Protocol::ALL {
            let res = run_scenario(&bridge_config(protocol, byz)).expect("bridge scenario runs");
            let per_run: Vec<f64> =
                res.reps.iter().map(|r| r.success_rate.expect("expected verdict is defined")).collect();
            let mean = res.aggregate.mean_success.unwrap();
            let pass = match protocol {
                Protocol::Nectar => per_run.iter().all(|&s| s == 1.0),
                Protocol::Mtg => byz < 2 || per_run.iter().all(|&s| s == 0.0),
                Protocol::Mtgv2 => (0.2..=0.8).contains(&mean) && per_run.iter().all(|&s| s > 0.0 && s < 1.0),
            };
            ok &= pass;
            if protocol == Protocol::Nectar {
                tally.reps(&format!("bridge n=35 byz={byz}"), &res.reps);
            }
            rates.insert(protocol.to_string(), format!("{mean:.3}{}", if pass { "" } else { "!" }));
        }
        parts.push(format!("b={byz} {rates:?}"));
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 300.0;
    Outcome::new(ok, format!("success rates {} ({secs:.1}s)", parts.join("; ")))
}

fn c8(tally: &mut Tally) -> Outcome {
    let start = Instant::now();
    let ns = [20, 40, 60, 80, 100];
    let ks = [4, 10, 20, 34];
    let mut bytes: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut broadcast: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for &k in &ks {
        for &n in &ns {
            if k >= n {
                continue;
            }
            let mut cfg = ScenarioConfig::new(Protocol::Nectar, TopologySpec::KRegular { n, k });
            cfg.id = format!("kreg-{n}-{k}");
            cfg.seed = 8000 + (n * 100 + k) as u64;
            let res = run_scenario(&cfg).expect("k-regular scenario runs");
            tally.reps(&cfg.id, &res.reps);
            bytes.insert((n, k), res.aggregate.mean_bytes);
            broadcast.insert((n, k), res.aggregate.mean_broadcast_bytes);
        }
    }
    let increasing = |a: &[f64]| a.windows(2).all(|w| w[1] > w[0]);
    let in_n =
        ks.iter().all(|&k| increasing(&ns.iter().filter_map(|&n| bytes.get(&(n, k)).copied()).collect::<Vec<_>>()));
    let in_k =
        ns.iter().all(|&n| increasing(&ks.iter().filter_map(|&k| bytes.get(&(n, k)).copied()).collect::<Vec<_>>()));
    let top = bytes[&(100, 34)] / 1000.0;
    let magnitude = (250.0..=1000.0).contains(&top);

    // Ordinal comparison with the baselines at the two ends of the grid.
    let mut ordinal = true;
    let mut ord_detail = Vec::new();
    for (n, k) in [(20, 4), (100, 34)] {
        let mut means = BTreeMap::new();
        for protocol in [Protocol::Mtg, Protocol::Mtgv2] {
            let mut cfg = ScenarioConfig::new(protocol, TopologySpec::KRegular { n, k });
            cfg.repetitions = 10;
            cfg.seed = 8500;
            means.insert(protocol, run_scenario(&cfg).expect("baseline runs").aggregate.mean_bytes);
        }
        let nectar = bytes[&(n, k)];
        ordinal &= nectar > 2.0 * means[&Protocol::Mtgv2] && means[&Protocol::Mtgv2] > means[&Protocol::Mtg];
        ord_detail.push(format!(
            "({n},{k}) NECTAR {:.1} KB, MTGV2 {:.1} KB, MTG {:.1} KB",
            nectar / 1000.0,
            means[&Protocol::Mtgv2] / 1000.0,
            means[&Protocol::Mtg] / 1000.0
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome::new(
        in_n && in_k && magnitude && ordinal && secs < 600.0,
        format!(
            "increasing in n: {in_n}, in k: {in_k}; (100,34) mean {top:.1} KB per node (window 250-1000 KB, \
             counting each emission once: {:.1} KB); ordinal {ordinal}: {}; {secs:.1}s",
            broadcast[&(100, 34)] / 1000.0,
            ord_detail.join(", ")
        ),
    )
}

fn c10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut graphs: Vec<(Graph, Verdict)> = Vec::new();
    while graphs.len() < 50 {
        let i = graphs.len();
        let g = match i % 3 {
            0 => gnp_connected(rng.gen_range(2..=25), 0.3, &mut rng).unwrap(),
            1 => gen_topology(TopologyKind::KRegular, 20, 4, rng.gen()).unwrap(),
            _ => gen_drone(&DroneParams { n: 20, d: 0.0, radius: 2.4, seed: rng.gen() }).unwrap(),
        };
        graphs.push((g, Verdict::NotPartitionable));
    }
    while graphs.len() < 100 {
        let g = if graphs.len().is_multiple_of(2) {
            gen_drone(&DroneParams { n: 20, d: 6.0, radius: 1.2, seed: rng.gen() }).unwrap()
        } else {
            let (a, b) = (rng.gen_range(1..=10), rng.gen_range(1..=10));
            let left = gnp_connected(a, 0.5, &mut rng).unwrap();
            let right = gnp_connected(b, 0.5, &mut rng).unwrap();
            let edges = left.edges().chain(right.edges().map(|(u, v)| (u + a, v + a)));
            Graph::from_edges(a + b, edges.collect::<Vec<_>>()).unwrap()
        };
        assert!(components_without(&g, &vec![false; g.n()]) >= 2);
        graphs.push((g, Verdict::Partitionable));
    }
    let mut wrong = Vec::new();
    for (i, (g, expected)) in graphs.iter().enumerate() {
        for protocol in [Protocol::Mtg, Protocol::Mtgv2] {
            let tr = simulate(protocol, g, &BTreeMap::new(), 0, i as u64, &SimOptions::default()).unwrap();
            if !tr.decisions.iter().all(|d| d.map(|d| d.verdict) == Some(*expected)) {
                wrong.push(format!("{protocol} graph {i}"));
            }
        }
    }
    Outcome::new(wrong.is_empty(), format!("50 connected + 50 partitioned graphs, both baselines, wrong: {wrong:?}"))
}

fn main() {
    let start = Instant::now();
    let mut tally = Tally::default();
    let mut results: Vec<(usize, &str, Outcome, Duration)> = Vec::new();
    let mut timed = |id, name, f: &mut dyn FnMut() -> Outcome| {
        let t0 = Instant::now();
        let o = f();
        results.push((id, name, o, t0.elapsed()));
    };
    timed(1, "subset oracle vs connectivity", &mut c1);
    timed(2, "connectivity oracle", &mut c2);
    timed(3, "sensitivity at connectivity 2t", &mut || c3(&mut tally));
    timed(5, "safety and validity", &mut || c5(&mut tally));
    timed(6, "stale-chain rejection", &mut || c6(&mut tally));
    timed(7, "bridge attack success rates", &mut || c7(&mut tally));
    timed(8, "data sent on k-regular graphs", &mut || c8(&mut tally));
    timed(10, "baseline sanity", &mut c10);
    let agreement = Outcome::new(
        tally.agreement_failures.is_empty(),
        format!("{} NECTAR runs, disagreements {:?}", tally.agreement_runs, tally.agreement_failures),
    );
    results.push((4, "agreement", agreement, Duration::ZERO));
    let bound = Outcome::new(
        tally.bound_failures.is_empty(),
        format!("{} NECTAR transcripts, violations {:?}", tally.bound_runs, tally.bound_failures),
    );
    results.push((9, "message complexity bound", bound, Duration::ZERO));
    results.sort_by_key(|r| r.0);

    let mut failed = 0;
    for (id, name, o, took) in &results {
        failed += usize::from(!o.pass);
        println!(
            "[{}] criterion {id:>2} {name}: {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed ({:.1}s)", results.len() - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
