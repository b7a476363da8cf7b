use std::collections::BTreeMap;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::adversary::{make_adversary, AdversaryContext, AnyNode, Coordinator, Strategy};
use crate::baselines::{BloomParams, MtgState, Mtgv2State};
use crate::crypto::{keygen_all, ChainedMessage, KeyDirectory, SchemeKind, DEFAULT_SIG_LEN};
use crate::decision::{expected_verdict, Protocol, Verdict};
use crate::graph::{Graph, NodeId, NodeSet};
use crate::nectar::{check_message_bound, provision_proofs, NectarConfig, NectarState};
use crate::simnet::{measure, run, RunSpec, SimNode, Transcript};
use crate::stats::Summary;

use super::{HarnessError, Placement, RawRow, ScenarioConfig};

/// Environment variable holding the number of worker threads.
pub const WORKERS_ENV: &str = "NECTAR_WORKERS";

/// Worker threads for repetitions, from [`WORKERS_ENV`] (0 or unset: one per core).
pub fn worker_count() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()))
}

fn with_workers<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    match rayon::ThreadPoolBuilder::new().num_threads(worker_count()).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SimOptions {
    pub sig_len: usize,
    pub scheme: SchemeKind,
    /// Bloom parameters; the hash key is replaced by the run seed.
    pub bloom: BloomParams,
    pub epoch_len: Option<usize>,
    pub trace: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            sig_len: DEFAULT_SIG_LEN,
            scheme: SchemeKind::Tag,
            bloom: BloomParams::default(),
            epoch_len: None,
            trace: false,
        }
    }
}

/// One run of `protocol` on `g`. Nodes listed in `byzantine` follow their
/// strategy, all others are correct.
pub fn simulate(
    protocol: Protocol,
    g: &Graph,
    byzantine: &BTreeMap<NodeId, Strategy>,
    t: usize,
    seed: u64,
    opts: &SimOptions,
) -> Result<Transcript, HarnessError> {
    let n = g.n();
    let keys = keygen_all(n, seed, opts.scheme);
    let dir = Arc::new(KeyDirectory::from_pairs(&keys));
    let byz_set: NodeSet = byzantine.keys().copied().collect();
    let coord = Arc::new(Coordinator::new(&keys, &byz_set));
    let proofs = if protocol == Protocol::Nectar { provision_proofs(g, &keys) } else { vec![BTreeMap::new(); n] };
    let bloom = BloomParams { key: seed, ..opts.bloom };
    let rounds = match protocol {
        Protocol::Nectar => n.saturating_sub(1),
        _ => opts.epoch_len.unwrap_or(n.saturating_sub(1)),
    };
    let mut adversaries = BTreeMap::new();
    for (&v, strategy) in byzantine {
        if v >= n {
            return Err(
                super::ConfigError { path: "byzantine".into(), msg: format!("node {v} is outside 0..{n}") }.into()
            );
        }
        let ctx = AdversaryContext {
            graph: g,
            byzantine: &byz_set,
            t,
            dir: Arc::clone(&dir),
            coord: Arc::clone(&coord),
            proofs: &proofs[v],
            bloom,
            epoch_len: Some(rounds),
        };
        let node = make_adversary(protocol, strategy, keys[v].clone(), &ctx)
            .map_err(|source| HarnessError::Adversary { node: v, source })?;
        adversaries.insert(v, node);
    }
    let spec = RunSpec::new(rounds, seed).t(t).sig_len(opts.sig_len).trace(opts.trace);
    let tr = match protocol {
        Protocol::Nectar => {
            let mut nodes: Vec<Box<dyn SimNode<ChainedMessage>>> = Vec::with_capacity(n);
            for v in 0..n {
                nodes.push(match adversaries.remove(&v) {
                    Some(AnyNode::Nectar(b)) => b,
                    Some(_) => unreachable!("adversary built for the requested protocol"),
                    None => Box::new(
                        NectarState::init(NectarConfig { n, t, id: v }, keys[v].clone(), Arc::clone(&dir), &proofs[v])
                            .expect("provisioned state is consistent"),
                    ),
                });
            }
            run(g, &mut nodes, spec)?
        }
        Protocol::Mtg => {
            let mut nodes: Vec<Box<dyn SimNode<_>>> = Vec::with_capacity(n);
            for v in 0..n {
                nodes.push(match adversaries.remove(&v) {
                    Some(AnyNode::Mtg(b)) => b,
                    Some(_) => unreachable!("adversary built for the requested protocol"),
                    None => Box::new(MtgState::new(v, n, g.neighbors(v), bloom, Some(rounds))),
                });
            }
            run(g, &mut nodes, spec)?
        }
        Protocol::Mtgv2 => {
            let mut nodes: Vec<Box<dyn SimNode<_>>> = Vec::with_capacity(n);
            for (v, key) in keys.iter().enumerate() {
                nodes.push(match adversaries.remove(&v) {
                    Some(AnyNode::Mtgv2(b)) => b,
                    Some(_) => unreachable!("adversary built for the requested protocol"),
                    None => Box::new(Mtgv2State::new(key, n, g.neighbors(v), Arc::clone(&dir), Some(rounds))),
                });
            }
            run(g, &mut nodes, spec)?
        }
    };
    Ok(tr)
}

/// Byzantine set of one repetition.
pub fn place_byzantine(
    placement: &Placement,
    g: &Graph,
    constructed: Option<NodeSet>,
    seed: u64,
) -> Result<NodeSet, HarnessError> {
    let bad = |msg: String| HarnessError::Config(super::ConfigError { path: "byzantine".into(), msg });
    match placement {
        Placement::None => Ok(NodeSet::new()),
        Placement::Explicit { nodes } if nodes.is_within(g.n()) => Ok(nodes.clone()),
        Placement::Explicit { .. } => Err(bad(format!("placement exceeds the {} graph nodes", g.n()))),
        Placement::Random { count } if *count < g.n() => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
            Ok(rand::seq::index::sample(&mut rng, g.n(), *count).into_iter().collect())
        }
        Placement::Random { count } => {
            Err(bad(format!("{count} Byzantine nodes leave no correct node among {}", g.n())))
        }
        Placement::Construction => constructed.ok_or_else(|| bad("topology has no construction placement".into())),
    }
}

/// Per-repetition summary, over correct nodes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RepSummary {
    pub seed: u64,
    pub fingerprint: String,
    pub n: usize,
    pub edges: usize,
    pub byzantine: NodeSet,
    pub expected: Option<Verdict>,
    pub mean_bytes: f64,
    pub max_bytes: u64,
    pub mean_broadcast_bytes: f64,
    pub total_messages: u64,
    pub success_rate: Option<f64>,
    /// All correct nodes output the same verdict.
    pub agreement: bool,
    pub confirmed: usize,
    /// Correct nodes over the message bound (NECTAR only).
    pub bound_violations: usize,
}

/// Runs repetition `index` of `cfg`, with seed `cfg.seed + index`.
pub fn run_repetition(cfg: &ScenarioConfig, index: usize) -> Result<(RepSummary, Vec<RawRow>), HarnessError> {
    let seed = cfg.seed.wrapping_add(index as u64);
    let wrap = |e: HarnessError| HarnessError::Repetition { seed, source: Box::new(e) };
    let (g, constructed) = cfg.topology.generate(seed, cfg.base_dir.as_deref()).map_err(|e| wrap(e.into()))?;
    let byz = place_byzantine(&cfg.byzantine, &g, constructed, seed).map_err(wrap)?;
    let strategies: BTreeMap<NodeId, Strategy> = byz.iter().map(|v| (v, cfg.strategy_for(v).clone())).collect();
    let opts = SimOptions {
        sig_len: cfg.sig_len,
        scheme: cfg.scheme,
        bloom: cfg.bloom_params(0),
        epoch_len: cfg.epoch_len,
        trace: false,
    };
    let tr = simulate(cfg.protocol, &g, &strategies, cfg.t, seed, &opts).map_err(wrap)?;
    let expected = expected_verdict(cfg.protocol, &g, &byz, cfg.t);
    let m = measure(&tr, expected);
    let bound_violations = match cfg.protocol {
        Protocol::Nectar => {
            let check = check_message_bound(&tr);
            check.node_violations.len() + usize::from(!check.total_ok)
        }
        _ => 0,
    };
    let summary = RepSummary {
        seed,
        fingerprint: g.fingerprint(),
        n: g.n(),
        edges: g.edge_count(),
        byzantine: byz.clone(),
        expected,
        mean_bytes: m.mean_bytes,
        max_bytes: m.max_bytes,
        mean_broadcast_bytes: m.mean_broadcast_bytes,
        total_messages: tr.total_messages(),
        success_rate: m.success_rate,
        agreement: tr.agreed_verdict().is_some(),
        confirmed: tr.correct_nodes().filter(|&v| tr.decisions[v].is_some_and(|d| d.confirmed)).count(),
        bound_violations,
    };
    let raw = (0..g.n())
        .map(|v| RawRow {
            scenario_id: cfg.id.clone(),
            seed,
            protocol: cfg.protocol,
            node: v,
            is_byzantine: byz.contains(v),
            bytes_sent: tr.bytes_sent[v],
            verdict: tr.decisions[v].map(|d| d.verdict),
            confirmed: tr.decisions[v].map(|d| d.confirmed),
            messages_sent: tr.messages_sent[v],
            broadcast_bytes: tr.broadcast_bytes[v],
        })
        .collect();
    Ok((summary, raw))
}

/// One row per scenario (or sweep point), stable column order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateRow {
    pub scenario_id: String,
    pub point: String,
    pub protocol: Protocol,
    pub n: usize,
    pub t: usize,
    pub byzantine: f64,
    pub repetitions: usize,
    pub mean_bytes: f64,
    pub ci95_bytes: f64,
    pub mean_kb: f64,
    pub mean_broadcast_bytes: f64,
    pub mean_success: Option<f64>,
    pub ci95_success: Option<f64>,
    pub agreement_rate: f64,
    pub bound_violations: usize,
}

impl AggregateRow {
    pub fn from_reps(cfg: &ScenarioConfig, point: &str, reps: &[RepSummary]) -> Self {
        let col = |f: fn(&RepSummary) -> f64| Summary::from_samples(&reps.iter().map(f).collect::<Vec<_>>());
        let bytes = col(|r| r.mean_bytes);
        let success: Vec<f64> = reps.iter().filter_map(|r| r.success_rate).collect();
        let success = Summary::from_samples(&success);
        let count = reps.len().max(1) as f64;
        Self {
            scenario_id: cfg.id.clone(),
            point: point.to_string(),
            protocol: cfg.protocol,
            n: reps.first().map_or(0, |r| r.n),
            t: cfg.t,
            byzantine: reps.iter().map(|r| r.byzantine.len() as f64).sum::<f64>() / count,
            repetitions: reps.len(),
            mean_bytes: bytes.map_or(0.0, |s| s.mean),
            ci95_bytes: bytes.map_or(0.0, |s| s.ci95),
            mean_kb: bytes.map_or(0.0, |s| s.mean / 1000.0),
            mean_broadcast_bytes: col(|r| r.mean_broadcast_bytes).map_or(0.0, |s| s.mean),
            mean_success: success.map(|s| s.mean),
            ci95_success: success.map(|s| s.ci95),
            agreement_rate: reps.iter().filter(|r| r.agreement).count() as f64 / count,
            bound_violations: reps.iter().map(|r| r.bound_violations).sum(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScenarioResult {
    pub config: ScenarioConfig,
    pub aggregate: AggregateRow,
    pub reps: Vec<RepSummary>,
    pub raw: Vec<RawRow>,
}

/// Runs every repetition of `cfg` (in parallel) and aggregates them.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioResult, HarnessError> {
    run_point(cfg, "")
}

pub(super) fn run_point(cfg: &ScenarioConfig, point: &str) -> Result<ScenarioResult, HarnessError> {
    cfg.validate()?;
    let outcomes = with_workers(|| {
        (0..cfg.repetitions).into_par_iter().map(|i| run_repetition(cfg, i)).collect::<Result<Vec<_>, _>>()
    })?;
    let (reps, raw): (Vec<RepSummary>, Vec<Vec<RawRow>>) = outcomes.into_iter().unzip();
    Ok(ScenarioResult {
        config: cfg.clone(),
        aggregate: AggregateRow::from_reps(cfg, point, &reps),
        reps,
        raw: raw.into_iter().flatten().collect(),
    })
}
