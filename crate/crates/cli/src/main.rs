use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use nectar_core::graph::{
    byz_partitionable_oracle, is_partitioned, read_graph, vertex_connectivity, write_graph, ORACLE_MAX_NODES,
};
use nectar_core::harness::{run_scenario, sweep, write_scenario, write_sweep, Grid, ScenarioConfig, TopologySpec};
use serde_json::{json, Map, Value};

#[derive(Parser)]
#[command(name = "nectar", version, about = "Partition-detection protocol simulator and experiment harness")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario and write raw, aggregate and metadata files.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (default: the config's `output`, else `out`).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        repetitions: Option<usize>,
    },
    /// Run a scenario once per grid point and write one aggregate row each.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        repetitions: Option<usize>,
    },
    /// Generate or inspect topologies.
    #[command(subcommand)]
    Topo(Topo),
}

#[derive(Subcommand)]
enum Topo {
    /// Generate a graph and print it (or write it with --out).
    Gen(GenArgs),
    /// Print connectivity facts about a graph file.
    Check {
        #[arg(long)]
        graph: PathBuf,
        /// Also report whether `t` Byzantine nodes can partition it.
        #[arg(long)]
        t: Option<usize>,
    },
}

#[derive(Args)]
struct GenArgs {
    /// Topology kind, as in config files (k-regular, drone, bridge, ...).
    #[arg(long)]
    kind: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long)]
    n2: Option<usize>,
    #[arg(long)]
    byz: Option<usize>,
    #[arg(long)]
    density: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl GenArgs {
    fn spec(&self) -> Result<TopologySpec> {
        let mut m = Map::new();
        m.insert("kind".into(), json!(self.kind));
        let mut put = |key: &str, v: Option<Value>| {
            if let Some(v) = v {
                m.insert(key.into(), v);
            }
        };
        put("n", self.n.map(Value::from));
        put("k", self.k.map(Value::from));
        put("d", self.d.map(Value::from));
        put("radius", self.radius.map(Value::from));
        put("n1", self.n1.map(Value::from));
        put("n2", self.n2.map(Value::from));
        put("byz", self.byz.map(Value::from));
        put("density", self.density.map(Value::from));
        put("p", self.p.map(Value::from));
        serde_json::from_value(Value::Object(m)).context("invalid topology arguments")
    }
}

fn load(config: &PathBuf, seed: Option<u64>, repetitions: Option<usize>) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::load(config).with_context(|| format!("loading {}", config.display()))?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(r) = repetitions {
        cfg.repetitions = r;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn out_dir(cli: Option<PathBuf>, cfg: &ScenarioConfig) -> PathBuf {
    cli.or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("out"))
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> Result<ExitCode> {
    match Cli::parse().cmd {
        Cmd::Run { config, out, seed, repetitions } => {
            let cfg = load(&config, seed, repetitions)?;
            let res = run_scenario(&cfg)?;
            let dir = out_dir(out, &cfg);
            for p in write_scenario(&dir, &res)? {
                println!("wrote {}", p.display());
            }
            let a = &res.aggregate;
            println!(
                "{} {}: mean {:.1} KB/node (±{:.1}), success {}, agreement {:.2}",
                a.scenario_id,
                a.protocol,
                a.mean_kb,
                a.ci95_bytes / 1000.0,
                a.mean_success.map_or("n/a".into(), |s| format!("{s:.3}")),
                a.agreement_rate
            );
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Sweep { config, grid, out, seed, repetitions } => {
            let cfg = load(&config, seed, repetitions)?;
            let grid = Grid::load(&grid).with_context(|| format!("loading {}", grid.display()))?;
            let outcome = sweep(&cfg, &grid)?;
            let path = write_sweep(&out_dir(out, &cfg), &cfg.id, &outcome)?;
            println!("wrote {} ({} rows)", path.display(), outcome.results.len());
            for (label, err) in &outcome.failures {
                eprintln!("point {label} failed: {err}");
            }
            Ok(if outcome.ok() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Cmd::Topo(Topo::Gen(args)) => {
            let spec = args.spec()?;
            if matches!(spec, TopologySpec::File { .. }) {
                bail!("`file` is not a generator");
            }
            let (g, byz) = spec.generate(args.seed, None)?;
            let text = write_graph(&g);
            match &args.out {
                Some(p) => std::fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?,
                None => print!("{text}"),
            }
            if let Some(b) = byz {
                eprintln!("byzantine: {:?}", b.iter().collect::<Vec<_>>());
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Topo(Topo::Check { graph, t }) => {
            let g = read_graph(&graph).with_context(|| format!("reading {}", graph.display()))?;
            let kappa = vertex_connectivity(&g);
            println!("nodes {}", g.n());
            println!("edges {}", g.edge_count());
            println!("min_degree {}", g.min_degree());
            println!("connectivity {kappa}");
            println!("partitioned {}", is_partitioned(&g));
            println!("diameter {}", g.diameter().map_or("inf".into(), |d| d.to_string()));
            if let Some(t) = t {
                println!("byzantine_partitionable {}", kappa <= t);
                if g.n() <= ORACLE_MAX_NODES && t < g.n() {
                    println!("oracle_partitionable {}", byz_partitionable_oracle(&g, t)?);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
