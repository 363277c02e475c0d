use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use finder_bench::csvio::{load_csv, save_csv};
use finder_bench::report::Metric;
use finder_bench::runner::{episode_seeds, prepare_trial, run_trial, Dump, Trial};
use finder_bench::sweep::render_sweep;
use finder_bench::{run_benchmark, scalability_sweep, wilcoxon_signed_rank, BenchConfig, SweepConfig};
use finder_core::planner::{optimal_tour, sample_start, PolicyConfig, Variant};
use finder_core::semantics::{save_similarity, similarity_for_world};
use finder_core::world::{generate_world, load_scenario, save_scenario, WorldParams};

#[derive(Parser)]
#[command(name = "finder", version, about = "Multi-object semantic search on grid worlds")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate worlds as scenario files, each with its similarity table.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: u64,
        /// World parameters (TOML); defaults otherwise.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "worlds")]
        out: PathBuf,
    },
    /// Run one episode of one policy.
    Run {
        /// Bench config supplying world and policy settings.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Base seed; the episode's world, spawn and policy seeds derive from it.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Episode index within the seed's stream.
        #[arg(long, default_value_t = 0)]
        episode: u64,
        /// Use this scenario file instead of generating a world.
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long, default_value = "full")]
        policy: String,
        /// Write the final occupancy and unified maps here.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Run the paired suite and write episodes.csv and report.txt.
    Bench {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        episodes: Option<usize>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value = "bench-out")]
        out: PathBuf,
        /// Also dump every episode's scenario and final maps under <out>/maps.
        #[arg(long)]
        dump_maps: bool,
    },
    /// Step counts of successful episodes for K = 1..8 targets.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        successes: Option<usize>,
        #[arg(long, default_value = "sweep.csv")]
        out: PathBuf,
    },
    /// Paired Wilcoxon signed-rank test between two episode CSVs.
    Stats {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = MetricArg::Spl)]
        metric: MetricArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Success,
    Spl,
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Gen { seed, count, config, out } => gen(seed, count, config, out),
        Cmd::Run { config, seed, episode, scenario, policy, dump } => run(config, seed, episode, scenario, &policy, dump),
        Cmd::Bench { config, seed, episodes, workers, out, dump_maps } => {
            let mut cfg = match config {
                Some(p) => BenchConfig::load(p)?,
                None => BenchConfig::default(),
            };
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.episodes = episodes.unwrap_or(cfg.episodes);
            cfg.workers = workers.unwrap_or(cfg.workers);
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let maps = out.join("maps");
            let run = run_benchmark(&cfg, dump_maps.then_some(maps.as_path()))?;
            save_csv(&run.results, out.join("episodes.csv"))?;
            let text = run.report.render();
            std::fs::write(out.join("report.txt"), &text)?;
            print!("{text}");
            Ok(())
        }
        Cmd::Sweep { config, seed, workers, successes, out } => {
            let mut cfg = match config {
                Some(p) => SweepConfig::load(p)?,
                None => SweepConfig::default(),
            };
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.workers = workers.unwrap_or(cfg.workers);
            cfg.successes = successes.unwrap_or(cfg.successes);
            let text = render_sweep(&scalability_sweep(&cfg)?);
            std::fs::write(&out, &text)?;
            print!("{text}");
            Ok(())
        }
        Cmd::Stats { a, b, metric } => {
            let (ra, rb) = (load_csv(&a)?, load_csv(&b)?);
            if ra.len() != rb.len() || ra.iter().zip(&rb).any(|(x, y)| x.seed != y.seed) {
                bail!("{} and {} are not paired row by row", a.display(), b.display());
            }
            let metric = match metric {
                MetricArg::Success => Metric::Success,
                MetricArg::Spl => Metric::Spl,
            };
            let w = wilcoxon_signed_rank(&metric.sample(&ra), &metric.sample(&rb))?;
            println!(
                "metric {} n={} W+={} W-={} p={:.6e} ({:?})",
                metric.name(),
                w.n,
                w.w_plus,
                w.w_minus,
                w.p_value,
                w.method
            );
            Ok(())
        }
    }
}

fn gen(seed: u64, count: u64, config: Option<PathBuf>, out: PathBuf) -> Result<()> {
    let params: WorldParams = match config {
        Some(p) => toml::from_str(&std::fs::read_to_string(&p)?).with_context(|| format!("parsing {}", p.display()))?,
        None => WorldParams::default(),
    };
    std::fs::create_dir_all(&out)?;
    for s in seed..seed + count {
        let world = generate_world(s, &params)?;
        let scenario = out.join(format!("world_{s}.scenario"));
        save_scenario(&world, &scenario)?;
        save_similarity(&similarity_for_world(&world, &params.affinity), out.join(format!("world_{s}.similarity")))?;
        println!("{}", scenario.display());
    }
    Ok(())
}

fn run(
    config: Option<PathBuf>,
    seed: u64,
    episode: u64,
    scenario: Option<PathBuf>,
    policy: &str,
    dump: Option<PathBuf>,
) -> Result<()> {
    let cfg = match config {
        Some(p) => BenchConfig::load(p)?,
        None => BenchConfig::default(),
    };
    let variant: Variant = policy.parse()?;
    let seeds = episode_seeds(seed, episode);
    let trial = match scenario {
        Some(path) => {
            let world = load_scenario(&path)?;
            let table = similarity_for_world(&world, &cfg.world.affinity);
            let start = sample_start(&world, &cfg.policy.kinematics, seeds.spawn).context("no valid spawn cell")?;
            let optimal_length = optimal_tour(&world, start.cell, &world.target_cells())?.length;
            Trial { seeds, world, table, start, optimal_length }
        }
        None => prepare_trial(seeds, &cfg.world, &cfg.policy)?,
    };
    if let Some(dir) = &dump {
        std::fs::create_dir_all(dir)?;
    }
    let stem = format!("{}_{}", seeds.world, variant.name());
    let d = dump.as_deref().map(|dir| Dump { dir, stem: &stem });
    let pc = PolicyConfig { variant, ..cfg.policy.clone() };
    let r = run_trial(&trial, variant, &pc, d)?;
    println!(
        "world {} policy {} success {} p {} l {} steps {} found {:?} fail {}",
        r.seed,
        r.policy,
        r.success,
        r.path_length,
        r.optimal_length,
        r.steps,
        r.found_steps,
        r.fail_reason.map_or("-", |f| f.name())
    );
    Ok(())
}
