use finder_bench::csvio::{parse_csv, write_csv};
use finder_bench::{run_benchmark, scalability_sweep, BenchConfig, SweepConfig};
use finder_core::planner::{PolicyConfig, Variant};
use finder_core::world::WorldParams;

fn small_config(workers: usize) -> BenchConfig {
    BenchConfig {
        seed: 3,
        episodes: 6,
        policies: vec![Variant::Full, Variant::GreedyFrontier, Variant::RandomWalk],
        workers,
        world: WorldParams { width: 32, height: 32, ..WorldParams::default() },
        policy: PolicyConfig { budget: 200, ..PolicyConfig::default() },
        ..BenchConfig::default()
    }
}

#[test]
fn csv_is_identical_across_runs_and_worker_counts() {
    let one = write_csv(&run_benchmark(&small_config(1), None).unwrap().results).unwrap();
    let again = write_csv(&run_benchmark(&small_config(1), None).unwrap().results).unwrap();
    let three = write_csv(&run_benchmark(&small_config(3), None).unwrap().results).unwrap();
    assert_eq!(one, again);
    assert_eq!(one, three);
}

#[test]
fn report_is_identical_across_worker_counts() {
    let a = run_benchmark(&small_config(1), None).unwrap().report.render();
    let b = run_benchmark(&small_config(2), None).unwrap().report.render();
    assert_eq!(a, b);
}

#[test]
fn policies_are_paired_and_csv_roundtrips() {
    let cfg = small_config(0);
    let run = run_benchmark(&cfg, None).unwrap();
    assert_eq!(run.results.len(), cfg.episodes * cfg.policies.len());
    for chunk in run.results.chunks(cfg.policies.len()) {
        assert!(chunk.iter().all(|r| r.seed == chunk[0].seed && r.optimal_length == chunk[0].optimal_length));
        let names: Vec<Variant> = chunk.iter().map(|r| r.policy).collect();
        assert_eq!(names, cfg.policies);
    }
    let text = write_csv(&run.results).unwrap();
    assert_eq!(parse_csv(&text).unwrap(), run.results);
    assert!(text.starts_with("# finder-episodes v1\nseed,policy,S,p,l,steps,found_steps,fail_reason\n"));
    for p in &run.report.policies {
        assert!(p.mspl <= p.success_rate);
    }
}

#[test]
fn dumps_maps_and_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = BenchConfig { episodes: 1, policies: vec![Variant::Full], ..small_config(1) };
    run_benchmark(&cfg, Some(dir.path())).unwrap();
    let names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert!(names.iter().any(|n| n == "ep0000.scenario"));
    assert!(names.iter().any(|n| n.starts_with("ep0000_full") && n.ends_with(".pgm")));
}

#[test]
fn sweep_is_independent_of_workers() {
    let cfg = |workers| SweepConfig {
        ks: vec![1, 2],
        successes: 3,
        attempt_cap: 40,
        workers,
        world: WorldParams { width: 32, height: 32, ..WorldParams::default() },
        policy: PolicyConfig { budget: 200, ..PolicyConfig::default() },
        ..SweepConfig::default()
    };
    assert_eq!(scalability_sweep(&cfg(1)).unwrap(), scalability_sweep(&cfg(3)).unwrap());
}
