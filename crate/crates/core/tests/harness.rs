use std::collections::BTreeSet;
use std::time::Instant;

use vdw_core::colouring::{read_colouring, Colouring};
use vdw_core::harness::*;
use vdw_core::Error;

fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn brute_blue_3ap(c: &Colouring) -> bool {
    let blue = c.blue_elements();
    let set: BTreeSet<usize> = blue.iter().copied().collect();
    blue.iter().enumerate().any(|(i, &a)| blue[i + 1..].iter().any(|&b| set.contains(&(2 * b - a))))
}

fn brute_longest_red(c: &Colouring) -> usize {
    let n = c.n_max();
    let mut best = 0;
    for a in 1..=n {
        for d in 1..n.max(2) {
            let mut len = 0;
            let mut x = a;
            while x <= n && !c.is_blue(x) {
                len += 1;
                x += d;
            }
            best = best.max(len);
        }
    }
    best
}

fn green_wolf(n: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        construction: Some(Construction::GreenWolf),
        n: Some(n),
        dim: Some(3),
        radius: Some(0.2),
        seed,
        ..ExperimentConfig::new(Experiment::Generate)
    }
}

#[test]
fn reference_entries() {
    let e = ReferenceTable::get(10).unwrap();
    assert_eq!((e.w, e.kind), (97, BoundKind::Exact));
    assert_eq!(ReferenceTable::get(20).map(|e| (e.w, e.kind)), Some((389, BoundKind::Lower)));
    assert_eq!(ReferenceTable::get(30).map(|e| (e.w, e.kind)), Some((903, BoundKind::Lower)));
    assert!(ReferenceTable::get(11).is_none());
    let json = serde_json::to_value(e).unwrap();
    assert_eq!(json["kind"], "exact");
}

#[test]
fn witness_for_k10_is_confirmed() {
    let c = read_colouring(fixture("w3_10_n96.vdwf")).unwrap();
    let t = Instant::now();
    let v = verify_witness(&c, 10).unwrap();
    assert!(t.elapsed().as_secs_f64() < 1.0);
    assert!(v.confirmed);
    assert_eq!(v.n, 96);
    assert!(!brute_blue_3ap(&c));
    assert_eq!(v.longest_red.length, brute_longest_red(&c));
    assert!(v.longest_red.length < 10);
    assert_eq!(v.reference.unwrap().w, 97);
    // A colouring of [97] cannot be a witness, since w(3, 10) = 97.
    let mut longer = Colouring::from_blue(97, c.blue_elements()).unwrap();
    assert!(!verify_witness(&longer, 10).unwrap().confirmed);
    longer.set_blue(97, true);
    assert!(!verify_witness(&longer, 10).unwrap().confirmed);
}

#[test]
fn witness_rejects_blue_progression() {
    let c = Colouring::from_blue(20, [2, 5, 8]).unwrap();
    let v = verify_witness(&c, 10).unwrap();
    assert!(!v.confirmed);
    assert_eq!(v.blue_3ap.map(|w| (w.start, w.difference)), Some((2, 3)));
    assert!(verify_witness(&c, 1).is_err());
}

#[test]
fn toml_round_trip_preserves_hash() {
    let mut cfg = green_wolf(500, 9);
    cfg.rho = Some(0.1);
    cfg.toy_ack = true;
    cfg.deltas = Some(vec![1e-4, 0.1 + 0.2]);
    let text = cfg.to_toml().unwrap();
    let back = ExperimentConfig::from_toml(&text).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(back.hash(), cfg.hash());
    assert!(text.contains("N = 500"));
    assert!(text.contains("construction = \"green-wolf\""));
}

#[test]
fn hash_ignores_output_but_not_parameters() {
    let a = green_wolf(500, 9);
    let mut b = a.clone();
    b.output = Some("elsewhere".into());
    assert_eq!(a.hash(), b.hash());
    b.seed = 10;
    assert_ne!(a.hash(), b.hash());
    assert_eq!(a.hash().len(), 64);
}

#[test]
fn unknown_keys_are_rejected() {
    let err = ExperimentConfig::from_toml("experiment = \"generate\"\nrhoo = 0.1\n").unwrap_err();
    assert!(err.to_string().contains("rhoo"));
}

#[test]
fn overrides_require_toy_ack() {
    let mut cfg = ExperimentConfig { dim: Some(4), n: Some(10_000), ..ExperimentConfig::new(Experiment::Generate) };
    cfg.rho = Some(1.0 / 256.0);
    cfg.width = Some(1e-4);
    cfg.centres = Some(256);
    assert!(cfg.overrides().is_empty());
    cfg.validate().unwrap();
    cfg.rho = Some(0.01);
    let err = cfg.validate().unwrap_err();
    assert!(matches!(err, Error::InvalidArgument(_)));
    assert!(err.to_string().starts_with("invalid argument: rho:"), "{err}");
    assert_eq!(err.exit_code(), 2);
    cfg.toy_ack = true;
    cfg.validate().unwrap();
    let cfg = ExperimentConfig { diag_min: Some(1.0), ..ExperimentConfig::new(Experiment::CompareSt) };
    assert!(cfg.validate().unwrap_err().to_string().contains("diag_min"));
}

#[test]
fn missing_fields_are_named() {
    let cfg = ExperimentConfig { construction: Some(Construction::Green), ..ExperimentConfig::new(Experiment::Generate) };
    let err = run(&cfg).unwrap_err();
    assert!(err.to_string().contains("N: required"), "{err}");
    let cfg = ExperimentConfig { s: Some(0), ..ExperimentConfig::new(Experiment::Cliquepack) };
    assert!(run(&cfg).unwrap_err().to_string().contains("s: must be positive"));
}

#[test]
fn generate_writes_consistent_outputs() {
    let cfg = green_wolf(3000, 5);
    let out = run(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = out.write(dir.path()).unwrap();
    assert_eq!(files.len(), 4);
    let c = read_colouring(dir.path().join("colouring.vdwf")).unwrap();
    let v = out.records.iter().find(|r| r["record"] == "verification").unwrap();
    assert_eq!(v["summary"]["blue_count"], c.blue_count());
    assert_eq!(v["blue_3ap_free"], !brute_blue_3ap(&c));
    assert_eq!(v["summary"]["longest_red"]["length"], brute_longest_red(&c.restrict(3000)));
    for r in &out.records {
        assert_eq!(r["config_hash"], out.config_hash);
    }
    let replay = std::fs::read_to_string(dir.path().join("replay.toml")).unwrap();
    assert!(replay.starts_with("# replay: vdw generate --config replay.toml"));
    let again = run(&ExperimentConfig::from_toml(&replay).unwrap()).unwrap();
    assert_eq!(again.jsonl(), out.jsonl());
}

#[test]
fn csv_is_long_format_v1() {
    let cfg = ExperimentConfig { s: Some(36), m: Some(3), ..ExperimentConfig::new(Experiment::Cliquepack) };
    let out = run(&cfg).unwrap();
    let text = out.csv().unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER.to_vec());
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert!(!rows.is_empty());
    for r in &rows {
        assert_eq!(&r[0], CSV_SCHEMA);
        assert_eq!(&r[1], "cliquepack");
        assert_eq!(&r[2], out.config_hash);
    }
    let k = rows.iter().find(|r| &r[4] == "k").unwrap();
    assert!(k[5].parse::<usize>().unwrap() >= 36 / 16);
}

#[test]
fn formula_default_green_run() {
    let cfg = ExperimentConfig {
        construction: Some(Construction::Green),
        n: Some(100_000),
        dim: Some(4),
        r: Some(2),
        seed: 7,
        ..ExperimentConfig::new(Experiment::Generate)
    };
    let out = run(&cfg).unwrap();
    let meta = &out.records[0];
    assert_eq!(meta["M"], 256);
    assert_eq!(meta["rho"], 1.0 / 256.0);
    assert!((meta["width"].as_f64().unwrap() - 1e-5).abs() < 1e-18);
    let v = &out.records[1];
    assert_eq!(v["summary"]["d_max"], (100_000f64 / 100_000f64.sqrt()).floor() as u64);
    assert!((v["red_target"].as_f64().unwrap() - 100_000f64.sqrt()).abs() < 1e-9);
    let c = out.colouring.unwrap();
    assert_eq!(v["blue_3ap_free"], !brute_blue_3ap(&c));
}

#[test]
fn search_budget_one_matches_single_generation() {
    let base = ExperimentConfig { radius: Some(0.2), ..ExperimentConfig::new(Experiment::Search) };
    let grid = [GridPoint { dim: 3, radius: Some(0.2) }];
    let res = search_best(&base, Construction::GreenWolf, 2000, 1, &grid, 11).unwrap();
    assert_eq!(res.candidates.len(), 1);
    let mut single = green_wolf(2000, 11);
    single.experiment = Experiment::Search;
    let g = generate(&single, 11, 0).unwrap();
    assert_eq!(g.colouring, res.best_colouring);
    assert_eq!(res.best.longest_red, brute_longest_red(&g.colouring));
    assert_eq!(res.best.blue_3ap_free, !brute_blue_3ap(&g.colouring));
}

#[test]
fn search_rejects_empty_grid_and_zero_budget() {
    let base = ExperimentConfig::new(Experiment::Search);
    let e = search_best(&base, Construction::GreenWolf, 100, 5, &[], 0).unwrap_err();
    assert!(matches!(e, Error::InvalidArgument(_)));
    let grid = [GridPoint { dim: 2, radius: Some(0.2) }];
    assert!(search_best(&base, Construction::GreenWolf, 100, 0, &grid, 0).is_err());
}

#[test]
fn search_picks_best_candidate() {
    let base = ExperimentConfig::new(Experiment::Search);
    let grid = [GridPoint { dim: 2, radius: Some(0.1) }, GridPoint { dim: 3, radius: Some(0.25) }];
    let res = search_best(&base, Construction::GreenWolf, 3000, 8, &grid, 3).unwrap();
    assert_eq!(res.candidates.len(), 8);
    for (i, c) in res.candidates.iter().enumerate() {
        assert_eq!(c.index, i);
        assert_eq!(c.grid, grid[i % 2]);
    }
    let free: Vec<_> = res.candidates.iter().filter(|c| c.blue_3ap_free).collect();
    if let Some(best_len) = free.iter().map(|c| c.longest_red).min() {
        assert!(res.best.blue_3ap_free);
        assert_eq!(res.best.longest_red, best_len);
    }
}

#[test]
fn folklore_versus_green_head_to_head() {
    let cfg = ExperimentConfig {
        construction: Some(Construction::GreenWolf),
        n: Some(10_000),
        dim: Some(5),
        radius: Some(0.1),
        budget: Some(20),
        seed: 1,
        ..ExperimentConfig::new(Experiment::Search)
    };
    let out = run(&cfg).unwrap();
    let cmp = out.records.iter().find(|r| r["record"] == "comparison").unwrap();
    let folk = cmp["folklore_longest_red"].as_u64().unwrap();
    assert_eq!(folk, 3333);
    let med = cmp["median_longest_red"].as_f64().unwrap();
    let beats = cmp["beats_folklore"].as_bool().unwrap();
    assert_eq!(beats, med < folk as f64);
    let finding = cmp["finding"].as_str().unwrap();
    assert_eq!(finding == "negative finding", !beats);
    assert_eq!(out.records.iter().filter(|r| r["record"] == "candidate").count(), 20);
}

fn small_experiments() -> Vec<ExperimentConfig> {
    vec![
        green_wolf(2000, 3),
        ExperimentConfig {
            s: Some(2),
            q: Some(10.0),
            b_exp: Some(0.5),
            l: Some(20.0),
            diag_min: Some(1.0),
            trials: Some(16),
            toy_ack: true,
            seed: 4,
            ..ExperimentConfig::new(Experiment::Quadgap)
        },
        ExperimentConfig { dim: Some(2), x: Some(1000), trials: Some(6), seed: 5, ..ExperimentConfig::new(Experiment::Bohr) },
        ExperimentConfig { size: Some(3), trials: Some(20_000), deltas: Some(vec![1e-2, 1e-3]), ..ExperimentConfig::new(Experiment::Dettail) },
    ]
}

#[test]
fn runs_are_deterministic() {
    for cfg in small_experiments() {
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(a.jsonl(), b.jsonl(), "{}", cfg.experiment.name());
        assert_eq!(a.csv().unwrap(), b.csv().unwrap());
        assert!(a.records.iter().all(|r| r["config_hash"] == a.config_hash));
        let mut other = cfg.clone();
        other.seed += 1;
        assert_ne!(run(&other).unwrap().jsonl(), a.jsonl());
    }
}

#[test]
fn bohr_records_pass() {
    let cfg = ExperimentConfig { dim: Some(2), x: Some(5000), trials: Some(10), seed: 2, ..ExperimentConfig::new(Experiment::Bohr) };
    let out = run(&cfg).unwrap();
    let trials: Vec<_> = out.records.iter().filter(|r| r["record"] == "trial").collect();
    assert_eq!(trials.len(), 10);
    for t in &trials {
        let c = &t["raw"]["checks"];
        assert_eq!(c["distinct_sums"], true);
        assert_eq!(c["sums_bounded"], true);
        assert_eq!(c["phases_bounded"], true);
        assert_eq!(c["minkowski_ok"], true);
        // At D = 2 the guaranteed product bound sits below 2^{-6} X.
        assert!(c["minkowski_bound"].as_f64().unwrap() < c["product_bound"].as_f64().unwrap());
    }
    let violations: usize = trials.iter().filter(|t| t["passes"] != true).count();
    assert!(out.summary.contains(&("raw_violations".into(), violations.to_string())));
}

#[test]
fn compare_and_dio_experiments_run() {
    let cfg = ExperimentConfig {
        s: Some(2),
        l: Some(30.0),
        q: Some(3.0),
        diag_min: Some(1.0),
        toy_ack: true,
        trials: Some(2),
        xi_count: Some(3),
        ..ExperimentConfig::new(Experiment::CompareSt)
    };
    let out = run(&cfg).unwrap();
    assert_eq!(out.records.iter().filter(|r| r["record"] == "pair").count(), 6);
    let cfg = ExperimentConfig {
        n: Some(10_000),
        r: Some(2),
        dim: Some(2),
        c2: Some(1.0),
        n_extra: Some(8),
        d_max: Some(20),
        ..ExperimentConfig::new(Experiment::DioCheck)
    };
    let out = run(&cfg).unwrap();
    let w = out.records.iter().find(|r| r["record"] == "witness_check").unwrap();
    assert_eq!(w["all_confirmed"], true);
    let missing = ExperimentConfig { c2: None, ..cfg };
    assert!(run(&missing).unwrap_err().to_string().contains("c2"));
}

#[test]
fn budget_errors_map_to_exit_code_three() {
    let cfg = ExperimentConfig {
        s: Some(2),
        l: Some(30.0),
        q: Some(3.0),
        diag_min: Some(1.0),
        toy_ack: true,
        trials: Some(100_000),
        xi_count: Some(100),
        ..ExperimentConfig::new(Experiment::CompareSt)
    };
    assert_eq!(run(&cfg).unwrap_err().exit_code(), 3);
}
