use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use super::config::{field_err, required, Construction, Experiment, ExperimentConfig};
use super::generate::{generate, red_target};
use super::search::{search_best, GridPoint};
use super::verify::verify_colouring;
use crate::colouring::{write_colouring, Colouring};
use crate::cutoffs::{cutoff_suite, Tent};
use crate::diophantine::{dio_report, verify_report, DioParams, NSample, ThresholdRule};
use crate::error::{Error, Result};
use crate::lattice::{bohr_structure, refine_structure, MinimaConfig, RefineParams};
use crate::quadform::{
    amplified_gap_probability, clique_pack, estimate_sigma_probability, exp_sum_continuous, exp_sum_discrete, linearity_check,
    random_sym_det_tail, BcGrid, BoxSpec, FormSampler, Quadrature, SigmaParams,
};
use crate::rng::substream;
use crate::torus::{sample_centres, CentreConfig, Subspace, TorusPoint};

pub const CSV_SCHEMA: &str = "v1";
pub const CSV_HEADER: [&str; 6] = ["schema", "experiment", "config_hash", "seed", "metric", "value"];

/// Records, summary metrics and the replay stanza of one run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub records: Vec<Value>,
    pub summary: Vec<(String, String)>,
    pub colouring: Option<Colouring>,
}

impl RunOutput {
    pub fn jsonl(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            s.push_str(&serde_json::to_string(r).expect("records serialise"));
            s.push('\n');
        }
        s
    }

    pub fn csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Parse(format!("csv: {e}"));
        w.write_record(CSV_HEADER).map_err(csv_err)?;
        let seed = self.config.seed.to_string();
        for (metric, value) in &self.summary {
            w.write_record([CSV_SCHEMA, self.config.experiment.name(), &self.config_hash, &seed, metric, value]).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Parse(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }

    /// The configuration as TOML, headed by the command that replays it.
    pub fn replay(&self) -> Result<String> {
        Ok(format!(
            "# replay: vdw {} --config replay.toml\n# config_hash = {}\n{}",
            self.config.experiment.name(),
            self.config_hash,
            self.config.to_toml()?
        ))
    }

    /// Writes `records.jsonl`, `summary.csv`, `replay.toml` and, for colourings,
    /// `colouring.vdwf` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut files = vec![
            (dir.join("records.jsonl"), self.jsonl()),
            (dir.join("summary.csv"), self.csv()?),
            (dir.join("replay.toml"), self.replay()?),
        ];
        if let Some(c) = &self.colouring {
            files.push((dir.join("colouring.vdwf"), write_colouring(c)));
        }
        for (p, text) in &files {
            std::fs::write(p, text)?;
        }
        Ok(files.into_iter().map(|f| f.0).collect())
    }
}

struct Recorder {
    hash: String,
    experiment: &'static str,
    records: Vec<Value>,
    summary: Vec<(String, String)>,
}

impl Recorder {
    fn push(&mut self, kind: &str, payload: impl Serialize) -> Result<()> {
        let mut obj = Map::new();
        obj.insert("config_hash".into(), json!(self.hash));
        obj.insert("experiment".into(), json!(self.experiment));
        obj.insert("record".into(), json!(kind));
        match serde_json::to_value(payload)? {
            Value::Object(m) => obj.extend(m),
            other => {
                obj.insert("value".into(), other);
            }
        }
        self.records.push(Value::Object(obj));
        Ok(())
    }

    fn metric(&mut self, name: &str, value: impl ToString) {
        self.summary.push((name.into(), value.to_string()));
    }
}

/// Runs one experiment. Identical configurations give identical records.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let mut rec = Recorder { hash: cfg.hash(), experiment: cfg.experiment.name(), records: Vec::new(), summary: Vec::new() };
    let colouring = match cfg.experiment {
        Experiment::Generate => Some(run_generate(cfg, &mut rec)?),
        Experiment::Centres => run_centres(cfg, &mut rec).map(|_| None)?,
        Experiment::DioCheck => run_dio(cfg, &mut rec).map(|_| None)?,
        Experiment::Bohr => run_bohr(cfg, &mut rec).map(|_| None)?,
        Experiment::Quadgap => run_quadgap(cfg, &mut rec).map(|_| None)?,
        Experiment::Dettail => run_dettail(cfg, &mut rec).map(|_| None)?,
        Experiment::Cliquepack => run_cliquepack(cfg, &mut rec).map(|_| None)?,
        Experiment::Cutoffs => run_cutoffs(cfg, &mut rec).map(|_| None)?,
        Experiment::CompareSt => run_compare(cfg, &mut rec).map(|_| None)?,
        Experiment::Search => Some(run_search(cfg, &mut rec)?),
    };
    Ok(RunOutput { config: cfg.clone(), config_hash: rec.hash, records: rec.records, summary: rec.summary, colouring })
}

fn run_generate(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<Colouring> {
    let gen = generate(cfg, cfg.seed, 0)?;
    let target = red_target(cfg);
    let d_max = match (cfg.d_max, target) {
        (Some(d), _) => Some(d),
        (None, Some(x)) if cfg.construction == Some(Construction::Green) => {
            Some(((cfg.n.unwrap_or(1) as f64 / x).floor() as usize).clamp(1, cfg.n.unwrap_or(2).saturating_sub(1).max(1)))
        }
        _ => None,
    };
    let v = verify_colouring(&gen.colouring, d_max)?;
    rec.push("construction", &gen.meta)?;
    rec.push(
        "verification",
        json!({
            "summary": v,
            "blue_3ap_free": v.blue_3ap_free(),
            "red_target": target,
            "red_below_target": target.map(|x| (v.longest_red.length as f64) < x),
        }),
    )?;
    rec.metric("N", v.n);
    rec.metric("blue_count", v.blue_count);
    rec.metric("blue_3ap_free", v.blue_3ap_free());
    rec.metric("d_max", v.d_max);
    rec.metric("longest_red", v.longest_red.length);
    if let Some(x) = target {
        rec.metric("red_target", x);
    }
    Ok(gen.colouring)
}

fn run_centres(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let exp = cfg.experiment;
    let dim = required(&cfg.dim, "D", exp)?;
    let rho = cfg.rho_or_default().expect("D is set");
    let defaults = CentreConfig::standard(dim, rho);
    let cc = CentreConfig {
        count: cfg.centres.unwrap_or(defaults.count),
        xi_max: cfg.xi_max.unwrap_or(defaults.xi_max),
        tolerance: cfg.tolerance.unwrap_or(defaults.tolerance),
        grid: cfg.grid.unwrap_or(defaults.grid),
        separation: cfg.separation.unwrap_or(defaults.separation),
        max_attempts: cfg.max_attempts.unwrap_or(defaults.max_attempts),
    };
    let sub = cfg.subspace_dim.unwrap_or(dim);
    if sub == 0 || sub > dim {
        return field_err("subspace_dim", format!("must be in [1, {dim}]"));
    }
    let family = Subspace::coordinate_family(dim, sub);
    let mut rng = substream(cfg.seed, 0);
    let (centres, cert) = sample_centres(dim, rho, &family, &cc, &mut rng)?;
    rec.push("centre_config", &cc)?;
    rec.push("certificate", json!({"centres": centres, "certificate": cert}))?;
    rec.metric("M", cc.count);
    rec.metric("attempts", cert.attempts);
    rec.metric("min_second_difference", cert.separation.min_value);
    rec.metric("passes", cert.passes);
    Ok(())
}

fn run_dio(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let exp = cfg.experiment;
    let n = required(&cfg.n, "N", exp)? as u64;
    let r = required(&cfg.r, "r", exp)?;
    let dim = required(&cfg.dim, "D", exp)?;
    let c2 = required(&cfg.c2, "c2", exp)?;
    let p = DioParams::standard(n, r, dim, c2, cfg.threshold.unwrap_or(ThresholdRule::Standard));
    let theta = TorusPoint::random(dim, &mut substream(cfg.seed, 0));
    let sample = NSample::ladder(n, cfg.n_extra.unwrap_or(64), cfg.seed);
    let d_hi = cfg.d_max.map_or_else(|| (n as f64 / p.x()).floor().max(1.0) as u64, |d| d as u64);
    let report = dio_report(&theta, &p, &sample, (1, d_hi))?;
    let check = verify_report(&report)?;
    rec.push("sample", &sample)?;
    rec.push("report", &report)?;
    rec.push("witness_check", json!({"all_confirmed": check.all_confirmed(), "check": check}))?;
    rec.metric("diophantine", report.diophantine);
    rec.metric("sample_size", sample.values.len());
    rec.metric("d_max", d_hi);
    rec.metric("witnesses_confirmed", check.all_confirmed());
    Ok(())
}

fn run_bohr(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let exp = cfg.experiment;
    let dim = required(&cfg.dim, "D", exp)?;
    let x = required(&cfg.x, "X", exp)?;
    let trials = cfg.trials.unwrap_or(1);
    if trials > 100_000 {
        return field_err("trials", "at most 100000 Bohr trials");
    }
    let d_max = cfg.d_max.map_or(x, |d| d as u64).max(1);
    let defaults = RefineParams::standard(dim);
    let params = RefineParams {
        c1: cfg.c1.unwrap_or(defaults.c1),
        vol_min: cfg.vol_min.unwrap_or((dim as f64).powf(-cfg.c1.unwrap_or(defaults.c1) * dim as f64)),
        sum_fraction: cfg.sum_fraction.unwrap_or(defaults.sum_fraction),
    };
    let mcfg = MinimaConfig::default();
    let out: Vec<Result<Value>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = substream(cfg.seed, t);
            let theta = TorusPoint::random(dim, &mut rng);
            let d = rng.gen_range(1..=d_max);
            let raw = bohr_structure(&theta, d, x, &mcfg)?;
            let refined = match refine_structure(&raw, &params) {
                Ok(s) => json!({
                    "kept": s.kept,
                    "discarded": s.discarded,
                    "sum_ok": s.sum_ok,
                    "volume_ok": s.volume_ok,
                    "lengths_ok": s.lengths_ok,
                    "product": s.product,
                }),
                Err(e) => json!({"error": e.to_string()}),
            };
            Ok(json!({"trial": t, "raw": raw, "passes": raw.checks.all_pass(), "refined": refined}))
        })
        .collect();
    let (mut passes, mut minkowski) = (0u64, 0u64);
    for r in out {
        let v = r?;
        passes += u64::from(v["passes"] == json!(true));
        minkowski += u64::from(v["raw"]["checks"]["minkowski_ok"] == json!(true));
        rec.push("trial", v)?;
    }
    rec.push("refine_params", &params)?;
    rec.metric("trials", trials);
    rec.metric("raw_passes", passes);
    rec.metric("raw_violations", trials - passes);
    rec.metric("minkowski_bound_violations", trials - minkowski);
    Ok(())
}

fn quad_params(cfg: &ExperimentConfig) -> Result<(SigmaParams, BoxSpec, u64)> {
    let exp = cfg.experiment;
    let s = required(&cfg.s, "s", exp)?;
    let q = required(&cfg.q, "Q", exp)?;
    let l = required(&cfg.l, "L", exp)?;
    let grid = BcGrid {
        b_points: cfg.b_points.unwrap_or(BcGrid::default().b_points),
        c_points: cfg.c_points.unwrap_or(BcGrid::default().c_points),
        sample: cfg.grid_sample,
    };
    let p = SigmaParams {
        s,
        q,
        diag_min: cfg.diag_min.unwrap_or(FormSampler::DEFAULT_DIAG_MIN),
        b_exp: required(&cfg.b_exp, "B", exp)?,
        grid,
    };
    Ok((p, BoxSpec::uniform(s, l)?, cfg.trials.unwrap_or(100)))
}

fn strip_records(v: impl Serialize) -> Result<Value> {
    let mut v = serde_json::to_value(v)?;
    if let Value::Object(m) = &mut v {
        m.remove("records");
    }
    Ok(v)
}

fn run_quadgap(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let (p, bx, trials) = quad_params(cfg)?;
    if let Some(m) = cfg.m {
        let est = amplified_gap_probability(&p, m, &bx, trials, cfg.seed)?;
        for r in &est.records {
            rec.push("trial", r)?;
        }
        rec.metric("passes", est.passes);
        rec.metric("frequency", est.frequency);
        rec.metric("interval_lo", est.interval.lo);
        rec.metric("interval_hi", est.interval.hi);
        rec.metric("blocks", est.blocks);
        rec.push("amplified_estimate", strip_records(&est)?)?;
    } else {
        let est = estimate_sigma_probability(&p, &bx, trials, cfg.seed)?;
        for r in &est.records {
            rec.push("trial", r)?;
        }
        rec.metric("passes", est.passes);
        rec.metric("frequency", est.frequency);
        rec.metric("interval_lo", est.interval.lo);
        rec.metric("interval_hi", est.interval.hi);
        rec.push("estimate", strip_records(&est)?)?;
    }
    rec.metric("trials", trials);
    Ok(())
}

fn run_dettail(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let exp = cfg.experiment;
    let n = required(&cfg.size, "size", exp)?;
    let deltas = cfg.deltas.clone().unwrap_or_else(|| vec![1e-4, 1e-5, 1e-6]);
    let trials = cfg.trials.unwrap_or(1_000_000);
    let tail = random_sym_det_tail(n, &deltas, trials, cfg.seed)?;
    let lin = linearity_check(&tail);
    for (i, d) in tail.deltas.iter().enumerate() {
        rec.metric(&format!("frequency[{d:e}]"), tail.frequencies[i]);
    }
    rec.metric("linear", lin.passes);
    rec.metric("max_excess", lin.max_excess);
    rec.push("tail", &tail)?;
    rec.push("linearity", &lin)?;
    Ok(())
}

fn run_cliquepack(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let exp = cfg.experiment;
    let s = required(&cfg.s, "s", exp)?;
    let m = required(&cfg.m, "m", exp)?;
    let packing = clique_pack(s, m)?;
    let check = packing.check();
    rec.metric("k", check.k);
    rec.metric("p", packing.p);
    rec.metric("passes", check.passes());
    rec.push("packing", &packing)?;
    rec.push("check", json!({"passes": check.passes(), "check": check}))?;
    Ok(())
}

fn run_cutoffs(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let suite = cutoff_suite(cfg.seed)?;
    rec.metric("tent", suite.tent.passes);
    rec.metric("fejer", suite.fejer.passes);
    rec.metric("interval_majorant", suite.interval.passes);
    rec.metric("band_limited_minorant", suite.minorant.passes);
    rec.metric("torus_box", suite.torus_box.passes);
    rec.metric("torus_ball", suite.torus_ball.passes);
    rec.metric("all_pass", suite.all_pass());
    rec.push("suite", json!({"all_pass": suite.all_pass(), "reports": suite}))?;
    Ok(())
}

fn run_compare(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let exp = cfg.experiment;
    let s = required(&cfg.s, "s", exp)?;
    let l = required(&cfg.l, "L", exp)?;
    let q = required(&cfg.q, "Q", exp)?;
    let sampler = FormSampler::new(s, q, cfg.diag_min.unwrap_or(FormSampler::DEFAULT_DIAG_MIN))?;
    let tent = Tent::new(cfg.eta.unwrap_or(0.1))?;
    let bx = BoxSpec::uniform(s, l)?;
    let forms = cfg.trials.unwrap_or(20);
    let xi_count = cfg.xi_count.unwrap_or(10);
    if forms as f64 * xi_count as f64 > 1e5 {
        return Err(Error::BudgetExceeded("forms × xi_count exceeds 10^5".into()));
    }
    let xi_bound = l.powf(1.0 / 8.0);
    let bound = 10.0 / l.sqrt();
    let quad = Quadrature::default();
    let rows: Vec<Result<Vec<Value>>> = (0..forms)
        .into_par_iter()
        .map(|f| {
            let mut rng = substream(cfg.seed, f);
            let form = sampler.sample(&mut rng);
            (0..xi_count)
                .map(|j| {
                    let xi = rng.gen_range(-xi_bound..=xi_bound);
                    let sd = exp_sum_discrete(&form, &bx, &tent, xi)?;
                    let tc = exp_sum_continuous(&form, &tent, xi, &quad)?;
                    let diff = (sd - tc.value()).norm();
                    Ok(json!({
                        "form": f,
                        "xi_index": j,
                        "a": form.a,
                        "xi": xi,
                        "S": [sd.re, sd.im],
                        "T": [tc.re, tc.im],
                        "quadrature_error": tc.error_estimate,
                        "difference": diff,
                    }))
                })
                .collect()
        })
        .collect();
    let mut max_diff = 0.0f64;
    for r in rows {
        for v in r? {
            max_diff = max_diff.max(v["difference"].as_f64().unwrap_or(f64::NAN));
            rec.push("pair", v)?;
        }
    }
    rec.metric("max_difference", max_diff);
    rec.metric("bound", bound);
    rec.metric("within_bound", max_diff <= bound);
    rec.push("summary", json!({"max_difference": max_diff, "bound": bound, "within_bound": max_diff <= bound, "xi_bound": xi_bound}))?;
    Ok(())
}

fn run_search(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<Colouring> {
    let exp = cfg.experiment;
    let construction = required(&cfg.construction, "construction", exp)?;
    let n = required(&cfg.n, "N", exp)?;
    let budget = cfg.budget.unwrap_or(1);
    let dims = cfg.dims.clone().or(cfg.dim.map(|d| vec![d])).unwrap_or_default();
    let radii: Vec<Option<f64>> = match (&cfg.radii, cfg.radius) {
        (Some(r), _) => r.iter().map(|&x| Some(x)).collect(),
        (None, r) => vec![r],
    };
    let grid: Vec<GridPoint> = dims.iter().flat_map(|&dim| radii.iter().map(move |&radius| GridPoint { dim, radius })).collect();
    let res = search_best(cfg, construction, n, budget, &grid, cfg.seed)?;
    for c in &res.candidates {
        rec.push("candidate", c)?;
    }
    rec.push("best", &res.best)?;
    rec.push(
        "comparison",
        json!({
            "folklore_longest_red": res.folklore_longest_red,
            "median_longest_red": res.median_longest_red,
            "beats_folklore": res.beats_folklore,
            "finding": if res.beats_folklore { "median shorter than folklore" } else { "negative finding" },
        }),
    )?;
    rec.metric("budget", budget);
    rec.metric("best_longest_red", res.best.longest_red);
    rec.metric("best_blue_3ap_free", res.best.blue_3ap_free);
    rec.metric("median_longest_red", res.median_longest_red);
    rec.metric("folklore_longest_red", res.folklore_longest_red);
    Ok(res.best_colouring)
}
