use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use vdw_core::colouring::read_colouring;
use vdw_core::diophantine::ThresholdRule;
use vdw_core::harness::{run, verify_colouring, verify_witness, Construction, Experiment, ExperimentConfig, ReferenceTable};
use vdw_core::{Error, Result};

#[derive(Parser)]
#[command(name = "vdw", version, about = "Red/blue colourings of [N] avoiding blue 3-APs and long red APs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a colouring and verify it.
    Generate(Params),
    /// Check a colouring file for blue 3-APs and its longest red AP.
    Verify {
        #[arg(long)]
        colouring: PathBuf,
        #[arg(long)]
        d_max: Option<usize>,
    },
    /// Confirm that a colouring has no blue 3-AP and no red k-AP.
    VerifyWitness {
        #[arg(long)]
        colouring: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Sample and certify annulus centres.
    Centres(Params),
    /// Diophantine conditions for a random frequency.
    DioCheck(Params),
    /// Bohr-set progressions for random (θ, d).
    Bohr(Params),
    /// Gap density of random quadratic forms.
    Quadgap(Params),
    /// Small-determinant tail of random symmetric matrices.
    Dettail(Params),
    /// Edge-disjoint clique packing from a projective plane.
    Cliquepack(Params),
    /// Property checks for the Fourier cutoffs.
    Cutoffs(Params),
    /// Discrete against continuous exponential sums.
    CompareSt(Params),
    /// Best colouring over a parameter grid.
    Search(Params),
    /// Known values of w(3, k).
    Reference {
        #[arg(long)]
        k: Option<usize>,
    },
}

/// Flags mirror the configuration keys and override a `--config` file.
#[derive(Args, Default)]
struct Params {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for records.jsonl, summary.csv and replay.toml.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Acknowledge overriding formula defaults.
    #[arg(long = "toy")]
    toy_ack: bool,
    #[arg(long)]
    construction: Option<Construction>,
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long = "D")]
    dim: Option<usize>,
    #[arg(long)]
    r: Option<u32>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    width: Option<f64>,
    #[arg(long = "M")]
    centres: Option<usize>,
    #[arg(long)]
    e_bound: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    behrend_d: Option<usize>,
    #[arg(long)]
    digits: Option<usize>,
    #[arg(long)]
    d_max: Option<usize>,
    #[arg(long)]
    xi_max: Option<i64>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    separation: Option<f64>,
    #[arg(long)]
    max_attempts: Option<usize>,
    #[arg(long)]
    subspace_dim: Option<usize>,
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long)]
    threshold: Option<ThresholdRule>,
    #[arg(long)]
    n_extra: Option<usize>,
    #[arg(long = "X")]
    x: Option<u64>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    vol_min: Option<f64>,
    #[arg(long)]
    sum_fraction: Option<f64>,
    #[arg(long = "Q")]
    q: Option<f64>,
    #[arg(long = "B")]
    b_exp: Option<f64>,
    #[arg(long = "L")]
    l: Option<f64>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    diag_min: Option<f64>,
    #[arg(long)]
    b_points: Option<usize>,
    #[arg(long)]
    c_points: Option<usize>,
    #[arg(long)]
    grid_sample: Option<usize>,
    #[arg(long)]
    size: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    deltas: Option<Vec<f64>>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    xi_count: Option<usize>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    radii: Option<Vec<f64>>,
}

macro_rules! overlay {
    ($cfg:ident, $p:ident, $($f:ident),*) => {
        $(if $p.$f.is_some() { $cfg.$f = $p.$f.clone(); })*
    };
}

impl Params {
    fn into_config(self, experiment: Experiment) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let c = ExperimentConfig::from_toml(&std::fs::read_to_string(path)?)?;
                if c.experiment != experiment {
                    return Err(Error::InvalidArgument(format!(
                        "experiment: config file is for '{}', not '{}'",
                        c.experiment.name(),
                        experiment.name()
                    )));
                }
                c
            }
            None => ExperimentConfig::new(experiment),
        };
        let p = self;
        if let Some(seed) = p.seed {
            cfg.seed = seed;
        }
        cfg.toy_ack |= p.toy_ack;
        overlay!(
            cfg, p, output, construction, n, dim, r, rho, width, centres, e_bound, radius, behrend_d, digits, d_max, xi_max,
            tolerance, grid, separation, max_attempts, subspace_dim, c2, threshold, n_extra, x, c1, vol_min, sum_fraction, q,
            b_exp, l, s, m, trials, diag_min, b_points, c_points, grid_sample, size, deltas, eta, xi_count, budget, dims, radii
        );
        Ok(cfg)
    }
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn experiment(params: Params, exp: Experiment) -> Result<()> {
    let cfg = params.into_config(exp)?;
    let out = run(&cfg)?;
    let dir = cfg.output.clone().unwrap_or_else(|| PathBuf::from("runs").join(format!("{}-{}", exp.name(), &out.config_hash[..12])));
    let files = out.write(&dir)?;
    let summary: serde_json::Map<String, serde_json::Value> = out.summary.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    print_json(&json!({
        "experiment": exp.name(),
        "config_hash": out.config_hash,
        "summary": summary,
        "files": files,
    }))
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Generate(p) => experiment(p, Experiment::Generate),
        Command::Centres(p) => experiment(p, Experiment::Centres),
        Command::DioCheck(p) => experiment(p, Experiment::DioCheck),
        Command::Bohr(p) => experiment(p, Experiment::Bohr),
        Command::Quadgap(p) => experiment(p, Experiment::Quadgap),
        Command::Dettail(p) => experiment(p, Experiment::Dettail),
        Command::Cliquepack(p) => experiment(p, Experiment::Cliquepack),
        Command::Cutoffs(p) => experiment(p, Experiment::Cutoffs),
        Command::CompareSt(p) => experiment(p, Experiment::CompareSt),
        Command::Search(p) => experiment(p, Experiment::Search),
        Command::Verify { colouring, d_max } => {
            let c = read_colouring(colouring)?;
            let v = verify_colouring(&c, d_max)?;
            print_json(&json!({"blue_3ap_free": v.blue_3ap_free(), "summary": v}))
        }
        Command::VerifyWitness { colouring, k } => {
            let c = read_colouring(colouring)?;
            let v = verify_witness(&c, k)?;
            print_json(&v)?;
            if !v.confirmed {
                return Err(Error::InvalidArgument(format!("witness rejected: not a colouring avoiding blue 3-APs and red {k}-APs")));
            }
            Ok(())
        }
        Command::Reference { k } => match k {
            Some(k) => {
                let e = ReferenceTable::get(k).ok_or_else(|| Error::InvalidArgument(format!("k: no reference value for k = {k}")))?;
                print_json(&e)
            }
            None => print_json(&ReferenceTable::entries()),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
