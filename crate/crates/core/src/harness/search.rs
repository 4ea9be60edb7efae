use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Construction, Experiment, ExperimentConfig};
use super::generate::generate;
use super::verify::verify_colouring;
use crate::colouring::{ApWitness, Colouring};
use crate::error::{invalid, Result};
use crate::stats::median;
use crate::torus::folklore_colouring;

pub const MAX_BUDGET: usize = 1_000_000;

/// One point of the parameter grid; candidates cycle through the grid in order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    #[serde(rename = "D")]
    pub dim: usize,
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub index: usize,
    pub grid: GridPoint,
    pub blue_count: usize,
    pub blue_3ap_free: bool,
    pub longest_red: usize,
    pub red_witness: Option<ApWitness>,
}

impl Candidate {
    /// Blue-3AP-free first, then shorter longest red progression, then lower index.
    fn key(&self) -> (bool, usize, usize) {
        (!self.blue_3ap_free, self.longest_red, self.index)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    pub best: Candidate,
    #[serde(skip)]
    pub best_colouring: Colouring,
    pub candidates: Vec<Candidate>,
    /// Longest red progression of the folklore colouring of the same length.
    pub folklore_longest_red: usize,
    pub median_longest_red: f64,
    /// Whether the median candidate beats the folklore colouring.
    pub beats_folklore: bool,
}

fn candidate_config(base: &ExperimentConfig, construction: Construction, n: usize, g: &GridPoint) -> ExperimentConfig {
    let mut c = base.clone();
    c.experiment = Experiment::Search;
    c.construction = Some(construction);
    c.n = Some(n);
    c.dim = Some(g.dim);
    if g.radius.is_some() {
        c.radius = g.radius;
    }
    c
}

/// Generates `budget` colourings, candidate `i` from grid point `i mod |grid|` and
/// substream `(seed, i)`, and returns the best by (no blue 3-AP, shortest longest red
/// progression). Parameters not in the grid come from `base`.
pub fn search_best(
    base: &ExperimentConfig,
    construction: Construction,
    n: usize,
    budget: usize,
    grid: &[GridPoint],
    seed: u64,
) -> Result<SearchResult> {
    if grid.is_empty() {
        return invalid("parameter grid is empty");
    }
    if budget == 0 || budget > MAX_BUDGET {
        return invalid(format!("budget must be in [1, {MAX_BUDGET}]"));
    }
    let run = |i: usize| -> Result<(Candidate, Colouring)> {
        let g = grid[i % grid.len()];
        let cfg = candidate_config(base, construction, n, &g);
        let gen = generate(&cfg, seed, i as u64)?;
        let v = verify_colouring(&gen.colouring, None)?;
        let cand = Candidate {
            index: i,
            grid: g,
            blue_count: v.blue_count,
            blue_3ap_free: v.blue_3ap_free(),
            longest_red: v.longest_red.length,
            red_witness: v.longest_red.witness,
        };
        Ok((cand, gen.colouring))
    };
    let results: Vec<Candidate> = (0..budget).into_par_iter().map(|i| run(i).map(|r| r.0)).collect::<Result<_>>()?;
    let best = results.iter().min_by_key(|c| c.key()).expect("budget >= 1").clone();
    let best_colouring = run(best.index)?.1;
    let folklore = verify_colouring(&folklore_colouring(n), None)?.longest_red.length;
    let med = median(&results.iter().map(|c| c.longest_red as f64).collect::<Vec<_>>());
    Ok(SearchResult {
        best,
        best_colouring,
        candidates: results,
        folklore_longest_red: folklore,
        median_longest_red: med,
        beats_folklore: med < folklore as f64,
    })
}
