use serde_json::{json, Value};

use super::config::{field_err, required, Construction, ExperimentConfig};
use crate::colouring::Colouring;
use crate::error::Result;
use crate::rng::substream;
use crate::torus::{behrend_colouring, folklore_colouring, green_colouring, green_wolf_colouring, ConstructionDefaults};

/// Length `N` colourings are capped here.
pub const MAX_N: usize = 100_000_000;

pub struct Generated {
    pub colouring: Colouring,
    /// Random choices and effective parameters of the construction.
    pub meta: Value,
}

/// Red progressions of length `X = N^{1/r}` are the ones the construction forbids.
pub fn red_target(cfg: &ExperimentConfig) -> Option<f64> {
    Some((cfg.n? as f64).powf(1.0 / cfg.r? as f64))
}

/// Builds one colouring from `cfg`, drawing randomness from substream `(seed, task)`.
pub fn generate(cfg: &ExperimentConfig, seed: u64, task: u64) -> Result<Generated> {
    let exp = cfg.experiment;
    let construction = required(&cfg.construction, "construction", exp)?;
    let n = required(&cfg.n, "N", exp)?;
    if n > MAX_N {
        return field_err("N", format!("{n} exceeds {MAX_N}"));
    }
    let mut rng = substream(seed, task);
    match construction {
        Construction::Folklore => Ok(Generated { colouring: folklore_colouring(n), meta: json!({}) }),
        Construction::Behrend => {
            let d = required(&cfg.behrend_d, "behrend_d", exp)?;
            let digits = required(&cfg.digits, "digits", exp)?;
            Ok(Generated { colouring: behrend_colouring(n, d, digits)?, meta: json!({"behrend_d": d, "digits": digits}) })
        }
        Construction::GreenWolf => {
            let dim = required(&cfg.dim, "D", exp)?;
            let radius = required(&cfg.radius, "radius", exp)?;
            let g = green_wolf_colouring(n, dim, radius, &mut rng)?;
            Ok(Generated { meta: json!({"theta": g.theta, "system": g.system}), colouring: g.colouring })
        }
        Construction::Green => {
            let dim = required(&cfg.dim, "D", exp)?;
            let defaults = ConstructionDefaults::standard(n, dim);
            let params = ConstructionDefaults {
                rho: cfg.rho.unwrap_or(defaults.rho),
                width: cfg.width.unwrap_or(defaults.width),
                centres: cfg.centres.unwrap_or(defaults.centres),
            };
            let e_bound = cfg.e_bound.unwrap_or((dim as f64).powi(-4));
            let g = green_colouring(n, dim, &params, e_bound, &mut rng)?;
            let meta = json!({
                "theta": g.theta,
                "rho": params.rho,
                "width": params.width,
                "M": params.centres,
                "e_bound": e_bound,
                "e": g.system.e,
                "lift_radius": g.system.lift_radius(),
                "ap_margin": g.system.has_ap_margin(),
            });
            Ok(Generated { colouring: g.colouring, meta })
        }
    }
}
