use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use psequiv::catalog::{default_bertrand_params, BertrandParams, CATALOG_NAMES};
use psequiv::solvers::{BestResponseConfig, FpConfig};
use serde::Deserialize;

use crate::{PriceArgs, RunFpArgs};

/// Contents of a `--config` file. Every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub game: Option<String>,
    pub iterations: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub record_every: Option<usize>,
    pub grid: Option<usize>,
    pub refine_iters: Option<usize>,
    pub refine_tol: Option<f64>,
    pub restarts: Option<usize>,
    pub eps: Option<f64>,
    pub out: Option<PathBuf>,
    pub p_min: Option<f64>,
    pub p_max: Option<f64>,
    pub sigma: Option<f64>,
    pub gamma: Option<f64>,
    pub n: Option<f64>,
    pub m: Option<f64>,
    pub a: Option<f64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub game: String,
    pub fp: FpConfig,
    pub br: BestResponseConfig,
    pub bertrand: Option<BertrandParams>,
    pub eps: f64,
    pub out: PathBuf,
}

pub fn check_game(name: &str) -> Result<()> {
    if !CATALOG_NAMES.contains(&name) {
        bail!("unknown game '{name}'; expected one of {}", CATALOG_NAMES.join(", "));
    }
    Ok(())
}

/// Bertrand parameters of `game` with price overrides, `None` for other games.
pub fn bertrand_params(game: &str, prices: &PriceArgs, file: &ConfigFile) -> Result<Option<BertrandParams>> {
    let Some(mut p) = default_bertrand_params(game) else {
        if prices.p_min.is_some() || prices.p_max.is_some() {
            bail!("--p-min/--p-max apply to Bertrand games only");
        }
        return Ok(None);
    };
    let overrides = [
        (&mut p.p_min, prices.p_min.or(file.p_min)),
        (&mut p.p_max, prices.p_max.or(file.p_max)),
        (&mut p.sigma, file.sigma),
        (&mut p.gamma, file.gamma),
        (&mut p.n, file.n),
        (&mut p.m, file.m),
        (&mut p.a, file.a),
    ];
    for (slot, value) in overrides {
        if let Some(v) = value {
            *slot = v;
        }
    }
    p.validate()?;
    Ok(Some(p))
}

impl ExperimentConfig {
    pub fn resolve(args: &RunFpArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let Some(game) = args.game.clone().or_else(|| file.game.clone()) else {
            bail!("no game given; pass --game or set `game` in the config file");
        };
        check_game(&game)?;
        let fp_default = FpConfig::default();
        let fp = FpConfig {
            iterations: args.iterations.or(file.iterations).unwrap_or(fp_default.iterations),
            trials: args.trials.or(file.trials).unwrap_or(fp_default.trials),
            seed: args.seed.or(file.seed).unwrap_or(fp_default.seed),
            record_every: args.record_every.or(file.record_every).unwrap_or(fp_default.record_every),
        };
        fp.validate()?;
        let br_default = BestResponseConfig::default();
        let br = BestResponseConfig {
            grid_points_per_dim: args.grid.or(file.grid).unwrap_or(br_default.grid_points_per_dim),
            refine_iters: file.refine_iters.unwrap_or(br_default.refine_iters),
            refine_tol: file.refine_tol.unwrap_or(br_default.refine_tol),
            restarts: file.restarts.unwrap_or(br_default.restarts),
        };
        br.validate()?;
        let eps = args.eps.or(file.eps).unwrap_or(1e-2);
        if !(eps >= 0.0) {
            bail!("eps must be nonnegative, got {eps}");
        }
        Ok(Self {
            bertrand: bertrand_params(&game, &args.prices, &file)?,
            game,
            fp,
            br,
            eps,
            out: args.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("out")),
        })
    }
}
