use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use psequiv::catalog::{catalog_game, BertrandParams, CatalogGame, CATALOG_NAMES};
use psequiv::equivalence::{
    check_pse, continuous_from_monfg, identity_bijections, monfg_from_continuous, StrategyBijection,
};
use psequiv::game::{ContinuousGame, JointMixedStrategy, MixedStrategy, Monfg, ScalarUtility, StrategySet};
use psequiv::io::{
    summarize, to_toml_document, trajectory_rows, write_summary_csv, write_trajectory_csv, ContinuousDocument,
    MonfgDocument, PlayerSummary, RunSummary, StrategySetDocument, CERTIFICATE_SCHEMA, CONTINUOUS_SCHEMA, MONFG_SCHEMA,
    NE_REPORT_SCHEMA, RUN_SUMMARY_SCHEMA,
};
use psequiv::solvers::{
    fictitious_play, map_equilibrium, verify_continuous_ne, verify_ne, BestResponseConfig, JointStrategy, MapDirection,
    NeReport,
};
use serde::Serialize;

use crate::config::{bertrand_params, check_game, ConfigFile, ExperimentConfig};
use crate::{RunFpArgs, Target, TransformArgs, VerifyArgs};

/// A catalog game in MONFG form, with its continuous origin when it has one.
struct Prepared {
    continuous: Option<(ContinuousGame, Vec<StrategyBijection>)>,
    monfg: Monfg,
    utils: Vec<ScalarUtility>,
}

fn interval_bijections(cg: &ContinuousGame) -> Result<Vec<StrategyBijection>> {
    cg.strategy_sets()
        .iter()
        .map(|set| match set {
            StrategySet::Box(b) => Ok(StrategyBijection::box_to_simplex(b)?),
            StrategySet::Simplex { vertices } => Ok(StrategyBijection::identity(*vertices)?),
        })
        .collect()
}

fn prepare(game: &str, bertrand: Option<BertrandParams>) -> Result<Prepared> {
    Ok(match catalog_game(game, bertrand)? {
        CatalogGame::Continuous(cg) => {
            let bij = interval_bijections(&cg)?;
            let (monfg, utils) = monfg_from_continuous(&cg, &bij)?;
            Prepared { continuous: Some((cg, bij)), monfg, utils }
        }
        CatalogGame::Monfg(monfg, utils) => Prepared { continuous: None, monfg, utils },
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn mean(vectors: &[&[f64]]) -> Vec<f64> {
    let n = vectors.len() as f64;
    let mut out = vec![0.0; vectors.first().map_or(0, |v| v.len())];
    for v in vectors {
        for (o, x) in out.iter_mut().zip(*v) {
            *o += x / n;
        }
    }
    out
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    format!("({})", parts.join(", "))
}

pub fn run_fp(args: RunFpArgs) -> Result<()> {
    let cfg = ExperimentConfig::resolve(&args)?;
    let game = prepare(&cfg.game, cfg.bertrand)?;
    fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;

    let trajectories = fictitious_play(&game.monfg, &game.utils, &cfg.fp, &cfg.br)?;
    let bij = game.continuous.as_ref().map(|(_, b)| b.as_slice());
    let rows = trajectory_rows(&trajectories, bij)?;
    write_trajectory_csv(create(&cfg.out.join("trajectories.csv"))?, &rows)?;
    let per_iteration = summarize(&rows);
    write_summary_csv(create(&cfg.out.join("summary.csv"))?, &per_iteration)?;

    let n = game.monfg.n_players();
    let last: Vec<_> = trajectories.iter().map(|t| t.last().expect("at least one iteration")).collect();
    let finals: Vec<_> = per_iteration.iter().filter(|s| s.iteration == cfg.fp.iterations).collect();
    ensure!(finals.len() == n, "missing final iteration in summary");
    let mean_mapped: Vec<Vec<f64>> = finals.iter().map(|s| s.mean_mapped.clone()).collect();
    let mut players = Vec::with_capacity(n);
    for (i, s) in finals.iter().enumerate() {
        let empirical: Vec<&[f64]> = last.iter().map(|p| p.empirical[i].probs()).collect();
        players.push(PlayerSummary {
            player: i,
            mean_strategy: s.mean_strategy.clone(),
            std_strategy: s.std_strategy.clone(),
            mean_empirical: mean(&empirical),
            mean_mapped: s.mean_mapped.clone(),
            std_mapped: s.std_mapped.clone(),
            mean_utility: s.mean_utility,
            utility_at_mean_mapped: match &game.continuous {
                Some((cg, _)) => Some(cg.utility(i, &mean_mapped)?),
                None => None,
            },
        });
    }
    let candidate = JointMixedStrategy::new(
        players.iter().map(|p| MixedStrategy::new(p.mean_strategy.clone())).collect::<Result<_, _>>()?,
    );
    let verification = verify_ne(&game.monfg, &game.utils, &candidate, &cfg.br, cfg.eps)?;
    let summary = RunSummary {
        game: cfg.game.clone(),
        iterations: cfg.fp.iterations,
        trials: cfg.fp.trials,
        seed: cfg.fp.seed,
        record_every: cfg.fp.record_every,
        best_response: cfg.br,
        bertrand: cfg.bertrand,
        players,
        verification,
    };
    write_text(&cfg.out.join("summary.toml"), &to_toml_document(RUN_SUMMARY_SCHEMA, &summary)?)?;

    println!("game {}: {} trials x {} iterations, seed {}", cfg.game, cfg.fp.trials, cfg.fp.iterations, cfg.fp.seed);
    for p in &summary.players {
        let mapped = if p.mean_mapped.is_empty() {
            String::new()
        } else {
            format!(", mapped {} +- {}", fmt_vec(&p.mean_mapped), fmt_vec(&p.std_mapped))
        };
        let at_mean = p.utility_at_mean_mapped.map(|u| format!(", utility at mean {u:.4}")).unwrap_or_default();
        println!("player {}: final strategy {}{mapped}{at_mean}", p.player, fmt_vec(&p.mean_strategy));
    }
    let v = &summary.verification;
    println!(
        "mean final strategy {} eps-Nash at eps {} (max gain {:.3e})",
        if v.passed { "is" } else { "is not" },
        v.eps,
        v.max_gain()
    );
    println!("wrote {}", cfg.out.display());
    Ok(())
}

pub fn transform(args: TransformArgs) -> Result<bool> {
    check_game(&args.game)?;
    let bertrand = bertrand_params(&args.game, &args.prices, &ConfigFile::default())?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let fault = |utils: Vec<ScalarUtility>| match args.inject_fault {
        Some(offset) => utils.iter().map(|u| u.shifted(offset)).collect(),
        None => utils,
    };
    let (certificate, written) = match (catalog_game(&args.game, bertrand)?, args.to) {
        (CatalogGame::Continuous(cg), Target::Monfg) => {
            let bij = interval_bijections(&cg)?;
            let (mo, utils) = monfg_from_continuous(&cg, &bij)?;
            let path = args.out.join("monfg.toml");
            write_text(&path, &to_toml_document(MONFG_SCHEMA, &MonfgDocument::from_monfg(&mo))?)?;
            (check_pse(&cg, &mo, &fault(utils), &bij, args.samples, args.tol, args.seed)?, path)
        }
        (CatalogGame::Monfg(mo, utils), Target::Continuous) => {
            let cg = continuous_from_monfg(&mo, &utils)?;
            let doc = ContinuousDocument {
                source: args.game.clone(),
                utilities: utils.iter().map(|u| u.label().to_string()).collect(),
                strategy_sets: cg.strategy_sets().iter().map(StrategySetDocument::from).collect(),
                payoffs: MonfgDocument::from_monfg(&mo),
            };
            let path = args.out.join("continuous.toml");
            write_text(&path, &to_toml_document(CONTINUOUS_SCHEMA, &doc)?)?;
            let bij = identity_bijections(&mo)?;
            (check_pse(&cg, &mo, &fault(utils), &bij, args.samples, args.tol, args.seed)?, path)
        }
        (CatalogGame::Continuous(_), Target::Continuous) => bail!("'{}' is already a continuous game", args.game),
        (CatalogGame::Monfg(..), Target::Monfg) => bail!("'{}' is already an MONFG", args.game),
    };
    let cert_path = args.out.join("certificate.toml");
    write_text(&cert_path, &to_toml_document(CERTIFICATE_SCHEMA, &certificate)?)?;
    println!("wrote {} and {}", written.display(), cert_path.display());
    println!(
        "certificate {}: max utility gap {:.3e} over {} samples (tolerance {:e})",
        if certificate.passed { "passed" } else { "FAILED" },
        certificate.max_utility_gap,
        certificate.n_samples,
        certificate.tolerance
    );
    Ok(certificate.passed)
}

/// Parses `"a,b;c,d"` into one component vector per player.
pub fn parse_strategy(literal: &str) -> Result<Vec<Vec<f64>>> {
    literal
        .split(';')
        .enumerate()
        .map(|(i, player)| {
            player
                .split(',')
                .map(|c| c.trim().parse::<f64>().with_context(|| format!("player {i}: cannot parse '{}'", c.trim())))
                .collect()
        })
        .collect()
}

#[derive(Serialize)]
struct VerifyDocument<'a> {
    game: &'a str,
    eps: f64,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    continuous: Option<NeReport>,
    monfg: NeReport,
}

fn print_report(label: &str, report: &NeReport) {
    println!("{label}:");
    for (i, (u, g)) in report.utilities.iter().zip(&report.gains).enumerate() {
        println!("  player {i}: utility {u:.6}, best deviation gain {g:.3e}");
    }
}

pub fn verify(args: VerifyArgs) -> Result<bool> {
    check_game(&args.game)?;
    let bertrand = bertrand_params(&args.game, &args.prices, &ConfigFile::default())?;
    let game = prepare(&args.game, bertrand)?;
    let joint = parse_strategy(&args.strategy)?;
    ensure!(
        joint.len() == game.monfg.n_players(),
        "strategy has {} players, game has {}",
        joint.len(),
        game.monfg.n_players()
    );
    let br = BestResponseConfig { grid_points_per_dim: args.grid, ..Default::default() };
    let (continuous, monfg) = match &game.continuous {
        Some((cg, bij)) => {
            let direct = verify_continuous_ne(cg, &joint, args.grid, args.eps)?;
            print_report("continuous game, pure deviations", &direct);
            let JointStrategy::Mixed(mixed) = map_equilibrium(MapDirection::ToMonfg, &JointStrategy::Pure(joint), bij)?
            else {
                unreachable!("pure strategies map to mixed strategies")
            };
            let mapped = verify_ne(&game.monfg, &game.utils, &mixed, &br, args.eps)?;
            print_report("equivalent MONFG, mixed deviations", &mapped);
            (Some(direct), mapped)
        }
        None => {
            let mixed = JointMixedStrategy::from_vecs(joint)?;
            let report = verify_ne(&game.monfg, &game.utils, &mixed, &br, args.eps)?;
            print_report("MONFG, mixed deviations", &report);
            (None, report)
        }
    };
    let passed = monfg.passed && continuous.as_ref().is_none_or(|r| r.passed);
    if let Some(path) = &args.report {
        let doc = VerifyDocument { game: &args.game, eps: args.eps, passed, continuous, monfg };
        write_text(path, &to_toml_document(NE_REPORT_SCHEMA, &doc)?)?;
    }
    println!("{} at eps {}", if passed { "PASS" } else { "FAIL" }, args.eps);
    Ok(passed)
}

pub fn list_games() {
    for name in CATALOG_NAMES {
        let description = match name {
            "polynomial" => "continuous, zero-sum, v1(x, y) = 2xy^2 - x^2 - y on [-1, 1]^2",
            "bertrand" => "continuous, Bertrand price duopoly on [1, 30]^2",
            "bertrand-restricted" => "continuous, Bertrand price duopoly on [4, 30]^2",
            "identity-2x2" => "MONFG, 2x2 identity game, u = 3p1 + 3p3",
            "balanced-2x2" => "MONFG, (3,1)/(1,3) payoffs, u = x^2 + y^2",
            "remark1-2x2" => "MONFG, payoffs (3a, 3b) for actions a, b, u = p1 + p2",
            _ => "",
        };
        println!("{name:<20} {description}");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategy_literals() {
        assert_eq!(parse_strategy("0.5,0.5; 1,0").unwrap(), vec![vec![0.5, 0.5], vec![1.0, 0.0]]);
        assert_eq!(parse_strategy("-0.25;0.63").unwrap(), vec![vec![-0.25], vec![0.63]]);
        assert!(parse_strategy("0.5,x;1").is_err());
        assert!(parse_strategy("").is_err());
    }
}
