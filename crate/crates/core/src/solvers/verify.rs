//! ε-Nash checks in both game models and the mapping of equilibria between
//! pure-strategy-equivalent games.

use serde::{Deserialize, Serialize};

use super::best_response::best_response;
use super::search::{golden_max, maximize_on_simplex, BestResponseConfig};
use crate::equivalence::StrategyBijection;
use crate::error::{invalid, Result};
use crate::game::{ContinuousGame, JointMixedStrategy, Monfg, ScalarUtility, StrategySet};
use crate::hierarchical::HierarchicalStrategy;

/// Outcome of an ε-Nash check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeReport {
    pub passed: bool,
    pub eps: f64,
    /// Utility of each player at the candidate.
    pub utilities: Vec<f64>,
    /// Best unilateral improvement found for each player.
    pub gains: Vec<f64>,
}

impl NeReport {
    pub fn max_gain(&self) -> f64 {
        self.gains.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Checks that no player gains more than `eps` by a unilateral deviation to
/// any mixed strategy, using [`best_response`] as the deviation oracle.
pub fn verify_ne(
    game: &Monfg,
    utils: &[ScalarUtility],
    candidate: &JointMixedStrategy,
    br: &BestResponseConfig,
    eps: f64,
) -> Result<NeReport> {
    game.check_utilities(utils)?;
    let mut utilities = Vec::with_capacity(game.n_players());
    let mut gains = Vec::with_capacity(game.n_players());
    for (i, u) in utils.iter().enumerate() {
        let current = game.strategy_utility(u, i, candidate)?;
        let best = best_response(game, u, i, &candidate.without(i), br)?;
        utilities.push(current);
        gains.push(best.utility - current);
    }
    Ok(NeReport { passed: gains.iter().all(|&g| g <= eps), eps, utilities, gains })
}

/// Best unilateral improvement of each player in a continuous game at the
/// joint pure strategy `joint`.
///
/// Interval strategy sets are scanned at `scan_points` evenly spaced points
/// and the best point is polished by golden section within one scan cell.
/// Higher-dimensional boxes use a tensor grid of about `scan_points` points;
/// simplex sets use [`maximize_on_simplex`] directly on `v_i`.
pub fn continuous_deviation_gains(game: &ContinuousGame, joint: &[Vec<f64>], scan_points: usize) -> Result<Vec<f64>> {
    if scan_points < 2 {
        return Err(invalid("scan needs at least two points"));
    }
    let base = game.flatten(joint)?;
    let mut gains = Vec::with_capacity(game.n_players());
    for i in 0..game.n_players() {
        let current = game.utility_flat(i, &base);
        let coords = game.coords(i);
        let mut s = base.clone();
        let mut eval = |point: &[f64]| {
            s[coords.clone()].copy_from_slice(point);
            let v = game.utility_flat(i, &s);
            if v.is_nan() {
                f64::NEG_INFINITY
            } else {
                v
            }
        };
        let best = match game.strategy_set(i)? {
            StrategySet::Box(b) if b.dim() == 1 => {
                let (lo, hi) = (b.lower()[0], b.upper()[0]);
                let step = (hi - lo) / (scan_points - 1) as f64;
                let mut arg = lo;
                let mut best = f64::NEG_INFINITY;
                for k in 0..scan_points {
                    let x = if k + 1 == scan_points { hi } else { lo + k as f64 * step };
                    let v = eval(&[x]);
                    if v > best {
                        best = v;
                        arg = x;
                    }
                }
                let (_, polished) = golden_max(|x| eval(&[x]), (arg - step).max(lo), (arg + step).min(hi), 100, 1e-13);
                best.max(polished)
            }
            StrategySet::Box(b) => {
                let k = b.dim();
                let per_dim = ((scan_points as f64).powf(1.0 / k as f64).floor() as usize).max(2);
                let mut idx = vec![0usize; k];
                let mut best = f64::NEG_INFINITY;
                let mut point = vec![0.0; k];
                loop {
                    for (j, p) in point.iter_mut().enumerate() {
                        let t = idx[j] as f64 / (per_dim - 1) as f64;
                        *p = b.lower()[j] + t * (b.upper()[j] - b.lower()[j]);
                    }
                    best = best.max(eval(&point));
                    let mut j = 0;
                    while j < k {
                        idx[j] += 1;
                        if idx[j] < per_dim {
                            break;
                        }
                        idx[j] = 0;
                        j += 1;
                    }
                    if j == k {
                        break;
                    }
                }
                best
            }
            StrategySet::Simplex { vertices } => {
                let cfg = BestResponseConfig { grid_points_per_dim: scan_points, ..Default::default() };
                maximize_on_simplex(*vertices, &cfg, &mut eval).value
            }
        };
        gains.push(best - current);
    }
    Ok(gains)
}

/// ε-Nash check of a joint pure strategy in a continuous game.
pub fn verify_continuous_ne(
    game: &ContinuousGame,
    joint: &[Vec<f64>],
    scan_points: usize,
    eps: f64,
) -> Result<NeReport> {
    let gains = continuous_deviation_gains(game, joint, scan_points)?;
    let utilities = (0..game.n_players()).map(|i| game.utility(i, joint)).collect::<Result<Vec<_>>>()?;
    Ok(NeReport { passed: gains.iter().all(|&g| g <= eps), eps, utilities, gains })
}

/// A finite-support mixed strategy of a continuous game.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMeasure {
    pub atoms: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

/// A joint strategy in either game model.
#[derive(Debug, Clone, PartialEq)]
pub enum JointStrategy {
    /// Joint pure strategy of a continuous game.
    Pure(Vec<Vec<f64>>),
    /// Joint finite-support mixed strategy of a continuous game.
    ContinuousMixed(Vec<FiniteMeasure>),
    /// Joint mixed strategy of an MONFG.
    Mixed(JointMixedStrategy),
    /// Joint hierarchical strategy of an MONFG.
    Hierarchical(Vec<HierarchicalStrategy>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapDirection {
    /// Continuous game -> MONFG, through `φ`.
    ToMonfg,
    /// MONFG -> continuous game, through `φ^-1`.
    ToContinuous,
}

/// Maps a joint strategy across a pure-strategy equivalence. Pure strategies
/// map to mixed strategies (and back); finite-support mixtures map atom by
/// atom with unchanged weights.
pub fn map_equilibrium(
    direction: MapDirection,
    strategy: &JointStrategy,
    bijections: &[StrategyBijection],
) -> Result<JointStrategy> {
    let players = match strategy {
        JointStrategy::Pure(v) => v.len(),
        JointStrategy::ContinuousMixed(v) => v.len(),
        JointStrategy::Mixed(v) => v.len(),
        JointStrategy::Hierarchical(v) => v.len(),
    };
    if players != bijections.len() {
        return Err(invalid(format!("{} bijections for {players} players", bijections.len())));
    }
    match (direction, strategy) {
        (MapDirection::ToMonfg, JointStrategy::Pure(joint)) => Ok(JointStrategy::Mixed(JointMixedStrategy::new(
            joint.iter().zip(bijections).map(|(s, b)| b.forward(s)).collect::<Result<_>>()?,
        ))),
        (MapDirection::ToMonfg, JointStrategy::ContinuousMixed(joint)) => joint
            .iter()
            .zip(bijections)
            .map(|(m, b)| {
                let atoms = m.atoms.iter().map(|s| b.forward(s)).collect::<Result<Vec<_>>>()?;
                HierarchicalStrategy::new(atoms, m.weights.clone())
            })
            .collect::<Result<Vec<_>>>()
            .map(JointStrategy::Hierarchical),
        (MapDirection::ToContinuous, JointStrategy::Mixed(joint)) => Ok(JointStrategy::Pure(
            joint.players().iter().zip(bijections).map(|(d, b)| b.inverse(d.probs())).collect::<Result<_>>()?,
        )),
        (MapDirection::ToContinuous, JointStrategy::Hierarchical(joint)) => joint
            .iter()
            .zip(bijections)
            .map(|(h, b)| {
                let atoms = h.atoms().iter().map(|d| b.inverse(d.probs())).collect::<Result<Vec<_>>>()?;
                Ok(FiniteMeasure { atoms, weights: h.weights().to_vec() })
            })
            .collect::<Result<Vec<_>>>()
            .map(JointStrategy::ContinuousMixed),
        (MapDirection::ToMonfg, _) => Err(invalid("expected a continuous-game strategy")),
        (MapDirection::ToContinuous, _) => Err(invalid("expected an MONFG strategy")),
    }
}
