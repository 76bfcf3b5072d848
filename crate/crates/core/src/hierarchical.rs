//! Hierarchical strategies: finite-support probability distributions over a
//! player's mixed strategies.

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{invalid, Error, Result};
use crate::game::{for_each_profile, JointMixedStrategy, MixedStrategy, Monfg, ScalarUtility, SIMPLEX_SUM_TOL};
use crate::solvers::{maximize_on_simplex, BestResponseConfig};

/// Largest product of support sizes enumerated by [`hierarchical_utility`].
pub const MAX_SUPPORT_TERMS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct HierarchicalStrategy {
    atoms: Vec<MixedStrategy>,
    weights: Vec<f64>,
}

impl HierarchicalStrategy {
    pub fn new(atoms: Vec<MixedStrategy>, weights: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(invalid("hierarchical strategy needs at least one atom"));
        }
        if atoms.len() != weights.len() {
            return Err(invalid(format!("{} atoms but {} weights", atoms.len(), weights.len())));
        }
        let arity = atoms[0].len();
        if atoms.iter().any(|a| a.len() != arity) {
            return Err(invalid("atoms must have the same number of actions"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(invalid(format!("weights must be nonnegative, got {weights:?}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_SUM_TOL {
            return Err(invalid(format!("weights sum to {total}, expected 1")));
        }
        Ok(Self { atoms, weights })
    }

    pub fn point_mass(atom: MixedStrategy) -> Self {
        Self { atoms: vec![atom], weights: vec![1.0] }
    }

    pub fn atoms(&self) -> &[MixedStrategy] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of actions of every atom.
    pub fn arity(&self) -> usize {
        self.atoms[0].len()
    }

    pub fn support_size(&self) -> usize {
        self.atoms.len()
    }
}

/// Mixed strategy at the barycentre of `mu`.
pub fn collapse_to_mixed(mu: &HierarchicalStrategy) -> MixedStrategy {
    let mut out = vec![0.0; mu.arity()];
    for (atom, w) in mu.atoms.iter().zip(&mu.weights) {
        for (o, p) in out.iter_mut().zip(atom.probs()) {
            *o += w * p;
        }
    }
    MixedStrategy::new(out).expect("convex combination of simplex points")
}

fn check_joint(game: &Monfg, joint: &[HierarchicalStrategy]) -> Result<()> {
    if joint.len() != game.n_players() {
        return Err(invalid(format!("{} strategies for {} players", joint.len(), game.n_players())));
    }
    for (i, (mu, &k)) in joint.iter().zip(game.action_counts()).enumerate() {
        if mu.arity() != k {
            return Err(invalid(format!("player {i} has {k} actions, strategy has {}", mu.arity())));
        }
    }
    let terms = joint.iter().try_fold(1usize, |acc, mu| acc.checked_mul(mu.support_size()));
    match terms {
        Some(t) if t <= MAX_SUPPORT_TERMS => Ok(()),
        _ => Err(Error::TooLarge(format!("support product exceeds {MAX_SUPPORT_TERMS} terms"))),
    }
}

/// Expected utility of `player` under the product of the hierarchical
/// strategies: the weighted sum of `u(p_player(atom profile))` over every
/// combination of atoms.
pub fn hierarchical_utility(
    game: &Monfg,
    u: &ScalarUtility,
    player: usize,
    joint: &[HierarchicalStrategy],
) -> Result<f64> {
    check_joint(game, joint)?;
    if u.arity() != game.objective_count() {
        return Err(invalid(format!("utility takes {} objectives, game has {}", u.arity(), game.objective_count())));
    }
    if player >= game.n_players() {
        return Err(invalid(format!("player {player} out of range")));
    }
    let supports: Vec<usize> = joint.iter().map(HierarchicalStrategy::support_size).collect();
    let mut payoff: SmallVec<[f64; 16]> = SmallVec::from_elem(0.0, game.objective_count());
    let mut strategies: Vec<&[f64]> = vec![&[]; joint.len()];
    let mut total = 0.0;
    for_each_profile(&supports, |_, idx| {
        let mut weight = 1.0;
        for (j, (&a, mu)) in idx.iter().zip(joint).enumerate() {
            weight *= mu.weights[a];
            strategies[j] = mu.atoms[a].probs();
        }
        if weight != 0.0 {
            game.expected_payoff_into(player, &strategies, &mut payoff);
            total += weight * u.eval(&payoff);
        }
    });
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchicalNeReport {
    pub passed: bool,
    pub eps: f64,
    pub max_gain: f64,
    pub gains: Vec<f64>,
}

/// Checks a hierarchical ε-Nash candidate.
///
/// Only point-mass deviations are searched: with the others fixed, a
/// player's utility is linear in their own weights, so no mixture of atoms
/// beats the best single atom. The deviating atom is found by a simplex grid
/// with `resolution` points per edge plus local refinement.
pub fn check_hierarchical_ne(
    game: &Monfg,
    utils: &[ScalarUtility],
    candidate: &[HierarchicalStrategy],
    resolution: usize,
    eps: f64,
) -> Result<HierarchicalNeReport> {
    game.check_utilities(utils)?;
    check_joint(game, candidate)?;
    let cfg = BestResponseConfig { grid_points_per_dim: resolution, ..Default::default() };
    cfg.validate()?;
    let mut gains = Vec::with_capacity(game.n_players());
    for (i, u) in utils.iter().enumerate() {
        let current = hierarchical_utility(game, u, i, candidate)?;
        let mut joint = candidate.to_vec();
        let k = game.action_counts()[i];
        let best = maximize_on_simplex(k, &cfg, |delta| {
            // Grid points are exact simplex points; polish keeps them inside.
            let atom = MixedStrategy::new(delta.to_vec()).expect("simplex point");
            joint[i] = HierarchicalStrategy::point_mass(atom);
            hierarchical_utility(game, u, i, &joint).unwrap_or(f64::NEG_INFINITY)
        });
        gains.push(best.value - current);
    }
    let max_gain = gains.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(HierarchicalNeReport { passed: max_gain <= eps, eps, max_gain, gains })
}

/// The hierarchical strategy putting all weight on each player's mixed strategy.
pub fn point_masses(joint: &JointMixedStrategy) -> Vec<HierarchicalStrategy> {
    joint.players().iter().cloned().map(HierarchicalStrategy::point_mass).collect()
}
