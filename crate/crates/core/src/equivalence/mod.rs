//! Pure-strategy equivalence (PSE) between continuous games and MONFGs.
//!
//! Both directions use the identity player bijection. From an MONFG, the
//! continuous game plays directly on the mixed-strategy simplices with
//! `v_i = u_i ∘ p_i`. From a continuous game, the MONFG has identity payoffs
//! and utilities `u_i = v_i ∘ φ^-1`, so the expected payoff vector is the
//! joint simplex point and the utility undoes the strategy bijections.

mod bijection;
mod convex;

pub use bijection::{interval_to_simplex, simplex_to_interval, StrategyBijection};
pub use convex::{
    ConvexBody, SimplexChart, BALL_TOL, CACHE_DIRECTION_STEP, DEFAULT_CACHE_CAPACITY, MINKOWSKI_MAX_DOUBLINGS,
    MINKOWSKI_MAX_ITERS, MINKOWSKI_TOL,
};

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{invalid, Result};
use crate::game::{identity_payoffs, ContinuousGame, ContinuousUtility, Monfg, ScalarUtility, StrategySet};

type Buf = SmallVec<[f64; 16]>;

/// MONFG -> continuous game. Player `i` picks a point of their simplex and
/// receives `u_i(p_i(δ))`.
pub fn continuous_from_monfg(game: &Monfg, utils: &[ScalarUtility]) -> Result<ContinuousGame> {
    game.check_utilities(utils)?;
    let game = Arc::new(game.clone());
    let counts = game.action_counts().to_vec();
    let sets = counts.iter().map(|&k| StrategySet::Simplex { vertices: k }).collect();
    let utilities = utils
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let game = Arc::clone(&game);
            let counts = counts.clone();
            let u = u.clone();
            Arc::new(move |flat: &[f64]| {
                let mut strategies: SmallVec<[&[f64]; 8]> = SmallVec::new();
                let mut rest = flat;
                for &k in &counts {
                    let (head, tail) = rest.split_at(k);
                    strategies.push(head);
                    rest = tail;
                }
                let mut payoff: Buf = SmallVec::from_elem(0.0, game.objective_count());
                game.expected_payoff_into(i, &strategies, &mut payoff);
                u.eval(&payoff)
            }) as ContinuousUtility
        })
        .collect();
    ContinuousGame::new(sets, utilities)
}

/// Identity strategy bijections for a continuous game built by
/// [`continuous_from_monfg`].
pub fn identity_bijections(game: &Monfg) -> Result<Vec<StrategyBijection>> {
    game.action_counts().iter().map(|&k| StrategyBijection::identity(k)).collect()
}

/// Continuous game -> MONFG with identity payoffs over `k_i + 1` actions per
/// player and utilities `u_i = v_i ∘ φ^-1`.
pub fn monfg_from_continuous(
    game: &ContinuousGame,
    bijections: &[StrategyBijection],
) -> Result<(Monfg, Vec<ScalarUtility>)> {
    let n = game.n_players();
    if bijections.len() != n {
        return Err(invalid(format!("{} bijections for {n} players", bijections.len())));
    }
    for (i, (b, set)) in bijections.iter().zip(game.strategy_sets()).enumerate() {
        if b.domain() != set {
            return Err(invalid(format!("bijection of player {i} is defined on a different strategy set")));
        }
    }
    let counts: Vec<usize> = bijections.iter().map(|b| b.codomain_dim()).collect();
    let monfg = identity_payoffs(n, &counts)?;
    let d = monfg.objective_count();
    let game = Arc::new(game.clone());
    let bijections: Arc<Vec<StrategyBijection>> = Arc::new(bijections.to_vec());
    let utils = (0..n)
        .map(|i| {
            let game = Arc::clone(&game);
            let bijections = Arc::clone(&bijections);
            let counts = counts.clone();
            ScalarUtility::new(format!("v{i} ∘ φ^-1"), d, move |p| {
                let mut s: Buf = SmallVec::from_elem(0.0, game.joint_dim());
                let mut offset = 0;
                for (j, (b, &k)) in bijections.iter().zip(&counts).enumerate() {
                    if b.inverse_into(&p[offset..offset + k], &mut s[game.coords(j)]).is_err() {
                        return f64::NAN;
                    }
                    offset += k;
                }
                game.utility_flat(i, &s)
            })
        })
        .collect();
    Ok((monfg, utils))
}

/// Numerical witness that `v_i(s) = u_i(p_i(φ(s)))` on sampled joint
/// strategies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseCertificate {
    pub n_samples: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub max_utility_gap: f64,
    pub per_player_gaps: Vec<f64>,
    pub passed: bool,
}

/// Samples `n_samples` joint pure strategies uniformly from the continuous
/// game's strategy sets and records the largest utility gap per player.
/// A gap that cannot be evaluated counts as infinite.
pub fn check_pse(
    cg: &ContinuousGame,
    mo: &Monfg,
    utils: &[ScalarUtility],
    bijections: &[StrategyBijection],
    n_samples: usize,
    tol: f64,
    seed: u64,
) -> Result<PseCertificate> {
    let n = cg.n_players();
    if mo.n_players() != n || bijections.len() != n {
        return Err(invalid(format!(
            "player counts differ: continuous {n}, MONFG {}, bijections {}",
            mo.n_players(),
            bijections.len()
        )));
    }
    mo.check_utilities(utils)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gaps = vec![0.0f64; n];
    for _ in 0..n_samples {
        let joint = cg.sample_joint(&mut rng);
        let flat = joint.concat();
        let mapped: Result<Vec<_>> = joint.iter().zip(bijections).map(|(s, b)| b.forward(s)).collect();
        for (i, gap) in gaps.iter_mut().enumerate() {
            let v = cg.utility_flat(i, &flat);
            let g = match &mapped {
                Ok(m) => {
                    let joint = crate::game::JointMixedStrategy::new(m.clone());
                    match mo.strategy_utility(&utils[i], i, &joint) {
                        Ok(u) => (v - u).abs(),
                        Err(_) => f64::INFINITY,
                    }
                }
                Err(_) => f64::INFINITY,
            };
            *gap = gap.max(if g.is_nan() { f64::INFINITY } else { g });
        }
    }
    let max_utility_gap = gaps.iter().copied().fold(0.0, f64::max);
    Ok(PseCertificate {
        n_samples,
        tolerance: tol,
        seed,
        max_utility_gap,
        per_player_gaps: gaps,
        passed: max_utility_gap <= tol,
    })
}
