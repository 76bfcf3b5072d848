use smallvec::SmallVec;

use super::search::{maximize_on_simplex, BestResponseConfig};
use crate::error::{invalid, Result};
use crate::game::{MixedStrategy, Monfg, ScalarUtility};

#[derive(Debug, Clone, PartialEq)]
pub struct BestResponse {
    pub strategy: MixedStrategy,
    pub utility: f64,
}

/// Mixed strategy of `player` maximising `u(p_player(δ, δ_-i))` against
/// fixed `opponents` (every other player, in player order).
///
/// The expected payoff is affine in the player's own strategy, so it is
/// evaluated as a convex combination of the per-action conditional payoffs.
pub fn best_response(
    game: &Monfg,
    u: &ScalarUtility,
    player: usize,
    opponents: &[MixedStrategy],
    cfg: &BestResponseConfig,
) -> Result<BestResponse> {
    cfg.validate()?;
    if u.arity() != game.objective_count() {
        return Err(invalid(format!(
            "utility '{}' takes {} objectives, game has {}",
            u.label(),
            u.arity(),
            game.objective_count()
        )));
    }
    let rows = game.conditional_payoffs(player, opponents)?;
    let d = game.objective_count();
    let mut payoff: SmallVec<[f64; 16]> = SmallVec::from_elem(0.0, d);
    let found = maximize_on_simplex(rows.len(), cfg, |delta| {
        payoff.iter_mut().for_each(|x| *x = 0.0);
        for (w, row) in delta.iter().zip(&rows) {
            if *w != 0.0 {
                for (o, r) in payoff.iter_mut().zip(row) {
                    *o += w * r;
                }
            }
        }
        u.eval(&payoff)
    });
    Ok(BestResponse { strategy: MixedStrategy::new(found.point)?, utility: found.value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::{monfg_from_continuous, simplex_to_interval, StrategyBijection};
    use crate::game::PayoffTensor;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomial_best_response_is_square_of_opponent() {
        let cg = crate::catalog::polynomial_game();
        let bij = vec![StrategyBijection::interval(-1.0, 1.0).unwrap(); 2];
        let (mo, utils) = monfg_from_continuous(&cg, &bij).unwrap();
        let opp = bij[1].forward(&[0.630]).unwrap();
        let br = best_response(&mo, &utils[0], 0, &[opp], &BestResponseConfig::default()).unwrap();
        let x = simplex_to_interval(br.strategy.probs(), -1.0, 1.0).unwrap();
        assert_abs_diff_eq!(x, 0.3969, epsilon = 2e-3);
        assert_abs_diff_eq!(x, 0.63 * 0.63, epsilon = 1e-6);
    }

    #[test]
    fn linear_utility_picks_dominant_vertex() {
        let t = PayoffTensor::new(vec![3, 2], 1, vec![1.0, 0.0, 4.0, 1.0, 2.0, 2.0]).unwrap();
        let mo = Monfg::shared(t).unwrap();
        let u = ScalarUtility::linear("id", vec![1.0]);
        let opp = MixedStrategy::new(vec![0.7, 0.3]).unwrap();
        let br = best_response(&mo, &u, 0, &[opp], &BestResponseConfig::default()).unwrap();
        assert_eq!(br.strategy.probs(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn balanced_game_tie_prefers_first_action() {
        let (mo, utils) = crate::catalog::example_game(crate::catalog::ExampleGame::Balanced2x2);
        let opp = MixedStrategy::pure(2, 0).unwrap();
        let br = best_response(&mo, &utils[0], 0, &[opp], &BestResponseConfig::default()).unwrap();
        assert_eq!(br.strategy.probs(), &[1.0, 0.0]);
        assert_abs_diff_eq!(br.utility, 10.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_opponents() {
        let (mo, utils) = crate::catalog::example_game(crate::catalog::ExampleGame::Balanced2x2);
        let cfg = BestResponseConfig::default();
        assert!(best_response(&mo, &utils[0], 0, &[], &cfg).is_err());
        let wrong = MixedStrategy::uniform(3).unwrap();
        assert!(best_response(&mo, &utils[0], 0, &[wrong], &cfg).is_err());
    }
}
