//! Two-player multi-objective fictitious play.
//!
//! Each iteration, both players best-respond to the empirical distribution
//! of the other's past actions, sample an action from their best response,
//! and append it to the shared history. Before any action has been observed
//! the empirical strategy is uniform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::best_response::best_response;
use super::search::BestResponseConfig;
use crate::error::{invalid, Error, Result};
use crate::game::{MixedStrategy, Monfg, ScalarUtility};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FpConfig {
    pub iterations: usize,
    pub trials: usize,
    pub seed: u64,
    pub record_every: usize,
}

impl Default for FpConfig {
    fn default() -> Self {
        Self { iterations: 200, trials: 1000, seed: 0, record_every: 1 }
    }
}

impl FpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 || self.trials == 0 {
            return Err(invalid("fictitious play needs at least one iteration and one trial"));
        }
        if self.record_every == 0 {
            return Err(invalid("record_every must be at least 1"));
        }
        Ok(())
    }
}

/// State of one trial after a recorded iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    /// 1-based iteration index.
    pub iteration: usize,
    /// Best responses computed this iteration.
    pub strategies: Vec<MixedStrategy>,
    /// Each player's own empirical action frequencies after this iteration.
    pub empirical: Vec<MixedStrategy>,
    /// Utility of each best response against the empirical opponent.
    pub utilities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub trial: usize,
    /// Generator stream of this trial; with the run seed it fixes the trial.
    pub stream: u64,
    pub points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn last(&self) -> Option<&TrajectoryPoint> {
        self.points.last()
    }

    pub fn at(&self, iteration: usize) -> Option<&TrajectoryPoint> {
        self.points.iter().find(|p| p.iteration == iteration)
    }
}

/// The generator of one trial: a ChaCha stream keyed by `(seed, trial)`, so
/// trials do not depend on scheduling order.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn sample_action<R: Rng + ?Sized>(strategy: &MixedStrategy, rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let probs = strategy.probs();
    for (a, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return a;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
}

fn run_trial(
    game: &Monfg,
    utils: &[ScalarUtility],
    fp: &FpConfig,
    br: &BestResponseConfig,
    trial: usize,
) -> Result<Trajectory> {
    let counts = game.action_counts();
    let mut rng = trial_rng(fp.seed, trial);
    // history[i][a]: how often player i has played action a.
    let mut history: Vec<Vec<u64>> = counts.iter().map(|&k| vec![0; k]).collect();
    let mut points = Vec::with_capacity(fp.iterations / fp.record_every + 1);
    for t in 1..=fp.iterations {
        let empirical: Vec<MixedStrategy> = history
            .iter()
            .map(|h| {
                if t == 1 {
                    MixedStrategy::uniform(h.len())
                } else {
                    let n = (t - 1) as f64;
                    MixedStrategy::new(h.iter().map(|&c| c as f64 / n).collect())
                }
            })
            .collect::<Result<_>>()?;
        let responses = [
            best_response(game, &utils[0], 0, std::slice::from_ref(&empirical[1]), br)?,
            best_response(game, &utils[1], 1, std::slice::from_ref(&empirical[0]), br)?,
        ];
        for (h, r) in history.iter_mut().zip(&responses) {
            h[sample_action(&r.strategy, &mut rng)] += 1;
        }
        if t % fp.record_every == 0 || t == fp.iterations {
            let tf = t as f64;
            points.push(TrajectoryPoint {
                iteration: t,
                empirical: history
                    .iter()
                    .map(|h| MixedStrategy::new(h.iter().map(|&c| c as f64 / tf).collect()))
                    .collect::<Result<_>>()?,
                utilities: responses.iter().map(|r| r.utility).collect(),
                strategies: responses.into_iter().map(|r| r.strategy).collect(),
            });
        }
    }
    Ok(Trajectory { trial, stream: trial as u64, points })
}

/// Runs `fp.trials` independent trials in the current rayon pool. The output
/// is ordered by trial and identical for identical seeds regardless of the
/// pool size.
pub fn fictitious_play(
    game: &Monfg,
    utils: &[ScalarUtility],
    fp: &FpConfig,
    br: &BestResponseConfig,
) -> Result<Vec<Trajectory>> {
    if game.n_players() != 2 {
        return Err(Error::Unsupported(format!(
            "fictitious play is implemented for two players, game has {}",
            game.n_players()
        )));
    }
    game.check_utilities(utils)?;
    fp.validate()?;
    br.validate()?;
    (0..fp.trials).into_par_iter().map(|trial| run_trial(game, utils, fp, br, trial)).collect()
}
