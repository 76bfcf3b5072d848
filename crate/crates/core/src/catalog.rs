//! Concrete benchmark games, constructible by name.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::game::{
    identity_payoffs, BoxStrategySet, ContinuousGame, ContinuousUtility, Monfg, PayoffTensor, ScalarUtility,
    StrategySet,
};

/// Two-player zero-sum game on `[-1, 1]^2` with `v1(x, y) = 2xy^2 - x^2 - y`.
pub fn polynomial_game() -> ContinuousGame {
    let set = StrategySet::Box(BoxStrategySet::interval(-1.0, 1.0).expect("valid interval"));
    let v1 = |s: &[f64]| 2.0 * s[0] * s[1] * s[1] - s[0] * s[0] - s[1];
    let utilities: Vec<ContinuousUtility> = vec![Arc::new(v1), Arc::new(move |s: &[f64]| -v1(s))];
    ContinuousGame::new(vec![set.clone(), set], utilities).expect("well-formed game")
}

/// Parameters of the Bertrand price duopoly with three customer types:
/// type 1 buys only from firm x, type 3 only from firm y, and `n` type-2
/// customers split their demand between both firms with elasticity `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BertrandParams {
    pub sigma: f64,
    pub gamma: f64,
    pub n: f64,
    /// Unit production cost.
    pub m: f64,
    /// Non-price demand factor of the linear demand curves.
    pub a: f64,
    pub p_min: f64,
    pub p_max: f64,
}

impl BertrandParams {
    pub fn paper() -> Self {
        Self { sigma: 3.0, gamma: 2.0, n: 2700.0, m: 1.0, a: 50.0, p_min: 1.0, p_max: 30.0 }
    }

    /// Same market with prices restricted to `[4, 30]`.
    pub fn restricted() -> Self {
        Self { p_min: 4.0, ..Self::paper() }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.sigma, self.gamma, self.n, self.m, self.a, self.p_min, self.p_max];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(invalid("Bertrand parameters must be finite"));
        }
        if !(self.p_min > 0.0) {
            return Err(invalid(format!("minimum price must be positive, got {}", self.p_min)));
        }
        if !(self.p_min < self.p_max) {
            return Err(invalid(format!("empty price interval [{}, {}]", self.p_min, self.p_max)));
        }
        if self.sigma == 1.0 {
            return Err(invalid("sigma = 1 makes the type-2 demand exponent undefined"));
        }
        Ok(())
    }
}

impl Default for BertrandParams {
    fn default() -> Self {
        Self::paper()
    }
}

/// Type-2 demand for the firm charging `p` when the rival charges `q`.
fn shared_demand(params: &BertrandParams, p: f64, q: f64) -> f64 {
    let s = params.sigma;
    let composite = p.powf(1.0 - s) + q.powf(1.0 - s);
    params.n * p.powf(-s) * composite.powf((params.gamma - s) / (s - 1.0))
}

fn profit_unchecked(params: &BertrandParams, p: f64, q: f64) -> f64 {
    (p - params.m) * ((params.a - p) + shared_demand(params, p, q))
}

/// Total demand `d_x` of firm x.
pub fn bertrand_demand(params: &BertrandParams, px: f64, py: f64) -> Result<f64> {
    check_prices(px, py)?;
    Ok((params.a - px) + shared_demand(params, px, py))
}

/// Profits `(r_x, r_y)` at prices `(px, py)`.
pub fn bertrand_profits(params: &BertrandParams, px: f64, py: f64) -> Result<(f64, f64)> {
    check_prices(px, py)?;
    Ok((profit_unchecked(params, px, py), profit_unchecked(params, py, px)))
}

fn check_prices(px: f64, py: f64) -> Result<()> {
    if !(px > 0.0 && py > 0.0) {
        return Err(Error::Domain(format!("prices must be positive, got ({px}, {py})")));
    }
    Ok(())
}

/// The duopoly as a continuous game; player 0 is firm x, its strategy the
/// price `p_x`.
pub fn bertrand_game(params: &BertrandParams) -> Result<ContinuousGame> {
    params.validate()?;
    let set = StrategySet::Box(BoxStrategySet::interval(params.p_min, params.p_max)?);
    let p = *params;
    let utilities: Vec<ContinuousUtility> = vec![
        Arc::new(move |s: &[f64]| profit_unchecked(&p, s[0], s[1])),
        Arc::new(move |s: &[f64]| profit_unchecked(&p, s[1], s[0])),
    ];
    ContinuousGame::new(vec![set.clone(), set], utilities)
}

/// The tabulated two-player two-action MONFGs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExampleGame {
    /// The identity game, with `u(p) = 3 p_1 + 3 p_3` (0-based indices 0 and 2).
    Identity2x2,
    /// Payoffs `(3,1)` on the diagonal and `(1,3)` off it; `u(x, y) = x^2 + y^2`.
    Balanced2x2,
    /// Payoffs `(3a, 3b)` for actions `a, b` in `{0, 1}`; `u(p) = p_1 + p_2`.
    Remark1_2x2,
}

impl ExampleGame {
    pub const ALL: [ExampleGame; 3] = [ExampleGame::Identity2x2, ExampleGame::Balanced2x2, ExampleGame::Remark1_2x2];

    pub fn name(self) -> &'static str {
        match self {
            ExampleGame::Identity2x2 => "identity_2x2",
            ExampleGame::Balanced2x2 => "balanced_2x2",
            ExampleGame::Remark1_2x2 => "remark1_2x2",
        }
    }
}

impl fmt::Display for ExampleGame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExampleGame {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.replace('-', "_");
        ExampleGame::ALL
            .into_iter()
            .find(|g| g.name() == key)
            .ok_or_else(|| invalid(format!("unknown example game '{s}'")))
    }
}

pub fn example_game(name: ExampleGame) -> (Monfg, Vec<ScalarUtility>) {
    match name {
        ExampleGame::Identity2x2 => {
            let mo = identity_payoffs(2, &[2, 2]).expect("identity game");
            let u = ScalarUtility::linear("3p1+3p3", vec![3.0, 0.0, 3.0, 0.0]);
            (mo, vec![u.clone(), u])
        }
        ExampleGame::Balanced2x2 => {
            let t = PayoffTensor::new(vec![2, 2], 2, vec![3.0, 1.0, 1.0, 3.0, 1.0, 3.0, 3.0, 1.0]).expect("2x2 tensor");
            let u = ScalarUtility::new("x^2+y^2", 2, |p| p[0] * p[0] + p[1] * p[1]);
            (Monfg::shared(t).expect("shared payoffs"), vec![u.clone(), u])
        }
        ExampleGame::Remark1_2x2 => {
            let t = PayoffTensor::new(vec![2, 2], 2, vec![0.0, 0.0, 0.0, 3.0, 3.0, 0.0, 3.0, 3.0]).expect("2x2 tensor");
            let u = ScalarUtility::linear("p1+p2", vec![1.0, 1.0]);
            (Monfg::shared(t).expect("shared payoffs"), vec![u.clone(), u])
        }
    }
}

/// A catalog game in whichever model it is natively defined in.
#[derive(Debug, Clone)]
pub enum CatalogGame {
    Continuous(ContinuousGame),
    Monfg(Monfg, Vec<ScalarUtility>),
}

/// Every name accepted by [`catalog_game`].
pub const CATALOG_NAMES: [&str; 6] =
    ["polynomial", "bertrand", "bertrand-restricted", "identity-2x2", "balanced-2x2", "remark1-2x2"];

/// Builds a catalog game by name. `bertrand` overrides the price bounds of
/// both Bertrand entries when given.
pub fn catalog_game(name: &str, bertrand: Option<BertrandParams>) -> Result<CatalogGame> {
    match name {
        "polynomial" => Ok(CatalogGame::Continuous(polynomial_game())),
        "bertrand" => bertrand_game(&bertrand.unwrap_or_else(BertrandParams::paper)).map(CatalogGame::Continuous),
        "bertrand-restricted" => {
            bertrand_game(&bertrand.unwrap_or_else(BertrandParams::restricted)).map(CatalogGame::Continuous)
        }
        other => {
            let (mo, utils) = example_game(other.parse()?);
            Ok(CatalogGame::Monfg(mo, utils))
        }
    }
}

/// Default parameters of a Bertrand catalog entry, `None` for other games.
pub fn default_bertrand_params(name: &str) -> Option<BertrandParams> {
    match name {
        "bertrand" => Some(BertrandParams::paper()),
        "bertrand-restricted" => Some(BertrandParams::restricted()),
        _ => None,
    }
}
