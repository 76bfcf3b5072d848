//! Game representations: multi-objective normal-form games (MONFGs) with
//! vector payoffs, continuous games over box or simplex strategy sets, and
//! the scalarised-expected-returns utility of a mixed strategy.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{invalid, Error, Result};

/// Tolerance on the sum of a probability vector.
pub const SIMPLEX_SUM_TOL: f64 = 1e-9;
/// Negative entries down to this magnitude are treated as rounding noise.
pub const NEGATIVE_CLAMP_TOL: f64 = 1e-12;
/// Membership slack for points on the boundary of a strategy set.
pub const MEMBERSHIP_TOL: f64 = 1e-12;
/// Dense payoff tensors are capped at this many scalars.
pub const MAX_TENSOR_SCALARS: usize = 1_000_000;

/// A point on a probability simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedStrategy {
    probs: Vec<f64>,
}

impl MixedStrategy {
    /// Validates and normalises a probability vector.
    ///
    /// Entries in `[-1e-12, 0)` are clamped to zero and the vector is
    /// renormalised; anything more negative, non-finite, or summing outside
    /// `1 ± 1e-9` is rejected.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(invalid("mixed strategy needs at least one action"));
        }
        let mut probs = probs;
        for (a, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() {
                return Err(invalid(format!("probability of action {a} is not finite")));
            }
            if *p < 0.0 {
                if *p < -NEGATIVE_CLAMP_TOL {
                    return Err(invalid(format!("probability of action {a} is negative ({p})")));
                }
                *p = 0.0;
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_SUM_TOL {
            return Err(invalid(format!("probabilities sum to {sum}, expected 1")));
        }
        probs.iter_mut().for_each(|p| *p /= sum);
        Ok(Self { probs })
    }

    pub fn uniform(actions: usize) -> Result<Self> {
        if actions == 0 {
            return Err(invalid("mixed strategy needs at least one action"));
        }
        Ok(Self { probs: vec![1.0 / actions as f64; actions] })
    }

    /// The degenerate distribution on `action`.
    pub fn pure(actions: usize, action: usize) -> Result<Self> {
        if action >= actions {
            return Err(invalid(format!("action {action} out of range for {actions} actions")));
        }
        let mut probs = vec![0.0; actions];
        probs[action] = 1.0;
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }
}

impl AsRef<[f64]> for MixedStrategy {
    fn as_ref(&self) -> &[f64] {
        &self.probs
    }
}

/// One mixed strategy per player, in player order.
#[derive(Debug, Clone, PartialEq)]
pub struct JointMixedStrategy(pub Vec<MixedStrategy>);

impl JointMixedStrategy {
    pub fn new(per_player: Vec<MixedStrategy>) -> Self {
        Self(per_player)
    }

    pub fn from_vecs(per_player: Vec<Vec<f64>>) -> Result<Self> {
        per_player.into_iter().map(MixedStrategy::new).collect::<Result<Vec<_>>>().map(Self)
    }

    pub fn uniform(action_counts: &[usize]) -> Result<Self> {
        action_counts.iter().map(|&k| MixedStrategy::uniform(k)).collect::<Result<Vec<_>>>().map(Self)
    }

    pub fn players(&self) -> &[MixedStrategy] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Concatenation in ascending player order.
    pub fn concat(&self) -> Vec<f64> {
        self.0.iter().flat_map(|s| s.probs().iter().copied()).collect()
    }

    /// The opponents of `player`, in player order.
    pub fn without(&self, player: usize) -> Vec<MixedStrategy> {
        self.0.iter().enumerate().filter(|(j, _)| *j != player).map(|(_, s)| s.clone()).collect()
    }
}

/// A pure joint action: one 0-based action index per player.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActionProfile(pub Vec<usize>);

/// Calls `f` for every action profile in row-major order.
pub(crate) fn for_each_profile(dims: &[usize], mut f: impl FnMut(usize, &[usize])) {
    if dims.contains(&0) {
        return;
    }
    let mut current = vec![0usize; dims.len()];
    let mut index = 0;
    loop {
        f(index, &current);
        index += 1;
        let mut j = dims.len();
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            current[j] += 1;
            if current[j] < dims[j] {
                break;
            }
            current[j] = 0;
        }
    }
}

/// Dense map from action profiles to payoff vectors of length `objective_count`.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffTensor {
    dims: Vec<usize>,
    objective_count: usize,
    values: Vec<f64>,
}

impl PayoffTensor {
    /// `values` holds one payoff vector per profile, profiles in row-major
    /// order, flattened.
    pub fn new(dims: Vec<usize>, objective_count: usize, values: Vec<f64>) -> Result<Self> {
        if dims.is_empty() {
            return Err(invalid("payoff tensor needs at least one player"));
        }
        if let Some(p) = dims.iter().position(|&d| d == 0) {
            return Err(invalid(format!("player {p} has no actions")));
        }
        if objective_count == 0 {
            return Err(invalid("payoff vectors need at least one objective"));
        }
        let profiles = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::TooLarge("profile count overflows".into()))?;
        let scalars = profiles.checked_mul(objective_count).filter(|&s| s <= MAX_TENSOR_SCALARS).ok_or_else(|| {
            Error::TooLarge(format!(
                "{profiles} profiles x {objective_count} objectives exceeds {MAX_TENSOR_SCALARS} scalars"
            ))
        })?;
        if values.len() != scalars {
            return Err(invalid(format!("expected {scalars} payoff scalars, got {}", values.len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("payoff scalar {i} is not finite")));
        }
        Ok(Self { dims, objective_count, values })
    }

    /// Builds a tensor from a function of the action profile.
    pub fn from_fn(dims: Vec<usize>, objective_count: usize, mut f: impl FnMut(&[usize]) -> Vec<f64>) -> Result<Self> {
        let scalars = dims.iter().try_fold(objective_count, |acc, &d| acc.checked_mul(d));
        if scalars.is_none_or(|s| s > MAX_TENSOR_SCALARS) {
            return Err(Error::TooLarge(format!("payoff tensor exceeds {MAX_TENSOR_SCALARS} scalars")));
        }
        let mut values = Vec::with_capacity(scalars.unwrap_or(0));
        let mut bad = None;
        for_each_profile(&dims, |i, a| {
            let v = f(a);
            if v.len() != objective_count && bad.is_none() {
                bad = Some((i, v.len()));
            }
            values.extend(v);
        });
        if let Some((i, len)) = bad {
            return Err(invalid(format!("profile {i} has a payoff of length {len}, expected {objective_count}")));
        }
        Self::new(dims, objective_count, values)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn objective_count(&self) -> usize {
        self.objective_count
    }

    pub fn profile_count(&self) -> usize {
        self.values.len() / self.objective_count
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn index_of(&self, profile: &[usize]) -> Result<usize> {
        if profile.len() != self.dims.len() {
            return Err(invalid(format!(
                "profile has {} actions, game has {} players",
                profile.len(),
                self.dims.len()
            )));
        }
        let mut index = 0;
        for (j, (&a, &d)) in profile.iter().zip(&self.dims).enumerate() {
            if a >= d {
                return Err(invalid(format!("action {a} out of range for player {j} ({d} actions)")));
            }
            index = index * d + a;
        }
        Ok(index)
    }

    pub fn get(&self, profile: &[usize]) -> Result<&[f64]> {
        let i = self.index_of(profile)?;
        Ok(self.entry(i))
    }

    pub(crate) fn entry(&self, index: usize) -> &[f64] {
        let d = self.objective_count;
        &self.values[index * d..(index + 1) * d]
    }
}

/// A finite multi-objective normal-form game.
#[derive(Debug, Clone, PartialEq)]
pub struct Monfg {
    payoffs: Vec<PayoffTensor>,
}

impl Monfg {
    pub fn new(payoffs: Vec<PayoffTensor>) -> Result<Self> {
        let first = payoffs.first().ok_or_else(|| invalid("game needs at least one player"))?;
        if first.dims.len() != payoffs.len() {
            return Err(invalid(format!(
                "{} payoff tensors for a {}-player action space",
                payoffs.len(),
                first.dims.len()
            )));
        }
        for (i, t) in payoffs.iter().enumerate().skip(1) {
            if t.dims != first.dims || t.objective_count != first.objective_count {
                return Err(invalid(format!("payoff tensor of player {i} has a different shape")));
            }
        }
        Ok(Self { payoffs })
    }

    /// The same payoff tensor for all players.
    pub fn shared(tensor: PayoffTensor) -> Result<Self> {
        let n = tensor.dims.len();
        Self::new(vec![tensor; n])
    }

    pub fn n_players(&self) -> usize {
        self.payoffs.len()
    }

    pub fn action_counts(&self) -> &[usize] {
        &self.payoffs[0].dims
    }

    pub fn objective_count(&self) -> usize {
        self.payoffs[0].objective_count
    }

    pub fn payoffs(&self) -> &[PayoffTensor] {
        &self.payoffs
    }

    pub fn payoff(&self, player: usize) -> Result<&PayoffTensor> {
        self.payoffs
            .get(player)
            .ok_or_else(|| invalid(format!("player {player} out of range for {} players", self.n_players())))
    }

    fn check_joint(&self, joint: &JointMixedStrategy) -> Result<()> {
        if joint.len() != self.n_players() {
            return Err(invalid(format!("joint strategy has {} players, game has {}", joint.len(), self.n_players())));
        }
        for (j, (s, &k)) in joint.players().iter().zip(self.action_counts()).enumerate() {
            if s.len() != k {
                return Err(invalid(format!("player {j} strategy has {} entries, expected {k}", s.len())));
            }
        }
        Ok(())
    }

    /// Expected payoff vector of `player` under the product distribution
    /// `joint`, summed exactly over all profiles.
    pub fn expected_payoff(&self, player: usize, joint: &JointMixedStrategy) -> Result<Vec<f64>> {
        self.payoff(player)?;
        self.check_joint(joint)?;
        let strategies: Vec<&[f64]> = joint.players().iter().map(|s| s.probs()).collect();
        let mut out = vec![0.0; self.objective_count()];
        self.expected_payoff_into(player, &strategies, &mut out);
        Ok(out)
    }

    /// Unchecked kernel behind [`Monfg::expected_payoff`]. `strategies` must
    /// match the action counts and `out` the objective count.
    pub(crate) fn expected_payoff_into(&self, player: usize, strategies: &[&[f64]], out: &mut [f64]) {
        let tensor = &self.payoffs[player];
        out.iter_mut().for_each(|x| *x = 0.0);
        for_each_profile(&tensor.dims, |index, profile| {
            let w: f64 = profile.iter().zip(strategies).map(|(&a, s)| s[a]).product();
            if w != 0.0 {
                for (o, &p) in out.iter_mut().zip(tensor.entry(index)) {
                    *o += w * p;
                }
            }
        });
    }

    /// Expected payoff of each own action of `player` against `opponents`
    /// (all other players, in player order). The expected payoff of any own
    /// mixed strategy is the corresponding convex combination of these rows.
    pub fn conditional_payoffs(&self, player: usize, opponents: &[MixedStrategy]) -> Result<Vec<Vec<f64>>> {
        let tensor = self.payoff(player)?;
        let n = self.n_players();
        if opponents.len() + 1 != n {
            return Err(invalid(format!("expected {} opponent strategies, got {}", n - 1, opponents.len())));
        }
        let mut opp = opponents.iter();
        let mut strategies: Vec<&[f64]> = Vec::with_capacity(n);
        for (j, &k) in self.action_counts().iter().enumerate() {
            if j == player {
                strategies.push(&[]);
                continue;
            }
            let s = opp.next().expect("length checked");
            if s.len() != k {
                return Err(invalid(format!("player {j} strategy has {} entries, expected {k}", s.len())));
            }
            strategies.push(s.probs());
        }
        let d = self.objective_count();
        let mut rows = vec![vec![0.0; d]; self.action_counts()[player]];
        for_each_profile(&tensor.dims, |index, profile| {
            let w: f64 =
                profile.iter().enumerate().filter(|(j, _)| *j != player).map(|(j, &a)| strategies[j][a]).product();
            if w != 0.0 {
                for (o, &p) in rows[profile[player]].iter_mut().zip(tensor.entry(index)) {
                    *o += w * p;
                }
            }
        });
        Ok(rows)
    }

    /// Utility of `joint` for `player`: the scalarisation applied to the
    /// expected payoff vector.
    pub fn strategy_utility(&self, u: &ScalarUtility, player: usize, joint: &JointMixedStrategy) -> Result<f64> {
        if u.arity() != self.objective_count() {
            return Err(invalid(format!(
                "utility '{}' takes {} objectives, game has {}",
                u.label(),
                u.arity(),
                self.objective_count()
            )));
        }
        let payoff = self.expected_payoff(player, joint)?;
        Ok(u.eval(&payoff))
    }

    pub(crate) fn check_utilities(&self, utils: &[ScalarUtility]) -> Result<()> {
        if utils.len() != self.n_players() {
            return Err(invalid(format!("{} utilities for {} players", utils.len(), self.n_players())));
        }
        for (i, u) in utils.iter().enumerate() {
            if u.arity() != self.objective_count() {
                return Err(invalid(format!(
                    "utility of player {i} takes {} objectives, game has {}",
                    u.arity(),
                    self.objective_count()
                )));
            }
        }
        Ok(())
    }
}

/// Payoffs whose value at every pure profile is the concatenated one-hot
/// encoding of that profile, shared by all players. The expected payoff of
/// any joint mixed strategy is then the concatenated strategy itself.
pub fn identity_payoffs(n_players: usize, action_counts: &[usize]) -> Result<Monfg> {
    if n_players == 0 {
        return Err(invalid("identity game needs at least one player"));
    }
    if action_counts.len() != n_players {
        return Err(invalid(format!("{} action counts for {n_players} players", action_counts.len())));
    }
    if let Some(p) = action_counts.iter().position(|&k| k == 0) {
        return Err(invalid(format!("player {p} has no actions")));
    }
    let d: usize = action_counts.iter().sum();
    let offsets: Vec<usize> = action_counts
        .iter()
        .scan(0, |acc, &k| {
            let o = *acc;
            *acc += k;
            Some(o)
        })
        .collect();
    let tensor = PayoffTensor::from_fn(action_counts.to_vec(), d, |profile| {
        let mut v = vec![0.0; d];
        for (&a, &o) in profile.iter().zip(&offsets) {
            v[o + a] = 1.0;
        }
        v
    })?;
    Monfg::shared(tensor)
}

type UtilityFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A scalarisation `R^d -> R` of payoff vectors.
#[derive(Clone)]
pub struct ScalarUtility {
    arity: usize,
    label: String,
    eval: Arc<UtilityFn>,
}

impl ScalarUtility {
    pub fn new(label: impl Into<String>, arity: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self { arity, label: label.into(), eval: Arc::new(f) }
    }

    pub fn constant(arity: usize, c: f64) -> Self {
        Self::new(format!("{c}"), arity, move |_| c)
    }

    /// Weighted sum of the objectives.
    pub fn linear(label: impl Into<String>, weights: Vec<f64>) -> Self {
        let arity = weights.len();
        Self::new(label, arity, move |x| weights.iter().zip(x).map(|(w, v)| w * v).sum())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Evaluates without checking the arity.
    #[inline]
    pub fn eval(&self, payoff: &[f64]) -> f64 {
        debug_assert_eq!(payoff.len(), self.arity);
        (self.eval)(payoff)
    }

    pub fn try_eval(&self, payoff: &[f64]) -> Result<f64> {
        if payoff.len() != self.arity {
            return Err(invalid(format!(
                "utility '{}' takes {} objectives, got {}",
                self.label,
                self.arity,
                payoff.len()
            )));
        }
        Ok(self.eval(payoff))
    }

    /// The same utility plus a constant offset.
    pub fn shifted(&self, offset: f64) -> Self {
        let inner = Arc::clone(&self.eval);
        Self::new(format!("{} + {offset}", self.label), self.arity, move |x| inner(x) + offset)
    }
}

impl fmt::Debug for ScalarUtility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarUtility").field("label", &self.label).field("arity", &self.arity).finish()
    }
}

/// Axis-aligned box `[lower, upper]` in `R^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxStrategySet {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxStrategySet {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(invalid("box bounds have different lengths"));
        }
        if lower.is_empty() {
            return Err(Error::Degenerate("box has dimension 0".into()));
        }
        for (j, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if !l.is_finite() || !u.is_finite() {
                return Err(invalid(format!("bound {j} is not finite")));
            }
            if l >= u {
                return Err(invalid(format!("empty interior in dimension {j}: [{l}, {u}]")));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo], vec![hi])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(l, u)| 0.5 * (l + u)).collect()
    }

    pub fn contains(&self, point: &[f64], tol: f64) -> bool {
        point.len() == self.dim()
            && point.iter().zip(self.lower.iter().zip(&self.upper)).all(|(x, (l, u))| *x >= l - tol && *x <= u + tol)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(l, u)| l + (u - l) * rng.gen::<f64>()).collect()
    }
}

/// The pure-strategy set of one player in a continuous game.
#[derive(Debug, Clone, PartialEq)]
pub enum StrategySet {
    Box(BoxStrategySet),
    /// The probability simplex with `vertices` vertices, embedded in
    /// `R^vertices`.
    Simplex {
        vertices: usize,
    },
}

impl StrategySet {
    /// Length of a point in this set.
    pub fn dim(&self) -> usize {
        match self {
            StrategySet::Box(b) => b.dim(),
            StrategySet::Simplex { vertices } => *vertices,
        }
    }

    pub fn as_box(&self) -> Option<&BoxStrategySet> {
        match self {
            StrategySet::Box(b) => Some(b),
            StrategySet::Simplex { .. } => None,
        }
    }

    /// Checks membership, naming the player and offending coordinate.
    pub fn check_member(&self, player: usize, point: &[f64]) -> Result<()> {
        if point.len() != self.dim() {
            return Err(invalid(format!(
                "player {player} strategy has {} coordinates, expected {}",
                point.len(),
                self.dim()
            )));
        }
        let (lower, upper): (&[f64], &[f64]) = match self {
            StrategySet::Box(b) => (&b.lower, &b.upper),
            StrategySet::Simplex { .. } => (&[], &[]),
        };
        for (dim, &value) in point.iter().enumerate() {
            let (lo, hi) = match self {
                StrategySet::Box(_) => (lower[dim], upper[dim]),
                StrategySet::Simplex { .. } => (0.0, 1.0),
            };
            if !value.is_finite() || value < lo - MEMBERSHIP_TOL || value > hi + MEMBERSHIP_TOL {
                return Err(Error::OutOfBox { player, dim, value, lower: lo, upper: hi });
            }
        }
        if let StrategySet::Simplex { .. } = self {
            let sum: f64 = point.iter().sum();
            if (sum - 1.0).abs() > SIMPLEX_SUM_TOL {
                return Err(Error::Domain(format!("player {player} simplex point sums to {sum}")));
            }
        }
        Ok(())
    }

    /// Uniform sample: uniform on the box, or flat Dirichlet on the simplex.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            StrategySet::Box(b) => b.sample(rng),
            StrategySet::Simplex { vertices } => sample_simplex(*vertices, rng),
        }
    }
}

/// Uniform sample from the probability simplex with `vertices` vertices.
pub fn sample_simplex<R: Rng + ?Sized>(vertices: usize, rng: &mut R) -> Vec<f64> {
    let mut x: Vec<f64> = (0..vertices).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= s);
    x
}

/// Utility of one player over the concatenated joint pure strategy.
pub type ContinuousUtility = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A continuous game: per-player strategy sets and scalar utilities of the
/// joint pure strategy.
#[derive(Clone)]
pub struct ContinuousGame {
    strategy_sets: Vec<StrategySet>,
    utilities: Vec<ContinuousUtility>,
    offsets: Vec<usize>,
}

impl ContinuousGame {
    pub fn new(strategy_sets: Vec<StrategySet>, utilities: Vec<ContinuousUtility>) -> Result<Self> {
        if strategy_sets.is_empty() {
            return Err(invalid("game needs at least one player"));
        }
        if strategy_sets.len() != utilities.len() {
            return Err(invalid(format!("{} strategy sets for {} utilities", strategy_sets.len(), utilities.len())));
        }
        let mut offsets = Vec::with_capacity(strategy_sets.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for s in &strategy_sets {
            acc += s.dim();
            offsets.push(acc);
        }
        Ok(Self { strategy_sets, utilities, offsets })
    }

    pub fn n_players(&self) -> usize {
        self.strategy_sets.len()
    }

    pub fn strategy_sets(&self) -> &[StrategySet] {
        &self.strategy_sets
    }

    pub fn strategy_set(&self, player: usize) -> Result<&StrategySet> {
        self.strategy_sets
            .get(player)
            .ok_or_else(|| invalid(format!("player {player} out of range for {} players", self.n_players())))
    }

    /// Length of the concatenated joint pure strategy.
    pub fn joint_dim(&self) -> usize {
        *self.offsets.last().expect("at least one player")
    }

    /// Range of `player`'s coordinates in the concatenated joint strategy.
    pub fn coords(&self, player: usize) -> std::ops::Range<usize> {
        self.offsets[player]..self.offsets[player + 1]
    }

    /// `v_i(s)`, after checking every component lies in its strategy set.
    pub fn utility(&self, player: usize, joint_pure: &[Vec<f64>]) -> Result<f64> {
        self.strategy_set(player)?;
        let flat = self.flatten(joint_pure)?;
        Ok(self.utility_flat(player, &flat))
    }

    /// Validates a joint pure strategy and concatenates it.
    pub fn flatten(&self, joint_pure: &[Vec<f64>]) -> Result<Vec<f64>> {
        if joint_pure.len() != self.n_players() {
            return Err(invalid(format!(
                "joint strategy has {} players, game has {}",
                joint_pure.len(),
                self.n_players()
            )));
        }
        for (j, (s, set)) in joint_pure.iter().zip(&self.strategy_sets).enumerate() {
            set.check_member(j, s)?;
        }
        Ok(joint_pure.concat())
    }

    /// `v_i` on a concatenated joint strategy, without membership checks.
    #[inline]
    pub fn utility_flat(&self, player: usize, flat: &[f64]) -> f64 {
        (self.utilities[player])(flat)
    }

    pub fn utilities(&self) -> &[ContinuousUtility] {
        &self.utilities
    }

    pub fn sample_joint<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Vec<f64>> {
        self.strategy_sets.iter().map(|s| s.sample(rng)).collect()
    }

    /// Samples `n` joint strategies and checks every utility is finite.
    pub fn spot_check<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<()> {
        for _ in 0..n {
            let flat = self.sample_joint(rng).concat();
            for i in 0..self.n_players() {
                let v = self.utility_flat(i, &flat);
                if !v.is_finite() {
                    return Err(Error::Domain(format!("utility of player {i} is {v} at {flat:?}")));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ContinuousGame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContinuousGame").field("strategy_sets", &self.strategy_sets).finish_non_exhaustive()
    }
}
