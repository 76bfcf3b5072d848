//! Strategy bijections: homeomorphisms from a continuous strategy set onto a
//! probability simplex.

use rand::Rng;

use super::convex::{ConvexBody, SimplexChart};
use crate::error::{invalid, Error, Result};
use crate::game::{sample_simplex, BoxStrategySet, MixedStrategy, StrategySet, MEMBERSHIP_TOL};

/// Affine map of `[lo, hi]` onto the 1-simplex: `s -> (t, 1 - t)` with
/// `t = (s - lo) / (hi - lo)`.
pub fn interval_to_simplex(s: f64, lo: f64, hi: f64) -> Result<MixedStrategy> {
    check_interval(lo, hi)?;
    if !s.is_finite() || s < lo - MEMBERSHIP_TOL || s > hi + MEMBERSHIP_TOL {
        return Err(Error::Domain(format!("{s} lies outside [{lo}, {hi}]")));
    }
    let t = ((s - lo) / (hi - lo)).clamp(0.0, 1.0);
    MixedStrategy::new(vec![t, 1.0 - t])
}

/// Inverse of [`interval_to_simplex`]: `lo + δ_0 (hi - lo)`.
pub fn simplex_to_interval(delta: &[f64], lo: f64, hi: f64) -> Result<f64> {
    check_interval(lo, hi)?;
    if delta.len() != 2 {
        return Err(invalid(format!("expected a 1-simplex point, got {} entries", delta.len())));
    }
    MixedStrategy::new(delta.to_vec())?;
    Ok(lo + delta[0] * (hi - lo))
}

fn check_interval(lo: f64, hi: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(invalid(format!("[{lo}, {hi}] is not a proper interval")));
    }
    Ok(())
}

#[derive(Debug, Clone)]
enum Kind {
    Interval { lo: f64, hi: f64, flipped: bool },
    Identity,
    ViaBall { source: ConvexBody, chart: SimplexChart, simplex: ConvexBody },
}

/// A continuous bijection `φ_i` from a player's strategy set onto the
/// simplex of mixed strategies, together with its inverse.
#[derive(Debug, Clone)]
pub struct StrategyBijection {
    domain: StrategySet,
    vertices: usize,
    kind: Kind,
}

impl StrategyBijection {
    /// The affine interval map used for one-dimensional strategy sets.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        let domain = StrategySet::Box(BoxStrategySet::interval(lo, hi)?);
        Ok(Self { domain, vertices: 2, kind: Kind::Interval { lo, hi, flipped: false } })
    }

    /// The interval map with the simplex vertices swapped: `s -> (1 - t, t)`.
    pub fn interval_flipped(lo: f64, hi: f64) -> Result<Self> {
        let domain = StrategySet::Box(BoxStrategySet::interval(lo, hi)?);
        Ok(Self { domain, vertices: 2, kind: Kind::Interval { lo, hi, flipped: true } })
    }

    /// Identity on a simplex strategy set.
    pub fn identity(vertices: usize) -> Result<Self> {
        if vertices == 0 {
            return Err(Error::Degenerate("simplex with no vertices".into()));
        }
        Ok(Self { domain: StrategySet::Simplex { vertices }, vertices, kind: Kind::Identity })
    }

    /// Homeomorphism from a `k`-dimensional box onto the `k`-simplex.
    ///
    /// One-dimensional boxes use the affine interval map. Higher dimensions
    /// compose box -> unit ball -> simplex, with the simplex handled in
    /// orthonormal coordinates of its affine hull, centred at the barycentre.
    pub fn box_to_simplex(b: &BoxStrategySet) -> Result<Self> {
        match b.dim() {
            0 => Err(Error::Degenerate("box has dimension 0".into())),
            1 => Self::interval(b.lower()[0], b.upper()[0]),
            k => {
                let source = ConvexBody::from_box(b)?;
                let chart = SimplexChart::new(k + 1)?;
                let simplex = chart.body()?;
                Ok(Self {
                    domain: StrategySet::Box(b.clone()),
                    vertices: k + 1,
                    kind: Kind::ViaBall { source, chart, simplex },
                })
            }
        }
    }

    pub fn domain(&self) -> &StrategySet {
        &self.domain
    }

    /// Number of simplex vertices, i.e. actions of the MONFG player.
    pub fn codomain_dim(&self) -> usize {
        self.vertices
    }

    pub fn forward(&self, s: &[f64]) -> Result<MixedStrategy> {
        self.domain.check_member(0, s).map_err(|e| Error::Domain(e.to_string()))?;
        match &self.kind {
            Kind::Interval { lo, hi, flipped } => {
                let m = interval_to_simplex(s[0], *lo, *hi)?;
                if *flipped {
                    let p = m.probs();
                    MixedStrategy::new(vec![p[1], p[0]])
                } else {
                    Ok(m)
                }
            }
            Kind::Identity => MixedStrategy::new(s.to_vec()),
            Kind::ViaBall { source, chart, simplex } => {
                let ball = source.body_to_ball(s)?;
                let coords = simplex.ball_to_body(&ball)?;
                let mut lifted = chart.lift(&coords);
                // The gauge is resolved to 1e-10, so boundary images can sit a
                // hair outside the simplex.
                lifted.iter_mut().for_each(|x| *x = x.max(0.0));
                let sum: f64 = lifted.iter().sum();
                lifted.iter_mut().for_each(|x| *x /= sum);
                MixedStrategy::new(lifted)
            }
        }
    }

    pub fn inverse(&self, delta: &[f64]) -> Result<Vec<f64>> {
        if delta.len() != self.vertices {
            return Err(invalid(format!("expected {} simplex coordinates, got {}", self.vertices, delta.len())));
        }
        MixedStrategy::new(delta.to_vec())?;
        let mut out = vec![0.0; self.domain.dim()];
        self.inverse_into(delta, &mut out)?;
        Ok(out)
    }

    /// Inverse without validating `delta`; writes the pure strategy to `out`.
    pub(crate) fn inverse_into(&self, delta: &[f64], out: &mut [f64]) -> Result<()> {
        match &self.kind {
            Kind::Interval { lo, hi, flipped } => {
                let t = if *flipped { delta[1] } else { delta[0] };
                out[0] = lo + t * (hi - lo);
            }
            Kind::Identity => out.copy_from_slice(delta),
            Kind::ViaBall { source, chart, simplex } => {
                let coords = chart.project(delta);
                let ball = simplex.body_to_ball(&coords)?;
                let s = source.ball_to_body(&ball)?;
                out.copy_from_slice(&s);
            }
        }
        Ok(())
    }

    /// Largest sup-norm round-trip errors over `n` random domain points and
    /// `n` random simplex points, as `(domain, simplex)`.
    pub fn round_trip_errors<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<(f64, f64)> {
        let mut domain_err: f64 = 0.0;
        let mut simplex_err: f64 = 0.0;
        for _ in 0..n {
            let s = self.domain.sample(rng);
            let back = self.inverse(self.forward(&s)?.probs())?;
            domain_err = domain_err.max(sup_dist(&s, &back));
            let d = sample_simplex(self.vertices, rng);
            let again = self.forward(&self.inverse(&d)?)?;
            simplex_err = simplex_err.max(sup_dist(&d, again.probs()));
        }
        Ok((domain_err, simplex_err))
    }
}

pub(crate) fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
