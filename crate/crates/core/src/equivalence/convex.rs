//! Homeomorphisms between compact convex bodies and the closed unit ball,
//! built from the Minkowski gauge of the body.
//!
//! For a body `C` containing the origin in its interior (after translating by
//! an interior point), `f(x) = x / |x|` maps the boundary onto the sphere and
//! `f^-1(u) = u / p(u)` goes back, where `p` is the gauge. The ball map is
//! `k(x) = |x| f^-1(x / |x|)` with `k(0) = 0`; its inverse sends `y` to the ball
//! point with direction `y / |y|` and norm `p(y)`.

use std::num::NonZeroUsize;
use std::sync::Arc;

use lru::LruCache;
use parking_lot::Mutex;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::game::BoxStrategySet;

/// Absolute precision of the gauge value.
pub const MINKOWSKI_TOL: f64 = 1e-10;
/// Bisection budget for one gauge evaluation.
pub const MINKOWSKI_MAX_ITERS: usize = 200;
/// The search ray may be doubled this many times before the body is declared unbounded.
pub const MINKOWSKI_MAX_DOUBLINGS: u32 = 10;
/// Directions are rounded to this grid when used as cache keys.
pub const CACHE_DIRECTION_STEP: f64 = 1e-6;
/// Default gauge cache capacity.
pub const DEFAULT_CACHE_CAPACITY: usize = 100_000;
/// Slack for the unit-ball precondition of [`ConvexBody::ball_to_body`].
pub const BALL_TOL: f64 = 1e-12;

type Membership = dyn Fn(&[f64]) -> bool + Send + Sync;

struct RadialCache {
    entries: Mutex<LruCache<Vec<i64>, f64>>,
}

impl RadialCache {
    fn new(capacity: usize) -> Self {
        let cap = NonZeroUsize::new(capacity.max(1)).expect("nonzero");
        Self { entries: Mutex::new(LruCache::new(cap)) }
    }

    fn key(direction: &[f64]) -> Vec<i64> {
        direction.iter().map(|x| (x / CACHE_DIRECTION_STEP).round() as i64).collect()
    }
}

/// A compact convex body given by a membership oracle and a point strictly
/// inside it.
#[derive(Clone)]
pub struct ConvexBody {
    dim: usize,
    interior: Vec<f64>,
    extent: f64,
    membership: Arc<Membership>,
    cache: Option<Arc<RadialCache>>,
}

impl std::fmt::Debug for ConvexBody {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConvexBody")
            .field("dim", &self.dim)
            .field("interior", &self.interior)
            .field("extent", &self.extent)
            .field("cached", &self.cache.is_some())
            .finish()
    }
}

impl ConvexBody {
    /// `extent` must bound the diameter of the body; it seeds the bracket of
    /// the gauge search.
    pub fn new(
        dim: usize,
        interior_point: Vec<f64>,
        extent: f64,
        membership: impl Fn(&[f64]) -> bool + Send + Sync + 'static,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Degenerate("convex body of dimension 0".into()));
        }
        if interior_point.len() != dim {
            return Err(invalid(format!("interior point has {} coordinates, body has {dim}", interior_point.len())));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(invalid(format!("extent must be positive and finite, got {extent}")));
        }
        if !membership(&interior_point) {
            return Err(invalid("interior point is not a member of the body"));
        }
        Ok(Self { dim, interior: interior_point, extent, membership: Arc::new(membership), cache: None })
    }

    pub fn unit_ball(dim: usize) -> Result<Self> {
        Self::new(dim, vec![0.0; dim], 2.0, |x| x.iter().map(|v| v * v).sum::<f64>() <= 1.0)
    }

    pub fn from_box(b: &BoxStrategySet) -> Result<Self> {
        let lower = b.lower().to_vec();
        let upper = b.upper().to_vec();
        let extent = lower.iter().zip(&upper).map(|(l, u)| (u - l).powi(2)).sum::<f64>().sqrt();
        Self::new(b.dim(), b.center(), extent, move |x| {
            x.iter().zip(lower.iter().zip(&upper)).all(|(v, (l, u))| v >= l && v <= u)
        })
    }

    /// Memoises gauge values per direction rounded to `1e-6`, with LRU
    /// eviction beyond `capacity` entries. Cached values are only accurate to
    /// the rounding of the direction.
    pub fn with_cache(mut self, capacity: usize) -> Self {
        self.cache = Some(Arc::new(RadialCache::new(capacity)));
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn interior_point(&self) -> &[f64] {
        &self.interior
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dim && (self.membership)(point)
    }

    /// Membership with a relative shrink toward the interior point, so
    /// boundary points carrying rounding error still count.
    fn contains_loosely(&self, point: &[f64]) -> bool {
        if self.contains(point) {
            return true;
        }
        let shrunk: Vec<f64> = point.iter().zip(&self.interior).map(|(p, c)| c + (p - c) * (1.0 - 1e-9)).collect();
        self.contains(&shrunk)
    }

    /// Samples member pairs from the bounding cube and checks their
    /// midpoints are members. Returns the number of pairs tested.
    pub fn spot_check_convexity<R: Rng + ?Sized>(&self, pairs: usize, rng: &mut R) -> Result<usize> {
        let mut members = Vec::new();
        let mut attempts = 0;
        while members.len() < 2 * pairs && attempts < 200 * pairs.max(1) {
            attempts += 1;
            let p: Vec<f64> = self.interior.iter().map(|c| c + self.extent * (2.0 * rng.gen::<f64>() - 1.0)).collect();
            if self.contains(&p) {
                members.push(p);
            }
        }
        let mut tested = 0;
        for pair in members.chunks_exact(2) {
            let mid: Vec<f64> = pair[0].iter().zip(&pair[1]).map(|(a, b)| 0.5 * (a + b)).collect();
            if !self.contains_loosely(&mid) {
                return Err(Error::Domain(format!("midpoint {mid:?} of two members is outside the body")));
            }
            tested += 1;
        }
        Ok(tested)
    }

    /// Distance from the interior point to the boundary along the unit
    /// vector `direction`.
    fn radial(&self, direction: &[f64]) -> Result<f64> {
        if let Some(cache) = &self.cache {
            let key = RadialCache::key(direction);
            if let Some(&r) = cache.entries.lock().get(&key) {
                return Ok(r);
            }
            let r = self.radial_search(direction)?;
            cache.entries.lock().put(key, r);
            return Ok(r);
        }
        self.radial_search(direction)
    }

    fn radial_search(&self, direction: &[f64]) -> Result<f64> {
        let mut point = vec![0.0; self.dim];
        let mut inside = |r: f64| {
            for ((p, c), u) in point.iter_mut().zip(&self.interior).zip(direction) {
                *p = c + r * u;
            }
            (self.membership)(&point)
        };
        // Bracket [inner, outer]: inner is a member distance, outer is not.
        let mut outer = 2.0 * self.extent;
        let mut doublings = 0;
        while inside(outer) {
            if doublings == MINKOWSKI_MAX_DOUBLINGS {
                return Err(Error::UnboundedBody { doublings });
            }
            outer *= 2.0;
            doublings += 1;
        }
        let mut inner = 0.0;
        // Stop once the gauge of a unit vector, 1/r, is pinned to the tolerance.
        for _ in 0..MINKOWSKI_MAX_ITERS {
            if inner > 0.0 && 1.0 / inner - 1.0 / outer <= MINKOWSKI_TOL {
                break;
            }
            let mid = 0.5 * (inner + outer);
            if mid <= inner || mid >= outer {
                break;
            }
            if inside(mid) {
                inner = mid;
            } else {
                outer = mid;
            }
        }
        if inner == 0.0 {
            return Err(Error::Degenerate("interior point lies on the boundary".into()));
        }
        Ok(0.5 * (inner + outer))
    }

    /// Gauge `p(y) = inf { λ > 0 : y ∈ λ (C - c) }` of a vector `y` given
    /// relative to the interior point `c`.
    pub fn minkowski(&self, y: &[f64]) -> Result<f64> {
        self.check_len(y)?;
        let norm = norm(y);
        if norm == 0.0 {
            return Err(Error::Domain("gauge is undefined at the origin".into()));
        }
        let direction: Vec<f64> = y.iter().map(|v| v / norm).collect();
        Ok(norm / self.radial(&direction)?)
    }

    /// `f^-1`: the boundary point (relative to the interior point) on the ray
    /// through `y`.
    pub fn boundary_point(&self, y: &[f64]) -> Result<Vec<f64>> {
        let p = self.minkowski(y)?;
        Ok(y.iter().map(|v| v / p).collect())
    }

    /// Maps the closed unit ball onto the body; the centre goes to the
    /// interior point.
    pub fn ball_to_body(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        let norm = norm(x);
        if norm > 1.0 + BALL_TOL {
            return Err(Error::Domain(format!("point of norm {norm} lies outside the unit ball")));
        }
        if norm == 0.0 {
            return Ok(self.interior.clone());
        }
        let direction: Vec<f64> = x.iter().map(|v| v / norm).collect();
        let r = self.radial(&direction)?;
        Ok(self.interior.iter().zip(&direction).map(|(c, u)| c + norm * r * u).collect())
    }

    /// Inverse of [`ConvexBody::ball_to_body`].
    pub fn body_to_ball(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_len(y)?;
        if !self.contains_loosely(y) {
            return Err(Error::Domain(format!("{y:?} is not a member of the body")));
        }
        let rel: Vec<f64> = y.iter().zip(&self.interior).map(|(a, c)| a - c).collect();
        let norm = norm(&rel);
        if norm == 0.0 {
            return Ok(vec![0.0; self.dim]);
        }
        let direction: Vec<f64> = rel.iter().map(|v| v / norm).collect();
        let r = self.radial(&direction)?;
        let scale = (norm / r).min(1.0);
        Ok(direction.iter().map(|u| scale * u).collect())
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(invalid(format!("point has {} coordinates, body has {}", x.len(), self.dim)));
        }
        Ok(())
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Orthonormal coordinates on the affine hull of the probability simplex
/// with `vertices` vertices, centred at the barycentre.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexChart {
    vertices: usize,
    basis: Vec<Vec<f64>>,
}

impl SimplexChart {
    pub fn new(vertices: usize) -> Result<Self> {
        if vertices < 2 {
            return Err(Error::Degenerate(format!("simplex with {vertices} vertex has no interior")));
        }
        // Helmert basis of the sum-zero hyperplane.
        let basis = (1..vertices)
            .map(|j| {
                let scale = ((j * (j + 1)) as f64).sqrt();
                (0..vertices)
                    .map(|i| match i.cmp(&j) {
                        std::cmp::Ordering::Less => 1.0 / scale,
                        std::cmp::Ordering::Equal => -(j as f64) / scale,
                        std::cmp::Ordering::Greater => 0.0,
                    })
                    .collect()
            })
            .collect();
        Ok(Self { vertices, basis })
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    /// Dimension of the chart, one less than the vertex count.
    pub fn dim(&self) -> usize {
        self.vertices - 1
    }

    pub fn lift(&self, coords: &[f64]) -> Vec<f64> {
        let mut out = vec![1.0 / self.vertices as f64; self.vertices];
        for (c, b) in coords.iter().zip(&self.basis) {
            for (o, v) in out.iter_mut().zip(b) {
                *o += c * v;
            }
        }
        out
    }

    pub fn project(&self, point: &[f64]) -> Vec<f64> {
        let bary = 1.0 / self.vertices as f64;
        self.basis.iter().map(|b| b.iter().zip(point).map(|(v, x)| v * (x - bary)).sum()).collect()
    }

    /// The simplex as a full-dimensional body in chart coordinates.
    pub fn body(&self) -> Result<ConvexBody> {
        let chart = self.clone();
        ConvexBody::new(self.dim(), vec![0.0; self.dim()], 2.0, move |y| chart.lift(y).iter().all(|&x| x >= 0.0))
    }
}
