//! Global maximisation over a probability simplex: a regular barycentric
//! grid scan followed by golden-section polishing around the best cells.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Upper bound on grid points for simplices of dimension two and up.
pub const MAX_GRID_POINTS: usize = 100_000;
/// Values within this margin count as ties; the earlier grid point wins.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestResponseConfig {
    pub grid_points_per_dim: usize,
    pub refine_iters: usize,
    pub refine_tol: f64,
    pub restarts: usize,
}

impl Default for BestResponseConfig {
    fn default() -> Self {
        Self { grid_points_per_dim: 2001, refine_iters: 60, refine_tol: 1e-10, restarts: 4 }
    }
}

impl BestResponseConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points_per_dim < 2 {
            return Err(invalid(format!(
                "grid needs at least 2 points per dimension, got {}",
                self.grid_points_per_dim
            )));
        }
        if !(self.refine_tol > 0.0) {
            return Err(invalid(format!("refine tolerance must be positive, got {}", self.refine_tol)));
        }
        Ok(())
    }

    /// Same settings with the grid refined to `2n - 1` points per dimension.
    pub fn doubled(&self) -> Self {
        Self { grid_points_per_dim: 2 * self.grid_points_per_dim - 1, ..*self }
    }
}

/// Result of [`maximize_on_simplex`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexMax {
    pub point: Vec<f64>,
    pub value: f64,
    /// Best value seen on the grid alone.
    pub grid_value: f64,
}

/// Grid resolution (steps per edge) used for a simplex with `vertices` vertices.
pub fn grid_resolution(vertices: usize, grid_points_per_dim: usize) -> usize {
    let k = vertices.saturating_sub(1);
    if k == 0 {
        return 0;
    }
    if k == 1 {
        return grid_points_per_dim - 1;
    }
    let target = (grid_points_per_dim as f64).powi(k as i32).min(MAX_GRID_POINTS as f64);
    let mut r = 1;
    while (binomial(r + 1 + k, k) as f64) <= target {
        r += 1;
    }
    r
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Visits every composition of `total` into `parts` nonnegative parts,
/// lexicographically descending (so the first visit is `(total, 0, .., 0)`).
fn for_each_composition(parts: usize, total: usize, mut f: impl FnMut(&[usize])) {
    fn rec(counts: &mut Vec<usize>, pos: usize, remaining: usize, f: &mut impl FnMut(&[usize])) {
        if pos + 1 == counts.len() {
            counts[pos] = remaining;
            f(counts);
            return;
        }
        for c in (0..=remaining).rev() {
            counts[pos] = c;
            rec(counts, pos + 1, remaining - c, f);
        }
    }
    let mut counts = vec![0; parts];
    rec(&mut counts, 0, total, &mut f);
}

fn finite_or_neg_inf(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Golden-section search for a maximum of `f` on `[a, b]`. Returns the best
/// evaluated abscissa and value.
pub(crate) fn golden_max(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, iters: usize, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut best = (a, f64::NEG_INFINITY);
    let track = |x: f64, v: f64, best: &mut (f64, f64)| {
        if v > best.1 {
            *best = (x, v);
        }
    };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = finite_or_neg_inf(f(c));
    let mut fd = finite_or_neg_inf(f(d));
    track(c, fc, &mut best);
    track(d, fd, &mut best);
    for _ in 0..iters {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = finite_or_neg_inf(f(c));
            track(c, fc, &mut best);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = finite_or_neg_inf(f(d));
            track(d, fd, &mut best);
        }
    }
    best
}

/// Maximises `f` over the simplex with `vertices` vertices.
///
/// Scans a regular barycentric grid (ties go to the earliest grid point, and
/// vertex 0 comes first), then polishes from up to `restarts` of the best,
/// mutually non-adjacent grid points with golden-section line searches along
/// the edge directions `e_j - e_last`, each confined to one grid cell. The
/// returned value is never below the best grid value.
pub fn maximize_on_simplex(vertices: usize, cfg: &BestResponseConfig, mut f: impl FnMut(&[f64]) -> f64) -> SimplexMax {
    assert!(vertices >= 1, "simplex needs a vertex");
    if vertices == 1 {
        let v = finite_or_neg_inf(f(&[1.0]));
        return SimplexMax { point: vec![1.0], value: v, grid_value: v };
    }
    let r = grid_resolution(vertices, cfg.grid_points_per_dim);
    let scale = 1.0 / r as f64;
    let mut point = vec![0.0; vertices];
    let mut values = Vec::new();
    let mut cells: Vec<usize> = Vec::new();
    let mut best_index = 0;
    let mut best_value = f64::NEG_INFINITY;
    for_each_composition(vertices, r, |counts| {
        for (p, &c) in point.iter_mut().zip(counts) {
            *p = c as f64 * scale;
        }
        let v = finite_or_neg_inf(f(&point));
        if values.is_empty() || v > best_value + TIE_TOL {
            best_value = v;
            best_index = values.len();
        }
        values.push(v);
        cells.extend_from_slice(counts);
    });
    let cell = |i: usize| &cells[i * vertices..(i + 1) * vertices];
    let to_point = |counts: &[usize]| counts.iter().map(|&c| c as f64 * scale).collect::<Vec<f64>>();

    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).unwrap_or(std::cmp::Ordering::Equal));
    let mut starts: Vec<usize> = vec![best_index];
    for &i in &order {
        if starts.len() >= cfg.restarts.max(1) {
            break;
        }
        let far =
            starts.iter().all(|&s| cell(s).iter().zip(cell(i)).map(|(a, b)| a.abs_diff(*b)).max().unwrap_or(0) > 1);
        if far && values[i] > f64::NEG_INFINITY {
            starts.push(i);
        }
    }

    let mut best = SimplexMax { point: to_point(cell(best_index)), value: best_value, grid_value: best_value };
    if cfg.refine_iters == 0 {
        return best;
    }
    for &s in &starts {
        let (p, v) = polish(&mut f, to_point(cell(s)), values[s], scale, cfg);
        if v > best.value + TIE_TOL {
            best.point = p;
            best.value = v;
        }
    }
    best
}

fn polish(
    f: &mut impl FnMut(&[f64]) -> f64,
    mut x: Vec<f64>,
    mut value: f64,
    step: f64,
    cfg: &BestResponseConfig,
) -> (Vec<f64>, f64) {
    let last = x.len() - 1;
    let sweeps = if last == 1 { 1 } else { cfg.refine_iters.max(1) };
    let origin = x.clone();
    let mut trial = x.clone();
    for _ in 0..sweeps {
        let before = value;
        for j in 0..last {
            // Move mass between vertex j and the last vertex, staying inside
            // the grid cell around the starting point.
            let lo = (-x[j]).max(origin[j] - step - x[j]).max(x[last] - (origin[last] + step));
            let hi = x[last].min(origin[j] + step - x[j]).min(x[last] - (origin[last] - step)).max(lo);
            if hi - lo <= 0.0 {
                continue;
            }
            let base = x.clone();
            let (t, v) = golden_max(
                |t| {
                    trial.copy_from_slice(&base);
                    trial[j] = (base[j] + t).max(0.0);
                    trial[last] = (base[last] - t).max(0.0);
                    f(&trial)
                },
                lo,
                hi,
                cfg.refine_iters,
                cfg.refine_tol,
            );
            if v > value {
                value = v;
                x[j] = (base[j] + t).max(0.0);
                x[last] = (base[last] - t).max(0.0);
            }
        }
        if value - before <= cfg.refine_tol {
            break;
        }
    }
    (x, value)
}
