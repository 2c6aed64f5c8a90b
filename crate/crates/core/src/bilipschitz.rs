//! Bernig's chart `x ↦ Σ log L_i(x) · dL_i` onto the dual space, and the
//! empirical distortion experiments around it.
//!
//! The map is the gradient of the strictly convex potential
//! `ψ(x) = Σ (L_i log L_i − L_i)`, so it is inverted by damped Newton
//! iteration on `ψ(x) − <w, x>`.

use nalgebra::DVector;
use rand::Rng;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::linalg::{cholesky_det, cholesky_solve};
use crate::metric::{distance_birkhoff, finsler_norm};
use crate::polytope::{HRep, Point, VRep, Vector};
use crate::sampling::{self, dirichlet, point_at_depth, random_direction, uniform_interior};

/// A linear functional on `R^n` in coordinates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualVector(pub Vec<f64>);

impl DualVector {
    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// Euclidean norm of the coordinates.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &DualVector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }
}

/// `Σ_i log L_i(x) · g_i`.
pub fn bernig_map(h: &HRep, x: &Point) -> Result<DualVector> {
    h.require_interior(x)?;
    Ok(DualVector(bernig_unguarded(h, x)))
}

pub(crate) fn bernig_unguarded(h: &HRep, x: &Point) -> Vec<f64> {
    let mut out = vec![0.0; h.dim()];
    for f in h.functionals() {
        let l = f.eval(x).ln();
        for (o, g) in out.iter_mut().zip(f.gradient.iter()) {
            *o += l * g;
        }
    }
    out
}

/// Reusable Newton solver for `Φ_b(x) = w`.
#[derive(Clone)]
pub struct BernigInverter<'a> {
    h: &'a HRep,
    grads: Vec<f64>,
    offsets: Vec<f64>,
    start: Vec<f64>,
    hess: Vec<f64>,
    rhs: Vec<f64>,
    vals: Vec<f64>,
    /// Determinant of `DΦ_b` at the last solution.
    pub last_jacobian: f64,
}

const NEWTON_MAX_ITER: usize = 500;

impl<'a> BernigInverter<'a> {
    pub fn new(h: &'a HRep) -> Result<Self> {
        let n = h.dim();
        let grads = h.functionals().iter().flat_map(|f| f.gradient.iter().copied()).collect();
        let offsets = h.functionals().iter().map(|f| f.offset).collect();
        let start = h.analytic_center()?.iter().copied().collect();
        Ok(Self {
            h,
            grads,
            offsets,
            start,
            hess: vec![0.0; n * n],
            rhs: vec![0.0; n],
            vals: vec![0.0; h.num_facets()],
            last_jacobian: 0.0,
        })
    }

    fn eval(&mut self, x: &[f64]) -> bool {
        let n = x.len();
        for (i, v) in self.vals.iter_mut().enumerate() {
            let g = &self.grads[i * n..(i + 1) * n];
            *v = g.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + self.offsets[i];
        }
        self.vals.iter().all(|&v| v > 0.0)
    }

    /// Residual `Φ_b(x) − w` into `rhs`; returns its norm. Needs `eval` first.
    fn residual(&mut self, w: &[f64]) -> f64 {
        let n = w.len();
        self.rhs.copy_from_slice(w);
        self.rhs.iter_mut().for_each(|r| *r = -*r);
        for (i, &v) in self.vals.iter().enumerate() {
            let l = v.ln();
            for k in 0..n {
                self.rhs[k] += l * self.grads[i * n + k];
            }
        }
        self.rhs.iter().map(|r| r * r).sum::<f64>().sqrt()
    }

    fn factor_hessian(&mut self, n: usize) {
        self.hess.iter_mut().for_each(|h| *h = 0.0);
        for (i, &v) in self.vals.iter().enumerate() {
            let g = &self.grads[i * n..(i + 1) * n];
            for a in 0..n {
                for b in 0..=a {
                    self.hess[a * n + b] += g[a] * g[b] / v;
                }
            }
        }
        for a in 0..n {
            for b in 0..a {
                self.hess[b * n + a] = self.hess[a * n + b];
            }
        }
    }

    /// Solve `Φ_b(x) = w`. On success [`Self::last_jacobian`] holds
    /// `det DΦ_b(x)`.
    pub fn solve(&mut self, w: &[f64]) -> Result<Point> {
        let n = self.h.dim();
        if w.len() != n {
            return Err(GeomError::WrongDimension { expected: n, got: w.len() });
        }
        let mut x = self.start.clone();
        let mut trial = vec![0.0; n];
        self.eval(&x);
        let mut res = self.residual(w);
        let target = 1e-11 * (1.0 + w.iter().map(|v| v * v).sum::<f64>().sqrt());
        for _ in 0..NEWTON_MAX_ITER {
            self.factor_hessian(n);
            let mut step = self.rhs.clone();
            if !cholesky_solve(&mut self.hess, n, &mut step) {
                return Err(GeomError::Numerical("Bernig Hessian not positive definite".into()));
            }
            self.last_jacobian = cholesky_det(&self.hess, n);
            step.iter_mut().for_each(|s| *s = -*s);
            // relative change of each facet value; also gives the
            // fraction-to-boundary step bound
            let mut alpha: f64 = 1.0;
            let mut rel: f64 = 0.0;
            for (i, &v) in self.vals.iter().enumerate() {
                let d: f64 = self.grads[i * n..(i + 1) * n].iter().zip(&step).map(|(a, b)| a * b).sum();
                rel = rel.max(d.abs() / v);
                if d < 0.0 {
                    alpha = alpha.min(0.99 * v / -d);
                }
            }
            // near the boundary the residual cannot drop below the rounding of
            // L_i at x, so that floor (or a negligible step) counts as converged
            let scale = 1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let floor = 8.0 * f64::EPSILON * scale * self.vals.iter().map(|v| 1.0 / v).sum::<f64>();
            if res <= target.max(floor) || rel <= 1e-12 {
                return Ok(DVector::from_vec(x));
            }
            let mut accepted = false;
            while alpha * rel > 1e-15 {
                for k in 0..n {
                    trial[k] = x[k] + alpha * step[k];
                }
                if self.eval(&trial) {
                    let r = self.residual(w);
                    if r <= (1.0 - 1e-4 * alpha) * res {
                        x.copy_from_slice(&trial);
                        res = r;
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !accepted {
                // stagnation at machine precision; the Jacobian above is at x
                return Ok(DVector::from_vec(x));
            }
        }
        Err(GeomError::Numerical(format!("Bernig inversion did not converge (residual {res:e})")))
    }
}

/// The interior point `x` with `Φ_b(x) = w`.
pub fn bernig_inverse(h: &HRep, w: &DualVector) -> Result<Point> {
    BernigInverter::new(h)?.solve(w.coords())
}

/// Sampling setup for [`distortion_report`].
#[derive(Clone, Debug, Serialize)]
pub struct DistortionConfig {
    pub seed: u64,
    pub pairs_per_depth: usize,
    /// Target values of `min_i L_i` for the near-boundary strata.
    pub depths: Vec<f64>,
}

impl Default for DistortionConfig {
    fn default() -> Self {
        Self { seed: 0, pairs_per_depth: 200, depths: vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6] }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DepthBand {
    pub depth: f64,
    pub count: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

impl DepthBand {
    pub fn width(&self) -> f64 {
        self.max_ratio / self.min_ratio
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DistortionReport {
    pub sample_count: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub min_witness: (Vec<f64>, Vec<f64>),
    pub max_witness: (Vec<f64>, Vec<f64>),
    pub bands: Vec<DepthBand>,
    /// Band width at the deepest stratum over the width two decades up.
    pub widening: f64,
    pub passed: bool,
}

/// Minimum separation for a pair to be counted.
pub const MIN_PAIR_DISTANCE: f64 = 1e-6;

/// Ratios `‖Φ_b(x) − Φ_b(y)‖ / d(x, y)` over stratified near-boundary pairs.
///
/// Per depth stratum the pairs alternate between (near-boundary, uniform),
/// (near-boundary, near-boundary) and (near-boundary, nearby) kinds.
pub fn distortion_report(h: &HRep, cfg: &DistortionConfig) -> Result<DistortionReport> {
    if cfg.depths.is_empty() || cfg.pairs_per_depth == 0 {
        return Err(GeomError::InsufficientSamples("no depth strata".into()));
    }
    let mut bands = Vec::with_capacity(cfg.depths.len());
    let mut total = 0;
    let mut min = (f64::INFINITY, (vec![], vec![]));
    let mut max = (0.0, (vec![], vec![]));
    for (stratum, &depth) in cfg.depths.iter().enumerate() {
        let mut rng = sampling::rng(cfg.seed, stratum as u64);
        let mut band = DepthBand { depth, count: 0, min_ratio: f64::INFINITY, max_ratio: 0.0 };
        for k in 0..cfg.pairs_per_depth {
            let x = point_at_depth(h, &mut rng, depth);
            let y = match k % 3 {
                0 => uniform_interior(h, &mut rng),
                1 => point_at_depth(h, &mut rng, depth),
                _ => {
                    let u = random_direction(&mut rng, h.dim());
                    &x + u * (0.3 * h.min_value(&x) * rng.random::<f64>())
                }
            };
            if !h.is_interior(&x) || !h.is_interior(&y) {
                continue;
            }
            let d = distance_birkhoff(h, &x, &y)?;
            if d < MIN_PAIR_DISTANCE {
                continue;
            }
            let r = bernig_map(h, &x)?.distance(&bernig_map(h, &y)?) / d;
            band.count += 1;
            band.min_ratio = band.min_ratio.min(r);
            band.max_ratio = band.max_ratio.max(r);
            let wit = || (x.iter().copied().collect(), y.iter().copied().collect());
            if r < min.0 {
                min = (r, wit());
            }
            if r > max.0 {
                max = (r, wit());
            }
        }
        total += band.count;
        bands.push(band);
    }
    if total == 0 {
        return Err(GeomError::InsufficientSamples("every pair closer than the distance guard".into()));
    }
    let widening = two_decade_widening(&bands);
    let passed = min.0 > 0.0 && max.0.is_finite() && widening <= 1.1;
    Ok(DistortionReport {
        sample_count: total,
        min_ratio: min.0,
        max_ratio: max.0,
        min_witness: min.1,
        max_witness: max.1,
        bands,
        widening,
        passed,
    })
}

/// Width of the deepest populated band divided by the width of the band
/// two decades shallower (or the shallowest band if the range is shorter).
fn two_decade_widening(bands: &[DepthBand]) -> f64 {
    let live: Vec<&DepthBand> = bands.iter().filter(|b| b.count > 0).collect();
    let Some(deep) = live.iter().min_by(|a, b| a.depth.total_cmp(&b.depth)) else { return f64::NAN };
    let reference = live
        .iter()
        .filter(|b| b.depth >= 100.0 * deep.depth * (1.0 - 1e-9))
        .min_by(|a, b| a.depth.total_cmp(&b.depth))
        .or_else(|| live.iter().max_by(|a, b| a.depth.total_cmp(&b.depth)))
        .unwrap();
    deep.width() / reference.width()
}

/// Sampling setup for [`finsler_comparison`].
#[derive(Clone, Debug, Serialize)]
pub struct ComparisonConfig {
    pub seed: u64,
    pub points_per_depth: usize,
    pub directions: usize,
    pub depths: Vec<f64>,
}

impl Default for ComparisonConfig {
    fn default() -> Self {
        Self { seed: 0, points_per_depth: 100, directions: 360, depths: vec![1e-3, 1e-4, 1e-5, 1e-6] }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FinslerComparison {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub bands: Vec<DepthBand>,
    /// Width of the deepest band over the width of the shallowest.
    pub widening: f64,
}

/// Band of `F_A(x, v) / F_B(x, v)` over `x` in a shared simplex, sampled
/// ever closer to the simplex facet that lies on both boundaries.
///
/// Each stratum mixes points approaching the interior of that facet with
/// points approaching its vertices that are vertices of both polytopes.
pub fn finsler_comparison(
    a: &HRep,
    b: &HRep,
    shared: &VRep,
    cfg: &ComparisonConfig,
) -> Result<FinslerComparison> {
    let n = a.dim();
    if b.dim() != n || shared.dim() != n {
        return Err(GeomError::WrongDimension { expected: n, got: b.dim().max(shared.dim()) });
    }
    let s = shared.vertices();
    if s.len() != n + 1 {
        return Err(GeomError::InvalidNeighborhood("shared neighborhood must be a simplex".into()));
    }
    for v in s {
        if !a.contains_closed(v) || !b.contains_closed(v) {
            return Err(GeomError::InvalidNeighborhood("simplex not contained in both polytopes".into()));
        }
    }
    let on_boundary = |h: &HRep, pts: &[&Point]| {
        h.functionals().iter().any(|f| pts.iter().all(|p| f.eval(p).abs() <= 1e-7))
    };
    let opposite = (0..=n)
        .find(|&k| {
            let facet: Vec<&Point> = s.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, p)| p).collect();
            on_boundary(a, &facet) && on_boundary(b, &facet)
        })
        .ok_or_else(|| GeomError::InvalidNeighborhood("no simplex facet lies on both boundaries".into()))?;
    let facet: Vec<Point> = s.iter().enumerate().filter(|(i, _)| *i != opposite).map(|(_, p)| p.clone()).collect();
    let is_vertex = |h: &HRep, p: &Point| h.vertices().iter().any(|v| (v - p).amax() <= 1e-7);
    let corners: Vec<Point> = facet.iter().filter(|p| is_vertex(a, p) && is_vertex(b, p)).cloned().collect();
    let dirs = sampling::unit_directions(n, cfg.directions);

    let mut bands = Vec::with_capacity(cfg.depths.len());
    for &depth in &cfg.depths {
        // same stream at every depth so strata differ only by depth
        let mut rng = sampling::rng(cfg.seed, 0);
        let mut band = DepthBand { depth, count: 0, min_ratio: f64::INFINITY, max_ratio: 0.0 };
        for k in 0..cfg.points_per_depth {
            let x = if corners.is_empty() || k % 2 == 0 {
                let w = bounded_weights(&mut rng, n);
                let f = facet.iter().zip(&w).fold(DVector::zeros(n), |acc: Vector, (p, &c)| acc + p * c);
                &f + (&s[opposite] - &f) * depth
            } else {
                let c = &corners[k / 2 % corners.len()];
                let w = bounded_weights(&mut rng, n + 1);
                let z = s.iter().zip(&w).fold(DVector::zeros(n), |acc: Vector, (p, &c)| acc + p * c);
                c + (z - c) * depth
            };
            for v in &dirs {
                let r = finsler_norm(a, &x, v)? / finsler_norm(b, &x, v)?;
                band.count += 1;
                band.min_ratio = band.min_ratio.min(r);
                band.max_ratio = band.max_ratio.max(r);
            }
        }
        bands.push(band);
    }
    let min_ratio = bands.iter().map(|b| b.min_ratio).fold(f64::INFINITY, f64::min);
    let max_ratio = bands.iter().map(|b| b.max_ratio).fold(0.0, f64::max);
    let deep = bands.iter().min_by(|a, b| a.depth.total_cmp(&b.depth)).unwrap();
    let shallow = bands.iter().max_by(|a, b| a.depth.total_cmp(&b.depth)).unwrap();
    let widening = deep.width() / shallow.width();
    Ok(FinslerComparison { min_ratio, max_ratio, bands, widening })
}

/// Random simplex weights, each at least `1 / 2m`, so the sampled depth is
/// governed by the depth parameter alone.
fn bounded_weights<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<f64> {
    dirichlet(rng, m).into_iter().map(|w| 0.5 * w + 0.5 / m as f64).collect()
}

/// Finsler ratio band at a single point over `k` directions.
pub fn finsler_ratio_at(a: &HRep, b: &HRep, x: &Point, k: usize) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for v in sampling::unit_directions(a.dim(), k) {
        let r = finsler_norm(a, x, &v)? / finsler_norm(b, x, &v)?;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok((lo, hi))
}
