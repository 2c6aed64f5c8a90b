//! Isometric embeddings of polytopal Hilbert geometries.
//!
//! The simplex `{α_i > 0, Σ α_i = 1}` is isometric to the quotient of
//! `R^{n+1}` by constant vectors carrying the half-range norm
//! `‖w‖ = ½ (max w_i − min w_i)`, via `α ↦ (log α_i)`. A polytope with
//! `N + 1` facets is an affine section of an `N`-simplex, and restricting
//! the simplex embedding to that section embeds the polytope isometrically
//! into a normed space of dimension `N`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::linalg;
use crate::polytope::{AffineFunctional, HRep, Point};

/// Positive weights summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct BarycentricPoint(Vec<f64>);

impl BarycentricPoint {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(GeomError::DegenerateInput("need at least two barycentric weights".into()));
        }
        if let Some(&w) = weights.iter().find(|&&w| !(w > 0.0)) {
            return Err(GeomError::PointOutside { min_value: w });
        }
        let s: f64 = weights.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(GeomError::DegenerateInput(format!("barycentric weights sum to {s}")));
        }
        Ok(Self(weights))
    }

    /// Normalize positive weights to sum one.
    pub fn from_unnormalized(weights: Vec<f64>) -> Result<Self> {
        if let Some(&w) = weights.iter().find(|&&w| !(w > 0.0) || !w.is_finite()) {
            return Err(GeomError::PointOutside { min_value: w });
        }
        let s: f64 = weights.iter().sum();
        Self::new(weights.into_iter().map(|w| w / s).collect())
    }

    /// Barycenter of the `n`-simplex.
    pub fn barycenter(n: usize) -> Self {
        Self(vec![1.0 / (n + 1) as f64; n + 1])
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    /// Dimension `n` of the simplex (`n + 1` weights).
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }
}

/// Class of a vector modulo constants, stored as its zero-mean representative.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogClass(Vec<f64>);

impl LogClass {
    pub fn from_vector(mut v: Vec<f64>) -> Self {
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        v.iter_mut().for_each(|x| *x -= mean);
        Self(v)
    }

    pub fn zero(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn difference(&self, other: &LogClass) -> LogClass {
        LogClass::from_vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// Softmax: the barycentric point whose log-class this is.
    pub fn to_barycentric(&self) -> BarycentricPoint {
        let m = self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = self.0.iter().map(|x| (x - m).exp()).collect();
        let s: f64 = e.iter().sum();
        BarycentricPoint(e.into_iter().map(|x| x / s).collect())
    }
}

/// The half-range seminorm `scale · (max w_i − min w_i)`, a norm on the
/// quotient by constants. Its unit ball is the polytope cut out by the
/// functionals `scale · (e_i − e_j)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PolyhedralNorm {
    pub scale: f64,
}

impl Default for PolyhedralNorm {
    fn default() -> Self {
        Self { scale: 0.5 }
    }
}

impl PolyhedralNorm {
    pub fn norm(&self, w: &[f64]) -> f64 {
        let (lo, hi) = w.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        self.scale * (hi - lo)
    }

    pub fn distance(&self, a: &LogClass, b: &LogClass) -> f64 {
        self.norm(a.difference(b).coords())
    }

    /// The linear functionals whose maximum is the norm on `R^m`.
    pub fn functionals(&self, m: usize) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(m * (m - 1));
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    let mut f = vec![0.0; m];
                    f[i] = self.scale;
                    f[j] = -self.scale;
                    out.push(f);
                }
            }
        }
        out
    }

    /// Unit ball restricted to the plane `{w ∈ R³ : Σ w = 0}`, in an
    /// orthonormal basis of that plane. Returns the polygon's vertices.
    pub fn unit_ball_zero_sum_section(&self) -> Result<Vec<Point>> {
        let s2 = 2f64.sqrt();
        let s6 = 6f64.sqrt();
        let basis = DMatrix::from_row_slice(3, 2, &[1.0 / s2, 1.0 / s6, -1.0 / s2, 1.0 / s6, 0.0, -2.0 / s6]);
        let fs = self
            .functionals(3)
            .into_iter()
            .map(|f| {
                let g = DVector::from_vec(f);
                let grad = -(basis.transpose() * g);
                AffineFunctional { gradient: grad, offset: 1.0 }
            })
            .collect();
        let h = HRep::new(2, fs)?;
        let v = crate::polytope::vrep_from_hrep(&h)?;
        v.polygon_ccw()
    }
}

/// `α ↦ class of (log α_1, …, log α_{n+1})`.
pub fn simplex_embed(p: &BarycentricPoint) -> LogClass {
    LogClass::from_vector(p.0.iter().map(|a| a.ln()).collect())
}

/// Cyclic log-ratio coordinates `(log α_1/α_2, …, log α_{n+1}/α_1)`, a point
/// of the hyperplane `Σ w = 0`.
pub fn simplex_embed_pairwise(p: &BarycentricPoint) -> Vec<f64> {
    let m = p.0.len();
    (0..m).map(|i| p.0[i].ln() - p.0[(i + 1) % m].ln()).collect()
}

/// Inverse of [`simplex_embed_pairwise`]: `α_{k+1} = α_k e^{-w_k}`, then
/// normalized. For three coordinates this is
/// `(e^{x+y}, e^y, 1) / (e^{x+y} + e^y + 1)`.
pub fn simplex_embed_inverse(w: &[f64]) -> Result<BarycentricPoint> {
    if w.len() < 2 {
        return Err(GeomError::DegenerateInput("need at least two coordinates".into()));
    }
    let sum: f64 = w.iter().sum();
    let scale = w.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    if sum.abs() > 1e-9 * scale {
        return Err(GeomError::DegenerateInput(format!("cyclic log-ratios must sum to zero, got {sum:e}")));
    }
    let mut logs = Vec::with_capacity(w.len());
    let mut acc = 0.0;
    for k in 0..w.len() {
        logs.push(acc);
        acc -= w[k];
    }
    Ok(LogClass::from_vector(logs).to_barycentric())
}

/// An `N`-simplex `S_N ⊂ R^N` with an affine injection `A: R^n → R^N` such
/// that `A` maps the polytope onto `A(R^n) ∩ S_N`.
///
/// Points of `R^N` are handled in barycentric coordinates `y` (length
/// `N + 1`) with respect to an affine basis; the chart `R^N` keeps
/// `y_1..y_N`. With `x` the barycentric coordinates of a source point in
/// the affine basis `e_1..e_{n+1}` (chosen among the polytope's vertices),
/// `A(x) = (x_1, …, x_{n+1}, 0, …, 0)` and
///
/// ```text
/// H_i(y) = Σ_j a_j^i y_j                  i ≤ n+1
/// H_i(y) = Σ_j a_j^i y_j + μ_i y_i        i ≥ n+2
/// ```
///
/// with `a_j^i = L_i(e_j)`, so `H_i ∘ A = L_i`. The weights `μ_i > 0` are
/// chosen from a strictly positive dependency `Σ c_i L_i ≡ 1` (from the
/// analytic center) as `μ_i = 1 / c_i`; then `Σ c_i H_i ≡ Σ y_j = 1` and
/// `S_N` is bounded.
#[derive(Clone, Debug)]
pub struct SimplexSectionLift {
    source_dim: usize,
    target_dim: usize,
    /// Facet indices of the source polytope, in lift order.
    order: Vec<usize>,
    basis: Vec<Point>,
    /// Maps `(x, 1)` to source barycentric coordinates.
    bary_inverse: DMatrix<f64>,
    /// Row `i` holds the coefficients of `H_i` on `y`.
    coeffs: DMatrix<f64>,
    dependency: Vec<f64>,
    source: Vec<AffineFunctional>,
}

const PIVOT_TOL: f64 = 1e-10;

/// Build the simplex-section lift of `h`.
pub fn simplex_section_lift(h: &HRep) -> Result<SimplexSectionLift> {
    let n = h.dim();
    let total = h.num_facets();
    if total < n + 1 {
        return Err(GeomError::DegenerateInput("fewer than n+1 facets".into()));
    }
    let big_n = total - 1;

    // affine basis: greedily pick affinely independent vertices
    let mut basis: Vec<Point> = Vec::with_capacity(n + 1);
    for v in h.vertices() {
        let mut trial = basis.clone();
        trial.push(v.clone());
        if linalg::affine_dimension(&trial) == Some(trial.len() - 1) {
            basis = trial;
            if basis.len() == n + 1 {
                break;
            }
        }
    }
    if basis.len() != n + 1 {
        return Err(GeomError::DegenerateInput("vertices do not contain an affine basis".into()));
    }
    let frame = DMatrix::from_fn(n + 1, n + 1, |r, c| if r < n { basis[c][r] } else { 1.0 });
    let bary_inverse = frame
        .clone()
        .try_inverse()
        .ok_or_else(|| GeomError::Numerical("affine basis matrix not invertible".into()))?;

    let a_row = |f: &AffineFunctional| DVector::from_fn(n + 1, |j, _| f.eval(&basis[j]));

    // greedy rank-building scan for n+1 independent leading facets
    let mut order: Vec<usize> = Vec::with_capacity(total);
    let mut rows: Vec<DVector<f64>> = Vec::new();
    for (i, f) in h.functionals().iter().enumerate() {
        if rows.len() == n + 1 {
            break;
        }
        let r = a_row(f);
        let mut trial = rows.clone();
        trial.push(r.clone());
        let m = DMatrix::from_fn(trial.len(), n + 1, |a, b| trial[a][b]);
        if linalg::rank(&m, PIVOT_TOL) == trial.len() {
            rows = trial;
            order.push(i);
        }
    }
    if order.len() != n + 1 {
        return Err(GeomError::DegenerateInput("fewer than n+1 affinely independent facets".into()));
    }
    let rest: Vec<usize> = (0..total).filter(|i| !order.contains(i)).collect();
    order.extend(rest);
    let source: Vec<AffineFunctional> = order.iter().map(|&i| h.functionals()[i].clone()).collect();

    // strictly positive dependency from the analytic center: Σ L_i / L_i(x*) ≡ N + 1
    let center = h.analytic_center()?;
    let dependency: Vec<f64> = source.iter().map(|f| 1.0 / (f.eval(&center) * total as f64)).collect();

    let mut coeffs = DMatrix::zeros(total, total);
    for (i, f) in source.iter().enumerate() {
        let r = a_row(f);
        for j in 0..=n {
            coeffs[(i, j)] = r[j];
        }
        if i > n {
            coeffs[(i, i)] += 1.0 / dependency[i];
        }
    }
    Ok(SimplexSectionLift {
        source_dim: n,
        target_dim: big_n,
        order,
        basis,
        bary_inverse,
        coeffs,
        dependency,
        source,
    })
}

impl SimplexSectionLift {
    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    /// Dimension `N` of the simplex (facet count minus one).
    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn facet_order(&self) -> &[usize] {
        &self.order
    }

    pub fn basis(&self) -> &[Point] {
        &self.basis
    }

    /// Source functionals in lift order.
    pub fn source_functionals(&self) -> &[AffineFunctional] {
        &self.source
    }

    /// Positive weights with `Σ c_i H_i ≡ 1` on the chart.
    pub fn dependency(&self) -> &[f64] {
        &self.dependency
    }

    /// Barycentric coordinates of `x` in the source affine basis.
    pub fn source_barycentric(&self, x: &Point) -> Vec<f64> {
        let n = self.source_dim;
        let ext = DVector::from_fn(n + 1, |r, _| if r < n { x[r] } else { 1.0 });
        (&self.bary_inverse * ext).iter().copied().collect()
    }

    /// `A(x)` in barycentric coordinates of `R^N` (length `N + 1`).
    pub fn inject(&self, x: &Point) -> Vec<f64> {
        let mut y = self.source_barycentric(x);
        y.resize(self.target_dim + 1, 0.0);
        y
    }

    /// Drop the last barycentric coordinate.
    pub fn to_chart(&self, y: &[f64]) -> Point {
        DVector::from_row_slice(&y[..self.target_dim])
    }

    /// `A(x)` as a point of `R^N`.
    pub fn inject_chart(&self, x: &Point) -> Point {
        self.to_chart(&self.inject(x))
    }

    /// `(H_1(y), …, H_{N+1}(y))`.
    pub fn section_values(&self, y: &[f64]) -> Vec<f64> {
        (&self.coeffs * DVector::from_row_slice(y)).iter().copied().collect()
    }

    /// The functionals `H_i` written on the chart `z = (y_1..y_N)`.
    pub fn simplex_functionals(&self) -> Vec<AffineFunctional> {
        let big_n = self.target_dim;
        (0..=big_n)
            .map(|i| {
                let last = self.coeffs[(i, big_n)];
                AffineFunctional {
                    gradient: DVector::from_fn(big_n, |j, _| self.coeffs[(i, j)] - last),
                    offset: last,
                }
            })
            .collect()
    }

    /// `S_N` as a polytope of `R^N`.
    pub fn simplex_hrep(&self) -> Result<HRep> {
        HRep::new(self.target_dim, self.simplex_functionals())
    }

    /// Barycentric coordinates `c_i H_i(y)` of `y` with respect to the
    /// vertices of `S_N`.
    pub fn simplex_barycentric(&self, y: &[f64]) -> Result<BarycentricPoint> {
        let vals = self.section_values(y);
        BarycentricPoint::from_unnormalized(vals.iter().zip(&self.dependency).map(|(h, c)| h * c).collect())
    }
}

/// Composition of the section lift with the simplex embedding.
#[derive(Clone, Debug)]
pub struct LogEmbedding {
    domain: HRep,
    lift: SimplexSectionLift,
    norm: PolyhedralNorm,
}

impl LogEmbedding {
    pub fn new(h: &HRep) -> Result<Self> {
        Ok(Self { domain: h.clone(), lift: simplex_section_lift(h)?, norm: PolyhedralNorm::default() })
    }

    pub fn source_dim(&self) -> usize {
        self.lift.source_dim
    }

    /// Dimension of the normed target (`R^{N+1}` modulo constants).
    pub fn target_dim(&self) -> usize {
        self.lift.target_dim
    }

    pub fn lift(&self) -> &SimplexSectionLift {
        &self.lift
    }

    pub fn norm(&self) -> PolyhedralNorm {
        self.norm
    }

    pub fn embed(&self, x: &Point) -> Result<LogClass> {
        self.domain.require_interior(x)?;
        let y = self.lift.inject(x);
        Ok(simplex_embed(&self.lift.simplex_barycentric(&y)?))
    }

    pub fn distance(&self, a: &LogClass, b: &LogClass) -> f64 {
        self.norm.distance(a, b)
    }

    /// A source point mapping to `w`, if `w` lies in the image.
    ///
    /// Solves `c_i L_i(x) = s · e^{w_i}` for `(x, s)` in least squares and
    /// accepts when the residual vanishes, `s > 0` and `x` is interior.
    pub fn preimage(&self, w: &LogClass) -> Option<Point> {
        let n = self.lift.source_dim;
        let m = self.lift.target_dim + 1;
        if w.len() != m {
            return None;
        }
        let c = &self.lift.dependency;
        let shift = w.coords().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = w.coords().iter().map(|x| (x - shift).exp()).collect();
        let a = DMatrix::from_fn(m, n + 1, |i, j| {
            if j < n {
                c[i] * self.lift.source[i].gradient[j]
            } else {
                -e[i]
            }
        });
        let b = DVector::from_fn(m, |i, _| -c[i] * self.lift.source[i].offset);
        let sol = a.clone().svd(true, true).solve(&b, 1e-14).ok()?;
        let resid = (&a * &sol - &b).norm();
        if resid > 1e-9 * (1.0 + b.norm()) || !(sol[n] > 0.0) {
            return None;
        }
        let x = DVector::from_fn(n, |k, _| sol[k]);
        self.domain.is_interior(&x).then_some(x)
    }

    /// JSON description: functional lists plus norm descriptor.
    pub fn descriptor(&self) -> EmbeddingDescriptor {
        let rec = |f: &AffineFunctional| FunctionalRecord { gradient: f.gradient.iter().copied().collect(), offset: f.offset };
        EmbeddingDescriptor {
            source_dim: self.lift.source_dim,
            target_dim: self.lift.target_dim,
            facet_order: self.lift.order.clone(),
            affine_basis: self.lift.basis.iter().map(|p| p.iter().copied().collect()).collect(),
            source_functionals: self.lift.source.iter().map(rec).collect(),
            section_functionals: self.lift.simplex_functionals().iter().map(rec).collect(),
            dependency: self.lift.dependency.clone(),
            norm: NormDescriptor { kind: "half-range", scale: self.norm.scale, coordinates: self.lift.target_dim + 1 },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FunctionalRecord {
    pub gradient: Vec<f64>,
    pub offset: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormDescriptor {
    pub kind: &'static str,
    pub scale: f64,
    pub coordinates: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingDescriptor {
    pub source_dim: usize,
    pub target_dim: usize,
    pub facet_order: Vec<usize>,
    pub affine_basis: Vec<Vec<f64>>,
    pub source_functionals: Vec<FunctionalRecord>,
    pub section_functionals: Vec<FunctionalRecord>,
    pub dependency: Vec<f64>,
    pub norm: NormDescriptor,
}

/// Image of `p` under the isometric embedding of `h`.
///
/// Builds the lift on every call; reuse a [`LogEmbedding`] for many points.
pub fn embed_polytope(h: &HRep, p: &Point) -> Result<LogClass> {
    LogEmbedding::new(h)?.embed(p)
}
