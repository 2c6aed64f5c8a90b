//! Convex polytopes in vertex and halfspace form.
//!
//! A polytope is stored as the open set `{x : L_i(x) > 0}` for a list of
//! affine functionals `L_i(x) = <g_i, x> + c_i`. Functionals are normalized
//! to unit gradient on construction, so the membership tolerance [`TOL`]
//! is a Euclidean distance to the facet hyperplane.
//!
//! Conversions between the two descriptions are brute force over
//! `n`-subsets (of functionals or of points). That is `O(C(N, n) · N)` and
//! meant for desk-scale inputs (`N` up to a few dozen).

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::linalg;

/// A point of the ambient space `R^n`.
pub type Point = DVector<f64>;
/// A tangent vector / direction in `R^n`.
pub type Vector = DVector<f64>;

/// Tolerance on functional values for membership and boundary predicates.
pub const TOL: f64 = 1e-9;

/// An affine map `x ↦ <gradient, x> + offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineFunctional {
    pub gradient: DVector<f64>,
    pub offset: f64,
}

impl AffineFunctional {
    pub fn new(gradient: impl Into<Vec<f64>>, offset: f64) -> Self {
        Self { gradient: DVector::from_vec(gradient.into()), offset }
    }

    pub fn dim(&self) -> usize {
        self.gradient.len()
    }

    #[inline]
    pub fn eval(&self, x: &Point) -> f64 {
        self.gradient.dot(x) + self.offset
    }

    /// Same functional rescaled to unit gradient.
    pub fn normalized(&self) -> Self {
        let s = self.gradient.norm();
        Self { gradient: &self.gradient / s, offset: self.offset / s }
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (&self.gradient - &other.gradient).amax() <= tol && (self.offset - other.offset).abs() <= tol
    }
}

/// Polytope given by the functionals that are positive on its interior.
///
/// Construction validates the invariants: finite data, nonzero gradients,
/// boundedness, non-empty interior. Duplicate and redundant functionals are
/// dropped, so the stored list is exactly one functional per facet.
#[derive(Clone, Debug)]
pub struct HRep {
    dim: usize,
    functionals: Vec<AffineFunctional>,
    vertices: Vec<Point>,
    witness: Point,
}

/// Polytope given by its extreme points.
#[derive(Clone, Debug)]
pub struct VRep {
    dim: usize,
    vertices: Vec<Point>,
}

/// The chord `a, p, q, b` cut out by the line through `p` with direction `u`.
///
/// `a = p - t_minus·u` and `b = p + t_plus·u`.
#[derive(Clone, Debug)]
pub struct Chord {
    pub p: Point,
    pub direction: Vector,
    pub a: Point,
    pub b: Point,
    pub t_minus: f64,
    pub t_plus: f64,
}

impl HRep {
    /// Validate and normalize a halfspace description.
    pub fn new(dim: usize, functionals: Vec<AffineFunctional>) -> Result<Self> {
        if dim == 0 {
            return Err(GeomError::DegenerateInput("dimension must be at least 1".into()));
        }
        let mut normed: Vec<AffineFunctional> = Vec::with_capacity(functionals.len());
        for f in &functionals {
            if f.dim() != dim {
                return Err(GeomError::WrongDimension { expected: dim, got: f.dim() });
            }
            if !f.offset.is_finite() || f.gradient.iter().any(|v| !v.is_finite()) {
                return Err(GeomError::DegenerateInput("non-finite functional".into()));
            }
            if f.gradient.norm() == 0.0 {
                return Err(GeomError::DegenerateInput("functional with zero gradient".into()));
            }
            let g = f.normalized();
            if !normed.iter().any(|h| h.approx_eq(&g, TOL)) {
                normed.push(g);
            }
        }
        if normed.len() < dim + 1 {
            // fewer than n+1 halfspaces can never cut out a bounded set
            if let Some(u) = recession_direction(dim, &normed) {
                return Err(GeomError::UnboundedPolytope { direction: u.iter().copied().collect() });
            }
            return Err(GeomError::DegenerateInput(format!(
                "need at least {} functionals, got {}",
                dim + 1,
                normed.len()
            )));
        }
        if let Some(u) = recession_direction(dim, &normed) {
            return Err(GeomError::UnboundedPolytope { direction: u.iter().copied().collect() });
        }
        let vertices = enumerate_vertices(dim, &normed);
        if linalg::affine_dimension(&vertices) != Some(dim) {
            return Err(GeomError::DegenerateInput("empty interior: vertices do not span".into()));
        }
        let witness = centroid(&vertices);
        let min = normed.iter().map(|f| f.eval(&witness)).fold(f64::INFINITY, f64::min);
        if min <= TOL {
            return Err(GeomError::DegenerateInput("empty interior".into()));
        }
        // keep only functionals supporting an (n-1)-face
        let facets: Vec<AffineFunctional> = normed
            .into_iter()
            .filter(|f| {
                let on: Vec<Point> = vertices.iter().filter(|v| f.eval(v).abs() <= ACTIVE_TOL).cloned().collect();
                linalg::affine_dimension(&on).is_some_and(|d| d + 1 == dim)
            })
            .collect();
        Ok(Self { dim, functionals: facets, vertices, witness })
    }

    /// Axis-aligned box `[lo_k, hi_k]`.
    pub fn cube(lo: &[f64], hi: &[f64]) -> Result<Self> {
        let n = lo.len();
        let mut fs = Vec::with_capacity(2 * n);
        for k in 0..n {
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            fs.push(AffineFunctional::new(e.clone(), -lo[k]));
            e[k] = -1.0;
            fs.push(AffineFunctional::new(e, hi[k]));
        }
        Self::new(n, fs)
    }

    /// The unit cube `(0,1)^n`.
    pub fn unit_cube(n: usize) -> Self {
        Self::cube(&vec![0.0; n], &vec![1.0; n]).expect("unit cube is valid")
    }

    /// The simplex `{x_k > 0, 1 - Σ x_k > 0}` in `R^n`.
    pub fn standard_simplex(n: usize) -> Self {
        let mut fs: Vec<AffineFunctional> = (0..n)
            .map(|k| {
                let mut e = vec![0.0; n];
                e[k] = 1.0;
                AffineFunctional::new(e, 0.0)
            })
            .collect();
        fs.push(AffineFunctional::new(vec![-1.0; n], 1.0));
        Self::new(n, fs).expect("standard simplex is valid")
    }

    /// Regular `k`-gon inscribed in the circle of given radius about `center`.
    pub fn regular_polygon(k: usize, center: [f64; 2], radius: f64) -> Result<Self> {
        let pts: Vec<Point> = (0..k)
            .map(|j| {
                let a = std::f64::consts::TAU * j as f64 / k as f64;
                DVector::from_vec(vec![center[0] + radius * a.cos(), center[1] + radius * a.sin()])
            })
            .collect();
        hrep_from_vrep(&VRep::new(2, pts)?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn functionals(&self) -> &[AffineFunctional] {
        &self.functionals
    }

    pub fn num_facets(&self) -> usize {
        self.functionals.len()
    }

    /// Vertices found during construction.
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// An interior point (centroid of the vertices).
    pub fn witness(&self) -> &Point {
        &self.witness
    }

    pub fn values(&self, x: &Point) -> Vec<f64> {
        self.functionals.iter().map(|f| f.eval(x)).collect()
    }

    pub fn min_value(&self, x: &Point) -> f64 {
        self.functionals.iter().map(|f| f.eval(x)).fold(f64::INFINITY, f64::min)
    }

    /// `true` when every functional exceeds [`TOL`] at `x`.
    pub fn is_interior(&self, x: &Point) -> bool {
        x.len() == self.dim && self.min_value(x) > TOL
    }

    /// `true` when every functional is at least `-TOL` at `x`.
    pub fn contains_closed(&self, x: &Point) -> bool {
        x.len() == self.dim && self.min_value(x) >= -TOL
    }

    pub(crate) fn check_dim(&self, x: &Point) -> Result<()> {
        if x.len() != self.dim {
            return Err(GeomError::WrongDimension { expected: self.dim, got: x.len() });
        }
        Ok(())
    }

    /// Errors with `PointOutside` unless `x` is strictly interior.
    pub fn require_interior(&self, x: &Point) -> Result<()> {
        self.check_dim(x)?;
        let min = self.min_value(x);
        if !(min > TOL) {
            return Err(GeomError::PointOutside { min_value: min });
        }
        Ok(())
    }

    /// Axis-aligned bounding box of the vertices.
    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = self.vertices[0].clone();
        let mut hi = self.vertices[0].clone();
        for v in &self.vertices[1..] {
            for k in 0..self.dim {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    /// Maximizer of `Σ log L_i`, found by damped Newton iteration.
    ///
    /// At the analytic center `Σ g_i / L_i = 0`, which gives a strictly
    /// positive dependency among the gradients.
    pub fn analytic_center(&self) -> Result<Point> {
        let n = self.dim;
        let mut x = self.witness.clone();
        for _ in 0..200 {
            let vals = self.values(&x);
            let mut grad = DVector::zeros(n);
            let mut hess = DMatrix::zeros(n, n);
            for (f, &l) in self.functionals.iter().zip(&vals) {
                grad += &f.gradient / l;
                hess += &f.gradient * f.gradient.transpose() / (l * l);
            }
            let step = hess
                .cholesky()
                .ok_or_else(|| GeomError::Numerical("analytic center Hessian not positive definite".into()))?
                .solve(&grad);
            let decrement = grad.dot(&step);
            if decrement < 1e-26 {
                return Ok(x);
            }
            let mut alpha = 1.0;
            let base: f64 = vals.iter().map(|l| l.ln()).sum();
            loop {
                let y = &x + &step * alpha;
                if self.min_value(&y) > 0.0 {
                    let val: f64 = self.values(&y).iter().map(|l| l.ln()).sum();
                    if val >= base + 0.25 * alpha * decrement || alpha < 1e-12 {
                        x = y;
                        break;
                    }
                }
                alpha *= 0.5;
                if alpha < 1e-16 {
                    return Ok(x);
                }
            }
        }
        Ok(x)
    }
}

/// Vertex-activity tolerance used when matching vertices to facets.
const ACTIVE_TOL: f64 = 1e-7;

fn centroid(points: &[Point]) -> Point {
    let mut c = DVector::zeros(points[0].len());
    for p in points {
        c += p;
    }
    c / points.len() as f64
}

/// Direction `u ≠ 0` with `<g_i, u> >= 0` for all `i`, if one exists.
///
/// The recession cone is polyhedral; when pointed, any nonzero cone has an
/// extreme ray on which `n - 1` independent constraints are tight, so it is
/// enough to test the null directions of every `(n-1)`-subset. A cone that is
/// not pointed contains a line, which shows up as a rank-deficient gradient
/// matrix.
fn recession_direction(dim: usize, fs: &[AffineFunctional]) -> Option<Vector> {
    let g = DMatrix::from_fn(fs.len().max(1), dim, |r, c| fs.get(r).map_or(0.0, |f| f.gradient[c]));
    if fs.is_empty() || linalg::rank(&g, linalg::RANK_TOL) < dim {
        // lineality: any null direction of G works
        let mut padded = DMatrix::zeros(dim.max(fs.len()), dim);
        for (r, f) in fs.iter().enumerate() {
            padded.set_row(r, &f.gradient.transpose());
        }
        let svd = padded.svd(false, true);
        let v_t = svd.v_t?;
        let s = &svd.singular_values;
        let k = (0..s.len()).min_by(|&a, &b| s[a].total_cmp(&s[b]))?;
        return Some(v_t.row(k).transpose());
    }
    let ok = |u: &Vector| fs.iter().all(|f| f.gradient.dot(u) >= -1e-12);
    if dim == 1 {
        for s in [1.0, -1.0] {
            let u = DVector::from_element(1, s);
            if ok(&u) {
                return Some(u);
            }
        }
        return None;
    }
    for subset in (0..fs.len()).combinations(dim - 1) {
        let rows: Vec<Vector> = subset.iter().map(|&i| fs[i].gradient.clone()).collect();
        if let Some(u) = linalg::null_vector(&rows, dim) {
            if ok(&u) {
                return Some(u);
            }
            let neg = -u;
            if ok(&neg) {
                return Some(neg);
            }
        }
    }
    None
}

/// Points where `n` independent functionals vanish and none is negative.
fn enumerate_vertices(dim: usize, fs: &[AffineFunctional]) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::new();
    for subset in (0..fs.len()).combinations(dim) {
        let a = DMatrix::from_fn(dim, dim, |r, c| fs[subset[r]].gradient[c]);
        let b = DVector::from_fn(dim, |r, _| -fs[subset[r]].offset);
        let Some(x) = linalg::solve(&a, &b) else { continue };
        if fs.iter().all(|f| f.eval(&x) >= -ACTIVE_TOL) && !out.iter().any(|v| (v - &x).amax() <= ACTIVE_TOL) {
            out.push(x);
        }
    }
    out
}

impl VRep {
    /// Validate a vertex list: finite, affinely spanning, every point extremal.
    pub fn new(dim: usize, vertices: Vec<Point>) -> Result<Self> {
        let v = Self::unchecked(dim, vertices)?;
        let h = hrep_from_points(dim, &v.vertices)?;
        for p in &v.vertices {
            if !h.vertices.iter().any(|q| (q - p).amax() <= ACTIVE_TOL) {
                return Err(GeomError::DegenerateInput(format!(
                    "point {:?} is not extremal",
                    p.iter().collect::<Vec<_>>()
                )));
            }
        }
        Ok(v)
    }

    /// Convex hull of an arbitrary point cloud (non-extremal points dropped).
    pub fn hull(dim: usize, points: Vec<Point>) -> Result<Self> {
        let v = Self::unchecked(dim, points)?;
        let h = hrep_from_points(dim, &v.vertices)?;
        Ok(Self { dim, vertices: h.vertices })
    }

    fn unchecked(dim: usize, vertices: Vec<Point>) -> Result<Self> {
        for p in &vertices {
            if p.len() != dim {
                return Err(GeomError::WrongDimension { expected: dim, got: p.len() });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(GeomError::DegenerateInput("non-finite coordinate".into()));
            }
        }
        if linalg::affine_dimension(&vertices) != Some(dim) {
            return Err(GeomError::DegenerateInput("vertices do not affinely span the space".into()));
        }
        Ok(Self { dim, vertices })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Vertices of a polygon in counter-clockwise order.
    pub fn polygon_ccw(&self) -> Result<Vec<Point>> {
        if self.dim != 2 {
            return Err(GeomError::WrongDimension { expected: 2, got: self.dim });
        }
        let c = centroid(&self.vertices);
        let mut v = self.vertices.clone();
        v.sort_by(|a, b| {
            let ta = (a[1] - c[1]).atan2(a[0] - c[0]);
            let tb = (b[1] - c[1]).atan2(b[0] - c[0]);
            ta.total_cmp(&tb)
        });
        Ok(v)
    }
}

/// Facet description of the convex hull of `v`.
pub fn hrep_from_vrep(v: &VRep) -> Result<HRep> {
    hrep_from_points(v.dim, &v.vertices)
}

/// Vertex description of `h`: every point where `n` affinely independent
/// functionals vanish and all others are non-negative.
pub fn vrep_from_hrep(h: &HRep) -> Result<VRep> {
    VRep::unchecked(h.dim, h.vertices.clone())
}

fn hrep_from_points(dim: usize, points: &[Point]) -> Result<HRep> {
    if linalg::affine_dimension(points) != Some(dim) {
        return Err(GeomError::DegenerateInput("points do not affinely span the space".into()));
    }
    let scale = points.iter().map(|p| p.amax()).fold(1.0f64, f64::max);
    let side_tol = 1e-9 * scale;
    let mut fs: Vec<AffineFunctional> = Vec::new();
    for subset in (0..points.len()).combinations(dim) {
        let base = &points[subset[0]];
        let rows: Vec<Vector> = subset[1..].iter().map(|&i| &points[i] - base).collect();
        let Some(normal) = linalg::null_vector(&rows, dim) else { continue };
        let mut f = AffineFunctional { offset: -normal.dot(base), gradient: normal };
        let vals: Vec<f64> = points.iter().map(|p| f.eval(p)).collect();
        let pos = vals.iter().any(|&v| v > side_tol);
        let neg = vals.iter().any(|&v| v < -side_tol);
        match (pos, neg) {
            (true, true) | (false, false) => continue,
            (false, true) => {
                f.gradient = -f.gradient;
                f.offset = -f.offset;
            }
            (true, false) => {}
        }
        if !fs.iter().any(|h| h.approx_eq(&f, TOL)) {
            fs.push(f);
        }
    }
    HRep::new(dim, fs)
}

/// Intersect the line `p + s·u` with the boundary.
///
/// Closed form: `t_plus = min L_i(p) / -<g_i, u>` over functionals that
/// decrease along `u`, and symmetrically for `t_minus`.
pub fn boundary_intersection(h: &HRep, p: &Point, u: &Vector) -> Result<Chord> {
    h.check_dim(u)?;
    if u.iter().all(|&c| c == 0.0) {
        return Err(GeomError::ZeroDirection);
    }
    h.require_interior(p)?;
    let (t_minus, t_plus) = chord_params(h, p, u);
    Ok(Chord { a: p - u * t_minus, b: p + u * t_plus, p: p.clone(), direction: u.clone(), t_minus, t_plus })
}

/// `(t_minus, t_plus)` without validation; both finite for bounded `h`.
pub(crate) fn chord_params(h: &HRep, p: &Point, u: &Vector) -> (f64, f64) {
    let mut t_plus = f64::INFINITY;
    let mut t_minus = f64::INFINITY;
    for f in &h.functionals {
        let l = f.eval(p);
        let s = f.gradient.dot(u);
        if s < 0.0 {
            t_plus = t_plus.min(l / -s);
        } else if s > 0.0 {
            t_minus = t_minus.min(l / s);
        }
    }
    (t_minus, t_plus)
}

/// On-disk polytope description.
///
/// Either `{"dim": n, "vertices": [[..], ..]}` or
/// `{"dim": n, "halfspaces": [{"gradient": [..], "offset": r}, ..]}` with
/// `gradient·x + offset > 0` on the interior.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum PolytopeFile {
    Vertices { dim: usize, vertices: Vec<Vec<f64>> },
    Halfspaces { dim: usize, halfspaces: Vec<HalfspaceRecord> },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct HalfspaceRecord {
    pub gradient: Vec<f64>,
    pub offset: f64,
}

impl PolytopeFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_hrep(&self) -> Result<HRep> {
        match self {
            PolytopeFile::Vertices { dim, vertices } => {
                let pts = vertices.iter().map(|v| DVector::from_vec(v.clone())).collect();
                hrep_from_vrep(&VRep::new(*dim, pts)?)
            }
            PolytopeFile::Halfspaces { dim, halfspaces } => HRep::new(
                *dim,
                halfspaces.iter().map(|r| AffineFunctional::new(r.gradient.clone(), r.offset)).collect(),
            ),
        }
    }

    pub fn from_hrep(h: &HRep) -> Self {
        PolytopeFile::Halfspaces {
            dim: h.dim,
            halfspaces: h
                .functionals
                .iter()
                .map(|f| HalfspaceRecord { gradient: f.gradient.iter().copied().collect(), offset: f.offset })
                .collect(),
        }
    }

    pub fn from_vrep(v: &VRep) -> Self {
        PolytopeFile::Vertices { dim: v.dim, vertices: v.vertices.iter().map(|p| p.iter().copied().collect()).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[f64]) -> Point {
        DVector::from_row_slice(c)
    }

    fn unit_square_vrep() -> VRep {
        VRep::new(2, vec![pt(&[0.0, 0.0]), pt(&[1.0, 0.0]), pt(&[1.0, 1.0]), pt(&[0.0, 1.0])]).unwrap()
    }

    #[test]
    fn square_from_vertices_matches_membership_on_grid() {
        let h = hrep_from_vrep(&unit_square_vrep()).unwrap();
        assert_eq!(h.num_facets(), 4);
        for i in 0..10 {
            for j in 0..10 {
                let x = pt(&[-0.35 + 0.18 * i as f64, -0.35 + 0.18 * j as f64]);
                let inside = x[0] > 0.0 && x[0] < 1.0 && x[1] > 0.0 && x[1] < 1.0;
                assert_eq!(h.min_value(&x) > 0.0, inside, "{x:?}");
            }
        }
    }

    #[test]
    fn simplex_vertices_give_barycentric_functionals() {
        for n in 1..=4 {
            let mut pts = vec![DVector::zeros(n)];
            for k in 0..n {
                let mut e = DVector::zeros(n);
                e[k] = 1.0;
                pts.push(e);
            }
            let h = hrep_from_vrep(&VRep::new(n, pts).unwrap()).unwrap();
            assert_eq!(h.num_facets(), n + 1);
            // functional values at a point are its barycentric coordinates up to scale
            let x = DVector::from_fn(n, |k, _| 0.1 + 0.05 * k as f64);
            let s = x.sum();
            for f in h.functionals() {
                let v = f.eval(&x);
                let scale = f.gradient.amax();
                let bary = v / scale;
                let matches = x.iter().any(|&c| (c - bary).abs() < 1e-12) || (1.0 - s - bary).abs() < 1e-12;
                assert!(matches, "n={n} value {bary}");
            }
        }
    }

    #[test]
    fn collinear_points_are_degenerate() {
        let r = VRep::new(2, vec![pt(&[0.0, 0.0]), pt(&[1.0, 1.0]), pt(&[2.0, 2.0])]);
        assert!(matches!(r, Err(GeomError::DegenerateInput(_))));
    }

    #[test]
    fn non_extremal_vertex_rejected_but_hull_accepts() {
        let mut pts = unit_square_vrep().vertices().to_vec();
        pts.push(pt(&[0.5, 0.5]));
        assert!(VRep::new(2, pts.clone()).is_err());
        assert_eq!(VRep::hull(2, pts).unwrap().vertices().len(), 4);
    }

    #[test]
    fn square_roundtrip_recovers_corners() {
        let h = hrep_from_vrep(&unit_square_vrep()).unwrap();
        let v = vrep_from_hrep(&h).unwrap();
        assert_eq!(v.vertices().len(), 4);
        for c in unit_square_vrep().vertices() {
            assert!(v.vertices().iter().any(|w| (w - c).amax() < 1e-12));
        }
    }

    #[test]
    fn quadrant_is_unbounded() {
        let r = HRep::new(2, vec![AffineFunctional::new(vec![1.0, 0.0], 0.0), AffineFunctional::new(vec![0.0, 1.0], 0.0)]);
        assert!(matches!(r, Err(GeomError::UnboundedPolytope { .. })));
        let strip = HRep::new(
            2,
            vec![AffineFunctional::new(vec![1.0, 0.0], 0.0), AffineFunctional::new(vec![-1.0, 0.0], 1.0), AffineFunctional::new(vec![0.0, 1.0], 0.0)],
        );
        assert!(matches!(strip, Err(GeomError::UnboundedPolytope { .. })));
    }

    #[test]
    fn duplicates_and_redundant_functionals_are_dropped() {
        let mut fs: Vec<AffineFunctional> = HRep::unit_cube(2).functionals().to_vec();
        fs.push(AffineFunctional::new(vec![3.0, 0.0], 0.0)); // 3x > 0, duplicate of x > 0
        fs.push(AffineFunctional::new(vec![1.0, 1.0], 5.0)); // never active
        let h = HRep::new(2, fs).unwrap();
        assert_eq!(h.num_facets(), 4);
    }

    #[test]
    fn empty_interior_detected() {
        let r = HRep::new(
            1,
            vec![AffineFunctional::new(vec![1.0], 0.0), AffineFunctional::new(vec![-1.0], 0.0)],
        );
        assert!(matches!(r, Err(GeomError::DegenerateInput(_))));
    }

    #[test]
    fn chord_in_unit_square() {
        let h = HRep::unit_cube(2);
        let c = boundary_intersection(&h, &pt(&[0.25, 0.5]), &pt(&[1.0, 0.0])).unwrap();
        assert!((c.t_plus - 0.75).abs() < 1e-15);
        assert!((c.t_minus - 0.25).abs() < 1e-15);
        assert!(h.min_value(&c.a).abs() < 1e-12 && h.min_value(&c.b).abs() < 1e-12);
    }

    #[test]
    fn chord_errors() {
        let h = HRep::unit_cube(2);
        assert_eq!(
            boundary_intersection(&h, &pt(&[0.5, 0.5]), &pt(&[0.0, 0.0])).unwrap_err(),
            GeomError::ZeroDirection
        );
        assert!(matches!(
            boundary_intersection(&h, &pt(&[0.0, 0.5]), &pt(&[1.0, 0.0])),
            Err(GeomError::PointOutside { .. })
        ));
    }

    #[test]
    fn symmetric_chord_at_center() {
        let h = HRep::regular_polygon(6, [0.0, 0.0], 1.0).unwrap();
        let o = pt(&[0.0, 0.0]);
        for k in 0..24 {
            let a = k as f64 * 0.3;
            let c = boundary_intersection(&h, &o, &pt(&[a.cos(), a.sin()])).unwrap();
            assert!((c.t_plus - c.t_minus).abs() < 1e-12);
        }
    }

    #[test]
    fn analytic_center_of_square_is_center() {
        let c = HRep::unit_cube(2).analytic_center().unwrap();
        assert!((c[0] - 0.5).abs() < 1e-10 && (c[1] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn file_formats_parse() {
        let v = PolytopeFile::parse(r#"{"dim": 2, "vertices": [[0,0],[1,0],[1,1],[0,1]]}"#).unwrap();
        let h = PolytopeFile::parse(
            r#"{"dim": 1, "halfspaces": [{"gradient": [1], "offset": 1}, {"gradient": [-1], "offset": 1}]}"#,
        )
        .unwrap();
        assert_eq!(v.to_hrep().unwrap().num_facets(), 4);
        let interval = h.to_hrep().unwrap();
        assert_eq!(interval.vertices().len(), 2);
        let back = PolytopeFile::parse(&serde_json::to_string(&PolytopeFile::from_hrep(&interval)).unwrap()).unwrap();
        assert_eq!(back.to_hrep().unwrap().num_facets(), 2);
        assert!(PolytopeFile::parse(r#"{"dim": 2}"#).is_err());
    }
}
