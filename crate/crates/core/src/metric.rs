//! The Hilbert metric of a polytope and its companions.
//!
//! Three independent routes to the same distance are provided:
//!
//! * [`distance_crossratio`]: half the log cross-ratio of the chord `a, p, q, b`;
//! * [`distance_birkhoff`]: half the range of `log L_i(p) - log L_i(q)`;
//! * [`distance_alexander`]: for polygons, a sum of vertex cone metrics.
//!
//! [`finsler_norm`] is the infinitesimal version whose length metric is the
//! Hilbert distance.

use nalgebra::DVector;

use crate::error::{GeomError, Result};
use crate::polytope::{boundary_intersection, AffineFunctional, HRep, Point, VRep, Vector, TOL};

/// Hilbert distance as `½ log [a, p, q, b]`.
///
/// The cross-ratio is accumulated in log space so near-boundary chords do
/// not overflow.
pub fn distance_crossratio(h: &HRep, p: &Point, q: &Point) -> Result<f64> {
    h.require_interior(p)?;
    h.require_interior(q)?;
    let u = q - p;
    if u.iter().all(|&c| c == 0.0) {
        return Ok(0.0);
    }
    let chord = boundary_intersection(h, p, &u)?;
    let (a, b) = (&chord.a, &chord.b);
    let log_cr = (q - a).norm().ln() - (p - a).norm().ln() + (p - b).norm().ln() - (q - b).norm().ln();
    Ok((0.5 * log_cr).max(0.0))
}

/// Hilbert distance by the facet formula
/// `½ sup_{i,j} log( L_i(p)/L_i(q) · L_j(q)/L_j(p) )`, evaluated in `O(N)`
/// as half the range of the log-ratios.
pub fn distance_birkhoff(h: &HRep, p: &Point, q: &Point) -> Result<f64> {
    h.require_interior(p)?;
    h.require_interior(q)?;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for f in h.functionals() {
        let r = (f.eval(p) / f.eval(q)).ln();
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok(0.5 * (hi - lo))
}

/// Birkhoff distance on precomputed `log L_i` vectors.
#[inline]
pub(crate) fn birkhoff_from_logs(lp: &[f64], lq: &[f64]) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (a, b) in lp.iter().zip(lq) {
        let r = a - b;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    0.5 * (hi - lo)
}

/// Finsler norm `F(p, v) = ½ ‖v‖ (1/‖p - p⁻‖ + 1/‖p - p⁺‖)`, with `F(p, 0) = 0`.
pub fn finsler_norm(h: &HRep, p: &Point, v: &Vector) -> Result<f64> {
    h.require_interior(p)?;
    h.check_dim(v)?;
    if v.iter().all(|&c| c == 0.0) {
        return Ok(0.0);
    }
    let chord = boundary_intersection(h, p, v)?;
    let vn = v.norm();
    Ok(0.5 * vn * (1.0 / (chord.t_minus * vn) + 1.0 / (chord.t_plus * vn)))
}

/// Sector `{L1 > 0, L2 > 0}` bounded by two lines through an apex (2-D).
#[derive(Clone, Debug)]
pub struct ConeSector {
    l1: AffineFunctional,
    l2: AffineFunctional,
}

impl ConeSector {
    pub fn new(l1: AffineFunctional, l2: AffineFunctional) -> Result<Self> {
        if l1.dim() != 2 || l2.dim() != 2 {
            return Err(GeomError::WrongDimension { expected: 2, got: l1.dim().max(l2.dim()) });
        }
        let (g1, g2) = (&l1.gradient, &l2.gradient);
        let cross = g1[0] * g2[1] - g1[1] * g2[0];
        if cross.abs() <= 1e-12 * g1.norm() * g2.norm() {
            return Err(GeomError::DegenerateInput("sector lines are parallel".into()));
        }
        Ok(Self { l1, l2 })
    }

    /// Intersection point of the two bounding lines.
    pub fn apex(&self) -> Point {
        let (g1, g2) = (&self.l1.gradient, &self.l2.gradient);
        let det = g1[0] * g2[1] - g1[1] * g2[0];
        let (c1, c2) = (-self.l1.offset, -self.l2.offset);
        DVector::from_vec(vec![(c1 * g2[1] - c2 * g1[1]) / det, (g1[0] * c2 - g2[0] * c1) / det])
    }

    fn require_inside(&self, x: &Point) -> Result<()> {
        if x.len() != 2 {
            return Err(GeomError::WrongDimension { expected: 2, got: x.len() });
        }
        let m = self.l1.eval(x).min(self.l2.eval(x));
        if !(m > TOL) {
            return Err(GeomError::PointOutside { min_value: m });
        }
        Ok(())
    }
}

/// Cone metric `½ |log |L1(x)/L1(y) · L2(y)/L2(x)||` of a sector.
pub fn cone_metric(s: &ConeSector, x: &Point, y: &Point) -> Result<f64> {
    s.require_inside(x)?;
    s.require_inside(y)?;
    let r = (s.l1.eval(x).ln() - s.l1.eval(y).ln()) + (s.l2.eval(y).ln() - s.l2.eval(x).ln());
    Ok(0.5 * r.abs())
}

/// Vertex sectors of a polygon, in counter-clockwise vertex order.
pub fn polygon_sectors(v: &VRep) -> Result<Vec<(Point, ConeSector)>> {
    let ring = v.polygon_ccw()?;
    let n = ring.len();
    let edge = |a: &Point, b: &Point| {
        // left of a→b is the interior for a ccw ring
        let d = b - a;
        let g = DVector::from_vec(vec![-d[1], d[0]]);
        let f = AffineFunctional { offset: -g.dot(a), gradient: g };
        f.normalized()
    };
    (0..n)
        .map(|i| {
            let prev = &ring[(i + n - 1) % n];
            let cur = &ring[i];
            let next = &ring[(i + 1) % n];
            Ok((cur.clone(), ConeSector::new(edge(prev, cur), edge(cur, next))?))
        })
        .collect()
}

fn require_polygon_interior(v: &VRep, sectors: &[(Point, ConeSector)], x: &Point) -> Result<()> {
    if x.len() != 2 {
        return Err(GeomError::WrongDimension { expected: 2, got: x.len() });
    }
    debug_assert_eq!(v.dim(), 2);
    let m = sectors.iter().map(|(_, s)| s.l1.eval(x)).fold(f64::INFINITY, f64::min);
    if !(m > TOL) {
        return Err(GeomError::PointOutside { min_value: m });
    }
    Ok(())
}

/// Hilbert distance in a polygon as half the sum of all vertex cone metrics.
pub fn distance_alexander(v: &VRep, x: &Point, y: &Point) -> Result<f64> {
    let sectors = polygon_sectors(v)?;
    require_polygon_interior(v, &sectors, x)?;
    require_polygon_interior(v, &sectors, y)?;
    let mut total = 0.0;
    for (_, s) in &sectors {
        total += cone_metric(s, x, y)?;
    }
    Ok(0.5 * total)
}

/// Hilbert distance in a polygon as the sum of cone metrics of the vertices
/// strictly on one side of the line `(xy)`.
pub fn distance_alexander_one_sided(v: &VRep, x: &Point, y: &Point) -> Result<f64> {
    let sectors = polygon_sectors(v)?;
    require_polygon_interior(v, &sectors, x)?;
    require_polygon_interior(v, &sectors, y)?;
    let d = y - x;
    let scale = d.norm();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for (apex, s) in &sectors {
        // signed area of (x, y, apex); vertices on the line contribute 0
        let area = d[0] * (apex[1] - x[1]) - d[1] * (apex[0] - x[0]);
        if area > TOL * scale {
            total += cone_metric(s, x, y)?;
        }
    }
    Ok(total)
}
