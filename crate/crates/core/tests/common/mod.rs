#![allow(dead_code)]

use hilbert_core::polytope::hrep_from_vrep;
use hilbert_core::{HRep, Point, VRep};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

pub fn pt(c: &[f64]) -> Point {
    DVector::from_row_slice(c)
}

/// Convex polygon from `k` jittered points on a jittered ellipse.
pub fn random_polygon<R: Rng>(rng: &mut R, k: usize) -> VRep {
    let (ax, ay) = (rng.random_range(0.5..2.0), rng.random_range(0.5..2.0));
    let (cx, cy) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let mut angles: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
    angles.sort_by(f64::total_cmp);
    let pts = angles.iter().map(|a| pt(&[cx + ax * a.cos(), cy + ay * a.sin()])).collect();
    VRep::hull(2, pts).expect("random polygon")
}

/// Hull of `m` uniform points in `[-1, 1]^n`, retried until full-dimensional.
pub fn random_vrep<R: Rng>(rng: &mut R, n: usize, m: usize) -> VRep {
    loop {
        let pts = (0..m).map(|_| DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))).collect();
        if let Ok(v) = VRep::hull(n, pts) {
            return v;
        }
    }
}

pub fn random_polytope<R: Rng>(rng: &mut R, n: usize, m: usize) -> HRep {
    hrep_from_vrep(&random_vrep(rng, n, m)).expect("hull is a polytope")
}

/// Random polytope with at most `max_facets` facets.
pub fn random_polytope_facets<R: Rng>(rng: &mut R, n: usize, max_facets: usize) -> HRep {
    loop {
        let m = rng.random_range(n + 1..=n + 4);
        let h = random_polytope(rng, n, m);
        if h.num_facets() <= max_facets {
            return h;
        }
    }
}

/// `x ↦ (A x + b) / (<c, x> + 1)` with the denominator bounded below by ½ on
/// the given points.
pub struct Projective {
    a: DMatrix<f64>,
    b: DVector<f64>,
    c: DVector<f64>,
}

impl Projective {
    pub fn random<R: Rng>(rng: &mut R, n: usize, domain: &[Point]) -> Self {
        loop {
            let a = DMatrix::from_fn(n, n, |i, j| (i == j) as u8 as f64 + rng.random_range(-0.5..0.5));
            if a.determinant().abs() < 0.1 {
                continue;
            }
            let b = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
            let c = DVector::from_fn(n, |_, _| rng.random_range(-0.4..0.4));
            if domain.iter().all(|x| c.dot(x) + 1.0 > 0.5) {
                return Self { a, b, c };
            }
        }
    }

    pub fn apply(&self, x: &Point) -> Point {
        (&self.a * x + &self.b) / (self.c.dot(x) + 1.0)
    }
}

/// Uniform point of the homothetic copy of `h` scaled by ½ about its
/// analytic center.
pub fn central_interior<R: Rng>(h: &HRep, rng: &mut R) -> Point {
    let c = h.analytic_center().unwrap();
    let x = hilbert_core::sampling::uniform_interior(h, rng);
    &c + (x - &c) * 0.5
}

/// Hull of random unit vectors, retried until the facet values at the
/// analytic center are all at least 0.3 (a well-rounded polytope).
pub fn random_round_polytope<R: Rng>(rng: &mut R, n: usize) -> HRep {
    loop {
        let m = rng.random_range(3 * n..=3 * n + 4);
        let pts = (0..m).map(|_| hilbert_core::sampling::random_direction(rng, n)).collect();
        let Ok(v) = VRep::hull(n, pts) else { continue };
        let Ok(h) = hrep_from_vrep(&v) else { continue };
        if h.min_value(&h.analytic_center().unwrap()) >= 0.3 {
            return h;
        }
    }
}
