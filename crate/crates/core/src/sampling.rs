//! Seeded random sampling and deterministic direction sets.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::polytope::{chord_params, HRep, Point, Vector};

/// Independent stream `stream` of the generator seeded with `seed`.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Euclidean volume of the unit ball of `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * std::f64::consts::TAU / n as f64,
    }
}

/// Surface area of the unit sphere `S^{n-1}`.
pub fn unit_sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

pub fn random_direction<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vector {
    loop {
        let v = DVector::from_fn(n, |_, _| StandardNormal.sample(rng));
        let norm: f64 = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

/// `k` roughly uniform unit vectors, deterministic for given `(n, k)`.
///
/// The set is antipodally symmetric: for odd `k` one extra direction is
/// added, and the second half is the negation of the first. The first half
/// is equally spaced angles on a half circle in 2-D, a Fibonacci lattice on
/// the upper hemisphere in 3-D and seeded Gaussian directions above that.
pub fn unit_directions(n: usize, k: usize) -> Vec<Vector> {
    let half = k.div_ceil(2).max(1);
    let first: Vec<Vector> = match n {
        1 => vec![DVector::from_element(1, 1.0)],
        2 => (0..half)
            .map(|j| {
                let a = std::f64::consts::PI * (j as f64 + 0.5) / half as f64;
                DVector::from_vec(vec![a.cos(), a.sin()])
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..half)
                .map(|j| {
                    let z = 1.0 - (j as f64 + 0.5) / half as f64;
                    let r = (1.0 - z * z).sqrt();
                    let a = golden * j as f64;
                    DVector::from_vec(vec![r * a.cos(), r * a.sin(), z])
                })
                .collect()
        }
        _ => {
            let mut r = rng(0x5eed_d1c7, n as u64);
            (0..half).map(|_| random_direction(&mut r, n)).collect()
        }
    };
    let second: Vec<Vector> = first.iter().map(|u| -u).collect();
    first.into_iter().chain(second).collect()
}

/// Uniform point of the interior by rejection from the bounding box.
pub fn uniform_interior<R: Rng + ?Sized>(h: &HRep, rng: &mut R) -> Point {
    let (lo, hi) = h.bounding_box();
    loop {
        let x = DVector::from_fn(h.dim(), |k, _| lo[k] + (hi[k] - lo[k]) * rng.random::<f64>());
        if h.is_interior(&x) {
            return x;
        }
    }
}

/// Interior point whose nearest facet value is about `depth`: walk from a
/// uniform interior point along a random ray and stop short of the exit
/// facet.
pub fn point_at_depth<R: Rng + ?Sized>(h: &HRep, rng: &mut R, depth: f64) -> Point {
    loop {
        let p = uniform_interior(h, rng);
        let u = random_direction(rng, h.dim());
        let (_, t_plus) = chord_params(h, &p, &u);
        let b = &p + &u * t_plus;
        // exit facet: the one vanishing at b
        let lp = h
            .functionals()
            .iter()
            .filter(|f| f.gradient.dot(&u) < 0.0)
            .min_by(|f, g| f.eval(&b).abs().total_cmp(&g.eval(&b).abs()))
            .map(|f| f.eval(&p));
        let Some(lp) = lp else { continue };
        let s = depth / lp;
        if s >= 1.0 {
            continue;
        }
        let x = &b + (&p - &b) * s;
        if h.min_value(&x) > 0.0 {
            return x;
        }
    }
}

/// Uniform point of the standard simplex (Dirichlet(1, …, 1) weights).
pub fn dirichlet<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..m).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x: f64| x / s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(2) - std::f64::consts::PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 4.0 * std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn directions_are_unit_and_deterministic() {
        for n in 1..=4 {
            let a = unit_directions(n, 50);
            let b = unit_directions(n, 50);
            assert_eq!(a, b);
            let h = a.len() / 2;
            assert!((0..h).all(|j| a[j] == -&a[j + h]));
            assert!(a.iter().all(|u| (u.norm() - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn depth_sampling_hits_requested_depth() {
        let h = HRep::unit_cube(2);
        let mut r = rng(3, 0);
        for &d in &[1e-2, 1e-5] {
            for _ in 0..20 {
                let x = point_at_depth(&h, &mut r, d);
                let m = h.min_value(&x);
                assert!(m > 0.0 && m <= d * (1.0 + 1e-6));
            }
        }
    }
}
