mod common;

use common::*;
use hilbert_core::bilipschitz::bernig_map;
use hilbert_core::embedding::{embed_polytope, simplex_embed, simplex_embed_pairwise, simplex_embed_inverse, BarycentricPoint, PolyhedralNorm};
use hilbert_core::faces::face_lattice;
use hilbert_core::metric::*;
use hilbert_core::polytope::{boundary_intersection, hrep_from_vrep, vrep_from_hrep};
use hilbert_core::sampling::{random_direction, rng, uniform_interior};
use hilbert_core::volume::{ball_boundary, ball_volume, McConfig, Measure};
use hilbert_core::{HRep, Point, VRep, TOL};
use proptest::prelude::*;

fn same_point_set(a: &[Point], b: &[Point]) -> bool {
    a.len() == b.len() && a.iter().all(|p| b.iter().any(|q| (p - q).amax() <= 1e-9))
}

fn polytope_for(seed: u64, n: usize) -> HRep {
    let mut r = rng(seed, 1);
    if n == 2 {
        let k = 3 + (seed % 8) as usize;
        hrep_from_vrep(&random_polygon(&mut r, k)).unwrap()
    } else {
        random_polytope(&mut r, n, n + 2 + (seed % 6) as usize)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn vertex_facet_roundtrip(seed in any::<u64>(), n in 2usize..=4) {
        let mut r = rng(seed, 0);
        let m = (n + 1 + (seed % 8) as usize).min(12);
        let v = random_vrep(&mut r, n, m);
        let back = vrep_from_hrep(&hrep_from_vrep(&v).unwrap()).unwrap();
        prop_assert!(same_point_set(v.vertices(), back.vertices()));
    }

    #[test]
    fn chords_end_on_the_boundary(seed in any::<u64>(), n in 2usize..=4) {
        let h = polytope_for(seed, n);
        let mut r = rng(seed, 2);
        let p = uniform_interior(&h, &mut r);
        let u = random_direction(&mut r, n);
        let c = boundary_intersection(&h, &p, &u).unwrap();
        prop_assert!(c.t_minus > 0.0 && c.t_plus > 0.0);
        for end in [&c.a, &c.b] {
            prop_assert!(h.min_value(end).abs() <= TOL);
        }
        for k in 1..20 {
            let s = -c.t_minus + (c.t_minus + c.t_plus) * k as f64 / 20.0;
            prop_assert!(h.min_value(&(&p + &u * s)) > 0.0);
        }
    }

    #[test]
    fn euler_relation(seed in any::<u64>(), n in 2usize..=3) {
        let l = face_lattice(&polytope_for(seed, n));
        prop_assert_eq!(l.euler_characteristic(), 1);
    }

    #[test]
    fn distance_formulas_and_axioms(seed in any::<u64>(), n in 2usize..=4) {
        let h = polytope_for(seed, n);
        let mut r = rng(seed, 3);
        let (p, q, s) = (uniform_interior(&h, &mut r), uniform_interior(&h, &mut r), uniform_interior(&h, &mut r));
        let d = distance_birkhoff(&h, &p, &q).unwrap();
        prop_assert!((distance_crossratio(&h, &p, &q).unwrap() - d).abs() <= 1e-9 * (1.0 + d));
        prop_assert!((distance_birkhoff(&h, &q, &p).unwrap() - d).abs() <= 1e-12 * d);
        prop_assert_eq!(distance_birkhoff(&h, &p, &p).unwrap(), 0.0);
        let via = distance_birkhoff(&h, &p, &s).unwrap() + distance_birkhoff(&h, &s, &q).unwrap();
        prop_assert!(d <= via + 1e-9);
    }

    #[test]
    fn projective_invariance(seed in any::<u64>(), n in 2usize..=3) {
        let h = polytope_for(seed, n);
        let mut r = rng(seed, 4);
        let t = Projective::random(&mut r, n, h.vertices());
        let image = hrep_from_vrep(&VRep::hull(n, h.vertices().iter().map(|v| t.apply(v)).collect()).unwrap()).unwrap();
        let (p, q) = (uniform_interior(&h, &mut r), uniform_interior(&h, &mut r));
        let d = distance_birkhoff(&h, &p, &q).unwrap();
        let e = distance_birkhoff(&image, &t.apply(&p), &t.apply(&q)).unwrap();
        prop_assert!((d - e).abs() <= 1e-8, "{} vs {}", d, e);
    }

    #[test]
    fn finsler_is_infinitesimal_distance(seed in any::<u64>(), n in 2usize..=3) {
        let h = random_round_polytope(&mut rng(seed, 1), n);
        let mut r = rng(seed, 5);
        // the next expansion term is ~ t F², so stay off the boundary
        let p = central_interior(&h, &mut r);
        let v = random_direction(&mut r, n);
        let t = 1e-6;
        let ratio = distance_birkhoff(&h, &p, &(&p + &v * t)).unwrap() / t;
        let f = finsler_norm(&h, &p, &v).unwrap();
        prop_assert!((ratio - f).abs() <= 1e-4, "ratio {} F {} depth {}", ratio, f, h.min_value(&p));
    }

    #[test]
    fn alexander_one_sided_matches_full(seed in any::<u64>()) {
        let mut r = rng(seed, 6);
        let v = random_polygon(&mut r, 3 + (seed % 9) as usize);
        let h = hrep_from_vrep(&v).unwrap();
        let (x, y) = (uniform_interior(&h, &mut r), uniform_interior(&h, &mut r));
        let full = distance_alexander(&v, &x, &y).unwrap();
        let one = distance_alexander_one_sided(&v, &x, &y).unwrap();
        prop_assert!((full - one).abs() <= 1e-9 * (1.0 + full));
    }

    #[test]
    fn embedding_is_isometric(seed in any::<u64>(), n in 2usize..=3) {
        let h = polytope_for(seed, n);
        let mut r = rng(seed, 7);
        let (p, q) = (uniform_interior(&h, &mut r), uniform_interior(&h, &mut r));
        let d = distance_birkhoff(&h, &p, &q).unwrap();
        let e = PolyhedralNorm::default().distance(&embed_polytope(&h, &p).unwrap(), &embed_polytope(&h, &q).unwrap());
        prop_assert!((d - e).abs() <= 1e-9 * (1.0 + d));
    }

    #[test]
    fn simplex_embedding_inverts(w in prop::collection::vec(0.01f64..1.0, 3..6)) {
        let p = BarycentricPoint::from_unnormalized(w).unwrap();
        let back = simplex_embed_inverse(&simplex_embed_pairwise(&p)).unwrap();
        let err = p.weights().iter().zip(back.weights()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-10);
        let again = simplex_embed(&p).to_barycentric();
        prop_assert!(again.weights().iter().zip(p.weights()).all(|(a, b)| (a - b).abs() <= 1e-12));
    }

    #[test]
    fn bernig_map_is_injective(seed in any::<u64>(), n in 2usize..=3) {
        let h = polytope_for(seed, n);
        let mut r = rng(seed, 8);
        for _ in 0..20 {
            let (x, y) = (uniform_interior(&h, &mut r), uniform_interior(&h, &mut r));
            if (&x - &y).norm() >= 1e-6 {
                prop_assert!(bernig_map(&h, &x).unwrap().distance(&bernig_map(&h, &y).unwrap()) > 0.0);
            }
        }
    }

    #[test]
    fn balls_are_nested(seed in any::<u64>(), r1 in 0.1f64..3.0, dr in 0.05f64..2.0) {
        let h = polytope_for(seed, 2);
        let o = h.analytic_center().unwrap();
        let inner = ball_boundary(&h, &o, r1, 32).unwrap();
        for p in &inner.points {
            prop_assert!((distance_birkhoff(&h, &o, p).unwrap() - r1).abs() <= 1e-8);
            prop_assert!(distance_birkhoff(&h, &o, p).unwrap() < r1 + dr);
        }
        prop_assert!(inner.params.iter().all(|&t| t > 0.0));
    }
}

#[test]
fn finsler_matches_distance_on_the_four_cube() {
    let h = HRep::cube(&[-1.0; 4], &[1.0; 4]).unwrap();
    let mut r = rng(4, 0);
    for _ in 0..200 {
        let p = central_interior(&h, &mut r);
        let v = random_direction(&mut r, 4);
        let ratio = distance_birkhoff(&h, &p, &(&p + &v * 1e-6)).unwrap() / 1e-6;
        assert!((ratio - finsler_norm(&h, &p, &v).unwrap()).abs() <= 1e-4);
    }
}

#[test]
fn bernig_norm_blows_up_toward_the_boundary() {
    for h in [HRep::unit_cube(2), HRep::regular_polygon(5, [0.0, 0.0], 1.0).unwrap(), HRep::unit_cube(3)] {
        let mut r = rng(17, 0);
        let o = h.analytic_center().unwrap();
        for _ in 0..20 {
            let u = random_direction(&mut r, h.dim());
            let c = boundary_intersection(&h, &o, &u).unwrap();
            let mut prev = f64::NEG_INFINITY;
            for k in 1..=6 {
                // exit-facet value ~ 10^{-k}
                let s = 1.0 - 10f64.powi(-k);
                let x = &o + &u * (c.t_plus * s);
                let m = bernig_map(&h, &x).unwrap().norm();
                assert!(m > prev, "not increasing at decade {k}");
                prev = m;
            }
        }
    }
}

#[test]
fn interval_bernig_distance_is_twice_hilbert() {
    let h = HRep::cube(&[-1.0], &[1.0]).unwrap();
    let mut r = rng(2, 0);
    for _ in 0..500 {
        let (x, y) = (uniform_interior(&h, &mut r), uniform_interior(&h, &mut r));
        let d = distance_birkhoff(&h, &x, &y).unwrap();
        let e = bernig_map(&h, &x).unwrap().distance(&bernig_map(&h, &y).unwrap());
        assert!((e - 2.0 * d).abs() <= 1e-12 * 2.0 * d.max(1e-300) + 1e-15);
    }
}

#[test]
fn volume_estimates_are_reproducible() {
    let h = HRep::regular_polygon(5, [0.0, 0.0], 1.0).unwrap();
    let o = Point::zeros(2);
    let cfg = McConfig { samples: 50_000, seed: 99, ..Default::default() };
    let a = ball_volume(&h, &o, 2.0, Measure::Busemann, &cfg).unwrap();
    let b = ball_volume(&h, &o, 2.0, Measure::Busemann, &cfg).unwrap();
    assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
    assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    let c = ball_volume(&h, &o, 2.0, Measure::Busemann, &McConfig { seed: 100, ..cfg }).unwrap();
    assert_ne!(a.estimate, c.estimate);
}
