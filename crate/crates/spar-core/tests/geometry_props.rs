use proptest::prelude::*;
use spar_core::geometry::{lp_jacobian, lp_norm, wrap_pseudo, PolarMap, StarBoundary};
use std::f64::consts::FRAC_PI_2;

/// `|c s' - c' s|` from central differences of the pseudo-trigonometric functions.
fn fd_jacobian(b: &StarBoundary, q: f64) -> f64 {
    let h = 1e-6;
    let (c0, s0) = b.pseudo_trig(q);
    let (cp, sp) = b.pseudo_trig(q + h);
    let (cm, sm) = b.pseudo_trig(q - h);
    let dc = (cp - cm) / (2.0 * h);
    let ds = (sp - sm) / (2.0 * h);
    (c0 * ds - dc * s0).abs()
}

#[test]
fn jacobian_constants() {
    assert_eq!(lp_jacobian(1.0, 0.3), 1.0);
    assert!((lp_jacobian(2.0, 0.3) - FRAC_PI_2).abs() < 1e-15);
    assert_eq!(lp_jacobian(f64::INFINITY, 0.3), 2.0);
    let l1 = StarBoundary::l1(2);
    let l2 = StarBoundary::l2(2);
    let li = StarBoundary::linf(2);
    for k in 0..50 {
        // offset so no angle sits on an L^1 or L^oo vertex
        let q = -2.0 + 4.0 * (k as f64 + 0.37) / 50.0;
        assert!((l1.angle_jacobian(q) - 1.0).abs() < 1e-10);
        assert!((fd_jacobian(&l1, q) - 1.0).abs() < 1e-8);
        assert!((fd_jacobian(&l2, q) - FRAC_PI_2).abs() < 1e-8);
        assert!((fd_jacobian(&li, q) - 2.0).abs() < 1e-8);
    }
}

#[test]
fn lp_jacobian_matches_finite_differences() {
    for p in [1.5, 3.0, 4.0] {
        let b = StarBoundary::lp(p, 2).unwrap();
        for k in 0..50 {
            let q = -2.0 + 4.0 * (k as f64 + 0.5) / 50.0;
            let exact = b.angle_jacobian(q);
            let fd = fd_jacobian(&b, q);
            assert!(((exact - fd) / fd).abs() < 1e-5, "p={p} q={q} {exact} {fd}");
        }
    }
}

#[test]
fn pseudo_angle_is_normalised_arc_length() {
    // the boundary point at pseudo-angle q sits a fraction (q+2)/4 of the way round from q=-2
    for p in [1.0, 1.5, 2.0, 3.0] {
        let b = StarBoundary::lp(p, 2).unwrap();
        let start = b.pseudo_trig(-2.0);
        for q in [-1.5, -0.7, 0.0, 0.4, 1.3] {
            let (c, s) = b.pseudo_trig(q);
            let arc = b.arc_length([start.0, start.1], [c, s]).unwrap();
            let expect = (q + 2.0) / 4.0 * b.circumference();
            assert!((arc - expect).abs() < 1e-8 * b.circumference(), "p={p} q={q}");
        }
    }
}

proptest! {
    #[test]
    fn pseudo_angle_round_trip(q in -1.999f64..2.0, p in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0, 4.0])) {
        let b = StarBoundary::lp(p, 2).unwrap();
        let (c, s) = b.pseudo_trig(q);
        prop_assert!((lp_norm(p, &[c, s]) - 1.0).abs() < 1e-9);
        let back = b.pseudo_angle([c, s]).unwrap();
        let d = wrap_pseudo(back - q).abs();
        prop_assert!(d < 1e-8, "q={} back={}", q, back);
    }

    #[test]
    fn gauge_is_positively_homogeneous(x in -5.0f64..5.0, y in -5.0f64..5.0, a in 0.01f64..100.0) {
        prop_assume!(x.abs() + y.abs() > 1e-3);
        for b in [StarBoundary::l1(2), StarBoundary::l2(2), StarBoundary::lp(3.0, 2).unwrap(), StarBoundary::elliptical(0.4).unwrap()] {
            let g1 = b.gauge(&[x, y]).unwrap();
            let g2 = b.gauge(&[a * x, a * y]).unwrap();
            prop_assert!((g2 - a * g1).abs() < 1e-9 * g2.max(1.0));
        }
    }

    #[test]
    fn polar_round_trip(x in -5.0f64..5.0, y in -5.0f64..5.0) {
        prop_assume!(x.abs() + y.abs() > 1e-3);
        for m in [PolarMap::l1(2), PolarMap::standard()] {
            let p = m.to_polar(&[x, y]).unwrap();
            let back = m.from_polar(p.r, p.angle.unwrap());
            prop_assert!((back[0] - x).abs() < 1e-9 && (back[1] - y).abs() < 1e-9);
        }
    }
}
