use proptest::prelude::*;
use spar_core::copulas::{CopulaModel, EvDependence, Family};

fn families() -> Vec<Family> {
    vec![
        Family::Frank { alpha: 4.0 },
        Family::Frank { alpha: -3.0 },
        Family::Joe { alpha: 2.5 },
        Family::Gaussian { rho: 0.6 },
        Family::Gaussian { rho: -0.4 },
        Family::StudentT { rho: 0.5, nu: 3.0 },
        Family::Ev(EvDependence::SymmetricLogistic { alpha: 2.0 }),
        Family::Ev(EvDependence::AsymmetricLogistic { alpha: 3.0, gamma1: 0.7, gamma2: 0.4 }),
        Family::Ev(EvDependence::HuslerReiss { alpha: 1.5 }),
        Family::Clayton { alpha: 1.5 },
        Family::Clayton { alpha: -0.2 },
        Family::Nelsen4215 { alpha: 3.0 },
        Family::BivExponential { alpha: 0.6 },
    ]
}

/// Mixed central difference of the cdf, an oracle for the density.
fn fd_density(c: &CopulaModel, u: f64, v: f64) -> f64 {
    let h = 1e-4;
    let f = |a: f64, b: f64| c.cdf(&[a, b]);
    (f(u + h, v + h) - f(u + h, v - h) - f(u - h, v + h) + f(u - h, v - h)) / (4.0 * h * h)
}

#[test]
fn density_is_mixed_derivative_of_cdf() {
    let pts = [(0.3, 0.4), (0.7, 0.2), (0.55, 0.85), (0.9, 0.8), (0.15, 0.6)];
    for fam in families() {
        let c = CopulaModel::new(fam).unwrap();
        for &(u, v) in &pts {
            let d = c.density(&[u, v]);
            let fd = fd_density(&c, u, v);
            // skip points within one step of a support boundary, where the cdf has a kink
            if d == 0.0 && fd.abs() < 1e-3 {
                continue;
            }
            assert!((d - fd).abs() < 2e-5 * d.max(1.0), "{fam:?} at ({u},{v}): {d} vs {fd}");
        }
    }
}

#[test]
fn survival_copula_reflects_both_coordinates() {
    for fam in families() {
        let c = CopulaModel::new(fam).unwrap();
        let s = c.reflect_corner([1, 1]);
        for &(u, v) in &[(0.3, 0.4), (0.8, 0.25)] {
            let (a, b) = (s.density(&[u, v]), c.density(&[1.0 - u, 1.0 - v]));
            assert!((a - b).abs() < 1e-12 * b.max(1.0), "{fam:?}: {a} vs {b}");
        }
    }
}

#[test]
fn clayton_negative_parameter_has_restricted_support() {
    let c = CopulaModel::new(Family::Clayton { alpha: -0.2 }).unwrap();
    // u^{-α} + v^{-α} - 1 ≤ 0 outside the support, e.g. at u = v = 0.02
    assert_eq!(c.density(&[0.02, 0.02]), 0.0);
    assert!(c.density(&[0.5, 0.5]) > 0.0);
}

#[test]
fn samples_are_deterministic_and_match_the_cdf() {
    let n = 20_000;
    for fam in [Family::Gaussian { rho: 0.6 }, Family::Joe { alpha: 2.0 }, Family::Clayton { alpha: -0.2 }] {
        let c = CopulaModel::new(fam).unwrap();
        let a = c.sample_seeded(n, 11);
        assert_eq!(a, c.sample_seeded(n, 11));
        assert_ne!(a, c.sample_seeded(n, 12));
        for &(u, v) in &[(0.3, 0.3), (0.5, 0.8), (0.9, 0.6)] {
            let emp = a.iter().filter(|p| p[0] <= u && p[1] <= v).count() as f64 / n as f64;
            let p = c.cdf(&[u, v]);
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((emp - p).abs() < 5.0 * se + 1e-4, "{fam:?} {u} {v}: {emp} vs {p}");
        }
    }
}

proptest! {
    #[test]
    fn cdf_within_frechet_bounds(u in 0.001f64..0.999, v in 0.001f64..0.999, k in 0usize..13) {
        let c = CopulaModel::new(families()[k]).unwrap();
        let p = c.cdf(&[u, v]);
        prop_assert!(p >= (u + v - 1.0).max(0.0) - 1e-12);
        prop_assert!(p <= u.min(v) + 1e-12);
        prop_assert!(c.density(&[u, v]) >= 0.0);
    }

    #[test]
    fn stable_tail_function_bounds(x in 0.01f64..5.0, y in 0.01f64..5.0, a in 0.1f64..10.0) {
        for d in [EvDependence::SymmetricLogistic { alpha: 2.5 },
                  EvDependence::AsymmetricLogistic { alpha: 2.0, gamma1: 0.3, gamma2: 0.8 },
                  EvDependence::HuslerReiss { alpha: 0.8 }] {
            let v = d.a(x, y);
            // max(x, y) ≤ A(x, y) ≤ x + y, homogeneous of order one
            prop_assert!(v >= x.max(y) - 1e-12 && v <= x + y + 1e-12);
            prop_assert!((d.a(a * x, a * y) - a * v).abs() < 1e-10 * a * v);
        }
    }
}
