use proptest::prelude::*;
use spar_core::ardensity::ArDensityEngine;
use spar_core::copulas::{CopulaModel, EvDependence, Family};
use spar_core::geometry::{PolarMap, StarBoundary};
use spar_core::margins::Margin;
use spar_core::quad::{integrate, Tolerance};
use spar_core::spar::*;

fn catalog_families() -> Vec<Family> {
    vec![
        Family::Independence,
        Family::Frank { alpha: 10.0 },
        Family::Joe { alpha: 2.0 },
        Family::Joe { alpha: 3.0 },
        Family::Gaussian { rho: 0.6 },
        Family::Gaussian { rho: -0.4 },
        Family::StudentT { rho: 0.6, nu: 2.0 },
        Family::StudentT { rho: -0.3, nu: 5.0 },
        Family::Ev(EvDependence::SymmetricLogistic { alpha: 2.0 }),
        Family::Ev(EvDependence::SymmetricLogistic { alpha: 3.0 }),
        Family::Ev(EvDependence::AsymmetricLogistic { alpha: 3.0, gamma1: 0.7, gamma2: 0.4 }),
        Family::Ev(EvDependence::HuslerReiss { alpha: 1.5 }),
        Family::BivExponential { alpha: 0.5 },
    ]
}

fn laplace(f: Family) -> ArDensityEngine {
    let c = if let Family::Independence = f { CopulaModel::independence(2).unwrap() } else { CopulaModel::new(f).unwrap() };
    ArDensityEngine::new(c, Margin::laplace(), PolarMap::l1(2), None).unwrap()
}

fn l1_point(q: f64) -> [f64; 2] {
    let (c, s) = StarBoundary::l1(2).pseudo_trig(q);
    [c, s]
}

#[test]
fn catalog_matches_bias_corrected_slope() {
    // δ_L ~ g r^β e^{-r(λ-1)}, so the two-point slope is λ - 1 - β ln(r_hi/r_lo)/(r_hi - r_lo) up to o(1/r)
    let (lo, hi) = (120.0, 240.0);
    for f in [
        Family::Frank { alpha: 10.0 },
        Family::Joe { alpha: 3.0 },
        Family::StudentT { rho: 0.6, nu: 5.0 },
        Family::Ev(EvDependence::SymmetricLogistic { alpha: 3.0 }),
        Family::Gaussian { rho: 0.6 },
    ] {
        let e = laplace(f);
        let tol = if matches!(f, Family::Gaussian { .. }) { 0.02 } else { 0.005 };
        for k in 0..36 {
            let q = -2.0 + 4.0 * (k as f64 + 0.5) / 36.0;
            let w = l1_point(q);
            let en = lambda_catalog(&e.copula, w).unwrap().unwrap();
            let s = numeric_lambda_slope(&e, &w, lo, hi).unwrap();
            let expect = en.lambda - 1.0 - en.beta * (hi / lo).ln() / (hi - lo);
            assert!((s - expect).abs() < tol, "{f:?} q={q}: slope {s} expected {expect}");
        }
    }
}

#[test]
fn limit_sets_touch_the_unit_box() {
    for f in catalog_families() {
        let e = laplace(f);
        let grid = angle_grid(720, &catalog_knots(&e.copula));
        let m = build_spar(&e, &SparOptions::new(0.05, Source::Catalog), &grid).unwrap();
        let ls = limit_set(&m).unwrap();
        assert!(ls.max_abs() <= 1.0 + 1e-9, "{f:?}: {}", ls.max_abs());
        for j in 0..2 {
            for sign in [1.0, -1.0] {
                assert!(ls.extent(j, sign) >= 1.0 - 1e-3, "{f:?} coord {j} sign {sign}: {}", ls.extent(j, sign));
            }
        }
    }
}

#[test]
fn limit_set_reference_points() {
    for rho in [-0.7, 0.0, 0.4, 0.9] {
        let e = laplace(Family::StudentT { rho, nu: 2.0 });
        let m = build_spar(&e, &SparOptions::new(0.05, Source::Catalog), &[0.5]).unwrap();
        let p = &limit_set(&m).unwrap().points[0];
        assert!((p[0] - 1.0).abs() < 1e-12 && (p[1] - 1.0).abs() < 1e-12, "rho={rho}");
    }
    let e = laplace(Family::Gaussian { rho: 0.6 });
    let m = build_spar(&e, &SparOptions::new(0.05, Source::Catalog), &[0.5]).unwrap();
    let p = &limit_set(&m).unwrap().points[0];
    assert!((p[0] - 0.8).abs() < 1e-6 && (p[1] - 0.8).abs() < 1e-6);
    // independence: the unit L¹ diamond
    let e = laplace(Family::Independence);
    let grid = angle_grid(40, &[]);
    let m = build_spar(&e, &SparOptions::new(0.05, Source::Catalog), &grid).unwrap();
    for p in limit_set(&m).unwrap().points {
        assert!((p[0].abs() + p[1].abs() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn husler_reiss_is_degenerate_off_the_diagonal() {
    let e = laplace(Family::Ev(EvDependence::HuslerReiss { alpha: 1.5 }));
    let m = build_spar(&e, &SparOptions::new(0.05, Source::Catalog), &[0.25, 0.5, -0.5, -1.5]).unwrap();
    let flags: Vec<bool> = m.records.iter().map(|r| r.flags.degenerate).collect();
    assert_eq!(flags, vec![true, false, true, false]);
    assert_eq!(limit_set(&m).unwrap().points[0], vec![0.0, 0.0]);
    assert!(m.records.iter().all(|r| r.sigma > 0.0 && r.xi == 0.0));
}

#[test]
fn gp_tail_integrates_to_the_exceedance_mass() {
    let c = CopulaModel::new(Family::StudentT { rho: 0.6, nu: 2.0 }).unwrap();
    let e = ArDensityEngine::new(c, Margin::student_t(2.0).unwrap(), PolarMap::standard(), None).unwrap();
    let m = build_spar(&e, &SparOptions::new(0.05, Source::Catalog), &[0.3, 2.0]).unwrap();
    // the Nelsen model has a finite endpoint
    let n = CopulaModel::new(Family::Nelsen4215 { alpha: 3.0 }).unwrap().reflect_corner([1, 1]);
    let en = ArDensityEngine::new(n, Margin::gp(-1.0 / 3.0, 1.0).unwrap(), PolarMap::l1(2), None).unwrap();
    let mn = build_spar(&en, &SparOptions::new(0.1, Source::Numeric), &[0.3]).unwrap();
    for (model, rec) in m.records.iter().map(|r| (&m, r)).chain(mn.records.iter().map(|r| (&mn, r))) {
        let tol = Tolerance { abs: 0.0, rel: 1e-12, max_intervals: 2000 };
        let total = if rec.xi < 0.0 {
            let end = rec.mu - rec.sigma / rec.xi;
            integrate(|r| model.record_density(rec, r).unwrap(), rec.mu, end, tol).value
        } else {
            // substitute r = μ + t/(1-t) to map [μ, ∞) onto [0, 1)
            integrate(
                |t| {
                    if t >= 1.0 {
                        return 0.0;
                    }
                    let r = rec.mu + t / (1.0 - t);
                    model.record_density(rec, r).unwrap() / ((1.0 - t) * (1.0 - t))
                },
                0.0,
                1.0,
                tol,
            )
            .value
        };
        let target = rec.zeta * rec.f_w;
        assert!((total - target).abs() < 1e-8 * target.max(1.0), "{total} vs {target}");
    }
}

#[test]
fn below_threshold_is_an_error() {
    let e = laplace(Family::Joe { alpha: 2.0 });
    let m = build_spar(&e, &SparOptions::new(0.05, Source::Catalog), &[0.3]).unwrap();
    let mu = m.records[0].mu;
    assert!(spar_density(&m, mu - 1e-6, 0.3).is_err());
    assert!(spar_density(&m, mu, 0.3).unwrap() > 0.0);
}

#[test]
fn short_tail_spar_is_exact() {
    // Nelsen 4.2.15 α=3 survival on GP(ξ=-1/3): ξ = -1/2 and the tail is reproduced exactly
    let n = CopulaModel::new(Family::Nelsen4215 { alpha: 3.0 }).unwrap().reflect_corner([1, 1]);
    let e = ArDensityEngine::new(n, Margin::gp(-1.0 / 3.0, 1.0).unwrap(), PolarMap::l1(2), None).unwrap();
    let m = build_spar(&e, &SparOptions::new(0.05, Source::Numeric), &[0.2, 0.5, 0.8]).unwrap();
    for rec in &m.records {
        assert!((rec.xi + 0.5).abs() < 1e-9, "{}", rec.xi);
        let a = rec.angle.unwrap();
        let end = rec.mu - rec.sigma / rec.xi;
        for s in [0.1, 0.5, 0.9] {
            let r = rec.mu + s * (end - rec.mu);
            let sp = m.record_density(rec, r).unwrap();
            let tr = e.joint_polar_density(r, a);
            assert!((sp / tr - 1.0).abs() < 1e-6, "{sp} vs {tr}");
        }
    }
    // survival Clayton α=-0.2 on GP(ξ=-0.2): ξ = α/(1+α)
    let c = CopulaModel::new(Family::Clayton { alpha: -0.2 }).unwrap().reflect_corner([1, 1]);
    let e = ArDensityEngine::new(c, Margin::gp(-0.2, 1.0).unwrap(), PolarMap::l1(2), None).unwrap();
    let m = build_spar(&e, &SparOptions::new(0.05, Source::Numeric), &[0.3]).unwrap();
    assert!((m.records[0].xi + 0.25).abs() < 1e-3, "{}", m.records[0].xi);
    assert!((m.records[0].f_w - 1.0).abs() < 1e-8);
}

#[test]
fn independence_short_tail_index_jumps_on_the_diagonal() {
    let e = ArDensityEngine::new(CopulaModel::independence(2).unwrap(), Margin::gp(-0.5, 1.0).unwrap(), PolarMap::l1(2), None)
        .unwrap();
    let k1 = endpoint_index(&e, 0.45).unwrap();
    let k2 = endpoint_index(&e, 0.5).unwrap();
    assert!((k2 - k1).abs() > 0.5, "{k1} {k2}");
    // off the diagonal one margin reaches its endpoint first (index 2); on it both do (index 3)
    assert!((k1 - 2.0).abs() < 0.01 && (k2 - 3.0).abs() < 0.01);
}

#[test]
fn independence_gamma_tail_in_three_dimensions() {
    let e = ArDensityEngine::new(CopulaModel::independence(3).unwrap(), Margin::laplace(), PolarMap::l1(3), None).unwrap();
    let grid: Vec<Vec<f64>> = l1_sphere_grid3(2).into_iter().map(|p| p.to_vec()).collect();
    let m = build_spar_vector(&e, &SparOptions::new(0.05, Source::Catalog), &grid).unwrap();
    assert_eq!(m.records.len(), grid.len());
    for rec in &m.records {
        assert!((rec.f_w - 0.25).abs() < 1e-8);
        assert_eq!(rec.sigma, 1.0);
        for r in [rec.mu, rec.mu + 3.0, rec.mu + 12.0] {
            // exact joint density r^{d-1} f_X = r² e^{-r}/8 on the L¹ sphere
            let exact = r * r * (-r).exp() / 8.0;
            let v = m.record_density(rec, r).unwrap();
            assert!((v - exact).abs() < 1e-10 * exact.max(1e-300) + 1e-300, "{v} {exact}");
        }
    }
}

#[test]
fn pareto_ev_refined_scale_oracle() {
    // f_{R,Q}(r, q) r² → b̃(q) = -A^{(1,1)}(q, 1-q)/(q(1-q)) on Pareto margins with unit origin
    let dep = EvDependence::SymmetricLogistic { alpha: 2.0 };
    let c = CopulaModel::new(Family::Ev(dep)).unwrap();
    let e = ArDensityEngine::new(c, Margin::StandardPareto, PolarMap::l1(2), Some(vec![1.0, 1.0])).unwrap();
    for q in [0.2f64, 0.5, 0.7] {
        // A(x, y) = (x² + y²)^{1/2}: A^{(1,1)} = -xy (x² + y²)^{-3/2}
        let (x, y) = (q, 1.0 - q);
        let b = x * y * (x * x + y * y).powf(-1.5) / (q * (1.0 - q));
        let r = 1e5;
        let v = e.joint_polar_density(r, q) * r * r;
        assert!((v / b - 1.0).abs() < 1e-3, "q={q}: {v} vs {b}");
    }
    let m = build_spar(&e, &SparOptions::new(0.05, Source::Catalog), &[0.5]).unwrap();
    let rec = &m.records[0];
    assert_eq!(m.variant, Variant::ParetoTail);
    assert_eq!(rec.xi, 1.0);
    assert!(rec.sigma > rec.mu);
}

#[test]
fn gaussian_on_pareto_compensated_angular_law() {
    let c = CopulaModel::new(Family::Gaussian { rho: 0.6 }).unwrap();
    let kappa = 2.0 / 1.6;
    let e = ArDensityEngine::new(c, Margin::StandardPareto, PolarMap::l1(2), Some(vec![0.0, 0.0])).unwrap();
    let v: Vec<f64> = (0..=30)
        .map(|i| 0.2 + 0.02 * i as f64)
        .map(|q: f64| e.joint_polar_density(1e4, q) * (q * (1.0 - q)).powf(1.0 + kappa / 2.0))
        .collect();
    let ratio = v.iter().cloned().fold(0.0, f64::max) / v.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(ratio < 1.15, "{ratio}");
}

#[test]
fn asymmetric_logistic_origin_speeds_convergence() {
    let (a, g1, g2) = (5.0, 0.9, 0.1);
    let c = CopulaModel::new(Family::Ev(EvDependence::AsymmetricLogistic { alpha: a, gamma1: g1, gamma2: g2 })).unwrap();
    let o = asymmetric_logistic_origin(a, g1, g2).unwrap();
    let plain = ArDensityEngine::new(c.clone(), Margin::laplace(), PolarMap::l1(2), None).unwrap();
    let shifted = ArDensityEngine::new(c.clone(), Margin::laplace(), PolarMap::l1(2), Some(o.to_vec())).unwrap();
    let w = l1_point(0.5);
    let lam = lambda_catalog(&c, w).unwrap().unwrap().lambda;
    let e0 = (numeric_lambda_slope(&plain, &w, 10.0, 20.0).unwrap() - (lam - 1.0)).abs();
    let e1 = (numeric_lambda_slope(&shifted, &w, 10.0, 20.0).unwrap() - (lam - 1.0)).abs();
    assert!(e1 < e0, "{e1} vs {e0}");
}

proptest! {
    #[test]
    fn lambda_is_homogeneous(q in -1.999f64..2.0, a in prop::sample::select(vec![0.5, 2.0, 3.7]), k in 0usize..13) {
        let f = catalog_families()[k];
        let c = if let Family::Independence = f { CopulaModel::independence(2).unwrap() } else { CopulaModel::new(f).unwrap() };
        let w = l1_point(q);
        if let Some(l) = lambda_homogeneous(&c, w).unwrap() {
            let la = lambda_homogeneous(&c, [a * w[0], a * w[1]]).unwrap().unwrap();
            prop_assert!((la - a * l).abs() < 1e-12 * la.max(1.0));
        }
    }

    #[test]
    fn catalog_lambda_respects_bounds(q in -1.999f64..2.0, k in 0usize..13) {
        // max(|w1|, |w2|) ≤ λ(w) on Laplace margins, which keeps the limit set inside the unit box
        let f = catalog_families()[k];
        let c = if let Family::Independence = f { CopulaModel::independence(2).unwrap() } else { CopulaModel::new(f).unwrap() };
        let w = l1_point(q);
        let e = lambda_catalog(&c, w).unwrap().unwrap();
        if e.profile == Profile::Standard {
            prop_assert!(e.lambda >= w[0].abs().max(w[1].abs()) - 1e-12, "{:?} q={} λ={}", f, q, e.lambda);
        }
    }

    #[test]
    fn angle_grid_contains_knots(n in 8usize..200) {
        let c = CopulaModel::new(Family::Ev(EvDependence::AsymmetricLogistic { alpha: 2.5, gamma1: 0.3, gamma2: 0.6 })).unwrap();
        let knots = catalog_knots(&c);
        let g = angle_grid(n, &knots);
        prop_assert!(g.windows(2).all(|p| p[0] < p[1]));
        prop_assert!(g.iter().all(|&q| q > -2.0 && q <= 2.0));
        for k in knots {
            prop_assert!(g.iter().any(|&q| (q - k).abs() < 1e-12));
        }
    }
}
