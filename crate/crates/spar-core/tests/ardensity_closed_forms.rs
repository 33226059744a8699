use spar_core::ardensity::{ArDensityEngine, EllipticalModel, Generator};
use spar_core::copulas::{CopulaModel, Family};
use spar_core::geometry::{AngularSystem, PolarMap, StarBoundary};
use spar_core::margins::Margin;
use std::f64::consts::PI;

fn euclid_angles(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| -PI + 2.0 * PI * (k as f64 + 0.5) / n as f64)
}

#[test]
fn normal_angular_density_matches_closed_form() {
    for rho in [-0.5, 0.7] {
        let c = CopulaModel::new(Family::Gaussian { rho }).unwrap();
        let e = ArDensityEngine::new(c, Margin::Normal, PolarMap::standard(), None).unwrap();
        for th in euclid_angles(100) {
            let exact = (1.0 - rho * rho).sqrt() / (2.0 * PI * (1.0 - rho * (2.0 * th).sin()));
            let f = e.angular_density(th).value().unwrap();
            assert!((f - exact).abs() < 1e-8, "rho={rho} θ={th}: {f} vs {exact}");
        }
    }
}

#[test]
fn elliptic_radius_survivors() {
    // engine with elliptic radius and Euclidean angle versus exp(-r²/2) and (1+r²/ν)^{-ν/2}
    let rho = 0.6;
    let map = PolarMap::new(StarBoundary::elliptical(rho).unwrap(), AngularSystem::euclidean()).unwrap();
    let g = ArDensityEngine::new(CopulaModel::new(Family::Gaussian { rho }).unwrap(), Margin::Normal, map.clone(), None)
        .unwrap();
    let nu = 3.0;
    let t = ArDensityEngine::new(
        CopulaModel::new(Family::StudentT { rho, nu }).unwrap(),
        Margin::student_t(nu).unwrap(),
        map,
        None,
    )
    .unwrap();
    for th in euclid_angles(7) {
        for r in [0.3, 1.0, 2.5, 4.0] {
            let a = g.conditional_survivor(r, th).unwrap();
            assert!((a - (-0.5 * r * r).exp()).abs() < 1e-8, "normal θ={th} r={r}");
            let b = t.conditional_survivor(r, th).unwrap();
            assert!((b - (1.0 + r * r / nu).powf(-0.5 * nu)).abs() < 1e-8, "t θ={th} r={r}");
        }
    }
    let m = EllipticalModel::new(Generator::StudentT { nu }, rho).unwrap();
    assert!((m.conditional_survivor(2.0) - (1.0 + 4.0 / nu).powf(-0.5 * nu)).abs() < 1e-15);
}

#[test]
fn independence_angular_density_is_constant() {
    // f_W = 2^{-d} (d-1)! on the L¹ sphere
    let e2 = ArDensityEngine::new(CopulaModel::independence(2).unwrap(), Margin::laplace(), PolarMap::l1(2), None).unwrap();
    for k in 0..16 {
        let q = -2.0 + 4.0 * (k as f64 + 0.3) / 16.0;
        assert!((e2.angular_density(q).value().unwrap() - 0.25).abs() < 1e-8);
    }
    let e3 = ArDensityEngine::new(CopulaModel::independence(3).unwrap(), Margin::laplace(), PolarMap::l1(3), None).unwrap();
    for w in [[0.2, -0.5, 0.3], [-0.1, -0.1, -0.8], [0.6, 0.3, -0.1]] {
        assert!((e3.angular_density_vector(&w).unwrap().value().unwrap() - 0.25).abs() < 1e-8);
    }
}

#[test]
fn clayton_on_short_tailed_margins_is_exact() {
    // survival Clayton α=-0.2 on GP(ξ=-0.2): f_Q ≡ 1 and f_{R,Q}(1, q) = 0.8^4
    let c = CopulaModel::new(Family::Clayton { alpha: -0.2 }).unwrap().reflect_corner([1, 1]);
    let e = ArDensityEngine::new(c, Margin::gp(-0.2, 1.0).unwrap(), PolarMap::l1(2), None).unwrap();
    for k in 0..19 {
        let q = 0.05 * (k + 1) as f64;
        assert!((e.angular_density(q).value().unwrap() - 1.0).abs() < 1e-8, "q={q}");
        assert!((e.joint_polar_density(1.0, q) - 0.4096).abs() < 1e-10, "q={q}");
    }
}

#[test]
fn nelsen_on_short_tailed_margins_is_exact() {
    // survival Nelsen 4.2.15 α=3 on GP(ξ=-1/3): closed forms for f_Q and f_{R|Q}
    let a = 3.0;
    let c = CopulaModel::new(Family::Nelsen4215 { alpha: a }).unwrap().reflect_corner([1, 1]);
    let e = ArDensityEngine::new(c, Margin::gp(-1.0 / a, 1.0).unwrap(), PolarMap::l1(2), None).unwrap();
    for q in [0.1f64, 0.25, 0.5, 0.7, 0.93] {
        let p: f64 = (1.0 - q).powf(a) + q.powf(a);
        let fq_exact = a * (q * (1.0 - q)).powf(a - 1.0) * p.powi(-2);
        let fq = e.angular_density(q).value().unwrap();
        assert!((fq - fq_exact).abs() < 1e-10 * fq_exact.max(1.0), "q={q}: {fq} vs {fq_exact}");
        let r_f = a / p.powf(1.0 / a);
        // GP with ξ = -1/2 and endpoint r_F: density (2/r_F)(1 - r/r_F)
        for s in [0.05, 0.3, 0.6, 0.95] {
            let r = s * r_f;
            let cond = e.joint_polar_density(r, q) / fq;
            let gp = 2.0 / r_f * (1.0 - r / r_f);
            assert!((cond - gp).abs() < 1e-10, "q={q} r={r}: {cond} vs {gp}");
        }
    }
    assert!((e.angular_density(0.5).value().unwrap() - 3.0).abs() < 1e-10);
}

#[test]
fn divergent_angular_densities_are_flagged() {
    let f = CopulaModel::new(Family::Frank { alpha: 5.0 }).unwrap();
    let e = ArDensityEngine::new(f, Margin::sgp(1.0).unwrap(), PolarMap::l1(2), None).unwrap();
    assert!(e.angular_density(0.0).is_divergent());
    let t = CopulaModel::new(Family::StudentT { rho: 0.6, nu: 2.0 }).unwrap();
    let e = ArDensityEngine::new(t, Margin::StandardPareto, PolarMap::l1(2), Some(vec![0.0, 0.0])).unwrap();
    assert!(e.angular_density(0.5).is_divergent());
    // Laplace margins keep the same copulas finite
    let f = CopulaModel::new(Family::Frank { alpha: 5.0 }).unwrap();
    let e = ArDensityEngine::new(f, Margin::laplace(), PolarMap::l1(2), None).unwrap();
    assert!(!e.angular_density(0.0).is_divergent());
}

#[test]
fn angular_density_integrates_to_one() {
    let c = CopulaModel::new(Family::Joe { alpha: 2.0 }).unwrap();
    let e = ArDensityEngine::new(c, Margin::laplace(), PolarMap::l1(2), None).unwrap();
    let n = 400;
    let h = 4.0 / n as f64;
    // composite midpoint rule; the density is smooth between quadrant knots, which are cell edges
    let total: f64 = (0..n).map(|k| e.angular_density(-2.0 + h * (k as f64 + 0.5)).value().unwrap() * h).sum();
    assert!((total - 1.0).abs() < 1e-4, "{total}");
}
