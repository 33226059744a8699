use proptest::prelude::*;
use spar_core::margins::Margin;
use statrs::distribution::{Continuous, ContinuousCDF, Exp, Laplace, Normal, Pareto, StudentsT};

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-300)
}

#[test]
fn margins_match_statrs() {
    let n = Normal::new(0.0, 1.0).unwrap();
    let t = StudentsT::new(0.0, 1.0, 3.0).unwrap();
    let ex = Exp::new(1.0).unwrap();
    let pa = Pareto::new(1.0, 1.0).unwrap();
    let la = Laplace::new(0.0, 1.0).unwrap();
    for &x in &[-4.0, -1.3, -0.2, 0.0, 0.7, 2.5, 6.0] {
        assert!(close(Margin::Normal.pdf(x), n.pdf(x), 1e-12));
        // statrs' normal cdf is only good to about 1e-10, so the erfc form is the oracle here
        assert!(close(Margin::Normal.cdf(x), n.cdf(x), 1e-9));
        assert!(close(Margin::Normal.cdf(x), 0.5 * libm::erfc(-x / std::f64::consts::SQRT_2), 1e-14));
        let mt = Margin::student_t(3.0).unwrap();
        assert!(close(mt.pdf(x), t.pdf(x), 1e-10));
        assert!(close(mt.cdf(x), t.cdf(x), 1e-10));
        assert!(close(Margin::laplace().pdf(x), la.pdf(x), 1e-13));
        assert!(close(Margin::laplace().cdf(x), la.cdf(x), 1e-13));
    }
    for &x in &[0.1, 1.0, 3.0, 20.0] {
        assert!(close(Margin::Exponential.pdf(x), ex.pdf(x), 1e-13));
        assert!(close(Margin::Exponential.cdf(x), ex.cdf(x), 1e-12));
        assert!(close(Margin::Exponential.survivor(x), (-x).exp(), 1e-14));
    }
    for &x in &[1.0, 1.5, 10.0, 1e4] {
        assert!(close(Margin::StandardPareto.pdf(x), pa.pdf(x), 1e-13));
        assert!(close(Margin::StandardPareto.survivor(x), 1.0 / x, 1e-13));
    }
}

#[test]
fn gp_closed_forms() {
    // GP survivor (1 + ξ x/σ)^{-1/ξ}, written out independently
    for &(xi, s) in &[(-0.5, 1.0), (-0.2, 2.0), (0.3, 1.5)] {
        let m = Margin::gp(xi, s).unwrap();
        for &x in &[0.0, 0.3, 1.0, 1.9] {
            let z: f64 = 1.0 + xi * x / s;
            let sf = z.powf(-1.0 / xi);
            let pdf = z.powf(-1.0 / xi - 1.0) / s;
            assert!(close(m.survivor(x), sf, 1e-13), "{xi} {x}");
            assert!(close(m.pdf(x), pdf, 1e-13), "{xi} {x}");
        }
    }
    assert_eq!(Margin::gp(-0.5, 1.0).unwrap().upper_endpoint(), 2.0);
    assert!(Margin::gp(0.1, -1.0).is_err());
}

#[test]
fn laplace_tails_keep_precision() {
    let m = Margin::laplace();
    // F̄(x) = e^{-x}/2 for x > 0; at x = 200 the survivor is far below f64 epsilon
    let c = m.coord(200.0);
    assert!(close(c.ubar(), 0.5 * (-200.0f64).exp(), 1e-12));
}

proptest! {
    #[test]
    fn quantile_inverts_cdf(p in 1e-9f64..(1.0 - 1e-9), which in 0usize..6) {
        let m = [Margin::laplace(), Margin::Normal, Margin::student_t(2.5).unwrap(), Margin::Exponential,
                 Margin::StandardPareto, Margin::gp(-0.25, 1.0).unwrap()][which];
        let x = m.quantile(p).unwrap();
        prop_assert!((m.cdf(x) - p).abs() < 1e-10 * p.max(1e-3));
    }

    #[test]
    fn sgp_is_symmetric(x in 0.0f64..20.0, xi in -0.4f64..0.8) {
        let m = Margin::sgp(xi).unwrap();
        prop_assume!(m.in_support(x));
        prop_assert!((m.pdf(x) - m.pdf(-x)).abs() <= 1e-14 * m.pdf(x).max(1e-300));
        prop_assert!((m.cdf(-x) - m.survivor(x)).abs() <= 1e-14);
    }
}
