//! Verification suite: the twelve acceptance criteria as measured checks.

use std::f64::consts::{FRAC_PI_2, PI};

use anyhow::{bail, Result};
use rayon::prelude::*;
use spar_core::ardensity::ArDensityEngine;
use spar_core::asymptotics::{are_from_arl, arl_from_are, catalog_tail_order, exponent_catalog, tail_order_refined};
use spar_core::copulas::{CopulaModel, EvDependence, Family};
use spar_core::geometry::{AngularSystem, PolarMap, StarBoundary};
use spar_core::margins::Margin;
use spar_core::quad::gk15;
use spar_core::spar::{
    angle_grid, build_spar, build_spar_vector, catalog_knots, lambda_catalog, limit_set, l1_sphere_grid3,
    numeric_lambda_slope, SparModel, SparOptions, Source,
};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// One measured quantity against its bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// `<=` or `>=`.
    pub relation: &'static str,
    pub bound: f64,
    pub pass: bool,
}

impl Check {
    pub fn le(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check { name: name.into(), value, relation: "<=", bound, pass: value <= bound }
    }

    pub fn ge(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check { name: name.into(), value, relation: ">=", bound, pass: value >= bound }
    }

    /// A yes/no condition reported as 1 (true) or 0 (false), required to be 1.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Check::ge(name, if ok { 1.0 } else { 0.0 }, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
}

impl CriterionReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// One summary line: id, title, status and the failing checks.
    pub fn summary(&self) -> String {
        let status = if self.pass() { "PASS" } else { "FAIL" };
        let failed: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| format!("{} = {:.4e} (needs {} {:.1e})", c.name, c.value, c.relation, c.bound))
            .collect();
        if failed.is_empty() {
            format!("criterion {:>2} {}: {} ({} checks)", self.id, self.title, status, self.checks.len())
        } else {
            format!("criterion {:>2} {}: {} [{}]", self.id, self.title, status, failed.join("; "))
        }
    }
}

/// Suite names and the criteria they run.
pub const SUITES: &[(&str, &[u8])] = &[
    ("geometry", &[1]),
    ("elliptical", &[2, 3]),
    ("independence", &[4]),
    ("laplace", &[5, 6]),
    ("short_tail", &[7]),
    ("tail_order", &[8, 9]),
    ("spar_truth", &[10]),
    ("divergence", &[11]),
    ("monte_carlo", &[12]),
    ("all", &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12]),
];

pub const TITLES: [&str; 12] = [
    "jacobian constants",
    "elliptical closed forms",
    "t GP-tail limit",
    "independence on Laplace",
    "Laplace lambda catalog vs slope",
    "limit sets",
    "short-tail exactness",
    "tail orders",
    "ARL/ARE round trip",
    "SPAR vs true density",
    "divergence regimes",
    "Monte Carlo cross-checks",
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.0).collect()
}

pub fn run_suite(name: &str, seed: u64) -> Result<Vec<CriterionReport>> {
    let Some((_, ids)) = SUITES.iter().find(|s| s.0 == name) else {
        bail!("unknown suite '{name}'; available suites: {}", suite_names().join(", "));
    };
    ids.iter().map(|&i| criterion(i, seed)).collect()
}

/// Runs criterion `id` (1 to 12). Only criterion 12 uses the seed.
pub fn criterion(id: u8, seed: u64) -> Result<CriterionReport> {
    let checks = match id {
        1 => c1_jacobians(),
        2 => c2_elliptical()?,
        3 => c3_t_gp_limit()?,
        4 => c4_independence()?,
        5 => c5_lambda_slopes()?,
        6 => c6_limit_sets()?,
        7 => c7_short_tails()?,
        8 => c8_tail_orders()?,
        9 => c9_round_trips()?,
        10 => c10_spar_truth()?,
        11 => c11_divergence()?,
        12 => c12_monte_carlo(seed)?,
        _ => bail!("criteria are numbered 1 to 12"),
    };
    Ok(CriterionReport { id, title: TITLES[id as usize - 1], checks })
}

fn cop(f: Family) -> Result<CopulaModel> {
    Ok(match f {
        Family::Independence => CopulaModel::independence(2)?,
        _ => CopulaModel::new(f)?,
    })
}

fn laplace_engine(f: Family) -> Result<ArDensityEngine> {
    Ok(ArDensityEngine::new(cop(f)?, Margin::laplace(), PolarMap::l1(2), None)?)
}

fn l1_point(q: f64) -> [f64; 2] {
    let (c, s) = StarBoundary::l1(2).pseudo_trig(q);
    [c, s]
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
}

// ---------------------------------------------------------------------------

fn fd_jacobian(b: &StarBoundary, q: f64) -> f64 {
    let h = 1e-6;
    let (c0, s0) = b.pseudo_trig(q);
    let (cp, sp) = b.pseudo_trig(q + h);
    let (cm, sm) = b.pseudo_trig(q - h);
    (c0 * (sp - sm) / (2.0 * h) - (cp - cm) / (2.0 * h) * s0).abs()
}

fn c1_jacobians() -> Vec<Check> {
    let angles: Vec<f64> = (0..50).map(|k| -2.0 + 4.0 * (k as f64 + 0.37) / 50.0).collect();
    let mut out = Vec::new();
    for (name, b, exact) in [
        ("J_1", StarBoundary::l1(2), 1.0),
        ("J_2", StarBoundary::l2(2), FRAC_PI_2),
        ("J_inf", StarBoundary::linf(2), 2.0),
    ] {
        let dev = max_of(angles.iter().map(|&q| (b.angle_jacobian(q) - exact).abs()));
        out.push(Check::le(format!("{name} max deviation"), dev, 1e-10));
    }
    for p in [1.5, 3.0, 4.0] {
        let b = StarBoundary::lp(p, 2).expect("valid p");
        let dev = max_of(angles.iter().map(|&q| {
            let fd = fd_jacobian(&b, q);
            ((b.angle_jacobian(q) - fd) / fd).abs()
        }));
        out.push(Check::le(format!("J_{p} vs finite differences (rel)"), dev, 1e-5));
    }
    out
}

fn c2_elliptical() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let thetas: Vec<f64> = (0..100).map(|k| -PI + 2.0 * PI * (k as f64 + 0.5) / 100.0).collect();
    for rho in [-0.5, 0.7] {
        let e = ArDensityEngine::new(cop(Family::Gaussian { rho })?, Margin::Normal, PolarMap::standard(), None)?;
        let dev = thetas
            .par_iter()
            .map(|&t| {
                let exact = (1.0 - rho * rho).sqrt() / (2.0 * PI * (1.0 - rho * (2.0 * t).sin()));
                (e.angular_density(t).value().unwrap_or(f64::NAN) - exact).abs()
            })
            .reduce(|| 0.0, f64::max);
        out.push(Check::le(format!("normal angular density rho={rho}"), dev, 1e-8));
    }
    let rho = 0.6;
    let map = PolarMap::new(StarBoundary::elliptical(rho)?, AngularSystem::euclidean())?;
    let nu = 3.0;
    let g = ArDensityEngine::new(cop(Family::Gaussian { rho })?, Margin::Normal, map.clone(), None)?;
    let t = ArDensityEngine::new(cop(Family::StudentT { rho, nu })?, Margin::student_t(nu)?, map, None)?;
    let (mut dn, mut dt) = (0.0f64, 0.0f64);
    for &th in &[-2.7, -1.2, 0.4, 1.9] {
        for r in [0.3, 1.0, 2.0, 3.5, 5.0] {
            dn = dn.max((g.conditional_survivor(r, th)? - (-0.5 * r * r).exp()).abs());
            dt = dt.max((t.conditional_survivor(r, th)? - (1.0 + r * r / nu).powf(-0.5 * nu)).abs());
        }
    }
    out.push(Check::le("normal conditional survivor vs exp(-r^2/2)", dn, 1e-8));
    out.push(Check::le("t conditional survivor vs (1+r^2/nu)^(-nu/2)", dt, 1e-8));
    Ok(out)
}

fn c3_t_gp_limit() -> Result<Vec<Check>> {
    let nu = 2.0;
    let rho = 0.6;
    let map = PolarMap::new(StarBoundary::elliptical(rho)?, AngularSystem::euclidean())?;
    let e = ArDensityEngine::new(cop(Family::StudentT { rho, nu })?, Margin::student_t(nu)?, map, None)?;
    let (ray, prof) = e.profile(0.3);
    let total = prof.total();
    let sf = |r: f64| e.tail_mass(&ray, &prof, r) / total;
    let mut sups = Vec::new();
    for mu in [10.0, 30.0, 100.0] {
        let base = sf(mu);
        let sup = (0..=1000)
            .map(|k| {
                let r = mu * k as f64 / 1000.0;
                let gp = (1.0 + r / mu).powf(-nu);
                (sf(mu + r) / base - gp).abs()
            })
            .fold(0.0, f64::max);
        sups.push(sup);
    }
    Ok(vec![
        Check::le("sup deviation at mu=30 minus mu=10", sups[1] - sups[0], 0.0),
        Check::le("sup deviation at mu=100 minus mu=30", sups[2] - sups[1], 0.0),
        Check::le("sup deviation at mu=100", sups[2], 0.02),
    ])
}

fn c4_independence() -> Result<Vec<Check>> {
    let e2 = laplace_engine(Family::Independence)?;
    let f2 = max_of((0..16).map(|k| {
        let q = -2.0 + 4.0 * (k as f64 + 0.3) / 16.0;
        (e2.angular_density(q).value().unwrap_or(f64::NAN) - 0.25).abs()
    }));
    let e3 = ArDensityEngine::new(CopulaModel::independence(3)?, Margin::laplace(), PolarMap::l1(3), None)?;
    let f3 = max_of([[0.2, -0.5, 0.3], [-0.1, -0.1, -0.8], [0.6, 0.3, -0.1], [1.0, 0.0, 0.0]].iter().map(|w| {
        e3.angular_density_vector(w).ok().and_then(|a| a.value()).map_or(f64::NAN, |v| (v - 0.25).abs())
    }));
    let opts = SparOptions::new(0.05, Source::Catalog);
    let grid = angle_grid(16, &[]);
    let m2 = build_spar(&e2, &opts, &grid)?;
    let rel2 = max_of(m2.records.iter().flat_map(|rec| {
        let m2 = &m2;
        [0.0, 1.0, 5.0, 20.0].into_iter().map(move |d| {
            let r = rec.mu + d;
            let exact = 0.25 * r * (-r).exp();
            (m2.record_density(rec, r).unwrap_or(f64::NAN) / exact - 1.0).abs()
        })
    }));
    let g3: Vec<Vec<f64>> = l1_sphere_grid3(2).into_iter().map(|p| p.to_vec()).collect();
    let m3 = build_spar_vector(&e3, &opts, &g3)?;
    let rel3 = max_of(m3.records.iter().flat_map(|rec| {
        let m3 = &m3;
        [0.0, 1.0, 5.0, 20.0].into_iter().map(move |d| {
            let r = rec.mu + d;
            let exact = r * r * (-r).exp() / 8.0;
            (m3.record_density(rec, r).unwrap_or(f64::NAN) / exact - 1.0).abs()
        })
    }));
    Ok(vec![
        Check::le("f_W - 1/4 (d=2)", f2, 1e-8),
        Check::le("f_W - 1/4 (d=3)", f3, 1e-8),
        Check::le("gamma SPAR vs exact density (d=2, rel)", rel2, 1e-10),
        Check::le("gamma SPAR vs exact density (d=3, rel)", rel3, 1e-10),
    ])
}

/// Family list and parameters for the Laplace slope comparison.
pub fn slope_families() -> Vec<(Family, f64)> {
    let mut v = vec![(Family::Frank { alpha: 10.0 }, 0.03), (Family::Joe { alpha: 2.0 }, 0.03), (Family::Joe { alpha: 3.0 }, 0.03)];
    for nu in [1.0, 2.0, 5.0] {
        v.push((Family::StudentT { rho: 0.6, nu }, 0.03));
    }
    for alpha in [2.0, 3.0] {
        v.push((Family::Ev(EvDependence::SymmetricLogistic { alpha }), 0.03));
    }
    v.push((Family::Gaussian { rho: 0.6 }, 0.05));
    v
}

fn c5_lambda_slopes() -> Result<Vec<Check>> {
    slope_families()
        .par_iter()
        .map(|&(f, tol)| {
            let e = laplace_engine(f)?;
            let mut worst = 0.0f64;
            for quad in 0..4 {
                for k in 1..10 {
                    let w = l1_point(-2.0 + quad as f64 + k as f64 / 10.0);
                    let lam = lambda_catalog(&e.copula, w)?.map_or(f64::NAN, |x| x.lambda);
                    let s = numeric_lambda_slope(&e, &w, 30.0, 60.0)?;
                    worst = worst.max((s - (lam - 1.0)).abs());
                }
            }
            Ok(Check::le(format!("{} max |slope - (lambda-1)|", describe(&f)), worst, tol))
        })
        .collect()
}

fn describe(f: &Family) -> String {
    match *f {
        Family::Frank { alpha } | Family::Joe { alpha } | Family::Clayton { alpha } => format!("{} alpha={alpha}", f.name()),
        Family::Gaussian { rho } => format!("gaussian rho={rho}"),
        Family::StudentT { rho, nu } => format!("t rho={rho} nu={nu}"),
        Family::Ev(EvDependence::SymmetricLogistic { alpha }) => format!("ev_logistic alpha={alpha}"),
        Family::Ev(EvDependence::HuslerReiss { alpha }) => format!("husler_reiss alpha={alpha}"),
        Family::Ev(EvDependence::AsymmetricLogistic { alpha, gamma1, gamma2 }) => {
            format!("ev_asymmetric_logistic alpha={alpha} gamma=({gamma1},{gamma2})")
        }
        Family::BivExponential { alpha } => format!("bivariate_exponential alpha={alpha}"),
        _ => f.name().to_string(),
    }
}

/// Laplace-margin models with a λ catalog, used by the limit-set checks.
pub fn catalog_models() -> Vec<Family> {
    vec![
        Family::Independence,
        Family::Frank { alpha: 10.0 },
        Family::Joe { alpha: 3.0 },
        Family::Gaussian { rho: 0.6 },
        Family::Gaussian { rho: -0.4 },
        Family::StudentT { rho: 0.6, nu: 2.0 },
        Family::Ev(EvDependence::SymmetricLogistic { alpha: 2.0 }),
        Family::Ev(EvDependence::AsymmetricLogistic { alpha: 3.0, gamma1: 0.7, gamma2: 0.4 }),
        Family::Ev(EvDependence::HuslerReiss { alpha: 1.5 }),
        Family::BivExponential { alpha: 0.5 },
    ]
}

fn laplace_spar(f: Family, grid: &[f64]) -> Result<SparModel> {
    let e = laplace_engine(f)?;
    Ok(build_spar(&e, &SparOptions::new(0.05, Source::Catalog), grid)?)
}

fn c6_limit_sets() -> Result<Vec<Check>> {
    let mut out: Vec<Check> = catalog_models()
        .par_iter()
        .map(|&f| -> Result<Vec<Check>> {
            let grid = angle_grid(720, &catalog_knots(&cop(f)?));
            let ls = limit_set(&laplace_spar(f, &grid)?)?;
            let reach = [ls.extent(0, 1.0), ls.extent(0, -1.0), ls.extent(1, 1.0), ls.extent(1, -1.0)]
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            Ok(vec![
                Check::le(format!("{} max coordinate - 1", describe(&f)), ls.max_abs() - 1.0, 1e-9),
                Check::le(format!("{} 1 - min signed extent", describe(&f)), 1.0 - reach, 1e-3),
            ])
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut dev_t = 0.0f64;
    for rho in [-0.7, 0.0, 0.6, 0.9] {
        let ls = limit_set(&laplace_spar(Family::StudentT { rho, nu: 2.0 }, &[0.5])?)?;
        dev_t = dev_t.max((ls.points[0][0] - 1.0).abs().max((ls.points[0][1] - 1.0).abs()));
    }
    out.push(Check::le("t boundary at q=1/2 minus (1,1), rho in {-0.7,0,0.6,0.9}", dev_t, 1e-9));
    let ls = limit_set(&laplace_spar(Family::Gaussian { rho: 0.6 }, &[0.5])?)?;
    let dev_g = (ls.points[0][0] - 0.8).abs().max((ls.points[0][1] - 0.8).abs());
    out.push(Check::le("gaussian rho=0.6 boundary at q=1/2 minus (0.8,0.8)", dev_g, 1e-6));
    Ok(out)
}

fn c7_short_tails() -> Result<Vec<Check>> {
    let c = cop(Family::Clayton { alpha: -0.2 })?.reflect_corner([1, 1]);
    let e = ArDensityEngine::new(c, Margin::gp(-0.2, 1.0)?, PolarMap::l1(2), None)?;
    let qs: Vec<f64> = (1..20).map(|k| 0.05 * k as f64).collect();
    let fq = max_of(qs.iter().map(|&q| (e.angular_density(q).value().unwrap_or(f64::NAN) - 1.0).abs()));
    let frq = max_of(qs.iter().map(|&q| (e.joint_polar_density(1.0, q) - 0.4096).abs()));
    let a = 3.0;
    let n = cop(Family::Nelsen4215 { alpha: a })?.reflect_corner([1, 1]);
    let en = ArDensityEngine::new(n, Margin::gp(-1.0 / a, 1.0)?, PolarMap::l1(2), None)?;
    let mut cond_dev = 0.0f64;
    for q in [0.1f64, 0.25, 0.5, 0.7, 0.93] {
        let p = (1.0 - q).powf(a) + q.powf(a);
        let r_f = a / p.powf(1.0 / a);
        let f = en.angular_density(q).value().unwrap_or(f64::NAN);
        for s in [0.05, 0.3, 0.6, 0.95] {
            let r = s * r_f;
            // GP density with ξ = -1/2, σ = r_F/2
            let gp = 2.0 / r_f * (1.0 - r / r_f);
            cond_dev = cond_dev.max((en.joint_polar_density(r, q) / f - gp).abs());
        }
    }
    let half = (en.angular_density(0.5).value().unwrap_or(f64::NAN) - 3.0).abs();
    Ok(vec![
        Check::le("clayton f_Q - 1", fq, 1e-8),
        Check::le("clayton f_RQ(1,q) - 0.4096", frq, 1e-10),
        Check::le("nelsen conditional density - GP(-1/2)", cond_dev, 1e-10),
        Check::le("nelsen f_Q(1/2) - 3", half, 1e-10),
    ])
}

fn c8_tail_orders() -> Result<Vec<Check>> {
    let t = 1e-6;
    let mut cases: Vec<(Family, [u8; 2], f64)> = Vec::new();
    for rho in [-0.5, 0.0, 0.6] {
        cases.push((Family::Gaussian { rho }, [0, 0], 2.0 / (1.0 + rho)));
    }
    for alpha in [1.5f64, 2.0] {
        cases.push((Family::Ev(EvDependence::SymmetricLogistic { alpha }), [0, 0], 2f64.powf(1.0 / alpha)));
    }
    for corner in [[0, 0], [0, 1], [1, 0], [1, 1]] {
        cases.push((Family::StudentT { rho: 0.6, nu: 2.0 }, corner, 1.0));
    }
    cases.push((Family::Independence, [0, 0], 2.0));
    cases
        .into_iter()
        .map(|(f, corner, k)| {
            let est = tail_order_refined(&cop(f)?, corner, t)?;
            Ok(Check::le(format!("{} corner {:?} |kappa_hat - {k:.4}|", describe(&f), corner), (est - k).abs(), 0.05))
        })
        .collect()
}

fn c9_round_trips() -> Result<Vec<Check>> {
    let nu = 2.0;
    let t = cop(Family::StudentT { rho: 0.5, nu })?;
    let mut dev = 0.0f64;
    for k in 1..=20 {
        let w = k as f64 / 21.0;
        let a = are_from_arl(1.0, 1.0 / nu, 1.0 / nu, w)?;
        let l = exponent_catalog(&t, [0, 0], [1.0 - w, w])?.map_or(f64::NAN, |e| e.lambda);
        dev = dev.max((a - l).abs());
    }
    let rho = 0.6;
    let g = cop(Family::Gaussian { rho })?;
    let kappa = catalog_tail_order(&g, [0, 0]).unwrap_or(f64::NAN);
    let s = 1e-6;
    let c11 = g.density(&[s, s]);
    let mut shape = 0.0f64;
    for k in 1..=5 {
        let w = k as f64 / 6.0;
        let z = [1.0 - w, w];
        let (e1, e2) = arl_from_are(kappa, 0.0, z[0], z[1])?.density_exponents;
        let pred = z[0].powf(e1) * z[1].powf(e2);
        let est = g.density(&[s * z[0], s * z[1]]) / c11;
        shape = shape.max((est / pred - 1.0).abs());
    }
    Ok(vec![
        Check::le("t are_from_arl vs exponent_catalog at 20 points", dev, 1e-10),
        Check::le("gaussian ARL density shape at 5 directions (rel)", shape, 0.10),
    ])
}

/// `|log f_SPAR - log f_true|` at `μ + {5, 10, 20}` for every grid record.
pub fn spar_truth_errors(e: &ArDensityEngine, m: &SparModel) -> Vec<[f64; 3]> {
    m.records
        .par_iter()
        .map(|rec| {
            let a = rec.angle.unwrap_or(f64::NAN);
            let mut out = [f64::NAN; 3];
            for (i, d) in [5.0, 10.0, 20.0].into_iter().enumerate() {
                let r = rec.mu + d;
                let s = m.record_density(rec, r).unwrap_or(f64::NAN);
                out[i] = (s.ln() - e.joint_polar_density(r, a).ln()).abs();
            }
            out
        })
        .collect()
}

fn c10_spar_truth() -> Result<Vec<Check>> {
    let c = cop(Family::StudentT { rho: 0.6, nu: 2.0 })?;
    let own = ArDensityEngine::new(c.clone(), Margin::student_t(2.0)?, PolarMap::standard(), None)?;
    let lap = ArDensityEngine::new(c, Margin::laplace(), PolarMap::l1(2), None)?;
    let opts = SparOptions::new(0.05, Source::Catalog);
    let own_grid: Vec<f64> = (0..12).map(|k| -PI + 2.0 * PI * (k as f64 + 0.5) / 12.0).collect();
    let lap_grid: Vec<f64> = (0..12).map(|k| -2.0 + 4.0 * (k as f64 + 0.5) / 12.0).collect();
    let mut out = Vec::new();
    for (name, e, grid) in [("own margins", &own, own_grid), ("Laplace margins", &lap, lap_grid)] {
        let m = build_spar(e, &opts, &grid)?;
        let errs = spar_truth_errors(e, &m);
        let non_monotone = errs.iter().filter(|v| !(v[0] > v[1] && v[1] > v[2])).count();
        out.push(Check::le(format!("{name}: angles where the error does not decrease"), non_monotone as f64, 0.0));
        out.push(Check::le(format!("{name}: max error at mu+20"), max_of(errs.iter().map(|v| v[2])), 0.05));
    }
    Ok(out)
}

fn c11_divergence() -> Result<Vec<Check>> {
    let fr = ArDensityEngine::new(cop(Family::Frank { alpha: 5.0 })?, Margin::sgp(1.0)?, PolarMap::l1(2), None)?;
    let t = ArDensityEngine::new(
        cop(Family::StudentT { rho: 0.6, nu: 2.0 })?,
        Margin::StandardPareto,
        PolarMap::l1(2),
        Some(vec![0.0, 0.0]),
    )?;
    let g = cop(Family::Gaussian { rho: 0.6 })?;
    let kappa = catalog_tail_order(&g, [1, 1]).unwrap_or(f64::NAN);
    let ge = ArDensityEngine::new(g, Margin::StandardPareto, PolarMap::l1(2), Some(vec![0.0, 0.0]))?;
    let v: Vec<f64> = (0..=30)
        .map(|i| 0.2 + 0.02 * i as f64)
        .map(|q: f64| ge.joint_polar_density(1e4, q) * (q * (1.0 - q)).powf(1.0 + kappa / 2.0))
        .collect();
    let ratio = v.iter().cloned().fold(0.0, f64::max) / v.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(vec![
        Check::holds("frank on SGP(1) flagged divergent at q=0", fr.angular_density(0.0).is_divergent()),
        Check::holds("t on origin-0 Pareto flagged divergent at q=1/2", t.angular_density(0.5).is_divergent()),
        Check::le("gaussian on Pareto compensated max/min over [0.2,0.8]", ratio, 1.15),
    ])
}

/// Chi-square statistic of sampled angles against bin probabilities from the angular density.
fn angular_chi_square(e: &ArDensityEngine, n: usize, seed: u64, edges: &[f64]) -> Result<(f64, usize)> {
    let probs: Vec<f64> = edges
        .par_windows(2)
        .map(|w| {
            let mut f = |q: f64| e.angular_density(q).value().unwrap_or(f64::NAN);
            gk15(&mut f, w[0], w[1]).0
        })
        .collect();
    let u = e.copula.sample_seeded(n, seed);
    let mut counts = vec![0usize; probs.len()];
    for p in &u {
        let x: Vec<f64> = p.iter().map(|&ui| e.margin.quantile(ui)).collect::<spar_core::Result<_>>()?;
        let pol = e.map.to_polar(&x)?;
        let q = pol.angle.unwrap_or(f64::NAN);
        let i = edges.partition_point(|&b| b < q).saturating_sub(1).min(probs.len() - 1);
        counts[i] += 1;
    }
    let total: f64 = probs.iter().sum();
    let stat = counts
        .iter()
        .zip(&probs)
        .map(|(&c, &p)| {
            let exp = n as f64 * p / total;
            (c as f64 - exp).powi(2) / exp
        })
        .sum();
    Ok((stat, probs.len() - 1))
}

fn c12_monte_carlo(seed: u64) -> Result<Vec<Check>> {
    let n = 100_000;
    let full: Vec<f64> = (0..=40).map(|k| -2.0 + 0.1 * k as f64).collect();
    let unit: Vec<f64> = (0..=20).map(|k| 0.05 * k as f64).collect();
    let clayton = ArDensityEngine::new(
        cop(Family::Clayton { alpha: -0.2 })?.reflect_corner([1, 1]),
        Margin::gp(-0.2, 1.0)?,
        PolarMap::l1(2),
        None,
    )?;
    let models: Vec<(String, ArDensityEngine, &[f64])> = vec![
        ("gaussian rho=0.6 on Laplace".into(), laplace_engine(Family::Gaussian { rho: 0.6 })?, &full),
        ("t rho=0.6 nu=2 on Laplace".into(), laplace_engine(Family::StudentT { rho: 0.6, nu: 2.0 })?, &full),
        ("ev_logistic alpha=2 on Laplace".into(), laplace_engine(Family::Ev(EvDependence::SymmetricLogistic { alpha: 2.0 }))?, &full),
        ("survival clayton alpha=-0.2 on GP(-0.2)".into(), clayton, &unit),
    ];
    models
        .iter()
        .enumerate()
        .map(|(i, (name, e, edges))| {
            let (stat, df) = angular_chi_square(e, n, seed.wrapping_add(i as u64), edges)?;
            let crit = ChiSquared::new(df as f64)?.inverse_cdf(0.999);
            Ok(Check::le(format!("{name}: chi-square ({df} df)"), stat, crit))
        })
        .collect()
}
