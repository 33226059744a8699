//! Semi-parametric angular-radial (SPAR) tail models: threshold-based
//! radial tail approximations conditional on angle, the closed-form
//! Laplace-margin λ catalog, and limit sets.

use alloc::vec::Vec;

use crate::ardensity::{ArDensityEngine, RadialProfile, Ray};
use crate::asymptotics::{catalog_tail_order, tail_order_refined};
use crate::copulas::{CopulaModel, EvDependence, Family};
use crate::error::{Error, Result};
use crate::geometry::{lp_norm, wrap_pseudo, AngleScale, StarBoundary};
use crate::margins::Margin;
use crate::quad::{integrate, Tolerance};
use crate::special::upper_gamma;

/// How the radial tail decays under the asymptotic form of the copula density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// `δ_L(r, w) ~ g(w) r^{β(w)} exp(-r(λ(w) - 1))`.
    Standard,
    /// Quadratic exponent: `δ_L ∝ exp(-(c r)^2 / 2 + O(r))`; `coef` is `c²`.
    GaussianType { coef: f64 },
    /// Scale depends on the threshold: `σ(μ, w) = (1 + 2α|w₁w₂|μ)^{-1}`.
    MuDependent { alpha: f64 },
}

impl Profile {
    pub fn name(&self) -> &'static str {
        match self {
            Profile::Standard => "standard",
            Profile::GaussianType { .. } => "gaussian_type",
            Profile::MuDependent { .. } => "mu_dependent",
        }
    }
}

/// Closed-form Laplace-margin tail description at one angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaEntry {
    /// `λ(w)` on the L¹ circle; `NaN` for non-standard profiles.
    pub lambda: f64,
    pub beta: f64,
    pub profile: Profile,
}

fn standard(lambda: f64, beta: f64) -> LambdaEntry {
    LambdaEntry { lambda, beta, profile: Profile::Standard }
}

fn gaussian_type(c: f64) -> LambdaEntry {
    LambdaEntry { lambda: f64::NAN, beta: 0.0, profile: Profile::GaussianType { coef: c * c } }
}

/// L¹ pseudo-angle of a point on the L¹ circle.
fn l1_angle(w: [f64; 2]) -> f64 {
    StarBoundary::l1(2).pseudo_angle_unchecked(w)
}

/// Closed-form `λ(w)`, `β(w)` and profile for a copula on Laplace margins.
///
/// `w` must lie on the L¹ circle. Returns `Ok(None)` for families without a
/// catalog entry.
pub fn lambda_catalog(c: &CopulaModel, w: [f64; 2]) -> Result<Option<LambdaEntry>> {
    if (w[0].abs() + w[1].abs() - 1.0).abs() > 1e-9 {
        return Err(Error::Domain("angle must lie on the L1 circle"));
    }
    // reflecting a coordinate of the copula mirrors that Laplace coordinate
    let refl = c.reflection();
    let w = [if refl[0] { -w[0] } else { w[0] }, if refl[1] { -w[1] } else { w[1] }];
    let q = l1_angle(w);
    let (a1, a2) = (w[0].abs(), w[1].abs());
    let max = a1.max(a2);
    let e = match c.family() {
        Family::Independence | Family::Frank { .. } => standard(1.0, 0.0),
        Family::Joe { alpha } => standard(logistic_like(q, alpha, a1, a2, 1.0), 0.0),
        Family::Gaussian { rho } => {
            let s = (w[0] * w[1]).signum();
            let lam = (1.0 - 2.0 * rho * s * libm::sqrt((w[0] * w[1]).abs())) / (1.0 - rho * rho);
            standard(lam, 0.5 * (lam - 1.0))
        }
        Family::StudentT { nu, .. } => standard(max + (a1 - a2).abs() / nu, 0.0),
        Family::Ev(EvDependence::SymmetricLogistic { alpha }) => symmetric_logistic(q, alpha, a1, a2),
        Family::Ev(EvDependence::AsymmetricLogistic { alpha, gamma1, gamma2 }) => {
            if gamma1 == 1.0 && gamma2 == 1.0 {
                symmetric_logistic(q, alpha, a1, a2)
            } else if alpha == 1.0 {
                standard(1.0, 0.0)
            } else {
                let dep = EvDependence::AsymmetricLogistic { alpha, gamma1, gamma2 };
                let k1 = (alpha - 1.0) / (2.0 * alpha - 1.0);
                let k2 = alpha / (2.0 * alpha - 1.0);
                let lam = if q > -2.0 && q < -1.0 {
                    dep.a(a1, a2)
                } else if q > k1 && q < k2 {
                    1.0 - alpha + (2.0 * alpha - 1.0) * max
                } else {
                    1.0
                };
                standard(lam, 0.0)
            }
        }
        Family::Ev(EvDependence::HuslerReiss { alpha }) => {
            let dep = EvDependence::HuslerReiss { alpha };
            if q > -2.0 && q < -1.0 {
                standard(dep.a(a1, a2), 0.0)
            } else if q == -1.0 || q == 2.0 {
                standard(1.0, 0.0)
            } else if q == 0.5 {
                standard(0.5, 0.0)
            } else if q == 0.0 || q == 1.0 {
                gaussian_type(0.5 * alpha)
            } else if q > 0.0 && q < 1.0 {
                gaussian_type(0.5 * alpha * (w[0] - w[1]))
            } else if q > 1.0 {
                gaussian_type(0.5 * alpha * a2)
            } else {
                gaussian_type(0.5 * alpha * a1)
            }
        }
        Family::BivExponential { alpha } => {
            if alpha == 0.0 {
                standard(1.0, 0.0)
            } else if q > -2.0 && q < -1.0 {
                LambdaEntry { lambda: f64::NAN, beta: 0.0, profile: Profile::MuDependent { alpha } }
            } else if (q > -1.0 && q < 0.0) || (q > 1.0 && q < 2.0) {
                standard(1.0, 1.0)
            } else {
                standard(1.0, 0.0)
            }
        }
        _ => return Ok(None),
    };
    Ok(Some(e))
}

/// Catalog `λ` extended off the L¹ circle by homogeneity:
/// `λ(z) = ‖z‖₁ λ(z/‖z‖₁)`.
pub fn lambda_homogeneous(c: &CopulaModel, z: [f64; 2]) -> Result<Option<f64>> {
    let n = z[0].abs() + z[1].abs();
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::Domain("direction must be non-zero and finite"));
    }
    Ok(lambda_catalog(c, [z[0] / n, z[1] / n])?.and_then(|e| match e.profile {
        Profile::Standard => Some(n * e.lambda),
        _ => None,
    }))
}

/// Piecewise λ shared by the Joe copula and the symmetric logistic EV copula;
/// `third` is the value used in the third quadrant.
fn logistic_like(q: f64, alpha: f64, a1: f64, a2: f64, third: f64) -> f64 {
    if q > -2.0 && q <= -1.0 {
        third
    } else if q > -1.0 && q <= 0.0 {
        1.0 + (alpha - 1.0) * a1
    } else if q > 0.0 && q <= 1.0 {
        1.0 - alpha + (2.0 * alpha - 1.0) * a1.max(a2)
    } else {
        1.0 + (alpha - 1.0) * a2
    }
}

fn symmetric_logistic(q: f64, alpha: f64, a1: f64, a2: f64) -> LambdaEntry {
    let dep = EvDependence::SymmetricLogistic { alpha };
    let lam = logistic_like(q, alpha, a1, a2, dep.a(a1, a2));
    let beta = if (-1.0..0.0).contains(&q) || (q > 1.0 && q <= 2.0) { 1.0 - alpha } else { 0.0 };
    LambdaEntry { lambda: lam, beta, profile: Profile::Standard }
}

/// Origin `(x₀, y₀)` that speeds up convergence of the asymmetric logistic EV
/// copula on Laplace margins in the first quadrant.
pub fn asymmetric_logistic_origin(alpha: f64, gamma1: f64, gamma2: f64) -> Result<[f64; 2]> {
    if !(alpha > 1.0 && gamma1 > 0.0 && gamma1 < 1.0 && gamma2 > 0.0 && gamma2 < 1.0) {
        return Err(Error::Parameter("origin needs alpha > 1 and gammas in (0, 1)"));
    }
    let b1 = libm::log((1.0 - gamma1) / (2.0 * (alpha - 1.0) * gamma2) * libm::pow(gamma2 / gamma1, alpha));
    let b2 = libm::log((1.0 - gamma2) / (2.0 * (alpha - 1.0) * gamma1) * libm::pow(gamma1 / gamma2, alpha));
    let d = 2.0 * alpha - 1.0;
    Ok([((alpha - 1.0) * b1 + alpha * b2) / d, (alpha * b1 + (alpha - 1.0) * b2) / d])
}

// ---------------------------------------------------------------------------
// Model types

/// Form of the radial tail approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// `ζ f_W f_GP(r - μ; ξ, σ)`.
    GpTail,
    /// `(ζ f_W / A) r^{d-1} e^{-r/σ}` with `A = σ^d Γ(d, μ/σ)` (Laplace margins).
    GammaTailLaplace,
    /// GP tail on standard Pareto margins with `ξ = 1/κ`.
    ParetoTail,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::GpTail => "gp_tail",
            Variant::GammaTailLaplace => "gamma_tail_laplace",
            Variant::ParetoTail => "pareto_tail",
        }
    }
}

/// Where the tail parameters come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Catalog,
    Numeric,
}

impl Source {
    pub fn name(&self) -> &'static str {
        match self {
            Source::Catalog => "catalog",
            Source::Numeric => "numeric",
        }
    }
}

/// Per-angle status flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RecordFlags {
    /// The angular density diverges at this angle.
    pub divergent: bool,
    /// The ray carries no probability mass.
    pub empty: bool,
    /// The limit-set radius is zero here (non-standard profile).
    pub degenerate: bool,
    /// Parameters were fitted numerically rather than taken from the catalog.
    pub numeric: bool,
}

impl RecordFlags {
    pub fn valid(&self) -> bool {
        !self.divergent && !self.empty
    }
}

/// SPAR parameters at one grid angle.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleRecord {
    /// Scalar angle (two dimensions) in the engine's angular units.
    pub angle: Option<f64>,
    /// Direction scaled to unit radial gauge.
    pub b: Vec<f64>,
    pub mu: f64,
    pub zeta: f64,
    pub xi: f64,
    pub sigma: f64,
    pub f_w: f64,
    /// `λ(w)` of the catalog, when standard.
    pub lambda: Option<f64>,
    /// Upper end of the radial support.
    pub r_upper: f64,
    pub flags: RecordFlags,
}

/// A SPAR model on an angle grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SparModel {
    pub margin: Margin,
    pub dim: usize,
    pub variant: Variant,
    pub source: Source,
    pub angle_scale: Option<AngleScale>,
    /// Records in increasing angle order (two dimensions).
    pub records: Vec<AngleRecord>,
}

/// Options for [`build_spar`].
#[derive(Debug, Clone, PartialEq)]
pub struct SparOptions {
    pub zeta: f64,
    pub source: Source,
    /// Defaults by margin: Laplace → gamma tail, Pareto → Pareto tail, others → GP tail.
    pub variant: Option<Variant>,
}

impl SparOptions {
    pub fn new(zeta: f64, source: Source) -> Self {
        SparOptions { zeta, source, variant: None }
    }
}

/// Default variant for a margin.
pub fn default_variant(m: &Margin) -> Variant {
    match m {
        _ if m.is_laplace() => Variant::GammaTailLaplace,
        Margin::StandardPareto => Variant::ParetoTail,
        _ => Variant::GpTail,
    }
}

/// Uniform pseudo-angle grid of `n` points on `(-2, 2]`, merged with `knots`.
pub fn angle_grid(n: usize, knots: &[f64]) -> Vec<f64> {
    let mut g: Vec<f64> = (1..=n).map(|k| -2.0 + 4.0 * k as f64 / n as f64).collect();
    for &k in knots {
        g.push(wrap_pseudo(k));
    }
    g.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    g.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    g
}

/// Knots of the catalog λ for a copula: quadrant boundaries, the diagonal
/// directions and the asymmetric logistic break points.
pub fn catalog_knots(c: &CopulaModel) -> Vec<f64> {
    let mut k = alloc::vec![-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0];
    if let Family::Ev(EvDependence::AsymmetricLogistic { alpha, .. }) = c.family() {
        k.push((alpha - 1.0) / (2.0 * alpha - 1.0));
        k.push(alpha / (2.0 * alpha - 1.0));
    }
    k
}

/// Points of the L¹ sphere in three dimensions: `(i, j, k)/n` with all sign patterns.
pub fn l1_sphere_grid3(n: usize) -> Vec<[f64; 3]> {
    let mut out = Vec::new();
    let nf = n as f64;
    for i in 0..=n {
        for j in 0..=(n - i) {
            let k = n - i - j;
            let base = [i as f64 / nf, j as f64 / nf, k as f64 / nf];
            for s in 0..8u8 {
                let mut p = base;
                let mut skip = false;
                for (d, v) in p.iter_mut().enumerate() {
                    if s & (1 << d) != 0 {
                        if *v == 0.0 {
                            skip = true;
                        }
                        *v = -*v;
                    }
                }
                if !skip {
                    out.push(p);
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Construction

fn invalid_record(angle: Option<f64>, b: Vec<f64>, zeta: f64, f_w: f64, r_upper: f64, flags: RecordFlags) -> AngleRecord {
    AngleRecord { angle, b, mu: f64::NAN, zeta, xi: f64::NAN, sigma: f64::NAN, f_w, lambda: None, r_upper, flags }
}

/// Pickands-type fit of a GP tail from the conditional quantiles at
/// exceedance probabilities `ζ`, `ζ/2`, `ζ/4`.
pub fn pickands_fit(mu1: f64, mu2: f64, mu3: f64) -> (f64, f64) {
    let xi = libm::log2((mu3 - mu2) / (mu2 - mu1));
    let sigma = if xi.abs() < 1e-12 {
        (mu2 - mu1) / core::f64::consts::LN_2
    } else {
        xi * (mu2 - mu1) / libm::expm1(xi * core::f64::consts::LN_2)
    };
    (xi, sigma)
}

/// Endpoint index `k` with `F̄_{R|W}(r) ∝ (r_F - r)^k` near a finite endpoint,
/// from survivor values at distances `h` and `h/2` below it.
fn endpoint_index_from<F: Fn(f64) -> f64>(tail: F, r_f: f64, h: f64) -> f64 {
    let s1 = tail(r_f - h);
    let s2 = tail(r_f - 0.5 * h);
    libm::log2(s1 / s2)
}

/// Supremum of the radii in `[lo, hi]` where `f` is positive, assuming `f(lo) > 0`
/// and that the positive set is an interval.
fn effective_endpoint<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> f64 {
    let inner = hi - 1e-12 * (hi - lo).max(hi.abs());
    if f(inner) > 0.0 {
        return hi;
    }
    let (mut a, mut b) = (lo, inner);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if f(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    b
}

/// `∫_r^{r_F} f`, integrated directly so that tiny masses near the endpoint keep
/// full relative precision.
fn survivor_near_end<F: Fn(f64) -> f64>(f: &F, r: f64, r_f: f64) -> f64 {
    let tol = Tolerance { abs: 0.0, rel: 1e-12, max_intervals: 400 };
    integrate(f, r, r_f, tol).value
}

/// Numeric endpoint index of the conditional radial distribution at `angle`
/// (finite radial endpoint required).
pub fn endpoint_index(e: &ArDensityEngine, angle: f64) -> Result<f64> {
    let (ray, p) = e.profile(angle);
    if !ray.r_hi.is_finite() {
        return Err(Error::Unsupported("endpoint index needs a finite radial endpoint"));
    }
    if p.divergent || p.total() <= 0.0 {
        return Err(Error::Domain("no finite radial mass at this angle"));
    }
    let f = |r: f64| e.density_on_ray(&ray, r);
    let r_f = effective_endpoint(&f, ray.r_lo + 1e-9 * (ray.r_hi - ray.r_lo), ray.r_hi);
    let h = 1e-3 * (r_f - ray.r_lo);
    Ok(endpoint_index_from(|r| survivor_near_end(&f, r, r_f), r_f, h))
}

/// Direction on the L¹ circle and its radial-gauge factor `‖w₁‖_g`.
fn l1_direction(b: &[f64]) -> (Vec<f64>, f64) {
    let n1: f64 = b.iter().map(|x| x.abs()).sum();
    (b.iter().map(|x| x / n1).collect(), 1.0 / n1)
}

/// Builds the SPAR record at one scalar angle (two dimensions).
pub fn spar_record(e: &ArDensityEngine, opts: &SparOptions, angle: f64) -> Result<AngleRecord> {
    if !(opts.zeta > 0.0 && opts.zeta < 1.0) {
        return Err(Error::Domain("exceedance probability must lie in (0, 1)"));
    }
    if e.dim() != 2 {
        return Err(Error::Unsupported("scalar-angle records need two dimensions"));
    }
    let (ray, profile) = e.profile(angle);
    let f = |r: f64| e.density_on_ray(&ray, r);
    let variant = opts.variant.unwrap_or_else(|| default_variant(&e.margin));
    record_from_profile(e, opts, variant, Some(angle), &ray, &profile, &f)
}

/// Builds the SPAR record at a vector angle on the unit L¹ sphere (L¹ radius).
pub fn spar_record_vector(e: &ArDensityEngine, opts: &SparOptions, w: &[f64]) -> Result<AngleRecord> {
    if !(opts.zeta > 0.0 && opts.zeta < 1.0) {
        return Err(Error::Domain("exceedance probability must lie in (0, 1)"));
    }
    if !e.map.radial.is_l1() {
        return Err(Error::Unsupported("vector-angle records use the L1 radius"));
    }
    let f = |r: f64| e.joint_polar_density_vector(r, w).unwrap_or(0.0);
    let (lo, hi) = support_range_vector(e, w);
    let profile = if hi > lo {
        RadialProfile::build(&f, lo, hi, 1.0)
    } else {
        RadialProfile { lower: 0.0, upper: 0.0, pieces: Vec::new(), head: 0.0, tail: 0.0, divergent: false }
    };
    let ray = Ray { b: [f64::NAN, f64::NAN], ln_jac: 0.0, r_lo: lo, r_hi: hi };
    let variant = opts.variant.unwrap_or_else(|| default_variant(&e.margin));
    let mut rec = record_from_profile(e, opts, variant, None, &ray, &profile, &f)?;
    rec.b = w.to_vec();
    Ok(rec)
}

fn support_range_vector(e: &ArDensityEngine, w: &[f64]) -> (f64, f64) {
    let (lo, hi) = e.margin.support();
    let mut r_lo = 0.0_f64;
    let mut r_hi = f64::INFINITY;
    for (j, &bj) in w.iter().enumerate() {
        let o = e.origin[j];
        if bj > 0.0 {
            r_lo = r_lo.max((lo - o) / bj);
            r_hi = r_hi.min((hi - o) / bj);
        } else if bj < 0.0 {
            r_lo = r_lo.max((hi - o) / bj);
            r_hi = r_hi.min((lo - o) / bj);
        } else if o < lo || o > hi {
            return (0.0, 0.0);
        }
    }
    (r_lo, r_hi.max(r_lo))
}

fn record_from_profile<F: Fn(f64) -> f64>(
    e: &ArDensityEngine,
    opts: &SparOptions,
    variant: Variant,
    angle: Option<f64>,
    ray: &Ray,
    profile: &RadialProfile,
    f: &F,
) -> Result<AngleRecord> {
    let zeta = opts.zeta;
    let b: Vec<f64> = if angle.is_some() { ray.b.to_vec() } else { Vec::new() };
    let mut flags = RecordFlags::default();
    let f_w = profile.total();
    if profile.divergent {
        flags.divergent = true;
        return Ok(invalid_record(angle, b, zeta, f_w, ray.r_hi, flags));
    }
    if !(f_w > 0.0) {
        flags.empty = true;
        return Ok(invalid_record(angle, b, zeta, f_w, ray.r_hi, flags));
    }
    let mass = zeta * f_w;
    let mu = profile.tail_quantile(f, mass)?;
    let d = e.dim() as f64;
    let quantile = |z: f64| profile.tail_quantile(f, z * f_w);
    let numeric_hazard_sigma = || mass / f(mu);

    let mut lambda = None;
    let (xi, sigma) = match variant {
        Variant::GammaTailLaplace | Variant::GpTail if e.margin.is_laplace() => {
            let entry = match (opts.source, angle) {
                (Source::Catalog, Some(_)) => {
                    let (w1, g) = l1_direction(&ray.b);
                    lambda_catalog(&e.copula, [w1[0], w1[1]])?.map(|en| (en, w1, g))
                }
                (Source::Catalog, None) if matches!(e.copula.family(), Family::Independence) => {
                    Some((standard(1.0, 0.0), Vec::new(), 1.0))
                }
                _ => None,
            };
            match entry {
                Some((en, w1, g)) => match en.profile {
                    Profile::Standard => {
                        lambda = Some(en.lambda);
                        (0.0, g / en.lambda)
                    }
                    Profile::GaussianType { .. } => {
                        flags.degenerate = true;
                        (0.0, gamma_or_gp_sigma(variant, d, mu, numeric_hazard_sigma(), f, mass))
                    }
                    Profile::MuDependent { alpha } => {
                        flags.degenerate = true;
                        let mu1 = mu / g;
                        (0.0, g / (1.0 + 2.0 * alpha * (w1[0] * w1[1]).abs() * mu1))
                    }
                },
                None => {
                    flags.numeric = true;
                    match variant {
                        Variant::GammaTailLaplace => (0.0, gamma_slope_sigma(f, d, mu, quantile(zeta / 4.0)?)),
                        _ => pickands_fit(mu, quantile(zeta / 2.0)?, quantile(zeta / 4.0)?),
                    }
                }
            }
        }
        Variant::GammaTailLaplace => return Err(Error::Unsupported("gamma-tail variant needs Laplace margins")),
        Variant::ParetoTail => {
            if !matches!(e.margin, Margin::StandardPareto) {
                return Err(Error::Unsupported("Pareto-tail variant needs standard Pareto margins"));
            }
            let kappa = match (opts.source, catalog_tail_order(&e.copula, [1, 1])) {
                (Source::Catalog, Some(k)) => k,
                _ => {
                    flags.numeric = true;
                    tail_order_refined(&e.copula, [1, 1], 1e-6)?
                }
            };
            let xi = 1.0 / kappa;
            let sigma = match (opts.source, ev_sigma0(e, angle, f_w)) {
                (Source::Catalog, Some(s0)) => mu + s0,
                _ => mu / kappa,
            };
            (xi, sigma)
        }
        Variant::GpTail => {
            let cat = if opts.source == Source::Catalog { elliptical_catalog(e, mu) } else { None };
            match cat {
                Some(p) => p,
                None => {
                    flags.numeric = true;
                    if ray.r_hi.is_finite() {
                        let r_f = effective_endpoint(f, mu, ray.r_hi);
                        let h = 1e-3 * (r_f - mu);
                        let k = endpoint_index_from(|r| survivor_near_end(f, r, r_f), r_f, h);
                        let xi = -1.0 / k;
                        (xi, -xi * (r_f - mu))
                    } else {
                        pickands_fit(mu, quantile(zeta / 2.0)?, quantile(zeta / 4.0)?)
                    }
                }
            }
        }
    };
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Domain("fitted scale is not positive and finite"));
    }
    Ok(AngleRecord { angle, b, mu, zeta, xi, sigma, f_w, lambda, r_upper: ray.r_hi, flags })
}

/// Closed-form tail parameters for an elliptical copula on its own margins.
fn elliptical_catalog(e: &ArDensityEngine, mu: f64) -> Option<(f64, f64)> {
    match (e.copula.family(), e.margin) {
        (Family::StudentT { nu, .. }, Margin::StudentT { nu: m }) if nu == m && e.origin.iter().all(|&o| o == 0.0) => {
            Some((1.0 / nu, mu / nu))
        }
        _ => None,
    }
}

/// Scale for the gamma or GP form matching the density at the threshold.
fn gamma_or_gp_sigma<F: Fn(f64) -> f64>(variant: Variant, d: f64, mu: f64, hazard_sigma: f64, f: &F, mass: f64) -> f64 {
    match variant {
        Variant::GammaTailLaplace => {
            // solve f(μ)/mass = μ^{d-1} e^{-μ/σ} / (σ^d Γ(d, μ/σ)) for σ
            let target = libm::log(f(mu) / mass);
            let g = |s: f64| (d - 1.0) * libm::log(mu) - mu / s - gamma_norm_ln(d, mu, s) - target;
            let hi = hazard_sigma.max(1e-300);
            crate::roots::brent(g, hi * 1e-3, hi, 1e-14 * hi).unwrap_or(hazard_sigma)
        }
        _ => hazard_sigma,
    }
}

/// `ln(σ^d Γ(d, μ/σ))`.
fn gamma_norm_ln(d: f64, mu: f64, sigma: f64) -> f64 {
    let x = mu / sigma;
    let q = upper_gamma(d, x);
    if q > 0.0 {
        d * libm::log(sigma) + libm::log(q)
    } else {
        // large-argument asymptote Γ(d, x) ~ x^{d-1} e^{-x}
        d * libm::log(sigma) + (d - 1.0) * libm::log(x) - x
    }
}

/// Gamma-tail scale from the slope of `ln(f(r)/r^{d-1})` between two radii.
fn gamma_slope_sigma<F: Fn(f64) -> f64>(f: &F, d: f64, r1: f64, r2: f64) -> f64 {
    let g = |r: f64| libm::log(f(r)) - (d - 1.0) * libm::log(r);
    (r2 - r1) / (g(r1) - g(r2))
}

/// `σ₀(q) = b̃(q)/f_Q(q)` for EV copulas on Pareto margins with origin `1_d`.
fn ev_sigma0(e: &ArDensityEngine, angle: Option<f64>, f_w: f64) -> Option<f64> {
    let q = angle?;
    let dep = match e.copula.family() {
        Family::Ev(dep) if e.copula.reflection() == [false, false] => dep,
        _ => return None,
    };
    let unit_origin = e.origin.iter().all(|&o| o == 1.0);
    let l1 = e.map.radial.is_l1() && e.map.angular.boundary.is_l1() && e.map.angular.scale == AngleScale::Pseudo;
    if !(unit_origin && l1 && q > 0.0 && q < 1.0) {
        return None;
    }
    let b_tilde = libm::exp(dep.ln_abs_a12(q, 1.0 - q)) / (q * (1.0 - q));
    Some(b_tilde / f_w)
}

/// Builds a SPAR model over a scalar-angle grid (two dimensions).
pub fn build_spar(e: &ArDensityEngine, opts: &SparOptions, grid: &[f64]) -> Result<SparModel> {
    let records = grid.iter().map(|&a| spar_record(e, opts, a)).collect::<Result<Vec<_>>>()?;
    Ok(assemble(e, opts, records, Some(e.map.angular.scale)))
}

/// Builds a SPAR model over vector angles on the unit L¹ sphere.
pub fn build_spar_vector(e: &ArDensityEngine, opts: &SparOptions, grid: &[Vec<f64>]) -> Result<SparModel> {
    let records = grid.iter().map(|w| spar_record_vector(e, opts, w)).collect::<Result<Vec<_>>>()?;
    Ok(assemble(e, opts, records, None))
}

/// Wraps precomputed records (for example built in parallel) into a model.
pub fn assemble(e: &ArDensityEngine, opts: &SparOptions, records: Vec<AngleRecord>, scale: Option<AngleScale>) -> SparModel {
    SparModel {
        margin: e.margin,
        dim: e.dim(),
        variant: opts.variant.unwrap_or_else(|| default_variant(&e.margin)),
        source: opts.source,
        angle_scale: scale,
        records,
    }
}

// ---------------------------------------------------------------------------
// Evaluation

fn gp_ln_density(xi: f64, sigma: f64, x: f64) -> f64 {
    if x < 0.0 {
        return f64::NEG_INFINITY;
    }
    if xi.abs() < 1e-12 {
        return -libm::log(sigma) - x / sigma;
    }
    let z = 1.0 + xi * x / sigma;
    if z <= 0.0 {
        return f64::NEG_INFINITY;
    }
    -libm::log(sigma) - (1.0 / xi + 1.0) * libm::log(z)
}

impl SparModel {
    /// SPAR density for a single record at radius `r >= μ`.
    pub fn record_density(&self, rec: &AngleRecord, r: f64) -> Result<f64> {
        if !rec.flags.valid() {
            return Err(Error::Domain("SPAR undefined at this angle"));
        }
        if r < rec.mu {
            return Err(Error::Domain("below threshold: SPAR undefined"));
        }
        let scale = rec.zeta * rec.f_w;
        Ok(match self.variant {
            Variant::GpTail | Variant::ParetoTail => scale * libm::exp(gp_ln_density(rec.xi, rec.sigma, r - rec.mu)),
            Variant::GammaTailLaplace => {
                let d = self.dim as f64;
                let ln_a = gamma_norm_ln(d, rec.mu, rec.sigma);
                scale * libm::exp((d - 1.0) * libm::log(r) - r / rec.sigma - ln_a)
            }
        })
    }

    /// Index of the grid record closest to `angle` (two dimensions).
    pub fn nearest(&self, angle: f64) -> Option<usize> {
        let period = match self.angle_scale? {
            AngleScale::Pseudo => 4.0,
            AngleScale::Radians => core::f64::consts::TAU,
        };
        let dist = |a: f64| {
            let d = libm::fmod((a - angle).abs(), period);
            d.min(period - d)
        };
        (0..self.records.len())
            .filter(|&i| self.records[i].angle.is_some())
            .min_by(|&i, &j| {
                dist(self.records[i].angle.unwrap_or(f64::NAN))
                    .partial_cmp(&dist(self.records[j].angle.unwrap_or(f64::NAN)))
                    .unwrap_or(core::cmp::Ordering::Equal)
            })
    }
}

/// SPAR density at `(r, angle)`, using the grid record at `angle` (nearest grid angle).
pub fn spar_density(m: &SparModel, r: f64, angle: f64) -> Result<f64> {
    let i = m.nearest(angle).ok_or(Error::Domain("model has no scalar-angle grid"))?;
    m.record_density(&m.records[i], r)
}

/// Limit-set boundary on Laplace margins.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitSetBoundary {
    /// Boundary points `w σ(w)` in grid order.
    pub points: Vec<Vec<f64>>,
    /// True where the limit-set radius is zero.
    pub degenerate: Vec<bool>,
}

impl LimitSetBoundary {
    /// Largest absolute coordinate over the boundary.
    pub fn max_abs(&self) -> f64 {
        self.points.iter().flat_map(|p| p.iter().map(|x| x.abs())).fold(0.0, f64::max)
    }

    /// Largest coordinate `j` attained with the given sign.
    pub fn extent(&self, j: usize, sign: f64) -> f64 {
        self.points.iter().map(|p| sign * p[j]).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Boundary `{w σ(w)}` of the limit set of a Laplace-margin SPAR model.
pub fn limit_set(m: &SparModel) -> Result<LimitSetBoundary> {
    if !m.margin.is_laplace() {
        return Err(Error::Unsupported("limit sets are defined for Laplace margins"));
    }
    let mut points = Vec::with_capacity(m.records.len());
    let mut degenerate = Vec::with_capacity(m.records.len());
    for rec in &m.records {
        let deg = rec.flags.degenerate || !rec.flags.valid();
        let s = if deg { 0.0 } else { rec.sigma };
        points.push(rec.b.iter().map(|x| x * s).collect());
        degenerate.push(deg);
    }
    Ok(LimitSetBoundary { points, degenerate })
}

/// Finite-difference estimate of `λ(w) - 1` from `ln δ_L` on Laplace margins:
/// `(ln δ_L(r_lo, w) - ln δ_L(r_hi, w)) / (r_hi - r_lo)`.
///
/// A non-zero `β(w)` biases the estimate by about `β ln(r_hi/r_lo)/(r_hi - r_lo)`.
pub fn numeric_lambda_slope(e: &ArDensityEngine, w: &[f64], r_lo: f64, r_hi: f64) -> Result<f64> {
    if !e.margin.is_laplace() {
        return Err(Error::Unsupported("numeric slopes use Laplace margins"));
    }
    if !(r_lo < r_hi) {
        return Err(Error::Domain("need r_lo < r_hi"));
    }
    if (lp_norm(1.0, w) - 1.0).abs() > 1e-9 {
        return Err(Error::Domain("angle must lie on the L1 sphere"));
    }
    let ln_delta = |r: f64| {
        let x: Vec<f64> = w.iter().zip(&e.origin).map(|(a, o)| o + r * a).collect();
        e.ln_delta_at(&x)
    };
    let (a, b) = (ln_delta(r_lo), ln_delta(r_hi));
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain("copula density vanishes on the ray"));
    }
    Ok((a - b) / (r_hi - r_lo))
}

/// `ln Γ(d)`-based normaliser `A(w) = σ^d Γ(d, μ/σ)` of the gamma-tail variant.
pub fn gamma_normaliser(d: usize, mu: f64, sigma: f64) -> f64 {
    libm::exp(gamma_norm_ln(d as f64, mu, sigma))
}
