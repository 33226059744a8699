//! Copula densities and distribution functions, corner reflections,
//! conditional-inversion sampling and finite-level tail coefficients.
//!
//! Evaluation takes [`Coord`] arguments so that points within `1e-300` of
//! any edge of the unit square keep full relative precision. Reflecting a
//! coordinate through `u ↦ 1 - u` swaps the two logarithms of a `Coord`.

use alloc::vec::Vec;
use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::margins::Coord;
use crate::quad::{geometric_sum, integrate, Extension, Tolerance};
use crate::special::{
    ln1m_exp, ln_add_exp, ln_gamma, norm_cdf, norm_ln_cdf, norm_ln_pdf, norm_quantile_logs, t_cdf, t_ln_cdf_sf,
    t_quantile_logs,
};

/// Stable tail dependence function of a bivariate extreme value copula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvDependence {
    /// `A(x, y) = (x^α + y^α)^{1/α}`, `α >= 1`.
    SymmetricLogistic { alpha: f64 },
    /// `A = (1-γ₁)x + (1-γ₂)y + ((γ₁x)^α + (γ₂y)^α)^{1/α}`.
    AsymmetricLogistic { alpha: f64, gamma1: f64, gamma2: f64 },
    /// `A = x Φ(1/α + (α/2) ln(x/y)) + y Φ(1/α + (α/2) ln(y/x))`, `α > 0`.
    HuslerReiss { alpha: f64 },
}

/// `(m (a^α + b^α)^{1/α})` computed with the larger argument factored out.
fn lp_sum(alpha: f64, a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == 0.0 {
        return 0.0;
    }
    m * libm::pow(libm::pow(a / m, alpha) + libm::pow(b / m, alpha), 1.0 / alpha)
}

impl EvDependence {
    pub fn validate(&self) -> Result<()> {
        match *self {
            EvDependence::SymmetricLogistic { alpha } if alpha >= 1.0 && alpha.is_finite() => Ok(()),
            EvDependence::AsymmetricLogistic { alpha, gamma1, gamma2 }
                if alpha >= 1.0
                    && alpha.is_finite()
                    && (0.0..=1.0).contains(&gamma1)
                    && (0.0..=1.0).contains(&gamma2) =>
            {
                Ok(())
            }
            EvDependence::HuslerReiss { alpha } if alpha > 0.0 && alpha.is_finite() => Ok(()),
            _ => Err(Error::Parameter("extreme value dependence parameter out of range")),
        }
    }

    /// Stable tail dependence function `A(x, y)` for `x, y >= 0`.
    pub fn a(&self, x: f64, y: f64) -> f64 {
        match *self {
            EvDependence::SymmetricLogistic { alpha } => lp_sum(alpha, x, y),
            EvDependence::AsymmetricLogistic { alpha, gamma1, gamma2 } => {
                (1.0 - gamma1) * x + (1.0 - gamma2) * y + lp_sum(alpha, gamma1 * x, gamma2 * y)
            }
            EvDependence::HuslerReiss { alpha } => {
                if x == 0.0 || y == 0.0 {
                    return x + y;
                }
                let l = libm::log(x / y);
                let a1 = 1.0 / alpha + 0.5 * alpha * l;
                let a2 = 1.0 / alpha - 0.5 * alpha * l;
                x * norm_cdf(a1) + y * norm_cdf(a2)
            }
        }
    }

    /// `ln ∂A/∂x` at `(x, y)`.
    pub fn ln_a1(&self, x: f64, y: f64) -> f64 {
        match *self {
            EvDependence::SymmetricLogistic { alpha } => {
                if alpha == 1.0 {
                    return 0.0;
                }
                (alpha - 1.0) * (libm::log(x) - libm::log(self.a(x, y)))
            }
            EvDependence::AsymmetricLogistic { alpha, gamma1, gamma2 } => {
                let (a, b) = (gamma1 * x, gamma2 * y);
                let n = lp_sum(alpha, a, b);
                let frac = if n == 0.0 { 0.0 } else { libm::pow(a / n, alpha - 1.0) };
                libm::log((1.0 - gamma1) + gamma1 * frac)
            }
            EvDependence::HuslerReiss { alpha } => {
                if y == 0.0 {
                    return 0.0;
                }
                if x == 0.0 {
                    return f64::NEG_INFINITY;
                }
                norm_ln_cdf(1.0 / alpha + 0.5 * alpha * libm::log(x / y))
            }
        }
    }

    /// `ln ∂A/∂y` at `(x, y)`.
    pub fn ln_a2(&self, x: f64, y: f64) -> f64 {
        self.swapped().ln_a1(y, x)
    }

    /// `ln |∂²A/∂x∂y|` at `(x, y)`; the mixed partial is never positive.
    pub fn ln_abs_a12(&self, x: f64, y: f64) -> f64 {
        match *self {
            EvDependence::SymmetricLogistic { alpha } => {
                if alpha == 1.0 || x == 0.0 || y == 0.0 {
                    return f64::NEG_INFINITY;
                }
                let la = libm::log(self.a(x, y));
                libm::log(alpha - 1.0) - la + (alpha - 1.0) * (libm::log(x) + libm::log(y) - 2.0 * la)
            }
            EvDependence::AsymmetricLogistic { alpha, gamma1, gamma2 } => {
                let (a, b) = (gamma1 * x, gamma2 * y);
                if alpha == 1.0 || a == 0.0 || b == 0.0 {
                    return f64::NEG_INFINITY;
                }
                let ln_n = libm::log(lp_sum(alpha, a, b));
                libm::log((alpha - 1.0) * gamma1 * gamma2)
                    + (alpha - 1.0) * (libm::log(a) + libm::log(b) - 2.0 * ln_n)
                    - ln_n
            }
            EvDependence::HuslerReiss { alpha } => {
                if x == 0.0 || y == 0.0 {
                    return f64::NEG_INFINITY;
                }
                let a1 = 1.0 / alpha + 0.5 * alpha * libm::log(x / y);
                libm::log(0.5 * alpha / y) + norm_ln_pdf(a1)
            }
        }
    }

    /// The same model with the roles of the two arguments exchanged.
    pub fn swapped(&self) -> Self {
        match *self {
            EvDependence::AsymmetricLogistic { alpha, gamma1, gamma2 } => {
                EvDependence::AsymmetricLogistic { alpha, gamma1: gamma2, gamma2: gamma1 }
            }
            other => other,
        }
    }

    /// Log copula density in exponential coordinates `x = -ln u`, `y = -ln v`.
    pub fn ln_density_exp(&self, x: f64, y: f64) -> f64 {
        let t2 = self.ln_a1(x, y) + self.ln_a2(x, y);
        let t3 = self.ln_abs_a12(x, y);
        x + y - self.a(x, y) + ln_add_exp(t2, t3)
    }
}

/// A copula family and its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Independence,
    Frank { alpha: f64 },
    Joe { alpha: f64 },
    Gaussian { rho: f64 },
    StudentT { rho: f64, nu: f64 },
    Ev(EvDependence),
    Clayton { alpha: f64 },
    Nelsen4215 { alpha: f64 },
    BivExponential { alpha: f64 },
}

impl Family {
    /// Machine-readable family name.
    pub fn name(&self) -> &'static str {
        match self {
            Family::Independence => "independence",
            Family::Frank { .. } => "frank",
            Family::Joe { .. } => "joe",
            Family::Gaussian { .. } => "gaussian",
            Family::StudentT { .. } => "t",
            Family::Ev(EvDependence::SymmetricLogistic { .. }) => "ev_logistic",
            Family::Ev(EvDependence::AsymmetricLogistic { .. }) => "ev_asymmetric_logistic",
            Family::Ev(EvDependence::HuslerReiss { .. }) => "husler_reiss",
            Family::Clayton { .. } => "clayton",
            Family::Nelsen4215 { .. } => "nelsen_4215",
            Family::BivExponential { .. } => "bivariate_exponential",
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Family::Independence => true,
            Family::Frank { alpha } => alpha != 0.0 && alpha.is_finite(),
            Family::Joe { alpha } => alpha >= 1.0 && alpha.is_finite(),
            Family::Gaussian { rho } => rho > -1.0 && rho < 1.0,
            Family::StudentT { rho, nu } => rho > -1.0 && rho < 1.0 && nu > 0.0 && nu.is_finite(),
            Family::Ev(dep) => return dep.validate(),
            Family::Clayton { alpha } => alpha >= -1.0 && alpha != 0.0 && alpha.is_finite(),
            Family::Nelsen4215 { alpha } => alpha >= 1.0 && alpha.is_finite(),
            Family::BivExponential { alpha } => (0.0..=1.0).contains(&alpha),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter("copula parameter out of range"))
        }
    }

    /// Families invariant under `(u, v) ↦ (1 - u, 1 - v)`.
    fn radially_symmetric(&self) -> bool {
        matches!(self, Family::Independence | Family::Frank { .. } | Family::Gaussian { .. } | Family::StudentT { .. })
    }

    /// For families whose single reflection stays in the family, the reflected member.
    fn single_reflection(&self) -> Option<Family> {
        match *self {
            Family::Independence => Some(Family::Independence),
            Family::Frank { alpha } => Some(Family::Frank { alpha: -alpha }),
            Family::Gaussian { rho } => Some(Family::Gaussian { rho: -rho }),
            Family::StudentT { rho, nu } => Some(Family::StudentT { rho: -rho, nu }),
            _ => None,
        }
    }
}

/// A copula, possibly viewed from a reflected corner.
///
/// `reflect[j]` replaces coordinate `j` by `1 - u_j`, so the model with
/// `reflect = (true, true)` is the survival copula.
#[derive(Debug, Clone, PartialEq)]
pub struct CopulaModel {
    family: Family,
    dim: usize,
    reflect: [bool; 2],
}

/// Finite-level tail-coefficient estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEstimate {
    pub value: f64,
    /// True when the corner lies outside the copula support at this level.
    pub outside_support: bool,
}

impl CopulaModel {
    pub fn new(family: Family) -> Result<Self> {
        family.validate()?;
        Ok(CopulaModel { family, dim: 2, reflect: [false, false] })
    }

    pub fn independence(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Parameter("dimension must be at least 2"));
        }
        Ok(CopulaModel { family: Family::Independence, dim, reflect: [false, false] })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn reflection(&self) -> [bool; 2] {
        self.reflect
    }

    /// View of the copula from `corner`: coordinate `j` is replaced by `1 - u_j` when `corner[j] = 1`.
    pub fn reflect_corner(&self, corner: [u8; 2]) -> Self {
        let mut m = self.clone();
        m.reflect[0] ^= corner[0] == 1;
        m.reflect[1] ^= corner[1] == 1;
        m
    }

    fn view(&self, c: &[Coord]) -> [Coord; 2] {
        let f = |j: usize| if self.reflect[j] { c[j].reflect() } else { c[j] };
        [f(0), f(1)]
    }

    /// Log density at probability coordinates; `-∞` outside the support.
    pub fn ln_density_coords(&self, c: &[Coord]) -> f64 {
        if let Family::Independence = self.family {
            return 0.0;
        }
        let [a, b] = self.view(c);
        ln_density_base(&self.family, a, b)
    }

    pub fn density(&self, u: &[f64]) -> f64 {
        let c: Vec<Coord> = u.iter().map(|&x| Coord::from_prob(x)).collect();
        libm::exp(self.ln_density_coords(&c))
    }

    /// Log distribution function at probability coordinates (two dimensions,
    /// or any dimension for independence).
    pub fn ln_cdf_coords(&self, c: &[Coord]) -> f64 {
        if let Family::Independence = self.family {
            return c.iter().map(|x| x.ln_u).sum();
        }
        let (a, b) = (c[0], c[1]);
        let fam = &self.family;
        match self.reflect {
            [false, false] => ln_cdf_base(fam, a, b),
            [true, true] => {
                if fam.radially_symmetric() {
                    ln_cdf_base(fam, a, b)
                } else {
                    // u + v - 1 + C(1-u, 1-v)
                    let s = a.u() + b.u() + libm::expm1(ln_cdf_base(fam, a.reflect(), b.reflect()));
                    if s > 0.0 {
                        libm::log(s)
                    } else {
                        f64::NEG_INFINITY
                    }
                }
            }
            [true, false] => match fam.single_reflection() {
                Some(g) => ln_cdf_base(&g, a, b),
                // v - C(1-u, v)
                None => b.ln_u + ln1m_exp(ln_cdf_base(fam, a.reflect(), b) - b.ln_u),
            },
            [false, true] => match fam.single_reflection() {
                Some(g) => ln_cdf_base(&g, a, b),
                None => a.ln_u + ln1m_exp(ln_cdf_base(fam, a, b.reflect()) - a.ln_u),
            },
        }
    }

    pub fn cdf(&self, u: &[f64]) -> f64 {
        if u.iter().any(|&x| x <= 0.0) {
            return 0.0;
        }
        let c: Vec<Coord> = u.iter().map(|&x| Coord::from_prob(x.min(1.0))).collect();
        libm::exp(self.ln_cdf_coords(&c)).clamp(0.0, 1.0)
    }

    /// `ln C_{u0}(t 1_d) / ln t`, with `u0` the corner.
    pub fn tail_order_estimate(&self, corner: [u8; 2], t: f64) -> Result<TailEstimate> {
        if !(t > 0.0 && t <= 0.01) {
            return Err(Error::Domain("tail level must lie in (0, 0.01]"));
        }
        let v = self.reflect_corner(corner);
        let c = Coord::from_prob(t);
        let coords: Vec<Coord> = (0..self.dim).map(|_| c).collect();
        let lc = v.ln_cdf_coords(&coords);
        if lc == f64::NEG_INFINITY {
            return Ok(TailEstimate { value: f64::INFINITY, outside_support: true });
        }
        Ok(TailEstimate { value: lc / libm::log(t), outside_support: false })
    }

    /// `C_{u0}(t 1_d) / t`.
    pub fn chi_estimate(&self, corner: [u8; 2], t: f64) -> Result<TailEstimate> {
        if !(t > 0.0 && t <= 0.01) {
            return Err(Error::Domain("tail level must lie in (0, 0.01]"));
        }
        let v = self.reflect_corner(corner);
        let c = Coord::from_prob(t);
        let coords: Vec<Coord> = (0..self.dim).map(|_| c).collect();
        let lc = v.ln_cdf_coords(&coords);
        Ok(TailEstimate { value: libm::exp(lc - libm::log(t)), outside_support: lc == f64::NEG_INFINITY })
    }

    /// Conditional distribution `∂C(u, v)/∂u` of the unreflected family.
    pub fn h_function(&self, u: f64, v: f64) -> f64 {
        h_base(&self.family, u, v)
    }

    /// Draws `n` points with a generator seeded from `seed`.
    pub fn sample_seeded(&self, n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        self.sample(n, &mut rng)
    }

    /// Draws `n` i.i.d. points from the copula.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let p = match self.family {
                Family::Independence => (0..self.dim).map(|_| rng.sample::<f64, _>(Open01)).collect(),
                _ => {
                    let [u, v] = sample_pair(&self.family, rng);
                    let u = if self.reflect[0] { 1.0 - u } else { u };
                    let v = if self.reflect[1] { 1.0 - v } else { v };
                    alloc::vec![u, v]
                }
            };
            out.push(p);
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Unreflected families

fn frank_h(alpha: f64, z: f64) -> f64 {
    libm::expm1(-alpha * z)
}

fn ln_density_base(fam: &Family, a: Coord, b: Coord) -> f64 {
    match *fam {
        Family::Independence => 0.0,
        Family::Frank { alpha } => {
            let (u, v) = (a.u(), b.u());
            let h1 = frank_h(alpha, 1.0);
            let den = frank_h(alpha, u) * frank_h(alpha, v) + h1;
            libm::log(-alpha * h1) - alpha * (u + v) - 2.0 * libm::log(den.abs())
        }
        Family::Joe { alpha } => {
            // in terms of the complements ū, v̄
            let (lu, lv) = (a.ln_ubar, b.ln_ubar);
            let ln_z = joe_ln_z(alpha, lu, lv);
            let z = libm::exp(ln_z);
            (alpha - 1.0) * (lu + lv) + (1.0 / alpha - 2.0) * ln_z + libm::log(z + alpha - 1.0)
        }
        Family::Gaussian { rho } => {
            let x = norm_quantile_logs(a.ln_u, a.ln_ubar);
            let y = norm_quantile_logs(b.ln_u, b.ln_ubar);
            let s = 1.0 - rho * rho;
            -0.5 * libm::log(s) - (rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * s)
        }
        Family::StudentT { rho, nu } => {
            let x = t_quantile_logs(a.ln_u, a.ln_ubar, nu);
            let y = t_quantile_logs(b.ln_u, b.ln_ubar, nu);
            let s = 1.0 - rho * rho;
            let lg = ln_gamma(0.5 * nu) - ln_gamma(0.5 * (nu + 1.0));
            2.0 * lg + libm::log(0.5 * nu) - 0.5 * libm::log(s)
                - (0.5 * nu + 1.0) * libm::log1p((x * x + y * y - 2.0 * rho * x * y) / (nu * s))
                + 0.5 * (nu + 1.0) * (libm::log1p(x * x / nu) + libm::log1p(y * y / nu))
        }
        Family::Ev(dep) => dep.ln_density_exp(-a.ln_u, -b.ln_u),
        Family::Clayton { alpha } => {
            if alpha == -1.0 {
                return f64::NEG_INFINITY;
            }
            let z = clayton_z(alpha, a.ln_u, b.ln_u);
            if z <= 0.0 {
                return f64::NEG_INFINITY;
            }
            libm::log(1.0 + alpha) + (-alpha - 1.0) * (a.ln_u + b.ln_u) + (-1.0 / alpha - 2.0) * libm::log(z)
        }
        Family::Nelsen4215 { alpha } => {
            if alpha == 1.0 {
                return f64::NEG_INFINITY;
            }
            let x = -libm::expm1(a.ln_u / alpha);
            let y = -libm::expm1(b.ln_u / alpha);
            let n = lp_sum(alpha, x, y);
            let z = 1.0 - n;
            if z <= 0.0 || x <= 0.0 || y <= 0.0 {
                return f64::NEG_INFINITY;
            }
            libm::log(1.0 - 1.0 / alpha)
                + (1.0 / alpha - 1.0) * (a.ln_u + b.ln_u)
                + (alpha - 1.0) * (libm::log(x) + libm::log(y))
                + (1.0 - 2.0 * alpha) * libm::log(n)
                + (alpha - 2.0) * libm::log(z)
        }
        Family::BivExponential { alpha } => {
            let (p, q) = (a.ln_u, b.ln_u);
            -alpha * p * q + libm::log(alpha * alpha * p * q - alpha * (p + q) - alpha + 1.0)
        }
    }
}

/// `ln z` for the Joe copula with `z = ū^α + v̄^α - (ū v̄)^α`, from `ln ū`, `ln v̄`.
fn joe_ln_z(alpha: f64, lu: f64, lv: f64) -> f64 {
    let a = -libm::expm1(alpha * lu);
    let b = -libm::expm1(alpha * lv);
    if a * b < 0.5 {
        libm::log1p(-a * b)
    } else {
        ln_add_exp(alpha * lu, alpha * lv + libm::log(a))
    }
}

/// Clayton generator sum `u^{-α} + v^{-α} - 1` from `ln u`, `ln v`.
fn clayton_z(alpha: f64, lu: f64, lv: f64) -> f64 {
    let e1 = libm::expm1(-alpha * lu);
    let e2 = libm::expm1(-alpha * lv);
    // add the smaller terms first
    (e1 + e2) + 1.0
}

fn ln_cdf_base(fam: &Family, a: Coord, b: Coord) -> f64 {
    if a.ln_u == f64::NEG_INFINITY || b.ln_u == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if a.ln_ubar == f64::NEG_INFINITY {
        return b.ln_u;
    }
    if b.ln_ubar == f64::NEG_INFINITY {
        return a.ln_u;
    }
    match *fam {
        Family::Independence => a.ln_u + b.ln_u,
        Family::Frank { alpha } => {
            let (hu, hv, h1) = (frank_h(alpha, a.u()), frank_h(alpha, b.u()), frank_h(alpha, 1.0));
            let ln_r = libm::log(hu.abs()) + libm::log(hv.abs()) - libm::log(h1.abs());
            // r = hu hv / h1 has the sign of -α
            let sign = if alpha > 0.0 { -1.0 } else { 1.0 };
            if ln_r < -40.0 {
                ln_r - libm::log(alpha.abs())
            } else {
                let r = sign * libm::exp(ln_r);
                libm::log(-libm::log1p(r) / alpha)
            }
        }
        Family::Joe { alpha } => {
            let ln_z = joe_ln_z(alpha, a.ln_ubar, b.ln_ubar);
            ln1m_exp(ln_z / alpha)
        }
        Family::Gaussian { .. } | Family::StudentT { .. } => elliptical_ln_cdf(fam, a, b),
        Family::Ev(dep) => -dep.a(-a.ln_u, -b.ln_u),
        Family::Clayton { alpha } => {
            let z = clayton_z(alpha, a.ln_u, b.ln_u);
            if z <= 0.0 {
                f64::NEG_INFINITY
            } else {
                -libm::log(z) / alpha
            }
        }
        Family::Nelsen4215 { alpha } => {
            let x = -libm::expm1(a.ln_u / alpha);
            let y = -libm::expm1(b.ln_u / alpha);
            let z = 1.0 - lp_sum(alpha, x, y);
            if z <= 0.0 {
                f64::NEG_INFINITY
            } else {
                alpha * libm::log(z)
            }
        }
        Family::BivExponential { alpha } => a.ln_u + b.ln_u - alpha * a.ln_u * b.ln_u,
    }
}

/// `ln P(V <= v | U = u)` for the Gaussian and t copulas, from the quantile `x` of `u`.
fn elliptical_ln_h(fam: &Family, x: f64, y: f64) -> f64 {
    match *fam {
        Family::Gaussian { rho } => norm_ln_cdf((y - rho * x) / libm::sqrt(1.0 - rho * rho)),
        Family::StudentT { rho, nu } => {
            let s = libm::sqrt((nu + x * x) * (1.0 - rho * rho) / (nu + 1.0));
            t_ln_cdf_sf((y - rho * x) / s, nu + 1.0).0
        }
        _ => unreachable!(),
    }
}

fn elliptical_quantile(fam: &Family, c: Coord) -> f64 {
    match *fam {
        Family::Gaussian { .. } => norm_quantile_logs(c.ln_u, c.ln_ubar),
        Family::StudentT { nu, .. } => t_quantile_logs(c.ln_u, c.ln_ubar, nu),
        _ => unreachable!(),
    }
}

/// `ln C(u, v)` for the Gaussian and t copulas as a one-dimensional integral
/// of the conditional distribution: `C(u, v) = u ∫_0^∞ e^{-s} h(u e^{-s} | v) ds`.
fn elliptical_ln_cdf(fam: &Family, a: Coord, b: Coord) -> f64 {
    let rho = match *fam {
        Family::Gaussian { rho } | Family::StudentT { rho, .. } => rho,
        _ => unreachable!(),
    };
    if let Family::Gaussian { rho: r } = *fam {
        if r == 0.0 {
            return a.ln_u + b.ln_u;
        }
    }
    // both coordinates in the upper half: use radial symmetry
    if a.ln_u > -core::f64::consts::LN_2 && b.ln_u > -core::f64::consts::LN_2 {
        let lc = elliptical_ln_cdf(fam, a.reflect(), b.reflect());
        // u + v - 1 + C(1-u, 1-v) = 1 - ū - v̄ + C(ū, v̄)
        let s = 1.0 - a.ubar() - b.ubar() + libm::exp(lc);
        return libm::log(s);
    }
    // integrate over the coordinate with the smaller probability
    let (a, b) = if a.ln_u <= b.ln_u { (a, b) } else { (b, a) };
    let _ = rho;
    let y = elliptical_quantile(fam, b);
    let ln_h_at = |s: f64| {
        let c = Coord::from_ln_u(a.ln_u - s);
        let x = elliptical_quantile(fam, c);
        elliptical_ln_h(fam, x, y)
    };
    let ln_h0 = ln_h_at(0.0);
    let tol = Tolerance { abs: 1e-300, rel: 1e-12, max_intervals: 200 };
    let integrand = |s: f64| libm::exp(-s + ln_h_at(s) - ln_h0);
    let piece = |k: usize| {
        let (lo, hi) = if k == 0 { (0.0, 1.0) } else { (libm::ldexp(1.0, k as i32 - 1), libm::ldexp(1.0, k as i32)) };
        integrate(integrand, lo, hi, tol).value
    };
    let total = match geometric_sum(piece, 1e-13, 12) {
        Extension::Converged { value } | Extension::Divergent { partial: value } => value,
    };
    a.ln_u + ln_h0 + libm::log(total)
}

// ---------------------------------------------------------------------------
// Sampling

fn h_base(fam: &Family, u: f64, v: f64) -> f64 {
    if v <= 0.0 {
        return 0.0;
    }
    if v >= 1.0 {
        return 1.0;
    }
    match *fam {
        Family::Independence => v,
        Family::Frank { alpha } => {
            let hv = frank_h(alpha, v);
            libm::exp(-alpha * u) * hv / (frank_h(alpha, 1.0) + frank_h(alpha, u) * hv)
        }
        Family::Joe { alpha } => {
            let (lu, lv) = (libm::log1p(-u), libm::log1p(-v));
            let ln_z = joe_ln_z(alpha, lu, lv);
            libm::exp((1.0 / alpha - 1.0) * ln_z + (alpha - 1.0) * lu) * (-libm::expm1(alpha * lv))
        }
        Family::Gaussian { rho } => {
            let (x, y) = (crate::special::norm_quantile(u), crate::special::norm_quantile(v));
            norm_cdf((y - rho * x) / libm::sqrt(1.0 - rho * rho))
        }
        Family::StudentT { rho, nu } => {
            let (x, y) = (crate::special::t_quantile(u, nu), crate::special::t_quantile(v, nu));
            let s = libm::sqrt((nu + x * x) * (1.0 - rho * rho) / (nu + 1.0));
            t_cdf((y - rho * x) / s, nu + 1.0)
        }
        Family::Ev(dep) => {
            let (x, y) = (-libm::log(u), -libm::log(v));
            libm::exp(-dep.a(x, y) + x + dep.ln_a1(x, y))
        }
        Family::Clayton { alpha } => {
            let z = clayton_z(alpha, libm::log(u), libm::log(v));
            if z <= 0.0 {
                return 0.0;
            }
            libm::exp((-alpha - 1.0) * libm::log(u) + (-1.0 / alpha - 1.0) * libm::log(z))
        }
        Family::Nelsen4215 { alpha } => {
            let x = -libm::expm1(libm::log(u) / alpha);
            let y = -libm::expm1(libm::log(v) / alpha);
            let s = lp_sum(alpha, x, y);
            let z = 1.0 - s;
            if z <= 0.0 {
                return 0.0;
            }
            libm::exp(
                (alpha - 1.0) * libm::log(z)
                    + (1.0 - alpha) * libm::log(s)
                    + (alpha - 1.0) * libm::log(x)
                    + (1.0 / alpha - 1.0) * libm::log(u),
            )
        }
        Family::BivExponential { alpha } => {
            let (a, b) = (libm::log(u), libm::log(v));
            v * libm::exp(-alpha * a * b) * (1.0 - alpha * b)
        }
    }
}

/// Solves `h(u, v) = w` for `v` by bisection.
fn invert_h(fam: &Family, u: f64, w: f64) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h_base(fam, u, mid) < w {
            lo = mid;
        } else {
            hi = mid;
        }
        let scale = mid.min(1.0 - mid).min(1.0);
        if hi - lo <= 1e-10 * scale.max(1e-290) {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn sample_pair<R: Rng + ?Sized>(fam: &Family, rng: &mut R) -> [f64; 2] {
    match *fam {
        Family::Gaussian { rho } => {
            let z1: f64 = rng.sample(StandardNormal);
            let e: f64 = rng.sample(StandardNormal);
            let z2 = rho * z1 + libm::sqrt(1.0 - rho * rho) * e;
            [norm_cdf(z1), norm_cdf(z2)]
        }
        Family::StudentT { rho, nu } => {
            let z1: f64 = rng.sample(StandardNormal);
            let e: f64 = rng.sample(StandardNormal);
            let z2 = rho * z1 + libm::sqrt(1.0 - rho * rho) * e;
            let chi = ChiSquared::new(nu).expect("positive degrees of freedom");
            let g: f64 = chi.sample(rng);
            let s = libm::sqrt(g / nu);
            [t_cdf(z1 / s, nu), t_cdf(z2 / s, nu)]
        }
        _ => {
            let u: f64 = rng.sample(Open01);
            let w: f64 = rng.sample(Open01);
            let v = match *fam {
                Family::Frank { alpha } => {
                    let hv = w * frank_h(alpha, 1.0) / (libm::exp(-alpha * u) - w * frank_h(alpha, u));
                    -libm::log1p(hv) / alpha
                }
                Family::Clayton { alpha } if alpha > -1.0 => {
                    let z = libm::pow(w * libm::pow(u, 1.0 + alpha), -alpha / (1.0 + alpha));
                    libm::pow(z + 1.0 - libm::pow(u, -alpha), -1.0 / alpha)
                }
                Family::Clayton { .. } => 1.0 - u,
                Family::Nelsen4215 { alpha } if alpha == 1.0 => 1.0 - u,
                _ => invert_h(fam, u, w),
            };
            [u, v.clamp(0.0, 1.0)]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(f: Family) -> CopulaModel {
        CopulaModel::new(f).unwrap()
    }

    #[test]
    fn density_examples() {
        assert_eq!(CopulaModel::independence(2).unwrap().density(&[0.3, 0.8]), 1.0);
        let g = m(Family::Gaussian { rho: 0.6 });
        assert!((g.density(&[0.5, 0.5]) - 1.25).abs() < 1e-12);
        assert_eq!(m(Family::Clayton { alpha: -0.5 }).density(&[0.04, 0.04]), 0.0);
        let f = m(Family::Frank { alpha: 10.0 }).density(&[0.5, 0.5]);
        assert!((f - 2.53).abs() < 0.01, "{f}");
    }

    #[test]
    fn cdf_examples() {
        let ev = m(Family::Ev(EvDependence::SymmetricLogistic { alpha: 2.0 }));
        let expect = libm::pow(10.0, -core::f64::consts::SQRT_2);
        assert!((ev.cdf(&[0.1, 0.1]) - expect).abs() < 1e-14);
        let cl = m(Family::Clayton { alpha: -0.2 });
        let expect = libm::pow(2.0 * libm::pow(10.0, -0.2) - 1.0, 5.0);
        assert!((cl.cdf(&[0.1, 0.1]) - expect).abs() < 1e-15);
        assert!((cl.cdf(&[0.37, 1.0]) - 0.37).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(CopulaModel::new(Family::Frank { alpha: 0.0 }).is_err());
        assert!(CopulaModel::new(Family::Joe { alpha: 0.5 }).is_err());
        assert!(CopulaModel::new(Family::Gaussian { rho: 1.0 }).is_err());
        assert!(CopulaModel::new(Family::Clayton { alpha: -1.5 }).is_err());
        assert!(CopulaModel::new(Family::BivExponential { alpha: 1.5 }).is_err());
    }

    #[test]
    fn husler_reiss_diagonal() {
        let alpha = 0.8;
        let dep = EvDependence::HuslerReiss { alpha };
        assert!((dep.a(0.5, 0.5) - norm_cdf(1.0 / alpha)).abs() < 1e-12);
    }

    #[test]
    fn t_with_zero_correlation_is_not_independence() {
        let nu = 3.0;
        let c = m(Family::StudentT { rho: 0.0, nu }).density(&[0.5, 0.5]);
        let g = libm::exp(ln_gamma(nu / 2.0) - ln_gamma((nu + 1.0) / 2.0));
        assert!((c - g * g * nu / 2.0).abs() < 1e-12);
        assert!((c - 1.0).abs() > 0.05);
    }

    #[test]
    fn sample_is_deterministic() {
        let c = m(Family::Joe { alpha: 2.0 });
        assert_eq!(c.sample_seeded(50, 7), c.sample_seeded(50, 7));
        assert!(c.sample_seeded(0, 7).is_empty());
    }

    #[test]
    fn ev_survival_corner() {
        let alpha = 2.0;
        let ev = m(Family::Ev(EvDependence::SymmetricLogistic { alpha }));
        let t = 1e-3;
        let s = ev.reflect_corner([1, 1]).cdf(&[t, t]);
        let lead = t * (2.0 - libm::sqrt(2.0));
        assert!((s - lead).abs() / lead < 2e-3, "{s} {lead}");
    }
}
