//! Univariate marginal families and the marginal product function.
//!
//! Every family evaluates its distribution function through a [`Coord`],
//! the pair `(ln F(x), ln F̄(x))`, so that both tails keep full relative
//! precision far into the extremes.

use crate::error::{Error, Result};
use crate::special::{
    ln1m_exp, norm_ln_cdf, norm_ln_pdf, norm_quantile_logs, t_ln_cdf_sf, t_ln_pdf, t_quantile_logs,
};

/// Shapes closer to zero than this use the exponential branch.
pub const XI_ZERO: f64 = 1e-12;

/// A probability stored as its logarithm and the logarithm of its complement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coord {
    pub ln_u: f64,
    pub ln_ubar: f64,
}

impl Coord {
    pub fn from_prob(u: f64) -> Self {
        Coord { ln_u: libm::log(u), ln_ubar: libm::log1p(-u) }
    }

    /// Builds the pair from `ln(1 - u)` alone.
    pub fn from_ln_ubar(ln_ubar: f64) -> Self {
        Coord { ln_u: ln1m_exp(ln_ubar), ln_ubar }
    }

    /// Builds the pair from `ln u` alone.
    pub fn from_ln_u(ln_u: f64) -> Self {
        Coord { ln_u, ln_ubar: ln1m_exp(ln_u) }
    }

    pub fn u(&self) -> f64 {
        if self.ln_u > -0.693 {
            -libm::expm1(self.ln_ubar)
        } else {
            libm::exp(self.ln_u)
        }
    }

    pub fn ubar(&self) -> f64 {
        if self.ln_ubar > -0.693 {
            -libm::expm1(self.ln_u)
        } else {
            libm::exp(self.ln_ubar)
        }
    }

    /// The coordinate `1 - u`.
    pub fn reflect(self) -> Self {
        Coord { ln_u: self.ln_ubar, ln_ubar: self.ln_u }
    }
}

/// Quantity requested from [`Margin::eval`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarginQuantity {
    Pdf,
    Cdf,
    Survivor,
    Quantile,
}

/// A univariate marginal distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Margin {
    /// Generalized Pareto on `[0, r_F)` with shape `xi` and scale `scale`.
    Gp { xi: f64, scale: f64 },
    /// Symmetric generalized Pareto with unit scale; `xi = 0` is the Laplace law.
    Sgp { xi: f64 },
    /// Pareto with survivor `1/x` on `[1, ∞)`.
    StandardPareto,
    /// Unit-rate exponential.
    Exponential,
    /// Standard normal.
    Normal,
    /// Standard Student t with `nu` degrees of freedom.
    StudentT { nu: f64 },
}

/// Log survivor of the unit-scale GP law at `x >= 0`.
fn gp_ln_sf(xi: f64, x: f64) -> f64 {
    if xi.abs() < XI_ZERO {
        -x
    } else {
        let z = xi * x;
        if z <= -1.0 {
            f64::NEG_INFINITY
        } else {
            -libm::log1p(z) / xi
        }
    }
}

/// Log density of the unit-scale GP law at `x >= 0` inside the support.
fn gp_ln_pdf(xi: f64, x: f64) -> f64 {
    if xi.abs() < XI_ZERO {
        -x
    } else {
        let z = libm::log1p(xi * x);
        let e = -1.0 / xi - 1.0;
        if e == 0.0 {
            0.0
        } else {
            e * z
        }
    }
}

/// Quantile of the unit-scale GP law from `ln F̄`.
fn gp_quantile_ln_sf(xi: f64, ln_sf: f64) -> f64 {
    if xi.abs() < XI_ZERO {
        -ln_sf
    } else {
        libm::expm1(-xi * ln_sf) / xi
    }
}

impl Margin {
    pub fn laplace() -> Self {
        Margin::Sgp { xi: 0.0 }
    }

    pub fn gp(xi: f64, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !xi.is_finite() {
            return Err(Error::Parameter("GP margin needs a finite shape and positive scale"));
        }
        Ok(Margin::Gp { xi, scale })
    }

    pub fn sgp(xi: f64) -> Result<Self> {
        if !xi.is_finite() {
            return Err(Error::Parameter("SGP margin needs a finite shape"));
        }
        Ok(Margin::Sgp { xi })
    }

    pub fn student_t(nu: f64) -> Result<Self> {
        if !(nu > 0.0) {
            return Err(Error::Parameter("t margin needs nu > 0"));
        }
        Ok(Margin::StudentT { nu })
    }

    pub fn is_laplace(&self) -> bool {
        matches!(self, Margin::Sgp { xi } if xi.abs() < XI_ZERO)
    }

    /// Closed support interval `(lower, upper)`.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Margin::Gp { xi, scale } => (0.0, if xi < 0.0 { -scale / xi } else { f64::INFINITY }),
            Margin::Sgp { xi } => {
                let e = if xi < 0.0 { -1.0 / xi } else { f64::INFINITY };
                (-e, e)
            }
            Margin::StandardPareto => (1.0, f64::INFINITY),
            Margin::Exponential => (0.0, f64::INFINITY),
            Margin::Normal | Margin::StudentT { .. } => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Upper endpoint `r_F` of the support.
    pub fn upper_endpoint(&self) -> f64 {
        self.support().1
    }

    pub fn in_support(&self, x: f64) -> bool {
        let (a, b) = self.support();
        x >= a && x <= b
    }

    /// Log density; `-∞` outside the support.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        if !self.in_support(x) || x.is_nan() {
            return f64::NEG_INFINITY;
        }
        match *self {
            Margin::Gp { xi, scale } => gp_ln_pdf(xi, x / scale) - libm::log(scale),
            Margin::Sgp { xi } => gp_ln_pdf(xi, x.abs()) - core::f64::consts::LN_2,
            Margin::StandardPareto => -2.0 * libm::log(x),
            Margin::Exponential => -x,
            Margin::Normal => norm_ln_pdf(x),
            Margin::StudentT { nu } => t_ln_pdf(x, nu),
        }
    }

    /// Density; zero outside the support.
    pub fn pdf(&self, x: f64) -> f64 {
        libm::exp(self.ln_pdf(x))
    }

    /// `(ln F(x), ln F̄(x))`, clamped to the support edges.
    pub fn coord(&self, x: f64) -> Coord {
        let (a, b) = self.support();
        if x <= a {
            return Coord { ln_u: f64::NEG_INFINITY, ln_ubar: 0.0 };
        }
        if x >= b {
            return Coord { ln_u: 0.0, ln_ubar: f64::NEG_INFINITY };
        }
        match *self {
            Margin::Gp { xi, scale } => Coord::from_ln_ubar(gp_ln_sf(xi, x / scale)),
            Margin::Sgp { xi } => {
                let h = gp_ln_sf(xi, x.abs()) - core::f64::consts::LN_2;
                let c = Coord::from_ln_ubar(h);
                if x >= 0.0 {
                    c
                } else {
                    c.reflect()
                }
            }
            Margin::StandardPareto => Coord::from_ln_ubar(-libm::log(x)),
            Margin::Exponential => Coord::from_ln_ubar(-x),
            Margin::Normal => Coord { ln_u: norm_ln_cdf(x), ln_ubar: norm_ln_cdf(-x) },
            Margin::StudentT { nu } => {
                let (lc, ls) = t_ln_cdf_sf(x, nu);
                Coord { ln_u: lc, ln_ubar: ls }
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.coord(x).u()
    }

    pub fn survivor(&self, x: f64) -> f64 {
        self.coord(x).ubar()
    }

    /// Quantile from a probability coordinate.
    pub fn quantile_coord(&self, c: Coord) -> f64 {
        let (a, b) = self.support();
        if c.ln_u == f64::NEG_INFINITY {
            return a;
        }
        if c.ln_ubar == f64::NEG_INFINITY {
            return b;
        }
        match *self {
            Margin::Gp { xi, scale } => scale * gp_quantile_ln_sf(xi, c.ln_ubar),
            Margin::Sgp { xi } => {
                let ln_half = -core::f64::consts::LN_2;
                if c.ln_ubar <= ln_half {
                    gp_quantile_ln_sf(xi, c.ln_ubar - ln_half)
                } else {
                    -gp_quantile_ln_sf(xi, c.ln_u - ln_half)
                }
            }
            Margin::StandardPareto => libm::exp(-c.ln_ubar),
            Margin::Exponential => -c.ln_ubar,
            Margin::Normal => norm_quantile_logs(c.ln_u, c.ln_ubar),
            Margin::StudentT { nu } => t_quantile_logs(c.ln_u, c.ln_ubar, nu),
        }
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain("probability outside [0, 1]"));
        }
        Ok(self.quantile_coord(Coord::from_prob(p)))
    }

    /// Evaluates a pdf, cdf, survivor or quantile with domain checking.
    pub fn eval(&self, what: MarginQuantity, x: f64) -> Result<f64> {
        match what {
            MarginQuantity::Quantile => self.quantile(x),
            _ => {
                if !self.in_support(x) {
                    return Err(Error::Domain("argument outside the margin support"));
                }
                Ok(match what {
                    MarginQuantity::Pdf => self.pdf(x),
                    MarginQuantity::Cdf => self.cdf(x),
                    _ => self.survivor(x),
                })
            }
        }
    }
}

/// Value of the marginal product together with a support flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalProduct {
    pub value: f64,
    /// False when some coordinate `r w_j` falls outside the margin support.
    pub inside: bool,
}

/// `m(r, w) = Π_j f(r w_j)` for a unit-L¹ vector angle `w`.
pub fn marginal_product(m: &Margin, r: f64, w: &[f64]) -> Result<MarginalProduct> {
    let n1: f64 = w.iter().map(|v| v.abs()).sum();
    if (n1 - 1.0).abs() > 1e-9 {
        return Err(Error::Domain("vector angle is not on the unit L1 sphere"));
    }
    if m.is_laplace() {
        let d = w.len() as i32;
        return Ok(MarginalProduct { value: libm::ldexp(libm::exp(-r), -d), inside: true });
    }
    Ok(marginal_product_generic(m, r, w))
}

/// Product of marginal densities without the closed-form shortcut.
pub fn marginal_product_generic(m: &Margin, r: f64, w: &[f64]) -> MarginalProduct {
    let mut ln = 0.0;
    for &wj in w {
        let x = r * wj;
        if !m.in_support(x) {
            return MarginalProduct { value: 0.0, inside: false };
        }
        ln += m.ln_pdf(x);
    }
    MarginalProduct { value: libm::exp(ln), inside: true }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(Margin::laplace().eval(MarginQuantity::Pdf, 0.0).unwrap(), 0.5);
        let gp = Margin::gp(1.0, 1.0).unwrap();
        assert!((gp.eval(MarginQuantity::Survivor, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((Margin::StandardPareto.eval(MarginQuantity::Cdf, 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(Margin::StandardPareto.eval(MarginQuantity::Pdf, 0.5).is_err());
        assert!(Margin::Normal.eval(MarginQuantity::Quantile, 1.5).is_err());
    }

    #[test]
    fn product_examples() {
        let l = Margin::laplace();
        let v = marginal_product(&l, 1.0, &[0.5, 0.5]).unwrap().value;
        assert!((v - libm::exp(-1.0) / 4.0).abs() < 1e-16);
        assert_eq!(marginal_product(&l, 0.0, &[0.3, -0.7]).unwrap().value, 0.25);
        let u = Margin::gp(-1.0, 1.0).unwrap();
        assert_eq!(marginal_product(&u, 1.0, &[0.5, 0.5]).unwrap().value, 1.0);
        let out = marginal_product(&u, 1.0, &[-0.5, 0.5]).unwrap();
        assert!(!out.inside && out.value == 0.0);
    }

    #[test]
    fn gp_endpoint_and_sgp_symmetry() {
        let gp = Margin::gp(-0.25, 2.0).unwrap();
        assert_eq!(gp.upper_endpoint(), 8.0);
        let s = Margin::sgp(-0.5).unwrap();
        assert_eq!(s.support(), (-2.0, 2.0));
        let x = 0.7;
        let half = 0.5 * Margin::gp(-0.5, 1.0).unwrap().pdf(x);
        assert!((s.pdf(x) - half).abs() < 1e-15 && (s.pdf(-x) - half).abs() < 1e-15);
    }

    #[test]
    fn pareto_identity() {
        let gp = Margin::gp(1.0, 1.0).unwrap();
        for &x in &[1.0, 2.5, 10.0, 1e6] {
            assert_eq!(gp.survivor(x), Margin::StandardPareto.survivor(x + 1.0));
        }
    }

    #[test]
    fn extreme_tails_keep_precision() {
        let l = Margin::laplace();
        let c = l.coord(700.0);
        assert!((c.ln_ubar - (-700.0 - core::f64::consts::LN_2)).abs() < 1e-12);
        assert!((l.quantile_coord(c) - 700.0).abs() < 1e-10);
        let c = Margin::Normal.coord(-35.0);
        assert!((Margin::Normal.quantile_coord(c) + 35.0).abs() < 1e-9);
    }
}
