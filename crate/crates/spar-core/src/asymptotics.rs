//! Tail orders, exponent functions and the conversions between linear (ARL)
//! and exponent (ARE) descriptions of a copula near a corner.

use crate::copulas::{CopulaModel, EvDependence, Family};
use crate::error::{Error, Result};
use crate::margins::Coord;

/// Joe's taxonomy of tail behaviour at a corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DependenceClass {
    /// κ = 1 with a positive limit χ.
    Strong,
    /// 1 < κ < d.
    Intermediate,
    /// κ = d.
    OrthantIndependent,
    /// κ > d, including corners excluded from the support.
    Negative,
}

impl DependenceClass {
    pub fn name(&self) -> &'static str {
        match self {
            DependenceClass::Strong => "strong",
            DependenceClass::Intermediate => "intermediate",
            DependenceClass::OrthantIndependent => "orthant_independent",
            DependenceClass::Negative => "negative",
        }
    }
}

/// Tail summary of a copula at one corner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticSummary {
    pub corner: [u8; 2],
    /// Tail order; `f64::INFINITY` for corners outside the support.
    pub kappa: f64,
    pub chi: Option<f64>,
    pub beta_pair: Option<(f64, f64)>,
    pub class: DependenceClass,
    /// True when κ came from a closed form rather than a numeric estimate.
    pub from_catalog: bool,
}

/// Closed-form exponent functions at a corner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentValue {
    /// Copula exponent `Λ`, when known in closed form.
    pub big_lambda: Option<f64>,
    /// Copula-density exponent `λ`.
    pub lambda: f64,
}

/// Effective corner of the unreflected family that a model corner maps to.
fn base_corner(c: &CopulaModel, corner: [u8; 2]) -> [bool; 2] {
    let r = c.reflection();
    [r[0] ^ (corner[0] == 1), r[1] ^ (corner[1] == 1)]
}

fn check_corner(corner: [u8; 2]) -> Result<()> {
    if corner.iter().any(|&b| b > 1) {
        return Err(Error::Domain("corner entries must be 0 or 1"));
    }
    Ok(())
}

/// Closed-form tail order of the copula at `corner`, when catalogued.
pub fn catalog_tail_order(c: &CopulaModel, corner: [u8; 2]) -> Option<f64> {
    let d = c.dim() as f64;
    let [up0, up1] = base_corner(c, corner);
    let upper = up0 && up1;
    let lower = !up0 && !up1;
    match c.family() {
        Family::Independence => Some(d),
        Family::Frank { .. } => Some(2.0),
        Family::Gaussian { rho } => Some(if upper || lower { 2.0 / (1.0 + rho) } else { 2.0 / (1.0 - rho) }),
        Family::StudentT { .. } => Some(1.0),
        Family::Joe { alpha } => {
            if alpha == 1.0 {
                Some(2.0)
            } else if upper {
                Some(1.0)
            } else if lower {
                Some(2.0)
            } else {
                None
            }
        }
        Family::Ev(dep) => {
            if upper {
                Some(1.0)
            } else if lower {
                Some(dep.a(1.0, 1.0))
            } else {
                None
            }
        }
        Family::Clayton { alpha } if alpha > 0.0 => {
            if lower {
                Some(1.0)
            } else if upper {
                Some(2.0)
            } else {
                None
            }
        }
        Family::BivExponential { alpha } => {
            if lower && alpha > 0.0 {
                Some(f64::INFINITY)
            } else if upper || alpha == 0.0 {
                Some(2.0)
            } else {
                None
            }
        }
        _ => None,
    }
}

/// Closed-form exponent functions `Λ_{u0}(z)`, `λ_{u0}(z)` (homogeneous of order 1).
///
/// Returns `Ok(None)` for families or corners without a closed form.
pub fn exponent_catalog(c: &CopulaModel, corner: [u8; 2], z: [f64; 2]) -> Result<Option<ExponentValue>> {
    check_corner(corner)?;
    if !(z[0] >= 0.0 && z[1] >= 0.0) || z[0] + z[1] <= 0.0 {
        return Err(Error::Domain("exponent arguments must lie in the positive orthant"));
    }
    let [up0, up1] = base_corner(c, corner);
    let upper = up0 && up1;
    let lower = !up0 && !up1;
    let (z1, z2) = (z[0], z[1]);
    let max = z1.max(z2);
    let sum = z1 + z2;
    let v = match c.family() {
        Family::Independence | Family::Frank { .. } => ExponentValue { big_lambda: Some(sum), lambda: sum },
        Family::StudentT { nu, .. } => {
            ExponentValue { big_lambda: Some(max), lambda: (1.0 + 2.0 / nu) * max - sum / nu }
        }
        Family::Gaussian { rho } => {
            let r = if upper || lower { rho } else { -rho };
            let lam = (sum - 2.0 * r * libm::sqrt(z1 * z2)) / (1.0 - r * r);
            // Λ(z) = inf over y >= z of λ(y)
            let big = if r > 0.0 && z1 < r * r * z2 {
                z2
            } else if r > 0.0 && z2 < r * r * z1 {
                z1
            } else {
                lam
            };
            ExponentValue { big_lambda: Some(big), lambda: lam }
        }
        Family::Ev(dep) => {
            if lower {
                let a = dep.a(z1, z2);
                ExponentValue { big_lambda: Some(a), lambda: a }
            } else if upper {
                match dep {
                    EvDependence::SymmetricLogistic { alpha } => {
                        let b = alpha - 1.0;
                        ExponentValue { big_lambda: Some(max), lambda: are_from_arl_homogeneous(1.0, b, b, z1, z2) }
                    }
                    _ => return Ok(None),
                }
            } else {
                return Ok(None);
            }
        }
        _ => return Ok(None),
    };
    Ok(Some(v))
}

/// ARL tail function shape from an ARE description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArlShape {
    /// `B(z) = z1^{(κ-β)/2} z2^{(κ+β)/2}`, normalised so that `B(1,1) = 1`.
    pub b: f64,
    /// Exponents of the tail density shape `z1^{e1} z2^{e2}`.
    pub density_exponents: (f64, f64),
}

/// Tail function shape implied by the exponent model with tail order `kappa`
/// and asymmetry index `beta`.
pub fn arl_from_are(kappa: f64, beta: f64, z1: f64, z2: f64) -> Result<ArlShape> {
    if !(z1 > 0.0 && z2 > 0.0) {
        return Err(Error::Domain("ARL arguments must be positive"));
    }
    let e1 = 0.5 * (kappa - beta);
    let e2 = 0.5 * (kappa + beta);
    Ok(ArlShape { b: libm::pow(z1, e1) * libm::pow(z2, e2), density_exponents: (e1 - 1.0, e2 - 1.0) })
}

/// Copula-density exponent `λ(1-w, w)` implied by an ARL density model with
/// edge indices `beta1`, `beta2`.
pub fn are_from_arl(kappa: f64, beta1: f64, beta2: f64, w: f64) -> Result<f64> {
    if !(w > 0.0 && w < 1.0) {
        return Err(Error::Domain("w must lie in (0, 1)"));
    }
    if !(beta1 > 0.0 && beta2 > 0.0) {
        return Err(Error::Parameter("edge indices must be positive"));
    }
    let b = if w <= 0.5 { beta2 } else { beta1 };
    Ok(0.5 * kappa + (2.0 * (1.0 + b) - kappa) * (w - 0.5).abs())
}

/// Homogeneous extension of [`are_from_arl`] to `z` in the positive orthant.
fn are_from_arl_homogeneous(kappa: f64, beta1: f64, beta2: f64, z1: f64, z2: f64) -> f64 {
    let s = z1 + z2;
    let w = z2 / s;
    let b = if w <= 0.5 { beta2 } else { beta1 };
    s * (0.5 * kappa + (2.0 * (1.0 + b) - kappa) * (w - 0.5).abs())
}

/// Finite-level slope `Δ ln c_{u0}(t z) / Δ ln t` over the decades `(t, t/100)`,
/// estimating `κ - d`. Returns `+∞` when the density vanishes there.
pub fn tail_density_slope(c: &CopulaModel, corner: [u8; 2], z: [f64; 2], t: f64) -> Result<f64> {
    check_corner(corner)?;
    if !(t > 0.0 && t <= 1e-2) {
        return Err(Error::Domain("tail level must lie in (0, 0.01]"));
    }
    if !(z[0] > 0.0 && z[1] > 0.0) {
        return Err(Error::Domain("direction must lie in the open positive orthant"));
    }
    let v = c.reflect_corner(corner);
    let ln_c = |s: f64| {
        let coords = [Coord::from_prob(s * z[0]), Coord::from_prob(s * z[1])];
        v.ln_density_coords(&coords)
    };
    let (a, b) = (ln_c(t), ln_c(t * 1e-2));
    if a == f64::NEG_INFINITY || b == f64::NEG_INFINITY {
        return Ok(f64::INFINITY);
    }
    Ok((a - b) / libm::log(100.0))
}

/// Tail order estimate with the `1/ln t` bias of slowly varying factors removed.
///
/// Slopes of `ln C_{u0}(s 1_d)` against `ln s` over the decades `(t, t/10)` and
/// `(t/10, t/100)` are extrapolated linearly in `1/ln s`.
pub fn tail_order_refined(c: &CopulaModel, corner: [u8; 2], t: f64) -> Result<f64> {
    check_corner(corner)?;
    if !(t > 0.0 && t <= 1e-2) {
        return Err(Error::Domain("tail level must lie in (0, 0.01]"));
    }
    let v = c.reflect_corner(corner);
    let d = c.dim();
    let ln_cdf = |s: f64| {
        let coords: alloc::vec::Vec<Coord> = (0..d).map(|_| Coord::from_prob(s)).collect();
        v.ln_cdf_coords(&coords)
    };
    let anchors = [t, t * 0.1, t * 0.01];
    let vals = anchors.map(ln_cdf);
    if vals.iter().any(|x| *x == f64::NEG_INFINITY) {
        return Ok(f64::INFINITY);
    }
    let ln10 = core::f64::consts::LN_10;
    let s1 = (vals[0] - vals[1]) / ln10;
    let s2 = (vals[1] - vals[2]) / ln10;
    let l1 = libm::log(t) - 0.5 * ln10;
    let l2 = libm::log(t) - 1.5 * ln10;
    Ok((s1 * l1 - s2 * l2) / (l1 - l2))
}

/// Tail summary at `corner`; catalogued values are preferred over numeric estimates.
pub fn classify(c: &CopulaModel, corner: [u8; 2]) -> Result<AsymptoticSummary> {
    check_corner(corner)?;
    let d = c.dim() as f64;
    let (kappa, from_catalog) = match catalog_tail_order(c, corner) {
        Some(k) => (k, true),
        None => (tail_order_refined(c, corner, 1e-6)?, false),
    };
    let chi = if (kappa - 1.0).abs() < 0.05 {
        Some(catalog_chi(c, corner).unwrap_or(c.chi_estimate(corner, 1e-8)?.value))
    } else if kappa.is_finite() {
        Some(0.0)
    } else {
        None
    };
    let beta_pair = catalog_beta_pair(c, corner);
    let class = if !kappa.is_finite() {
        DependenceClass::Negative
    } else if (kappa - 1.0).abs() < 0.05 && chi.is_some_and(|x| x > 1e-6) {
        DependenceClass::Strong
    } else if (kappa - d).abs() < 0.05 {
        DependenceClass::OrthantIndependent
    } else if kappa > d {
        DependenceClass::Negative
    } else {
        DependenceClass::Intermediate
    };
    Ok(AsymptoticSummary { corner, kappa, chi, beta_pair, class, from_catalog })
}

fn catalog_chi(c: &CopulaModel, corner: [u8; 2]) -> Option<f64> {
    let [up0, up1] = base_corner(c, corner);
    match c.family() {
        Family::Ev(dep) if up0 && up1 => Some(2.0 - dep.a(1.0, 1.0)),
        Family::StudentT { rho, nu } => {
            let r = if up0 == up1 { rho } else { -rho };
            // χ = 2 T_{ν+1}(-√((ν+1)(1-ρ)/(1+ρ)))
            let x = -libm::sqrt((nu + 1.0) * (1.0 - r) / (1.0 + r));
            Some(2.0 * crate::special::t_cdf(x, nu + 1.0))
        }
        _ => None,
    }
}

fn catalog_beta_pair(c: &CopulaModel, corner: [u8; 2]) -> Option<(f64, f64)> {
    let [up0, up1] = base_corner(c, corner);
    match c.family() {
        Family::StudentT { nu, .. } => Some((1.0 / nu, 1.0 / nu)),
        Family::Ev(EvDependence::SymmetricLogistic { alpha }) if up0 && up1 => Some((alpha - 1.0, alpha - 1.0)),
        Family::Independence => Some((0.0, 0.0)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::SQRT_2;

    fn ev(alpha: f64) -> CopulaModel {
        CopulaModel::new(Family::Ev(EvDependence::SymmetricLogistic { alpha })).unwrap()
    }

    #[test]
    fn exponent_examples() {
        let e = exponent_catalog(&ev(2.0), [0, 0], [0.5, 0.5]).unwrap().unwrap();
        assert!((e.lambda - libm::sqrt(0.5)).abs() < 1e-15);
        assert_eq!(e.big_lambda, Some(e.lambda));
        let t = CopulaModel::new(Family::StudentT { rho: 0.3, nu: 2.0 }).unwrap();
        let e = exponent_catalog(&t, [0, 0], [1.0, 1e-12]).unwrap().unwrap();
        assert!((e.lambda - 1.5).abs() < 1e-11);
        let i = CopulaModel::independence(2).unwrap();
        let e = exponent_catalog(&i, [1, 0], [0.5, 0.5]).unwrap().unwrap();
        assert_eq!((e.lambda, e.big_lambda), (1.0, Some(1.0)));
    }

    #[test]
    fn arl_are_examples() {
        let s = arl_from_are(2.0, 0.0, 0.3, 0.7).unwrap();
        assert!((s.b - 0.21).abs() < 1e-15);
        assert_eq!(s.density_exponents, (0.0, 0.0));
        let s = arl_from_are(1.25, 0.0, 0.5, 0.5).unwrap();
        assert!((s.b - libm::pow(0.25, 0.625)).abs() < 1e-15);
        assert!((s.b - 0.42045).abs() < 1e-5);
        assert!((are_from_arl(1.0, 0.5, 0.5, 0.25).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(are_from_arl(1.3, 0.2, 0.7, 0.5).unwrap(), 0.65);
        assert!((are_from_arl(1.0, 1.0, 1.0, 1e-12).unwrap() - 2.0).abs() < 1e-11);
    }

    #[test]
    fn slope_examples() {
        let i = CopulaModel::independence(2).unwrap();
        assert!(tail_density_slope(&i, [0, 0], [0.5, 0.5], 1e-6).unwrap().abs() < 1e-9);
        let g = CopulaModel::new(Family::Gaussian { rho: 0.6 }).unwrap();
        let s = tail_density_slope(&g, [0, 0], [0.5, 0.5], 1e-6).unwrap();
        assert!((s + 0.75).abs() < 0.05, "{s}");
        let s = tail_density_slope(&ev(2.0), [1, 1], [0.5, 0.5], 1e-5).unwrap();
        assert!((s + 1.0).abs() < 0.02, "{s}");
    }

    #[test]
    fn classify_examples() {
        let s = classify(&ev(2.0), [1, 1]).unwrap();
        assert_eq!(s.class, DependenceClass::Strong);
        assert_eq!(s.kappa, 1.0);
        assert!((s.chi.unwrap() - (2.0 - SQRT_2)).abs() < 1e-12);
        let g = CopulaModel::new(Family::Gaussian { rho: 0.6 }).unwrap();
        let s = classify(&g, [0, 0]).unwrap();
        assert_eq!(s.class, DependenceClass::Intermediate);
        assert!((s.kappa - 1.25).abs() < 1e-15);
        let s = classify(&CopulaModel::independence(2).unwrap(), [0, 0]).unwrap();
        assert_eq!((s.class, s.kappa), (DependenceClass::OrthantIndependent, 2.0));
        let b = CopulaModel::new(Family::BivExponential { alpha: 0.5 }).unwrap();
        let s = classify(&b, [0, 0]).unwrap();
        assert_eq!(s.class, DependenceClass::Negative);
        assert!(s.kappa.is_infinite());
    }
}
