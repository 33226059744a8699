//! Exact angular-radial densities for a copula on given margins in a given
//! polar coordinate system, and the closed-form elliptical special case.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::copulas::{CopulaModel, Family};
use crate::error::{Error, Result};
use crate::geometry::{AngleScale, PolarMap};
use crate::margins::{Coord, Margin};
use crate::quad::{geometric_sum, integrate, Extension, Tolerance};

const PIECE_TOL: Tolerance = Tolerance { abs: 1e-300, rel: 1e-12, max_intervals: 300 };
const SUM_TOL: f64 = 1e-12;
const MAX_PIECES: usize = 200;

/// Value of an angular density, or evidence that the radial integral diverges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngularDensity {
    Finite(f64),
    /// The radial integral keeps growing; `partial` is the truncated value.
    Divergent { partial: f64 },
}

impl AngularDensity {
    pub fn value(&self) -> Option<f64> {
        match *self {
            AngularDensity::Finite(v) => Some(v),
            AngularDensity::Divergent { .. } => None,
        }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, AngularDensity::Divergent { .. })
    }
}

/// Partition of a radial range into geometric pieces with their integrals.
///
/// Pieces shrink geometrically towards the lower end point and grow (or
/// shrink, for a finite upper end) towards the upper end point, so that
/// integrable singularities and infinite ranges are summed with geometric
/// tail extrapolation.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub lower: f64,
    pub upper: f64,
    /// `(lo, hi, ∫_lo^hi f)` in increasing order of `lo`.
    pub pieces: Vec<(f64, f64, f64)>,
    /// Extrapolated mass between `lower` and the first piece.
    pub head: f64,
    /// Extrapolated mass between the last piece and `upper`.
    pub tail: f64,
    pub divergent: bool,
}

fn collect<F: Fn(f64) -> f64>(f: &F, bounds: &dyn Fn(usize) -> (f64, f64)) -> (Vec<(f64, f64, f64)>, f64, bool) {
    let mut pieces = Vec::new();
    let ext = geometric_sum(
        |k| {
            let (lo, hi) = bounds(k);
            let v = if hi > lo { integrate(f, lo, hi, PIECE_TOL).value } else { 0.0 };
            pieces.push((lo, hi, v));
            v
        },
        SUM_TOL,
        MAX_PIECES,
    );
    let summed: f64 = pieces.iter().map(|p| p.2).sum();
    match ext {
        Extension::Converged { value } => (pieces, (value - summed).max(0.0), false),
        Extension::Divergent { .. } => (pieces, 0.0, true),
    }
}

impl RadialProfile {
    /// Builds the profile of `f` over `[a, b]`; `b` may be infinite. `scale` sets
    /// the width of the first pieces.
    pub fn build<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, scale: f64) -> Self {
        let (mid, l) = if b.is_finite() {
            (0.5 * (a + b), 0.5 * (b - a))
        } else {
            (a + scale, scale)
        };
        let (mut low, head, div_lo) = collect(f, &|k| {
            let hi = a + l * libm::ldexp(1.0, -(k as i32));
            let lo = a + l * libm::ldexp(1.0, -(k as i32) - 1);
            (lo, hi)
        });
        low.reverse();
        let (high, tail, div_hi) = if b.is_finite() {
            collect(f, &|k| {
                let lo = b - l * libm::ldexp(1.0, -(k as i32));
                let hi = b - l * libm::ldexp(1.0, -(k as i32) - 1);
                (lo, hi)
            })
        } else {
            collect(f, &|k| (mid + l * (libm::ldexp(1.0, k as i32) - 1.0), mid + l * (libm::ldexp(1.0, k as i32 + 1) - 1.0)))
        };
        let mut pieces = low;
        pieces.extend(high);
        RadialProfile { lower: a, upper: b, pieces, head, tail, divergent: div_lo || div_hi }
    }

    pub fn total(&self) -> f64 {
        self.head + self.pieces.iter().map(|p| p.2).sum::<f64>() + self.tail
    }

    /// `∫_r^upper f`.
    pub fn tail_integral<F: Fn(f64) -> f64>(&self, f: &F, r: f64) -> f64 {
        if r <= self.lower {
            return self.total();
        }
        if r >= self.upper {
            return 0.0;
        }
        let n = self.pieces.len();
        let idx = self.pieces.partition_point(|p| p.1 <= r);
        if idx == n {
            // beyond the tabulated pieces: integrate directly towards the upper end
            return direct_tail(f, r, self.upper);
        }
        let after: f64 = self.pieces[idx + 1..].iter().map(|p| p.2).sum::<f64>() + self.tail;
        let (lo, hi, v) = self.pieces[idx];
        if r <= lo {
            // inside the head region
            return v + after + integrate(f, r, lo, PIECE_TOL).value;
        }
        after + integrate(f, r, hi, PIECE_TOL).value
    }

    /// Smallest `r` with `∫_r^upper f = target`, for `0 < target < total`.
    pub fn tail_quantile<F: Fn(f64) -> f64>(&self, f: &F, target: f64) -> Result<f64> {
        let n = self.pieces.len();
        // cumulative tail at each piece's lower edge
        let mut tails = alloc::vec![0.0; n + 1];
        tails[n] = self.tail;
        for i in (0..n).rev() {
            tails[i] = tails[i + 1] + self.pieces[i].2;
        }
        if !(target > 0.0) || target >= tails[0] + self.head {
            return Err(Error::NotBracketed("conditional quantile"));
        }
        let (lo, hi, base) = if target > tails[0] {
            (self.lower, self.pieces.first().map_or(self.upper, |p| p.0), tails[0])
        } else if target <= self.tail {
            // beyond the tabulated pieces: extend by doubling
            let start = self.pieces.last().map_or(self.lower, |p| p.1);
            return extend_quantile(f, start, self.upper, self.tail, target);
        } else {
            let i = (0..n).find(|&i| tails[i + 1] < target).unwrap_or(n - 1);
            (self.pieces[i].0, self.pieces[i].1, tails[i + 1])
        };
        solve_in_piece(f, lo, hi, target - base)
    }
}

fn direct_tail<F: Fn(f64) -> f64>(f: &F, r: f64, upper: f64) -> f64 {
    if upper.is_finite() {
        return integrate(f, r, upper, PIECE_TOL).value;
    }
    let l = r.abs().max(1.0);
    match geometric_sum(
        |k| {
            let lo = r + l * (libm::ldexp(1.0, k as i32) - 1.0);
            let hi = r + l * (libm::ldexp(1.0, k as i32 + 1) - 1.0);
            integrate(f, lo, hi, PIECE_TOL).value
        },
        SUM_TOL,
        MAX_PIECES,
    ) {
        Extension::Converged { value } | Extension::Divergent { partial: value } => value,
    }
}

fn extend_quantile<F: Fn(f64) -> f64>(f: &F, start: f64, upper: f64, tail: f64, target: f64) -> Result<f64> {
    // walk outwards until the remaining mass drops below the target
    let mut lo = start;
    let mut remaining = tail;
    let mut width = start.abs().max(1.0);
    for _ in 0..200 {
        let hi = if upper.is_finite() { lo + 0.5 * (upper - lo) } else { lo + width };
        let m = integrate(f, lo, hi, PIECE_TOL).value;
        if remaining - m < target {
            return solve_in_piece(f, lo, hi, target - (remaining - m));
        }
        remaining -= m;
        lo = hi;
        width *= 2.0;
    }
    Err(Error::NotBracketed("conditional quantile"))
}

/// Solves `∫_r^hi f = mass` for `r ∈ [lo, hi]` by safeguarded Newton steps.
fn solve_in_piece<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, mass: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let mut r = 0.5 * (lo + hi);
    let mut g = integrate(f, r, hi, PIECE_TOL).value;
    for _ in 0..100 {
        // g(r) decreases in r
        if g > mass {
            a = r;
        } else {
            b = r;
        }
        let fr = f(r);
        let mut next = if fr > 0.0 { r + (g - mass) / fr } else { f64::NAN };
        if !(next > a && next < b) {
            next = 0.5 * (a + b);
        }
        if (next - r).abs() <= 1e-13 * r.abs().max(1e-3) || b - a <= 1e-13 * r.abs().max(1e-3) {
            return Ok(next);
        }
        let inc = integrate(f, r.min(next), r.max(next), PIECE_TOL).value;
        g += if next > r { -inc } else { inc };
        r = next;
    }
    Ok(r)
}

/// A point of a polar ray: boundary point of the radial gauge and the log Jacobian factor.
#[derive(Debug, Clone, Copy)]
pub struct Ray {
    /// Direction scaled to unit radial gauge; Cartesian point is `origin + r * b`.
    pub b: [f64; 2],
    /// `ln(J(angle) / R_rad(w)^2)`; the polar density is `r e^{ln_jac} f_X`.
    pub ln_jac: f64,
    /// Radial range inside the joint support.
    pub r_lo: f64,
    pub r_hi: f64,
}

/// Exact angular-radial densities for `(copula, margin, polar map, origin)`.
#[derive(Debug, Clone)]
pub struct ArDensityEngine {
    pub copula: CopulaModel,
    pub margin: Margin,
    pub map: PolarMap,
    pub origin: Vec<f64>,
}

/// Copula density along a marginal-scale ray, with a support flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaValue {
    pub value: f64,
    /// False when the point lies outside the margin support box.
    pub inside: bool,
}

impl ArDensityEngine {
    pub fn new(copula: CopulaModel, margin: Margin, map: PolarMap, origin: Option<Vec<f64>>) -> Result<Self> {
        let d = copula.dim();
        if map.dim() != d {
            return Err(Error::Parameter("polar map and copula differ in dimension"));
        }
        let origin = origin.unwrap_or_else(|| alloc::vec![0.0; d]);
        if origin.len() != d {
            return Err(Error::Parameter("origin has the wrong dimension"));
        }
        Ok(ArDensityEngine { copula, margin, map, origin })
    }

    pub fn dim(&self) -> usize {
        self.copula.dim()
    }

    /// `ln c(F(x_1), ..., F(x_d))`; `-∞` outside the support box.
    pub fn ln_delta_at(&self, x: &[f64]) -> f64 {
        if x.iter().any(|&v| !self.margin.in_support(v)) {
            return f64::NEG_INFINITY;
        }
        if let Family::Independence = self.copula.family() {
            return 0.0;
        }
        let c: Vec<Coord> = x.iter().map(|&v| self.margin.coord(v)).collect();
        self.copula.ln_density_coords(&c)
    }

    /// δ(r, w) = c(F(r w + origin)) for a vector angle `w`.
    pub fn delta(&self, r: f64, w: &[f64]) -> DeltaValue {
        let x: Vec<f64> = w.iter().zip(&self.origin).map(|(wj, oj)| r * wj + oj).collect();
        let inside = x.iter().all(|&v| self.margin.in_support(v));
        if !inside {
            return DeltaValue { value: 0.0, inside };
        }
        DeltaValue { value: libm::exp(self.ln_delta_at(&x)), inside }
    }

    /// Log of the Cartesian joint density.
    pub fn ln_joint_cartesian(&self, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for &v in x {
            let l = self.margin.ln_pdf(v);
            if l == f64::NEG_INFINITY {
                return l;
            }
            s += l;
        }
        s + self.ln_delta_at(x)
    }

    /// Ray geometry for a scalar angle (two dimensions).
    pub fn ray(&self, angle: f64) -> Ray {
        let w = self.map.angular.point(angle);
        let rw = self.map.radial.gauge2(w);
        let b = [w[0] / rw, w[1] / rw];
        let ln_jac = libm::log(self.map.angular.jacobian(angle)) - 2.0 * libm::log(rw);
        let (r_lo, r_hi) = self.support_range(&b);
        Ray { b, ln_jac, r_lo, r_hi }
    }

    fn support_range(&self, b: &[f64]) -> (f64, f64) {
        let (lo, hi) = self.margin.support();
        let mut r_lo = 0.0_f64;
        let mut r_hi = f64::INFINITY;
        for (j, &bj) in b.iter().enumerate() {
            let o = self.origin[j];
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

    fn ray_density(&self, ray: &Ray, r: f64) -> f64 {
        if r <= 0.0 || r < ray.r_lo || r > ray.r_hi {
            return 0.0;
        }
        let x = [self.origin[0] + r * ray.b[0], self.origin[1] + r * ray.b[1]];
        let l = self.ln_joint_cartesian(&x);
        if l == f64::NEG_INFINITY {
            return 0.0;
        }
        libm::exp(l + libm::log(r) + ray.ln_jac)
    }

    /// Joint density of `(R, angle)` (two dimensions).
    pub fn joint_polar_density(&self, r: f64, angle: f64) -> f64 {
        let ray = self.ray(angle);
        self.ray_density(&ray, r)
    }

    /// `ln f_{R,angle}(r, angle)`; `-∞` where the density vanishes.
    pub fn ln_joint_polar_density(&self, r: f64, angle: f64) -> f64 {
        let ray = self.ray(angle);
        if r <= 0.0 || r < ray.r_lo || r > ray.r_hi {
            return f64::NEG_INFINITY;
        }
        let x = [self.origin[0] + r * ray.b[0], self.origin[1] + r * ray.b[1]];
        self.ln_joint_cartesian(&x) + libm::log(r) + ray.ln_jac
    }

    /// `r^{d-1} f_X(r w + origin)` for an L¹ radius and vector angle `w` on the unit L¹ sphere.
    pub fn joint_polar_density_vector(&self, r: f64, w: &[f64]) -> Result<f64> {
        if !self.map.radial.is_l1() {
            return Err(Error::Unsupported("vector-angle densities use the L1 radius"));
        }
        if r <= 0.0 {
            return Ok(0.0);
        }
        let x: Vec<f64> = w.iter().zip(&self.origin).map(|(wj, oj)| r * wj + oj).collect();
        let l = self.ln_joint_cartesian(&x);
        Ok(if l == f64::NEG_INFINITY { 0.0 } else { libm::exp(l + (w.len() as f64 - 1.0) * libm::log(r)) })
    }

    fn scale_hint(&self, ray: &Ray) -> f64 {
        match self.margin {
            Margin::StandardPareto => ray.r_lo.max(1.0),
            _ => 1.0,
        }
    }

    /// Radial profile of the joint density along the ray at `angle`.
    pub fn profile(&self, angle: f64) -> (Ray, RadialProfile) {
        let ray = self.ray(angle);
        let f = |r: f64| self.ray_density(&ray, r);
        let p = if ray.r_hi > ray.r_lo {
            RadialProfile::build(&f, ray.r_lo, ray.r_hi, self.scale_hint(&ray))
        } else {
            RadialProfile { lower: 0.0, upper: 0.0, pieces: Vec::new(), head: 0.0, tail: 0.0, divergent: false }
        };
        (ray, p)
    }

    /// Density of the scalar angle (two dimensions).
    pub fn angular_density(&self, angle: f64) -> AngularDensity {
        let (_, p) = self.profile(angle);
        if p.divergent {
            AngularDensity::Divergent { partial: p.total() }
        } else {
            AngularDensity::Finite(p.total())
        }
    }

    /// Density of the vector angle on the unit L¹ sphere, any dimension.
    pub fn angular_density_vector(&self, w: &[f64]) -> Result<AngularDensity> {
        if !self.map.radial.is_l1() {
            return Err(Error::Unsupported("vector-angle densities use the L1 radius"));
        }
        let (r_lo, r_hi) = self.support_range(w);
        let f = |r: f64| self.joint_polar_density_vector(r, w).unwrap_or(0.0);
        if r_hi <= r_lo {
            return Ok(AngularDensity::Finite(0.0));
        }
        let p = RadialProfile::build(&f, r_lo, r_hi, 1.0);
        Ok(if p.divergent { AngularDensity::Divergent { partial: p.total() } } else { AngularDensity::Finite(p.total()) })
    }

    /// `P(R > r | angle)`.
    pub fn conditional_survivor(&self, r: f64, angle: f64) -> Result<f64> {
        let (ray, p) = self.profile(angle);
        if p.divergent {
            return Err(Error::Divergent);
        }
        let f = |s: f64| self.ray_density(&ray, s);
        let total = p.total();
        if r <= ray.r_lo {
            return Ok(1.0);
        }
        Ok((p.tail_integral(&f, r) / total).clamp(0.0, 1.0))
    }

    /// Radius `μ` with `P(R > μ | angle) = ζ`.
    pub fn conditional_quantile(&self, zeta: f64, angle: f64) -> Result<f64> {
        if !(zeta > 0.0 && zeta < 1.0) {
            return Err(Error::Domain("exceedance probability must lie in (0, 1)"));
        }
        let (ray, p) = self.profile(angle);
        if p.divergent {
            return Err(Error::Divergent);
        }
        let f = |s: f64| self.ray_density(&ray, s);
        p.tail_quantile(&f, zeta * p.total())
    }

    /// Tail integral `∫_r^{r_F} f_{R,angle}(s, angle) ds` with an already built profile.
    pub fn tail_mass(&self, ray: &Ray, profile: &RadialProfile, r: f64) -> f64 {
        let f = |s: f64| self.ray_density(ray, s);
        profile.tail_integral(&f, r)
    }

    /// Quantile with an already built profile: `∫_μ^{r_F} f = mass`.
    pub fn tail_quantile(&self, ray: &Ray, profile: &RadialProfile, mass: f64) -> Result<f64> {
        let f = |s: f64| self.ray_density(ray, s);
        profile.tail_quantile(&f, mass)
    }

    /// Density along an explicit ray.
    pub fn density_on_ray(&self, ray: &Ray, r: f64) -> f64 {
        self.ray_density(ray, r)
    }
}

// ---------------------------------------------------------------------------
// Elliptical distributions

/// Radial generator of a bivariate elliptical law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    Normal,
    StudentT { nu: f64 },
}

/// Radius used with [`EllipticalModel::polar_density`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiusGauge {
    Elliptic,
    L2,
}

/// Bivariate normal or t law with standard margins and correlation `rho`,
/// with density `f_0(‖x‖²_{e,ρ})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticalModel {
    pub generator: Generator,
    pub rho: f64,
}

impl EllipticalModel {
    pub fn new(generator: Generator, rho: f64) -> Result<Self> {
        if !(rho > -1.0 && rho < 1.0) {
            return Err(Error::Parameter("rho must lie in (-1, 1)"));
        }
        if let Generator::StudentT { nu } = generator {
            if !(nu > 0.0) {
                return Err(Error::Parameter("nu must be positive"));
            }
        }
        Ok(EllipticalModel { generator, rho })
    }

    fn gamma(&self) -> f64 {
        1.0 / (2.0 * PI * libm::sqrt(1.0 - self.rho * self.rho))
    }

    /// Generator `f_0(z)`.
    pub fn f0(&self, z: f64) -> f64 {
        match self.generator {
            Generator::Normal => self.gamma() * libm::exp(-0.5 * z),
            Generator::StudentT { nu } => self.gamma() * libm::pow(1.0 + z / nu, -1.0 - 0.5 * nu),
        }
    }

    /// Antiderivative `F_0` of the generator with `F_0(∞) = 0`.
    pub fn big_f0(&self, z: f64) -> f64 {
        match self.generator {
            Generator::Normal => -2.0 * self.gamma() * libm::exp(-0.5 * z),
            Generator::StudentT { nu } => -2.0 * self.gamma() * libm::pow(1.0 + z / nu, -0.5 * nu),
        }
    }

    /// `α(θ) = ((1-ρ²)/(1-ρ sin 2θ))^{1/2}`.
    pub fn alpha(&self, theta: f64) -> f64 {
        libm::sqrt((1.0 - self.rho * self.rho) / (1.0 - self.rho * libm::sin(2.0 * theta)))
    }

    /// Joint density of `(R, θ)` for the elliptic or Euclidean radius.
    pub fn polar_density(&self, gauge: RadiusGauge, r: f64, theta: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let a = self.alpha(theta);
        match gauge {
            RadiusGauge::Elliptic => a * a * r * self.f0(r * r),
            RadiusGauge::L2 => r * self.f0((r / a) * (r / a)),
        }
    }

    /// `f_Θ(θ) = √(1-ρ²) / (2π (1 - ρ sin 2θ))`.
    pub fn angular_density(&self, theta: f64) -> f64 {
        libm::sqrt(1.0 - self.rho * self.rho) / (2.0 * PI * (1.0 - self.rho * libm::sin(2.0 * theta)))
    }

    /// Survivor of the elliptic radius (independent of angle).
    pub fn conditional_survivor(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 1.0;
        }
        self.big_f0(r * r) / self.big_f0(0.0)
    }

    /// Survivor of the Euclidean radius at angle `θ`.
    pub fn conditional_survivor_l2(&self, r: f64, theta: f64) -> f64 {
        self.conditional_survivor(r / self.alpha(theta))
    }

    /// Quantile of the elliptic radius at exceedance probability `ζ`.
    pub fn conditional_quantile(&self, zeta: f64) -> Result<f64> {
        if !(zeta > 0.0 && zeta < 1.0) {
            return Err(Error::Domain("exceedance probability must lie in (0, 1)"));
        }
        Ok(match self.generator {
            Generator::Normal => libm::sqrt(-2.0 * libm::log(zeta)),
            Generator::StudentT { nu } => libm::sqrt(nu * libm::expm1(-2.0 / nu * libm::log(zeta))),
        })
    }

    /// The copula and margin pair that reproduces this law.
    pub fn as_copula_margin(&self) -> Result<(CopulaModel, Margin)> {
        Ok(match self.generator {
            Generator::Normal => (CopulaModel::new(Family::Gaussian { rho: self.rho })?, Margin::Normal),
            Generator::StudentT { nu } => {
                (CopulaModel::new(Family::StudentT { rho: self.rho, nu })?, Margin::student_t(nu)?)
            }
        })
    }
}

/// Euclidean-angle polar map check used by the elliptical helpers.
pub fn is_standard_polar(map: &PolarMap) -> bool {
    map.radial.is_l2() && map.angular.scale == AngleScale::Radians
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{AngularSystem, StarBoundary};

    fn indep_laplace() -> ArDensityEngine {
        ArDensityEngine::new(CopulaModel::independence(2).unwrap(), Margin::laplace(), PolarMap::l1(2), None).unwrap()
    }

    #[test]
    fn independence_laplace_examples() {
        let e = indep_laplace();
        let v = e.joint_polar_density(1.0, 0.3);
        assert!((v - libm::exp(-1.0) / 4.0).abs() < 1e-16);
        assert_eq!(e.joint_polar_density(0.0, 0.3), 0.0);
        for &q in &[-1.7, -0.5, 0.0, 0.5, 1.0, 2.0] {
            let f = e.angular_density(q).value().unwrap();
            assert!((f - 0.25).abs() < 1e-10, "q={q} f={f}");
        }
        assert_eq!(e.delta(3.0, &[0.5, 0.5]).value, 1.0);
        assert_eq!(e.conditional_survivor(0.0, 0.2).unwrap(), 1.0);
    }

    #[test]
    fn independence_laplace_three_dimensions() {
        let e = ArDensityEngine::new(CopulaModel::independence(3).unwrap(), Margin::laplace(), PolarMap::l1(3), None)
            .unwrap();
        let f = e.angular_density_vector(&[0.2, -0.5, 0.3]).unwrap().value().unwrap();
        assert!((f - 0.25).abs() < 1e-10, "{f}");
    }

    #[test]
    fn laplace_quantile() {
        // (1 + r) e^{-r} = 0.05
        let e = indep_laplace();
        let mu = e.conditional_quantile(0.05, 0.3).unwrap();
        assert!(((1.0 + mu) * libm::exp(-mu) - 0.05).abs() < 1e-12);
        assert!((mu - 4.7439).abs() < 1e-4);
    }

    #[test]
    fn elliptical_closed_forms() {
        let m = EllipticalModel::new(Generator::StudentT { nu: 2.0 }, 0.3).unwrap();
        assert!((m.conditional_survivor(1.0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.conditional_quantile(0.05).unwrap() - libm::sqrt(38.0)).abs() < 1e-12);
        let n = EllipticalModel::new(Generator::Normal, 0.7).unwrap();
        assert!((n.conditional_survivor(2.0) - libm::exp(-2.0)).abs() < 1e-15);
        assert!((n.conditional_quantile(libm::exp(-2.0)).unwrap() - 2.0).abs() < 1e-14);
        let t = core::f64::consts::FRAC_PI_4;
        assert!((n.angular_density(t) - libm::sqrt(0.51) / (0.6 * PI)).abs() < 1e-15);
    }

    #[test]
    fn engine_matches_bivariate_normal() {
        let rho = 0.7;
        let n = EllipticalModel::new(Generator::Normal, rho).unwrap();
        let (c, m) = n.as_copula_margin().unwrap();
        let map = PolarMap::new(StarBoundary::l2(2), AngularSystem::euclidean()).unwrap();
        let e = ArDensityEngine::new(c, m, map, None).unwrap();
        for &th in &[-2.5, -0.4, 0.3, 1.2, 3.0] {
            let f = e.angular_density(th).value().unwrap();
            assert!((f - n.angular_density(th)).abs() < 1e-9, "θ={th}");
            let r = 1.3;
            let a = e.joint_polar_density(r, th);
            let b = n.polar_density(RadiusGauge::L2, r, th);
            assert!((a - b).abs() < 1e-12 * b.max(1.0));
        }
    }
}
