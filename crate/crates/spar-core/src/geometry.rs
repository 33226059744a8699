//! Gauge functions of star-shaped boundaries, pseudo-angles, pseudo-trigonometric
//! functions and generalized polar maps.
//!
//! A star boundary `S` is described by its gauge `R(x)`, the factor that scales
//! `x` onto `S`. In two dimensions the pseudo-angle of a point is its
//! anticlockwise arc-length position on `S`, measured from the positive
//! x-axis and normalized so that one loop spans 4 units. Scalar angles are
//! reported on the branch `(-2, 2]`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, SQRT_2, TAU};

use crate::error::{Error, Result};
use crate::quad::{integrate, Tolerance};
use crate::roots::brent;

const ON_BOUNDARY_TOL: f64 = 1e-8;

fn arc_tol() -> Tolerance {
    Tolerance { abs: 1e-14, rel: 1e-14, max_intervals: 2000 }
}

/// Wraps a pseudo-angle onto `(-2, 2]`.
pub fn wrap_pseudo(q: f64) -> f64 {
    let r = q - 4.0 * libm::floor(q / 4.0);
    if r > 2.0 {
        r - 4.0
    } else {
        r
    }
}

/// Wraps a Euclidean angle onto `(-π, π]`.
pub fn wrap_radians(t: f64) -> f64 {
    let r = t - TAU * libm::floor(t / TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn norm2(a: [f64; 2]) -> f64 {
    libm::hypot(a[0], a[1])
}

/// Closed, star-shaped polygon with vertices listed anticlockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    /// Boundary path starting at the point on the positive x-axis and closing on it.
    pts: Vec<[f64; 2]>,
    /// Polar angle of each path point, unwrapped to `[0, 2π]`.
    ang: Vec<f64>,
    /// Cumulative arc length at each path point.
    cum: Vec<f64>,
}

impl Polygon {
    fn new(verts: &[[f64; 2]]) -> Result<Self> {
        let n = verts.len();
        if n < 3 {
            return Err(Error::Parameter("tabulated boundary needs at least three vertices"));
        }
        let mut total = 0.0;
        for i in 0..n {
            let a = verts[i];
            let b = verts[(i + 1) % n];
            if a == [0.0, 0.0] {
                return Err(Error::Parameter("tabulated boundary passes through the origin"));
            }
            let d = wrap_radians(libm::atan2(b[1], b[0]) - libm::atan2(a[1], a[0]));
            if d <= 0.0 {
                return Err(Error::Parameter("tabulated boundary is not star-shaped about the origin"));
            }
            total += d;
        }
        if (total - TAU).abs() > 1e-9 {
            return Err(Error::Parameter("tabulated boundary does not wind once around the origin"));
        }
        // locate the edge crossing the positive x-axis
        let mut start = None;
        for i in 0..n {
            let a = verts[i];
            let b = verts[(i + 1) % n];
            let ta = libm::atan2(a[1], a[0]);
            let d = wrap_radians(libm::atan2(b[1], b[0]) - ta);
            let ta0 = if ta < 0.0 { ta + TAU } else { ta };
            // edge angular span [ta0, ta0+d) contains 0 (mod 2π)?
            if ta0 == 0.0 || ta0 + d > TAU {
                let e = [b[0] - a[0], b[1] - a[1]];
                let s = cross(a, e) / cross([1.0, 0.0], e);
                start = Some((i, [s, 0.0]));
                break;
            }
        }
        let (i0, p0) = start.ok_or(Error::Parameter("tabulated boundary misses the positive x-axis"))?;
        let mut pts = Vec::with_capacity(n + 2);
        pts.push(p0);
        for k in 1..=n {
            let v = verts[(i0 + k) % n];
            if v != *pts.last().unwrap() {
                pts.push(v);
            }
        }
        if *pts.last().unwrap() != p0 {
            pts.push(p0);
        }
        let mut ang = Vec::with_capacity(pts.len());
        let mut cum = Vec::with_capacity(pts.len());
        let mut acc = 0.0;
        let mut last_ang = 0.0;
        for (k, p) in pts.iter().enumerate() {
            if k > 0 {
                acc += norm2([p[0] - pts[k - 1][0], p[1] - pts[k - 1][1]]);
                let mut t = libm::atan2(p[1], p[0]);
                if t < 0.0 {
                    t += TAU;
                }
                if k == pts.len() - 1 || t < last_ang {
                    t = if k == pts.len() - 1 { TAU } else { t + TAU };
                }
                last_ang = t;
            }
            ang.push(last_ang);
            cum.push(acc);
        }
        Ok(Polygon { pts, ang, cum })
    }

    fn segment_for_angle(&self, phi: f64) -> usize {
        let k = self.ang.partition_point(|&a| a <= phi);
        k.saturating_sub(1).min(self.pts.len() - 2)
    }

    fn gauge(&self, x: [f64; 2]) -> f64 {
        let mut phi = libm::atan2(x[1], x[0]);
        if phi < 0.0 {
            phi += TAU;
        }
        let k = self.segment_for_angle(phi);
        let a = self.pts[k];
        let b = self.pts[k + 1];
        let e = [b[0] - a[0], b[1] - a[1]];
        cross(x, e) / cross(a, e)
    }

    fn arc_position(&self, w: [f64; 2]) -> f64 {
        let mut phi = libm::atan2(w[1], w[0]);
        if phi < 0.0 {
            phi += TAU;
        }
        let k = self.segment_for_angle(phi);
        let a = self.pts[k];
        self.cum[k] + norm2([w[0] - a[0], w[1] - a[1]])
    }

    fn circumference(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    fn point_at(&self, s: f64) -> ([f64; 2], [f64; 2]) {
        let k = self.cum.partition_point(|&c| c <= s).saturating_sub(1).min(self.pts.len() - 2);
        let a = self.pts[k];
        let b = self.pts[k + 1];
        let len = self.cum[k + 1] - self.cum[k];
        let t = (s - self.cum[k]) / len;
        let dir = [(b[0] - a[0]) / len, (b[1] - a[1]) / len];
        ([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])], dir)
    }
}

/// Shape of a star boundary.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryKind {
    /// Unit sphere of the `L^p` gauge; `p = f64::INFINITY` gives the max norm.
    Lp(f64),
    /// Ellipse `x² + y² - 2ρxy = 1 - ρ²` (two dimensions only).
    Elliptical(f64),
    /// Piecewise-linear boundary through tabulated points (two dimensions only).
    Tabulated(Polygon),
}

/// An immutable star-shaped boundary together with its gauge function.
#[derive(Debug, Clone, PartialEq)]
pub struct StarBoundary {
    kind: BoundaryKind,
    dim: usize,
    /// Arc length from `(1, 0)` to the diagonal for `L^p` boundaries.
    octant: f64,
    circumference: f64,
}

impl StarBoundary {
    pub fn lp(p: f64, dim: usize) -> Result<Self> {
        if !(p > 0.0) {
            return Err(Error::Parameter("L^p gauge needs p > 0"));
        }
        if dim < 2 {
            return Err(Error::Parameter("dimension must be at least 2"));
        }
        let octant = lp_octant_full(p);
        Ok(StarBoundary {
            kind: BoundaryKind::Lp(p),
            dim,
            octant,
            circumference: if dim == 2 { 8.0 * octant } else { f64::NAN },
        })
    }

    pub fn l1(dim: usize) -> Self {
        Self::lp(1.0, dim).expect("valid")
    }

    pub fn l2(dim: usize) -> Self {
        Self::lp(2.0, dim).expect("valid")
    }

    pub fn linf(dim: usize) -> Self {
        Self::lp(f64::INFINITY, dim).expect("valid")
    }

    pub fn elliptical(rho: f64) -> Result<Self> {
        if !(rho > -1.0 && rho < 1.0) {
            return Err(Error::Parameter("elliptical gauge needs rho in (-1, 1)"));
        }
        let speed = |t: f64| elliptic_speed(rho, t);
        let c = integrate(speed, 0.0, TAU, arc_tol()).value;
        Ok(StarBoundary { kind: BoundaryKind::Elliptical(rho), dim: 2, octant: f64::NAN, circumference: c })
    }

    pub fn tabulated(points: &[[f64; 2]]) -> Result<Self> {
        let poly = Polygon::new(points)?;
        let c = poly.circumference();
        Ok(StarBoundary { kind: BoundaryKind::Tabulated(poly), dim: 2, octant: f64::NAN, circumference: c })
    }

    pub fn kind(&self) -> &BoundaryKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Some(p)` for `L^p` boundaries.
    pub fn lp_exponent(&self) -> Option<f64> {
        match self.kind {
            BoundaryKind::Lp(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_l1(&self) -> bool {
        self.lp_exponent() == Some(1.0)
    }

    pub fn is_l2(&self) -> bool {
        self.lp_exponent() == Some(2.0)
    }

    /// Length of the full boundary loop (two dimensions).
    pub fn circumference(&self) -> f64 {
        self.circumference
    }

    /// Gauge `R(x)`; positive and homogeneous of order one.
    pub fn gauge(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::Domain("vector dimension does not match the boundary"));
        }
        if x.iter().all(|&v| v == 0.0) {
            return Err(Error::Domain("gauge of the zero vector"));
        }
        Ok(match &self.kind {
            BoundaryKind::Lp(p) => lp_norm(*p, x),
            BoundaryKind::Elliptical(rho) => elliptic_gauge(*rho, [x[0], x[1]]),
            BoundaryKind::Tabulated(poly) => poly.gauge([x[0], x[1]]),
        })
    }

    pub(crate) fn gauge2(&self, x: [f64; 2]) -> f64 {
        match &self.kind {
            BoundaryKind::Lp(p) => lp_norm(*p, &x),
            BoundaryKind::Elliptical(rho) => elliptic_gauge(*rho, x),
            BoundaryKind::Tabulated(poly) => poly.gauge(x),
        }
    }

    fn require_2d(&self) -> Result<()> {
        if self.dim == 2 {
            Ok(())
        } else {
            Err(Error::Domain("operation defined for two-dimensional boundaries only"))
        }
    }

    /// Arc length from the positive-x boundary point anticlockwise to `w`, in `[0, C)`.
    fn arc_position(&self, w: [f64; 2]) -> f64 {
        match &self.kind {
            BoundaryKind::Lp(p) => {
                let (k, u, v) = quadrant_reduce(w);
                let c4 = 2.0 * self.octant;
                k as f64 * c4 + lp_first_quadrant_arc(*p, self.octant, u, v)
            }
            BoundaryKind::Elliptical(rho) => {
                let mut t = libm::atan2(w[1], w[0]);
                if t < 0.0 {
                    t += TAU;
                }
                elliptic_arc(*rho, t)
            }
            BoundaryKind::Tabulated(poly) => poly.arc_position(w),
        }
    }

    /// Anticlockwise boundary distance from `w_from` to `w_to`, in `[0, C)`.
    /// Identical points give 0; the full loop is [`StarBoundary::circumference`].
    pub fn arc_length(&self, w_from: [f64; 2], w_to: [f64; 2]) -> Result<f64> {
        self.require_2d()?;
        for w in [w_from, w_to] {
            if w == [0.0, 0.0] || (self.gauge2(w) - 1.0).abs() > ON_BOUNDARY_TOL {
                return Err(Error::Domain("point is not on the boundary"));
            }
        }
        let c = self.circumference;
        let d = self.arc_position(w_to) - self.arc_position(w_from);
        Ok(if d < 0.0 { d + c } else { d })
    }

    /// Pseudo-angle of `x` on the branch `(-2, 2]`.
    pub fn pseudo_angle(&self, x: [f64; 2]) -> Result<f64> {
        self.require_2d()?;
        if x == [0.0, 0.0] {
            return Err(Error::Domain("pseudo-angle of the zero vector"));
        }
        Ok(self.pseudo_angle_unchecked(x))
    }

    pub(crate) fn pseudo_angle_unchecked(&self, x: [f64; 2]) -> f64 {
        match self.kind {
            BoundaryKind::Lp(p) if p == 1.0 => {
                let n = x[0].abs() + x[1].abs();
                let (u, v) = (x[0] / n, x[1] / n);
                let eps = if v >= 0.0 { 1.0 } else { -1.0 };
                wrap_pseudo(eps * (1.0 - u))
            }
            BoundaryKind::Lp(p) if p == 2.0 => wrap_pseudo(libm::atan2(x[1], x[0]) / FRAC_PI_2),
            _ => {
                let r = self.gauge2(x);
                let s = self.arc_position([x[0] / r, x[1] / r]);
                wrap_pseudo(4.0 * s / self.circumference)
            }
        }
    }

    /// Boundary point `(cos_*(q), sin_*(q))`; `q` is reduced modulo 4.
    pub fn pseudo_trig(&self, q: f64) -> (f64, f64) {
        let p = self.point_and_tangent(q).0;
        (p[0], p[1])
    }

    /// Boundary point at pseudo-angle `q` and the unit tangent there.
    fn point_and_tangent(&self, q: f64) -> ([f64; 2], [f64; 2]) {
        match &self.kind {
            BoundaryKind::Lp(p) if *p == 1.0 => {
                let q1 = wrap_pseudo(q);
                let c = 1.0 - q1.abs();
                let s = 1.0 - wrap_pseudo(q1 - 1.0).abs();
                let (dc, ds) = (-sgn_right(q1), -sgn_right(wrap_pseudo(q1 - 1.0)));
                let n = libm::hypot(dc, ds);
                ([c, s], [dc / n, ds / n])
            }
            BoundaryKind::Lp(p) if *p == 2.0 => {
                let t = FRAC_PI_2 * q;
                let (s, c) = (libm::sin(t), libm::cos(t));
                ([c, s], [-s, c])
            }
            BoundaryKind::Lp(p) => {
                let r = q - 4.0 * libm::floor(q / 4.0);
                let mut k = libm::floor(r) as i32;
                let mut f = r - k as f64;
                if k >= 4 {
                    k = 0;
                    f = 0.0;
                }
                let (pt, tg) = lp_first_quadrant_point(*p, self.octant, f);
                let (mut pt, mut tg) = (pt, tg);
                for _ in 0..k {
                    pt = [-pt[1], pt[0]];
                    tg = [-tg[1], tg[0]];
                }
                (pt, tg)
            }
            BoundaryKind::Elliptical(rho) => {
                let r = q - 4.0 * libm::floor(q / 4.0);
                let target = r / 4.0 * self.circumference;
                let t = elliptic_arc_inverse(*rho, target, self.circumference);
                let a = elliptic_radius(*rho, t);
                let (s, c) = (libm::sin(t), libm::cos(t));
                let da = a * rho * libm::cos(2.0 * t) / (1.0 - rho * libm::sin(2.0 * t));
                let d = [da * c - a * s, da * s + a * c];
                let n = norm2(d);
                ([a * c, a * s], [d[0] / n, d[1] / n])
            }
            BoundaryKind::Tabulated(poly) => {
                let r = q - 4.0 * libm::floor(q / 4.0);
                poly.point_at(r / 4.0 * self.circumference)
            }
        }
    }

    /// `|cos_*(q) sin_*'(q) - cos_*'(q) sin_*(q)|`, the polar Jacobian of the pseudo-angle.
    pub fn angle_jacobian(&self, q: f64) -> f64 {
        match self.kind {
            BoundaryKind::Lp(p) => lp_jacobian(p, q),
            _ => {
                let (w, t) = self.point_and_tangent(q);
                0.25 * self.circumference * cross(w, t).abs()
            }
        }
    }
}

/// Direction of increase of `1 - |x|` at `x`, with the right-derivative at 0.
fn sgn_right(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// `(Σ|x_j|^p)^{1/p}`, or `max|x_j|` for `p = ∞`, scaled to avoid overflow.
pub fn lp_norm(p: f64, x: &[f64]) -> f64 {
    let m = x.iter().fold(0.0_f64, |a, &v| a.max(v.abs()));
    if p == f64::INFINITY || m == 0.0 {
        return m;
    }
    if p == 1.0 {
        return x.iter().map(|v| v.abs()).sum();
    }
    if p == 2.0 && x.len() == 2 {
        return libm::hypot(x[0], x[1]);
    }
    let s: f64 = x.iter().map(|v| libm::pow(v.abs() / m, p)).sum();
    m * libm::pow(s, 1.0 / p)
}

fn elliptic_gauge(rho: f64, x: [f64; 2]) -> f64 {
    libm::sqrt((x[0] * x[0] + x[1] * x[1] - 2.0 * rho * x[0] * x[1]) / (1.0 - rho * rho))
}

/// Boundary radius of the ellipse along Euclidean angle `t`.
fn elliptic_radius(rho: f64, t: f64) -> f64 {
    libm::sqrt((1.0 - rho * rho) / (1.0 - rho * libm::sin(2.0 * t)))
}

fn elliptic_speed(rho: f64, t: f64) -> f64 {
    let a = elliptic_radius(rho, t);
    let da = a * rho * libm::cos(2.0 * t) / (1.0 - rho * libm::sin(2.0 * t));
    libm::hypot(a, da)
}

fn elliptic_arc(rho: f64, t: f64) -> f64 {
    integrate(|s| elliptic_speed(rho, s), 0.0, t, arc_tol()).value
}

fn elliptic_arc_inverse(rho: f64, target: f64, circ: f64) -> f64 {
    if target <= 0.0 {
        return 0.0;
    }
    if target >= circ {
        return TAU;
    }
    brent(|t| elliptic_arc(rho, t) - target, 0.0, TAU, 1e-13).unwrap_or(0.0)
}

/// Rotates `w` into the closed first quadrant; returns the number of quarter turns removed.
fn quadrant_reduce(w: [f64; 2]) -> (u8, f64, f64) {
    let (x, y) = (w[0], w[1]);
    if x > 0.0 && y >= 0.0 {
        (0, x, y)
    } else if x <= 0.0 && y > 0.0 {
        (1, y, -x)
    } else if x < 0.0 && y <= 0.0 {
        (2, -x, -y)
    } else {
        (3, -y, x)
    }
}

/// Slope magnitude `(t^p / (1 - t^p))^{1 - 1/p}` of the `L^p` boundary.
fn lp_slope(p: f64, t: f64) -> f64 {
    let tp = libm::pow(t, p);
    libm::pow(tp / (1.0 - tp), 1.0 - 1.0 / p)
}

fn lp_speed(p: f64, t: f64) -> f64 {
    libm::hypot(1.0, lp_slope(p, t))
}

/// Arc from `(1, 0)` to the point of the octant `0 <= v <= u` identified by its coordinates.
///
/// For `p >= 1` the boundary is a graph over `v` with bounded slope in this
/// octant; for `p < 1` the slope in `v` is unbounded at the axis, so the
/// integral runs over `u` instead.
fn lp_octant_arc(p: f64, u: f64, v: f64) -> f64 {
    if p == 1.0 {
        return SQRT_2 * v;
    }
    if p == 2.0 {
        return libm::atan2(v, u);
    }
    if p == f64::INFINITY {
        return v;
    }
    if p >= 1.0 {
        integrate(|t| lp_speed(p, t), 0.0, v, arc_tol()).value
    } else {
        integrate(|s| lp_speed(p, s), u, 1.0, arc_tol()).value
    }
}

fn lp_octant_full(p: f64) -> f64 {
    if p == f64::INFINITY {
        return 1.0;
    }
    let d = libm::pow(0.5, 1.0 / p);
    lp_octant_arc(p, d, d)
}

fn lp_first_quadrant_arc(p: f64, octant: f64, u: f64, v: f64) -> f64 {
    if v <= u {
        lp_octant_arc(p, u, v)
    } else {
        2.0 * octant - lp_octant_arc(p, v, u)
    }
}

/// Point of the octant `0 <= v <= u` at arc length `a` from `(1, 0)`, with unit tangent.
fn lp_octant_point(p: f64, octant: f64, a: f64) -> ([f64; 2], [f64; 2]) {
    if p == 1.0 {
        let v = a / SQRT_2;
        return ([1.0 - v, v], [-core::f64::consts::FRAC_1_SQRT_2, core::f64::consts::FRAC_1_SQRT_2]);
    }
    if p == 2.0 {
        return ([libm::cos(a), libm::sin(a)], [-libm::sin(a), libm::cos(a)]);
    }
    if p == f64::INFINITY {
        return ([1.0, a], [0.0, 1.0]);
    }
    let d = libm::pow(0.5, 1.0 / p);
    let a = a.clamp(0.0, octant);
    let (u, v) = if p >= 1.0 {
        // arc is ∫_0^v speed; invert for v by incremental Newton with bisection safeguard
        let v = invert_monotone(|t| lp_speed(p, t), 0.0, d, a, true);
        (libm::pow(1.0 - libm::pow(v, p), 1.0 / p), v)
    } else {
        let u = invert_monotone(|s| lp_speed(p, s), d, 1.0, a, false);
        (u, libm::pow(1.0 - libm::pow(u, p), 1.0 / p))
    };
    // tangent is perpendicular to the gauge gradient (u^{p-1}, v^{p-1})
    let g = [libm::pow(u, p - 1.0), libm::pow(v, p - 1.0)];
    let n = norm2(g);
    let t = if n.is_finite() && n > 0.0 { [-g[1] / n, g[0] / n] } else { [0.0, 1.0] };
    ([u, v], t)
}

/// Solves `∫ speed = a` where the integral runs from `lo` upward (`forward`)
/// or from `hi` downward.
fn invert_monotone<S: Fn(f64) -> f64>(speed: S, lo: f64, hi: f64, a: f64, forward: bool) -> f64 {
    let tol = arc_tol();
    let (mut blo, mut bhi) = (lo, hi);
    let mut x = if forward { lo + (hi - lo) * 0.5 } else { hi - (hi - lo) * 0.5 };
    let mut s = if forward { integrate(&speed, lo, x, tol).value } else { integrate(&speed, x, hi, tol).value };
    for _ in 0..100 {
        let g = s - a;
        // in the forward case s increases with x; in the backward case it decreases
        let increasing = forward;
        if (g > 0.0) == increasing {
            bhi = x;
        } else {
            blo = x;
        }
        let deriv = if increasing { speed(x) } else { -speed(x) };
        let mut next = x - g / deriv;
        if !(next > blo && next < bhi) || !next.is_finite() {
            next = 0.5 * (blo + bhi);
        }
        if (next - x).abs() <= 1e-15 * x.abs().max(1e-300) || bhi - blo <= 1e-15 {
            return next;
        }
        let inc = integrate(&speed, x.min(next), x.max(next), tol).value;
        let grows = next > x;
        s += if grows == forward { inc } else { -inc };
        x = next;
    }
    x
}

fn lp_first_quadrant_point(p: f64, octant: f64, f: f64) -> ([f64; 2], [f64; 2]) {
    if f <= 0.5 {
        lp_octant_point(p, octant, f * 2.0 * octant)
    } else {
        let (pt, t) = lp_octant_point(p, octant, (1.0 - f) * 2.0 * octant);
        ([pt[1], pt[0]], [-t[1], -t[0]])
    }
}

/// Polar Jacobian `J_p(q) = (C_p/4) (|cos_p|^{2(p-1)} + |sin_p|^{2(p-1)})^{-1/2}`.
///
/// `p = 1, 2, ∞` return the exact constants `1, π/2, 2`.
pub fn lp_jacobian(p: f64, q: f64) -> f64 {
    if p == 1.0 {
        return 1.0;
    }
    if p == 2.0 {
        return FRAC_PI_2;
    }
    if p == f64::INFINITY {
        return 2.0;
    }
    let b = StarBoundary::lp(p, 2).expect("positive p");
    let (c, s) = b.pseudo_trig(q);
    let e = 2.0 * (p - 1.0);
    0.25 * b.circumference * libm::pow(libm::pow(c.abs(), e) + libm::pow(s.abs(), e), -0.5)
}

// ---------------------------------------------------------------------------
// Polar maps

/// Unit of the scalar angle in two dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleScale {
    /// Pseudo-angle on `(-2, 2]`.
    Pseudo,
    /// Euclidean angle in radians on `(-π, π]`, available for the `L²` boundary.
    Radians,
}

/// An angular boundary together with the unit of its scalar angle.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularSystem {
    pub boundary: StarBoundary,
    pub scale: AngleScale,
}

impl AngularSystem {
    pub fn pseudo(boundary: StarBoundary) -> Self {
        AngularSystem { boundary, scale: AngleScale::Pseudo }
    }

    /// Euclidean angle in radians on the unit circle.
    pub fn euclidean() -> Self {
        AngularSystem { boundary: StarBoundary::l2(2), scale: AngleScale::Radians }
    }

    pub fn new(boundary: StarBoundary, scale: AngleScale) -> Result<Self> {
        if scale == AngleScale::Radians && !(boundary.is_l2() && boundary.dim() == 2) {
            return Err(Error::Parameter("radian angles require the two-dimensional L2 boundary"));
        }
        Ok(AngularSystem { boundary, scale })
    }

    /// Length of one full turn in this angle's units.
    pub fn period(&self) -> f64 {
        match self.scale {
            AngleScale::Pseudo => 4.0,
            AngleScale::Radians => TAU,
        }
    }

    pub fn wrap(&self, a: f64) -> f64 {
        match self.scale {
            AngleScale::Pseudo => wrap_pseudo(a),
            AngleScale::Radians => wrap_radians(a),
        }
    }

    pub fn angle_of(&self, x: [f64; 2]) -> f64 {
        match self.scale {
            AngleScale::Pseudo => self.boundary.pseudo_angle_unchecked(x),
            AngleScale::Radians => {
                let t = libm::atan2(x[1], x[0]);
                if t <= -PI {
                    PI
                } else {
                    t
                }
            }
        }
    }

    pub fn point(&self, a: f64) -> [f64; 2] {
        match self.scale {
            AngleScale::Pseudo => {
                let (c, s) = self.boundary.pseudo_trig(a);
                [c, s]
            }
            AngleScale::Radians => [libm::cos(a), libm::sin(a)],
        }
    }

    /// `|cos sin' - cos' sin|` with derivatives taken in this angle's units.
    pub fn jacobian(&self, a: f64) -> f64 {
        match self.scale {
            AngleScale::Pseudo => self.boundary.angle_jacobian(a),
            AngleScale::Radians => 1.0,
        }
    }
}

/// Result of [`PolarMap::to_polar`].
#[derive(Debug, Clone, PartialEq)]
pub struct Polar {
    pub r: f64,
    /// Vector angle `x / R_ang(x)`.
    pub w: Vec<f64>,
    /// Scalar angle (two dimensions only).
    pub angle: Option<f64>,
}

/// Polar map with independent radial and angular gauges.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarMap {
    pub radial: StarBoundary,
    pub angular: AngularSystem,
}

impl PolarMap {
    pub fn new(radial: StarBoundary, angular: AngularSystem) -> Result<Self> {
        if radial.dim() != angular.boundary.dim() {
            return Err(Error::Parameter("radial and angular gauges differ in dimension"));
        }
        Ok(PolarMap { radial, angular })
    }

    /// L¹ radius with L¹ pseudo-angle in dimension `d`.
    pub fn l1(d: usize) -> Self {
        PolarMap { radial: StarBoundary::l1(d), angular: AngularSystem::pseudo(StarBoundary::l1(d)) }
    }

    /// Euclidean radius and angle in radians.
    pub fn standard() -> Self {
        PolarMap { radial: StarBoundary::l2(2), angular: AngularSystem::euclidean() }
    }

    pub fn dim(&self) -> usize {
        self.radial.dim()
    }

    pub fn to_polar(&self, x: &[f64]) -> Result<Polar> {
        let r = self.radial.gauge(x)?;
        let ra = self.angular.boundary.gauge(x)?;
        let w = x.iter().map(|v| v / ra).collect();
        let angle = if self.dim() == 2 { Some(self.angular.angle_of([x[0], x[1]])) } else { None };
        Ok(Polar { r, w, angle })
    }

    /// Inverse map from a scalar angle (two dimensions).
    pub fn from_polar(&self, r: f64, angle: f64) -> [f64; 2] {
        let w = self.angular.point(angle);
        let s = r / self.radial.gauge2(w);
        [s * w[0], s * w[1]]
    }

    /// Inverse map from a vector angle on the angular boundary.
    pub fn from_polar_vector(&self, r: f64, w: &[f64]) -> Result<Vec<f64>> {
        let s = r / self.radial.gauge(w)?;
        Ok(w.iter().map(|v| s * v).collect())
    }
}

/// Re-expresses a polar density in a different radial gauge at the same angle.
///
/// `f_a(r, angle)` is the density with radius measured by `gauge_a`; the
/// returned value is the density at radius `r_b` measured by `gauge_b`.
pub fn change_radius_density<F: Fn(f64, f64) -> f64>(
    f_a: F,
    gauge_a: &StarBoundary,
    gauge_b: &StarBoundary,
    angular: &AngularSystem,
    r_b: f64,
    angle: f64,
) -> f64 {
    let w = angular.point(angle);
    let ratio = gauge_a.gauge2(w) / gauge_b.gauge2(w);
    ratio * f_a(r_b * ratio, angle)
}

/// Maps an angle measured in `from` to the angle of the same ray in `to`,
/// returning `(angle_to, d angle_to / d angle_from)`.
///
/// Angular densities then satisfy `f_from(a) = J · f_to(angle_to)`.
pub fn change_angle(a: f64, from: &AngularSystem, to: &AngularSystem) -> (f64, f64) {
    let from_l1 = from.boundary.is_l1() && from.scale == AngleScale::Pseudo;
    let to_l1 = to.boundary.is_l1() && to.scale == AngleScale::Pseudo;
    let from_l2 = from.boundary.is_l2();
    let to_l2 = to.boundary.is_l2();
    if from_l2 && to_l1 {
        // q_{1,2}: circle to diamond
        let theta = match from.scale {
            AngleScale::Pseudo => FRAC_PI_2 * a,
            AngleScale::Radians => a,
        };
        let (c, s) = (libm::cos(theta), libm::sin(theta));
        let n1 = c.abs() + s.abs();
        let eps = if s >= 0.0 { 1.0 } else { -1.0 };
        let q = wrap_pseudo(eps * (1.0 - c / n1));
        let unit = if from.scale == AngleScale::Pseudo { FRAC_PI_2 } else { 1.0 };
        return (q, unit / (n1 * n1));
    }
    if from_l1 && to_l2 {
        // q_{2,1}: diamond to circle
        let (c, s) = from.boundary.pseudo_trig(a);
        let theta = libm::atan2(s, c);
        let n2sq = c * c + s * s;
        return match to.scale {
            AngleScale::Pseudo => (wrap_pseudo(theta / FRAC_PI_2), 1.0 / (FRAC_PI_2 * n2sq)),
            AngleScale::Radians => (to.wrap(theta), 1.0 / n2sq),
        };
    }
    // General systems: the Euclidean sector area element is J|w|^{-2} per unit angle.
    let wa = from.point(a);
    let b = to.angle_of(wa);
    let wb = to.point(b);
    let na = wa[0] * wa[0] + wa[1] * wa[1];
    let nb = wb[0] * wb[0] + wb[1] * wb[1];
    (b, from.jacobian(a) / to.jacobian(b) * nb / na)
}
