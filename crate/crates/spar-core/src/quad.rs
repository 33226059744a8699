//! Adaptive Gauss–Kronrod quadrature and geometric range extension.

use alloc::vec::Vec;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One 15-point Kronrod rule with its embedded 7-point Gauss estimate.
/// Returns `(kronrod, |kronrod - gauss|)`.
pub fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-14, rel: 1e-11, max_intervals: 400 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

/// Globally adaptive bisection of the interval with the largest error estimate.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Integral {
    if a == b {
        return Integral { value: 0.0, error: 0.0, converged: true };
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut parts: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(64);
    parts.push((a, b, v, e));
    let mut total = v;
    let mut err = e;
    while err > tol.abs.max(tol.rel * total.abs()) {
        if parts.len() >= tol.max_intervals {
            return Integral { value: total, error: err, converged: false };
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .fold((0usize, -1.0_f64), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (lo, hi, pv, pe) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            // interval exhausted at machine resolution
            parts.push((lo, hi, pv, 0.0));
            err -= pe;
            continue;
        }
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
        total += v1 + v2 - pv;
        err += e1 + e2 - pe;
        if err < 0.0 {
            err = parts.iter().map(|p| p.3).sum();
        }
    }
    // re-sum to shed accumulated rounding from the running updates
    let value = parts.iter().map(|p| p.2).sum();
    Integral { value, error: err, converged: true }
}

/// Outcome of integrating towards a possibly singular or infinite endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extension {
    Converged { value: f64 },
    Divergent { partial: f64 },
}

/// Sums pieces `piece(k)` for `k = 0, 1, ...` that partition a range whose far
/// end is approached geometrically (doubling towards infinity, or halving the
/// distance to a singular endpoint).
///
/// Stops when the pieces become negligible; adds a geometric tail once
/// consecutive ratios stabilise below one; declares divergence when the
/// pieces stop shrinking for several consecutive steps.
pub fn geometric_sum<P: FnMut(usize) -> f64>(mut piece: P, rel_tol: f64, max_pieces: usize) -> Extension {
    let mut sum = 0.0;
    let mut hist: Vec<f64> = Vec::with_capacity(max_pieces);
    let mut flat_run = 0usize;
    for k in 0..max_pieces {
        let p = piece(k);
        sum += p;
        hist.push(p);
        let scale = sum.abs();
        if k >= 2 && hist[k].abs() <= rel_tol * scale && hist[k - 1].abs() <= rel_tol * scale {
            return Extension::Converged { value: sum };
        }
        if k >= 4 {
            let r0 = ratio(hist[k], hist[k - 1]);
            let r1 = ratio(hist[k - 1], hist[k - 2]);
            let r2 = ratio(hist[k - 2], hist[k - 3]);
            if r0 >= 0.97 && r1 >= 0.97 && r2 >= 0.97 && hist[k].abs() > rel_tol * scale * 10.0 {
                flat_run += 1;
            } else {
                flat_run = 0;
            }
            if flat_run >= 4 && k >= 12 {
                return Extension::Divergent { partial: sum };
            }
            let stable = r0 < 0.97 && (r0 - r1).abs() < 1e-3 * (1.0 - r0) && (r1 - r2).abs() < 1e-2 * (1.0 - r1);
            if stable {
                let tail = hist[k] * r0 / (1.0 - r0);
                // extrapolation error is about 1e-3 of the tail under the stability test
                if tail.abs() * 1e-3 <= rel_tol * scale {
                    return Extension::Converged { value: sum + tail };
                }
            }
        }
    }
    let n = hist.len();
    if n >= 2 && ratio(hist[n - 1], hist[n - 2]) >= 0.97 && hist[n - 1].abs() > rel_tol * sum.abs() * 10.0 {
        Extension::Divergent { partial: sum }
    } else {
        Extension::Converged { value: sum }
    }
}

fn ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        if a == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (a / b).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_smooth() {
        let r = integrate(|x| x * x * x, 0.0, 2.0, Tolerance::default());
        assert!((r.value - 4.0).abs() < 1e-13);
        let r = integrate(libm::sin, 0.0, core::f64::consts::PI, Tolerance::default());
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn geometric_tail_power_law() {
        // ∫_1^∞ x^{-3/2} dx = 2 over doubling pieces
        let ext = geometric_sum(
            |k| {
                let a = libm::ldexp(1.0, k as i32);
                integrate(|x| x.powf(-1.5), a, 2.0 * a, Tolerance::default()).value
            },
            1e-10,
            200,
        );
        match ext {
            Extension::Converged { value } => assert!((value - 2.0).abs() < 1e-8, "{value}"),
            _ => panic!("should converge"),
        }
        // ∫_1^∞ dx/x diverges
        let ext = geometric_sum(
            |k| {
                let a = libm::ldexp(1.0, k as i32);
                integrate(|x| 1.0 / x, a, 2.0 * a, Tolerance::default()).value
            },
            1e-10,
            200,
        );
        assert!(matches!(ext, Extension::Divergent { .. }));
    }
}
