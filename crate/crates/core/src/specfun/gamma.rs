//! Gamma function family on the complex plane.
//!
//! For Re z >= 1/2: a Lanczos-type sum (r = 10.900511 coefficient set) for
//! |z| < 12 and Stirling's series beyond, which keeps the phase of Gamma
//! accurate at large |Im z|. Upward recurrence
//! covers the left half-plane, with reflection only far out to the left.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const GAMMA_R: f64 = 10.900511;

const GAMMA_DK: [f64; 11] = [
    2.48574089138753565546e-5,
    1.05142378581721974210,
    -3.45687097222016235469,
    4.51227709466894823700,
    -2.98285225323576655721,
    1.05639711577126713077,
    -1.95428773191645869583e-1,
    1.70970543404441224307e-2,
    -5.71926117404305781283e-4,
    4.63399473359905636708e-6,
    -2.71994908488607703910e-9,
];

const LN_TWO_SQRT_E_OVER_PI: f64 = 0.620_782_237_635_245_2;

/// Beyond this radius Stirling's series replaces the Lanczos sum, whose
/// phase loses digits as |Im z| grows.
const STIRLING_RADIUS: f64 = 12.0;

/// B_{2k} / (2k (2k - 1)) for k = 1..10.
const STIRLING_COEF: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;
const LN_PI: f64 = 1.144_729_885_849_400_2;
/// Below this real part the reflection formula replaces upward recurrence.
const RECURRENCE_MIN_RE: f64 = -200.0;

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.floor()
}

/// sin(pi x) with exact zeros at the integers.
pub(crate) fn sin_pi(x: f64) -> f64 {
    let n = x.round();
    let r = x - n;
    let s = (PI * r).sin();
    if (n as i64).rem_euclid(2) == 0 {
        s
    } else {
        -s
    }
}

/// cos(pi x) with exact zeros at the half-integers.
pub(crate) fn cos_pi(x: f64) -> f64 {
    sin_pi(x + 0.5)
}

/// Principal log of sin(pi z), stable for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    if y.abs() < 20.0 {
        let s = Complex64::new(sin_pi(x) * (PI * y).cosh(), cos_pi(x) * (PI * y).sinh());
        return s.ln();
    }
    // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z}) for y > 0; mirror for y < 0.
    let (zz, flip) = if y > 0.0 { (z, false) } else { (z.conj(), true) };
    let i = Complex64::i();
    let small = (2.0 * i * PI * zz).exp();
    let mut v = Complex64::new(-std::f64::consts::LN_2, 0.5 * PI) - i * PI * zz + (-small).ln_1p();
    // Reduce the imaginary part into (-pi, pi].
    let k = ((v.im + PI) / (2.0 * PI)).floor();
    v.im -= 2.0 * PI * k;
    if v.im <= -PI {
        v.im += 2.0 * PI;
    }
    if flip {
        v.conj()
    } else {
        v
    }
}

trait Ln1p {
    fn ln_1p(self) -> Self;
}

impl Ln1p for Complex64 {
    fn ln_1p(self) -> Complex64 {
        if self.norm() < 1e-8 {
            self - self * self * 0.5
        } else {
            (Complex64::new(1.0, 0.0) + self).ln()
        }
    }
}

fn lanczos_ln_gamma(z: Complex64) -> Complex64 {
    let mut s = Complex64::new(GAMMA_DK[0], 0.0);
    for (k, &d) in GAMMA_DK.iter().enumerate().skip(1) {
        s += d / (z + (k as f64 - 1.0));
    }
    let zh = z - 0.5;
    let mut v = LN_TWO_SQRT_E_OVER_PI + s.ln() + zh * ((zh + GAMMA_R).ln() - 1.0);
    // ln S wraps around; Stirling's leading terms fix the branch to well within pi.
    let stirling = zh * z.ln() - z + HALF_LN_TWO_PI + 1.0 / (12.0 * z);
    let k = ((stirling.im - v.im) / (2.0 * PI)).round();
    v.im += 2.0 * PI * k;
    v
}

/// ln Gamma(z) for Re z >= 1/2.
fn right_ln_gamma(z: Complex64) -> Complex64 {
    if z.norm() < STIRLING_RADIUS {
        return lanczos_ln_gamma(z);
    }
    let r = z.inv();
    let r2 = r * r;
    let mut tail = Complex64::new(0.0, 0.0);
    for &c in STIRLING_COEF.iter().rev() {
        tail = tail * r2 + c;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_TWO_PI + tail * r
}

/// Principal branch of ln Gamma(z), continuous off the negative real axis.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(Error::PoleOfGamma(z.re));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidArgument(format!("log_gamma of non-finite {z}")));
    }
    Ok(log_gamma_unchecked(z))
}

fn log_gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re >= 0.5 {
        return right_ln_gamma(z);
    }
    if z.re >= RECURRENCE_MIN_RE {
        // Shift into the right half-plane; the summed principal logs keep
        // the result on the principal branch.
        let m = (0.5 - z.re).ceil() as usize;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..m {
            acc += (z + k as f64).ln();
        }
        return right_ln_gamma(z + m as f64) - acc;
    }
    let sign = if z.im.is_sign_negative() { -1.0 } else { 1.0 };
    let branch = sign * 2.0 * PI * (0.5 * z.re + 0.25).floor();
    Complex64::new(LN_PI, branch) - ln_sin_pi(z) - right_ln_gamma(Complex64::new(1.0, 0.0) - z)
}

/// Gamma(z) for complex z.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    Ok(log_gamma(z)?.exp())
}

/// 1 / Gamma(z), entire: zero at the poles of Gamma.
pub fn rgamma(z: Complex64) -> Complex64 {
    if is_nonpositive_integer(z) {
        return Complex64::new(0.0, 0.0);
    }
    (-log_gamma_unchecked(z)).exp()
}

/// |Gamma(x + iy)|^2.
pub fn gamma_abs_sq(x: f64, y: f64) -> Result<f64> {
    let lg = log_gamma(Complex64::new(x, y))?;
    Ok((2.0 * lg.re).exp())
}

/// ln |Gamma(x)| for real x.
pub fn ln_gamma_abs(x: f64) -> Result<f64> {
    Ok(log_gamma(Complex64::new(x, 0.0))?.re)
}

/// Gamma(x) for real x, with sign.
pub fn gamma_real(x: f64) -> Result<f64> {
    if x <= 0.0 && x == x.floor() {
        return Err(Error::PoleOfGamma(x));
    }
    if x >= 0.5 {
        Ok(right_ln_gamma(Complex64::new(x, 0.0)).re.exp())
    } else {
        Ok(PI / (sin_pi(x) * gamma_real(1.0 - x)?))
    }
}

/// 1 / Gamma(x) for real x; zero at the poles.
pub fn rgamma_real(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x >= 0.5 {
        (-right_ln_gamma(Complex64::new(x, 0.0)).re).exp()
    } else {
        sin_pi(x) * right_ln_gamma(Complex64::new(1.0 - x, 0.0)).re.exp() / PI
    }
}
