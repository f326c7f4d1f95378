//! Modified Bessel functions I_nu and K_nu of real order nu >= 0 and x > 0.
//!
//! I: ascending series up to the crossover, Hankel asymptotic beyond it.
//! K: Temme's series for x <= 2, Steed's continued fraction up to the
//! crossover, Hankel asymptotic beyond; integer steps in order by forward
//! recurrence, which is stable for K.

use std::f64::consts::PI;

use super::gamma::{ln_gamma_abs, rgamma_real, sin_pi};
use crate::error::{Error, Result};

/// Argument above which the large-x expansions are tried first.
pub const CROSSOVER: f64 = 30.0;

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 10_000;
const LN_MAX: f64 = 709.0;

fn check_args(nu: f64, x: f64) -> Result<()> {
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(Error::InvalidArgument(format!("Bessel order must be >= 0, got {nu}")));
    }
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidArgument(format!("Bessel argument must be > 0, got {x}")));
    }
    Ok(())
}

/// ln(e^{-x} I_nu(x)) from the ascending series.
pub(crate) fn ln_i_scaled_series(nu: f64, x: f64) -> Result<f64> {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0usize;
    loop {
        k += 1;
        term *= q / (k as f64 * (nu + k as f64));
        sum += term;
        if term < EPS * sum {
            break;
        }
        if k > MAX_ITER {
            return Err(Error::Nonconvergence(format!("I series at nu={nu}, x={x}")));
        }
    }
    Ok(nu * (0.5 * x).ln() - ln_gamma_abs(nu + 1.0)? - x + sum.ln())
}

fn hankel_sum(nu: f64, x: f64, alternating: bool) -> Option<f64> {
    let mu4 = 4.0 * nu * nu;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let mut next = term * (mu4 - odd * odd) / (8.0 * k as f64 * x);
        if alternating {
            next = -next;
        }
        if next.abs() > term.abs() {
            return None;
        }
        sum += next;
        term = next;
        if term.abs() < EPS * sum.abs() {
            return Some(sum);
        }
    }
    None
}

/// e^{-x} I_nu(x) from the Hankel expansion, if it converges to full precision.
pub(crate) fn i_scaled_asymptotic(nu: f64, x: f64) -> Option<f64> {
    hankel_sum(nu, x, true).map(|s| s / (2.0 * PI * x).sqrt())
}

/// e^{x} K_nu(x) from the Hankel expansion, if it converges to full precision.
pub(crate) fn k_scaled_asymptotic(nu: f64, x: f64) -> Option<f64> {
    hankel_sum(nu, x, false).map(|s| s * (PI / (2.0 * x)).sqrt())
}

/// ln I_nu(x), usable far beyond the overflow threshold of I itself.
pub fn ln_bessel_i(nu: f64, x: f64) -> Result<f64> {
    check_args(nu, x)?;
    if x > CROSSOVER {
        if let Some(s) = i_scaled_asymptotic(nu, x) {
            return Ok(s.ln() + x);
        }
    }
    Ok(ln_i_scaled_series(nu, x)? + x)
}

/// e^{-x} I_nu(x).
pub fn bessel_i_scaled(nu: f64, x: f64) -> Result<f64> {
    check_args(nu, x)?;
    if x > CROSSOVER {
        if let Some(s) = i_scaled_asymptotic(nu, x) {
            return Ok(s);
        }
    }
    Ok(ln_i_scaled_series(nu, x)?.exp())
}

/// I_nu(x); `Overflow` when the value exceeds the double range.
pub fn bessel_i(nu: f64, x: f64) -> Result<f64> {
    let l = ln_bessel_i(nu, x)?;
    if l > LN_MAX {
        return Err(Error::Overflow(format!("I_{nu}({x}) = exp({l})")));
    }
    Ok(l.exp())
}

/// Odd and even parts of 1/Gamma(1 +- mu) for |mu| <= 1/2.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    // Taylor coefficients of 1/Gamma(1 + x).
    const C: [f64; 16] = [
        1.0,
        0.5772156649015329,
        -0.6558780715202539,
        -0.04200263503409524,
        0.16653861138229149,
        -0.04219773455554434,
        -0.009621971527876974,
        0.0072189432466631,
        -0.0011651675918590651,
        -0.00021524167411495098,
        0.00012805028238811619,
        -2.0134854780788239e-5,
        -1.2504934821426707e-6,
        1.1330272319816959e-6,
        -2.0563384169776071e-7,
        5.0020076444692229e-9,
    ];
    let gampl = rgamma_real(1.0 + mu);
    let gammi = rgamma_real(1.0 - mu);
    let gam1 = if mu.abs() < 0.1 {
        let m2 = mu * mu;
        let mut acc = 0.0;
        for j in (1..C.len()).step_by(2).rev() {
            acc = acc * m2 + C[j];
        }
        -acc
    } else {
        (gammi - gampl) / (2.0 * mu)
    };
    let gam2 = 0.5 * (gammi + gampl);
    (gam1, gam2, gampl, gammi)
}

/// (K_mu, K_{mu+1}) for |mu| <= 1/2 and 0 < x <= 2, unscaled.
fn k_temme(mu: f64, x: f64) -> Result<(f64, f64)> {
    let x2 = 0.5 * x;
    let pimu = PI * mu;
    let fact = if pimu.abs() < EPS { 1.0 } else { pimu / sin_pi(mu) };
    let d = -x2.ln();
    let e = mu * d;
    let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
    let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
    let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
    let mut sum = ff;
    let ee = e.exp();
    let mut p = 0.5 * ee / gampl;
    let mut q = 0.5 / (ee * gammi);
    let mut c = 1.0;
    let dd = x2 * x2;
    let mut sum1 = p;
    let mu2 = mu * mu;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi - mu2);
        c *= dd / fi;
        p /= fi - mu;
        q /= fi + mu;
        let del = c * ff;
        sum += del;
        sum1 += c * (p - fi * ff);
        if del.abs() < sum.abs() * EPS {
            return Ok((sum, sum1 * 2.0 / x));
        }
    }
    Err(Error::Nonconvergence(format!("Temme series for K at mu={mu}, x={x}")))
}

/// (e^x K_mu, e^x K_{mu+1}) for |mu| <= 1/2 and x >= 2 via Steed's method.
fn k_steed_scaled(mu: f64, x: f64) -> Result<(f64, f64)> {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25 - mu * mu;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    let mut converged = false;
    for i in 2..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Nonconvergence(format!("Steed continued fraction at mu={mu}, x={x}")));
    }
    let h = a1 * h;
    let kmu = (PI / (2.0 * x)).sqrt() / s;
    let k1 = kmu * (mu + x + 0.5 - h) / x;
    Ok((kmu, k1))
}

/// e^x K_nu(x) through the small/medium-x algorithms and recurrence.
pub(crate) fn k_scaled_recurrence(nu: f64, x: f64) -> Result<f64> {
    let nl = (nu + 0.5).floor();
    let mu = nu - nl;
    let (mut kmu, mut k1) = if x <= 2.0 {
        let (a, b) = k_temme(mu, x)?;
        let ex = x.exp();
        (a * ex, b * ex)
    } else {
        k_steed_scaled(mu, x)?
    };
    let n = nl as usize;
    for i in 1..=n {
        let next = 2.0 * (mu + i as f64) / x * k1 + kmu;
        kmu = k1;
        k1 = next;
        if !kmu.is_finite() {
            return Err(Error::Overflow(format!("K_{nu}({x}) recurrence")));
        }
    }
    Ok(kmu)
}

/// e^{x} K_nu(x).
pub fn bessel_k_scaled(nu: f64, x: f64) -> Result<f64> {
    check_args(nu, x)?;
    if x > CROSSOVER {
        if let Some(s) = k_scaled_asymptotic(nu, x) {
            return Ok(s);
        }
    }
    k_scaled_recurrence(nu, x)
}

/// ln K_nu(x).
pub fn ln_bessel_k(nu: f64, x: f64) -> Result<f64> {
    Ok(bessel_k_scaled(nu, x)?.ln() - x)
}

/// K_nu(x); `Overflow` when the value exceeds the double range.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    let l = ln_bessel_k(nu, x)?;
    if l > LN_MAX {
        return Err(Error::Overflow(format!("K_{nu}({x}) = exp({l})")));
    }
    Ok(l.exp())
}
