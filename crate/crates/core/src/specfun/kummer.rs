//! Kummer's confluent hypergeometric function M(a, b; z).
//!
//! The Taylor series is summed with compensation and its cancellation is
//! measured. When the measured conditioning would spoil the requested
//! accuracy the series is redone in double-double arithmetic; beyond that,
//! Kummer's transformation, the large-|z| expansion and the Euler integral
//! are tried in that order.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::dd::CDd;
use super::gamma::log_gamma;
use super::sum::CompensatedSum;
use super::AccuracyBudget;
use crate::error::{Error, Result};
use crate::quad::{integrate_with, QuadConfig};

/// Roundoff safety factor applied to the measured series conditioning.
const ROUNDOFF_FACTOR: f64 = 16.0;
/// Smallest |z| at which the asymptotic expansion is attempted.
const ASYMPTOTIC_MIN_ABS_Z: f64 = 15.0;

#[derive(Debug, Clone, Copy)]
struct Candidate {
    value: Complex64,
    est_rel_err: f64,
}

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Taylor series. Returns None if it does not settle within `max_terms`.
fn series(a: Complex64, b: Complex64, z: Complex64, max_terms: usize) -> Option<Candidate> {
    let terminating = is_nonpositive_integer(a);
    let mut sum = CompensatedSum::default();
    let mut term = Complex64::new(1.0, 0.0);
    sum.add(term);
    let mut small_run = 0;
    for k in 0..max_terms {
        let kf = k as f64;
        term = term * (a + kf) * z / ((b + kf) * (kf + 1.0));
        if term.norm() == 0.0 && terminating {
            let v = sum.value();
            return Some(Candidate { value: v, est_rel_err: sum.condition() * f64::EPSILON * 4.0 });
        }
        sum.add(term);
        let v = sum.value().norm();
        // Require the tail to be negligible for two consecutive terms past the hump.
        if term.norm() <= f64::EPSILON * 0.25 * v && kf > (a.norm() * z.norm()).sqrt() {
            small_run += 1;
            if small_run >= 2 {
                return Some(Candidate {
                    value: sum.value(),
                    est_rel_err: sum.condition() * f64::EPSILON * ROUNDOFF_FACTOR,
                });
            }
        } else {
            small_run = 0;
        }
    }
    None
}

/// Taylor series in double-double arithmetic, for when the plain sum cancels.
fn series_dd(a: Complex64, b: Complex64, z: Complex64, max_terms: usize) -> Option<Candidate> {
    let zd = CDd::from_c64(z);
    let ad = CDd::from_c64(a);
    let bd = CDd::from_c64(b);
    let mut term = CDd::from_c64(Complex64::new(1.0, 0.0));
    let mut sum = term;
    let mut abs_sum = 1.0;
    let mut small_run = 0;
    for k in 0..max_terms {
        let kf = k as f64;
        let num = term.mul(ad.add_real(kf)).mul(zd);
        let den = bd.add_real(kf).mul(CDd::from_c64(Complex64::new(kf + 1.0, 0.0)));
        term = num.div(den);
        let tn = term.norm();
        sum = sum.add(term);
        abs_sum += tn;
        let v = sum.norm();
        if tn == 0.0 {
            return Some(Candidate { value: sum.to_c64(), est_rel_err: 2.0 * f64::EPSILON });
        }
        if tn <= 1e-32 * v && kf > (a.norm() * z.norm()).sqrt() {
            small_run += 1;
            if small_run >= 2 {
                let cond = abs_sum / v;
                return Some(Candidate {
                    value: sum.to_c64(),
                    est_rel_err: cond * 1e-31 * (kf + 1.0) + 2.0 * f64::EPSILON,
                });
            }
        } else {
            small_run = 0;
        }
    }
    None
}

/// Truncated asymptotic sum; returns (sum, magnitude of first omitted term).
fn asymptotic_sum(p: Complex64, q: Complex64, w: Complex64, max_terms: usize) -> (Complex64, f64) {
    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut last = 1.0;
    for s in 0..max_terms {
        let sf = s as f64;
        let next = term * (p + sf) * (q + sf) / ((sf + 1.0) * w);
        let n = next.norm();
        if n == 0.0 {
            return (sum + next, 0.0);
        }
        if n > last {
            return (sum, last);
        }
        sum += next;
        term = next;
        last = n;
        if n <= f64::EPSILON * 0.1 * sum.norm() {
            return (sum, n);
        }
    }
    (sum, last)
}

fn ln_or_neg_inf(z: Complex64) -> Option<Complex64> {
    if is_nonpositive_integer(z) {
        None
    } else {
        log_gamma(z).ok()
    }
}

/// Large-|z| expansion with both exponential contributions.
fn asymptotic(a: Complex64, b: Complex64, z: Complex64, max_terms: usize) -> Option<Candidate> {
    let ln_gb = log_gamma(b).ok()?;
    let i = Complex64::i();
    let sign = if z.arg() > -0.5 * PI { 1.0 } else { -1.0 };
    let ln_z = z.ln();

    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    if let Some(lg) = ln_or_neg_inf(b - a) {
        let (s1, e1) = asymptotic_sum(a, a - b + 1.0, -z, max_terms);
        let pre = (sign * i * PI * a - a * ln_z + ln_gb - lg).exp();
        total += pre * s1;
        err += pre.norm() * e1;
    }
    if let Some(lg) = ln_or_neg_inf(a) {
        let (s2, e2) = asymptotic_sum(b - a, 1.0 - a, z, max_terms);
        let pre = (z + (a - b) * ln_z + ln_gb - lg).exp();
        total += pre * s2;
        err += pre.norm() * e2;
    }
    let n = total.norm();
    if n == 0.0 || !n.is_finite() {
        return None;
    }
    Some(Candidate { value: total, est_rel_err: err / n + 8.0 * f64::EPSILON })
}

/// Substitution exponent p for t = u^p that makes the integrand vanish
/// linearly at the endpoint, taming both singular and log-periodic factors.
fn endpoint_power(re_param: f64) -> f64 {
    if re_param < 2.0 {
        2.0 / re_param
    } else {
        1.0
    }
}

/// Euler integral, valid for Re b > Re a > 0.
fn euler_integral(a: Complex64, b: Complex64, z: Complex64, rel_tol: f64) -> Option<Candidate> {
    let c = b - a;
    if !(a.re > 0.0 && c.re > 0.0) {
        return None;
    }
    let cfg = QuadConfig { rel_tol: (0.1 * rel_tol).max(1e-13), abs_tol: 0.0, ..Default::default() };
    let p = endpoint_power(a.re);
    let q = endpoint_power(c.re);
    let one = Complex64::new(1.0, 0.0);

    // t = u^p on [0, 1/2]
    let u_max = 0.5f64.powf(1.0 / p);
    let left = integrate_with(
        |u: f64| {
            if u == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let t = u.powf(p);
            let e = z * t + (a * p - 1.0) * u.ln() + (c - one) * (-t).ln_1p();
            Ok(e.exp() * p)
        },
        0.0,
        u_max,
        &cfg,
    )
    .ok()?;
    // t = 1 - v^q on [1/2, 1]
    let v_max = 0.5f64.powf(1.0 / q);
    let right = integrate_with(
        |v: f64| {
            if v == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let s = v.powf(q);
            let e = z * (1.0 - s) + (a - one) * (-s).ln_1p() + (c * q - 1.0) * v.ln();
            Ok(e.exp() * q)
        },
        0.0,
        v_max,
        &cfg,
    )
    .ok()?;
    let integral = left.value + right.value;
    let n = integral.norm();
    if n == 0.0 || !n.is_finite() {
        return None;
    }
    let pre = (log_gamma(b).ok()? - log_gamma(a).ok()? - log_gamma(c).ok()?).exp();
    Some(Candidate {
        value: pre * integral,
        est_rel_err: (left.abs_err + right.abs_err) / n + 8.0 * f64::EPSILON,
    })
}

/// M(a, b; z) from the Euler integral alone, for Re b > Re a > 0. Shares no
/// code path with the series routes.
pub fn kummer_m_integral(a: Complex64, b: Complex64, z: Complex64) -> Result<Complex64> {
    euler_integral(a, b, z, 1e-12)
        .map(|c| c.value)
        .ok_or_else(|| Error::InvalidArgument(format!("Euler integral needs Re b > Re a > 0: a = {a}, b = {b}")))
}

/// M(a, b; z) with the default accuracy budget.
pub fn kummer_m(a: Complex64, b: Complex64, z: Complex64) -> Result<Complex64> {
    kummer_m_with(a, b, z, &AccuracyBudget::default())
}

/// M(a, b; z) to the requested relative accuracy.
pub fn kummer_m_with(
    a: Complex64,
    b: Complex64,
    z: Complex64,
    budget: &AccuracyBudget,
) -> Result<Complex64> {
    if is_nonpositive_integer(b) {
        return Err(Error::InvalidArgument(format!("M(a, b; z) undefined for b = {b}")));
    }
    if z.norm() == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let tol = budget.rel_tol;
    let mut best: Option<Candidate> = None;
    let mut consider = |c: Option<Candidate>| -> Option<Complex64> {
        let c = c?;
        if !(c.value.re.is_finite() && c.value.im.is_finite()) {
            return None;
        }
        if c.est_rel_err <= tol {
            return Some(c.value);
        }
        if best.map_or(true, |b| c.est_rel_err < b.est_rel_err) {
            best = Some(c);
        }
        None
    };

    let direct = series(a, b, z, budget.max_terms);
    if is_nonpositive_integer(a) {
        if let Some(c) = direct {
            return Ok(c.value);
        }
    }
    let ill_conditioned = direct.is_some();
    if let Some(v) = consider(direct) {
        return Ok(v);
    }
    if ill_conditioned {
        if let Some(v) = consider(series_dd(a, b, z, budget.max_terms)) {
            return Ok(v);
        }
    }
    if z.re < 0.0 {
        let t = series(b - a, b, -z, budget.max_terms).map(|c| Candidate {
            value: z.exp() * c.value,
            est_rel_err: c.est_rel_err,
        });
        if let Some(v) = consider(t) {
            return Ok(v);
        }
    }
    if z.norm() >= ASYMPTOTIC_MIN_ABS_Z {
        if let Some(v) = consider(asymptotic(a, b, z, budget.max_terms)) {
            return Ok(v);
        }
    }
    if let Some(v) = consider(euler_integral(a, b, z, tol)) {
        return Ok(v);
    }
    let detail = match best {
        Some(c) => format!("best estimate {} with relative error ~{:e}", c.value, c.est_rel_err),
        None => "no route produced a finite value".to_string(),
    };
    Err(Error::Nonconvergence(format!("M({a}, {b}; {z}): {detail}")))
}

/// Value of the summed series alone, for testing the fallbacks against it.
#[cfg(test)]
fn series_only(a: Complex64, b: Complex64, z: Complex64) -> Option<(Complex64, f64)> {
    series(a, b, z, 2000).map(|c| (c.value, c.est_rel_err))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    // Reference values from a 30-digit offline evaluation: (a, b, z, M).
    const REF: [((f64, f64), f64, (f64, f64), (f64, f64)); 8] = [
        ((0.3, 0.2), 1.7, (5.0, -3.0), (2.8587726745503794, -6.9356748062909524)),
        ((1.0, -2.0), 2.5, (0.0, -20.0), (-0.0085379430572563758, -0.004790980925002887)),
        ((-2.5, 0.0), 1.3, (7.0, 0.0), (3.5499100693877005, 0.0)),
        ((0.5, 0.0), 1.5, (-30.0, 0.0), (0.16180215937964007, 0.0)),
        ((1.1, -3.0), 2.1, (0.0, -40.0), (-0.0032221648371996737, 0.008107198067357234)),
        ((2.0, 0.0), 3.0, (50.0, 0.0), (2.0324045672061324e20, 0.0)),
        ((0.9, -1.5), 1.8, (0.0, -55.0), (-0.0063743042501879554, -0.0062347880159141516)),
        ((0.1, 0.0), -1.9, (3.0, 0.0), (62.370877814109025, 0.0)),
    ];

    #[test]
    fn reference_table() {
        for ((ar, ai), b, (zr, zi), (wr, wi)) in REF {
            let got = kummer_m(c(ar, ai), c(b, 0.0), c(zr, zi)).unwrap();
            let want = c(wr, wi);
            assert!(rel(got, want) < 1e-10, "M({ar}+{ai}i, {b}, {zr}+{zi}i) = {got}, want {want}");
        }
    }

    #[test]
    fn trivial_identities() {
        let a = c(0.7, 0.0);
        assert_eq!(kummer_m(a, c(1.9, 0.0), c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        let z = c(0.0, 1.3);
        assert!(rel(kummer_m(a, a, z).unwrap(), z.exp()) < 1e-14);
        let m = kummer_m(c(-1.0, 0.0), c(2.0, 0.0), c(0.8, 0.0)).unwrap();
        assert_eq!(m, c(0.6, 0.0));
    }

    #[test]
    fn fallback_routes_agree_with_series_where_both_work() {
        let (a, b, z) = (c(0.8, -1.2), c(2.3, 0.0), c(0.0, 18.0));
        let (s, est) = series_only(a, b, z).unwrap();
        assert!(est < 1e-7);
        let asy = asymptotic(a, b, z, 500).unwrap();
        let int = euler_integral(a, b, z, 1e-12).unwrap();
        assert!(rel(int.value, s) < 10.0 * est.max(1e-12));
        assert!(rel(asy.value, int.value) < asy.est_rel_err.max(1e-12) * 10.0);
    }

    #[test]
    fn rejects_nonpositive_integer_b() {
        assert!(kummer_m(c(0.5, 0.0), c(-2.0, 0.0), c(1.0, 0.0)).is_err());
    }
}
