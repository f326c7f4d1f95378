//! Whittaker functions M_{kappa,mu}(z) and W_{kappa,mu}(z).
//!
//! W is computed from the connection formula in terms of M_{kappa,+-mu}
//! when that is well conditioned. Near integer 2mu, or when the two terms
//! cancel, it falls back to the Laplace integral for Tricomi's U, and for
//! large |z| to the asymptotic series.


use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gamma::{gamma, log_gamma, rgamma};
use super::kummer::kummer_m_with;
use super::AccuracyBudget;
use crate::error::{Error, Result};
use crate::quad::{integrate_tail_with, QuadConfig};

/// |2mu - n| below which the connection formula is not attempted.
pub const DEGENERATE_WINDOW: f64 = 1e-4;
/// Typical relative accuracy of one Kummer evaluation, used to turn the
/// measured cancellation of the connection formula into an error estimate.
const KUMMER_ACCURACY: f64 = 1e-14;
/// |z| from which the asymptotic series is tried.
const ASYMPTOTIC_MIN_ABS_Z: f64 = 15.0;

/// A value together with its estimated relative error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RouteValue {
    pub value: Complex64,
    pub est_rel_err: f64,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn kummer_budget() -> AccuracyBudget {
    AccuracyBudget { rel_tol: 1e-11, max_terms: 1000 }
}

/// M_{kappa,mu}(z) = z^{mu+1/2} e^{-z/2} M(mu - kappa + 1/2, 2mu + 1; z), principal branch.
pub fn whittaker_m(kap: Complex64, mu: Complex64, z: Complex64) -> Result<Complex64> {
    whittaker_m_polar(kap, mu, z.norm(), z.arg())
}

/// M_{kappa,mu} at z = r e^{i theta}, continued to any real theta.
pub fn whittaker_m_polar(kap: Complex64, mu: Complex64, r: f64, theta: f64) -> Result<Complex64> {
    if r == 0.0 {
        return Ok(if (mu + 0.5).re > 0.0 { c(0.0) } else { c(f64::NAN) });
    }
    let z = Complex64::from_polar(r, theta);
    let ln_z = Complex64::new(r.ln(), theta);
    let m = kummer_m_with(mu - kap + 0.5, 2.0 * mu + 1.0, z, &kummer_budget())?;
    Ok(((mu + 0.5) * ln_z - 0.5 * z).exp() * m)
}

fn near_degenerate(mu: Complex64) -> bool {
    let two_mu = 2.0 * mu;
    two_mu.im.abs() < DEGENERATE_WINDOW && (two_mu.re - two_mu.re.round()).abs() < DEGENERATE_WINDOW
}

fn connection_polar(kap: Complex64, mu: Complex64, r: f64, theta: f64) -> Result<RouteValue> {
    if near_degenerate(mu) {
        return Err(Error::NearDegenerateOrder { two_mu: 2.0 * mu.re });
    }
    let t1 = gamma(-2.0 * mu)? * rgamma(0.5 - mu - kap) * whittaker_m_polar(kap, mu, r, theta)?;
    let t2 = gamma(2.0 * mu)? * rgamma(0.5 + mu - kap) * whittaker_m_polar(kap, -mu, r, theta)?;
    let value = t1 + t2;
    let n = value.norm();
    let est_rel_err = if n == 0.0 {
        f64::INFINITY
    } else {
        (t1.norm() + t2.norm()) / n * KUMMER_ACCURACY
    };
    Ok(RouteValue { value, est_rel_err })
}

/// W from the connection formula with both M functions, principal branch.
pub fn whittaker_w_connection(kap: Complex64, mu: Complex64, z: Complex64) -> Result<RouteValue> {
    connection_polar(kap, mu, z.norm(), z.arg())
}

/// W continued to z = r e^{i theta} for any real theta, via the connection formula.
pub fn whittaker_w_polar(kap: Complex64, mu: Complex64, r: f64, theta: f64) -> Result<Complex64> {
    Ok(connection_polar(kap, mu, r, theta)?.value)
}

/// U(a, b, z) for Re a >= 1/2 from the Laplace integral.
fn tricomi_u_integral(a: Complex64, b: Complex64, z: Complex64, rel_tol: f64) -> Result<(Complex64, f64)> {
    // s = u^p makes the integrand vanish at the origin.
    let p = if a.re < 2.0 { 2.0 / a.re } else { 1.0 };
    let cfg = QuadConfig { rel_tol, abs_tol: 0.0, ..Default::default() };
    let expo = b - a - 1.0;
    let r = integrate_tail_with(
        |u: f64| {
            if u == 0.0 {
                return Ok(c(0.0));
            }
            let s = u.powf(p);
            if s > 800.0 {
                return Ok(c(0.0));
            }
            let e = -s + (a * p - 1.0) * u.ln() + expo * (c(1.0) + s / z).ln();
            Ok(e.exp() * p)
        },
        0.0,
        &cfg,
    )?;
    let n = r.value.norm();
    if !r.converged || n == 0.0 {
        return Err(Error::Nonconvergence(format!("U({a}, {b}, {z}) integral")));
    }
    let value = r.value * (-a * z.ln() - log_gamma(a)?).exp();
    Ok((value, r.abs_err / n))
}

/// W from the Laplace integral of Tricomi's U, shifting a upward and
/// recurring back when Re a < 1/2. Requires |arg z| < pi.
pub fn whittaker_w_integral(kap: Complex64, mu: Complex64, z: Complex64) -> Result<RouteValue> {
    if z.norm() == 0.0 || (z.im == 0.0 && z.re < 0.0) {
        return Err(Error::InvalidArgument(format!("integral route needs |arg z| < pi, got {z}")));
    }
    let a = mu - kap + 0.5;
    let b = 2.0 * mu + 1.0;
    let m = if a.re >= 0.5 { 0 } else { (0.5 - a.re).ceil() as usize };
    let a_top = a + m as f64;
    let (u_top, e_top) = tricomi_u_integral(a_top, b, z, 1e-13)?;
    let mut est = e_top;
    let u = if m == 0 {
        u_top
    } else {
        let (u_next, e_next) = tricomi_u_integral(a_top + 1.0, b, z, 1e-13)?;
        est = est.max(e_next);
        let mut hi = u_next;
        let mut mid = u_top;
        let mut scale = hi.norm().max(mid.norm());
        for k in 0..m {
            let ak = a_top - k as f64;
            let lo = (2.0 * ak - b + z) * mid - ak * (ak - b + 1.0) * hi;
            scale = scale.max(((2.0 * ak - b + z) * mid).norm()).max((ak * (ak - b + 1.0) * hi).norm());
            hi = mid;
            mid = lo;
        }
        let n = mid.norm();
        if n > 0.0 {
            est *= scale / n;
        }
        mid
    };
    let value = ((mu + 0.5) * z.ln() - 0.5 * z).exp() * u;
    Ok(RouteValue { value, est_rel_err: est + 8.0 * f64::EPSILON })
}

/// W from its large-|z| asymptotic series.
pub fn whittaker_w_asymptotic(kap: Complex64, mu: Complex64, z: Complex64) -> Result<RouteValue> {
    let p = 0.5 + mu - kap;
    let q = 0.5 - mu - kap;
    let mut sum = c(1.0);
    let mut term = c(1.0);
    let mut last = 1.0;
    for k in 0..500 {
        let kf = k as f64;
        let next = term * (p + kf) * (q + kf) / ((kf + 1.0) * (-z));
        let n = next.norm();
        if n == 0.0 {
            last = 0.0;
            break;
        }
        if n > last {
            break;
        }
        sum += next;
        term = next;
        last = n;
        if n < 0.1 * f64::EPSILON * sum.norm() {
            break;
        }
    }
    let value = (-0.5 * z + kap * z.ln()).exp() * sum;
    Ok(RouteValue { value, est_rel_err: last / sum.norm() + 8.0 * f64::EPSILON })
}

/// W_{kappa,mu}(z) with the default accuracy budget.
pub fn whittaker_w(kap: Complex64, mu: Complex64, z: Complex64) -> Result<Complex64> {
    whittaker_w_with(kap, mu, z, &AccuracyBudget::default())
}

/// W_{kappa,mu}(z) on the principal branch, to the requested accuracy.
pub fn whittaker_w_with(
    kap: Complex64,
    mu: Complex64,
    z: Complex64,
    budget: &AccuracyBudget,
) -> Result<Complex64> {
    if z.norm() == 0.0 {
        return Err(Error::InvalidArgument("W_{kappa,mu}(0) is singular".into()));
    }
    let tol = budget.rel_tol;
    let mut best: Option<RouteValue> = None;
    let mut take = |r: Result<RouteValue>| -> Option<Complex64> {
        let r = r.ok()?;
        if !(r.value.re.is_finite() && r.value.im.is_finite()) {
            return None;
        }
        if r.est_rel_err <= tol {
            return Some(r.value);
        }
        if best.map_or(true, |b| r.est_rel_err < b.est_rel_err) {
            best = Some(r);
        }
        None
    };
    if !near_degenerate(mu) {
        if let Some(v) = take(whittaker_w_connection(kap, mu, z)) {
            return Ok(v);
        }
    }
    if !(z.im == 0.0 && z.re < 0.0) {
        if let Some(v) = take(whittaker_w_integral(kap, mu, z)) {
            return Ok(v);
        }
    }
    if z.norm() >= ASYMPTOTIC_MIN_ABS_Z {
        if let Some(v) = take(whittaker_w_asymptotic(kap, mu, z)) {
            return Ok(v);
        }
    }
    if near_degenerate(mu) {
        return Err(Error::NearDegenerateOrder { two_mu: 2.0 * mu.re });
    }
    Err(Error::Nonconvergence(match best {
        Some(b) => format!("W_({kap}),({mu})({z}): best route estimate {:e}", b.est_rel_err),
        None => format!("W_({kap}),({mu})({z}): no route succeeded"),
    }))
}

/// Phase factor e^{i pi x}.
#[cfg(test)]
pub(crate) fn exp_i_pi(x: Complex64) -> Complex64 {
    (Complex64::i() * std::f64::consts::PI * x).exp()
}

#[cfg(test)]
mod tests {
    use super::super::bessel::bessel_k;
    use super::*;
    use std::f64::consts::PI;

    fn cc(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    // Reference values from a 30-digit offline evaluation: (kappa, mu, z, W).
    const W_REF: [((f64, f64), f64, (f64, f64), (f64, f64)); 10] = [
        ((0.4, 0.0), 0.45, (3.0, 0.0), (0.36579753762591003, 0.0)),
        ((0.3, 0.0), 0.49, (0.7, 0.0), (0.75204680673375077, 0.0)),
        ((-0.9, 0.0), 0.4, (26.7, 0.0), (7.7782223634115068e-8, 0.0)),
        ((1.1, 0.3), 0.4, (2.0, -1.0), (1.0712062014165104, 0.079964061757212471)),
        ((2.5, 0.0), 0.5, (5.0, 0.0), (1.4094463473064354, 0.0)),
        ((0.2, 0.0), 1.0, (12.0, 0.0), (0.0043754370388143548, 0.0)),
        ((0.0, 0.6), 0.49, (0.001, -3.0), (-1.4594108265292423, 1.6874274363172704)),
        ((0.9, 0.0), 0.4, (40.0, 0.0), (5.7011747645844029e-8, 0.0)),
        ((2.9, 0.0), 0.4, (2.0, 0.0), (-1.4828125918510647, 0.0)),
        ((1.4, 0.0), 1.4998, (3.0, 0.0), (1.7419653322793514, 0.0)),
    ];

    const M_REF: [((f64, f64), f64, (f64, f64), (f64, f64)); 3] = [
        ((0.3, 0.0), 0.45, (1.0, 0.5), (0.89980993391210839, 0.38345003436932498)),
        ((0.0, -0.7), 0.49, (0.0, 4.0), (-0.0034454469989338828, -0.21932592780152666)),
        ((1.2, 0.0), 1.4, (9.0, 0.0), (26.931154334589336, 0.0)),
    ];

    #[test]
    fn w_reference_table() {
        for ((kr, ki), mu, (zr, zi), (wr, wi)) in W_REF {
            let got = whittaker_w(cc(kr, ki), cc(mu, 0.0), cc(zr, zi)).unwrap();
            let want = cc(wr, wi);
            assert!(rel(got, want) < 1e-9, "W_({kr},{ki}),{mu}({zr},{zi}) = {got}, want {want}");
        }
    }

    #[test]
    fn m_reference_table() {
        for ((kr, ki), mu, (zr, zi), (wr, wi)) in M_REF {
            let got = whittaker_m(cc(kr, ki), cc(mu, 0.0), cc(zr, zi)).unwrap();
            assert!(rel(got, cc(wr, wi)) < 1e-11, "M = {got}");
        }
    }

    #[test]
    fn m_reduces_to_sinh() {
        let z = 1.0f64;
        let got = whittaker_m(cc(0.0, 0.0), cc(0.5, 0.0), cc(z, 0.0)).unwrap();
        assert!(rel(got, cc(2.0 * (0.5 * z).sinh(), 0.0)) < 1e-14);
    }

    #[test]
    fn m_small_argument_exponent() {
        let (kap, mu) = (cc(0.3, 0.0), cc(0.7, 0.0));
        let z1 = 1e-6;
        let z2 = 2e-6;
        let m1 = whittaker_m(kap, mu, cc(z1, 0.0)).unwrap().re;
        let m2 = whittaker_m(kap, mu, cc(z2, 0.0)).unwrap().re;
        let slope = (m2 / m1).ln() / 2f64.ln();
        assert!((slope - 1.2).abs() < 1e-5, "{slope}");
    }

    #[test]
    fn w_reduces_to_bessel_k() {
        let (mu, x) = (0.4, 1.5);
        let w = whittaker_w(cc(0.0, 0.0), cc(mu, 0.0), cc(2.0 * x, 0.0)).unwrap();
        let want = (2.0 * x / PI).sqrt() * bessel_k(mu, x).unwrap();
        assert!(rel(w, cc(want, 0.0)) < 1e-12);
    }

    #[test]
    fn w_leading_asymptotics() {
        let (kap, mu, z) = (0.3, 0.45, 50.0f64);
        let w = whittaker_w(cc(kap, 0.0), cc(mu, 0.0), cc(z, 0.0)).unwrap().re;
        let lead = (-0.5 * z).exp() * z.powf(kap);
        assert!((w / lead - 1.0).abs() < 0.02);
    }

    #[test]
    fn w_quadrature_oracle() {
        // U(a, b, x) = (1/Gamma(a)) int_0^inf e^{-xt} t^{a-1} (1+t)^{b-a-1} dt
        let (kap, mu, x) = (0.4f64, 0.45f64, 3.0f64);
        let a = mu - kap + 0.5;
        let b = 2.0 * mu + 1.0;
        // t = v^2 removes the t^{a-1} endpoint singularity.
        let r = crate::quad::integrate_semi_infinite(
            |v| {
                let t = v * v;
                2.0 * v * (-x * t).exp() * t.powf(a - 1.0) * (1.0 + t).powf(b - a - 1.0)
            },
            1e-12,
            1e-300,
        )
        .unwrap();
        let u = r.value / super::super::gamma::gamma_real(a).unwrap();
        let want = (-0.5 * x).exp() * x.powf(mu + 0.5) * u;
        let got = whittaker_w(cc(kap, 0.0), cc(mu, 0.0), cc(x, 0.0)).unwrap();
        assert!(rel(got, cc(want, 0.0)) < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn routes_agree_off_degeneracy() {
        for &(kap, mu, z) in &[(0.4, 0.3, 2.0), (1.7, 0.8, 6.0), (-0.5, 1.2, 0.9), (2.2, 0.35, 12.0)] {
            let a = whittaker_w_connection(cc(kap, 0.0), cc(mu, 0.0), cc(z, 0.0)).unwrap();
            let b = whittaker_w_integral(cc(kap, 0.0), cc(mu, 0.0), cc(z, 0.0)).unwrap();
            assert!(rel(a.value, b.value) < 1e-10, "kap={kap} mu={mu} z={z}: {} vs {}", a.value, b.value);
        }
    }

    #[test]
    fn degenerate_order_uses_integral() {
        let w = whittaker_w(cc(0.7, 0.0), cc(0.5, 0.0), cc(1.3, 0.0)).unwrap();
        let near = whittaker_w(cc(0.7, 0.0), cc(0.5 + 2e-4, 0.0), cc(1.3, 0.0)).unwrap();
        assert!(rel(w, near) < 1e-3);
        assert!(matches!(
            whittaker_w_connection(cc(0.7, 0.0), cc(0.5, 0.0), cc(1.3, 0.0)),
            Err(Error::NearDegenerateOrder { .. })
        ));
    }

    #[test]
    fn polar_m_matches_principal_inside_cut() {
        let (kap, mu) = (cc(0.2, 0.1), cc(0.35, 0.0));
        let z = cc(-0.4, 1.1);
        let a = whittaker_m(kap, mu, z).unwrap();
        let b = whittaker_m_polar(kap, mu, z.norm(), z.arg()).unwrap();
        assert!(rel(a, b) < 1e-15);
        let above = whittaker_m_polar(kap, mu, 1.0, PI - 1e-9).unwrap();
        let below = whittaker_m_polar(kap, mu, 1.0, -PI + 1e-9).unwrap();
        let jump = exp_i_pi(2.0 * (mu + 0.5));
        assert!(rel(above, below * jump) < 1e-7);
    }
}
