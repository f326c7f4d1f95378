//! Radial fixed-energy Green's function G_l(r_b, r_a; E).
//!
//! Three independent routes are provided below threshold: the coupling
//! series built from moments of the free kernel, the single z-integral that
//! resums it, and the Whittaker closed form. The closed form also continues
//! to complex energies, which is what the discontinuity and residue code use.
//!
//! The overall assembly factor of the full amplitude is not applied; every
//! value here is the bare radial object.

mod disc;
mod residue;

pub use disc::{disc_closed_signed, discontinuity, free_disc_s_wave, DiscResult, DISC_ETA};
pub use residue::{
    locate_poles, residue_factorization, PoleLocation, ResidueReport, RESIDUE_OFFSETS,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{kinematics, make_channel, Channel, Kinematics, SystemParams};
use crate::quad::{integrate_tail_with, integrate_with, QuadConfig, QuadResult};
use crate::specfun::{
    bessel_i, bessel_i_scaled, bessel_k, bessel_k_scaled, ln_bessel_i, log_gamma, rgamma,
    whittaker_m, whittaker_w_with, AccuracyBudget,
};

/// Largest moment order accepted by [`moment_gn`].
pub const MAX_MOMENT: u32 = 60;
/// Distance in nu below which the closed form refuses to evaluate.
pub const POLE_GUARD: f64 = 1e-10;
/// Nominal relative accuracy of one closed-form evaluation.
const CLOSED_ACCURACY: f64 = 1e-10;
/// Accuracy demanded of W inside the closed form.
pub(crate) const W_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Route {
    Closed,
    Integral,
    Series,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreenValue {
    /// Real below threshold; the imaginary part is then exactly zero.
    pub value: Complex64,
    pub route: Route,
    pub err_est: f64,
    pub terms_used: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesDiagnostics {
    /// Individual terms (alpha E)^n g^(n), without the (r_b r_a) power.
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// First n with |term_n| < rel_tol |partial sum|.
    pub converged_at: Option<usize>,
    pub rel_tol: f64,
    /// Accumulated quadrature error of all terms.
    pub quad_err: f64,
}

/// One point of the standard evaluation grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub alpha: f64,
    pub dimension: u32,
    pub l: u32,
    pub energy: f64,
    pub r_b: f64,
    pub r_a: f64,
}

pub const GRID_ALPHAS: [f64; 3] = [0.05, 0.1, 0.3];
pub const GRID_DIMENSIONS: [u32; 3] = [2, 3, 5];
pub const GRID_LS: [u32; 3] = [0, 1, 2];
pub const GRID_ENERGIES: [f64; 2] = [0.2, 0.5];
pub const GRID_RADII: [(f64, f64); 3] = [(2.0, 1.0), (5.0, 0.5), (1.1, 1.0)];

/// The standard grid, skipping channels at or beyond critical coupling.
pub fn standard_grid() -> Vec<GridPoint> {
    let mut out = Vec::new();
    for &alpha in &GRID_ALPHAS {
        for &dimension in &GRID_DIMENSIONS {
            for &l in &GRID_LS {
                let Ok(params) = SystemParams::new(alpha, dimension) else { continue };
                if make_channel(&params, l).is_err() {
                    continue;
                }
                for &energy in &GRID_ENERGIES {
                    for &(r_b, r_a) in &GRID_RADII {
                        out.push(GridPoint { alpha, dimension, l, energy, r_b, r_a });
                    }
                }
            }
        }
    }
    out
}

fn check_radii(r_b: f64, r_a: f64) -> Result<()> {
    if !(r_b > 0.0 && r_a > 0.0 && r_b.is_finite() && r_a.is_finite()) {
        return Err(Error::InvalidArgument(format!("radii must be positive, got {r_b}, {r_a}")));
    }
    Ok(())
}

fn ln_sinh(z: f64) -> f64 {
    if z > 20.0 {
        z - std::f64::consts::LN_2 + (-(-2.0 * z).exp()).ln_1p()
    } else {
        z.sinh().ln()
    }
}

/// ln I_nu(x) - x, accurate for every x > 0.
pub(crate) fn ln_i_minus_x(nu: f64, x: f64) -> Result<f64> {
    if x > 1.0 {
        Ok(bessel_i_scaled(nu, x)?.ln())
    } else {
        Ok(ln_bessel_i(nu, x)? - x)
    }
}

/// ln h(z) for the free kernel with real kappa.
pub(crate) fn ln_h(z: f64, r_b: f64, r_a: f64, kappa: f64, mu_hat: f64) -> Result<f64> {
    let ls = ln_sinh(z);
    let inv_sinh = (-ls).exp();
    let x = 2.0 * kappa * (r_b * r_a).sqrt() * inv_sinh;
    let d = r_b.sqrt() - r_a.sqrt();
    // -kappa (r_b + r_a) coth z + x, regrouped so nothing cancels near z = 0.
    let expo = -kappa * (d * d * inv_sinh + (r_b + r_a) * (0.5 * z).tanh());
    if x == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(-ls + expo + ln_i_minus_x(2.0 * mu_hat, x)?)
}

fn bound_kappa(kin: &Kinematics) -> Result<f64> {
    let (kappa, _) = kin.bound()?;
    if !(kappa > 0.0) {
        return Err(Error::ValidityViolation("kappa must be positive".into()));
    }
    Ok(kappa)
}

/// h(z) = e^{-kappa (r_b + r_a) coth z} I_{2 mu_hat}(2 kappa sqrt(r_b r_a) / sinh z) / sinh z.
pub fn h_function(z: f64, r_b: f64, r_a: f64, kin: &Kinematics, ch: &Channel) -> Result<f64> {
    check_radii(r_b, r_a)?;
    if !(z > 0.0) {
        return Err(Error::InvalidArgument(format!("h(z) needs z > 0, got {z}")));
    }
    let kappa = bound_kappa(kin)?;
    let v = ln_h(z, r_b, r_a, kappa, ch.mu_hat)?.exp();
    if !v.is_finite() {
        return Err(Error::Overflow(format!("h({z}) overflows")));
    }
    Ok(v)
}

/// Free kernel 2 I_mu(kappa r_<) K_mu(kappa r_>) from Bessel functions.
pub fn g0_bessel(r_b: f64, r_a: f64, kin: &Kinematics, ch: &Channel) -> Result<f64> {
    check_radii(r_b, r_a)?;
    let kappa = bound_kappa(kin)?;
    let (lo, hi) = if r_b < r_a { (r_b, r_a) } else { (r_a, r_b) };
    let (x, y) = (kappa * lo, kappa * hi);
    let mu = ch.mu_hat;
    let v = if x > 1.0 {
        2.0 * bessel_i_scaled(mu, x)? * bessel_k_scaled(mu, y)? * (x - y).exp()
    } else {
        2.0 * bessel_i(mu, x)? * bessel_k(mu, y)?
    };
    if !v.is_finite() {
        return Err(Error::Overflow(format!("g0 at kappa r = {x}, {y}")));
    }
    Ok(v)
}

fn moment_config() -> QuadConfig {
    QuadConfig { rel_tol: 1e-11, abs_tol: 0.0, ..Default::default() }
}

/// Integral of f over (0, inf): z = s^2 on (0, 1] absorbs the z^{-1/2}
/// behavior at coincident radii, the rest goes through the tail map.
pub(crate) fn z_integral<F>(mut f: F, cfg: &QuadConfig) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let head = integrate_with(
        |s: f64| {
            let z = s * s;
            if z == 0.0 {
                return Ok(0.0);
            }
            Ok(2.0 * s * f(z)?)
        },
        0.0,
        1.0,
        cfg,
    )?;
    let tail = integrate_tail_with(&mut f, 1.0, cfg)?;
    Ok(QuadResult {
        value: head.value + tail.value,
        abs_err: head.abs_err + tail.abs_err,
        evaluations: head.evaluations + tail.evaluations,
        converged: head.converged && tail.converged,
    })
}

/// g0 = 2 int_0^inf h(z) dz.
pub fn g0_zint(r_b: f64, r_a: f64, kin: &Kinematics, ch: &Channel) -> Result<QuadResult> {
    g0_zint_with(r_b, r_a, kin, ch, &moment_config())
}

pub fn g0_zint_with(
    r_b: f64,
    r_a: f64,
    kin: &Kinematics,
    ch: &Channel,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    check_radii(r_b, r_a)?;
    let kappa = bound_kappa(kin)?;
    let mu = ch.mu_hat;
    z_integral(|z| Ok(2.0 * ln_h(z, r_b, r_a, kappa, mu)?.exp()), cfg)?.into_result()
}

fn ln_factorial(n: u32) -> f64 {
    log_gamma(Complex64::new(n as f64 + 1.0, 0.0)).map(|v| v.re).unwrap_or(f64::INFINITY)
}

/// 2 int_0^inf (c z)^n / n! h(z) dz, evaluated in log space.
fn scaled_moment(n: u32, c: f64, r_b: f64, r_a: f64, kappa: f64, mu: f64) -> Result<QuadResult> {
    if n > 0 && c == 0.0 {
        return Ok(QuadResult { value: 0.0, abs_err: 0.0, evaluations: 0, converged: true });
    }
    let sign = if c < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
    let lc = c.abs().ln();
    let lf = ln_factorial(n);
    let nf = n as f64;
    let r = z_integral(
        |z| {
            let pw = if n == 0 { 0.0 } else { nf * (lc + z.ln()) - lf };
            Ok(2.0 * (pw + ln_h(z, r_b, r_a, kappa, mu)?).exp())
        },
        &moment_config(),
    )?
    .into_result()?;
    Ok(QuadResult { value: sign * r.value, ..r })
}

/// g^(n) = 2^{n+1} / (n! kappa^n) int_0^inf z^n h(z) dz.
pub fn moment_gn(n: u32, r_b: f64, r_a: f64, kin: &Kinematics, ch: &Channel) -> Result<QuadResult> {
    check_radii(r_b, r_a)?;
    if n > MAX_MOMENT {
        return Err(Error::InvalidArgument(format!("moment order {n} exceeds {MAX_MOMENT}")));
    }
    let kappa = bound_kappa(kin)?;
    scaled_moment(n, 2.0 / kappa, r_b, r_a, kappa, ch.mu_hat)
}

struct BoundSetup {
    ch: Channel,
    kappa: f64,
    nu: f64,
    /// (r_b r_a)^{1 - D/2}
    radial_power: f64,
}

fn bound_setup(r_b: f64, r_a: f64, e: f64, l: u32, params: &SystemParams) -> Result<BoundSetup> {
    check_radii(r_b, r_a)?;
    let ch = make_channel(params, l)?;
    let kin = kinematics(params, e);
    let (kappa, nu) = kin.bound()?;
    let radial_power = (r_b * r_a).powf(1.0 - 0.5 * params.d());
    Ok(BoundSetup { ch, kappa, nu, radial_power })
}

fn check_series_validity(s: &BoundSetup) -> Result<()> {
    if s.nu >= s.ch.l_tilde + 1.0 {
        return Err(Error::ValidityViolation(format!(
            "nu = {} is not below l_tilde + 1 = {}",
            s.nu,
            s.ch.l_tilde + 1.0
        )));
    }
    Ok(())
}

/// Partial sums of the coupling series through `n_terms` terms.
pub fn green_series(
    r_b: f64,
    r_a: f64,
    e: f64,
    l: u32,
    params: &SystemParams,
    n_terms: usize,
) -> Result<(GreenValue, SeriesDiagnostics)> {
    const REL_TOL: f64 = 1e-10;
    let s = bound_setup(r_b, r_a, e, l, params)?;
    check_series_validity(&s)?;
    if n_terms == 0 || n_terms > MAX_MOMENT as usize + 1 {
        return Err(Error::InvalidArgument(format!("n_terms must be in 1..={}", MAX_MOMENT + 1)));
    }
    let mut terms = Vec::with_capacity(n_terms);
    let mut partial_sums = Vec::with_capacity(n_terms);
    let mut converged_at = None;
    let mut sum = 0.0;
    let mut quad_err = 0.0;
    for n in 0..n_terms {
        let t = scaled_moment(n as u32, 2.0 * s.nu, r_b, r_a, s.kappa, s.ch.mu_hat)?;
        sum += t.value;
        quad_err += t.abs_err;
        terms.push(t.value);
        partial_sums.push(sum);
        if converged_at.is_none() && n > 0 && t.value.abs() < REL_TOL * sum.abs() {
            converged_at = Some(n);
        }
    }
    let last = terms.last().copied().unwrap_or(0.0).abs();
    let value = s.radial_power * sum;
    let gv = GreenValue {
        value: Complex64::new(value, 0.0),
        route: Route::Series,
        err_est: s.radial_power * (quad_err + last),
        terms_used: Some(n_terms),
    };
    Ok((gv, SeriesDiagnostics { terms, partial_sums, converged_at, rel_tol: REL_TOL, quad_err }))
}

fn integral_route(s: &BoundSetup, r_b: f64, r_a: f64) -> Result<GreenValue> {
    let (kappa, mu, two_nu) = (s.kappa, s.ch.mu_hat, 2.0 * s.nu);
    let cfg = QuadConfig { rel_tol: 1e-11, abs_tol: 0.0, ..Default::default() };
    let r = z_integral(|z| Ok(2.0 * (two_nu * z + ln_h(z, r_b, r_a, kappa, mu)?).exp()), &cfg)?
        .into_result()?;
    Ok(GreenValue {
        value: Complex64::new(s.radial_power * r.value, 0.0),
        route: Route::Integral,
        err_est: s.radial_power * r.abs_err,
        terms_used: None,
    })
}

/// The resummed series as one integral, 2 int_0^inf e^{2 nu z} h(z) dz.
pub fn green_integral(r_b: f64, r_a: f64, e: f64, l: u32, params: &SystemParams) -> Result<GreenValue> {
    let s = bound_setup(r_b, r_a, e, l, params)?;
    check_series_validity(&s)?;
    integral_route(&s, r_b, r_a)
}

/// Everything in the closed form except Gamma(1/2 + mu_hat - nu).
fn closed_remainder(
    r_b: f64,
    r_a: f64,
    kappa: Complex64,
    nu: Complex64,
    mu_hat: f64,
    d: f64,
    w_tol: f64,
) -> Result<Complex64> {
    let (lo, hi) = if r_b < r_a { (r_b, r_a) } else { (r_a, r_b) };
    let mu = Complex64::new(mu_hat, 0.0);
    let budget = AccuracyBudget { rel_tol: w_tol, ..Default::default() };
    let w = whittaker_w_with(nu, mu, 2.0 * kappa * hi, &budget)?;
    let m = whittaker_m(nu, mu, 2.0 * kappa * lo)?;
    let pre = (r_b * r_a).powf(-0.5 * (d - 1.0)) / kappa * rgamma(Complex64::new(1.0 + 2.0 * mu_hat, 0.0));
    Ok(pre * w * m)
}

/// Distance from nu to the nearest pole position n_r + l_tilde + 1.
fn pole_distance(nu: f64, ch: &Channel) -> (f64, f64) {
    let x = nu - ch.l_tilde - 1.0;
    if x < -0.5 {
        return (f64::INFINITY, f64::NAN);
    }
    let k = x.round().max(0.0);
    ((x - k).abs(), k + ch.l_tilde + 1.0)
}

/// Whittaker closed form, valid for every nu off the poles.
pub fn green_closed(r_b: f64, r_a: f64, e: f64, l: u32, params: &SystemParams) -> Result<GreenValue> {
    let s = bound_setup(r_b, r_a, e, l, params)?;
    let (dist, n_eff) = pole_distance(s.nu, &s.ch);
    if dist < POLE_GUARD {
        return Err(Error::AtPole { nu: s.nu, n_eff });
    }
    let kappa = Complex64::new(s.kappa, 0.0);
    let nu = Complex64::new(s.nu, 0.0);
    let p = closed_remainder(r_b, r_a, kappa, nu, s.ch.mu_hat, params.d(), W_TOL)?;
    let g = log_gamma(Complex64::new(0.5 + s.ch.mu_hat - s.nu, 0.0))?.exp();
    let v = (g * p).re;
    if !v.is_finite() {
        return Err(Error::Overflow(format!("closed form at E = {e}")));
    }
    Ok(GreenValue {
        value: Complex64::new(v, 0.0),
        route: Route::Closed,
        err_est: CLOSED_ACCURACY * v.abs(),
        terms_used: None,
    })
}

/// kappa = sqrt(1 - E^2) on the principal sheet (Re kappa >= 0).
pub fn complex_kappa(e: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    ((one - e) * (one + e)).sqrt()
}

/// Closed form at complex energy, principal sheet.
pub fn green_closed_complex(
    r_b: f64,
    r_a: f64,
    e: Complex64,
    l: u32,
    params: &SystemParams,
) -> Result<Complex64> {
    check_radii(r_b, r_a)?;
    let ch = make_channel(params, l)?;
    let kappa = complex_kappa(e);
    if kappa.norm() == 0.0 {
        return Err(Error::ValidityViolation("threshold E = 1 has kappa = 0".into()));
    }
    let nu = params.alpha * e / kappa;
    let arg = Complex64::new(0.5 + ch.mu_hat, 0.0) - nu;
    let g = match log_gamma(arg) {
        Ok(v) => v.exp(),
        Err(Error::PoleOfGamma(_)) => {
            return Err(Error::AtPole { nu: nu.re, n_eff: 0.5 + ch.mu_hat - arg.re });
        }
        Err(err) => return Err(err),
    };
    Ok(g * closed_remainder(r_b, r_a, kappa, nu, ch.mu_hat, params.d(), W_TOL)?)
}
