//! Bound and continuum radial wavefunctions.
//!
//! Factorials of non-integer arguments are read as Gamma(x + 1). The bound
//! functions carry the r^{-(D-1)/2} measure outside, so they normalize as
//! int_0^inf R^2 dr = 1.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::green::disc_closed_signed;
use crate::model::{bound_energy_exact, make_channel, BoundState, Channel, SystemParams};
use crate::quad::{integrate_with, QuadConfig};
use crate::specfun::{kummer_m, log_gamma};

/// Upper limit of the normalization integral in units of a_H N.
pub const NORM_CUTOFF: f64 = 60.0;
/// Largest 2 k r accepted by the continuum functions.
pub const CONTINUUM_MAX_ARG: f64 = 60.0;

fn ln_gamma_re(x: f64) -> Result<f64> {
    Ok(log_gamma(Complex64::new(x, 0.0))?.re)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundWave {
    pub state: BoundState,
    pub channel: Channel,
    /// Prefactor in front of x^{l_tilde+1} e^{-x/2} M(-n_r, 2 l_tilde + 2; x).
    pub normalization_const: f64,
}

impl BoundWave {
    pub fn new(n: u32, l: u32, params: &SystemParams) -> Result<Self> {
        let state = bound_energy_exact(params, n, l)?;
        let channel = make_channel(params, l)?;
        let lt = channel.l_tilde;
        let big_n = state.n_eff;
        let ln_c = -big_n.ln() - 0.5 * state.bohr_mod.ln() - ln_gamma_re(2.0 * lt + 2.0)?
            + 0.5 * (ln_gamma_re(big_n + lt + 1.0)? - ln_gamma_re(state.n_r as f64 + 1.0)?);
        Ok(BoundWave { state, channel, normalization_const: ln_c.exp() })
    }

    /// The scaled radius 2 r / (a_H N).
    pub fn scaled_radius(&self, r: f64) -> f64 {
        2.0 * r / (self.state.bohr_mod * self.state.n_eff)
    }

    /// Length scale a_H N of the exponential fall-off.
    pub fn length_scale(&self) -> f64 {
        self.state.bohr_mod * self.state.n_eff
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::InvalidArgument(format!("r must be >= 0, got {r}")));
        }
        if r == 0.0 {
            return Ok(0.0);
        }
        let lt = self.channel.l_tilde;
        let x = self.scaled_radius(r);
        let b = Complex64::new(2.0 * lt + 2.0, 0.0);
        let poly = kummer_m(Complex64::new(-(self.state.n_r as f64), 0.0), b, Complex64::new(x, 0.0))?.re;
        Ok(self.normalization_const * ((lt + 1.0) * x.ln() - 0.5 * x).exp() * poly)
    }
}

/// R_nl(r) for a bound state.
pub fn bound_radial(n: u32, l: u32, params: &SystemParams, r: f64) -> Result<f64> {
    BoundWave::new(n, l, params)?.eval(r)
}

/// int_0^{c a_H N} R_nl^2 dr for a cutoff factor c.
pub fn bound_norm_integral(n: u32, l: u32, params: &SystemParams, cutoff: f64) -> Result<f64> {
    let w = BoundWave::new(n, l, params)?;
    let top = cutoff * w.length_scale();
    let cfg = QuadConfig { rel_tol: 1e-12, abs_tol: 0.0, ..Default::default() };
    // Break at the outermost lobes so the adaptive rule sees them early.
    let mid = (2.0 * (w.state.n_r as f64 + w.channel.l_tilde + 2.0)).min(cutoff) * w.length_scale();
    let a = integrate_with(|r| Ok(w.eval(r)?.powi(2)), 0.0, mid, &cfg)?.into_result()?;
    let b = integrate_with(|r| Ok(w.eval(r)?.powi(2)), mid, top, &cfg)?.into_result()?;
    Ok(a.value + b.value)
}

/// int R_nl^2 dr with the default cutoff of 60 a_H N. Beyond it the
/// integrand is below x^{2 n + 1} e^{-x} at x = 120, far under 1e-30.
pub fn bound_norm_check(n: u32, l: u32, params: &SystemParams) -> Result<f64> {
    bound_norm_integral(n, l, params, NORM_CUTOFF)
}

/// int R_nl R_n'l dr, reported rather than asserted: the levels solve an
/// energy-dependent problem and need not be orthogonal.
pub fn bound_overlap(n: u32, n2: u32, l: u32, params: &SystemParams) -> Result<f64> {
    let w1 = BoundWave::new(n, l, params)?;
    let w2 = BoundWave::new(n2, l, params)?;
    let top = NORM_CUTOFF * w1.length_scale().max(w2.length_scale());
    let cfg = QuadConfig { rel_tol: 1e-10, abs_tol: 1e-14, ..Default::default() };
    Ok(integrate_with(|r| Ok(w1.eval(r)? * w2.eval(r)?), 0.0, top, &cfg)?.into_result()?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuumWave {
    pub k_tilde: f64,
    pub nu_tilde: f64,
    pub channel: Channel,
    /// sqrt(1/2pi) (1 + k^2)^{-1/2} |Gamma(l_tilde + 1 - i nu)| e^{pi nu / 2} / Gamma(2 l_tilde + 2).
    pub amplitude_const: f64,
}

impl ContinuumWave {
    /// Continuum state of wavenumber k. Negative k is accepted and used by
    /// the completeness check; physical states have k > 0.
    pub fn signed(k: f64, l: u32, params: &SystemParams) -> Result<Self> {
        if !(k != 0.0 && k.is_finite()) {
            return Err(Error::InvalidArgument(format!("wavenumber must be nonzero, got {k}")));
        }
        let channel = make_channel(params, l)?;
        let e = k.hypot(1.0);
        let nu_tilde = params.alpha * e / k;
        let lt = channel.l_tilde;
        let ln_g = log_gamma(Complex64::new(lt + 1.0, -nu_tilde))?.re;
        let ln_amp = -0.5 * (2.0 * PI).ln() - 0.5 * (1.0 + k * k).ln() + ln_g + 0.5 * PI * nu_tilde
            - ln_gamma_re(2.0 * lt + 2.0)?;
        Ok(ContinuumWave { k_tilde: k, nu_tilde, channel, amplitude_const: ln_amp.exp() })
    }

    pub fn new(k: f64, l: u32, params: &SystemParams) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::InvalidArgument(format!("wavenumber must be positive, got {k}")));
        }
        Self::signed(k, l, params)
    }

    pub fn eval(&self, r: f64) -> Result<Complex64> {
        if !(r > 0.0) {
            return Err(Error::InvalidArgument(format!("r must be positive, got {r}")));
        }
        let k = self.k_tilde;
        if 2.0 * k.abs() * r > CONTINUUM_MAX_ARG {
            return Err(Error::InvalidArgument(format!(
                "2 k r = {} exceeds {CONTINUUM_MAX_ARG}",
                2.0 * k.abs() * r
            )));
        }
        let lt = self.channel.l_tilde;
        let i = Complex64::i();
        let z = -2.0 * i * k * r;
        let a = Complex64::new(lt + 1.0, -self.nu_tilde);
        let m = kummer_m(a, Complex64::new(2.0 * lt + 2.0, 0.0), z)?;
        let phase = (i * k * r + (lt + 1.0) * z.ln()).exp();
        Ok(self.amplitude_const * phase * m)
    }
}

/// R_kl(r), complex; the modulus does not depend on phase conventions.
pub fn continuum_radial(k_tilde: f64, l: u32, params: &SystemParams, r: f64) -> Result<Complex64> {
    ContinuumWave::new(k_tilde, l, params)?.eval(r)
}

/// Both sides of the spectral sum rule over a finite wavenumber window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompletenessReport {
    pub k_max: f64,
    /// int_1^{E_max} dE/2pi disc G over the window, disc in the printed closed form.
    pub energy_side: Complex64,
    /// -i (r_b r_a)^{-(D-1)/2} int_0^{k_max} dk E R_k(r_b) R_k*(r_a).
    pub wave_side_positive: Complex64,
    /// The same energy-side integrand written in k and taken over (-k_max, k_max).
    pub energy_side_signed: Complex64,
    /// Wave side over (-k_max, k_max).
    pub wave_side_signed: Complex64,
    pub positive_mismatch: f64,
    pub signed_mismatch: f64,
    /// |energy_side - wave_side_signed| / |wave_side_signed|: the printed
    /// statement taken literally, which counts each energy twice.
    pub double_cover_defect: f64,
    /// max(positive_mismatch, signed_mismatch).
    pub mismatch: f64,
}

fn rel_diff(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn k_window(f: impl FnMut(f64) -> Result<Complex64>, lo: f64, hi: f64) -> Result<Complex64> {
    let cfg = QuadConfig { rel_tol: 1e-10, abs_tol: 1e-13, max_depth: 40, max_intervals: 4000 };
    Ok(integrate_with(f, lo, hi, &cfg)?.into_result()?.value)
}

/// Compares the integrated discontinuity with the wavenumber integral of
/// continuum products over |k| <= k_max. Returns every partial result; the
/// headline figure is `mismatch`.
pub fn continuum_completeness(
    r_b: f64,
    r_a: f64,
    l: u32,
    params: &SystemParams,
    k_max: f64,
) -> Result<CompletenessReport> {
    if !(k_max > 0.0) {
        return Err(Error::InvalidArgument(format!("k_max must be positive, got {k_max}")));
    }
    let d = params.d();
    let pre = -Complex64::i() * (r_b * r_a).powf(-0.5 * (d - 1.0));
    let energy_integrand = |k: f64| -> Result<Complex64> {
        let e = k.hypot(1.0);
        Ok(k / e * disc_closed_signed(r_b, r_a, k, l, params)? / (2.0 * PI))
    };
    let wave_integrand = |k: f64| -> Result<Complex64> {
        let w = ContinuumWave::signed(k, l, params)?;
        Ok(pre * k.hypot(1.0) * w.eval(r_b)? * w.eval(r_a)?.conj())
    };
    let energy_pos = k_window(energy_integrand, 0.0, k_max)?;
    let energy_neg = k_window(energy_integrand, -k_max, 0.0)?;
    let wave_pos = k_window(wave_integrand, 0.0, k_max)?;
    let wave_neg = k_window(wave_integrand, -k_max, 0.0)?;
    let energy_side_signed = energy_pos + energy_neg;
    let wave_side_signed = wave_pos + wave_neg;
    let positive_mismatch = rel_diff(energy_pos, wave_pos);
    let signed_mismatch = rel_diff(energy_side_signed, wave_side_signed);
    Ok(CompletenessReport {
        k_max,
        energy_side: energy_pos,
        wave_side_positive: wave_pos,
        energy_side_signed,
        wave_side_signed,
        positive_mismatch,
        signed_mismatch,
        double_cover_defect: rel_diff(energy_pos, wave_side_signed),
        mismatch: positive_mismatch.max(signed_mismatch),
    })
}

/// Headline mismatch of [`continuum_completeness`].
pub fn continuum_completeness_check(
    r_b: f64,
    r_a: f64,
    l: u32,
    params: &SystemParams,
    k_max: f64,
) -> Result<f64> {
    Ok(continuum_completeness(r_b, r_a, l, params, k_max)?.mismatch)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(alpha: f64, d: u32) -> SystemParams {
        SystemParams::new(alpha, d).unwrap()
    }

    #[test]
    fn small_r_power_law() {
        let pp = p(0.3, 3);
        let w = BoundWave::new(2, 0, &pp).unwrap();
        let a = w.state.bohr_mod;
        let (r1, r2) = (1e-4 * a, 1e-3 * a);
        let slope = (w.eval(r2).unwrap().abs().ln() - w.eval(r1).unwrap().abs().ln()) / (r2 / r1).ln();
        assert!((slope - (w.channel.l_tilde + 1.0)).abs() < 1e-3, "{slope}");
    }

    #[test]
    fn node_count() {
        let pp = p(0.3, 3);
        let w = BoundWave::new(3, 0, &pp).unwrap();
        let top = 40.0 * w.length_scale();
        let mut nodes = 0;
        let mut prev = w.eval(1e-6).unwrap();
        for i in 1..=4000 {
            let v = w.eval(top * i as f64 / 4000.0).unwrap();
            if v.signum() != prev.signum() && v != 0.0 {
                nodes += 1;
            }
            prev = v;
        }
        assert_eq!(nodes, 2);
    }

    #[test]
    fn hydrogen_limit() {
        let alpha = 1e-4;
        let pp = p(alpha, 3);
        let w = BoundWave::new(1, 0, &pp).unwrap();
        let a = 1.0 / alpha;
        for x in [0.3, 1.0, 2.5] {
            let r = x * a;
            let hyd = 2.0 * a.powf(-1.5) * r * (-r / a).exp();
            let got = w.eval(r).unwrap();
            assert!((got - hyd).abs() < 1e-6 * hyd.abs(), "{x}: {got} {hyd}");
        }
    }

    #[test]
    fn normalization_examples() {
        let v = bound_norm_check(1, 0, &p(0.3, 3)).unwrap();
        assert!((v - 1.0).abs() < 1e-6, "{v}");
        let v = bound_norm_check(2, 1, &p(0.1, 5)).unwrap();
        assert!((v - 1.0).abs() < 1e-6, "{v}");
        let doubled = bound_norm_integral(2, 1, &p(0.1, 5), 2.0 * NORM_CUTOFF).unwrap();
        assert!((doubled - v).abs() < 1e-10);
    }

    #[test]
    fn continuum_free_limit() {
        let pp = p(1e-5, 3);
        let k = 0.8;
        let ratio = |r: f64| {
            let x = k * r;
            let j1 = x.sin() / (x * x) - x.cos() / x;
            continuum_radial(k, 1, &pp, r).unwrap().norm() / (x * j1).abs()
        };
        let c0 = ratio(0.7);
        for r in [1.3, 2.9, 4.4] {
            assert!((ratio(r) / c0 - 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn continuum_small_r_and_nu() {
        let pp = p(0.1, 3);
        let w = ContinuumWave::new(1.5, 0, &pp).unwrap();
        let (r1, r2) = (1e-5, 1e-4);
        let slope = (w.eval(r2).unwrap().norm() / w.eval(r1).unwrap().norm()).ln() / 10f64.ln();
        assert!((slope - (w.channel.l_tilde + 1.0)).abs() < 1e-3);
        let e1 = 1.0 + 0.2;
        let e2 = 1.0 + 0.4;
        for e in [e1, e2] {
            let k = (e * e - 1.0f64).sqrt();
            let w = ContinuumWave::new(k, 0, &pp).unwrap();
            assert!((w.nu_tilde - 0.1 * e / k).abs() < 1e-12);
        }
    }

    #[test]
    fn continuum_range_enforced() {
        assert!(continuum_radial(10.0, 0, &p(0.1, 3), 4.0).is_err());
    }

    #[test]
    fn completeness_documented_point() {
        let pp = p(0.1, 3);
        let rep = continuum_completeness(2.0, 1.0, 0, &pp, 10.0).unwrap();
        assert!(rep.mismatch <= 1e-4, "{rep:?}");
        // Taken literally, the full k line counts each energy twice.
        assert!(rep.double_cover_defect > 1e-2);
        let wider = continuum_completeness(2.0, 1.0, 0, &pp, 14.0).unwrap();
        assert!(wider.mismatch <= 1e-4);
    }

    #[test]
    fn coincident_spectral_density_nonnegative() {
        let pp = p(0.1, 3);
        for k in [0.05, 0.7, 3.0, 9.0] {
            let w = ContinuumWave::new(k, 0, &pp).unwrap();
            let v = w.eval(1.5).unwrap() * w.eval(1.5).unwrap().conj();
            assert!(v.im.abs() <= 1e-15 * v.re.abs() && v.re >= 0.0);
        }
    }
}
