//! Jump of G_l across the scattering cut E > 1.
//!
//! Route (a) differences the closed form on the physical sheet just above
//! and below the cut. Route (b) is the printed closed expression in terms
//! of two regular Whittaker functions. The two differ by an overall sign:
//! route (b) equals G(E - i0) - G(E + i0) on the physical sheet. Both are
//! returned together with the sign-flipped comparison.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::green_closed_complex;
use crate::error::{Error, Result};
use crate::model::{kinematics, make_channel, SystemParams};
use crate::specfun::{log_gamma, whittaker_m};

/// Distance from the cut for route (a), in units of the rest energy.
pub const DISC_ETA: f64 = 1e-6;
const LINEARITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscResult {
    pub energy: f64,
    /// lim G(E + i eta) - G(E - i eta), extrapolated to eta = 0.
    pub route_a: Complex64,
    /// The closed expression.
    pub route_b: Complex64,
    /// |a - b| / |b|.
    pub rel_diff: f64,
    /// |a + b| / |b|: agreement up to the overall sign.
    pub rel_diff_sign_flipped: f64,
    pub eta: f64,
    /// Relative spread of the two eta extrapolations.
    pub extrapolation_spread: f64,
}

/// Closed-form discontinuity for a signed wavenumber k (E = sqrt(1 + k^2)).
/// Negative k continues the expression to the other half of the k line.
pub fn disc_closed_signed(r_b: f64, r_a: f64, k: f64, l: u32, params: &SystemParams) -> Result<Complex64> {
    if !(k != 0.0 && k.is_finite()) {
        return Err(Error::InvalidArgument(format!("wavenumber must be nonzero, got {k}")));
    }
    let ch = make_channel(params, l)?;
    let lt = ch.l_tilde;
    let e = k.hypot(1.0);
    let nu = params.alpha * e / k;
    let i = Complex64::i();
    let ln_mod = 2.0 * log_gamma(Complex64::new(lt + 1.0, -nu))?.re - 2.0 * log_gamma(Complex64::new(2.0 * lt + 2.0, 0.0))?.re
        + PI * nu;
    let mu = Complex64::new(lt + 0.5, 0.0);
    let mb = whittaker_m(-i * nu, mu, 2.0 * i * k * r_b)?;
    let ma = whittaker_m(i * nu, mu, -2.0 * i * k * r_a)?;
    let pre = (r_b * r_a).powf(-0.5 * (params.d() - 1.0)) / k * ln_mod.exp();
    Ok(-i * pre * mb * ma)
}

/// Both discontinuity routes at a real energy above threshold.
pub fn discontinuity(r_b: f64, r_a: f64, e: f64, l: u32, params: &SystemParams) -> Result<DiscResult> {
    let (k, _) = kinematics(params, e).scattering()?;
    let jump = |eta: f64| -> Result<Complex64> {
        let up = green_closed_complex(r_b, r_a, Complex64::new(e, eta), l, params)?;
        let down = green_closed_complex(r_b, r_a, Complex64::new(e, -eta), l, params)?;
        Ok(up - down)
    };
    let (j0, j1, j2) = (jump(DISC_ETA)?, jump(0.5 * DISC_ETA)?, jump(0.25 * DISC_ETA)?);
    // Linear in eta: halving pairs give two independent limits.
    let a1 = 2.0 * j1 - j0;
    let a2 = 2.0 * j2 - j1;
    let spread = (a1 - a2).norm() / a2.norm();
    if !(spread <= LINEARITY_TOL) {
        return Err(Error::BranchError(format!(
            "eta extrapolation is not linear at E = {e}: spread {spread:e}"
        )));
    }
    let b = disc_closed_signed(r_b, r_a, k, l, params)?;
    Ok(DiscResult {
        energy: e,
        route_a: a2,
        route_b: b,
        rel_diff: (a2 - b).norm() / b.norm(),
        rel_diff_sign_flipped: (a2 + b).norm() / b.norm(),
        eta: DISC_ETA,
        extrapolation_spread: spread,
    })
}

/// G(E + i0) - G(E - i0) for the free s-wave in three dimensions,
/// 4 i sin(k r_b) sin(k r_a) / (k r_b r_a).
pub fn free_disc_s_wave(r_b: f64, r_a: f64, e: f64) -> Complex64 {
    let k = ((e - 1.0) * (e + 1.0)).sqrt();
    Complex64::new(0.0, 4.0 * (k * r_b).sin() * (k * r_a).sin() / (k * r_b * r_a))
}
