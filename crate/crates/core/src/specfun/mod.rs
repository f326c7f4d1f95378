//! Special functions: gamma, modified Bessel, Kummer and Whittaker.

pub mod bessel;
mod dd;
pub mod gamma;
pub mod kummer;
mod sum;
pub mod whittaker;

use serde::{Deserialize, Serialize};

pub use bessel::{
    bessel_i, bessel_i_scaled, bessel_k, bessel_k_scaled, ln_bessel_i, ln_bessel_k,
};
pub use gamma::{gamma, gamma_abs_sq, gamma_real, ln_gamma_abs, log_gamma, rgamma, rgamma_real};
pub use kummer::{kummer_m, kummer_m_integral, kummer_m_with};
pub use whittaker::{whittaker_m, whittaker_m_polar, whittaker_w, whittaker_w_polar, whittaker_w_with};

pub type ComplexVal = num_complex::Complex64;

/// Accuracy target and term cap for series-based evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracyBudget {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for AccuracyBudget {
    fn default() -> Self {
        AccuracyBudget { rel_tol: 1e-10, max_terms: 500 }
    }
}
