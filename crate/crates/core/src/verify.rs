//! Randomized checks of the integral identities and Whittaker relations the
//! Green's function rests on.
//!
//! Samples are drawn up front from a seeded ChaCha8 stream, evaluated in
//! parallel and reduced in sample order, so a seed fixes the report bit for
//! bit.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::green::{g0_zint_with, ln_h, ln_i_minus_x, z_integral};
use crate::model::{Channel, Kinematics, Regime};
use crate::quad::{integrate_tail_with, QuadConfig};
use crate::specfun::{
    bessel_i_scaled, bessel_k_scaled, gamma, kummer_m_integral, log_gamma, rgamma, whittaker_m,
    whittaker_m_polar, whittaker_w, whittaker_w_polar,
};

/// Default pass threshold on the worst relative error.
pub const SUITE_TOLERANCE: f64 = 1e-8;
/// Threshold for the pseudotime kernel, where both sides are quadratures.
pub const KERNEL_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IdentityId {
    /// Pseudotime integral of the free kernel against its z-representation.
    PseudotimeKernel,
    /// Laplace-type integral of e^{2 nu y} I_mu over sinh y, against W M.
    WhittakerProductIntegral,
    /// dy/y Laplace integral of I_nu(2ab/y), against 2 I K.
    BesselProductIntegral,
    /// Gaussian-weighted product of two I_nu, against one I_nu.
    GaussianBesselProduct,
    /// M_{lambda,mu} in terms of Kummer's M.
    WhittakerKummer,
    /// M_{kappa,mu}(z) against M_{-kappa,mu}(-z).
    WhittakerMCircuit,
    /// W_{lambda,mu}(z) through M_{lambda,mu}(z) and W_{-lambda,mu}(e^{-i pi} z).
    WhittakerWConnection,
}

impl IdentityId {
    pub const ALL: [IdentityId; 7] = [
        IdentityId::PseudotimeKernel,
        IdentityId::WhittakerProductIntegral,
        IdentityId::BesselProductIntegral,
        IdentityId::GaussianBesselProduct,
        IdentityId::WhittakerKummer,
        IdentityId::WhittakerMCircuit,
        IdentityId::WhittakerWConnection,
    ];
}

/// The sample that produced the worst error, enough to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstSample {
    pub index: usize,
    pub params: Vec<f64>,
    /// The evaluation error, if the sample failed outright.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity_id: IdentityId,
    pub samples: usize,
    pub worst_rel_err: f64,
    pub worst_sample: Option<WorstSample>,
    pub param_names: Vec<String>,
    pub tolerance: f64,
    /// Samples whose evaluation returned an error; each counts as a failure.
    pub failures: usize,
    pub passed: bool,
}

/// A closed interval to sample uniformly from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval(pub f64, pub f64);

impl Interval {
    fn draw(self, rng: &mut ChaCha8Rng) -> f64 {
        rng.gen_range(self.0..=self.1)
    }
}

/// Sampling boxes; all special-function arguments stay in tested ranges.
pub mod boxes {
    use super::Interval;

    pub const KERNEL_KAPPA: Interval = Interval(0.3, 1.0);
    pub const KERNEL_R: Interval = Interval(0.5, 3.0);
    pub const KERNEL_MU: Interval = Interval(0.2, 1.5);
    /// Radii closer than this make the small-S side decay only algebraically.
    pub const KERNEL_MIN_GAP: f64 = 0.2;

    pub const WPI_MU: Interval = Interval(0.2, 2.0);
    /// Lower end of nu; the upper end is (1 + mu)/2 - WPI_NU_MARGIN.
    pub const WPI_NU_MIN: f64 = -1.0;
    pub const WPI_NU_MARGIN: f64 = 0.1;
    pub const WPI_T: Interval = Interval(0.5, 3.0);
    pub const WPI_ZETA_A: Interval = Interval(0.3, 1.0);
    pub const WPI_ZETA_B: Interval = Interval(1.2, 3.0);

    pub const BPI_A: Interval = Interval(0.3, 1.0);
    pub const BPI_B: Interval = Interval(1.2, 3.0);
    pub const BPI_Z: Interval = Interval(0.5, 4.0);
    pub const BPI_NU: Interval = Interval(0.2, 2.0);

    pub const GBP_A: Interval = Interval(0.5, 2.0);
    pub const GBP_ARG: Interval = Interval(0.2, 1.5);
    pub const GBP_NU: Interval = Interval(0.2, 2.0);

    pub const WH_LAMBDA_RE: Interval = Interval(-0.5, 0.5);
    pub const WH_LAMBDA_IM: Interval = Interval(-1.0, 1.0);
    pub const WH_MU: Interval = Interval(0.1, 1.4);
    /// Minimum distance of 2 mu from an integer.
    pub const WH_MU_GAP: f64 = 0.05;
    pub const WH_ABS_Z: Interval = Interval(0.5, 5.0);
    /// Keeps Im z away from zero in the circuit relation.
    pub const WH_ARG_EDGE: f64 = 0.05;
}

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

fn rel_err_c(got: Complex64, want: Complex64) -> f64 {
    (got - want).norm() / want.norm()
}

fn report<F>(
    id: IdentityId,
    tolerance: f64,
    names: &[&str],
    draws: Vec<Vec<f64>>,
    eval: F,
) -> IdentityReport
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let results: Vec<Result<f64>> = draws.par_iter().map(|p| eval(p)).collect();
    let mut worst = 0.0f64;
    let mut worst_sample = None;
    let mut failures = 0;
    for (index, (p, r)) in draws.iter().zip(&results).enumerate() {
        let (err, msg) = match r {
            Ok(e) if e.is_finite() => (*e, None),
            Ok(e) => (f64::INFINITY, Some(format!("non-finite error {e}"))),
            Err(e) => (f64::INFINITY, Some(e.to_string())),
        };
        if msg.is_some() {
            failures += 1;
        }
        if worst_sample.is_none() || err > worst {
            worst = err;
            worst_sample = Some(WorstSample { index, params: p.clone(), error: msg });
        }
    }
    IdentityReport {
        identity_id: id,
        samples: draws.len(),
        worst_rel_err: worst,
        worst_sample,
        param_names: names.iter().map(|s| s.to_string()).collect(),
        tolerance,
        failures,
        passed: failures == 0 && worst <= tolerance,
    }
}

fn quad_cfg() -> QuadConfig {
    QuadConfig { rel_tol: 1e-12, abs_tol: 0.0, ..Default::default() }
}

/// int_0^inf dy/y e^{-p y - q/y} I_nu(c/y) for q >= c > 0, split at y = 1
/// with y = 1/u on the inner part.
pub fn bessel_laplace(p: f64, q: f64, c: f64, nu: f64) -> Result<f64> {
    if !(p > 0.0 && c > 0.0 && q >= c) {
        return Err(Error::InvalidArgument(format!("need p > 0 and q >= c > 0: {p}, {q}, {c}")));
    }
    let g = |y: f64| -> Result<f64> {
        let x = c / y;
        if x == 0.0 {
            return Ok(0.0);
        }
        Ok((-p * y - (q - c) / y + ln_i_minus_x(nu, x)?).exp())
    };
    let cfg = quad_cfg();
    let outer = integrate_tail_with(|y| Ok(g(y)? / y), 1.0, &cfg)?.into_result()?;
    let inner = integrate_tail_with(|u| Ok(g(1.0 / u)? / u), 1.0, &cfg)?.into_result()?;
    Ok(outer.value + inner.value)
}

/// 2 I_nu(x) K_nu(y) for x <= y, overflow-free.
fn two_i_k(nu: f64, x: f64, y: f64) -> Result<f64> {
    Ok(2.0 * bessel_i_scaled(nu, x)? * bessel_k_scaled(nu, y)? * (x - y).exp())
}

/// Pseudotime integral int dS/S e^{-kappa^2 S/2} e^{-(r_b^2 + r_a^2)/2S} I_mu(r_b r_a / S).
pub fn pseudotime_lhs(kappa: f64, r_b: f64, r_a: f64, mu: f64) -> Result<f64> {
    bessel_laplace(0.5 * kappa * kappa, 0.5 * (r_b * r_b + r_a * r_a), r_b * r_a, mu)
}

/// Its z-representation 2 int_0^inf h(z) dz, whose Bessel order is 2 mu.
pub fn pseudotime_rhs(kappa: f64, r_b: f64, r_a: f64, mu: f64) -> Result<f64> {
    let kin = Kinematics {
        energy: (1.0 - kappa * kappa).sqrt(),
        kappa: Some(kappa),
        nu: Some(0.0),
        k_tilde: None,
        nu_tilde: None,
        regime: Regime::Bound,
    };
    let ch = Channel { l: 0, lam: mu, mu_hat: mu, l_tilde: mu - 0.5 };
    Ok(g0_zint_with(r_b, r_a, &kin, &ch, &quad_cfg())?.value)
}

pub fn check_pseudotime_kernel(sample_count: usize, seed: u64) -> IdentityReport {
    use boxes::*;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(sample_count);
    while draws.len() < sample_count {
        let kappa = KERNEL_KAPPA.draw(&mut rng);
        let (r1, r2) = (KERNEL_R.draw(&mut rng), KERNEL_R.draw(&mut rng));
        let mu = KERNEL_MU.draw(&mut rng);
        if (r1 - r2).abs() < KERNEL_MIN_GAP {
            continue;
        }
        draws.push(vec![kappa, r1.max(r2), r1.min(r2), mu]);
    }
    report(IdentityId::PseudotimeKernel, KERNEL_TOLERANCE, &["kappa", "r_b", "r_a", "mu"], draws, |p| {
        let lhs = pseudotime_lhs(p[0], p[1], p[2], p[3])?;
        let rhs = pseudotime_rhs(p[0], p[1], p[2], p[3])?;
        let bessel = two_i_k(p[3], p[0] * p[2], p[0] * p[1])?;
        Ok(rel_err(lhs, rhs).max(rel_err(rhs, bessel)))
    })
}

/// int_0^inf dy e^{2 nu y}/sinh y exp(-t (za + zb) coth y / 2) I_mu(t sqrt(za zb)/sinh y).
pub fn whittaker_product_lhs(nu: f64, mu: f64, t: f64, zeta_a: f64, zeta_b: f64) -> Result<f64> {
    // Same integrand as h(z) with kappa -> t/2 and Bessel order mu = 2 (mu/2).
    let r = z_integral(|y| Ok((2.0 * nu * y + ln_h(y, zeta_b, zeta_a, 0.5 * t, 0.5 * mu)?).exp()), &quad_cfg())?;
    Ok(r.into_result()?.value)
}

/// Gamma((1+mu)/2 - nu) / (t sqrt(za zb) Gamma(mu+1)) W_{nu,mu/2}(t zb) M_{nu,mu/2}(t za).
pub fn whittaker_product_rhs(nu: f64, mu: f64, t: f64, zeta_a: f64, zeta_b: f64) -> Result<f64> {
    let c = |x: f64| Complex64::new(x, 0.0);
    let g = gamma(c(0.5 * (1.0 + mu) - nu))? * rgamma(c(mu + 1.0));
    let w = whittaker_w(c(nu), c(0.5 * mu), c(t * zeta_b))?;
    let m = whittaker_m(c(nu), c(0.5 * mu), c(t * zeta_a))?;
    Ok((g * w * m).re / (t * (zeta_a * zeta_b).sqrt()))
}

pub fn check_whittaker_product_integral(sample_count: usize, seed: u64) -> IdentityReport {
    use boxes::*;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<Vec<f64>> = (0..sample_count)
        .map(|_| {
            let mu = WPI_MU.draw(&mut rng);
            let nu = Interval(WPI_NU_MIN, 0.5 * (1.0 + mu) - WPI_NU_MARGIN).draw(&mut rng);
            let t = WPI_T.draw(&mut rng);
            let za = WPI_ZETA_A.draw(&mut rng);
            let zb = WPI_ZETA_B.draw(&mut rng);
            vec![nu, mu, t, za, zb]
        })
        .collect();
    report(
        IdentityId::WhittakerProductIntegral,
        SUITE_TOLERANCE,
        &["nu", "mu", "t", "zeta_a", "zeta_b"],
        draws,
        |p| {
            let lhs = whittaker_product_lhs(p[0], p[1], p[2], p[3], p[4])?;
            Ok(rel_err(lhs, whittaker_product_rhs(p[0], p[1], p[2], p[3], p[4])?))
        },
    )
}

/// int_0^inf dy/y e^{-z y} e^{-(a^2 + b^2)/y} I_nu(2ab/y).
pub fn bessel_product_lhs(a: f64, b: f64, z: f64, nu: f64) -> Result<f64> {
    bessel_laplace(z, a * a + b * b, 2.0 * a * b, nu)
}

/// 2 I_nu(2a sqrt z) K_nu(2b sqrt z).
pub fn bessel_product_rhs(a: f64, b: f64, z: f64, nu: f64) -> Result<f64> {
    two_i_k(nu, 2.0 * a * z.sqrt(), 2.0 * b * z.sqrt())
}

pub fn check_bessel_product_integral(sample_count: usize, seed: u64) -> IdentityReport {
    use boxes::*;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<Vec<f64>> = (0..sample_count)
        .map(|_| {
            let a = BPI_A.draw(&mut rng);
            let b = BPI_B.draw(&mut rng);
            let z = BPI_Z.draw(&mut rng);
            let nu = BPI_NU.draw(&mut rng);
            vec![a, b, z, nu]
        })
        .collect();
    report(IdentityId::BesselProductIntegral, SUITE_TOLERANCE, &["a", "b", "z", "nu"], draws, |p| {
        Ok(rel_err(bessel_product_lhs(p[0], p[1], p[2], p[3])?, bessel_product_rhs(p[0], p[1], p[2], p[3])?))
    })
}

/// int_0^inf dr r e^{-r^2/a} I_nu(s r) I_nu(x r).
pub fn gaussian_bessel_lhs(a: f64, s: f64, x: f64, nu: f64) -> Result<f64> {
    let f = |r: f64| -> Result<f64> {
        if r == 0.0 {
            return Ok(0.0);
        }
        let e = r.ln() - r * r / a + ln_i_minus_x(nu, s * r)? + s * r + ln_i_minus_x(nu, x * r)? + x * r;
        Ok(e.exp())
    };
    Ok(integrate_tail_with(f, 0.0, &quad_cfg())?.into_result()?.value)
}

/// (a/2) e^{a (x^2 + s^2)/4} I_nu(a x s / 2).
pub fn gaussian_bessel_rhs(a: f64, s: f64, x: f64, nu: f64) -> Result<f64> {
    let arg = 0.5 * a * x * s;
    Ok(0.5 * a * (0.25 * a * (x * x + s * s) + ln_i_minus_x(nu, arg)? + arg).exp())
}

pub fn check_gaussian_bessel_product(sample_count: usize, seed: u64) -> IdentityReport {
    use boxes::*;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<Vec<f64>> = (0..sample_count)
        .map(|_| {
            let a = GBP_A.draw(&mut rng);
            let s = GBP_ARG.draw(&mut rng);
            let x = GBP_ARG.draw(&mut rng);
            let nu = GBP_NU.draw(&mut rng);
            vec![a, s, x, nu]
        })
        .collect();
    report(IdentityId::GaussianBesselProduct, SUITE_TOLERANCE, &["a", "s", "x", "nu"], draws, |p| {
        Ok(rel_err(gaussian_bessel_lhs(p[0], p[1], p[2], p[3])?, gaussian_bessel_rhs(p[0], p[1], p[2], p[3])?))
    })
}

/// Residual of M_{l,m}(z) = z^{m+1/2} e^{-z/2} M(m - l + 1/2, 2m + 1; z) with
/// the right side from the Euler integral.
pub fn whittaker_kummer_residual(lambda: Complex64, mu: f64, z: Complex64) -> Result<f64> {
    let m = Complex64::new(mu, 0.0);
    let lhs = whittaker_m(lambda, m, z)?;
    let k = kummer_m_integral(m - lambda + 0.5, 2.0 * m + 1.0, z)?;
    let rhs = ((m + 0.5) * z.ln() - 0.5 * z).exp() * k;
    Ok(rel_err_c(lhs, rhs))
}

/// Phase e^{+-i pi (2 mu + 1)/2}, + for Im z > 0 and - for Im z < 0.
pub fn circuit_phase(mu: f64, im_z: f64) -> Complex64 {
    let s = if im_z > 0.0 { 1.0 } else { -1.0 };
    Complex64::from_polar(1.0, s * PI * (mu + 0.5))
}

/// Residual of M_{k,m}(z) = e^{+-i pi (2m+1)/2} M_{-k,m}(-z).
pub fn whittaker_circuit_residual(kap: Complex64, mu: f64, z: Complex64) -> Result<f64> {
    let m = Complex64::new(mu, 0.0);
    let lhs = whittaker_m(kap, m, z)?;
    let rhs = circuit_phase(mu, z.im) * whittaker_m(-kap, m, -z)?;
    Ok(rel_err_c(rhs, lhs))
}

/// Residual of the connection relation for W at z = r e^{i theta}, with
/// theta in (-pi/2, 3pi/2). Inside (0, pi) every function is principal;
/// outside, M and W are continued along the circle.
pub fn whittaker_connection_residual(lambda: Complex64, mu: f64, r: f64, theta: f64) -> Result<f64> {
    if !(theta > -0.5 * PI && theta < 1.5 * PI) {
        return Err(Error::InvalidArgument(format!("arg z = {theta} outside (-pi/2, 3pi/2)")));
    }
    let m = Complex64::new(mu, 0.0);
    let i = Complex64::i();
    let principal = theta > 0.0 && theta < PI;
    let z = Complex64::from_polar(r, theta);
    let (w_lhs, m_z, w_rot) = if principal {
        (
            whittaker_w(lambda, m, z)?,
            whittaker_m(lambda, m, z)?,
            whittaker_w(-lambda, m, Complex64::from_polar(r, theta - PI))?,
        )
    } else {
        (
            whittaker_w_polar(lambda, m, r, theta)?,
            whittaker_m_polar(lambda, m, r, theta)?,
            whittaker_w_polar(-lambda, m, r, theta - PI)?,
        )
    };
    let g = |x: Complex64| -> Result<Complex64> { Ok(log_gamma(x)?.exp()) };
    let two_mu_1 = 2.0 * m + 1.0;
    let pre = (i * PI * lambda).exp() * (-i * PI * (m + 0.5)).exp() * g(m + lambda + 0.5)? / g(two_mu_1)?;
    let inner = m_z - g(two_mu_1)? * rgamma(m - lambda + 0.5) * (-i * PI * lambda).exp() * w_rot;
    Ok(rel_err_c(pre * inner, w_lhs))
}

fn draw_mu(rng: &mut ChaCha8Rng) -> f64 {
    use boxes::*;
    loop {
        let mu = WH_MU.draw(rng);
        let two = 2.0 * mu;
        if (two - two.round()).abs() >= WH_MU_GAP {
            return mu;
        }
    }
}

/// The three Whittaker relations, one report each.
pub fn check_whittaker_relations(sample_count: usize, seed: u64) -> Vec<IdentityReport> {
    use boxes::*;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = ["lambda_re", "lambda_im", "mu", "abs_z", "arg_z"];
    let mut kummer = Vec::with_capacity(sample_count);
    let mut circuit = Vec::with_capacity(sample_count);
    let mut connection = Vec::with_capacity(sample_count);
    for _ in 0..sample_count {
        let lr = WH_LAMBDA_RE.draw(&mut rng);
        let li = WH_LAMBDA_IM.draw(&mut rng);
        let mu = draw_mu(&mut rng);
        let r = WH_ABS_Z.draw(&mut rng);
        let th = Interval(-0.9 * PI, 0.9 * PI).draw(&mut rng);
        kummer.push(vec![lr, li, mu, r, th]);

        let lr = WH_LAMBDA_RE.draw(&mut rng);
        let li = WH_LAMBDA_IM.draw(&mut rng);
        let mu = draw_mu(&mut rng);
        let r = WH_ABS_Z.draw(&mut rng);
        let mut th = Interval(WH_ARG_EDGE, PI - WH_ARG_EDGE).draw(&mut rng);
        if rng.gen_bool(0.5) {
            th = -th;
        }
        circuit.push(vec![lr, li, mu, r, th]);

        let lr = WH_LAMBDA_RE.draw(&mut rng);
        let li = WH_LAMBDA_IM.draw(&mut rng);
        let mu = draw_mu(&mut rng);
        let r = WH_ABS_Z.draw(&mut rng);
        let th = Interval(-0.5 * PI + WH_ARG_EDGE, 1.5 * PI - WH_ARG_EDGE).draw(&mut rng);
        connection.push(vec![lr, li, mu, r, th]);
    }
    let lam = |p: &[f64]| Complex64::new(p[0], p[1]);
    vec![
        report(IdentityId::WhittakerKummer, SUITE_TOLERANCE, &names, kummer, |p| {
            whittaker_kummer_residual(lam(p), p[2], Complex64::from_polar(p[3], p[4]))
        }),
        report(IdentityId::WhittakerMCircuit, SUITE_TOLERANCE, &names, circuit, |p| {
            whittaker_circuit_residual(lam(p), p[2], Complex64::from_polar(p[3], p[4]))
        }),
        report(IdentityId::WhittakerWConnection, SUITE_TOLERANCE, &names, connection, |p| {
            whittaker_connection_residual(lam(p), p[2], p[3], p[4])
        }),
    ]
}

/// Every identity with `sample_count` samples. Each check gets its own
/// stream derived from `seed`, so reports do not depend on each other.
pub fn run_identity_suite(sample_count: usize, seed: u64) -> Vec<IdentityReport> {
    let sub = |k: u64| seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k);
    let mut out = vec![
        check_pseudotime_kernel(sample_count, sub(1)),
        check_whittaker_product_integral(sample_count, sub(2)),
        check_bessel_product_integral(sample_count, sub(3)),
        check_gaussian_bessel_product(sample_count, sub(4)),
    ];
    out.extend(check_whittaker_relations(sample_count, sub(5)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{bessel_i, bessel_k};

    #[test]
    fn zero_nu_reduces_to_bessel() {
        let (mu, t, za, zb) = (0.7, 1.3, 0.6, 2.1);
        let rhs = whittaker_product_rhs(0.0, mu, t, za, zb).unwrap();
        // W_{0,m}(2x) = sqrt(2x/pi) K_m(x), M_{0,m}(2x) = Gamma(1+m) 4^m sqrt(2x) I_m(x).
        let m = 0.5 * mu;
        let (xb, xa) = (0.5 * t * zb, 0.5 * t * za);
        let g = |x: f64| gamma(Complex64::new(x, 0.0)).unwrap().re;
        let w = (2.0 * xb / PI).sqrt() * bessel_k(m, xb).unwrap();
        let mm = g(1.0 + m) * 4f64.powf(m) * (2.0 * xa).sqrt() * bessel_i(m, xa).unwrap();
        let want = g(0.5 * (1.0 + mu)) / (t * (za * zb).sqrt() * g(mu + 1.0)) * w * mm;
        assert!(rel_err(rhs, want) < 1e-12);
        let lhs = whittaker_product_lhs(0.0, mu, t, za, zb).unwrap();
        assert!(rel_err(lhs, want) < 1e-9);
    }

    #[test]
    fn product_integral_near_validity_edge() {
        let (mu, t, za, zb) = (0.8, 1.0, 0.5, 1.5);
        let mut prev = 0.0;
        for margin in [0.3, 0.1, 0.05] {
            let nu = 0.5 * (1.0 + mu) - margin;
            let lhs = whittaker_product_lhs(nu, mu, t, za, zb).unwrap();
            let rhs = whittaker_product_rhs(nu, mu, t, za, zb).unwrap();
            assert!(lhs > prev);
            assert!(rel_err(lhs, rhs) < 1e-8, "{margin}: {lhs} {rhs}");
            prev = lhs;
        }
    }

    #[test]
    fn half_order_bessel_product() {
        let (a, b, z): (f64, f64, f64) = (0.6, 1.7, 1.4);
        let (x, y) = (2.0 * a * z.sqrt(), 2.0 * b * z.sqrt());
        let want = 2.0 * x.sinh() * (-y).exp() / (x * y).sqrt();
        assert!(rel_err(bessel_product_rhs(a, b, z, 0.5).unwrap(), want) < 1e-12);
        assert!(rel_err(bessel_product_lhs(a, b, z, 0.5).unwrap(), want) < 1e-10);
    }

    #[test]
    fn bessel_product_near_edge() {
        let (b, z, nu) = (1.2, 0.8, 0.9);
        let a = b - 0.05;
        let l = bessel_product_lhs(a, b, z, nu).unwrap();
        assert!(rel_err(l, bessel_product_rhs(a, b, z, nu).unwrap()) < 1e-8);
    }

    #[test]
    fn gaussian_small_argument_scaling() {
        let (a, x, nu) = (1.3, 0.9, 0.7);
        let r1 = gaussian_bessel_lhs(a, 1e-3, x, nu).unwrap();
        let r2 = gaussian_bessel_lhs(a, 2e-3, x, nu).unwrap();
        assert!((r2 / r1 / 2f64.powf(nu) - 1.0).abs() < 1e-5);
        // Half order: I_{1/2}(x) = sqrt(2/(pi x)) sinh x.
        let (s, x) = (0.4, 1.1);
        let arg = 0.5 * a * x * s;
        let want = 0.5 * a * (0.25 * a * (x * x + s * s)).exp() * (2.0 / (PI * arg)).sqrt() * arg.sinh();
        assert!(rel_err(gaussian_bessel_rhs(a, s, x, 0.5).unwrap(), want) < 1e-12);
        assert!(rel_err(gaussian_bessel_lhs(a, s, x, 0.5).unwrap(), want) < 1e-10);
    }

    #[test]
    fn kernel_triple_agreement_and_order_doubling() {
        let (kappa, rb, ra, mu) = (0.6, 2.0, 1.0, 0.4);
        let lhs = pseudotime_lhs(kappa, rb, ra, mu).unwrap();
        let rhs = pseudotime_rhs(kappa, rb, ra, mu).unwrap();
        let bes = two_i_k(mu, kappa * ra, kappa * rb).unwrap();
        assert!(rel_err(lhs, bes) < 1e-9 && rel_err(rhs, bes) < 1e-9);
        // Using the same Bessel order on both sides breaks the equality.
        let wrong = pseudotime_lhs(kappa, rb, ra, 2.0 * mu).unwrap();
        assert!(rel_err(wrong, rhs) > 1e-2);
    }

    #[test]
    fn whittaker_examples() {
        let r = whittaker_kummer_residual(Complex64::new(0.3, 0.0), 0.45, Complex64::new(2.0, 0.0)).unwrap();
        assert!(r < 1e-10);
        let k = Complex64::new(0.2, 0.3);
        for z in [Complex64::new(1.0, 1.5), Complex64::new(-0.5, -2.0)] {
            assert!(whittaker_circuit_residual(k, 0.35, z).unwrap() < 1e-10);
            // The opposite phase is wrong.
            let m = Complex64::new(0.35, 0.0);
            let wrong = circuit_phase(0.35, -z.im) * whittaker_m(-k, m, -z).unwrap();
            assert!(rel_err_c(wrong, whittaker_m(k, m, z).unwrap()) > 1e-2);
        }
        let z = Complex64::new(1.0, 1.0);
        let res = whittaker_connection_residual(Complex64::new(0.2, 0.0), 0.3, z.norm(), z.arg()).unwrap();
        assert!(res < 1e-10);
        assert!(whittaker_connection_residual(Complex64::new(0.2, 0.0), 0.3, 1.0, 1.6 * PI).is_err());
    }

    #[test]
    fn suite_is_seed_deterministic() {
        let a = check_bessel_product_integral(6, 11);
        let b = check_bessel_product_integral(6, 11);
        assert_eq!(a, b);
        let c = check_bessel_product_integral(6, 12);
        assert_ne!(a.worst_sample, c.worst_sample);
    }

    #[test]
    fn worst_sample_reproduces() {
        let rep = check_gaussian_bessel_product(8, 3);
        let w = rep.worst_sample.clone().unwrap();
        let p = &w.params;
        let again = rel_err(
            gaussian_bessel_lhs(p[0], p[1], p[2], p[3]).unwrap(),
            gaussian_bessel_rhs(p[0], p[1], p[2], p[3]).unwrap(),
        );
        assert_eq!(again, rep.worst_rel_err);
    }

    #[test]
    fn small_suite_passes() {
        for rep in run_identity_suite(10, 42) {
            assert!(rep.passed, "{rep:?}");
        }
    }
}
