//! Physical parameters, channel quantities, kinematics and the bound-state
//! spectrum. Everything here works in natural units (hbar = c = M = 1), so
//! energies are in units of the rest energy and lengths in Compton lengths.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physics configuration shared by every computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub alpha: f64,
    pub dimension: u32,
    /// Rest energy in output units; only used at the I/O boundary.
    pub energy_scale: f64,
    /// Compton length in output units; only used at the I/O boundary.
    pub length_scale: f64,
}

impl SystemParams {
    /// Parameters in natural units.
    pub fn new(alpha: f64, dimension: u32) -> Result<Self> {
        Self::with_scales(alpha, dimension, 1.0, 1.0)
    }

    pub fn with_scales(alpha: f64, dimension: u32, energy_scale: f64, length_scale: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!("alpha must be >= 0, got {alpha}")));
        }
        if dimension < 1 {
            return Err(Error::InvalidArgument("dimension must be >= 1".into()));
        }
        if !(energy_scale > 0.0 && length_scale > 0.0) {
            return Err(Error::InvalidArgument("unit scales must be positive".into()));
        }
        Ok(SystemParams { alpha, dimension, energy_scale, length_scale })
    }

    pub fn d(&self) -> f64 {
        self.dimension as f64
    }
}

/// Angular sector quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub l: u32,
    /// l + D/2 - 1
    pub lam: f64,
    /// sqrt(lam^2 - alpha^2)
    pub mu_hat: f64,
    /// mu_hat - 1/2
    pub l_tilde: f64,
}

impl Channel {
    /// mu_hat - |lam|, without cancellation.
    pub fn mu_shift(&self, alpha: f64) -> f64 {
        -alpha * alpha / (self.mu_hat + self.lam.abs())
    }
}

pub fn make_channel(params: &SystemParams, l: u32) -> Result<Channel> {
    let lam = l as f64 + 0.5 * params.d() - 1.0;
    let a = params.alpha;
    if a > 0.0 && a >= lam.abs() {
        return Err(Error::CriticalCoupling { alpha: a, lam });
    }
    let mu_hat = ((lam.abs() - a) * (lam.abs() + a)).sqrt();
    Ok(Channel { l, lam, mu_hat, l_tilde: mu_hat - 0.5 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Bound,
    Threshold,
    Scattering,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kinematics {
    pub energy: f64,
    pub kappa: Option<f64>,
    pub nu: Option<f64>,
    pub k_tilde: Option<f64>,
    pub nu_tilde: Option<f64>,
    pub regime: Regime,
}

impl Kinematics {
    /// kappa and nu, or an error outside the bound regime.
    pub fn bound(&self) -> Result<(f64, f64)> {
        match (self.regime, self.kappa, self.nu) {
            (Regime::Bound, Some(k), Some(n)) => Ok((k, n)),
            _ => Err(Error::ValidityViolation(format!(
                "E = {} is not below threshold",
                self.energy
            ))),
        }
    }

    /// k_tilde and nu_tilde, or an error outside the scattering regime.
    pub fn scattering(&self) -> Result<(f64, f64)> {
        match (self.regime, self.k_tilde, self.nu_tilde) {
            (Regime::Scattering, Some(k), Some(n)) => Ok((k, n)),
            _ => Err(Error::ValidityViolation(format!(
                "E = {} is not above threshold",
                self.energy
            ))),
        }
    }
}

pub fn kinematics(params: &SystemParams, e: f64) -> Kinematics {
    let a = params.alpha;
    let ae = e.abs();
    if ae < 1.0 {
        let kappa = ((1.0 - e) * (1.0 + e)).sqrt();
        Kinematics {
            energy: e,
            kappa: Some(kappa),
            nu: Some(a * e / kappa),
            k_tilde: None,
            nu_tilde: None,
            regime: Regime::Bound,
        }
    } else if ae > 1.0 {
        let k = ((ae - 1.0) * (ae + 1.0)).sqrt();
        Kinematics {
            energy: e,
            kappa: None,
            nu: None,
            k_tilde: Some(k),
            nu_tilde: Some(a * e / k),
            regime: Regime::Scattering,
        }
    } else {
        Kinematics {
            energy: e,
            kappa: Some(0.0),
            nu: None,
            k_tilde: Some(0.0),
            nu_tilde: None,
            regime: Regime::Threshold,
        }
    }
}

/// nu(E) = alpha E / sqrt(1 - E^2) for |E| < 1.
pub fn nu_of_energy(alpha: f64, e: f64) -> f64 {
    alpha * e / ((1.0 - e) * (1.0 + e)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    pub n: u32,
    pub l: u32,
    pub n_r: u32,
    /// n_r + l_tilde + 1, the value nu takes at the bound state.
    pub n_eff: f64,
    pub energy: f64,
    /// E - 1, computed without cancellation.
    pub binding: f64,
    pub kappa: f64,
    /// Energy-dependent Bohr radius 1 / (alpha E).
    pub bohr_mod: f64,
}

fn check_quantum_numbers(n: u32, l: u32) -> Result<u32> {
    if n <= l {
        return Err(Error::InvalidQuantumNumbers(format!("need n >= l + 1, got n = {n}, l = {l}")));
    }
    Ok(n - l - 1)
}

/// N = n_r + l_tilde + 1 for a valid channel.
pub fn effective_n(params: &SystemParams, n: u32, l: u32) -> Result<(Channel, u32, f64)> {
    let n_r = check_quantum_numbers(n, l)?;
    let ch = make_channel(params, l)?;
    Ok((ch, n_r, n_r as f64 + ch.l_tilde + 1.0))
}

/// Closed-form solution of nu(E) = N: E = N / sqrt(N^2 + alpha^2).
pub fn bound_energy_exact(params: &SystemParams, n: u32, l: u32) -> Result<BoundState> {
    let (_, n_r, big_n) = effective_n(params, n, l)?;
    let a = params.alpha;
    if a == 0.0 {
        return Err(Error::NoBoundState("alpha = 0: levels merge into the threshold E = 1".into()));
    }
    if big_n <= 0.0 {
        return Err(Error::NoBoundState(format!("N = {big_n} is not positive")));
    }
    let s = big_n.hypot(a);
    let energy = big_n / s;
    let binding = -a * a / (s * (s + big_n));
    let kappa = a / s;
    Ok(BoundState { n, l, n_r, n_eff: big_n, energy, binding, kappa, bohr_mod: 1.0 / (a * energy) })
}

/// Independent bisection solution of nu(E) = N on (eps, 1 - eps).
pub fn bound_energy_root(params: &SystemParams, n: u32, l: u32) -> Result<BoundState> {
    const EPS: f64 = 1e-12;
    const TOL: f64 = 1e-14;
    let (_, n_r, big_n) = effective_n(params, n, l)?;
    let a = params.alpha;
    let f = |e: f64| nu_of_energy(a, e) - big_n;
    let (mut lo, mut hi) = (EPS, 1.0 - EPS);
    let (flo, fhi) = (f(lo), f(hi));
    if !(flo < 0.0 && fhi > 0.0) {
        return Err(Error::BracketFailure(format!(
            "nu(E) - N has no sign change on ({lo}, {hi}): {flo}, {fhi}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm.abs() <= TOL * big_n {
            lo = mid;
            hi = mid;
            break;
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let energy = 0.5 * (lo + hi);
    let kappa = ((1.0 - energy) * (1.0 + energy)).sqrt();
    Ok(BoundState {
        n,
        l,
        n_r,
        n_eff: big_n,
        energy,
        binding: energy - 1.0,
        kappa,
        bohr_mod: 1.0 / (a * energy),
    })
}

/// Small-alpha expansion of the level, kept through alpha^2 or alpha^4.
/// Returns E - 1.
pub fn binding_perturbative(params: &SystemParams, n: u32, l: u32, order: u32) -> Result<f64> {
    check_quantum_numbers(n, l)?;
    let ch = make_channel(params, l)?;
    let a2 = params.alpha * params.alpha;
    let np = n as f64 + 0.5 * (params.d() - 3.0);
    let mut de = -0.5 * a2 / (np * np);
    match order {
        2 => {}
        4 => {
            if a2 > 0.0 {
                de -= a2 * a2 / (np * np * np) * (0.5 / ch.lam - 0.375 / np);
            }
        }
        _ => return Err(Error::InvalidArgument(format!("order must be 2 or 4, got {order}"))),
    }
    Ok(de)
}

/// Small-alpha expansion of the level energy.
pub fn bound_energy_perturbative(params: &SystemParams, n: u32, l: u32, order: u32) -> Result<f64> {
    Ok(1.0 + binding_perturbative(params, n, l, order)?)
}

fn binomial(n: i64, k: i64) -> u64 {
    if k < 0 || n < k || n < 0 {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// Number of independent hyperspherical harmonics of degree l in D dimensions.
pub fn degeneracy(params: &SystemParams, l: u32) -> Result<u64> {
    let d = params.dimension as i64;
    if d < 2 {
        return Err(Error::InvalidArgument("degeneracy needs D >= 2".into()));
    }
    let l = l as i64;
    Ok(binomial(l + d - 1, d - 1) - binomial(l + d - 3, d - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(alpha: f64, d: u32) -> SystemParams {
        SystemParams::new(alpha, d).unwrap()
    }

    #[test]
    fn channel_examples() {
        let c = make_channel(&p(0.0, 3), 0).unwrap();
        assert_eq!(c.l_tilde, 0.0);
        assert_eq!(c.mu_hat, 0.5);
        assert!(matches!(make_channel(&p(0.1, 2), 0), Err(Error::CriticalCoupling { .. })));
        let c = make_channel(&p(0.3, 3), 0).unwrap();
        assert!((c.mu_hat - 0.4).abs() < 1e-15);
        assert!((c.l_tilde + 0.1).abs() < 1e-15);
    }

    #[test]
    fn kinematics_examples() {
        let k = kinematics(&p(0.3, 3), 0.0);
        assert_eq!((k.kappa, k.nu, k.regime), (Some(1.0), Some(0.0), Regime::Bound));
        let k = kinematics(&p(0.3, 3), 1.0);
        assert_eq!(k.regime, Regime::Threshold);
        assert_eq!(k.kappa, Some(0.0));
        let k = kinematics(&p(0.3, 3), 0.8);
        assert!((k.kappa.unwrap() - 0.6).abs() < 1e-15);
        assert!((k.nu.unwrap() - 0.4).abs() < 1e-15);
        let k = kinematics(&p(0.3, 3), 1.25);
        assert!((k.k_tilde.unwrap() - 0.75).abs() < 1e-15);
        assert!((k.nu_tilde.unwrap() * 0.75 - 0.3 * 1.25).abs() < 1e-15);
        assert!(k.kappa.is_none());
    }

    #[test]
    fn ground_state_levels() {
        let s = bound_energy_exact(&p(0.3, 3), 1, 0).unwrap();
        assert!((s.n_eff - 0.9).abs() < 1e-15);
        assert!((s.energy - 0.9f64.sqrt()).abs() < 1e-15);
        let s2 = bound_energy_exact(&p(0.3, 3), 2, 0).unwrap();
        assert!((s2.energy - 1.9 / 3.7f64.sqrt()).abs() < 1e-15);
        assert!((s.binding - (s.energy - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn root_finder_matches_closed_form() {
        for &(a, d, n, l) in &[(0.3, 3, 1, 0), (0.05, 5, 3, 1), (0.2, 2, 2, 1), (0.01, 4, 4, 2)] {
            let e = bound_energy_exact(&p(a, d), n, l).unwrap().energy;
            let r = bound_energy_root(&p(a, d), n, l).unwrap().energy;
            assert!(((e - r) / e).abs() < 1e-12, "{a} {d} {n} {l}: {e} vs {r}");
        }
    }

    #[test]
    fn zero_coupling_has_no_levels() {
        assert!(matches!(bound_energy_exact(&p(0.0, 3), 1, 0), Err(Error::NoBoundState(_))));
        assert!(matches!(bound_energy_root(&p(0.0, 3), 1, 0), Err(Error::BracketFailure(_))));
        assert_eq!(bound_energy_perturbative(&p(0.0, 3), 2, 1, 4).unwrap(), 1.0);
        assert!(matches!(bound_energy_exact(&p(0.1, 3), 1, 1), Err(Error::InvalidQuantumNumbers(_))));
    }

    #[test]
    fn perturbative_coefficients_three_dimensions() {
        let a = 0.01f64;
        let pa = p(a, 3);
        for n in 1..5u32 {
            for l in 0..n {
                let c2 = binding_perturbative(&pa, n, l, 2).unwrap() / (a * a);
                assert!((c2 + 0.5 / (n * n) as f64).abs() < 1e-13);
                let c4 = binding_perturbative(&pa, n, l, 4).unwrap() / a.powi(4) - c2 / (a * a);
                let nf = n as f64;
                let want = -(1.0 / nf.powi(3)) * (1.0 / (2 * l + 1) as f64 - 3.0 / (8.0 * nf));
                assert!((c4 - want).abs() < 1e-8, "{c4} vs {want}");
            }
        }
    }

    #[test]
    fn degeneracy_counts() {
        assert_eq!(degeneracy(&p(0.0, 3), 2).unwrap(), 5);
        assert_eq!(degeneracy(&p(0.0, 2), 0).unwrap(), 1);
        assert_eq!(degeneracy(&p(0.0, 2), 3).unwrap(), 2);
        assert_eq!(degeneracy(&p(0.0, 4), 1).unwrap(), 4);
    }
}
