//! Adaptive 21-point Gauss-Kronrod quadrature.
//!
//! The integrator is globally adaptive: the subinterval with the largest
//! error estimate is bisected until the summed estimate meets the tolerance.
//! Semi-infinite ranges are mapped onto (0, 1] with `x = a + (1 - t) / t`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];

const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

/// Values that can be integrated: real or complex scalars.
pub trait QuadValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum bisection depth of any subinterval.
    pub max_depth: u32,
    /// Hard cap on the number of live subintervals.
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { rel_tol: 1e-10, abs_tol: 1e-14, max_depth: 40, max_intervals: 2000 }
    }
}

impl QuadConfig {
    pub fn with_tol(rel_tol: f64, abs_tol: f64) -> Self {
        QuadConfig { rel_tol, abs_tol, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult<T = f64> {
    pub value: T,
    pub abs_err: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl<T: QuadValue> QuadResult<T> {
    /// Turns an unconverged result into `MaxDepthExceeded`.
    pub fn into_result(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::MaxDepthExceeded { value: self.value.magnitude(), abs_err: self.abs_err })
        }
    }
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = err.abs();
    if resasc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && err < floor {
        err = floor;
    }
    err
}

fn gk21<T, F>(f: &mut F, a: f64, b: f64) -> Result<(T, f64)>
where
    T: QuadValue,
    F: FnMut(f64) -> Result<T>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let fc = f(center)?;
    let mut res_gauss = T::default();
    let mut res_kronrod = fc * WGK[10];
    let mut res_abs = fc.magnitude() * WGK[10];
    let mut fv1 = [T::default(); 10];
    let mut fv2 = [T::default(); 10];

    for j in 0..5 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        let sum = f1 + f2;
        res_gauss = res_gauss + sum * WG[j];
        res_kronrod = res_kronrod + sum * WGK[jtw];
        res_abs += WGK[jtw] * (f1.magnitude() + f2.magnitude());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_kronrod = res_kronrod + (f1 + f2) * WGK[jtwm1];
        res_abs += WGK[jtwm1] * (f1.magnitude() + f2.magnitude());
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[10] * (fc - mean).magnitude();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).magnitude() + (fv2[j] - mean).magnitude());
    }

    let value = res_kronrod * half;
    let err = rescale_error(
        ((res_kronrod - res_gauss) * half).magnitude(),
        res_abs * abs_half,
        res_asc * abs_half,
    );
    Ok((value, err))
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
    depth: u32,
}

/// Globally adaptive integration of a fallible integrand over `[a, b]`.
///
/// An integrand error aborts the integration and is returned unchanged.
pub fn integrate_with<T, F>(mut f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> Result<T>,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(format!("finite bounds required, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadResult { value: T::default(), abs_err: 0.0, evaluations: 0, converged: true });
    }
    let (value, err) = gk21(&mut f, a, b)?;
    let mut segments = vec![Segment { a, b, value, err, depth: 0 }];
    let mut evaluations = 21;

    loop {
        let total = segments.iter().fold(T::default(), |acc, s| acc + s.value);
        let total_err: f64 = segments.iter().map(|s| s.err).sum();
        let target = cfg.abs_tol.max(cfg.rel_tol * total.magnitude());
        if !total.magnitude().is_finite() || !total_err.is_finite() {
            return Err(Error::Nonconvergence(format!(
                "non-finite integrand on [{a}, {b}]"
            )));
        }
        if total_err <= target {
            return Ok(QuadResult { value: total, abs_err: total_err, evaluations, converged: true });
        }
        let pick = segments
            .iter()
            .enumerate()
            .filter(|(_, s)| s.depth < cfg.max_depth)
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i);
        let idx = match pick {
            Some(i) if segments.len() < cfg.max_intervals => i,
            _ => {
                return Ok(QuadResult {
                    value: total,
                    abs_err: total_err,
                    evaluations,
                    converged: false,
                })
            }
        };
        let seg = segments.swap_remove(idx);
        let mid = 0.5 * (seg.a + seg.b);
        if mid == seg.a || mid == seg.b {
            return Ok(QuadResult { value: total, abs_err: total_err, evaluations, converged: false });
        }
        let (v1, e1) = gk21(&mut f, seg.a, mid)?;
        let (v2, e2) = gk21(&mut f, mid, seg.b)?;
        evaluations += 42;
        segments.push(Segment { a: seg.a, b: mid, value: v1, err: e1, depth: seg.depth + 1 });
        segments.push(Segment { a: mid, b: seg.b, value: v2, err: e2, depth: seg.depth + 1 });
    }
}

/// Probe distances for the tail check, relative to the lower bound.
const TAIL_NEAR: [f64; 4] = [16.0, 20.0, 26.0, 32.0];
const TAIL_FAR: [f64; 4] = [128.0, 160.0, 205.0, 256.0];

fn check_tail<T, F>(f: &mut F, a: f64) -> Result<()>
where
    T: QuadValue,
    F: FnMut(f64) -> Result<T>,
{
    let mut near = 0.0f64;
    for d in TAIL_NEAR {
        let v = f(a + d)?.magnitude();
        if !v.is_finite() {
            return Err(Error::DivergentTail(format!("non-finite value at x = {}", a + d)));
        }
        near = near.max(v);
    }
    let mut far = 0.0f64;
    for d in TAIL_FAR {
        let v = f(a + d)?.magnitude();
        if !v.is_finite() {
            return Err(Error::DivergentTail(format!("non-finite value at x = {}", a + d)));
        }
        far = far.max(v);
    }
    if far > 0.0 && far >= near {
        return Err(Error::DivergentTail(format!(
            "|f| does not decrease: max {near:e} near x = {a}+16..32, {far:e} near x = {a}+128..256"
        )));
    }
    Ok(())
}

/// Integrates a fallible integrand over `[a, inf)`.
pub fn integrate_tail_with<T, F>(mut f: F, a: f64, cfg: &QuadConfig) -> Result<QuadResult<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> Result<T>,
{
    check_tail(&mut f, a)?;
    let mut r = integrate_with(
        |t: f64| {
            let x = a + (1.0 - t) / t;
            if !x.is_finite() {
                return Ok(T::default());
            }
            let v = f(x)?;
            if v.magnitude() == 0.0 {
                Ok(v)
            } else {
                Ok(v * (1.0 / (t * t)))
            }
        },
        0.0,
        1.0,
        cfg,
    )?;
    r.evaluations += TAIL_NEAR.len() + TAIL_FAR.len();
    Ok(r)
}

/// Integrates a real function over `[a, b]` with the given tolerances.
pub fn integrate_finite<F>(mut f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> QuadResult
where
    F: FnMut(f64) -> f64,
{
    let cfg = QuadConfig::with_tol(rel_tol, abs_tol);
    match integrate_with(|x| Ok(f(x)), a, b, &cfg) {
        Ok(r) => r,
        Err(_) => QuadResult { value: f64::NAN, abs_err: f64::INFINITY, evaluations: 0, converged: false },
    }
}

/// Integrates a real function over `[0, inf)`.
pub fn integrate_semi_infinite<F>(mut f: F, rel_tol: f64, abs_tol: f64) -> Result<QuadResult>
where
    F: FnMut(f64) -> f64,
{
    let cfg = QuadConfig::with_tol(rel_tol, abs_tol);
    integrate_tail_with(|x| Ok(f(x)), 0.0, &cfg)
}

/// A closed-form integral used to audit the error estimates.
#[derive(Debug, Clone, Copy)]
pub struct AnalyticCase {
    pub name: &'static str,
    pub f: fn(f64) -> f64,
    pub a: f64,
    /// Upper bound; `None` means infinity.
    pub b: Option<f64>,
    pub exact: f64,
}

impl AnalyticCase {
    pub fn integrate(&self, cfg: &QuadConfig) -> Result<QuadResult> {
        let f = self.f;
        match self.b {
            Some(b) => integrate_with(|x| Ok(f(x)), self.a, b, cfg),
            None => integrate_tail_with(|x| Ok(f(x)), self.a, cfg),
        }
    }
}

/// Twenty integrals with known values: smooth, peaked, kinked, endpoint
/// singular, oscillatory and semi-infinite.
pub fn analytic_suite() -> Vec<AnalyticCase> {
    use std::f64::consts::{E, PI};
    let case = |name, f, a, b, exact| AnalyticCase { name, f, a, b, exact };
    vec![
        case("x^2 on [0,1]", |x| x * x, 0.0, Some(1.0), 1.0 / 3.0),
        case("sin on [0,pi]", f64::sin, 0.0, Some(PI), 2.0),
        case("exp on [0,1]", f64::exp, 0.0, Some(1.0), E - 1.0),
        case("1/(1+x^2) on [0,1]", |x| 1.0 / (1.0 + x * x), 0.0, Some(1.0), PI / 4.0),
        case("sqrt on [0,1]", f64::sqrt, 0.0, Some(1.0), 2.0 / 3.0),
        case("x^-1/2 on [0,1]", |x| 1.0 / x.sqrt(), 0.0, Some(1.0), 2.0),
        case("ln on [0,1]", f64::ln, 0.0, Some(1.0), -1.0),
        case("cos 10x on [0,1]", |x| (10.0 * x).cos(), 0.0, Some(1.0), 10f64.sin() / 10.0),
        case("Runge on [-1,1]", |x| 1.0 / (1.0 + 25.0 * x * x), -1.0, Some(1.0), 0.4 * 5f64.atan()),
        case("x e^x on [0,1]", |x| x * x.exp(), 0.0, Some(1.0), 1.0),
        case("1/x on [1,e]", |x| 1.0 / x, 1.0, Some(E), 1.0),
        case("|x-1/3| on [0,1]", |x| (x - 1.0 / 3.0).abs(), 0.0, Some(1.0), 5.0 / 18.0),
        case("sin^2 on [0,pi]", |x| x.sin().powi(2), 0.0, Some(PI), PI / 2.0),
        case("1/(2+cos) on [0,2pi]", |x| 1.0 / (2.0 + x.cos()), 0.0, Some(2.0 * PI), 2.0 * PI / 3f64.sqrt()),
        case("x^10 on [0,2]", |x| x.powi(10), 0.0, Some(2.0), 2048.0 / 11.0),
        case("e^-z on [0,inf)", |z| (-z).exp(), 0.0, None, 1.0),
        case("z e^-z on [0,inf)", |z| z * (-z).exp(), 0.0, None, 1.0),
        case("z^3 e^-2z on [0,inf)", |z| z.powi(3) * (-2.0 * z).exp(), 0.0, None, 0.375),
        case("Gaussian on [0,inf)", |z| (-z * z).exp(), 0.0, None, 0.5 * PI.sqrt()),
        case("e^-z cos z on [0,inf)", |z| (-z).exp() * z.cos(), 0.0, None, 0.5),
    ]
}
