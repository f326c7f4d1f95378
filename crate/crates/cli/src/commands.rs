//! One function per subcommand, each producing a [`Table`].

use num_complex::Complex64;
use serde_json::{json, Value};

use relcoulomb::green::{
    discontinuity, green_closed, green_integral, green_series, residue_factorization, GreenValue,
};
use relcoulomb::model::{
    bound_energy_exact, bound_energy_perturbative, make_channel, SystemParams,
};
use relcoulomb::quad::{analytic_suite, QuadConfig};
use relcoulomb::verify::run_identity_suite;
use relcoulomb::wavefun::{bound_norm_check, BoundWave, ContinuumWave, CONTINUUM_MAX_ARG};
use relcoulomb::Error;

use crate::output::{write, Table};
use crate::{Cli, CliError, Command, RouteArg, Suite, System, Units};

/// Electron rest energy, J (CODATA 2018).
const ELECTRON_REST_ENERGY_J: f64 = 8.1871057769e-14;
/// Reduced Compton wavelength of the electron, m (CODATA 2018).
const ELECTRON_COMPTON_LENGTH_M: f64 = 3.8615926796e-13;

/// Conversion of energy, length and wavenumber columns.
#[derive(Clone, Copy)]
struct Scales {
    energy: f64,
    length: f64,
}

impl Scales {
    fn of(units: Units) -> Self {
        match units {
            Units::Natural => Scales { energy: 1.0, length: 1.0 },
            Units::Si => Scales { energy: ELECTRON_REST_ENERGY_J, length: ELECTRON_COMPTON_LENGTH_M },
        }
    }

    fn params(&self, s: &System) -> Result<SystemParams, CliError> {
        Ok(SystemParams::with_scales(s.alpha, s.dim, self.energy, self.length)?)
    }
}

fn num(x: f64) -> Value {
    json!(x)
}

fn energy(p: &SystemParams, e: f64) -> Value {
    num(e * p.energy_scale)
}

fn length(p: &SystemParams, r: f64) -> Value {
    num(r * p.length_scale)
}

fn positive(name: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("--{name} must be positive and finite, got {x}")))
    }
}

fn uniform_grid(r_max: f64, points: usize) -> Result<Vec<f64>, CliError> {
    positive("r-max", r_max)?;
    if points < 1 {
        return Err(CliError::Config("--points must be at least 1".into()));
    }
    Ok((1..=points).map(|i| r_max * i as f64 / points as f64).collect())
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let sc = Scales::of(cli.common.units);
    let table = match &cli.command {
        Command::Spectrum { system, n_max, l_max } => spectrum(sc, system, *n_max, *l_max)?,
        Command::Green { system, l, energy, rb, ra, route, n_terms } => {
            green(sc, system, *l, energy, rb, ra, *route, *n_terms)?
        }
        Command::BoundWf { system, n, l, r_max, points } => bound_wf(sc, system, *n, *l, *r_max, *points)?,
        Command::ContinuumWf { system, k, l, r_max, points } => {
            continuum_wf(sc, system, *k, *l, *r_max, *points)?
        }
        Command::Residues { system, n, l, radii } => residues(sc, system, *n, *l, radii)?,
        Command::Disc { system, l, energy, rb, ra } => disc(sc, system, *l, energy, *rb, *ra)?,
        Command::Verify { suite, samples } => {
            let (table, failed) = verify(*suite, *samples, cli.common.seed)?;
            write(cli, &table)?;
            return match failed {
                Some(msg) => Err(CliError::Failed(msg)),
                None => Ok(()),
            };
        }
        Command::Series { system, l, energy, rb, ra, n_terms } => {
            series(sc, system, *l, *energy, *rb, *ra, *n_terms)?
        }
    };
    write(cli, &table)
}

fn spectrum(sc: Scales, s: &System, n_max: u32, l_max: Option<u32>) -> Result<Table, CliError> {
    let p = sc.params(s)?;
    if n_max < 1 {
        return Err(CliError::Config("--n-max must be at least 1".into()));
    }
    let l_max = l_max.unwrap_or(n_max - 1).min(n_max - 1);
    let mut t = Table::new(&["n", "l", "n_r", "n_eff", "e_exact", "e_pert2", "e_pert4", "defect"]);
    let mut skipped = Vec::new();
    for l in 0..=l_max {
        if let Err(e @ Error::CriticalCoupling { .. }) = make_channel(&p, l) {
            skipped.push(json!({"l": l, "reason": e.to_string()}));
            continue;
        }
        for n in (l + 1)..=n_max {
            let st = bound_energy_exact(&p, n, l)?;
            let e2 = bound_energy_perturbative(&p, n, l, 2)?;
            let e4 = bound_energy_perturbative(&p, n, l, 4)?;
            t.push(vec![
                json!(n),
                json!(l),
                json!(st.n_r),
                num(st.n_eff),
                energy(&p, st.energy),
                energy(&p, e2),
                energy(&p, e4),
                energy(&p, st.energy - e4),
            ]);
        }
    }
    if t.rows.is_empty() {
        return Err(make_channel(&p, 0).err().map(CliError::from).unwrap_or_else(|| {
            CliError::Config("no states requested".into())
        }));
    }
    t.summary = Some(json!({ "skipped_channels": skipped }));
    Ok(t)
}

fn green_row(p: &SystemParams, e: f64, rb: f64, ra: f64, g: &GreenValue) -> Vec<Value> {
    let route = format!("{:?}", g.route).to_lowercase();
    vec![
        energy(p, e),
        length(p, rb),
        length(p, ra),
        json!(route),
        num(g.value.re),
        num(g.err_est),
        g.terms_used.map_or(Value::Null, |n| json!(n)),
    ]
}

#[allow(clippy::too_many_arguments)]
fn green(
    sc: Scales,
    s: &System,
    l: u32,
    energies: &[f64],
    rbs: &[f64],
    ras: &[f64],
    route: RouteArg,
    n_terms: usize,
) -> Result<Table, CliError> {
    let p = sc.params(s)?;
    let mut t = Table::new(&["energy", "r_b", "r_a", "route", "value", "err_est", "terms_used"]);
    for &e in energies {
        for &rb in rbs {
            for &ra in ras {
                if matches!(route, RouteArg::Closed | RouteArg::All) {
                    t.push(green_row(&p, e, rb, ra, &green_closed(rb, ra, e, l, &p)?));
                }
                if matches!(route, RouteArg::Integral | RouteArg::All) {
                    t.push(green_row(&p, e, rb, ra, &green_integral(rb, ra, e, l, &p)?));
                }
                if matches!(route, RouteArg::Series | RouteArg::All) {
                    t.push(green_row(&p, e, rb, ra, &green_series(rb, ra, e, l, &p, n_terms)?.0));
                }
            }
        }
    }
    Ok(t)
}

fn bound_wf(sc: Scales, s: &System, n: u32, l: u32, r_max: Option<f64>, points: usize) -> Result<Table, CliError> {
    let p = sc.params(s)?;
    let w = BoundWave::new(n, l, &p)?;
    let grid = uniform_grid(r_max.unwrap_or(20.0 * w.length_scale()), points)?;
    let mut t = Table::new(&["r", "radial"]);
    for r in grid {
        t.push(vec![length(&p, r), num(w.eval(r)?)]);
    }
    t.summary = Some(json!({
        "state": w.state,
        "norm": bound_norm_check(n, l, &p)?,
        "normalization_const": w.normalization_const,
    }));
    Ok(t)
}

fn continuum_wf(sc: Scales, s: &System, k: f64, l: u32, r_max: Option<f64>, points: usize) -> Result<Table, CliError> {
    let p = sc.params(s)?;
    positive("k", k)?;
    let w = ContinuumWave::new(k, l, &p)?;
    let grid = uniform_grid(r_max.unwrap_or(0.5 * CONTINUUM_MAX_ARG / k), points)?;
    let mut t = Table::new(&["r", "re", "im", "modulus"]);
    for r in grid {
        let v = w.eval(r)?;
        t.push(vec![length(&p, r), num(v.re), num(v.im), num(v.norm())]);
    }
    t.summary = Some(json!({
        "k_tilde": num(k / p.length_scale),
        "nu_tilde": w.nu_tilde,
        "l_tilde": w.channel.l_tilde,
        "amplitude_const": w.amplitude_const,
    }));
    Ok(t)
}

fn residues(sc: Scales, s: &System, n: u32, l: u32, radii: &[f64]) -> Result<Table, CliError> {
    let p = sc.params(s)?;
    let grid: Vec<f64> = if radii.is_empty() {
        let kappa = bound_energy_exact(&p, n, l)?.kappa;
        [0.5, 1.0, 2.0, 4.0].iter().map(|f| f / (p.alpha * kappa)).collect()
    } else {
        radii.to_vec()
    };
    let rep = residue_factorization(n, l, &p, &grid)?;
    let mut t = Table::new(&["r_b", "r_a", "residue"]);
    for (i, rb) in grid.iter().enumerate() {
        for (j, ra) in grid.iter().enumerate() {
            t.push(vec![length(&p, *rb), length(&p, *ra), num(rep.residues[i][j])]);
        }
    }
    t.summary = Some(json!({
        "energy": energy(&p, rep.energy),
        "n_eff": rep.n_eff,
        "gamma_limit": rep.gamma_limit,
        "gamma_limit_analytic": rep.gamma_limit_analytic,
        "extrapolation_spread": rep.extrapolation_spread,
        "rank1_max_rel": rep.rank1_max_rel,
        "constant": rep.constant,
        "proportionality_cv": rep.proportionality_cv,
        "direct_max_rel_dev": rep.direct_max_rel_dev,
    }));
    Ok(t)
}

fn disc(sc: Scales, s: &System, l: u32, energies: &[f64], rb: f64, ra: f64) -> Result<Table, CliError> {
    let p = sc.params(s)?;
    let mut t = Table::new(&[
        "energy",
        "route_a_re",
        "route_a_im",
        "route_b_re",
        "route_b_im",
        "rel_diff",
        "rel_diff_sign_flipped",
        "extrapolation_spread",
    ]);
    for &e in energies {
        let d = discontinuity(rb, ra, e, l, &p)?;
        let c = |z: Complex64| [num(z.re), num(z.im)];
        let [are, aim] = c(d.route_a);
        let [bre, bim] = c(d.route_b);
        t.push(vec![
            energy(&p, e),
            are,
            aim,
            bre,
            bim,
            num(d.rel_diff),
            num(d.rel_diff_sign_flipped),
            num(d.extrapolation_spread),
        ]);
    }
    Ok(t)
}

fn verify(suite: Suite, samples: usize, seed: u64) -> Result<(Table, Option<String>), CliError> {
    if samples < 1 {
        return Err(CliError::Config("--samples must be at least 1".into()));
    }
    let mut t = Table::new(&["suite", "check", "samples", "worst_rel_err", "tolerance", "failures", "passed", "worst_sample"]);
    let mut failed = Vec::new();
    if matches!(suite, Suite::Identities | Suite::All) {
        for r in run_identity_suite(samples, seed) {
            let id = format!("{:?}", r.identity_id);
            if !r.passed {
                failed.push(id.clone());
            }
            let worst = r.worst_sample.as_ref().map(|w| {
                let params: serde_json::Map<String, Value> =
                    r.param_names.iter().cloned().zip(w.params.iter().map(|v| num(*v))).collect();
                json!({ "index": w.index, "params": params, "error": w.error })
            });
            t.push(vec![
                json!("identities"),
                json!(id),
                json!(r.samples),
                num(r.worst_rel_err),
                num(r.tolerance),
                json!(r.failures),
                json!(r.passed),
                worst.unwrap_or(Value::Null),
            ]);
        }
    }
    if matches!(suite, Suite::Quadrature | Suite::All) {
        let cfg = QuadConfig::default();
        for case in analytic_suite() {
            let (err, est, ok) = match case.integrate(&cfg) {
                Ok(r) => {
                    let err = (r.value - case.exact).abs();
                    (err, r.abs_err, err <= 10.0 * r.abs_err)
                }
                Err(_) => (f64::INFINITY, f64::INFINITY, false),
            };
            if !ok {
                failed.push(case.name.to_string());
            }
            t.push(vec![
                json!("quadrature"),
                json!(case.name),
                json!(1),
                num(err / case.exact.abs()),
                num(10.0 * est / case.exact.abs()),
                json!(if ok { 0 } else { 1 }),
                json!(ok),
                Value::Null,
            ]);
        }
    }
    let msg = (!failed.is_empty()).then(|| failed.join(", "));
    Ok((t, msg))
}

fn series(sc: Scales, s: &System, l: u32, e: f64, rb: f64, ra: f64, n_terms: usize) -> Result<Table, CliError> {
    let p = sc.params(s)?;
    let (g, diag) = green_series(rb, ra, e, l, &p, n_terms)?;
    let power = (rb * ra).powf(1.0 - 0.5 * p.d());
    let mut t = Table::new(&["n", "term", "partial_sum"]);
    for (n, (term, sum)) in diag.terms.iter().zip(&diag.partial_sums).enumerate() {
        t.push(vec![json!(n), num(term * power), num(sum * power)]);
    }
    let closed = green_closed(rb, ra, e, l, &p).map(|c| c.value.re).ok();
    t.summary = Some(json!({
        "value": g.value.re,
        "err_est": g.err_est,
        "converged_at": diag.converged_at,
        "rel_tol": diag.rel_tol,
        "closed": closed,
        "rel_diff_closed": closed.map(|c| ((g.value.re - c) / c).abs()),
    }));
    Ok(t)
}
