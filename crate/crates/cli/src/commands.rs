use std::f64::consts::PI;
use std::io::Write;

use colldec::decoherence::{
    analyze, f_infinity, f_infinity_hard_sphere, f_of_r_full, lambda_hard_sphere, lambda_quadrature,
};
use colldec::dynamics::{
    cross_check_constant_with, evolve_moments, langevin_msd, msd_classical, msd_quantum,
    viscosity_hard_sphere, GridEvolver, GridState, LangevinSpec,
};

use crate::output::{fmt_num, Csv};
use crate::scenario::Scenario;
use crate::{CliError, Command};

/// Direction of `R` for the unreduced Monte-Carlo form; deliberately off-axis.
const MC_DIRECTION: [f64; 3] = [1.0, 2.0, 3.0];

/// Run one command. Summaries and CSV both go to `out`.
pub fn execute(command: &Command, sc: &Scenario, out: &mut dyn Write) -> Result<(), CliError> {
    let label = format!("{command:?}");
    match *command {
        Command::Lambda => lambda(sc, out),
        Command::Finf => finf(sc, out),
        Command::Crosscheck => crosscheck(sc, out),
        Command::Fcurve {
            r_min,
            r_max,
            points,
            log,
            mc,
        } => {
            let csv = fcurve(sc, &label, r_min, r_max, points as usize, log, mc)?;
            Ok(csv.write_to(out)?)
        }
        Command::Msd { t_max, points } => {
            let csv = msd(sc, &label, t_max, points as usize)?;
            Ok(csv.write_to(out)?)
        }
        Command::Evolve {
            grid_n,
            box_l,
            dt,
            steps,
            sigma0,
            record_every,
        } => {
            let sigma0 = sigma0.unwrap_or(box_l / 20.0);
            let csv = evolve(
                sc,
                &label,
                grid_n as usize,
                box_l,
                dt,
                steps as usize,
                sigma0,
                record_every as usize,
            )?;
            Ok(csv.write_to(out)?)
        }
        Command::Langevin {
            traj,
            dt,
            t_end,
            record_every,
            seed,
        } => {
            let seed = seed.or(sc.mc.map(|m| m.seed)).unwrap_or(0);
            let csv = langevin(
                sc,
                &label,
                traj as usize,
                dt,
                t_end,
                record_every.map(|r| r as usize),
                seed,
            )?;
            Ok(csv.write_to(out)?)
        }
    }
}

fn lambda(sc: &Scenario, out: &mut dyn Write) -> Result<(), CliError> {
    let q = lambda_quadrature(&sc.model, &sc.bath, &sc.consts, &sc.quad)?;
    writeln!(out, "units: {}", sc.units())?;
    writeln!(
        out,
        "lambda_quadrature = {} +/- {:.3e}",
        fmt_num(q.value),
        q.error_estimate
    )?;
    if sc.is_hard_sphere() {
        let c = lambda_hard_sphere(&sc.bath, &sc.particle, &sc.consts);
        writeln!(out, "lambda_closed_form = {}", fmt_num(c))?;
        writeln!(
            out,
            "relative_difference = {:.3e}",
            ((q.value - c) / c).abs()
        )?;
    }
    Ok(())
}

fn finf(sc: &Scenario, out: &mut dyn Write) -> Result<(), CliError> {
    let q = f_infinity(&sc.model, &sc.bath, &sc.consts, &sc.quad)?;
    writeln!(out, "units: {}", sc.units())?;
    writeln!(
        out,
        "f_infinity_quadrature = {} +/- {:.3e}",
        fmt_num(q.value),
        q.error_estimate
    )?;
    if sc.is_hard_sphere() {
        let c = f_infinity_hard_sphere(&sc.bath, &sc.particle);
        writeln!(out, "f_infinity_closed_form = {}", fmt_num(c))?;
        writeln!(
            out,
            "relative_difference = {:.3e}",
            ((q.value - c) / c).abs()
        )?;
    }
    Ok(())
}

fn crosscheck(sc: &Scenario, out: &mut dyn Write) -> Result<(), CliError> {
    if !sc.is_hard_sphere() {
        return Err(CliError::Config(
            "crosscheck needs a hard_sphere model".into(),
        ));
    }
    let (q, c) = cross_check_constant_with(&sc.bath, &sc.particle, &sc.consts, 1.0);
    writeln!(out, "C_quantum = {}", fmt_num(q))?;
    writeln!(out, "C_classical = {}", fmt_num(c))?;
    writeln!(out, "difference = {:.3e}", (q - c).abs())?;
    writeln!(out, "C_uncorrected_2pi = {}", fmt_num(2.0 * PI * q))?;
    Ok(())
}

fn grid_points(lo: f64, hi: f64, n: usize, log: bool) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| {
            let s = i as f64 / (n - 1) as f64;
            if i == n - 1 {
                hi
            } else if log {
                lo * (hi / lo).powf(s)
            } else {
                lo + (hi - lo) * s
            }
        })
        .collect()
}

pub fn fcurve(
    sc: &Scenario,
    label: &str,
    r_min: f64,
    r_max: f64,
    points: usize,
    log: bool,
    mc: bool,
) -> Result<Csv, CliError> {
    if !(r_min >= 0.0 && r_max >= r_min && r_max.is_finite()) {
        return Err(CliError::Usage(format!(
            "need 0 <= r-min <= r-max, got {r_min}, {r_max}"
        )));
    }
    if log && r_min <= 0.0 {
        return Err(CliError::Usage("--log needs r-min > 0".into()));
    }
    let mc_spec = match (mc, sc.mc) {
        (true, None) => {
            return Err(CliError::Config(
                "--mc needs an `mc` block in the scenario".into(),
            ))
        }
        (true, Some(m)) => Some(m),
        (false, _) => None,
    };
    let rs = grid_points(r_min, r_max, points, log);
    let result = analyze(&sc.model, &sc.bath, &sc.consts, &rs, &sc.quad)?;
    let mut columns = vec!["r", "F", "F_error"];
    if mc_spec.is_some() {
        columns.extend(["F_mc", "F_mc_stderr", "F_mc_im", "F_mc_im_stderr"]);
    }
    let mut csv = Csv::new(label, sc, mc_spec.map(|m| m.seed), &columns);
    csv.comment(format!("lambda: {}", fmt_num(result.lambda.value)));
    csv.comment(format!("f_infinity: {}", fmt_num(result.f_infinity.value)));
    let norm = MC_DIRECTION.iter().map(|x| x * x).sum::<f64>().sqrt();
    for p in &result.curve {
        let mut row = vec![p.r, p.f, p.error];
        if let Some(m) = &mc_spec {
            let r_vec = MC_DIRECTION.map(|x| x / norm * p.r);
            let e = f_of_r_full(&sc.model, &sc.bath, &sc.consts, r_vec, m)?;
            row.extend([
                e.re.value,
                e.re.error_estimate,
                e.im.value,
                e.im.error_estimate,
            ]);
        }
        csv.push(row);
    }
    Ok(csv)
}

pub fn msd(sc: &Scenario, label: &str, t_max: f64, points: usize) -> Result<Csv, CliError> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(CliError::Usage(format!(
            "--t-max must be positive, got {t_max}"
        )));
    }
    let lambda = lambda_quadrature(&sc.model, &sc.bath, &sc.consts, &sc.quad)?.value;
    let classical = sc.is_hard_sphere();
    let columns: &[&str] = if classical {
        &["t", "msd_quantum", "msd_classical"]
    } else {
        &["t", "msd_quantum"]
    };
    let mut csv = Csv::new(label, sc, None, columns);
    csv.comment(format!("lambda: {}", fmt_num(lambda)));
    let m = sc.particle.mass();
    let ts = if points == 1 {
        vec![t_max]
    } else {
        grid_points(0.0, t_max, points, false)
    };
    for t in ts {
        let mut row = vec![t, msd_quantum(lambda, m, t, &sc.consts)];
        if classical {
            row.push(msd_classical(&sc.bath, &sc.particle, t));
        }
        csv.push(row);
    }
    Ok(csv)
}

#[allow(clippy::too_many_arguments)]
pub fn evolve(
    sc: &Scenario,
    label: &str,
    grid_n: usize,
    box_l: f64,
    dt: f64,
    steps: usize,
    sigma0: f64,
    record_every: usize,
) -> Result<Csv, CliError> {
    let lambda = lambda_quadrature(&sc.model, &sc.bath, &sc.consts, &sc.quad)?.value;
    let mass = sc.particle.mass();
    let mut state = GridState::gaussian(grid_n, box_l, sigma0).map_err(colldec::Error::from)?;
    let mut ev = GridEvolver::new(&state, lambda, mass, &sc.consts, dt, steps)
        .map_err(colldec::Error::from)?;
    let start = state.moments(&sc.consts);
    let mut csv = Csv::new(
        label,
        sc,
        None,
        &["t", "trace", "x2", "purity", "x2_moments"],
    );
    csv.comment(format!("lambda: {}", fmt_num(lambda)));
    let mut failure = None;
    ev.run(&mut state, steps, record_every, |s| {
        let x2_moments = if s.t > start.t {
            evolve_moments(start, lambda, mass, &sc.consts, s.t, s.t - start.t)
                .map(|v| v.last().map_or(start.xx, |m| m.xx))
        } else {
            Ok(start.xx)
        };
        match x2_moments {
            Ok(x) => csv.push(vec![s.t, s.trace(), s.x2(), s.purity(), x]),
            Err(e) => {
                failure.get_or_insert(e);
            }
        }
    });
    if let Some(e) = failure {
        return Err(colldec::Error::from(e).into());
    }
    Ok(csv)
}

pub fn langevin(
    sc: &Scenario,
    label: &str,
    traj: usize,
    dt: f64,
    t_end: f64,
    record_every: Option<usize>,
    seed: u64,
) -> Result<Csv, CliError> {
    if !sc.is_hard_sphere() {
        return Err(CliError::Config(
            "langevin needs a hard_sphere model".into(),
        ));
    }
    let steps = (t_end / dt).round().max(1.0) as usize;
    let spec = LangevinSpec {
        xi: viscosity_hard_sphere(&sc.bath, &sc.particle),
        n_traj: traj,
        dt,
        t_end,
        seed,
        record_every: record_every.unwrap_or((steps / 10).max(1)),
    };
    let r = langevin_msd(&sc.bath, &sc.particle, &spec).map_err(colldec::Error::from)?;
    let mut csv = Csv::new(
        label,
        sc,
        Some(seed),
        &["t", "msd", "msd_stderr", "msd_classical", "v2", "v2_stderr"],
    );
    csv.comment(format!("xi: {}", fmt_num(spec.xi)));
    for i in 0..r.t.len() {
        csv.push(vec![
            r.t[i],
            r.msd[i],
            r.msd_stderr[i],
            msd_classical(&sc.bath, &sc.particle, r.t[i]),
            r.v2[i],
            r.v2_stderr[i],
        ]);
    }
    Ok(csv)
}
