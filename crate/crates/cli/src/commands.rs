use std::fmt::Write as _;

use serde_json::{json, Value};

use nonlocal_waves::global::{
    flat_bottom_residual, irrotational_residuals, rotational_residual, PhysicalParams, ResidualReport, TensionScaling,
};
use nonlocal_waves::harmonic::HarmonicField;
use nonlocal_waves::hierarchy::{
    self, DimensionlessParams, HierarchyState, LongWave, LongWaveState, OrderTag,
};
use nonlocal_waves::linear::{dispersion_omega2, estimate_sweep, linear_relation_residual, nonlinear_bernoulli_norm, ScaledFamily};
use nonlocal_waves::soliton::{self, Family};
use nonlocal_waves::{make_grid, Error, Field, Primitive, Wavevector};

use crate::{
    invalid, Boussinesq, CmdResult, Dispersion, Evolve, GlobalResidual, LinearSweep, Manifold, Output, SolitonAtlas,
    SolitonProfile,
};

fn positive(name: &str, v: f64) -> CmdResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        invalid(format!("{name} must be positive and finite, got {v}"))
    }
}

fn tension(s: &str) -> CmdResult<TensionScaling> {
    match s {
        "per-density" => Ok(TensionScaling::PerDensity),
        "raw" => Ok(TensionScaling::Raw),
        _ => invalid(format!("tension must be `per-density` or `raw`, got `{s}`")),
    }
}

pub fn dispersion(r: &Dispersion) -> CmdResult<Output> {
    positive("kmax", r.kmax)?;
    if r.n == 0 {
        return invalid("n must be positive");
    }
    let mut p = PhysicalParams::new(r.g, r.h0, r.sigma, r.rho, 0.0)?;
    p.tension = tension(&r.tension)?;
    let mut csv = String::from("kappa,omega2\n");
    let mut sup: f64 = 0.0;
    for i in 0..=r.n {
        let k = r.kmax * i as f64 / r.n as f64;
        let w2 = dispersion_omega2(k, &p);
        sup = sup.max(w2.abs());
        let _ = writeln!(csv, "{k:.16e},{w2:.16e}");
    }
    let w1 = dispersion_omega2(1.0, &p);
    Ok(Output {
        files: vec![("dispersion.csv".into(), csv)],
        summary: json!({ "omega2_sup": sup, "omega2_at_kappa_1": w1 }),
        message: format!("omega2(1) = {w1:.16e}"),
    })
}

pub fn global_residual(r: &GlobalResidual) -> CmdResult<Output> {
    positive("half_period", r.half_period)?;
    positive("h0", r.h0)?;
    let grid = make_grid(1, r.half_period, r.n)?;
    let (amp, wave) = (r.amp, r.wave);
    let eta = Field::from_fn(&grid, |x| amp * (wave * x[0]).cos());
    let flow = HarmonicField::single(r.k0, r.h0);
    let kinds: Vec<&str> = match r.kind.as_str() {
        "all" => vec!["flat", "irrotational", "rotational"],
        k @ ("flat" | "irrotational" | "rotational") => vec![k],
        k => return invalid(format!("unknown residual kind `{k}`")),
    };
    let p0 = PhysicalParams::new(r.g, r.h0, 0.0, 1.0, 0.0)?;
    let ks = grid.lattice_within(r.kappa_max.min(p0.kappa_guard()));
    let mut files = Vec::new();
    let mut summary = serde_json::Map::new();
    let mut worst: f64 = 0.0;
    let mut record = |name: &str, rep: &ResidualReport, files: &mut Vec<(String, String)>| {
        worst = worst.max(rep.sup_norm());
        summary.insert(name.to_string(), json!(rep.summary()));
        files.push((format!("global-residual.{name}.csv"), rep.to_csv(1)));
    };
    for kind in kinds {
        match kind {
            "flat" => {
                let s = flow.surface_state(&eta, 0.0)?;
                record("flat", &flat_bottom_residual(&s, &p0, &ks)?, &mut files);
            }
            "irrotational" => {
                let s = flow.surface_state(&eta, 0.0)?;
                let big_q = flow.bottom_trace(&grid, r.h0, None);
                let (a, b) = irrotational_residuals(&s, &big_q, &p0, &ks)?;
                record("irrotational-first", &a, &mut files);
                record("irrotational-second", &b, &mut files);
            }
            _ => {
                let p = PhysicalParams::new(r.g, r.h0, 0.0, 1.0, r.gamma)?;
                let s = flow.surface_state(&eta, r.gamma)?;
                record("rotational", &rotational_residual(&s, &p, &ks)?, &mut files);
            }
        }
    }
    summary.insert("sup_norm".into(), json!(worst));
    Ok(Output { files, summary: Value::Object(summary), message: format!("sup residual = {worst:.3e}") })
}

pub fn linear_sweep(r: &LinearSweep) -> CmdResult<Output> {
    positive("half_period", r.half_period)?;
    positive("kappa_scale", r.kappa_scale)?;
    let grid = make_grid(1, r.half_period, r.n)?;
    let fam = ScaledFamily::sech(&grid, r.h0)?;
    let p = PhysicalParams::new(r.g, r.h0, r.sigma, r.rho, 0.0)?;
    let sweep = match r.measure.as_str() {
        "relation" => estimate_sweep(|e| fam.state(e), |s, e| linear_relation_residual(s, &p, r.kappa_scale / e), &r.eps)?,
        "bernoulli" => estimate_sweep(|e| fam.state(e), |s, _| Ok(nonlinear_bernoulli_norm(s, &p)), &r.eps)?,
        m => return invalid(format!("measure must be `relation` or `bernoulli`, got `{m}`")),
    };
    let sup = sweep.errors.iter().cloned().fold(0.0, f64::max);
    Ok(Output {
        files: vec![("linear-sweep.csv".into(), sweep.to_csv())],
        summary: json!({ "fitted_slope": sweep.fitted_slope, "error_sup": sup }),
        message: format!("fitted slope = {:.6}", sweep.fitted_slope),
    })
}

pub fn evolve(r: &Evolve, seed: u64) -> CmdResult<Output> {
    let order: OrderTag = r.order.parse()?;
    let p = DimensionlessParams::new(r.eps, r.delta, r.gamma, r.sigma_hat)?;
    positive("dt", r.dt)?;
    if r.t_end.is_nan() || r.t_end < 0.0 {
        return invalid("t_end must be non-negative");
    }
    let grid = make_grid(1, r.half_period, r.n)?;
    let s0 = match r.init.as_str() {
        "gaussian" => {
            let (a, w) = (r.amp, r.width);
            HierarchyState::new(
                Field::from_fn(&grid, |x| a * (-(x[0] / w).powi(2)).exp()),
                Field::from_fn(&grid, |x| 0.5 * a * (-((x[0] - w) / w).powi(2)).exp()),
                0.0,
            )?
        }
        "random" => hierarchy::random_smooth_state(&grid, seed, 4, r.amp)?,
        i => return invalid(format!("init must be `gaussian` or `random`, got `{i}`")),
    };
    let steps = (r.t_end / r.dt).round() as usize;
    let (s, tr) = hierarchy::evolve(&s0, order, &p, r.dt, steps)?;
    let mut csv = String::from("t,hamiltonian,relative_drift\n");
    let h0 = tr.hamiltonian[0];
    for (t, h) in tr.times.iter().zip(&tr.hamiltonian) {
        let _ = writeln!(csv, "{t:.16e},{h:.16e},{:.16e}", (h - h0) / h0);
    }
    let drift = tr.max_relative_drift();
    Ok(Output {
        files: vec![("evolve.csv".into(), csv), ("evolve.final.csv".into(), s.to_csv())],
        summary: json!({
            "steps": steps,
            "max_relative_drift": drift,
            "eta_sup": s.eta.sup_norm(),
            "xi_sup": s.xi.sup_norm(),
        }),
        message: format!("order {order}: {steps} steps, max relative Hamiltonian drift {drift:.3e}"),
    })
}

pub fn boussinesq(r: &Boussinesq) -> CmdResult<Output> {
    positive("dt", r.dt)?;
    positive("guard", r.guard)?;
    if r.mode <= 0 {
        return invalid("mode must be positive");
    }
    let grid = make_grid(1, r.half_period, r.n)?;
    let k = grid.wavenumber(0, r.mode);
    let w = LongWave {
        kappa: r.kappa,
        sigma_hat: r.sigma_hat,
        cubic: r.cubic,
        cutoff: (r.cutoff > 0.0).then_some(r.cutoff),
    };
    let omega2 = w.omega2(k);
    let rate = if omega2 < 0.0 { (-omega2).sqrt() } else { 0.0 };
    let a = r.amp;
    let mut s = LongWaveState {
        xi: Primitive { slope: 0.0, periodic: Field::from_fn(&grid, |x| a * (k * x[0]).cos()) },
        xi_t: Field::from_fn(&grid, |x| rate * a * (k * x[0]).cos()),
        t: 0.0,
    };
    let amplitude = |f: &Field| -> CmdResult<f64> {
        Ok(f.fourier_integral(Wavevector::one_d(k))?.norm() / grid.half_period(0))
    };
    let a0 = amplitude(&s.xi.periodic)?;
    let steps = (r.t_end / r.dt).round() as usize;
    let mut csv = String::from("t,amplitude\n");
    let _ = writeln!(csv, "{:.16e},{a0:.16e}", 0.0);
    for _ in 0..steps {
        s = hierarchy::long3_rk4_step(&s, &w, r.dt)?;
        let sup = s.xi.periodic.sup_norm().max(s.xi_t.sup_norm());
        if !sup.is_finite() || sup > r.guard || s.xi.periodic.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::Overflow { t: s.t, amplitude: sup }.into());
        }
        let _ = writeln!(csv, "{:.16e},{:.16e}", s.t, amplitude(&s.xi.periodic)?);
    }
    let measured = if s.t > 0.0 { (amplitude(&s.xi.periodic)? / a0).ln() / s.t } else { 0.0 };
    Ok(Output {
        files: vec![("boussinesq.csv".into(), csv)],
        summary: json!({
            "k": k,
            "omega2": omega2,
            "analytic_rate": rate,
            "measured_rate": measured,
            "xi_sup": s.xi.periodic.sup_norm(),
        }),
        message: format!("k = {k}: omega2 = {omega2:.6e}, growth rate {measured:.12} (analytic {rate:.12})"),
    })
}

fn family(s: &str) -> CmdResult<Family> {
    match s {
        "elevated" => Ok(Family::Elevated),
        "depression" => Ok(Family::Depression),
        _ => invalid(format!("family must be `elevated` or `depression`, got `{s}`")),
    }
}

pub fn soliton_profile(r: &SolitonProfile) -> CmdResult<Output> {
    positive("box_scale", r.box_scale)?;
    let spec = soliton::coefficients(r.c, r.kappa, r.sigma_hat)?;
    let Some(alpha) = spec.alpha else {
        return invalid(format!("alpha^2 = {} is not positive: no real soliton scale", spec.alpha2));
    };
    let grid = make_grid(1, r.box_scale / alpha, r.n)?;
    let fam = family(&r.family)?;
    let (w, point) = if r.branch != 0.0 {
        let p = soliton::gamma_point_branch(&spec, r.branch)?;
        (soliton::profile(&grid, &p, &spec)?, p)
    } else {
        let p = soliton::gamma_point(&spec, fam)?;
        (soliton::profile(&grid, &p, &spec)?, p)
    };
    let mut csv = String::from("z,W\n");
    for (j, v) in w.values().iter().enumerate() {
        let _ = writeln!(csv, "{:.16e},{v:.16e}", grid.node(j)[0]);
    }
    let ode = soliton::ode_residual(&w, &spec);
    let pde = soliton::travelling_pde_residual(&point, &spec, &grid)?;
    let w0 = point.gamma1 / (1.0 + point.gamma2);
    Ok(Output {
        files: vec![("soliton-profile.csv".into(), csv)],
        summary: json!({
            "alpha2": spec.alpha2,
            "beta": spec.beta,
            "mu": spec.mu,
            "gamma1": point.gamma1,
            "gamma2": point.gamma2,
            "W0": w0,
            "W_sup": w.sup_norm(),
            "ode_residual": ode,
            "travelling_pde_residual": pde,
        }),
        message: format!("{} profile: W(0) = {w0:.12}, ode residual {ode:.2e}, pde residual {pde:.2e}", point.family),
    })
}

fn axis(list: &[f64], range: &[f64], name: &str) -> CmdResult<Vec<f64>> {
    if range.is_empty() {
        if list.is_empty() {
            return invalid(format!("{name} list is empty"));
        }
        return Ok(list.to_vec());
    }
    if range.len() != 3 || range[2] < 1.0 || range[2].fract() != 0.0 {
        return invalid(format!("{name}_range must be `start,end,count`"));
    }
    let n = range[2] as usize;
    Ok((0..n)
        .map(|i| if n == 1 { range[0] } else { range[0] + (range[1] - range[0]) * i as f64 / (n - 1) as f64 })
        .collect())
}

pub fn soliton_atlas(r: &SolitonAtlas) -> CmdResult<Output> {
    let cs = axis(&r.c, &r.c_range, "c")?;
    let ks = axis(&r.kappa, &r.kappa_range, "kappa")?;
    let ss = axis(&r.sigma_hat, &r.sigma_hat_range, "sigma_hat")?;
    let mut specs = Vec::with_capacity(cs.len() * ks.len() * ss.len());
    for &c in &cs {
        for &k in &ks {
            for &s in &ss {
                specs.push((c, k, s));
            }
        }
    }
    let rows = soliton::gamma_manifold_atlas(&specs);
    let defect = rows.iter().map(|r| r.manifold_defect).filter(|d| d.is_finite()).map(f64::abs).fold(0.0, f64::max);
    let mut message = String::new();
    let verdicts: Vec<Value> = specs
        .iter()
        .map(|&(c, k, s)| {
            let v = soliton::classify(c, k, s);
            if specs.len() <= 10 {
                let _ = writeln!(message, "(c, kappa, sigma_hat) = ({c}, {k}, {s}): verdict: {}", v.label());
            }
            json!({ "c": c, "kappa": k, "sigma_hat": s, "verdict": v.label() })
        })
        .collect();
    let _ = write!(message, "{} rows, max manifold defect {defect:.3e}", rows.len());
    Ok(Output {
        files: vec![("soliton-atlas.csv".into(), soliton::atlas_csv(&rows))],
        summary: json!({ "rows": rows.len(), "manifold_defect_sup": defect, "verdicts": verdicts }),
        message,
    })
}

pub fn manifold(r: &Manifold) -> CmdResult<Output> {
    let spec = soliton::coefficients(r.c, r.kappa, r.sigma_hat)?;
    let Some(topo) = spec.topology() else {
        return invalid(format!("alpha^2 = {} is not positive: the manifold is undefined", spec.alpha2));
    };
    let m = spec.mu_over_alpha2();
    let pts = soliton::manifold_samples(m, r.n, r.t_max)?;
    let mut csv = String::from("Gamma1,Gamma2,component,defect\n");
    let mut worst: f64 = 0.0;
    for (g1, g2, comp) in &pts {
        let d = g2 * g2 - m * g1 * g1 - 1.0;
        worst = worst.max(d.abs());
        let _ = writeln!(csv, "{g1:.16e},{g2:.16e},{comp},{d:.16e}");
    }
    Ok(Output {
        files: vec![("manifold.csv".into(), csv)],
        summary: json!({ "topology": topo.to_string(), "mu_over_alpha2": m, "manifold_defect_sup": worst, "points": pts.len() }),
        message: format!("{topo}: {} points, max defect {worst:.3e}", pts.len()),
    })
}
