use std::f64::consts::PI;

use central_spin::analysis::{
    compare_series, detect_revivals, revival_linearity, RevivalReport, RevivalSettings, TimeGrid, TimeSeries,
};
use central_spin::closed_form::{large_n_revival_time, phase_scan, HomogeneousDynamics, ModelParams, QubitState};
use central_spin::dicke::{BathSize, CoherentAngle};
use central_spin::ed::{conserved_checks, initial_state, CouplingProfile, SpectrumSet, Trajectory};
use central_spin::jc::{binomial_poisson_distance, correspondence_with_shift, JcInversion};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{ProfileName, ScenarioConfig, SweepParameter};
use crate::fail::Failure;
use crate::output::RunOutput;

/// Agreement required between exact diagonalization and the closed form.
pub const COMPARE_TOLERANCE: f64 = 1e-9;

fn params(cfg: &ScenarioConfig) -> Result<ModelParams, Failure> {
    let m = &cfg.model;
    Ok(ModelParams::new(m.n, m.field, m.coupling, m.longitudinal)?)
}

fn angle(cfg: &ScenarioConfig) -> Result<CoherentAngle, Failure> {
    Ok(CoherentAngle::new(cfg.model.theta)?)
}

fn grid(cfg: &ScenarioConfig) -> Result<TimeGrid, Failure> {
    Ok(TimeGrid::linspace(cfg.time.start, cfg.time.end, cfg.sample_count())?)
}

fn settings(cfg: &ScenarioConfig) -> RevivalSettings {
    RevivalSettings {
        min_prominence: cfg.analysis.min_prominence,
        smooth_window: cfg.analysis.smooth_window,
        collapse_gap: cfg.analysis.collapse_gap,
    }
}

fn profile(cfg: &ScenarioConfig, alpha: f64) -> Result<CouplingProfile, Failure> {
    let m = &cfg.model;
    let p = &cfg.profile;
    let built = match p.kind {
        ProfileName::Uniform => CouplingProfile::uniform(m.n, m.coupling, m.longitudinal),
        ProfileName::Exponential => CouplingProfile::exponential(m.n, m.coupling, m.longitudinal, alpha),
        ProfileName::Integrable => CouplingProfile::integrable(m.n, m.coupling, alpha, p.constant),
        ProfileName::Explicit => CouplingProfile::explicit(p.transverse.clone(), p.longitudinal.clone()),
    };
    built.map_err(|e| Failure::Config(format!("profile: {e}")))
}

fn qubit_columns(rho: &QubitState) -> [f64; 5] {
    [rho.a, rho.b.re, rho.b.im, rho.purity(), rho.von_neumann_entropy()]
}

fn revival_json(report: &RevivalReport) -> serde_json::Value {
    json!({
        "revival_times": report.revival_times(),
        "collapses": report.collapses,
        "collapse_gap": report.collapse_gap,
        "prominent_peaks": report.peaks.peaks.len(),
    })
}

fn ed_run(cfg: &ScenarioConfig, profile: &CouplingProfile, grid: &TimeGrid) -> Result<Trajectory, Failure> {
    let n = BathSize::new(cfg.model.n)?;
    let psi = initial_state(n, angle(cfg)?, cfg.run.ed_cap)?;
    let spectra = SpectrumSet::for_state(profile, cfg.model.field, &psi, cfg.run.ed_cap, None)?;
    Ok(spectra.trajectory(&psi, grid)?)
}

pub fn homogeneous(cfg: &ScenarioConfig, out: &mut RunOutput) -> Result<(), Failure> {
    let dynamics = HomogeneousDynamics::new(params(cfg)?, angle(cfg)?);
    let grid = grid(cfg)?;
    let rows: Vec<Vec<f64>> = grid
        .points()
        .par_iter()
        .map(|&t| {
            let rho = dynamics.density_matrix(t);
            let mut row = vec![t, dynamics.polarization(t)];
            row.extend(qubit_columns(&rho));
            row
        })
        .collect();
    out.table(
        "homogeneous",
        &["t", "sz0", "rho_upup", "rho_updown_re", "rho_updown_im", "purity", "entropy"],
        &rows,
    )?;

    let series = TimeSeries::from_grid(&grid, rows.iter().map(|r| r[1]).collect(), "sz0")?;
    let report = detect_revivals(&series, settings(cfg))?;
    let predicted: Vec<f64> = (1..=cfg.analysis.revivals)
        .map(|m| dynamics.revival_time(m))
        .collect::<Result<_, _>>()
        .unwrap_or_default();
    out.json(
        "homogeneous_summary",
        &json!({
            "detected": revival_json(&report),
            "predicted_revival_times": predicted,
            "frequencies": dynamics.frequencies().rabi,
        }),
    )
}

pub fn inhomogeneous(cfg: &ScenarioConfig, out: &mut RunOutput) -> Result<(), Failure> {
    let profile = profile(cfg, cfg.profile.alpha)?;
    let grid = grid(cfg)?;
    let traj = ed_run(cfg, &profile, &grid)?;
    let rows: Vec<Vec<f64>> = (0..traj.len())
        .map(|i| {
            let mut row = vec![traj.times[i], traj.sz0[i], traj.pbath[i]];
            row.extend(qubit_columns(&traj.rho[i]));
            row.extend([traj.norm[i], traj.sz_total[i], traj.energy[i]]);
            row
        })
        .collect();
    out.table(
        "inhomogeneous",
        &[
            "t",
            "sz0",
            "pbath",
            "rho_upup",
            "rho_updown_re",
            "rho_updown_im",
            "purity",
            "entropy",
            "norm",
            "sz_total",
            "energy",
        ],
        &rows,
    )?;
    let check = conserved_checks(&traj);
    out.json(
        "inhomogeneous_summary",
        &json!({
            "profile": format!("{:?}", profile.kind()),
            "min_pbath": traj.pbath.iter().copied().fold(f64::INFINITY, f64::min),
            "norm_drift": check.norm_drift,
            "sz_total_drift": check.sz_total_drift,
            "energy_drift": check.energy_drift,
            "conservation_passed": check.passed(),
        }),
    )?;
    if !check.passed() {
        return Err(Failure::Numerical(format!(
            "conservation drift above {:e}: norm {:e}, Sz {:e}, energy {:e}",
            check.tolerance, check.norm_drift, check.sz_total_drift, check.energy_drift
        )));
    }
    Ok(())
}

pub fn jc(cfg: &ScenarioConfig, out: &mut RunOutput) -> Result<(), Failure> {
    let p = params(cfg)?;
    let theta = angle(cfg)?;
    let exact = HomogeneousDynamics::new(p, theta);
    let jc = correspondence_with_shift(&p, theta, cfg.jc.light_shift);
    let limit = JcInversion::new(jc, cfg.jc.eps_tail)?;
    let grid = grid(cfg)?;
    let rows: Vec<Vec<f64>> = grid
        .points()
        .par_iter()
        .map(|&t| {
            let two_sz = 2.0 * exact.polarization(t);
            let w = limit.at(t);
            vec![t, two_sz, w, two_sz - w]
        })
        .collect();
    out.table("jc", &["t", "two_sz0", "w_jc", "difference"], &rows)?;
    let deviation = rows.iter().fold(0.0f64, |m, r| m.max(r[3].abs()));
    out.json(
        "jc_summary",
        &json!({
            "detuning": jc.detuning,
            "coupling": jc.coupling,
            "mean_photons": jc.mean_photons,
            "effective_detuning": jc.effective_detuning(),
            "poisson_n_max": limit.weights().n_max,
            "max_deviation": deviation,
            "binomial_poisson_distance": binomial_poisson_distance(&p, theta),
        }),
    )
}

pub fn compare(cfg: &ScenarioConfig, out: &mut RunOutput) -> Result<(), Failure> {
    if cfg.profile.kind != ProfileName::Uniform {
        return Err(Failure::Config(
            "profile.kind: the closed form only covers uniform couplings".into(),
        ));
    }
    let profile = profile(cfg, 0.0)?;
    let dynamics = HomogeneousDynamics::new(params(cfg)?, angle(cfg)?);
    let grid = grid(cfg)?;
    let traj = ed_run(cfg, &profile, &grid)?;
    let closed: Vec<QubitState> = grid.points().par_iter().map(|&t| dynamics.density_matrix(t)).collect();
    let rows: Vec<Vec<f64>> = (0..traj.len())
        .map(|i| {
            let c = &closed[i];
            let e = &traj.rho[i];
            vec![
                traj.times[i],
                c.a - 0.5,
                traj.sz0[i],
                c.b.re,
                e.b.re,
                c.b.im,
                e.b.im,
                (c.b - e.b).norm(),
            ]
        })
        .collect();
    out.table(
        "compare",
        &[
            "t",
            "sz0_closed",
            "sz0_ed",
            "coherence_re_closed",
            "coherence_re_ed",
            "coherence_im_closed",
            "coherence_im_ed",
            "coherence_abs_diff",
        ],
        &rows,
    )?;
    let sz_closed = TimeSeries::from_grid(&grid, closed.iter().map(|c| c.a - 0.5).collect(), "sz0 closed form")?;
    let sz_diff = compare_series(&sz_closed, &traj.sz0_series()?)?;
    let coherence = rows.iter().fold(0.0f64, |m, r| m.max(r[7]));
    let passed = sz_diff.max_abs <= COMPARE_TOLERANCE && coherence <= COMPARE_TOLERANCE;
    out.json(
        "compare_summary",
        &json!({
            "sz0_max_abs": sz_diff.max_abs,
            "sz0_rms": sz_diff.rms,
            "coherence_max_abs": coherence,
            "tolerance": COMPARE_TOLERANCE,
            "passed": passed,
        }),
    )?;
    if !passed {
        return Err(Failure::Numerical(format!(
            "closed form and exact diagonalization differ by {:e} (S0z) / {:e} (coherence)",
            sz_diff.max_abs, coherence
        )));
    }
    Ok(())
}

pub fn revivals(cfg: &ScenarioConfig, out: &mut RunOutput) -> Result<(), Failure> {
    let p = params(cfg)?;
    let dynamics = HomogeneousDynamics::new(p, angle(cfg)?);
    let grid = grid(cfg)?;
    let series = dynamics.polarization_series_par(&grid)?;
    let report = detect_revivals(&series, settings(cfg))?;
    let detected = report.revival_times();
    let rows: Vec<Vec<f64>> = (1..=cfg.analysis.revivals)
        .map(|m| {
            Ok(vec![
                m as f64,
                detected.get(m - 1).copied().unwrap_or(f64::NAN),
                dynamics.revival_time(m)?,
                large_n_revival_time(&p, m)?,
            ])
        })
        .collect::<Result<_, Failure>>()?;
    out.table("revivals", &["m", "detected", "predicted", "large_n"], &rows)?;
    out.json("revivals_summary", &revival_json(&report))
}

fn first_collapse_times(dynamics: &HomogeneousDynamics, grid: &TimeGrid, s: RevivalSettings) -> Option<Vec<f64>> {
    let series = dynamics.polarization_series_par(grid).ok()?;
    let report = detect_revivals(&series, s).ok()?;
    let &(lo, hi) = report.collapses.first()?;
    let times: Vec<f64> = grid.points().iter().copied().filter(|&t| t >= lo && t <= hi).collect();
    (!times.is_empty()).then_some(times)
}

pub fn fidelity_scan(cfg: &ScenarioConfig, out: &mut RunOutput) -> Result<(), Failure> {
    let dynamics = HomogeneousDynamics::new(params(cfg)?, angle(cfg)?);
    let grid = grid(cfg)?;
    let k = cfg.fidelity.phases;
    let phases: Vec<f64> = (0..k).map(|i| 2.0 * PI * i as f64 / k as f64).collect();
    let states: Vec<QubitState> = grid.points().par_iter().map(|&t| dynamics.density_matrix(t)).collect();
    let mut rows = Vec::with_capacity(states.len() * k);
    for (rho, &t) in states.iter().zip(grid.points()) {
        for &phi in &phases {
            rows.push(vec![t, phi, rho.fidelity(central_spin::closed_form::EquatorialPhase::new(phi)?)]);
        }
    }
    out.table("fidelity_scan", &["t", "phi", "fidelity"], &rows)?;

    let overall = phase_scan(&dynamics, grid.points(), k)?.best();
    let collapse = match first_collapse_times(&dynamics, &grid, settings(cfg)) {
        Some(times) => {
            let (phi, f, t) = phase_scan(&dynamics, &times, k)?.best();
            json!({ "start": times[0], "end": times[times.len() - 1], "best_phase": phi, "max_fidelity": f, "time": t })
        }
        None => serde_json::Value::Null,
    };
    out.json(
        "fidelity_summary",
        &json!({
            "overall": { "best_phase": overall.0, "max_fidelity": overall.1, "time": overall.2 },
            "first_collapse": collapse,
        }),
    )
}

pub fn sweep(cfg: &ScenarioConfig, out: &mut RunOutput) -> Result<(), Failure> {
    if cfg.sweep.values.is_empty() {
        return Err(Failure::Config("sweep.values: nothing to sweep".into()));
    }
    match cfg.sweep.parameter {
        SweepParameter::N => sweep_n(cfg, out),
        SweepParameter::Alpha => sweep_alpha(cfg, out),
        SweepParameter::Theta => sweep_theta(cfg, out),
    }
}

fn sweep_n(cfg: &ScenarioConfig, out: &mut RunOutput) -> Result<(), Failure> {
    let rows: Vec<Vec<f64>> = cfg
        .sweep
        .values
        .par_iter()
        .enumerate()
        .map(|(i, &v)| {
            if v < 1.0 || v.fract() != 0.0 {
                return Err(Failure::Config(format!("sweep.values[{i}]: {v} is not a bath size")));
            }
            let mut c = cfg.clone();
            c.model.n = v as usize;
            let p = params(&c)?;
            let dynamics = HomogeneousDynamics::new(p, angle(&c)?);
            // long enough for the requested revivals at the large-N rate
            let horizon = (c.analysis.revivals as f64 + 0.5) * large_n_revival_time(&p, 1)?;
            c.time.start = 0.0;
            c.time.end = horizon.max(dynamics.revival_time(c.analysis.revivals)? * 1.2);
            c.time.points = None;
            let series = dynamics.polarization_series(&grid(&c)?)?;
            let report = detect_revivals(&series, settings(&c))?;
            Ok(vec![
                v,
                report.revival_times().first().copied().unwrap_or(f64::NAN),
                dynamics.revival_time(1)?,
                large_n_revival_time(&p, 1)?,
            ])
        })
        .collect::<Result<_, Failure>>()?;
    out.table("sweep_n", &["n", "detected", "predicted", "large_n"], &rows)?;
    let points: Vec<(f64, f64)> = rows.iter().filter(|r| r[1].is_finite()).map(|r| (r[0], r[1])).collect();
    let fit = revival_linearity(&points).ok();
    out.json(
        "sweep_n_summary",
        &json!({
            "slope": fit.map(|f| f.slope),
            "intercept": fit.map(|f| f.intercept),
            "residual": fit.map(|f| f.residual),
            "large_n_slope": PI / cfg.model.coupling.abs(),
        }),
    )
}

fn sweep_alpha(cfg: &ScenarioConfig, out: &mut RunOutput) -> Result<(), Failure> {
    if !matches!(cfg.profile.kind, ProfileName::Exponential | ProfileName::Integrable | ProfileName::Uniform) {
        return Err(Failure::Config("profile.kind: α sweeps need a generated profile".into()));
    }
    let grid = grid(cfg)?;
    let mut c = cfg.clone();
    if c.profile.kind == ProfileName::Uniform {
        c.profile.kind = ProfileName::Exponential;
    }
    let rows: Vec<Vec<f64>> = cfg
        .sweep
        .values
        .par_iter()
        .map(|&alpha| {
            let profile = profile(&c, alpha)?;
            let traj = ed_run(&c, &profile, &grid)?;
            let check = conserved_checks(&traj);
            let n = traj.len() as f64;
            let mean = traj.sz0.iter().sum::<f64>() / n;
            let spread = (traj.sz0.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n).sqrt();
            Ok(vec![
                alpha,
                traj.pbath.iter().copied().fold(f64::INFINITY, f64::min),
                *traj.pbath.last().expect("non-empty grid"),
                mean,
                spread,
                if check.passed() { 1.0 } else { 0.0 },
            ])
        })
        .collect::<Result<_, Failure>>()?;
    let failed: Vec<f64> = rows.iter().filter(|r| r[5] == 0.0).map(|r| r[0]).collect();
    out.table(
        "sweep_alpha",
        &["alpha", "min_pbath", "final_pbath", "mean_sz0", "sz0_spread", "conserved"],
        &rows,
    )?;
    if !failed.is_empty() {
        return Err(Failure::Numerical(format!("conservation drift for α in {failed:?}")));
    }
    Ok(())
}

fn sweep_theta(cfg: &ScenarioConfig, out: &mut RunOutput) -> Result<(), Failure> {
    let grid = grid(cfg)?;
    let rows: Vec<Vec<f64>> = cfg
        .sweep
        .values
        .par_iter()
        .map(|&theta| {
            let mut c = cfg.clone();
            c.model.theta = theta;
            let dynamics = HomogeneousDynamics::new(params(&c)?, angle(&c)?);
            Ok(match first_collapse_times(&dynamics, &grid, settings(&c)) {
                Some(times) => {
                    let (phi, f, t) = phase_scan(&dynamics, &times, c.fidelity.phases)?.best();
                    vec![theta, phi, f, t, times[0], times[times.len() - 1]]
                }
                None => vec![theta, f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN],
            })
        })
        .collect::<Result<_, Failure>>()?;
    out.table(
        "sweep_theta",
        &["theta", "best_phase", "max_fidelity", "time", "collapse_start", "collapse_end"],
        &rows,
    )
}
