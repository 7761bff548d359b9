//! The `run` pipeline: generate, flow, transform, certify, write.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::config::ExperimentConfig;
use super::generators::generate_initial;
use super::timeseries::{records_from_run, write_csv};
use crate::dynamics::{self, CrossValidationReport, FlowConfig};
use crate::error::{Result, VfeError};
use crate::hasimoto::{self, CertificationReport, PipelineRun};

/// Each refinement must shrink the differences at this order unless the
/// finer level already sits at the roundoff floor.
pub const CROSS_MIN_ORDER: f64 = 2.0;
const CROSS_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub run: PipelineRun,
    pub certification: Option<CertificationReport>,
    pub cross_validation: Option<CrossValidationReport>,
    pub summary: String,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.certification.as_ref().is_none_or(|c| c.pass) && self.cross_validation.as_ref().is_none_or(cross_passes)
    }
}

pub fn cross_passes(r: &CrossValidationReport) -> bool {
    let ok = |coarse: f64, fine: f64| fine < CROSS_FLOOR || (coarse / fine).log2() >= CROSS_MIN_ORDER;
    match r.levels.as_slice() {
        [only] => only.final_kappa_diff().max(only.final_tau_diff()) < CROSS_FLOOR,
        levels => levels.windows(2).all(|w| {
            ok(w[0].final_kappa_diff(), w[1].final_kappa_diff()) && ok(w[0].final_tau_diff(), w[1].final_tau_diff())
        }),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| VfeError::Io(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, bytes).map_err(|e| VfeError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Executes a configured experiment and writes the time series and summary.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let initial = generate_initial(&cfg.generator, &cfg.params, cfg.space, cfg.n)?;
    let flow = FlowConfig { cfl: cfg.cfl, reproject_every: cfg.reproject_every, ..FlowConfig::default() };
    flow.check_dt(cfg.dt, initial.ds())?;
    let (_, dt) = dynamics::step_plan(cfg.t_end, cfg.dt)?;

    let (run, certification) = if cfg.certify {
        let fine = dynamics::refine_uniform(&initial, 2)?;
        let (a, b) = rayon::join(
            || hasimoto::run_pipeline(&initial, cfg.t_end, dt, &flow, cfg.base_index),
            || hasimoto::run_pipeline(&fine, cfg.t_end, dt / 4.0, &flow, 2 * cfg.base_index),
        );
        let (a, b) = (a?, b?);
        let rep = hasimoto::certification_from_runs(&a, &b);
        (a, Some(rep))
    } else {
        (hasimoto::run_pipeline(&initial, cfg.t_end, dt, &flow, cfg.base_index)?, None)
    };
    let cross_validation = if cfg.cross_validate {
        Some(dynamics::cross_validate(&initial, cfg.t_end, dt, cfg.levels, &flow)?)
    } else {
        None
    };

    let mut csv = Vec::new();
    write_csv(&mut csv, &records_from_run(&run, cfg.stride))?;
    write_file(&cfg.output, &csv)?;

    let mut out = RunOutcome { run, certification, cross_validation, summary: String::new() };
    out.summary = summary(cfg, &out);
    write_file(&cfg.summary, out.summary.as_bytes())?;
    Ok(out)
}

fn summary(cfg: &ExperimentConfig, o: &RunOutcome) -> String {
    let r = &o.run;
    let mut s = String::new();
    let _ = writeln!(s, "model: {} K0={}", cfg.space.kind(), cfg.space.k0());
    let _ = writeln!(s, "initial: {} {:?}", cfg.generator, cfg.params);
    let _ = writeln!(s, "samples: {} ds={:.6e} length={:.12e}", r.n, r.ds, r.final_filament.length());
    let _ = writeln!(s, "steps: {} dt={:.6e} t_end={}", r.times.len() - 1, r.dt, cfg.t_end);
    let last = r.times.len() - 1;
    let kmin = r.kappa[last].iter().cloned().fold(f64::INFINITY, f64::min);
    let kmax = r.kappa[last].iter().cloned().fold(0.0, f64::max);
    let _ = writeln!(s, "final kappa range: [{kmin:.12e}, {kmax:.12e}]");
    let _ = writeln!(s, "total torsion: {:.12e}", r.fields[last].total_torsion);
    let _ = writeln!(s, "max arclength drift: {:.6e}", r.arc_drift.iter().cloned().fold(0.0, f64::max));
    let _ = writeln!(s, "max constraint residual: {:.6e}", r.constraint.iter().cloned().fold(0.0, f64::max));
    let _ = writeln!(s, "max NLS residual: {:.6e}", r.max_residual());
    if let Some(c) = &o.certification {
        for l in &c.levels {
            let _ = writeln!(s, "certify level N={} dt={:.6e} steps={} residual={:.6e}", l.n, l.dt, l.steps, l.max_residual);
        }
        let _ = writeln!(s, "certify order: {:.4}", c.order);
        let _ = writeln!(s, "certification: {}", if c.pass { "PASS" } else { "FAIL" });
    }
    if let Some(x) = &o.cross_validation {
        for l in &x.levels {
            let _ = writeln!(
                s,
                "cross level N={} dt={:.6e} kappa_diff={:.6e} tau_diff={:.6e}",
                l.n,
                l.dt,
                l.final_kappa_diff(),
                l.final_tau_diff()
            );
        }
        let _ = writeln!(s, "cross orders kappa={:?} tau={:?}", x.kappa_orders, x.tau_orders);
        let _ = writeln!(s, "cross-validation: {}", if cross_passes(x) { "PASS" } else { "FAIL" });
    }
    s
}
