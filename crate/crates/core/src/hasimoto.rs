//! Hasimoto transform `psi = kappa exp(i int tau)`, the gauge phase `A(t)`
//! and numerical checks of `-i Psi_t = Psi_ss + |Psi|^2 Psi / 2`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::{self, FlowConfig, FlowState};
use crate::error::{Result, VfeError};
use crate::filament::ClosedFilament;
use crate::spectral;

/// Order below which a two-level certification fails.
pub const CERTIFY_MIN_ORDER: f64 = 1.8;

/// Residuals below this on both levels count as resolved: stationary
/// curves leave only roundoff and the `O(dt^2)` time-difference error.
pub const CERTIFY_EXACT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct HasimotoField {
    pub psi: Vec<Complex64>,
    /// Full-loop torsion integral, the seam phase of `psi`.
    pub total_torsion: f64,
    /// Time integral of `A` up to this field's time.
    pub gauge_accumulator: f64,
    pub base_index: usize,
}

/// Cumulative trapezoid of a periodic field starting at `base_index`, going
/// forward around the loop. Returns the running integral and the full-loop
/// value.
pub fn cumulative_trapezoid(values: &[f64], ds: f64, base_index: usize) -> (Vec<f64>, f64) {
    let n = values.len();
    let mut out = vec![0.0; n];
    let mut acc = 0.0;
    for j in 1..n {
        let i = (base_index + j) % n;
        let prev = (base_index + j - 1) % n;
        acc += 0.5 * ds * (values[prev] + values[i]);
        out[i] = acc;
    }
    let last = (base_index + n - 1) % n;
    let total = acc + 0.5 * ds * (values[last] + values[base_index]);
    (out, total)
}

fn check_fields(kappa: &[f64], tau: &[f64], ds: f64, base_index: usize) -> Result<()> {
    if kappa.len() != tau.len() || kappa.is_empty() {
        return Err(VfeError::Usage(format!("kappa and tau lengths differ: {} vs {}", kappa.len(), tau.len())));
    }
    if base_index >= kappa.len() {
        return Err(VfeError::Usage(format!("base index {base_index} out of range for {} samples", kappa.len())));
    }
    if !(ds > 0.0) {
        return Err(VfeError::Usage(format!("spacing must be positive, got {ds}")));
    }
    if let Some(i) = kappa.iter().position(|k| !(*k > 0.0)) {
        return Err(VfeError::Usage(format!("curvature must be positive, kappa[{i}] = {}", kappa[i])));
    }
    Ok(())
}

pub fn hasimoto_transform(kappa: &[f64], tau: &[f64], ds: f64, base_index: usize) -> Result<HasimotoField> {
    check_fields(kappa, tau, ds, base_index)?;
    let (rho, total) = cumulative_trapezoid(tau, ds, base_index);
    let psi = kappa.iter().zip(rho.iter()).map(|(k, r)| Complex64::from_polar(*k, *r)).collect();
    Ok(HasimotoField { psi, total_torsion: total, gauge_accumulator: 0.0, base_index })
}

/// `kappa_ss / kappa - tau^2 + kappa^2 / 2` at `base_index`.
pub fn gauge_phase(kappa: &[f64], tau: &[f64], ds: f64, base_index: usize) -> Result<f64> {
    check_fields(kappa, tau, ds, base_index)?;
    let kss = spectral::derivative(kappa, ds, 2);
    let (k, t) = (kappa[base_index], tau[base_index]);
    Ok(kss[base_index] / k - t * t + 0.5 * k * k)
}

/// Trapezoid time integral of `A`, one value per time level.
pub fn gauge_accumulators(a_series: &[f64], dt: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(a_series.len());
    let mut acc = 0.0;
    for (j, a) in a_series.iter().enumerate() {
        if j > 0 {
            acc += 0.5 * dt * (a_series[j - 1] + a);
        }
        out.push(acc);
    }
    out
}

/// `Psi_t = exp(i int_0^t A) psi_t` for every time level.
pub fn corrected_field(history: &[HasimotoField], a_series: &[f64], dt: f64) -> Result<Vec<Vec<Complex64>>> {
    if history.len() != a_series.len() {
        return Err(VfeError::Usage(format!(
            "time grids differ: {} fields vs {} gauge values",
            history.len(),
            a_series.len()
        )));
    }
    Ok(history
        .iter()
        .zip(gauge_accumulators(a_series, dt))
        .map(|(h, g)| {
            let ph = Complex64::from_polar(1.0, g);
            h.psi.iter().map(|p| p * ph).collect()
        })
        .collect())
}

/// Relative L2 norm of `R = -i Psi_t - Psi_ss - |Psi|^2 Psi / 2` at every
/// interior time level. `Psi_t` uses centered differences and `Psi_ss` the
/// quasi-periodic spectral derivative with seam phase `monodromy[j]`
/// (a single value applies to all levels).
pub fn nls_residual(psi: &[Vec<Complex64>], dt: f64, ds: f64, monodromy: &[f64], base_index: usize) -> Result<Vec<f64>> {
    if psi.len() < 3 {
        return Err(VfeError::Usage(format!("need at least 3 time levels, got {}", psi.len())));
    }
    if monodromy.len() != 1 && monodromy.len() != psi.len() {
        return Err(VfeError::Usage("monodromy must be a single value or one per time level".into()));
    }
    if !(dt > 0.0) || !(ds > 0.0) {
        return Err(VfeError::Usage(format!("need dt > 0 and ds > 0, got {dt} and {ds}")));
    }
    let n = psi[0].len();
    if psi.iter().any(|p| p.len() != n) || base_index >= n {
        return Err(VfeError::Usage("time levels must share one sample grid containing the base index".into()));
    }
    let theta = |j: usize| if monodromy.len() == 1 { monodromy[0] } else { monodromy[j] };
    Ok((1..psi.len() - 1)
        .into_par_iter()
        .map(|j| {
            let pss = spectral::quasi_periodic_derivative(&psi[j], ds, theta(j), base_index, 2);
            let (mut r2, mut d2, mut c2) = (0.0, 0.0, 0.0);
            for i in 0..n {
                let p = psi[j][i];
                let pt = (psi[j + 1][i] - psi[j - 1][i]) / (2.0 * dt);
                let cubic = p * (0.5 * p.norm_sqr());
                let r = -Complex64::i() * pt - pss[i] - cubic;
                r2 += r.norm_sqr();
                d2 += pss[i].norm_sqr();
                c2 += cubic.norm_sqr();
            }
            r2.sqrt() / (d2.sqrt() + c2.sqrt())
        })
        .collect())
}

/// Samples of the helix solution `c exp(i (b s + w t))`, `w = c^2/2 - b^2`,
/// on `n` points of a loop of length `length` measured from `base_index`.
/// Returns the history and its seam phase `b L`.
pub fn plane_wave(c: f64, b: f64, n: usize, length: f64, dt: f64, levels: usize, base_index: usize) -> (Vec<Vec<Complex64>>, f64) {
    let ds = length / n as f64;
    let w = 0.5 * c * c - b * b;
    let hist = (0..levels)
        .map(|j| {
            let t = j as f64 * dt;
            (0..n)
                .map(|i| Complex64::from_polar(c, b * spectral::seam_coordinate(i, base_index, n, ds) + w * t))
                .collect()
        })
        .collect();
    (hist, b * length)
}

/// Moves the seam of a quasi-periodic history from `base_index` to
/// `new_base`: samples ahead of the new seam pick up `exp(i monodromy)` and
/// everything is multiplied by `phase`.
pub fn rebase_history(
    psi: &[Vec<Complex64>],
    monodromy: &[f64],
    base_index: usize,
    new_base: usize,
    phase: f64,
) -> Vec<Vec<Complex64>> {
    psi.iter()
        .enumerate()
        .map(|(j, p)| {
            let theta = if monodromy.len() == 1 { monodromy[0] } else { monodromy[j] };
            let seam = Complex64::from_polar(1.0, theta);
            let c = Complex64::from_polar(1.0, phase);
            let n = p.len();
            (0..n)
                .map(|i| {
                    let old = spectral::seam_coordinate(i, base_index, n, 1.0);
                    let new = spectral::seam_coordinate(i, new_base, n, 1.0);
                    // Samples between the two seams wrap once around the loop.
                    if new > old { p[i] * c * seam } else { p[i] * c }
                })
                .collect()
        })
        .collect()
}

/// Everything recorded while flowing a filament and transforming it.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub n: usize,
    pub ds: f64,
    pub dt: f64,
    pub times: Vec<f64>,
    pub kappa: Vec<Vec<f64>>,
    pub tau: Vec<Vec<f64>>,
    /// Transformed fields with the gauge accumulator filled in.
    pub fields: Vec<HasimotoField>,
    pub gauge: Vec<f64>,
    pub corrected: Vec<Vec<Complex64>>,
    /// Residual per time level; `NaN` at the two endpoints.
    pub residuals: Vec<f64>,
    pub arc_drift: Vec<f64>,
    pub constraint: Vec<f64>,
    pub final_filament: ClosedFilament,
}

impl PipelineRun {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().filter(|r| !r.is_nan()).cloned().fold(0.0, f64::max)
    }

    pub fn monodromy(&self) -> Vec<f64> {
        self.fields.iter().map(|f| f.total_torsion).collect()
    }
}

/// Flows `initial` to `t_end` with the extrinsic integrator, then builds
/// `psi`, `A`, `Psi` and the residual history. Sample labels are material,
/// so `base_index` follows the same fluid particle; optional reprojection
/// moves labels only by the tolerated spacing drift.
pub fn run_pipeline(initial: &ClosedFilament, t_end: f64, dt: f64, cfg: &FlowConfig, base_index: usize) -> Result<PipelineRun> {
    let (steps, dt) = dynamics::step_plan(t_end, dt)?;
    let ds = initial.ds();
    let mut state = FlowState::new(initial.clone())?;
    let mut times = vec![0.0];
    let mut kappa = vec![state.frenet.kappa.clone()];
    let mut tau = vec![state.frenet.tau.clone()];
    let mut arc_drift = vec![0.0];
    let mut constraint = vec![state.constraint_residual()];
    for _ in 0..steps {
        state = dynamics::step_extrinsic(&state, dt, cfg)?;
        times.push(state.t);
        kappa.push(state.frenet.kappa.clone());
        tau.push(state.frenet.tau.clone());
        arc_drift.push(state.arc_drift);
        constraint.push(state.constraint_residual());
    }
    let mut fields = kappa
        .iter()
        .zip(tau.iter())
        .map(|(k, t)| hasimoto_transform(k, t, ds, base_index))
        .collect::<Result<Vec<_>>>()?;
    let a_series = kappa
        .iter()
        .zip(tau.iter())
        .map(|(k, t)| gauge_phase(k, t, ds, base_index))
        .collect::<Result<Vec<_>>>()?;
    for (f, g) in fields.iter_mut().zip(gauge_accumulators(&a_series, dt)) {
        f.gauge_accumulator = g;
    }
    let corrected = corrected_field(&fields, &a_series, dt)?;
    let monodromy: Vec<f64> = fields.iter().map(|f| f.total_torsion).collect();
    let mut residuals = vec![f64::NAN];
    residuals.extend(nls_residual(&corrected, dt, ds, &monodromy, base_index)?);
    residuals.push(f64::NAN);
    Ok(PipelineRun {
        n: initial.len(),
        ds,
        dt,
        times,
        kappa,
        tau,
        fields,
        gauge: a_series,
        corrected,
        residuals,
        arc_drift,
        constraint,
        final_filament: state.filament,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificationLevel {
    pub n: usize,
    pub dt: f64,
    pub steps: usize,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificationReport {
    pub levels: Vec<CertificationLevel>,
    pub order: f64,
    pub pass: bool,
}

/// Runs the pipeline on `initial` and on its 2x refinement with a quarter
/// of the step, and passes when the residual falls at order >= 1.8 (or is
/// already at roundoff on both levels).
pub fn certify_nls(initial: &ClosedFilament, t_end: f64, dt: f64, cfg: &FlowConfig, base_index: usize) -> Result<CertificationReport> {
    let (_, dt) = dynamics::step_plan(t_end, dt)?;
    let fine = dynamics::refine_uniform(initial, 2)?;
    let (coarse, fine) = rayon::join(
        || run_pipeline(initial, t_end, dt, cfg, base_index),
        || run_pipeline(&fine, t_end, dt / 4.0, cfg, 2 * base_index),
    );
    Ok(certification_from_runs(&coarse?, &fine?))
}

/// Certification verdict from a run and its refinement.
pub fn certification_from_runs(coarse: &PipelineRun, fine: &PipelineRun) -> CertificationReport {
    let levels: Vec<CertificationLevel> = [coarse, fine]
        .iter()
        .map(|r| CertificationLevel { n: r.n, dt: r.dt, steps: r.times.len() - 1, max_residual: r.max_residual() })
        .collect();
    let order = (levels[0].max_residual / levels[1].max_residual).log2();
    let exact = levels.iter().all(|l| l.max_residual < CERTIFY_EXACT);
    let pass = exact || order >= CERTIFY_MIN_ORDER;
    CertificationReport { levels, order, pass }
}
