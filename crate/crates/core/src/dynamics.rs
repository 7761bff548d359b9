//! Time evolution under the binormal flow `d alpha/dt = kappa B`, and the
//! intrinsic curvature/torsion system used to cross-check it.

use rayon::prelude::*;

use crate::error::{Result, VfeError};
use crate::filament::{self, ClosedFilament, FrenetField};
use crate::geometry::{Ambient, SpaceForm};
use crate::spectral;

/// Stability constant of the dispersive bound `dt <= cfl * ds^2`.
pub const DEFAULT_CFL: f64 = 0.25;

/// Allowed arclength drift since `t = 0`, relative to `ds`.
pub const TOL_ARCLENGTH_DRIFT: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowConfig {
    pub cfl: f64,
    pub tol_drift_rel: f64,
    /// Resample at uniform arclength every this many steps; 0 disables.
    pub reproject_every: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig { cfl: DEFAULT_CFL, tol_drift_rel: TOL_ARCLENGTH_DRIFT, reproject_every: 0 }
    }
}

impl FlowConfig {
    pub fn dt_bound(&self, ds: f64) -> f64 {
        self.cfl * ds * ds
    }

    pub fn check_dt(&self, dt: f64, ds: f64) -> Result<()> {
        if !(dt >= 0.0) || !dt.is_finite() {
            return Err(VfeError::Usage(format!("time step must be non-negative and finite, got {dt}")));
        }
        let bound = self.dt_bound(ds);
        if dt > bound {
            return Err(VfeError::Cfl { dt, bound });
        }
        Ok(())
    }
}

/// Filament at time `t` with its cached Frenet data.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub t: f64,
    pub filament: ClosedFilament,
    pub frenet: FrenetField,
    /// Local spacing `|alpha'| ds` per sample at the reference time.
    reference_spacing: Vec<f64>,
    /// Largest change of the local spacing since the reference time.
    pub arc_drift: f64,
    pub steps: usize,
}

impl FlowState {
    pub fn new(filament: ClosedFilament) -> Result<Self> {
        let frenet = filament::frenet(&filament)?;
        let reference_spacing = local_spacing(&filament);
        Ok(FlowState { t: 0.0, filament, frenet, reference_spacing, arc_drift: 0.0, steps: 0 })
    }

    pub fn constraint_residual(&self) -> f64 {
        self.filament.constraint_residual()
    }
}

fn local_spacing(f: &ClosedFilament) -> Vec<f64> {
    let ds = f.ds();
    f.speeds().into_iter().map(|v| v * ds).collect()
}

fn velocity_of(f: &ClosedFilament) -> Result<Vec<Ambient>> {
    let cb = filament::curvature_binormal(f)?;
    Ok(cb.b.iter().zip(cb.kappa.iter()).map(|(b, k)| b * *k).collect())
}

/// Binormal-flow velocity `kappa B` at every sample.
pub fn vfe_velocity(state: &FlowState) -> Vec<Ambient> {
    state.frenet.b.iter().zip(state.frenet.kappa.iter()).map(|(b, k)| b * *k).collect()
}

/// One classical RK4 step of the binormal flow on the ambient coordinates.
/// Stage points are retracted onto the model before the velocity is
/// evaluated, and so is the final update.
pub fn step_extrinsic(state: &FlowState, dt: f64, cfg: &FlowConfig) -> Result<FlowState> {
    let ds = state.filament.ds();
    cfg.check_dt(dt, ds)?;
    if dt == 0.0 {
        return Ok(state.clone());
    }
    let space = *state.filament.space();
    let p0 = state.filament.raw_points();
    let stage = |k: &[Ambient], h: f64| -> Result<ClosedFilament> {
        let pts = p0
            .iter()
            .zip(k.iter())
            .map(|(p, v)| space.retract_raw(&(p + v * h)))
            .collect::<Result<Vec<_>>>()?;
        ClosedFilament::with_spacing(space, pts, ds)
    };
    let k1 = vfe_velocity(state);
    let k2 = velocity_of(&stage(&k1, 0.5 * dt)?)?;
    let k3 = velocity_of(&stage(&k2, 0.5 * dt)?)?;
    let k4 = velocity_of(&stage(&k3, dt)?)?;
    let pts = (0..p0.len())
        .map(|i| space.retract_raw(&(p0[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0))))
        .collect::<Result<Vec<_>>>()?;
    let t = state.t + dt;
    let steps = state.steps + 1;
    let mut fil = ClosedFilament::with_spacing(space, pts, ds)?;
    let mut reference_spacing = state.reference_spacing.clone();
    if cfg.reproject_every > 0 && steps % cfg.reproject_every == 0 {
        fil = filament::resample_arclength(&fil)?;
        reference_spacing = local_spacing(&fil);
    }
    let spacing = local_spacing(&fil);
    let drift = spacing
        .iter()
        .zip(reference_spacing.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(state.arc_drift, f64::max);
    let tol = cfg.tol_drift_rel * ds;
    if !(drift <= tol) {
        return Err(VfeError::StepRejected { t, drift, tol });
    }
    let res = fil.constraint_residual();
    if !(res < crate::geometry::TOL_MANIFOLD) {
        return Err(VfeError::Numerical(format!("constraint residual {res:e} after step at t = {t}")));
    }
    let frenet = filament::frenet(&fil)?;
    Ok(FlowState { t, filament: fil, frenet, reference_spacing, arc_drift: drift, steps })
}

/// Curvature and torsion fields evolved directly by their PDE system.
#[derive(Debug, Clone, PartialEq)]
pub struct IntrinsicState {
    pub t: f64,
    pub kappa: Vec<f64>,
    pub tau: Vec<f64>,
    pub k0: f64,
    pub ds: f64,
}

impl IntrinsicState {
    pub fn from_frenet(fr: &FrenetField, ds: f64, k0: f64) -> Self {
        IntrinsicState { t: 0.0, kappa: fr.kappa.clone(), tau: fr.tau.clone(), k0, ds }
    }

    fn kappa_min(&self) -> f64 {
        filament::KAPPA_MIN_REL / (self.ds * self.kappa.len() as f64)
    }
}

/// Right-hand side of
///
/// ```text
/// kappa_t = -2 tau kappa_s - kappa tau_s + kappa (T,B,T,N)
/// tau_t   = ( kappa_ss / kappa - tau^2 + kappa^2 / 2 + (T,B,T,B) )_s - kappa (B,T,N,B)
/// ```
///
/// with the curvature contractions taken from the constant-curvature tensor.
/// The uniform potential `(T,B,T,B) = K0` is differentiated on its own and
/// contributes exact zeros.
pub fn intrinsic_rhs(kappa: &[f64], tau: &[f64], ds: f64, k0: f64) -> (Vec<f64>, Vec<f64>) {
    let n = kappa.len();
    let curv = SpaceForm::from_curvature(k0).map(|s| s.frame_curvature_terms()).unwrap_or_else(|_| {
        crate::geometry::FrameCurvature { tbtn: 0.0 * k0, tbtb: k0, btnb: 0.0 * k0 }
    });
    let ks = spectral::derivative(kappa, ds, 1);
    let kss = spectral::derivative(kappa, ds, 2);
    let ts = spectral::derivative(tau, ds, 1);
    let potential: Vec<f64> = (0..n).map(|i| kss[i] / kappa[i] - tau[i] * tau[i] + 0.5 * kappa[i] * kappa[i]).collect();
    let dpot = spectral::derivative(&potential, ds, 1);
    let dk0 = spectral::derivative(&vec![curv.tbtb; n], ds, 1);
    let dkappa = (0..n).map(|i| -2.0 * tau[i] * ks[i] - kappa[i] * ts[i] + kappa[i] * curv.tbtn).collect();
    let dtau = (0..n).map(|i| dpot[i] + dk0[i] - kappa[i] * curv.btnb).collect();
    (dkappa, dtau)
}

/// One RK4 step of the intrinsic system.
pub fn step_intrinsic(state: &IntrinsicState, dt: f64, cfg: &FlowConfig) -> Result<IntrinsicState> {
    cfg.check_dt(dt, state.ds)?;
    if dt == 0.0 {
        return Ok(state.clone());
    }
    let kmin = state.kappa_min();
    let check = |k: &[f64], t: f64| -> Result<()> {
        let min = k.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(min > kmin) {
            return Err(VfeError::IntrinsicBlowup { t, min_kappa: min, kappa_min: kmin });
        }
        Ok(())
    };
    let axpy = |x: &[f64], d: &[f64], h: f64| -> Vec<f64> { x.iter().zip(d).map(|(a, b)| a + h * b).collect() };
    let (k, t) = (&state.kappa, &state.tau);
    let (k1, t1) = intrinsic_rhs(k, t, state.ds, state.k0);
    let (ka, ta) = (axpy(k, &k1, 0.5 * dt), axpy(t, &t1, 0.5 * dt));
    check(&ka, state.t + 0.5 * dt)?;
    let (k2, t2) = intrinsic_rhs(&ka, &ta, state.ds, state.k0);
    let (kb, tb) = (axpy(k, &k2, 0.5 * dt), axpy(t, &t2, 0.5 * dt));
    check(&kb, state.t + 0.5 * dt)?;
    let (k3, t3) = intrinsic_rhs(&kb, &tb, state.ds, state.k0);
    let (kc, tc) = (axpy(k, &k3, dt), axpy(t, &t3, dt));
    check(&kc, state.t + dt)?;
    let (k4, t4) = intrinsic_rhs(&kc, &tc, state.ds, state.k0);
    let n = k.len();
    let kappa: Vec<f64> = (0..n).map(|i| k[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect();
    let tau: Vec<f64> = (0..n).map(|i| t[i] + dt / 6.0 * (t1[i] + 2.0 * t2[i] + 2.0 * t3[i] + t4[i])).collect();
    check(&kappa, state.t + dt)?;
    Ok(IntrinsicState { t: state.t + dt, kappa, tau, k0: state.k0, ds: state.ds })
}

/// Number of steps and the adjusted step that lands exactly on `t_end`.
pub fn step_plan(t_end: f64, dt: f64) -> Result<(usize, f64)> {
    if !(t_end > 0.0) || !(dt > 0.0) {
        return Err(VfeError::Usage(format!("need T_end > 0 and dt > 0, got {t_end} and {dt}")));
    }
    let steps = ((t_end / dt) - 1e-9).ceil().max(1.0) as usize;
    Ok((steps, t_end / steps as f64))
}

/// Extrinsic/intrinsic comparison at one resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelComparison {
    pub n: usize,
    pub dt: f64,
    pub steps: usize,
    pub times: Vec<f64>,
    pub kappa_diff: Vec<f64>,
    pub tau_diff: Vec<f64>,
    pub arc_drift: f64,
}

impl LevelComparison {
    pub fn final_kappa_diff(&self) -> f64 {
        *self.kappa_diff.last().unwrap_or(&0.0)
    }

    pub fn final_tau_diff(&self) -> f64 {
        *self.tau_diff.last().unwrap_or(&0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidationReport {
    pub levels: Vec<LevelComparison>,
    /// `log2` ratios of successive final differences.
    pub kappa_orders: Vec<f64>,
    pub tau_orders: Vec<f64>,
}

impl CrossValidationReport {
    pub fn min_order(&self) -> f64 {
        self.kappa_orders.iter().chain(self.tau_orders.iter()).cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Runs both integrators from the same initial curvature and torsion to
/// `t_end` on a single resolution.
pub fn compare_level(initial: &ClosedFilament, t_end: f64, dt: f64, cfg: &FlowConfig) -> Result<LevelComparison> {
    let (steps, dt) = step_plan(t_end, dt)?;
    let mut ext = FlowState::new(initial.clone()).map_err(|e| e.flagged("extrinsic"))?;
    let mut int = IntrinsicState::from_frenet(&ext.frenet, initial.ds(), initial.space().k0());
    let mut times = vec![0.0];
    let mut kd = vec![linf(&ext.frenet.kappa, &int.kappa)];
    let mut td = vec![linf(&ext.frenet.tau, &int.tau)];
    for _ in 0..steps {
        ext = step_extrinsic(&ext, dt, cfg).map_err(|e| e.flagged("extrinsic"))?;
        int = step_intrinsic(&int, dt, cfg).map_err(|e| e.flagged("intrinsic"))?;
        times.push(ext.t);
        kd.push(linf(&ext.frenet.kappa, &int.kappa));
        td.push(linf(&ext.frenet.tau, &int.tau));
    }
    Ok(LevelComparison { n: initial.len(), dt, steps, times, kappa_diff: kd, tau_diff: td, arc_drift: ext.arc_drift })
}

/// Spectral refinement followed by arclength resampling, so the finer
/// level does not inherit the coarse curve's residual speed variation.
/// Sample `i` of `f` stays at sample `factor * i`.
pub fn refine_uniform(f: &ClosedFilament, factor: usize) -> Result<ClosedFilament> {
    filament::resample_arclength(&f.refine(factor)?)
}

/// Compares the two integrators on `levels` resolutions, doubling the
/// sample count and dividing the step by four at each level (`dt ~ ds^2`).
pub fn cross_validate(
    initial: &ClosedFilament,
    t_end: f64,
    dt: f64,
    levels: usize,
    cfg: &FlowConfig,
) -> Result<CrossValidationReport> {
    if levels == 0 {
        return Err(VfeError::Usage("need at least one resolution level".into()));
    }
    let (_, dt) = step_plan(t_end, dt)?;
    let inputs: Vec<(ClosedFilament, f64)> = (0..levels)
        .map(|l| {
            let f = if l == 0 { initial.clone() } else { refine_uniform(initial, 1 << l)? };
            Ok((f, dt / 4f64.powi(l as i32)))
        })
        .collect::<Result<_>>()?;
    let results: Vec<Result<LevelComparison>> =
        inputs.par_iter().map(|(f, h)| compare_level(f, t_end, *h, cfg)).collect();
    let levels = results.into_iter().collect::<Result<Vec<_>>>()?;
    let orders = |sel: fn(&LevelComparison) -> f64| -> Vec<f64> {
        levels.windows(2).map(|w| (sel(&w[0]) / sel(&w[1])).log2()).collect()
    };
    let kappa_orders = orders(LevelComparison::final_kappa_diff);
    let tau_orders = orders(LevelComparison::final_tau_diff);
    Ok(CrossValidationReport { levels, kappa_orders, tau_orders })
}

pub(crate) fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn euclidean_circle(n: usize, r: f64) -> ClosedFilament {
        let pts = (0..n)
            .map(|i| {
                let u = TAU * i as f64 / n as f64;
                Ambient::new(0.0, r * u.cos(), r * u.sin(), 0.0)
            })
            .collect();
        ClosedFilament::from_raw(SpaceForm::euclidean(), pts).unwrap()
    }

    #[test]
    fn circle_velocity_is_axial() {
        let r = 0.5;
        let st = FlowState::new(euclidean_circle(64, r)).unwrap();
        for (v, t) in vfe_velocity(&st).iter().zip(st.frenet.t.iter()) {
            assert!((v - Ambient::new(0.0, 0.0, 0.0, 1.0 / r)).amax() < 1e-10);
            assert!(v.dot(t).abs() < 1e-12);
        }
        let big = FlowState::new(euclidean_circle(64, 2.0 * r)).unwrap();
        let ratio = vfe_velocity(&st)[0].norm() / vfe_velocity(&big)[0].norm();
        assert!((ratio - 2.0).abs() < 1e-10);
    }

    #[test]
    fn circle_translates_rigidly() {
        let r = 1.0;
        let st = FlowState::new(euclidean_circle(256, r)).unwrap();
        let next = step_extrinsic(&st, 1e-4, &FlowConfig::default()).unwrap();
        for (a, b) in st.filament.raw_points().iter().zip(next.filament.raw_points()) {
            let expect = a + Ambient::new(0.0, 0.0, 0.0, 1e-4 / r);
            assert!((b - expect).amax() < 1e-8 * r);
        }
    }

    #[test]
    fn zero_step_is_identity_and_cfl_enforced() {
        let st = FlowState::new(euclidean_circle(64, 1.0)).unwrap();
        let same = step_extrinsic(&st, 0.0, &FlowConfig::default()).unwrap();
        assert_eq!(same.filament, st.filament);
        let ds = st.filament.ds();
        match step_extrinsic(&st, ds * ds, &FlowConfig::default()) {
            Err(VfeError::Cfl { bound, .. }) => assert!((bound - 0.25 * ds * ds).abs() < 1e-18),
            other => panic!("{other:?}"),
        }
        assert!(matches!(step_extrinsic(&st, -1e-5, &FlowConfig::default()), Err(VfeError::Usage(_))));
    }

    #[test]
    fn constant_fields_are_stationary() {
        let n = 32;
        let cfg = FlowConfig::default();
        for (c, b) in [(0.7, 0.0), (0.7, 1.3)] {
            let st = IntrinsicState { t: 0.0, kappa: vec![c; n], tau: vec![b; n], k0: 1.0, ds: 0.1 };
            let next = step_intrinsic(&st, 1e-3, &cfg).unwrap();
            assert_eq!(next.kappa, st.kappa);
            assert_eq!(next.tau, st.tau);
        }
    }

    /// Independent evaluation of the torsion rate for kappa = c + e cos(w s),
    /// tau = 0: d/ds (kappa_ss/kappa + kappa^2/2) in closed form.
    #[test]
    fn torsion_rate_for_cosine_curvature() {
        let n = 64;
        let length = 5.0;
        let ds = length / n as f64;
        let (c, e) = (1.0, 0.1);
        let w = TAU / length;
        let kappa: Vec<f64> = (0..n).map(|i| c + e * (w * i as f64 * ds).cos()).collect();
        let (dk, dt) = intrinsic_rhs(&kappa, &vec![0.0; n], ds, 0.0);
        for i in 0..n {
            let s = i as f64 * ds;
            let k = c + e * (w * s).cos();
            let ks = -e * w * (w * s).sin();
            let kss = -e * w * w * (w * s).cos();
            let ksss = e * w * w * w * (w * s).sin();
            let expect = ksss / k - kss * ks / (k * k) + k * ks;
            assert!((dt[i] - expect).abs() < 1e-11, "{i}: {} vs {expect}", dt[i]);
            assert!(dk[i].abs() < 1e-14);
        }
    }

    #[test]
    fn intrinsic_step_is_independent_of_k0_bitwise() {
        let n = 64;
        let ds = 0.1;
        let kappa: Vec<f64> = (0..n).map(|i| 1.0 + 0.2 * (TAU * i as f64 / n as f64).cos()).collect();
        let tau: Vec<f64> = (0..n).map(|i| 0.3 * (2.0 * TAU * i as f64 / n as f64).sin()).collect();
        let mk = |k0| IntrinsicState { t: 0.0, kappa: kappa.clone(), tau: tau.clone(), k0, ds };
        let cfg = FlowConfig::default();
        let a = step_intrinsic(&mk(0.0), 1e-3, &cfg).unwrap();
        let b = step_intrinsic(&mk(5.0), 1e-3, &cfg).unwrap();
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a.kappa), bits(&b.kappa));
        assert_eq!(bits(&a.tau), bits(&b.tau));
    }

    #[test]
    fn intrinsic_blowup_detected() {
        let n = 32;
        let kappa: Vec<f64> = (0..n).map(|i| if i == 3 { 1e-12 } else { 1.0 }).collect();
        let st = IntrinsicState { t: 0.0, kappa, tau: vec![0.0; n], k0: 0.0, ds: 0.2 };
        assert!(matches!(step_intrinsic(&st, 1e-3, &FlowConfig::default()), Err(VfeError::IntrinsicBlowup { .. })));
    }

    #[test]
    fn circle_cross_validation_is_at_noise_level() {
        let rep = cross_validate(&euclidean_circle(32, 1.0), 0.02, 1e-3, 1, &FlowConfig::default()).unwrap();
        let l = &rep.levels[0];
        assert!(l.kappa_diff.iter().chain(l.tau_diff.iter()).all(|d| *d < 1e-9));
    }
}
