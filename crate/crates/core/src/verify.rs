//! Invariant suites behind `vfe verify`. Each check yields one criterion
//! with a PASS/FAIL verdict and the measured numbers.

use std::f64::consts::{FRAC_PI_4, SQRT_2, TAU};
use std::fmt;

use crate::cli_io::{generate_initial, Params};
use crate::dynamics::{self, FlowConfig, FlowState, IntrinsicState};
use crate::error::Result;
use crate::filament::{self, ClosedFilament};
use crate::frames;
use crate::geometry::{Ambient, SpaceForm, SpaceKind};
use crate::hasimoto;

pub const SUITES: [&str; 6] = ["geometry", "frenet", "dynamics", "hasimoto", "frames", "all"];

#[derive(Debug, Clone, PartialEq)]
pub struct Criterion {
    pub suite: &'static str,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}.{} {}", self.suite, self.name, self.detail)
    }
}

fn criterion(suite: &'static str, name: impl Into<String>, pass: bool, detail: String) -> Criterion {
    Criterion { suite, name: name.into(), pass, detail }
}

/// Wraps a fallible check so that a numerical error becomes a FAIL line.
fn guarded(suite: &'static str, name: &str, check: impl FnOnce() -> Result<Criterion>) -> Criterion {
    check().unwrap_or_else(|e| criterion(suite, name, false, format!("error: {e}")))
}

fn order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

fn models() -> [SpaceForm; 3] {
    [SpaceForm::unit_hyperbolic(), SpaceForm::euclidean(), SpaceForm::unit_sphere()]
}

/// Runs a suite by name; `None` for an unknown name.
pub fn run_suite(name: &str) -> Option<Vec<Criterion>> {
    Some(match name {
        "geometry" => geometry_suite(),
        "frenet" => frenet_suite(),
        "dynamics" => dynamics_suite(),
        "hasimoto" => hasimoto_suite(),
        "frames" => frames_suite(),
        "all" => [geometry_suite(), frenet_suite(), dynamics_suite(), hasimoto_suite(), frames_suite()].concat(),
        _ => return None,
    })
}

/// Orthonormal tangent pair at the model's origin.
fn origin_frame(space: &SpaceForm) -> (Ambient, Ambient, Ambient) {
    let p = match space.kind() {
        SpaceKind::Euclidean => Ambient::zeros(),
        _ => Ambient::new(space.radius(), 0.0, 0.0, 0.0),
    };
    (p, Ambient::new(0.0, 1.0, 0.0, 0.0), Ambient::new(0.0, 0.0, 1.0, 0.0))
}

pub fn geometry_suite() -> Vec<Criterion> {
    const S: &str = "geometry";
    let mut out = Vec::new();
    for space in models() {
        let k0 = space.k0();
        let (p, e1, e2) = origin_frame(&space);
        let err = |h: f64| (space.holonomy_curvature(&p, &e1, &e2, h) - k0).abs();
        let (e_a, e_b) = (err(1e-2), err(5e-3));
        let (pass, detail) = if k0 == 0.0 {
            (e_a < 1e-12 && e_b < 1e-12, format!("K0=0 |err|={e_a:.3e},{e_b:.3e}"))
        } else {
            let ratio = e_a / e_b;
            (e_a < 0.02 * k0.abs() && (3.2..=4.8).contains(&ratio), format!("K0={k0} rel_err={:.3e} ratio={ratio:.3}", e_a / k0.abs()))
        };
        out.push(criterion(S, format!("holonomy_{}", space.kind()), pass, detail));

        let r = space.riemann_raw(&e1, &e2, &e1, &e2);
        out.push(criterion(S, format!("sectional_{}", space.kind()), (r - k0).abs() < 1e-14, format!("R(e1,e2,e1,e2)={r}")));

        let c = space.cross_raw(&p, &e1, &e2);
        let e3 = Ambient::new(0.0, 0.0, 0.0, 1.0);
        out.push(criterion(S, format!("orientation_{}", space.kind()), (c - e3).amax() < 1e-15, format!("e1 x e2 = {:?}", c.as_slice())));
    }
    out
}

fn circle(space: SpaceForm, r: f64, n: usize) -> Result<ClosedFilament> {
    let mut p = Params::new();
    p.insert("r".into(), r);
    generate_initial("circle", &p, space, n)
}

fn perturbed(space: SpaceForm, n: usize, eps_rel: f64) -> Result<ClosedFilament> {
    let r = if space.kind() == SpaceKind::Spherical { 0.8 } else { 1.0 };
    let mut p = Params::new();
    p.insert("r".into(), r);
    p.insert("eps".into(), eps_rel * r);
    generate_initial("perturbed_circle", &p, space, n)
}

/// Unit circle with a vertical mode-2 wave of height `h`, as used by the
/// Frenet and frame checks.
pub fn wavy_circle(n: usize, h: f64) -> Result<ClosedFilament> {
    let m = 8 * n;
    let pts = (0..m)
        .map(|i| {
            let u = TAU * i as f64 / m as f64;
            Ambient::new(0.0, u.cos(), u.sin(), h * (2.0 * u).sin())
        })
        .collect();
    let dense = filament::resample_arclength(&ClosedFilament::from_raw(SpaceForm::euclidean(), pts)?)?;
    let sub = dense.raw_points().iter().step_by(8).cloned().collect();
    filament::resample_arclength(&ClosedFilament::from_raw(SpaceForm::euclidean(), sub)?)
}

/// Closed-form curvature and torsion of the wavy circle at parameter `u`.
pub fn wavy_circle_frenet(u: f64, h: f64) -> (f64, f64) {
    let d1 = [-u.sin(), u.cos(), 2.0 * h * (2.0 * u).cos()];
    let d2 = [-u.cos(), -u.sin(), -4.0 * h * (2.0 * u).sin()];
    let d3 = [u.sin(), -u.cos(), -8.0 * h * (2.0 * u).cos()];
    let c = [d1[1] * d2[2] - d1[2] * d2[1], d1[2] * d2[0] - d1[0] * d2[2], d1[0] * d2[1] - d1[1] * d2[0]];
    let c2 = c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
    let v = (d1[0] * d1[0] + d1[1] * d1[1] + d1[2] * d1[2]).sqrt();
    (c2.sqrt() / v.powi(3), (c[0] * d3[0] + c[1] * d3[1] + c[2] * d3[2]) / c2)
}

pub fn frenet_suite() -> Vec<Criterion> {
    const S: &str = "frenet";
    let mut out = Vec::new();
    out.push(guarded(S, "circle", || {
        let r = 0.7;
        let f = circle(SpaceForm::euclidean(), r, 256)?;
        let fr = filament::frenet(&f)?;
        let ek = fr.kappa.iter().map(|k| (k - 1.0 / r).abs()).fold(0.0, f64::max);
        let et = fr.tau.iter().map(|t| t.abs()).fold(0.0, f64::max);
        Ok(criterion(S, "circle", ek < 1e-6 && et < 1e-6, format!("N=256 |kappa-1/r|={ek:.3e} |tau|={et:.3e}")))
    }));
    out.push(guarded(S, "spherical_small_circle", || {
        let rho = 0.6;
        let f = circle(SpaceForm::unit_sphere(), rho, 128)?;
        let fr = filament::frenet(&f)?;
        let ek = fr.kappa.iter().map(|k| (k - 1.0 / rho.tan()).abs()).fold(0.0, f64::max);
        Ok(criterion(S, "spherical_small_circle", ek < 1e-5, format!("|kappa-cot(rho0)|={ek:.3e}")))
    }));
    out.push(guarded(S, "hyperbolic_circle", || {
        let rho = 0.6;
        let f = circle(SpaceForm::unit_hyperbolic(), rho, 128)?;
        let fr = filament::frenet(&f)?;
        let ek = fr.kappa.iter().map(|k| (k - 1.0 / rho.tanh()).abs()).fold(0.0, f64::max);
        Ok(criterion(S, "hyperbolic_circle", ek < 1e-5, format!("|kappa-coth(rho0)|={ek:.3e}")))
    }));
    out.push(guarded(S, "frenet_formulas_order", || {
        let res = |n| -> Result<f64> {
            let f = wavy_circle(n, 0.3)?;
            let fr = filament::frenet(&f)?;
            Ok(filament::frenet_residuals(&f, &fr).into_iter().fold(0.0, f64::max))
        };
        let (a, b) = (res(64)?, res(128)?);
        let ratio = a / b;
        Ok(criterion(S, "frenet_formulas_order", (3.0..=5.0).contains(&ratio), format!("residual {a:.3e} -> {b:.3e} ratio={ratio:.3}")))
    }));
    out.push(guarded(S, "orthonormality", || {
        let f = perturbed(SpaceForm::unit_sphere(), 64, 0.05)?;
        let d = filament::frenet(&f)?.orthonormality_defect(f.space());
        Ok(criterion(S, "orthonormality", d < 1e-12, format!("defect={d:.3e}")))
    }));
    out
}

pub fn dynamics_suite() -> Vec<Criterion> {
    const S: &str = "dynamics";
    let mut out = Vec::new();
    out.push(guarded(S, "circle_translation", || {
        let r = 1.0;
        let f = circle(SpaceForm::euclidean(), r, 256)?;
        let ds = f.ds();
        let cfg = FlowConfig::default();
        let (steps, dt) = dynamics::step_plan(0.1, 1e-4)?;
        let mut st = FlowState::new(f)?;
        for _ in 0..steps {
            st = dynamics::step_extrinsic(&st, dt, &cfg)?;
        }
        let pts = st.filament.raw_points();
        let center: Ambient = pts.iter().sum::<Ambient>() / pts.len() as f64;
        let disp = (center - Ambient::new(0.0, 0.0, 0.0, 0.1 / r)).norm();
        let radius = pts.iter().map(|p| (p - center).norm()).sum::<f64>() / pts.len() as f64;
        let pass = disp < 1e-5 && (radius - r).abs() < 1e-6 && st.arc_drift < 1e-6 * ds;
        Ok(criterion(
            S,
            "circle_translation",
            pass,
            format!("center_err={disp:.3e} radius_change={:.3e} drift/ds={:.3e}", (radius - r).abs(), st.arc_drift / ds),
        ))
    }));
    for space in models() {
        let name = format!("cross_validation_{}", space.kind());
        out.push(guarded(S, &name.clone(), || {
            let f = perturbed(space, 32, 0.02)?;
            let dt = 0.25 * f.ds() * f.ds();
            let rep = dynamics::cross_validate(&f, 0.05, dt, 3, &FlowConfig::default())?;
            let diffs: Vec<String> =
                rep.levels.iter().map(|l| format!("N={}:{:.2e}/{:.2e}", l.n, l.final_kappa_diff(), l.final_tau_diff())).collect();
            let min = rep.min_order();
            Ok(criterion(S, name, min >= 2.0, format!("{} min_order={min:.2}", diffs.join(" "))))
        }));
    }
    out.push(guarded(S, "k0_independence", || {
        let f = perturbed(SpaceForm::euclidean(), 32, 0.05)?;
        let fr = filament::frenet(&f)?;
        let cfg = FlowConfig::default();
        let dt = 0.25 * f.ds() * f.ds();
        let mut states: Vec<IntrinsicState> = [0.0, 1.0, -1.0, 5.0].iter().map(|k| IntrinsicState::from_frenet(&fr, f.ds(), *k)).collect();
        for _ in 0..10 {
            for s in states.iter_mut() {
                *s = dynamics::step_intrinsic(s, dt, &cfg)?;
            }
        }
        let bits = |s: &IntrinsicState| s.kappa.iter().chain(s.tau.iter()).map(|x| x.to_bits()).collect::<Vec<_>>();
        let same = states.iter().all(|s| bits(s) == bits(&states[0]));
        Ok(criterion(S, "k0_independence", same, "K0 in {0,1,-1,5}, 10 steps".into()))
    }));
    out
}

pub fn hasimoto_suite() -> Vec<Criterion> {
    const S: &str = "hasimoto";
    let mut out = Vec::new();
    out.push(guarded(S, "plane_wave", || {
        let n = 256;
        let (hist, theta) = hasimoto::plane_wave(1.0, 0.75, n, TAU, 1e-4, 5, 0);
        let r = hasimoto::nls_residual(&hist, 1e-4, TAU / n as f64, &[theta], 0)?;
        let m = r.iter().cloned().fold(0.0, f64::max);
        Ok(criterion(S, "plane_wave", m < 1e-8, format!("plane-wave residual={m:.3e}")))
    }));
    let cfg = FlowConfig::default();
    for space in models() {
        let name = format!("certify_{}", space.kind());
        out.push(guarded(S, &name.clone(), || {
            let f = perturbed(space, 32, 0.02)?;
            let rep = hasimoto::certify_nls(&f, 0.05, 0.25 * f.ds() * f.ds(), &cfg, 0)?;
            let d: Vec<String> = rep.levels.iter().map(|l| format!("N={}:{:.3e}", l.n, l.max_residual)).collect();
            Ok(criterion(S, name, rep.pass, format!("{} order={:.3}", d.join(" "), rep.order)))
        }));
    }
    out.push(guarded(S, "certify_hopf", || {
        let mut p = Params::new();
        p.insert("eps".into(), 0.02);
        let f = generate_initial("hopf_circle", &p, SpaceForm::unit_sphere(), 32)?;
        let rep = hasimoto::certify_nls(&f, 0.05, 0.25 * f.ds() * f.ds(), &cfg, 0)?;
        let d: Vec<String> = rep.levels.iter().map(|l| format!("N={}:{:.3e}", l.n, l.max_residual)).collect();
        Ok(criterion(S, "certify_hopf", rep.pass, format!("{} order={:.3}", d.join(" "), rep.order)))
    }));
    out.push(guarded(S, "base_point_invariance", || {
        let f = perturbed(SpaceForm::unit_sphere(), 32, 0.05)?;
        let run = hasimoto::run_pipeline(&f, 0.02, 0.25 * f.ds() * f.ds(), &cfg, 0)?;
        let mono = run.monodromy();
        let r0 = hasimoto::nls_residual(&run.corrected, run.dt, run.ds, &mono, 0)?;
        let b = 11;
        let rho_b = -(run.corrected[0][b] / run.corrected[0][0]).arg();
        let moved = hasimoto::rebase_history(&run.corrected, &mono, 0, b, rho_b);
        let r1 = hasimoto::nls_residual(&moved, run.dt, run.ds, &mono, b)?;
        let d = r0.iter().zip(r1.iter()).map(|(a, c)| (a - c).abs()).fold(0.0, f64::max);
        Ok(criterion(S, "base_point_invariance", d < 1e-12, format!("max |delta residual|={d:.3e}")))
    }));
    out.push(guarded(S, "modulus", || {
        let f = perturbed(SpaceForm::unit_hyperbolic(), 64, 0.05)?;
        let fr = filament::frenet(&f)?;
        let h = hasimoto::hasimoto_transform(&fr.kappa, &fr.tau, f.ds(), 0)?;
        let d = h.psi.iter().zip(fr.kappa.iter()).map(|(p, k)| (p.norm() - k).abs() / k).fold(0.0, f64::max);
        Ok(criterion(S, "modulus", d < 4.0 * f64::EPSILON, format!("max | |psi|-kappa |/kappa={d:.3e}")))
    }));
    out
}

/// Largest deviation of the rank-3 Frenet-frame coefficient from the
/// closed-form matrix with entries +-kappa, +-tau.
fn so3_error(n: usize) -> Result<f64> {
    let h = 0.3;
    let f = wavy_circle(n, h)?;
    let fr = filament::frenet(&f)?;
    let c = frames::ehresmann_coefficient(&frames::frenet_frame(&f, &fr)?)?;
    let mut worst = 0.0f64;
    for (p, m) in f.raw_points().iter().zip(c.matrices.iter()) {
        let (k, t) = wavy_circle_frenet(p[2].atan2(p[1]), h);
        let expect = [[0.0, -k, 0.0], [k, 0.0, -t], [0.0, t, 0.0]];
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((m[(i, j)] - expect[i][j]).norm());
            }
        }
    }
    Ok(worst)
}

pub fn frames_suite() -> Vec<Criterion> {
    const S: &str = "frames";
    let mut out = Vec::new();
    out.push(guarded(S, "so3_coefficient", || {
        let (a, b) = (so3_error(64)?, so3_error(128)?);
        let o = order(a, b);
        Ok(criterion(S, "so3_coefficient", o >= 2.0 && b < 1e-6, format!("err {a:.3e} -> {b:.3e} order={o:.2}")))
    }));
    out.push(guarded(S, "parallel_frame", || {
        let err = |n| -> Result<f64> {
            let f = wavy_circle(n, 0.3)?;
            let fr = filament::frenet(&f)?;
            let (rho, total) = frames::parallel_phase(&fr.tau, f.ds(), 0);
            let c = frames::ehresmann_coefficient(&frames::complex_normal_frame(&f, &fr, &rho, total, 0)?)?;
            Ok(c.matrices.iter().map(|m| m[(0, 0)].norm()).fold(0.0, f64::max))
        };
        let (a, b) = (err(64)?, err(128)?);
        let o = order(a, b);
        Ok(criterion(S, "parallel_frame", o >= 1.8, format!("|coef| {a:.3e} -> {b:.3e} order={o:.2}")))
    }));
    out.push(guarded(S, "u2_matches_transform", || {
        let err = |n| -> Result<f64> {
            let f = wavy_circle(n, 0.3)?;
            let fr = filament::frenet(&f)?;
            let c = frames::hasimoto_frame_coefficient(&f, &fr, 0)?;
            let psi = hasimoto::hasimoto_transform(&fr.kappa, &fr.tau, f.ds(), 0)?.psi;
            let mut worst = 0.0f64;
            for (m, p) in c.matrices.iter().zip(psi.iter()) {
                let z = num_complex::Complex64::new(0.0, 0.0);
                let expect = [[z, -p / SQRT_2], [p.conj() / SQRT_2, z]];
                for i in 0..2 {
                    for j in 0..2 {
                        worst = worst.max((m[(i, j)] - expect[i][j]).norm() / p.norm());
                    }
                }
            }
            Ok(worst)
        };
        let (a, b) = (err(64)?, err(128)?);
        let o = order(a, b);
        Ok(criterion(S, "u2_matches_transform", o >= 1.8, format!("rel err {a:.3e} -> {b:.3e} order={o:.2}")))
    }));
    out.push(guarded(S, "j_eigenvector", || {
        let e = wavy_circle(64, 0.3)?;
        let mut p = Params::new();
        p.insert("a".into(), FRAC_PI_4.cos());
        let s = generate_initial("hopf_circle", &p, SpaceForm::unit_sphere(), 64)?;
        let h = perturbed(SpaceForm::unit_hyperbolic(), 64, 0.05)?;
        let mut worst = 0.0f64;
        for f in [&e, &s, &h] {
            worst = worst.max(frames::check_j_eigenvector(f, &filament::frenet(f)?));
        }
        Ok(criterion(S, "j_eigenvector", worst < 1e-12, format!("max defect={worst:.3e}")))
    }));
    out
}
