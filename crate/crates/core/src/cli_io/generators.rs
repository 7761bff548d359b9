//! Initial filaments. Every generator samples its parametric curve densely,
//! resamples at uniform arclength, keeps every eighth sample and polishes
//! the result with a second resampling.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use crate::error::{Result, VfeError};
use crate::filament::{self, ClosedFilament};
use crate::geometry::{Ambient, SpaceForm, SpaceKind};

pub const GENERATORS: [&str; 5] = ["circle", "perturbed_circle", "torus_knot", "hopf_circle", "hyperbolic_circle"];

const OVERSAMPLE: usize = 8;

pub type Params = BTreeMap<String, f64>;

struct ParamReader<'a> {
    name: &'a str,
    params: &'a Params,
    allowed: Vec<&'static str>,
}

impl<'a> ParamReader<'a> {
    fn new(name: &'a str, params: &'a Params) -> Self {
        ParamReader { name, params, allowed: Vec::new() }
    }

    fn get(&mut self, key: &'static str, default: f64) -> f64 {
        self.allowed.push(key);
        self.params.get(key).copied().unwrap_or(default)
    }

    fn finish(self) -> Result<()> {
        match self.params.keys().find(|k| !self.allowed.contains(&k.as_str())) {
            Some(k) => Err(VfeError::Usage(format!(
                "unknown parameter '{k}' for generator {}; accepted: {}",
                self.name,
                self.allowed.join(", ")
            ))),
            None => Ok(()),
        }
    }
}

/// Point at geodesic distance `rho` from the model's origin in the
/// direction `(cos u, sin u, 0)`.
fn polar_point(space: &SpaceForm, rho: f64, u: f64, z: f64) -> Ambient {
    let r = space.radius();
    match space.kind() {
        SpaceKind::Euclidean => Ambient::new(0.0, rho * u.cos(), rho * u.sin(), z),
        SpaceKind::Spherical => {
            let (s, c) = (rho / r).sin_cos();
            Ambient::new(r * c, r * s * u.cos(), r * s * u.sin(), 0.0)
        }
        SpaceKind::Hyperbolic => {
            let (s, c) = ((rho / r).sinh(), (rho / r).cosh());
            Ambient::new(r * c, r * s * u.cos(), r * s * u.sin(), 0.0)
        }
    }
}

fn from_parametric(space: SpaceForm, n: usize, curve: impl Fn(f64) -> Ambient) -> Result<ClosedFilament> {
    if n < filament::MIN_SAMPLES {
        return Err(VfeError::Usage(format!("need at least {} samples, got {n}", filament::MIN_SAMPLES)));
    }
    let m = OVERSAMPLE * n;
    let pts = (0..m).map(|i| curve(TAU * i as f64 / m as f64)).collect();
    let dense = filament::resample_arclength(&ClosedFilament::from_raw(space, pts)?)?;
    let sub = dense.raw_points().iter().step_by(OVERSAMPLE).cloned().collect();
    filament::resample_arclength(&ClosedFilament::from_raw(space, sub)?)
}

fn require(space: &SpaceForm, kind: SpaceKind, name: &str) -> Result<()> {
    if space.kind() != kind {
        return Err(VfeError::Usage(format!("generator {name} needs the {kind} model, got {}", space.kind())));
    }
    Ok(())
}

fn check_radius(space: &SpaceForm, rho: f64, name: &str) -> Result<()> {
    if !(rho > 0.0) {
        return Err(VfeError::Usage(format!("{name}: radius must be positive, got {rho}")));
    }
    if space.kind() == SpaceKind::Spherical && !(rho < 0.5 * std::f64::consts::PI * space.radius()) {
        return Err(VfeError::Usage(format!(
            "{name}: geodesic radius {rho} is not below a quarter great circle, so the circle has no curvature"
        )));
    }
    Ok(())
}

/// Builds the named initial filament with `n` samples on `space`.
pub fn generate_initial(name: &str, params: &Params, space: SpaceForm, n: usize) -> Result<ClosedFilament> {
    let mut p = ParamReader::new(name, params);
    let f = match name {
        "circle" | "hyperbolic_circle" => {
            if name == "hyperbolic_circle" {
                require(&space, SpaceKind::Hyperbolic, name)?;
            }
            let r = p.get("r", 1.0);
            p.finish()?;
            check_radius(&space, r, name)?;
            from_parametric(space, n, |u| polar_point(&space, r, u, 0.0))?
        }
        "perturbed_circle" => {
            let r = p.get("r", 1.0);
            let m = p.get("m", 3.0);
            let eps = p.get("eps", 0.05 * r);
            p.finish()?;
            check_radius(&space, r - eps.abs(), name)?;
            check_radius(&space, r + eps.abs(), name)?;
            if m.fract() != 0.0 {
                return Err(VfeError::Usage(format!("{name}: mode m must be an integer, got {m}")));
            }
            from_parametric(space, n, |u| polar_point(&space, r + eps * (m * u).cos(), u, 0.0))?
        }
        "torus_knot" => {
            require(&space, SpaceKind::Euclidean, name)?;
            let (pp, qq) = (p.get("p", 2.0), p.get("q", 3.0));
            let (big, small) = (p.get("major", 2.0), p.get("minor", 0.5));
            p.finish()?;
            if !(big > small && small > 0.0) || pp.fract() != 0.0 || qq.fract() != 0.0 {
                return Err(VfeError::Usage(format!("{name}: need integer p, q and major > minor > 0")));
            }
            from_parametric(space, n, |u| {
                let rr = big + small * (qq * u).cos();
                Ambient::new(0.0, rr * (pp * u).cos(), rr * (pp * u).sin(), small * (qq * u).sin())
            })?
        }
        "hopf_circle" => {
            require(&space, SpaceKind::Spherical, name)?;
            let (pp, qq) = (p.get("p", 1.0), p.get("q", 2.0));
            let a = p.get("a", FRAC_1_SQRT_2);
            let eps = p.get("eps", 0.0);
            let m = p.get("m", 3.0);
            p.finish()?;
            if !(a - eps.abs() > 0.0 && a + eps.abs() < 1.0) || pp.fract() != 0.0 || qq.fract() != 0.0 || m.fract() != 0.0 {
                return Err(VfeError::Usage(format!("{name}: need integer p, q, m and 0 < a +- eps < 1")));
            }
            let r = space.radius();
            from_parametric(space, n, |u| {
                let aa = a + eps * (m * u).cos();
                let bb = (1.0 - aa * aa).sqrt();
                Ambient::new(aa * (pp * u).cos(), aa * (pp * u).sin(), bb * (qq * u).cos(), bb * (qq * u).sin()) * r
            })?
        }
        _ => {
            return Err(VfeError::Usage(format!("unknown generator '{name}'; valid: {}", GENERATORS.join(", "))));
        }
    };
    match filament::frenet(&f) {
        Ok(_) => Ok(f),
        Err(VfeError::FrenetUndefined { samples, kappa_min }) => Err(VfeError::Usage(format!(
            "{name}: curvature falls below {kappa_min:e} at {} samples",
            samples.len()
        ))),
        Err(e) => Err(e),
    }
}
