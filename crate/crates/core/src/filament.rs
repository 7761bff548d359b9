//! Discrete closed curves on a space form: arclength resampling, periodic
//! differentiation and Frenet data.

use std::f64::consts::TAU;

use crate::error::{Result, VfeError};
use crate::geometry::{coordinate_derivative, Ambient, AmbientPoint, SpaceForm};
use crate::spectral;

/// Minimum number of samples on a closed filament.
pub const MIN_SAMPLES: usize = 16;

/// Default spacing tolerance, relative to `ds`.
pub const TOL_ARCLENGTH: f64 = 1e-6;

/// Curvature floor, relative to `1/L`, below which the normal is undefined.
pub const KAPPA_MIN_REL: f64 = 1e-6;

/// A closed curve sampled at `n` points, nominally uniform in arclength with
/// spacing `ds = length / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFilament {
    space: SpaceForm,
    points: Vec<Ambient>,
    length: f64,
}

impl ClosedFilament {
    /// Builds a filament from public coordinates. The total length is the
    /// spectral arclength of the trigonometric interpolant through the points.
    pub fn from_coords(space: SpaceForm, coords: &[Vec<f64>]) -> Result<Self> {
        let pts = coords.iter().map(|c| space.embed(c)).collect::<Result<Vec<_>>>()?;
        Self::from_raw(space, pts)
    }

    pub fn from_raw(space: SpaceForm, points: Vec<Ambient>) -> Result<Self> {
        validate_points(&space, &points)?;
        let length = interpolant_length(&space, &points);
        if !(length > 0.0) || !length.is_finite() {
            return Err(VfeError::Geometry(format!("degenerate filament with length {length}")));
        }
        Ok(ClosedFilament { space, points, length })
    }

    /// Filament with an externally fixed spacing (used while time stepping,
    /// where `ds` is the initial arclength spacing).
    pub(crate) fn with_spacing(space: SpaceForm, points: Vec<Ambient>, ds: f64) -> Result<Self> {
        validate_points(&space, &points)?;
        let length = ds * points.len() as f64;
        Ok(ClosedFilament { space, points, length })
    }

    pub fn space(&self) -> &SpaceForm {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn ds(&self) -> f64 {
        self.length / self.points.len() as f64
    }

    pub fn raw_points(&self) -> &[Ambient] {
        &self.points
    }

    pub fn point(&self, i: usize) -> AmbientPoint {
        AmbientPoint::from_raw(&self.space, self.points[i])
    }

    pub fn coords(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| self.space.coords(p)).collect()
    }

    /// Arclength coordinates `s_i = i ds`.
    pub fn arclength_grid(&self) -> Vec<f64> {
        (0..self.len()).map(|i| i as f64 * self.ds()).collect()
    }

    pub fn kappa_min(&self) -> f64 {
        KAPPA_MIN_REL / self.length
    }

    /// Speed `|d alpha / ds|` at each sample under the nominal spacing.
    pub fn speeds(&self) -> Vec<f64> {
        let d = coordinate_derivative(&self.space, &self.points, self.ds(), 1);
        self.points
            .iter()
            .zip(d.iter())
            .map(|(p, v)| self.space.norm(&self.space.project(p, v)))
            .collect()
    }

    /// Largest deviation of the local spacing `|alpha'| ds` from `ds`.
    pub fn spacing_defect(&self) -> f64 {
        let ds = self.ds();
        self.speeds().iter().map(|v| (v - 1.0).abs() * ds).fold(0.0, f64::max)
    }

    pub fn is_arclength_uniform(&self, tol_rel: f64) -> bool {
        self.spacing_defect() < tol_rel * self.ds()
    }

    /// Largest model-constraint residual over the samples.
    pub fn constraint_residual(&self) -> f64 {
        self.points.iter().map(|p| self.space.constraint_residual(p)).fold(0.0, f64::max)
    }

    /// Same trace sampled in the opposite direction, starting at sample 0.
    pub fn reversed(&self) -> ClosedFilament {
        let n = self.len();
        let points = (0..n).map(|i| self.points[(n - i) % n]).collect();
        ClosedFilament { space: self.space, points, length: self.length }
    }

    /// Trigonometric interpolation onto `factor * n` samples. Sample `i` of
    /// `self` becomes sample `factor * i` of the result.
    pub fn refine(&self, factor: usize) -> Result<ClosedFilament> {
        if factor == 0 {
            return Err(VfeError::Usage("refinement factor must be positive".into()));
        }
        let m = factor * self.len();
        let mut pts = vec![Ambient::zeros(); m];
        for c in self.space.offset()..4 {
            let comp: Vec<f64> = self.points.iter().map(|p| p[c]).collect();
            for (p, v) in pts.iter_mut().zip(spectral::upsample(&comp, m)) {
                p[c] = v;
            }
        }
        let pts = pts.iter().map(|p| self.space.retract_raw(p)).collect::<Result<Vec<_>>>()?;
        ClosedFilament::from_raw(self.space, pts)
    }
}

fn validate_points(space: &SpaceForm, points: &[Ambient]) -> Result<()> {
    if points.len() < MIN_SAMPLES {
        return Err(VfeError::Usage(format!(
            "a closed filament needs at least {MIN_SAMPLES} samples, got {}",
            points.len()
        )));
    }
    for (i, p) in points.iter().enumerate() {
        let r = space.constraint_residual(p);
        if !(r < crate::geometry::TOL_MANIFOLD) {
            return Err(VfeError::Geometry(format!("sample {i} is off the {} model (residual {r:e})", space.kind())));
        }
    }
    Ok(())
}

/// Coordinate derivatives with respect to the angle `theta = 2 pi i / n`.
fn angular_velocity(space: &SpaceForm, points: &[Ambient]) -> Vec<Ambient> {
    coordinate_derivative(space, points, TAU / points.len() as f64, 1)
}

fn interpolant_length(space: &SpaceForm, points: &[Ambient]) -> f64 {
    let d = angular_velocity(space, points);
    let mean: f64 = d.iter().map(|v| space.norm(v)).sum::<f64>() / points.len() as f64;
    TAU * mean
}

/// Spectral derivative of a periodic real field. `order` is 1 or 2.
pub fn periodic_derivative(field: &[f64], ds: f64, order: u32) -> Result<Vec<f64>> {
    if !(order == 1 || order == 2) {
        return Err(VfeError::Usage(format!("derivative order must be 1 or 2, got {order}")));
    }
    if field.len() < MIN_SAMPLES {
        return Err(VfeError::Usage(format!("need at least {MIN_SAMPLES} samples, got {}", field.len())));
    }
    Ok(spectral::derivative(field, ds, order))
}

/// Componentwise spectral derivative of a coordinate field.
pub fn periodic_derivative_coords(space: &SpaceForm, field: &[Ambient], ds: f64, order: u32) -> Result<Vec<Ambient>> {
    if !(order == 1 || order == 2) {
        return Err(VfeError::Usage(format!("derivative order must be 1 or 2, got {order}")));
    }
    Ok(coordinate_derivative(space, field, ds, order))
}

/// Resamples a closed curve at uniform arclength.
///
/// The input samples are read as equispaced in an arbitrary periodic
/// parameter. Each pass builds the trigonometric interpolant of the ambient
/// coordinates, integrates its speed spectrally on a 4x oversampled grid,
/// inverts the arclength function by safeguarded Newton iteration and
/// retracts the new samples onto the model. Passes repeat while the spacing
/// defect keeps shrinking.
pub fn resample_arclength(f: &ClosedFilament) -> Result<ClosedFilament> {
    check_simple_polygon(f.space(), f.raw_points())?;
    let space = *f.space();
    let mut pts = f.raw_points().to_vec();
    let mut best: Option<ClosedFilament> = None;
    for _ in 0..6 {
        pts = resample_pass(&space, &pts)?;
        let cand = ClosedFilament::from_raw(space, pts.clone())?;
        let defect = cand.spacing_defect() / cand.ds();
        let prev = best.as_ref().map(|b| b.spacing_defect() / b.ds()).unwrap_or(f64::INFINITY);
        if defect < prev {
            best = Some(cand);
        }
        if defect < 1e-13 || defect >= 0.5 * prev {
            break;
        }
    }
    Ok(best.expect("at least one resampling pass"))
}

fn resample_pass(space: &SpaceForm, points: &[Ambient]) -> Result<Vec<Ambient>> {
    let n = points.len();
    let m = 4 * n;
    let comps: Vec<usize> = (space.offset()..4).collect();
    let coefs: Vec<Vec<num_complex::Complex64>> = comps
        .iter()
        .map(|&c| spectral::coefficients(&points.iter().map(|p| p[c]).collect::<Vec<_>>()))
        .collect();

    // speed of the interpolant on the oversampled grid
    let fine: Vec<Ambient> = {
        let mut v = vec![Ambient::zeros(); m];
        for &c in &comps {
            let comp: Vec<f64> = points.iter().map(|p| p[c]).collect();
            for (x, y) in v.iter_mut().zip(spectral::upsample(&comp, m)) {
                x[c] = y;
            }
        }
        v
    };
    let dfine = coordinate_derivative(space, &fine, TAU / m as f64, 1);
    let speed: Vec<f64> = dfine.iter().map(|v| space.norm(v)).collect();
    if speed.iter().any(|&v| !(v > 0.0)) {
        return Err(VfeError::Geometry("interpolated curve has a stationary point".into()));
    }
    let scoef = spectral::coefficients(&speed);
    let length = TAU * scoef[0].re;

    // cumulative arclength at the fine grid nodes brackets every target
    let table: Vec<f64> = (0..=m).map(|j| spectral::evaluate_integral(&scoef, TAU * j as f64 / m as f64)).collect();
    if table.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(VfeError::Geometry("arclength function is not monotone".into()));
    }

    let mut out = Vec::with_capacity(n);
    let mut j = 0usize;
    for i in 0..n {
        let target = length * i as f64 / n as f64;
        while j + 1 < m && table[j + 1] <= target {
            j += 1;
        }
        let (mut lo, mut hi) = (TAU * j as f64 / m as f64, TAU * (j + 1) as f64 / m as f64);
        let mut theta = lo + (hi - lo) * (target - table[j]) / (table[j + 1] - table[j]);
        for _ in 0..60 {
            let g = spectral::evaluate_integral(&scoef, theta) - target;
            if g > 0.0 {
                hi = theta;
            } else {
                lo = theta;
            }
            let dg = spectral::evaluate(&scoef, theta);
            let mut next = theta - g / dg;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let step = (next - theta).abs();
            theta = next;
            if step < 1e-15 || hi - lo < 1e-15 {
                break;
            }
        }
        let mut p = Ambient::zeros();
        for (k, &c) in comps.iter().enumerate() {
            p[c] = spectral::evaluate(&coefs[k], theta);
        }
        out.push(space.retract_raw(&p)?);
    }
    Ok(out)
}

/// Rejects closed polygons with repeated consecutive samples or touching
/// non-adjacent edges (ambient Euclidean distance).
fn check_simple_polygon(space: &SpaceForm, pts: &[Ambient]) -> Result<()> {
    let n = pts.len();
    let perimeter: f64 = (0..n).map(|i| space.distance(&pts[i], &pts[(i + 1) % n])).sum();
    let tol = 1e-9 * perimeter;
    for i in 0..n {
        if (pts[(i + 1) % n] - pts[i]).norm() <= tol {
            return Err(VfeError::Geometry(format!("samples {i} and {} coincide", (i + 1) % n)));
        }
    }
    for i in 0..n {
        let (a0, a1) = (pts[i], pts[(i + 1) % n]);
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (b0, b1) = (pts[j], pts[(j + 1) % n]);
            if segment_distance(&a0, &a1, &b0, &b1) <= tol {
                return Err(VfeError::Geometry(format!("edges {i} and {j} intersect")));
            }
        }
    }
    Ok(())
}

/// Minimum distance between two segments.
fn segment_distance(p0: &Ambient, p1: &Ambient, q0: &Ambient, q1: &Ambient) -> f64 {
    let d1 = p1 - p0;
    let d2 = q1 - q0;
    let r = p0 - q0;
    let a = d1.dot(&d1);
    let e = d2.dot(&d2);
    let f = d2.dot(&r);
    let c = d1.dot(&r);
    let b = d1.dot(&d2);
    let denom = a * e - b * b;
    let mut s = if denom > 1e-300 { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
    let mut t = (b * s + f) / e;
    if t < 0.0 {
        t = 0.0;
        s = (-c / a).clamp(0.0, 1.0);
    } else if t > 1.0 {
        t = 1.0;
        s = ((b - c) / a).clamp(0.0, 1.0);
    }
    (p0 + d1 * s - (q0 + d2 * t)).norm()
}

/// Frenet frame and curvature/torsion along a filament.
#[derive(Debug, Clone, PartialEq)]
pub struct FrenetField {
    pub t: Vec<Ambient>,
    pub n: Vec<Ambient>,
    pub b: Vec<Ambient>,
    pub kappa: Vec<f64>,
    pub tau: Vec<f64>,
}

/// Curvature and binormal only (no torsion), as needed by the flow.
pub(crate) struct CurvatureBinormal {
    pub kappa: Vec<f64>,
    pub b: Vec<Ambient>,
}

struct PartialFrame {
    speed: Vec<f64>,
    t: Vec<Ambient>,
    n: Vec<Ambient>,
    kappa: Vec<f64>,
}

fn partial_frame(f: &ClosedFilament) -> Result<PartialFrame> {
    let space = f.space();
    let pts = f.raw_points();
    let ds = f.ds();
    let d = coordinate_derivative(space, pts, ds, 1);
    let mut speed = Vec::with_capacity(pts.len());
    let mut t = Vec::with_capacity(pts.len());
    for (p, v) in pts.iter().zip(d.iter()) {
        let v = space.project(p, v);
        let s = space.norm(&v);
        speed.push(s);
        t.push(v / s);
    }
    let dt = coordinate_derivative(space, &t, ds, 1);
    let kmin = f.kappa_min();
    let mut kappa = Vec::with_capacity(pts.len());
    let mut n = Vec::with_capacity(pts.len());
    let mut bad = Vec::new();
    for i in 0..pts.len() {
        let w = space.project(&pts[i], &dt[i]) / speed[i];
        let w = w - t[i] * space.inner(&w, &t[i]);
        let k = space.norm(&w);
        if !(k > kmin) {
            bad.push(i);
        }
        kappa.push(k);
        n.push(w / k);
    }
    if !bad.is_empty() {
        return Err(VfeError::FrenetUndefined { samples: bad, kappa_min: kmin });
    }
    Ok(PartialFrame { speed, t, n, kappa })
}

pub(crate) fn curvature_binormal(f: &ClosedFilament) -> Result<CurvatureBinormal> {
    let pf = partial_frame(f)?;
    let space = f.space();
    let b = f
        .raw_points()
        .iter()
        .zip(pf.t.iter().zip(pf.n.iter()))
        .map(|(p, (t, n))| space.cross_raw(p, t, n))
        .collect();
    Ok(CurvatureBinormal { kappa: pf.kappa, b })
}

/// Frenet frame `(T, N, B)` with `N` the normalized covariant derivative of
/// `T`, `B = T x N`, curvature `kappa = |DT/ds|` and torsion
/// `tau = <DN/ds, B>`. Derivatives are spectral and divided by the sampled
/// speed, so small departures from unit speed do not bias `kappa` or `tau`.
pub fn frenet(f: &ClosedFilament) -> Result<FrenetField> {
    let PartialFrame { speed, t, n, kappa } = partial_frame(f)?;
    let space = f.space();
    let pts = f.raw_points();
    let b: Vec<Ambient> = (0..pts.len()).map(|i| space.cross_raw(&pts[i], &t[i], &n[i])).collect();
    let dn = coordinate_derivative(space, &n, f.ds(), 1);
    let tau = (0..pts.len())
        .map(|i| space.inner(&space.project(&pts[i], &dn[i]), &b[i]) / speed[i])
        .collect();
    Ok(FrenetField { t, n, b, kappa, tau })
}

/// Residuals of the three Frenet formulas with covariant derivatives taken by
/// second-order centered differences, independent of the spectral scheme
/// that produced the frame. Returns the maxima of
/// `|DT - kN|`, `|DN + kT - tB|` and `|DB + tN|`.
pub fn frenet_residuals(f: &ClosedFilament, fr: &FrenetField) -> [f64; 3] {
    let space = f.space();
    let pts = f.raw_points();
    let n = pts.len();
    let ds = f.ds();
    let centered = |field: &[Ambient], i: usize| {
        let w = (field[(i + 1) % n] - field[(i + n - 1) % n]) / (2.0 * ds);
        space.project(&pts[i], &w)
    };
    let mut out = [0.0f64; 3];
    for i in 0..n {
        let (k, t) = (fr.kappa[i], fr.tau[i]);
        let r0 = centered(&fr.t, i) - fr.n[i] * k;
        let r1 = centered(&fr.n, i) + fr.t[i] * k - fr.b[i] * t;
        let r2 = centered(&fr.b, i) + fr.n[i] * t;
        out[0] = out[0].max(space.norm(&r0));
        out[1] = out[1].max(space.norm(&r1));
        out[2] = out[2].max(space.norm(&r2));
    }
    out
}

impl FrenetField {
    /// Largest deviation of the frame from orthonormality.
    pub fn orthonormality_defect(&self, space: &SpaceForm) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.t.len() {
            let v = [self.t[i], self.n[i], self.b[i]];
            for a in 0..3 {
                for b in 0..3 {
                    let target = if a == b { 1.0 } else { 0.0 };
                    worst = worst.max((space.inner(&v[a], &v[b]) - target).abs());
                }
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SpaceKind;
    use std::f64::consts::PI;

    fn circle(space: SpaceForm, n: usize, r: f64) -> ClosedFilament {
        let pts = (0..n)
            .map(|i| {
                let u = TAU * i as f64 / n as f64;
                match space.kind() {
                    SpaceKind::Euclidean => Ambient::new(0.0, r * u.cos(), r * u.sin(), 0.0),
                    SpaceKind::Spherical => Ambient::new(r.cos(), r.sin() * u.cos(), r.sin() * u.sin(), 0.0),
                    SpaceKind::Hyperbolic => Ambient::new(r.cosh(), r.sinh() * u.cos(), r.sinh() * u.sin(), 0.0),
                }
            })
            .collect();
        ClosedFilament::from_raw(space, pts).unwrap()
    }

    #[test]
    fn circle_length_and_spacing() {
        let c = circle(SpaceForm::euclidean(), 32, 2.0);
        assert!((c.length() - 4.0 * PI).abs() < 1e-12);
        assert!(c.spacing_defect() < 1e-14);
        let s = circle(SpaceForm::unit_sphere(), 32, 0.7);
        assert!((s.length() - TAU * 0.7f64.sin()).abs() < 1e-12);
    }

    #[test]
    fn too_few_samples_is_usage_error() {
        let pts = vec![Ambient::new(0.0, 1.0, 0.0, 0.0); 8];
        assert!(matches!(ClosedFilament::from_raw(SpaceForm::euclidean(), pts), Err(VfeError::Usage(_))));
    }

    #[test]
    fn off_model_point_rejected() {
        let mut pts: Vec<Ambient> = circle(SpaceForm::unit_sphere(), 16, 0.5).raw_points().to_vec();
        pts[3] *= 1.01;
        assert!(matches!(ClosedFilament::from_raw(SpaceForm::unit_sphere(), pts), Err(VfeError::Geometry(_))));
    }

    #[test]
    fn periodic_derivative_examples() {
        let n = 64;
        let length = 5.0;
        let ds = length / n as f64;
        let w = TAU / length;
        let f: Vec<f64> = (0..n).map(|i| (w * i as f64 * ds).sin()).collect();
        let d1 = periodic_derivative(&f, ds, 1).unwrap();
        let d2 = periodic_derivative(&f, ds, 2).unwrap();
        for i in 0..n {
            let s = i as f64 * ds;
            assert!((d1[i] - w * (w * s).cos()).abs() < 1e-10);
            assert!((d2[i] + w * w * (w * s).sin()).abs() < 1e-10);
        }
        assert!(periodic_derivative(&[1.0; 16], 0.1, 1).unwrap().iter().all(|&v| v == 0.0));
        assert!(periodic_derivative(&f, ds, 3).is_err());
    }

    #[test]
    fn resample_fixed_point_on_uniform_circle() {
        let c = circle(SpaceForm::euclidean(), 64, 1.0);
        let r = resample_arclength(&c).unwrap();
        for (a, b) in c.raw_points().iter().zip(r.raw_points()) {
            assert!((a - b).amax() < 1e-12);
        }
    }

    #[test]
    fn resample_clustered_circle_to_equal_angles() {
        let n = 64;
        let pts: Vec<Ambient> = (0..n)
            .map(|i| {
                let u = TAU * i as f64 / n as f64;
                let th = u + 0.3 * u.sin();
                Ambient::new(0.0, th.cos(), th.sin(), 0.0)
            })
            .collect();
        let c = ClosedFilament::from_raw(SpaceForm::euclidean(), pts).unwrap();
        let r = resample_arclength(&c).unwrap();
        // equal-angle samples starting from the same first point
        for (i, p) in r.raw_points().iter().enumerate() {
            let th = TAU * i as f64 / n as f64;
            assert!((p - Ambient::new(0.0, th.cos(), th.sin(), 0.0)).amax() < 1e-10, "sample {i}");
        }
    }

    #[test]
    fn resample_ellipse_spacing() {
        let n = 128;
        let pts: Vec<Ambient> = (0..n)
            .map(|i| {
                let u = TAU * i as f64 / n as f64;
                Ambient::new(0.0, 2.0 * u.cos(), u.sin(), 0.0)
            })
            .collect();
        let c = ClosedFilament::from_raw(SpaceForm::euclidean(), pts).unwrap();
        let r = resample_arclength(&c).unwrap();
        assert_eq!(r.len(), n);
        assert!(r.spacing_defect() < 1e-6 * r.ds(), "{}", r.spacing_defect() / r.ds());
        // the spacing measured by centered chords is uniform up to curvature terms
        let chords: Vec<f64> = (0..n).map(|i| (r.raw_points()[(i + 1) % n] - r.raw_points()[i]).norm()).collect();
        let max = chords.iter().cloned().fold(0.0, f64::max);
        assert!(max < r.ds());
    }

    /// Ellipse perimeter by the Gauss-Kummer series, an independent oracle.
    fn ellipse_perimeter(a: f64, b: f64) -> f64 {
        let h = ((a - b) / (a + b)).powi(2);
        let mut sum = 1.0;
        let mut coef: f64 = 1.0;
        for k in 1..60 {
            // binomial(1/2, k)
            coef *= (0.5 - (k as f64 - 1.0)) / k as f64;
            sum += coef * coef * h.powi(k);
        }
        PI * (a + b) * sum
    }

    #[test]
    fn resample_preserves_length() {
        let exact = ellipse_perimeter(2.0, 1.0);
        let mut errs = Vec::new();
        for n in [16usize, 32] {
            let pts: Vec<Ambient> = (0..n)
                .map(|i| {
                    let u = TAU * i as f64 / n as f64;
                    Ambient::new(0.0, 2.0 * u.cos(), u.sin(), 0.0)
                })
                .collect();
            let r = resample_arclength(&ClosedFilament::from_raw(SpaceForm::euclidean(), pts).unwrap()).unwrap();
            errs.push((r.length() - exact).abs());
        }
        // at least fourth-order decay under doubling
        assert!(errs[1] < errs[0] / 16.0 * 1.3 || errs[1] < 1e-12, "{errs:?}");
    }

    #[test]
    fn resample_rejects_figure_eight_and_duplicates() {
        let n = 64;
        let pts: Vec<Ambient> = (0..n)
            .map(|i| {
                let u = TAU * i as f64 / n as f64;
                Ambient::new(0.0, u.sin(), u.sin() * u.cos(), 0.0)
            })
            .collect();
        let c = ClosedFilament::from_raw(SpaceForm::euclidean(), pts).unwrap();
        assert!(matches!(resample_arclength(&c), Err(VfeError::Geometry(_))));

        let mut pts: Vec<Ambient> = circle(SpaceForm::euclidean(), 32, 1.0).raw_points().to_vec();
        pts[5] = pts[4];
        let c = ClosedFilament::from_raw(SpaceForm::euclidean(), pts).unwrap();
        assert!(matches!(resample_arclength(&c), Err(VfeError::Geometry(_))));
    }

    #[test]
    fn frenet_circle_euclidean() {
        let r = 1.5;
        let c = circle(SpaceForm::euclidean(), 128, r);
        let fr = frenet(&c).unwrap();
        for i in 0..c.len() {
            assert!((fr.kappa[i] - 1.0 / r).abs() < 1e-10);
            assert!(fr.tau[i].abs() < 1e-10);
            assert!((fr.b[i] - Ambient::new(0.0, 0.0, 0.0, 1.0)).amax() < 1e-12);
        }
        assert!(fr.orthonormality_defect(c.space()) < 1e-12);
    }

    #[test]
    fn frenet_small_circle_on_sphere_and_hyperboloid() {
        let rho = 0.6f64;
        let s = circle(SpaceForm::unit_sphere(), 64, rho);
        let fr = frenet(&s).unwrap();
        assert!(fr.kappa.iter().all(|k| (k - 1.0 / rho.tan()).abs() < 1e-10));
        assert!(fr.tau.iter().all(|t| t.abs() < 1e-10));
        let h = circle(SpaceForm::unit_hyperbolic(), 64, rho);
        let fr = frenet(&h).unwrap();
        assert!(fr.kappa.iter().all(|k| (k - 1.0 / rho.tanh()).abs() < 1e-10));
        assert!(fr.orthonormality_defect(h.space()) < 1e-12);
    }

    #[test]
    fn great_circle_has_no_frenet_frame() {
        let s = circle(SpaceForm::unit_sphere(), 32, PI / 2.0);
        match frenet(&s) {
            Err(VfeError::FrenetUndefined { samples, .. }) => assert_eq!(samples.len(), 32),
            other => panic!("expected FrenetUndefined, got {other:?}"),
        }
    }

    #[test]
    fn frenet_formula_residuals_are_second_order() {
        let mut res = Vec::new();
        for n in [64usize, 128] {
            let c = circle(SpaceForm::unit_sphere(), n, 0.8);
            let fr = frenet(&c).unwrap();
            res.push(frenet_residuals(&c, &fr));
        }
        for k in 0..3 {
            if res[0][k] > 1e-12 {
                let ratio = res[0][k] / res[1][k];
                assert!((3.0..5.0).contains(&ratio), "formula {k}: {ratio}");
            }
        }
    }
}
