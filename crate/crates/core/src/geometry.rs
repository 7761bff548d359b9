//! Embedded models of the three simply connected constant-curvature
//! 3-manifolds.
//!
//! All models live in a 4-dimensional ambient vector space:
//!
//! * Euclidean: the hyperplane `x0 = 0` of R^4 with the Euclidean form; the
//!   public coordinates are `(x1, x2, x3)`.
//! * Spherical: the round sphere `<p,p> = R^2` in Euclidean R^4.
//! * Hyperbolic: the upper sheet `<p,p> = -R^2`, `x0 > 0`, of the hyperboloid
//!   in Minkowski space with signature `(-,+,+,+)`.
//!
//! In every model the Levi-Civita derivative along a curve is "differentiate
//! the ambient coordinates, then project onto the tangent space".
//!
//! Orientation: with `n` the future/outward unit normal of the model (`e0`
//! for the Euclidean hyperplane, `p/R` otherwise), the volume form on
//! `T_pM` is `vol(u, v, x) = det[n, u, v, x]`. For the Euclidean model this is
//! the right-handed triple product, so `e1 x e2 = e3`. Reversing it negates
//! every torsion and conjugates the Hasimoto field.

use nalgebra::{Matrix3, Vector4};

use crate::error::{Result, VfeError};
use crate::spectral;

pub type Ambient = Vector4<f64>;

/// Relative tolerance for model-constraint checks.
pub const TOL_MANIFOLD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    Euclidean,
    Spherical,
    Hyperbolic,
}

impl std::str::FromStr for SpaceKind {
    type Err = VfeError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "euclidean" | "flat" => Ok(SpaceKind::Euclidean),
            "spherical" | "sphere" => Ok(SpaceKind::Spherical),
            "hyperbolic" | "hyperboloid" => Ok(SpaceKind::Hyperbolic),
            other => Err(VfeError::Usage(format!(
                "unknown space form '{other}' (expected euclidean, spherical or hyperbolic)"
            ))),
        }
    }
}

impl std::fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SpaceKind::Euclidean => "euclidean",
            SpaceKind::Spherical => "spherical",
            SpaceKind::Hyperbolic => "hyperbolic",
        };
        f.write_str(s)
    }
}

/// A constant-curvature ambient model with sectional curvature `k0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceForm {
    kind: SpaceKind,
    k0: f64,
    radius: f64,
}

impl SpaceForm {
    pub fn new(kind: SpaceKind, k0: f64) -> Result<Self> {
        let ok = match kind {
            SpaceKind::Euclidean => k0 == 0.0,
            SpaceKind::Spherical => k0 > 0.0 && k0.is_finite(),
            SpaceKind::Hyperbolic => k0 < 0.0 && k0.is_finite(),
        };
        if !ok {
            return Err(VfeError::Usage(format!(
                "curvature K0 = {k0} is inconsistent with a {kind} model"
            )));
        }
        let radius = if k0 == 0.0 { f64::INFINITY } else { 1.0 / k0.abs().sqrt() };
        Ok(SpaceForm { kind, k0, radius })
    }

    /// Model chosen by the sign of `k0`.
    pub fn from_curvature(k0: f64) -> Result<Self> {
        let kind = if k0 > 0.0 {
            SpaceKind::Spherical
        } else if k0 < 0.0 {
            SpaceKind::Hyperbolic
        } else {
            SpaceKind::Euclidean
        };
        Self::new(kind, k0)
    }

    pub fn euclidean() -> Self {
        SpaceForm { kind: SpaceKind::Euclidean, k0: 0.0, radius: f64::INFINITY }
    }

    pub fn unit_sphere() -> Self {
        SpaceForm { kind: SpaceKind::Spherical, k0: 1.0, radius: 1.0 }
    }

    pub fn unit_hyperbolic() -> Self {
        SpaceForm { kind: SpaceKind::Hyperbolic, k0: -1.0, radius: 1.0 }
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    /// `1/sqrt(|K0|)`, infinite for the flat model.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn ambient_dim(&self) -> usize {
        match self.kind {
            SpaceKind::Euclidean => 3,
            _ => 4,
        }
    }

    /// First internal slot carrying a public coordinate.
    pub(crate) fn offset(&self) -> usize {
        4 - self.ambient_dim()
    }

    /// Internal ambient vector from public coordinates.
    pub fn embed(&self, coords: &[f64]) -> Result<Ambient> {
        if coords.len() != self.ambient_dim() {
            return Err(VfeError::Usage(format!(
                "{} model expects {} coordinates, got {}",
                self.kind,
                self.ambient_dim(),
                coords.len()
            )));
        }
        let mut v = Ambient::zeros();
        for (i, c) in coords.iter().enumerate() {
            v[self.offset() + i] = *c;
        }
        Ok(v)
    }

    /// Public coordinates of an internal ambient vector.
    pub fn coords(&self, v: &Ambient) -> Vec<f64> {
        v.as_slice()[self.offset()..].to_vec()
    }

    /// Ambient bilinear form: Euclidean, or Minkowski for the hyperboloid.
    #[inline]
    pub fn inner(&self, a: &Ambient, b: &Ambient) -> f64 {
        match self.kind {
            SpaceKind::Hyperbolic => -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3],
            _ => a.dot(b),
        }
    }

    #[inline]
    pub fn norm(&self, v: &Ambient) -> f64 {
        self.inner(v, v).max(0.0).sqrt()
    }

    /// Unit normal of the model at `p`; defines the orientation.
    #[inline]
    pub fn unit_normal(&self, p: &Ambient) -> Ambient {
        match self.kind {
            SpaceKind::Euclidean => Ambient::new(1.0, 0.0, 0.0, 0.0),
            _ => p / self.radius,
        }
    }

    /// Relative violation of the model constraint at `p`.
    pub fn constraint_residual(&self, p: &Ambient) -> f64 {
        match self.kind {
            SpaceKind::Euclidean => p[0].abs(),
            SpaceKind::Spherical => (p.dot(p) / (self.radius * self.radius) - 1.0).abs(),
            SpaceKind::Hyperbolic => {
                let r = (self.inner(p, p) / (self.radius * self.radius) + 1.0).abs();
                if p[0] > 0.0 {
                    r
                } else {
                    r.max(1.0)
                }
            }
        }
    }

    pub fn contains(&self, p: &Ambient) -> bool {
        self.constraint_residual(p) < TOL_MANIFOLD
    }

    /// Removes the normal component of `w` at `p`.
    #[inline]
    pub fn project(&self, p: &Ambient, w: &Ambient) -> Ambient {
        match self.kind {
            SpaceKind::Euclidean => *w,
            _ => w - p * (self.inner(w, p) / self.inner(p, p)),
        }
    }

    /// `det[n, u, v, x]` for tangent vectors at `p`.
    pub fn volume(&self, p: &Ambient, u: &Ambient, v: &Ambient, x: &Ambient) -> f64 {
        nalgebra::Matrix4::from_columns(&[self.unit_normal(p), *u, *v, *x]).determinant()
    }

    /// Oriented cross product on `T_pM`: the tangent `w` with
    /// `inner(w, x) = volume(p, u, v, x)` for all tangent `x`.
    pub fn cross_raw(&self, p: &Ambient, u: &Ambient, v: &Ambient) -> Ambient {
        let n = self.unit_normal(p);
        let mut c = Ambient::zeros();
        for i in 0..4 {
            let rows: Vec<usize> = (0..4).filter(|&r| r != i).collect();
            let minor = Matrix3::from_fn(|r, col| {
                let src = match col {
                    0 => &n,
                    1 => u,
                    _ => v,
                };
                src[rows[r]]
            });
            let sign = if (i + 3) % 2 == 0 { 1.0 } else { -1.0 };
            c[i] = sign * minor.determinant();
        }
        if self.kind == SpaceKind::Hyperbolic {
            c[0] = -c[0];
        }
        if self.kind == SpaceKind::Euclidean {
            c[0] = 0.0;
        }
        c
    }

    /// Closed-form curvature tensor `K0 (<X,W><Y,Z> - <X,Z><Y,W>)`.
    pub fn riemann_raw(&self, x: &Ambient, y: &Ambient, w: &Ambient, z: &Ambient) -> f64 {
        self.k0 * (self.inner(x, w) * self.inner(y, z) - self.inner(x, z) * self.inner(y, w))
    }

    /// Curvature contractions entering the curvature/torsion evolution,
    /// evaluated on an orthonormal frame `(T, N, B)` through its Gram matrix.
    pub fn frame_curvature_terms(&self) -> FrameCurvature {
        let gram = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let closed = |x: usize, y: usize, w: usize, z: usize| {
            self.k0 * (gram(x, w) * gram(y, z) - gram(x, z) * gram(y, w))
        };
        let (t, n, b) = (0, 1, 2);
        FrameCurvature {
            tbtn: closed(t, b, t, n),
            tbtb: closed(t, b, t, b),
            btnb: closed(b, t, n, b),
        }
    }

    /// Rescales `p` onto the model.
    pub fn retract_raw(&self, p: &Ambient) -> Result<Ambient> {
        match self.kind {
            SpaceKind::Euclidean => Ok(*p),
            SpaceKind::Spherical => {
                let norm = p.norm();
                if !(norm > 0.1 * self.radius) || !norm.is_finite() {
                    return Err(VfeError::Numerical(format!(
                        "cannot retract {p:?} onto the sphere of radius {}: norm {norm:e}",
                        self.radius
                    )));
                }
                Ok(p * (self.radius / norm))
            }
            SpaceKind::Hyperbolic => {
                let q = -self.inner(p, p);
                if !(q > 0.01 * self.radius * self.radius) || !(p[0] > 0.0) || !q.is_finite() {
                    return Err(VfeError::Numerical(format!(
                        "cannot retract {p:?} onto the hyperboloid: -<p,p> = {q:e}, x0 = {} \
                         (too close to the light cone or wrong sheet)",
                        p[0]
                    )));
                }
                Ok(p * (self.radius / q.sqrt()))
            }
        }
    }

    /// Exponential map at `p` applied to tangent `v`.
    pub fn exp_map(&self, p: &Ambient, v: &Ambient) -> Ambient {
        self.geodesic(p, v, 1.0).0
    }

    /// Point and velocity at time `t` of the geodesic with initial data `(p, v)`.
    pub fn geodesic(&self, p: &Ambient, v: &Ambient, t: f64) -> (Ambient, Ambient) {
        let speed = self.norm(v);
        if speed == 0.0 {
            return (*p, *v);
        }
        let dir = v / speed;
        let d = speed * t;
        match self.kind {
            SpaceKind::Euclidean => (p + v * t, *v),
            SpaceKind::Spherical => {
                let r = self.radius;
                let (s, c) = (d / r).sin_cos();
                (p * c + dir * (r * s), (-p * (s / r) + dir * c) * speed)
            }
            SpaceKind::Hyperbolic => {
                let r = self.radius;
                let (s, c) = ((d / r).sinh(), (d / r).cosh());
                (p * c + dir * (r * s), (p * (s / r) + dir * c) * speed)
            }
        }
    }

    /// Geodesic distance between two model points.
    pub fn distance(&self, p: &Ambient, q: &Ambient) -> f64 {
        let diff = p - q;
        match self.kind {
            SpaceKind::Euclidean => diff.norm(),
            SpaceKind::Spherical => {
                let r = self.radius;
                2.0 * r * (diff.norm() / (2.0 * r)).min(1.0).asin()
            }
            SpaceKind::Hyperbolic => {
                let r = self.radius;
                2.0 * r * (self.inner(&diff, &diff).max(0.0).sqrt() / (2.0 * r)).asinh()
            }
        }
    }

    /// Inverse of the exponential map: tangent at `p` pointing to `q`.
    pub fn log_map(&self, p: &Ambient, q: &Ambient) -> Ambient {
        if self.kind == SpaceKind::Euclidean {
            return q - p;
        }
        let w = self.project(p, q);
        let n = self.norm(&w);
        if n == 0.0 {
            return Ambient::zeros();
        }
        w * (self.distance(p, q) / n)
    }

    /// Parallel transport of `v` along the geodesic from `p` to `q`,
    /// integrating `V' = -<V, gamma'> gamma / <gamma, gamma>` with RK4.
    pub fn transport_along_geodesic(&self, p: &Ambient, q: &Ambient, v: &Ambient, substeps: usize) -> Ambient {
        if self.kind == SpaceKind::Euclidean {
            return *v;
        }
        let dir = self.log_map(p, q);
        let rhs = |t: f64, x: &Ambient| {
            let (g, dg) = self.geodesic(p, &dir, t);
            -g * (self.inner(x, &dg) / self.inner(&g, &g))
        };
        let h = 1.0 / substeps as f64;
        let mut x = *v;
        for k in 0..substeps {
            let t = k as f64 * h;
            let k1 = rhs(t, &x);
            let k2 = rhs(t + 0.5 * h, &(x + k1 * (0.5 * h)));
            let k3 = rhs(t + 0.5 * h, &(x + k2 * (0.5 * h)));
            let k4 = rhs(t + h, &(x + k3 * h));
            x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
        self.project(q, &x)
    }

    /// Sectional curvature of the plane spanned by orthonormal `e1, e2` at
    /// `p`, estimated from the holonomy angle of parallel transport around
    /// the geodesic quadrilateral with vertices `exp_p((+-h/2) e1 + (+-h/2) e2)`
    /// divided by the nominal area `h^2`. The estimate carries an `O(h^2)`
    /// relative error from the area.
    pub fn holonomy_curvature(&self, p: &Ambient, e1: &Ambient, e2: &Ambient, h: f64) -> f64 {
        let substeps = 64;
        let corner = |a: f64, b: f64| self.exp_map(p, &(e1 * (a * h / 2.0) + e2 * (b * h / 2.0)));
        let loop_pts = [corner(-1.0, -1.0), corner(1.0, -1.0), corner(1.0, 1.0), corner(-1.0, 1.0)];
        let mut v = self.transport_along_geodesic(p, &loop_pts[0], e1, substeps);
        for i in 0..4 {
            let (a, b) = (loop_pts[i], loop_pts[(i + 1) % 4]);
            v = self.transport_along_geodesic(&a, &b, &v, substeps);
        }
        let v = self.transport_along_geodesic(&loop_pts[0], p, &v, substeps);
        let angle = self.inner(&v, e2).atan2(self.inner(&v, e1));
        angle / (h * h)
    }

    /// Covariant derivative along a closed curve sampled at `points` with
    /// arclength spacing `ds`: spectral derivative of the ambient
    /// coordinates of `field`, projected onto each tangent space.
    pub fn covariant_derivative_raw(&self, points: &[Ambient], field: &[Ambient], ds: f64) -> Result<Vec<Ambient>> {
        if points.len() != field.len() {
            return Err(VfeError::Usage(format!(
                "field has {} samples but the curve has {}",
                field.len(),
                points.len()
            )));
        }
        if points.len() < crate::filament::MIN_SAMPLES {
            return Err(VfeError::Usage(format!(
                "covariant derivative needs at least {} samples, got {}",
                crate::filament::MIN_SAMPLES,
                points.len()
            )));
        }
        let d = coordinate_derivative(self, field, ds, 1);
        Ok(points.iter().zip(d.iter()).map(|(p, w)| self.project(p, w)).collect())
    }

    // typed API

    pub fn point(&self, coords: &[f64]) -> Result<AmbientPoint> {
        AmbientPoint::new(self, coords)
    }

    pub fn metric(&self, u: &TangentVector, v: &TangentVector) -> Result<f64> {
        same_base(u, v)?;
        Ok(self.inner(&u.v, &v.v))
    }

    pub fn project_to_tangent(&self, p: &AmbientPoint, w: &[f64]) -> Result<TangentVector> {
        let w = self.embed(w)?;
        Ok(TangentVector { base: p.clone(), v: self.project(&p.p, &w) })
    }

    pub fn cross(&self, u: &TangentVector, v: &TangentVector) -> Result<TangentVector> {
        same_base(u, v)?;
        Ok(TangentVector { base: u.base.clone(), v: self.cross_raw(&u.base.p, &u.v, &v.v) })
    }

    pub fn riemann(&self, x: &TangentVector, y: &TangentVector, w: &TangentVector, z: &TangentVector) -> Result<f64> {
        same_base(x, y)?;
        same_base(x, w)?;
        same_base(x, z)?;
        Ok(self.riemann_raw(&x.v, &y.v, &w.v, &z.v))
    }

    pub fn retract(&self, coords: &[f64]) -> Result<AmbientPoint> {
        let p = self.retract_raw(&self.embed(coords)?)?;
        Ok(AmbientPoint { p, dim: self.ambient_dim() })
    }
}

/// Curvature-tensor contractions on an orthonormal Frenet frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameCurvature {
    /// `(T, B, T, N)`
    pub tbtn: f64,
    /// `(T, B, T, B)`
    pub tbtb: f64,
    /// `(B, T, N, B)`
    pub btnb: f64,
}

/// A point on one of the models.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientPoint {
    pub(crate) p: Ambient,
    dim: usize,
}

impl AmbientPoint {
    pub fn new(space: &SpaceForm, coords: &[f64]) -> Result<Self> {
        let p = space.embed(coords)?;
        let res = space.constraint_residual(&p);
        if res >= TOL_MANIFOLD {
            return Err(VfeError::Geometry(format!(
                "point {coords:?} is off the {} model (residual {res:e})",
                space.kind()
            )));
        }
        Ok(AmbientPoint { p, dim: space.ambient_dim() })
    }

    pub(crate) fn from_raw(space: &SpaceForm, p: Ambient) -> Self {
        AmbientPoint { p, dim: space.ambient_dim() }
    }

    pub fn coords(&self) -> &[f64] {
        &self.p.as_slice()[4 - self.dim..]
    }

    pub fn raw(&self) -> &Ambient {
        &self.p
    }
}

/// A tangent vector anchored at a model point.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub base: AmbientPoint,
    pub(crate) v: Ambient,
}

impl TangentVector {
    /// Tangent vector from public coordinates; rejects vectors with a normal
    /// component.
    pub fn new(space: &SpaceForm, base: &AmbientPoint, coords: &[f64]) -> Result<Self> {
        let v = space.embed(coords)?;
        let normal = space.inner(&v, &base.p).abs();
        let scale = space.norm(&v).max(1.0) * base.p.norm().max(1.0);
        if space.kind() != SpaceKind::Euclidean && normal > TOL_MANIFOLD * scale {
            return Err(VfeError::Geometry(format!("vector {coords:?} is not tangent at {:?}", base.coords())));
        }
        Ok(TangentVector { base: base.clone(), v })
    }

    pub fn coords(&self) -> &[f64] {
        &self.v.as_slice()[4 - self.base.dim..]
    }

    pub fn raw(&self) -> &Ambient {
        &self.v
    }
}

fn same_base(u: &TangentVector, v: &TangentVector) -> Result<()> {
    let d = (u.base.p - v.base.p).amax();
    if d > TOL_MANIFOLD * u.base.p.amax().max(1.0) {
        return Err(VfeError::Usage(format!(
            "tangent vectors live at different base points {:?} and {:?}",
            u.base.coords(),
            v.base.coords()
        )));
    }
    Ok(())
}

/// Componentwise spectral derivative of a periodic ambient-vector field.
pub(crate) fn coordinate_derivative(space: &SpaceForm, field: &[Ambient], ds: f64, order: u32) -> Vec<Ambient> {
    let n = field.len();
    let mut out = vec![Ambient::zeros(); n];
    for c in space.offset()..4 {
        let comp: Vec<f64> = field.iter().map(|v| v[c]).collect();
        let d = spectral::derivative(&comp, ds, order);
        for (o, x) in out.iter_mut().zip(d) {
            o[c] = x;
        }
    }
    out
}
