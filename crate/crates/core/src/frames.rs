//! Connection coefficients of moving frames along a filament: the real
//! Frenet frame, complex lines spanned by `N + iB`, and the rank-2 frame
//! `{T, exp(i rho) (N + iB) / sqrt 2}` whose coefficient carries `psi`.

use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, VfeError};
use crate::filament::{ClosedFilament, FrenetField};
use crate::geometry::{Ambient, SpaceForm};
use crate::hasimoto::cumulative_trapezoid;
use crate::spectral;

/// Tolerance of the per-sample Hermitian orthonormality check.
pub const TOL_ORTHONORMAL: f64 = 1e-8;

/// A complexified tangent field stored as real and imaginary parts. Going
/// once around the loop multiplies it by `exp(i monodromy)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub re: Vec<Ambient>,
    pub im: Vec<Ambient>,
    pub monodromy: f64,
}

impl ComplexField {
    pub fn real(v: &[Ambient]) -> Self {
        ComplexField { re: v.to_vec(), im: vec![Ambient::zeros(); v.len()], monodromy: 0.0 }
    }

    /// `exp(i phase) (x + i y) * scale`.
    pub fn rotated(x: &[Ambient], y: &[Ambient], phase: &[f64], scale: f64, monodromy: f64) -> Self {
        let (re, im) = x
            .iter()
            .zip(y.iter())
            .zip(phase.iter())
            .map(|((x, y), r)| {
                let (s, c) = r.sin_cos();
                ((x * c - y * s) * scale, (x * s + y * c) * scale)
            })
            .unzip();
        ComplexField { re, im, monodromy }
    }
}

/// `h(u, v) = <u_re, v_re> + <u_im, v_im> + i (<u_im, v_re> - <u_re, v_im>)`,
/// linear in `u` and conjugate-linear in `v`.
pub fn hermitian(space: &SpaceForm, u: (&Ambient, &Ambient), v: (&Ambient, &Ambient)) -> Complex64 {
    let g = |a, b| space.inner(a, b);
    Complex64::new(g(u.0, v.0) + g(u.1, v.1), g(u.1, v.0) - g(u.0, v.1))
}

#[derive(Debug, Clone)]
pub struct MovingFrame {
    pub filament: ClosedFilament,
    pub vectors: Vec<ComplexField>,
    /// Sample where quasi-periodic vectors have their seam.
    pub base_index: usize,
}

impl MovingFrame {
    pub fn new(filament: ClosedFilament, vectors: Vec<ComplexField>, base_index: usize) -> Result<Self> {
        if vectors.is_empty() || vectors.len() > 3 {
            return Err(VfeError::Usage(format!("frame rank must be 1, 2 or 3, got {}", vectors.len())));
        }
        let n = filament.len();
        if vectors.iter().any(|v| v.re.len() != n || v.im.len() != n) || base_index >= n {
            return Err(VfeError::Usage("frame vectors must have one entry per filament sample".into()));
        }
        Ok(MovingFrame { filament, vectors, base_index })
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    /// Largest `|h(A^i, A^j) - delta_ij|` over samples.
    pub fn orthonormality_defect(&self) -> f64 {
        let space = self.filament.space();
        let mut worst = 0.0f64;
        for s in 0..self.filament.len() {
            for (i, a) in self.vectors.iter().enumerate() {
                for (j, b) in self.vectors.iter().enumerate() {
                    let h = hermitian(space, (&a.re[s], &a.im[s]), (&b.re[s], &b.im[s]));
                    let target = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((h - target).norm());
                }
            }
        }
        worst
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionCoefficient {
    /// One skew-Hermitian `rank x rank` matrix per sample.
    pub matrices: Vec<DMatrix<Complex64>>,
    /// Largest `|m + m*|` (Frobenius) before skew-symmetrization.
    pub skew_defect: f64,
}

impl ConnectionCoefficient {
    pub fn entry(&self, i: usize, j: usize) -> Vec<Complex64> {
        self.matrices.iter().map(|m| m[(i, j)]).collect()
    }
}

/// Covariant derivative along the curve of a complex field, per unit
/// arclength.
fn covariant_derivative(f: &ClosedFilament, v: &ComplexField, base_index: usize) -> (Vec<Ambient>, Vec<Ambient>) {
    let space = f.space();
    let n = f.len();
    let ds = f.ds();
    let mut dre = vec![Ambient::zeros(); n];
    let mut dim = vec![Ambient::zeros(); n];
    for c in space.offset()..4 {
        let comp: Vec<Complex64> = (0..n).map(|i| Complex64::new(v.re[i][c], v.im[i][c])).collect();
        let d = spectral::quasi_periodic_derivative(&comp, ds, v.monodromy, base_index, 1);
        for i in 0..n {
            dre[i][c] = d[i].re;
            dim[i][c] = d[i].im;
        }
    }
    let speed = f.speeds();
    let pts = f.raw_points();
    for i in 0..n {
        dre[i] = space.project(&pts[i], &dre[i]) / speed[i];
        dim[i] = space.project(&pts[i], &dim[i]) / speed[i];
    }
    (dre, dim)
}

/// Matrix `(i, j) = h(D A^j / ds, A^i)` at every sample, averaged onto its
/// skew-Hermitian part.
pub fn ehresmann_coefficient(frame: &MovingFrame) -> Result<ConnectionCoefficient> {
    let defect = frame.orthonormality_defect();
    if !(defect < TOL_ORTHONORMAL) {
        return Err(VfeError::Usage(format!("frame is not orthonormal (defect {defect:e})")));
    }
    let space = frame.filament.space();
    let r = frame.rank();
    let derivs: Vec<_> = frame.vectors.iter().map(|v| covariant_derivative(&frame.filament, v, frame.base_index)).collect();
    let mut skew_defect = 0.0f64;
    let matrices = (0..frame.filament.len())
        .map(|s| {
            let m = DMatrix::from_fn(r, r, |i, j| {
                let a = &frame.vectors[i];
                hermitian(space, (&derivs[j].0[s], &derivs[j].1[s]), (&a.re[s], &a.im[s]))
            });
            let adj = m.adjoint();
            skew_defect = skew_defect.max((&m + &adj).norm());
            (m - adj) * Complex64::new(0.5, 0.0)
        })
        .collect();
    Ok(ConnectionCoefficient { matrices, skew_defect })
}

/// `rho(s) = int_0^s tau` by the cumulative trapezoid, with the full-loop
/// value as second component.
pub fn parallel_phase(tau: &[f64], ds: f64, base_index: usize) -> (Vec<f64>, f64) {
    cumulative_trapezoid(tau, ds, base_index)
}

/// Rank-1 frame `exp(i rho) (N + iB) / sqrt 2`, where `rho` winds by
/// `monodromy` around the loop.
pub fn complex_normal_frame(f: &ClosedFilament, fr: &FrenetField, rho: &[f64], monodromy: f64, base_index: usize) -> Result<MovingFrame> {
    let e = ComplexField::rotated(&fr.n, &fr.b, rho, 1.0 / SQRT_2, monodromy);
    MovingFrame::new(f.clone(), vec![e], base_index)
}

/// Real Frenet frame `(T, N, B)` as a rank-3 frame.
pub fn frenet_frame(f: &ClosedFilament, fr: &FrenetField) -> Result<MovingFrame> {
    MovingFrame::new(f.clone(), vec![ComplexField::real(&fr.t), ComplexField::real(&fr.n), ComplexField::real(&fr.b)], 0)
}

/// Coefficient of `{T, exp(i rho) (N + iB) / sqrt 2}` with `rho` the
/// parallel phase from `base_index`.
pub fn hasimoto_frame_coefficient(f: &ClosedFilament, fr: &FrenetField, base_index: usize) -> Result<ConnectionCoefficient> {
    let (rho, total) = parallel_phase(&fr.tau, f.ds(), base_index);
    let e = ComplexField::rotated(&fr.n, &fr.b, &rho, 1.0 / SQRT_2, total);
    let frame = MovingFrame::new(f.clone(), vec![ComplexField::real(&fr.t), e], base_index)?;
    ehresmann_coefficient(&frame)
}

/// Largest `|J(N + iB) + i (N + iB)| / sqrt 2` with `J v = T x v`.
pub fn check_j_eigenvector(f: &ClosedFilament, fr: &FrenetField) -> f64 {
    let space = f.space();
    f.raw_points()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let (t, n, b) = (&fr.t[i], &fr.n[i], &fr.b[i]);
            let jre = space.cross_raw(p, t, n);
            let jim = space.cross_raw(p, t, b);
            // J(N + iB) + i(N + iB) = (JN - B) + i(JB + N)
            let re = jre - b;
            let im = jim + n;
            (space.inner(&re, &re) + space.inner(&im, &im)).sqrt() / SQRT_2
        })
        .fold(0.0, f64::max)
}
