use thiserror::Error;

pub type Result<T> = std::result::Result<T, VfeError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VfeError {
    /// Caller supplied inconsistent or out-of-range arguments.
    #[error("usage error: {0}")]
    Usage(String),

    /// Input curve is degenerate, self-intersecting or off the model.
    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("Frenet frame undefined: curvature below {kappa_min:e} at samples {samples:?}")]
    FrenetUndefined { samples: Vec<usize>, kappa_min: f64 },

    #[error("time step dt = {dt:e} violates the stability bound dt <= {bound:e}")]
    Cfl { dt: f64, bound: f64 },

    #[error("step rejected at t = {t}: arclength drift {drift:e} exceeds {tol:e}")]
    StepRejected { t: f64, drift: f64, tol: f64 },

    #[error("intrinsic integration blew up at t = {t}: min kappa {min_kappa:e} below {kappa_min:e}")]
    IntrinsicBlowup {
        t: f64,
        min_kappa: f64,
        kappa_min: f64,
    },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("{source_name} integrator: {inner}")]
    Flagged {
        source_name: &'static str,
        inner: Box<VfeError>,
    },

    #[error("io error: {0}")]
    Io(String),
}

impl VfeError {
    pub fn flagged(self, source_name: &'static str) -> Self {
        VfeError::Flagged {
            source_name,
            inner: Box::new(self),
        }
    }

    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            VfeError::Usage(_) | VfeError::Cfl { .. } | VfeError::Io(_) => 1,
            VfeError::Flagged { inner, .. } => inner.exit_code(),
            _ => 3,
        }
    }
}

impl From<std::io::Error> for VfeError {
    fn from(e: std::io::Error) -> Self {
        VfeError::Io(e.to_string())
    }
}
