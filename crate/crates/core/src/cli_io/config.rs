//! Experiment configuration: an INI-style file with the sections
//! `[space_form]`, `[initial]`, `[discretization]`, `[output]` and
//! `[options]`.

use std::path::{Path, PathBuf};

use ini::Ini;

use super::generators::Params;
use crate::error::{Result, VfeError};
use crate::geometry::{SpaceForm, SpaceKind};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub space: SpaceForm,
    pub generator: String,
    pub params: Params,
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub cfl: f64,
    pub output: PathBuf,
    pub summary: PathBuf,
    /// Write every `stride`-th time level.
    pub stride: usize,
    pub reproject_every: usize,
    pub base_index: usize,
    pub certify: bool,
    pub cross_validate: bool,
    /// Number of resolutions used by the cross-validation.
    pub levels: usize,
}

fn usage(msg: impl Into<String>) -> VfeError {
    VfeError::Usage(msg.into())
}

struct Section<'a> {
    name: &'static str,
    props: Option<&'a ini::Properties>,
}

impl<'a> Section<'a> {
    fn raw(&self, key: &str) -> Option<&'a str> {
        self.props.and_then(|p| p.get(key)).map(str::trim)
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| usage(format!("[{}] {key} = '{v}' is not a valid value", self.name))),
        }
    }

    fn required<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.parse(key)?.ok_or_else(|| usage(format!("missing [{}] {key}", self.name)))
    }

    fn flag(&self, key: &str, default: bool) -> Result<bool> {
        match self.raw(key) {
            None => Ok(default),
            Some("true" | "yes" | "on" | "1") => Ok(true),
            Some("false" | "no" | "off" | "0") => Ok(false),
            Some(v) => Err(usage(format!("[{}] {key} = '{v}' is not a boolean", self.name))),
        }
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        if let Some(p) = self.props {
            if let Some((k, _)) = p.iter().find(|(k, _)| !allowed.contains(k)) {
                return Err(usage(format!("unknown key [{}] {k}; accepted: {}", self.name, allowed.join(", "))));
            }
        }
        Ok(())
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| VfeError::Io(format!("cannot read {}: {e}", path.display())))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, dir)
    }

    /// Parses configuration text; relative output paths are resolved against
    /// `dir`.
    pub fn parse(text: &str, dir: &Path) -> Result<Self> {
        let ini = Ini::load_from_str(text).map_err(|e| usage(format!("malformed configuration: {e}")))?;
        for (name, _) in ini.iter() {
            match name {
                None | Some("space_form" | "initial" | "discretization" | "output" | "options") => {}
                Some(other) => return Err(usage(format!("unknown section [{other}]"))),
            }
        }
        let sec = |name: &'static str| Section { name, props: ini.section(Some(name)) };
        let (sf, init, disc, out, opts) = (sec("space_form"), sec("initial"), sec("discretization"), sec("output"), sec("options"));

        sf.check_keys(&["kind", "k0"])?;
        let kind: SpaceKind = sf.required("kind")?;
        let k0 = sf.parse("k0")?.unwrap_or(match kind {
            SpaceKind::Euclidean => 0.0,
            SpaceKind::Spherical => 1.0,
            SpaceKind::Hyperbolic => -1.0,
        });
        let space = SpaceForm::new(kind, k0)?;

        let generator: String = init.required("name")?;
        let mut params = Params::new();
        if let Some(p) = init.props {
            for (k, v) in p.iter().filter(|(k, _)| *k != "name") {
                let x: f64 = v.trim().parse().map_err(|_| usage(format!("[initial] {k} = '{v}' is not a number")))?;
                params.insert(k.to_string(), x);
            }
        }

        disc.check_keys(&["n", "dt", "t_end", "cfl"])?;
        let n: usize = disc.required("n")?;
        if n < 16 || !n.is_power_of_two() {
            return Err(usage(format!("[discretization] n must be a power of two >= 16, got {n}")));
        }
        let dt: f64 = disc.required("dt")?;
        let t_end: f64 = disc.required("t_end")?;
        let cfl = disc.parse("cfl")?.unwrap_or(crate::dynamics::DEFAULT_CFL);
        if !(dt > 0.0) || !(t_end > 0.0) || !(cfl > 0.0) {
            return Err(usage("[discretization] dt, t_end and cfl must be positive"));
        }

        out.check_keys(&["path", "format", "summary", "stride"])?;
        let output = dir.join(out.raw("path").unwrap_or("timeseries.csv"));
        match out.raw("format") {
            None | Some("csv") => {}
            Some(f) => return Err(usage(format!("[output] format '{f}' unsupported; only csv is available"))),
        }
        let summary = match out.raw("summary") {
            Some(s) => dir.join(s),
            None => output.with_extension("summary.txt"),
        };
        let stride = out.parse("stride")?.unwrap_or(1usize);
        if stride == 0 {
            return Err(usage("[output] stride must be at least 1"));
        }

        opts.check_keys(&["reproject_every", "base_index", "certify", "cross_validate", "levels"])?;
        let base_index = opts.parse("base_index")?.unwrap_or(0usize);
        if base_index >= n {
            return Err(usage(format!("[options] base_index {base_index} out of range for n = {n}")));
        }
        let levels = opts.parse("levels")?.unwrap_or(2usize);
        if levels == 0 {
            return Err(usage("[options] levels must be at least 1"));
        }
        Ok(ExperimentConfig {
            space,
            generator,
            params,
            n,
            dt,
            t_end,
            cfl,
            output,
            summary,
            stride,
            reproject_every: opts.parse("reproject_every")?.unwrap_or(0),
            base_index,
            certify: opts.flag("certify", true)?,
            cross_validate: opts.flag("cross_validate", false)?,
            levels,
        })
    }
}
