//! Time-series CSV: one row per `(t, s)` pair. Values are written with 17
//! significant digits so a re-read reproduces them bit for bit.

use std::io::{Read, Write};

use crate::error::{Result, VfeError};
use crate::hasimoto::PipelineRun;

pub const HEADER: [&str; 11] =
    ["t", "s", "kappa", "tau", "psi_re", "psi_im", "A", "gauge", "nls_residual", "arc_drift", "constraint_res"];

/// One time level. Scalars apply to every sample of the level; the residual
/// is `NaN` where it is undefined (first and last level).
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesRecord {
    pub t: f64,
    pub s: Vec<f64>,
    pub kappa: Vec<f64>,
    pub tau: Vec<f64>,
    pub psi_re: Vec<f64>,
    pub psi_im: Vec<f64>,
    pub a: f64,
    pub gauge: f64,
    pub nls_residual: f64,
    pub arc_drift: f64,
    pub constraint_res: f64,
}

impl TimeSeriesRecord {
    /// Bitwise equality, treating `NaN`s with equal bits as equal.
    pub fn bit_eq(&self, other: &Self) -> bool {
        let b = |x: &f64| x.to_bits();
        let v = |a: &[f64], c: &[f64]| a.len() == c.len() && a.iter().map(b).eq(c.iter().map(b));
        b(&self.t) == b(&other.t)
            && v(&self.s, &other.s)
            && v(&self.kappa, &other.kappa)
            && v(&self.tau, &other.tau)
            && v(&self.psi_re, &other.psi_re)
            && v(&self.psi_im, &other.psi_im)
            && [self.a, self.gauge, self.nls_residual, self.arc_drift, self.constraint_res]
                .iter()
                .map(b)
                .eq([other.a, other.gauge, other.nls_residual, other.arc_drift, other.constraint_res].iter().map(b))
    }
}

/// Records for every `stride`-th level of a pipeline run, always including
/// the final level.
pub fn records_from_run(run: &PipelineRun, stride: usize) -> Vec<TimeSeriesRecord> {
    let last = run.times.len() - 1;
    let s: Vec<f64> = (0..run.n).map(|i| i as f64 * run.ds).collect();
    (0..=last)
        .filter(|j| j % stride.max(1) == 0 || *j == last)
        .map(|j| {
            let f = &run.fields[j];
            TimeSeriesRecord {
                t: run.times[j],
                s: s.clone(),
                kappa: run.kappa[j].clone(),
                tau: run.tau[j].clone(),
                psi_re: f.psi.iter().map(|p| p.re).collect(),
                psi_im: f.psi.iter().map(|p| p.im).collect(),
                a: run.gauge[j],
                gauge: f.gauge_accumulator,
                nls_residual: run.residuals[j],
                arc_drift: run.arc_drift[j],
                constraint_res: run.constraint[j],
            }
        })
        .collect()
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(out: W, records: &[TimeSeriesRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| VfeError::Io(e.to_string());
    w.write_record(HEADER).map_err(io)?;
    for r in records {
        for i in 0..r.s.len() {
            let row = [
                r.t,
                r.s[i],
                r.kappa[i],
                r.tau[i],
                r.psi_re[i],
                r.psi_im[i],
                r.a,
                r.gauge,
                r.nls_residual,
                r.arc_drift,
                r.constraint_res,
            ];
            w.write_record(row.iter().map(|x| fmt(*x))).map_err(io)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a file written by [`write_csv`], grouping consecutive rows with
/// the same `t` into one record.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<TimeSeriesRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let bad = |m: String| VfeError::Io(format!("malformed time series: {m}"));
    let header = rd.headers().map_err(|e| bad(e.to_string()))?;
    if !header.iter().eq(HEADER.iter().copied()) {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let mut out: Vec<TimeSeriesRecord> = Vec::new();
    for row in rd.records() {
        let row = row.map_err(|e| bad(e.to_string()))?;
        let v: Vec<f64> = row
            .iter()
            .map(|x| x.parse::<f64>().map_err(|_| bad(format!("'{x}' is not a number"))))
            .collect::<Result<_>>()?;
        if v.len() != HEADER.len() {
            return Err(bad(format!("row has {} fields", v.len())));
        }
        let same = out.last().is_some_and(|r| r.t.to_bits() == v[0].to_bits());
        if !same {
            out.push(TimeSeriesRecord {
                t: v[0],
                s: Vec::new(),
                kappa: Vec::new(),
                tau: Vec::new(),
                psi_re: Vec::new(),
                psi_im: Vec::new(),
                a: v[6],
                gauge: v[7],
                nls_residual: v[8],
                arc_drift: v[9],
                constraint_res: v[10],
            });
        }
        let r = out.last_mut().expect("record pushed above");
        r.s.push(v[1]);
        r.kappa.push(v[2]);
        r.tau.push(v[3]);
        r.psi_re.push(v[4]);
        r.psi_im.push(v[5]);
    }
    Ok(out)
}
