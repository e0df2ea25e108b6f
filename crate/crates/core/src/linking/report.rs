//! Plain-text and CSV rendering of linking results.

use std::fmt::{self, Write as _};

use super::{Formula, Separation};
use crate::integrator::{snap_integer, IntegralResult, Snap};

/// `v` with 12 significant digits.
pub fn sig12(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let mag = v.abs().log10().floor() as i32;
    if (-4..12).contains(&mag) {
        format!("{:.*}", (11 - mag) as usize, v)
    } else {
        format!("{v:.11e}")
    }
}

/// Everything printed for one linking computation.
#[derive(Clone, Debug)]
pub struct Report {
    pub scene: String,
    pub ambient: String,
    pub formula: Formula,
    pub result: IntegralResult,
    pub snap_tol: f64,
    pub separation: Option<Separation>,
    /// Include wall time (varies between runs).
    pub timing: bool,
}

impl Report {
    pub fn snap(&self) -> Snap {
        snap_integer(self.result.value, self.snap_tol)
    }

    /// Header matching [`Report::csv_row`].
    pub const CSV_HEADER: &'static str = "scene,formula,value,error_estimate,snapped,residual,node_count,accuracy_warning";

    /// One CSV row, full round-trip precision.
    pub fn csv_row(&self) -> String {
        let snapped = match self.snap() {
            Snap::Integer(v) => v.to_string(),
            Snap::Rejected { .. } => String::new(),
        };
        format!(
            "{},{},{},{},{},{},{},{}",
            csv_field(&self.scene),
            csv_field(self.formula.label()),
            self.result.value,
            self.result.error_estimate,
            snapped,
            self.result.residual,
            self.result.node_count,
            self.result.accuracy_warning
        )
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = &self.result;
        let mut out = String::new();
        writeln!(out, "scene          {}", self.scene)?;
        writeln!(out, "ambient        {}", self.ambient)?;
        writeln!(out, "formula        {}", self.formula.label())?;
        writeln!(out, "value          {}", sig12(r.value))?;
        writeln!(out, "error_estimate {:.3e}", r.error_estimate)?;
        match self.snap() {
            Snap::Integer(v) => writeln!(out, "snapped        {v}")?,
            Snap::Rejected { .. } => writeln!(out, "snapped        rejected (tolerance {})", self.snap_tol)?,
        }
        writeln!(out, "residual       {:.3e}", r.residual)?;
        writeln!(out, "node_count     {}", r.node_count)?;
        if let Some(sep) = &self.separation {
            writeln!(out, "min_separation {}", sig12(sep.metric))?;
        }
        if self.timing {
            writeln!(out, "wall_time      {:.3} s", r.wall_time)?;
        }
        if r.accuracy_warning {
            writeln!(out, "warning        tile error above tolerance at maximum depth")?;
        }
        match self.snap() {
            Snap::Integer(v) => write!(out, "Lk = {v} (residual {:.1e})", r.residual)?,
            Snap::Rejected { residual } => write!(out, "Lk not an integer: value {} (residual {:.1e})", sig12(r.value), residual)?,
        }
        f.write_str(&out)
    }
}
