//! CSV and JSON encodings of a [`SpectrumGrid`].

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::SpectrumGrid;
use crate::model::{Phase, SweepAxis};

/// Twelve significant digits in scientific notation.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.11e}")
}

/// `x` rounded to the twelve digits that [`fmt_num`] prints.
pub fn round_num(x: f64) -> f64 {
    fmt_num(x).parse().unwrap_or(x)
}

/// Writes `# key=value` metadata followed by one line per grid cell.
/// `meta` entries are emitted verbatim after the axis line.
pub fn write_csv<W: Write + ?Sized>(out: &mut W, grid: &SpectrumGrid, meta: &[String], include_phase: bool) -> io::Result<()> {
    let range = |v: &[f64]| match (v.first(), v.last()) {
        (Some(a), Some(b)) => format!("{}:{}:{}", fmt_num(*a), fmt_num(*b), v.len()),
        _ => "empty".to_string(),
    };
    writeln!(
        out,
        "# axis={} sweep={} probe={}",
        grid.axis,
        range(&grid.sweep_values),
        range(&grid.probe_frequencies)
    )?;
    for line in meta {
        writeln!(out, "# {line}")?;
    }
    write!(out, "sweep_value,omega,re_s11,im_s11,abs_s11")?;
    if include_phase {
        write!(out, ",phase")?;
    }
    writeln!(out)?;
    for (i, &v) in grid.sweep_values.iter().enumerate() {
        for (&w, z) in grid.probe_frequencies.iter().zip(grid.row(i)) {
            write!(
                out,
                "{},{},{},{},{}",
                fmt_num(v),
                fmt_num(w),
                fmt_num(z.re),
                fmt_num(z.im),
                fmt_num(z.norm())
            )?;
            if include_phase {
                write!(out, ",{}", grid.phase_labels[i])?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

/// JSON form of a spectrum. `abs_s11` holds one row per sweep value.
/// Numbers are rounded to twelve significant digits, so the document is
/// stable under re-serialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDocument {
    pub axis: SweepAxis,
    pub sweep_values: Vec<f64>,
    pub probe_frequencies: Vec<f64>,
    pub abs_s11: Vec<Vec<f64>>,
    pub phase_labels: Vec<Phase>,
}

impl From<&SpectrumGrid> for SpectrumDocument {
    fn from(grid: &SpectrumGrid) -> Self {
        SpectrumDocument {
            axis: grid.axis,
            sweep_values: grid.sweep_values.iter().map(|&v| round_num(v)).collect(),
            probe_frequencies: grid.probe_frequencies.iter().map(|&v| round_num(v)).collect(),
            abs_s11: (0..grid.rows())
                .map(|i| grid.abs_row(i).into_iter().map(round_num).collect())
                .collect(),
            phase_labels: grid.phase_labels.clone(),
        }
    }
}

impl SpectrumDocument {
    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}
