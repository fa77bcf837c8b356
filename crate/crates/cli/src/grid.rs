use std::str::FromStr;

use dicke_core::model::SweepAxis;

/// `axis:start:stop:points`, endpoints inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepArg {
    pub axis: SweepAxis,
    pub range: RangeArg,
}

/// `start:stop:points`, endpoints inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeArg {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl RangeArg {
    pub fn values(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.points)
    }
}

pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        n => (0..n)
            .map(|k| if k == n - 1 { stop } else { start + (stop - start) * k as f64 / (n - 1) as f64 })
            .collect(),
    }
}

fn parse_range(parts: &[&str]) -> Result<RangeArg, String> {
    let [start, stop, points] = parts else {
        return Err("expected start:stop:points".into());
    };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("bad number {s:?}: {e}"));
    let start = num(start)?;
    let stop = num(stop)?;
    let points = points.trim().parse::<usize>().map_err(|e| format!("bad point count {points:?}: {e}"))?;
    if !start.is_finite() || !stop.is_finite() {
        return Err("range endpoints must be finite".into());
    }
    if !(start < stop) {
        return Err(format!("empty range {start}..{stop}"));
    }
    if points < 2 {
        return Err("a range needs at least 2 points".into());
    }
    Ok(RangeArg { start, stop, points })
}

impl FromStr for RangeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_range(&s.split(':').collect::<Vec<_>>())
    }
}

impl FromStr for SweepArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let Some((axis, rest)) = parts.split_first() else {
            return Err("expected axis:start:stop:points".into());
        };
        let axis = axis.parse::<SweepAxis>()?;
        let range = parse_range(rest).map_err(|e| format!("{e} (after axis {axis})"))?;
        if range.start < 0.0 {
            return Err("sweep values must be non-negative".into());
        }
        Ok(SweepArg { axis, range })
    }
}
