//! Port reflection and the two-port scattering matrix, evaluated on real
//! probe frequencies.

pub mod io;

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::eigen::closed_eigenfrequencies;
use crate::error::{DickeError, Result};
use crate::exec::{try_map_ordered, Execution};
use crate::matrices::{BogoliubovSystem, ZetaSignature};
use crate::model::{Phase, SweepAxis};
use crate::model::ModelParams;

/// Rows whose `|S11|` varies by less than this are treated as flat.
pub const FLAT_ROW_TOLERANCE: f64 = 1e-9;

fn check_probe(omega: f64) -> Result<()> {
    if omega > 0.0 && omega.is_finite() {
        Ok(())
    } else {
        Err(DickeError::invalid("omega", omega, "probe frequency must be finite and > 0"))
    }
}

/// Port-a reflection `zeta(-ga, +gb) / zeta(+ga, +gb)`.
pub fn s11(params: &ModelParams, omega: f64) -> Result<Complex64> {
    s11_for(&BogoliubovSystem::new(params), omega)
}

pub fn s11_for(system: &BogoliubovSystem, omega: f64) -> Result<Complex64> {
    check_probe(omega)?;
    let w = Complex64::new(omega, 0.0);
    let num = system.zeta(w, ZetaSignature::REVERSED_A)?;
    let den = system.zeta(w, ZetaSignature::RETARDED)?;
    Ok(num / den)
}

/// Full 2x2 scattering matrix between ports `a` (index 0) and `b`
/// (index 1). Requires both port rates to be nonzero at `omega`.
pub fn s_matrix(params: &ModelParams, omega: f64) -> Result<Matrix2<Complex64>> {
    s_matrix_for(&BogoliubovSystem::new(params), omega)
}

pub fn s_matrix_for(system: &BogoliubovSystem, omega: f64) -> Result<Matrix2<Complex64>> {
    check_probe(omega)?;
    let w = Complex64::new(omega, 0.0);
    let (ra, rb) = system.port_rates(w, Default::default())?;
    if ra.re <= 0.0 {
        return Err(DickeError::SingularPort { port: 'a', omega });
    }
    if rb.re <= 0.0 {
        return Err(DickeError::SingularPort { port: 'b', omega });
    }
    let plus = system.m_matrix(w, ZetaSignature::RETARDED)?;
    let minus = system.m_matrix(w, ZetaSignature::ADVANCED)?;
    let inv = plus.try_inverse().ok_or(DickeError::NonConvergence {
        context: "inverting M at a real frequency".into(),
        last_iterate: w,
        residual: 0.0,
    })?;
    let full = minus * inv;

    // `rb` already carries the superradiant 4/(lambda+1)^2, so its square
    // root supplies the 2/(lambda+1) factor on port b.
    let phase = system.phase_data();
    let kappa = [
        (ra.re / system.params().omega_a()).sqrt(),
        (rb.re / phase.omega_b_tilde).sqrt(),
    ];
    let s = 0.5f64.sqrt();
    let u = Vector2::new(Complex64::new(s, 0.0), Complex64::new(-s, 0.0));
    Ok(Matrix2::from_fn(|j, k| {
        let block = full.fixed_view::<2, 2>(2 * j, 2 * k);
        let projected = u.transpose() * block * u;
        projected[(0, 0)] * (kappa[k] / kappa[j])
    }))
}

/// Reflection map over a sweep. `values` is row-major, one row per sweep
/// value.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid {
    pub axis: SweepAxis,
    pub sweep_values: Vec<f64>,
    pub probe_frequencies: Vec<f64>,
    pub values: Vec<Complex64>,
    pub phase_labels: Vec<Phase>,
}

impl SpectrumGrid {
    pub fn rows(&self) -> usize {
        self.sweep_values.len()
    }

    pub fn cols(&self) -> usize {
        self.probe_frequencies.len()
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        let n = self.cols();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn abs_row(&self, i: usize) -> Vec<f64> {
        self.row(i).iter().map(|z| z.norm()).collect()
    }

    pub fn abs_values(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    /// Minima of row `i`, see [`find_minima`].
    pub fn row_minima(&self, i: usize) -> Vec<f64> {
        find_minima(&self.probe_frequencies, &self.abs_row(i))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SweepOptions {
    /// Scale the port-b amplitude with `omega_b` on ratio sweeps.
    pub linear_gamma_b: bool,
    pub execution: Execution,
}

/// Evaluates `S11` on every (sweep value, probe frequency) cell.
pub fn sweep_spectrum(
    template: &ModelParams,
    axis: SweepAxis,
    sweep_grid: &[f64],
    probe_grid: &[f64],
    options: SweepOptions,
) -> Result<SpectrumGrid> {
    if sweep_grid.is_empty() {
        return Err(DickeError::invalid("sweep points", 0.0, "sweep grid is empty"));
    }
    if probe_grid.is_empty() {
        return Err(DickeError::invalid("probe points", 0.0, "probe grid is empty"));
    }
    for &w in probe_grid {
        check_probe(w)?;
    }
    let systems = sweep_grid
        .iter()
        .map(|&v| {
            axis.apply(template, v, options.linear_gamma_b)
                .map(|p| BogoliubovSystem::new(&p))
                .map_err(|e| e.at(v))
        })
        .collect::<Result<Vec<_>>>()?;

    let cols = probe_grid.len();
    let cells: Vec<usize> = (0..systems.len() * cols).collect();
    let values = try_map_ordered(&cells, options.execution, |&k| {
        let (i, j) = (k / cols, k % cols);
        s11_for(&systems[i], probe_grid[j]).map_err(|e| e.at(sweep_grid[i]))
    })?;

    Ok(SpectrumGrid {
        axis,
        sweep_values: sweep_grid.to_vec(),
        probe_frequencies: probe_grid.to_vec(),
        values,
        phase_labels: systems.iter().map(|s| s.phase_data().phase).collect(),
    })
}

/// Interior local minima of `abs_s11` on the (ascending) probe grid, each
/// refined by a parabola through `|S11|^2` at the bracketing triple.
/// A flat or monotone row has none.
pub fn find_minima(probe: &[f64], abs_s11: &[f64]) -> Vec<f64> {
    let n = probe.len().min(abs_s11.len());
    if n < 3 {
        return Vec::new();
    }
    let (lo, hi) = abs_s11[..n]
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if hi - lo < FLAT_ROW_TOLERANCE {
        return Vec::new();
    }
    (1..n - 1)
        .filter(|&i| abs_s11[i] < abs_s11[i - 1] && abs_s11[i] <= abs_s11[i + 1])
        .map(|i| {
            let y = |k: usize| abs_s11[k] * abs_s11[k];
            parabola_vertex(
                (probe[i - 1], y(i - 1)),
                (probe[i], y(i)),
                (probe[i + 1], y(i + 1)),
            )
        })
        .collect()
}

fn parabola_vertex((x0, y0): (f64, f64), (x1, y1): (f64, f64), (x2, y2): (f64, f64)) -> f64 {
    let p = (x1 - x0) * (y1 - y2);
    let q = (x1 - x2) * (y1 - y0);
    let denom = p - q;
    if denom == 0.0 {
        return x1;
    }
    let v = x1 - 0.5 * ((x1 - x0) * p - (x1 - x2) * q) / denom;
    v.clamp(x0, x2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Lower,
    Upper,
}

impl Branch {
    pub fn label(self) -> &'static str {
        match self {
            Branch::Lower => "lower",
            Branch::Upper => "upper",
        }
    }
}

/// Closed-system frequency of a branch.
pub fn closed_branch(params: &ModelParams, branch: Branch) -> f64 {
    let (lower, upper) = closed_eigenfrequencies(params);
    match branch {
        Branch::Lower => lower,
        Branch::Upper => upper,
    }
}

/// Reflection minimum on `probe` attributed to `branch`: the one nearest
/// the closed-system frequency of that branch.
pub fn branch_minimum(params: &ModelParams, branch: Branch, probe: &[f64]) -> Result<f64> {
    let system = BogoliubovSystem::new(params);
    let row = probe
        .iter()
        .map(|&w| s11_for(&system, w).map(|z| z.norm()))
        .collect::<Result<Vec<_>>>()?;
    let target = closed_branch(params, branch);
    find_minima(probe, &row)
        .into_iter()
        .min_by(|x, y| (x - target).abs().total_cmp(&(y - target).abs()))
        .ok_or(DickeError::NoMinimum(branch.label()))
}

/// Open-system dip position minus the closed-system frequency of the
/// branch. Positive when the dip sits above.
pub fn lamb_shift(params: &ModelParams, branch: Branch, probe: &[f64]) -> Result<f64> {
    Ok(branch_minimum(params, branch, probe)? - closed_branch(params, branch))
}

/// Factor multiplying `gamma0` of an exponent-`s` bath so that its rate at
/// `omega` equals that of an ohmic bath with the original `gamma0`.
pub fn gamma_matching_factor(omega: f64, exponent: f64) -> f64 {
    omega.powf(-exponent)
}

/// Widths of a reflection dip at half depth, measured on either side of the
/// minimum at `probe[min_index]`. Half depth is taken on `|S11|^2` halfway
/// between the minimum and the unit background. `None` if the row does not
/// recover to half depth on one side.
pub fn half_widths(probe: &[f64], abs_s11: &[f64], min_index: usize) -> Option<(f64, f64)> {
    let y = |k: usize| abs_s11[k] * abs_s11[k];
    let level = 0.5 * (1.0 + y(min_index));
    let cross = |k0: usize, k1: usize| {
        let t = (level - y(k0)) / (y(k1) - y(k0));
        probe[k0] + t * (probe[k1] - probe[k0])
    };
    let below = (1..=min_index).rev().find(|&k| y(k - 1) >= level).map(|k| cross(k, k - 1))?;
    let above = (min_index..abs_s11.len() - 1).find(|&k| y(k + 1) >= level).map(|k| cross(k, k + 1))?;
    let centre = probe[min_index];
    Some((centre - below, above - centre))
}
