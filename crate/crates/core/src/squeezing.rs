//! Vacuum quadrature variance of the reflected field.
//!
//! An output operator is a linear combination `sum_k w_k c_k` of vacuum
//! input operators. Its positive-frequency quadrature part carries
//! `e^{-i phi} i / sqrt(2 omega)`; the variance is the normally ordered
//! vacuum expectation of that part times its adjoint.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{DickeError, Result};
use crate::model::ModelParams;
use crate::scattering::s_matrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    phi: f64,
    theta: f64,
    psi: f64,
    omega: f64,
}

impl QuadratureSpec {
    /// Angles are reduced to `[0, 2 pi)`.
    pub fn new(phi: f64, theta: f64, psi: f64, omega: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(DickeError::invalid("omega", omega, "must be finite and > 0"));
        }
        for (name, v) in [("phi", phi), ("theta", theta), ("psi", psi)] {
            if !v.is_finite() {
                return Err(DickeError::invalid(name, v, "angle must be finite"));
            }
        }
        Ok(QuadratureSpec {
            phi: phi.rem_euclid(TAU),
            theta: theta.rem_euclid(TAU),
            psi: psi.rem_euclid(TAU),
            omega,
        })
    }

    /// Single-mode quadrature at angle `phi`.
    pub fn single(phi: f64, omega: f64) -> Result<Self> {
        Self::new(phi, 0.0, 0.0, omega)
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
}

/// Value of the variance for the unsqueezed vacuum.
pub fn vacuum_variance(omega: f64) -> f64 {
    0.5 / omega
}

/// Output-to-input ratio of the photon port when the matter mode is far
/// detuned above the probe.
pub fn dispersive_output_coefficient(params: &ModelParams, omega: f64) -> Result<Complex64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(DickeError::invalid("omega", omega, "must be finite and > 0"));
    }
    let wa = params.omega_a();
    let wb = params.omega_b();
    let ga = params.bath_a().rate(omega);
    let shift = Complex64::new(wa * (4.0 * params.g().powi(2) - wa * wb), 0.0);
    let num = Complex64::new(omega, -ga) * (omega * wb) + shift;
    let den = Complex64::new(omega, ga) * (omega * wb) + shift;
    Ok(num / den)
}

/// `<0| X+ X- |0>` for an output built from vacuum inputs with weights `w`.
fn normally_ordered_variance(weights: &[Complex64], phi: f64, omega: f64) -> f64 {
    let pre = Complex64::from_polar(1.0, -phi) * Complex64::i() / (2.0 * omega).sqrt();
    // Each input contributes <0|c c^dagger|0> = 1 times the product of the
    // annihilation weight in X+ and the creation weight in X-.
    let sum: Complex64 = weights.iter().map(|&w| (pre * w) * (pre * w).conj()).sum();
    sum.re
}

/// Single-mode variance from the dispersive output coefficient. `theta` and
/// `psi` of the spec are not used.
pub fn quadrature_variance(params: &ModelParams, spec: &QuadratureSpec) -> Result<f64> {
    let coef = dispersive_output_coefficient(params, spec.omega)?;
    Ok(normally_ordered_variance(&[coef], spec.phi, spec.omega))
}

/// Variance of `cos(theta) c_a,out + e^{i psi} sin(theta) c_b,out`, with
/// both outputs taken from the scattering matrix.
pub fn two_mode_variance(params: &ModelParams, spec: &QuadratureSpec) -> Result<f64> {
    let s = s_matrix(params, spec.omega)?;
    let (st, ct) = spec.theta.sin_cos();
    let mix = Complex64::from_polar(st, spec.psi);
    let weights = [s[(0, 0)] * ct + s[(1, 0)] * mix, s[(0, 1)] * ct + s[(1, 1)] * mix];
    Ok(normally_ordered_variance(&weights, spec.phi, spec.omega))
}
