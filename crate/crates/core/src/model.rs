//! Physical parameters, phase classification and the closed-form quantities
//! derived from them.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DickeError, Result};

/// `|lambda - 1|` below this is treated as the critical point.
pub const PHASE_TOLERANCE: f64 = 1e-12;

/// Spectral law `gamma(omega) = gamma0 * |omega|^s` of one bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    gamma0: f64,
    exponent: f64,
}

impl BathSpec {
    pub fn new(gamma0: f64, exponent: f64) -> Result<Self> {
        if !gamma0.is_finite() || gamma0 < 0.0 {
            return Err(DickeError::invalid("gamma0", gamma0, "must be finite and >= 0"));
        }
        if !exponent.is_finite() || exponent <= -1.0 {
            return Err(DickeError::invalid("s", exponent, "must be finite and > -1"));
        }
        Ok(BathSpec { gamma0, exponent })
    }

    pub fn ohmic(gamma0: f64) -> Result<Self> {
        Self::new(gamma0, 0.0)
    }

    pub fn lossless() -> Self {
        BathSpec {
            gamma0: 0.0,
            exponent: 0.0,
        }
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn is_ohmic(&self) -> bool {
        self.exponent == 0.0
    }

    pub fn with_gamma0(&self, gamma0: f64) -> Result<Self> {
        Self::new(gamma0, self.exponent)
    }

    /// Rate at a real frequency.
    ///
    /// At `omega = 0` the limit is returned: `gamma0` for ohmic, zero for
    /// super-ohmic and infinity for sub-ohmic baths.
    pub fn rate(&self, omega: f64) -> f64 {
        if self.exponent == 0.0 {
            return self.gamma0;
        }
        let x = omega.abs();
        if x == 0.0 {
            return if self.exponent > 0.0 { 0.0 } else { f64::INFINITY };
        }
        self.gamma0 * x.powf(self.exponent)
    }

    /// Principal-branch continuation `gamma0 * (omega^2)^(s/2)`.
    ///
    /// Exact `gamma0 * |omega|^s` on the real axis and even in `omega`.
    pub fn gamma_of(&self, omega: Complex64) -> Result<Complex64> {
        if self.exponent == 0.0 {
            return Ok(Complex64::new(self.gamma0, 0.0));
        }
        if omega == Complex64::new(0.0, 0.0) {
            return if self.exponent > 0.0 {
                Ok(Complex64::new(0.0, 0.0))
            } else {
                Err(DickeError::Singularity {
                    exponent: self.exponent,
                })
            };
        }
        if omega.im == 0.0 {
            return Ok(Complex64::new(self.rate(omega.re), 0.0));
        }
        Ok((omega * omega).powf(0.5 * self.exponent) * self.gamma0)
    }

    /// Real continuation `gamma0 * |omega|^s`, used by the open-system
    /// eigenvalue problem. It stays real off the real axis, so the
    /// dissipative matrix remains passive for every complex frequency.
    pub fn rate_at(&self, omega: Complex64) -> Result<f64> {
        if self.exponent < 0.0 && omega.norm() == 0.0 {
            return Err(DickeError::Singularity {
                exponent: self.exponent,
            });
        }
        Ok(self.rate(omega.norm()))
    }
}

impl Default for BathSpec {
    fn default() -> Self {
        Self::lossless()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Port {
    A,
    B,
}

impl Port {
    pub fn label(self) -> char {
        match self {
            Port::A => 'a',
            Port::B => 'b',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    omega_a: f64,
    omega_b: f64,
    g: f64,
    bath_a: BathSpec,
    bath_b: BathSpec,
}

impl ModelParams {
    pub fn new(omega_a: f64, omega_b: f64, g: f64, bath_a: BathSpec, bath_b: BathSpec) -> Result<Self> {
        check_positive("omega_a", omega_a)?;
        check_positive("omega_b", omega_b)?;
        if !g.is_finite() || g < 0.0 {
            return Err(DickeError::invalid("g", g, "must be finite and >= 0"));
        }
        Ok(ModelParams {
            omega_a,
            omega_b,
            g,
            bath_a,
            bath_b,
        })
    }

    /// Closed system.
    pub fn lossless(omega_a: f64, omega_b: f64, g: f64) -> Result<Self> {
        Self::new(omega_a, omega_b, g, BathSpec::lossless(), BathSpec::lossless())
    }

    pub fn ohmic(omega_a: f64, omega_b: f64, g: f64, gamma_a: f64, gamma_b: f64) -> Result<Self> {
        Self::new(omega_a, omega_b, g, BathSpec::ohmic(gamma_a)?, BathSpec::ohmic(gamma_b)?)
    }

    pub fn omega_a(&self) -> f64 {
        self.omega_a
    }

    pub fn omega_b(&self) -> f64 {
        self.omega_b
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn bath_a(&self) -> BathSpec {
        self.bath_a
    }

    pub fn bath_b(&self) -> BathSpec {
        self.bath_b
    }

    pub fn bath(&self, port: Port) -> BathSpec {
        match port {
            Port::A => self.bath_a,
            Port::B => self.bath_b,
        }
    }

    pub fn with_g(&self, g: f64) -> Result<Self> {
        Self::new(self.omega_a, self.omega_b, g, self.bath_a, self.bath_b)
    }

    pub fn with_omega_b(&self, omega_b: f64) -> Result<Self> {
        Self::new(self.omega_a, omega_b, self.g, self.bath_a, self.bath_b)
    }

    pub fn with_baths(&self, bath_a: BathSpec, bath_b: BathSpec) -> Self {
        ModelParams {
            bath_a,
            bath_b,
            ..*self
        }
    }

    pub fn is_ohmic(&self) -> bool {
        self.bath_a.is_ohmic() && self.bath_b.is_ohmic()
    }

    pub fn is_lossless(&self) -> bool {
        self.bath_a.gamma0 == 0.0 && self.bath_b.gamma0 == 0.0
    }

    pub fn lambda(&self) -> f64 {
        4.0 * self.g * self.g / (self.omega_a * self.omega_b)
    }

    pub fn critical_coupling(&self) -> f64 {
        critical_coupling(self.omega_a, self.omega_b)
    }

    /// Constant term of the normal-phase characteristic polynomial,
    /// `omega_a^2 omega_b^2 - 4 g^2 omega_a omega_b`.
    pub fn normal_constant_term(&self) -> f64 {
        normal_constant_term(self.omega_a, self.omega_b, self.g)
    }

    /// Characteristic frequency used to scale tolerances.
    pub fn frequency_scale(&self) -> f64 {
        self.omega_a.max(self.omega_b).max(2.0 * self.g)
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(DickeError::invalid(name, value, "must be finite and > 0"))
    }
}

pub fn critical_coupling(omega_a: f64, omega_b: f64) -> f64 {
    0.5 * (omega_a * omega_b).sqrt()
}

pub fn normal_constant_term(omega_a: f64, omega_b: f64, g: f64) -> f64 {
    omega_a * omega_a * omega_b * omega_b - 4.0 * g * g * omega_a * omega_b
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Normal,
    Critical,
    Superradiant,
}

impl Phase {
    pub fn classify(lambda: f64) -> Phase {
        if (lambda - 1.0).abs() < PHASE_TOLERANCE {
            Phase::Critical
        } else if lambda < 1.0 {
            Phase::Normal
        } else {
            Phase::Superradiant
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Phase::Normal => "normal",
            Phase::Critical => "critical",
            Phase::Superradiant => "superradiant",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Phase {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "normal" => Ok(Phase::Normal),
            "critical" => Ok(Phase::Critical),
            "superradiant" => Ok(Phase::Superradiant),
            other => Err(format!("unknown phase label {other:?}")),
        }
    }
}

/// Everything that follows from `(omega_a, omega_b, g)` once the phase is
/// known. In the normal and critical phases the renormalized quantities
/// reduce to the bare ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseData {
    pub lambda: f64,
    pub g_c: f64,
    pub phase: Phase,
    pub omega_b_tilde: f64,
    pub g_tilde: f64,
    pub d_term: f64,
    /// Factor `4/(lambda+1)^2` applied to the matter-port rate.
    pub gamma_b_scale: f64,
    pub gamma_b_tilde_amp: f64,
    pub alpha_per_n: f64,
    pub beta_per_n: f64,
}

pub fn derive_phase(params: &ModelParams) -> PhaseData {
    let lambda = params.lambda();
    let g_c = params.critical_coupling();
    let phase = Phase::classify(lambda);
    let (alpha_per_n, beta_per_n) = condensates(params);
    match phase {
        Phase::Superradiant => {
            let wb = params.omega_b;
            let scale = 4.0 / ((lambda + 1.0) * (lambda + 1.0));
            PhaseData {
                lambda,
                g_c,
                phase,
                omega_b_tilde: 0.5 * wb * (lambda + 1.0),
                g_tilde: g_c * (2.0 / (lambda + 1.0)).sqrt(),
                d_term: wb * (lambda - 1.0) * (3.0 * lambda + 1.0) / (8.0 * (lambda + 1.0)),
                gamma_b_scale: scale,
                gamma_b_tilde_amp: scale * params.bath_b.gamma0,
                alpha_per_n,
                beta_per_n,
            }
        }
        Phase::Normal | Phase::Critical => PhaseData {
            lambda,
            g_c,
            phase,
            omega_b_tilde: params.omega_b,
            g_tilde: if phase == Phase::Critical { g_c } else { params.g },
            d_term: 0.0,
            gamma_b_scale: 1.0,
            gamma_b_tilde_amp: params.bath_b.gamma0,
            alpha_per_n,
            beta_per_n,
        },
    }
}

/// Ground-state occupations `(alpha/N, beta/N)`; zero unless superradiant.
pub fn condensates(params: &ModelParams) -> (f64, f64) {
    let lambda = params.lambda();
    if Phase::classify(lambda) != Phase::Superradiant {
        return (0.0, 0.0);
    }
    let wa = params.omega_a;
    let alpha = params.g * params.g / (wa * wa) * (1.0 - 1.0 / (lambda * lambda));
    let beta = 0.5 * (1.0 - 1.0 / lambda);
    (alpha, beta)
}

/// Bath-mode occupation density `sigma_j(omega)/N` inherited from the
/// system condensate on port `j`.
pub fn bath_condensate_density(params: &ModelParams, port: Port, omega: f64) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(DickeError::invalid("omega", omega, "must be finite and > 0"));
    }
    let (alpha, beta) = condensates(params);
    let (condensate, omega_j) = match port {
        Port::A => (alpha, params.omega_a),
        Port::B => (beta, params.omega_b),
    };
    if condensate == 0.0 {
        return Ok(0.0);
    }
    let k = 2.0 * params.bath(port).rate(omega) / std::f64::consts::PI;
    Ok(k * condensate / (omega * omega_j))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AltCouplingParams {
    f_a0: f64,
    f_b0: f64,
}

impl AltCouplingParams {
    pub fn new(f_a0: f64, f_b0: f64) -> Result<Self> {
        for (name, v) in [("f_a0", f_a0), ("f_b0", f_b0)] {
            if !v.is_finite() || v < 0.0 {
                return Err(DickeError::invalid(name, v, "must be finite and >= 0"));
            }
        }
        Ok(AltCouplingParams { f_a0, f_b0 })
    }

    pub fn f_a0(&self) -> f64 {
        self.f_a0
    }

    pub fn f_b0(&self) -> f64 {
        self.f_b0
    }
}

/// Parameters renormalized by a position-type bath coupling. Fields are
/// `None` where the shifted frequency is not real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AltCouplingRenorm {
    pub omega_a_prime: Option<f64>,
    pub omega_b_prime: Option<f64>,
    pub g_prime: Option<f64>,
    pub g_c_prime: Option<f64>,
    pub abnormal_a: bool,
    pub abnormal_b: bool,
}

impl AltCouplingRenorm {
    pub fn is_abnormal(&self) -> bool {
        self.abnormal_a || self.abnormal_b
    }
}

pub fn alt_coupling_renorm(params: &ModelParams, alt: &AltCouplingParams) -> AltCouplingRenorm {
    let shifted = |w: f64, f: f64| {
        let w2 = w * w - f;
        (w2 > 0.0).then(|| w2.sqrt())
    };
    let wa = params.omega_a;
    let wb = params.omega_b;
    let omega_a_prime = shifted(wa, alt.f_a0);
    let omega_b_prime = shifted(wb, alt.f_b0);
    let g_prime = match (omega_a_prime, omega_b_prime) {
        (Some(a), Some(b)) => Some(params.g * (wa * wb / (a * b)).sqrt()),
        _ => None,
    };
    let abnormal_a = alt.f_a0 > wa * wa;
    let abnormal_b = alt.f_b0 > wb * wb;
    let ratio = (1.0 - alt.f_a0 / (wa * wa)) * (1.0 - alt.f_b0 / (wb * wb));
    let g_c_prime = (!abnormal_a && !abnormal_b).then(|| params.critical_coupling() * ratio.sqrt().sqrt());
    AltCouplingRenorm {
        omega_a_prime,
        omega_b_prime,
        g_prime,
        g_c_prime,
        abnormal_a,
        abnormal_b,
    }
}

/// Parameter varied along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    /// Coupling `g` in absolute units.
    #[serde(rename = "g")]
    Coupling,
    /// `omega_b / omega_a`, with `omega_a` held fixed.
    Ratio,
}

impl SweepAxis {
    pub fn label(self) -> &'static str {
        match self {
            SweepAxis::Coupling => "g",
            SweepAxis::Ratio => "ratio",
        }
    }

    /// Parameters at one sweep value. With `linear_gamma_b`, a ratio sweep
    /// scales the port-b amplitude in proportion to `omega_b`.
    pub fn apply(self, template: &ModelParams, value: f64, linear_gamma_b: bool) -> Result<ModelParams> {
        match self {
            SweepAxis::Coupling => template.with_g(value),
            SweepAxis::Ratio => {
                let omega_b = value * template.omega_a;
                let p = template.with_omega_b(omega_b)?;
                if !linear_gamma_b {
                    return Ok(p);
                }
                let gamma_b = template.bath_b.gamma0 * omega_b / template.omega_b;
                Ok(p.with_baths(p.bath_a, p.bath_b.with_gamma0(gamma_b)?))
            }
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "g" => Ok(SweepAxis::Coupling),
            "ratio" => Ok(SweepAxis::Ratio),
            other => Err(format!("unknown sweep axis {other:?} (expected g or ratio)")),
        }
    }
}
