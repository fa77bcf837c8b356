//! Hopfield-Bogoliubov dynamical matrix, port damping matrix and the
//! characteristic function `zeta(omega) = det(A - i Gamma(omega)/2 - omega)`.
//!
//! Basis ordering is `(a, a^dagger, b, b^dagger)` throughout.

use nalgebra::{Matrix4, Matrix5, Vector5};
use num_complex::Complex64;

use crate::error::{DickeError, Result};
use crate::model::{derive_phase, ModelParams, Phase, PhaseData};

pub type Mat4 = Matrix4<Complex64>;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Signs attached to the two port rates inside `zeta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ZetaSignature {
    pub sign_a: Sign,
    pub sign_b: Sign,
}

impl ZetaSignature {
    /// The physical (causal) configuration; denominator of `S11`.
    pub const RETARDED: ZetaSignature = ZetaSignature::new(Sign::Plus, Sign::Plus);
    /// Port-a rate reversed; numerator of `S11`.
    pub const REVERSED_A: ZetaSignature = ZetaSignature::new(Sign::Minus, Sign::Plus);
    pub const ADVANCED: ZetaSignature = ZetaSignature::new(Sign::Minus, Sign::Minus);

    pub const fn new(sign_a: Sign, sign_b: Sign) -> Self {
        ZetaSignature { sign_a, sign_b }
    }
}

impl Default for ZetaSignature {
    fn default() -> Self {
        Self::RETARDED
    }
}

/// How a power-law rate is evaluated at complex frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Continuation {
    /// `gamma0 |omega|^s`, real everywhere.
    #[default]
    RealModulus,
    /// `gamma0 (omega^2)^(s/2)` on the principal branch.
    Principal,
}

pub fn build_a_matrix(phase: &PhaseData, params: &ModelParams) -> Mat4 {
    let wa = params.omega_a();
    let (wb, g, d) = match phase.phase {
        Phase::Superradiant => (phase.omega_b_tilde, phase.g_tilde, phase.d_term),
        Phase::Normal | Phase::Critical => (params.omega_b(), params.g(), 0.0),
    };
    #[rustfmt::skip]
    let a = Matrix4::new(
        wa,   0.0, g,               g,
        0.0, -wa, -g,              -g,
        g,    g,   wb + 2.0 * d,    2.0 * d,
        -g,  -g,  -2.0 * d,        -wb - 2.0 * d,
    );
    a.map(c)
}

/// Damping matrix for explicit port rates. `rate_b` must already include
/// the superradiant rescaling.
pub fn gamma_from_rates(rate_a: Complex64, rate_b: Complex64, signature: ZetaSignature) -> Mat4 {
    let ga = rate_a * signature.sign_a.value();
    let gb = rate_b * signature.sign_b.value();
    let z = Complex64::new(0.0, 0.0);
    #[rustfmt::skip]
    let m = Matrix4::new(
        ga, -ga, z,   z,
        -ga, ga, z,   z,
        z,   z,  gb, -gb,
        z,   z, -gb,  gb,
    );
    m
}

pub fn build_gamma(phase: &PhaseData, params: &ModelParams, omega: Complex64, signature: ZetaSignature) -> Result<Mat4> {
    let (ra, rb) = port_rates(phase, params, omega, Continuation::default())?;
    Ok(gamma_from_rates(ra, rb, signature))
}

fn port_rates(
    phase: &PhaseData,
    params: &ModelParams,
    omega: Complex64,
    continuation: Continuation,
) -> Result<(Complex64, Complex64)> {
    let (ra, rb) = match continuation {
        Continuation::Principal => (params.bath_a().gamma_of(omega)?, params.bath_b().gamma_of(omega)?),
        Continuation::RealModulus => (c(params.bath_a().rate_at(omega)?), c(params.bath_b().rate_at(omega)?)),
    };
    Ok((ra, rb * phase.gamma_b_scale))
}

/// Determinant of a 4x4 matrix by Laplace expansion over the first two rows.
pub fn det4(m: &Mat4) -> Complex64 {
    let top = |i: usize, j: usize| m[(0, i)] * m[(1, j)] - m[(0, j)] * m[(1, i)];
    let bot = |i: usize, j: usize| m[(2, i)] * m[(3, j)] - m[(2, j)] * m[(3, i)];
    top(0, 1) * bot(2, 3) - top(0, 2) * bot(1, 3) + top(0, 3) * bot(1, 2) + top(1, 2) * bot(0, 3)
        - top(1, 3) * bot(0, 2)
        + top(2, 3) * bot(0, 1)
}

pub fn zeta(phase: &PhaseData, params: &ModelParams, omega: Complex64, signature: ZetaSignature) -> Result<Complex64> {
    BogoliubovSystem::from_parts(*params, *phase).zeta(omega, signature)
}

/// The dynamical problem for one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovSystem {
    params: ModelParams,
    phase: PhaseData,
    a: Mat4,
}

impl BogoliubovSystem {
    pub fn new(params: &ModelParams) -> Self {
        Self::from_parts(*params, derive_phase(params))
    }

    fn from_parts(params: ModelParams, phase: PhaseData) -> Self {
        let a = build_a_matrix(&phase, &params);
        BogoliubovSystem { params, phase, a }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn phase_data(&self) -> &PhaseData {
        &self.phase
    }

    pub fn a_matrix(&self) -> &Mat4 {
        &self.a
    }

    /// Port rates at `omega`, port b already rescaled for the phase.
    pub fn port_rates(&self, omega: Complex64, continuation: Continuation) -> Result<(Complex64, Complex64)> {
        port_rates(&self.phase, &self.params, omega, continuation)
    }

    pub fn gamma(&self, omega: Complex64, signature: ZetaSignature) -> Result<Mat4> {
        self.gamma_with(omega, signature, Continuation::default())
    }

    pub fn gamma_with(&self, omega: Complex64, signature: ZetaSignature, continuation: Continuation) -> Result<Mat4> {
        let (ra, rb) = self.port_rates(omega, continuation)?;
        Ok(gamma_from_rates(ra, rb, signature))
    }

    /// `A - i Gamma/2` with the rates frozen at the given values.
    pub fn damped_matrix(&self, rate_a: Complex64, rate_b: Complex64, signature: ZetaSignature) -> Mat4 {
        self.a - gamma_from_rates(rate_a, rate_b, signature) * (I * 0.5)
    }

    pub fn m_matrix(&self, omega: Complex64, signature: ZetaSignature) -> Result<Mat4> {
        self.m_matrix_with(omega, signature, Continuation::default())
    }

    pub fn m_matrix_with(&self, omega: Complex64, signature: ZetaSignature, continuation: Continuation) -> Result<Mat4> {
        let (ra, rb) = self.port_rates(omega, continuation)?;
        Ok(self.damped_matrix(ra, rb, signature) - Mat4::identity() * omega)
    }

    pub fn zeta(&self, omega: Complex64, signature: ZetaSignature) -> Result<Complex64> {
        self.zeta_with(omega, signature, Continuation::default())
    }

    /// At `omega = 0` a sub-ohmic rate diverges while `omega * gamma`
    /// vanishes; the limit `det A` is returned there.
    pub fn zeta_with(&self, omega: Complex64, signature: ZetaSignature, continuation: Continuation) -> Result<Complex64> {
        if omega.norm() == 0.0 && self.has_subohmic_bath() {
            return Ok(self.constant_term());
        }
        Ok(det4(&self.m_matrix_with(omega, signature, continuation)?))
    }

    /// `zeta(0)`, which carries no damping.
    pub fn constant_term(&self) -> Complex64 {
        det4(&self.a)
    }

    fn has_subohmic_bath(&self) -> bool {
        self.params.bath_a().exponent() < 0.0 || self.params.bath_b().exponent() < 0.0
    }

    /// Frequency scale for tolerances.
    pub fn scale(&self) -> f64 {
        self.params
            .omega_a()
            .max(self.phase.omega_b_tilde + 2.0 * self.phase.d_term)
            .max(2.0 * self.phase.g_tilde)
    }
}

/// Coefficients of the normal-phase quartic, highest power first.
pub fn zeta_np_quartic_coeffs(params: &ModelParams, signature: ZetaSignature) -> Result<[Complex64; 5]> {
    if !params.is_ohmic() {
        return Err(DickeError::NotOhmic);
    }
    let wa2 = params.omega_a().powi(2);
    let wb2 = params.omega_b().powi(2);
    let ga = params.bath_a().gamma0() * signature.sign_a.value();
    let gb = params.bath_b().gamma0() * signature.sign_b.value();
    Ok([
        c(1.0),
        I * (ga + gb),
        c(-(wa2 + wb2 + ga * gb)),
        -I * (wa2 * gb + wb2 * ga),
        c(params.normal_constant_term()),
    ])
}

/// Quartic coefficients of an ohmic `zeta`, recovered from five samples on
/// Chebyshev nodes. Works in either phase.
pub fn zeta_quartic_coeffs_sampled(system: &BogoliubovSystem, signature: ZetaSignature) -> Result<[Complex64; 5]> {
    if !system.params().is_ohmic() {
        return Err(DickeError::NotOhmic);
    }
    let r = system.scale();
    let nodes: [f64; 5] = std::array::from_fn(|k| r * ((2 * k + 1) as f64 * std::f64::consts::PI / 10.0).cos());
    let vander = Matrix5::from_fn(|k, j| c(nodes[k].powi(4 - j as i32)));
    let mut rhs = Vector5::zeros();
    for (k, x) in nodes.iter().enumerate() {
        rhs[k] = system.zeta(c(*x), signature)?;
    }
    let sol = vander.lu().solve(&rhs).ok_or_else(|| DickeError::NonConvergence {
        context: "Vandermonde solve".into(),
        last_iterate: c(r),
        residual: f64::INFINITY,
    })?;
    Ok(std::array::from_fn(|k| sol[k]))
}

/// Horner evaluation, highest power first.
pub fn poly_eval(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, &k| acc * x + k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::BathSpec;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn decoupled_a_is_diagonal() {
        let p = ModelParams::lossless(1.3, 0.7, 0.0).unwrap();
        let a = BogoliubovSystem::new(&p).a_matrix().clone();
        assert_eq!(a, Mat4::from_diagonal(&nalgebra::Vector4::new(1.3, -1.3, 0.7, -0.7).map(c)));
    }

    #[test]
    fn normal_first_row() {
        let p = ModelParams::lossless(1.0, 1.0, 0.3).unwrap();
        let a = BogoliubovSystem::new(&p).a_matrix().clone();
        let row: Vec<f64> = (0..4).map(|j| a[(0, j)].re).collect();
        assert_eq!(row, vec![1.0, 0.0, 0.3, 0.3]);
    }

    #[test]
    fn superradiant_matrix_at_critical_matches_normal() {
        let p = ModelParams::lossless(1.2, 0.8, 0.0).unwrap();
        let gc = p.critical_coupling();
        let p = p.with_g(gc).unwrap();
        let mut pd = derive_phase(&p);
        let normal = build_a_matrix(&pd, &p);
        pd.phase = Phase::Superradiant;
        let sp = build_a_matrix(&pd, &p);
        assert!((normal - sp).norm() < 1e-14);
    }

    #[test]
    fn port_blocks() {
        let p = ModelParams::ohmic(1.0, 1.0, 0.3, 0.1, 0.2).unwrap();
        let s = BogoliubovSystem::new(&p);
        let g = s.gamma(c(0.4), ZetaSignature::RETARDED).unwrap();
        assert_eq!(g[(0, 0)], c(0.1));
        assert_eq!(g[(0, 1)], c(-0.1));
        assert_eq!(g[(1, 0)], c(-0.1));
        assert_eq!(g[(1, 1)], c(0.1));
        let r = s.gamma(c(0.4), ZetaSignature::REVERSED_A).unwrap();
        assert_eq!(r.fixed_view::<2, 2>(0, 0), -g.fixed_view::<2, 2>(0, 0));
        assert_eq!(r.fixed_view::<2, 2>(2, 2), g.fixed_view::<2, 2>(2, 2));
    }

    #[test]
    fn superradiant_port_b_rescaled() {
        // lambda = 3
        let p = ModelParams::ohmic(1.0, 1.0, 0.75f64.sqrt(), 0.1, 0.2).unwrap();
        let pd = derive_phase(&p);
        let g = build_gamma(&pd, &p, c(0.5), ZetaSignature::RETARDED).unwrap();
        assert!((g[(2, 2)].re - 0.05).abs() < 1e-15);
    }

    #[test]
    fn constant_term_plug_in() {
        let p = ModelParams::ohmic(1.0, 1.0, 0.3, 0.1, 0.2).unwrap();
        let s = BogoliubovSystem::new(&p);
        assert!(close(s.zeta(c(0.0), ZetaSignature::RETARDED).unwrap(), c(0.64), 1e-14));
        let crit = ModelParams::ohmic(1.0, 1.0, 0.5, 0.1, 0.2).unwrap();
        let z = BogoliubovSystem::new(&crit).zeta(c(0.0), ZetaSignature::RETARDED).unwrap();
        assert!(z.norm() < 1e-15);
    }

    #[test]
    fn lossless_decoupled_factorizes() {
        let p = ModelParams::lossless(1.0, 1.0, 0.0).unwrap();
        let z = BogoliubovSystem::new(&p).zeta(c(0.5), ZetaSignature::RETARDED).unwrap();
        assert!(close(z, c(0.5625), 1e-15));
    }

    #[test]
    fn quartic_plug_in() {
        let p = ModelParams::ohmic(1.0, 1.0, 0.5, 0.3, 0.2).unwrap();
        let k = zeta_np_quartic_coeffs(&p, ZetaSignature::RETARDED).unwrap();
        let expected = [c(1.0), I * 0.5, c(-2.06), -I * 0.5, c(0.0)];
        for (a, b) in k.iter().zip(expected) {
            assert!(close(*a, b, 1e-15));
        }
    }

    #[test]
    fn lossless_quartic_is_real_biquadratic() {
        let p = ModelParams::lossless(1.1, 0.9, 0.2).unwrap();
        let k = zeta_np_quartic_coeffs(&p, ZetaSignature::RETARDED).unwrap();
        assert_eq!(k[1], c(0.0));
        assert_eq!(k[3], c(0.0));
        assert_eq!(k[2], c(-(1.1f64.powi(2) + 0.9f64.powi(2))));
        assert!(k.iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn quartic_rejects_non_ohmic() {
        let p = ModelParams::new(1.0, 1.0, 0.2, BathSpec::new(0.1, 0.5).unwrap(), BathSpec::lossless()).unwrap();
        assert_eq!(zeta_np_quartic_coeffs(&p, ZetaSignature::RETARDED), Err(DickeError::NotOhmic));
    }

    #[test]
    fn sampled_coefficients_match_explicit_ones() {
        let p = ModelParams::ohmic(1.2, 0.9, 0.3, 0.15, 0.25).unwrap();
        let s = BogoliubovSystem::new(&p);
        for sig in [ZetaSignature::RETARDED, ZetaSignature::REVERSED_A] {
            let a = zeta_np_quartic_coeffs(&p, sig).unwrap();
            let b = zeta_quartic_coeffs_sampled(&s, sig).unwrap();
            for (x, y) in a.iter().zip(b.iter()) {
                assert!(close(*x, *y, 1e-12), "{x} vs {y}");
            }
        }
    }

    #[test]
    fn det4_matches_lu() {
        let m = Mat4::from_fn(|i, j| Complex64::new((i * 3 + j) as f64 * 0.37 - 1.0, ((i + 2 * j) % 5) as f64 * 0.21));
        let reference = m.lu().determinant();
        assert!(close(det4(&m), reference, 1e-12));
    }
}
