//! Closed and open excitation spectra, branch labelling and the critical
//! coupling.
//!
//! Open-system roots are zeros of `zeta`. For ohmic baths `zeta` is the
//! characteristic polynomial of `A - i Gamma/2`, so the roots are plain
//! eigenvalues. For power-law baths the rates are evaluated at `|omega|`,
//! which turns every root into an eigenvalue of `A - i Gamma(r)/2` whose
//! modulus equals `r`. Those fixed points are found by scanning `r`.

use nalgebra::linalg::Schur;
use num_complex::Complex64;

use crate::error::{DickeError, Result};
use crate::exec::{try_map_ordered, Execution};
use crate::matrices::{poly_eval, zeta_np_quartic_coeffs, zeta_quartic_coeffs_sampled, BogoliubovSystem, Mat4, ZetaSignature};
use crate::model::{derive_phase, BathSpec, ModelParams, Phase, SweepAxis};

/// Roots with `|Re| / scale` below this sit on the imaginary axis.
pub const AXIS_TOLERANCE: f64 = 1e-9;
/// `|zeta(0)| / scale^4` below this pins a root to zero.
pub const ZERO_ROOT_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// The four open-system roots with the physical branches picked out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSet {
    roots: [Complex64; 4],
    lower: Complex64,
    upper: Complex64,
    gap_partner: Option<Complex64>,
}

impl EigenSet {
    pub fn from_roots(roots: [Complex64; 4], scale: f64) -> Self {
        let tol = AXIS_TOLERANCE * scale;
        let mut roots = roots.map(|z| if z.re.abs() < tol { Complex64::new(0.0, z.im) } else { z });
        roots.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));

        let mut right: Vec<Complex64> = roots.iter().copied().filter(|z| z.re > 0.0).collect();
        right.sort_by(|a, b| a.re.total_cmp(&b.re));
        let mut axis: Vec<Complex64> = roots.iter().copied().filter(|z| z.re == 0.0).collect();
        axis.sort_by(|a, b| a.im.abs().total_cmp(&b.im.abs()));

        let split = |a: &Complex64, b: &Complex64| ((a.im - b.im).abs() > tol).then_some(*b);
        let (lower, upper, gap_partner) = match (right.len(), axis.len()) {
            (2, _) => (right[0], right[1], None),
            (1, 2) => (axis[0], right[0], split(&axis[0], &axis[1])),
            (0, 4) => (axis[0], axis[3], split(&axis[0], &axis[1])),
            // Unpaired layouts only arise from numerical noise; fall back
            // to ordering by real part.
            _ => (roots[1], roots[0], None),
        };
        EigenSet {
            roots,
            lower,
            upper,
            gap_partner,
        }
    }

    /// All four roots, ordered by decreasing real part.
    pub fn roots(&self) -> &[Complex64; 4] {
        &self.roots
    }

    /// Lower polariton. In the gap region this is the purely imaginary root
    /// closest to zero.
    pub fn lower(&self) -> Complex64 {
        self.lower
    }

    pub fn upper(&self) -> Complex64 {
        self.upper
    }

    /// True when the lower pair is purely imaginary and split.
    pub fn is_gap(&self) -> bool {
        self.gap_partner.is_some()
    }

    pub fn gap_partner(&self) -> Option<Complex64> {
        self.gap_partner
    }

    pub fn max_imag(&self) -> f64 {
        self.roots.iter().map(|z| z.im).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Closed-system excitation energies `(lower, upper)`.
pub fn closed_eigenfrequencies(params: &ModelParams) -> (f64, f64) {
    let wa2 = params.omega_a().powi(2);
    let wb2 = params.omega_b().powi(2);
    let lambda = params.lambda();
    // Omega^4 - sum Omega^2 + product = 0 in both phases.
    let (sum, diff2, product) = match Phase::classify(lambda) {
        Phase::Normal => {
            let cross = 16.0 * params.g().powi(2) * params.omega_a() * params.omega_b();
            ((wa2 + wb2), (wa2 - wb2).powi(2) + cross, params.normal_constant_term())
        }
        Phase::Critical => return (0.0, (wa2 + wb2).sqrt()),
        Phase::Superradiant => {
            let wbl2 = wb2 * lambda * lambda;
            (wa2 + wbl2, (wbl2 - wa2).powi(2) + 4.0 * wa2 * wb2, wa2 * wb2 * (lambda * lambda - 1.0))
        }
    };
    let upper2 = 0.5 * (sum + diff2.sqrt());
    let lower2 = (product / upper2).max(0.0);
    (lower2.sqrt(), upper2.sqrt())
}

fn eigenvalues4(m: Mat4, context: &str) -> Result<[Complex64; 4]> {
    Schur::try_new(m, f64::EPSILON, 10_000)
        .and_then(|s| s.eigenvalues())
        .map(|v| [v[0], v[1], v[2], v[3]])
        .ok_or_else(|| DickeError::NonConvergence {
            context: format!("{context}: Schur iteration"),
            last_iterate: ZERO,
            residual: f64::INFINITY,
        })
}

/// A few Newton steps on a polynomial, kept only while they reduce the
/// residual.
fn polish_on_poly(coeffs: &[Complex64; 5], z: Complex64) -> Complex64 {
    let deriv: [Complex64; 4] = std::array::from_fn(|k| coeffs[k] * (4 - k) as f64);
    let mut z = z;
    let mut res = poly_eval(coeffs, z).norm();
    for _ in 0..4 {
        let d = poly_eval(&deriv, z);
        if d.norm() == 0.0 {
            break;
        }
        let next = z - poly_eval(coeffs, z) / d;
        let next_res = poly_eval(coeffs, next).norm();
        if !(next_res < res) {
            break;
        }
        z = next;
        res = next_res;
    }
    z
}

fn ohmic_coefficients(system: &BogoliubovSystem) -> Result<[Complex64; 5]> {
    match system.phase_data().phase {
        Phase::Normal | Phase::Critical => zeta_np_quartic_coeffs(system.params(), ZetaSignature::RETARDED),
        Phase::Superradiant => zeta_quartic_coeffs_sampled(system, ZetaSignature::RETARDED),
    }
}

fn ohmic_dense_roots(system: &BogoliubovSystem) -> Result<[Complex64; 4]> {
    let (ra, rb) = system.port_rates(ZERO, Default::default())?;
    eigenvalues4(system.damped_matrix(ra, rb, ZetaSignature::RETARDED), "dense eigensolve")
}

/// Ohmic roots from the companion matrix of the quartic coefficients.
pub fn ohmic_roots_companion(params: &ModelParams) -> Result<[Complex64; 4]> {
    let system = BogoliubovSystem::new(params);
    let k = ohmic_coefficients(&system)?;
    let mut comp = Mat4::zeros();
    for j in 0..4 {
        comp[(0, j)] = -k[j + 1] / k[0];
    }
    for i in 1..4 {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    let roots = eigenvalues4(comp, "companion eigensolve")?;
    Ok(roots.map(|z| polish_on_poly(&k, z)))
}

/// Ohmic roots as eigenvalues of `A - i Gamma/2`.
pub fn ohmic_roots_dense(params: &ModelParams) -> Result<[Complex64; 4]> {
    if !params.is_ohmic() {
        return Err(DickeError::NotOhmic);
    }
    let system = BogoliubovSystem::new(params);
    let k = ohmic_coefficients(&system)?;
    Ok(ohmic_dense_roots(&system)?.map(|z| polish_on_poly(&k, z)))
}

pub fn open_eigenfrequencies_ohmic(params: &ModelParams) -> Result<EigenSet> {
    let roots = if params.is_lossless() {
        let (lo, hi) = closed_eigenfrequencies(params);
        [hi, lo, -lo, -hi].map(|x| Complex64::new(x, 0.0))
    } else {
        ohmic_roots_dense(params)?
    };
    let system = BogoliubovSystem::new(params);
    Ok(EigenSet::from_roots(roots, system.scale()))
}

pub fn open_eigenfrequencies_nonohmic(params: &ModelParams) -> Result<EigenSet> {
    if params.is_ohmic() {
        return open_eigenfrequencies_ohmic(params);
    }
    let system = BogoliubovSystem::new(params);
    let roots = self_consistent_roots(&system)?;
    let scale = system.scale();
    for z in roots {
        let res = system.zeta(z, ZetaSignature::RETARDED)?.norm();
        if !(res <= 1e-9 * residual_scale(&system, z)?) {
            return Err(DickeError::NonConvergence {
                context: "power-law root".into(),
                last_iterate: z,
                residual: res,
            });
        }
    }
    Ok(EigenSet::from_roots(roots, scale))
}

/// Size of `zeta` attainable in floating point near `z`: the larger of
/// `scale^4 + |z|^4` and the Hadamard bound of `M(z)`, which grows when a
/// sub-ohmic rate is large.
pub fn residual_scale(system: &BogoliubovSystem, z: Complex64) -> Result<f64> {
    let base = system.scale().powi(4) + z.norm_sqr().powi(2);
    if z.norm() == 0.0 {
        return Ok(base);
    }
    let m = system.m_matrix(z, ZetaSignature::RETARDED)?;
    let hadamard: f64 = m.row_iter().map(|row| row.norm()).product();
    Ok(base.max(hadamard))
}

/// Dispatches on the bath exponents.
pub fn open_eigenfrequencies(params: &ModelParams) -> Result<EigenSet> {
    if params.is_ohmic() {
        open_eigenfrequencies_ohmic(params)
    } else {
        open_eigenfrequencies_nonohmic(params)
    }
}

struct RadiusScan<'a> {
    system: &'a BogoliubovSystem,
    bath_a: BathSpec,
    bath_b: BathSpec,
    b_scale: f64,
}

impl<'a> RadiusScan<'a> {
    fn new(system: &'a BogoliubovSystem) -> Self {
        RadiusScan {
            system,
            bath_a: system.params().bath_a(),
            bath_b: system.params().bath_b(),
            b_scale: system.phase_data().gamma_b_scale,
        }
    }

    fn spectrum(&self, r: f64) -> Result<[Complex64; 4]> {
        let ra = Complex64::new(self.bath_a.rate(r), 0.0);
        let rb = Complex64::new(self.bath_b.rate(r) * self.b_scale, 0.0);
        eigenvalues4(self.system.damped_matrix(ra, rb, ZetaSignature::RETARDED), "radius scan")
    }

    fn moduli(&self, r: f64) -> Result<[f64; 4]> {
        let mut m = self.spectrum(r)?.map(|z| z.norm());
        m.sort_by(f64::total_cmp);
        Ok(m)
    }

    /// Bisection in `ln r` on `moduli(r)[j] - r`, positive at `lo`.
    fn bisect(&self, j: usize, mut lo: f64, mut hi: f64) -> Result<f64> {
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if !(mid > lo && mid < hi) || hi / lo - 1.0 < 1e-15 {
                break;
            }
            if self.moduli(mid)?[j] - mid > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((lo * hi).sqrt())
    }

    /// Radius beyond which every eigenvalue is inside the circle.
    fn outer_radius(&self, scale: f64) -> Result<f64> {
        let mut r = 4.0 * scale;
        for _ in 0..80 {
            let m = self.moduli(r)?[3];
            if m < r {
                return Ok(r);
            }
            r = 2.0 * r.max(m);
        }
        Err(DickeError::NonConvergence {
            context: "no outer radius for the damping law".into(),
            last_iterate: Complex64::new(r, 0.0),
            residual: f64::INFINITY,
        })
    }

    /// All fixed points `r = |omega|`, each with its roots.
    fn fixed_points(&self) -> Result<Vec<Complex64>> {
        let scale = self.system.scale();
        let c0 = self.system.constant_term().norm();
        let zero_root = c0 <= ZERO_ROOT_TOLERANCE * scale.powi(4);
        let r_hi = self.outer_radius(scale)?;
        // With a pinned zero root, fixed points below this radius are
        // indistinguishable from rounding noise of the zero eigenvalue.
        let r_lo = if zero_root {
            1e-5 * scale
        } else {
            1e-15 * scale * (c0 / scale.powi(4)).min(1.0)
        };

        let per_decade = 16.0;
        let n = ((r_hi / r_lo).log10() * per_decade).ceil().max(2.0) as usize;
        let grid: Vec<f64> = (0..=n)
            .map(|k| r_lo * (r_hi / r_lo).powf(k as f64 / n as f64))
            .collect();
        let values = grid.iter().map(|&r| self.moduli(r)).collect::<Result<Vec<_>>>()?;

        let mut crossings: Vec<(usize, f64)> = Vec::new();
        if !zero_root {
            let floor = 1e-200 * scale;
            for j in 0..4 {
                if values[0][j] - grid[0] <= 0.0 {
                    crossings.push((j, self.bisect(j, floor, grid[0])?));
                }
            }
        }
        for k in 0..n {
            for j in 0..4 {
                let h0 = values[k][j] - grid[k];
                let h1 = values[k + 1][j] - grid[k + 1];
                if h0 > 0.0 && h1 <= 0.0 {
                    crossings.push((j, self.bisect(j, grid[k], grid[k + 1])?));
                } else if h0 <= 0.0 && h1 > 0.0 {
                    // Re-entry; bisect with the sign convention flipped.
                    crossings.push((j, self.bisect_rising(j, grid[k], grid[k + 1])?));
                }
            }
        }

        crossings.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut roots = Vec::new();
        let mut i = 0;
        while i < crossings.len() {
            let r = crossings[i].1;
            let mut k = i + 1;
            while k < crossings.len() && (crossings[k].1 / r - 1.0).abs() < 1e-9 {
                k += 1;
            }
            let mut spec = self.spectrum(r)?.to_vec();
            spec.sort_by(|a, b| (a.norm() - r).abs().total_cmp(&(b.norm() - r).abs()));
            roots.extend(spec.into_iter().take(k - i));
            i = k;
        }
        if zero_root {
            while roots.len() < 4 {
                roots.push(ZERO);
            }
        }
        Ok(roots)
    }

    fn bisect_rising(&self, j: usize, mut lo: f64, mut hi: f64) -> Result<f64> {
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if !(mid > lo && mid < hi) || hi / lo - 1.0 < 1e-15 {
                break;
            }
            if self.moduli(mid)?[j] - mid > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok((lo * hi).sqrt())
    }
}

fn self_consistent_roots(system: &BogoliubovSystem) -> Result<[Complex64; 4]> {
    let found = RadiusScan::new(system).fixed_points()?;
    match found.len() {
        4 => Ok([found[0], found[1], found[2], found[3]]),
        n if n > 4 => continue_from_ohmic(system),
        _ => Err(DickeError::NonConvergence {
            context: format!("radius scan found {} of 4 roots", found.len()),
            last_iterate: found.last().copied().unwrap_or(ZERO),
            residual: f64::NAN,
        }),
    }
}

/// Selects, among more than four fixed points, the ones continuously
/// connected to the ohmic roots by scaling both exponents from zero.
fn continue_from_ohmic(system: &BogoliubovSystem) -> Result<[Complex64; 4]> {
    let params = system.params();
    let (ba, bb) = (params.bath_a(), params.bath_b());
    let at = |t: f64| -> Result<ModelParams> {
        Ok(params.with_baths(
            BathSpec::new(ba.gamma0(), ba.exponent() * t)?,
            BathSpec::new(bb.gamma0(), bb.exponent() * t)?,
        ))
    };
    let mut current = ohmic_roots_dense(&at(0.0)?)?;
    let steps = 40;
    for step in 1..=steps {
        let p = at(step as f64 / steps as f64)?;
        let sys = BogoliubovSystem::new(&p);
        let candidates = RadiusScan::new(&sys).fixed_points()?;
        if candidates.len() < 4 {
            return Err(DickeError::NonConvergence {
                context: "exponent continuation lost a root".into(),
                last_iterate: current[0],
                residual: f64::NAN,
            });
        }
        current = nearest_selection(&current, &candidates);
    }
    Ok(current)
}

/// Injective choice of one candidate per reference minimizing the total
/// distance. Exhaustive; `candidates` is small.
fn nearest_selection(reference: &[Complex64; 4], candidates: &[Complex64]) -> [Complex64; 4] {
    let n = candidates.len();
    let mut best = (f64::INFINITY, [0usize; 4]);
    let mut pick = [0usize; 4];
    fn rec(
        depth: usize,
        used: &mut Vec<bool>,
        pick: &mut [usize; 4],
        cost: f64,
        reference: &[Complex64; 4],
        candidates: &[Complex64],
        best: &mut (f64, [usize; 4]),
    ) {
        if cost >= best.0 {
            return;
        }
        if depth == 4 {
            *best = (cost, *pick);
            return;
        }
        for k in 0..candidates.len() {
            if !used[k] {
                used[k] = true;
                pick[depth] = k;
                let d = (candidates[k] - reference[depth]).norm();
                rec(depth + 1, used, pick, cost + d, reference, candidates, best);
                used[k] = false;
            }
        }
    }
    rec(0, &mut vec![false; n], &mut pick, 0.0, reference, candidates, &mut best);
    best.1.map(|k| candidates[k])
}

/// Critical coupling by bisection on the sign of the undamped constant
/// term. The baths never enter.
pub fn locate_critical(params: &ModelParams, g_lo: f64, g_hi: f64) -> Result<f64> {
    let f = |g: f64| crate::model::normal_constant_term(params.omega_a(), params.omega_b(), g);
    let (mut lo, mut hi) = (g_lo.min(g_hi), g_lo.max(g_hi));
    let (f_lo, f_hi) = (f(lo), f(hi));
    if !(lo >= 0.0) || !hi.is_finite() {
        return Err(DickeError::NoBracket { lo: g_lo, hi: g_hi });
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(DickeError::NoBracket { lo: g_lo, hi: g_hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if f(lo).abs() <= f(hi).abs() { lo } else { hi })
}

/// One grid point of an eigenvalue sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoint {
    pub value: f64,
    pub phase: Phase,
    /// Roots reordered so that column `k` follows one branch across the
    /// sweep.
    pub tracked: [Complex64; 4],
    pub eigen: EigenSet,
}

impl BranchPoint {
    pub fn lower(&self) -> Complex64 {
        self.eigen.lower()
    }

    pub fn upper(&self) -> Complex64 {
        self.eigen.upper()
    }

    pub fn is_gap(&self) -> bool {
        self.eigen.is_gap()
    }
}

/// Roots over a sorted grid. Points are independent and may run in
/// parallel; branch matching is a sequential pass afterwards.
pub fn sweep_eigenfrequencies(
    template: &ModelParams,
    axis: SweepAxis,
    grid: &[f64],
    exec: Execution,
) -> Result<Vec<BranchPoint>> {
    if grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(DickeError::invalid("grid", f64::NAN, "must be sorted ascending"));
    }
    let sets = try_map_ordered(grid, exec, |&v| {
        let p = axis.apply(template, v, false).map_err(|e| e.at(v))?;
        let set = open_eigenfrequencies(&p).map_err(|e| e.at(v))?;
        Ok::<_, DickeError>((derive_phase(&p).phase, set))
    })?;

    let mut out: Vec<BranchPoint> = Vec::with_capacity(grid.len());
    for (&value, (phase, eigen)) in grid.iter().zip(sets) {
        let tracked = match out.last() {
            None => *eigen.roots(),
            Some(prev) => match_to(&prev.tracked, eigen.roots()),
        };
        out.push(BranchPoint {
            value,
            phase,
            tracked,
            eigen,
        });
    }
    Ok(out)
}

/// Permutation of `next` closest to `prev` in total distance; ties between
/// purely imaginary roots are thereby resolved by continuity in `Im`.
fn match_to(prev: &[Complex64; 4], next: &[Complex64; 4]) -> [Complex64; 4] {
    nearest_selection(prev, next)
}
