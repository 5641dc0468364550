//! Entanglement quantities of `ρ_λ`: pure-state entanglement, the PPT-assisted
//! distillable entanglement `E_D⁺ = log₂d − S(λ)`, the pure-preimage function
//! `ε(λ)`, its convex envelope along the one-parameter slice `λ(ν)`, and the
//! undistillable-entanglement gap `co ε − E_D⁺`.
//!
//! `ε(λ)` is the minimum of `S(|ĉ|²)` over `c_l = √λ_l e^{iθ_l}`, which is the
//! entanglement of `Σ_l c_l Ψ_l`. The optimizer's best value is an upper bound
//! on the infimum; `E_D⁺` is an analytic lower bound, so agreement of the two
//! certifies equality.

mod envelope;
mod optimizer;

use std::cmp::Ordering;
use std::f64::consts::TAU;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

pub use envelope::convex_envelope_1d;
pub use optimizer::{
    multistart_minimize, nelder_mead, start_point, LocalResult, MultiStartResult, OptimizerConfig,
};

use crate::error::{Error, Result};
use crate::prob::ProbVector;
use crate::qcore::{herm_eigvals, shannon_bits, CMatrix, CVector, Complex64};
use crate::symstates::{bell_basis, full_bell_basis, BasisConvention};
use crate::uncertainty::Dft;

/// Normalization tolerance for pure-state inputs.
pub const PURE_NORM_TOL: f64 = 1e-10;

/// `S(tr_A |φ⟩⟨φ|)` in bits.
pub fn pure_entanglement(phi: &CVector) -> Result<f64> {
    let (da, db) = phi
        .split()
        .ok_or_else(|| Error::Dimension("pure state carries no bipartite split".into()))?;
    if !phi.is_normalized(PURE_NORM_TOL) {
        return Err(Error::NotNormalized(phi.norm()));
    }
    let m = DMatrix::from_row_slice(da, db, phi.entries());
    let reduced = CMatrix::new(&m * m.adjoint())?;
    Ok(shannon_bits(&herm_eigvals(&reduced)?))
}

/// `log₂d − S(λ)`, evaluated as `Σ_l λ_l log₂(d λ_l)` to avoid cancellation near uniform `λ`.
pub fn ed_plus(lambda: &ProbVector) -> f64 {
    let d = lambda.dim() as f64;
    lambda
        .values()
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * (d * x).log2())
        .sum::<f64>()
        .max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureResult {
    /// Bits.
    pub value: f64,
    /// `θ_0 = 0`, the rest reduced to `[0, 2π)`.
    pub optimizer_phases: Vec<f64>,
    pub restarts_used: usize,
    pub converged: bool,
}

/// `S(|dft(c)|²)` for `c_l = √λ_l e^{iθ_l}`, `θ_0 = 0`.
#[derive(Debug, Clone)]
pub struct PhaseObjective {
    amplitudes: Vec<f64>,
    dft: Dft,
}

impl PhaseObjective {
    pub fn new(lambda: &ProbVector) -> Self {
        Self {
            amplitudes: lambda.values().iter().map(|x| x.sqrt()).collect(),
            dft: Dft::new(lambda.dim()),
        }
    }

    /// `phases` holds `θ_1 … θ_{d−1}`.
    pub fn eval(&self, phases: &[f64]) -> f64 {
        let d = self.amplitudes.len();
        debug_assert_eq!(phases.len() + 1, d);
        let mut c = Vec::with_capacity(d);
        c.push(Complex64::new(self.amplitudes[0], 0.0));
        c.extend(
            self.amplitudes[1..]
                .iter()
                .zip(phases)
                .map(|(&a, &t)| Complex64::from_polar(a, t)),
        );
        let mut chat = vec![Complex64::new(0.0, 0.0); d];
        self.dft.transform_into(&c, &mut chat);
        let p: Vec<f64> = chat.iter().map(|z| z.norm_sqr()).collect();
        shannon_bits(&p)
    }
}

/// Minimizes `S(|ĉ|²)` over the phases of `c_l = √λ_l e^{iθ_l}`.
///
/// Deterministic for a fixed `cfg.seed`; restart 0 starts from all-zero phases.
pub fn epsilon_min(lambda: &ProbVector, cfg: &OptimizerConfig) -> Result<MeasureResult> {
    cfg.validate()?;
    let d = lambda.dim();
    let objective = PhaseObjective::new(lambda);
    if lambda.support_size(0.0) <= 1 {
        // a single amplitude: every phase choice is a global phase
        return Ok(MeasureResult {
            value: objective.eval(&vec![0.0; d - 1]),
            optimizer_phases: vec![0.0; d],
            restarts_used: 0,
            converged: true,
        });
    }
    let res = multistart_minimize(|x| objective.eval(x), d - 1, cfg)?;
    let mut phases = Vec::with_capacity(d);
    phases.push(0.0);
    phases.extend(res.x.iter().map(|t| t.rem_euclid(TAU)));
    Ok(MeasureResult {
        value: res.value,
        optimizer_phases: phases,
        restarts_used: res.restarts_used,
        converged: res.converged,
    })
}

/// Largest dimension accepted by [`epsilon_bruteforce`].
pub const BRUTEFORCE_MAX_DIM: usize = 5;

/// Exhaustive minimum of `S(|ĉ|²)` over the phase grid `{2πk/K}^{d−1}`.
///
/// Evaluates the transform directly from `cos`/`sin` so it shares no code
/// with [`epsilon_min`].
pub fn epsilon_bruteforce(lambda: &ProbVector, grid: usize) -> Result<f64> {
    let d = lambda.dim();
    if d > BRUTEFORCE_MAX_DIM {
        return Err(Error::OutOfRange(format!(
            "phase grid search limited to d <= {BRUTEFORCE_MAX_DIM}, got {d}"
        )));
    }
    if grid == 0 {
        return Err(Error::OutOfRange("grid size must be positive".into()));
    }
    let amps: Vec<f64> = lambda.values().iter().map(|x| x.sqrt()).collect();
    let free = d - 1;
    let total = grid.pow(free as u32);
    let eval = |mut code: usize| {
        let mut theta = vec![0.0; d];
        for t in theta.iter_mut().skip(1) {
            *t = TAU * (code % grid) as f64 / grid as f64;
            code /= grid;
        }
        let mut entropy = 0.0;
        for k in 0..d {
            let (mut re, mut im) = (0.0, 0.0);
            for l in 0..d {
                let angle = theta[l] + TAU * (k * l) as f64 / d as f64;
                re += amps[l] * angle.cos();
                im += amps[l] * angle.sin();
            }
            let p = (re * re + im * im) / d as f64;
            if p > 0.0 {
                entropy -= p * p.log2();
            }
        }
        entropy
    };
    Ok((0..total)
        .into_par_iter()
        .map(eval)
        .reduce(|| f64::INFINITY, f64::min))
}

/// One sample of the undistillable-entanglement curve along `λ(ν)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapPoint {
    pub nu: f64,
    /// `ν + (1−ν)/d`, the fidelity of the isotropic partner state.
    pub f: f64,
    pub ed_plus: f64,
    pub epsilon: f64,
    pub co_epsilon: f64,
    /// `co_epsilon − ed_plus`.
    pub gap: f64,
    /// `gap / co_epsilon`, zero when `co_epsilon ≤ RELATIVE_FLOOR`.
    pub relative_gap: f64,
}

/// `co ε` at or below this is roundoff around zero; the ratio is not formed.
pub const RELATIVE_FLOOR: f64 = 1e-12;

/// Validates a `ν` grid: non-empty, inside `[0, 1]`, strictly increasing.
pub fn validate_nu_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("empty grid".into()));
    }
    if let Some(x) = grid.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::InvalidGrid(format!("nu = {x} outside [0, 1]")));
    }
    if grid
        .windows(2)
        .any(|w| w[1].partial_cmp(&w[0]) != Some(Ordering::Greater))
    {
        return Err(Error::InvalidGrid(
            "nu values must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// `E_D⁺`, `ε` and `co ε` (convexified along the grid) for every `ν` in `grid`.
pub fn gap_sweep(d: usize, grid: &[f64], cfg: &OptimizerConfig) -> Result<Vec<GapPoint>> {
    if d == 0 {
        return Err(Error::Dimension("d must be positive".into()));
    }
    validate_nu_grid(grid)?;
    cfg.validate()?;
    let samples: Vec<(f64, f64, f64)> = grid
        .par_iter()
        .map(|&nu| {
            let lambda = ProbVector::isotropic_slice(d, nu)?;
            let eps = epsilon_min(&lambda, cfg)?;
            Ok((nu, ed_plus(&lambda), eps.value))
        })
        .collect::<Result<_>>()?;

    let co: Vec<f64> = if samples.len() >= 2 {
        let pts: Vec<_> = samples.iter().map(|&(nu, _, e)| (nu, e)).collect();
        convex_envelope_1d(&pts)?.into_iter().map(|p| p.1).collect()
    } else {
        samples.iter().map(|s| s.2).collect()
    };

    Ok(samples
        .iter()
        .zip(co)
        .map(|(&(nu, edp, eps), co_eps)| {
            let gap = co_eps - edp;
            GapPoint {
                nu,
                f: nu + (1.0 - nu) / d as f64,
                ed_plus: edp,
                epsilon: eps,
                co_epsilon: co_eps,
                gap,
                relative_gap: if co_eps > RELATIVE_FLOOR {
                    gap / co_eps
                } else {
                    0.0
                },
            }
        })
        .collect())
}

/// `n` equally spaced `ν` values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// `φ_ν ∝ √ν Ψ₀ + √(1−ν) |00⟩` and its twirl image.
///
/// `⟨Ψ₀|00⟩ = d^{-1/2}`, so the raw superposition is not normalized and its
/// twirl image `λ′` differs from the slice spectrum `λ(ν)`. Both are kept.
#[derive(Debug, Clone, Serialize)]
pub struct PhiNu {
    pub nu: f64,
    pub d: usize,
    #[serde(skip)]
    pub state: CVector,
    /// `‖√ν Ψ₀ + √(1−ν)|00⟩‖` before normalization.
    pub raw_norm: f64,
    /// Diagonal of `𝒯(|φ_ν⟩⟨φ_ν|)` on `Ψ_{0l}`.
    pub lambda_twirl: Vec<f64>,
    /// Weight of the twirl image outside `span{Ψ_{0l}}`.
    pub off_family_weight: f64,
    /// `λ(ν)`.
    pub lambda_family: Vec<f64>,
    /// `max_l |λ′_l − λ_l(ν)|`.
    pub lambda_discrepancy: f64,
    /// `E(φ_ν)` in bits.
    pub entanglement: f64,
}

pub fn phi_nu(nu: f64, d: usize) -> Result<PhiNu> {
    if !(0.0..=1.0).contains(&nu) {
        return Err(Error::OutOfRange(format!("nu = {nu} not in [0, 1]")));
    }
    let basis = bell_basis(BasisConvention::Column, d);
    let mut raw: Vec<Complex64> = basis[0].entries().iter().map(|z| z * nu.sqrt()).collect();
    raw[0] += Complex64::new((1.0 - nu).sqrt(), 0.0);
    let raw = CVector::new(raw).with_split(d, d)?;
    let raw_norm = raw.norm();
    let state = raw.normalized();

    let lambda_twirl: Vec<f64> = basis
        .iter()
        .map(|psi| psi.inner(&state).norm_sqr())
        .collect();
    let total: f64 = full_bell_basis(d)
        .iter()
        .map(|psi| psi.inner(&state).norm_sqr())
        .sum();
    let off_family_weight = (total - lambda_twirl.iter().sum::<f64>()).max(0.0);
    let lambda_family = ProbVector::isotropic_slice(d, nu)?.values().to_vec();
    let lambda_discrepancy = lambda_twirl
        .iter()
        .zip(&lambda_family)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let entanglement = pure_entanglement(&state)?;
    Ok(PhiNu {
        nu,
        d,
        state,
        raw_norm,
        lambda_twirl,
        off_family_weight,
        lambda_family,
        lambda_discrepancy,
        entanglement,
    })
}

/// Quantities of the sandwich `ε(σ(f)) ≥ E_f(ρ_λ(ν)) ≥ E_f(σ(f))` that are
/// computable here, for one `ν`.
#[derive(Debug, Clone, Serialize)]
pub struct IsotropicBoundReport {
    pub phi: PhiNu,
    /// `ε(λ′)` for the actual twirl image of `φ_ν`.
    pub epsilon_twirl_image: f64,
    /// `ε(λ(ν))`.
    pub epsilon_family: f64,
    /// `E_D⁺(λ(ν))`.
    pub ed_plus_family: f64,
}

impl IsotropicBoundReport {
    /// `ε(λ′) ≤ E(φ_ν)`: `φ_ν` is one preimage of its own twirl image.
    pub fn preimage_bound_holds(&self, tol: f64) -> bool {
        self.epsilon_twirl_image <= self.phi.entanglement + tol
    }

    /// `ε(λ(ν)) ≤ E(φ_ν)`.
    pub fn family_bound_holds(&self, tol: f64) -> bool {
        self.epsilon_family <= self.phi.entanglement + tol
    }
}

pub fn isotropic_bound_report(
    nu: f64,
    d: usize,
    cfg: &OptimizerConfig,
) -> Result<IsotropicBoundReport> {
    let phi = phi_nu(nu, d)?;
    let twirl_lambda = ProbVector::new(phi.lambda_twirl.clone())?;
    let family = ProbVector::isotropic_slice(d, nu)?;
    Ok(IsotropicBoundReport {
        epsilon_twirl_image: epsilon_min(&twirl_lambda, cfg)?.value,
        epsilon_family: epsilon_min(&family, cfg)?.value,
        ed_plus_family: ed_plus(&family),
        phi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symstates::{bell_state, rho_lambda, twirl_g, WeylIndex};
    use crate::uncertainty::dft;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn h2(p: f64) -> f64 {
        shannon_bits(&[p, 1.0 - p])
    }

    fn fast_cfg() -> OptimizerConfig {
        OptimizerConfig {
            restarts: 8,
            ..Default::default()
        }
    }

    #[test]
    fn pure_entanglement_examples() {
        let e = pure_entanglement(&bell_state(WeylIndex::new(0, 0, 3))).unwrap();
        assert!((e - 3f64.log2()).abs() < 1e-12);
        assert!((e - 1.584_962_500_721_156).abs() < 1e-12);
        let zz = CVector::basis(9, 0).with_split(3, 3).unwrap();
        assert!(pure_entanglement(&zz).unwrap().abs() < 1e-12);

        assert!(matches!(
            pure_entanglement(&CVector::basis(4, 0)),
            Err(Error::Dimension(_))
        ));
        let unnormalized = CVector::from_real(&[1.0, 0.0, 0.0, 1.0])
            .with_split(2, 2)
            .unwrap();
        assert!(matches!(
            pure_entanglement(&unnormalized),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn pure_entanglement_of_product_with_asymmetric_split() {
        let a = CVector::random_unit(2, &mut ChaCha8Rng::seed_from_u64(1));
        let b = CVector::random_unit(3, &mut ChaCha8Rng::seed_from_u64(2));
        assert!(pure_entanglement(&a.kron(&b)).unwrap().abs() < 1e-10);
    }

    #[test]
    fn ed_plus_examples() {
        assert_eq!(ed_plus(&ProbVector::uniform(5)), 0.0);
        assert!((ed_plus(&ProbVector::point_mass(5, 2)) - 5f64.log2()).abs() < 1e-15);
        let l = ProbVector::new(vec![0.75, 0.25]).unwrap();
        assert!((ed_plus(&l) - (1.0 - h2(0.25))).abs() < 1e-15);
        assert!((ed_plus(&l) - 0.188_721_875_540_867).abs() < 1e-12);
    }

    #[test]
    fn epsilon_examples() {
        let cfg = fast_cfg();
        let r = epsilon_min(&ProbVector::point_mass(4, 1), &cfg).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);

        let l = ProbVector::new(vec![0.5, 0.0, 0.5, 0.0]).unwrap();
        let r = epsilon_min(&l, &cfg).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);
        assert!((r.value - ed_plus(&l)).abs() < 1e-9);

        let l = ProbVector::new(vec![0.75, 0.25]).unwrap();
        let r = epsilon_min(&l, &cfg).unwrap();
        let grid = epsilon_bruteforce(&l, 720).unwrap();
        assert!((r.value - grid).abs() < 1e-4);
        // closed form: |ĉ_0|² = (1 + (√3/2) cos θ)/2, minimized at θ ∈ {0, π}
        assert!((r.value - h2(0.5 * (1.0 + 3f64.sqrt() / 2.0))).abs() < 1e-9);
        assert_eq!(r.optimizer_phases.len(), 2);
        assert_eq!(r.optimizer_phases[0], 0.0);
    }

    #[test]
    fn bruteforce_examples() {
        let l = ProbVector::new(vec![0.6, 0.3, 0.1]).unwrap();
        let zero_phase = PhaseObjective::new(&l).eval(&[0.0, 0.0]);
        assert!((epsilon_bruteforce(&l, 1).unwrap() - zero_phase).abs() < 1e-12);
        assert!(
            epsilon_bruteforce(&ProbVector::uniform(2), 720)
                .unwrap()
                .abs()
                < 1e-12
        );
        assert!(
            epsilon_bruteforce(&ProbVector::uniform(3), 360)
                .unwrap()
                .abs()
                < 1e-12
        );
        assert!(epsilon_bruteforce(&ProbVector::uniform(6), 2).is_err());
        assert!(epsilon_bruteforce(&ProbVector::uniform(2), 0).is_err());
    }

    #[test]
    fn epsilon_is_reproducible() {
        let l = ProbVector::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let cfg = OptimizerConfig {
            seed: 42,
            ..fast_cfg()
        };
        let a = epsilon_min(&l, &cfg).unwrap();
        let b = epsilon_min(&l, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn identity_entanglement_equals_fourier_entropy() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for d in 2..=8 {
            for conv in [BasisConvention::Column, BasisConvention::Row] {
                let basis = bell_basis(conv, d);
                for _ in 0..10 {
                    let c = CVector::random_unit(d, &mut rng);
                    let mut phi = vec![Complex64::new(0.0, 0.0); d * d];
                    for (cl, psi) in c.entries().iter().zip(&basis) {
                        for (slot, z) in phi.iter_mut().zip(psi.entries()) {
                            *slot += cl * z;
                        }
                    }
                    let phi = CVector::new(phi).with_split(d, d).unwrap();
                    let e = pure_entanglement(&phi).unwrap();
                    let s = shannon_bits(&dft(&c).moduli_sq());
                    assert!((e - s).abs() < 1e-9, "d={d} {conv:?}");
                }
            }
        }
    }

    #[test]
    fn chain_lower_bound_on_random_lambda() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for d in 2..=4 {
            for _ in 0..10 {
                let raw: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
                let s: f64 = raw.iter().sum();
                let l = ProbVector::new(raw.iter().map(|x| x / s).collect()).unwrap();
                let e = epsilon_min(&l, &fast_cfg()).unwrap();
                assert!(ed_plus(&l) <= e.value + 1e-6);
                assert!(e.value <= (d as f64).log2() + 1e-9);
            }
        }
    }

    #[test]
    fn sweep_endpoints_and_validation() {
        let grid = linspace(0.0, 1.0, 11);
        let pts = gap_sweep(3, &grid, &fast_cfg()).unwrap();
        let first = &pts[0];
        assert!(first.ed_plus.abs() < 1e-12 && first.epsilon.abs() < 1e-12);
        let last = pts.last().unwrap();
        assert!((last.ed_plus - 3f64.log2()).abs() < 1e-12);
        assert!((last.epsilon - 3f64.log2()).abs() < 1e-12);
        assert!(last.gap.abs() < 1e-12);
        for p in &pts {
            assert!(p.gap >= -1e-6);
            assert!((0.0..=1.0 + 1e-6).contains(&p.relative_gap));
            assert!(p.co_epsilon <= p.epsilon + 1e-15);
        }
        assert!(gap_sweep(3, &[0.5, 0.2], &fast_cfg()).is_err());
        assert!(gap_sweep(3, &[0.5, 1.2], &fast_cfg()).is_err());
        assert!(gap_sweep(3, &[], &fast_cfg()).is_err());
    }

    #[test]
    fn envelope_of_two_qubit_slice_matches_grid_oracle() {
        // For d = 2 the slice is λ = ((1+ν)/2, (1−ν)/2); ε via the optimizer and via
        // the phase grid must give the same envelope.
        let grid = linspace(0.0, 1.0, 41);
        let pts = gap_sweep(2, &grid, &fast_cfg()).unwrap();
        let oracle: Vec<(f64, f64)> = grid
            .iter()
            .map(|&nu| {
                (
                    nu,
                    epsilon_bruteforce(&ProbVector::isotropic_slice(2, nu).unwrap(), 720).unwrap(),
                )
            })
            .collect();
        let oracle_env = convex_envelope_1d(&oracle).unwrap();
        for (p, o) in pts.iter().zip(&oracle_env) {
            assert!((p.co_epsilon - o.1).abs() < 1e-4, "nu={}", p.nu);
        }
    }

    #[test]
    fn phi_nu_examples() {
        let p = phi_nu(1.0, 3).unwrap();
        assert!((p.entanglement - 3f64.log2()).abs() < 1e-12);
        let p = phi_nu(0.0, 3).unwrap();
        assert!(p.entanglement.abs() < 1e-12);
        assert!(phi_nu(1.5, 2).is_err());

        let p = phi_nu(0.5, 2).unwrap();
        // √ν Ψ₀ + √(1−ν)|00⟩ has squared norm 1 + 2√(ν(1−ν)/d)
        assert!((p.raw_norm.powi(2) - (1.0 + 2.0 * (0.25f64 / 2.0).sqrt())).abs() < 1e-12);
        assert!(p.off_family_weight < 1e-12);
        assert!(p.lambda_discrepancy > 1e-3);

        // λ′ agrees with the diagonal of the explicit twirl
        let t = twirl_g(&p.state.projector()).unwrap();
        let diag = t.diagonal_in(&bell_basis(BasisConvention::Column, 2));
        for (a, b) in diag.iter().zip(&p.lambda_twirl) {
            assert!((a - b).abs() < 1e-12);
        }
        let rho = rho_lambda(
            &ProbVector::new(p.lambda_twirl.clone()).unwrap(),
            BasisConvention::Column,
        );
        assert!(t.max_abs_diff(&rho) < 1e-12);

        let rep = isotropic_bound_report(0.5, 2, &fast_cfg()).unwrap();
        assert!(rep.preimage_bound_holds(1e-6));
    }
}
