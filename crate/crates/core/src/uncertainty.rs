//! Discrete Fourier transform, support and entropic uncertainty functionals,
//! and the complete family of minimal-uncertainty ("picket fence") vectors.

use std::collections::HashSet;
use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::{shannon_bits, CVector, Complex64};
use crate::symstates::eta_pow;

/// Default cutoff on `|c_l|` when counting supports.
pub const SUPPORT_TOL: f64 = 1e-9;
/// Default cutoff on the entropic deficit for minimality.
pub const DEFICIT_TOL: f64 = 1e-9;
/// Normalization tolerance for [`ur_report`] inputs.
pub const UNIT_TOL: f64 = 1e-10;

/// Precomputed unitary DFT `ĉ_k = d^{-1/2} Σ_l η^{kl} c_l`.
#[derive(Debug, Clone)]
pub struct Dft {
    d: usize,
    roots: Vec<Complex64>,
    scale: f64,
}

impl Dft {
    pub fn new(d: usize) -> Self {
        Self {
            d,
            roots: (0..d).map(|m| eta_pow(d, m as i64)).collect(),
            scale: 1.0 / (d as f64).sqrt(),
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn transform_into(&self, c: &[Complex64], out: &mut [Complex64]) {
        let d = self.d;
        debug_assert!(c.len() == d && out.len() == d);
        for (k, slot) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut idx = 0usize;
            for &cl in c {
                acc += self.roots[idx] * cl;
                idx += k;
                if idx >= d {
                    idx -= d;
                }
            }
            *slot = acc * self.scale;
        }
    }

    pub fn transform(&self, c: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.d];
        self.transform_into(c, &mut out);
        out
    }
}

pub fn dft(c: &CVector) -> CVector {
    CVector::new(Dft::new(c.dim()).transform(c.entries()))
}

/// Both uncertainty functionals of a unit vector and its transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UrReport {
    pub support_c: usize,
    pub support_chat: usize,
    pub entropy_c: f64,
    pub entropy_chat: f64,
    pub sum: f64,
    /// `sum − log₂ d`.
    pub deficit: f64,
}

impl UrReport {
    /// Whether the support product is at least `d`.
    pub fn support_holds(&self, d: usize) -> bool {
        self.support_c * self.support_chat >= d
    }

    /// Whether the entropic bound holds up to `tol`.
    pub fn entropic_holds(&self, tol: f64) -> bool {
        self.deficit >= -tol
    }
}

pub fn ur_report(c: &CVector, tol: f64) -> Result<UrReport> {
    if !c.is_normalized(UNIT_TOL) {
        return Err(Error::NotNormalized(c.norm()));
    }
    let d = c.dim();
    let chat = dft(c);
    let count = |v: &CVector| v.entries().iter().filter(|z| z.norm() > tol).count();
    let entropy_c = shannon_bits(&c.moduli_sq());
    let entropy_chat = shannon_bits(&chat.moduli_sq());
    let sum = entropy_c + entropy_chat;
    Ok(UrReport {
        support_c: count(c),
        support_chat: count(&chat),
        entropy_c,
        entropy_chat,
        sum,
        deficit: sum - (d as f64).log2(),
    })
}

/// Divisors of `d` in increasing order.
pub fn divisors(d: usize) -> Vec<usize> {
    (1..=d).filter(|k| d.is_multiple_of(*k)).collect()
}

/// Parameters `(d1, β, γ)` of `c_l = α η^{βl} δ_{0,(l+γ) mod d1}`, `α = d2^{-1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct MinimizerSpec {
    pub d: usize,
    pub d1: usize,
    pub d2: usize,
    /// In `0..d2`.
    pub beta: usize,
    /// In `0..d1`.
    pub gamma: usize,
}

impl MinimizerSpec {
    pub fn new(d: usize, d1: usize, beta: i64, gamma: i64) -> Result<Self> {
        if d1 == 0 || !d.is_multiple_of(d1) {
            return Err(Error::NotDivisor { d, d1 });
        }
        let d2 = d / d1;
        Ok(Self {
            d,
            d1,
            d2,
            beta: beta.rem_euclid(d2 as i64) as usize,
            gamma: gamma.rem_euclid(d1 as i64) as usize,
        })
    }

    pub fn vector(&self) -> CVector {
        let alpha = 1.0 / (self.d2 as f64).sqrt();
        CVector::new(
            (0..self.d)
                .map(|l| {
                    if (l + self.gamma).is_multiple_of(self.d1) {
                        eta_pow(self.d, (self.beta * l) as i64) * alpha
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect(),
        )
    }
}

#[derive(Debug, Clone)]
pub struct Minimizer {
    pub spec: MinimizerSpec,
    pub vector: CVector,
}

impl Minimizer {
    /// `λ = |c|²`.
    pub fn profile(&self) -> Vec<f64> {
        self.vector.moduli_sq()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct PhaseKey {
    moduli: Vec<i64>,
    phases: Vec<i64>,
}

fn phase_key(c: &CVector) -> PhaseKey {
    let moduli = c
        .entries()
        .iter()
        .map(|z| (z.norm() * 1e10).round() as i64)
        .collect();
    let support: Vec<_> = c
        .entries()
        .iter()
        .filter(|z| z.norm() > SUPPORT_TOL)
        .collect();
    let full_turn = (TAU * 1e8).round() as i64;
    let phases = match support.first() {
        Some(first) => support
            .iter()
            .map(|z| {
                let q = ((z.arg() - first.arg()).rem_euclid(TAU) * 1e8).round() as i64;
                if q == full_turn {
                    0
                } else {
                    q
                }
            })
            .collect(),
        None => Vec::new(),
    };
    PhaseKey { moduli, phases }
}

/// Every minimal-uncertainty vector in dimension `d`, deduplicated up to a
/// global phase, in lexicographic `(d1, γ, β)` order.
pub fn enumerate_minimizers(d: usize) -> Vec<Minimizer> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for d1 in divisors(d) {
        let d2 = d / d1;
        for gamma in 0..d1 {
            for beta in 0..d2 {
                let spec = MinimizerSpec {
                    d,
                    d1,
                    d2,
                    beta,
                    gamma,
                };
                let vector = spec.vector();
                if seen.insert(phase_key(&vector)) {
                    out.push(Minimizer { spec, vector });
                }
            }
        }
    }
    out
}

/// Distinct `λ = |c|²` profiles among the minimizers, in enumeration order.
pub fn minimizer_profiles(d: usize) -> Vec<Vec<f64>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for m in enumerate_minimizers(d) {
        let p = m.profile();
        let key: Vec<i64> = p.iter().map(|x| (x * 1e10).round() as i64).collect();
        if seen.insert(key) {
            out.push(p);
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimizerVerdict {
    pub is_minimizer: bool,
    pub deficit: f64,
    /// Enumerated minimizer with the largest overlap `|⟨m|c⟩|`.
    pub nearest: MinimizerSpec,
    pub overlap: f64,
}

/// Tests `deficit(c) < tol` and locates the nearest enumerated minimizer:
/// first by modulus profile, then by overlap (the phase ratio).
pub fn is_minimizer(c: &CVector, tol: f64) -> Result<MinimizerVerdict> {
    let report = ur_report(c, SUPPORT_TOL)?;
    let moduli = c.moduli_sq();
    let candidates = enumerate_minimizers(c.dim());
    let profile_distance = |m: &Minimizer| {
        m.profile()
            .iter()
            .zip(&moduli)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };
    let best_profile = candidates
        .iter()
        .map(&profile_distance)
        .fold(f64::INFINITY, f64::min);
    let (nearest, overlap) = candidates
        .iter()
        .filter(|m| profile_distance(m) <= best_profile + 1e-6)
        .map(|m| (m.spec, m.vector.inner(c).norm()))
        .fold(None, |best: Option<(MinimizerSpec, f64)>, cur| match best {
            Some(b) if b.1 >= cur.1 => Some(b),
            _ => Some(cur),
        })
        .expect("at least one minimizer in every dimension");
    Ok(MinimizerVerdict {
        is_minimizer: report.deficit < tol,
        deficit: report.deficit,
        nearest,
        overlap,
    })
}
