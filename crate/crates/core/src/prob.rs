use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::shannon_bits;

/// Tolerance on `|Σλ − 1|` accepted by [`ProbVector::new`].
pub const SUM_TOL: f64 = 1e-9;

/// A probability vector: the spectrum `λ` of `ρ_λ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    /// Validates without renormalizing.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidProbability("empty vector".into()));
        }
        if let Some((i, x)) = values
            .iter()
            .enumerate()
            .find(|(_, x)| !x.is_finite() || **x < 0.0)
        {
            return Err(Error::InvalidProbability(format!("entry {i} is {x}")));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidProbability(format!("entries sum to {sum}")));
        }
        Ok(Self(values))
    }

    pub fn uniform(d: usize) -> Self {
        Self(vec![1.0 / d as f64; d])
    }

    pub fn point_mass(d: usize, k: usize) -> Self {
        let mut v = vec![0.0; d];
        v[k] = 1.0;
        Self(v)
    }

    /// `λ(ν) = (ν + (1−ν)/d, (1−ν)/d, …, (1−ν)/d)`: one eigenvalue singled out, the rest equal.
    pub fn isotropic_slice(d: usize, nu: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&nu) {
            return Err(Error::OutOfRange(format!("nu = {nu} not in [0, 1]")));
        }
        if d == 0 {
            return Err(Error::Dimension("d must be positive".into()));
        }
        let rest = (1.0 - nu) / d as f64;
        let mut v = vec![rest; d];
        v[0] = nu + rest;
        Ok(Self(v))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn entropy_bits(&self) -> f64 {
        shannon_bits(&self.0)
    }

    /// Number of entries above `tol`.
    pub fn support_size(&self, tol: f64) -> usize {
        self.0.iter().filter(|&&x| x > tol).count()
    }

    pub fn is_uniform(&self, tol: f64) -> bool {
        let u = 1.0 / self.dim() as f64;
        self.0.iter().all(|x| (x - u).abs() <= tol)
    }
}
