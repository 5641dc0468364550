//! Dense complex linear algebra for small bipartite operators.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::HERMITIAN_TOL;

pub use nalgebra::Complex;
pub type Complex64 = Complex<f64>;

/// Which tensor factor of a bipartite space an operation addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Side {
    A,
    B,
}

/// A complex column vector, optionally tagged with a bipartite split.
#[derive(Debug, Clone, PartialEq)]
pub struct CVector {
    data: DVector<Complex64>,
    split: Option<(usize, usize)>,
}

impl CVector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        Self {
            data: DVector::from_vec(entries),
            split: None,
        }
    }

    pub fn from_real(entries: &[f64]) -> Self {
        Self::new(entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Basis vector `|k⟩` of `ℂ^d`.
    pub fn basis(d: usize, k: usize) -> Self {
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        v[k] = Complex64::new(1.0, 0.0);
        Self::new(v)
    }

    pub fn with_split(mut self, d_a: usize, d_b: usize) -> Result<Self> {
        if d_a * d_b != self.dim() {
            return Err(Error::Dimension(format!(
                "split {d_a}x{d_b} does not match vector length {}",
                self.dim()
            )));
        }
        self.split = Some((d_a, d_b));
        Ok(self)
    }

    /// Haar-random unit vector.
    pub fn random_unit<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        let entries = (0..d)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::new(entries).normalized()
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn split(&self) -> Option<(usize, usize)> {
        self.split
    }

    pub fn entries(&self) -> &[Complex64] {
        self.data.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<Complex64> {
        &self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.norm()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() < tol
    }

    /// Returns `self / ‖self‖`. A zero vector is returned unchanged.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        Self {
            data: self.data.unscale(n),
            split: self.split,
        }
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &CVector) -> Complex64 {
        self.data.dotc(&other.data)
    }

    /// Squared moduli `|c_l|²`.
    pub fn moduli_sq(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.norm_sqr()).collect()
    }

    /// `|v⟩⟨v|`, inheriting the bipartite split.
    pub fn projector(&self) -> CMatrix {
        CMatrix {
            data: &self.data * self.data.adjoint(),
            split: self.split,
        }
    }

    /// `|self⟩⊗|other⟩` with split `(dim self, dim other)`.
    pub fn kron(&self, other: &CVector) -> CVector {
        CVector {
            data: self.data.kronecker(&other.data),
            split: Some((self.dim(), other.dim())),
        }
    }
}

/// A square complex matrix, optionally tagged with a bipartite split `(d_A, d_B)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    data: DMatrix<Complex64>,
    split: Option<(usize, usize)>,
}

impl CMatrix {
    pub fn new(data: DMatrix<Complex64>) -> Result<Self> {
        if !data.is_square() {
            return Err(Error::Shape(format!(
                "expected a square matrix, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(Self { data, split: None })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            data: DMatrix::identity(n, n),
            split: None,
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            data: DMatrix::zeros(n, n),
            split: None,
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let v = DVector::from_iterator(diag.len(), diag.iter().map(|&x| Complex64::new(x, 0.0)));
        Self {
            data: DMatrix::from_diagonal(&v),
            split: None,
        }
    }

    /// Matrix unit `|row⟩⟨col|` in dimension `n`.
    pub fn unit(n: usize, row: usize, col: usize) -> Self {
        let mut m = Self::zeros(n);
        m.data[(row, col)] = Complex64::new(1.0, 0.0);
        m
    }

    /// Random density operator drawn from the Hilbert-Schmidt ensemble.
    pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let g = DMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let rho = &g * g.adjoint();
        let tr = rho.trace().re;
        Self {
            data: rho.unscale(tr),
            split: None,
        }
    }

    pub fn with_split(mut self, d_a: usize, d_b: usize) -> Result<Self> {
        if d_a * d_b != self.dim() {
            return Err(Error::Dimension(format!(
                "split {d_a}x{d_b} does not match matrix size {}",
                self.dim()
            )));
        }
        self.split = Some((d_a, d_b));
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn split(&self) -> Option<(usize, usize)> {
        self.split
    }

    fn require_split(&self) -> Result<(usize, usize)> {
        self.split
            .ok_or_else(|| Error::Dimension("operator carries no bipartite split".into()))
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            data: self.data.adjoint(),
            split: self.split,
        }
    }

    /// `‖A − A†‖_max`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() < tol
    }

    /// `⟨v|A|v⟩`.
    pub fn expectation(&self, v: &CVector) -> Complex64 {
        v.as_vector().dotc(&(&self.data * v.as_vector()))
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        CVector {
            data: &self.data * v.as_vector(),
            split: v.split,
        }
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        CMatrix {
            data: &self.data * &other.data,
            split: self.split.or(other.split),
        }
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        CMatrix {
            data: &self.data + &other.data,
            split: self.split.or(other.split),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        CMatrix {
            data: &self.data - &other.data,
            split: self.split.or(other.split),
        }
    }

    pub fn scale(&self, s: f64) -> CMatrix {
        CMatrix {
            data: self.data.scale(s),
            split: self.split,
        }
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Whether `A·A† = I` within `tol` (entrywise).
    pub fn is_unitary(&self, tol: f64) -> bool {
        let prod = &self.data * self.data.adjoint();
        prod.iter().enumerate().all(|(idx, z)| {
            let (r, c) = (idx % self.dim(), idx / self.dim());
            let target = if r == c { 1.0 } else { 0.0 };
            (z - Complex64::new(target, 0.0)).norm() < tol
        })
    }

    /// `⟨Ψ|A|Ψ⟩` for every vector in `basis`, real parts only.
    pub fn diagonal_in(&self, basis: &[CVector]) -> Vec<f64> {
        basis.iter().map(|v| self.expectation(v).re).collect()
    }
}

/// Kronecker product; the result carries split `(rows A, rows B)`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    CMatrix {
        data: a.data.kronecker(&b.data),
        split: Some((a.dim(), b.dim())),
    }
}

/// Reduces a bipartite operator onto the factor `keep`.
pub fn partial_trace(rho: &CMatrix, keep: Side) -> Result<CMatrix> {
    let (da, db) = rho.require_split()?;
    let m = &rho.data;
    let out = match keep {
        Side::A => DMatrix::from_fn(da, da, |i, ip| {
            (0..db).map(|k| m[(i * db + k, ip * db + k)]).sum()
        }),
        Side::B => DMatrix::from_fn(db, db, |k, kp| {
            (0..da).map(|i| m[(i * db + k, i * db + kp)]).sum()
        }),
    };
    Ok(CMatrix {
        data: out,
        split: None,
    })
}

/// Transposes the chosen tensor factor. Involutive.
pub fn partial_transpose(rho: &CMatrix, side: Side) -> Result<CMatrix> {
    let (da, db) = rho.require_split()?;
    let m = &rho.data;
    let n = da * db;
    let out = DMatrix::from_fn(n, n, |r, c| {
        let (i, k) = (r / db, r % db);
        let (ip, kp) = (c / db, c % db);
        match side {
            Side::A => m[(ip * db + k, i * db + kp)],
            Side::B => m[(i * db + kp, ip * db + k)],
        }
    });
    Ok(CMatrix {
        data: out,
        split: rho.split,
    })
}

/// Spectrum of a Hermitian matrix in ascending order.
pub fn herm_eigvals(h: &CMatrix) -> Result<Vec<f64>> {
    let dev = h.hermitian_deviation();
    if dev >= HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    // Symmetrize away the sub-tolerance anti-Hermitian dust first.
    let sym = (&h.data + h.data.adjoint()).scale(0.5);
    let mut eig: Vec<f64> = SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// Smallest eigenvalue of the partial transpose on `side`.
pub fn min_pt_eigenvalue(rho: &CMatrix, side: Side) -> Result<f64> {
    let pt = partial_transpose(rho, side)?;
    Ok(herm_eigvals(&pt)?[0])
}

/// `½‖ρ − σ‖₁`.
pub fn trace_distance(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Shape(format!(
            "trace distance of {}x{} and {}x{} operators",
            rho.dim(),
            rho.dim(),
            sigma.dim(),
            sigma.dim()
        )));
    }
    let diff = CMatrix {
        data: &rho.data - &sigma.data,
        split: None,
    };
    Ok(0.5 * herm_eigvals(&diff)?.iter().map(|x| x.abs()).sum::<f64>())
}

/// Shannon entropy in bits. Entries are clipped at zero first; `0·log 0 = 0`.
pub fn shannon_bits(p: &[f64]) -> f64 {
    p.iter()
        .map(|&x| x.max(0.0))
        .filter(|&x| x > 0.0)
        .map(|x| -x * x.log2())
        .sum()
}

/// Von Neumann entropy in bits.
pub fn von_neumann_bits(rho: &CMatrix) -> Result<f64> {
    Ok(shannon_bits(&herm_eigvals(rho)?))
}
