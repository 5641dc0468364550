//! Weyl unitaries, the maximally entangled basis `Ψ_kl`, the family `ρ_λ`,
//! its two twirls, the entanglement-breaking map that pins `E_c = E_f`,
//! tagged quasi-pure states and the tensor split of the reversible cases.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::pure_entanglement;
use crate::prob::ProbVector;
use crate::qcore::{kron, trace_distance, CMatrix, CVector, Complex64};

/// `η^power` with `η = e^{2πi/d}`; the exponent is reduced mod `d` first.
pub fn eta_pow(d: usize, power: i64) -> Complex64 {
    let r = power.rem_euclid(d as i64) as f64;
    Complex64::from_polar(1.0, 2.0 * PI * r / d as f64)
}

/// Index `(k, l)` of a Weyl unitary, both reduced mod `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WeylIndex {
    pub k: usize,
    pub l: usize,
    pub d: usize,
}

impl WeylIndex {
    pub fn new(k: i64, l: i64, d: usize) -> Self {
        assert!(d > 0, "dimension must be positive");
        let m = d as i64;
        Self {
            k: k.rem_euclid(m) as usize,
            l: l.rem_euclid(m) as usize,
            d,
        }
    }
}

/// Which one-index sub-basis of `{Ψ_kl}` carries `ρ_λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisConvention {
    /// `Ψ_l = Ψ_{0l} = d^{-1/2} Σ_j η^{jl} |j, j⟩`.
    #[default]
    Column,
    /// `Ψ_l = Ψ_{l0} = d^{-1/2} Σ_j |j, j+l⟩`.
    Row,
}

impl BasisConvention {
    pub fn index(self, l: usize, d: usize) -> WeylIndex {
        match self {
            Self::Column => WeylIndex::new(0, l as i64, d),
            Self::Row => WeylIndex::new(l as i64, 0, d),
        }
    }
}

/// `U_kl = Σ_r η^{rl} |k+r⟩⟨r|`.
pub fn weyl_unitary(idx: WeylIndex) -> CMatrix {
    let WeylIndex { k, l, d } = idx;
    let mut m = DMatrix::zeros(d, d);
    for r in 0..d {
        m[((k + r) % d, r)] = eta_pow(d, (r * l) as i64);
    }
    CMatrix::new(m).expect("square by construction")
}

/// `|Ψ_kl⟩ = d^{-1/2} Σ_j |j⟩⊗U_kl|j⟩`, split `(d, d)`.
pub fn bell_state(idx: WeylIndex) -> CVector {
    let WeylIndex { k, l, d } = idx;
    let amp = 1.0 / (d as f64).sqrt();
    let mut v = vec![Complex64::new(0.0, 0.0); d * d];
    for j in 0..d {
        v[j * d + (j + k) % d] = eta_pow(d, (j * l) as i64) * amp;
    }
    CVector::new(v).with_split(d, d).expect("d*d entries")
}

/// `Ψ_0, …, Ψ_{d−1}` in the given convention.
pub fn bell_basis(conv: BasisConvention, d: usize) -> Vec<CVector> {
    (0..d).map(|l| bell_state(conv.index(l, d))).collect()
}

/// All `d²` states `Ψ_kl`, ordered `k`-major.
pub fn full_bell_basis(d: usize) -> Vec<CVector> {
    (0..d)
        .flat_map(|k| (0..d).map(move |l| bell_state(WeylIndex::new(k as i64, l as i64, d))))
        .collect()
}

/// `ρ_λ = Σ_l λ_l |Ψ_l⟩⟨Ψ_l|`.
pub fn rho_lambda(lambda: &ProbVector, conv: BasisConvention) -> CMatrix {
    let d = lambda.dim();
    let mut acc = DMatrix::zeros(d * d, d * d);
    for (psi, &w) in bell_basis(conv, d).iter().zip(lambda.values()) {
        if w != 0.0 {
            acc += psi.projector().into_matrix().scale(w);
        }
    }
    CMatrix::new(acc)
        .and_then(|m| m.with_split(d, d))
        .expect("d² x d² by construction")
}

/// The `d²` elements `U_{k,l} ⊗ U_{k,−l}` of the abelian symmetry group.
pub fn symmetry_group(d: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(d * d);
    for k in 0..d as i64 {
        for l in 0..d as i64 {
            let g = kron(
                &weyl_unitary(WeylIndex::new(k, l, d)),
                &weyl_unitary(WeylIndex::new(k, -l, d)),
            );
            out.push(g);
        }
    }
    out
}

fn require_square_split(rho: &CMatrix) -> Result<usize> {
    match rho.split() {
        Some((a, b)) if a == b => Ok(a),
        Some((a, b)) => Err(Error::Dimension(format!(
            "expected a d x d split, got {a} x {b}"
        ))),
        None => Err(Error::Dimension(
            "operator carries no bipartite split".into(),
        )),
    }
}

/// `𝒯(ρ) = d⁻² Σ_{g∈G} g†ρg`, summed exactly over all `d²` group elements.
///
/// Every `Ψ_kl` is a joint eigenvector of `G` with a distinct character, so the
/// result is the `Ψ_kl`-diagonal part of `ρ`. This holds for both basis
/// conventions.
pub fn twirl_g(rho: &CMatrix) -> Result<CMatrix> {
    let d = require_square_split(rho)?;
    let n = d * d;
    let m = rho.as_matrix();
    let mut acc = DMatrix::<Complex64>::zeros(n, n);
    // g|a,b⟩ = η^{(a−b)l} |a+k, b+k⟩, so (g†ρg)_{xy} = conj(φ_x) φ_y ρ_{π(x)π(y)}.
    let mut perm = vec![0usize; n];
    let mut phase = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..d {
        for l in 0..d {
            for a in 0..d {
                for b in 0..d {
                    let x = a * d + b;
                    perm[x] = ((a + k) % d) * d + (b + k) % d;
                    phase[x] = eta_pow(d, (a as i64 - b as i64) * l as i64);
                }
            }
            for y in 0..n {
                for x in 0..n {
                    acc[(x, y)] += phase[x].conj() * phase[y] * m[(perm[x], perm[y])];
                }
            }
        }
    }
    let out = CMatrix::new(acc.unscale(n as f64))?;
    out.with_split(d, d)
}

/// `σ(f) = f|Ψ₀⟩⟨Ψ₀| + (1−f)/(d²−1)·(1 − |Ψ₀⟩⟨Ψ₀|)`.
pub fn isotropic_state(f: f64, d: usize) -> Result<CMatrix> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::OutOfRange(format!("fidelity {f} not in [0, 1]")));
    }
    isotropic_combination(f, 1.0, d)
}

fn isotropic_combination(f: f64, trace: f64, d: usize) -> Result<CMatrix> {
    let n = d * d;
    let p0 = bell_state(WeylIndex::new(0, 0, d)).projector();
    let rest = CMatrix::identity(n).sub(&p0);
    let noise = if n > 1 {
        (trace - f) / (n as f64 - 1.0)
    } else {
        0.0
    };
    p0.scale(f).add(&rest.scale(noise)).with_split(d, d)
}

/// The `U⊗Ū` twirl: projection onto `span{|Ψ₀⟩⟨Ψ₀|, 1}` keeping `⟨Ψ₀|ρ|Ψ₀⟩` and `tr ρ`.
pub fn twirl_isotropic(rho: &CMatrix) -> Result<CMatrix> {
    let d = require_square_split(rho)?;
    let psi0 = bell_state(WeylIndex::new(0, 0, d));
    let f = rho.expectation(&psi0).re;
    isotropic_combination(f, rho.trace().re, d)
}

/// `|φ_l⟩ = d^{-1/2} Σ_j η^{−lj} |j⟩`.
pub fn fourier_vector(d: usize, l: usize) -> CVector {
    let amp = 1.0 / (d as f64).sqrt();
    CVector::new(
        (0..d)
            .map(|j| eta_pow(d, -((l * j) as i64)) * amp)
            .collect(),
    )
}

/// Measure-and-prepare map `M(X) = Σ_j σ_j tr(F_j X)` with Fourier-basis
/// POVM and computational-basis preparations, together with the isometry
/// `V|l⟩ = |Ψ_{0l}⟩` for which `M(X) = tr_B(V X V†)`.
#[derive(Debug, Clone)]
pub struct EbMap {
    pub d: usize,
    pub povm: Vec<CMatrix>,
    pub prepared: Vec<CMatrix>,
    /// `d² × d` isometry.
    pub isometry: DMatrix<Complex64>,
}

pub fn eb_map(d: usize) -> EbMap {
    let povm = (0..d).map(|l| fourier_vector(d, l).projector()).collect();
    let prepared = (0..d).map(|l| CMatrix::unit(d, l, l)).collect();
    let mut isometry = DMatrix::zeros(d * d, d);
    for (l, psi) in bell_basis(BasisConvention::Column, d).iter().enumerate() {
        isometry.set_column(l, psi.as_vector());
    }
    EbMap {
        d,
        povm,
        prepared,
        isometry,
    }
}

impl EbMap {
    fn check_input(&self, x: &CMatrix) -> Result<()> {
        if x.dim() != self.d {
            return Err(Error::Shape(format!(
                "map acts on {}x{} matrices, got {}x{}",
                self.d,
                self.d,
                x.dim(),
                x.dim()
            )));
        }
        Ok(())
    }

    /// `Σ_l ⟨φ_l|X|φ_l⟩ |l⟩⟨l|`.
    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        self.check_input(x)?;
        let mut out = CMatrix::zeros(self.d);
        for (f, s) in self.povm.iter().zip(&self.prepared) {
            let weight = f.mul(x).trace();
            out = out.add(&CMatrix::new(s.as_matrix() * weight)?);
        }
        Ok(out)
    }

    /// `tr_B(V X V†)`.
    pub fn apply_via_isometry(&self, x: &CMatrix) -> Result<CMatrix> {
        self.check_input(x)?;
        let big = &self.isometry * x.as_matrix() * self.isometry.adjoint();
        crate::qcore::partial_trace(
            &CMatrix::new(big)?.with_split(self.d, self.d)?,
            crate::Side::A,
        )
    }

    /// Choi matrix `Σ_{lm} |l⟩⟨m| ⊗ M(|l⟩⟨m|)`, split `(d, d)`.
    pub fn choi(&self) -> CMatrix {
        let d = self.d;
        let mut acc = CMatrix::zeros(d * d);
        for l in 0..d {
            for m in 0..d {
                let image = self.apply(&CMatrix::unit(d, l, m)).expect("d x d input");
                acc = acc.add(&kron(&CMatrix::unit(d, l, m), &image));
            }
        }
        acc.with_split(d, d).expect("d² x d²")
    }

    /// `‖V†V − 1‖_max`.
    pub fn isometry_defect(&self) -> f64 {
        let gram = self.isometry.adjoint() * &self.isometry;
        let id = DMatrix::<Complex64>::identity(self.d, self.d);
        (gram - id).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `V V†`, the projector onto the range of the isometry.
    pub fn range_projector(&self) -> CMatrix {
        CMatrix::new(&self.isometry * self.isometry.adjoint())
            .and_then(|m| m.with_split(self.d, self.d))
            .expect("square")
    }
}

/// Which party holds the classical tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TagSide {
    A,
    B,
    Both,
}

#[derive(Debug, Clone)]
pub struct TaggedTerm {
    pub p: f64,
    pub state: CVector,
    pub tag: usize,
}

/// `{(p_t, Φ_t, t)}` with orthonormal tags `|t⟩ ∈ ℂ^{tag_dim}`.
#[derive(Debug, Clone)]
pub struct TaggedEnsemble {
    terms: Vec<TaggedTerm>,
    tag_dim: usize,
    split: (usize, usize),
}

impl TaggedEnsemble {
    pub fn new(terms: Vec<TaggedTerm>, tag_dim: usize) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidProbability("empty ensemble".into()))?;
        let split = first
            .state
            .split()
            .ok_or_else(|| Error::Dimension("ensemble states need a bipartite split".into()))?;
        let probs = ProbVector::new(terms.iter().map(|t| t.p).collect())?;
        debug_assert_eq!(probs.dim(), terms.len());
        let mut seen = vec![false; tag_dim];
        for t in &terms {
            if t.state.split() != Some(split) {
                return Err(Error::Dimension(
                    "ensemble states have different splits".into(),
                ));
            }
            if !t.state.is_normalized(crate::NORM_TOL) {
                return Err(Error::NotNormalized(t.state.norm()));
            }
            if t.tag >= tag_dim {
                return Err(Error::OutOfRange(format!(
                    "tag {} >= tag dimension {tag_dim}",
                    t.tag
                )));
            }
            if std::mem::replace(&mut seen[t.tag], true) {
                return Err(Error::TagsNotOrthogonal(format!(
                    "tag {} used twice",
                    t.tag
                )));
            }
        }
        Ok(Self {
            terms,
            tag_dim,
            split,
        })
    }

    pub fn terms(&self) -> &[TaggedTerm] {
        &self.terms
    }

    /// `Σ_t p_t E(Φ_t)`, which is both `E_c` and `E_D` of the tagged state.
    pub fn quasi_pure_value(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.p * pure_entanglement(&t.state).expect("validated state"))
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct TaggedState {
    pub state: CMatrix,
    /// `E_c = E_D` in bits.
    pub value: f64,
}

/// `τ = Σ_t p_t |Φ_t⟩⟨Φ_t| ⊗ |t⟩⟨t|`, tag factor attached to `side`.
pub fn tagged_state(e: &TaggedEnsemble, side: TagSide) -> TaggedState {
    let (da, db) = e.split;
    let td = e.tag_dim;
    let (na, nb) = match side {
        TagSide::A => (da * td, db),
        TagSide::B => (da, db * td),
        TagSide::Both => (da * td, db * td),
    };
    let mut acc = DMatrix::<Complex64>::zeros(na * nb, na * nb);
    for term in &e.terms {
        let mut ket = vec![Complex64::new(0.0, 0.0); na * nb];
        for a in 0..da {
            for b in 0..db {
                let amp = term.state.entries()[a * db + b];
                let t = term.tag;
                let slot = match side {
                    TagSide::A => (a * td + t) * nb + b,
                    TagSide::B => a * nb + b * td + t,
                    TagSide::Both => (a * td + t) * nb + b * td + t,
                };
                ket[slot] = amp;
            }
        }
        acc += CVector::new(ket).projector().into_matrix().scale(term.p);
    }
    TaggedState {
        state: CMatrix::new(acc)
            .and_then(|m| m.with_split(na, nb))
            .expect("square"),
        value: e.quasi_pure_value(),
    }
}

/// How a local index `j ∈ ℤ_d` is split into `(j₁, j₂) ∈ ℤ_{d1} × ℤ_{d2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexSplit {
    /// `j ↦ (j mod d1, j div d1)`.
    ModFirst,
    /// `j ↦ (j div d2, j mod d2)`.
    DivFirst,
}

impl IndexSplit {
    pub fn apply(self, j: usize, d1: usize, d2: usize) -> (usize, usize) {
        match self {
            Self::ModFirst => (j % d1, j / d1),
            Self::DivFirst => (j / d2, j % d2),
        }
    }
}

/// `λ_l = (1/d2)·δ_{0,(l+γ) mod d1}`, the spectrum induced by a minimal-uncertainty vector.
pub fn reversible_lambda(d: usize, d1: usize, gamma: i64) -> Result<ProbVector> {
    if d1 == 0 || !d.is_multiple_of(d1) {
        return Err(Error::NotDivisor { d, d1 });
    }
    let d2 = d / d1;
    let g = gamma.rem_euclid(d1 as i64) as usize;
    ProbVector::new(
        (0..d)
            .map(|l| {
                if (l + g).is_multiple_of(d1) {
                    1.0 / d2 as f64
                } else {
                    0.0
                }
            })
            .collect(),
    )
}

/// `ρ_λ` of a reversible case next to `|Ψ₀₀^{(d1)}⟩⟨Ψ₀₀^{(d1)}| ⊗ d2⁻¹ Σ_k |Ψ_{k0}^{(d2)}⟩⟨Ψ_{k0}^{(d2)}|`.
#[derive(Debug, Clone)]
pub struct ReversibleDecomposition {
    pub d: usize,
    pub d1: usize,
    pub d2: usize,
    pub gamma: i64,
    pub beta: i64,
    pub lambda: ProbVector,
    /// `ρ_λ` in the row convention, split `A|B`.
    pub lhs: CMatrix,
    /// Tensor construction on `A₁B₁ ⊗ A₂B₂`, split `(d1², d2²)`.
    pub rhs: CMatrix,
    /// `rhs` with indices carried back to the `A|B` ordering.
    pub permuted_rhs: CMatrix,
    /// Local index maps `j ↦ (j₁, j₂)` for `A` and `B`.
    pub perm_a: Vec<(usize, usize)>,
    pub perm_b: Vec<(usize, usize)>,
    pub split: IndexSplit,
    pub trace_distance: f64,
}

/// Tolerance below which the two sides of the decomposition count as equal.
pub const DECOMPOSITION_TOL: f64 = 1e-9;

/// Exhibits a reversible `ρ_λ` as a maximally entangled state tensored with a
/// separable Bell mixture, across the `A₁B₁ ⊗ A₂B₂` split.
///
/// `β` only rephases the preimage vector and leaves `λ` unchanged. `γ` shifts
/// the support of `λ`; it is absorbed by the relabeling `k ↦ k + γ` on `B`
/// before the index split.
pub fn reversible_decomposition(
    d: usize,
    d1: usize,
    gamma: i64,
    beta: i64,
) -> Result<ReversibleDecomposition> {
    let lambda = reversible_lambda(d, d1, gamma)?;
    let d2 = d / d1;
    let lhs = rho_lambda(&lambda, BasisConvention::Row);

    let first = bell_state(WeylIndex::new(0, 0, d1)).projector();
    let second = rho_lambda(&ProbVector::uniform(d2), BasisConvention::Row);
    let rhs = kron(&first, &second);

    let shift = gamma.rem_euclid(d as i64) as usize;
    let mut best = None;
    for split in [IndexSplit::ModFirst, IndexSplit::DivFirst] {
        let perm_a: Vec<_> = (0..d).map(|j| split.apply(j, d1, d2)).collect();
        let perm_b: Vec<_> = (0..d)
            .map(|k| split.apply((k + shift) % d, d1, d2))
            .collect();
        let permuted = permute_to_ab(&rhs, &perm_a, &perm_b, d1, d2)?;
        let dist = trace_distance(&lhs, &permuted)?;
        let done = dist < DECOMPOSITION_TOL;
        best = Some((split, perm_a, perm_b, permuted, dist));
        if done {
            break;
        }
    }
    let (split, perm_a, perm_b, permuted_rhs, dist) = best.expect("two splits tried");
    Ok(ReversibleDecomposition {
        d,
        d1,
        d2,
        gamma,
        beta,
        lambda,
        lhs,
        rhs,
        permuted_rhs,
        perm_a,
        perm_b,
        split,
        trace_distance: dist,
    })
}

fn permute_to_ab(
    rhs: &CMatrix,
    perm_a: &[(usize, usize)],
    perm_b: &[(usize, usize)],
    d1: usize,
    d2: usize,
) -> Result<CMatrix> {
    let d = d1 * d2;
    let index = |x: usize| {
        let (a1, a2) = perm_a[x / d];
        let (b1, b2) = perm_b[x % d];
        ((a1 * d1 + b1) * d2 + a2) * d2 + b2
    };
    let src = rhs.as_matrix();
    let n = d * d;
    CMatrix::new(DMatrix::from_fn(n, n, |x, y| src[(index(x), index(y))]))?.with_split(d, d)
}
