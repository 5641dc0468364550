//! Invariant suite behind `irrev verify`.
//!
//! Equality checks use the configured tolerance. Checks that compare against
//! the phase optimizer use fixed tolerances (1e-6 against `E_D⁺`, 1e-3 against
//! the grid oracle).

use std::time::Instant;

use irrev_core::measures::{self, epsilon_bruteforce, epsilon_min, OptimizerConfig};
use irrev_core::qcore::{
    herm_eigvals, kron, min_pt_eigenvalue, partial_trace, partial_transpose, shannon_bits,
};
use irrev_core::symstates::{
    bell_basis, eb_map, reversible_decomposition, rho_lambda, symmetry_group, twirl_g,
    BasisConvention,
};
use irrev_core::uncertainty::{
    dft, divisors, enumerate_minimizers, is_minimizer, minimizer_profiles, ur_report, SUPPORT_TOL,
};
use irrev_core::{CMatrix, CVector, Complex64, ProbVector, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const OPTIMIZER_TOL: f64 = 1e-6;
pub const ORACLE_TOL: f64 = 1e-3;
pub const STRICT_GAP: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub d_max: usize,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Summary on success, witness on failure.
    pub detail: String,
    pub seconds: f64,
}

type Outcome = Result<String, String>;
type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn random_lambda<R: Rng>(d: usize, rng: &mut R) -> ProbVector {
    // exponential spacings give a uniform point on the simplex
    let raw: Vec<f64> = (0..d).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = raw.iter().sum();
    ProbVector::new(raw.iter().map(|x| x / s).collect()).expect("normalized")
}

fn superpose(c: &CVector, basis: &[CVector]) -> CVector {
    let n = basis[0].dim();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (cl, psi) in c.entries().iter().zip(basis) {
        for (slot, z) in out.iter_mut().zip(psi.entries()) {
            *slot += cl * z;
        }
    }
    let (da, db) = basis[0].split().expect("bipartite basis");
    CVector::new(out).with_split(da, db).expect("same split")
}

/// All compositions of `total` into `parts` nonnegative integers.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    (0..=total)
        .flat_map(|first| {
            compositions(total - first, parts - 1)
                .into_iter()
                .map(move |mut rest| {
                    rest.insert(0, first);
                    rest
                })
        })
        .collect()
}

pub fn run_suite(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let tol = cfg.tol;
    let n = cfg.samples;
    let d_max = cfg.d_max;
    let opt = &OptimizerConfig {
        seed: cfg.seed,
        ..Default::default()
    };

    let checks: Vec<(&'static str, Check<'_>)> = vec![
        (
            "qcore/partial-trace-of-product",
            Box::new(move || {
                let mut rng = rng_for(cfg.seed, 1);
                for i in 0..n {
                    let (da, db) = (rng.random_range(1..=3), rng.random_range(1..=3));
                    let a = CMatrix::random_density(da, &mut rng);
                    let b = CMatrix::random_density(db, &mut rng).scale(rng.random_range(0.5..2.0));
                    let r = partial_trace(&kron(&a, &b), Side::A).map_err(|e| e.to_string())?;
                    let err = r.max_abs_diff(&a.scale(b.trace().re));
                    if err >= tol {
                        return Err(format!("sample {i} ({da}x{db}): deviation {err:e}"));
                    }
                }
                Ok(format!("{n} random products"))
            }),
        ),
        (
            "qcore/density-spectrum",
            Box::new(move || {
                let mut rng = rng_for(cfg.seed, 2);
                for i in 0..n {
                    let dim = rng.random_range(1..=d_max * d_max);
                    let e = herm_eigvals(&CMatrix::random_density(dim, &mut rng))
                        .map_err(|e| e.to_string())?;
                    let sum: f64 = e.iter().sum();
                    if e[0] < -tol || (sum - 1.0).abs() >= tol {
                        return Err(format!(
                            "sample {i} (n={dim}): min {:e}, sum-1 {:e}",
                            e[0],
                            sum - 1.0
                        ));
                    }
                }
                Ok(format!("{n} random density operators"))
            }),
        ),
        (
            "qcore/partial-transpose-hermitian-trace",
            Box::new(move || {
                let mut rng = rng_for(cfg.seed, 3);
                for i in 0..n {
                    let d = rng.random_range(2..=d_max.min(4));
                    let rho = CMatrix::random_density(d * d, &mut rng)
                        .with_split(d, d)
                        .expect("split");
                    let pt = partial_transpose(&rho, Side::B).map_err(|e| e.to_string())?;
                    let herm = pt.hermitian_deviation();
                    let tr = (pt.trace() - rho.trace()).norm();
                    if herm >= tol || tr >= tol {
                        return Err(format!(
                            "sample {i} (d={d}): hermitian dev {herm:e}, trace dev {tr:e}"
                        ));
                    }
                }
                Ok(format!("{n} random states"))
            }),
        ),
        (
            "symstates/group-commutes-with-rho",
            Box::new(move || {
                let mut rng = rng_for(cfg.seed, 4);
                for d in 2..=d_max {
                    let group = symmetry_group(d);
                    for conv in [BasisConvention::Column, BasisConvention::Row] {
                        let rho = rho_lambda(&random_lambda(d, &mut rng), conv);
                        for (gi, g) in group.iter().enumerate() {
                            let err = g.mul(&rho).max_abs_diff(&rho.mul(g));
                            if err >= tol {
                                return Err(format!(
                                    "d={d} {conv:?} element {gi}: commutator {err:e}"
                                ));
                            }
                        }
                    }
                }
                Ok(format!("all d^2 elements, d=2..={d_max}"))
            }),
        ),
        (
            "symstates/twirl-projection",
            Box::new(move || {
                let mut rng = rng_for(cfg.seed, 5);
                let count = n.min(10);
                for d in 2..=d_max.min(8) {
                    let basis = bell_basis(BasisConvention::Column, d);
                    for i in 0..count {
                        let c = CVector::random_unit(d, &mut rng);
                        let phi = superpose(&c, &basis).projector();
                        let t = twirl_g(&phi).map_err(|e| e.to_string())?;
                        let expected = rho_lambda(
                            &ProbVector::new(c.moduli_sq()).map_err(|e| e.to_string())?,
                            BasisConvention::Column,
                        );
                        let err = t.max_abs_diff(&expected);
                        let idem = twirl_g(&t).map_err(|e| e.to_string())?.max_abs_diff(&t);
                        if err >= tol || idem >= tol {
                            return Err(format!(
                                "d={d} sample {i}: image dev {err:e}, idempotence dev {idem:e}"
                            ));
                        }
                        let rho = CMatrix::random_density(d * d, &mut rng)
                            .with_split(d, d)
                            .expect("split");
                        let tr = twirl_g(&rho).map_err(|e| e.to_string())?;
                        let tr_dev = (tr.trace().re - 1.0).abs();
                        let min_eig = herm_eigvals(&tr).map_err(|e| e.to_string())?[0];
                        if tr_dev >= tol || min_eig < -tol {
                            return Err(format!("d={d} sample {i}: trace dev {tr_dev:e}, min eigenvalue {min_eig:e}"));
                        }
                    }
                }
                Ok(format!(
                    "{count} preimages and states per d=2..={}",
                    d_max.min(8)
                ))
            }),
        ),
        (
            "symstates/npt-off-uniform",
            Box::new(move || {
                let mut checked = 0;
                for d in 2..=d_max {
                    let total = if d <= 4 { 6 } else { 4 };
                    for comp in compositions(total, d) {
                        let lambda = ProbVector::new(
                            comp.iter().map(|&k| k as f64 / total as f64).collect(),
                        )
                        .expect("composition sums to total");
                        if lambda.is_uniform(1e-12) {
                            continue;
                        }
                        let m = min_pt_eigenvalue(
                            &rho_lambda(&lambda, BasisConvention::Column),
                            Side::B,
                        )
                        .map_err(|e| e.to_string())?;
                        if m >= -tol {
                            return Err(format!(
                                "d={d} lambda={:?}: min PT eigenvalue {m:e}",
                                lambda.values()
                            ));
                        }
                        checked += 1;
                    }
                }
                Ok(format!("{checked} grid points NPT"))
            }),
        ),
        (
            "symstates/eb-map",
            Box::new(move || {
                let mut rng = rng_for(cfg.seed, 6);
                for d in 1..=d_max.min(8) {
                    let m = eb_map(d);
                    let defect = m.isometry_defect();
                    if defect >= tol {
                        return Err(format!("d={d}: V†V deviates by {defect:e}"));
                    }
                    let p = m.range_projector();
                    let rho = rho_lambda(&random_lambda(d, &mut rng), BasisConvention::Column);
                    let err = p.mul(&rho).mul(&p).max_abs_diff(&rho);
                    if err >= tol {
                        return Err(format!(
                            "d={d}: support of rho outside range(V), deviation {err:e}"
                        ));
                    }
                    for l in 0..d {
                        for mm in 0..d {
                            let x = CMatrix::unit(d, l, mm);
                            let a = m.apply(&x).map_err(|e| e.to_string())?;
                            let b = m.apply_via_isometry(&x).map_err(|e| e.to_string())?;
                            let err = a.max_abs_diff(&b);
                            if err >= tol {
                                return Err(format!("d={d} unit ({l},{mm}): deviation {err:e}"));
                            }
                        }
                    }
                    let min = min_pt_eigenvalue(&m.choi(), Side::B).map_err(|e| e.to_string())?;
                    if min <= -tol {
                        return Err(format!("d={d}: Choi partial transpose eigenvalue {min:e}"));
                    }
                }
                Ok(format!("d=1..={}", d_max.min(8)))
            }),
        ),
        (
            "uncertainty/entropic-and-support",
            Box::new(move || {
                let mut rng = rng_for(cfg.seed, 7);
                for d in 2..=16 {
                    for i in 0..n {
                        let c = CVector::random_unit(d, &mut rng);
                        let r = ur_report(&c, SUPPORT_TOL).map_err(|e| e.to_string())?;
                        if !r.entropic_holds(tol) {
                            return Err(format!("d={d} sample {i}: deficit {:e}", r.deficit));
                        }
                        if !r.support_holds(d) {
                            return Err(format!(
                                "d={d} sample {i}: supports {}x{}",
                                r.support_c, r.support_chat
                            ));
                        }
                    }
                }
                Ok(format!("{n} Haar vectors per d=2..=16"))
            }),
        ),
        (
            "uncertainty/minimizers",
            Box::new(move || {
                for d in 1..=d_max.max(12) {
                    let mins = enumerate_minimizers(d);
                    let expected: usize = divisors(d).len() * d;
                    if mins.len() != expected {
                        return Err(format!(
                            "d={d}: {} vectors, expected {expected}",
                            mins.len()
                        ));
                    }
                    for m in &mins {
                        let r = ur_report(&m.vector, SUPPORT_TOL).map_err(|e| e.to_string())?;
                        if r.deficit.abs() >= tol || r.support_c * r.support_chat != d {
                            return Err(format!("d={d} {:?}: deficit {:e}", m.spec, r.deficit));
                        }
                        let hat = dft(&m.vector);
                        if !is_minimizer(&hat, tol)
                            .map_err(|e| e.to_string())?
                            .is_minimizer
                        {
                            return Err(format!(
                                "d={d} {:?}: transform is not a minimizer",
                                m.spec
                            ));
                        }
                    }
                }
                Ok(format!("d=1..={}", d_max.max(12)))
            }),
        ),
        (
            "uncertainty/perturbation-rigidity",
            Box::new(move || {
                let mut rng = rng_for(cfg.seed, 8);
                let mut count = 0;
                for d in 2..=d_max.min(8) {
                    for m in enumerate_minimizers(d) {
                        let mut v = m.vector.entries().to_vec();
                        let support: Vec<usize> =
                            (0..d).filter(|&l| v[l].norm() > SUPPORT_TOL).collect();
                        // a lone component only picks up a global phase
                        if support.len() < 2 {
                            continue;
                        }
                        let l = support[rng.random_range(0..support.len())];
                        v[l] *= Complex64::from_polar(1.0, 1e-2);
                        let r = ur_report(&CVector::new(v).normalized(), SUPPORT_TOL)
                            .map_err(|e| e.to_string())?;
                        if r.deficit <= 0.0 {
                            return Err(format!(
                                "d={d} {:?}: perturbed deficit {:e}",
                                m.spec, r.deficit
                            ));
                        }
                        count += 1;
                    }
                }
                Ok(format!("{count} perturbed minimizers"))
            }),
        ),
        (
            "measures/fourier-entropy-identity",
            Box::new(move || {
                let mut rng = rng_for(cfg.seed, 9);
                for d in 2..=8 {
                    let basis = bell_basis(BasisConvention::Column, d);
                    for i in 0..n {
                        let c = CVector::random_unit(d, &mut rng);
                        let e = measures::pure_entanglement(&superpose(&c, &basis))
                            .map_err(|e| e.to_string())?;
                        let s = shannon_bits(&dft(&c).moduli_sq());
                        if (e - s).abs() >= tol {
                            return Err(format!("d={d} sample {i}: E={e} S={s}"));
                        }
                    }
                }
                Ok(format!("{n} preimages per d=2..=8"))
            }),
        ),
        (
            "measures/chain-lower-bound",
            Box::new(move || {
                let mut rng = rng_for(cfg.seed, 10);
                for d in 2..=5 {
                    for i in 0..n {
                        let l = random_lambda(d, &mut rng);
                        let e = epsilon_min(&l, opt).map_err(|e| e.to_string())?;
                        let edp = measures::ed_plus(&l);
                        if edp > e.value + OPTIMIZER_TOL {
                            return Err(format!(
                                "d={d} sample {i} lambda={:?}: ed_plus {edp} > eps {}",
                                l.values(),
                                e.value
                            ));
                        }
                    }
                }
                Ok(format!("{n} random spectra per d=2..=5"))
            }),
        ),
        (
            "measures/equality-at-minimizers",
            Box::new(move || {
                let mut count = 0;
                for d in 2..=d_max {
                    for p in minimizer_profiles(d) {
                        let l = ProbVector::new(p).map_err(|e| e.to_string())?;
                        let e = epsilon_min(&l, opt).map_err(|e| e.to_string())?;
                        let diff = e.value - measures::ed_plus(&l);
                        if diff.abs() >= OPTIMIZER_TOL {
                            return Err(format!(
                                "d={d} lambda={:?}: eps - ed_plus = {diff:e}",
                                l.values()
                            ));
                        }
                        count += 1;
                    }
                }
                Ok(format!("{count} minimizer-induced spectra"))
            }),
        ),
        (
            "measures/strict-gap-points",
            Box::new(move || {
                let points = [(vec![0.75, 0.25], 720usize), (vec![0.6, 0.3, 0.1], 120)];
                let mut summary = Vec::new();
                for (values, grid) in points {
                    let l = ProbVector::new(values).map_err(|e| e.to_string())?;
                    let e = epsilon_min(&l, opt).map_err(|e| e.to_string())?;
                    let oracle = epsilon_bruteforce(&l, grid).map_err(|e| e.to_string())?;
                    let gap = e.value - measures::ed_plus(&l);
                    if gap <= STRICT_GAP || (e.value - oracle).abs() >= ORACLE_TOL {
                        return Err(format!(
                            "lambda={:?}: gap {gap}, eps {} vs grid {oracle}",
                            l.values(),
                            e.value
                        ));
                    }
                    summary.push(format!("{gap:.4}"));
                }
                Ok(format!("gaps {}", summary.join(", ")))
            }),
        ),
        (
            "measures/oracle-agreement",
            Box::new(move || {
                let mut rng = rng_for(cfg.seed, 11);
                let count = n.min(20);
                let mut worst: f64 = 0.0;
                for (d, grid) in [(2usize, 720usize), (3, 120), (4, 96)] {
                    for i in 0..count {
                        let l = random_lambda(d, &mut rng);
                        let e = epsilon_min(&l, opt).map_err(|e| e.to_string())?;
                        let oracle = epsilon_bruteforce(&l, grid).map_err(|e| e.to_string())?;
                        let diff = (e.value - oracle).abs();
                        worst = worst.max(diff);
                        if diff >= ORACLE_TOL {
                            return Err(format!(
                                "d={d} sample {i} lambda={:?}: eps {} vs grid {oracle}",
                                l.values(),
                                e.value
                            ));
                        }
                    }
                }
                Ok(format!("{count} spectra per d=2,3,4; worst {worst:.2e}"))
            }),
        ),
        (
            "measures/gap-point-sanity",
            Box::new(move || {
                let grid = measures::linspace(0.0, 1.0, 21);
                for d in [2, 3] {
                    let pts = measures::gap_sweep(d, &grid, opt).map_err(|e| e.to_string())?;
                    for p in &pts {
                        if p.gap < -OPTIMIZER_TOL
                            || !(0.0..=1.0 + OPTIMIZER_TOL).contains(&p.relative_gap)
                        {
                            return Err(format!(
                                "d={d} nu={}: gap {} relative {}",
                                p.nu, p.gap, p.relative_gap
                            ));
                        }
                    }
                    let last = pts.last().expect("non-empty");
                    if last.gap.abs() >= tol {
                        return Err(format!("d={d}: gap at nu=1 is {:e}", last.gap));
                    }
                }
                Ok("21-point sweeps, d=2,3".into())
            }),
        ),
        (
            "symstates/reversible-decomposition",
            Box::new(move || {
                let mut count = 0;
                for d in 2..=d_max {
                    for d1 in divisors(d) {
                        for gamma in 0..d1 as i64 {
                            let dec = reversible_decomposition(d, d1, gamma, 0)
                                .map_err(|e| e.to_string())?;
                            if dec.trace_distance >= tol {
                                return Err(format!(
                                    "d={d} d1={d1} gamma={gamma}: trace distance {:e}",
                                    dec.trace_distance
                                ));
                            }
                            count += 1;
                        }
                    }
                }
                Ok(format!("{count} splits"))
            }),
        ),
    ];

    checks
        .into_iter()
        .map(|(name, f)| {
            let start = Instant::now();
            let outcome = f();
            let seconds = start.elapsed().as_secs_f64();
            match outcome {
                Ok(detail) => CheckResult {
                    name,
                    passed: true,
                    detail,
                    seconds,
                },
                Err(detail) => CheckResult {
                    name,
                    passed: false,
                    detail,
                    seconds,
                },
            }
        })
        .collect()
}

pub fn render(results: &[CheckResult]) -> String {
    let mut out = String::new();
    for r in results {
        out.push_str(&format!(
            "{:<4}  {:<40} {:>7.2}s  {}\n",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.seconds,
            r.detail
        ));
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    out.push_str(&format!(
        "{} passed, {} failed\n",
        results.len() - failed,
        failed
    ));
    out
}
