//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use irrev_core::measures::{
    self, ed_plus, epsilon_bruteforce, epsilon_min, gap_sweep, linspace, phi_nu, pure_entanglement,
    OptimizerConfig,
};
use irrev_core::qcore::{min_pt_eigenvalue, shannon_bits};
use irrev_core::symstates::{
    bell_basis, eb_map, isotropic_state, reversible_decomposition, rho_lambda, twirl_g,
    twirl_isotropic, BasisConvention,
};
use irrev_core::uncertainty::{
    dft, divisors, enumerate_minimizers, minimizer_profiles, ur_report, SUPPORT_TOL,
};
use irrev_core::{CMatrix, CVector, Complex64, ProbVector, Side};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(2024);
    r.set_stream(stream);
    r
}

fn random_lambda<R: Rng>(d: usize, rng: &mut R) -> ProbVector {
    let raw: Vec<f64> = (0..d).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = raw.iter().sum();
    ProbVector::new(raw.iter().map(|x| x / s).collect()).unwrap()
}

fn random_phase<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU)
}

/// Random unit vector supported on a random subset; moduli either Haar-like or flat.
fn sparse_vector<R: Rng>(d: usize, rng: &mut R) -> CVector {
    let s = rng.random_range(1..=d);
    let support = sample(rng, d, s);
    let flat = rng.random_bool(0.5);
    let mut entries = vec![Complex64::new(0.0, 0.0); d];
    for j in support.iter() {
        let modulus = if flat {
            1.0
        } else {
            -(1.0 - rng.random::<f64>()).ln()
        };
        entries[j] = random_phase(rng) * modulus.sqrt();
    }
    CVector::new(entries).normalized()
}

fn superpose(c: &CVector, basis: &[CVector]) -> CVector {
    let mut out = vec![Complex64::new(0.0, 0.0); basis[0].dim()];
    for (cl, psi) in c.entries().iter().zip(basis) {
        for (slot, z) in out.iter_mut().zip(psi.entries()) {
            *slot += cl * z;
        }
    }
    let (da, db) = basis[0].split().unwrap();
    CVector::new(out).with_split(da, db).unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn entropic_ur() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut worst = f64::INFINITY;
    for d in 2..=16 {
        for _ in 0..1000 {
            let c = CVector::random_unit(d, &mut r);
            worst = worst.min(ur_report(&c, SUPPORT_TOL).unwrap().deficit);
        }
    }
    let elapsed = start.elapsed();
    let ok = worst >= -1e-9 && elapsed < Duration::from_secs(10);
    (
        ok,
        format!(
            "min deficit {worst:.3e} over 15000 vectors in {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn support_ur() -> Outcome {
    let mut r = rng(1);
    let mut violations = 0;
    for d in 2..=16 {
        for _ in 0..1000 {
            let c = CVector::random_unit(d, &mut r);
            if !ur_report(&c, SUPPORT_TOL).unwrap().support_holds(d) {
                violations += 1;
            }
        }
    }
    (
        violations == 0,
        format!("{violations} violations over 15000 vectors"),
    )
}

fn minimizers() -> Outcome {
    let mut worst_deficit: f64 = 0.0;
    let mut total = 0;
    for d in 2..=16 {
        for m in enumerate_minimizers(d) {
            let rep = ur_report(&m.vector, SUPPORT_TOL).unwrap();
            if rep.support_c * rep.support_chat != d {
                return (
                    false,
                    format!(
                        "d={d} {:?}: support product {}",
                        m.spec,
                        rep.support_c * rep.support_chat
                    ),
                );
            }
            worst_deficit = worst_deficit.max(rep.deficit.abs());
            total += 1;
        }
    }
    if worst_deficit >= 1e-9 {
        return (false, format!("enumerated deficit {worst_deficit:e}"));
    }
    let mut r = rng(3);
    let mut hits = 0;
    let mut off_profile = 0;
    let mut farthest: f64 = 0.0;
    let mut witness = String::new();
    for d in 2..=6 {
        let profiles = minimizer_profiles(d);
        for i in 0..100_000 {
            let c = if i % 2 == 0 {
                CVector::random_unit(d, &mut r)
            } else {
                sparse_vector(d, &mut r)
            };
            let rep = ur_report(&c, SUPPORT_TOL).unwrap();
            if rep.deficit < 1e-3 {
                hits += 1;
                let moduli = c.moduli_sq();
                let nearest = profiles
                    .iter()
                    .map(|p| max_diff(p, &moduli))
                    .fold(f64::INFINITY, f64::min);
                if nearest >= 1e-6 {
                    off_profile += 1;
                    if nearest > farthest {
                        farthest = nearest;
                        witness = format!("d={d} deficit {:.3e} profile {moduli:?}", rep.deficit);
                    }
                }
            }
        }
    }
    let summary = format!(
        "{total} enumerated vectors, max |deficit| {worst_deficit:.1e}; {hits} search hits with deficit < 1e-3"
    );
    if off_profile > 0 {
        return (
            false,
            format!(
                "{summary}, {off_profile} farther than 1e-6 from every enumerated profile \
                 (largest distance {farthest:.3e}, at {witness})"
            ),
        );
    }
    (true, format!("{summary}, all on enumerated profiles"))
}

fn fourier_identity() -> Outcome {
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    for d in 2..=8 {
        let basis = bell_basis(BasisConvention::Column, d);
        for _ in 0..100 {
            let c = CVector::random_unit(d, &mut r);
            let e = pure_entanglement(&superpose(&c, &basis)).unwrap();
            worst = worst.max((e - shannon_bits(&dft(&c).moduli_sq())).abs());
        }
    }
    (worst < 1e-9, format!("max |E - S(|c^|^2)| = {worst:.2e}"))
}

fn twirl_contract() -> Outcome {
    let mut r = rng(5);
    let mut worst: f64 = 0.0;
    for d in 2..=8 {
        for conv in [BasisConvention::Column, BasisConvention::Row] {
            let basis = bell_basis(conv, d);
            for _ in 0..3 {
                let c = CVector::random_unit(d, &mut r);
                let t = twirl_g(&superpose(&c, &basis).projector()).unwrap();
                let target = rho_lambda(&ProbVector::new(c.moduli_sq()).unwrap(), conv);
                worst = worst.max(t.max_abs_diff(&target));
            }
        }
        let rho = CMatrix::random_density(d * d, &mut r)
            .with_split(d, d)
            .unwrap();
        let once = twirl_g(&rho).unwrap();
        let twice = twirl_g(&once).unwrap();
        worst = worst.max(once.max_abs_diff(&twice));
        worst = worst.max((once.trace() - rho.trace()).norm());
    }
    (
        worst < 1e-10,
        format!("max deviation {worst:.2e} for d=2..=8"),
    )
}

fn eb_map_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut min_pt = f64::INFINITY;
    for d in 2..=8 {
        let m = eb_map(d);
        for row in 0..d {
            for col in 0..d {
                let x = CMatrix::unit(d, row, col);
                worst = worst.max(
                    m.apply(&x)
                        .unwrap()
                        .max_abs_diff(&m.apply_via_isometry(&x).unwrap()),
                );
            }
        }
        min_pt = min_pt.min(min_pt_eigenvalue(&m.choi(), Side::B).unwrap());
    }
    (
        worst < 1e-10 && min_pt > -1e-10,
        format!("max deviation {worst:.2e}, min Choi PT eigenvalue {min_pt:.2e}"),
    )
}

fn chain() -> Outcome {
    let cfg = OptimizerConfig::default();
    let mut r = rng(7);
    let mut worst_lower: f64 = 0.0;
    for d in 2..=5 {
        for _ in 0..200 {
            let l = random_lambda(d, &mut r);
            let e = epsilon_min(&l, &cfg).unwrap().value;
            worst_lower = worst_lower.max(ed_plus(&l) - e);
        }
    }
    if worst_lower > 1e-6 {
        return (false, format!("ed_plus exceeds epsilon by {worst_lower:e}"));
    }
    let mut worst_eq: f64 = 0.0;
    for d in 2..=5 {
        for p in minimizer_profiles(d) {
            let l = ProbVector::new(p).unwrap();
            worst_eq = worst_eq.max((epsilon_min(&l, &cfg).unwrap().value - ed_plus(&l)).abs());
        }
    }
    if worst_eq >= 1e-6 {
        return (false, format!("minimizer equality off by {worst_eq:e}"));
    }
    let mut gaps = Vec::new();
    for (values, grid) in [(vec![0.75, 0.25], 720), (vec![0.6, 0.3, 0.1], 120)] {
        let l = ProbVector::new(values).unwrap();
        let e = epsilon_min(&l, &cfg).unwrap().value;
        let oracle = epsilon_bruteforce(&l, grid).unwrap();
        let gap = e - ed_plus(&l);
        if gap <= 1e-3 || (e - oracle).abs() >= 1e-3 {
            return (
                false,
                format!(
                    "lambda={:?}: gap {gap:.3e}, eps {e} vs grid {oracle}",
                    l.values()
                ),
            );
        }
        gaps.push(format!("{gap:.4} (oracle diff {:.1e})", (e - oracle).abs()));
    }
    (
        true,
        format!(
            "lower bound slack {worst_lower:.1e}, equality {worst_eq:.1e}, strict gaps {}",
            gaps.join(", ")
        ),
    )
}

fn endpoints(points: &[measures::GapPoint]) -> Option<String> {
    let first = points.first()?;
    let last = points.last()?;
    if last.gap.abs() > 1e-9 {
        return Some(format!("gap at nu=1 is {:e}", last.gap));
    }
    if first.ed_plus.abs() > 1e-9 || first.co_epsilon.abs() > 1e-9 || first.gap.abs() > 1e-9 {
        return Some(format!("nu=0 point not zero: {first:?}"));
    }
    None
}

fn fraction_sweep() -> Outcome {
    let cfg = OptimizerConfig::default();
    let mut grid = vec![0.0];
    grid.extend(linspace(0.01, 0.99, 198));
    grid.push(1.0);

    let start = Instant::now();
    let pts = gap_sweep(2, &grid, &cfg).unwrap();
    let t2 = start.elapsed();
    let rel = |nu: f64| {
        pts.iter()
            .find(|p| (p.nu - nu).abs() < 1e-12)
            .unwrap()
            .relative_gap
    };
    let (low, high) = (rel(0.01), rel(0.99));

    let start = Instant::now();
    let pts10 = gap_sweep(10, &grid, &cfg).unwrap();
    let t10 = start.elapsed();

    let mut problems = Vec::new();
    if t2 >= Duration::from_secs(60) {
        problems.push("d=2 sweep too slow".to_string());
    }
    if low <= 0.9 {
        problems.push(format!("relative_gap(0.01) = {low:.4} not > 0.9"));
    }
    if high >= 0.1 {
        problems.push(format!("relative_gap(0.99) = {high:.4} not < 0.1"));
    }
    problems.extend(endpoints(&pts).map(|e| format!("d=2 {e}")));
    if t10 >= Duration::from_secs(600) {
        problems.push("d=10 sweep too slow".to_string());
    }
    problems.extend(endpoints(&pts10).map(|e| format!("d=10 {e}")));

    let detail = format!(
        "d=2: {} points in {:.2}s, relative_gap(0.01)={low:.4}, relative_gap(0.99)={high:.4}; d=10: {} points in {:.1}s",
        pts.len(),
        t2.as_secs_f64(),
        pts10.len(),
        t10.as_secs_f64()
    );
    if problems.is_empty() {
        (true, detail)
    } else {
        (false, format!("{detail}; {}", problems.join("; ")))
    }
}

fn reversible_cases() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for d in [4usize, 6] {
        for d1 in divisors(d) {
            let d2 = d / d1;
            for gamma in 0..d1 as i64 {
                for beta in 0..d2 as i64 {
                    let dec = reversible_decomposition(d, d1, gamma, beta).unwrap();
                    worst = worst.max(dec.trace_distance);
                    count += 1;
                }
            }
        }
    }
    (
        worst < 1e-9,
        format!("{count} cases, max trace distance {worst:.2e}"),
    )
}

fn isotropic_consistency() -> Outcome {
    let cfg = OptimizerConfig::default();
    let mut worst_bound = f64::NEG_INFINITY;
    let mut worst_twirl: f64 = 0.0;
    for d in [2usize, 3] {
        for nu in linspace(0.0, 1.0, 50) {
            let l = ProbVector::isotropic_slice(d, nu).unwrap();
            let e = epsilon_min(&l, &cfg).unwrap().value;
            let phi = phi_nu(nu, d).unwrap();
            worst_bound = worst_bound.max(e - phi.entanglement);
            let t = twirl_isotropic(&rho_lambda(&l, BasisConvention::Column)).unwrap();
            let sigma = isotropic_state(nu + (1.0 - nu) / d as f64, d).unwrap();
            worst_twirl = worst_twirl.max(t.max_abs_diff(&sigma));
        }
    }
    (
        worst_bound <= 1e-6 && worst_twirl < 1e-10,
        format!("max eps - E(phi) = {worst_bound:.2e}, max twirl deviation {worst_twirl:.2e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("entropic uncertainty", entropic_ur),
        ("support uncertainty", support_ur),
        ("minimizer completeness and soundness", minimizers),
        ("Fourier entropy identity", fourier_identity),
        ("twirl contract", twirl_contract),
        ("entanglement-breaking map", eb_map_equivalence),
        ("chain of bounds", chain),
        ("undistillable fraction sweep", fraction_sweep),
        ("reversible decomposition", reversible_cases),
        ("isotropic consistency", isotropic_consistency),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = check();
        println!(
            "{} {:>2} {name}: {detail}",
            if ok { "PASS" } else { "FAIL" },
            i + 1
        );
        if !ok {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
