//! End-to-end acceptance checks. Runs as a plain binary and prints one
//! PASS/FAIL line per criterion; exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::Instant;

use coherent_gram::closure::{
    approximate_block_diagonal, block_diagonal, displacement_for_epsilon, overlap_distance_bounds, ClosureReason,
    ClosureVerdict,
};
use coherent_gram::edm::{edm_necessary_check, hadamard_exp_edm_witness};
use coherent_gram::generators::{equiangular_gram, mub_gram, random_edm, random_ensemble, RandomSpec};
use coherent_gram::hadamard::hadamard_log;
use coherent_gram::io::{parse_ensemble, to_json, MatrixFile};
use coherent_gram::membership::{
    delta_min_abs, enumerate_n_candidates, phase_corrected_log, q_psd_projected, NotMemberReason,
};
use coherent_gram::types::{coherent_overlap, rearrange, ComplexMatrix, Permutation};
use coherent_gram::{
    check_closure_membership, check_membership, check_membership_real_positive, gram_of_ensemble, linalg, BranchSpec,
    Centering, ClosureOptions, GramMatrix, MembershipOptions,
};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn unlimited(centering: Centering) -> MembershipOptions {
    MembershipOptions {
        centering,
        max_candidates: u64::MAX,
    }
}

/// The fixed sample behind the round-trip and rank criteria. Component
/// scales range up to 2 but are capped at `2 / sqrt(2m)`, which keeps every
/// amplitude norm at most 2 and every overlap at least `e^-8`.
fn round_trip_specs() -> Vec<RandomSpec> {
    (0..200u64)
        .map(|k| {
            let n = 1 + (k % 5) as usize;
            let m = 1 + ((k / 5) % 4) as usize;
            let cap = 2.0 / ((2 * m) as f64).sqrt();
            let scale = (0.25 + 1.75 * ((k % 8) as f64 / 7.0)).min(cap);
            RandomSpec {
                seed: 0x5eed_0000 + k,
                n,
                m,
                scale,
            }
        })
        .collect()
}

fn round_trip_soundness() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for spec in round_trip_specs() {
        let p = gram_of_ensemble(&random_ensemble(&spec).unwrap());
        let r = check_membership(&p, &BranchSpec::default(), &unlimited(Centering::FirstState))
            .map_err(|e| format!("{spec:?}: {e}"))?;
        let w = r
            .witness()
            .ok_or_else(|| format!("{spec:?}: not a member ({:?})", r.reason()))?;
        let err = linalg::max_abs_diff(gram_of_ensemble(&w.ensemble).matrix(), p.matrix());
        ensure(err <= 1e-8, || format!("{spec:?}: round-trip error {err:e}"))?;
        worst = worst.max(err);
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs <= 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!(
        "200/200 members, worst round-trip error {worst:.2e}, {secs:.2} s"
    ))
}

fn equiangular_members() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in 2..=6 {
        for r in [0.1, 0.5, 0.9, 1.0] {
            let p = equiangular_gram(n, r).unwrap();
            let res = check_membership(&p, &BranchSpec::default(), &unlimited(Centering::FirstState))
                .map_err(|e| e.to_string())?;
            let w = res.witness().ok_or_else(|| format!("n={n} r={r}: not a member"))?;
            let s = w.ensemble.states();
            for i in 0..n {
                for j in 0..i {
                    let d = (&s[i].amplitude - &s[j].amplitude).norm_squared();
                    worst = worst.max((d - 2.0 * (1.0 / r).ln()).abs());
                }
            }
            count += 1;
        }
    }
    ensure(worst <= 1e-8, || format!("distance deviation {worst:e}"))?;
    Ok(format!("{count}/20 members, worst distance deviation {worst:.2e}"))
}

fn counterexample() -> Outcome {
    let p = equiangular_gram(3, -0.5).unwrap();
    let res = check_membership(&p, &BranchSpec::default(), &MembershipOptions::default()).map_err(|e| e.to_string())?;
    let Some(NotMemberReason::Exhausted { candidates }) = res.reason() else {
        return Err(format!("expected Exhausted, got {:?}", res.verdict));
    };
    let necessary = edm_necessary_check(&p, &BranchSpec::default()).map_err(|e| e.to_string())?;
    ensure(necessary, || "log-modulus matrix should pass the distance test".into())?;
    Ok(format!(
        "not a member after {candidates} candidates; necessary condition holds"
    ))
}

fn exponential_of_edm() -> Outcome {
    let mut lowest = f64::INFINITY;
    let mut worst: f64 = 0.0;
    for k in 0..200u64 {
        let n = 1 + (k % 8) as usize;
        let dim = 1 + ((k / 8) % 4) as usize;
        let d = random_edm(0xed_0000 + k, n, dim, 1.0).unwrap();
        let exp = ComplexMatrix::from_fn(n, n, |i, j| Complex64::new(d.matrix()[(i, j)].exp(), 0.0));
        let lo = linalg::min_eigenvalue(&exp);
        ensure(lo >= -1e-9, || format!("sample {k}: min eigenvalue {lo:e}"))?;
        let w = hadamard_exp_edm_witness(&d).map_err(|e| e.to_string())?;
        let err = linalg::max_abs_diff(gram_of_ensemble(&w).matrix(), &exp);
        ensure(err <= 1e-8, || format!("sample {k}: witness error {err:e}"))?;
        lowest = lowest.min(lo);
        worst = worst.max(err);
    }
    Ok(format!(
        "200/200 PSD (lowest eigenvalue {lowest:.2e}), worst witness error {worst:.2e}"
    ))
}

/// Real positive PSD unit-diagonal matrices: even samples come from real
/// point configurations (realizable), odd samples from unit vectors in the
/// positive orthant (usually not).
fn real_positive_sample(k: u64) -> GramMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9051_0000 + k);
    let n = 2 + (k % 3) as usize;
    let m = if k.is_multiple_of(2) {
        let pts = DMatrix::from_fn(3, n, |_, _| 1.2 * (2.0 * rng.random::<f64>() - 1.0));
        DMatrix::from_fn(n, n, |i, j| {
            (-0.5 * (pts.column(i) - pts.column(j)).norm_squared()).exp()
        })
    } else {
        let mut v = DMatrix::from_fn(4, n, |_, _| 0.05 + rng.random::<f64>());
        for mut col in v.column_iter_mut() {
            let norm = col.norm();
            col /= norm;
        }
        let g = v.transpose() * &v;
        DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { g[(i, j)] })
    };
    GramMatrix::from_raw(m.map(|x| Complex64::new(x, 0.0))).unwrap()
}

fn real_positive_agreement() -> Outcome {
    let (mut agree, mut members) = (0, 0);
    for k in 0..100u64 {
        let p = real_positive_sample(k);
        let fast =
            check_membership_real_positive(&p, &BranchSpec::default()).map_err(|e| format!("sample {k}: {e}"))?;
        let general = check_membership(&p, &BranchSpec::default(), &unlimited(Centering::FirstState))
            .map_err(|e| format!("sample {k}: {e}"))?;
        ensure(fast.is_member() == general.is_member(), || {
            format!(
                "sample {k}: fast {} vs general {}",
                fast.is_member(),
                general.is_member()
            )
        })?;
        agree += 1;
        members += usize::from(fast.is_member());
    }
    ensure(members > 0 && members < 100, || {
        format!("degenerate sample: {members} members")
    })?;
    Ok(format!(
        "{agree}/100 agree ({members} members, {} non-members)",
        100 - members
    ))
}

fn rank_bound() -> Outcome {
    let mut checked = 0;
    for spec in round_trip_specs() {
        let p = gram_of_ensemble(&random_ensemble(&spec).unwrap());
        let res =
            check_membership(&p, &BranchSpec::default(), &unlimited(Centering::Mean)).map_err(|e| e.to_string())?;
        let w = res.witness().ok_or_else(|| format!("{spec:?}: not a member"))?;
        let amps = DMatrix::from_columns(
            &w.ensemble
                .states()
                .iter()
                .map(|s| s.amplitude.clone())
                .collect::<Vec<_>>(),
        );
        let x = amps.adjoint() * &amps;
        let above = linalg::hermitian_eigenvalues(&x)
            .iter()
            .filter(|&&v| v > res.tol_eig)
            .count();
        ensure(above < spec.n, || {
            format!("{spec:?}: {above} eigenvalues above tolerance")
        })?;
        checked += 1;
    }
    Ok(format!("{checked}/200 mean-centered witnesses have rank <= n - 1"))
}

fn closure_structure() -> Outcome {
    let branch = BranchSpec::default();
    let opts = ClosureOptions {
        membership: unlimited(Centering::FirstState),
        ..ClosureOptions::default()
    };
    for n in 2..=6 {
        let id = GramMatrix::from_raw(ComplexMatrix::identity(n, n)).unwrap();
        let c = check_closure_membership(&id, &branch, &opts).map_err(|e| e.to_string())?;
        ensure(c.is_member(), || format!("identity {n}: not in closure"))?;
        let m = check_membership(&id, &branch, &MembershipOptions::default()).map_err(|e| e.to_string())?;
        ensure(matches!(m.reason(), Some(NotMemberReason::ZeroEntry { .. })), || {
            format!("identity {n}: {:?}", m.verdict)
        })?;
    }
    for k in 0..20u64 {
        let n1 = 1 + (k % 3) as usize;
        let n2 = 1 + ((k / 3) % 3) as usize;
        let b1 = random_ensemble(&RandomSpec {
            seed: 0xb10c_0000 + k,
            n: n1,
            m: 2,
            scale: 1.0,
        })
        .unwrap();
        let b2 = random_ensemble(&RandomSpec {
            seed: 0xb10c_1000 + k,
            n: n2,
            m: 3,
            scale: 1.0,
        })
        .unwrap();
        let target = block_diagonal(&[gram_of_ensemble(&b1), gram_of_ensemble(&b2)]).unwrap();
        let mut image: Vec<usize> = (0..n1 + n2).collect();
        image.shuffle(&mut ChaCha8Rng::seed_from_u64(k));
        let shuffled = rearrange(&target, &Permutation::new(image).unwrap()).unwrap();
        let c = check_closure_membership(&shuffled, &branch, &opts).map_err(|e| e.to_string())?;
        let ClosureVerdict::Member { blocks, .. } = &c.verdict else {
            return Err(format!("block sample {k}: {:?}", c.verdict));
        };
        let mut sizes: Vec<usize> = blocks.iter().map(|b| b.indices.len()).collect();
        sizes.sort_unstable();
        let mut expected = vec![n1, n2];
        expected.sort_unstable();
        ensure(sizes == expected, || {
            format!("block sample {k}: sizes {sizes:?}, expected {expected:?}")
        })?;

        let blocks = [b1, b2];
        for eps in [1e-2, 1e-6, 1e-10] {
            let a = displacement_for_epsilon(eps).unwrap();
            let approx = approximate_block_diagonal(&blocks, a).unwrap();
            let err = linalg::max_abs_diff(gram_of_ensemble(&approx).matrix(), target.matrix());
            ensure(err <= eps, || {
                format!("block sample {k}: eps {eps:e} gave error {err:e}")
            })?;
        }
    }
    Ok("identity 2..6 in closure only; 20/20 shuffled block sizes recovered; all approximations within eps".into())
}

fn mub_not_in_closure() -> Outcome {
    let mut triples = Vec::new();
    for n in [2, 3] {
        let p = mub_gram(n).unwrap();
        let c = check_closure_membership(&p, &BranchSpec::default(), &ClosureOptions::default())
            .map_err(|e| e.to_string())?;
        let Some(&ClosureReason::InconsistentZeroPattern { i, j, k }) = c.reason() else {
            return Err(format!("n={n}: {:?}", c.verdict));
        };
        ensure(
            p.get(i, j).norm() <= 1e-10 && p.get(i, k).norm() > 1e-10 && p.get(k, j).norm() > 1e-10,
            || format!("n={n}: triple ({i},{j},{k}) does not violate transitivity"),
        )?;
        triples.push((i, j, k));
    }
    Ok(format!("both rejected; witness triples (i, j, k) = {triples:?}"))
}

fn distance_bounds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e33a3);
    for t in 0..500 {
        let m = rng.random_range(1..=4);
        let scale = rng.random_range(0.1..2.0);
        let e = random_ensemble(&RandomSpec {
            seed: rng.random(),
            n: 3,
            m,
            scale,
        })
        .unwrap();
        let s = e.states();
        let p_ab = coherent_overlap(&s[0], &s[1]).unwrap().norm();
        let p_ag = coherent_overlap(&s[0], &s[2]).unwrap().norm();
        let (lo, hi) = overlap_distance_bounds(p_ab, p_ag).map_err(|e| e.to_string())?;
        let d = (&s[1].amplitude - &s[2].amplitude).norm();
        ensure(lo - 1e-9 <= d && d <= hi + 1e-9, || {
            format!("triple {t}: {d} outside [{lo}, {hi}]")
        })?;
    }
    Ok("500/500 distances inside the overlap bounds".into())
}

fn random_zero_sum(rng: &mut ChaCha8Rng, n: usize) -> DVector<Complex64> {
    let y = DVector::from_fn(n, |_, _| {
        Complex64::new(2.0 * rng.random::<f64>() - 1.0, 2.0 * rng.random::<f64>() - 1.0)
    });
    let mean = y.sum() / n as f64;
    y.map(|z| z - mean)
}

fn projection_consistency() -> Outcome {
    let (mut feasible, mut infeasible) = (0, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e77a1);
    let mut seed = 0xc0ffee_u64;
    while feasible < 100 || infeasible < 100 {
        seed += 1;
        let n = 2 + (seed % 4) as usize;
        let p = gram_of_ensemble(
            &random_ensemble(&RandomSpec {
                seed,
                n,
                m: 2,
                scale: 0.9,
            })
            .unwrap(),
        );
        let res = check_membership(&p, &BranchSpec::default(), &unlimited(Centering::FirstState))
            .map_err(|e| e.to_string())?;
        let w = res.witness().ok_or("sampled Gram matrix rejected")?;
        let branch = BranchSpec {
            tol_eig: Some(res.tol_eig),
            ..BranchSpec::with_beta(res.branch_beta)
        };
        let l = hadamard_log(p.matrix(), &branch).unwrap();
        let e1 = Centering::FirstState.vector(n).unwrap();
        let mean = Centering::Mean.vector(n).unwrap();

        let q = phase_corrected_log(&l.matrix, &w.n_matrix);
        if feasible < 100 {
            let (a, b) = (
                q_psd_projected(&q, &e1, &branch).unwrap(),
                q_psd_projected(&q, &mean, &branch).unwrap(),
            );
            ensure(a && b, || format!("seed {seed}: feasible Q judged ({a}, {b})"))?;
            for _ in 0..100 {
                let y = random_zero_sum(&mut rng, n);
                let form = y.dotc(&(&q * &y)).re;
                ensure(form >= -res.tol_eig * y.norm_squared(), || {
                    format!("seed {seed}: y'Qy = {form:e}")
                })?;
            }
            feasible += 1;
        }
        if infeasible < 100 {
            // the first candidate in canonical order that differs from the winner
            let wrong = enumerate_n_candidates(&l, delta_min_abs(&p))
                .unwrap()
                .find(|c| c != &w.n_matrix);
            if let Some(wrong) = wrong {
                let q = phase_corrected_log(&l.matrix, &wrong);
                let (a, b) = (
                    q_psd_projected(&q, &e1, &branch).unwrap(),
                    q_psd_projected(&q, &mean, &branch).unwrap(),
                );
                ensure(a == b, || format!("seed {seed}: statements disagree ({a}, {b})"))?;
                if !a {
                    infeasible += 1;
                }
            }
        }
    }
    Ok("100 feasible and 100 infeasible Q: both centerings agree; zero-sum forms nonnegative".into())
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let e = random_ensemble(&RandomSpec {
        seed: 99,
        n: 4,
        m: 3,
        scale: 1.0,
    })
    .unwrap();
    let path = dir.path().join("p.json");
    std::fs::write(&path, to_json(&MatrixFile::from_complex(gram_of_ensemble(&e).matrix())))
        .map_err(|e| e.to_string())?;
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_coherent-gram"))
            .args(["check", path.to_str().unwrap(), "--max-candidates", "100000000"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.code() == Some(0), || {
        format!("exit {:?}: {}", a.status.code(), String::from_utf8_lossy(&a.stderr))
    })?;
    ensure(a.stdout == b.stdout, || "reports differ".into())?;
    let report: serde_json::Value = serde_json::from_slice(&a.stdout).map_err(|e| e.to_string())?;
    ensure(report["n_matrix"].is_array(), || {
        "report lacks the winding matrix".into()
    })?;
    let witness = parse_ensemble(&report["witness"].to_string()).map_err(|e| e.to_string())?;
    let err = linalg::max_abs_diff(gram_of_ensemble(&witness).matrix(), gram_of_ensemble(&e).matrix());
    ensure(err <= 1e-8, || format!("witness round trip {err:e}"))?;
    Ok(format!("two runs byte-identical ({} bytes)", a.stdout.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("1 round-trip soundness", round_trip_soundness),
        ("2 equiangular members", equiangular_members),
        ("3 negative equiangular counterexample", counterexample),
        ("4 exponential of distance matrices", exponential_of_edm),
        ("5 real-positive fast path agreement", real_positive_agreement),
        ("6 mean-centered rank bound", rank_bound),
        ("7 closure and block approximation", closure_structure),
        ("8 mutually unbiased bases outside closure", mub_not_in_closure),
        ("9 overlap distance bounds", distance_bounds),
        ("10 centering consistency", projection_consistency),
        ("11 report determinism", cli_determinism),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    println!(
        "{} of {} acceptance criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
