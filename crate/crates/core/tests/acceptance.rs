//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Tolerances and seeds are pinned below.

use std::collections::{BTreeMap, HashSet};
use std::process::ExitCode;
use std::time::Instant;

use dyck_entropy::asymptotics::{bridge_variance_exact, convergence_report, predicted_constants, variance_quadrature};
use dyck_entropy::counting::{
    dp_moments, exact_moment_closedform, gf_moment_series, tn_count, Method, MomentPair,
};
use dyck_entropy::matching::{count_optimal, decode_mth, is_optimal};
use dyck_entropy::oracle::{all_paths, brute_moment, verify_random_instances};
use dyck_entropy::rng::CounterRng;
use dyck_entropy::sampling::{mc_entropy_stats, sample_bridge, sample_path};
use dyck_entropy::{Ensemble, SignPath};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use statrs::distribution::{ChiSquared, ContinuousCDF};

const ENSEMBLES: [Ensemble; 2] = [Ensemble::Bridge, Ensemble::Excursion];

// criterion 1
const C1_INSTANCES: usize = 500;
const C1_TIE_TOL: f64 = 1e-9;
const C1_SEED: u64 = 0x0C1;

// criterion 2
const C2_MAX_ALL: usize = 6;
const C2_RANDOM_N: usize = 12;
const C2_RANDOM_COUNT: u64 = 100;
const C2_SEED: u64 = 0x0C2;

// criterion 3
const C3_BRUTE_MAX_N: usize = 8;
const C3_BRUTE_TOL: f64 = 1e-10;
const C3_CLOSED_MAX_N: usize = 60;
const C3_CLOSED_TOL: f64 = 1e-10;
const C3_GF_MAX_N: usize = 50;
const C3_GF_REL_TOL: f64 = 1e-8;

// criterion 4
const C4_SMALL_N: usize = 1_000;
const C4_LARGE_N: usize = 10_000;
const C4_TOL: f64 = 0.05;
const C4_RATIO: f64 = 3.0;

// criterion 5
const C5_SMALL_N: usize = 100;
const C5_LARGE_N: usize = 400;
const C5_TOL: f64 = 0.1;

// criterion 6
const C6_TOL: f64 = 1e-9;

// criterion 7
const C7_N: usize = 10_000;
const C7_SAMPLES: usize = 100_000;
const C7_SEED: u64 = 20_240_601;
const C7_MEAN_SLACK: f64 = 0.02;
const C7_SECOND_SLACK: f64 = 0.03;
const C7_KURTOSIS: (f64, f64) = (2.4, 3.0);

// criterion 8
const C8_SIZES: [usize; 3] = [2, 3, 4];
const C8_DRAWS: u64 = 100_000;
const C8_ALPHA: f64 = 1e-3;
const C8_SEED: u64 = 0x0C8;

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn criterion_1() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for n in 2..=7 {
        let report = verify_random_instances(n, C1_INSTANCES, C1_SEED + n as u64, C1_TIE_TOL).expect("verify");
        ok &= report.passed && report.checked == C1_INSTANCES;
        details.push(format!("N={n}: {} failures", report.failures.len()));
    }
    (ok, format!("{} instances per size; {}", C1_INSTANCES, details.join(", ")))
}

/// Decodes every index of one bridge; returns whether all `Z` matchings are
/// distinct and optimal.
fn decode_all(path: &SignPath) -> bool {
    let z = count_optimal(path).expect("bridge").count.to_u64().expect("small count");
    let mut seen = HashSet::new();
    for m in 1..=z {
        let matching = decode_mth(path, &BigUint::from(m)).expect("index in range");
        if !is_optimal(path, &matching).expect("sizes agree") {
            return false;
        }
        seen.insert(matching);
    }
    seen.len() as u64 == z
}

fn criterion_2() -> Outcome {
    let mut checked = 0usize;
    let mut bad = 0usize;
    for n in 0..=C2_MAX_ALL {
        for path in all_paths(n, Ensemble::Bridge) {
            checked += 1;
            bad += usize::from(!decode_all(&path));
        }
    }
    for i in 0..C2_RANDOM_COUNT {
        let path = sample_bridge(C2_RANDOM_N, &mut CounterRng::new(C2_SEED, i));
        checked += 1;
        bad += usize::from(!decode_all(&path));
    }
    (bad == 0, format!("{checked} bridges decoded, {bad} with duplicate or non-optimal matchings"))
}

fn criterion_3() -> Outcome {
    let mut ok = true;
    let mut worst = [0.0f64; 3];
    for ensemble in ENSEMBLES {
        let dp: Vec<MomentPair> = (0..=C3_CLOSED_MAX_N)
            .map(|n| dp_moments(n, ensemble).expect("dp"))
            .collect();
        for n in 0..=C3_BRUTE_MAX_N {
            for (k, dp_value) in [(1, dp[n].m1), (2, dp[n].m2)] {
                let err = (brute_moment(n, ensemble, k).expect("brute") - dp_value).abs();
                worst[0] = worst[0].max(err);
                ok &= err <= C3_BRUTE_TOL;
            }
        }
        for n in 0..=C3_CLOSED_MAX_N {
            for (k, dp_value) in [(1, dp[n].m1), (2, dp[n].m2)] {
                let cf = exact_moment_closedform(n, ensemble, k).expect("closed form").value;
                let err = (cf - dp_value).abs();
                worst[1] = worst[1].max(err);
                ok &= err <= C3_CLOSED_TOL;
            }
        }
        for k in 1..=2u32 {
            let series = gf_moment_series(ensemble, k, C3_GF_MAX_N).expect("series");
            for n in 0..=C3_GF_MAX_N {
                let total = tn_count(n, ensemble).to_f64().expect("finite count");
                let moment = if k == 1 { dp[n].m1 } else { dp[n].m2 };
                let expected = total * moment;
                let got = series.coeff(n);
                let rel = if expected == 0.0 {
                    got.abs()
                } else {
                    ((got - expected) / expected).abs()
                };
                worst[2] = worst[2].max(rel);
                ok &= rel <= C3_GF_REL_TOL;
            }
        }
    }
    (
        ok,
        format!(
            "max |brute-dp| = {:.2e}, max |closed-dp| = {:.2e}, max rel |gf-T*M| = {:.2e}",
            worst[0], worst[1], worst[2]
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    for ensemble in ENSEMBLES {
        let report = convergence_report(&[C4_SMALL_N, C4_LARGE_N], ensemble, 1, Method::Dp).expect("report");
        let (small, large) = (&report.rows[0], &report.rows[1]);
        let within = large.deviation.abs() <= C4_TOL;
        let decreasing = large.deviation.abs() < small.deviation.abs();
        let (a, b) = (small.normalized.abs(), large.normalized.abs());
        let stable = a.max(b) <= C4_RATIO * a.min(b);
        ok &= within && decreasing && stable;
        details.push(format!(
            "{ensemble}: <s>={:.6} dev(1e3)={:.5} dev(1e4)={:.5} normalized {:.4}/{:.4}",
            large.rescaled, small.deviation, large.deviation, small.normalized, large.normalized
        ));
    }
    (ok, details.join("; "))
}

fn criterion_5() -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    for ensemble in ENSEMBLES {
        let constant = predicted_constants(ensemble, 2).expect("constant");
        let dev = |n| {
            let r = exact_moment_closedform(n, ensemble, 2).expect("closed form");
            r.rescaled.expect("N > 0") - constant
        };
        let (small, large) = (dev(C5_SMALL_N), dev(C5_LARGE_N));
        ok &= large.abs() <= C5_TOL && large.abs() < small.abs();
        details.push(format!("{ensemble}: dev(100)={small:.5} dev(400)={large:.5}"));
    }
    (ok, details.join("; "))
}

fn criterion_6() -> Outcome {
    let q = variance_quadrature().expect("quadrature");
    let m1 = predicted_constants(Ensemble::Bridge, 1).expect("constant");
    let m2 = predicted_constants(Ensemble::Bridge, 2).expect("constant");
    let e1 = (q - bridge_variance_exact()).abs();
    let e2 = (q - (m2 - m1 * m1)).abs();
    (
        e1 <= C6_TOL && e2 <= C6_TOL,
        format!("integral = {q:.12}, |integral - (1/3 - pi^2/72)| = {e1:.1e}, |integral - var| = {e2:.1e}"),
    )
}

fn criterion_7() -> Outcome {
    let stats = mc_entropy_stats(C7_N, Ensemble::Excursion, C7_SAMPLES, C7_SEED, 200).expect("sampling");
    let mean_target = predicted_constants(Ensemble::Excursion, 1).expect("constant");
    let second_target = predicted_constants(Ensemble::Excursion, 2).expect("constant");
    let mean_ok = (stats.mean - mean_target).abs() <= 3.0 * stats.mean_se + C7_MEAN_SLACK;
    let second_ok = (stats.second_moment - second_target).abs() <= 3.0 * stats.second_moment_se + C7_SECOND_SLACK;
    let kurtosis_ok = (C7_KURTOSIS.0..=C7_KURTOSIS.1).contains(&stats.kurtosis);
    (
        mean_ok && second_ok && kurtosis_ok,
        format!(
            "mean = {:.5} ± {:.5} (target {:.5}), <s^2> = {:.5} ± {:.5} (target {:.5}), kurtosis = {:.4} ± {:.4}",
            stats.mean,
            stats.mean_se,
            mean_target,
            stats.second_moment,
            stats.second_moment_se,
            second_target,
            stats.kurtosis,
            stats.kurtosis_se
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    for ensemble in ENSEMBLES {
        for n in C8_SIZES {
            let mut counts: BTreeMap<SignPath, u64> = all_paths(n, ensemble).map(|p| (p, 0)).collect();
            let mut stray = 0u64;
            for i in 0..C8_DRAWS {
                let mut rng = CounterRng::new(C8_SEED + n as u64, i);
                match counts.get_mut(&sample_path(n, ensemble, &mut rng)) {
                    Some(c) => *c += 1,
                    None => stray += 1,
                }
            }
            let cells = counts.len() as f64;
            let expected = C8_DRAWS as f64 / cells;
            let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
            let p = 1.0 - ChiSquared::new(cells - 1.0).expect("df").cdf(chi2);
            ok &= stray == 0 && p > C8_ALPHA;
            details.push(format!("{ensemble} N={n}: chi2={chi2:.2} df={} p={p:.3}", cells - 1.0));
        }
    }
    (ok, details.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("characterization", criterion_1),
        ("decoder bijectivity", criterion_2),
        ("moment oracle chain", criterion_3),
        ("first-moment asymptotics", criterion_4),
        ("second-moment asymptotics", criterion_5),
        ("variance integral", criterion_6),
        ("Monte Carlo at N=10^4", criterion_7),
        ("sampler uniformity", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = run();
        failed += usize::from(!ok);
        println!(
            "criterion {} [{name}] {} ({:.1}s): {detail}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
