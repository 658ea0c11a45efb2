//! Limiting constants of the rescaled entropy and their numerical checks.
//!
//! With `S = ½ N log N + N s + o(N)` the first two moments of `s` converge to
//!
//! * bridges: `⟨s⟩ = -(γ + 2)/2`, `⟨s²⟩ = 4/3 + γ²/4 + γ - π²/72`
//! * excursions: `⟨s⟩ = -γ/2`, `⟨s²⟩ = γ²/4 + 5π²/24 - 2`
//!
//! with corrections `O(log N / √N)` and `O(log² N / √N)`. The bridge variance
//! `1/3 - π²/72` also has an integral representation, evaluated here by
//! adaptive Gauss–Kronrod quadrature.

#![allow(clippy::excessive_precision)]

use serde::Serialize;

use crate::counting::{check_order, exact_moment, Method};
use crate::error::{Error, Result};
use crate::paths::Ensemble;

/// Euler–Mascheroni constant to 20 significant digits.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;

/// `⟨s^k⟩` in the large-`N` limit.
pub fn predicted_constants(ensemble: Ensemble, k: u32) -> Result<f64> {
    check_order(k)?;
    let g = EULER_GAMMA;
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    Ok(match (ensemble, k) {
        (Ensemble::Bridge, 1) => -(g + 2.0) / 2.0,
        (Ensemble::Excursion, 1) => -g / 2.0,
        (Ensemble::Bridge, _) => 4.0 / 3.0 + g * g / 4.0 + g - pi2 / 72.0,
        (Ensemble::Excursion, _) => g * g / 4.0 + 5.0 * pi2 / 24.0 - 2.0,
    })
}

/// `1/3 - π²/72`, the limiting variance of `s` over bridges.
pub fn bridge_variance_exact() -> f64 {
    1.0 / 3.0 - std::f64::consts::PI * std::f64::consts::PI / 72.0
}

/// One term `coefficient · N^n_power · (log N)^log_power`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Term {
    pub coefficient: f64,
    pub n_power: u32,
    pub log_power: u32,
}

/// Large-`N` form of `M_{N,k} = ⟨S^k⟩`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prediction {
    pub ensemble: Ensemble,
    pub k: u32,
    /// Terms of the expansion of `M_{N,k}`, leading first.
    pub terms: Vec<Term>,
    /// Limit of `⟨s^k⟩`.
    pub constant: f64,
    /// Rate at which `⟨s^k⟩` approaches the constant.
    pub error_rate: &'static str,
}

pub fn prediction(ensemble: Ensemble, k: u32) -> Result<Prediction> {
    let c1 = predicted_constants(ensemble, 1)?;
    let constant = predicted_constants(ensemble, k)?;
    let term = |coefficient, n_power, log_power| Term {
        coefficient,
        n_power,
        log_power,
    };
    let (terms, error_rate) = if k == 1 {
        (vec![term(0.5, 1, 1), term(c1, 1, 0)], "log N / sqrt(N)")
    } else {
        (
            vec![term(0.25, 2, 2), term(c1, 2, 1), term(constant, 2, 0)],
            "(log N)^2 / sqrt(N)",
        )
    };
    Ok(Prediction {
        ensemble,
        k,
        terms,
        constant,
        error_rate,
    })
}

impl Prediction {
    pub fn evaluate(&self, n: usize) -> f64 {
        let nf = n as f64;
        let log = if n > 0 { nf.ln() } else { 0.0 };
        self.terms
            .iter()
            .map(|t| t.coefficient * nf.powi(t.n_power as i32) * log.powi(t.log_power as i32))
            .sum()
    }
}

/// The truncated large-`N` expansion of `M_{N,k}`.
pub fn predicted_moment(n: usize, ensemble: Ensemble, k: u32) -> Result<f64> {
    Ok(prediction(ensemble, k)?.evaluate(n))
}

/// Kernel `-(2(1-z) + (1+z) log z) / (1-z)³` of the variance integral.
pub fn variance_kernel(z: f64) -> f64 {
    let u = 1.0 - z;
    if u < 0.1 {
        // Σ_{n≥3} (n-2) / (n(n-1)) u^{n-3}, summed from the tail
        let mut acc = 0.0;
        for n in (3..=24u32).rev() {
            let nf = f64::from(n);
            acc = acc * u + (nf - 2.0) / (nf * (nf - 1.0));
        }
        acc
    } else {
        -(2.0 * u + (1.0 + z) * z.ln()) / (u * u * u)
    }
}

fn variance_integrand(z: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    let a = z.min(1.0).sqrt().asin();
    variance_kernel(z) * a * a
}

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_639,
    0.949_107_912_342_758_525,
    0.864_864_423_359_769_073,
    0.741_531_185_599_394_440,
    0.586_087_235_467_691_130,
    0.405_845_151_377_397_167,
    0.207_784_955_007_898_468,
    0.0,
];

const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_553,
    0.104_790_010_322_250_184,
    0.140_653_259_715_525_919,
    0.169_004_726_639_267_903,
    0.190_350_578_064_785_410,
    0.204_432_940_075_298_892,
    0.209_482_141_084_727_828,
];

/// Gauss weights of the 7-point rule, on Kronrod nodes 1, 3, 5 and 7.
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_693,
    0.279_705_391_489_276_668,
    0.381_830_050_505_118_945,
    0.417_959_183_673_469_388,
];

/// 15-point Kronrod estimate and its difference from the embedded 7-point
/// Gauss estimate.
fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = KRONROD_WEIGHTS[7] * fc;
    let mut gauss = GAUSS_WEIGHTS[3] * fc;
    for i in 0..7 {
        let dx = half * KRONROD_NODES[i];
        let pair = f(center - dx) + f(center + dx);
        kronrod += KRONROD_WEIGHTS[i] * pair;
        if i % 2 == 1 {
            gauss += GAUSS_WEIGHTS[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Outcome of an adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    pub intervals: usize,
}

/// Adaptive Gauss–Kronrod (7, 15) quadrature: the interval with the largest
/// error estimate is bisected until the total estimate is below `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, max_intervals: usize) -> Result<Quadrature> {
    let (v, e) = gauss_kronrod(&f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    loop {
        let error: f64 = intervals.iter().map(|iv| iv.3).sum();
        if error <= tol {
            let value = intervals.iter().map(|iv| iv.2).sum();
            return Ok(Quadrature {
                value,
                error_estimate: error,
                intervals: intervals.len(),
            });
        }
        if intervals.len() >= max_intervals {
            return Err(Error::QuadratureNonConvergence {
                error,
                intervals: intervals.len(),
            });
        }
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("at least one interval");
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        for (l, h) in [(lo, mid), (mid, hi)] {
            let (v, e) = gauss_kronrod(&f, l, h);
            intervals.push((l, h, v, e));
        }
    }
}

/// Target absolute error of [`variance_quadrature`].
pub const VARIANCE_QUADRATURE_TOL: f64 = 1e-11;

/// `∫₀¹ K(z) arcsin²(√z) dz` with `K` the [`variance_kernel`].
pub fn variance_quadrature() -> Result<f64> {
    integrate(variance_integrand, 0.0, 1.0, VARIANCE_QUADRATURE_TOL, 10_000).map(|q| q.value)
}

/// One size of a convergence table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub rescaled: f64,
    pub predicted: f64,
    pub deviation: f64,
    /// Deviation divided by the expected rate.
    pub normalized: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub ensemble: Ensemble,
    pub k: u32,
    pub method: Method,
    pub rows: Vec<ConvergenceRow>,
    /// Set when the normalized deviation varies by more than
    /// [`CONVERGENCE_FLAG_RATIO`] over the top decade of sizes.
    pub flagged: bool,
}

pub const CONVERGENCE_FLAG_RATIO: f64 = 10.0;

/// `log N / √N` for `k = 1`, `log² N / √N` for `k = 2`.
pub fn convergence_rate(n: usize, k: u32) -> f64 {
    let nf = n as f64;
    nf.ln().powi(k as i32) / nf.sqrt()
}

/// Exact rescaled moments at each size against the limiting constant.
pub fn convergence_report(ns: &[usize], ensemble: Ensemble, k: u32, method: Method) -> Result<ConvergenceReport> {
    let predicted = predicted_constants(ensemble, k)?;
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("sizes must be strictly increasing".into()));
    }
    if ns.first().is_some_and(|&n| n < 2) {
        return Err(Error::InvalidArgument("sizes must be at least 2".into()));
    }
    let rows = ns
        .iter()
        .map(|&n| {
            let result = exact_moment(n, ensemble, k, method)?;
            let rescaled = result.rescaled.expect("N >= 2");
            let deviation = rescaled - predicted;
            Ok(ConvergenceRow {
                n,
                rescaled,
                predicted,
                deviation,
                normalized: deviation / convergence_rate(n, k),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let flagged = match rows.last() {
        Some(last) if rows.len() > 1 => {
            let top: Vec<f64> = rows
                .iter()
                .filter(|r| 10 * r.n >= last.n)
                .map(|r| r.normalized.abs())
                .collect();
            let max = top.iter().copied().fold(0.0, f64::max);
            let min = top.iter().copied().fold(f64::INFINITY, f64::min);
            top.len() > 1 && max > CONVERGENCE_FLAG_RATIO * min
        }
        _ => false,
    };
    Ok(ConvergenceReport {
        ensemble,
        k,
        method,
        rows,
        flagged,
    })
}
