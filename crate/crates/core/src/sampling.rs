//! Uniform random bridges and excursions, and Monte Carlo statistics of the
//! rescaled entropy `s = (S - ½ N log N) / N`.
//!
//! Bridges are uniform shuffles of `N` up and `N` down steps. Excursions use
//! the cycle lemma: among the `2N + 1` rotations of a shuffled sequence of
//! `N + 1` ups and `N` downs exactly one has all proper prefix sums strictly
//! positive, and dropping its leading up step leaves a uniform excursion.
//!
//! Sample `i` of a run draws from stream `i` of the seed, so every statistic
//! is a deterministic function of `(N, ensemble, K, seed)` whatever the
//! thread count.

use rand::seq::SliceRandom;
use rand_core::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use crate::counting::log_table;
use crate::error::{Error, Result};
use crate::paths::{Ensemble, SignPath};
use crate::rng::CounterRng;

/// Number of batches behind every standard error.
pub const BATCHES: usize = 100;

/// Default histogram resolution.
pub const DEFAULT_BINS: usize = 200;

/// Half-width of the histogram range, in standard deviations.
const HISTOGRAM_SIGMAS: f64 = 6.0;

fn fill_balanced(buf: &mut Vec<i8>, ups: usize, downs: usize) {
    buf.clear();
    buf.resize(ups, 1);
    buf.resize(ups + downs, -1);
}

/// Writes a uniform bridge of size `n` into `buf`.
fn bridge_into<R: RngCore>(n: usize, rng: &mut R, buf: &mut Vec<i8>) {
    fill_balanced(buf, n, n);
    buf.shuffle(rng);
}

/// Writes a uniform excursion of size `n` into `buf`, using `scratch` for
/// the unrotated sequence.
fn excursion_into<R: RngCore>(n: usize, rng: &mut R, scratch: &mut Vec<i8>, buf: &mut Vec<i8>) {
    fill_balanced(scratch, n + 1, n);
    scratch.shuffle(rng);
    // rotate to start right after the last minimum of the prefix sums
    let (mut level, mut min, mut cut) = (0i64, 0i64, 0usize);
    for (i, &s) in scratch[..2 * n].iter().enumerate() {
        level += i64::from(s);
        if level <= min {
            min = level;
            cut = i + 1;
        }
    }
    buf.clear();
    buf.extend_from_slice(&scratch[cut + 1..]);
    buf.extend_from_slice(&scratch[..cut]);
}

pub fn sample_bridge<R: RngCore>(n: usize, rng: &mut R) -> SignPath {
    let mut buf = Vec::with_capacity(2 * n);
    bridge_into(n, rng, &mut buf);
    SignPath::from_steps_unchecked(buf)
}

pub fn sample_excursion<R: RngCore>(n: usize, rng: &mut R) -> SignPath {
    let (mut scratch, mut buf) = (Vec::with_capacity(2 * n + 1), Vec::with_capacity(2 * n));
    excursion_into(n, rng, &mut scratch, &mut buf);
    SignPath::from_steps_unchecked(buf)
}

pub fn sample_path<R: RngCore>(n: usize, ensemble: Ensemble, rng: &mut R) -> SignPath {
    match ensemble {
        Ensemble::Bridge => sample_bridge(n, rng),
        Ensemble::Excursion => sample_excursion(n, rng),
    }
}

/// `S` of a step sequence with a running height and a precomputed log table.
fn entropy_with_table(steps: &[i8], logs: &[f64]) -> f64 {
    let mut level = 0i64;
    let mut total = 0.0;
    for &s in steps {
        let s = i64::from(s);
        if level * s < 0 {
            total += logs[level.unsigned_abs() as usize];
        }
        level += s;
    }
    total
}

/// `S` for `samples` independent uniform paths, in sample order.
pub fn sample_entropies(n: usize, ensemble: Ensemble, samples: usize, seed: u64) -> Vec<f64> {
    let logs = log_table(n.max(1));
    (0..samples)
        .into_par_iter()
        .map_init(
            || (Vec::with_capacity(2 * n + 1), Vec::with_capacity(2 * n)),
            |(scratch, buf), i| {
                let mut rng = CounterRng::new(seed, i as u64);
                match ensemble {
                    Ensemble::Bridge => bridge_into(n, &mut rng, buf),
                    Ensemble::Excursion => excursion_into(n, &mut rng, scratch, buf),
                }
                entropy_with_table(buf, &logs)
            },
        )
        .collect()
}

/// `s = (S - ½ N log N) / N`.
pub fn rescale(n: usize, entropy: f64) -> f64 {
    let nf = n as f64;
    (entropy - 0.5 * nf * nf.ln()) / nf
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn mean(values: &[f64]) -> f64 {
    compensated_sum(values.iter().copied()) / values.len() as f64
}

/// Mean, central moments of order 2 to 4 and the raw second moment.
#[derive(Clone, Copy, Debug)]
struct Moments {
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
    raw2: f64,
}

impl Moments {
    fn of(values: &[f64]) -> Moments {
        let mu = mean(values);
        let k = values.len() as f64;
        let central = |p: i32| compensated_sum(values.iter().map(|v| (v - mu).powi(p))) / k;
        let m2 = central(2);
        Moments {
            mean: mu,
            m2,
            m3: central(3),
            m4: central(4),
            raw2: m2 + mu * mu,
        }
    }

    fn kurtosis(&self) -> f64 {
        if self.m2 > 0.0 {
            self.m4 / (self.m2 * self.m2)
        } else {
            f64::NAN
        }
    }
}

/// A mean with its batch-means standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub standard_error: f64,
}

/// Contiguous batches of (almost) equal size.
fn batch_ranges(len: usize, batches: usize) -> impl Iterator<Item = std::ops::Range<usize>> {
    let b = batches.min(len).max(1);
    (0..b).map(move |i| i * len / b..(i + 1) * len / b)
}

/// Standard error of `stat(values)` from the spread of `stat` over batches.
fn batch_standard_error(values: &[f64], stat: impl Fn(&[f64]) -> f64) -> f64 {
    let per_batch: Vec<f64> = batch_ranges(values.len(), BATCHES)
        .map(|r| stat(&values[r]))
        .filter(|v| v.is_finite())
        .collect();
    let b = per_batch.len();
    if b < 2 {
        return f64::NAN;
    }
    let mu = mean(&per_batch);
    let var = compensated_sum(per_batch.iter().map(|v| (v - mu) * (v - mu))) / (b - 1) as f64;
    (var / b as f64).sqrt()
}

/// Sample mean of `values` with its batch-means standard error.
pub fn batch_mean_estimate(values: &[f64]) -> Estimate {
    Estimate {
        mean: mean(values),
        standard_error: batch_standard_error(values, mean),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    /// `bins + 1` increasing edges.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// Equal-width bins over `[lo, hi]`; values outside land in the end bins.
    pub fn build(values: &[f64], lo: f64, hi: f64, bins: usize) -> Histogram {
        let width = (hi - lo) / bins as f64;
        let edges = (0..=bins).map(|i| lo + width * i as f64).collect();
        let mut counts = vec![0u64; bins];
        for &v in values {
            let idx = ((v - lo) / width).floor();
            let idx = if idx.is_nan() || idx < 0.0 {
                0
            } else {
                (idx as usize).min(bins - 1)
            };
            counts[idx] += 1;
        }
        Histogram { edges, counts }
    }
}

/// Monte Carlo summary of the rescaled entropy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleStats {
    pub n: usize,
    pub ensemble: Ensemble,
    pub num_samples: usize,
    pub seed: u64,
    pub mean: f64,
    pub mean_se: f64,
    /// `⟨s²⟩`, not centered.
    pub second_moment: f64,
    pub second_moment_se: f64,
    pub variance: f64,
    pub variance_se: f64,
    pub third_central_moment: f64,
    pub third_central_moment_se: f64,
    pub fourth_central_moment: f64,
    /// Fourth central moment over the squared variance.
    pub kurtosis: f64,
    pub kurtosis_se: f64,
    pub histogram: Histogram,
}

impl SampleStats {
    /// Summarizes already drawn values of `s`.
    pub fn from_values(n: usize, ensemble: Ensemble, seed: u64, values: &[f64], bins: usize) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 samples, got {}",
                values.len()
            )));
        }
        if bins == 0 {
            return Err(Error::InvalidArgument("histogram needs at least one bin".into()));
        }
        let m = Moments::of(values);
        let sigma = m.m2.sqrt();
        let half = if sigma > 0.0 { HISTOGRAM_SIGMAS * sigma } else { 0.5 };
        Ok(SampleStats {
            n,
            ensemble,
            num_samples: values.len(),
            seed,
            mean: m.mean,
            mean_se: batch_standard_error(values, mean),
            second_moment: m.raw2,
            second_moment_se: batch_standard_error(values, |v| Moments::of(v).raw2),
            variance: m.m2,
            variance_se: batch_standard_error(values, |v| Moments::of(v).m2),
            third_central_moment: m.m3,
            third_central_moment_se: batch_standard_error(values, |v| Moments::of(v).m3),
            fourth_central_moment: m.m4,
            kurtosis: m.kurtosis(),
            kurtosis_se: batch_standard_error(values, |v| Moments::of(v).kurtosis()),
            histogram: Histogram::build(values, m.mean - half, m.mean + half, bins),
        })
    }
}

/// Rescaled entropies `s` of `samples` uniform paths, in sample order.
pub fn rescaled_samples(n: usize, ensemble: Ensemble, samples: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("the rescaled entropy needs N >= 1".into()));
    }
    Ok(sample_entropies(n, ensemble, samples, seed)
        .into_iter()
        .map(|s| rescale(n, s))
        .collect())
}

pub fn mc_entropy_stats(n: usize, ensemble: Ensemble, samples: usize, seed: u64, bins: usize) -> Result<SampleStats> {
    if samples < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples, got {samples}")));
    }
    let values = rescaled_samples(n, ensemble, samples, seed)?;
    SampleStats::from_values(n, ensemble, seed, &values, bins)
}

/// Monte Carlo estimate of the raw moment `⟨S^k⟩`.
pub fn mc_raw_moment(n: usize, ensemble: Ensemble, k: u32, samples: usize, seed: u64) -> Result<Estimate> {
    crate::counting::check_order(k)?;
    let values: Vec<f64> = sample_entropies(n, ensemble, samples, seed)
        .into_iter()
        .map(|s| s.powi(k as i32))
        .collect();
    Ok(batch_mean_estimate(&values))
}
