//! Moments from the marked-path counts.
//!
//! A path with closing steps marked at `t_1 < … < t_c` with stack sizes
//! `h̄_1, …, h̄_c` splits into free segments between the marks: the first
//! climbs to `±h̄_1`, the middle ones join `±(h̄_{a-1} - 1)` to `±h̄_a`, the last
//! returns from `±(h̄_c - 1)` to zero. Bridges count each segment with plain
//! binomials, excursions with the reflected (ballot) counts. Moments are then
//! sums of `log h̄` products against these counts, with the multiplicities
//! coming from expanding `S^k`.
//!
//! All binomials are handled as `p(a, b) = B_{a,b} / 2^a`, the probability of
//! net displacement `b` after `a` fair steps; the `2^a` factors are restored
//! globally at the end.

use rayon::prelude::*;

use super::{check_order, log_table, scaled_path_count, Method, MomentPair, MomentResult};
use crate::error::{Error, Result};
use crate::paths::Ensemble;

/// Size cap for the first moment (`O(N²)`).
pub const CLOSED_FORM_K1_MAX_N: usize = 5_000;

/// Size cap for the second moment (`O(N⁴)`).
pub const CLOSED_FORM_K2_MAX_N: usize = 400;

/// `p(2m, 0) = C(2m, m) / 4^m` for `m = 0..=max`.
fn central_probabilities(max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max + 1);
    let mut c = 1.0f64;
    out.push(c);
    for i in 1..=max {
        c *= (2 * i - 1) as f64 / (2 * i) as f64;
        out.push(c);
    }
    out
}

/// Writes `p(a, b)` for `b = 0..=a` into `row` (length at least `a + 1`),
/// walking outward from the center with `p(a, b+2) / p(a, b) = (a-b)/(a+b+2)`.
fn fill_row(a: usize, central: &[f64], row: &mut [f64]) {
    row[..=a].iter_mut().for_each(|x| *x = 0.0);
    let m = a / 2;
    let (mut b, mut v) = if a.is_multiple_of(2) {
        (0, central[m])
    } else {
        (1, central[m] * (2 * m + 1) as f64 / (2 * m + 2) as f64)
    };
    while b <= a {
        row[b] = v;
        v *= (a - b) as f64 / (a + b + 2) as f64;
        b += 2;
    }
}

/// Rows `p(a, ·)` for `a = 0..=max_a`, each stored over `b ∈ [-pad, pad]`
/// with zeros outside `|b| <= a`, so any lookup with `|b| <= pad` is valid.
pub struct ScaledBinomialRows {
    pad: usize,
    stride: usize,
    data: Vec<f64>,
}

impl ScaledBinomialRows {
    #[inline]
    pub fn row(&self, a: usize) -> &[f64] {
        &self.data[a * self.stride..(a + 1) * self.stride]
    }

    /// `p(a, b)` for `|b| <= pad`.
    #[inline]
    pub fn get(&self, a: usize, b: i64) -> f64 {
        self.row(a)[(b + self.pad as i64) as usize]
    }

    pub fn pad(&self) -> usize {
        self.pad
    }
}

pub fn scaled_binomial_rows(max_a: usize, pad: usize) -> ScaledBinomialRows {
    let pad = pad.max(max_a);
    let stride = 2 * pad + 1;
    let central = central_probabilities(max_a / 2 + 1);
    let mut data = vec![0.0; stride * (max_a + 1)];
    let mut half = vec![0.0; max_a + 1];
    for a in 0..=max_a {
        fill_row(a, &central, &mut half);
        let row = &mut data[a * stride..(a + 1) * stride];
        for b in 0..=a {
            row[pad + b] = half[b];
            row[pad - b] = half[b];
        }
    }
    ScaledBinomialRows { pad, stride, data }
}

/// Lookup into a half row holding `p(a, b)` for `b = 0..=a`.
#[inline]
fn half_get(row: &[f64], a: usize, b: i64) -> f64 {
    let b = b.unsigned_abs() as usize;
    if b > a {
        0.0
    } else {
        row[b]
    }
}

/// Single-mark sums `Σ_{t,h̄} f(log h̄) · count(t; h̄)`, returned as
/// `(Σ log h̄ · P, Σ log² h̄ · P)` with `P` the scaled single-mark count.
fn single_mark_sums(n: usize, ensemble: Ensemble, logs: &[f64]) -> (f64, f64) {
    let total = 2 * n;
    let central = central_probabilities(n + 1);
    let (mut s1, mut s2) = (0.0f64, 0.0f64);
    let mut left = vec![0.0; total + 1];
    let mut right = vec![0.0; total + 1];
    for t in 1..=total {
        let (a_left, a_right) = (t - 1, total - t);
        fill_row(a_left, &central, &mut left);
        fill_row(a_right, &central, &mut right);
        let hmax = n.min(a_left).min(a_right + 1);
        for h in 2..=hmax {
            let hi = h as i64;
            let weight = match ensemble {
                Ensemble::Bridge => 2.0 * half_get(&left, a_left, hi) * half_get(&right, a_right, hi - 1),
                Ensemble::Excursion => {
                    (half_get(&left, a_left, hi) - half_get(&left, a_left, hi + 2))
                        * (half_get(&right, a_right, hi - 1) - half_get(&right, a_right, hi + 1))
                }
            };
            let l = logs[h];
            s1 += l * weight;
            s2 += l * l * weight;
        }
    }
    (s1, s2)
}

/// `Σ_{t1<t2} Σ_{h̄1,h̄2} log h̄1 log h̄2 · P(t1, t2; h̄1, h̄2)` with `P` the
/// scaled two-mark count.
fn double_mark_sum(n: usize, ensemble: Ensemble, logs: &[f64]) -> f64 {
    let total = 2 * n;
    let rows = scaled_binomial_rows(total, total + 2);
    let bridge = ensemble == Ensemble::Bridge;

    // left[t1][h1] = log h1 · (count of the first segment), right likewise
    let stride = n + 2;
    let mut left = vec![0.0; (total + 1) * stride];
    let mut right = vec![0.0; (total + 1) * stride];
    for t in 1..=total {
        for h in 2..=n {
            let hi = h as i64;
            let a = t - 1;
            let l = if bridge {
                2.0 * rows.get(a, hi)
            } else {
                rows.get(a, hi) - rows.get(a, hi + 2)
            };
            left[t * stride + h] = logs[h] * l;
            let a = total - t;
            let r = if bridge {
                rows.get(a, hi - 1)
            } else {
                rows.get(a, hi - 1) - rows.get(a, hi + 1)
            };
            right[t * stride + h] = logs[h] * r;
        }
    }

    let pad = rows.pad() as i64;
    (1..total)
        .into_par_iter()
        .map(|t1| {
            let mut acc = 0.0f64;
            let hmax1 = n.min(t1 - 1);
            for h1 in 2..=hmax1 {
                let lv = left[t1 * stride + h1];
                if lv == 0.0 {
                    continue;
                }
                let h1i = h1 as i64;
                let mut inner = 0.0f64;
                for t2 in t1 + 1..=total {
                    let g = t2 - t1 - 1;
                    let row = rows.row(g);
                    let rrow = &right[t2 * stride..(t2 + 1) * stride];
                    let hmax2 = n.min(total - t2 + 1);
                    // parity: t2 - 1 - h2 must be even for the prefix to reach ±h2
                    let start = if (t2 - 1) % 2 == 0 { 2 } else { 3 };
                    let mut h2 = start;
                    let mut s = 0.0f64;
                    while h2 <= hmax2 {
                        let h2i = h2 as i64;
                        let near = row[(pad + h2i - h1i + 1) as usize];
                        let far = if bridge {
                            row[(pad + h2i + h1i - 1) as usize]
                        } else {
                            -row[(pad + h2i + h1i + 1) as usize]
                        };
                        s += rrow[h2] * (near + far);
                        h2 += 2;
                    }
                    inner += s;
                }
                acc += lv * inner;
            }
            acc
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum()
}

/// Both raw moments from the marked-path sums. `want_second` selects whether
/// the `O(N⁴)` two-mark term is evaluated.
fn closed_form_moments(n: usize, ensemble: Ensemble, want_second: bool) -> Result<MomentPair> {
    if n > CLOSED_FORM_K1_MAX_N {
        return Err(Error::TooLarge {
            what: "closed-form first moment",
            n,
            limit: CLOSED_FORM_K1_MAX_N,
        });
    }
    if want_second && n > CLOSED_FORM_K2_MAX_N {
        return Err(Error::TooLarge {
            what: "closed-form second moment",
            n,
            limit: CLOSED_FORM_K2_MAX_N,
        });
    }
    if n == 0 {
        return Ok(MomentPair { m1: 0.0, m2: 0.0 });
    }
    let logs = log_table(n + 2);
    // one mark spans 2N - 1 free steps, two marks 2N - 2
    let norm1 = 0.5 / scaled_path_count(n, ensemble);
    let norm2 = 0.25 / scaled_path_count(n, ensemble);
    let (s1, s2) = single_mark_sums(n, ensemble, &logs);
    let m1 = s1 * norm1;
    let m2 = if want_second {
        s2 * norm1 + 2.0 * double_mark_sum(n, ensemble, &logs) * norm2
    } else {
        f64::NAN
    };
    Ok(MomentPair { m1, m2 })
}

pub fn exact_moment_closedform(n: usize, ensemble: Ensemble, k: u32) -> Result<MomentResult> {
    check_order(k)?;
    let pair = closed_form_moments(n, ensemble, k == 2)?;
    MomentResult::from_pair(n, ensemble, k, pair, Method::ClosedForm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::{b_ab, dp_moments};
    use num_traits::ToPrimitive;

    #[test]
    fn scaled_rows_match_binomials() {
        let rows = scaled_binomial_rows(30, 34);
        for a in 0..=30usize {
            for b in -34i64..=34 {
                let exact = b_ab(a as i64, b).to_f64().unwrap() / 2f64.powi(a as i32);
                let got = rows.get(a, b);
                assert!((got - exact).abs() <= 1e-15 * exact.max(1e-300), "a={a} b={b}");
            }
        }
    }

    #[test]
    fn small_sizes() {
        let ln2 = 2f64.ln();
        let e = exact_moment_closedform(2, Ensemble::Excursion, 1).unwrap();
        assert!((e.value - ln2 / 2.0).abs() < 1e-15);
        let b = exact_moment_closedform(2, Ensemble::Bridge, 2).unwrap();
        assert!((b.value - ln2 * ln2 / 3.0).abs() < 1e-15);
        for k in 1..=2 {
            for ens in [Ensemble::Bridge, Ensemble::Excursion] {
                assert_eq!(exact_moment_closedform(0, ens, k).unwrap().value, 0.0);
            }
        }
    }

    #[test]
    fn agrees_with_sweep_at_moderate_size() {
        for ens in [Ensemble::Bridge, Ensemble::Excursion] {
            for n in [7usize, 23] {
                let cf = closed_form_moments(n, ens, true).unwrap();
                let dp = dp_moments(n, ens).unwrap();
                assert!((cf.m1 - dp.m1).abs() < 1e-10, "{ens} {n}");
                assert!((cf.m2 - dp.m2).abs() < 1e-10, "{ens} {n}");
            }
        }
    }

    #[test]
    fn caps() {
        assert!(matches!(
            exact_moment_closedform(CLOSED_FORM_K2_MAX_N + 1, Ensemble::Bridge, 2),
            Err(Error::TooLarge { .. })
        ));
        assert!(matches!(
            exact_moment_closedform(CLOSED_FORM_K1_MAX_N + 1, Ensemble::Bridge, 1),
            Err(Error::TooLarge { .. })
        ));
    }
}
