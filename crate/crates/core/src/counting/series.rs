//! Truncated power series for the moment generating functions
//! `M_k(z) = Σ_N T_N M_{N,k} z^N`.
//!
//! Everything is expressed through `x(z) = z C(z)² = C(z) - 1`, with `C` the
//! Catalan series. In `x` the generating functions are rational prefactors
//! times the series `Li_{0,1}(x) = Σ log h x^h`, `Li_{0,2}(x) = Σ log² h x^h`
//! and `G(x) = Σ log(h² + h) log h! x^h`:
//!
//! * bridges, `k = 1`: `2(1+x)/(1-x)² · Li_{0,1}`
//! * excursions, `k = 1`: `(1+x) · Li_{0,1}`
//! * bridges, `k = 2`: `2(1+x)/(1-x)² · Li_{0,2} + 4x(1+x)/(1-x)³ · (G + Li_{0,1}²/x)`
//! * excursions, `k = 2`: `(1+x) · Li_{0,2} + 2x(1+x)/(1-x) · (G - Li_{0,1}²)`
//!
//! The `x`-series is then composed with `x(z)`. Coefficients grow like `4^N`,
//! so the work is done on `z/4` and rescaled at the end.

use serde::Serialize;

use super::{check_order, scaled_path_count, Method, MomentPair, MomentResult};
use crate::error::{Error, Result};
use crate::paths::Ensemble;

/// Largest truncation order accepted.
pub const GF_MAX_ORDER: usize = 500;

/// Coefficients `c_0..=c_M` of a truncated power series.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesF64 {
    pub coefficients: Vec<f64>,
}

impl SeriesF64 {
    pub fn zeros(order: usize) -> Self {
        Self {
            coefficients: vec![0.0; order + 1],
        }
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coeff(&self, i: usize) -> f64 {
        self.coefficients.get(i).copied().unwrap_or(0.0)
    }

    /// Product truncated at the order of `self`.
    pub fn mul(&self, other: &SeriesF64) -> SeriesF64 {
        let m = self.order();
        let mut out = vec![0.0; m + 1];
        for (i, &a) in self.coefficients.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.coefficients.iter().take(m + 1 - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        SeriesF64 { coefficients: out }
    }

    pub fn add(&self, other: &SeriesF64) -> SeriesF64 {
        let m = self.order();
        SeriesF64 {
            coefficients: (0..=m).map(|i| self.coeff(i) + other.coeff(i)).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> SeriesF64 {
        SeriesF64 {
            coefficients: self.coefficients.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplication by the variable.
    pub fn shift_up(&self) -> SeriesF64 {
        let mut coefficients = vec![0.0];
        coefficients.extend_from_slice(&self.coefficients[..self.order()]);
        SeriesF64 { coefficients }
    }

    /// Division by the variable; the constant term must vanish.
    pub fn shift_down(&self) -> SeriesF64 {
        debug_assert!(self.coefficients[0] == 0.0);
        let mut coefficients = self.coefficients[1..].to_vec();
        coefficients.push(0.0);
        SeriesF64 { coefficients }
    }

    /// `f(g)` for `g` with zero constant term, by accumulating powers of `g`.
    pub fn compose(&self, inner: &SeriesF64) -> SeriesF64 {
        let m = self.order();
        debug_assert!(inner.coeff(0) == 0.0);
        let mut out = SeriesF64::zeros(m);
        out.coefficients[0] = self.coeff(0);
        let mut power = inner.clone();
        power.coefficients.resize(m + 1, 0.0);
        for h in 1..=m {
            let c = self.coeff(h);
            if c != 0.0 {
                for (o, p) in out.coefficients.iter_mut().zip(&power.coefficients) {
                    *o += c * p;
                }
            }
            if h < m {
                power = power.mul(inner);
            }
        }
        out
    }
}

/// `C(z/4) = Σ C_n (z/4)^n` up to order `m`.
pub fn catalan_series_scaled(m: usize) -> SeriesF64 {
    let mut c = Vec::with_capacity(m + 1);
    c.push(1.0f64);
    for n in 1..=m {
        // C_n / C_{n-1} = 2(2n-1)/(n+1), times 1/4
        let prev = c[n - 1];
        c.push(prev * (2 * n - 1) as f64 / (2 * (n + 1)) as f64);
    }
    SeriesF64 { coefficients: c }
}

/// `B(z/4) = Σ C(2n, n) (z/4)^n` up to order `m`.
pub fn central_binomial_series_scaled(m: usize) -> SeriesF64 {
    let mut c = Vec::with_capacity(m + 1);
    c.push(1.0f64);
    for n in 1..=m {
        let prev = c[n - 1];
        c.push(prev * (2 * n - 1) as f64 / (2 * n) as f64);
    }
    SeriesF64 { coefficients: c }
}

/// `(1 + x)` times `(1 - x)^{-p}` as an `x`-series.
fn prefactor(m: usize, pole: u32) -> SeriesF64 {
    // coefficients of (1-x)^{-p}: C(h + p - 1, p - 1)
    let mut inv = vec![0.0f64; m + 1];
    for (h, slot) in inv.iter_mut().enumerate() {
        *slot = match pole {
            0 => (h == 0) as u8 as f64,
            1 => 1.0,
            2 => (h + 1) as f64,
            3 => ((h + 1) * (h + 2)) as f64 / 2.0,
            _ => unreachable!("poles up to order 3"),
        };
    }
    let inv = SeriesF64 { coefficients: inv };
    let mut one_plus_x = SeriesF64::zeros(m);
    one_plus_x.coefficients[0] = 1.0;
    if m >= 1 {
        one_plus_x.coefficients[1] = 1.0;
    }
    one_plus_x.mul(&inv)
}

struct Polylogs {
    li01: SeriesF64,
    li02: SeriesF64,
    g: SeriesF64,
}

fn polylogs(m: usize) -> Polylogs {
    let mut li01 = SeriesF64::zeros(m);
    let mut li02 = SeriesF64::zeros(m);
    let mut g = SeriesF64::zeros(m);
    let mut log_factorial = 0.0f64;
    for h in 1..=m {
        let l = (h as f64).ln();
        log_factorial += l;
        li01.coefficients[h] = l;
        li02.coefficients[h] = l * l;
        g.coefficients[h] = ((h * h + h) as f64).ln() * log_factorial;
    }
    Polylogs { li01, li02, g }
}

/// The generating function as a series in `x`.
fn x_series(ensemble: Ensemble, k: u32, m: usize) -> SeriesF64 {
    let p = polylogs(m);
    match (ensemble, k) {
        (Ensemble::Bridge, 1) => prefactor(m, 2).scale(2.0).mul(&p.li01),
        (Ensemble::Excursion, 1) => prefactor(m, 0).mul(&p.li01),
        (Ensemble::Bridge, _) => {
            let single = prefactor(m, 2).scale(2.0).mul(&p.li02);
            let squared = p.li01.mul(&p.li01);
            // 4x(1+x)/(1-x)³ · (G + Li²/x) = 4(1+x)/(1-x)³ · (xG + Li²)
            let inner = p.g.shift_up().add(&squared);
            single.add(&prefactor(m, 3).scale(4.0).mul(&inner))
        }
        (Ensemble::Excursion, _) => {
            let single = prefactor(m, 0).mul(&p.li02);
            let squared = p.li01.mul(&p.li01);
            let inner = p.g.add(&squared.scale(-1.0));
            single.add(&prefactor(m, 1).scale(2.0).mul(&inner.shift_up()))
        }
    }
}

/// Coefficients of `M_k(z/4)`, i.e. `T_N M_{N,k} / 4^N`.
pub fn gf_moment_series_scaled(ensemble: Ensemble, k: u32, order: usize) -> Result<SeriesF64> {
    check_order(k)?;
    if order > GF_MAX_ORDER {
        return Err(Error::TooLarge {
            what: "generating-function series",
            n: order,
            limit: GF_MAX_ORDER,
        });
    }
    let mut x = catalan_series_scaled(order);
    x.coefficients[0] = 0.0;
    Ok(x_series(ensemble, k, order).compose(&x))
}

/// Coefficients of `M_k(z)`: the coefficient of `z^N` is `T_N M_{N,k}`.
pub fn gf_moment_series(ensemble: Ensemble, k: u32, order: usize) -> Result<SeriesF64> {
    let scaled = gf_moment_series_scaled(ensemble, k, order)?;
    let mut four_pow = 1.0f64;
    let coefficients = scaled
        .coefficients
        .iter()
        .map(|&c| {
            let v = c * four_pow;
            four_pow *= 4.0;
            v
        })
        .collect();
    Ok(SeriesF64 { coefficients })
}

/// Both raw moments at size `n`, read off the series coefficients.
pub fn gf_moments(n: usize, ensemble: Ensemble) -> Result<MomentPair> {
    let total = scaled_path_count(n, ensemble);
    let m1 = gf_moment_series_scaled(ensemble, 1, n)?.coeff(n) / total;
    let m2 = gf_moment_series_scaled(ensemble, 2, n)?.coeff(n) / total;
    Ok(MomentPair { m1, m2 })
}

pub fn exact_moment_gf(n: usize, ensemble: Ensemble, k: u32) -> Result<MomentResult> {
    check_order(k)?;
    let pair = gf_moments(n, ensemble)?;
    MomentResult::from_pair(n, ensemble, k, pair, Method::GfSeries)
}
