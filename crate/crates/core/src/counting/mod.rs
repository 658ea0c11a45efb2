//! Exact finite-size moments of the entropy over uniformly random bridges
//! and excursions.
//!
//! Three independent routes compute `M_{N,k} = ⟨S^k⟩`:
//!
//! * [`exact_moment_dp`] sweeps forward over (step, height) states carrying
//!   path weight and the first two power sums of the partial entropy;
//! * [`exact_moment_closedform`] sums `log h̄` against the number of paths
//!   with marked closing steps, itself a product of ballot-type counts;
//! * [`gf_moment_series`] expands the generating function `Σ_N T_N M_{N,k} z^N`
//!   as a power series.

mod closed_form;
mod dp;
mod lattice;
mod series;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::paths::Ensemble;

pub use closed_form::{exact_moment_closedform, scaled_binomial_rows, CLOSED_FORM_K1_MAX_N, CLOSED_FORM_K2_MAX_N};
pub use dp::{bigint_moment_dp, dp_moments, exact_moment_dp, BigIntDpReport, BIGINT_DP_MAX_N, DP_MAX_N};
pub use lattice::{b_ab, c_abd, tn_count, PathCount};
pub use series::{
    catalan_series_scaled, central_binomial_series_scaled, exact_moment_gf, gf_moment_series,
    gf_moment_series_scaled, gf_moments, SeriesF64, GF_MAX_ORDER,
};

/// How a moment was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Dp,
    ClosedForm,
    Brute,
    GfSeries,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Dp, Method::ClosedForm, Method::Brute, Method::GfSeries];

    pub fn name(self) -> &'static str {
        match self {
            Method::Dp => "dp",
            Method::ClosedForm => "closed_form",
            Method::Brute => "brute",
            Method::GfSeries => "gf_series",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dp" => Ok(Method::Dp),
            "closed_form" | "closed" => Ok(Method::ClosedForm),
            "brute" => Ok(Method::Brute),
            "gf_series" | "gf" => Ok(Method::GfSeries),
            _ => Err(Error::InvalidArgument(format!("unknown method '{s}'"))),
        }
    }
}

/// First and second raw moments of `S` at one size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentPair {
    pub m1: f64,
    pub m2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentResult {
    pub n: usize,
    pub ensemble: Ensemble,
    pub k: u32,
    /// `M_{N,k} = ⟨S^k⟩`.
    pub value: f64,
    /// `⟨s^k⟩` with `s = (S - ½ N log N) / N`; absent at `N = 0`.
    pub rescaled: Option<f64>,
    pub method: Method,
}

impl MomentResult {
    pub fn from_pair(n: usize, ensemble: Ensemble, k: u32, pair: MomentPair, method: Method) -> Result<Self> {
        check_order(k)?;
        let value = if k == 1 { pair.m1 } else { pair.m2 };
        Ok(Self {
            n,
            ensemble,
            k,
            value,
            rescaled: rescaled_moment(n, k, pair),
            method,
        })
    }
}

pub(crate) fn check_order(k: u32) -> Result<()> {
    if k == 1 || k == 2 {
        Ok(())
    } else {
        Err(Error::UnsupportedOrder(k))
    }
}

/// `⟨s^k⟩` from the raw moments, `s = (S - ½ N log N) / N`.
pub fn rescaled_moment(n: usize, k: u32, pair: MomentPair) -> Option<f64> {
    if n == 0 {
        return None;
    }
    let nf = n as f64;
    let shift = 0.5 * nf * nf.ln();
    match k {
        1 => Some((pair.m1 - shift) / nf),
        2 => Some((pair.m2 - 2.0 * shift * pair.m1 + shift * shift) / (nf * nf)),
        _ => None,
    }
}

/// Moment of order `k` at size `n` by the chosen method.
pub fn exact_moment(n: usize, ensemble: Ensemble, k: u32, method: Method) -> Result<MomentResult> {
    match method {
        Method::Dp => exact_moment_dp(n, ensemble, k),
        Method::ClosedForm => exact_moment_closedform(n, ensemble, k),
        Method::GfSeries => exact_moment_gf(n, ensemble, k),
        Method::Brute => {
            check_order(k)?;
            let pair = MomentPair {
                m1: crate::oracle::brute_moment(n, ensemble, 1)?,
                m2: crate::oracle::brute_moment(n, ensemble, 2)?,
            };
            MomentResult::from_pair(n, ensemble, k, pair, Method::Brute)
        }
    }
}

/// `T_N / 4^N`: `C(2N, N) / 4^N` for bridges, divided by `N + 1` for
/// excursions.
pub fn scaled_path_count(n: usize, ensemble: Ensemble) -> f64 {
    let mut c = 1.0f64;
    for i in 1..=n {
        c *= (2 * i - 1) as f64 / (2 * i) as f64;
    }
    match ensemble {
        Ensemble::Bridge => c,
        Ensemble::Excursion => c / (n + 1) as f64,
    }
}

/// Table of `ln h` for `h = 0..=max` (entry 0 unused).
pub(crate) fn log_table(max: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(max + 1);
    t.push(0.0);
    t.extend((1..=max).map(|h| (h as f64).ln()));
    t
}
