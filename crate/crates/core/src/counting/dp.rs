//! Forward sweep over (step, height) states.
//!
//! Each state carries the weight `W` of the partial paths reaching it and the
//! sums `A₁ = Σ S_partial`, `A₂ = Σ S_partial²` over those paths. A closing
//! step from height `y` adds `ℓ = log |y|` to every partial entropy, which
//! updates `A₂ += 2ℓA₁ + ℓ²W` and then `A₁ += ℓW`. Weights are halved at
//! every step, so they stay probabilities of the simple random walk and
//! neither overflow nor underflow where it matters.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use super::{check_order, log_table, Method, MomentPair, MomentResult};
use crate::error::{Error, Result};
use crate::paths::Ensemble;

/// Size cap of the floating-point sweep.
pub const DP_MAX_N: usize = 20_000;

/// Size cap of the big-integer sweep.
pub const BIGINT_DP_MAX_N: usize = 200;

#[derive(Clone, Copy, Default)]
struct Cell {
    w: f64,
    a1: f64,
    a2: f64,
}

impl Cell {
    #[inline]
    fn closed(self, l: f64) -> Cell {
        Cell {
            w: self.w,
            a1: self.a1 + l * self.w,
            a2: self.a2 + 2.0 * l * self.a1 + l * l * self.w,
        }
    }
}

/// Both raw moments `⟨S⟩`, `⟨S²⟩` by the forward sweep, `O(N²)` time and
/// `O(N)` memory.
pub fn dp_moments(n: usize, ensemble: Ensemble) -> Result<MomentPair> {
    if n > DP_MAX_N {
        return Err(Error::TooLarge {
            what: "moment DP",
            n,
            limit: DP_MAX_N,
        });
    }
    if n == 0 {
        return Ok(MomentPair { m1: 0.0, m2: 0.0 });
    }
    let logs = log_table(n);
    let total = 2 * n;
    // heights y in [-n, n] stored at index y + n
    let offset = n as i64;
    let width = 2 * n + 1;
    let mut cur = vec![Cell::default(); width];
    let mut next = vec![Cell::default(); width];
    cur[n].w = 1.0;
    let floor = match ensemble {
        Ensemble::Bridge => -offset,
        Ensemble::Excursion => 0,
    };

    for step in 0..total {
        let remaining_after = (total - step - 1) as i64;
        let reach = (step as i64).min((total - step) as i64);
        let lo = floor.max(-reach);
        let next_reach = ((step + 1) as i64).min(remaining_after);
        let next_lo = floor.max(-next_reach);
        for y in next_lo..=next_reach {
            next[(y + offset) as usize] = Cell::default();
        }
        for y in lo..=reach {
            let c = cur[(y + offset) as usize];
            if c.w == 0.0 && c.a1 == 0.0 {
                continue;
            }
            let half = Cell {
                w: 0.5 * c.w,
                a1: 0.5 * c.a1,
                a2: 0.5 * c.a2,
            };
            let l = logs[y.unsigned_abs() as usize];
            for dy in [-1i64, 1] {
                let ny = y + dy;
                if ny < floor || ny.abs() > remaining_after {
                    continue;
                }
                let moved = if y * dy < 0 { half.closed(l) } else { half };
                let slot = &mut next[(ny + offset) as usize];
                slot.w += moved.w;
                slot.a1 += moved.a1;
                slot.a2 += moved.a2;
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    let end = cur[n];
    Ok(MomentPair {
        m1: end.a1 / end.w,
        m2: end.a2 / end.w,
    })
}

pub fn exact_moment_dp(n: usize, ensemble: Ensemble, k: u32) -> Result<MomentResult> {
    check_order(k)?;
    let pair = dp_moments(n, ensemble)?;
    MomentResult::from_pair(n, ensemble, k, pair, Method::Dp)
}

/// Output of the big-integer sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct BigIntDpReport {
    /// Exact number of paths in the ensemble.
    pub total: BigUint,
    pub moments: MomentPair,
}

/// Reference sweep with exact integer path counts and unscaled floating
/// aggregates, for `N <= 200`.
pub fn bigint_moment_dp(n: usize, ensemble: Ensemble) -> Result<BigIntDpReport> {
    if n > BIGINT_DP_MAX_N {
        return Err(Error::TooLarge {
            what: "big-integer moment DP",
            n,
            limit: BIGINT_DP_MAX_N,
        });
    }
    let logs = log_table(n.max(1));
    let total = 2 * n;
    let offset = n as i64;
    let floor = match ensemble {
        Ensemble::Bridge => -offset,
        Ensemble::Excursion => 0,
    };
    let width = 2 * n + 1;
    let mut w = vec![BigUint::zero(); width];
    let mut a1 = vec![0.0f64; width];
    let mut a2 = vec![0.0f64; width];
    w[n] = BigUint::from(1u32);
    for step in 0..total {
        let remaining_after = (total - step - 1) as i64;
        let mut nw = vec![BigUint::zero(); width];
        let mut na1 = vec![0.0f64; width];
        let mut na2 = vec![0.0f64; width];
        for y in floor..=offset {
            let idx = (y + offset) as usize;
            if w[idx].is_zero() {
                continue;
            }
            let wf = w[idx].to_f64().expect("finite count");
            let l = logs[y.unsigned_abs() as usize];
            for dy in [-1i64, 1] {
                let ny = y + dy;
                if ny < floor || ny.abs() > remaining_after {
                    continue;
                }
                let nidx = (ny + offset) as usize;
                nw[nidx] += &w[idx];
                if y * dy < 0 {
                    na2[nidx] += a2[idx] + 2.0 * l * a1[idx] + l * l * wf;
                    na1[nidx] += a1[idx] + l * wf;
                } else {
                    na2[nidx] += a2[idx];
                    na1[nidx] += a1[idx];
                }
            }
        }
        w = nw;
        a1 = na1;
        a2 = na2;
    }
    let count = w[n].clone();
    let cf = count.to_f64().expect("finite count");
    Ok(BigIntDpReport {
        total: count,
        moments: MomentPair {
            m1: a1[n] / cf,
            m2: a2[n] / cf,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::tn_count;

    #[test]
    fn small_values() {
        let ln2 = 2f64.ln();
        let e = exact_moment_dp(2, Ensemble::Excursion, 1).unwrap();
        assert!((e.value - ln2 / 2.0).abs() < 1e-15);
        let b = exact_moment_dp(2, Ensemble::Bridge, 1).unwrap();
        assert!((b.value - ln2 / 3.0).abs() < 1e-15);
        assert_eq!(exact_moment_dp(1, Ensemble::Bridge, 2).unwrap().value, 0.0);
        assert_eq!(exact_moment_dp(0, Ensemble::Excursion, 1).unwrap().value, 0.0);
        // N=2 bridges: UUDD and DDUU carry S = ln 2, so ⟨S²⟩ = ln²2 / 3
        let b2 = exact_moment_dp(2, Ensemble::Bridge, 2).unwrap();
        assert!((b2.value - ln2 * ln2 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            exact_moment_dp(DP_MAX_N + 1, Ensemble::Bridge, 1),
            Err(Error::TooLarge { .. })
        ));
        assert!(matches!(exact_moment_dp(3, Ensemble::Bridge, 3), Err(Error::UnsupportedOrder(3))));
    }

    #[test]
    fn bigint_sweep_agrees() {
        for ensemble in [Ensemble::Bridge, Ensemble::Excursion] {
            for n in [0usize, 1, 5, 40, 120] {
                let exact = bigint_moment_dp(n, ensemble).unwrap();
                assert_eq!(exact.total, tn_count(n, ensemble));
                let scaled = dp_moments(n, ensemble).unwrap();
                let tol = 1e-12 * (1.0 + exact.moments.m2.abs());
                assert!((scaled.m1 - exact.moments.m1).abs() < 1e-12 * (1.0 + exact.moments.m1));
                assert!((scaled.m2 - exact.moments.m2).abs() < tol);
            }
        }
    }

    #[test]
    fn jensen() {
        for ensemble in [Ensemble::Bridge, Ensemble::Excursion] {
            for n in [3usize, 17, 100, 1000] {
                let p = dp_moments(n, ensemble).unwrap();
                assert!(p.m2 >= p.m1 * p.m1, "n={n} {p:?}");
                assert!(p.m1 >= 0.0);
            }
        }
    }
}
