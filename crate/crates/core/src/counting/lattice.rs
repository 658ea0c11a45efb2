//! Exact lattice-path counts.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::paths::Ensemble;

pub type PathCount = BigUint;

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 1..=k {
        // acc · (n-k+i) is divisible by i after the multiplication
        acc *= n - k + i;
        acc /= i;
    }
    acc
}

/// Unconstrained paths of `a` steps with net displacement `b`:
/// `C(a, (a+b)/2)` when `|b| <= a` and `a + b` is even, else 0. Negative `a`
/// gives 0; negative `b` counts descending paths, `B_{a,-b} = B_{a,b}`.
pub fn b_ab(a: i64, b: i64) -> PathCount {
    if a < 0 || b.abs() > a || (a + b) % 2 != 0 {
        return BigUint::zero();
    }
    binomial(a as u64, ((a + b) / 2) as u64)
}

/// Paths of `a` steps with displacement `b` that never fall more than `d`
/// below their start, by reflection: `(B_{a,b} - B_{a,b+2(d+1)}) θ(b+d)`.
pub fn c_abd(a: i64, b: i64, d: i64) -> PathCount {
    if b + d < 0 || d < 0 {
        return BigUint::zero();
    }
    b_ab(a, b) - b_ab(a, b + 2 * (d + 1))
}

/// Number of bridges `C(2N, N)` or excursions `C(2N, N) / (N + 1)`.
pub fn tn_count(n: usize, ensemble: Ensemble) -> PathCount {
    let bridges = binomial(2 * n as u64, n as u64);
    match ensemble {
        Ensemble::Bridge => bridges,
        Ensemble::Excursion => bridges / (n as u64 + 1),
    }
}
