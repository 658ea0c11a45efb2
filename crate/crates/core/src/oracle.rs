//! Brute-force ground truth for small sizes: optimal matchings by trying all
//! `N!` permutations, moments of the entropy by listing every path.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matching::{self, cost, Instance, Matching};
use crate::paths::{self, Ensemble, SignPath};
use crate::rng::CounterRng;

/// Largest size accepted by the exhaustive routines.
pub const MAX_BRUTE_N: usize = 8;

/// Default relative tolerance for cost ties.
pub const DEFAULT_TIE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct OptimaReport {
    pub min_cost: f64,
    pub argmin_set: BTreeSet<Matching>,
    pub degeneracy: usize,
}

/// Minimum cost and all minimizers over the `N!` matchings.
///
/// Costs within relative `tol` of the minimum count as ties. When every
/// coordinate is an integer the costs are exact and ties are detected exactly.
pub fn exhaustive_optima(inst: &Instance, tol: f64) -> Result<OptimaReport> {
    let n = inst.size();
    if n > MAX_BRUTE_N {
        return Err(Error::TooLarge {
            what: "exhaustive optima",
            n,
            limit: MAX_BRUTE_N,
        });
    }
    let integral = inst
        .whites()
        .iter()
        .chain(inst.blacks())
        .all(|x| x.fract() == 0.0 && x.abs() < 1e15);
    let tol = if integral { 0.0 } else { tol };

    let costs: Vec<(Matching, f64)> = (0..n)
        .permutations(n)
        .map(|perm| {
            let m = Matching::new(perm).expect("permutation");
            let c = cost(inst, &m)?;
            Ok((m, c))
        })
        .collect::<Result<_>>()?;
    let min_cost = costs.iter().map(|(_, c)| *c).fold(f64::INFINITY, f64::min);
    let min_cost = if costs.is_empty() { 0.0 } else { min_cost };
    let bound = min_cost + tol * min_cost.abs();
    let argmin_set: BTreeSet<Matching> = costs
        .into_iter()
        .filter(|(_, c)| *c <= bound)
        .map(|(m, _)| m)
        .collect();
    Ok(OptimaReport {
        min_cost,
        degeneracy: argmin_set.len(),
        argmin_set,
    })
}

/// Every bridge or excursion of size `n`, in lexicographic order with
/// `D < U`. Excursion prefixes that dip below zero are pruned.
pub fn all_paths(n: usize, ensemble: Ensemble) -> PathIter {
    PathIter {
        n,
        ensemble,
        current: None,
        done: false,
    }
}

#[derive(Clone, Debug)]
pub struct PathIter {
    n: usize,
    ensemble: Ensemble,
    current: Option<Vec<i8>>,
    done: bool,
}

impl PathIter {
    fn admissible_prefix(&self, level: i64) -> bool {
        self.ensemble == Ensemble::Bridge || level >= 0
    }

    /// Smallest admissible completion of `prefix`, if any.
    fn complete(&self, prefix: &mut Vec<i8>) -> bool {
        let total = 2 * self.n;
        let mut level: i64 = prefix.iter().map(|&s| i64::from(s)).sum();
        let mut downs = prefix.iter().filter(|&&s| s < 0).count();
        let mut ups = prefix.len() - downs;
        while prefix.len() < total {
            let try_down = downs < self.n && self.admissible_prefix(level - 1);
            if try_down {
                prefix.push(-1);
                downs += 1;
                level -= 1;
            } else if ups < self.n {
                prefix.push(1);
                ups += 1;
                level += 1;
            } else {
                return false;
            }
        }
        true
    }
}

impl Iterator for PathIter {
    type Item = SignPath;

    fn next(&mut self) -> Option<SignPath> {
        if self.done {
            return None;
        }
        let next = match self.current.take() {
            None => {
                let mut first = Vec::with_capacity(2 * self.n);
                if self.complete(&mut first) {
                    Some(first)
                } else {
                    None
                }
            }
            Some(mut cur) => {
                // lexicographic successor: find the last D that can become U
                let mut found = None;
                while let Some(s) = cur.pop() {
                    if s < 0 {
                        let mut candidate = cur.clone();
                        candidate.push(1);
                        let ups = candidate.iter().filter(|&&x| x > 0).count();
                        if ups <= self.n && self.complete(&mut candidate) {
                            found = Some(candidate);
                            break;
                        }
                    }
                }
                found
            }
        };
        match next {
            Some(steps) => {
                self.current = Some(steps.clone());
                Some(SignPath::from_steps_unchecked(steps))
            }
            None => {
                self.done = true;
                None
            }
        }
    }
}

/// `⟨S^k⟩` over the uniform ensemble, by listing every path.
pub fn brute_moment(n: usize, ensemble: Ensemble, k: u32) -> Result<f64> {
    if n > MAX_BRUTE_N {
        return Err(Error::TooLarge {
            what: "brute-force moments",
            n,
            limit: MAX_BRUTE_N,
        });
    }
    let (mut sum, mut count) = (0.0, 0usize);
    for path in all_paths(n, ensemble) {
        sum += matching::entropy(&path)?.powi(k as i32);
        count += 1;
    }
    Ok(sum / count as f64)
}

/// Outcome of comparing the product formula and the enumerator against the
/// exhaustive search on random instances.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub instances: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub passed: bool,
    pub checked: usize,
    pub failures: Vec<VerifyFailure>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyFailure {
    pub instance: usize,
    pub path: String,
    pub product_formula: String,
    pub exhaustive: usize,
    pub sets_equal: bool,
}

/// Uniform coordinates in `[0, 1)` for `n` white and `n` black points.
pub fn random_instance(n: usize, rng: &mut CounterRng) -> Instance {
    loop {
        let whites: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
        let blacks: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
        if let Ok(inst) = Instance::new(whites, blacks) {
            return inst;
        }
    }
}

/// Checks `instances` random instances of size `n`: the exhaustive argmin set
/// must equal the enumerated optimal set and have size `Z`.
pub fn verify_random_instances(n: usize, instances: usize, seed: u64, tol: f64) -> Result<VerifyReport> {
    let mut failures = Vec::new();
    for idx in 0..instances {
        let mut rng = CounterRng::new(seed, idx as u64);
        let inst = random_instance(n, &mut rng);
        let path = paths::from_instance(&inst);
        let family = matching::count_optimal(&path)?;
        let report = exhaustive_optima(&inst, tol)?;
        let enumerated: BTreeSet<Matching> = family.iter().collect();
        let sets_equal = enumerated == report.argmin_set;
        let z_matches = family.count.to_usize() == Some(report.degeneracy);
        if !(sets_equal && z_matches) {
            failures.push(VerifyFailure {
                instance: idx,
                path: path.to_string(),
                product_formula: family.count.to_string(),
                exhaustive: report.degeneracy,
                sets_equal,
            });
        }
    }
    Ok(VerifyReport {
        n,
        instances,
        seed,
        tolerance: tol,
        passed: failures.is_empty(),
        checked: instances,
        failures,
    })
}
