//! Matchings of white to black points with linear cost, and the structure of
//! the optimal ones.
//!
//! A matching is optimal iff every stack (the set of points left of a cut that
//! are linked across it) is empty or monochromatic. Optimal matchings are built
//! step by step: opening steps push their point on the stack, closing steps
//! pick one of the `h̄` stacked points. The number of optimal matchings is
//! therefore the product of `h̄` over the closing steps, and the `m`-th one is
//! read off the mixed-radix expansion of `m - 1`.

mod order_stat;

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::paths::{closing_steps, ClosingStep, SignPath};

pub use order_stat::OrderStatSet;

/// Sorted white and black coordinates of a generic configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    whites: Vec<f64>,
    blacks: Vec<f64>,
}

impl Instance {
    /// Sorts both color lists and rejects non-generic configurations.
    pub fn new(mut whites: Vec<f64>, mut blacks: Vec<f64>) -> Result<Self> {
        if whites.len() != blacks.len() {
            return Err(Error::SizeMismatch {
                expected: whites.len(),
                got: blacks.len(),
            });
        }
        if let Some(&x) = whites.iter().chain(&blacks).find(|x| !x.is_finite()) {
            return Err(Error::NonFiniteCoordinate(x));
        }
        whites.sort_by(f64::total_cmp);
        blacks.sort_by(f64::total_cmp);
        let mut merged: Vec<f64> = whites.iter().chain(&blacks).copied().collect();
        merged.sort_by(f64::total_cmp);
        if let Some(w) = merged.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateCoordinate(w[0]));
        }
        Ok(Self { whites, blacks })
    }

    pub fn whites(&self) -> &[f64] {
        &self.whites
    }

    pub fn blacks(&self) -> &[f64] {
        &self.blacks
    }

    /// Number of points of each color.
    pub fn size(&self) -> usize {
        self.whites.len()
    }

    /// All `2N` coordinates in increasing order.
    pub fn merged(&self) -> Vec<f64> {
        let mut merged: Vec<f64> = self.whites.iter().chain(&self.blacks).copied().collect();
        merged.sort_by(f64::total_cmp);
        merged
    }
}

/// A bijection from white points to black points: white `i` is linked to
/// black `perm[i]` (0-based internally).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    perm: Vec<usize>,
}

impl Matching {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidMatching(format!("{perm:?} is not a permutation")));
            }
        }
        Ok(Self { perm })
    }

    /// The ordered matching.
    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
        }
    }

    /// Builds a matching from 1-based `(white, black)` pairs.
    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self> {
        let n = pairs.len();
        let mut perm = vec![usize::MAX; n];
        for &(w, b) in pairs {
            if w == 0 || w > n || b == 0 || b > n || perm[w - 1] != usize::MAX {
                return Err(Error::InvalidMatching(format!("bad pair ({w}, {b})")));
            }
            perm[w - 1] = b - 1;
        }
        Self::new(perm)
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn size(&self) -> usize {
        self.perm.len()
    }

    /// 1-based `(white, black)` pairs ordered by white index.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.perm.iter().enumerate().map(|(w, &b)| (w + 1, b + 1)).collect()
    }
}

impl Serialize for Matching {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[usize; 2]> = self.pairs().into_iter().map(|(w, b)| [w, b]).collect();
        pairs.serialize(serializer)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Color {
    White,
    Black,
}

/// A point named by color and 1-based rank within its color.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Point {
    pub color: Color,
    pub rank: usize,
}

impl Point {
    pub fn white(rank: usize) -> Self {
        Self { color: Color::White, rank }
    }

    pub fn black(rank: usize) -> Self {
        Self { color: Color::Black, rank }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.color {
            Color::White => 'w',
            Color::Black => 'b',
        };
        write!(f, "{c}{}", self.rank)
    }
}

/// Piecewise-constant function on the `2N + 1` open gaps cut out by the
/// merged points. Gap `g` lies between `breakpoints[g-1]` and `breakpoints[g]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepProfile {
    pub breakpoints: Vec<f64>,
    pub values: Vec<u64>,
}

impl StepProfile {
    /// Integral over the bounded gaps; the two outer gaps always carry 0.
    pub fn integral(&self) -> f64 {
        self.breakpoints
            .windows(2)
            .zip(&self.values[1..])
            .map(|(w, &v)| v as f64 * (w[1] - w[0]))
            .sum()
    }
}

fn check_size(inst: &Instance, m: &Matching) -> Result<()> {
    if inst.size() != m.size() {
        return Err(Error::SizeMismatch {
            expected: inst.size(),
            got: m.size(),
        });
    }
    Ok(())
}

/// Total link length `Σ_i |w_i - b_{π(i)}|`.
pub fn cost(inst: &Instance, m: &Matching) -> Result<f64> {
    check_size(inst, m)?;
    Ok(m
        .perm
        .iter()
        .enumerate()
        .map(|(w, &b)| (inst.whites[w] - inst.blacks[b]).abs())
        .sum())
}

/// Number of links crossing each gap.
pub fn k_pi_profile(inst: &Instance, m: &Matching) -> Result<StepProfile> {
    check_size(inst, m)?;
    let path = crate::paths::from_instance(inst);
    let (wpos, bpos) = path.color_positions();
    let mut diff = vec![0i64; path.len() + 2];
    for (w, &b) in m.perm.iter().enumerate() {
        let (lo, hi) = ordered(wpos[w], bpos[b]);
        // crosses gaps lo+1 ..= hi
        diff[lo + 1] += 1;
        diff[hi + 1] -= 1;
    }
    let mut values = Vec::with_capacity(path.len() + 1);
    let mut acc = 0i64;
    for d in &diff[..=path.len()] {
        acc += d;
        values.push(acc as u64);
    }
    Ok(StepProfile {
        breakpoints: inst.merged(),
        values,
    })
}

/// `|#white - #black|` to the left of each gap.
pub fn k_lb_profile(inst: &Instance) -> StepProfile {
    let path = crate::paths::from_instance(inst);
    let mut values = Vec::with_capacity(path.len() + 1);
    let mut level = 0i64;
    values.push(0);
    for &s in path.steps() {
        level += i64::from(s);
        values.push(level.unsigned_abs());
    }
    StepProfile {
        breakpoints: inst.merged(),
        values,
    }
}

/// Lower bound on the cost of any matching, attained by the ordered one.
pub fn h_lb(inst: &Instance) -> f64 {
    k_lb_profile(inst).integral()
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn check_matching_fits(path: &SignPath, m: &Matching) -> Result<()> {
    path.ensure_bridge()?;
    if m.size() != path.size() {
        return Err(Error::SizeMismatch {
            expected: path.size(),
            got: m.size(),
        });
    }
    Ok(())
}

/// Points among the first `i` that are linked beyond position `i`, in
/// increasing position order.
pub fn stack(path: &SignPath, m: &Matching, i: usize) -> Result<Vec<Point>> {
    check_matching_fits(path, m)?;
    if i == 0 || i > path.len() {
        return Err(Error::IndexOutOfRange {
            index: i.to_string(),
            max: path.len().to_string(),
        });
    }
    let (wpos, bpos) = path.color_positions();
    let mut members = Vec::new();
    for (w, &b) in m.perm.iter().enumerate() {
        let (wp, bp) = (wpos[w], bpos[b]);
        if wp < i && bp >= i {
            members.push((wp, Point::white(w + 1)));
        } else if bp < i && wp >= i {
            members.push((bp, Point::black(b + 1)));
        }
    }
    members.sort_unstable();
    Ok(members.into_iter().map(|(_, p)| p).collect())
}

/// True iff every stack of `m` is empty or monochromatic.
pub fn is_optimal(path: &SignPath, m: &Matching) -> Result<bool> {
    check_matching_fits(path, m)?;
    let (wpos, bpos) = path.color_positions();
    let len = path.len();
    // open[c][i]: number of stacked points of color c after position i (0-based)
    let mut white_diff = vec![0i64; len + 1];
    let mut black_diff = vec![0i64; len + 1];
    for (w, &b) in m.perm.iter().enumerate() {
        let (wp, bp) = (wpos[w], bpos[b]);
        let (lo, hi, diff) = if wp < bp {
            (wp, bp, &mut white_diff)
        } else {
            (bp, wp, &mut black_diff)
        };
        diff[lo] += 1;
        diff[hi] -= 1;
    }
    let (mut whites, mut blacks) = (0i64, 0i64);
    for i in 0..len {
        whites += white_diff[i];
        blacks += black_diff[i];
        if whites > 0 && blacks > 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The set of optimal matchings of one color ordering, described by the
/// closing steps and their radices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimalFamily {
    pub sign_path: SignPath,
    /// Closing steps in increasing position order.
    pub closing: Vec<ClosingStep>,
    /// `h̄` at each closing step, same order.
    pub radices: Vec<u64>,
    /// Number of optimal matchings, the product of the radices.
    #[serde(serialize_with = "serialize_biguint")]
    pub count: BigUint,
}

fn serialize_biguint<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl OptimalFamily {
    /// `log Z` as a sum of logarithms of the radices.
    pub fn entropy(&self) -> f64 {
        self.radices.iter().map(|&h| (h as f64).ln()).sum()
    }

    /// Largest stack met along the way.
    pub fn max_stack(&self) -> u64 {
        self.radices.iter().copied().max().unwrap_or(0)
    }

    /// The `m`-th optimal matching, `1 <= m <= Z`.
    pub fn decode(&self, m: &BigUint) -> Result<Matching> {
        if m.is_zero() || *m > self.count {
            return Err(Error::IndexOutOfRange {
                index: m.to_string(),
                max: self.count.to_string(),
            });
        }
        let mut rest = m - 1u32;
        let mut digits = Vec::with_capacity(self.radices.len());
        for &radix in &self.radices {
            let r = BigUint::from(radix);
            let digit = (&rest % &r).to_u64().expect("digit below a u64 radix");
            rest /= r;
            digits.push(digit);
        }
        Ok(decode_digits(&self.sign_path, &digits))
    }

    /// Lazily yields all `Z` optimal matchings in decoding order.
    pub fn iter(&self) -> OptimalIter {
        OptimalIter {
            path: self.sign_path.clone(),
            radices: self.radices.clone(),
            digits: Some(vec![0; self.radices.len()]),
        }
    }
}

/// Builds the matching selected by mixed-radix digits, one digit per closing
/// step in step order. Digit `a` pairs the closing point with the `a`-th
/// (0-based) stacked point in increasing coordinate order.
///
/// Digits must satisfy `a_j < h̄_j`; this is not rechecked.
pub fn decode_digits(path: &SignPath, digits: &[u64]) -> Matching {
    let n = path.size();
    let steps = path.steps();
    let mut white_rank = vec![0usize; steps.len()];
    let mut black_rank = vec![0usize; steps.len()];
    let (mut w, mut b) = (0, 0);
    for (i, &s) in steps.iter().enumerate() {
        if s > 0 {
            white_rank[i] = w;
            w += 1;
        } else {
            black_rank[i] = b;
            b += 1;
        }
    }

    let mut perm = vec![0usize; n];
    let mut open = OrderStatSet::new(steps.len());
    let mut level = 0i64;
    let mut digit = digits.iter();
    for (i, &s) in steps.iter().enumerate() {
        let s64 = i64::from(s);
        if level * s64 < 0 {
            let a = *digit.next().expect("one digit per closing step") as usize;
            let partner = open.select(a).expect("digit within stack size");
            open.remove(partner);
            if s > 0 {
                perm[white_rank[i]] = black_rank[partner];
            } else {
                perm[white_rank[partner]] = black_rank[i];
            }
        } else {
            open.insert(i);
        }
        level += s64;
    }
    Matching { perm }
}

/// Degeneracy of the optimal matching for a bridge.
pub fn count_optimal(path: &SignPath) -> Result<OptimalFamily> {
    path.ensure_bridge()?;
    let closing = closing_steps(path);
    let radices: Vec<u64> = closing.iter().map(|c| c.hbar).collect();
    let count = product(&radices);
    Ok(OptimalFamily {
        sign_path: path.clone(),
        closing,
        radices,
        count,
    })
}

fn product(factors: &[u64]) -> BigUint {
    // pairwise products keep the big-integer operands balanced
    if factors.is_empty() {
        return BigUint::one();
    }
    let mut level: Vec<BigUint> = factors
        .chunks(4)
        .map(|c| {
            c.iter().fold(BigUint::one(), |acc, &x| acc * x)
        })
        .collect();
    while level.len() > 1 {
        level = level
            .chunks(2)
            .map(|c| if c.len() == 2 { &c[0] * &c[1] } else { c[0].clone() })
            .collect();
    }
    level.pop().unwrap()
}

/// Zero-temperature entropy `log Z`, summed over closing steps.
pub fn entropy(path: &SignPath) -> Result<f64> {
    path.ensure_bridge()?;
    Ok(entropy_of_steps(path.steps()))
}

/// `Σ log h̄` over closing steps, with no validation.
pub(crate) fn entropy_of_steps(steps: &[i8]) -> f64 {
    let mut level = 0i64;
    let mut total = 0.0;
    for &s in steps {
        let s = i64::from(s);
        if level * s < 0 && level.unsigned_abs() > 1 {
            total += (level.unsigned_abs() as f64).ln();
        }
        level += s;
    }
    total
}

pub fn decode_mth(path: &SignPath, m: &BigUint) -> Result<Matching> {
    count_optimal(path)?.decode(m)
}

pub fn enumerate_optimal(path: &SignPath) -> Result<OptimalIter> {
    Ok(count_optimal(path)?.iter())
}

/// Odometer over the mixed-radix digits of `0..Z`.
#[derive(Clone, Debug)]
pub struct OptimalIter {
    path: SignPath,
    radices: Vec<u64>,
    digits: Option<Vec<u64>>,
}

impl Iterator for OptimalIter {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        let digits = self.digits.as_mut()?;
        let out = decode_digits(&self.path, digits);
        let mut carry = true;
        for (d, &r) in digits.iter_mut().zip(&self.radices) {
            *d += 1;
            if *d < r {
                carry = false;
                break;
            }
            *d = 0;
        }
        if carry {
            self.digits = None;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::to_canonical_instance;

    fn p(s: &str) -> SignPath {
        s.parse().unwrap()
    }

    fn inst(w: &[f64], b: &[f64]) -> Instance {
        Instance::new(w.to_vec(), b.to_vec()).unwrap()
    }

    fn pairs(m: &Matching) -> Vec<(usize, usize)> {
        m.pairs()
    }

    #[test]
    fn cost_examples() {
        let i1 = inst(&[1.0], &[2.0]);
        assert_eq!(cost(&i1, &Matching::identity(1)).unwrap(), 1.0);

        let i2 = inst(&[1.0, 2.0], &[3.0, 4.0]);
        let swap = Matching::new(vec![1, 0]).unwrap();
        assert_eq!(cost(&i2, &Matching::identity(2)).unwrap(), 4.0);
        assert_eq!(cost(&i2, &swap).unwrap(), 4.0);

        let i3 = inst(&[1.0, 4.0], &[2.0, 3.0]);
        assert_eq!(cost(&i3, &Matching::identity(2)).unwrap(), 2.0);
        assert_eq!(cost(&i3, &swap).unwrap(), 4.0);

        assert!(matches!(
            cost(&i3, &Matching::identity(3)),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn instance_validation() {
        assert!(matches!(
            Instance::new(vec![1.0, 2.0], vec![2.0, 3.0]),
            Err(Error::DuplicateCoordinate(_))
        ));
        assert!(matches!(
            Instance::new(vec![1.0, 1.0], vec![2.0, 3.0]),
            Err(Error::DuplicateCoordinate(_))
        ));
        assert!(matches!(
            Instance::new(vec![1.0], vec![2.0, 3.0]),
            Err(Error::SizeMismatch { .. })
        ));
        assert!(Instance::new(vec![f64::NAN], vec![1.0]).is_err());
        let sorted = inst(&[3.0, 1.0], &[4.0, 2.0]);
        assert_eq!(sorted.whites(), &[1.0, 3.0]);
    }

    #[test]
    fn profiles() {
        let i = inst(&[1.0, 2.0], &[3.0, 4.0]);
        let kp = k_pi_profile(&i, &Matching::identity(2)).unwrap();
        assert_eq!(kp.values, vec![0, 1, 2, 1, 0]);
        assert_eq!(kp.integral(), 4.0);
        let lb = k_lb_profile(&i);
        assert_eq!(lb.values, vec![0, 1, 2, 1, 0]);
        assert_eq!(h_lb(&i), 4.0);

        let i = inst(&[1.0, 3.0], &[2.0, 4.0]);
        assert_eq!(k_lb_profile(&i).values, vec![0, 1, 0, 1, 0]);
        assert_eq!(h_lb(&i), 2.0);

        let i = inst(&[0.7], &[0.2]);
        assert_eq!(k_pi_profile(&i, &Matching::identity(1)).unwrap().values, vec![0, 1, 0]);
    }

    // Fig. 2 configuration WWBBWBWBWBWB with the drawn links.
    fn figure_two() -> (SignPath, Matching) {
        let path = p("UUDDUDUDUDUD");
        let m = Matching::from_pairs(&[(1, 3), (2, 1), (3, 4), (4, 2), (5, 6), (6, 5)]).unwrap();
        (path, m)
    }

    #[test]
    fn stacks_of_figure_two() {
        let (path, m) = figure_two();
        assert_eq!(stack(&path, &m, 2).unwrap(), vec![Point::white(1), Point::white(2)]);
        assert_eq!(
            stack(&path, &m, 5).unwrap(),
            vec![Point::white(1), Point::black(2), Point::white(3)]
        );
        assert_eq!(stack(&path, &m, 8).unwrap(), vec![]);
        assert_eq!(stack(&path, &m, 10).unwrap(), vec![Point::white(5), Point::black(5)]);
        assert!(matches!(stack(&path, &m, 0), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(stack(&path, &m, 13), Err(Error::IndexOutOfRange { .. })));
        assert!(!is_optimal(&path, &m).unwrap());
    }

    #[test]
    fn optimality_small_cases() {
        let id = Matching::identity(2);
        let swap = Matching::new(vec![1, 0]).unwrap();
        assert!(is_optimal(&p("UUDD"), &id).unwrap());
        assert!(is_optimal(&p("UUDD"), &swap).unwrap());
        assert!(is_optimal(&p("UDDU"), &id).unwrap());
        assert!(!is_optimal(&p("UDDU"), &swap).unwrap());
    }

    #[test]
    fn counts_and_entropies() {
        let z = |s: &str| count_optimal(&p(s)).unwrap().count;
        assert_eq!(z("UDUD"), BigUint::from(1u32));
        assert_eq!(z("UUDD"), BigUint::from(2u32));
        assert_eq!(z("UUUDDD"), BigUint::from(6u32));
        assert_eq!(z(""), BigUint::from(1u32));
        assert_eq!(entropy(&p("UDUD")).unwrap(), 0.0);
        assert!((entropy(&p("UUDD")).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!((entropy(&p("UUUDDD")).unwrap() - 6f64.ln()).abs() < 1e-15);
        assert!(matches!(count_optimal(&p("UUUD")), Err(Error::NotABridge { .. })));
        assert!(matches!(entropy(&p("UUUD")), Err(Error::NotABridge { .. })));
    }

    #[test]
    fn decode_examples() {
        let one = BigUint::from(1u32);
        let two = BigUint::from(2u32);
        let m1 = decode_mth(&p("UUDD"), &one).unwrap();
        assert_eq!(pairs(&m1), vec![(1, 1), (2, 2)]);
        let m2 = decode_mth(&p("UUDD"), &two).unwrap();
        assert_eq!(pairs(&m2), vec![(1, 2), (2, 1)]);
        assert_eq!(decode_mth(&p("UDUD"), &one).unwrap(), Matching::identity(2));
        assert!(matches!(
            decode_mth(&p("UUDD"), &BigUint::from(3u32)),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            decode_mth(&p("UUDD"), &BigUint::from(0u32)),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn decode_below_axis() {
        // Black points open first; the white closers pick among them.
        let fam = count_optimal(&p("DDUU")).unwrap();
        let all: Vec<_> = fam.iter().map(|m| pairs(&m)).collect();
        assert_eq!(all, vec![vec![(1, 1), (2, 2)], vec![(1, 2), (2, 1)]]);
    }

    #[test]
    fn enumeration_sizes() {
        assert_eq!(enumerate_optimal(&p("UUDD")).unwrap().count(), 2);
        assert_eq!(enumerate_optimal(&p("UDUD")).unwrap().count(), 1);
        let empty: Vec<_> = enumerate_optimal(&SignPath::empty()).unwrap().collect();
        assert_eq!(empty, vec![Matching::identity(0)]);
        assert_eq!(enumerate_optimal(&p("UUUDDD")).unwrap().count(), 6);
    }

    #[test]
    fn enumeration_agrees_with_decode() {
        let path = p("UUDUDDDUUD");
        let fam = count_optimal(&path).unwrap();
        for (idx, m) in fam.iter().enumerate() {
            let decoded = fam.decode(&BigUint::from(idx as u64 + 1)).unwrap();
            assert_eq!(m, decoded);
        }
    }

    #[test]
    fn ordered_matching_attains_lower_bound() {
        let path = p("UDDUUUDDDUDU");
        let i = to_canonical_instance(&path).unwrap();
        let id = Matching::identity(path.size());
        assert_eq!(cost(&i, &id).unwrap(), h_lb(&i));
        assert!(is_optimal(&path, &id).unwrap());
    }

    #[test]
    fn product_of_many_radices() {
        let radices: Vec<u64> = (1..=30).collect();
        let expected = (1..=30u32).fold(BigUint::one(), |acc, x| acc * x);
        assert_eq!(product(&radices), expected);
    }
}
