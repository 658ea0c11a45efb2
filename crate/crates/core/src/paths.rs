//! Sign sequences of bicolored point configurations, read as lattice paths.
//!
//! A configuration of `N` white and `N` black points on a segment is encoded
//! by the colors of its points in increasing order: `+1` for white, `-1` for
//! black. The same vector is a lattice path with up-steps and down-steps, a
//! Dyck bridge when the sum vanishes and an excursion when in addition no
//! prefix sum is negative.
//!
//! Heights are kept doubled (`2 h_i`, always odd) so that everything stays in
//! integer arithmetic. Step indices in reports are 1-based.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::Instance;

/// A sequence of `±1` steps of even length.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignPath {
    steps: Vec<i8>,
}

/// Statistical ensemble of color orderings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ensemble {
    Bridge,
    Excursion,
}

/// Result of [`classify`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathClass {
    Bridge,
    Excursion,
    Neither,
}

/// Midpoint heights of every step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeightProfile {
    /// `2 h_i = 2 (σ_1 + … + σ_{i-1}) + σ_i`, odd.
    pub doubled_heights: Vec<i64>,
    /// `h̄_i = |h_i| + 1/2`, a positive integer.
    pub hbar: Vec<u64>,
}

/// A step that moves the path towards height zero (`h_t σ_t < 0`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClosingStep {
    /// 1-based step position.
    pub index: usize,
    /// Stack size seen by this step.
    pub hbar: u64,
}

impl SignPath {
    pub fn new(steps: Vec<i8>) -> Result<Self> {
        if let Some(bad) = steps.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::Parse(format!("step {bad} is not ±1")));
        }
        if !steps.len().is_multiple_of(2) {
            return Err(Error::Parse(format!("odd path length {}", steps.len())));
        }
        Ok(Self { steps })
    }

    /// Builds a path from a sequence already known to hold only `±1` values
    /// and to have even length.
    pub(crate) fn from_steps_unchecked(steps: Vec<i8>) -> Self {
        debug_assert!(steps.len().is_multiple_of(2));
        debug_assert!(steps.iter().all(|&s| s == 1 || s == -1));
        Self { steps }
    }

    pub fn empty() -> Self {
        Self { steps: Vec::new() }
    }

    pub fn steps(&self) -> &[i8] {
        &self.steps
    }

    pub fn into_steps(self) -> Vec<i8> {
        self.steps
    }

    /// Number of steps, `2N`.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Semi-length `N`.
    pub fn size(&self) -> usize {
        self.steps.len() / 2
    }

    pub fn sum(&self) -> i64 {
        self.steps.iter().map(|&s| i64::from(s)).sum()
    }

    pub fn classify(&self) -> PathClass {
        classify(&self.steps)
    }

    pub fn is_bridge(&self) -> bool {
        self.sum() == 0
    }

    /// Fails with [`Error::NotABridge`] unless the steps sum to zero.
    pub fn ensure_bridge(&self) -> Result<()> {
        let sum = self.sum();
        if sum == 0 {
            Ok(())
        } else {
            Err(Error::NotABridge { len: self.len(), sum })
        }
    }

    /// Concatenation of two paths.
    pub fn concat(&self, other: &SignPath) -> SignPath {
        let mut steps = self.steps.clone();
        steps.extend_from_slice(&other.steps);
        SignPath { steps }
    }

    /// Reflection across the horizontal axis (swaps the colors).
    pub fn reflected(&self) -> SignPath {
        SignPath {
            steps: self.steps.iter().map(|&s| -s).collect(),
        }
    }

    /// 0-based positions of the white and of the black points, each list in
    /// increasing order. The `k`-th entry of the first list is white point `k`.
    pub fn color_positions(&self) -> (Vec<usize>, Vec<usize>) {
        let mut whites = Vec::with_capacity(self.size());
        let mut blacks = Vec::with_capacity(self.size());
        for (i, &s) in self.steps.iter().enumerate() {
            if s > 0 {
                whites.push(i);
            } else {
                blacks.push(i);
            }
        }
        (whites, blacks)
    }
}

impl fmt::Display for SignPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.steps {
            f.write_str(if s > 0 { "U" } else { "D" })?;
        }
        Ok(())
    }
}

impl FromStr for SignPath {
    type Err = Error;

    /// Accepts `U`/`D` strings (case-insensitive, whitespace ignored) or a
    /// JSON array of `±1`.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        if trimmed.starts_with('[') {
            let values: Vec<i64> =
                serde_json::from_str(trimmed).map_err(|e| Error::Parse(e.to_string()))?;
            let steps = values
                .into_iter()
                .map(|v| match v {
                    1 => Ok(1i8),
                    -1 => Ok(-1i8),
                    other => Err(Error::Parse(format!("step {other} is not ±1"))),
                })
                .collect::<Result<Vec<_>>>()?;
            return SignPath::new(steps);
        }
        let steps = trimmed
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                'U' | 'u' => Ok(1i8),
                'D' | 'd' => Ok(-1i8),
                other => Err(Error::Parse(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        SignPath::new(steps)
    }
}

impl Serialize for SignPath {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl Ensemble {
    pub fn name(self) -> &'static str {
        match self {
            Ensemble::Bridge => "bridge",
            Ensemble::Excursion => "excursion",
        }
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bridge" | "b" => Ok(Ensemble::Bridge),
            "excursion" | "e" | "dyck" => Ok(Ensemble::Excursion),
            other => Err(Error::Parse(format!("unknown ensemble {other:?}"))),
        }
    }
}

/// Classifies an arbitrary step sequence. Entries other than `±1`, odd
/// lengths and non-zero sums all give [`PathClass::Neither`].
pub fn classify(steps: &[i8]) -> PathClass {
    if !steps.len().is_multiple_of(2) || steps.iter().any(|&s| s != 1 && s != -1) {
        return PathClass::Neither;
    }
    let mut height = 0i64;
    let mut min = 0i64;
    for &s in steps {
        height += i64::from(s);
        min = min.min(height);
    }
    match (height, min) {
        (0, 0) => PathClass::Excursion,
        (0, _) => PathClass::Bridge,
        _ => PathClass::Neither,
    }
}

pub fn heights(path: &SignPath) -> HeightProfile {
    let mut doubled_heights = Vec::with_capacity(path.len());
    let mut hbar = Vec::with_capacity(path.len());
    let mut level = 0i64;
    for &s in path.steps() {
        let s = i64::from(s);
        let twice = 2 * level + s;
        doubled_heights.push(twice);
        hbar.push(twice.unsigned_abs().div_ceil(2));
        level += s;
    }
    HeightProfile {
        doubled_heights,
        hbar,
    }
}

/// Steps with `h_i σ_i < 0`, in increasing order. A bridge has exactly `N`.
pub fn closing_steps(path: &SignPath) -> Vec<ClosingStep> {
    let mut out = Vec::with_capacity(path.size());
    let mut level = 0i64;
    for (i, &s) in path.steps().iter().enumerate() {
        let s = i64::from(s);
        // h σ < 0 with h = level + σ/2 reduces to level·σ < 0, and then h̄ = |level|.
        if level * s < 0 {
            out.push(ClosingStep {
                index: i + 1,
                hbar: level.unsigned_abs(),
            });
        }
        level += s;
    }
    out
}

/// Colors of the instance's points in increasing coordinate order.
pub fn from_instance(inst: &Instance) -> SignPath {
    let whites = inst.whites();
    let blacks = inst.blacks();
    let mut steps = Vec::with_capacity(whites.len() + blacks.len());
    let (mut i, mut j) = (0, 0);
    while i < whites.len() || j < blacks.len() {
        if j == blacks.len() || (i < whites.len() && whites[i] < blacks[j]) {
            steps.push(1);
            i += 1;
        } else {
            steps.push(-1);
            j += 1;
        }
    }
    SignPath::from_steps_unchecked(steps)
}

/// Places point `i` (1-based) at coordinate `i`.
pub fn to_canonical_instance(path: &SignPath) -> Result<Instance> {
    path.ensure_bridge()?;
    let (w, b) = path.color_positions();
    let coord = |p: &usize| (*p + 1) as f64;
    Instance::new(w.iter().map(coord).collect(), b.iter().map(coord).collect())
}
