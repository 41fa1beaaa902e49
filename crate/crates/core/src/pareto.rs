//! Post-training model selection: Pareto front, pseudo-weights, preference match.

use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::metrics::SolutionVector;

const UNIFORM: [f64; 3] = [1.0 / 3.0; 3];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontEntry {
    pub solution: SolutionVector,
    pub pseudo_weight: [f64; 3],
}

/// Non-dominated solutions sorted by round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoFront {
    pub entries: Vec<FrontEntry>,
    /// Number of solutions the front was extracted from.
    pub source_count: usize,
}

impl ParetoFront {
    pub fn rounds(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.solution.round)
    }

    pub fn get(&self, round: usize) -> Option<&FrontEntry> {
        self.entries.iter().find(|e| e.solution.round == round)
    }
}

fn lex_cmp(a: &SolutionVector, b: &SolutionVector) -> Ordering {
    a.o1.total_cmp(&b.o1).then(a.o2.total_cmp(&b.o2)).then(a.o3.total_cmp(&b.o3)).then(a.round.cmp(&b.round))
}

fn same_point(a: &SolutionVector, b: &SolutionVector) -> bool {
    a.objectives() == b.objectives()
}

/// Non-dominated subset of `solutions` (minimization on all three objectives).
///
/// Exact duplicates collapse onto the smallest round. Pseudo-weights are
/// filled in; see [`pseudo_weights`].
pub fn pareto_front(solutions: &[SolutionVector]) -> Result<ParetoFront> {
    if solutions.is_empty() {
        bail!(Argument, "cannot build a Pareto front from zero solutions");
    }
    if solutions.iter().any(|s| s.objectives().iter().any(|v| !v.is_finite())) {
        bail!(Argument, "solution vectors must be finite");
    }
    // After a lexicographic sort a point can only be dominated (or duplicated)
    // by something earlier, and whatever dominates it is dominated by or equal
    // to a kept point.
    let mut sorted: Vec<&SolutionVector> = solutions.iter().collect();
    sorted.sort_by(|a, b| lex_cmp(a, b));
    let mut kept: Vec<SolutionVector> = Vec::new();
    for s in sorted {
        if kept.iter().any(|k| k.dominates(s) || same_point(k, s)) {
            continue;
        }
        kept.push(*s);
    }
    kept.sort_by_key(|s| s.round);
    let entries = kept.into_iter().map(|solution| FrontEntry { solution, pseudo_weight: UNIFORM }).collect();
    Ok(pseudo_weights(ParetoFront { entries, source_count: solutions.len() }))
}

/// Fills every entry's pseudo-weight: for objective `i`,
/// `(max_i - o_i) / (max_i - min_i)` normalized over the three objectives,
/// with max/min taken within the front.
///
/// An objective that is constant across the front contributes 0. If every
/// term of an entry is 0 (single-point front) its weight is uniform.
pub fn pseudo_weights(mut front: ParetoFront) -> ParetoFront {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for e in &front.entries {
        for (i, v) in e.solution.objectives().into_iter().enumerate() {
            lo[i] = lo[i].min(v);
            hi[i] = hi[i].max(v);
        }
    }
    for e in &mut front.entries {
        let o = e.solution.objectives();
        let mut terms = [0.0; 3];
        for i in 0..3 {
            let range = hi[i] - lo[i];
            if range > 0.0 {
                terms[i] = (hi[i] - o[i]) / range;
            }
        }
        let total: f64 = terms.iter().sum();
        e.pseudo_weight = if total > 0.0 { terms.map(|t| t / total) } else { UNIFORM };
    }
    front
}

/// User preference over (O1, O2, O3), normalized to sum 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct PreferenceVector([f64; 3]);

impl PreferenceVector {
    /// Normalizes `raw` by its sum. Negative or non-finite components are
    /// rejected; the all-zero vector means "no preference" and maps to uniform.
    pub fn new(raw: [f64; 3]) -> Result<Self> {
        if raw.iter().any(|u| !u.is_finite() || *u < 0.0) {
            bail!(Argument, "preference components must be finite and non-negative, got {raw:?}");
        }
        let total: f64 = raw.iter().sum();
        if total == 0.0 {
            return Ok(Self::uniform());
        }
        Ok(PreferenceVector(raw.map(|u| u / total)))
    }

    pub fn uniform() -> Self {
        PreferenceVector(UNIFORM)
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }
}

impl TryFrom<[f64; 3]> for PreferenceVector {
    type Error = crate::Error;

    fn try_from(raw: [f64; 3]) -> Result<Self> {
        PreferenceVector::new(raw)
    }
}

impl From<PreferenceVector> for [f64; 3] {
    fn from(p: PreferenceVector) -> [f64; 3] {
        p.0
    }
}

/// L1 distance between a pseudo-weight and a preference.
pub fn l1_distance(w: &[f64; 3], u: &[f64; 3]) -> f64 {
    (w[0] - u[0]).abs() + (w[1] - u[1]).abs() + (w[2] - u[2]).abs()
}

/// Front entry whose pseudo-weight is L1-closest to `preference`; ties go to
/// the smallest round.
pub fn select<'a>(front: &'a ParetoFront, preference: &PreferenceVector) -> Result<&'a FrontEntry> {
    let u = preference.components();
    let mut best: Option<(&FrontEntry, f64)> = None;
    for e in &front.entries {
        let d = l1_distance(&e.pseudo_weight, &u);
        best = match best {
            Some((b, bd)) if bd < d || (bd == d && b.solution.round <= e.solution.round) => Some((b, bd)),
            _ => Some((e, d)),
        };
    }
    match best {
        Some((e, _)) => Ok(e),
        None => bail!(Argument, "cannot select from an empty front"),
    }
}

/// Drops solutions of the first `burn_in` rounds before front extraction.
pub fn after_burn_in(solutions: &[SolutionVector], burn_in: usize) -> Result<Vec<SolutionVector>> {
    let kept: Vec<_> = solutions.iter().filter(|s| s.round > burn_in).copied().collect();
    if kept.is_empty() {
        bail!(Argument, "burn-in of {burn_in} rounds leaves no solutions out of {}", solutions.len());
    }
    Ok(kept)
}
