//! Cause enumeration by exhaustive search.
//!
//! Every engine enumerates candidate sets by increasing cardinality, in
//! lexicographic order of variable positions, and skips supersets of sets
//! already accepted. Outputs are therefore minimal and appear in that order.

mod actual;
mod family;
mod sufficient;

use std::fmt;

use crate::error::EngineError;
use crate::model::{CausalModel, CompiledFormula, Context, Formula, Intervention, Value};
use crate::DEFAULT_SEARCH_LIMIT;

pub use actual::{actual_causes, actual_causes_restricted, cfn_causes};
pub use family::{dual_transform, minimal_sets, CauseFamily};
pub use sufficient::{
    cfpsc, holds_under_all_sweeps, sufficiency_family, sufficient_causes,
    sufficient_causes_restricted, SufficiencyKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineOptions {
    /// Largest number of points a single quantifier may enumerate.
    pub limit: u64,
    /// Report every witness of an actual cause instead of the first.
    pub all_witnesses: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            limit: DEFAULT_SEARCH_LIMIT,
            all_witnesses: false,
        }
    }
}

/// Variables of a cause with their actual values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cause {
    pub variables: Vec<String>,
    pub values: Vec<Value>,
}

impl Cause {
    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }
}

/// `(V1=v1, V2=v2)`.
impl fmt::Display for Cause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, (n, v)) in self.variables.iter().zip(&self.values).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n}={v}")?;
        }
        f.write_str(")")
    }
}

/// Contingency `W <- w` (actual values) and counterfactual `X <- x'` under
/// which the formula fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyWitness {
    pub contingency: Intervention,
    pub counterfactual: Intervention,
}

impl ContingencyWitness {
    /// The intervention `[X <- x', W <- w]`.
    pub fn combined(&self) -> Intervention {
        let mut b = self.counterfactual.bindings.clone();
        b.extend(self.contingency.bindings.iter().cloned());
        Intervention::new(b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActualCause {
    pub cause: Cause,
    pub witnesses: Vec<ContingencyWitness>,
}

/// A necessary cause under the bottom fix with its falsifying setting.
/// `fixed` is the bottom fix the counterfactual was evaluated under.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfnCause {
    pub cause: Cause,
    pub counterfactual: Intervention,
    pub fixed: Intervention,
}

/// Removes the outcome variable of a primitive formula from every cause and
/// drops causes that become empty.
pub fn strip_outcome(causes: &[Cause], formula: &Formula) -> Result<Vec<Cause>, EngineError> {
    let (outcome, _) = formula.as_event().ok_or(EngineError::NotPrimitive)?;
    Ok(causes
        .iter()
        .filter_map(|c| {
            let (variables, values): (Vec<_>, Vec<_>) = c
                .variables
                .iter()
                .zip(&c.values)
                .filter(|(n, _)| *n != outcome)
                .map(|(n, v)| (n.clone(), v.clone()))
                .unzip();
            (!variables.is_empty()).then_some(Cause { variables, values })
        })
        .collect())
}

/// Product of the range sizes, refused when above `limit`.
pub(crate) fn check_space(what: &str, ranges: &[&[Value]], limit: u64) -> Result<u128, EngineError> {
    let mut size: u128 = 1;
    for r in ranges {
        size = size.saturating_mul(r.len() as u128);
    }
    if size > limit as u128 {
        return Err(EngineError::SearchSpaceExceeded {
            what: what.to_string(),
            size,
            limit,
        });
    }
    Ok(size)
}

/// Calls `f` on every point of the Cartesian product, first range slowest,
/// until `f` returns false. Returns whether the enumeration completed.
pub(crate) fn for_each_product<'a>(
    ranges: &[&'a [Value]],
    mut f: impl FnMut(&[&'a Value]) -> bool,
) -> bool {
    if ranges.iter().any(|r| r.is_empty()) {
        return true;
    }
    let mut idx = vec![0usize; ranges.len()];
    let mut point: Vec<&Value> = ranges.iter().map(|r| &r[0]).collect();
    loop {
        if !f(&point) {
            return false;
        }
        let mut d = ranges.len();
        loop {
            if d == 0 {
                return true;
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < ranges[d].len() {
                point[d] = &ranges[d][idx[d]];
                break;
            }
            idx[d] = 0;
            point[d] = &ranges[d][0];
        }
    }
}

/// Subsets of `0..n` of size `k` as bitmasks, in lexicographic order of
/// their sorted elements.
pub(crate) fn combinations(n: usize, k: usize) -> impl Iterator<Item = u64> {
    let mut idx: Vec<usize> = (0..k).collect();
    let mut done = k > n;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let mask = idx.iter().fold(0u64, |m, &i| m | 1 << i);
        // Advance to the next combination.
        let mut i = k;
        loop {
            if i == 0 {
                done = true;
                break;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(mask)
    })
}

/// Positions set in `mask`, ascending.
pub(crate) fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask >> i & 1 == 1)
}

/// Minimal nonempty subsets of `0..n` accepted by `accept`, enumerated by
/// increasing size with superset pruning.
pub(crate) fn minimal_subsets(
    n: usize,
    what: &str,
    limit: u64,
    mut accept: impl FnMut(u64) -> Result<bool, EngineError>,
) -> Result<Vec<u64>, EngineError> {
    check_subsets(what, n, limit)?;
    let mut found: Vec<u64> = Vec::new();
    for k in 1..=n {
        for mask in combinations(n, k) {
            if found.iter().any(|&f| f & mask == f) {
                continue;
            }
            if accept(mask)? {
                found.push(mask);
            }
        }
    }
    Ok(found)
}

pub(crate) fn check_subsets(what: &str, n: usize, limit: u64) -> Result<(), EngineError> {
    let size = if n >= 127 { u128::MAX } else { 1u128 << n };
    if n > 63 || size > limit as u128 {
        return Err(EngineError::SearchSpaceExceeded {
            what: format!("subsets of {what}"),
            size,
            limit,
        });
    }
    Ok(())
}

/// A model in a context with a compiled formula that holds there.
pub(crate) struct Situation<'m> {
    pub model: &'m CausalModel,
    pub exo: Vec<Value>,
    pub actual: Vec<Value>,
    pub phi: CompiledFormula,
    pub limit: u64,
}

impl<'m> Situation<'m> {
    pub fn new(
        model: &'m CausalModel,
        ctx: &Context,
        formula: &Formula,
        limit: u64,
    ) -> Result<Self, EngineError> {
        let exo = model.resolve_context(ctx)?;
        let phi = formula.compile(model)?;
        let actual = model.solve(&exo, &[]);
        if !phi.holds(&actual) {
            return Err(EngineError::NoOccurrence);
        }
        Ok(Situation {
            model,
            exo,
            actual,
            phi,
            limit,
        })
    }

    pub fn k(&self) -> usize {
        self.model.num_exogenous()
    }

    pub fn actual_endo(&self, j: usize) -> &Value {
        &self.actual[self.k() + j]
    }

    pub fn holds(&self, overlay: &[Option<Value>]) -> bool {
        self.phi.holds(&self.model.solve(&self.exo, overlay))
    }

    /// Whether the formula holds for every setting of `sweep` (endogenous
    /// indices) on top of `overlay`.
    pub fn holds_for_all(
        &self,
        overlay: &mut [Option<Value>],
        sweep: &[usize],
    ) -> Result<bool, EngineError> {
        let ranges: Vec<&[Value]> = sweep
            .iter()
            .map(|&j| self.model.endo_range(j).values())
            .collect();
        check_space("sweep", &ranges, self.limit)?;
        Ok(for_each_product(&ranges, |z| {
            for (&j, v) in sweep.iter().zip(z) {
                overlay[j] = Some((*v).clone());
            }
            self.holds(overlay)
        }))
    }

    pub fn cause(&self, vars: &[usize]) -> Cause {
        Cause {
            variables: vars.iter().map(|&j| self.model.endo_name(j).to_string()).collect(),
            values: vars.iter().map(|&j| self.actual_endo(j).clone()).collect(),
        }
    }

    /// Endogenous indices of the current (non-pinned) signature.
    pub fn live(&self) -> Vec<usize> {
        let full = self.model.full_signature();
        self.model
            .signature()
            .endogenous()
            .iter()
            .map(|(n, _)| full.endo_index(n).expect("reduced signature is a subset"))
            .collect()
    }

    /// Overlay setting every control variable outside the actual flow to bot.
    pub fn bottom_overlay(&self, control: &[usize]) -> Vec<Option<Value>> {
        let mut overlay = vec![None; self.model.num_endogenous()];
        for &j in control {
            if *self.actual_endo(j) != Value::Top {
                overlay[j] = Some(Value::Bot);
            }
        }
        overlay
    }

    pub fn overlay_to_intervention(&self, overlay: &[Option<Value>]) -> Intervention {
        Intervention::new(
            overlay
                .iter()
                .enumerate()
                .filter_map(|(j, v)| {
                    v.as_ref()
                        .map(|v| (self.model.endo_name(j).to_string(), v.clone()))
                })
                .collect(),
        )
    }
}

/// Picks the universe elements selected by `mask`.
pub(crate) fn select(universe: &[usize], mask: u64) -> Vec<usize> {
    bits(mask).map(|i| universe[i]).collect()
}
