use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::expr::{compile_equation, Expr, Node};
use super::signature::Signature;
use super::value::{Range, Value};
use crate::error::ValidationError;

/// A total assignment of values to the exogenous variables.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Context {
    pub values: Vec<(String, Value)>,
}

impl Context {
    pub fn new(values: Vec<(String, Value)>) -> Self {
        Context { values }
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.values.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

impl<S: Into<String>, V: Into<Value>> FromIterator<(S, V)> for Context {
    fn from_iter<I: IntoIterator<Item = (S, V)>>(iter: I) -> Self {
        Context::new(iter.into_iter().map(|(s, v)| (s.into(), v.into())).collect())
    }
}

/// Ordered bindings `[Y1 <- y1, ..., Yn <- yn]` of endogenous variables.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Intervention {
    pub bindings: Vec<(String, Value)>,
}

impl Intervention {
    pub fn new(bindings: Vec<(String, Value)>) -> Self {
        Intervention { bindings }
    }

    pub fn empty() -> Self {
        Intervention::default()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }
}

impl<S: Into<String>, V: Into<Value>> FromIterator<(S, V)> for Intervention {
    fn from_iter<I: IntoIterator<Item = (S, V)>>(iter: I) -> Self {
        Intervention::new(iter.into_iter().map(|(s, v)| (s.into(), v.into())).collect())
    }
}

impl fmt::Display for Intervention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (n, v)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n} <- {v}")?;
        }
        f.write_str("]")
    }
}

/// The unique solution of a model in a context, over every variable of the
/// original signature (including those removed by intervention).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    sig: Arc<Signature>,
    values: Vec<Value>,
}

impl Assignment {
    pub fn get(&self, name: &str) -> Option<&Value> {
        self.sig.index_of(name).map(|i| &self.values[i])
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    /// `(name, value)` for every variable, exogenous first.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.sig.names().zip(self.values.iter())
    }

    pub fn endogenous(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.iter().skip(self.sig.num_exogenous())
    }
}

/// Space-separated `NAME=value` pairs for the endogenous variables.
impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (n, v)) in self.endogenous().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{n}={v}")?;
        }
        Ok(())
    }
}

/// An acyclic structural equation model.
///
/// Intervened variables stay in the index space as pinned constants, so that
/// assignments and formulas can still refer to them; [`CausalModel::signature`]
/// reports the reduced signature without them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalModel {
    full: Arc<Signature>,
    reduced: Signature,
    equations: Vec<Option<Expr>>,
    pinned: Vec<Option<Value>>,
    nodes: Vec<Option<Node>>,
    order: Vec<usize>,
}

impl CausalModel {
    /// Validates and builds a model. Equations may be given in any order;
    /// the first error in declaration order is reported.
    pub fn build(
        signature: Signature,
        equations: Vec<(String, Expr)>,
    ) -> Result<Self, ValidationError> {
        let n = signature.num_endogenous();
        let mut eqs: Vec<Option<Expr>> = vec![None; n];
        for (name, e) in equations {
            match signature.endo_index(&name) {
                Some(j) if eqs[j].is_some() => return Err(ValidationError::DuplicateVariable(name)),
                Some(j) => eqs[j] = Some(e),
                None => return Err(ValidationError::UnexpectedEquation(name)),
            }
        }
        if let Some(j) = eqs.iter().position(Option::is_none) {
            return Err(ValidationError::MissingEquation(
                signature.endogenous()[j].0.clone(),
            ));
        }
        Self::assemble(Arc::new(signature), eqs, vec![None; n])
    }

    fn assemble(
        full: Arc<Signature>,
        equations: Vec<Option<Expr>>,
        pinned: Vec<Option<Value>>,
    ) -> Result<Self, ValidationError> {
        let k = full.num_exogenous();
        let mut nodes = Vec::with_capacity(equations.len());
        for (j, e) in equations.iter().enumerate() {
            nodes.push(match e {
                Some(e) => Some(compile_equation(&full, k + j, e)?),
                None => None,
            });
        }
        for (j, p) in pinned.iter().enumerate() {
            if let Some(v) = p {
                if !full.range(k + j).contains(v) {
                    return Err(ValidationError::RangeMismatch {
                        variable: full.name(k + j).to_string(),
                        value: v.to_string(),
                    });
                }
            }
        }
        let reduced = Signature::new(
            full.exogenous().to_vec(),
            full.endogenous()
                .iter()
                .zip(&pinned)
                .filter(|(_, p)| p.is_none())
                .map(|(e, _)| e.clone())
                .collect(),
        )?;
        let mut model = CausalModel {
            full,
            reduced,
            equations,
            pinned,
            nodes,
            order: Vec::new(),
        };
        let parents = model.endo_parents();
        if let Some(cycle) = find_cycle(&parents) {
            return Err(ValidationError::CyclicDependency(
                cycle.into_iter().map(|j| model.endo_name(j).to_string()).collect(),
            ));
        }
        model.order = topo_order(&parents, false);
        Ok(model)
    }

    /// The signature over which the model is currently defined.
    pub fn signature(&self) -> &Signature {
        &self.reduced
    }

    /// The signature before any intervention.
    pub fn full_signature(&self) -> &Signature {
        &self.full
    }

    pub fn num_endogenous(&self) -> usize {
        self.full.num_endogenous()
    }

    pub(crate) fn num_exogenous(&self) -> usize {
        self.full.num_exogenous()
    }

    pub(crate) fn endo_name(&self, j: usize) -> &str {
        &self.full.endogenous()[j].0
    }

    pub(crate) fn endo_range(&self, j: usize) -> &Range {
        &self.full.endogenous()[j].1
    }

    /// Equation of `name`, or `None` for exogenous, unknown or intervened
    /// variables.
    pub fn equation(&self, name: &str) -> Option<&Expr> {
        self.full
            .endo_index(name)
            .and_then(|j| self.equations[j].as_ref())
    }

    /// Variables removed by intervention with their constants.
    pub fn pinned(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.pinned
            .iter()
            .enumerate()
            .filter_map(|(j, p)| p.as_ref().map(|v| (self.endo_name(j), v)))
    }

    /// Endogenous parents (by endogenous index) of each endogenous variable
    /// in the syntactic dependency graph.
    pub(crate) fn endo_parents(&self) -> Vec<Vec<usize>> {
        let k = self.num_exogenous();
        self.nodes
            .iter()
            .map(|n| match n {
                Some(n) => {
                    let mut s = BTreeSet::new();
                    n.support(&mut s);
                    s.into_iter().filter_map(|i| i.checked_sub(k)).collect()
                }
                None => Vec::new(),
            })
            .collect()
    }

    /// Support of endogenous variable `j`'s equation in the full index space.
    pub(crate) fn support(&self, j: usize) -> Vec<usize> {
        let mut s = BTreeSet::new();
        if let Some(n) = &self.nodes[j] {
            n.support(&mut s);
        }
        s.into_iter().collect()
    }

    pub(crate) fn node(&self, j: usize) -> Option<&Node> {
        self.nodes[j].as_ref()
    }

    /// Two topological orders of the endogenous variables: smallest index
    /// first and largest index first.
    pub fn topological_orders(&self) -> (Vec<usize>, Vec<usize>) {
        let parents = self.endo_parents();
        (topo_order(&parents, false), topo_order(&parents, true))
    }

    /// Checks a context against the exogenous variables and returns its
    /// values in index order.
    pub fn resolve_context(&self, ctx: &Context) -> Result<Vec<Value>, ValidationError> {
        let mut out: Vec<Option<Value>> = vec![None; self.num_exogenous()];
        for (name, v) in &ctx.values {
            let i = match self.full.index_of(name) {
                Some(i) if i < out.len() => i,
                _ => return Err(ValidationError::UnknownVariable(name.clone())),
            };
            if out[i].is_some() {
                return Err(ValidationError::DuplicateVariable(name.clone()));
            }
            if !self.full.range(i).contains(v) {
                return Err(ValidationError::RangeMismatch {
                    variable: name.clone(),
                    value: v.to_string(),
                });
            }
            out[i] = Some(v.clone());
        }
        out.into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| ValidationError::MissingContextValue(self.full.name(i).to_string())))
            .collect()
    }

    /// Resolves an intervention to per-endogenous-variable overrides.
    pub fn resolve_intervention(
        &self,
        iv: &Intervention,
    ) -> Result<Vec<Option<Value>>, ValidationError> {
        let mut out = vec![None; self.num_endogenous()];
        for (name, v) in &iv.bindings {
            let j = self
                .full
                .endo_index(name)
                .ok_or_else(|| ValidationError::UnknownVariable(name.clone()))?;
            if out[j].is_some() {
                return Err(ValidationError::DuplicateIntervention(name.clone()));
            }
            if !self.endo_range(j).contains(v) {
                return Err(ValidationError::RangeMismatch {
                    variable: name.clone(),
                    value: v.to_string(),
                });
            }
            out[j] = Some(v.clone());
        }
        Ok(out)
    }

    pub fn evaluate(&self, ctx: &Context) -> Result<Assignment, ValidationError> {
        let exo = self.resolve_context(ctx)?;
        Ok(self.assignment(self.solve(&exo, &[])))
    }

    /// Evaluates in a caller-chosen order of endogenous indices, which must
    /// be topological.
    pub fn evaluate_in_order(
        &self,
        ctx: &Context,
        order: &[usize],
    ) -> Result<Assignment, ValidationError> {
        let exo = self.resolve_context(ctx)?;
        Ok(self.assignment(self.solve_in(&exo, &[], order)))
    }

    pub(crate) fn assignment(&self, values: Vec<Value>) -> Assignment {
        Assignment {
            sig: Arc::clone(&self.full),
            values,
        }
    }

    /// Solves the equations with `overlay[j]` (when present) replacing the
    /// equation of endogenous variable `j`. A short overlay leaves the
    /// remaining variables untouched.
    pub(crate) fn solve(&self, exo: &[Value], overlay: &[Option<Value>]) -> Vec<Value> {
        self.solve_in(exo, overlay, &self.order)
    }

    fn solve_in(&self, exo: &[Value], overlay: &[Option<Value>], order: &[usize]) -> Vec<Value> {
        let k = exo.len();
        let mut env = Vec::with_capacity(k + self.num_endogenous());
        env.extend_from_slice(exo);
        env.resize(k + self.num_endogenous(), Value::Bot);
        for &j in order {
            env[k + j] = if let Some(Some(v)) = overlay.get(j) {
                v.clone()
            } else if let Some(v) = &self.pinned[j] {
                v.clone()
            } else {
                self.nodes[j].as_ref().expect("unpinned variable has an equation").value(&env)
            };
        }
        env
    }

    /// The model `M_{Y <- y}`: each intervened variable loses its equation
    /// and is replaced by its constant in every remaining equation.
    ///
    /// Re-intervening on an already pinned variable replaces its constant.
    pub fn intervene(&self, iv: &Intervention) -> Result<CausalModel, ValidationError> {
        let overlay = self.resolve_intervention(iv)?;
        let mut pinned = self.pinned.clone();
        for (j, v) in overlay.iter().enumerate() {
            if v.is_some() {
                pinned[j] = v.clone();
            }
        }
        let lookup = |name: &str| {
            self.full
                .endo_index(name)
                .and_then(|j| overlay[j].clone())
        };
        let equations = self
            .equations
            .iter()
            .zip(&overlay)
            .map(|(e, o)| match (e, o) {
                (_, Some(_)) => None,
                (Some(e), None) => Some(e.substitute(&lookup)),
                (None, None) => None,
            })
            .collect();
        Self::assemble(Arc::clone(&self.full), equations, pinned)
    }
}

/// Kahn's algorithm with a deterministic tie-break.
fn topo_order(parents: &[Vec<usize>], largest_first: bool) -> Vec<usize> {
    let n = parents.len();
    let mut indeg: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut children = vec![Vec::new(); n];
    for (j, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(j);
        }
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&j| indeg[j] == 0).collect();
    let mut out = Vec::with_capacity(n);
    while let Some(j) = if largest_first {
        ready.pop_last()
    } else {
        ready.pop_first()
    } {
        out.push(j);
        for &c in &children[j] {
            indeg[c] -= 1;
            if indeg[c] == 0 {
                ready.insert(c);
            }
        }
    }
    out
}

/// Returns the members of some cycle, sorted, or `None` if acyclic.
fn find_cycle(parents: &[Vec<usize>]) -> Option<Vec<usize>> {
    let order = topo_order(parents, false);
    if order.len() == parents.len() {
        return None;
    }
    // Strip nodes that cannot reach back into the remainder.
    let mut alive: Vec<bool> = vec![true; parents.len()];
    for j in order {
        alive[j] = false;
    }
    loop {
        let mut changed = false;
        for j in 0..parents.len() {
            if alive[j] && !(0..parents.len()).any(|c| alive[c] && parents[c].contains(&j)) {
                alive[j] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    // Walk parent links from the first survivor until a node repeats.
    let start = alive.iter().position(|&a| a)?;
    let mut path = vec![start];
    let mut cur = start;
    loop {
        cur = *parents[cur].iter().find(|&&p| alive[p])?;
        if let Some(pos) = path.iter().position(|&p| p == cur) {
            let mut cycle = path.split_off(pos);
            cycle.sort_unstable();
            return Some(cycle);
        }
        path.push(cur);
    }
}
