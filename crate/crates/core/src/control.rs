//! Control/data partition of a model and the checks built on it.

use crate::engines::{check_space, for_each_product};
use crate::error::{EngineError, ValidationError};
use crate::model::{CausalModel, Context, DependencyGraph, GraphMode, Intervention, Value};

/// Partition of the endogenous variables into control and data variables,
/// with the dependency graph restricted to the control variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlFlowSpec {
    control: Vec<String>,
    data: Vec<String>,
    control_idx: Vec<usize>,
    data_idx: Vec<usize>,
    graph: DependencyGraph,
    mode: GraphMode,
}

impl ControlFlowSpec {
    /// Control variables in declaration order.
    pub fn control_vars(&self) -> &[String] {
        &self.control
    }

    /// Data variables in declaration order.
    pub fn data_vars(&self) -> &[String] {
        &self.data
    }

    pub fn control_graph(&self) -> &DependencyGraph {
        &self.graph
    }

    pub fn graph_mode(&self) -> GraphMode {
        self.mode
    }

    pub fn is_control(&self, name: &str) -> bool {
        self.control.iter().any(|c| c == name)
    }

    pub fn is_empty(&self) -> bool {
        self.control.is_empty()
    }

    /// Endogenous indices of the control variables.
    pub(crate) fn control_indices(&self) -> &[usize] {
        &self.control_idx
    }

    /// Endogenous indices of the data variables.
    pub(crate) fn data_indices(&self) -> &[usize] {
        &self.data_idx
    }
}

/// The set of control variables evaluating to `top`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ControlFlowState {
    pub active: Vec<String>,
}

/// A context and data setting under which `variable` is not `bot` although
/// all its control parents are.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CFViolation {
    pub variable: String,
    pub context: Context,
    pub data_setting: Intervention,
}

/// Builds the control/data partition. `control_names` may be in any order.
pub fn make_spec(
    model: &CausalModel,
    control_names: &[String],
    mode: GraphMode,
    limit: u64,
) -> Result<ControlFlowSpec, EngineError> {
    let sig = model.signature();
    for name in control_names {
        let Some(range) = sig.range_of(name).filter(|_| sig.is_endogenous(name)) else {
            return Err(ValidationError::UnknownVariable(name.clone()).into());
        };
        if !range.is_control() {
            return Err(ValidationError::NonBooleanControlRange(name.clone()).into());
        }
    }
    let full = model.full_signature();
    let mut spec = ControlFlowSpec {
        control: Vec::new(),
        data: Vec::new(),
        control_idx: Vec::new(),
        data_idx: Vec::new(),
        graph: DependencyGraph::new(Vec::new(), []),
        mode,
    };
    for (name, _) in sig.endogenous() {
        let j = full.endo_index(name).expect("reduced signature is a subset");
        if control_names.contains(name) {
            spec.control.push(name.clone());
            spec.control_idx.push(j);
        } else {
            spec.data.push(name.clone());
            spec.data_idx.push(j);
        }
    }
    spec.graph = model.dependency_graph(mode, limit)?.restrict(&spec.control);
    Ok(spec)
}

/// Like [`make_spec`] with the semantic graph, falling back to the
/// syntactic graph when the semantic one exceeds `limit`.
pub fn make_spec_auto(
    model: &CausalModel,
    control_names: &[String],
    limit: u64,
) -> Result<ControlFlowSpec, EngineError> {
    match make_spec(model, control_names, GraphMode::Semantic, limit) {
        Err(EngineError::SearchSpaceExceeded { what, .. }) => {
            tracing::warn!(%what, "semantic control graph too large, using syntactic graph");
            make_spec(model, control_names, GraphMode::Syntactic, limit)
        }
        other => other,
    }
}

/// Checks that every control variable with at least one control parent is
/// `bot` whenever all its control parents are, for every context and every
/// setting of the data variables. Returns all counterexamples.
pub fn validate_bottom_propagation(
    model: &CausalModel,
    spec: &ControlFlowSpec,
    limit: u64,
) -> Result<Vec<CFViolation>, EngineError> {
    let g = &spec.graph;
    let checked: Vec<(usize, Vec<usize>)> = (0..spec.control.len())
        .map(|c| (c, g.parents(c)))
        .filter(|(_, ps)| !ps.is_empty())
        .collect();
    if checked.is_empty() {
        return Ok(Vec::new());
    }
    let sig = model.full_signature();
    let k = sig.num_exogenous();
    let mut ranges: Vec<&[Value]> = (0..k).map(|i| sig.range(i).values()).collect();
    ranges.extend(spec.data_idx.iter().map(|&j| sig.range(k + j).values()));
    check_space("bottom-propagation check", &ranges, limit)?;

    let mut out = Vec::new();
    let mut overlay = vec![None; model.num_endogenous()];
    for_each_product(&ranges, |vals| {
        let (exo, data) = vals.split_at(k);
        for (&j, v) in spec.data_idx.iter().zip(data) {
            overlay[j] = Some((*v).clone());
        }
        let exo: Vec<Value> = exo.iter().map(|v| (*v).clone()).collect();
        let env = model.solve(&exo, &overlay);
        let ctl = |c: usize| &env[k + spec.control_idx[c]];
        for (c, parents) in &checked {
            if parents.iter().all(|&p| *ctl(p) == Value::Bot) && *ctl(*c) != Value::Bot {
                out.push(CFViolation {
                    variable: spec.control[*c].clone(),
                    context: Context::new(
                        (0..k).map(|i| (sig.name(i).to_string(), exo[i].clone())).collect(),
                    ),
                    data_setting: Intervention::new(
                        spec.data
                            .iter()
                            .cloned()
                            .zip(data.iter().map(|v| (*v).clone()))
                            .collect(),
                    ),
                });
            }
        }
        true
    });
    Ok(out)
}

pub fn actual_control_flow(
    model: &CausalModel,
    spec: &ControlFlowSpec,
    ctx: &Context,
) -> Result<ControlFlowState, ValidationError> {
    let a = model.evaluate(ctx)?;
    Ok(ControlFlowState {
        active: spec
            .control
            .iter()
            .filter(|c| a.get(c) == Some(&Value::Top))
            .cloned()
            .collect(),
    })
}

/// Sets every control variable outside `state.active` to `bot`.
pub fn bottom_fix(spec: &ControlFlowSpec, state: &ControlFlowState) -> Intervention {
    Intervention::new(
        spec.control
            .iter()
            .filter(|c| !state.active.contains(c))
            .map(|c| (c.clone(), Value::Bot))
            .collect(),
    )
}

/// Whether the active control variables form a path starting at the root
/// of the control graph. Only defined when the control graph is a tree; an
/// empty active set counts as the empty path.
pub fn check_path_structure(
    model: &CausalModel,
    spec: &ControlFlowSpec,
    ctx: &Context,
) -> Result<bool, EngineError> {
    let g = &spec.graph;
    let n = g.nodes().len();
    let roots: Vec<usize> = (0..n).filter(|&v| g.parents(v).is_empty()).collect();
    let single_parent = (0..n).all(|v| g.parents(v).len() <= 1);
    let reach = roots.first().map(|&r| reachable(g, r)).unwrap_or(0);
    if n == 0 || roots.len() != 1 || !single_parent || reach != n {
        return Err(EngineError::NotApplicable(
            "control graph is not a tree".into(),
        ));
    }
    let state = actual_control_flow(model, spec, ctx)?;
    let active: Vec<usize> = state
        .active
        .iter()
        .filter_map(|a| g.index_of(a))
        .collect();
    if active.is_empty() {
        return Ok(true);
    }
    let mut cur = roots[0];
    let mut seen = 0;
    loop {
        if !active.contains(&cur) {
            return Ok(false);
        }
        seen += 1;
        let next: Vec<usize> = g
            .children(cur)
            .into_iter()
            .filter(|c| active.contains(c))
            .collect();
        match next.as_slice() {
            [] => return Ok(seen == active.len()),
            [c] => cur = *c,
            _ => return Ok(false),
        }
    }
}

fn reachable(g: &DependencyGraph, root: usize) -> usize {
    let mut seen = vec![false; g.nodes().len()];
    let mut stack = vec![root];
    let mut count = 0;
    while let Some(v) = stack.pop() {
        if std::mem::replace(&mut seen[v], true) {
            continue;
        }
        count += 1;
        stack.extend(g.children(v));
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Expr, Range, Signature};
    use crate::DEFAULT_SEARCH_LIMIT as LIMIT;

    fn control_model(eqs: Vec<(&str, Expr)>) -> CausalModel {
        let sig = Signature::new(
            vec![("U".into(), Range::binary())],
            eqs.iter().map(|(n, _)| (n.to_string(), Range::control())).collect(),
        )
        .unwrap();
        CausalModel::build(sig, eqs.into_iter().map(|(n, e)| (n.to_string(), e)).collect()).unwrap()
    }

    /// `R1 -> R2 -> R3` with `R2 = R1 and U = 1`, `R3 = R2 and U = 0`.
    fn chain() -> CausalModel {
        control_model(vec![
            ("R1", Expr::Const(Value::Top)),
            ("R2", Expr::And(vec![Expr::var("R1"), Expr::is("U", 1)])),
            ("R3", Expr::And(vec![Expr::var("R2"), Expr::is("U", 0)])),
        ])
    }

    fn ctx(u: i64) -> Context {
        [("U", u)].into_iter().collect()
    }

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn conjunctive_chain_propagates_bottom() {
        let m = chain();
        let spec = make_spec(&m, &names(&["R1", "R2", "R3"]), GraphMode::Semantic, LIMIT).unwrap();
        assert_eq!(spec.control_graph().named_edges(), [("R1", "R2"), ("R2", "R3")]);
        assert!(validate_bottom_propagation(&m, &spec, LIMIT).unwrap().is_empty());
    }

    #[test]
    fn two_node_negation_is_reported() {
        let sig = Signature::new(
            vec![("U".into(), Range::binary())],
            vec![("R1".into(), Range::control()), ("R2".into(), Range::control())],
        )
        .unwrap();
        let m = CausalModel::build(
            sig,
            vec![
                ("R1".into(), Expr::is("U", 1)),
                ("R2".into(), Expr::not(Expr::var("R1"))),
            ],
        )
        .unwrap();
        let spec = make_spec(&m, &names(&["R1", "R2"]), GraphMode::Semantic, LIMIT).unwrap();
        let v = validate_bottom_propagation(&m, &spec, LIMIT).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].variable, "R2");
        assert_eq!(v[0].context.get("U"), Some(&Value::Int(0)));
    }

    #[test]
    fn path_structure_on_chain() {
        let m = chain();
        let spec = make_spec(&m, &names(&["R1", "R2", "R3"]), GraphMode::Syntactic, LIMIT).unwrap();
        // Active {R1, R2}.
        assert!(check_path_structure(&m, &spec, &ctx(1)).unwrap());

        let gap = control_model(vec![
            ("R1", Expr::Const(Value::Top)),
            ("R2", Expr::And(vec![Expr::var("R1"), Expr::is("U", 0)])),
            ("R3", Expr::Or(vec![Expr::var("R2"), Expr::is("U", 1)])),
        ]);
        let spec = make_spec(&gap, &names(&["R1", "R2", "R3"]), GraphMode::Syntactic, LIMIT).unwrap();
        // Active {R1, R3}: the gap at R2 breaks the path.
        assert!(!check_path_structure(&gap, &spec, &ctx(1)).unwrap());
        assert!(check_path_structure(&gap, &spec, &ctx(0)).unwrap());
    }

    #[test]
    fn path_structure_needs_a_tree() {
        let m = control_model(vec![("R1", Expr::is("U", 1)), ("R2", Expr::is("U", 0))]);
        let spec = make_spec(&m, &names(&["R1", "R2"]), GraphMode::Syntactic, LIMIT).unwrap();
        assert!(matches!(
            check_path_structure(&m, &spec, &ctx(1)),
            Err(EngineError::NotApplicable(_))
        ));
    }

    #[test]
    fn bottom_fix_covers_inactive_nodes() {
        let m = chain();
        let spec = make_spec(&m, &names(&["R3", "R1"]), GraphMode::Syntactic, LIMIT).unwrap();
        assert_eq!(spec.control_vars(), ["R1", "R3"]);
        assert_eq!(spec.data_vars(), ["R2"]);
        let state = ControlFlowState { active: vec![] };
        assert_eq!(bottom_fix(&spec, &state).to_string(), "[R1 <- bot, R3 <- bot]");
        let all = ControlFlowState {
            active: names(&["R1", "R3"]),
        };
        assert!(bottom_fix(&spec, &all).is_empty());
    }

    #[test]
    fn make_spec_errors() {
        let sig = Signature::new(vec![("U".into(), Range::binary())], vec![("X".into(), Range::binary())]).unwrap();
        let m = CausalModel::build(sig, vec![("X".into(), Expr::var("U"))]).unwrap();
        assert_eq!(
            make_spec(&m, &names(&["X"]), GraphMode::Syntactic, LIMIT).unwrap_err(),
            ValidationError::NonBooleanControlRange("X".into()).into()
        );
        assert_eq!(
            make_spec(&m, &names(&["U"]), GraphMode::Syntactic, LIMIT).unwrap_err(),
            ValidationError::UnknownVariable("U".into()).into()
        );
        let empty = make_spec(&m, &[], GraphMode::Semantic, LIMIT).unwrap();
        assert!(empty.is_empty());
        assert_eq!(empty.data_vars(), ["X"]);
    }
}
