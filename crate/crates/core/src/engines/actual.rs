use super::{
    check_space, check_subsets, combinations, for_each_product, minimal_subsets, select,
    ActualCause, CfnCause, ContingencyWitness, EngineOptions, Situation,
};
use crate::control::ControlFlowSpec;
use crate::error::EngineError;
use crate::model::{CausalModel, Context, Formula, Intervention, Value};

/// Searches contingencies `W` drawn from `pool` (minus `x`), by increasing
/// size, and counterfactual settings of `x` that falsify the formula.
fn witnesses(
    sit: &Situation,
    x: &[usize],
    pool: &[usize],
    all: bool,
) -> Result<Vec<ContingencyWitness>, EngineError> {
    let rest: Vec<usize> = pool.iter().copied().filter(|j| !x.contains(j)).collect();
    check_subsets("contingency candidates", rest.len(), sit.limit)?;
    let ranges: Vec<&[Value]> = x.iter().map(|&j| sit.model.endo_range(j).values()).collect();
    check_space("counterfactual settings", &ranges, sit.limit)?;
    let mut out = Vec::new();
    let mut overlay = vec![None; sit.model.num_endogenous()];
    for k in 0..=rest.len() {
        for wmask in combinations(rest.len(), k) {
            let w = select(&rest, wmask);
            overlay.iter_mut().for_each(|o| *o = None);
            for &j in &w {
                overlay[j] = Some(sit.actual_endo(j).clone());
            }
            for_each_product(&ranges, |xp| {
                for (&j, v) in x.iter().zip(xp) {
                    overlay[j] = Some((*v).clone());
                }
                if !sit.holds(&overlay) {
                    out.push(ContingencyWitness {
                        contingency: named(sit, &w, |j| sit.actual_endo(j).clone()),
                        counterfactual: Intervention::new(
                            x.iter()
                                .zip(xp)
                                .map(|(&j, v)| (sit.model.endo_name(j).to_string(), (*v).clone()))
                                .collect(),
                        ),
                    });
                    return all;
                }
                true
            });
            if !all && !out.is_empty() {
                return Ok(out);
            }
        }
    }
    Ok(out)
}

fn named(sit: &Situation, vars: &[usize], value: impl Fn(usize) -> Value) -> Intervention {
    Intervention::new(
        vars.iter()
            .map(|&j| (sit.model.endo_name(j).to_string(), value(j)))
            .collect(),
    )
}

fn enumerate(
    sit: &Situation,
    universe: &[usize],
    pool: &[usize],
    what: &str,
    opts: &EngineOptions,
) -> Result<Vec<ActualCause>, EngineError> {
    let masks = minimal_subsets(universe.len(), what, sit.limit, |m| {
        Ok(!witnesses(sit, &select(universe, m), pool, false)?.is_empty())
    })?;
    masks
        .into_iter()
        .map(|m| {
            let x = select(universe, m);
            Ok(ActualCause {
                cause: sit.cause(&x),
                witnesses: witnesses(sit, &x, pool, opts.all_witnesses)?,
            })
        })
        .collect()
}

/// Actual causes: minimal nonempty sets `X` such that some contingency
/// `W` outside `X`, frozen at actual values, and some setting `x'` of `X`
/// falsify the formula.
pub fn actual_causes(
    model: &CausalModel,
    ctx: &Context,
    formula: &Formula,
    opts: &EngineOptions,
) -> Result<Vec<ActualCause>, EngineError> {
    let sit = Situation::new(model, ctx, formula, opts.limit)?;
    let live = sit.live();
    enumerate(&sit, &live, &live, "endogenous variables", opts)
}

/// Actual causes among the data variables, with contingencies drawn from
/// the control variables only.
pub fn actual_causes_restricted(
    model: &CausalModel,
    spec: &ControlFlowSpec,
    ctx: &Context,
    formula: &Formula,
    opts: &EngineOptions,
) -> Result<Vec<ActualCause>, EngineError> {
    let sit = Situation::new(model, ctx, formula, opts.limit)?;
    enumerate(
        &sit,
        spec.data_indices(),
        spec.control_indices(),
        "data variables",
        opts,
    )
}

/// Necessary causes under the bottom fix: minimal nonempty sets of data
/// variables with a setting that falsifies the formula while every control
/// variable outside the actual flow is fixed to `bot`.
pub fn cfn_causes(
    model: &CausalModel,
    spec: &ControlFlowSpec,
    ctx: &Context,
    formula: &Formula,
    opts: &EngineOptions,
) -> Result<Vec<CfnCause>, EngineError> {
    let sit = Situation::new(model, ctx, formula, opts.limit)?;
    let base = sit.bottom_overlay(spec.control_indices());
    let fixed = sit.overlay_to_intervention(&base);
    let universe = spec.data_indices();
    let falsify = |x: &[usize]| -> Result<Option<Intervention>, EngineError> {
        let ranges: Vec<&[Value]> = x.iter().map(|&j| model.endo_range(j).values()).collect();
        check_space("counterfactual settings", &ranges, sit.limit)?;
        let mut overlay = base.clone();
        let mut found = None;
        for_each_product(&ranges, |xp| {
            for (&j, v) in x.iter().zip(xp) {
                overlay[j] = Some((*v).clone());
            }
            if sit.holds(&overlay) {
                return true;
            }
            found = Some(Intervention::new(
                x.iter()
                    .zip(xp)
                    .map(|(&j, v)| (model.endo_name(j).to_string(), (*v).clone()))
                    .collect(),
            ));
            false
        });
        Ok(found)
    };
    let masks = minimal_subsets(universe.len(), "data variables", sit.limit, |m| {
        Ok(falsify(&select(universe, m))?.is_some())
    })?;
    masks
        .into_iter()
        .map(|m| {
            let x = select(universe, m);
            Ok(CfnCause {
                cause: sit.cause(&x),
                counterfactual: falsify(&x)?.expect("accepted set has a counterfactual"),
                fixed: fixed.clone(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{compile, parse_model, CompiledModel};
    use crate::model::{CausalQuery, GraphMode};

    fn load(src: &str) -> CompiledModel {
        compile(&parse_model(src).unwrap()).unwrap()
    }

    fn sets<'a>(causes: impl IntoIterator<Item = &'a crate::engines::Cause>) -> Vec<Vec<&'a str>> {
        causes
            .into_iter()
            .map(|c| c.variables.iter().map(String::as_str).collect())
            .collect()
    }

    const DISJUNCTIVE: &str = "
model fire
exo U_B : {0, 1}
exo U_S : {0, 1}
endo B : {0, 1} = U_B
endo S : {0, 1} = U_S
endo O : {0, 1} = or(eq(B, 1), eq(S, 1))
context c : U_B = 1, U_S = 1
";

    #[test]
    fn overdetermination_needs_both_sparks() {
        let m = load(DISJUNCTIVE);
        let ctx = m.context("c").unwrap();
        let phi = Formula::event("O", 1);
        let found = actual_causes(&m.model, ctx, &phi, &EngineOptions::default()).unwrap();
        assert_eq!(sets(found.iter().map(|a| &a.cause)), [vec!["O"], vec!["B", "S"]]);
        for a in &found {
            assert_eq!(a.witnesses.len(), 1);
            let q = CausalQuery::new(a.witnesses[0].combined(), phi.clone().negate());
            assert!(m.model.satisfies(ctx, &q).unwrap());
        }
    }

    #[test]
    fn all_witnesses_on_request() {
        let m = load(DISJUNCTIVE);
        let ctx = m.context("c").unwrap();
        let phi = Formula::event("O", 1);
        let opts = EngineOptions {
            all_witnesses: true,
            ..EngineOptions::default()
        };
        let found = actual_causes(&m.model, ctx, &phi, &opts).unwrap();
        // O <- 0 falsifies under every contingency drawn from {B, S}.
        assert_eq!(found[0].witnesses.len(), 4);
    }

    #[test]
    fn late_preemption_restricted_and_necessary() {
        let m = load(
            "
model late
exo U_T1 : {S, B, N}
exo U_T2 : {S, B, N}
endo T1 : {S, B, N} = U_T1
endo T2 : {S, B, N} = U_T2
ctl BS1 = not(eq(T1, N))
ctl BS2 = and(eq(T1, N), not(eq(T2, N)))
endo BS : {0, 1} = or(BS1, BS2)
context c : U_T1 = S, U_T2 = B
",
        );
        let spec = m.spec(GraphMode::Semantic, 1 << 20).unwrap();
        let ctx = m.context("c").unwrap();
        let phi = Formula::event("BS", 1);
        let o = EngineOptions::default();
        let ac = actual_causes_restricted(&m.model, &spec, ctx, &phi, &o).unwrap();
        assert_eq!(sets(ac.iter().map(|a| &a.cause)), [vec!["T1"], vec!["BS"]]);
        let cfn = cfn_causes(&m.model, &spec, ctx, &phi, &o).unwrap();
        assert_eq!(sets(cfn.iter().map(|c| &c.cause)), [vec!["T1"], vec!["BS"]]);
        assert_eq!(cfn[0].fixed.to_string(), "[BS2 <- bot]");
        let mut both = cfn[0].fixed.bindings.clone();
        both.extend(cfn[0].counterfactual.bindings.iter().cloned());
        let q = CausalQuery::new(Intervention::new(both), phi.negate());
        assert!(m.model.satisfies(ctx, &q).unwrap());
    }
}
