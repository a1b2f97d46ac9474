use super::{bits, check_space, for_each_product, minimal_subsets, select, Cause, CauseFamily, EngineOptions, Situation};
use crate::control::ControlFlowSpec;
use crate::error::{EngineError, ValidationError};
use crate::model::{CausalModel, Context, Formula, Intervention, Value};

/// Which sufficiency condition a family is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SufficiencyKind {
    /// Candidates and sweep over all endogenous variables.
    Unrestricted,
    /// Candidates and sweep over the data variables only.
    Restricted,
    /// As `Restricted`, with control variables outside the actual flow
    /// fixed to `bot`.
    ControlFlow,
}

/// Whether the formula holds under `fixed` combined with every setting of
/// `sweep_vars`.
pub fn holds_under_all_sweeps(
    model: &CausalModel,
    ctx: &Context,
    fixed: &Intervention,
    sweep_vars: &[String],
    formula: &Formula,
    limit: u64,
) -> Result<bool, EngineError> {
    let exo = model.resolve_context(ctx)?;
    let phi = formula.compile(model)?;
    let mut overlay = model.resolve_intervention(fixed)?;
    let sig = model.full_signature();
    let mut sweep = Vec::with_capacity(sweep_vars.len());
    for name in sweep_vars {
        let j = sig
            .endo_index(name)
            .ok_or_else(|| ValidationError::UnknownVariable(name.clone()))?;
        if overlay[j].is_some() || sweep.contains(&j) {
            return Err(ValidationError::OverlappingSweep(name.clone()).into());
        }
        sweep.push(j);
    }
    let ranges: Vec<&[Value]> = sweep.iter().map(|&j| model.endo_range(j).values()).collect();
    check_space("sweep", &ranges, limit)?;
    Ok(for_each_product(&ranges, |z| {
        for (&j, v) in sweep.iter().zip(z) {
            overlay[j] = Some((*v).clone());
        }
        phi.holds(&model.solve(&exo, &overlay))
    }))
}

struct Setup<'m> {
    sit: Situation<'m>,
    universe: Vec<usize>,
    base: Vec<Option<Value>>,
}

impl<'m> Setup<'m> {
    fn new(
        model: &'m CausalModel,
        spec: Option<&ControlFlowSpec>,
        ctx: &Context,
        formula: &Formula,
        kind: SufficiencyKind,
        limit: u64,
    ) -> Result<Self, EngineError> {
        let sit = Situation::new(model, ctx, formula, limit)?;
        let (universe, base) = match (kind, spec) {
            (SufficiencyKind::Unrestricted, _) => {
                (sit.live(), vec![None; model.num_endogenous()])
            }
            (SufficiencyKind::Restricted, Some(s)) => {
                (s.data_indices().to_vec(), vec![None; model.num_endogenous()])
            }
            (SufficiencyKind::ControlFlow, Some(s)) => {
                (s.data_indices().to_vec(), sit.bottom_overlay(s.control_indices()))
            }
            (_, None) => unreachable!("restricted kinds are always called with a spec"),
        };
        Ok(Setup {
            sit,
            universe,
            base,
        })
    }

    /// Sufficiency of the universe subset `mask`: the formula holds for
    /// every setting of the rest of the universe.
    fn sufficient(&self, mask: u64) -> Result<bool, EngineError> {
        let sweep: Vec<usize> = (0..self.universe.len())
            .filter(|i| mask >> i & 1 == 0)
            .map(|i| self.universe[i])
            .collect();
        let mut overlay = self.base.clone();
        self.sit.holds_for_all(&mut overlay, &sweep)
    }

    fn minimal(&self, what: &str) -> Result<Vec<Cause>, EngineError> {
        let masks = minimal_subsets(self.universe.len(), what, self.sit.limit, |m| self.sufficient(m))?;
        Ok(masks
            .into_iter()
            .map(|m| self.sit.cause(&select(&self.universe, m)))
            .collect())
    }
}

/// Minimal sufficient causes: nonempty sets of endogenous variables at their
/// actual values such that the formula holds for every setting of all other
/// endogenous variables.
pub fn sufficient_causes(
    model: &CausalModel,
    ctx: &Context,
    formula: &Formula,
    opts: &EngineOptions,
) -> Result<Vec<Cause>, EngineError> {
    Setup::new(model, None, ctx, formula, SufficiencyKind::Unrestricted, opts.limit)?
        .minimal("endogenous variables")
}

/// Sufficient causes among the data variables, sweeping only data variables.
/// Control variables are always computed by their equations.
pub fn sufficient_causes_restricted(
    model: &CausalModel,
    spec: &ControlFlowSpec,
    ctx: &Context,
    formula: &Formula,
    opts: &EngineOptions,
) -> Result<Vec<Cause>, EngineError> {
    Setup::new(model, Some(spec), ctx, formula, SufficiencyKind::Restricted, opts.limit)?
        .minimal("data variables")
}

/// Control-flow-preserving sufficient causes: as the restricted variant with
/// every control variable outside the actual control flow fixed to `bot`.
pub fn cfpsc(
    model: &CausalModel,
    spec: &ControlFlowSpec,
    ctx: &Context,
    formula: &Formula,
    opts: &EngineOptions,
) -> Result<Vec<Cause>, EngineError> {
    Setup::new(model, Some(spec), ctx, formula, SufficiencyKind::ControlFlow, opts.limit)?
        .minimal("data variables")
}

/// Every subset (the empty one included) of the kind's universe satisfying
/// its sufficiency condition, without minimality filtering.
pub fn sufficiency_family(
    model: &CausalModel,
    spec: Option<&ControlFlowSpec>,
    ctx: &Context,
    formula: &Formula,
    kind: SufficiencyKind,
    opts: &EngineOptions,
) -> Result<CauseFamily, EngineError> {
    if kind != SufficiencyKind::Unrestricted && spec.is_none() {
        return Err(EngineError::NotApplicable(
            "restricted families need a control flow specification".into(),
        ));
    }
    let setup = Setup::new(model, spec, ctx, formula, kind, opts.limit)?;
    let n = setup.universe.len();
    super::check_subsets("universe", n, opts.limit)?;
    let names = setup
        .universe
        .iter()
        .map(|&j| model.endo_name(j).to_string())
        .collect();
    let mut fam = CauseFamily::new(names)?;
    for mask in 0..(1u64 << n) {
        if setup.sufficient(mask)? {
            fam.insert(mask);
        }
    }
    debug_assert!(fam.members().iter().all(|&m| bits(m).all(|i| i < n)));
    Ok(fam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{compile, parse_model, CompiledModel};
    use crate::model::GraphMode;

    const LATE: &str = "
model late
exo U_T1 : {S, B, N}
exo U_T2 : {S, B, N}
endo T1 : {S, B, N} = U_T1
endo T2 : {S, B, N} = U_T2
ctl BS1 = not(eq(T1, N))
ctl BS2 = and(eq(T1, N), not(eq(T2, N)))
endo BS : {0, 1} = or(BS1, BS2)
context c : U_T1 = S, U_T2 = B
";

    fn load(src: &str) -> CompiledModel {
        compile(&parse_model(src).unwrap()).unwrap()
    }

    fn sets(causes: &[Cause]) -> Vec<Vec<&str>> {
        causes.iter().map(|c| c.variables.iter().map(String::as_str).collect()).collect()
    }

    #[test]
    fn late_preemption_families() {
        let m = load(LATE);
        let spec = m.spec(GraphMode::Semantic, 1 << 20).unwrap();
        let ctx = m.context("c").unwrap();
        let phi = Formula::event("BS", 1);
        let o = EngineOptions::default();
        assert_eq!(
            sets(&sufficient_causes(&m.model, ctx, &phi, &o).unwrap()),
            [vec!["T1", "BS1", "BS"], vec!["T2", "BS1", "BS2", "BS"]]
        );
        assert_eq!(
            sets(&sufficient_causes_restricted(&m.model, &spec, ctx, &phi, &o).unwrap()),
            [vec!["T1", "BS"], vec!["T2", "BS"]]
        );
        let c = cfpsc(&m.model, &spec, ctx, &phi, &o).unwrap();
        assert_eq!(sets(&c), [vec!["T1", "BS"]]);
        assert_eq!(c[0].values, [Value::symbol("S"), Value::Int(1)]);
    }

    #[test]
    fn family_contains_universe_and_is_upward_closed() {
        let m = load(LATE);
        let spec = m.spec(GraphMode::Semantic, 1 << 20).unwrap();
        let ctx = m.context("c").unwrap();
        let phi = Formula::event("BS", 1);
        let o = EngineOptions::default();
        for kind in [
            SufficiencyKind::Unrestricted,
            SufficiencyKind::Restricted,
            SufficiencyKind::ControlFlow,
        ] {
            let f = sufficiency_family(&m.model, Some(&spec), ctx, &phi, kind, &o).unwrap();
            assert!(f.contains(f.full_mask()), "{kind:?}");
            assert!(!f.contains(0), "{kind:?}");
            assert!(f.is_upward_closed(), "{kind:?}");
        }
        assert!(matches!(
            sufficiency_family(&m.model, None, ctx, &phi, SufficiencyKind::ControlFlow, &o),
            Err(EngineError::NotApplicable(_))
        ));
    }

    #[test]
    fn sweep_rejects_overlap() {
        let m = load(LATE);
        let ctx = m.context("c").unwrap();
        let phi = Formula::event("BS", 1);
        let fixed = Intervention::new(vec![("T1".into(), Value::symbol("S"))]);
        let sweep = ["T2".to_string(), "BS2".to_string()];
        assert!(holds_under_all_sweeps(&m.model, ctx, &fixed, &sweep, &phi, 1 << 20).unwrap());
        let bad = ["T1".to_string()];
        assert_eq!(
            holds_under_all_sweeps(&m.model, ctx, &fixed, &bad, &phi, 1 << 20),
            Err(ValidationError::OverlappingSweep("T1".into()).into())
        );
    }

    #[test]
    fn absent_outcome_is_reported() {
        let m = load(LATE);
        let ctx = m.context("c").unwrap();
        let phi = Formula::event("BS", 0);
        assert_eq!(
            sufficient_causes(&m.model, ctx, &phi, &EngineOptions::default()),
            Err(EngineError::NoOccurrence)
        );
    }
}
