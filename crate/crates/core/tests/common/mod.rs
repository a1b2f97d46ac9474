//! Shared test support: a seeded generator of random model documents and a
//! brute-force oracle for every cause definition. The oracle only uses
//! `satisfies` on intervened models, never the engines.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use flowcause::control::{make_spec, ControlFlowSpec};
use flowcause::dsl::{compile, CompiledModel, DeclKind, Declaration, ModelDocument, NamedContext, NamedQuery};
use flowcause::engines::Cause;
use flowcause::model::{CausalModel, CausalQuery, Context, Expr, Formula, GraphMode, Intervention, Range, Value};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks/table1")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy)]
pub struct GenConfig {
    pub max_exo: usize,
    pub max_endo: usize,
    pub max_ctl: usize,
    /// Allow ranges other than `{0, 1}`.
    pub wide_ranges: bool,
    /// Allow symbols that need quoting when printed.
    pub awkward_symbols: bool,
}

impl GenConfig {
    /// Binary ranges, at most five endogenous and two control variables.
    pub const SMALL: GenConfig = GenConfig {
        max_exo: 3,
        max_endo: 5,
        max_ctl: 2,
        wide_ranges: false,
        awkward_symbols: false,
    };

    pub const WIDE: GenConfig = GenConfig {
        max_exo: 3,
        max_endo: 6,
        max_ctl: 3,
        wide_ranges: true,
        awkward_symbols: true,
    };
}

struct Var {
    name: String,
    range: Range,
    control: bool,
}

struct Gen<'r, R: Rng> {
    rng: &'r mut R,
    cfg: GenConfig,
}

impl<R: Rng> Gen<'_, R> {
    fn range(&mut self, name: &str, taken: &[String]) -> Range {
        let values: Vec<Value> = if !self.cfg.wide_ranges || self.rng.gen_bool(0.6) {
            vec![Value::Int(0), Value::Int(1)]
        } else {
            match self.rng.gen_range(0..4) {
                0 => vec![Value::Int(0), Value::Int(1), Value::Int(2)],
                1 => vec![Value::Int(-1), Value::Int(7)],
                2 => vec![Value::symbol("lo"), Value::symbol("mid"), Value::symbol("hi")],
                _ => {
                    let mut odd = vec!["on".to_string(), "case".to_string(), "ite".to_string()];
                    if self.cfg.awkward_symbols {
                        odd.extend(taken.iter().cloned());
                    }
                    let a = odd.choose(self.rng).unwrap().clone();
                    vec![Value::symbol("off"), Value::symbol(&a)]
                }
            }
        };
        Range::new(name, values).unwrap()
    }

    fn atom(&mut self, avail: &[&Var]) -> Expr {
        if avail.is_empty() || self.rng.gen_bool(0.05) {
            return Expr::Const(if self.rng.gen_bool(0.5) { Value::Top } else { Value::Bot });
        }
        let v = *avail.choose(self.rng).unwrap();
        if v.control {
            return Expr::var(&v.name);
        }
        let same: Vec<&&Var> = avail
            .iter()
            .filter(|o| o.name != v.name && !o.control && o.range == v.range)
            .collect();
        if !same.is_empty() && self.rng.gen_bool(0.2) {
            let o = same.choose(self.rng).unwrap();
            return Expr::eq(Expr::var(&v.name), Expr::var(&o.name));
        }
        let c = v.range.values().choose(self.rng).unwrap().clone();
        Expr::eq(Expr::var(&v.name), Expr::Const(c))
    }

    fn boolean(&mut self, avail: &[&Var], depth: usize) -> Expr {
        if depth == 0 || self.rng.gen_bool(0.35) {
            return self.atom(avail);
        }
        match self.rng.gen_range(0..3) {
            0 => Expr::not(self.boolean(avail, depth - 1)),
            k => {
                let n = self.rng.gen_range(2..=3);
                let parts = (0..n).map(|_| self.boolean(avail, depth - 1)).collect();
                if k == 1 {
                    Expr::And(parts)
                } else {
                    Expr::Or(parts)
                }
            }
        }
    }

    fn output(&mut self, range: &Range, avail: &[&Var]) -> Expr {
        let copies: Vec<&&Var> = avail.iter().filter(|o| !o.control && o.range == *range).collect();
        if !copies.is_empty() && self.rng.gen_bool(0.3) {
            return Expr::var(&copies.choose(self.rng).unwrap().name);
        }
        Expr::Const(range.values().choose(self.rng).unwrap().clone())
    }

    fn data_equation(&mut self, range: &Range, avail: &[&Var]) -> Expr {
        let binary = *range == Range::binary();
        match self.rng.gen_range(0..4) {
            0 if binary => match self.boolean(avail, 2) {
                e if e.is_boolean() => e,
                // A bare control variable or `top`/`bot` is a value, not a condition.
                e => Expr::not(e),
            },
            1 => {
                let vals = range.values();
                let t = vals.choose(self.rng).unwrap().clone();
                let o = vals.choose(self.rng).unwrap().clone();
                Expr::ite(self.boolean(avail, 2), t, o)
            }
            2 => {
                let n = self.rng.gen_range(1..=2);
                let branches = (0..n)
                    .map(|_| (self.boolean(avail, 1), self.output(range, avail)))
                    .collect();
                Expr::Case {
                    branches,
                    otherwise: Box::new(self.output(range, avail)),
                }
            }
            _ => self.output(range, avail),
        }
    }
}

/// A random, valid, acyclic document with one context and one query that
/// holds in that context. Endogenous declarations are shuffled so that
/// declaration order is not a topological order.
pub fn random_document<R: Rng>(rng: &mut R, cfg: GenConfig) -> ModelDocument {
    let mut g = Gen { rng, cfg };
    let n_exo = g.rng.gen_range(1..=cfg.max_exo);
    let n_endo = g.rng.gen_range(1..=cfg.max_endo);
    let n_ctl = g.rng.gen_range(0..=cfg.max_ctl.min(n_endo.saturating_sub(1)));
    let mut ctl_pos: Vec<usize> = (0..n_endo).collect();
    ctl_pos.shuffle(g.rng);
    ctl_pos.truncate(n_ctl);

    let mut names: Vec<String> = (0..n_exo).map(|i| format!("U{i}")).collect();
    let mut vars: Vec<Var> = Vec::new();
    for i in 0..n_exo {
        let range = g.range(&names[i], &names);
        vars.push(Var {
            name: names[i].clone(),
            range,
            control: false,
        });
    }
    let mut decls: Vec<Declaration> = vars
        .iter()
        .map(|v| Declaration {
            kind: DeclKind::Exo,
            name: v.name.clone(),
            range: v.range.clone(),
            equation: None,
        })
        .collect();
    let mut endo = Vec::new();
    for i in 0..n_endo {
        let control = ctl_pos.contains(&i);
        let name = if control { format!("C{i}") } else { format!("X{i}") };
        names.push(name.clone());
        let avail: Vec<&Var> = vars.iter().collect();
        let (kind, range, equation) = if control {
            (DeclKind::Ctl, Range::control(), g.boolean(&avail, 2))
        } else {
            let range = g.range(&name, &names);
            let eq = g.data_equation(&range, &avail);
            (DeclKind::Endo, range, eq)
        };
        endo.push(Declaration {
            kind,
            name: name.clone(),
            range: range.clone(),
            equation: Some(equation),
        });
        vars.push(Var { name, range, control });
    }
    endo.shuffle(g.rng);
    decls.extend(endo);

    let context = Context::new(
        vars[..n_exo]
            .iter()
            .map(|v| (v.name.clone(), v.range.values().choose(g.rng).unwrap().clone()))
            .collect(),
    );
    let mut doc = ModelDocument {
        name: format!("random{}", g.rng.gen_range(0..1000)),
        declarations: decls,
        contexts: vec![NamedContext {
            name: "u".into(),
            context: context.clone(),
        }],
        queries: Vec::new(),
        control_annotation: None,
    };
    let compiled = compile(&doc).expect("generated documents are valid");
    let actual = compiled.model.evaluate(&context).unwrap();
    let endo_vars = &vars[n_exo..];
    let pick = |g: &mut Gen<R>| {
        let v = endo_vars.choose(g.rng).unwrap();
        (v.name.clone(), actual.get(&v.name).unwrap().clone(), v.range.clone())
    };
    let (n, a, _) = pick(&mut g);
    let mut formula = Formula::Event(n, a);
    match g.rng.gen_range(0..4) {
        0 => {
            let (n2, a2, _) = pick(&mut g);
            formula = Formula::And(vec![formula, Formula::Event(n2, a2)]);
        }
        1 => {
            let (n2, _, r2) = pick(&mut g);
            let other = r2.values().choose(g.rng).unwrap().clone();
            formula = Formula::Or(vec![Formula::Event(n2, other), formula]);
        }
        2 => {
            let (n2, a2, r2) = pick(&mut g);
            if let Some(other) = r2.values().iter().find(|v| **v != a2) {
                formula = Formula::And(vec![formula, Formula::Event(n2, other.clone()).negate()]);
            }
        }
        _ => {}
    }
    doc.queries.push(NamedQuery {
        name: "q".into(),
        query: CausalQuery::new(Intervention::empty(), formula),
    });
    if n_ctl > 0 && g.rng.gen_bool(0.2) {
        doc.control_annotation = Some(doc.control_vars());
    }
    doc
}

pub struct Case {
    pub doc: ModelDocument,
    pub compiled: CompiledModel,
}

impl Case {
    pub fn model(&self) -> &CausalModel {
        &self.compiled.model
    }

    pub fn context(&self) -> &Context {
        &self.compiled.contexts[0].context
    }

    pub fn formula(&self) -> &Formula {
        &self.compiled.queries[0].query.formula
    }

    pub fn control(&self) -> &[String] {
        &self.compiled.control
    }
}

pub fn random_case(seed: u64, cfg: GenConfig) -> Case {
    let doc = random_document(&mut rng(seed), cfg);
    let compiled = compile(&doc).unwrap();
    Case { doc, compiled }
}

pub struct Bench {
    pub id: String,
    pub doc: ModelDocument,
    pub compiled: CompiledModel,
    pub context: Context,
    pub formula: Formula,
    pub control: Vec<String>,
    pub graph: GraphMode,
    pub validate: bool,
}

impl Bench {
    pub fn spec(&self) -> ControlFlowSpec {
        make_spec(&self.compiled.model, &self.control, self.graph, 1 << 20).unwrap()
    }
}

pub fn benchmark_models() -> Vec<Bench> {
    let cases = flowcause::bench::load_cases(&corpus_dir()).unwrap();
    cases
        .into_iter()
        .map(|c| {
            let text = std::fs::read_to_string(&c.model_path).unwrap();
            let doc = flowcause::dsl::parse_model(&text).unwrap();
            let compiled = compile(&doc).unwrap();
            let context = compiled.context(&c.manifest.context).unwrap().clone();
            let formula = compiled.query(&c.manifest.query).unwrap().formula.clone();
            Bench {
                id: c.manifest.id,
                doc,
                compiled,
                context,
                formula,
                control: c.manifest.control,
                graph: c.manifest.graph.into(),
                validate: c.manifest.validate_control_flow,
            }
        })
        .collect()
}

pub type Family = BTreeSet<BTreeSet<String>>;

pub fn family_of<'a>(causes: impl IntoIterator<Item = &'a Cause>) -> Family {
    causes
        .into_iter()
        .map(|c| c.variables.iter().cloned().collect())
        .collect()
}

pub fn fam(sets: &[&[&str]]) -> Family {
    sets.iter()
        .map(|s| s.iter().map(|x| x.to_string()).collect())
        .collect()
}

/// Brute-force reference implementations.
pub mod oracle {
    use super::*;

    pub fn endogenous(m: &CausalModel) -> Vec<String> {
        m.signature().endogenous().iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn data(m: &CausalModel, control: &[String]) -> Vec<String> {
        endogenous(m).into_iter().filter(|n| !control.contains(n)).collect()
    }

    pub fn actual(m: &CausalModel, ctx: &Context) -> BTreeMap<String, Value> {
        m.evaluate(ctx)
            .unwrap()
            .endogenous()
            .map(|(n, v)| (n.to_string(), v.clone()))
            .collect()
    }

    fn settings(m: &CausalModel, names: &[String]) -> Vec<Vec<(String, Value)>> {
        let mut out = vec![Vec::new()];
        for n in names {
            let r = m.signature().range_of(n).unwrap();
            out = out
                .into_iter()
                .flat_map(|s| {
                    r.values().iter().map(move |v| {
                        let mut s = s.clone();
                        s.push((n.clone(), v.clone()));
                        s
                    })
                })
                .collect();
        }
        out
    }

    pub fn subsets(names: &[String]) -> Vec<Vec<String>> {
        (0..1u64 << names.len())
            .map(|m| {
                names
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| m >> i & 1 == 1)
                    .map(|(_, n)| n.clone())
                    .collect()
            })
            .collect()
    }

    pub fn holds(m: &CausalModel, ctx: &Context, bindings: Vec<(String, Value)>, phi: &Formula) -> bool {
        m.satisfies(ctx, &CausalQuery::new(Intervention::new(bindings), phi.clone()))
            .unwrap()
    }

    pub fn minimal(f: &Family) -> Family {
        f.iter()
            .filter(|x| !x.is_empty() && !f.iter().any(|y| !y.is_empty() && y != *x && y.is_subset(x)))
            .cloned()
            .collect()
    }

    fn at_actual(act: &BTreeMap<String, Value>, xs: &[String]) -> Vec<(String, Value)> {
        xs.iter().map(|x| (x.clone(), act[x].clone())).collect()
    }

    /// Every subset `X` of `universe` (empty included) such that the formula
    /// holds under `extra` and every setting of `universe \ X`. `X` itself
    /// is left to its equations.
    pub fn sufficient_family(
        m: &CausalModel,
        ctx: &Context,
        phi: &Formula,
        universe: &[String],
        extra: &[(String, Value)],
    ) -> Family {
        subsets(universe)
            .into_iter()
            .filter(|x| {
                let rest: Vec<String> = universe.iter().filter(|n| !x.contains(n)).cloned().collect();
                settings(m, &rest).into_iter().all(|z| {
                    let mut b = extra.to_vec();
                    b.extend(z);
                    holds(m, ctx, b, phi)
                })
            })
            .map(|x| x.into_iter().collect())
            .collect()
    }

    pub fn bottom_fix(m: &CausalModel, ctx: &Context, control: &[String]) -> Vec<(String, Value)> {
        let act = actual(m, ctx);
        control
            .iter()
            .filter(|c| act[*c] != Value::Top)
            .map(|c| (c.clone(), Value::Bot))
            .collect()
    }

    pub fn def4(m: &CausalModel, ctx: &Context, phi: &Formula) -> Family {
        minimal(&sufficient_family(m, ctx, phi, &endogenous(m), &[]))
    }

    pub fn def4r(m: &CausalModel, ctx: &Context, phi: &Formula, control: &[String]) -> Family {
        minimal(&sufficient_family(m, ctx, phi, &data(m, control), &[]))
    }

    pub fn cfs2_family(m: &CausalModel, ctx: &Context, phi: &Formula, control: &[String]) -> Family {
        sufficient_family(m, ctx, phi, &data(m, control), &bottom_fix(m, ctx, control))
    }

    pub fn def6(m: &CausalModel, ctx: &Context, phi: &Formula, control: &[String]) -> Family {
        minimal(&cfs2_family(m, ctx, phi, control))
    }

    fn ac2(m: &CausalModel, ctx: &Context, phi: &Formula, universe: &[String], pool: &[String]) -> Family {
        let act = actual(m, ctx);
        let found: Family = subsets(universe)
            .into_iter()
            .filter(|x| !x.is_empty())
            .filter(|x| {
                let rest: Vec<String> = pool.iter().filter(|n| !x.contains(n)).cloned().collect();
                subsets(&rest).into_iter().any(|w| {
                    settings(m, x).into_iter().any(|xp| {
                        let mut b = xp;
                        b.extend(at_actual(&act, &w));
                        !holds(m, ctx, b, phi)
                    })
                })
            })
            .map(|x| x.into_iter().collect())
            .collect();
        minimal(&found)
    }

    pub fn def7(m: &CausalModel, ctx: &Context, phi: &Formula) -> Family {
        let all = endogenous(m);
        ac2(m, ctx, phi, &all, &all)
    }

    pub fn ac2p(m: &CausalModel, ctx: &Context, phi: &Formula, control: &[String]) -> Family {
        ac2(m, ctx, phi, &data(m, control), control)
    }

    pub fn cfn(m: &CausalModel, ctx: &Context, phi: &Formula, control: &[String]) -> Family {
        let fix = bottom_fix(m, ctx, control);
        let found: Family = subsets(&data(m, control))
            .into_iter()
            .filter(|x| !x.is_empty())
            .filter(|x| {
                settings(m, x).into_iter().any(|xp| {
                    let mut b = fix.clone();
                    b.extend(xp);
                    !holds(m, ctx, b, phi)
                })
            })
            .map(|x| x.into_iter().collect())
            .collect();
        minimal(&found)
    }
}
