use std::collections::BTreeSet;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::Serialize;

use super::{BenchmarkCase, Definition};
use crate::control::{validate_bottom_propagation, ControlFlowSpec};
use crate::dsl::{compile, parse_model, CompiledModel};
use crate::engines::{
    actual_causes, actual_causes_restricted, cfn_causes, cfpsc, sufficient_causes,
    sufficient_causes_restricted, Cause, EngineOptions,
};
use crate::model::{Context, Formula};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DefinitionResult {
    pub definition: Definition,
    pub expected: Vec<Vec<String>>,
    /// `None` when the engine failed; the error is on the case.
    pub computed: Option<Vec<Vec<String>>>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseReport {
    pub id: String,
    pub file: String,
    pub results: Vec<DefinitionResult>,
    pub error: Option<String>,
    pub pass: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub cases: Vec<CaseReport>,
    pub passed: usize,
    pub total: usize,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.passed == self.total
    }

    pub fn summary(&self) -> String {
        format!("{}/{} pass", self.passed, self.total)
    }
}

fn as_set(sets: &[Vec<String>]) -> BTreeSet<BTreeSet<&str>> {
    sets.iter()
        .map(|s| s.iter().map(String::as_str).collect())
        .collect()
}

fn names(causes: Vec<Cause>) -> Vec<Vec<String>> {
    causes.into_iter().map(|c| c.variables).collect()
}

struct Loaded {
    compiled: CompiledModel,
    context: Context,
    formula: Formula,
    spec: ControlFlowSpec,
}

fn load(case: &BenchmarkCase, opts: &EngineOptions) -> Result<Loaded, String> {
    let m = &case.manifest;
    let text = std::fs::read_to_string(&case.model_path)
        .map_err(|e| format!("{}: {e}", case.model_path.display()))?;
    let doc = parse_model(&text).map_err(|e| e.to_string())?;
    let compiled = compile(&doc).map_err(|es| {
        es.iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("; ")
    })?;
    let context = compiled.context(&m.context).map_err(|e| e.to_string())?.clone();
    let query = compiled.query(&m.query).map_err(|e| e.to_string())?;
    if !query.intervention.is_empty() {
        return Err(format!("query `{}` must not intervene", m.query));
    }
    let formula = query.formula.clone();
    let model = &compiled.model;
    let spec = crate::control::make_spec(model, &m.control, m.graph.into(), opts.limit)
        .map_err(|e| e.to_string())?;
    if !m.control.is_empty() && m.validate_control_flow {
        let violations =
            validate_bottom_propagation(model, &spec, opts.limit).map_err(|e| e.to_string())?;
        if let Some(v) = violations.first() {
            return Err(format!(
                "control variable `{}` violates bottom-propagation ({} counterexamples)",
                v.variable,
                violations.len()
            ));
        }
    }
    Ok(Loaded {
        compiled,
        context,
        formula,
        spec,
    })
}

fn compute(l: &Loaded, def: Definition, opts: &EngineOptions) -> Result<Vec<Vec<String>>, String> {
    let (m, s, c, f) = (&l.compiled.model, &l.spec, &l.context, &l.formula);
    let r = match def {
        Definition::Def4 => sufficient_causes(m, c, f, opts).map(names),
        Definition::Def7 => {
            actual_causes(m, c, f, opts).map(|v| names(v.into_iter().map(|a| a.cause).collect()))
        }
        Definition::Def6 => cfpsc(m, s, c, f, opts).map(names),
        Definition::Def4r => sufficient_causes_restricted(m, s, c, f, opts).map(names),
        Definition::Ac2p => actual_causes_restricted(m, s, c, f, opts)
            .map(|v| names(v.into_iter().map(|a| a.cause).collect())),
        Definition::Cfn => {
            cfn_causes(m, s, c, f, opts).map(|v| names(v.into_iter().map(|a| a.cause).collect()))
        }
    };
    r.map_err(|e| e.to_string())
}

/// Runs every definition the manifest has expectations for.
pub fn run_case(case: &BenchmarkCase, opts: &EngineOptions) -> CaseReport {
    let start = Instant::now();
    let m = &case.manifest;
    let mut report = CaseReport {
        id: m.id.clone(),
        file: case.file.clone(),
        results: Vec::new(),
        error: None,
        pass: false,
        elapsed: Duration::ZERO,
    };
    let loaded = load(case, opts);
    for (&def, expected) in &m.expected {
        let computed = match &loaded {
            Ok(l) => match compute(l, def, opts) {
                Ok(c) => Some(c),
                Err(e) => {
                    report.error.get_or_insert(format!("{}: {e}", def.key()));
                    None
                }
            },
            Err(_) => None,
        };
        let pass = computed
            .as_ref()
            .is_some_and(|c| as_set(c) == as_set(expected));
        report.results.push(DefinitionResult {
            definition: def,
            expected: expected.clone(),
            computed,
            pass,
        });
    }
    if let Err(e) = loaded {
        report.error = Some(e);
    }
    report.pass = report.error.is_none() && report.results.iter().all(|r| r.pass);
    report.elapsed = start.elapsed();
    report
}

/// Runs all cases on up to `parallelism` threads. The report lists cases in
/// input order whatever the degree of parallelism.
pub fn run_all(cases: &[BenchmarkCase], parallelism: usize, opts: &EngineOptions) -> Report {
    let start = Instant::now();
    let workers = parallelism.max(1).min(cases.len().max(1));
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<CaseReport>>> = Mutex::new(vec![None; cases.len()]);
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(case) = cases.get(i) else { break };
                let r = run_case(case, opts);
                tracing::debug!(case = %r.id, pass = r.pass, "case finished");
                slots.lock().expect("worker panicked")[i] = Some(r);
            });
        }
    });
    let cases: Vec<CaseReport> = slots
        .into_inner()
        .expect("worker panicked")
        .into_iter()
        .map(|r| r.expect("every case ran"))
        .collect();
    let passed = cases.iter().filter(|c| c.pass).count();
    Report {
        total: cases.len(),
        passed,
        cases,
        elapsed: start.elapsed(),
    }
}
