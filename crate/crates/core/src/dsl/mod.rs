//! The `.causal` text format.
//!
//! ```text
//! model bogus
//!
//! exo U_P : {0, 1}
//! endo P : {0, 1} = U_P
//! ctl P_r = eq(P, 1)
//! endo S : {0, 1} = case {
//!   P_r -> 0;
//!   else -> 1
//! }
//!
//! context u0 : U_P = 0
//! query survives : S = 1
//! ```
//!
//! Statements start with `model`, `exo`, `endo`, `ctl`, `context`, `query`
//! or `control`; line breaks carry no meaning and `#` starts a comment. A
//! bare name inside an equation is a variable if one is declared with that
//! name, otherwise a symbol from some range. `'name` always denotes a symbol.

mod lexer;
mod parser;
mod printer;

use std::fmt;

use crate::control::{make_spec, ControlFlowSpec};
use crate::error::{EngineError, ValidationError};
use crate::model::{CausalModel, CausalQuery, Context, Expr, GraphMode, Range, Signature};

pub use lexer::Pos;
pub use printer::{serialize_model, serialize_query};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeclKind {
    Exo,
    Endo,
    /// Endogenous control variable with range `{top, bot}`.
    Ctl,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Declaration {
    pub kind: DeclKind,
    pub name: String,
    pub range: Range,
    pub equation: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedContext {
    pub name: String,
    pub context: Context,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedQuery {
    pub name: String,
    pub query: CausalQuery,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModelDocument {
    pub name: String,
    pub declarations: Vec<Declaration>,
    pub contexts: Vec<NamedContext>,
    pub queries: Vec<NamedQuery>,
    /// Explicit control variables; when absent the `ctl` declarations are.
    pub control_annotation: Option<Vec<String>>,
}

impl ModelDocument {
    /// Control variables: the annotation if present, else the `ctl`
    /// declarations in order.
    pub fn control_vars(&self) -> Vec<String> {
        match &self.control_annotation {
            Some(names) => names.clone(),
            None => self
                .declarations
                .iter()
                .filter(|d| d.kind == DeclKind::Ctl)
                .map(|d| d.name.clone())
                .collect(),
        }
    }
}

/// A syntax error. `line` and `column` are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl ParseError {
    pub(crate) fn new(pos: Pos, message: String) -> Self {
        ParseError {
            line: pos.line,
            column: pos.column,
            message,
            expected: Vec::new(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

/// A validation error tied to the statement that caused it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocatedError {
    pub line: usize,
    pub column: usize,
    pub error: ValidationError,
}

impl fmt::Display for LocatedError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.error)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DslError {
    Syntax(Vec<ParseError>),
    Invalid(Vec<LocatedError>),
}

impl fmt::Display for DslError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lines: Vec<String> = match self {
            DslError::Syntax(es) => es.iter().map(|e| format!("syntax error at {e}")).collect(),
            DslError::Invalid(es) => es.iter().map(|e| format!("invalid model at {e}")).collect(),
        };
        f.write_str(&lines.join("\n"))
    }
}

impl std::error::Error for DslError {}

/// A validated document.
#[derive(Debug, Clone)]
pub struct CompiledModel {
    pub name: String,
    pub model: CausalModel,
    pub control: Vec<String>,
    pub contexts: Vec<NamedContext>,
    pub queries: Vec<NamedQuery>,
}

impl CompiledModel {
    pub fn context(&self, name: &str) -> Result<&Context, ValidationError> {
        self.contexts
            .iter()
            .find(|c| c.name == name)
            .map(|c| &c.context)
            .ok_or_else(|| ValidationError::UnknownContext(name.to_string()))
    }

    pub fn query(&self, name: &str) -> Result<&CausalQuery, ValidationError> {
        self.queries
            .iter()
            .find(|q| q.name == name)
            .map(|q| &q.query)
            .ok_or_else(|| ValidationError::UnknownQuery(name.to_string()))
    }

    pub fn spec(&self, mode: GraphMode, limit: u64) -> Result<ControlFlowSpec, EngineError> {
        make_spec(&self.model, &self.control, mode, limit)
    }
}

/// Where a validation error belongs in the document.
#[derive(Debug, Clone, Copy)]
enum Site {
    Header,
    Decl(usize),
    Equation(usize),
    Context(usize),
    Query(usize),
    Control,
}

/// Parses and validates a document. Syntax errors are collected across the
/// whole source; validation runs only on syntactically valid input.
pub fn parse_model(source: &str) -> Result<ModelDocument, DslError> {
    let (mut p, mut errors) = parser::Parser::new(source);
    let (doc, spans, perrs) = p.document();
    errors.extend(perrs);
    if !errors.is_empty() {
        errors.sort_by_key(|e| (e.line, e.column));
        return Err(DslError::Syntax(errors));
    }
    check(&doc).map_err(|es| {
        DslError::Invalid(
            es.into_iter()
                .map(|(site, error)| {
                    let pos = match site {
                        Site::Header => spans.header,
                        Site::Decl(i) => spans.decls[i],
                        Site::Equation(i) => spans.equations[i],
                        Site::Context(i) => spans.contexts[i],
                        Site::Query(i) => spans.queries[i],
                        Site::Control => spans.control.unwrap_or(spans.header),
                    };
                    LocatedError {
                        line: pos.line,
                        column: pos.column,
                        error,
                    }
                })
                .collect(),
        )
    })?;
    Ok(doc)
}

/// Builds the model, contexts and queries of a document.
pub fn compile(doc: &ModelDocument) -> Result<CompiledModel, Vec<ValidationError>> {
    check(doc).map_err(|es| es.into_iter().map(|(_, e)| e).collect())
}

/// Parses and validates a stand-alone query, `[X <- v, ...] phi` or `phi`.
pub fn parse_query(source: &str, against: &CompiledModel) -> Result<CausalQuery, DslError> {
    let (mut p, mut errors) = parser::Parser::new(source);
    let res = p.query().and_then(|q| p.expect_eof().map(|_| q));
    let q = match res {
        Ok(q) if errors.is_empty() => q,
        Ok(_) => return Err(DslError::Syntax(errors)),
        Err(e) => {
            errors.push(e);
            return Err(DslError::Syntax(errors));
        }
    };
    let located = |error| DslError::Invalid(vec![LocatedError { line: 1, column: 1, error }]);
    against.model.resolve_intervention(&q.intervention).map_err(located)?;
    q.formula.compile(&against.model).map_err(located)?;
    Ok(q)
}

fn check(doc: &ModelDocument) -> Result<CompiledModel, Vec<(Site, ValidationError)>> {
    let mut errors = Vec::new();
    if doc.name.is_empty() {
        errors.push((Site::Header, ValidationError::UnknownVariable("model name".into())));
    }
    let mut exo = Vec::new();
    let mut endo = Vec::new();
    let mut endo_decl = Vec::new();
    let mut seen: Vec<&str> = Vec::new();
    for (i, d) in doc.declarations.iter().enumerate() {
        if seen.contains(&d.name.as_str()) {
            errors.push((Site::Decl(i), ValidationError::DuplicateVariable(d.name.clone())));
            continue;
        }
        seen.push(&d.name);
        if d.kind == DeclKind::Ctl && !d.range.is_control() {
            errors.push((Site::Decl(i), ValidationError::NonBooleanControlRange(d.name.clone())));
        }
        if d.kind == DeclKind::Exo {
            exo.push((d.name.clone(), d.range.clone()));
        } else {
            endo.push((d.name.clone(), d.range.clone()));
            endo_decl.push(i);
        }
    }
    let sig = Signature::new(exo, endo).map_err(|e| vec![(Site::Header, e)])?;

    // Equations are checked one by one so every bad equation is reported.
    let k = sig.num_exogenous();
    for (j, &i) in endo_decl.iter().enumerate() {
        match &doc.declarations[i].equation {
            Some(e) => {
                if let Err(err) = crate::model::check_equation(&sig, k + j, e) {
                    errors.push((Site::Equation(i), err));
                }
            }
            None => errors.push((
                Site::Decl(i),
                ValidationError::MissingEquation(doc.declarations[i].name.clone()),
            )),
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    let equations = endo_decl
        .iter()
        .map(|&i| {
            let d = &doc.declarations[i];
            (d.name.clone(), d.equation.clone().expect("checked above"))
        })
        .collect();
    let model = CausalModel::build(sig, equations).map_err(|e| {
        let site = match &e {
            ValidationError::CyclicDependency(vars) => doc
                .declarations
                .iter()
                .position(|d| d.name == vars[0])
                .map_or(Site::Header, Site::Equation),
            _ => Site::Header,
        };
        vec![(site, e)]
    })?;

    let control = doc.control_vars();
    for name in &control {
        let site = doc
            .declarations
            .iter()
            .position(|d| &d.name == name)
            .map_or(Site::Control, Site::Decl);
        match model.signature().range_of(name) {
            Some(r) if model.signature().is_endogenous(name) => {
                if !r.is_control() {
                    errors.push((site, ValidationError::NonBooleanControlRange(name.clone())));
                }
            }
            _ => errors.push((Site::Control, ValidationError::UnknownVariable(name.clone()))),
        }
    }
    for (i, c) in doc.contexts.iter().enumerate() {
        if doc.contexts[..i].iter().any(|o| o.name == c.name) {
            errors.push((Site::Context(i), ValidationError::DuplicateVariable(c.name.clone())));
        }
        if let Err(e) = model.resolve_context(&c.context) {
            errors.push((Site::Context(i), e));
        }
    }
    for (i, q) in doc.queries.iter().enumerate() {
        if doc.queries[..i].iter().any(|o| o.name == q.name) {
            errors.push((Site::Query(i), ValidationError::DuplicateVariable(q.name.clone())));
        }
        let res = model
            .resolve_intervention(&q.query.intervention)
            .and_then(|_| q.query.formula.compile(&model).map(|_| ()));
        if let Err(e) = res {
            errors.push((Site::Query(i), e));
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    Ok(CompiledModel {
        name: doc.name.clone(),
        model,
        control,
        contexts: doc.contexts.clone(),
        queries: doc.queries.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Value;

    const BOGUS: &str = "
model bogus
exo U_P : {0, 1}
exo U_A : {0, 1}
endo P : {0, 1} = U_P
endo A : {0, 1} = U_A
ctl NP_r = not(eq(P, 1))
ctl P_r = eq(P, 1)
ctl N_r = and(P_r, eq(A, 1))
endo S : {0, 1} = case { NP_r -> 1; N_r -> 1; else -> 0 }
context u01 : U_P = 0, U_A = 1
query survives : S = 1
";

    #[test]
    fn bogus_prevention_evaluates() {
        let doc = parse_model(BOGUS).unwrap();
        let c = compile(&doc).unwrap();
        let a = c.model.evaluate(c.context("u01").unwrap()).unwrap();
        assert_eq!(a.to_string(), "P=0 A=1 NP_r=top P_r=bot N_r=bot S=1");
        assert_eq!(c.control, ["NP_r", "P_r", "N_r"]);
    }

    #[test]
    fn round_trip_with_case() {
        let doc = parse_model(BOGUS).unwrap();
        let text = serialize_model(&doc);
        assert!(text.contains("case {\n  NP_r -> 1;\n  N_r -> 1;\n  else -> 0\n}"), "{text}");
        assert_eq!(parse_model(&text).unwrap(), doc);
        assert_eq!(serialize_model(&parse_model(&text).unwrap()), text);
    }

    #[test]
    fn unknown_variable_is_located_at_equation() {
        let src = "model m\nexo U : {0,1}\nendo X : {0, 1} =\n  Y\n";
        let DslError::Invalid(es) = parse_model(src).unwrap_err() else {
            panic!()
        };
        assert_eq!(es.len(), 1);
        assert_eq!(es[0].error, ValidationError::UnknownVariable("Y".into()));
        assert_eq!((es[0].line, es[0].column), (4, 3));
    }

    #[test]
    fn several_validation_errors() {
        let src = "model m\nexo U : {0,1}\nendo X : {0,1} = Y\nendo Z : {0,1} = 7\ncontext c : U = 2\n";
        let DslError::Invalid(es) = parse_model(src).unwrap_err() else {
            panic!()
        };
        assert_eq!(es.len(), 2);
        assert_eq!(es[0].line, 3);
        assert_eq!(es[1].line, 4);
    }

    #[test]
    fn queries() {
        let c = compile(&parse_model(BOGUS).unwrap()).unwrap();
        let q = parse_query("[P_r <- bot, N_r <- bot, A <- 0] S = 1", &c).unwrap();
        assert_eq!(q.intervention.len(), 3);
        assert!(c.model.satisfies(c.context("u01").unwrap(), &q).unwrap());
        let bare = parse_query("S = 1", &c).unwrap();
        assert!(bare.intervention.is_empty());
        assert!(matches!(
            parse_query("[A <- 5] S = 1", &c),
            Err(DslError::Invalid(ref es)) if matches!(es[0].error, ValidationError::RangeMismatch { .. })
        ));
        assert!(matches!(parse_query("S = ", &c), Err(DslError::Syntax(_))));
        assert!(matches!(parse_query("S = 1 S", &c), Err(DslError::Syntax(_))));
    }

    #[test]
    fn symbols_colliding_with_variables_are_quoted() {
        let src = "model cmd
exo U_M : {A, R, N}
exo U_S : {A, R, N}
endo M : {A, R, N} = U_M
endo S : {A, R, N} = U_S
endo C : {A, R, N} = case { not(eq(M, N)) -> M; else -> S }
context both : U_M = A, U_S = A
query attack : [S <- 'S] C = A
";
        assert!(parse_model(src).is_err(), "'S is not in the range");
        let doc = parse_model(&src.replace("[S <- 'S] ", "")).unwrap();
        let c = compile(&doc).unwrap();
        let a = c.model.evaluate(c.context("both").unwrap()).unwrap();
        assert_eq!(a.get("C"), Some(&Value::symbol("A")));
        assert_eq!(parse_model(&serialize_model(&doc)).unwrap(), doc);
    }

    #[test]
    fn control_annotation_overrides_ctl() {
        let src = "model m exo U : {0,1} endo R : {top, bot} = eq(U, 1) control R context c : U = 1";
        let doc = parse_model(src).unwrap();
        assert_eq!(doc.control_vars(), ["R"]);
        let bad = "model m exo U : {0,1} endo R : {0,1} = U control R";
        let DslError::Invalid(es) = parse_model(bad).unwrap_err() else {
            panic!()
        };
        assert_eq!(es[0].error, ValidationError::NonBooleanControlRange("R".into()));
    }
}
