use super::lexer::{lex, Pos, Tok};
use super::{DeclKind, Declaration, ModelDocument, NamedContext, NamedQuery, ParseError};
use crate::model::{CausalQuery, Context, Expr, Formula, Intervention, Range, Value};

pub(crate) const KEYWORDS: &[&str] = &[
    "model", "exo", "endo", "ctl", "context", "query", "control", "top", "bot", "case", "else",
    "ite", "eq", "not", "and", "or",
];

const STATEMENTS: &[&str] = &["model", "exo", "endo", "ctl", "context", "query", "control"];

/// Source positions of the parts of a document, parallel to its lists.
#[derive(Debug, Default)]
pub(crate) struct Spans {
    pub header: Pos,
    pub decls: Vec<Pos>,
    pub equations: Vec<Pos>,
    pub contexts: Vec<Pos>,
    pub queries: Vec<Pos>,
    pub control: Option<Pos>,
}

type PResult<T> = Result<T, ParseError>;

pub(crate) struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
}

impl Parser {
    pub(crate) fn new(src: &str) -> (Self, Vec<ParseError>) {
        let (toks, errors) = lex(src);
        (Parser { toks, i: 0 }, errors)
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn at_statement(&self) -> bool {
        matches!(self.peek(), Tok::Ident(s) if STATEMENTS.contains(&s.as_str()))
    }

    fn error(&self, message: impl Into<String>, expected: &[&str]) -> ParseError {
        let p = self.pos();
        ParseError {
            line: p.line,
            column: p.column,
            message: message.into(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        self.error(format!("unexpected {}", self.peek().describe()), expected)
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&[t.text()]))
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    /// A non-keyword identifier.
    fn name(&mut self) -> PResult<String> {
        match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            Tok::Ident(s) => Err(self.error(format!("`{s}` is a reserved word"), &["name"])),
            _ => Err(self.unexpected(&["name"])),
        }
    }

    /// Skips to the next statement keyword, consuming at least one token.
    fn synchronize(&mut self) {
        if !self.at_eof() {
            self.bump();
        }
        while !self.at_eof() && !self.at_statement() {
            self.bump();
        }
    }

    pub(crate) fn document(&mut self) -> (ModelDocument, Spans, Vec<ParseError>) {
        let mut doc = ModelDocument::default();
        let mut spans = Spans::default();
        let mut errors = Vec::new();
        let mut seen_header = false;
        while !self.at_eof() {
            let pos = self.pos();
            let kw = match self.peek() {
                Tok::Ident(s) if STATEMENTS.contains(&s.as_str()) => s.clone(),
                _ => {
                    errors.push(self.unexpected(STATEMENTS));
                    self.synchronize();
                    continue;
                }
            };
            self.bump();
            let res = match kw.as_str() {
                "model" if seen_header => Err(ParseError::new(pos, "duplicate `model` header".into())),
                "model" => self.name().map(|n| {
                    doc.name = n;
                    spans.header = pos;
                    seen_header = true;
                }),
                "exo" | "endo" | "ctl" => self.declaration(&kw).map(|(d, eq_pos)| {
                    doc.declarations.push(d);
                    spans.decls.push(pos);
                    spans.equations.push(eq_pos.unwrap_or(pos));
                }),
                "context" => self.context().map(|c| {
                    doc.contexts.push(c);
                    spans.contexts.push(pos);
                }),
                "query" => self.named_query().map(|q| {
                    doc.queries.push(q);
                    spans.queries.push(pos);
                }),
                "control" if doc.control_annotation.is_some() => {
                    Err(ParseError::new(pos, "duplicate `control` annotation".into()))
                }
                _ => self.name_list().map(|names| {
                    doc.control_annotation = Some(names);
                    spans.control = Some(pos);
                }),
            };
            if let Err(e) = res {
                errors.push(e);
                if !self.at_statement() {
                    self.synchronize();
                }
            }
        }
        if !seen_header && errors.is_empty() {
            errors.push(ParseError::new(self.pos(), "missing `model NAME` header".into()));
        }
        resolve_symbols(&mut doc);
        (doc, spans, errors)
    }

    fn declaration(&mut self, kw: &str) -> PResult<(Declaration, Option<Pos>)> {
        let name = self.name()?;
        let (kind, range) = if kw == "ctl" {
            (DeclKind::Ctl, Range::control())
        } else {
            self.expect(Tok::Colon)?;
            let range_pos = self.pos();
            let values = self.range_values()?;
            let range = Range::new(&name, values)
                .map_err(|e| ParseError::new(range_pos, e.to_string()))?;
            (if kw == "exo" { DeclKind::Exo } else { DeclKind::Endo }, range)
        };
        let mut eq_pos = None;
        let equation = if kind == DeclKind::Exo {
            None
        } else {
            self.expect(Tok::Eq)?;
            eq_pos = Some(self.pos());
            Some(self.expr()?)
        };
        Ok((
            Declaration {
                kind,
                name,
                range,
                equation,
            },
            eq_pos,
        ))
    }

    fn range_values(&mut self) -> PResult<Vec<Value>> {
        self.expect(Tok::LBrace)?;
        let mut out = vec![self.value()?];
        while self.eat(&Tok::Comma) {
            out.push(self.value()?);
        }
        self.expect(Tok::RBrace)?;
        Ok(out)
    }

    /// A literal value; bare names are symbols.
    fn value(&mut self) -> PResult<Value> {
        let v = match self.peek() {
            Tok::Int(i) => Value::Int(*i),
            Tok::Quoted(s) => Value::symbol(s),
            Tok::Ident(s) if s == "top" => Value::Top,
            Tok::Ident(s) if s == "bot" => Value::Bot,
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => Value::symbol(s),
            _ => return Err(self.unexpected(&["value"])),
        };
        self.bump();
        Ok(v)
    }

    fn name_list(&mut self) -> PResult<Vec<String>> {
        let mut out = vec![self.name()?];
        while self.eat(&Tok::Comma) {
            out.push(self.name()?);
        }
        Ok(out)
    }

    fn context(&mut self) -> PResult<NamedContext> {
        let name = self.name()?;
        self.expect(Tok::Colon)?;
        let mut values = Vec::new();
        loop {
            let var = self.name()?;
            self.expect(Tok::Eq)?;
            values.push((var, self.value()?));
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        Ok(NamedContext {
            name,
            context: Context::new(values),
        })
    }

    fn named_query(&mut self) -> PResult<NamedQuery> {
        let name = self.name()?;
        self.expect(Tok::Colon)?;
        Ok(NamedQuery {
            name,
            query: self.query()?,
        })
    }

    pub(crate) fn query(&mut self) -> PResult<CausalQuery> {
        let mut bindings = Vec::new();
        if self.eat(&Tok::LBracket) {
            if !self.eat(&Tok::RBracket) {
                loop {
                    let var = self.name()?;
                    self.expect(Tok::LArrow)?;
                    bindings.push((var, self.value()?));
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(Tok::RBracket)?;
            }
        }
        Ok(CausalQuery::new(Intervention::new(bindings), self.formula()?))
    }

    pub(crate) fn expect_eof(&mut self) -> PResult<()> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.unexpected(&["end of input"]))
        }
    }

    fn formula(&mut self) -> PResult<Formula> {
        let mut parts = vec![self.conjunction()?];
        while self.eat(&Tok::Pipe) {
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::Or(parts)
        })
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut parts = vec![self.unary()?];
        while self.eat(&Tok::Amp) {
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::And(parts)
        })
    }

    fn unary(&mut self) -> PResult<Formula> {
        if self.eat(&Tok::Bang) {
            return Ok(Formula::Not(Box::new(self.unary()?)));
        }
        if self.eat(&Tok::LParen) {
            let f = self.formula()?;
            self.expect(Tok::RParen)?;
            return Ok(f);
        }
        if !matches!(self.peek(), Tok::Ident(_)) {
            return Err(self.unexpected(&["!", "(", "name"]));
        }
        let var = self.name()?;
        self.expect(Tok::Eq)?;
        Ok(Formula::Event(var, self.value()?))
    }

    fn expr(&mut self) -> PResult<Expr> {
        let head = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return Ok(Expr::Const(self.value()?)),
        };
        match head.as_str() {
            "eq" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let a = self.expr()?;
                self.expect(Tok::Comma)?;
                let b = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(Expr::eq(a, b))
            }
            "not" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(Expr::not(e))
            }
            "and" | "or" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let mut es = vec![self.expr()?];
                while self.eat(&Tok::Comma) {
                    es.push(self.expr()?);
                }
                self.expect(Tok::RParen)?;
                Ok(if head == "and" { Expr::And(es) } else { Expr::Or(es) })
            }
            "ite" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let c = self.expr()?;
                self.expect(Tok::Comma)?;
                let t = self.value()?;
                self.expect(Tok::Comma)?;
                let e = self.value()?;
                self.expect(Tok::RParen)?;
                Ok(Expr::ite(c, t, e))
            }
            "case" => {
                self.bump();
                self.case_body()
            }
            "top" | "bot" => Ok(Expr::Const(self.value()?)),
            _ => Ok(Expr::Var(self.name()?)),
        }
    }

    fn case_body(&mut self) -> PResult<Expr> {
        self.expect(Tok::LBrace)?;
        let mut branches = Vec::new();
        loop {
            if self.is_keyword("else") {
                self.bump();
                self.expect(Tok::Arrow)?;
                let otherwise = self.expr()?;
                self.eat(&Tok::Semi);
                self.expect(Tok::RBrace)?;
                return Ok(Expr::Case {
                    branches,
                    otherwise: Box::new(otherwise),
                });
            }
            if *self.peek() == Tok::RBrace {
                return Err(self.error("case needs an `else` branch", &["else"]));
            }
            let c = self.expr()?;
            self.expect(Tok::Arrow)?;
            let v = self.expr()?;
            branches.push((c, v));
            if !self.eat(&Tok::Semi) && !self.is_keyword("else") {
                return Err(self.unexpected(&[";", "else"]));
            }
        }
    }
}

/// Bare names that are not variables but occur in some range are symbols.
fn resolve_symbols(doc: &mut ModelDocument) {
    let vars: Vec<String> = doc.declarations.iter().map(|d| d.name.clone()).collect();
    let symbols: Vec<Value> = doc
        .declarations
        .iter()
        .flat_map(|d| d.range.values().iter().cloned())
        .filter(|v| matches!(v, Value::Symbol(_)))
        .collect();
    let lookup = |n: &str| {
        let sym = Value::symbol(n);
        (!vars.iter().any(|v| v == n) && symbols.contains(&sym)).then_some(sym)
    };
    for d in &mut doc.declarations {
        if let Some(e) = &d.equation {
            d.equation = Some(e.substitute(&lookup));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(src: &str) -> (ModelDocument, Vec<ParseError>) {
        let (mut p, mut errs) = Parser::new(src);
        let (doc, _, e) = p.document();
        errs.extend(e);
        (doc, errs)
    }

    #[test]
    fn case_and_ite() {
        let (doc, errs) = parse(
            "model m exo U : {0,1} endo X : {0,1} = case { eq(U,1) -> 0; else -> 1 }
             endo Y : {0, 1} = ite(eq(X, 0), 1, 0)",
        );
        assert!(errs.is_empty(), "{errs:?}");
        assert_eq!(doc.declarations.len(), 3);
        assert!(matches!(doc.declarations[1].equation, Some(Expr::Case { .. })));
    }

    #[test]
    fn recovery_reports_several_errors() {
        let (doc, errs) = parse("model m\nexo U : {0,1\nendo X : {0,1} = \nexo V : {0,1}\n");
        assert_eq!(errs.len(), 2, "{errs:?}");
        assert_eq!(errs[0].line, 3);
        assert_eq!(errs[1].line, 4);
        assert_eq!(doc.declarations.len(), 1);
        assert_eq!(doc.declarations[0].name, "V");
    }

    #[test]
    fn case_requires_else() {
        let (_, errs) = parse("model m exo U : {0,1} endo X : {0,1} = case { eq(U,1) -> 0; }");
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].expected, ["else"]);
    }

    #[test]
    fn symbol_resolution() {
        let (doc, errs) = parse(
            "model m exo U : {A, B} endo S : {A, B} = U
             endo C : {A, B} = case { eq(U, A) -> S; else -> 'S }",
        );
        assert!(errs.is_empty());
        let Some(Expr::Case { branches, .. }) = &doc.declarations[2].equation else {
            panic!()
        };
        assert_eq!(branches[0].0, Expr::eq(Expr::var("U"), Expr::Const(Value::symbol("A"))));
        assert_eq!(branches[0].1, Expr::var("S"));
    }

    #[test]
    fn formula_precedence() {
        let (mut p, _) = Parser::new("[X <- 1] !A = 1 & B = 0 | C = 1");
        let q = p.query().unwrap();
        assert_eq!(q.intervention.len(), 1);
        assert_eq!(q.formula.to_string(), "(!(A = 1) & B = 0) | C = 1");
    }
}
