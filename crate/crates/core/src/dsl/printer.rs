use std::fmt::Write;

use super::lexer::is_identifier;
use super::parser::KEYWORDS;
use super::{DeclKind, ModelDocument};
use crate::model::{CausalQuery, Expr, Formula, Range, Value};

struct Printer<'a> {
    vars: Vec<&'a str>,
    out: String,
}

impl Printer<'_> {
    fn value(&self, v: &Value) -> String {
        match v {
            Value::Symbol(s) => {
                let bare = is_identifier(s)
                    && !KEYWORDS.contains(&s.as_ref())
                    && !self.vars.contains(&s.as_ref());
                if bare {
                    s.to_string()
                } else {
                    format!("'{s}")
                }
            }
            other => other.to_string(),
        }
    }

    fn range(&self, r: &Range) -> String {
        let vals: Vec<String> = r.values().iter().map(|v| self.value(v)).collect();
        format!("{{{}}}", vals.join(", "))
    }

    fn expr(&mut self, e: &Expr, indent: usize) {
        match e {
            Expr::Const(v) => {
                let s = self.value(v);
                self.out.push_str(&s);
            }
            Expr::Var(n) => self.out.push_str(n),
            Expr::Eq(a, b) => self.call("eq", &[a, b], indent),
            Expr::Not(a) => self.call("not", &[a], indent),
            Expr::And(es) => self.call("and", &es.iter().collect::<Vec<_>>(), indent),
            Expr::Or(es) => self.call("or", &es.iter().collect::<Vec<_>>(), indent),
            Expr::Ite {
                cond,
                then,
                otherwise,
            } => {
                self.out.push_str("ite(");
                self.expr(cond, indent);
                let (t, o) = (self.value(then), self.value(otherwise));
                let _ = write!(self.out, ", {t}, {o})");
            }
            Expr::Case {
                branches,
                otherwise,
            } => {
                let pad = "  ".repeat(indent + 1);
                self.out.push_str("case {\n");
                for (c, v) in branches {
                    self.out.push_str(&pad);
                    self.expr(c, indent + 1);
                    self.out.push_str(" -> ");
                    self.expr(v, indent + 1);
                    self.out.push_str(";\n");
                }
                self.out.push_str(&pad);
                self.out.push_str("else -> ");
                self.expr(otherwise, indent + 1);
                self.out.push('\n');
                self.out.push_str(&"  ".repeat(indent));
                self.out.push('}');
            }
        }
    }

    fn call(&mut self, f: &str, args: &[&Expr], indent: usize) {
        self.out.push_str(f);
        self.out.push('(');
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                self.out.push_str(", ");
            }
            self.expr(a, indent);
        }
        self.out.push(')');
    }

    fn formula(&self, f: &Formula) -> String {
        match f {
            Formula::Event(n, v) => format!("{n} = {}", self.value(v)),
            Formula::Not(x) => match **x {
                Formula::Not(_) => format!("!{}", self.formula(x)),
                _ => format!("!({})", self.formula(x)),
            },
            Formula::And(xs) | Formula::Or(xs) => {
                let sep = if matches!(f, Formula::And(_)) { " & " } else { " | " };
                let parts: Vec<String> = xs
                    .iter()
                    .map(|x| match x {
                        Formula::And(_) | Formula::Or(_) => format!("({})", self.formula(x)),
                        _ => self.formula(x),
                    })
                    .collect();
                parts.join(sep)
            }
        }
    }

    fn query(&self, q: &CausalQuery) -> String {
        let mut s = String::new();
        if !q.intervention.is_empty() {
            let b: Vec<String> = q
                .intervention
                .bindings
                .iter()
                .map(|(n, v)| format!("{n} <- {}", self.value(v)))
                .collect();
            let _ = write!(s, "[{}] ", b.join(", "));
        }
        s.push_str(&self.formula(&q.formula));
        s
    }
}

/// Canonical text of a document: header, declarations, control annotation,
/// contexts and queries, each group separated by a blank line.
pub fn serialize_model(doc: &ModelDocument) -> String {
    let mut p = Printer {
        vars: doc.declarations.iter().map(|d| d.name.as_str()).collect(),
        out: String::new(),
    };
    let _ = writeln!(p.out, "model {}", doc.name);
    if !doc.declarations.is_empty() {
        p.out.push('\n');
    }
    for d in &doc.declarations {
        match d.kind {
            DeclKind::Exo => {
                let r = p.range(&d.range);
                let _ = write!(p.out, "exo {} : {r}", d.name);
            }
            DeclKind::Endo => {
                let r = p.range(&d.range);
                let _ = write!(p.out, "endo {} : {r} = ", d.name);
            }
            DeclKind::Ctl => {
                let _ = write!(p.out, "ctl {} = ", d.name);
            }
        }
        if let Some(e) = &d.equation {
            p.expr(e, 0);
        }
        p.out.push('\n');
    }
    if let Some(names) = &doc.control_annotation {
        let _ = write!(p.out, "\ncontrol {}\n", names.join(", "));
    }
    if !doc.contexts.is_empty() {
        p.out.push('\n');
    }
    for c in &doc.contexts {
        let vals: Vec<String> = c
            .context
            .values
            .iter()
            .map(|(n, v)| format!("{n} = {}", p.value(v)))
            .collect();
        let _ = writeln!(p.out, "context {} : {}", c.name, vals.join(", "));
    }
    if !doc.queries.is_empty() {
        p.out.push('\n');
    }
    for q in &doc.queries {
        let text = p.query(&q.query);
        let _ = writeln!(p.out, "query {} : {text}", q.name);
    }
    p.out
}

/// Text of a query as accepted by the query parser.
pub fn serialize_query(doc: &ModelDocument, q: &CausalQuery) -> String {
    let p = Printer {
        vars: doc.declarations.iter().map(|d| d.name.as_str()).collect(),
        out: String::new(),
    };
    p.query(q)
}
