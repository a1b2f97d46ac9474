use std::collections::BTreeSet;

use super::signature::Signature;
use super::value::Value;
use crate::error::ValidationError;

/// Equation body over named variables.
///
/// `Eq`, `Not`, `And` and `Or` are boolean. `Const`, `Var`, `Case` and `Ite`
/// produce values. A control variable (range `{top, bot}`) and the constants
/// `top`/`bot` may also stand in boolean position, where `top` reads as true.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(Value),
    Var(String),
    Eq(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Case {
        branches: Vec<(Expr, Expr)>,
        otherwise: Box<Expr>,
    },
    Ite {
        cond: Box<Expr>,
        then: Value,
        otherwise: Value,
    },
}

impl Expr {
    pub fn var(name: &str) -> Self {
        Expr::Var(name.to_string())
    }

    pub fn int(i: i64) -> Self {
        Expr::Const(Value::Int(i))
    }

    pub fn eq(a: Expr, b: Expr) -> Self {
        Expr::Eq(Box::new(a), Box::new(b))
    }

    /// `eq(var(name), value)`.
    pub fn is(name: &str, v: impl Into<Value>) -> Self {
        Expr::eq(Expr::var(name), Expr::Const(v.into()))
    }

    pub fn not(e: Expr) -> Self {
        Expr::Not(Box::new(e))
    }

    pub fn ite(cond: Expr, then: Value, otherwise: Value) -> Self {
        Expr::Ite {
            cond: Box::new(cond),
            then,
            otherwise,
        }
    }

    /// True when the node is boolean by construction.
    pub fn is_boolean(&self) -> bool {
        matches!(self, Expr::Eq(..) | Expr::Not(_) | Expr::And(_) | Expr::Or(_))
    }

    /// Names of all referenced variables, in first-occurrence order.
    pub fn variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(n) => {
                if !out.contains(&n.as_str()) {
                    out.push(n);
                }
            }
            Expr::Eq(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Not(e) => e.collect_vars(out),
            Expr::And(es) | Expr::Or(es) => es.iter().for_each(|e| e.collect_vars(out)),
            Expr::Case {
                branches,
                otherwise,
            } => {
                for (c, v) in branches {
                    c.collect_vars(out);
                    v.collect_vars(out);
                }
                otherwise.collect_vars(out);
            }
            Expr::Ite { cond, .. } => cond.collect_vars(out),
        }
    }

    /// Replaces every occurrence of a variable by the value `lookup` gives it.
    pub fn substitute(&self, lookup: &dyn Fn(&str) -> Option<Value>) -> Expr {
        match self {
            Expr::Const(_) => self.clone(),
            Expr::Var(n) => match lookup(n) {
                Some(v) => Expr::Const(v),
                None => self.clone(),
            },
            Expr::Eq(a, b) => Expr::eq(a.substitute(lookup), b.substitute(lookup)),
            Expr::Not(e) => Expr::not(e.substitute(lookup)),
            Expr::And(es) => Expr::And(es.iter().map(|e| e.substitute(lookup)).collect()),
            Expr::Or(es) => Expr::Or(es.iter().map(|e| e.substitute(lookup)).collect()),
            Expr::Case {
                branches,
                otherwise,
            } => Expr::Case {
                branches: branches
                    .iter()
                    .map(|(c, v)| (c.substitute(lookup), v.substitute(lookup)))
                    .collect(),
                otherwise: Box::new(otherwise.substitute(lookup)),
            },
            Expr::Ite {
                cond,
                then,
                otherwise,
            } => Expr::ite(cond.substitute(lookup), then.clone(), otherwise.clone()),
        }
    }
}

/// Compiled equation over variable indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Node {
    Const(Value),
    Var(usize),
    Eq(Box<Node>, Box<Node>),
    Not(Box<Node>),
    And(Vec<Node>),
    Or(Vec<Node>),
    /// A `{top, bot}` variable or constant read as a truth value.
    Truthy(Box<Node>),
    Case(Vec<(Node, Node)>, Box<Node>),
    Ite(Box<Node>, Value, Value),
    /// Boolean body of an equation encoded into the target range.
    Encode(Box<Node>, Value, Value),
}

impl Node {
    pub(crate) fn value(&self, env: &[Value]) -> Value {
        match self {
            Node::Const(v) => v.clone(),
            Node::Var(i) => env[*i].clone(),
            Node::Case(branches, otherwise) => {
                for (c, v) in branches {
                    if c.truth(env) {
                        return v.value(env);
                    }
                }
                otherwise.value(env)
            }
            Node::Ite(c, t, e) | Node::Encode(c, t, e) => {
                if c.truth(env) {
                    t.clone()
                } else {
                    e.clone()
                }
            }
            _ => unreachable!("boolean node in value position"),
        }
    }

    pub(crate) fn truth(&self, env: &[Value]) -> bool {
        match self {
            Node::Eq(a, b) => a.value(env) == b.value(env),
            Node::Not(e) => !e.truth(env),
            Node::And(es) => es.iter().all(|e| e.truth(env)),
            Node::Or(es) => es.iter().any(|e| e.truth(env)),
            Node::Truthy(e) => e.value(env) == Value::Top,
            _ => unreachable!("value node in boolean position"),
        }
    }

    pub(crate) fn support(&self, out: &mut BTreeSet<usize>) {
        match self {
            Node::Const(_) => {}
            Node::Var(i) => {
                out.insert(*i);
            }
            Node::Eq(a, b) => {
                a.support(out);
                b.support(out);
            }
            Node::Not(e) | Node::Truthy(e) => e.support(out),
            Node::And(es) | Node::Or(es) => es.iter().for_each(|e| e.support(out)),
            Node::Case(bs, o) => {
                for (c, v) in bs {
                    c.support(out);
                    v.support(out);
                }
                o.support(out);
            }
            Node::Ite(c, _, _) | Node::Encode(c, _, _) => c.support(out),
        }
    }
}

/// Type-checks `expr` as the equation of endogenous variable `target` and
/// compiles it to an index tree.
pub(crate) fn compile_equation(
    sig: &Signature,
    target: usize,
    expr: &Expr,
) -> Result<Node, ValidationError> {
    let c = Compiler { sig, target };
    let range = sig.range(target);
    let node = if expr.is_boolean() {
        let cond = c.boolean(expr)?;
        let (t, f) = if range.is_control() {
            (Value::Top, Value::Bot)
        } else {
            (Value::Int(1), Value::Int(0))
        };
        Node::Encode(Box::new(cond), t, f)
    } else {
        c.value(expr)?
    };
    for v in c.outputs(&node) {
        if !range.contains(&v) {
            return Err(ValidationError::RangeMismatch {
                variable: sig.name(target).to_string(),
                value: v.to_string(),
            });
        }
    }
    Ok(node)
}

struct Compiler<'a> {
    sig: &'a Signature,
    target: usize,
}

impl Compiler<'_> {
    fn kind_error(&self, detail: String) -> ValidationError {
        ValidationError::KindMismatch {
            variable: self.sig.name(self.target).to_string(),
            detail,
        }
    }

    fn lookup(&self, name: &str) -> Result<usize, ValidationError> {
        self.sig
            .index_of(name)
            .ok_or_else(|| ValidationError::UnknownVariable(name.to_string()))
    }

    fn boolean(&self, e: &Expr) -> Result<Node, ValidationError> {
        Ok(match e {
            Expr::Eq(a, b) => {
                let (na, nb) = (self.value(a)?, self.value(b)?);
                self.check_comparable(&na, &nb)?;
                Node::Eq(Box::new(na), Box::new(nb))
            }
            Expr::Not(inner) => Node::Not(Box::new(self.boolean(inner)?)),
            Expr::And(es) | Expr::Or(es) => {
                if es.is_empty() {
                    return Err(self.kind_error("empty and/or".into()));
                }
                let nodes = es
                    .iter()
                    .map(|x| self.boolean(x))
                    .collect::<Result<Vec<_>, _>>()?;
                if matches!(e, Expr::And(_)) {
                    Node::And(nodes)
                } else {
                    Node::Or(nodes)
                }
            }
            Expr::Var(n) => {
                let i = self.lookup(n)?;
                if !self.sig.range(i).is_control() {
                    return Err(self.kind_error(format!(
                        "`{n}` is used as a condition but its range is not {{top, bot}}"
                    )));
                }
                Node::Truthy(Box::new(Node::Var(i)))
            }
            Expr::Const(v) if v.is_control() => Node::Truthy(Box::new(Node::Const(v.clone()))),
            Expr::Const(v) => {
                return Err(self.kind_error(format!("constant `{v}` used as a condition")))
            }
            Expr::Case { .. } | Expr::Ite { .. } => {
                return Err(self.kind_error("case/ite used as a condition".into()))
            }
        })
    }

    fn value(&self, e: &Expr) -> Result<Node, ValidationError> {
        Ok(match e {
            Expr::Const(v) => Node::Const(v.clone()),
            Expr::Var(n) => Node::Var(self.lookup(n)?),
            Expr::Case {
                branches,
                otherwise,
            } => {
                let mut bs = Vec::with_capacity(branches.len());
                for (c, v) in branches {
                    bs.push((self.boolean(c)?, self.value(v)?));
                }
                Node::Case(bs, Box::new(self.value(otherwise)?))
            }
            Expr::Ite {
                cond,
                then,
                otherwise,
            } => Node::Ite(Box::new(self.boolean(cond)?), then.clone(), otherwise.clone()),
            Expr::Eq(..) | Expr::Not(_) | Expr::And(_) | Expr::Or(_) => {
                return Err(self.kind_error(
                    "condition used where a value is expected (wrap it in ite)".into(),
                ))
            }
        })
    }

    /// A constant compared against a variable must lie in the variable's range.
    fn check_comparable(&self, a: &Node, b: &Node) -> Result<(), ValidationError> {
        let pair = match (a, b) {
            (Node::Var(i), other) | (other, Node::Var(i)) => Some((*i, other)),
            _ => None,
        };
        if let Some((i, other)) = pair {
            for v in self.outputs(other) {
                if !self.sig.range(i).contains(&v) {
                    return Err(ValidationError::RangeMismatch {
                        variable: self.sig.name(i).to_string(),
                        value: v.to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Values a value node can produce, in first-occurrence order.
    fn outputs(&self, n: &Node) -> Vec<Value> {
        let mut out = Vec::new();
        let mut push = |v: &Value| {
            if !out.contains(v) {
                out.push(v.clone());
            }
        };
        match n {
            Node::Const(v) => push(v),
            Node::Var(i) => self.sig.range(*i).values().iter().for_each(push),
            Node::Case(bs, o) => {
                for (_, v) in bs {
                    self.outputs(v).iter().for_each(&mut push);
                }
                self.outputs(o).iter().for_each(&mut push);
            }
            Node::Ite(_, t, e) | Node::Encode(_, t, e) => {
                push(t);
                push(e);
            }
            _ => {}
        }
        out
    }
}
