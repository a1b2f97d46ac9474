use std::fmt;

use super::causal::{CausalModel, Context, Intervention};
use super::value::Value;
use crate::error::ValidationError;

/// Boolean combination of primitive events `X = x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Event(String, Value),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn event(name: &str, v: impl Into<Value>) -> Self {
        Formula::Event(name.to_string(), v.into())
    }

    pub fn negate(self) -> Self {
        Formula::Not(Box::new(self))
    }

    /// The event `(X, x)` if the formula is a single primitive event.
    pub fn as_event(&self) -> Option<(&str, &Value)> {
        match self {
            Formula::Event(n, v) => Some((n, v)),
            _ => None,
        }
    }

    /// Validates against the model's endogenous variables (pinned ones
    /// included) and compiles to endogenous indices.
    pub fn compile(&self, model: &CausalModel) -> Result<CompiledFormula, ValidationError> {
        let sig = model.full_signature();
        Ok(match self {
            Formula::Event(name, v) => {
                let j = sig
                    .endo_index(name)
                    .ok_or_else(|| ValidationError::UnknownVariable(name.clone()))?;
                if !sig.endogenous()[j].1.contains(v) {
                    return Err(ValidationError::RangeMismatch {
                        variable: name.clone(),
                        value: v.to_string(),
                    });
                }
                CompiledFormula::Event(sig.num_exogenous() + j, v.clone())
            }
            Formula::Not(f) => CompiledFormula::Not(Box::new(f.compile(model)?)),
            Formula::And(fs) => CompiledFormula::And(
                fs.iter().map(|f| f.compile(model)).collect::<Result<_, _>>()?,
            ),
            Formula::Or(fs) => CompiledFormula::Or(
                fs.iter().map(|f| f.compile(model)).collect::<Result<_, _>>()?,
            ),
        })
    }
}

/// Prints with `!`, `&`, `|`, parenthesising nested binary connectives.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn atom(x: &Formula, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match x {
                Formula::And(v) | Formula::Or(v) if v.len() > 1 => write!(f, "({x})"),
                _ => write!(f, "{x}"),
            }
        }
        match self {
            Formula::Event(n, v) => write!(f, "{n} = {v}"),
            Formula::Not(x) => {
                f.write_str("!")?;
                match **x {
                    Formula::Event(..) => write!(f, "({x})"),
                    _ => atom(x, f),
                }
            }
            Formula::And(xs) | Formula::Or(xs) => {
                let sep = if matches!(self, Formula::And(_)) { " & " } else { " | " };
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    atom(x, f)?;
                }
                Ok(())
            }
        }
    }
}

/// Formula over indices of the full variable space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompiledFormula {
    Event(usize, Value),
    Not(Box<CompiledFormula>),
    And(Vec<CompiledFormula>),
    Or(Vec<CompiledFormula>),
}

impl CompiledFormula {
    pub fn holds(&self, env: &[Value]) -> bool {
        match self {
            CompiledFormula::Event(i, v) => &env[*i] == v,
            CompiledFormula::Not(f) => !f.holds(env),
            CompiledFormula::And(fs) => fs.iter().all(|f| f.holds(env)),
            CompiledFormula::Or(fs) => fs.iter().any(|f| f.holds(env)),
        }
    }
}

/// `[Y <- y] phi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalQuery {
    pub intervention: Intervention,
    pub formula: Formula,
}

impl CausalQuery {
    pub fn new(intervention: Intervention, formula: Formula) -> Self {
        CausalQuery {
            intervention,
            formula,
        }
    }
}

impl From<Formula> for CausalQuery {
    fn from(f: Formula) -> Self {
        CausalQuery::new(Intervention::empty(), f)
    }
}

impl fmt::Display for CausalQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.intervention.is_empty() {
            write!(f, "{} ", self.intervention)?;
        }
        write!(f, "{}", self.formula)
    }
}

impl CausalModel {
    /// Decides `(M, u) |= [Y <- y] phi`.
    pub fn satisfies(&self, ctx: &Context, query: &CausalQuery) -> Result<bool, ValidationError> {
        let exo = self.resolve_context(ctx)?;
        let overlay = self.resolve_intervention(&query.intervention)?;
        let phi = query.formula.compile(self)?;
        Ok(phi.holds(&self.solve(&exo, &overlay)))
    }
}
