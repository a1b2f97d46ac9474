use std::fmt;
use std::sync::Arc;

use crate::error::ValidationError;

/// A value in a variable's range.
///
/// `Top` and `Bot` are reserved for control-flow variables and never compare
/// equal to a symbol or an integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(i64),
    Symbol(Arc<str>),
    Top,
    Bot,
}

impl Value {
    pub fn symbol(name: &str) -> Self {
        Value::Symbol(Arc::from(name))
    }

    pub fn is_control(&self) -> bool {
        matches!(self, Value::Top | Value::Bot)
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            Value::Top
        } else {
            Value::Bot
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Symbol(s) => f.write_str(s),
            Value::Top => f.write_str("top"),
            Value::Bot => f.write_str("bot"),
        }
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(i)
    }
}

/// A finite, ordered set of values. Declaration order drives every
/// enumeration over the range.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Range {
    values: Vec<Value>,
}

impl Range {
    /// Builds a range for `variable`, rejecting empty ranges and duplicates.
    pub fn new(variable: &str, values: Vec<Value>) -> Result<Self, ValidationError> {
        if values.is_empty() {
            return Err(ValidationError::EmptyRange(variable.to_string()));
        }
        for (i, v) in values.iter().enumerate() {
            if values[..i].contains(v) {
                return Err(ValidationError::DuplicateValue {
                    variable: variable.to_string(),
                    value: v.to_string(),
                });
            }
        }
        Ok(Range { values })
    }

    /// The control-flow range `{top, bot}`.
    pub fn control() -> Self {
        Range {
            values: vec![Value::Top, Value::Bot],
        }
    }

    pub fn binary() -> Self {
        Range {
            values: vec![Value::Int(0), Value::Int(1)],
        }
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, v: &Value) -> bool {
        self.values.contains(v)
    }

    /// True when the range is exactly `{top, bot}` in any order.
    pub fn is_control(&self) -> bool {
        self.values.len() == 2 && self.contains(&Value::Top) && self.contains(&Value::Bot)
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn top_and_bot_differ_from_everything_else() {
        let all = [
            Value::Top,
            Value::Bot,
            Value::Int(0),
            Value::Int(1),
            Value::symbol("top"),
            Value::symbol("bot"),
        ];
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate() {
                assert_eq!(a == b, i == j, "{a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn rejects_duplicates_and_empty() {
        assert_eq!(
            Range::new("X", vec![]),
            Err(ValidationError::EmptyRange("X".into()))
        );
        assert!(matches!(
            Range::new("X", vec![Value::Int(1), Value::Int(1)]),
            Err(ValidationError::DuplicateValue { .. })
        ));
        assert!(Range::new("X", vec![Value::Int(1)]).is_ok());
    }

    #[test]
    fn control_range_is_order_insensitive() {
        let r = Range::new("R", vec![Value::Bot, Value::Top]).unwrap();
        assert!(r.is_control());
        assert!(!Range::binary().is_control());
    }
}
