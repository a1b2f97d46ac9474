use std::collections::HashMap;

use super::value::Range;
use crate::error::ValidationError;

/// Exogenous and endogenous variables with their ranges.
///
/// Variables are indexed exogenous first, then endogenous, each in
/// declaration order. Every engine uses this index space internally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    exogenous: Vec<(String, Range)>,
    endogenous: Vec<(String, Range)>,
    index: HashMap<String, usize>,
}

impl Signature {
    pub fn new(
        exogenous: Vec<(String, Range)>,
        endogenous: Vec<(String, Range)>,
    ) -> Result<Self, ValidationError> {
        let mut index = HashMap::new();
        for (i, (name, _)) in exogenous.iter().chain(endogenous.iter()).enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(ValidationError::DuplicateVariable(name.clone()));
            }
        }
        Ok(Signature {
            exogenous,
            endogenous,
            index,
        })
    }

    pub fn exogenous(&self) -> &[(String, Range)] {
        &self.exogenous
    }

    pub fn endogenous(&self) -> &[(String, Range)] {
        &self.endogenous
    }

    pub fn num_exogenous(&self) -> usize {
        self.exogenous.len()
    }

    pub fn num_endogenous(&self) -> usize {
        self.endogenous.len()
    }

    pub fn len(&self) -> usize {
        self.exogenous.len() + self.endogenous.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Position of `name` among the endogenous variables.
    pub fn endo_index(&self, name: &str) -> Option<usize> {
        self.index_of(name)
            .and_then(|i| i.checked_sub(self.exogenous.len()))
    }

    pub fn is_exogenous(&self, name: &str) -> bool {
        self.index_of(name).is_some_and(|i| i < self.exogenous.len())
    }

    pub fn is_endogenous(&self, name: &str) -> bool {
        self.endo_index(name).is_some()
    }

    pub fn name(&self, i: usize) -> &str {
        self.entry(i).0.as_str()
    }

    pub fn range(&self, i: usize) -> &Range {
        &self.entry(i).1
    }

    pub fn range_of(&self, name: &str) -> Option<&Range> {
        self.index_of(name).map(|i| self.range(i))
    }

    fn entry(&self, i: usize) -> &(String, Range) {
        let n = self.exogenous.len();
        if i < n {
            &self.exogenous[i]
        } else {
            &self.endogenous[i - n]
        }
    }

    /// Names of all variables in index order.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.exogenous
            .iter()
            .chain(self.endogenous.iter())
            .map(|(n, _)| n.as_str())
    }
}
