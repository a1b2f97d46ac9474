use std::collections::BTreeSet;

use crate::error::ValidationError;

/// A family of subsets of an ordered universe of at most 64 variables.
///
/// Member `m` contains the `i`-th universe variable iff bit `i` of `m` is
/// set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CauseFamily {
    universe: Vec<String>,
    members: BTreeSet<u64>,
}

impl CauseFamily {
    pub fn new(universe: Vec<String>) -> Result<Self, ValidationError> {
        if universe.len() > 64 {
            return Err(ValidationError::UniverseTooLarge(universe.len()));
        }
        Ok(CauseFamily {
            universe,
            members: BTreeSet::new(),
        })
    }

    /// Builds a family from named member sets.
    pub fn from_sets<S: AsRef<str>>(
        universe: Vec<String>,
        sets: impl IntoIterator<Item = impl IntoIterator<Item = S>>,
    ) -> Result<Self, ValidationError> {
        let mut fam = CauseFamily::new(universe)?;
        for set in sets {
            let mask = fam.mask_of(set)?;
            fam.members.insert(mask);
        }
        Ok(fam)
    }

    pub fn mask_of<S: AsRef<str>>(
        &self,
        names: impl IntoIterator<Item = S>,
    ) -> Result<u64, ValidationError> {
        let mut mask = 0;
        for n in names {
            let n = n.as_ref();
            let i = self
                .universe
                .iter()
                .position(|u| u == n)
                .ok_or_else(|| ValidationError::UnknownVariable(n.to_string()))?;
            mask |= 1 << i;
        }
        Ok(mask)
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn members(&self) -> &BTreeSet<u64> {
        &self.members
    }

    pub fn insert(&mut self, mask: u64) {
        debug_assert_eq!(mask & !self.full_mask(), 0);
        self.members.insert(mask);
    }

    pub fn contains(&self, mask: u64) -> bool {
        self.members.contains(&mask)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn full_mask(&self) -> u64 {
        match self.universe.len() {
            64 => u64::MAX,
            n => (1u64 << n) - 1,
        }
    }

    /// `'1'`/`'0'` per universe variable, first variable first.
    pub fn bitstring(&self, mask: u64) -> String {
        (0..self.universe.len())
            .map(|i| if mask >> i & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn names(&self, mask: u64) -> Vec<&str> {
        super::bits(mask)
            .map(|i| self.universe[i].as_str())
            .collect()
    }

    /// Members as name lists, in mask order.
    pub fn named_members(&self) -> Vec<Vec<&str>> {
        self.members.iter().map(|&m| self.names(m)).collect()
    }

    /// Whether every superset of a member is a member.
    pub fn is_upward_closed(&self) -> bool {
        self.members.iter().all(|&m| {
            (0..self.universe.len())
                .all(|i| m >> i & 1 == 1 || self.members.contains(&(m | 1 << i)))
        })
    }

    /// Whether no member strictly contains another.
    pub fn is_antichain(&self) -> bool {
        self.members
            .iter()
            .all(|&a| self.members.iter().all(|&b| a == b || a & b != a))
    }
}

/// The inclusion-minimal members.
pub fn minimal_sets(family: &CauseFamily) -> CauseFamily {
    let mut by_size: Vec<u64> = family.members.iter().copied().collect();
    by_size.sort_by_key(|m| (m.count_ones(), *m));
    let mut keep: Vec<u64> = Vec::new();
    for m in by_size {
        if !keep.iter().any(|&k| k & m == k) {
            keep.push(m);
        }
    }
    CauseFamily {
        universe: family.universe.clone(),
        members: keep.into_iter().collect(),
    }
}

/// `{ X : universe \ X is not a member }`.
///
/// Enumerates all `2^n` subsets of the universe.
pub fn dual_transform(family: &CauseFamily) -> CauseFamily {
    let full = family.full_mask();
    let n = family.universe.len();
    let mut out = CauseFamily {
        universe: family.universe.clone(),
        members: BTreeSet::new(),
    };
    let count: u128 = 1u128 << n;
    for x in 0..count {
        let x = x as u64;
        if !family.members.contains(&(full & !x)) {
            out.members.insert(x);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uni(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn minimal_sets_examples() {
        let f = CauseFamily::from_sets(uni(&["A", "B", "C"]), [vec!["A", "B"], vec!["A", "B", "C"], vec!["C"]]).unwrap();
        let m = minimal_sets(&f);
        assert_eq!(m.named_members(), [vec!["A", "B"], vec!["C"]]);
        assert_eq!(minimal_sets(&m), m);

        let mut p = CauseFamily::new(uni(&["A", "B"])).unwrap();
        for x in 1..4 {
            p.insert(x);
        }
        assert_eq!(minimal_sets(&p).named_members(), [vec!["A"], vec!["B"]]);
    }

    #[test]
    fn dual_of_forest_fire_conjunction() {
        let f = CauseFamily::from_sets(uni(&["A", "B", "FF"]), [vec!["A", "B", "FF"]]).unwrap();
        let d = dual_transform(&f);
        assert_eq!(d.len(), 7);
        assert!(!d.contains(0));
        assert_eq!(
            minimal_sets(&d).named_members(),
            [vec!["A"], vec!["B"], vec!["FF"]]
        );
        assert_eq!(dual_transform(&d), f);
    }

    #[test]
    fn dual_of_extremes() {
        let mut all = CauseFamily::new(uni(&["A", "B"])).unwrap();
        for x in 0..4 {
            all.insert(x);
        }
        let none = CauseFamily::new(uni(&["A", "B"])).unwrap();
        assert_eq!(dual_transform(&all), none);
        assert_eq!(dual_transform(&none), all);
    }

    #[test]
    fn bitstring_follows_universe_order() {
        let f = CauseFamily::new(uni(&["A", "B", "C"])).unwrap();
        assert_eq!(f.bitstring(0b101), "101");
        assert_eq!(f.bitstring(0b110), "011");
        assert!(CauseFamily::new((0..65).map(|i| i.to_string()).collect()).is_err());
    }

    #[test]
    fn closure_predicates() {
        let mut f = CauseFamily::new(uni(&["A", "B"])).unwrap();
        f.insert(0b01);
        assert!(!f.is_upward_closed());
        f.insert(0b11);
        assert!(f.is_upward_closed());
        assert!(!f.is_antichain());
        assert!(minimal_sets(&f).is_antichain());
    }
}
