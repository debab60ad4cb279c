//! Fluent valuations: a total assignment of truth values to the declared fluents.
//!
//! Fluents are addressed by their declaration index. A valuation is a bitset,
//! which keeps situation nodes `Copy` and makes exhaustive enumeration over
//! all `2^n` valuations a simple counter.

use std::fmt;

/// Hard ceiling on the number of fluents a domain may declare.
pub const MAX_FLUENTS: usize = 64;

/// Ceiling under which exhaustive enumeration over all valuations is allowed.
pub const MAX_ENUMERABLE_FLUENTS: usize = 20;

/// Index of a declared fluent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fluent(pub usize);

/// Truth values for fluents `0..n`. Bits above `n` are always clear.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FluentValuation(u64);

impl FluentValuation {
    pub const fn from_bits(bits: u64) -> Self {
        Self(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn from_bools(values: &[bool]) -> Self {
        assert!(values.len() <= MAX_FLUENTS);
        let bits = values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v)
            .fold(0u64, |acc, (i, _)| acc | (1 << i));
        Self(bits)
    }

    pub fn get(self, fluent: Fluent) -> bool {
        self.0 >> fluent.0 & 1 == 1
    }

    pub fn set(&mut self, fluent: Fluent, value: bool) {
        if value {
            self.0 |= 1 << fluent.0;
        } else {
            self.0 &= !(1 << fluent.0);
        }
    }

    pub fn with(mut self, fluent: Fluent, value: bool) -> Self {
        self.set(fluent, value);
        self
    }

    pub fn to_bools(self, n: usize) -> Vec<bool> {
        (0..n).map(|i| self.get(Fluent(i))).collect()
    }

    /// Pairs each fluent name with its value, in declaration order.
    pub fn named<'a>(self, names: &'a [String]) -> impl Iterator<Item = (&'a str, bool)> + 'a {
        names
            .iter()
            .enumerate()
            .map(move |(i, name)| (name.as_str(), self.get(Fluent(i))))
    }

    /// Renders the valuation as `{InR1, !Light1, ...}`.
    pub fn display(self, names: &[String]) -> ValuationDisplay<'_> {
        ValuationDisplay {
            valuation: self,
            names,
        }
    }

    /// Every valuation over `n` fluents, in counting order.
    ///
    /// Panics if `n` exceeds [`MAX_ENUMERABLE_FLUENTS`].
    pub fn all(n: usize) -> impl Iterator<Item = FluentValuation> {
        assert!(
            n <= MAX_ENUMERABLE_FLUENTS,
            "refusing to enumerate 2^{n} valuations"
        );
        (0..1u64 << n).map(FluentValuation)
    }
}

pub struct ValuationDisplay<'a> {
    valuation: FluentValuation,
    names: &'a [String],
}

impl fmt::Display for ValuationDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (name, value)) in self.valuation.named(self.names).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            if !value {
                f.write_str("!")?;
            }
            f.write_str(name)?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_and_get() {
        let v = FluentValuation::default()
            .with(Fluent(0), true)
            .with(Fluent(2), true);
        assert_eq!(v.to_bools(3), vec![true, false, true]);
        assert_eq!(v.with(Fluent(0), false).bits(), 0b100);
    }

    #[test]
    fn enumeration_covers_every_assignment() {
        let all: Vec<_> = FluentValuation::all(3).collect();
        assert_eq!(all.len(), 8);
        let distinct: std::collections::HashSet<_> = all.iter().copied().collect();
        assert_eq!(distinct.len(), 8);
    }

    #[test]
    fn display_marks_false_fluents() {
        let names = vec!["InR1".to_string(), "Light1".to_string()];
        let v = FluentValuation::from_bools(&[true, false]);
        assert_eq!(v.display(&names).to_string(), "{InR1, !Light1}");
    }
}
