//! Propositional formulas over fluents, extended with the `Bel` and `Prev`
//! modalities used in queries.

use std::fmt;

use crate::valuation::{Fluent, FluentValuation};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Fluent),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    /// Holds at a situation when the argument holds at every most plausible
    /// situation accessible from it.
    Bel(Box<Formula>),
    /// Holds when the argument held at the immediately preceding situation.
    Prev(Box<Formula>),
}

impl Formula {
    pub fn atom(index: usize) -> Self {
        Formula::Atom(Fluent(index))
    }

    pub fn literal(index: usize, positive: bool) -> Self {
        if positive {
            Formula::atom(index)
        } else {
            Formula::atom(index).not()
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, rhs: Formula) -> Self {
        Formula::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Formula) -> Self {
        Formula::Or(Box::new(self), Box::new(rhs))
    }

    pub fn implies(self, rhs: Formula) -> Self {
        Formula::Implies(Box::new(self), Box::new(rhs))
    }

    pub fn iff(self, rhs: Formula) -> Self {
        Formula::Iff(Box::new(self), Box::new(rhs))
    }

    pub fn bel(self) -> Self {
        Formula::Bel(Box::new(self))
    }

    pub fn prev(self) -> Self {
        Formula::Prev(Box::new(self))
    }

    /// Conjunction of all items, `True` when empty.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Self {
        items
            .into_iter()
            .reduce(|acc, f| acc.and(f))
            .unwrap_or(Formula::True)
    }

    /// Complete description of a valuation as a conjunction of literals.
    pub fn state_description(valuation: FluentValuation, n_fluents: usize) -> Self {
        Formula::conjunction((0..n_fluents).map(|i| Formula::literal(i, valuation.get(Fluent(i)))))
    }

    /// True iff the formula mentions no `Bel` or `Prev` node.
    pub fn is_domain_dependent(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => true,
            Formula::Not(f) => f.is_domain_dependent(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.is_domain_dependent() && b.is_domain_dependent(),
            Formula::Bel(_) | Formula::Prev(_) => false,
        }
    }

    /// Nesting depth of modal operators.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 0,
            Formula::Not(f) => f.modal_depth(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.modal_depth().max(b.modal_depth()),
            Formula::Bel(f) | Formula::Prev(f) => 1 + f.modal_depth(),
        }
    }

    /// Largest fluent index mentioned, if any.
    pub fn max_fluent(&self) -> Option<usize> {
        match self {
            Formula::True | Formula::False => None,
            Formula::Atom(Fluent(i)) => Some(*i),
            Formula::Not(f) | Formula::Bel(f) | Formula::Prev(f) => f.max_fluent(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.max_fluent().max(b.max_fluent()),
        }
    }

    /// Classical truth value of a domain-dependent formula; `None` when a
    /// modal node is reached.
    pub fn eval(&self, v: FluentValuation) -> Option<bool> {
        Some(match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(f) => v.get(*f),
            Formula::Not(f) => !f.eval(v)?,
            Formula::And(a, b) => a.eval(v)? && b.eval(v)?,
            Formula::Or(a, b) => a.eval(v)? || b.eval(v)?,
            Formula::Implies(a, b) => !a.eval(v)? || b.eval(v)?,
            Formula::Iff(a, b) => a.eval(v)? == b.eval(v)?,
            Formula::Bel(_) | Formula::Prev(_) => return None,
        })
    }

    /// Renders the formula in the concrete syntax accepted by the parser.
    pub fn display<'a>(&'a self, names: &'a [String]) -> FormulaDisplay<'a> {
        FormulaDisplay {
            formula: self,
            names,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            _ => 5,
        }
    }
}

pub struct FormulaDisplay<'a> {
    formula: &'a Formula,
    names: &'a [String],
}

impl FormulaDisplay<'_> {
    fn write(&self, f: &mut fmt::Formatter<'_>, node: &Formula) -> fmt::Result {
        let binary = |f: &mut fmt::Formatter<'_>, op: &str, a: &Formula, b: &Formula| {
            let p = node.precedence();
            // `->` associates to the right, every other binary operator to the left.
            let right_assoc = matches!(node, Formula::Implies(..));
            let lhs_parens = a.precedence() < p || (right_assoc && a.precedence() == p);
            let rhs_parens = b.precedence() < p || (!right_assoc && b.precedence() == p);
            self.write_grouped(f, a, lhs_parens)?;
            write!(f, " {op} ")?;
            self.write_grouped(f, b, rhs_parens)
        };
        match node {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(Fluent(i)) => match self.names.get(*i) {
                Some(name) => f.write_str(name),
                None => write!(f, "#{i}"),
            },
            Formula::Not(inner) => {
                f.write_str("!")?;
                self.write_grouped(f, inner, inner.precedence() < 5)
            }
            Formula::And(a, b) => binary(f, "&", a, b),
            Formula::Or(a, b) => binary(f, "|", a, b),
            Formula::Implies(a, b) => binary(f, "->", a, b),
            Formula::Iff(a, b) => binary(f, "<->", a, b),
            Formula::Bel(inner) => {
                f.write_str("Bel(")?;
                self.write(f, inner)?;
                f.write_str(")")
            }
            Formula::Prev(inner) => {
                f.write_str("Prev(")?;
                self.write(f, inner)?;
                f.write_str(")")
            }
        }
    }

    fn write_grouped(
        &self,
        f: &mut fmt::Formatter<'_>,
        node: &Formula,
        parens: bool,
    ) -> fmt::Result {
        if parens {
            f.write_str("(")?;
            self.write(f, node)?;
            f.write_str(")")
        } else {
            self.write(f, node)
        }
    }
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.formula)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        ["InR1", "Light1", "Light2"].map(String::from).to_vec()
    }

    #[test]
    fn display_minimizes_parentheses() {
        let f = Formula::atom(0).and(Formula::atom(1).not());
        assert_eq!(f.display(&names()).to_string(), "InR1 & !Light1");
        let g = Formula::atom(0).or(Formula::atom(1)).and(Formula::atom(2));
        assert_eq!(g.display(&names()).to_string(), "(InR1 | Light1) & Light2");
        let h = Formula::atom(0)
            .implies(Formula::atom(1))
            .implies(Formula::atom(2));
        assert_eq!(
            h.display(&names()).to_string(),
            "(InR1 -> Light1) -> Light2"
        );
        let k = Formula::atom(0).and(Formula::atom(1).bel().not()).prev();
        assert_eq!(k.display(&names()).to_string(), "Prev(InR1 & !Bel(Light1))");
    }

    #[test]
    fn static_eval() {
        let v = FluentValuation::from_bools(&[true, false, false]);
        assert_eq!(Formula::True.eval(v), Some(true));
        assert_eq!(
            Formula::atom(0).and(Formula::atom(1).not()).eval(v),
            Some(true)
        );
        assert_eq!(Formula::atom(1).iff(Formula::atom(2)).eval(v), Some(true));
        assert_eq!(
            Formula::atom(0).implies(Formula::atom(1)).eval(v),
            Some(false)
        );
        assert_eq!(Formula::atom(0).bel().eval(v), None);
    }

    #[test]
    fn modal_classification() {
        assert!(Formula::atom(0).or(Formula::False).is_domain_dependent());
        assert!(!Formula::atom(0).bel().not().is_domain_dependent());
        assert_eq!(Formula::atom(0).bel().prev().bel().modal_depth(), 3);
    }

    #[test]
    fn state_description_holds_only_at_its_valuation() {
        let v = FluentValuation::from_bools(&[false, true, true]);
        let d = Formula::state_description(v, 3);
        for w in FluentValuation::all(3) {
            assert_eq!(d.eval(w), Some(w == v));
        }
    }
}
