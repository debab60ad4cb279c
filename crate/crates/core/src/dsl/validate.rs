//! Static checks over a parsed domain. Problems are returned as data.

use std::fmt;

use serde::Serialize;

use super::DomainSpec;
use crate::formula::Formula;
use crate::valuation::{FluentValuation, MAX_ENUMERABLE_FLUENTS};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// No initial situation has plausibility 0.
    NoZeroPlausibility,
    /// Some valuation satisfies none of the action's guards.
    GuardsNotExhaustive {
        action: String,
        #[serde(skip)]
        witness: FluentValuation,
        witness_text: String,
    },
    /// A `Bel`/`Prev` node inside an effect, precondition or guard.
    ModalInDomainFormula {
        location: String,
    },
    UnknownSeqAction {
        name: String,
    },
    /// Too many fluents to enumerate every valuation.
    TooManyFluents {
        count: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// Two guards hold together and disagree on the sensed value; the
    /// earlier guard wins.
    OverlappingGuards {
        action: String,
        first: usize,
        second: usize,
        witness_text: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoZeroPlausibility => {
                f.write_str("no initial situation with pl = 0")
            }
            Violation::GuardsNotExhaustive {
                action,
                witness_text,
                ..
            } => write!(f, "guards not exhaustive for `{action}`: none holds at {witness_text}"),
            Violation::ModalInDomainFormula { location } => {
                write!(f, "modal operator in {location}")
            }
            Violation::UnknownSeqAction { name } => write!(f, "seq mentions unknown action `{name}`"),
            Violation::TooManyFluents { count } => write!(
                f,
                "{count} fluents declared; at most {MAX_ENUMERABLE_FLUENTS} can be checked exhaustively"
            ),
        }
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::OverlappingGuards {
                action,
                first,
                second,
                witness_text,
            } => write!(
                f,
                "guards {first} and {second} of `{action}` both hold at {witness_text} and sense different values; guard {first} wins"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_domain(spec: &DomainSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    let names = &spec.fluents;

    if !spec.initial_situations.iter().any(|s| s.pl == 0) {
        report.violations.push(Violation::NoZeroPlausibility);
    }

    let mut modal = |location: String, f: &Formula| {
        if !f.is_domain_dependent() {
            report
                .violations
                .push(Violation::ModalInDomainFormula { location });
        }
    };
    for action in &spec.physical_actions {
        modal(
            format!("precondition of `{}`", action.name),
            &action.precondition,
        );
        for (fluent, rhs) in &action.effects {
            modal(
                format!("effect of `{}` on `{}`", action.name, names[fluent.0]),
                rhs,
            );
        }
    }
    for action in &spec.sensing_actions {
        for (i, guard) in action.guards.iter().enumerate() {
            modal(
                format!("guard {} of `{}`", i + 1, action.name),
                &guard.condition,
            );
            modal(
                format!("sensed formula {} of `{}`", i + 1, action.name),
                &guard.sensed,
            );
        }
    }

    if let Some(seq) = &spec.seq {
        for name in seq {
            if spec.action(name).is_none() {
                report
                    .violations
                    .push(Violation::UnknownSeqAction { name: name.clone() });
            }
        }
    }

    if names.len() > MAX_ENUMERABLE_FLUENTS {
        report
            .violations
            .push(Violation::TooManyFluents { count: names.len() });
        return report;
    }

    for action in &spec.sensing_actions {
        // Guards with modal content were already reported and cannot be evaluated.
        if action
            .guards
            .iter()
            .any(|g| !g.condition.is_domain_dependent() || !g.sensed.is_domain_dependent())
        {
            continue;
        }
        let mut uncovered = None;
        let mut overlap = None;
        for v in FluentValuation::all(names.len()) {
            let firing: Vec<usize> = action
                .guards
                .iter()
                .enumerate()
                .filter(|(_, g)| g.condition.eval(v) == Some(true))
                .map(|(i, _)| i)
                .collect();
            if firing.is_empty() {
                uncovered.get_or_insert(v);
                continue;
            }
            if overlap.is_none() {
                let first = firing[0];
                let sensed = action.guards[first].sensed.eval(v);
                if let Some(&second) = firing[1..]
                    .iter()
                    .find(|&&j| action.guards[j].sensed.eval(v) != sensed)
                {
                    overlap = Some((first, second, v));
                }
            }
        }
        if let Some(witness) = uncovered {
            report.violations.push(Violation::GuardsNotExhaustive {
                action: action.name.clone(),
                witness,
                witness_text: witness.display(names).to_string(),
            });
        }
        if let Some((first, second, v)) = overlap {
            report.warnings.push(Warning::OverlappingGuards {
                action: action.name.clone(),
                first: first + 1,
                second: second + 1,
                witness_text: v.display(names).to_string(),
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::super::parse_domain;
    use super::*;
    use crate::valuation::Fluent;

    const ROOMS: &str = include_str!("../../data/rooms.dom");

    #[test]
    fn rooms_domain_is_clean() {
        let report = validate_domain(&parse_domain(ROOMS).unwrap());
        assert!(report.is_valid(), "{report:?}");
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn missing_zero_plausibility() {
        let text = ROOMS.replace("pl=0", "pl=1");
        let report = validate_domain(&parse_domain(&text).unwrap());
        assert_eq!(report.violations, vec![Violation::NoZeroPlausibility]);
        assert_eq!(
            report.violations[0].to_string(),
            "no initial situation with pl = 0"
        );
    }

    #[test]
    fn uncovered_guard_reports_witness() {
        let text = ROOMS.replace(" guard !InR1 senses Light2;", "");
        let report = validate_domain(&parse_domain(&text).unwrap());
        assert_eq!(report.violations.len(), 1);
        let Violation::GuardsNotExhaustive {
            action, witness, ..
        } = &report.violations[0]
        else {
            panic!("unexpected {:?}", report.violations);
        };
        assert_eq!(action, "SL");
        assert!(!witness.get(Fluent(0)));
    }

    #[test]
    fn modal_effect_and_unknown_seq() {
        let text = ROOMS
            .replace("InR1 := !InR1;", "InR1 := Bel(!InR1);")
            .replace("seq SR,", "seq Jump, SR,");
        let report = validate_domain(&parse_domain(&text).unwrap());
        assert!(report
            .violations
            .contains(&Violation::ModalInDomainFormula {
                location: "effect of `Leave` on `InR1`".into()
            }));
        assert!(report.violations.contains(&Violation::UnknownSeqAction {
            name: "Jump".into()
        }));
    }

    #[test]
    fn overlapping_guards_warn_but_validate() {
        let text = ROOMS.replace("guard !InR1 senses Light2;", "guard true senses Light2;");
        let report = validate_domain(&parse_domain(&text).unwrap());
        assert!(report.is_valid());
        assert_eq!(report.warnings.len(), 1);
    }
}
