//! The textual domain-description language.
//!
//! A domain file declares Boolean fluents, physical actions with effect
//! assignments, guarded sensing actions with an accuracy, the agent's ranked
//! initial situations, the actual initial world, and optionally a
//! distinguishing action sequence:
//!
//! ```text
//! fluent InR1, Light1, Light2;
//! action Leave { InR1 := !InR1; }
//! sense SL accuracy=0.9 { guard InR1 senses Light1; guard !InR1 senses Light2; }
//! sense SR accuracy=0.9 { guard true senses InR1; }
//! init S1 { pl=0; InR1=false; Light1=true; Light2=true; }
//! init S2 { pl=1; InR1=true; Light1=false; Light2=false; }
//! actual   { InR1=true; Light1=false; Light2=false; }
//! seq SR, SL, Leave, SL;
//! ```

mod lexer;
mod parser;
mod serialize;
mod validate;

use thiserror::Error;

use crate::formula::Formula;
use crate::valuation::{Fluent, FluentValuation};

pub use parser::{parse_domain, parse_formula};
pub use serialize::serialize_domain;
pub use validate::{validate_domain, ValidationReport, Violation, Warning};

/// Words that cannot be used as fluent, action or situation names.
pub const KEYWORDS: &[&str] = &[
    "fluent", "action", "sense", "init", "actual", "seq", "guard", "senses", "poss", "accuracy",
    "pl", "true", "false", "Bel", "Prev",
];

#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    pub fluents: Vec<String>,
    pub physical_actions: Vec<PhysicalAction>,
    pub sensing_actions: Vec<SensingAction>,
    pub initial_situations: Vec<InitialSituation>,
    pub actual_initial: FluentValuation,
    pub seq: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalAction {
    pub name: String,
    /// Defaults to `Formula::True`.
    pub precondition: Formula,
    /// `fluent := formula` assignments, all read against the pre-state.
    pub effects: Vec<(Fluent, Formula)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Guard {
    pub condition: Formula,
    pub sensed: Formula,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensingAction {
    pub name: String,
    /// Tried in declaration order; the first guard that holds decides.
    pub guards: Vec<Guard>,
    /// Probability that one execution reports the true sensed value.
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialSituation {
    pub label: String,
    pub valuation: FluentValuation,
    pub pl: u64,
}

#[derive(Debug, Clone, Copy)]
pub enum ActionRef<'a> {
    Physical(&'a PhysicalAction),
    Sensing(&'a SensingAction),
}

impl ActionRef<'_> {
    pub fn name(&self) -> &str {
        match self {
            ActionRef::Physical(a) => &a.name,
            ActionRef::Sensing(a) => &a.name,
        }
    }

    pub fn is_sensing(&self) -> bool {
        matches!(self, ActionRef::Sensing(_))
    }
}

impl DomainSpec {
    pub fn fluent_index(&self, name: &str) -> Option<Fluent> {
        self.fluents.iter().position(|f| f == name).map(Fluent)
    }

    pub fn action(&self, name: &str) -> Option<ActionRef<'_>> {
        self.physical_actions
            .iter()
            .find(|a| a.name == name)
            .map(ActionRef::Physical)
            .or_else(|| {
                self.sensing_actions
                    .iter()
                    .find(|a| a.name == name)
                    .map(ActionRef::Sensing)
            })
    }

    pub fn sensing_action(&self, name: &str) -> Option<&SensingAction> {
        self.sensing_actions.iter().find(|a| a.name == name)
    }

    pub fn physical_action(&self, name: &str) -> Option<&PhysicalAction> {
        self.physical_actions.iter().find(|a| a.name == name)
    }

    /// All action names, physical first, in declaration order.
    pub fn action_names(&self) -> Vec<&str> {
        self.physical_actions
            .iter()
            .map(|a| a.name.as_str())
            .chain(self.sensing_actions.iter().map(|a| a.name.as_str()))
            .collect()
    }

    /// Largest declared initial plausibility.
    pub fn max_initial_pl(&self) -> Option<u64> {
        self.initial_situations.iter().map(|s| s.pl).max()
    }

    /// Parses a formula against this domain's fluents.
    pub fn formula(&self, text: &str) -> Result<Formula, ParseError> {
        parse_formula(text, &self.fluents)
    }

    /// Copy of the domain with sensing accuracies replaced. The key `all`
    /// applies to every sensing action; named keys take precedence.
    pub fn with_accuracies<'a>(
        &self,
        overrides: impl IntoIterator<Item = (&'a str, f64)>,
    ) -> Result<DomainSpec, SpecError> {
        let mut spec = self.clone();
        let overrides: Vec<(&str, f64)> = overrides.into_iter().collect();
        for (name, accuracy) in &overrides {
            if !(0.0..=1.0).contains(accuracy) {
                return Err(SpecError::AccuracyOutOfRange(*accuracy));
            }
            if *name != "all" && spec.sensing_action(name).is_none() {
                return Err(SpecError::UnknownSensingAction(name.to_string()));
            }
        }
        for action in &mut spec.sensing_actions {
            if let Some((_, acc)) = overrides.iter().find(|(n, _)| *n == "all") {
                action.accuracy = *acc;
            }
            if let Some((_, acc)) = overrides.iter().find(|(n, _)| *n == action.name) {
                action.accuracy = *acc;
            }
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("accuracy {0} is outside [0, 1]")]
    AccuracyOutOfRange(f64),
    #[error("no sensing action named `{0}`")]
    UnknownSensingAction(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub(crate) fn new(line: usize, column: usize, kind: ParseErrorKind) -> Self {
        Self { line, column, kind }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("expected {expected}, found {found}")]
    Expected { expected: String, found: String },
    #[error("expected declaration")]
    ExpectedDeclaration,
    #[error("duplicate {what} `{name}`")]
    Duplicate { what: &'static str, name: String },
    #[error("undeclared fluent `{0}`")]
    UndeclaredFluent(String),
    #[error("`{0}` is a reserved word")]
    ReservedWord(String),
    #[error("negative plausibility {0}")]
    NegativePlausibility(String),
    #[error("invalid number `{0}`")]
    InvalidNumber(String),
    #[error("accuracy {0} is outside [0, 1]")]
    AccuracyOutOfRange(String),
    #[error("initial situation `{label}` does not assign fluent `{fluent}`")]
    Unassigned { label: String, fluent: String },
    #[error("missing `pl` in initial situation `{0}`")]
    MissingPlausibility(String),
    #[error("missing `actual` declaration")]
    MissingActual,
    #[error("more than {0} fluents declared")]
    TooManyFluents(usize),
}
