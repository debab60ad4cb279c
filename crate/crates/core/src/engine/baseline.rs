//! Discard-based belief change with fixed plausibilities.
//!
//! Sensing keeps only the situations whose sensed value agrees with the
//! observation; plausibilities never change after the initial assignment.
//! Beliefs are read off the surviving situations of minimal plausibility.
//! Once every situation has been discarded the state is inconsistent and
//! stays that way.

use std::sync::Arc;

use serde::Serialize;

use super::EngineError;
use crate::dsl::{ActionRef, DomainSpec, PhysicalAction, SensingAction};
use crate::formula::Formula;
use crate::sitcalc;
use crate::valuation::FluentValuation;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaselineNode {
    pub lineage: usize,
    pub label: Arc<str>,
    pub valuation: FluentValuation,
    /// Inherited unchanged from the initial ancestor.
    pub pl: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineStatus {
    Consistent,
    Inconsistent,
}

impl std::fmt::Display for BaselineStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BaselineStatus::Consistent => "consistent",
            BaselineStatus::Inconsistent => "inconsistent",
        })
    }
}

/// Answer to a baseline belief query. In the inconsistent state every
/// formula would be believed vacuously; that case is reported separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineBelief {
    Holds(bool),
    Inconsistent,
}

impl BaselineBelief {
    pub fn believed(self) -> Option<bool> {
        match self {
            BaselineBelief::Holds(b) => Some(b),
            BaselineBelief::Inconsistent => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaselineState {
    generation: usize,
    survivors: Vec<BaselineNode>,
}

impl BaselineState {
    pub fn new(spec: &DomainSpec) -> Self {
        Self {
            generation: 0,
            survivors: spec
                .initial_situations
                .iter()
                .enumerate()
                .map(|(i, s)| BaselineNode {
                    lineage: i,
                    label: Arc::from(s.label.as_str()),
                    valuation: s.valuation,
                    pl: s.pl,
                })
                .collect(),
        }
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn survivors(&self) -> &[BaselineNode] {
        &self.survivors
    }

    pub fn status(&self) -> BaselineStatus {
        if self.survivors.is_empty() {
            BaselineStatus::Inconsistent
        } else {
            BaselineStatus::Consistent
        }
    }

    pub fn apply_physical(&self, action: &PhysicalAction) -> Self {
        Self {
            generation: self.generation + 1,
            survivors: self
                .survivors
                .iter()
                .map(|n| BaselineNode {
                    valuation: sitcalc::apply_effects(n.valuation, action),
                    ..n.clone()
                })
                .collect(),
        }
    }

    pub fn apply_sensing(
        &self,
        action: &SensingAction,
        observed: bool,
    ) -> Result<Self, EngineError> {
        let mut survivors = Vec::with_capacity(self.survivors.len());
        for n in &self.survivors {
            if sitcalc::sf(action, n.valuation)? == observed {
                survivors.push(n.clone());
            }
        }
        Ok(Self {
            generation: self.generation + 1,
            survivors,
        })
    }

    pub fn apply(
        &self,
        spec: &DomainSpec,
        action: &str,
        observed: Option<bool>,
    ) -> Result<Self, EngineError> {
        match spec.action(action) {
            Some(ActionRef::Physical(a)) => Ok(self.apply_physical(a)),
            Some(ActionRef::Sensing(a)) => {
                let bit = observed.ok_or_else(|| EngineError::MissingObservation(action.into()))?;
                self.apply_sensing(a, bit)
            }
            None => Err(EngineError::UnknownAction(action.into())),
        }
    }

    /// Survivors of minimal plausibility.
    pub fn most_plausible(&self) -> Vec<&BaselineNode> {
        let Some(min) = self.survivors.iter().map(|n| n.pl).min() else {
            return Vec::new();
        };
        self.survivors.iter().filter(|n| n.pl == min).collect()
    }

    /// `Bel` nests over the same surviving set; `Prev` is rejected.
    pub fn bel(&self, f: &Formula) -> Result<BaselineBelief, EngineError> {
        if self.survivors.is_empty() {
            return Ok(BaselineBelief::Inconsistent);
        }
        let best = self.most_plausible();
        let mut all = true;
        for n in &best {
            all &= self.eval(f, n.valuation, &best)?;
        }
        Ok(BaselineBelief::Holds(all))
    }

    fn eval(
        &self,
        f: &Formula,
        v: FluentValuation,
        best: &[&BaselineNode],
    ) -> Result<bool, EngineError> {
        Ok(match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(x) => v.get(*x),
            Formula::Not(g) => !self.eval(g, v, best)?,
            Formula::And(a, b) => self.eval(a, v, best)? && self.eval(b, v, best)?,
            Formula::Or(a, b) => self.eval(a, v, best)? || self.eval(b, v, best)?,
            Formula::Implies(a, b) => !self.eval(a, v, best)? || self.eval(b, v, best)?,
            Formula::Iff(a, b) => self.eval(a, v, best)? == self.eval(b, v, best)?,
            Formula::Bel(g) => {
                let mut all = true;
                for n in best {
                    all &= self.eval(g, n.valuation, best)?;
                }
                all
            }
            Formula::Prev(_) => return Err(EngineError::PrevInBaseline),
        })
    }
}
