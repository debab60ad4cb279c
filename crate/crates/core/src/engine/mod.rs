//! The ranked belief engine and the discard-based baseline it extends.
//!
//! An [`EpistemicTrace`] is the agent's whole epistemic history. Generation
//! `g` holds one node per declared initial situation: the situation reached
//! from it by the first `g` actions. All nodes of one generation are mutually
//! accessible, so accessibility is never stored as pairs.
//!
//! Plausibility update on a sensing action with observed value `o`, where `m`
//! is the largest initial plausibility and `t` is the smallest plausibility
//! among nodes whose sensed value equals `o`:
//!
//! ```text
//! pl' = pl - t        if the node matches o
//! pl' = pl + m + 1    otherwise   (pl + m in PenaltyMode::Compat)
//! ```
//!
//! followed by subtracting the generation minimum, which only matters when no
//! node matches. Physical actions keep plausibilities unchanged.
//!
//! Generations are linked through `Arc`, so every update returns a new trace
//! in O(|generation|) and shares history with its input.

mod baseline;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::{ActionRef, DomainSpec, PhysicalAction, SensingAction};
use crate::formula::Formula;
use crate::sitcalc::{self, NodeId, SitcalcError, SituationNode};

pub use baseline::{BaselineBelief, BaselineNode, BaselineState, BaselineStatus};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("no initial situation has plausibility 0")]
    NoZeroPlausibility,
    #[error("precondition of `{action}` fails at situation {node:?}")]
    PreconditionViolated { action: String, node: NodeId },
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("`{0}` is a sensing action and needs an observed value")]
    MissingObservation(String),
    #[error("no generation {0}")]
    NoSuchGeneration(usize),
    #[error("plausibility overflow")]
    PlausibilityOverflow,
    #[error("`Prev` is not available in the baseline engine")]
    PrevInBaseline,
    #[error(transparent)]
    Sitcalc(#[from] SitcalcError),
}

/// How far a mismatching situation is pushed back on a sensing action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyMode {
    /// `pl + m + 1`.
    #[default]
    Axiom,
    /// `pl + m`; reproduces the published two-room walkthrough numbers.
    Compat,
}

impl PenaltyMode {
    pub fn penalty(self, m: u64) -> u64 {
        match self {
            PenaltyMode::Axiom => m + 1,
            PenaltyMode::Compat => m,
        }
    }
}

impl fmt::Display for PenaltyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PenaltyMode::Axiom => "axiom",
            PenaltyMode::Compat => "compat",
        })
    }
}

/// What a physical action does at believed situations where its precondition is false.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PreconditionPolicy {
    /// Apply the effects anyway.
    #[default]
    Lenient,
    /// Refuse the action.
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EngineOptions {
    pub penalty: PenaltyMode,
    pub preconditions: PreconditionPolicy,
    /// Mutation hook: leave plausibilities unnormalized after sensing.
    #[doc(hidden)]
    pub skip_renormalization: bool,
}

impl EngineOptions {
    pub fn with_penalty(penalty: PenaltyMode) -> Self {
        Self {
            penalty,
            ..Self::default()
        }
    }
}

/// All situations reached after the same number of actions.
#[derive(Debug)]
pub struct Generation {
    index: usize,
    action: Option<Arc<str>>,
    nodes: Vec<SituationNode>,
    previous: Option<Arc<Generation>>,
}

impl Generation {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn action(&self) -> Option<&str> {
        self.action.as_deref()
    }

    /// Nodes ordered by lineage.
    pub fn nodes(&self) -> &[SituationNode] {
        &self.nodes
    }

    pub fn previous(&self) -> Option<&Generation> {
        self.previous.as_deref()
    }

    pub fn most_plausible(&self) -> impl Iterator<Item = &SituationNode> {
        self.nodes.iter().filter(|n| n.pl == 0)
    }

    pub fn pls(&self) -> Vec<u64> {
        self.nodes.iter().map(|n| n.pl).collect()
    }
}

impl Drop for Generation {
    // Long histories would otherwise be freed recursively.
    fn drop(&mut self) {
        let mut next = self.previous.take();
        while let Some(gen) = next {
            match Arc::try_unwrap(gen) {
                Ok(mut owned) => next = owned.previous.take(),
                Err(_) => break,
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct EpistemicTrace {
    head: Arc<Generation>,
    m: u64,
    options: EngineOptions,
}

impl EpistemicTrace {
    /// Generation 0 holds the declared initial situations with their declared plausibilities.
    pub fn new(spec: &DomainSpec, options: EngineOptions) -> Result<Self, EngineError> {
        if !spec.initial_situations.iter().any(|s| s.pl == 0) {
            return Err(EngineError::NoZeroPlausibility);
        }
        let nodes = spec
            .initial_situations
            .iter()
            .enumerate()
            .map(|(i, s)| SituationNode {
                id: NodeId(i as u64),
                generation: 0,
                parent: None,
                generating_action: None,
                valuation: s.valuation,
                pl: s.pl,
                lineage: i,
                initial_label: Arc::from(s.label.as_str()),
            })
            .collect();
        Ok(Self {
            head: Arc::new(Generation {
                index: 0,
                action: None,
                nodes,
                previous: None,
            }),
            m: spec.max_initial_pl().unwrap_or(0),
            options,
        })
    }

    /// Largest initial plausibility, fixed at construction.
    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn options(&self) -> EngineOptions {
        self.options
    }

    pub fn width(&self) -> usize {
        self.head.nodes.len()
    }

    /// Index of the newest generation, i.e. the number of actions performed.
    pub fn current_index(&self) -> usize {
        self.head.index
    }

    pub fn current(&self) -> &Generation {
        &self.head
    }

    pub fn generation(&self, g: usize) -> Option<&Generation> {
        let mut gen: &Generation = &self.head;
        if g > gen.index {
            return None;
        }
        while gen.index > g {
            gen = gen.previous.as_deref()?;
        }
        Some(gen)
    }

    /// Generations from 0 to the current one.
    pub fn generations(&self) -> Vec<&Generation> {
        let mut out = Vec::with_capacity(self.head.index + 1);
        let mut gen = Some(&*self.head);
        while let Some(g) = gen {
            out.push(g);
            gen = g.previous();
        }
        out.reverse();
        out
    }

    fn child(
        &self,
        action: &str,
        pls_and_vals: impl Iterator<Item = (u64, crate::FluentValuation)>,
    ) -> Self {
        let index = self.head.index + 1;
        let width = self.width() as u64;
        let action: Arc<str> = Arc::from(action);
        let nodes = self
            .head
            .nodes
            .iter()
            .zip(pls_and_vals)
            .map(|(parent, (pl, valuation))| SituationNode {
                id: NodeId(index as u64 * width + parent.lineage as u64),
                generation: index,
                parent: Some(parent.id),
                generating_action: Some(action.clone()),
                valuation,
                pl,
                lineage: parent.lineage,
                initial_label: parent.initial_label.clone(),
            })
            .collect();
        Self {
            head: Arc::new(Generation {
                index,
                action: Some(action),
                nodes,
                previous: Some(self.head.clone()),
            }),
            m: self.m,
            options: self.options,
        }
    }

    /// Every current node gets one successor with progressed valuation and
    /// unchanged plausibility.
    pub fn apply_physical(&self, action: &PhysicalAction) -> Result<Self, EngineError> {
        let mut next = Vec::with_capacity(self.width());
        for node in &self.head.nodes {
            if self.options.preconditions == PreconditionPolicy::Strict
                && !sitcalc::precondition_holds(node.valuation, action)?
            {
                return Err(EngineError::PreconditionViolated {
                    action: action.name.clone(),
                    node: node.id,
                });
            }
            next.push((node.pl, sitcalc::apply_effects(node.valuation, action)));
        }
        Ok(self.child(&action.name, next.into_iter()))
    }

    /// Re-ranks every current node against the observed sensing value. No
    /// node is ever dropped.
    pub fn apply_sensing(
        &self,
        action: &SensingAction,
        observed: bool,
    ) -> Result<Self, EngineError> {
        let matches = self
            .head
            .nodes
            .iter()
            .map(|n| Ok(sitcalc::sf(action, n.valuation)? == observed))
            .collect::<Result<Vec<bool>, SitcalcError>>()?;
        let t = self
            .head
            .nodes
            .iter()
            .zip(&matches)
            .filter(|(_, m)| **m)
            .map(|(n, _)| n.pl)
            .min();
        let penalty = self.options.penalty.penalty(self.m);
        let mut pls = Vec::with_capacity(self.width());
        for (node, matched) in self.head.nodes.iter().zip(&matches) {
            let pl = if *matched {
                // t is the minimum over matching nodes, so this cannot underflow.
                node.pl - t.unwrap_or(0)
            } else {
                node.pl
                    .checked_add(penalty)
                    .ok_or(EngineError::PlausibilityOverflow)?
            };
            pls.push(pl);
        }
        if !self.options.skip_renormalization {
            if let Some(min) = pls.iter().copied().min() {
                pls.iter_mut().for_each(|pl| *pl -= min);
            }
        }
        let vals = self.head.nodes.iter().map(|n| n.valuation);
        Ok(self.child(&action.name, pls.into_iter().zip(vals)))
    }

    /// Applies a declared action by name; `observed` is required for sensing actions.
    pub fn apply(
        &self,
        spec: &DomainSpec,
        action: &str,
        observed: Option<bool>,
    ) -> Result<Self, EngineError> {
        match spec.action(action) {
            Some(ActionRef::Physical(a)) => self.apply_physical(a),
            Some(ActionRef::Sensing(a)) => {
                let bit = observed.ok_or_else(|| EngineError::MissingObservation(action.into()))?;
                self.apply_sensing(a, bit)
            }
            None => Err(EngineError::UnknownAction(action.into())),
        }
    }

    /// Whether `f` holds at every pl = 0 node of generation `g`.
    pub fn bel(&self, g: usize, f: &Formula) -> Result<bool, EngineError> {
        let gen = self.generation(g).ok_or(EngineError::NoSuchGeneration(g))?;
        Ok(gen
            .most_plausible()
            .all(|n| sitcalc::eval_at(f, gen, n.lineage)))
    }

    /// [`Self::bel`] at the current generation.
    pub fn believes(&self, f: &Formula) -> bool {
        self.head
            .most_plausible()
            .all(|n| sitcalc::eval_at(f, &self.head, n.lineage))
    }

    pub fn most_plausible(&self, g: usize) -> Result<Vec<&SituationNode>, EngineError> {
        let gen = self.generation(g).ok_or(EngineError::NoSuchGeneration(g))?;
        Ok(gen.most_plausible().collect())
    }
}
