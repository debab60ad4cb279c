//! Progression of fluent valuations, sensing outcomes, and formula evaluation
//! against an epistemic trace.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::dsl::{PhysicalAction, SensingAction};
use crate::engine::{EpistemicTrace, Generation};
use crate::formula::Formula;
use crate::valuation::FluentValuation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SitcalcError {
    #[error("precondition of `{0}` does not hold")]
    PreconditionViolated(String),
    #[error("no guard of `{0}` holds")]
    NoGuardFires(String),
    #[error("modal operator where a domain formula is required")]
    ModalFormula,
}

/// Identifier of a situation node, unique within one trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct NodeId(pub u64);

/// One situation in the forest rooted at the initial situations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SituationNode {
    pub id: NodeId,
    /// Number of actions performed since the initial situation.
    pub generation: usize,
    pub parent: Option<NodeId>,
    pub generating_action: Option<Arc<str>>,
    pub valuation: FluentValuation,
    pub pl: u64,
    /// Position of the initial ancestor among the declared initial situations.
    pub lineage: usize,
    pub initial_label: Arc<str>,
}

/// One executed sensing action as seen from both sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Observation {
    /// Sensed value at the actual situation.
    pub true_bit: bool,
    /// Value reported to the agent.
    pub observed_bit: bool,
    pub accurate: bool,
}

impl Observation {
    pub fn new(true_bit: bool, observed_bit: bool) -> Self {
        Self {
            true_bit,
            observed_bit,
            accurate: true_bit == observed_bit,
        }
    }
}

/// Applies the effect assignments of `action` without checking its precondition.
/// Every right-hand side is read against `v`.
pub fn apply_effects(v: FluentValuation, action: &PhysicalAction) -> FluentValuation {
    let mut next = v;
    for (fluent, rhs) in &action.effects {
        next.set(
            *fluent,
            eval_static(rhs, v).expect("validated effect formula"),
        );
    }
    next
}

pub fn precondition_holds(
    v: FluentValuation,
    action: &PhysicalAction,
) -> Result<bool, SitcalcError> {
    eval_static(&action.precondition, v)
}

/// Successor valuation after a physical action; fails if the precondition is false.
pub fn progress(
    v: FluentValuation,
    action: &PhysicalAction,
) -> Result<FluentValuation, SitcalcError> {
    if !precondition_holds(v, action)? {
        return Err(SitcalcError::PreconditionViolated(action.name.clone()));
    }
    Ok(apply_effects(v, action))
}

/// Sensing outcome: the sensed formula of the first guard that holds.
pub fn sf(action: &SensingAction, v: FluentValuation) -> Result<bool, SitcalcError> {
    for guard in &action.guards {
        if eval_static(&guard.condition, v)? {
            return eval_static(&guard.sensed, v);
        }
    }
    Err(SitcalcError::NoGuardFires(action.name.clone()))
}

pub fn eval_static(f: &Formula, v: FluentValuation) -> Result<bool, SitcalcError> {
    f.eval(v).ok_or(SitcalcError::ModalFormula)
}

/// Evaluates a possibly modal formula at `node`.
///
/// `Bel(ψ)` holds iff `ψ` holds at every pl = 0 node of the node's generation.
/// `Prev(ψ)` holds iff the node has a parent and `ψ` holds there; at
/// generation 0 it is false.
///
/// Panics if `node` does not belong to `trace`.
pub fn eval_modal(f: &Formula, node: &SituationNode, trace: &EpistemicTrace) -> bool {
    let generation = trace
        .generation(node.generation)
        .expect("node belongs to trace");
    eval_at(f, generation, node.lineage)
}

pub(crate) fn eval_at(f: &Formula, generation: &Generation, lineage: usize) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(fluent) => generation.nodes()[lineage].valuation.get(*fluent),
        Formula::Not(g) => !eval_at(g, generation, lineage),
        Formula::And(a, b) => eval_at(a, generation, lineage) && eval_at(b, generation, lineage),
        Formula::Or(a, b) => eval_at(a, generation, lineage) || eval_at(b, generation, lineage),
        Formula::Implies(a, b) => {
            !eval_at(a, generation, lineage) || eval_at(b, generation, lineage)
        }
        Formula::Iff(a, b) => eval_at(a, generation, lineage) == eval_at(b, generation, lineage),
        Formula::Bel(g) => generation
            .nodes()
            .iter()
            .filter(|n| n.pl == 0)
            .all(|n| eval_at(g, generation, n.lineage)),
        Formula::Prev(g) => match generation.previous() {
            Some(prev) => eval_at(g, prev, lineage),
            None => false,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_domain, DomainSpec};

    fn rooms() -> DomainSpec {
        parse_domain(include_str!("../data/rooms.dom")).unwrap()
    }

    fn v(bits: [bool; 3]) -> FluentValuation {
        FluentValuation::from_bools(&bits)
    }

    #[test]
    fn leave_flips_room_only() {
        let spec = rooms();
        let leave = spec.physical_action("Leave").unwrap();
        let start = v([true, false, false]);
        let once = progress(start, leave).unwrap();
        assert_eq!(once, v([false, false, false]));
        assert_eq!(progress(once, leave).unwrap(), start);
    }

    #[test]
    fn empty_effects_are_frame() {
        let spec =
            parse_domain("fluent A, B; action Wait { } actual { A=true; B=false; }").unwrap();
        let wait = spec.physical_action("Wait").unwrap();
        for w in FluentValuation::all(2) {
            assert_eq!(progress(w, wait).unwrap(), w);
        }
    }

    #[test]
    fn effects_read_the_pre_state() {
        let spec = parse_domain(
            "fluent A, B; action Swap { A := B; B := A; } actual { A=true; B=false; }",
        )
        .unwrap();
        let swap = spec.physical_action("Swap").unwrap();
        let out = progress(FluentValuation::from_bools(&[true, false]), swap).unwrap();
        assert_eq!(out, FluentValuation::from_bools(&[false, true]));
    }

    #[test]
    fn precondition_is_enforced() {
        let spec =
            parse_domain("fluent A; action Go { poss A; A := false; } actual { A=true; }").unwrap();
        let go = spec.physical_action("Go").unwrap();
        assert_eq!(
            progress(FluentValuation::default(), go),
            Err(SitcalcError::PreconditionViolated("Go".into()))
        );
        assert_eq!(
            progress(FluentValuation::from_bools(&[true]), go),
            Ok(FluentValuation::default())
        );
    }

    #[test]
    fn sensing_outcomes() {
        let spec = rooms();
        let sl = spec.sensing_action("SL").unwrap();
        let sr = spec.sensing_action("SR").unwrap();
        assert_eq!(sf(sl, v([false, true, true])), Ok(true));
        assert_eq!(sf(sl, v([true, false, false])), Ok(false));
        assert_eq!(sf(sr, v([true, false, true])), Ok(true));
        assert_eq!(sf(sr, v([false, true, true])), Ok(false));
    }

    #[test]
    fn uncovered_guard_is_an_error() {
        let spec =
            parse_domain("fluent A; sense S { guard A senses A; } actual { A=true; }").unwrap();
        let s = spec.sensing_action("S").unwrap();
        assert_eq!(
            sf(s, FluentValuation::default()),
            Err(SitcalcError::NoGuardFires("S".into()))
        );
    }

    #[test]
    fn static_evaluation() {
        let spec = rooms();
        let s2 = spec.initial_situations[1].valuation;
        assert_eq!(
            eval_static(&spec.formula("InR1 & !Light1").unwrap(), s2),
            Ok(true)
        );
        let taut = spec.formula("Light2 | !Light2").unwrap();
        assert!(FluentValuation::all(3).all(|w| eval_static(&taut, w) == Ok(true)));
        assert_eq!(
            eval_static(&spec.formula("Bel(InR1)").unwrap(), s2),
            Err(SitcalcError::ModalFormula)
        );
    }
}
