//! The actual world, the noisy sensing channel, scripted runs, and
//! long-run detection experiments.

mod experiment;
mod script;
mod sensitivity;

use std::fmt;

use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dsl::{serialize_domain, ActionRef, DomainSpec, SensingAction, SpecError};
use crate::engine::{
    BaselineState, BaselineStatus, EngineError, EngineOptions, EpistemicTrace, PenaltyMode,
};
use crate::formula::Formula;
use crate::sitcalc::{self, NodeId, Observation, SitcalcError};
use crate::valuation::FluentValuation;

pub use experiment::{
    accuracy_sweep, convergence_experiment, derive_seed, theorem_bound, ExperimentConfig,
    ExperimentStats, SweepPoint,
};
pub use script::{parse_script, Directive, ScriptError, ScriptStep};
pub use sensitivity::{
    check_sensing_sensitive, sensing_trace, SensitivityReport, SensitivityScope,
};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("step {step}: `{action}` is a physical action and takes no sensing directive")]
    DirectiveOnPhysical { step: usize, action: String },
    #[error("step {step}: precondition of `{action}` is false in the actual world")]
    PreconditionInWorld { step: usize, action: String },
    #[error("probe `{0}` must not contain Bel or Prev")]
    ModalProbe(String),
    #[error("an experiment needs at least one cycle")]
    ZeroCycles,
    #[error("an experiment needs a non-empty action sequence")]
    EmptySequence,
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Sitcalc(#[from] SitcalcError),
    #[error(transparent)]
    Spec(#[from] SpecError),
}

/// The actual situation, advanced only by physical actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct World {
    pub actual_valuation: FluentValuation,
    pub step: usize,
}

impl World {
    pub fn new(spec: &DomainSpec) -> Self {
        Self {
            actual_valuation: spec.actual_initial,
            step: 0,
        }
    }

    pub fn apply_physical(&mut self, action: &crate::dsl::PhysicalAction) -> Result<(), SimError> {
        self.actual_valuation =
            sitcalc::progress(self.actual_valuation, action).map_err(|e| match e {
                SitcalcError::PreconditionViolated(action) => SimError::PreconditionInWorld {
                    step: self.step + 1,
                    action,
                },
                other => other.into(),
            })?;
        self.step += 1;
        Ok(())
    }

    pub fn record_sensing(&mut self) {
        self.step += 1;
    }
}

/// Executes a sensing action against the world. The agent only ever sees
/// `observed_bit`.
pub fn observe<R: Rng + ?Sized>(
    world: &World,
    action: &SensingAction,
    directive: Directive,
    rng: &mut R,
) -> Result<Observation, SimError> {
    let true_bit = sitcalc::sf(action, world.actual_valuation)?;
    let observed = match directive {
        Directive::Channel => {
            if rng.gen::<f64>() < action.accuracy {
                true_bit
            } else {
                !true_bit
            }
        }
        Directive::ForceAccurate => true_bit,
        Directive::ForceFlip => !true_bit,
        Directive::ForceObserved(bit) => bit,
    };
    Ok(Observation::new(true_bit, observed))
}

/// Whether every most plausible situation of generation `g` coincides with the actual world.
pub fn detection(trace: &EpistemicTrace, g: usize, actual: FluentValuation) -> bool {
    trace
        .generation(g)
        .map(|gen| gen.most_plausible().all(|n| n.valuation == actual))
        .unwrap_or(false)
}

/// Hex SHA-256 of the canonical serialization.
pub fn domain_hash(spec: &DomainSpec) -> String {
    hex::encode(Sha256::digest(serialize_domain(spec).as_bytes()))
}

/// Literals over every declared fluent, named by their source text.
pub fn literal_probes(spec: &DomainSpec) -> Vec<(String, Formula)> {
    let mut out = Vec::with_capacity(2 * spec.fluents.len());
    for (i, name) in spec.fluents.iter().enumerate() {
        out.push((name.clone(), Formula::atom(i)));
        out.push((format!("!{name}"), Formula::atom(i).not()));
    }
    out
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub engine: EngineOptions,
    /// Record the baseline engine alongside the ranked one.
    pub compare: bool,
    /// Named formulas whose belief status is recorded at every step.
    pub probes: Vec<(String, Formula)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Initial,
    Physical,
    Sensing,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepKind::Initial => "initial",
            StepKind::Physical => "physical",
            StepKind::Sensing => "sensing",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunMeta {
    pub seed: u64,
    pub domain_hash: String,
    pub mode: PenaltyMode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SituationRecord {
    pub id: NodeId,
    pub parent: Option<NodeId>,
    pub label: String,
    pub pl: u64,
    pub valuation: IndexMap<String, bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BaselineRecord {
    pub status: BaselineStatus,
    pub survivors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub i: usize,
    pub action: Option<String>,
    pub kind: StepKind,
    pub observed: Option<bool>,
    pub accurate: Option<bool>,
    pub world: IndexMap<String, bool>,
    pub situations: Vec<SituationRecord>,
    pub beliefs: IndexMap<String, bool>,
    pub detected: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline: Option<BaselineRecord>,
}

/// Step-by-step record of a scripted run. Identical inputs and seed give an
/// identical trace.
#[derive(Debug, Clone, Serialize)]
pub struct RunTrace {
    pub meta: RunMeta,
    pub steps: Vec<StepRecord>,
    #[serde(skip)]
    pub epistemic: EpistemicTrace,
    #[serde(skip)]
    pub baseline: BaselineState,
    #[serde(skip)]
    pub world: World,
    #[serde(skip)]
    pub observations: Vec<Option<Observation>>,
}

fn named_valuation(spec: &DomainSpec, v: FluentValuation) -> IndexMap<String, bool> {
    v.named(&spec.fluents)
        .map(|(n, b)| (n.to_string(), b))
        .collect()
}

fn record(
    spec: &DomainSpec,
    options: &RunOptions,
    i: usize,
    step: Option<(&str, StepKind, Option<Observation>)>,
    world: &World,
    trace: &EpistemicTrace,
    baseline: &BaselineState,
) -> StepRecord {
    let gen = trace.current();
    StepRecord {
        i,
        action: step.map(|(a, _, _)| a.to_string()),
        kind: step.map_or(StepKind::Initial, |(_, k, _)| k),
        observed: step.and_then(|(_, _, o)| o).map(|o| o.observed_bit),
        accurate: step.and_then(|(_, _, o)| o).map(|o| o.accurate),
        world: named_valuation(spec, world.actual_valuation),
        situations: gen
            .nodes()
            .iter()
            .map(|n| SituationRecord {
                id: n.id,
                parent: n.parent,
                label: n.initial_label.to_string(),
                pl: n.pl,
                valuation: named_valuation(spec, n.valuation),
            })
            .collect(),
        beliefs: options
            .probes
            .iter()
            .map(|(name, f)| (name.clone(), trace.believes(f)))
            .collect(),
        detected: detection(trace, gen.index(), world.actual_valuation),
        baseline: options.compare.then(|| BaselineRecord {
            status: baseline.status(),
            survivors: baseline
                .survivors()
                .iter()
                .map(|n| n.label.to_string())
                .collect(),
        }),
    }
}

/// Runs a script against the actual world, the ranked engine and the
/// baseline in lockstep.
pub fn run_script(
    spec: &DomainSpec,
    script: &[ScriptStep],
    seed: u64,
    options: &RunOptions,
) -> Result<RunTrace, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut world = World::new(spec);
    let mut trace = EpistemicTrace::new(spec, options.engine)?;
    let mut baseline = BaselineState::new(spec);
    let mut steps = vec![record(spec, options, 0, None, &world, &trace, &baseline)];
    let mut observations = Vec::with_capacity(script.len());

    for (i, step) in script.iter().enumerate() {
        let action = spec
            .action(&step.action)
            .ok_or_else(|| SimError::UnknownAction(step.action.clone()))?;
        let (kind, obs) = match action {
            ActionRef::Physical(a) => {
                if step.directive != Directive::Channel {
                    return Err(SimError::DirectiveOnPhysical {
                        step: i + 1,
                        action: a.name.clone(),
                    });
                }
                world.apply_physical(a)?;
                trace = trace.apply_physical(a)?;
                baseline = baseline.apply_physical(a);
                (StepKind::Physical, None)
            }
            ActionRef::Sensing(a) => {
                let obs = observe(&world, a, step.directive, &mut rng)?;
                world.record_sensing();
                trace = trace.apply_sensing(a, obs.observed_bit)?;
                baseline = baseline.apply_sensing(a, obs.observed_bit)?;
                (StepKind::Sensing, Some(obs))
            }
        };
        observations.push(obs);
        steps.push(record(
            spec,
            options,
            i + 1,
            Some((&step.action, kind, obs)),
            &world,
            &trace,
            &baseline,
        ));
    }

    Ok(RunTrace {
        meta: RunMeta {
            seed,
            domain_hash: domain_hash(spec),
            mode: options.engine.penalty,
        },
        steps,
        epistemic: trace,
        baseline,
        world,
        observations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_domain;

    fn rooms() -> DomainSpec {
        parse_domain(include_str!("../../data/rooms.dom")).unwrap()
    }

    #[test]
    fn full_accuracy_channel_never_flips() {
        let spec = rooms().with_accuracies([("all", 1.0)]).unwrap();
        let world = World::new(&spec);
        let sl = spec.sensing_action("SL").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let o = observe(&world, sl, Directive::Channel, &mut rng).unwrap();
            assert!(o.accurate);
            assert!(!o.observed_bit);
        }
    }

    #[test]
    fn forced_directives() {
        let spec = rooms();
        let world = World::new(&spec);
        let sl = spec.sensing_action("SL").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let flip = observe(&world, sl, Directive::ForceFlip, &mut rng).unwrap();
        assert_eq!(flip, Observation::new(false, true));
        assert!(!flip.accurate);
        let forced = observe(&world, sl, Directive::ForceObserved(false), &mut rng).unwrap();
        assert!(forced.accurate);
    }

    #[test]
    fn channel_flip_rate_matches_accuracy() {
        let spec = rooms();
        let world = World::new(&spec);
        let sr = spec.sensing_action("SR").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n = 100_000;
        let flips = (0..n)
            .filter(|_| {
                !observe(&world, sr, Directive::Channel, &mut rng)
                    .unwrap()
                    .accurate
            })
            .count();
        let rate = flips as f64 / n as f64;
        assert!((rate - 0.1).abs() <= 0.01, "flip rate {rate}");
    }

    #[test]
    fn empty_script_has_only_the_initial_record() {
        let run = run_script(&rooms(), &[], 1, &RunOptions::default()).unwrap();
        assert_eq!(run.steps.len(), 1);
        assert_eq!(run.steps[0].kind, StepKind::Initial);
        assert_eq!(run.epistemic.current_index(), 0);
        assert!(!run.steps[0].detected);
    }

    #[test]
    fn directive_on_physical_is_rejected() {
        let script = parse_script("sense Leave accurate").unwrap();
        assert!(matches!(
            run_script(&rooms(), &script, 0, &RunOptions::default()),
            Err(SimError::DirectiveOnPhysical { .. })
        ));
    }

    #[test]
    fn precondition_checked_in_the_world() {
        let spec = parse_domain(
            "fluent A; action Go { poss A; A := false; } init X { pl=0; A=true; } actual { A=true; }",
        )
        .unwrap();
        let script = parse_script("do Go\ndo Go").unwrap();
        let err = run_script(&spec, &script, 0, &RunOptions::default()).unwrap_err();
        assert!(
            matches!(err, SimError::PreconditionInWorld { step: 2, .. }),
            "{err}"
        );
    }

    #[test]
    fn detection_of_single_matching_initial() {
        let spec = parse_domain("fluent A; init X { pl=0; A=true; } actual { A=true; }").unwrap();
        let trace = EpistemicTrace::new(&spec, EngineOptions::default()).unwrap();
        assert!(detection(&trace, 0, spec.actual_initial));
    }

    #[test]
    fn hash_is_stable_under_reformatting() {
        let spec = rooms();
        let reparsed = parse_domain(&serialize_domain(&spec)).unwrap();
        assert_eq!(domain_hash(&spec), domain_hash(&reparsed));
        assert_eq!(domain_hash(&spec).len(), 64);
    }
}
