//! Executable checks of the framework's properties on finite domains.
//!
//! Each check enumerates or samples epistemic states up to an explicit bound
//! and reports every counterexample together with a script (and seed, where
//! one was used) that reproduces it through [`crate::sim::run_script`]. A pass
//! is a pass relative to the stated bounds and probe set only.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dsl::{ActionRef, DomainSpec, SensingAction};
use crate::engine::{BaselineBelief, BaselineState, EngineError, EngineOptions, EpistemicTrace};
use crate::formula::Formula;
use crate::sim::{
    check_sensing_sensitive, derive_seed, run_script, Directive, RunOptions, RunTrace, ScriptStep,
    SensitivityScope, SimError, World,
};
use crate::sitcalc::{self, SitcalcError};
use crate::valuation::FluentValuation;

#[derive(Debug, Error)]
pub enum TheoremError {
    #[error("`{action}` is not a revision action for `{formula}`")]
    NotRevisionAction { action: String, formula: String },
    #[error("no sensing action named `{0}`")]
    UnknownSensingAction(String),
    #[error("`{0}` must not contain Bel or Prev")]
    ModalFormula(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Sitcalc(#[from] SitcalcError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// Baseline beliefs are kept under accurate sensing.
    Subsumption,
    /// Sensing a formula makes the agent believe its sensed value.
    Revision,
    /// Positive and negative introspection, and consistency.
    Introspection,
    /// After a corrected mistake the agent believes it was mistaken.
    ErrorAwareness,
    /// Accessibility is an equivalence per generation.
    AccessibilityStructure,
    /// The distinguishing sequence singles out the actual situation.
    SensingSensitivity,
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckKind::Subsumption => "subsumption",
            CheckKind::Revision => "revision",
            CheckKind::Introspection => "introspection",
            CheckKind::ErrorAwareness => "error-awareness",
            CheckKind::AccessibilityStructure => "accessibility-structure",
            CheckKind::SensingSensitivity => "sensing-sensitivity",
        })
    }
}

/// A script (plus seed and actual valuation) that rebuilds a checked state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reproduction {
    pub script: Vec<String>,
    #[serde(skip)]
    pub steps: Vec<ScriptStep>,
    pub seed: u64,
    /// Actual valuation the final step was checked against, when it matters.
    pub actual: Option<String>,
}

impl Reproduction {
    fn new(steps: Vec<ScriptStep>, seed: u64, actual: Option<String>) -> Self {
        Self {
            script: steps.iter().map(|s| s.to_string()).collect(),
            steps,
            seed,
            actual,
        }
    }

    pub fn replay(&self, spec: &DomainSpec, engine: EngineOptions) -> Result<RunTrace, SimError> {
        run_script(
            spec,
            &self.steps,
            self.seed,
            &RunOptions {
                engine,
                ..RunOptions::default()
            },
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckViolation {
    pub description: String,
    pub reproduction: Reproduction,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check: CheckKind,
    /// Enumeration bounds and probe set the verdict is relative to.
    pub bounds: String,
    pub cases: usize,
    pub violations: Vec<CheckViolation>,
    pub witness: Option<Reproduction>,
    pub notes: Vec<String>,
    pub passed: bool,
}

impl CheckReport {
    fn new(check: CheckKind, bounds: String) -> Self {
        Self {
            check,
            bounds,
            cases: 0,
            violations: Vec::new(),
            witness: None,
            notes: Vec::new(),
            passed: false,
        }
    }

    fn finish(mut self) -> Self {
        self.passed = self.violations.is_empty();
        self
    }

    fn violate(&mut self, description: String, reproduction: Reproduction) {
        self.violations.push(CheckViolation {
            description,
            reproduction,
        });
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} {}: {} cases, {} violations ({})",
            if self.passed { "PASS" } else { "FAIL" },
            self.check,
            self.cases,
            self.violations.len(),
            self.bounds
        )?;
        for note in &self.notes {
            writeln!(f, "  note: {note}")?;
        }
        if let Some(w) = &self.witness {
            writeln!(
                f,
                "  witness: [{}] actual={}",
                w.script.join("; "),
                w.actual.as_deref().unwrap_or("-")
            )?;
        }
        for v in self.violations.iter().take(10) {
            writeln!(
                f,
                "  violation: {} | script [{}] seed {} actual {}",
                v.description,
                v.reproduction.script.join("; "),
                v.reproduction.seed,
                v.reproduction.actual.as_deref().unwrap_or("-")
            )?;
        }
        if self.violations.len() > 10 {
            writeln!(f, "  ... {} more", self.violations.len() - 10)?;
        }
        Ok(())
    }
}

/// Literals over every fluent, in declaration order.
pub fn literal_probes(spec: &DomainSpec) -> Vec<(String, Formula)> {
    crate::sim::literal_probes(spec)
}

/// Literals plus conjunctions of two literals over distinct fluents.
pub fn literal_pair_probes(spec: &DomainSpec) -> Vec<(String, Formula)> {
    let literals = literal_probes(spec);
    let mut out = literals.clone();
    for (i, (na, fa)) in literals.iter().enumerate() {
        for (nb, fb) in &literals[i + 1..] {
            if fa.max_fluent() != fb.max_fluent() {
                out.push((format!("{na} & {nb}"), fa.clone().and(fb.clone())));
            }
        }
    }
    out
}

/// Literals, pairwise conjunctions, and the full state description of each
/// initial situation.
pub fn default_probes(spec: &DomainSpec) -> Vec<(String, Formula)> {
    let mut out = literal_pair_probes(spec);
    for init in &spec.initial_situations {
        let f = Formula::state_description(init.valuation, spec.fluents.len());
        out.push((f.display(&spec.fluents).to_string(), f));
    }
    out
}

fn describe(spec: &DomainSpec, f: &Formula) -> String {
    f.display(&spec.fluents).to_string()
}

/// Whether `action` senses exactly `f` at every valuation.
pub fn is_revision_action(spec: &DomainSpec, action: &SensingAction, f: &Formula) -> bool {
    FluentValuation::all(spec.fluents.len())
        .all(|v| matches!((sitcalc::sf(action, v), f.eval(v)), (Ok(a), Some(b)) if a == b))
}

/// First declared sensing action whose outcome coincides with `f` everywhere.
pub fn find_revision_action<'a>(spec: &'a DomainSpec, f: &Formula) -> Option<&'a SensingAction> {
    if !f.is_domain_dependent() {
        return None;
    }
    spec.sensing_actions
        .iter()
        .find(|a| is_revision_action(spec, a, f))
}

/// A reachable epistemic state together with the script that produced it.
#[derive(Debug, Clone)]
pub struct ReachableState {
    pub script: Vec<ScriptStep>,
    pub trace: EpistemicTrace,
}

/// Every state reachable by at most `max_len` actions, each sensing action
/// taken with both possible observations. Depth-first, empty script first.
pub fn reachable_states(
    spec: &DomainSpec,
    engine: EngineOptions,
    max_len: usize,
) -> Result<Vec<ReachableState>, TheoremError> {
    fn walk(
        spec: &DomainSpec,
        state: ReachableState,
        remaining: usize,
        out: &mut Vec<ReachableState>,
    ) -> Result<(), TheoremError> {
        out.push(state.clone());
        if remaining == 0 {
            return Ok(());
        }
        for name in spec.action_names() {
            let branches: &[Option<bool>] = match spec.action(name) {
                Some(ActionRef::Sensing(_)) => &[Some(false), Some(true)],
                _ => &[None],
            };
            for &obs in branches {
                let trace = state.trace.apply(spec, name, obs)?;
                let mut script = state.script.clone();
                script.push(ScriptStep::new(
                    name,
                    obs.map_or(Directive::Channel, Directive::ForceObserved),
                ));
                walk(spec, ReachableState { script, trace }, remaining - 1, out)?;
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    let root = ReachableState {
        script: Vec::new(),
        trace: EpistemicTrace::new(spec, engine)?,
    };
    walk(spec, root, max_len, &mut out)?;
    Ok(out)
}

fn require_revision_action<'a>(
    spec: &'a DomainSpec,
    action: &str,
    f: &Formula,
) -> Result<&'a SensingAction, TheoremError> {
    if !f.is_domain_dependent() {
        return Err(TheoremError::ModalFormula(describe(spec, f)));
    }
    let a = spec
        .sensing_action(action)
        .ok_or_else(|| TheoremError::UnknownSensingAction(action.into()))?;
    if !is_revision_action(spec, a, f) {
        return Err(TheoremError::NotRevisionAction {
            action: action.into(),
            formula: describe(spec, f),
        });
    }
    Ok(a)
}

fn with_step(script: &[ScriptStep], step: ScriptStep) -> Vec<ScriptStep> {
    let mut s = script.to_vec();
    s.push(step);
    s
}

/// Revision by a revision action `action` for `f`.
///
/// For every reachable state and every actual valuation `v`, sensing
/// accurately at `v` must make the agent believe `f` if `f` holds at `v` and
/// `!f` otherwise. Pairs where no situation at the state agrees with `v` on
/// `f` are counted but not asserted: the actual situation cannot be one of
/// the accessible ones there. Separately, a concrete state is exhibited where `!f` is
/// believed, accurate sensing with `f` true yields belief in `f`, and beliefs
/// stay consistent.
pub fn check_revision(
    spec: &DomainSpec,
    action: &str,
    f: &Formula,
    max_len: usize,
    engine: EngineOptions,
) -> Result<CheckReport, TheoremError> {
    let a = require_revision_action(spec, action, f)?;
    let states = reachable_states(spec, engine, max_len)?;
    let valuations: Vec<FluentValuation> = FluentValuation::all(spec.fluents.len()).collect();
    let mut report = CheckReport::new(
        CheckKind::Revision,
        format!(
            "scripts of length <= {max_len} with both observations, {} actual valuations, action {action}, formula {}",
            valuations.len(),
            describe(spec, f)
        ),
    );
    let not_f = f.clone().not();

    // A case only falls under the property when some accessible situation
    // agrees with the actual valuation on `f`; otherwise the actual situation
    // cannot be among them and the case is counted as excluded.
    let agrees = |state: &ReachableState, v: FluentValuation| {
        let holds = f.eval(v);
        state
            .trace
            .current()
            .nodes()
            .iter()
            .any(|n| f.eval(n.valuation) == holds)
    };
    let per_state: Vec<(usize, usize, Vec<CheckViolation>)> = states
        .par_iter()
        .map(|state| {
            let (mut cases, mut excluded) = (0, 0);
            let mut found = Vec::new();
            for &v in &valuations {
                if !agrees(state, v) {
                    excluded += 1;
                    continue;
                }
                cases += 1;
                let holds = f.eval(v).expect("domain formula");
                let observed = sitcalc::sf(a, v)?;
                let next = state.trace.apply_sensing(a, observed)?;
                let expected = if holds { f } else { &not_f };
                if !next.believes(expected) {
                    found.push(CheckViolation {
                        description: format!(
                            "after accurate {action} the agent does not believe {}",
                            describe(spec, expected)
                        ),
                        reproduction: Reproduction::new(
                            with_step(
                                &state.script,
                                ScriptStep::new(action, Directive::ForceObserved(observed)),
                            ),
                            0,
                            Some(v.display(&spec.fluents).to_string()),
                        ),
                    });
                }
            }
            Ok((cases, excluded, found))
        })
        .collect::<Result<_, TheoremError>>()?;
    let mut excluded = 0;
    for (cases, skipped, found) in per_state {
        report.cases += cases;
        excluded += skipped;
        report.violations.extend(found);
    }
    report.notes.push(format!(
        "{excluded} state/valuation pairs excluded: no accessible situation agrees with the actual valuation on the formula"
    ));

    // Satisfiability witness, preferring the declared actual world.
    let worlds: Vec<FluentValuation> = std::iter::once(spec.actual_initial)
        .chain(valuations.iter().copied())
        .filter(|v| f.eval(*v) == Some(true))
        .collect();
    let mut believing_negation = 0usize;
    'search: for state in &states {
        if !state.trace.believes(&not_f) {
            continue;
        }
        believing_negation += 1;
        for &v in &worlds {
            if !agrees(state, v) {
                continue;
            }
            let next = state.trace.apply_sensing(a, sitcalc::sf(a, v)?)?;
            if next.believes(f) && !next.believes(&Formula::False) {
                report.witness = Some(Reproduction::new(
                    with_step(
                        &state.script,
                        ScriptStep::new(action, Directive::ForceObserved(true)),
                    ),
                    0,
                    Some(v.display(&spec.fluents).to_string()),
                ));
                report.notes.push(format!(
                    "witness: Bel({}) before, Bel({}) and not Bel(false) after accurate {action}",
                    describe(spec, &not_f),
                    describe(spec, f)
                ));
                break 'search;
            }
        }
    }
    if report.witness.is_none() {
        report.notes.push(format!(
            "no witness within the bound ({believing_negation} states believe {})",
            describe(spec, &not_f)
        ));
    }
    Ok(report.finish())
}

/// Builds `count` random scripts of length `1..=max_len` mixing accurate and
/// flipped sensing, each executable in the actual world.
pub fn random_scripts(
    spec: &DomainSpec,
    count: usize,
    max_len: usize,
    seed: u64,
    flip_probability: f64,
) -> Vec<(u64, Vec<ScriptStep>)> {
    let names = spec.action_names();
    (0..count as u64)
        .map(|k| {
            let sub = derive_seed(seed, k, 0);
            let mut rng = ChaCha8Rng::seed_from_u64(sub);
            let len = rng.gen_range(1..=max_len.max(1));
            let mut world = World::new(spec);
            let mut script = Vec::with_capacity(len);
            for _ in 0..len {
                let executable: Vec<&str> = names
                    .iter()
                    .copied()
                    .filter(|n| match spec.action(n) {
                        Some(ActionRef::Physical(a)) => {
                            sitcalc::precondition_holds(world.actual_valuation, a).unwrap_or(false)
                        }
                        _ => true,
                    })
                    .collect();
                let Some(&name) = executable.choose(&mut rng) else {
                    break;
                };
                match spec.action(name) {
                    Some(ActionRef::Physical(a)) => {
                        world.apply_physical(a).expect("precondition checked above");
                        script.push(ScriptStep::new(name, Directive::Channel));
                    }
                    _ => {
                        world.record_sensing();
                        let directive = if rng.gen::<f64>() < flip_probability {
                            Directive::ForceFlip
                        } else {
                            Directive::ForceAccurate
                        };
                        script.push(ScriptStep::new(name, directive));
                    }
                }
            }
            (sub, script)
        })
        .collect()
}

/// Positive and negative introspection of every probe, and `!Bel(false)`, at
/// every generation of `samples` random mixed-noise scripts.
pub fn check_introspection(
    spec: &DomainSpec,
    samples: usize,
    max_len: usize,
    seed: u64,
    probes: &[(String, Formula)],
    engine: EngineOptions,
) -> Result<CheckReport, TheoremError> {
    let mut report = CheckReport::new(
        CheckKind::Introspection,
        format!(
            "{samples} random scripts of length <= {max_len} (seed {seed}), {} probes",
            probes.len()
        ),
    );
    let scripts = random_scripts(spec, samples, max_len, seed, 0.3);
    let results: Vec<(usize, Vec<CheckViolation>)> = scripts
        .par_iter()
        .map(|(sub, script)| {
            let run = run_script(
                spec,
                script,
                *sub,
                &RunOptions {
                    engine,
                    ..RunOptions::default()
                },
            )?;
            let mut cases = 0;
            let mut found = Vec::new();
            let trace = &run.epistemic;
            for g in 0..=trace.current_index() {
                let repro = || Reproduction::new(script[..g].to_vec(), *sub, None);
                cases += 1;
                if trace.bel(g, &Formula::False)? {
                    found.push(CheckViolation {
                        description: format!("Bel(false) holds at generation {g}"),
                        reproduction: repro(),
                    });
                }
                for (name, f) in probes {
                    cases += 1;
                    let believed = trace.bel(g, f)?;
                    let introspected = if believed {
                        trace.bel(g, &f.clone().bel())?
                    } else {
                        trace.bel(g, &f.clone().bel().not())?
                    };
                    if !introspected {
                        found.push(CheckViolation {
                            description: if believed {
                                format!("Bel({name}) without Bel(Bel({name})) at generation {g}")
                            } else {
                                format!("!Bel({name}) without Bel(!Bel({name})) at generation {g}")
                            },
                            reproduction: repro(),
                        });
                    }
                }
            }
            Ok((cases, found))
        })
        .collect::<Result<_, TheoremError>>()?;
    for (cases, found) in results {
        report.cases += cases;
        report.violations.extend(found);
    }
    Ok(report.finish())
}

/// Whenever `!f` is believed at a state and `f` after sensing with `action`,
/// the agent must believe `Prev(f & Bel(!f))`.
pub fn check_error_awareness(
    spec: &DomainSpec,
    action: &str,
    f: &Formula,
    max_len: usize,
    engine: EngineOptions,
) -> Result<CheckReport, TheoremError> {
    let a = require_revision_action(spec, action, f)?;
    let not_f = f.clone().not();
    let conclusion = f.clone().and(not_f.clone().bel()).prev();
    let mut report = CheckReport::new(
        CheckKind::ErrorAwareness,
        format!(
            "scripts of length <= {max_len} with both observations, action {action}, formula {}",
            describe(spec, f)
        ),
    );
    let states = reachable_states(spec, engine, max_len)?;
    let mut antecedents = 0;
    for state in &states {
        if !state.trace.believes(&not_f) {
            continue;
        }
        for observed in [false, true] {
            let next = state.trace.apply_sensing(a, observed)?;
            report.cases += 1;
            if !next.believes(f) {
                continue;
            }
            antecedents += 1;
            if !next.believes(&conclusion) {
                report.violate(
                    format!("agent does not believe {}", describe(spec, &conclusion)),
                    Reproduction::new(
                        with_step(
                            &state.script,
                            ScriptStep::new(action, Directive::ForceObserved(observed)),
                        ),
                        0,
                        None,
                    ),
                );
            } else if report.witness.is_none() {
                report.witness = Some(Reproduction::new(
                    with_step(
                        &state.script,
                        ScriptStep::new(action, Directive::ForceObserved(observed)),
                    ),
                    0,
                    None,
                ));
            }
        }
    }
    report.notes.push(format!(
        "{antecedents} of {} sensing outcomes satisfied the antecedent",
        report.cases
    ));
    Ok(report.finish())
}

/// Every script of length `<= max_len` over the declared actions with
/// accurate sensing in the actual world: wherever the baseline is still
/// consistent, each probe it believes must be believed by the ranked engine.
/// Scripts with one flipped sensing step are run as well; their divergences
/// are only counted.
pub fn check_subsumption(
    spec: &DomainSpec,
    max_len: usize,
    probes: &[(String, Formula)],
    engine: EngineOptions,
) -> Result<CheckReport, TheoremError> {
    let mut report = CheckReport::new(
        CheckKind::Subsumption,
        format!(
            "all accurate scripts of length <= {max_len}, {} probes",
            probes.len()
        ),
    );
    struct Node {
        script: Vec<ScriptStep>,
        world: World,
        trace: EpistemicTrace,
        baseline: BaselineState,
        flips: usize,
    }
    let root = Node {
        script: Vec::new(),
        world: World::new(spec),
        trace: EpistemicTrace::new(spec, engine)?,
        baseline: BaselineState::new(spec),
        flips: 0,
    };
    let mut stack = vec![root];
    let (mut noisy_states, mut divergences) = (0usize, 0usize);
    while let Some(node) = stack.pop() {
        if node.baseline.survivors().is_empty() {
            // Inconsistent baseline: outside the comparison.
        } else {
            let noisy = node.flips > 0;
            if noisy {
                noisy_states += 1;
            }
            for (name, f) in probes {
                if !noisy {
                    report.cases += 1;
                }
                if node.baseline.bel(f)? == BaselineBelief::Holds(true) && !node.trace.believes(f) {
                    if noisy {
                        divergences += 1;
                    } else {
                        report.violate(
                            format!("baseline believes {name} but the ranked engine does not"),
                            Reproduction::new(node.script.clone(), 0, None),
                        );
                    }
                }
            }
        }
        if node.script.len() == max_len {
            continue;
        }
        for name in spec.action_names().into_iter().rev() {
            match spec.action(name) {
                Some(ActionRef::Physical(a)) => {
                    if !sitcalc::precondition_holds(node.world.actual_valuation, a)? {
                        continue;
                    }
                    let mut world = node.world;
                    world.apply_physical(a)?;
                    stack.push(Node {
                        script: with_step(&node.script, ScriptStep::new(name, Directive::Channel)),
                        world,
                        trace: node.trace.apply_physical(a)?,
                        baseline: node.baseline.apply_physical(a),
                        flips: node.flips,
                    });
                }
                Some(ActionRef::Sensing(a)) => {
                    let truth = sitcalc::sf(a, node.world.actual_valuation)?;
                    let mut world = node.world;
                    world.record_sensing();
                    let options: &[(Directive, bool)] = if node.flips == 0 {
                        &[
                            (Directive::ForceFlip, !truth),
                            (Directive::ForceAccurate, truth),
                        ]
                    } else {
                        &[(Directive::ForceAccurate, truth)]
                    };
                    for &(directive, observed) in options {
                        stack.push(Node {
                            script: with_step(&node.script, ScriptStep::new(name, directive)),
                            world,
                            trace: node.trace.apply_sensing(a, observed)?,
                            baseline: node.baseline.apply_sensing(a, observed)?,
                            flips: node.flips + usize::from(directive == Directive::ForceFlip),
                        });
                    }
                }
                None => unreachable!("declared action"),
            }
        }
    }
    report.notes.push(format!(
        "{divergences} divergences across {noisy_states} consistent states of scripts with one flipped sensing (not asserted)"
    ));
    Ok(report.finish())
}

/// Structural shape of accessibility: every generation has the width of
/// generation 0, each node has exactly one parent one generation back in
/// the same lineage, and sensing never changes valuations.
pub fn check_accessibility_structure(
    spec: &DomainSpec,
    max_len: usize,
    engine: EngineOptions,
) -> Result<CheckReport, TheoremError> {
    let mut report = CheckReport::new(
        CheckKind::AccessibilityStructure,
        format!("scripts of length <= {max_len} with both observations"),
    );
    for state in reachable_states(spec, engine, max_len)? {
        // Only maximal scripts are needed; prefixes are covered by their extensions.
        if state.script.len() != max_len && max_len > 0 {
            continue;
        }
        report.cases += 1;
        let generations = state.trace.generations();
        let width = generations[0].nodes().len();
        let mut problems = Vec::new();
        for pair in generations.windows(2) {
            let (prev, gen) = (pair[0], pair[1]);
            if gen.nodes().len() != width {
                problems.push(format!(
                    "generation {} has {} nodes",
                    gen.index(),
                    gen.nodes().len()
                ));
            }
            let action = gen.action().and_then(|a| spec.action(a));
            for (child, parent) in gen.nodes().iter().zip(prev.nodes()) {
                if child.parent != Some(parent.id) || child.generation != gen.index() {
                    problems.push(format!(
                        "node {:?} is not linked to {:?}",
                        child.id, parent.id
                    ));
                }
                let expected = match action {
                    Some(ActionRef::Physical(a)) => sitcalc::apply_effects(parent.valuation, a),
                    _ => parent.valuation,
                };
                if child.valuation != expected {
                    problems.push(format!("node {:?} has an unexpected valuation", child.id));
                }
            }
            if gen.most_plausible().next().is_none() {
                problems.push(format!("generation {} has no pl = 0 node", gen.index()));
            }
        }
        for p in problems {
            report.violate(p, Reproduction::new(state.script.clone(), 0, None));
        }
    }
    Ok(report.finish())
}

/// Wraps [`check_sensing_sensitive`] as a report for the domain's `seq`.
pub fn check_sensitivity(
    spec: &DomainSpec,
    seq: &[String],
    scope: SensitivityScope,
) -> Result<CheckReport, TheoremError> {
    let result = check_sensing_sensitive(spec, seq, scope)?;
    let mut report = CheckReport::new(
        CheckKind::SensingSensitivity,
        format!(
            "sequence [{}], {} candidates",
            seq.join(", "),
            result.candidates
        ),
    );
    report.cases = result.candidates;
    if let Some(w) = &result.witness_text {
        report.violate(
            format!("candidate {w} yields the same sensing results as the actual situation"),
            Reproduction::new(Vec::new(), 0, Some(w.clone())),
        );
    }
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_domain;

    fn rooms() -> DomainSpec {
        parse_domain(include_str!("../data/rooms.dom")).unwrap()
    }

    #[test]
    fn revision_action_lookup() {
        let spec = rooms();
        let sr = find_revision_action(&spec, &spec.formula("InR1").unwrap()).unwrap();
        assert_eq!(sr.name, "SR");
        let sl = find_revision_action(
            &spec,
            &spec.formula("(InR1 & Light1) | (!InR1 & Light2)").unwrap(),
        )
        .unwrap();
        assert_eq!(sl.name, "SL");
        assert!(find_revision_action(&spec, &spec.formula("Light1").unwrap()).is_none());
    }

    #[test]
    fn probe_sets() {
        let spec = rooms();
        assert_eq!(literal_probes(&spec).len(), 6);
        // 6 literals + 3 fluent pairs x 4 sign combinations
        assert_eq!(literal_pair_probes(&spec).len(), 18);
        assert_eq!(default_probes(&spec).len(), 20);
    }

    #[test]
    fn reachable_state_count() {
        // Leave + two sensing actions with two outcomes each: 5 branches per step.
        let states = reachable_states(&rooms(), EngineOptions::default(), 3).unwrap();
        assert_eq!(states.len(), 1 + 5 + 25 + 125);
        assert!(states[0].script.is_empty());
    }

    #[test]
    fn trivial_formula_revision_passes() {
        let spec = parse_domain(
            "fluent A; sense T { guard true senses true; } init X { pl=0; A=true; } init Y { pl=1; A=false; } actual { A=true; }",
        )
        .unwrap();
        let report =
            check_revision(&spec, "T", &Formula::True, 3, EngineOptions::default()).unwrap();
        assert!(report.violations.is_empty());
        // Bel(!true) never holds, so there is no witness to exhibit.
        assert!(report.witness.is_none());
    }

    #[test]
    fn wrong_revision_action_is_an_error() {
        let spec = rooms();
        assert!(matches!(
            check_revision(&spec, "SL", &Formula::atom(0), 2, EngineOptions::default()),
            Err(TheoremError::NotRevisionAction { .. })
        ));
        assert!(matches!(
            check_error_awareness(
                &spec,
                "SR",
                &Formula::atom(0).bel(),
                2,
                EngineOptions::default()
            ),
            Err(TheoremError::ModalFormula(_))
        ));
    }

    #[test]
    fn random_scripts_are_reproducible() {
        let spec = rooms();
        let a = random_scripts(&spec, 20, 6, 99, 0.3);
        let b = random_scripts(&spec, 20, 6, 99, 0.3);
        assert_eq!(a, b);
        assert!(a.iter().all(|(_, s)| !s.is_empty() && s.len() <= 6));
        assert!(a
            .iter()
            .flat_map(|(_, s)| s)
            .any(|s| s.directive == Directive::ForceFlip));
    }

    #[test]
    fn structure_check_passes_on_rooms() {
        let report = check_accessibility_structure(&rooms(), 3, EngineOptions::default()).unwrap();
        assert!(report.passed, "{report}");
        assert_eq!(report.cases, 125);
    }
}
