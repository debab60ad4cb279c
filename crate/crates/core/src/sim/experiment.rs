//! Long-run detection experiments: execute a distinguishing action sequence
//! over and over through the noisy channel and measure how often the agent's
//! most plausible situations coincide with the actual one.
//!
//! Randomness is drawn per cycle from a sub-seed derived from
//! `(seed, trial, cycle)`, so trials can run on any number of threads and
//! still produce identical statistics.

use indexmap::IndexMap;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::sensitivity::{check_sensing_sensitive, SensitivityScope};
use super::{detection, observe, Directive, SimError, World};
use crate::dsl::{ActionRef, DomainSpec};
use crate::engine::{EngineOptions, EpistemicTrace, PenaltyMode};
use crate::formula::Formula;

/// SplitMix64 output finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sub-seed for one cycle of one trial.
pub fn derive_seed(master: u64, trial: u64, cycle: u64) -> u64 {
    mix64(mix64(master ^ mix64(trial)) ^ cycle)
}

/// Product of the accuracies of the sensing actions in `seq`, with multiplicity.
pub fn theorem_bound(spec: &DomainSpec, seq: &[String]) -> Result<f64, SimError> {
    let mut bound = 1.0;
    for name in seq {
        match spec
            .action(name)
            .ok_or_else(|| SimError::UnknownAction(name.clone()))?
        {
            ActionRef::Sensing(a) => bound *= a.accuracy,
            ActionRef::Physical(_) => {}
        }
    }
    Ok(bound)
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub seq: Vec<String>,
    pub cycles: usize,
    pub seed: u64,
    /// Independent runs, each `cycles` long.
    pub trials: usize,
    /// Domain formulas whose belief is compared with their truth in the world.
    pub probes: Vec<(String, Formula)>,
    pub engine: EngineOptions,
    /// When set, the first `k` sensing executions of each trial are flipped
    /// and every later one is accurate; the channel is not used.
    pub forced_flips: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(seq: Vec<String>, cycles: usize, seed: u64) -> Self {
        Self {
            seq,
            cycles,
            seed,
            trials: 1,
            probes: Vec::new(),
            engine: EngineOptions::default(),
            forced_flips: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentStats {
    pub seed: u64,
    pub cycles: usize,
    pub trials: usize,
    pub mode: PenaltyMode,
    pub seq: Vec<String>,
    pub accuracies: IndexMap<String, f64>,
    pub sensing_sensitive: bool,
    /// Product of the per-execution accuracies over one pass of the sequence.
    pub bound: f64,
    /// Binomial standard error of a fraction with mean `bound` over all cycle ends.
    pub sigma: f64,
    /// Number of trials detecting the actual situation at the end of each cycle.
    pub cycle_detections: Vec<u32>,
    /// Share of cycle ends at which the actual situation was detected.
    pub detection_fraction: f64,
    /// Same, sampled after every action.
    pub step_detection_fraction: f64,
    /// Same, sampled after every sensing action only.
    pub sensing_step_detection_fraction: f64,
    /// Share of cycle ends at which belief in the probe equals its truth in the world.
    pub probe_agreement: IndexMap<String, f64>,
    pub total_sensings: u64,
    pub noisy_sensings: u64,
    /// Per trial: the first cycle (1-based) from which detection holds at
    /// every remaining cycle end.
    pub first_permanent: Vec<Option<usize>>,
}

struct TrialOutcome {
    cycle_detected: Vec<bool>,
    step_hits: u64,
    steps: u64,
    sensing_hits: u64,
    sensings: u64,
    noisy: u64,
    probe_hits: Vec<u64>,
}

fn run_trial(
    spec: &DomainSpec,
    config: &ExperimentConfig,
    trial: u64,
) -> Result<TrialOutcome, SimError> {
    let mut world = World::new(spec);
    let mut trace = EpistemicTrace::new(spec, config.engine)?;
    let actions: Vec<ActionRef<'_>> = config
        .seq
        .iter()
        .map(|n| {
            spec.action(n)
                .ok_or_else(|| SimError::UnknownAction(n.clone()))
        })
        .collect::<Result<_, _>>()?;
    let mut out = TrialOutcome {
        cycle_detected: Vec::with_capacity(config.cycles),
        step_hits: 0,
        steps: 0,
        sensing_hits: 0,
        sensings: 0,
        noisy: 0,
        probe_hits: vec![0; config.probes.len()],
    };

    for cycle in 0..config.cycles {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, trial, cycle as u64));
        for action in &actions {
            match *action {
                ActionRef::Physical(a) => {
                    world.apply_physical(a)?;
                    trace = trace.apply_physical(a)?;
                }
                ActionRef::Sensing(a) => {
                    let directive = match config.forced_flips {
                        Some(k) if (out.sensings as usize) < k => Directive::ForceFlip,
                        Some(_) => Directive::ForceAccurate,
                        None => Directive::Channel,
                    };
                    let obs = observe(&world, a, directive, &mut rng)?;
                    world.record_sensing();
                    trace = trace.apply_sensing(a, obs.observed_bit)?;
                    out.sensings += 1;
                    out.noisy += u64::from(!obs.accurate);
                }
            }
            let hit = detection(&trace, trace.current_index(), world.actual_valuation);
            out.steps += 1;
            out.step_hits += u64::from(hit);
            if action.is_sensing() {
                out.sensing_hits += u64::from(hit);
            }
        }
        out.cycle_detected.push(detection(
            &trace,
            trace.current_index(),
            world.actual_valuation,
        ));
        for (hits, (_, f)) in out.probe_hits.iter_mut().zip(&config.probes) {
            let truth = f
                .eval(world.actual_valuation)
                .expect("probes are domain formulas");
            *hits += u64::from(trace.believes(f) == truth);
        }
    }
    Ok(out)
}

fn first_permanent(detected: &[bool]) -> Option<usize> {
    if !*detected.last()? {
        return None;
    }
    let trailing = detected.iter().rev().take_while(|d| **d).count();
    Some(detected.len() - trailing + 1)
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Repeats `config.seq` for `config.cycles` cycles in each of `config.trials`
/// independent trials.
pub fn convergence_experiment(
    spec: &DomainSpec,
    config: &ExperimentConfig,
) -> Result<ExperimentStats, SimError> {
    if config.cycles == 0 || config.trials == 0 {
        return Err(SimError::ZeroCycles);
    }
    if config.seq.is_empty() {
        return Err(SimError::EmptySequence);
    }
    for (name, f) in &config.probes {
        if !f.is_domain_dependent() {
            return Err(SimError::ModalProbe(name.clone()));
        }
    }
    let bound = theorem_bound(spec, &config.seq)?;
    let sensitive =
        check_sensing_sensitive(spec, &config.seq, SensitivityScope::AllValuations)?.sensitive;

    let outcomes = (0..config.trials as u64)
        .into_par_iter()
        .map(|t| run_trial(spec, config, t))
        .collect::<Result<Vec<_>, _>>()?;

    let mut cycle_detections = vec![0u32; config.cycles];
    let (mut step_hits, mut steps, mut sensing_hits, mut sensings, mut noisy) = (0, 0, 0, 0, 0);
    let mut probe_hits = vec![0u64; config.probes.len()];
    let mut first = Vec::with_capacity(config.trials);
    for o in &outcomes {
        for (count, d) in cycle_detections.iter_mut().zip(&o.cycle_detected) {
            *count += u32::from(*d);
        }
        step_hits += o.step_hits;
        steps += o.steps;
        sensing_hits += o.sensing_hits;
        sensings += o.sensings;
        noisy += o.noisy;
        for (acc, h) in probe_hits.iter_mut().zip(&o.probe_hits) {
            *acc += h;
        }
        first.push(first_permanent(&o.cycle_detected));
    }
    let cycle_ends = (config.cycles * config.trials) as u64;
    let detected: u64 = cycle_detections.iter().map(|&c| u64::from(c)).sum();

    let mut accuracies = IndexMap::new();
    for name in &config.seq {
        if let Some(a) = spec.sensing_action(name) {
            accuracies.insert(name.clone(), a.accuracy);
        }
    }

    Ok(ExperimentStats {
        seed: config.seed,
        cycles: config.cycles,
        trials: config.trials,
        mode: config.engine.penalty,
        seq: config.seq.clone(),
        accuracies,
        sensing_sensitive: sensitive,
        bound,
        sigma: (bound * (1.0 - bound) / cycle_ends as f64).sqrt(),
        cycle_detections,
        detection_fraction: ratio(detected, cycle_ends),
        step_detection_fraction: ratio(step_hits, steps),
        sensing_step_detection_fraction: ratio(sensing_hits, sensings),
        probe_agreement: config
            .probes
            .iter()
            .zip(&probe_hits)
            .map(|((name, _), h)| (name.clone(), ratio(*h, cycle_ends)))
            .collect(),
        total_sensings: sensings,
        noisy_sensings: noisy,
        first_permanent: first,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub accuracy: f64,
    pub stats: ExperimentStats,
}

/// Runs the same experiment with every sensing accuracy set to each value in turn.
pub fn accuracy_sweep(
    spec: &DomainSpec,
    accuracies: &[f64],
    config: &ExperimentConfig,
) -> Result<Vec<SweepPoint>, SimError> {
    accuracies
        .iter()
        .map(|&accuracy| {
            let tuned = spec.with_accuracies([("all", accuracy)])?;
            Ok(SweepPoint {
                accuracy,
                stats: convergence_experiment(&tuned, config)?,
            })
        })
        .collect()
}
