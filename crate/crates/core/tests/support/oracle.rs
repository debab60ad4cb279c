//! Naive re-derivation of rankings, beliefs and baseline survivors.
//!
//! Every query replays the whole action history from the declared initial
//! situations, recomputing `m`, the matching minimum and the normalization
//! shift by full scans. Nothing here calls into the engine, the sitcalc
//! evaluator or `Formula::eval`; only the parsed domain data is shared.

#![allow(dead_code)]

use noetic_core::dsl::{DomainSpec, SensingAction};
use noetic_core::formula::Formula;
use noetic_core::valuation::{Fluent, FluentValuation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Penalty {
    PlusMPlusOne,
    PlusM,
}

#[derive(Debug, Clone)]
pub struct OracleStep {
    pub action: String,
    /// `None` for physical actions.
    pub observed: Option<bool>,
}

pub struct Oracle<'a> {
    pub spec: &'a DomainSpec,
    pub steps: Vec<OracleStep>,
    pub penalty: Penalty,
}

fn truth(f: &Formula, v: FluentValuation) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(Fluent(i)) => (v.bits() >> i) & 1 == 1,
        Formula::Not(g) => !truth(g, v),
        Formula::And(a, b) => truth(a, v) & truth(b, v),
        Formula::Or(a, b) => truth(a, v) | truth(b, v),
        Formula::Implies(a, b) => !truth(a, v) | truth(b, v),
        Formula::Iff(a, b) => truth(a, v) == truth(b, v),
        Formula::Bel(_) | Formula::Prev(_) => panic!("modal formula in domain position"),
    }
}

fn sensed(a: &SensingAction, v: FluentValuation) -> bool {
    for g in &a.guards {
        if truth(&g.condition, v) {
            return truth(&g.sensed, v);
        }
    }
    panic!("no guard fires")
}

pub fn oracle_progress(spec: &DomainSpec, action: &str, v: FluentValuation) -> FluentValuation {
    let a = spec
        .physical_actions
        .iter()
        .find(|a| a.name == action)
        .expect("physical action");
    let mut bits = v.bits();
    for (Fluent(i), rhs) in &a.effects {
        if truth(rhs, v) {
            bits |= 1 << i;
        } else {
            bits &= !(1 << i);
        }
    }
    FluentValuation::from_bits(bits)
}

pub fn oracle_sf(spec: &DomainSpec, action: &str, v: FluentValuation) -> bool {
    let a = spec
        .sensing_actions
        .iter()
        .find(|a| a.name == action)
        .expect("sensing action");
    sensed(a, v)
}

impl<'a> Oracle<'a> {
    pub fn new(spec: &'a DomainSpec, steps: Vec<OracleStep>, penalty: Penalty) -> Self {
        Self {
            spec,
            steps,
            penalty,
        }
    }

    /// (valuation, pl) for every lineage at generation `g`, recomputed from scratch.
    pub fn state(&self, g: usize) -> Vec<(FluentValuation, u64)> {
        let mut m = 0;
        for s in &self.spec.initial_situations {
            if s.pl > m {
                m = s.pl;
            }
        }
        let mut state: Vec<(FluentValuation, u64)> = self
            .spec
            .initial_situations
            .iter()
            .map(|s| (s.valuation, s.pl))
            .collect();
        for step in &self.steps[..g] {
            match step.observed {
                None => {
                    for entry in state.iter_mut() {
                        entry.0 = oracle_progress(self.spec, &step.action, entry.0);
                    }
                }
                Some(obs) => {
                    let matches: Vec<bool> = state
                        .iter()
                        .map(|(v, _)| oracle_sf(self.spec, &step.action, *v) == obs)
                        .collect();
                    let mut t: Option<u64> = None;
                    for (i, (_, pl)) in state.iter().enumerate() {
                        if matches[i] && t.is_none_or(|t| *pl < t) {
                            t = Some(*pl);
                        }
                    }
                    let bump = match self.penalty {
                        Penalty::PlusMPlusOne => m + 1,
                        Penalty::PlusM => m,
                    };
                    for (i, entry) in state.iter_mut().enumerate() {
                        entry.1 = if matches[i] {
                            entry.1 - t.unwrap()
                        } else {
                            entry.1 + bump
                        };
                    }
                    let mut low = u64::MAX;
                    for (_, pl) in &state {
                        if *pl < low {
                            low = *pl;
                        }
                    }
                    for entry in state.iter_mut() {
                        entry.1 -= low;
                    }
                }
            }
        }
        state
    }

    pub fn pls(&self, g: usize) -> Vec<u64> {
        self.state(g).into_iter().map(|(_, pl)| pl).collect()
    }

    /// Modal truth of `f` at lineage `i` of generation `g`.
    pub fn holds(&self, f: &Formula, g: usize, i: usize) -> bool {
        match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(Fluent(k)) => (self.state(g)[i].0.bits() >> k) & 1 == 1,
            Formula::Not(x) => !self.holds(x, g, i),
            Formula::And(a, b) => self.holds(a, g, i) & self.holds(b, g, i),
            Formula::Or(a, b) => self.holds(a, g, i) | self.holds(b, g, i),
            Formula::Implies(a, b) => !self.holds(a, g, i) | self.holds(b, g, i),
            Formula::Iff(a, b) => self.holds(a, g, i) == self.holds(b, g, i),
            Formula::Bel(x) => self.believes(x, g),
            Formula::Prev(x) => g > 0 && self.holds(x, g - 1, i),
        }
    }

    pub fn believes(&self, f: &Formula, g: usize) -> bool {
        let state = self.state(g);
        let mut all = true;
        for (i, (_, pl)) in state.iter().enumerate() {
            if *pl == 0 && !self.holds(f, g, i) {
                all = false;
            }
        }
        all
    }

    /// Indices of initial situations never contradicted by an observation up to `g`.
    pub fn baseline_survivors(&self, g: usize) -> Vec<usize> {
        let mut out = Vec::new();
        'lineage: for (i, init) in self.spec.initial_situations.iter().enumerate() {
            let mut v = init.valuation;
            for step in &self.steps[..g] {
                match step.observed {
                    None => v = oracle_progress(self.spec, &step.action, v),
                    Some(obs) => {
                        if oracle_sf(self.spec, &step.action, v) != obs {
                            continue 'lineage;
                        }
                    }
                }
            }
            out.push(i);
        }
        out
    }

    /// Baseline belief: `None` when nothing survives.
    pub fn baseline_believes(&self, f: &Formula, g: usize) -> Option<bool> {
        let survivors = self.baseline_survivors(g);
        if survivors.is_empty() {
            return None;
        }
        let state = self.state(g);
        let min = survivors
            .iter()
            .map(|&i| self.spec.initial_situations[i].pl)
            .min()
            .unwrap();
        Some(
            survivors
                .iter()
                .filter(|&&i| self.spec.initial_situations[i].pl == min)
                .all(|&i| truth(f, state[i].0)),
        )
    }

    /// Actual world after the first `g` steps.
    pub fn world(&self, g: usize) -> FluentValuation {
        let mut v = self.spec.actual_initial;
        for step in &self.steps[..g] {
            if step.observed.is_none() {
                v = oracle_progress(self.spec, &step.action, v);
            }
        }
        v
    }

    pub fn detected(&self, g: usize) -> bool {
        let world = self.world(g);
        self.state(g)
            .iter()
            .filter(|(_, pl)| *pl == 0)
            .all(|(v, _)| *v == world)
    }
}
