//! Property tests over randomly generated small domains and scripts, checked
//! against the naive oracle in `support/oracle.rs`.

#[path = "support/oracle.rs"]
mod oracle;

use noetic_core::dsl::{parse_domain, serialize_domain, validate_domain, DomainSpec};
use noetic_core::engine::{BaselineState, EngineOptions, EpistemicTrace, PenaltyMode};
use noetic_core::formula::Formula;
use noetic_core::sim::{run_script, Directive, RunOptions, ScriptStep};
use noetic_core::theorems::default_probes;
use oracle::{oracle_sf, Oracle, OracleStep, Penalty};
use proptest::prelude::*;

#[derive(Debug, Clone)]
struct DomainShape {
    fluents: usize,
    /// Per physical action: (target fluent, effect kind, operand fluents).
    physical: Vec<Vec<(usize, u8, usize, usize)>>,
    /// Per sensing action: (guard fluent or none, sensed literals).
    sensing: Vec<(Option<usize>, (usize, bool), (usize, bool))>,
    inits: Vec<(u64, u64)>,
    actual: u64,
}

fn literal(i: usize, positive: bool) -> String {
    if positive {
        format!("F{i}")
    } else {
        format!("!F{i}")
    }
}

impl DomainShape {
    fn text(&self) -> String {
        let n = self.fluents;
        let names: Vec<String> = (0..n).map(|i| format!("F{i}")).collect();
        let mut out = format!("fluent {};\n", names.join(", "));
        for (k, effects) in self.physical.iter().enumerate() {
            out.push_str(&format!("action P{k} {{"));
            let mut seen = Vec::new();
            for &(target, kind, a, b) in effects {
                let (target, a, b) = (target % n, a % n, b % n);
                if seen.contains(&target) {
                    continue;
                }
                seen.push(target);
                let rhs = match kind % 4 {
                    0 => format!("!F{target}"),
                    1 => format!("F{a}"),
                    2 => format!("F{a} | !F{b}"),
                    _ => "true".to_string(),
                };
                out.push_str(&format!(" F{target} := {rhs};"));
            }
            out.push_str(" }\n");
        }
        for (k, (guard, l1, l2)) in self.sensing.iter().enumerate() {
            out.push_str(&format!("sense Q{k} accuracy=0.8 {{"));
            match guard {
                None => out.push_str(&format!(" guard true senses {};", literal(l1.0 % n, l1.1))),
                Some(g) => out.push_str(&format!(
                    " guard F{g} senses {}; guard !F{g} senses {};",
                    literal(l1.0 % n, l1.1),
                    literal(l2.0 % n, l2.1),
                    g = g % n
                )),
            }
            out.push_str(" }\n");
        }
        let assign = |bits: u64| -> String {
            (0..n)
                .map(|i| format!(" F{i}={};", (bits >> i) & 1 == 1))
                .collect()
        };
        for (k, &(bits, pl)) in self.inits.iter().enumerate() {
            let pl = if k == 0 { 0 } else { pl };
            out.push_str(&format!("init I{k} {{ pl={pl};{} }}\n", assign(bits)));
        }
        out.push_str(&format!("actual {{{} }}\n", assign(self.actual)));
        out
    }
}

fn domain_shape() -> impl Strategy<Value = DomainShape> {
    (1usize..=4).prop_flat_map(|n| {
        let fl = 0..n;
        (
            Just(n),
            prop::collection::vec(
                prop::collection::vec((fl.clone(), any::<u8>(), fl.clone(), fl.clone()), 1..=3),
                1..=2,
            ),
            prop::collection::vec(
                (
                    prop::option::of(fl.clone()),
                    (fl.clone(), any::<bool>()),
                    (fl.clone(), any::<bool>()),
                ),
                1..=2,
            ),
            prop::collection::vec((0u64..(1 << n), 0u64..=4), 1..=4),
            0u64..(1 << n),
        )
            .prop_map(|(fluents, physical, sensing, inits, actual)| DomainShape {
                fluents,
                physical,
                sensing,
                inits,
                actual,
            })
    })
}

fn domain_and_script() -> impl Strategy<Value = (DomainSpec, Vec<(String, Option<bool>)>)> {
    (
        domain_shape(),
        prop::collection::vec((any::<usize>(), any::<bool>()), 0..8),
    )
        .prop_map(|(shape, raw)| {
            let spec = parse_domain(&shape.text()).expect("generated domain parses");
            let names: Vec<String> = spec.action_names().iter().map(|s| s.to_string()).collect();
            let script = raw
                .into_iter()
                .map(|(k, bit)| {
                    let name = names[k % names.len()].clone();
                    let obs = spec.sensing_action(&name).map(|_| bit);
                    (name, obs)
                })
                .collect();
            (spec, script)
        })
}

fn replay(
    spec: &DomainSpec,
    script: &[(String, Option<bool>)],
    options: EngineOptions,
) -> EpistemicTrace {
    let mut trace = EpistemicTrace::new(spec, options).unwrap();
    for (name, obs) in script {
        trace = trace.apply(spec, name, *obs).unwrap();
    }
    trace
}

fn modal_probes(spec: &DomainSpec) -> Vec<Formula> {
    let mut out: Vec<Formula> = default_probes(spec).into_iter().map(|(_, f)| f).collect();
    for f in out.clone().into_iter().take(4) {
        out.push(f.clone().bel());
        out.push(f.clone().prev());
        out.push(f.clone().not().bel().prev().and(f.clone()));
    }
    out
}

fn oracle_for<'a>(
    spec: &'a DomainSpec,
    script: &[(String, Option<bool>)],
    penalty: Penalty,
) -> Oracle<'a> {
    let steps = script
        .iter()
        .map(|(a, o)| OracleStep {
            action: a.clone(),
            observed: *o,
        })
        .collect();
    Oracle::new(spec, steps, penalty)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generated_domains_validate_and_round_trip((spec, _) in domain_and_script()) {
        prop_assert!(validate_domain(&spec).is_valid());
        let text = serialize_domain(&spec);
        prop_assert_eq!(parse_domain(&text).unwrap(), spec);
    }

    #[test]
    fn engine_matches_oracle_in_both_modes((spec, script) in domain_and_script()) {
        for (mode, penalty) in [
            (PenaltyMode::Axiom, Penalty::PlusMPlusOne),
            (PenaltyMode::Compat, Penalty::PlusM),
        ] {
            let trace = replay(&spec, &script, EngineOptions::with_penalty(mode));
            let oracle = oracle_for(&spec, &script, penalty);
            let probes = modal_probes(&spec);
            for g in 0..=script.len() {
                prop_assert_eq!(trace.generation(g).unwrap().pls(), oracle.pls(g));
                for f in &probes {
                    prop_assert_eq!(trace.bel(g, f).unwrap(), oracle.believes(f, g));
                }
            }
        }
    }

    #[test]
    fn baseline_matches_oracle((spec, script) in domain_and_script()) {
        let mut state = BaselineState::new(&spec);
        let oracle = oracle_for(&spec, &script, Penalty::PlusMPlusOne);
        let probes = default_probes(&spec);
        for g in 0..=script.len() {
            if g > 0 {
                let (name, obs) = &script[g - 1];
                state = state.apply(&spec, name, *obs).unwrap();
            }
            let survivors: Vec<usize> = state.survivors().iter().map(|n| n.lineage).collect();
            prop_assert_eq!(&survivors, &oracle.baseline_survivors(g));
            for (_, f) in &probes {
                prop_assert_eq!(state.bel(f).unwrap().believed(), oracle.baseline_believes(f, g));
            }
        }
    }

    #[test]
    fn ranks_stay_normalized_and_width_is_fixed((spec, script) in domain_and_script()) {
        let trace = replay(&spec, &script, EngineOptions::default());
        let width = spec.initial_situations.len();
        for gen in trace.generations() {
            prop_assert_eq!(gen.nodes().len(), width);
            prop_assert_eq!(gen.pls().into_iter().min(), Some(0));
        }
    }

    #[test]
    fn sensing_update_shape((spec, script) in domain_and_script()) {
        let trace = replay(&spec, &script, EngineOptions::default());
        let m = spec.max_initial_pl().unwrap();
        let gens = trace.generations();
        for pair in gens.windows(2) {
            let (prev, gen) = (pair[0], pair[1]);
            let before = prev.pls();
            let after = gen.pls();
            let step = &script[gen.index() - 1];
            match step.1 {
                // Physical actions leave every rank alone.
                None => prop_assert_eq!(before, after),
                Some(obs) => {
                    let matching: Vec<bool> = prev
                        .nodes()
                        .iter()
                        .map(|n| oracle_sf(&spec, &step.0, n.valuation) == obs)
                        .collect();
                    let delta = |i: usize| after[i] as i128 - before[i] as i128;
                    let group = |want: bool| -> Vec<usize> {
                        (0..before.len()).filter(|&i| matching[i] == want).collect()
                    };
                    // Each group moves by one common offset, so order within it is kept.
                    for want in [true, false] {
                        let idx = group(want);
                        if let Some(&first) = idx.first() {
                            prop_assert!(idx.iter().all(|&i| delta(i) == delta(first)));
                        }
                    }
                    let hits = group(true);
                    if !hits.is_empty() {
                        // Some match: a matching node becomes most plausible and every
                        // mismatching node ends strictly above the initial maximum.
                        prop_assert!(hits.iter().any(|&i| after[i] == 0));
                        prop_assert!(group(false).iter().all(|&i| after[i] > m));
                    } else {
                        // No match: the whole generation shifts uniformly.
                        let first = delta(0);
                        prop_assert!((0..before.len()).all(|i| delta(i) == first));
                    }
                }
            }
        }
    }

    #[test]
    fn introspection_and_consistency_everywhere((spec, script) in domain_and_script()) {
        let trace = replay(&spec, &script, EngineOptions::default());
        for g in 0..=script.len() {
            prop_assert!(!trace.bel(g, &Formula::False).unwrap());
            for (_, f) in default_probes(&spec) {
                let b = trace.bel(g, &f).unwrap();
                let introspected = if b { f.clone().bel() } else { f.clone().bel().not() };
                prop_assert!(trace.bel(g, &introspected).unwrap());
            }
        }
    }

    #[test]
    fn runs_are_deterministic((spec, script) in domain_and_script(), seed in any::<u64>()) {
        let steps: Vec<ScriptStep> = script
            .iter()
            .map(|(a, _)| ScriptStep::new(a.clone(), Directive::Channel))
            .collect();
        let options = RunOptions { compare: true, probes: default_probes(&spec), ..RunOptions::default() };
        // Physical preconditions are all true in generated domains, so every script runs.
        let a = run_script(&spec, &steps, seed, &options).unwrap();
        let b = run_script(&spec, &steps, seed, &options).unwrap();
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let oracle_steps: Vec<(String, Option<bool>)> = script
            .iter()
            .zip(&a.observations)
            .map(|((name, _), o)| (name.clone(), o.map(|o| o.observed_bit)))
            .collect();
        let oracle = oracle_for(&spec, &oracle_steps, Penalty::PlusMPlusOne);
        for (g, record) in a.steps.iter().enumerate() {
            prop_assert_eq!(record.detected, oracle.detected(g));
        }
    }
}
