//! Text and CSV renderings of core results. JSON goes through serde directly.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::Result;
use noetic_core::dsl::ValidationReport;
use noetic_core::sim::{ExperimentStats, RunTrace, StepRecord, SweepPoint};
use noetic_core::theorems::CheckReport;

/// `{A, !B}` from named truth values in declaration order.
fn valuation_text<'a>(values: impl IntoIterator<Item = (&'a String, &'a bool)>) -> String {
    let parts: Vec<String> = values
        .into_iter()
        .map(|(n, b)| if *b { n.clone() } else { format!("!{n}") })
        .collect();
    format!("{{{}}}", parts.join(", "))
}

fn csv_string(write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    write(&mut w)?;
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn opt_bit(b: Option<bool>) -> String {
    b.map_or(String::new(), |b| u8::from(b).to_string())
}

pub fn validation_text(path: &Path, report: &ValidationReport) -> String {
    let mut out = String::new();
    for v in &report.violations {
        let _ = writeln!(out, "{}: violation: {v}", path.display());
    }
    for w in &report.warnings {
        let _ = writeln!(out, "{}: warning: {w}", path.display());
    }
    if report.is_valid() {
        let _ = writeln!(out, "{}: ok", path.display());
    }
    out
}

pub fn validation_csv(report: &ValidationReport) -> Result<String> {
    csv_string(|w| {
        w.write_record(["severity", "message"])?;
        for v in &report.violations {
            w.write_record(["violation", &v.to_string()])?;
        }
        for v in &report.warnings {
            w.write_record(["warning", &v.to_string()])?;
        }
        Ok(())
    })
}

fn step_heading(step: &StepRecord) -> String {
    let mut s = format!("step {}", step.i);
    match &step.action {
        None => s.push_str(" initial"),
        Some(a) => {
            let _ = write!(s, " {a}");
            if let Some(obs) = step.observed {
                let _ = write!(
                    s,
                    " observed={} ({})",
                    u8::from(obs),
                    if step.accurate == Some(true) {
                        "accurate"
                    } else {
                        "flipped"
                    }
                );
            }
        }
    }
    s
}

fn ranks(step: &StepRecord) -> String {
    step.situations
        .iter()
        .map(|s| format!("{}:{}", s.label, s.pl))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn run_text(trace: &RunTrace) -> String {
    let mut out = format!(
        "seed {} mode {} domain {}\n",
        trace.meta.seed, trace.meta.mode, trace.meta.domain_hash
    );
    for step in &trace.steps {
        let _ = writeln!(out, "{}", step_heading(step));
        let _ = writeln!(out, "  world     {}", valuation_text(&step.world));
        for s in &step.situations {
            let _ = writeln!(
                out,
                "  {:<9} pl={} {}",
                s.label,
                s.pl,
                valuation_text(&s.valuation)
            );
        }
        let believed: Vec<&str> = step
            .beliefs
            .iter()
            .filter(|(_, b)| **b)
            .map(|(n, _)| n.as_str())
            .collect();
        let _ = writeln!(out, "  believes  {}", believed.join(", "));
        let _ = writeln!(out, "  detected  {}", step.detected);
        if step.baseline.is_some() {
            let _ = writeln!(out, "  baseline  {}", status_text(step));
        }
    }
    out
}

fn status_text(step: &StepRecord) -> String {
    match &step.baseline {
        None => String::new(),
        Some(b) => format!("{} [{}]", b.status, b.survivors.join(", ")),
    }
}

pub fn compare_text(trace: &RunTrace) -> String {
    let mut out = format!("seed {} mode {}\n", trace.meta.seed, trace.meta.mode);
    let _ = writeln!(out, "{:<40} {:<24} baseline", "step", "ranked");
    for step in &trace.steps {
        let _ = writeln!(
            out,
            "{:<40} {:<24} {}",
            step_heading(step),
            ranks(step),
            status_text(step)
        );
    }
    out
}

pub fn run_csv(trace: &RunTrace) -> Result<String> {
    csv_string(|w| {
        let probes: Vec<&String> = trace
            .steps
            .first()
            .map(|s| s.beliefs.keys().collect())
            .unwrap_or_default();
        let mut header: Vec<String> = [
            "i", "action", "kind", "observed", "accurate", "world", "ranks", "detected", "baseline",
        ]
        .map(String::from)
        .to_vec();
        header.extend(probes.iter().map(|p| format!("bel:{p}")));
        w.write_record(&header)?;
        for step in &trace.steps {
            let mut row = vec![
                step.i.to_string(),
                step.action.clone().unwrap_or_default(),
                step.kind.to_string(),
                opt_bit(step.observed),
                opt_bit(step.accurate),
                valuation_text(&step.world),
                ranks(step),
                step.detected.to_string(),
                status_text(step),
            ];
            row.extend(probes.iter().map(|p| step.beliefs[*p].to_string()));
            w.write_record(&row)?;
        }
        Ok(())
    })
}

pub fn experiment_text(stats: &ExperimentStats) -> String {
    let mut out = format!(
        "seed {} mode {} cycles {} trials {}\nseq {}\n",
        stats.seed,
        stats.mode,
        stats.cycles,
        stats.trials,
        stats.seq.join(",")
    );
    let _ = writeln!(out, "sensing-sensitive {}", stats.sensing_sensitive);
    let _ = writeln!(out, "bound {:.6} (sigma {:.6})", stats.bound, stats.sigma);
    let _ = writeln!(out, "detection per cycle {:.6}", stats.detection_fraction);
    let _ = writeln!(
        out,
        "detection per step {:.6}",
        stats.step_detection_fraction
    );
    let _ = writeln!(
        out,
        "detection per sensing step {:.6}",
        stats.sensing_step_detection_fraction
    );
    let _ = writeln!(
        out,
        "noisy sensings {} of {}",
        stats.noisy_sensings, stats.total_sensings
    );
    for (probe, agreement) in &stats.probe_agreement {
        let _ = writeln!(out, "agreement {probe} {agreement:.6}");
    }
    let first: Vec<String> = stats
        .first_permanent
        .iter()
        .map(|f| f.map_or("never".into(), |c| c.to_string()))
        .collect();
    let _ = writeln!(out, "permanent detection from cycle {}", first.join(","));
    out
}

pub fn experiment_csv(stats: &ExperimentStats) -> Result<String> {
    csv_string(|w| {
        w.write_record(["cycle", "detections", "trials"])?;
        for (i, d) in stats.cycle_detections.iter().enumerate() {
            w.write_record([(i + 1).to_string(), d.to_string(), stats.trials.to_string()])?;
        }
        Ok(())
    })
}

pub fn sweep_text(sweep: &[SweepPoint]) -> String {
    let mut out = String::from("accuracy bound detection step sensing-step\n");
    for p in sweep {
        let _ = writeln!(
            out,
            "{} {:.6} {:.6} {:.6} {:.6}",
            p.accuracy,
            p.stats.bound,
            p.stats.detection_fraction,
            p.stats.step_detection_fraction,
            p.stats.sensing_step_detection_fraction
        );
    }
    out
}

pub fn sweep_csv(sweep: &[SweepPoint]) -> Result<String> {
    csv_string(|w| {
        w.write_record([
            "accuracy",
            "bound",
            "sigma",
            "detection",
            "step_detection",
            "sensing_step_detection",
        ])?;
        for p in sweep {
            w.write_record([
                p.accuracy.to_string(),
                p.stats.bound.to_string(),
                p.stats.sigma.to_string(),
                p.stats.detection_fraction.to_string(),
                p.stats.step_detection_fraction.to_string(),
                p.stats.sensing_step_detection_fraction.to_string(),
            ])?;
        }
        Ok(())
    })
}

pub fn checks_csv(reports: &[CheckReport]) -> Result<String> {
    csv_string(|w| {
        w.write_record(["check", "passed", "cases", "violations", "bounds"])?;
        for r in reports {
            w.write_record([
                r.check.to_string(),
                r.passed.to_string(),
                r.cases.to_string(),
                r.violations.len().to_string(),
                r.bounds.clone(),
            ])?;
        }
        Ok(())
    })
}
