use serde::Serialize;

use super::SimError;
use crate::dsl::{ActionRef, DomainSpec};
use crate::sitcalc;
use crate::valuation::FluentValuation;

/// Which starting valuations count as candidates for the actual one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SensitivityScope {
    /// Every valuation over the declared fluents.
    #[default]
    AllValuations,
    /// Only the declared initial situations.
    DeclaredInitials,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SensitivityReport {
    pub sensitive: bool,
    /// A candidate other than the actual valuation with the same sensing trace.
    #[serde(skip)]
    pub witness: Option<FluentValuation>,
    pub witness_text: Option<String>,
    pub candidates: usize,
}

/// Sensing values along `seq` when started from `start`, every sensing
/// action assumed accurate.
pub fn sensing_trace(
    spec: &DomainSpec,
    seq: &[String],
    start: FluentValuation,
) -> Result<Vec<bool>, SimError> {
    let mut v = start;
    let mut out = Vec::new();
    for name in seq {
        match spec
            .action(name)
            .ok_or_else(|| SimError::UnknownAction(name.clone()))?
        {
            ActionRef::Physical(a) => v = sitcalc::apply_effects(v, a),
            ActionRef::Sensing(a) => out.push(sitcalc::sf(a, v)?),
        }
    }
    Ok(out)
}

/// Whether accurate execution of `seq` singles out the actual initial
/// valuation among the candidates in `scope`.
pub fn check_sensing_sensitive(
    spec: &DomainSpec,
    seq: &[String],
    scope: SensitivityScope,
) -> Result<SensitivityReport, SimError> {
    let actual = spec.actual_initial;
    let target = sensing_trace(spec, seq, actual)?;
    let candidates: Vec<FluentValuation> = match scope {
        SensitivityScope::AllValuations => FluentValuation::all(spec.fluents.len()).collect(),
        SensitivityScope::DeclaredInitials => spec
            .initial_situations
            .iter()
            .map(|s| s.valuation)
            .collect(),
    };
    let mut witness = None;
    for &candidate in &candidates {
        if candidate != actual && sensing_trace(spec, seq, candidate)? == target {
            witness = Some(candidate);
            break;
        }
    }
    Ok(SensitivityReport {
        sensitive: witness.is_none(),
        witness,
        witness_text: witness.map(|w| w.display(&spec.fluents).to_string()),
        candidates: candidates.len(),
    })
}
