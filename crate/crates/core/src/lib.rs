//! Belief change with noisy sensing over finite propositional action theories.
//!
//! The crate is organised bottom-up:
//!
//! - [`dsl`]: the domain-description language (parse, validate, serialize);
//! - [`sitcalc`]: progression, sensing outcomes and formula evaluation;
//! - [`engine`]: the ranked belief engine and the discard-based baseline;
//! - [`sim`]: the actual world, the noisy sensing channel, scripted runs and
//!   convergence experiments;
//! - [`theorems`]: executable property checks over bounded enumerations.

pub mod dsl;
pub mod engine;
pub mod formula;
pub mod sim;
pub mod sitcalc;
pub mod theorems;
pub mod valuation;

pub use dsl::{parse_domain, parse_formula, serialize_domain, validate_domain, DomainSpec};
pub use engine::{EngineOptions, EpistemicTrace, PenaltyMode};
pub use formula::Formula;
pub use valuation::{Fluent, FluentValuation};
