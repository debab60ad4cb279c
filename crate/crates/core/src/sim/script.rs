//! Script files: one step per line, `do <action>` or
//! `sense <action> [accurate|flip|obs=0|obs=1]`. `#` starts a comment.

use std::fmt;

use thiserror::Error;

/// How the observed value of a sensing step is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Directive {
    /// Drawn from the channel with the action's accuracy.
    #[default]
    Channel,
    ForceAccurate,
    ForceFlip,
    ForceObserved(bool),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptStep {
    pub action: String,
    /// Only meaningful for sensing actions.
    pub directive: Directive,
}

impl ScriptStep {
    pub fn new(action: impl Into<String>, directive: Directive) -> Self {
        Self {
            action: action.into(),
            directive,
        }
    }
}

impl fmt::Display for ScriptStep {
    /// Physical steps are printed as `do`; anything with a directive as `sense`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.directive {
            Directive::Channel => write!(f, "do {}", self.action),
            Directive::ForceAccurate => write!(f, "sense {} accurate", self.action),
            Directive::ForceFlip => write!(f, "sense {} flip", self.action),
            Directive::ForceObserved(b) => write!(f, "sense {} obs={}", self.action, b as u8),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ScriptError {
    pub line: usize,
    pub message: String,
}

pub fn parse_script(text: &str) -> Result<Vec<ScriptStep>, ScriptError> {
    let mut steps = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| ScriptError { line, message };
        let words: Vec<&str> = content.split_whitespace().collect();
        match words.as_slice() {
            ["do", action] => steps.push(ScriptStep::new(*action, Directive::Channel)),
            ["sense", action] => steps.push(ScriptStep::new(*action, Directive::Channel)),
            ["sense", action, directive] => {
                let directive = match *directive {
                    "accurate" => Directive::ForceAccurate,
                    "flip" => Directive::ForceFlip,
                    "obs=0" => Directive::ForceObserved(false),
                    "obs=1" => Directive::ForceObserved(true),
                    other => return Err(err(format!("unknown sensing directive `{other}`"))),
                };
                steps.push(ScriptStep::new(*action, directive));
            }
            _ => {
                return Err(err(format!(
                    "expected `do <action>` or `sense <action> [accurate|flip|obs=0|obs=1]`, found `{content}`"
                )))
            }
        }
    }
    Ok(steps)
}
