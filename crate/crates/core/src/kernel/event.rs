use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Decides when tree repair pauses so the current candidate subpath can be evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Event {
    /// Pause only once the target is reached (infinite lookahead).
    #[default]
    ShortestPath,
    /// Pause once the candidate subpath holds this many unevaluated edges.
    ConstantDepth(u32),
}

impl Event {
    pub fn constant_depth(alpha: u32) -> Result<Self> {
        let ev = Event::ConstantDepth(alpha);
        ev.validate()?;
        Ok(ev)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Event::ConstantDepth(0) => Err(Error::InvalidParameter("constant-depth lookahead must be >= 1".into())),
            _ => Ok(()),
        }
    }

    /// Short label used in CSV planner names (`sp` or `cd<α>`).
    pub fn label(&self) -> String {
        match self {
            Event::ShortestPath => "sp".into(),
            Event::ConstantDepth(a) => format!("cd{a}"),
        }
    }
}

impl std::str::FromStr for Event {
    type Err = Error;

    /// Accepts `sp` (or `inf`) and `cd<α>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sp" | "inf" => Ok(Event::ShortestPath),
            _ => {
                let alpha = s
                    .strip_prefix("cd")
                    .and_then(|a| a.parse().ok())
                    .ok_or_else(|| Error::Usage(format!("unknown event {s:?} (expected sp or cd<depth>)")))?;
                Event::constant_depth(alpha)
            }
        }
    }
}

