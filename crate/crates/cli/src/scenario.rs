//! Parser for `--scenario` strings and construction of the named fields.

use std::collections::BTreeMap;
use std::sync::Arc;

use anyhow::{bail, Context, Result};

use bubblelab_core::bubble::{
    multi_bubble_scenario, perturbed_bubble_scenario, single_bubble_scenario, BubbleParams,
    Scenario,
};
use bubblelab_core::grid::RadialGrid;

/// A named test field. Grammar: `name` or `name:key=value,key=value`; the
/// bare shorthand `eps=1e-3` means `perturbed:eps=1e-3`.
///
/// * `bubble` — one bubble; keys `kappa`, `z`, `lambda` (defaults 1, 0, 1).
/// * `perturbed` — bubble whose curvature is perturbed by `O(eps)`.
/// * `two-bubble` — two unit-concentration bubbles at `±sep/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScenarioSpec {
    Bubble { kappa: f64, z: f64, lambda: f64 },
    Perturbed { eps: f64 },
    TwoBubble { sep: f64 },
}

impl ScenarioSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let (head, tail) = match text.split_once(':') {
            Some((h, t)) => (h.trim(), t),
            None if text.contains('=') => ("perturbed", text),
            None => (text.trim(), ""),
        };
        let mut kv = BTreeMap::new();
        for part in tail.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) =
                part.split_once('=').with_context(|| format!("expected key=value, got {part:?}"))?;
            let value: f64 =
                v.trim().parse().with_context(|| format!("numeric value for {}", k.trim()))?;
            kv.insert(k.trim().to_string(), value);
        }
        let spec = match head {
            "bubble" => Self::Bubble {
                kappa: kv.remove("kappa").unwrap_or(1.0),
                z: kv.remove("z").unwrap_or(0.0),
                lambda: kv.remove("lambda").unwrap_or(1.0),
            },
            "perturbed" => Self::Perturbed { eps: kv.remove("eps").unwrap_or(1e-2) },
            "two-bubble" => Self::TwoBubble { sep: kv.remove("sep").unwrap_or(20.0) },
            other => bail!("unknown scenario {other:?}; expected bubble, perturbed or two-bubble"),
        };
        if let Some(extra) = kv.keys().next() {
            bail!("scenario key {extra:?} is not understood by {head:?}");
        }
        Ok(spec)
    }

    pub fn build(&self, grid: Arc<RadialGrid>) -> Result<Scenario> {
        Ok(match *self {
            Self::Bubble { kappa, z, lambda } => {
                single_bubble_scenario(grid, BubbleParams { kappa, z, lambda })?
            }
            Self::Perturbed { eps } => perturbed_bubble_scenario(grid, eps)?,
            Self::TwoBubble { sep } => {
                multi_bubble_scenario(grid, &[(-sep / 2.0, 1.0), (sep / 2.0, 1.0)], 512)?
            }
        })
    }
}
