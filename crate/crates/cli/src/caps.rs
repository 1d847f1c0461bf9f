//! Resource caps, layered: defaults, `RESIP_CAPS`, the task file, `--caps`,
//! then per-task overrides.

use resip_core::classify::ClassifyCaps;
use resip_core::witness::WitnessCaps;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const CAPS_ENV: &str = "RESIP_CAPS";

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search_space: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_subspaces: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_layer: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_basis: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order_cap: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_combine: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_search: Option<u64>,
}

impl CapOverrides {
    /// `other` wins wherever it sets a value.
    pub fn merged(&self, other: &CapOverrides) -> CapOverrides {
        CapOverrides {
            search_space: other.search_space.or(self.search_space),
            max_subspaces: other.max_subspaces.or(self.max_subspaces),
            max_layer: other.max_layer.or(self.max_layer),
            max_rank: other.max_rank.or(self.max_rank),
            max_basis: other.max_basis.or(self.max_basis),
            max_degree: other.max_degree.or(self.max_degree),
            order_cap: other.order_cap.or(self.order_cap),
            max_combine: other.max_combine.or(self.max_combine),
            power_search: other.power_search.or(self.power_search),
        }
    }

    /// Parses `KEY=VAL` items; each item may itself hold several pairs
    /// separated by commas.
    pub fn parse_pairs<S: AsRef<str>>(items: &[S]) -> Result<CapOverrides, String> {
        let mut map = Map::new();
        for item in items {
            for pair in item.as_ref().split([',', ' ']).filter(|s| !s.is_empty()) {
                let (k, v) = pair
                    .split_once('=')
                    .ok_or_else(|| format!("cap `{pair}` is not KEY=VAL"))?;
                let n: u64 = v
                    .trim()
                    .parse()
                    .map_err(|_| format!("cap `{k}` needs a nonnegative integer, got `{v}`"))?;
                map.insert(k.trim().to_string(), Value::from(n));
            }
        }
        serde_json::from_value(Value::Object(map)).map_err(|e| format!("caps: {e}"))
    }

    pub fn from_env() -> Result<CapOverrides, String> {
        match std::env::var(CAPS_ENV) {
            Ok(s) => Self::parse_pairs(&[s]).map_err(|e| format!("{CAPS_ENV}: {e}")),
            Err(_) => Ok(CapOverrides::default()),
        }
    }

    pub fn classify(&self) -> ClassifyCaps {
        let mut c = ClassifyCaps::default();
        if let Some(x) = self.search_space {
            c.search_space = x;
        }
        if let Some(x) = self.max_subspaces {
            c.max_subspaces = x;
        }
        if let Some(x) = self.max_layer {
            c.magnus.max_layer = x;
        }
        if let Some(x) = self.max_rank {
            c.magnus.max_rank = x;
        }
        if let Some(x) = self.max_basis {
            c.magnus.max_basis = x;
        }
        if let Some(x) = self.max_degree {
            c.magnus.max_degree = x;
        }
        if let Some(x) = self.order_cap {
            c.magnus.max_order = x;
        }
        c
    }

    pub fn witness(&self, exploratory: bool) -> WitnessCaps {
        let d = WitnessCaps::default();
        WitnessCaps {
            max_degree: self.max_degree.unwrap_or(d.max_degree),
            order_cap: self.order_cap.unwrap_or(d.order_cap),
            max_combine: self.max_combine.unwrap_or(d.max_combine),
            exploratory,
        }
    }
}
