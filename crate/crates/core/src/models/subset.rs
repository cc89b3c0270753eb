use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::MAX_MODELS;
use crate::error::{Error, Result};

/// A nonempty set of low-fidelity model indices (1-based), stored as a bitmask.
///
/// Ordering is the canonical tie-break order: smaller cardinality first, then
/// lexicographic comparison of the sorted index lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Subset(u32);

impl Subset {
    pub fn from_models(models: &[usize]) -> Result<Self> {
        let mut mask = 0u32;
        for &i in models {
            if i == 0 || i > MAX_MODELS {
                return Err(Error::Config(format!("model index {i} out of range 1..={MAX_MODELS}")));
            }
            mask |= 1 << (i - 1);
        }
        if mask == 0 {
            return Err(Error::Config("empty model subset".into()));
        }
        Ok(Self(mask))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn contains(self, i: usize) -> bool {
        (1..=32).contains(&i) && self.0 & (1 << (i - 1)) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Sorted 1-based model indices.
    pub fn models(self) -> Vec<usize> {
        (1..=32).filter(|&i| self.contains(i)).collect()
    }

    /// Largest model index in the subset.
    pub fn max_model(self) -> usize {
        32 - self.0.leading_zeros() as usize
    }

    /// All `2^n − 1` nonempty subsets of `{1..n}` in canonical order.
    pub fn all_nonempty(n: usize) -> Vec<Subset> {
        let mut all: Vec<Subset> = (1u32..(1u32 << n)).map(Subset).collect();
        all.sort();
        all
    }
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.models().cmp(&other.models()))
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.models().iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl FromStr for Subset {
    type Err = Error;

    /// Accepts `{1,2}`, `1,2` or `1 2`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('{').trim_end_matches('}');
        let models = inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::Config(format!("bad model index `{t}` in subset `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Subset::from_models(&models)
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.models().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let models = Vec::<usize>::deserialize(deserializer)?;
        Subset::from_models(&models).map_err(serde::de::Error::custom)
    }
}
