//! Statistic kinds: which CUSUM functional and which test family.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The CUSUM functional applied to each segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Functional {
    /// Maximum absolute partial sum (index 1).
    MaxAbs,
    /// Range of the partial sums, max minus min (index 2).
    Range,
    /// Variance-type functional, sum of squared partial sums minus the
    /// squared mean correction (index 3).
    VarType,
}

impl Functional {
    pub const ALL: [Functional; 3] = [Functional::MaxAbs, Functional::Range, Functional::VarType];

    /// Conventional index 1, 2 or 3.
    pub fn index(self) -> usize {
        match self {
            Functional::MaxAbs => 1,
            Functional::Range => 2,
            Functional::VarType => 3,
        }
    }
}

/// The test family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Forward-over-backward ratio statistic.
    V,
    /// Backward-over-forward ratio statistic.
    Z,
    /// max(V, Z), sensitive to regime changes in either direction.
    TMax,
    /// Classical scaled CUSUM statistic (requires a long-run variance
    /// estimate instead of a ratio).
    Classical,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::V, Family::Z, Family::TMax, Family::Classical];

    /// The ratio families, i.e. everything except `Classical`.
    pub const RATIO: [Family; 3] = [Family::V, Family::Z, Family::TMax];

    pub fn is_ratio(self) -> bool {
        !matches!(self, Family::Classical)
    }
}

/// A concrete statistic: family plus functional, 12 kinds in total.
///
/// The canonical short names are `v1..v3`, `z1..z3`, `tmax1..tmax3` and
/// `t1..t3`; these are used on the command line and in persisted tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct StatKind {
    pub family: Family,
    pub functional: Functional,
}

impl StatKind {
    pub const fn new(family: Family, functional: Functional) -> Self {
        Self { family, functional }
    }
}

impl fmt::Display for StatKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.family {
            Family::V => "v",
            Family::Z => "z",
            Family::TMax => "tmax",
            Family::Classical => "t",
        };
        write!(f, "{}{}", prefix, self.functional.index())
    }
}

impl FromStr for StatKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let (family, digit) = if let Some(rest) = s.strip_prefix("tmax") {
            (Family::TMax, rest)
        } else if let Some(rest) = s.strip_prefix('v') {
            (Family::V, rest)
        } else if let Some(rest) = s.strip_prefix('z') {
            (Family::Z, rest)
        } else if let Some(rest) = s.strip_prefix('t') {
            (Family::Classical, rest)
        } else {
            return Err(Error::InvalidKind(s.to_string()));
        };
        let functional = match digit {
            "1" => Functional::MaxAbs,
            "2" => Functional::Range,
            "3" => Functional::VarType,
            _ => return Err(Error::InvalidKind(s.to_string())),
        };
        Ok(StatKind { family, functional })
    }
}

impl TryFrom<String> for StatKind {
    type Error = Error;

    fn try_from(value: String) -> Result<Self, Error> {
        value.parse()
    }
}

impl From<StatKind> for String {
    fn from(kind: StatKind) -> String {
        kind.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_all_twelve_names() {
        let mut seen = Vec::new();
        for family in Family::ALL {
            for functional in Functional::ALL {
                let kind = StatKind::new(family, functional);
                let name = kind.to_string();
                assert_eq!(name.parse::<StatKind>().unwrap(), kind);
                seen.push(name);
            }
        }
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 12);
    }

    #[test]
    fn parses_canonical_names() {
        assert_eq!(
            "v1".parse::<StatKind>().unwrap(),
            StatKind::new(Family::V, Functional::MaxAbs)
        );
        assert_eq!(
            "tmax3".parse::<StatKind>().unwrap(),
            StatKind::new(Family::TMax, Functional::VarType)
        );
        assert_eq!(
            "t2".parse::<StatKind>().unwrap(),
            StatKind::new(Family::Classical, Functional::Range)
        );
        assert!("w1".parse::<StatKind>().is_err());
        assert!("v4".parse::<StatKind>().is_err());
        assert!("tmax".parse::<StatKind>().is_err());
    }
}
