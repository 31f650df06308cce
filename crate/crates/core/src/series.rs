//! Observation series and the trimming fraction for the candidate range.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered sequence of real observations `x_1..x_n`.
///
/// Invariants enforced at construction: `n >= 2` and every value finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    values: Vec<f64>,
}

impl Series {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooShort(values.len()));
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    position: i + 1,
                    value: v,
                });
            }
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The same observations in reverse order.
    pub fn reversed(&self) -> Series {
        let mut values = self.values.clone();
        values.reverse();
        Series { values }
    }
}

/// Fraction `delta in (0, 1/2)` trimming the candidate change points to
/// `n*delta <= k <= n - n*delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct TrimFraction(f64);

impl TrimFraction {
    pub fn new(delta: f64) -> Result<Self> {
        if delta.is_finite() && delta > 0.0 && delta < 0.5 {
            Ok(Self(delta))
        } else {
            Err(Error::BadTrimFraction(delta))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for TrimFraction {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<TrimFraction> for f64 {
    fn from(delta: TrimFraction) -> f64 {
        delta.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_short_series() {
        assert!(matches!(Series::new(vec![1.0]), Err(Error::TooShort(1))));
        assert!(matches!(Series::new(vec![]), Err(Error::TooShort(0))));
        assert!(Series::new(vec![1.0, 2.0]).is_ok());
    }

    #[test]
    fn rejects_non_finite_values() {
        let err = Series::new(vec![1.0, f64::NAN, 3.0]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { position: 2, .. }));
        let err = Series::new(vec![1.0, 2.0, f64::INFINITY]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { position: 3, .. }));
    }

    #[test]
    fn reversed_round_trips() {
        let x = Series::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(x.reversed().values(), &[3.0, 2.0, 1.0]);
        assert_eq!(x.reversed().reversed(), x);
    }

    #[test]
    fn trim_fraction_bounds() {
        assert!(TrimFraction::new(0.2).is_ok());
        assert!(TrimFraction::new(0.499).is_ok());
        for bad in [0.0, 0.5, 0.6, -0.1, f64::NAN] {
            assert!(TrimFraction::new(bad).is_err(), "{bad} should be rejected");
        }
    }
}
