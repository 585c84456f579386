use serde::{Deserialize, Serialize};
use std::fmt;

/// A nonnegative quantity that may be exactly infinite, such as `a/b` with `b = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extended {
    Finite(f64),
    Infinite,
}

impl Extended {
    /// `num / den` for `num, den >= 0`, infinite when `den == 0` and `num > 0`.
    /// `0 / 0` is taken as infinite as well: both uses (a/b and tau/eta) treat a
    /// vanishing denominator as the limiting regime.
    pub fn ratio(num: f64, den: f64) -> Self {
        if den == 0.0 {
            Extended::Infinite
        } else {
            Extended::Finite(num / den)
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Extended::Infinite)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    /// Lossy view, with infinity mapped to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    pub fn parse(text: &str) -> Option<Self> {
        let t = text.trim();
        if matches!(t.to_ascii_lowercase().as_str(), "inf" | "infinity" | "+inf" | "∞") {
            return Some(Extended::Infinite);
        }
        t.parse::<f64>().ok().filter(|v| v.is_finite()).map(Extended::Finite)
    }

    /// Comparison against a finite threshold, exact for the infinite case.
    pub fn le(self, threshold: f64) -> bool {
        match self {
            Extended::Finite(v) => v <= threshold,
            Extended::Infinite => false,
        }
    }
}

impl From<f64> for Extended {
    fn from(v: f64) -> Self {
        if v.is_infinite() && v > 0.0 {
            Extended::Infinite
        } else {
            Extended::Finite(v)
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::Infinite => write!(f, "inf"),
        }
    }
}
