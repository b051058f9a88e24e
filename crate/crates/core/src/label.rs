use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Seven-point MBFC bias annotation, as found in the channel manifest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RawMbfcLabel {
    ExtremeLeft,
    Left,
    CenterLeft,
    Center,
    CenterRight,
    Right,
    ExtremeRight,
}

impl RawMbfcLabel {
    pub const ALL: [RawMbfcLabel; 7] = [
        RawMbfcLabel::ExtremeLeft,
        RawMbfcLabel::Left,
        RawMbfcLabel::CenterLeft,
        RawMbfcLabel::Center,
        RawMbfcLabel::CenterRight,
        RawMbfcLabel::Right,
        RawMbfcLabel::ExtremeRight,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RawMbfcLabel::ExtremeLeft => "extreme-left",
            RawMbfcLabel::Left => "left",
            RawMbfcLabel::CenterLeft => "center-left",
            RawMbfcLabel::Center => "center",
            RawMbfcLabel::CenterRight => "center-right",
            RawMbfcLabel::Right => "right",
            RawMbfcLabel::ExtremeRight => "extreme-right",
        }
    }

    /// Collapse onto the 3-way target. Extremes merge with their polarity;
    /// the two "center-*" labels are ambiguous and are excluded (`None`).
    pub fn normalize(self) -> Option<BiasLabel> {
        match self {
            RawMbfcLabel::ExtremeLeft | RawMbfcLabel::Left => Some(BiasLabel::Left),
            RawMbfcLabel::Center => Some(BiasLabel::Center),
            RawMbfcLabel::Right | RawMbfcLabel::ExtremeRight => Some(BiasLabel::Right),
            RawMbfcLabel::CenterLeft | RawMbfcLabel::CenterRight => None,
        }
    }
}

/// Free-function form of [`RawMbfcLabel::normalize`].
pub fn normalize_label(raw: RawMbfcLabel) -> Option<BiasLabel> {
    raw.normalize()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown MBFC label {0:?}")]
pub struct UnknownLabel(pub String);

impl FromStr for RawMbfcLabel {
    type Err = UnknownLabel;

    /// Case-insensitive; spaces and underscores are read as hyphens, and
    /// MBFC's own "left-center" / "right-center" spellings are accepted.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .trim()
            .chars()
            .map(|c| match c {
                ' ' | '_' => '-',
                c => c.to_ascii_lowercase(),
            })
            .collect();
        let label = match key.as_str() {
            "extreme-left" | "far-left" => RawMbfcLabel::ExtremeLeft,
            "left" => RawMbfcLabel::Left,
            "center-left" | "left-center" => RawMbfcLabel::CenterLeft,
            "center" | "least-biased" => RawMbfcLabel::Center,
            "center-right" | "right-center" => RawMbfcLabel::CenterRight,
            "right" => RawMbfcLabel::Right,
            "extreme-right" | "far-right" => RawMbfcLabel::ExtremeRight,
            _ => return Err(UnknownLabel(s.to_string())),
        };
        Ok(label)
    }
}

impl fmt::Display for RawMbfcLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The 3-way prediction target. The integer codes are fixed: argmax ties
/// resolve toward the lowest code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BiasLabel {
    Left = 0,
    Center = 1,
    Right = 2,
}

impl BiasLabel {
    pub const ALL: [BiasLabel; 3] = [BiasLabel::Left, BiasLabel::Center, BiasLabel::Right];
    pub const COUNT: usize = 3;

    pub fn code(self) -> usize {
        self as usize
    }

    pub fn from_code(code: usize) -> Option<BiasLabel> {
        BiasLabel::ALL.get(code).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BiasLabel::Left => "left",
            BiasLabel::Center => "center",
            BiasLabel::Right => "right",
        }
    }
}

impl fmt::Display for BiasLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// A probability distribution over [`BiasLabel`] codes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Posterior(pub [f64; 3]);

impl Posterior {
    pub const UNIFORM: Posterior = Posterior([1.0 / 3.0; 3]);

    /// Rescale non-negative masses so they sum to one. Returns `None` when
    /// the total is zero or not finite.
    pub fn from_masses(masses: [f64; 3]) -> Option<Posterior> {
        let total: f64 = masses.iter().sum();
        if !(total.is_finite() && total > 0.0) || masses.iter().any(|&m| m < 0.0) {
            return None;
        }
        Some(Posterior(masses.map(|m| m / total)))
    }

    pub fn one_hot(label: BiasLabel) -> Posterior {
        let mut p = [0.0; 3];
        p[label.code()] = 1.0;
        Posterior(p)
    }

    pub fn probabilities(&self) -> &[f64; 3] {
        &self.0
    }

    pub fn prob(&self, label: BiasLabel) -> f64 {
        self.0[label.code()]
    }

    pub fn predicted(&self) -> BiasLabel {
        BiasLabel::ALL[argmax(&self.0)]
    }
}
