//! Standard-form channel description, the capacity function and the
//! regime partition of the gain space.
//!
//! The channel is
//!
//! ```text
//! Y1 = h11 X1 + h1c Xc + Z1
//! Y2 = h22 X2 + h2c Xc + Z2
//! ```
//!
//! with unit-variance noise and unit input power. Receivers and transmitters
//! can compensate phases, so only gain magnitudes are kept.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{BoundsError, Result};

/// `C(x) = log2(1 + x)`.
///
/// Accepts any `x > -1`; bound expressions can dip below zero before the
/// final clamp.
pub fn cap(x: f64) -> Result<f64> {
    if x.is_nan() || x <= -1.0 {
        return Err(BoundsError::Domain(x));
    }
    Ok(x.ln_1p() / std::f64::consts::LN_2)
}

/// Infallible `C(x)` for arguments already known to be nonnegative.
#[inline]
pub(crate) fn cap0(x: f64) -> f64 {
    debug_assert!(x >= 0.0 || x.is_nan());
    x.ln_1p() / std::f64::consts::LN_2
}

/// The four nonnegative amplitude gains of a standard-form channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub h11: f64,
    pub h22: f64,
    pub h1c: f64,
    pub h2c: f64,
}

impl ChannelParams {
    /// Builds a channel from possibly signed gains, keeping magnitudes.
    pub fn new(g11: f64, g22: f64, g1c: f64, g2c: f64) -> Result<Self> {
        for (name, g) in [("h11", g11), ("h22", g22), ("h1c", g1c), ("h2c", g2c)] {
            if !g.is_finite() {
                return Err(BoundsError::InvalidParameter(format!(
                    "{name} must be finite, got {g}"
                )));
            }
        }
        Ok(Self {
            h11: g11.abs(),
            h22: g22.abs(),
            h1c: g1c.abs(),
            h2c: g2c.abs(),
        })
    }

    /// The channel of the figure-4 example: `h11 = 2 h1c = h2c = h22 / 5 = 1`.
    pub fn fig4() -> Self {
        Self {
            h11: 1.0,
            h22: 5.0,
            h1c: 0.5,
            h2c: 1.0,
        }
    }

    /// Exchanges the roles of the two users.
    pub fn swapped(&self) -> Self {
        Self {
            h11: self.h22,
            h22: self.h11,
            h1c: self.h2c,
            h2c: self.h1c,
        }
    }

    /// Squared gains `(h11², h22², h1c², h2c²)`.
    pub fn snrs(&self) -> (f64, f64, f64, f64) {
        (
            self.h11 * self.h11,
            self.h22 * self.h22,
            self.h1c * self.h1c,
            self.h2c * self.h2c,
        )
    }

    /// Smallest squared gain. Channels with `min_snr() >= 1` are "large SNR".
    pub fn min_snr(&self) -> f64 {
        let (a, b, c, d) = self.snrs();
        a.min(b).min(c).min(d)
    }

    pub fn is_large_snr(&self) -> bool {
        self.min_snr() >= 1.0
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: ChannelParams = serde_json::from_str(s)
            .map_err(|e| BoundsError::InvalidParameter(format!("channel JSON: {e}")))?;
        Self::new(raw.h11, raw.h22, raw.h1c, raw.h2c)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("channel serializes")
    }
}

/// Operating regime of a channel, one per row of the achievability table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RegimeLabel {
    /// Weak cognition at both decoders.
    #[serde(rename = "W")]
    W,
    /// Strong cognition at both decoders, `h11² >= h1c²/h2c²`.
    #[serde(rename = "S1")]
    S1,
    #[serde(rename = "S2")]
    S2,
    /// Mixed: `h11² < h1c²`, `h22² >= h2c²`, `h11² >= h1c²/h2c²`.
    #[serde(rename = "M1")]
    M1,
    #[serde(rename = "M2")]
    M2,
    /// Mixed with the users exchanged.
    #[serde(rename = "M1-swapped")]
    M1Swapped,
    #[serde(rename = "M2-swapped")]
    M2Swapped,
}

impl RegimeLabel {
    pub const ALL: [RegimeLabel; 7] = [
        RegimeLabel::W,
        RegimeLabel::S1,
        RegimeLabel::S2,
        RegimeLabel::M1,
        RegimeLabel::M2,
        RegimeLabel::M1Swapped,
        RegimeLabel::M2Swapped,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeLabel::W => "W",
            RegimeLabel::S1 => "S1",
            RegimeLabel::S2 => "S2",
            RegimeLabel::M1 => "M1",
            RegimeLabel::M2 => "M2",
            RegimeLabel::M1Swapped => "M1-swapped",
            RegimeLabel::M2Swapped => "M2-swapped",
        }
    }

    pub fn is_swapped(&self) -> bool {
        matches!(self, RegimeLabel::M1Swapped | RegimeLabel::M2Swapped)
    }

    /// The label of the same channel seen with users exchanged.
    pub fn mirrored(&self) -> RegimeLabel {
        match self {
            RegimeLabel::M1 => RegimeLabel::M1Swapped,
            RegimeLabel::M2 => RegimeLabel::M2Swapped,
            RegimeLabel::M1Swapped => RegimeLabel::M1,
            RegimeLabel::M2Swapped => RegimeLabel::M2,
            other => *other,
        }
    }
}

impl fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RegimeLabel {
    type Err = BoundsError;

    fn from_str(s: &str) -> Result<Self> {
        RegimeLabel::ALL
            .iter()
            .copied()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| BoundsError::InvalidParameter(format!("unknown regime {s:?}")))
    }
}

/// `h11² >= h1c² / h2c²`, written without the division so `h2c = 0` is
/// handled (the ratio is then infinite unless `h1c = 0`).
fn direct_dominates_ratio(h11sq: f64, h1csq: f64, h2csq: f64) -> bool {
    if h2csq > 0.0 {
        h11sq >= h1csq / h2csq
    } else {
        h1csq == 0.0
    }
}

/// Assigns the regime label. Equalities fall on the weak side of each test.
pub fn classify_regime(ch: &ChannelParams) -> RegimeLabel {
    let (h11sq, h22sq, h1csq, h2csq) = ch.snrs();
    let weak1 = h11sq >= h1csq;
    let weak2 = h22sq >= h2csq;
    match (weak1, weak2) {
        (true, true) => RegimeLabel::W,
        (false, false) => {
            if direct_dominates_ratio(h11sq, h1csq, h2csq) {
                RegimeLabel::S1
            } else {
                RegimeLabel::S2
            }
        }
        (false, true) => {
            if direct_dominates_ratio(h11sq, h1csq, h2csq) {
                RegimeLabel::M1
            } else {
                RegimeLabel::M2
            }
        }
        (true, false) => classify_regime(&ch.swapped()).mirrored(),
    }
}
