//! Achievable region from rate splitting and superposition coding, with the
//! per-regime operating points used for the constant-gap argument.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{classify_regime, ChannelParams, RegimeLabel};
use crate::error::Result;
use crate::gaussian_mi::{build_system, mutual_info, MiQuery, Output, PowerSplit, Signal, SignalSet, SignalSystem};
use crate::outer::region_of;
use crate::region::{Grid, RateConstraintSet, Region};

use Signal::{U1c, U2c, X1, X2};

fn mi(sys: &SignalSystem, target: Output, args: &[Signal], given: &[Signal]) -> Result<f64> {
    mutual_info(sys, &MiQuery::new(target, SignalSet::of(args), SignalSet::of(given))?)
}

/// The seven rate constraints achieved by one power split, right-hand sides
/// clamped at zero.
pub fn hk_constraints(ch: &ChannelParams, s: &PowerSplit) -> Result<RateConstraintSet> {
    let sys = build_system(ch, s)?;
    let y1 = |a: &[Signal], g: &[Signal]| mi(&sys, Output::Y1, a, g);
    let y2 = |a: &[Signal], g: &[Signal]| mi(&sys, Output::Y2, a, g);

    let r1 = y1(&[X1, U1c], &[U2c])?;
    let r2 = y2(&[X2, U2c], &[U1c])?;
    let s1 = y1(&[X1, U1c, U2c], &[])? + y2(&[X2], &[U1c, U2c])?;
    let s2 = y2(&[X2, U2c, U1c], &[])? + y1(&[X1], &[U1c, U2c])?;
    let s3 = y1(&[X1, U2c], &[U1c])? + y2(&[X2, U1c], &[U2c])?;
    let t1 = y1(&[X1, U2c, U1c], &[])? + y1(&[X1], &[U1c, U2c])? + y2(&[X2, U1c], &[U2c])?;
    let t2 = y2(&[X2, U1c, U2c], &[])? + y2(&[X2], &[U1c, U2c])? + y1(&[X1, U2c], &[U1c])?;

    let mut cs = RateConstraintSet::new();
    for (a1, a2, b) in [
        (1, 0, r1),
        (0, 1, r2),
        (1, 1, s1),
        (1, 1, s2),
        (1, 1, s3),
        (2, 1, t1),
        (1, 2, t2),
    ] {
        cs.push(a1, a2, b.max(0.0))?;
    }
    Ok(cs)
}

/// Pareto corner of a piecewise-linear region: `A` maximizes `R1`, `B`
/// maximizes `R2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Corner {
    A,
    B,
}

impl Corner {
    pub fn other(self) -> Corner {
        match self {
            Corner::A => Corner::B,
            Corner::B => Corner::A,
        }
    }
}

/// Operating point prescribed for a regime and corner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchemePoint {
    pub regime: RegimeLabel,
    pub corner: Corner,
    pub split: PowerSplit,
    pub rationale: &'static str,
}

/// Private power fraction whose received level at gain `h` sits at the
/// noise floor.
fn noise_floor_share(h: f64) -> f64 {
    if h * h <= 1.0 {
        1.0
    } else {
        1.0 / (h * h)
    }
}

fn split(a1: f64, a2: f64, b1p: f64, b1c: f64, b2p: f64, b2c: f64) -> PowerSplit {
    PowerSplit::new(a1, a2, b1p, b1c, b2p, b2c).expect("scheme splits are valid")
}

/// Power split for the regime of `ch` at the requested corner.
///
/// | regime | corner A | corner B |
/// |---|---|---|
/// | W | both private, relay silent | same |
/// | S1 | relay sends user 1's common stream | relay splits user 2's message, private part at the noise floor of receiver 1 |
/// | S2 | relay repeats user 1's private stream | user 1 silent, relay sends user 2's private stream at receiver 1's noise floor and user 1's common remainder |
/// | M1 | relay sends user 1's common stream | both private, relay silent |
/// | M2 | relay sends user 1's common stream | user 2 all common, relay repeats user 1's private stream at receiver 2's noise floor, rest on user 2's common stream |
///
/// Swapped regimes use the mirrored channel, the opposite corner, and swap
/// the split back.
pub fn table1_scheme(ch: &ChannelParams, corner: Corner) -> SchemePoint {
    let regime = classify_regime(ch);
    if regime.is_swapped() {
        let inner = table1_scheme(&ch.swapped(), corner.other());
        return SchemePoint {
            regime,
            corner,
            split: inner.split.swapped(),
            rationale: inner.rationale,
        };
    }
    let (s, rationale) = match (regime, corner) {
        (RegimeLabel::W, _) => (PowerSplit::direct(), "weak cognition: private streams only, relay silent"),
        (RegimeLabel::S1 | RegimeLabel::M1 | RegimeLabel::M2, Corner::A) => {
            (split(1.0, 1.0, 0.0, 1.0, 0.0, 0.0), "relay carries user 1's message as a common stream")
        }
        (RegimeLabel::S1, Corner::B) => {
            let p = noise_floor_share(ch.h1c);
            (
                split(1.0, 1.0, 0.0, 0.0, p, 1.0 - p),
                "relay splits user 2's message, private part at receiver 1's noise floor",
            )
        }
        (RegimeLabel::S2, Corner::A) => {
            (split(1.0, 1.0, 1.0, 0.0, 0.0, 0.0), "relay repeats user 1's private stream coherently")
        }
        (RegimeLabel::S2, Corner::B) => {
            let p = noise_floor_share(ch.h1c);
            (
                split(0.0, 1.0, 0.0, 1.0 - p, p, 0.0),
                "relay sends user 2's private stream at receiver 1's noise floor",
            )
        }
        (RegimeLabel::M1, Corner::B) => (PowerSplit::direct(), "relay silent"),
        (RegimeLabel::M2, Corner::B) => {
            let p = noise_floor_share(ch.h2c);
            (
                split(1.0, 0.0, p, 0.0, 0.0, 1.0 - p),
                "relay repeats user 1's private stream at receiver 2's noise floor",
            )
        }
        (RegimeLabel::M1Swapped | RegimeLabel::M2Swapped, _) => unreachable!("handled above"),
    };
    SchemePoint {
        regime,
        corner,
        split: s,
        rationale,
    }
}

/// Power-split grids for the achievable region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitGrid {
    /// Values taken by each of `α1`, `α2`.
    pub alpha: Vec<f64>,
    /// Values taken by each relay fraction, subject to a total of at most 1.
    pub beta: Vec<f64>,
}

impl Default for SplitGrid {
    fn default() -> Self {
        Self {
            alpha: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            beta: vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0],
        }
    }
}

impl SplitGrid {
    /// Relay fractions that put a cross-received private stream at the noise
    /// floor of either receiver, with their complements.
    pub fn noise_floor(ch: &ChannelParams) -> Self {
        let p1 = noise_floor_share(ch.h1c);
        let p2 = noise_floor_share(ch.h2c);
        Self {
            alpha: vec![0.0, 0.5, 1.0],
            beta: vec![0.0, 1.0, p1, 1.0 - p1, p2, 1.0 - p2],
        }
    }

    pub fn splits(&self) -> Vec<PowerSplit> {
        let mut beta = self.beta.clone();
        beta.sort_by(f64::total_cmp);
        beta.dedup();
        let mut out = Vec::new();
        for &a1 in &self.alpha {
            for &a2 in &self.alpha {
                for &b1p in &beta {
                    for &b1c in &beta {
                        for &b2p in &beta {
                            for &b2c in &beta {
                                if let Ok(s) = PowerSplit::new(a1, a2, b1p, b1c, b2p, b2c) {
                                    out.push(s);
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Every split used for the achievable region of `ch`: both scheme points,
/// the extra splits, the default grid and the noise-floor grid.
pub fn inner_splits(ch: &ChannelParams, extra_splits: &[PowerSplit]) -> Vec<PowerSplit> {
    let mut splits = vec![
        table1_scheme(ch, Corner::A).split,
        table1_scheme(ch, Corner::B).split,
    ];
    splits.extend_from_slice(extra_splits);
    splits.extend(SplitGrid::default().splits());
    splits.extend(SplitGrid::noise_floor(ch).splits());
    let mut unique: Vec<PowerSplit> = Vec::with_capacity(splits.len());
    for s in splits {
        if !unique.contains(&s) {
            unique.push(s);
        }
    }
    unique
}

/// Constraint sets of [`inner_splits`].
pub fn inner_constraint_sets(ch: &ChannelParams, extra_splits: &[PowerSplit]) -> Result<Vec<RateConstraintSet>> {
    inner_splits(ch, extra_splits)
        .par_iter()
        .map(|s| hk_constraints(ch, s))
        .collect()
}

/// Convex hull of the union of achievable polytopes.
pub fn inner_region(ch: &ChannelParams, extra_splits: &[PowerSplit], grid: Grid) -> Result<Region> {
    region_of(&inner_constraint_sets(ch, extra_splits)?, grid)
}
