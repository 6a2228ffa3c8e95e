//! Outer bounds on the capacity region.
//!
//! * the correlation bound, a union over input correlations `(ρ1c, ρ2c)`
//!   with an inner minimization over a noise correlation `ρz`;
//! * its piecewise-linear relaxation with constant offsets;
//! * the bound from splitting receiver 1's noise into `σ11²` and `1 - σ11²`
//!   and letting the relay's part of `Y1` be observed separately;
//! * the bound from splitting both receivers' noise and treating the relay
//!   as a degraded broadcast transmitter.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{cap, cap0, ChannelParams};
use crate::error::{BoundsError, Result};
use crate::region::{convexify, union_of_constraints, Grid, RateConstraintSet, Region};
use crate::search::grid_then_golden;

/// Default number of coarse `ρz` samples before golden-section refinement.
pub const DEFAULT_RZ_STEPS: usize = 65;
/// Default `ρ` grid resolution per axis.
pub const DEFAULT_RHO_GRID: usize = 64;
/// Default number of `α` samples in the transformed-channel bounds.
pub const DEFAULT_ALPHA_STEPS: usize = 65;
/// Default noise split for the transformed-channel bounds.
pub const DEFAULT_SIGMA_SQ: f64 = 0.5;
/// Smallest accepted `ρ` grid resolution.
pub const MIN_RHO_GRID: usize = 8;

const RZ_TOL: f64 = 1e-6;
const CAP_FLOOR: f64 = -1.0 + 1e-12;

/// Correlation between each source and the relay input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationPoint {
    pub rho1c: f64,
    pub rho2c: f64,
}

impl CorrelationPoint {
    pub fn new(rho1c: f64, rho2c: f64) -> Result<Self> {
        let ok = (0.0..=1.0).contains(&rho1c)
            && (0.0..=1.0).contains(&rho2c)
            && rho1c * rho1c + rho2c * rho2c <= 1.0 + 1e-12;
        if !ok {
            return Err(BoundsError::InvalidParameter(format!(
                "correlation ({rho1c}, {rho2c}) is not feasible"
            )));
        }
        Ok(Self { rho1c, rho2c })
    }

    pub fn swapped(&self) -> Self {
        Self {
            rho1c: self.rho2c,
            rho2c: self.rho1c,
        }
    }
}

/// Which sum-rate bound of the correlation bound: the one whose leading
/// term is receiver 2's total received power, or its mirror.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumLead {
    Receiver2,
    Receiver1,
}

fn single_rate_bound(h_own: f64, h_relay: f64, rho_own: f64, rho_other: f64) -> f64 {
    cap0(h_own * h_own + h_relay * h_relay * (1.0 - rho_other * rho_other) + 2.0 * rho_own * h_relay * h_own)
}

/// Bracketed term of the receiver-2-led sum bound at a given `ρz`, or `+inf`
/// where it is undefined. Requires `h2c > 0`.
fn rho_z_term(ch: &ChannelParams, c: &CorrelationPoint, rho_z: f64) -> f64 {
    let r = ch.h1c / ch.h2c;
    let d = ch.h2c * ch.h2c * (1.0 - c.rho2c * c.rho2c) + 1.0;
    let e = c.rho1c * ch.h11 * ch.h2c + rho_z - r;
    let x = ch.h11 * ch.h11 + r * r - 2.0 * rho_z * r - e * e / d;
    if x <= CAP_FLOOR || rho_z.abs() >= 1.0 {
        return f64::INFINITY;
    }
    cap(x).unwrap_or(f64::INFINITY) - (1.0 - rho_z * rho_z).log2()
}

fn lead_channel(ch: &ChannelParams, c: &CorrelationPoint, lead: SumLead) -> (ChannelParams, CorrelationPoint) {
    match lead {
        SumLead::Receiver2 => (*ch, *c),
        SumLead::Receiver1 => (ch.swapped(), c.swapped()),
    }
}

/// Sum-rate bound evaluated at a fixed `ρz` (before clamping), or `None`
/// when the relevant cross gain is zero.
pub fn sum_bound_at_rho_z(ch: &ChannelParams, c: &CorrelationPoint, lead: SumLead, rho_z: f64) -> Option<f64> {
    let (ch, c) = lead_channel(ch, c, lead);
    if ch.h2c == 0.0 {
        return None;
    }
    let head = cap0(ch.h22 * ch.h22 + ch.h2c * ch.h2c + 2.0 * c.rho2c * ch.h2c * ch.h22);
    Some(head + rho_z_term(&ch, &c, rho_z))
}

/// Sum-rate bound minimized over `ρz`, with the minimizing `ρz`.
pub fn minimized_sum_bound(
    ch: &ChannelParams,
    c: &CorrelationPoint,
    lead: SumLead,
    rz_steps: usize,
) -> Option<(f64, f64)> {
    let (ch, c) = lead_channel(ch, c, lead);
    if ch.h2c == 0.0 {
        return None;
    }
    let head = cap0(ch.h22 * ch.h22 + ch.h2c * ch.h2c + 2.0 * c.rho2c * ch.h2c * ch.h22);
    let (z, v) = grid_then_golden(|z| rho_z_term(&ch, &c, z), -1.0, 1.0, rz_steps, RZ_TOL);
    Some((z, head + v))
}

/// The four constraints of the correlation bound at one correlation point.
pub fn outer_i_at(ch: &ChannelParams, c: &CorrelationPoint, rz_steps: usize) -> Result<RateConstraintSet> {
    let c = CorrelationPoint::new(c.rho1c, c.rho2c)?;
    if rz_steps < 3 {
        return Err(BoundsError::InvalidParameter(format!(
            "rz_steps = {rz_steps} must be at least 3"
        )));
    }
    let b1 = single_rate_bound(ch.h11, ch.h1c, c.rho1c, c.rho2c);
    let b2 = single_rate_bound(ch.h22, ch.h2c, c.rho2c, c.rho1c);
    let mut cs = RateConstraintSet::new().with(1, 0, b1)?.with(0, 1, b2)?;
    for lead in [SumLead::Receiver2, SumLead::Receiver1] {
        let sum = match minimized_sum_bound(ch, &c, lead, rz_steps) {
            Some((_, v)) if v.is_finite() => v.max(0.0),
            _ => b1 + b2,
        };
        cs.push(1, 1, sum)?;
    }
    Ok(cs)
}

/// Feasible correlation points: the lattice `k / n` on both axes inside the
/// unit quarter disk, plus the disk boundary at every lattice coordinate.
pub fn correlation_grid(n: usize) -> Result<Vec<CorrelationPoint>> {
    if n < MIN_RHO_GRID {
        return Err(BoundsError::InvalidParameter(format!(
            "rho grid {n} is below the minimum {MIN_RHO_GRID}"
        )));
    }
    let mut pts = Vec::new();
    for i in 0..=n {
        let a = i as f64 / n as f64;
        for j in 0..=n {
            let b = j as f64 / n as f64;
            if a * a + b * b <= 1.0 + 1e-12 {
                pts.push(CorrelationPoint { rho1c: a, rho2c: b });
            }
        }
        let edge = (1.0 - a * a).max(0.0).sqrt();
        pts.push(CorrelationPoint { rho1c: a, rho2c: edge });
        pts.push(CorrelationPoint { rho1c: edge, rho2c: a });
    }
    Ok(pts)
}

/// Correlation-bound constraint sets over [`correlation_grid`].
pub fn outer_i_sets(ch: &ChannelParams, rho_grid: usize, rz_steps: usize) -> Result<Vec<RateConstraintSet>> {
    correlation_grid(rho_grid)?
        .par_iter()
        .map(|c| outer_i_at(ch, c, rz_steps))
        .collect()
}

/// Convex hull of the union of correlation-bound polytopes.
///
/// The capacity region is convex, so the hull of an outer bound is still
/// an outer bound.
pub fn outer_i_region(ch: &ChannelParams, rho_grid: usize, rz_steps: usize, grid: Grid) -> Result<Region> {
    region_of(&outer_i_sets(ch, rho_grid, rz_steps)?, grid)
}

/// Piecewise-linear relaxation of the correlation bound.
///
/// When a cross gain vanishes the sum bound whose ratio term would divide
/// by it is replaced by the sum of the single-rate bounds.
pub fn outer_piecewise(ch: &ChannelParams) -> RateConstraintSet {
    let (s11, s22, s1c, s2c) = ch.snrs();
    let r1 = cap0(s11.max(s1c)) + 2.0;
    let r2 = cap0(s22.max(s2c)) + 2.0;
    let sum = |own_lead: f64, cross_lead: f64, own: f64, cross: f64| {
        if cross_lead == 0.0 && cross > 0.0 {
            return r1 + r2;
        }
        let ratio = if cross_lead == 0.0 { 0.0 } else { cross / cross_lead };
        cap0(own_lead.max(cross_lead)) + cap0(own.max(ratio)) + 3.0
    };
    let mut cs = RateConstraintSet::new();
    for (a1, a2, b) in [
        (1, 0, r1),
        (0, 1, r2),
        (1, 1, sum(s22, s2c, s11, s1c)),
        (1, 1, sum(s11, s1c, s22, s2c)),
    ] {
        cs.push(a1, a2, b).expect("piecewise bounds are finite");
    }
    cs
}

/// Noise split and relay power share of the transformed channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformParams {
    pub alpha: f64,
    pub sigma11sq: f64,
    pub sigma22sq: f64,
}

impl TransformParams {
    pub fn new(alpha: f64, sigma11sq: f64, sigma22sq: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(BoundsError::InvalidParameter(format!("alpha = {alpha} is outside [0, 1]")));
        }
        check_sigma(sigma11sq)?;
        check_sigma(sigma22sq)?;
        Ok(Self {
            alpha,
            sigma11sq,
            sigma22sq,
        })
    }

    /// Whether the relay-to-receiver links of the broadcast transform are
    /// ordered as the degraded broadcast argument requires, in the form
    /// `h1c / (1 - σ11²) >= h2c / (1 - σ22²)`.
    pub fn is_degraded_for(&self, ch: &ChannelParams) -> bool {
        ratio(ch.h1c, 1.0 - self.sigma11sq) >= ratio(ch.h2c, 1.0 - self.sigma22sq)
    }
}

fn check_sigma(s: f64) -> Result<()> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(BoundsError::InvalidParameter(format!(
            "noise split {s} is outside (0, 1]"
        )));
    }
    Ok(())
}

/// `num / den` with `0 / 0 = 0` and `x / 0 = inf`.
fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

fn finite_cap(x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(cap0(x))
    } else {
        Err(BoundsError::Unbounded)
    }
}

fn alpha_values(steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(BoundsError::InvalidParameter(format!(
            "alpha_steps = {steps} must be at least 2"
        )));
    }
    Ok((0..steps).map(|k| k as f64 / (steps - 1) as f64).collect())
}

/// Single-rate and sum-rate bounds of the split-receiver-1 transform at one
/// `α`.
///
/// The first term of the sum bound is receiver 2's full received power with
/// the source-relay correlation `√(1-α)`, i.e. it includes the `α h2c²`
/// share of the relay power. Without that share the bound cuts off rate
/// pairs that the relay can achieve by helping user 1 alone.
pub fn cifc_p2p_at(ch: &ChannelParams, sigma11sq: f64, alpha: f64) -> Result<RateConstraintSet> {
    let t = TransformParams::new(alpha, sigma11sq, 1.0)?;
    let (s11, s22, s1c, s2c) = ch.snrs();
    let relay = finite_cap(ratio(t.alpha * s1c, 1.0 - t.sigma11sq))?;
    let direct = cap0(s11 / t.sigma11sq);
    let abar = 1.0 - t.alpha;
    let head = cap0(s2c + s22 + 2.0 * abar.sqrt() * ch.h2c * ch.h22);
    let excess = (relay - cap0(t.alpha * s2c)).max(0.0);
    RateConstraintSet::new()
        .with(1, 0, relay + direct)?
        .with(1, 1, head + excess + direct)
}

/// [`cifc_p2p_at`] over an `α` grid.
pub fn cifc_p2p_sets(ch: &ChannelParams, sigma11sq: f64, alpha_steps: usize) -> Result<Vec<RateConstraintSet>> {
    alpha_values(alpha_steps)?
        .into_iter()
        .map(|a| cifc_p2p_at(ch, sigma11sq, a))
        .collect()
}

/// Convex hull of the union over `α` of the split-receiver-1 bound.
pub fn outer_cifc_p2p(ch: &ChannelParams, sigma11sq: f64, alpha_steps: usize, grid: Grid) -> Result<Region> {
    region_of(&cifc_p2p_sets(ch, sigma11sq, alpha_steps)?, grid)
}

/// Rectangle of the broadcast transform at one parameter point.
pub fn p2p_bc_at(ch: &ChannelParams, t: &TransformParams) -> Result<RateConstraintSet> {
    let t = TransformParams::new(t.alpha, t.sigma11sq, t.sigma22sq)?;
    if !t.is_degraded_for(ch) {
        return Err(BoundsError::InfeasibleTransform(format!(
            "h1c/(1-σ11²) < h2c/(1-σ22²) for σ11² = {}, σ22² = {}",
            t.sigma11sq, t.sigma22sq
        )));
    }
    let (s11, s22, s1c, s2c) = ch.snrs();
    let abar = 1.0 - t.alpha;
    let r1 = finite_cap(ratio(abar * s1c, 1.0 - t.sigma11sq))? + cap0(s11 / t.sigma11sq);
    let r2 = finite_cap(ratio(t.alpha * s2c, abar * s2c + 1.0 - t.sigma22sq))? + cap0(s22 / t.sigma22sq);
    RateConstraintSet::new().with(1, 0, r1)?.with(0, 1, r2)
}

/// [`p2p_bc_at`] over an `α` grid.
pub fn p2p_bc_sets(
    ch: &ChannelParams,
    sigma11sq: f64,
    sigma22sq: f64,
    alpha_steps: usize,
) -> Result<Vec<RateConstraintSet>> {
    alpha_values(alpha_steps)?
        .into_iter()
        .map(|alpha| p2p_bc_at(ch, &TransformParams::new(alpha, sigma11sq, sigma22sq)?))
        .collect()
}

/// Convex hull of the union over `α` of the broadcast-transform rectangles.
pub fn outer_p2p_bc(
    ch: &ChannelParams,
    sigma11sq: f64,
    sigma22sq: f64,
    alpha_steps: usize,
    grid: Grid,
) -> Result<Region> {
    region_of(&p2p_bc_sets(ch, sigma11sq, sigma22sq, alpha_steps)?, grid)
}

/// Applies a bound derived for the user-swapped channel to the original
/// channel by exchanging the rates.
pub fn mirrored(sets: Vec<RateConstraintSet>) -> Vec<RateConstraintSet> {
    sets.iter().map(RateConstraintSet::swapped).collect()
}

/// Convex hull of the union of constraint sets.
pub fn region_of(sets: &[RateConstraintSet], grid: Grid) -> Result<Region> {
    Ok(convexify(&union_of_constraints(sets, grid)?))
}
