//! Constant-gap certification of the achievable region against the outer
//! bounds.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{cap0, classify_regime, ChannelParams, RegimeLabel};
use crate::error::{BoundsError, Result};
use crate::gaussian_mi::PowerSplit;
use crate::inner::inner_constraint_sets;
use crate::outer::{
    cifc_p2p_sets, mirrored, outer_i_sets, outer_piecewise, p2p_bc_sets, region_of, TransformParams,
    DEFAULT_ALPHA_STEPS, DEFAULT_RHO_GRID, DEFAULT_RZ_STEPS,
};
use crate::region::{
    additive_gap, from_constraints, gap_for_points, intersect_regions, Grid, RateConstraintSet, RatePair, Region,
    DEFAULT_GRID_POINTS,
};

/// Gap threshold being certified, in bits.
pub const GAP_THRESHOLD: f64 = 3.0;
/// Slack on [`GAP_THRESHOLD`].
pub const GAP_TOL: f64 = 1e-6;

/// Noise splits tried by the transformed-channel bounds.
pub const DEFAULT_SIGMAS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// Pareto corners of a region bounded by single-rate and sum-rate
/// constraints: `A` takes the largest `R1`, `B` the largest `R2`.
pub fn corner_points(cs: &RateConstraintSet) -> Result<(RatePair, RatePair)> {
    if let Some(c) = cs.iter().find(|c| !matches!((c.r1, c.r2), (1, 0) | (0, 1) | (1, 1))) {
        return Err(BoundsError::MalformedConstraints(format!(
            "unexpected coefficients ({}, {})",
            c.r1, c.r2
        )));
    }
    let tightest = |a1, a2| cs.bounds_of(a1, a2).fold(f64::INFINITY, f64::min);
    let (r1, r2, sum) = (tightest(1, 0), tightest(0, 1), tightest(1, 1));
    if !(r1.is_finite() && r2.is_finite() && sum.is_finite()) {
        return Err(BoundsError::MalformedConstraints(
            "need single-rate bounds on both users and a sum-rate bound".into(),
        ));
    }
    let a = RatePair {
        r1: r1.max(0.0),
        r2: (sum - r1).min(r2).max(0.0),
    };
    let b = RatePair {
        r1: (sum - r2).min(r1).max(0.0),
        r2: r2.max(0.0),
    };
    Ok((a, b))
}

/// Regime-specific form of the piecewise-linear outer bound.
pub fn table1_outer_row(ch: &ChannelParams) -> RateConstraintSet {
    let regime = classify_regime(ch);
    if regime.is_swapped() {
        return table1_outer_row(&ch.swapped()).swapped();
    }
    let (s11, s22, s1c, s2c) = ch.snrs();
    let ratio = if s2c > 0.0 { s1c / s2c } else { f64::INFINITY };
    let (r1, r2, sum) = match regime {
        RegimeLabel::W => (cap0(s11) + 2.0, cap0(s22) + 2.0, None),
        RegimeLabel::S1 => (cap0(s1c) + 2.0, cap0(s2c) + 2.0, Some(cap0(s2c) + cap0(s11) + 3.0)),
        RegimeLabel::S2 => (cap0(s1c) + 2.0, cap0(s2c) + 2.0, Some(cap0(s2c) + cap0(ratio) + 3.0)),
        RegimeLabel::M1 => (cap0(s1c) + 2.0, cap0(s22) + 2.0, Some(cap0(s22) + cap0(s11) + 3.0)),
        RegimeLabel::M2 => (cap0(s1c) + 2.0, cap0(s22) + 2.0, Some(cap0(s22) + cap0(ratio) + 3.0)),
        RegimeLabel::M1Swapped | RegimeLabel::M2Swapped => unreachable!("handled above"),
    };
    let mut cs = RateConstraintSet::new();
    cs.push(1, 0, r1).expect("finite bound");
    cs.push(0, 1, r2).expect("finite bound");
    if let Some(s) = sum.filter(|s| s.is_finite()) {
        cs.push(1, 1, s).expect("finite bound");
    }
    cs
}

/// Resolutions and parameter sweeps for certification and bound export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CertifyConfig {
    pub grid_points: usize,
    pub rho_grid: usize,
    pub rz_steps: usize,
    pub alpha_steps: usize,
    pub sigmas: Vec<f64>,
    pub extra_splits: Vec<PowerSplit>,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self {
            grid_points: DEFAULT_GRID_POINTS,
            rho_grid: DEFAULT_RHO_GRID,
            rz_steps: DEFAULT_RZ_STEPS,
            alpha_steps: DEFAULT_ALPHA_STEPS,
            sigmas: DEFAULT_SIGMAS.to_vec(),
            extra_splits: Vec::new(),
        }
    }
}

/// Outcome of certifying one channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub channel: ChannelParams,
    pub regime: RegimeLabel,
    #[serde(rename = "cornerA")]
    pub corner_a: RatePair,
    #[serde(rename = "cornerB")]
    pub corner_b: RatePair,
    #[serde(rename = "achievedA")]
    pub achieved_a: RatePair,
    #[serde(rename = "achievedB")]
    pub achieved_b: RatePair,
    /// Per-rate shortfall of the achieved pair at corner A.
    #[serde(rename = "gapA")]
    pub gap_a: [f64; 2],
    #[serde(rename = "gapB")]
    pub gap_b: [f64; 2],
    #[serde(rename = "regionGap")]
    pub region_gap: f64,
    pub pass: bool,
}

impl GapReport {
    /// Largest of the corner and region gaps.
    pub fn max_gap(&self) -> f64 {
        self.gap_a
            .iter()
            .chain(&self.gap_b)
            .copied()
            .fold(self.region_gap, f64::max)
    }
}

/// A report together with the regions it was computed from.
#[derive(Debug, Clone)]
pub struct Certification {
    pub report: GapReport,
    pub outer: Region,
    pub inner: Region,
}

/// Outer regions of the transformed-channel bounds for every noise split in
/// `cfg`, on both the channel and its user-swapped mirror.
pub fn transformed_outer_regions(ch: &ChannelParams, cfg: &CertifyConfig, grid: Grid) -> Result<Vec<Region>> {
    let swapped = ch.swapped();
    let mut families: Vec<Vec<RateConstraintSet>> = Vec::new();
    for &s in &cfg.sigmas {
        families.push(cifc_p2p_sets(ch, s, cfg.alpha_steps)?);
        families.push(mirrored(cifc_p2p_sets(&swapped, s, cfg.alpha_steps)?));
        for &t in &cfg.sigmas {
            let probe = TransformParams::new(0.0, s, t)?;
            if probe.is_degraded_for(ch) {
                families.push(p2p_bc_sets(ch, s, t, cfg.alpha_steps)?);
            }
            if probe.is_degraded_for(&swapped) {
                families.push(mirrored(p2p_bc_sets(&swapped, s, t, cfg.alpha_steps)?));
            }
        }
    }
    families.par_iter().map(|f| region_of(f, grid)).collect()
}

fn corner_gap(corner: RatePair, inner: &Region) -> (RatePair, [f64; 2]) {
    let g = gap_for_points(&[corner], inner);
    let achieved = corner.shifted_down(g);
    (achieved, [corner.r1 - achieved.r1, corner.r2 - achieved.r2])
}

/// Certifies `ch` and keeps the regions.
///
/// With every squared gain at least 1 the outer region is the piecewise
/// bound and the corners are its Pareto corners. Otherwise the outer region
/// is the piecewise bound intersected with every transformed-channel bound,
/// and the corners are that region's extreme points.
pub fn certify_regions(ch: &ChannelParams, cfg: &CertifyConfig) -> Result<Certification> {
    let inner_sets = inner_constraint_sets(ch, &cfg.extra_splits)?;
    let pw = outer_piecewise(ch);
    let grid = Grid::enclosing(inner_sets.iter().chain([&pw]), cfg.grid_points)?;
    let inner = region_of(&inner_sets, grid)?;
    let piecewise = from_constraints(&pw, grid)?;
    let (outer, corner_a, corner_b) = if ch.is_large_snr() {
        let (a, b) = corner_points(&pw)?;
        (piecewise, a, b)
    } else {
        let mut parts = transformed_outer_regions(ch, cfg, grid)?;
        parts.push(piecewise);
        let outer = intersect_regions(&parts)?;
        let a = outer.samples().last().ok_or(BoundsError::EmptyRegion)?;
        let b = outer.samples().next().ok_or(BoundsError::EmptyRegion)?;
        (outer, a, b)
    };
    let (achieved_a, gap_a) = corner_gap(corner_a, &inner);
    let (achieved_b, gap_b) = corner_gap(corner_b, &inner);
    let region_gap = additive_gap(&outer, &inner)?;
    let mut report = GapReport {
        channel: *ch,
        regime: classify_regime(ch),
        corner_a,
        corner_b,
        achieved_a,
        achieved_b,
        gap_a,
        gap_b,
        region_gap,
        pass: false,
    };
    report.pass = report.max_gap() <= GAP_THRESHOLD + GAP_TOL;
    Ok(Certification { report, outer, inner })
}

pub fn certify_with(ch: &ChannelParams, cfg: &CertifyConfig) -> Result<GapReport> {
    certify_regions(ch, cfg).map(|c| c.report)
}

/// Certifies `ch` at default resolutions.
pub fn certify(ch: &ChannelParams) -> Result<GapReport> {
    certify_with(ch, &CertifyConfig::default())
}

/// Inner region, correlation bound and piecewise bound on one grid, with
/// the gap of the inner region to each.
#[derive(Debug, Clone)]
pub struct BoundComparison {
    pub grid: Grid,
    pub inner: Region,
    pub correlation: Region,
    pub piecewise: Region,
    pub piecewise_set: RateConstraintSet,
    pub gap_correlation: f64,
    pub gap_piecewise: f64,
}

pub fn compare_bounds(ch: &ChannelParams, cfg: &CertifyConfig) -> Result<BoundComparison> {
    let inner_sets = inner_constraint_sets(ch, &cfg.extra_splits)?;
    let corr_sets = outer_i_sets(ch, cfg.rho_grid, cfg.rz_steps)?;
    let pw = outer_piecewise(ch);
    let grid = Grid::enclosing(inner_sets.iter().chain(&corr_sets).chain([&pw]), cfg.grid_points)?;
    let inner = region_of(&inner_sets, grid)?;
    let correlation = region_of(&corr_sets, grid)?;
    let piecewise = from_constraints(&pw, grid)?;
    Ok(BoundComparison {
        grid,
        gap_correlation: additive_gap(&correlation, &inner)?,
        gap_piecewise: additive_gap(&piecewise, &inner)?,
        inner,
        correlation,
        piecewise,
        piecewise_set: pw,
    })
}

/// Random channel sweep parameters. Squared gains are drawn log-uniformly
/// from `[min_snr, max_snr]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepConfig {
    pub count: usize,
    pub min_snr: f64,
    pub max_snr: f64,
    pub seed: u64,
}

impl SweepConfig {
    fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(BoundsError::InvalidParameter("sweep count must be at least 1".into()));
        }
        if !(self.min_snr > 0.0 && self.min_snr <= self.max_snr && self.max_snr.is_finite()) {
            return Err(BoundsError::InvalidParameter(format!(
                "SNR range [{}, {}] must satisfy 0 < min <= max < inf",
                self.min_snr, self.max_snr
            )));
        }
        Ok(())
    }

    /// The channels of the sweep, in order.
    pub fn channels(&self) -> Result<Vec<ChannelParams>> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let (lo, hi) = (self.min_snr.ln(), self.max_snr.ln());
        let mut gain = || (if lo == hi { lo } else { rng.random_range(lo..hi) }).exp().sqrt();
        (0..self.count)
            .map(|_| {
                let (a, b, c, d) = (gain(), gain(), gain(), gain());
                ChannelParams::new(a, b, c, d)
            })
            .collect()
    }
}

/// Aggregate over a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepReport {
    pub config: SweepConfig,
    pub max_gap: f64,
    pub max_gap_by_regime: BTreeMap<String, f64>,
    pub count_by_regime: BTreeMap<String, usize>,
    pub failures: usize,
    pub pass: bool,
    pub reports: Vec<GapReport>,
}

pub fn sweep_with(sc: &SweepConfig, cfg: &CertifyConfig) -> Result<SweepReport> {
    let channels = sc.channels()?;
    let reports = channels
        .par_iter()
        .map(|ch| certify_with(ch, cfg))
        .collect::<Result<Vec<_>>>()?;
    let mut max_gap_by_regime = BTreeMap::new();
    let mut count_by_regime = BTreeMap::new();
    for r in &reports {
        let key = r.regime.as_str().to_string();
        let g = max_gap_by_regime.entry(key.clone()).or_insert(0.0f64);
        *g = g.max(r.max_gap());
        *count_by_regime.entry(key).or_insert(0) += 1;
    }
    let failures = reports.iter().filter(|r| !r.pass).count();
    Ok(SweepReport {
        config: *sc,
        max_gap: reports.iter().map(GapReport::max_gap).fold(0.0, f64::max),
        max_gap_by_regime,
        count_by_regime,
        failures,
        pass: failures == 0,
        reports,
    })
}

/// Certifies a seeded random sweep at default resolutions.
pub fn sweep(sc: &SweepConfig) -> Result<SweepReport> {
    sweep_with(sc, &CertifyConfig::default())
}
