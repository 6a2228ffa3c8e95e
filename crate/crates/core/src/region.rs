//! Two-user rate regions.
//!
//! A region is stored as its upper boundary `R2 = f(R1)` sampled on a uniform
//! `R1` grid. Grid points past the region's `R1` extent hold `-inf`. Regions
//! that came from constraint sets also carry the exact vertices of the
//! generating polytopes, so the convex hull is not limited by the sampling.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{BoundsError, Result};

/// Default number of `R1` samples.
pub const DEFAULT_GRID_POINTS: usize = 512;

/// Absolute slack when deciding whether a grid point lies inside an extent.
const SNAP: f64 = 1e-9;

/// Slack used by [`additive_gap`] for its membership tests.
pub const GAP_MEMBERSHIP_TOL: f64 = 1e-9;

/// Resolution of the bisection in [`additive_gap`].
pub const GAP_RESOLUTION: f64 = 1e-4;

/// An achievable or candidate rate pair in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePair {
    #[serde(rename = "R1")]
    pub r1: f64,
    #[serde(rename = "R2")]
    pub r2: f64,
}

impl RatePair {
    pub fn new(r1: f64, r2: f64) -> Result<Self> {
        if !(r1.is_finite() && r2.is_finite() && r1 >= 0.0 && r2 >= 0.0) {
            return Err(BoundsError::InvalidParameter(format!(
                "rate pair ({r1}, {r2}) must be finite and nonnegative"
            )));
        }
        Ok(Self { r1, r2 })
    }

    /// Moves the pair toward the origin by `g` in both coordinates, stopping
    /// at the axes.
    pub fn shifted_down(&self, g: f64) -> Self {
        Self {
            r1: (self.r1 - g).max(0.0),
            r2: (self.r2 - g).max(0.0),
        }
    }

    pub fn swapped(&self) -> Self {
        Self {
            r1: self.r2,
            r2: self.r1,
        }
    }
}

/// `r1 R1 + r2 R2 <= bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateConstraint {
    pub r1: u8,
    pub r2: u8,
    pub bound: f64,
}

impl RateConstraint {
    pub fn lhs(&self, p: RatePair) -> f64 {
        f64::from(self.r1) * p.r1 + f64::from(self.r2) * p.r2
    }
}

/// A finite list of linear rate constraints; `R1, R2 >= 0` is implicit.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RateConstraintSet {
    constraints: Vec<RateConstraint>,
}

impl RateConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `r1 R1 + r2 R2 <= bound`. Coefficients must be in `{0, 1, 2}`
    /// and not both zero.
    pub fn push(&mut self, r1: u8, r2: u8, bound: f64) -> Result<()> {
        if r1 > 2 || r2 > 2 || (r1 == 0 && r2 == 0) {
            return Err(BoundsError::MalformedConstraints(format!(
                "coefficients ({r1}, {r2}) are not allowed"
            )));
        }
        if !bound.is_finite() {
            return Err(BoundsError::MalformedConstraints(format!(
                "bound {bound} is not finite"
            )));
        }
        self.constraints.push(RateConstraint { r1, r2, bound });
        Ok(())
    }

    pub fn with(mut self, r1: u8, r2: u8, bound: f64) -> Result<Self> {
        self.push(r1, r2, bound)?;
        Ok(self)
    }

    pub fn iter(&self) -> impl Iterator<Item = &RateConstraint> {
        self.constraints.iter()
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Bounds with the given coefficient pair, in insertion order.
    pub fn bounds_of(&self, r1: u8, r2: u8) -> impl Iterator<Item = f64> + '_ {
        self.constraints
            .iter()
            .filter(move |c| c.r1 == r1 && c.r2 == r2)
            .map(|c| c.bound)
    }

    /// True when some constraint limits each rate.
    pub fn is_bounded(&self) -> bool {
        self.constraints.iter().any(|c| c.r1 > 0) && self.constraints.iter().any(|c| c.r2 > 0)
    }

    /// Largest feasible `R1`, or `None` when the set is empty or unbounded
    /// in `R1`. Negative when the polytope is empty.
    pub fn r1_extent(&self) -> Option<f64> {
        let ext = self
            .constraints
            .iter()
            .filter(|c| c.r1 > 0)
            .map(|c| c.bound / f64::from(c.r1))
            .fold(f64::INFINITY, f64::min);
        if !ext.is_finite() {
            return None;
        }
        let r2_only_ok = self.constraints.iter().filter(|c| c.r1 == 0).all(|c| c.bound >= 0.0);
        Some(if r2_only_ok { ext } else { -1.0 })
    }

    /// Largest `R2` compatible with `R1`, ignoring the `R1` extent.
    fn upper_r2(&self, r1: f64) -> f64 {
        self.constraints
            .iter()
            .filter(|c| c.r2 > 0)
            .map(|c| (c.bound - f64::from(c.r1) * r1) / f64::from(c.r2))
            .fold(f64::INFINITY, f64::min)
            .max(0.0)
    }

    pub fn contains(&self, p: RatePair, tol: f64) -> bool {
        self.constraints.iter().all(|c| c.lhs(p) <= c.bound + tol)
    }

    /// Vertices of the polytope `{R >= 0, constraints}`.
    pub fn vertices(&self) -> Vec<RatePair> {
        let mut lines: Vec<(f64, f64, f64)> = self
            .constraints
            .iter()
            .map(|c| (f64::from(c.r1), f64::from(c.r2), c.bound))
            .collect();
        lines.push((1.0, 0.0, 0.0));
        lines.push((0.0, 1.0, 0.0));
        let mut out: Vec<RatePair> = Vec::new();
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let (a, b, c) = lines[i];
                let (d, e, f) = lines[j];
                let det = a * e - b * d;
                if det.abs() < 1e-15 {
                    continue;
                }
                let x = (c * e - b * f) / det;
                let y = (a * f - c * d) / det;
                let scale = 1.0 + c.abs().max(f.abs());
                if x < -SNAP * scale || y < -SNAP * scale {
                    continue;
                }
                let p = RatePair {
                    r1: x.max(0.0),
                    r2: y.max(0.0),
                };
                if self.contains(p, SNAP * scale) && !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// The same constraints with the two rates exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            constraints: self
                .constraints
                .iter()
                .map(|c| RateConstraint {
                    r1: c.r2,
                    r2: c.r1,
                    bound: c.bound,
                })
                .collect(),
        }
    }
}

/// Uniform `R1` grid `0, h, 2h, ..., r1_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    r1_max: f64,
    points: usize,
}

impl Grid {
    pub fn new(r1_max: f64, points: usize) -> Result<Self> {
        if !(r1_max.is_finite() && r1_max >= 0.0) {
            return Err(BoundsError::InvalidParameter(format!(
                "grid extent {r1_max} must be finite and nonnegative"
            )));
        }
        if points < 2 {
            return Err(BoundsError::InvalidParameter(
                "a grid needs at least two points".into(),
            ));
        }
        Ok(Self { r1_max, points })
    }

    /// Smallest grid that covers the `R1` extent of every set.
    pub fn enclosing<'a>(
        sets: impl IntoIterator<Item = &'a RateConstraintSet>,
        points: usize,
    ) -> Result<Self> {
        let mut r1_max: f64 = 0.0;
        for cs in sets {
            let ext = cs.r1_extent().ok_or(BoundsError::Unbounded)?;
            r1_max = r1_max.max(ext);
        }
        Self::new(r1_max, points)
    }

    pub fn r1_max(&self) -> f64 {
        self.r1_max
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn step(&self) -> f64 {
        self.r1_max / (self.points - 1) as f64
    }

    pub fn r1(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            self.r1_max
        } else {
            i as f64 * self.step()
        }
    }

    pub fn r1_values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(|i| self.r1(i))
    }
}

/// Sampled upper boundary of a rate region.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    grid: Grid,
    boundary: Vec<f64>,
    vertices: Vec<RatePair>,
}

impl Region {
    /// A region given directly by boundary samples; `-inf` marks points
    /// outside the region.
    pub fn from_samples(grid: Grid, boundary: Vec<f64>) -> Result<Self> {
        if boundary.len() != grid.points {
            return Err(BoundsError::GridMismatch);
        }
        if boundary.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
            return Err(BoundsError::InvalidParameter(
                "boundary samples must be finite or -inf".into(),
            ));
        }
        Ok(Self {
            grid,
            boundary,
            vertices: Vec::new(),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn boundary(&self) -> &[f64] {
        &self.boundary
    }

    /// Exact vertices of the generating polytopes, when known.
    pub fn vertices(&self) -> &[RatePair] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.boundary.iter().all(|v| *v == f64::NEG_INFINITY)
    }

    /// Boundary samples inside the region as `(R1, R2)`.
    pub fn samples(&self) -> impl Iterator<Item = RatePair> + '_ {
        self.boundary
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .map(|(i, &v)| RatePair {
                r1: self.grid.r1(i),
                r2: v,
            })
    }

    /// Largest sampled `R1` inside the region.
    pub fn max_r1(&self) -> Option<f64> {
        self.samples().last().map(|p| p.r1)
    }

    /// Boundary value at `r1` with linear interpolation between samples,
    /// `None` outside the sampled extent.
    pub fn value_at(&self, r1: f64) -> Option<f64> {
        if !(r1.is_finite() && r1 >= -SNAP) {
            return None;
        }
        let n = self.grid.points;
        let r1 = r1.max(0.0);
        let step = self.grid.step();
        if step == 0.0 || r1 <= SNAP && self.grid.r1_max == 0.0 {
            return (r1 <= SNAP).then_some(self.boundary[0]).filter(|v| v.is_finite());
        }
        if r1 > self.grid.r1_max + SNAP {
            return None;
        }
        let pos = (r1 / step).min((n - 1) as f64);
        let i = pos.floor() as usize;
        let t = pos - i as f64;
        let lo = self.boundary[i];
        if !lo.is_finite() {
            return None;
        }
        if i + 1 >= n || t * step <= SNAP {
            return Some(lo);
        }
        let hi = self.boundary[i + 1];
        if !hi.is_finite() {
            return None;
        }
        Some(lo + t * (hi - lo))
    }

    /// Pointwise check that `other` lies inside `self` on the shared grid.
    pub fn dominates(&self, other: &Region, tol: f64) -> Result<bool> {
        if self.grid != other.grid {
            return Err(BoundsError::GridMismatch);
        }
        Ok(self
            .boundary
            .iter()
            .zip(&other.boundary)
            .all(|(&mine, &theirs)| theirs == f64::NEG_INFINITY || mine + tol >= theirs))
    }

    /// Largest amount by which `other` pokes out of `self`; `+inf` when
    /// `other` has samples where `self` has none.
    pub fn max_excess(&self, other: &Region) -> Result<f64> {
        if self.grid != other.grid {
            return Err(BoundsError::GridMismatch);
        }
        Ok(self
            .boundary
            .iter()
            .zip(&other.boundary)
            .filter(|(_, t)| t.is_finite())
            .map(|(&mine, &theirs)| theirs - mine)
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// Largest discrete second difference of the boundary over consecutive
    /// in-region samples. Nonpositive (up to rounding) for a concave boundary.
    pub fn max_second_difference(&self) -> f64 {
        self.boundary
            .windows(3)
            .filter(|w| w.iter().all(|v| v.is_finite()))
            .map(|w| w[0] - 2.0 * w[1] + w[2])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn swapped_vertices(&self) -> Vec<RatePair> {
        self.vertices.iter().map(RatePair::swapped).collect()
    }

    /// CSV with header `R1,R2` and one in-region boundary sample per row.
    /// A region of zero area yields the header only.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("R1,R2\n");
        let zero_area = self.samples().nth(1).is_none() || self.samples().all(|p| p.r2 == 0.0);
        if zero_area {
            return out;
        }
        for p in self.samples() {
            let _ = writeln!(out, "{},{}", sig9(p.r1), sig9(p.r2));
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> io::Result<()> {
        std::fs::write(path, self.to_csv())
    }
}

/// Formats with 9 significant digits, like C's `%.9g`.
pub fn sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..9).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (8 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Samples the polytope of `cs` on `grid`.
pub fn from_constraints(cs: &RateConstraintSet, grid: Grid) -> Result<Region> {
    if !cs.is_bounded() {
        return Err(BoundsError::Unbounded);
    }
    let extent = cs.r1_extent().ok_or(BoundsError::Unbounded)?;
    if extent < 0.0 {
        return Ok(Region {
            grid,
            boundary: vec![f64::NEG_INFINITY; grid.points],
            vertices: Vec::new(),
        });
    }
    let slack = SNAP * extent.max(1.0);
    let boundary = grid
        .r1_values()
        .map(|r1| {
            if r1 <= extent + slack {
                cs.upper_r2(r1.min(extent))
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    Ok(Region {
        grid,
        boundary,
        vertices: cs.vertices(),
    })
}

/// Pointwise maximum of boundaries on a common grid.
pub fn union_regions(rs: &[Region]) -> Result<Region> {
    let first = rs
        .first()
        .ok_or_else(|| BoundsError::InvalidParameter("union of no regions".into()))?;
    if rs.iter().any(|r| r.grid != first.grid) {
        return Err(BoundsError::GridMismatch);
    }
    let mut boundary = first.boundary.clone();
    let mut vertices = first.vertices.clone();
    for r in &rs[1..] {
        for (b, &v) in boundary.iter_mut().zip(&r.boundary) {
            *b = b.max(v);
        }
        vertices.extend_from_slice(&r.vertices);
    }
    Ok(Region {
        grid: first.grid,
        boundary,
        vertices,
    })
}

/// Pointwise minimum of boundaries on a common grid. Vertex provenance is
/// dropped.
pub fn intersect_regions(rs: &[Region]) -> Result<Region> {
    let first = rs
        .first()
        .ok_or_else(|| BoundsError::InvalidParameter("intersection of no regions".into()))?;
    if rs.iter().any(|r| r.grid != first.grid) {
        return Err(BoundsError::GridMismatch);
    }
    let mut boundary = first.boundary.clone();
    for r in &rs[1..] {
        for (b, &v) in boundary.iter_mut().zip(&r.boundary) {
            *b = b.min(v);
        }
    }
    Ok(Region {
        grid: first.grid,
        boundary,
        vertices: Vec::new(),
    })
}

/// Samples the union of several polytopes on `grid`.
pub fn union_of_constraints(sets: &[RateConstraintSet], grid: Grid) -> Result<Region> {
    let regions = sets
        .iter()
        .map(|cs| from_constraints(cs, grid))
        .collect::<Result<Vec<_>>>()?;
    union_regions(&regions)
}

/// Upper concave envelope of the boundary samples and known vertices.
pub fn convexify(r: &Region) -> Region {
    let mut pts: Vec<(f64, f64)> = r.samples().map(|p| (p.r1, p.r2)).collect();
    pts.extend(r.vertices.iter().map(|p| (p.r1, p.r2)));
    if pts.is_empty() {
        return r.clone();
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
    pts.dedup_by(|b, a| b.0 == a.0);
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let last_x = hull.last().expect("hull is nonempty").0;
    let mut seg = 0;
    let boundary = r
        .grid
        .r1_values()
        .map(|x| {
            if x > last_x + SNAP * last_x.max(1.0) {
                return f64::NEG_INFINITY;
            }
            let x = x.min(last_x);
            while seg + 1 < hull.len() && hull[seg + 1].0 < x {
                seg += 1;
            }
            if seg + 1 == hull.len() || x <= hull[seg].0 {
                return hull[seg].1;
            }
            let (a, b) = (hull[seg], hull[seg + 1]);
            a.1 + (x - a.0) / (b.0 - a.0) * (b.1 - a.1)
        })
        .collect();
    Region {
        grid: r.grid,
        boundary,
        vertices: r.vertices.clone(),
    }
}

/// `p.R2 <= f(p.R1) + tol`, interpolating between samples.
pub fn contains(r: &Region, p: RatePair, tol: f64) -> bool {
    match r.value_at(p.r1) {
        Some(v) => p.r2 <= v + tol,
        None => false,
    }
}

/// Smallest `g >= 0` such that every outer boundary sample moved down by
/// `g` in both rates (stopping at the axes) lies in `inner`.
pub fn additive_gap(outer: &Region, inner: &Region) -> Result<f64> {
    if outer.grid != inner.grid {
        return Err(BoundsError::GridMismatch);
    }
    if inner.is_empty() {
        return Err(BoundsError::EmptyRegion);
    }
    let pts: Vec<RatePair> = outer.samples().collect();
    Ok(gap_for_points(&pts, inner))
}

/// Square-shift gap of a set of points against `inner`.
pub fn gap_for_points(points: &[RatePair], inner: &Region) -> f64 {
    let fits = |g: f64| {
        points
            .iter()
            .all(|p| contains(inner, p.shifted_down(g), GAP_MEMBERSHIP_TOL))
    };
    if fits(0.0) {
        return 0.0;
    }
    let mut hi = points
        .iter()
        .map(|p| p.r1.max(p.r2))
        .fold(0.0_f64, f64::max);
    if !fits(hi) {
        return f64::INFINITY;
    }
    let mut lo = 0.0;
    while hi - lo > GAP_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if fits(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn set(cs: &[(u8, u8, f64)]) -> RateConstraintSet {
        let mut s = RateConstraintSet::new();
        for &(a, b, c) in cs {
            s.push(a, b, c).unwrap();
        }
        s
    }

    fn unit_grid(r1_max: f64) -> Grid {
        Grid::new(r1_max, 9).unwrap()
    }

    #[test]
    fn square_boundary() {
        let r = from_constraints(&set(&[(1, 0, 1.0), (0, 1, 1.0)]), unit_grid(1.0)).unwrap();
        assert!(r.boundary().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn pentagon_values() {
        let cs = set(&[(1, 0, 2.0), (0, 1, 2.0), (1, 1, 3.0)]);
        let r = from_constraints(&cs, unit_grid(2.0)).unwrap();
        assert_abs_diff_eq!(r.value_at(0.5).unwrap(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.value_at(2.0).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.value_at(1.25).unwrap(), 1.75, epsilon = 1e-12);
    }

    #[test]
    fn weighted_sum_constraint() {
        let cs = set(&[(1, 0, 1.0), (0, 1, 1.0), (2, 1, 2.5)]);
        let r = from_constraints(&cs, unit_grid(1.0)).unwrap();
        assert_abs_diff_eq!(r.value_at(1.0).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(r.value_at(0.5).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn points_beyond_extent_are_excluded() {
        let cs = set(&[(1, 0, 1.0), (0, 1, 1.0)]);
        let r = from_constraints(&cs, unit_grid(2.0)).unwrap();
        assert_eq!(r.boundary()[8], f64::NEG_INFINITY);
        assert_eq!(r.boundary()[4], 1.0);
        assert_eq!(r.max_r1(), Some(1.0));
    }

    #[test]
    fn unbounded_sets_rejected() {
        let g = unit_grid(1.0);
        assert_eq!(from_constraints(&set(&[(1, 0, 1.0)]), g), Err(BoundsError::Unbounded));
        assert_eq!(from_constraints(&set(&[(0, 1, 1.0)]), g), Err(BoundsError::Unbounded));
        // a sum bound alone bounds both rates
        assert!(from_constraints(&set(&[(1, 1, 1.0)]), g).is_ok());
    }

    #[test]
    fn bad_coefficients_rejected() {
        let mut s = RateConstraintSet::new();
        assert!(s.push(3, 1, 1.0).is_err());
        assert!(s.push(0, 0, 1.0).is_err());
        assert!(s.push(1, 1, f64::INFINITY).is_err());
    }

    #[test]
    fn vertices_of_pentagon() {
        let mut v = set(&[(1, 0, 2.0), (0, 1, 2.0), (1, 1, 3.0)]).vertices();
        v.sort_by(|a, b| a.r1.total_cmp(&b.r1).then(a.r2.total_cmp(&b.r2)));
        let expected = [(0.0, 0.0), (0.0, 2.0), (1.0, 2.0), (2.0, 0.0), (2.0, 1.0)];
        assert_eq!(v.len(), expected.len());
        for (p, e) in v.iter().zip(expected) {
            assert_abs_diff_eq!(p.r1, e.0, epsilon = 1e-12);
            assert_abs_diff_eq!(p.r2, e.1, epsilon = 1e-12);
        }
    }

    #[test]
    fn union_is_idempotent_and_forms_staircase() {
        let g = Grid::new(1.0, 5).unwrap();
        let a = from_constraints(&set(&[(1, 0, 1.0), (0, 1, 1.0)]), g).unwrap();
        assert_eq!(union_regions(&[a.clone(), a.clone()]).unwrap().boundary(), a.boundary());
        let b = from_constraints(&set(&[(1, 0, 0.5), (0, 1, 2.0)]), g).unwrap();
        let u = union_regions(&[a, b]).unwrap();
        assert_eq!(u.value_at(0.25), Some(2.0));
        assert_eq!(u.value_at(0.75), Some(1.0));
    }

    #[test]
    fn union_requires_common_grid() {
        let a = from_constraints(&set(&[(1, 0, 1.0), (0, 1, 1.0)]), Grid::new(1.0, 5).unwrap()).unwrap();
        let b = from_constraints(&set(&[(1, 0, 1.0), (0, 1, 1.0)]), Grid::new(1.0, 7).unwrap()).unwrap();
        assert_eq!(union_regions(&[a.clone(), b.clone()]), Err(BoundsError::GridMismatch));
        assert_eq!(additive_gap(&a, &b), Err(BoundsError::GridMismatch));
    }

    #[test]
    fn convexify_staircase() {
        let g = Grid::new(1.0, 5).unwrap();
        let a = from_constraints(&set(&[(1, 0, 1.0), (0, 1, 1.0)]), g).unwrap();
        let b = from_constraints(&set(&[(1, 0, 0.5), (0, 1, 2.0)]), g).unwrap();
        let h = convexify(&union_regions(&[a, b]).unwrap());
        // hull of the two rectangles: flat at 2 up to R1 = 0.5, then the
        // segment from (0.5, 2) to (1, 1)
        assert_abs_diff_eq!(h.value_at(0.25).unwrap(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(h.value_at(0.75).unwrap(), 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(h.value_at(1.0).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn convexify_uses_vertices_between_samples() {
        // the corner (0.3, 1) falls between grid points 0.25 and 0.5
        let g = Grid::new(1.0, 5).unwrap();
        let a = from_constraints(&set(&[(1, 0, 0.3), (0, 1, 1.0)]), g).unwrap();
        let b = from_constraints(&set(&[(1, 0, 1.0), (0, 1, 0.1)]), g).unwrap();
        let h = convexify(&union_regions(&[a, b]).unwrap());
        let expected = 1.0 + (0.5 - 0.3) / (1.0 - 0.3) * (0.1 - 1.0);
        assert_abs_diff_eq!(h.value_at(0.5).unwrap(), expected, epsilon = 1e-12);
    }

    #[test]
    fn convexify_keeps_concave_boundary() {
        let g = Grid::new(2.0, 33).unwrap();
        let r = from_constraints(&set(&[(1, 0, 2.0), (0, 1, 2.0), (1, 1, 3.0)]), g).unwrap();
        let h = convexify(&r);
        for (a, b) in r.boundary().iter().zip(h.boundary()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn contains_examples() {
        let r = from_constraints(&set(&[(1, 0, 1.0), (0, 1, 1.0)]), unit_grid(1.0)).unwrap();
        assert!(contains(&r, RatePair::new(0.5, 0.5).unwrap(), 0.0));
        assert!(!contains(&r, RatePair::new(0.5, 1.01).unwrap(), 0.0));
        assert!(contains(&r, RatePair::new(0.5, 1.005).unwrap(), 0.01));
        assert!(!contains(&r, RatePair::new(1.1, 0.0).unwrap(), 0.0));
    }

    #[test]
    fn gap_examples() {
        let g = Grid::new(1.0, 65).unwrap();
        let outer = from_constraints(&set(&[(1, 0, 1.0), (0, 1, 1.0)]), g).unwrap();
        assert_eq!(additive_gap(&outer, &outer).unwrap(), 0.0);
        let inner = from_constraints(&set(&[(1, 0, 0.5), (0, 1, 0.5)]), g).unwrap();
        let gap = additive_gap(&outer, &inner).unwrap();
        assert!((gap - 0.5).abs() <= GAP_RESOLUTION, "{gap}");
    }

    #[test]
    fn gap_needs_nonempty_inner() {
        let g = Grid::new(1.0, 5).unwrap();
        let outer = from_constraints(&set(&[(1, 0, 1.0), (0, 1, 1.0)]), g).unwrap();
        let empty = Region::from_samples(g, vec![f64::NEG_INFINITY; 5]).unwrap();
        assert_eq!(additive_gap(&outer, &empty), Err(BoundsError::EmptyRegion));
    }

    #[test]
    fn zero_width_grid() {
        let g = Grid::new(0.0, 4).unwrap();
        let r = from_constraints(&set(&[(1, 0, 0.0), (0, 1, 0.0)]), g).unwrap();
        assert_eq!(r.to_csv(), "R1,R2\n");
        assert!(contains(&r, RatePair::new(0.0, 0.0).unwrap(), 0.0));
        assert_eq!(additive_gap(&r, &r).unwrap(), 0.0);
    }

    #[test]
    fn sig9_formatting() {
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(1.0), "1");
        assert_eq!(sig9(1.169925001442312), "1.169925");
        assert_eq!(sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(sig9(123456789.4), "123456789");
        assert_eq!(sig9(1.25e-7), "1.25e-07");
        assert_eq!(sig9(4.700439718141092), "4.70043972");
    }

    #[test]
    fn csv_layout() {
        let g = Grid::new(1.0, 3).unwrap();
        let r = from_constraints(&set(&[(1, 0, 1.0), (0, 1, 2.0), (1, 1, 2.5)]), g).unwrap();
        assert_eq!(r.to_csv(), "R1,R2\n0,2\n0.5,2\n1,1.5\n");
    }

    fn arb_set() -> impl Strategy<Value = RateConstraintSet> {
        (0.1f64..4.0, 0.1f64..4.0, 0.1f64..8.0, 0.1f64..10.0).prop_map(|(a, b, s, t)| {
            set(&[(1, 0, a), (0, 1, b), (1, 1, s), (2, 1, t)])
        })
    }

    proptest! {
        #[test]
        fn union_contains_inputs(sets in prop::collection::vec(arb_set(), 1..6)) {
            let grid = Grid::enclosing(&sets, 64).unwrap();
            let regions: Vec<Region> = sets.iter().map(|s| from_constraints(s, grid).unwrap()).collect();
            let u = union_regions(&regions).unwrap();
            for r in &regions {
                prop_assert!(u.dominates(r, 1e-12).unwrap());
            }
        }

        #[test]
        fn convexify_contains_input_and_is_concave(sets in prop::collection::vec(arb_set(), 1..6)) {
            let grid = Grid::enclosing(&sets, 64).unwrap();
            let u = union_of_constraints(&sets, grid).unwrap();
            let h = convexify(&u);
            prop_assert!(h.dominates(&u, 1e-12).unwrap());
            prop_assert!(h.max_second_difference() <= 1e-9);
            let mut prev = f64::INFINITY;
            for p in h.samples() {
                prop_assert!(p.r2 <= prev + 1e-12);
                prev = p.r2;
            }
        }

        #[test]
        fn gap_identity_and_outer_monotonicity(a in arb_set(), b in arb_set(), c in arb_set()) {
            let grid = Grid::enclosing([&a, &b, &c], 64).unwrap();
            let inner = from_constraints(&a, grid).unwrap();
            let small = convexify(&union_of_constraints(&[a.clone(), b.clone()], grid).unwrap());
            let big = convexify(&union_of_constraints(&[a.clone(), b, c], grid).unwrap());
            prop_assert_eq!(additive_gap(&inner, &inner).unwrap(), 0.0);
            let g_small = additive_gap(&small, &inner).unwrap();
            let g_big = additive_gap(&big, &inner).unwrap();
            prop_assert!(g_big + GAP_RESOLUTION >= g_small);
        }
    }
}
