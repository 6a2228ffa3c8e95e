//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use crbounds::gap::{compare_bounds, sweep, CertifyConfig, SweepConfig, GAP_THRESHOLD, GAP_TOL};
use crbounds::gaussian_mi::{build_system, mc_oracle_mi, mutual_info, MiQuery, Output, PowerSplit, Signal, SignalSet};
use crbounds::inner::inner_constraint_sets;
use crbounds::outer::{
    outer_i_at, outer_i_region, outer_piecewise, region_of, CorrelationPoint, DEFAULT_RHO_GRID, DEFAULT_RZ_STEPS,
};
use crbounds::region::{
    additive_gap, contains, convexify, from_constraints, union_regions, Grid, RateConstraintSet, Region,
    DEFAULT_GRID_POINTS, GAP_RESOLUTION,
};
use crbounds::{cap, classify_regime, corner_points, table1_outer_row, ChannelParams, RegimeLabel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn log_uniform_channel(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> ChannelParams {
    let mut g = || rng.random_range(lo.ln()..hi.ln()).exp().sqrt();
    ChannelParams::new(g(), g(), g(), g()).unwrap()
}

fn random_split(rng: &mut ChaCha8Rng) -> PowerSplit {
    let w: [f64; 5] = std::array::from_fn(|_| rng.random_range(0.0..1.0));
    let total: f64 = w.iter().sum();
    PowerSplit::new(
        rng.random_range(0.0..=1.0),
        rng.random_range(0.0..=1.0),
        w[0] / total,
        w[1] / total,
        w[2] / total,
        w[3] / total,
    )
    .unwrap()
}

const INPUTS: [Signal; 4] = [Signal::X1, Signal::X2, Signal::U1c, Signal::U2c];

/// Random disjoint `(args, given)` with nonempty `args`.
fn random_sets(rng: &mut ChaCha8Rng) -> (SignalSet, SignalSet) {
    loop {
        let (mut args, mut given) = (SignalSet::EMPTY, SignalSet::EMPTY);
        for s in INPUTS {
            match rng.random_range(0..3) {
                0 => args = args.with(s),
                1 => given = given.with(s),
                _ => {}
            }
        }
        if !args.is_empty() {
            return (args, given);
        }
    }
}

fn random_output(rng: &mut ChaCha8Rng) -> Output {
    if rng.random_bool(0.5) {
        Output::Y1
    } else {
        Output::Y2
    }
}

fn verdict(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn constant_gap() -> Outcome {
    let sc = SweepConfig {
        count: 500,
        min_snr: 0.01,
        max_snr: 1e4,
        seed: 7,
    };
    let report = sweep(&sc).map_err(|e| e.to_string())?;
    let worst = report
        .reports
        .iter()
        .max_by(|a, b| a.region_gap.total_cmp(&b.region_gap))
        .unwrap();
    let by_regime: Vec<String> = report
        .max_gap_by_regime
        .iter()
        .map(|(k, v)| format!("{k}={v:.3}"))
        .collect();
    let msg = format!(
        "500 channels, max region gap {:.4} bits ({}), max incl. corners {:.4}, per regime {}",
        worst.region_gap,
        worst.regime,
        report.max_gap,
        by_regime.join(" ")
    );
    let ok = report.reports.iter().all(|r| r.region_gap <= GAP_THRESHOLD + GAP_TOL);
    verdict(ok, msg)
}

fn reference_channel() -> Outcome {
    let cmp = compare_bounds(&ChannelParams::fig4(), &CertifyConfig::default()).map_err(|e| e.to_string())?;
    let inner_in_corr = cmp.correlation.dominates(&cmp.inner, 1e-6).unwrap();
    let corr_in_pw = cmp.piecewise.dominates(&cmp.correlation, 1e-6).unwrap();
    let msg = format!(
        "inner in correlation bound: {inner_in_corr}, correlation in piecewise: {corr_in_pw}, \
         gap to piecewise {:.4}, gap to correlation bound {:.4}",
        cmp.gap_piecewise, cmp.gap_correlation
    );
    let ok = inner_in_corr && corr_in_pw && cmp.gap_piecewise <= GAP_THRESHOLD && cmp.gap_correlation < GAP_THRESHOLD;
    verdict(ok, msg)
}

fn zero_relay() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let ch = ChannelParams::new(rng.random_range(0.0..10.0), rng.random_range(0.0..10.0), 0.0, 0.0).unwrap();
        let inner_sets = inner_constraint_sets(&ch, &[]).map_err(|e| e.to_string())?;
        let outer = outer_i_at(&ch, &CorrelationPoint::new(0.0, 0.0).unwrap(), DEFAULT_RZ_STEPS)
            .map_err(|e| e.to_string())?;
        let grid = Grid::enclosing(inner_sets.iter().chain([&outer]), DEFAULT_GRID_POINTS).unwrap();
        let inner = region_of(&inner_sets, grid).unwrap();
        let outer = from_constraints(&outer, grid).unwrap();
        let rect = RateConstraintSet::new()
            .with(1, 0, cap(ch.h11 * ch.h11).unwrap())
            .unwrap()
            .with(0, 1, cap(ch.h22 * ch.h22).unwrap())
            .unwrap();
        let rect = from_constraints(&rect, grid).unwrap();
        for r in [&inner, &outer] {
            for (a, b) in r.boundary().iter().zip(rect.boundary()) {
                let d = if a == b { 0.0 } else { (a - b).abs() };
                worst = worst.max(d);
            }
        }
    }
    verdict(worst <= 1e-9, format!("20 channels, max deviation from the rectangle {worst:.3e} bits"))
}

fn oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let ch = log_uniform_channel(&mut rng, 0.05, 20.0);
        let s = random_split(&mut rng);
        let (args, given) = random_sets(&mut rng);
        let q = MiQuery::new(random_output(&mut rng), args, given).unwrap();
        let exact = mutual_info(&build_system(&ch, &s).unwrap(), &q).map_err(|e| e.to_string())?;
        let est = mc_oracle_mi(&ch, &s, &q, 1_000_000, 100 + k).map_err(|e| e.to_string())?;
        worst = worst.max((exact - est).abs());
    }
    verdict(
        worst <= 0.02,
        format!("20 triples at 10^6 samples, max |closed form - oracle| {worst:.4} bits"),
    )
}

fn hierarchy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..100 {
        let ch = log_uniform_channel(&mut rng, 0.01, 1e4);
        let pw = outer_piecewise(&ch);
        let grid = Grid::enclosing([&pw], DEFAULT_GRID_POINTS).unwrap();
        let corr = outer_i_region(&ch, DEFAULT_RHO_GRID, DEFAULT_RZ_STEPS, grid).map_err(|e| e.to_string())?;
        let pw_region = from_constraints(&pw, grid).unwrap();
        worst = worst.max(pw_region.max_excess(&corr).unwrap());
        if let Some(v) = corr.vertices().iter().find(|v| !pw.contains(**v, 1e-6)) {
            return Err(format!("vertex ({}, {}) of the correlation bound escapes for {ch:?}", v.r1, v.r2));
        }
    }
    verdict(
        worst <= 1e-6,
        format!("100 channels, largest excess of the correlation bound over the piecewise bound {worst:.3e} bits"),
    )
}

fn corners() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut seen = BTreeMap::<&'static str, usize>::new();
    let mut draws = 0;
    while RegimeLabel::ALL.iter().any(|r| seen.get(r.as_str()).copied().unwrap_or(0) < 100) {
        draws += 1;
        if draws > 1_000_000 {
            return Err(format!("could not sample every regime: {seen:?}"));
        }
        let ch = log_uniform_channel(&mut rng, 0.01, 1e4);
        let regime = classify_regime(&ch);
        let n = seen.entry(regime.as_str()).or_insert(0);
        if *n >= 100 {
            continue;
        }
        *n += 1;
        let (a, b) = corner_points(&outer_piecewise(&ch)).map_err(|e| e.to_string())?;
        let row = table1_outer_row(&ch);
        if let Some(p) = [a, b].iter().find(|p| !row.contains(**p, 1e-6)) {
            return Err(format!("corner ({}, {}) outside the {regime} row for {ch:?}", p.r1, p.r2));
        }
    }
    Ok(format!("100 channels in each of {} regimes", RegimeLabel::ALL.len()))
}

fn random_polytope(rng: &mut ChaCha8Rng) -> RateConstraintSet {
    let mut cs = RateConstraintSet::new();
    cs.push(1, 0, rng.random_range(0.1..4.0)).unwrap();
    cs.push(0, 1, rng.random_range(0.1..4.0)).unwrap();
    cs.push(1, 1, rng.random_range(0.1..6.0)).unwrap();
    cs.push(2, 1, rng.random_range(0.1..8.0)).unwrap();
    cs.push(1, 2, rng.random_range(0.1..8.0)).unwrap();
    cs
}

fn properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let mut checks = 0usize;
    for _ in 0..500 {
        let ch = log_uniform_channel(&mut rng, 0.01, 1e4);
        let s = random_split(&mut rng);
        let sys = build_system(&ch, &s).unwrap();
        let t = random_output(&mut rng);
        let (args, given) = random_sets(&mut rng);
        let i = mutual_info(&sys, &MiQuery::new(t, args, given).unwrap()).unwrap();
        if i < -1e-9 {
            return Err(format!("negative mutual information {i}"));
        }
        let head = args.iter().next().unwrap();
        let rest = args.iter().skip(1).fold(SignalSet::EMPTY, SignalSet::with);
        let first = mutual_info(&sys, &MiQuery::new(t, SignalSet::EMPTY.with(head), given).unwrap()).unwrap();
        let second = if rest.is_empty() {
            0.0
        } else {
            mutual_info(&sys, &MiQuery::new(t, rest, given.with(head)).unwrap()).unwrap()
        };
        if (i - first - second).abs() > 1e-9 {
            return Err(format!("chain rule off by {}", i - first - second));
        }
        checks += 2;
    }
    for _ in 0..200 {
        let n = rng.random_range(1..6);
        let sets: Vec<RateConstraintSet> = (0..n).map(|_| random_polytope(&mut rng)).collect();
        let grid = Grid::enclosing(&sets, 128).unwrap();
        let regions: Vec<Region> = sets.iter().map(|c| from_constraints(c, grid).unwrap()).collect();
        let u = union_regions(&regions).unwrap();
        if !regions.iter().all(|r| u.dominates(r, 1e-12).unwrap()) {
            return Err("union does not contain an input".into());
        }
        let h = convexify(&u);
        if !h.dominates(&u, 1e-12).unwrap() || h.max_second_difference() > 1e-9 {
            return Err("convex hull is not a concave superset".into());
        }
        let inner = &regions[0];
        if additive_gap(inner, inner).unwrap() != 0.0 {
            return Err("gap of a region to itself is nonzero".into());
        }
        let g_mid = additive_gap(&u, inner).unwrap();
        let g_big = additive_gap(&h, inner).unwrap();
        if g_big + GAP_RESOLUTION < g_mid {
            return Err("gap is not monotone in the outer region".into());
        }
        if !h.samples().all(|p| contains(&h, p, 1e-12)) {
            return Err("boundary sample not contained".into());
        }
        checks += 5;
    }
    Ok(format!("{checks} property checks"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("1 constant gap over 500 random channels", constant_gap),
        ("2 reference channel containment and gaps", reference_channel),
        ("3 zero-relay exactness", zero_relay),
        ("4 mutual information oracle agreement", oracle),
        ("5 piecewise bound contains correlation bound", hierarchy),
        ("6 corner points inside regime outer rows", corners),
        ("7 property suite", properties),
    ];
    let only: Option<String> = std::env::args().nth(1).filter(|a| !a.starts_with('-'));
    let mut failed = 0;
    for (name, run) in criteria {
        if only.as_deref().is_some_and(|o| !name.starts_with(o)) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS criterion {name}: {msg} [{secs:.1}s]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg} [{secs:.1}s]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
