//! Sampling estimate of the same mutual-information terms.
//!
//! Draws the streams and noises, forms the signals straight from the channel
//! equations and estimates each conditional variance as the residual variance
//! of a least-squares regression of the target on the conditioning signals.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{MiQuery, PowerSplit, Signal};
use crate::channel::ChannelParams;
use crate::error::{BoundsError, Result};

pub const MIN_SAMPLES: usize = 10_000;

fn signal_value(ch: &ChannelParams, s: &PowerSplit, u: &[f64; 4], z: &[f64; 2], sig: Signal) -> f64 {
    let [u1p, u1c, u2p, u2c] = *u;
    let x1 = s.alpha1.sqrt() * u1p + (1.0 - s.alpha1).sqrt() * u1c;
    let x2 = s.alpha2.sqrt() * u2p + (1.0 - s.alpha2).sqrt() * u2c;
    let xc = s.beta1p.sqrt() * u1p + s.beta1c.sqrt() * u1c + s.beta2p.sqrt() * u2p + s.beta2c.sqrt() * u2c;
    match sig {
        Signal::Y1 => ch.h11 * x1 + ch.h1c * xc + z[0],
        Signal::Y2 => ch.h22 * x2 + ch.h2c * xc + z[1],
        Signal::X1 => x1,
        Signal::X2 => x2,
        Signal::Xc => xc,
        Signal::U1p => u1p,
        Signal::U1c => u1c,
        Signal::U2p => u2p,
        Signal::U2c => u2c,
    }
}

/// Residual variance of column 0 regressed on `cols` of a centered
/// second-moment matrix.
fn residual_variance(gram: &DMatrix<f64>, cols: &[usize]) -> Result<f64> {
    let var = gram[(0, 0)];
    if cols.is_empty() {
        return Ok(var);
    }
    let k = cols.len();
    let a = DMatrix::from_fn(k, k, |i, j| gram[(cols[i], cols[j])]);
    let b = DVector::from_fn(k, |i, _| gram[(cols[i], 0)]);
    let scale = a.abs().max().max(f64::MIN_POSITIVE);
    let coef = a
        .svd(true, true)
        .solve(&b, 1e-9 * scale)
        .map_err(|e| BoundsError::Numerical(format!("regression failed: {e}")))?;
    Ok(var - coef.dot(&b))
}

/// Monte Carlo estimate of `mutual_info` for the same query.
pub fn mc_oracle_mi(
    ch: &ChannelParams,
    s: &PowerSplit,
    q: &MiQuery,
    n: usize,
    seed: u64,
) -> Result<f64> {
    if n < MIN_SAMPLES {
        return Err(BoundsError::InvalidParameter(format!(
            "oracle needs at least {MIN_SAMPLES} samples, got {n}"
        )));
    }
    s.validate()?;
    // column 0 is the target, then the conditioning signals, then the arguments
    let given: Vec<Signal> = q.given.iter().collect();
    let args: Vec<Signal> = q.args.iter().collect();
    let mut columns = vec![q.target.signal()];
    columns.extend(&given);
    columns.extend(&args);
    let m = columns.len();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = vec![0.0; m];
    let mut prod = DMatrix::<f64>::zeros(m, m);
    let mut row = vec![0.0; m];
    for _ in 0..n {
        let u: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
        let z: [f64; 2] = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
        for (v, &sig) in row.iter_mut().zip(&columns) {
            *v = signal_value(ch, s, &u, &z, sig);
        }
        for i in 0..m {
            sum[i] += row[i];
            for j in 0..=i {
                prod[(i, j)] += row[i] * row[j];
            }
        }
    }
    let nf = n as f64;
    let gram = DMatrix::from_fn(m, m, |i, j| {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        (prod[(i, j)] - sum[i] * sum[j] / nf) / (nf - 1.0)
    });

    let given_cols: Vec<usize> = (1..1 + given.len()).collect();
    let all_cols: Vec<usize> = (1..m).collect();
    let before = residual_variance(&gram, &given_cols)?;
    let after = residual_variance(&gram, &all_cols)?;
    if !(before > 0.0 && after > 0.0) {
        return Err(BoundsError::Numerical("non-positive sample variance".into()));
    }
    Ok((before / after).log2())
}
