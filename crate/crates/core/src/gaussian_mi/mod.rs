//! Mutual information for the jointly Gaussian system produced by the
//! rate-splitting input
//!
//! ```text
//! X1 = √α1 U1p + √(1-α1) U1c
//! X2 = √α2 U2p + √(1-α2) U2c
//! Xc = √β1p U1p + √β1c U1c + √β2p U2p + √β2c U2c
//! ```
//!
//! with `U1p, U1c, U2p, U2c` i.i.d. unit Gaussians. Every signal is a linear
//! map of the four streams and the two unit noises, so conditional variances
//! are Schur complements of one small covariance matrix and
//! `I(Y; A | C) = log2(Var(Y | C) / Var(Y | A, C))`.

mod oracle;

pub use oracle::mc_oracle_mi;

use nalgebra::{DMatrix, DVector, SMatrix};
use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::error::{BoundsError, Result};

/// Slack allowed on the relay power budget.
const POWER_SLACK: f64 = 1e-12;

/// Eigenvalues below this fraction of the largest are treated as zero when
/// pseudo-inverting a conditioning block.
pub const PINV_RTOL: f64 = 1e-12;

/// Linear power fractions of the Gaussian rate-splitting input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSplit {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1p: f64,
    pub beta1c: f64,
    pub beta2p: f64,
    pub beta2c: f64,
}

impl PowerSplit {
    pub fn new(
        alpha1: f64,
        alpha2: f64,
        beta1p: f64,
        beta1c: f64,
        beta2p: f64,
        beta2c: f64,
    ) -> Result<Self> {
        let s = Self {
            alpha1,
            alpha2,
            beta1p,
            beta1c,
            beta2p,
            beta2c,
        };
        s.validate()?;
        Ok(s)
    }

    /// Both sources send only private streams, relay silent.
    pub fn direct() -> Self {
        Self {
            alpha1: 1.0,
            alpha2: 1.0,
            beta1p: 0.0,
            beta1c: 0.0,
            beta2p: 0.0,
            beta2c: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("beta1p", self.beta1p),
            ("beta1c", self.beta1c),
            ("beta2p", self.beta2p),
            ("beta2c", self.beta2c),
        ];
        for (name, v) in fields {
            if !(0.0..=1.0).contains(&v) {
                return Err(BoundsError::InvalidParameter(format!(
                    "{name} = {v} is outside [0, 1]"
                )));
            }
        }
        let relay = self.relay_power();
        if relay > 1.0 + POWER_SLACK {
            return Err(BoundsError::InvalidParameter(format!(
                "relay power fractions sum to {relay} > 1"
            )));
        }
        Ok(())
    }

    pub fn relay_power(&self) -> f64 {
        self.beta1p + self.beta1c + self.beta2p + self.beta2c
    }

    /// The same split with users exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            alpha1: self.alpha2,
            alpha2: self.alpha1,
            beta1p: self.beta2p,
            beta1c: self.beta2c,
            beta2p: self.beta1p,
            beta2c: self.beta1c,
        }
    }
}

/// Named scalar signals of the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Signal {
    Y1,
    Y2,
    X1,
    X2,
    Xc,
    U1p,
    U1c,
    U2p,
    U2c,
}

impl Signal {
    pub const ALL: [Signal; 9] = [
        Signal::Y1,
        Signal::Y2,
        Signal::X1,
        Signal::X2,
        Signal::Xc,
        Signal::U1p,
        Signal::U1c,
        Signal::U2p,
        Signal::U2c,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_output(self) -> bool {
        matches!(self, Signal::Y1 | Signal::Y2)
    }
}

/// A receiver output, the target of a mutual-information query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Output {
    Y1,
    Y2,
}

impl Output {
    pub fn signal(self) -> Signal {
        match self {
            Output::Y1 => Signal::Y1,
            Output::Y2 => Signal::Y2,
        }
    }
}

/// Small set of signals stored as a bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SignalSet(u16);

impl SignalSet {
    pub const EMPTY: SignalSet = SignalSet(0);

    pub fn of(signals: &[Signal]) -> Self {
        signals.iter().fold(Self::EMPTY, |s, &x| s.with(x))
    }

    pub fn with(self, s: Signal) -> Self {
        SignalSet(self.0 | (1 << s.index()))
    }

    pub fn contains(self, s: Signal) -> bool {
        self.0 & (1 << s.index()) != 0
    }

    pub fn union(self, other: SignalSet) -> Self {
        SignalSet(self.0 | other.0)
    }

    pub fn is_disjoint(self, other: SignalSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = Signal> {
        Signal::ALL.into_iter().filter(move |s| self.contains(*s))
    }
}

impl<const N: usize> From<[Signal; N]> for SignalSet {
    fn from(v: [Signal; N]) -> Self {
        SignalSet::of(&v)
    }
}

/// `I(target; args | given)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MiQuery {
    pub target: Output,
    pub args: SignalSet,
    pub given: SignalSet,
}

impl MiQuery {
    /// Argument and conditioning sets must be disjoint sets of input-side
    /// signals (X's and U's).
    pub fn new(target: Output, args: impl Into<SignalSet>, given: impl Into<SignalSet>) -> Result<Self> {
        let (args, given) = (args.into(), given.into());
        if !args.is_disjoint(given) {
            return Err(BoundsError::InvalidParameter(
                "argument and conditioning sets overlap".into(),
            ));
        }
        if args.union(given).iter().any(Signal::is_output) {
            return Err(BoundsError::InvalidParameter(
                "queries may only involve input-side signals".into(),
            ));
        }
        Ok(Self {
            target,
            args,
            given,
        })
    }
}

/// Number of independent unit sources: U1p, U1c, U2p, U2c, Z1, Z2.
pub const SOURCES: usize = 6;

/// Coefficients of every signal on the independent sources, and the
/// resulting covariance.
#[derive(Debug, Clone)]
pub struct SignalSystem {
    coeffs: SMatrix<f64, 9, SOURCES>,
    cov: SMatrix<f64, 9, 9>,
}

/// Builds the linear system for a channel and split.
pub fn build_system(ch: &ChannelParams, s: &PowerSplit) -> Result<SignalSystem> {
    s.validate()?;
    let mut a = SMatrix::<f64, 9, SOURCES>::zeros();
    let x1 = [s.alpha1.sqrt(), (1.0 - s.alpha1).sqrt(), 0.0, 0.0];
    let x2 = [0.0, 0.0, s.alpha2.sqrt(), (1.0 - s.alpha2).sqrt()];
    let xc = [s.beta1p.sqrt(), s.beta1c.sqrt(), s.beta2p.sqrt(), s.beta2c.sqrt()];
    for k in 0..4 {
        a[(Signal::X1.index(), k)] = x1[k];
        a[(Signal::X2.index(), k)] = x2[k];
        a[(Signal::Xc.index(), k)] = xc[k];
        a[(Signal::Y1.index(), k)] = ch.h11 * x1[k] + ch.h1c * xc[k];
        a[(Signal::Y2.index(), k)] = ch.h22 * x2[k] + ch.h2c * xc[k];
    }
    a[(Signal::Y1.index(), 4)] = 1.0;
    a[(Signal::Y2.index(), 5)] = 1.0;
    a[(Signal::U1p.index(), 0)] = 1.0;
    a[(Signal::U1c.index(), 1)] = 1.0;
    a[(Signal::U2p.index(), 2)] = 1.0;
    a[(Signal::U2c.index(), 3)] = 1.0;
    let cov = a * a.transpose();
    Ok(SignalSystem { coeffs: a, cov })
}

impl SignalSystem {
    pub fn covariance(&self) -> &SMatrix<f64, 9, 9> {
        &self.cov
    }

    pub fn cov(&self, a: Signal, b: Signal) -> f64 {
        self.cov[(a.index(), b.index())]
    }

    /// Coefficients of `s` on `(U1p, U1c, U2p, U2c, Z1, Z2)`.
    pub fn coefficients(&self, s: Signal) -> [f64; SOURCES] {
        let row = self.coeffs.row(s.index());
        std::array::from_fn(|k| row[k])
    }

    /// `Var(target | given)` by Schur complement with a pseudo-inverse.
    pub fn conditional_variance(&self, target: Signal, given: SignalSet) -> Result<f64> {
        let t = target.index();
        let var = self.cov[(t, t)];
        if given.is_empty() {
            return Ok(var);
        }
        let idx: Vec<usize> = given.iter().map(Signal::index).collect();
        let k = idx.len();
        let block = DMatrix::from_fn(k, k, |i, j| self.cov[(idx[i], idx[j])]);
        let cross = DVector::from_fn(k, |i, _| self.cov[(idx[i], t)]);
        let eig = block.symmetric_eigen();
        let top = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
        let mut explained = 0.0;
        if top > 0.0 {
            for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
                if lambda > PINV_RTOL * top {
                    let proj = eig.eigenvectors.column(j).dot(&cross);
                    explained += proj * proj / lambda;
                }
            }
        }
        let cv = var - explained;
        if !cv.is_finite() || cv <= 0.0 {
            return Err(BoundsError::Numerical(format!(
                "conditional variance {cv} of {target:?} is not positive"
            )));
        }
        Ok(cv)
    }
}

/// `I(Y; A | C)` in bits.
pub fn mutual_info(sys: &SignalSystem, q: &MiQuery) -> Result<f64> {
    let y = q.target.signal();
    let before = sys.conditional_variance(y, q.given)?;
    let after = sys.conditional_variance(y, q.given.union(q.args))?;
    Ok((before / after).log2())
}
