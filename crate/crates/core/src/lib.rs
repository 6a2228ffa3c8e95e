//! Capacity bounds for two parallel Gaussian point-to-point links assisted
//! by a cognitive relay that knows both messages.
//!
//! The crate evaluates outer bounds, an achievable region from rate
//! splitting, and certifies the additive gap between them.

pub mod channel;
pub mod error;
pub mod gap;
pub mod gaussian_mi;
pub mod inner;
pub mod outer;
pub mod region;
pub mod search;

pub use channel::{cap, classify_regime, ChannelParams, RegimeLabel};
pub use error::{BoundsError, Result};
pub use gap::{certify, certify_with, corner_points, sweep, table1_outer_row, CertifyConfig, GapReport, SweepConfig, SweepReport};
pub use gaussian_mi::{build_system, mc_oracle_mi, mutual_info, MiQuery, Output, PowerSplit, Signal, SignalSet, SignalSystem};
pub use inner::{hk_constraints, inner_region, table1_scheme, Corner, SchemePoint, SplitGrid};
pub use outer::{outer_cifc_p2p, outer_i_at, outer_i_region, outer_p2p_bc, outer_piecewise, CorrelationPoint, TransformParams};
pub use region::{additive_gap, contains, convexify, from_constraints, intersect_regions, union_regions, Grid, RateConstraintSet, RatePair, Region};
