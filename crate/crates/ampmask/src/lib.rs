//! Amplification–masking tradeoffs for two-encoder lossless source networks.
//!
//! A memoryless pair source emits `(X, Y)`. Encoder 1 observes `X`, encoder 2
//! observes `Y`, and each sends a rate-limited message to a common decoder.
//! The decoder's output can *amplify* information about `X` (reveal at least
//! `delta_a` bits per symbol) while *masking* `Y` (leak at most `delta_m` bits
//! per symbol), or any of the three other pairings of goals across the two
//! sources.
//!
//! The crate computes the exact single-letter rate regions for these goals by
//! optimizing over auxiliary channels, and checks them from two independent
//! directions:
//!
//! * [`oracle`] exhaustively enumerates deterministic block encoders at small
//!   blocklengths, giving an unconditional inner bound on what any code can do.
//! * [`sim`] builds explicit random-binning / covering codes and measures the
//!   information they actually convey.
//!
//! Everything is deterministic given a seed, and the heavy loops run on all
//! cores by default (disable the `parallel` feature for a sequential build
//! that produces bit-identical results).

pub mod error;
mod exec;
pub mod geom;
pub mod info;
pub mod io;
pub mod lp;
pub mod oracle;
pub mod region;
pub mod search;
pub mod sim;

pub use error::{Error, Result};
pub use geom::Region2D;
pub use info::{AuxChannel, JointPmf, Pmf};
pub use region::{
    aa_cloud, aa_region, am_coordinates, am_curve, am_feasible, ma_curve, rm_min_masking,
    slice_to_region, star_region, Orientation, RatePair, RegionBundle, StarConfig, TradeoffCurve,
};
pub use search::SearchConfig;
pub use sim::{
    appendix_slack, build_codebook, encode_x, encode_y, evaluate_exact, induced_tables,
    is_typical, jointly_typical, timeshare_evaluate, Codebook, SimReport, TypicalityParams,
};
