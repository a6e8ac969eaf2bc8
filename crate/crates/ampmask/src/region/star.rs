//! The full leakage region at fixed rates: pairs (Δ_X, Δ_Y) achievable
//! simultaneously, computed as the intersection of three constituent regions —
//! amplify-X/mask-Y, amplify-Y/mask-X, and amplify-both.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::geom::Region2D;
use crate::info::JointPmf;
use crate::region::aa::{aa_cloud, aa_region};
use crate::region::am::{am_curve_detailed, require_pair, TradeoffCurve, DEFAULT_CURVE_GRID};
use crate::region::RatePair;
use crate::search::SearchConfig;

/// Which tradeoff a curve describes: [`Orientation::Am`] amplifies X and
/// masks Y (points are (Δ_X, least Δ_Y)); [`Orientation::Ma`] is the mirror
/// with points (Δ_Y, least Δ_X).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Am,
    Ma,
}

/// Tuning for the full intersection build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarConfig {
    /// Channel search driving the two tradeoff curves.
    pub search: SearchConfig,
    /// Channel-pair sampling driving the double-amplification region.
    pub aa_search: SearchConfig,
    /// Amplification grid points per curve.
    pub curve_grid: usize,
    /// Auxiliary alphabet size for the curves; `None` = source alphabet + 1.
    pub aux_size: Option<usize>,
}

impl Default for StarConfig {
    fn default() -> Self {
        Self {
            search: SearchConfig::default(),
            // pair lattices grow as the square of the per-encoder grid, so the
            // pair search defaults coarser; refinement is lattice-free here
            aa_search: SearchConfig {
                grid_resolution: 6,
                refine_steps: 0,
                ..SearchConfig::default()
            },
            curve_grid: DEFAULT_CURVE_GRID,
            aux_size: None,
        }
    }
}

/// Everything needed to plot or audit one rate point: the three constituent
/// regions, their intersection, and digests tying the result to its inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionBundle {
    pub am: Region2D,
    pub ma: Region2D,
    pub aa: Region2D,
    pub star: Region2D,
    pub rates: RatePair,
    pub dist_digest: String,
    pub config_digest: String,
}

/// Lift a tradeoff curve into the (Δ_X, Δ_Y) plane. For [`Orientation::Am`]
/// the achievable set lies above the curve — masking any more than the
/// minimum is allowed — and left of `domain_max`, capped at `h_other` (the
/// masked source's entropy). [`Orientation::Ma`] mirrors the axes.
pub fn slice_to_region(curve: &TradeoffCurve, h_other: f64, orientation: Orientation) -> Region2D {
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(curve.points.len() + 2);
    match orientation {
        Orientation::Am => {
            pts.extend(curve.points.iter().copied());
            pts.push((curve.domain_max, h_other));
            pts.push((0.0, h_other));
        }
        Orientation::Ma => {
            pts.extend(curve.points.iter().map(|&(da, dm)| (dm, da)));
            pts.push((h_other, curve.domain_max));
            pts.push((h_other, 0.0));
        }
    }
    Region2D::from_points(&pts)
}

/// Content hash of a distribution: axis labels, sizes, and exact cell bits.
pub fn distribution_digest(j: &JointPmf) -> String {
    let mut h = Sha256::new();
    for ax in j.axes() {
        h.update(ax.as_bytes());
        h.update([0u8]);
    }
    for &s in j.sizes() {
        h.update((s as u64).to_le_bytes());
    }
    for &p in j.probs() {
        h.update(p.to_bits().to_le_bytes());
    }
    hex_digest(&h.finalize())
}

/// Content hash of a configuration (canonical JSON).
pub fn star_config_digest(cfg: &StarConfig) -> String {
    let json = serde_json::to_string(cfg).expect("config serializes");
    let mut h = Sha256::new();
    h.update(json.as_bytes());
    hex_digest(&h.finalize())
}

fn hex_digest(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Compute all four regions at one rate pair. Deterministic given the
/// configuration; the bundle records digests of both inputs.
pub fn star_region(j: &JointPmf, r: RatePair, cfg: &StarConfig) -> Result<RegionBundle> {
    let (ax, ay) = require_pair(j)?;
    let (ax, ay) = (ax.to_string(), ay.to_string());
    let h_x = j.marginal_entropy(&[&ax])?;
    let h_y = j.marginal_entropy(&[&ay])?;

    let am_aux = cfg.aux_size.unwrap_or(j.sizes()[1] + 1);
    let curve_am = am_curve_detailed(j, r, &cfg.search, am_aux, cfg.curve_grid)?;

    let transposed = j.permute(&[&ay, &ax])?;
    let ma_aux = cfg.aux_size.unwrap_or(j.sizes()[0] + 1);
    let curve_ma = am_curve_detailed(&transposed, r.swapped(), &cfg.search, ma_aux, cfg.curve_grid)?;

    let cloud = aa_cloud(j, &cfg.aa_search)?;
    let aa = aa_region(&cloud, r)?.clip_to_box(h_x, h_y);

    let am = slice_to_region(&curve_am, h_y, Orientation::Am).clip_to_box(h_x, h_y);
    let ma = slice_to_region(&curve_ma, h_x, Orientation::Ma).clip_to_box(h_x, h_y);
    let star = am.intersect(&ma).intersect(&aa);

    Ok(RegionBundle {
        am,
        ma,
        aa,
        star,
        rates: r,
        dist_digest: distribution_digest(j),
        config_digest: star_config_digest(cfg),
    })
}
