//! Amplification–masking tradeoff at fixed rates.
//!
//! Encoder 1 observes X, encoder 2 observes Y, and a single auxiliary channel
//! p(u|y) parameterizes everything. A channel with coordinates
//! (I(X;U), I(Y;U), I(Y;U,X), H(X)) supports operating points where
//!
//! * `rx ≥ delta_a − I(X;U)` — binning covers the amplification shortfall,
//! * `ry ≥ I(Y;U)` — encoder 2 can describe U,
//! * `delta_m ≥ max{I(Y;U,X) + delta_a − H(X), I(Y;U)}` — unavoidable leakage,
//! * `delta_a ≤ H(X)`.
//!
//! The tradeoff curve reports, per amplification level, the least masking
//! bound over all searched channels, convexified (timesharing between two
//! channels achieves the chord).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::info::{AuxChannel, JointPmf};
use crate::region::RatePair;
use crate::search::{
    local_refine, sample_channel, ChannelGrid, ChannelObjective, Score, SearchConfig,
    DEFAULT_SIZE_GUARD, REFINE_STARTS,
};

/// Feasibility slack for exact-arithmetic comparisons.
pub const FEAS_TOL: f64 = 1e-9;

/// Default number of amplification grid points per curve.
pub const DEFAULT_CURVE_GRID: usize = 101;

const STREAM_AM_SAMPLE: u64 = 4 << 40;
const STREAM_AM_DOMAIN: u64 = 5 << 40;
const STREAM_AM_CURVE: u64 = 6 << 40;

/// The four information quantities that decide feasibility of every
/// (rate, amplification, masking) tuple for one auxiliary channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmCoordinates {
    pub i_xu: f64,
    pub i_yu: f64,
    pub i_y_ux: f64,
    pub h_x: f64,
}

impl AmCoordinates {
    /// Least masking consistent with amplification `delta_a` through this
    /// channel.
    pub fn masking_bound(&self, delta_a: f64) -> f64 {
        (self.i_y_ux + delta_a - self.h_x).max(self.i_yu)
    }
}

/// Lower boundary of achievable (amplification, masking) pairs at fixed rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffCurve {
    /// (delta_a, least delta_m) with strictly increasing delta_a.
    pub points: Vec<(f64, f64)>,
    /// Largest feasible amplification.
    pub domain_max: f64,
}

impl TradeoffCurve {
    /// Linear interpolation; `None` outside `[0, domain_max]`.
    pub fn value_at(&self, delta_a: f64) -> Option<f64> {
        if self.points.is_empty() || delta_a < -FEAS_TOL || delta_a > self.domain_max + FEAS_TOL {
            return None;
        }
        let pts = &self.points;
        if delta_a <= pts[0].0 {
            return Some(pts[0].1);
        }
        for w in pts.windows(2) {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            if delta_a <= x1 {
                let t = (delta_a - x0) / (x1 - x0);
                return Some(y0 + t * (y1 - y0));
            }
        }
        Some(pts[pts.len() - 1].1)
    }
}

pub(crate) fn require_pair(j: &JointPmf) -> Result<(&str, &str)> {
    if j.axes().len() != 2 {
        return Err(Error::ShapeMismatch(format!(
            "expected a two-axis joint distribution, got {} axes",
            j.axes().len()
        )));
    }
    Ok((&j.axes()[0], &j.axes()[1]))
}

pub(crate) fn fresh_label(taken: &[String], stem: &str) -> String {
    if !taken.iter().any(|a| a == stem) {
        return stem.to_string();
    }
    let mut i = 0usize;
    loop {
        let cand = format!("{stem}{i}");
        if !taken.iter().any(|a| a == &cand) {
            return cand;
        }
        i += 1;
    }
}

/// Exact coordinates of one auxiliary channel attached to the second axis.
pub fn am_coordinates(j: &JointPmf, ch: &AuxChannel) -> Result<AmCoordinates> {
    let (ax, ay) = require_pair(j)?;
    let (ax, ay) = (ax.to_string(), ay.to_string());
    let u = fresh_label(j.axes(), "U");
    let q = j.attach_channel(&ay, ch, &u)?;
    Ok(AmCoordinates {
        i_xu: q.mutual_information(&[&ax], &[&u], &[])?,
        i_yu: q.mutual_information(&[&ay], &[&u], &[])?,
        i_y_ux: q.mutual_information(&[&ay], &[&u, &ax], &[])?,
        h_x: q.marginal_entropy(&[&ax])?,
    })
}

/// The four-inequality membership test for one channel's coordinates.
pub fn am_feasible(c: &AmCoordinates, r: RatePair, delta_a: f64, delta_m: f64) -> bool {
    r.rx >= delta_a - c.i_xu - FEAS_TOL
        && r.ry >= c.i_yu - FEAS_TOL
        && delta_m >= c.masking_bound(delta_a) - FEAS_TOL
        && delta_a <= c.h_x + FEAS_TOL
}

/// Normalized log list size for recovering X from the messages at
/// amplification `delta_a`.
pub fn list_exponent(delta_a: f64, j: &JointPmf) -> Result<f64> {
    let (ax, _) = require_pair(j)?;
    let h_x = j.marginal_entropy(&[ax])?;
    if !((-FEAS_TOL..=h_x + FEAS_TOL).contains(&delta_a)) {
        return Err(Error::OutOfRange(format!(
            "amplification {delta_a} outside [0, {h_x}]"
        )));
    }
    Ok((h_x - delta_a).max(0.0))
}

/// Channel cloud shared by the domain and curve passes: lattice points, random
/// samples, the guaranteed corners, and (later) refined channels.
struct Cloud<'a> {
    j: &'a JointPmf,
    grid: ChannelGrid,
    random_samples: usize,
    corners: Vec<AuxChannel>,
    seed: u64,
    coords: Vec<AmCoordinates>,
    extra: Vec<(AuxChannel, AmCoordinates)>,
}

impl<'a> Cloud<'a> {
    fn build(j: &'a JointPmf, y_size: usize, aux_size: usize, cfg: &SearchConfig) -> Result<Self> {
        let grid = ChannelGrid::new(y_size, aux_size, cfg.grid_resolution, DEFAULT_SIZE_GUARD)?;
        let mut corners = vec![AuxChannel::constant(y_size, aux_size)];
        if aux_size >= y_size {
            corners.push(AuxChannel::identity_embed(y_size, aux_size));
        }
        let mut cloud = Self {
            j,
            grid,
            random_samples: cfg.random_samples,
            corners,
            seed: cfg.seed,
            coords: Vec::new(),
            extra: Vec::new(),
        };
        let total = cloud.base_len();
        cloud.coords = exec::map_indexed(total, |i| {
            am_coordinates(j, &cloud.channel_at(i)).expect("searched channels are valid")
        });
        Ok(cloud)
    }

    fn base_len(&self) -> usize {
        self.grid.len() + self.random_samples + self.corners.len()
    }

    fn len(&self) -> usize {
        self.base_len() + self.extra.len()
    }

    fn channel_at(&self, i: usize) -> AuxChannel {
        let n_grid = self.grid.len();
        if i < n_grid {
            return self.grid.get(i);
        }
        let i = i - n_grid;
        if i < self.random_samples {
            let mut rng = crate::search::stream_rng(self.seed, STREAM_AM_SAMPLE | i as u64);
            let out = self.grid.get(0).output_size();
            let inp = self.grid.get(0).input_size();
            return sample_channel(inp, out, &mut rng);
        }
        let i = i - self.random_samples;
        if i < self.corners.len() {
            return self.corners[i].clone();
        }
        self.extra[i - self.corners.len()].0.clone()
    }

    fn coords_at(&self, i: usize) -> AmCoordinates {
        if i < self.coords.len() {
            self.coords[i]
        } else {
            self.extra[i - self.coords.len()].1
        }
    }

    fn push_extra(&mut self, ch: AuxChannel) {
        let c = am_coordinates(self.j, &ch).expect("refined channels are valid");
        self.extra.push((ch, c));
    }

    /// Indices of the `k` best feasible coordinates under `value`, ties broken
    /// by index for reproducibility.
    fn top_feasible<V, F>(&self, value: V, feasible: F, k: usize) -> Vec<usize>
    where
        V: Fn(&AmCoordinates) -> f64,
        F: Fn(&AmCoordinates) -> bool,
    {
        let mut scored: Vec<(f64, usize)> = (0..self.len())
            .filter_map(|i| {
                let c = self.coords_at(i);
                feasible(&c).then(|| (value(&c), i))
            })
            .collect();
        let cmp = |a: &(f64, usize), b: &(f64, usize)| {
            a.0.partial_cmp(&b.0).expect("scores are not NaN").then(a.1.cmp(&b.1))
        };
        if scored.len() > k {
            scored.select_nth_unstable_by(k - 1, cmp);
            scored.truncate(k);
        }
        scored.sort_by(cmp);
        scored.into_iter().map(|(_, i)| i).collect()
    }
}

struct AmObjective<'a, V, F> {
    j: &'a JointPmf,
    value: V,
    feasible: F,
}

impl<'a, V, F> ChannelObjective for AmObjective<'a, V, F>
where
    V: Fn(&AmCoordinates) -> f64 + Sync,
    F: Fn(&AmCoordinates) -> bool + Sync,
{
    fn score(&self, ch: &AuxChannel) -> Score {
        let c = am_coordinates(self.j, ch).expect("searched channels are valid");
        Score { value: (self.value)(&c), feasible: (self.feasible)(&c) }
    }
}

/// Lower convex hull of points sorted by x (the timesharing envelope).
fn lower_hull(pts: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for &p in pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            if (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0) <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

fn hull_value(hull: &[(f64, f64)], x: f64) -> f64 {
    if x <= hull[0].0 {
        return hull[0].1;
    }
    for w in hull.windows(2) {
        if x <= w[1].0 {
            let t = (x - w[0].0) / (w[1].0 - w[0].0);
            return w[0].1 + t * (w[1].1 - w[0].1);
        }
    }
    hull[hull.len() - 1].1
}

/// Amplification–masking tradeoff curve with the default auxiliary alphabet
/// |U| = |Y| + 1 and the default amplification grid.
pub fn am_curve(j: &JointPmf, r: RatePair, cfg: &SearchConfig) -> Result<TradeoffCurve> {
    let (_, _) = require_pair(j)?;
    am_curve_detailed(j, r, cfg, j.sizes()[1] + 1, DEFAULT_CURVE_GRID)
}

/// As [`am_curve`] with explicit auxiliary alphabet size and grid resolution.
pub fn am_curve_detailed(
    j: &JointPmf,
    r: RatePair,
    cfg: &SearchConfig,
    aux_size: usize,
    grid_points: usize,
) -> Result<TradeoffCurve> {
    cfg.validate()?;
    let (ax, ay) = require_pair(j)?;
    if aux_size == 0 || grid_points < 2 {
        return Err(Error::OutOfRange(
            "aux_size must be ≥ 1 and grid_points ≥ 2".into(),
        ));
    }
    let h_x = j.marginal_entropy(&[ax])?;
    let h_y = j.marginal_entropy(&[ay])?;
    let y_size = j.sizes()[1];
    let mut cloud = Cloud::build(j, y_size, aux_size, cfg)?;

    // ---- domain pass: largest I(X;U) subject to the ry constraint ----------
    let ry_ok = |c: &AmCoordinates| c.i_yu <= r.ry + FEAS_TOL;
    let starts = cloud.top_feasible(|c| -c.i_xu, ry_ok, REFINE_STARTS);
    let refined: Vec<AuxChannel> = exec::map_indexed(starts.len(), |rank| {
        let obj = AmObjective {
            j,
            value: |c: &AmCoordinates| -c.i_xu,
            feasible: ry_ok,
        };
        let mut rng = crate::search::stream_rng(cfg.seed, STREAM_AM_DOMAIN | rank as u64);
        local_refine(&obj, &cloud.channel_at(starts[rank]), cfg.refine_steps, cfg.refine_step_size, &mut rng)
            .expect("domain starts are feasible")
    });
    for ch in refined {
        cloud.push_extra(ch);
    }
    let best_ixu = (0..cloud.len())
        .map(|i| cloud.coords_at(i))
        .filter(ry_ok)
        .map(|c| c.i_xu)
        .fold(f64::NEG_INFINITY, f64::max);
    if !best_ixu.is_finite() {
        return Err(Error::EmptyRegion);
    }
    let domain_max = h_x.min(r.rx + best_ixu);

    // ---- curve pass: per-amplification least masking ------------------------
    let mut xs: Vec<f64> = (0..grid_points)
        .map(|i| h_x * i as f64 / (grid_points - 1) as f64)
        .filter(|&x| x <= domain_max + FEAS_TOL)
        .collect();
    if xs.is_empty() {
        xs.push(0.0);
    }
    if domain_max > xs[xs.len() - 1] + FEAS_TOL {
        xs.push(domain_max);
    }

    let cloud = &cloud;
    let raw: Vec<(f64, f64)> = exec::map_indexed(xs.len(), |xi| {
        let da = xs[xi];
        let feasible =
            |c: &AmCoordinates| c.i_yu <= r.ry + FEAS_TOL && c.i_xu >= da - r.rx - FEAS_TOL;
        let value = |c: &AmCoordinates| c.masking_bound(da);
        let starts = cloud.top_feasible(value, feasible, REFINE_STARTS);
        let mut best = starts
            .iter()
            .map(|&i| value(&cloud.coords_at(i)))
            .fold(f64::INFINITY, f64::min);
        let obj = AmObjective { j, value, feasible };
        for (rank, &start) in starts.iter().enumerate() {
            let stream = STREAM_AM_CURVE | ((xi as u64) << 20) | rank as u64;
            let mut rng = crate::search::stream_rng(cfg.seed, stream);
            let ch = local_refine(
                &obj,
                &cloud.channel_at(start),
                cfg.refine_steps,
                cfg.refine_step_size,
                &mut rng,
            )
            .expect("curve starts are feasible");
            best = best.min(obj.score(&ch).value);
        }
        (da, best)
    });

    let raw: Vec<(f64, f64)> = raw
        .into_iter()
        .filter(|(_, m)| m.is_finite())
        .collect();
    if raw.is_empty() {
        return Err(Error::EmptyRegion);
    }

    // timesharing envelope, then monotone closure and entropy clipping
    let hull = lower_hull(&raw);
    let floor = hull_value(&hull, raw[0].0);
    let points: Vec<(f64, f64)> = raw
        .iter()
        .map(|&(x, _)| (x, hull_value(&hull, x).max(floor).clamp(0.0, h_y)))
        .collect();

    Ok(TradeoffCurve { points, domain_max })
}

/// Role-swapped curve: amplify Y, mask X, auxiliary channel on X. Points are
/// (delta_y, least delta_x). Encoder rates keep their identities: `r.rx`
/// still limits the encoder observing X.
pub fn ma_curve(j: &JointPmf, r: RatePair, cfg: &SearchConfig) -> Result<TradeoffCurve> {
    let (ax, ay) = require_pair(j)?;
    let (ax, ay) = (ax.to_string(), ay.to_string());
    let transposed = j.permute(&[&ay, &ax])?;
    am_curve(&transposed, r.swapped(), cfg)
}

/// Minimum leakage about Y at rates supporting lossless reconstruction of X:
/// the least I(Y;X,U) over channels with H(X|U) ≤ rx and I(Y;U) ≤ ry.
/// `None` when no searched channel satisfies both rate constraints.
pub fn rm_min_masking(j: &JointPmf, r: RatePair, cfg: &SearchConfig) -> Result<Option<f64>> {
    let (ax, _) = require_pair(j)?;
    let h_x = j.marginal_entropy(&[ax])?;
    let y_size = j.sizes()[1];
    let obj = AmObjective {
        j,
        value: |c: &AmCoordinates| c.i_y_ux,
        feasible: move |c: &AmCoordinates| {
            c.h_x - c.i_xu <= r.rx + FEAS_TOL && c.i_yu <= r.ry + FEAS_TOL
        },
    };
    let _ = h_x;
    Ok(crate::search::search_min(&obj, y_size, y_size + 1, cfg)?.map(|(_, v)| v))
}
