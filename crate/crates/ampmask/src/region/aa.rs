//! Double-amplification region: both encoders reveal as much as possible
//! about their own observations.
//!
//! Each encoder gets its own auxiliary channel — p(u_x|x) for encoder 1 and
//! p(u_y|y) for encoder 2 — plus a shared timesharing variable. For one
//! channel pair the five relevant information quantities form an
//! [`AaVector`]; timesharing makes every constraint an average of per-pair
//! vectors, so the achievable (Δ_X, Δ_Y) set at fixed rates is described by
//! linear programs over convex combinations of a sampled vector cloud.

use crate::error::{Error, Result};
use crate::exec;
use crate::geom::Region2D;
use crate::info::{AuxChannel, JointPmf};
use crate::lp;
use crate::region::am::{fresh_label, require_pair, FEAS_TOL};
use crate::region::RatePair;
use crate::search::{sample_channel, stream_rng, ChannelGrid, SearchConfig, DEFAULT_SIZE_GUARD};

/// Quantities this close to zero are snapped to exactly 0.0, so constant
/// channels yield the exact all-zeros vector the region sweep anchors on.
const ZERO_SNAP: f64 = 1e-12;

/// Boundary directions swept per region: the two axes plus 64 interior.
const SWEEP_DIRECTIONS: usize = 66;

const STREAM_AA_SAMPLE: u64 = 7 << 40;

/// The five information quantities governing one auxiliary channel pair:
/// per-encoder rate needs `a`, `b`, the sum-rate need `c`, and the two
/// amplification payoffs `dx`, `dy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AaVector {
    /// I(U_x; X | U_y) — rate encoder 1 needs on top of what U_y reveals.
    pub a: f64,
    /// I(U_y; Y | U_x) — rate encoder 2 needs on top of what U_x reveals.
    pub b: f64,
    /// I(U_x, U_y; X, Y) — combined rate of the pair.
    pub c: f64,
    /// I(X; U_x, U_y) — amplification of X achieved by the pair.
    pub dx: f64,
    /// I(Y; U_x, U_y) — amplification of Y achieved by the pair.
    pub dy: f64,
}

impl AaVector {
    fn snapped(a: f64, b: f64, c: f64, dx: f64, dy: f64) -> Self {
        let snap = |v: f64| if v.abs() <= ZERO_SNAP { 0.0 } else { v };
        Self { a: snap(a), b: snap(b), c: snap(c), dx: snap(dx), dy: snap(dy) }
    }

    /// Exactly the all-zeros vector (produced by constant channel pairs).
    pub fn is_zero(&self) -> bool {
        self.a == 0.0 && self.b == 0.0 && self.c == 0.0 && self.dx == 0.0 && self.dy == 0.0
    }
}

/// The channel pair that produced one cloud vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub chx: AuxChannel,
    pub chy: AuxChannel,
}

/// Sampled set of channel-pair vectors, closed over for region sweeps.
#[derive(Debug, Clone)]
pub struct AaCloud {
    pub vectors: Vec<AaVector>,
    pub provenance: Vec<Provenance>,
    pub config: SearchConfig,
}

impl AaCloud {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Exact five-vector of one channel pair: builds
/// p(x, y, u_x, u_y) = p(x, y)·chx(u_x|x)·chy(u_y|y) and evaluates each
/// mutual information on it.
pub fn aa_vector(j: &JointPmf, chx: &AuxChannel, chy: &AuxChannel) -> Result<AaVector> {
    let (ax, ay) = require_pair(j)?;
    let (ax, ay) = (ax.to_string(), ay.to_string());
    if chx.output_size() > j.sizes()[0] {
        return Err(Error::DimensionMismatch(format!(
            "auxiliary alphabet for the first encoder capped at {}, got {}",
            j.sizes()[0],
            chx.output_size()
        )));
    }
    if chy.output_size() > j.sizes()[1] {
        return Err(Error::DimensionMismatch(format!(
            "auxiliary alphabet for the second encoder capped at {}, got {}",
            j.sizes()[1],
            chy.output_size()
        )));
    }
    let ux = fresh_label(j.axes(), "Ux");
    let q = j.attach_channel(&ax, chx, &ux)?;
    let uy = fresh_label(q.axes(), "Uy");
    let q = q.attach_channel(&ay, chy, &uy)?;
    Ok(AaVector::snapped(
        q.mutual_information(&[&ux], &[&ax], &[&uy])?,
        q.mutual_information(&[&uy], &[&ay], &[&ux])?,
        q.mutual_information(&[&ux, &uy], &[&ax, &ay], &[])?,
        q.mutual_information(&[&ax], &[&ux, &uy], &[])?,
        q.mutual_information(&[&ay], &[&ux, &uy], &[])?,
    ))
}

fn channels_equal(a: &AuxChannel, b: &AuxChannel) -> bool {
    a.input_size() == b.input_size()
        && a.output_size() == b.output_size()
        && a.rows()
            .iter()
            .zip(b.rows())
            .all(|(ra, rb)| ra.probs() == rb.probs())
}

/// Deterministic channel-pair cloud: the full lattice product of per-encoder
/// grids, the four {constant, identity}² corner pairs (skipped when the
/// lattice already holds them exactly), then seeded random pairs.
pub fn aa_cloud(j: &JointPmf, cfg: &SearchConfig) -> Result<AaCloud> {
    cfg.validate()?;
    let (_, _) = require_pair(j)?;
    let nx = j.sizes()[0];
    let ny = j.sizes()[1];
    let gx = ChannelGrid::new(nx, nx, cfg.grid_resolution, DEFAULT_SIZE_GUARD)?;
    let gy = ChannelGrid::new(ny, ny, cfg.grid_resolution, DEFAULT_SIZE_GUARD)?;
    let lattice = gx
        .len()
        .checked_mul(gy.len())
        .filter(|&n| n.saturating_add(cfg.random_samples) <= DEFAULT_SIZE_GUARD)
        .ok_or_else(|| {
            Error::SizeGuard(format!(
                "channel-pair cloud of {}×{} lattice pairs plus {} samples exceeds {}",
                gx.len(),
                gy.len(),
                cfg.random_samples,
                DEFAULT_SIZE_GUARD
            ))
        })?;

    let mut pairs: Vec<(AuxChannel, AuxChannel)> =
        Vec::with_capacity(lattice + cfg.random_samples + 4);
    for ix in 0..gx.len() {
        let cx = gx.get(ix);
        for iy in 0..gy.len() {
            pairs.push((cx.clone(), gy.get(iy)));
        }
    }
    let corners_x = [AuxChannel::constant(nx, nx), AuxChannel::identity_embed(nx, nx)];
    let corners_y = [AuxChannel::constant(ny, ny), AuxChannel::identity_embed(ny, ny)];
    for cx in &corners_x {
        for cy in &corners_y {
            let dup = pairs
                .iter()
                .any(|(px, py)| channels_equal(px, cx) && channels_equal(py, cy));
            if !dup {
                pairs.push((cx.clone(), cy.clone()));
            }
        }
    }
    for s in 0..cfg.random_samples {
        let mut rng = stream_rng(cfg.seed, STREAM_AA_SAMPLE | s as u64);
        let cx = sample_channel(nx, nx, &mut rng);
        let cy = sample_channel(ny, ny, &mut rng);
        pairs.push((cx, cy));
    }

    let vectors = exec::map_indexed(pairs.len(), |i| {
        aa_vector(j, &pairs[i].0, &pairs[i].1).expect("sampled channels are valid")
    });
    let provenance = pairs
        .into_iter()
        .map(|(chx, chy)| Provenance { chx, chy })
        .collect();
    Ok(AaCloud { vectors, provenance, config: cfg.clone() })
}

/// Achievable (Δ_X, Δ_Y) pairs at rates `r`: some convex combination `w` of
/// cloud vectors must satisfy w·a ≤ rx, w·b ≤ ry, w·c ≤ rx + ry with
/// Δ_X ≤ w·dx and Δ_Y ≤ w·dy. Computed as the down-closed hull of Pareto
/// points from a sweep of maximization directions.
pub fn aa_region(cloud: &AaCloud, r: RatePair) -> Result<Region2D> {
    if cloud.is_empty() {
        return Err(Error::DegenerateLp("empty channel-pair cloud".into()));
    }
    let zero = cloud
        .vectors
        .iter()
        .position(AaVector::is_zero)
        .ok_or_else(|| {
            Error::DegenerateLp(
                "cloud lacks the all-zeros vector needed as a feasible start".into(),
            )
        })?;
    let n = cloud.len();
    let a: Vec<f64> = cloud.vectors.iter().map(|v| v.a).collect();
    let b: Vec<f64> = cloud.vectors.iter().map(|v| v.b).collect();
    let c: Vec<f64> = cloud.vectors.iter().map(|v| v.c).collect();
    let dx: Vec<f64> = cloud.vectors.iter().map(|v| v.dx).collect();
    let dy: Vec<f64> = cloud.vectors.iter().map(|v| v.dy).collect();
    let budgets = [r.rx, r.ry, r.rx + r.ry];

    let sweep: Vec<Result<(f64, f64)>> = exec::map_indexed(SWEEP_DIRECTIONS, |i| {
        let lam = i as f64 / (SWEEP_DIRECTIONS - 1) as f64;
        let objective: Vec<f64> = (0..n).map(|k| lam * dx[k] + (1.0 - lam) * dy[k]).collect();
        let constraints: [(&[f64], f64); 3] =
            [(&a, budgets[0]), (&b, budgets[1]), (&c, budgets[2])];
        let sol = lp::maximize_over_simplex(&objective, &constraints, zero)?;
        let mut point = (0.0_f64, 0.0_f64);
        let mut used = [0.0_f64; 3];
        for &(col, w) in &sol.weights {
            point.0 += w * dx[col];
            point.1 += w * dy[col];
            used[0] += w * a[col];
            used[1] += w * b[col];
            used[2] += w * c[col];
        }
        for (u, bud) in used.iter().zip(budgets) {
            if *u > bud + FEAS_TOL {
                return Err(Error::DegenerateLp(format!(
                    "sweep solution spends {u} of a {bud} rate budget"
                )));
            }
        }
        Ok(point)
    });

    let mut points = Vec::with_capacity(SWEEP_DIRECTIONS + 3);
    for p in sweep {
        points.push(p?);
    }
    let x_star = points.iter().map(|p| p.0).fold(0.0, f64::max);
    let y_star = points.iter().map(|p| p.1).fold(0.0, f64::max);
    points.push((0.0, 0.0));
    points.push((x_star, 0.0));
    points.push((0.0, y_star));
    Ok(Region2D::from_points(&points))
}
