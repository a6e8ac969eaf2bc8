//! Brute-force search over auxiliary channels: simplex grids, uniform random
//! sampling, and greedy local refinement.
//!
//! Every region boundary in this crate is the optimum of some functional over
//! channels `p(u|·)`. The searches here are deliberately simple — enumerate a
//! lattice, sprinkle random points, polish the best few — because the
//! dimension is tiny (at most a handful of simplex rows) and reproducibility
//! matters more than convergence speed. All randomness is derived from
//! `(seed, stream)` pairs so results are identical across thread counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::info::{AuxChannel, Pmf};

/// Cap on enumeration sizes (grid points, channel counts).
pub const DEFAULT_SIZE_GUARD: usize = 10_000_000;

/// Number of top-scoring starts that get local refinement.
pub const REFINE_STARTS: usize = 32;

const STREAM_SAMPLE: u64 = 1 << 40;
const STREAM_REFINE: u64 = 2 << 40;

/// Independent RNG stream `stream` of a master `seed`. Streams never collide
/// across distinct stream ids, so parallel consumers stay deterministic.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Tuning knobs shared by all channel optimizations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Lattice resolution: grid pmf entries are multiples of 1/K.
    pub grid_resolution: usize,
    /// Uniform random channels added on top of the grid.
    pub random_samples: usize,
    /// Greedy perturbation steps applied to each refined start.
    pub refine_steps: usize,
    /// Perturbation magnitude, in probability units.
    pub refine_step_size: f64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            grid_resolution: 12,
            random_samples: 20_000,
            refine_steps: 200,
            refine_step_size: 0.15,
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_resolution == 0 {
            return Err(Error::OutOfRange("grid_resolution must be ≥ 1".into()));
        }
        if !(self.refine_step_size > 0.0 && self.refine_step_size <= 1.0) {
            return Err(Error::OutOfRange(
                "refine_step_size must lie in (0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Outcome of evaluating one channel: a scalar to minimize plus feasibility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub value: f64,
    pub feasible: bool,
}

/// Deterministic evaluation contract for channel optimization (minimization).
pub trait ChannelObjective: Sync {
    fn score(&self, ch: &AuxChannel) -> Score;
}

impl<F: Fn(&AuxChannel) -> Score + Sync> ChannelObjective for F {
    fn score(&self, ch: &AuxChannel) -> Score {
        self(ch)
    }
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Number of pmfs `enumerate_simplex(m, k)` yields: C(k+m-1, m-1).
pub fn simplex_grid_len(m: usize, k: usize) -> u128 {
    binomial((k + m - 1) as u64, (m - 1) as u64)
}

/// All pmfs on `m` symbols whose entries are multiples of 1/k, in lexicographic
/// order of the leading entries: (0,…,1) first, (1,0,…,0) last.
pub fn enumerate_simplex(m: usize, k: usize) -> Result<Vec<Pmf>> {
    if m == 0 || k == 0 {
        return Err(Error::OutOfRange("simplex dimension and resolution must be ≥ 1".into()));
    }
    let count = simplex_grid_len(m, k);
    if count > DEFAULT_SIZE_GUARD as u128 {
        return Err(Error::SizeGuard(format!(
            "simplex grid has {count} points (cap {DEFAULT_SIZE_GUARD})"
        )));
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut counts = vec![0usize; m];
    fill_compositions(k, 0, &mut counts, &mut out, k);
    Ok(out)
}

fn fill_compositions(remaining: usize, pos: usize, counts: &mut Vec<usize>, out: &mut Vec<Pmf>, k: usize) {
    if pos + 1 == counts.len() {
        counts[pos] = remaining;
        let probs = counts.iter().map(|&c| c as f64 / k as f64).collect();
        out.push(Pmf::new(probs).expect("grid point is a valid pmf"));
        return;
    }
    for c in 0..=remaining {
        counts[pos] = c;
        fill_compositions(remaining - c, pos + 1, counts, out, k);
    }
}

/// Lattice of channels: the Cartesian product of one simplex grid per input
/// row, addressable by index without materializing the product.
pub struct ChannelGrid {
    row_points: Vec<Pmf>,
    input_size: usize,
    len: usize,
}

impl ChannelGrid {
    pub fn new(input_size: usize, output_size: usize, k: usize, cap: usize) -> Result<Self> {
        if input_size == 0 {
            return Err(Error::OutOfRange("input_size must be ≥ 1".into()));
        }
        let per_row = simplex_grid_len(output_size, k);
        let total = per_row.checked_pow(input_size as u32).unwrap_or(u128::MAX);
        if total > cap as u128 {
            return Err(Error::SizeGuard(format!(
                "channel grid has {total} points (cap {cap})"
            )));
        }
        Ok(Self {
            row_points: enumerate_simplex(output_size, k)?,
            input_size,
            len: total as usize,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Channel at lattice index `idx`; row 0 is the most significant digit.
    pub fn get(&self, idx: usize) -> AuxChannel {
        debug_assert!(idx < self.len);
        let base = self.row_points.len();
        let mut rows = vec![self.row_points[0].clone(); self.input_size];
        let mut rem = idx;
        for r in (0..self.input_size).rev() {
            rows[r] = self.row_points[rem % base].clone();
            rem /= base;
        }
        AuxChannel::new(rows).expect("grid rows are valid pmfs")
    }
}

/// Materialized channel lattice in index order. Prefer [`ChannelGrid`] for
/// large enumerations.
pub fn enumerate_channels(input_size: usize, output_size: usize, k: usize) -> Result<Vec<AuxChannel>> {
    let grid = ChannelGrid::new(input_size, output_size, k, DEFAULT_SIZE_GUARD)?;
    Ok((0..grid.len()).map(|i| grid.get(i)).collect())
}

/// Uniform draw from the probability simplex via normalized exponentials.
pub fn sample_simplex(m: usize, rng: &mut ChaCha12Rng) -> Pmf {
    let mut v = vec![0.0; m.max(1)];
    let mut sum = 0.0;
    for x in v.iter_mut() {
        *x = -(1.0 - rng.gen::<f64>()).ln();
        sum += *x;
    }
    if sum <= 0.0 {
        return Pmf::uniform(m);
    }
    v.iter_mut().for_each(|x| *x /= sum);
    Pmf::new(v).unwrap_or_else(|_| Pmf::uniform(m))
}

/// Channel with each row drawn uniformly from the simplex.
pub fn sample_channel(input_size: usize, output_size: usize, rng: &mut ChaCha12Rng) -> AuxChannel {
    let rows = (0..input_size.max(1))
        .map(|_| sample_simplex(output_size, rng))
        .collect();
    AuxChannel::new(rows).expect("sampled rows are valid pmfs")
}

/// Euclidean projection onto the probability simplex.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("no NaN in projection input"));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (i as f64 + 1.0);
        if u - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Greedy minimization: perturb one random row at a time, re-project onto the
/// simplex, keep the move only when it stays feasible and strictly improves.
/// The accepted-score sequence is therefore non-increasing.
pub fn local_refine<O: ChannelObjective + ?Sized>(
    obj: &O,
    start: &AuxChannel,
    steps: usize,
    step_size: f64,
    rng: &mut ChaCha12Rng,
) -> Result<AuxChannel> {
    let s0 = obj.score(start);
    if !s0.feasible {
        return Err(Error::InfeasibleStart);
    }
    let mut best = start.clone();
    let mut best_value = s0.value;
    let input = start.input_size();
    for _ in 0..steps {
        let row = rng.gen_range(0..input);
        let mut perturbed: Vec<f64> = best.row(row).probs().to_vec();
        for x in perturbed.iter_mut() {
            *x += step_size * (rng.gen::<f64>() * 2.0 - 1.0);
        }
        let projected = project_to_simplex(&perturbed);
        let mut rows: Vec<Pmf> = best.rows().to_vec();
        match Pmf::new(projected) {
            Ok(p) => rows[row] = p,
            Err(_) => continue,
        }
        let candidate = AuxChannel::new(rows).expect("row counts unchanged");
        let s = obj.score(&candidate);
        if s.feasible && s.value < best_value {
            best = candidate;
            best_value = s.value;
        }
    }
    Ok(best)
}

/// Full pipeline: score the lattice and `random_samples` random channels, then
/// locally refine the [`REFINE_STARTS`] best feasible starts. Returns the best
/// feasible channel and its score, or `None` when nothing is feasible.
pub fn search_min<O: ChannelObjective>(
    obj: &O,
    input_size: usize,
    output_size: usize,
    cfg: &SearchConfig,
) -> Result<Option<(AuxChannel, f64)>> {
    cfg.validate()?;
    let grid = ChannelGrid::new(input_size, output_size, cfg.grid_resolution, DEFAULT_SIZE_GUARD)?;
    let n_grid = grid.len();

    let channel_for = |src: usize| -> AuxChannel {
        if src < n_grid {
            grid.get(src)
        } else {
            let mut rng = stream_rng(cfg.seed, STREAM_SAMPLE | (src - n_grid) as u64);
            sample_channel(input_size, output_size, &mut rng)
        }
    };

    let scores: Vec<Score> =
        exec::map_indexed(n_grid + cfg.random_samples, |i| obj.score(&channel_for(i)));

    let mut feasible: Vec<(f64, usize)> = scores
        .iter()
        .enumerate()
        .filter(|(_, s)| s.feasible)
        .map(|(i, s)| (s.value, i))
        .collect();
    if feasible.is_empty() {
        return Ok(None);
    }
    feasible.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("scores are not NaN").then(a.1.cmp(&b.1)));
    feasible.truncate(REFINE_STARTS);

    let refined: Vec<(f64, AuxChannel)> = exec::map_indexed(feasible.len(), |rank| {
        let start = channel_for(feasible[rank].1);
        let mut rng = stream_rng(cfg.seed, STREAM_REFINE | rank as u64);
        let ch = local_refine(obj, &start, cfg.refine_steps, cfg.refine_step_size, &mut rng)
            .expect("refinement starts were selected feasible");
        (obj.score(&ch).value, ch)
    });

    let best = refined
        .into_iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.0.partial_cmp(&b.0).expect("scores are not NaN").then(i.cmp(j)))
        .map(|(_, (value, ch))| (ch, value));
    Ok(best)
}
