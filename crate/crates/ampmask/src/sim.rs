//! Executable block-coding scheme: random binning of typical source blocks on
//! the X side, a randomly drawn covering codebook with joint-typicality
//! encoding on the Y side, and exact evaluation of the information revealed
//! about each source by the pair of encoder outputs.
//!
//! The construction realizes, at finite blocklength, the achievability
//! recipe behind [`crate::region::am_curve`]: the X encoder sends the bin
//! index of its block (targeting `target_delta_a` bits of revealed
//! information per symbol) and the Y encoder sends the index of a quantizer
//! codeword jointly typical with its block. [`evaluate_exact`] enumerates
//! the full block distribution and reports the revealed-information rates
//! actually achieved, with encoder failures routed to reserved error
//! symbols so that both encoders remain total functions.

use crate::error::{Error, Result};
use crate::info::{AuxChannel, JointPmf, Pmf};
use crate::oracle::{self, EncoderTable};
use crate::region::am;
use crate::search::stream_rng;
use rand::Rng as _;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// RNG stream for codebook construction (bin draws, then codeword draws).
const STREAM_CODEBOOK: u64 = 8 << 40;

/// Sentinel stored in the bin table for sequences outside the typical set.
const ATYPICAL: u32 = u32::MAX;

/// Largest admissible bin count: must stay below the [`ATYPICAL`] sentinel
/// and keep the joint message histogram enumerable.
const MAX_BINS: usize = 1 << 31;

/// Relative typicality tolerance, validated once at codebook construction.
///
/// A sequence is `eps`-typical when every symbol's empirical frequency is
/// within a factor `1 ± eps` of its probability; values of `eps` at or above
/// the worst-case relative deviation make every in-support sequence typical.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypicalityParams {
    pub eps: f64,
}

impl TypicalityParams {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::OutOfRange(format!(
                "typicality tolerance {eps} must be positive and finite"
            )));
        }
        Ok(Self { eps })
    }
}

/// Per-symbol robust typicality: every symbol's count is within `eps`
/// relative deviation of its expectation, so zero-probability symbols must
/// not occur at all. Symbols outside the alphabet make the sequence
/// atypical rather than an error.
pub fn is_typical(seq: &[usize], p: &Pmf, eps: f64) -> bool {
    let mut counts = vec![0usize; p.len()];
    for &s in seq {
        if s >= p.len() {
            return false;
        }
        counts[s] += 1;
    }
    let n = seq.len() as f64;
    counts
        .iter()
        .zip(p.probs())
        .all(|(&c, &q)| (c as f64 - n * q).abs() <= eps * n * q)
}

/// Robust joint typicality of a pair of equal-length sequences against a
/// two-axis joint law: the same per-cell rule as [`is_typical`], applied to
/// the pair-empirical counts.
pub fn jointly_typical(
    seq_a: &[usize],
    seq_b: &[usize],
    joint: &JointPmf,
    eps: f64,
) -> Result<bool> {
    if seq_a.len() != seq_b.len() {
        return Err(Error::LengthMismatch(format!(
            "paired sequences have lengths {} and {}",
            seq_a.len(),
            seq_b.len()
        )));
    }
    am::require_pair(joint)?;
    let (na, nb) = (joint.sizes()[0], joint.sizes()[1]);
    let mut counts = vec![0usize; na * nb];
    for (&a, &b) in seq_a.iter().zip(seq_b) {
        if a >= na || b >= nb {
            return Ok(false);
        }
        counts[a * nb + b] += 1;
    }
    let n = seq_a.len() as f64;
    Ok(counts
        .iter()
        .zip(joint.probs())
        .all(|(&c, &p)| (c as f64 - n * p).abs() <= eps * n * p))
}

/// A realized pair of block encoders: a bin table over typical X blocks and
/// a list of quantizer codewords for Y blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    n: usize,
    num_bins: usize,
    /// Bin index per X block (lexicographic flat index); [`ATYPICAL`] marks
    /// blocks outside the typical set.
    bins: Vec<u32>,
    vq_codewords: Vec<Vec<usize>>,
    channel: AuxChannel,
    target_delta_a: f64,
    eps: f64,
    seed: u64,
    /// X marginal used for typicality of source blocks.
    p_x: Pmf,
    /// Joint law of (Y, U) used for joint typicality in [`encode_y`].
    joint_yu: JointPmf,
}

impl Codebook {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_bins(&self) -> usize {
        self.num_bins
    }

    pub fn num_codewords(&self) -> usize {
        self.vq_codewords.len()
    }

    pub fn codeword(&self, l: usize) -> &[usize] {
        &self.vq_codewords[l]
    }

    pub fn channel(&self) -> &AuxChannel {
        &self.channel
    }

    pub fn target_delta_a(&self) -> f64 {
        self.target_delta_a
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Bin assigned to a typical X block; `None` for wrong-length,
    /// out-of-alphabet, or atypical input.
    pub fn bin_of(&self, xseq: &[usize]) -> Option<u32> {
        if xseq.len() != self.n {
            return None;
        }
        let flat = flat_index(xseq, self.p_x.len())?;
        match self.bins[flat] {
            ATYPICAL => None,
            b => Some(b),
        }
    }
}

/// Exact information rates achieved by one realized codebook, measured by
/// full enumeration of the block distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    /// Revealed information about the X block, `(1/n) I(X^n; F_x, F_y)`.
    pub delta_a_measured: f64,
    /// Revealed information about the Y block, `(1/n) I(Y^n; F_x, F_y)`.
    pub delta_m_measured: f64,
    /// Residual uncertainty about the X block, `(1/n) H(X^n | F_x, F_y)`.
    pub residual_entropy: f64,
    /// Probability that at least one encoder declares an error.
    pub encoder_failure_prob: f64,
    pub n: usize,
    pub target_delta_a: f64,
    pub eps: f64,
}

/// Most-significant-digit-first expansion of a flat sequence index.
fn digits(mut flat: usize, base: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = flat % base;
        flat /= base;
    }
}

/// Inverse of [`digits`]; `None` if any symbol is outside the alphabet.
fn flat_index(seq: &[usize], base: usize) -> Option<usize> {
    let mut flat = 0usize;
    for &s in seq {
        if s >= base {
            return None;
        }
        flat = flat * base + s;
    }
    Some(flat)
}

fn eta(t: f64) -> f64 {
    if t > 0.0 {
        -t * t.log2()
    } else {
        0.0
    }
}

/// Inverse-CDF draw from an explicit probability vector; zero-probability
/// symbols are never produced.
fn sample_index(rng: &mut ChaCha12Rng, probs: &[f64]) -> usize {
    let r: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for (k, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last = k;
            acc += p;
            if r < acc {
                return k;
            }
        }
    }
    last
}

/// Draw a codebook for the given two-axis source law and quantization
/// channel `p(u|y)`.
///
/// Sizing follows the standard achievability recipe: the bin count is
/// `ceil(2^{n (target_delta_a − I(X;U) + eps)})` clamped to at least one
/// bin, and the codeword count is `2^{ceil(n (I(Y;U) + eps))}`. Bins are
/// assigned i.i.d. uniformly to typical X blocks in lexicographic order,
/// then codewords are drawn i.i.d. from the product of the U marginal, all
/// from a single seeded stream, so the result is a pure function of
/// `(j, ch, target_delta_a, eps, n, seed)`.
pub fn build_codebook(
    j: &JointPmf,
    ch: &AuxChannel,
    target_delta_a: f64,
    eps: f64,
    n: usize,
    seed: u64,
) -> Result<Codebook> {
    let (x_axis, y_axis) = am::require_pair(j)?;
    let (x_axis, y_axis) = (x_axis.to_string(), y_axis.to_string());
    TypicalityParams::new(eps)?;
    if n == 0 {
        return Err(Error::OutOfRange("blocklength must be ≥ 1".into()));
    }
    let coords = am::am_coordinates(j, ch)?;
    if !target_delta_a.is_finite()
        || target_delta_a < -am::FEAS_TOL
        || target_delta_a > coords.h_x + am::FEAS_TOL
    {
        return Err(Error::OutOfRange(format!(
            "amplification target {target_delta_a} outside [0, {}]",
            coords.h_x
        )));
    }
    let target_delta_a = target_delta_a.clamp(0.0, coords.h_x);

    let bin_exponent = n as f64 * (target_delta_a - coords.i_xu + eps);
    let num_bins = if bin_exponent <= 0.0 {
        1
    } else {
        let raw = bin_exponent.exp2().ceil();
        if raw > MAX_BINS as f64 {
            return Err(Error::SizeGuard(format!(
                "bin count 2^{bin_exponent:.2} exceeds the cap {MAX_BINS}"
            )));
        }
        raw as usize
    };
    let cw_exponent = (n as f64 * (coords.i_yu + eps)).ceil().max(0.0);
    if cw_exponent > 26.0 {
        return Err(Error::SizeGuard(format!(
            "codeword count 2^{cw_exponent} exceeds the enumeration cap"
        )));
    }
    let num_codewords = 1usize << cw_exponent as u32;
    if (num_codewords as u128) * (n as u128) > oracle::ENUM_CAP {
        return Err(Error::SizeGuard(format!(
            "codeword storage {num_codewords}×{n} exceeds the enumeration cap"
        )));
    }

    let p_x = Pmf::new(j.marginalize(&[&x_axis])?.probs().to_vec())?;
    let u_label = am::fresh_label(std::slice::from_ref(&y_axis), "U");
    let joint_yu = j
        .marginalize(&[&y_axis])?
        .attach_channel(&y_axis, ch, &u_label)?;
    let p_u = joint_yu.marginalize(&[&u_label])?.probs().to_vec();

    let x_count = oracle::sequence_count(p_x.len(), n)?;
    let mut rng = stream_rng(seed, STREAM_CODEBOOK);
    let mut bins = vec![ATYPICAL; x_count];
    let mut seq = vec![0usize; n];
    for (flat, slot) in bins.iter_mut().enumerate() {
        digits(flat, p_x.len(), &mut seq);
        if is_typical(&seq, &p_x, eps) {
            *slot = rng.gen_range(0..num_bins as u32);
        }
    }
    let mut vq_codewords = Vec::with_capacity(num_codewords);
    for _ in 0..num_codewords {
        let mut cw = vec![0usize; n];
        for slot in cw.iter_mut() {
            *slot = sample_index(&mut rng, &p_u);
        }
        vq_codewords.push(cw);
    }

    Ok(Codebook {
        n,
        num_bins,
        bins,
        vq_codewords,
        channel: ch.clone(),
        target_delta_a,
        eps,
        seed,
        p_x,
        joint_yu,
    })
}

/// Bin index of a typical X block; [`Error::AtypicalInput`] otherwise.
pub fn encode_x(cb: &Codebook, xseq: &[usize]) -> Result<u32> {
    if xseq.len() != cb.n {
        return Err(Error::LengthMismatch(format!(
            "block length {} but the codebook expects {}",
            xseq.len(),
            cb.n
        )));
    }
    match flat_index(xseq, cb.p_x.len()) {
        Some(flat) if cb.bins[flat] != ATYPICAL => Ok(cb.bins[flat]),
        _ => Err(Error::AtypicalInput),
    }
}

/// Lowest codeword index jointly typical with the Y block;
/// [`Error::NoCover`] when no codeword qualifies.
pub fn encode_y(cb: &Codebook, yseq: &[usize]) -> Result<u32> {
    if yseq.len() != cb.n {
        return Err(Error::LengthMismatch(format!(
            "block length {} but the codebook expects {}",
            yseq.len(),
            cb.n
        )));
    }
    for (l, cw) in cb.vq_codewords.iter().enumerate() {
        if jointly_typical(yseq, cw, &cb.joint_yu, cb.eps)? {
            return Ok(l as u32);
        }
    }
    Err(Error::NoCover)
}

/// Materialize both encoders as total lookup tables, with failures mapped to
/// a dedicated error symbol appended after the regular indices (`num_bins`
/// for the X side, `num_codewords` for the Y side).
pub fn induced_tables(cb: &Codebook) -> Result<(EncoderTable, EncoderTable)> {
    let x_err = cb.num_bins as u32;
    let fx: Vec<u32> = cb
        .bins
        .iter()
        .map(|&b| if b == ATYPICAL { x_err } else { b })
        .collect();
    let ny = cb.channel.input_size();
    let y_count = oracle::sequence_count(ny, cb.n)?;
    let y_err = cb.vq_codewords.len() as u32;
    let mut fy = vec![0u32; y_count];
    let mut seq = vec![0usize; cb.n];
    for (yflat, slot) in fy.iter_mut().enumerate() {
        digits(yflat, ny, &mut seq);
        *slot = encode_y(cb, &seq).unwrap_or(y_err);
    }
    Ok((
        EncoderTable::new(cb.n, cb.p_x.len(), cb.num_bins + 1, fx)?,
        EncoderTable::new(cb.n, ny, cb.vq_codewords.len() + 1, fy)?,
    ))
}

/// One enumeration pass over all block pairs with `outer` on one axis:
/// accumulates the entropy of the outer block and of the pair
/// (outer block, inner message), and hands each outer block's inner-message
/// mass histogram to `sink`.
#[allow(clippy::too_many_arguments)]
fn entropy_pass(
    probs: &[f64],
    ny: usize,
    n: usize,
    outer_is_x: bool,
    outer_count: usize,
    outer_base: usize,
    inner_count: usize,
    inner_base: usize,
    inner_msgs: &[u32],
    inner_msg_total: usize,
    mut sink: impl FnMut(usize, &[f64]),
) -> (f64, f64) {
    // Buffer the inner digit matrix when small; otherwise re-expand per pair.
    let inner_mat: Option<Vec<usize>> = if inner_count.saturating_mul(n) <= (1 << 24) {
        let mut m = vec![0usize; inner_count * n];
        for iflat in 0..inner_count {
            digits(iflat, inner_base, &mut m[iflat * n..(iflat + 1) * n]);
        }
        Some(m)
    } else {
        None
    };
    let mut odig = vec![0usize; n];
    let mut scratch = vec![0usize; n];
    let mut hist = vec![0f64; inner_msg_total];
    let mut h_outer = 0.0;
    let mut h_pair = 0.0;
    for oflat in 0..outer_count {
        digits(oflat, outer_base, &mut odig);
        hist.iter_mut().for_each(|m| *m = 0.0);
        for iflat in 0..inner_count {
            let idig: &[usize] = match inner_mat.as_deref() {
                Some(m) => &m[iflat * n..(iflat + 1) * n],
                None => {
                    digits(iflat, inner_base, &mut scratch);
                    &scratch
                }
            };
            let mut mass = 1.0;
            if outer_is_x {
                for t in 0..n {
                    mass *= probs[odig[t] * ny + idig[t]];
                }
            } else {
                for t in 0..n {
                    mass *= probs[idig[t] * ny + odig[t]];
                }
            }
            hist[inner_msgs[iflat] as usize] += mass;
        }
        let total: f64 = hist.iter().sum();
        h_outer += eta(total);
        h_pair += hist.iter().map(|&m| eta(m)).sum::<f64>();
        sink(oflat, &hist);
    }
    (h_outer, h_pair)
}

/// Exact evaluation of one realized codebook under the given two-axis law:
/// full enumeration of all block pairs, with encoder failures folded into
/// the reserved error symbols so both encoders are total. Sequential and
/// deterministic; parallelism belongs at the level of independent codebooks.
pub fn evaluate_exact(cb: &Codebook, j: &JointPmf) -> Result<SimReport> {
    am::require_pair(j)?;
    let (nx, ny) = (j.sizes()[0], j.sizes()[1]);
    if nx != cb.p_x.len() || ny != cb.channel.input_size() {
        return Err(Error::DimensionMismatch(format!(
            "law has shape {nx}×{ny} but the codebook was built for {}×{}",
            cb.p_x.len(),
            cb.channel.input_size()
        )));
    }
    let n = cb.n;
    let x_count = oracle::sequence_count(nx, n)?;
    let y_count = oracle::sequence_count(ny, n)?;
    if (x_count as u128) * (y_count as u128) > oracle::ENUM_CAP {
        return Err(Error::SizeGuard(format!(
            "{x_count}×{y_count} block pairs exceed the enumeration cap"
        )));
    }
    let mx_total = cb.num_bins + 1;
    let my_total = cb.vq_codewords.len() + 1;
    if (mx_total as u128) * (my_total as u128) > oracle::ENUM_CAP {
        return Err(Error::SizeGuard(format!(
            "{mx_total}×{my_total} message pairs exceed the enumeration cap"
        )));
    }

    let (fx_table, fy_table) = induced_tables(cb)?;
    let fx: Vec<u32> = (0..x_count).map(|f| fx_table.message(f)).collect();
    let fy: Vec<u32> = (0..y_count).map(|f| fy_table.message(f)).collect();

    let probs = j.probs();
    let mut q = vec![0f64; mx_total * my_total];
    let (h_xn, h_xn_fy) = entropy_pass(
        probs,
        ny,
        n,
        true,
        x_count,
        nx,
        y_count,
        ny,
        &fy,
        my_total,
        |xflat, hist| {
            let row = fx[xflat] as usize * my_total;
            for (cell, &m) in hist.iter().enumerate() {
                q[row + cell] += m;
            }
        },
    );
    let (h_yn, h_yn_fx) = entropy_pass(
        probs,
        ny,
        n,
        false,
        y_count,
        ny,
        x_count,
        nx,
        &fx,
        mx_total,
        |_, _| {},
    );
    let h_msgs: f64 = q.iter().map(|&m| eta(m)).sum();

    let mut failure = 0.0;
    for myv in 0..my_total {
        failure += q[(mx_total - 1) * my_total + myv];
    }
    for mxv in 0..mx_total - 1 {
        failure += q[mxv * my_total + (my_total - 1)];
    }

    let nf = n as f64;
    Ok(SimReport {
        delta_a_measured: ((h_xn + h_msgs - h_xn_fy) / nf).max(0.0),
        delta_m_measured: ((h_yn + h_msgs - h_yn_fx) / nf).max(0.0),
        residual_entropy: ((h_xn_fy - h_msgs) / nf).max(0.0),
        encoder_failure_prob: failure.clamp(0.0, 1.0),
        n,
        target_delta_a: cb.target_delta_a,
        eps: cb.eps,
    })
}

/// Gap between the measured residual uncertainty and the ideal residual
/// `H(X) − target_delta_a`; positive values measure the finite-blocklength
/// overhead of the scheme.
pub fn appendix_slack(report: &SimReport, j: &JointPmf) -> Result<f64> {
    let (x_axis, _) = am::require_pair(j)?;
    let h_x = j.marginalize(&[x_axis])?.entropy();
    Ok(report.residual_entropy - (h_x - report.target_delta_a))
}

/// Blend two reports as if timesharing the two schemes over a long run of
/// blocks, using weight `theta` for the first: every information field is
/// combined convexly; the blocklength becomes the rounded weighted mean.
pub fn timeshare_evaluate(rep1: &SimReport, rep2: &SimReport, theta: f64) -> Result<SimReport> {
    if !theta.is_finite() || !(0.0..=1.0).contains(&theta) {
        return Err(Error::OutOfRange(format!(
            "timesharing weight {theta} outside [0, 1]"
        )));
    }
    let mix = |a: f64, b: f64| theta * a + (1.0 - theta) * b;
    Ok(SimReport {
        delta_a_measured: mix(rep1.delta_a_measured, rep2.delta_a_measured),
        delta_m_measured: mix(rep1.delta_m_measured, rep2.delta_m_measured),
        residual_entropy: mix(rep1.residual_entropy, rep2.residual_entropy),
        encoder_failure_prob: mix(rep1.encoder_failure_prob, rep2.encoder_failure_prob),
        n: mix(rep1.n as f64, rep2.n as f64).round() as usize,
        target_delta_a: mix(rep1.target_delta_a, rep2.target_delta_a),
        eps: mix(rep1.eps, rep2.eps),
    })
}
