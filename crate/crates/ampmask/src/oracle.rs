//! Finite-blocklength ground truth: exact information conveyed by concrete
//! deterministic block encoders.
//!
//! Everything the single-letter regions promise must be witnessed (inner
//! bound) or never beaten (converse) by actual codes. This module evaluates
//! `(1/n)·I(X^n; F_x, F_y)` and `(1/n)·I(Y^n; F_x, F_y)` exactly for any pair
//! of encoder tables by full enumeration of sequence pairs, and enumerates
//! every deterministic encoder pair at tiny blocklengths.
//!
//! Since each message is a deterministic function of its own source block,
//! `I(X^n; F_x, F_y) = H(F_x, F_y) − H(F_y | X^n)` and symmetrically for `Y^n`
//! — only message histograms are ever materialized, never the full joint over
//! sequence pairs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::info::JointPmf;
use crate::region::am::require_pair;
use crate::search::stream_rng;
use rand::Rng;
use rand_chacha::ChaCha12Rng;

/// Cap on `|X|^n · |Y|^n` (and on each pass's histogram work).
pub const ENUM_CAP: u128 = 1 << 26;

/// Cap on the number of encoder pairs an exhaustive sweep may evaluate.
pub const PAIR_CAP: u128 = 1_000_000;

const STREAM_ORACLE: u64 = 3 << 40;

/// −t·log₂(t), the entropy summand (0 at t = 0).
fn eta(t: f64) -> f64 {
    if t > 0.0 {
        -t * t.log2()
    } else {
        0.0
    }
}

/// Big-endian digit expansion: `out[0]` is the first (most significant)
/// symbol, so numeric order of `flat` is lexicographic order of sequences.
fn digits(mut flat: usize, base: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = flat % base;
        flat /= base;
    }
}

/// Visit all `base^n` sequences in lexicographic order. `weight(t, digit)`
/// gives the per-position factor; `visit(flat, product)` receives the full
/// product for each sequence. Prefix products are patched incrementally, so
/// the amortized cost per sequence is O(1) multiplications.
fn walk_products<W, V>(n: usize, base: usize, total: usize, weight: W, mut visit: V)
where
    W: Fn(usize, usize) -> f64,
    V: FnMut(usize, f64),
{
    let mut dig = vec![0usize; n];
    let mut pref = vec![1.0f64; n + 1];
    for t in 0..n {
        pref[t + 1] = pref[t] * weight(t, 0);
    }
    for flat in 0..total {
        visit(flat, pref[n]);
        if flat + 1 == total {
            break;
        }
        let mut t = n - 1;
        loop {
            dig[t] += 1;
            if dig[t] < base {
                break;
            }
            dig[t] = 0;
            t -= 1;
        }
        for s in t..n {
            pref[s + 1] = pref[s] * weight(s, dig[s]);
        }
    }
}

/// A deterministic block encoder: a total map from length-`n` sequences over
/// an input alphabet to message indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncoderTable {
    n: usize,
    input_alphabet: usize,
    num_messages: usize,
    table: Vec<u32>,
}

pub(crate) fn sequence_count(alphabet: usize, n: usize) -> Result<usize> {
    alphabet
        .checked_pow(u32::try_from(n).map_err(|_| {
            Error::SizeGuard(format!("blocklength {n} overflows the sequence space"))
        })?)
        .filter(|&c| c as u128 <= ENUM_CAP)
        .ok_or_else(|| {
            Error::SizeGuard(format!(
                "{alphabet}^{n} sequences exceed the enumeration cap {ENUM_CAP}"
            ))
        })
}

impl EncoderTable {
    /// `table[flat]` is the message sent for the sequence with lexicographic
    /// index `flat` (first symbol most significant).
    pub fn new(n: usize, input_alphabet: usize, num_messages: usize, table: Vec<u32>) -> Result<Self> {
        if n == 0 || input_alphabet == 0 {
            return Err(Error::OutOfRange(
                "blocklength and alphabet must be ≥ 1".into(),
            ));
        }
        if num_messages == 0 || num_messages > u32::MAX as usize {
            return Err(Error::OutOfRange(format!(
                "message count {num_messages} outside [1, 2^32)"
            )));
        }
        let count = sequence_count(input_alphabet, n)?;
        if table.len() != count {
            return Err(Error::LengthMismatch(format!(
                "encoder table covers {} sequences, expected {count}",
                table.len()
            )));
        }
        if let Some(&bad) = table.iter().find(|&&m| m as usize >= num_messages) {
            return Err(Error::OutOfRange(format!(
                "table entry {bad} outside [0, {num_messages})"
            )));
        }
        Ok(Self { n, input_alphabet, num_messages, table })
    }

    /// Single-message encoder: reveals nothing.
    pub fn constant(n: usize, input_alphabet: usize) -> Result<Self> {
        let count = sequence_count(input_alphabet, n)?;
        Self::new(n, input_alphabet, 1, vec![0; count])
    }

    /// One message per sequence: reveals everything.
    pub fn identity(n: usize, input_alphabet: usize) -> Result<Self> {
        let count = sequence_count(input_alphabet, n)?;
        Self::new(n, input_alphabet, count, (0..count as u32).collect())
    }

    /// Uniformly random table, deterministic given the rng state.
    pub fn random(
        n: usize,
        input_alphabet: usize,
        num_messages: usize,
        rng: &mut ChaCha12Rng,
    ) -> Result<Self> {
        if num_messages == 0 || num_messages > u32::MAX as usize {
            return Err(Error::OutOfRange(format!(
                "message count {num_messages} outside [1, 2^32)"
            )));
        }
        let count = sequence_count(input_alphabet, n)?;
        let table = (0..count)
            .map(|_| rng.gen_range(0..num_messages as u32))
            .collect();
        Self::new(n, input_alphabet, num_messages, table)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn input_alphabet(&self) -> usize {
        self.input_alphabet
    }

    pub fn num_messages(&self) -> usize {
        self.num_messages
    }

    /// Message for the sequence at lexicographic index `flat`.
    pub fn message(&self, flat: usize) -> u32 {
        self.table[flat]
    }

    /// Bits per source symbol this encoder's message budget costs.
    pub fn rate(&self) -> f64 {
        (self.num_messages as f64).log2() / self.n as f64
    }
}

/// Exact normalized information of one encoder pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiLetterPoint {
    /// (1/n)·I(X^n; F_x, F_y) in bits per symbol.
    pub ix: f64,
    /// (1/n)·I(Y^n; F_x, F_y) in bits per symbol.
    pub iy: f64,
    pub n: usize,
    pub rx: f64,
    pub ry: f64,
}

fn check_pair_shape(j: &JointPmf, fx: &EncoderTable, fy: &EncoderTable) -> Result<(usize, usize)> {
    require_pair(j)?;
    let (nx, ny) = (j.sizes()[0], j.sizes()[1]);
    if fx.input_alphabet != nx || fy.input_alphabet != ny {
        return Err(Error::DimensionMismatch(format!(
            "encoder alphabets ({}, {}) do not match the source ({nx}, {ny})",
            fx.input_alphabet, fy.input_alphabet
        )));
    }
    if fx.n != fy.n {
        return Err(Error::DimensionMismatch(format!(
            "blocklengths differ: {} vs {}",
            fx.n, fy.n
        )));
    }
    let x_count = fx.table.len() as u128;
    let y_count = fy.table.len() as u128;
    let mx = fx.num_messages as u128;
    let my = fy.num_messages as u128;
    for (what, load) in [
        ("sequence pairs", x_count * y_count),
        ("message pairs", mx * my),
        ("first-pass histograms", x_count * my),
        ("second-pass histograms", y_count * mx),
    ] {
        if load > ENUM_CAP {
            return Err(Error::SizeGuard(format!(
                "{what} count {load} exceeds the enumeration cap {ENUM_CAP}"
            )));
        }
    }
    Ok((nx, ny))
}

/// Exact `(1/n)·I(X^n;F_x,F_y)` and `(1/n)·I(Y^n;F_x,F_y)` under the i.i.d.
/// product law of `j`, by full enumeration of sequence pairs.
pub fn evaluate_pair(j: &JointPmf, fx: &EncoderTable, fy: &EncoderTable) -> Result<MultiLetterPoint> {
    let (nx, ny) = check_pair_shape(j, fx, fy)?;
    let n = fx.n;
    let p = j.probs(); // p[x·|Y| + y]
    let x_count = fx.table.len();
    let y_count = fy.table.len();
    let mx = fx.num_messages;
    let my = fy.num_messages;

    // Pass 1 (outer X^n): the joint message histogram q, H(X^n), H(F_y, X^n).
    let mut q = vec![0.0f64; mx * my];
    let mut h_xn = 0.0;
    let mut h_fy_xn = 0.0;
    let mut inner = vec![0.0f64; my];
    let mut xdig = vec![0usize; n];
    for xflat in 0..x_count {
        digits(xflat, nx, &mut xdig);
        inner.fill(0.0);
        walk_products(n, ny, y_count, |t, yd| p[xdig[t] * ny + yd], |yflat, mass| {
            inner[fy.table[yflat] as usize] += mass;
        });
        let px: f64 = inner.iter().sum();
        h_xn += eta(px);
        let row = fx.table[xflat] as usize * my;
        for (mi, &v) in inner.iter().enumerate() {
            h_fy_xn += eta(v);
            q[row + mi] += v;
        }
    }

    // Pass 2 (outer Y^n): H(Y^n), H(F_x, Y^n).
    let mut h_yn = 0.0;
    let mut h_fx_yn = 0.0;
    let mut inner = vec![0.0f64; mx];
    let mut ydig = vec![0usize; n];
    for yflat in 0..y_count {
        digits(yflat, ny, &mut ydig);
        inner.fill(0.0);
        walk_products(n, nx, x_count, |t, xd| p[xd * ny + ydig[t]], |xflat, mass| {
            inner[fx.table[xflat] as usize] += mass;
        });
        let py: f64 = inner.iter().sum();
        h_yn += eta(py);
        for &v in inner.iter() {
            h_fx_yn += eta(v);
        }
    }

    let h_msgs: f64 = q.iter().map(|&v| eta(v)).sum();
    let h_fy_given_xn = (h_fy_xn - h_xn).max(0.0);
    let h_fx_given_yn = (h_fx_yn - h_yn).max(0.0);
    let scale = n as f64;
    Ok(MultiLetterPoint {
        ix: (h_msgs - h_fy_given_xn).max(0.0) / scale,
        iy: (h_msgs - h_fx_given_yn).max(0.0) / scale,
        n,
        rx: fx.rate(),
        ry: fy.rate(),
    })
}

/// Random access into the set of all `num_messages^(alphabet^n)` encoder
/// tables, in a fixed (base-`num_messages` digit) order.
#[derive(Debug, Clone)]
pub struct TableEnumeration {
    n: usize,
    input_alphabet: usize,
    num_messages: usize,
    seq_count: usize,
    len: u128,
}

impl TableEnumeration {
    pub fn new(n: usize, input_alphabet: usize, num_messages: usize) -> Result<Self> {
        if num_messages == 0 || num_messages > u32::MAX as usize {
            return Err(Error::OutOfRange(format!(
                "message count {num_messages} outside [1, 2^32)"
            )));
        }
        let seq_count = sequence_count(input_alphabet, n)?;
        let len = if num_messages == 1 {
            1
        } else {
            u32::try_from(seq_count)
                .ok()
                .and_then(|e| (num_messages as u128).checked_pow(e))
                .filter(|&l| l <= PAIR_CAP)
                .ok_or_else(|| {
                    Error::SizeGuard(format!(
                        "{num_messages}^{seq_count} encoder tables exceed the sweep cap {PAIR_CAP}"
                    ))
                })?
        };
        Ok(Self { n, input_alphabet, num_messages, seq_count, len })
    }

    pub fn len(&self) -> u128 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, idx: u128) -> EncoderTable {
        assert!(idx < self.len, "table index {idx} out of range");
        let m = self.num_messages as u128;
        let mut v = idx;
        let mut table = vec![0u32; self.seq_count];
        for slot in table.iter_mut() {
            *slot = (v % m) as u32;
            v /= m;
        }
        EncoderTable {
            n: self.n,
            input_alphabet: self.input_alphabet,
            num_messages: self.num_messages,
            table,
        }
    }
}

fn collect_points(results: Vec<Result<MultiLetterPoint>>) -> Result<Vec<MultiLetterPoint>> {
    let mut points = Vec::with_capacity(results.len());
    for r in results {
        points.push(r?);
    }
    Ok(points)
}

/// Every deterministic encoder pair with `mx`/`my` messages at blocklength
/// `n`, evaluated exactly; near-duplicate points (1e-12) are merged.
pub fn exhaustive_frontier(
    j: &JointPmf,
    n: usize,
    mx: usize,
    my: usize,
) -> Result<Vec<MultiLetterPoint>> {
    require_pair(j)?;
    let ex = TableEnumeration::new(n, j.sizes()[0], mx)?;
    let ey = TableEnumeration::new(n, j.sizes()[1], my)?;
    let pairs = ex
        .len()
        .checked_mul(ey.len())
        .filter(|&c| c <= PAIR_CAP)
        .ok_or_else(|| {
            Error::SizeGuard(format!(
                "{}×{} encoder pairs exceed the sweep cap {PAIR_CAP}",
                ex.len(),
                ey.len()
            ))
        })?;
    let ey_len = ey.len();
    let results = exec::map_indexed(pairs as usize, |i| {
        let i = i as u128;
        evaluate_pair(j, &ex.get(i / ey_len), &ey.get(i % ey_len))
    });
    let mut points = collect_points(results)?;
    points.sort_by(|a, b| a.ix.total_cmp(&b.ix).then(a.iy.total_cmp(&b.iy)));
    points.dedup_by(|a, b| (a.ix - b.ix).abs() <= 1e-12 && (a.iy - b.iy).abs() <= 1e-12);
    Ok(points)
}

/// `trials` uniformly random encoder pairs, deterministic given `seed`; all
/// points are kept (no deduplication).
pub fn random_frontier(
    j: &JointPmf,
    n: usize,
    mx: usize,
    my: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<MultiLetterPoint>> {
    require_pair(j)?;
    let (nx, ny) = (j.sizes()[0], j.sizes()[1]);
    // validate shapes once up front so the parallel trials cannot fail
    {
        let mut probe = stream_rng(seed, STREAM_ORACLE);
        let fx = EncoderTable::random(n, nx, mx, &mut probe)?;
        let fy = EncoderTable::random(n, ny, my, &mut probe)?;
        check_pair_shape(j, &fx, &fy)?;
    }
    let results = exec::map_indexed(trials, |t| {
        let mut rng = stream_rng(seed, STREAM_ORACLE | t as u64);
        let fx = EncoderTable::random(n, nx, mx, &mut rng).expect("validated above");
        let fy = EncoderTable::random(n, ny, my, &mut rng).expect("validated above");
        evaluate_pair(j, &fx, &fy)
    });
    collect_points(results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::testutil::{assert_close, skew_joint, H_Y, I_XY};
    use proptest::prelude::*;

    #[test]
    fn identity_and_constant_reproduce_single_letter_quantities() {
        let j = skew_joint();
        let fx = EncoderTable::identity(1, 2).unwrap();
        let fy = EncoderTable::constant(1, 2).unwrap();
        let pt = evaluate_pair(&j, &fx, &fy).unwrap();
        assert_close(pt.ix, 1.0, 1e-12);
        assert_close(pt.iy, I_XY, 1e-12);
        assert_close(pt.rx, 1.0, 1e-12);
        assert_close(pt.ry, 0.0, 1e-12);

        let fy_id = EncoderTable::identity(1, 2).unwrap();
        let pt = evaluate_pair(&j, &fx, &fy_id).unwrap();
        assert_close(pt.ix, 1.0, 1e-12);
        assert_close(pt.iy, H_Y, 1e-12);
    }

    #[test]
    fn constant_encoders_convey_nothing() {
        let j = skew_joint();
        for n in [1usize, 2, 3] {
            let fx = EncoderTable::constant(n, 2).unwrap();
            let fy = EncoderTable::constant(n, 2).unwrap();
            let pt = evaluate_pair(&j, &fx, &fy).unwrap();
            assert_eq!(pt.ix, 0.0);
            assert_eq!(pt.iy, 0.0);
        }
    }

    #[test]
    fn blockwise_identity_attains_block_entropies() {
        let j = skew_joint();
        let fx = EncoderTable::identity(2, 2).unwrap();
        let fy = EncoderTable::identity(2, 2).unwrap();
        let pt = evaluate_pair(&j, &fx, &fy).unwrap();
        // i.i.d. blocks: (1/n)·H(X^n) = H(X)
        assert_close(pt.ix, 1.0, 1e-12);
        assert_close(pt.iy, H_Y, 1e-12);
    }

    #[test]
    fn shape_violations_are_rejected() {
        let j = skew_joint();
        let f1 = EncoderTable::constant(1, 2).unwrap();
        let f2 = EncoderTable::constant(2, 2).unwrap();
        assert!(matches!(
            evaluate_pair(&j, &f1, &f2),
            Err(Error::DimensionMismatch(_))
        ));
        let f3 = EncoderTable::constant(1, 3).unwrap();
        assert!(matches!(
            evaluate_pair(&j, &f3, &f1),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn table_validation() {
        assert!(EncoderTable::new(1, 2, 2, vec![0, 1]).is_ok());
        assert!(matches!(
            EncoderTable::new(1, 2, 2, vec![0]),
            Err(Error::LengthMismatch(_))
        ));
        assert!(matches!(
            EncoderTable::new(1, 2, 2, vec![0, 2]),
            Err(Error::OutOfRange(_))
        ));
        assert!(matches!(
            EncoderTable::new(0, 2, 2, vec![]),
            Err(Error::OutOfRange(_))
        ));
        assert!(matches!(
            EncoderTable::constant(64, 2),
            Err(Error::SizeGuard(_))
        ));
        let id = EncoderTable::identity(2, 2).unwrap();
        assert_close(id.rate(), 1.0, 1e-12);
        let quad = EncoderTable::new(1, 2, 4, vec![0, 3]).unwrap();
        assert_close(quad.rate(), 2.0, 1e-12);
    }

    #[test]
    fn enumeration_counts_match_function_spaces() {
        // 2 messages over the 2 sequences of n=1 → 4 tables; pairs 4×4 = 16
        let e = TableEnumeration::new(1, 2, 2).unwrap();
        assert_eq!(e.len(), 4);
        // n=2 → 16 tables per encoder; pairs 256
        let e2 = TableEnumeration::new(2, 2, 2).unwrap();
        assert_eq!(e2.len(), 16);
        assert_eq!(e2.len() * e2.len(), 256);
        // all enumerated tables are distinct and well-formed
        let tables: Vec<EncoderTable> = (0..e.len()).map(|i| e.get(i)).collect();
        for (i, a) in tables.iter().enumerate() {
            for b in tables.iter().skip(i + 1) {
                assert_ne!(a, b);
            }
        }
        // 2^16 tables per side is fine alone; 4^16 on one side is not
        assert_eq!(TableEnumeration::new(4, 2, 2).unwrap().len(), 65536);
        assert!(matches!(
            TableEnumeration::new(4, 2, 4),
            Err(Error::SizeGuard(_))
        ));
    }

    #[test]
    fn exhaustive_frontier_small_cases() {
        let j = skew_joint();
        let pts = exhaustive_frontier(&j, 1, 2, 1).unwrap();
        // 4 encoder pairs for X, constant for Y; identity among them
        let max_ix = pts.iter().map(|p| p.ix).fold(0.0, f64::max);
        assert_close(max_ix, 1.0, 1e-12);
        for p in &pts {
            assert!(p.ix >= -1e-12 && p.ix <= 1.0 + 1e-12);
            assert!(p.iy >= -1e-12 && p.iy <= H_Y + 1e-12);
        }

        let pts = exhaustive_frontier(&j, 2, 2, 2).unwrap();
        assert!(!pts.is_empty() && pts.len() <= 256);
        // sorted and deduplicated
        for w in pts.windows(2) {
            let same = (w[0].ix - w[1].ix).abs() <= 1e-12 && (w[0].iy - w[1].iy).abs() <= 1e-12;
            assert!(!same, "duplicate point survived dedup");
        }
        assert!(matches!(
            exhaustive_frontier(&j, 4, 2, 2),
            Err(Error::SizeGuard(_))
        ));
    }

    #[test]
    fn zero_trials_yield_an_empty_list() {
        let j = skew_joint();
        assert!(random_frontier(&j, 2, 2, 2, 0, 0).unwrap().is_empty());
    }

    #[test]
    fn random_frontier_points_respect_entropy_bounds() {
        let j = skew_joint();
        let one = random_frontier(&j, 4, 4, 4, 300, 7).unwrap();
        let two = random_frontier(&j, 4, 4, 4, 300, 7).unwrap();
        assert_eq!(one.len(), 300);
        assert!(one == two, "same seed must reproduce the same points");
        let three = random_frontier(&j, 4, 4, 4, 300, 8).unwrap();
        assert!(one != three, "different seeds should explore different codes");
        for p in &one {
            assert!(p.ix >= 0.0 && p.ix <= 1.0 + 1e-9);
            assert!(p.iy >= 0.0 && p.iy <= H_Y + 1e-9);
            assert_close(p.rx, 0.5, 1e-12);
        }
    }

    /// Split one message of `f` in two by reassigning part of its preimage to
    /// a fresh index; the refined encoder determines the original.
    fn refine(f: &EncoderTable, victim: u32, take_first: usize) -> EncoderTable {
        let mut table = f.table.clone();
        let fresh = f.num_messages as u32;
        let mut taken = 0usize;
        for slot in table.iter_mut() {
            if *slot == victim && taken < take_first {
                *slot = fresh;
                taken += 1;
            }
        }
        EncoderTable::new(f.n, f.input_alphabet, f.num_messages + 1, table).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn refining_an_encoder_never_loses_information(
            seed in 0u64..1000,
            n in 1usize..3,
            split_x in proptest::bool::ANY,
        ) {
            let j = skew_joint();
            let mut rng = stream_rng(seed, 99);
            let fx = EncoderTable::random(n, 2, 2, &mut rng).unwrap();
            let fy = EncoderTable::random(n, 2, 2, &mut rng).unwrap();
            let base = evaluate_pair(&j, &fx, &fy).unwrap();
            let (rfx, rfy) = if split_x {
                (refine(&fx, 0, 1), fy.clone())
            } else {
                (fx.clone(), refine(&fy, 0, 1))
            };
            let refined = evaluate_pair(&j, &rfx, &rfy).unwrap();
            prop_assert!(refined.ix >= base.ix - 1e-12,
                "refinement lost amplification: {} < {}", refined.ix, base.ix);
            prop_assert!(refined.iy >= base.iy - 1e-12,
                "refinement lost leakage: {} < {}", refined.iy, base.iy);
        }
    }
}
