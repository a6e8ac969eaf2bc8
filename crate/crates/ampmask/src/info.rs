//! Discrete distributions with labeled axes and exact information measures.
//!
//! All quantities are in bits. Entropy terms use the 0·log 0 = 0 convention.
//! Mutual informations are clamped to ≥ 0 on return: exact identities cancel
//! to rounding noise of order 1e-16, never below -1e-12 for valid inputs.

use crate::error::{Error, Result};

/// Acceptable deviation of total probability mass from 1.
pub const MASS_TOL: f64 = 1e-9;

/// Hard cap on the number of labeled axes a joint distribution may carry.
pub const MAX_AXES: usize = 5;

fn check_mass(probs: &[f64]) -> Result<()> {
    let mut sum = 0.0;
    for &p in probs {
        if p.is_nan() || p < 0.0 {
            return Err(Error::InvalidPmf(format!("entry {p} is negative or NaN")));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > MASS_TOL {
        return Err(Error::InvalidPmf(format!(
            "total mass {sum} deviates from 1 by more than {MASS_TOL}"
        )));
    }
    Ok(())
}

pub(crate) fn entropy_bits<I: Iterator<Item = f64>>(probs: I) -> f64 {
    let mut h = 0.0;
    for p in probs {
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    // entries infinitesimally above 1 can produce -1e-16; entropy is ≥ 0
    h.max(0.0)
}

/// Probability mass function over a finite alphabet `{0, …, m-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidPmf("empty support".into()));
        }
        check_mass(&probs)?;
        Ok(Self { probs })
    }

    pub fn uniform(m: usize) -> Self {
        Self {
            probs: vec![1.0 / m as f64; m.max(1)],
        }
    }

    pub fn point_mass(m: usize, at: usize) -> Self {
        let mut probs = vec![0.0; m.max(1)];
        probs[at.min(m.saturating_sub(1))] = 1.0;
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn entropy(&self) -> f64 {
        entropy_bits(self.probs.iter().copied())
    }
}

/// Conditional distribution p(u | source): one [`Pmf`] row per source symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxChannel {
    rows: Vec<Pmf>,
}

impl AuxChannel {
    pub fn new(rows: Vec<Pmf>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::DimensionMismatch("channel has no rows".into()));
        }
        let m = rows[0].len();
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::DimensionMismatch(
                "channel rows have differing output sizes".into(),
            ));
        }
        Ok(Self { rows })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows.iter().map(|r| Pmf::new(r.clone())).collect::<Result<_>>()?)
    }

    /// Every input maps to output symbol 0.
    pub fn constant(input_size: usize, output_size: usize) -> Self {
        Self {
            rows: (0..input_size.max(1))
                .map(|_| Pmf::point_mass(output_size, 0))
                .collect(),
        }
    }

    /// Input i maps deterministically to output min(i, output_size-1).
    pub fn identity_embed(input_size: usize, output_size: usize) -> Self {
        Self {
            rows: (0..input_size.max(1))
                .map(|i| Pmf::point_mass(output_size, i))
                .collect(),
        }
    }

    pub fn input_size(&self) -> usize {
        self.rows.len()
    }

    pub fn output_size(&self) -> usize {
        self.rows[0].len()
    }

    pub fn row(&self, i: usize) -> &Pmf {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Pmf] {
        &self.rows
    }
}

/// Dense joint distribution over up to [`MAX_AXES`] labeled axes.
///
/// Storage is row-major with the last axis varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    axes: Vec<String>,
    sizes: Vec<usize>,
    probs: Vec<f64>,
}

impl JointPmf {
    pub fn new<S: Into<String>>(axes: Vec<S>, sizes: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        let axes: Vec<String> = axes.into_iter().map(Into::into).collect();
        if axes.is_empty() || axes.len() > MAX_AXES {
            return Err(Error::DimensionMismatch(format!(
                "need between 1 and {MAX_AXES} axes, got {}",
                axes.len()
            )));
        }
        if axes.len() != sizes.len() {
            return Err(Error::DimensionMismatch(
                "axis labels and sizes disagree in length".into(),
            ));
        }
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].contains(a) {
                return Err(Error::OverlappingSets(format!("axis `{a}` repeated")));
            }
        }
        if sizes.contains(&0) {
            return Err(Error::DimensionMismatch("zero-sized axis".into()));
        }
        let len: usize = sizes.iter().product();
        if probs.len() != len {
            return Err(Error::DimensionMismatch(format!(
                "expected {len} cells, got {}",
                probs.len()
            )));
        }
        check_mass(&probs)?;
        Ok(Self { axes, sizes, probs })
    }

    /// Two-axis joint from a matrix: `rows[i][j] = P(axis0 = i, axis1 = j)`.
    pub fn from_matrix<S: Into<String>>(ax0: S, ax1: S, rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::DimensionMismatch("empty matrix".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged matrix".into()));
        }
        let probs: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::new(vec![ax0.into(), ax1.into()], vec![rows.len(), cols], probs)
    }

    pub fn axes(&self) -> &[String] {
        &self.axes
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn axis_index(&self, label: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a == label)
            .ok_or_else(|| Error::UnknownAxis(label.into()))
    }

    pub fn size_of(&self, label: &str) -> Result<usize> {
        Ok(self.sizes[self.axis_index(label)?])
    }

    pub fn value_at(&self, coords: &[usize]) -> f64 {
        debug_assert_eq!(coords.len(), self.axes.len());
        let mut flat = 0;
        for (c, s) in coords.iter().zip(&self.sizes) {
            flat = flat * s + c;
        }
        self.probs[flat]
    }

    /// Joint entropy of all axes.
    pub fn entropy(&self) -> f64 {
        entropy_bits(self.probs.iter().copied())
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.sizes.len()];
        for i in (0..self.sizes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.sizes[i + 1];
        }
        strides
    }

    fn resolve(&self, labels: &[&str]) -> Result<Vec<usize>> {
        let mut idx = Vec::with_capacity(labels.len());
        for l in labels {
            let i = self.axis_index(l)?;
            if idx.contains(&i) {
                return Err(Error::OverlappingSets(format!("axis `{l}` repeated")));
            }
            idx.push(i);
        }
        Ok(idx)
    }

    /// Sum out everything except `keep`, which also fixes the output order.
    /// An empty `keep` yields the scalar distribution (single cell of mass 1).
    pub fn marginalize(&self, keep: &[&str]) -> Result<JointPmf> {
        let keep_idx = self.resolve(keep)?;
        let strides = self.strides();
        let out_sizes: Vec<usize> = keep_idx.iter().map(|&i| self.sizes[i]).collect();
        let out_len: usize = out_sizes.iter().product();
        let mut out = vec![0.0; out_len.max(1)];
        for (flat, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let mut of = 0;
            for (j, &ax) in keep_idx.iter().enumerate() {
                let coord = (flat / strides[ax]) % self.sizes[ax];
                of = of * out_sizes[j] + coord;
            }
            out[of] += p;
        }
        if keep.is_empty() {
            // scalar marginal: a single certain cell
            return JointPmf::new(vec!["()"], vec![1], vec![out[0]]);
        }
        JointPmf::new(
            keep.iter().map(|s| s.to_string()).collect(),
            out_sizes,
            out,
        )
    }

    pub fn marginal_entropy(&self, axes: &[&str]) -> Result<f64> {
        if axes.is_empty() {
            return Ok(0.0);
        }
        Ok(self.marginalize(axes)?.entropy())
    }

    /// I(A; B | C) in bits, computed as H(A,C) + H(B,C) - H(A,B,C) - H(C).
    pub fn mutual_information(&self, a: &[&str], b: &[&str], given: &[&str]) -> Result<f64> {
        let ia = self.resolve(a)?;
        let ib = self.resolve(b)?;
        let ic = self.resolve(given)?;
        for (set_a, set_b, name) in [(&ia, &ib, "a/b"), (&ia, &ic, "a/given"), (&ib, &ic, "b/given")]
        {
            if set_a.iter().any(|i| set_b.contains(i)) {
                return Err(Error::OverlappingSets(format!("axis sets {name} intersect")));
            }
        }
        fn join<'s>(xs: &[&'s str], ys: &[&'s str]) -> Vec<&'s str> {
            xs.iter().chain(ys.iter()).copied().collect()
        }
        let h_ac = self.marginal_entropy(&join(a, given))?;
        let h_bc = self.marginal_entropy(&join(b, given))?;
        let h_abc = self.marginal_entropy(&join(&join(a, b), given))?;
        let h_c = self.marginal_entropy(given)?;
        let i = h_ac + h_bc - h_abc - h_c;
        debug_assert!(i > -1e-9, "mutual information {i} below tolerance");
        Ok(i.max(0.0))
    }

    /// Extend with `q(.., u) = p(..) · channel(u | source)`, appending the new
    /// axis last.
    pub fn attach_channel(
        &self,
        source: &str,
        channel: &AuxChannel,
        new_axis: &str,
    ) -> Result<JointPmf> {
        let src = self.axis_index(source)?;
        if self.axes.iter().any(|a| a == new_axis) {
            return Err(Error::OverlappingSets(format!(
                "axis `{new_axis}` already present"
            )));
        }
        if self.axes.len() + 1 > MAX_AXES {
            return Err(Error::DimensionMismatch(format!(
                "attaching would exceed {MAX_AXES} axes"
            )));
        }
        if channel.input_size() != self.sizes[src] {
            return Err(Error::DimensionMismatch(format!(
                "channel input size {} but axis `{source}` has size {}",
                channel.input_size(),
                self.sizes[src]
            )));
        }
        let u = channel.output_size();
        let strides = self.strides();
        let mut out = vec![0.0; self.probs.len() * u];
        for (flat, &p) in self.probs.iter().enumerate() {
            let coord = (flat / strides[src]) % self.sizes[src];
            let row = channel.row(coord).probs();
            let base = flat * u;
            for (k, &w) in row.iter().enumerate() {
                out[base + k] = p * w;
            }
        }
        let mut axes: Vec<String> = self.axes.clone();
        axes.push(new_axis.to_string());
        let mut sizes = self.sizes.clone();
        sizes.push(u);
        JointPmf::new(axes, sizes, out)
    }

    /// Reorder axes; `order` must list every axis exactly once.
    pub fn permute(&self, order: &[&str]) -> Result<JointPmf> {
        if order.len() != self.axes.len() {
            return Err(Error::DimensionMismatch(
                "permutation must cover all axes".into(),
            ));
        }
        self.marginalize(order)
    }
}
