//! End-to-end acceptance gate.
//!
//! Every test covers one release criterion and prints exactly one
//! `[PASS] criterion N (...)` / `[FAIL] criterion N (...)` line with the
//! measured numbers; a `[FAIL]` line also fails the test. Tolerances are
//! stated inline next to each check.
//!
//! Two clauses are known not to hold at these blocklengths and are kept red
//! deliberately rather than weakened; the comments on criteria 4 and 5
//! explain the arithmetic behind each shortfall.

use std::sync::OnceLock;

use ampmask::info::{AuxChannel, JointPmf};
use ampmask::oracle::{evaluate_pair, exhaustive_frontier, TableEnumeration};
use ampmask::region::am::DEFAULT_CURVE_GRID;
use ampmask::region::{
    am_coordinates, am_curve, am_curve_detailed, slice_to_region, star_region, Orientation,
    RatePair, StarConfig,
};
use ampmask::search::{sample_channel, SearchConfig};
use ampmask::sim::{appendix_slack, build_codebook, evaluate_exact, induced_tables, SimReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// The reference two-source law used throughout: X uniform binary,
/// P(X=0,Y=0)=1/3, P(X=0,Y=1)=1/6, P(X=1,Y=1)=1/2.
fn skew_joint() -> JointPmf {
    JointPmf::from_matrix("X", "Y", &[vec![1.0 / 3.0, 1.0 / 6.0], vec![0.0, 0.5]])
        .expect("reference joint is valid")
}

/// Print the criterion's single verdict line, then fail the test if any
/// clause missed. Failed clauses are prefixed with `!!` inside the line.
fn report(criterion: &str, clauses: &[(bool, String)]) {
    let ok = clauses.iter().all(|c| c.0);
    let status = if ok { "[PASS]" } else { "[FAIL]" };
    let detail: Vec<String> = clauses
        .iter()
        .map(|(p, d)| if *p { d.clone() } else { format!("!! {d}") })
        .collect();
    let line = format!("{status} {criterion}: {}", detail.join("; "));
    println!("{line}");
    assert!(ok, "{line}");
}

fn median(mut v: Vec<f64>) -> f64 {
    assert!(!v.is_empty());
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Every vertex inside `[0, xmax] × [0, ymax]` up to fp slop.
fn in_box(r: &ampmask::Region2D, xmax: f64, ymax: f64) -> bool {
    r.vertices()
        .iter()
        .all(|&(x, y)| x >= -1e-9 && y >= -1e-9 && x <= xmax + 1e-9 && y <= ymax + 1e-9)
}

#[test]
fn c1_information_kernel_matches_closed_forms() {
    let j = skew_joint();
    let h_x = j.marginal_entropy(&["X"]).unwrap();
    let h_y = j.marginal_entropy(&["Y"]).unwrap();
    let i_xy = j.mutual_information(&["X"], &["Y"], &[]).unwrap();
    report(
        "criterion 1 (information kernel exactness)",
        &[
            (
                (h_x - 1.0).abs() <= 1e-9,
                format!("H(X)={h_x:.12} vs 1.000000000 (tol 1e-9)"),
            ),
            (
                (h_y - 0.918295834).abs() <= 1e-6,
                format!("H(Y)={h_y:.9} vs 0.918295834 (tol 1e-6)"),
            ),
            (
                (i_xy - 0.459147917).abs() <= 1e-6,
                format!("I(X;Y)={i_xy:.9} vs 0.459147917 (tol 1e-6)"),
            ),
        ],
    );
}

#[test]
fn c2_star_regions_are_convex_nested_and_boxed() {
    let j = skew_joint();
    let cfg = StarConfig::default();
    let pairs = [(0.1, 0.7), (0.4, 0.4), (0.5, 0.6)];
    let bundles: Vec<_> = pairs
        .iter()
        .map(|&(rx, ry)| {
            star_region(&j, RatePair::new(rx, ry).unwrap(), &cfg).unwrap()
        })
        .collect();

    let mut clauses = Vec::new();
    for (b, &(rx, ry)) in bundles.iter().zip(&pairs) {
        let regions = [("am", &b.am), ("ma", &b.ma), ("aa", &b.aa), ("star", &b.star)];
        let nonempty = regions.iter().all(|(_, r)| !r.is_empty());
        let max_residual = regions
            .iter()
            .map(|(_, r)| r.convexity_residual())
            .fold(0.0_f64, f64::max);
        let boxed = regions.iter().all(|(_, r)| in_box(r, 1.0, 0.918296));
        clauses.push((
            nonempty,
            format!("({rx},{ry}) all four polygons non-empty"),
        ));
        clauses.push((
            max_residual <= 1e-9,
            format!("({rx},{ry}) convexity residual {max_residual:.2e} ≤ 1e-9"),
        ));
        clauses.push((
            boxed,
            format!("({rx},{ry}) ⊆ [0,1]×[0,0.918296]"),
        ));
    }
    clauses.push((
        bundles[1].star.subset_of(&bundles[2].star, 5e-3),
        "star(0.4,0.4) ⊆ star(0.5,0.6) within 5e-3".to_string(),
    ));
    report("criterion 2 (star-region reproduction)", &clauses);
}

#[test]
fn c3_every_two_letter_code_lies_in_the_searched_slices() {
    let j = skew_joint();
    let h_x = j.marginal_entropy(&["X"]).unwrap();
    let h_y = j.marginal_entropy(&["Y"]).unwrap();
    let rates = RatePair::new(0.5, 0.5).unwrap();

    let pair_count = TableEnumeration::new(2, 2, 2).unwrap().len()
        * TableEnumeration::new(2, 2, 2).unwrap().len();
    let points = exhaustive_frontier(&j, 2, 2, 2).unwrap();

    let cfg = SearchConfig::default();
    let am_slice = slice_to_region(&am_curve(&j, rates, &cfg).unwrap(), h_y, Orientation::Am)
        .clip_to_box(h_x, h_y);
    let jt = j.permute(&["Y", "X"]).unwrap();
    let ma_slice = slice_to_region(
        &am_curve(&jt, rates.swapped(), &cfg).unwrap(),
        h_x,
        Orientation::Am,
    )
    .clip_to_box(h_y, h_x);

    let am_violations = points
        .iter()
        .filter(|p| !am_slice.contains((p.ix, p.iy), 0.02))
        .count();
    let ma_violations = points
        .iter()
        .filter(|p| !ma_slice.contains((p.iy, p.ix), 0.02))
        .count();

    report(
        "criterion 3 (two-letter containment in the searched slices)",
        &[
            (
                pair_count == 256,
                format!("{pair_count} encoder pairs enumerated (expected 256)"),
            ),
            (
                am_violations == 0,
                format!(
                    "{am_violations} of {} distinct (ix,iy) points outside the amplification slice + 0.02",
                    points.len()
                ),
            ),
            (
                ma_violations == 0,
                format!(
                    "{ma_violations} of {} distinct (iy,ix) points outside the mirrored slice + 0.02",
                    points.len()
                ),
            ),
        ],
    );
}

/// The shared seed sweep behind criteria 4 and 5: the default scenario
/// (reference joint, binary auxiliary channel rows (0.75,0.25)/(0.25,0.75),
/// ε=0.05), blocklengths {6, 8, 10}, seeds 0..20. The amplification target is
/// computed at runtime as I(X;U) + H(X|Y)/4, strictly inside the admissible
/// band (I(X;U), I(X;U) + H(X|Y)].
struct Sweep {
    target: f64,
    mask_bound: f64,
    joint: JointPmf,
    channel: AuxChannel,
    /// (n, reports over seeds 0..20) for n in {6, 8, 10}.
    by_n: Vec<(usize, Vec<SimReport>)>,
}

const SWEEP_EPS: f64 = 0.05;
const SWEEP_SEEDS: u64 = 20;

fn run_scenario(j: &JointPmf, ch: &AuxChannel, target: f64, eps: f64, n: usize) -> Vec<SimReport> {
    (0..SWEEP_SEEDS)
        .map(|seed| {
            let cb = build_codebook(j, ch, target, eps, n, seed).unwrap();
            evaluate_exact(&cb, j).unwrap()
        })
        .collect()
}

fn sweep() -> &'static Sweep {
    static SWEEP: OnceLock<Sweep> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let j = skew_joint();
        let ch = AuxChannel::from_rows(&[vec![0.75, 0.25], vec![0.25, 0.75]]).unwrap();
        let co = am_coordinates(&j, &ch).unwrap();
        let i_xy = j.mutual_information(&["X"], &["Y"], &[]).unwrap();
        let target = co.i_xu + 0.25 * (co.h_x - i_xy);
        let mask_bound = co.masking_bound(target);
        let by_n = [6usize, 8, 10]
            .iter()
            .map(|&n| (n, run_scenario(&j, &ch, target, SWEEP_EPS, n)))
            .collect();
        Sweep { target, mask_bound, joint: j, channel: ch, by_n }
    })
}

fn reports_at(s: &Sweep, n: usize) -> &[SimReport] {
    &s.by_n.iter().find(|(m, _)| *m == n).unwrap().1
}

// The failure-probability clause cannot hold at these blocklengths: the
// joint (Y,U) law of the default scenario has a cell of probability 1/12,
// and at n=10 the typicality window n·p·(1±ε) = [8.33·(1−ε), 8.33·(1+ε)]/10
// contains no integer count for any ε ≤ 0.2 — so every covering attempt is
// atypical, encode_y always fails, and the failure probability is 1. Raising
// the covering slack from 0.05 to 0.1 (the documented escape) does not open
// the window: [0.75, 0.917] still contains no integer. The clause is left
// red; the amplification and masking clauses are unaffected because the
// error-symbol convention keeps both encoders total.
#[test]
fn c4_default_scenario_converges_at_blocklength_ten() {
    let s = sweep();
    let at10 = reports_at(s, 10);
    let med_da = median(at10.iter().map(|r| r.delta_a_measured).collect());
    let med_dm = median(at10.iter().map(|r| r.delta_m_measured).collect());
    let med_fail = median(at10.iter().map(|r| r.encoder_failure_prob).collect());

    // Documented escape hatch: retry the failure clause with slack 0.1.
    let escalated = run_scenario(&s.joint, &s.channel, s.target, 0.1, 10);
    let med_fail_01 = median(escalated.iter().map(|r| r.encoder_failure_prob).collect());
    let fail_ok = med_fail <= 0.1 || med_fail_01 <= 0.1;

    report(
        "criterion 4 (direct-part convergence at n=10)",
        &[
            (
                med_da >= s.target - 0.2,
                format!(
                    "median delta_a {med_da:.4} ≥ target {:.4} − 0.2",
                    s.target
                ),
            ),
            (
                med_dm <= s.mask_bound + 0.2,
                format!(
                    "median delta_m {med_dm:.4} ≤ masking bound {:.4} + 0.2",
                    s.mask_bound
                ),
            ),
            (
                fail_ok,
                format!(
                    "median failure prob {med_fail:.4} at ε=0.05 ({med_fail_01:.4} at ε=0.1) ≤ 0.1 — \
                     unattainable at n=10: the 1/12 joint cell admits no integer count in the ε-window"
                ),
            ),
        ],
    );
}

// The trend clause is red for the same finite-blocklength reason: with bin
// counts rounded up to integers, the realized bin exponent overshoots the
// target more at n=6 than at n=10 (ceil effects shrink relatively as n
// grows), so measured amplification *over*shoots at n=6 (negative slack) and
// undershoots at n=10, and slack(10) ≤ slack(6) + 0.05 fails even though
// both medians are individually small. Kept red; the magnitude clause holds.
#[test]
fn c5_residual_slack_is_small_and_shrinks_with_blocklength() {
    let s = sweep();
    let slack_of = |n: usize| -> Vec<f64> {
        reports_at(s, n)
            .iter()
            .map(|r| appendix_slack(r, &s.joint).unwrap())
            .collect()
    };
    let med10 = median(slack_of(10));
    let med6 = median(slack_of(6));
    report(
        "criterion 5 (residual-entropy slack)",
        &[
            (
                med10 <= 0.2,
                format!("median slack {med10:.4} at n=10 ≤ 0.2"),
            ),
            (
                med10 <= med6 + 0.05,
                format!(
                    "slack trend: median {med10:.4} at n=10 ≤ median {med6:.4} at n=6 + 0.05 — \
                     integer bin-count rounding makes n=6 overshoot its target, so the trend \
                     clause is unattainable on this scenario"
                ),
            ),
        ],
    );
}

#[test]
fn c6_auxiliary_cardinality_four_adds_nothing() {
    let j = skew_joint();
    let rates = RatePair::new(0.4, 0.4).unwrap();
    let cfg = SearchConfig::default();
    let c3 = am_curve_detailed(&j, rates, &cfg, 3, DEFAULT_CURVE_GRID).unwrap();
    let c4 = am_curve_detailed(&j, rates, &cfg, 4, DEFAULT_CURVE_GRID).unwrap();

    let dom = c3.domain_max.min(c4.domain_max);
    let mut max_diff = 0.0_f64;
    for k in 0..=200 {
        let da = dom * k as f64 / 200.0;
        let (v3, v4) = (c3.value_at(da).unwrap(), c4.value_at(da).unwrap());
        max_diff = max_diff.max((v3 - v4).abs());
    }
    let dom_diff = (c3.domain_max - c4.domain_max).abs();

    report(
        "criterion 6 (auxiliary-cardinality robustness)",
        &[
            (
                max_diff <= 0.01,
                format!("|U|=3 vs |U|=4 curves differ by {max_diff:.4} ≤ 0.01 pointwise"),
            ),
            (
                dom_diff <= 0.01,
                format!("domain ends differ by {dom_diff:.4} ≤ 0.01"),
            ),
        ],
    );
}

#[test]
fn c7_degenerate_laws_collapse_the_regions() {
    let cfg = SearchConfig::default();
    let generous = RatePair::new(1.0, 1.0).unwrap();

    // Independent sources: nothing about Y need leak, at any amplification.
    let ji = JointPmf::from_matrix("X", "Y", &[vec![0.3, 0.2], vec![0.3, 0.2]]).unwrap();
    let ci = am_curve(&ji, generous, &cfg).unwrap();
    let max_dm = ci.points.iter().map(|&(_, dm)| dm).fold(0.0_f64, f64::max);

    // Identical sources: every amplified bit is a leaked bit.
    let jd = JointPmf::from_matrix("X", "Y", &[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
    let cd = am_curve(&jd, generous, &cfg).unwrap();
    let max_gap = cd
        .points
        .iter()
        .map(|&(da, dm)| (dm - da).abs())
        .fold(0.0_f64, f64::max);

    // Zero rates: the intersection collapses to the origin.
    let j = skew_joint();
    let b0 = star_region(&j, RatePair::new(0.0, 0.0).unwrap(), &StarConfig::default()).unwrap();
    let origin_ok = !b0.star.is_empty()
        && b0
            .star
            .vertices()
            .iter()
            .all(|&(x, y)| x.abs() <= 1e-6 && y.abs() <= 1e-6);

    report(
        "criterion 7 (degenerate-case suite)",
        &[
            (
                max_dm <= 0.01,
                format!("independence: max least-masking {max_dm:.4} ≤ 0.01 over the domain"),
            ),
            (
                max_gap <= 0.01,
                format!("identical sources: max |least-masking − amplification| {max_gap:.4} ≤ 0.01"),
            ),
            (
                origin_ok,
                "zero rates: star region degenerates to the origin (vertices within 1e-6)"
                    .to_string(),
            ),
        ],
    );
}

#[test]
fn c8_simulator_and_enumerator_agree_exactly() {
    let j = skew_joint();
    let h_x = j.marginal_entropy(&["X"]).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(2026);
    rng.set_stream(12 << 40);

    let mut max_diff = 0.0_f64;
    for k in 0..50 {
        let n = if k < 25 { 4 } else { 6 };
        let ch = sample_channel(2, 2, &mut rng);
        let target = rng.gen_range(0.0..=h_x);
        let eps = rng.gen_range(0.05..1.0);
        let seed = rng.gen::<u64>();

        let cb = build_codebook(&j, &ch, target, eps, n, seed).unwrap();
        let rep = evaluate_exact(&cb, &j).unwrap();
        let (fx, fy) = induced_tables(&cb).unwrap();
        let pt = evaluate_pair(&j, &fx, &fy).unwrap();

        max_diff = max_diff
            .max((rep.delta_a_measured - pt.ix).abs())
            .max((rep.delta_m_measured - pt.iy).abs());
    }

    report(
        "criterion 8 (cross-checked information measurements)",
        &[(
            max_diff <= 1e-12,
            format!("50 random codebooks at n ∈ {{4,6}}: max |simulator − enumerator| = {max_diff:.2e} ≤ 1e-12"),
        )],
    );
}
