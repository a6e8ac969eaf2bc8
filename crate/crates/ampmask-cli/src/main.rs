//! Command-line front end for the `ampmask` library: distribution ingestion,
//! tradeoff curves, rate regions, codebook simulation, and exhaustive
//! encoder enumeration, emitted as CSV or JSON.
//!
//! Exit codes: 0 on success, 1 on any validation or parse failure, 2 when a
//! computation would exceed an enumeration size guard. All randomness is
//! seeded (default seed 0), so identical invocations on identical inputs
//! produce byte-identical outputs. Output files are written in a single shot
//! after the computation succeeds; a failed run never leaves partial files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use ampmask::info::{AuxChannel, JointPmf};
use ampmask::io;
use ampmask::oracle::{exhaustive_frontier, random_frontier, MultiLetterPoint};
use ampmask::region::{
    am_curve, ma_curve, rm_min_masking, slice_to_region, star_region, Orientation, RatePair,
    StarConfig,
};
use ampmask::search::SearchConfig;
use ampmask::sim::{build_codebook, evaluate_exact};
use ampmask::{Error, Result};

/// Containment slack (bits) for the enumeration verdict.
const ORACLE_SLACK: f64 = 0.02;

#[derive(Parser)]
#[command(
    name = "ampmask",
    version,
    about = "Two-encoder amplification-masking rate regions: curves, regions, \
             codebook simulation, and exhaustive encoder checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Least-masking tradeoff curve; writes CSV `delta_a,delta_m_min`
    CurveAm(CurveArgs),
    /// Role-swapped curve (amplify Y, mask X); writes CSV `delta_y,delta_x_min`
    CurveMa(CurveArgs),
    /// All four regions at one rate pair, exported as CSV or JSON
    RegionStar {
        /// Joint distribution JSON file
        #[arg(long)]
        dist: PathBuf,
        /// First encoder's rate budget (bits/symbol)
        #[arg(long)]
        rx: f64,
        /// Second encoder's rate budget (bits/symbol)
        #[arg(long)]
        ry: f64,
        /// Output file
        #[arg(long)]
        out: PathBuf,
        /// Output format: csv or json
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Least achievable leakage when X must stay losslessly recoverable;
    /// prints the minimum in bits, or `infeasible`
    MaskingMin {
        /// Joint distribution JSON file
        #[arg(long)]
        dist: PathBuf,
        /// First encoder's rate budget (bits/symbol)
        #[arg(long)]
        rx: f64,
        /// Second encoder's rate budget (bits/symbol)
        #[arg(long)]
        ry: f64,
    },
    /// Build one binning + covering codebook and measure it exactly;
    /// prints the report as JSON
    Simulate {
        /// Joint distribution JSON file
        #[arg(long)]
        dist: PathBuf,
        /// Auxiliary channel JSON file (rows are p(u|y))
        #[arg(long)]
        channel: PathBuf,
        /// Amplification target in bits/symbol
        #[arg(long = "delta-a")]
        delta_a: f64,
        /// Typicality tolerance (relative, > 0)
        #[arg(long)]
        eps: f64,
        /// Blocklength
        #[arg(long)]
        n: usize,
        /// Codebook seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Enumerate (or sample) deterministic encoder pairs, print their
    /// normalized information points as CSV `ix,iy`, and append a verdict
    /// comparing them against the searched single-letter regions
    Oracle {
        /// Joint distribution JSON file
        #[arg(long)]
        dist: PathBuf,
        /// Blocklength
        #[arg(long)]
        n: usize,
        /// First encoder's message count
        #[arg(long)]
        mx: usize,
        /// Second encoder's message count
        #[arg(long)]
        my: usize,
        /// Sample this many random pairs instead of sweeping all of them
        #[arg(long)]
        trials: Option<usize>,
        /// Sampling seed (used with --trials)
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct CurveArgs {
    /// Joint distribution JSON file
    #[arg(long)]
    dist: PathBuf,
    /// First encoder's rate budget (bits/symbol)
    #[arg(long)]
    rx: f64,
    /// Second encoder's rate budget (bits/symbol)
    #[arg(long)]
    ry: f64,
    #[command(flatten)]
    search: SearchArgs,
    /// Output CSV file
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SearchArgs {
    /// Channel-grid resolution: row entries are multiples of 1/K
    #[arg(long, default_value_t = SearchConfig::default().grid_resolution)]
    grid_resolution: usize,
    /// Uniform random channels added on top of the grid
    #[arg(long, default_value_t = SearchConfig::default().random_samples)]
    random_samples: usize,
    /// Greedy refinement steps per start
    #[arg(long, default_value_t = SearchConfig::default().refine_steps)]
    refine_steps: usize,
    /// Refinement perturbation size, in probability units
    #[arg(long, default_value_t = SearchConfig::default().refine_step_size)]
    refine_step_size: f64,
    /// Master seed for all randomized search stages
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SearchArgs {
    fn to_config(&self) -> SearchConfig {
        SearchConfig {
            grid_resolution: self.grid_resolution,
            random_samples: self.random_samples,
            refine_steps: self.refine_steps,
            refine_step_size: self.refine_step_size,
            seed: self.seed,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version are successes; everything else (unknown
            // subcommand, bad flags) is a validation failure with usage text.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, Error::SizeGuard(_)) { 2 } else { 1 })
        }
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn read_dist(path: &Path) -> Result<JointPmf> {
    io::parse_distribution(&read_file(path)?)
}

fn read_channel(path: &Path) -> Result<AuxChannel> {
    io::parse_channel(&read_file(path)?)
}

/// Single-shot write, only reached after the computation succeeded.
fn write_out(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::CurveAm(a) => {
            let j = read_dist(&a.dist)?;
            let r = RatePair::new(a.rx, a.ry)?;
            let curve = am_curve(&j, r, &a.search.to_config())?;
            write_out(&a.out, &io::curve_to_csv(&curve, Orientation::Am))
        }
        Cmd::CurveMa(a) => {
            let j = read_dist(&a.dist)?;
            let r = RatePair::new(a.rx, a.ry)?;
            let curve = ma_curve(&j, r, &a.search.to_config())?;
            write_out(&a.out, &io::curve_to_csv(&curve, Orientation::Ma))
        }
        Cmd::RegionStar { dist, rx, ry, out, format } => {
            let fmt: io::ExportFormat = format.parse()?;
            let j = read_dist(&dist)?;
            let r = RatePair::new(rx, ry)?;
            let bundle = star_region(&j, r, &StarConfig::default())?;
            write_out(&out, &io::export_region(&bundle, fmt)?)
        }
        Cmd::MaskingMin { dist, rx, ry } => {
            let j = read_dist(&dist)?;
            let r = RatePair::new(rx, ry)?;
            match rm_min_masking(&j, r, &SearchConfig::default())? {
                Some(v) => println!("{v}"),
                None => println!("infeasible"),
            }
            Ok(())
        }
        Cmd::Simulate { dist, channel, delta_a, eps, n, seed } => {
            let j = read_dist(&dist)?;
            let ch = read_channel(&channel)?;
            let cb = build_codebook(&j, &ch, delta_a, eps, n, seed)?;
            let report = evaluate_exact(&cb, &j)?;
            println!("{}", io::report_to_json(&report)?);
            Ok(())
        }
        Cmd::Oracle { dist, n, mx, my, trials, seed } => {
            let j = read_dist(&dist)?;
            let points = match trials {
                Some(t) => random_frontier(&j, n, mx, my, t, seed)?,
                None => exhaustive_frontier(&j, n, mx, my)?,
            };
            let verdict = containment_verdict(&j, n, mx, my, &points)?;
            let pts: Vec<(f64, f64)> = points.iter().map(|p| (p.ix, p.iy)).collect();
            print!("{}", io::oracle_points_to_csv(&pts, Some(&verdict)));
            Ok(())
        }
    }
}

/// Compare every enumerated point against the searched single-letter slices
/// at the rates implied by the message counts, expanded by [`ORACLE_SLACK`].
fn containment_verdict(
    j: &JointPmf,
    n: usize,
    mx: usize,
    my: usize,
    points: &[MultiLetterPoint],
) -> Result<String> {
    let (ax, ay) = (j.axes()[0].clone(), j.axes()[1].clone());
    let h_x = j.marginal_entropy(&[&ax])?;
    let h_y = j.marginal_entropy(&[&ay])?;
    let r = RatePair::new((mx as f64).log2() / n as f64, (my as f64).log2() / n as f64)?;
    let cfg = SearchConfig::default();

    let am_slice = slice_to_region(&am_curve(j, r, &cfg)?, h_y, Orientation::Am)
        .clip_to_box(h_x, h_y);
    let transposed = j.permute(&[&ay, &ax])?;
    let ma_slice = slice_to_region(
        &am_curve(&transposed, r.swapped(), &cfg)?,
        h_x,
        Orientation::Am,
    )
    .clip_to_box(h_y, h_x);

    let violations = points
        .iter()
        .filter(|p| {
            !am_slice.contains((p.ix, p.iy), ORACLE_SLACK)
                || !ma_slice.contains((p.iy, p.ix), ORACLE_SLACK)
        })
        .count();
    Ok(if violations == 0 {
        format!("contained (slack {ORACLE_SLACK})")
    } else {
        format!("{violations} of {} points outside (slack {ORACLE_SLACK})", points.len())
    })
}
