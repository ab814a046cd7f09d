//! Command-line pipeline: `simulate`, `estimate`, `fit`, `reconstruct` and
//! `oracle`. Every command that writes files also writes a manifest with its
//! configuration, seeds and artifact hashes, and reads each artifact back
//! before reporting success.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analysis::{build_report, fit_cf, FitResult, NonclassicalityReport};
use crate::error::{Error, Result};
use crate::estimation::{choose_cutoff, estimate_cf, CfEstimate, CutoffPolicy, DEFAULT_WINDOW};
use crate::homodyne::{sample_by_rejection, sample_quadratures, sample_via_loss_channel, QuadratureDataset};
use crate::io::{
    read_dataset, read_json, read_p_estimate, write_cross_section, write_dataset, write_json,
    write_p_estimate, Manifest,
};
use crate::numerics::{Grid1D, RngSeed};
use crate::reconstruction::{hankel_reconstruct, hankel_transform, hankel_transform_grid};
use crate::states::{
    default_moment_radius, normally_ordered_moment, rescale_p_for_loss, model_cf, PhaseSpacePoint,
    StateModel,
};

#[derive(Debug, Parser)]
#[command(name = "glauber-p", version, about = "Reconstruct P functions from homodyne quadratures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw quadrature samples from a state model.
    Simulate(SimulateArgs),
    /// Estimate the characteristic function and its error bars.
    Estimate(EstimateArgs),
    /// Fit the state model to an estimated characteristic function.
    Fit(FitArgs),
    /// Estimate, fit, invert and report in one go.
    Reconstruct(ReconstructArgs),
    /// Noiseless closure tests against analytic results.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Sampler {
    Direct,
    Rejection,
    LossChannel,
}

/// `auto` (threshold scan) or a fixed value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffArg {
    Auto,
    Fixed(f64),
}

impl FromStr for CutoffArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Self::Auto);
        }
        s.parse()
            .map(Self::Fixed)
            .map_err(|_| format!("expected `auto` or a number, got {s:?}"))
    }
}

impl CutoffArg {
    fn policy(self, k_sigma: f64, window: f64) -> CutoffPolicy {
        match self {
            Self::Auto => CutoffPolicy::Threshold { k: k_sigma, window },
            Self::Fixed(c) => CutoffPolicy::Fixed(c),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct SimulateArgs {
    #[arg(long)]
    pub nbar: f64,
    #[arg(long)]
    pub eta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub w: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value = "data.csv")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "direct")]
    pub sampler: Sampler,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CfGridArgs {
    /// Last grid point of the characteristic-function grid.
    #[arg(long, default_value_t = 4.0)]
    pub b_max: f64,
    #[arg(long, default_value_t = 0.01)]
    pub b_step: f64,
    /// Window of the `auto` cutoff scan.
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    pub window: f64,
    /// Multiple of sigma of the `auto` cutoff scan.
    #[arg(long, default_value_t = 1.0)]
    pub k_sigma: f64,
}

impl CfGridArgs {
    fn grid(&self) -> Result<Grid1D> {
        Grid1D::spanning(0.0, self.b_max, self.b_step)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EstimateArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "cf.json")]
    pub out: PathBuf,
    /// `auto` or a value; omitted leaves the cutoff unset.
    #[arg(long)]
    pub cutoff: Option<CutoffArg>,
    #[command(flatten)]
    pub grid: CfGridArgs,
}

/// Starting point of the fit. Unset values come from the dataset sidecar,
/// then from `nbar = 1, eta = 0.5, w = 1`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct InitialArgs {
    #[arg(long)]
    pub nbar: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub w: Option<f64>,
    /// Fit the SPATS weight `w` with `eta` held fixed.
    #[arg(long)]
    pub fit_w: bool,
}

impl InitialArgs {
    fn model(&self, fallback: Option<&StateModel>) -> Result<StateModel> {
        StateModel::new(
            self.nbar.or(fallback.map(|m| m.nbar())).unwrap_or(1.0),
            self.eta.or(fallback.map(|m| m.eta())).unwrap_or(0.5),
            self.w.or(fallback.map(|m| m.w())).unwrap_or(1.0),
        )
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    #[arg(long)]
    pub cf: PathBuf,
    #[arg(long, default_value = "fit.json")]
    pub out: PathBuf,
    #[command(flatten)]
    pub initial: InitialArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReconstructArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "auto")]
    pub cutoff: CutoffArg,
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 3.0)]
    pub alpha_max: f64,
    #[arg(long, default_value_t = 0.02)]
    pub alpha_step: f64,
    #[command(flatten)]
    pub grid: CfGridArgs,
    #[command(flatten)]
    pub initial: InitialArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 1.11)]
    pub nbar: f64,
    #[arg(long, default_value_t = 0.6)]
    pub eta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub w: f64,
    #[arg(long, default_value_t = 6.0)]
    pub cutoff: f64,
    /// Efficiency compared against `eta = 1` in the loss-covariance check.
    #[arg(long, default_value_t = 0.3)]
    pub loss_eta: f64,
    /// Quadrature step of the transforms.
    #[arg(long, default_value_t = ORACLE_STEP)]
    pub step: f64,
    /// Optional JSON output with the deviations.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Entry point shared by the binary and tests.
pub fn main_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(summary) => {
            print!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

/// Runs a parsed command and returns its text summary.
pub fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Estimate(a) => estimate(a),
        Command::Fit(a) => fit(a),
        Command::Reconstruct(a) => reconstruct(a),
        Command::Oracle(a) => oracle(a).map(|o| o.to_string()),
    }
}

fn manifest_path(artifact: &Path) -> PathBuf {
    artifact.with_extension("manifest.json")
}

fn ensure_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => Ok(fs::create_dir_all(dir)?),
        _ => Ok(()),
    }
}

pub fn simulate(a: &SimulateArgs) -> Result<String> {
    let model = StateModel::new(a.nbar, a.eta, a.w)?;
    let seed = RngSeed(a.seed);
    let data = match a.sampler {
        Sampler::Direct => sample_quadratures(&model, a.n, seed)?,
        Sampler::Rejection => sample_by_rejection(&model, a.n, seed)?,
        Sampler::LossChannel => sample_via_loss_channel(&model, a.n, seed)?,
    };
    ensure_parent(&a.out)?;
    write_dataset(&a.out, &data)?;
    if read_dataset(&a.out)? != data {
        return Err(Error::Parse(format!("{} did not read back identically", a.out.display())));
    }
    let mut manifest = Manifest::new("simulate", a, vec![a.seed])?;
    manifest.record(&a.out)?;
    manifest.record(&crate::io::sidecar_path(&a.out))?;
    write_json(&manifest_path(&a.out), &manifest)?;

    let expected_var = 1.0 + 2.0 * model.eta() * model.nbar() + 2.0 * model.eta() * model.w() * (1.0 + model.nbar());
    Ok(format!(
        "wrote {} samples to {}\nmean {:.5}  variance {:.5} (model {:.5})\n",
        data.n(),
        a.out.display(),
        data.mean(),
        data.variance(),
        expected_var
    ))
}

fn estimate_from(data: &QuadratureDataset, grid_args: &CfGridArgs, cutoff: Option<CutoffArg>) -> Result<CfEstimate> {
    let mut cf = estimate_cf(data, &grid_args.grid()?)?;
    if let Some(c) = cutoff {
        choose_cutoff(&mut cf, c.policy(grid_args.k_sigma, grid_args.window))?;
    }
    Ok(cf)
}

pub fn estimate(a: &EstimateArgs) -> Result<String> {
    let data = read_dataset(&a.data)?;
    let cf = estimate_from(&data, &a.grid, a.cutoff)?;
    ensure_parent(&a.out)?;
    write_json(&a.out, &cf)?;
    if read_json::<CfEstimate>(&a.out)? != cf {
        return Err(Error::Parse(format!("{} did not read back identically", a.out.display())));
    }
    let mut manifest = Manifest::new("estimate", a, data.seed().map(|s| s.0).into_iter().collect())?;
    manifest.record(&a.data)?;
    manifest.record(&a.out)?;
    write_json(&manifest_path(&a.out), &manifest)?;
    let cutoff = cf.cutoff.map_or("unset".to_owned(), |c| format!("{c:.4}"));
    Ok(format!(
        "characteristic function on {} points, b in [0, {}], cutoff {cutoff}\nwrote {}\n",
        cf.grid.count(),
        cf.grid.end(),
        a.out.display()
    ))
}

fn fit_summary(fit: &FitResult) -> String {
    let m = fit.model;
    format!(
        "nbar {:.5}  eta {:.5}  w {:.5}  chi2 {:.3}  dof {}  converged {}\n",
        m.nbar(),
        m.eta(),
        m.w(),
        fit.residual,
        fit.dof,
        fit.converged
    )
}

pub fn fit(a: &FitArgs) -> Result<String> {
    let cf: CfEstimate = read_json(&a.cf)?;
    let result = fit_cf(&cf, a.initial.model(None)?, a.initial.fit_w)?;
    ensure_parent(&a.out)?;
    write_json(&a.out, &result)?;
    if read_json::<FitResult>(&a.out)? != result {
        return Err(Error::Parse(format!("{} did not read back identically", a.out.display())));
    }
    let mut manifest = Manifest::new("fit", a, Vec::new())?;
    manifest.record(&a.cf)?;
    manifest.record(&a.out)?;
    write_json(&manifest_path(&a.out), &manifest)?;
    Ok(fit_summary(&result))
}

/// Artifact paths written by `reconstruct`.
pub struct ReconstructOutputs {
    pub cf: PathBuf,
    pub p: PathBuf,
    pub report: PathBuf,
    pub cross_section: PathBuf,
    pub manifest: PathBuf,
}

impl ReconstructOutputs {
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            cf: dir.join("cf.json"),
            p: dir.join("p.csv"),
            report: dir.join("report.json"),
            cross_section: dir.join("cross_section.csv"),
            manifest: dir.join("manifest.json"),
        }
    }
}

pub fn reconstruct(a: &ReconstructArgs) -> Result<String> {
    let data = read_dataset(&a.data)?;
    let cf = estimate_from(&data, &a.grid, Some(a.cutoff))?;
    let initial = a.initial.model(data.model())?;
    let fit = fit_cf(&cf, initial, a.initial.fit_w)?;
    let alpha_grid = Grid1D::spanning(0.0, a.alpha_max, a.alpha_step)?;
    let est = hankel_reconstruct(&cf, &alpha_grid)?
        .with_variance(&cf)?
        .with_systematic(&fit.model)?;
    let report = build_report(&cf, &est, &fit)?;

    fs::create_dir_all(&a.out_dir)?;
    let out = ReconstructOutputs::in_dir(&a.out_dir);
    write_json(&out.cf, &cf)?;
    write_p_estimate(&out.p, &est, Some(&fit.model))?;
    write_json(&out.report, &report)?;
    write_cross_section(&out.cross_section, &est)?;

    let cf_back: CfEstimate = read_json(&out.cf)?;
    let (p_back, fitted_back) = read_p_estimate(&out.p)?;
    let report_back: NonclassicalityReport = read_json(&out.report)?;
    if cf_back != cf || p_back != est || fitted_back != Some(fit.model) || report_back != report {
        return Err(Error::Parse("an artifact did not read back identically".into()));
    }

    let mut manifest = Manifest::new("reconstruct", a, data.seed().map(|s| s.0).into_iter().collect())?;
    for path in [&a.data, &out.cf, &out.p, &crate::io::sidecar_path(&out.p), &out.report, &out.cross_section] {
        manifest.record(path)?;
    }
    write_json(&out.manifest, &manifest)?;
    Ok(format!("{report}\nwrote {}\n", a.out_dir.display()))
}

/// Finer than the reconstruction step so the closure at moderate cutoffs
/// is limited by truncation rather than by quadrature.
pub const ORACLE_STEP: f64 = 0.0025;

/// Maximum deviations of the noiseless closure tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub model: StateModel,
    pub cutoff: f64,
    /// Hankel transform of the analytic CF against the analytic measured P.
    pub hankel_closure: f64,
    /// Mean photon number from the analytic P against its closed form.
    pub moment_closure: f64,
    /// Reconstruction at `loss_eta` with cutoff `cutoff / sqrt(loss_eta)`,
    /// rescaled for loss, against the lossless one at `cutoff`.
    pub loss_covariance: f64,
    pub loss_eta: f64,
}

impl std::fmt::Display for OracleReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let m = self.model;
        writeln!(f, "model            nbar = {}, eta = {}, w = {}", m.nbar(), m.eta(), m.w())?;
        writeln!(f, "cutoff           {}", self.cutoff)?;
        writeln!(f, "hankel closure   {:.3e}", self.hankel_closure)?;
        writeln!(f, "moment closure   {:.3e}", self.moment_closure)?;
        writeln!(f, "loss covariance  {:.3e} (eta = {} vs 1)", self.loss_covariance, self.loss_eta)
    }
}

pub fn oracle(a: &OracleArgs) -> Result<OracleReport> {
    let model = StateModel::new(a.nbar, a.eta, a.w)?;
    let alpha_grid = Grid1D::spanning(0.0, 3.0, 0.02)?;

    let p = hankel_transform_grid(|b| model_cf(b, &model), a.cutoff, a.step, &alpha_grid)?;
    let mut hankel_closure = 0.0f64;
    for (alpha, p) in alpha_grid.points().zip(&p) {
        hankel_closure = hankel_closure.max((p - model.measured_p(alpha)?).abs());
    }

    let lossless = |a: f64| {
        PhaseSpacePoint::new(a)
            .and_then(|pt| model.lossless_p(pt))
            .unwrap_or(f64::NAN)
    };
    let mean = normally_ordered_moment(lossless, 1, default_moment_radius(model.nbar()))?;
    let expected = model.w() * (2.0 * model.nbar() + 1.0) + (1.0 - model.w()) * model.nbar();
    let moment_closure = (mean.value - expected).abs();

    let lossy = model.with_eta(a.loss_eta)?;
    let ideal = model.with_eta(1.0)?;
    let p_ideal = hankel_transform_grid(|b| model_cf(b, &ideal), a.cutoff, a.step, &alpha_grid)?;
    let lossy_cutoff = a.cutoff / a.loss_eta.sqrt();
    let lossy_step = a.step / a.loss_eta.sqrt();
    let p_lossy = |alpha: f64| {
        hankel_transform(|b| model_cf(b, &lossy), lossy_cutoff, lossy_step, alpha).unwrap_or(f64::NAN)
    };
    let rescaled = rescale_p_for_loss(p_lossy, a.loss_eta)?;
    let mut loss_covariance = 0.0f64;
    for (alpha, p) in alpha_grid.points().zip(&p_ideal) {
        loss_covariance = loss_covariance.max((rescaled(alpha) - p).abs());
    }

    let report = OracleReport {
        model,
        cutoff: a.cutoff,
        hankel_closure,
        moment_closure,
        loss_covariance,
        loss_eta: a.loss_eta,
    };
    if let Some(path) = &a.out {
        ensure_parent(path)?;
        write_json(path, &report)?;
        if read_json::<OracleReport>(path)? != report {
            return Err(Error::Parse(format!("{} did not read back identically", path.display())));
        }
        let mut manifest = Manifest::new("oracle", a, Vec::new())?;
        manifest.record(path)?;
        write_json(&manifest_path(path), &manifest)?;
    }
    Ok(report)
}
