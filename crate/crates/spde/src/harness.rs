//! Experiment orchestration: coupled-noise convergence studies, seed
//! management, report emission and the command-line front end.
//!
//! A study draws one fine noise path per sample at the reference level
//! `(N_ref, n_ref)`, runs the reference trajectory, then restricts the
//! same path to every study level and records the sup-in-time L2 error
//! against the reference (coarse fields zero-extended). Everything is
//! deterministic given the config: per-sample seeds derive from the master
//! seed through the noise module's splittable construction, and ensemble
//! reductions are order-insensitive, so reports are byte-identical across
//! runs and across worker counts.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::analysis::{
    self, l2_norm, pairwise_sum, smoothing_slope, sup_error, time_holder_fit, Axis,
    ConvergenceReport,
};
use crate::error::{Error, Result};
use crate::noise::{analytic_variance, rng, sample_ou_path};
use crate::nonlinearity::NonlinearitySpec;
use crate::scheme::{run, run_reference, DriftVariant, InitialProfile, SchemeConfig};
use crate::torus_spectral::{semigroup_apply, ModeLattice, SpectralField};

fn default_sigma() -> f64 {
    1.0
}
fn default_oversample() -> f64 {
    2.0
}

/// One convergence study: a refinement axis, a ladder of levels and the
/// reference level standing in for the exact solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub axis: Axis,
    /// Strictly increasing ladder: N values (spatial) or n values (temporal).
    pub levels: Vec<u64>,
    /// Reference spatial cutoff N_ref.
    pub reference_cutoff: u32,
    /// Reference step count n_ref.
    pub reference_steps: usize,
    pub horizon: f64,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    pub initial: InitialProfile,
    pub nonlinearity: NonlinearitySpec,
    #[serde(default)]
    pub drift: DriftVariant,
    #[serde(default = "default_oversample")]
    pub oversample: f64,
    pub samples: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.levels.len() < 3 {
            return Err(Error::Config("need at least 3 ladder levels".into()));
        }
        if !self.levels.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config("ladder must be strictly increasing".into()));
        }
        if self.samples == 0 {
            return Err(Error::Config("sample count must be at least 1".into()));
        }
        match self.axis {
            Axis::Temporal => {
                for &n in &self.levels {
                    if n == 0 || self.reference_steps as u64 % n != 0 {
                        return Err(Error::Config(format!(
                            "temporal level {n} does not divide reference_steps {}",
                            self.reference_steps
                        )));
                    }
                }
            }
            Axis::Spatial => {
                for &n in &self.levels {
                    if n == 0 || n > u64::from(self.reference_cutoff) {
                        return Err(Error::Config(format!(
                            "spatial level {n} exceeds reference_cutoff {}",
                            self.reference_cutoff
                        )));
                    }
                }
            }
        }
        self.reference_config().validate()
    }

    pub fn reference_config(&self) -> SchemeConfig {
        SchemeConfig {
            cutoff: self.reference_cutoff,
            steps: self.reference_steps,
            horizon: self.horizon,
            sigma: self.sigma,
            initial: self.initial,
            nonlinearity: self.nonlinearity,
            drift: self.drift,
            oversample: self.oversample,
        }
    }

    pub fn level_config(&self, level: u64) -> SchemeConfig {
        let mut cfg = self.reference_config();
        match self.axis {
            Axis::Temporal => cfg.steps = level as usize,
            Axis::Spatial => cfg.cutoff = level as u32,
        }
        cfg
    }

    /// Seed for sample `s`, via the noise module's splittable construction.
    pub fn sample_seed(&self, sample: usize) -> u64 {
        rng::split(self.master_seed, sample as u64)
    }

    /// Stable digest of the configuration (FNV-1a over the TOML form).
    pub fn digest(&self) -> String {
        let text = toml::to_string(self).unwrap_or_default();
        let mut hash: u64 = 0xCBF2_9CE4_8422_2325;
        for b in text.bytes() {
            hash ^= u64::from(b);
            hash = hash.wrapping_mul(0x1000_0000_01B3);
        }
        format!("{hash:016x}")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }
}

/// Run the coupled-noise convergence study described by `cfg`.
/// Deterministic given the config, independently of the rayon worker count.
pub fn run_convergence_study(cfg: &StudyConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let ref_lattice = Arc::new(ModeLattice::new(cfg.reference_cutoff, cfg.oversample)?);
    let ref_config = cfg.reference_config();

    let per_sample: Vec<(u64, Vec<f64>)> = (0..cfg.samples)
        .into_par_iter()
        .map(|s| -> Result<(u64, Vec<f64>)> {
            let seed = cfg.sample_seed(s);
            let path = sample_ou_path(
                seed,
                ref_lattice.clone(),
                cfg.reference_steps,
                cfg.horizon,
                cfg.sigma,
            )?;
            let reference = run_reference(&ref_config, &path)?;
            let mut errs = Vec::with_capacity(cfg.levels.len());
            for &level in &cfg.levels {
                let level_cfg = cfg.level_config(level);
                let restricted = path.restrict(level_cfg.cutoff, level_cfg.steps)?;
                let traj = run(&level_cfg, &restricted)?;
                errs.push(sup_error(&traj, &reference)?);
            }
            Ok((seed, errs))
        })
        .collect::<Result<_>>()?;

    let seeds: Vec<u64> = per_sample.iter().map(|(s, _)| *s).collect();
    let errors: Vec<Vec<f64>> = (0..cfg.levels.len())
        .map(|li| per_sample.iter().map(|(_, e)| e[li]).collect())
        .collect();
    ConvergenceReport::new(cfg.axis, cfg.levels.clone(), errors, seeds, cfg.digest())
}

/// Same study, pinned to an explicit rayon worker count.
pub fn run_convergence_study_with_workers(
    cfg: &StudyConfig,
    workers: usize,
) -> Result<ConvergenceReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| run_convergence_study(cfg))
}

/// Write `<axis>_samples.csv` and `<axis>_summary.csv` into `dir`.
pub fn write_report(report: &ConvergenceReport, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let samples = dir.join(format!("{}_samples.csv", report.axis));
    let summary = dir.join(format!("{}_summary.csv", report.axis));
    fs::write(&samples, report.to_samples_csv())?;
    fs::write(&summary, report.to_summary_csv())?;
    Ok((samples, summary))
}

/// Deterministic Hermitian field whose dyadic blocks all carry unit L2
/// energy; the probe field for smoothing-exponent measurements.
pub fn equal_block_energy_field(lattice: Arc<ModeLattice>, seed: u64) -> SpectralField {
    let mut f = SpectralField::zeros(lattice.clone());
    for i in 0..lattice.num_modes() {
        let k = lattice.modes()[i];
        if ModeLattice::is_representative(k) {
            let stream = rng::mode_stream(seed, k);
            let (a, b) = rng::gaussian_pair(stream, 0);
            let c = num_complex::Complex64::new(a, b);
            let j = lattice.conjugate_index(i);
            f.coeffs_mut()[i] = c;
            f.coeffs_mut()[j] = c.conj();
        }
    }
    let partition = analysis::DyadicPartition::new(&lattice);
    for j in 0..=partition.max_block() {
        let energy = l2_norm(&analysis::dyadic_block(&f, j));
        if energy > 0.0 {
            for i in 0..lattice.num_modes() {
                if partition.block_of(i) == j {
                    f.coeffs_mut()[i] /= energy;
                }
            }
        }
    }
    f
}

// ---------------------------------------------------------------------------
// Command line interface
// ---------------------------------------------------------------------------

#[derive(Debug, Parser)]
#[command(
    name = "spde",
    about = "Exponential-Euler solver and convergence harness for the \
             fourth-order stochastic PDE on the 2-D torus",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for CSV / snapshot artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppress progress output.
    #[arg(long)]
    quiet: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a single trajectory and optionally write field snapshots.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// TOML file with a solver configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write every STRIDE-th snapshot (requires --out).
        #[arg(long, default_value_t = 1)]
        stride: usize,
    },
    /// Run a convergence study from a TOML config file.
    Convergence {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        config: PathBuf,
        /// Override the sample count of the config.
        #[arg(long)]
        samples: Option<usize>,
        /// Pin the rayon worker count.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Check empirical noise variance against the analytic identity.
    NoiseCheck {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 4)]
        cutoff: u32,
        #[arg(long, default_value_t = 0.1)]
        horizon: f64,
    },
    /// Measure the noise time-Hoelder exponent and the semigroup smoothing
    /// slope inside their scaling windows.
    Regularity {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Verify that the scheme is exact for G = 0.
    LinearExact {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn default_scheme_config() -> SchemeConfig {
    SchemeConfig {
        cutoff: 16,
        steps: 64,
        horizon: 0.01,
        sigma: 1.0,
        initial: InitialProfile::SmoothBump { amp: 0.5 },
        nonlinearity: NonlinearitySpec::Sine { a: 1.0 },
        drift: DriftVariant::Integrated,
        oversample: 2.0,
    }
}

/// Run the CLI; returns the process exit code
/// (0 = checks pass, 1 = check failure, 2 = usage or config error).
pub fn cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // clap renders its own usage/help text; help and version are
            // not errors.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Simulate {
            common,
            config,
            stride,
        } => cmd_simulate(&common, config.as_deref(), stride),
        Command::Convergence {
            common,
            config,
            samples,
            workers,
        } => cmd_convergence(&common, &config, samples, workers),
        Command::NoiseCheck {
            common,
            samples,
            cutoff,
            horizon,
        } => cmd_noise_check(&common, samples, cutoff, horizon),
        Command::Regularity { common, samples } => cmd_regularity(&common, samples),
        Command::LinearExact { common } => cmd_linear_exact(&common),
    }
}

fn cmd_simulate(common: &CommonArgs, config: Option<&Path>, stride: usize) -> Result<bool> {
    let cfg = match config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            toml::from_str::<SchemeConfig>(&text).map_err(|e| Error::Config(e.to_string()))?
        }
        None => default_scheme_config(),
    };
    cfg.validate()?;
    let lattice = Arc::new(ModeLattice::new(cfg.cutoff, cfg.oversample)?);
    let path = sample_ou_path(common.seed, lattice, cfg.steps, cfg.horizon, cfg.sigma)?;
    let traj = run(&cfg, &path)?;
    if let Some(out) = &common.out {
        let files = traj.write_snapshots(out, stride)?;
        if !common.quiet {
            println!("wrote {} snapshots to {}", files.len(), out.display());
        }
    }
    if !common.quiet {
        println!(
            "simulate: N={} n={} T={} final |u(T)|_L2 = {:.6e}",
            cfg.cutoff,
            cfg.steps,
            cfg.horizon,
            l2_norm(traj.final_state())
        );
    }
    Ok(true)
}

fn cmd_convergence(
    common: &CommonArgs,
    config: &Path,
    samples: Option<usize>,
    workers: Option<usize>,
) -> Result<bool> {
    let mut cfg = StudyConfig::load(config)?;
    if common.seed != 0 {
        cfg.master_seed = common.seed;
    }
    if let Some(s) = samples {
        cfg.samples = s;
    }
    if let Some(out) = &common.out {
        cfg.out_dir = Some(out.clone());
    }
    let report = match workers {
        Some(w) => run_convergence_study_with_workers(&cfg, w)?,
        None => run_convergence_study(&cfg)?,
    };
    if let Some(dir) = &cfg.out_dir {
        let (samples_csv, summary_csv) = write_report(&report, dir)?;
        if !common.quiet {
            println!("wrote {}", samples_csv.display());
            println!("wrote {}", summary_csv.display());
        }
    }
    if !common.quiet {
        println!(
            "convergence ({} axis): slope = {:.4}, r2 = {:.4}",
            report.axis, report.fit.slope, report.fit.r_squared
        );
    }
    Ok(true)
}

fn cmd_noise_check(
    common: &CommonArgs,
    samples: usize,
    cutoff: u32,
    horizon: f64,
) -> Result<bool> {
    let lattice = Arc::new(ModeLattice::new(cutoff, 2.0)?);
    let n_modes = lattice.num_modes();
    // One exact transition straight to the horizon per sample.
    let mut mode_sq = vec![Vec::with_capacity(samples); n_modes];
    let mut totals = Vec::with_capacity(samples);
    for s in 0..samples {
        let path = sample_ou_path(
            rng::split(common.seed, s as u64),
            lattice.clone(),
            1,
            horizon,
            1.0,
        )?;
        let values = path.values(1);
        let mut total = 0.0;
        for (i, v) in values.iter().enumerate() {
            let sq = v.norm_sqr();
            mode_sq[i].push(sq);
            total += sq;
        }
        totals.push(total);
    }

    let q = analytic_variance(horizon, &lattice, 1.0);
    let total_mean = pairwise_sum(&totals) / samples as f64;
    let total_devs: Vec<f64> = totals.iter().map(|&t| (t - total_mean).powi(2)).collect();
    let total_se =
        (pairwise_sum(&total_devs) / (samples as f64 - 1.0)).sqrt() / (samples as f64).sqrt();
    let total_z = (total_mean - q) / total_se;

    let mut csv = String::from("k1,k2,empirical_var,analytic_var,z\n");
    let mut max_mode_z = 0.0f64;
    for (i, &(k1, k2)) in lattice.modes().iter().enumerate() {
        let analytic = crate::noise::single_mode_variance((k1, k2), horizon, 1.0)?;
        let empirical = pairwise_sum(&mode_sq[i]) / samples as f64;
        // |U_k|^2 of a circular complex Gaussian has variance var^2.
        let se = analytic / (samples as f64).sqrt();
        let z = (empirical - analytic) / se;
        max_mode_z = max_mode_z.max(z.abs());
        csv.push_str(&format!("{k1},{k2},{empirical},{analytic},{z}\n"));
    }
    if let Some(dir) = &common.out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("noise_check.csv"), &csv)?;
    }
    let pass = total_z.abs() <= 3.0 && max_mode_z <= 4.0;
    if !common.quiet {
        println!(
            "noise-check: N={cutoff} T={horizon} samples={samples}: \
             E|U|^2 = {total_mean:.6e} vs Q = {q:.6e} (z = {total_z:+.2}), \
             max per-mode |z| = {max_mode_z:.2} -> {}",
            if pass { "PASS" } else { "FAIL" }
        );
    }
    Ok(pass)
}

fn cmd_regularity(common: &CommonArgs, samples: usize) -> Result<bool> {
    // Time-Hoelder exponent of the noise at lambda = 1 (norm C^{-0.05}).
    // Lags sit below the slowest relaxation time 1/mu_(1,0)^2 ~ 6.4e-4,
    // where the |t-s|^{1/4} scaling of the increments is visible.
    let lattice = Arc::new(ModeLattice::new(8, 2.0)?);
    let horizon = 2.0f64.powi(-12);
    let steps = 1024usize;
    let paths: Vec<_> = (0..samples)
        .map(|s| {
            sample_ou_path(
                rng::split(common.seed, s as u64),
                lattice.clone(),
                steps,
                horizon,
                1.0,
            )
        })
        .collect::<Result<_>>()?;
    let base = steps / 2;
    let pairs: Vec<(usize, usize)> = [1usize, 2, 4, 8, 16]
        .iter()
        .map(|&d| (base, base + d))
        .collect();
    let exponent = time_holder_fit(&paths, -0.05, 2.0, &pairs)?;
    let holder_pass = (exponent - 0.25).abs() <= 0.08;

    // Semigroup smoothing slope on an equal-block-energy field, measured
    // inside the same scaling window.
    let probe = equal_block_energy_field(Arc::new(ModeLattice::new(32, 2.0)?), common.seed);
    let times: Vec<f64> = (0..9)
        .map(|i| 10f64.powf(-9.5 + 3.0 * i as f64 / 8.0))
        .collect();
    let slope = smoothing_slope(&probe, &times, 1.0)?;
    let smoothing_pass = slope >= -0.35 && slope <= 0.0;

    if !common.quiet {
        println!(
            "regularity: time-Hoelder exponent = {exponent:.3} (target 0.25 +- 0.08) -> {}",
            if holder_pass { "PASS" } else { "FAIL" }
        );
        println!(
            "regularity: smoothing slope = {slope:.3} (target >= -0.35) -> {}",
            if smoothing_pass { "PASS" } else { "FAIL" }
        );
    }
    Ok(holder_pass && smoothing_pass)
}

fn cmd_linear_exact(common: &CommonArgs) -> Result<bool> {
    // G = 0: the trajectory must equal P_t^N u0 + U^N(t) at all grid times.
    let mut worst = 0.0f64;
    for n in [8usize, 16, 32, 64] {
        let cfg = SchemeConfig {
            cutoff: 16,
            steps: n,
            horizon: 0.01,
            sigma: 1.0,
            initial: InitialProfile::SmoothBump { amp: 0.5 },
            nonlinearity: NonlinearitySpec::Zero,
            drift: DriftVariant::Integrated,
            oversample: 2.0,
        };
        let lattice = Arc::new(ModeLattice::new(cfg.cutoff, cfg.oversample)?);
        let path = sample_ou_path(common.seed, lattice.clone(), n, cfg.horizon, cfg.sigma)?;
        let traj = run(&cfg, &path)?;
        let u0 = cfg.initial.realize(lattice)?;
        for j in 0..=n {
            let mut expected = semigroup_apply(&u0, traj.time(j))?;
            for (c, v) in expected.coeffs_mut().iter_mut().zip(path.values(j)) {
                *c += v;
            }
            let diff: f64 = traj
                .state(j)
                .coeffs()
                .iter()
                .zip(expected.coeffs())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            worst = worst.max(diff / l2_norm(&expected).max(1.0));
        }
    }
    let pass = worst <= 1e-12;
    if !common.quiet {
        println!(
            "linear-exact: max relative deviation = {worst:.3e} (limit 1e-12) -> {}",
            if pass { "PASS" } else { "FAIL" }
        );
    }
    Ok(pass)
}
