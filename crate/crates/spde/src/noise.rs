//! Exact sampling of the truncated stochastic convolution
//! `U^N(t) = sum_k int_0^t exp(-(t-s) mu_k^2) d beta_k(s) e_k`.
//!
//! One complex Ornstein-Uhlenbeck process is sampled per `{k, -k}` pair
//! with the exact per-step transition
//!
//! ```text
//!     U_k(t + d) = exp(-d mu_k^2) U_k(t) + eta,
//! ```
//!
//! where `eta` is complex Gaussian with total variance
//! `sigma^2 (1 - exp(-2 d mu_k^2)) / (2 mu_k^2)` split equally between the
//! real and imaginary parts; the conjugate mode is filled by Hermitian
//! symmetry. Every Gaussian innovation is drawn from a counter-based
//! splittable stream keyed by `(seed, mode, step)`, so regenerating a path
//! with the same `(seed, N, n, T, sigma)` is bit-identical and adding modes
//! never perturbs existing draws. Coarser levels are obtained by exact
//! subsampling ([`NoisePath::restrict`]), which is what makes the coupled
//! strong-error measurement meaningful.

use std::fs;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::torus_spectral::{
    read_snapshot, write_snapshot, Mode, ModeLattice, SpectralField,
};

/// Counter-based splittable randomness: every Gaussian pair is a pure
/// function of `(seed, stream, counter)`.
pub mod rng {
    const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

    /// SplitMix64 finalizer; bijective on u64.
    fn mix(mut z: u64) -> u64 {
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Derive a child seed; used for per-sample seeds in studies.
    pub fn split(seed: u64, index: u64) -> u64 {
        mix(seed ^ mix(index.wrapping_mul(GOLDEN) ^ 0x5851_F42D_4C95_7F2D))
    }

    /// Stream identifier for one mode representative.
    pub fn mode_stream(seed: u64, k: (i32, i32)) -> u64 {
        let packed = ((k.0 as u32 as u64) << 32) | (k.1 as u32 as u64);
        mix(seed ^ mix(packed ^ GOLDEN))
    }

    fn to_open_unit(x: u64) -> f64 {
        // 53 mantissa bits, offset by half an ulp so the result is in (0, 1).
        ((x >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Two independent standard normals for `(stream, counter)`, via
    /// Box-Muller on two SplitMix64 outputs.
    pub fn gaussian_pair(stream: u64, counter: u64) -> (f64, f64) {
        let base = stream.wrapping_add(counter.wrapping_mul(GOLDEN));
        let u1 = to_open_unit(mix(base.wrapping_add(GOLDEN)));
        let u2 = to_open_unit(mix(base.wrapping_add(GOLDEN.wrapping_mul(2))));
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        (r * theta.cos(), r * theta.sin())
    }
}

/// Per-mode exact Ornstein-Uhlenbeck samples of `U^N` on a uniform time
/// grid; the shared randomness behind every refinement level of a study.
#[derive(Debug, Clone)]
pub struct NoisePath {
    lattice: Arc<ModeLattice>,
    /// `values[j][i]` = coefficient of mode `i` at time `j T / n`.
    values: Vec<Vec<Complex64>>,
    seed: u64,
    sigma: f64,
    horizon: f64,
}

impl NoisePath {
    pub fn lattice(&self) -> &Arc<ModeLattice> {
        &self.lattice
    }

    /// Number of steps `n`; the path holds `n + 1` time slices.
    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn time(&self, j: usize) -> f64 {
        self.horizon * j as f64 / self.steps() as f64
    }

    /// Mode coefficients at time index `j`.
    pub fn values(&self, j: usize) -> &[Complex64] {
        &self.values[j]
    }

    pub fn field_at(&self, j: usize) -> SpectralField {
        SpectralField::from_coeffs(self.lattice.clone(), self.values[j].clone())
            .expect("path values match lattice")
    }

    /// Drop modes above `cutoff` and keep only every `steps()/steps`-th time
    /// slice. Values are copied unchanged: subsampling an exact OU path is
    /// exact.
    pub fn restrict(&self, cutoff: u32, steps: usize) -> Result<NoisePath> {
        if cutoff > self.lattice.cutoff() {
            return Err(Error::ProjectionCutoff {
                requested: cutoff,
                actual: self.lattice.cutoff(),
            });
        }
        if steps == 0 || self.steps() % steps != 0 {
            return Err(Error::NonDivisorSteps {
                coarse: steps,
                fine: self.steps(),
            });
        }
        let lattice = Arc::new(ModeLattice::new(cutoff, self.lattice.oversample())?);
        let stride = self.steps() / steps;
        let values = (0..=steps)
            .map(|j| {
                let fine = &self.values[j * stride];
                lattice
                    .modes()
                    .iter()
                    .map(|&k| fine[self.lattice.index_of(k).expect("sublattice mode")])
                    .collect()
            })
            .collect();
        Ok(NoisePath {
            lattice,
            values,
            seed: self.seed,
            sigma: self.sigma,
            horizon: self.horizon,
        })
    }
}

/// Total variance `sigma^2 (1 - exp(-2 t mu^2)) / (2 mu^2)` of one complex
/// mode coefficient of `U` at time `t`.
fn mode_variance(mu_sq: f64, t: f64, sigma: f64) -> f64 {
    sigma * sigma * (-(-2.0 * t * mu_sq).exp_m1()) / (2.0 * mu_sq)
}

/// Sample `U^N` exactly at all grid times `j T / n`, `j = 0..=n`.
pub fn sample_ou_path(
    seed: u64,
    lattice: Arc<ModeLattice>,
    steps: usize,
    horizon: f64,
    sigma: f64,
) -> Result<NoisePath> {
    if steps == 0 {
        return Err(Error::Config("step count must be at least 1".into()));
    }
    if !(horizon > 0.0) {
        return Err(Error::NonPositiveTime(horizon));
    }
    let n_modes = lattice.num_modes();
    let delta = horizon / steps as f64;

    // Per-representative transition constants and streams.
    let reps: Vec<usize> = (0..n_modes)
        .filter(|&i| ModeLattice::is_representative(lattice.modes()[i]))
        .collect();
    let decay: Vec<f64> = reps.iter().map(|&i| (-delta * lattice.mu_sq(i)).exp()).collect();
    let half_sd: Vec<f64> = reps
        .iter()
        .map(|&i| (mode_variance(lattice.mu_sq(i), delta, sigma) / 2.0).sqrt())
        .collect();
    let streams: Vec<u64> = reps
        .iter()
        .map(|&i| rng::mode_stream(seed, lattice.modes()[i]))
        .collect();
    let conj: Vec<usize> = reps.iter().map(|&i| lattice.conjugate_index(i)).collect();

    let mut values = vec![vec![Complex64::new(0.0, 0.0); n_modes]; steps + 1];
    let mut cur = vec![Complex64::new(0.0, 0.0); reps.len()];
    for j in 1..=steps {
        for (r, &i) in reps.iter().enumerate() {
            let (g1, g2) = rng::gaussian_pair(streams[r], j as u64);
            let eta = Complex64::new(g1 * half_sd[r], g2 * half_sd[r]);
            cur[r] = decay[r] * cur[r] + eta;
            values[j][i] = cur[r];
            values[j][conj[r]] = cur[r].conj();
        }
    }

    Ok(NoisePath {
        lattice,
        values,
        seed,
        sigma,
        horizon,
    })
}

/// `Q_N(t) = sigma^2 sum_{0 < |k| <= N} (1 - exp(-2 t mu_k^2)) / (2 mu_k^2)`,
/// the exact value of `E |U^N(t)|_{L^2}^2`.
pub fn analytic_variance(t: f64, lattice: &ModeLattice, sigma: f64) -> f64 {
    assert!(t >= 0.0, "time must be nonnegative");
    (0..lattice.num_modes())
        .map(|i| mode_variance(lattice.mu_sq(i), t, sigma))
        .sum()
}

fn cache_dir_name(seed: u64, cutoff: u32, steps: usize, horizon: f64, sigma: f64) -> String {
    format!("ou_seed{seed}_N{cutoff}_n{steps}_T{horizon}_sigma{sigma}")
}

/// Write every time slice of the path in the snapshot binary format under
/// `base/ou_seed{..}_N{..}_n{..}_T{..}_sigma{..}/`. Returns the directory.
pub fn write_path_cache(path: &NoisePath, base: &Path) -> Result<PathBuf> {
    let dir = base.join(cache_dir_name(
        path.seed,
        path.lattice.cutoff(),
        path.steps(),
        path.horizon,
        path.sigma,
    ));
    fs::create_dir_all(&dir)?;
    for j in 0..=path.steps() {
        let file = dir.join(format!("slice_{j:06}.spde"));
        let mut w = BufWriter::new(fs::File::create(file)?);
        write_snapshot(&path.field_at(j), &mut w)?;
    }
    Ok(dir)
}

/// Read a path written by [`write_path_cache`].
pub fn read_path_cache(
    base: &Path,
    seed: u64,
    cutoff: u32,
    steps: usize,
    horizon: f64,
    sigma: f64,
) -> Result<NoisePath> {
    let dir = base.join(cache_dir_name(seed, cutoff, steps, horizon, sigma));
    let mut lattice: Option<Arc<ModeLattice>> = None;
    let mut values = Vec::with_capacity(steps + 1);
    for j in 0..=steps {
        let file = dir.join(format!("slice_{j:06}.spde"));
        let mut r = BufReader::new(fs::File::open(file)?);
        let field = read_snapshot(&mut r)?;
        match &lattice {
            None => lattice = Some(field.lattice().clone()),
            Some(l) => {
                if l.as_ref() != field.lattice().as_ref() {
                    return Err(Error::Snapshot("inconsistent slice lattices".into()));
                }
            }
        }
        values.push(field.coeffs().to_vec());
    }
    let lattice = lattice.ok_or_else(|| Error::Snapshot("empty cache".into()))?;
    if lattice.cutoff() != cutoff {
        return Err(Error::Snapshot("cutoff does not match directory name".into()));
    }
    Ok(NoisePath {
        lattice,
        values,
        seed,
        sigma,
        horizon,
    })
}

/// Convenience: `|k| <= N` lattice-mode variance sum for a single mode pair.
pub fn single_mode_variance(k: Mode, t: f64, sigma: f64) -> Result<f64> {
    let mu = crate::torus_spectral::eigenvalue(k)?;
    Ok(mode_variance(mu * mu, t, sigma))
}
