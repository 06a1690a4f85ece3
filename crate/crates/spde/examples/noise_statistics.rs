//! Empirical check of the stochastic convolution's variance identity
//! E |U^N(t)|_{L2}^2 = sum_k (1 - exp(-2 t mu_k^2)) / (2 mu_k^2).
//!
//!     cargo run --release --example noise_statistics

use std::sync::Arc;

use spde::analysis::pairwise_sum;
use spde::noise::{analytic_variance, rng, sample_ou_path};
use spde::torus_spectral::ModeLattice;

fn main() -> spde::Result<()> {
    let lattice = Arc::new(ModeLattice::new(4, 2.0)?);
    let (t, samples) = (0.1, 2000);
    let totals: Vec<f64> = (0..samples)
        .map(|s| {
            let path = sample_ou_path(rng::split(3, s), lattice.clone(), 1, t, 1.0)?;
            Ok(path.values(1).iter().map(|v| v.norm_sqr()).sum())
        })
        .collect::<spde::Result<_>>()?;
    let mean = pairwise_sum(&totals) / samples as f64;
    let q = analytic_variance(t, &lattice, 1.0);
    let devs: Vec<f64> = totals.iter().map(|&x| (x - mean).powi(2)).collect();
    let se = (pairwise_sum(&devs) / (samples as f64 - 1.0)).sqrt() / (samples as f64).sqrt();
    println!("empirical E|U(t)|^2 = {mean:.6e}");
    println!("analytic  Q_N(t)    = {q:.6e}");
    println!("z-score             = {:+.2}", (mean - q) / se);
    Ok(())
}
