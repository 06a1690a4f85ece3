//! Measure the time-Hoelder exponent of the stochastic convolution in its
//! scaling window: E |U_t - U_s|^2 ~ |t-s|^{1/2}, i.e. exponent 1/4, for
//! lags well below the slowest relaxation time 1/mu_(1,0)^2 ~ 6.4e-4.
//!
//!     cargo run --release --example noise_regularity

use std::sync::Arc;

use spde::analysis::time_holder_fit;
use spde::noise::{rng, sample_ou_path};
use spde::torus_spectral::ModeLattice;

fn main() -> spde::Result<()> {
    let lattice = Arc::new(ModeLattice::new(8, 2.0)?);
    let horizon = 2.0f64.powi(-12);
    let steps = 1024;
    let paths: Vec<_> = (0..150)
        .map(|s| sample_ou_path(rng::split(5, s), lattice.clone(), steps, horizon, 1.0))
        .collect::<spde::Result<_>>()?;
    let base = steps / 2;
    let pairs: Vec<(usize, usize)> =
        [1usize, 2, 4, 8, 16].iter().map(|&d| (base, base + d)).collect();
    let exponent = time_holder_fit(&paths, -0.05, 2.0, &pairs)?;
    println!("time-Hoelder exponent = {exponent:.3} (theory: 1/4)");
    Ok(())
}
