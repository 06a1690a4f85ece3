//! Dyadic Littlewood-Paley decomposition and Besov norms of a field, and
//! the semigroup smoothing slope measured on an equal-block-energy probe.
//!
//!     cargo run --release --example besov_blocks

use std::sync::Arc;

use spde::analysis::{besov_norm, dyadic_block, holder_norm, l2_norm, smoothing_slope};
use spde::harness::equal_block_energy_field;
use spde::torus_spectral::ModeLattice;

fn main() -> spde::Result<()> {
    let lattice = Arc::new(ModeLattice::new(32, 2.0)?);
    let f = equal_block_energy_field(lattice, 11);

    println!("block j, |Delta_j f|_L2");
    for j in 0..=6 {
        println!("{j}, {:.6}", l2_norm(&dyadic_block(&f, j)));
    }
    println!("|f|_B^1_{{2,2}}   = {:.4}", besov_norm(&f, 1.0, 2.0, 2.0));
    println!("|f|_C^1          = {:.4}", holder_norm(&f, 1.0));

    // Smoothing inside the scaling window: |P_t f|_C^1 ~ t^{-1/4} |f|_C^0.
    let times: Vec<f64> = (0..9).map(|i| 10f64.powf(-9.5 + 3.0 * i as f64 / 8.0)).collect();
    let slope = smoothing_slope(&f, &times, 1.0)?;
    println!("smoothing slope  = {slope:.3} (theory: -1/4)");
    Ok(())
}
