//! Persist a noise path as per-slice binary snapshots and read it back,
//! then couple a coarse run to an exact restriction of the cached path.
//!
//!     cargo run --release --example path_cache

use std::sync::Arc;

use spde::noise::{read_path_cache, sample_ou_path, write_path_cache};
use spde::torus_spectral::ModeLattice;

fn main() -> spde::Result<()> {
    let lattice = Arc::new(ModeLattice::new(8, 2.0)?);
    let path = sample_ou_path(21, lattice, 64, 0.01, 1.0)?;

    let base = std::env::temp_dir().join("spde_path_cache");
    let dir = write_path_cache(&path, &base)?;
    println!("cached {} slices in {}", path.steps() + 1, dir.display());

    let back = read_path_cache(&base, 21, 8, 64, 0.01, 1.0)?;
    let identical = (0..=64).all(|j| path.values(j) == back.values(j));
    println!("roundtrip bit-identical: {identical}");

    // The same fine path restricted to (N, n) = (4, 16); the restriction
    // shares every value with the fine path at shared modes and times.
    let coarse = back.restrict(4, 16)?;
    println!(
        "restriction: {} modes, {} steps, U_(1,0)(T) = {}",
        coarse.lattice().num_modes(),
        coarse.steps(),
        coarse.values(16)[coarse.lattice().index_of((1, 0)).unwrap()]
    );
    Ok(())
}
