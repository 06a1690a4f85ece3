//! Run a single trajectory of the full scheme and watch the L2 norm.
//!
//!     cargo run --release --example simulate

use std::sync::Arc;

use spde::analysis::{holder_norm, l2_norm};
use spde::noise::sample_ou_path;
use spde::nonlinearity::NonlinearitySpec;
use spde::scheme::{run, DriftVariant, InitialProfile, SchemeConfig};
use spde::torus_spectral::ModeLattice;

fn main() -> spde::Result<()> {
    let cfg = SchemeConfig {
        cutoff: 16,
        steps: 128,
        horizon: 0.01,
        sigma: 1.0,
        initial: InitialProfile::SmoothBump { amp: 0.5 },
        nonlinearity: NonlinearitySpec::Sine { a: 1.0 },
        drift: DriftVariant::Integrated,
        oversample: 2.0,
    };
    let lattice = Arc::new(ModeLattice::new(cfg.cutoff, cfg.oversample)?);
    let path = sample_ou_path(1, lattice, cfg.steps, cfg.horizon, cfg.sigma)?;
    let traj = run(&cfg, &path)?;

    println!("t, |u|_L2, |u|_C^-0.05");
    for j in (0..=cfg.steps).step_by(16) {
        let u = traj.state(j);
        println!(
            "{:.6}, {:.6}, {:.6}",
            traj.time(j),
            l2_norm(u),
            holder_norm(u, -0.05)
        );
    }

    let dir = std::env::temp_dir().join("spde_simulate");
    let files = traj.write_snapshots(&dir, 32)?;
    println!("wrote {} snapshots to {}", files.len(), dir.display());
    Ok(())
}
