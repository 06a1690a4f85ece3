//! Shared helpers for unit tests.

use std::sync::Arc;

use num_complex::Complex64;

use crate::torus_spectral::{ModeLattice, SpectralField};

/// Deterministic Hermitian test field with pseudo-random amplitudes in
/// [-0.5, 0.5). Independent of the production RNG.
pub(crate) fn random_field(lattice: Arc<ModeLattice>, seed: u64) -> SpectralField {
    let mut f = SpectralField::zeros(lattice.clone());
    let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(1);
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    for i in 0..lattice.num_modes() {
        if ModeLattice::is_representative(lattice.modes()[i]) {
            let c = Complex64::new(next(), next());
            let j = lattice.conjugate_index(i);
            f.coeffs_mut()[i] = c;
            f.coeffs_mut()[j] = c.conj();
        }
    }
    f
}
