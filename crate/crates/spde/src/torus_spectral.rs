//! Frequency-lattice bookkeeping for the 2-D unit torus.
//!
//! Fields live in the mean-zero frame: the zero mode is excluded everywhere,
//! and a field is described by complex amplitudes on the truncated lattice
//! `{k in Z^2 \ {0} : |k| <= N}` with Hermitian symmetry
//! `u_{-k} = conj(u_k)` (the physical field is real). The basis is the
//! orthonormal family `e_k(x) = exp(2 pi i k.x)`, so `-Laplacian e_k =
//! 4 pi^2 |k|^2 e_k` and the biharmonic semigroup acts diagonally as
//! `exp(-t mu_k^2)` with `mu_k = 4 pi^2 |k|^2`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftDirection;

use crate::error::{Error, Result};

/// A frequency `k` in `Z^2 \ {0}`.
pub type Mode = (i32, i32);

/// Magic bytes of the field snapshot binary format.
pub const SNAPSHOT_MAGIC: &[u8; 5] = b"SPDE1";

/// Eigenvalue of `-Laplacian` at mode `k`: `mu_k = 4 pi^2 |k|^2`.
pub fn eigenvalue(k: Mode) -> Result<f64> {
    if k == (0, 0) {
        return Err(Error::ZeroMode);
    }
    let r2 = f64::from(k.0) * f64::from(k.0) + f64::from(k.1) * f64::from(k.1);
    Ok(4.0 * PI * PI * r2)
}

/// `mu_k^2`, the decay rate of the biharmonic semigroup at mode `k`.
/// No zero-mode check; callers enumerate lattice modes only.
pub(crate) fn mu_squared(k: Mode) -> f64 {
    let r2 = f64::from(k.0) * f64::from(k.0) + f64::from(k.1) * f64::from(k.1);
    let mu = 4.0 * PI * PI * r2;
    mu * mu
}

/// The truncated frequency set `{k != 0 : |k| <= N}` together with the
/// oversampled physical grid used for pseudo-spectral evaluation.
///
/// Modes are stored in lexicographic order (`k1`, then `k2`) so that binary
/// snapshots are portable. The set is closed under negation.
#[derive(Debug)]
pub struct ModeLattice {
    cutoff: u32,
    oversample: f64,
    grid_size: usize,
    modes: Vec<Mode>,
    mu_sq: Vec<f64>,
    index: HashMap<Mode, usize>,
}

impl ModeLattice {
    /// Enumerate the lattice for cutoff `N`. The physical grid has
    /// `M x M` points with `M` the smallest even integer
    /// `>= oversample * (2N + 2)`.
    pub fn new(cutoff: u32, oversample: f64) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::EmptyLattice);
        }
        if !(oversample >= 1.0) {
            return Err(Error::BadOversample(oversample));
        }
        let min = oversample * f64::from(2 * cutoff + 2);
        let mut m = min.ceil() as usize;
        if m % 2 == 1 {
            m += 1;
        }
        Ok(Self::build(cutoff, oversample, m))
    }

    /// Rebuild a lattice from an explicit grid size, as stored in snapshots.
    pub fn with_grid(cutoff: u32, grid_size: usize) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::EmptyLattice);
        }
        let min = 2 * cutoff as usize + 2;
        if grid_size < min || grid_size % 2 != 0 {
            return Err(Error::Snapshot(format!(
                "grid size {grid_size} invalid for cutoff {cutoff}"
            )));
        }
        let oversample = grid_size as f64 / min as f64;
        Ok(Self::build(cutoff, oversample, grid_size))
    }

    fn build(cutoff: u32, oversample: f64, grid_size: usize) -> Self {
        let n = cutoff as i64;
        let mut modes = Vec::new();
        for k1 in -n..=n {
            for k2 in -n..=n {
                if (k1, k2) != (0, 0) && k1 * k1 + k2 * k2 <= n * n {
                    modes.push((k1 as i32, k2 as i32));
                }
            }
        }
        modes.sort_unstable();
        let mu_sq = modes.iter().map(|&k| mu_squared(k)).collect();
        let index = modes.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        Self {
            cutoff,
            oversample,
            grid_size,
            modes,
            mu_sq,
            index,
        }
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn oversample(&self) -> f64 {
        self.oversample
    }

    /// Side length `M` of the physical grid.
    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    /// Modes in lexicographic order.
    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn num_modes(&self) -> usize {
        self.modes.len()
    }

    /// `mu_k^2` for the mode at position `i`.
    pub fn mu_sq(&self, i: usize) -> f64 {
        self.mu_sq[i]
    }

    pub fn index_of(&self, k: Mode) -> Option<usize> {
        self.index.get(&k).copied()
    }

    /// One representative per `{k, -k}` pair: `k > 0` lexicographically.
    pub fn is_representative(k: Mode) -> bool {
        k.0 > 0 || (k.0 == 0 && k.1 > 0)
    }

    pub fn conjugate_index(&self, i: usize) -> usize {
        let (k1, k2) = self.modes[i];
        self.index[&(-k1, -k2)]
    }
}

impl PartialEq for ModeLattice {
    fn eq(&self, other: &Self) -> bool {
        self.cutoff == other.cutoff && self.grid_size == other.grid_size
    }
}
impl Eq for ModeLattice {}

/// Complex Fourier coefficients of a real, mean-zero field on the torus.
#[derive(Debug, Clone)]
pub struct SpectralField {
    lattice: Arc<ModeLattice>,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(lattice: Arc<ModeLattice>) -> Self {
        let coeffs = vec![Complex64::new(0.0, 0.0); lattice.num_modes()];
        Self { lattice, coeffs }
    }

    pub fn from_coeffs(lattice: Arc<ModeLattice>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != lattice.num_modes() {
            return Err(Error::CoefficientLength {
                expected: lattice.num_modes(),
                actual: coeffs.len(),
            });
        }
        Ok(Self { lattice, coeffs })
    }

    /// The real field `2 amp cos(2 pi k.x)`: amplitude `amp` at `k` and `-k`.
    pub fn single_mode(lattice: Arc<ModeLattice>, k: Mode, amp: f64) -> Result<Self> {
        if k == (0, 0) {
            return Err(Error::ZeroMode);
        }
        let i = lattice
            .index_of(k)
            .ok_or(Error::ModeOutOfRange(k.0, k.1))?;
        let j = lattice.conjugate_index(i);
        let mut f = Self::zeros(lattice);
        f.coeffs[i] = Complex64::new(amp, 0.0);
        f.coeffs[j] = Complex64::new(amp, 0.0);
        Ok(f)
    }

    pub fn lattice(&self) -> &Arc<ModeLattice> {
        &self.lattice
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient at mode `k`; zero if `k` is outside the lattice
    /// (zero-extension).
    pub fn coeff(&self, k: Mode) -> Complex64 {
        match self.lattice.index_of(k) {
            Some(i) => self.coeffs[i],
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.lattice.modes().iter().enumerate().all(|(i, _)| {
            let j = self.lattice.conjugate_index(i);
            (self.coeffs[i] - self.coeffs[j].conj()).norm() <= tol
        })
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }
}

/// Diagonal multiplier of the semigroup `P_t = exp(-t Laplacian^2)`:
/// per-mode factor `exp(-t mu_k^2)`.
#[derive(Debug, Clone)]
pub struct SemigroupMultiplier {
    t: f64,
    lattice: Arc<ModeLattice>,
    factors: Vec<f64>,
}

impl SemigroupMultiplier {
    pub fn new(lattice: Arc<ModeLattice>, t: f64) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(Error::NegativeTime(t));
        }
        let factors = (0..lattice.num_modes())
            .map(|i| (-t * lattice.mu_sq(i)).exp())
            .collect();
        Ok(Self { t, lattice, factors })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn factors(&self) -> &[f64] {
        &self.factors
    }

    pub fn apply(&self, f: &SpectralField) -> Result<SpectralField> {
        if f.lattice.as_ref() != self.lattice.as_ref() {
            return Err(Error::LatticeMismatch);
        }
        let coeffs = f
            .coeffs
            .iter()
            .zip(&self.factors)
            .map(|(c, &m)| c * m)
            .collect();
        Ok(SpectralField {
            lattice: f.lattice.clone(),
            coeffs,
        })
    }
}

/// `P_t f`: multiply each coefficient by `exp(-t mu_k^2)`.
pub fn semigroup_apply(f: &SpectralField, t: f64) -> Result<SpectralField> {
    SemigroupMultiplier::new(f.lattice.clone(), t)?.apply(f)
}

/// Orthogonal projection onto modes with `|k| <= n_prime`, on the same
/// lattice (high coefficients zeroed).
pub fn project(f: &SpectralField, n_prime: u32) -> Result<SpectralField> {
    if n_prime == 0 {
        return Err(Error::EmptyLattice);
    }
    if n_prime > f.lattice.cutoff() {
        return Err(Error::ProjectionCutoff {
            requested: n_prime,
            actual: f.lattice.cutoff(),
        });
    }
    let r2 = i64::from(n_prime) * i64::from(n_prime);
    let mut out = f.clone();
    for (i, &(k1, k2)) in f.lattice.modes().iter().enumerate() {
        let kk = i64::from(k1) * i64::from(k1) + i64::from(k2) * i64::from(k2);
        if kk > r2 {
            out.coeffs[i] = Complex64::new(0.0, 0.0);
        }
    }
    Ok(out)
}

/// The truncated heat kernel `p_t^N`: coefficient `exp(-t mu_k^2)` at every
/// retained mode. Convolving against a field (pointwise coefficient
/// product) reproduces `semigroup_apply`.
pub fn heat_kernel_coeffs(t: f64, lattice: Arc<ModeLattice>) -> Result<SpectralField> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    let coeffs = (0..lattice.num_modes())
        .map(|i| Complex64::new((-t * lattice.mu_sq(i)).exp(), 0.0))
        .collect();
    Ok(SpectralField { lattice, coeffs })
}

/// Convolution on the torus under the orthonormal basis: pointwise product
/// of coefficients.
pub fn convolve(kernel: &SpectralField, f: &SpectralField) -> Result<SpectralField> {
    if kernel.lattice.as_ref() != f.lattice.as_ref() {
        return Err(Error::LatticeMismatch);
    }
    let coeffs = kernel
        .coeffs
        .iter()
        .zip(&f.coeffs)
        .map(|(a, b)| a * b)
        .collect();
    Ok(SpectralField {
        lattice: f.lattice.clone(),
        coeffs,
    })
}

mod fft {
    use std::cell::RefCell;

    use num_complex::Complex64;
    use rustfft::{FftDirection, FftPlanner};

    thread_local! {
        static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
    }

    /// In-place 2-D FFT of an `m x m` row-major array. Unnormalized in both
    /// directions (rustfft convention).
    pub fn fft2(data: &mut [Complex64], m: usize, direction: FftDirection) {
        debug_assert_eq!(data.len(), m * m);
        let plan = PLANNER.with(|p| p.borrow_mut().plan_fft(m, direction));
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        for row in data.chunks_exact_mut(m) {
            plan.process_with_scratch(row, &mut scratch);
        }
        let mut col = vec![Complex64::new(0.0, 0.0); m];
        for j in 0..m {
            for i in 0..m {
                col[i] = data[i * m + j];
            }
            plan.process_with_scratch(&mut col, &mut scratch);
            for i in 0..m {
                data[i * m + j] = col[i];
            }
        }
    }
}

fn grid_slot(k: i32, m: usize) -> usize {
    (k.rem_euclid(m as i32)) as usize
}

/// Evaluate the field on the `M x M` physical grid (row-major,
/// `x = (i/M, j/M)`).
pub fn to_physical(f: &SpectralField) -> Vec<f64> {
    let m = f.lattice.grid_size();
    let mut buf = vec![Complex64::new(0.0, 0.0); m * m];
    for (i, &(k1, k2)) in f.lattice.modes().iter().enumerate() {
        buf[grid_slot(k1, m) * m + grid_slot(k2, m)] = f.coeffs[i];
    }
    fft::fft2(&mut buf, m, FftDirection::Inverse);
    buf.into_iter().map(|c| c.re).collect()
}

/// Recover lattice coefficients from grid values. The grid mean (zero mode)
/// is discarded along with all frequencies outside the lattice ball.
pub fn from_physical(lattice: Arc<ModeLattice>, grid: &[f64]) -> Result<SpectralField> {
    let m = lattice.grid_size();
    if grid.len() != m * m {
        return Err(Error::GridSizeMismatch {
            expected: m * m,
            actual: grid.len(),
        });
    }
    let mut buf: Vec<Complex64> = grid.iter().map(|&g| Complex64::new(g, 0.0)).collect();
    fft::fft2(&mut buf, m, FftDirection::Forward);
    let scale = 1.0 / (m * m) as f64;
    let coeffs = lattice
        .modes()
        .iter()
        .map(|&(k1, k2)| buf[grid_slot(k1, m) * m + grid_slot(k2, m)] * scale)
        .collect();
    Ok(SpectralField { lattice, coeffs })
}

/// Write a field in the snapshot binary format: magic `"SPDE1"`, then
/// little-endian `u32 N`, `u32 M`, `u64` mode count, then per mode in
/// lexicographic order two `f64` (re, im).
pub fn write_snapshot<W: Write>(f: &SpectralField, w: &mut W) -> Result<()> {
    w.write_all(SNAPSHOT_MAGIC)?;
    w.write_all(&f.lattice.cutoff().to_le_bytes())?;
    w.write_all(&(f.lattice.grid_size() as u32).to_le_bytes())?;
    w.write_all(&(f.lattice.num_modes() as u64).to_le_bytes())?;
    for c in &f.coeffs {
        w.write_all(&c.re.to_le_bytes())?;
        w.write_all(&c.im.to_le_bytes())?;
    }
    Ok(())
}

/// Read a field written by [`write_snapshot`].
pub fn read_snapshot<R: Read>(r: &mut R) -> Result<SpectralField> {
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(Error::Snapshot("bad magic bytes".into()));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let cutoff = u32::from_le_bytes(b4);
    r.read_exact(&mut b4)?;
    let grid = u32::from_le_bytes(b4) as usize;
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let count = u64::from_le_bytes(b8) as usize;
    let lattice = Arc::new(ModeLattice::with_grid(cutoff, grid)?);
    if count != lattice.num_modes() {
        return Err(Error::Snapshot(format!(
            "mode count {count} does not match lattice ({})",
            lattice.num_modes()
        )));
    }
    let mut coeffs = Vec::with_capacity(count);
    for _ in 0..count {
        r.read_exact(&mut b8)?;
        let re = f64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        let im = f64::from_le_bytes(b8);
        coeffs.push(Complex64::new(re, im));
    }
    Ok(SpectralField { lattice, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::l2_norm;

    fn lat(n: u32) -> Arc<ModeLattice> {
        Arc::new(ModeLattice::new(n, 2.0).unwrap())
    }

    use crate::test_util::random_field;

    #[test]
    fn lattice_n1_has_four_modes() {
        let l = lat(1);
        assert_eq!(l.modes(), &[(-1, 0), (0, -1), (0, 1), (1, 0)]);
    }

    #[test]
    fn lattice_n2_has_twelve_modes() {
        // Brute-force enumeration of k1^2 + k2^2 <= 4, k != 0.
        let mut expected = 0;
        for k1 in -2i32..=2 {
            for k2 in -2i32..=2 {
                if (k1, k2) != (0, 0) && k1 * k1 + k2 * k2 <= 4 {
                    expected += 1;
                }
            }
        }
        assert_eq!(expected, 12);
        assert_eq!(lat(2).num_modes(), 12);
    }

    #[test]
    fn lattice_rejects_zero_cutoff() {
        assert!(matches!(
            ModeLattice::new(0, 2.0),
            Err(Error::EmptyLattice)
        ));
    }

    #[test]
    fn lattice_negation_closed_and_sorted() {
        let l = lat(7);
        let mut sorted = l.modes().to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, l.modes());
        for (i, _) in l.modes().iter().enumerate() {
            let j = l.conjugate_index(i);
            let (a, b) = l.modes()[i];
            assert_eq!(l.modes()[j], (-a, -b));
        }
        assert!(l.index_of((0, 0)).is_none());
    }

    #[test]
    fn grid_size_rule() {
        // M = smallest even integer >= oversample * (2N + 2)
        let l = ModeLattice::new(3, 1.5).unwrap();
        assert_eq!(l.grid_size(), 12);
        let l = ModeLattice::new(4, 1.0).unwrap();
        assert_eq!(l.grid_size(), 10);
    }

    #[test]
    fn eigenvalue_values() {
        let four_pi_sq = 4.0 * PI * PI;
        assert!((eigenvalue((1, 0)).unwrap() - four_pi_sq).abs() < 1e-12);
        assert!((eigenvalue((1, 1)).unwrap() - 2.0 * four_pi_sq).abs() < 1e-12);
        assert!(matches!(eigenvalue((0, 0)), Err(Error::ZeroMode)));
    }

    #[test]
    fn project_is_identity_at_full_cutoff() {
        let f = random_field(lat(5), 1);
        let p = project(&f, 5).unwrap();
        assert_eq!(f.coeffs(), p.coeffs());
    }

    #[test]
    fn project_drops_high_single_mode() {
        let f = SpectralField::single_mode(lat(5), (3, 0), 1.0).unwrap();
        let p = project(&f, 2).unwrap();
        assert_eq!(l2_norm(&p), 0.0);
    }

    #[test]
    fn project_contracts_l2_and_is_idempotent() {
        let f = random_field(lat(6), 2);
        let p = project(&f, 3).unwrap();
        assert!(l2_norm(&p) <= l2_norm(&f));
        let pp = project(&p, 3).unwrap();
        assert_eq!(p.coeffs(), pp.coeffs());
    }

    #[test]
    fn project_rejects_larger_cutoff() {
        let f = random_field(lat(3), 3);
        assert!(project(&f, 4).is_err());
    }

    #[test]
    fn semigroup_identity_at_zero() {
        let f = random_field(lat(4), 4);
        let g = semigroup_apply(&f, 0.0).unwrap();
        assert_eq!(f.coeffs(), g.coeffs());
    }

    #[test]
    fn semigroup_single_mode_decay() {
        let l = lat(3);
        let mu_sq = mu_squared((1, 0));
        let f = SpectralField::single_mode(l.clone(), (1, 0), 1.0).unwrap();
        let g = semigroup_apply(&f, 1.0 / mu_sq).unwrap();
        let i = l.index_of((1, 0)).unwrap();
        assert!((g.coeffs()[i].re - (-1.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn semigroup_law() {
        let f = random_field(lat(4), 5);
        let a = semigroup_apply(&semigroup_apply(&f, 3e-5).unwrap(), 7e-5).unwrap();
        let b = semigroup_apply(&f, 1e-4).unwrap();
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((x - y).norm() <= 1e-14 * y.norm().max(1.0));
        }
    }

    #[test]
    fn semigroup_rejects_negative_time() {
        let f = random_field(lat(2), 6);
        assert!(semigroup_apply(&f, -1e-9).is_err());
    }

    #[test]
    fn semigroup_commutes_with_projection() {
        let f = random_field(lat(6), 7);
        let a = project(&semigroup_apply(&f, 1e-4).unwrap(), 3).unwrap();
        let b = semigroup_apply(&project(&f, 3).unwrap(), 1e-4).unwrap();
        assert_eq!(a.coeffs(), b.coeffs());
    }

    #[test]
    fn semigroup_strictly_contracts_for_positive_time() {
        let f = random_field(lat(4), 8);
        let g = semigroup_apply(&f, 1e-6).unwrap();
        assert!(l2_norm(&g) < l2_norm(&f));
    }

    #[test]
    fn heat_kernel_convolution_matches_semigroup() {
        let l = lat(4);
        let f = random_field(l.clone(), 9);
        let t = 2e-4;
        let p = heat_kernel_coeffs(t, l).unwrap();
        let a = convolve(&p, &f).unwrap();
        let b = semigroup_apply(&f, t).unwrap();
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((x - y).norm() <= 1e-14);
        }
    }

    #[test]
    fn heat_kernel_l2_dominated_by_slowest_mode() {
        // Each coefficient is at most exp(-t mu_(1,0)^2).
        let l = lat(5);
        let t = 1e-3;
        let p = heat_kernel_coeffs(t, l.clone()).unwrap();
        let bound = (-t * mu_squared((1, 0))).exp() * (l.num_modes() as f64).sqrt();
        assert!(l2_norm(&p) <= bound + 1e-15);
    }

    #[test]
    fn heat_kernel_rejects_nonpositive_time() {
        assert!(heat_kernel_coeffs(0.0, lat(2)).is_err());
        assert!(heat_kernel_coeffs(-1.0, lat(2)).is_err());
    }

    #[test]
    fn physical_roundtrip_zero_field() {
        let l = lat(3);
        let f = SpectralField::zeros(l.clone());
        let g = to_physical(&f);
        assert!(g.iter().all(|&x| x == 0.0));
        let back = from_physical(l, &g).unwrap();
        assert!(back.coeffs().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn physical_single_mode_matches_basis_function() {
        let l = lat(3);
        let m = l.grid_size();
        let f = SpectralField::single_mode(l, (1, 0), 1.0).unwrap();
        let g = to_physical(&f);
        for i in 0..m {
            for j in 0..m {
                let x = i as f64 / m as f64;
                let expected = 2.0 * (2.0 * PI * x).cos();
                assert!((g[i * m + j] - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn physical_roundtrip_and_parseval() {
        let l = lat(5);
        let f = random_field(l.clone(), 10);
        let g = to_physical(&f);
        let back = from_physical(l.clone(), &g).unwrap();
        for (x, y) in back.coeffs().iter().zip(f.coeffs()) {
            assert!((x - y).norm() <= 1e-12 * y.norm().max(1.0));
        }
        // Parseval: grid mean of g^2 equals sum |u_k|^2.
        let mean_sq: f64 = g.iter().map(|&v| v * v).sum::<f64>() / (g.len() as f64);
        let coeff_sq: f64 = f.coeffs().iter().map(|c| c.norm_sqr()).sum();
        assert!((mean_sq - coeff_sq).abs() <= 1e-12 * coeff_sq);
    }

    #[test]
    fn from_physical_subtracts_mean() {
        let l = lat(2);
        let m = l.grid_size();
        let grid = vec![3.5; m * m];
        let f = from_physical(l, &grid).unwrap();
        assert!(f.coeffs().iter().all(|c| c.norm() < 1e-12));
    }

    #[test]
    fn from_physical_rejects_size_mismatch() {
        let l = lat(2);
        assert!(from_physical(l, &[0.0; 7]).is_err());
    }

    #[test]
    fn operations_preserve_hermitian_symmetry() {
        let f = random_field(lat(5), 11);
        assert!(f.is_hermitian(0.0));
        assert!(semigroup_apply(&f, 1e-5).unwrap().is_hermitian(0.0));
        assert!(project(&f, 2).unwrap().is_hermitian(0.0));
        let g = to_physical(&f);
        assert!(from_physical(f.lattice().clone(), &g)
            .unwrap()
            .is_hermitian(1e-13));
    }

    #[test]
    fn scalar_smoothing_bound_on_all_modes() {
        // exp(-t mu^2) mu^{gamma/2} <= (gamma / 4e)^{gamma/4} t^{-gamma/4}
        let l = lat(16);
        for &gamma in &[1.0, 2.0, 3.0] {
            let cap = (gamma / (4.0 * std::f64::consts::E)).powf(gamma / 4.0);
            for &t in &[1e-6, 1e-4, 1e-2] {
                for i in 0..l.num_modes() {
                    let mu_sq = l.mu_sq(i);
                    let lhs = (-t * mu_sq).exp() * mu_sq.powf(gamma / 4.0);
                    let rhs = cap * t.powf(-gamma / 4.0);
                    assert!(lhs <= rhs * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn snapshot_roundtrip() {
        let f = random_field(lat(4), 12);
        let mut buf = Vec::new();
        write_snapshot(&f, &mut buf).unwrap();
        assert_eq!(&buf[..5], SNAPSHOT_MAGIC);
        let g = read_snapshot(&mut buf.as_slice()).unwrap();
        assert_eq!(g.lattice().cutoff(), 4);
        assert_eq!(g.lattice().grid_size(), f.lattice().grid_size());
        assert_eq!(g.coeffs(), f.coeffs());
    }

    #[test]
    fn snapshot_rejects_bad_magic() {
        let mut buf = Vec::new();
        write_snapshot(&random_field(lat(2), 13), &mut buf).unwrap();
        buf[0] = b'X';
        assert!(read_snapshot(&mut buf.as_slice()).is_err());
    }
}
