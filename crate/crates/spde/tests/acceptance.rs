//! Acceptance gate: one test per criterion, each printing a single
//! `[PASS]`/`[FAIL]` line. Tolerances are pinned here and nowhere else.

use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;

use spde::analysis::{
    l2_norm, pairwise_sum, smoothing_slope, sup_error, time_holder_fit, Axis,
};
use spde::harness::{
    equal_block_energy_field, run_convergence_study, run_convergence_study_with_workers,
    StudyConfig,
};
use spde::noise::{analytic_variance, rng, sample_ou_path, single_mode_variance};
use spde::nonlinearity::{eval_g, NonlinearitySpec};
use spde::scheme::{run, step, DriftVariant, InitialProfile, SchemeConfig};
use spde::torus_spectral::{eigenvalue, semigroup_apply, ModeLattice, SpectralField};

fn report(criterion: u32, pass: bool, detail: &str) {
    println!(
        "[{}] criterion {criterion}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

#[test]
fn criterion_1_linear_exactness() {
    let start = Instant::now();
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
        let lattice = Arc::new(ModeLattice::new(cfg.cutoff, cfg.oversample).unwrap());
        let path = sample_ou_path(7, lattice.clone(), n, cfg.horizon, cfg.sigma).unwrap();
        let traj = run(&cfg, &path).unwrap();
        let u0 = cfg.initial.realize(lattice.clone()).unwrap();
        for j in 0..=n {
            let decayed = semigroup_apply(&u0, traj.time(j)).unwrap();
            let coeffs: Vec<Complex64> = decayed
                .coeffs()
                .iter()
                .zip(path.values(j))
                .map(|(a, b)| a + b)
                .collect();
            let expected = SpectralField::from_coeffs(lattice.clone(), coeffs).unwrap();
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
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-12 && elapsed < 5.0;
    report(
        1,
        pass,
        &format!(
            "linear exactness: max relative deviation {worst:.3e} (limit 1e-12), \
             runtime {elapsed:.2}s (limit 5s)"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_2_noise_variance_identity() {
    let start = Instant::now();
    let (t, samples) = (0.1, 2000usize);
    let lattice = Arc::new(ModeLattice::new(4, 2.0).unwrap());
    let n_modes = lattice.num_modes();
    // One exact transition per sample: the OU update is distribution-exact
    // for any step size, so n = 1 suffices for the marginal at T.
    let mut mode_sq = vec![Vec::with_capacity(samples); n_modes];
    let mut totals = Vec::with_capacity(samples);
    for s in 0..samples {
        let path =
            sample_ou_path(rng::split(42, s as u64), lattice.clone(), 1, t, 1.0).unwrap();
        let mut total = 0.0;
        for (i, v) in path.values(1).iter().enumerate() {
            let sq = v.norm_sqr();
            mode_sq[i].push(sq);
            total += sq;
        }
        totals.push(total);
    }
    let q = analytic_variance(t, &lattice, 1.0);
    let mean = pairwise_sum(&totals) / samples as f64;
    let devs: Vec<f64> = totals.iter().map(|&x| (x - mean).powi(2)).collect();
    let se = (pairwise_sum(&devs) / (samples as f64 - 1.0)).sqrt() / (samples as f64).sqrt();
    let z_total = (mean - q) / se;

    let mut max_mode_z = 0.0f64;
    for (i, &k) in lattice.modes().iter().enumerate() {
        let var = single_mode_variance(k, t, 1.0).unwrap();
        let emp = pairwise_sum(&mode_sq[i]) / samples as f64;
        // |U_k|^2 of a circular complex Gaussian has variance var^2.
        let z = (emp - var) / (var / (samples as f64).sqrt());
        max_mode_z = max_mode_z.max(z.abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = z_total.abs() <= 3.0 && max_mode_z <= 4.0 && elapsed < 30.0;
    report(
        2,
        pass,
        &format!(
            "noise variance identity: E|U(T)|^2 = {mean:.6e} vs Q = {q:.6e} \
             (z = {z_total:+.2}, limit 3), max per-mode |z| = {max_mode_z:.2} (limit 4), \
             runtime {elapsed:.1}s (limit 30s)"
        ),
    );
    assert!(pass);
}

fn rate_study(axis: Axis) -> StudyConfig {
    // The horizon is a free parameter in both rate criteria. Temporal:
    // T = 0.005 keeps h * mu_(1,0)^2 near 1 across the ladder, inside the
    // regime where the order-one rate is visible (at T = 0.1 every level is
    // overdamped and the error curve flattens). Spatial: T = 0.1 so the
    // stationary spectral tail dominates.
    match axis {
        Axis::Temporal => StudyConfig {
            axis,
            levels: vec![8, 16, 32, 64],
            reference_cutoff: 16,
            reference_steps: 512,
            horizon: 0.005,
            sigma: 1.0,
            initial: InitialProfile::SmoothBump { amp: 0.5 },
            nonlinearity: NonlinearitySpec::Sine { a: 1.0 },
            drift: DriftVariant::Integrated,
            oversample: 2.0,
            samples: 16,
            master_seed: 2024,
            out_dir: None,
        },
        Axis::Spatial => StudyConfig {
            axis,
            levels: vec![4, 8, 16, 32],
            reference_cutoff: 64,
            reference_steps: 256,
            horizon: 0.1,
            sigma: 1.0,
            initial: InitialProfile::SmoothBump { amp: 0.5 },
            nonlinearity: NonlinearitySpec::Sine { a: 1.0 },
            drift: DriftVariant::Integrated,
            oversample: 2.0,
            samples: 16,
            master_seed: 2024,
            out_dir: None,
        },
    }
}

#[test]
fn criterion_3_temporal_strong_rate() {
    let cfg = rate_study(Axis::Temporal);
    let rep = run_convergence_study(&cfg).unwrap();
    let slope = rep.fit.slope;
    let pass = (-1.35..=-0.65).contains(&slope);
    report(
        3,
        pass,
        &format!(
            "temporal strong rate: slope {slope:.3} (band [-1.35, -0.65]), \
             r2 = {:.3}",
            rep.fit.r_squared
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_4_spatial_strong_rate() {
    let cfg = rate_study(Axis::Spatial);
    let rep = run_convergence_study(&cfg).unwrap();
    let slope = rep.fit.slope;
    let pass = (-1.4..=-0.6).contains(&slope);
    report(
        4,
        pass,
        &format!(
            "spatial strong rate: slope {slope:.3} (band [-1.4, -0.6]), \
             r2 = {:.3}",
            rep.fit.r_squared
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_5_noise_time_regularity() {
    // Lags 2^-10 .. 2^-6 as stated. Note that 1/mu_(1,0)^2 ~ 6.4e-4, so
    // these lags sit at or above the slowest relaxation time; the measured
    // exponent in this window reflects the stationary plateau rather than
    // the |t-s|^{1/4} scaling regime.
    let lattice = Arc::new(ModeLattice::new(8, 2.0).unwrap());
    let steps = 64usize;
    let horizon = 2.0f64.powi(-4); // grid spacing 2^-10
    let paths: Vec<_> = (0..200u64)
        .map(|s| {
            sample_ou_path(rng::split(5, s), lattice.clone(), steps, horizon, 1.0).unwrap()
        })
        .collect();
    let base = 32usize;
    let pairs: Vec<(usize, usize)> =
        [1usize, 2, 4, 8, 16].iter().map(|&d| (base, base + d)).collect();
    let exponent = time_holder_fit(&paths, -0.05, 2.0, &pairs).unwrap();
    let pass = (0.17..=0.33).contains(&exponent);
    report(
        5,
        pass,
        &format!("noise time-Hoelder exponent {exponent:.3} (band [0.17, 0.33])"),
    );
    assert!(pass);
}

#[test]
fn criterion_6_semigroup_smoothing_exponent() {
    // t in [1e-6, 1e-2] as stated; mu_(1,0)^2 ~ 1.6e3 puts most of this
    // window deep in the decay regime of every mode, where the C^1 norm
    // falls off much faster than the t^{-1/4} smoothing law.
    let lattice = Arc::new(ModeLattice::new(32, 2.0).unwrap());
    let probe = equal_block_energy_field(lattice, 9);
    let times: Vec<f64> = (0..9).map(|i| 10f64.powf(-6.0 + 4.0 * i as f64 / 8.0)).collect();
    let slope = smoothing_slope(&probe, &times, 1.0).unwrap();
    let pass = slope >= -0.35;
    report(
        6,
        pass,
        &format!("semigroup smoothing slope {slope:.3} (limit >= -0.35)"),
    );
    assert!(pass);
}

#[test]
fn criterion_7_mild_form_quadrature_oracle() {
    // sigma = 0, G = sine(1), N = 1: each step of the stepper must match a
    // 1e4-point midpoint Riemann sum of the mild-form step integral
    // int_0^h exp(-(h-s) mu_k^2) ds applied to the frozen drift.
    let cfg = SchemeConfig {
        cutoff: 1,
        steps: 4,
        horizon: 0.01,
        sigma: 0.0,
        initial: InitialProfile::SingleMode { k: (1, 0), amp: 0.1 },
        nonlinearity: NonlinearitySpec::Sine { a: 1.0 },
        drift: DriftVariant::Integrated,
        oversample: 2.0,
    };
    let lattice = Arc::new(ModeLattice::new(cfg.cutoff, cfg.oversample).unwrap());
    let path = sample_ou_path(3, lattice.clone(), cfg.steps, cfg.horizon, 0.0).unwrap();
    let h = cfg.step_size();
    let quad_points = 10_000usize;

    let mut worst = 0.0f64;
    let mut u = cfg.initial.realize(lattice.clone()).unwrap();
    for j in 0..cfg.steps {
        let stepped = step(&u, j, &path, &cfg).unwrap();
        let g = eval_g(&cfg.nonlinearity, &u).unwrap();
        for (i, &k) in lattice.modes().iter().enumerate() {
            let mu_sq = eigenvalue(k).unwrap().powi(2);
            // Midpoint Riemann sum of int_0^h exp(-(h-s) mu_sq) ds.
            let mut integral = 0.0;
            let ds = h / quad_points as f64;
            for q in 0..quad_points {
                let s = (q as f64 + 0.5) * ds;
                integral += (-(h - s) * mu_sq).exp() * ds;
            }
            let expected = u.coeffs()[i] * (-h * mu_sq).exp() + g.coeffs()[i] * integral;
            worst = worst.max((stepped.coeffs()[i] - expected).norm());
        }
        u = stepped;
    }
    let pass = worst <= 1e-6;
    report(
        7,
        pass,
        &format!("mild-form quadrature oracle: max per-step deviation {worst:.3e} (limit 1e-6)"),
    );
    assert!(pass);
}

#[test]
fn criterion_8_determinism_and_parallel_soundness() {
    let cfg = rate_study(Axis::Temporal);
    let a = run_convergence_study_with_workers(&cfg, 1).unwrap();
    let b = run_convergence_study_with_workers(&cfg, 1).unwrap();
    let c = run_convergence_study_with_workers(&cfg, 4).unwrap();
    let rerun_ok = a.to_samples_csv() == b.to_samples_csv()
        && a.to_summary_csv() == b.to_summary_csv();
    let workers_ok = a.to_samples_csv() == c.to_samples_csv()
        && a.to_summary_csv() == c.to_summary_csv();
    let pass = rerun_ok && workers_ok;
    report(
        8,
        pass,
        &format!(
            "determinism: identical CSV across reruns = {rerun_ok}, \
             across worker counts 1 vs 4 = {workers_ok}"
        ),
    );
    assert!(pass);
}
