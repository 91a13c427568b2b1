use bo_core::actions;
use bo_core::pde_sim::{self, Integrator, SimConfig, Snapshot};
use bo_core::potentials::{self, FiniteGapSpec, TravelingWaveSpec};
use bo_core::spectral::{self, Potential};
use num_complex::Complex64;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn fft_index(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

#[test]
fn nonlinear_term_matches_direct_convolution() {
    let n = 32;
    let mut v = vec![zero(); n];
    v[1] = Complex64::new(1.0, 0.0);
    v[n - 1] = Complex64::new(1.0, 0.0);
    v[3] = Complex64::new(0.2, -0.1);
    v[n - 3] = v[3].conj();
    let mut got = vec![zero(); n];
    Integrator::new(n, 1e-3, true).nonlinear(&v, &mut got);
    let coeff = |k: i64| if k.unsigned_abs() as usize >= n / 2 { zero() } else { v[fft_index(k, n)] };
    for k in -(n as i64) / 2 + 1..(n as i64) / 2 {
        let conv: Complex64 = (-16..=16).map(|j| coeff(j) * coeff(k - j)).sum();
        let want = if 3 * k.unsigned_abs() as usize > n { zero() } else { Complex64::new(0.0, -(k as f64)) * conv };
        assert!((got[fft_index(k, n)] - want).norm() < 1e-13, "k = {k}");
    }
    // u = 2 cos x alone: d/dt hat u(2) = -2i
    let mut w = vec![zero(); n];
    w[1] = Complex64::new(1.0, 0.0);
    w[n - 1] = Complex64::new(1.0, 0.0);
    Integrator::new(n, 1e-3, true).nonlinear(&w, &mut got);
    assert!((got[2] - Complex64::new(0.0, -2.0)).norm() < 1e-14);
}

#[test]
fn linear_dispersion_for_small_amplitude() {
    let t = 0.5;
    for k in 1..=4usize {
        let mut c = vec![Complex64::new(0.0, 0.0); k];
        c[k - 1] = Complex64::new(1e-6, 0.0);
        let cfg = SimConfig { modes: 32, dt: 1e-2, t_final: t, ..SimConfig::default() };
        let s = pde_sim::evolve(0.0, &Potential::from_coeffs(c), &cfg).unwrap();
        let got = s.potential.coeff(k as i64) / 1e-6;
        let want = Complex64::from_polar(1.0, (k * k) as f64 * t);
        assert!((got - want).norm() < 1e-5, "k = {k}");
    }
}

fn benjamin() -> Potential {
    let spec = TravelingWaveSpec::new(0.5, 1, 0.0, 0.0).unwrap();
    potentials::benjamin_profile(&spec, None).unwrap().potential
}

/// Exact traveling solution `U(x - c t)` with `c = c_r - 2`.
fn translated(u: &Potential, c: f64, t: f64) -> Snapshot {
    let coeffs = u
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, z)| z * Complex64::from_polar(1.0, -((i + 1) as f64) * c * t))
        .collect();
    Snapshot { t, mean: 0.0, potential: Potential::from_coeffs(coeffs) }
}

#[test]
fn fourth_order_in_time() {
    let u = benjamin();
    let exact = translated(&u, 5.0 / 3.0 - 2.0, 1.0);
    let err = |dt: f64| {
        let cfg = SimConfig { modes: 128, dt, t_final: 1.0, ..SimConfig::default() };
        pde_sim::l2_distance_sq(&pde_sim::evolve(0.0, &u, &cfg).unwrap(), &exact).sqrt()
    };
    let e: Vec<f64> = [0.04, 0.02, 0.01].iter().map(|dt| err(*dt)).collect();
    for w in e.windows(2) {
        let ratio = w[0] / w[1];
        assert!((12.0..=20.0).contains(&ratio), "errors {e:?}");
    }
}

#[test]
fn traveling_wave_is_translated() {
    let u = benjamin();
    let cfg = SimConfig { modes: 128, dt: 1e-3, t_final: 1.0, ..SimConfig::default() };
    let s = pde_sim::evolve(0.0, &u, &cfg).unwrap();
    let d = pde_sim::l2_distance_sq(&s, &translated(&u, -1.0 / 3.0, 1.0)).sqrt();
    assert!(d < 1e-9, "distance {d}");
}

#[test]
fn zero_data_and_mean() {
    let cfg = SimConfig { modes: 32, dt: 1e-2, t_final: 0.5, cadence: 10, ..SimConfig::default() };
    let trace = pde_sim::simulate(0.0, &Potential::zero(), &cfg).unwrap();
    assert!(trace.snapshots.iter().all(|s| s.potential.l2_norm_sq() == 0.0 && s.mean == 0.0));
    let r = pde_sim::conservation_report(&trace);
    assert_eq!((r.mean_drift, r.hamiltonian_drift, r.action_drift), (0.0, 0.0, 0.0));

    let u = benjamin();
    let cfg = SimConfig { modes: 128, dt: 1e-2, t_final: 1.0, cadence: 20, ..SimConfig::default() };
    let trace = pde_sim::simulate(0.7, &u, &cfg).unwrap();
    let m0 = trace.samples[0].mean;
    assert!(trace.samples.iter().all(|s| (s.mean - m0).abs() < 1e-12));
}

#[test]
fn invalid_configs_are_rejected() {
    let u = benjamin();
    for cfg in [
        SimConfig { modes: 100, ..SimConfig::default() },
        SimConfig { dt: 0.0, ..SimConfig::default() },
        SimConfig { modes: 64, ..SimConfig::default() },
    ] {
        assert!(pde_sim::evolve(0.0, &u, &cfg).is_err());
    }
}

#[test]
fn hamiltonian_quadrature_matches_actions() {
    let gens = [
        FiniteGapSpec::real(&[0.5]).unwrap(),
        FiniteGapSpec::new(vec![Complex64::new(0.4, 0.0), Complex64::from_polar(0.2, 1.0)]).unwrap(),
        FiniteGapSpec::real(&[0.7, -0.3]).unwrap(),
    ];
    for g in gens {
        let u = potentials::finite_gap_potential(&g, None).unwrap();
        let gamma = spectral::actions_from_potential(&u, 256).unwrap().actions;
        let h = pde_sim::hamiltonian_quadrature(0.0, &u);
        assert!((h - actions::hamiltonian_from_actions(&gamma)).abs() < 1e-5);
    }
}

#[test]
fn velocity_of_shifted_wave() {
    let u = benjamin();
    let cfg = SimConfig { modes: 128, dt: 1e-3, t_final: 2.0, cadence: 250, ..SimConfig::default() };
    let trace = pde_sim::simulate(0.5, &u, &cfg).unwrap();
    // mean a moves the wave by 2a
    let v = pde_sim::measure_velocity(&trace.snapshots).unwrap();
    assert!((v - (5.0 / 3.0 - 2.0 + 1.0)).abs() < 1e-6, "velocity {v}");
}
