use bo_wasm_demo::{finite_gap_gaps, finite_gap_profile, frequencies, Wave};

#[test]
fn one_gap_profile_and_gap() {
    let u = finite_gap_profile(&[0.5], 256).unwrap();
    // u(0) = sum 2 r^k = 2 r / (1 - r)
    assert!((u[0] - 2.0).abs() < 1e-12, "{}", u[0]);
    let g = finite_gap_gaps(&[0.5], 4).unwrap();
    assert!((g[0] - 1.0 / 3.0).abs() < 1e-9);
    assert!(g[1..].iter().all(|x| x.abs() < 1e-9));
    assert!(finite_gap_gaps(&[1.5], 4).is_err());
}

#[test]
fn frequency_curve() {
    // gamma = (1/2, 1/2): omega = (-1, 1, 6)
    let w = frequencies(&[0.5, 0.5], 3).unwrap();
    assert_eq!(w, vec![-1.0, 1.0, 6.0]);
    assert_eq!(frequencies(&[], 2).unwrap(), vec![1.0, 4.0]);
    assert!(frequencies(&[-1.0], 2).is_err());
}

#[test]
fn wave_returns_after_one_period() {
    let q = [std::f64::consts::FRAC_1_SQRT_2];
    let mut w = Wave::new(&q, 0.0, 256, 1e-3).unwrap();
    let start = w.profile(128);
    for _ in 0..8 {
        w.advance(std::f64::consts::PI / 4.0).unwrap();
    }
    assert!((w.time() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    let end = w.profile(128);
    let err = start.iter().zip(&end).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-4, "max deviation {err}");
    assert!((w.gaps(1).unwrap()[0] - 1.0).abs() < 1e-6);
    assert!(Wave::new(&q, 0.0, 100, 1e-3).is_err());
}
