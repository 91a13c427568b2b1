use std::f64::consts::PI;

use bo_core::actions::{ActionSequence, TailClass};
use bo_core::diophantine::{self, QuadraticIrrational as Qi, SearchBudget};
use bo_core::genfun;
use bo_core::potentials::{self, FiniteGapSpec, FitOptions, TravelingWaveSpec};
use bo_core::spectral::{self, Potential};
use num_bigint::BigInt;
use num_complex::Complex64;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn geometric(r: f64, len: usize) -> Potential {
    Potential::from_coeffs((1..=len).map(|k| c(r.powi(k as i32))).collect())
}

fn two_gap() -> Potential {
    let q = vec![c(0.4), Complex64::from_polar(0.2, PI / 3.0)];
    potentials::finite_gap_potential(&FiniteGapSpec::new(q).unwrap(), None).unwrap()
}

#[test]
fn lax_matrix_structure() {
    let m = spectral::build_lax_matrix(&Potential::zero(), 4).matrix;
    for j in 0..4 {
        for k in 0..4 {
            let want = if j == k { j as f64 } else { 0.0 };
            assert_eq!(m[(j, k)], c(want));
        }
    }
    let cc = Complex64::new(0.3, -0.2);
    let m = spectral::build_lax_matrix(&Potential::from_coeffs(vec![cc]), 3).matrix;
    assert_eq!(m[(1, 0)], -cc);
    assert_eq!(m[(0, 1)], -cc.conj());
    assert_eq!(m[(2, 0)], c(0.0));
    let m = spectral::build_lax_matrix(&geometric(0.5, 60), 64).matrix;
    assert_eq!(m.adjoint(), m);
    assert_eq!(m[(5, 2)], c(-0.125));
    let h = spectral::build_lax_matrix(&two_gap(), 32).matrix;
    assert_eq!(h.adjoint(), h);
}

#[test]
fn one_gap_spectrum_and_closed_form_oracle() {
    // the closed form r^2 / (1 - r^2) is checked against M / 2M eigensolves first
    for r in [0.2, 0.35, 0.5, 0.7] {
        let u = geometric(r, 200);
        let coarse = spectral::eigenvalues(&u, 128).unwrap();
        let fine = spectral::eigenvalues(&u, 256).unwrap();
        let g_coarse = coarse[1] - coarse[0] - 1.0;
        let g_fine = fine[1] - fine[0] - 1.0;
        assert!((g_coarse - g_fine).abs() < 1e-10);
        assert!((g_fine - r * r / (1.0 - r * r)).abs() < 1e-6, "r = {r}");
    }
    let s = spectral::lax_spectrum(&geometric(0.5, 60), 128, true).unwrap();
    assert!(s.gap(1) > 1e-6);
    assert!((2..=s.n_keep).all(|n| s.gap(n) < 1e-8));
    assert!((s.lambda0() + 1.0 / 3.0).abs() < 1e-10);
}

#[test]
fn phased_two_gap_has_two_gaps() {
    let u = two_gap();
    let r = spectral::actions_from_potential(&u, 128).unwrap();
    assert_eq!(r.actions.len(), 2);
    assert_eq!(r.actions.entries()[0].0, 1);
    assert_eq!(r.actions.entries()[1].0, 2);
    assert!(r.formula_residual < 1e-6);
}

#[test]
fn scaled_profile_gap_sits_at_n() {
    for n in [2u32, 3] {
        let spec = TravelingWaveSpec::new(0.4, n, 0.7, 0.0).unwrap();
        let p = potentials::benjamin_profile(&spec, None).unwrap();
        assert!((p.mean - n as f64).abs() < 1e-12);
        let a = spectral::actions_from_potential(&p.potential, 128).unwrap().actions;
        assert_eq!(a.len(), 1);
        assert_eq!(a.entries()[0].0, n as u64);
    }
}

#[test]
fn benjamin_profile_examples() {
    assert!((potentials::u_r(0.5, 0.0) - 3.0).abs() < 1e-15);
    let spec = TravelingWaveSpec::new(0.5, 1, 0.0, 0.0).unwrap();
    assert!((spec.c_r() - 5.0 / 3.0).abs() < 1e-15);
    let p = potentials::benjamin_profile(&spec, None).unwrap();
    for (k, v) in p.potential.coeffs().iter().enumerate().take(40) {
        assert!((v - c(0.5f64.powi(k as i32 + 1))).norm() < 1e-14);
    }
    let fg = potentials::finite_gap_potential(&FiniteGapSpec::real(&[0.5]).unwrap(), None).unwrap();
    for k in 1..40 {
        assert!((fg.coeff(k) - p.potential.coeff(k)).norm() < 1e-14);
    }
    let tiny = potentials::benjamin_profile(&TravelingWaveSpec::new(1e-9, 1, 0.0, 0.0).unwrap(), None).unwrap();
    assert!(tiny.potential.l2_norm_sq() < 1e-16);
    assert!(TravelingWaveSpec::new(1.0, 1, 0.0, 0.0).is_err());
}

#[test]
fn finite_gap_reality_and_degenerate_cases() {
    let empty = potentials::finite_gap_potential(&FiniteGapSpec::new(vec![]).unwrap(), None).unwrap();
    assert_eq!(empty.bandwidth(), 0);
    assert!(FiniteGapSpec::new(vec![c(1.0)]).is_err());
    let u = two_gap();
    let g = 256;
    let samples: Vec<Complex64> = u.sample(g).into_iter().map(c).collect();
    let back = bo_core::fourier::forward(&samples);
    assert!(back[0].norm() < 1e-12);
    for k in 1..30 {
        assert!((back[k] - back[g - k].conj()).norm() < 1e-12);
    }
}

#[test]
fn galilean_examples() {
    let u = Potential::from_coeffs(vec![c(1.0)]);
    let same = potentials::galilean(&u, 0.0, 3.0);
    assert_eq!(same.potential, u);
    let shifted = potentials::galilean(&u, 2.5, 0.0);
    assert_eq!((shifted.mean, shifted.potential.coeff(1)), (2.5, c(1.0)));
    let turned = potentials::galilean(&u, 1.0, PI);
    assert!((turned.potential.coeff(1) - c(1.0)).norm() < 1e-14);
}

#[test]
fn fit_examples() {
    let empty = potentials::fit_finite_gap(&ActionSequence::empty(), FitOptions::default()).unwrap();
    assert!(empty.q.is_empty());
    let one = ActionSequence::new(vec![(1, 1.0 / 3.0)], TailClass::None).unwrap();
    let r = potentials::fit_finite_gap(&one, FitOptions::default()).unwrap();
    assert!((r.q[0].abs() - 0.5).abs() < 1e-9);

    // round trip from a real two-parameter generator
    let gen = [0.45, 0.3];
    let u = potentials::finite_gap_potential(&FiniteGapSpec::real(&gen).unwrap(), None).unwrap();
    let target = spectral::actions_from_potential(&u, 128).unwrap().actions;
    assert_eq!(target.len(), 2);
    let fit = potentials::fit_finite_gap(&target, FitOptions::default()).unwrap();
    assert!(fit.max_residual < 1e-6);
    let mut got: Vec<f64> = fit.q.iter().map(|x| x.abs()).collect();
    got.sort_by(f64::total_cmp);
    let mut want = gen.to_vec();
    want.sort_by(f64::total_cmp);
    assert!(got.iter().zip(&want).all(|(a, b)| (a - b).abs() < 1e-4), "{got:?}");
}

#[test]
fn resolvent_examples() {
    let w = spectral::resolvent_apply(&Potential::zero(), 2.0, 8).unwrap();
    assert!((w.coeffs[0] - c(0.5)).norm() < 1e-15);
    assert!(w.coeffs.iter().skip(1).all(|z| z.norm() == 0.0));
    assert!((w.pairing_with_one() - 0.5).abs() < 1e-15);
    let u = geometric(0.5, 60);
    let l0 = spectral::lax_spectrum(&u, 128, true).unwrap().lambda0();
    let w = spectral::resolvent_apply(&u, 1.0 - l0, 128).unwrap();
    assert!(w.pairing_with_one() > 0.0 && w.residual <= 1e-10);
    assert!(spectral::resolvent_apply(&u, -l0 - 0.01, 128).is_err());
}

#[test]
fn genfun_cross_checks() {
    for u in [geometric(0.5, 60), two_gap()] {
        let spec = spectral::lax_spectrum(&u, 128, true).unwrap();
        let l0 = spec.lambda0();
        for lam in genfun::default_lambda_grid(l0) {
            let r = genfun::genfun_resolvent(&u, lam, 128).unwrap().value;
            let p = genfun::genfun_product(&spec, lam).unwrap();
            assert!(r > 0.0);
            assert!((r - p.value).abs() < 1e-8 + p.tail_bound, "lambda = {lam}");
            let td = genfun::trace_difference(&u, lam, 128).unwrap();
            let es = genfun::trace_eigen_sum(&spec, lam).unwrap();
            assert!((td - es).abs() < 1e-8);
        }
        let big = 10.0 * (1.0 + l0.abs());
        for lam in [big, 2.0 * big, 10.0 * big] {
            assert!(genfun::genfun_resolvent(&u, lam, 128).unwrap().value < 2.0 / lam);
        }
    }
    let u = geometric(0.5, 60);
    for lam in [0.5, 1.0, 3.0] {
        let fd = genfun::fd_log_derivative(&u, lam, 128, 1e-4).unwrap();
        let td = genfun::trace_difference(&u, lam, 128).unwrap();
        assert!((fd - td).abs() < 1e-6);
    }
}

#[test]
fn recover_two_gap_spectrum() {
    let spec = spectral::lax_spectrum(&two_gap(), 128, true).unwrap();
    let pz = genfun::PoleZeroData::from_spectrum(&spec).unwrap();
    assert_eq!(pz.poles().len(), 3);
    let rec = genfun::recover_spectrum(&pz, 20).unwrap();
    for n in 0..=20 {
        assert!((rec[n] - spec.lambda[n]).abs() < 1e-6);
    }
}

fn sqrt2() -> Qi {
    Qi::sqrt(2).unwrap()
}

#[test]
fn field_examples() {
    let a: Qi = "1+sqrt:2".parse().unwrap();
    let b: Qi = "1-sqrt:2".parse().unwrap();
    assert_eq!(a.clone() + b.clone(), Qi::from_int(2));
    assert_eq!(a * b, Qi::from_int(-1));
    assert_eq!(sqrt2().floor(), BigInt::from(1));
    assert!(sqrt2().checked_add(&Qi::sqrt(3).unwrap()).is_err());
}

#[test]
fn convergent_examples() {
    let got: Vec<(i64, i64)> = diophantine::cf_convergents(&sqrt2(), 4)
        .iter()
        .map(|c| (c.p.clone().try_into().unwrap(), c.q.clone().try_into().unwrap()))
        .collect();
    assert_eq!(got, vec![(1, 1), (3, 2), (7, 5), (17, 12)]);
    let phi: Qi = "1/2+1/2*sqrt:5".parse().unwrap();
    let got: Vec<(i64, i64)> = diophantine::cf_convergents(&phi, 4)
        .iter()
        .map(|c| (c.p.clone().try_into().unwrap(), c.q.clone().try_into().unwrap()))
        .collect();
    assert_eq!(got, vec![(1, 1), (2, 1), (3, 2), (5, 3)]);
    assert!(diophantine::cf_convergents(&sqrt2(), 0).is_empty());
    let errs: Vec<f64> = diophantine::cf_convergents(&sqrt2(), 8).iter().map(|c| c.error(&sqrt2()).to_f64()).collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]));
}

/// Exhaustive reference: every (m1, m2) with |m2| <= 20 hitting the interval.
fn lattice_oracle(lo: f64, hi: f64) -> Vec<(i64, i64)> {
    let b = 2f64.sqrt();
    let mut out = Vec::new();
    for m2 in -20i64..=20 {
        for m1 in -40i64..=40 {
            let v = m1 as f64 + m2 as f64 * b;
            if v >= lo && v <= hi {
                out.push((m1, m2));
            }
        }
    }
    out
}

#[test]
fn lattice_examples() {
    let cases = [("21/10", "11/5", (-12, 10)), ("3/10", "11/20", (-1, 1)), ("19/10", "21/10", (2, 0))];
    for (lo, hi, want) in cases {
        let (lo, hi): (Qi, Qi) = (lo.parse().unwrap(), hi.parse().unwrap());
        let p = diophantine::hit_interval_lattice(&sqrt2(), &lo, &hi, SearchBudget::default()).unwrap();
        assert_eq!(p.to_i64_pair(), Some(want));
        assert!(lattice_oracle(lo.to_f64(), hi.to_f64()).contains(&want));
    }
    // nested shrinking intervals around 1/3 give distinct points
    let centre = Qi::from_ratio(1, 3);
    let mut seen = Vec::new();
    for k in 1..6 {
        let w = Qi::from_ratio(1, 10i64.pow(k));
        let lo = centre.clone() - w.clone() + w.clone().div_i64(3) * Qi::from_int(2);
        let hi = centre.clone() + w;
        let p = diophantine::hit_interval_lattice(&sqrt2(), &lo, &hi, SearchBudget::default()).unwrap();
        assert!(p.value >= lo && p.value <= hi);
        seen.push(p.to_i64_pair().unwrap());
    }
    let mut dedup = seen.clone();
    dedup.dedup();
    assert_eq!(dedup.len(), seen.len());
}

use bo_core::scalar::Scalar;

/// Reference search: smallest n >= n_min, then smallest |k|, in floating point with exact confirmation.
fn squares_oracle(y_inf: f64, eps: f64, n_min: u64) -> (u64, i64) {
    let b = 2f64.sqrt();
    for n in n_min..100_000 {
        let base = 2.0 * y_inf - (n * n) as f64;
        let k_lo = ((eps - base) / b).ceil() as i64 - 1;
        let k_hi = ((2.0 * eps - base) / b).floor() as i64 + 1;
        let mut ks: Vec<i64> = (k_lo..=k_hi)
            .filter(|k| {
                let rho = Qi::from_int(2 * y_inf as i64 - (n * n) as i64) + sqrt2() * Qi::from_int(*k);
                let e = Qi::from_ratio((eps * 1024.0) as i64, 1024);
                rho >= e && rho <= e.clone() + e
            })
            .collect();
        ks.sort_by_key(|k| k.abs());
        if let Some(k) = ks.first() {
            return (n, *k);
        }
    }
    panic!("oracle found nothing");
}

#[test]
fn squares_examples() {
    let b = sqrt2();
    let h = diophantine::hit_interval_squares(&b, &Qi::from_int(1), &Qi::from_ratio(1, 8), 1, SearchBudget::default()).unwrap();
    assert_eq!((h.n, h.k.clone()), (4, BigInt::from(10)));
    assert_eq!(h.rho, "-14+10*sqrt:2".parse().unwrap());
    assert_eq!(squares_oracle(1.0, 0.125, 1), (4, 10));

    let eps = Qi::from_ratio(1, 32);
    let h = diophantine::hit_interval_squares(&b, &Qi::from_int(1), &eps, 8, SearchBudget::default()).unwrap();
    let (n, k) = squares_oracle(1.0, 1.0 / 32.0, 8);
    assert_eq!((h.n, h.k.clone()), (n, BigInt::from(k)));
    assert!(h.rho >= eps && h.rho <= eps.clone() + eps.clone());

    // halving eps and doubling n_min moves n strictly up
    let mut n_prev = 0;
    let mut e = Qi::from_ratio(1, 8);
    for _ in 0..5 {
        let h = diophantine::hit_interval_squares(&b, &Qi::from_int(1), &e, 1.max(2 * n_prev), SearchBudget::default()).unwrap();
        assert!(h.n > n_prev && h.n >= 2 * n_prev);
        n_prev = h.n;
        e = e.div_i64(2);
    }
}
