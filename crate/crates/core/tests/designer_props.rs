use std::collections::BTreeMap;

use bo_core::actions::{self, ActionSequence, TailClass};
use bo_core::designer::{self, Check};
use bo_core::diophantine::{QuadraticIrrational as Qi, SearchBudget};
use bo_core::scalar::rat;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn failed(checks: Vec<Check>) -> Vec<String> {
    checks.into_iter().filter(|c| !c.holds).map(|c| c.name).collect()
}

/// Index steps and strictly decreasing positive integer slopes.
fn fg_input() -> impl Strategy<Value = (u64, Vec<u64>, Vec<i64>)> {
    (1u64..5, proptest::collection::vec((1u64..6, 1i64..4), 1..6)).prop_map(|(a, steps)| {
        let len = steps.len() as i64;
        let (mut ns, mut ks) = (Vec::new(), Vec::new());
        let (mut n, mut k) = (0u64, 0i64);
        for (p, (dn, extra)) in steps.iter().enumerate() {
            let slope = (len - p as i64) * 4 + extra;
            n += dn;
            k += slope * *dn as i64;
            ns.push(n);
            ks.push(k);
        }
        (a, ns, ks)
    })
}

proptest! {
    #[test]
    fn fg_frequencies_are_in_lattice((a, ns, ks) in fg_input()) {
        let d = designer::design_periodic_finite_gap(a, &ns, &ks).unwrap();
        prop_assert!(d.certified());
        let ar = BigRational::from_integer(a.into());
        for (n, k) in ns.iter().zip(&ks) {
            prop_assert_eq!(actions::omega_check_at(&d.actions, *n), rat(*k, a as i64));
            let w = actions::omega_at(&d.actions, *n);
            prop_assert!((w.clone() * &ar).is_integer());
            prop_assert_eq!(w, BigRational::from_integer((n * n).into()) - rat(2 * k, a as i64));
        }
        let mut k_map = BTreeMap::new();
        for (n, k) in ns.iter().zip(&ks) {
            k_map.insert(*n, vec![BigInt::from((n * n) as i64 * a as i64 - 2 * k)]);
        }
        let report = designer::check_qp_dichotomy(&d.actions, &k_map, &[rat(1, a as i64)], 0.0);
        prop_assert!(report.passed());
    }

    #[test]
    fn fg_rejects_flat_slopes(a in 1u64..5, n in 1u64..20, k in 0i64..30) {
        // a single term with k_1 <= 0 has no positive action
        let r = designer::design_periodic_finite_gap(a, &[n], &[-k]);
        prop_assert!(r.is_err());
    }
}

#[test]
fn periodic_designs_hold_every_invariant() {
    let cases = [("sqrt:2", 1, 2, "1/2", 6), ("sqrt:3", 2, 1, "1", 5), ("1/2+1/2*sqrt:5", 1, 1, "1/4", 4)];
    for (b, y_num, y_den, eps0, p) in cases {
        let b: Qi = b.parse().unwrap();
        let y = Qi::from_ratio(y_num, y_den);
        let eps0: Qi = eps0.parse().unwrap();
        let d = designer::design_periodic_infinite(&b, &y, &eps0, p, SearchBudget::default()).unwrap();
        assert!(failed(d.checks()).is_empty(), "{:?}", failed(d.checks()));
        // the truncated actions reproduce y_inf as omega_check at infinity
        let total = d.terms.iter().fold(Qi::from_int(0), |acc, t| acc + t.gamma.clone() * Qi::from_int(t.n as i64));
        assert_eq!(total, y);
        for (i, t) in d.terms.iter().enumerate() {
            let scale = Qi::from_ratio(1, 4i64.pow(i as u32 + 1));
            assert_eq!(t.eps, eps0.clone() * scale);
        }
    }
}

#[test]
fn qp_designs_hold_every_invariant() {
    let b = Qi::sqrt(2).unwrap();
    for s in [-0.45, -0.25, 0.0, 0.5, 1.0] {
        let d = designer::design_quasiperiodic(&b, s, 8, SearchBudget::default()).unwrap();
        assert!(failed(d.checks()).is_empty(), "s = {s}: {:?}", failed(d.checks()));
        let r = designer::check_qp_dichotomy(&d.actions(), &d.k_map(), &d.omega(), 0.0);
        assert!(r.passed() && r.checked == 8);
    }
    let phi: Qi = "1/2+1/2*sqrt:5".parse().unwrap();
    let d = designer::design_quasiperiodic(&phi, 0.0, 6, SearchBudget::default()).unwrap();
    assert!(failed(d.checks()).is_empty());
}

#[test]
fn dichotomy_negative_control() {
    let b = Qi::sqrt(2).unwrap();
    let d = designer::design_quasiperiodic(&b, -0.25, 6, SearchBudget::default()).unwrap();
    let mut k = d.k_map();
    k.get_mut(&3).unwrap()[0] += 1;
    let r = designer::check_qp_dichotomy(&d.actions(), &k, &d.omega(), 0.0);
    assert_eq!(r.violations.iter().map(|v| v.0).collect::<Vec<_>>(), vec![3]);
    // floating mode with tolerance
    let gamma = d.actions().to_f64();
    let omega: Vec<f64> = d.omega().iter().map(Qi::to_f64).collect();
    assert!(designer::check_qp_dichotomy(&gamma, &d.k_map(), &omega, 1e-9).passed());
}

#[test]
fn obstruction_flags() {
    let finite = ActionSequence::new(vec![(1, Qi::from_int(1))], TailClass::None).unwrap();
    let r = designer::check_rational_period_obstruction(&finite, &Qi::from_int(2), None).unwrap();
    assert!(r.rational_period && r.passed());
    let r = designer::check_rational_period_obstruction(&finite, &Qi::from_ratio(1, 3), None).unwrap();
    assert!(!r.passed());

    let b = Qi::sqrt(2).unwrap();
    let d = designer::design_periodic_infinite(&b, &Qi::from_int(1), &Qi::from_ratio(1, 2), 3, SearchBudget::default()).unwrap();
    let r = designer::check_rational_period_obstruction(&d.actions(), &b, Some(&b)).unwrap();
    assert!(!r.rational_period && r.passed());
    let tagged = d.actions().with_tail(TailClass::Power(3.0));
    assert!(!designer::check_rational_period_obstruction(&tagged, &Qi::from_int(2), None).unwrap().passed());

    let dense = ActionSequence::new((1..=4).map(|n| (n, Qi::from_ratio(1, 10))).collect(), TailClass::None).unwrap();
    let r = designer::check_rational_period_obstruction(&dense, &b, Some(&b)).unwrap();
    assert!(!r.passed());
}
