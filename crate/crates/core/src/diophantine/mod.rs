//! Exact interval-hitting searches in `Z + bZ` and in `{n^2 + k b}` for a
//! quadratic irrational `b`.
//!
//! Every candidate is pre-screened in double precision and then confirmed in
//! the quadratic field, so a returned hit satisfies its interval constraint
//! with zero tolerance.

mod field;

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

pub use field::QuadraticIrrational;

/// Exact rational from `a/b`, an integer, or a decimal literal.
pub fn parse_rational_str(s: &str) -> Result<num_rational::BigRational> {
    field::parse_rational(s)
}

use crate::error::{Error, Result};

/// Default search limits; the CLI can override them through `BO_SEARCH_BUDGET`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Maximum number of values of `n` (or `m_2`) examined per call.
    pub max_steps: u64,
    /// Largest admissible `|k|`.
    pub max_abs_k: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_steps: 1_000_000,
            max_abs_k: 1_000_000_000,
        }
    }
}

impl SearchBudget {
    pub fn with_steps(max_steps: u64) -> Self {
        Self {
            max_steps,
            ..Self::default()
        }
    }
}

/// A continued-fraction convergent `p / q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub p: BigInt,
    pub q: BigInt,
}

impl Convergent {
    /// `|q b - p|`, exactly.
    pub fn error(&self, b: &QuadraticIrrational) -> QuadraticIrrational {
        let v = b.lattice(&(-self.p.clone()), &self.q);
        if v.signum() == Ordering::Less {
            -v
        } else {
            v
        }
    }
}

/// First `count` convergents of the regular continued fraction of `b`.
/// Stops early if `b` turns out to be rational.
pub fn cf_convergents(b: &QuadraticIrrational, count: usize) -> Vec<Convergent> {
    let mut out = Vec::with_capacity(count);
    let (mut p_prev, mut p_prev2) = (BigInt::one(), BigInt::zero());
    let (mut q_prev, mut q_prev2) = (BigInt::zero(), BigInt::one());
    let mut x = b.clone();
    for _ in 0..count {
        let a = x.floor();
        let p = &a * &p_prev + &p_prev2;
        let q = &a * &q_prev + &q_prev2;
        out.push(Convergent {
            p: p.clone(),
            q: q.clone(),
        });
        p_prev2 = std::mem::replace(&mut p_prev, p);
        q_prev2 = std::mem::replace(&mut q_prev, q);
        let frac = x
            .checked_sub(&QuadraticIrrational::from_bigint(a))
            .expect("rational operand");
        if frac.is_zero() {
            break;
        }
        x = frac.recip().expect("nonzero");
    }
    out
}

/// An element `m_1 + m_2 b` of `Z + bZ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePoint2 {
    pub m1: BigInt,
    pub m2: BigInt,
    pub value: QuadraticIrrational,
}

impl LatticePoint2 {
    pub fn new(b: &QuadraticIrrational, m1: BigInt, m2: BigInt) -> Self {
        let value = b.lattice(&m1, &m2);
        Self { m1, m2, value }
    }

    pub fn to_i64_pair(&self) -> Option<(i64, i64)> {
        Some((self.m1.to_i64()?, self.m2.to_i64()?))
    }
}

/// Number of orbit points `{m b mod 1 : 0 <= m < N}` that is guaranteed to
/// meet every closed interval of length `width` (three-gap bound through the
/// continued-fraction convergents of `b`).
fn orbit_length_for_width(b: &QuadraticIrrational, width: &QuadraticIrrational) -> Option<u64> {
    let convs = cf_convergents(b, 200);
    for w in convs.windows(3) {
        // once ||q_{k-1} b|| <= width, N = q_k + q_{k-1} points suffice; take one more level
        if w[0].error(b).cmp_exact(width).ok()? != Ordering::Greater {
            return (&w[2].q + &w[1].q).to_u64();
        }
    }
    None
}

fn require_irrational(b: &QuadraticIrrational) -> Result<()> {
    if b.is_rational() {
        Err(Error::domain(format!("b = {b} must be irrational")))
    } else {
        Ok(())
    }
}

/// Finds `(m_1, m_2)` with `lo <= m_1 + m_2 b <= hi`, exactly.
///
/// Candidates are ordered by `m_2 = 0, 1, 2, ...` and for each `m_2` the
/// smallest admissible `m_1` is taken, so the result is deterministic.
pub fn hit_interval_lattice(
    b: &QuadraticIrrational,
    lo: &QuadraticIrrational,
    hi: &QuadraticIrrational,
    budget: SearchBudget,
) -> Result<LatticePoint2> {
    require_irrational(b)?;
    let width = hi.checked_sub(lo)?;
    if width.signum() != Ordering::Greater {
        return Err(Error::domain(format!("empty interval [{lo}, {hi}]")));
    }
    let guaranteed = orbit_length_for_width(b, &width).unwrap_or(u64::MAX);
    let limit = guaranteed.min(budget.max_steps);

    let bf = b.to_f64();
    let lof = lo.to_f64();
    let wf = width.to_f64();
    for m2 in 0..=limit {
        let x = lof - m2 as f64 * bf;
        let gap = x.ceil() - x;
        let tol = 1e-12 + 8.0 * f64::EPSILON * (lof.abs() + m2 as f64 * bf.abs() + 1.0);
        if gap > wf + tol && wf < 1.0 - tol {
            continue;
        }
        let m2b = BigInt::from(m2);
        let base = BigInt::from(x.ceil() as i128);
        for off in [-1i64, 0, 1] {
            let m1 = &base + off;
            let v = b.lattice(&m1, &m2b);
            if v.cmp_exact(lo)? != Ordering::Less && v.cmp_exact(hi)? != Ordering::Greater {
                // smallest admissible m1 for this m2
                let below = b.lattice(&(&m1 - 1), &m2b);
                if below.cmp_exact(lo)? != Ordering::Less {
                    let exact = lo.checked_sub(&b.lattice(&BigInt::zero(), &m2b))?.ceil();
                    return Ok(LatticePoint2::new(b, exact, m2b));
                }
                return Ok(LatticePoint2::new(b, m1, m2b));
            }
        }
    }
    Err(Error::computation(format!(
        "lattice search exhausted {limit} steps for [{lo}, {hi}] (guaranteed bound {guaranteed})"
    )))
}

/// Result of [`hit_interval_squares`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquaresHit {
    pub n: u64,
    pub k: BigInt,
    /// `rho = 2 y_inf - n^2 + k b`.
    pub rho: QuadraticIrrational,
}

/// Finds the smallest `n >= n_min` (then the `k` of smallest `|k|`) with
/// `2 y_inf - n^2 + k b` in `[eps, 2 eps]`, exactly. Requires `b > 0`.
pub fn hit_interval_squares(
    b: &QuadraticIrrational,
    y_inf: &QuadraticIrrational,
    eps: &QuadraticIrrational,
    n_min: u64,
    budget: SearchBudget,
) -> Result<SquaresHit> {
    require_irrational(b)?;
    if b.signum() != Ordering::Greater {
        return Err(Error::domain("b must be positive"));
    }
    if eps.signum() != Ordering::Greater {
        return Err(Error::domain("eps must be positive"));
    }
    if n_min == 0 {
        return Err(Error::domain("n_min must be at least 1"));
    }
    let two_y = y_inf.checked_add(y_inf)?;
    let two_eps = eps.checked_add(eps)?;
    let bf = b.to_f64();
    let yf = two_y.to_f64();
    let ef = eps.to_f64();

    for n in n_min..n_min.saturating_add(budget.max_steps) {
        let n2 = (n as f64) * (n as f64);
        let lo_f = ef - yf + n2;
        let hi_f = 2.0 * ef - yf + n2;
        let tol = 1e-12 + 16.0 * f64::EPSILON * (n2 + yf.abs() + ef);
        let kc = (lo_f / bf).ceil();
        let fits = kc * bf <= hi_f + tol * (1.0 + kc.abs() * bf / n2.max(1.0))
            || (kc - 1.0) * bf >= lo_f - tol;
        if !fits {
            continue;
        }
        // exact range of k
        let n2q = QuadraticIrrational::from_bigint(BigInt::from(n) * BigInt::from(n));
        let lo = eps.checked_sub(&two_y)?.checked_add(&n2q)?;
        let hi = two_eps.checked_sub(&two_y)?.checked_add(&n2q)?;
        let k_lo = lo.checked_div(b)?.ceil();
        let k_hi = hi.checked_div(b)?.floor();
        if k_lo > k_hi {
            continue;
        }
        let k = if k_lo.is_positive() {
            k_lo
        } else if k_hi.is_negative() {
            k_hi
        } else {
            BigInt::zero()
        };
        if k.abs() > BigInt::from(budget.max_abs_k) {
            return Err(Error::computation(format!(
                "|k| = {} exceeds budget {} at n = {n}",
                k.abs(),
                budget.max_abs_k
            )));
        }
        let rho = two_y
            .checked_sub(&n2q)?
            .checked_add(&b.lattice(&BigInt::zero(), &k))?;
        debug_assert!(rho.cmp_exact(eps)? != Ordering::Less);
        debug_assert!(rho.cmp_exact(&two_eps)? != Ordering::Greater);
        return Ok(SquaresHit { n, k, rho });
    }
    Err(Error::computation(format!(
        "squares search exhausted {} values of n from {n_min} (eps = {})",
        budget.max_steps,
        eps.to_f64()
    )))
}

/// Non-certified variant of [`hit_interval_squares`] for an arbitrary real
/// `b` given in double precision. The result carries `certified = false`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproxSquaresHit {
    pub n: u64,
    pub k: i64,
    pub rho: f64,
    pub certified: bool,
}

pub fn hit_interval_squares_approx(
    b: f64,
    y_inf: f64,
    eps: f64,
    n_min: u64,
    budget: SearchBudget,
) -> Result<ApproxSquaresHit> {
    if !(b > 0.0) || !(eps > 0.0) || n_min == 0 {
        return Err(Error::domain("need b > 0, eps > 0, n_min >= 1"));
    }
    for n in n_min..n_min.saturating_add(budget.max_steps) {
        let n2 = (n as f64) * (n as f64);
        let k = ((eps - 2.0 * y_inf + n2) / b).ceil();
        let rho = 2.0 * y_inf - n2 + k * b;
        if rho >= eps && rho <= 2.0 * eps {
            return Ok(ApproxSquaresHit {
                n,
                k: k as i64,
                rho,
                certified: false,
            });
        }
    }
    Err(Error::computation("approximate squares search exhausted its budget"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qi(s: &str) -> QuadraticIrrational {
        s.parse().unwrap()
    }

    fn pairs(c: &[Convergent]) -> Vec<(i64, i64)> {
        c.iter()
            .map(|c| (c.p.to_i64().unwrap(), c.q.to_i64().unwrap()))
            .collect()
    }

    #[test]
    fn convergents_of_sqrt2_and_golden_ratio() {
        let c = cf_convergents(&qi("sqrt:2"), 4);
        assert_eq!(pairs(&c), vec![(1, 1), (3, 2), (7, 5), (17, 12)]);
        let g = cf_convergents(&qi("1/2+1/2*sqrt:5"), 4);
        assert_eq!(pairs(&g), vec![(1, 1), (2, 1), (3, 2), (5, 3)]);
        assert!(cf_convergents(&qi("sqrt:2"), 0).is_empty());
    }

    #[test]
    fn convergent_errors_decrease() {
        let b = qi("sqrt:7");
        let c = cf_convergents(&b, 12);
        for w in c.windows(2) {
            assert_eq!(
                w[1].error(&b).cmp_exact(&w[0].error(&b)).unwrap(),
                Ordering::Less
            );
        }
    }

    #[test]
    fn lattice_hits() {
        let b = qi("sqrt:2");
        let budget = SearchBudget::default();
        let h = hit_interval_lattice(&b, &qi("21/10"), &qi("11/5"), budget).unwrap();
        assert_eq!(h.to_i64_pair(), Some((-12, 10)));
        let h = hit_interval_lattice(&b, &qi("3/10"), &qi("11/20"), budget).unwrap();
        assert_eq!(h.to_i64_pair(), Some((-1, 1)));
        let h = hit_interval_lattice(&b, &qi("19/10"), &qi("21/10"), budget).unwrap();
        assert_eq!(h.to_i64_pair(), Some((2, 0)));
    }

    #[test]
    fn lattice_rejects_bad_input() {
        let b = qi("sqrt:2");
        let budget = SearchBudget::default();
        assert!(matches!(
            hit_interval_lattice(&b, &qi("1"), &qi("1"), budget),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            hit_interval_lattice(&qi("2"), &qi("0"), &qi("1/2"), budget),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            hit_interval_lattice(&b, &qi("1/10"), &qi("100001/1000000"), SearchBudget::with_steps(3)),
            Err(Error::Computation(_))
        ));
    }

    #[test]
    fn squares_first_hit() {
        let h = hit_interval_squares(
            &qi("sqrt:2"),
            &qi("1"),
            &qi("1/8"),
            1,
            SearchBudget::default(),
        )
        .unwrap();
        assert_eq!((h.n, h.k.to_i64().unwrap()), (4, 10));
        assert_eq!(h.rho, qi("-14+10*sqrt:2"));
    }

    #[test]
    fn squares_wide_interval() {
        // eps >= 2 y_inf: the first n already lands
        let h = hit_interval_squares(&qi("sqrt:2"), &qi("1"), &qi("3"), 1, SearchBudget::default())
            .unwrap();
        assert_eq!(h.n, 1);
    }

    #[test]
    fn approx_variant_agrees_on_first_hit() {
        let h = hit_interval_squares_approx(2f64.sqrt(), 1.0, 0.125, 1, SearchBudget::default())
            .unwrap();
        assert_eq!((h.n, h.k), (4, 10));
        assert!(!h.certified);
    }
}
