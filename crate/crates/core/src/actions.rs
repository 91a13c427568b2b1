//! Action/frequency algebra on finitely supported sequences.
//!
//! A sequence is stored as a sparse list of `(n, value)` pairs with an exact
//! zero tail, so every map below is a finite sum and is computed exactly when
//! the scalar type is exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Decay descriptor attached to truncated infinite sequences. Diagnostic only.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailClass {
    #[default]
    None,
    Power(f64),
    PowerLog(f64),
}

/// Nonnegative sequence `(gamma_n)_{n >= 1}` with finitely many nonzero terms.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionSequence<S = f64> {
    entries: Vec<(u64, S)>,
    tail: TailClass,
}

impl<S: Scalar> ActionSequence<S> {
    pub fn new(entries: Vec<(u64, S)>, tail: TailClass) -> Result<Self> {
        check_indices(entries.iter().map(|e| e.0))?;
        if let Some((n, g)) = entries.iter().find(|(_, g)| g.lt_zero()) {
            return Err(Error::domain(format!(
                "negative action at n = {n}: {}",
                g.to_f64()
            )));
        }
        Ok(Self { entries, tail })
    }

    pub fn empty() -> Self {
        Self {
            entries: Vec::new(),
            tail: TailClass::None,
        }
    }

    pub fn entries(&self) -> &[(u64, S)] {
        &self.entries
    }

    pub fn tail(&self) -> TailClass {
        self.tail
    }

    pub fn with_tail(mut self, tail: TailClass) -> Self {
        self.tail = tail;
        self
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_index(&self) -> u64 {
        self.entries.last().map_or(0, |e| e.0)
    }

    pub fn get(&self, n: u64) -> S {
        self.entries
            .binary_search_by_key(&n, |e| e.0)
            .map_or_else(|_| S::zero(), |i| self.entries[i].1.clone())
    }

    /// Drops exact zeros.
    pub fn sparse(&self) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .filter(|(_, g)| g.sign() != std::cmp::Ordering::Equal)
                .cloned()
                .collect(),
            tail: self.tail,
        }
    }

    /// Dense vector `(gamma_1, ..., gamma_len)`.
    pub fn dense(&self, len: usize) -> Vec<S> {
        let mut v = vec![S::zero(); len];
        for (n, g) in &self.entries {
            if (*n as usize) <= len {
                v[*n as usize - 1] = g.clone();
            }
        }
        v
    }

    pub fn to_f64(&self) -> ActionSequence<f64> {
        ActionSequence {
            entries: self.entries.iter().map(|(n, g)| (*n, g.to_f64())).collect(),
            tail: self.tail,
        }
    }
}

fn check_indices(idx: impl Iterator<Item = u64>) -> Result<()> {
    let mut prev = 0u64;
    for n in idx {
        if n <= prev {
            return Err(Error::domain(format!(
                "indices must be positive and strictly increasing (got {n} after {prev})"
            )));
        }
        prev = n;
    }
    Ok(())
}

/// `omega` and `omega_check` for `1 <= n <= n_max`, stored at position `n - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyList<S = f64> {
    pub omega: Vec<S>,
    pub omega_check: Vec<S>,
    pub n_max: u64,
}

impl<S: Scalar> FrequencyList<S> {
    pub fn omega_at(&self, n: u64) -> &S {
        &self.omega[n as usize - 1]
    }

    pub fn omega_check_at(&self, n: u64) -> &S {
        &self.omega_check[n as usize - 1]
    }
}

/// Sequence `y_1 <= y_2 <= ...` in the monotone concave cone, extended
/// constantly past its last entry.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneConcaveSeq<S = f64> {
    values: Vec<S>,
    y_limit: Option<S>,
}

impl<S: Scalar> MonotoneConcaveSeq<S> {
    pub fn new(values: Vec<S>, y_limit: Option<S>) -> Result<Self> {
        let n = values.len();
        let at = |i: usize| {
            if i == 0 {
                S::zero()
            } else {
                values[(i - 1).min(n - 1)].clone()
            }
        };
        let slack = round_off(&values);
        let below = |d: &S| d.lt_zero() && d.to_f64() < -slack;
        for i in 1..=n {
            let d_left = at(i) - at(i - 1);
            let d_right = at(i + 1) - at(i);
            if below(&d_left) {
                return Err(Error::domain(format!("monotonicity fails at n = {i}")));
            }
            if below(&(d_left - d_right)) {
                return Err(Error::domain(format!("concavity fails at n = {i}")));
            }
        }
        if let (Some(lim), Some(last)) = (&y_limit, values.last()) {
            if (lim.clone() - last.clone()).sign() != std::cmp::Ordering::Equal {
                return Err(Error::domain(
                    "y_limit differs from the last value of a constantly extended sequence",
                ));
            }
        }
        Ok(Self { values, y_limit })
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn y_limit(&self) -> S {
        self.y_limit
            .clone()
            .or_else(|| self.values.last().cloned())
            .unwrap_or_else(S::zero)
    }
}

/// Absolute round-off allowance for a sequence: zero for exact scalars.
fn round_off<S: Scalar>(values: &[S]) -> f64 {
    if S::is_exact() {
        return 0.0;
    }
    let scale = values.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
    64.0 * f64::EPSILON * scale
}

/// Linear map `Omega[x]_n = sum_{k<=n} k x_k + n sum_{k>n} x_k` for `n = 1..=n_max`.
/// Entries past `n_max` still contribute through the second sum.
pub fn omega_map<S: Scalar>(x: &[(u64, S)], n_max: u64) -> Vec<S> {
    let len = n_max as usize;
    // increments Omega_n - Omega_{n-1} = sum_{k>=n} x_k
    let mut tail = vec![S::zero(); len + 1];
    let mut beyond = S::zero();
    for (k, v) in x {
        if (*k as usize) <= len {
            tail[*k as usize - 1] = tail[*k as usize - 1].clone() + v.clone();
        } else {
            beyond = beyond + v.clone();
        }
    }
    tail[len] = beyond;
    for i in (0..len).rev() {
        tail[i] = tail[i].clone() + tail[i + 1].clone();
    }
    let mut out = Vec::with_capacity(len);
    let mut acc = S::zero();
    for inc in tail.into_iter().take(len) {
        acc = acc + inc;
        out.push(acc.clone());
    }
    out
}

/// `omega_check_n = sum_k min(k, n) gamma_k`, evaluated sparsely for a single `n`.
pub fn omega_check_at<S: Scalar>(gamma: &ActionSequence<S>, n: u64) -> S {
    gamma.entries.iter().fold(S::zero(), |acc, (k, g)| {
        acc + S::from_u64((*k).min(n)) * g.clone()
    })
}

/// `omega_n = n^2 - 2 omega_check_n`, evaluated sparsely.
pub fn omega_at<S: Scalar>(gamma: &ActionSequence<S>, n: u64) -> S {
    let w = omega_check_at(gamma, n);
    S::from_u64(n) * S::from_u64(n) - w.clone() - w
}

pub fn frequencies_from_actions<S: Scalar>(
    gamma: &ActionSequence<S>,
    n_max: u64,
) -> Result<FrequencyList<S>> {
    if n_max == 0 {
        return Err(Error::domain("n_max must be positive"));
    }
    if n_max < gamma.max_index() {
        return Err(Error::domain(format!(
            "n_max = {n_max} is below the largest action index {}",
            gamma.max_index()
        )));
    }
    let omega_check = omega_map(&gamma.entries, n_max);
    let omega = omega_check
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let n = S::from_u64(i as u64 + 1);
            n.clone() * n - w.clone() - w.clone()
        })
        .collect();
    Ok(FrequencyList {
        omega,
        omega_check,
        n_max,
    })
}

/// Second differences `gamma_n = (y_n - y_{n-1}) - (y_{n+1} - y_n)`, zeros dropped.
pub fn actions_from_frequencies<S: Scalar>(y: &MonotoneConcaveSeq<S>) -> ActionSequence<S> {
    let v = &y.values;
    let n = v.len();
    let slack = round_off(v);
    let mut entries = Vec::new();
    for i in 0..n {
        let prev = if i == 0 { S::zero() } else { v[i - 1].clone() };
        let next = if i + 1 < n { v[i + 1].clone() } else { v[i].clone() };
        let g = (v[i].clone() - prev) - (next - v[i].clone());
        if g.sign() != std::cmp::Ordering::Equal && g.to_f64().abs() > slack {
            entries.push((i as u64 + 1, g));
        }
    }
    ActionSequence {
        entries,
        tail: TailClass::None,
    }
}

fn check_restricted_indices(j: &[u64], len: usize) -> Result<()> {
    if j.len() != len {
        return Err(Error::domain(format!(
            "index list has {} entries but {len} values were given",
            j.len()
        )));
    }
    check_indices(j.iter().copied())
}

/// Telescoped `omega_check` on a lacunary index set `J`.
pub fn restricted_forward<S: Scalar>(j: &[u64], gamma: &[S]) -> Result<Vec<S>> {
    check_restricted_indices(j, gamma.len())?;
    if let Some(p) = gamma.iter().position(|g| !g.gt_zero()) {
        return Err(Error::domain(format!(
            "action at n = {} must be positive",
            j[p]
        )));
    }
    let mut suffix = vec![S::zero(); gamma.len() + 1];
    for p in (0..gamma.len()).rev() {
        suffix[p] = suffix[p + 1].clone() + gamma[p].clone();
    }
    let mut out = Vec::with_capacity(gamma.len());
    let (mut prev_n, mut acc) = (0u64, S::zero());
    for (p, &n) in j.iter().enumerate() {
        acc = acc + S::from_u64(n - prev_n) * suffix[p].clone();
        out.push(acc.clone());
        prev_n = n;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub enum RestrictedMode<S> {
    /// `J` is the full finite support.
    Finite,
    /// `J` lists the first terms of an infinite support with limit `y_limit`.
    Infinite { y_limit: S },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RestrictedInverse<S> {
    /// `gamma_{n_p}`; in infinite mode only the first `|J| - 1` are determined.
    pub gamma: Vec<S>,
    /// Infinite mode: `sum_{q >= N} gamma_{n_q}`, the mass not yet assigned.
    pub tail_mass: Option<S>,
    /// 1-based positions `p` where a nonstrict condition holds with equality.
    pub boundary: Vec<usize>,
}

/// Inverts [`restricted_forward`] through divided differences.
pub fn restricted_inverse<S: Scalar>(
    j: &[u64],
    y: &[S],
    mode: RestrictedMode<S>,
) -> Result<RestrictedInverse<S>> {
    check_restricted_indices(j, y.len())?;
    if y.is_empty() {
        return Ok(RestrictedInverse {
            gamma: Vec::new(),
            tail_mass: matches!(mode, RestrictedMode::Infinite { .. }).then(S::zero),
            boundary: Vec::new(),
        });
    }
    let mut prev = S::zero();
    for (p, v) in y.iter().enumerate() {
        if !(v.clone() - prev).gt_zero() {
            return Err(Error::domain(format!(
                "values must be strictly increasing and positive (fails at p = {})",
                p + 1
            )));
        }
        prev = v.clone();
    }
    let n = y.len();
    // divided differences D_1..D_N (D_0 unused)
    let dd = |p: usize| -> S {
        let (n_lo, y_lo) = if p == 1 {
            (0, S::zero())
        } else {
            (j[p - 2], y[p - 2].clone())
        };
        (y[p - 1].clone() - y_lo).div_i64((j[p - 1] - n_lo) as i64)
    };
    let d: Vec<S> = (1..=n).map(dd).collect();
    let mut gamma = Vec::with_capacity(n);
    let mut boundary = Vec::new();
    match mode {
        RestrictedMode::Finite => {
            for p in 0..n {
                let next = if p + 1 < n { d[p + 1].clone() } else { S::zero() };
                let g = d[p].clone() - next;
                match g.sign() {
                    std::cmp::Ordering::Less => {
                        return Err(Error::domain(format!(
                            "divided-difference condition fails at p = {}",
                            p + 1
                        )))
                    }
                    std::cmp::Ordering::Equal => boundary.push(p + 1),
                    std::cmp::Ordering::Greater => {}
                }
                gamma.push(g);
            }
            Ok(RestrictedInverse {
                gamma,
                tail_mass: None,
                boundary,
            })
        }
        RestrictedMode::Infinite { y_limit } => {
            if !(y_limit - y[n - 1].clone()).gt_zero() {
                return Err(Error::domain(
                    "y_limit must exceed the last value for an infinite support",
                ));
            }
            for p in 0..n - 1 {
                let g = d[p].clone() - d[p + 1].clone();
                if !g.gt_zero() {
                    return Err(Error::domain(format!(
                        "strict divided-difference condition fails at p = {}",
                        p + 1
                    )));
                }
                gamma.push(g);
            }
            Ok(RestrictedInverse {
                gamma,
                tail_mass: Some(d[n - 1].clone()),
                boundary,
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadraticMethod {
    DoubleSum,
    SuffixSum,
}

/// `Q(x)` for a dense sequence `x = (x_1, x_2, ...)`.
pub fn quadratic_form<S: Scalar>(x: &[S], method: QuadraticMethod) -> S {
    match method {
        QuadraticMethod::DoubleSum => {
            let mut tail = S::zero();
            let mut acc = S::zero();
            for (i, v) in x.iter().enumerate().rev() {
                let n = S::from_u64(i as u64 + 1);
                let two_tail = tail.clone() + tail.clone();
                acc = acc + n * v.clone() * (v.clone() + two_tail);
                tail = tail + v.clone();
            }
            acc
        }
        QuadraticMethod::SuffixSum => {
            let mut s = S::zero();
            let mut acc = S::zero();
            for v in x.iter().rev() {
                s = s + v.clone();
                acc = acc + s.clone() * s.clone();
            }
            acc
        }
    }
}

/// Alternating witness `x_n = (-1)^{n+1} / a_N`, `a_N = sum_{n<=N} sqrt(n)`.
pub fn q_witness(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::domain("witness length must be at least 2"));
    }
    let a: f64 = (1..=n).map(|k| (k as f64).sqrt()).sum();
    Ok((1..=n)
        .map(|k| if k % 2 == 1 { 1.0 / a } else { -1.0 / a })
        .collect())
}

/// `sum n^2 gamma_n - sum_n (sum_{k>=n} gamma_k)^2`, summed block-wise over
/// the support so that large sparse indices cost nothing extra.
pub fn hamiltonian_from_actions<S: Scalar>(gamma: &ActionSequence<S>) -> S {
    let e = &gamma.entries;
    let mut kinetic = S::zero();
    for (n, g) in e {
        kinetic = kinetic + S::from_u64(*n) * S::from_u64(*n) * g.clone();
    }
    let mut squares = S::zero();
    let mut suffix = S::zero();
    for p in (0..e.len()).rev() {
        suffix = suffix + e[p].1.clone();
        let width = e[p].0 - if p == 0 { 0 } else { e[p - 1].0 };
        squares = squares + S::from_u64(width) * suffix.clone() * suffix.clone();
    }
    kinetic - squares
}

/// `sum n^sigma |x_n|` over a sparse list.
pub fn weighted_norm<S: Scalar>(x: &[(u64, S)], sigma: f64) -> f64 {
    x.iter()
        .map(|(n, v)| (*n as f64).powf(sigma) * v.to_f64().abs())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use num_rational::BigRational;

    fn seq(e: &[(u64, i64)]) -> ActionSequence<BigRational> {
        ActionSequence::new(e.iter().map(|&(n, g)| (n, rat(g, 1))).collect(), TailClass::None).unwrap()
    }

    fn ints(v: &[BigRational]) -> Vec<i64> {
        v.iter().map(|x| x.to_integer().try_into().unwrap()).collect()
    }

    #[test]
    fn frequencies_examples() {
        let f = frequencies_from_actions(&seq(&[(1, 1)]), 2).unwrap();
        assert_eq!(ints(&f.omega_check), [1, 1]);
        assert_eq!(ints(&f.omega), [-1, 2]);
        let f = frequencies_from_actions(&seq(&[(2, 1)]), 3).unwrap();
        assert_eq!(ints(&f.omega_check), [1, 2, 2]);
        assert_eq!(ints(&f.omega), [-1, 0, 5]);
        let f = frequencies_from_actions(&seq(&[]), 4).unwrap();
        assert_eq!(ints(&f.omega), [1, 4, 9, 16]);
    }

    #[test]
    fn frequencies_reject_short_range_and_negative() {
        assert!(frequencies_from_actions(&seq(&[(3, 1)]), 2).is_err());
        assert!(ActionSequence::new(vec![(1, -1.0)], TailClass::None).is_err());
        assert!(ActionSequence::new(vec![(2, 1.0), (2, 1.0)], TailClass::None).is_err());
    }

    #[test]
    fn sparse_evaluation_matches_dense() {
        let g = seq(&[(2, 3), (5, 1), (9, 2)]);
        let f = frequencies_from_actions(&g, 12).unwrap();
        for n in 1..=12 {
            assert_eq!(&omega_check_at(&g, n), f.omega_check_at(n));
            assert_eq!(&omega_at(&g, n), f.omega_at(n));
        }
    }

    #[test]
    fn inverse_examples() {
        let y = |v: &[i64]| MonotoneConcaveSeq::new(v.iter().map(|&x| rat(x, 1)).collect(), None).unwrap();
        assert_eq!(actions_from_frequencies(&y(&[1, 1, 1])), seq(&[(1, 1)]));
        assert_eq!(actions_from_frequencies(&y(&[1, 2, 2, 2])), seq(&[(2, 1)]));
        assert!(actions_from_frequencies(&y(&[0, 0])).is_empty());
    }

    #[test]
    fn inverse_rejects_bad_shapes() {
        let mk = |v: &[i64]| MonotoneConcaveSeq::new(v.iter().map(|&x| rat(x, 1)).collect(), None);
        assert!(mk(&[2, 1]).is_err());
        assert!(mk(&[1, 3]).is_err());
        assert!(MonotoneConcaveSeq::new(vec![rat(1, 1)], Some(rat(2, 1))).is_err());
    }

    #[test]
    fn restricted_examples() {
        assert_eq!(restricted_forward(&[1], &[rat(1, 1)]).unwrap(), vec![rat(1, 1)]);
        assert_eq!(
            restricted_forward(&[1, 2], &[rat(1, 2), rat(1, 2)]).unwrap(),
            vec![rat(1, 1), rat(3, 2)]
        );
        assert_eq!(restricted_forward(&[3], &[rat(2, 1)]).unwrap(), vec![rat(6, 1)]);
        let inv = restricted_inverse(&[1], &[rat(1, 1)], RestrictedMode::Finite).unwrap();
        assert_eq!(inv.gamma, vec![rat(1, 1)]);
        let inv =
            restricted_inverse(&[1, 2], &[rat(1, 1), rat(3, 2)], RestrictedMode::Finite).unwrap();
        assert_eq!(inv.gamma, vec![rat(1, 2), rat(1, 2)]);
        assert!(restricted_inverse(&[1], &[rat(0, 1)], RestrictedMode::Finite).is_err());
        assert!(restricted_forward(&[1], &[rat(0, 1)]).is_err());
    }

    #[test]
    fn restricted_boundary_and_infinite() {
        // D = (1, 1, 0): equality at p = 1 is flagged, not rejected
        let inv = restricted_inverse(&[1, 2], &[rat(1, 1), rat(2, 1)], RestrictedMode::Finite).unwrap();
        assert_eq!(inv.boundary, vec![1]);
        let inv = restricted_inverse(
            &[1, 3],
            &[rat(2, 1), rat(4, 1)],
            RestrictedMode::Infinite { y_limit: rat(5, 1) },
        )
        .unwrap();
        assert_eq!(inv.gamma, vec![rat(1, 1)]);
        assert_eq!(inv.tail_mass, Some(rat(1, 1)));
        assert!(restricted_inverse(
            &[1, 2],
            &[rat(1, 1), rat(2, 1)],
            RestrictedMode::Infinite { y_limit: rat(3, 1) }
        )
        .is_err());
    }

    #[test]
    fn quadratic_form_examples() {
        for m in [QuadraticMethod::DoubleSum, QuadraticMethod::SuffixSum] {
            assert_eq!(quadratic_form(&[1.0], m), 1.0);
            assert_eq!(quadratic_form(&[1.0, 1.0], m), 5.0);
        }
        let x = q_witness(2).unwrap();
        let a = 1.0 + 2f64.sqrt();
        assert!((quadratic_form(&x, QuadraticMethod::SuffixSum) - 1.0 / (a * a)).abs() < 1e-15);
        assert!((quadratic_form(&x, QuadraticMethod::DoubleSum) - 0.171573).abs() < 1e-6);
        assert!(q_witness(1).is_err());
    }

    #[test]
    fn hamiltonian_examples() {
        assert_eq!(hamiltonian_from_actions(&seq(&[(1, 1)])), rat(0, 1));
        assert_eq!(hamiltonian_from_actions(&seq(&[(2, 1)])), rat(2, 1));
        assert_eq!(hamiltonian_from_actions(&seq(&[])), rat(0, 1));
    }

    #[test]
    fn weighted_norm_examples() {
        assert_eq!(weighted_norm(&[(1, 1.0)], 1.0), 1.0);
        assert_eq!(weighted_norm(&[(1, 1.0), (2, 1.0)], 1.0), 3.0);
        assert_eq!(weighted_norm(&[(2, 0.25)], 3.0), 2.0);
    }
}
