//! Constructions of action sequences whose flows are time periodic or
//! quasiperiodic, with exact certificates, plus the matching checkers.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::actions::{self, ActionSequence, TailClass};
use crate::diophantine::{self, QuadraticIrrational as Qi, SearchBudget};
use crate::error::{Error, Result};
use crate::io::{actions_to_json, int_json, qi_json, rational_json};
use crate::scalar::Scalar;

fn pow4(p: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(4).pow(p))
}

fn same_field(values: &[&Qi]) -> Result<()> {
    values
        .iter()
        .try_fold(Qi::from_int(0), |acc, v| acc.checked_add(v))
        .map(|_| ())
}

fn require_positive_irrational(b: &Qi) -> Result<()> {
    if b.is_rational() || b.signum() != std::cmp::Ordering::Greater {
        return Err(Error::domain(format!("b = {b} must be a positive irrational")));
    }
    Ok(())
}

/// One named, exactly decided property of a design.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub holds: bool,
}

fn check(name: impl Into<String>, holds: bool) -> Check {
    Check {
        name: name.into(),
        holds,
    }
}

fn checks_json(c: &[Check]) -> Value {
    Value::Array(c.iter().map(|c| json!({"name": c.name, "holds": c.holds})).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicTerm {
    pub n: u64,
    pub k: BigInt,
    pub eps: Qi,
    pub rho: Qi,
    pub gamma: Qi,
}

/// `P`-term truncation of the lacunary periodic construction.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicDesign {
    pub b: Qi,
    pub y_inf: Qi,
    pub eps0: Qi,
    pub terms: Vec<PeriodicTerm>,
    /// `omega_{n_p}(gamma) - k_p b` for the truncated sequence.
    pub residuals: Vec<Qi>,
    /// `rho_P`; bounds every residual.
    pub residual_bound: Qi,
    /// `(n_p^3 gamma_{n_p}, 4^{p-1} n_1^2 eps_{p+1} / 2)` per term.
    pub witness: Vec<(Qi, Qi)>,
    /// `n_1 gamma_{n_1} / y_inf`: share of `y_inf` carried by the first term.
    pub gamma1_margin: f64,
    pub warnings: Vec<String>,
}

pub fn design_periodic_infinite(
    b: &Qi,
    y_inf: &Qi,
    eps0: &Qi,
    terms: usize,
    budget: SearchBudget,
) -> Result<PeriodicDesign> {
    require_positive_irrational(b)?;
    same_field(&[b, y_inf, eps0])?;
    if terms == 0 {
        return Err(Error::domain("need at least one term"));
    }
    if y_inf.signum() != std::cmp::Ordering::Greater {
        return Err(Error::domain("y_inf must be positive"));
    }
    if eps0.signum() != std::cmp::Ordering::Greater {
        return Err(Error::domain("eps0 must be positive"));
    }
    let four_y = y_inf.scale(&BigRational::from_integer(4.into()));
    if eps0.cmp_exact(&four_y)? != std::cmp::Ordering::Less {
        return Err(Error::domain(format!("eps0 = {eps0} must be below 4 y_inf = {four_y}")));
    }

    let eps: Vec<Qi> = (1..=terms as u32 + 1)
        .map(|p| eps0.scale(&pow4(p).recip()))
        .collect();
    let mut hits = Vec::with_capacity(terms);
    let mut n_prev = 0u64;
    for e in eps.iter().take(terms) {
        let hit = diophantine::hit_interval_squares(b, y_inf, e, 1.max(2 * n_prev), budget)?;
        n_prev = hit.n;
        hits.push(hit);
    }

    // a_p for p >= 2, with a_{P+1} = 0 closing the truncation
    let a: Vec<Qi> = (0..terms)
        .map(|i| {
            if i == 0 {
                Qi::from_int(0)
            } else {
                (hits[i - 1].rho.clone() - hits[i].rho.clone())
                    .div_i64(2 * (hits[i].n - hits[i - 1].n) as i64)
            }
        })
        .collect();
    let mut gamma: Vec<Qi> = (0..terms)
        .map(|i| {
            let next = a.get(i + 1).cloned().unwrap_or_else(|| Qi::from_int(0));
            a[i].clone() - next
        })
        .collect();
    let carried = (1..terms).fold(Qi::from_int(0), |acc, i| {
        acc + Qi::from_int(hits[i].n as i64) * gamma[i].clone()
    });
    gamma[0] = (y_inf.clone() - carried).div_i64(hits[0].n as i64);
    if gamma.iter().any(|g| g.signum() != std::cmp::Ordering::Greater) {
        return Err(Error::computation("constructed action is not positive"));
    }

    let terms_vec: Vec<PeriodicTerm> = hits
        .iter()
        .zip(&gamma)
        .zip(&eps)
        .map(|((h, g), e)| PeriodicTerm {
            n: h.n,
            k: h.k.clone(),
            eps: e.clone(),
            rho: h.rho.clone(),
            gamma: g.clone(),
        })
        .collect();
    let seq = ActionSequence::new(
        terms_vec.iter().map(|t| (t.n, t.gamma.clone())).collect(),
        TailClass::Power(3.0),
    )?;
    let residuals: Vec<Qi> = terms_vec
        .iter()
        .map(|t| actions::omega_at(&seq, t.n) - b.lattice(&BigInt::zero(), &t.k))
        .collect();
    let n1 = Qi::from_int(terms_vec[0].n as i64);
    let witness = terms_vec
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let n = Qi::from_int(t.n as i64);
            let lhs = n.clone() * n.clone() * n * t.gamma.clone();
            let rhs = eps[i + 1].scale(&(pow4(i as u32) / BigRational::from_integer(2.into())))
                * n1.clone()
                * n1.clone();
            (lhs, rhs)
        })
        .collect();
    let gamma1_margin = (n1 * gamma[0].clone()).to_f64() / y_inf.to_f64();
    let mut warnings = Vec::new();
    if gamma1_margin < 1e-3 {
        warnings.push(format!("thin positivity margin for the first action: {gamma1_margin:.3e}"));
    }
    Ok(PeriodicDesign {
        b: b.clone(),
        y_inf: y_inf.clone(),
        eps0: eps0.clone(),
        residual_bound: terms_vec.last().unwrap().rho.clone(),
        terms: terms_vec,
        residuals,
        witness,
        gamma1_margin,
        warnings,
    })
}

impl PeriodicDesign {
    pub fn actions(&self) -> ActionSequence<Qi> {
        ActionSequence::new(
            self.terms.iter().map(|t| (t.n, t.gamma.clone())).collect(),
            TailClass::Power(3.0),
        )
        .expect("design actions are positive and increasing")
    }

    /// Every invariant of the construction, decided exactly.
    pub fn checks(&self) -> Vec<Check> {
        let ge = |a: &Qi, b: &Qi| a.cmp_exact(b).map(|o| o.is_ge()).unwrap_or(false);
        let two = BigRational::from_integer(2.into());
        let mut out = Vec::new();
        let p_last = self.terms.len() as u32;
        for (i, t) in self.terms.iter().enumerate() {
            let p = i + 1;
            out.push(check(
                format!("rho_{p} in [eps_{p}, 2 eps_{p}]"),
                ge(&t.rho, &t.eps) && ge(&t.eps.scale(&two), &t.rho),
            ));
            out.push(check(format!("gamma_{p} > 0"), t.gamma.signum().is_gt()));
            if i > 0 {
                let prev = &self.terms[i - 1];
                out.push(check(format!("n_{p} >= 2 n_{}", p - 1), t.n >= 2 * prev.n));
                out.push(check(
                    format!("rho_{p} < rho_{}", p - 1),
                    !ge(&t.rho, &prev.rho),
                ));
            }
            let r = &self.residuals[i];
            let abs = if r.signum().is_lt() { -r.clone() } else { r.clone() };
            out.push(check(format!("|omega_n{p} - k_{p} b| <= rho_P"), ge(&self.residual_bound, &abs)));
            let (lhs, rhs) = &self.witness[i];
            out.push(check(format!("divergence witness at p = {p}"), ge(lhs, rhs)));
        }
        let cap = self.eps0.scale(&(two / pow4(p_last)));
        out.push(check("rho_P <= 2 eps0 4^-P", ge(&cap, &self.residual_bound)));
        out
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|t| {
                json!({"n": t.n, "k": int_json(&t.k), "eps": qi_json(&t.eps),
                       "rho": qi_json(&t.rho), "gamma": qi_json(&t.gamma),
                       "rho_approx": t.rho.to_f64(), "gamma_approx": t.gamma.to_f64()})
            })
            .collect();
        json!({
            "kind": "periodic_infinite",
            "b": qi_json(&self.b),
            "y_inf": qi_json(&self.y_inf),
            "eps0": qi_json(&self.eps0),
            "terms": terms,
            "actions": actions_to_json(&self.actions()),
            "residuals": self.residuals.iter().map(qi_json).collect::<Vec<_>>(),
            "residual_bound": qi_json(&self.residual_bound),
            "tail_mass_bound": qi_json(&self.residual_bound.div_i64(2)),
            "witness": self.witness.iter().map(|(l, r)| json!([qi_json(l), qi_json(r)])).collect::<Vec<_>>(),
            "gamma1_margin": self.gamma1_margin,
            "checks": checks_json(&self.checks()),
            "warnings": self.warnings,
        })
    }
}

/// Finite-gap actions whose frequencies on the support are `n_p^2 - 2 k_p / a`.
#[derive(Clone, Debug, PartialEq)]
pub struct FgPeriodicDesign {
    pub a: u64,
    pub ns: Vec<u64>,
    pub ks: Vec<i64>,
    pub actions: ActionSequence<BigRational>,
    pub omega_check: Vec<BigRational>,
    pub omega: Vec<BigRational>,
    /// `a omega_{n_p}` when integral.
    pub a_omega: Vec<Option<BigInt>>,
    /// Period in units of pi: `2 a`.
    pub period_over_pi: u64,
}

pub fn design_periodic_finite_gap(a: u64, ns: &[u64], ks: &[i64]) -> Result<FgPeriodicDesign> {
    if a == 0 {
        return Err(Error::domain("a must be a positive integer"));
    }
    if ns.len() != ks.len() || ns.is_empty() {
        return Err(Error::domain("n and k lists must be nonempty and of equal length"));
    }
    if ns[0] == 0 || ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("n list must be positive and strictly increasing"));
    }
    if ks.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("k list must be strictly increasing"));
    }
    let r = |x: i64| BigRational::from_integer(BigInt::from(x));
    let len = ns.len();
    let n_at = |p: usize| -> i64 {
        match p {
            0 => 0,
            p if p > len => ns[len - 1] as i64 + 1,
            p => ns[p - 1] as i64,
        }
    };
    let k_at = |p: usize| -> i64 {
        match p {
            0 => 0,
            p if p > len => ks[len - 1],
            p => ks[p - 1],
        }
    };
    let dd = |p: usize| r(k_at(p) - k_at(p - 1)) / r(n_at(p) - n_at(p - 1));
    let mut entries = Vec::with_capacity(len);
    for p in 1..=len {
        let g = (dd(p) - dd(p + 1)) / r(a as i64);
        if !g.is_positive() {
            return Err(Error::domain(format!(
                "divided-difference condition fails at p = {p}"
            )));
        }
        entries.push((ns[p - 1], g));
    }
    let actions = ActionSequence::new(entries, TailClass::None)?;
    let freqs = actions::frequencies_from_actions(&actions, ns[len - 1])?;
    let omega_check: Vec<BigRational> = ns.iter().map(|&n| freqs.omega_check_at(n).clone()).collect();
    let omega: Vec<BigRational> = ns.iter().map(|&n| freqs.omega_at(n).clone()).collect();
    for (p, w) in omega_check.iter().enumerate() {
        if *w != r(ks[p]) / r(a as i64) {
            return Err(Error::computation(format!(
                "frequency certificate fails at p = {}",
                p + 1
            )));
        }
    }
    let a_omega = omega
        .iter()
        .map(|w| {
            let v = w * r(a as i64);
            v.is_integer().then(|| v.to_integer())
        })
        .collect();
    Ok(FgPeriodicDesign {
        a,
        ns: ns.to_vec(),
        ks: ks.to_vec(),
        actions,
        omega_check,
        omega,
        a_omega,
        period_over_pi: 2 * a,
    })
}

impl FgPeriodicDesign {
    pub fn certified(&self) -> bool {
        self.a_omega.iter().all(Option::is_some)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": "periodic_finite_gap",
            "a": self.a,
            "n": self.ns,
            "k": self.ks,
            "actions": actions_to_json(&self.actions),
            "omega_check": self.omega_check.iter().map(rational_json).collect::<Vec<_>>(),
            "omega": self.omega.iter().map(rational_json).collect::<Vec<_>>(),
            "a_omega": self.a_omega.iter().map(|v| v.as_ref().map_or(Value::Null, int_json)).collect::<Vec<_>>(),
            "period_over_pi": self.period_over_pi,
            "certified": self.certified(),
        })
    }
}

pub type Pair = (BigInt, BigInt);

fn dot(p: &Pair, b: &Qi) -> Qi {
    b.lattice(&p.0, &p.1)
}

fn pair_json(p: &Pair) -> Value {
    json!([int_json(&p.0), int_json(&p.1)])
}

#[derive(Clone, Debug, PartialEq)]
pub struct QpTerm {
    pub n: u64,
    pub eps: BigRational,
    pub m: Pair,
    pub gamma_bar: Qi,
    pub delta: Qi,
    pub p: Pair,
    pub ell: Pair,
    pub gamma: Qi,
    /// `y_n = x - sum_{j <= n} delta_j`.
    pub y: Qi,
}

/// `N`-term truncation of the quasiperiodic construction with `omega = (1, b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QpDesign {
    pub b: Qi,
    pub s: f64,
    pub c: BigRational,
    /// Upper bound for `sum_{n > N} eps_n`.
    pub eps_tail_bound: BigRational,
    pub x: Qi,
    pub terms: Vec<QpTerm>,
    /// `k^{(1)} = (1 + 2N, 0) - sum ell^{(j)}`, with `k^{(1)} . omega = y_N`.
    pub kappa: Pair,
}

const EPS_DENOM_BITS: u32 = 40;

fn eps_profile(s: f64, n: u64) -> f64 {
    let nf = n as f64;
    1.0 / (nf.powf(2.0 + 2.0 * s) * (1.0 + nf.ln()).powi(2))
}

fn rational_floor(v: f64) -> BigRational {
    let scale = 2f64.powi(EPS_DENOM_BITS as i32);
    let num = BigInt::from((v * scale).floor() as i128);
    BigRational::new(num, BigInt::one() << EPS_DENOM_BITS)
}

fn rational_ceil(v: f64) -> BigRational {
    let scale = 2f64.powi(EPS_DENOM_BITS as i32);
    let num = BigInt::from((v * scale).ceil() as i128 + 1);
    BigRational::new(num, BigInt::one() << EPS_DENOM_BITS)
}

pub fn design_quasiperiodic(b: &Qi, s: f64, n_terms: usize, budget: SearchBudget) -> Result<QpDesign> {
    if !(s > -0.5) || !s.is_finite() {
        return Err(Error::domain(format!("s = {s} must exceed -1/2")));
    }
    require_positive_irrational(b)?;
    if n_terms == 0 {
        return Err(Error::domain("need at least one term"));
    }
    // Step 1: eps_n = c / (n^{2+2s} (1 + log n)^2) with 4 (sum eps_n + tail) < 1
    let alpha = 2.0 + 2.0 * s;
    let nf = n_terms as f64;
    let unit_tail = nf.powf(1.0 - alpha) / ((alpha - 1.0) * (1.0 + nf.ln()).powi(2));
    let unit_sum: f64 = (1..=n_terms as u64).map(|n| eps_profile(s, n)).sum::<f64>() + unit_tail;
    let c = rational_floor(0.9 / (4.0 * unit_sum));
    let cf = ToPrimitive::to_f64(&c).unwrap_or(0.0);
    let eps: Vec<BigRational> = (1..=n_terms as u64)
        .map(|n| rational_floor(cf * eps_profile(s, n)))
        .collect();
    let eps_tail_bound = rational_ceil(cf * unit_tail * (1.0 + 1e-12));
    let four = BigRational::from_integer(4.into());
    let total = eps.iter().fold(eps_tail_bound.clone(), |a, e| a + e) * &four;
    if eps.iter().any(|e| !e.is_positive()) || total >= BigRational::one() {
        return Err(Error::domain(format!(
            "cannot choose eps_n with 4 sum eps_n < 1 for s = {s}, N = {n_terms}"
        )));
    }

    let two = Qi::from_int(2);
    let mut partial = Vec::with_capacity(n_terms);
    for e in &eps {
        let eq = Qi::rational(e.clone());
        let lo = two.clone() + eq.clone();
        let hi = two.clone() + eq.clone() + eq;
        let hit = diophantine::hit_interval_lattice(b, &lo, &hi, budget)?;
        let gamma_bar = (hit.value.clone() - two.clone()).div_i64(2);
        partial.push(((hit.m1, hit.m2), gamma_bar));
    }
    let sum_bar = partial.iter().fold(Qi::from_int(0), |a, (_, g)| a + g.clone());
    let x = Qi::from_int(1) - sum_bar.clone() - sum_bar;

    // Step 2: greedy delta_n in (y_{n-1} - 2^{-n}, y_{n-1} - 2^{-n-1}), shrunk at both ends
    let mut terms = Vec::with_capacity(n_terms);
    let mut y = x.clone();
    for (i, ((m, gamma_bar), e)) in partial.into_iter().zip(&eps).enumerate() {
        let n = i as u64 + 1;
        let half_n = Qi::rational(BigRational::new(BigInt::one(), BigInt::one() << n));
        let half_n1 = half_n.div_i64(2);
        let width = half_n1.clone();
        let shrink = width.scale(&BigRational::new(BigInt::one(), BigInt::from(1_000_000)));
        let lo = y.clone() - half_n + shrink.clone();
        let hi = y.clone() - half_n1 - shrink;
        let hit = diophantine::hit_interval_lattice(b, &lo, &hi, budget)?;
        let delta = hit.value.clone();
        y = y - delta.clone();
        let p = (hit.m1, hit.m2);
        let ell = (&m.0 + &p.0, &m.1 + &p.1);
        let gamma = gamma_bar.clone() + delta.div_i64(2);
        terms.push(QpTerm {
            n,
            eps: e.clone(),
            m,
            gamma_bar,
            delta,
            p,
            ell,
            gamma,
            y: y.clone(),
        });
    }
    let sum_ell = terms.iter().fold((BigInt::zero(), BigInt::zero()), |acc, t| {
        (acc.0 + &t.ell.0, acc.1 + &t.ell.1)
    });
    let kappa = (BigInt::from(1 + 2 * n_terms as i64) - sum_ell.0, -sum_ell.1);
    Ok(QpDesign {
        b: b.clone(),
        s,
        c,
        eps_tail_bound,
        x,
        terms,
        kappa,
    })
}

impl QpDesign {
    pub fn omega(&self) -> Vec<Qi> {
        vec![Qi::from_int(1), self.b.clone()]
    }

    pub fn actions(&self) -> ActionSequence<Qi> {
        ActionSequence::new(
            self.terms.iter().map(|t| (t.n, t.gamma.clone())).collect(),
            TailClass::PowerLog(self.s),
        )
        .expect("design actions are positive and increasing")
    }

    /// `y_N`, the certified residual of the `k^{(1)} = 0` identity.
    pub fn residual(&self) -> &Qi {
        &self.terms.last().expect("at least one term").y
    }

    /// `k^{(n)}` for `1 <= n <= N` from `k^{(n+1)} = ell^{(n)} + 2 k^{(n)} - k^{(n-1)}`.
    pub fn k_map(&self) -> BTreeMap<u64, Vec<BigInt>> {
        let mut out = BTreeMap::new();
        let mut prev = (BigInt::zero(), BigInt::zero());
        let mut cur = self.kappa.clone();
        for t in &self.terms {
            out.insert(t.n, vec![cur.0.clone(), cur.1.clone()]);
            let next = (
                &t.ell.0 + &cur.0 * 2 - &prev.0,
                &t.ell.1 + &cur.1 * 2 - &prev.1,
            );
            prev = std::mem::replace(&mut cur, next);
        }
        out
    }

    pub fn checks(&self) -> Vec<Check> {
        let lt = |a: &Qi, b: &Qi| a.cmp_exact(b).map(|o| o.is_lt()).unwrap_or(false);
        let le = |a: &Qi, b: &Qi| a.cmp_exact(b).map(|o| o.is_le()).unwrap_or(false);
        let four = BigRational::from_integer(4.into());
        let eps_sum = self.terms.iter().fold(<BigRational as Zero>::zero(), |a, t| a + &t.eps);
        let mut out = vec![
            check("4 sum eps_n < 1", (&eps_sum * &four) < BigRational::one()),
            check(
                "4 (sum eps_n + tail bound) < 1",
                (eps_sum + &self.eps_tail_bound) * four < BigRational::one(),
            ),
            check(
                "x in (1/2, 1)",
                lt(&Qi::from_ratio(1, 2), &self.x) && lt(&self.x, &Qi::from_int(1)),
            ),
        ];
        let two = Qi::from_int(2);
        let mut delta_sum = Qi::from_int(0);
        for t in &self.terms {
            let n = t.n;
            let e = Qi::rational(t.eps.clone());
            let mw = dot(&t.m, &self.b);
            out.push(check(
                format!("2 + eps_{n} <= m.omega <= 2 + 2 eps_{n}"),
                le(&(two.clone() + e.clone()), &mw) && le(&mw, &(two.clone() + e.clone() + e.clone())),
            ));
            out.push(check(
                format!("gamma_bar_{n} in [eps_{n}/2, eps_{n}]"),
                le(&e.div_i64(2), &t.gamma_bar) && le(&t.gamma_bar, &e),
            ));
            let pow = |k: u64| Qi::rational(BigRational::new(BigInt::one(), BigInt::one() << k));
            out.push(check(
                format!("0 < delta_{n} < 2^(1-{n})"),
                t.delta.signum().is_gt() && lt(&t.delta, &(pow(n) + pow(n))),
            ));
            out.push(check(
                format!("delta_{n} = p.omega"),
                dot(&t.p, &self.b) == t.delta,
            ));
            out.push(check(
                format!("2^-{} < y_{n} < 2^-{n}", n + 1),
                lt(&pow(n + 1), &t.y) && lt(&t.y, &pow(n)),
            ));
            out.push(check(
                format!("ell.omega = 2 + 2 gamma_{n}"),
                dot(&t.ell, &self.b) == two.clone() + t.gamma.clone() + t.gamma.clone(),
            ));
            delta_sum = delta_sum + t.delta.clone();
        }
        out.push(check(
            "x = sum delta_n + y_N",
            self.x == delta_sum + self.residual().clone(),
        ));
        out.push(check(
            "k1.omega = y_N",
            dot(&self.kappa, &self.b) == *self.residual(),
        ));
        out
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|t| {
                json!({"n": t.n, "eps": rational_json(&t.eps), "m": pair_json(&t.m),
                       "gamma_bar": qi_json(&t.gamma_bar), "delta": qi_json(&t.delta),
                       "p": pair_json(&t.p), "ell": pair_json(&t.ell), "gamma": qi_json(&t.gamma),
                       "y": qi_json(&t.y), "gamma_approx": t.gamma.to_f64()})
            })
            .collect();
        json!({
            "kind": "quasiperiodic",
            "b": qi_json(&self.b),
            "s": self.s,
            "c": rational_json(&self.c),
            "eps_tail_bound": rational_json(&self.eps_tail_bound),
            "x": qi_json(&self.x),
            "terms": terms,
            "actions": actions_to_json(&self.actions()),
            "k1": pair_json(&self.kappa),
            "residual": qi_json(self.residual()),
            "residual_approx": self.residual().to_f64(),
            "checks": checks_json(&self.checks()),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DichotomyReport {
    pub checked: usize,
    pub violations: Vec<(u64, String)>,
}

impl DichotomyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "passed": self.passed(),
            "checked": self.checked,
            "violations": self.violations.iter().map(|(n, r)| json!({"n": n, "reason": r})).collect::<Vec<_>>(),
        })
    }
}

/// For each `n`, either `gamma_n = 0` or `k^{(n)} . omega = omega_n(gamma)`.
/// Exact scalars are compared exactly; `f64` within `tol`.
pub fn check_qp_dichotomy<S: Scalar>(
    gamma: &ActionSequence<S>,
    k_map: &BTreeMap<u64, Vec<BigInt>>,
    omega: &[S],
    tol: f64,
) -> DichotomyReport {
    let n_max = gamma
        .max_index()
        .max(k_map.keys().next_back().copied().unwrap_or(0));
    let mut checked = 0;
    let mut violations = Vec::new();
    for n in 1..=n_max {
        if gamma.get(n).sign().is_eq() {
            continue;
        }
        checked += 1;
        let Some(k) = k_map.get(&n) else {
            violations.push((n, "active mode without an integer vector".into()));
            continue;
        };
        if k.len() != omega.len() {
            violations.push((n, "integer vector has the wrong length".into()));
            continue;
        }
        let kw = k
            .iter()
            .zip(omega)
            .fold(S::zero(), |acc, (ki, wi)| acc + S::from_bigint(ki) * wi.clone());
        let diff = kw - actions::omega_at(gamma, n);
        let ok = if S::is_exact() {
            diff.sign().is_eq()
        } else {
            diff.to_f64().abs() <= tol
        };
        if !ok {
            violations.push((n, format!("k.omega - omega_n = {:.6e}", diff.to_f64())));
        }
    }
    DichotomyReport {
        checked,
        violations,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObstructionReport {
    pub rational_period: bool,
    pub flags: Vec<String>,
}

impl ObstructionReport {
    pub fn passed(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({"passed": self.passed(), "rational_period": self.rational_period, "flags": self.flags})
    }
}

/// Diagnostics for period claims: a rational `T / pi` forces finitely many
/// active modes with `omega_n in (2 pi / T) Z`; a claim `omega_n in bZ` on
/// consecutive active indices forces `2 + 2 gamma_n in bZ`.
pub fn check_rational_period_obstruction(
    gamma: &ActionSequence<Qi>,
    t_over_pi: &Qi,
    b: Option<&Qi>,
) -> Result<ObstructionReport> {
    let mut flags = Vec::new();
    let rational_period = t_over_pi.is_rational();
    if rational_period {
        if !t_over_pi.signum().is_gt() {
            return Err(Error::domain("period must be positive"));
        }
        if gamma.tail() != TailClass::None {
            flags.push("infinite-support design cannot have a period with T/pi rational".into());
        }
        // omega_n T / (2 pi) must be an integer
        let half_t = t_over_pi.div_i64(2);
        for (n, _) in gamma.entries() {
            let v = actions::omega_at(gamma, *n).checked_mul(&half_t)?;
            let integral = v.is_rational() && v.p().is_integer();
            if !integral {
                flags.push(format!("omega_{n} is not a multiple of 2 pi / T"));
            }
        }
    }
    if let Some(b) = b {
        require_positive_irrational(b)?;
        let e = gamma.entries();
        for w in e.windows(3) {
            if w[1].0 == w[0].0 + 1 && w[2].0 == w[1].0 + 1 {
                let two = Qi::from_int(2);
                let v = two.clone() + w[1].1.clone() + w[1].1.clone();
                if v.integer_multiple_of(b)?.is_none() {
                    flags.push(format!(
                        "consecutive active indices around n = {} force 2 + 2 gamma_n in bZ, which fails",
                        w[1].0
                    ));
                }
            }
        }
    }
    Ok(ObstructionReport {
        rational_period,
        flags,
    })
}

/// Integer pair as `i64`s, when it fits.
pub fn pair_to_i64(p: &Pair) -> Option<(i64, i64)> {
    Some((p.0.to_i64()?, p.1.to_i64()?))
}
