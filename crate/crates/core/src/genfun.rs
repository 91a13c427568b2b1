//! The generating function `H_lambda(u) = <(L_u + lambda)^{-1} 1 | 1>`, its
//! product form over the spectrum, trace identities and spectrum recovery.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{self, LaxSpectrum, Potential, TOL_CLIP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GenFunSource {
    Resolvent,
    Product,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GenFunSample {
    pub lambda: f64,
    pub value: f64,
    pub source: GenFunSource,
    /// Product form only: bound on the contribution of gaps past `n_keep`.
    pub tail_bound: f64,
}

pub fn genfun_resolvent(u: &Potential, lambda: f64, m: usize) -> Result<GenFunSample> {
    let w = spectral::resolvent_apply(u, lambda, m)?;
    Ok(GenFunSample {
        lambda,
        value: w.pairing_with_one(),
        source: GenFunSource::Resolvent,
        tail_bound: 0.0,
    })
}

fn check_shift(spec: &LaxSpectrum, lambda: f64) -> Result<()> {
    if !(lambda + spec.lambda0() > 0.0) {
        return Err(Error::domain(format!(
            "lambda = {lambda} is not above -lambda_0 = {}",
            -spec.lambda0()
        )));
    }
    Ok(())
}

/// `1/(lambda_0 + lambda) prod_{n <= n_keep} (lambda_{n-1} + 1 + lambda)/(lambda_n + lambda)`,
/// with `lambda_n = lambda_{n-1} + 1 + gamma_n` built from the clipped gaps.
pub fn genfun_product(spec: &LaxSpectrum, lambda: f64) -> Result<GenFunSample> {
    check_shift(spec, lambda)?;
    let mut value = 1.0 / (spec.lambda0() + lambda);
    for n in 1..=spec.n_keep {
        let g = spec.gap(n);
        if g != 0.0 {
            let nu = spec.lambda[n - 1] + 1.0 + lambda;
            value *= nu / (nu + g);
        }
    }
    // unresolved tail mass appears as the offset of lambda_{n_keep} from n_keep
    let tail_mass = (spec.n_keep as f64 - spec.lambda[spec.n_keep]).max(0.0);
    let tail_bound = value * tail_mass / (spec.lambda[spec.n_keep] + 1.0 + lambda);
    Ok(GenFunSample {
        lambda,
        value,
        source: GenFunSource::Product,
        tail_bound,
    })
}

/// `-||w||^2 / <w|1>`, which equals `d/dlambda log H_lambda`.
pub fn trace_difference(u: &Potential, lambda: f64, m: usize) -> Result<f64> {
    let w = spectral::resolvent_apply(u, lambda, m)?;
    Ok(-w.norm_sq() / w.pairing_with_one())
}

/// `-sum_n 1/((lambda_n + 1 + lambda)(lambda_n + lambda))` over the trusted
/// spectrum, closing the gapless tail `lambda_n = n` by telescoping.
pub fn trace_eigen_sum(spec: &LaxSpectrum, lambda: f64) -> Result<f64> {
    check_shift(spec, lambda)?;
    let head: f64 = spec.lambda[..=spec.n_keep]
        .iter()
        .map(|l| 1.0 / ((l + 1.0 + lambda) * (l + lambda)))
        .sum();
    Ok(-head - 1.0 / (spec.n_keep as f64 + 1.0 + lambda))
}

/// Central differences of `log H_lambda` at steps `h` and `h/2`, Richardson-combined.
pub fn fd_log_derivative(u: &Potential, lambda: f64, m: usize, h: f64) -> Result<f64> {
    let central = |h: f64| -> Result<f64> {
        let hp = genfun_resolvent(u, lambda + h, m)?.value;
        let hm = genfun_resolvent(u, lambda - h, m)?.value;
        Ok((hp.ln() - hm.ln()) / (2.0 * h))
    };
    let (coarse, fine) = (central(h)?, central(0.5 * h)?);
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Poles `lambda_n` (`n = 0` and open gaps) and zeros `nu_n = lambda_{n-1} + 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoleZeroData {
    poles: Vec<f64>,
    zeros: Vec<f64>,
}

impl PoleZeroData {
    pub fn new(poles: Vec<f64>, zeros: Vec<f64>) -> Result<Self> {
        if poles.len() != zeros.len() + 1 {
            return Err(Error::domain(format!(
                "expected one more pole than zeros (got {} poles, {} zeros)",
                poles.len(),
                zeros.len()
            )));
        }
        for (i, z) in zeros.iter().enumerate() {
            if !(poles[i] < *z && *z < poles[i + 1]) {
                return Err(Error::domain(format!(
                    "interlacing fails at zero {} ({z})",
                    i + 1
                )));
            }
        }
        Ok(Self { poles, zeros })
    }

    pub fn from_spectrum(spec: &LaxSpectrum) -> Result<Self> {
        let mut poles = vec![spec.lambda0()];
        let mut zeros = Vec::new();
        for n in spec.open_gaps() {
            if spec.gap(n) > TOL_CLIP {
                poles.push(spec.lambda[n]);
                zeros.push(spec.lambda[n - 1] + 1.0);
            }
        }
        Self::new(poles, zeros)
    }

    pub fn poles(&self) -> &[f64] {
        &self.poles
    }

    pub fn zeros(&self) -> &[f64] {
        &self.zeros
    }
}

/// Rebuilds `lambda_0..=lambda_{n_max}`: when `lambda_{n-1} + 1` is a listed
/// zero the next pole follows, otherwise the spacing is exactly one.
pub fn recover_spectrum(pz: &PoleZeroData, n_max: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(pz.poles[0]);
    let mut next = 0;
    for _ in 1..=n_max {
        let cand = out.last().unwrap() + 1.0;
        let tol = 1e-9 * (1.0 + cand.abs());
        match pz.zeros.get(next) {
            Some(&z) if (z - cand).abs() <= tol => {
                next += 1;
                out.push(pz.poles[next]);
            }
            Some(&z) if z < cand - tol => {
                return Err(Error::domain(format!(
                    "zero {z} is skipped by the walk (interlacing inconsistent)"
                )));
            }
            _ => out.push(cand),
        }
    }
    if next < pz.zeros.len() && n_max > 0 {
        let last = *out.last().unwrap();
        if pz.zeros[next] <= last {
            return Err(Error::domain("unused zero below the recovered range"));
        }
    }
    Ok(out)
}

/// Offsets `lambda + lambda_0` log-spaced in `[lo, hi]`.
pub fn lambda_grid(lambda0: f64, count: usize, lo: f64, hi: f64) -> Vec<f64> {
    if count == 1 {
        return vec![-lambda0 + lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| -lambda0 + (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

pub fn default_lambda_grid(lambda0: f64) -> Vec<f64> {
    lambda_grid(lambda0, 20, 0.1, 100.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GenFunRow {
    pub lambda: f64,
    pub resolvent: f64,
    pub product: f64,
    pub product_tail_bound: f64,
    pub trace_difference: f64,
    pub trace_eigen_sum: f64,
    pub fd_log_derivative: f64,
}

/// All routes evaluated on a grid of shifts.
pub fn genfun_table(u: &Potential, spec: &LaxSpectrum, grid: &[f64], m: usize) -> Result<Vec<GenFunRow>> {
    grid.iter()
        .map(|&lambda| {
            let prod = genfun_product(spec, lambda)?;
            Ok(GenFunRow {
                lambda,
                resolvent: genfun_resolvent(u, lambda, m)?.value,
                product: prod.value,
                product_tail_bound: prod.tail_bound,
                trace_difference: trace_difference(u, lambda, m)?,
                trace_eigen_sum: trace_eigen_sum(spec, lambda)?,
                fd_log_derivative: fd_log_derivative(u, lambda, m, 1e-4)?,
            })
        })
        .collect()
}

pub fn table_csv(rows: &[GenFunRow]) -> String {
    let mut s = String::from(
        "lambda,h_resolvent,h_product,product_tail_bound,trace_difference,trace_eigen_sum,fd_log_derivative\n",
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.lambda,
            r.resolvent,
            r.product,
            r.product_tail_bound,
            r.trace_difference,
            r.trace_eigen_sum,
            r.fd_log_derivative
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::lax_spectrum;
    use num_complex::Complex64;

    fn one_gap() -> Potential {
        Potential::from_coeffs((1..=60).map(|k| Complex64::new(0.5f64.powi(k), 0.0)).collect())
    }

    #[test]
    fn free_case() {
        let u = Potential::zero();
        assert!((genfun_resolvent(&u, 4.0, 16).unwrap().value - 0.25).abs() < 1e-15);
        let s = lax_spectrum(&u, 16, false).unwrap();
        assert_eq!(genfun_product(&s, 4.0).unwrap().value, 0.25);
        assert!((trace_difference(&u, 1.0, 16).unwrap() + 1.0).abs() < 1e-15);
        assert!((trace_eigen_sum(&s, 1.0).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn one_gap_product_closed_form() {
        let s = lax_spectrum(&one_gap(), 128, true).unwrap();
        let g = s.gap(1);
        let lam = 2.0;
        let want = (1.0 + lam - g) / ((lam - g) * (1.0 + lam));
        assert!((genfun_product(&s, lam).unwrap().value - want).abs() < 1e-12);
        let r = genfun_resolvent(&one_gap(), lam, 128).unwrap().value;
        assert!((r - want).abs() < 1e-8);
        assert!(genfun_product(&s, -s.lambda0() - 0.1).is_err());
    }

    #[test]
    fn recover_examples() {
        let pz = PoleZeroData::new(vec![-1.0 / 3.0, 1.0], vec![2.0 / 3.0]).unwrap();
        let sp = recover_spectrum(&pz, 4).unwrap();
        let want = [-1.0 / 3.0, 1.0, 2.0, 3.0, 4.0];
        assert!(sp.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-15));
        let free = recover_spectrum(&PoleZeroData::new(vec![0.0], vec![]).unwrap(), 3).unwrap();
        assert_eq!(free, vec![0.0, 1.0, 2.0, 3.0]);
        assert!(PoleZeroData::new(vec![0.0, 0.5], vec![1.0]).is_err());
    }

    #[test]
    fn grid_shape() {
        let g = default_lambda_grid(-0.5);
        assert_eq!(g.len(), 20);
        assert!((g[0] - 0.6).abs() < 1e-12 && (g[19] - 100.5).abs() < 1e-9);
    }
}
