//! Truncated Lax operator `L_u = -i d/dx - T_u` on the Hardy space and its
//! spectral data.

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::actions::{ActionSequence, TailClass};
use crate::error::{Error, Result};
use crate::potentials::{self, FiniteGapSpec, TravelingWaveSpec};

/// Gaps below this are treated as zero.
pub const TOL_CLIP: f64 = 1e-8;
/// Distance kept from `-lambda_0` by resolvent evaluations.
pub const RESOLVENT_MARGIN: f64 = 1e-6;

/// Real mean-zero potential given by `hat u(n)`, `1 <= n <= bandwidth`.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    coeffs: Vec<Complex64>,
}

impl Potential {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    /// `coeffs[k - 1] = hat u(k)`. Trailing exact zeros are dropped.
    pub fn from_coeffs(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| c.norm() == 0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn bandwidth(&self) -> usize {
        self.coeffs.len()
    }

    /// `hat u(n)` for any integer `n`, using `hat u(-n) = conj(hat u(n))`.
    pub fn coeff(&self, n: i64) -> Complex64 {
        let k = n.unsigned_abs() as usize;
        if k == 0 || k > self.coeffs.len() {
            return Complex64::new(0.0, 0.0);
        }
        let c = self.coeffs[k - 1];
        if n > 0 {
            c
        } else {
            c.conj()
        }
    }

    pub fn is_real_coefficients(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == 0.0)
    }

    /// Effective bandwidth: the last index with `|hat u(n)| > tol`.
    pub fn effective_bandwidth(&self, tol: f64) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| c.norm() > tol)
            .map_or(0, |i| i + 1)
    }

    pub fn default_truncation(&self) -> usize {
        64.max(4 * self.effective_bandwidth(1e-16))
    }

    /// `(1/2 pi) int u^2 = 2 sum |hat u(n)|^2`.
    pub fn l2_norm_sq(&self) -> f64 {
        2.0 * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// Grid values on `grid_size` equispaced points.
    pub fn sample(&self, grid_size: usize) -> Vec<f64> {
        crate::fourier::synthesize(0.0, &self.coeffs, grid_size)
    }
}

/// Potential input accepted by the CLI and the demo.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PotentialSpec {
    Fourier {
        coeffs: Vec<[f64; 2]>,
    },
    FiniteGap {
        q: Vec<[f64; 2]>,
    },
    Benjamin {
        r: f64,
        #[serde(rename = "N", default = "one")]
        n: u32,
        #[serde(default)]
        alpha: f64,
    },
}

fn one() -> u32 {
    1
}

impl PotentialSpec {
    pub fn zero() -> Self {
        PotentialSpec::Fourier { coeffs: Vec::new() }
    }

    /// Builds the mean-zero potential.
    pub fn to_potential(&self) -> Result<Potential> {
        match self {
            PotentialSpec::Fourier { coeffs } => {
                if coeffs.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(Error::domain("non-finite Fourier coefficient"));
                }
                Ok(Potential::from_coeffs(
                    coeffs.iter().map(|c| Complex64::new(c[0], c[1])).collect(),
                ))
            }
            PotentialSpec::FiniteGap { q } => {
                let spec = FiniteGapSpec::new(q.iter().map(|c| Complex64::new(c[0], c[1])).collect())?;
                potentials::finite_gap_potential(&spec, None)
            }
            PotentialSpec::Benjamin { r, n, alpha } => {
                let spec = TravelingWaveSpec::new(*r, *n, *alpha, 0.0)?;
                Ok(potentials::benjamin_profile(&spec, None)?.potential)
            }
        }
    }
}

/// `L_u` restricted to the modes `0..M`, with any aliasing diagnostics.
#[derive(Clone, Debug)]
pub struct LaxMatrix {
    pub matrix: DMatrix<Complex64>,
    pub warnings: Vec<String>,
}

pub fn build_lax_matrix(u: &Potential, m: usize) -> LaxMatrix {
    let matrix = DMatrix::from_fn(m, m, |j, k| {
        let diag = if j == k { j as f64 } else { 0.0 };
        Complex64::new(diag, 0.0) - u.coeff(j as i64 - k as i64)
    });
    let warnings = build_lax_matrix_warnings(u, m);
    LaxMatrix { matrix, warnings }
}

fn real_lax_matrix(u: &Potential, m: usize) -> DMatrix<f64> {
    DMatrix::from_fn(m, m, |j, k| {
        let diag = if j == k { j as f64 } else { 0.0 };
        diag - u.coeff(j as i64 - k as i64).re
    })
}

/// Sorted eigenvalues of the `m x m` truncation.
pub fn eigenvalues(u: &Potential, m: usize) -> Result<Vec<f64>> {
    let mut vals: Vec<f64> = if u.is_real_coefficients() {
        real_lax_matrix(u, m).symmetric_eigenvalues().iter().copied().collect()
    } else {
        build_lax_matrix(u, m).matrix.symmetric_eigenvalues().iter().copied().collect()
    };
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(no_convergence(u, m));
    }
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

fn no_convergence(u: &Potential, m: usize) -> Error {
    // Gershgorin radius bounds the spread of the spectrum around the diagonal.
    let radius: f64 = 2.0 * u.coeffs.iter().map(|c| c.norm()).sum::<f64>();
    Error::computation(format!(
        "eigensolver did not converge (M = {m}, off-diagonal row sum {radius:.3e})"
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LaxSpectrum {
    /// `lambda_0 < lambda_1 < ... < lambda_{M-1}`.
    pub lambda: Vec<f64>,
    pub m: usize,
    /// `gaps[n - 1] = gamma_n` for `1 <= n <= n_keep`, clipped below `TOL_CLIP`.
    pub gaps: Vec<f64>,
    pub n_keep: usize,
    /// Per-eigenvalue change between `M` and `2M` when extrapolated.
    pub drift: Option<Vec<f64>>,
    /// `max_{n <= n_keep} |lambda_n - (n - sum_{n<k<=n_keep} gamma_k)|`.
    pub formula_residual: f64,
    pub warnings: Vec<String>,
}

impl LaxSpectrum {
    pub fn lambda0(&self) -> f64 {
        self.lambda[0]
    }

    pub fn gap(&self, n: usize) -> f64 {
        if n == 0 || n > self.n_keep {
            0.0
        } else {
            self.gaps[n - 1]
        }
    }

    /// Indices with a gap above the clipping threshold.
    pub fn open_gaps(&self) -> Vec<usize> {
        (1..=self.n_keep).filter(|&n| self.gap(n) > 0.0).collect()
    }

    pub fn actions(&self) -> ActionSequence<f64> {
        let entries = self
            .open_gaps()
            .into_iter()
            .map(|n| (n as u64, self.gap(n)))
            .collect();
        ActionSequence::new(entries, TailClass::None).expect("clipped gaps are nonnegative")
    }
}

pub fn lax_spectrum(u: &Potential, m: usize, extrapolate: bool) -> Result<LaxSpectrum> {
    if m < 2 {
        return Err(Error::domain("truncation size must be at least 2"));
    }
    let mut warnings = build_lax_matrix_warnings(u, m);
    let coarse = eigenvalues(u, m)?;
    let (lambda, drift, n_keep) = if extrapolate {
        let fine = eigenvalues(u, 2 * m)?;
        let drift: Vec<f64> = coarse.iter().zip(&fine).map(|(a, b)| (a - b).abs()).collect();
        let ok = drift.iter().take_while(|d| **d < TOL_CLIP).count();
        let n_keep = ok.saturating_sub(1);
        (fine[..m].to_vec(), Some(drift), n_keep)
    } else {
        (coarse, None, m / 2 - 1)
    };
    if n_keep == 0 && !u.coeffs.is_empty() {
        warnings.push("no trusted eigenvalues beyond lambda_0; increase M".into());
    }

    let mut gaps = Vec::with_capacity(n_keep);
    for n in 1..=n_keep {
        let spacing = lambda[n] - lambda[n - 1];
        if spacing < 1e-6 {
            warnings.push(format!("near-degenerate eigenvalues at n = {n}"));
        }
        let g = spacing - 1.0;
        if g < -TOL_CLIP {
            warnings.push(format!("negative gap {g:.3e} at n = {n}"));
            gaps.push(g);
        } else if g < TOL_CLIP {
            gaps.push(0.0);
        } else {
            gaps.push(g);
        }
    }

    let mut residual = 0.0f64;
    let mut tail = 0.0;
    for n in (0..=n_keep).rev() {
        residual = residual.max((lambda[n] - (n as f64 - tail)).abs());
        if n >= 1 {
            tail += gaps[n - 1];
        }
    }

    Ok(LaxSpectrum {
        lambda,
        m,
        gaps,
        n_keep,
        drift,
        formula_residual: residual,
        warnings,
    })
}

fn build_lax_matrix_warnings(u: &Potential, m: usize) -> Vec<String> {
    let bw = u.effective_bandwidth(1e-16);
    if m < bw {
        vec![format!("truncation M = {m} is below the potential bandwidth {bw}")]
    } else {
        Vec::new()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ActionsReport {
    pub actions: ActionSequence<f64>,
    pub formula_residual: f64,
    pub n_keep: usize,
    pub lambda0: f64,
    pub warnings: Vec<String>,
}

/// Trusted actions `gamma_n` of `u` from an extrapolated eigensolve.
pub fn actions_from_potential(u: &Potential, m: usize) -> Result<ActionsReport> {
    let spec = lax_spectrum(u, m, true)?;
    Ok(ActionsReport {
        actions: spec.actions(),
        formula_residual: spec.formula_residual,
        n_keep: spec.n_keep,
        lambda0: spec.lambda0(),
        warnings: spec.warnings,
    })
}

// complex Cholesky accepts negative pivots (sqrt never fails), so inspect the factor
fn is_positive_definite(a: DMatrix<Complex64>) -> bool {
    Cholesky::new(a).is_some_and(|c| {
        c.l_dirty()
            .diagonal()
            .iter()
            .all(|d| d.re > 0.0 && d.im.abs() <= 1e-12 * d.re && d.re.is_finite())
    })
}

/// `w = (L_u + lambda)^{-1} 1` in the truncated Hardy basis.
#[derive(Clone, Debug)]
pub struct ResolventVector {
    pub coeffs: DVector<Complex64>,
    pub lambda: f64,
    pub residual: f64,
}

impl ResolventVector {
    /// `<w | 1>`.
    pub fn pairing_with_one(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

pub fn resolvent_apply(u: &Potential, lambda: f64, m: usize) -> Result<ResolventVector> {
    if !lambda.is_finite() {
        return Err(Error::domain("shift must be finite"));
    }
    let l = build_lax_matrix(u, m).matrix;
    let shifted = |s: f64| &l + DMatrix::from_diagonal_element(m, m, Complex64::new(s, 0.0));
    // positive definiteness of L + lambda - margin certifies lambda > -lambda_0 + margin
    if !is_positive_definite(shifted(lambda - RESOLVENT_MARGIN)) {
        return Err(Error::domain(format!(
            "shift {lambda} not in resolvent set (need lambda > -lambda_0 + {RESOLVENT_MARGIN})"
        )));
    }
    let a = shifted(lambda);
    let chol = Cholesky::new(a.clone())
        .ok_or_else(|| Error::computation("Cholesky factorization failed"))?;
    let mut rhs = DVector::from_element(m, Complex64::new(0.0, 0.0));
    rhs[0] = Complex64::new(1.0, 0.0);
    let w = chol.solve(&rhs);
    let residual = (&a * &w - &rhs).iter().map(|c| c.norm()).fold(0.0, f64::max);
    if residual > 1e-10 {
        return Err(Error::computation(format!(
            "resolvent residual {residual:.3e} exceeds 1e-10"
        )));
    }
    Ok(ResolventVector {
        coeffs: w,
        lambda,
        residual,
    })
}
