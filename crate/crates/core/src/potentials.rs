//! Explicit potentials: traveling waves, finite-gap potentials, the Galilean
//! transform, and a least-squares fit of finite-gap parameters to actions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::actions::ActionSequence;
use crate::error::{Error, Result};
use crate::fourier;
use crate::spectral::{self, Potential};

const COEFF_FLOOR: f64 = 1e-16;
const MAX_BANDWIDTH: usize = 4096;

/// Parameters `q_j` of `Q_N(z) = prod (1 - q_j z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteGapSpec {
    q: Vec<Complex64>,
}

impl FiniteGapSpec {
    pub fn new(q: Vec<Complex64>) -> Result<Self> {
        for (j, z) in q.iter().enumerate() {
            let r = z.norm();
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::domain(format!(
                    "|q_{}| = {r} must lie in (0, 1)",
                    j + 1
                )));
            }
        }
        Ok(Self { q })
    }

    pub fn real(q: &[f64]) -> Result<Self> {
        Self::new(q.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn q(&self) -> &[Complex64] {
        &self.q
    }

    /// Smallest `m` with `sum_j |q_j|^m` below double-precision resolution.
    pub fn natural_bandwidth(&self) -> usize {
        if self.q.is_empty() {
            return 0;
        }
        (1..=MAX_BANDWIDTH)
            .find(|&m| self.q.iter().map(|z| z.norm().powi(m as i32)).sum::<f64>() < COEFF_FLOOR)
            .unwrap_or(MAX_BANDWIDTH)
    }

    /// Sorted moduli.
    pub fn moduli(&self) -> Vec<f64> {
        let mut m: Vec<f64> = self.q.iter().map(|z| z.norm()).collect();
        m.sort_by(f64::total_cmp);
        m
    }
}

/// `u(x) = -2 Re(e^{ix} Q'(e^{ix}) / Q(e^{ix}))`, transformed on a grid of
/// eight times the bandwidth.
pub fn finite_gap_potential(spec: &FiniteGapSpec, bandwidth: Option<usize>) -> Result<Potential> {
    let bw = bandwidth.unwrap_or_else(|| spec.natural_bandwidth());
    if spec.q.is_empty() || bw == 0 {
        return Ok(Potential::zero());
    }
    let g = fourier::grid_size_for(bw, 8);
    let f = |x: f64| {
        let z = Complex64::from_polar(1.0, x);
        // z Q'/Q = -sum q z / (1 - q z)
        let s: Complex64 = spec.q.iter().map(|q| q * z / (1.0 - q * z)).sum();
        2.0 * s.re
    };
    let (_, coeffs) = fourier::real_coefficients(f, g, bw);
    Ok(Potential::from_coeffs(coeffs))
}

/// Traveling-wave parameters for `N U_r(N x + alpha) + a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TravelingWaveSpec {
    pub r: f64,
    pub n: u32,
    pub alpha: f64,
    pub a: f64,
}

impl TravelingWaveSpec {
    pub fn new(r: f64, n: u32, alpha: f64, a: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::domain(format!("r = {r} must lie in (0, 1)")));
        }
        if n == 0 {
            return Err(Error::domain("N must be a positive integer"));
        }
        if !alpha.is_finite() || !a.is_finite() {
            return Err(Error::domain("alpha and a must be finite"));
        }
        Ok(Self { r, n, alpha, a })
    }

    /// `c_r = (1 + r^2) / (1 - r^2)`.
    pub fn c_r(&self) -> f64 {
        (1.0 + self.r * self.r) / (1.0 - self.r * self.r)
    }

    pub fn bandwidth(&self) -> usize {
        let k = (COEFF_FLOOR.ln() / self.r.ln()).ceil().max(1.0) as usize;
        (k * self.n as usize).min(MAX_BANDWIDTH)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenjaminProfile {
    /// Mean-removed profile.
    pub potential: Potential,
    /// The removed mean, `N + a`.
    pub mean: f64,
    pub c_r: f64,
}

/// `U_r(x) = (1 - r^2) / (1 - 2 r cos x + r^2)`.
pub fn u_r(r: f64, x: f64) -> f64 {
    (1.0 - r * r) / (1.0 - 2.0 * r * x.cos() + r * r)
}

pub fn benjamin_profile(spec: &TravelingWaveSpec, grid_size: Option<usize>) -> Result<BenjaminProfile> {
    let bw = spec.bandwidth();
    let g = grid_size.unwrap_or_else(|| fourier::grid_size_for(bw, 8));
    if g < 2 * bw + 2 {
        return Err(Error::domain(format!(
            "grid size {g} cannot resolve bandwidth {bw}"
        )));
    }
    let nf = spec.n as f64;
    let (mean, coeffs) = fourier::real_coefficients(
        |x| nf * u_r(spec.r, nf * x + spec.alpha) + spec.a,
        g,
        bw,
    );
    Ok(BenjaminProfile {
        potential: Potential::from_coeffs(coeffs),
        mean,
        c_r: spec.c_r(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GalileanPotential {
    pub potential: Potential,
    pub mean: f64,
}

/// `u_a(t, x) = a + u(x - 2 a t)`: phase-shifts `hat u(n)` by `e^{-2 i n a t}`.
pub fn galilean(u: &Potential, a: f64, t: f64) -> GalileanPotential {
    let coeffs = u
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| c * Complex64::from_polar(1.0, -2.0 * (i + 1) as f64 * a * t))
        .collect();
    GalileanPotential {
        potential: Potential::from_coeffs(coeffs),
        mean: a,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitReport {
    /// Real parameters `q_j`; phases are 0 or pi.
    pub q: Vec<f64>,
    pub iterations: usize,
    /// Max-norm residual after each accepted step.
    pub residuals: Vec<f64>,
    /// `gamma_n(fit) - target_n` for `n = 1..=degree`, from the extrapolated pipeline.
    pub final_residuals: Vec<f64>,
    pub max_residual: f64,
}

impl FitReport {
    pub fn spec(&self) -> FiniteGapSpec {
        FiniteGapSpec::real(&self.q).expect("fit keeps |q| in (0, 1)")
    }
}

#[derive(Clone, Copy, Debug)]
pub struct FitOptions {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            tol: 1e-11,
        }
    }
}

fn raw_gaps(q: &[f64], degree: usize) -> Result<Vec<f64>> {
    let spec = FiniteGapSpec::real(q)?;
    let u = finite_gap_potential(&spec, None)?;
    // eigenvectors of the low modes decay like |q|^k, so M = bandwidth suffices
    let m = 64.max(u.effective_bandwidth(COEFF_FLOOR)).max(2 * degree + 2);
    let lam = spectral::eigenvalues(&u, m)?;
    Ok((1..=degree).map(|n| lam[n] - lam[n - 1] - 1.0).collect())
}

/// Fits signed real `q_j`, one per index up to the largest index of the
/// target, so that the finite-gap actions match `target` (zero off support).
pub fn fit_finite_gap(target: &ActionSequence<f64>, opts: FitOptions) -> Result<FitReport> {
    if target.entries().iter().any(|(_, g)| *g <= 0.0) {
        return Err(Error::domain("target actions must be strictly positive"));
    }
    let degree = target.max_index() as usize;
    if degree == 0 {
        return Ok(FitReport {
            q: Vec::new(),
            iterations: 0,
            residuals: Vec::new(),
            final_residuals: Vec::new(),
            max_residual: 0.0,
        });
    }
    if degree > 8 {
        return Err(Error::domain(format!(
            "largest target index {degree} is too large for the finite-gap fit"
        )));
    }
    let goal = target.dense(degree);
    let gmax = goal.iter().cloned().fold(0.0, f64::max);
    let mags: Vec<f64> = goal
        .iter()
        .enumerate()
        .map(|(j, &g)| {
            let g = if g > 0.0 { g } else { gmax };
            (g / (1.0 + g)).sqrt().min(0.5) * 0.8f64.powi(j as i32)
        })
        .collect();

    // sign patterns ordered by their starting residual
    let mut starts: Vec<(f64, Vec<f64>)> = (0..(1u32 << degree))
        .map(|pattern| {
            let start: Vec<f64> = mags
                .iter()
                .enumerate()
                .map(|(j, m)| if pattern >> j & 1 == 1 { -m } else { *m })
                .collect();
            let r0 = raw_gaps(&start, degree)
                .map(|g| g.iter().zip(&goal).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .unwrap_or(f64::INFINITY);
            (r0, start)
        })
        .collect();
    starts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut failures = Vec::new();
    for (_, start) in starts {
        match levenberg_marquardt(&start, &goal, opts) {
            Ok((q, iterations, residuals)) => {
                let u = finite_gap_potential(&FiniteGapSpec::real(&q)?, None)?;
                let achieved = spectral::lax_spectrum(&u, u.default_truncation(), true)?;
                let final_residuals: Vec<f64> = (1..=degree)
                    .map(|n| achieved.gap(n) - goal[n - 1])
                    .collect();
                let max_residual = final_residuals.iter().map(|r| r.abs()).fold(0.0, f64::max);
                return Ok(FitReport {
                    q,
                    iterations,
                    residuals,
                    final_residuals,
                    max_residual,
                });
            }
            Err(trace) => failures.push(trace),
        }
    }
    let best = failures
        .iter()
        .filter_map(|t| t.last().copied())
        .fold(f64::INFINITY, f64::min);
    Err(Error::computation(format!(
        "finite-gap fit did not converge from {} starts; best residual {best:.3e}; trace of first start {:?}",
        failures.len(),
        failures.first().map(|t| t.iter().map(|r| format!("{r:.2e}")).collect::<Vec<_>>())
    )))
}

const FIT_MAX_MODULUS: f64 = 0.95;
const STALL_ITER: usize = 25;
const STALL_RESIDUAL: f64 = 1e-4;

type LmOutcome = std::result::Result<(Vec<f64>, usize, Vec<f64>), Vec<f64>>;

/// Parameters enter through `q = tanh(theta)` so `|q| < 1` holds throughout.
fn levenberg_marquardt(start: &[f64], goal: &[f64], opts: FitOptions) -> LmOutcome {
    let d = start.len();
    let to_q = |th: &DVector<f64>| th.iter().map(|t| t.tanh()).collect::<Vec<f64>>();
    let resid = |th: &DVector<f64>| -> Option<DVector<f64>> {
        let q = to_q(th);
        if q.iter().any(|x| x.abs() < 1e-12 || x.abs() > FIT_MAX_MODULUS) {
            return None;
        }
        let g = raw_gaps(&q, d).ok()?;
        Some(DVector::from_iterator(d, g.iter().zip(goal).map(|(a, b)| a - b)))
    };
    let mut theta = DVector::from_iterator(d, start.iter().map(|q| q.atanh()));
    let mut r = match resid(&theta) {
        Some(r) => r,
        None => return Err(vec![f64::INFINITY]),
    };
    let mut trace = vec![r.amax()];
    let mut mu = 1e-3;
    for it in 0..opts.max_iter {
        if r.amax() < opts.tol {
            return Ok((to_q(&theta), it, trace));
        }
        let mut jac = DMatrix::zeros(d, d);
        for j in 0..d {
            let h = 1e-7 * theta[j].abs().max(1.0);
            let mut tp = theta.clone();
            tp[j] += h;
            let Some(rp) = resid(&tp) else {
                return Err(trace);
            };
            jac.set_column(j, &((rp - &r) / h));
        }
        let jt = jac.transpose();
        let a = &jt * &jac;
        let g = &jt * &r;
        let cost = r.norm_squared();
        let mut accepted = false;
        while mu < 1e8 {
            let mut damped = a.clone();
            for i in 0..d {
                damped[(i, i)] += mu * (a[(i, i)] + 1e-12);
            }
            let Some(step) = damped.lu().solve(&(-&g)) else {
                mu *= 4.0;
                continue;
            };
            let cand = &theta + step;
            if let Some(rc) = resid(&cand) {
                if rc.norm_squared() < cost {
                    theta = cand;
                    r = rc;
                    mu = (mu / 3.0).max(1e-12);
                    accepted = true;
                    break;
                }
            }
            mu *= 4.0;
        }
        trace.push(r.amax());
        // a start that has not come close after many steps is abandoned
        if !accepted || (it >= STALL_ITER && r.amax() > STALL_RESIDUAL) {
            break;
        }
    }
    if r.amax() < opts.tol.max(1e-9) {
        Ok((to_q(&theta), opts.max_iter, trace))
    } else {
        Err(trace)
    }
}
