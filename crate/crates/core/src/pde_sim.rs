//! Pseudo-spectral ETDRK4 integrator for `u_t = H u_xx - (u^2)_x` on the
//! torus, with conservation diagnostics.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::actions;
use crate::error::{Error, Result};
use crate::fourier;
use crate::genfun;
use crate::spectral::{self, Potential};

const BLOWUP: f64 = 1e12;
const CONTOUR_POINTS: usize = 64;
/// Relative coefficient size defining the bandwidth checked against `modes / 4`.
pub const BANDWIDTH_REL_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimConfig {
    /// Grid size, a power of two.
    pub modes: usize,
    pub dt: f64,
    pub t_final: f64,
    pub dealias: bool,
    /// Steps between diagnostic samples.
    pub cadence: usize,
    /// Truncation for the Lax spectrum of each snapshot.
    pub spectral_modes: usize,
    /// Offsets `lambda + lambda_0(u_0)` at which `H_lambda` is tracked.
    pub lambda_offsets: [f64; 3],
    pub threads: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            modes: 256,
            dt: 1e-3,
            t_final: 1.0,
            dealias: true,
            cadence: 100,
            spectral_modes: 128,
            lambda_offsets: [0.5, 2.0, 10.0],
            threads: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self, u0: &Potential) -> Result<()> {
        if self.modes < 8 || !self.modes.is_power_of_two() {
            return Err(Error::domain(format!("modes = {} must be a power of two >= 8", self.modes)));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::domain(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t_final >= 0.0) || !self.t_final.is_finite() {
            return Err(Error::domain(format!("T = {} must be nonnegative", self.t_final)));
        }
        if self.cadence == 0 {
            return Err(Error::domain("cadence must be positive"));
        }
        if self.spectral_modes < 2 {
            return Err(Error::domain("spectral_modes must be at least 2"));
        }
        let bw = bandwidth(u0);
        if self.modes < 4 * bw {
            return Err(Error::domain(format!(
                "modes = {} is below 4 x bandwidth ({bw})",
                self.modes
            )));
        }
        Ok(())
    }

    /// Step count and the step that lands exactly on `t_final`.
    pub fn schedule(&self) -> (usize, f64) {
        if self.t_final == 0.0 {
            return (0, self.dt);
        }
        let steps = (self.t_final / self.dt - 1e-9).ceil().max(1.0) as usize;
        (steps, self.t_final / steps as f64)
    }
}

/// Last index with `|hat u(n)| > BANDWIDTH_REL_TOL * max |hat u|`.
pub fn bandwidth(u: &Potential) -> usize {
    let peak = u.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    u.effective_bandwidth(BANDWIDTH_REL_TOL * peak)
}

fn wavenumber(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// Contour mean of `f` over the circle of radius one around `z`.
fn contour_mean(z: Complex64, f: impl Fn(Complex64) -> Complex64) -> Complex64 {
    let sum: Complex64 = (0..CONTOUR_POINTS)
        .map(|j| {
            let theta = 2.0 * PI * (j as f64 + 0.5) / CONTOUR_POINTS as f64;
            f(z + Complex64::from_polar(1.0, theta))
        })
        .sum();
    sum / CONTOUR_POINTS as f64
}

/// ETDRK4 stepper on a fixed grid.
pub struct Integrator {
    n: usize,
    dt: f64,
    mask: Vec<f64>,
    ik: Vec<Complex64>,
    e: Vec<Complex64>,
    e2: Vec<Complex64>,
    q: Vec<Complex64>,
    f1: Vec<Complex64>,
    f2: Vec<Complex64>,
    f3: Vec<Complex64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
}

impl Integrator {
    pub fn new(modes: usize, dt: f64, dealias: bool) -> Self {
        let n = modes;
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let ks: Vec<i64> = (0..n).map(|j| wavenumber(j, n)).collect();
        let mask = ks
            .iter()
            .enumerate()
            .map(|(j, &k)| {
                let cut = dealias && 3 * k.unsigned_abs() as usize > n;
                if j == n / 2 || cut {
                    0.0
                } else {
                    1.0
                }
            })
            .collect();
        let ik = ks.iter().map(|&k| Complex64::new(0.0, -(k as f64))).collect();
        let mut e = Vec::with_capacity(n);
        let mut e2 = Vec::with_capacity(n);
        let mut q = Vec::with_capacity(n);
        let mut f1 = Vec::with_capacity(n);
        let mut f2 = Vec::with_capacity(n);
        let mut f3 = Vec::with_capacity(n);
        for &k in &ks {
            let kf = k as f64;
            let c = Complex64::new(0.0, kf.signum() * kf * kf * dt);
            e.push(c.exp());
            e2.push((c / 2.0).exp());
            q.push(dt * contour_mean(c, |r| ((r / 2.0).exp() - 1.0) / r));
            f1.push(dt * contour_mean(c, |r| (-4.0 - r + r.exp() * (4.0 - 3.0 * r + r * r)) / (r * r * r)));
            f2.push(dt * contour_mean(c, |r| (2.0 + r + r.exp() * (r - 2.0)) / (r * r * r)));
            f3.push(dt * contour_mean(c, |r| (-4.0 - 3.0 * r - r * r + r.exp() * (4.0 - r)) / (r * r * r)));
        }
        Self {
            n,
            dt,
            mask,
            ik,
            e,
            e2,
            q,
            f1,
            f2,
            f3,
            fwd,
            inv,
            buf: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `-i k FFT(u^2)`, dealiased, for FFT-ordered normalized coefficients `v`.
    pub fn nonlinear(&mut self, v: &[Complex64], out: &mut [Complex64]) {
        self.buf.copy_from_slice(v);
        self.inv.process(&mut self.buf);
        let s = 1.0 / self.n as f64;
        for z in self.buf.iter_mut() {
            *z = Complex64::new(z.re * z.re, 0.0);
        }
        self.fwd.process(&mut self.buf);
        for j in 0..self.n {
            out[j] = self.ik[j] * self.buf[j] * s * self.mask[j];
        }
    }

    /// One ETDRK4 step in place.
    pub fn step(&mut self, v: &mut [Complex64]) {
        let n = self.n;
        let zero = Complex64::new(0.0, 0.0);
        let (mut nv, mut na, mut nb, mut nc) = (vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n]);
        let mut a = vec![zero; n];
        let mut b = vec![zero; n];
        let mut c = vec![zero; n];
        self.nonlinear(v, &mut nv);
        for j in 0..n {
            a[j] = self.e2[j] * v[j] + self.q[j] * nv[j];
        }
        self.nonlinear(&a, &mut na);
        for j in 0..n {
            b[j] = self.e2[j] * v[j] + self.q[j] * na[j];
        }
        self.nonlinear(&b, &mut nb);
        for j in 0..n {
            c[j] = self.e2[j] * a[j] + self.q[j] * (2.0 * nb[j] - nv[j]);
        }
        self.nonlinear(&c, &mut nc);
        for j in 0..n {
            v[j] = (self.e[j] * v[j]
                + nv[j] * self.f1[j]
                + 2.0 * (na[j] + nb[j]) * self.f2[j]
                + nc[j] * self.f3[j])
                * self.mask[j];
        }
        // keep the state exactly Hermitian
        for j in 1..n / 2 {
            let avg = 0.5 * (v[j] + v[n - j].conj());
            v[j] = avg;
            v[n - j] = avg.conj();
        }
        v[0].im = 0.0;
    }
}

/// Solution snapshot: mean and positive-frequency coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub mean: f64,
    pub potential: Potential,
}

fn pack(mean: f64, u: &Potential, n: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    v[0] = Complex64::new(mean, 0.0);
    for (i, c) in u.coeffs().iter().enumerate().take(n / 2 - 1) {
        v[i + 1] = *c;
        v[n - i - 1] = c.conj();
    }
    v
}

fn unpack(t: f64, v: &[Complex64]) -> Snapshot {
    let n = v.len();
    Snapshot {
        t,
        mean: v[0].re,
        potential: Potential::from_coeffs(v[1..n / 2].to_vec()),
    }
}

/// `(1/2 pi) int (1/2 (|D|^{1/2} u)^2 - u^3 / 3) dx`, with `u^3` integrated
/// exactly on a zero-padded grid.
pub fn hamiltonian_quadrature(mean: f64, u: &Potential) -> f64 {
    let kinetic = kinetic_energy(u);
    let g = fourier::grid_size_for(2 * u.bandwidth() + 2, 2);
    let cubic = fourier::synthesize(mean, u.coeffs(), g)
        .iter()
        .map(|x| x * x * x)
        .sum::<f64>()
        / g as f64;
    kinetic - cubic / 3.0
}

/// `sum_{n >= 1} n |hat u(n)|^2`, the quadratic part of the Hamiltonian.
pub fn kinetic_energy(u: &Potential) -> f64 {
    u.coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| (i + 1) as f64 * c.norm_sqr())
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleDiagnostics {
    pub t: f64,
    pub mean: f64,
    pub hamiltonian: f64,
    pub kinetic: f64,
    pub h_lambda: Vec<f64>,
    /// Trusted gaps `gamma_1..=gamma_{n_keep}`.
    pub actions: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct SimTrace {
    pub config: SimConfig,
    pub steps: usize,
    pub dt_used: f64,
    pub lambdas: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    pub samples: Vec<SampleDiagnostics>,
}

fn diagnose(s: &Snapshot, lambdas: &[f64], m: usize) -> Result<SampleDiagnostics> {
    let h_lambda = lambdas
        .iter()
        .map(|&l| genfun::genfun_resolvent(&s.potential, l, m).map(|g| g.value))
        .collect::<Result<Vec<_>>>()?;
    let spec = spectral::lax_spectrum(&s.potential, m, true)?;
    Ok(SampleDiagnostics {
        t: s.t,
        mean: s.mean,
        hamiltonian: hamiltonian_quadrature(s.mean, &s.potential),
        kinetic: kinetic_energy(&s.potential),
        h_lambda,
        actions: (1..=spec.n_keep).map(|n| spec.gap(n)).collect(),
    })
}

fn diagnose_all(snaps: &[Snapshot], lambdas: &[f64], m: usize, threads: usize) -> Result<Vec<SampleDiagnostics>> {
    let threads = if threads == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        threads
    };
    let chunk = snaps.len().div_ceil(threads.max(1)).max(1);
    std::thread::scope(|scope| {
        let handles: Vec<_> = snaps
            .chunks(chunk)
            .map(|c| scope.spawn(move || c.iter().map(|s| diagnose(s, lambdas, m)).collect::<Result<Vec<_>>>()))
            .collect();
        let mut out = Vec::with_capacity(snaps.len());
        for h in handles {
            out.extend(h.join().expect("diagnostic worker panicked")?);
        }
        Ok(out)
    })
}

/// Evolves `mean + u0` to `t_final`, sampling every `cadence` steps and at the end.
pub fn simulate(mean: f64, u0: &Potential, config: &SimConfig) -> Result<SimTrace> {
    config.validate(u0)?;
    let (steps, dt) = config.schedule();
    let mut integ = Integrator::new(config.modes, dt, config.dealias);
    let mut v = pack(mean, u0, config.modes);
    let mut snapshots = vec![unpack(0.0, &v)];
    for s in 1..=steps {
        integ.step(&mut v);
        let peak = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if !peak.is_finite() || peak > BLOWUP {
            return Err(Error::computation(format!(
                "blow-up at step {s} (t = {:.6}): max |hat u| = {peak:.3e}",
                s as f64 * dt
            )));
        }
        if s % config.cadence == 0 || s == steps {
            snapshots.push(unpack(s as f64 * dt, &v));
        }
    }
    let lambda0 = spectral::lax_spectrum(u0, config.spectral_modes, true)?.lambda0();
    let lambdas: Vec<f64> = config.lambda_offsets.iter().map(|o| o - lambda0).collect();
    let samples = diagnose_all(&snapshots, &lambdas, config.spectral_modes, config.threads)?;
    Ok(SimTrace {
        config: config.clone(),
        steps,
        dt_used: dt,
        lambdas,
        snapshots,
        samples,
    })
}

/// Evolves without diagnostics and returns the final state.
pub fn evolve(mean: f64, u0: &Potential, config: &SimConfig) -> Result<Snapshot> {
    config.validate(u0)?;
    let (steps, dt) = config.schedule();
    let mut integ = Integrator::new(config.modes, dt, config.dealias);
    let mut v = pack(mean, u0, config.modes);
    for s in 1..=steps {
        integ.step(&mut v);
        if v.iter().any(|c| !c.norm().is_finite() || c.norm() > BLOWUP) {
            return Err(Error::computation(format!("blow-up at step {s}")));
        }
    }
    Ok(unpack(steps as f64 * dt, &v))
}

/// `(1/2 pi) int (u - w)^2` between two snapshots.
pub fn l2_distance_sq(a: &Snapshot, b: &Snapshot) -> f64 {
    let len = a.potential.bandwidth().max(b.potential.bandwidth());
    let pa = a.potential.coeffs();
    let pb = b.potential.coeffs();
    let zero = Complex64::new(0.0, 0.0);
    let diff: f64 = (0..len)
        .map(|i| (pa.get(i).copied().unwrap_or(zero) - pb.get(i).copied().unwrap_or(zero)).norm_sqr())
        .sum();
    (a.mean - b.mean).powi(2) + 2.0 * diff
}

pub fn l2_norm_sq(a: &Snapshot) -> f64 {
    a.mean * a.mean + a.potential.l2_norm_sq()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConservationReport {
    pub mean_drift: f64,
    /// Relative to `max(|H(u_0)|, sum n |hat u_0(n)|^2)`.
    pub hamiltonian_drift: f64,
    pub h_lambda_drift: f64,
    /// `max_n |gamma_n(t) - gamma_n(0)| / max_n gamma_n(0)` over commonly trusted `n`.
    pub action_drift: f64,
    pub action_drift_abs: f64,
    /// Quadrature Hamiltonian minus its action form at `t = 0`.
    pub hamiltonian_identity_error: f64,
}

fn rel(d: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        d / scale
    } else {
        d
    }
}

pub fn conservation_report(trace: &SimTrace) -> ConservationReport {
    let Some(first) = trace.samples.first() else {
        return ConservationReport {
            mean_drift: 0.0,
            hamiltonian_drift: 0.0,
            h_lambda_drift: 0.0,
            action_drift: 0.0,
            action_drift_abs: 0.0,
            hamiltonian_identity_error: 0.0,
        };
    };
    let max_dev = |f: &dyn Fn(&SampleDiagnostics) -> f64| {
        trace
            .samples
            .iter()
            .map(|s| (f(s) - f(first)).abs())
            .fold(0.0, f64::max)
    };
    let mean_drift = rel(max_dev(&|s| s.mean), first.mean.abs());
    // H can vanish on nontrivial data, so its drift is measured against max(|H|, K)
    let hamiltonian_drift = rel(
        max_dev(&|s| s.hamiltonian),
        first.hamiltonian.abs().max(first.kinetic),
    );
    let h_lambda_drift = (0..first.h_lambda.len())
        .map(|i| rel(max_dev(&|s| s.h_lambda[i]), first.h_lambda[i].abs()))
        .fold(0.0, f64::max);
    let scale = first.actions.iter().copied().fold(0.0, f64::max);
    let action_drift_abs = trace
        .samples
        .iter()
        .flat_map(|s| s.actions.iter().zip(&first.actions).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max);
    let gamma = actions::ActionSequence::new(
        first
            .actions
            .iter()
            .enumerate()
            .filter(|(_, g)| **g > 0.0)
            .map(|(i, g)| (i as u64 + 1, *g))
            .collect(),
        actions::TailClass::None,
    )
    .map(|g| actions::hamiltonian_from_actions(&g))
    .unwrap_or(f64::NAN);
    ConservationReport {
        mean_drift,
        hamiltonian_drift,
        h_lambda_drift,
        action_drift: rel(action_drift_abs, scale),
        action_drift_abs,
        hamiltonian_identity_error: (first.hamiltonian - gamma).abs(),
    }
}

/// Translation velocity from the unwrapped phase of `hat u(1)`:
/// `u(t, x) = U(x - c t)` gives `arg hat u(1) = arg hat U(1) - c t`.
pub fn measure_velocity(snapshots: &[Snapshot]) -> Result<f64> {
    if snapshots.len() < 2 {
        return Err(Error::domain("need at least two snapshots"));
    }
    let mut phases = Vec::with_capacity(snapshots.len());
    let mut prev: Option<f64> = None;
    for s in snapshots {
        let c = s.potential.coeff(1);
        if c.norm() < 1e-300 {
            return Err(Error::domain(format!("hat u(1) vanishes at t = {}", s.t)));
        }
        let mut ph = c.arg();
        if let Some(p) = prev {
            ph += 2.0 * PI * ((p - ph) / (2.0 * PI)).round();
        }
        prev = Some(ph);
        phases.push((s.t, ph));
    }
    let n = phases.len() as f64;
    let tm = phases.iter().map(|p| p.0).sum::<f64>() / n;
    let pm = phases.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = phases.iter().map(|p| (p.0 - tm) * (p.1 - pm)).sum();
    let sxx: f64 = phases.iter().map(|p| (p.0 - tm).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("snapshots share one time"));
    }
    Ok(-sxy / sxx)
}

impl SimTrace {
    pub fn csv(&self) -> String {
        let mut s = String::from("t,mean,hamiltonian,h_lambda_1,h_lambda_2,h_lambda_3,n_trusted,gamma_1\n");
        for d in &self.samples {
            let _ = write!(s, "{:.16e},{:.16e},{:.16e}", d.t, d.mean, d.hamiltonian);
            for h in &d.h_lambda {
                let _ = write!(s, ",{h:.16e}");
            }
            let _ = writeln!(
                s,
                ",{},{:.16e}",
                d.actions.len(),
                d.actions.first().copied().unwrap_or(0.0)
            );
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        let snaps: Vec<serde_json::Value> = self
            .snapshots
            .iter()
            .map(|s| {
                serde_json::json!({
                    "t": s.t,
                    "mean": s.mean,
                    "coeffs": s.potential.coeffs().iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::json!({
            "config": self.config,
            "steps": self.steps,
            "dt_used": self.dt_used,
            "lambdas": self.lambdas,
            "samples": self.samples,
            "snapshots": snaps,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_stays_zero() {
        let cfg = SimConfig {
            modes: 32,
            t_final: 0.1,
            cadence: 10,
            spectral_modes: 16,
            ..SimConfig::default()
        };
        let tr = simulate(0.0, &Potential::zero(), &cfg).unwrap();
        assert!(tr.snapshots.iter().all(|s| s.potential.bandwidth() == 0 && s.mean == 0.0));
        let rep = conservation_report(&tr);
        assert_eq!(rep.mean_drift, 0.0);
        assert_eq!(rep.action_drift, 0.0);
    }

    #[test]
    fn schedule_lands_on_final_time() {
        let cfg = SimConfig {
            t_final: 2.0 * PI,
            ..SimConfig::default()
        };
        let (steps, dt) = cfg.schedule();
        assert_eq!(steps, 6284);
        assert!((steps as f64 * dt - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn linear_phase() {
        let amp = 1e-6;
        let u = Potential::from_coeffs(vec![Complex64::new(amp, 0.0)]);
        let cfg = SimConfig {
            modes: 32,
            dt: 1e-2,
            t_final: 1.0,
            ..SimConfig::default()
        };
        let s = evolve(0.0, &u, &cfg).unwrap();
        let want = Complex64::from_polar(amp, 1.0);
        assert!((s.potential.coeff(1) - want).norm() < 10.0 * amp * amp);
    }
}
