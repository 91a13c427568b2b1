//! Browser bindings: finite-gap profiles and gaps, action-to-frequency
//! curves, and a live Benjamin-Ono evolution.

use bo_core::actions::{self, ActionSequence, TailClass};
use bo_core::pde_sim::{self, SimConfig, Snapshot};
use bo_core::potentials::{self, FiniteGapSpec};
use bo_core::spectral::{self, Potential};
use wasm_bindgen::prelude::*;

fn potential(q: &[f64]) -> Result<Potential, String> {
    let spec = FiniteGapSpec::real(q).map_err(|e| e.to_string())?;
    potentials::finite_gap_potential(&spec, None).map_err(|e| e.to_string())
}

fn gaps_of(u: &Potential, n_max: usize) -> Result<Vec<f64>, String> {
    let m = 128.max(u.default_truncation());
    let a = spectral::actions_from_potential(u, m).map_err(|e| e.to_string())?;
    Ok(a.actions.dense(n_max))
}

/// Samples of the finite-gap potential with real parameters `q` on `[0, 2 pi)`.
#[wasm_bindgen]
pub fn finite_gap_profile(q: &[f64], samples: usize) -> Result<Vec<f64>, String> {
    Ok(potential(q)?.sample(samples.max(8)))
}

/// Gaps `gamma_1..gamma_{n_max}` of the finite-gap potential.
#[wasm_bindgen]
pub fn finite_gap_gaps(q: &[f64], n_max: usize) -> Result<Vec<f64>, String> {
    gaps_of(&potential(q)?, n_max)
}

/// `omega_n` for `n = 1..=n_max` from dense actions `gamma_1, gamma_2, ...`.
#[wasm_bindgen]
pub fn frequencies(gamma: &[f64], n_max: usize) -> Result<Vec<f64>, String> {
    let entries = gamma
        .iter()
        .enumerate()
        .filter(|(_, g)| **g != 0.0)
        .map(|(i, g)| (i as u64 + 1, *g))
        .collect();
    let a = ActionSequence::new(entries, TailClass::None).map_err(|e| e.to_string())?;
    Ok((1..=n_max as u64).map(|n| actions::omega_at(&a, n)).collect())
}

#[wasm_bindgen]
pub struct Wave {
    state: Snapshot,
    modes: usize,
    dt: f64,
}

#[wasm_bindgen]
impl Wave {
    #[wasm_bindgen(constructor)]
    pub fn new(q: &[f64], mean: f64, modes: usize, dt: f64) -> Result<Wave, String> {
        let u = potential(q)?;
        SimConfig { modes, dt, ..SimConfig::default() }
            .validate(&u)
            .map_err(|e| e.to_string())?;
        Ok(Wave { state: Snapshot { t: 0.0, mean, potential: u }, modes, dt })
    }

    /// Advances the solution by `span`.
    pub fn advance(&mut self, span: f64) -> Result<(), String> {
        if span <= 0.0 {
            return Ok(());
        }
        let cfg = SimConfig { modes: self.modes, dt: self.dt.min(span), t_final: span, ..SimConfig::default() };
        let next = pde_sim::evolve(self.state.mean, &self.state.potential, &cfg).map_err(|e| e.to_string())?;
        self.state = Snapshot { t: self.state.t + span, ..next };
        Ok(())
    }

    pub fn time(&self) -> f64 {
        self.state.t
    }

    pub fn profile(&self, samples: usize) -> Vec<f64> {
        let m = self.state.mean;
        self.state.potential.sample(samples.max(8)).into_iter().map(|x| x + m).collect()
    }

    /// Current gaps, which the flow should leave unchanged.
    pub fn gaps(&self, n_max: usize) -> Result<Vec<f64>, String> {
        gaps_of(&self.state.potential, n_max)
    }
}
