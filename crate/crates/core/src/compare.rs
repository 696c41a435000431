//! Harmonic balance, Volterra and simulation on the same operating points.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonic_balance::{duffing_coeffs, observed_amplitude, Forcing};
use crate::joint::JointParams;
use crate::simulator::{simulate, steady_state, SimConfig, TorqueModel};
use crate::volterra::single_tone_response;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub tension: f64,
    pub omega: f64,
    pub harmonic_balance: f64,
    pub volterra: f64,
    /// `|order 7| / |order 1|` of the Volterra fundamental.
    pub volterra_divergence: f64,
    pub simulated: f64,
    /// Envelope modulation depth of the simulated window.
    pub simulated_spread: f64,
}

impl ComparisonRow {
    pub fn hb_error(&self) -> f64 {
        (self.harmonic_balance - self.simulated).abs() / self.simulated
    }

    pub fn volterra_error(&self) -> f64 {
        (self.volterra - self.simulated).abs() / self.simulated
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareOptions {
    pub model: TorqueModel,
    pub tolerance: f64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            model: TorqueModel::Exact,
            tolerance: 1e-6,
        }
    }
}

pub fn compare_point(joint: &JointParams, tension: f64, forcing: &Forcing, opts: &CompareOptions) -> Result<ComparisonRow> {
    let coeffs = duffing_coeffs(tension, joint)?;
    let hb = observed_amplitude(&coeffs, forcing)?
        .ok_or_else(|| Error::Internal(format!("no stable branch at F = {tension}")))?;
    let volterra = single_tone_response(&coeffs, forcing)?;
    let cfg = SimConfig::for_forcing(forcing, joint.zeta)
        .with_model(opts.model)
        .with_tolerance(opts.tolerance);
    let traj = simulate(joint, tension, forcing, &cfg)?;
    let steady = steady_state(&traj, forcing)?;
    Ok(ComparisonRow {
        tension,
        omega: forcing.omega,
        harmonic_balance: hb,
        volterra: volterra.amplitude,
        volterra_divergence: volterra.divergence_ratio(),
        simulated: steady.amplitude,
        simulated_spread: steady.spread,
    })
}

/// Rows in the order of `tensions`; points run in parallel.
pub fn compare_cut(
    joint: &JointParams,
    tensions: &[f64],
    forcing: &Forcing,
    opts: &CompareOptions,
) -> Result<Vec<ComparisonRow>> {
    tensions
        .par_iter()
        .map(|&f| compare_point(joint, f, forcing, opts))
        .collect()
}
