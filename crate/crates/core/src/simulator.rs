//! Time-domain integration of the forced joint.

use serde::{Deserialize, Serialize};

use crate::error::{require, Error, Result};
use crate::harmonic_balance::{duffing_coeffs, DuffingCoeffs, Forcing};
use crate::joint::{torque, JointParams};
use crate::ode::{self, Tolerances};
use crate::signal::{analytic_envelope, interior, SampledSignal};

/// Restoring-torque law used by [`simulate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TorqueModel {
    Exact,
    Cubic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelTag {
    Exact,
    Cubic,
    /// Arbitrary Duffing coefficients, see [`simulate_duffing`].
    Duffing,
}

/// Forcing periods used for the steady-state window.
pub const STEADY_PERIODS: usize = 10;

/// Largest envelope modulation depth accepted as a steady response.
pub const STEADY_SPREAD_LIMIT: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub t_end: f64,
    pub transient_cut: f64,
    pub max_step: f64,
    pub model: TorqueModel,
    pub samples_per_period: usize,
    pub initial_state: [f64; 2],
}

impl SimConfig {
    /// Defaults for one operating point: transient cut `max(10/zeta, 20 T)`,
    /// then 15 periods of record.
    pub fn for_forcing(forcing: &Forcing, zeta: f64) -> Self {
        let period = forcing.period();
        let decay = if zeta > 0.0 { 10.0 / zeta } else { 0.0 };
        let transient_cut = decay.max(20.0 * period);
        Self {
            abs_tol: 1e-6,
            rel_tol: 1e-6,
            t_end: transient_cut + 15.0 * period,
            transient_cut,
            max_step: period / 16.0,
            model: TorqueModel::Exact,
            samples_per_period: 64,
            initial_state: [0.0, 0.0],
        }
    }

    pub fn with_model(mut self, model: TorqueModel) -> Self {
        self.model = model;
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.abs_tol = tol;
        self.rel_tol = tol;
        self
    }

    pub fn with_initial_state(mut self, theta: f64, theta_dot: f64) -> Self {
        self.initial_state = [theta, theta_dot];
        self
    }

    pub fn validate(&self) -> Result<()> {
        require(self.abs_tol > 0.0 && self.rel_tol > 0.0, "tolerance", "must be > 0")?;
        require(
            self.transient_cut >= 0.0 && self.transient_cut < self.t_end,
            "transient_cut",
            "need 0 <= transient_cut < t_end",
        )?;
        require(self.max_step > 0.0, "max_step", "must be > 0")?;
        require(self.samples_per_period >= 64, "samples_per_period", "must be >= 64")?;
        require(
            self.initial_state.iter().all(|v| v.is_finite()),
            "initial_state",
            "must be finite",
        )?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub theta: Vec<f64>,
    pub theta_dot: Vec<f64>,
    pub forcing: Forcing,
    pub model: ModelTag,
    pub transient_cut: f64,
    pub dt: f64,
}

fn run<F>(accel: F, forcing: &Forcing, cfg: &SimConfig, model: ModelTag) -> Result<Trajectory>
where
    F: Fn(f64, f64) -> f64,
{
    cfg.validate()?;
    let dt = forcing.period() / cfg.samples_per_period as f64;
    let n = (cfg.t_end / dt + 1e-9).floor() as usize;
    let times: Vec<f64> = (0..=n).map(|k| k as f64 * dt).collect();
    let tol = Tolerances {
        abs: cfg.abs_tol,
        rel: cfg.rel_tol,
        max_step: cfg.max_step,
        max_steps: 50_000_000,
    };
    let Forcing { q0, omega, phi } = *forcing;
    let rhs = |t: f64, y: &[f64; 2]| [y[1], accel(y[0], y[1]) + q0 * (omega * t + phi).sin()];
    let (states, _) = ode::integrate(rhs, 0.0, cfg.initial_state, &times, &tol)?;
    if let Some(k) = states.iter().position(|s| !s[0].is_finite() || !s[1].is_finite()) {
        return Err(Error::Integration {
            t: times[k],
            reason: "non-finite state".into(),
        });
    }
    Ok(Trajectory {
        theta: states.iter().map(|s| s[0]).collect(),
        theta_dot: states.iter().map(|s| s[1]).collect(),
        times,
        forcing: *forcing,
        model,
        transient_cut: cfg.transient_cut,
        dt,
    })
}

/// Integrates `theta'' = -zeta theta' - tau(theta, F)/I + Q0 sin(Omega t + phi)`.
pub fn simulate(joint: &JointParams, tension: f64, forcing: &Forcing, cfg: &SimConfig) -> Result<Trajectory> {
    joint.validate()?;
    match cfg.model {
        TorqueModel::Exact => {
            if !(tension >= 0.0) {
                return Err(Error::InvalidParameter {
                    name: "tension",
                    reason: format!("must be >= 0, got {tension}"),
                });
            }
            let j = *joint;
            let inv_i = 1.0 / j.inertia;
            run(
                move |th, thd| -j.zeta * thd - torque(th, tension, &j) * inv_i,
                forcing,
                cfg,
                ModelTag::Exact,
            )
        }
        TorqueModel::Cubic => {
            let c = duffing_coeffs(tension, joint)?;
            let mut t = simulate_duffing(&c, forcing, cfg)?;
            t.model = ModelTag::Cubic;
            Ok(t)
        }
    }
}

/// Integrates the Duffing equation for explicit coefficients.
pub fn simulate_duffing(coeffs: &DuffingCoeffs, forcing: &Forcing, cfg: &SimConfig) -> Result<Trajectory> {
    let DuffingCoeffs { k, a, zeta } = *coeffs;
    run(
        move |th, thd| -zeta * thd - k * th - a * th * th * th,
        forcing,
        cfg,
        ModelTag::Duffing,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    pub amplitude: f64,
    /// Envelope modulation depth `(max - min) / (max + min)` over the window.
    pub spread: f64,
}

/// Envelope statistics over the final [`STEADY_PERIODS`] forcing periods.
pub fn steady_state(traj: &Trajectory, forcing: &Forcing) -> Result<SteadyState> {
    let period = forcing.period();
    let per_period = (period / traj.dt).round() as usize;
    if per_period == 0 || ((per_period as f64) * traj.dt - period).abs() > 1e-9 * period {
        return Err(Error::Signal("trajectory sampling is not locked to the forcing period".into()));
    }
    let window = STEADY_PERIODS * per_period;
    let n = traj.theta.len();
    if n < window + 1 {
        return Err(Error::Signal("trajectory shorter than the steady-state window".into()));
    }
    let start = n - window;
    if traj.times[start] + 1e-9 * period < traj.transient_cut {
        return Err(Error::InvalidParameter {
            name: "t_end",
            reason: format!("need at least {STEADY_PERIODS} forcing periods after the transient cut"),
        });
    }
    let sig = SampledSignal::new(traj.theta[start..].to_vec(), traj.dt)?;
    let envelope = analytic_envelope(&sig);
    let mut kept = interior(&envelope).to_vec();
    kept.sort_by(|a, b| a.total_cmp(b));
    let m = kept.len();
    let median = if m % 2 == 1 {
        kept[m / 2]
    } else {
        0.5 * (kept[m / 2 - 1] + kept[m / 2])
    };
    let (lo, hi) = (kept[0], kept[m - 1]);
    let spread = if hi + lo > 0.0 { (hi - lo) / (hi + lo) } else { 0.0 };
    Ok(SteadyState {
        amplitude: median,
        spread,
    })
}

/// Median analytic-signal envelope over the final forcing periods; fails when
/// the envelope is not steady.
pub fn steady_state_amplitude(traj: &Trajectory, forcing: &Forcing) -> Result<f64> {
    let s = steady_state(traj, forcing)?;
    if s.spread > STEADY_SPREAD_LIMIT {
        return Err(Error::NotSteady {
            spread: s.spread,
            limit: STEADY_SPREAD_LIMIT,
        });
    }
    Ok(s.amplitude)
}
