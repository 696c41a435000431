//! Sinusoidal reduction of a vortex-street wake.

use serde::{Deserialize, Serialize};

use crate::error::{require, Result};
use crate::harmonic_balance::Forcing;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WakeParams {
    /// Free-stream speed (m/s).
    pub flow_speed: f64,
    /// Vorticity of each vortex (1/s).
    pub vorticity: f64,
    /// Streamwise vortex spacing (m).
    pub vortex_spacing: f64,
    /// Fluid density (kg/m^3).
    pub fluid_density: f64,
    /// Phase of the resulting sine (rad).
    pub phase_offset: f64,
}

/// Wake-geometry factors. There are no defaults: both must come from the user.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WakeCalibration {
    pub c_omega: f64,
    /// Maps `rho * vorticity^2` to a specific torque in rad/s^2.
    pub c_amp: f64,
}

/// `Omega = c_omega (U / spacing + vorticity)`, `Q0 = c_amp rho vorticity^2`.
pub fn wake_to_forcing(wake: &WakeParams, calib: &WakeCalibration) -> Result<Forcing> {
    require(calib.c_omega > 0.0, "c_omega", "must be > 0")?;
    require(calib.c_amp > 0.0, "c_amp", "must be > 0")?;
    require(wake.flow_speed >= 0.0, "flow_speed", "must be >= 0")?;
    require(wake.vorticity >= 0.0, "vorticity", "must be >= 0")?;
    require(wake.fluid_density >= 0.0, "fluid_density", "must be >= 0")?;
    require(wake.vortex_spacing > 0.0, "vortex_spacing", "must be > 0")?;
    let omega = calib.c_omega * (wake.flow_speed / wake.vortex_spacing + wake.vorticity);
    let q0 = calib.c_amp * wake.fluid_density * wake.vorticity * wake.vorticity;
    Forcing::new(q0, omega, wake.phase_offset)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wake() -> WakeParams {
        WakeParams {
            flow_speed: 0.4,
            vorticity: 2.0,
            vortex_spacing: 0.1,
            fluid_density: 1000.0,
            phase_offset: 0.25,
        }
    }

    const CAL: WakeCalibration = WakeCalibration {
        c_omega: 0.5,
        c_amp: 1e-3,
    };

    #[test]
    fn mapping() {
        let f = wake_to_forcing(&wake(), &CAL).unwrap();
        assert!((f.omega - 0.5 * (4.0 + 2.0)).abs() < 1e-12);
        assert!((f.q0 - 1e-3 * 1000.0 * 4.0).abs() < 1e-12);
        assert_eq!(f.phi, 0.25);
    }

    #[test]
    fn still_vortices_give_no_torque() {
        let w = WakeParams { vorticity: 0.0, ..wake() };
        let f = wake_to_forcing(&w, &CAL).unwrap();
        assert_eq!(f.q0, 0.0);
        assert!(f.omega > 0.0);
    }

    #[test]
    fn quadratic_in_vorticity() {
        let base = wake_to_forcing(&wake(), &CAL).unwrap();
        let w = WakeParams { vorticity: 4.0, ..wake() };
        assert!((wake_to_forcing(&w, &CAL).unwrap().q0 - 4.0 * base.q0).abs() < 1e-12);
    }

    #[test]
    fn frequency_linear_in_speed() {
        let w = WakeParams { vorticity: 0.0, ..wake() };
        let w2 = WakeParams { flow_speed: 0.8, ..w };
        let a = wake_to_forcing(&w, &CAL).unwrap().omega;
        let b = wake_to_forcing(&w2, &CAL).unwrap().omega;
        assert!((b - 2.0 * a).abs() < 1e-12);
    }

    #[test]
    fn zero_frequency_rejected() {
        let w = WakeParams {
            flow_speed: 0.0,
            vorticity: 0.0,
            ..wake()
        };
        assert!(wake_to_forcing(&w, &CAL).is_err());
        let bad = WakeCalibration { c_omega: 0.0, c_amp: 1.0 };
        assert!(wake_to_forcing(&wake(), &bad).is_err());
    }
}
