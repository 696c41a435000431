//! Joint configuration files.
//!
//! Plain TOML with unit-suffixed keys:
//!
//! ```toml
//! r_mm = 20.24
//! d_mm = 27.68
//! K_N_per_m = 81.0
//! I_kg_m2 = 3.1e-5
//! zetaI_N_m_s = 2.2e-4
//! Q0I_N_m = 1e-4
//!
//! [wake]
//! flow_speed_m_s = 0.3
//! vorticity_1_s = 1.5
//! vortex_spacing_m = 0.12
//! fluid_density_kg_m3 = 1000.0
//! phase_offset_rad = 0.0
//! c_omega = 1.0
//! c_amp = 1e-3
//! ```
//!
//! Values given as products with the inertia are divided by `I` on load and
//! the conversion is listed in [`LoadedConfig::echo`].

use serde::Serialize;
use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::joint::{JointParams, REFERENCE_Q0_TIMES_I};
use crate::wake::{WakeCalibration, WakeParams};

const JOINT_KEYS: [(&str, &str); 6] = [
    ("r", "r_mm"),
    ("d", "d_mm"),
    ("K", "K_N_per_m"),
    ("I", "I_kg_m2"),
    ("zetaI", "zetaI_N_m_s"),
    ("Q0I", "Q0I_N_m"),
];

const WAKE_KEYS: [&str; 7] = [
    "flow_speed_m_s",
    "vorticity_1_s",
    "vortex_spacing_m",
    "fluid_density_kg_m3",
    "phase_offset_rad",
    "c_omega",
    "c_amp",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadedConfig {
    pub joint: JointParams,
    /// Specific forcing amplitude (rad/s^2).
    pub q0: f64,
    pub wake: Option<(WakeParams, WakeCalibration)>,
    /// One line per derived SI quantity.
    pub echo: Vec<String>,
}

fn number(table: &Table, key: &str, scope: &str) -> Result<f64> {
    let full = if scope.is_empty() {
        key.to_string()
    } else {
        format!("{scope}.{key}")
    };
    match table.get(key) {
        Some(Value::Float(v)) => Ok(*v),
        Some(Value::Integer(v)) => Ok(*v as f64),
        Some(other) => Err(Error::Config {
            key: full,
            reason: format!("expected a number, found {}", other.type_str()),
        }),
        None => Err(Error::Config {
            key: full,
            reason: "missing".into(),
        }),
    }
}

fn unknown_key(key: &str, scope: &str) -> Error {
    let bare = key.split('_').next().unwrap_or(key);
    let hint = JOINT_KEYS
        .iter()
        .find(|(stem, _)| *stem == bare || *stem == key)
        .map(|(_, full)| format!("; expected `{full}`"))
        .unwrap_or_default();
    let full = if scope.is_empty() {
        key.to_string()
    } else {
        format!("{scope}.{key}")
    };
    Error::Config {
        key: full,
        reason: format!("unknown key or unit suffix{hint}"),
    }
}

/// Parses configuration text; every key must carry its unit suffix.
pub fn parse_config(text: &str) -> Result<LoadedConfig> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| Error::Config {
        key: "<file>".into(),
        reason: e.message().to_string(),
    })?;

    for (key, value) in &table {
        let known = JOINT_KEYS.iter().any(|(_, full)| full == key);
        let wake = key == "wake" && value.is_table();
        if !known && !wake {
            return Err(unknown_key(key, ""));
        }
    }

    let r_mm = number(&table, "r_mm", "")?;
    let d_mm = number(&table, "d_mm", "")?;
    let stiffness = number(&table, "K_N_per_m", "")?;
    let inertia = number(&table, "I_kg_m2", "")?;
    let zeta_i = number(&table, "zetaI_N_m_s", "")?;
    let q0_i = if table.contains_key("Q0I_N_m") {
        number(&table, "Q0I_N_m", "")?
    } else {
        REFERENCE_Q0_TIMES_I
    };
    if !(inertia > 0.0) {
        return Err(Error::Config {
            key: "I_kg_m2".into(),
            reason: "must be > 0".into(),
        });
    }
    let joint = JointParams::from_bench_units(r_mm, d_mm, stiffness, inertia, zeta_i).map_err(|e| {
        let key = match &e {
            Error::DegenerateGeometry { .. } => "d_mm",
            Error::InvalidParameter { name: "r", .. } => "r_mm",
            Error::InvalidParameter { name: "stiffness", .. } => "K_N_per_m",
            Error::InvalidParameter { name: "zeta", .. } => "zetaI_N_m_s",
            _ => "<joint>",
        };
        Error::Config {
            key: key.into(),
            reason: e.to_string(),
        }
    })?;
    if !(q0_i >= 0.0) {
        return Err(Error::Config {
            key: "Q0I_N_m".into(),
            reason: "must be >= 0".into(),
        });
    }
    let q0 = q0_i / inertia;
    let g = joint.geometry();

    let mut echo = vec![
        format!("r = {:.9e} m (r_mm / 1000)", joint.r),
        format!("d = {:.9e} m (d_mm / 1000)", joint.d),
        format!("K = {:.9e} N/m", joint.stiffness),
        format!("I = {:.9e} kg m^2", joint.inertia),
        format!("zeta = {:.9e} 1/s (zetaI_N_m_s / I_kg_m2)", joint.zeta),
        format!("Q0 = {:.9e} rad/s^2 (Q0I_N_m / I_kg_m2)", q0),
        format!("epsilon = {:.9e} m (d - r)", g.epsilon),
        format!("S = {:.9e} m^2 (r d)", g.area),
    ];

    let wake = match table.get("wake") {
        Some(Value::Table(w)) => {
            for key in w.keys() {
                if !WAKE_KEYS.contains(&key.as_str()) {
                    return Err(unknown_key(key, "wake"));
                }
            }
            let params = WakeParams {
                flow_speed: number(w, "flow_speed_m_s", "wake")?,
                vorticity: number(w, "vorticity_1_s", "wake")?,
                vortex_spacing: number(w, "vortex_spacing_m", "wake")?,
                fluid_density: number(w, "fluid_density_kg_m3", "wake")?,
                phase_offset: if w.contains_key("phase_offset_rad") {
                    number(w, "phase_offset_rad", "wake")?
                } else {
                    0.0
                },
            };
            let calib = WakeCalibration {
                c_omega: number(w, "c_omega", "wake")?,
                c_amp: number(w, "c_amp", "wake")?,
            };
            echo.push(format!("wake.c_omega = {:.9e}", calib.c_omega));
            echo.push(format!("wake.c_amp = {:.9e}", calib.c_amp));
            Some((params, calib))
        }
        _ => None,
    };

    Ok(LoadedConfig {
        joint,
        q0,
        wake,
        echo,
    })
}

pub fn load_config(path: &std::path::Path) -> Result<LoadedConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
        key: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_config(&text)
}

/// Configuration text for the reference joint.
pub fn reference_config_text() -> &'static str {
    "r_mm = 20.24\nd_mm = 27.68\nK_N_per_m = 81.0\nI_kg_m2 = 3.1e-5\nzetaI_N_m_s = 2.2e-4\nQ0I_N_m = 1e-4\n"
}
