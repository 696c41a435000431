//! CSV and JSON renderings with fixed formatting.
//!
//! Floats are written with nine significant digits in scientific notation and
//! rows follow grid order, so identical inputs give byte-identical files.

use std::fmt::Write as _;

use serde::Serialize;

use crate::compare::ComparisonRow;
use crate::harmonic_balance::{AmplitudeSurface, MaximaLine};
use crate::joint::JointParams;
use crate::simulator::Trajectory;
use crate::volterra::OutputSpectrum;

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sci(x: f64) -> String {
    format!("{x:.8e}")
}

pub fn surface_csv(surface: &AmplitudeSurface) -> String {
    let mut out = String::from("F_N,Omega_rad_s,amplitude_rad,n_roots,stable_flag\n");
    for (i, &f) in surface.tensions.iter().enumerate() {
        for (j, &w) in surface.omegas.iter().enumerate() {
            let a = surface.amplitudes[i][j];
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                sci(f),
                sci(w),
                sci(a),
                surface.multiplicity[i][j],
                u8::from(a.is_finite())
            );
        }
    }
    out
}

pub fn maxima_csv(line: &MaximaLine) -> String {
    let mut out = String::from("F_N,Omega_rad_s,amplitude_rad,n_roots,stable_flag,degenerate\n");
    for p in &line.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            sci(p.tension),
            sci(p.omega),
            sci(p.amplitude),
            p.n_roots,
            u8::from(p.amplitude.is_finite()),
            u8::from(p.degenerate)
        );
    }
    out
}

/// Per-order rows first, then the summed lines tagged `total`.
pub fn spectrum_csv(spectrum: &OutputSpectrum) -> String {
    let mut out = String::from("harmonic_index,freq_rad_s,re,im,order\n");
    for (order, lines) in &spectrum.per_order_contributions {
        for l in lines {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                l.harmonic_index,
                sci(l.frequency),
                sci(l.x.re),
                sci(l.x.im),
                order
            );
        }
    }
    for l in &spectrum.lines {
        let _ = writeln!(
            out,
            "{},{},{},{},total",
            l.harmonic_index,
            sci(l.frequency),
            sci(l.x.re),
            sci(l.x.im)
        );
    }
    out
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from("t_s,theta_rad,theta_dot_rad_s\n");
    for k in 0..traj.times.len() {
        let _ = writeln!(
            out,
            "{},{},{}",
            sci(traj.times[k]),
            sci(traj.theta[k]),
            sci(traj.theta_dot[k])
        );
    }
    out
}

pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from(
        "F_N,Omega_rad_s,hb_amplitude_rad,volterra_amplitude_rad,sim_amplitude_rad,volterra_divergence,sim_spread\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            sci(r.tension),
            sci(r.omega),
            sci(r.harmonic_balance),
            sci(r.volterra),
            sci(r.simulated),
            sci(r.volterra_divergence),
            sci(r.simulated_spread)
        );
    }
    out
}

#[derive(Debug, Serialize)]
struct SurfaceDocument<'a> {
    code_version: &'static str,
    joint: &'a JointParams,
    q0_rad_s2: f64,
    grid: GridMeta,
    surface: &'a AmplitudeSurface,
    #[serde(skip_serializing_if = "Option::is_none")]
    maxima: Option<&'a MaximaLine>,
}

#[derive(Debug, Serialize)]
struct GridMeta {
    tension_points: usize,
    omega_points: usize,
    tension_min_n: f64,
    tension_max_n: f64,
    omega_min_rad_s: f64,
    omega_max_rad_s: f64,
}

pub fn surface_json(surface: &AmplitudeSurface, joint: &JointParams, maxima: Option<&MaximaLine>) -> String {
    let first = |v: &[f64]| v.first().copied().unwrap_or(f64::NAN);
    let last = |v: &[f64]| v.last().copied().unwrap_or(f64::NAN);
    let doc = SurfaceDocument {
        code_version: CODE_VERSION,
        joint,
        q0_rad_s2: surface.q0,
        grid: GridMeta {
            tension_points: surface.tensions.len(),
            omega_points: surface.omegas.len(),
            tension_min_n: first(&surface.tensions),
            tension_max_n: last(&surface.tensions),
            omega_min_rad_s: first(&surface.omegas),
            omega_max_rad_s: last(&surface.omegas),
        },
        surface,
        maxima,
    };
    serde_json::to_string_pretty(&doc).expect("surface serializes")
}

pub fn spectrum_json(spectrum: &OutputSpectrum) -> String {
    serde_json::to_string_pretty(spectrum).expect("spectrum serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sci(1.0), "1.00000000e0");
        assert_eq!(sci(-0.000123456789123), "-1.23456789e-4");
        assert_eq!(sci(6.02214076e23), "6.02214076e23");
    }
}
