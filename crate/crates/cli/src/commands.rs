use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use serde_json::{json, Value};

use duffjoint::compare::{compare_cut, CompareOptions};
use duffjoint::config::LoadedConfig;
use duffjoint::export::{self, sci};
use duffjoint::harmonic_balance::{linear_resonance_tension, SurfaceModel};
use duffjoint::joint::{cubic_coefficient, linear_coefficient, validity_angle};
use duffjoint::simulator::steady_state;
use duffjoint::volterra::{single_tone_lines, LineConvention};
use duffjoint::*;

use crate::args::{Command, Model, Reference, SurfaceArgs, TensionList};
use crate::manifest::Outputs;

pub type CliResult<T> = std::result::Result<T, Box<dyn std::error::Error>>;

fn torque_model(m: Model) -> TorqueModel {
    match m {
        Model::Exact => TorqueModel::Exact,
        Model::Cubic => TorqueModel::Cubic,
    }
}

fn resolve_tensions(list: &TensionList, f_star: f64, default_fstar: &[f64]) -> Vec<f64> {
    match &list.tensions {
        Some(v) => match list.relative_to {
            Reference::Fstar => v.iter().map(|x| x * f_star).collect(),
            Reference::Newton => v.clone(),
        },
        None => default_fstar.iter().map(|x| x * f_star).collect(),
    }
}

fn frequency(hz: f64) -> Value {
    json!({ "hz": hz, "rad_s": 2.0 * PI * hz })
}

fn surface_spec(cfg: &LoadedConfig, args: &SurfaceArgs) -> SurfaceSpec {
    let f_star = critical_tension(&cfg.joint);
    SurfaceSpec {
        q0: cfg.q0,
        tension_range: (0.0, args.max_tension_fstar * f_star),
        omega_range: (0.0, 2.0 * PI * args.max_freq_hz),
        resolution: (args.grid.rows, args.grid.cols),
        model: if args.linear_surrogate {
            SurfaceModel::LinearSurrogate
        } else {
            SurfaceModel::Duffing
        },
    }
}

fn surface_parameters(spec: &SurfaceSpec, args: &SurfaceArgs) -> Value {
    json!({
        "grid": [args.grid.rows, args.grid.cols],
        "tension_range_n": [spec.tension_range.0, spec.tension_range.1],
        "frequency_range": {
            "hz": [0.0, args.max_freq_hz],
            "rad_s": [spec.omega_range.0, spec.omega_range.1],
        },
        "q0_rad_s2": spec.q0,
        "model": spec.model,
    })
}

/// Runs one subcommand and returns the outputs plus the parameters for the manifest.
pub fn run(command: &Command, cfg: &LoadedConfig, outputs: &mut Outputs) -> CliResult<(&'static str, Value)> {
    let joint = cfg.joint;
    let f_star = critical_tension(&joint);
    match command {
        Command::TorqueCurve {
            tensions,
            points,
            max_angle,
        } => {
            if *points < 2 {
                return Err("--points must be at least 2".into());
            }
            let fs = resolve_tensions(tensions, f_star, &[0.5, 0.9, 1.0, 1.5]);
            let mut csv = String::from("F_N,theta_rad,torque_N_m,cubic_torque_N_m\n");
            for &f in &fs {
                let (c1, c3) = (linear_coefficient(f, &joint), cubic_coefficient(f, &joint));
                for i in 0..*points {
                    let theta = -max_angle + 2.0 * max_angle * i as f64 / (*points - 1) as f64;
                    let _ = writeln!(
                        csv,
                        "{},{},{},{}",
                        sci(f),
                        sci(theta),
                        sci(torque(theta, f, &joint)),
                        sci(c1 * theta + c3 * theta.powi(3))
                    );
                }
            }
            outputs.add("torque_curve.csv", csv);
            Ok(("torque-curve", json!({ "tensions_n": fs, "points": points, "max_angle_rad": max_angle, "f_star_n": f_star })))
        }
        Command::Taylor {
            tensions,
            theta_ref,
            window,
        } => {
            let fs = resolve_tensions(tensions, f_star, &[0.5, 0.75, 1.0, 1.25, 1.5]);
            let f0 = optimal_linear_tension(&joint, *window)?;
            let mut csv = String::from("F_N,c1_N_m,c3_N_m,c5_N_m,c7_N_m,c1_closed_N_m,c3_closed_N_m\n");
            for &f in &fs {
                let t = taylor_coeffs(f, &joint, *theta_ref)?;
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{}",
                    sci(f),
                    sci(t.c1()),
                    sci(t.c3()),
                    sci(t.c5()),
                    sci(t.c7()),
                    sci(linear_coefficient(f, &joint)),
                    sci(cubic_coefficient(f, &joint))
                );
            }
            outputs.add("taylor.csv", csv);
            Ok((
                "taylor",
                json!({
                    "tensions_n": fs,
                    "theta_ref_rad": theta_ref,
                    "linearity_window_rad": window,
                    "f_star_n": f_star,
                    "f0_n": f0.tension,
                    "f0_over_f_star": f0.tension / f_star,
                    "f0_objective": f0.objective,
                }),
            ))
        }
        Command::ErrorMap { grid, delta_f } => {
            let vcfg = ValidityConfig { delta_f: *delta_f };
            let tensions = duffjoint::harmonic_balance::left_open_grid(0.0, 1.5 * f_star, grid.rows);
            let angles = duffjoint::harmonic_balance::left_open_grid(0.0, FRAC_PI_2, grid.cols);
            let reference = vcfg.reference_torque(&joint);
            let mut map = String::from("F_N,theta_rad,abs_error_N_m,relative_to_reference\n");
            let mut validity = String::from("F_N,validity_angle_rad,beyond_half_pi\n");
            for &f in &tensions {
                let (c1, c3) = (linear_coefficient(f, &joint), cubic_coefficient(f, &joint));
                for &theta in &angles {
                    let err = (torque(theta, f, &joint) - c1 * theta - c3 * theta.powi(3)).abs();
                    let _ = writeln!(map, "{},{},{},{}", sci(f), sci(theta), sci(err), sci(err / reference));
                }
                let v = validity_angle(f, &joint, &vcfg)?;
                let _ = writeln!(
                    validity,
                    "{},{},{}",
                    sci(f),
                    sci(v.rank_value()),
                    u8::from(v.angle().is_none())
                );
            }
            outputs.add("error_map.csv", map);
            outputs.add("validity_angle.csv", validity);
            Ok((
                "error-map",
                json!({
                    "grid": [grid.rows, grid.cols],
                    "delta_f_n": delta_f,
                    "reference_torque_n_m": reference,
                    "f_star_n": f_star,
                }),
            ))
        }
        Command::HbSurface { surface } => {
            let spec = surface_spec(cfg, surface);
            let s = response_surface(&joint, &spec)?;
            outputs.add("hb_surface.csv", export::surface_csv(&s));
            outputs.add("hb_surface.json", export::surface_json(&s, &joint, None) + "\n");
            Ok(("hb-surface", surface_parameters(&spec, surface)))
        }
        Command::MaximaLine { surface } => {
            let spec = surface_spec(cfg, surface);
            let s = response_surface(&joint, &spec)?;
            let line = line_of_maxima(&s, &joint)?;
            let mut csv = export::maxima_csv(&line);
            if surface.linear_surrogate {
                // Closed-form argmax of the linear response for reference.
                csv = String::from("F_N,Omega_rad_s,amplitude_rad,n_roots,stable_flag,degenerate,resonance_tension_N\n");
                for p in &line.points {
                    let _ = writeln!(
                        csv,
                        "{},{},{},{},{},{},{}",
                        sci(p.tension),
                        sci(p.omega),
                        sci(p.amplitude),
                        p.n_roots,
                        u8::from(p.amplitude.is_finite()),
                        u8::from(p.degenerate),
                        sci(linear_resonance_tension(p.omega, &joint))
                    );
                }
            }
            outputs.add("maxima_line.csv", csv);
            let mut params = surface_parameters(&spec, surface);
            params["f_star_n"] = json!(f_star);
            Ok(("maxima-line", params))
        }
        Command::VolterraResponse {
            tension_n,
            freq_hz,
            max_order,
        } => {
            let coeffs = duffing_coeffs(*tension_n, &joint)?;
            let forcing = Forcing::from_hz(cfg.q0, *freq_hz)?;
            let closed = single_tone_response(&coeffs, &forcing)?;
            let spectrum = multi_tone_spectrum(&coeffs, &single_tone_lines(&forcing, LineConvention::Physical), *max_order)?;
            outputs.add("volterra_spectrum.csv", export::spectrum_csv(&spectrum));
            let summary = json!({
                "fundamental_amplitude_rad": closed.amplitude,
                "harmonic_amplitudes_rad": (1..=*max_order as i32).step_by(2).map(|m| spectrum.harmonic_amplitude(m)).collect::<Vec<_>>(),
                "order_magnitudes": closed.per_order.iter().map(|c| c.norm()).collect::<Vec<_>>(),
                "divergence_ratio": closed.divergence_ratio(),
                "diverging": closed.divergence_ratio() > 1.0,
                "spectrum": serde_json::from_str::<Value>(&export::spectrum_json(&spectrum))?,
            });
            outputs.add("volterra_response.json", serde_json::to_string_pretty(&summary)? + "\n");
            Ok((
                "volterra-response",
                json!({
                    "tension_n": tension_n,
                    "frequency": frequency(*freq_hz),
                    "max_order": max_order,
                    "q0_rad_s2": cfg.q0,
                    "duffing": { "k": coeffs.k, "a": coeffs.a, "zeta": coeffs.zeta },
                }),
            ))
        }
        Command::Simulate {
            tension_n,
            freq_hz,
            model,
            tolerance,
        } => {
            let forcing = Forcing::from_hz(cfg.q0, *freq_hz)?;
            let sim_cfg = SimConfig::for_forcing(&forcing, joint.zeta)
                .with_model(torque_model(*model))
                .with_tolerance(*tolerance);
            let traj = simulate(&joint, *tension_n, &forcing, &sim_cfg)?;
            let steady = steady_state(&traj, &forcing)?;
            outputs.add("trajectory.csv", export::trajectory_csv(&traj));
            Ok((
                "simulate",
                json!({
                    "tension_n": tension_n,
                    "frequency": frequency(*freq_hz),
                    "q0_rad_s2": cfg.q0,
                    "sim_config": sim_cfg,
                    "steady_amplitude_rad": steady.amplitude,
                    "envelope_spread": steady.spread,
                    "steady": steady.spread <= duffjoint::simulator::STEADY_SPREAD_LIMIT,
                }),
            ))
        }
        Command::Compare {
            freq_hz,
            tensions,
            model,
            tolerance,
        } => {
            let default: Vec<f64> = (0..25).map(|i| 0.5 + i as f64 / 24.0).collect();
            let fs = resolve_tensions(tensions, f_star, &default);
            let forcing = Forcing::from_hz(cfg.q0, *freq_hz)?;
            let opts = CompareOptions {
                model: torque_model(*model),
                tolerance: *tolerance,
            };
            let rows = compare_cut(&joint, &fs, &forcing, &opts)?;
            outputs.add("compare.csv", export::comparison_csv(&rows));
            Ok((
                "compare",
                json!({
                    "tensions_n": fs,
                    "frequency": frequency(*freq_hz),
                    "q0_rad_s2": cfg.q0,
                    "model": opts.model,
                    "tolerance": tolerance,
                    "f_star_n": f_star,
                }),
            ))
        }
        Command::WakeForcing { tension_n } => {
            let (wake, calib) = cfg
                .wake
                .ok_or("configuration has no [wake] block; wake-forcing needs c_omega and c_amp")?;
            let forcing = wake_to_forcing(&wake, &calib)?;
            let hb = match tension_n {
                Some(f) => observed_amplitude(&duffing_coeffs(*f, &joint)?, &forcing)?,
                None => None,
            };
            let mut csv = String::from("Omega_rad_s,freq_hz,Q0_rad_s2,phi_rad,hb_amplitude_rad\n");
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                sci(forcing.omega),
                sci(forcing.omega / (2.0 * PI)),
                sci(forcing.q0),
                sci(forcing.phi),
                hb.map(sci).unwrap_or_default()
            );
            outputs.add("wake_forcing.csv", csv);
            Ok((
                "wake-forcing",
                json!({
                    "wake": wake,
                    "calibration": calib,
                    "tension_n": tension_n,
                    "frequency": frequency(forcing.omega / (2.0 * PI)),
                }),
            ))
        }
    }
}
