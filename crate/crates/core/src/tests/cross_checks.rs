use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::harmonic_balance::{duffing_coeffs, observed_amplitude, response_surface, Forcing, SurfaceSpec};
use crate::joint::{critical_tension, validity_angle, JointParams, ValidityConfig};
use crate::signal::{harmonic_amplitudes, SampledSignal};
use crate::simulator::{simulate, steady_state_amplitude, SimConfig, TorqueModel, STEADY_PERIODS};
use crate::volterra::{multi_tone_spectrum, single_tone_lines, LineConvention};

fn last_periods(theta: &[f64], per_period: usize) -> Vec<f64> {
    theta[theta.len() - STEADY_PERIODS * per_period..].to_vec()
}

#[test]
fn third_harmonic_matches_volterra_line() {
    let j = JointParams::reference();
    let fs = critical_tension(&j);
    let tension = 0.2 * fs;
    let forcing = Forcing::from_hz(j.reference_q0(), 1.5).unwrap();
    let cfg = SimConfig::for_forcing(&forcing, j.zeta)
        .with_model(TorqueModel::Cubic)
        .with_tolerance(1e-12);
    let traj = simulate(&j, tension, &forcing, &cfg).unwrap();
    let window = last_periods(&traj.theta, cfg.samples_per_period);
    let h = harmonic_amplitudes(&SampledSignal::new(window, traj.dt).unwrap(), forcing.omega, 3).unwrap();

    let coeffs = duffing_coeffs(tension, &j).unwrap();
    let spectrum = multi_tone_spectrum(&coeffs, &single_tone_lines(&forcing, LineConvention::Physical), 7).unwrap();
    let predicted = spectrum.harmonic_amplitude(3);
    assert!(h[2] > 0.0 && predicted > 0.0);
    assert!((h[2] - predicted).abs() < 0.05 * predicted, "simulated {} vs {}", h[2], predicted);
    assert!((h[0] - spectrum.harmonic_amplitude(1)).abs() < 1e-3 * h[0]);
}

#[test]
fn half_period_phase_shift_keeps_amplitude() {
    let j = JointParams::reference();
    let fs = critical_tension(&j);
    let base = Forcing::from_hz(j.reference_q0(), 1.5).unwrap();
    let shifted = Forcing { phi: std::f64::consts::PI, ..base };
    let cfg = SimConfig::for_forcing(&base, j.zeta).with_tolerance(1e-10);
    let a = simulate(&j, 0.7 * fs, &base, &cfg).unwrap();
    let b = simulate(&j, 0.7 * fs, &shifted, &cfg).unwrap();
    let amp_a = steady_state_amplitude(&a, &base).unwrap();
    let amp_b = steady_state_amplitude(&b, &shifted).unwrap();
    assert!((amp_a - amp_b).abs() < 1e-6);
    // The odd restoring torque makes the shifted steady response the mirror image.
    let n = a.theta.len();
    for k in n - 64..n {
        assert!((a.theta[k] + b.theta[k]).abs() < 1e-6, "t = {}", a.times[k]);
    }
}

#[test]
fn exact_and_cubic_models_agree_at_small_angles() {
    let j = JointParams::reference();
    let fs = critical_tension(&j);
    let tension = 0.8 * fs;
    let forcing = Forcing::from_hz(j.reference_q0(), 1.5).unwrap();
    let cfg = SimConfig::for_forcing(&forcing, j.zeta).with_tolerance(1e-10);
    let exact = simulate(&j, tension, &forcing, &cfg).unwrap();
    let cubic = simulate(&j, tension, &forcing, &cfg.with_model(TorqueModel::Cubic)).unwrap();
    let peak = exact.theta.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let limit = validity_angle(tension, &j, &ValidityConfig::default()).unwrap().rank_value();
    assert!(peak < limit);
    let worst = exact
        .theta
        .iter()
        .zip(&cubic.theta)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-4 * peak, "{worst} vs peak {peak}");
}

#[test]
fn surface_agrees_with_simulation_at_sampled_cells() {
    let j = JointParams::reference();
    let spec = SurfaceSpec::default_for(&j, j.reference_q0());
    let surface = response_surface(&j, &spec).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut audited = 0;
    while audited < 20 {
        // Stay inside the hardening band and away from the slowest frequencies.
        let i = rng.gen_range(60..200);
        let k = rng.gen_range(40..200);
        if surface.multiplicity[i][k] != 1 {
            continue;
        }
        let (tension, omega) = (surface.tensions[i], surface.omegas[k]);
        let forcing = Forcing::new(spec.q0, omega, 0.0).unwrap();
        let cfg = SimConfig::for_forcing(&forcing, j.zeta).with_model(TorqueModel::Cubic);
        let traj = simulate(&j, tension, &forcing, &cfg).unwrap();
        let sim = steady_state_amplitude(&traj, &forcing).unwrap();
        let hb = surface.amplitudes[i][k];
        assert!((hb - sim).abs() < 0.05 * sim, "cell ({i}, {k}): {hb} vs {sim}");
        let coeffs = duffing_coeffs(tension, &j).unwrap();
        assert_eq!(observed_amplitude(&coeffs, &forcing).unwrap(), Some(hb));
        audited += 1;
    }
}

#[test]
fn tolerance_halving_is_stable() {
    let j = JointParams::reference();
    let fs = critical_tension(&j);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let tension = rng.gen_range(0.3..1.5) * fs;
        let forcing = Forcing::from_hz(j.reference_q0(), rng.gen_range(0.8..3.0)).unwrap();
        let cfg = SimConfig::for_forcing(&forcing, j.zeta);
        let tight = SimConfig {
            abs_tol: cfg.abs_tol / 2.0,
            rel_tol: cfg.rel_tol / 2.0,
            ..cfg
        };
        let a = steady_state_amplitude(&simulate(&j, tension, &forcing, &cfg).unwrap(), &forcing).unwrap();
        let b = steady_state_amplitude(&simulate(&j, tension, &forcing, &tight).unwrap(), &forcing).unwrap();
        assert!((a - b).abs() < 1e-3 * b, "F = {tension}, Omega = {}", forcing.omega);
    }
}
