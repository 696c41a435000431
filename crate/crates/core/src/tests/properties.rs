use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use crate::harmonic_balance::{amplitude_polynomial, solve_amplitudes, DuffingCoeffs, Forcing};
use crate::joint::{critical_tension, cubic_coefficient, torque, JointParams};
use crate::signal::{analytic_envelope, harmonic_amplitudes, interior, SampledSignal};
use crate::volterra::{multi_tone_spectrum, single_tone_lines, LineConvention, SpectrumLine};

fn joint_strategy() -> impl Strategy<Value = JointParams> {
    (5e-3..0.05f64, 1.05..3.0f64, 10.0..500.0f64, 1e-6..1e-3f64, 0.1..20.0f64)
        .prop_map(|(r, ratio, k, i, z)| JointParams::new(r, r * ratio, k, i, z).unwrap())
}

fn duffing_strategy() -> impl Strategy<Value = (DuffingCoeffs, Forcing)> {
    (100.0..3000.0f64, -1e5..1e5f64, 0.1..20.0f64, 0.01..100.0f64, 0.1..3.0f64).prop_map(
        |(k, a, z, q, w)| {
            (
                DuffingCoeffs::new(k, a, z).unwrap(),
                Forcing::new(q, w * k.sqrt(), 0.0).unwrap(),
            )
        },
    )
}

/// Conjugate-symmetric comb with harmonics `1..=l_max` on base `omega`.
fn comb(omega: f64, amps: &[(f64, f64)]) -> Vec<SpectrumLine> {
    let mut lines = Vec::new();
    for (i, &(re, im)) in amps.iter().enumerate() {
        let l = i as i32 + 1;
        let x = Complex64::new(re, im);
        lines.push(SpectrumLine {
            harmonic_index: l,
            frequency: l as f64 * omega,
            x,
        });
        lines.push(SpectrumLine {
            harmonic_index: -l,
            frequency: -(l as f64) * omega,
            x: x.conj(),
        });
    }
    lines
}

fn close(a: Complex64, b: Complex64, scale: f64) -> bool {
    (a - b).norm() <= 1e-11 * scale
}

proptest! {
    #[test]
    fn torque_is_odd(joint in joint_strategy(), f in 1e-3..2.0f64, theta in -3.1..3.1f64) {
        let pos = torque(theta, f, &joint);
        let neg = torque(-theta, f, &joint);
        prop_assert!((pos + neg).abs() <= 1e-12 * pos.abs().max(1e-300));
    }

    #[test]
    fn torque_is_affine_in_tension(
        joint in joint_strategy(),
        f1 in 0.0..2.0f64,
        f2 in 0.0..2.0f64,
        lambda in 0.0..1.0f64,
        theta in -3.1..3.1f64,
    ) {
        let mixed = torque(theta, lambda * f1 + (1.0 - lambda) * f2, &joint);
        let blend = lambda * torque(theta, f1, &joint) + (1.0 - lambda) * torque(theta, f2, &joint);
        let scale = torque(theta, f1, &joint).abs() + torque(theta, f2, &joint).abs() + 1e-300;
        prop_assert!((mixed - blend).abs() <= 1e-12 * scale);
    }

    #[test]
    fn cubic_coefficient_changes_sign_at_critical_tension(joint in joint_strategy(), s in 0.01..0.99f64) {
        let fs = critical_tension(&joint);
        prop_assert!(cubic_coefficient(fs * s, &joint) > 0.0);
        prop_assert!(cubic_coefficient(fs / s, &joint) < 0.0);
    }

    #[test]
    fn amplitude_polynomial_root_contracts((coeffs, forcing) in duffing_strategy()) {
        let p = amplitude_polynomial(&coeffs, &forcing);
        prop_assert!(p.eval(0.0) < 0.0);
        let roots = solve_amplitudes(&coeffs, &forcing).unwrap();
        prop_assert!(roots.len() % 2 == 1, "{} roots", roots.len());
        prop_assert!(roots.last().unwrap().stable);
        for r in &roots {
            let u = r.amplitude * r.amplitude;
            prop_assert!(p.eval(u).abs() < 1e-9 * forcing.q0 * forcing.q0);
        }
        // Stability alternates along the ascending branches.
        for w in roots.windows(2) {
            prop_assert!(w[0].stable != w[1].stable);
        }
    }

    #[test]
    fn linear_amplitude_scales_with_forcing((coeffs, forcing) in duffing_strategy()) {
        let lin = coeffs.linearized();
        let one = solve_amplitudes(&lin, &forcing).unwrap();
        let two = solve_amplitudes(&lin, &forcing.with_q0(2.0 * forcing.q0)).unwrap();
        prop_assert_eq!(one.len(), 1);
        prop_assert!((two[0].amplitude - 2.0 * one[0].amplitude).abs() <= 1e-12 * two[0].amplitude);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn output_spectrum_is_conjugate_symmetric(
        (coeffs, forcing) in duffing_strategy(),
        amps in prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 1..=3),
    ) {
        let order = if amps.len() == 3 { 5 } else { 7 };
        let out = multi_tone_spectrum(&coeffs, &comb(forcing.omega, &amps), order).unwrap();
        let scale = out.lines.iter().map(|l| l.x.norm()).fold(0.0, f64::max);
        for l in &out.lines {
            let mirror = out.line(-l.harmonic_index).expect("mirror line");
            prop_assert!(close(mirror.x, l.x.conj(), scale));
        }
    }

    #[test]
    fn output_spectrum_ignores_input_order(
        (coeffs, forcing) in duffing_strategy(),
        amps in prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 2..=3),
        seed in any::<u64>(),
    ) {
        let lines = comb(forcing.omega, &amps);
        let mut shuffled = lines.clone();
        // Deterministic Fisher-Yates driven by the seed.
        let mut state = seed | 1;
        for i in (1..shuffled.len()).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            shuffled.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let a = multi_tone_spectrum(&coeffs, &lines, 5).unwrap();
        let b = multi_tone_spectrum(&coeffs, &shuffled, 5).unwrap();
        prop_assert_eq!(a.lines.len(), b.lines.len());
        let scale = a.lines.iter().map(|l| l.x.norm()).fold(0.0, f64::max);
        for (x, y) in a.lines.iter().zip(&b.lines) {
            prop_assert_eq!(x.harmonic_index, y.harmonic_index);
            prop_assert!(close(x.x, y.x, scale));
        }
    }

    #[test]
    fn order_contributions_scale_with_input_power(
        (coeffs, forcing) in duffing_strategy(),
        lambda in 0.1..3.0f64,
    ) {
        let base = multi_tone_spectrum(&coeffs, &single_tone_lines(&forcing, LineConvention::Physical), 7).unwrap();
        let scaled_forcing = forcing.with_q0(lambda * forcing.q0);
        let scaled = multi_tone_spectrum(&coeffs, &single_tone_lines(&scaled_forcing, LineConvention::Physical), 7).unwrap();
        for (order, lines) in &base.per_order_contributions {
            let x = lines.iter().find(|l| l.harmonic_index == 1).unwrap().x;
            let y = scaled.per_order_contributions[order].iter().find(|l| l.harmonic_index == 1).unwrap().x;
            let expected = x * lambda.powi(*order as i32);
            prop_assert!((y - expected).norm() <= 1e-12 * expected.norm());
        }
    }

    #[test]
    fn tone_envelope_is_phase_invariant(
        amp in 0.01..2.0f64,
        periods in 4usize..20,
        phase in 0.0..(2.0 * PI),
    ) {
        let n = 64 * periods;
        let w = 2.0 * PI / 64.0;
        let tone = |ph: f64| -> Vec<f64> { (0..n).map(|k| amp * (w * k as f64 + ph).sin()).collect() };
        let e0 = analytic_envelope(&SampledSignal::new(tone(0.0), 1.0).unwrap());
        let e1 = analytic_envelope(&SampledSignal::new(tone(phase), 1.0).unwrap());
        for (a, b) in interior(&e0).iter().zip(interior(&e1)) {
            prop_assert!((a - b).abs() < 1e-9 * amp);
        }
    }

    #[test]
    fn harmonic_power_is_bounded_by_signal_power(
        coeffs in prop::collection::vec(-1.0..1.0f64, 6),
        periods in 2usize..8,
    ) {
        let n = 64 * periods;
        let w = 2.0 * PI / 64.0;
        let samples: Vec<f64> = (0..n)
            .map(|k| {
                let t = k as f64;
                // Harmonics 1..4 plus content at 7, above the analysed range.
                coeffs[0] * (w * t).sin() + coeffs[1] * (2.0 * w * t).cos()
                    + coeffs[2] * (3.0 * w * t).sin() + coeffs[3] * (4.0 * w * t + 0.3).sin()
                    + coeffs[4] * (7.0 * w * t).sin() + coeffs[5]
            })
            .collect();
        let mean_square = samples.iter().map(|x| x * x).sum::<f64>() / n as f64;
        let h = harmonic_amplitudes(&SampledSignal::new(samples, 1.0).unwrap(), w, 4).unwrap();
        let power: f64 = h.iter().map(|a| a * a).sum();
        prop_assert!(power <= 2.0 * mean_square + 1e-12);
    }
}
