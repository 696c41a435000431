//! Envelope and harmonic-content extraction from uniformly sampled signals.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 16;

/// Fraction of the envelope discarded at each end.
pub const GUARD_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    pub samples: Vec<f64>,
    pub dt: f64,
}

impl SampledSignal {
    pub fn new(samples: Vec<f64>, dt: f64) -> Result<Self> {
        if samples.len() < MIN_SAMPLES {
            return Err(Error::Signal(format!(
                "need at least {MIN_SAMPLES} samples, got {}",
                samples.len()
            )));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Signal(format!("sample spacing must be > 0, got {dt}")));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::Signal("non-finite sample".into()));
        }
        Ok(Self { samples, dt })
    }

    /// Builds a signal from explicit sample times, rejecting non-uniform spacing.
    pub fn from_times(times: &[f64], samples: Vec<f64>) -> Result<Self> {
        if times.len() != samples.len() {
            return Err(Error::Signal("times and samples differ in length".into()));
        }
        if times.len() < 2 {
            return Self::new(samples, 1.0);
        }
        let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
        let uniform = times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt.abs());
        if !uniform {
            return Err(Error::Signal("non-uniform sampling".into()));
        }
        Self::new(samples, dt)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 * self.dt
    }
}

/// Modulus of the discrete analytic signal. The transform runs at the exact
/// input length, so a window holding whole periods is treated as periodic.
pub fn analytic_envelope(sig: &SampledSignal) -> Vec<f64> {
    let n = sig.samples.len();
    let mut planner = FftPlanner::<f64>::new();
    let mut buf: Vec<Complex64> = sig.samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);

    // DC and Nyquist kept, positive frequencies doubled, negative zeroed.
    let half = n / 2;
    for (i, z) in buf.iter_mut().enumerate() {
        let weight = if i == 0 || (n.is_multiple_of(2) && i == half) {
            1.0
        } else if i <= (n - 1) / 2 {
            2.0
        } else {
            0.0
        };
        *z *= weight;
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter().map(|z| z.norm() * scale).collect()
}

/// Envelope samples left after dropping the guard bands.
pub fn interior(envelope: &[f64]) -> &[f64] {
    let guard = (envelope.len() as f64 * GUARD_FRACTION).floor() as usize;
    &envelope[guard..envelope.len() - guard]
}

/// Amplitudes of harmonics `1..=n` of `omega` by direct correlation.
pub fn harmonic_amplitudes(sig: &SampledSignal, omega: f64, n: usize) -> Result<Vec<f64>> {
    if !(omega > 0.0) {
        return Err(Error::Signal("fundamental frequency must be > 0".into()));
    }
    let span = sig.duration();
    let period = 2.0 * PI / omega;
    let cycles = span / period;
    let whole = cycles.round();
    if whole < 1.0 || (cycles - whole).abs() * period > 1e-3 * span {
        return Err(Error::Signal(format!(
            "window covers {cycles:.6} periods; an integer count is required"
        )));
    }
    let len = sig.samples.len() as f64;
    Ok((1..=n)
        .map(|m| {
            let w = m as f64 * omega;
            let acc: Complex64 = sig
                .samples
                .iter()
                .enumerate()
                .map(|(k, &x)| x * Complex64::from_polar(1.0, -w * k as f64 * sig.dt))
                .sum();
            2.0 * acc.norm() / len
        })
        .collect())
}
