//! Frequency-domain Volterra expansion of the cubic oscillator.
//!
//! Kernels follow the probing-method recursions for
//! `theta'' + zeta theta' + k theta + a theta^3`:
//!
//! ```text
//! H3(s1:3) = -a  H1(sum) H1(s1) H1(s2) H1(s3)
//! H5(s1:5) = -3a H1(sum) H1(s1) H1(s2) H3(s3:5)
//! H7(s1:7) = -3a H1(sum) [H1(s1) H1(s2) H5(s3:7) + H1(s1) H3(s2:4) H3(s5:7)]
//! ```
//!
//! Individual kernels are not symmetric in their arguments; summing over every
//! ordered index tuple in [`multi_tone_spectrum`] symmetrizes them.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonic_balance::{DuffingCoeffs, Forcing};

/// Scale between `|Y(Omega)| / pi` and the time-domain amplitude, fixed so the
/// `a = 0` limit reproduces `Q0 |H1(Omega)|`.
pub const AMPLITUDE_CALIBRATION: f64 = 1.0;

/// Upper bound on ordered tuples visited by one spectrum evaluation.
pub const TUPLE_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelContext {
    pub coeffs: DuffingCoeffs,
    pub max_order: usize,
}

impl KernelContext {
    pub fn new(coeffs: DuffingCoeffs, max_order: usize) -> Result<Self> {
        if !matches!(max_order, 1 | 3 | 5 | 7) {
            return Err(Error::InvalidParameter {
                name: "max_order",
                reason: format!("must be one of 1, 3, 5, 7; got {max_order}"),
            });
        }
        Ok(Self { coeffs, max_order })
    }
}

/// First-order kernel `1 / (k - omega^2 + j zeta omega)`.
pub fn h1(omega: f64, coeffs: &DuffingCoeffs) -> Result<Complex64> {
    let den = Complex64::new(coeffs.k - omega * omega, coeffs.zeta * omega);
    if den.norm() == 0.0 {
        return Err(Error::ResonanceSingularity { omega });
    }
    Ok(den.inv())
}

pub fn kernel(order: usize, freqs: &[f64], ctx: &KernelContext) -> Result<Complex64> {
    if order > ctx.max_order {
        return Err(Error::OrderTooHigh {
            order,
            max: ctx.max_order,
        });
    }
    if freqs.len() != order {
        return Err(Error::FrequencyCount {
            order,
            expected: order,
            got: freqs.len(),
        });
    }
    kernel_unchecked(order, freqs, &ctx.coeffs)
}

fn kernel_unchecked(order: usize, w: &[f64], c: &DuffingCoeffs) -> Result<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    if order == 0 || order.is_multiple_of(2) {
        return Ok(zero);
    }
    if order == 1 {
        return h1(w[0], c);
    }
    if c.a == 0.0 {
        return Ok(zero);
    }
    let outer = h1(w.iter().sum(), c)?;
    match order {
        3 => Ok(-c.a * outer * h1(w[0], c)? * h1(w[1], c)? * h1(w[2], c)?),
        5 => {
            let inner = h1(w[0], c)? * h1(w[1], c)? * kernel_unchecked(3, &w[2..5], c)?;
            Ok(-3.0 * c.a * outer * inner)
        }
        7 => {
            let first = h1(w[0], c)? * h1(w[1], c)? * kernel_unchecked(5, &w[2..7], c)?;
            let second = h1(w[0], c)?
                * kernel_unchecked(3, &w[1..4], c)?
                * kernel_unchecked(3, &w[4..7], c)?;
            Ok(-3.0 * c.a * outer * (first + second))
        }
        _ => Err(Error::OrderTooHigh { order, max: 7 }),
    }
}

/// Closed-form `+Omega` output line for a single tone, split by order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleToneResponse {
    pub y: Complex64,
    /// Contributions of orders 1, 3, 5 and 7.
    pub per_order: [Complex64; 4],
    /// Fundamental amplitude (rad).
    pub amplitude: f64,
}

impl SingleToneResponse {
    /// `|order 7| / |order 1|`; above one the truncated series has stopped converging.
    pub fn divergence_ratio(&self) -> f64 {
        self.per_order[3].norm() / self.per_order[0].norm()
    }
}

/// Collapsed seventh-order expansion of the fundamental for `Q0 sin(Omega t)`,
/// with input lines `X(+-1) = +-j pi Q0`.
pub fn single_tone_response(coeffs: &DuffingCoeffs, forcing: &Forcing) -> Result<SingleToneResponse> {
    let w = forcing.omega;
    let q = forcing.q0;
    let a = coeffs.a;
    let p = h1(w, coeffs)?;
    let m = h1(-w, coeffs)?;
    let p3 = h1(3.0 * w, coeffs)?;
    let m3 = h1(-3.0 * w, coeffs)?;

    // The p3 m^3 p^6 term enters with +15; `multi_tone_spectrum` enumerates
    // the same recursion tuple by tuple and pins every sign in this group.
    let seventh = 3.0
        * a.powi(3)
        * q.powi(7)
        * (2.0 * p3 * m3 * m.powi(3) * p.powi(5)
            + 6.0 * p3 * m.powi(4) * p.powi(5)
            + 6.0 * p3 * p3 * m.powi(3) * p.powi(5)
            + 3.0 * m3 * m.powi(4) * p.powi(5)
            + 15.0 * p3 * m.powi(3) * p.powi(6)
            + 45.0 * m.powi(3) * p.powi(7)
            + 45.0 * m.powi(4) * p.powi(6)
            + 18.0 * m.powi(5) * p.powi(5));
    let fifth = -12.0
        * a
        * a
        * q.powi(5)
        * (p3 * m * m * p.powi(4) + 6.0 * m * m * p.powi(5) + 3.0 * m.powi(3) * p.powi(4));
    let third = 48.0 * a * q.powi(3) * m * p.powi(3);
    let first = -64.0 * q * p;

    let prefactor = Complex64::new(0.0, -PI / 64.0);
    let per_order = [
        prefactor * first,
        prefactor * third,
        prefactor * fifth,
        prefactor * seventh,
    ];
    let y = per_order.iter().sum::<Complex64>();
    Ok(SingleToneResponse {
        y,
        per_order,
        amplitude: AMPLITUDE_CALIBRATION * y.norm() / PI,
    })
}

/// One impulse of a Dirac-comb spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumLine {
    pub harmonic_index: i32,
    /// `harmonic_index * Omega` (rad/s).
    pub frequency: f64,
    pub x: Complex64,
}

/// Sign convention for the two lines of a sine input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LineConvention {
    /// Forward transform with `e^{-j w t}`: `X(+-1) = -+j pi Q0 e^{+-j phi}`.
    Physical,
    /// `X(+-1) = +-j pi Q0`, the convention of the collapsed closed form.
    Published,
}

/// Two-line comb of `Q0 sin(Omega t + phi)`.
pub fn single_tone_lines(forcing: &Forcing, convention: LineConvention) -> [SpectrumLine; 2] {
    let base = PI * forcing.q0;
    let (pos, neg) = match convention {
        LineConvention::Physical => {
            let rot = Complex64::from_polar(1.0, forcing.phi);
            (
                Complex64::new(0.0, -base) * rot,
                Complex64::new(0.0, base) * rot.conj(),
            )
        }
        LineConvention::Published => (Complex64::new(0.0, base), Complex64::new(0.0, -base)),
    };
    [
        SpectrumLine {
            harmonic_index: -1,
            frequency: -forcing.omega,
            x: neg,
        },
        SpectrumLine {
            harmonic_index: 1,
            frequency: forcing.omega,
            x: pos,
        },
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSpectrum {
    pub base_frequency: f64,
    /// Summed lines, ascending harmonic index.
    pub lines: Vec<SpectrumLine>,
    /// Lines contributed by each odd order.
    pub per_order_contributions: BTreeMap<usize, Vec<SpectrumLine>>,
}

impl OutputSpectrum {
    pub fn line(&self, harmonic_index: i32) -> Option<&SpectrumLine> {
        self.lines.iter().find(|l| l.harmonic_index == harmonic_index)
    }

    /// Time-domain amplitude of harmonic `m >= 1`.
    pub fn harmonic_amplitude(&self, m: i32) -> f64 {
        self.line(m)
            .map(|l| AMPLITUDE_CALIBRATION * l.x.norm() / PI)
            .unwrap_or(0.0)
    }
}

fn infer_base_frequency(lines: &[SpectrumLine]) -> Result<f64> {
    let mut base = None;
    for l in lines.iter().filter(|l| l.harmonic_index != 0) {
        let w = l.frequency / l.harmonic_index as f64;
        match base {
            None => base = Some(w),
            Some(b) if (w - b).abs() <= 1e-12 * b.abs().max(1.0) => {}
            Some(_) => {
                return Err(Error::InvalidParameter {
                    name: "input",
                    reason: format!("line {} is not a multiple of the base frequency", l.harmonic_index),
                })
            }
        }
    }
    base.ok_or(Error::InvalidParameter {
        name: "input",
        reason: "no non-zero harmonic line".into(),
    })
}

fn check_conjugate_symmetry(lines: &BTreeMap<i32, Complex64>) -> Result<()> {
    let scale = lines.values().map(|x| x.norm()).fold(0.0, f64::max);
    let tol = 1e-12 * scale.max(f64::MIN_POSITIVE);
    for (&l, &x) in lines {
        let partner = lines.get(&-l).copied().unwrap_or_default();
        if (partner - x.conj()).norm() > tol {
            return Err(Error::NotConjugateSymmetric { index: l });
        }
    }
    Ok(())
}

/// Output comb of the truncated series for a conjugate-symmetric input comb.
pub fn multi_tone_spectrum(
    coeffs: &DuffingCoeffs,
    input: &[SpectrumLine],
    max_order: usize,
) -> Result<OutputSpectrum> {
    let ctx = KernelContext::new(*coeffs, max_order)?;

    let mut merged: BTreeMap<i32, Complex64> = BTreeMap::new();
    for l in input {
        *merged.entry(l.harmonic_index).or_default() += l.x;
    }
    check_conjugate_symmetry(&merged)?;
    let active: Vec<(i32, Complex64)> = merged.into_iter().filter(|(_, x)| x.norm() != 0.0).collect();
    if active.is_empty() {
        return Ok(OutputSpectrum {
            base_frequency: infer_base_frequency(input).unwrap_or(0.0),
            lines: Vec::new(),
            per_order_contributions: BTreeMap::new(),
        });
    }
    let base = infer_base_frequency(input)?;

    let n = active.len() as u128;
    let needed: u128 = (1..=max_order).step_by(2).map(|i| n.pow(i as u32)).sum();
    if needed > TUPLE_CAP {
        return Err(Error::EnumerationCap {
            needed,
            cap: TUPLE_CAP,
        });
    }

    let mut total: BTreeMap<i32, Complex64> = BTreeMap::new();
    let mut per_order = BTreeMap::new();
    for order in (1..=max_order).step_by(2) {
        let prefactor = (2.0 * PI).powi(1 - order as i32);
        let mut acc: BTreeMap<i32, Complex64> = BTreeMap::new();
        let mut idx = vec![0usize; order];
        let mut freqs = vec![0.0; order];
        loop {
            let mut product = Complex64::new(1.0, 0.0);
            let mut sum = 0;
            for (slot, &i) in idx.iter().enumerate() {
                let (l, x) = active[i];
                freqs[slot] = base * l as f64;
                product *= x;
                sum += l;
            }
            let b = kernel(order, &freqs, &ctx)? * product;
            *acc.entry(sum).or_default() += prefactor * b;

            // Odometer over ordered tuples, last slot fastest.
            let mut slot = order;
            loop {
                if slot == 0 {
                    break;
                }
                slot -= 1;
                idx[slot] += 1;
                if idx[slot] < active.len() {
                    break;
                }
                idx[slot] = 0;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
        for (&l, &x) in &acc {
            *total.entry(l).or_default() += x;
        }
        per_order.insert(order, to_lines(&acc, base));
    }
    Ok(OutputSpectrum {
        base_frequency: base,
        lines: to_lines(&total, base),
        per_order_contributions: per_order,
    })
}

fn to_lines(map: &BTreeMap<i32, Complex64>, base: f64) -> Vec<SpectrumLine> {
    map.iter()
        .map(|(&l, &x)| SpectrumLine {
            harmonic_index: l,
            frequency: base * l as f64,
            x,
        })
        .collect()
}
