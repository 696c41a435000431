//! Single-harmonic periodic response of the Duffing reduction.
//!
//! Assuming `theta(t) = A sin(Omega t + psi)` and balancing the first harmonic
//! gives `((k - Omega^2 + 3/4 a A^2)^2 + zeta^2 Omega^2) A^2 = Q0^2`, a cubic in
//! `u = A^2`. Stability of each branch uses the fold criterion `dP/du > 0`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cubic;
use crate::error::{require, Error, Result};
use crate::joint::{critical_tension, cubic_coefficient, linear_coefficient, JointParams};
use crate::optimize::golden_max;

/// Reduced model `theta'' + zeta theta' + k theta + a theta^3 = Gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DuffingCoeffs {
    /// Specific stiffness (1/s^2).
    pub k: f64,
    /// Specific cubic coefficient (1/(s^2 rad^2)).
    pub a: f64,
    /// Specific damping (1/s).
    pub zeta: f64,
}

impl DuffingCoeffs {
    pub fn new(k: f64, a: f64, zeta: f64) -> Result<Self> {
        require(k > 0.0 && k.is_finite(), "k", "must be finite and > 0")?;
        require(a.is_finite(), "a", "must be finite")?;
        require(zeta >= 0.0 && zeta.is_finite(), "zeta", "must be finite and >= 0")?;
        Ok(Self { k, a, zeta })
    }

    /// Same oscillator with the cubic term removed.
    pub fn linearized(self) -> Self {
        Self { a: 0.0, ..self }
    }
}

pub fn duffing_coeffs(tension: f64, joint: &JointParams) -> Result<DuffingCoeffs> {
    if !(tension > 0.0) {
        return Err(Error::NonPositiveTension(tension));
    }
    joint.validate()?;
    Ok(DuffingCoeffs {
        k: linear_coefficient(tension, joint) / joint.inertia,
        a: cubic_coefficient(tension, joint) / joint.inertia,
        zeta: joint.zeta,
    })
}

/// Harmonic drive `Q0 sin(Omega t + phi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Forcing {
    /// Specific torque amplitude (rad/s^2).
    pub q0: f64,
    /// Angular frequency (rad/s).
    pub omega: f64,
    /// Phase (rad).
    pub phi: f64,
}

impl Forcing {
    pub fn new(q0: f64, omega: f64, phi: f64) -> Result<Self> {
        require(q0 >= 0.0 && q0.is_finite(), "q0", "must be finite and >= 0")?;
        require(omega > 0.0 && omega.is_finite(), "omega", "must be finite and > 0")?;
        require(phi.is_finite(), "phi", "must be finite")?;
        Ok(Self { q0, omega, phi })
    }

    pub fn from_hz(q0: f64, hz: f64) -> Result<Self> {
        Self::new(q0, 2.0 * std::f64::consts::PI * hz, 0.0)
    }

    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega
    }

    pub fn with_q0(self, q0: f64) -> Self {
        Self { q0, ..self }
    }
}

/// `p3 u^3 + p2 u^2 + p1 u + p0` with `u = A^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudePolynomial {
    pub p3: f64,
    pub p2: f64,
    pub p1: f64,
    pub p0: f64,
}

impl AmplitudePolynomial {
    pub fn eval(&self, u: f64) -> f64 {
        ((self.p3 * u + self.p2) * u + self.p1) * u + self.p0
    }

    pub fn derivative(&self, u: f64) -> f64 {
        (3.0 * self.p3 * u + 2.0 * self.p2) * u + self.p1
    }
}

pub fn amplitude_polynomial(coeffs: &DuffingCoeffs, forcing: &Forcing) -> AmplitudePolynomial {
    let DuffingCoeffs { k, a, zeta } = *coeffs;
    let w2 = forcing.omega * forcing.omega;
    AmplitudePolynomial {
        p3: 9.0 * a * a / 16.0,
        p2: 1.5 * (k - w2) * a,
        p1: (w2 + zeta * zeta - 2.0 * k) * w2 + k * k,
        p0: -forcing.q0 * forcing.q0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeRoot {
    /// Response amplitude (rad).
    pub amplitude: f64,
    pub stable: bool,
}

/// Every non-negative real branch of the amplitude polynomial, ascending.
pub fn solve_amplitudes(coeffs: &DuffingCoeffs, forcing: &Forcing) -> Result<Vec<AmplitudeRoot>> {
    let poly = amplitude_polynomial(coeffs, forcing);

    // Work in units of the linear response so the snap threshold is dimensionless.
    let scale = if poly.p1 > 0.0 && poly.p0 != 0.0 {
        -poly.p0 / poly.p1
    } else {
        1.0
    };
    let roots = cubic::real_roots(
        poly.p3 * scale * scale * scale,
        poly.p2 * scale * scale,
        poly.p1 * scale,
        poly.p0,
    );
    let mut out: Vec<AmplitudeRoot> = roots
        .into_iter()
        .map(|v| v * scale)
        .filter(|&u| u >= 0.0)
        .map(|u| AmplitudeRoot {
            amplitude: u.sqrt(),
            stable: poly.derivative(u) > 0.0,
        })
        .collect();
    out.sort_by(|x, y| x.amplitude.total_cmp(&y.amplitude));

    if forcing.q0 > 0.0 && out.is_empty() {
        return Err(Error::Internal(format!(
            "no non-negative root although P(0) = {} < 0",
            poly.p0
        )));
    }
    Ok(out)
}

/// Largest stable amplitude, if any branch is stable.
pub fn observed_amplitude(coeffs: &DuffingCoeffs, forcing: &Forcing) -> Result<Option<f64>> {
    Ok(solve_amplitudes(coeffs, forcing)?
        .iter()
        .rev()
        .find(|r| r.stable)
        .map(|r| r.amplitude))
}

/// Which reduction the surface is evaluated with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SurfaceModel {
    Duffing,
    /// Cubic coefficient forced to zero at every tension.
    LinearSurrogate,
}

impl SurfaceModel {
    pub fn coeffs(self, tension: f64, joint: &JointParams) -> Result<DuffingCoeffs> {
        let c = duffing_coeffs(tension, joint)?;
        Ok(match self {
            SurfaceModel::Duffing => c,
            SurfaceModel::LinearSurrogate => c.linearized(),
        })
    }
}

/// Uniform grid on `(lo, hi]` that excludes the left end point.
pub fn left_open_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub q0: f64,
    pub tension_range: (f64, f64),
    pub omega_range: (f64, f64),
    /// `(tension points, frequency points)`.
    pub resolution: (usize, usize),
    pub model: SurfaceModel,
}

impl SurfaceSpec {
    /// Tension in `(0, 1.5 F*]`, frequency in `(0, 3] Hz`, 200 x 200.
    pub fn default_for(joint: &JointParams, q0: f64) -> Self {
        Self {
            q0,
            tension_range: (0.0, 1.5 * critical_tension(joint)),
            omega_range: (0.0, 2.0 * std::f64::consts::PI * 3.0),
            resolution: (200, 200),
            model: SurfaceModel::Duffing,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeSurface {
    pub tensions: Vec<f64>,
    pub omegas: Vec<f64>,
    /// `amplitudes[i][j]` is the largest stable amplitude at `(tensions[i], omegas[j])`.
    pub amplitudes: Vec<Vec<f64>>,
    /// Number of non-negative real roots at each cell.
    pub multiplicity: Vec<Vec<u8>>,
    pub q0: f64,
    pub model: SurfaceModel,
}

pub fn response_surface(joint: &JointParams, spec: &SurfaceSpec) -> Result<AmplitudeSurface> {
    joint.validate()?;
    let (f_lo, f_hi) = spec.tension_range;
    let (w_lo, w_hi) = spec.omega_range;
    if spec.resolution.0 == 0 || !(f_hi > f_lo) {
        return Err(Error::EmptyRange("tension"));
    }
    if spec.resolution.1 == 0 || !(w_hi > w_lo) {
        return Err(Error::EmptyRange("omega"));
    }
    require(f_lo >= 0.0, "tension_range", "must be non-negative")?;
    require(w_lo >= 0.0, "omega_range", "must be non-negative")?;
    require(spec.q0 >= 0.0, "q0", "must be >= 0")?;

    let tensions = left_open_grid(f_lo, f_hi, spec.resolution.0);
    let omegas = left_open_grid(w_lo, w_hi, spec.resolution.1);

    let rows: Vec<(Vec<f64>, Vec<u8>)> = tensions
        .par_iter()
        .map(|&f| -> Result<(Vec<f64>, Vec<u8>)> {
            let coeffs = spec.model.coeffs(f, joint)?;
            let mut amps = Vec::with_capacity(omegas.len());
            let mut mult = Vec::with_capacity(omegas.len());
            for &w in &omegas {
                let forcing = Forcing::new(spec.q0, w, 0.0)?;
                let roots = solve_amplitudes(&coeffs, &forcing)?;
                let best = roots.iter().rev().find(|r| r.stable).map(|r| r.amplitude);
                amps.push(best.unwrap_or(f64::NAN));
                mult.push(roots.len() as u8);
            }
            Ok((amps, mult))
        })
        .collect::<Result<_>>()?;

    let (amplitudes, multiplicity) = rows.into_iter().unzip();
    Ok(AmplitudeSurface {
        tensions,
        omegas,
        amplitudes,
        multiplicity,
        q0: spec.q0,
        model: spec.model,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaximaPoint {
    pub omega: f64,
    /// Refined maximizing tension (N).
    pub tension: f64,
    pub amplitude: f64,
    /// Index of the coarse maximizer on the tension grid.
    pub grid_index: usize,
    /// The coarse maximizer sits on the first or last grid tension.
    pub at_boundary: bool,
    /// Every tension gave the same amplitude.
    pub degenerate: bool,
    /// Positive amplitude roots at the reported tension.
    pub n_roots: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximaLine {
    pub points: Vec<MaximaPoint>,
}

impl MaximaLine {
    /// Interior, non-degenerate maxima with tension below `F*`.
    pub fn hardening_segment(&self, f_star: f64) -> Vec<MaximaPoint> {
        self.points
            .iter()
            .filter(|p| !p.degenerate && !p.at_boundary && p.tension < f_star)
            .copied()
            .collect()
    }
}

const MAXIMA_TOL: f64 = 1e-6;

/// Tension maximizing the stable amplitude at each grid frequency.
pub fn line_of_maxima(surface: &AmplitudeSurface, joint: &JointParams) -> Result<MaximaLine> {
    let n_f = surface.tensions.len();
    if n_f == 0 || surface.omegas.is_empty() {
        return Err(Error::EmptyRange("surface"));
    }
    let points = surface
        .omegas
        .par_iter()
        .enumerate()
        .map(|(j, &omega)| -> Result<MaximaPoint> {
            let column: Vec<f64> = (0..n_f).map(|i| surface.amplitudes[i][j]).collect();
            let mut best = 0;
            for (i, &a) in column.iter().enumerate() {
                if a > column[best] || column[best].is_nan() {
                    best = i;
                }
            }
            let degenerate = column.iter().all(|&a| a == column[0]);
            if degenerate {
                return Ok(MaximaPoint {
                    omega,
                    tension: surface.tensions[0],
                    amplitude: column[0],
                    grid_index: 0,
                    at_boundary: true,
                    degenerate,
                    n_roots: usize::from(surface.multiplicity[0][j]),
                });
            }
            let lo = surface.tensions[best.saturating_sub(1)];
            let hi = surface.tensions[(best + 1).min(n_f - 1)];
            let forcing = Forcing::new(surface.q0, omega, 0.0)?;
            let amp_at = |f: f64| -> f64 {
                surface
                    .model
                    .coeffs(f, joint)
                    .and_then(|c| observed_amplitude(&c, &forcing))
                    .ok()
                    .flatten()
                    .unwrap_or(f64::NEG_INFINITY)
            };
            let refined = golden_max(amp_at, lo, hi, MAXIMA_TOL, 200)?;
            // Keep the grid value when refinement lands on a lower branch.
            let (tension, amplitude) = if refined.value >= column[best] {
                (refined.x, refined.value)
            } else {
                (surface.tensions[best], column[best])
            };
            let n_roots = surface
                .model
                .coeffs(tension, joint)
                .and_then(|c| solve_amplitudes(&c, &forcing))
                .map(|r| r.len())
                .unwrap_or(0);
            Ok(MaximaPoint {
                omega,
                tension,
                amplitude,
                grid_index: best,
                at_boundary: best == 0 || best == n_f - 1,
                degenerate,
                n_roots,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MaximaLine { points })
}

/// Tension at which the linear surrogate resonates: `k(F) = Omega^2`.
pub fn linear_resonance_tension(omega: f64, joint: &JointParams) -> f64 {
    let g = joint.geometry();
    omega * omega * g.epsilon * joint.inertia / g.area
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_forcing(hz: f64) -> Forcing {
        Forcing::from_hz(JointParams::reference().reference_q0(), hz).unwrap()
    }

    #[test]
    fn coefficients_at_critical_tension() {
        let j = JointParams::reference();
        let c = duffing_coeffs(critical_tension(&j), &j).unwrap();
        assert!((c.k - 1.417e3).abs() < 0.5, "{}", c.k);
        assert!(c.a.abs() < 1e-9);
        assert!((c.zeta - 7.097).abs() < 1e-3);
    }

    #[test]
    fn hardening_below_critical_tension() {
        let j = JointParams::reference();
        let fs = critical_tension(&j);
        assert!(duffing_coeffs(0.5 * fs, &j).unwrap().a > 0.0);
        assert!(duffing_coeffs(1.5 * fs, &j).unwrap().a < 0.0);
        assert!(duffing_coeffs(0.0, &j).is_err());
    }

    #[test]
    fn linear_coefficient_is_the_linear_denominator() {
        let c = DuffingCoeffs::new(1417.0, 0.0, 7.1).unwrap();
        let f = reference_forcing(1.5);
        let p = amplitude_polynomial(&c, &f);
        let w2 = f.omega * f.omega;
        let linear = (c.k - w2).powi(2) + c.zeta * c.zeta * w2;
        assert!((p.p1 - linear).abs() < 1e-9 * linear);
        assert_eq!(p.p3, 0.0);
        assert_eq!(p.p2, 0.0);
    }

    #[test]
    fn linear_amplitude_at_critical_tension() {
        let j = JointParams::reference();
        let c = duffing_coeffs(critical_tension(&j), &j).unwrap().linearized();
        let roots = solve_amplitudes(&c, &reference_forcing(1.5)).unwrap();
        assert_eq!(roots.len(), 1);
        assert!(roots[0].stable);
        assert!((roots[0].amplitude - 2.43e-3).abs() < 5e-6, "{}", roots[0].amplitude);
    }

    #[test]
    fn fold_middle_branch_is_unstable() {
        let j = JointParams::reference();
        let c = duffing_coeffs(0.01, &j).unwrap();
        let f = Forcing::from_hz(10.0 * j.reference_q0(), 2.926).unwrap();
        let roots = solve_amplitudes(&c, &f).unwrap();
        assert_eq!(roots.len(), 3);
        assert_eq!(
            roots.iter().map(|r| r.stable).collect::<Vec<_>>(),
            vec![true, false, true]
        );
        let p = amplitude_polynomial(&c, &f);
        for r in &roots {
            assert!(p.eval(r.amplitude.powi(2)).abs() < 1e-9 * f.q0 * f.q0);
        }
    }

    #[test]
    fn zero_forcing_has_rest_solution() {
        let c = DuffingCoeffs::new(100.0, 5.0, 1.0).unwrap();
        let f = Forcing::new(0.0, 3.0, 0.0).unwrap();
        let roots = solve_amplitudes(&c, &f).unwrap();
        assert_eq!(roots[0].amplitude, 0.0);
    }

    #[test]
    fn left_open_grid_excludes_origin() {
        let g = left_open_grid(0.0, 1.0, 4);
        assert_eq!(g, vec![0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn empty_ranges_rejected() {
        let j = JointParams::reference();
        let mut spec = SurfaceSpec::default_for(&j, 1.0);
        spec.resolution = (0, 10);
        assert_eq!(response_surface(&j, &spec), Err(Error::EmptyRange("tension")));
        let mut spec = SurfaceSpec::default_for(&j, 1.0);
        spec.omega_range = (2.0, 2.0);
        assert_eq!(response_surface(&j, &spec), Err(Error::EmptyRange("omega")));
    }

    #[test]
    fn flat_row_is_flagged_degenerate() {
        let j = JointParams::reference();
        let surface = AmplitudeSurface {
            tensions: vec![0.1, 0.2, 0.3],
            omegas: vec![5.0],
            amplitudes: vec![vec![1.0], vec![1.0], vec![1.0]],
            multiplicity: vec![vec![1], vec![1], vec![1]],
            q0: 1.0,
            model: SurfaceModel::Duffing,
        };
        let line = line_of_maxima(&surface, &j).unwrap();
        assert!(line.points[0].degenerate);
        assert_eq!(line.points[0].tension, 0.1);
    }

    #[test]
    fn linear_surrogate_maximum_at_resonance_tension() {
        let j = JointParams::reference();
        let w = 2.0 * std::f64::consts::PI * 1.5;
        let f = linear_resonance_tension(w, &j);
        assert!((f - 3.66e-2).abs() < 1e-4, "{f}");
    }
}
