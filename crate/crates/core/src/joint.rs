//! Cable-driven rotational joint: exact torque law, odd Taylor reduction,
//! and tension-tuning analyses.
//!
//! A linear spring of stiffness `K` pulls an inextensible thread attached to
//! an appendage of the second body. The spring force at zero deflection is the
//! tension `F`, the control input. Geometry enters through
//! `epsilon = d - r` and `S = r * d`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{require, Error, Result};
use crate::optimize::{golden_min, GoldenOutcome};

/// Physical description of the joint, strict SI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointParams {
    /// Appendage radius (m).
    pub r: f64,
    /// Thread anchor distance (m).
    pub d: f64,
    /// Linear-spring stiffness (N/m).
    pub stiffness: f64,
    /// Moment of inertia about the joint axis (kg m^2).
    pub inertia: f64,
    /// Specific damping (1/s).
    pub zeta: f64,
}

/// Specific forcing amplitude of the reference joint expressed as `Q0 * I` (N m).
pub const REFERENCE_Q0_TIMES_I: f64 = 1e-4;

impl JointParams {
    pub fn new(r: f64, d: f64, stiffness: f64, inertia: f64, zeta: f64) -> Result<Self> {
        let joint = Self {
            r,
            d,
            stiffness,
            inertia,
            zeta,
        };
        joint.validate()?;
        Ok(joint)
    }

    /// Builds the joint from bench units: millimetres and the damping given as
    /// `zeta * I` (N m s).
    pub fn from_bench_units(
        r_mm: f64,
        d_mm: f64,
        stiffness: f64,
        inertia: f64,
        zeta_times_inertia: f64,
    ) -> Result<Self> {
        require(inertia > 0.0, "inertia", "must be > 0")?;
        Self::new(
            r_mm * 1e-3,
            d_mm * 1e-3,
            stiffness,
            inertia,
            zeta_times_inertia / inertia,
        )
    }

    /// The measured joint of the swimming robot.
    pub fn reference() -> Self {
        Self::from_bench_units(20.24, 27.68, 81.0, 3.1e-5, 2.2e-4)
            .expect("reference joint is valid")
    }

    /// Specific forcing amplitude `Q0` (rad/s^2) of the reference excitation for this joint.
    pub fn reference_q0(&self) -> f64 {
        REFERENCE_Q0_TIMES_I / self.inertia
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.r, self.d, self.stiffness, self.inertia, self.zeta]
            .iter()
            .all(|v| v.is_finite());
        require(finite, "joint", "all parameters must be finite")?;
        require(self.r > 0.0, "r", format!("must be > 0, got {}", self.r))?;
        if self.d <= self.r {
            return Err(Error::DegenerateGeometry {
                r: self.r,
                d: self.d,
            });
        }
        require(self.stiffness > 0.0, "stiffness", "must be > 0")?;
        require(self.inertia > 0.0, "inertia", "must be > 0")?;
        require(self.zeta >= 0.0, "zeta", "must be >= 0")?;
        Ok(())
    }

    /// Shorthand for [`derive_geometry`] on a joint already known to be valid.
    pub fn geometry(&self) -> DerivedGeometry {
        DerivedGeometry {
            epsilon: self.d - self.r,
            area: self.r * self.d,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedGeometry {
    /// `d - r` (m).
    pub epsilon: f64,
    /// `r * d` (m^2).
    pub area: f64,
}

pub fn derive_geometry(joint: &JointParams) -> Result<DerivedGeometry> {
    joint.validate()?;
    Ok(joint.geometry())
}

/// Exact restoring torque (N m) at deflection `theta` and tension `tension`.
pub fn torque(theta: f64, tension: f64, joint: &JointParams) -> f64 {
    let DerivedGeometry { epsilon, area } = joint.geometry();
    let half = (0.5 * theta).sin();
    let arm = (epsilon * epsilon + 4.0 * area * half * half).sqrt();
    (joint.stiffness * (arm - epsilon) + tension) / arm * area * theta.sin()
}

/// Closed-form linear torque coefficient `kappa(F)` (N m/rad).
pub fn linear_coefficient(tension: f64, joint: &JointParams) -> f64 {
    let g = joint.geometry();
    g.area * tension / g.epsilon
}

/// Closed-form cubic torque coefficient `alpha(F)` (N m/rad^3).
pub fn cubic_coefficient(tension: f64, joint: &JointParams) -> f64 {
    let g = joint.geometry();
    let kappa = g.area * tension / g.epsilon;
    kappa
        * (g.area / (2.0 * g.epsilon * g.epsilon) * (g.epsilon * joint.stiffness / tension - 1.0)
            - 1.0 / 6.0)
}

/// Odd-power torque coefficients at one tension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaylorSeries {
    pub tension: f64,
    /// `[c1, c3, c5, c7]`.
    pub coeffs: [f64; 4],
}

impl TaylorSeries {
    pub fn c1(&self) -> f64 {
        self.coeffs[0]
    }
    pub fn c3(&self) -> f64 {
        self.coeffs[1]
    }
    pub fn c5(&self) -> f64 {
        self.coeffs[2]
    }
    pub fn c7(&self) -> f64 {
        self.coeffs[3]
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let t2 = theta * theta;
        theta * (self.coeffs[0] + t2 * (self.coeffs[1] + t2 * (self.coeffs[2] + t2 * self.coeffs[3])))
    }

    pub fn eval_cubic(&self, theta: f64) -> f64 {
        theta * (self.coeffs[0] + theta * theta * self.coeffs[1])
    }
}

/// Default half-width of the fitting window. The torque law's Taylor series
/// converges only for |theta| below roughly `epsilon / sqrt(S)`, so the window
/// stays well inside that radius.
pub const DEFAULT_FIT_HALF_WIDTH: f64 = 0.01;

const FIT_NODES: usize = 64;

/// Least-squares fit of `c1 t + c3 t^3 + c5 t^5 + c7 t^7` to the exact torque on
/// Chebyshev nodes over `[-theta_ref, theta_ref]`.
pub fn taylor_coeffs(tension: f64, joint: &JointParams, theta_ref: f64) -> Result<TaylorSeries> {
    if !(tension > 0.0) {
        return Err(Error::NonPositiveTension(tension));
    }
    require(theta_ref > 0.0, "theta_ref", "must be > 0")?;
    joint.validate()?;

    // Columns are scaled to x = theta / theta_ref so the system stays well conditioned.
    let mut a = vec![[0.0f64; 4]; FIT_NODES];
    let mut b = vec![0.0f64; FIT_NODES];
    for i in 0..FIT_NODES {
        let x = ((2 * i + 1) as f64 * std::f64::consts::PI / (2 * FIT_NODES) as f64).cos();
        let x2 = x * x;
        a[i] = [x, x * x2, x * x2 * x2, x * x2 * x2 * x2];
        b[i] = torque(x * theta_ref, tension, joint);
    }
    let scaled = least_squares_4(&a, &b);
    let mut coeffs = [0.0; 4];
    for (n, c) in coeffs.iter_mut().enumerate() {
        *c = scaled[n] / theta_ref.powi(2 * n as i32 + 1);
    }
    Ok(TaylorSeries { tension, coeffs })
}

/// Householder QR least squares for a tall system with four columns.
#[allow(clippy::needless_range_loop)]
fn least_squares_4(a: &[[f64; 4]], b: &[f64]) -> [f64; 4] {
    let m = a.len();
    let mut q: Vec<[f64; 4]> = a.to_vec();
    let mut rhs = b.to_vec();
    for col in 0..4 {
        let norm = (col..m).map(|i| q[i][col] * q[i][col]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if q[col][col] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (col..m).map(|i| q[i][col]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in col..4 {
            let dot: f64 = (col..m).map(|i| v[i - col] * q[i][j]).sum();
            let s = 2.0 * dot / vnorm2;
            for i in col..m {
                q[i][j] -= s * v[i - col];
            }
        }
        let dot: f64 = (col..m).map(|i| v[i - col] * rhs[i]).sum();
        let s = 2.0 * dot / vnorm2;
        for i in col..m {
            rhs[i] -= s * v[i - col];
        }
    }
    let mut x = [0.0; 4];
    for i in (0..4).rev() {
        let tail: f64 = (i + 1..4).map(|j| q[i][j] * x[j]).sum();
        x[i] = (rhs[i] - tail) / q[i][i];
    }
    x
}

/// Tension `F*` at which the cubic coefficient vanishes.
pub fn critical_tension(joint: &JointParams) -> f64 {
    let g = joint.geometry();
    g.epsilon * joint.stiffness / (g.epsilon * g.epsilon / (3.0 * g.area) + 1.0)
}

/// Default angular window for the linearity objective (rad).
pub const DEFAULT_LINEARITY_WINDOW: f64 = 0.5;

const LINEARITY_SAMPLES: usize = 400;

fn window_samples(joint: &JointParams, tension: f64, theta_ref: f64) -> Vec<(f64, f64)> {
    // The torque is odd in theta, so the positive half-window suffices.
    (1..=LINEARITY_SAMPLES)
        .map(|i| {
            let theta = theta_ref * i as f64 / LINEARITY_SAMPLES as f64;
            (theta, torque(theta, tension, joint))
        })
        .collect()
}

/// Relative minimax deviation of the torque from its best straight line through
/// the origin over `|theta| <= theta_ref`.
pub fn linearity_defect(tension: f64, joint: &JointParams, theta_ref: f64) -> f64 {
    let samples = window_samples(joint, tension, theta_ref);
    let (lo, hi) = samples
        .iter()
        .map(|&(t, tau)| tau / t)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), q| {
            (lo.min(q), hi.max(q))
        });
    let worst = |slope: f64| {
        samples
            .iter()
            .map(|&(t, tau)| (tau - slope * t).abs())
            .fold(0.0, f64::max)
    };
    if hi - lo <= f64::EPSILON * hi.abs() {
        return 0.0;
    }
    // The worst-case residual is convex in the slope and minimized between the
    // extreme secant slopes.
    let tol = 1e-12 * hi.abs().max(lo.abs());
    match golden_min(worst, lo, hi, tol, 400) {
        Ok(best) => best.value / best.x,
        Err(_) => f64::INFINITY,
    }
}

/// Maximum deviation from the tangent line `c1(F) theta` over the window.
pub fn linearity_defect_at_c1(tension: f64, joint: &JointParams, theta_ref: f64) -> f64 {
    let c1 = linear_coefficient(tension, joint);
    window_samples(joint, tension, theta_ref)
        .iter()
        .map(|&(t, tau)| (tau - c1 * t).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearTension {
    pub tension: f64,
    pub objective: f64,
    pub search: GoldenOutcome,
}

/// Tension in `[0.5 F*, 1.5 F*]` minimizing [`linearity_defect`].
pub fn optimal_linear_tension(joint: &JointParams, theta_ref: f64) -> Result<LinearTension> {
    require(theta_ref > 0.0, "theta_ref", "must be > 0")?;
    joint.validate()?;
    let f_star = critical_tension(joint);
    let search = golden_min(
        |f| linearity_defect(f, joint, theta_ref),
        0.5 * f_star,
        1.5 * f_star,
        1e-7 * f_star,
        200,
    )?;
    Ok(LinearTension {
        tension: search.x,
        objective: search.value,
        search,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidityConfig {
    /// Force resolution (N).
    pub delta_f: f64,
}

impl Default for ValidityConfig {
    fn default() -> Self {
        Self { delta_f: 0.05 }
    }
}

impl ValidityConfig {
    /// Reference torque error `r * delta_F` (N m).
    pub fn reference_torque(&self, joint: &JointParams) -> f64 {
        joint.r * self.delta_f
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ValidityAngle {
    Angle(f64),
    /// The cubic model stays within the reference error up to pi/2.
    BeyondHalfPi,
}

impl ValidityAngle {
    pub fn angle(&self) -> Option<f64> {
        match *self {
            ValidityAngle::Angle(a) => Some(a),
            ValidityAngle::BeyondHalfPi => None,
        }
    }

    /// Angle used for ranking; the sentinel ranks at pi/2.
    pub fn rank_value(&self) -> f64 {
        self.angle().unwrap_or(FRAC_PI_2)
    }
}

const VALIDITY_SCAN_STEP: f64 = 0.01;

/// Smallest positive angle where the cubic model's torque error reaches `r * delta_F`.
pub fn validity_angle(tension: f64, joint: &JointParams, cfg: &ValidityConfig) -> Result<ValidityAngle> {
    if !(tension > 0.0) {
        return Err(Error::NonPositiveTension(tension));
    }
    require(cfg.delta_f > 0.0, "delta_f", "must be > 0")?;
    let c1 = linear_coefficient(tension, joint);
    let c3 = cubic_coefficient(tension, joint);
    let reference = cfg.reference_torque(joint);
    let excess = |t: f64| (torque(t, tension, joint) - c1 * t - c3 * t * t * t).abs() - reference;

    let steps = (FRAC_PI_2 / VALIDITY_SCAN_STEP).ceil() as usize;
    let mut prev = 0.0;
    for i in 1..=steps {
        let t = (i as f64 * VALIDITY_SCAN_STEP).min(FRAC_PI_2);
        if excess(t) > 0.0 {
            let (mut lo, mut hi) = (prev, t);
            while hi - lo > 1e-10 {
                let mid = 0.5 * (lo + hi);
                if excess(mid) > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(ValidityAngle::Angle(0.5 * (lo + hi)));
        }
        prev = t;
    }
    Ok(ValidityAngle::BeyondHalfPi)
}

/// Evaluates [`validity_angle`] over the given tensions.
pub fn validity_scan(
    tensions: &[f64],
    joint: &JointParams,
    cfg: &ValidityConfig,
) -> Result<Vec<(f64, ValidityAngle)>> {
    tensions
        .iter()
        .map(|&f| validity_angle(f, joint, cfg).map(|v| (f, v)))
        .collect()
}

/// Tension with the largest validity angle in a scan. A run of sentinel
/// outcomes reports its middle element.
pub fn validity_peak(scan: &[(f64, ValidityAngle)]) -> Option<f64> {
    let best = scan
        .iter()
        .map(|(_, v)| v.rank_value())
        .fold(f64::NEG_INFINITY, f64::max);
    let hits: Vec<usize> = scan
        .iter()
        .enumerate()
        .filter(|(_, (_, v))| v.rank_value() == best)
        .map(|(i, _)| i)
        .collect();
    hits.get(hits.len() / 2).map(|&i| scan[i].0)
}
