//! Real roots of real cubics through the depressed form in complex arithmetic.

use num_complex::Complex64;

/// Imaginary parts below `SNAP * (1 + |re|)` are treated as rounding noise.
pub const SNAP: f64 = 1e-9;

/// All complex roots of `c3 x^3 + c2 x^2 + c1 x + c0`, lowering the degree when
/// leading coefficients vanish exactly.
pub fn complex_roots(c3: f64, c2: f64, c1: f64, c0: f64) -> Vec<Complex64> {
    if c3 == 0.0 {
        return quadratic_roots(c2, c1, c0);
    }
    let b = c2 / c3;
    let c = c1 / c3;
    let d = c0 / c3;
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;

    let disc = Complex64::new(q * q / 4.0 + p * p * p / 27.0, 0.0).sqrt();
    let half_q = Complex64::new(-q / 2.0, 0.0);
    // Take the branch with the larger modulus to avoid cancellation.
    let big = if (half_q + disc).norm() >= (half_q - disc).norm() {
        half_q + disc
    } else {
        half_q - disc
    };
    let cube = big.cbrt();
    let omega = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
    let mut rotation = Complex64::new(1.0, 0.0);
    let mut roots = Vec::with_capacity(3);
    for _ in 0..3 {
        let u = cube * rotation;
        let t = if u.norm() == 0.0 { u } else { u - p / (3.0 * u) };
        roots.push(t - shift);
        rotation *= omega;
    }
    roots
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<Complex64> {
    if a == 0.0 {
        if b == 0.0 {
            return Vec::new();
        }
        return vec![Complex64::new(-c / b, 0.0)];
    }
    let disc = Complex64::new(b * b - 4.0 * a * c, 0.0).sqrt();
    let sign = if b >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (Complex64::new(b, 0.0) + disc * sign);
    if q.norm() == 0.0 {
        return vec![Complex64::new(0.0, 0.0); 2];
    }
    vec![q / a, Complex64::new(c, 0.0) / q]
}

/// Real roots (snapped and Newton-polished) sorted ascending.
pub fn real_roots(c3: f64, c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    let poly = |x: f64| ((c3 * x + c2) * x + c1) * x + c0;
    let slope = |x: f64| (3.0 * c3 * x + 2.0 * c2) * x + c1;
    let mut out: Vec<f64> = complex_roots(c3, c2, c1, c0)
        .into_iter()
        .filter(|z| z.im.abs() < SNAP * (1.0 + z.re.abs()))
        .map(|z| {
            let mut x = z.re;
            for _ in 0..4 {
                let dp = slope(x);
                if dp == 0.0 {
                    break;
                }
                let next = x - poly(x) / dp;
                if !next.is_finite() || poly(next).abs() >= poly(x).abs() {
                    break;
                }
                x = next;
            }
            x
        })
        .collect();
    out.sort_by(|a, b| a.total_cmp(b));
    out
}
