//! Golden-section search on a bracketed unimodal function.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, PartialEq)]
pub struct GoldenOutcome {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
    /// Bracket width after each iteration, starting with the initial width.
    pub bracket_widths: Vec<f64>,
}

impl GoldenOutcome {
    pub fn final_width(&self) -> f64 {
        *self.bracket_widths.last().unwrap_or(&0.0)
    }
}

/// Minimizes `f` on `[lo, hi]` until the bracket is narrower than `tol`.
pub fn golden_min<F>(mut f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> Result<GoldenOutcome>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut widths = vec![b - a];
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while b - a > tol {
        if iterations >= max_iter {
            return Err(Error::NoConvergence { iterations });
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        widths.push(b - a);
        iterations += 1;
    }
    let (x, value) = if fc <= fd { (c, fc) } else { (d, fd) };
    Ok(GoldenOutcome {
        x,
        value,
        iterations,
        bracket_widths: widths,
    })
}

/// Maximizing counterpart of [`golden_min`]; `value` holds the maximum.
pub fn golden_max<F>(mut f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> Result<GoldenOutcome>
where
    F: FnMut(f64) -> f64,
{
    let mut out = golden_min(|x| -f(x), lo, hi, tol, max_iter)?;
    out.value = -out.value;
    Ok(out)
}
