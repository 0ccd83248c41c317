//! Safeguarded scalar root finding.

use crate::{Error, Result};

/// Solve g(x) = target for a strictly increasing g on [lo, hi].
///
/// Newton steps using `dg` with bisection fallback whenever an iterate
/// leaves the current bracket. Converges when the residual drops below
/// `tol` or the bracket collapses.
pub fn solve_increasing<G, DG>(g: G, dg: DG, lo: f64, hi: f64, target: f64, tol: f64) -> Result<f64>
where
    G: Fn(f64) -> f64,
    DG: Fn(f64) -> f64,
{
    let mut a = lo;
    let mut b = hi;
    let fa = g(a) - target;
    let fb = g(b) - target;
    if fa > tol {
        return Err(Error::OutOfRange(format!(
            "target {target:.6e} below bracket value {:.6e}",
            fa + target
        )));
    }
    if fb < -tol {
        return Err(Error::OutOfRange(format!(
            "target {target:.6e} above bracket value {:.6e}",
            fb + target
        )));
    }
    if fa.abs() <= tol {
        return Ok(a);
    }
    if fb.abs() <= tol {
        return Ok(b);
    }

    let mut x = 0.5 * (a + b);
    for _ in 0..200 {
        let fx = g(x) - target;
        if fx.abs() <= tol {
            return Ok(x);
        }
        if fx > 0.0 {
            b = x;
        } else {
            a = x;
        }
        let d = dg(x);
        let mut next = if d > 0.0 { x - fx / d } else { f64::NAN };
        if !next.is_finite() || next <= a || next >= b {
            next = 0.5 * (a + b);
        }
        if (b - a).abs() < 1e-16 * (1.0 + x.abs()) {
            return Ok(0.5 * (a + b));
        }
        x = next;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_root() {
        let x = solve_increasing(|t| t * t * t, |t| 3.0 * t * t, 0.0, 3.0, 8.0, 1e-13).unwrap();
        assert!((x - 2.0).abs() < 1e-10);
    }

    #[test]
    fn out_of_range_rejected() {
        let r = solve_increasing(|t| t, |_| 1.0, 0.0, 1.0, 2.0, 1e-12);
        assert!(matches!(r, Err(Error::OutOfRange(_))));
    }
}
