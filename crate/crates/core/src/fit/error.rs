use num_complex::Complex64;

use crate::bases::{Approximant, BasisError};

/// Signed error `g(z) − f(z)` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorPoint {
    pub z: Complex64,
    pub err: Complex64,
}

/// `g − f` at every grid point.
pub fn error_curve(
    approx: &Approximant,
    target: impl Fn(Complex64) -> Complex64,
    grid: &[Complex64],
) -> Result<Vec<ErrorPoint>, BasisError> {
    let g = approx.evaluate(grid)?;
    Ok(grid
        .iter()
        .zip(g)
        .map(|(&z, gz)| ErrorPoint { z, err: gz - target(z) })
        .collect())
}

/// Max `|g − f|` over the grid and where it is attained.
pub fn max_error(
    approx: &Approximant,
    target: impl Fn(Complex64) -> Complex64,
    grid: &[Complex64],
) -> Result<(f64, Complex64), BasisError> {
    let curve = error_curve(approx, target, grid)?;
    Ok(curve
        .iter()
        .map(|p| (p.err.norm(), p.z))
        .fold((0.0, Complex64::new(f64::NAN, f64::NAN)), |best, cur| {
            if cur.0 > best.0 || best.1.is_nan() {
                cur
            } else {
                best
            }
        }))
}

/// Sign changes along a real sequence, skipping entries with
/// `|v| ≤ tol·max|v|` so rounding noise near zeros is not counted.
pub fn sign_alternations(values: &[f64], tol: f64) -> usize {
    let cut = tol * values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut last = 0.0f64;
    let mut count = 0;
    for &v in values.iter().filter(|v| v.abs() > cut) {
        if last != 0.0 && v.signum() != last.signum() {
            count += 1;
        }
        last = v;
    }
    count
}

/// CSV with header `re_z,im_z,re_err,im_err,abs_err`.
pub fn write_error_curve_csv<W: std::io::Write>(curve: &[ErrorPoint], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["re_z", "im_z", "re_err", "im_err", "abs_err"])?;
    for p in curve {
        w.serialize((p.z.re, p.z.im, p.err.re, p.err.im, p.err.norm()))?;
    }
    w.flush()?;
    Ok(())
}
