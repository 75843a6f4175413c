use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::FitError;

/// Errors below this are on the rounding plateau and excluded from rate fits.
pub const RATE_FLOOR: f64 = 1e-11;

/// One row of a convergence sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    #[serde(rename = "N")]
    pub dof: usize,
    pub max_err: f64,
    pub boundary_err: f64,
    pub runtime_ms: f64,
}

/// Least-squares line `y ≈ slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub correlation: f64,
}

/// Pearson correlation; `NaN` for fewer than two points or zero variance.
pub fn correlation(x: &[f64], y: &[f64]) -> f64 {
    linear_fit(x, y).map_or(f64::NAN, |f| f.correlation)
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    let n = x.len().min(y.len());
    if n < 2 {
        return None;
    }
    let mx = x[..n].iter().sum::<f64>() / n as f64;
    let my = y[..n].iter().sum::<f64>() / n as f64;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let correlation = if syy == 0.0 { f64::NAN } else { sxy / (sxx * syy).sqrt() };
    Some(LinearFit {
        slope,
        intercept: my - slope * mx,
        correlation,
    })
}

/// Errors against degrees of freedom, with fitted exponential rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub entries: Vec<SweepEntry>,
    /// Slope of `ln(max_err)` against `N`.
    pub rate: Option<LinearFit>,
    /// Slope of `ln(max_err)` against `N/ln N`.
    pub rate_near: Option<LinearFit>,
}

impl ConvergenceReport {
    pub fn from_entries(entries: Vec<SweepEntry>) -> Self {
        let mut r = Self {
            entries,
            rate: None,
            rate_near: None,
        };
        r.rate = r.fit_against(|n| n);
        r.rate_near = r.fit_against(|n| n / n.ln());
        r
    }

    /// Entries above the rounding plateau.
    pub fn pre_plateau(&self) -> impl Iterator<Item = &SweepEntry> {
        self.entries.iter().filter(|e| e.max_err > RATE_FLOOR)
    }

    /// Line through `(x(N), ln max_err)` over pre-plateau entries.
    pub fn fit_against(&self, x: impl Fn(f64) -> f64) -> Option<LinearFit> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = self
            .pre_plateau()
            .map(|e| (x(e.dof as f64), e.max_err.ln()))
            .unzip();
        linear_fit(&xs, &ys)
    }

    /// CSV with header `N,max_err,boundary_err,runtime_ms`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for e in &self.entries {
            w.serialize(e)?;
        }
        if self.entries.is_empty() {
            w.write_record(["N", "max_err", "boundary_err", "runtime_ms"])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs `run(n)` for each `n` (concurrently) and collects the rows in the
/// order of `n_values`, which must be strictly increasing.
pub fn convergence_sweep<F>(n_values: &[usize], run: F) -> Result<ConvergenceReport, FitError>
where
    F: Fn(usize) -> Result<SweepEntry, FitError> + Sync,
{
    if n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FitError::Invalid(format!("sweep values must increase: {n_values:?}")));
    }
    let entries = n_values
        .par_iter()
        .map(|&n| {
            let t = std::time::Instant::now();
            run(n).map(|mut e| {
                if e.runtime_ms == 0.0 {
                    e.runtime_ms = t.elapsed().as_secs_f64() * 1e3;
                }
                e
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ConvergenceReport::from_entries(entries))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_fit_exact_line() {
        let x = [1.0, 2.0, 3.0];
        let y = [1.0, -1.0, -3.0];
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-15);
        assert!((f.intercept - 3.0).abs() < 1e-15);
        assert!((f.correlation + 1.0).abs() < 1e-15);
        assert!(linear_fit(&[1.0], &[1.0]).is_none());
    }

    #[test]
    fn sweep_rates_and_plateau() {
        let r = convergence_sweep(&[2, 4, 6, 8, 10], |n| {
            let e = if n == 10 { 1e-14 } else { (-(n as f64)).exp() };
            Ok(SweepEntry {
                dof: n,
                max_err: e,
                boundary_err: e,
                runtime_ms: 1.0,
            })
        })
        .unwrap();
        assert_eq!(r.entries.iter().map(|e| e.dof).collect::<Vec<_>>(), [2, 4, 6, 8, 10]);
        assert_eq!(r.pre_plateau().count(), 4);
        assert!((r.rate.unwrap().slope + 1.0).abs() < 1e-12);
        assert!(convergence_sweep(&[3, 3], |_| unreachable!()).is_err());
    }

    #[test]
    fn report_csv_header() {
        let r = ConvergenceReport::from_entries(vec![SweepEntry {
            dof: 11,
            max_err: 1e-4,
            boundary_err: 2e-4,
            runtime_ms: 3.5,
        }]);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("N,max_err,boundary_err,runtime_ms\n11,"));
        let mut buf = Vec::new();
        ConvergenceReport::from_entries(vec![]).write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "N,max_err,boundary_err,runtime_ms\n");
    }
}
