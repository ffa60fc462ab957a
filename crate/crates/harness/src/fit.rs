//! Power-law fits in log-log space.

use std::path::Path;

use crate::error::{HarnessError, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute deviation of `ln y` from the fitted line.
    pub residual: f64,
    pub points: usize,
}

/// Least-squares line through `(ln x, ln y)`.
pub fn fit_exponent(points: &[(f64, f64)]) -> Result<Fit> {
    if points.len() < 3 {
        return Err(HarnessError::InsufficientData { points: points.len() });
    }
    if let Some(&v) = points.iter().flat_map(|(x, y)| [x, y]).find(|v| v.is_nan() || **v <= 0.0) {
        return Err(HarnessError::NonPositiveValue { value: v });
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(HarnessError::InsufficientData { points: 1 });
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = logs.iter().map(|p| (p.1 - intercept - slope * p.0).abs()).fold(0.0, f64::max);
    Ok(Fit { slope, intercept, residual, points: points.len() })
}

/// Fit two numeric columns of a sweep CSV. `filters` are `column=value`
/// pairs a row must match; rows with an error are skipped.
pub fn fit_csv(path: &Path, x: &str, y: &str, filters: &[(String, String)]) -> Result<Fit> {
    let mut rdr = csv::Reader::from_path(path)?;
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| HarnessError::usage(format!("no column {name:?}")))
    };
    let (xi, yi) = (col(x)?, col(y)?);
    let error_col = headers.iter().position(|h| h == "error");
    let filters = filters.iter().map(|(k, v)| Ok((col(k)?, v.as_str()))).collect::<Result<Vec<_>>>()?;
    let mut points = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if error_col.is_some_and(|i| !rec[i].is_empty()) || filters.iter().any(|&(i, v)| &rec[i] != v) {
            continue;
        }
        let num = |i: usize| {
            rec[i].parse::<f64>().map_err(|_| HarnessError::usage(format!("non-numeric value {:?}", &rec[i])))
        };
        points.push((num(xi)?, num(yi)?));
    }
    fit_exponent(&points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws() {
        let sq: Vec<(f64, f64)> = [16.0, 64.0, 256.0].iter().map(|&n: &f64| (n, n * n)).collect();
        let f = fit_exponent(&sq).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-9);
        assert!(f.residual < 1e-9);
        let p: Vec<(f64, f64)> = [16.0, 64.0, 256.0, 1024.0].iter().map(|&n: &f64| (n, 3.0 * n.powf(1.5))).collect();
        let f = fit_exponent(&p).unwrap();
        assert!((f.slope - 1.5).abs() < 1e-9);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn residual_is_max_deviation() {
        // ln y = 0, 1, 0 at ln x = 0, 1, 2: slope 0, intercept 1/3.
        let e = std::f64::consts::E;
        let f = fit_exponent(&[(1.0, 1.0), (e, e), (e * e, 1.0)]).unwrap();
        assert!(f.slope.abs() < 1e-12);
        assert!((f.residual - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!(fit_exponent(&[(1.0, 1.0), (2.0, 2.0)]), Err(HarnessError::InsufficientData { points: 2 })));
        assert!(matches!(
            fit_exponent(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]),
            Err(HarnessError::NonPositiveValue { value }) if value == 0.0
        ));
        assert!(fit_exponent(&[(1.0, 1.0), (2.0, -1.0), (3.0, 1.0)]).is_err());
        assert!(fit_exponent(&[(2.0, 1.0), (2.0, 2.0), (2.0, 3.0)]).is_err());
    }
}
