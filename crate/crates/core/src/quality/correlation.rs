//! Pearson correlation between metric columns.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pearson's r, or `None` when either column has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len(), "columns must have equal length");
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Correlation output: `{"metrics": [names], "pearson": [[...]]}`, with
/// `null` where a column has zero variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub metrics: Vec<String>,
    pub pearson: Vec<Vec<Option<f64>>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.metrics.iter().position(|m| m == a)?;
        let j = self.metrics.iter().position(|m| m == b)?;
        self.pearson[i][j]
    }
}

pub fn correlation_matrix(names: &[&str], columns: &[Vec<f64>]) -> Result<CorrelationMatrix> {
    assert_eq!(names.len(), columns.len());
    let rows = columns.first().map_or(0, Vec::len);
    if rows < 3 {
        return Err(Error::Statistics(format!("need at least 3 rows, got {rows}")));
    }
    if columns.iter().any(|c| c.len() != rows) {
        return Err(Error::Statistics("columns differ in length".into()));
    }
    let k = columns.len();
    let mut pearson_m = vec![vec![None; k]; k];
    for i in 0..k {
        for j in i..k {
            let r = if i == j {
                pearson(&columns[i], &columns[i]).map(|_| 1.0)
            } else {
                pearson(&columns[i], &columns[j])
            };
            pearson_m[i][j] = r;
            pearson_m[j][i] = r;
        }
    }
    Ok(CorrelationMatrix {
        metrics: names.iter().map(|s| s.to_string()).collect(),
        pearson: pearson_m,
    })
}
