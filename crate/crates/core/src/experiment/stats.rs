//! Two-sample and paired t-tests with two-tailed p-values.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TTest {
    pub t: f64,
    pub df: f64,
    pub p: f64,
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let ss = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    (mean, ss / (n - 1.0))
}

fn check(name: &str, xs: &[f64]) -> Result<()> {
    if xs.len() < 2 {
        return Err(Error::Statistics(format!("{name} needs at least two values")));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::Statistics(format!("{name} has a non-finite value")));
    }
    Ok(())
}

fn finish(diff: f64, se2: f64, df: f64) -> Result<TTest> {
    if se2 == 0.0 {
        if diff == 0.0 {
            return Ok(TTest { t: 0.0, df, p: 1.0 });
        }
        return Err(Error::Statistics("zero variance with a nonzero mean difference".into()));
    }
    let t = diff / se2.sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::Statistics(e.to_string()))?;
    let p = (2.0 * dist.sf(t.abs())).min(1.0);
    Ok(TTest { t, df, p })
}

/// Independent samples, pooled variance.
pub fn student_t_test(a: &[f64], b: &[f64]) -> Result<TTest> {
    check("sample a", a)?;
    check("sample b", b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let ((ma, va), (mb, vb)) = (mean_var(a), mean_var(b));
    let df = na + nb - 2.0;
    let pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / df;
    finish(ma - mb, pooled * (1.0 / na + 1.0 / nb), df)
}

/// Independent samples, unequal variances, Welch–Satterthwaite df.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<TTest> {
    check("sample a", a)?;
    check("sample b", b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let ((ma, va), (mb, vb)) = (mean_var(a), mean_var(b));
    let (qa, qb) = (va / na, vb / nb);
    let se2 = qa + qb;
    let df = if se2 == 0.0 {
        na + nb - 2.0
    } else {
        se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0))
    };
    finish(ma - mb, se2, df)
}

/// Repeated measures on the differences `a[i] - b[i]`.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTest> {
    if a.len() != b.len() {
        return Err(Error::Statistics(format!(
            "paired samples differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    check("differences", &diffs)?;
    let n = diffs.len() as f64;
    let (m, v) = mean_var(&diffs);
    finish(m, v / n, n - 1.0)
}

/// Paired test when `paired`, otherwise the pooled-variance independent test.
pub fn t_test(a: &[f64], b: &[f64], paired: bool) -> Result<TTest> {
    if paired {
        paired_t_test(a, b)
    } else {
        student_t_test(a, b)
    }
}
