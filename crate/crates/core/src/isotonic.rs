//! Least-squares isotonic regression by pool adjacent violators.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
struct Block {
    sum: f64,
    len: usize,
}

impl Block {
    fn mean(&self) -> f64 {
        self.sum / self.len as f64
    }
}

/// Reusable PAVA state; avoids reallocating the block stack in hot loops.
#[derive(Debug, Default, Clone)]
pub struct Pava {
    blocks: Vec<Block>,
}

impl Pava {
    pub fn new() -> Self {
        Self::default()
    }

    /// Writes the non-decreasing least-squares fit of `values` into `fitted`.
    pub fn fit_into(&mut self, values: &[f64], fitted: &mut Vec<f64>) {
        self.blocks.clear();
        for &v in values {
            let mut block = Block { sum: v, len: 1 };
            // Merge backwards while the new block's mean undercuts its
            // predecessor. Compare by cross-multiplication to avoid division.
            while let Some(prev) = self.blocks.last() {
                if prev.sum * block.len as f64 > block.sum * prev.len as f64 {
                    block.sum += prev.sum;
                    block.len += prev.len;
                    self.blocks.pop();
                } else {
                    break;
                }
            }
            self.blocks.push(block);
        }
        fitted.clear();
        for b in &self.blocks {
            let mean = b.mean();
            fitted.extend(std::iter::repeat_n(mean, b.len));
        }
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }
}

/// Fitted values of an isotonic regression, aligned with the input order.
#[derive(Debug, Clone, PartialEq)]
pub struct Disparities {
    pub dhat: Vec<f64>,
}

impl Disparities {
    pub fn squared_error(&self, values: &[f64]) -> f64 {
        values
            .iter()
            .zip(&self.dhat)
            .map(|(v, d)| (v - d) * (v - d))
            .sum()
    }
}

/// Non-decreasing least-squares fit to `values`, taken in the given order.
pub fn isotonic_fit(values: &[f64]) -> Result<Disparities> {
    if values.is_empty() {
        return Err(Error::EmptyRegression);
    }
    let mut dhat = Vec::with_capacity(values.len());
    Pava::new().fit_into(values, &mut dhat);
    Ok(Disparities { dhat })
}
