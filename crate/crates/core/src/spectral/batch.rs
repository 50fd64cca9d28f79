use super::Matrix;
use crate::error::{Error, Result};

/// `n × d` batch of representation vectors, one row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingBatch {
    data: Matrix,
}

impl EmbeddingBatch {
    /// Requires at least two rows, at least one column and finite entries.
    pub fn new(data: Matrix) -> Result<Self> {
        if data.rows() < 2 {
            return Err(Error::InvalidInput(format!(
                "a batch needs at least 2 rows, got {}",
                data.rows()
            )));
        }
        if data.cols() == 0 {
            return Err(Error::InvalidInput("a batch needs at least 1 column".into()));
        }
        if let Some((row, col)) = data.first_non_finite() {
            return Err(Error::NonFinite { row, col });
        }
        Ok(Self { data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn n(&self) -> usize {
        self.data.rows()
    }

    pub fn d(&self) -> usize {
        self.data.cols()
    }

    pub fn row(&self, b: usize) -> &[f64] {
        self.data.row(b)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.data
    }

    pub fn into_matrix(self) -> Matrix {
        self.data
    }

    pub fn column_means(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.d()];
        for b in 0..self.n() {
            for (m, z) in mean.iter_mut().zip(self.row(b)) {
                *m += z;
            }
        }
        let scale = 1.0 / self.n() as f64;
        mean.iter_mut().for_each(|m| *m *= scale);
        mean
    }

    /// Copy with each column shifted to zero batch mean.
    pub fn centered(&self) -> Matrix {
        let mean = self.column_means();
        let mut out = self.data.clone();
        for b in 0..out.rows() {
            for (z, m) in out.row_mut(b).iter_mut().zip(&mean) {
                *z -= m;
            }
        }
        out
    }
}
