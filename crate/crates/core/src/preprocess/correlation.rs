use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Named numeric columns of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl FeatureTable {
    pub fn new(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::Input(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        if let Some(first) = columns.first() {
            if columns.iter().any(|c| c.len() != first.len()) {
                return Err(Error::Input("columns differ in length".into()));
            }
        }
        Ok(FeatureTable { names, columns })
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }
}

/// Symmetric matrix of Pearson coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub feature_names: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.index_of(a)?;
        let j = self.index_of(b)?;
        Some(self.values[i][j])
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|n| n == name)
    }
}

/// Pearson correlation of every column pair. A constant column correlates
/// 0 with everything but itself.
pub fn correlation_matrix(table: &FeatureTable) -> Result<CorrelationMatrix> {
    let rows = table.rows();
    if rows < 2 {
        return Err(Error::Input(format!(
            "correlation needs at least 2 rows, got {rows}"
        )));
    }
    let centered: Vec<Vec<f64>> = table
        .columns
        .iter()
        .map(|c| {
            let mean = c.iter().sum::<f64>() / rows as f64;
            c.iter().map(|v| v - mean).collect()
        })
        .collect();
    let norms: Vec<f64> = centered
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();

    let k = centered.len();
    let mut values = vec![vec![0.0; k]; k];
    for i in 0..k {
        values[i][i] = 1.0;
        for j in i + 1..k {
            let r = if norms[i] > 0.0 && norms[j] > 0.0 {
                let dot: f64 = centered[i]
                    .iter()
                    .zip(&centered[j])
                    .map(|(a, b)| a * b)
                    .sum();
                (dot / (norms[i] * norms[j])).clamp(-1.0, 1.0)
            } else {
                0.0
            };
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    Ok(CorrelationMatrix {
        feature_names: table.names.clone(),
        values,
    })
}

/// Features other than `target`, by absolute correlation with it, strongest
/// first. Ties keep column order.
pub fn feature_rank(matrix: &CorrelationMatrix, target: &str) -> Result<Vec<(String, f64)>> {
    let t = matrix
        .index_of(target)
        .ok_or_else(|| Error::Input(format!("unknown target feature {target:?}")))?;
    let mut ranked: Vec<(String, f64)> = matrix
        .feature_names
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != t)
        .map(|(i, name)| (name.clone(), matrix.values[t][i].abs()))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
    Ok(ranked)
}
