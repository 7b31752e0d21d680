use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Savitzky-Golay window and polynomial order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SgFilterSpec {
    pub window_length: usize,
    pub poly_order: usize,
}

impl Default for SgFilterSpec {
    fn default() -> Self {
        SgFilterSpec {
            window_length: 11,
            poly_order: 3,
        }
    }
}

impl SgFilterSpec {
    pub fn new(window_length: usize, poly_order: usize) -> Result<Self> {
        let spec = SgFilterSpec {
            window_length,
            poly_order,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.window_length < 3 || self.window_length.is_multiple_of(2) {
            return Err(Error::Input(format!(
                "SG window length must be odd and >= 3, got {}",
                self.window_length
            )));
        }
        if self.poly_order >= self.window_length {
            return Err(Error::Input(format!(
                "SG polynomial order {} must be below window length {}",
                self.poly_order, self.window_length
            )));
        }
        Ok(())
    }

    pub fn half_window(&self) -> usize {
        self.window_length / 2
    }
}

/// Smoothing weights for the window centre: the value at offset 0 of the
/// least-squares polynomial fitted over offsets `-m..=m`.
///
/// Offsets are scaled to `[-1, 1]` before forming the normal equations,
/// which keeps them well conditioned for every practical window.
pub fn sg_coefficients(spec: SgFilterSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let m = spec.half_window() as i64;
    let terms = spec.poly_order + 1;
    let scale = m as f64;
    let offsets: Vec<f64> = (-m..=m).map(|j| j as f64 / scale).collect();

    // Gram matrix G[a][b] = sum_j u_j^(a+b).
    let mut power_sums = vec![0.0; 2 * terms - 1];
    for &u in &offsets {
        let mut p = 1.0;
        for s in power_sums.iter_mut() {
            *s += p;
            p *= u;
        }
    }
    let mut gram: Vec<Vec<f64>> = (0..terms)
        .map(|a| (0..terms).map(|b| power_sums[a + b]).collect())
        .collect();

    // Row 0 of G^-1 is the solution of G x = e0 (G is symmetric).
    let mut rhs = vec![0.0; terms];
    rhs[0] = 1.0;
    let row0 = solve_in_place(&mut gram, &mut rhs)?;

    Ok(offsets
        .iter()
        .map(|&u| {
            let mut p = 1.0;
            let mut w = 0.0;
            for c in &row0 {
                w += c * p;
                p *= u;
            }
            w
        })
        .collect())
}

/// Gaussian elimination with partial pivoting.
fn solve_in_place(a: &mut [Vec<f64>], b: &mut [f64]) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty range");
        if a[pivot][col].abs() < 1e-13 {
            return Err(Error::Domain("singular SG normal equations".into()));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            let (upper, lower) = a.split_at_mut(row);
            for (dst, src) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *dst -= factor * src;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Ok(x)
}

/// Centered Savitzky-Golay convolution. Samples beyond either end are
/// mirrored about the end sample (`x[-i] = x[i]`).
pub fn sg_smooth(signal: &[f64], spec: SgFilterSpec) -> Result<Vec<f64>> {
    let weights = sg_coefficients(spec)?;
    let n = signal.len();
    if n < spec.window_length {
        return Err(Error::Input(format!(
            "signal of {n} samples is shorter than the SG window {}",
            spec.window_length
        )));
    }
    let m = spec.half_window() as isize;
    let last = n as isize - 1;
    let at = |i: isize| -> f64 {
        let j = if i < 0 {
            -i
        } else if i > last {
            2 * last - i
        } else {
            i
        };
        signal[j as usize]
    };

    Ok((0..n as isize)
        .map(|i| {
            weights
                .iter()
                .enumerate()
                .map(|(k, w)| w * at(i + k as isize - m))
                .sum()
        })
        .collect())
}
