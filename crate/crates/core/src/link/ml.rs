//! Exhaustive maximum-likelihood detection over all `M^J` index tuples.

use num_complex::Complex64;

use super::check_received;
use crate::codebook::{CodebookSet, PointCloud, DEFAULT_ENUMERATION_CAP};
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct MlDecoder {
    cloud: PointCloud,
    users: usize,
    order: usize,
}

impl MlDecoder {
    /// Fails with `BudgetExceeded` when `M^J` is not below `cap`.
    pub fn new(set: &CodebookSet, cap: u64) -> Result<Self> {
        Ok(Self {
            cloud: set.point_cloud(cap)?,
            users: set.dims().users,
            order: set.dims().order,
        })
    }

    /// Flat index of the closest faded codeword; the lowest index wins ties.
    pub fn decode_flat(&self, y: &[Complex64], h: &[Complex64]) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (n, p) in self.cloud.coords().chunks_exact(self.cloud.stride()).enumerate() {
            let mut d = 0.0;
            for k in 0..y.len() {
                let x = Complex64::new(p[2 * k], p[2 * k + 1]);
                d += (y[k] - h[k] * x).norm_sqr();
                if d >= best.0 {
                    break;
                }
            }
            if d < best.0 {
                best = (d, n);
            }
        }
        best.1
    }

    pub fn decode(&self, y: &[Complex64], h: &[Complex64]) -> Vec<usize> {
        let mut n = self.decode_flat(y, h);
        let mut out = vec![0; self.users];
        for slot in out.iter_mut().rev() {
            *slot = n % self.order;
            n /= self.order;
        }
        out
    }
}

pub fn ml_decode(y: &[Complex64], h: &[Complex64], set: &CodebookSet, sigma2: f64) -> Result<Vec<usize>> {
    check_received(set, y, h, sigma2)?;
    Ok(MlDecoder::new(set, DEFAULT_ENUMERATION_CAP)?.decode(y, h))
}
