//! Star-QAM mother constellation.
//!
//! The constellation is a real 2×M matrix. With `ω_i = (i-1)(ω-1) + 1`,
//! the first row walks `ω_{M/2} … ω_1, -ω_1 … -ω_{M/2}` and the second row
//! is `-ω_1, ω_2 … ω_{M/2}, -ω_{M/2} … -ω_2, ω_1`. Column `m` and column
//! `M-1-m` (0-based) are antipodal.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotherConstellation {
    order: usize,
    omega: f64,
    rows: [Vec<f64>; 2],
}

pub(crate) fn check_domain(order: usize, omega: f64) -> Result<()> {
    if order < 4 || !order.is_power_of_two() {
        return Err(Error::InvalidOrder(order));
    }
    if !omega.is_finite() || omega <= 1.0 {
        return Err(Error::InvalidOmega(omega));
    }
    Ok(())
}

/// `ω_i` for the 1-based amplitude index `i`.
fn amplitude(i: usize, omega: f64) -> f64 {
    (i as f64 - 1.0) * (omega - 1.0) + 1.0
}

impl MotherConstellation {
    pub fn new(order: usize, omega: f64) -> Result<Self> {
        check_domain(order, omega)?;
        let half = order / 2;
        let w = |i| amplitude(i, omega);

        let mut top = Vec::with_capacity(order);
        top.extend((1..=half).rev().map(w));
        top.extend((1..=half).map(|i| -w(i)));

        let mut bottom = Vec::with_capacity(order);
        bottom.push(-w(1));
        bottom.extend((2..=half).map(w));
        bottom.push(-w(half));
        bottom.extend((2..half).rev().map(|i| -w(i)));
        bottom.push(w(1));

        Ok(Self {
            order,
            omega,
            rows: [top, bottom],
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn rows(&self) -> &[Vec<f64>; 2] {
        &self.rows
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.rows[r]
    }

    /// Column `m` (0-based) as the pair `(row0, row1)`.
    pub fn column(&self, m: usize) -> [f64; 2] {
        [self.rows[0][m], self.rows[1][m]]
    }

    /// Per-dimension energy, closed form.
    pub fn dimension_energy(&self) -> f64 {
        energy_closed_form(self.order, self.omega)
    }

    /// Minimum product distance by direct enumeration of all column pairs.
    pub fn mpd_brute_force(&self) -> f64 {
        let m = self.order;
        let mut best = f64::INFINITY;
        for p in 0..m {
            for q in p + 1..m {
                let product: f64 = self
                    .rows
                    .iter()
                    .map(|row| (row[p] - row[q]).abs())
                    .filter(|d| *d != 0.0)
                    .product();
                best = best.min(product);
            }
        }
        best
    }
}

fn energy_closed_form(order: usize, omega: f64) -> f64 {
    let m = order as f64;
    let t = omega - 1.0;
    m * (m - 1.0) * (m - 2.0) * t * t / 12.0 + m * (m - 2.0) * t / 2.0 + m
}

/// Energy `E(M, ω)` carried by each row of the mother constellation.
pub fn dimension_energy(order: usize, omega: f64) -> Result<f64> {
    check_domain(order, omega)?;
    Ok(energy_closed_form(order, omega))
}

/// Which piece of the three-branch MPD expression applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MpdBranch {
    /// `4(ω-1)²`
    Close,
    /// `ω² - 1`
    Middle,
    /// `(2M-4)(ω-1) + 4`
    Far,
}

pub fn mpd_branch(order: usize, omega: f64) -> MpdBranch {
    let m = order as f64;
    let first = if order > 4 { 1.0 + 5.0 / 3.0 } else { 1.0 };
    let second = m - 2.0 + ((m - 3.0).powi(2) + 4.0).sqrt();
    if omega <= first {
        MpdBranch::Close
    } else if omega <= second {
        MpdBranch::Middle
    } else {
        MpdBranch::Far
    }
}

/// Piecewise closed-form MPD of the mother constellation, evaluated exactly
/// as published. Only oracle-verified for `M = 4`; for larger orders the
/// brute-force value is smaller (see [`MotherConstellation::mpd_brute_force`]).
pub fn mpd_closed_form(order: usize, omega: f64) -> Result<f64> {
    check_domain(order, omega)?;
    let m = order as f64;
    Ok(match mpd_branch(order, omega) {
        MpdBranch::Close => 4.0 * (omega - 1.0).powi(2),
        MpdBranch::Middle => omega * omega - 1.0,
        MpdBranch::Far => (2.0 * m - 4.0) * (omega - 1.0) + 4.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn m4_omega2_rows() {
        let mc = MotherConstellation::new(4, 2.0).unwrap();
        assert_eq!(mc.rows()[0], vec![2.0, 1.0, -1.0, -2.0]);
        assert_eq!(mc.rows()[1], vec![-1.0, 2.0, -2.0, 1.0]);
    }

    #[test]
    fn m8_omega2_first_row() {
        let mc = MotherConstellation::new(8, 2.0).unwrap();
        assert_eq!(mc.row(0), &[4.0, 3.0, 2.0, 1.0, -1.0, -2.0, -3.0, -4.0]);
        assert_eq!(mc.row(1), &[-1.0, 2.0, 3.0, 4.0, -4.0, -3.0, -2.0, 1.0]);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(MotherConstellation::new(4, 1.0), Err(Error::InvalidOmega(_))));
        assert!(matches!(MotherConstellation::new(4, f64::NAN), Err(Error::InvalidOmega(_))));
        assert!(matches!(MotherConstellation::new(6, 2.0), Err(Error::InvalidOrder(6))));
        assert!(matches!(MotherConstellation::new(2, 2.0), Err(Error::InvalidOrder(2))));
        assert!(dimension_energy(12, 2.0).is_err());
        assert!(mpd_closed_form(4, 0.5).is_err());
    }

    #[test]
    fn energy_examples() {
        assert_relative_eq!(dimension_energy(4, 2.0).unwrap(), 10.0);
        assert_relative_eq!(dimension_energy(16, 2.0).unwrap(), 408.0);
        assert!((dimension_energy(4, 3.4756).unwrap() - 26.158).abs() < 0.01);
    }

    #[test]
    fn closed_form_examples() {
        assert!((mpd_closed_form(4, 3.4756).unwrap() - 11.080).abs() < 0.01);
        assert_relative_eq!(mpd_closed_form(4, 5.0).unwrap(), 20.0);
        assert_relative_eq!(mpd_closed_form(16, 1.5).unwrap(), 1.0);
        assert_eq!(mpd_branch(4, 3.4756), MpdBranch::Middle);
        assert_eq!(mpd_branch(4, 5.0), MpdBranch::Far);
        assert_eq!(mpd_branch(16, 1.5), MpdBranch::Close);
    }

    #[test]
    fn brute_force_examples() {
        let mc = MotherConstellation::new(4, 3.4756).unwrap();
        assert!((mc.mpd_brute_force() - 11.080).abs() < 0.01);
        let mc = MotherConstellation::new(4, 2.0).unwrap();
        assert_relative_eq!(mc.mpd_brute_force(), 3.0);
    }

    #[test]
    fn m4_closed_form_is_continuous_and_increasing() {
        let mut prev = 0.0;
        for i in 1..=2000 {
            let omega = 1.0 + i as f64 * 0.005;
            let v = mpd_closed_form(4, omega).unwrap();
            assert!(v > prev, "not increasing at omega = {omega}");
            prev = v;
        }
        let boundary = 2.0 + 5f64.sqrt();
        assert_relative_eq!(boundary * boundary - 1.0, 4.0 * boundary, max_relative = 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn rows_carry_closed_form_energy(log_m in 2u32..7, omega in 1.0001f64..12.0) {
                let order = 1usize << log_m;
                let mc = MotherConstellation::new(order, omega).unwrap();
                let e = mc.dimension_energy();
                for row in mc.rows() {
                    let s: f64 = row.iter().map(|x| x * x).sum();
                    prop_assert!((s - e).abs() <= 1e-9 * e);
                }
            }

            #[test]
            fn columns_are_antipodal(log_m in 2u32..7, omega in 1.0001f64..12.0) {
                let order = 1usize << log_m;
                let mc = MotherConstellation::new(order, omega).unwrap();
                for m in 0..order {
                    let a = mc.column(m);
                    let b = mc.column(order - 1 - m);
                    prop_assert_eq!(a[0], -b[0]);
                    prop_assert_eq!(a[1], -b[1]);
                }
            }
        }
    }
}
