//! Truncated transition matrices of the BGW chain.

use nalgebra::DMatrix;

use crate::mechanism::Mechanism;
use crate::series::PowerSeries;

/// `P(i, j) = [z^j] phi(z)^i` on states `0..size`.
pub fn truncated_kernel(mech: &Mechanism, size: usize) -> DMatrix<f64> {
    let phi = PowerSeries::new(mech.coefficients(size - 1));
    let mut m = DMatrix::zeros(size, size);
    m[(0, 0)] = 1.0;
    let mut pw = PowerSeries::constant(1.0, size - 1);
    for i in 1..size {
        pw = pw.mul(&phi);
        for j in 0..size {
            m[(i, j)] = pw.coeff(j);
        }
    }
    m
}

pub fn matrix_power(m: &DMatrix<f64>, n: u32) -> DMatrix<f64> {
    let mut out = DMatrix::identity(m.nrows(), m.ncols());
    for _ in 0..n {
        out = &out * m;
    }
    out
}
