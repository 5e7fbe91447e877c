//! Truncated power series: products, composition and Lagrange inversion of
//! `Phi = z phi(Phi)`.

use bgwlf::series::{lagrange_progeny, PowerSeries};
use bgwlf::Mechanism;

fn main() {
    let order = 8;
    let mech = Mechanism::lf(0.3, 0.4).unwrap();
    let phi = PowerSeries::new(mech.coefficients(order));
    println!("phi          {:?}", &phi.coeffs()[..5]);
    println!("phi^2        {:?}", &phi.pow(2).coeffs()[..5]);

    let prog = lagrange_progeny(&mech, 1, order);
    println!("Phi          {:?}", &prog.coeffs()[..6]);
    // Phi - z phi(Phi) vanishes as a series
    let rhs = PowerSeries::z(order).mul(&phi.compose(&prog).unwrap());
    println!("residual     {:.1e}", prog.max_abs_diff(&rhs));
    println!("1/(1 - z)    {:?}", &PowerSeries::new(vec![1.0, -1.0]).truncate(order).reciprocal().unwrap().coeffs()[..4]);
}
