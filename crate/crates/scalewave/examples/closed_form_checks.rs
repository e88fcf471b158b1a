//! Compares the 1-d representation solution against two closed forms: the
//! d'Alembert solution when both coefficients vanish, and u = t / (1 + t)
//! for critical damping with u0 = 0, u1 = 1.

use scalewave::model::{CauchyData, ModelParams, ScalarField};
use scalewave::quadrature::QuadratureConfig;
use scalewave::representation::{solve, EvalRequest};

fn main() {
    let quad = QuadratureConfig::default();

    // u0 = gaussian, u1 = sine: u(t,x) = (u0(x+t) + u0(x-t)) / 2
    //                                  + (cos(k(x-t)) - cos(k(x+t))) / (2k).
    let width = 0.6_f64;
    let k = 1.3_f64;
    let u0 = ScalarField::new(1, move |x| (-x[0] * x[0] / (2.0 * width * width)).exp()).unwrap();
    let u1 = ScalarField::new(1, move |x| (k * x[0]).sin()).unwrap();
    let data = CauchyData::homogeneous(u0, u1).unwrap();
    let params = ModelParams::new(0.0, 0.0).unwrap();

    let gaussian = |x: f64| (-x * x / (2.0 * width * width)).exp();
    println!("free 1-d wave vs d'Alembert:");
    println!("t\tmax |u - exact| over x in [-2, 2]");
    for &t in &[0.25, 0.5, 1.0, 2.0] {
        let mut worst: f64 = 0.0;
        for j in 0..=20 {
            let x = -2.0 + 0.2 * j as f64;
            let u = solve(&EvalRequest {
                t,
                x: &[x],
                data: &data,
                params: &params,
                quad: &quad,
            })
            .unwrap();
            let exact = 0.5 * (gaussian(x + t) + gaussian(x - t))
                + ((k * (x - t)).cos() - ((k * (x + t)).cos())) / (2.0 * k);
            worst = worst.max((u - exact).abs());
        }
        println!("{t:.2}\t{worst:.3e}");
    }

    // mu = 2, nu2 = 0: constant initial velocity decays as t / (1 + t).
    let data = CauchyData::homogeneous(
        ScalarField::zero(1),
        ScalarField::new(1, |_| 1.0).unwrap(),
    )
    .unwrap();
    let params = ModelParams::new(2.0, 0.0).unwrap();
    println!();
    println!("critical damping, u0 = 0, u1 = 1, probe x = 0.3:");
    println!("t\tu\t\t\tt/(1+t)\t\t\t|diff|");
    for &t in &[0.5, 1.0, 2.0, 4.0] {
        let u = solve(&EvalRequest {
            t,
            x: &[0.3],
            data: &data,
            params: &params,
            quad: &quad,
        })
        .unwrap();
        let exact = t / (1.0 + t);
        println!("{t:.1}\t{u:.15}\t{exact:.15}\t{:.2e}", (u - exact).abs());
    }
}
