//! Cross-validates the representation solution against the independent
//! finite-difference oracle, in 1-d and through the radial reduction in 3-d.
//! The two implementations share no numerics: quadrature plus special
//! functions on one side, an explicit time-stepper on the other.

use scalewave::fd_oracle::{fd_solve_1d, fd_solve_radial_3d, Grid1D};
use scalewave::model::{CauchyData, ModelParams, ScalarField};
use scalewave::quadrature::QuadratureConfig;
use scalewave::representation::{solve, EvalRequest};

fn gaussian(dim: usize, width: f64) -> ScalarField {
    ScalarField::new(dim, move |x| {
        let r2: f64 = x.iter().map(|c| c * c).sum();
        (-r2 / (2.0 * width * width)).exp()
    })
    .unwrap()
}

fn main() {
    let quad = QuadratureConfig::default();

    println!("1-d, u0 = gaussian(0.6), grid dx = 1e-3:");
    println!("mu\tnu2\tt\tx\tformula\t\tfd oracle\trel err");
    for (mu, nu2) in [(3.0, 0.5), (2.0, 0.25)] {
        let params = ModelParams::new(mu, nu2).unwrap();
        let data = CauchyData::homogeneous(gaussian(1, 0.6), ScalarField::zero(1)).unwrap();
        let grid = Grid1D::with_auto_dt(-5.0, 5.0, 10_001, 2.0);
        let slices = fd_solve_1d(&data, &params, &grid, &[0.5, 2.0]).unwrap();
        for slice in &slices {
            let scale = slice.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            for &x in &[-0.6, 0.3] {
                let j = ((x - grid.x_min) / grid.dx()).round() as usize;
                let u_fd = slice.values[j];
                let u = solve(&EvalRequest {
                    t: slice.t,
                    x: &[grid.x_min + j as f64 * grid.dx()],
                    data: &data,
                    params: &params,
                    quad: &quad,
                })
                .unwrap();
                println!(
                    "{mu}\t{nu2}\t{:.2}\t{x:.2}\t{u:.6e}\t{u_fd:.6e}\t{:.2e}",
                    slice.t,
                    (u - u_fd).abs() / scale
                );
            }
        }
    }

    println!();
    println!("3-d radial, u0 = gaussian(0.7), grid dx = 1.25e-3:");
    println!("mu\tnu2\tt\tr\tformula\t\tfd oracle\trel err");
    for (mu, nu2) in [(3.0, 0.5), (2.0, 0.25)] {
        let params = ModelParams::new(mu, nu2).unwrap();
        let data = CauchyData::homogeneous(gaussian(3, 0.7), ScalarField::zero(3)).unwrap();
        let grid = Grid1D::with_auto_dt(0.0, 5.0, 4001, 1.0);
        let slices = fd_solve_radial_3d(&data, &params, &grid, &[0.5, 1.0]).unwrap();
        for slice in &slices {
            let scale = slice.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            for &r in &[0.2, 0.8, 1.3] {
                let j = ((r - grid.x_min) / grid.dx()).round() as usize;
                let u_fd = slice.values[j];
                let u = solve(&EvalRequest {
                    t: slice.t,
                    x: &[j as f64 * grid.dx(), 0.0, 0.0],
                    data: &data,
                    params: &params,
                    quad: &quad,
                })
                .unwrap();
                println!(
                    "{mu}\t{nu2}\t{:.2}\t{r:.2}\t{u:.6e}\t{u_fd:.6e}\t{:.2e}",
                    slice.t,
                    (u - u_fd).abs() / scale
                );
            }
        }
    }
}
