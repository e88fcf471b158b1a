//! Solves the same radially symmetric problem in 1, 2, and 3 space
//! dimensions. The 2-d case goes through the method of descent, so this
//! sweep exercises every branch of the dimension dispatch.

use scalewave::model::{CauchyData, ModelParams, ScalarField};
use scalewave::quadrature::QuadratureConfig;
use scalewave::representation::{solve, EvalRequest};

fn gaussian(dim: usize, width: f64) -> ScalarField {
    let w2 = 2.0 * width * width;
    ScalarField::new(dim, move |x| {
        let r2: f64 = x.iter().map(|c| c * c).sum();
        (-r2 / w2).exp()
    })
    .unwrap()
    .with_gradient(move |x| {
        let r2: f64 = x.iter().map(|c| c * c).sum();
        let v = (-r2 / w2).exp();
        x.iter().map(|c| -2.0 * c / w2 * v).collect()
    })
}

fn main() {
    let params = ModelParams::new(2.5, 0.5).unwrap();
    let quad = QuadratureConfig::default();

    println!(
        "u(t, r e1) for mu = {}, nu2 = {}, u0 = gaussian(0.8):",
        params.mu(),
        params.nu2()
    );
    println!("t\tr\tdim 1\t\tdim 2\t\tdim 3");
    for &t in &[0.5, 1.0] {
        for &r in &[0.0, 0.5, 1.0, 1.5] {
            print!("{t:.1}\t{r:.1}");
            for dim in 1..=3 {
                let data =
                    CauchyData::homogeneous(gaussian(dim, 0.8), ScalarField::zero(dim)).unwrap();
                let mut x = vec![0.0; dim];
                x[0] = r;
                let u = solve(&EvalRequest {
                    t,
                    x: &x,
                    data: &data,
                    params: &params,
                    quad: &quad,
                })
                .unwrap();
                print!("\t{u:+.6e}");
            }
            println!();
        }
    }

    // As t -> 0 the solution returns the initial datum in every dimension.
    println!();
    println!("small-time limit at r = 0.5 (u0(0.5 e1) = {:.6e}):", {
        let g = gaussian(1, 0.8);
        g.value(&[0.5])
    });
    println!("t\tdim 1\t\tdim 2\t\tdim 3");
    for &t in &[0.1, 0.02] {
        print!("{t:.2}");
        for dim in 1..=3 {
            let data =
                CauchyData::homogeneous(gaussian(dim, 0.8), ScalarField::zero(dim)).unwrap();
            let mut x = vec![0.0; dim];
            x[0] = 0.5;
            let u = solve(&EvalRequest {
                t,
                x: &x,
                data: &data,
                params: &params,
                quad: &quad,
            })
            .unwrap();
            print!("\t{u:+.6e}");
        }
        println!();
    }
}
