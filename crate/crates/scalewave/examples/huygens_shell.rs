//! Support structure of 3-d solutions from compactly supported data. Every
//! parameter choice propagates at speed one, so the solution vanishes
//! outside |x| = R + t. Inside |x| = t - R the free wave vanishes too (the
//! sharp Huygens principle); switching the damping on leaves a tail there.

use scalewave::model::{CauchyData, ModelParams, ScalarField};
use scalewave::quadrature::QuadratureConfig;
use scalewave::representation::{
    check_support, solve, EvalRequest, ProbeRegion, SupportCheck, SUPPORT_TOLERANCE,
};

/// Smooth bump supported on |x| <= 1.
fn bump(dim: usize) -> ScalarField {
    ScalarField::new(dim, |x| {
        let r2: f64 = x.iter().map(|c| c * c).sum();
        if r2 < 1.0 {
            (-1.0 / (1.0 - r2)).exp()
        } else {
            0.0
        }
    })
    .unwrap()
    .with_support_radius(1.0)
}

fn main() {
    let quad = QuadratureConfig::default();
    let free = ModelParams::new(0.0, 0.0).unwrap();
    let damped = ModelParams::new(3.0, 1.0).unwrap();
    let data = CauchyData::homogeneous(bump(3), bump(3)).unwrap();

    let t = 2.5;
    println!("|u(t = {t}, r e1)| for bump data with R = 1:");
    println!("r\tfree wave\tmu = 3, nu2 = 1\tregion");
    for &r in &[0.0, 0.8, 1.4, 2.2, 3.0, 3.4, 3.8] {
        let x = [r, 0.0, 0.0];
        let row: Vec<f64> = [&free, &damped]
            .iter()
            .map(|params| {
                solve(&EvalRequest {
                    t,
                    x: &x,
                    data: &data,
                    params,
                    quad: &quad,
                })
                .unwrap()
                .abs()
            })
            .collect();
        let region = if r < t - 1.0 {
            "inside backward cone"
        } else if r <= t + 1.0 {
            "shell"
        } else {
            "outside forward cone"
        };
        println!("{r:.1}\t{:.3e}\t{:.3e}\t{region}", row[0], row[1]);
    }

    // The interior probes sit on a cancellation, so give the time integral
    // more panels there; this is a resolution knob, not a tolerance change.
    let mut quad_fine = quad;
    quad_fine.interval_panels = 32;

    println!();
    println!("systematic probes via check_support:");
    for (label, params, region, quad, tol) in [
        ("free, outside", &free, ProbeRegion::OutsideForwardCone, &quad, SUPPORT_TOLERANCE),
        ("free, inside", &free, ProbeRegion::InsideBackwardCone, &quad_fine, 1e-6),
        ("damped, outside", &damped, ProbeRegion::OutsideForwardCone, &quad, SUPPORT_TOLERANCE),
    ] {
        let report = check_support(&SupportCheck {
            data: &data,
            params,
            quad,
            times: &[1.8, 2.5],
            region,
            margin: 0.1,
            tolerance: tol,
        })
        .unwrap();
        println!(
            "{label:16} max |u| = {:.3e} over {} probes ({})",
            report.max_abs,
            report.samples.len(),
            if report.passed { "zero" } else { "nonzero" }
        );
    }

    // The damped interior tail is genuinely nonzero, not quadrature noise.
    let tail = solve(&EvalRequest {
        t,
        x: &[0.0; 3],
        data: &data,
        params: &damped,
        quad: &quad,
    })
    .unwrap();
    println!();
    println!("damped tail at the origin, t = {t}: u = {tail:.6e}");
}
