//! Tabulates the interior kernel and its boundary traces, then measures how
//! far the evaluated kernel drifts from the identities that define it: the
//! interior equation in (t, x), the adjoint equation in (b, y), the
//! characteristic trace, and the argument-swap symmetry.

use scalewave::kernels::{
    characteristic_trace_defect, kernel_adjoint_residual, kernel_e, kernel_k0, kernel_k1,
    kernel_pde_residual, kernel_symmetry_defect, KernelPoint,
};
use scalewave::model::ModelParams;

fn main() {
    let params = ModelParams::new(3.0, 1.0).unwrap();
    println!(
        "interior kernel for mu = 3, nu2 = 1 (delta = {}):",
        params.delta()
    );
    println!("t\tb\ty\tE(t,0;b,y)");
    for &t in &[0.5, 1.0, 2.0] {
        for frac in [0.0, 0.4] {
            let b = frac * t;
            for yfrac in [0.0, 0.5] {
                let y = yfrac * (t - b);
                let p = KernelPoint::new(t, 0.0, b, y).unwrap();
                let e = kernel_e(&p, &params).unwrap();
                println!("{t:.2}\t{b:.2}\t{y:.2}\t{e:.12e}");
            }
        }
    }

    println!();
    println!("boundary kernels at b = 0, x = 0:");
    println!("t\ty\tK0\tK1");
    for &t in &[0.5, 1.0, 2.0] {
        let y = 0.4 * t;
        let k0 = kernel_k0(t, 0.0, y, &params).unwrap();
        let k1 = kernel_k1(t, 0.0, y, &params).unwrap();
        println!("{t:.2}\t{y:.2}\t{k0:.12e}\t{k1:.12e}");
    }

    // Worst defect over a few interior points per parameter set. The first
    // two columns are O(h^2) finite-difference residuals; the trace and
    // symmetry columns compare against closed forms, so they sit near
    // roundoff.
    let points = [
        (1.0, 0.2, 0.3, 0.1),
        (2.0, -0.4, 0.7, -0.2),
        (1.5, 0.0, 0.9, 0.25),
    ];
    let trace_pairs = [(1.2, 0.3), (2.6, 1.0)];
    println!();
    println!("identity defects (residual step h = 5e-4, trace step h = 1e-5):");
    println!("mu\tnu2\tdelta\tpde\t\tadjoint\t\ttrace\t\tsymmetry");
    for (mu, nu2) in [(3.0, 1.0), (2.5, 0.5), (4.0, 2.0), (5.0, 3.0)] {
        let params = ModelParams::new(mu, nu2).unwrap();
        let mut pde: f64 = 0.0;
        let mut adjoint: f64 = 0.0;
        let mut symmetry: f64 = 0.0;
        for &(t, x, b, y) in &points {
            pde = pde.max(
                kernel_pde_residual(t, x, b, y, &params, 5e-4)
                    .unwrap()
                    .abs(),
            );
            adjoint = adjoint.max(
                kernel_adjoint_residual(t, x, b, y, &params, 5e-4)
                    .unwrap()
                    .abs(),
            );
            let p = KernelPoint::new(t, x, b, y).unwrap();
            symmetry = symmetry.max(kernel_symmetry_defect(&p, &params).unwrap());
        }
        let mut trace: f64 = 0.0;
        for &(t, b) in &trace_pairs {
            trace = trace.max(characteristic_trace_defect(t, b, &params, 1e-5).unwrap());
        }
        println!(
            "{mu}\t{nu2}\t{}\t{pde:.3e}\t{adjoint:.3e}\t{trace:.3e}\t{symmetry:.3e}",
            params.delta()
        );
    }
}
