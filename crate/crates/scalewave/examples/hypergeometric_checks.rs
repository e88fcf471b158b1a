//! Exercises the Gauss series evaluator against two independent references:
//! the arithmetic-geometric mean on the complete-elliptic line F(1/2, 1/2; 1; m),
//! and the hypergeometric differential equation satisfied by F(s, s; 1; z).

use scalewave::hypergeom::{hyp2f1, hyp2f1_tol, HypParams};
use scalewave::model::ModelParams;

/// 2/pi * K(m) = 1 / agm(1, sqrt(1 - m)).
fn elliptic_by_agm(m: f64) -> f64 {
    let mut a = 1.0_f64;
    let mut b = (1.0 - m).sqrt();
    for _ in 0..64 {
        let (an, bn) = (0.5 * (a + b), (a * b).sqrt());
        if (an - bn).abs() <= 1e-17 * an {
            return an.recip();
        }
        a = an;
        b = bn;
    }
    a.recip()
}

fn main() {
    println!("complete-elliptic line F(1/2, 1/2; 1; m) vs 1/agm(1, sqrt(1-m)):");
    println!("m\tseries\t\t\tagm\t\t\t|diff|");
    for k in 1..=9 {
        let m = 0.1 * k as f64;
        let series = hyp2f1_tol(&HypParams::symmetric(0.5, 1.0), m, 1e-15).unwrap();
        let reference = elliptic_by_agm(m);
        println!(
            "{m:.1}\t{series:.15}\t{reference:.15}\t{:.2e}",
            (series - reference).abs()
        );
    }

    // z(1-z) F'' + (1 - (2s+1) z) F' - s^2 F = 0, with the derivatives
    // obtained from contiguous evaluations:
    //   F'  = s^2 F(s+1, s+1; 2; z)
    //   F'' = s^2 (s+1)^2 / 2 * F(s+2, s+2; 3; z)
    println!();
    println!("differential-equation residual for F(s, s; 1; z), z in [0.05, 0.65]:");
    println!("mu\tnu2\ts\tmax |residual|");
    for (mu, nu2) in [(3.0, 1.0), (2.5, 0.5), (4.0, 2.0), (5.0, 3.0)] {
        let params = ModelParams::new(mu, nu2).unwrap();
        let s = 0.5 * (1.0 - params.sqrt_delta());
        let mut worst: f64 = 0.0;
        for k in 0..=12 {
            let z = 0.05 + 0.05 * k as f64;
            let f = hyp2f1(&HypParams::symmetric(s, 1.0), z).unwrap();
            let df = s * s * hyp2f1(&HypParams::symmetric(s + 1.0, 2.0), z).unwrap();
            let ddf = s * s * (s + 1.0) * (s + 1.0) / 2.0
                * hyp2f1(&HypParams::symmetric(s + 2.0, 3.0), z).unwrap();
            let residual = z * (1.0 - z) * ddf + (1.0 - (2.0 * s + 1.0) * z) * df - s * s * f;
            worst = worst.max(residual.abs());
        }
        println!("{mu}\t{nu2}\t{s:+.2}\t{worst:.3e}");
    }
}
