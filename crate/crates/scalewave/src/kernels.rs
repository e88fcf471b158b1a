//! Closed-form kernels of the integral representation: the two-point kernel
//! E, its b-derivative, and the boundary traces K0, K1 obtained at b = 0.
//!
//! With s = (1 - sqrt(delta))/2 and
//!
//! ```text
//! D = (t+b+2)^2 - (y-x)^2,    z = ((t-b)^2 - (y-x)^2) / D,
//! ```
//!
//! the kernel is
//!
//! ```text
//! E(t,x;b,y) = (1+t)^(-mu/2+s) (1+b)^(mu/2+s) D^((sqrt(delta)-1)/2) F(s,s;1;z),
//! ```
//!
//! smooth on the closed backward characteristic triangle 0 <= b <= t,
//! |y - x| <= t - b, where z stays in [0, 1). The b-derivative is analytic
//! (contiguous hypergeometric relation), not numeric: K0 sits inside
//! quadratures and has to be cheap and smooth.

use crate::error::{Error, Result};
use crate::hypergeom::{hyp2f1_tol, HypParams};
use crate::model::ModelParams;

/// Tolerance for the 2F1 evaluations inside kernels. Residual checks take
/// second differences at steps near 5e-4, which amplify evaluation noise by
/// 1/h^2 = 4e6; the series must be summed to the roundoff floor for those
/// checks to see a clean O(h^2) signal. Costs a handful of extra terms.
pub(crate) const KERNEL_TOL: f64 = 1e-15;

/// Relative slack admitted on the characteristic |y - x| = t - b, so that
/// quadrature abscissae landing on the cone within rounding still validate.
const CHARACTERISTIC_SLACK: f64 = 1e-12;

/// A point of the backward characteristic triangle: base point (t, x),
/// integration point (b, y) with 0 <= b <= t and |y - x| <= t - b.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPoint {
    t: f64,
    x: f64,
    b: f64,
    y: f64,
}

impl KernelPoint {
    pub fn new(t: f64, x: f64, b: f64, y: f64) -> Result<Self> {
        if !t.is_finite() || !x.is_finite() || !b.is_finite() || !y.is_finite() {
            return Err(Error::Domain {
                context: format!("kernel point ({t}, {x}, {b}, {y}) has a non-finite entry"),
            });
        }
        if !(t >= 0.0) {
            return Err(Error::Domain {
                context: format!("kernel point needs t >= 0, got t = {t}"),
            });
        }
        if !(0.0 <= b && b <= t) {
            return Err(Error::Domain {
                context: format!("kernel point needs 0 <= b <= t, got b = {b}, t = {t}"),
            });
        }
        if (y - x).abs() > (t - b) * (1.0 + CHARACTERISTIC_SLACK) {
            return Err(Error::Domain {
                context: format!(
                    "kernel point outside the backward cone: |y - x| = {} > t - b = {}",
                    (y - x).abs(),
                    t - b
                ),
            });
        }
        Ok(Self { t, x, b, y })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

/// The squared-distance quotient fed to the hypergeometric factor.
/// Within the triangle z lies in [0, 1); points admitted through the
/// characteristic slack are clamped to 0.
pub fn z_arg(p: &KernelPoint) -> f64 {
    let (num, den) = quotient_parts(p.t, p.b, p.y - p.x);
    (num / den).max(0.0)
}

/// Factored numerator and denominator of z: products of sums, accurate near
/// the characteristic where (t-b)^2 - w^2 cancels.
#[inline]
fn quotient_parts(t: f64, b: f64, w: f64) -> (f64, f64) {
    let a = t - b;
    let c = t + b + 2.0;
    ((a - w) * (a + w), (c - w) * (c + w))
}

/// Kernel E at a validated point.
pub fn kernel_e(p: &KernelPoint, params: &ModelParams) -> Result<f64> {
    let w = p.y - p.x;
    let (num, den) = quotient_parts(p.t, p.b, w);
    debug_assert!(den > 0.0, "D must be positive on the validated triangle");
    eval_e(p.t, p.b, den, (num / den).max(0.0), params)
}

/// Analytic b-derivative of E at a validated point.
pub fn kernel_de_db(p: &KernelPoint, params: &ModelParams) -> Result<f64> {
    let w = p.y - p.x;
    let (num, den) = quotient_parts(p.t, p.b, w);
    debug_assert!(den > 0.0, "D must be positive on the validated triangle");
    eval_de_db(p.t, p.b, w, den, (num / den).max(0.0), params)
}

/// E evaluated outside the validated triangle, for difference stencils that
/// step across the characteristic and for the swapped-arguments symmetry
/// relation. Requires 1+t > 0, 1+b > 0, D > 0 and z in (-1, 1); the last
/// bound fails for |y - x| large enough, the others for strongly negative
/// times.
pub fn kernel_e_extended(t: f64, x: f64, b: f64, y: f64, params: &ModelParams) -> Result<f64> {
    let (den, z) = extended_geometry(t, b, y - x)?;
    eval_e(t, b, den, z, params)
}

/// b-derivative companion of [`kernel_e_extended`].
pub fn kernel_de_db_extended(
    t: f64,
    x: f64,
    b: f64,
    y: f64,
    params: &ModelParams,
) -> Result<f64> {
    let w = y - x;
    let (den, z) = extended_geometry(t, b, w)?;
    eval_de_db(t, b, w, den, z, params)
}

fn extended_geometry(t: f64, b: f64, w: f64) -> Result<(f64, f64)> {
    if !(1.0 + t > 0.0) || !(1.0 + b > 0.0) {
        return Err(Error::Domain {
            context: format!("kernel prefactors need t > -1 and b > -1, got t = {t}, b = {b}"),
        });
    }
    let (num, den) = quotient_parts(t, b, w);
    if !(den > 0.0) {
        return Err(Error::Domain {
            context: format!("kernel geometry needs (t+b+2)^2 > (y-x)^2, got D = {den}"),
        });
    }
    let z = num / den;
    // 1+t > 0 and 1+b > 0 force z < 1; z <= -1 still happens far outside
    // the cone and the hypergeometric factor stops converging there.
    if !(z > -1.0) {
        return Err(Error::Domain {
            context: format!("kernel argument z = {z} <= -1, too far outside the cone"),
        });
    }
    Ok((den, z))
}

fn eval_e(t: f64, b: f64, den: f64, z: f64, params: &ModelParams) -> Result<f64> {
    let sd = params.sqrt_delta();
    let s = 0.5 * (1.0 - sd);
    let f = hyp2f1_tol(&HypParams::symmetric(s, 1.0), z, KERNEL_TOL)?;
    Ok(prefactor(t, b, den, s, params) * f)
}

fn eval_de_db(t: f64, b: f64, w: f64, den: f64, z: f64, params: &ModelParams) -> Result<f64> {
    let sd = params.sqrt_delta();
    let s = 0.5 * (1.0 - sd);
    let f = hyp2f1_tol(&HypParams::symmetric(s, 1.0), z, KERNEL_TOL)?;
    let f_up = hyp2f1_tol(&HypParams::symmetric(s + 1.0, 2.0), z, KERNEL_TOL)?;
    let a = t - b;
    let c = t + b + 2.0;
    // Chain rule on E = P(t,b) D^((sd-1)/2) F(z): the a=b=s contiguous
    // derivative F' = s^2 F(s+1,s+1;2;z) folds with dz/db into term one.
    let term_f_up = (1.0 - sd).powi(2) * (1.0 + t) * (w * w - a * c) / (den * den) * f_up;
    let term_p = (0.5 * params.mu() + s) / (1.0 + b) * f;
    let term_d = (sd - 1.0) * c / den * f;
    Ok(prefactor(t, b, den, s, params) * (term_f_up + term_p + term_d))
}

#[inline]
fn prefactor(t: f64, b: f64, den: f64, s: f64, params: &ModelParams) -> f64 {
    let half_mu = 0.5 * params.mu();
    (1.0 + t).powf(-half_mu + s)
        * (1.0 + b).powf(half_mu + s)
        * den.powf(-s) // (sd - 1)/2 = -s
}

/// Boundary trace K1(t,x;y) = E(t,x;0,y), the kernel weighting u1 + mu u0.
pub fn kernel_k1(t: f64, x: f64, y: f64, params: &ModelParams) -> Result<f64> {
    let p = KernelPoint::new(t, x, 0.0, y)?;
    kernel_e(&p, params)
}

/// Boundary trace K0(t,x;y) = -dE/db(t,x;0,y), the kernel weighting u0.
pub fn kernel_k0(t: f64, x: f64, y: f64, params: &ModelParams) -> Result<f64> {
    let p = KernelPoint::new(t, x, 0.0, y)?;
    Ok(-kernel_de_db(&p, params)?)
}

/// Closed form of E when delta = 1 (s = 0, so the hypergeometric and D
/// factors collapse): (1+t)^(-mu/2) (1+b)^(mu/2), independent of x and y.
pub fn kernel_e_delta1(t: f64, b: f64, mu: f64) -> f64 {
    (1.0 + t).powf(-0.5 * mu) * (1.0 + b).powf(0.5 * mu)
}

/// Closed form of K1 when delta = 1: (1+t)^(-mu/2).
pub fn kernel_k1_delta1(t: f64, mu: f64) -> f64 {
    (1.0 + t).powf(-0.5 * mu)
}

/// Closed form of K0 when delta = 1: -(mu/2) (1+t)^(-mu/2).
pub fn kernel_k0_delta1(t: f64, mu: f64) -> f64 {
    -0.5 * mu * (1.0 + t).powf(-0.5 * mu)
}

/// 5-point residual of E under the base operator
/// d2_t - d2_x + mu/(1+t) d_t + nu2/(1+t)^2 in (t, x) at step h. Falls as
/// O(h^2) wherever E solves the equation. Stencils may cross the
/// characteristic, so evaluation goes through the extended path.
pub fn kernel_pde_residual(
    t: f64,
    x: f64,
    b: f64,
    y: f64,
    params: &ModelParams,
    h: f64,
) -> Result<f64> {
    let e = |t: f64, x: f64| kernel_e_extended(t, x, b, y, params);
    let center = e(t, x)?;
    let e_tt = (e(t + h, x)? + e(t - h, x)? - 2.0 * center) / (h * h);
    let e_xx = (e(t, x + h)? + e(t, x - h)? - 2.0 * center) / (h * h);
    let e_t = (e(t + h, x)? - e(t - h, x)?) / (2.0 * h);
    Ok(e_tt - e_xx + params.mu() / (1.0 + t) * e_t
        + params.nu2() / (1.0 + t).powi(2) * center)
}

/// 5-point residual of E under the adjoint operator
/// d2_b - d2_y - mu/(1+b) d_b + (mu + nu2)/(1+b)^2 in (b, y) at step h.
/// The zeroth-order denominator is (1+b)^2: the variant with (1+t)^2 does
/// not annihilate E (see the companion test).
pub fn kernel_adjoint_residual(
    t: f64,
    x: f64,
    b: f64,
    y: f64,
    params: &ModelParams,
    h: f64,
) -> Result<f64> {
    let e = |b: f64, y: f64| kernel_e_extended(t, x, b, y, params);
    let center = e(b, y)?;
    let e_bb = (e(b + h, y)? + e(b - h, y)? - 2.0 * center) / (h * h);
    let e_yy = (e(b, y + h)? + e(b, y - h)? - 2.0 * center) / (h * h);
    let e_b = (e(b + h, y)? - e(b - h, y)?) / (2.0 * h);
    Ok(e_bb - e_yy - params.mu() / (1.0 + b) * e_b
        + (params.mu() + params.nu2()) / (1.0 + b).powi(2) * center)
}

/// Worst absolute deviation, over both characteristics y = x +- (t - b), of
/// the directional trace [E_t -+ E_x] from its closed form
/// -2^(sqrt(delta)-2) mu (1+t)^(-mu/2-1) (1+b)^(mu/2). The derivatives are
/// central differences at step h taken before restricting to the cone, so
/// half of each stencil leaves the triangle.
pub fn characteristic_trace_defect(
    t: f64,
    b: f64,
    params: &ModelParams,
    h: f64,
) -> Result<f64> {
    let mu = params.mu();
    let want = -(2.0_f64.powf(params.sqrt_delta() - 2.0))
        * mu
        * (1.0 + t).powf(-0.5 * mu - 1.0)
        * (1.0 + b).powf(0.5 * mu);
    let x = 0.0;
    let mut worst = 0.0f64;
    for sign in [1.0, -1.0] {
        let y = x + sign * (t - b);
        let e_t = (kernel_e_extended(t + h, x, b, y, params)?
            - kernel_e_extended(t - h, x, b, y, params)?)
            / (2.0 * h);
        let e_x = (kernel_e_extended(t, x + h, b, y, params)?
            - kernel_e_extended(t, x - h, b, y, params)?)
            / (2.0 * h);
        worst = worst.max((e_t - sign * e_x - want).abs());
    }
    Ok(worst)
}

/// Relative defect of the argument-swap relation
/// E(t,x;b,y) = (1+b)^mu (1+t)^(-mu) E(b,y;t,x), normalized by |E(t,x;b,y)|.
/// The swapped point leaves the triangle, so the right-hand side goes
/// through the extended evaluator.
pub fn kernel_symmetry_defect(p: &KernelPoint, params: &ModelParams) -> Result<f64> {
    let lhs = kernel_e(p, params)?;
    let swapped = kernel_e_extended(p.b(), p.y(), p.t(), p.x(), params)?;
    let rhs = (1.0 + p.b()).powf(params.mu()) * (1.0 + p.t()).powf(-params.mu()) * swapped;
    Ok(((lhs - rhs) / lhs).abs())
}
