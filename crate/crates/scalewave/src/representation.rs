//! The integral representation of the solution: a d'Alembert-type boundary
//! term plus kernel-weighted integrals of the data.
//!
//! In one dimension the solution at (t, x) is
//!
//! ```text
//! u = (1+t)^(-mu/2) (u0(x+t) + u0(x-t)) / 2
//!   + 2^(-sd) Int u0(y) K0(t,x;y) dy
//!   + 2^(-sd) Int (u1(y) + mu u0(y)) K1(t,x;y) dy
//!   + 2^(-sd) Int_0^t Int f(b,y) E(t,x;b,y) dy db,        sd = sqrt(delta),
//! ```
//!
//! all y-integrals over the backward cone [x-t+b, x+t-b]. In dimensions 2
//! and 3 the same one-variable kernels act on free-wave means: with w the
//! classical wave solution operator (spherical means for n = 3, weighted
//! ball means for n = 2),
//!
//! ```text
//! u = (1+t)^(-mu/2) w[u0](t,x)
//!   + 2^(1-sd) Int_0^t w[u0](s,x) K0(t,0;s) ds
//!   + 2^(1-sd) Int_0^t w[u1 + mu u0](s,x) K1(t,0;s) ds
//!   + 2^(1-sd) Int_0^t Int_0^(t-b) w[f(b,.)](s,x) E(t,0;b,s) ds db.
//! ```
//!
//! Identically-zero data terms are skipped outright, so zero data produces
//! an exact 0 and support checks outside the forward cone are exact.

use std::cell::RefCell;

use crate::error::{Error, Result};
use crate::kernels::{kernel_e, kernel_k0, kernel_k1, KernelPoint};
use crate::model::{CauchyData, ModelParams, ScalarField};
use crate::quadrature::{
    ball_weighted_mean, integrate_interval, sphere_mean, sphere_mean_normal_derivative,
    QuadratureConfig,
};

/// Default bound on |u| for points that propagation says cannot see the
/// data; limited by quadrature in the cancellation cases.
pub const SUPPORT_TOLERANCE: f64 = 1e-8;

/// One evaluation of the solution at a spacetime point.
#[derive(Debug, Clone, Copy)]
pub struct EvalRequest<'a> {
    pub t: f64,
    pub x: &'a [f64],
    pub data: &'a CauchyData,
    pub params: &'a ModelParams,
    pub quad: &'a QuadratureConfig,
}

impl EvalRequest<'_> {
    pub fn validate(&self) -> Result<()> {
        if !self.t.is_finite() || self.t < 0.0 {
            return Err(Error::Domain {
                context: format!("evaluation time must be finite and >= 0, got {}", self.t),
            });
        }
        if self.x.len() != self.data.dim() {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "evaluation point has {} coordinates but data is {}-d",
                    self.x.len(),
                    self.data.dim()
                ),
            });
        }
        if self.x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain {
                context: "evaluation point has a non-finite coordinate".into(),
            });
        }
        self.quad.validate()
    }
}

/// First kernel error raised inside a quadrature closure; the closure
/// itself returns 0 so integration can finish, and the error is rethrown
/// afterwards.
struct ErrCapture(RefCell<Option<Error>>);

impl ErrCapture {
    fn new() -> Self {
        Self(RefCell::new(None))
    }

    fn absorb(&self, r: Result<f64>) -> f64 {
        match r {
            Ok(v) => v,
            Err(e) => {
                self.0.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    }

    fn finish(self, value: f64) -> Result<f64> {
        match self.0.into_inner() {
            Some(e) => Err(e),
            None => Ok(value),
        }
    }
}

/// Evaluate the representation at the request point, picking the solver by
/// dimension.
pub fn solve(req: &EvalRequest) -> Result<f64> {
    match req.data.dim() {
        1 => solve_1d(req),
        2 | 3 => solve_nd(req),
        d => Err(Error::UnsupportedDimension { dim: d }),
    }
}

/// One-dimensional representation formula.
pub fn solve_1d(req: &EvalRequest) -> Result<f64> {
    req.validate()?;
    if req.data.dim() != 1 {
        return Err(Error::DimensionMismatch {
            context: format!("solve_1d called with {}-d data", req.data.dim()),
        });
    }
    let (t, x) = (req.t, req.x[0]);
    let m = req.params;
    let q = req.quad;
    let (u0, u1, f) = (req.data.u0(), req.data.u1(), req.data.f());
    let mu = m.mu();
    let amp = 2.0_f64.powf(-m.sqrt_delta());
    let decay = (1.0 + t).powf(-0.5 * mu);
    let errs = ErrCapture::new();

    let mut u = 0.0;
    if !u0.is_identically_zero() {
        u += 0.5 * decay * (u0.value(&[x + t]) + u0.value(&[x - t]));
        u += amp
            * integrate_interval(
                |y| u0.value(&[y]) * errs.absorb(kernel_k0(t, x, y, m)),
                x - t,
                x + t,
                q,
            );
    }
    let need_k1 = !u1.is_identically_zero() || (mu != 0.0 && !u0.is_identically_zero());
    if need_k1 {
        u += amp
            * integrate_interval(
                |y| {
                    let mut g = 0.0;
                    if !u1.is_identically_zero() {
                        g += u1.value(&[y]);
                    }
                    if mu != 0.0 && !u0.is_identically_zero() {
                        g += mu * u0.value(&[y]);
                    }
                    g * errs.absorb(kernel_k1(t, x, y, m))
                },
                x - t,
                x + t,
                q,
            );
    }
    if !f.is_identically_zero() {
        u += amp
            * integrate_interval(
                |b| {
                    integrate_interval(
                        |y| {
                            let e = errs.absorb(
                                KernelPoint::new(t, x, b, y).and_then(|p| kernel_e(&p, m)),
                            );
                            f.value(b, &[y]) * e
                        },
                        x - t + b,
                        x + t - b,
                        q,
                    )
                },
                0.0,
                t,
                q,
            );
    }
    errs.finish(u)
}

/// Representation in dimensions 2 and 3: one-variable kernels against
/// free-wave means.
pub fn solve_nd(req: &EvalRequest) -> Result<f64> {
    req.validate()?;
    let dim = req.data.dim();
    if dim != 2 && dim != 3 {
        return Err(Error::UnsupportedDimension { dim });
    }
    let (t, x) = (req.t, req.x);
    let m = req.params;
    let q = req.quad;
    let (u0, u1, f) = (req.data.u0(), req.data.u1(), req.data.f());
    let mu = m.mu();
    let amp = 2.0_f64.powf(1.0 - m.sqrt_delta());
    let decay = (1.0 + t).powf(-0.5 * mu);
    let errs = ErrCapture::new();

    let w = |phi: &ScalarField, s: f64| match dim {
        3 => free_wave_odd(phi, s, x, q),
        _ => free_wave_even(phi, s, x, q),
    };

    let mut u = 0.0;
    if !u0.is_identically_zero() {
        u += decay * w(u0, t);
        u += amp
            * integrate_interval(
                |s| w(u0, s) * errs.absorb(kernel_k0(t, 0.0, s, m)),
                0.0,
                t,
                q,
            );
    }
    let combined = if u1.is_identically_zero() {
        if mu != 0.0 && !u0.is_identically_zero() {
            Some(ScalarField::linear_comb(mu, u0, 0.0, u1)?)
        } else {
            None
        }
    } else if mu != 0.0 && !u0.is_identically_zero() {
        Some(ScalarField::linear_comb(1.0, u1, mu, u0)?)
    } else {
        Some(u1.clone())
    };
    if let Some(g) = combined {
        u += amp
            * integrate_interval(
                |s| w(&g, s) * errs.absorb(kernel_k1(t, 0.0, s, m)),
                0.0,
                t,
                q,
            );
    }
    if !f.is_identically_zero() {
        u += amp
            * integrate_interval(
                |b| {
                    let slice = f.at_time(b);
                    integrate_interval(
                        |s| {
                            let e = errs.absorb(
                                KernelPoint::new(t, 0.0, b, s).and_then(|p| kernel_e(&p, m)),
                            );
                            w(&slice, s) * e
                        },
                        0.0,
                        t - b,
                        q,
                    )
                },
                0.0,
                t,
                q,
            );
    }
    errs.finish(u)
}

/// Classical free-wave solution operator for n = 3 (Kirchhoff):
/// d/dt ( t * sphere_mean(phi, x, t) ), expanded as mean + t * d(mean)/dt.
/// The radial derivative of the mean uses the field's analytic gradient
/// when present (the mean of grad(phi).omega over the same nodes, which is
/// the exact derivative of the discretized mean); otherwise a central
/// difference with step t_derivative_step * max(1, t), capped at t/2.
pub fn free_wave_odd(phi: &ScalarField, t: f64, x: &[f64], cfg: &QuadratureConfig) -> f64 {
    assert_eq!(phi.dim(), 3, "free_wave_odd drives 3-d data");
    assert!(t >= 0.0, "free-wave time must be nonnegative");
    if phi.is_identically_zero() {
        return 0.0;
    }
    if t == 0.0 {
        return phi.value(x);
    }
    let mean = sphere_mean(phi, x, t, cfg);
    let d_mean = match sphere_mean_normal_derivative(phi, x, t, cfg) {
        Some(d) => d,
        None => {
            let h = (cfg.t_derivative_step * t.max(1.0)).min(0.5 * t);
            (sphere_mean(phi, x, t + h, cfg) - sphere_mean(phi, x, t - h, cfg)) / (2.0 * h)
        }
    };
    mean + t * d_mean
}

/// Classical free-wave solution operator for n = 2 (Poisson, by descent):
/// (1/2) d/dt ( t^2 * ball_weighted_mean(phi, x, t) ). The derivative is
/// always a central difference of the whole bracket; differentiating under
/// the singular-weight integral is not worth the fragility.
pub fn free_wave_even(phi: &ScalarField, t: f64, x: &[f64], cfg: &QuadratureConfig) -> f64 {
    assert_eq!(phi.dim(), 2, "free_wave_even drives 2-d data");
    assert!(t >= 0.0, "free-wave time must be nonnegative");
    if phi.is_identically_zero() {
        return 0.0;
    }
    if t == 0.0 {
        return phi.value(x);
    }
    let h = (cfg.t_derivative_step * t.max(1.0)).min(0.5 * t);
    let bracket = |tau: f64| tau * tau * ball_weighted_mean(phi, x, tau, cfg);
    0.5 * (bracket(t + h) - bracket(t - h)) / (2.0 * h)
}

/// ((1/t) d/dt)^k g at t by nested central differences; the plumbing that
/// extends the free-wave operators to higher dimensions.
pub fn iterated_t_operator(
    g: impl Fn(f64) -> f64,
    k: usize,
    t: f64,
    step: f64,
) -> Result<f64> {
    if !(step > 0.0) {
        return Err(Error::Domain {
            context: format!("iterated_t_operator needs a positive step, got {step}"),
        });
    }
    if t - step * k as f64 <= 0.0 && k > 0 {
        return Err(Error::StepTooLarge { step, t });
    }
    fn go(g: &dyn Fn(f64) -> f64, k: usize, t: f64, step: f64) -> f64 {
        if k == 0 {
            return g(t);
        }
        (go(g, k - 1, t + step, step) - go(g, k - 1, t - step, step)) / (2.0 * step * t)
    }
    Ok(go(&g, k, t, step))
}

/// n!! as a float; normalization constant of the general free-wave
/// operators.
pub fn double_factorial(n: u64) -> f64 {
    let mut acc = 1.0;
    let mut k = n;
    while k > 1 {
        acc *= k as f64;
        k -= 2;
    }
    acc
}

/// Where support probes are placed relative to the data's cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeRegion {
    /// |x| > R + t + margin: propagation speed 1 says u = 0 there.
    OutsideForwardCone,
    /// |x| < t - R - margin: zero again when the sharp Huygens principle
    /// applies (delta = 1, odd dimension, no source).
    InsideBackwardCone,
}

/// A support sweep over probe points derived from the data's support
/// radius.
#[derive(Debug, Clone, Copy)]
pub struct SupportCheck<'a> {
    pub data: &'a CauchyData,
    pub params: &'a ModelParams,
    pub quad: &'a QuadratureConfig,
    pub times: &'a [f64],
    pub region: ProbeRegion,
    /// Distance kept from the cone boundary.
    pub margin: f64,
    /// Pass bound on max |u|; SUPPORT_TOLERANCE unless overridden.
    pub tolerance: f64,
}

#[derive(Debug, Clone)]
pub struct SupportSample {
    pub t: f64,
    pub x: Vec<f64>,
    pub abs_u: f64,
}

#[derive(Debug, Clone)]
pub struct SupportReport {
    pub samples: Vec<SupportSample>,
    pub max_abs: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Probe directions per dimension: the axis pair in 1-d, eight headings in
/// 2-d, axes plus cube diagonals in 3-d.
fn probe_directions(dim: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..8)
            .map(|k| {
                let a = std::f64::consts::FRAC_PI_4 * k as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        _ => {
            let mut dirs = Vec::new();
            for i in 0..3 {
                for sign in [1.0, -1.0] {
                    let mut d = vec![0.0; 3];
                    d[i] = sign;
                    dirs.push(d);
                }
            }
            let s = 1.0 / 3.0_f64.sqrt();
            for sx in [s, -s] {
                for sy in [s, -s] {
                    for sz in [s, -s] {
                        dirs.push(vec![sx, sy, sz]);
                    }
                }
            }
            dirs
        }
    }
}

/// Evaluate |u| at probe points placed by region and report the maximum
/// against the tolerance.
pub fn check_support(check: &SupportCheck) -> Result<SupportReport> {
    let radius = check.data.support_radius().ok_or_else(|| Error::Domain {
        context: "support check needs data with a known support radius".into(),
    })?;
    if !(check.margin > 0.0) {
        return Err(Error::Domain {
            context: format!("support margin must be positive, got {}", check.margin),
        });
    }
    let dim = check.data.dim();
    let dirs = probe_directions(dim);
    let mut samples = Vec::new();
    let mut max_abs = 0.0f64;
    for &t in check.times {
        let radii: Vec<f64> = match check.region {
            ProbeRegion::OutsideForwardCone => {
                let base = radius + t + check.margin;
                vec![base, base + 0.5, base + 1.5]
            }
            ProbeRegion::InsideBackwardCone => {
                let interior = t - radius - check.margin;
                if interior <= 0.0 {
                    return Err(Error::DomainTooSmall {
                        context: format!(
                            "no points inside the backward cone at t = {t} \
                             with support radius {radius} and margin {}",
                            check.margin
                        ),
                    });
                }
                vec![0.0, 0.4 * interior, 0.8 * interior]
            }
        };
        for r in radii {
            for dir in &dirs {
                let x: Vec<f64> = dir.iter().map(|d| d * r).collect();
                let req = EvalRequest {
                    t,
                    x: &x,
                    data: check.data,
                    params: check.params,
                    quad: check.quad,
                };
                let abs_u = solve(&req)?.abs();
                max_abs = max_abs.max(abs_u);
                samples.push(SupportSample { t, x, abs_u });
                if r == 0.0 {
                    break; // all directions coincide at the origin
                }
            }
        }
    }
    Ok(SupportReport {
        samples,
        max_abs,
        tolerance: check.tolerance,
        passed: max_abs <= check.tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{bump, constant, gaussian, sine};
    use crate::model::SpacetimeField;

    fn params(mu: f64, nu2: f64) -> ModelParams {
        ModelParams::new(mu, nu2).unwrap()
    }

    fn quad() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn request<'a>(
        t: f64,
        x: &'a [f64],
        data: &'a CauchyData,
        m: &'a ModelParams,
        q: &'a QuadratureConfig,
    ) -> EvalRequest<'a> {
        EvalRequest {
            t,
            x,
            data,
            params: m,
            quad: q,
        }
    }

    #[test]
    fn zero_data_solves_to_zero_exactly() {
        let m = params(3.0, 1.0);
        let q = quad();
        for dim in 1..=3 {
            let data = CauchyData::homogeneous(ScalarField::zero(dim), ScalarField::zero(dim))
                .unwrap();
            let x = vec![0.3; dim];
            let u = solve(&request(1.7, &x, &data, &m, &q)).unwrap();
            assert_eq!(u, 0.0, "dim {dim}");
        }
    }

    #[test]
    fn dalembert_reductions_in_1d() {
        let m = params(0.0, 0.0);
        let q = quad();

        // Quadratic data: u = x^2 + t^2.
        let u0 = ScalarField::new(1, |x: &[f64]| x[0] * x[0]).unwrap();
        let data = CauchyData::homogeneous(u0, ScalarField::zero(1)).unwrap();
        let u = solve_1d(&request(1.0, &[0.0], &data, &m, &q)).unwrap();
        assert!((u - 1.0).abs() <= 1e-12, "u = {u}");

        // u0 = sin: u = sin(x) cos(t).
        let data = CauchyData::homogeneous(sine(1, 1.0), ScalarField::zero(1)).unwrap();
        for (t, x) in [(0.5, 0.2), (1.5, -0.7), (3.0, 1.1)] {
            let u = solve_1d(&request(t, &[x], &data, &m, &q)).unwrap();
            let want = x.sin() * t.cos();
            assert!((u - want).abs() <= 1e-10, "u({t},{x}) = {u}, want {want}");
        }

        // u0 = sin, u1 = cos: the left-moving part cancels, u = sin(x + t).
        let u1 = ScalarField::new(1, |x: &[f64]| x[0].cos()).unwrap();
        let data = CauchyData::homogeneous(sine(1, 1.0), u1).unwrap();
        for (t, x) in [(0.8, 0.0), (2.0, 0.5)] {
            let u = solve_1d(&request(t, &[x], &data, &m, &q)).unwrap();
            let want = (x + t).sin();
            assert!((u - want).abs() <= 1e-10, "u({t},{x}) = {u}, want {want}");
        }

        // Constant source, zero data: u = t^2/2.
        let f = SpacetimeField::new(1, |_, _| 1.0).unwrap();
        let data =
            CauchyData::new(ScalarField::zero(1), ScalarField::zero(1), f).unwrap();
        let u = solve_1d(&request(1.4, &[0.3], &data, &m, &q)).unwrap();
        assert!((u - 0.98).abs() <= 1e-12, "u = {u}");
    }

    #[test]
    fn constant_velocity_gives_t_over_one_plus_t() {
        // mu = 2, nu2 = 0 (delta = 1), u1 = 1: u = t/(1+t).
        let m = params(2.0, 0.0);
        let q = quad();
        let data = CauchyData::homogeneous(ScalarField::zero(1), constant(1, 1.0)).unwrap();
        for t in [0.5, 1.0, 2.0, 4.0] {
            let u = solve_1d(&request(t, &[0.0], &data, &m, &q)).unwrap();
            let want = t / (1.0 + t);
            assert!((u - want).abs() <= 1e-9, "u({t}) = {u}, want {want}");
        }
    }

    #[test]
    fn delta_one_closed_kernels_reproduce_solver() {
        // At delta = 1 the kernels collapse to powers of (1+t); assembling
        // the formula from those closed forms must match the generic path.
        use crate::kernels::{kernel_k0_delta1, kernel_k1_delta1};
        let m = params(2.0, 0.0);
        let q = quad();
        let u0 = gaussian(1, &[0.0], 0.6, 1.0);
        let u1 = gaussian(1, &[0.3], 0.8, -0.5);
        let data = CauchyData::homogeneous(u0.clone(), u1.clone()).unwrap();
        for (t, x) in [(0.7, 0.1), (2.0, -0.4)] {
            let generic = solve_1d(&request(t, &[x], &data, &m, &q)).unwrap();
            let k0 = kernel_k0_delta1(t, m.mu());
            let k1 = kernel_k1_delta1(t, m.mu());
            let closed = 0.5 * (1.0 + t).powf(-1.0) * (u0.value(&[x + t]) + u0.value(&[x - t]))
                + 0.5 * k0 * integrate_interval(|y| u0.value(&[y]), x - t, x + t, &q)
                + 0.5 * k1
                    * integrate_interval(
                        |y| u1.value(&[y]) + m.mu() * u0.value(&[y]),
                        x - t,
                        x + t,
                        &q,
                    );
            assert!(
                ((generic - closed) / closed).abs() <= 1e-10,
                "generic {generic} vs closed {closed}"
            );
        }
    }

    #[test]
    fn free_wave_odd_polynomial_and_constant() {
        let q = quad();
        let c = constant(3, 2.5);
        assert!((free_wave_odd(&c, 1.3, &[0.2, 0.0, -1.0], &q) - 2.5).abs() <= 1e-13);
        assert_eq!(free_wave_odd(&c, 0.0, &[0.2, 0.0, -1.0], &q), 2.5);

        let sq = ScalarField::new(3, |x: &[f64]| x.iter().map(|v| v * v).sum())
            .unwrap()
            .with_gradient(|x: &[f64]| x.iter().map(|v| 2.0 * v).collect());
        for t in [0.4, 1.0, 2.2] {
            let got = free_wave_odd(&sq, t, &[0.0, 0.0, 0.0], &q);
            assert!((got - 3.0 * t * t).abs() <= 1e-11, "t = {t}: {got}");
        }
        // Without the gradient callback the difference path must agree.
        let sq_plain = ScalarField::new(3, |x: &[f64]| x.iter().map(|v| v * v).sum()).unwrap();
        let got = free_wave_odd(&sq_plain, 1.0, &[0.0, 0.0, 0.0], &q);
        assert!((got - 3.0).abs() <= 1e-7, "numeric path: {got}");
    }

    #[test]
    fn free_wave_odd_self_convergence() {
        // Kirchhoff value against a 10x-resolution evaluation.
        let phi = gaussian(3, &[0.1, -0.2, 0.0], 0.8, 1.0);
        let q = quad();
        let mut fine = quad();
        fine.sphere_polar *= 10;
        fine.sphere_azimuthal *= 10;
        for (t, x) in [(0.6, [0.0, 0.0, 0.0]), (1.7, [0.3, 0.1, -0.2])] {
            let coarse = free_wave_odd(&phi, t, &x, &q);
            let reference = free_wave_odd(&phi, t, &x, &fine);
            assert!(
                ((coarse - reference) / reference).abs() <= 1e-6,
                "t = {t}: {coarse} vs {reference}"
            );
        }
    }

    #[test]
    fn free_wave_even_polynomial_and_constant() {
        let q = quad();
        let c = constant(2, -1.5);
        assert!((free_wave_even(&c, 0.9, &[0.4, 0.0], &q) + 1.5).abs() <= 1e-10);
        assert_eq!(free_wave_even(&c, 0.0, &[0.4, 0.0], &q), -1.5);

        let sq = ScalarField::new(2, |x: &[f64]| x[0] * x[0] + x[1] * x[1]).unwrap();
        for t in [0.5, 1.3] {
            let got = free_wave_even(&sq, t, &[0.0, 0.0], &q);
            assert!((got - 2.0 * t * t).abs() <= 1e-7, "t = {t}: {got}");
        }
    }

    #[test]
    fn free_wave_even_self_convergence() {
        // Same derivative step everywhere so only the ball resolution
        // varies; low starting resolution keeps every error above the
        // roundoff floor of the difference stencil.
        let phi = gaussian(2, &[0.2, -0.1], 0.7, 1.0);
        let x = [0.1, 0.3];
        let t = 1.1;
        let mut fine = quad();
        fine.ball_radial = 96;
        fine.ball_angular = 192;
        let reference = free_wave_even(&phi, t, &x, &fine);
        let mut errs = Vec::new();
        for scale in [1_usize, 2, 4] {
            let mut c = quad();
            c.ball_radial = 3 * scale;
            c.ball_angular = 6 * scale;
            errs.push((free_wave_even(&phi, t, &x, &c) - reference).abs());
        }
        assert!(
            errs[0] / errs[1] >= 4.0 && errs[1] / errs[2] >= 4.0,
            "resolution doubling below order 2: {errs:?}"
        );
    }

    #[test]
    fn iterated_t_operator_references() {
        let g = |t: f64| t * t;
        assert_eq!(iterated_t_operator(g, 0, 1.7, 1e-4).unwrap(), g(1.7));
        let got = iterated_t_operator(g, 1, 1.7, 1e-3).unwrap();
        assert!((got - 2.0).abs() <= 1e-10, "{got}");
        // Exact for polynomials in real arithmetic; the step only has to
        // beat the eps/h^2 roundoff amplification of the nested stencil.
        let got = iterated_t_operator(|t: f64| t.powi(4), 2, 1.3, 1e-3).unwrap();
        assert!((got - 8.0).abs() <= 1e-9, "{got}");
        assert!(matches!(
            iterated_t_operator(g, 2, 1e-5, 1e-4),
            Err(Error::StepTooLarge { .. })
        ));
    }

    #[test]
    fn double_factorial_values() {
        assert_eq!(double_factorial(0), 1.0);
        assert_eq!(double_factorial(1), 1.0);
        assert_eq!(double_factorial(2), 2.0);
        assert_eq!(double_factorial(5), 15.0);
        assert_eq!(double_factorial(8), 384.0);
    }

    #[test]
    fn solve_nd_constant_and_polynomial() {
        let q = quad();
        let m0 = params(0.0, 0.0);

        // Constant u0, free equation, dim 3: u = c for all time.
        let data = CauchyData::homogeneous(constant(3, 4.0), ScalarField::zero(3)).unwrap();
        let u = solve_nd(&request(1.9, &[0.2, -0.1, 0.5], &data, &m0, &q)).unwrap();
        assert!(((u - 4.0) / 4.0).abs() <= 1e-12, "u = {u}");

        // u0 = |x|^2, dim 3: u = |x|^2 + 3t^2.
        let sq3 = ScalarField::new(3, |x: &[f64]| x.iter().map(|v| v * v).sum())
            .unwrap()
            .with_gradient(|x: &[f64]| x.iter().map(|v| 2.0 * v).collect());
        let data = CauchyData::homogeneous(sq3, ScalarField::zero(3)).unwrap();
        let (t, x) = (1.2, [0.5, 0.0, -0.3]);
        let u = solve_nd(&request(t, &x, &data, &m0, &q)).unwrap();
        let want = x.iter().map(|v| v * v).sum::<f64>() + 3.0 * t * t;
        assert!(((u - want) / want).abs() <= 1e-10, "u = {u}, want {want}");

        // u0 = |x|^2, dim 2: u = |x|^2 + 2t^2.
        let sq2 = ScalarField::new(2, |x: &[f64]| x[0] * x[0] + x[1] * x[1]).unwrap();
        let data = CauchyData::homogeneous(sq2, ScalarField::zero(2)).unwrap();
        let (t, x) = (0.9, [0.3, -0.2]);
        let u = solve_nd(&request(t, &x, &data, &m0, &q)).unwrap();
        let want = x.iter().map(|v| v * v).sum::<f64>() + 2.0 * t * t;
        assert!(((u - want) / want).abs() <= 1e-6, "u = {u}, want {want}");
    }

    #[test]
    fn kirchhoff_and_poisson_reduction() {
        // mu = nu2 = 0 collapses the kernels (K0 = 0, K1 = 1): the solver
        // must match the classical formulas assembled by hand.
        let m0 = params(0.0, 0.0);
        let q = quad();

        let u0 = gaussian(3, &[0.1, 0.0, -0.1], 0.9, 1.2);
        let u1 = gaussian(3, &[-0.2, 0.1, 0.0], 1.1, 0.7);
        let data = CauchyData::homogeneous(u0.clone(), u1.clone()).unwrap();
        for (t, x) in [(0.8, [0.0, 0.2, 0.1]), (2.0, [0.4, -0.3, 0.0])] {
            let u = solve_nd(&request(t, &x, &data, &m0, &q)).unwrap();
            let kirchhoff = free_wave_odd(&u0, t, &x, &q) + t * sphere_mean(&u1, &x, t, &q);
            assert!(
                ((u - kirchhoff) / kirchhoff).abs() <= 1e-8,
                "dim 3, t = {t}: {u} vs {kirchhoff}"
            );
        }

        let u0 = gaussian(2, &[0.0, 0.1], 0.8, 1.0);
        let u1 = gaussian(2, &[0.2, -0.1], 1.0, -0.6);
        let data = CauchyData::homogeneous(u0.clone(), u1.clone()).unwrap();
        for (t, x) in [(0.7, [0.1, 0.0]), (1.6, [-0.2, 0.3])] {
            let u = solve_nd(&request(t, &x, &data, &m0, &q)).unwrap();
            let poisson = free_wave_even(&u0, t, &x, &q)
                + 0.5 * t * t * ball_weighted_mean(&u1, &x, t, &q);
            assert!(
                ((u - poisson) / poisson).abs() <= 1e-8,
                "dim 2, t = {t}: {u} vs {poisson}"
            );
        }
    }

    #[test]
    fn descent_from_three_to_two_dimensions() {
        // Data constant in x3 solved in dim 3 equals the dim-2 solve on the
        // projected data.
        let m = params(3.0, 1.0);
        let q = quad();
        let u0_2 = gaussian(2, &[0.0, 0.0], 0.8, 1.0);
        let u0_3 = ScalarField::new(3, {
            let g = u0_2.clone();
            move |x: &[f64]| g.value(&[x[0], x[1]])
        })
        .unwrap()
        .with_gradient({
            let g = u0_2.clone();
            move |x: &[f64]| {
                let mut v = g.gradient(&[x[0], x[1]]).expect("gaussian has a gradient");
                v.push(0.0);
                v
            }
        });
        let data2 = CauchyData::homogeneous(u0_2, ScalarField::zero(2)).unwrap();
        let data3 = CauchyData::homogeneous(u0_3, ScalarField::zero(3)).unwrap();
        for (t, x1, x2) in [(0.9, 0.2, 0.0), (1.8, -0.3, 0.4)] {
            let u2 = solve_nd(&request(t, &[x1, x2], &data2, &m, &q)).unwrap();
            let u3 = solve_nd(&request(t, &[x1, x2, 0.0], &data3, &m, &q)).unwrap();
            assert!(
                ((u2 - u3) / u3).abs() <= 1e-4,
                "t = {t}: dim 2 {u2} vs dim 3 {u3}"
            );
        }
    }

    #[test]
    fn initial_condition_recovery_first_order() {
        let m = params(2.5, 0.5);
        let q = quad();
        for dim in 1..=3_usize {
            let u0 = gaussian(dim, &vec![0.0; dim], 0.9, 1.0);
            let u1 = gaussian(dim, &vec![0.1; dim], 1.2, 0.8);
            let data = CauchyData::homogeneous(u0.clone(), u1.clone()).unwrap();
            let x = vec![0.2; dim];
            let u0_x = u0.value(&x);
            let u1_x = u1.value(&x);
            let mut rate_errs = Vec::new();
            for eps in [1e-2, 5e-3, 2.5e-3] {
                let u = solve(&request(eps, &x, &data, &m, &q)).unwrap();
                // u(eps) = u0 + eps u1 + O(eps^2), so the quotient drifts
                // from u1 at first order.
                rate_errs.push(((u - u0_x) / eps - u1_x).abs());
            }
            assert!(
                rate_errs[0] / rate_errs[1] >= 1.5 && rate_errs[0] / rate_errs[1] <= 2.7,
                "dim {dim}: {rate_errs:?}"
            );
            assert!(
                rate_errs[1] / rate_errs[2] >= 1.5 && rate_errs[1] / rate_errs[2] <= 2.7,
                "dim {dim}: {rate_errs:?}"
            );
        }
    }

    #[test]
    fn solution_is_linear_in_data() {
        let m = params(3.0, 0.5);
        let q = quad();
        let (alpha, beta) = (0.7, -1.3);

        // dim 1 with sources.
        let a0 = gaussian(1, &[0.0], 0.8, 1.0);
        let b0 = sine(1, 1.3);
        let a1 = sine(1, 0.7);
        let b1 = gaussian(1, &[0.4], 1.0, -0.8);
        let fa = SpacetimeField::new(1, |t: f64, x: &[f64]| (t - x[0]).cos()).unwrap();
        let fb = SpacetimeField::new(1, |t: f64, x: &[f64]| t * x[0]).unwrap();
        let data_a = CauchyData::new(a0.clone(), a1.clone(), fa.clone()).unwrap();
        let data_b = CauchyData::new(b0.clone(), b1.clone(), fb.clone()).unwrap();
        let mixed = CauchyData::new(
            ScalarField::linear_comb(alpha, &a0, beta, &b0).unwrap(),
            ScalarField::linear_comb(alpha, &a1, beta, &b1).unwrap(),
            SpacetimeField::new(1, move |t: f64, x: &[f64]| {
                alpha * fa.value(t, x) + beta * fb.value(t, x)
            })
            .unwrap(),
        )
        .unwrap();
        let (t, x) = (1.3, [0.2]);
        let ua = solve_1d(&request(t, &x, &data_a, &m, &q)).unwrap();
        let ub = solve_1d(&request(t, &x, &data_b, &m, &q)).unwrap();
        let um = solve_1d(&request(t, &x, &mixed, &m, &q)).unwrap();
        let want = alpha * ua + beta * ub;
        assert!(
            (um - want).abs() <= 1e-12 * want.abs().max(1.0),
            "{um} vs {want}"
        );

        // dim 3, homogeneous. Both fields carry gradients so every solve
        // takes the same (analytic) derivative path; mixing a gradient-free
        // field in would switch paths and cost the last digits.
        let a0 = gaussian(3, &[0.0; 3], 0.9, 1.0);
        let b0 = ScalarField::new(3, |x: &[f64]| (x[0] + 0.5 * x[1] - x[2]).sin())
            .unwrap()
            .with_gradient(|x: &[f64]| {
                let c = (x[0] + 0.5 * x[1] - x[2]).cos();
                vec![c, 0.5 * c, -c]
            });
        let data_a = CauchyData::homogeneous(a0.clone(), ScalarField::zero(3)).unwrap();
        let data_b = CauchyData::homogeneous(b0.clone(), ScalarField::zero(3)).unwrap();
        let mixed = CauchyData::homogeneous(
            ScalarField::linear_comb(alpha, &a0, beta, &b0).unwrap(),
            ScalarField::zero(3),
        )
        .unwrap();
        let (t, x) = (1.1, [0.1, 0.0, -0.2]);
        let ua = solve_nd(&request(t, &x, &data_a, &m, &q)).unwrap();
        let ub = solve_nd(&request(t, &x, &data_b, &m, &q)).unwrap();
        let um = solve_nd(&request(t, &x, &mixed, &m, &q)).unwrap();
        let want = alpha * ua + beta * ub;
        assert!(
            (um - want).abs() <= 1e-12 * want.abs().max(1.0),
            "{um} vs {want}"
        );
    }

    #[test]
    fn support_outside_forward_cone_is_exact() {
        let q = quad();
        let m = params(3.0, 1.0);
        for dim in [1_usize, 3] {
            let data = CauchyData::homogeneous(bump(dim, 1.0), bump(dim, 1.0)).unwrap();
            let report = check_support(&SupportCheck {
                data: &data,
                params: &m,
                quad: &q,
                times: &[0.5, 2.0],
                region: ProbeRegion::OutsideForwardCone,
                margin: 0.05,
                tolerance: SUPPORT_TOLERANCE,
            })
            .unwrap();
            // Every integrand sample sits where the data vanish, so the
            // result is exactly zero, not merely small.
            assert_eq!(report.max_abs, 0.0, "dim {dim}");
            assert!(report.passed);
            assert!(!report.samples.is_empty());
        }
    }

    #[test]
    fn huygens_principle_at_delta_one() {
        // delta = 1, dim 3, no source: the solution vanishes strictly
        // inside the backward cone. This is a genuine cancellation between
        // the leading term and the kernel integrals; the integrands are
        // compactly supported in s, so extra panels pay off directly.
        let mut q = quad();
        q.interval_panels = 32;
        let m = params(2.0, 0.0);
        let data = CauchyData::homogeneous(bump(3, 1.0), ScalarField::zero(3)).unwrap();
        let report = check_support(&SupportCheck {
            data: &data,
            params: &m,
            quad: &q,
            times: &[3.0],
            region: ProbeRegion::InsideBackwardCone,
            margin: 0.1,
            tolerance: 1e-6,
        })
        .unwrap();
        assert!(
            report.passed,
            "max |u| = {} inside the backward cone",
            report.max_abs
        );

        // Too-early time: no interior points.
        let early = check_support(&SupportCheck {
            data: &data,
            params: &m,
            quad: &q,
            times: &[0.9],
            region: ProbeRegion::InsideBackwardCone,
            margin: 0.1,
            tolerance: 1e-6,
        });
        assert!(matches!(early, Err(Error::DomainTooSmall { .. })));
    }

    #[test]
    fn support_check_requires_known_radius() {
        let q = quad();
        let m = params(2.0, 0.0);
        let data =
            CauchyData::homogeneous(gaussian(1, &[0.0], 1.0, 1.0), ScalarField::zero(1))
                .unwrap();
        let err = check_support(&SupportCheck {
            data: &data,
            params: &m,
            quad: &q,
            times: &[1.0],
            region: ProbeRegion::OutsideForwardCone,
            margin: 0.05,
            tolerance: SUPPORT_TOLERANCE,
        });
        assert!(matches!(err, Err(Error::Domain { .. })));
    }

    #[test]
    fn request_validation_errors() {
        let m = params(1.0, 0.0);
        let q = quad();
        let data = CauchyData::homogeneous(ScalarField::zero(2), ScalarField::zero(2)).unwrap();
        assert!(solve(&request(-0.5, &[0.0, 0.0], &data, &m, &q)).is_err());
        assert!(solve(&request(1.0, &[0.0], &data, &m, &q)).is_err());
        assert!(solve(&request(f64::NAN, &[0.0, 0.0], &data, &m, &q)).is_err());
    }
}
