//! Deterministic fixed-order quadrature: composite Gauss-Legendre on
//! intervals, a product rule for sphere means, and the singular-weight ball
//! means behind the 2-d descent formula.
//!
//! All integrands handled here are smooth on their domains (the ball rule
//! removes its boundary weight analytically), so fixed orders beat adaptive
//! schemes on determinism and make error tolerances reproducible. Resolution
//! is controlled only through [`QuadratureConfig`].

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::model::ScalarField;

/// Resolution knobs for every rule in the crate.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct QuadratureConfig {
    /// Gauss-Legendre nodes per interval panel.
    pub interval_order: usize,
    /// Number of equal panels a line integral is split into.
    pub interval_panels: usize,
    /// Gauss-Legendre nodes in cos(theta) for sphere means.
    pub sphere_polar: usize,
    /// Equally spaced azimuth nodes for sphere means (periodic trapezoid).
    pub sphere_azimuthal: usize,
    /// Gauss-Legendre nodes in the polar substitution angle for ball means.
    pub ball_radial: usize,
    /// Equally spaced angular nodes for ball means.
    pub ball_angular: usize,
    /// Step for numeric time derivatives in the free-wave operators.
    /// Scaled by max(1, t) at use sites; must stay below 1e-1.
    pub t_derivative_step: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            interval_order: 16,
            interval_panels: 8,
            sphere_polar: 16,
            sphere_azimuthal: 32,
            ball_radial: 24,
            ball_angular: 48,
            // Balances h^2 truncation against eps/h roundoff for O(1)
            // brackets; the classical-reduction identities need the
            // truncation side below 1e-9.
            t_derivative_step: 2.5e-5,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("interval_order", self.interval_order),
            ("interval_panels", self.interval_panels),
            ("sphere_polar", self.sphere_polar),
            ("sphere_azimuthal", self.sphere_azimuthal),
            ("ball_radial", self.ball_radial),
            ("ball_angular", self.ball_angular),
        ];
        for (name, value) in positive {
            if value == 0 {
                return Err(Error::Domain {
                    context: format!("quadrature {name} must be positive"),
                });
            }
        }
        if !(self.t_derivative_step > 0.0 && self.t_derivative_step < 1e-1) {
            return Err(Error::Domain {
                context: format!(
                    "t_derivative_step = {} outside (0, 1e-1)",
                    self.t_derivative_step
                ),
            });
        }
        Ok(())
    }
}

/// Shared (nodes, weights) pair of one cached rule.
pub type Rule = Arc<(Vec<f64>, Vec<f64>)>;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// ascending node order. Rules are cached per order; results are
/// deterministic (Newton iteration on the Legendre polynomial from fixed
/// initial guesses, symmetrized).
pub fn gauss_legendre(order: usize) -> Rule {
    assert!(order >= 1, "Gauss-Legendre order must be at least 1");
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut cache = cache.lock().expect("quadrature cache poisoned");
    cache
        .entry(order)
        .or_insert_with(|| Arc::new(gauss_legendre_raw(order)))
        .clone()
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0_f64;
    let mut p = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

fn gauss_legendre_raw(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Root i counted from +1, standard asymptotic initial guess.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let step = p / dp;
            x -= step;
            if step.abs() <= 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, dp) = legendre_with_derivative(n, 0.0);
        weights[n / 2] = 2.0 / (dp * dp);
    }
    (nodes, weights)
}

/// Composite Gauss-Legendre integral of `f` over [a, b]. A degenerate
/// interval yields exactly 0; a reversed interval yields the signed value.
pub fn integrate_interval(f: impl Fn(f64) -> f64, a: f64, b: f64, cfg: &QuadratureConfig) -> f64 {
    if a == b {
        return 0.0;
    }
    let rule = gauss_legendre(cfg.interval_order);
    let (nodes, weights) = (&rule.0, &rule.1);
    let panels = cfg.interval_panels.max(1);
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let mid = lo + 0.5 * width;
        let half = 0.5 * width;
        let mut acc = 0.0;
        for (x, w) in nodes.iter().zip(weights) {
            acc += w * f(mid + half * x);
        }
        total += acc * half;
    }
    total
}

/// Unit direction for polar cosine `c` and azimuth `alpha`.
#[inline]
fn sphere_direction(c: f64, alpha: f64) -> [f64; 3] {
    let s = (1.0 - c * c).max(0.0).sqrt();
    [s * alpha.cos(), s * alpha.sin(), c]
}

/// Average of `phi` over the sphere of radius `r` about `center` (dim 3):
/// Gauss-Legendre in cos(theta) times periodic trapezoid in azimuth.
/// `r = 0` returns `phi(center)`.
pub fn sphere_mean(phi: &ScalarField, center: &[f64], r: f64, cfg: &QuadratureConfig) -> f64 {
    assert_eq!(phi.dim(), 3, "sphere_mean needs a 3-d field");
    assert_eq!(center.len(), 3, "sphere_mean needs a 3-d center");
    assert!(r >= 0.0, "sphere radius must be nonnegative");
    if r == 0.0 {
        return phi.value(center);
    }
    sphere_rule(center, r, cfg, |point, _| phi.value(point))
}

/// Average of the radial derivative `grad(phi) . omega` over the sphere of
/// radius `r` about `center`; this is d/dr of [`sphere_mean`] when `phi`
/// carries an analytic gradient. `None` when it does not.
pub fn sphere_mean_normal_derivative(
    phi: &ScalarField,
    center: &[f64],
    r: f64,
    cfg: &QuadratureConfig,
) -> Option<f64> {
    assert_eq!(phi.dim(), 3, "sphere_mean needs a 3-d field");
    assert_eq!(center.len(), 3, "sphere_mean needs a 3-d center");
    if !phi.has_gradient() {
        return None;
    }
    Some(sphere_rule(center, r, cfg, |point, omega| {
        let g = phi.gradient(point).expect("checked above");
        g[0] * omega[0] + g[1] * omega[1] + g[2] * omega[2]
    }))
}

/// Shared sphere product rule: averages `f(point, omega)` over directions.
fn sphere_rule(
    center: &[f64],
    r: f64,
    cfg: &QuadratureConfig,
    f: impl Fn(&[f64; 3], &[f64; 3]) -> f64,
) -> f64 {
    let rule = gauss_legendre(cfg.sphere_polar);
    let (nodes, weights) = (&rule.0, &rule.1);
    let n_az = cfg.sphere_azimuthal.max(1);
    let d_alpha = 2.0 * PI / n_az as f64;
    let mut acc = 0.0;
    for (c, w) in nodes.iter().zip(weights) {
        let mut ring = 0.0;
        for j in 0..n_az {
            let alpha = d_alpha * j as f64;
            let omega = sphere_direction(*c, alpha);
            let point = [
                center[0] + r * omega[0],
                center[1] + r * omega[1],
                center[2] + r * omega[2],
            ];
            ring += f(&point, &omega);
        }
        acc += w * ring / n_az as f64;
    }
    // Gauss weights sum to 2; the spherical average divides by it.
    acc / 2.0
}

/// Singularity-weighted ball average in the plane (dim 2):
///
/// ```text
/// (1/(pi r^2)) Int_{B_r(center)} phi(z) (r^2 - |z - center|^2)^(-1/2) dz
/// ```
///
/// The substitution rho = r sin(theta) cancels the boundary weight exactly:
///
/// ```text
/// = (1/(pi r)) Int_0^{2pi} Int_0^{pi/2} phi(center + r sin(theta) w(alpha))
///       sin(theta) dtheta dalpha,
/// ```
///
/// leaving a smooth integrand (Gauss-Legendre in theta, trapezoid in alpha).
/// Scales as 2/r for constant phi, so the value diverges as r -> 0; callers
/// multiply by r^2 before differentiating.
pub fn ball_weighted_mean(phi: &ScalarField, center: &[f64], r: f64, cfg: &QuadratureConfig) -> f64 {
    assert_eq!(phi.dim(), 2, "ball_weighted_mean needs a 2-d field");
    assert_eq!(center.len(), 2, "ball_weighted_mean needs a 2-d center");
    assert!(r > 0.0, "ball radius must be positive (the mean diverges at 0)");
    let rule = gauss_legendre(cfg.ball_radial);
    let (nodes, weights) = (&rule.0, &rule.1);
    let n_ang = cfg.ball_angular.max(1);
    let d_alpha = 2.0 * PI / n_ang as f64;
    // Map [-1, 1] to theta in [0, pi/2].
    let half = PI / 4.0;
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        let theta = half * (x + 1.0);
        let (sin_t, _) = theta.sin_cos();
        let rho = r * sin_t;
        let mut ring = 0.0;
        for j in 0..n_ang {
            let alpha = d_alpha * j as f64;
            let point = [center[0] + rho * alpha.cos(), center[1] + rho * alpha.sin()];
            ring += phi.value(&point);
        }
        acc += w * sin_t * ring;
    }
    // Azimuth trapezoid spacing, theta map Jacobian pi/4, prefactor 1/(pi r).
    acc * d_alpha * half / (PI * r)
}
