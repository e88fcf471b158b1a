//! Model parameters and Cauchy data for
//!
//! ```text
//! u_tt - Laplace(u) + mu/(1+t) u_t + nu2/(1+t)^2 u = f,   u(0) = u0,  u_t(0) = u1.
//! ```
//!
//! The pair (mu, nu2) enters every kernel only through the discriminant
//! `delta = (mu - 1)^2 - 4 nu2` and its square root, so both are computed once
//! here and carried along. Only `delta >= 0` is supported; the oscillatory
//! regime `delta < 0` would need hypergeometric evaluation at complex
//! parameters and is rejected at construction.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported spatial dimension.
pub const MAX_DIM: usize = 3;

/// Damping/mass coefficients plus the derived discriminant.
///
/// `delta` is evaluated in one fixed order (`(mu - 1)*(mu - 1) - 4*nu2`) so
/// that equal inputs always produce bit-identical discriminants, which keeps
/// kernel caches and regression baselines stable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    mu: f64,
    nu2: f64,
    delta: f64,
    sqrt_delta: f64,
}

impl ModelParams {
    /// Validates `mu >= 0`, `nu2 >= 0` and `delta >= 0`, then freezes the
    /// derived quantities.
    pub fn new(mu: f64, nu2: f64) -> Result<Self> {
        if !(mu >= 0.0) || !(nu2 >= 0.0) {
            return Err(Error::NegativeCoefficient { mu, nu2 });
        }
        let delta = discriminant(mu, nu2);
        if delta < 0.0 {
            return Err(Error::NegativeDelta { mu, nu2, delta });
        }
        Ok(Self {
            mu,
            nu2,
            delta,
            sqrt_delta: delta.sqrt(),
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu2(&self) -> f64 {
        self.nu2
    }

    /// `(mu - 1)^2 - 4 nu2`.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn sqrt_delta(&self) -> f64 {
        self.sqrt_delta
    }
}

/// `(mu - 1)^2 - 4 nu2` in the one canonical evaluation order.
fn discriminant(mu: f64, nu2: f64) -> f64 {
    let m = mu - 1.0;
    m * m - 4.0 * nu2
}

type ValueFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradientFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type TimeValueFn = Arc<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>;
type TimeGradientFn = Arc<dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync>;

fn check_dim(dim: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension { dim })
    }
}

/// A pure function of position, optionally with an analytic gradient and a
/// known support radius (`phi == 0` outside `|x| <= R`).
///
/// Value callbacks must be pure: quadrature rules may evaluate them many
/// times and in any order.
#[derive(Clone)]
pub struct ScalarField {
    dim: usize,
    value: ValueFn,
    gradient: Option<GradientFn>,
    support_radius: Option<f64>,
    identically_zero: bool,
}

impl ScalarField {
    pub fn new(dim: usize, value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            value: Arc::new(value),
            gradient: None,
            support_radius: None,
            identically_zero: false,
        })
    }

    /// The zero field. Solvers skip integral terms over it entirely.
    pub fn zero(dim: usize) -> Self {
        let mut field = Self::new(dim, |_| 0.0).expect("MAX_DIM covers all callers");
        field = field.with_gradient(move |x| vec![0.0; x.len()]);
        field.support_radius = Some(0.0);
        field.identically_zero = true;
        field
    }

    /// Attach an analytic gradient. Must return one component per dimension.
    pub fn with_gradient(
        mut self,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.gradient = Some(Arc::new(gradient));
        self
    }

    /// Declare that the field vanishes outside `|x| <= radius`.
    pub fn with_support_radius(mut self, radius: f64) -> Self {
        assert!(radius >= 0.0, "support radius must be nonnegative");
        self.support_radius = Some(radius);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim, "position has wrong dimension");
        (self.value)(x)
    }

    pub fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        assert_eq!(x.len(), self.dim, "position has wrong dimension");
        self.gradient.as_ref().map(|g| {
            let out = g(x);
            assert_eq!(out.len(), self.dim, "gradient has wrong dimension");
            out
        })
    }

    pub fn has_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    pub fn support_radius(&self) -> Option<f64> {
        self.support_radius
    }

    pub fn is_identically_zero(&self) -> bool {
        self.identically_zero
    }

    /// `alpha f + beta g`. Gradients combine when both inputs carry one;
    /// support radii combine as the maximum when both are known.
    pub fn linear_comb(alpha: f64, f: &Self, beta: f64, g: &Self) -> Result<Self> {
        if f.dim != g.dim {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "linear combination of fields with dims {} and {}",
                    f.dim, g.dim
                ),
            });
        }
        let (fv, gv) = (f.value.clone(), g.value.clone());
        let mut out = Self::new(f.dim, move |x| alpha * fv(x) + beta * gv(x))?;
        if let (Some(fg), Some(gg)) = (f.gradient.clone(), g.gradient.clone()) {
            out = out.with_gradient(move |x| {
                let (a, b) = (fg(x), gg(x));
                a.iter().zip(&b).map(|(u, v)| alpha * u + beta * v).collect()
            });
        }
        out.support_radius = match (f.support_radius, g.support_radius) {
            (Some(rf), Some(rg)) => Some(rf.max(rg)),
            _ => None,
        };
        out.identically_zero = f.identically_zero && g.identically_zero;
        Ok(out)
    }
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarField")
            .field("dim", &self.dim)
            .field("has_gradient", &self.has_gradient())
            .field("support_radius", &self.support_radius)
            .field("identically_zero", &self.identically_zero)
            .finish()
    }
}

/// A pure function of (t, x), used for source terms. The optional support
/// cone radius `R` declares `f(t, .) == 0` outside `|x| <= R + t`.
#[derive(Clone)]
pub struct SpacetimeField {
    dim: usize,
    value: TimeValueFn,
    gradient_x: Option<TimeGradientFn>,
    support_cone_radius: Option<f64>,
    identically_zero: bool,
}

impl SpacetimeField {
    pub fn new(
        dim: usize,
        value: impl Fn(f64, &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            value: Arc::new(value),
            gradient_x: None,
            support_cone_radius: None,
            identically_zero: false,
        })
    }

    /// The zero source. Solvers skip the source integral entirely.
    pub fn zero(dim: usize) -> Self {
        let mut field = Self::new(dim, |_, _| 0.0).expect("MAX_DIM covers all callers");
        field = field.with_gradient_x(move |_, x| vec![0.0; x.len()]);
        field.support_cone_radius = Some(0.0);
        field.identically_zero = true;
        field
    }

    /// A time-independent source `f(t, x) = phi(x)`. Inherits gradient and
    /// support radius from `phi` (a ball of radius R sits inside the cone R).
    pub fn from_static(phi: &ScalarField) -> Self {
        let v = phi.value.clone();
        let mut field = Self::new(phi.dim, move |_, x| v(x)).expect("phi already validated");
        if let Some(g) = phi.gradient.clone() {
            field = field.with_gradient_x(move |_, x| g(x));
        }
        field.support_cone_radius = phi.support_radius;
        field.identically_zero = phi.identically_zero;
        field
    }

    pub fn with_gradient_x(
        mut self,
        gradient: impl Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.gradient_x = Some(Arc::new(gradient));
        self
    }

    /// Declare that the source vanishes outside the cone `|x| <= radius + t`.
    pub fn with_support_cone(mut self, radius: f64) -> Self {
        assert!(radius >= 0.0, "cone radius must be nonnegative");
        self.support_cone_radius = Some(radius);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self, t: f64, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim, "position has wrong dimension");
        (self.value)(t, x)
    }

    pub fn gradient_x(&self, t: f64, x: &[f64]) -> Option<Vec<f64>> {
        assert_eq!(x.len(), self.dim, "position has wrong dimension");
        self.gradient_x.as_ref().map(|g| {
            let out = g(t, x);
            assert_eq!(out.len(), self.dim, "gradient has wrong dimension");
            out
        })
    }

    pub fn support_cone_radius(&self) -> Option<f64> {
        self.support_cone_radius
    }

    pub fn is_identically_zero(&self) -> bool {
        self.identically_zero
    }

    /// Freeze the time argument, producing the spatial slice `x -> f(t0, x)`.
    pub fn at_time(&self, t0: f64) -> ScalarField {
        let v = self.value.clone();
        let mut slice = ScalarField::new(self.dim, move |x| v(t0, x)).expect("dim already valid");
        if let Some(g) = self.gradient_x.clone() {
            slice = slice.with_gradient(move |x| g(t0, x));
        }
        // Inside the cone R the slice at time t0 lives in |x| <= R + t0.
        slice.support_radius = self.support_cone_radius.map(|r| r + t0);
        slice.identically_zero = self.identically_zero;
        slice
    }
}

impl std::fmt::Debug for SpacetimeField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpacetimeField")
            .field("dim", &self.dim)
            .field("has_gradient_x", &self.gradient_x.is_some())
            .field("support_cone_radius", &self.support_cone_radius)
            .field("identically_zero", &self.identically_zero)
            .finish()
    }
}

/// Initial data plus source, all in one consistent dimension.
#[derive(Debug, Clone)]
pub struct CauchyData {
    dim: usize,
    u0: ScalarField,
    u1: ScalarField,
    f: SpacetimeField,
}

impl CauchyData {
    pub fn new(u0: ScalarField, u1: ScalarField, f: SpacetimeField) -> Result<Self> {
        let dim = u0.dim();
        if u1.dim() != dim || f.dim() != dim {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "u0 is {}-d, u1 is {}-d, f is {}-d",
                    u0.dim(),
                    u1.dim(),
                    f.dim()
                ),
            });
        }
        Ok(Self { dim, u0, u1, f })
    }

    /// Data with no source term.
    pub fn homogeneous(u0: ScalarField, u1: ScalarField) -> Result<Self> {
        let dim = u0.dim();
        Self::new(u0, u1, SpacetimeField::zero(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn u0(&self) -> &ScalarField {
        &self.u0
    }

    pub fn u1(&self) -> &ScalarField {
        &self.u1
    }

    pub fn f(&self) -> &SpacetimeField {
        &self.f
    }

    /// Smallest R with all data supported in `|x| <= R` (cone R for the
    /// source). `None` when some nonzero component has unknown support.
    pub fn support_radius(&self) -> Option<f64> {
        let mut radius = 0.0f64;
        for r in [
            self.u0.support_radius(),
            self.u1.support_radius(),
            self.f.support_cone_radius(),
        ] {
            radius = radius.max(r?);
        }
        Some(radius)
    }
}
