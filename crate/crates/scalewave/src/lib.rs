//! Semi-analytic solver for the wave equation with scale-invariant damping
//! and mass,
//!
//! ```text
//! u_tt - Laplace(u) + mu/(1+t) u_t + nu2/(1+t)^2 u = f(t, x),
//! u(0, x) = u0(x),   u_t(0, x) = u1(x),
//! ```
//!
//! in spatial dimensions 1, 2 and 3. The solution is evaluated pointwise from
//! an exact integral representation: a pair of kernels built from the Gauss
//! hypergeometric function transforms free-wave means of the data into the
//! damped solution. A finite-difference scheme ([`fd_oracle`]) provides an
//! independent cross-check.
//!
//! Module map:
//! - [`model`]: coefficients (with the discriminant `delta = (mu-1)^2 - 4 nu2`)
//!   and Cauchy data as pure callbacks.
//! - [`hypergeom`]: Gauss 2F1 for the parameter families the kernels need.
//! - [`kernels`]: the integral-transform kernel `E` and its boundary traces
//!   `K0`, `K1`.
//! - [`quadrature`]: Gauss-Legendre line rules, sphere means, and the
//!   weighted ball means behind the 2-d descent formula.
//! - [`representation`]: the solvers themselves, plus free-wave building
//!   blocks and support/Huygens scans.
//! - [`fd_oracle`]: second-order explicit schemes (1-d line, 3-d radial) used
//!   to validate the representation.
//! - [`fields`]: ready-made field families (gaussian, sine, bump, constant).
//! - [`cli`]: config-driven command runner behind the `scalewave` binary.

// Validation guards are written as `!(x > 0.0)` on purpose: the negation
// also rejects NaN, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod fd_oracle;
pub mod fields;
pub mod hypergeom;
pub mod kernels;
pub mod model;
pub mod quadrature;
pub mod representation;

pub use error::{Error, Result};
pub use model::{CauchyData, ModelParams, ScalarField, SpacetimeField};
