//! Built-in data field families. Every family ships its analytic gradient,
//! which the odd-dimension free-wave operator consumes directly; there is no
//! expression parser, so configs stay reproducible.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ScalarField, SpacetimeField};

/// amplitude * exp(-|x - center|^2 / (2 width^2)); smooth, not compactly
/// supported.
pub fn gaussian(dim: usize, center: &[f64], width: f64, amplitude: f64) -> ScalarField {
    assert!(width > 0.0, "gaussian width must be positive");
    assert_eq!(center.len(), dim, "gaussian center must match dim");
    let c = center.to_vec();
    let inv_w2 = 1.0 / (width * width);
    let c_grad = c.clone();
    ScalarField::new(dim, move |x: &[f64]| {
        let q: f64 = x.iter().zip(&c).map(|(xi, ci)| (xi - ci) * (xi - ci)).sum();
        amplitude * (-0.5 * q * inv_w2).exp()
    })
    .expect("dim checked by caller")
    .with_gradient(move |x: &[f64]| {
        let q: f64 = x
            .iter()
            .zip(&c_grad)
            .map(|(xi, ci)| (xi - ci) * (xi - ci))
            .sum();
        let v = amplitude * (-0.5 * q * inv_w2).exp();
        x.iter()
            .zip(&c_grad)
            .map(|(xi, ci)| -v * (xi - ci) * inv_w2)
            .collect()
    })
}

/// sin(k x_1), constant in the remaining coordinates.
pub fn sine(dim: usize, k: f64) -> ScalarField {
    ScalarField::new(dim, move |x: &[f64]| (k * x[0]).sin())
        .expect("dim range checked by ScalarField")
        .with_gradient(move |x: &[f64]| {
            let mut g = vec![0.0; x.len()];
            g[0] = k * (k * x[0]).cos();
            g
        })
}

/// The standard bump exp(1 - r^2/(r^2 - |x|^2)) inside |x| < r, identically
/// zero outside; smooth everywhere, support radius exactly r, peak value 1.
pub fn bump(dim: usize, r: f64) -> ScalarField {
    assert!(r > 0.0, "bump radius must be positive");
    let r2 = r * r;
    ScalarField::new(dim, move |x: &[f64]| {
        let q: f64 = x.iter().map(|xi| xi * xi).sum();
        if q >= r2 {
            0.0
        } else {
            (1.0 - r2 / (r2 - q)).exp()
        }
    })
    .expect("dim range checked by ScalarField")
    .with_gradient(move |x: &[f64]| {
        let q: f64 = x.iter().map(|xi| xi * xi).sum();
        if q >= r2 {
            vec![0.0; x.len()]
        } else {
            let v = (1.0 - r2 / (r2 - q)).exp();
            let factor = -2.0 * r2 * v / ((r2 - q) * (r2 - q));
            x.iter().map(|xi| factor * xi).collect()
        }
    })
    .with_support_radius(r)
}

/// Constant value c everywhere.
pub fn constant(dim: usize, c: f64) -> ScalarField {
    ScalarField::new(dim, move |_: &[f64]| c)
        .expect("dim range checked by ScalarField")
        .with_gradient(|x: &[f64]| vec![0.0; x.len()])
}

fn one() -> f64 {
    1.0
}

/// Serializable name for one built-in family, as written in run configs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FieldSpec {
    Gaussian {
        #[serde(default)]
        center: Vec<f64>,
        #[serde(default = "one")]
        width: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    Sine {
        k: f64,
    },
    Bump {
        r: f64,
    },
    Constant {
        c: f64,
    },
    #[default]
    Zero,
}

impl FieldSpec {
    /// Instantiate as initial data in the given dimension.
    pub fn build(&self, dim: usize) -> Result<ScalarField> {
        match self {
            FieldSpec::Gaussian {
                center,
                width,
                amplitude,
            } => {
                if !(*width > 0.0) {
                    return Err(Error::Config(format!(
                        "gaussian width must be positive, got {width}"
                    )));
                }
                let center = if center.is_empty() {
                    vec![0.0; dim]
                } else if center.len() == dim {
                    center.clone()
                } else {
                    return Err(Error::Config(format!(
                        "gaussian center has {} entries but dim = {dim}",
                        center.len()
                    )));
                };
                Ok(gaussian(dim, &center, *width, *amplitude))
            }
            FieldSpec::Sine { k } => Ok(sine(dim, *k)),
            FieldSpec::Bump { r } => {
                if !(*r > 0.0) {
                    return Err(Error::Config(format!(
                        "bump radius must be positive, got {r}"
                    )));
                }
                Ok(bump(dim, *r))
            }
            FieldSpec::Constant { c } => Ok(constant(dim, *c)),
            FieldSpec::Zero => Ok(ScalarField::zero(dim)),
        }
    }

    /// Instantiate as a time-independent source term.
    pub fn build_source(&self, dim: usize) -> Result<SpacetimeField> {
        Ok(SpacetimeField::from_static(&self.build(dim)?))
    }

    /// Whether the family depends on x through |x| only. Radial reductions
    /// (the 3-d oracle comparison) require this of all three data fields.
    pub fn is_radially_symmetric(&self) -> bool {
        match self {
            FieldSpec::Gaussian { center, .. } => center.iter().all(|&c| c == 0.0),
            FieldSpec::Sine { .. } => false,
            FieldSpec::Bump { .. } | FieldSpec::Constant { .. } | FieldSpec::Zero => true,
        }
    }
}
