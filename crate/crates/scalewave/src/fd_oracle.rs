//! Independent finite-difference reference solvers: a 1-d leapfrog scheme
//! and a radial 3-d reduction onto it. These share no code with the
//! representation formulas; agreement between the two is the main
//! correctness evidence for both.
//!
//! The damping term is time-centered so the update stays explicit and
//! second order:
//!
//! ```text
//! u^{n+1}_j = [ 2 u^n_j - (1 - a_n) u^{n-1}_j
//!             + dt^2 (D2x u^n_j - nu2/(1+t_n)^2 u^n_j + f(t_n, x_j)) ]
//!             / (1 + a_n),              a_n = mu dt / (2 (1 + t_n)),
//! ```
//!
//! with a Taylor first step. At mu = nu2 = 0 the factors (1 -+ a_n) are
//! exactly 1 and the scheme is the plain leapfrog bit for bit.

use crate::error::{Error, Result};
use crate::model::{CauchyData, ModelParams};

/// Uniform space-time grid for the 1-d scheme. `nx` nodes span
/// [x_min, x_max]; time advances by `dt` up to `t_end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub dt: f64,
    pub t_end: f64,
}

impl Grid1D {
    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 3 {
            return Err(Error::DomainTooSmall {
                context: format!("grid needs at least 3 nodes, got {}", self.nx),
            });
        }
        if !(self.x_max > self.x_min) {
            return Err(Error::DomainTooSmall {
                context: format!("empty x-range [{}, {}]", self.x_min, self.x_max),
            });
        }
        if !(self.dt > 0.0) || !(self.t_end >= 0.0) {
            return Err(Error::Domain {
                context: format!("need dt > 0 and t_end >= 0, got {} and {}", self.dt, self.t_end),
            });
        }
        // CFL for unit propagation speed, with headroom.
        let limit = 0.9 * self.dx();
        if self.dt > limit {
            return Err(Error::CflViolation {
                dt: self.dt,
                limit,
            });
        }
        Ok(())
    }

    /// Grid with dt picked at half the CFL bound for the requested
    /// resolution, rounded so t_end is hit exactly.
    pub fn with_auto_dt(x_min: f64, x_max: f64, nx: usize, t_end: f64) -> Self {
        let dx = (x_max - x_min) / (nx.max(2) - 1) as f64;
        let steps = (t_end / (0.45 * dx)).ceil().max(1.0);
        Self {
            x_min,
            x_max,
            nx,
            dt: t_end / steps,
            t_end,
        }
    }
}

/// The solution values at one reported time.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSlice {
    pub t: f64,
    pub values: Vec<f64>,
}

/// March the 1-d scheme and return slices at the requested times, each
/// snapped to the nearest time step (the slice records the actual time).
/// The caller is responsible for a domain wide enough that boundary effects
/// cannot reach the region of interest: values at the two boundary nodes
/// are frozen after the first step, which is exact only outside the cone of
/// dependence of the data.
pub fn fd_solve_1d(
    data: &CauchyData,
    params: &ModelParams,
    grid: &Grid1D,
    report_times: &[f64],
) -> Result<Vec<SolutionSlice>> {
    if data.dim() != 1 {
        return Err(Error::DimensionMismatch {
            context: format!("fd_solve_1d needs 1-d data, got {}-d", data.dim()),
        });
    }
    grid.validate()?;
    for &t in report_times {
        if !(0.0 <= t && t <= grid.t_end * (1.0 + 1e-12)) {
            return Err(Error::Domain {
                context: format!("report time {t} outside [0, {}]", grid.t_end),
            });
        }
    }
    let nx = grid.nx;
    let dx = grid.dx();
    let dt = grid.dt;
    let mu = params.mu();
    let nu2 = params.nu2();
    let xs: Vec<f64> = (0..nx).map(|j| grid.x_min + j as f64 * dx).collect();
    let steps = (grid.t_end / dt).round() as usize;

    let u0 = data.u0();
    let u1 = data.u1();
    let f = data.f();
    let f_zero = f.is_identically_zero();
    let fval = |t: f64, x: f64| if f_zero { 0.0 } else { f.value(t, &[x]) };

    let mut prev: Vec<f64> = xs.iter().map(|&x| u0.value(&[x])).collect();

    // Taylor start: u(dt) = u0 + dt u1 + dt^2/2 (u0'' - mu u1 - nu2 u0 + f(0)).
    let mut curr = vec![0.0; nx];
    curr[0] = prev[0];
    curr[nx - 1] = prev[nx - 1];
    for j in 1..nx - 1 {
        let lap = (prev[j + 1] - 2.0 * prev[j] + prev[j - 1]) / (dx * dx);
        let v1 = u1.value(&[xs[j]]);
        curr[j] = prev[j]
            + dt * v1
            + 0.5 * dt * dt * (lap - mu * v1 - nu2 * prev[j] + fval(0.0, xs[j]));
    }

    let mut report: Vec<(usize, f64)> = report_times
        .iter()
        .map(|&t| {
            let n = (t / dt).round().min(steps as f64).max(0.0) as usize;
            (n, t)
        })
        .collect();
    report.sort_by_key(|(n, _)| *n);

    let mut out = Vec::with_capacity(report.len());
    let mut next_report = 0;
    let mut emit = |n: usize, values: &Vec<f64>, next_report: &mut usize| {
        while *next_report < report.len() && report[*next_report].0 == n {
            out.push(SolutionSlice {
                t: n as f64 * dt,
                values: values.clone(),
            });
            *next_report += 1;
        }
    };
    emit(0, &prev, &mut next_report);
    emit(1, &curr, &mut next_report);

    let dt2 = dt * dt;
    for n in 1..steps {
        let tn = n as f64 * dt;
        let a = mu * dt / (2.0 * (1.0 + tn));
        let react = nu2 / ((1.0 + tn) * (1.0 + tn));
        let mut next = vec![0.0; nx];
        next[0] = curr[0];
        next[nx - 1] = curr[nx - 1];
        for j in 1..nx - 1 {
            let lap = (curr[j + 1] - 2.0 * curr[j] + curr[j - 1]) / (dx * dx);
            let rhs = 2.0 * curr[j] - (1.0 - a) * prev[j]
                + dt2 * (lap - react * curr[j] + fval(tn, xs[j]));
            next[j] = rhs / (1.0 + a);
        }
        prev = curr;
        curr = next;
        emit(n + 1, &curr, &mut next_report);
    }
    // Requested times beyond the last computed step (within rounding).
    emit(steps, &curr, &mut next_report);
    Ok(out)
}

/// Check that the cones of dependence of `[x_lo, x_hi]` up to `t_end` stay
/// strictly inside the grid, where the frozen-boundary treatment is exact.
pub fn check_padding(grid: &Grid1D, x_lo: f64, x_hi: f64) -> Result<()> {
    if grid.x_min > x_lo - grid.t_end || grid.x_max < x_hi + grid.t_end {
        return Err(Error::DomainTooSmall {
            context: format!(
                "grid [{}, {}] cannot isolate [{x_lo}, {x_hi}] up to t = {}: \
                 needs [{}, {}]",
                grid.x_min,
                grid.x_max,
                grid.t_end,
                x_lo - grid.t_end,
                x_hi + grid.t_end
            ),
        });
    }
    Ok(())
}

/// Radial 3-d solve via the substitution U = r u, which turns the radial
/// wave operator into the 1-d one with source r f and a Dirichlet condition
/// U(t, 0) = 0. Data callbacks are sampled at (r, 0, 0). The grid must
/// start at x_min = 0 and slices return u(t, r) with the r = 0 value filled
/// by even-symmetry parabolic extrapolation.
pub fn fd_solve_radial_3d(
    data: &CauchyData,
    params: &ModelParams,
    grid: &Grid1D,
    report_times: &[f64],
) -> Result<Vec<SolutionSlice>> {
    if data.dim() != 3 {
        return Err(Error::DimensionMismatch {
            context: format!("fd_solve_radial_3d needs 3-d data, got {}-d", data.dim()),
        });
    }
    if grid.x_min != 0.0 {
        return Err(Error::Domain {
            context: format!("radial grid must start at r = 0, got {}", grid.x_min),
        });
    }
    grid.validate()?;

    let u0 = data.u0().clone();
    let u1 = data.u1().clone();
    let f = data.f().clone();
    let f_zero = f.is_identically_zero();
    let scaled = CauchyData::new(
        crate::model::ScalarField::new(1, move |x: &[f64]| x[0] * u0.value(&[x[0], 0.0, 0.0]))?,
        crate::model::ScalarField::new(1, move |x: &[f64]| x[0] * u1.value(&[x[0], 0.0, 0.0]))?,
        if f_zero {
            crate::model::SpacetimeField::zero(1)
        } else {
            crate::model::SpacetimeField::new(1, move |t: f64, x: &[f64]| {
                x[0] * f.value(t, &[x[0], 0.0, 0.0])
            })?
        },
    )?;

    // U(t, 0) = 0 holds automatically: the scaled data vanish at r = 0 and
    // the frozen boundary keeps the node there.
    let slices = fd_solve_1d(&scaled, params, grid, report_times)?;
    let dx = grid.dx();
    Ok(slices
        .into_iter()
        .map(|s| {
            let mut values: Vec<f64> = s
                .values
                .iter()
                .enumerate()
                .map(|(j, &uj)| if j == 0 { 0.0 } else { uj / (j as f64 * dx) })
                .collect();
            // u is even in r, so u(0) = (4 u(dx) - u(2 dx)) / 3 from the
            // parabola through (+-dx, +-2dx).
            if values.len() >= 3 {
                values[0] = (4.0 * values[1] - values[2]) / 3.0;
            }
            SolutionSlice {
                t: s.t,
                values,
            }
        })
        .collect())
}
