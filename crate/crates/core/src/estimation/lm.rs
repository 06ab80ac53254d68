//! Damped least squares with numeric Jacobians.
//!
//! Parameters live in an internal space related to the external (physical)
//! values by per-parameter transforms; positive-bounded parameters use a
//! log transform so the optimizer works unconstrained. Jacobians are
//! central finite differences in internal space. Model evaluation failures
//! at a trial point (e.g. a series pushed outside its domain) reject the
//! step instead of aborting the fit.

use crate::error::{Error, Result};

/// Map between internal (optimizer) and external (physical) parameter values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Transform {
    Identity,
    /// external = exp(internal); keeps the parameter strictly positive
    Log,
}

impl Transform {
    pub(crate) fn to_internal(self, external: f64) -> Result<f64> {
        match self {
            Transform::Identity => Ok(external),
            Transform::Log => {
                if external <= 0.0 {
                    return Err(Error::domain(
                        "fit start",
                        format!("log-transformed parameter must start positive, got {external}"),
                    ));
                }
                Ok(external.ln())
            }
        }
    }

    pub(crate) fn to_external(self, internal: f64) -> f64 {
        match self {
            Transform::Identity => internal,
            Transform::Log => internal.exp(),
        }
    }

    /// d(external)/d(internal) at the given internal value.
    pub(crate) fn jacobian(self, internal: f64) -> f64 {
        match self {
            Transform::Identity => 1.0,
            Transform::Log => internal.exp(),
        }
    }
}

pub(crate) fn to_external(transforms: &[Transform], internal: &[f64]) -> Vec<f64> {
    transforms.iter().zip(internal).map(|(t, &p)| t.to_external(p)).collect()
}

#[derive(Debug, Clone)]
pub(crate) struct LmOptions {
    pub max_iterations: usize,
    pub gradient_tol: f64,
    pub step_tol: f64,
    pub initial_lambda: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions { max_iterations: 300, gradient_tol: 1e-11, step_tol: 1e-13, initial_lambda: 1e-3 }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct LmOutcome {
    /// Internal-space optimum
    pub params: Vec<f64>,
    pub chi2: f64,
    pub converged: bool,
}

/// Residuals in internal space; `Err` marks the point as infeasible.
pub(crate) type ResidualFn<'a> = dyn FnMut(&[f64], &mut [f64]) -> Result<()> + 'a;

fn try_chi2(f: &mut ResidualFn, p: &[f64], buf: &mut [f64]) -> Option<f64> {
    match f(p, buf) {
        Ok(()) => {
            let chi2: f64 = buf.iter().map(|r| r * r).sum();
            chi2.is_finite().then_some(chi2)
        }
        Err(_) => None,
    }
}

/// Central-difference Jacobian, falling back to one-sided at infeasible
/// evaluation points. `jac[i][j]` = ∂r_i/∂p_j.
pub(crate) fn numeric_jacobian(
    f: &mut ResidualFn,
    p: &[f64],
    n_residuals: usize,
) -> Result<Vec<Vec<f64>>> {
    let n = p.len();
    let mut jac = vec![vec![0.0; n]; n_residuals];
    let mut plus = vec![0.0; n_residuals];
    let mut minus = vec![0.0; n_residuals];
    let mut point = p.to_vec();
    for j in 0..n {
        let h = 6e-6 * p[j].abs().max(1.0);
        point[j] = p[j] + h;
        let ok_plus = f(&point, &mut plus).is_ok();
        point[j] = p[j] - h;
        let ok_minus = f(&point, &mut minus).is_ok();
        point[j] = p[j];
        match (ok_plus, ok_minus) {
            (true, true) => {
                for i in 0..n_residuals {
                    jac[i][j] = (plus[i] - minus[i]) / (2.0 * h);
                }
            }
            (true, false) | (false, true) => {
                let mut center = vec![0.0; n_residuals];
                f(&point, &mut center)?;
                let (side, sign) = if ok_plus { (&plus, 1.0) } else { (&minus, -1.0) };
                for i in 0..n_residuals {
                    jac[i][j] = sign * (side[i] - center[i]) / h;
                }
            }
            (false, false) => {
                return Err(Error::NonConvergence {
                    context: "numeric_jacobian",
                    message: format!("model infeasible on both sides of parameter {j}"),
                });
            }
        }
    }
    Ok(jac)
}

/// Solve A·x = b for a small dense symmetric system by Gaussian elimination
/// with partial pivoting.
pub(crate) fn solve_dense(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().map(|row| row.clone()).collect();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        let pivot = m[pivot_row][col];
        let scale: f64 = m.iter().map(|row| row[col].abs()).fold(0.0, f64::max);
        if pivot.abs() <= 1e-14 * scale.max(1e-300) || pivot == 0.0 {
            return Err(Error::DegenerateDesign(format!("singular normal equations at column {col}")));
        }
        m.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        for row in (col + 1)..n {
            let factor = m[row][col] / m[col][col];
            if factor != 0.0 {
                for k in col..n {
                    m[row][k] -= factor * m[col][k];
                }
                rhs[row] -= factor * rhs[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in (row + 1)..n {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Ok(x)
}

/// Inverse of a small symmetric matrix, column by column.
pub(crate) fn invert_dense(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = a.len();
    let mut inverse = vec![vec![0.0; n]; n];
    for col in 0..n {
        let mut e = vec![0.0; n];
        e[col] = 1.0;
        let x = solve_dense(a, &e)?;
        for row in 0..n {
            inverse[row][col] = x[row];
        }
    }
    // symmetrize against elimination round-off
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (inverse[i][j] + inverse[j][i]);
            inverse[i][j] = avg;
            inverse[j][i] = avg;
        }
    }
    Ok(inverse)
}

pub(crate) fn levenberg_marquardt(
    f: &mut ResidualFn,
    initial: &[f64],
    n_residuals: usize,
    options: &LmOptions,
) -> Result<LmOutcome> {
    let n = initial.len();
    let mut p = initial.to_vec();
    let mut residuals = vec![0.0; n_residuals];
    let mut chi2 = try_chi2(f, &p, &mut residuals).ok_or_else(|| Error::NonConvergence {
        context: "levenberg_marquardt",
        message: "model infeasible at the starting point".into(),
    })?;

    let mut lambda = options.initial_lambda;
    let mut converged = false;
    for _ in 0..options.max_iterations {
        let jac = numeric_jacobian(f, &p, n_residuals)?;
        // gradient g = Jᵀr and normal matrix A = JᵀJ
        let mut gradient = vec![0.0; n];
        let mut normal = vec![vec![0.0; n]; n];
        for i in 0..n_residuals {
            for j in 0..n {
                gradient[j] += jac[i][j] * residuals[i];
                for k in j..n {
                    normal[j][k] += jac[i][j] * jac[i][k];
                }
            }
        }
        for j in 0..n {
            for k in 0..j {
                normal[j][k] = normal[k][j];
            }
        }

        let gmax = gradient.iter().map(|g| g.abs()).fold(0.0, f64::max);
        if gmax <= options.gradient_tol * chi2.max(1e-30) {
            converged = true;
            break;
        }

        let mut accepted = false;
        for _ in 0..24 {
            let mut damped = normal.clone();
            for j in 0..n {
                damped[j][j] += lambda * normal[j][j].max(1e-30);
            }
            let Ok(step) = solve_dense(&damped, &gradient) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = p.iter().zip(&step).map(|(pi, si)| pi - si).collect();
            let mut trial_res = vec![0.0; n_residuals];
            if let Some(trial_chi2) = try_chi2(f, &trial, &mut trial_res) {
                if trial_chi2 <= chi2 {
                    let step_norm: f64 = step.iter().map(|s| s * s).sum::<f64>().sqrt();
                    let p_norm: f64 = p.iter().map(|x| x * x).sum::<f64>().sqrt();
                    let improvement = chi2 - trial_chi2;
                    p = trial;
                    residuals = trial_res;
                    chi2 = trial_chi2;
                    lambda = (lambda * 0.35).max(1e-14);
                    accepted = true;
                    if step_norm <= options.step_tol * (p_norm + options.step_tol)
                        || improvement <= 1e-15 * chi2.max(1e-30)
                    {
                        converged = true;
                    }
                    break;
                }
            }
            lambda *= 10.0;
            if lambda > 1e14 {
                break;
            }
        }
        if converged {
            break;
        }
        if !accepted {
            // damping saturated; treat the current point as final
            converged = gmax <= 1e-6 * chi2.max(1e-30) || chi2 <= 1e-24;
            break;
        }
    }

    Ok(LmOutcome { params: p, chi2, converged })
}

/// Weighted covariance (JᵀJ)⁻¹ of the residual function at the optimum, in
/// internal space. If the normal matrix is singular (a parameter has gone
/// unidentifiable, e.g. a damping rate driven to zero), falls back to a
/// Tikhonov-regularized inverse so the dead direction reports an
/// arbitrarily large variance; the flag marks the fallback.
pub(crate) fn covariance_at(
    f: &mut ResidualFn,
    p: &[f64],
    n_residuals: usize,
) -> Result<(Vec<Vec<f64>>, bool)> {
    let jac = numeric_jacobian(f, p, n_residuals)?;
    let n = p.len();
    let mut normal = vec![vec![0.0; n]; n];
    for row in &jac {
        for j in 0..n {
            for k in j..n {
                normal[j][k] += row[j] * row[k];
            }
        }
    }
    for j in 0..n {
        for k in 0..j {
            normal[j][k] = normal[k][j];
        }
    }
    if let Ok(cov) = invert_dense(&normal) {
        return Ok((cov, false));
    }
    let max_diag = (0..n).map(|j| normal[j][j]).fold(0.0f64, f64::max).max(1e-300);
    let mut damped = normal;
    for j in 0..n {
        damped[j][j] += 1e-12 * max_diag;
    }
    Ok((invert_dense(&damped)?, true))
}
