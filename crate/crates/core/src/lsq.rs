//! Levenberg-Marquardt damped least squares with a central-difference
//! Jacobian.
//!
//! Each iteration solves `(JᵀJ + λ·diag JᵀJ) δ = −Jᵀr`. A step that does not
//! lower `‖r‖²` is rejected and `λ` grows tenfold, so the accepted residual
//! sequence never increases.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsqOptions {
    pub max_iter: usize,
    /// Stop when the largest gradient cosine `|Jⱼᵀr|/(‖Jⱼ‖‖r‖)` drops below.
    pub gtol: f64,
    /// Stop when every relative parameter change drops below.
    pub xtol: f64,
    /// Stop when the relative decrease of `‖r‖²` drops below.
    pub ftol: f64,
    pub lambda0: f64,
    /// Jacobian step relative to `max(|xⱼ|, typicalⱼ)`.
    pub jac_rel_step: f64,
}

impl Default for LsqOptions {
    fn default() -> Self {
        Self { max_iter: 200, gtol: 1e-10, xtol: 1e-12, ftol: 1e-14, lambda0: 1e-3, jac_rel_step: 1e-6 }
    }
}

/// Gradient cosine below which a stop counts as converged.
pub const CONVERGED_GRADIENT: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct LsqResult {
    pub x: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `‖r‖²`.
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Largest gradient cosine at the returned point.
    pub gradient_cosine: f64,
    /// `s²(JᵀJ)⁻¹` with `s² = ‖r‖²/(m − n)`, row-major. `None` when `JᵀJ`
    /// is singular.
    pub covariance: Option<Vec<f64>>,
    /// Accepted `‖r‖²` after every iteration, starting with the initial one.
    pub cost_history: Vec<f64>,
}

impl LsqResult {
    /// One-sigma parameter uncertainties, `NaN` when the covariance is missing.
    pub fn uncertainties(&self) -> Vec<f64> {
        let n = self.x.len();
        match &self.covariance {
            Some(c) => (0..n).map(|i| math::sqrt(c[i * n + i].max(0.0))).collect(),
            None => vec![f64::NAN; n],
        }
    }

    pub fn rms(&self) -> f64 {
        math::sqrt(self.cost / self.residuals.len() as f64)
    }
}

fn sum_sq(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

/// Central-difference Jacobian, row-major `m × n`.
pub fn jacobian<F>(f: &mut F, x: &[f64], typical: &[f64], m: usize, rel: f64) -> Result<Vec<f64>>
where
    F: FnMut(&[f64], &mut [f64]) -> Result<()>,
{
    let n = x.len();
    let mut jac = vec![0.0; m * n];
    let mut xp = x.to_vec();
    let mut rp = vec![0.0; m];
    let mut rm = vec![0.0; m];
    for j in 0..n {
        let h = rel * math::abs(x[j]).max(typical[j]);
        xp[j] = x[j] + h;
        f(&xp, &mut rp)?;
        xp[j] = x[j] - h;
        f(&xp, &mut rm)?;
        xp[j] = x[j];
        for i in 0..m {
            jac[i * n + j] = (rp[i] - rm[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// In-place Cholesky of a symmetric `n × n` matrix; lower factor returned.
fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i * n + i] = math::sqrt(s);
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

fn cholesky_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[i * n + k] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= l[k * n + i] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    y
}

/// Solve the symmetric positive-definite system `a·x = b`.
pub fn solve_spd(a: &[f64], n: usize, b: &[f64]) -> Result<Vec<f64>> {
    let l = cholesky(a, n).ok_or(Error::Singular)?;
    Ok(cholesky_solve(&l, n, b))
}

fn normal_equations(jac: &[f64], r: &[f64], m: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut jtj = vec![0.0; n * n];
    let mut jtr = vec![0.0; n];
    for i in 0..m {
        let row = &jac[i * n..(i + 1) * n];
        for a in 0..n {
            jtr[a] += row[a] * r[i];
            for b in 0..=a {
                jtj[a * n + b] += row[a] * row[b];
            }
        }
    }
    for a in 0..n {
        for b in 0..a {
            jtj[b * n + a] = jtj[a * n + b];
        }
    }
    (jtj, jtr)
}

fn gradient_cosine(jtj: &[f64], jtr: &[f64], cost: f64, n: usize) -> f64 {
    if cost == 0.0 {
        return 0.0;
    }
    let rn = math::sqrt(cost);
    (0..n)
        .map(|j| {
            let cn = math::sqrt(jtj[j * n + j]);
            if cn == 0.0 {
                0.0
            } else {
                math::abs(jtr[j]) / (cn * rn)
            }
        })
        .fold(0.0, f64::max)
}

/// Minimize `‖r(x)‖²` for a residual function writing `m` values.
///
/// `typical` sets the Jacobian step floor for parameters that may pass
/// through zero.
pub fn levenberg_marquardt<F>(
    mut f: F,
    x0: &[f64],
    typical: &[f64],
    m: usize,
    opts: &LsqOptions,
) -> Result<LsqResult>
where
    F: FnMut(&[f64], &mut [f64]) -> Result<()>,
{
    let n = x0.len();
    if typical.len() != n {
        return Err(Error::BadShape(alloc::format!("{} typical scales for {n} parameters", typical.len())));
    }
    if m < n {
        return Err(Error::BadShape(alloc::format!("{m} residuals for {n} parameters")));
    }
    let mut x = x0.to_vec();
    let mut r = vec![0.0; m];
    f(&x, &mut r)?;
    let mut cost = sum_sq(&r);
    if !cost.is_finite() {
        return Err(Error::NonFinite("initial residual"));
    }
    let mut lambda = opts.lambda0;
    let mut history = vec![cost];
    let mut iterations = 0;
    let mut stopped = false;
    let mut trial = vec![0.0; m];

    let (mut jtj, mut jtr);
    loop {
        let jac = jacobian(&mut f, &x, typical, m, opts.jac_rel_step)?;
        (jtj, jtr) = normal_equations(&jac, &r, m, n);
        if cost <= 1e-24 * history[0] || gradient_cosine(&jtj, &jtr, cost, n) <= opts.gtol {
            stopped = true;
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }
        iterations += 1;

        // inner loop: raise damping until the step lowers the cost
        let mut accepted = false;
        let mut small_step = false;
        for _ in 0..60 {
            let mut a = jtj.clone();
            for j in 0..n {
                a[j * n + j] += lambda * jtj[j * n + j].max(1e-300);
            }
            let rhs: Vec<f64> = jtr.iter().map(|g| -g).collect();
            let delta = match solve_spd(&a, n, &rhs) {
                Ok(d) => d,
                Err(_) => {
                    lambda *= 10.0;
                    continue;
                }
            };
            small_step = delta
                .iter()
                .zip(&x)
                .zip(typical)
                .all(|((d, xi), t)| math::abs(*d) <= opts.xtol * (math::abs(*xi).max(*t)));
            let xt: Vec<f64> = x.iter().zip(&delta).map(|(a, b)| a + b).collect();
            let ok = f(&xt, &mut trial).is_ok();
            let tc = if ok { sum_sq(&trial) } else { f64::INFINITY };
            if tc.is_finite() && tc < cost {
                let rel_drop = (cost - tc) / cost;
                x = xt;
                core::mem::swap(&mut r, &mut trial);
                cost = tc;
                lambda = (lambda / 10.0).max(1e-12);
                accepted = true;
                if rel_drop <= opts.ftol {
                    small_step = true;
                }
                break;
            }
            if small_step {
                break;
            }
            lambda *= 10.0;
        }
        history.push(cost);
        if !accepted || small_step {
            stopped = true;
            let jac = jacobian(&mut f, &x, typical, m, opts.jac_rel_step)?;
            (jtj, jtr) = normal_equations(&jac, &r, m, n);
            break;
        }
    }

    // a residual at round-off level has no meaningful direction
    let gcos = if cost <= 1e-24 * history[0] { 0.0 } else { gradient_cosine(&jtj, &jtr, cost, n) };
    let covariance = if m > n {
        let s2 = cost / (m - n) as f64;
        cholesky(&jtj, n).map(|l| {
            let mut cov = vec![0.0; n * n];
            for j in 0..n {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                let col = cholesky_solve(&l, n, &e);
                for i in 0..n {
                    cov[i * n + j] = s2 * col[i];
                }
            }
            cov
        })
    } else {
        None
    };
    Ok(LsqResult {
        x,
        residuals: r,
        cost,
        iterations,
        converged: stopped && cost.is_finite() && gcos <= CONVERGED_GRADIENT,
        gradient_cosine: gcos,
        covariance,
        cost_history: history,
    })
}
