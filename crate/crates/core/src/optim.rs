//! Small dense Levenberg-Marquardt with forward-difference Jacobians.
//! This is a test-data factory component (used to construct special surface
//! classes), not a performance-critical solver.

/// Result of an optimisation run.
#[derive(Debug, Clone)]
pub struct LmResult {
    pub x: Vec<f64>,
    /// Final sum of squared residuals.
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub struct LmOptions {
    pub max_iterations: usize,
    pub cost_tol: f64,
    pub step_tol: f64,
    pub lambda_init: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions { max_iterations: 120, cost_tol: 1e-22, step_tol: 1e-14, lambda_init: 1e-3 }
    }
}

fn cost_of(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

/// Solves the damped normal equations `(JᵀJ + λ diag(JᵀJ)) dx = -Jᵀr` by
/// Gaussian elimination with partial pivoting.
fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&r1, &r2| {
            a[r1][col].abs().partial_cmp(&a[r2][col].abs()).unwrap()
        })?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Minimises `|f(x)|²` from `x0`. The residual function may return `None`
/// for infeasible parameter vectors (treated as a rejected step).
pub fn levenberg_marquardt<F>(mut f: F, x0: &[f64], opts: &LmOptions) -> LmResult
where
    F: FnMut(&[f64]) -> Option<Vec<f64>>,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut r = match f(&x) {
        Some(r) => r,
        None => {
            return LmResult { x, cost: f64::INFINITY, iterations: 0, converged: false };
        }
    };
    let mut cost = cost_of(&r);
    let mut lambda = opts.lambda_init;
    let mut iters = 0;
    for _ in 0..opts.max_iterations {
        iters += 1;
        let m = r.len();
        // forward-difference Jacobian
        let mut jac = vec![vec![0.0; n]; m];
        let mut ok = true;
        for k in 0..n {
            let h = 1e-7 * (1.0 + x[k].abs());
            let mut xk = x.clone();
            xk[k] += h;
            match f(&xk) {
                Some(rk) if rk.len() == m => {
                    for row in 0..m {
                        jac[row][k] = (rk[row] - r[row]) / h;
                    }
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            break;
        }
        // normal matrix
        let mut jtj = vec![vec![0.0; n]; n];
        let mut jtr = vec![0.0; n];
        for row in 0..m {
            for i in 0..n {
                jtr[i] += jac[row][i] * r[row];
                for j in 0..n {
                    jtj[i][j] += jac[row][i] * jac[row][j];
                }
            }
        }
        let mut accepted = false;
        for _try in 0..12 {
            let mut a = jtj.clone();
            for i in 0..n {
                a[i][i] += lambda * (jtj[i][i].max(1e-12));
            }
            let mut b: Vec<f64> = jtr.iter().map(|v| -v).collect();
            let dx = match solve_dense(&mut a, &mut b) {
                Some(d) => d,
                None => {
                    lambda *= 10.0;
                    continue;
                }
            };
            let xn: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + d).collect();
            if let Some(rn) = f(&xn) {
                let cn = cost_of(&rn);
                if cn < cost {
                    let step: f64 = dx.iter().map(|d| d * d).sum::<f64>().sqrt();
                    x = xn;
                    r = rn;
                    let improvement = cost - cn;
                    cost = cn;
                    lambda = (lambda * 0.35).max(1e-12);
                    accepted = true;
                    if cost < opts.cost_tol || step < opts.step_tol || improvement < 1e-30 {
                        return LmResult { x, cost, iterations: iters, converged: true };
                    }
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !accepted {
            break;
        }
    }
    LmResult { x: x.clone(), cost, iterations: iters, converged: cost < 1e-16 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock_converges() {
        let f = |x: &[f64]| Some(vec![10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0]]);
        let res = levenberg_marquardt(f, &[-1.2, 1.0], &LmOptions::default());
        assert!(res.cost < 1e-16, "cost {}", res.cost);
        assert!((res.x[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn underdetermined_system() {
        // one residual, two unknowns: finds a zero of x0 + x1 - 3
        let f = |x: &[f64]| Some(vec![x[0] + x[1] - 3.0]);
        let res = levenberg_marquardt(f, &[0.0, 0.0], &LmOptions::default());
        assert!(res.cost < 1e-18);
    }
}
