//! Univariate polynomial utilities: exact interpolation through sample
//! values, degree trimming and root finding (Durand-Kerner on the complex
//! plane). Used by the Cauchy evolution, which assembles its closing
//! condition as a sampled polynomial rather than a hand-derived formula.

use crate::scalar::Scalar;
use num_complex::Complex64;

/// Coefficients in ascending order: `c[0] + c[1] x + c[2] x^2 + ...`.
#[derive(Debug, Clone)]
pub struct Poly<S>(pub Vec<S>);

impl<S: Scalar> Poly<S> {
    pub fn eval(&self, x: &S) -> S {
        let mut acc = S::zero();
        for c in self.0.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    /// Drop trailing coefficients relatively smaller than `tol` (exact
    /// backends drop exact zeros only).
    pub fn trimmed(mut self, tol: f64) -> Self {
        let scale = self
            .0
            .iter()
            .map(|c| c.abs())
            .fold(S::zero(), |m, a| if a > m { a } else { m });
        while self.0.len() > 1 {
            let last = self.0.last().unwrap();
            if S::below_tol(last, &scale, tol) {
                self.0.pop();
            } else {
                break;
            }
        }
        self
    }
}

/// Interpolates the unique polynomial of degree < `xs.len()` through
/// `(xs[i], ys[i])` by solving the Vandermonde system (exact in rational
/// mode). Nodes must be pairwise distinct.
pub fn interpolate<S: Scalar>(xs: &[S], ys: &[S]) -> Poly<S> {
    let n = xs.len();
    assert_eq!(n, ys.len());
    // Newton form for stability and exactness.
    let mut coef: Vec<S> = ys.to_vec(); // divided differences
    for j in 1..n {
        for i in (j..n).rev() {
            coef[i] = (coef[i].clone() - coef[i - 1].clone())
                / (xs[i].clone() - xs[i - j].clone());
        }
    }
    // Expand Newton form to monomial coefficients.
    let mut poly = vec![S::zero(); n];
    let mut basis = vec![S::zero(); n]; // product (x - x0)...(x - x_{k-1})
    basis[0] = S::one();
    let mut blen = 1usize;
    for (k, c) in coef.iter().enumerate() {
        for i in 0..blen {
            poly[i] = poly[i].clone() + c.clone() * basis[i].clone();
        }
        if k + 1 < n {
            // basis *= (x - xs[k])
            let mut nb = vec![S::zero(); blen + 1];
            for i in 0..blen {
                nb[i + 1] = nb[i + 1].clone() + basis[i].clone();
                nb[i] = nb[i].clone() - xs[k].clone() * basis[i].clone();
            }
            blen += 1;
            basis[..blen].clone_from_slice(&nb);
        }
    }
    Poly(poly)
}

/// All complex roots of a real-coefficient polynomial via Durand-Kerner
/// iteration. Leading coefficient must be the last entry and nonzero.
pub fn roots_f64(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return vec![];
    }
    if n == 1 {
        return vec![Complex64::new(-coeffs[0] / coeffs[1], 0.0)];
    }
    let lead = coeffs[n];
    let monic: Vec<Complex64> = coeffs.iter().map(|&c| Complex64::new(c / lead, 0.0)).collect();
    // Initial guesses on a slightly irrational spiral.
    let radius = 1.0
        + coeffs[..n]
            .iter()
            .map(|c| (c / lead).abs())
            .fold(0.0f64, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + 0.4;
            Complex64::from_polar(radius.min(10.0) * 0.8, ang)
        })
        .collect();
    let eval = |x: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in monic.iter().rev() {
            acc = acc * x + c;
        }
        acc
    };
    for _ in 0..200 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() < 1e-280 {
                continue;
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-14 {
            break;
        }
    }
    // Newton polish
    let dmonic: Vec<Complex64> = (1..=n).map(|k| monic[k] * (k as f64)).collect();
    let deval = |x: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in dmonic.iter().rev() {
            acc = acc * x + c;
        }
        acc
    };
    for zi in z.iter_mut() {
        for _ in 0..5 {
            let d = deval(*zi);
            if d.norm() > 1e-200 {
                *zi -= eval(*zi) / d;
            }
        }
    }
    z
}

/// Real roots of a real polynomial, deduplicated, with relative imaginary
/// tolerance `imag_tol`.
pub fn real_roots_f64(coeffs: &[f64], imag_tol: f64) -> Vec<f64> {
    let mut out: Vec<f64> = roots_f64(coeffs)
        .into_iter()
        .filter(|z| z.im.abs() <= imag_tol * (1.0 + z.re.abs()))
        .map(|z| z.re)
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * (1.0 + a.abs()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;

    #[test]
    fn interpolate_quadratic_exact() {
        // p(x) = 2 - 3x + x^2 sampled at -1,0,1
        let xs = [Rat::new(-1, 1), Rat::zero(), Rat::new(1, 1)];
        let ys = [Rat::new(6, 1), Rat::new(2, 1), Rat::zero()];
        let p = interpolate(&xs, &ys);
        assert_eq!(p.0, vec![Rat::new(2, 1), Rat::new(-3, 1), Rat::new(1, 1)]);
    }

    #[test]
    fn quartic_roots() {
        // (x-1)(x+2)(x-3)(x+4) = x^4 + 2x^3 - 13x^2 - 14x + 24
        let roots = real_roots_f64(&[24.0, -14.0, -13.0, 2.0, 1.0], 1e-9);
        assert_eq!(roots.len(), 4);
        for (r, e) in roots.iter().zip([-4.0, -2.0, 1.0, 3.0]) {
            assert!((r - e).abs() < 1e-9, "{r} vs {e}");
        }
    }

    #[test]
    fn trim_drops_noise() {
        let p = Poly(vec![1.0, 2.0, 1e-15]).trimmed(1e-12);
        assert_eq!(p.degree(), 1);
    }
}
