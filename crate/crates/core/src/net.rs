//! Discrete asymptotic nets: rectangular grids of points in P³ with planar
//! vertex stars, their frame coefficients, the discrete compatibility
//! (Gauss-Mainardi-Codazzi) residual and gauge transformations.

use crate::error::{Error, Result};
use crate::linalg::{minors4, solve4};
use crate::proj::{proj_distance, HomPoint};
use crate::scalar::Scalar;
use rand::Rng;

/// Finite rectangular piece of a Z² lattice of points in P³.
///
/// `rows` counts the n₁ direction, `cols` the n₂ direction. The stored
/// 4-vectors are the chosen homogeneous lifts; frame coefficients refer to
/// exactly these representatives.
#[derive(Debug, Clone)]
pub struct AsymptoticNet<S> {
    rows: usize,
    cols: usize,
    pts: Vec<HomPoint<S>>,
}

/// The twelve per-vertex scalars of the frame equations.
///
/// At vertex `r` with neighbours indexed by lattice shifts,
/// ```text
/// r11  = a0 r  + a1 r1 + a3 r12
/// r112 = b1 r1 + b2 r2 + b3 r12
/// r22  = g0 r  + g2 r2 + g3 r12
/// r122 = d1 r1 + d2 r2 + d3 r12
/// ```
/// Only `a1`, `b3`, `g2`, `d3` may vanish on a nondegenerate net.
#[derive(Debug, Clone)]
pub struct FrameCoefficients<S> {
    pub a0: S,
    pub a1: S,
    pub a3: S,
    pub b1: S,
    pub b2: S,
    pub b3: S,
    pub g0: S,
    pub g2: S,
    pub g3: S,
    pub d1: S,
    pub d2: S,
    pub d3: S,
}

/// The n₁-direction half of the frame (enough for D¹, C¹ steps in n₁).
#[derive(Debug, Clone)]
pub struct FrameAB<S> {
    pub a0: S,
    pub a1: S,
    pub a3: S,
    pub b1: S,
    pub b2: S,
    pub b3: S,
}

/// The n₂-direction half of the frame.
#[derive(Debug, Clone)]
pub struct FrameGD<S> {
    pub g0: S,
    pub g2: S,
    pub g3: S,
    pub d1: S,
    pub d2: S,
    pub d3: S,
}

impl<S: Scalar> FrameCoefficients<S> {
    pub fn ab(&self) -> FrameAB<S> {
        FrameAB {
            a0: self.a0.clone(),
            a1: self.a1.clone(),
            a3: self.a3.clone(),
            b1: self.b1.clone(),
            b2: self.b2.clone(),
            b3: self.b3.clone(),
        }
    }

    pub fn gd(&self) -> FrameGD<S> {
        FrameGD {
            g0: self.g0.clone(),
            g2: self.g2.clone(),
            g3: self.g3.clone(),
            d1: self.d1.clone(),
            d2: self.d2.clone(),
            d3: self.d3.clone(),
        }
    }

    /// L matrix of the frame equations (n₁ shift).
    pub fn l_matrix(&self) -> [[S; 4]; 4] {
        let z = S::zero;
        [
            [z(), S::one(), z(), z()],
            [self.a0.clone(), self.a1.clone(), z(), self.a3.clone()],
            [z(), z(), z(), S::one()],
            [z(), self.b1.clone(), self.b2.clone(), self.b3.clone()],
        ]
    }

    /// M matrix of the frame equations (n₂ shift).
    pub fn m_matrix(&self) -> [[S; 4]; 4] {
        let z = S::zero;
        [
            [z(), z(), S::one(), z()],
            [z(), z(), z(), S::one()],
            [self.g0.clone(), z(), self.g2.clone(), self.g3.clone()],
            [z(), self.d1.clone(), self.d2.clone(), self.d3.clone()],
        ]
    }
}

/// Grid of nonzero lift rescalings.
#[derive(Debug, Clone)]
pub struct GaugeField<S> {
    pub rows: usize,
    pub cols: usize,
    pub x: Vec<S>,
}

impl<S: Scalar> GaugeField<S> {
    pub fn constant(rows: usize, cols: usize, v: S) -> Self {
        GaugeField { rows, cols, x: vec![v; rows * cols] }
    }

    pub fn at(&self, i: usize, j: usize) -> &S {
        &self.x[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.x[i * self.cols + j] = v;
    }

    /// Random gauge with entries of magnitude in [1/2, 2] and random sign.
    pub fn random<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> GaugeField<S> {
        let x = (0..rows * cols)
            .map(|_| {
                let mag: f64 = rng.gen_range(0.5..2.0);
                let sign: f64 = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                let q = (sign * mag * 1024.0).round() as i64;
                S::from_ratio(q, 1024)
            })
            .collect();
        GaugeField { rows, cols, x }
    }
}

/// Per-vertex outcome of `validate_asymptotic`.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub rows: usize,
    pub cols: usize,
    /// Scale-normalized planarity residual per interior vertex `(i,j,res)`.
    pub residuals: Vec<(usize, usize, f64)>,
    pub max_residual: f64,
    pub planar_ok: bool,
    /// Straight collinear triples `(i,j, horizontal?)` centred at `(i,j)`;
    /// these make the frame degenerate even though stars may be planar.
    pub collinear: Vec<(usize, usize, bool)>,
    pub pass: bool,
}

impl<S: Scalar> AsymptoticNet<S> {
    pub fn new(rows: usize, cols: usize, pts: Vec<HomPoint<S>>) -> Result<Self> {
        if pts.len() != rows * cols {
            return Err(Error::Inconsistent(format!(
                "expected {} points, got {}",
                rows * cols,
                pts.len()
            )));
        }
        Ok(AsymptoticNet { rows, cols, pts })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn point(&self, i: usize, j: usize) -> &HomPoint<S> {
        &self.pts[i * self.cols + j]
    }

    pub fn set_point(&mut self, i: usize, j: usize, p: HomPoint<S>) {
        self.pts[i * self.cols + j] = p;
    }

    pub fn points(&self) -> &[HomPoint<S>] {
        &self.pts
    }

    /// Planarity of every interior star plus straight-triple degeneracy.
    pub fn validate_asymptotic(&self, tol: f64) -> Result<ValidationReport> {
        if self.rows < 3 || self.cols < 3 {
            return Err(Error::GridTooSmall {
                need: "3x3".into(),
                got: format!("{}x{}", self.rows, self.cols),
            });
        }
        let mut residuals = Vec::new();
        let mut maxr = 0.0f64;
        for i in 1..self.rows - 1 {
            for j in 1..self.cols - 1 {
                let star = [
                    self.point(i, j).normalized().c,
                    self.point(i - 1, j).normalized().c,
                    self.point(i + 1, j).normalized().c,
                    self.point(i, j - 1).normalized().c,
                    self.point(i, j + 1).normalized().c,
                ];
                let worst = minors4(&star)
                    .into_iter()
                    .map(|m| m.abs().to_f64())
                    .fold(0.0f64, f64::max);
                residuals.push((i, j, worst));
                maxr = maxr.max(worst);
            }
        }
        let planar_ok = residuals.iter().all(|&(_, _, r)| r <= tol);
        let mut collinear = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i >= 1 && i + 1 < self.rows
                    && collinear3(self.point(i - 1, j), self.point(i, j), self.point(i + 1, j), tol)
                {
                    collinear.push((i, j, true));
                }
                if j >= 1 && j + 1 < self.cols
                    && collinear3(self.point(i, j - 1), self.point(i, j), self.point(i, j + 1), tol)
                {
                    collinear.push((i, j, false));
                }
            }
        }
        let pass = planar_ok && collinear.is_empty();
        Ok(ValidationReport {
            rows: self.rows,
            cols: self.cols,
            residuals,
            max_residual: maxr,
            planar_ok,
            collinear,
            pass,
        })
    }

    /// Expands `target` in the basis `{r, r1, r2, r12}` anchored at `(i,j)`.
    fn expand(&self, i: usize, j: usize, target: &HomPoint<S>) -> Result<[S; 4]> {
        let b = [
            self.point(i, j),
            self.point(i + 1, j),
            self.point(i, j + 1),
            self.point(i + 1, j + 1),
        ];
        let mut a: [[S; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| S::zero()));
        for r in 0..4 {
            for c in 0..4 {
                a[r][c] = b[c].c[r].clone();
            }
        }
        solve4(&a, &target.c).ok_or_else(|| {
            Error::Degenerate(format!("basis {{r,r1,r2,r12}} at ({i},{j}) is projectively dependent"))
        })
    }

    /// n₁-half coefficients at `(i,j)`; needs points `(i..i+2, j..j+1)`.
    pub fn frame_ab(&self, i: usize, j: usize, stol: f64) -> Result<FrameAB<S>> {
        if i + 2 >= self.rows || j + 1 >= self.cols {
            return Err(Error::GridTooSmall {
                need: format!("points up to ({},{})", i + 2, j + 1),
                got: format!("{}x{}", self.rows, self.cols),
            });
        }
        let ca = self.expand(i, j, self.point(i + 2, j))?;
        check_structural_zero(&ca, 2, i, j, stol)?;
        let cb = self.expand(i, j, self.point(i + 2, j + 1))?;
        check_structural_zero(&cb, 0, i, j, stol)?;
        Ok(FrameAB {
            a0: ca[0].clone(),
            a1: ca[1].clone(),
            a3: ca[3].clone(),
            b1: cb[1].clone(),
            b2: cb[2].clone(),
            b3: cb[3].clone(),
        })
    }

    /// n₂-half coefficients at `(i,j)`; needs points `(i..i+1, j..j+2)`.
    pub fn frame_gd(&self, i: usize, j: usize, stol: f64) -> Result<FrameGD<S>> {
        if i + 1 >= self.rows || j + 2 >= self.cols {
            return Err(Error::GridTooSmall {
                need: format!("points up to ({},{})", i + 1, j + 2),
                got: format!("{}x{}", self.rows, self.cols),
            });
        }
        let cg = self.expand(i, j, self.point(i, j + 2))?;
        check_structural_zero(&cg, 1, i, j, stol)?;
        let cd = self.expand(i, j, self.point(i + 1, j + 2))?;
        check_structural_zero(&cd, 0, i, j, stol)?;
        Ok(FrameGD {
            g0: cg[0].clone(),
            g2: cg[2].clone(),
            g3: cg[3].clone(),
            d1: cd[1].clone(),
            d2: cd[2].clone(),
            d3: cd[3].clone(),
        })
    }

    /// Full frame coefficients at `(i,j)`; needs the 3x3 block minus its far
    /// corner. The eight structurally nonzero coefficients are checked.
    pub fn frame_coefficients(&self, i: usize, j: usize, stol: f64) -> Result<FrameCoefficients<S>> {
        let ab = self.frame_ab(i, j, stol)?;
        let gd = self.frame_gd(i, j, stol)?;
        let fc = FrameCoefficients {
            a0: ab.a0,
            a1: ab.a1,
            a3: ab.a3,
            b1: ab.b1,
            b2: ab.b2,
            b3: ab.b3,
            g0: gd.g0,
            g2: gd.g2,
            g3: gd.g3,
            d1: gd.d1,
            d2: gd.d2,
            d3: gd.d3,
        };
        let named: [(&'static str, &S); 8] = [
            ("a0", &fc.a0),
            ("a3", &fc.a3),
            ("b1", &fc.b1),
            ("b2", &fc.b2),
            ("g0", &fc.g0),
            ("g3", &fc.g3),
            ("d1", &fc.d1),
            ("d2", &fc.d2),
        ];
        for (name, v) in named {
            if v.is_zero() {
                return Err(Error::FrameDegenerate { i, j, name });
            }
        }
        Ok(fc)
    }

    /// Entrywise `M₁ L − L₂ M`, scale-normalized by the larger product entry.
    /// Zero (up to round-off) on every net whose coefficients come from
    /// actual points.
    pub fn gmc_residual(&self, i: usize, j: usize, stol: f64) -> Result<[[S; 4]; 4]> {
        let fc = self.frame_coefficients(i, j, stol)?;
        let fc_1 = self.frame_coefficients(i + 1, j, stol)?;
        let fc_2 = self.frame_coefficients(i, j + 1, stol)?;
        let m1l = matmul(&fc_1.m_matrix(), &fc.l_matrix());
        let l2m = matmul(&fc_2.l_matrix(), &fc.m_matrix());
        let mut scale = S::zero();
        for r in 0..4 {
            for c in 0..4 {
                let a = m1l[r][c].abs();
                let b = l2m[r][c].abs();
                if a > scale {
                    scale = a.clone();
                }
                if b > scale {
                    scale = b.clone();
                }
            }
        }
        if scale.is_zero() {
            scale = S::one();
        }
        let mut out: [[S; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| S::zero()));
        for r in 0..4 {
            for c in 0..4 {
                out[r][c] =
                    (m1l[r][c].clone() - l2m[r][c].clone()) / scale.clone();
            }
        }
        Ok(out)
    }

    /// Largest entry of the normalized GMC residual.
    pub fn gmc_residual_max(&self, i: usize, j: usize, stol: f64) -> Result<S> {
        let m = self.gmc_residual(i, j, stol)?;
        let mut worst = S::zero();
        for row in &m {
            for e in row {
                let a = e.abs();
                if a > worst {
                    worst = a;
                }
            }
        }
        Ok(worst)
    }

    /// Pointwise lift rescaling. The projective points are unchanged.
    pub fn apply_gauge(&self, x: &GaugeField<S>) -> Result<AsymptoticNet<S>> {
        if x.rows != self.rows || x.cols != self.cols {
            return Err(Error::Inconsistent("gauge field shape mismatch".into()));
        }
        if x.x.iter().any(|v| v.is_zero()) {
            return Err(Error::ZeroDenominator("gauge entry"));
        }
        let pts = self
            .pts
            .iter()
            .enumerate()
            .map(|(k, p)| p.scaled(&x.x[k]))
            .collect();
        AsymptoticNet::new(self.rows, self.cols, pts)
    }

    /// `proj_distance` between corresponding vertices of two nets, maximised
    /// over the grid.
    pub fn max_proj_distance(&self, other: &AsymptoticNet<S>) -> S {
        let mut worst = S::zero();
        for (a, b) in self.pts.iter().zip(&other.pts) {
            let d = proj_distance(a, b);
            if d > worst {
                worst = d;
            }
        }
        worst
    }
}

fn check_structural_zero<S: Scalar>(
    c: &[S; 4],
    pos: usize,
    i: usize,
    j: usize,
    stol: f64,
) -> Result<()> {
    let scale = c.iter().map(|x| x.abs()).fold(S::zero(), |m, a| if a > m { a } else { m });
    if !S::below_tol(&c[pos], &scale, stol) {
        return Err(Error::NotAsymptotic {
            i,
            j,
            residual: (c[pos].abs() / scale).to_f64(),
        });
    }
    Ok(())
}

fn collinear3<S: Scalar>(a: &HomPoint<S>, b: &HomPoint<S>, c: &HomPoint<S>, tol: f64) -> bool {
    // rank of the 3x4 matrix <= 2: all 3x3 minors vanish
    let (a, b, c) = (a.normalized(), b.normalized(), c.normalized());
    let mut worst = S::zero();
    for drop in 0..4 {
        let mut m: [[S; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| S::zero()));
        let mut cc = 0;
        for col in 0..4 {
            if col != drop {
                m[0][cc] = a.c[col].clone();
                m[1][cc] = b.c[col].clone();
                m[2][cc] = c.c[col].clone();
                cc += 1;
            }
        }
        let d = crate::linalg::det3(&m).abs();
        if d > worst {
            worst = d;
        }
    }
    S::below_tol(&worst, &S::one(), tol)
}

pub fn matmul<S: Scalar>(a: &[[S; 4]; 4], b: &[[S; 4]; 4]) -> [[S; 4]; 4] {
    let mut out: [[S; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| S::zero()));
    for r in 0..4 {
        for c in 0..4 {
            let mut acc = S::zero();
            for k in 0..4 {
                acc = acc + a[r][k].clone() * b[k][c].clone();
            }
            out[r][c] = acc;
        }
    }
    out
}

impl<S: Scalar> AsymptoticNet<S> {
    /// Gauge field normalising the frame so that
    /// `(1 - p_g^2) b2 d1 / (b1 d2) = 1` at every vertex where the
    /// expression is defined. `x` is 1 on the two initial strips and
    /// propagates by `x12 = x1 x2 p / (x sqrt(1 - b1 d2/(b2 d1)))`
    /// (positive square root; the sign choice keeps `x` real and continuous
    /// from the strips).
    ///
    /// Fails with [`Error::RealGaugeViolation`] when `1 - b1 d2/(b2 d1) <= 0`
    /// somewhere, and with [`Error::Inexact`] when the exact backend cannot
    /// represent the square root.
    pub fn normalize_gauge(
        &self,
        p: &crate::quadric::QuadricField<S>,
        stol: f64,
    ) -> Result<GaugeField<S>> {
        let mut x = GaugeField::constant(self.rows, self.cols, S::one());
        if self.rows < 3 || self.cols < 3 {
            return Ok(x);
        }
        for i in 0..self.rows.saturating_sub(2) {
            for j in 0..self.cols.saturating_sub(2) {
                let ab = self.frame_ab(i, j, stol)?;
                let gd = self.frame_gd(i, j, stol)?;
                // 1 - b1 d2 / (b2 d1) must be positive for a real gauge
                let ratio = ab.b1.clone() * gd.d2.clone() / (ab.b2.clone() * gd.d1.clone());
                let val = S::one() - ratio;
                if val <= S::zero() {
                    return Err(Error::RealGaugeViolation { i, j, value: val.to_f64() });
                }
                let root = val.sqrt().ok_or(Error::Inexact("gauge square root"))?;
                let num = x.at(i + 1, j).clone() * x.at(i, j + 1).clone() * p.at(i, j).clone();
                let den = x.at(i, j).clone() * root;
                x.set(i + 1, j + 1, num / den);
            }
        }
        Ok(x)
    }
}

/// Closed-form gauge transformation of the frame coefficients at `(i,j)`
/// under lift rescaling by `x`: the entries of `L_g`, `M_g`.
pub fn gauged_coefficients<S: Scalar>(
    fc: &FrameCoefficients<S>,
    x: &GaugeField<S>,
    i: usize,
    j: usize,
) -> FrameCoefficients<S> {
    let g = |a: usize, b: usize| x.at(i + a, j + b).clone();
    let (x00, x10, x01, x11) = (g(0, 0), g(1, 0), g(0, 1), g(1, 1));
    let (x20, x21, x02, x12) = (g(2, 0), g(2, 1), g(0, 2), g(1, 2));
    FrameCoefficients {
        a0: x20.clone() * fc.a0.clone() / x00.clone(),
        a1: x20.clone() * fc.a1.clone() / x10.clone(),
        a3: x20 * fc.a3.clone() / x11.clone(),
        b1: x21.clone() * fc.b1.clone() / x10.clone(),
        b2: x21.clone() * fc.b2.clone() / x01.clone(),
        b3: x21 * fc.b3.clone() / x11.clone(),
        g0: x02.clone() * fc.g0.clone() / x00,
        g2: x02.clone() * fc.g2.clone() / x01.clone(),
        g3: x02 * fc.g3.clone() / x11.clone(),
        d1: x12.clone() * fc.d1.clone() / x10,
        d2: x12.clone() * fc.d2.clone() / x01,
        d3: x12 * fc.d3.clone() / x11,
    }
}
