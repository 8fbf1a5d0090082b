//! Lattice Lie quadrics: the one-parameter family of quadrics through the
//! four (extended) edges of a net quadrilateral, selected by a scalar `p`.
//! C¹ propagation over the face lattice, shared generators with their
//! discriminants, tangent planes and implicitization.

use crate::error::{Error, Result};
use crate::linalg::{lsq_nullspace, nullspace, nullspace_dyn};
use crate::net::{AsymptoticNet, FrameAB, FrameGD};
use crate::proj::{HomPoint, ProjLine, ProjPlane};
use crate::scalar::Scalar;

/// Generator parameters as projective scalars: `s = s[0]/s[1]` affine, with
/// `(1:0)` the point at infinity. Neither pair may be `(0:0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenParam<S> {
    pub s: [S; 2],
    pub t: [S; 2],
}

impl<S: Scalar> GenParam<S> {
    pub fn affine(s: S, t: S) -> Self {
        GenParam { s: [s, S::one()], t: [t, S::one()] }
    }

    pub fn from_pairs(s: [S; 2], t: [S; 2]) -> Result<Self> {
        if (s[0].is_zero() && s[1].is_zero()) || (t[0].is_zero() && t[1].is_zero()) {
            return Err(Error::Degenerate("generator parameter (0:0)".into()));
        }
        Ok(GenParam { s, t })
    }

    pub fn s_inf(t: S) -> Self {
        GenParam { s: [S::one(), S::zero()], t: [t, S::one()] }
    }

    pub fn t_inf(s: S) -> Self {
        GenParam { s: [s, S::one()], t: [S::one(), S::zero()] }
    }

    pub fn both_inf() -> Self {
        GenParam { s: [S::one(), S::zero()], t: [S::one(), S::zero()] }
    }
}

/// One quadric of the family through the edges of a quadrilateral, labelled
/// by the nonzero scalar `p` relative to the four corner lifts.
#[derive(Debug, Clone)]
pub struct LatticeQuadric<S> {
    pub p: S,
    pub r: HomPoint<S>,
    pub r1: HomPoint<S>,
    pub r2: HomPoint<S>,
    pub r12: HomPoint<S>,
}

impl<S: Scalar> LatticeQuadric<S> {
    pub fn from_net(net: &AsymptoticNet<S>, i: usize, j: usize, p: S) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::ZeroDenominator("quadric label p"));
        }
        if i + 1 >= net.rows() || j + 1 >= net.cols() {
            return Err(Error::GridTooSmall {
                need: format!("face ({i},{j})"),
                got: format!("{}x{}", net.rows(), net.cols()),
            });
        }
        Ok(LatticeQuadric {
            p,
            r: net.point(i, j).clone(),
            r1: net.point(i + 1, j).clone(),
            r2: net.point(i, j + 1).clone(),
            r12: net.point(i + 1, j + 1).clone(),
        })
    }

    /// Point of the quadric:
    /// `p s1 t1 r12 + s0 t1 r1 + s1 t0 r2 + s0 t0 r`
    /// (the affine form `p r12 + s r1 + t r2 + s t r` in the chart
    /// `s = s0/s1`, `t = t0/t1`; the parameter corners are
    /// `(0,0) -> r12`, `(inf,0) -> r1`, `(0,inf) -> r2`, `(inf,inf) -> r`).
    pub fn eval(&self, g: &GenParam<S>) -> HomPoint<S> {
        let (s0, s1) = (g.s[0].clone(), g.s[1].clone());
        let (t0, t1) = (g.t[0].clone(), g.t[1].clone());
        let mut c = [S::zero(), S::zero(), S::zero(), S::zero()];
        for k in 0..4 {
            c[k] = self.p.clone() * s1.clone() * t1.clone() * self.r12.c[k].clone()
                + s0.clone() * t1.clone() * self.r1.c[k].clone()
                + s1.clone() * t0.clone() * self.r2.c[k].clone()
                + s0.clone() * t0.clone() * self.r.c[k].clone();
        }
        HomPoint { c }
    }

    /// The four homogeneous partial derivatives at `g`, spanning the tangent
    /// plane (rank 3 for a nondegenerate quadric).
    pub fn partials(&self, g: &GenParam<S>) -> [[S; 4]; 4] {
        let (s0, s1) = (g.s[0].clone(), g.s[1].clone());
        let (t0, t1) = (g.t[0].clone(), g.t[1].clone());
        let mut ds0 = [S::zero(), S::zero(), S::zero(), S::zero()];
        let mut ds1 = ds0.clone();
        let mut dt0 = ds0.clone();
        let mut dt1 = ds0.clone();
        for k in 0..4 {
            ds0[k] = t1.clone() * self.r1.c[k].clone() + t0.clone() * self.r.c[k].clone();
            ds1[k] = self.p.clone() * t1.clone() * self.r12.c[k].clone()
                + t0.clone() * self.r2.c[k].clone();
            dt0[k] = s1.clone() * self.r2.c[k].clone() + s0.clone() * self.r.c[k].clone();
            dt1[k] = self.p.clone() * s1.clone() * self.r12.c[k].clone()
                + s0.clone() * self.r1.c[k].clone();
        }
        [ds0, ds1, dt0, dt1]
    }

    /// Chart-robust tangent directions at `g`: one vector from the s-pair
    /// and one from the t-pair such that together with `eval(g)` they span
    /// the tangent plane.
    pub fn tangent_dirs(&self, g: &GenParam<S>) -> (HomPoint<S>, HomPoint<S>) {
        let p = self.partials(g);
        let ds = if g.s[1].abs() >= g.s[0].abs() { p[0].clone() } else { p[1].clone() };
        let dt = if g.t[1].abs() >= g.t[0].abs() { p[2].clone() } else { p[3].clone() };
        (HomPoint { c: ds }, HomPoint { c: dt })
    }

    /// Tangent plane at `g` as the common annihilator of all four partials.
    pub fn tangent_plane(&self, g: &GenParam<S>, tol: f64) -> Result<ProjPlane<S>> {
        let rows = self.partials(g);
        let rows_n: Vec<[S; 4]> = rows
            .iter()
            .map(|r| HomPoint { c: r.clone() }.normalized().c)
            .collect();
        let n = nullspace(&rows_n, tol)
            .ok_or_else(|| Error::Degenerate("tangent_plane: partials have full rank".into()))?;
        ProjPlane::new(n)
    }

    /// Generator with fixed s-label: the line `t -> Q(s, t)`.
    pub fn s_generator(&self, s: &[S; 2], tol: f64) -> Result<ProjLine<S>> {
        // Q = t1*(p s1 r12 + s0 r1) + t0*(s1 r2 + s0 r)
        let u = self.r12.scaled(&(self.p.clone() * s[1].clone())).combo(
            &S::one(),
            &self.r1.scaled(&s[0]),
            &S::one(),
        );
        let v = self.r2.scaled(&s[1]).combo(&S::one(), &self.r.scaled(&s[0]), &S::one());
        crate::proj::line_through(&u, &v, tol)
    }

    /// Generator with fixed t-label: the line `s -> Q(s, t)`.
    pub fn t_generator(&self, t: &[S; 2], tol: f64) -> Result<ProjLine<S>> {
        let u = self.r12.scaled(&(self.p.clone() * t[1].clone())).combo(
            &S::one(),
            &self.r2.scaled(&t[0]),
            &S::one(),
        );
        let v = self.r1.scaled(&t[1]).combo(&S::one(), &self.r.scaled(&t[0]), &S::one());
        crate::proj::line_through(&u, &v, tol)
    }

    /// Symmetric 4x4 coefficient matrix `A` with `X^T A X = 0` on the
    /// quadric, fitted through sampled points and verified on held-out ones.
    pub fn implicit(&self, tol: f64) -> Result<[[S; 4]; 4]> {
        let fit = self.sample_grid(4);
        let a = fit_quadric(&fit, tol)?;
        // verify on a disjoint 5x5-ish grid minus fit samples
        let check = self.sample_grid(5);
        let mut worst = S::zero();
        for x in &check {
            let r = quadric_point_residual(&a, x);
            if r > worst {
                worst = r;
            }
        }
        if !S::below_tol(&worst, &S::one(), (tol * 1e3).max(1e-10)) {
            return Err(Error::Inconsistent(format!(
                "implicit quadric verification residual {}",
                worst.to_f64()
            )));
        }
        Ok(a)
    }

    /// Membership residual without implicitization: expanding `x` in the
    /// corner basis as `c0 r + c1 r1 + c2 r2 + c3 r12`, the quadric is the
    /// locus `c0 c3 = p c1 c2`. Returns the scale-normalized defect, or
    /// `None` when the corners are projectively dependent.
    pub fn basis_residual(&self, x: &HomPoint<S>) -> Option<S> {
        let mut a: [[S; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| S::zero()));
        for r in 0..4 {
            a[r][0] = self.r.c[r].clone();
            a[r][1] = self.r1.c[r].clone();
            a[r][2] = self.r2.c[r].clone();
            a[r][3] = self.r12.c[r].clone();
        }
        let c = crate::linalg::solve4(&a, &x.c)?;
        let lhs = c[0].clone() * c[3].clone();
        let rhs = self.p.clone() * c[1].clone() * c[2].clone();
        let mut cmax = S::zero();
        for v in &c {
            let av = v.abs();
            if av > cmax {
                cmax = av;
            }
        }
        let scale = cmax.clone() * cmax * (S::one() + self.p.abs());
        if scale.is_zero() {
            return Some(S::zero());
        }
        Some((lhs - rhs).abs() / scale)
    }

    /// `n x n` grid of points covering the patch between the four edges,
    /// including parameter infinities (rational nodes, backend-safe).
    pub fn sample_grid(&self, n: usize) -> Vec<HomPoint<S>> {
        let mut out = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let g = GenParam {
                    s: pair_node::<S>(a, n),
                    t: pair_node::<S>(b, n + 1), // stagger to avoid symmetric accidents
                };
                out.push(self.eval(&g).normalized());
            }
        }
        out
    }
}

/// Deterministic projective sample nodes: a spread of affine rationals plus
/// the point at infinity.
fn pair_node<S: Scalar>(k: usize, n: usize) -> [S; 2] {
    if k + 1 == n {
        [S::one(), S::zero()]
    } else {
        // nodes like 0, 1, -1, 2, -1/2, 3, -1/3 ...
        let q = k as i64;
        let (num, den) = match q % 2 {
            0 => (q / 2, 1),
            _ => (-(q + 1) / 2, (q + 1) / 2 + 1),
        };
        [S::from_ratio(num, 1), S::from_ratio(den, 1)]
    }
}

/// Scale-normalized residual of a point against an implicit quadric.
pub fn quadric_point_residual<S: Scalar>(a: &[[S; 4]; 4], x: &HomPoint<S>) -> S {
    let mut acc = S::zero();
    for i in 0..4 {
        for j in 0..4 {
            acc = acc + x.c[i].clone() * a[i][j].clone() * x.c[j].clone();
        }
    }
    let mut amax = S::zero();
    for row in a {
        for e in row {
            let v = e.abs();
            if v > amax {
                amax = v;
            }
        }
    }
    let s = x.scale();
    let denom = amax * s.clone() * s;
    if denom.is_zero() {
        S::zero()
    } else {
        acc.abs() / denom
    }
}

fn fit_quadric<S: Scalar>(pts: &[HomPoint<S>], tol: f64) -> Result<[[S; 4]; 4]> {
    let row_of = |x: &HomPoint<S>| -> Vec<S> {
        let c = &x.c;
        let two = S::from_i64(2);
        vec![
            c[0].clone() * c[0].clone(),
            c[1].clone() * c[1].clone(),
            c[2].clone() * c[2].clone(),
            c[3].clone() * c[3].clone(),
            two.clone() * c[0].clone() * c[1].clone(),
            two.clone() * c[0].clone() * c[2].clone(),
            two.clone() * c[0].clone() * c[3].clone(),
            two.clone() * c[1].clone() * c[2].clone(),
            two.clone() * c[1].clone() * c[3].clone(),
            two * c[2].clone() * c[3].clone(),
        ]
    };
    let u: Vec<S> = if S::EXACT {
        let rows: Vec<Vec<S>> = pts.iter().map(row_of).collect();
        nullspace_dyn(&rows, 10, tol)
            .ok_or_else(|| Error::Inconsistent("quadric fit has no nullspace".into()))?
    } else {
        let rows: Vec<Vec<f64>> = pts
            .iter()
            .map(|x| row_of(x).iter().map(|v| v.to_f64()).collect())
            .collect();
        let (v, _lam) = lsq_nullspace(&rows, 10);
        v.into_iter().map(S::from_f64_lossy).collect()
    };
    let a = [
        [u[0].clone(), u[4].clone(), u[5].clone(), u[6].clone()],
        [u[4].clone(), u[1].clone(), u[7].clone(), u[8].clone()],
        [u[5].clone(), u[7].clone(), u[2].clone(), u[9].clone()],
        [u[6].clone(), u[8].clone(), u[9].clone(), u[3].clone()],
    ];
    Ok(a)
}

/// One C¹ step: the label of the neighbouring quadric sharing tangent
/// planes along the whole common edge.
/// Direction 1: `p1 = a0 / (b2 p)`; direction 2: `p2 = g0 / (d1 p)`.
pub fn c1_step_ab<S: Scalar>(ab: &FrameAB<S>, p: &S) -> Result<S> {
    if p.is_zero() {
        return Err(Error::ZeroDenominator("c1_step: p"));
    }
    if ab.b2.is_zero() {
        return Err(Error::ZeroDenominator("c1_step: b2"));
    }
    Ok(ab.a0.clone() / (ab.b2.clone() * p.clone()))
}

pub fn c1_step_gd<S: Scalar>(gd: &FrameGD<S>, p: &S) -> Result<S> {
    if p.is_zero() {
        return Err(Error::ZeroDenominator("c1_step: p"));
    }
    if gd.d1.is_zero() {
        return Err(Error::ZeroDenominator("c1_step: d1"));
    }
    Ok(gd.g0.clone() / (gd.d1.clone() * p.clone()))
}

/// C¹-consistent family of quadric labels, one per face of the net.
#[derive(Debug, Clone)]
pub struct QuadricField<S> {
    pub rows: usize,
    pub cols: usize,
    pub p: Vec<S>,
}

impl<S: Scalar> QuadricField<S> {
    pub fn at(&self, i: usize, j: usize) -> &S {
        &self.p[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.p[i * self.cols + j] = v;
    }

    /// Gauge transformation of the labels: `p_g = (x1 x2 / (x x12)) p`.
    pub fn apply_gauge(&self, x: &crate::net::GaugeField<S>) -> QuadricField<S> {
        let mut p = self.p.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let f = x.at(i + 1, j).clone() * x.at(i, j + 1).clone()
                    / (x.at(i, j).clone() * x.at(i + 1, j + 1).clone());
                p[i * self.cols + j] = f * self.p[i * self.cols + j].clone();
            }
        }
        QuadricField { rows: self.rows, cols: self.cols, p }
    }
}

/// Fills the whole face lattice from one seed label by C¹ steps and checks
/// that the two paths to every diagonal neighbour agree.
pub fn propagate_quadrics<S: Scalar>(
    net: &AsymptoticNet<S>,
    seed: (usize, usize),
    p0: S,
    stol: f64,
    tol: f64,
) -> Result<QuadricField<S>> {
    if p0.is_zero() {
        return Err(Error::ZeroDenominator("seed label p0"));
    }
    let frows = net.rows() - 1;
    let fcols = net.cols() - 1;
    let (si, sj) = seed;
    if si >= frows || sj >= fcols {
        return Err(Error::Inconsistent("seed face outside grid".into()));
    }
    let mut field = QuadricField { rows: frows, cols: fcols, p: vec![S::zero(); frows * fcols] };
    field.set(si, sj, p0);
    // fill the seed row in both directions
    for i in si + 1..frows {
        let ab = net.frame_ab(i - 1, sj, stol)?;
        let v = c1_step_ab(&ab, field.at(i - 1, sj))?;
        field.set(i, sj, v);
    }
    for i in (0..si).rev() {
        let ab = net.frame_ab(i, sj, stol)?;
        let v = c1_step_ab(&ab, field.at(i + 1, sj))?;
        field.set(i, sj, v);
    }
    // fill each column from the seed row
    for i in 0..frows {
        for j in sj + 1..fcols {
            let gd = net.frame_gd(i, j - 1, stol)?;
            let v = c1_step_gd(&gd, field.at(i, j - 1))?;
            field.set(i, j, v);
        }
        for j in (0..sj).rev() {
            let gd = net.frame_gd(i, j, stol)?;
            let v = c1_step_gd(&gd, field.at(i, j + 1))?;
            field.set(i, j, v);
        }
    }
    // diagonal agreement: dir-1 step must reproduce every stored neighbour
    for j in 0..fcols {
        for i in 0..frows - 1 {
            let ab = net.frame_ab(i, j, stol)?;
            let via1 = c1_step_ab(&ab, field.at(i, j))?;
            let diff = (via1.clone() - field.at(i + 1, j).clone()).abs();
            if !S::below_tol(&diff, &via1.abs(), tol) {
                return Err(Error::PathDisagreement {
                    i,
                    j,
                    residual: (diff / via1.abs()).to_f64(),
                });
            }
        }
    }
    Ok(field)
}

/// Multiplicity-annotated real root of a shared-generator quadratic.
#[derive(Debug, Clone)]
pub struct GeneratorRoot<S> {
    /// Projective label on the base quadric (s-label for direction 1,
    /// t-label for direction 2).
    pub label: [S; 2],
    pub multiplicity: usize,
}

/// Discriminant and real shared-generator labels between a quadric and its
/// neighbour.
#[derive(Debug, Clone)]
pub struct SharedGenerators<S> {
    pub disc: S,
    /// Scale-matched threshold reference for `disc ~ 0` decisions.
    pub disc_scale: S,
    pub roots: Vec<GeneratorRoot<S>>,
    /// Degree dropped (leading coefficient vanished): one root is at
    /// infinity and is reported explicitly.
    pub degree_drop: bool,
}

impl<S: Scalar> SharedGenerators<S> {
    pub fn disc_is_zero(&self, dtol: f64) -> bool {
        S::below_tol(&self.disc, &self.disc_scale, dtol)
    }
}

fn quadratic_roots<S: Scalar>(
    a: S,
    b: S,
    c: S,
    disc: S,
    disc_scale: S,
    dtol: f64,
) -> Result<SharedGenerators<S>> {
    let mut out = SharedGenerators {
        disc: disc.clone(),
        disc_scale: disc_scale.clone(),
        roots: Vec::new(),
        degree_drop: false,
    };
    let coeff_scale = a.abs() + b.abs() + c.abs();
    if S::below_tol(&a, &coeff_scale, dtol) {
        // degree drop: root at infinity plus the linear root
        out.degree_drop = true;
        out.roots.push(GeneratorRoot { label: [S::one(), S::zero()], multiplicity: 1 });
        if !b.is_zero() {
            out.roots.push(GeneratorRoot { label: [-c, b], multiplicity: 1 });
        }
        return Ok(out);
    }
    if S::below_tol(&disc, &disc_scale, dtol) {
        // coinciding real roots
        out.roots.push(GeneratorRoot {
            label: [-b, S::from_i64(2) * a],
            multiplicity: 2,
        });
        return Ok(out);
    }
    if disc < S::zero() {
        return Ok(out); // complex conjugate pair: no real generators
    }
    let sd = disc.sqrt().ok_or(Error::Inexact("irrational shared-generator root"))?;
    // numerically stable split: q = -(b + sign(b) sqrt(D))/2
    let q = if b >= S::zero() {
        -(b.clone() + sd) / S::from_i64(2)
    } else {
        -(b.clone() - sd) / S::from_i64(2)
    };
    // roots q/a and c/q
    out.roots.push(GeneratorRoot { label: [q.clone(), a], multiplicity: 1 });
    if q.is_zero() {
        out.roots.push(GeneratorRoot { label: [S::zero(), S::one()], multiplicity: 1 });
    } else {
        out.roots.push(GeneratorRoot { label: [c, q], multiplicity: 1 });
    }
    Ok(out)
}

/// Shared generators between `Q` (label `p`) and its n₁-neighbour `Q1`:
/// the roots of `a3 b2 s² + (a0 b3 − a1 b2 p) s − a0 b1 p = 0`, with
/// discriminant `D¹ = (a0 b3 − a1 b2 p)² + 4 a0 a3 b1 b2 p`. Roots label
/// generators of `Q`; the matching generator of `Q1` carries label `s/p`.
pub fn shared_generators_dir1<S: Scalar>(
    ab: &FrameAB<S>,
    p: &S,
    dtol: f64,
) -> Result<SharedGenerators<S>> {
    let a = ab.a3.clone() * ab.b2.clone();
    let b = ab.a0.clone() * ab.b3.clone() - ab.a1.clone() * ab.b2.clone() * p.clone();
    let c = -(ab.a0.clone() * ab.b1.clone() * p.clone());
    let disc = b.clone() * b.clone()
        + S::from_i64(4) * ab.a0.clone() * ab.a3.clone() * ab.b1.clone() * ab.b2.clone() * p.clone();
    // threshold scale matches the homogeneity degree of D:
    // (|a0 b3| + |a1 b2 p|)^2
    let half = (ab.a0.clone() * ab.b3.clone()).abs()
        + (ab.a1.clone() * ab.b2.clone() * p.clone()).abs();
    let scale = half.clone() * half;
    quadratic_roots(a, b, c, disc, scale, dtol)
}

/// Direction-2 analogue: roots of
/// `g3 d1 t² + (g0 d3 − g2 d1 p) t − g0 d2 p = 0`, discriminant
/// `D² = (g0 d3 − g2 d1 p)² + 4 g0 g3 d1 d2 p`, neighbour label `t/p`.
pub fn shared_generators_dir2<S: Scalar>(
    gd: &FrameGD<S>,
    p: &S,
    dtol: f64,
) -> Result<SharedGenerators<S>> {
    let a = gd.g3.clone() * gd.d1.clone();
    let b = gd.g0.clone() * gd.d3.clone() - gd.g2.clone() * gd.d1.clone() * p.clone();
    let c = -(gd.g0.clone() * gd.d2.clone() * p.clone());
    let disc = b.clone() * b.clone()
        + S::from_i64(4) * gd.g0.clone() * gd.g3.clone() * gd.d1.clone() * gd.d2.clone() * p.clone();
    let half = (gd.g0.clone() * gd.d3.clone()).abs()
        + (gd.g2.clone() * gd.d1.clone() * p.clone()).abs();
    let scale = half.clone() * half;
    quadratic_roots(a, b, c, disc, scale, dtol)
}

/// Raw discriminant `D¹` (degree-2 homogeneous in its terms).
pub fn disc1<S: Scalar>(ab: &FrameAB<S>, p: &S) -> S {
    let b = ab.a0.clone() * ab.b3.clone() - ab.a1.clone() * ab.b2.clone() * p.clone();
    b.clone() * b
        + S::from_i64(4) * ab.a0.clone() * ab.a3.clone() * ab.b1.clone() * ab.b2.clone() * p.clone()
}

/// Raw discriminant `D²`.
pub fn disc2<S: Scalar>(gd: &FrameGD<S>, p: &S) -> S {
    let b = gd.g0.clone() * gd.d3.clone() - gd.g2.clone() * gd.d1.clone() * p.clone();
    b.clone() * b
        + S::from_i64(4) * gd.g0.clone() * gd.g3.clone() * gd.d1.clone() * gd.d2.clone() * p.clone()
}

/// The neighbour label for a shared generator: `ps₁ = s`, i.e. divide the
/// affine label by `p` (projectively: scale the denominator).
pub fn neighbour_label<S: Scalar>(label: &[S; 2], p: &S) -> [S; 2] {
    [label[0].clone(), label[1].clone() * p.clone()]
}

/// `p` of the family member lying on a given implicit quadric:
/// `p = -(r1ᵀ A r2)/(rᵀ A r12)` once all four edges lie on `A`.
pub fn p_from_implicit<S: Scalar>(
    a: &[[S; 4]; 4],
    r: &HomPoint<S>,
    r1: &HomPoint<S>,
    r2: &HomPoint<S>,
    r12: &HomPoint<S>,
) -> Result<S> {
    let form = |x: &HomPoint<S>, y: &HomPoint<S>| {
        let mut acc = S::zero();
        for i in 0..4 {
            for j in 0..4 {
                acc = acc + x.c[i].clone() * a[i][j].clone() * y.c[j].clone();
            }
        }
        acc
    };
    let den = form(r, r12);
    if den.is_zero() {
        return Err(Error::ZeroDenominator("p_from_implicit"));
    }
    Ok(-(form(r1, r2) / den))
}
