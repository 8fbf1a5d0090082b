//! Projective-space primitives in P³: points, planes, lines (Plücker
//! coordinates), brackets and incidence predicates.
//!
//! All predicates take a relative tolerance; the rational backend treats it
//! as an exact zero test.

use crate::error::{Error, Result};
use crate::linalg::{cross4, det4, nullspace};
use crate::scalar::Scalar;

/// Point of P³ as a nonzero 4-vector of homogeneous coordinates.
///
/// The stored representative (the "lift") is significant for the net layer:
/// frame coefficients refer to these fixed lifts.
#[derive(Debug, Clone, PartialEq)]
pub struct HomPoint<S> {
    pub c: [S; 4],
}

/// Plane of P³ as a nonzero covector; incidence is `covector . coords = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjPlane<S> {
    pub c: [S; 4],
}

/// Line of P³ in Plücker coordinates `(p01, p02, p03, p23, p31, p12)`.
///
/// With this ordering the pairing of two lines is
/// `l01 m23 + l02 m31 + l03 m12 + l23 m01 + l31 m02 + l12 m03`,
/// zero iff the lines are coplanar (intersect).
#[derive(Debug, Clone, PartialEq)]
pub struct ProjLine<S> {
    pub pl: [S; 6],
}

fn linf<S: Scalar>(v: &[S]) -> S {
    v.iter().map(|x| x.abs()).fold(S::zero(), |m, a| if a > m { a } else { m })
}

impl<S: Scalar> HomPoint<S> {
    pub fn new(c: [S; 4]) -> Result<Self> {
        if c.iter().all(|x| x.is_zero()) {
            return Err(Error::Degenerate("zero homogeneous vector".into()));
        }
        Ok(HomPoint { c })
    }

    pub fn from_i64(c: [i64; 4]) -> Self {
        HomPoint { c: c.map(S::from_i64) }
    }

    /// Standard basis point `e_k` (0-indexed).
    pub fn basis(k: usize) -> Self {
        let mut c = [S::zero(), S::zero(), S::zero(), S::zero()];
        c[k] = S::one();
        HomPoint { c }
    }

    /// Largest absolute component (projective scale of the lift).
    pub fn scale(&self) -> S {
        linf(&self.c)
    }

    /// Rescales the lift: unit Euclidean norm in float mode, unit max-abs in
    /// exact mode. The projective point is unchanged.
    pub fn normalized(&self) -> Self {
        if S::EXACT {
            let s = self.scale();
            if s.is_zero() {
                return self.clone();
            }
            HomPoint { c: self.c.clone().map(|x| x / s.clone()) }
        } else {
            let n = self
                .c
                .iter()
                .fold(S::zero(), |acc, x| acc + x.clone() * x.clone())
                .sqrt()
                .unwrap_or_else(S::one);
            if n.is_zero() {
                return self.clone();
            }
            HomPoint { c: self.c.clone().map(|x| x / n.clone()) }
        }
    }

    pub fn scaled(&self, f: &S) -> Self {
        HomPoint { c: self.c.clone().map(|x| x * f.clone()) }
    }

    /// Componentwise linear combination `a*self + b*other`.
    pub fn combo(&self, a: &S, other: &Self, b: &S) -> Self {
        let mut c = [S::zero(), S::zero(), S::zero(), S::zero()];
        for k in 0..4 {
            c[k] = a.clone() * self.c[k].clone() + b.clone() * other.c[k].clone();
        }
        HomPoint { c }
    }

    pub fn to_f64(&self) -> [f64; 4] {
        [
            self.c[0].to_f64(),
            self.c[1].to_f64(),
            self.c[2].to_f64(),
            self.c[3].to_f64(),
        ]
    }
}

impl<S: Scalar> ProjPlane<S> {
    pub fn new(c: [S; 4]) -> Result<Self> {
        if c.iter().all(|x| x.is_zero()) {
            return Err(Error::Degenerate("zero plane covector".into()));
        }
        Ok(ProjPlane { c })
    }

    /// Incidence form `covector . coords`.
    pub fn eval(&self, p: &HomPoint<S>) -> S {
        let mut acc = S::zero();
        for k in 0..4 {
            acc = acc + self.c[k].clone() * p.c[k].clone();
        }
        acc
    }

    /// Scale-normalized incidence residual.
    pub fn incidence_residual(&self, p: &HomPoint<S>) -> S {
        let s = linf(&self.c) * p.scale();
        if s.is_zero() {
            return S::zero();
        }
        self.eval(p).abs() / s
    }

    pub fn contains(&self, p: &HomPoint<S>, tol: f64) -> bool {
        let scale = linf(&self.c) * p.scale();
        S::below_tol(&self.eval(p), &scale, tol)
    }
}

/// 4x4 determinant of four stacked point rows; multilinear and alternating.
pub fn bracket<S: Scalar>(a: &HomPoint<S>, b: &HomPoint<S>, c: &HomPoint<S>, d: &HomPoint<S>) -> S {
    det4(&[a.c.clone(), b.c.clone(), c.c.clone(), d.c.clone()])
}

/// Same bracket divided by the product of the four lift scales, so the value
/// is invariant under rescaling of each argument's lift (up to sign).
pub fn bracket_normalized<S: Scalar>(
    a: &HomPoint<S>,
    b: &HomPoint<S>,
    c: &HomPoint<S>,
    d: &HomPoint<S>,
) -> S {
    let s = a.scale() * b.scale() * c.scale() * d.scale();
    if s.is_zero() {
        return S::zero();
    }
    bracket(a, b, c, d) / s
}

/// True iff all 2x2 minors of the stacked 2x4 matrix `(a; b)` are below
/// `tol * |a| * |b|`: the two lifts represent the same projective point.
pub fn proj_equal<S: Scalar>(a: &HomPoint<S>, b: &HomPoint<S>, tol: f64) -> bool {
    S::below_tol(&proj_distance(a, b), &S::one(), tol)
}

/// Max 2x2 minor of `(a; b)` normalized by the product of scales. Zero iff
/// projectively equal (exactly, in exact mode).
pub fn proj_distance<S: Scalar>(a: &HomPoint<S>, b: &HomPoint<S>) -> S {
    let mut m = S::zero();
    for i in 0..4 {
        for j in i + 1..4 {
            let d = (a.c[i].clone() * b.c[j].clone() - a.c[j].clone() * b.c[i].clone()).abs();
            if d > m {
                m = d;
            }
        }
    }
    let s = a.scale() * b.scale();
    if s.is_zero() {
        S::zero()
    } else {
        m / s
    }
}

/// Plane through three points; errors when the points are collinear or
/// coincident (relative tolerance `tol`).
pub fn plane_through<S: Scalar>(
    a: &HomPoint<S>,
    b: &HomPoint<S>,
    c: &HomPoint<S>,
    tol: f64,
) -> Result<ProjPlane<S>> {
    let n = cross4(&a.c, &b.c, &c.c);
    let scale = a.scale() * b.scale() * c.scale();
    let mag = linf(&n);
    if mag.is_zero() || S::below_tol(&mag, &scale, tol) {
        return Err(Error::Degenerate(
            "plane_through: points are collinear or coincident".into(),
        ));
    }
    ProjPlane::new(n)
}

impl<S: Scalar> ProjLine<S> {
    pub fn new(pl: [S; 6]) -> Result<Self> {
        if pl.iter().all(|x| x.is_zero()) {
            return Err(Error::Degenerate("zero Pluecker vector".into()));
        }
        Ok(ProjLine { pl })
    }

    pub fn scale(&self) -> S {
        linf(&self.pl)
    }

    /// Plücker pairing with another line; zero iff the lines intersect.
    pub fn pairing(&self, m: &ProjLine<S>) -> S {
        let l = &self.pl;
        let r = &m.pl;
        l[0].clone() * r[3].clone()
            + l[1].clone() * r[4].clone()
            + l[2].clone() * r[5].clone()
            + l[3].clone() * r[0].clone()
            + l[4].clone() * r[1].clone()
            + l[5].clone() * r[2].clone()
    }

    /// Pairing normalized by the two Plücker scales.
    pub fn pairing_normalized(&self, m: &ProjLine<S>) -> S {
        let s = self.scale() * m.scale();
        if s.is_zero() {
            return S::zero();
        }
        self.pairing(m).abs() / s
    }

    /// Self-pairing residual: zero for any honest line.
    pub fn pluecker_residual(&self) -> S {
        self.pairing_normalized(self)
    }

    /// The dual line (swap point-pair and plane-pair coordinates).
    pub fn dual(&self) -> ProjLine<S> {
        let p = &self.pl;
        ProjLine {
            pl: [
                p[3].clone(),
                p[4].clone(),
                p[5].clone(),
                p[0].clone(),
                p[1].clone(),
                p[2].clone(),
            ],
        }
    }

    /// Antisymmetric 4x4 matrix of the dual coordinates; a point lies on the
    /// line iff this matrix annihilates it.
    fn dual_matrix(&self) -> [[S; 4]; 4] {
        let d = self.dual();
        let q = &d.pl; // (q01,q02,q03,q23,q31,q12) as entries of skew matrix
        let z = S::zero;
        [
            [z(), q[0].clone(), q[1].clone(), q[2].clone()],
            [-q[0].clone(), z(), q[5].clone(), -q[4].clone()],
            [-q[1].clone(), -q[5].clone(), z(), q[3].clone()],
            [-q[2].clone(), q[4].clone(), -q[3].clone(), z()],
        ]
    }

    /// Scale-normalized distance of a point from the line (max residual of
    /// the dual-matrix product).
    pub fn point_residual(&self, x: &HomPoint<S>) -> S {
        let m = self.dual_matrix();
        let mut worst = S::zero();
        for row in &m {
            let mut acc = S::zero();
            for k in 0..4 {
                acc = acc + row[k].clone() * x.c[k].clone();
            }
            let a = acc.abs();
            if a > worst {
                worst = a;
            }
        }
        let s = self.scale() * x.scale();
        if s.is_zero() {
            S::zero()
        } else {
            worst / s
        }
    }

    pub fn contains_point(&self, x: &HomPoint<S>, tol: f64) -> bool {
        S::below_tol(&self.point_residual(x), &S::one(), tol)
    }

    /// Two (not necessarily unit) points spanning the line: the two largest
    /// columns of the primal Plücker matrix.
    pub fn span_points(&self) -> Result<(HomPoint<S>, HomPoint<S>)> {
        let p = &self.pl;
        let z = S::zero;
        // primal skew matrix P with P[i][j] = p_ij
        let m: [[S; 4]; 4] = [
            [z(), p[0].clone(), p[1].clone(), p[2].clone()],
            [-p[0].clone(), z(), p[5].clone(), -p[4].clone()],
            [-p[1].clone(), -p[5].clone(), z(), p[3].clone()],
            [-p[2].clone(), p[4].clone(), -p[3].clone(), z()],
        ];
        let mut cols: Vec<[S; 4]> = (0..4)
            .map(|j| {
                [
                    m[0][j].clone(),
                    m[1][j].clone(),
                    m[2][j].clone(),
                    m[3][j].clone(),
                ]
            })
            .collect();
        cols.sort_by(|a, b| {
            linf(b)
                .partial_cmp(&linf(a))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let a = HomPoint::new(cols[0].clone())?;
        // second column must be independent of the first
        for cand in cols.iter().skip(1) {
            if let Ok(b) = HomPoint::new(cand.clone()) {
                if proj_distance(&a, &b) > S::zero() {
                    return Ok((a, b));
                }
            }
        }
        Err(Error::Degenerate("line does not span two points".into()))
    }
}

/// Line through two projectively distinct points.
pub fn line_through<S: Scalar>(a: &HomPoint<S>, b: &HomPoint<S>, tol: f64) -> Result<ProjLine<S>> {
    let p = |i: usize, j: usize| {
        a.c[i].clone() * b.c[j].clone() - a.c[j].clone() * b.c[i].clone()
    };
    let pl = [p(0, 1), p(0, 2), p(0, 3), p(2, 3), p(3, 1), p(1, 2)];
    let mag = linf(&pl);
    let scale = a.scale() * b.scale();
    if mag.is_zero() || S::below_tol(&mag, &scale, tol) {
        return Err(Error::Degenerate("line_through: coincident points".into()));
    }
    ProjLine::new(pl)
}

/// True iff the mutual Plücker pairing vanishes within tolerance.
pub fn lines_intersect<S: Scalar>(l: &ProjLine<S>, m: &ProjLine<S>, tol: f64) -> bool {
    S::below_tol(&l.pairing_normalized(m), &S::one(), tol)
}

/// True iff the Plücker vectors are proportional within tolerance.
pub fn lines_coincide<S: Scalar>(l: &ProjLine<S>, m: &ProjLine<S>, tol: f64) -> bool {
    let mut worst = S::zero();
    for i in 0..6 {
        for j in i + 1..6 {
            let d = (l.pl[i].clone() * m.pl[j].clone() - l.pl[j].clone() * m.pl[i].clone()).abs();
            if d > worst {
                worst = d;
            }
        }
    }
    let s = l.scale() * m.scale();
    if s.is_zero() {
        return false;
    }
    S::below_tol(&(worst / s), &S::one(), tol)
}

/// Common line of two distinct planes.
pub fn meet<S: Scalar>(u: &ProjPlane<S>, v: &ProjPlane<S>, tol: f64) -> Result<ProjLine<S>> {
    // dual Plücker coordinates of the intersection, then swap back to primal
    let q = |i: usize, j: usize| {
        u.c[i].clone() * v.c[j].clone() - u.c[j].clone() * v.c[i].clone()
    };
    let dual = [q(0, 1), q(0, 2), q(0, 3), q(2, 3), q(3, 1), q(1, 2)];
    let mag = linf(&dual);
    let scale = linf(&u.c) * linf(&v.c);
    if mag.is_zero() || S::below_tol(&mag, &scale, tol) {
        return Err(Error::Degenerate("meet: planes coincide".into()));
    }
    Ok(ProjLine::new(dual)?.dual())
}

/// Intersection point of two intersecting lines, given spanning points of
/// each. Returns the common point (nullspace of the stacked relation).
pub fn line_line_intersection<S: Scalar>(
    l: &ProjLine<S>,
    m: &ProjLine<S>,
    tol: f64,
) -> Result<HomPoint<S>> {
    let (a, b) = l.span_points()?;
    let (c, d) = m.span_points()?;
    // Solve alpha*a + beta*b = gamma*c + delta*d: nullspace of [a b -c -d]^T x = 0
    // as 4 equations in (alpha,beta,gamma,delta).
    let rows: Vec<[S; 4]> = (0..4)
        .map(|k| {
            [
                a.c[k].clone(),
                b.c[k].clone(),
                -c.c[k].clone(),
                -d.c[k].clone(),
            ]
        })
        .collect();
    let ns = nullspace(&rows, tol)
        .ok_or_else(|| Error::Degenerate("lines do not intersect".into()))?;
    let p = a.combo(&ns[0], &b, &ns[1]);
    if p.c.iter().all(|x| x.is_zero()) {
        return Err(Error::Degenerate("line_line_intersection: zero point".into()));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;
    use proptest::prelude::*;

    type P = HomPoint<f64>;

    fn e(k: usize) -> P {
        HomPoint::basis(k)
    }

    #[test]
    fn bracket_identity_and_antisymmetry() {
        assert_eq!(bracket(&e(0), &e(1), &e(2), &e(3)), 1.0);
        assert_eq!(bracket(&e(1), &e(0), &e(2), &e(3)), -1.0);
        assert_eq!(bracket(&e(0), &e(0), &e(2), &e(3)), 0.0);
    }

    #[test]
    fn plane_through_basis_points() {
        let p = plane_through(&e(0), &e(1), &e(2), 1e-12).unwrap();
        // covector (0,0,0,1) up to scale
        let n: Vec<f64> = p.c.iter().map(|x| x.abs()).collect();
        assert!(n[0] == 0.0 && n[1] == 0.0 && n[2] == 0.0 && n[3] > 0.0);

        let p2 = plane_through(&e(0), &e(1), &e(3), 1e-12).unwrap();
        assert!(p2.c[0].abs() == 0.0 && p2.c[1].abs() == 0.0 && p2.c[2].abs() > 0.0);
        assert!(p2.c[3].abs() == 0.0);

        assert!(plane_through(&e(0), &e(1), &e(0), 1e-12).is_err());
    }

    #[test]
    fn axes_intersect_at_origin() {
        // x-axis: through (0,0,0,1) and (1,0,0,1); y-axis similar
        let o = HomPoint::new([0.0, 0.0, 0.0, 1.0]).unwrap();
        let px = HomPoint::new([1.0, 0.0, 0.0, 1.0]).unwrap();
        let py = HomPoint::new([0.0, 1.0, 0.0, 1.0]).unwrap();
        let lx = line_through(&o, &px, 1e-12).unwrap();
        let ly = line_through(&o, &py, 1e-12).unwrap();
        assert!(lines_intersect(&lx, &ly, 1e-12));
        let i = line_line_intersection(&lx, &ly, 1e-12).unwrap();
        assert!(proj_distance(&i, &o) < 1e-12);
    }

    #[test]
    fn skew_lines_do_not_intersect() {
        // x-axis {y=0,z=0} vs the skew line {y=1, z=x}:
        // points on the latter: (0,1,0,1) and (1,1,1,1).
        // By hand: L1 = x-axis through (0,0,0,1),(1,0,0,1): only p03-ish terms;
        // pairing evaluates to the determinant |a b c d| = -1, nonzero.
        let o = HomPoint::new([0.0, 0.0, 0.0, 1.0]).unwrap();
        let px = HomPoint::new([1.0, 0.0, 0.0, 1.0]).unwrap();
        let q0 = HomPoint::new([0.0, 1.0, 0.0, 1.0]).unwrap();
        let q1 = HomPoint::new([1.0, 1.0, 1.0, 1.0]).unwrap();
        let l1 = line_through(&o, &px, 1e-12).unwrap();
        let l2 = line_through(&q0, &q1, 1e-12).unwrap();
        let pairing = l1.pairing(&l2);
        assert!((pairing.abs() - 1.0).abs() < 1e-12, "pairing {pairing}");
        assert!(!lines_intersect(&l1, &l2, 1e-9));
    }

    #[test]
    fn meet_matches_line_through() {
        let l = line_through(&e(0), &e(1), 1e-12).unwrap();
        let pz = ProjPlane::new([0.0, 0.0, 1.0, 0.0]).unwrap(); // z = 0
        let pw = ProjPlane::new([0.0, 0.0, 0.0, 1.0]).unwrap(); // w = 0
        let m = meet(&pz, &pw, 1e-12).unwrap();
        assert!(lines_coincide(&l, &m, 1e-12));
    }

    #[test]
    fn proj_equal_scaling_and_tolerance() {
        let a = HomPoint::new([1.0, 2.0, -3.0, 0.5]).unwrap();
        let b = a.scaled(&2.0);
        assert!(proj_equal(&a, &b, 1e-12));
        assert!(!proj_equal(&e(0), &e(1), 1e-12));
        let mut c = a.clone();
        c.c[1] += 1e-13;
        assert!(proj_equal(&a, &c, 1e-9));
    }

    #[test]
    fn exact_backend_plane_incidence() {
        let a = HomPoint::<Rat>::from_i64([1, 2, 3, 5]);
        let b = HomPoint::<Rat>::from_i64([-1, 7, 0, 2]);
        let c = HomPoint::<Rat>::from_i64([4, 4, 1, 1]);
        let p = plane_through(&a, &b, &c, 0.0).unwrap();
        assert!(p.eval(&a).is_zero());
        assert!(p.eval(&b).is_zero());
        assert!(p.eval(&c).is_zero());
    }

    #[test]
    fn span_points_lie_on_line() {
        let a = HomPoint::new([1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = HomPoint::new([-2.0, 0.5, 1.0, 1.0]).unwrap();
        let l = line_through(&a, &b, 1e-12).unwrap();
        let (u, v) = l.span_points().unwrap();
        assert!(l.point_residual(&u) < 1e-12);
        assert!(l.point_residual(&v) < 1e-12);
        assert!(l.point_residual(&a) < 1e-12);
    }

    proptest! {
        #[test]
        fn bracket_alternating(v in proptest::collection::vec(-10.0f64..10.0, 16)) {
            let pts: Vec<P> = (0..4)
                .filter_map(|k| HomPoint::new([v[4*k], v[4*k+1], v[4*k+2], v[4*k+3]]).ok())
                .collect();
            prop_assume!(pts.len() == 4);
            let d = bracket(&pts[0], &pts[1], &pts[2], &pts[3]);
            let swapped = bracket(&pts[1], &pts[0], &pts[2], &pts[3]);
            prop_assert!((d + swapped).abs() <= 1e-9 * (1.0 + d.abs()));
            let repeated = bracket(&pts[0], &pts[0], &pts[2], &pts[3]);
            prop_assert!(repeated.abs() <= 1e-9);
        }

        #[test]
        fn bracket_multilinear(v in proptest::collection::vec(-5.0f64..5.0, 20), s in -3.0f64..3.0, t in -3.0f64..3.0) {
            let mk = |k: usize| HomPoint::new([v[4*k], v[4*k+1], v[4*k+2], v[4*k+3]]);
            let (a, b, c, d, e2) = (mk(0), mk(1), mk(2), mk(3), mk(4));
            prop_assume!(a.is_ok() && b.is_ok() && c.is_ok() && d.is_ok() && e2.is_ok());
            let (a, b, c, d, e2) = (a.unwrap(), b.unwrap(), c.unwrap(), d.unwrap(), e2.unwrap());
            let lhs = bracket(&a.combo(&s, &e2, &t), &b, &c, &d);
            let rhs = s * bracket(&a, &b, &c, &d) + t * bracket(&e2, &b, &c, &d);
            prop_assert!((lhs - rhs).abs() <= 1e-7 * (1.0 + lhs.abs().max(rhs.abs())));
        }

        #[test]
        fn lines_coincide_under_scaling(v in proptest::collection::vec(-5.0f64..5.0, 8), s in 0.1f64..4.0) {
            let a = HomPoint::new([v[0], v[1], v[2], v[3]]);
            let b = HomPoint::new([v[4], v[5], v[6], v[7]]);
            prop_assume!(a.is_ok() && b.is_ok());
            let (a, b) = (a.unwrap(), b.unwrap());
            let l = line_through(&a, &b, 1e-9);
            prop_assume!(l.is_ok());
            let l = l.unwrap();
            let scaled = ProjLine::new(l.pl.clone().map(|x| x * s)).unwrap();
            prop_assert!(lines_coincide(&l, &scaled, 1e-12));
            prop_assert!(l.pluecker_residual() < 1e-12);
        }
    }
}
