//! The tangency condition between neighbouring quadrics, the four induced
//! fractional-linear maps S¹, T¹, S², T², the discrete projective-minimality
//! residuals (map closure and gauge form) and the key compatibility identity
//! tying the two closing conditions together.

use crate::error::{Error, Result};
use crate::net::{AsymptoticNet, FrameAB, FrameGD, GaugeField};
use crate::proj::bracket;
use crate::quadric::{disc1, disc2, GenParam, LatticeQuadric, QuadricField};
use crate::scalar::Scalar;

/// 2x2 real matrix acting on projective parameter pairs, defined up to
/// scale. `degenerate` marks rank-one maps (constant fractional-linear
/// maps), which occur exactly when the matching discriminant vanishes.
#[derive(Debug, Clone)]
pub struct MoebiusMap<S> {
    pub m: [[S; 2]; 2],
    pub degenerate: bool,
}

/// Which of the four tangency maps to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    S1,
    T1,
    S2,
    T2,
}

impl<S: Scalar> MoebiusMap<S> {
    pub fn det(&self) -> S {
        self.m[0][0].clone() * self.m[1][1].clone() - self.m[0][1].clone() * self.m[1][0].clone()
    }

    pub fn max_entry(&self) -> S {
        let mut worst = S::zero();
        for r in &self.m {
            for e in r {
                let a = e.abs();
                if a > worst {
                    worst = a;
                }
            }
        }
        worst
    }

    /// Apply to a projective parameter pair `(u0 : u1)`.
    pub fn apply(&self, u: &[S; 2]) -> [S; 2] {
        [
            self.m[0][0].clone() * u[0].clone() + self.m[0][1].clone() * u[1].clone(),
            self.m[1][0].clone() * u[0].clone() + self.m[1][1].clone() * u[1].clone(),
        ]
    }

    /// Matrix composition `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &MoebiusMap<S>) -> MoebiusMap<S> {
        let a = &self.m;
        let b = &other.m;
        let mut m: [[S; 2]; 2] = std::array::from_fn(|_| std::array::from_fn(|_| S::zero()));
        for r in 0..2 {
            for c in 0..2 {
                m[r][c] = a[r][0].clone() * b[0][c].clone() + a[r][1].clone() * b[1][c].clone();
            }
        }
        MoebiusMap { m, degenerate: self.degenerate || other.degenerate }
    }

    /// The constant value of a degenerate (rank-one) map.
    pub fn constant_value(&self) -> [S; 2] {
        [self.m[0][0].clone(), self.m[1][0].clone()]
    }
}

/// Scale-normalized proportionality residual of two 2x2 matrices: the
/// largest 2x2 minor of the stacked `2x4` coefficient matrix divided by the
/// product of the entry scales. Zero iff the matrices agree as projective
/// maps.
pub fn proportionality_residual<S: Scalar>(a: &MoebiusMap<S>, b: &MoebiusMap<S>) -> S {
    let av = [
        a.m[0][0].clone(),
        a.m[0][1].clone(),
        a.m[1][0].clone(),
        a.m[1][1].clone(),
    ];
    let bv = [
        b.m[0][0].clone(),
        b.m[0][1].clone(),
        b.m[1][0].clone(),
        b.m[1][1].clone(),
    ];
    let mut worst = S::zero();
    for i in 0..4 {
        for j in i + 1..4 {
            let m = (av[i].clone() * bv[j].clone() - av[j].clone() * bv[i].clone()).abs();
            if m > worst {
                worst = m;
            }
        }
    }
    let s = a.max_entry() * b.max_entry();
    if s.is_zero() {
        S::zero()
    } else {
        worst / s
    }
}

/// Builds one of the four tangency maps from the frame coefficients of the
/// base vertex and the quadric label `p` of the base face. A vanishing
/// discriminant makes S¹ (resp. T²) rank one; the flag marks it and the
/// matrix then represents the constant map onto the shared-generator label.
pub fn mobius_map<S: Scalar>(
    kind: MapKind,
    ab: Option<&FrameAB<S>>,
    gd: Option<&FrameGD<S>>,
    p: &S,
    dtol: f64,
) -> Result<MoebiusMap<S>> {
    if p.is_zero() {
        return Err(Error::ZeroDenominator("mobius_map: p"));
    }
    let two = S::from_i64(2);
    let m: [[S; 2]; 2] = match kind {
        MapKind::S1 => {
            let f = ab.ok_or_else(|| Error::Inconsistent("S1 needs ab coefficients".into()))?;
            let lin = f.a1.clone() * f.b2.clone() * p.clone() - f.a0.clone() * f.b3.clone();
            [
                [lin.clone(), two.clone() * f.a0.clone() * f.b1.clone() * p.clone()],
                [
                    two * f.a3.clone() * f.b2.clone() * p.clone(),
                    -(p.clone() * lin),
                ],
            ]
        }
        MapKind::T1 => {
            let f = ab.ok_or_else(|| Error::Inconsistent("T1 needs ab coefficients".into()))?;
            [
                [
                    -(f.a1.clone() * f.b2.clone() * p.clone() + f.a0.clone() * f.b3.clone()),
                    two.clone() * f.a0.clone() * f.b2.clone() * p.clone(),
                ],
                [two * f.b2.clone() * p.clone(), S::zero()],
            ]
        }
        MapKind::S2 => {
            let f = gd.ok_or_else(|| Error::Inconsistent("S2 needs gd coefficients".into()))?;
            [
                [
                    -(f.g2.clone() * f.d1.clone() * p.clone() + f.g0.clone() * f.d3.clone()),
                    two.clone() * f.g0.clone() * f.d1.clone() * p.clone(),
                ],
                [two * f.d1.clone() * p.clone(), S::zero()],
            ]
        }
        MapKind::T2 => {
            let f = gd.ok_or_else(|| Error::Inconsistent("T2 needs gd coefficients".into()))?;
            let lin = f.g2.clone() * f.d1.clone() * p.clone() - f.g0.clone() * f.d3.clone();
            [
                [lin.clone(), two.clone() * f.g0.clone() * f.d2.clone() * p.clone()],
                [
                    two * f.g3.clone() * f.d1.clone() * p.clone(),
                    -(p.clone() * lin),
                ],
            ]
        }
    };
    let map = MoebiusMap { m, degenerate: false };
    let det = map.det();
    let scale = {
        let s = map.max_entry();
        s.clone() * s
    };
    let degenerate = S::below_tol(&det, &scale, dtol);
    Ok(MoebiusMap { degenerate, ..map })
}

/// The two bracket residuals of the tangency condition between points
/// `X = Q(g)` and `X' = Q'(g')`: `|X, X', dQ/ds|_X, dQ/dt|_X|` and the same
/// with derivatives on `Q'`, both scale-normalized. They vanish iff the
/// joining line is tangent to both quadrics at the respective points.
pub fn tangency_residual<S: Scalar>(
    q: &LatticeQuadric<S>,
    q_next: &LatticeQuadric<S>,
    g: &GenParam<S>,
    g_next: &GenParam<S>,
    tol: f64,
) -> Result<(S, S)> {
    let x = q.eval(g).normalized();
    let xn = q_next.eval(g_next).normalized();
    if crate::proj::proj_equal(&x, &xn, tol) {
        return Err(Error::Degenerate("tangency_residual: coincident points".into()));
    }
    let (ds, dt) = q.tangent_dirs(g);
    let (dsn, dtn) = q_next.tangent_dirs(g_next);
    let r1 = bracket(&x, &xn, &ds.normalized(), &dt.normalized()).abs();
    let r2 = bracket(&x, &xn, &dsn.normalized(), &dtn.normalized()).abs();
    Ok((r1, r2))
}

/// Closure residual of the tangency maps around the 2x2 block of faces at
/// base vertex `v`, as matrix proportionality of the two composite routes.
///
/// The S route is testable only when both S¹ factors are regular
/// (`D¹(v) != 0` and `D¹(v+e2) != 0`), the T route when both T² factors
/// are (`D²(v) != 0`, `D²(v+e1) != 0`). On a valid net both routes carry
/// the same verdict wherever both apply.
#[derive(Debug, Clone)]
pub struct MapClosure<S> {
    pub s_residual: Option<S>,
    pub t_residual: Option<S>,
}

impl<S: Scalar> MapClosure<S> {
    /// Largest available residual; `None` when all four relevant maps are
    /// degenerate (classification handles that case).
    pub fn residual(&self) -> Option<S> {
        match (&self.s_residual, &self.t_residual) {
            (Some(a), Some(b)) => Some(if a > b { a.clone() } else { b.clone() }),
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(b.clone()),
            (None, None) => None,
        }
    }
}

/// Frame halves and labels around the 2x2 block at `v` needed by the
/// closure tests.
pub(crate) struct BlockFrames<S> {
    pub ab_v: FrameAB<S>,
    pub gd_v: FrameGD<S>,
    pub gd_v1: FrameGD<S>,
    pub ab_v2: FrameAB<S>,
    pub p_v: S,
    pub p_v1: S,
    pub p_v2: S,
}

pub(crate) fn block_frames<S: Scalar>(
    net: &AsymptoticNet<S>,
    p: &QuadricField<S>,
    v: (usize, usize),
    stol: f64,
) -> Result<BlockFrames<S>> {
    let (i, j) = v;
    Ok(BlockFrames {
        ab_v: net.frame_ab(i, j, stol)?,
        gd_v: net.frame_gd(i, j, stol)?,
        gd_v1: net.frame_gd(i + 1, j, stol)?,
        ab_v2: net.frame_ab(i, j + 1, stol)?,
        p_v: p.at(i, j).clone(),
        p_v1: p.at(i + 1, j).clone(),
        p_v2: p.at(i, j + 1).clone(),
    })
}

pub(crate) fn closure_from_frames<S: Scalar>(
    f: &BlockFrames<S>,
    dtol: f64,
) -> Result<MapClosure<S>> {
    let s1 = mobius_map(MapKind::S1, Some(&f.ab_v), None, &f.p_v, dtol)?;
    let s2 = mobius_map(MapKind::S2, None, Some(&f.gd_v), &f.p_v, dtol)?;
    let t1 = mobius_map(MapKind::T1, Some(&f.ab_v), None, &f.p_v, dtol)?;
    let t2 = mobius_map(MapKind::T2, None, Some(&f.gd_v), &f.p_v, dtol)?;
    let s2_1 = mobius_map(MapKind::S2, None, Some(&f.gd_v1), &f.p_v1, dtol)?;
    let t2_1 = mobius_map(MapKind::T2, None, Some(&f.gd_v1), &f.p_v1, dtol)?;
    let s1_2 = mobius_map(MapKind::S1, Some(&f.ab_v2), None, &f.p_v2, dtol)?;
    let t1_2 = mobius_map(MapKind::T1, Some(&f.ab_v2), None, &f.p_v2, dtol)?;

    let s_residual = if !s1.degenerate && !s1_2.degenerate {
        Some(proportionality_residual(&s2_1.compose(&s1), &s1_2.compose(&s2)))
    } else {
        None
    };
    let t_residual = if !t2.degenerate && !t2_1.degenerate {
        Some(proportionality_residual(&t2_1.compose(&t1), &t1_2.compose(&t2)))
    } else {
        None
    };
    Ok(MapClosure { s_residual, t_residual })
}

/// Gauge-free projective-minimality residual at `v`: proportionality of
/// `S²₁ ∘ S¹` with `S¹₂ ∘ S²` (and the T analogue). Zero iff the envelope
/// closes around `v` for every seed.
pub fn pm_residual_maps<S: Scalar>(
    net: &AsymptoticNet<S>,
    p: &QuadricField<S>,
    v: (usize, usize),
    stol: f64,
    dtol: f64,
) -> Result<MapClosure<S>> {
    let frames = block_frames(net, p, v, stol)?;
    closure_from_frames(&frames, dtol)
}

// ---------------------------------------------------------------------------
// Gauge formulation
// ---------------------------------------------------------------------------

/// `T¹ = D¹ / (a0 b2 p)²` at a vertex.
pub fn t1_value<S: Scalar>(ab: &FrameAB<S>, p: &S) -> Result<S> {
    let den = ab.a0.clone() * ab.b2.clone() * p.clone();
    if den.is_zero() {
        return Err(Error::ZeroDenominator("T1 denominator"));
    }
    Ok(disc1(ab, p) / (den.clone() * den))
}

/// `T² = D² / (g0 d1 p)²` at a vertex.
pub fn t2_value<S: Scalar>(gd: &FrameGD<S>, p: &S) -> Result<S> {
    let den = gd.g0.clone() * gd.d1.clone() * p.clone();
    if den.is_zero() {
        return Err(Error::ZeroDenominator("T2 denominator"));
    }
    Ok(disc2(gd, p) / (den.clone() * den))
}

/// Squared gauge ratio of the normalized gauge at `v`:
/// `y² = (1 - b1 d2/(b2 d1)) / p²`. In the gauge of the normalisation the
/// lattice differences of `T¹`, `T²` become
/// `Δ₂T¹ ∝ y² T¹(v+e2) − T¹(v)` and `Δ₁T² ∝ y² T²(v+e1) − T²(v)`
/// with a positive per-vertex factor, so zero sets agree. This form needs
/// no square root and is exact in rational mode.
pub fn gauge_ratio_sq<S: Scalar>(ab: &FrameAB<S>, gd: &FrameGD<S>, p: &S) -> Result<S> {
    let den = ab.b2.clone() * gd.d1.clone();
    if den.is_zero() || p.is_zero() {
        return Err(Error::ZeroDenominator("gauge ratio"));
    }
    Ok((S::one() - ab.b1.clone() * gd.d2.clone() / den) / (p.clone() * p.clone()))
}

/// The two normalized-gauge lattice differences at `v` in implicit form,
/// plus the scale of the terms entering them (for relative thresholds).
#[derive(Debug, Clone)]
pub struct GaugeDeltas<S> {
    pub delta_t1: S,
    pub delta_t2: S,
    pub scale: S,
}

/// Generic magnitude of `T¹` built from the coefficient scales; bounds the
/// value a nondegenerate instance would take, so differences of
/// near-vanishing discriminants are not amplified into false verdicts.
fn t1_floor<S: Scalar>(ab: &FrameAB<S>, p: &S) -> S {
    let half = (ab.a0.clone() * ab.b3.clone()).abs()
        + (ab.a1.clone() * ab.b2.clone() * p.clone()).abs();
    let den = ab.a0.clone() * ab.b2.clone() * p.clone();
    (half.clone() * half
        + S::from_i64(4)
            * (ab.a0.clone() * ab.a3.clone() * ab.b1.clone() * ab.b2.clone() * p.clone()).abs())
        / (den.clone() * den)
}

fn t2_floor<S: Scalar>(gd: &FrameGD<S>, p: &S) -> S {
    let half = (gd.g0.clone() * gd.d3.clone()).abs()
        + (gd.g2.clone() * gd.d1.clone() * p.clone()).abs();
    let den = gd.g0.clone() * gd.d1.clone() * p.clone();
    (half.clone() * half
        + S::from_i64(4)
            * (gd.g0.clone() * gd.g3.clone() * gd.d1.clone() * gd.d2.clone() * p.clone()).abs())
        / (den.clone() * den)
}

pub fn gauge_deltas<S: Scalar>(
    net: &AsymptoticNet<S>,
    p: &QuadricField<S>,
    v: (usize, usize),
    stol: f64,
) -> Result<GaugeDeltas<S>> {
    let (i, j) = v;
    let ab_v = net.frame_ab(i, j, stol)?;
    let gd_v = net.frame_gd(i, j, stol)?;
    let ab_v2 = net.frame_ab(i, j + 1, stol)?;
    let gd_v1 = net.frame_gd(i + 1, j, stol)?;
    let ysq = gauge_ratio_sq(&ab_v, &gd_v, p.at(i, j))?;
    let t1_v = t1_value(&ab_v, p.at(i, j))?;
    let t1_v2 = t1_value(&ab_v2, p.at(i, j + 1))?;
    let t2_v = t2_value(&gd_v, p.at(i, j))?;
    let t2_v1 = t2_value(&gd_v1, p.at(i + 1, j))?;
    let a = ysq.clone() * t1_v2;
    let b = ysq.clone() * t2_v1;
    let floor = ysq.abs()
        * (t1_floor(&ab_v2, p.at(i, j + 1)) + t2_floor(&gd_v1, p.at(i + 1, j)))
        + t1_floor(&ab_v, p.at(i, j))
        + t2_floor(&gd_v, p.at(i, j));
    let scale = a.abs() + t1_v.abs() + b.abs() + t2_v.abs() + floor;
    Ok(GaugeDeltas {
        delta_t1: a - t1_v,
        delta_t2: b - t2_v,
        scale,
    })
}

/// Residual of the key compatibility identity at `v`:
/// `(b1/b2) Δ₁T² − (d2/d1) Δ₂T¹`, scale-normalized. A consequence of the
/// discrete Gauss-Mainardi-Codazzi equations, it vanishes on every valid
/// asymptotic net, projective minimal or not; exactly zero in rational mode.
pub fn keydisc_residual<S: Scalar>(
    net: &AsymptoticNet<S>,
    p: &QuadricField<S>,
    v: (usize, usize),
    stol: f64,
) -> Result<S> {
    let (i, j) = v;
    let ab = net.frame_ab(i, j, stol)?;
    let gd = net.frame_gd(i, j, stol)?;
    let d = gauge_deltas(net, p, v, stol)?;
    let lhs = ab.b1.clone() / ab.b2.clone() * d.delta_t2;
    let rhs = gd.d2.clone() / gd.d1.clone() * d.delta_t1;
    let scale = (ab.b1.abs() / ab.b2.abs() + gd.d2.abs() / gd.d1.abs()) * d.scale;
    if scale.is_zero() {
        return Ok(S::zero());
    }
    Ok((lhs - rhs) / scale)
}

/// Projective-minimality report in the gauge formulation.
#[derive(Debug, Clone)]
pub struct PmReport<S> {
    /// `Δ₂T¹` per vertex (implicit normalized-gauge form).
    pub delta_t1: Vec<(usize, usize, S)>,
    /// `Δ₁T²` per vertex.
    pub delta_t2: Vec<(usize, usize, S)>,
    /// Largest `|Δ|/scale` over the grid.
    pub max_relative: f64,
    /// Verdict at the given tolerance.
    pub pm: bool,
    /// Explicit gauge when one was materialised (float backend).
    pub gauge_used: Option<GaugeField<S>>,
}

/// Evaluates both closing conditions over all interior vertices. The
/// implicit normalized-gauge form drives the verdict; in the float backend
/// the explicit gauge of the normalisation lemma is attached when it exists.
pub fn pm_residual_gauge<S: Scalar>(
    net: &AsymptoticNet<S>,
    p: &QuadricField<S>,
    stol: f64,
    tol: f64,
) -> Result<PmReport<S>> {
    if net.rows() < 4 || net.cols() < 4 {
        return Err(Error::GridTooSmall {
            need: "4x4".into(),
            got: format!("{}x{}", net.rows(), net.cols()),
        });
    }
    let mut delta_t1 = Vec::new();
    let mut delta_t2 = Vec::new();
    let mut max_rel = 0.0f64;
    let mut pm = true;
    for i in 0..net.rows() - 3 {
        for j in 0..net.cols() - 3 {
            let d = gauge_deltas(net, p, (i, j), stol)?;
            let scale = if d.scale.is_zero() { S::one() } else { d.scale.clone() };
            let r1 = (d.delta_t1.abs() / scale.clone()).to_f64();
            let r2 = (d.delta_t2.abs() / scale.clone()).to_f64();
            max_rel = max_rel.max(r1).max(r2);
            if !S::below_tol(&d.delta_t1, &scale, tol) || !S::below_tol(&d.delta_t2, &scale, tol) {
                pm = false;
            }
            delta_t1.push((i, j, d.delta_t1));
            delta_t2.push((i, j, d.delta_t2));
        }
    }
    let gauge_used = if S::EXACT { None } else { net.normalize_gauge(p, stol).ok() };
    Ok(PmReport { delta_t1, delta_t2, max_relative: max_rel, pm, gauge_used })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proj::HomPoint;
    use crate::quadric::GenParam;

    fn simple_ab() -> FrameAB<f64> {
        // a0=a3=b1=b2=1, a1=b3=0
        FrameAB { a0: 1.0, a1: 0.0, a3: 1.0, b1: 1.0, b2: 1.0, b3: 0.0 }
    }

    fn simple_gd() -> FrameGD<f64> {
        FrameGD { g0: 1.0, g2: 0.0, g3: 1.0, d1: 1.0, d2: 1.0, d3: 0.0 }
    }

    #[test]
    fn s1_is_inversion_for_simple_instance() {
        // S1: s -> 1/s; e.g. maps 2 to 1/2, fixed points +-1 are the
        // shared-generator labels (roots of s^2 - 1 = 0).
        let m = mobius_map(MapKind::S1, Some(&simple_ab()), None, &1.0, 1e-9).unwrap();
        assert!(!m.degenerate);
        let img = m.apply(&[2.0, 1.0]);
        assert!((img[0] / img[1] - 0.5).abs() < 1e-14);
        for s in [1.0f64, -1.0] {
            let im = m.apply(&[s, 1.0]);
            assert!((im[0] / im[1] - s).abs() < 1e-14);
        }
    }

    #[test]
    fn t1_is_inversion_for_simple_instance() {
        let m = mobius_map(MapKind::T1, Some(&simple_ab()), None, &1.0, 1e-9).unwrap();
        let img = m.apply(&[4.0, 1.0]);
        assert!((img[0] / img[1] - 0.25).abs() < 1e-14);
    }

    #[test]
    fn degenerate_map_is_constant() {
        // Solve D1 = 0 for b1: D1 = (a0 b3 - a1 b2 p)^2 + 4 a0 a3 b1 b2 p
        // with a0=a3=b2=1, a1=2, b3=1, p=1: D1 = (1-2)^2 + 4 b1 = 0 -> b1=-1/4.
        let ab = FrameAB { a0: 1.0, a1: 2.0, a3: 1.0, b1: -0.25, b2: 1.0, b3: 1.0 };
        let m = mobius_map(MapKind::S1, Some(&ab), None, &1.0, 1e-9).unwrap();
        assert!(m.degenerate);
        // constant value = (a1 b2 p - a0 b3)/(2 a3 b2 p) = 1/2
        for s in [0.3f64, -2.0, 5.0] {
            let im = m.apply(&[s, 1.0]);
            assert!((im[0] / im[1] - 0.5).abs() < 1e-12, "{:?}", im);
        }
        let cv = m.constant_value();
        assert!((cv[0] / cv[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn tangency_residual_vanishes_on_mapped_points() {
        // Base quadric on the standard simplex corners with p=1 and the
        // neighbour built from the frame relations of the simple instance:
        // r11 = r + r12, r112 = r1 + r2 (a0=a3=b1=b2=1, a1=b3=0).
        let r = HomPoint::<f64>::from_i64([1, 0, 0, 0]);
        let r1 = HomPoint::from_i64([0, 1, 0, 0]);
        let r2 = HomPoint::from_i64([0, 0, 1, 0]);
        let r12 = HomPoint::from_i64([0, 0, 0, 1]);
        let r11 = r.combo(&1.0, &r12, &1.0);
        let r112 = r1.combo(&1.0, &r2, &1.0);
        let q = LatticeQuadric { p: 1.0, r: r.clone(), r1: r1.clone(), r2: r2.clone(), r12: r12.clone() };
        // Q1 corners: r1, r11, r12, r112 with p1 = a0/(b2 p) = 1
        let q1 = LatticeQuadric { p: 1.0, r: r1.clone(), r1: r11, r2: r12.clone(), r12: r112 };
        let g = GenParam::affine(2.0, 3.0);
        // S1: s->1/s, T1: t->1/t
        let g1 = GenParam::affine(0.5, 1.0 / 3.0);
        let (d1, d2) = tangency_residual(&q, &q1, &g, &g1, 1e-12).unwrap();
        assert!(d1 < 1e-12 && d2 < 1e-12, "residuals {d1} {d2}");
        // un-mapped parameters must NOT satisfy tangency
        let (e1, e2) = tangency_residual(&q, &q1, &g, &g, 1e-12).unwrap();
        assert!(e1 > 1e-3 || e2 > 1e-3, "residuals {e1} {e2}");
    }

    #[test]
    fn t_values_simple() {
        let t1 = t1_value(&simple_ab(), &1.0).unwrap();
        assert!((t1 - 4.0).abs() < 1e-14); // D1 = 4, (a0 b2 p)^2 = 1
        let t2 = t2_value(&simple_gd(), &1.0).unwrap();
        assert!((t2 - 4.0).abs() < 1e-14);
    }
}
