//! Discrete envelopes of a set of lattice Lie quadrics: one point per face,
//! propagated by the tangency maps, with the dual-lattice stars touching the
//! quadrics. Includes closure verification, shared-generator edge handling
//! and diagnostics.

use crate::error::{Error, Result};
use crate::net::AsymptoticNet;
use crate::proj::{bracket, line_through, lines_coincide, proj_distance, HomPoint};
use crate::quadric::{
    shared_generators_dir1, shared_generators_dir2, GenParam, LatticeQuadric, QuadricField,
};
use crate::scalar::Scalar;
use crate::tangency::{mobius_map, MapKind, MoebiusMap};
use crate::{DISCRIMINANT_TOL, STRUCTURAL_ZERO_TOL};
use rand::Rng;

/// Per-edge marker of an envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeFlag {
    Generic,
    SharedGenerator,
}

/// Discrete envelope: a dual lattice with one vertex per net face.
#[derive(Debug, Clone)]
pub struct Envelope<S> {
    /// Face-grid dimensions (net rows-1 by cols-1).
    pub rows: usize,
    pub cols: usize,
    pub params: Vec<GenParam<S>>,
    pub points: Vec<HomPoint<S>>,
    /// Flags for edges between faces `(i,j)` and `(i+1,j)`.
    pub flags_n1: Vec<EdgeFlag>,
    /// Flags for edges between faces `(i,j)` and `(i,j+1)`.
    pub flags_n2: Vec<EdgeFlag>,
    /// Largest diagonal-closure mismatch observed during propagation.
    pub max_closure_mismatch: f64,
}

impl<S: Scalar> Envelope<S> {
    pub fn param(&self, i: usize, j: usize) -> &GenParam<S> {
        &self.params[i * self.cols + j]
    }

    pub fn point(&self, i: usize, j: usize) -> &HomPoint<S> {
        &self.points[i * self.cols + j]
    }

    pub fn flag_n1(&self, i: usize, j: usize) -> EdgeFlag {
        self.flags_n1[i * self.cols + j]
    }

    pub fn flag_n2(&self, i: usize, j: usize) -> EdgeFlag {
        self.flags_n2[i * (self.cols - 1) + j]
    }
}

fn apply_or_transfer<S: Scalar>(m: &MoebiusMap<S>, u: &[S; 2], p: &S) -> ([S; 2], bool) {
    let img = m.apply(u);
    let scale = m.max_entry() * (u[0].abs() + u[1].abs());
    let mag = img[0].abs() + img[1].abs();
    if S::below_tol(&mag, &scale, 1e-9) {
        // parameter sits in the kernel (the coinciding shared-generator
        // label): continue along the generator transfer ps' = s
        ([u[0].clone(), u[1].clone() * p.clone()], true)
    } else {
        (img, false)
    }
}

fn apply_or_transfer_back<S: Scalar>(m: &MoebiusMap<S>, u: &[S; 2], p: &S) -> ([S; 2], bool) {
    let img = m.apply(u);
    let scale = m.max_entry() * (u[0].abs() + u[1].abs());
    let mag = img[0].abs() + img[1].abs();
    if S::below_tol(&mag, &scale, 1e-9) {
        ([u[0].clone() * p.clone(), u[1].clone()], true)
    } else {
        (img, false)
    }
}

fn adjugate<S: Scalar>(m: &MoebiusMap<S>) -> MoebiusMap<S> {
    MoebiusMap {
        m: [
            [m.m[1][1].clone(), -m.m[0][1].clone()],
            [-m.m[1][0].clone(), m.m[0][0].clone()],
        ],
        degenerate: m.degenerate,
    }
}

pub(crate) struct Propagator<'a, S> {
    pub net: &'a AsymptoticNet<S>,
    pub p: &'a QuadricField<S>,
    pub stol: f64,
    pub dtol: f64,
}

impl<S: Scalar> Propagator<'_, S> {
    /// Forward step from face `(i,j)` in direction 1 (maps at vertex (i,j)).
    pub fn step1(&self, (i, j): (usize, usize), g: &GenParam<S>) -> Result<(GenParam<S>, bool)> {
        let ab = self.net.frame_ab(i, j, self.stol)?;
        let pv = self.p.at(i, j);
        let s1 = mobius_map(MapKind::S1, Some(&ab), None, pv, self.dtol)?;
        let t1 = mobius_map(MapKind::T1, Some(&ab), None, pv, self.dtol)?;
        let (s_new, on_gen) = apply_or_transfer(&s1, &g.s, pv);
        let (t_new, _) = apply_or_transfer(&t1, &g.t, pv);
        Ok((GenParam::from_pairs(s_new, t_new)?, on_gen))
    }

    pub fn step2(&self, (i, j): (usize, usize), g: &GenParam<S>) -> Result<(GenParam<S>, bool)> {
        let gd = self.net.frame_gd(i, j, self.stol)?;
        let pv = self.p.at(i, j);
        let s2 = mobius_map(MapKind::S2, None, Some(&gd), pv, self.dtol)?;
        let t2 = mobius_map(MapKind::T2, None, Some(&gd), pv, self.dtol)?;
        let (s_new, _) = apply_or_transfer(&s2, &g.s, pv);
        let (t_new, on_gen) = apply_or_transfer(&t2, &g.t, pv);
        Ok((GenParam::from_pairs(s_new, t_new)?, on_gen))
    }

    /// Backward steps via the adjugate of the forward matrices.
    fn back1(&self, (i, j): (usize, usize), g: &GenParam<S>) -> Result<GenParam<S>> {
        let ab = self.net.frame_ab(i, j, self.stol)?;
        let pv = self.p.at(i, j);
        let s1 = adjugate(&mobius_map(MapKind::S1, Some(&ab), None, pv, self.dtol)?);
        let t1 = adjugate(&mobius_map(MapKind::T1, Some(&ab), None, pv, self.dtol)?);
        let (s_new, _) = apply_or_transfer_back(&s1, &g.s, pv);
        let (t_new, _) = apply_or_transfer_back(&t1, &g.t, pv);
        GenParam::from_pairs(s_new, t_new)
    }

    fn back2(&self, (i, j): (usize, usize), g: &GenParam<S>) -> Result<GenParam<S>> {
        let gd = self.net.frame_gd(i, j, self.stol)?;
        let pv = self.p.at(i, j);
        let s2 = adjugate(&mobius_map(MapKind::S2, None, Some(&gd), pv, self.dtol)?);
        let t2 = adjugate(&mobius_map(MapKind::T2, None, Some(&gd), pv, self.dtol)?);
        let (s_new, _) = apply_or_transfer_back(&s2, &g.s, pv);
        let (t_new, _) = apply_or_transfer_back(&t2, &g.t, pv);
        GenParam::from_pairs(s_new, t_new)
    }

    pub fn quadric(&self, i: usize, j: usize) -> Result<LatticeQuadric<S>> {
        LatticeQuadric::from_net(self.net, i, j, self.p.at(i, j).clone())
    }
}

/// Propagates an envelope over the whole face lattice from a seed parameter
/// on the seed face, applying the tangency maps and verifying the diagonal
/// closing condition at every 2x2 block of faces.
pub fn propagate_envelope<S: Scalar>(
    net: &AsymptoticNet<S>,
    p: &QuadricField<S>,
    seed_face: (usize, usize),
    g0: GenParam<S>,
    tol: f64,
) -> Result<Envelope<S>> {
    let rows = net.rows() - 1;
    let cols = net.cols() - 1;
    let (fi, fj) = seed_face;
    if fi >= rows || fj >= cols {
        return Err(Error::Inconsistent("seed face outside grid".into()));
    }
    let pr = Propagator { net, p, stol: STRUCTURAL_ZERO_TOL, dtol: DISCRIMINANT_TOL };
    let mut params: Vec<Option<GenParam<S>>> = vec![None; rows * cols];
    params[fi * cols + fj] = Some(g0);
    // seed row
    for i in fi + 1..rows {
        let g = params[(i - 1) * cols + fj].clone().unwrap();
        let (gn, _) = pr.step1((i - 1, fj), &g)?;
        params[i * cols + fj] = Some(gn);
    }
    for i in (0..fi).rev() {
        let g = params[(i + 1) * cols + fj].clone().unwrap();
        params[i * cols + fj] = Some(pr.back1((i, fj), &g)?);
    }
    // columns
    for i in 0..rows {
        for j in fj + 1..cols {
            let g = params[i * cols + j - 1].clone().unwrap();
            let (gn, _) = pr.step2((i, j - 1), &g)?;
            params[i * cols + j] = Some(gn);
        }
        for j in (0..fj).rev() {
            let g = params[i * cols + j + 1].clone().unwrap();
            params[i * cols + j] = Some(pr.back2((i, j), &g)?);
        }
    }
    let params: Vec<GenParam<S>> = params.into_iter().map(|g| g.unwrap()).collect();
    // evaluate points
    let mut points = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            let q = pr.quadric(i, j)?;
            points.push(q.eval(&params[i * cols + j]).normalized());
        }
    }
    // diagonal closure at every block: the route via +e1 then +e2 must land
    // on the stored point (which arrived via +e2 then +e1 or the seed paths)
    let mut max_mismatch = 0.0f64;
    for i in 0..rows - 1 {
        for j in 0..cols - 1 {
            let g = &params[i * cols + j];
            let (g1, _) = pr.step1((i, j), g)?;
            let (g12, _) = pr.step2((i + 1, j), &g1)?;
            let q12 = pr.quadric(i + 1, j + 1)?;
            let x_routed = q12.eval(&g12).normalized();
            let d = proj_distance(&x_routed, &points[(i + 1) * cols + j + 1]).to_f64();
            max_mismatch = max_mismatch.max(d);
            if d > tol {
                return Err(Error::ClosureFailure { i, j, residual: d });
            }
        }
    }
    // edge flags: shared-generator iff the edge line coincides with a root
    // generator of the face pair
    let mut flags_n1 = vec![EdgeFlag::Generic; rows.saturating_sub(1) * cols];
    let mut flags_n2 = vec![EdgeFlag::Generic; rows * cols.saturating_sub(1)];
    for i in 0..rows.saturating_sub(1) {
        for j in 0..cols {
            let x = &points[i * cols + j];
            let x1 = &points[(i + 1) * cols + j];
            if proj_distance(x, x1).to_f64() < 1e-10 {
                flags_n1[i * cols + j] = EdgeFlag::SharedGenerator;
                continue;
            }
            if let (Ok(edge), Ok(ab)) =
                (line_through(x, x1, 1e-12), net.frame_ab(i, j, STRUCTURAL_ZERO_TOL))
            {
                if let Ok(sg) = shared_generators_dir1(&ab, p.at(i, j), DISCRIMINANT_TOL) {
                    let q = pr.quadric(i, j)?;
                    for root in &sg.roots {
                        if let Ok(gen) = q.s_generator(&root.label, 1e-12) {
                            if lines_coincide(&edge, &gen, 1e-8) {
                                flags_n1[i * cols + j] = EdgeFlag::SharedGenerator;
                            }
                        }
                    }
                }
            }
        }
    }
    for i in 0..rows {
        for j in 0..cols.saturating_sub(1) {
            let x = &points[i * cols + j];
            let x2 = &points[i * cols + j + 1];
            if proj_distance(x, x2).to_f64() < 1e-10 {
                flags_n2[i * (cols - 1) + j] = EdgeFlag::SharedGenerator;
                continue;
            }
            if let (Ok(edge), Ok(gd)) =
                (line_through(x, x2, 1e-12), net.frame_gd(i, j, STRUCTURAL_ZERO_TOL))
            {
                if let Ok(sg) = shared_generators_dir2(&gd, p.at(i, j), DISCRIMINANT_TOL) {
                    let q = pr.quadric(i, j)?;
                    for root in &sg.roots {
                        if let Ok(gen) = q.t_generator(&root.label, 1e-12) {
                            if lines_coincide(&edge, &gen, 1e-8) {
                                flags_n2[i * (cols - 1) + j] = EdgeFlag::SharedGenerator;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(Envelope {
        rows,
        cols,
        params,
        points,
        flags_n1,
        flags_n2,
        max_closure_mismatch: max_mismatch,
    })
}

/// True iff the seed parameter keeps a safe Plücker distance (> 1e-6) from
/// every root generator of the seed face.
pub fn is_generic_seed<S: Scalar>(
    net: &AsymptoticNet<S>,
    p: &QuadricField<S>,
    face: (usize, usize),
    g0: &GenParam<S>,
) -> Result<bool> {
    let (i, j) = face;
    let q = LatticeQuadric::from_net(net, i, j, p.at(i, j).clone())?;
    let sgen = q.s_generator(&g0.s, 1e-12)?;
    let tgen = q.t_generator(&g0.t, 1e-12)?;
    let ab = net.frame_ab(i, j, STRUCTURAL_ZERO_TOL)?;
    let gd = net.frame_gd(i, j, STRUCTURAL_ZERO_TOL)?;
    let mut ok = true;
    if let Ok(sg) = shared_generators_dir1(&ab, p.at(i, j), DISCRIMINANT_TOL) {
        for root in &sg.roots {
            let gen = q.s_generator(&root.label, 1e-12)?;
            if pluecker_distance(&sgen, &gen) <= 1e-6 {
                ok = false;
            }
        }
    }
    if let Ok(sg) = shared_generators_dir2(&gd, p.at(i, j), DISCRIMINANT_TOL) {
        for root in &sg.roots {
            let gen = q.t_generator(&root.label, 1e-12)?;
            if pluecker_distance(&tgen, &gen) <= 1e-6 {
                ok = false;
            }
        }
    }
    Ok(ok)
}

fn pluecker_distance<S: Scalar>(a: &crate::proj::ProjLine<S>, b: &crate::proj::ProjLine<S>) -> f64 {
    let mut worst = S::zero();
    for i in 0..6 {
        for j in i + 1..6 {
            let d = (a.pl[i].clone() * b.pl[j].clone() - a.pl[j].clone() * b.pl[i].clone()).abs();
            if d > worst {
                worst = d;
            }
        }
    }
    (worst / (a.scale() * b.scale())).to_f64()
}

/// Random generic seed parameter on a face, resampled until it clears the
/// root generators.
pub fn random_generic_seed<S: Scalar, R: Rng>(
    net: &AsymptoticNet<S>,
    p: &QuadricField<S>,
    face: (usize, usize),
    rng: &mut R,
) -> Result<GenParam<S>> {
    for _ in 0..128 {
        let g = GenParam::affine(
            crate::cauchy::rand_coeff::<S, _>(rng),
            crate::cauchy::rand_coeff::<S, _>(rng),
        );
        if is_generic_seed(net, p, face, &g)? {
            return Ok(g);
        }
    }
    Err(Error::Infeasible("random_generic_seed: no generic parameter found".into()))
}

/// Summary diagnostics of a propagated envelope.
#[derive(Debug, Clone)]
pub struct EnvelopeDiagnostics {
    pub max_closure: f64,
    /// Largest star-tangency bracket: neighbours of each envelope vertex
    /// must lie in the tangent plane of the quadric at that vertex.
    pub max_star_tangency: f64,
    /// Largest implicit-form residual of envelope points on their quadrics.
    pub max_on_quadric: f64,
    pub shared_fraction_n1: f64,
    pub shared_fraction_n2: f64,
    /// All coordinate polygons in the direction are straight lines.
    pub straight_polygons_n1: bool,
    pub straight_polygons_n2: bool,
    /// Mixed shared/generic edges within a strip (homogeneity violation).
    pub hybrid_warning: bool,
}

/// Computes closure, star tangency, on-quadric residuals, shared-edge
/// fractions and straight-polygon detection.
pub fn envelope_diagnostics<S: Scalar>(
    env: &Envelope<S>,
    net: &AsymptoticNet<S>,
    p: &QuadricField<S>,
) -> Result<EnvelopeDiagnostics> {
    let (rows, cols) = (env.rows, env.cols);
    let mut max_star = 0.0f64;
    let mut max_onq = 0.0f64;
    for i in 0..rows {
        for j in 0..cols {
            let q = LatticeQuadric::from_net(net, i, j, p.at(i, j).clone())?;
            let x = env.point(i, j);
            let g = env.param(i, j);
            if let Ok(a) = q.implicit(1e-9) {
                max_onq = max_onq.max(crate::quadric::quadric_point_residual(&a, x).to_f64());
            }
            let (ds, dt) = q.tangent_dirs(g);
            let (ds, dt) = (ds.normalized(), dt.normalized());
            let mut neighbours: Vec<(usize, usize)> = Vec::new();
            if i > 0 {
                neighbours.push((i - 1, j));
            }
            if i + 1 < rows {
                neighbours.push((i + 1, j));
            }
            if j > 0 {
                neighbours.push((i, j - 1));
            }
            if j + 1 < cols {
                neighbours.push((i, j + 1));
            }
            for (ni, nj) in neighbours {
                let b = bracket(x, env.point(ni, nj), &ds, &dt).abs().to_f64();
                max_star = max_star.max(b);
            }
        }
    }
    let count = |flags: &[EdgeFlag]| {
        if flags.is_empty() {
            0.0
        } else {
            flags.iter().filter(|f| **f == EdgeFlag::SharedGenerator).count() as f64
                / flags.len() as f64
        }
    };
    // straight polygons: consecutive triples of envelope points collinear
    let mut straight_n1 = rows >= 3;
    for j in 0..cols {
        for i in 1..rows.saturating_sub(1) {
            if !crate::cauchy::collinear_triple(
                env.point(i - 1, j),
                env.point(i, j),
                env.point(i + 1, j),
            ) {
                straight_n1 = false;
            }
        }
    }
    let mut straight_n2 = cols >= 3;
    for i in 0..rows {
        for j in 1..cols.saturating_sub(1) {
            if !crate::cauchy::collinear_triple(
                env.point(i, j - 1),
                env.point(i, j),
                env.point(i, j + 1),
            ) {
                straight_n2 = false;
            }
        }
    }
    // homogeneity: within each strip the edges must behave uniformly
    let mut hybrid = false;
    for j in 0..cols {
        let mut seen_shared = false;
        let mut seen_generic = false;
        for i in 0..rows.saturating_sub(1) {
            match env.flag_n1(i, j) {
                EdgeFlag::SharedGenerator => seen_shared = true,
                EdgeFlag::Generic => seen_generic = true,
            }
        }
        if seen_shared && seen_generic {
            hybrid = true;
        }
    }
    for i in 0..rows {
        let mut seen_shared = false;
        let mut seen_generic = false;
        for j in 0..cols.saturating_sub(1) {
            match env.flag_n2(i, j) {
                EdgeFlag::SharedGenerator => seen_shared = true,
                EdgeFlag::Generic => seen_generic = true,
            }
        }
        if seen_shared && seen_generic {
            hybrid = true;
        }
    }
    Ok(EnvelopeDiagnostics {
        max_closure: env.max_closure_mismatch,
        max_star_tangency: max_star,
        max_on_quadric: max_onq,
        shared_fraction_n1: count(&env.flags_n1),
        shared_fraction_n2: count(&env.flags_n2),
        straight_polygons_n1: straight_n1,
        straight_polygons_n2: straight_n2,
        hybrid_warning: hybrid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cauchy::{random_cauchy_data, random_net_with_field, solve_cauchy};
    use crate::VERIFICATION_TOL;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pm_net_envelope_closes_from_generic_seeds() {
        let data = random_cauchy_data::<f64>(41, 5, 5).unwrap();
        let (net, p, _) = solve_cauchy(&data).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut firsts = Vec::new();
        for _ in 0..5 {
            let g0 = random_generic_seed(&net, &p, (0, 0), &mut rng).unwrap();
            let env = propagate_envelope(&net, &p, (0, 0), g0, VERIFICATION_TOL).unwrap();
            assert!(env.max_closure_mismatch < 1e-8);
            let d = envelope_diagnostics(&env, &net, &p).unwrap();
            assert!(d.max_star_tangency < 1e-8, "star tangency {}", d.max_star_tangency);
            assert!(d.max_on_quadric < 1e-8, "on-quadric {}", d.max_on_quadric);
            assert_eq!(d.shared_fraction_n1, 0.0);
            assert_eq!(d.shared_fraction_n2, 0.0);
            firsts.push(env.points[0].clone());
        }
        // two independent seeds give distinct envelopes
        let far = proj_distance(&firsts[0], &firsts[1]).to_f64();
        assert!(far > 1e-6, "seeds collapsed: {far}");
    }

    #[test]
    fn non_pm_net_envelope_fails_to_close() {
        let (net, p) = random_net_with_field::<f64>(19, 5, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut failures = 0;
        for _ in 0..5 {
            let g0 = random_generic_seed(&net, &p, (0, 0), &mut rng).unwrap();
            match propagate_envelope(&net, &p, (0, 0), g0, VERIFICATION_TOL) {
                Err(Error::ClosureFailure { .. }) => failures += 1,
                Ok(env) => panic!(
                    "envelope closed on a non-PM net: mismatch {}",
                    env.max_closure_mismatch
                ),
                Err(e) => panic!("unexpected error {e}"),
            }
        }
        assert_eq!(failures, 5);
    }

    #[test]
    fn generator_to_generator_collinearity() {
        // points on one generator of Q map to points on one generator of Q1
        let data = random_cauchy_data::<f64>(47, 4, 4).unwrap();
        let (net, p, _) = solve_cauchy(&data).unwrap();
        let pr = Propagator { net: &net, p: &p, stol: 1e-9, dtol: 1e-9 };
        let q1 = pr.quadric(1, 0).unwrap();
        let mut images = Vec::new();
        for t in [0.5f64, 1.5, -0.7] {
            let g = GenParam::affine(0.8, t);
            let (g1, _) = pr.step1((0, 0), &g).unwrap();
            images.push(q1.eval(&g1).normalized());
        }
        // all three images share the same s1, hence lie on one generator
        assert!(
            crate::cauchy::collinear_triple(&images[0], &images[1], &images[2]),
            "images not collinear"
        );
    }
}
