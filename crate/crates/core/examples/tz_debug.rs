use asymnet::classify::*;
use asymnet::construct::*;
use asymnet::envelope::*;
use asymnet::quadric::GenParam;
use asymnet::tangency::{mobius_map, MapKind};

fn main() {
    let (net, p) = construct_tzitzeica_exponential(3, 5, 5).unwrap();
    let ab = net.frame_ab(0, 0, 1e-9).unwrap();
    let gd = net.frame_gd(0, 0, 1e-9).unwrap();
    println!("p(0,0) = {}", p.at(0, 0));
    let s1m = mobius_map(MapKind::S1, Some(&ab), None, p.at(0, 0), 1e-9).unwrap();
    let t2m = mobius_map(MapKind::T2, None, Some(&gd), p.at(0, 0), 1e-9).unwrap();
    println!("S1 degenerate {} T2 degenerate {}", s1m.degenerate, t2m.degenerate);
    let s0 = 0.37f64;
    let s1 = s1m.apply(&[s0, 1.0]);
    println!("s1 image = {:?} affine {}", s1, s1[0] / s1[1]);
    // quadratic for t0
    let (a, b) = (t2m.m[0][0], t2m.m[0][1]);
    let (c, d) = (t2m.m[1][0], t2m.m[1][1]);
    let q2 = s1[0] * c;
    let q1 = s1[0] * d - s1[1] * a * s0;
    let q0 = -(s1[1] * b * s0);
    let roots = asymnet::poly::real_roots_f64(&[q0, q1, q2], 1e-9);
    println!("t0 roots: {:?}", roots);
    for t0 in roots {
        let g0 = GenParam::affine(s0, t0);
        match propagate_envelope(&net, &p, (0, 0), g0, 1e-8) {
            Ok(env) => {
                let tz = tzitzeica_test(&net, &env).unwrap();
                println!("t0 {t0}: max_res {:.2e} incidence {:.2e}", tz.max_residual, tz.max_incidence);
                for (i, j, r) in &tz.residuals {
                    if *r > 1e-9 {
                        println!("  face ({i},{j}): {r:.2e}");
                    }
                }
            }
            Err(e) => println!("t0 {t0}: envelope failed: {e}"),
        }
    }
}
