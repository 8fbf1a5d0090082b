use asymnet::construct::{doubly_q_residuals, disc1_normalized, disc2_normalized, NetParametrization};
use asymnet::optim::{levenberg_marquardt, LmOptions};
use asymnet::proj::lines_coincide;
use asymnet::quadric::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for restart in 0..30u64 {
        let par = NetParametrization::new(1 + restart * 431, 4, 4);
        let x0 = par.random_params(&mut rng);
        let f = |x: &[f64]| -> Option<Vec<f64>> {
            let (net, p) = par.build(x)?;
            doubly_q_residuals(&net, &p)
        };
        let opts = LmOptions { max_iterations: 250, ..Default::default() };
        let res = levenberg_marquardt(f, &x0, &opts);
        if res.cost > 1e-16 { continue; }
        let (net, p) = par.build(&res.x).unwrap();
        println!("== restart {restart} cost {:.2e}", res.cost);
        // n1-strips: roots and coincidences
        for k in 0..3 {
            for i in 0..2 {
                let d = disc1_normalized(&net, &p, i, k).unwrap();
                let ab = net.frame_ab(i, k, 1e-6).unwrap();
                let sg = shared_generators_dir1(&ab, p.at(i, k), 1e-9).unwrap();
                print!("  n1 strip {k} pair {i}: D1n {d:.2e} roots {} |", sg.roots.len());
            }
            println!();
        }
        for i in 0..3 {
            let mut lines_all = Vec::new();
            for j in 0..2 {
                let d = disc2_normalized(&net, &p, i, j).unwrap();
                let gd = net.frame_gd(i, j, 1e-6).unwrap();
                let sg = shared_generators_dir2(&gd, p.at(i, j), 1e-9).unwrap();
                let q = LatticeQuadric::from_net(&net, i, j, *p.at(i, j)).unwrap();
                let mut lines = Vec::new();
                for r in &sg.roots {
                    lines.push(q.t_generator(&r.label, 1e-12).unwrap());
                }
                print!("  n2 strip {i} pair {j}: D2n {d:.2e} roots {} |", sg.roots.len());
                lines_all.push(lines);
            }
            // cross-coincidence at several tolerances
            if lines_all.len() == 2 {
                for (a, la) in lines_all[0].iter().enumerate() {
                    for (b, lb) in lines_all[1].iter().enumerate() {
                        for tol in [1e-8f64, 1e-6, 1e-4] {
                            if lines_coincide(la, lb, tol) {
                                print!(" [{a}~{b}@{tol:.0e}]");
                                break;
                            }
                        }
                    }
                }
            }
            println!();
        }
    }
}
