use asymnet::classify::classify;
use asymnet::construct::{doubly_q_residuals, NetParametrization};
use asymnet::optim::{levenberg_marquardt, LmOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut costs = Vec::new();
    for restart in 0..30u64 {
        let par = NetParametrization::new(1 + restart * 431, 4, 4);
        let x0 = par.random_params(&mut rng);
        let f = |x: &[f64]| -> Option<Vec<f64>> {
            let (net, p) = par.build(x)?;
            doubly_q_residuals(&net, &p)
        };
        let opts = LmOptions { max_iterations: 250, ..Default::default() };
        let res = levenberg_marquardt(f, &x0, &opts);
        costs.push(res.cost);
        if res.cost < 1e-16 {
            if let Some((net, p)) = par.build(&res.x) {
                let valid = net.validate_asymptotic(1e-8).map(|v| v.pass).unwrap_or(false);
                match classify(&net, &p, None, 1e-8) {
                    Ok(rep) => println!(
                        "restart {restart}: cost {:.2e} valid {valid} semiQ ({:?},{:?}) complex ({:?},{:?}) hybrid {:?}",
                        res.cost, rep.semi_q_n1, rep.semi_q_n2, rep.complex_n1, rep.complex_n2, rep.hybrid_warning
                    ),
                    Err(e) => println!("restart {restart}: cost {:.2e} valid {valid} classify err: {e}", res.cost),
                }
            }
        }
    }
    costs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    println!("cost quantiles: best {:.2e} median {:.2e} worst {:.2e}",
        costs[0], costs[costs.len()/2], costs[costs.len()-1]);
}
