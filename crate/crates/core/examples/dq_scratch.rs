use asymnet::classify::*;
use asymnet::construct::*;
use std::time::Instant;

fn main() {
    for seed in [1u64, 2, 3] {
        let t0 = Instant::now();
        match construct_doubly_q(seed) {
            Ok((net, p)) => {
                let rep = classify(&net, &p, None, 1e-8).unwrap();
                println!(
                    "seed {seed} OK in {:.1?}: semiQ ({:?},{:?}) complex ({:?},{:?}) dq {} dc {}",
                    t0.elapsed(), rep.semi_q_n1, rep.semi_q_n2, rep.complex_n1, rep.complex_n2,
                    rep.doubly_q, rep.doubly_complex
                );
            }
            Err(e) => println!("seed {seed} FAILED in {:.1?}: {e}", t0.elapsed()),
        }
    }
}
