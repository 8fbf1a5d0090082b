use asymnet::classify::*;
use asymnet::construct::*;
use asymnet::envelope::*;

fn main() {
    // Tzitzéica chain with the canonical concurrency envelope
    let (net, p) = construct_tzitzeica_exponential(3, 5, 5).unwrap();
    match tzitzeica_envelope(&net, &p, 77) {
        Ok((env, tz)) => {
            println!(
                "tz canonical: residual {:.2e} i_coinc {:.2e} incidence {:.2e} concurrent {}",
                tz.max_residual, tz.i_coincidence, tz.max_incidence, tz.concurrent
            );
            let aff = tzitzeica_potential_affine(&net, &env, &p).unwrap();
            println!(
                "affine: path {:.2e} scalar {:.2e} relation {:.2e} normals {:.2e}",
                aff.path_independence, aff.scalar_equation, aff.affine_relation,
                aff.normal_concurrency
            );
        }
        Err(e) => println!("tz canonical FAILED: {e}"),
    }
    let rep = classify(&net, &p, None, 1e-8).unwrap();
    println!(
        "classify tz net: pm {} gr {} demoulin {} tz {}",
        rep.pm, rep.godeaux_rozet, rep.demoulin, rep.tzitzeica
    );
    match demoulin_envelope_geometry(&net, &p) {
        Ok(g) => println!(
            "demoulin geometry: relabel_ok {} mismatch {:.2e} t-transfer {:.2e} ({} faces)",
            g.relabel_ok, g.relabel_mismatch, g.t_transfer_mismatch, g.faces.len()
        ),
        Err(e) => println!("demoulin geometry failed: {e}"),
    }

    // a GR net classifies as PM + GR but NOT demoulin / not tz
    let (gnet, gp) = construct_godeaux_rozet(11, 4, 4).unwrap();
    let rep = classify(&gnet, &gp, None, 1e-8).unwrap();
    println!(
        "classify GR: pm {} gr {} demoulin {} tz {}",
        rep.pm, rep.godeaux_rozet, rep.demoulin, rep.tzitzeica
    );
}
