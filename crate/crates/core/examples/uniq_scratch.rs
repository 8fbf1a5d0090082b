use asymnet::cauchy::*;

fn main() {
    let data = random_cauchy_data::<f64>(5, 5, 5).unwrap();
    let (net, p, _) = solve_cauchy(&data).unwrap();
    // sanity: true label passes
    let ok = alternative_label_passes(&net, p.at(0, 0)).unwrap();
    println!("true label passes: {ok}");
    // perturbed label passes (continuity)
    let near = p.at(0, 0) * (1.0 + 1e-12);
    println!("near label passes: {}", alternative_label_passes(&net, &near).unwrap());
    // probe
    let rep = uniqueness_probe(&net, &p, 20, 99).unwrap();
    println!("unique: {} rejected {}/{} accepted {:?}", rep.unique, rep.rejected, rep.trials, rep.accepted);
}
