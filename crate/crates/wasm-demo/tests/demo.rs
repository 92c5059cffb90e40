use frog_wasm_demo::{example_routes, loosener_timing, reduce_and_solve, simulate_example};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn every_route_pair_simulates() {
    let routes = parse(example_routes());
    let mut pairs = Vec::new();
    for r1 in routes["agent1"].as_array().unwrap() {
        for r2 in routes["agent2"].as_array().unwrap() {
            let out = parse(simulate_example(r1.as_str().unwrap(), r2.as_str().unwrap()));
            let d: Vec<u64> = out["agents"].as_array().unwrap().iter().map(|a| a["delay"].as_u64().unwrap()).collect();
            pairs.push((d[0], d[1]));
        }
    }
    pairs.sort();
    let mut want = vec![(6, 5), (5, 4), (4, 5), (5, 4), (5, 5), (4, 5), (5, 5), (5, 4), (6, 5)];
    want.sort();
    assert_eq!(pairs, want);
}

#[test]
fn bad_route_is_an_error() {
    let out = parse(simulate_example("a k", "b d f j k"));
    assert!(out["error"].as_str().unwrap().contains("a→k"));
}

#[test]
fn loosener_shifts_golds_on_a_hit() {
    let out = parse(loosener_timing(3, "10, 12", 2, false));
    assert_eq!(out["miss"], serde_json::json!([10, 12]));
    assert_eq!(out["hit"], serde_json::json!([11, 13]));
    assert!(out["shortcut_leaves_f0"].as_u64().unwrap() >= 5 + 2);
    assert!(parse(loosener_timing(3, "9", 2, true))["error"].is_string());
}

#[test]
fn reduction_reports_truth() {
    let sat = parse(reduce_and_solve("p cnf 3 2\n1 2 -3 0\n-1 2 3 0\n", false));
    assert_eq!(sat["satisfiable"], true);
    assert_eq!(sat["assignment"].as_array().unwrap().len(), 3);
    assert_eq!(sat["clause_witnesses"].as_array().unwrap().len(), 2);
    let unsat = "p cnf 1 2\n1 1 1 0\n-1 -1 -1 0\n";
    for rr in [false, true] {
        assert_eq!(parse(reduce_and_solve(unsat, rr))["satisfiable"], false);
    }
    assert!(parse(reduce_and_solve("p cnf x", false))["error"].is_string());
}
