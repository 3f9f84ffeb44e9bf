//! Built-in experiment configs with their acceptance targets.

use serde_json::json;

use super::config::{parse_json, ExperimentConfig};

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub description: &'static str,
    pub target: &'static str,
    pub config: ExperimentConfig,
}

fn fixture(name: &'static str, description: &'static str, target: &'static str, config: serde_json::Value) -> Fixture {
    let config = parse_json(&config.to_string(), name).expect("built-in fixture is schema-valid");
    Fixture { name, description, target, config }
}

fn toral(m: [[i64; 2]; 2]) -> serde_json::Value {
    json!({ "kind": "toral", "matrix": m })
}

fn cantor_walk() -> serde_json::Value {
    json!({ "atoms": [
        { "system": { "kind": "affine", "slope": "1/3", "offset": "0" }, "p": "1/2" },
        { "system": { "kind": "affine", "slope": "1/3", "offset": "2/3" }, "p": "1/2" },
    ]})
}

fn pair_walk(a: [[i64; 2]; 2], b: [[i64; 2]; 2]) -> serde_json::Value {
    json!({ "atoms": [ { "system": toral(a), "p": "1/2" }, { "system": toral(b), "p": "1/2" } ] })
}

/// The catalog, in a fixed order.
pub fn catalog() -> Vec<Fixture> {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    vec![
        fixture(
            "cat_map_lyapunov",
            "Lyapunov spectrum of the cat map [[2,1],[1,1]]",
            "lambda1 within 1e-3 of 0.962424, |lambda1 + lambda2| <= 1e-9",
            json!({ "kind": "lyapunov", "seed": 1, "payload": {
                "system": toral([[2, 1], [1, 1]]), "q0": [0.3, 0.7], "n": 10000
            }}),
        ),
        fixture(
            "cantor_walk",
            "stationary measure of the middle-thirds IFS {x/3, x/3 + 2/3}",
            "KS stationarity residual < 0.02, invariance residuals in [0.4, 0.55]",
            json!({ "kind": "walk", "seed": 7, "payload": {
                "op": "residuals", "walk": cantor_walk(), "q": [0.0], "N": 100000, "M": 64, "metric": "ks"
            }}),
        ),
        fixture(
            "cantor_dimension",
            "box dimension of the simulated Cantor measure on triadic scales",
            "within 0.05 of log 2 / log 3 = 0.6309",
            json!({ "kind": "walk", "seed": 7, "payload": {
                "op": "dimension", "walk": cantor_walk(), "q": [0.0], "N": 100000, "M": 64,
                "scales": (2..=7).map(|k| 3f64.powi(-k)).collect::<Vec<_>>()
            }}),
        ),
        fixture(
            "golden_rotation",
            "orbit measure of the rotation by (sqrt 5 - 1)/2",
            "Weyl-Fourier coefficients |c_k| < 0.01 for 1 <= k <= 10",
            json!({ "kind": "walk", "seed": 3, "payload": {
                "op": "residuals",
                "walk": { "atoms": [ { "system": { "kind": "rotation", "angle": golden }, "p": "1" } ] },
                "q": [0.0], "N": 100000, "M": 1, "metric": "weyl-fourier", "cutoff": 10
            }}),
        ),
        fixture(
            "ab_expansion",
            "exact line scan of the uniform walk on A = [[2,1],[1,1]], B = [[1,1],[1,2]]",
            "min sigma = 4.6498170066 > 0, attained at planes 501 and 579 of 720 (swap symmetry)",
            json!({ "kind": "expansion", "payload": {
                "op": "scan", "walk": pair_walk([[2, 1], [1, 1]], [[1, 1], [1, 2]]),
                "n": 8, "d": 1, "grid": { "kind": "angular", "count": 720 }
            }}),
        ),
        fixture(
            "inverse_pair_mc",
            "Monte Carlo line scan of the walk on {A, A^-1}",
            "each sigma within 3 stderr of the exact value",
            json!({ "kind": "expansion", "seed": 11, "payload": {
                "op": "scan", "walk": pair_walk([[2, 1], [1, 1]], [[1, -1], [-1, 2]]),
                "n": 8, "d": 1, "mode": "mc", "samples": 20000, "grid": { "kind": "angular", "count": 20 }
            }}),
        ),
        fixture(
            "example_map_linearize",
            "the map (3x + y + 2y^2, 2y) with weights (2, 1)",
            "matrix [[4,0,0],[0,2,0],[2,1,3]] on the basis (y^2, y, x)",
            json!({ "kind": "subres", "payload": { "op": "linearize", "map": example_map() } }),
        ),
        fixture(
            "example_map_check",
            "validation of the same map",
            "validated, strict=false",
            json!({ "kind": "subres", "payload": { "op": "check", "map": example_map() } }),
        ),
        fixture(
            "cat_map_entropy",
            "Pesin sum of the cat map spectrum",
            "pesin_sum = log((3 + sqrt 5)/2) = 0.962424",
            json!({ "kind": "entropy", "payload": { "op": "bounds", "spectrum": {
                "exponents": [0.9624236501192069, -0.9624236501192069], "multiplicities": [1, 1]
            }}}),
        ),
    ]
}

fn example_map() -> serde_json::Value {
    json!({
        "weights": [["2", 1], ["1", 1]],
        "coeffs": [
            { "out": 0, "mono": { "0": 1 }, "c": "3" },
            { "out": 0, "mono": { "1": 1 }, "c": "1" },
            { "out": 0, "mono": { "1": 2 }, "c": "2" },
            { "out": 1, "mono": { "1": 1 }, "c": "2" }
        ]
    })
}
