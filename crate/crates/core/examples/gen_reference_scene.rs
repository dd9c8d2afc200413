//! Writes the 100-entity reference scene used by `paraboloid validate`.
//!
//! ```text
//! cargo run -p paraboloid-core --example gen_reference_scene > data/reference_scene.json
//! ```

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

const SEED: u64 = 2024;

fn round(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

fn rotate(p: [f64; 3], phi: f64) -> [f64; 3] {
    let (s, c) = phi.sin_cos();
    [round(c * p[0] - s * p[1]), round(s * p[0] + c * p[1]), round(p[2])]
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut entities: Vec<Value> = Vec::new();

    // points, one of them on the axis
    entities.push(json!({"type": "point", "id": "p00-axis", "u": 0.0, "v": 0.0, "w": 3.0}));
    while entities.len() < 25 {
        let (u, v, w) = (rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        if f64::hypot(u, v) < 0.1 {
            continue;
        }
        let id = format!("p{:02}", entities.len());
        entities.push(json!({"type": "point", "id": id, "u": round(u), "v": round(v), "w": round(w)}));
    }

    // segments: the three section kinds, a line through the focus, then random ones
    let fixed = [
        ("s00-quarter-circle", [2.0, 0.0, 0.0], [0.0, 2.0, 0.0]),
        ("s01-vertical", [1.0, 0.0, 0.0], [1.0, 0.0, 1.0]),
        ("s02-parabolic", [1.0, 0.0, 0.0], [2.0, 0.0, 3.0]),
        ("s03-through-focus", [1.0, 1.0, 1.0], [2.0, 2.0, 2.0]),
        ("s04-elliptic", [2.0, -1.0, 1.5], [1.0, 2.5, 0.5]),
    ];
    for (id, a, b) in fixed {
        entities.push(json!({"type": "segment", "id": id, "a": a, "b": b}));
    }
    let mut k = fixed.len();
    while k < 35 {
        let p = |rng: &mut ChaCha8Rng| -> [f64; 3] { [rng.random_range(-6.0..6.0), rng.random_range(-6.0..6.0), rng.random_range(-4.0..4.0)] };
        let (a, b) = (p(&mut rng), p(&mut rng));
        // keep the horizontal trace of the segment away from the axis
        let d = [b[0] - a[0], b[1] - a[1]];
        let d2 = d[0] * d[0] + d[1] * d[1];
        let s = (-(a[0] * d[0] + a[1] * d[1]) / d2).clamp(0.0, 1.0);
        if f64::hypot(a[0] + s * d[0], a[1] + s * d[1]) < 0.5 {
            continue;
        }
        let id = format!("s{k:02}");
        entities.push(json!({"type": "segment", "id": id, "a": a.map(round), "b": b.map(round)}));
        k += 1;
    }

    // walls facing the axis at distance 0.5..10, turned to random azimuths
    entities.push(json!({"type": "vertical_rect", "id": "r00-on-focal-plane",
        "corners": {"a": [2.0, 0.0, 1.0], "b": [0.0, 2.0, 1.0], "c": [0.0, 2.0, 0.0], "d": [2.0, 0.0, 0.0]}}));
    for k in 1..15 {
        let dist = rng.random_range(0.5..10.0);
        let v0 = rng.random_range(-2.0 * dist..dist);
        let width = rng.random_range(0.2..2.0 * dist);
        let w0 = rng.random_range(-4.0..2.0);
        let height = rng.random_range(0.2..4.0);
        let phi = rng.random_range(-PI..PI);
        let corner = |v: f64, w: f64| rotate([dist, v, w], phi);
        entities.push(json!({"type": "vertical_rect", "id": format!("r{k:02}"), "corners": {
            "a": corner(v0, w0 + height), "b": corner(v0 + width, w0 + height),
            "c": corner(v0 + width, w0), "d": corner(v0, w0)}}));
    }

    for k in 0..10 {
        let w_bottom = rng.random_range(-3.0..2.0);
        let phi_from = rng.random_range(-PI..PI);
        entities.push(json!({"type": "cylindrical_patch", "id": format!("c{k:02}"),
            "r": round(rng.random_range(0.5..5.0)),
            "w_top": round(w_bottom + rng.random_range(0.2..3.0)), "w_bottom": round(w_bottom),
            "phi_from": round(phi_from), "phi_to": round(phi_from + rng.random_range(0.1..2.0 * PI))}));
    }

    for k in 0..15 {
        let r_inner = if k == 0 { 0.0 } else { rng.random_range(0.0..3.0) };
        let phi_from = rng.random_range(-PI..PI);
        entities.push(json!({"type": "annular_sector", "id": format!("a{k:02}"),
            "r_inner": round(r_inner), "r_outer": round(r_inner + rng.random_range(0.1..4.0)),
            "phi_from": round(phi_from), "phi_to": round(phi_from + rng.random_range(0.1..2.0 * PI))}));
    }

    let scene = json!({"focal": {"f": 1.0}, "angle_unit": "radians", "entities": entities});
    println!("{}", serde_json::to_string_pretty(&scene).unwrap());
}
