//! Regenerates `tests/data/t4_golden.json`: functional values of the T⁴
//! example computed by quadrature of the closed-form integrands, independent
//! of the form machinery.
//!
//! cargo run --release --example t4_golden > crates/core/tests/data/t4_golden.json

use std::f64::consts::{PI, TAU};

fn main() {
    let n = 512;
    let h = TAU / n as f64;
    let (mut ym, mut pym, mut phi, mut dphi) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        let x2 = i as f64 * h;
        for j in 0..n {
            let x3 = j as f64 * h;
            let s = (2.0 * x2).sin() * x3.cos();
            let f = (3.0 + 2.0 * s) / (1.0 - 0.5 * s);
            let f12 = -(2.0 * x2).cos() * x3.sin() / TAU;
            let f13 = (1.0 - 0.5 * s) / TAU;
            let p = f12 / 2.0;
            let d2 = (2.0 * x2).sin() * x3.sin() / (2.0 * PI);
            let d3 = -(2.0 * x2).cos() * x3.cos() / (4.0 * PI);
            ym += f12 * f12 + f * f13 * f13;
            pym += 0.5 * f12 * f12 + f * f13 * f13;
            phi += 2.0 * p * p;
            dphi += d2 * d2 + f * d3 * d3;
        }
    }
    let scale = TAU * TAU * h * h;
    let out = serde_json::json!({
        "preset": "t4_yang_mills_example",
        "b": "minus_phi",
        "ym": ym * scale,
        "pym": pym * scale,
        "phi": phi * scale,
        "cone": (pym + dphi) * scale,
    });
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
}
