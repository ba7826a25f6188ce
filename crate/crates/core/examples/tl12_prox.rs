//! The L1-minus-L2 proximal map next to soft thresholding.
//!
//! Run with `cargo run --example tl12_prox`.

use tcomplete::prox_l1_minus_l2;
use tcomplete::regularizer::l1_minus_l2_objective;

fn soft(v: &[f64], mu: f64) -> Vec<f64> {
    v.iter().map(|x| (x - mu).max(0.0)).collect()
}

fn show(x: &[f64]) -> String {
    x.iter()
        .map(|v| format!("{v:7.3}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn main() {
    let cases: [(&[f64], f64); 5] = [
        (&[3.0, 2.0, 1.0, 0.5, 0.0], 1.0),
        (&[3.0, 2.0, 1.0, 0.5, 0.0], 2.5),
        (&[0.8, 0.3, 0.8, 0.1, 0.2], 1.0),
        (&[0.2, 0.1, 0.05, 0.0, 0.0], 1.0),
        (&[5.0, 4.9, 0.2, 0.1, 0.0], 0.5),
    ];
    println!("objective: mu (||x||_1 - ||x||_2) + 0.5 ||x - v||^2\n");
    for (v, mu) in cases {
        let x = prox_l1_minus_l2(v, mu);
        let s = soft(v, mu);
        println!("v  = {}   mu = {mu}", show(v));
        println!(
            "  L1-L2 prox     {}   obj {:.4}",
            show(&x),
            l1_minus_l2_objective(&x, v, mu)
        );
        println!(
            "  soft threshold {}   obj {:.4}\n",
            show(&s),
            l1_minus_l2_objective(&s, v, mu)
        );
    }
    println!("The L1-L2 prox shrinks large values less than soft thresholding, and");
    println!("keeps the largest entry alive even when every entry is below mu.");
}
