//! TNN- and TL12-regularized ADMM on a synthetic low-tubal-rank tensor.
//!
//! Run with `cargo run --release --example admm_completion [ratio]`.

use tcomplete::{
    project, random_tubal_mask, relative_error, solve_admm, synth_low_tubal_rank, AdmmConfig,
    Regularizer, Result,
};

fn main() -> Result<()> {
    let ratio: f64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0.3);
    let (n1, n2, n3, rank) = (48, 48, 6, 2);
    let truth = synth_low_tubal_rank(n1, n2, n3, rank, 7)?;
    let mask = random_tubal_mask(n1, n2, ratio, 8)?;
    let y = project(&truth, &mask)?;
    println!(
        "{n1}x{n2}x{n3}, tubal rank {rank}, {} of {} tubes observed\n",
        mask.count(),
        n1 * n2
    );

    for reg in [Regularizer::Tnn, Regularizer::Tl12] {
        let cfg = AdmmConfig::with_regularizer(reg);
        let start = std::time::Instant::now();
        let (x, state) = solve_admm(&y, &mask, &cfg, Some(&truth))?;
        println!(
            "{reg:>4}: RE {:.3e} after {} iterations ({:.2} s, converged {})",
            relative_error(&x, &truth)?,
            state.iter,
            start.elapsed().as_secs_f64(),
            state.converged
        );
        for h in state.history.iter().filter(|h| h.iter % 25 == 0).take(6) {
            println!(
                "      iter {:3}  change {:.2e}  RE {:.2e}",
                h.iter,
                h.rel_change,
                h.re.unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}
