//! ICURC-R on a matrix and TCCUR on a tensor.
//!
//! Run with `cargo run --release --example tccur_completion`.

use tcomplete::linalg::{frobenius, from_real};
use tcomplete::{
    icurc_r, project, random_tubal_mask, relative_error, synth_low_tubal_rank, tccur, tubal_rank,
    IcurcConfig, Result,
};

fn main() -> Result<()> {
    // a matrix is a tensor with one frontal slice
    let m = synth_low_tubal_rank(128, 128, 1, 2, 3)?;
    let mask = random_tubal_mask(128, 128, 0.3, 4)?;
    let y = from_real(128, 128, project(&m, &mask)?.as_slice());
    let mut cfg = IcurcConfig::new(2, 128, 128);
    cfg.row_count = 10;
    cfg.col_count = 10;
    let comp = icurc_r(&y, &mask, &cfg)?;
    let truth = from_real(128, 128, m.as_slice());
    println!("ICURC-R, 128x128 rank 2, 30% observed, |I| = |J| = 10");
    println!(
        "  {} iterations, final e {:.2e}, RE {:.3e}\n",
        comp.iters,
        comp.final_error(),
        frobenius(&(&comp.assemble() - &truth)) / frobenius(&truth)
    );

    let x = synth_low_tubal_rank(64, 64, 8, 2, 5)?;
    let mask = random_tubal_mask(64, 64, 0.4, 6)?;
    let cfg = IcurcConfig::new(2, 64, 64);
    let start = std::time::Instant::now();
    let res = tccur(&project(&x, &mask)?, &mask, &cfg)?;
    println!(
        "TCCUR, 64x64x8 tubal rank 2, 40% of tubes, core {}x{}",
        cfg.row_count, cfg.col_count
    );
    println!(
        "  RE {:.3e} in {:.3} s",
        relative_error(&res.estimate, &x)?,
        start.elapsed().as_secs_f64()
    );
    println!("  output tubal rank {}", tubal_rank(&res.estimate, 1e-6)?.1);
    for (k, (it, e)) in res.iters.iter().zip(&res.per_slice_errors).enumerate() {
        println!("  slice {k}: {it:3} iterations, e = {e:.2e}");
    }
    Ok(())
}
