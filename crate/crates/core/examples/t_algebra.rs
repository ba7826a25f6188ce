//! t-product, t-SVD, pseudo-inverse and tubal rank on small random tensors.
//!
//! Run with `cargo run --example t_algebra`.

use tcomplete::talgebra::fourier_singular_values;
use tcomplete::{
    synth_low_tubal_rank, t_pinv, t_product, t_svd, t_transpose, tubal_rank, Result, Tensor3,
};

fn main() -> Result<()> {
    let a = synth_low_tubal_rank(6, 5, 4, 2, 1)?;
    println!("A: {:?}, ||A||_F = {:.4}", a.dims(), a.frobenius_norm());

    // tubal rank counts Fourier-slice singular values above a relative cutoff
    let (multi, tubal) = tubal_rank(&a, 1e-9)?;
    println!("multi rank {:?}, tubal rank {tubal}", multi.0);
    for (k, s) in fourier_singular_values(&a)?.iter().enumerate() {
        let shown: Vec<String> = s.iter().map(|v| format!("{v:.2e}")).collect();
        println!("  slice {k}: {}", shown.join(" "));
    }

    let svd = t_svd(&a)?;
    let back = svd.reconstruct()?;
    println!(
        "\nt-SVD reconstruction error: {:.2e}",
        back.distance(&a)? / a.frobenius_norm()
    );
    let utu = t_product(&t_transpose(&svd.u), &svd.u)?;
    let eye = Tensor3::identity(svd.u.dims().1, 4);
    println!("||U^T * U - I||_F = {:.2e}", utu.distance(&eye)?);

    let p = t_pinv(&a)?;
    let apa = t_product(&t_product(&a, &p)?, &a)?;
    let pap = t_product(&t_product(&p, &a)?, &p)?;
    println!("\npseudo-inverse: {:?}", p.dims());
    println!("||A * A+ * A - A||   = {:.2e}", apa.distance(&a)?);
    println!("||A+ * A * A+ - A+|| = {:.2e}", pap.distance(&p)?);

    // t-product with the identity is a no-op; the transpose reverses products
    let b = synth_low_tubal_rank(5, 3, 4, 3, 2)?;
    let ab = t_product(&a, &b)?;
    let rev = t_product(&t_transpose(&b), &t_transpose(&a))?;
    println!(
        "\n(A*B)^T vs B^T*A^T: {:.2e}",
        t_transpose(&ab).distance(&rev)?
    );
    println!(
        "A*I vs A: {:.2e}",
        t_product(&a, &Tensor3::identity(5, 4))?.distance(&a)?
    );
    Ok(())
}
