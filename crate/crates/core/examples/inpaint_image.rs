//! Fill in half of the pixels of a bundled 64x64 crop with each method.
//!
//! Run with `cargo run --release --example inpaint_image [image.png] [out_dir]`.
//! Completed images are written to `out_dir` (default: the system temp dir).

use std::path::PathBuf;

use tcomplete::experiment::Method;
use tcomplete::inpaint::image_config;
use tcomplete::{inpaint, load_png, project, save_png, Result, Sampling};

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let input = args.next().map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/chelsea_64.png")
    });
    let out_dir = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);

    let img = load_png(&input)?;
    let (rows, cols, _) = img.dims();
    let sampling = Sampling::Ratio {
        ratio: 0.5,
        seed: 1,
    };
    let mask = sampling.resolve(rows, cols)?;
    save_png(&project(&img, &mask)?, &out_dir.join("masked.png"))?;
    println!(
        "{}: {rows}x{cols}, keeping {} pixels",
        input.display(),
        mask.count()
    );

    let cfg = image_config(rows, cols);
    for method in Method::ALL {
        let out = inpaint(&img, &sampling, method, &cfg)?;
        let path = out_dir.join(format!("{method}.png"));
        save_png(&out.image, &path)?;
        println!(
            "{method:>5}: PSNR {:6.2} dB  {:6.3} s  {:3} iterations -> {}",
            out.row.psnr.unwrap_or(f64::NAN),
            out.row.time_s,
            out.row.iters,
            path.display()
        );
    }
    Ok(())
}
