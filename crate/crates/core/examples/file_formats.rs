//! Writing and reading T3B tensors and mask files.
//!
//! Run with `cargo run --example file_formats`.

use tcomplete::{random_tubal_mask, read_t3b, synth_low_tubal_rank, write_t3b, Result, TubalMask};

fn main() -> Result<()> {
    let dir = std::env::temp_dir().join("tcomplete-formats");
    std::fs::create_dir_all(&dir)?;

    let x = synth_low_tubal_rank(5, 4, 3, 1, 9)?;
    let path = dir.join("x.t3b");
    write_t3b(&x, &path)?;
    let bytes = std::fs::read(&path)?;
    println!(
        "{}: {} bytes (28-byte header + {} doubles)",
        path.display(),
        bytes.len(),
        x.len()
    );
    println!(
        "magic {:?}",
        std::str::from_utf8(&bytes[..4]).unwrap_or("?")
    );
    assert_eq!(read_t3b(&path)?, x);

    let mask = random_tubal_mask(5, 4, 0.5, 3)?;
    let mpath = dir.join("mask.txt");
    mask.write(&mpath)?;
    println!(
        "\n{}:\n{}",
        mpath.display(),
        std::fs::read_to_string(&mpath)?
    );
    assert_eq!(TubalMask::read(&mpath)?, mask);
    println!("both files round-trip exactly");
    Ok(())
}
