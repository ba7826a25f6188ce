//! A small reproducible sweep over sampling ratios, printed as CSV.
//!
//! Run with `cargo run --release --example sweep [spec.json]`.

use tcomplete::experiment::{median, rows_to_csv, run_sweep_with, ExperimentSpec, Method};
use tcomplete::Result;

const DEFAULT_SPEC: &str = r#"{
    "dims": [48, 48, 6],
    "rank": 2,
    "ratios": [0.15, 0.3, 0.5],
    "trials": 2,
    "methods": ["tnn", "tl12", "tccur"],
    "seed": 2024
}"#;

fn main() -> Result<()> {
    let spec = match std::env::args().nth(1) {
        Some(path) => ExperimentSpec::read(path.as_ref())?,
        None => ExperimentSpec::from_json(DEFAULT_SPEC)?,
    };
    eprintln!("running {} cells", spec.cell_count());
    let rows = run_sweep_with(&spec, &Default::default(), |row| {
        eprintln!(
            "  {} ratio {} trial {} done",
            row.method, row.ratio, row.trial
        );
        Ok(())
    })?;
    print!("{}", rows_to_csv(&rows));

    println!("\nmedian RE");
    for m in Method::ALL.iter().filter(|m| spec.methods.contains(m)) {
        let line: Vec<String> = spec
            .ratios
            .iter()
            .map(|&r| {
                let res = rows
                    .iter()
                    .filter(|x| x.method == *m && x.ratio == r)
                    .filter_map(|x| x.re);
                format!("{r}: {:.2e}", median(res).unwrap_or(f64::NAN))
            })
            .collect();
        println!("  {m:>5}  {}", line.join("  "));
    }
    Ok(())
}
