//! The large-graph queue experiment: 500 vertices, degree 40, ten colours,
//! arrivals at a third of `p`. Writes the time series and summary CSVs and
//! prints the mean relative gap between measured service rates and `p`.
//!
//! ```text
//! cargo run --release --example reproduce_figure -- [er|rr] [scale] [out-dir]
//! ```

use std::path::PathBuf;

use mch::runner::{reproduce_fig, Figure, Overrides};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let figure = match args.first().map(String::as_str) {
        Some("er") | None => Figure::ErdosRenyi,
        Some("rr") => Figure::RandomRegular,
        Some(other) => panic!("unknown figure {other}, expected er or rr"),
    };
    let scale: f64 = args.get(1).map_or(1.0, |a| a.parse().expect("scale"));
    let out = PathBuf::from(args.get(2).map_or("out/figure", String::as_str));
    let overrides = Overrides { output_dir: Some(out), ..Default::default() };
    match reproduce_fig(figure, scale, &overrides) {
        Ok(report) => {
            println!("{}", report.summary);
            for f in &report.files {
                println!("  {}", f.display());
            }
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
