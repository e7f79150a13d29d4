//! Regenerates the reference-comparison report (`book/src/reference-comparison.md`).

use std::path::PathBuf;

use clap::Parser;

#[derive(Parser)]
#[command(
    name = "greenham-report",
    version,
    about = "Compare solver output against the published benchmark tables"
)]
struct Cli {
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let report = match greenham::reference::comparison_report() {
        Ok(report) => report,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(3);
        }
    };
    match cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, report) {
                eprintln!("error: cannot write {}: {e}", path.display());
                std::process::exit(1);
            }
        }
        None => print!("{report}"),
    }
}
