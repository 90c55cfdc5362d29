use std::path::PathBuf;

use blepin::sim::{reproduce_figures, FigureSweep};

use crate::cli::FiguresArgs;
use crate::config::{load_layers, Layers};
use crate::error::CliError;

fn describe(fig: &FigureSweep) -> String {
    let first = fig.report.summary.first().expect("non-empty sweep");
    let last = fig.report.summary.last().expect("non-empty sweep");
    format!(
        "{:<9} {:>3} distances {:>6.1}..{:<5.1} m  mean RSSI {:>7.2} -> {:>7.2} dBm",
        fig.scenario.name(),
        fig.distances.len(),
        first.distance_m,
        last.distance_m,
        first.mean_rssi_dbm,
        last.mean_rssi_dbm
    )
}

pub fn run(args: FiguresArgs) -> Result<(), CliError> {
    let file = load_layers(args.config.as_ref())?;
    let layers = Layers { file: &file };
    let seed = super::resolve_seed(&layers, args.seed)?;
    let dir: PathBuf = layers.resolve("out", args.out, PathBuf::from("figures"))?;

    let figures = reproduce_figures(seed)?;
    for fig in &figures {
        println!("{}", describe(fig));
    }
    let written = blepin::sim::write_figures(&dir, &figures)?;
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}
