use std::path::PathBuf;

use blepin::sim::{analytical_overlay_csv, sweep_distance};

use super::{check_parent, resolve_scenario, resolve_seed, write_file};
use crate::cli::{Spacing, SweepArgs};
use crate::config::{load_layers, Layers};
use crate::error::CliError;

/// `points` distances from `from` to `to` inclusive.
pub fn distance_grid(
    from: f64,
    to: f64,
    points: u32,
    spacing: Spacing,
) -> Result<Vec<f64>, CliError> {
    if !(from > 0.0 && from.is_finite() && to.is_finite()) {
        return Err(CliError::usage(format!("--from must be > 0, got {from}")));
    }
    if to < from {
        return Err(CliError::usage(format!(
            "--to ({to}) must not be below --from ({from})"
        )));
    }
    if points == 0 {
        return Err(CliError::usage("--points must be at least 1"));
    }
    if points == 1 {
        return Ok(vec![from]);
    }
    let last = f64::from(points - 1);
    Ok((0..points)
        .map(|i| {
            if i == points - 1 {
                return to;
            }
            let t = f64::from(i) / last;
            match spacing {
                Spacing::Log => from * (to / from).powf(t),
                Spacing::Lin => from + (to - from) * t,
            }
        })
        .collect())
}

pub fn parse_distance_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<f64>()
                .ok()
                .filter(|d| *d > 0.0 && d.is_finite())
                .ok_or_else(|| CliError::usage(format!("invalid distance `{tok}`")))
        })
        .collect()
}

fn overlay_path(out: &std::path::Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sweep".into());
    out.with_file_name(format!("{stem}_analytical.csv"))
}

pub fn run(args: SweepArgs) -> Result<(), CliError> {
    let file = load_layers(args.common.config.as_ref())?;
    let layers = Layers { file: &file };

    let scenario = resolve_scenario(&layers, &args.common, &args.channel)?;
    let seed = resolve_seed(&layers, args.common.seed)?;
    let trials: u32 = layers.resolve("trials", args.trials, 100)?;
    if trials == 0 {
        return Err(CliError::usage("--trials must be at least 1"));
    }
    let distances = match layers.resolve_opt::<String>("distances", args.distances.clone())? {
        Some(list) => parse_distance_list(&list)?,
        None => distance_grid(
            layers.resolve("from", args.from, 0.1)?,
            layers.resolve("to", args.to, 6.0)?,
            layers.resolve("points", args.points, 20)?,
            layers.resolve("spacing", args.spacing, Spacing::Log)?,
        )?,
    };
    let out: PathBuf =
        layers.resolve("out", args.common.out.clone(), PathBuf::from("sweep.csv"))?;
    let overlay = args.overlay.clone().unwrap_or_else(|| overlay_path(&out));

    let report = sweep_distance(&scenario, &distances, trials, seed)?;
    let sweep_csv = report.to_csv();
    let overlay_csv = analytical_overlay_csv(&scenario, &distances)?;

    check_parent(&out)?;
    check_parent(&overlay)?;
    write_file(&out, &sweep_csv)?;
    write_file(&overlay, &overlay_csv)?;

    println!(
        "scenario {} | {} distances x {} trials | seed {}",
        report.scenario,
        distances.len(),
        trials,
        seed
    );
    print!("{}", report.summary_table());
    println!("wrote {} ({} rows)", out.display(), report.rows.len());
    println!("wrote {}", overlay.display());
    Ok(())
}
