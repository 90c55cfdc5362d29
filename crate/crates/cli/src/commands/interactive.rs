use std::io::{BufRead, Write};

use blepin::nodes::KeyInput;
use blepin::sim::{LinkConfig, SessionEngine};

use super::session::resolve_nodes;
use super::{resolve_scenario, resolve_seed};
use crate::cli::InteractiveArgs;
use crate::config::{load_layers, Layers};
use crate::error::CliError;

const HINT: &str = "keys: 0-9 A-F, * reset, # submit, q quit";

pub fn run(args: InteractiveArgs) -> Result<(), CliError> {
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    run_with(args, stdin.lock(), stdout.lock())
}

/// Drives a live session from `input`, one character per keypad press.
/// Input is read line by line, so a terminal needs Enter after each batch.
pub fn run_with<R: BufRead, W: Write>(
    args: InteractiveArgs,
    input: R,
    mut out: W,
) -> Result<(), CliError> {
    let file = load_layers(args.common.config.as_ref())?;
    let layers = Layers { file: &file };
    let scenario = resolve_scenario(&layers, &args.common, &args.channel)?;
    let seed = resolve_seed(&layers, args.common.seed)?;
    let nodes = resolve_nodes(&layers, &args.node)?;
    if args.step_ms == 0 {
        return Err(CliError::usage("--step-ms must be > 0"));
    }

    let link = LinkConfig::new(scenario, nodes.distance_m, seed);
    let mut engine = SessionEngine::new(link, nodes.peripheral, nodes.central)?;
    let io = |e| CliError::io("writing to terminal", e);

    writeln!(
        out,
        "{} at {} m, seed {}. {HINT}",
        engine.link().scenario.name(),
        engine.link().distance_m,
        seed
    )
    .map_err(io)?;
    writeln!(out, "{}", engine.central().display()).map_err(io)?;

    let mut shown = 0;
    for line in input.lines() {
        let line = line.map_err(|e| CliError::io("reading keys", e))?;
        for c in line.chars() {
            if c.is_whitespace() {
                continue;
            }
            if c == 'q' || c == 'Q' {
                writeln!(out, "bye").map_err(io)?;
                return Ok(());
            }
            let Some(key) = KeyInput::from_char(c) else {
                writeln!(out, "ignored `{c}` ({HINT})").map_err(io)?;
                continue;
            };
            let now = engine.now();
            engine.press(now, key);
            engine.run_until(now + args.step_ms);

            writeln!(out, "[{now:>7} ms] key {}", key.as_char()).map_err(io)?;
            for e in &engine.events()[shown..] {
                writeln!(
                    out,
                    "    {} {:<14} rssi {:>7.2} dBm  {}",
                    e.direction,
                    e.frame.to_string(),
                    e.rssi_dbm,
                    if e.delivered { "delivered" } else { "lost" }
                )
                .map_err(io)?;
            }
            shown = engine.events().len();
            writeln!(out, "{}", engine.central().display()).map_err(io)?;
        }
    }
    Ok(())
}
