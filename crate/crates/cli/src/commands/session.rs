use std::path::{Path, PathBuf};

use blepin::nodes::{CentralConfig, CentralState, KeyInput, PeripheralState};
use blepin::sim::{run_session, LinkConfig, ScriptStep, SessionTrace};

use super::{check_parent, resolve_scenario, resolve_seed, write_file};
use crate::cli::{NodeArgs, SessionArgs};
use crate::config::{parse_pin, Layers, DEFAULT_PIN};
use crate::error::CliError;

/// Gap between keys typed by `--pin-attempts`.
pub const KEY_GAP_MS: u64 = 200;
/// Pause between the `#` of one attempt and the first key of the next.
pub const ATTEMPT_GAP_MS: u64 = 1_000;
/// Time simulated past the last scripted key when no horizon is given.
pub const TAIL_MS: u64 = 3_000;

pub struct NodeSetup {
    pub peripheral: PeripheralState,
    pub central: CentralState,
    pub distance_m: f64,
}

pub fn resolve_nodes(layers: &Layers<'_>, node: &NodeArgs) -> Result<NodeSetup, CliError> {
    let pin = parse_pin(&layers.resolve("pin", node.pin.clone(), DEFAULT_PIN.to_string())?)?;
    let defaults = CentralConfig::default();
    let config = CentralConfig {
        stored_pin: pin,
        max_count: layers.resolve("max_count", node.max_count, defaults.max_count)?,
        lockout_duration_ms: layers.resolve(
            "lockout_ms",
            node.lockout_ms,
            defaults.lockout_duration_ms,
        )?,
    };
    config.validate().map_err(CliError::usage)?;
    let telemetry_ms: u64 = layers.resolve("telemetry_ms", node.telemetry_ms, 1_000)?;
    if telemetry_ms == 0 {
        return Err(CliError::usage("--telemetry-ms must be > 0"));
    }
    let distance_m: f64 = layers.resolve("distance_m", node.distance, 1.0)?;
    if !(distance_m > 0.0 && distance_m.is_finite()) {
        return Err(CliError::usage(format!(
            "--distance must be > 0, got {distance_m}"
        )));
    }
    Ok(NodeSetup {
        peripheral: PeripheralState::new(telemetry_ms),
        central: CentralState::new(config),
        distance_m,
    })
}

/// Each attempt is typed key by key and submitted with `#`.
pub fn script_from_attempts(spec: &str) -> Result<Vec<ScriptStep>, CliError> {
    let mut script = Vec::new();
    let mut t = 500;
    for attempt in spec.split(',') {
        let attempt = attempt.trim();
        for c in attempt.chars() {
            let key = match KeyInput::from_char(c) {
                Some(KeyInput::Symbol(s)) => KeyInput::Symbol(s),
                _ => {
                    return Err(CliError::usage(format!(
                        "invalid PIN symbol `{c}` in attempt `{attempt}`"
                    )))
                }
            };
            script.push(ScriptStep::new(t, key));
            t += KEY_GAP_MS;
        }
        script.push(ScriptStep::new(t, KeyInput::Submit));
        t += ATTEMPT_GAP_MS;
    }
    Ok(script)
}

/// `time_ms key` per line; `;` starts a comment.
pub fn parse_script(text: &str) -> Result<Vec<ScriptStep>, CliError> {
    let mut script = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split(';').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |why: &str| CliError::usage(format!("script line {}: {why}", i + 1));
        let mut parts = line.split_whitespace();
        let at_ms: u64 = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad("expected `time_ms key`"))?;
        let key_str = parts.next().ok_or_else(|| bad("missing key"))?;
        let mut chars = key_str.chars();
        let key = match (chars.next(), chars.next()) {
            (Some(c), None) => KeyInput::from_char(c).ok_or_else(|| bad("not a keypad key"))?,
            _ => return Err(bad("key must be a single character")),
        };
        if parts.next().is_some() {
            return Err(bad("trailing input"));
        }
        script.push(ScriptStep::new(at_ms, key));
    }
    Ok(script)
}

fn latency_summary(trace: &SessionTrace) -> String {
    let totals: Vec<u64> = trace.latencies.iter().map(|l| l.total_ms()).collect();
    if totals.is_empty() {
        return "latency: no key reached the display".into();
    }
    let min = totals.iter().min().expect("non-empty");
    let max = totals.iter().max().expect("non-empty");
    let mean = totals.iter().sum::<u64>() as f64 / totals.len() as f64;
    format!(
        "latency (key -> display): n={} min={}ms mean={:.1}ms max={}ms",
        totals.len(),
        min,
        mean,
        max
    )
}

pub fn run(args: SessionArgs) -> Result<(), CliError> {
    let file = crate::config::load_layers(args.common.config.as_ref())?;
    let layers = Layers { file: &file };

    let scenario = resolve_scenario(&layers, &args.common, &args.channel)?;
    let seed = resolve_seed(&layers, args.common.seed)?;
    let nodes = resolve_nodes(&layers, &args.node)?;

    let script = match (&args.script, &args.pin_attempts) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::io(format!("reading script {}", path.display()), e))?;
            parse_script(&text)?
        }
        (None, Some(spec)) => script_from_attempts(spec)?,
        (None, None) => {
            return Err(CliError::usage(
                "session needs --script <file> or --pin-attempts <pin[,pin...]>",
            ))
        }
    };
    let last = script.iter().map(|s| s.at_ms).max().unwrap_or(0);
    let horizon: u64 = layers.resolve("horizon_ms", args.horizon, last + TAIL_MS)?;
    let out: Option<PathBuf> = layers.resolve_opt("out", args.common.out.clone())?;
    if let Some(path) = &out {
        check_parent(path)?;
    }

    let link = LinkConfig::new(scenario, nodes.distance_m, seed);
    let trace = run_session(&link, nodes.peripheral, nodes.central, &script, horizon)?;

    if let Some(path) = &out {
        write_file(path, &trace.to_csv())?;
    }
    print_report(&link, &trace, out.as_deref());
    Ok(())
}

fn print_report(link: &LinkConfig, trace: &SessionTrace, out: Option<&Path>) {
    let delivered = trace.events.iter().filter(|e| e.delivered).count();
    println!(
        "scenario {} at {} m, seed {}, horizon {} ms",
        link.scenario.name(),
        link.distance_m,
        link.seed,
        trace.horizon_ms
    );
    println!("outcome: {}", trace.outcome);
    println!("{}", trace.final_display);
    println!(
        "frames: {} attempts, {} delivered, {} dropped",
        trace.events.len(),
        delivered,
        trace.dropped_frames
    );
    println!("{}", latency_summary(trace));
    if let Some(path) = out {
        println!("wrote {}", path.display());
    }
}
