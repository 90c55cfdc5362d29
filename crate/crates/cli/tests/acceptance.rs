//! Acceptance suite. Each test prints one `[PASS]`/`[FAIL]` line with its
//! runtime and fails if the criterion or its time budget is not met.
//!
//! Run with `cargo test -p blepin-cli --test acceptance -- --nocapture`.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use blepin::channel::{
    estimate_distance, expected_rssi, fit_path_loss, sample_rssi, scenario_preset, RssiSample,
    PRESET_NAMES,
};
use blepin::nodes::{CentralConfig, CentralState, KeyInput, PeripheralState, Session};
use blepin::protocol::{decode_frame, encode_frame, Frame, FrameKind, PinSymbol};
use blepin::rng::{self, SimRng};
use blepin::sim::{reproduce_figures, run_session, LinkConfig, Milestone, Outcome, ScriptStep};
use rand_core::RngCore;

const ACCEPTANCE_SEED: u64 = 1;

fn criterion(id: u32, name: &str, budget: Duration, body: impl FnOnce() -> Result<String, String>) {
    let start = Instant::now();
    let result = body();
    let elapsed = start.elapsed();
    let within = elapsed <= budget;
    let (ok, detail) = match &result {
        Ok(d) => (within, d.clone()),
        Err(e) => (false, e.clone()),
    };
    println!(
        "[{}] criterion {id:>2}: {name} ({:.3}s / budget {:.0}s) {detail}",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    if let Err(e) = result {
        panic!("criterion {id} failed: {e}");
    }
    assert!(
        within,
        "criterion {id} exceeded its budget: {elapsed:?} > {budget:?}"
    );
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

#[test]
fn c01_preset_fidelity() {
    criterion(
        1,
        "preset path-loss exponents",
        Duration::from_secs(1),
        || {
            for (name, alpha) in [
                ("indoor", 3.1),
                ("outdoor", 2.55),
                ("combined", 2.85),
                ("ground", 2.75),
            ] {
                let p = scenario_preset(name).map_err(|e| e.to_string())?;
                ensure(p.alpha == alpha, || {
                    format!("{name}: alpha {} != {alpha}", p.alpha)
                })?;
            }
            Ok("3.1 / 2.55 / 2.85 / 2.75".into())
        },
    );
}

#[test]
fn c02_slope_law() {
    criterion(
        2,
        "decade slope equals -10 alpha",
        Duration::from_secs(1),
        || {
            let mut worst = 0.0f64;
            for name in PRESET_NAMES {
                let p = scenario_preset(name).unwrap();
                for d in [0.2, 1.0, 5.0, 20.0] {
                    let diff = expected_rssi(&p, 10.0 * d).unwrap() - expected_rssi(&p, d).unwrap();
                    let err = (diff + 10.0 * p.alpha).abs();
                    worst = worst.max(err);
                    ensure(err <= 1e-9, || format!("{name} d={d}: error {err:e}"))?;
                }
            }
            Ok(format!("max error {worst:.1e}"))
        },
    );
}

#[test]
fn c03_round_trip_inversion() {
    criterion(
        3,
        "distance inversion round trip",
        Duration::from_secs(1),
        || {
            let mut worst = 0.0f64;
            for name in PRESET_NAMES {
                let p = scenario_preset(name).unwrap();
                for d in log_spaced(0.05, 200.0, 100) {
                    let back = estimate_distance(&p, expected_rssi(&p, d).unwrap());
                    let rel = ((back - d) / d).abs();
                    worst = worst.max(rel);
                    ensure(rel <= 1e-9, || {
                        format!("{name} d={d}: relative error {rel:e}")
                    })?;
                }
            }
            Ok(format!("max relative error {worst:.1e}"))
        },
    );
}

#[test]
fn c04_fit_recovery() {
    criterion(4, "path-loss fit recovery", Duration::from_secs(5), || {
        let mut notes = Vec::new();
        for name in PRESET_NAMES {
            let p = scenario_preset(name).unwrap();
            let noiseless: Vec<_> = log_spaced(0.1, 40.0, 20)
                .into_iter()
                .map(|d| RssiSample::new(d, expected_rssi(&p, d).unwrap()))
                .collect();
            let fit = fit_path_loss(&noiseless, 1.0).unwrap();
            ensure((fit.alpha_hat - p.alpha).abs() <= 1e-6, || {
                format!("{name} noiseless: alpha_hat {}", fit.alpha_hat)
            })?;

            let noisy_params = p.clone().with_sigma(2.0);
            let mut stream = rng::seeded(ACCEPTANCE_SEED);
            let noisy: Vec<_> = log_spaced(0.1, 40.0, 500)
                .into_iter()
                .map(|d| RssiSample::new(d, sample_rssi(&noisy_params, d, &mut stream).unwrap()))
                .collect();
            let fit = fit_path_loss(&noisy, 1.0).unwrap();
            let da = (fit.alpha_hat - p.alpha).abs();
            let dr = (fit.rssi0_hat - p.rssi_at_d0).abs();
            ensure(da <= 0.15 && dr <= 1.0, || {
                format!("{name} sigma=2: |d alpha| {da:.4}, |d rssi0| {dr:.4}")
            })?;
            notes.push(format!("{name}: d_alpha={da:.3} d_rssi0={dr:.3}"));
        }
        Ok(notes.join(", "))
    });
}

#[test]
fn c05_shadowing_statistics() {
    criterion(
        5,
        "shadowing mean and spread",
        Duration::from_secs(5),
        || {
            let p = scenario_preset("indoor").unwrap().with_sigma(2.0);
            let mut stream = rng::seeded(ACCEPTANCE_SEED);
            let n = 100_000;
            let xs: Vec<f64> = (0..n)
                .map(|_| sample_rssi(&p, 5.0, &mut stream).unwrap())
                .collect();
            let mean = xs.iter().sum::<f64>() / n as f64;
            let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
            let expected = expected_rssi(&p, 5.0).unwrap();
            ensure((mean - expected).abs() < 0.05, || {
                format!("mean {mean} vs {expected}")
            })?;
            ensure((sd - 2.0).abs() < 0.05, || format!("sd {sd}"))?;
            Ok(format!(
                "mean offset {:+.4} dB, sd {sd:.4} dB",
                mean - expected
            ))
        },
    );
}

#[test]
fn c06_exhaustive_pin_oracle() {
    criterion(
        6,
        "exhaustive 16^4 PIN oracle",
        Duration::from_secs(10),
        || {
            let stored = "12AB";
            let mut accepted = Vec::new();
            for n in 0..65_536usize {
                let candidate: String = (0..4)
                    .map(|i| {
                        PinSymbol::from_index((n >> (4 * (3 - i))) & 0xF)
                            .unwrap()
                            .as_char()
                    })
                    .collect();
                let mut central = CentralState::new(CentralConfig {
                    stored_pin: stored.parse().unwrap(),
                    ..CentralConfig::default()
                });
                for c in candidate.chars() {
                    central.step(Frame::KeyPress(PinSymbol::from_char(c).unwrap()), 0);
                }
                let reply = central.step(Frame::PinSubmit, 0).frames;
                let decision = reply == vec![Frame::AuthOk];
                let oracle = candidate == stored;
                ensure(decision == oracle, || {
                    format!("{candidate}: central {decision}, oracle {oracle}")
                })?;
                if decision {
                    accepted.push(candidate);
                }
            }
            ensure(accepted == vec![stored.to_string()], || {
                format!("accepted {accepted:?}")
            })?;
            Ok("65536 candidates, exactly one accepted".into())
        },
    );
}

#[test]
fn c07_lockout_behaviour() {
    criterion(
        7,
        "MaxCount lockout and recovery",
        Duration::from_secs(1),
        || {
            let config = CentralConfig {
                stored_pin: "12AB".parse().unwrap(),
                max_count: 3,
                lockout_duration_ms: 30_000,
            };
            // State machine.
            let mut c = CentralState::new(config.clone());
            let submit = |c: &mut CentralState, pin: &str, now: u64| {
                for ch in pin.chars() {
                    c.step(Frame::KeyPress(PinSymbol::from_char(ch).unwrap()), now);
                }
                c.step(Frame::PinSubmit, now).frames
            };
            submit(&mut c, "0000", 0);
            submit(&mut c, "1111", 1_000);
            let third = submit(&mut c, "2222", 2_000);
            ensure(
                third
                    == vec![Frame::Locked {
                        remaining_ms: 30_000,
                    }],
                || format!("third reply {third:?}"),
            )?;
            let during = submit(&mut c, "12AB", 10_000);
            ensure(matches!(during[..], [Frame::Locked { .. }]), || {
                format!("during lockout {during:?}")
            })?;
            ensure(c.session() == Session::Unauthenticated, || {
                "authenticated while locked".into()
            })?;
            let after = submit(&mut c, "12AB", 32_000);
            ensure(after == vec![Frame::AuthOk], || {
                format!("after expiry {after:?}")
            })?;
            ensure(c.display().contains("HELLO"), || {
                format!("display {:?}", c.display().rows())
            })?;

            // End to end over a noiseless 1 m link.
            let mut script = Vec::new();
            for (start, pin) in [
                (0, "0000"),
                (2_000, "1111"),
                (4_000, "2222"),
                (10_000, "12AB"),
                (40_000, "12AB"),
            ] {
                for (i, ch) in pin.chars().chain(std::iter::once('#')).enumerate() {
                    script.push(ScriptStep::new(
                        start + 100 * i as u64,
                        KeyInput::from_char(ch).unwrap(),
                    ));
                }
            }
            let link = LinkConfig::new(
                scenario_preset("indoor").unwrap().with_sigma(0.0),
                1.0,
                ACCEPTANCE_SEED,
            );
            let trace = run_session(
                &link,
                PeripheralState::default(),
                CentralState::new(config),
                &script,
                45_000,
            )
            .map_err(|e| e.to_string())?;
            let ok_at = trace.auth_ok_at().ok_or("no AuthOk in session")?;
            ensure(ok_at >= 40_000, || {
                format!("AuthOk at {ok_at} ms, before lockout expiry")
            })?;
            ensure(trace.outcome == Outcome::Authenticated, || {
                format!("outcome {}", trace.outcome)
            })?;
            ensure(trace.final_display.contains("HELLO"), || "no HELLO".into())?;
            Ok(format!("locked at third failure, AuthOk at {ok_at} ms"))
        },
    );
}

#[test]
fn c08_authentication_gate_under_loss() {
    criterion(
        8,
        "no telemetry accepted before AuthOk",
        Duration::from_secs(30),
        || {
            let mut with_telemetry = 0;
            let mut with_drops = 0;
            for seed in 0..1000u64 {
                let mut pick = rng::derived(ACCEPTANCE_SEED, "gate", &[seed]);
                let distance = 1.0 + 59.0 * rng::uniform(&mut pick);
                let scenario = scenario_preset(PRESET_NAMES[(seed % 4) as usize]).unwrap();
                let link = LinkConfig::new(scenario, distance, seed);

                let mut script = Vec::new();
                let mut t = 100;
                let wrong_first = pick.next_u64().is_multiple_of(2);
                let attempts: &[&str] = if wrong_first {
                    &["0F0F", "12AB"]
                } else {
                    &["12AB", "12AB"]
                };
                for pin in attempts {
                    for ch in pin.chars().chain(std::iter::once('#')) {
                        script.push(ScriptStep::new(t, KeyInput::from_char(ch).unwrap()));
                        t += 120;
                    }
                    t += 800;
                }
                let trace = run_session(
                    &link,
                    PeripheralState::new(250),
                    CentralState::default(),
                    &script,
                    6_000,
                )
                .map_err(|e| e.to_string())?;

                let auth_ok = trace.auth_ok_at();
                for accepted in trace.accepted_telemetry() {
                    ensure(auth_ok.is_some_and(|ok| ok <= accepted), || {
                        format!(
                            "seed {seed}: telemetry accepted at {accepted} ms, AuthOk {auth_ok:?}"
                        )
                    })?;
                }
                // No telemetry frame is even transmitted before the central has said AuthOk.
                if let Some(first_tx) = trace
                    .events
                    .iter()
                    .find(|e| matches!(e.frame, Frame::Telemetry { .. }))
                {
                    ensure(auth_ok.is_some_and(|ok| ok < first_tx.time_ms), || {
                        format!(
                            "seed {seed}: telemetry on air at {} ms before AuthOk",
                            first_tx.time_ms
                        )
                    })?;
                }
                if trace.accepted_telemetry().next().is_some() {
                    with_telemetry += 1;
                }
                if trace
                    .milestones
                    .iter()
                    .any(|(_, m)| matches!(m, Milestone::Dropped { .. }))
                {
                    with_drops += 1;
                }
            }
            ensure(with_telemetry > 0 && with_drops > 0, || {
                format!("vacuous run: {with_telemetry} with telemetry, {with_drops} with drops")
            })?;
            Ok(format!(
                "1000 sessions, {with_telemetry} streamed telemetry, {with_drops} lost frames"
            ))
        },
    );
}

fn random_frame(r: &mut SimRng) -> Frame {
    match r.next_u64() % 8 {
        0 => Frame::KeyPress(PinSymbol::from_index((r.next_u64() % 16) as usize).unwrap()),
        1 => Frame::PinReset,
        2 => Frame::PinSubmit,
        3 => Frame::AuthOk,
        4 => Frame::AuthFail {
            remaining_attempts: r.next_u64() as u8,
        },
        5 => Frame::Locked {
            remaining_ms: r.next_u64() as u32,
        },
        6 => Frame::Telemetry {
            temp_centi_c: r.next_u64() as i16,
        },
        _ => Frame::Ack {
            of: FrameKind::ALL[(r.next_u64() % 8) as usize],
        },
    }
}

#[test]
fn c09_codec_bijectivity() {
    criterion(
        9,
        "frame codec round trip and fuzz",
        Duration::from_secs(5),
        || {
            let mut r = rng::seeded(ACCEPTANCE_SEED);
            for _ in 0..10_000 {
                let f = random_frame(&mut r);
                let bytes = encode_frame(&f);
                ensure(bytes.len() <= 5, || format!("{f}: {} bytes", bytes.len()))?;
                let back = decode_frame(&bytes).map_err(|e| format!("{f}: {e}"))?;
                ensure(back == f, || format!("{f} decoded as {back}"))?;
            }
            let mut decoded = 0;
            for _ in 0..10_000 {
                let len = (r.next_u64() % 7) as usize;
                let mut bytes: Vec<u8> = (0..len).map(|_| r.next_u64() as u8).collect();
                // Half the inputs start with a tag near the assigned range.
                if len > 0 && r.next_u64().is_multiple_of(2) {
                    bytes[0] = (r.next_u64() % 10) as u8;
                }
                if let Ok(f) = decode_frame(&bytes) {
                    decoded += 1;
                    if let Frame::KeyPress(s) = f {
                        ensure(PinSymbol::ALPHABET.contains(&s.ascii()), || {
                            format!("bad symbol {s}")
                        })?;
                    }
                    ensure(encode_frame(&f) == bytes, || {
                        format!("{bytes:02x?} is not canonical")
                    })?;
                }
            }
            Ok(format!(
                "10000 round trips, {decoded}/10000 fuzz inputs decoded to valid frames"
            ))
        },
    );
}

#[test]
fn c10_qualitative_shapes() {
    criterion(10, "figure shapes", Duration::from_secs(10), || {
        let figs = reproduce_figures(ACCEPTANCE_SEED).map_err(|e| e.to_string())?;
        let mean_at = |fig: usize, d: f64| -> Result<f64, String> {
            figs[fig]
                .report
                .summary_for(d)
                .map(|s| s.mean_rssi_dbm)
                .ok_or_else(|| format!("{} sweep has no {d} m point", figs[fig].scenario.name()))
        };
        let steep = mean_at(0, 0.1)? - mean_at(0, 0.6)?;
        let mid = mean_at(0, 0.6)? - mean_at(0, 3.0)?;
        ensure(steep > mid, || {
            format!("indoor drop {steep:.2} over [0.1,0.6] <= {mid:.2} over [0.6,3]")
        })?;

        let at10: Vec<f64> = ["outdoor", "ground", "combined", "indoor"]
            .iter()
            .map(|n| expected_rssi(&scenario_preset(n).unwrap(), 10.0).unwrap())
            .collect();
        ensure(at10.windows(2).all(|w| w[0] > w[1]), || {
            format!("ordering at 10 m: {at10:?}")
        })?;

        let before = mean_at(2, 15.5)?;
        let after = mean_at(2, 16.5)?;
        ensure(after > before, || {
            format!("combined {after:.2} at 16.5 m <= {before:.2} at 15.5 m")
        })?;
        Ok(format!(
            "indoor drops {steep:.2} vs {mid:.2} dB; combined step {:+.2} dB",
            after - before
        ))
    });
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn c11_figure_determinism() {
    criterion(
        11,
        "reproduce-figures is byte-identical",
        Duration::from_secs(10),
        || {
            let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
            let mut outputs = Vec::new();
            for run in ["a", "b"] {
                let dir = tmp.path().join(run);
                let status = Command::new(env!("CARGO_BIN_EXE_blepin"))
                    .args(["reproduce-figures", "--seed", "7", "--out"])
                    .arg(&dir)
                    .output()
                    .map_err(|e| e.to_string())?;
                ensure(status.status.success(), || {
                    format!(
                        "run {run} failed: {}",
                        String::from_utf8_lossy(&status.stderr)
                    )
                })?;
                outputs.push(read_dir_sorted(&dir));
            }
            ensure(outputs[0].len() == 8, || {
                format!("{} files written", outputs[0].len())
            })?;
            ensure(outputs[0] == outputs[1], || {
                "outputs differ between runs".into()
            })?;
            let bytes: usize = outputs[0].iter().map(|(_, b)| b.len()).sum();
            Ok(format!("8 files, {bytes} bytes, identical"))
        },
    );
}
