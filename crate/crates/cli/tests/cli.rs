use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn blepin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blepin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn sweep_row_count_and_overlay() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("indoor.csv");
    let o = blepin(&[
        "sweep",
        "--scenario",
        "indoor",
        "--from",
        "0.1",
        "--to",
        "6",
        "--points",
        "20",
        "--trials",
        "100",
        "--seed",
        "7",
        "--out",
        p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("scenario,distance_m,trial,rssi_dbm,delivered")
    );
    assert_eq!(lines.count(), 2000);
    let overlay = std::fs::read_to_string(dir.path().join("indoor_analytical.csv")).unwrap();
    assert!(overlay.starts_with("scenario,distance_m,expected_rssi_dbm\n"));
    assert_eq!(overlay.lines().count(), 21);
    assert!(stdout(&o).contains("mean_rssi"));
}

#[test]
fn sweep_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = blepin(&[
            "sweep",
            "--scenario",
            "outdoor",
            "--trials",
            "50",
            "--seed",
            "3",
            "--out",
            p(&out),
        ]);
        assert!(o.status.success());
        std::fs::read(out).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn unknown_scenario_names_presets() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = blepin(&["sweep", "--scenario", "attic", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    for name in ["indoor", "outdoor", "combined", "ground"] {
        assert!(err.contains(name), "{err}");
    }
    assert!(!out.exists());
}

#[test]
fn validation_failures_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    for args in [
        vec!["sweep", "--trials", "0"],
        vec!["sweep", "--from", "0"],
        vec!["sweep", "--distances", "1,-3"],
        vec!["sweep", "--sigma", "-1"],
    ] {
        let mut args = args;
        args.extend(["--out", p(&out)]);
        let o = blepin(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(!out.exists());
    }
}

#[test]
fn unwritable_output_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing").join("s.csv");
    let o = blepin(&["sweep", "--trials", "2", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

fn parse_alpha(out: &str) -> f64 {
    out.lines()
        .find_map(|l| l.strip_prefix("alpha_hat"))
        .unwrap()
        .trim()
        .parse()
        .unwrap()
}

#[test]
fn fit_recovers_ground_exponent_from_noiseless_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ground.csv");
    let o = blepin(&[
        "sweep",
        "--scenario",
        "ground",
        "--sigma",
        "0",
        "--from",
        "1",
        "--to",
        "30",
        "--points",
        "15",
        "--trials",
        "2",
        "--out",
        p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = blepin(&["fit", p(&out), "--expect-alpha", "2.75"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!((parse_alpha(&text) - 2.75).abs() <= 1e-6, "{text}");
    assert!(text.contains("alpha_dev"));
    assert!(text.contains("n         30"));
}

#[test]
fn fit_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let path = dir.path().join(name);
        std::fs::write(&path, body).unwrap();
        path
    };

    let one = write("one.csv", "distance_m,rssi_dbm\n1,-45\n");
    let o = blepin(&["fit", p(&one)]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("degenerate"), "{}", stderr(&o));

    let header = write("header.csv", "distance_m,rssi_dbm\n");
    let o = blepin(&["fit", p(&header)]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("no measurement rows"));

    let same = write("same.csv", "distance_m,rssi_dbm\n2,-50\n2,-51\n");
    assert_eq!(blepin(&["fit", p(&same)]).status.code(), Some(4));

    let bad = write("bad.csv", "distance_m,rssi_dbm\n1,-45\n2,-50\nthree,-60\n");
    let o = blepin(&["fit", p(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));

    let o = blepin(&["fit", p(&dir.path().join("absent.csv"))]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn session_outcomes() {
    let o = blepin(&["session", "--pin-attempts", "12AB"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("outcome: Authenticated"));
    assert!(text.contains("HELLO"));

    let o = blepin(&["session", "--pin-attempts", "0000"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(
        text.contains("Wrong PIN,") && text.contains("enter again"),
        "{text}"
    );

    let o = blepin(&[
        "session",
        "--pin-attempts",
        "0000,1111,2222",
        "--max-count",
        "3",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("outcome: LockedOut"));

    let o = blepin(&["session", "--pin-attempts", "12AB", "--distance", "1000"]);
    assert!(stdout(&o).contains("outcome: LinkLost"));
}

#[test]
fn session_script_and_trace_export() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("keys.txt");
    std::fs::write(
        &script,
        "; typed slowly\n100 1\n400 2\n700 a\n1000 b\n1300 #\n",
    )
    .unwrap();
    let trace = dir.path().join("trace.csv");
    let o = blepin(&[
        "session",
        "--script",
        p(&script),
        "--sigma",
        "0",
        "--out",
        p(&trace),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&trace).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "time_ms,dir,frame,rssi_dbm,delivered");
    assert_eq!(lines[1], "100,p2c,0131,-45.000,1");
    assert!(lines.contains(&"1300,p2c,03,-45.000,1"));

    let o = blepin(&["session", "--script", p(&script), "--horizon", "1000"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("beyond the horizon"));
}

#[test]
fn session_requires_input() {
    assert_eq!(blepin(&["session"]).status.code(), Some(2));
    assert_eq!(
        blepin(&["session", "--pin-attempts", "12AB", "--pin", "12"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn config_file_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(
        &cfg,
        "# defaults for this run\nseed = 9\ntrials = 3\nscenario = ground\n",
    )
    .unwrap();
    let from_cfg = dir.path().join("cfg.csv");
    let from_flags = dir.path().join("flags.csv");
    let overridden = dir.path().join("over.csv");

    assert!(
        blepin(&["sweep", "--config", p(&cfg), "--out", p(&from_cfg)])
            .status
            .success()
    );
    assert!(blepin(&[
        "sweep",
        "--seed",
        "9",
        "--trials",
        "3",
        "--scenario",
        "ground",
        "--out",
        p(&from_flags)
    ])
    .status
    .success());
    assert!(blepin(&[
        "sweep",
        "--config",
        p(&cfg),
        "--seed",
        "10",
        "--out",
        p(&overridden)
    ])
    .status
    .success());

    let a = std::fs::read(&from_cfg).unwrap();
    assert_eq!(a, std::fs::read(&from_flags).unwrap());
    assert_ne!(a, std::fs::read(&overridden).unwrap());

    std::fs::write(&cfg, "sed = 9\n").unwrap();
    assert_eq!(
        blepin(&["sweep", "--config", p(&cfg)]).status.code(),
        Some(2)
    );
}

fn interactive(input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_blepin"))
        .args(["interactive", "--sigma", "0"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

#[test]
fn interactive_correct_pin() {
    let o = interactive("1 2 A B #\nq\n");
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("|HELLO           |"), "{text}");
    assert!(text.contains("rssi"));
    assert!(text.trim_end().ends_with("bye"));
}

#[test]
fn interactive_reset_and_hints() {
    let o = interactive("12*x\n");
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("|**              |"));
    // After `*` the masked row is blank again.
    let after_reset = text.split("key *").nth(1).unwrap();
    assert!(after_reset.contains(&format!("|{}|", " ".repeat(16))));
    assert!(text.contains("ignored `x`"));
}

#[test]
fn reproduce_figures_writes_all_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let o = blepin(&["reproduce-figures", "--seed", "7", "--out", p(dir.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    for name in ["indoor", "outdoor", "combined", "ground"] {
        let sweep = std::fs::read_to_string(dir.path().join(format!("{name}_sweep.csv"))).unwrap();
        let overlay =
            std::fs::read_to_string(dir.path().join(format!("{name}_analytical.csv"))).unwrap();
        let points = overlay.lines().count() - 1;
        assert_eq!(sweep.lines().count() - 1, points * 100, "{name}");
    }
}
