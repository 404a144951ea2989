use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nongauss"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn summary(path: PathBuf) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const QUICK_3SPDC: &str = r#"
[scenario]
name = "3spdc"
cutoff = 6
witnesses = ["g2", "vlf_s"]

[scenario.grid]
stop = 0.1
points = 11

[scenario.params]
g0 = 1.0
"#;

#[test]
fn help_lists_every_flag() {
    let o = run(&["--help"]);
    assert_eq!(code(&o), 0);
    let top = String::from_utf8_lossy(&o.stdout);
    for cmd in ["modes", "rwa", "run", "witness", "sweep"] {
        assert!(top.contains(cmd), "{cmd}");
    }
    let expect: &[(&str, &[&str])] = &[
        ("modes", &["--config", "--n-modes", "--out"]),
        ("rwa", &["--config", "--tolerance", "--kerr", "--out"]),
        ("run", &["--scenario", "--config", "--out", "--seed"]),
        (
            "witness",
            &[
                "--state",
                "--witness",
                "--modes",
                "--qubits",
                "--parties",
                "--restarts",
                "--seed",
                "--out",
            ],
        ),
        ("sweep", &["--config", "--out", "--jobs"]),
    ];
    for (cmd, flags) in expect {
        let o = run(&[cmd, "--help"]);
        assert_eq!(code(&o), 0);
        let text = String::from_utf8_lossy(&o.stdout);
        for f in *flags {
            assert!(text.contains(f), "{cmd} {f}");
        }
    }
    assert_eq!(code(&run(&["modes"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn free_cavity_spectrum_is_linear() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("modes.csv");
    let o = run(&[
        "modes",
        "--config",
        arg(&configs().join("free_cavity.toml")),
        "--out",
        arg(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,k_n,omega_n,c_n,l_n,edge_amplitude"
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 8);
    for r in &rows {
        let n = r[0];
        assert!((r[2] - n * std::f64::consts::PI).abs() < 1e-12 * n, "{r:?}");
        assert!((r[5].abs() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn modes_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("reference.toml");
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for p in [&a, &b] {
        assert_eq!(
            code(&run(&[
                "modes",
                "--config",
                arg(&cfg),
                "--n-modes",
                "4",
                "--out",
                arg(p)
            ])),
            0
        );
    }
    let a = std::fs::read(a).unwrap();
    assert_eq!(a, std::fs::read(b).unwrap());
    // The junction adds a root below π, counted as n = 0.
    let text = String::from_utf8(a).unwrap();
    let first: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(first[0], "0");
    assert!(first[1].parse::<f64>().unwrap() < std::f64::consts::PI);
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn malformed_configs_exit_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("typo.toml", "[circuit.squid]\nej1 = 1.0\nej3 = 1.0\n"),
        ("syntax.toml", "[circuit\n"),
        ("extra.toml", "[plot]\nwidth = 3\n"),
        ("nocircuit.toml", "[modes]\ncount = 3\n"),
    ];
    for (name, text) in cases {
        let cfg = write(dir.path(), name, text);
        let out = dir.path().join(format!("{name}.csv"));
        let o = run(&["modes", "--config", arg(&cfg), "--out", arg(&out)]);
        assert_eq!(
            code(&o),
            2,
            "{name}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(!o.stderr.is_empty());
        assert!(!out.exists());
    }
    let missing = dir.path().join("missing.toml");
    assert_eq!(
        code(&run(&[
            "modes",
            "--config",
            arg(&missing),
            "--out",
            "x.csv"
        ])),
        2
    );

    let cfg = write(
        dir.path(),
        "bad_scenario.toml",
        "[scenario]\nname = \"3spdc\"\ncutof = 4\n",
    );
    let out = dir.path().join("run");
    let o = run(&["run", "--config", arg(&cfg), "--out", arg(&out)]);
    assert_eq!(code(&o), 2);
    assert!(!out.exists());
    let o = run(&["run", "--scenario", "4spdc", "--out", arg(&out)]);
    assert_eq!(code(&o), 2);
    assert!(!out.exists());
}

#[test]
fn rwa_selects_the_triple_pair() {
    let o = run(&["rwa", "--config", arg(&configs().join("reference.toml"))]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let resonant: Vec<&str> = text
        .split("resonant (")
        .nth(1)
        .unwrap()
        .split("counter-rotating")
        .next()
        .unwrap()
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .collect();
    assert_eq!(resonant.len(), 2, "{resonant:?}");
    assert!(resonant[0].ends_with("a†0 a†1 a†2"));
    assert!(resonant[1].ends_with("a0 a1 a2"));
    assert!(text.contains("counter-rotating ("));

    let kept = run(&[
        "rwa",
        "--config",
        arg(&configs().join("reference.toml")),
        "--kerr",
        "keep",
    ]);
    let kept = String::from_utf8(kept.stdout).unwrap();
    assert!(kept.contains("resonant (32 terms)"));
}

#[test]
fn rwa_edge_cases() {
    let o = run(&["rwa", "--config", arg(&configs().join("degenerate.toml"))]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("degenerate"));

    let dir = tempfile::tempdir().unwrap();
    let empty = write(
        dir.path(),
        "empty.toml",
        "[rwa]\nfrequencies = [1.0, 1.7]\nterms = []\n",
    );
    let o = run(&["rwa", "--config", arg(&empty)]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("resonant (0 terms)"));
    assert!(text.contains("counter-rotating (0 terms)"));

    let nofreq = write(dir.path(), "nofreq.toml", "[rwa]\nterms = []\n");
    assert_eq!(code(&run(&["rwa", "--config", arg(&nofreq)])), 2);
    let o = run(&[
        "rwa",
        "--config",
        arg(&configs().join("reference.toml")),
        "--kerr",
        "bogus",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn spdc_runs_tell_the_two_processes_apart() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "run",
        "--config",
        arg(&configs().join("3spdc.toml")),
        "--out",
        arg(dir.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(dir.path().join("3spdc_summary.json"));
    assert!(s["g2_peak"].as_f64().unwrap() > 0.0);
    assert!(s["converged"].as_bool().unwrap());
    assert!(dir.path().join("3spdc_trajectory.csv").exists());
    assert!(dir.path().join("3spdc_state.json").exists());

    let o = run(&[
        "run",
        "--config",
        arg(&configs().join("22spdc.toml")),
        "--out",
        arg(dir.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(dir.path().join("22spdc_summary.json"));
    assert!(s["g2_peak"].as_f64().unwrap() <= 0.0);
    assert!(s["s_peak"].as_f64().unwrap() > 0.0);
}

#[test]
fn fixed_seed_gives_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "opt.toml",
        "[scenario]\nname = \"22spdc\"\ncutoff = 5\nrestarts = 5\nwitnesses = [\"vlf_s_opt\"]\n\n[scenario.convergence]\ncheck = false\n\n[scenario.grid]\nstop = 0.2\npoints = 5\n",
    );
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for p in [&a, &b] {
        let o = run(&["run", "--config", arg(&cfg), "--out", arg(p), "--seed", "7"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["22spdc_summary.json", "22spdc_trajectory.csv"] {
        assert_eq!(
            std::fs::read(a.join(f)).unwrap(),
            std::fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
    assert_eq!(summary(a.join("22spdc_summary.json"))["seed"], 7);
}

#[test]
fn truncated_run_exits_4_with_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "coarse.toml",
        "[scenario]\nname = \"3spdc\"\ncutoff = 3\nwitnesses = [\"g2\"]\n\n[scenario.grid]\nstop = 1.0\npoints = 5\n\n[scenario.params]\ng0 = 1.0\n\n[output]\nprefix = \"coarse\"\n",
    );
    let out = dir.path().join("out");
    let o = run(&["run", "--config", arg(&cfg), "--out", arg(&out)]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not converged"));
    let s = summary(out.join("coarse_summary.json"));
    assert!(!s["converged"].as_bool().unwrap());
    assert!(out.join("coarse_trajectory.csv").exists());
    assert!(!out.join("coarse_state.json").exists());
}

#[test]
fn unwritable_output_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = write(dir.path(), "file", "");
    let out = blocker.join("sub");
    let o = run(&[
        "modes",
        "--config",
        arg(&configs().join("free_cavity.toml")),
        "--out",
        arg(&out),
    ]);
    assert_eq!(code(&o), 3);
}

#[test]
fn witnesses_on_a_saved_state() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "q.toml",
        &format!("{QUICK_3SPDC}\n[output]\nsnapshot = true\n"),
    );
    let o = run(&["run", "--config", arg(&cfg), "--out", arg(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let state = dir.path().join("3spdc_state.json");

    let o = run(&[
        "witness",
        "--state",
        arg(&state),
        "--witness",
        "g2",
        "--witness",
        "g1",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let reports: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let r = reports.as_array().unwrap();
    assert_eq!(r.len(), 2);
    assert_eq!(r[0]["name"], "g2");
    assert!(r[0]["detects"].as_bool().unwrap());
    let g2 = r[0]["value"].as_f64().unwrap();
    let g1 = r[1]["value"].as_f64().unwrap();
    assert!(g2 >= g1);
    let run_peak = summary(dir.path().join("3spdc_summary.json"))["peak_at"]["g2"]
        .as_f64()
        .unwrap();
    assert!((run_peak - 0.1).abs() < 1e-12);

    let out = dir.path().join("reports.json");
    let o = run(&[
        "witness",
        "--state",
        arg(&state),
        "--restarts",
        "3",
        "--seed",
        "2",
        "--out",
        arg(&out),
    ]);
    assert_eq!(code(&o), 0);
    let all: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let names: Vec<&str> = all
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        [
            "vlf_s",
            "vlf_s_opt",
            "i1",
            "i2",
            "i3",
            "g1",
            "g2",
            "negativity"
        ]
    );

    let o = run(&["witness", "--state", arg(&state), "--witness", "dv"]);
    assert_eq!(code(&o), 2, "qubit witness on a bosonic state");
    let o = run(&["witness", "--state", arg(&state), "--modes", "0,1"]);
    assert_eq!(code(&o), 2);
    let bad = write(dir.path(), "bad.json", "{\"layout\": 3}");
    assert_eq!(code(&run(&["witness", "--state", arg(&bad)])), 2);
}

#[test]
fn sweep_writes_one_directory_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sweep.toml",
        &format!("{QUICK_3SPDC}\n[sweep]\nparam = \"g0\"\nvalues = [0.0, 0.5, 1.0]\n"),
    );
    let out = dir.path().join("sweep");
    let o = run(&[
        "sweep",
        "--config",
        arg(&cfg),
        "--out",
        arg(&out),
        "--jobs",
        "2",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("label,value,converged"));
    assert!(lines[0].contains("peak_g2"));
    for (i, l) in lines[1..].iter().enumerate() {
        let label = format!("run_{i:03}");
        assert!(l.starts_with(&label));
        assert!(out.join(&label).join("3spdc_summary.json").exists());
    }
    // g2 peaks grow with the coupling since the grid runs in g0·t.
    let g2 = |i: usize| {
        summary(out.join(format!("run_{i:03}")).join("3spdc_summary.json"))["peaks"]["g2"]
            .as_f64()
            .unwrap()
    };
    assert!(g2(0) <= 0.0);
    assert!(g2(2) > 0.0);

    let serial = dir.path().join("serial");
    assert_eq!(
        code(&run(&[
            "sweep",
            "--config",
            arg(&cfg),
            "--out",
            arg(&serial),
            "--jobs",
            "1"
        ])),
        0
    );
    assert_eq!(
        std::fs::read(out.join("sweep.csv")).unwrap(),
        std::fs::read(serial.join("sweep.csv")).unwrap()
    );

    let nosweep = write(dir.path(), "plain.toml", QUICK_3SPDC);
    assert_eq!(
        code(&run(&[
            "sweep",
            "--config",
            arg(&nosweep),
            "--out",
            arg(&out)
        ])),
        2
    );
}

#[test]
fn shipped_configs_parse() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "sweep",
        "--config",
        arg(&configs().join("dce_sweep.toml")),
        "--out",
        arg(dir.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        std::fs::read_to_string(dir.path().join("sweep.csv"))
            .unwrap()
            .lines()
            .count(),
        4
    );
    for name in ["hybrid.toml", "dce.toml"] {
        let out = dir.path().join(name);
        let o = run(&[
            "run",
            "--config",
            arg(&configs().join(name)),
            "--out",
            arg(&out),
        ]);
        assert_eq!(
            code(&o),
            0,
            "{name}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}
