use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn qdot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdot"))
        .args(args)
        .output()
        .expect("qdot runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qdot-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn concurrence_sweep_layout() {
    let out = qdot(&["concurrence", "--k0", "5", "--r", "1", "--sweep", "T:0.05:3:5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "T,C");
    assert_eq!(lines.len(), 6);
    assert!(text.ends_with('\n') && !text.contains(",\n"));
    let first: Vec<f64> = lines[1].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first[0], 0.05);
    assert!(first[1] > 0.99);
    let last: Vec<f64> = lines[5].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last, vec![3.0, 0.0]);
}

#[test]
fn two_axis_rows_are_lexicographic() {
    let out = qdot(&["concurrence", "--t", "1", "--sweep", "k0:0:4:3", "--sweep", "r:0:1:2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let keys: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (v[0], v[1])
        })
        .collect();
    assert_eq!(
        keys,
        [(0.0, 0.0), (0.0, 1.0), (2.0, 0.0), (2.0, 1.0), (4.0, 0.0), (4.0, 1.0)]
    );
}

#[test]
fn exit_codes() {
    assert_eq!(qdot(&["concurrence", "--t", "0"]).status.code(), Some(3));
    assert_eq!(qdot(&["concurrence", "--t", "-1"]).status.code(), Some(3));
    let zero_axis = qdot(&["fidelity", "--sweep", "T:0:1:3"]);
    assert_eq!(zero_axis.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&zero_axis.stderr).contains("ground-state"));
    assert_eq!(qdot(&["fig", "6"]).status.code(), Some(1));
    assert_eq!(qdot(&["nonsense"]).status.code(), Some(1));
    assert_eq!(qdot(&["concurrence", "--sweep", "r:1:0:3"]).status.code(), Some(1));
    assert_eq!(qdot(&["concurrence", "--sweep", "theta:0:1:3"]).status.code(), Some(1));
    assert_eq!(
        qdot(&[
            "concurrence",
            "--sweep",
            "r:0:1:2",
            "--sweep",
            "T:1:2:2",
            "--sweep",
            "k0:1:2:2"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(qdot(&["concurrence", "--format", "xml"]).status.code(), Some(1));
    assert_eq!(qdot(&["--help"]).status.code(), Some(0));
}

#[test]
fn ground_state_and_tc() {
    let out = qdot(&["ground-state", "--k0", "4", "--r", "1"]);
    assert_eq!(stdout(&out), "C0\n5.0000000000000000e-1\n");
    let out = qdot(&["tc", "--k0", "4"]);
    let value: f64 = stdout(&out).lines().nth(1).unwrap().parse().unwrap();
    assert!((value - 4.0 / (4.0 * 3f64.ln())).abs() < 1e-15);
}

#[test]
fn config_file_with_flag_override() {
    let cfg = scratch("run.conf");
    let csv = scratch("out.csv");
    fs::write(
        &cfg,
        "# fixed point\nk0 = 4\nr = 3\nt = 2\nquantities = C,populations\n",
    )
    .unwrap();
    let base = qdot(&["concurrence", "--config", cfg.to_str().unwrap()]);
    assert_eq!(base.status.code(), Some(0));
    let row: Vec<f64> = stdout(&base)
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(row[0], 0.0);

    let overridden = qdot(&[
        "concurrence",
        "--config",
        cfg.to_str().unwrap(),
        "--r",
        "0",
        "--t",
        "0.2",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(overridden.status.code(), Some(0));
    assert!(overridden.stdout.is_empty());
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("C,p11,p10,p01,p00\n"));
    let row: Vec<f64> = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert!(row[0] > 0.9);

    fs::write(&cfg, "k0 = four\n").unwrap();
    assert_eq!(
        qdot(&["concurrence", "--config", cfg.to_str().unwrap()]).status.code(),
        Some(1)
    );
    assert_eq!(
        qdot(&["concurrence", "--config", "/nonexistent/qdot.conf"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn json_output_parses() {
    let out = qdot(&["fidelity", "--format", "json", "--sweep", "theta:0:3.14159:3"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["columns"][0], "theta");
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn monte_carlo_fidelity_is_seeded() {
    let args = [
        "fidelity",
        "--quantities",
        "F_a",
        "--mc-samples",
        "20000",
        "--seed",
        "9",
    ];
    let a = qdot(&args);
    let b = qdot(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let quad: f64 = stdout(&qdot(&["fidelity", "--quantities", "F_a"]))
        .lines()
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    let mc: f64 = stdout(&a).lines().nth(1).unwrap().parse().unwrap();
    assert!((quad - mc).abs() < 0.01);
    assert_eq!(qdot(&["fidelity", "--mc-samples", "1"]).status.code(), Some(3));
}

#[test]
fn figure_presets_emit_expected_shapes() {
    let fig1 = stdout(&qdot(&["fig", "1"]));
    assert!(fig1.starts_with("T,k0,r,C\n"));
    assert_eq!(fig1.lines().count(), 1 + 2 * 61 * 41);
    let fig2 = stdout(&qdot(&["fig", "2"]));
    assert!(fig2.starts_with("k0,T,C\n"));
    assert_eq!(fig2.lines().count(), 1 + 4 * 60);
    for (id, header) in [("3", "T,F_o,F_e,F_a"), ("4", "k0,F_o,F_e,F_a"), ("5", "r,F_o,F_e,F_a")] {
        let text = stdout(&qdot(&["fig", id]));
        assert_eq!(text.lines().next(), Some(header));
        assert_eq!(text.lines().count(), 51);
    }
}

#[test]
fn verify_passes_and_reports_each_check() {
    let out = qdot(&["verify", "--mc-samples", "200000"]);
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 15);
    assert!(text.contains("max_dev="));

    let tight = qdot(&["verify", "--mc-samples", "200000", "--tol", "1e-15"]);
    assert_eq!(tight.status.code(), Some(0));
    assert!(stdout(&tight).contains("exceeds tol"));
}
