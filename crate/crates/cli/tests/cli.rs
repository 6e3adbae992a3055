//! The `dicke` binary end to end: outputs, exit codes and config handling.

use std::path::Path;
use std::process::{Command, Output};

use dicke_cli::record::{from_csv, from_json};
use dicke_core::bell::mabk_value_mixture_with;
use dicke_core::{
    ansatz_angles, hardy_value_mixture, make_pure, threshold_excitation, threshold_particle,
    AnsatzFamily, DickeLabel, EvalOptions, InequalityKind, ThresholdOptions,
};

fn dicke(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dicke"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
}

#[test]
fn eval_vacuum_at_zero_angles() {
    let o = dicke(&[
        "eval",
        "--n",
        "3",
        "--k",
        "0",
        "--inequality",
        "hardy",
        "--alpha0",
        "0",
        "--alpha1",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: f64 = field(&stdout(&o), "value").parse().unwrap();
    assert!((v + 2.0).abs() < 1e-12, "{v}");
    assert_eq!(field(&stdout(&o), "violated"), "false");
}

#[test]
fn eval_matches_the_library_bit_for_bit() {
    let o = dicke(&[
        "eval",
        "--n",
        "4",
        "--k",
        "1",
        "--model",
        "excitation",
        "--p",
        "0.2",
        "--inequality",
        "hardy",
        "--angles",
        "ansatz",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let state = make_pure(DickeLabel::new(4, 1).unwrap())
        .excitation_loss(0.2)
        .unwrap();
    let lib =
        hardy_value_mixture(&state, &ansatz_angles(AnsatzFamily::HardyW, 4).unwrap()).unwrap();
    let printed: f64 = field(&stdout(&o), "value").parse().unwrap();
    assert_eq!(printed.to_bits(), lib.value.to_bits());
}

#[test]
fn eval_w3_mabk_violates() {
    let o = dicke(&[
        "eval",
        "--n",
        "3",
        "--k",
        "1",
        "--inequality",
        "mabk",
        "--angles",
        "ansatz",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["bell"]["violated"], true);
    let a = ansatz_angles(AnsatzFamily::MabkW, 3).unwrap();
    let lib = mabk_value_mixture_with(
        &make_pure(DickeLabel::new(3, 1).unwrap()),
        &a,
        &EvalOptions::default(),
    )
    .unwrap();
    assert_eq!(
        v["bell"]["value"].as_f64().unwrap().to_bits(),
        lib.value.to_bits()
    );
}

#[test]
fn eval_usage_errors() {
    for args in [
        &["eval", "--n", "3", "--k", "4"][..],
        &[
            "eval", "--n", "3", "--k", "1", "--model", "particle", "--p", "0.1",
        ],
        &["eval", "--n", "3", "--k", "1", "--angles", "optimize"],
        &["eval", "--n", "3", "--k", "1", "--alpha0", "0.1"],
        &["eval", "--n", "9", "--k", "8", "--angles", "ansatz"],
        &["eval", "--n", "3", "--k", "1", "--p", "1.5"],
        &["threshold", "--n", "5", "--k", "0"],
        &["sweep", "--n", "5..3", "--k", "1"],
        &["frobnicate"],
    ] {
        assert_eq!(dicke(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn threshold_json_equals_the_library_result() {
    let o = dicke(&[
        "threshold",
        "--model",
        "excitation",
        "--inequality",
        "mabk",
        "--n",
        "12",
        "--k",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rec = from_json(&stdout(&o)).unwrap();
    let lib =
        threshold_excitation(12, 2, InequalityKind::Mabk, &ThresholdOptions::default()).unwrap();
    assert_eq!(rec.len(), 1);
    assert_eq!(rec[0].threshold.to_bits(), lib.threshold.to_bits());
    assert_eq!(rec[0].alpha0.to_bits(), lib.angles.alpha0.to_bits());
    assert_eq!(rec[0].alpha1.to_bits(), lib.angles.alpha1.to_bits());
    assert_eq!(rec[0].method, lib.method.to_string());
}

#[test]
fn particle_threshold_symmetry_through_the_cli() {
    let run = |k: &str| {
        let o = dicke(&[
            "threshold",
            "--model",
            "particle",
            "--inequality",
            "hardy",
            "--n",
            "9",
            "--k",
            k,
            "--format",
            "json",
        ]);
        assert_eq!(o.status.code(), Some(0));
        from_json(&stdout(&o)).unwrap().remove(0)
    };
    let (a, b) = (run("2"), run("7"));
    assert_eq!(a.lost, b.lost);
    assert_eq!(
        a.lost,
        threshold_particle(9, 2, InequalityKind::Hardy, &ThresholdOptions::default())
            .unwrap()
            .lost
    );
}

#[test]
fn threshold_with_ansatz_at_large_n() {
    let o = dicke(&[
        "threshold",
        "--model",
        "excitation",
        "--inequality",
        "hardy",
        "--n",
        "10000",
        "--k",
        "3",
        "--angles",
        "ansatz",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rec = from_csv(&stdout(&o)).unwrap();
    assert_eq!(rec[0].method, "ansatz-only");
    assert!(rec[0].threshold >= 0.2837 - 0.005, "{}", rec[0].threshold);
}

#[test]
fn resource_caps_exit_with_three() {
    assert_eq!(dicke(&["verify", "--max-n", "13"]).status.code(), Some(3));
    let o = dicke(&[
        "threshold",
        "--inequality",
        "mabk",
        "--n",
        "3000",
        "--k",
        "1",
        "--angles",
        "ansatz",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_passes_with_lhv() {
    let o = dicke(&["verify", "--max-n", "4", "--lhv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");
    assert!(text.contains("lhv-bounds"));
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn sweep_files_are_independent_of_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (path, jobs) in [(&a, "1"), (&b, "3")] {
        let o = dicke(&[
            "sweep",
            "--model",
            "particle",
            "--inequality",
            "mabk",
            "--n",
            "6..8",
            "--k",
            "1..2",
            "--jobs",
            jobs,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(read(&a), read(&b));
    let rows = from_csv(&read(&a)).unwrap();
    assert_eq!(
        rows.iter().map(|r| (r.n, r.k)).collect::<Vec<_>>(),
        vec![(6, 1), (6, 2), (7, 1), (7, 2), (8, 1), (8, 2)]
    );
}

#[test]
fn degenerate_sweep_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("one.csv");
    let o = dicke(&[
        "sweep",
        "--n",
        "4..4",
        "--k",
        "1..1",
        "--plot",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read(&out).lines().count(), 2);
    assert!(read(&out.with_extension("svg")).starts_with("<svg"));
    assert_eq!(
        dicke(&["sweep", "--n", "4", "--k", "1", "--plot"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn json_sweep_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let o = dicke(&[
        "sweep",
        "--n",
        "5,7",
        "--k",
        "2",
        "--inequality",
        "mabk",
        "--format",
        "json",
        "--timing",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows = from_json(&read(&out)).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.seconds.is_some()));
    let lib =
        threshold_excitation(7, 2, InequalityKind::Mabk, &ThresholdOptions::default()).unwrap();
    assert_eq!(rows[1].threshold, lib.threshold);
    assert_eq!(dicke_cli::record::to_json(&rows), read(&out));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "format = \"json\"\ninequality = \"mabk\"\nmodel = \"particle\"\n",
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    let o = dicke(&["threshold", "--config", c, "--n", "6", "--k", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let rec = from_json(&stdout(&o)).unwrap().remove(0);
    assert_eq!(
        (rec.inequality, rec.model),
        (InequalityKind::Mabk, dicke_core::LossKind::Particle)
    );
    let o = dicke(&[
        "threshold",
        "--config",
        c,
        "--n",
        "6",
        "--k",
        "1",
        "--format",
        "csv",
        "--inequality",
        "hardy",
    ]);
    let rec = from_csv(&stdout(&o)).unwrap().remove(0);
    assert_eq!(
        (rec.inequality, rec.model),
        (InequalityKind::Hardy, dicke_core::LossKind::Particle)
    );

    std::fs::write(&cfg, "colour = \"blue\"\n").unwrap();
    assert_eq!(
        dicke(&["threshold", "--config", c, "--n", "6", "--k", "1"])
            .status
            .code(),
        Some(2)
    );
    let missing = dir.path().join("absent.toml");
    assert_eq!(
        dicke(&["verify", "--config", missing.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn sample_files_are_current() {
    let dir = tempfile::tempdir().unwrap();
    let samples = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/samples");
    let cases: [(&str, &[&str]); 2] = [
        (
            "sweep_particle_mabk.csv",
            &[
                "sweep",
                "--n",
                "12",
                "--k",
                "1..11",
                "--model",
                "particle",
                "--inequality",
                "mabk",
            ],
        ),
        (
            "sweep_excitation_hardy.json",
            &[
                "--format",
                "json",
                "sweep",
                "--n",
                "20",
                "--k",
                "1..5",
                "--model",
                "excitation",
                "--inequality",
                "hardy",
            ],
        ),
    ];
    for (name, args) in cases {
        let out = dir.path().join(name);
        let mut full = vec!["--out", out.to_str().unwrap()];
        full.extend_from_slice(args);
        assert!(dicke(&full).status.success());
        assert_eq!(read(&out), read(&samples.join(name)), "{name} drifted");
    }
}
