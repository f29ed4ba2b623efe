use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn mdml(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdml"))
        .args(args)
        .env_remove("MDML_PLATFORMS")
        .output()
        .expect("mdml runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn fixture(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(rel)
        .to_str()
        .unwrap()
        .to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn estimate_exit_codes_follow_the_deploy_decision() {
    let nano = "arduino_nano_33_ble_sense_cpp";
    let big = mdml(&["estimate", "--arch", "6120,32,2", "--platform", nano]);
    assert_eq!(code(&big), 3, "{}", stdout(&big));
    let small = mdml(&["estimate", "--arch", "6120,8,2", "--platform", nano, "--json"]);
    assert_eq!(code(&small), 0);
    let v: serde_json::Value = serde_json::from_slice(&small.stdout).unwrap();
    assert_eq!(v["sizes"]["float_serialized_bytes"], 195_970);
    assert_eq!(v["sizes"]["quantized_serialized_bytes"], 49_058);
    assert_eq!(v["deploy"]["accepted"], true);
    // Without a platform there is nothing to reject.
    assert_eq!(code(&mdml(&["estimate", "--arch", "6120,32,2"])), 0);
    assert_eq!(
        code(&mdml(&["estimate", "--arch", "6120,32,2", "--platform", "nope"])),
        2
    );
}

#[test]
fn check_reports_syntax_errors_with_positions() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.mdml");
    std::fs::write(&empty, "").unwrap();
    let out = mdml(&["check", s(&empty)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty.mdml:1:1:"));

    let json = mdml(&["check", s(&empty), "--json"]);
    assert_eq!(code(&json), 1);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["status"], "syntax_error");
    assert_eq!(v["errors"][0]["line"], 1);
    assert_eq!(v["errors"][0]["column"], 1);

    let missing = dir.path().join("missing.mdml");
    assert_eq!(code(&mdml(&["check", s(&missing)])), 4);
    assert_eq!(code(&mdml(&["check", &fixture("tutorial/arduino.mdml")])), 0);
}

#[test]
fn check_flags_model_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mdml");
    std::fs::write(
        &bad,
        "thing T {\n  statechart S init Nowhere {\n    state A {}\n  }\n}\n",
    )
    .unwrap();
    assert_eq!(code(&mdml(&["check", s(&bad)])), 2);
}

#[test]
fn bad_command_lines_exit_2() {
    assert_eq!(code(&mdml(&["frobnicate"])), 2);
    assert_eq!(code(&mdml(&["estimate"])), 2);
    assert_eq!(code(&mdml(&["estimate", "--arch", "6120,x"])), 2);
    assert_eq!(code(&mdml(&["--help"])), 0);
}

fn train_once(dir: &Path, data: &Path) -> PathBuf {
    let model = dir.join("model.mlq");
    let out = mdml(&[
        "train",
        &fixture("hydraulic/exp2_pim.mdml"),
        "--data",
        s(data),
        "-o",
        s(&model),
        "--epochs",
        "4",
        "--learning-rate",
        "1e-3",
        "--seed",
        "7",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    model
}

#[test]
fn training_is_reproducible_and_feeds_the_other_commands() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("rig.csv");
    let synth = mdml(&["synth-data", "-n", "300", "--seed", "5", "-o", s(&data)]);
    assert_eq!(code(&synth), 0);

    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let ma = train_once(&a, &data);
    let mb = train_once(&b, &data);
    for name in ["model.mlq", "standardizer.csv", "Training_results.tsv"] {
        assert_eq!(
            std::fs::read(a.join(name)).unwrap(),
            std::fs::read(b.join(name)).unwrap(),
            "{name} differs between runs"
        );
    }
    assert_eq!(std::fs::metadata(&ma).unwrap().len(), 195_970);
    let metrics: serde_json::Value = serde_json::from_slice(&std::fs::read(a.join("metrics.json")).unwrap()).unwrap();
    assert_eq!(metrics["architecture"], serde_json::json!([6120, 8, 2]));
    assert_eq!(metrics["train_rows"], 240);

    let q = dir.path().join("q.mlq");
    assert_eq!(code(&mdml(&["convert", s(&ma), "--quantize", "-o", s(&q)])), 0);
    assert_eq!(std::fs::metadata(&q).unwrap().len(), 49_058);
    assert_eq!(code(&mdml(&["convert", s(&q), "--quantize", "-o", s(&q)])), 2);

    let cc = dir.path().join("model_data.cc");
    assert_eq!(code(&mdml(&["dump", s(&q), "-o", s(&cc)])), 0);
    let text = std::fs::read_to_string(&cc).unwrap();
    assert!(text.starts_with("unsigned char model_data[] = {\n  0x4d, 0x4c, 0x51, 0x31,"));
    assert!(text.contains("unsigned int model_data_len = 49058;"));

    let std_csv = a.join("standardizer.csv");
    let pred = mdml(&["predict", s(&q), "--data", s(&data), "--standardizer", s(&std_csv)]);
    assert_eq!(code(&pred), 0);
    let text = stdout(&pred);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("row,class,score0,score1"));
    assert_eq!(lines.count(), 300);
    assert_eq!(code(&mdml(&["predict", s(&q), "--data", s(&cc)])), 4);

    let out = dir.path().join("gen");
    let gen = mdml(&[
        "generate",
        &fixture("hydraulic/exp2_arduino.mdml"),
        "-o",
        s(&out),
        "--model",
        s(&mb),
        "--standardizer",
        s(&b.join("standardizer.csv")),
    ]);
    assert_eq!(code(&gen), 0, "{}", String::from_utf8_lossy(&gen.stderr));
    let root = out.join("Exp2/arduino_nano_33_ble_sense_cpp");
    assert_eq!(
        std::fs::read(root.join("model/model.mlq")).unwrap(),
        std::fs::read(&q).unwrap()
    );
    let manifest = std::fs::read_to_string(root.join("MANIFEST")).unwrap();
    assert!(manifest.contains("trained"), "{manifest}");
}

#[test]
fn generate_rejects_the_oversized_model_with_status_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = mdml(&["generate", &fixture("hydraulic/exp1_arduino.mdml"), "-o", s(dir.path())]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("flash"));
    assert!(!dir.path().join("Exp1").exists());

    let ok = mdml(&[
        "generate",
        &fixture("hydraulic/exp1_rpi_quantized.mdml"),
        "-o",
        s(dir.path()),
    ]);
    assert_eq!(code(&ok), 0);
}

#[test]
fn generate_target_override_works_without_a_compiler_annotation() {
    let dir = tempfile::tempdir().unwrap();
    let psm = dir.path().join("bare.mdml");
    std::fs::write(
        &psm,
        format!(
            "import \"{}\"\nconfiguration Tutorial {{\n  instance pump : Pump\n  instance panel : Display\n  connector pump.io => panel.feed\n}}\n",
            fixture("tutorial/pim.mdml")
        ),
    )
    .unwrap();
    assert_eq!(code(&mdml(&["generate", s(&psm), "-o", s(dir.path())])), 2);
    let out = mdml(&[
        "generate",
        s(&psm),
        "-o",
        s(dir.path()),
        "--target",
        "rpi_3b+_python",
        "--json",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["target"], "rpi_3b+_python");
    assert!(dir.path().join("Tutorial/rpi_3b+_python/src/main.py").exists());
}

#[test]
fn simulate_prints_the_trace() {
    let out = mdml(&[
        "simulate",
        &fixture("tutorial/pim.mdml"),
        "--thing",
        "Display",
        "--events",
        "feed?verdict(1); feed?verdict(0)",
        "--json",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["states"][0], "Quiet");
    assert_eq!(
        code(&mdml(&[
            "simulate",
            &fixture("tutorial/pim.mdml"),
            "--thing",
            "Nope",
            "--events",
            ""
        ])),
        2
    );
}

#[test]
fn targets_lists_the_builtin_platforms() {
    let text = stdout(&mdml(&["targets"]));
    for id in [
        "python_java",
        "rpi_3b+_python",
        "rpi_3b+_python_quantized",
        "arduino_nano_33_ble_sense_cpp",
    ] {
        assert!(text.contains(id), "{id}");
    }
}
