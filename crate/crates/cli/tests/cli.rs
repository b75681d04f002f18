use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn scbnn(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scbnn"))
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .output()
        .expect("spawn scbnn")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = scbnn(dir, args);
    assert!(
        out.status.success(),
        "scbnn {args:?} exited {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    scbnn(dir, args).status.code().expect("exit code")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_meta(meta: &Value, command: &str, seed: u64) {
    assert_eq!(meta["tool"], "scbnn");
    assert_eq!(meta["command"], command);
    assert_eq!(meta["seed"], seed);
    assert_eq!(meta["rng_family"], scnn_core::RNG_FAMILY);
    assert_eq!(meta["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(meta["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn fit_sine_and_constant() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["--seed", "3", "fit", "--target", "sin", "--N", "32"]);
    let report = json(&d.join("fit_report.json"));
    assert!(report["sup_error"].as_f64().unwrap() < 0.05);
    assert_meta(&report["meta"], "fit", 3);
    let net = json(&d.join("network.json"));
    assert_eq!(net["N"], 32);
    assert_meta(&net["meta"], "fit", 3);

    let c = d.join("c");
    ok(&c, &["fit", "--target", "constant:0.3", "--N", "4"]);
    assert!(
        json(&c.join("fit_report.json"))["sup_error"]
            .as_f64()
            .unwrap()
            < 1e-6
    );
}

#[test]
fn fit_usage_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let out = scbnn(tmp.path(), &["fit"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--target"));
    assert_eq!(code(tmp.path(), &["fit", "--target", "cosine"]), 2);
    assert_eq!(code(tmp.path(), &["fit", "--target", "sin", "--N", "0"]), 2);
    assert_eq!(code(tmp.path(), &["frobnicate"]), 2);
}

#[test]
fn sweep_is_deterministic_and_converges() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["fit", "--target", "sin", "--N", "32"]);
    let net = d.join("network.json");
    let net = net.to_str().unwrap();
    let args = [
        "--seed",
        "5",
        "sweep",
        "--network",
        net,
        "--trials",
        "40",
        "--grid",
        "32",
    ];
    let a = d.join("a");
    let b = d.join("b");
    let stdout = ok(&a, &args);
    ok(&b, &args);
    for name in ["sweep.csv", "sweep_plot.csv", "sweep_summary.json"] {
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
    assert!(stdout.contains("log-log slope"));

    let csv = fs::read_to_string(a.join("sweep.csv")).unwrap();
    assert!(csv.starts_with("# tool: scbnn\n"));
    let body: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "M,statistic,value");
    let slope: f64 = body
        .iter()
        .find_map(|l| l.strip_prefix("all,sc_median_slope,"))
        .unwrap()
        .parse()
        .unwrap();
    assert!((-0.65..=-0.35).contains(&slope), "slope {slope}");

    let plot = fs::read_to_string(a.join("sweep_plot.csv")).unwrap();
    let rows: Vec<&str> = plot.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(rows[0].starts_with("M,trials,grid_size,sc_median"));
    assert_eq!(rows.len(), 5);

    let summary = json(&a.join("sweep_summary.json"));
    assert_meta(&summary["meta"], "sweep", 5);
    assert_eq!(summary["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn sweep_config_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(
        d,
        &["fit", "--target", "identity", "--N", "4", "--grid", "16"],
    );
    assert_eq!(code(d, &["sweep", "--trials", "0"]), 2);
    assert_eq!(code(d, &["sweep", "--M", "256,64"]), 2);
    assert_eq!(code(d, &["sweep", "--M", "100000000", "--trials", "30"]), 2);
    assert_eq!(code(d, &["sweep", "--network", "missing.json"]), 2);
    assert_eq!(code(d, &["sweep", "--target", "product"]), 2);
}

#[test]
fn config_file_with_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let cfg = d.join("cfg.json");
    fs::write(
        &cfg,
        r#"{"seed": 11, "target": "identity", "fit": {"N": 6, "grid": 32}, "out_dir": "ignored"}"#,
    )
    .unwrap();
    ok(d, &["--config", cfg.to_str().unwrap(), "fit", "--N", "8"]);
    let net = json(&d.join("network.json"));
    assert_eq!(net["N"], 8);
    assert_eq!(net["meta"]["seed"], 11);

    fs::write(&cfg, r#"{"sed": 1}"#).unwrap();
    assert_eq!(
        code(
            d,
            &["--config", cfg.to_str().unwrap(), "fit", "--target", "sin"]
        ),
        2
    );
}

#[test]
fn bound_examples() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let out = ok(
        d,
        &[
            "bound",
            "--n",
            "2",
            "--N",
            "10",
            "--epsilon",
            "0.1",
            "--delta",
            "0.1",
        ],
    );
    assert!(out.contains("M_min = 900001"), "{out}");
    let report = json(&d.join("bound.json"));
    assert_eq!(report["M_min"], 900_001);
    assert_meta(&report["meta"], "bound", 0);

    let out = ok(
        d,
        &[
            "bound",
            "--n",
            "1",
            "--N",
            "2",
            "--epsilon",
            "0.5",
            "--delta",
            "0.25",
            "--alpha-sum",
            "0.8",
            "--validate",
            "--trials",
            "100",
        ],
    );
    assert!(out.contains("PASS"), "{out}");
    let v = &json(&d.join("bound.json"))["validation"];
    assert!(v["failure_rate"].as_f64().unwrap() <= 0.25);

    assert_eq!(
        code(
            d,
            &[
                "bound",
                "--n",
                "2",
                "--N",
                "10",
                "--epsilon",
                "0.1",
                "--delta",
                "0"
            ]
        ),
        2
    );
    assert_eq!(
        code(
            d,
            &[
                "bound",
                "--n",
                "0",
                "--N",
                "10",
                "--epsilon",
                "0.1",
                "--delta",
                "0.1"
            ]
        ),
        2
    );
    assert_eq!(
        code(
            d,
            &["bound", "--N", "10", "--epsilon", "0.1", "--delta", "0.1"]
        ),
        2
    );
    assert_eq!(
        code(
            d,
            &[
                "bound",
                "--n",
                "2",
                "--N",
                "10",
                "--epsilon",
                "0.001",
                "--delta",
                "0.01",
                "--validate"
            ]
        ),
        2
    );
}

#[test]
fn bound_validation_with_network_file() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["fit", "--target", "sin", "--N", "8", "--grid", "64"]);
    let net = d.join("network.json");
    let out = ok(
        d,
        &[
            "bound",
            "--network",
            net.to_str().unwrap(),
            "--epsilon",
            "2",
            "--delta",
            "0.5",
            "--validate",
            "--trials",
            "30",
            "--grid",
            "8",
        ],
    );
    assert!(out.contains("PASS"), "{out}");
    assert_eq!(json(&d.join("bound.json"))["query"]["N"], 8);
}

#[test]
fn convert_round_trip_is_bit_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(
        d,
        &["fit", "--target", "product", "--N", "5", "--grid", "8"],
    );
    let fit = d.join("network.json");

    let b = d.join("bin");
    let out = ok(
        &b,
        &[
            "--seed",
            "4",
            "convert",
            fit.to_str().unwrap(),
            "--binarize",
        ],
    );
    assert!(out.contains("PASS") && !out.contains("FAIL"), "{out}");
    let bnn = b.join("bnn.json");
    let bfile = json(&bnn);
    assert_eq!(bfile["binary"], true);
    assert_meta(&bfile["meta"], "convert", 4);

    // m = 2 here, so stream length 2 is the single-chunk case.
    let s = d.join("scnn");
    let out = ok(&s, &["convert", bnn.to_str().unwrap(), "--to-scnn", "2"]);
    assert!(out.contains("unit 4:") && !out.contains("FAIL"), "{out}");
    let back = d.join("back");
    let out = ok(
        &back,
        &[
            "convert",
            s.join("bundle.json").to_str().unwrap(),
            "--to-bnn",
        ],
    );
    assert!(!out.contains("FAIL"));
    assert_eq!(
        fs::read(&bnn).unwrap(),
        fs::read(back.join("bnn.json")).unwrap()
    );

    assert_eq!(
        code(d, &["convert", bnn.to_str().unwrap(), "--to-scnn", "3"]),
        2
    );
    assert_eq!(
        code(d, &["convert", fit.to_str().unwrap(), "--to-scnn", "1"]),
        2
    );
    assert_eq!(code(d, &["convert", fit.to_str().unwrap()]), 2);
}

fn write_bnn(path: &Path, m: usize, width: usize, seed: u64) {
    let mut state = seed;
    let mut bits = |len: usize| -> String {
        (0..len)
            .map(|_| {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                if state >> 63 == 1 {
                    '1'
                } else {
                    '0'
                }
            })
            .collect()
    };
    let weights: Vec<String> = (0..width)
        .map(|_| scnn_core::BinaryVector::parse(&bits(m)).unwrap().to_hex())
        .collect();
    let biases = scnn_core::BinaryVector::parse(&bits(width))
        .unwrap()
        .to_hex();
    let file = serde_json::json!({
        "name": "random",
        "binary": true,
        "m": m,
        "N": width,
        "activation": "sigmoid",
        "hidden_weights": weights,
        "hidden_biases": biases,
        "output_weights": vec![0.25; width],
    });
    fs::write(path, serde_json::to_string_pretty(&file).unwrap()).unwrap();
}

#[test]
fn random_bnn_chunked_by_four_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let bnn = d.join("random.json");
    write_bnn(&bnn, 24, 6, 99);
    let out = ok(d, &["convert", bnn.to_str().unwrap(), "--to-scnn", "4"]);
    assert_eq!(out.matches("PASS").count(), 6, "{out}");
    let eq = json(&d.join("equivalence.json"));
    assert_eq!(eq["all_pass"], true);
    assert_eq!(eq["report"]["chunk"]["n"], 6);

    let out = ok(
        d,
        &[
            "convert",
            bnn.to_str().unwrap(),
            "--to-scnn",
            "8",
            "--input-bits",
            &"10".repeat(12),
        ],
    );
    assert!(!out.contains("FAIL"));
    assert_eq!(
        code(
            d,
            &[
                "convert",
                bnn.to_str().unwrap(),
                "--to-scnn",
                "8",
                "--input-bits",
                "101"
            ]
        ),
        2
    );
}

#[test]
fn tampered_bundle_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let bnn = d.join("r.json");
    write_bnn(&bnn, 8, 2, 1);
    ok(d, &["convert", bnn.to_str().unwrap(), "--to-scnn", "4"]);
    let path = d.join("bundle.json");
    let mut bundle = json(&path);
    bundle["biases"][0] = Value::from("M:4;enc:b;a");
    fs::write(&path, bundle.to_string()).unwrap();
    assert_eq!(code(d, &["convert", path.to_str().unwrap(), "--to-bnn"]), 2);
}

#[test]
fn energy_examples() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let out = ok(
        d,
        &[
            "--mode", "mux", "energy", "--n", "1", "--M", "1", "--N", "1",
        ],
    );
    assert!(
        out.contains("xnor 2  and 0  mux_select 1  apc_bit_adds 0  total 3"),
        "{out}"
    );
    let r = json(&d.join("energy.json"));
    assert_eq!(r["total"], 3);
    assert_meta(&r["meta"], "energy", 0);
    let csv = fs::read_to_string(d.join("energy.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("xnor_ops,and_ops")));

    ok(d, &["--mode", "mux", "energy", "--bnn", "8", "1"]);
    let bnn = json(&d.join("energy.json"));
    ok(
        d,
        &[
            "--mode", "mux", "energy", "--n", "8", "--M", "1", "--N", "1",
        ],
    );
    let sc = json(&d.join("energy.json"));
    for k in [
        "xnor_ops",
        "and_ops",
        "mux_select_ops",
        "apc_bit_adds",
        "total",
    ] {
        assert_eq!(bnn[k], sc[k], "{k}");
    }

    ok(d, &["energy", "--n", "3", "--M", "10", "--N", "2"]);
    let one = json(&d.join("energy.json"))["total"].as_u64().unwrap();
    ok(d, &["energy", "--n", "3", "--M", "20", "--N", "2"]);
    assert_eq!(
        json(&d.join("energy.json"))["total"].as_u64().unwrap(),
        2 * one
    );

    assert_eq!(code(d, &["energy", "--M", "4"]), 2);
    assert_eq!(code(d, &["energy", "--bnn", "0", "1"]), 2);
    assert_eq!(
        code(d, &["--mode", "adder", "energy", "--n", "1", "--M", "1"]),
        2
    );
}

#[test]
fn eval_reference_and_binary() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["fit", "--target", "sin", "--N", "16", "--grid", "64"]);
    let net = d.join("network.json");
    let out = ok(
        d,
        &[
            "eval",
            "--network",
            net.to_str().unwrap(),
            "--x",
            "0.25",
            "--M",
            "16384",
        ],
    );
    assert!(out.contains("reference") && out.contains("scnn"));
    let r = json(&d.join("eval.json"));
    let (g, sc) = (
        r["reference"].as_f64().unwrap(),
        r["scnn"].as_f64().unwrap(),
    );
    assert!((g - 1.0).abs() < 0.05, "reference {g}");
    assert!((sc - g).abs() < 0.15, "scnn {sc}");
    assert_meta(&r["meta"], "eval", 0);
    assert_eq!(
        code(
            d,
            &["eval", "--network", net.to_str().unwrap(), "--x", "0.1,0.2"]
        ),
        2
    );
    assert_eq!(
        code(
            d,
            &["eval", "--network", net.to_str().unwrap(), "--x", "2.0"]
        ),
        2
    );
    ok(
        d,
        &[
            "eval",
            "--network",
            net.to_str().unwrap(),
            "--x",
            "-0.5",
            "--M",
            "8",
        ],
    );

    let bnn = d.join("b.json");
    write_bnn(&bnn, 4, 2, 7);
    ok(
        d,
        &["eval", "--network", bnn.to_str().unwrap(), "--x", "1011"],
    );
    let r = json(&d.join("eval.json"));
    assert_eq!(r["kind"], "bnn");
    assert_eq!(r["preactivations"].as_array().unwrap().len(), 2);
    assert_eq!(
        code(
            d,
            &["eval", "--network", bnn.to_str().unwrap(), "--x", "10"]
        ),
        2
    );
}

#[test]
fn sequential_and_parallel_agree() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(
        d,
        &["fit", "--target", "identity", "--N", "6", "--grid", "32"],
    );
    let net = d.join("network.json");
    let net = net.to_str().unwrap();
    let common = [
        "sweep",
        "--network",
        net,
        "--M",
        "16,64",
        "--trials",
        "30",
        "--grid",
        "8",
    ];
    let p = d.join("p");
    let s = d.join("s");
    let mut pa = vec!["--exec", "parallel", "--mode", "mux"];
    pa.extend(common);
    let mut sa = vec!["--exec", "sequential", "--mode", "mux"];
    sa.extend(common);
    ok(&p, &pa);
    ok(&s, &sa);
    assert_eq!(
        fs::read(p.join("sweep.csv")).unwrap(),
        fs::read(s.join("sweep.csv")).unwrap()
    );
}
