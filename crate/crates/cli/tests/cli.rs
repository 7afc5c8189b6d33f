use std::fs;
use std::path::Path;

use moonshine::qseries::parse_series;
use moonshine::replication::Polynomial;
use moonshine_cli::run;

fn data(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(rel)
        .display()
        .to_string()
}

fn moonshine(args: &[&str]) -> moonshine_cli::Outcome {
    run(std::iter::once("moonshine").chain(args.iter().copied()))
}

#[test]
fn faber_of_j() {
    let j = data("j.qs");
    let out = moonshine(&["faber", "--input", &j, "--n", "2"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout, "x^2 - 393768\n");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("phi3.txt");
    let out = moonshine(&["faber", "--input", &j, "--n", "3", "--output", path.to_str().unwrap()]);
    assert_eq!(out.code, 0);
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text, "x^3 - 590652*x - 64481280\n");
    assert_eq!(Polynomial::parse(&text).unwrap().to_string(), text.trim_end());
}

#[test]
fn usage_errors_exit_2() {
    let j = data("j.qs");
    assert_eq!(moonshine(&["faber", "--input", &j, "--n", "2", "--bogus"]).code, 2);
    assert_eq!(moonshine(&["no-such-command"]).code, 2);
    assert_eq!(moonshine(&["faber", "--input", &j]).code, 2);
    assert_eq!(moonshine(&["--help"]).code, 0);
}

#[test]
fn malformed_files_report_positions() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.qs");
    fs::write(&bad, "M 1\nL 1\nK 3\n-1 1\n2 x\n").unwrap();
    let out = moonshine(&["faber", "--input", bad.to_str().unwrap(), "--n", "2"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.starts_with(&format!("{}:5:3:", bad.display())), "{}", out.stderr);

    let group = dir.path().join("g.txt");
    fs::write(&group, "order 2\n0 1\n1 7\n").unwrap();
    let out = moonshine(&["orbits", "--group", group.to_str().unwrap()]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.starts_with(&format!("{}:3:3:", group.display())), "{}", out.stderr);

    let missing = dir.path().join("missing.qs");
    assert_eq!(moonshine(&["faber", "--input", missing.to_str().unwrap(), "--n", "2"]).code, 2);
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let mut runs = Vec::new();
    for _ in 0..2 {
        let out = moonshine(&[
            "hecke-compose-check",
            "--group",
            &data("groups/s3.txt"),
            "--k",
            "2",
            "--m",
            "2",
            "--seed",
            "7",
            "--report",
            report.to_str().unwrap(),
        ]);
        assert_eq!(out.code, 0, "{}", out.stdout);
        runs.push(fs::read(&report).unwrap());
    }
    assert_eq!(runs[0], runs[1]);
    let a = &runs[0];
    let v: serde_json::Value = serde_json::from_slice(a).unwrap();
    assert_eq!(v["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["verdict"] == "pass"));
}

#[test]
fn verdicts_map_to_exit_codes() {
    let j = data("j.qs");
    let out = moonshine(&["check-replicable", "--input", &j, "--order", "12"]);
    assert_eq!(out.code, 0);
    // J through q^30 cannot support a box of 20
    let out = moonshine(&["check-replicable", "--input", &j, "--order", "20"]);
    assert_eq!(out.code, 3, "{}", out.stdout);
    assert!(out.stdout.contains("inconclusive"));

    let dir = tempfile::tempdir().unwrap();
    let bumped = dir.path().join("bumped.qs");
    let text = fs::read_to_string(&j).unwrap().replace("\n5 333202640600\n", "\n5 333202640601\n");
    fs::write(&bumped, text).unwrap();
    let out = moonshine(&["check-replicable", "--input", bumped.to_str().unwrap(), "--order", "12"]);
    assert_eq!(out.code, 1, "{}", out.stdout);
}

#[test]
fn precision_flag_truncates_inputs() {
    let out = moonshine(&["hecke", "--input", &data("j.qs"), "--n", "2", "--precision", "6"]);
    assert_eq!(out.code, 0);
    let s = parse_series(&out.stdout).unwrap();
    assert_eq!(s.precision_num(), 3);
    let out = moonshine(&["denominator-check", "--data", &data("j_module.txt"), "--window", "8,8", "--precision", "40"]);
    assert_eq!(out.code, 3, "{}", out.stdout);
}

#[test]
fn emitted_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let j = data("j.qs");
    let out = moonshine(&["replicates", "--input", &j, "--t", "2", "--max-index", "4", "--output-dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.code, 0);
    for t in 1..=2 {
        let text = fs::read_to_string(dir.path().join(format!("rep_{t}.qs"))).unwrap();
        let s = parse_series(&text).unwrap();
        assert_eq!(moonshine::qseries::write_series(&s), text);
    }
    let eq = dir.path().join("f2.txt");
    let out = moonshine(&["modular-eq", "--input", &j, "--p", "2", "--output", eq.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    let text = fs::read_to_string(&eq).unwrap();
    let f = moonshine::monic::BivariatePolynomial::parse(&text).unwrap();
    assert_eq!(f.to_text(), text);
    assert_eq!(f.x_degree(), Some(3));

    let h = dir.path().join("h.txt");
    let out = moonshine(&["bivarial", "--input", &j, "--order", "4", "--output", h.to_str().unwrap()]);
    assert_eq!(out.code, 0);
    let text = fs::read_to_string(&h).unwrap();
    let rows = moonshine_cli::io::parse_h_table(&text).unwrap();
    assert_eq!(moonshine_cli::io::write_h_table(&rows), text);
}

#[test]
fn families_from_directories() {
    let dir = tempfile::tempdir().unwrap();
    let j = fs::read_to_string(data("j.qs")).unwrap();
    // every pair of Z/1 is (0, 0)
    fs::write(dir.path().join("0_0.qs"), &j).unwrap();
    let out = moonshine(&[
        "monic-check",
        "--group",
        &data("groups/z1.txt"),
        "--family",
        dir.path().to_str().unwrap(),
        "--n-max",
        "3",
    ]);
    assert_eq!(out.code, 0, "{}{}", out.stdout, out.stderr);
    assert!(out.stdout.contains("x^3 - 590652*x - 64481280"));
    assert_eq!(moonshine(&["monic-check", "--family", dir.path().to_str().unwrap(), "--n-max", "2"]).code, 2);
}

#[test]
fn classify_and_orbits() {
    let out = moonshine(&["classify", "--input", &data("j.qs")]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.starts_with("not trigonometric"));
    let out = moonshine(&["orbits", "--group", &data("groups/z2.txt")]);
    assert!(out.stdout.starts_with("classes 4\n"));
}
