use std::process::Command;

use loewner::io::parse_curve_csv;

fn loewner(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_loewner")).args(args).output().unwrap()
}

#[test]
fn simulate_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = loewner(&[
            "simulate",
            "--driver",
            "bm",
            "--kappa",
            "8/3",
            "--n",
            "200",
            "--seed",
            "1",
            "--csv",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!x.is_empty());
    let strip = |v: &[u8]| -> String {
        // the command line differs only by the output path
        String::from_utf8_lossy(v)
            .lines()
            .filter(|l| !l.starts_with("# command"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&x), strip(&y));
    let text = String::from_utf8(x).unwrap();
    assert!(text.contains("kappa=2.6666666666666665 seed=1"));
}

#[test]
fn simulate_zero_driver_to_stdout() {
    let out = loewner(&["simulate", "--driver", "zero", "--n", "16"]);
    assert!(out.status.success());
    let rows = parse_curve_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(rows.len(), 16 * 4 + 1);
    for (t, re, im) in rows {
        assert!(re.abs() <= 1e-12 && (im - 2.0 * t.sqrt()).abs() <= 1e-12);
    }
}

#[test]
fn svg_output() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("c.svg");
    let out = loewner(&[
        "simulate",
        "--driver",
        "bm",
        "--kappa",
        "6",
        "--n",
        "64",
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<polyline").count(), 1);
}

#[test]
fn exit_codes() {
    assert_eq!(loewner(&["simulate", "--kappa", "1/0"]).status.code(), Some(1));
    assert_eq!(loewner(&["simulate", "--unknown-flag"]).status.code(), Some(1));
    assert_eq!(loewner(&["hull", "--y-min", "-1"]).status.code(), Some(1));
    assert_eq!(
        loewner(&["simulate", "--driver", "file", "--file", "/nonexistent/driver.txt"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(loewner(&["converge", "--n0", "8"]).status.code(), Some(1));
    assert_eq!(loewner(&["--version"]).status.code(), Some(0));
    // driver file whose header disagrees with its values
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("d.txt");
    std::fs::write(&f, "2\n0\n1\n0.5\n").unwrap();
    assert_eq!(
        loewner(&["simulate", "--driver", "file", "--file", f.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
    std::fs::write(&f, "3\n0\n1\n").unwrap();
    assert_eq!(
        loewner(&["simulate", "--driver", "file", "--file", f.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn checks_pass_and_negative_control_fails() {
    let ok = loewner(&["checks", "--driver", "zero", "--n", "32"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let json: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(json["passed"], true);
    let bad = loewner(&[
        "checks",
        "--driver",
        "bm",
        "--kappa",
        "2",
        "--n",
        "32",
        "--inject-sign-flip",
    ]);
    assert_eq!(bad.status.code(), Some(3));
}

#[test]
fn hull_of_sle6_is_nonempty() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("h.pgm");
    let out = loewner(&[
        "hull",
        "--driver",
        "bm",
        "--kappa",
        "6",
        "--n",
        "64",
        "--resolution",
        "20",
        "--out",
        p.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&p).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(3).collect();
    assert!(body.iter().any(|l| l.split(' ').any(|v| v == "255")));
    // t = 0: empty
    let out = loewner(&[
        "hull",
        "--driver",
        "bm",
        "--kappa",
        "6",
        "--n",
        "64",
        "--t",
        "0",
        "--resolution",
        "10",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(3)
        .any(|l| l.contains("255")));
}

#[test]
fn converge_writes_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.json");
    let out = loewner(&[
        "converge",
        "--family",
        "sqrt",
        "--c",
        "1",
        "--seeds",
        "1",
        "--n0",
        "16",
        "--doublings",
        "3",
        "--beta",
        "0",
        "--out",
        p.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(json["levels"], serde_json::json!([16, 32, 64, 128]));
    assert_eq!(json["runs"][0]["decreasing"], true);
}
