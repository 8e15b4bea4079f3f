use std::path::Path;
use std::process::{Command, Output};

fn arithgen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arithgen"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines().find_map(|l| l.strip_prefix(key)?.strip_prefix('='))
}

#[test]
fn generate_hierarchical_dadda_verilog() {
    let o = arithgen(&[
        "generate",
        "--circuit",
        "dadda",
        "--bits",
        "16",
        "--adder",
        "cska",
        "--format",
        "verilog",
        "--variant",
        "hier",
    ]);
    assert!(o.status.success());
    let v = stdout(&o);
    assert!(v.contains("module u_dadda_cska16("));
    let opened = v.lines().filter(|l| l.starts_with("module ")).count();
    assert_eq!(opened, v.lines().filter(|l| l.starts_with("endmodule")).count());
    assert!(opened >= 3);
}

#[test]
fn generate_tm_chromosome_parses() {
    let o = arithgen(&[
        "generate",
        "--circuit",
        "tm",
        "--bits",
        "8",
        "--tm-k",
        "2",
        "--format",
        "cgp",
    ]);
    assert!(o.status.success());
    let net = arithgen::export::parse_cgp(&stdout(&o), None).unwrap();
    assert_eq!((net.input_bits(), net.output_bits()), (16, 16));
    let out = arithgen::sim::evaluate(&net, &[(255 << 8) | 255]).unwrap();
    assert_eq!(out, vec![65025 - 5]);
}

#[test]
fn cgp_hierarchical_is_a_usage_error() {
    let o = arithgen(&["generate", "--circuit", "dadda", "--format", "cgp", "--variant", "hier"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());
}

#[test]
fn generate_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rca.blif");
    let o = arithgen(&[
        "generate",
        "--circuit",
        "rca",
        "--bits",
        "4",
        "--format",
        "blif",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with(".model u_rca4"));
}

#[test]
fn generate_matrix_succeeds() {
    let circuits = [
        "ha", "fa", "rca", "cla", "cska", "array", "dadda", "wallace", "bam", "tm", "divider", "mac",
    ];
    let combos = [
        ("verilog", "flat"),
        ("verilog", "hier"),
        ("blif", "flat"),
        ("blif", "hier"),
        ("c", "flat"),
        ("c", "hier"),
        ("cgp", "flat"),
    ];
    for bits in ["1", "2", "4", "8", "16", "32"] {
        for c in circuits {
            for (f, v) in combos {
                let o = arithgen(&[
                    "generate",
                    "--circuit",
                    c,
                    "--bits",
                    bits,
                    "--format",
                    f,
                    "--variant",
                    v,
                ]);
                assert!(
                    o.status.success(),
                    "{c} {bits} {f} {v}: {}",
                    String::from_utf8_lossy(&o.stderr)
                );
                assert!(!o.stdout.is_empty());
            }
        }
    }
}

#[test]
fn verify_examples() {
    let o = arithgen(&["verify", "--circuit", "array", "--bits", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(value(&stdout(&o), "status"), Some("pass"));
    assert_eq!(value(&stdout(&o), "vectors"), Some("65536"));

    let o = arithgen(&[
        "verify",
        "--circuit",
        "rca",
        "--bits",
        "32",
        "--mode",
        "random",
        "--trials",
        "100000",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(value(&stdout(&o), "status"), Some("pass"));

    let o = arithgen(&["verify", "--circuit", "array", "--bits", "32"]);
    assert_eq!(o.status.code(), Some(2));

    let o = arithgen(&["verify", "--circuit", "divider", "--bits", "4"]);
    assert_eq!(value(&stdout(&o), "vectors"), Some("240"));
}

#[test]
fn verify_failure_reports_counterexample() {
    let o = arithgen(&["verify", "--circuit", "tm", "--bits", "4", "--tm-k", "3"]);
    assert_eq!(
        o.status.code(),
        Some(2),
        "approximate circuits are measured, not verified"
    );

    // a truncated product checked as if it were the exact multiplier
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tm.cgp");
    let o = arithgen(&[
        "generate",
        "--circuit",
        "tm",
        "--bits",
        "4",
        "--tm-k",
        "3",
        "--format",
        "cgp",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    for mode in ["exhaustive", "random"] {
        let o = arithgen(&[
            "verify",
            "--circuit",
            "array",
            "--bits",
            "4",
            "--mode",
            mode,
            "--chromosome",
            path.to_str().unwrap(),
        ]);
        let text = stdout(&o);
        assert_eq!(o.status.code(), Some(1), "{text}");
        assert_eq!(value(&text, "status"), Some("fail"));
        let cx = value(&text, "counterexample").unwrap();
        assert!(cx.contains("a=") && cx.contains("expected="), "{cx}");
    }
}

#[test]
fn error_examples() {
    let o = arithgen(&["error", "--circuit", "tm", "--bits", "8", "--tm-k", "2"]);
    assert!(o.status.success());
    assert_eq!(value(&stdout(&o), "wce"), Some("5"));

    let o = arithgen(&["error", "--circuit", "bam", "--bits", "8"]);
    assert_eq!(value(&stdout(&o), "wce"), Some("0"));

    let o = arithgen(&["error", "--circuit", "bam", "--bits", "8", "--bam-v", "1"]);
    assert_eq!(value(&stdout(&o), "wce"), Some("1"));
    assert_eq!(value(&stdout(&o), "error_rate"), Some("0.25"));

    let o = arithgen(&[
        "error",
        "--circuit",
        "bam",
        "--bits",
        "8",
        "--bam-v",
        "1",
        "--format",
        "json",
    ]);
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["error_rate"], 0.25);

    let o = arithgen(&[
        "error",
        "--circuit",
        "tm",
        "--bits",
        "4",
        "--tm-k",
        "2",
        "--exact",
        "dadda",
    ]);
    assert!(o.status.success());
    assert_eq!(value(&stdout(&o), "wce"), Some("5"));
}

#[test]
fn error_signature_mismatch_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rca.cgp");
    let o = arithgen(&[
        "generate",
        "--circuit",
        "rca",
        "--bits",
        "4",
        "--format",
        "cgp",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let o = arithgen(&[
        "error",
        "--circuit",
        "array",
        "--bits",
        "4",
        "--chromosome",
        path.to_str().unwrap(),
    ]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn stats_examples() {
    let o = arithgen(&["stats", "--circuit", "ha"]);
    let text = stdout(&o);
    assert_eq!(value(&text, "XOR"), Some("1"));
    assert_eq!(value(&text, "AND"), Some("1"));
    assert_eq!(value(&text, "depth"), Some("1"));

    let o = arithgen(&["stats", "--circuit", "fa", "--format", "json"]);
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["total_gates"], 5);
    assert_eq!(json["depth"], 3);

    let o = arithgen(&["stats", "--circuit", "rca", "--bits", "8"]);
    assert_eq!(value(&stdout(&o), "total_gates"), Some("37"));
}

fn history_gates(path: &Path) -> Vec<usize> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn approximate_history_is_non_increasing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = arithgen(&[
        "approximate",
        "--circuit",
        "array",
        "--bits",
        "8",
        "--threshold",
        "256",
        "--evaluations",
        "10000",
        "--seed",
        "3",
        "--out-dir",
        out,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let gates = history_gates(&dir.path().join("u_arrmul8_run0.history"));
    assert!(!gates.is_empty());
    assert!(gates.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn approximate_threshold_zero_stays_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = arithgen(&[
        "approximate",
        "--circuit",
        "array",
        "--bits",
        "4",
        "--threshold",
        "0",
        "--evaluations",
        "2000",
        "--mutations",
        "1",
        "--out-dir",
        out,
    ]);
    assert!(o.status.success());
    let cgp = dir.path().join("u_arrmul4_run0.cgp");
    let o = arithgen(&[
        "error",
        "--circuit",
        "array",
        "--bits",
        "4",
        "--chromosome",
        cgp.to_str().unwrap(),
    ]);
    assert_eq!(value(&stdout(&o), "wce"), Some("0"));
}

#[test]
fn approximate_runs_use_distinct_seeds_and_repeat_exactly() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = |dir: &str| {
        arithgen(&[
            "approximate",
            "--circuit",
            "array",
            "--bits",
            "3",
            "--threshold",
            "4",
            "--evaluations",
            "300",
            "--runs",
            "10",
            "--out-dir",
            dir,
        ])
    };
    let oa = args(a.path().to_str().unwrap());
    let ob = args(b.path().to_str().unwrap());
    assert!(oa.status.success());
    let seeds: std::collections::HashSet<String> = stdout(&oa)
        .lines()
        .filter_map(|l| {
            l.split_whitespace()
                .find_map(|t| t.strip_prefix("seed="))
                .map(String::from)
        })
        .collect();
    assert_eq!(seeds.len(), 10);
    for i in 0..10 {
        for ext in ["cgp", "v", "history"] {
            let name = format!("u_arrmul3_run{i}.{ext}");
            let fa = std::fs::read(a.path().join(&name)).unwrap();
            let fb = std::fs::read(b.path().join(&name)).unwrap();
            assert_eq!(fa, fb, "{name}");
        }
    }
    assert_eq!(
        stdout(&oa).replace(a.path().to_str().unwrap(), ""),
        stdout(&ob).replace(b.path().to_str().unwrap(), "")
    );
}

#[test]
fn approximate_rejects_seed_above_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let o = arithgen(&[
        "approximate",
        "--circuit",
        "tm",
        "--bits",
        "4",
        "--tm-k",
        "3",
        "--threshold",
        "0",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn identical_invocations_are_byte_identical() {
    for args in [
        &[
            "generate",
            "--circuit",
            "wallace",
            "--bits",
            "8",
            "--adder",
            "cla",
            "--format",
            "c",
            "--variant",
            "hier",
        ][..],
        &[
            "verify",
            "--circuit",
            "rca",
            "--bits",
            "16",
            "--mode",
            "random",
            "--trials",
            "1000",
            "--seed",
            "9",
        ][..],
        &[
            "error",
            "--circuit",
            "tm",
            "--bits",
            "12",
            "--tm-k",
            "5",
            "--mode",
            "random",
            "--trials",
            "5000",
        ][..],
        &["stats", "--circuit", "mac", "--bits", "6"][..],
    ] {
        assert_eq!(arithgen(args).stdout, arithgen(args).stdout, "{args:?}");
    }
}

#[test]
fn bad_arguments_are_usage_errors() {
    assert_eq!(arithgen(&["generate", "--circuit", "nope"]).status.code(), Some(2));
    assert_eq!(
        arithgen(&["generate", "--circuit", "rca", "--bits", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        arithgen(&["generate", "--circuit", "bam", "--bits", "4", "--bam-h", "9"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        arithgen(&["generate", "--circuit", "tm", "--bits", "4", "--signed"])
            .status
            .code(),
        Some(2)
    );
}
