use std::path::Path;
use std::process::{Command, Output};

fn permbp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_permbp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn code_prints_hamming_parameters() {
    let out = permbp(&["code", "--family", "bch", "--m", "3", "--delta", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("n=7 k=4"), "{text}");
    assert!(text.contains("g=x^3+x+1"), "{text}");
    assert!(text.contains("h=x^4+x^2+x+1"), "{text}");
    assert!(text.contains("u=4"), "{text}");
    // the resolved config is echoed
    assert!(text.contains("config:"), "{text}");
}

#[test]
fn code_prints_punctured_rm_63_22() {
    let out = permbp(&["code", "--family", "prm", "--m", "6", "--order", "2"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("n=63 k=22"));
}

#[test]
fn dump_h_writes_block_text() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.txt");
    let out = permbp(&[
        "code",
        "--family",
        "bch",
        "--m",
        "3",
        "--delta",
        "1",
        "--extended",
        "--p",
        "1",
        "--dump-h",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.trim_end().lines().collect();
    assert_eq!(lines.len(), 7);
    for line in &lines {
        assert_eq!(line.len(), 8);
        assert!(
            line.starts_with('0'),
            "first column must be the zero column"
        );
        assert!(line.chars().all(|c| c == '0' || c == '1'));
    }

    // the dump needs the extended code
    let out = permbp(&[
        "code",
        "--family",
        "bch",
        "--m",
        "3",
        "--delta",
        "1",
        "--dump-h",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

fn train_unit_weights(dir: &Path, name: &str, p: usize, seed: u64) -> std::path::PathBuf {
    let path = dir.join(name);
    let out = permbp(&[
        "train",
        "--family",
        "bch",
        "--m",
        "3",
        "--delta",
        "1",
        "--extended",
        "--p",
        &p.to_string(),
        "--t",
        "3",
        "--steps",
        "0",
        "--batch",
        "8",
        "--seed",
        &seed.to_string(),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    path
}

#[test]
fn zero_step_training_writes_unit_weights_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let a = train_unit_weights(dir.path(), "a.json", 2, 5);
    let b = train_unit_weights(dir.path(), "b.json", 2, 5);
    assert_eq!(
        std::fs::read(&a).unwrap(),
        std::fs::read(&b).unwrap(),
        "same flags and seed must give byte-identical weight files"
    );
    let parsed: serde_json::Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    for row in parsed["self_weights"].as_array().unwrap() {
        for w in row.as_array().unwrap() {
            assert_eq!(w.as_f64().unwrap(), 1.0);
        }
    }
    assert_eq!(parsed["format_version"], 1);
    assert_eq!(parsed["code"]["k"], 4);
}

/// Error-statistics columns of a report CSV (everything except timing).
fn stats_columns(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    text.trim_end()
        .lines()
        .skip(1)
        .map(|line| {
            line.split(',')
                .enumerate()
                .filter(|(i, _)| *i <= 6)
                .map(|(_, v)| v.to_string())
                .collect()
        })
        .collect()
}

#[test]
fn eval_stacked_with_unit_weights_matches_classic() {
    let dir = tempfile::tempdir().unwrap();
    let weights = train_unit_weights(dir.path(), "w.json", 2, 1);
    let mut reports = Vec::new();
    for decoder in ["stacked", "classic"] {
        let path = dir.path().join(format!("{decoder}.csv"));
        let out = permbp(&[
            "eval",
            "--weights",
            weights.to_str().unwrap(),
            "--decoder",
            decoder,
            "--snr",
            "2,4",
            "--stop-errors",
            "5",
            "--max-frames",
            "512",
            "--seed",
            "9",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        reports.push(stats_columns(&path));
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn eval_cyclist_with_list_size_one_matches_stacked_p1() {
    let dir = tempfile::tempdir().unwrap();
    let weights = train_unit_weights(dir.path(), "w1.json", 1, 2);
    let mut reports = Vec::new();
    for (decoder, extra) in [("cyclist", Some(("--list-size", "1"))), ("stacked", None)] {
        let path = dir.path().join(format!("{decoder}.csv"));
        let mut args = vec![
            "eval",
            "--weights",
            weights.to_str().unwrap(),
            "--decoder",
            decoder,
            "--snr",
            "3",
            "--stop-errors",
            "5",
            "--max-frames",
            "512",
            "--seed",
            "4",
            "--out",
            path.to_str().unwrap(),
        ];
        if let Some((k, v)) = extra {
            args.push(k);
            args.push(v);
        }
        let out = permbp(&args);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        reports.push(stats_columns(&path));
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn compare_decoder_with_itself_gives_zero_deltas() {
    let dir = tempfile::tempdir().unwrap();
    let weights = train_unit_weights(dir.path(), "w.json", 2, 3);
    let out_dir = dir.path().join("cmp");
    let out = permbp(&[
        "compare",
        "--weights",
        weights.to_str().unwrap(),
        "--decoders",
        "stacked,stacked",
        "--snr",
        "2,4",
        "--stop-errors",
        "5",
        "--max-frames",
        "512",
        "--seed",
        "6",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let deltas = std::fs::read_to_string(out_dir.join("deltas.csv")).unwrap();
    let mut rows = 0;
    for line in deltas.trim_end().lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[3], "0", "d_ber: {line}");
        assert_eq!(cols[4], "0", "d_fer: {line}");
        assert!(cols[5] == "0" || cols[5].is_empty(), "d_cond: {line}");
        rows += 1;
    }
    assert_eq!(rows, 2);
    assert!(out_dir.join("0_stacked.csv").exists());
    assert!(out_dir.join("1_stacked.json").exists());
}

#[test]
fn ml_and_classic_ordering_through_compare() {
    let dir = tempfile::tempdir().unwrap();
    let weights = train_unit_weights(dir.path(), "w.json", 2, 8);
    let out_dir = dir.path().join("cmp");
    let out = permbp(&[
        "compare",
        "--weights",
        weights.to_str().unwrap(),
        "--decoders",
        "ml,classic",
        "--snr",
        "2,4",
        "--stop-errors",
        "40",
        "--max-frames",
        "30000",
        "--seed",
        "12",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let deltas = std::fs::read_to_string(out_dir.join("deltas.csv")).unwrap();
    for line in deltas.trim_end().lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let d_fer: f64 = cols[4].parse().unwrap();
        assert!(
            d_fer >= 0.0,
            "classic must not beat ml under paired noise: {line}"
        );
    }
}

#[test]
fn eval_ml_at_high_snr_is_error_free() {
    let dir = tempfile::tempdir().unwrap();
    let weights = train_unit_weights(dir.path(), "w.json", 1, 0);
    let path = dir.path().join("ml.csv");
    let out = permbp(&[
        "eval",
        "--weights",
        weights.to_str().unwrap(),
        "--decoder",
        "ml",
        "--snr",
        "10",
        "--stop-errors",
        "5",
        "--max-frames",
        "300",
        "--seed",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = stats_columns(&path);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][1], "300", "frames");
    assert_eq!(rows[0][4], "0", "fer");
}

#[test]
fn usage_and_io_exit_codes() {
    // unknown flag
    let out = permbp(&[
        "code", "--family", "bch", "--m", "3", "--delta", "1", "--bogus",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // family/parameter mismatch
    let out = permbp(&["code", "--family", "bch", "--m", "3", "--order", "1"]);
    assert_eq!(out.status.code(), Some(2));
    // missing weight file is an I/O error
    let out = permbp(&[
        "eval",
        "--weights",
        "/nonexistent/w.json",
        "--decoder",
        "stacked",
        "--snr",
        "2",
        "--out",
        "/tmp/r.csv",
    ]);
    assert_eq!(out.status.code(), Some(4));
    // bad report extension
    let dir = tempfile::tempdir().unwrap();
    let weights = train_unit_weights(dir.path(), "w.json", 1, 0);
    let out = permbp(&[
        "eval",
        "--weights",
        weights.to_str().unwrap(),
        "--decoder",
        "stacked",
        "--snr",
        "2",
        "--out",
        dir.path().join("r.txt").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}
