use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lsketch(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lsketch"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}\t")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .to_string()
}

#[test]
fn generate_build_query_size() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    stdout(&lsketch(&["generate", "--kind", "power-law:3", "-n", "40", "--seed", "2", "-o", "g.txt"], d));
    let x: String = (0..40).map(|i| format!("{}\n", (i as f64 * 0.37).sin())).collect();
    fs::write(d.join("x.txt"), x).unwrap();

    for algo in ["basic", "improved"] {
        let out = stdout(&lsketch(
            &["build", "--algo", algo, "--eps", "0.3", "--delta", "0.1", "--seed", "5", "-i", "g.txt", "-o", "s.lsk"],
            d,
        ));
        assert!(out.contains("21 replicas"), "{out}");

        let q = stdout(&lsketch(&["query", "-s", "s.lsk", "-x", "x.txt", "--exact-against", "g.txt"], d));
        let est: f64 = field(&q, "estimate").parse().unwrap();
        let exact: f64 = field(&q, "exact").parse().unwrap();
        assert!((est - exact).abs() <= 0.3 * exact);
        assert_eq!(field(&q, "replicas"), "21");

        let s = stdout(&lsketch(&["size", "-s", "s.lsk"], d));
        assert_eq!(field(&s, "algorithm"), algo);
        let stored: u64 = field(&s, "stored_edges").parse().unwrap();
        let samples: u64 = field(&s, "sample_records").parse().unwrap();
        let records: u64 = field(&s, "records").parse().unwrap();
        assert_eq!(records, stored + samples);

        // Same seed, same file.
        let first = fs::read(d.join("s.lsk")).unwrap();
        fs::remove_file(d.join("s.lsk")).unwrap();
        stdout(&lsketch(
            &["build", "--algo", algo, "--eps", "0.3", "--delta", "0.1", "--seed", "5", "-i", "g.txt", "-o", "s.lsk"],
            d,
        ));
        assert_eq!(fs::read(d.join("s.lsk")).unwrap(), first);
        fs::remove_file(d.join("s.lsk")).unwrap();
    }
}

#[test]
fn bench_emits_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&lsketch(
        &["bench", "--sweep", "0.5,0.35", "--kind", "complete", "-n", "30", "--queries", "5", "--delta", "0.3"],
        dir.path(),
    ));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "algo,eps,records,bits,mean_rel_err,p95_rel_err,build_ms,query_us");
    assert_eq!(lines.len(), 5);
    for l in &lines[1..] {
        assert_eq!(l.split(',').count(), 8);
    }
}

#[test]
fn errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("g.txt"), "0 1 1\n1 2 1\n").unwrap();
    let o = lsketch(&["build", "--algo", "basic", "--eps", "1.5", "-i", "g.txt", "-o", "s.lsk"], d);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("eps"));

    fs::write(d.join("bad.txt"), "0 1\n").unwrap();
    let o = lsketch(&["build", "--algo", "basic", "--eps", "0.3", "-i", "bad.txt", "-o", "s.lsk"], d);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));

    stdout(&lsketch(&["build", "--algo", "basic", "--eps", "0.3", "-i", "g.txt", "-o", "s.lsk"], d));
    fs::write(d.join("x.txt"), "1\n2\n").unwrap();
    let o = lsketch(&["query", "-s", "s.lsk", "-x", "x.txt"], d);
    assert!(!o.status.success());
}
