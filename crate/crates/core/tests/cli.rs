use std::path::Path;
use std::process::{Command, Output};

fn afn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_afn")).args(args).output().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn afn_params_prints_defaults() {
    let out = afn(&["afn-params", "--n", "100000", "--c", "1.4142135623730951"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "ell=633\nm=23849\n");
}

#[test]
fn generate_then_run_grid() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("normal.txt");
    let records = dir.path().join("records.csv");
    let summary = dir.path().join("summary.csv");
    assert!(afn(&["gen", "--kind", "normal", "--n", "200", "--d", "10", "--seed", "3", "--out", p(&data)]).status.success());

    let run = |records: &Path| {
        afn(&[
            "afn-run", "--data", p(&data), "--variant", "qd", "--ell-grid", "1,4", "--m-grid", "2,8",
            "--seeds", "2", "--queries-per-seed", "3", "--out", p(records), "--summary", p(&summary), "--no-timing",
        ])
    };
    assert!(run(&records).status.success());
    let text = std::fs::read_to_string(&records).unwrap();
    assert_eq!(text.lines().count(), 1 + 4 * 2 * 3);
    assert!(text.lines().nth(1).unwrap().starts_with("normal,qd,1,2,0,"));
    assert_eq!(std::fs::read_to_string(&summary).unwrap().lines().count(), 5);

    let again = dir.path().join("again.csv");
    assert!(run(&again).status.success());
    assert_eq!(std::fs::read(&records).unwrap(), std::fs::read(&again).unwrap());

    let rho = afn(&["rho", "--data", p(&data), "--pairs", "5000"]);
    assert!(rho.status.success());
    let value: f64 = String::from_utf8(rho.stdout).unwrap().trim().parse().unwrap();
    assert!(value > 5.0 && value < 15.0);

    let zip_mismatch = afn(&[
        "afn-run", "--data", p(&data), "--variant", "qi-depth", "--ell-grid", "1,4", "--m-grid", "2",
        "--pairing", "zip", "--seeds", "1", "--queries-per-seed", "1", "--out", p(&records),
    ]);
    assert_eq!(zip_mismatch.status.code(), Some(1));
}

#[test]
fn annulus_and_lemma3() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("annulus.csv");
    let out = afn(&[
        "annulus-run", "--planted", "500", "--d", "5", "--r", "1", "--w", "2", "--c", "3", "--seeds", "3",
        "--out", p(&report),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.starts_with("r,w,c,bucket_width,k,tables,ell,m,cap,"));

    let out = afn(&["lemma3", "--n", "10000", "--c", "1.4142135623730951", "--trials", "10000", "--seed", "1"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("t=3.18065654620"));
}

#[test]
fn convert_movielens() {
    let dir = tempfile::tempdir().unwrap();
    let ratings = dir.path().join("ratings.csv");
    std::fs::write(&ratings, "userId,movieId,rating,timestamp\n7,1,4.0,0\n8,1,3.0,0\n8,5,5.0,0\n").unwrap();
    let (out, map) = (dir.path().join("vectors.txt"), dir.path().join("map.csv"));
    let res = afn(&["convert-movielens", "--ratings", p(&ratings), "--out", p(&out), "--map", p(&map)]);
    assert!(res.status.success());
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "sparse 2 2\n0:4 1:3\n1:5\n");
    assert_eq!(std::fs::read_to_string(&map).unwrap(), "internal_id,original_movieId\n0,1\n1,5\n");
}

#[test]
fn exit_codes() {
    assert_eq!(afn(&[]).status.code(), Some(1));
    assert_eq!(afn(&["nonsense"]).status.code(), Some(1));
    assert_eq!(afn(&["--help"]).status.code(), Some(0));
    assert_eq!(afn(&["afn-params", "--n", "100", "--c", "0.9"]).status.code(), Some(1));
    assert_eq!(afn(&["rho", "--data", "/definitely/not/here.txt"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "1 2\n3\n").unwrap();
    let out = afn(&["rho", "--data", p(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 2"));
}
