// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
use std::path::Path;
use std::process::{Command, Output};

const KARATE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/karate.txt");

fn nslpa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nslpa"))
        .args(args)
        .output()
        .unwrap()
}

fn json(bytes: &[u8]) -> serde_json::Value {
    serde_json::from_slice(bytes).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn detect_writes_labels_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let labels = dir.path().join("karate.labels");
    let out = nslpa(&[
        "detect",
        "--input",
        KARATE,
        "--c",
        "1",
        "--seed",
        "3",
        "--out",
        s(&labels),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = json(&out.stdout);
    assert_eq!(summary["graph"]["n"], 34);
    assert_eq!(summary["graph"]["m"], 78);
    assert_eq!(summary["run"]["converged"], true);
    let text = std::fs::read_to_string(&labels).unwrap();
    assert_eq!(text.lines().count(), 34);
    // node names are the original tokens
    assert!(text.lines().any(|l| l.starts_with("34 ")));

    let scored = nslpa(&["metrics", "--input", s(&labels), "--graph", KARATE]);
    assert!(scored.status.success());
    let report = json(&scored.stdout);
    let q = report["q"].as_f64().unwrap();
    assert!((q - summary["q"].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn lfr_gen_then_score_truth_against_itself() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("net");
    let out = nslpa(&[
        "lfr-gen",
        "--n",
        "300",
        "--max-k",
        "20",
        "--size-max",
        "30",
        "--mu",
        "0.2",
        "--seed",
        "5",
        "--out",
        s(&prefix),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let echo = json(&out.stdout);
    assert_eq!(echo["params"]["n"], 300);
    assert_eq!(echo["params"]["mu"], 0.2);
    let edges = dir.path().join("net.edges");
    let truth = dir.path().join("net.truth");
    let ccdf = dir.path().join("sizes.csv");
    let scored = nslpa(&[
        "metrics",
        "--input",
        s(&truth),
        "--truth",
        s(&truth),
        "--ccdf",
        s(&ccdf),
    ]);
    assert!(
        scored.status.success(),
        "{}",
        String::from_utf8_lossy(&scored.stderr)
    );
    let report = json(&scored.stdout);
    assert!((report["nmi"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((report["ari"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(std::fs::read_to_string(ccdf)
        .unwrap()
        .starts_with("s,p_greater\n"));

    let detected = nslpa(&["detect", "--input", s(&edges), "--seed", "1"]);
    assert!(detected.status.success());
    assert!(!detected.stdout.is_empty());
}

#[test]
fn sweep_csv_has_one_row_per_c() {
    let out = nslpa(&["sweep", "--input", KARATE, "--c", "0,0.5,1", "--runs", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "c,max_q,avg_q,avg_updates_per_node,excluded");
    assert_eq!(lines.len(), 4);
    assert!(lines[2].starts_with("0.5,"));
}

#[test]
fn lfr_sweep_reports_mu_rows() {
    let out = nslpa(&[
        "sweep",
        "--lfr",
        "--n",
        "200",
        "--max-k",
        "20",
        "--size-max",
        "30",
        "--mu",
        "0.2,0.4",
        "--networks",
        "2",
        "--c",
        "0,1",
        "--runs",
        "2",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("mu,c,mean_best_nmi"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn errors_exit_nonzero_with_a_diagnostic() {
    let cases: [&[&str]; 5] = [
        &["detect", "--input", "/nonexistent/edges.txt"],
        &["detect", "--input", KARATE, "--c", "2"],
        &["sweep", "--input", KARATE, "--runs", "0"],
        &["lfr-gen", "--size-min", "2", "--out", "/tmp/never"],
        &["sweep"],
    ];
    for args in cases {
        let out = nslpa(args);
        assert!(!out.status.success(), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.starts_with("error"), "{args:?}: {err}");
    }
}

#[test]
fn malformed_edge_list_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "1 2\n2 3 4\n").unwrap();
    let out = nslpa(&["detect", "--input", s(&bad)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn lfr_reports_are_identical_across_processes() {
    let args = [
        "sweep",
        "--lfr",
        "--n",
        "200",
        "--max-k",
        "20",
        "--size-max",
        "30",
        "--mu",
        "0.3",
        "--networks",
        "2",
        "--c",
        "0,1",
        "--runs",
        "3",
        "--format",
        "json",
    ];
    let (a, b) = (nslpa(&args), nslpa(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
