use std::process::{Command, Output};

fn exseq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exseq")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn dims_table_matches_closed_forms() {
    let o = exseq(&["dims", "--p-max", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,space,dim,closed_form,match"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4 * 16);
    assert!(rows.iter().all(|r| r.ends_with(",true")));
    // W at index 3 is P_4 on the tetrahedron: 35 = C(7,3)
    assert!(rows.contains(&"3,3d:W,35,35,true"));
}

#[test]
fn dims_json_is_an_array() {
    let o = exseq(&["dims", "--p-min", "1", "--p-max", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 16);
    assert_eq!(rows[0]["match"], true);
}

#[test]
fn verify_passes_and_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = exseq(&["verify", "--p-max", "2", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let lines = v["report"]["lines"].as_array().unwrap();
    assert!(!lines.is_empty());
    assert!(lines.iter().all(|l| l["pass"] == true));
}

#[test]
fn convergence_is_deterministic() {
    let args = ["convergence", "--operator", "grad2d", "--p-min", "1", "--p-max", "3", "--s", "0,1"];
    let a = exseq(&args);
    let b = exseq(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.lines().any(|l| l.starts_with("slope,grad2d") && l.contains(",gap,")));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("study.cfg");
    std::fs::write(&cfg, "# sweep\noperator = l2_2d\np-min = 1\np-max = 2\nformat = json\n").unwrap();
    let o = exseq(&["convergence", "--config", cfg.to_str().unwrap(), "--p-max", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let ps: Vec<u64> = v["records"].as_array().unwrap().iter().map(|r| r["p"].as_u64().unwrap()).collect();
    assert_eq!(ps, [1, 2, 3]);
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(exseq(&["dims", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(exseq(&["nonsense"]).status.code(), Some(2));
    assert_eq!(exseq(&["dims", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(exseq(&["convergence", "--operator", "grad4d"]).status.code(), Some(2));
    assert_eq!(exseq(&["--help"]).status.code(), Some(0));
}

#[test]
fn friedrichs_single_case() {
    let o = exseq(&["friedrichs", "--case", "curl3d_i", "--p-max", "3", "--format", "json"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{}{}", text, String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(!v.as_array().unwrap().is_empty());
}

#[test]
fn project_reproduces_polynomials() {
    let o = exseq(&["project", "--operator", "grad3d", "--p", "4", "--suite", "poly"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rows.headers().unwrap().iter().collect::<Vec<_>>(), ["x", "y", "z", "u0", "pi_u0"]);
    let mut n = 0;
    for r in rows.records() {
        let r = r.unwrap();
        let u: f64 = r[3].parse().unwrap();
        let pi: f64 = r[4].parse().unwrap();
        assert!((u - pi).abs() < 1e-10);
        n += 1;
    }
    assert!(n > 0);
}
