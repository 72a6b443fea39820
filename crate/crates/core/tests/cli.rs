use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcoupling")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["eval", "--n1", "137", "--n2", "29"]).status.code(), Some(0));
    assert_eq!(run(&["eval", "--n1", "1", "--n2", "5"]).status.code(), Some(1));
    assert_eq!(run(&["eval", "--n1", "2", "--n2", "2"]).status.code(), Some(1));
    assert_eq!(run(&["mean", "--n1", "2", "--n2", "2"]).status.code(), Some(1));
    assert_eq!(run(&["search", "--lo", "0.2", "--hi", "0.1"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(run(&["eval", "--n1", "x"]).status.code(), Some(64));
    assert_eq!(run(&["table", "--format", "xml"]).status.code(), Some(64));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["verify"]).status.code(), Some(0));
    assert_eq!(run(&["verify", "--tolerance", "5e-12"]).status.code(), Some(2));
}

#[test]
fn eval_with_oracle_digits() {
    let o = run(&["eval", "--n1", "2", "--n2", "1", "--digits", "15"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("kind,n1,n2,alpha,inverse,precision_bound,velocity_ratio,oracle"));
    let row = lines.next().unwrap();
    assert!(row.starts_with("pure,2,1,0.318309886184,3.141592653590,"), "{row}");
    assert!(row.ends_with(",0.318309886183791"), "{row}");
}

#[test]
fn table_csv_shape() {
    let text = stdout(&run(&["table"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,alpha_s1,alpha_s2,alpha_g,alpha_f");
    assert_eq!(lines.len(), 22);
    assert_eq!(lines[1], "-3.000000000000,0.318309886184,0.318309886184,0.034280626357,0.007297352532");
    assert_eq!(lines[20], "16.000000000000,0.023742972654,0.023742972654,0.023742972654,0.023742972654");
    for line in &lines[1..] {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 5);
        assert!(cells.iter().all(|c| c.split('.').nth(1).map(str::len) == Some(12)), "{line}");
    }
}

#[test]
fn table_json_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.json");
    let o = run(&["table", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["meta"]["variant"], "both");
    assert_eq!(v["rows"].as_array().unwrap().len(), 21);
}

#[test]
fn search_and_nearest() {
    let text = stdout(&run(&["nearest", "--value", "137.036", "--reciprocal"]));
    assert_eq!(text.lines().nth(1).unwrap().split(',').take(3).collect::<Vec<_>>(), ["pure", "137", "29"]);

    let o = run(&["search", "--lo", "0.115", "--hi", "0.13", "--caps-n1", "100", "--caps-n2", "100", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let flagged: Vec<u64> = v["meta"]["truncated"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|t| t["mean"] == false)
        .map(|t| t["n1"].as_u64().unwrap())
        .collect();
    assert_eq!(flagged, [7, 8]);
}

#[test]
fn match_reports_z_scores() {
    let text = stdout(&run(&["match", "--center", "0.118", "--sigma", "0.003", "--include-means", "false"]));
    let first = text.lines().nth(1).unwrap();
    assert!(first.starts_with("cli,pure,8,2,0.116992293559,"), "{first}");
    assert_eq!(run(&["match", "--center", "0.118"]).status.code(), Some(1));
}

#[test]
fn identify_flags_em_at_z_mass() {
    let text = stdout(&run(&["identify"]));
    let row = text.lines().find(|l| l.starts_with("alpha(m_Z),")).unwrap();
    assert!(row.contains("alpha(128;31)"), "{row}");
    assert!(row.ends_with(",flagged"), "{row}");
}

#[test]
fn fit_and_edges() {
    let text = stdout(&run(&["fit"]));
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().nth(4).unwrap().starts_with("n_g,3,2.98784244894"));

    let text = stdout(&run(&["edges", "--path", "f", "--from", "-2", "--to", "-0.5"]));
    let edges: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(edges.len(), 2);
    assert!(edges[0].ends_with(",137,136") && edges[1].ends_with(",136,135"));
}

#[test]
fn scheme_file_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"functions\": []}").unwrap();
    assert_eq!(run(&["table", "--scheme", path.to_str().unwrap()]).status.code(), Some(1));
}
