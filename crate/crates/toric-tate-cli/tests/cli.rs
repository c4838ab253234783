use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn example(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toric-tate")).args(args).output().expect("binary runs")
}

fn run_file(cmd: &str, file: &str, extra: &[&str]) -> Output {
    let path = example(file);
    let mut args = vec![cmd, path.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

/// (i, degree) -> dim from a JSON table.
fn entries(v: &Value) -> Vec<(i64, Vec<i64>, u64)> {
    v["table"]["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            let d = e["degree"].as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).collect();
            (e["i"].as_i64().unwrap(), d, e["dim"].as_u64().unwrap())
        })
        .collect()
}

fn get(es: &[(i64, Vec<i64>, u64)], i: i64, d: &[i64]) -> u64 {
    es.iter().find(|(j, a, _)| *j == i && a == d).map_or(0, |e| e.2)
}

fn write_temp(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("toric-tate-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn p112_cohomology_table() {
    let v = json(&run_file("cohomology", "p112.tate", &["--window", "-8:8", "--format", "json"]));
    let es = entries(&v);
    let h0: Vec<u64> = (0..=8).map(|a| get(&es, 0, &[a])).collect();
    assert_eq!(h0, vec![1, 2, 4, 6, 9, 12, 16, 20, 25]);
    assert_eq!(get(&es, 2, &[-4]), 1);
    assert_eq!(get(&es, 2, &[-3]), 0);
    assert!((-8..=8).all(|a| get(&es, 1, &[a]) == 0));

    let text = run_file("cohomology", "p112.tate", &["--window", "-8:8"]);
    assert!(text.status.success());
    let s = String::from_utf8(text.stdout).unwrap();
    let row0 = s.lines().find(|l| l.trim_start().starts_with("0:")).unwrap();
    assert!(row0.split_whitespace().skip(1).skip(8).take(5).eq(["1", "2", "4", "6", "9"]));
}

#[test]
fn p156_betti_table() {
    let v = json(&run_file("betti", "p156-trunc.tate", &["--format", "json"]));
    let es = entries(&v);
    assert_eq!(es, vec![(0, vec![2], 1), (1, vec![3], 1), (1, vec![7], 1), (2, vec![8], 1)]);
}

#[test]
fn hirzebruch1_diagonal_verifies() {
    let out = run_file("diagonal", "hirz1.tate", &["--verify", "--format", "json"]);
    let v = json(&out);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 4);
    assert!(checks.iter().all(|c| c["ok"] == Value::Bool(true)), "{checks:?}");
    let sizes: Vec<usize> = v["terms"].as_array().unwrap().iter().map(|t| t.as_array().unwrap().len()).collect();
    assert_eq!(sizes, vec![5, 10, 5]);
}

#[test]
fn tate_generators_p112() {
    let v = json(&run_file("tate", "p112.tate", &["--window", "-8:8", "--format", "json"]));
    let gens: Vec<(i64, i64, u64)> = v["generators"]
        .as_array()
        .unwrap()
        .iter()
        .map(|g| (g["c"][0].as_i64().unwrap(), g["u"].as_i64().unwrap(), g["count"].as_u64().unwrap()))
        .collect();
    for want in [(4, 2, 1), (0, 0, 1), (-1, 0, 2), (-2, 0, 4)] {
        assert!(gens.contains(&want), "{want:?} missing from {gens:?}");
    }
}

#[test]
fn oracle_and_verify_agree() {
    let fast = json(&run_file("cohomology", "p112.tate", &["--window", "-6:6", "--format", "json"]));
    let slow = json(&run_file("oracle", "p112.tate", &["--window", "-6:6", "--format", "json"]));
    assert_eq!(fast["table"], slow["table"]);
    let out = Command::new(env!("CARGO_BIN_EXE_toric-tate"))
        .args(["verify", example("p112.tate").to_str().unwrap(), "--window", "-5:5", "--random", "3"])
        .env("TATE_SEED", "7")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(String::from_utf8(out.stdout).unwrap().matches("PASS").count(), 4);
}

#[test]
fn regularity_weighted() {
    let out = run_file("regularity", "p156-trunc.tate", &[]);
    assert!(out.status.success());
    let s = String::from_utf8(out.stdout).unwrap();
    assert_eq!(s.matches("PASS").count(), 2, "{s}");
}

#[test]
fn hirzebruch3_parses_and_runs() {
    let v = json(&run_file("betti", "hirz3.tate", &["--module", "M", "--window", "-5:4,-2:2", "--format", "json"]));
    let es = entries(&v);
    assert_eq!(get(&es, 0, &[0, 0]), 6);
    assert_eq!(get(&es, 2, &[-2, 1]), 1);
    let line = json(&run_file("cohomology", "hirz3.tate", &["--module", "S", "--window", "0:1,0:1", "--format", "json"]));
    assert_eq!(get(&entries(&line), 0, &[1, 1]), 7);
}

#[test]
fn output_is_deterministic() {
    let args = ["--window", "-4:4", "--format", "json"];
    let a = run_file("tate", "p112.tate", &args);
    let b = run_file("tate", "p112.tate", &[&args[..], &["--threads", "1"]].concat());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(again, v);
}

#[test]
fn exit_codes() {
    let p112 = std::fs::read_to_string(example("p112.tate")).unwrap();

    let bad_theta = write_temp("theta.tate", &p112.replace(r#""degree": [1]},"#, r#""degree": [0]},"#));
    let out = run(&["cohomology", bad_theta.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("variables[0]") && err.contains("theta"), "{err}");

    let bad_json = write_temp("broken.tate", "{\"field\": ");
    assert_eq!(run(&["betti", bad_json.to_str().unwrap()]).status.code(), Some(2));
    let p = example("p112.tate");
    assert_eq!(run(&["cohomology", p.to_str().unwrap(), "--window", "1:2,3:4"]).status.code(), Some(2));
    assert_eq!(run(&["cohomology", p.to_str().unwrap(), "--module", "Q"]).status.code(), Some(2));

    let torsion = p112.replace(
        r#""S": {"generators": [{"degree": [0]}]}"#,
        r#""K": {"generators": [{"degree": [0]}], "relations": [
            {"degree": [1], "entries": [[1, [1, 0, 0]]]},
            {"degree": [1], "entries": [[1, [0, 1, 0]]]},
            {"degree": [2], "entries": [[1, [0, 0, 1]]]}]}"#,
    );
    let torsion = write_temp("k.tate", &torsion);
    assert_eq!(run(&["tate", torsion.to_str().unwrap(), "--d", "0"]).status.code(), Some(3));

    let h1 = example("hirz1.tate");
    assert_eq!(run(&["cohomology", h1.to_str().unwrap(), "--window", "100:100,0:0"]).status.code(), Some(4));
}
