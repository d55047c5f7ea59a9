use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const GRAPHS: [(&str, &str); 3] = [("edge", "phi_1.json"), ("bigon", "phi_1.json"), ("triangle", "phi_2.json")];

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holofeyn")).args(args).env("HOLOFEYN_THREADS", threads).output().unwrap()
}

/// Argument lists per case; `{g}` and `{phi}` are substituted per graph.
fn cases() -> Vec<(&'static str, Vec<&'static str>)> {
    vec![
        ("classify", vec!["classify", "--graph", "{g}"]),
        ("kirchhoff", vec!["kirchhoff", "--graph", "{g}"]),
        ("minverse", vec!["minverse", "--graph", "{g}"]),
        ("dinverse", vec!["dinverse", "--graph", "{g}"]),
        ("corners", vec!["corners", "--graph", "{g}"]),
        ("eval", vec!["eval", "--graph", "{g}", "--phi", "{phi}", "--eps", "0.1", "--L", "4", "--mc", "--samples", "20000", "--seed", "7"]),
        ("eval_limit", vec!["eval", "--graph", "{g}", "--rtol", "1e-5"]),
        ("mc_oracle", vec!["mc-oracle", "--graph", "{g}", "--samples", "20000", "--seed", "3"]),
        ("anomaly", vec!["anomaly", "--graph", "{g}", "--phi", "{phi}"]),
        ("quadratic_check", vec!["quadratic-check", "--graph", "{g}", "--phi", "{phi}"]),
        ("boundary_decay", vec!["boundary-decay", "--graph", "{g}", "--Ls", "1,2,4"]),
    ]
}

fn case_args(template: &[&str], graph: &str, phi: &str) -> Vec<String> {
    let g = data(&format!("{graph}.txt")).display().to_string();
    let p = data(phi).display().to_string();
    let mut v: Vec<String> = template.iter().map(|a| a.replace("{g}", &g).replace("{phi}", &p)).collect();
    v.extend(["--output".into(), "json".into()]);
    v
}

/// Equal up to float noise: strings, booleans and structure exactly, numbers to 1e-9 relative.
fn close(a: &Value, b: &Value, path: &str) -> Result<(), String> {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            if (x - y).abs() <= 1e-9 * x.abs().max(y.abs()) + 1e-300 {
                Ok(())
            } else {
                Err(format!("{path}: {x} vs {y}"))
            }
        }
        (Value::Array(x), Value::Array(y)) if x.len() == y.len() => {
            x.iter().zip(y).enumerate().try_for_each(|(i, (p, q))| close(p, q, &format!("{path}[{i}]")))
        }
        (Value::Object(x), Value::Object(y)) if x.keys().eq(y.keys()) => {
            x.iter().try_for_each(|(k, v)| close(v, &y[k], &format!("{path}.{k}")))
        }
        _ if a == b => Ok(()),
        _ => Err(format!("{path}: {a} vs {b}")),
    }
}

/// Graph paths differ between checkouts; the golden files store the graph summary only.
#[test]
fn every_subcommand_matches_its_golden_file() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut failures = Vec::new();
    for (name, template) in cases() {
        for (graph, phi) in GRAPHS {
            let args = case_args(&template, graph, phi);
            let out = run(&args.iter().map(String::as_str).collect::<Vec<_>>(), "2");
            let stdout = String::from_utf8(out.stdout).unwrap();
            let record = serde_json::json!({ "exit": out.status.code(), "output": serde_json::from_str::<Value>(&stdout).unwrap_or(Value::Null) });
            let file = dir.join(format!("{name}_{graph}.json"));
            if update {
                std::fs::write(&file, serde_json::to_string_pretty(&record).unwrap() + "\n").unwrap();
                continue;
            }
            let want: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap_or_else(|_| panic!("missing {}", file.display()))).unwrap();
            if let Err(e) = close(&want, &record, &format!("{name}_{graph}")) {
                failures.push(e);
            }
        }
    }
    assert!(failures.is_empty(), "golden mismatches:\n{}", failures.join("\n"));
}

#[test]
fn json_output_is_byte_identical_across_runs_and_thread_counts() {
    for (name, template) in cases() {
        let args = case_args(&template, "triangle", "phi_2.json");
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let a = run(&args, "1");
        let b = run(&args, "1");
        let c = run(&args, "4");
        assert!(!a.stdout.is_empty(), "{name}");
        assert_eq!(a.stdout, b.stdout, "{name}: repeated run");
        assert_eq!(a.stdout, c.stdout, "{name}: thread count");
    }
}

#[test]
fn classify_triangle_in_two_dimensions_is_laman() {
    let g = data("triangle.txt");
    let out = run(&["classify", "--graph", g.to_str().unwrap(), "--d", "2"], "2");
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().lines().any(|l| l == "laman: true"));
}

#[test]
fn kirchhoff_triangle_reports_the_tree_sum() {
    let g = data("triangle.txt");
    let out = run(&["kirchhoff", "--graph", g.to_str().unwrap()], "2");
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(text.lines().any(|l| l == "t1 + t2 + t3"));
    assert!(text.lines().any(|l| l == "identity: ok"));
}

#[test]
fn quadratic_check_on_triangle_passes() {
    let g = data("triangle.txt");
    let out = run(&["quadratic-check", "--graph", g.to_str().unwrap(), "--d", "1", "--output", "json"], "2");
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["relative_residual"].as_f64().unwrap() < 1e-4);
    assert!(v["max_term"].as_f64().unwrap() > 0.1);
}

#[test]
fn csv_output_has_a_header_and_rows() {
    let g = data("triangle.txt");
    let out = run(&["corners", "--graph", g.to_str().unwrap(), "--output", "csv"], "2");
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(rdr.headers().unwrap().len(), 5);
    assert_eq!(rdr.records().count(), 7);
}

#[test]
fn exit_codes() {
    let g = data("triangle.txt");
    let g = g.to_str().unwrap();
    let code = |args: &[&str]| run(args, "1").status.code();
    assert_eq!(code(&["classify", "--graph", data("bad.txt").to_str().unwrap()]), Some(1));
    assert_eq!(code(&["classify", "--graph", "/nonexistent/graph.txt"]), Some(1));
    assert_eq!(code(&["anomaly", "--graph", g, "--phi", data("phi_1.json").to_str().unwrap()]), Some(1));
    assert_eq!(code(&["eval", "--graph", g, "--mc"]), Some(1));
    assert_eq!(code(&["quadratic-check", "--graph", g, "--tol", "0"]), Some(2));
    assert_eq!(code(&["boundary-decay", "--graph", g, "--Ls", "1,2", "--assert-decreasing"]), Some(2));
    assert_eq!(code(&["eval", "--graph", g, "--rtol", "1e-14", "--atol", "0", "--max-evals", "2000"]), Some(3));
}
