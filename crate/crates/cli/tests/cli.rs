use std::path::PathBuf;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_coalition-var");

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn tmp(name: &str, contents: &str) -> String {
    let dir = std::env::temp_dir().join(format!("coalition-var-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn eval_example_game() {
    let o = run(&["eval", &data("example2.json"), "--format", "json"]);
    assert!(o.status.success());
    let v = json(&o);
    let r: Vec<f64> = v["players"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["r"].as_f64().unwrap())
        .collect();
    assert_eq!(r, [299.0, 230.0, 155.0]);
    assert_eq!(v["sum_v"], 60.0);
    assert_eq!(v["average_r"], 228.0);
}

#[test]
fn eval_additive_has_no_uncertainty() {
    let o = run(&["eval", "--generate", "additive:1,2,5", "--format", "csv"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(
        out.starts_with("player,V,R,sqrtR\n1,1,0,0\n2,2,0,0\n3,5,0,0\n"),
        "{out}"
    );
}

#[test]
fn banzhaf_matches_shapley_for_two_players() {
    let file = tmp(
        "two.json",
        r#"{"n":2,"coalitions":[{"members":["1"],"value":1},{"members":["2"],"value":4},{"members":["1","2"],"value":9}]}"#,
    );
    let shapley = json(&run(&["eval", &file, "--format", "json"]));
    let banzhaf = json(&run(&[
        "eval",
        &file,
        "--weighting",
        "banzhaf",
        "--format",
        "json",
    ]));
    assert_eq!(shapley["players"], banzhaf["players"]);
}

#[test]
fn malformed_game_names_the_coalition() {
    let file = tmp(
        "missing.json",
        r#"{"n":2,"players":["a","b"],"coalitions":[{"members":["a"],"value":1},{"members":["b"],"value":1}]}"#,
    );
    let o = run(&["eval", &file]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("{a,b}"), "{}", stderr(&o));

    let garbage = tmp("garbage.json", "{");
    assert_eq!(run(&["eval", &garbage]).status.code(), Some(2));
}

#[test]
fn exact_limit_from_environment() {
    let o = Command::new(BIN)
        .args(["eval", "--generate", "additive:1,1,1,1"])
        .env("COALITION_VAR_EXACT_LIMIT", "2")
        .output()
        .unwrap();
    // Additive games have a closed form, so the limit does not apply.
    assert!(o.status.success());

    let table: Vec<String> = (1..16)
        .map(|m: u32| {
            let members: Vec<String> = (0..4)
                .filter(|i| m >> i & 1 == 1)
                .map(|i| format!("\"{}\"", i + 1))
                .collect();
            format!(
                r#"{{"members":[{}],"value":{}}}"#,
                members.join(","),
                m.count_ones().pow(2)
            )
        })
        .collect();
    let file = tmp(
        "four.json",
        &format!(r#"{{"n":4,"coalitions":[{}]}}"#, table.join(",")),
    );
    let o = Command::new(BIN)
        .args(["eval", &file])
        .env("COALITION_VAR_EXACT_LIMIT", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("sample"));
}

#[test]
fn sample_majority_and_reproducibility() {
    let args = [
        "sample",
        "--generate",
        "majority:101",
        "--player",
        "1",
        "--samples",
        "1000000",
        "--seed",
        "7",
        "--format",
        "json",
    ];
    let a = run(&args);
    assert!(a.status.success());
    let r = json(&a)[0]["r_hat"].as_f64().unwrap();
    assert!((r - 100.0).abs() <= 5.0, "r_hat {r}");
    assert_eq!(run(&args).stdout, a.stdout);
}

#[test]
fn sample_needs_two_draws() {
    let o = run(&["sample", &data("example2.json"), "--samples", "1"]);
    assert_eq!(o.status.code(), Some(4));
    let o = run(&["sample", &data("example2.json"), "--player", "9"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn generate_majority_and_additive() {
    let m = json(&run(&["generate", "majority:3"]));
    let rows = m["coalitions"].as_array().unwrap();
    assert_eq!(rows.len(), 7);
    assert!(rows
        .iter()
        .all(|r| [0.0, 3.0].contains(&r["value"].as_f64().unwrap())));

    let a = json(&run(&["generate", "additive:1,2"]));
    let values: Vec<f64> = a["coalitions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["value"].as_f64().unwrap())
        .collect();
    assert_eq!(values, [1.0, 2.0, 3.0]);
}

#[test]
fn generate_refuses_large_tables() {
    let o = run(&["generate", "twotype:12,12,sqrtkl"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("eval --generate"));
    assert_eq!(run(&["generate", "pentagon:5"]).status.code(), Some(2));
}

#[test]
fn generate_then_eval_matches_closed_form() {
    let file = tmp("sym.json", "");
    assert!(run(&["generate", "symmetric:0,1,3,7,8", "-o", &file])
        .status
        .success());
    let from_file = json(&run(&["eval", &file, "--format", "json"]));
    let direct = json(&run(&[
        "eval",
        "--generate",
        "symmetric:0,1,3,7,8",
        "--format",
        "json",
    ]));
    for (a, b) in from_file["players"]
        .as_array()
        .unwrap()
        .iter()
        .zip(direct["players"].as_array().unwrap())
    {
        for key in ["v", "r"] {
            assert!((a[key].as_f64().unwrap() - b[key].as_f64().unwrap()).abs() <= 1e-10);
        }
    }

    let file = tmp("tt.json", "");
    assert!(run(&["generate", "twotype:3,4,sqrtkl", "-o", &file])
        .status
        .success());
    let from_file = json(&run(&["eval", &file, "--format", "json"]));
    let direct = json(&run(&[
        "eval",
        "--generate",
        "twotype:3,4,sqrtkl",
        "--format",
        "json",
    ]));
    for (a, b) in from_file["players"]
        .as_array()
        .unwrap()
        .iter()
        .zip(direct["players"].as_array().unwrap())
    {
        for key in ["v", "r"] {
            assert!((a[key].as_f64().unwrap() - b[key].as_f64().unwrap()).abs() <= 1e-10);
        }
    }
}

#[test]
fn attrib_risk_factors() {
    let o = run(&["attrib", &data("risk_factors.csv"), "--format", "json"]);
    assert!(o.status.success());
    let v = json(&o);
    let flags: Vec<bool> = v["factors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["significant"].as_bool().unwrap())
        .collect();
    assert_eq!(flags, [true, false, false, false]);
    assert_eq!(v["notes"].as_array().unwrap().len(), 1);
    assert!(v["notes"][0].as_str().unwrap().contains("smoking"));

    let lenient = json(&run(&[
        "attrib",
        &data("risk_factors.csv"),
        "--z-crit",
        "1.645",
        "--format",
        "json",
    ]));
    assert_eq!(lenient["factors"][3]["significant"], true);
}

#[test]
fn attrib_single_and_symmetric_factors() {
    let single = tmp("single.csv", "f,value\n0,0\n1,1\n");
    let out = stdout(&run(&["attrib", &single, "--format", "csv"]));
    assert!(out.contains("\nf,1,0,0,inf,yes\n"), "{out}");

    let pair = tmp("pair.csv", "a,b,value\n1,0,2\n0,1,2\n1,1,7\n");
    let out = stdout(&run(&["attrib", &pair, "--format", "csv"]));
    let rows: Vec<&str> = out.lines().skip(1).take(2).collect();
    assert_eq!(
        rows[0].trim_start_matches("a,"),
        rows[1].trim_start_matches("b,")
    );

    let gap = tmp("gap.csv", "a,b,value\n1,0,2\n1,1,7\n");
    let o = run(&["attrib", &gap]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("{b}"));
}

#[test]
fn check_passes_and_detects_injected_bug() {
    assert!(
        run(&["check", "all", "--trials", "1000", "--n", "5", "--seed", "1"])
            .status
            .success()
    );
    assert!(
        run(&["check", "strong-symmetry", "--n", "2", "--trials", "10000"])
            .status
            .success()
    );

    let o = run(&[
        "check",
        "all",
        "--trials",
        "50",
        "--n",
        "3",
        "--inject-negated-variance",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("witness for"));
    assert_eq!(run(&["check", "nonsense"]).status.code(), Some(2));
}

#[test]
fn check_json_report() {
    let o = run(&[
        "check", "dummy", "--trials", "20", "--n", "4", "--format", "json",
    ]);
    let v = json(&o);
    assert_eq!(v[0]["property"], "dummy");
    assert_eq!(v[0]["violation_count"], 0);
}

#[test]
fn sweep_majority_column() {
    let o = run(&["sweep", "majority", "--sizes", "3..201:2"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("N,V,R,scaled"));
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        let n: usize = cells[0].parse().unwrap();
        assert_eq!(cells[2], (n - 1).to_string());
    }
}

#[test]
fn sweep_market_matches_production() {
    let a = run(&["sweep", "market-trader", "--k", "0.5", "--sizes", "4..40:4"]);
    let b = run(&[
        "sweep",
        "production-capitalist",
        "--k",
        "0.5",
        "--sizes",
        "4..40:4",
    ]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sweep_writes_file_and_rejects_bad_sizes() {
    let path = tmp("sweep.csv", "");
    assert!(run(&[
        "sweep",
        "production-worker",
        "--sizes",
        "10,20",
        "-o",
        &path
    ])
    .status
    .success());
    assert!(std::fs::read_to_string(&path)
        .unwrap()
        .starts_with("N,V,R,scaled\n10,"));
    assert_eq!(
        run(&["sweep", "production-worker", "--k", "0.1", "--sizes", "4"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["sweep", "majority", "--sizes", "x"]).status.code(),
        Some(2)
    );
}

#[test]
fn probe_reports_witness() {
    let o = run(&[
        "probe", "--n", "3", "--trials", "500", "--seed", "2", "--format", "json",
    ]);
    assert!(o.status.success());
    let v = json(&o);
    assert!(v["worst_ratio"].as_f64().unwrap() > 0.0);
    assert_eq!(v["witness"]["g"].as_array().unwrap().len(), 8);
    assert_eq!(run(&["probe", "--n", "9"]).status.code(), Some(2));
}
