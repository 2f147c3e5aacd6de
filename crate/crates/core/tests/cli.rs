use std::path::PathBuf;
use std::process::Command;

use civ::criteria::parse_tuple;
use civ::estimator::{ols, tsls};
use civ::fixtures;
use civ::sem::{random_sem, sample, RandomSemConfig};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn civ(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_civ")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = civ(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    out
}

fn domain_error(args: &[&str], code: &str) {
    let (status, out, err) = civ(args);
    assert_eq!(status, 2, "{args:?}");
    assert!(out.is_empty());
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with(&format!("error:{code}: ")), "{err}");
}

#[test]
fn msep() {
    let g2a = fixture("g2a");
    let tilde = ["msep", "--graph", &g2a, "--s", "A", "--t", "Y", "--w", "", "--tilde", "--x", "X", "--y", "Y", "--json"];
    assert_eq!(ok(&tilde), "{\"separated\":true}\n");
    assert_eq!(ok(&["msep", "--graph", &g2a, "--s", "A", "--t", "X", "--json"]), "{\"separated\":false}\n");
    assert_eq!(ok(&["msep", "--graph", &g2a, "--s", "A", "--t", "X", "--w", "D", "--json"]), "{\"separated\":true}\n");
    assert_eq!(ok(&["msep", "--graph", &g2a, "--s", "A,B", "--t", "Y,C", "--w", "X"]), "not separated\n");
    assert_eq!(ok(&["msep", "--graph", "g2a", "--s", "C", "--t", "X"]), "separated\n");
}

#[test]
fn validate() {
    let g1b = fixture("g1b");
    assert_eq!(
        ok(&["validate", "--graph", &g1b, "--x", "X", "--y", "Y", "--z", "B", "--w", "C", "--json"]),
        "{\"valid\":true,\"conditions\":{\"i\":true,\"ii\":true,\"iii\":true}}\n"
    );
    assert_eq!(
        ok(&["validate", "--graph", &g1b, "--x", "X", "--y", "Y", "--z", "C", "--json"]),
        "{\"valid\":false,\"conditions\":{\"i\":true,\"ii\":true,\"iii\":false}}\n"
    );
    assert_eq!(
        ok(&["validate", "--graph", &g1b, "--x", "X", "--y", "Y", "--w", "C", "--json"]),
        "{\"valid\":false,\"conditions\":{\"i\":true,\"ii\":false,\"iii\":true}}\n"
    );
    let text = ok(&["validate", "--graph", &g1b, "--x", "X", "--y", "Y", "--z", "B", "--w", "C"]);
    assert!(text.starts_with("({B}, {C}) is valid\n"), "{text}");
    let g1a = fixture("g1a");
    assert_eq!(
        ok(&["validate", "--graph", &g1a, "--x", "X", "--y", "Y", "--z", "M", "--json"]),
        "{\"valid\":false,\"conditions\":{\"i\":false,\"ii\":true,\"iii\":false}}\n"
    );
}

#[test]
fn enumerate() {
    let g2b = fixture("g2b");
    assert_eq!(
        ok(&["enumerate", "--graph", &g2b, "--x", "X", "--y", "Y", "--json"]),
        "{\"count\":5,\"tuples\":[{\"Z\":[\"A\"],\"W\":[]},{\"Z\":[\"A\"],\"W\":[\"B\"]},{\"Z\":[\"A\"],\"W\":[\"B\",\"C\"]},{\"Z\":[\"B\"],\"W\":[]},{\"Z\":[\"A\",\"B\"],\"W\":[]}]}\n"
    );
    let restricted = ok(&["enumerate", "--graph", &g2b, "--x", "X", "--y", "Y", "--candidates", "A,C", "--json"]);
    assert_eq!(restricted, "{\"count\":1,\"tuples\":[{\"Z\":[\"A\"],\"W\":[]}]}\n");
    let text = ok(&["enumerate", "--graph", "g1b", "--x", "X", "--y", "Y"]);
    assert!(text.starts_with("21 valid tuples\n"));
    assert_eq!(text.lines().count(), 22);
    let g2a = fixture("g2a");
    let v: serde_json::Value = serde_json::from_str(&ok(&["enumerate", "--graph", &g2a, "--x", "X", "--y", "Y", "--json"])).unwrap();
    assert_eq!(v["count"], 34);
    domain_error(&["enumerate", "--graph", &g2a, "--x", "X", "--y", "Y", "--cap", "2"], "cap_exceeded");
}

#[test]
fn compare() {
    let g2a = fixture("g2a");
    assert_eq!(
        ok(&["compare", "--graph", &g2a, "--x", "X", "--y", "Y", "--first", "Z=D;W=A", "--second", "Z=D;W=", "--json"]),
        "{\"verdict\":\"SecondAtMostFirst\",\"forward\":[true,true,true,true],\"reverse\":[true,true,false,true]}\n"
    );
    let g1b = fixture("g1b");
    let text = ok(&["compare", "--graph", &g1b, "--x", "X", "--y", "Y", "--first", "Z=D;W=C", "--second", "Z=D;W=B,C"]);
    assert_eq!(text, "({D}, {C}) vs ({D}, {B, C}): no graphical ordering\n");
    domain_error(&["compare", "--graph", &g1b, "--x", "X", "--y", "Y", "--first", "Z=C;W=", "--second", "Z=D;W=C"], "invalid_tuple");
    domain_error(&["compare", "--graph", "g1a", "--x", "X", "--y", "Y", "--first", "Z=D;W=C", "--second", "Z=B;W=C"], "unreduced_graph");
}

#[test]
fn greedy() {
    let g1b = fixture("g1b");
    let base = ["greedy", "--graph", &g1b, "--x", "X", "--y", "Y", "--start", "Z=B;W=C"];
    let with = |extra: &[&str]| -> String {
        let mut a: Vec<&str> = base.to_vec();
        a.extend_from_slice(extra);
        ok(&a)
    };
    assert_eq!(
        with(&["--order", "D,A", "--json"]),
        "{\"order\":[\"D\",\"A\"],\"steps\":[{\"node_name\":\"D\",\"action\":\"AddedToZ\",\"reason\":{\"z_valid\":true,\"z_guard\":true,\"w_valid\":true,\"w_guard\":false}},{\"node_name\":\"A\",\"action\":\"AddedToZ\",\"reason\":{\"z_valid\":true,\"z_guard\":true,\"w_valid\":true,\"w_guard\":false}}],\"result\":{\"Z\":[\"A\",\"B\",\"D\"],\"W\":[\"C\"]}}\n"
    );
    let ad: serde_json::Value = serde_json::from_str(&with(&["--order", "A,D", "--json"])).unwrap();
    assert_eq!(ad["result"], serde_json::json!({"Z": ["B", "D"], "W": ["C"]}));
    assert_eq!(ad["steps"][0]["action"], "Discarded");
    assert_eq!(
        with(&["--order", "D,A", "--literal"]),
        "node     action     z_valid z_guard w_valid w_guard\n\
         D        Z             true    true    true   false\n\
         A        discarded     true   false    true   false\n\
         {\"Z\":[\"B\",\"D\"],\"W\":[\"C\"]}\n"
    );
    let default_order: serde_json::Value = serde_json::from_str(&with(&["--json"])).unwrap();
    assert_eq!(default_order["order"], serde_json::json!(["A", "D"]));
    domain_error(&["greedy", "--graph", &g1b, "--x", "X", "--y", "Y", "--start", "Z=B;W=C", "--order", "A"], "precondition");
}

#[test]
fn optimal() {
    let cases = [
        ("g1b", "{\"Z_opt\":[\"A\",\"B\",\"D\"],\"W_opt\":[\"C\"],\"valid\":true,\"certified\":true}\n"),
        ("g2a", "{\"Z_opt\":[\"B\",\"D\"],\"W_opt\":[\"C\"],\"valid\":true,\"certified\":true}\n"),
        ("g2b", "{\"Z_opt\":[\"A\"],\"W_opt\":[\"B\",\"C\"],\"valid\":true,\"certified\":true}\n"),
        ("g4a", "{\"Z_opt\":[],\"W_opt\":[\"A\",\"B\"],\"valid\":false,\"certified\":false}\n"),
        ("g4b", "{\"Z_opt\":[\"A\"],\"W_opt\":[\"B\",\"C\"],\"valid\":true,\"certified\":false}\n"),
    ];
    for (name, want) in cases {
        assert_eq!(ok(&["optimal", "--graph", &fixture(name), "--x", "X", "--y", "Y", "--json"]), want, "{name}");
    }
    assert_eq!(
        ok(&["optimal", "--graph", &fixture("g2a"), "--x", "X", "--y", "Y"]),
        "Z = {B, D}\nW = {C}\nvalid: true\ncertified: true\n"
    );
    domain_error(&["optimal", "--graph", &fixture("g1a"), "--x", "X", "--y", "Y"], "unreduced_graph");
    domain_error(&["optimal", "--graph", &fixture("g2a"), "--x", "Y", "--y", "X"], "no_causal_path");
}

#[test]
fn avar() {
    let (g2b, m1) = (fixture("g2b"), fixture("m1.json"));
    let want = [3.0, 6.0, 5.0, 6.0, 3.0];
    for (t, w) in ["Z=A;W=", "Z=A;W=B", "Z=A;W=B,C", "Z=B;W=", "Z=A,B;W="].iter().zip(want) {
        let args = ["avar", "--graph", &g2b, "--x", "X", "--y", "Y", "--sem", &m1, "--tuple", t, "--json"];
        let out = ok(&args);
        assert_eq!(out, ok(&args));
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!((v["avar_new"].as_f64().unwrap() - w).abs() < 1e-9, "{t}: {out}");
        assert!((v["avar_traditional"].as_f64().unwrap() - w).abs() < 1e-9, "{t}: {out}");
        assert_eq!(v["tau"], 1.0);
        assert!(v["avar_ols_if_adjustment"].is_null());
    }
    let seeded = ["avar", "--graph", "g2a", "--x", "X", "--y", "Y", "--seed", "3", "--tuple", "Z=B,D;W=C", "--json"];
    assert_eq!(ok(&seeded), ok(&seeded));
    let text = ok(&["avar", "--graph", "g2a", "--x", "X", "--y", "Y", "--seed", "3", "--tuple", "Z=B,D;W=C"]);
    assert!(text.starts_with("tuple ({B, D}, {C})\n"));
    domain_error(&["avar", "--graph", &g2b, "--x", "X", "--y", "Y", "--sem", &m1, "--tuple", "Z=C;W="], "invalid_tuple");
}

#[test]
fn avar_reports_least_squares_for_adjustment_sets() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chain");
    std::fs::write(&path, "node Z X Y\nZ -> X\nX -> Y\n").unwrap();
    let out = ok(&["avar", "--graph", path.to_str().unwrap(), "--x", "X", "--y", "Y", "--seed", "1", "--tuple", "Z=Z;W=", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let (iv, ls) = (v["avar_new"].as_f64().unwrap(), v["avar_ols_if_adjustment"].as_f64().unwrap());
    assert!(ls < iv);
}

#[test]
fn estimate() {
    let g = fixtures::g2a();
    let m = random_sem(&g, 8, &RandomSemConfig::default());
    let data = sample(&m, 400, 9);
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("data.csv");
    std::fs::write(&csv, data.to_csv()).unwrap();
    let csv = csv.to_str().unwrap();
    let (x, y) = (g.node("X").unwrap(), g.node("Y").unwrap());

    let t = parse_tuple(&g, "Z=B,D;W=C").unwrap();
    let want = serde_json::to_string(&tsls(&data, x, y, &t).unwrap()).unwrap() + "\n";
    assert_eq!(ok(&["estimate", "--data", csv, "--x", "X", "--y", "Y", "--tuple", "Z=B,D;W=C", "--json"]), want);

    let w = g.set(&["A", "B"]).unwrap();
    let want = serde_json::to_string(&ols(&data, x, y, &w).unwrap()).unwrap() + "\n";
    assert_eq!(ok(&["estimate", "--data", csv, "--x", "X", "--y", "Y", "--ols", "--w", "A,B", "--json"]), want);

    let text = ok(&["estimate", "--data", csv, "--x", "X", "--y", "Y", "--tuple", "Z=D;W="]);
    assert!(text.starts_with("estimate "));
    assert!(text.contains("n 400\n"));

    assert_eq!(civ(&["estimate", "--data", csv, "--x", "X", "--y", "Y"]).0, 1);
    assert_eq!(civ(&["estimate", "--data", csv, "--x", "X", "--y", "Y", "--tuple", "Z=D;W=", "--ols"]).0, 1);
    domain_error(&["estimate", "--data", csv, "--x", "X", "--y", "Y", "--tuple", "Z=;W=C"], "invalid_tuple");
    domain_error(&["estimate", "--data", csv, "--x", "X", "--y", "Q", "--tuple", "Z=D;W="], "unknown_node");
}

#[test]
fn simulate() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("one.csv");
    let out4 = dir.path().join("four.csv");
    let args = |jobs: &str, out: &PathBuf| -> Vec<String> {
        ["simulate", "--graph", "g2b", "--x", "X", "--y", "Y", "--models", "3", "--datasets", "4", "--sizes", "30,60", "--seed", "5", "--jobs", jobs, "--json", "--out"]
            .iter()
            .map(|s| s.to_string())
            .chain([out.to_string_lossy().into_owned()])
            .collect()
    };
    let a1 = args("1", &out1);
    let a4 = args("4", &out4);
    let j1 = ok(&a1.iter().map(String::as_str).collect::<Vec<_>>());
    let j4 = ok(&a4.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(j1, j4);
    let csv1 = std::fs::read_to_string(&out1).unwrap();
    assert_eq!(csv1, std::fs::read_to_string(&out4).unwrap());
    assert!(csv1.starts_with("graph,model_id,error_family,n,tuple,rmse,ratio_to_optimal,skipped\n"));
    // 5 tuples plus the baseline, 3 models, 2 sizes.
    assert_eq!(csv1.lines().count(), 1 + 6 * 3 * 2);

    let v: serde_json::Value = serde_json::from_str(&j1).unwrap();
    assert_eq!(v["optimal"], "Z=A;W=B,C");
    assert_eq!(v["summary"].as_array().unwrap().len(), 12);
    let keys: Vec<&str> = v["summary"][0].as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["tuple", "n", "geo_mean_ratio", "frac_ratio_lt_1"]);

    let no_ols = ok(&["simulate", "--graph", "g2b", "--x", "X", "--y", "Y", "--models", "1", "--datasets", "1", "--sizes", "50", "--no-ols", "--json"]);
    assert!(!no_ols.contains("OLS"));
    let text = ok(&["simulate", "--graph", "g2b", "--x", "X", "--y", "Y", "--models", "1", "--datasets", "1", "--sizes", "50"]);
    assert!(text.starts_with("reference tuple Z=A;W=B,C\n"));
    domain_error(&["simulate", "--graph", "g2b", "--x", "X", "--y", "Y", "--sizes", "ten"], "precondition");
}

#[test]
fn usage_and_input_errors() {
    assert_eq!(civ(&[]).0, 1);
    assert_eq!(civ(&["--help"]).0, 0);
    assert_eq!(civ(&["optimal", "--help"]).0, 0);
    assert_eq!(civ(&["msep", "--graph", "g2a", "--s", "A", "--t", "Y", "--tilde"]).0, 1);
    assert_eq!(civ(&["optimal", "--graph", "g2a", "--x", "X"]).0, 1);
    domain_error(&["optimal", "--graph", "/no/such/graph", "--x", "X", "--y", "Y"], "io");
    domain_error(&["msep", "--graph", "g2a", "--s", "A", "--t", "Q"], "unknown_node");
    domain_error(&["validate", "--graph", "g1b", "--x", "X", "--y", "Y", "--z", "B", "--w", "B"], "overlap");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("cyclic");
    std::fs::write(&bad, "A -> B\nB -> A\n").unwrap();
    domain_error(&["optimal", "--graph", bad.to_str().unwrap(), "--x", "A", "--y", "B"], "cycle");
    std::fs::write(&bad, "A => B\n").unwrap();
    domain_error(&["optimal", "--graph", bad.to_str().unwrap(), "--x", "A", "--y", "B"], "syntax");
}
