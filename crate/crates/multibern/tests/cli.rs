use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multibern")).args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn eval_quad() {
    let out = run(&["eval", "--kind", "cube", "--n", "20", "--dim", "1", "--function", "quad", "--point", "0.4", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out)["value"].as_f64().unwrap();
    assert!((v - 0.172).abs() <= 1e-12);
}

#[test]
fn deriv_prodlin_on_simplex() {
    let out = run(&["deriv", "--kind", "simplex", "--n", "8", "--dim", "2", "--function", "prodlin", "--k", "1,1", "--point", "0.2,0.3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((json(&out)["value"].as_f64().unwrap() - 0.875).abs() <= 1e-12);
}

#[test]
fn corpus_listing() {
    let out = run(&["corpus"]);
    let v = json(&out);
    let names: Vec<&str> = v["functions"].as_array().unwrap().iter().map(|f| f["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["const1", "affine", "quad", "prodlin", "sincos", "expsum"]);
    assert_eq!(v["functions"][0]["smoothness"], 4);
}

#[test]
fn mc_fields_and_zero_variance() {
    let out = run(&["mc", "--kind", "cube", "--n", "10", "--dim", "1", "--function", "quad", "--point", "1", "--samples", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for key in ["estimate", "std_error", "reference", "z_score"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["std_error"], 0.0);
    assert_eq!(v["z_score"], 0.0);
}

#[test]
fn lemma_check_tolerance_sets_exit_code() {
    let args = ["lemma-check", "--dim", "1", "--function", "sincos", "--point", "0.1", "--k", "2", "--z", "0.25"];
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["abs_diff"].as_f64().unwrap() <= 1e-6);
    assert!(v.get("lhs").is_some() && v.get("rhs").is_some());

    // a single node per level cannot resolve the integral
    let mut coarse = args.to_vec();
    coarse.extend(["--quad-points", "1", "--tol", "1e-12"]);
    let out = run(&coarse);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["pass"], false);
}

#[test]
fn converge_csv_and_json() {
    let out = run(&["converge", "--kind", "cube", "--dim", "1", "--function", "quad", "--n-list", "10,20,40,80", "--grid", "101"]);
    assert_eq!(out.status.code(), Some(0));
    let r = multibern::report::from_csv(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    let expect = [0.025, 0.0125, 0.00625, 0.003125];
    for ((_, e), want) in r.rows.iter().zip(expect) {
        assert!((e - want).abs() < 1e-9);
    }
    assert!((r.fitted_rate.unwrap() + 1.0).abs() < 1e-6);

    let out = run(&["converge", "--kind", "simplex", "--dim", "2", "--function", "affine", "--k", "1,0", "--n-list", "8,16", "--format", "json"]);
    let v = json(&out);
    assert!(v["fitted_rate"].is_null());
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn usage_errors_exit_two() {
    let out = run(&["eval", "--kind", "cube", "--n", "3", "--dim", "1", "--function", "nope", "--point", "0.4"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("sincos") && err.contains("expsum"));

    let out = run(&["deriv", "--kind", "cube", "--n", "3", "--dim", "2", "--function", "quad", "--point", "0.4,0.1", "--k", "1,x"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`x`"));

    let out = run(&["eval", "--kind", "cube", "--n", "3", "--dim", "2", "--function", "quad", "--point", "0.4"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--kind", "cube", "--n", "0", "--dim", "1", "--function", "quad", "--point", "0.4"]).status.code(), Some(2));
}

#[test]
fn domain_errors_exit_one() {
    let out = run(&["eval", "--kind", "simplex", "--n", "3", "--dim", "2", "--function", "quad", "--point", "0.7,0.7"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let out = run(&["converge", "--kind", "cube", "--dim", "1", "--function", "quad", "--n-list", "20,10"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["lemma-check", "--dim", "1", "--function", "quad", "--point", "0.1", "--k", "5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn clamps_boundary_roundoff() {
    let out = run(&["eval", "--kind", "simplex", "--n", "4", "--dim", "2", "--function", "affine", "--point", "0.5,0.5000000000001"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn model_cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.txt");
    let p = path.to_str().unwrap();
    let args = ["eval", "--kind", "simplex", "--n", "9", "--dim", "2", "--function", "sincos", "--point", "0.2,0.3", "--model-cache", p];
    let first = run(&args);
    assert!(path.exists());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# function=sincos\nsimplex 9 2\n"));
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);

    // a cache written for another function is rebuilt, not reused
    let other = run(&["eval", "--kind", "simplex", "--n", "9", "--dim", "2", "--function", "quad", "--point", "0.2,0.3", "--model-cache", p]);
    let direct = run(&["eval", "--kind", "simplex", "--n", "9", "--dim", "2", "--function", "quad", "--point", "0.2,0.3"]);
    assert_eq!(json(&other)["value"], json(&direct)["value"]);
}
