use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const TENT: &str = r#"{"type":"pl","breakpoints":["0","1/2","1"],"values":["0","1","0"]}"#;
const FLIP: &str = r#"{"type":"pl","breakpoints":["0","1"],"values":["1","0"]}"#;

fn intdyn(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_intdyn"))
        .arg("analyze")
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn analyze(map: &str, analysis: &str, params: &str, out: &Path) -> Output {
    intdyn(&["--map", map, "--analysis", analysis, "--params", params], out)
}

fn report(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

#[test]
fn entropy_classify_on_the_tent() {
    let dir = tempfile::tempdir().unwrap();
    let o = analyze(TENT, "entropy-classify", "{}", dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(dir.path());
    assert_eq!(r["results"]["verdict"], "POSITIVE");
    assert_eq!(r["results"]["orbit"], serde_json::json!(["2/7", "4/7", "6/7"]));
    assert_eq!(r["request"]["params"]["max_n"], 8);
    assert!(r["timing"]["elapsed_ms"].is_u64());
}

#[test]
fn pattern_on_the_reflection_writes_growth_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = analyze(FLIP, "pattern", r#"{"cover":["[0,0.6)","(0.4,1]"]}"#, dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(dir.path());
    assert_eq!(r["results"]["growth"]["class"]["verdict"], "BOUNDED");
    let csv = std::fs::read_to_string(dir.path().join("growth.csv")).unwrap();
    assert!(csv.starts_with("n,p_star,tuple,bound\n"));
    assert_eq!(csv.lines().count(), 7);
    assert_eq!(r["sidecars"], serde_json::json!(["growth.csv"]));
}

#[test]
fn map_specs_load_from_files_and_reject_bad_values() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("tower.json");
    std::fs::write(&spec, r#"{"type":"tower","stage":4}"#).unwrap();
    let out = dir.path().join("t");
    let o = analyze(spec.to_str().unwrap(), "periodic", r#"{"dyadic":4}"#, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    assert_eq!(r["results"]["exact_period_set"], serde_json::json!([1, 2, 4, 8, 16]));

    let bad = r#"{"type":"pl","breakpoints":["0","1"],"values":["3/2","0"]}"#;
    let out = dir.path().join("bad");
    let o = analyze(bad, "orbit", r#"{"x":"0"}"#, &out);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(report(&out)["error"]["kind"], "input");

    let out = dir.path().join("syntax");
    let o = analyze(r#"{"type":"pl","breakpoints":["0","1"]"#, "orbit", r#"{"x":"0"}"#, &out);
    assert_eq!(o.status.code(), Some(2));
    let msg = report(&out)["error"]["message"].as_str().unwrap().to_string();
    assert!(msg.contains("line 1"), "{msg}");
}

#[test]
fn unknown_analysis_prints_usage() {
    let dir = tempfile::tempdir().unwrap();
    let o = analyze(TENT, "bogus", "{}", dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("possible values"), "{err}");
}

#[test]
fn unknown_parameters_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = analyze(TENT, "entropy-classify", r#"{"max_m":5}"#, dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(report(dir.path())["error"]["kind"], "parse");
}

#[test]
fn portion_intervals_are_rational_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let o = analyze(
        r#"{"type":"tower","stage":6}"#,
        "portion",
        r#"{"base":"0","depth":4,"horizon":1024}"#,
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(dir.path());
    let level1 = r["results"]["portion"]["intervals"][0].as_array().unwrap();
    assert_eq!(level1.len(), 2);
    for pair in level1 {
        let pair = pair.as_array().unwrap();
        assert_eq!(pair.len(), 2);
        for end in pair {
            end.as_str().unwrap().parse::<intdyn::Rational>().unwrap();
        }
    }
    assert_eq!(r["results"]["verification"]["failures"], serde_json::json!([]));
}

#[test]
fn reports_are_byte_stable_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let params = r#"{"mode":"entropy","cover":["[0,0.51)","(0.49,1]"],"n_max":6}"#;
    let strip = |p: &Path| {
        let mut v = report(p);
        v.as_object_mut().unwrap().remove("timing");
        serde_json::to_string(&v).unwrap()
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(analyze(TENT, "covers", params, &a).status.success());
    assert!(analyze(TENT, "covers", params, &b).status.success());
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(
        std::fs::read(a.join("entropy.csv")).unwrap(),
        std::fs::read(b.join("entropy.csv")).unwrap()
    );
}

#[test]
fn emitted_map_specs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    assert!(analyze(TENT, "orbit", r#"{"x":"1/5","steps":8}"#, &first)
        .status
        .success());
    let spec = serde_json::to_string(&report(&first)["request"]["map"]).unwrap();
    let second = dir.path().join("second");
    assert!(analyze(&spec, "orbit", r#"{"x":"1/5","steps":8}"#, &second)
        .status
        .success());
    assert_eq!(report(&first)["results"], report(&second)["results"]);
    assert_eq!(report(&first)["request"]["map"], report(&second)["request"]["map"]);
    let csv = std::fs::read_to_string(second.join("orbit.csv")).unwrap();
    assert!(csv.starts_with("t,x,coord\n0,1/5,0.2\n1,2/5,0.4\n"));
}

#[test]
fn budget_exhaustion_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let times: Vec<String> = (1..=13).map(|t| t.to_string()).collect();
    let params = format!(
        r#"{{"mode":"certificate","targets":["(0,1/4)","(3/4,1)"],"times":[{}]}}"#,
        times.join(",")
    );
    let o = analyze(TENT, "independence", &params, dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(report(dir.path())["error"]["kind"], "budget");
}

#[test]
fn precondition_failures_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let params = r#"{"mode":"complexity","cover":["[0,0.4)","(0.3,0.7)","(0.6,1]"]}"#;
    let o = analyze(TENT, "covers", params, dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(report(dir.path())["error"]["kind"], "precondition");
}

#[test]
fn independence_and_witness_analyses() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let o = analyze(
        TENT,
        "independence",
        r#"{"mode":"arithmetic","targets":["(0,1/4)","(3/4,1)"]}"#,
        &a,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(report(&a)["results"]["certificate"]["verified"], true);

    let w = dir.path().join("w");
    let o = analyze(
        TENT,
        "witness",
        r#"{"u":"1/4","v":"3/4","depth":3,"require_nonseparable":false}"#,
        &w,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&w);
    assert_eq!(r["results"]["leaves"], 16);
    assert_eq!(r["results"]["tree"]["anchors"].as_array().unwrap().len(), 4);

    let n = dir.path().join("n");
    let o = analyze(TENT, "witness", r#"{"u":"1/4","v":"3/4","depth":2}"#, &n);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn pairs_modes() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s");
    let o = analyze(
        TENT,
        "pairs",
        r#"{"mode":"scrambled","n":2,"horizon":256,"tol":0.001}"#,
        &s,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!report(&s)["results"]["found"].is_null());

    let c = dir.path().join("c");
    let o = analyze(
        r#"{"type":"tower","stage":8,"use_limit":true}"#,
        "pairs",
        r#"{"mode":"classify","x":"0","y":"0","horizon":512,"code":{"depth":4,"horizon":512}}"#,
        &c,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&c);
    assert_eq!(r["results"]["proximal"], true);
    assert_eq!(r["results"]["code_verdict"]["verdict"], "PROXIMAL_TO_DEPTH");

    let l = dir.path().join("l");
    let o = analyze(
        r#"{"type":"logistic","lambda":3.2}"#,
        "orbit",
        r#"{"x":"0.3","steps":200}"#,
        &l,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(report(&l)["provenance"]["exact"], false);
}

#[test]
fn thread_count_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, out: &Path| {
        Command::new(env!("CARGO_BIN_EXE_intdyn"))
            .env("INTDYN_THREADS", threads)
            .args(["analyze", "--map", TENT, "--analysis", "entropy-classify", "--out"])
            .arg(out)
            .output()
            .unwrap()
    };
    let a = dir.path().join("a");
    assert!(run("2", &a).status.success());
    assert_eq!(report(&a)["timing"]["threads"], 2);
    assert_eq!(run("0", &dir.path().join("b")).status.code(), Some(2));
}
