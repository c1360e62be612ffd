use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn mwb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mwb"))
        .args(args)
        .env_remove("MWB_THREADS")
        .output()
        .expect("mwb runs")
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf-8 output")
}

fn json_out(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).expect("JSON on stdout")
}

#[test]
fn phi_to_box_holds_globally() {
    let o = mwb(&["check", "--type", "global", "--class", "S4", "--max-worlds", "3", "--premise", "p", "--conclusion", "[]p"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("holds"));
}

#[test]
fn first_counterexample_golden() {
    let cex = fixture("cex1.json");
    let o = mwb(&["check", "--type", "global", "--frames", &cex, "--premise", "[]false", "--conclusion", "false", "--json", "--no-stats"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_out(&o), json!({"outcome": "holds"}));

    let o = mwb(&["check", "--type", "local", "--frames", &cex, "--premise", "[*][]false", "--conclusion", "false", "--json", "--no-stats"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(
        json_out(&o),
        json!({
            "outcome": "refuted",
            "witness": {"worlds": ["w", "u"], "relation": [["w", "u"]], "valuation": {}, "world": "u"}
        })
    );
}

#[test]
fn local_refutation_is_the_first_in_canonical_order() {
    let o = mwb(&["check", "--type", "local", "--class", "K", "--max-worlds", "2", "--premise", "p", "--conclusion", "[]p", "--json", "--no-stats"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(
        json_out(&o),
        json!({
            "outcome": "refuted",
            "witness": {"worlds": ["0", "1"], "relation": [["0", "1"]], "valuation": {"p": ["0"]}, "world": "0"}
        })
    );
}

#[test]
fn stats_are_reported_unless_disabled() {
    let o = mwb(&["check", "--type", "local", "--class", "K", "--max-worlds", "2", "--premise", "p", "--conclusion", "[]p", "--json"]);
    let v = json_out(&o);
    assert_eq!(v["stats"]["frames"], 5);
    assert!(v["stats"]["elapsed_ms"].is_u64());
}

#[test]
fn human_output_names_the_witness() {
    let o = mwb(&["counterexample", "--type", "local", "--frames", &fixture("cex1.json"), "--premise", "[*][]false", "--conclusion", "false", "--no-stats"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.starts_with("refuted\n"));
    assert!(text.contains("world:     u"));
    assert!(text.contains("relation:  w->u"));
}

#[test]
fn counterexample_reports_absence() {
    let o = mwb(&["counterexample", "--type", "global", "--class", "K", "--max-worlds", "2", "--premise", "p", "--conclusion", "[]p"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("no counterexample within the bound"));
}

#[test]
fn state_semantics() {
    let o = mwb(&["check", "--type", "informational", "--premise", "p & <>~p", "--conclusion", "false", "--json", "--no-stats"]);
    assert_eq!(o.status.code(), Some(0));
    let o = mwb(&["check", "--type", "update", "--premise", "<>~p", "--conclusion", "~p", "--json", "--no-stats"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(json_out(&o)["witness"]["state"].is_array());
    let o = mwb(&["check", "--type", "sequential-update", "--premise", "<>~p", "--premise", "p", "--conclusion", "<>~p"]);
    assert_eq!(o.status.code(), Some(1));
    let o = mwb(&["check", "--semantics", "update", "--premise", "p", "--premise", "<>~p", "--conclusion", "false"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn state_semantics_reject_frame_classes() {
    for kind in ["informational", "update", "sequential-update"] {
        let o = mwb(&["check", "--type", kind, "--class", "S5", "--conclusion", "p"]);
        assert_eq!(o.status.code(), Some(2), "{kind}");
        assert!(stderr(&o).contains("--class"));
    }
}

#[test]
fn classify_golden() {
    let o = mwb(&["classify", "--frame", &fixture("two_cycle.json")]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    let classes = &v["classes"];
    for (name, member) in [
        ("K", true), ("T", false), ("D", true), ("B", true), ("K4", false),
        ("KD4", false), ("S4", false), ("S5", false), ("K45", false), ("KD45", false),
    ] {
        assert_eq!(classes[name], member, "{name}");
    }
    for (_, holds) in v["global_properties"].as_object().unwrap() {
        assert_eq!(holds, true);
    }

    let v = json_out(&mwb(&["classify", "--frame", &fixture("cex1.json")]));
    assert_eq!(
        v["global_properties"],
        json!({
            "globally_isolated": true,
            "globally_transitive": true,
            "globally_euclidean": true,
            "globally_reflexive": false,
            "globally_inverse_reflexive": false,
            "globally_serial": false,
            "globally_symmetric": false,
            "globally_inverse_symmetric": true,
        })
    );
    assert_eq!(v["classes"]["K4"], true);
    assert_eq!(v["classes"]["D"], false);
}

#[test]
fn frame_file_with_several_frames() {
    let f = fixture("frames.json");
    let o = mwb(&["check", "--type", "global", "--frames", &f, "--premise", "p", "--conclusion", "[]p", "--json", "--no-stats"]);
    assert_eq!(o.status.code(), Some(0));
    let o = mwb(&["check", "--type", "local", "--frames", &f, "--premise", "p", "--conclusion", "[]p", "--json", "--no-stats"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json_out(&o)["witness"]["world"], "x");
    assert_eq!(json_out(&mwb(&["classify", "--frame", &f])).as_array().map(Vec::len), Some(2));
}

#[test]
fn translations() {
    let o = mwb(&["translate", "--pal", "p;q"]);
    assert_eq!(stdout(&o), "<p>q\n");
    let o = mwb(&["translate", "--pal", "p => q"]);
    assert_eq!(stdout(&o), "[]~<p>~q\n");
    let o = mwb(&["translate", "--reduce", "<p>[]q"]);
    assert_eq!(stdout(&o), "p & [](p -> p & q)\n");
    let o = mwb(&["translate", "p"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn parse_prints_canonical_form() {
    let o = mwb(&["parse", "p->q|r"]);
    assert_eq!(stdout(&o), "p -> q | r\n");
    let v = json_out(&mwb(&["parse", "--json", "[](p;q)"]));
    assert_eq!(v["fragment"], "Dynamic");
    assert_eq!(v["modal_depth"], 1);
    assert_eq!(v["atoms"], json!(["p", "q"]));
}

#[test]
fn input_errors_exit_2() {
    let o = mwb(&["parse", "p & (q"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("p & (q\n      ^"));

    let o = mwb(&["check", "--type", "local", "--class", "S9", "--conclusion", "p"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("S9"));

    let o = mwb(&["check", "--type", "local", "--frames", &fixture("missing.json"), "--conclusion", "p"]);
    assert_eq!(o.status.code(), Some(2));

    let tmp = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(tmp.path(), r#"{"worlds":["a"],"relation":[["a","b"]]}"#).unwrap();
    let o = mwb(&["classify", "--frame", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown world"));

    let o = mwb(&["check", "--type", "local", "--conclusion", "p"]);
    assert_eq!(o.status.code(), Some(2));

    let o = mwb(&["check", "--type", "informational", "--conclusion", "[*]p"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn resource_limits_exit_3() {
    let o = mwb(&["check", "--type", "local", "--class", "K", "--max-worlds", "9", "--conclusion", "p"]);
    assert_eq!(o.status.code(), Some(3));
    let o = mwb(&["verify", "--suite", "corr-named-8", "--max-worlds", "5", "--json", "--no-stats"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(json_out(&o)["checks"][0]["status"], "SKIPPED-LIMIT");
}

#[test]
fn verify_golden() {
    let o = mwb(&["verify", "--suite", "fact-cex-1", "--json", "--no-stats"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        json_out(&o),
        json!({
            "seed": 7,
            "random_classes": 200,
            "checks": [{
                "check": "fact-cex-1",
                "title": "closure-boxed premises fail without generated-subframe closure",
                "status": "PASS",
                "max_worlds": 2,
                "queries": 8,
                "discrepancy_count": 0,
                "discrepancies": [],
            }]
        })
    );
}

#[test]
fn verify_expected_failure_is_not_an_error() {
    let o = mwb(&["verify", "--suite", "fact-cd", "--json", "--no-stats"]);
    assert_eq!(o.status.code(), Some(0));
    let check = &json_out(&o)["checks"][0];
    assert_eq!(check["status"], "XFAIL");
    assert_eq!(check["discrepancy_count"], 1);
    assert_eq!(check["discrepancies"][0]["expected"], true);
    assert!(check["note"].as_str().unwrap().contains("two-cycle"));
}

#[test]
fn verify_rejects_unknown_ids() {
    let o = mwb(&["verify", "--suite", "fact-cex-1,no-such-check"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no-such-check"));
}

#[test]
fn verify_lists_the_registry() {
    let o = mwb(&["verify", "--list"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 22);
}

#[test]
fn identical_invocations_give_identical_json() {
    let args = ["verify", "--suite", "fact-cex-2,fact-raa", "--json", "--no-stats"];
    let a = mwb(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_mwb"))
        .args(args)
        .env("MWB_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
}
