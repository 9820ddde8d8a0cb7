use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn example_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tempeval")).args(args).env_remove("TEMPOEVAL_COLOR").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn p(path: &Path) -> String {
    path.display().to_string()
}

const HEADER: &str = r#"<?xml version="1.0" ?>
<TimeML>
"#;

fn tml(doc_id: &str, text: &str, links: &str) -> String {
    format!(
        "{HEADER}<DOCID>{doc_id}</DOCID>\n<DCT><TIMEX3 tid=\"t0\" type=\"DATE\" value=\"2013-01-01\" functionInDocument=\"CREATION_TIME\">2013-01-01</TIMEX3></DCT>\n<TEXT>{text}</TEXT>\n{links}</TimeML>\n"
    )
}

const ABC: &str = r#"<EVENT eid="e1" eiid="A" class="OCCURRENCE">a</EVENT> <EVENT eid="e2" eiid="B" class="OCCURRENCE">b</EVENT> <EVENT eid="e3" eiid="C" class="OCCURRENCE">c</EVENT>"#;

fn link(lid: &str, a: &str, rel: &str, b: &str) -> String {
    format!("<TLINK lid=\"{lid}\" relType=\"{rel}\" eventInstanceID=\"{a}\" relatedToEventInstance=\"{b}\"/>\n")
}

#[test]
fn validate_exit_codes() {
    let ok = run(&["validate", &p(&example_dir())]);
    assert_eq!(code(&ok), 0, "{}", stdout(&ok));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tml");
    fs::write(&bad, tml("x", "text", "").replace("<DOCID>x</DOCID>\n", "")).unwrap();
    let out = run(&["validate", &p(&bad)]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("MISSING_DOCID"));

    let out = run(&["--json", "validate", &p(&bad)]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["errors"], 1);
    assert_eq!(json["files"][0]["issues"][0]["code"], "MISSING_DOCID");

    let out = run(&["validate", &p(&dir.path().join("missing.tml"))]);
    assert_eq!(code(&out), 3);
}

#[test]
fn gold_profile_flags_event_without_dct_link() {
    let out = run(&["validate", "--profile", "gold", &p(&example_dir())]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("WARNING EVENT_MISSING_DCT_LINK XIN_ENG_20061119.0021:ei2"), "{text}");
    assert!(!text.contains(":ei1 "));
    let quiet = run(&["--quiet", "validate", "--profile", "gold", &p(&example_dir())]);
    assert!(!stdout(&quiet).contains("EVENT_MISSING_DCT_LINK"));
}

#[test]
fn self_score_is_perfect() {
    let reference = p(&fixtures().join("toy/reference"));
    let out = run(&["--json", "score", "--reference", &reference, "--response", &reference, "--all-attributes"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for (name, prf) in json["metrics"].as_object().unwrap() {
        assert_eq!(prf["f1"], 1.0, "{name}");
    }
    assert_eq!(json["awareness"]["f1"], 1.0);
    assert_eq!(json["documents"], 2);
}

#[test]
fn missing_response_document_counts_as_missed() {
    let dir = tempfile::tempdir().unwrap();
    let response = dir.path().join("response");
    fs::create_dir(&response).unwrap();
    fs::copy(fixtures().join("toy/reference/toy2.tml"), response.join("toy2.tml")).unwrap();
    let out = run(&["--json", "score", "--reference", &p(&fixtures().join("toy/reference")), "--response", &p(&response)]);
    assert_eq!(code(&out), 0);
    assert!(stderr(&out).contains("toy1"), "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let extent = &json["metrics"]["event_extent"];
    // toy2 has 3 events, toy1 has 4 that were missed.
    assert_eq!((extent["tp"].as_u64(), extent["fn"].as_u64()), (Some(3), Some(4)));
}

#[test]
fn task_c_without_links_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    for side in ["ref", "resp"] {
        fs::create_dir(dir.path().join(side)).unwrap();
        fs::write(dir.path().join(side).join("d.tml"), tml("d", ABC, "")).unwrap();
    }
    let out = run(&["score", "--task", "C", "--reference", &p(&dir.path().join("ref")), "--response", &p(&dir.path().join("resp"))]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("no temporal links"), "{}", stderr(&out));
}

fn write_config(dir: &Path, best: &str) -> PathBuf {
    let toy = fixtures().join("toy");
    let config = serde_json::json!({
        "systems": [
            { "name": "TIPSem", "weight": 0.36, "path": p(&toy.join("tipsem")) },
            { "name": "TIPSemB", "weight": 0.32, "path": p(&toy.join("tipsemb")) },
            { "name": "TRIOS", "weight": 0.32, "path": p(&dir.join("trios")) },
        ],
        "best_system": best,
        "support_threshold": 2,
    });
    let path = dir.join("config.json");
    fs::write(&path, config.to_string()).unwrap();
    path
}

#[test]
fn merge_configuration_and_coverage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let trios = dir.path().join("trios");
    fs::create_dir(&trios).unwrap();
    fs::copy(fixtures().join("toy/trios/toy1.tml"), trios.join("toy1.tml")).unwrap();

    let out_dir = p(&dir.path().join("out"));
    let unknown = write_config(dir.path(), "HeidelTime");
    let out = run(&["merge", "--config", &p(&unknown), "--out", &out_dir]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("HeidelTime"));

    let config = write_config(dir.path(), "TIPSem");
    let out = run(&["merge", "--config", &p(&config), "--out", &out_dir]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("TRIOS lacks toy2"), "{}", stderr(&out));

    fs::copy(fixtures().join("toy/trios/toy2.tml"), trios.join("toy2.tml")).unwrap();
    let out = run(&["--json", "merge", "--config", &p(&config), "--out", &out_dir]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["documents"].as_array().unwrap().len(), 2);

    let out = run(&["merge", "--config", &p(&dir.path().join("nope.json")), "--out", &out_dir]);
    assert_eq!(code(&out), 3);
}

#[test]
fn closure_check_and_emit() {
    let dir = tempfile::tempdir().unwrap();
    let consistent = dir.path().join("ok.tml");
    let chain = [link("l1", "A", "BEFORE", "B"), link("l2", "B", "BEFORE", "C"), link("l3", "A", "BEFORE", "C")].concat();
    fs::write(&consistent, tml("ok", ABC, &chain)).unwrap();
    let out = run(&["closure", &p(&consistent), "--check"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("consistent"));

    let cycle = dir.path().join("cycle.tml");
    fs::write(&cycle, tml("cycle", ABC, &[link("l1", "A", "BEFORE", "B"), link("l2", "B", "BEFORE", "A")].concat())).unwrap();
    let out = run(&["closure", &p(&cycle), "--check"]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.contains("inconsistent") && text.contains("l1") && text.contains("l2"), "{text}");

    let out = run(&["closure", &p(&consistent), "--emit", "--reduced"]);
    assert_eq!(code(&out), 0);
    let emitted = stdout(&out);
    assert_eq!(emitted.matches("<TLINK").count(), 2, "{emitted}");
    assert!(!emitted.contains(r#"lid="l3""#));

    let out = run(&["closure", &p(&consistent), "--emit"]);
    assert_eq!(stdout(&out).matches("<TLINK").count(), 3);

    let out = run(&["closure", &p(&consistent)]);
    assert_eq!(code(&out), 2);
}

#[test]
fn stats_counts() {
    let out = run(&["--json", "stats", &p(&example_dir())]);
    assert_eq!(code(&out), 0);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let s = &json[0];
    assert_eq!(
        (&s["documents"], &s["events"], &s["timexes"], &s["dcts"], &s["links"]),
        (&1.into(), &2.into(), &0.into(), &1.into(), &2.into())
    );
    assert_eq!(s["relations"]["NONE"], 2);

    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.tml"), tml("a", "", "")).unwrap();
    let out = run(&["--json", "stats", &p(dir.path())]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json[0]["tokens"], 0);

    // Three documents counted by hand: 3 + 2 + 5 tokens, 3 + 0 + 1 events.
    fs::write(dir.path().join("a.tml"), tml("a", ABC, &link("l1", "A", "BEFORE", "B"))).unwrap();
    fs::write(dir.path().join("b.tml"), tml("b", "two words", "")).unwrap();
    fs::write(
        dir.path().join("c.tml"),
        tml("c", r#"one <EVENT eid="e1" eiid="ei1" class="STATE">two</EVENT> three <TIMEX3 tid="t1" type="DATE" value="2013">2013</TIMEX3>  five"#, ""),
    )
    .unwrap();
    let out = run(&["--json", "stats", &p(dir.path())]);
    let s = &serde_json::from_slice::<serde_json::Value>(&out.stdout).unwrap()[0];
    assert_eq!(s["documents"], 3);
    assert_eq!(s["tokens"], 10);
    assert_eq!(s["events"], 4);
    assert_eq!(s["timexes"], 1);
    assert_eq!(s["dcts"], 3);
    assert_eq!(s["links"], 1);
    assert_eq!(s["relations"]["BEFORE"], 1);
}

#[test]
fn color_follows_environment() {
    let args = ["stats", &p(&example_dir())];
    let plain = Command::new(env!("CARGO_BIN_EXE_tempeval")).args(args).env("TEMPOEVAL_COLOR", "0").output().unwrap();
    let colored = Command::new(env!("CARGO_BIN_EXE_tempeval")).args(args).env("TEMPOEVAL_COLOR", "1").output().unwrap();
    assert!(!stdout(&plain).contains('\x1b'));
    assert!(stdout(&colored).contains("\x1b["));
}

#[test]
fn jobs_flag_does_not_change_results() {
    let reference = p(&fixtures().join("toy/reference"));
    let one = run(&["--jobs", "1", "score", "--reference", &reference, "--response", &reference]);
    let many = run(&["--jobs", "4", "score", "--reference", &reference, "--response", &reference]);
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, many.stdout);
    assert_eq!(code(&run(&["--jobs", "0", "stats", &reference])), 2);
}
