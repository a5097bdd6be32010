//! End-to-end tests of the `pcnls` binary: argument handling, exit codes,
//! config diagnostics, artifact shape, and byte-level determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pcnls_cli::config::parse_config;
use pcnls_cli::presets;

fn pcnls(args: &[&str], envs: &[(&str, &str)]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcnls"))
        .args(args)
        .envs(envs.iter().map(|(k, v)| (k.to_string(), v.to_string())))
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn list_presets_is_nonempty_and_matches_catalog() {
    let out = pcnls(&["list-presets"], &[]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), presets::all().len());
    for p in presets::all() {
        assert!(text.contains(p.name), "missing {}", p.name);
    }
    assert!(text.contains("pc-involution"));
    assert!(text.contains("illposed-linear-table"));
}

#[test]
fn describe_echoes_a_runnable_config() {
    let out = pcnls(&["describe", "scattering-ladder"], &[]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("scattering-ladder — "));
    let config_part = text.split_once("\n\n").expect("summary separator").1;
    let cfg = parse_config(config_part).expect("describe output parses");
    assert_eq!(cfg.name, "scattering-ladder");
    assert_eq!(cfg.points, 8192);
    // defaults are echoed explicitly
    assert!(config_part.contains("tol_residual = 1e-2"));
}

#[test]
fn describe_unknown_preset_fails() {
    let out = pcnls(&["describe", "not-a-preset"], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("list-presets"));
}

#[test]
fn run_unknown_target_exits_two() {
    let out = pcnls(&["run", "definitely-missing"], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("neither a config file nor a preset"));
}

#[test]
fn malformed_config_reports_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");

    // a syntax error carries its line number
    let broken = presets::find("free-oracle").unwrap().config.replace("points = 512", "points @ 512");
    fs::write(&path, &broken).unwrap();
    let out = pcnls(&["run", path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("line 7"), "missing line number: {err}");

    // a missing required field names the field and section
    let missing = presets::find("free-oracle").unwrap().config.replace("dt = 1e-3\n", "");
    fs::write(&path, &missing).unwrap();
    let out = pcnls(&["run", path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("`dt` in [solver]"));

    // the derived exponent cannot be pinned by hand
    let pinned = presets::find("free-oracle").unwrap().config.replace("amplitude = 0.8", "rho = 1.0");
    fs::write(&path, &pinned).unwrap();
    let out = pcnls(&["run", path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("derived from the dimension"));

    // unknown params are rejected by the runner with the experiment name
    let unknown = presets::find("free-oracle").unwrap().config.replace("amplitude = 0.8", "amplitudd = 0.8");
    fs::write(&path, &unknown).unwrap();
    let out = pcnls(&["run", path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown param `amplitudd`"));
}

#[test]
fn assertion_failure_exits_three_and_still_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("strict.cfg");
    let strict = presets::find("free-oracle")
        .unwrap()
        .config
        .replace("tol_rel_l2 = 1e-8", "tol_rel_l2 = 1e-18");
    fs::write(&path, strict).unwrap();
    let out_dir = dir.path().join("artifacts");
    let out = pcnls(
        &["run", path.to_str().unwrap(), "--out", out_dir.to_str().unwrap()],
        &[],
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("FAIL free_oracle_rel_l2"));
    let manifest = fs::read_to_string(out_dir.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"passed\": false"));
    assert!(out_dir.join("results.csv").is_file());
}

#[test]
fn run_writes_csv_manifest_and_optional_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("oracle.cfg");
    let with_snaps = presets::find("free-oracle")
        .unwrap()
        .config
        .replace("dir = out/free-oracle", &format!("dir = {}\nsnapshots = true", dir.path().join("o").display()));
    fs::write(&path, with_snaps).unwrap();
    let out = pcnls(&["run", path.to_str().unwrap()], &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let base = dir.path().join("o");
    let csv = fs::read_to_string(base.join("results.csv")).unwrap();
    assert!(csv.starts_with("t_end,rel_l2_error,mass_drift\n"));
    assert_eq!(csv.lines().count(), 2);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(base.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["experiment"]["name"], "free-oracle");
    assert_eq!(manifest["experiment"]["rho"], 1.0);
    assert_eq!(manifest["experiment"]["grid"]["points"], 512);
    assert_eq!(manifest["tool"]["name"], "pcnls");
    assert_eq!(manifest["passed"], true);
    assert!(manifest["assertions"].as_array().unwrap().len() == 1);
    assert!(base.join("final.snap").is_file());
    assert!(base.join("exact.snap").is_file());
}

#[test]
fn preset_runs_are_byte_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("det");
    let arg = out_dir.to_str().unwrap();
    let first = pcnls(&["run", "free-oracle", "--out", arg], &[("PCNLS_THREADS", "1")]);
    assert!(first.status.success(), "{}", stderr(&first));
    let csv1 = fs::read(out_dir.join("results.csv")).unwrap();
    let man1 = fs::read(out_dir.join("manifest.json")).unwrap();
    let second = pcnls(&["run", "free-oracle", "--out", arg], &[("PCNLS_THREADS", "4")]);
    assert!(second.status.success());
    assert_eq!(csv1, fs::read(out_dir.join("results.csv")).unwrap());
    assert_eq!(man1, fs::read(out_dir.join("manifest.json")).unwrap());
}

#[test]
fn linear_table_preset_emits_sixteen_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("table");
    let out = pcnls(&["run", "illposed-linear-table", "--out", out_dir.to_str().unwrap()], &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(out_dir.join("results.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "k_max,t,norm,norm_at_zero,lower_bound");
    assert_eq!(lines.count(), 16);
}

#[test]
fn every_preset_name_resolves_and_describe_round_trips() {
    for p in presets::all() {
        let out = pcnls(&["describe", p.name], &[]);
        assert!(out.status.success(), "{}", p.name);
        let text = stdout(&out);
        let config_part = text.split_once("\n\n").unwrap().1;
        assert_eq!(config_part, p.config, "describe echoes the stored config for {}", p.name);
    }
}

#[test]
fn out_dir_default_comes_from_the_config() {
    // running a preset without --out places artifacts under the declared dir;
    // use a scratch copy so the repo stays clean.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("oracle.cfg");
    let declared = dir.path().join("declared-out");
    let text = presets::find("free-oracle")
        .unwrap()
        .config
        .replace("dir = out/free-oracle", &format!("dir = {}", declared.display()));
    fs::write(&path, text).unwrap();
    let out = pcnls(&["run", path.to_str().unwrap()], &[]);
    assert!(out.status.success());
    assert!(Path::new(&declared).join("results.csv").is_file());
}
