//! Acceptance suite: one test per top-level guarantee, each driving the
//! compiled binary end to end and printing a single `ACCEPTANCE … PASS/FAIL`
//! line (run with `--nocapture` to see the ledger). Tolerances are pinned
//! here, independently of the preset texts.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use serde_json::Value;

use pcnls_cli::presets;

struct PresetRun {
    manifest: Value,
    csv: String,
    elapsed: Duration,
}

fn run_preset(name: &str, dir: &Path) -> PresetRun {
    let out_dir = dir.join(name);
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_pcnls"))
        .args(["run", name, "--out", out_dir.to_str().unwrap()])
        .output()
        .expect("binary runs");
    let elapsed = start.elapsed();
    assert!(
        out.status.success(),
        "preset {name} failed (status {:?}):\n{}{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr),
    );
    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    let csv = fs::read_to_string(out_dir.join("results.csv")).unwrap();
    PresetRun { manifest, csv, elapsed }
}

/// Measured value of a named manifest assertion.
fn measured(run: &PresetRun, name: &str) -> f64 {
    run.manifest["assertions"]
        .as_array()
        .unwrap()
        .iter()
        .find(|a| a["name"] == name)
        .unwrap_or_else(|| panic!("assertion {name} missing"))["measured"]
        .as_f64()
        .unwrap()
}

fn column(run: &PresetRun, header: &str) -> Vec<f64> {
    let mut lines = run.csv.lines();
    let idx = lines
        .next()
        .unwrap()
        .split(',')
        .position(|h| h == header)
        .unwrap_or_else(|| panic!("column {header} missing"));
    lines
        .map(|l| l.split(',').nth(idx).unwrap().parse::<f64>().unwrap())
        .collect()
}

fn criterion(tag: &str, ok: bool, detail: &str) {
    println!("ACCEPTANCE {tag}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "ACCEPTANCE {tag} FAILED: {detail}");
}

#[test]
fn a01_free_propagator_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let run = run_preset("free-oracle", dir.path());
    let rel = measured(&run, "free_oracle_rel_l2");
    let ok = rel < 1e-8 && run.elapsed < Duration::from_secs(5);
    criterion(
        "01 free-propagator oracle",
        ok,
        &format!("rel L2 error {rel:.3e} < 1e-8, runtime {:.2?} < 5s", run.elapsed),
    );
}

#[test]
fn a02_mass_conservation() {
    let dir = tempfile::tempdir().unwrap();
    let run = run_preset("mass-conservation", dir.path());
    let drift = measured(&run, "mass_drift_max");
    criterion("02 mass conservation", drift < 1e-10, &format!("max drift {drift:.3e} < 1e-10"));
}

#[test]
fn a03_splitting_order() {
    let dir = tempfile::tempdir().unwrap();
    let mut ok = true;
    let mut details = Vec::new();
    for name in ["splitting-order-defocusing", "splitting-order-focusing", "splitting-order-2d"] {
        let run = run_preset(name, dir.path());
        let ratio = measured(&run, "drift_ratio_lower");
        ok &= (3.0..=5.0).contains(&ratio);
        details.push(format!("{name} {ratio:.3}"));
    }
    criterion("03 splitting order", ok, &format!("drift ratios in [3,5]: {}", details.join(", ")));
}

#[test]
fn a04_transform_isometry_and_involution() {
    let dir = tempfile::tempdir().unwrap();
    let run = run_preset("pc-involution", dir.path());
    let iso = measured(&run, "isometry_gap_max");
    let inv = measured(&run, "involution_gap_max");
    let trials = run.csv.lines().count() - 1;
    let ok = iso < 1e-10 && inv < 1e-9 && trials == 300;
    criterion(
        "04 transform isometry and involution",
        ok,
        &format!("isometry {iso:.3e} < 1e-10, involution {inv:.3e} < 1e-9, {trials} rows"),
    );
}

#[test]
fn a05_transformed_solution_residual() {
    let dir = tempfile::tempdir().unwrap();
    let run = run_preset("pc-solution-map", dir.path());
    let free = measured(&run, "free_residual");
    let nls = measured(&run, "nls_residual");
    let ratio = measured(&run, "wrong_sign_ratio");
    let ok = free < 1e-6 && nls < 1e-3 && ratio >= 10.0;
    criterion(
        "05 transformed-solution residual",
        ok,
        &format!("free {free:.3e} < 1e-6, nls {nls:.3e} < 1e-3, wrong-sign x{ratio:.1e} >= 10"),
    );
}

#[test]
fn a06_spacetime_norm_isometry() {
    let dir = tempfile::tempdir().unwrap();
    let run = run_preset("pc-spacetime-isometry", dir.path());
    let gap = measured(&run, "spacetime_gap");
    let gain = measured(&run, "refinement_gain");
    let ok = gap < 0.01 && gain <= 0.6;
    criterion(
        "06 spacetime-norm isometry",
        ok,
        &format!("slab gap {gap:.3e} < 1e-2, doubling shrinks it x{gain:.2} <= 0.6"),
    );
}

#[test]
fn a07_weighted_norm_scaling_law() {
    let dir = tempfile::tempdir().unwrap();
    let run = run_preset("gaussian-weighted-law", dir.path());
    let rel = measured(&run, "weighted_law_rel_error");
    let combos = run.csv.lines().count() - 1;
    let ok = rel < 1e-6 && combos == 9;
    criterion(
        "07 weighted-norm scaling law",
        ok,
        &format!("worst rel error {rel:.3e} < 1e-6 over {combos} combos"),
    );
}

#[test]
fn a08_transformed_flow_energy_constancy() {
    let dir = tempfile::tempdir().unwrap();
    let run = run_preset("virial-constancy", dir.path());
    let variations = column(&run, "energy_variation");
    let probes = column(&run, "probes");
    let spread = measured(&run, "ratio_family_spread");
    let reported = run.manifest["reported"]["energy_moment_ratio_mean"].as_f64().unwrap();
    let worst = variations.iter().copied().fold(0.0f64, f64::max);
    let ok = variations.len() == 5
        && probes.iter().all(|&p| p >= 8.0)
        && worst < 1e-3
        && spread < 0.01
        && reported.is_finite();
    criterion(
        "08 transformed-flow energy constancy",
        ok,
        &format!(
            "5 members, >=8 probes each, worst variation {worst:.3e} < 1e-3, \
             ratio spread {spread:.3e} < 1e-2, constant {reported:.6} reported"
        ),
    );
}

#[test]
fn a09_interpolation_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let run = run_preset("interp-bounds", dir.path());
    let bound = measured(&run, "product_bound_ratio");
    let lo = measured(&run, "equivalence_lower");
    let hi = measured(&run, "equivalence_upper");
    let drift = measured(&run, "node_refinement_drift");
    let trials = run.csv.lines().count() - 1;
    let ok = trials == 20 && bound <= 1.05 && lo >= 0.25 && hi <= 4.0 && drift <= 0.05;
    criterion(
        "09 interpolation bounds",
        ok,
        &format!(
            "20 mixtures, product-bound ratio {bound:.3} <= 1.05, \
             equivalence in [{lo:.3}, {hi:.3}] within [0.25, 4], node drift {drift:.2e} <= 0.05"
        ),
    );
}

#[test]
fn a10_transform_regularity_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let run = run_preset("transform-regularity-ratio", dir.path());
    let sup = measured(&run, "ratio_sup");
    let drift = measured(&run, "grid_refinement_drift");
    let ok = sup.is_finite() && sup < 5.0 && drift < 0.05;
    criterion(
        "10 transform-regularity ratio",
        ok,
        &format!("sup ratio {sup:.3} < 5, refinement drift {drift:.3e} < 5%"),
    );
}

#[test]
fn a11_norm_inflation_cascades() {
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let table = run_preset("illposed-linear-table", dir.path());
    let demo = run_preset("illposed-nls-demo", dir.path());
    let elapsed = start.elapsed();

    // the gridless table grows strictly in the term count at t = 1
    let growth = measured(&table, "norm_growth_in_k_at_unit_time");
    let rows = table.csv.lines().count() - 1;
    // the solver family shrinks on input and grows on output
    let shrink = measured(&demo, "input_norms_shrink");
    let grow = measured(&demo, "output_norms_grow");
    let ok = growth > 1.0
        && rows == 16
        && shrink < 1.0
        && grow > 1.0
        && elapsed < Duration::from_secs(600);
    criterion(
        "11 norm-inflation cascades",
        ok,
        &format!(
            "table growth x{growth:.2} > 1 over {rows} rows; demo input ratio {shrink:.3} < 1, \
             output ratio {grow:.3} > 1; runtime {elapsed:.2?} < 10min"
        ),
    );
}

#[test]
fn a12_composed_map_checks() {
    let dir = tempfile::tempdir().unwrap();
    let tind = run_preset("pipeline-tindependence", dir.path());
    let spread = measured(&tind, "handoff_spread");

    let growth = run_preset("growth-bounds", dir.path());
    let ratios = [
        measured(&growth, "weighted_growth_ratio"),
        measured(&growth, "transformed_leg_ratio"),
        measured(&growth, "perturbation_pair_ratio"),
    ];
    let worst_ratio = ratios.iter().copied().fold(0.0f64, f64::max);

    let limit = run_preset("regularized-limit", dir.path());
    let cutoffs = column(&limit, "cutoff_lo");
    let cauchy = measured(&limit, "cauchy_column_shrinks");

    let ok = spread < 1e-3 && worst_ratio < 2.0 && cauchy < 1.0 && cutoffs.contains(&8.0);
    criterion(
        "12 composed-map checks",
        ok,
        &format!(
            "handoff spread {spread:.3e} < 1e-3, growth/propagation ratios <= {worst_ratio:.3} < 2, \
             truncation Cauchy column shrinking x{cauchy:.3} < 1"
        ),
    );
}

#[test]
fn a13_scattering_extraction() {
    let dir = tempfile::tempdir().unwrap();
    let run = run_preset("scattering-ladder", dir.path());
    let residuals = column(&run, "extraction_residual");
    let final_res = *residuals.last().unwrap();
    let shrink = measured(&run, "residuals_shrink");
    let gaps = measured(&run, "cauchy_gaps_shrink");
    let ok = residuals.len() == 3 && final_res < 1e-2 && shrink < 1.0 && gaps < 1.0;
    criterion(
        "13 scattering extraction",
        ok,
        &format!(
            "3 horizons, final residual {final_res:.3e} < 1e-2, residual ratio {shrink:.3} < 1, \
             backward-state gaps ratio {gaps:.3} < 1"
        ),
    );
}

#[test]
fn a14_byte_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let mut ok = true;
    let mut checked = 0;
    for p in presets::all() {
        let out_a = dir.path().join(format!("{}-a", p.name));
        let out_b = dir.path().join(format!("{}-b", p.name));
        for (out_dir, threads) in [(&out_a, "1"), (&out_b, "4")] {
            let out = Command::new(env!("CARGO_BIN_EXE_pcnls"))
                .args(["run", p.name, "--out", out_dir.to_str().unwrap()])
                .env("PCNLS_THREADS", threads)
                .output()
                .expect("binary runs");
            assert!(out.status.success(), "{} failed", p.name);
        }
        let same = fs::read(out_a.join("results.csv")).unwrap()
            == fs::read(out_b.join("results.csv")).unwrap();
        if !same {
            println!("  results.csv differs for {}", p.name);
        }
        ok &= same;
        checked += 1;
    }
    criterion(
        "14 byte determinism",
        ok && checked == presets::all().len(),
        &format!("results.csv byte-identical across two runs of all {checked} presets"),
    );
}
