//! Acceptance criteria. Each test prints one `[PASS]`/`[FAIL]` line.
//!
//! Run with `cargo test -p asdet --test acceptance -- --nocapture` to see
//! the lines.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use asdet::det::{eval_d, eval_d_gauged, eval_ds};
use asdet::geom::{hopf, lift, random_config, random_symp_config, Transform};
use asdet::probe::{derive_seed, minimize_probe, reduction_sweep, sample_probe, AnyConfig, Kind, ProbeReport, TOL_VIOLATION};
use asdet::roots::verify_fold;
use asdet::scaled::ScaledComplex;
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(id: u32, name: &str, ok: bool, detail: String) {
    println!("[{}] criterion {id}: {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} ({name}) failed: {detail}");
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed < Duration::from_secs(limit_secs)
}

#[test]
fn c01_hopf_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let t = Instant::now();
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let p = normal_point(&mut rng).scale(rng.random_range(0.1..10.0));
        let err = (hopf(&lift(&p).unwrap()) - p).norm() / p.norm();
        worst = worst.max(err);
    }
    let dt = t.elapsed();
    verdict(
        1,
        "Hopf round trip",
        worst <= 1e-13 && within(dt, 1),
        format!("max rel err {worst:e} (tol 1e-13), {dt:?}"),
    );
}

#[test]
fn c02_gauge_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let t = Instant::now();
    let mut worst = 0.0f64;
    for n in 3..=6 {
        for k in 0..100 {
            let c = random_config(n, derive_seed(102, (n * 1000 + k) as u64)).unwrap();
            let base = eval_d(&c).unwrap().value;
            for _ in 0..10 {
                let phases: Vec<f64> = (0..n * n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
                let g = eval_d_gauged(&c, |a, b| phases[a * n + b]).unwrap().value;
                worst = worst.max(g.rel_diff(&base));
            }
        }
    }
    let dt = t.elapsed();
    verdict(
        2,
        "gauge invariance of D",
        worst <= 1e-11 && within(dt, 10),
        format!("max rel change {worst:e} (tol 1e-11), {dt:?}"),
    );
}

#[test]
fn c03_two_point_identity() {
    let mut worst = 0.0f64;
    for k in 0..1000 {
        let c = random_config(2, derive_seed(103, k)).unwrap();
        worst = worst.max(eval_d(&c).unwrap().value.rel_diff(&ScaledComplex::ONE));
    }
    verdict(3, "n = 2 identity", worst <= 1e-13, format!("max |D - 1| {worst:e} (tol 1e-13)"));
}

#[test]
fn c04_collinear_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut worst = 0.0f64;
    for k in 0..200 {
        let n = 3 + k % 4;
        let c = random_collinear(&mut rng, n);
        worst = worst.max(eval_d(&c).unwrap().value.rel_diff(&ScaledComplex::ONE));
    }
    verdict(4, "collinear identity", worst <= 1e-9, format!("max |D - 1| {worst:e} (tol 1e-9)"));
}

fn rel_abs(a: f64, b: f64) -> f64 {
    (a - b).abs() / b
}

#[test]
fn c05_invariance_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let t = Instant::now();
    let mut worst_d = 0.0f64;
    for n in 2..=8 {
        for k in 0..40 {
            let c = random_config(n, derive_seed(105, (n * 100 + k) as u64)).unwrap();
            let base = eval_d(&c).unwrap().abs;
            let transforms = [
                Transform::Translate(normal_point(&mut rng).scale(5.0)),
                random_rotation(&mut rng),
                Transform::Dilate(rng.random_range(0.01..100.0)),
                Transform::Permute(random_permutation(&mut rng, n)),
            ];
            for tr in &transforms {
                let moved = eval_d(&c.transform(tr).unwrap()).unwrap().abs;
                worst_d = worst_d.max(rel_abs(moved, base));
            }
        }
    }
    let mut worst_s = 0.0f64;
    for m in 1..=4 {
        for k in 0..40 {
            let sc = random_symp_config(m, derive_seed(1050, (m * 100 + k) as u64)).unwrap();
            let base = eval_ds(&sc).unwrap().abs;
            let transforms = [
                random_rotation(&mut rng),
                Transform::Dilate(rng.random_range(0.01..100.0)),
                Transform::Permute(random_permutation(&mut rng, m)),
                Transform::Negate(rng.random_range(0..m)),
            ];
            for tr in &transforms {
                let moved = eval_ds(&sc.transform(tr).unwrap()).unwrap().abs;
                worst_s = worst_s.max(rel_abs(moved, base));
            }
        }
    }
    let dt = t.elapsed();
    verdict(
        5,
        "invariance suite",
        worst_d <= 1e-9 && worst_s <= 1e-9 && within(dt, 30),
        format!("max rel change |D| {worst_d:e}, |D_S| {worst_s:e} (tol 1e-9), {dt:?}"),
    );
}

#[test]
fn c06_main_theorem() {
    let t = Instant::now();
    let mut worst = 0.0f64;
    let mut all_pass = true;
    for m in 1..=4 {
        let r = reduction_sweep(m, 1000, 106 + m as u64, 1e-9).unwrap();
        worst = worst.max(r.max_rel_discrepancy);
        all_pass &= r.pass;
    }
    let dt = t.elapsed();
    verdict(
        6,
        "D_S(x) = D(ghat(x))",
        all_pass && worst <= 1e-9 && within(dt, 60),
        format!("max rel discrepancy {worst:e} over m = 1..4 (tol 1e-9), {dt:?}"),
    );
}

#[test]
fn c07_root_system_identity() {
    let t = Instant::now();
    let mut failures = Vec::new();
    for m in 1..=12 {
        let r = verify_fold(m).unwrap();
        let short_expected = if m == 1 { 0 } else { 2 };
        let ok = r.set_equal
            && r.zero_images == 0
            && r.long_mult == 1
            && r.short_mult == short_expected
            && r.a_size == 4 * m * m - 2 * m
            && r.a_size == 2 * m + 2 * (2 * m * (m - 1));
        if !ok {
            failures.push(m);
        }
    }
    let dt = t.elapsed();
    verdict(
        7,
        "g*(A) = C",
        failures.is_empty() && within(dt, 1),
        format!("m = 1..12, failures {failures:?}, {dt:?}"),
    );
}

fn reproduces(report: &ProbeReport, budget: Option<usize>) -> bool {
    let r = &report.min_record;
    let Ok(start) = AnyConfig::random(r.kind, r.size, r.seed) else {
        return false;
    };
    let again = match budget {
        None => start.evaluate().map(|d| (start.coords(), d.abs)),
        Some(b) => asdet::probe::minimize_abs(&start, b, r.seed).map(|rec| (rec.config, rec.abs_value)),
    };
    again.is_ok_and(|(coords, abs)| coords == r.config && abs == r.abs_value)
}

#[test]
fn c08_conjecture_two_evidence() {
    let t = Instant::now();
    let mut lines = Vec::new();
    let mut violations = 0;
    let mut reproducible = true;
    let runs: [(Kind, usize); 5] = [(Kind::As, 3), (Kind::As, 4), (Kind::As, 5), (Kind::Symplectic, 2), (Kind::Symplectic, 3)];
    for (kind, size) in runs {
        let r = sample_probe(kind, size, 100_000, 108, TOL_VIOLATION).unwrap();
        violations += r.violations;
        reproducible &= reproduces(&r, None);
        lines.push(format!(
            "sample {kind} size {size}: min {:?} (seed {})",
            r.min_record.abs_value, r.min_record.seed
        ));
    }
    for (kind, size) in [(Kind::As, 4), (Kind::Symplectic, 2)] {
        let r = minimize_probe(kind, size, 100, 1080, 2000, TOL_VIOLATION).unwrap();
        violations += r.violations;
        reproducible &= reproduces(&r, Some(2000));
        lines.push(format!(
            "minimize {kind} size {size} x100: min {:?} (seed {})",
            r.min_record.abs_value, r.min_record.seed
        ));
    }
    let dt = t.elapsed();
    for l in &lines {
        println!("    {l}");
    }
    verdict(
        8,
        "Conjecture 2 evidence",
        violations == 0 && reproducible && within(dt, 600),
        format!("{violations} violations at tol 1e-6, minima reproducible: {reproducible}, {dt:?}"),
    );
}

#[test]
fn c09_tetrahedron_regression() {
    let got = eval_d(&unit_tetrahedron()).unwrap().abs;
    let err = (got - TETRAHEDRON_ABS_D).abs();
    verdict(
        9,
        "regular tetrahedron |D|",
        err <= 1e-10,
        format!("|D| = {got:?}, oracle {TETRAHEDRON_ABS_D}, diff {err:e} (tol 1e-10)"),
    );
}

fn probe_csv(args: &[&str], threads: &str) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_asdet"))
        .args(args)
        .args(["--csv", "--threads", threads])
        .env_remove("AS_DET_SEED")
        .output()
        .expect("run asdet");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

#[test]
fn c10_determinism_across_threads() {
    let commands: [&[&str]; 3] = [
        &["probe", "--n", "5", "--samples", "2000", "--seed", "77"],
        &["probe", "--m", "3", "--samples", "2000", "--seed", "78"],
        &["minimize", "--n", "4", "--samples", "8", "--budget", "500", "--seed", "79"],
    ];
    let mut identical = true;
    for args in commands {
        let reference = probe_csv(args, "1");
        for threads in ["1", "2", "4", "8"] {
            identical &= probe_csv(args, threads) == reference;
        }
    }
    verdict(
        10,
        "byte-identical probe CSV across --threads",
        identical,
        format!("{} commands x threads 1,1,2,4,8", commands.len()),
    );
}
