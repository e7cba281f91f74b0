//! Randomized search for configurations with `|D| < 1` or `|D_S| < 1`.
//!
//! Sample `i` of a run with master seed `s` uses the seed
//! [`derive_seed`]`(s, i)`, so a report depends only on its inputs and not on
//! how the samples are scheduled across threads. Every record carries the
//! seed needed to regenerate its configuration.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::det::{check_guard, eval_d, eval_ds, DetReport, GUARD_RATIO};
use crate::error::{Error, Result};
use crate::geom::{ghat, random_config, random_symp_config, separation, Config, SymplecticConfig};
use crate::simplex::{axis_simplex, minimize, SimplexOptions};

/// Records below `1 - TOL_VIOLATION` are flagged as putative violations.
pub const TOL_VIOLATION: f64 = 1e-6;

/// Pass threshold for the `D_S = D(ghat)` sweep.
pub const REDUCTION_TOL: f64 = 1e-9;

/// The simplex objective picks up a quadratic penalty once the separation
/// ratio drops below this multiple of [`GUARD_RATIO`].
pub const BARRIER_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind {
    #[serde(rename = "AS")]
    As,
    #[serde(rename = "symplectic")]
    Symplectic,
}

impl Kind {
    pub fn min_size(self) -> usize {
        match self {
            Kind::As => 2,
            Kind::Symplectic => 1,
        }
    }
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Kind::As => "AS",
            Kind::Symplectic => "symplectic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Sample,
    Minimize,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Sample => "sample",
            Method::Minimize => "minimize",
        })
    }
}

/// Either kind of configuration. Deserializes from `{"points": ...}` or
/// `{"sym_points": ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AnyConfig {
    As(Config),
    Symplectic(SymplecticConfig),
}

impl AnyConfig {
    pub fn kind(&self) -> Kind {
        match self {
            AnyConfig::As(_) => Kind::As,
            AnyConfig::Symplectic(_) => Kind::Symplectic,
        }
    }

    /// `n` for plain configurations, `m` for symplectic ones.
    pub fn size(&self) -> usize {
        match self {
            AnyConfig::As(c) => c.len(),
            AnyConfig::Symplectic(sc) => sc.m(),
        }
    }

    pub fn coords(&self) -> Vec<f64> {
        match self {
            AnyConfig::As(c) => c.coords(),
            AnyConfig::Symplectic(sc) => sc.coords(),
        }
    }

    pub fn from_coords(kind: Kind, coords: &[f64]) -> Result<Self> {
        Ok(match kind {
            Kind::As => AnyConfig::As(Config::from_coords(coords)?),
            Kind::Symplectic => AnyConfig::Symplectic(SymplecticConfig::from_coords(coords)?),
        })
    }

    pub fn random(kind: Kind, size: usize, seed: u64) -> Result<Self> {
        Ok(match kind {
            Kind::As => AnyConfig::As(random_config(size, seed)?),
            Kind::Symplectic => AnyConfig::Symplectic(random_symp_config(size, seed)?),
        })
    }

    /// `D` or `D_S`.
    pub fn evaluate(&self) -> Result<DetReport> {
        match self {
            AnyConfig::As(c) => eval_d(c),
            AnyConfig::Symplectic(sc) => eval_ds(sc),
        }
    }

    /// Minimum separation over diameter of the points the determinant sees
    /// (the signed points for symplectic input). Errors if the guard fails.
    pub fn guard_margin(&self) -> Result<f64> {
        let (min_sep, diameter) = match self {
            AnyConfig::As(c) => check_guard(c.points())?,
            AnyConfig::Symplectic(sc) => check_guard(ghat(sc).points())?,
        };
        Ok(min_sep / diameter)
    }

    fn diameter(&self) -> f64 {
        match self {
            AnyConfig::As(c) => separation(c.points()).1,
            AnyConfig::Symplectic(sc) => separation(ghat(sc).points()).1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub kind: Kind,
    pub size: usize,
    pub seed: u64,
    pub abs_value: f64,
    pub log_abs: f64,
    /// Flattened `x1, y1, z1, x2, ...`.
    pub config: Vec<f64>,
    pub method: Method,
    /// Objective evaluations spent (`0` for plain samples).
    pub iterations: usize,
}

impl ProbeRecord {
    fn new(cfg: &AnyConfig, report: &DetReport, seed: u64, method: Method, iterations: usize) -> Self {
        ProbeRecord {
            kind: cfg.kind(),
            size: cfg.size(),
            seed,
            abs_value: report.abs,
            log_abs: report.log_abs(),
            config: cfg.coords(),
            method,
            iterations,
        }
    }

    pub fn configuration(&self) -> Result<AnyConfig> {
        AnyConfig::from_coords(self.kind, &self.config)
    }

    pub fn is_violation(&self, tol: f64) -> bool {
        self.abs_value < 1.0 - tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub samples: usize,
    pub violations: usize,
    pub tol_violation: f64,
    pub min_record: ProbeRecord,
    pub records: Vec<ProbeRecord>,
}

impl ProbeReport {
    /// Errors on an empty record list. The first record of smallest
    /// `abs_value` becomes `min_record`.
    pub fn from_records(records: Vec<ProbeRecord>, tol_violation: f64) -> Result<Self> {
        let min_record = records
            .iter()
            .reduce(|best, r| if r.abs_value < best.abs_value { r } else { best })
            .cloned()
            .ok_or_else(|| Error::invalid("empty probe report"))?;
        Ok(ProbeReport {
            samples: records.len(),
            violations: records.iter().filter(|r| r.is_violation(tol_violation)).count(),
            tol_violation,
            min_record,
            records,
        })
    }

    pub fn write_csv(&self, w: &mut dyn Write) -> io::Result<()> {
        let coords = self.min_record.config.len();
        write!(w, "kind,size,seed,method,iterations,abs_value,log_abs")?;
        for i in 0..coords / 3 {
            let k = i + 1;
            write!(w, ",x{k},y{k},z{k}")?;
        }
        writeln!(w)?;
        for r in &self.records {
            write!(
                w,
                "{},{},{},{},{},{:?},{:?}",
                r.kind, r.size, r.seed, r.method, r.iterations, r.abs_value, r.log_abs
            )?;
            for c in &r.config {
                write!(w, ",{c:?}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// SplitMix64 finalizer applied to the master seed and the sample index.
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(master_seed ^ mix(index))
}

fn check_probe_args(kind: Kind, size: usize, samples: usize) -> Result<()> {
    if size < kind.min_size() {
        return Err(Error::invalid(format!(
            "{kind} probes need size >= {}, got {size}",
            kind.min_size()
        )));
    }
    if samples < 1 {
        return Err(Error::invalid("samples must be at least 1"));
    }
    Ok(())
}

/// Evaluate `|D|` (or `|D_S|`) on `samples` random configurations.
/// Runs on the current rayon pool.
pub fn sample_probe(kind: Kind, size: usize, samples: usize, master_seed: u64, tol_violation: f64) -> Result<ProbeReport> {
    check_probe_args(kind, size, samples)?;
    let records = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(master_seed, i);
            let cfg = AnyConfig::random(kind, size, seed)?;
            let report = cfg.evaluate()?;
            Ok(ProbeRecord::new(&cfg, &report, seed, Method::Sample, 0))
        })
        .collect::<Result<Vec<_>>>()?;
    ProbeReport::from_records(records, tol_violation)
}

/// Simplex descent on `|D|` over the flattened coordinates of `start`.
///
/// Points that fail the guard score `+inf`; inside the guard the objective is
/// `|D| + (1 - margin / (BARRIER_FACTOR * GUARD_RATIO))^2` when the
/// separation ratio `margin` is below the barrier. The returned record is the
/// evaluated guard-passing point of smallest `|D|`, so it is never worse than
/// `start`. The initial simplex steps are drawn from `seed`.
pub fn minimize_abs(start: &AnyConfig, budget: usize, seed: u64) -> Result<ProbeRecord> {
    if budget < 1 {
        return Err(Error::invalid("budget must be at least 1"));
    }
    start.guard_margin()?;
    let start_report = start.evaluate()?;
    let kind = start.kind();
    let x0 = start.coords();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = start.diameter();
    let steps: Vec<f64> = (0..x0.len())
        .map(|_| {
            let h = 0.1 * scale * rng.random_range(0.5..1.5);
            if rng.random_bool(0.5) {
                h
            } else {
                -h
            }
        })
        .collect();

    let barrier = BARRIER_FACTOR * GUARD_RATIO;
    let mut best = (start.clone(), start_report);
    let objective = |x: &[f64]| -> f64 {
        let Ok(cfg) = AnyConfig::from_coords(kind, x) else {
            return f64::INFINITY;
        };
        let Ok(margin) = cfg.guard_margin() else {
            return f64::INFINITY;
        };
        let Ok(report) = cfg.evaluate() else {
            return f64::INFINITY;
        };
        let abs = report.abs;
        if abs < best.1.abs {
            best = (cfg, report);
        }
        if margin < barrier {
            abs + (1.0 - margin / barrier).powi(2)
        } else {
            abs
        }
    };
    let opts = SimplexOptions {
        budget,
        ..Default::default()
    };
    let result = minimize(objective, axis_simplex(&x0, &steps), &opts);
    let (cfg, report) = best;
    Ok(ProbeRecord::new(&cfg, &report, seed, Method::Minimize, result.evaluations))
}

/// `runs` simplex descents from random starts; run `i` draws its start and
/// its simplex from `derive_seed(master_seed, i)`.
pub fn minimize_probe(
    kind: Kind,
    size: usize,
    runs: usize,
    master_seed: u64,
    budget: usize,
    tol_violation: f64,
) -> Result<ProbeReport> {
    check_probe_args(kind, size, runs)?;
    let records = (0..runs as u64)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(master_seed, i);
            minimize_abs(&AnyConfig::random(kind, size, seed)?, budget, seed)
        })
        .collect::<Result<Vec<_>>>()?;
    ProbeReport::from_records(records, tol_violation)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionReport {
    pub m: usize,
    pub samples: usize,
    /// Largest `|D_S / D(ghat) - 1|` observed.
    pub max_rel_discrepancy: f64,
    /// Seed of the configuration attaining the maximum.
    pub worst_seed: u64,
    pub tol: f64,
    pub pass: bool,
}

/// Compare `D_S(x)` with `D(ghat(x))` on random symplectic configurations.
pub fn reduction_sweep(m: usize, samples: usize, master_seed: u64, tol: f64) -> Result<ReductionReport> {
    check_probe_args(Kind::Symplectic, m, samples)?;
    let diffs = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(master_seed, i);
            let sc = random_symp_config(m, seed)?;
            let ds = eval_ds(&sc)?.value;
            let d = eval_d(&ghat(&sc))?.value;
            Ok((ds.rel_diff(&d), seed))
        })
        .collect::<Result<Vec<_>>>()?;
    let (max_rel_discrepancy, worst_seed) = diffs
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 || b.0.is_nan() { b } else { a })
        .expect("samples >= 1");
    Ok(ReductionReport {
        m,
        samples,
        max_rel_discrepancy,
        worst_seed,
        tol,
        pass: max_rel_discrepancy <= tol,
    })
}
