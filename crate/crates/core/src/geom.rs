//! Points, configurations and the Hopf fibration `C^2 \ 0 -> R^3 \ 0`.

use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::det::check_guard;
use crate::error::{Error, Result};

/// Tolerance on `R^T R = I` and `det R = 1` for rotation transforms.
pub const ROTATION_TOL: f64 = 1e-12;

/// Maximum number of draws `random_config` makes before giving up.
const MAX_RESAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point {
    pub const ORIGIN: Point = Point::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (*other - *self).norm()
    }

    pub fn scale(&self, s: f64) -> Point {
        Point::new(s * self.x, s * self.y, s * self.z)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    fn rotate(&self, r: &[[f64; 3]; 3]) -> Point {
        let v = self.to_array();
        let row = |i: usize| r[i][0] * v[0] + r[i][1] * v[1] + r[i][2] * v[2];
        Point::new(row(0), row(1), row(2))
    }
}

impl From<[f64; 3]> for Point {
    fn from(a: [f64; 3]) -> Self {
        Point::new(a[0], a[1], a[2])
    }
}

impl From<Point> for [f64; 3] {
    fn from(p: Point) -> Self {
        p.to_array()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y, -self.z)
    }
}

/// A nonzero pair `(u, v)` in `C^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor {
    u: Complex64,
    v: Complex64,
}

impl Spinor {
    pub fn new(u: Complex64, v: Complex64) -> Result<Self> {
        if !(u.is_finite() && v.is_finite()) {
            return Err(Error::invalid("spinor components must be finite"));
        }
        if u == Complex64::new(0.0, 0.0) && v == Complex64::new(0.0, 0.0) {
            return Err(Error::invalid("zero spinor has no Hopf image"));
        }
        Ok(Spinor { u, v })
    }

    pub fn u(&self) -> Complex64 {
        self.u
    }

    pub fn v(&self) -> Complex64 {
        self.v
    }

    /// `|u|^2 + |v|^2`, which equals `|hopf(self)|`.
    pub fn norm_sqr(&self) -> f64 {
        self.u.norm_sqr() + self.v.norm_sqr()
    }

    /// The quaternionic partner `(-conj v, conj u)`. Its Hopf image is
    /// `-hopf(self)`, and its pair determinant with `self` is `|u|^2 + |v|^2`.
    pub fn antipode(&self) -> Spinor {
        Spinor {
            u: -self.v.conj(),
            v: self.u.conj(),
        }
    }
}

/// The Hopf map `h(u, v) = (2 u conj(v), |u|^2 - |v|^2)` with `C` read as
/// the `(x, y)` plane.
pub fn hopf(s: &Spinor) -> Point {
    let w = 2.0 * s.u * s.v.conj();
    Point::new(w.re, w.im, s.u.norm_sqr() - s.v.norm_sqr())
}

/// Deterministic Hopf lift with `|u|^2 + |v|^2 = |p|`.
///
/// With `r = |p|` and `zeta = x + iy`: for `z >= 0` take `u = sqrt((r+z)/2)`
/// real and `v = conj(zeta) / 2u`; otherwise take `v = sqrt((r-z)/2)` real and
/// `u = zeta / 2v`. The square root argument is always at least `r/2`.
/// The choice jumps across the plane `z = 0`, which only changes the gauge.
pub fn lift(p: &Point) -> Result<Spinor> {
    if !p.is_finite() {
        return Err(Error::invalid("point coordinates must be finite"));
    }
    let r = p.norm();
    if r == 0.0 {
        return Err(Error::invalid("the zero vector has no Hopf lift"));
    }
    let zeta = Complex64::new(p.x, p.y);
    let (u, v) = if p.z >= 0.0 {
        let u = ((r + p.z) / 2.0).sqrt();
        (Complex64::new(u, 0.0), zeta.conj() / (2.0 * u))
    } else {
        let v = ((r - p.z) / 2.0).sqrt();
        (zeta / (2.0 * v), Complex64::new(v, 0.0))
    };
    Ok(Spinor { u, v })
}

/// Multiply a spinor by `e^{i theta}`. The Hopf image is unchanged.
pub fn gauge(s: &Spinor, theta: f64) -> Spinor {
    let lambda = Complex64::from_polar(1.0, theta);
    Spinor {
        u: lambda * s.u,
        v: lambda * s.v,
    }
}

/// An ordered configuration of `n >= 2` points.
///
/// Distinctness is not checked here; the evaluators apply the separation
/// guard in [`crate::det::check_guard`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConfigFile", into = "ConfigFile")]
pub struct Config {
    points: Vec<Point>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    points: Vec<Point>,
}

impl TryFrom<ConfigFile> for Config {
    type Error = Error;
    fn try_from(f: ConfigFile) -> Result<Self> {
        Config::new(f.points)
    }
}

impl From<Config> for ConfigFile {
    fn from(c: Config) -> Self {
        ConfigFile { points: c.points }
    }
}

impl Config {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid(format!(
                "a configuration needs at least 2 points, got {}",
                points.len()
            )));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("point coordinates must be finite"));
        }
        Ok(Config { points })
    }

    /// Build from flattened `x1, y1, z1, x2, ...` coordinates.
    pub fn from_coords(coords: &[f64]) -> Result<Self> {
        Config::new(points_from_coords(coords)?)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn coords(&self) -> Vec<f64> {
        flatten(&self.points)
    }

    pub fn transform(&self, t: &Transform) -> Result<Config> {
        Config::new(t.apply(&self.points)?)
    }
}

/// An ordered tuple of `m >= 1` points with `x_a != 0` and `x_a ± x_b != 0`.
///
/// The invariants are checked exactly on construction; the evaluators
/// additionally apply the relative separation guard to the signed points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SymplecticFile", into = "SymplecticFile")]
pub struct SymplecticConfig {
    points: Vec<Point>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SymplecticFile {
    sym_points: Vec<Point>,
}

impl TryFrom<SymplecticFile> for SymplecticConfig {
    type Error = Error;
    fn try_from(f: SymplecticFile) -> Result<Self> {
        SymplecticConfig::new(f.sym_points)
    }
}

impl From<SymplecticConfig> for SymplecticFile {
    fn from(c: SymplecticConfig) -> Self {
        SymplecticFile {
            sym_points: c.points,
        }
    }
}

impl SymplecticConfig {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("a symplectic configuration needs m >= 1 points"));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("point coordinates must be finite"));
        }
        let degenerate = || {
            let (min_sep, diameter) = separation(&doubled(&points));
            Error::Degenerate { min_sep, diameter }
        };
        if points.contains(&Point::ORIGIN) {
            return Err(degenerate());
        }
        for (a, pa) in points.iter().enumerate() {
            for pb in &points[a + 1..] {
                if pa == pb || *pa == -*pb {
                    return Err(degenerate());
                }
            }
        }
        Ok(SymplecticConfig { points })
    }

    pub fn from_coords(coords: &[f64]) -> Result<Self> {
        SymplecticConfig::new(points_from_coords(coords)?)
    }

    /// The unsigned points `x_1, ..., x_m`.
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn m(&self) -> usize {
        self.points.len()
    }

    pub fn coords(&self) -> Vec<f64> {
        flatten(&self.points)
    }

    /// The index set `I = {1, 1bar, ..., m, mbar}` in increasing order.
    pub fn indices(&self) -> Vec<SympIndex> {
        SympIndex::all(self.m())
    }

    /// `x_alpha`: `x_a` for `alpha = a`, `-x_a` for `alpha = abar`.
    pub fn signed_point(&self, idx: SympIndex) -> Point {
        let p = self.points[idx.base - 1];
        if idx.barred {
            -p
        } else {
            p
        }
    }

    /// Rotations, dilations, permutations and sign flips keep the invariants.
    /// Translations are applied as well but may break them.
    pub fn transform(&self, t: &Transform) -> Result<SymplecticConfig> {
        SymplecticConfig::new(t.apply(&self.points)?)
    }
}

/// Element of the symplectic index set, ordered `1 < 1bar < 2 < 2bar < ...`.
///
/// The derived ordering compares `base` first, then `barred` with
/// `false < true`, which is exactly that order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SympIndex {
    /// 1-based point index.
    pub base: usize,
    pub barred: bool,
}

impl SympIndex {
    pub fn all(m: usize) -> Vec<SympIndex> {
        (1..=m)
            .flat_map(|base| {
                [false, true]
                    .into_iter()
                    .map(move |barred| SympIndex { base, barred })
            })
            .collect()
    }
}

impl std::fmt::Display for SympIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.barred {
            write!(f, "{}bar", self.base)
        } else {
            write!(f, "{}", self.base)
        }
    }
}

/// The doubling map `(x_1, ..., x_m) -> (x_1, -x_1, ..., x_m, -x_m)`.
pub fn ghat(sc: &SymplecticConfig) -> Config {
    // n = 2m >= 2 and the points are finite, so `new` cannot fail.
    Config {
        points: doubled(&sc.points),
    }
}

fn doubled(points: &[Point]) -> Vec<Point> {
    points.iter().flat_map(|&p| [p, -p]).collect()
}

/// `(min pairwise distance, max pairwise distance)`.
pub fn separation(points: &[Point]) -> (f64, f64) {
    let mut min_sep = f64::INFINITY;
    let mut diameter = 0.0f64;
    for (a, pa) in points.iter().enumerate() {
        for pb in &points[a + 1..] {
            let d = pa.dist(pb);
            min_sep = min_sep.min(d);
            diameter = diameter.max(d);
        }
    }
    (min_sep, diameter)
}

fn flatten(points: &[Point]) -> Vec<f64> {
    points.iter().flat_map(|p| p.to_array()).collect()
}

fn points_from_coords(coords: &[f64]) -> Result<Vec<Point>> {
    if !coords.len().is_multiple_of(3) {
        return Err(Error::invalid(format!(
            "flattened coordinates must come in triples, got {} values",
            coords.len()
        )));
    }
    Ok(coords
        .chunks_exact(3)
        .map(|c| Point::new(c[0], c[1], c[2]))
        .collect())
}

/// A rigid motion, dilation, relabelling or sign flip of a point list.
#[derive(Debug, Clone, PartialEq)]
pub enum Transform {
    Translate(Point),
    /// Row-major proper rotation matrix.
    Rotate([[f64; 3]; 3]),
    Dilate(f64),
    /// `Permute(perm)` puts old point `perm[i]` (0-based) at position `i`.
    Permute(Vec<usize>),
    /// Negate the point at the given 0-based position.
    Negate(usize),
}

impl Transform {
    pub fn identity() -> Transform {
        Transform::Dilate(1.0)
    }

    /// Rotation by `angle` radians about `axis` (Rodrigues' formula).
    pub fn rotation(axis: Point, angle: f64) -> Result<Transform> {
        let n = axis.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::invalid("rotation axis must be a finite nonzero vector"));
        }
        let k = axis.scale(1.0 / n);
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        Ok(Transform::Rotate([
            [c + k.x * k.x * t, k.x * k.y * t - k.z * s, k.x * k.z * t + k.y * s],
            [k.y * k.x * t + k.z * s, c + k.y * k.y * t, k.y * k.z * t - k.x * s],
            [k.z * k.x * t - k.y * s, k.z * k.y * t + k.x * s, c + k.z * k.z * t],
        ]))
    }

    pub fn apply(&self, points: &[Point]) -> Result<Vec<Point>> {
        match self {
            Transform::Translate(d) => {
                if !d.is_finite() {
                    return Err(Error::invalid("translation must be finite"));
                }
                Ok(points.iter().map(|&p| p + *d).collect())
            }
            Transform::Rotate(r) => {
                check_rotation(r)?;
                Ok(points.iter().map(|p| p.rotate(r)).collect())
            }
            Transform::Dilate(s) => {
                if !(*s > 0.0 && s.is_finite()) {
                    return Err(Error::invalid(format!("dilation factor must be positive, got {s}")));
                }
                Ok(points.iter().map(|p| p.scale(*s)).collect())
            }
            Transform::Permute(perm) => {
                let mut seen = vec![false; points.len()];
                if perm.len() != points.len() {
                    return Err(Error::invalid("permutation length does not match point count"));
                }
                for &i in perm {
                    if i >= points.len() || std::mem::replace(&mut seen[i], true) {
                        return Err(Error::invalid(format!("{perm:?} is not a permutation")));
                    }
                }
                Ok(perm.iter().map(|&i| points[i]).collect())
            }
            Transform::Negate(i) => {
                if *i >= points.len() {
                    return Err(Error::invalid(format!("no point at position {i}")));
                }
                let mut out = points.to_vec();
                out[*i] = -out[*i];
                Ok(out)
            }
        }
    }
}

fn check_rotation(r: &[[f64; 3]; 3]) -> Result<()> {
    for i in 0..3 {
        for j in 0..3 {
            let dot: f64 = (0..3).map(|k| r[k][i] * r[k][j]).sum();
            let expect = if i == j { 1.0 } else { 0.0 };
            if (dot - expect).abs() > ROTATION_TOL || dot.is_nan() {
                return Err(Error::invalid("rotation matrix is not orthogonal"));
            }
        }
    }
    let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
        - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
        + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
    if (det - 1.0).abs() > ROTATION_TOL || det.is_nan() {
        return Err(Error::invalid("rotation matrix must have determinant +1"));
    }
    Ok(())
}

fn normal_points(rng: &mut ChaCha8Rng, count: usize) -> Vec<Point> {
    (0..count)
        .map(|_| {
            let mut draw = || -> f64 { StandardNormal.sample(rng) };
            Point::new(draw(), draw(), draw())
        })
        .collect()
}

/// `n` points with i.i.d. standard normal coordinates, redrawn until the
/// separation guard passes. Pure function of `(n, seed)`.
pub fn random_config(n: usize, seed: u64) -> Result<Config> {
    if n < 2 {
        return Err(Error::invalid(format!("n must be at least 2, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_RESAMPLES {
        let points = normal_points(&mut rng, n);
        if check_guard(&points).is_ok() {
            return Config::new(points);
        }
    }
    Err(Error::Internal(format!(
        "no guard-passing configuration after {MAX_RESAMPLES} draws (n={n}, seed={seed})"
    )))
}

/// Symplectic counterpart of [`random_config`]; the guard is applied to the
/// `2m` signed points.
pub fn random_symp_config(m: usize, seed: u64) -> Result<SymplecticConfig> {
    if m < 1 {
        return Err(Error::invalid("m must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_RESAMPLES {
        let points = normal_points(&mut rng, m);
        if check_guard(&doubled(&points)).is_ok() {
            return SymplecticConfig::new(points);
        }
    }
    Err(Error::Internal(format!(
        "no guard-passing symplectic configuration after {MAX_RESAMPLES} draws (m={m}, seed={seed})"
    )))
}
