#![allow(dead_code)]

use asdet::geom::{Config, Point, Transform};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn normal_point<R: Rng>(rng: &mut R) -> Point {
    let mut g = || -> f64 { StandardNormal.sample(rng) };
    Point::new(g(), g(), g())
}

/// Uniformly random proper rotation from a normalized Gaussian quaternion.
pub fn random_rotation<R: Rng>(rng: &mut R) -> Transform {
    let mut q: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    q.iter_mut().for_each(|x| *x /= n);
    let [w, x, y, z] = q;
    Transform::Rotate([
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ])
}

pub fn random_permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        p.swap(i, j);
    }
    p
}

/// `n` points on a random line, parameters at least 1e-2 apart.
pub fn random_collinear<R: Rng>(rng: &mut R, n: usize) -> Config {
    let base = normal_point(rng);
    let dir = normal_point(rng);
    let dir = dir.scale(1.0 / dir.norm());
    let mut ts: Vec<f64> = Vec::with_capacity(n);
    while ts.len() < n {
        let t = rng.random_range(-5.0..5.0);
        if ts.iter().all(|s: &f64| (s - t).abs() > 1e-2) {
            ts.push(t);
        }
    }
    Config::new(ts.iter().map(|&t| base + dir.scale(t)).collect()).unwrap()
}

/// Vertices of a regular tetrahedron with unit edge length.
pub fn unit_tetrahedron() -> Config {
    let s = 1.0 / (2.0 * 2f64.sqrt());
    Config::new(
        [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]
            .iter()
            .map(|v| Point::new(s * v[0], s * v[1], s * v[2]))
            .collect(),
    )
    .unwrap()
}

/// `|D|` of the unit regular tetrahedron, frozen from the 50-digit mpmath
/// evaluation in `tests/oracles/tetrahedron.py` (which printed `1.5625`).
pub const TETRAHEDRON_ABS_D: f64 = 1.5625;
