//! Complex values stored as `(phase, ln |z|)` and an overflow-free LU
//! determinant built on them.

use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `phase * exp(logmag)` with `|phase| = 1`, or exact zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledComplex {
    phase: Complex64,
    logmag: f64,
    zero: bool,
}

impl ScaledComplex {
    pub const ZERO: ScaledComplex = ScaledComplex {
        phase: ZERO,
        logmag: f64::NEG_INFINITY,
        zero: true,
    };

    pub const ONE: ScaledComplex = ScaledComplex {
        phase: ONE,
        logmag: 0.0,
        zero: false,
    };

    pub fn from_complex(z: Complex64) -> Self {
        if z == ZERO {
            return Self::ZERO;
        }
        let r = z.norm();
        ScaledComplex {
            phase: z / r,
            logmag: r.ln(),
            zero: false,
        }
    }

    /// `phase` is renormalized to unit modulus; a zero `phase` gives zero.
    pub fn from_parts(phase: Complex64, logmag: f64) -> Self {
        let r = phase.norm();
        if r == 0.0 {
            return Self::ZERO;
        }
        ScaledComplex {
            phase: phase / r,
            logmag,
            zero: false,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// Unit-modulus phase; `0` for the zero value.
    pub fn phase(&self) -> Complex64 {
        self.phase
    }

    /// `ln |z|`; `-inf` for zero.
    pub fn logmag(&self) -> f64 {
        self.logmag
    }

    pub fn abs(&self) -> f64 {
        if self.zero {
            0.0
        } else {
            self.logmag.exp()
        }
    }

    /// Plain complex value; overflows to infinity for huge magnitudes.
    pub fn to_complex(&self) -> Complex64 {
        if self.zero {
            ZERO
        } else {
            self.phase * self.logmag.exp()
        }
    }

    /// `None` when dividing by zero.
    pub fn checked_div(&self, rhs: &ScaledComplex) -> Option<ScaledComplex> {
        if rhs.zero {
            return None;
        }
        if self.zero {
            return Some(Self::ZERO);
        }
        Some(ScaledComplex::from_parts(
            self.phase * rhs.phase.conj(),
            self.logmag - rhs.logmag,
        ))
    }

    /// `|self / other - 1|`, evaluated without leaving log space for the
    /// magnitudes. Zero against zero is `0`; anything against zero is `inf`.
    pub fn rel_diff(&self, other: &ScaledComplex) -> f64 {
        match (self.zero, other.zero) {
            (true, true) => 0.0,
            (_, true) => f64::INFINITY,
            (true, false) => 1.0,
            (false, false) => {
                let ratio = self.phase * other.phase.conj() * (self.logmag - other.logmag).exp();
                (ratio - ONE).norm()
            }
        }
    }
}

impl Mul for ScaledComplex {
    type Output = ScaledComplex;
    fn mul(self, rhs: ScaledComplex) -> ScaledComplex {
        if self.zero || rhs.zero {
            return Self::ZERO;
        }
        ScaledComplex::from_parts(self.phase * rhs.phase, self.logmag + rhs.logmag)
    }
}

impl std::iter::Product for ScaledComplex {
    fn product<I: Iterator<Item = ScaledComplex>>(iter: I) -> Self {
        iter.fold(ScaledComplex::ONE, |acc, x| acc * x)
    }
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        ComplexMatrix {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Build from rows; `None` if the rows do not form a square.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Option<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return None;
        }
        Some(ComplexMatrix {
            n,
            data: rows.concat(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.n {
                self.data.swap(a * self.n + j, b * self.n + j);
            }
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LuDet {
    pub det: ScaledComplex,
    /// Largest over smallest pivot modulus of the column-equilibrated
    /// factorization; `inf` for a singular matrix, `1` for `n <= 1`.
    pub cond_hint: f64,
}

/// Determinant by LU with partial pivoting, accumulated in log space.
///
/// Each column is first divided by its largest modulus entry (the scale goes
/// into the log-magnitude), so entries of any size stay representable.
pub fn scaled_det(m: &ComplexMatrix) -> LuDet {
    let n = m.n;
    let mut a = m.clone();
    let mut phase = ONE;
    let mut logmag = 0.0;
    let singular = LuDet {
        det: ScaledComplex::ZERO,
        cond_hint: f64::INFINITY,
    };

    for j in 0..n {
        let scale = (0..n).map(|i| a[(i, j)].norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return singular;
        }
        for i in 0..n {
            a[(i, j)] /= scale;
        }
        logmag += scale.ln();
    }

    let mut max_pivot = 0.0f64;
    let mut min_pivot = f64::INFINITY;
    for k in 0..n {
        // first row wins ties, so the factorization is deterministic
        let mut p = k;
        let mut best = a[(k, k)].norm();
        for i in k + 1..n {
            let v = a[(i, k)].norm();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return singular;
        }
        if p != k {
            a.swap_rows(p, k);
            phase = -phase;
        }
        let pivot = a[(k, k)];
        max_pivot = max_pivot.max(best);
        min_pivot = min_pivot.min(best);
        phase *= pivot / best;
        phase /= phase.norm();
        logmag += best.ln();
        for i in k + 1..n {
            let f = a[(i, k)] / pivot;
            if f == ZERO {
                continue;
            }
            for j in k + 1..n {
                let t = a[(k, j)];
                a[(i, j)] -= f * t;
            }
        }
    }

    LuDet {
        det: ScaledComplex::from_parts(phase, logmag),
        cond_hint: if n == 0 { 1.0 } else { max_pivot / min_pivot },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Leibniz expansion over all permutations (Heap's algorithm).
    fn leibniz(m: &ComplexMatrix) -> Complex64 {
        let n = m.dim();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut counters = vec![0usize; n];
        let term = |perm: &[usize], sign: f64| -> Complex64 {
            perm.iter()
                .enumerate()
                .fold(c(sign, 0.0), |acc, (i, &j)| acc * m[(i, j)])
        };
        let mut sign = 1.0;
        let mut total = term(&perm, sign);
        let mut i = 0;
        while i < n {
            if counters[i] < i {
                if i % 2 == 0 {
                    perm.swap(0, i);
                } else {
                    perm.swap(counters[i], i);
                }
                sign = -sign;
                total += term(&perm, sign);
                counters[i] += 1;
                i = 0;
            } else {
                counters[i] = 0;
                i += 1;
            }
        }
        total
    }

    #[test]
    fn det_examples() {
        let id = scaled_det(&ComplexMatrix::identity(3));
        assert_eq!(id.det.phase(), ONE);
        assert_eq!(id.det.logmag(), 0.0);
        assert_eq!(id.cond_hint, 1.0);

        let d = ComplexMatrix::from_rows(&[vec![c(2.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(3.0, 0.0)]])
            .unwrap();
        assert!((scaled_det(&d).det.to_complex() - c(6.0, 0.0)).norm() < 1e-14);

        let anti = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(-1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        assert!((scaled_det(&anti).det.to_complex() - ONE).norm() < 1e-15);
    }

    #[test]
    fn singular_matrix_sets_zero_flag() {
        let m = ComplexMatrix::from_rows(&[vec![c(1.0, 1.0), c(2.0, 2.0)], vec![c(0.5, 0.5), c(1.0, 1.0)]])
            .unwrap();
        let r = scaled_det(&m);
        assert!(r.det.is_zero());
        assert!(r.cond_hint.is_infinite());
        assert!(scaled_det(&ComplexMatrix::zeros(3)).det.is_zero());
    }

    #[test]
    fn lu_matches_leibniz_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=6 {
            for _ in 0..20 {
                let mut m = ComplexMatrix::zeros(n);
                for i in 0..n {
                    for j in 0..n {
                        m[(i, j)] = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
                    }
                }
                let expect = leibniz(&m);
                let got = scaled_det(&m).det;
                assert!(
                    got.rel_diff(&ScaledComplex::from_complex(expect)) < 1e-11,
                    "n={n}: {got:?} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn huge_entries_do_not_overflow() {
        // diag(1e300, ..., 1e300) has determinant 1e3000
        let mut m = ComplexMatrix::zeros(10);
        for i in 0..10 {
            m[(i, i)] = c(0.0, 1e300);
        }
        let r = scaled_det(&m).det;
        assert!((r.logmag() - 3000.0 * 10f64.ln()).abs() < 1e-9);
        // i^10 = -1
        assert!((r.phase() - c(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn arithmetic() {
        let a = ScaledComplex::from_complex(c(3.0, 4.0));
        let b = ScaledComplex::from_complex(c(0.0, 2.0));
        assert!(((a * b).to_complex() - c(-8.0, 6.0)).norm() < 1e-13);
        let q = a.checked_div(&b).unwrap();
        assert!((q.to_complex() - c(2.0, -1.5)).norm() < 1e-14);
        assert!(a.checked_div(&ScaledComplex::ZERO).is_none());
        assert_eq!(a.rel_diff(&a), 0.0);
        assert!((a.abs() - 5.0).abs() < 1e-14);
        assert!(((a.phase().norm()) - 1.0).abs() < 1e-15);
        assert_eq!(ScaledComplex::ZERO.rel_diff(&ScaledComplex::ZERO), 0.0);
    }
}
