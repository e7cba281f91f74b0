//! Complex polynomials in the formal variable `t`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geom::Spinor;
use crate::scaled::ComplexMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Coefficients in increasing powers of `t`; `coeffs[k]` multiplies `t^k`.
///
/// Trailing zero coefficients are trimmed, keeping at least the constant
/// term, so the zero polynomial is `[0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CPoly {
    coeffs: Vec<Complex64>,
}

impl CPoly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        CPoly { coeffs }
    }

    pub fn one() -> Self {
        CPoly::new(vec![Complex64::new(1.0, 0.0)])
    }

    /// `u t - v` for the spinor `(u, v)`.
    pub fn linear_factor(s: &Spinor) -> Self {
        CPoly::new(vec![-s.v(), s.u()])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs == [ZERO]
    }

    /// Coefficients zero-padded to `len`. Returns `None` if the polynomial
    /// does not fit.
    pub fn padded(&self, len: usize) -> Option<Vec<Complex64>> {
        if self.coeffs.len() > len {
            return None;
        }
        let mut out = self.coeffs.clone();
        out.resize(len, ZERO);
        Some(out)
    }

    pub fn mul(&self, other: &CPoly) -> CPoly {
        let mut out = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        CPoly::new(out)
    }

    pub fn eval(&self, t: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * t + c)
    }
}

/// Product of all polynomials; the empty product is `1`.
pub fn poly_product<'a>(ps: impl IntoIterator<Item = &'a CPoly>) -> CPoly {
    ps.into_iter().fold(CPoly::one(), |acc, p| acc.mul(p))
}

/// The `n x n` matrix whose column `j` holds the coefficients of `ps[j]`,
/// row `k` being the coefficient of `t^k`.
pub fn coeff_matrix(ps: &[CPoly], n: usize) -> Result<ComplexMatrix> {
    if ps.len() != n {
        return Err(Error::invalid(format!(
            "expected {n} polynomials, got {}",
            ps.len()
        )));
    }
    let mut m = ComplexMatrix::zeros(n);
    for (j, p) in ps.iter().enumerate() {
        let col = p.padded(n).ok_or_else(|| {
            Error::invalid(format!(
                "polynomial {j} has degree {} > {}",
                p.degree(),
                n.saturating_sub(1)
            ))
        })?;
        for (k, c) in col.into_iter().enumerate() {
            m[(k, j)] = c;
        }
    }
    Ok(m)
}
