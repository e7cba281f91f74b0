//! The normalized determinants `D` and `D_S`.
//!
//! For points `x_1, ..., x_n` let `(u_ab, v_ab)` lift `x_b - x_a` and
//! `p_ab(t) = u_ab t - v_ab`. With `p_a = prod_{b != a} p_ab`,
//!
//! ```text
//! D = det(p_1, ..., p_n) / prod_{a<b} det(p_ab, p_ba)
//! ```
//!
//! where each polynomial contributes the column of its coefficients in
//! increasing powers of `t`. Rescaling one lift by `lambda` rescales one
//! column of the numerator and one pair factor of the denominator by the same
//! `lambda`, so `D` does not depend on the choice of lifts.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{gauge, lift, separation, Config, Point, Spinor, SymplecticConfig};
use crate::poly::{coeff_matrix, poly_product, CPoly};
use crate::scaled::{scaled_det, ScaledComplex};

/// Minimum separation allowed, relative to the configuration diameter.
pub const GUARD_RATIO: f64 = 1e-9;

/// Reject point lists whose closest pair is nearer than
/// `GUARD_RATIO * diameter`. Returns `(min_sep, diameter)` on success.
pub fn check_guard(points: &[Point]) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return Err(Error::invalid("need at least two points"));
    }
    let (min_sep, diameter) = separation(points);
    if !(min_sep.is_finite() && diameter.is_finite()) {
        return Err(Error::invalid("non-finite separation"));
    }
    if !(min_sep > 0.0 && min_sep >= GUARD_RATIO * diameter) {
        return Err(Error::Degenerate { min_sep, diameter });
    }
    Ok((min_sep, diameter))
}

/// `det [[-v_ab, -v_ba], [u_ab, u_ba]] = u_ab v_ba - v_ab u_ba`.
pub fn pair_det(s_ab: &Spinor, s_ba: &Spinor) -> ScaledComplex {
    ScaledComplex::from_complex(s_ab.u() * s_ba.v() - s_ab.v() * s_ba.u())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(into = "DetReportJson")]
pub struct DetReport {
    pub value: ScaledComplex,
    pub numerator: ScaledComplex,
    pub denominator: ScaledComplex,
    pub abs: f64,
    pub cond_hint: f64,
}

impl DetReport {
    pub fn log_abs(&self) -> f64 {
        self.value.logmag()
    }
}

#[derive(Serialize)]
struct DetReportJson {
    abs: f64,
    log_abs: f64,
    phase: [f64; 2],
    cond_hint: f64,
}

impl From<DetReport> for DetReportJson {
    fn from(r: DetReport) -> Self {
        let phase = r.value.phase();
        DetReportJson {
            abs: r.abs,
            log_abs: r.value.logmag(),
            phase: [phase.re, phase.im],
            cond_hint: r.cond_hint,
        }
    }
}

/// `lifts[a][b]` lifts `points[b] - points[a]` for `a != b`.
fn assemble(lifts: &[Vec<Option<Spinor>>]) -> Result<DetReport> {
    let n = lifts.len();
    let spinor = |a: usize, b: usize| lifts[a][b].expect("off-diagonal lift present");
    let polys: Vec<CPoly> = (0..n)
        .map(|a| {
            let factors: Vec<CPoly> = (0..n)
                .filter(|&b| b != a)
                .map(|b| CPoly::linear_factor(&spinor(a, b)))
                .collect();
            poly_product(&factors)
        })
        .collect();
    let lu = scaled_det(&coeff_matrix(&polys, n)?);
    let denominator: ScaledComplex = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .map(|(a, b)| pair_det(&spinor(a, b), &spinor(b, a)))
        .product();
    let value = lu
        .det
        .checked_div(&denominator)
        .ok_or_else(|| Error::Internal("vanishing pair determinant".into()))?;
    Ok(DetReport {
        value,
        numerator: lu.det,
        denominator,
        abs: value.abs(),
        cond_hint: lu.cond_hint,
    })
}

fn lift_table(points: &[Point], gauge_of: impl Fn(usize, usize) -> f64) -> Result<Vec<Vec<Option<Spinor>>>> {
    let n = points.len();
    let mut table = vec![vec![None; n]; n];
    for a in 0..n {
        for b in 0..n {
            if a != b {
                let s = lift(&(points[b] - points[a]))?;
                let theta = gauge_of(a, b);
                table[a][b] = Some(if theta == 0.0 { s } else { gauge(&s, theta) });
            }
        }
    }
    Ok(table)
}

/// Evaluate `D` for a configuration, with the deterministic lift for every
/// ordered pair.
pub fn eval_d(c: &Config) -> Result<DetReport> {
    eval_d_gauged(c, |_, _| 0.0)
}

/// Evaluate `D` after multiplying the lift of `x_b - x_a` by
/// `exp(i * gauge_of(a, b))` (0-based indices). The result agrees with
/// [`eval_d`] up to rounding.
pub fn eval_d_gauged(c: &Config, gauge_of: impl Fn(usize, usize) -> f64) -> Result<DetReport> {
    check_guard(c.points())?;
    assemble(&lift_table(c.points(), gauge_of)?)
}

/// Evaluate `D_S` over the signed points `x_alpha`, `alpha` running through
/// `1 < 1bar < ... < m < mbar`.
///
/// For `alpha < beta` the lift of `x_beta - x_alpha` comes from [`lift`]; the
/// reverse direction uses its antipodal partner instead of a fresh lift, so
/// every pair determinant is the positive real `|x_beta - x_alpha|`.
pub fn eval_ds(sc: &SymplecticConfig) -> Result<DetReport> {
    let indices = sc.indices();
    let signed: Vec<Point> = indices.iter().map(|&i| sc.signed_point(i)).collect();
    check_guard(&signed)?;
    let n = signed.len();
    let mut table = vec![vec![None; n]; n];
    for (ia, alpha) in indices.iter().enumerate() {
        for (ib, beta) in indices.iter().enumerate().skip(ia + 1) {
            debug_assert!(alpha < beta);
            let s = lift(&(signed[ib] - signed[ia]))?;
            table[ia][ib] = Some(s);
            table[ib][ia] = Some(s.antipode());
        }
    }
    assemble(&table)
}
