//! Normalized spinor determinants of point configurations in three-space.
//!
//! Every ordered pair of distinct points `x_a, x_b` contributes a Hopf lift of
//! the direction `x_b - x_a`, hence a linear polynomial in a formal variable
//! `t`. Multiplying the factors attached to each point yields `n` polynomials
//! of degree `n - 1`; the determinant of their coefficient matrix, divided by
//! the product of the 2×2 pair determinants, is the normalized determinant
//! `D`. The symplectic variant `D_S` does the same for the signed points
//! `±x_a` of an origin-avoiding configuration, and coincides with `D` of the
//! doubled configuration `(x_1, -x_1, ..., x_m, -x_m)`.
//!
//! Modules:
//! - [`geom`]: points, configurations, the Hopf map and lift, transforms.
//! - [`poly`], [`scaled`], [`det`]: polynomial algebra, log-scaled complex
//!   arithmetic and the determinant evaluators.
//! - [`roots`]: integer root systems of `U(2m)` and `Sp(m)` and the folding
//!   pullback between them.
//! - [`probe`], [`simplex`]: randomized and simplex-descent search for
//!   configurations with `|D| < 1`.
//! - [`cli`]: the `asdet` command-line front end.

pub mod cli;
pub mod det;
pub mod error;
pub mod geom;
pub mod poly;
pub mod probe;
pub mod roots;
pub mod scaled;
pub mod simplex;

pub use det::{eval_d, eval_d_gauged, eval_ds, pair_det, DetReport};
pub use error::{Error, Result};
pub use geom::{ghat, hopf, lift, Config, Point, Spinor, SympIndex, SymplecticConfig, Transform};
pub use poly::CPoly;
pub use scaled::ScaledComplex;
