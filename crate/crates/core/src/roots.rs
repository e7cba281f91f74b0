//! Root systems of `U(2m)` and `Sp(m)` as integer covectors, and the
//! pullback along the folding map `g: e_a -> v_{2a-1} - v_{2a}`.
//!
//! A-side covectors live in the dual basis `y_1, ..., y_2m` of `R^{2m}`,
//! C-side covectors in the dual basis `x_1, ..., x_m` of `R^m`. All
//! arithmetic is exact.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Side {
    /// Covectors on `R^{2m}` (`U(2m)` roots).
    A,
    /// Covectors on `R^m` (`Sp(m)` roots).
    C,
}

/// An integer covector given by its coordinates in the dual basis.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RootVector(pub Vec<i32>);

impl RootVector {
    pub fn zero(len: usize) -> Self {
        RootVector(vec![0; len])
    }

    /// `e_i - e_j` style covector with the given `(index, coefficient)`
    /// terms; indices are 0-based and may repeat.
    pub fn from_terms(len: usize, terms: &[(usize, i32)]) -> Self {
        let mut v = Self::zero(len);
        for &(i, c) in terms {
            v.0[i] += c;
        }
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn neg(&self) -> RootVector {
        RootVector(self.0.iter().map(|c| -c).collect())
    }

    /// Long roots `±2 x_a` have a single nonzero entry.
    pub fn is_long(&self) -> bool {
        self.0.iter().filter(|&&c| c != 0).count() == 1
    }

    fn in_range(&self) -> bool {
        !self.is_zero() && self.0.iter().all(|c| (-2..=2).contains(c))
    }
}

impl std::fmt::Display for RootVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (i, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.unsigned_abs();
            if mag == 1 {
                write!(f, "{sign}e{}", i + 1)?;
            } else {
                write!(f, "{sign}{mag}e{}", i + 1)?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootMultiset {
    side: Side,
    m: usize,
    entries: BTreeMap<RootVector, usize>,
}

impl RootMultiset {
    pub fn new(side: Side, m: usize) -> Self {
        RootMultiset {
            side,
            m,
            entries: BTreeMap::new(),
        }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn m(&self) -> usize {
        self.m
    }

    fn dim(&self) -> usize {
        match self.side {
            Side::A => 2 * self.m,
            Side::C => self.m,
        }
    }

    pub fn insert(&mut self, r: RootVector) -> Result<()> {
        if r.len() != self.dim() {
            return Err(Error::invalid(format!(
                "covector of length {} on a {}-dimensional side",
                r.len(),
                self.dim()
            )));
        }
        if !r.in_range() {
            return Err(Error::invalid(format!("{r} is not a root vector")));
        }
        *self.entries.entry(r).or_insert(0) += 1;
        Ok(())
    }

    pub fn multiplicity(&self, r: &RootVector) -> usize {
        self.entries.get(r).copied().unwrap_or(0)
    }

    /// Number of roots counted with multiplicity.
    pub fn total(&self) -> usize {
        self.entries.values().sum()
    }

    /// Number of distinct roots.
    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&RootVector, usize)> {
        self.entries.iter().map(|(r, &k)| (r, k))
    }

    pub fn same_support(&self, other: &RootMultiset) -> bool {
        self.side == other.side
            && self.m == other.m
            && self.entries.keys().eq(other.entries.keys())
    }

    pub fn closed_under_negation(&self) -> bool {
        self.iter().all(|(r, k)| self.multiplicity(&r.neg()) == k)
    }
}

fn check_rank(m: usize) -> Result<()> {
    if m < 1 {
        return Err(Error::invalid("rank m must be at least 1"));
    }
    Ok(())
}

/// `A = { y_alpha - y_beta : alpha != beta }`, size `2m(2m-1)`.
pub fn roots_a(m: usize) -> Result<RootMultiset> {
    check_rank(m)?;
    let n = 2 * m;
    let mut set = RootMultiset::new(Side::A, m);
    for alpha in 0..n {
        for beta in 0..n {
            if alpha != beta {
                set.insert(RootVector::from_terms(n, &[(alpha, 1), (beta, -1)]))?;
            }
        }
    }
    Ok(set)
}

/// `C = { ±x_a ± x_b : a < b } ∪ { ±2 x_a }`, size `2m^2`.
pub fn roots_c(m: usize) -> Result<RootMultiset> {
    check_rank(m)?;
    let mut set = RootMultiset::new(Side::C, m);
    for a in 0..m {
        for b in a + 1..m {
            for (sa, sb) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                set.insert(RootVector::from_terms(m, &[(a, sa), (b, sb)]))?;
            }
        }
        for s in [2, -2] {
            set.insert(RootVector::from_terms(m, &[(a, s)]))?;
        }
    }
    Ok(set)
}

/// The `2m x m` matrix of `g`; column `a` is `v_{2a-1} - v_{2a}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldMap {
    m: usize,
    matrix: Vec<Vec<i32>>,
}

impl FoldMap {
    pub fn new(m: usize) -> Result<Self> {
        check_rank(m)?;
        let mut matrix = vec![vec![0; m]; 2 * m];
        for a in 0..m {
            matrix[2 * a][a] = 1;
            matrix[2 * a + 1][a] = -1;
        }
        Ok(FoldMap { m, matrix })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Row `alpha`, column `a` (both 0-based).
    pub fn entry(&self, alpha: usize, a: usize) -> i32 {
        self.matrix[alpha][a]
    }

    /// `g^* r`, i.e. the covector `e_a -> r(g e_a)`. May be zero for
    /// covectors that are not roots.
    pub fn pullback(&self, r: &RootVector) -> Result<RootVector> {
        if r.len() != 2 * self.m {
            return Err(Error::invalid(format!(
                "pullback expects a covector of length {}, got {}",
                2 * self.m,
                r.len()
            )));
        }
        Ok(RootVector(
            (0..self.m)
                .map(|a| {
                    r.0.iter()
                        .zip(&self.matrix)
                        .map(|(ri, row)| ri * row[a])
                        .sum()
                })
                .collect(),
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldReport {
    pub m: usize,
    /// Support of `g^*(A)` equals `C`.
    pub set_equal: bool,
    /// Common multiplicity of the long roots in `g^*(A)`; `-1` if they differ.
    pub long_mult: i64,
    /// Common multiplicity of the short roots; `0` when `m = 1` (there are
    /// none), `-1` if they differ.
    pub short_mult: i64,
    pub a_size: usize,
    pub c_size: usize,
    #[serde(skip)]
    pub zero_images: usize,
}

impl FoldReport {
    pub fn passed(&self) -> bool {
        let short_expected = if self.m == 1 { 0 } else { 2 };
        self.set_equal
            && self.zero_images == 0
            && self.long_mult == 1
            && self.short_mult == short_expected
            && self.a_size == 4 * self.m * self.m - 2 * self.m
    }
}

fn common_multiplicity(mults: impl Iterator<Item = usize>) -> i64 {
    let mut common = None;
    for k in mults {
        match common {
            None => common = Some(k),
            Some(c) if c != k => return -1,
            _ => {}
        }
    }
    common.map_or(0, |k| k as i64)
}

/// Pull every root of `A` back along `g` and compare with `C`.
pub fn verify_fold(m: usize) -> Result<FoldReport> {
    let g = FoldMap::new(m)?;
    let a = roots_a(m)?;
    let c = roots_c(m)?;
    let mut image = RootMultiset::new(Side::C, m);
    let mut zero_images = 0;
    for (r, k) in a.iter() {
        let pulled = g.pullback(r)?;
        if pulled.is_zero() {
            zero_images += k;
            continue;
        }
        for _ in 0..k {
            image.insert(pulled.clone())?;
        }
    }
    let long_mult = common_multiplicity(c.iter().filter(|(r, _)| r.is_long()).map(|(r, _)| image.multiplicity(r)));
    let short_mult = common_multiplicity(c.iter().filter(|(r, _)| !r.is_long()).map(|(r, _)| image.multiplicity(r)));
    Ok(FoldReport {
        m,
        set_equal: image.same_support(&c),
        long_mult,
        short_mult,
        a_size: a.total(),
        c_size: c.total(),
        zero_images,
    })
}
