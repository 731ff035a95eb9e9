//! Finite pointed measured metric spaces: validation, balls, subspaces and
//! the step structure of the ball curve.

use crate::error::{Error, Result, ValidationError};
use crate::scalar::Scalar;
use std::cmp::Ordering;

/// A finite pointed measured metric space: a symmetric distance matrix, a
/// root index and a nonnegative mass per point.
///
/// Points with zero mass are retained; the geometry is part of the space even
/// where the measure does not see it. Every space has at least one point (the
/// root). Zero off-diagonal distances are tolerated, so the type also carries
/// pseudometrics such as the empirical ground spaces built from distance
/// values between other spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSpace<S> {
    n: usize,
    dist: Vec<S>,
    root: usize,
    mass: Vec<S>,
    labels: Option<Vec<String>>,
}

/// Validate a candidate matrix + root + mass into a [`FiniteSpace`].
///
/// The first violated invariant is reported with witness indices. In floating
/// mode the triangle inequality is checked up to the global tolerance; in
/// rational mode it is exact.
pub fn validate_space<S: Scalar>(
    dist: Vec<Vec<S>>,
    root: usize,
    mass: Vec<S>,
    labels: Option<Vec<String>>,
) -> Result<FiniteSpace<S>> {
    let n = dist.len();
    if n == 0 {
        return Err(ValidationError::Empty.into());
    }
    for (i, row) in dist.iter().enumerate() {
        if row.len() != n {
            return Err(ValidationError::NotSquare {
                row: i,
                len: row.len(),
                expected: n,
            }
            .into());
        }
    }
    for (i, row) in dist.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if !v.to_f64().is_finite() {
                return Err(ValidationError::NonFinite { i, j }.into());
            }
            if v.cmp_total(&(S::zero() - S::tol())) == Ordering::Less {
                return Err(ValidationError::NegativeDistance { i, j }.into());
            }
        }
        if !row[i].is_zero_tol() {
            return Err(ValidationError::NonzeroDiagonal { i }.into());
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if !dist[i][j].eq_tol(&dist[j][i]) {
                return Err(ValidationError::Asymmetric { i, j }.into());
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let via = dist[i][j].clone() + dist[j][k].clone();
                if !dist[i][k].le_tol(&via) {
                    return Err(ValidationError::TriangleViolation { i, j, k }.into());
                }
            }
        }
    }
    if root >= n {
        return Err(ValidationError::BadRoot { root, n }.into());
    }
    if mass.len() != n {
        return Err(ValidationError::BadMassLength {
            len: mass.len(),
            expected: n,
        }
        .into());
    }
    for (i, m) in mass.iter().enumerate() {
        if m.cmp_total(&(S::zero() - S::tol())) == Ordering::Less {
            return Err(ValidationError::NegativeMass { i }.into());
        }
    }
    if let Some(ls) = &labels {
        if ls.len() != n {
            return Err(ValidationError::BadLabelLength {
                len: ls.len(),
                expected: n,
            }
            .into());
        }
    }
    let mut flat = Vec::with_capacity(n * n);
    for row in dist {
        flat.extend(row);
    }
    Ok(FiniteSpace {
        n,
        dist: flat,
        root,
        mass,
        labels,
    })
}

impl<S: Scalar> FiniteSpace<S> {
    /// Space with all points on a line at the given coordinates, rooted at
    /// `root`, with the given masses. Handy for fixtures.
    pub fn line(coords: &[i64], root: usize, mass: &[i64]) -> Self {
        let n = coords.len();
        let dist = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| S::from_int((coords[i] - coords[j]).abs()))
                    .collect()
            })
            .collect();
        let mass = mass.iter().map(|&m| S::from_int(m)).collect();
        validate_space(dist, root, mass, None).expect("line space is a metric space")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn dist(&self, i: usize, j: usize) -> &S {
        &self.dist[i * self.n + j]
    }

    pub fn mass(&self, i: usize) -> &S {
        &self.mass[i]
    }

    pub fn masses(&self) -> &[S] {
        &self.mass
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(ls) => ls[i].clone(),
            None => i.to_string(),
        }
    }

    pub fn total_mass(&self) -> S {
        self.mass.iter().cloned().sum()
    }

    /// Max distance from the root.
    pub fn radius(&self) -> S {
        crate::scalar::max_of((0..self.n).map(|i| self.dist(self.root, i).clone())).unwrap()
    }

    /// Replace every mass with zero (the metric-only view of the space).
    pub fn with_zero_mass(&self) -> Self {
        let mut out = self.clone();
        out.mass = vec![S::zero(); self.n];
        out
    }

    /// Indices (ascending) of the closed ball of radius `r` around the root.
    pub fn ball_support(&self, r: &S) -> Vec<usize> {
        (0..self.n)
            .filter(|&i| self.dist(self.root, i).cmp_total(r) != Ordering::Greater)
            .collect()
    }

    /// The closed ball of radius `r` as a space: support restricted, masses
    /// restricted, root preserved.
    pub fn closed_ball(&self, r: &S) -> FiniteSpace<S> {
        let support = self.ball_support(r);
        self.restrict_full(&support)
    }

    /// Sub-space on `support` (parent indices, ascending, must contain the
    /// root) with the parent's masses.
    pub fn restrict_full(&self, support: &[usize]) -> FiniteSpace<S> {
        let mass = support.iter().map(|&i| self.mass[i].clone()).collect();
        self.restrict(support, mass)
    }

    /// Sub-space on `support` with explicit masses (given in support order).
    pub fn restrict(&self, support: &[usize], mass: Vec<S>) -> FiniteSpace<S> {
        assert!(
            support.contains(&self.root),
            "support must contain the root"
        );
        assert_eq!(mass.len(), support.len());
        let k = support.len();
        let mut dist = Vec::with_capacity(k * k);
        for &i in support {
            for &j in support {
                dist.push(self.dist(i, j).clone());
            }
        }
        let root = support.iter().position(|&i| i == self.root).unwrap();
        let labels = self
            .labels
            .as_ref()
            .map(|ls| support.iter().map(|&i| ls[i].clone()).collect());
        FiniteSpace {
            n: k,
            dist,
            root,
            mass,
            labels,
        }
    }

    /// Radii `r > 0` at which the curve `t -> closed ball at t` jumps: the
    /// distinct nonzero distances from the root. Every other radius is a
    /// continuity radius.
    pub fn discontinuity_radii(&self) -> Vec<S> {
        let mut radii: Vec<S> = Vec::new();
        for i in 0..self.n {
            let d = self.dist(self.root, i).clone();
            if d.cmp_total(&S::zero()) == Ordering::Greater && !radii.contains(&d) {
                radii.push(d);
            }
        }
        radii.sort_by(|a, b| a.cmp_total(b));
        radii
    }

    /// Step-curve representation of `t -> closed ball at t`: `pieces[k]` is
    /// the ball on `[radii[k-1], radii[k])` (piece 0 covers `[0, radii[0])`),
    /// and the last piece is the whole space.
    pub fn ball_decomposition(&self) -> BallDecomposition<S> {
        let radii = self.discontinuity_radii();
        let piece = |support: Vec<usize>| -> BallPiece<S> {
            let mass = support.iter().map(|&i| self.mass(i).clone()).collect();
            BallPiece { support, mass }
        };
        let mut pieces = Vec::with_capacity(radii.len() + 1);
        pieces.push(piece(self.ball_support(&S::zero())));
        for r in &radii {
            pieces.push(piece(self.ball_support(r)));
        }
        BallDecomposition { radii, pieces }
    }
}

/// One step of the ball curve: the ball's support and its restricted mass
/// (in support order).
#[derive(Debug, Clone, PartialEq)]
pub struct BallPiece<S> {
    pub support: Vec<usize>,
    pub mass: Vec<S>,
}

/// Piecewise-constant representation of the ball curve.
#[derive(Debug, Clone, PartialEq)]
pub struct BallDecomposition<S> {
    /// Strictly increasing breakpoints.
    pub radii: Vec<S>,
    /// `radii.len() + 1` pieces; piece `k` is the ball for radii in
    /// `[radii[k-1], radii[k])`.
    pub pieces: Vec<BallPiece<S>>,
}

impl<S: Scalar> BallDecomposition<S> {
    /// The piece holding at radius `r`.
    pub fn piece_at(&self, r: &S) -> &BallPiece<S> {
        let mut k = 0;
        while k < self.radii.len() && self.radii[k].cmp_total(r) != Ordering::Greater {
            k += 1;
        }
        &self.pieces[k]
    }
}

/// A pmm-subspace of a parent space: a support containing the root plus
/// per-point mass bounds sandwiched between zero and the parent's masses.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceSpec<S> {
    support: Vec<usize>,
    mass_lower: Vec<S>,
    mass_upper: Vec<S>,
}

impl<S: Scalar> SubspaceSpec<S> {
    /// Bounds are given in support order. For points outside the support both
    /// bounds are zero by construction.
    pub fn new(
        parent: &FiniteSpace<S>,
        support: Vec<usize>,
        mass_lower: Vec<S>,
        mass_upper: Vec<S>,
    ) -> Result<Self> {
        if !support.contains(&parent.root()) {
            return Err(Error::SupportMissingRoot);
        }
        for &i in &support {
            if i >= parent.n() {
                return Err(Error::SupportOutOfRange { i });
            }
        }
        if mass_lower.len() != support.len() || mass_upper.len() != support.len() {
            return Err(Error::Precondition("mass bound length mismatch".into()));
        }
        for (k, &i) in support.iter().enumerate() {
            let lo = &mass_lower[k];
            let hi = &mass_upper[k];
            let neg = S::zero() - S::tol();
            if lo.cmp_total(&neg) == Ordering::Less || !lo.le_tol(hi) || !hi.le_tol(parent.mass(i))
            {
                return Err(Error::MassBoundViolation { i });
            }
        }
        Ok(SubspaceSpec {
            support,
            mass_lower,
            mass_upper,
        })
    }

    /// The subspace with fixed masses (`lower == choice == upper`).
    pub fn fixed(parent: &FiniteSpace<S>, support: Vec<usize>, mass: Vec<S>) -> Result<Self> {
        Self::new(parent, support, mass.clone(), mass)
    }

    /// The full parent as a subspace of itself.
    pub fn full(parent: &FiniteSpace<S>) -> Self {
        let support: Vec<usize> = (0..parent.n()).collect();
        let mass: Vec<S> = parent.masses().to_vec();
        SubspaceSpec {
            support,
            mass_lower: mass.clone(),
            mass_upper: mass,
        }
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn mass_lower(&self) -> &[S] {
        &self.mass_lower
    }

    pub fn mass_upper(&self) -> &[S] {
        &self.mass_upper
    }

    /// Realize the subspace with a concrete in-bounds mass choice (support
    /// order). The metric is inherited from the parent.
    pub fn realize(&self, parent: &FiniteSpace<S>, choice: &[S]) -> Result<FiniteSpace<S>> {
        if choice.len() != self.support.len() {
            return Err(Error::Precondition("mass choice length mismatch".into()));
        }
        for (k, c) in choice.iter().enumerate() {
            if !self.mass_lower[k].le_tol(c) || !c.le_tol(&self.mass_upper[k]) {
                return Err(Error::MassBoundViolation { i: self.support[k] });
            }
        }
        Ok(parent.restrict(&self.support, choice.to_vec()))
    }
}

/// Is `(sub_support, sub_mass)` a pmm-subspace of `(sup_support, sup_mass)`
/// inside a common parent? Supports are parent indices; masses are in
/// support order.
pub fn is_pmm_subspace<S: Scalar>(
    sub_support: &[usize],
    sub_mass: &[S],
    sup_support: &[usize],
    sup_mass: &[S],
) -> bool {
    for (k, &i) in sub_support.iter().enumerate() {
        match sup_support.iter().position(|&j| j == i) {
            None => {
                if !sub_mass[k].is_zero_tol() {
                    return false;
                }
            }
            Some(pos) => {
                if !sub_mass[k].le_tol(&sup_mass[pos]) {
                    return false;
                }
            }
        }
    }
    true
}
