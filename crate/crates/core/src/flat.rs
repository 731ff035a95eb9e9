//! Metrics between subsets and measures on one common finite ground space:
//! Hausdorff, total variation, Prokhorov via its approximate-coupling
//! characterization, exact couplings, and Hall-type transport feasibility.
//!
//! The ground space is any finite point set with a validated (pseudo)metric,
//! so the same machinery later runs with distances between whole spaces as
//! the ground metric.

use crate::error::{Error, Result, ValidationError};
use crate::lp::{self, Capacity, FlowNetwork, LpProblem, Relation};
use crate::scalar::{max_of, min_of, Scalar};
use std::cmp::Ordering;
use std::sync::Arc;

/// A finite point set with a symmetric distance matrix. No root, no mass.
///
/// Zero distances between distinct points are allowed (pseudometric); the
/// triangle inequality and symmetry are validated as for spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundSpace<S> {
    n: usize,
    dist: Vec<S>,
}

impl<S: Scalar> GroundSpace<S> {
    pub fn new(dist: Vec<Vec<S>>) -> Result<Self> {
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
        for i in 0..n {
            for j in 0..n {
                if !dist[i][j].to_f64().is_finite() {
                    return Err(ValidationError::NonFinite { i, j }.into());
                }
                if dist[i][j].cmp_total(&(S::zero() - S::tol())) == Ordering::Less {
                    return Err(ValidationError::NegativeDistance { i, j }.into());
                }
            }
            if !dist[i][i].is_zero_tol() {
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
        let mut flat = Vec::with_capacity(n * n);
        for row in dist {
            flat.extend(row);
        }
        Ok(GroundSpace { n, dist: flat })
    }

    /// Ground space from values already known to satisfy the (pseudo)metric
    /// axioms up to an external slack (empirical distance matrices).
    pub(crate) fn new_unchecked(dist: Vec<Vec<S>>) -> Self {
        let n = dist.len();
        let mut flat = Vec::with_capacity(n * n);
        for row in dist {
            flat.extend(row);
        }
        GroundSpace { n, dist: flat }
    }

    pub fn from_space(space: &crate::spaces::FiniteSpace<S>) -> Self {
        let n = space.n();
        let mut dist = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                dist.push(space.dist(i, j).clone());
            }
        }
        GroundSpace { n, dist }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dist(&self, i: usize, j: usize) -> &S {
        &self.dist[i * self.n + j]
    }

    /// Sorted distinct distance values (always contains zero).
    pub fn distance_breakpoints(&self) -> Vec<S> {
        let mut vals: Vec<S> = vec![S::zero()];
        for v in &self.dist {
            if !vals.iter().any(|w| w == v) {
                vals.push(v.clone());
            }
        }
        vals.sort_by(|a, b| a.cmp_total(b));
        vals
    }

    /// Closed `eps`-neighborhood of a point set.
    pub fn neighborhood(&self, set: &[usize], eps: &S) -> Vec<usize> {
        (0..self.n)
            .filter(|&j| {
                set.iter()
                    .any(|&i| self.dist(i, j).cmp_total(eps) != Ordering::Greater)
            })
            .collect()
    }
}

/// A finite nonnegative measure on a shared ground space.
#[derive(Debug, Clone)]
pub struct FiniteMeasure<S> {
    ground: Arc<GroundSpace<S>>,
    mass: Vec<S>,
}

impl<S: Scalar> FiniteMeasure<S> {
    pub fn new(ground: Arc<GroundSpace<S>>, mass: Vec<S>) -> Result<Self> {
        if mass.len() != ground.n() {
            return Err(Error::Precondition(
                "mass length does not match ground size".into(),
            ));
        }
        for (i, m) in mass.iter().enumerate() {
            if m.cmp_total(&(S::zero() - S::tol())) == Ordering::Less {
                return Err(ValidationError::NegativeMass { i }.into());
            }
        }
        Ok(FiniteMeasure { ground, mass })
    }

    pub fn ground(&self) -> &Arc<GroundSpace<S>> {
        &self.ground
    }

    pub fn mass(&self) -> &[S] {
        &self.mass
    }

    pub fn total(&self) -> S {
        self.mass.iter().cloned().sum()
    }

    pub fn mass_of(&self, set: &[usize]) -> S {
        set.iter().map(|&i| self.mass[i].clone()).sum()
    }
}

fn same_ground<'a, S: Scalar>(
    mu: &'a FiniteMeasure<S>,
    nu: &'a FiniteMeasure<S>,
) -> Result<&'a GroundSpace<S>> {
    if Arc::ptr_eq(&mu.ground, &nu.ground) || mu.ground == nu.ground {
        Ok(&mu.ground)
    } else {
        Err(Error::GroundMismatch)
    }
}

/// Exact finite evaluation of `sup_A |mu(A) - nu(A)|`.
pub fn total_variation<S: Scalar>(mu: &FiniteMeasure<S>, nu: &FiniteMeasure<S>) -> Result<S> {
    same_ground(mu, nu)?;
    let mut pos = S::zero();
    let mut neg = S::zero();
    for (a, b) in mu.mass.iter().zip(&nu.mass) {
        let d = a.clone() - b.clone();
        if d.cmp_total(&S::zero()) == Ordering::Greater {
            pos += d;
        } else {
            neg += S::zero() - d;
        }
    }
    Ok(pos.max_val(neg))
}

/// `max(max_{a in A} d(a, B), max_{b in B} d(b, A))` for nonempty index sets.
pub fn hausdorff_distance<S: Scalar>(
    a: &[usize],
    b: &[usize],
    ground: &GroundSpace<S>,
) -> Result<S> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let directed = |from: &[usize], to: &[usize]| -> S {
        max_of(
            from.iter()
                .map(|&x| min_of(to.iter().map(|&y| ground.dist(x, y).clone())).unwrap()),
        )
        .unwrap()
    };
    Ok(directed(a, b).max_val(directed(b, a)))
}

/// A nonnegative matrix on the product of two ground sets.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan<S> {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<S>,
}

impl<S: Scalar> TransportPlan<S> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        TransportPlan {
            rows,
            cols,
            entries: vec![S::zero(); rows * cols],
        }
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<S>) -> Self {
        assert_eq!(entries.len(), rows * cols);
        TransportPlan {
            rows,
            cols,
            entries,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[S] {
        &self.entries
    }

    pub fn row_marginal(&self) -> Vec<S> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).clone()).sum())
            .collect()
    }

    pub fn col_marginal(&self) -> Vec<S> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j).clone()).sum())
            .collect()
    }

    pub fn total(&self) -> S {
        self.entries.iter().cloned().sum()
    }

    /// Mass carried by cells selected by the predicate.
    pub fn mass_where(&self, mut far: impl FnMut(usize, usize) -> bool) -> S {
        let mut total = S::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if far(i, j) {
                    total += self.get(i, j).clone();
                }
            }
        }
        total
    }

    /// `D(plan; mu, nu)`: total variation of both marginal mismatches.
    pub fn discrepancy(&self, mu: &[S], nu: &[S]) -> S {
        tv_vec(&self.row_marginal(), mu) + tv_vec(&self.col_marginal(), nu)
    }
}

/// Total variation between two plain mass vectors of equal length.
pub fn tv_vec<S: Scalar>(a: &[S], b: &[S]) -> S {
    let mut pos = S::zero();
    let mut neg = S::zero();
    for (x, y) in a.iter().zip(b) {
        let d = x.clone() - y.clone();
        if d.cmp_total(&S::zero()) == Ordering::Greater {
            pos += d;
        } else {
            neg += S::zero() - d;
        }
    }
    pos.max_val(neg)
}

/// How one marginal of the discrepancy program is constrained.
pub(crate) enum MarginalMode<'a, S> {
    /// `TV(pi(alpha), target)` enters the objective.
    Slack(&'a [S]),
    /// `pi(alpha) = target` exactly.
    Equal(&'a [S]),
    /// `pi(alpha) <= target`; the deficit enters the objective.
    SubEq(&'a [S]),
    /// The target itself is a variable within `[lower, upper]`;
    /// `TV(pi(alpha), target)` enters the objective.
    Boxed { lower: &'a [S], upper: &'a [S] },
}

impl<S> MarginalMode<'_, S> {
    fn len(&self) -> usize {
        match self {
            MarginalMode::Slack(t) | MarginalMode::Equal(t) | MarginalMode::SubEq(t) => t.len(),
            MarginalMode::Boxed { lower, .. } => lower.len(),
        }
    }
}

pub(crate) struct DiscrepancyOpt<S> {
    pub value: S,
    pub plan: TransportPlan<S>,
    /// Chosen column measure in `Boxed` mode.
    pub col_measure: Option<Vec<S>>,
}

/// Minimize `D(alpha; mu, nu) + alpha(far)` as one LP.
///
/// Each total-variation term is linearized with per-atom positive/negative
/// slack pairs and one epigraph variable bounding the max of the two slack
/// sums; the far mass is a plain linear term over the flagged cells.
pub(crate) fn solve_discrepancy<S: Scalar>(
    rows: usize,
    cols: usize,
    far: &[bool],
    row_mode: MarginalMode<'_, S>,
    col_mode: MarginalMode<'_, S>,
) -> Result<DiscrepancyOpt<S>> {
    assert_eq!(far.len(), rows * cols);
    assert_eq!(row_mode.len(), rows);
    assert_eq!(col_mode.len(), cols);

    // Variable layout: alpha cells first, then per-mode auxiliaries.
    let n_alpha = rows * cols;
    let mut n_vars = n_alpha;
    let mut alloc = |k: usize| {
        let at = n_vars;
        n_vars += k;
        at
    };

    struct SideVars {
        slack_pos: usize,
        slack_neg: usize,
        epigraph: usize,
        deficit: usize,
        boxed: usize,
    }
    let mut plan_side = |mode: &MarginalMode<'_, S>, len: usize| match mode {
        MarginalMode::Slack(_) => SideVars {
            slack_pos: alloc(len),
            slack_neg: alloc(len),
            epigraph: alloc(1),
            deficit: usize::MAX,
            boxed: usize::MAX,
        },
        MarginalMode::Equal(_) => SideVars {
            slack_pos: usize::MAX,
            slack_neg: usize::MAX,
            epigraph: usize::MAX,
            deficit: usize::MAX,
            boxed: usize::MAX,
        },
        MarginalMode::SubEq(_) => SideVars {
            slack_pos: usize::MAX,
            slack_neg: usize::MAX,
            epigraph: usize::MAX,
            deficit: alloc(len),
            boxed: usize::MAX,
        },
        MarginalMode::Boxed { .. } => SideVars {
            slack_pos: alloc(len),
            slack_neg: alloc(len),
            epigraph: alloc(1),
            deficit: usize::MAX,
            boxed: alloc(len),
        },
    };
    let rv = plan_side(&row_mode, rows);
    let cv = plan_side(&col_mode, cols);

    let mut p = LpProblem::<S>::new(n_vars);
    for i in 0..rows {
        for j in 0..cols {
            if far[i * cols + j] {
                p.objective[i * cols + j] = S::one();
            }
        }
    }

    let emit_side = |p: &mut LpProblem<S>,
                     mode: &MarginalMode<'_, S>,
                     vars: &SideVars,
                     len: usize,
                     cell: &dyn Fn(usize, usize) -> usize,
                     other_len: usize| {
        match mode {
            MarginalMode::Slack(target) => {
                for k in 0..len {
                    let mut terms: Vec<(usize, S)> =
                        (0..other_len).map(|o| (cell(k, o), S::one())).collect();
                    terms.push((vars.slack_pos + k, S::zero() - S::one()));
                    terms.push((vars.slack_neg + k, S::one()));
                    p.constrain_sparse(&terms, Relation::Eq, target[k].clone());
                }
                for var in [vars.slack_pos, vars.slack_neg] {
                    let mut terms: Vec<(usize, S)> =
                        (0..len).map(|k| (var + k, S::zero() - S::one())).collect();
                    terms.push((vars.epigraph, S::one()));
                    p.constrain_sparse(&terms, Relation::Ge, S::zero());
                }
                p.objective[vars.epigraph] = S::one();
            }
            MarginalMode::Equal(target) => {
                for k in 0..len {
                    let terms: Vec<(usize, S)> =
                        (0..other_len).map(|o| (cell(k, o), S::one())).collect();
                    p.constrain_sparse(&terms, Relation::Eq, target[k].clone());
                }
            }
            MarginalMode::SubEq(target) => {
                for k in 0..len {
                    let mut terms: Vec<(usize, S)> =
                        (0..other_len).map(|o| (cell(k, o), S::one())).collect();
                    terms.push((vars.deficit + k, S::one()));
                    p.constrain_sparse(&terms, Relation::Eq, target[k].clone());
                    p.objective[vars.deficit + k] = S::one();
                }
            }
            MarginalMode::Boxed { lower, upper } => {
                for k in 0..len {
                    let mut terms: Vec<(usize, S)> =
                        (0..other_len).map(|o| (cell(k, o), S::one())).collect();
                    terms.push((vars.slack_pos + k, S::zero() - S::one()));
                    terms.push((vars.slack_neg + k, S::one()));
                    terms.push((vars.boxed + k, S::zero() - S::one()));
                    p.constrain_sparse(&terms, Relation::Eq, S::zero());
                    p.lower[vars.boxed + k] = lower[k].clone();
                    p.upper[vars.boxed + k] = Some(upper[k].clone());
                }
                for var in [vars.slack_pos, vars.slack_neg] {
                    let mut terms: Vec<(usize, S)> =
                        (0..len).map(|k| (var + k, S::zero() - S::one())).collect();
                    terms.push((vars.epigraph, S::one()));
                    p.constrain_sparse(&terms, Relation::Ge, S::zero());
                }
                p.objective[vars.epigraph] = S::one();
            }
        }
    };

    let row_cell = |i: usize, j: usize| i * cols + j;
    let col_cell = |j: usize, i: usize| i * cols + j;
    emit_side(&mut p, &row_mode, &rv, rows, &row_cell, cols);
    emit_side(&mut p, &col_mode, &cv, cols, &col_cell, rows);

    let sol = lp::lp_solve(&p)?.optimal()?;
    let plan = TransportPlan::from_entries(rows, cols, sol.point[..n_alpha].to_vec());
    let col_measure = match &col_mode {
        MarginalMode::Boxed { .. } => {
            Some((0..cols).map(|k| sol.point[cv.boxed + k].clone()).collect())
        }
        _ => None,
    };
    Ok(DiscrepancyOpt {
        value: sol.value,
        plan,
        col_measure,
    })
}

/// Max-flow evaluation of `min_alpha D(alpha; mu, nu) + alpha(far)`:
/// the optimum equals `max(|mu|, |nu|) - M`, where `M` is the maximum mass of
/// a sub-coupling supported on the near cells. Used for fast search bounds
/// and as the oracle's inner step; its agreement with the LP route is
/// property-tested.
pub(crate) fn min_discrepancy_flow<S: Scalar>(
    rows: usize,
    cols: usize,
    near: impl Fn(usize, usize) -> bool,
    mu: &[S],
    nu: &[S],
) -> S {
    let source = rows + cols;
    let sink = rows + cols + 1;
    let mut net = FlowNetwork::new(rows + cols + 2, source, sink);
    for (i, m) in mu.iter().enumerate() {
        net.arc(source, i, Capacity::Finite(m.clone()));
    }
    for i in 0..rows {
        for j in 0..cols {
            if near(i, j) {
                net.arc(i, rows + j, Capacity::Unbounded);
            }
        }
    }
    for (j, m) in nu.iter().enumerate() {
        net.arc(rows + j, sink, Capacity::Finite(m.clone()));
    }
    let res = lp::max_flow(&net).expect("bipartite transport network is well-formed");
    let mu_total: S = mu.iter().cloned().sum();
    let nu_total: S = nu.iter().cloned().sum();
    mu_total.max_val(nu_total) - res.value
}

/// Optimal value and witness of the approximate-coupling program at level
/// `eps`: minimize `D(alpha; mu, nu) + alpha({d > eps})`.
#[derive(Debug, Clone)]
pub struct StrassenResult<S> {
    pub g: S,
    pub plan: TransportPlan<S>,
}

/// The far set uses strict inequality `d > eps`, so the value is constant on
/// each half-open interval between consecutive distance values.
pub fn strassen_value<S: Scalar>(
    mu: &FiniteMeasure<S>,
    nu: &FiniteMeasure<S>,
    eps: &S,
) -> Result<StrassenResult<S>> {
    let ground = same_ground(mu, nu)?;
    let n = ground.n();
    let far: Vec<bool> = (0..n * n)
        .map(|c| ground.dist(c / n, c % n).cmp_total(eps) == Ordering::Greater)
        .collect();
    let opt = solve_discrepancy(
        n,
        n,
        &far,
        MarginalMode::Slack(&mu.mass),
        MarginalMode::Slack(&nu.mass),
    )?;
    Ok(StrassenResult {
        g: opt.value,
        plan: opt.plan,
    })
}

/// Same optimum, but the witness satisfies `pi1(alpha) = mu` and
/// `pi2(alpha) <= nu`. Requires `|mu| <= |nu|`.
pub fn strassen_value_dominated<S: Scalar>(
    mu: &FiniteMeasure<S>,
    nu: &FiniteMeasure<S>,
    eps: &S,
) -> Result<StrassenResult<S>> {
    let ground = same_ground(mu, nu)?;
    if !mu.total().le_tol(&nu.total()) {
        return Err(Error::Precondition(
            "dominated witness requires |mu| <= |nu|".into(),
        ));
    }
    let n = ground.n();
    let far: Vec<bool> = (0..n * n)
        .map(|c| ground.dist(c / n, c % n).cmp_total(eps) == Ordering::Greater)
        .collect();
    let opt = solve_discrepancy(
        n,
        n,
        &far,
        MarginalMode::Equal(&mu.mass),
        MarginalMode::SubEq(&nu.mass),
    )?;
    Ok(StrassenResult {
        g: opt.value,
        plan: opt.plan,
    })
}

#[derive(Debug, Clone)]
pub struct ProkhorovResult<S> {
    pub p: S,
    pub plan: TransportPlan<S>,
}

/// `min { eps >= 0 : g(eps) <= eps }`, found by scanning the half-open
/// breakpoint intervals of the piecewise-constant map `eps -> g(eps)`.
/// The returned plan certifies `g(p) <= p`.
pub fn prokhorov_distance<S: Scalar>(
    mu: &FiniteMeasure<S>,
    nu: &FiniteMeasure<S>,
) -> Result<ProkhorovResult<S>> {
    let ground = same_ground(mu, nu)?;
    let breakpoints = ground.distance_breakpoints();
    for (idx, b) in breakpoints.iter().enumerate() {
        let res = strassen_value(mu, nu, b)?;
        let candidate = b.clone().max_val(res.g.clone());
        let valid = match breakpoints.get(idx + 1) {
            None => true,
            Some(next) => candidate.cmp_total(next) == Ordering::Less,
        };
        if valid {
            // g is constant on [b, next), so g(candidate) = g(b) <= candidate.
            let plan = if candidate == *b {
                res.plan
            } else {
                strassen_value(mu, nu, &candidate)?.plan
            };
            return Ok(ProkhorovResult { p: candidate, plan });
        }
    }
    unreachable!("the last breakpoint interval always yields a candidate")
}

/// Exact coupling attaining `alpha({d > p}) <= p` at `p` = Prokhorov
/// distance. Requires equal total masses.
pub fn strassen_coupling<S: Scalar>(
    mu: &FiniteMeasure<S>,
    nu: &FiniteMeasure<S>,
) -> Result<TransportPlan<S>> {
    let ground = same_ground(mu, nu)?;
    if !mu.total().eq_tol(&nu.total()) {
        return Err(Error::UnequalTotalMass);
    }
    let p = prokhorov_distance(mu, nu)?.p;
    let n = ground.n();
    let far: Vec<bool> = (0..n * n)
        .map(|c| ground.dist(c / n, c % n).cmp_total(&p) == Ordering::Greater)
        .collect();
    let opt = solve_discrepancy(
        n,
        n,
        &far,
        MarginalMode::Equal(&mu.mass),
        MarginalMode::Equal(&nu.mass),
    )?;
    Ok(opt.plan)
}

/// Outcome of the marriage-type feasibility problem on a relation `K`.
#[derive(Debug, Clone)]
pub enum HallOutcome<S> {
    /// A plan supported on `K` with `pi1 = mu` and `pi2 <= nu`.
    Feasible(TransportPlan<S>),
    /// A set `A` with `mu(A) > nu(K(A))`, extracted from the min cut.
    Violating(Vec<usize>),
}

/// Either transports all of `mu` into `nu` along `K`, or exhibits a set
/// violating the marriage condition. The two outcomes are mutually exclusive
/// and exhaustive: feasibility holds iff the max flow reaches `|mu|`.
pub fn hall_transport<S: Scalar>(
    n_x: usize,
    n_y: usize,
    k: &[(usize, usize)],
    mu: &[S],
    nu: &[S],
) -> Result<HallOutcome<S>> {
    if mu.len() != n_x || nu.len() != n_y {
        return Err(Error::Precondition("mass vector length mismatch".into()));
    }
    for &(i, j) in k {
        if i >= n_x {
            return Err(Error::BadVertex { vertex: i, n: n_x });
        }
        if j >= n_y {
            return Err(Error::BadVertex { vertex: j, n: n_y });
        }
    }
    let source = n_x + n_y;
    let sink = n_x + n_y + 1;
    let mut net = FlowNetwork::new(n_x + n_y + 2, source, sink);
    for (i, m) in mu.iter().enumerate() {
        net.arc(source, i, Capacity::Finite(m.clone()));
    }
    for &(i, j) in k {
        net.arc(i, n_x + j, Capacity::Unbounded);
    }
    for (j, m) in nu.iter().enumerate() {
        net.arc(n_x + j, sink, Capacity::Finite(m.clone()));
    }
    let res = lp::max_flow(&net)?;
    let mu_total: S = mu.iter().cloned().sum();
    if res.value.eq_tol(&mu_total) {
        let mut plan: TransportPlan<S> = TransportPlan::zero(n_x, n_y);
        for (arc_idx, &(i, j)) in k.iter().enumerate() {
            let flow = res.flows[n_x + arc_idx].clone();
            let cur = plan.get(i, j).clone();
            plan.set(i, j, cur + flow);
        }
        Ok(HallOutcome::Feasible(plan))
    } else {
        let violating: Vec<usize> = (0..n_x).filter(|&i| res.source_side[i]).collect();
        Ok(HallOutcome::Violating(violating))
    }
}

/// Image `K(A)` of a set under a relation.
pub fn relation_image(k: &[(usize, usize)], a: &[usize]) -> Vec<usize> {
    let mut image: Vec<usize> = k
        .iter()
        .filter(|(i, _)| a.contains(i))
        .map(|&(_, j)| j)
        .collect();
    image.sort_unstable();
    image.dedup();
    image
}
