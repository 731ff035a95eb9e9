//! The compact Gromov-Hausdorff-Prokhorov distance between two finite
//! pointed measured metric spaces, through its correspondence
//! characterization: minimize, over relations containing the root pair and
//! covering both sides, the maximum of half the distortion and the optimal
//! discrepancy-plus-far-mass of a transport plan.
//!
//! The exact search is a branch-and-bound over cells of the product. Branches
//! are bounded by the distortion of the partial relation (monotone
//! non-decreasing as pairs are added) and by an optimistic coupling cost
//! evaluated by max-flow on the largest relation still reachable (the
//! coupling cost is monotone non-increasing in the relation). The certificate
//! re-derives the coupling term of the winning correspondence with the
//! discrepancy LP, so the reported pieces always satisfy
//! `value = max(distortion/2, coupling)`.

use crate::error::{Error, Result};
use crate::flat::{min_discrepancy_flow, solve_discrepancy, MarginalMode, TransportPlan};
use crate::lp::{max_flow, Capacity, FlowNetwork};
use crate::scalar::{max_of, min_of, Scalar};
use crate::spaces::{FiniteSpace, SubspaceSpec};
use std::cmp::Ordering;

/// Default cap on `|X| * |Y|` for the exact enumeration.
pub const DEFAULT_CELL_BUDGET: usize = 25;

/// A relation between the points of two spaces covering both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correspondence {
    pairs: Vec<(usize, usize)>,
    n_x: usize,
    n_y: usize,
}

impl Correspondence {
    pub fn new(n_x: usize, n_y: usize, mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        pairs.sort_unstable();
        pairs.dedup();
        for &(i, j) in &pairs {
            if i >= n_x {
                return Err(Error::BadVertex { vertex: i, n: n_x });
            }
            if j >= n_y {
                return Err(Error::BadVertex { vertex: j, n: n_y });
            }
        }
        for i in 0..n_x {
            if !pairs.iter().any(|&(a, _)| a == i) {
                return Err(Error::Precondition(format!("point {i} of X is uncovered")));
            }
        }
        for j in 0..n_y {
            if !pairs.iter().any(|&(_, b)| b == j) {
                return Err(Error::Precondition(format!("point {j} of Y is uncovered")));
            }
        }
        Ok(Correspondence { pairs, n_x, n_y })
    }

    pub fn identity(n: usize) -> Self {
        Correspondence {
            pairs: (0..n).map(|i| (i, i)).collect(),
            n_x: n,
            n_y: n,
        }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.pairs.binary_search(&(i, j)).is_ok()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n_x, self.n_y)
    }

    pub fn has_root_pair(&self, root_x: usize, root_y: usize) -> bool {
        self.contains(root_x, root_y)
    }

    /// Image of a set of X-indices.
    pub fn image(&self, set: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .pairs
            .iter()
            .filter(|(i, _)| set.contains(i))
            .map(|&(_, j)| j)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// `max |d_X(x, x') - d_Y(y, y')|` over all pairs of related pairs.
pub fn distortion<S: Scalar>(r: &Correspondence, x: &FiniteSpace<S>, y: &FiniteSpace<S>) -> S {
    distortion_of_pairs(r.pairs(), x, y)
}

pub(crate) fn distortion_of_pairs<S: Scalar>(
    pairs: &[(usize, usize)],
    x: &FiniteSpace<S>,
    y: &FiniteSpace<S>,
) -> S {
    let mut dis = S::zero();
    for (a, &(i, j)) in pairs.iter().enumerate() {
        for &(i2, j2) in &pairs[a..] {
            let gap = (x.dist(i, i2).clone() - y.dist(j, j2).clone()).abs();
            dis = dis.max_val(gap);
        }
    }
    dis
}

/// Optimal coupling term of a fixed correspondence:
/// `min_alpha D(alpha; mu_X, mu_Y) + alpha(R^c)`, solved as one LP.
pub fn coupling_cost<S: Scalar>(
    r: &Correspondence,
    x: &FiniteSpace<S>,
    y: &FiniteSpace<S>,
) -> Result<(S, TransportPlan<S>)> {
    let (n_x, n_y) = r.dims();
    if n_x != x.n() || n_y != y.n() {
        return Err(Error::Precondition(
            "correspondence dimensions mismatch".into(),
        ));
    }
    let far: Vec<bool> = (0..n_x * n_y)
        .map(|c| !r.contains(c / n_y, c % n_y))
        .collect();
    let opt = solve_discrepancy(
        n_x,
        n_y,
        &far,
        MarginalMode::Slack(x.masses()),
        MarginalMode::Slack(y.masses()),
    )?;
    Ok((opt.value, opt.plan))
}

/// How the inner transport term is evaluated during the search.
pub(crate) enum CostModel<'a, S> {
    /// Both measures fixed.
    Fixed { mu: &'a [S], nu: &'a [S] },
    /// Row measure fixed, column measure free within a box (localized
    /// subspace search).
    Boxed {
        mu: &'a [S],
        lower: &'a [S],
        upper: &'a [S],
    },
}

impl<S: Scalar> CostModel<'_, S> {
    /// Lower bound on the exact cost of any sub-relation of `near`.
    fn flow_bound(&self, rows: usize, cols: usize, near: &[bool]) -> S {
        match self {
            CostModel::Fixed { mu, nu } => {
                min_discrepancy_flow(rows, cols, |i, j| near[i * cols + j], mu, nu)
            }
            CostModel::Boxed { mu, lower, upper } => {
                let source = rows + cols;
                let sink = rows + cols + 1;
                let mut net = FlowNetwork::new(rows + cols + 2, source, sink);
                for (i, m) in mu.iter().enumerate() {
                    net.arc(source, i, Capacity::Finite(m.clone()));
                }
                for i in 0..rows {
                    for j in 0..cols {
                        if near[i * cols + j] {
                            net.arc(i, rows + j, Capacity::Unbounded);
                        }
                    }
                }
                for (j, m) in upper.iter().enumerate() {
                    net.arc(rows + j, sink, Capacity::Finite(m.clone()));
                }
                let m = max_flow(&net).expect("transport network").value;
                let mu_total: S = mu.iter().cloned().sum();
                let lo_total: S = lower.iter().cloned().sum();
                (mu_total.max_val(lo_total) - m).max_val(S::zero())
            }
        }
    }

    /// Exact cost of the relation `near` (a leaf of the search).
    fn exact_cost(&self, rows: usize, cols: usize, near: &[bool]) -> Result<(S, Option<Vec<S>>)> {
        match self {
            CostModel::Fixed { mu, nu } => {
                let v = min_discrepancy_flow(rows, cols, |i, j| near[i * cols + j], mu, nu);
                Ok((v, None))
            }
            CostModel::Boxed { mu, lower, upper } => {
                let far: Vec<bool> = near.iter().map(|b| !b).collect();
                let opt = solve_discrepancy(
                    rows,
                    cols,
                    &far,
                    MarginalMode::Slack(mu),
                    MarginalMode::Boxed { lower, upper },
                )?;
                Ok((opt.value, opt.col_measure))
            }
        }
    }
}

pub(crate) struct SearchOutcome<S> {
    pub value: S,
    pub pairs: Vec<(usize, usize)>,
    pub distortion: S,
    /// Chosen column measure for the boxed model.
    pub col_measure: Option<Vec<S>>,
}

/// Exact branch-and-bound over root-containing covering relations.
///
/// `seed` optionally primes the incumbent value (witness-free); the search
/// then only returns relations strictly below it.
pub(crate) fn search_exact<S: Scalar>(
    x: &FiniteSpace<S>,
    y: &FiniteSpace<S>,
    cost: &CostModel<'_, S>,
    seed: Option<S>,
) -> Result<Option<SearchOutcome<S>>> {
    let (nx, ny) = (x.n(), y.n());
    let root_pair = (x.root(), y.root());

    // Cells with a large root-distance mismatch first: taking such a cell
    // raises the partial distortion immediately, so both branches get cheap.
    let mut cells: Vec<(usize, usize)> = (0..nx)
        .flat_map(|i| (0..ny).map(move |j| (i, j)))
        .filter(|&c| c != root_pair)
        .collect();
    cells.sort_by(|&(i1, j1), &(i2, j2)| {
        let gap1 = (x.dist(x.root(), i1).clone() - y.dist(y.root(), j1).clone()).abs();
        let gap2 = (x.dist(x.root(), i2).clone() - y.dist(y.root(), j2).clone()).abs();
        gap2.cmp_total(&gap1).then((i1, j1).cmp(&(i2, j2)))
    });

    struct State<'a, S: Scalar> {
        x: &'a FiniteSpace<S>,
        y: &'a FiniteSpace<S>,
        cost: &'a CostModel<'a, S>,
        cells: Vec<(usize, usize)>,
        nx: usize,
        ny: usize,
        near: Vec<bool>,
        in_pairs: Vec<(usize, usize)>,
        row_cover: Vec<usize>,
        col_cover: Vec<usize>,
        row_free: Vec<usize>,
        col_free: Vec<usize>,
        best_value: Option<S>,
        best: Option<SearchOutcome<S>>,
    }

    impl<S: Scalar> State<'_, S> {
        fn beats_best(&self, candidate: &S) -> bool {
            match &self.best_value {
                None => true,
                Some(b) => candidate.cmp_total(b) == Ordering::Less,
            }
        }

        fn dfs(&mut self, pos: usize, dis: S) -> Result<()> {
            if !self.beats_best(&dis.clone().half()) {
                return Ok(());
            }
            if pos == self.cells.len() {
                let (coupling, col_measure) = self.cost.exact_cost(self.nx, self.ny, &self.near)?;
                let value = dis.clone().half().max_val(coupling);
                if self.beats_best(&value) {
                    self.best_value = Some(value.clone());
                    self.best = Some(SearchOutcome {
                        value,
                        pairs: self.in_pairs.clone(),
                        distortion: dis,
                        col_measure,
                    });
                }
                return Ok(());
            }
            let (i, j) = self.cells[pos];
            self.row_free[i] -= 1;
            self.col_free[j] -= 1;

            // Include the cell.
            let mut new_dis = dis.clone();
            for &(i2, j2) in &self.in_pairs {
                let gap = (self.x.dist(i, i2).clone() - self.y.dist(j, j2).clone()).abs();
                new_dis = new_dis.max_val(gap);
            }
            self.in_pairs.push((i, j));
            self.row_cover[i] += 1;
            self.col_cover[j] += 1;
            self.dfs(pos + 1, new_dis)?;
            self.in_pairs.pop();
            self.row_cover[i] -= 1;
            self.col_cover[j] -= 1;

            // Exclude the cell, if coverage stays achievable and the
            // optimistic coupling cost does not already lose.
            let coverable = (self.row_cover[i] > 0 || self.row_free[i] > 0)
                && (self.col_cover[j] > 0 || self.col_free[j] > 0);
            if coverable {
                self.near[i * self.ny + j] = false;
                let bound = self.cost.flow_bound(self.nx, self.ny, &self.near);
                if self.beats_best(&dis.clone().half().max_val(bound)) {
                    self.dfs(pos + 1, dis)?;
                }
                self.near[i * self.ny + j] = true;
            }

            self.row_free[i] += 1;
            self.col_free[j] += 1;
            Ok(())
        }
    }

    let mut row_free = vec![0usize; nx];
    let mut col_free = vec![0usize; ny];
    for &(i, j) in &cells {
        row_free[i] += 1;
        col_free[j] += 1;
    }
    let mut row_cover = vec![0usize; nx];
    let mut col_cover = vec![0usize; ny];
    row_cover[root_pair.0] = 1;
    col_cover[root_pair.1] = 1;

    let mut state = State {
        x,
        y,
        cost,
        cells,
        nx,
        ny,
        near: vec![true; nx * ny],
        in_pairs: vec![root_pair],
        row_cover,
        col_cover,
        row_free,
        col_free,
        best_value: seed,
        best: None,
    };
    state.dfs(0, S::zero())?;
    Ok(state.best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Bounds,
}

/// A computed compact distance with the witnesses that prove it.
#[derive(Debug, Clone)]
pub struct CghpCertificate<S> {
    /// The reported distance (equals `upper` in bounds mode).
    pub value: S,
    pub lower: S,
    pub upper: S,
    pub exact: bool,
    pub correspondence: Correspondence,
    pub plan: TransportPlan<S>,
    /// Distortion of the witness correspondence.
    pub distortion: S,
    /// `D(plan; mu_X, mu_Y) + plan(R^c)` of the witness.
    pub coupling: S,
}

pub fn cghp_distance<S: Scalar>(
    x: &FiniteSpace<S>,
    y: &FiniteSpace<S>,
    mode: Mode,
) -> Result<CghpCertificate<S>> {
    cghp_distance_with(x, y, mode, DEFAULT_CELL_BUDGET)
}

pub fn cghp_distance_with<S: Scalar>(
    x: &FiniteSpace<S>,
    y: &FiniteSpace<S>,
    mode: Mode,
    budget_cells: usize,
) -> Result<CghpCertificate<S>> {
    match mode {
        Mode::Exact => {
            let size = x.n() * y.n();
            if size > budget_cells {
                return Err(Error::BudgetExceeded {
                    op: "cghp exact enumeration",
                    size,
                    limit: budget_cells,
                });
            }
            let model = CostModel::Fixed {
                mu: x.masses(),
                nu: y.masses(),
            };
            let out =
                search_exact(x, y, &model, None)?.expect("unseeded search always finds a relation");
            certify(x, y, out)
        }
        Mode::Bounds => {
            let lower = lower_bound(x, y);
            let pairs = greedy_pairs(x, y);
            let r = Correspondence::new(x.n(), y.n(), pairs)?;
            let dis = distortion(&r, x, y);
            let (coupling, plan) = coupling_cost(&r, x, y)?;
            let upper = dis.clone().half().max_val(coupling.clone());
            debug_assert!(lower.le_tol(&upper));
            Ok(CghpCertificate {
                value: upper.clone(),
                lower,
                upper,
                exact: false,
                correspondence: r,
                plan,
                distortion: dis,
                coupling,
            })
        }
    }
}

/// Pointed distance minimized over all root choices (the non-pointed
/// variant of the compact distance).
pub fn cghp_distance_nonpointed<S: Scalar>(
    x: &FiniteSpace<S>,
    y: &FiniteSpace<S>,
) -> Result<CghpCertificate<S>> {
    let mut best: Option<CghpCertificate<S>> = None;
    for rx in 0..x.n() {
        for ry in 0..y.n() {
            let xs = reroot(x, rx);
            let ys = reroot(y, ry);
            let cert = cghp_distance(&xs, &ys, Mode::Exact)?;
            let better = match &best {
                None => true,
                Some(b) => cert.value.cmp_total(&b.value) == Ordering::Less,
            };
            if better {
                best = Some(cert);
            }
        }
    }
    best.ok_or(Error::EmptySet)
}

fn reroot<S: Scalar>(x: &FiniteSpace<S>, root: usize) -> FiniteSpace<S> {
    if root == x.root() {
        return x.clone();
    }
    let n = x.n();
    let dist: Vec<Vec<S>> = (0..n)
        .map(|i| (0..n).map(|j| x.dist(i, j).clone()).collect())
        .collect();
    crate::spaces::validate_space(dist, root, x.masses().to_vec(), None)
        .expect("rerooting a valid space")
}

pub(crate) fn certify<S: Scalar>(
    x: &FiniteSpace<S>,
    y: &FiniteSpace<S>,
    out: SearchOutcome<S>,
) -> Result<CghpCertificate<S>> {
    let r = Correspondence::new(x.n(), y.n(), out.pairs)?;
    let (coupling, plan) = coupling_cost(&r, x, y)?;
    let dis = out.distortion;
    let value = dis.clone().half().max_val(coupling.clone());
    debug_assert!(
        value.eq_tol(&out.value),
        "LP coupling disagrees with flow coupling"
    );
    Ok(CghpCertificate {
        value,
        lower: out.value.clone(),
        upper: out.value,
        exact: true,
        correspondence: r,
        plan,
        distortion: dis,
        coupling,
    })
}

/// `max(|rad X - rad Y| / 2, | |mu_X| - |mu_Y| |)`: both are valid lower
/// bounds, the first by the radius inequality, the second because any plan's
/// discrepancy-plus-far-mass dominates the total-mass gap.
fn lower_bound<S: Scalar>(x: &FiniteSpace<S>, y: &FiniteSpace<S>) -> S {
    let rad_gap = (x.radius() - y.radius()).abs().half();
    let mass_gap = (x.total_mass() - y.total_mass()).abs();
    rad_gap.max_val(mass_gap)
}

/// Greedy correspondence: match points by sorted root distance, then improve
/// by first-improvement partner swaps in a deterministic order.
fn greedy_pairs<S: Scalar>(x: &FiniteSpace<S>, y: &FiniteSpace<S>) -> Vec<(usize, usize)> {
    let (nx, ny) = (x.n(), y.n());
    let mut xs: Vec<usize> = (0..nx).collect();
    xs.sort_by(|&a, &b| {
        x.dist(x.root(), a)
            .cmp_total(x.dist(x.root(), b))
            .then(a.cmp(&b))
    });
    let mut ys: Vec<usize> = (0..ny).collect();
    ys.sort_by(|&a, &b| {
        y.dist(y.root(), a)
            .cmp_total(y.dist(y.root(), b))
            .then(a.cmp(&b))
    });

    let rank = |k: usize, from: usize, to: usize| -> usize {
        if from <= 1 {
            0
        } else {
            (k * (to - 1) + (from - 1) / 2) / (from - 1)
        }
    };
    let mut pairs: Vec<(usize, usize)> = vec![(x.root(), y.root())];
    for (k, &i) in xs.iter().enumerate() {
        pairs.push((i, ys[rank(k, nx, ny)]));
    }
    for (k, &j) in ys.iter().enumerate() {
        pairs.push((xs[rank(k, ny, nx)], j));
    }
    pairs.sort_unstable();
    pairs.dedup();

    let evaluate = |pairs: &[(usize, usize)]| -> S {
        let dis = distortion_of_pairs(pairs, x, y);
        let cost = min_discrepancy_flow(
            nx,
            ny,
            |i, j| pairs.contains(&(i, j)),
            x.masses(),
            y.masses(),
        );
        dis.half().max_val(cost)
    };
    let mut value = evaluate(&pairs);

    let mut improved = true;
    let mut rounds = 0;
    while improved && rounds < 32 {
        improved = false;
        rounds += 1;
        'outer: for idx in 0..pairs.len() {
            let (i, j) = pairs[idx];
            if (i, j) == (x.root(), y.root()) {
                continue;
            }
            for j2 in 0..ny {
                if j2 == j {
                    continue;
                }
                let mut candidate = pairs.clone();
                candidate[idx] = (i, j2);
                candidate.sort_unstable();
                candidate.dedup();
                let covers = (0..nx).all(|a| candidate.iter().any(|&(p, _)| p == a))
                    && (0..ny).all(|b| candidate.iter().any(|&(_, q)| q == b));
                if !covers {
                    continue;
                }
                let v = evaluate(&candidate);
                if v.cmp_total(&value) == Ordering::Less {
                    pairs = candidate;
                    value = v;
                    improved = true;
                    break 'outer;
                }
            }
        }
    }
    pairs
}

/// Result of projecting a subspace across an exact distance witness.
#[derive(Debug, Clone)]
pub struct ProjectedSubspace<S> {
    /// Support of the produced subspace, in parent-of-Y indices.
    pub support: Vec<usize>,
    /// Masses in support order.
    pub mass: Vec<S>,
    pub space: FiniteSpace<S>,
    /// Exact re-computation of `cghp(realized X-subspace, result)`.
    pub verified: CghpCertificate<S>,
}

/// Given an exact witness for `cghp(X, Y) = eps` and a realized pmm-subspace
/// of `X`, construct a pmm-subspace of `Y` within distance `eps` of it: the
/// image of the subspace support under a sub-marginal witness
/// correspondence, with the transport plan restricted to the image, scaled
/// down row-by-row to the subspace masses, and pushed to the second factor.
/// With a radius `r` supplied (`r >= 2 eps`, the `r`-ball of `X` carried
/// fully by the subspace), the produced masses are additionally lifted to
/// cover the `(r - 2 eps)`-ball of `Y`.
pub fn project_subspace<S: Scalar>(
    x: &FiniteSpace<S>,
    y: &FiniteSpace<S>,
    sub: &SubspaceSpec<S>,
    choice: &[S],
    witness: &CghpCertificate<S>,
    r: Option<&S>,
) -> Result<ProjectedSubspace<S>> {
    if !witness.exact {
        return Err(Error::NotExact);
    }
    let xsub = sub.realize(x, choice)?;
    let eps = &witness.value;
    if let Some(r) = r {
        let two_eps = eps.clone() + eps.clone();
        if r.cmp_total(&two_eps) == Ordering::Less {
            return Err(Error::Precondition(
                "radius must be at least twice the distance".into(),
            ));
        }
        for &i in &x.ball_support(r) {
            let k = x_support_position(sub, i).ok_or_else(|| {
                Error::Precondition("ball of radius r must lie inside the subspace support".into())
            })?;
            if !x.mass(i).le_tol(&choice[k]) {
                return Err(Error::Precondition(
                    "subspace must carry the full mass of the r-ball".into(),
                ));
            }
        }
    }

    // Re-derive a witness whose plan is sub-marginal on both sides (equality
    // on the lighter side); the optimum value is unchanged. The construction
    // below would take the closure of the correspondence first, but finite
    // relations are closed, so that step is a no-op here.
    let model = CostModel::Fixed {
        mu: x.masses(),
        nu: y.masses(),
    };
    let out = search_exact(x, y, &model, None)?.expect("unseeded search");
    let r_corr = Correspondence::new(x.n(), y.n(), out.pairs)?;
    let far: Vec<bool> = (0..x.n() * y.n())
        .map(|c| !r_corr.contains(c / y.n(), c % y.n()))
        .collect();
    let x_lighter = x.total_mass().le_tol(&y.total_mass());
    let opt = if x_lighter {
        solve_discrepancy(
            x.n(),
            y.n(),
            &far,
            MarginalMode::Equal(x.masses()),
            MarginalMode::SubEq(y.masses()),
        )?
    } else {
        solve_discrepancy(
            x.n(),
            y.n(),
            &far,
            MarginalMode::SubEq(x.masses()),
            MarginalMode::Equal(y.masses()),
        )?
    };
    let alpha = opt.plan;
    debug_assert!(
        out.distortion
            .clone()
            .half()
            .max_val(opt.value.clone())
            .le_tol(eps),
        "sub-marginal witness exceeds the certified distance"
    );

    // Image of the subspace support.
    let y_support = r_corr.image(sub.support());

    // Restrict the plan and scale each row down to the subspace mass.
    let mut scaled = TransportPlan::<S>::zero(x.n(), y.n());
    for (k, &i) in sub.support().iter().enumerate() {
        let row_total: S = y_support.iter().map(|&j| alpha.get(i, j).clone()).sum();
        if row_total.is_zero_tol() {
            continue;
        }
        let target = row_total.clone().min_val(choice[k].clone());
        let factor = target / row_total;
        for &j in &y_support {
            scaled.set(i, j, alpha.get(i, j).clone() * factor.clone());
        }
    }

    // Push to the second factor; with a radius, also keep the inner ball.
    let mut mass: Vec<S> = y_support
        .iter()
        .map(|&j| (0..x.n()).map(|i| scaled.get(i, j).clone()).sum())
        .collect();
    if let Some(r) = r {
        let two_eps = eps.clone() + eps.clone();
        let inner = y.ball_support(&(r.clone() - two_eps));
        for &j in &inner {
            let pos = y_support.iter().position(|&s| s == j).ok_or_else(|| {
                Error::Precondition("inner ball escaped the correspondence image".into())
            })?;
            mass[pos] = mass[pos].clone().max_val(y.mass(j).clone());
        }
    }

    let space = y.restrict(&y_support, mass.clone());
    let verified = cghp_distance(&xsub, &space, Mode::Exact)?;
    Ok(ProjectedSubspace {
        support: y_support,
        mass,
        space,
        verified,
    })
}

fn x_support_position<S: Scalar>(sub: &SubspaceSpec<S>, i: usize) -> Option<usize> {
    sub.support().iter().position(|&s| s == i)
}

/// A measurable approximate isometry extracted from a correspondence: each
/// point maps to its first partner (the root maps to the root whenever the
/// root pair is present).
#[derive(Debug, Clone)]
pub struct EpsilonIsometry<S> {
    /// Partner in Y for each point of X.
    pub map: Vec<usize>,
    /// `sup |d(x, x') - d(f x, f x')|` of the extracted map.
    pub distortion: S,
    /// `sup_y d(y, f(X))`.
    pub covering: S,
    /// Certified quality: distortion of the correspondence plus the covering
    /// slack; `f` is an `epsilon`-isometry for this value.
    pub epsilon: S,
    pub maps_root: bool,
}

pub fn epsilon_isometry<S: Scalar>(
    r: &Correspondence,
    x: &FiniteSpace<S>,
    y: &FiniteSpace<S>,
) -> Result<EpsilonIsometry<S>> {
    let (n_x, n_y) = r.dims();
    if n_x != x.n() || n_y != y.n() {
        return Err(Error::Precondition(
            "correspondence dimensions mismatch".into(),
        ));
    }
    let mut map = Vec::with_capacity(n_x);
    for i in 0..n_x {
        if i == x.root() && r.has_root_pair(x.root(), y.root()) {
            map.push(y.root());
            continue;
        }
        let partner = r
            .pairs()
            .iter()
            .find(|&&(a, _)| a == i)
            .map(|&(_, b)| b)
            .expect("correspondence covers X");
        map.push(partner);
    }
    let mut dis_f = S::zero();
    for i in 0..n_x {
        for i2 in 0..n_x {
            let gap = (x.dist(i, i2).clone() - y.dist(map[i], map[i2]).clone()).abs();
            dis_f = dis_f.max_val(gap);
        }
    }
    let covering =
        max_of((0..n_y).map(|j| min_of((0..n_x).map(|i| y.dist(j, map[i]).clone())).unwrap()))
            .unwrap();
    let epsilon = distortion(r, x, y) + covering.clone();
    Ok(EpsilonIsometry {
        maps_root: map[x.root()] == y.root(),
        map,
        distortion: dis_f,
        covering,
        epsilon,
    })
}
