//! The localized Gromov-Hausdorff-Prokhorov distance for boundedly-compact
//! style inputs, together with its integral variant, localized Hausdorff and
//! Prokhorov distances on a fixed pointed ambient space, convergence-criteria
//! evaluation, and the empirical weak distance between collections of spaces.
//!
//! The localization kernel is `a(eps, r; X, Y)`: the best compact matching of
//! the `r`-ball of `X` against pmm-subspaces of `Y` sandwiched between the
//! `(r - eps)`-ball of `Y` and `Y` itself. The distance is then
//! `inf { eps in (0,1] : a(eps, 1/eps) < eps/2 in both directions }` with
//! `inf of nothing := 1`, evaluated by bisection; the predicate is monotone
//! (false up to the distance, true above it), which is what makes bisection
//! sound. Results always carry the bracket, never a bare point estimate.

use crate::cghp::{
    certify, cghp_distance_with, search_exact, CghpCertificate, CostModel, Mode,
    DEFAULT_CELL_BUDGET,
};
use crate::error::{Error, Result};
use crate::flat::{solve_discrepancy, FiniteMeasure, GroundSpace, MarginalMode, ProkhorovResult};
use crate::scalar::{max_of, min_of, Scalar};
use crate::spaces::FiniteSpace;
use std::cmp::Ordering;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    XToY,
    YToX,
}

/// Query for the localization value `a(eps, r; ., .)`.
#[derive(Debug, Clone)]
pub struct LocalizationQuery<S> {
    pub eps: S,
    pub r: S,
    pub direction: Direction,
}

impl<S: Scalar> LocalizationQuery<S> {
    pub fn new(eps: S, r: S, direction: Direction) -> Result<Self> {
        if eps.cmp_total(&S::zero()) != Ordering::Greater {
            return Err(Error::Precondition("eps must be positive".into()));
        }
        if r.cmp_total(&eps) == Ordering::Less {
            return Err(Error::Precondition("r must be at least eps".into()));
        }
        Ok(LocalizationQuery { eps, r, direction })
    }
}

/// Witness of a localization value: the achieving subspace of the second
/// space and the compact-distance certificate against the ball of the first.
#[derive(Debug, Clone)]
pub struct LocalizedWitness<S> {
    pub value: S,
    /// Support of the chosen subspace, in parent indices of the second space.
    pub support: Vec<usize>,
    /// Chosen masses, in support order.
    pub mass_choice: Vec<S>,
    pub certificate: CghpCertificate<S>,
    /// Outer pruning radius used for the support enumeration (`r + 2u` for
    /// the running best `u`, justified by the radius inequality).
    pub prune_radius: S,
}

/// `a(eps, r; X, Y)`: minimum over supports `S` between the `(r-eps)`-ball of
/// `Y` and `Y`, and over mass choices between the inner-ball restriction and
/// the restriction to `S`, of the compact distance from the `r`-ball of `X`.
/// Supports are enumerated (pruned by the radius inequality); per
/// correspondence one joint LP optimizes the plan and the mass choice.
pub fn localized_a<S: Scalar>(
    q: &LocalizationQuery<S>,
    x: &FiniteSpace<S>,
    y: &FiniteSpace<S>,
) -> Result<LocalizedWitness<S>> {
    localized_a_with(q, x, y, DEFAULT_CELL_BUDGET)
}

pub fn localized_a_with<S: Scalar>(
    q: &LocalizationQuery<S>,
    x: &FiniteSpace<S>,
    y: &FiniteSpace<S>,
    budget: usize,
) -> Result<LocalizedWitness<S>> {
    let (x, y) = match q.direction {
        Direction::XToY => (x, y),
        Direction::YToX => (y, x),
    };
    a_search(&q.eps, &q.r, x, y, budget, None)?
        .ok_or_else(|| Error::Precondition("unseeded localization search must succeed".into()))
}

/// Seeded variant: returns a witness only if the value is strictly below
/// `bound`. This is the predicate evaluation used by the bisection.
fn a_search<S: Scalar>(
    eps: &S,
    r: &S,
    x: &FiniteSpace<S>,
    y: &FiniteSpace<S>,
    budget: usize,
    bound: Option<S>,
) -> Result<Option<LocalizedWitness<S>>> {
    let ball_x = x.closed_ball(r);
    let inner = y.ball_support(&(r.clone() - eps.clone()));

    // Best candidate so far: value, support, mass choice, search outcome.
    struct Candidate<S> {
        value: S,
        support: Vec<usize>,
        mass: Vec<S>,
        outcome: crate::cghp::SearchOutcome<S>,
    }
    let mut best_value: Option<S> = bound;
    let mut best: Option<Candidate<S>> = None;

    let try_support = |support: &[usize],
                       best_value: &mut Option<S>,
                       best: &mut Option<Candidate<S>>|
     -> Result<()> {
        let size = ball_x.n() * support.len();
        if size > budget {
            return Err(Error::BudgetExceeded {
                op: "localized subspace search",
                size,
                limit: budget,
            });
        }
        // Radius-based skip: a subspace containing a point at distance d from
        // the root forces a distortion of at least d - r against the r-ball.
        if let Some(bv) = best_value.as_ref() {
            let reach = max_of(support.iter().map(|&j| y.dist(y.root(), j).clone()))
                .unwrap_or_else(S::zero);
            let lb = (reach - r.clone()).half();
            if lb.cmp_total(bv) != Ordering::Less {
                return Ok(());
            }
        }
        let y_side = y.restrict_full(support);
        let lower: Vec<S> = support
            .iter()
            .map(|&j| {
                if inner.contains(&j) {
                    y.mass(j).clone()
                } else {
                    S::zero()
                }
            })
            .collect();
        let upper: Vec<S> = support.iter().map(|&j| y.mass(j).clone()).collect();
        let model = CostModel::Boxed {
            mu: ball_x.masses(),
            lower: &lower,
            upper: &upper,
        };
        if let Some(out) = search_exact(&ball_x, &y_side, &model, best_value.clone())? {
            *best_value = Some(out.value.clone());
            let mass = out
                .col_measure
                .clone()
                .expect("boxed search returns the chosen measure");
            *best = Some(Candidate {
                value: out.value.clone(),
                support: support.to_vec(),
                mass,
                outcome: out,
            });
        }
        Ok(())
    };

    // Natural first candidate: the r-ball of Y.
    let s0 = y.ball_support(r);
    try_support(&s0, &mut best_value, &mut best)?;

    // Support enumeration between the inner ball and the pruned outer set.
    let prune_radius = match &best_value {
        Some(u) => r.clone() + u.clone() + u.clone(),
        None => y.radius(),
    };
    let outer = y.ball_support(&prune_radius);
    let free: Vec<usize> = outer
        .iter()
        .copied()
        .filter(|j| !inner.contains(j))
        .collect();
    if free.len() > 20 {
        return Err(Error::BudgetExceeded {
            op: "localized support enumeration",
            size: free.len(),
            limit: 20,
        });
    }
    for mask in 0u32..(1u32 << free.len()) {
        let mut support = inner.clone();
        for (b, &j) in free.iter().enumerate() {
            if mask >> b & 1 == 1 {
                support.push(j);
            }
        }
        support.sort_unstable();
        if support == s0 {
            continue;
        }
        try_support(&support, &mut best_value, &mut best)?;
    }

    let Some(Candidate {
        value,
        support,
        mass,
        outcome,
    }) = best
    else {
        return Ok(None);
    };
    let realized = y.restrict(&support, mass.clone());
    let certificate = certify(&ball_x, &realized, outcome)?;
    debug_assert!(certificate.value.eq_tol(&value));
    Ok(Some(LocalizedWitness {
        value,
        support,
        mass_choice: mass,
        certificate,
        prune_radius,
    }))
}

/// Predicate outcome with the two directional witnesses when it holds.
pub type PredicateOutcome<S> = (
    bool,
    Option<LocalizedWitness<S>>,
    Option<LocalizedWitness<S>>,
);

/// One evaluation of the bisection predicate
/// `a(eps, 1/eps; X, Y) and a(eps, 1/eps; Y, X) both < eps/2`,
/// with witnesses when it holds.
pub fn ghp_predicate<S: Scalar>(
    eps: &S,
    x: &FiniteSpace<S>,
    y: &FiniteSpace<S>,
    budget: usize,
) -> Result<PredicateOutcome<S>> {
    let r = S::one() / eps.clone();
    let half = eps.clone().half();
    let wxy = a_search(eps, &r, x, y, budget, Some(half.clone()))?;
    if wxy.is_none() {
        return Ok((false, None, None));
    }
    let wyx = a_search(eps, &r, y, x, budget, Some(half))?;
    Ok((wyx.is_some(), wxy, wyx))
}

/// A localized distance with its bisection bracket and the witnesses
/// certifying the predicate at the upper end.
#[derive(Debug, Clone)]
pub struct GhpResult<S> {
    /// Reported value: the certified upper end of the bracket.
    pub value: S,
    pub lower: S,
    pub upper: S,
    pub witness_xy: Option<LocalizedWitness<S>>,
    pub witness_yx: Option<LocalizedWitness<S>>,
}

pub fn ghp_distance<S: Scalar>(
    x: &FiniteSpace<S>,
    y: &FiniteSpace<S>,
    tol: &S,
) -> Result<GhpResult<S>> {
    ghp_distance_with(x, y, tol, DEFAULT_CELL_BUDGET)
}

/// Bisection on `(0, 1]`. The predicate fails on `(0, ghp]` and holds on
/// `(ghp, 1]`, so the final bracket `[lo, hi]` with `hi - lo <= tol`
/// encloses the distance; the value 1 is returned exactly when the predicate
/// already fails at 1.
pub fn ghp_distance_with<S: Scalar>(
    x: &FiniteSpace<S>,
    y: &FiniteSpace<S>,
    tol: &S,
    budget: usize,
) -> Result<GhpResult<S>> {
    if tol.cmp_total(&S::zero()) != Ordering::Greater {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    let one = S::one();
    let (holds, wxy, wyx) = ghp_predicate(&one, x, y, budget)?;
    if !holds {
        return Ok(GhpResult {
            value: one.clone(),
            lower: one.clone(),
            upper: one,
            witness_xy: None,
            witness_yx: None,
        });
    }
    let mut lo = S::zero();
    let mut hi = one;
    let mut witnesses = (wxy, wyx);
    while (hi.clone() - lo.clone()).cmp_total(tol) == Ordering::Greater {
        let mid = (lo.clone() + hi.clone()).half();
        if mid.cmp_total(&lo) != Ordering::Greater || mid.cmp_total(&hi) != Ordering::Less {
            break;
        }
        let (holds, wxy, wyx) = ghp_predicate(&mid, x, y, budget)?;
        if holds {
            hi = mid;
            witnesses = (wxy, wyx);
        } else {
            lo = mid;
        }
    }
    Ok(GhpResult {
        value: hi.clone(),
        lower: lo,
        upper: hi,
        witness_xy: witnesses.0,
        witness_yx: witnesses.1,
    })
}

/// Exact evaluation of the exponentially weighted integral variant
/// `integral of e^{-r} (1 and cghp(ball_r X, ball_r Y)) dr`
/// over the joint ball-breakpoint decomposition. The integrand is piecewise
/// constant for finite spaces, so the integral is a finite sum.
pub fn integral_ghp<S: Scalar>(x: &FiniteSpace<S>, y: &FiniteSpace<S>) -> Result<f64> {
    integral_ghp_with(x, y, DEFAULT_CELL_BUDGET)
}

pub fn integral_ghp_with<S: Scalar>(
    x: &FiniteSpace<S>,
    y: &FiniteSpace<S>,
    budget: usize,
) -> Result<f64> {
    let mut breakpoints: Vec<S> = vec![S::zero()];
    for r in x
        .discontinuity_radii()
        .into_iter()
        .chain(y.discontinuity_radii())
    {
        if !breakpoints.contains(&r) {
            breakpoints.push(r);
        }
    }
    breakpoints.sort_by(|a, b| a.cmp_total(b));

    let mut total = 0.0f64;
    for (k, r) in breakpoints.iter().enumerate() {
        let bx = x.closed_ball(r);
        let by = y.closed_ball(r);
        let value = cghp_distance_with(&bx, &by, Mode::Exact, budget)?.value;
        let c = value.to_f64().min(1.0);
        let left = (-r.to_f64()).exp();
        let weight = match breakpoints.get(k + 1) {
            Some(next) => left - (-next.to_f64()).exp(),
            None => left,
        };
        total += c * weight;
    }
    Ok(total)
}

/// Localized Hausdorff distance between two nonempty subsets of a pointed
/// ambient space, by the same localization scheme: the inner value at level
/// `eps` matches `A` cut to the `1/eps`-ball against compact sets sandwiched
/// between `B`'s `(1/eps - eps)`-ball part and `B`.
pub fn localized_hausdorff<S: Scalar>(
    ambient: &FiniteSpace<S>,
    a: &[usize],
    b: &[usize],
    tol: &S,
) -> Result<S> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    for &i in a.iter().chain(b) {
        if i >= ambient.n() {
            return Err(Error::BadVertex {
                vertex: i,
                n: ambient.n(),
            });
        }
    }
    // None encodes an infinite inner value (matching a nonempty cut against
    // the empty set).
    let inner_value = |from: &[usize], to: &[usize], eps: &S| -> Option<S> {
        let r = S::one() / eps.clone();
        let from_ball: Vec<usize> = from
            .iter()
            .copied()
            .filter(|&i| ambient.dist(ambient.root(), i).cmp_total(&r) != Ordering::Greater)
            .collect();
        let inner_r = r.clone() - eps.clone();
        let to_inner: Vec<usize> = to
            .iter()
            .copied()
            .filter(|&i| ambient.dist(ambient.root(), i).cmp_total(&inner_r) != Ordering::Greater)
            .collect();
        if from_ball.is_empty() {
            return if to_inner.is_empty() {
                Some(S::zero())
            } else {
                None
            };
        }
        let dist_to_set = |i: usize, set: &[usize]| -> S {
            min_of(set.iter().map(|&j| ambient.dist(i, j).clone())).unwrap()
        };
        // Scan candidate levels ascending; the maximal admissible superset
        // minimizes the covering term.
        let mut levels: Vec<S> = vec![S::zero()];
        for &i in from_ball.iter().chain(to.iter()) {
            for &j in from_ball.iter().chain(to.iter()) {
                let d = ambient.dist(i, j).clone();
                if !levels.contains(&d) {
                    levels.push(d);
                }
            }
        }
        levels.sort_by(|p, q| p.cmp_total(q));
        for t in levels {
            if to_inner
                .iter()
                .any(|&j| dist_to_set(j, &from_ball).cmp_total(&t) == Ordering::Greater)
            {
                continue;
            }
            let b_max: Vec<usize> = to
                .iter()
                .copied()
                .filter(|&j| dist_to_set(j, &from_ball).cmp_total(&t) != Ordering::Greater)
                .collect();
            if b_max.is_empty() {
                continue;
            }
            if from_ball
                .iter()
                .all(|&i| dist_to_set(i, &b_max).cmp_total(&t) != Ordering::Greater)
            {
                return Some(t);
            }
        }
        None
    };
    let predicate = |eps: &S| -> bool {
        let half = eps.clone().half();
        let below = |v: Option<S>| match v {
            Some(v) => v.cmp_total(&half) == Ordering::Less,
            None => false,
        };
        below(inner_value(a, b, eps)) && below(inner_value(b, a, eps))
    };
    Ok(localize_by_bisection(predicate, tol))
}

/// Localized Prokhorov distance between two finite measures on a pointed
/// ambient space: the measure analogue of the localized Hausdorff distance.
/// The inner value at level `eps` is the smallest `t` such that some
/// `nu'` sandwiched between `nu` cut to the `(1/eps - eps)`-ball and `nu`
/// satisfies `g(mu cut to the 1/eps-ball, nu', t) <= t`.
pub fn localized_prokhorov<S: Scalar>(
    ambient: &FiniteSpace<S>,
    mu: &[S],
    nu: &[S],
    tol: &S,
) -> Result<S> {
    let n = ambient.n();
    if mu.len() != n || nu.len() != n {
        return Err(Error::GroundMismatch);
    }
    let breakpoints = {
        let mut vals: Vec<S> = vec![S::zero()];
        for i in 0..n {
            for j in 0..n {
                let d = ambient.dist(i, j).clone();
                if !vals.contains(&d) {
                    vals.push(d);
                }
            }
        }
        vals.sort_by(|p, q| p.cmp_total(q));
        vals
    };
    let inner_value = |from: &[S], to: &[S], eps: &S| -> Result<S> {
        let r = S::one() / eps.clone();
        let ball = ambient.ball_support(&r);
        let mu_cut: Vec<S> = (0..n)
            .map(|i| {
                if ball.contains(&i) {
                    from[i].clone()
                } else {
                    S::zero()
                }
            })
            .collect();
        let inner_ball = ambient.ball_support(&(r.clone() - eps.clone()));
        let lower: Vec<S> = (0..n)
            .map(|i| {
                if inner_ball.contains(&i) {
                    to[i].clone()
                } else {
                    S::zero()
                }
            })
            .collect();
        for (idx, b) in breakpoints.iter().enumerate() {
            let far: Vec<bool> = (0..n * n)
                .map(|c| ambient.dist(c / n, c % n).cmp_total(b) == Ordering::Greater)
                .collect();
            let opt = solve_discrepancy(
                n,
                n,
                &far,
                MarginalMode::Slack(&mu_cut),
                MarginalMode::Boxed {
                    lower: &lower,
                    upper: to,
                },
            )?;
            let candidate = b.clone().max_val(opt.value);
            let valid = match breakpoints.get(idx + 1) {
                None => true,
                Some(next) => candidate.cmp_total(next) == Ordering::Less,
            };
            if valid {
                return Ok(candidate);
            }
        }
        unreachable!("the last breakpoint interval always yields a candidate")
    };
    let predicate = |eps: &S| -> bool {
        let half = eps.clone().half();
        let ab = inner_value(mu, nu, eps);
        let ba = inner_value(nu, mu, eps);
        match (ab, ba) {
            (Ok(ab), Ok(ba)) => ab.max_val(ba).cmp_total(&half) == Ordering::Less,
            _ => false,
        }
    };
    Ok(localize_by_bisection(predicate, tol))
}

/// Shared localization bisection: `inf { eps in (0,1] : predicate }` with
/// the empty-infimum convention of returning exactly 1.
fn localize_by_bisection<S: Scalar>(predicate: impl Fn(&S) -> bool, tol: &S) -> S {
    let one = S::one();
    if !predicate(&one) {
        return one;
    }
    let mut lo = S::zero();
    let mut hi = one;
    while (hi.clone() - lo.clone()).cmp_total(tol) == Ordering::Greater {
        let mid = (lo.clone() + hi.clone()).half();
        if mid.cmp_total(&lo) != Ordering::Greater || mid.cmp_total(&hi) != Ordering::Less {
            break;
        }
        if predicate(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvergenceCriteria {
    pub ghp: bool,
    pub balls: bool,
    pub integral: bool,
}

impl Default for ConvergenceCriteria {
    fn default() -> Self {
        ConvergenceCriteria {
            ghp: true,
            balls: true,
            integral: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConvergenceOptions<S> {
    pub criteria: ConvergenceCriteria,
    /// Radii probed for the ball criterion; entries matching a discontinuity
    /// radius of the limit are dropped and reported in `skipped_radii`.
    pub radius_grid: Vec<S>,
    pub tol: S,
    pub budget: usize,
}

#[derive(Debug, Clone)]
pub struct SequenceSummary {
    pub nonincreasing: bool,
    pub last: f64,
}

fn summarize<S: Scalar>(values: &[S]) -> SequenceSummary {
    let nonincreasing = values
        .windows(2)
        .all(|w| w[1].cmp_total(&(w[0].clone() + S::tol())) != Ordering::Greater);
    SequenceSummary {
        nonincreasing,
        last: values.last().map(|v| v.to_f64()).unwrap_or(0.0),
    }
}

/// Numeric convergence report: the requested criterion values along the
/// sequence plus monotone-trend summaries. No asymptotic claim is made; the
/// caller judges the numbers.
#[derive(Debug, Clone)]
pub struct ConvergenceReport<S> {
    pub ghp: Option<(Vec<S>, SequenceSummary)>,
    /// Per continuity radius: the compact distances of the balls.
    pub balls: Option<Vec<(S, Vec<S>, SequenceSummary)>>,
    pub integral: Option<(Vec<f64>, SequenceSummary)>,
    pub skipped_radii: Vec<S>,
}

pub fn check_convergence<S: Scalar>(
    seq: &[FiniteSpace<S>],
    limit: &FiniteSpace<S>,
    opts: &ConvergenceOptions<S>,
) -> Result<ConvergenceReport<S>> {
    if seq.is_empty() {
        return Err(Error::EmptySet);
    }
    let ghp = if opts.criteria.ghp {
        let mut values = Vec::with_capacity(seq.len());
        for xn in seq {
            values.push(ghp_distance_with(xn, limit, &opts.tol, opts.budget)?.value);
        }
        let summary = summarize(&values);
        Some((values, summary))
    } else {
        None
    };

    let mut skipped_radii = Vec::new();
    let balls = if opts.criteria.balls {
        let discontinuities = limit.discontinuity_radii();
        let mut rows = Vec::new();
        for r in &opts.radius_grid {
            if discontinuities.iter().any(|d| d.eq_tol(r)) {
                skipped_radii.push(r.clone());
                continue;
            }
            let limit_ball = limit.closed_ball(r);
            let mut values = Vec::with_capacity(seq.len());
            for xn in seq {
                let ball_n = xn.closed_ball(r);
                values.push(
                    cghp_distance_with(&ball_n, &limit_ball, Mode::Exact, opts.budget)?.value,
                );
            }
            let summary = summarize(&values);
            rows.push((r.clone(), values, summary));
        }
        Some(rows)
    } else {
        None
    };

    let integral = if opts.criteria.integral {
        let mut values = Vec::with_capacity(seq.len());
        for xn in seq {
            values.push(integral_ghp_with(xn, limit, opts.budget)?);
        }
        let nonincreasing = values.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        let last = values.last().copied().unwrap_or(0.0);
        Some((
            values,
            SequenceSummary {
                nonincreasing,
                last,
            },
        ))
    } else {
        None
    };

    Ok(ConvergenceReport {
        ghp,
        balls,
        integral,
        skipped_radii,
    })
}

/// Prokhorov distance between uniform empirical measures on two collections,
/// over an arbitrary distance function between spaces. The pairwise values
/// form a pseudometric ground space, validated up to `slack`.
pub fn empirical_prokhorov_with<S: Scalar>(
    a: &[FiniteSpace<S>],
    b: &[FiniteSpace<S>],
    mut metric: impl FnMut(&FiniteSpace<S>, &FiniteSpace<S>) -> Result<S>,
    slack: &S,
) -> Result<ProkhorovResult<S>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let all: Vec<&FiniteSpace<S>> = a.iter().chain(b.iter()).collect();
    let n = all.len();
    let mut dist = vec![vec![S::zero(); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = metric(all[i], all[j])?;
            dist[i][j] = d.clone();
            dist[j][i] = d;
        }
    }
    // Symmetry is exact by construction; the triangle inequality holds up to
    // the approximation slack of the supplied distance values.
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let via = dist[i][j].clone() + dist[j][k].clone() + slack.clone();
                if dist[i][k].cmp_total(&via) == Ordering::Greater {
                    return Err(crate::error::ValidationError::TriangleViolation { i, j, k }.into());
                }
            }
        }
    }
    let ground = Arc::new(GroundSpace::new_unchecked(dist));
    let mut mu_mass = vec![S::zero(); n];
    let mut nu_mass = vec![S::zero(); n];
    let wa = S::one() / S::from_int(a.len() as i64);
    let wb = S::one() / S::from_int(b.len() as i64);
    for i in 0..a.len() {
        mu_mass[i] = wa.clone();
    }
    for j in 0..b.len() {
        nu_mass[a.len() + j] = wb.clone();
    }
    let mu = FiniteMeasure::new(ground.clone(), mu_mass)?;
    let nu = FiniteMeasure::new(ground, nu_mass)?;
    crate::flat::prokhorov_distance(&mu, &nu)
}

/// Prokhorov distance between the uniform empirical measures of two
/// collections, with the localized distance between member spaces as the
/// ground metric.
pub fn empirical_weak_distance<S: Scalar>(
    a: &[FiniteSpace<S>],
    b: &[FiniteSpace<S>],
    tol: &S,
    budget: usize,
) -> Result<ProkhorovResult<S>> {
    let slack = tol.clone() + S::tol() + S::tol();
    empirical_prokhorov_with(
        a,
        b,
        |x, y| Ok(ghp_distance_with(x, y, tol, budget)?.value),
        &slack,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use crate::spaces::validate_space;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn counting_pair(n: i64) -> (FiniteSpace<Rational>, FiniteSpace<Rational>) {
        let x = FiniteSpace::<Rational>::line(&[0, n], 0, &[1, 1]);
        let y = validate_space(vec![vec![rat(0, 1)]], 0, vec![rat(1, 1)], None).unwrap();
        (x, y)
    }

    #[test]
    fn localized_a_shrinks_with_small_balls() {
        // {0, n} with unit masses against a single unit atom: with the ball
        // radius past n the far point is visible and a = max(n/2, 1); with
        // the ball radius below n it vanishes and a = 0.
        let n = 4i64;
        let (x, y) = counting_pair(n);
        let q = LocalizationQuery::new(rat(1, 5), rat(5, 1), Direction::XToY).unwrap();
        let w = localized_a(&q, &x, &y).unwrap();
        assert_eq!(w.value, rat(2, 1)); // max(n/2, 1) = 2

        let q = LocalizationQuery::new(rat(1, 3), rat(3, 1), Direction::XToY).unwrap();
        let w = localized_a(&q, &x, &y).unwrap();
        assert_eq!(w.value, rat(0, 1));
    }

    #[test]
    fn localized_a_finds_isometric_copies() {
        // Y contains an isometric copy of the r-ball of X with matching
        // masses, so the localization value is zero.
        let x = FiniteSpace::<Rational>::line(&[0, 1, 9], 0, &[1, 2, 5]);
        let y = FiniteSpace::<Rational>::line(&[0, 1, 6], 0, &[1, 2, 3]);
        let q = LocalizationQuery::new(rat(1, 2), rat(2, 1), Direction::XToY).unwrap();
        let w = localized_a(&q, &x, &y).unwrap();
        assert_eq!(w.value, rat(0, 1));
        assert_eq!(w.support, vec![0, 1]);
    }

    #[test]
    fn ghp_on_identical_spaces_collapses() {
        let x = FiniteSpace::<Rational>::line(&[0, 1, 3], 0, &[1, 0, 2]);
        let res = ghp_distance(&x, &x, &rat(1, 1024)).unwrap();
        assert_eq!(res.lower, rat(0, 1));
        assert!(res.upper <= rat(1, 1024));
    }

    #[test]
    fn ghp_two_point_collapse_has_closed_form() {
        // {0, n} with counting measure against a single unit atom: the
        // predicate flips exactly at 1/n.
        for n in [2i64, 5] {
            let (x, y) = counting_pair(n);
            let tol = rat(1, 1 << 16);
            let res = ghp_distance(&x, &y, &tol).unwrap();
            let expected = rat(1, n);
            assert!((res.value.clone() - expected.clone()).abs() <= tol);
            assert!(res.lower <= expected && expected <= res.upper);
        }
    }

    #[test]
    fn ghp_of_far_singletons_hits_the_empty_infimum() {
        // Root-only masses at distance 40: no localization level works, so
        // the convention value 1 is returned exactly.
        let x = FiniteSpace::<Rational>::line(&[0, 40], 0, &[0, 3]);
        let y = FiniteSpace::<Rational>::line(&[0], 0, &[5]);
        let res = ghp_distance(&x, &y, &rat(1, 1000)).unwrap();
        assert_eq!(res.value, rat(1, 1));
    }

    #[test]
    fn integral_examples() {
        let x = FiniteSpace::<Rational>::line(&[0, 1, 3], 0, &[1, 0, 2]);
        assert_eq!(integral_ghp(&x, &x).unwrap(), 0.0);

        // {0} vs {0,1} with zero measures: integrand is 0 on [0,1) and 1/2
        // afterwards, so the integral is e^{-1}/2.
        let a = FiniteSpace::<Rational>::line(&[0], 0, &[0]);
        let b = FiniteSpace::<Rational>::line(&[0, 1], 0, &[0, 0]);
        let got = integral_ghp(&a, &b).unwrap();
        assert!((got - 0.5 * (-1.0f64).exp()).abs() < 1e-12);

        // Tail decay: {0, n} vs {0} decreases monotonically in n.
        let mut prev = f64::INFINITY;
        for n in [2i64, 4, 8] {
            let x = FiniteSpace::<Rational>::line(&[0, n], 0, &[0, 0]);
            let v = integral_ghp(&x, &a).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn localized_hausdorff_examples() {
        let amb = FiniteSpace::<Rational>::line(&[0, 1, 4, 9], 0, &[0, 0, 0, 0]);
        let tol = rat(1, 1 << 14);
        let same = localized_hausdorff(&amb, &[1, 2], &[1, 2], &tol).unwrap();
        assert!(same <= tol);

        // {0} vs {0, n}: the far point hides until the window reaches it.
        let n = 9i64;
        let a = vec![0usize];
        let b = vec![0usize, 3];
        let v = localized_hausdorff(&amb, &a, &b, &tol).unwrap();
        assert!((v - rat(1, n)).abs() <= tol);

        // Far disjoint sets at mutual distance > 2: no level works.
        let v = localized_hausdorff(&amb, &[1], &[2], &tol).unwrap();
        assert_eq!(v, rat(1, 1));
    }

    #[test]
    fn localized_prokhorov_examples() {
        let amb = FiniteSpace::<Rational>::line(&[0, 8], 0, &[0, 0]);
        let tol = rat(1, 1 << 14);
        let mu = vec![rat(1, 1), rat(0, 1)];
        let v = localized_prokhorov(&amb, &mu, &mu, &tol).unwrap();
        assert!(v <= tol);

        // A far atom is invisible until the window reaches distance 8.
        let nu = vec![rat(1, 1), rat(1, 1)];
        let v = localized_prokhorov(&amb, &mu, &nu, &tol).unwrap();
        assert!((v - rat(1, 8)).abs() <= tol);

        // Doubled root mass never comes within eps/2 of any level.
        let double = vec![rat(2, 1), rat(0, 1)];
        let v = localized_prokhorov(&amb, &mu, &double, &tol).unwrap();
        assert_eq!(v, rat(1, 1));
    }

    #[test]
    fn constant_sequence_reports_zero() {
        let x = FiniteSpace::<Rational>::line(&[0, 2], 0, &[1, 1]);
        let opts = ConvergenceOptions {
            criteria: ConvergenceCriteria::default(),
            radius_grid: vec![rat(1, 2), rat(3, 1)],
            tol: rat(1, 1 << 12),
            budget: DEFAULT_CELL_BUDGET,
        };
        let report = check_convergence(&[x.clone(), x.clone()], &x, &opts).unwrap();
        let (ghp_vals, _) = report.ghp.unwrap();
        assert!(ghp_vals.iter().all(|v| *v <= rat(1, 1 << 12)));
        let (int_vals, _) = report.integral.unwrap();
        assert!(int_vals.iter().all(|v| *v == 0.0));
        for (_, vals, _) in report.balls.unwrap() {
            assert!(vals.iter().all(|v| *v == rat(0, 1)));
        }
        // Radius 2 is a discontinuity radius of the limit.
        let opts2 = ConvergenceOptions {
            radius_grid: vec![rat(2, 1)],
            ..opts
        };
        let report = check_convergence(std::slice::from_ref(&x), &x, &opts2).unwrap();
        assert_eq!(report.skipped_radii, vec![rat(2, 1)]);
        assert!(report.balls.unwrap().is_empty());
    }

    #[test]
    fn empirical_weak_distance_examples() {
        let x = FiniteSpace::<Rational>::line(&[0, 1], 0, &[1, 1]);
        let y = FiniteSpace::<Rational>::line(&[0, 7], 0, &[1, 1]);
        let tol = rat(1, 1 << 14);
        let same =
            empirical_weak_distance(std::slice::from_ref(&x), std::slice::from_ref(&x), &tol, 25)
                .unwrap();
        assert!(same.p <= tol);

        // n copies against n copies reduces to two atoms at distance ghp.
        let g = ghp_distance(&x, &y, &tol).unwrap().value;
        let copies_a = vec![x.clone(), x.clone()];
        let copies_b = vec![y.clone(), y.clone()];
        let res = empirical_prokhorov_with(
            &copies_a,
            &copies_b,
            |p, q| Ok(ghp_distance(p, q, &tol)?.value),
            &(tol.clone() + tol.clone()),
        )
        .unwrap();
        assert_eq!(res.p, g.min_val(rat(1, 1)));
    }
}
