//! Small deterministic optimization kernels: a dense two-phase simplex and an
//! Edmonds-Karp max-flow, both generic over the numeric backend.
//!
//! Problems in this crate are tiny (tens of variables), so everything is
//! dense and the pivoting rule is Bland's: entering variable of smallest
//! index with negative reduced cost, leaving row resolved by smallest basis
//! variable index. That makes every solve deterministic and cycle-free, which
//! the oracle-equality tests rely on.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use std::cmp::Ordering;
use std::collections::VecDeque;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct LpConstraint<S> {
    pub coeffs: Vec<S>,
    pub relation: Relation,
    pub rhs: S,
}

/// Minimize `objective . x` subject to linear constraints and per-variable
/// bounds. Lower bounds default to zero; `None` upper bound means unbounded
/// above.
#[derive(Debug, Clone)]
pub struct LpProblem<S> {
    pub num_vars: usize,
    pub objective: Vec<S>,
    pub constraints: Vec<LpConstraint<S>>,
    pub lower: Vec<S>,
    pub upper: Vec<Option<S>>,
}

impl<S: Scalar> LpProblem<S> {
    pub fn new(num_vars: usize) -> Self {
        LpProblem {
            num_vars,
            objective: vec![S::zero(); num_vars],
            constraints: Vec::new(),
            lower: vec![S::zero(); num_vars],
            upper: vec![None; num_vars],
        }
    }

    pub fn constrain(&mut self, coeffs: Vec<S>, relation: Relation, rhs: S) {
        debug_assert_eq!(coeffs.len(), self.num_vars);
        self.constraints.push(LpConstraint {
            coeffs,
            relation,
            rhs,
        });
    }

    /// Constraint with only a few nonzero coefficients.
    pub fn constrain_sparse(&mut self, terms: &[(usize, S)], relation: Relation, rhs: S) {
        let mut coeffs = vec![S::zero(); self.num_vars];
        for (j, c) in terms {
            coeffs[*j] = c.clone();
        }
        self.constrain(coeffs, relation, rhs);
    }
}

#[derive(Debug, Clone)]
pub struct LpSolution<S> {
    pub value: S,
    pub point: Vec<S>,
}

#[derive(Debug, Clone)]
pub enum LpOutcome<S> {
    Optimal(LpSolution<S>),
    Infeasible,
    Unbounded,
}

impl<S: Scalar> LpOutcome<S> {
    pub fn optimal(self) -> Result<LpSolution<S>> {
        match self {
            LpOutcome::Optimal(sol) => Ok(sol),
            LpOutcome::Infeasible => Err(Error::Infeasible),
            LpOutcome::Unbounded => Err(Error::Unbounded),
        }
    }
}

struct Tableau<S> {
    rows: Vec<Vec<S>>,
    basis: Vec<usize>,
    cost: Vec<S>,
    ncols: usize,
}

impl<S: Scalar> Tableau<S> {
    fn pivot(&mut self, row: usize, col: usize) {
        let pivot = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            *v /= pivot.clone();
        }
        for r in 0..self.rows.len() {
            if r == row {
                continue;
            }
            let factor = self.rows[r][col].clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..=self.ncols {
                let delta = factor.clone() * self.rows[row][j].clone();
                self.rows[r][j] -= delta;
            }
        }
        let factor = self.cost[col].clone();
        if !factor.is_zero() {
            for j in 0..=self.ncols {
                let delta = factor.clone() * self.rows[row][j].clone();
                self.cost[j] -= delta;
            }
        }
        self.basis[row] = col;
    }

    /// Bland's rule iteration until optimal or unbounded.
    fn run(&mut self, allowed: &[bool]) -> bool {
        loop {
            let mut entering = None;
            for j in 0..self.ncols {
                if !allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let neg_tol = S::zero() - S::tol();
                if self.cost[j].cmp_total(&neg_tol) == Ordering::Less {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else {
                return true;
            };
            let mut leave: Option<(usize, S)> = None;
            for r in 0..self.rows.len() {
                let a = self.rows[r][col].clone();
                if a.cmp_total(&S::tol()) != Ordering::Greater {
                    continue;
                }
                let ratio = self.rows[r][self.ncols].clone() / a;
                let better = match &leave {
                    None => true,
                    Some((best_row, best_ratio)) => match ratio.cmp_total(best_ratio) {
                        Ordering::Less => true,
                        Ordering::Greater => false,
                        Ordering::Equal => self.basis[r] < self.basis[*best_row],
                    },
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((row, _)) = leave else {
                return false;
            };
            self.pivot(row, col);
        }
    }
}

/// Deterministic exact/tolerant simplex. The reported value is re-evaluated
/// as `objective . point`, so re-substitution reproduces it by construction.
pub fn lp_solve<S: Scalar>(p: &LpProblem<S>) -> Result<LpOutcome<S>> {
    let n = p.num_vars;
    if p.objective.len() != n || p.lower.len() != n || p.upper.len() != n {
        return Err(Error::Precondition(
            "objective/bounds length mismatch".into(),
        ));
    }
    for c in &p.constraints {
        if c.coeffs.len() != n {
            return Err(Error::Precondition(
                "constraint coefficient length mismatch".into(),
            ));
        }
    }

    // Shift variables so lower bounds become zero; upper bounds become rows.
    let mut rows: Vec<(Vec<S>, Relation, S)> = Vec::new();
    for c in &p.constraints {
        let shift: S = c
            .coeffs
            .iter()
            .zip(&p.lower)
            .map(|(a, l)| a.clone() * l.clone())
            .sum();
        rows.push((c.coeffs.clone(), c.relation, c.rhs.clone() - shift));
    }
    for j in 0..n {
        if let Some(u) = &p.upper[j] {
            let mut coeffs = vec![S::zero(); n];
            coeffs[j] = S::one();
            rows.push((coeffs, Relation::Le, u.clone() - p.lower[j].clone()));
        }
    }

    let m = rows.len();
    // Column layout: structural | slack/surplus | artificial | rhs.
    let mut n_slack = 0;
    for (_, rel, _) in &rows {
        if *rel != Relation::Eq {
            n_slack += 1;
        }
    }
    let ncols = n + n_slack + m;
    let mut tab = Tableau {
        rows: vec![vec![S::zero(); ncols + 1]; m],
        basis: vec![0; m],
        cost: vec![S::zero(); ncols + 1],
        ncols,
    };

    let mut slack_at = n;
    let mut n_artificial = 0;
    for (r, (coeffs, rel, rhs)) in rows.into_iter().enumerate() {
        let flip = rhs.cmp_total(&S::zero()) == Ordering::Less;
        let sign = if flip { S::zero() - S::one() } else { S::one() };
        for (j, a) in coeffs.into_iter().enumerate() {
            tab.rows[r][j] = sign.clone() * a;
        }
        tab.rows[r][ncols] = sign.clone() * rhs;
        let rel = if !flip {
            rel
        } else {
            match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            }
        };
        match rel {
            Relation::Le => {
                tab.rows[r][slack_at] = S::one();
                tab.basis[r] = slack_at;
                slack_at += 1;
            }
            Relation::Ge => {
                tab.rows[r][slack_at] = S::zero() - S::one();
                slack_at += 1;
                let art = n + n_slack + n_artificial;
                tab.rows[r][art] = S::one();
                tab.basis[r] = art;
                n_artificial += 1;
            }
            Relation::Eq => {
                let art = n + n_slack + n_artificial;
                tab.rows[r][art] = S::one();
                tab.basis[r] = art;
                n_artificial += 1;
            }
        }
    }
    let art_start = n + n_slack;
    let art_end = n + n_slack + n_artificial;

    // Phase 1: minimize the sum of artificial variables.
    if n_artificial > 0 {
        for j in art_start..art_end {
            tab.cost[j] = S::one();
        }
        for r in 0..m {
            if tab.basis[r] >= art_start {
                for j in 0..=ncols {
                    let delta = tab.rows[r][j].clone();
                    tab.cost[j] -= delta;
                }
            }
        }
        let allowed = vec![true; ncols];
        tab.run(&allowed);
        let phase1 = S::zero() - tab.cost[ncols].clone();
        if phase1.cmp_total(&S::tol()) == Ordering::Greater {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive remaining artificials out of the basis where possible.
        for r in 0..m {
            if tab.basis[r] >= art_start {
                let col = (0..art_start).find(|j| !tab.rows[r][*j].is_zero_tol());
                if let Some(col) = col {
                    tab.pivot(r, col);
                }
            }
        }
    }

    // Phase 2: original objective priced out over the current basis.
    for j in 0..=ncols {
        tab.cost[j] = S::zero();
    }
    for j in 0..n {
        tab.cost[j] = p.objective[j].clone();
    }
    for r in 0..m {
        let b = tab.basis[r];
        if b < n {
            let factor = p.objective[b].clone();
            if !factor.is_zero() {
                for j in 0..=ncols {
                    let delta = factor.clone() * tab.rows[r][j].clone();
                    tab.cost[j] -= delta;
                }
            }
        }
    }
    // Artificials never re-enter. Any artificial still basic after the
    // drive-out loop sits in an all-zero redundant row and stays at zero.
    let mut allowed = vec![true; ncols];
    for j in art_start..art_end {
        allowed[j] = false;
    }
    if !tab.run(&allowed) {
        return Ok(LpOutcome::Unbounded);
    }

    let mut point = p.lower.clone();
    for r in 0..m {
        if tab.basis[r] < n {
            point[tab.basis[r]] += tab.rows[r][ncols].clone();
        }
    }
    let value: S = p
        .objective
        .iter()
        .zip(&point)
        .map(|(c, x)| c.clone() * x.clone())
        .sum();
    Ok(LpOutcome::Optimal(LpSolution { value, point }))
}

/// Arc capacity; infinite capacities are an explicit marker, never a
/// sentinel number.
#[derive(Debug, Clone, PartialEq)]
pub enum Capacity<S> {
    Finite(S),
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct FlowArc<S> {
    pub from: usize,
    pub to: usize,
    pub capacity: Capacity<S>,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork<S> {
    pub nodes: usize,
    pub source: usize,
    pub sink: usize,
    pub arcs: Vec<FlowArc<S>>,
}

impl<S: Scalar> FlowNetwork<S> {
    pub fn new(nodes: usize, source: usize, sink: usize) -> Self {
        FlowNetwork {
            nodes,
            source,
            sink,
            arcs: Vec::new(),
        }
    }

    pub fn arc(&mut self, from: usize, to: usize, capacity: Capacity<S>) {
        debug_assert!(from < self.nodes && to < self.nodes);
        self.arcs.push(FlowArc { from, to, capacity });
    }
}

#[derive(Debug, Clone)]
pub struct MaxFlowResult<S> {
    pub value: S,
    /// Flow along each arc, in input order.
    pub flows: Vec<S>,
    /// Min-cut certificate: nodes on the source side of the residual graph.
    pub source_side: Vec<bool>,
}

impl<S: Scalar> MaxFlowResult<S> {
    /// Capacity of the returned cut; equals `value` for an optimal flow.
    pub fn cut_capacity(&self, net: &FlowNetwork<S>) -> Capacity<S> {
        let mut total = S::zero();
        for arc in &net.arcs {
            if self.source_side[arc.from] && !self.source_side[arc.to] {
                match &arc.capacity {
                    Capacity::Finite(c) => total += c.clone(),
                    Capacity::Unbounded => return Capacity::Unbounded,
                }
            }
        }
        Capacity::Finite(total)
    }
}

/// Edmonds-Karp: shortest augmenting paths in deterministic arc order.
pub fn max_flow<S: Scalar>(net: &FlowNetwork<S>) -> Result<MaxFlowResult<S>> {
    if net.source == net.sink {
        return Err(Error::Precondition("source equals sink".into()));
    }
    for arc in &net.arcs {
        if arc.from >= net.nodes || arc.to >= net.nodes {
            return Err(Error::BadVertex {
                vertex: arc.from.max(arc.to),
                n: net.nodes,
            });
        }
        if let Capacity::Finite(c) = &arc.capacity {
            if c.cmp_total(&S::zero()) == Ordering::Less {
                return Err(Error::Precondition("negative capacity".into()));
            }
        }
    }

    let mut out: Vec<Vec<usize>> = vec![Vec::new(); net.nodes];
    let mut into: Vec<Vec<usize>> = vec![Vec::new(); net.nodes];
    for (idx, arc) in net.arcs.iter().enumerate() {
        out[arc.from].push(idx);
        into[arc.to].push(idx);
    }
    let mut flow: Vec<S> = vec![S::zero(); net.arcs.len()];

    let forward_residual = |arc: &FlowArc<S>, f: &S| -> Option<Capacity<S>> {
        match &arc.capacity {
            Capacity::Unbounded => Some(Capacity::Unbounded),
            Capacity::Finite(c) => {
                let r = c.clone() - f.clone();
                (r.cmp_total(&S::tol()) == Ordering::Greater).then_some(Capacity::Finite(r))
            }
        }
    };

    let mut value = S::zero();
    loop {
        // BFS on the residual graph; prev[v] = (arc index, is_forward).
        let mut prev: Vec<Option<(usize, bool)>> = vec![None; net.nodes];
        let mut seen = vec![false; net.nodes];
        seen[net.source] = true;
        let mut queue = VecDeque::from([net.source]);
        while let Some(u) = queue.pop_front() {
            if u == net.sink {
                break;
            }
            for &e in &out[u] {
                let v = net.arcs[e].to;
                if !seen[v] && forward_residual(&net.arcs[e], &flow[e]).is_some() {
                    seen[v] = true;
                    prev[v] = Some((e, true));
                    queue.push_back(v);
                }
            }
            for &e in &into[u] {
                let v = net.arcs[e].from;
                if !seen[v] && flow[e].cmp_total(&S::tol()) == Ordering::Greater {
                    seen[v] = true;
                    prev[v] = Some((e, false));
                    queue.push_back(v);
                }
            }
        }
        if !seen[net.sink] {
            return Ok(MaxFlowResult {
                value,
                flows: flow,
                source_side: seen,
            });
        }
        // Bottleneck along the path.
        let mut bottleneck: Option<S> = None;
        let mut v = net.sink;
        while v != net.source {
            let (e, fwd) = prev[v].unwrap();
            let r = if fwd {
                match forward_residual(&net.arcs[e], &flow[e]).unwrap() {
                    Capacity::Finite(r) => Some(r),
                    Capacity::Unbounded => None,
                }
            } else {
                Some(flow[e].clone())
            };
            if let Some(r) = r {
                bottleneck = Some(match bottleneck {
                    None => r,
                    Some(b) => b.min_val(r),
                });
            }
            v = if fwd {
                net.arcs[e].from
            } else {
                net.arcs[e].to
            };
        }
        let Some(delta) = bottleneck else {
            return Err(Error::UnboundedFlow);
        };
        let mut v = net.sink;
        while v != net.source {
            let (e, fwd) = prev[v].unwrap();
            if fwd {
                flow[e] += delta.clone();
                v = net.arcs[e].from;
            } else {
                flow[e] -= delta.clone();
                v = net.arcs[e].to;
            }
        }
        value += delta;
    }
}
