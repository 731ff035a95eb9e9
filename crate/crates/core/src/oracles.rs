//! Brute-force reference implementations used as ground truth in tests.
//!
//! These deliberately share no search logic with the optimized paths: the
//! Prokhorov oracle evaluates the neighborhood definition over all subsets,
//! the compact-distance oracle enumerates every root-containing covering
//! relation without pruning, and the localization oracle enumerates supports
//! and relations directly. Single-threaded, deterministic, and slow by
//! design.

use crate::error::{Error, Result};
use crate::flat::{min_discrepancy_flow, solve_discrepancy, FiniteMeasure, MarginalMode};
use crate::scalar::Scalar;
use crate::spaces::FiniteSpace;
use std::cmp::Ordering;

/// Direct evaluation of the Prokhorov definition: the smallest `eps` in the
/// finite critical set such that `mu(A) <= nu(A^eps) + eps` and vice versa
/// for all `2^n` subsets `A` (closed neighborhoods use `<=`).
///
/// The critical set holds every value at which some constraint can flip:
/// the pairwise distances, the mass differences `|mu(A) - nu(B)|` with `B`
/// ranging over neighborhoods of `A` (all subset pairs for tiny grounds),
/// and the midpoints between consecutive candidates as a guard against
/// open/closed boundary mistakes. The passing set is upward closed and
/// attained, so the scan is a binary search.
pub fn prokhorov_bruteforce<S: Scalar>(mu: &FiniteMeasure<S>, nu: &FiniteMeasure<S>) -> Result<S> {
    let ground = mu.ground();
    if !std::sync::Arc::ptr_eq(ground, nu.ground()) && **ground != **nu.ground() {
        return Err(Error::GroundMismatch);
    }
    let n = ground.n();
    if n > 12 {
        return Err(Error::BudgetExceeded {
            op: "prokhorov brute force",
            size: n,
            limit: 12,
        });
    }
    let masks = 1usize << n;

    // Subset sums.
    let mut mu_sum = vec![S::zero(); masks];
    let mut nu_sum = vec![S::zero(); masks];
    for m in 1..masks {
        let low = m.trailing_zeros() as usize;
        let rest = m & (m - 1);
        mu_sum[m] = mu_sum[rest].clone() + mu.mass()[low].clone();
        nu_sum[m] = nu_sum[rest].clone() + nu.mass()[low].clone();
    }

    let distances = ground.distance_breakpoints();
    let neighborhood = |set: usize, eps: &S| -> usize {
        let mut out = 0usize;
        for i in 0..n {
            if set >> i & 1 == 1 {
                for j in 0..n {
                    if ground.dist(i, j).cmp_total(eps) != Ordering::Greater {
                        out |= 1 << j;
                    }
                }
            }
        }
        out
    };

    // Candidate levels.
    let mut candidates: Vec<S> = vec![S::zero()];
    let push = |v: S, candidates: &mut Vec<S>| {
        if v.cmp_total(&S::zero()) != Ordering::Less && !candidates.contains(&v) {
            candidates.push(v);
        }
    };
    for d in &distances {
        push(d.clone(), &mut candidates);
    }
    if n <= 8 {
        for a in 0..masks {
            for b in 0..masks {
                push(
                    (mu_sum[a].clone() - nu_sum[b].clone()).abs(),
                    &mut candidates,
                );
            }
        }
    } else {
        // Larger grounds: only neighborhoods of A can bind, and they change
        // at distance levels only.
        for a in 0..masks {
            for d in &distances {
                let na = neighborhood(a, d);
                push(
                    (mu_sum[a].clone() - nu_sum[na].clone()).abs(),
                    &mut candidates,
                );
                push(
                    (nu_sum[a].clone() - mu_sum[na].clone()).abs(),
                    &mut candidates,
                );
            }
        }
    }
    candidates.sort_by(|p, q| p.cmp_total(q));
    let mut with_midpoints = Vec::with_capacity(candidates.len() * 2);
    for (k, c) in candidates.iter().enumerate() {
        with_midpoints.push(c.clone());
        if let Some(next) = candidates.get(k + 1) {
            with_midpoints.push((c.clone() + next.clone()).half());
        }
    }

    let passes = |eps: &S| -> bool {
        for a in 0..masks {
            let na = neighborhood(a, eps);
            if mu_sum[a].cmp_total(&(nu_sum[na].clone() + eps.clone())) == Ordering::Greater {
                return false;
            }
            if nu_sum[a].cmp_total(&(mu_sum[na].clone() + eps.clone())) == Ordering::Greater {
                return false;
            }
        }
        true
    };

    // The passing set is an up-set containing the top candidate.
    let mut lo = 0usize;
    let mut hi = with_midpoints.len() - 1;
    debug_assert!(passes(&with_midpoints[hi]));
    if passes(&with_midpoints[0]) {
        return Ok(with_midpoints[0].clone());
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if passes(&with_midpoints[mid]) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(with_midpoints[hi].clone())
}

/// Visit every root-containing relation covering both sides, carrying the
/// exact distortion along the enumeration path. No pruning.
fn for_each_covering_relation<S: Scalar>(
    x: &FiniteSpace<S>,
    y: &FiniteSpace<S>,
    mut visit: impl FnMut(&[(usize, usize)], &S),
) {
    let (nx, ny) = (x.n(), y.n());
    let root_pair = (x.root(), y.root());
    let cells: Vec<(usize, usize)> = (0..nx)
        .flat_map(|i| (0..ny).map(move |j| (i, j)))
        .filter(|&c| c != root_pair)
        .collect();

    struct Enumerate<'a, S: Scalar, F: FnMut(&[(usize, usize)], &S)> {
        x: &'a FiniteSpace<S>,
        y: &'a FiniteSpace<S>,
        cells: &'a [(usize, usize)],
        chosen: Vec<(usize, usize)>,
        row_cover: Vec<usize>,
        col_cover: Vec<usize>,
        visit: F,
    }
    impl<S: Scalar, F: FnMut(&[(usize, usize)], &S)> Enumerate<'_, S, F> {
        fn run(&mut self, pos: usize, dis: S) {
            if pos == self.cells.len() {
                if self.row_cover.iter().all(|&c| c > 0) && self.col_cover.iter().all(|&c| c > 0) {
                    (self.visit)(&self.chosen, &dis);
                }
                return;
            }
            let (i, j) = self.cells[pos];
            // Cell excluded.
            self.run(pos + 1, dis.clone());
            // Cell included.
            let mut new_dis = dis;
            for &(i2, j2) in &self.chosen {
                let gap = (self.x.dist(i, i2).clone() - self.y.dist(j, j2).clone()).abs();
                new_dis = new_dis.max_val(gap);
            }
            self.chosen.push((i, j));
            self.row_cover[i] += 1;
            self.col_cover[j] += 1;
            self.run(pos + 1, new_dis);
            self.chosen.pop();
            self.row_cover[i] -= 1;
            self.col_cover[j] -= 1;
        }
    }

    let mut row_cover = vec![0usize; nx];
    let mut col_cover = vec![0usize; ny];
    row_cover[root_pair.0] = 1;
    col_cover[root_pair.1] = 1;
    let mut e = Enumerate {
        x,
        y,
        cells: &cells,
        chosen: vec![root_pair],
        row_cover,
        col_cover,
        visit: &mut visit,
    };
    e.run(0, S::zero());
}

/// Exhaustive compact-distance oracle: the exact minimum over all
/// root-containing covering relations of
/// `max(distortion/2, min_alpha D(alpha) + alpha(R^c))`.
pub fn cghp_bruteforce<S: Scalar>(x: &FiniteSpace<S>, y: &FiniteSpace<S>) -> Result<S> {
    let size = x.n() * y.n();
    if size > 16 {
        return Err(Error::BudgetExceeded {
            op: "cghp brute force",
            size,
            limit: 16,
        });
    }
    let (nx, ny) = (x.n(), y.n());
    let mut best: Option<S> = None;
    for_each_covering_relation(x, y, |pairs, dis| {
        let cost = min_discrepancy_flow(
            nx,
            ny,
            |i, j| pairs.contains(&(i, j)),
            x.masses(),
            y.masses(),
        );
        let value = dis.clone().half().max_val(cost);
        best = match best.take() {
            None => Some(value),
            Some(b) => Some(b.min_val(value)),
        };
    });
    best.ok_or(Error::EmptySet)
}

/// Zero-measure reduction oracle: half the minimum distortion over all
/// root-containing covering relations.
pub fn min_distortion_bruteforce<S: Scalar>(x: &FiniteSpace<S>, y: &FiniteSpace<S>) -> Result<S> {
    let size = x.n() * y.n();
    if size > 16 {
        return Err(Error::BudgetExceeded {
            op: "distortion brute force",
            size,
            limit: 16,
        });
    }
    let mut best: Option<S> = None;
    for_each_covering_relation(x, y, |_, dis| {
        best = match best.take() {
            None => Some(dis.clone()),
            Some(b) => Some(b.min_val(dis.clone())),
        };
    });
    best.map(|d| d.half()).ok_or(Error::EmptySet)
}

/// First-principles evaluation of the localization value
/// `a(eps, r; X, Y) < bound`: enumerate every support between the inner ball
/// and the whole second space, every covering relation, and decide the inner
/// optimum with the joint LP over plan and mass choice. No radius pruning.
pub fn a_below_bruteforce<S: Scalar>(
    eps: &S,
    r: &S,
    x: &FiniteSpace<S>,
    y: &FiniteSpace<S>,
    bound: &S,
) -> Result<bool> {
    let ball_x = x.closed_ball(r);
    let inner = y.ball_support(&(r.clone() - eps.clone()));
    let free: Vec<usize> = (0..y.n()).filter(|j| !inner.contains(j)).collect();
    if free.len() > 16 {
        return Err(Error::BudgetExceeded {
            op: "localization brute force supports",
            size: free.len(),
            limit: 16,
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
        let size = ball_x.n() * support.len();
        if size > 16 {
            return Err(Error::BudgetExceeded {
                op: "localization brute force",
                size,
                limit: 16,
            });
        }
        let y_side = y.restrict_full(&support);
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
        let mut found = false;
        let mut lp_error = None;
        for_each_covering_relation(&ball_x, &y_side, |pairs, dis| {
            if found || lp_error.is_some() {
                return;
            }
            if dis.clone().half().cmp_total(bound) != Ordering::Less {
                return;
            }
            let far: Vec<bool> = (0..ball_x.n() * y_side.n())
                .map(|c| !pairs.contains(&(c / y_side.n(), c % y_side.n())))
                .collect();
            match solve_discrepancy(
                ball_x.n(),
                y_side.n(),
                &far,
                MarginalMode::Slack(ball_x.masses()),
                MarginalMode::Boxed {
                    lower: &lower,
                    upper: &upper,
                },
            ) {
                Ok(opt) => {
                    let value = dis.clone().half().max_val(opt.value);
                    if value.cmp_total(bound) == Ordering::Less {
                        found = true;
                    }
                }
                Err(e) => lp_error = Some(e),
            }
        });
        if let Some(e) = lp_error {
            return Err(e);
        }
        if found {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Exact localization value by full enumeration: every support between the
/// inner ball and the whole second space, every covering relation, inner
/// optimum by the joint LP. No pruning, no early exit.
pub fn a_value_bruteforce<S: Scalar>(
    eps: &S,
    r: &S,
    x: &FiniteSpace<S>,
    y: &FiniteSpace<S>,
) -> Result<S> {
    let ball_x = x.closed_ball(r);
    let inner = y.ball_support(&(r.clone() - eps.clone()));
    let free: Vec<usize> = (0..y.n()).filter(|j| !inner.contains(j)).collect();
    if free.len() > 16 {
        return Err(Error::BudgetExceeded {
            op: "localization brute force supports",
            size: free.len(),
            limit: 16,
        });
    }
    let mut best: Option<S> = None;
    for mask in 0u32..(1u32 << free.len()) {
        let mut support = inner.clone();
        for (b, &j) in free.iter().enumerate() {
            if mask >> b & 1 == 1 {
                support.push(j);
            }
        }
        support.sort_unstable();
        let size = ball_x.n() * support.len();
        if size > 16 {
            return Err(Error::BudgetExceeded {
                op: "localization brute force",
                size,
                limit: 16,
            });
        }
        let y_side = y.restrict_full(&support);
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
        let mut lp_error = None;
        for_each_covering_relation(&ball_x, &y_side, |pairs, dis| {
            if lp_error.is_some() {
                return;
            }
            let far: Vec<bool> = (0..ball_x.n() * y_side.n())
                .map(|c| !pairs.contains(&(c / y_side.n(), c % y_side.n())))
                .collect();
            match solve_discrepancy(
                ball_x.n(),
                y_side.n(),
                &far,
                MarginalMode::Slack(ball_x.masses()),
                MarginalMode::Boxed {
                    lower: &lower,
                    upper: &upper,
                },
            ) {
                Ok(opt) => {
                    let value = dis.clone().half().max_val(opt.value);
                    best = match best.take() {
                        None => Some(value),
                        Some(b) => Some(b.min_val(value)),
                    };
                }
                Err(e) => lp_error = Some(e),
            }
        });
        if let Some(e) = lp_error {
            return Err(e);
        }
    }
    best.ok_or(Error::EmptySet)
}

/// Localization predicate table over a grid: for each `eps`, whether
/// `a(eps, 1/eps) < eps/2` holds in both directions, decided from first
/// principles. Brackets the localized distance independently of the
/// bisection path.
pub fn ghp_grid<S: Scalar>(
    x: &FiniteSpace<S>,
    y: &FiniteSpace<S>,
    grid: &[S],
) -> Result<Vec<(S, bool)>> {
    let mut out = Vec::with_capacity(grid.len());
    for eps in grid {
        if eps.cmp_total(&S::zero()) != Ordering::Greater {
            return Err(Error::Precondition("grid levels must be positive".into()));
        }
        let r = S::one() / eps.clone();
        let half = eps.clone().half();
        let holds =
            a_below_bruteforce(eps, &r, x, y, &half)? && a_below_bruteforce(eps, &r, y, x, &half)?;
        out.push((eps.clone(), holds));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flat::{prokhorov_distance, GroundSpace};
    use crate::scalar::Rational;
    use std::sync::Arc;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn prokhorov_bruteforce_examples() {
        let ground = Arc::new(
            GroundSpace::new(vec![vec![rat(0, 1), rat(1, 1)], vec![rat(1, 1), rat(0, 1)]]).unwrap(),
        );
        let mu = FiniteMeasure::new(ground.clone(), vec![rat(1, 1), rat(0, 1)]).unwrap();
        let nu = FiniteMeasure::new(ground.clone(), vec![rat(0, 1), rat(3, 2)]).unwrap();
        assert_eq!(prokhorov_bruteforce(&mu, &nu).unwrap(), rat(1, 1));
        assert_eq!(prokhorov_bruteforce(&mu, &mu).unwrap(), rat(0, 1));

        // Mass-difference candidate below every distance.
        let nu = FiniteMeasure::new(ground, vec![rat(1, 1), rat(1, 5)]).unwrap();
        assert_eq!(prokhorov_bruteforce(&mu, &nu).unwrap(), rat(1, 5));
    }

    #[test]
    fn oracle_agrees_with_scan_on_fixtures() {
        let ground = Arc::new(
            GroundSpace::new(vec![
                vec![rat(0, 1), rat(1, 2), rat(3, 1)],
                vec![rat(1, 2), rat(0, 1), rat(7, 2)],
                vec![rat(3, 1), rat(7, 2), rat(0, 1)],
            ])
            .unwrap(),
        );
        let mu = FiniteMeasure::new(ground.clone(), vec![rat(1, 1), rat(1, 4), rat(0, 1)]).unwrap();
        let nu = FiniteMeasure::new(ground, vec![rat(0, 1), rat(1, 1), rat(2, 1)]).unwrap();
        let fast = prokhorov_distance(&mu, &nu).unwrap().p;
        let slow = prokhorov_bruteforce(&mu, &nu).unwrap();
        assert_eq!(fast, slow);
    }

    #[test]
    fn cghp_bruteforce_examples() {
        let x = FiniteSpace::<Rational>::line(&[0, 3], 0, &[0, 0]);
        let y = FiniteSpace::<Rational>::line(&[0], 0, &[0]);
        assert_eq!(cghp_bruteforce(&x, &y).unwrap(), rat(3, 2));
        assert_eq!(cghp_bruteforce(&x, &x).unwrap(), rat(0, 1));

        let too_big = FiniteSpace::<Rational>::line(&[0, 1, 2, 3, 4], 0, &[1; 5]);
        assert!(matches!(
            cghp_bruteforce(&too_big, &too_big),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn ghp_grid_brackets_the_two_point_collapse() {
        // {0,5} with counting measure vs a unit atom: the predicate flips at
        // exactly 1/5.
        let x = FiniteSpace::<Rational>::line(&[0, 5], 0, &[1, 1]);
        let y = FiniteSpace::<Rational>::line(&[0], 0, &[1]);
        let grid = vec![rat(1, 10), rat(1, 5), rat(1, 4), rat(1, 2), rat(1, 1)];
        let table = ghp_grid(&x, &y, &grid).unwrap();
        let expected = [false, false, true, true, true];
        for ((_, got), want) in table.iter().zip(expected) {
            assert_eq!(*got, want);
        }
    }

    #[test]
    fn min_distortion_matches_zero_measure_cghp() {
        let x = FiniteSpace::<Rational>::line(&[0, 1, 4], 0, &[0, 0, 0]);
        let y = FiniteSpace::<Rational>::line(&[0, 2], 0, &[0, 0]);
        let gh = min_distortion_bruteforce(&x, &y).unwrap();
        let cghp = cghp_bruteforce(&x, &y).unwrap();
        assert_eq!(gh, cghp);
    }
}
