//! Exact two-phase simplex with Bland's rule, generic over the scalar
//! field. No floating-point phase: every pivot decision is exact, so
//! results are bit-identical across runs and platforms.

use crate::field::{Scalar, Sign};
use crate::geometry::{Arrangement, SignVector};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("simplex exceeded the pivot budget (internal error)")]
    PivotBudget,
}

#[derive(Debug)]
pub enum SimplexOutcome<K> {
    Infeasible,
    Optimal { objective: K, solution: Vec<K> },
}

/// Maximizes `c·x` subject to `A x = b`, `x ≥ 0`.
pub fn simplex_max<K: Scalar>(
    a: Vec<Vec<K>>,
    b: Vec<K>,
    c: Vec<K>,
) -> Result<SimplexOutcome<K>, LpError> {
    let m = a.len();
    let n = c.len();
    debug_assert!(a.iter().all(|row| row.len() == n));
    debug_assert_eq!(b.len(), m);

    // Normalize to b ≥ 0.
    let mut rows = a;
    let mut rhs = b;
    for i in 0..m {
        if rhs[i].sign() == Sign::Neg {
            for v in rows[i].iter_mut() {
                *v = -v.clone();
            }
            rhs[i] = -rhs[i].clone();
        }
    }

    // Starting basis: reuse unit columns where present, artificials elsewhere.
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    let mut artificial_of_row: Vec<Option<usize>> = vec![None; m];
    let mut n_total = n;
    for i in 0..m {
        let unit = (0..n).find(|&j| {
            rows[i][j].is_one()
                && (0..m).all(|k| k == i || rows[k][j].is_zero())
                && !basis.contains(&j)
        });
        match unit {
            Some(j) => basis.push(j),
            None => {
                artificial_of_row[i] = Some(n_total);
                basis.push(n_total);
                n_total += 1;
            }
        }
    }
    let n_art = n_total - n;
    let mut t: Vec<Vec<K>> = rows
        .into_iter()
        .enumerate()
        .map(|(i, mut row)| {
            row.resize(n_total, K::zero());
            if let Some(j) = artificial_of_row[i] {
                row[j] = K::one();
            }
            row.push(rhs[i].clone());
            row
        })
        .collect();

    if n_art > 0 {
        // Phase 1: maximize −Σ artificials.
        let mut c1 = vec![K::zero(); n_total];
        for j in n..n_total {
            c1[j] = -K::one();
        }
        let obj = run_phase(&mut t, &mut basis, &c1, n_total)?;
        if obj.sign() == Sign::Neg {
            return Ok(SimplexOutcome::Infeasible);
        }
        // Drive remaining artificials (at value 0) out of the basis.
        let mut drop_rows: Vec<usize> = Vec::new();
        for i in 0..t.len() {
            if basis[i] < n {
                continue;
            }
            if let Some(j) = (0..n).find(|&j| !t[i][j].is_zero()) {
                pivot(&mut t, &mut basis, i, j);
            } else {
                drop_rows.push(i); // redundant constraint
            }
        }
        for &i in drop_rows.iter().rev() {
            t.remove(i);
            basis.remove(i);
        }
    }

    // Phase 2 on the real objective; artificial columns are barred by
    // truncating the objective (they stay out of the basis).
    let mut c2 = c;
    c2.resize(n_total, K::zero());
    for j in n..n_total {
        // strongly discourage: artificial columns never re-enter because
        // their reduced cost is forced non-positive by a zero objective and
        // the entering rule below skips them explicitly
        c2[j] = K::zero();
    }
    let objective = run_phase_real(&mut t, &mut basis, &c2, n)?;
    let mut solution = vec![K::zero(); n];
    for (i, &bj) in basis.iter().enumerate() {
        if bj < n {
            solution[bj] = t[i].last().unwrap().clone();
        }
    }
    Ok(SimplexOutcome::Optimal { objective, solution })
}

/// Runs simplex iterations allowing every column to enter.
fn run_phase<K: Scalar>(
    t: &mut Vec<Vec<K>>,
    basis: &mut Vec<usize>,
    c: &[K],
    enterable: usize,
) -> Result<K, LpError> {
    iterate(t, basis, c, enterable)
}

/// Runs simplex iterations with entering columns restricted to the first
/// `enterable` (bars artificials in phase 2).
fn run_phase_real<K: Scalar>(
    t: &mut Vec<Vec<K>>,
    basis: &mut Vec<usize>,
    c: &[K],
    enterable: usize,
) -> Result<K, LpError> {
    iterate(t, basis, c, enterable)
}

fn iterate<K: Scalar>(
    t: &mut Vec<Vec<K>>,
    basis: &mut Vec<usize>,
    c: &[K],
    enterable: usize,
) -> Result<K, LpError> {
    let m = t.len();
    let rhs_col = t.first().map(|r| r.len() - 1).unwrap_or(0);
    // generous budget: Bland guarantees finite termination, this guards bugs
    let budget = 8000usize.max(200 * (m + enterable));
    for _ in 0..budget {
        // reduced costs r_j = c_j − Σ_i c_{B_i} t_{ij}, entering by Bland
        let mut entering: Option<usize> = None;
        'cols: for j in 0..enterable {
            if basis.contains(&j) {
                continue;
            }
            let mut r = c[j].clone();
            for i in 0..m {
                if !t[i][j].is_zero() && !c[basis[i]].is_zero() {
                    r = r - c[basis[i]].clone() * t[i][j].clone();
                }
            }
            if r.sign() == Sign::Pos {
                entering = Some(j);
                break 'cols;
            }
        }
        let Some(j) = entering else {
            // optimal
            let mut obj = K::zero();
            for i in 0..m {
                if !c[basis[i]].is_zero() {
                    obj = obj + c[basis[i]].clone() * t[i][rhs_col].clone();
                }
            }
            return Ok(obj);
        };
        // ratio test, ties broken by lowest basis variable index (Bland)
        let mut leave: Option<(usize, K)> = None;
        for i in 0..m {
            if t[i][j].sign() != Sign::Pos {
                continue;
            }
            let ratio = t[i][rhs_col].clone() / t[i][j].clone();
            match &leave {
                None => leave = Some((i, ratio)),
                Some((li, lr)) => {
                    if ratio < *lr || (ratio == *lr && basis[i] < basis[*li]) {
                        leave = Some((i, ratio));
                    }
                }
            }
        }
        let Some((i, _)) = leave else {
            return Err(LpError::Unbounded);
        };
        pivot(t, basis, i, j);
    }
    Err(LpError::PivotBudget)
}

fn pivot<K: Scalar>(t: &mut [Vec<K>], basis: &mut [usize], pr: usize, pc: usize) {
    let cols = t[pr].len();
    let p = t[pr][pc].clone();
    if !p.is_one() {
        for v in t[pr].iter_mut() {
            if !v.is_zero() {
                *v = v.clone() / p.clone();
            }
        }
    }
    for i in 0..t.len() {
        if i == pr || t[i][pc].is_zero() {
            continue;
        }
        let f = t[i][pc].clone();
        for j in 0..cols {
            if !t[pr][j].is_zero() {
                let v = t[pr][j].clone() * f.clone();
                t[i][j] = t[i][j].clone() - v;
            }
        }
        t[i][pc] = K::zero();
    }
    basis[pr] = pc;
}

/// Strict feasibility with a maximized slack margin:
/// maximize δ s.t. `s_j·l_j(p) ≥ δ` for all j and `0 ≤ δ ≤ 1`.
/// Returns the witness point when the optimum is positive.
pub(crate) fn feasible_with_margin<K: Scalar>(
    a: &Arrangement<K>,
    s: &SignVector,
) -> Result<Option<Vec<K>>, LpError> {
    let n = a.dim;
    let nh = a.len();
    // variables: p+ (n), p- (n), delta, w (nh slacks), u (delta cap slack)
    let nv = 2 * n + 1 + nh + 1;
    let mut rows = Vec::with_capacity(nh + 1);
    let mut rhs = Vec::with_capacity(nh + 1);
    for (j, h) in a.hyperplanes.iter().enumerate() {
        let mut row = vec![K::zero(); nv];
        let flip = s.0[j] == Sign::Neg;
        for (i, coef) in h.normal().iter().enumerate() {
            let v = if flip { -coef.clone() } else { coef.clone() };
            row[i] = v.clone();
            row[n + i] = -v;
        }
        row[2 * n] = -K::one(); // −δ
        row[2 * n + 1 + j] = -K::one(); // −w_j
        let c0 = h.constant().clone();
        rhs.push(if flip { c0 } else { -c0 });
        rows.push(row);
    }
    // δ + u = 1
    let mut cap = vec![K::zero(); nv];
    cap[2 * n] = K::one();
    cap[nv - 1] = K::one();
    rows.push(cap);
    rhs.push(K::one());

    let mut c = vec![K::zero(); nv];
    c[2 * n] = K::one();

    match simplex_max(rows, rhs, c)? {
        SimplexOutcome::Infeasible => Ok(None),
        SimplexOutcome::Optimal { objective, solution } => {
            if objective.sign() != Sign::Pos {
                return Ok(None);
            }
            let p: Vec<K> = (0..n)
                .map(|i| solution[i].clone() - solution[n + i].clone())
                .collect();
            Ok(Some(p))
        }
    }
}

/// Nonzero recession direction via
/// maximize Σ_j s_j(a_j·d) s.t. `s_j(a_j·d) ≥ 0`, `Σ_j s_j(a_j·d) ≤ 1`.
/// Assumes the normals span the ambient space, in which case the optimum is
/// positive iff the cone is nontrivial.
pub(crate) fn recession_witness<K: Scalar>(
    a: &Arrangement<K>,
    s: &SignVector,
) -> Result<Option<Vec<K>>, LpError> {
    let n = a.dim;
    let nh = a.len();
    // variables: d+ (n), d- (n), w (nh slacks), t (sum cap slack)
    let nv = 2 * n + nh + 1;
    let signed_normal = |j: usize| -> Vec<K> {
        let flip = s.0[j] == Sign::Neg;
        a.hyperplanes[j]
            .normal()
            .iter()
            .map(|c| if flip { -c.clone() } else { c.clone() })
            .collect()
    };
    let mut rows = Vec::with_capacity(nh + 1);
    let mut rhs = Vec::with_capacity(nh + 1);
    for j in 0..nh {
        let sn = signed_normal(j);
        let mut row = vec![K::zero(); nv];
        for i in 0..n {
            row[i] = sn[i].clone();
            row[n + i] = -sn[i].clone();
        }
        row[2 * n + j] = -K::one();
        rows.push(row);
        rhs.push(K::zero());
    }
    // Σ_j s_j(a_j·d) + t = 1
    let mut total = vec![K::zero(); n];
    for j in 0..nh {
        let sn = signed_normal(j);
        for i in 0..n {
            total[i] = total[i].clone() + sn[i].clone();
        }
    }
    let mut cap = vec![K::zero(); nv];
    for i in 0..n {
        cap[i] = total[i].clone();
        cap[n + i] = -total[i].clone();
    }
    cap[nv - 1] = K::one();
    rows.push(cap);
    rhs.push(K::one());

    let mut c = vec![K::zero(); nv];
    for i in 0..n {
        c[i] = total[i].clone();
        c[n + i] = -total[i].clone();
    }

    match simplex_max(rows, rhs, c)? {
        SimplexOutcome::Infeasible => Ok(None), // cannot happen: d = 0 is feasible
        SimplexOutcome::Optimal { objective, solution } => {
            if objective.sign() != Sign::Pos {
                return Ok(None);
            }
            let d: Vec<K> = (0..n)
                .map(|i| solution[i].clone() - solution[n + i].clone())
                .collect();
            Ok(Some(d))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rat_i, Rat};
    use num_traits::Zero;

    #[test]
    fn simplex_basic_max() {
        // max x + y s.t. x + y + s = 1 -> optimum 1
        let rows = vec![vec![rat_i(1), rat_i(1), rat_i(1)]];
        let rhs = vec![rat_i(1)];
        let c = vec![rat_i(1), rat_i(1), rat_i(0)];
        match simplex_max(rows, rhs, c).unwrap() {
            SimplexOutcome::Optimal { objective, .. } => assert_eq!(objective, rat_i(1)),
            _ => panic!("expected optimal"),
        }
    }

    #[test]
    fn simplex_infeasible() {
        // x + s = -1 is infeasible for x, s >= 0 (normalized to -x - s = 1)
        let rows = vec![vec![rat_i(1), rat_i(1)]];
        let rhs = vec![rat_i(-1)];
        let c = vec![rat_i(0), rat_i(0)];
        assert!(matches!(
            simplex_max(rows, rhs, c).unwrap(),
            SimplexOutcome::Infeasible
        ));
    }

    #[test]
    fn simplex_degenerate_terminates() {
        // degenerate equalities exercising Bland's rule
        let rows = vec![
            vec![rat_i(1), rat_i(-1), rat_i(1), rat_i(0)],
            vec![rat_i(1), rat_i(1), rat_i(0), rat_i(1)],
        ];
        let rhs = vec![rat_i(0), rat_i(2)];
        let c = vec![rat_i(1), rat_i(0), rat_i(0), rat_i(0)];
        match simplex_max(rows, rhs, c).unwrap() {
            SimplexOutcome::Optimal { objective, .. } => assert_eq!(objective, rat_i(1)),
            _ => panic!("expected optimal"),
        }
    }

    #[test]
    fn simplex_redundant_row() {
        // duplicated constraint forces an artificial to be dropped
        let rows = vec![
            vec![rat_i(1), rat_i(1)],
            vec![rat_i(2), rat_i(2)],
        ];
        let rhs = vec![rat_i(1), rat_i(2)];
        let c = vec![rat_i(1), rat_i(0)];
        match simplex_max(rows, rhs, c).unwrap() {
            SimplexOutcome::Optimal { objective, .. } => assert_eq!(objective, rat_i(1)),
            _ => panic!("expected optimal"),
        }
    }

    #[test]
    fn margin_is_positive_for_open_regions() {
        let a = crate::geometry::arrangement_from_rows(1, &[vec![0, 1], vec![-1, 1]]);
        let s = crate::geometry::SignVector::parse("+-").unwrap();
        let w: Vec<Rat> = feasible_with_margin(&a, &s).unwrap().unwrap();
        let vals = a.evaluate_all(&w).unwrap();
        assert!(vals[0] > Rat::zero() && vals[1] < Rat::zero());
    }
}
