//! Chamber enumeration and classification: every open region of the
//! complement, bounded/unbounded flags, closed-form counts for general
//! position, and the critical points of the log potential `F_η`.

use crate::field::{rat_to_f64, Rat, Scalar, Sign};
use crate::geometry::{
    is_boolean_through_origin, recession_cone_trivial, sign_vector_feasible, Arrangement,
    BooleanMode, GeometryError, SignVector,
};
use crate::util::binomial;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChambersError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("arrangement is not in general position (coned Boolean check failed)")]
    NotGeneralPosition,
    #[error("weight vector has length {got}, arrangement has {expected} hyperplanes")]
    WeightLength { expected: usize, got: usize },
    #[error("weights must be strictly positive")]
    NonPositiveWeight,
    #[error("arrangement has no bounded chamber")]
    NoBoundedChamber,
    #[error("Newton iteration did not converge for chamber {chamber} (grad norm {grad_norm:.3e})")]
    NewtonDiverged { chamber: usize, grad_norm: f64 },
}

/// One open region of the complement, carrying an exact interior witness.
#[derive(Debug, Clone)]
pub struct Chamber<K: Scalar = Rat> {
    pub sign: SignVector,
    pub witness: Vec<K>,
    pub bounded: bool,
    /// Lexicographic rank of the sign vector among the realized chambers.
    pub id: usize,
}

#[derive(Debug, Clone)]
pub struct ChamberCensus<K: Scalar = Rat> {
    pub chambers: Vec<Chamber<K>>,
    pub n_total: usize,
    pub n_bounded: usize,
    pub n_unbounded: usize,
}

impl<K: Scalar> ChamberCensus<K> {
    pub fn bounded(&self) -> impl Iterator<Item = &Chamber<K>> {
        self.chambers.iter().filter(|c| c.bounded)
    }

    pub fn unbounded(&self) -> impl Iterator<Item = &Chamber<K>> {
        self.chambers.iter().filter(|c| !c.bounded)
    }

    pub fn by_sign(&self, s: &SignVector) -> Option<&Chamber<K>> {
        self.chambers.iter().find(|c| &c.sign == s)
    }
}

/// Enumerates all chambers by incremental hyperplane insertion: an existing
/// chamber splits iff the new hyperplane's sign is indeterminate on it,
/// decided by exact feasibility LPs (the chamber's witness settles one side
/// outright whenever it is off the new hyperplane).
pub fn enumerate_chambers<K: Scalar>(
    a: &Arrangement<K>,
) -> Result<ChamberCensus<K>, ChambersError> {
    let n = a.dim;
    let mut live: Vec<(Vec<Sign>, Vec<K>)> = vec![(Vec::new(), vec![K::zero(); n])];

    for k in 0..a.len() {
        let prefix = Arrangement {
            dim: n,
            hyperplanes: a.hyperplanes[..=k].to_vec(),
            include_infinity: false,
        };
        let results: Vec<Result<Vec<(Vec<Sign>, Vec<K>)>, ChambersError>> = live
            .par_iter()
            .map(|(signs, witness)| {
                let mut out = Vec::with_capacity(2);
                let here = a.hyperplanes[k].eval(witness)?.sign();
                for side in [Sign::Pos, Sign::Neg] {
                    let mut ext = signs.clone();
                    ext.push(side);
                    if here == side {
                        out.push((ext, witness.clone()));
                        continue;
                    }
                    let sv = SignVector(ext.clone());
                    if let Some(w) = sign_vector_feasible(&prefix, &sv)? {
                        out.push((ext, w));
                    }
                }
                Ok(out)
            })
            .collect();
        let mut next = Vec::new();
        for r in results {
            next.extend(r?);
        }
        live = next;
    }

    let classified: Vec<Result<Chamber<K>, ChambersError>> = live
        .into_par_iter()
        .map(|(signs, witness)| {
            let sign = SignVector(signs);
            let bounded = if a.is_empty() {
                n == 0
            } else {
                recession_cone_trivial(a, &sign)?
            };
            Ok(Chamber {
                sign,
                witness,
                bounded,
                id: 0,
            })
        })
        .collect();
    let mut chambers = Vec::with_capacity(classified.len());
    for c in classified {
        chambers.push(c?);
    }

    chambers.sort_by(|x, y| x.sign.cmp(&y.sign));
    for (i, c) in chambers.iter_mut().enumerate() {
        c.id = i;
    }
    let n_total = chambers.len();
    let n_bounded = chambers.iter().filter(|c| c.bounded).count();
    Ok(ChamberCensus {
        chambers,
        n_total,
        n_bounded,
        n_unbounded: n_total - n_bounded,
    })
}

/// The bounded chambers in stable id order.
pub fn bounded_chambers<K: Scalar>(a: &Arrangement<K>) -> Result<Vec<Chamber<K>>, ChambersError> {
    Ok(enumerate_chambers(a)?
        .chambers
        .into_iter()
        .filter(|c| c.bounded)
        .collect())
}

/// Closed-form count of bounded chambers of the hypersphere arrangement:
/// `M = C(N−1, n−1) + Σ_{i=1}^n C(N, n−i)`.
pub fn schlafli_bounded_count(n_hyperplanes: u64, dim: u64) -> u128 {
    assert!(n_hyperplanes >= 1 && dim >= 1);
    let mut m = binomial(n_hyperplanes - 1, dim - 1);
    for i in 1..=dim {
        m += binomial(n_hyperplanes, dim - i);
    }
    m
}

/// Number of chambers of a general-position arrangement: `Σ_{i=0}^n C(N,i)`.
pub fn general_position_total(n_hyperplanes: u64, dim: u64) -> u128 {
    (0..=dim).map(|i| binomial(n_hyperplanes, i)).sum()
}

/// Number of bounded chambers of a general-position arrangement: `C(N−1, n)`.
pub fn general_position_bounded(n_hyperplanes: u64, dim: u64) -> u128 {
    if n_hyperplanes == 0 {
        return 0;
    }
    binomial(n_hyperplanes - 1, dim)
}

/// Consistency of the census with the hypersphere count: for a
/// general-position arrangement the number of unbounded chambers equals
/// `schlafli_bounded_count(N, n)`. The general-position precondition is
/// checked and reported, never silently ignored.
pub fn unbounded_equals_schlafli_check<K: Scalar>(
    a: &Arrangement<K>,
) -> Result<bool, ChambersError> {
    if !is_boolean_through_origin(a, BooleanMode::Coned) {
        return Err(ChambersError::NotGeneralPosition);
    }
    let census = enumerate_chambers(a)?;
    let m = schlafli_bounded_count(a.len() as u64, a.dim as u64);
    Ok(census.n_unbounded as u128 == m)
}

/// Critical points of `F_η(t) = Σ η_j log|l_j(t)|`, one per bounded chamber,
/// found by damped Newton from the chamber witness. Steps crossing any
/// hyperplane are rejected by the line search, so each iterate stays
/// strictly inside its chamber.
pub fn morse_critical_points(
    a: &Arrangement<Rat>,
    eta: &[Rat],
) -> Result<Vec<(Vec<f64>, usize)>, ChambersError> {
    use num_traits::Zero;
    if eta.len() != a.len() {
        return Err(ChambersError::WeightLength {
            expected: a.len(),
            got: eta.len(),
        });
    }
    if eta.iter().any(|e| *e <= Rat::zero()) {
        return Err(ChambersError::NonPositiveWeight);
    }
    let census = enumerate_chambers(a)?;
    if census.n_bounded == 0 {
        return Err(ChambersError::NoBoundedChamber);
    }

    let n = a.dim;
    let coeffs: Vec<Vec<f64>> = a
        .hyperplanes
        .iter()
        .map(|h| h.coeffs.iter().map(rat_to_f64).collect())
        .collect();
    let eta_f: Vec<f64> = eta.iter().map(rat_to_f64).collect();

    let eval = |j: usize, t: &[f64]| -> f64 {
        coeffs[j][0] + coeffs[j][1..].iter().zip(t).map(|(a, x)| a * x).sum::<f64>()
    };
    let grad = |t: &[f64]| -> Vec<f64> {
        let mut g = vec![0.0; n];
        for j in 0..a.len() {
            let l = eval(j, t);
            for i in 0..n {
                g[i] += eta_f[j] * coeffs[j][1 + i] / l;
            }
        }
        g
    };
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();

    let mut out = Vec::new();
    for chamber in census.bounded() {
        let chamber_signs: Vec<f64> = chamber.sign.0.iter().map(|s| s.factor() as f64).collect();
        let inside =
            |t: &[f64]| -> bool { (0..a.len()).all(|j| eval(j, t) * chamber_signs[j] > 0.0) };
        let mut t: Vec<f64> = chamber.witness.iter().map(rat_to_f64).collect();
        let mut g = grad(&t);
        for _ in 0..200 {
            if norm(&g) < 1e-12 {
                break;
            }
            // Hessian of F_η is negative definite inside a bounded chamber
            let mut h = vec![vec![0.0; n]; n];
            for j in 0..a.len() {
                let l = eval(j, &t);
                let f = eta_f[j] / (l * l);
                for i in 0..n {
                    for k in 0..n {
                        h[i][k] -= f * coeffs[j][1 + i] * coeffs[j][1 + k];
                    }
                }
            }
            let rhs: Vec<f64> = g.iter().map(|x| -x).collect();
            let Some(step) = solve_f64(&h, &rhs) else {
                break;
            };
            let g0 = norm(&g);
            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                let trial: Vec<f64> = t.iter().zip(&step).map(|(x, s)| x + lambda * s).collect();
                if inside(&trial) {
                    let gt = grad(&trial);
                    if norm(&gt) < g0 || lambda < 1e-12 {
                        t = trial;
                        g = gt;
                        accepted = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if norm(&g) >= 1e-12 {
            return Err(ChambersError::NewtonDiverged {
                chamber: chamber.id,
                grad_norm: norm(&g),
            });
        }
        debug_assert!(inside(&t));
        out.push((t, chamber.id));
    }
    Ok(out)
}

/// Dense Gaussian elimination with partial pivoting.
fn solve_f64(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(*rhs);
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[p][c].abs() < 1e-300 {
            return None;
        }
        m.swap(c, p);
        for i in 0..n {
            if i == c {
                continue;
            }
            let f = m[i][c] / m[c][c];
            for j in c..=n {
                m[i][j] -= f * m[c][j];
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rat, rat_i};
    use crate::geometry::arrangement_from_rows;

    fn line_arrangement(points: &[i64]) -> Arrangement<Rat> {
        arrangement_from_rows(1, &points.iter().map(|&p| vec![-p, 1]).collect::<Vec<_>>())
    }

    fn three_generic_lines() -> Arrangement<Rat> {
        arrangement_from_rows(2, &[vec![0, 1, 0], vec![0, 0, 1], vec![1, -1, -1]])
    }

    fn four_generic_lines() -> Arrangement<Rat> {
        arrangement_from_rows(
            2,
            &[vec![0, 1, 0], vec![0, 0, 1], vec![1, -1, -1], vec![3, -1, -2]],
        )
    }

    #[test]
    fn census_on_the_line() {
        let census = enumerate_chambers(&line_arrangement(&[0, 1])).unwrap();
        assert_eq!(census.n_total, 3);
        assert_eq!(census.n_bounded, 1);
        let b: Vec<_> = census.bounded().collect();
        assert_eq!(b[0].sign, SignVector::parse("+-").unwrap());
    }

    #[test]
    fn census_three_lines() {
        let census = enumerate_chambers(&three_generic_lines()).unwrap();
        assert_eq!(census.n_total, 7);
        assert_eq!(census.n_bounded, 1);
    }

    #[test]
    fn census_four_lines() {
        let census = enumerate_chambers(&four_generic_lines()).unwrap();
        assert_eq!(census.n_total, 11);
        assert_eq!(census.n_bounded, 3);
        assert_eq!(general_position_total(4, 2), 11);
        assert_eq!(general_position_bounded(4, 2), 3);
    }

    #[test]
    fn bounded_filter_and_parallel_strip() {
        let b = bounded_chambers(&line_arrangement(&[0, 1])).unwrap();
        assert_eq!(b.len(), 1);
        // strip between two parallel lines is unbounded
        let strip = arrangement_from_rows(2, &[vec![0, 1, 0], vec![-1, 1, 0]]);
        assert!(bounded_chambers(&strip).unwrap().is_empty());
    }

    #[test]
    fn ids_are_lexicographic_ranks() {
        let census = enumerate_chambers(&four_generic_lines()).unwrap();
        let signs: Vec<SignVector> = census.chambers.iter().map(|c| c.sign.clone()).collect();
        let mut sorted = signs.clone();
        sorted.sort();
        assert_eq!(signs, sorted);
        for (i, c) in census.chambers.iter().enumerate() {
            assert_eq!(c.id, i);
        }
    }

    #[test]
    fn schlafli_formula() {
        assert_eq!(schlafli_bounded_count(3, 2), 6);
        assert_eq!(schlafli_bounded_count(1, 1), 2);
        assert_eq!(schlafli_bounded_count(2, 1), 2);
        for n in 2..=6u64 {
            assert_eq!(schlafli_bounded_count(n, 2), 2 * n as u128);
        }
    }

    #[test]
    fn unbounded_matches_schlafli() {
        assert!(unbounded_equals_schlafli_check(&three_generic_lines()).unwrap());
        assert!(unbounded_equals_schlafli_check(&four_generic_lines()).unwrap());
        assert!(unbounded_equals_schlafli_check(&line_arrangement(&[0, 1])).unwrap());
        // degenerate input: precondition reported
        let parallel = arrangement_from_rows(2, &[vec![0, 1, 0], vec![-1, 1, 0]]);
        assert!(matches!(
            unbounded_equals_schlafli_check(&parallel),
            Err(ChambersError::NotGeneralPosition)
        ));
    }

    #[test]
    fn morse_interval_midpoint() {
        let a = line_arrangement(&[0, 1]);
        let pts = morse_critical_points(&a, &[rat_i(1), rat_i(1)]).unwrap();
        assert_eq!(pts.len(), 1);
        assert!((pts[0].0[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn morse_triangle_barycenter() {
        let a = three_generic_lines();
        let pts = morse_critical_points(&a, &[rat_i(1), rat_i(1), rat_i(1)]).unwrap();
        assert_eq!(pts.len(), 1);
        assert!((pts[0].0[0] - 1.0 / 3.0).abs() < 1e-10);
        assert!((pts[0].0[1] - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn morse_four_lines_three_points() {
        let a = four_generic_lines();
        let pts = morse_critical_points(&a, &[rat_i(1), rat_i(1), rat_i(1), rat_i(1)]).unwrap();
        assert_eq!(pts.len(), 3);
    }

    #[test]
    fn morse_rejects_bad_weights() {
        let a = line_arrangement(&[0, 1]);
        assert!(matches!(
            morse_critical_points(&a, &[rat_i(1)]),
            Err(ChambersError::WeightLength { .. })
        ));
        assert!(matches!(
            morse_critical_points(&a, &[rat_i(1), rat(-1, 2)]),
            Err(ChambersError::NonPositiveWeight)
        ));
    }
}
