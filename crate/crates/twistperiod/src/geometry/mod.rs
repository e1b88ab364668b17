//! Exact rational affine geometry for real hyperplane arrangements:
//! hyperplanes, sign vectors, LP feasibility and boundedness, slices,
//! and flats of codimension ≤ 2.

mod lp;

pub use lp::{LpError, SimplexOutcome};

use crate::field::{Rat, Scalar, Sign};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("hyperplane {label} has zero linear part")]
    ZeroNormal { label: String },
    #[error("hyperplanes {a} and {b} coincide as projective covectors")]
    DuplicateHyperplane { a: String, b: String },
    #[error("sign vector has length {got}, arrangement has {expected} hyperplanes")]
    SignLength { expected: usize, got: usize },
    #[error("sign vector contains a zero entry at position {0}")]
    SignZero(usize),
    #[error("infeasible sign vector")]
    Infeasible,
    #[error("functional is constant")]
    ConstantFunctional,
    #[error("slice f = R is not transversal to the flat spanned by hyperplanes {flat:?}")]
    NonTransversalSlice { flat: Vec<usize> },
    #[error("linear program failed: {0}")]
    Lp(#[from] LpError),
}

/// Affine hyperplane `a_0 + a_1 t_1 + … + a_n t_n = 0` over an exactly
/// ordered field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperplane<K: Scalar = Rat> {
    /// `[a_0, a_1, …, a_n]`
    pub coeffs: Vec<K>,
    pub label: String,
}

impl<K: Scalar> Hyperplane<K> {
    pub fn new(coeffs: Vec<K>, label: impl Into<String>) -> Result<Self, GeometryError> {
        let label = label.into();
        if coeffs.len() < 2 || coeffs[1..].iter().all(|c| c.is_zero()) {
            return Err(GeometryError::ZeroNormal { label });
        }
        Ok(Hyperplane { coeffs, label })
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn constant(&self) -> &K {
        &self.coeffs[0]
    }

    pub fn normal(&self) -> &[K] {
        &self.coeffs[1..]
    }

    /// `a_0 + Σ a_i p_i`, exactly.
    pub fn eval(&self, p: &[K]) -> Result<K, GeometryError> {
        if p.len() != self.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim(),
                got: p.len(),
            });
        }
        let mut acc = self.coeffs[0].clone();
        for (a, x) in self.coeffs[1..].iter().zip(p) {
            acc = acc + a.clone() * x.clone();
        }
        Ok(acc)
    }

    pub fn map<L: Scalar>(&self, f: impl Fn(&K) -> L) -> Hyperplane<L> {
        Hyperplane {
            coeffs: self.coeffs.iter().map(f).collect(),
            label: self.label.clone(),
        }
    }
}

/// A finite affine arrangement. `include_infinity` marks the formal
/// hyperplane at infinity `A_{N+1}` for the projective flat scan used by
/// genericity checks; it never contributes an inequality to chamber LPs.
#[derive(Debug, Clone)]
pub struct Arrangement<K: Scalar = Rat> {
    pub dim: usize,
    pub hyperplanes: Vec<Hyperplane<K>>,
    pub include_infinity: bool,
}

impl<K: Scalar> Arrangement<K> {
    pub fn new(dim: usize, hyperplanes: Vec<Hyperplane<K>>) -> Result<Self, GeometryError> {
        for h in &hyperplanes {
            if h.dim() != dim {
                return Err(GeometryError::DimensionMismatch {
                    expected: dim,
                    got: h.dim(),
                });
            }
        }
        // pairwise distinct as projective covectors
        for i in 0..hyperplanes.len() {
            for j in i + 1..hyperplanes.len() {
                if proportional(&hyperplanes[i].coeffs, &hyperplanes[j].coeffs) {
                    return Err(GeometryError::DuplicateHyperplane {
                        a: hyperplanes[i].label.clone(),
                        b: hyperplanes[j].label.clone(),
                    });
                }
            }
        }
        Ok(Arrangement {
            dim,
            hyperplanes,
            include_infinity: false,
        })
    }

    pub fn with_infinity(mut self) -> Self {
        self.include_infinity = true;
        self
    }

    pub fn len(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyperplanes.is_empty()
    }

    pub fn map<L: Scalar>(&self, f: impl Fn(&K) -> L + Copy) -> Arrangement<L> {
        Arrangement {
            dim: self.dim,
            hyperplanes: self.hyperplanes.iter().map(|h| h.map(f)).collect(),
            include_infinity: self.include_infinity,
        }
    }

    /// Exact point evaluation of every hyperplane.
    pub fn evaluate_all(&self, p: &[K]) -> Result<Vec<K>, GeometryError> {
        self.hyperplanes.iter().map(|h| h.eval(p)).collect()
    }

    /// Sign vector of a point (may contain zeros if the point lies on a
    /// hyperplane).
    pub fn sign_vector_at(&self, p: &[K]) -> Result<SignVector, GeometryError> {
        Ok(SignVector(
            self.evaluate_all(p)?.iter().map(|v| v.sign()).collect(),
        ))
    }
}

/// Convenience constructor from integer coefficient rows.
pub fn arrangement_from_rows(dim: usize, rows: &[Vec<i64>]) -> Arrangement<Rat> {
    let hyperplanes = rows
        .iter()
        .enumerate()
        .map(|(j, row)| {
            Hyperplane::new(
                row.iter().map(|&c| crate::field::rat_i(c)).collect(),
                format!("A{}", j + 1),
            )
            .expect("valid hyperplane row")
        })
        .collect();
    Arrangement::new(dim, hyperplanes).expect("valid arrangement")
}

fn proportional<K: Scalar>(a: &[K], b: &[K]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    // a ∥ b iff all 2x2 minors vanish
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let m = a[i].clone() * b[j].clone() - a[j].clone() * b[i].clone();
            if !m.is_zero() {
                return false;
            }
        }
    }
    true
}

/// Sign vector over the hyperplanes of an arrangement. Lexicographic order
/// (with `-` < `0` < `+`) provides the stable chamber ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignVector(pub Vec<Sign>);

impl SignVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero_free(&self) -> bool {
        self.0.iter().all(|s| *s != Sign::Zero)
    }

    pub fn parse(s: &str) -> Option<SignVector> {
        s.chars().map(Sign::from_char).collect::<Option<Vec<_>>>().map(SignVector)
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}

/// A flat of the arrangement together with its closure (every hyperplane
/// containing it). Emitted flats always satisfy `members == closure`, i.e.
/// they are the maximal subfamilies of the scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flat {
    pub members: Vec<usize>,
    pub codim: usize,
    pub closure: Vec<usize>,
}

impl Flat {
    pub fn is_maximal_subfamily(&self) -> bool {
        self.members == self.closure
    }
}

// ---------------------------------------------------------------------------
// Exact linear algebra helpers
// ---------------------------------------------------------------------------

/// Rank of a row matrix by fraction-aware Gaussian elimination.
pub fn rank<K: Scalar>(rows: &[Vec<K>]) -> usize {
    let mut m: Vec<Vec<K>> = rows.to_vec();
    let nrows = m.len();
    let ncols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for i in r + 1..nrows {
            if m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone() / pivot.clone();
            for j in c..ncols {
                let v = m[r][j].clone() * f.clone();
                m[i][j] = m[i][j].clone() - v;
            }
        }
        r += 1;
    }
    r
}

/// A nonzero kernel vector of the row system, if one exists.
pub fn kernel_vector<K: Scalar>(rows: &[Vec<K>], ncols: usize) -> Option<Vec<K>> {
    let mut m: Vec<Vec<K>> = rows.to_vec();
    let nrows = m.len();
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for j in 0..ncols {
            m[r][j] = m[r][j].clone() / pivot.clone();
        }
        for i in 0..nrows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..ncols {
                    let v = m[r][j].clone() * f.clone();
                    m[i][j] = m[i][j].clone() - v;
                }
            }
        }
        pivots.push((r, c));
        r += 1;
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let free = (0..ncols).find(|c| !pivot_cols.contains(c))?;
    let mut v = vec![K::zero(); ncols];
    v[free] = K::one();
    for &(row, col) in &pivots {
        v[col] = -m[row][free].clone();
    }
    Some(v)
}

/// Solves a square system `A x = b` exactly; `None` if singular.
pub fn solve_square<K: Scalar>(a: &[Vec<K>], b: &[K]) -> Option<Vec<K>> {
    let n = a.len();
    let mut m: Vec<Vec<K>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let pivot = m[c][c].clone();
        for j in c..=n {
            m[c][j] = m[c][j].clone() / pivot.clone();
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..=n {
                    let v = m[c][j].clone() * f.clone();
                    m[i][j] = m[i][j].clone() - v;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Evaluates a hyperplane at an exact point.
pub fn eval_hyperplane<K: Scalar>(h: &Hyperplane<K>, p: &[K]) -> Result<K, GeometryError> {
    h.eval(p)
}

/// Decides strict feasibility of a zero-free sign vector by one exact
/// simplex solve: maximize a slack margin δ subject to
/// `s_j·l_j(p) ≥ δ`, `0 ≤ δ ≤ 1`. Strictly feasible iff the optimum is
/// positive; the witness is the maximizer's point part.
pub fn sign_vector_feasible<K: Scalar>(
    a: &Arrangement<K>,
    s: &SignVector,
) -> Result<Option<Vec<K>>, GeometryError> {
    if s.len() != a.len() {
        return Err(GeometryError::SignLength {
            expected: a.len(),
            got: s.len(),
        });
    }
    if let Some(i) = s.0.iter().position(|x| *x == Sign::Zero) {
        return Err(GeometryError::SignZero(i));
    }
    if a.dim() == 0 {
        // ℝ^0: single point, no hyperplanes can exist there
        return Ok(Some(Vec::new()));
    }
    Ok(lp::feasible_with_margin(a, s)?)
}

/// Returns `true` iff the (feasible) chamber is bounded: the only direction
/// `d` with `s_j·(a_j·d) ≥ 0` for all j is `d = 0`. On `false`, the
/// certificate direction is available from [`recession_direction`].
pub fn recession_cone_trivial<K: Scalar>(
    a: &Arrangement<K>,
    s: &SignVector,
) -> Result<bool, GeometryError> {
    Ok(recession_direction(a, s)?.is_none())
}

/// A nonzero recession direction of the chamber, or `None` if bounded.
pub fn recession_direction<K: Scalar>(
    a: &Arrangement<K>,
    s: &SignVector,
) -> Result<Option<Vec<K>>, GeometryError> {
    if s.len() != a.len() {
        return Err(GeometryError::SignLength {
            expected: a.len(),
            got: s.len(),
        });
    }
    let n = a.dim;
    if n == 0 {
        return Ok(None);
    }
    // If the normals do not span, any kernel direction lies in the cone.
    let normals: Vec<Vec<K>> = a.hyperplanes.iter().map(|h| h.normal().to_vec()).collect();
    if rank(&normals) < n {
        let v = kernel_vector(&normals, n).expect("rank-deficient system has a kernel vector");
        return Ok(Some(v));
    }
    // Full rank: the cone is nontrivial iff max Σ_j s_j(a_j·d) over
    // { s_j(a_j·d) ≥ 0, Σ ≤ 1 } is positive.
    Ok(lp::recession_witness(a, s)?)
}

impl<K: Scalar> Arrangement<K> {
    fn dim(&self) -> usize {
        self.dim
    }
}

/// Nonconstant affine functional `c_0 + c·t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineFunctional<K: Scalar = Rat> {
    pub coeffs: Vec<K>,
}

impl<K: Scalar> AffineFunctional<K> {
    pub fn new(coeffs: Vec<K>) -> Result<Self, GeometryError> {
        if coeffs.len() < 2 || coeffs[1..].iter().all(|c| c.is_zero()) {
            return Err(GeometryError::ConstantFunctional);
        }
        Ok(AffineFunctional { coeffs })
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, p: &[K]) -> K {
        let mut acc = self.coeffs[0].clone();
        for (c, x) in self.coeffs[1..].iter().zip(p) {
            acc = acc + c.clone() * x.clone();
        }
        acc
    }

    pub fn normal(&self) -> &[K] {
        &self.coeffs[1..]
    }

    pub fn map<L: Scalar>(&self, f: impl Fn(&K) -> L) -> AffineFunctional<L> {
        AffineFunctional {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }
}

/// Affine parametrization of the slice `{f = R}`: `t = rows · (1, u)` with
/// `u` the intrinsic coordinates (the variable with the largest `|f|`
/// coefficient is dropped; ties resolve to the lowest index).
#[derive(Debug, Clone)]
pub struct SliceChart<K: Scalar> {
    pub drop_index: usize,
    /// n rows of length n: `t_i = rows[i][0] + Σ_k rows[i][1+k] u_k`.
    pub rows: Vec<Vec<K>>,
}

impl<K: Scalar> SliceChart<K> {
    pub fn embed(&self, u: &[K]) -> Vec<K> {
        self.rows
            .iter()
            .map(|row| {
                let mut acc = row[0].clone();
                for (c, x) in row[1..].iter().zip(u) {
                    acc = acc + c.clone() * x.clone();
                }
                acc
            })
            .collect()
    }
}

/// The arrangement induced on `{f = R}` together with its chart and the
/// original index of each kept hyperplane.
#[derive(Debug, Clone)]
pub struct Slice<K: Scalar> {
    pub arrangement: Arrangement<K>,
    pub chart: SliceChart<K>,
    pub kept: Vec<usize>,
}

/// Builds the induced arrangement on the affine hyperplane `f = R`.
/// Transversality is checked exactly: the slice may not contain any flat
/// on which `f` is constant with value `R`.
pub fn slice_arrangement<K: Scalar>(
    a: &Arrangement<K>,
    f: &AffineFunctional<K>,
    r: &K,
) -> Result<Slice<K>, GeometryError> {
    let n = a.dim;
    if f.dim() != n {
        return Err(GeometryError::DimensionMismatch {
            expected: n,
            got: f.dim(),
        });
    }
    check_slice_transversal(a, f, r)?;

    // drop the variable with the largest |coefficient| (ties -> lowest index)
    let mut drop = 0usize;
    let mut best = f.coeffs[1].abs();
    for (i, c) in f.coeffs[1..].iter().enumerate().skip(1) {
        let v = c.abs();
        if v > best {
            best = v;
            drop = i;
        }
    }
    let ck = f.coeffs[1 + drop].clone();
    debug_assert!(!ck.is_zero());

    // t_drop = (R - c_0 - Σ_{i≠drop} c_i u_i)/c_k ; t_i = u_i otherwise
    let m = n - 1;
    let mut rows = vec![vec![K::zero(); m + 1]; n];
    let mut free = 0usize;
    for i in 0..n {
        if i == drop {
            rows[i][0] = (r.clone() - f.coeffs[0].clone()) / ck.clone();
            let mut col = 0usize;
            for (ii, c) in f.coeffs[1..].iter().enumerate() {
                if ii == drop {
                    continue;
                }
                rows[i][1 + col] = -(c.clone() / ck.clone());
                col += 1;
            }
        } else {
            rows[i][1 + free] = K::one();
            free += 1;
        }
    }
    let chart = SliceChart { drop_index: drop, rows };

    let mut induced = Vec::new();
    let mut kept = Vec::new();
    for (j, h) in a.hyperplanes.iter().enumerate() {
        // compose l_j with the chart
        let mut coeffs = vec![K::zero(); m + 1];
        coeffs[0] = h.coeffs[0].clone();
        for (i, row) in chart.rows.iter().enumerate() {
            let aij = h.coeffs[1 + i].clone();
            if aij.is_zero() {
                continue;
            }
            for (k, c) in row.iter().enumerate() {
                coeffs[k] = coeffs[k].clone() + aij.clone() * c.clone();
            }
        }
        if coeffs[1..].iter().all(|c| c.is_zero()) {
            // parallel (empty intersection) or containing the whole slice;
            // the latter is excluded by the transversality check
            debug_assert!(!coeffs[0].is_zero());
            continue;
        }
        induced.push(Hyperplane {
            coeffs,
            label: h.label.clone(),
        });
        kept.push(j);
    }
    // m = 0 slices carry an empty arrangement on a point; otherwise dedupe
    // impossible (transversal slices of distinct hyperplanes stay distinct
    // only in general position) — coincident induced hyperplanes are merged.
    let mut merged: Vec<Hyperplane<K>> = Vec::new();
    let mut merged_kept: Vec<usize> = Vec::new();
    'outer: for (h, &orig) in induced.iter().zip(&kept) {
        for prev in &merged {
            if proportional(&prev.coeffs, &h.coeffs) {
                continue 'outer;
            }
        }
        merged.push(h.clone());
        merged_kept.push(orig);
    }
    Ok(Slice {
        arrangement: Arrangement {
            dim: m,
            hyperplanes: merged,
            include_infinity: a.include_infinity,
        },
        chart,
        kept: merged_kept,
    })
}

/// Exact transversality: for every flat `F` (intersection of an independent
/// subset of ≤ n hyperplanes) on which `f` is constant, the constant must
/// differ from `R`.
fn check_slice_transversal<K: Scalar>(
    a: &Arrangement<K>,
    f: &AffineFunctional<K>,
    r: &K,
) -> Result<(), GeometryError> {
    let n = a.dim;
    let idx: Vec<usize> = (0..a.len()).collect();
    for size in 1..=n.min(a.len()) {
        for subset in crate::util::subsets(&idx, size) {
            let rows: Vec<Vec<K>> = subset
                .iter()
                .map(|&j| a.hyperplanes[j].normal().to_vec())
                .collect();
            if rank(&rows) < size {
                continue; // dependent subset: flat (if any) covered elsewhere
            }
            // f constant on the flat iff f's normal lies in the row span
            let mut with_f = rows.clone();
            with_f.push(f.normal().to_vec());
            if rank(&with_f) > size {
                continue; // f varies along the flat
            }
            // solve one point of the flat to get the constant value
            let Some(point) = flat_point(a, &subset) else {
                continue;
            };
            if &f.eval(&point) == r {
                return Err(GeometryError::NonTransversalSlice { flat: subset });
            }
        }
    }
    Ok(())
}

/// Any point on the affine flat cut out by an independent subset (solve the
/// underdetermined system by extending with coordinate rows).
fn flat_point<K: Scalar>(a: &Arrangement<K>, subset: &[usize]) -> Option<Vec<K>> {
    let n = a.dim;
    let mut rows: Vec<Vec<K>> = Vec::with_capacity(n);
    let mut rhs: Vec<K> = Vec::with_capacity(n);
    for &j in subset {
        rows.push(a.hyperplanes[j].normal().to_vec());
        rhs.push(-a.hyperplanes[j].constant().clone());
    }
    // extend to a square invertible system with unit rows
    for i in 0..n {
        if rows.len() == n {
            break;
        }
        let mut unit = vec![K::zero(); n];
        unit[i] = K::one();
        let mut candidate = rows.clone();
        candidate.push(unit.clone());
        if rank(&candidate) == rows.len() + 1 {
            rows.push(unit);
            rhs.push(K::zero());
        }
    }
    if rows.len() < n {
        return None;
    }
    solve_square(&rows, &rhs)
}

/// All flats of codimension 1 and 2, each reported once with its closure.
/// With `include_infinity` set, the scan runs on the coned (projective)
/// arrangement including the hyperplane at infinity, whose index is `N`
/// (0-based, one past the last affine hyperplane).
pub fn flats_up_to_codim2<K: Scalar>(a: &Arrangement<K>) -> Vec<Flat> {
    let covectors: Vec<Vec<K>> = if a.include_infinity {
        let mut v: Vec<Vec<K>> = a.hyperplanes.iter().map(|h| h.coeffs.clone()).collect();
        let mut inf = vec![K::zero(); a.dim + 1];
        inf[0] = K::one();
        v.push(inf);
        v
    } else {
        a.hyperplanes.iter().map(|h| h.coeffs.clone()).collect()
    };
    let count = covectors.len();
    let mut flats = Vec::new();

    // codim 1: distinct covectors each span their own flat
    for j in 0..count {
        flats.push(Flat {
            members: vec![j],
            codim: 1,
            closure: vec![j],
        });
    }

    if a.include_infinity {
        // central scan in the cone: codim-2 subspaces exist only for n ≥ 2
        if a.dim < 2 {
            return flats;
        }
        let mut seen: Vec<Vec<usize>> = Vec::new();
        for i in 0..count {
            for j in i + 1..count {
                let pair = vec![covectors[i].clone(), covectors[j].clone()];
                if rank(&pair) < 2 {
                    continue;
                }
                let closure: Vec<usize> = (0..count)
                    .filter(|&k| {
                        let mut m = pair.clone();
                        m.push(covectors[k].clone());
                        rank(&m) == 2
                    })
                    .collect();
                if seen.contains(&closure) {
                    continue;
                }
                seen.push(closure.clone());
                flats.push(Flat {
                    members: closure.clone(),
                    codim: 2,
                    closure,
                });
            }
        }
    } else {
        // affine scan: pairs with independent normals meet in codim 2
        if a.dim < 2 {
            return flats;
        }
        let mut seen: Vec<Vec<usize>> = Vec::new();
        for i in 0..count {
            for j in i + 1..count {
                let normals = vec![
                    a.hyperplanes[i].normal().to_vec(),
                    a.hyperplanes[j].normal().to_vec(),
                ];
                if rank(&normals) < 2 {
                    continue; // parallel: empty affine intersection
                }
                let pair = vec![covectors[i].clone(), covectors[j].clone()];
                let closure: Vec<usize> = (0..count)
                    .filter(|&k| {
                        let mut m = pair.clone();
                        m.push(covectors[k].clone());
                        rank(&m) == 2
                    })
                    .collect();
                if seen.contains(&closure) {
                    continue;
                }
                seen.push(closure.clone());
                flats.push(Flat {
                    members: closure.clone(),
                    codim: 2,
                    closure,
                });
            }
        }
    }
    flats
}

/// Mode flag for [`is_boolean_through_origin`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BooleanMode {
    /// Every n-subset of the linear parts `{a_j}` has rank n
    /// (the central arrangement of linear parts is Boolean).
    LinearParts,
    /// General position: every (n+1)-subset of the coned covectors has rank
    /// n+1 and every n-subset of linear parts has rank n (equivalently, the
    /// coned arrangement in affine (n+1)-space, infinity included, is
    /// Boolean).
    Coned,
}

/// Exact rank test for the Boolean / general-position conditions.
pub fn is_boolean_through_origin<K: Scalar>(a: &Arrangement<K>, mode: BooleanMode) -> bool {
    let n = a.dim;
    let idx: Vec<usize> = (0..a.len()).collect();
    let linear_ok = || {
        if a.len() < n {
            return true;
        }
        crate::util::subsets(&idx, n).into_iter().all(|subset| {
            let rows: Vec<Vec<K>> = subset
                .iter()
                .map(|&j| a.hyperplanes[j].normal().to_vec())
                .collect();
            rank(&rows) == n
        })
    };
    match mode {
        BooleanMode::LinearParts => linear_ok(),
        BooleanMode::Coned => {
            if !linear_ok() {
                return false;
            }
            if a.len() < n + 1 {
                return true;
            }
            crate::util::subsets(&idx, n + 1).into_iter().all(|subset| {
                let rows: Vec<Vec<K>> = subset
                    .iter()
                    .map(|&j| a.hyperplanes[j].coeffs.clone())
                    .collect();
                rank(&rows) == n + 1
            })
        }
    }
}

/// All 0-dimensional flats (vertices) of the arrangement, deduplicated.
pub fn vertices<K: Scalar>(a: &Arrangement<K>) -> Vec<Vec<K>> {
    let n = a.dim;
    if n == 0 || a.len() < n {
        return Vec::new();
    }
    let idx: Vec<usize> = (0..a.len()).collect();
    let mut out: Vec<Vec<K>> = Vec::new();
    for subset in crate::util::subsets(&idx, n) {
        let rows: Vec<Vec<K>> = subset
            .iter()
            .map(|&j| a.hyperplanes[j].normal().to_vec())
            .collect();
        let rhs: Vec<K> = subset
            .iter()
            .map(|&j| -a.hyperplanes[j].constant().clone())
            .collect();
        if rank(&rows) < n {
            continue;
        }
        if let Some(p) = solve_square(&rows, &rhs) {
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rat, rat_i};
    use num_traits::Zero;

    fn line_arrangement(points: &[i64]) -> Arrangement<Rat> {
        // hyperplane t = p encoded as -p + t
        arrangement_from_rows(1, &points.iter().map(|&p| vec![-p, 1]).collect::<Vec<_>>())
    }

    fn three_generic_lines() -> Arrangement<Rat> {
        // t1 = 0, t2 = 0, t1 + t2 = 1
        arrangement_from_rows(2, &[vec![0, 1, 0], vec![0, 0, 1], vec![1, -1, -1]])
    }

    #[test]
    fn eval_examples() {
        // h = t - 1, p = 1 -> 0
        let h = Hyperplane::new(vec![rat_i(-1), rat_i(1)], "h").unwrap();
        assert_eq!(h.eval(&[rat_i(1)]).unwrap(), rat_i(0));
        // h = t1 + t2, p = (1/2, 1/3) -> 5/6
        let h = Hyperplane::new(vec![rat_i(0), rat_i(1), rat_i(1)], "h").unwrap();
        assert_eq!(h.eval(&[rat(1, 2), rat(1, 3)]).unwrap(), rat(5, 6));
        // h = 2 - t, p = 3 -> -1
        let h = Hyperplane::new(vec![rat_i(2), rat_i(-1)], "h").unwrap();
        assert_eq!(h.eval(&[rat_i(3)]).unwrap(), rat_i(-1));
        // dimension mismatch
        assert!(h.eval(&[rat_i(1), rat_i(2)]).is_err());
    }

    #[test]
    fn feasibility_on_the_line() {
        let a = line_arrangement(&[0, 1]);
        let w = sign_vector_feasible(&a, &SignVector::parse("+-").unwrap())
            .unwrap()
            .expect("interval (0,1) nonempty");
        assert_eq!(a.sign_vector_at(&w).unwrap(), SignVector::parse("+-").unwrap());
        assert!(sign_vector_feasible(&a, &SignVector::parse("-+").unwrap())
            .unwrap()
            .is_none());
    }

    #[test]
    fn feasibility_triangle_interior() {
        let a = three_generic_lines();
        let s = SignVector::parse("+++").unwrap();
        let w = sign_vector_feasible(&a, &s).unwrap().expect("triangle interior");
        assert_eq!(a.sign_vector_at(&w).unwrap(), s);
    }

    #[test]
    fn recession_cone_examples() {
        let a = line_arrangement(&[0, 1]);
        // chamber (0,1): bounded
        assert!(recession_cone_trivial(&a, &SignVector::parse("+-").unwrap()).unwrap());
        // chamber (1, ∞): unbounded with a valid certificate
        let s = SignVector::parse("++").unwrap();
        let d = recession_direction(&a, &s).unwrap().expect("ray is unbounded");
        assert!(d.iter().any(|x| !x.is_zero()));
        for (j, h) in a.hyperplanes.iter().enumerate() {
            let mut dot = Rat::zero();
            for (c, x) in h.normal().iter().zip(&d) {
                dot += c * x;
            }
            let signed = match s.0[j] {
                Sign::Pos => dot,
                Sign::Neg => -dot,
                Sign::Zero => unreachable!(),
            };
            assert!(signed >= Rat::zero(), "certificate violates constraint {j}");
        }
        // triangle: bounded
        let t = three_generic_lines();
        assert!(recession_cone_trivial(&t, &SignVector::parse("+++").unwrap()).unwrap());
    }

    #[test]
    fn slices() {
        // {t=0, t=1} sliced at t=10: 0-dimensional, empty induced arrangement
        let a = line_arrangement(&[0, 1]);
        let f = AffineFunctional::new(vec![rat_i(0), rat_i(1)]).unwrap();
        let s = slice_arrangement(&a, &f, &rat_i(10)).unwrap();
        assert_eq!(s.arrangement.dim, 0);
        assert!(s.arrangement.is_empty());
        assert_eq!(s.chart.embed(&[]), vec![rat_i(10)]);

        // 3 generic lines (none parallel to the slice) sliced by t1 = 100:
        // 3 points on a line
        let t = arrangement_from_rows(2, &[vec![0, 0, 1], vec![1, -1, -1], vec![0, 1, -1]]);
        let f = AffineFunctional::new(vec![rat_i(0), rat_i(1), rat_i(0)]).unwrap();
        let s = slice_arrangement(&t, &f, &rat_i(100)).unwrap();
        assert_eq!(s.arrangement.dim, 1);
        assert_eq!(s.arrangement.len(), 3);

        // {t1=0, t2=0} sliced by t1+t2 = 1: 2 points on a line
        let x = arrangement_from_rows(2, &[vec![0, 1, 0], vec![0, 0, 1]]);
        let f = AffineFunctional::new(vec![rat_i(0), rat_i(1), rat_i(1)]).unwrap();
        let s = slice_arrangement(&x, &f, &rat_i(1)).unwrap();
        assert_eq!(s.arrangement.dim, 1);
        assert_eq!(s.arrangement.len(), 2);

        // slice through the triple point of concurrent lines is non-transversal
        let c = arrangement_from_rows(2, &[vec![0, 1, 0], vec![0, 0, 1], vec![0, 1, -1]]);
        let f = AffineFunctional::new(vec![rat_i(0), rat_i(1), rat_i(0)]).unwrap();
        assert!(matches!(
            slice_arrangement(&c, &f, &rat_i(0)),
            Err(GeometryError::NonTransversalSlice { .. })
        ));
    }

    #[test]
    fn slice_sign_coherence() {
        let t = three_generic_lines();
        let f = AffineFunctional::new(vec![rat_i(0), rat_i(1), rat_i(1)]).unwrap();
        let s = slice_arrangement(&t, &f, &rat_i(7)).unwrap();
        let u = vec![rat(13, 5)];
        let embedded = s.chart.embed(&u);
        assert_eq!(f.eval(&embedded), rat_i(7));
        for (slice_j, &orig_j) in s.kept.iter().enumerate() {
            let induced = s.arrangement.hyperplanes[slice_j].eval(&u).unwrap();
            let ambient = t.hyperplanes[orig_j].eval(&embedded).unwrap();
            assert_eq!(induced.sign(), ambient.sign());
        }
    }

    #[test]
    fn flats_examples() {
        // two points on a line: two codim-1 flats, no codim-2
        let a = line_arrangement(&[0, 1]);
        let f = flats_up_to_codim2(&a);
        assert_eq!(f.iter().filter(|x| x.codim == 1).count(), 2);
        assert_eq!(f.iter().filter(|x| x.codim == 2).count(), 0);

        // 3 generic lines: 3 codim-1 flats, 3 codim-2 flats with closures of size 2
        let t = three_generic_lines();
        let f = flats_up_to_codim2(&t);
        assert_eq!(f.iter().filter(|x| x.codim == 1).count(), 3);
        let c2: Vec<_> = f.iter().filter(|x| x.codim == 2).collect();
        assert_eq!(c2.len(), 3);
        assert!(c2.iter().all(|x| x.closure.len() == 2));

        // 3 concurrent lines: 1 codim-2 flat with closure of size 3
        let c = arrangement_from_rows(2, &[vec![0, 1, 0], vec![0, 0, 1], vec![0, 1, -1]]);
        let f = flats_up_to_codim2(&c);
        let c2: Vec<_> = f.iter().filter(|x| x.codim == 2).collect();
        assert_eq!(c2.len(), 1);
        assert_eq!(c2[0].closure.len(), 3);
        assert!(c2[0].is_maximal_subfamily());
    }

    #[test]
    fn boolean_checks() {
        // coned {t=0, t=1, t=2}: any 2 of the 3 projective covectors independent
        let a = line_arrangement(&[0, 1, 2]);
        assert!(is_boolean_through_origin(&a, BooleanMode::Coned));
        // two parallel lines in the plane: dependent linear parts
        let p = arrangement_from_rows(2, &[vec![0, 1, 0], vec![-1, 1, 0]]);
        assert!(!is_boolean_through_origin(&p, BooleanMode::Coned));
        assert!(!is_boolean_through_origin(&p, BooleanMode::LinearParts));
        // single hyperplane on the line
        let s = line_arrangement(&[0]);
        assert!(is_boolean_through_origin(&s, BooleanMode::Coned));
        assert!(is_boolean_through_origin(&s, BooleanMode::LinearParts));
    }

    #[test]
    fn vertex_enumeration() {
        let t = three_generic_lines();
        let v = vertices(&t);
        assert_eq!(v.len(), 3);
        assert!(v.contains(&vec![rat_i(0), rat_i(0)]));
        assert!(v.contains(&vec![rat_i(1), rat_i(0)]));
        assert!(v.contains(&vec![rat_i(0), rat_i(1)]));
    }
}
