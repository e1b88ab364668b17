//! Twist data for the local system: rank-1 exponents α_j or rank-r residue
//! matrices P_j, with the flatness, genericity, and asymptotic-genericity
//! tests. Integrality is always decided exactly over complex rationals;
//! floating point enters only through [`monodromy_factors`].

use crate::field::{CRat, Rat, RatFn, Scalar};
use crate::geometry::{
    flats_up_to_codim2, slice_arrangement, AffineFunctional, Arrangement, GeometryError,
};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConnectionError {
    #[error("exponent data has length {got}, arrangement has {expected} hyperplanes")]
    Length { expected: usize, got: usize },
    #[error("monodromy factors need rank 1 data")]
    NotRankOne,
    #[error("exponent α_{index} is an integer; d = exp(2πiα)−1 would vanish")]
    IntegerExponent { index: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Reference to a hyperplane in genericity certificates; `Infinity` is the
/// formal hyperplane `A_{N+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HRef {
    Affine(usize),
    Infinity,
}

impl HRef {
    fn from_scan_index(idx: usize, n_affine: usize) -> HRef {
        if idx == n_affine {
            HRef::Infinity
        } else {
            HRef::Affine(idx)
        }
    }
}

impl fmt::Display for HRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HRef::Affine(j) => write!(f, "j={}", j + 1),
            HRef::Infinity => write!(f, "infinity"),
        }
    }
}

/// Square matrix over complex rationals (residue endomorphisms P_j).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CMat {
    pub size: usize,
    entries: Vec<CRat>,
}

impl CMat {
    pub fn from_rows(rows: Vec<Vec<CRat>>) -> CMat {
        let size = rows.len();
        assert!(rows.iter().all(|r| r.len() == size), "square matrix required");
        CMat {
            size,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn zero(size: usize) -> CMat {
        CMat {
            size,
            entries: vec![CRat::zero(); size * size],
        }
    }

    pub fn identity(size: usize) -> CMat {
        let mut m = CMat::zero(size);
        for i in 0..size {
            *m.at_mut(i, i) = CRat::one();
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> &CRat {
        &self.entries[i * self.size + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut CRat {
        &mut self.entries[i * self.size + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn add(&self, o: &CMat) -> CMat {
        assert_eq!(self.size, o.size);
        CMat {
            size: self.size,
            entries: self
                .entries
                .iter()
                .zip(&o.entries)
                .map(|(a, b)| a.clone() + b)
                .collect(),
        }
    }

    pub fn sub(&self, o: &CMat) -> CMat {
        assert_eq!(self.size, o.size);
        CMat {
            size: self.size,
            entries: self
                .entries
                .iter()
                .zip(&o.entries)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn neg(&self) -> CMat {
        CMat {
            size: self.size,
            entries: self.entries.iter().map(|e| -e.clone()).collect(),
        }
    }

    pub fn mul(&self, o: &CMat) -> CMat {
        assert_eq!(self.size, o.size);
        let n = self.size;
        let mut m = CMat::zero(n);
        for i in 0..n {
            for k in 0..n {
                if self.at(i, k).is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = self.at(i, k).clone() * o.at(k, j).clone();
                    *m.at_mut(i, j) = m.at(i, j).clone() + &v;
                }
            }
        }
        m
    }

    pub fn commutator(&self, o: &CMat) -> CMat {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn trace(&self) -> CRat {
        let mut t = CRat::zero();
        for i in 0..self.size {
            t = t + self.at(i, i);
        }
        t
    }

    /// Characteristic polynomial coefficients (monic, little-endian) by the
    /// Faddeev–LeVerrier recurrence.
    pub fn char_poly(&self) -> Vec<CRat> {
        let n = self.size;
        let mut coeffs = vec![CRat::zero(); n + 1];
        coeffs[n] = CRat::one();
        let mut m = CMat::zero(n);
        let mut c_prev = CRat::one();
        for k in 1..=n {
            // M_k = A (M_{k-1} + c_{k-1} I)
            let mut shifted = m.clone();
            for i in 0..n {
                *shifted.at_mut(i, i) = shifted.at(i, i).clone() + &c_prev;
            }
            m = self.mul(&shifted);
            let k_inv = CRat::from_rat(Rat::new(BigInt::one(), BigInt::from(k)));
            let c_k = -(m.trace() * k_inv);
            coeffs[n - k] = c_k.clone();
            c_prev = c_k;
        }
        coeffs
    }

    /// Eigenvalues when they are all rational, found by exact factorization
    /// of the characteristic polynomial over ℚ. `None` when the polynomial
    /// has non-real coefficients or does not split over ℚ.
    pub fn rational_eigenvalues(&self) -> Option<Vec<Rat>> {
        let cp = self.char_poly();
        if cp.iter().any(|c| !c.is_real()) {
            return None;
        }
        let poly: Vec<Rat> = cp.into_iter().map(|c| c.re).collect();
        rational_roots_of_monic(&poly)
    }
}

/// All roots of a monic rational polynomial when it splits over ℚ
/// (rational-root candidates by the integer root theorem after clearing
/// denominators, with deflation). `None` if an irrational factor remains.
fn rational_roots_of_monic(poly: &[Rat]) -> Option<Vec<Rat>> {
    let mut p: Vec<Rat> = poly.to_vec();
    let mut roots = Vec::new();
    'deflate: while p.len() > 1 {
        let mut den = BigInt::one();
        for c in &p {
            den = num_integer::lcm(den, c.denom().clone());
        }
        let ints: Vec<BigInt> = p
            .iter()
            .map(|c| (c * Rat::from_integer(den.clone())).to_integer())
            .collect();
        let lead = ints.last().unwrap().clone();
        let tail_idx = ints.iter().position(|c| !c.is_zero()).unwrap();
        if tail_idx > 0 {
            for _ in 0..tail_idx {
                roots.push(Rat::zero());
            }
            p = p[tail_idx..].to_vec();
            continue 'deflate;
        }
        let constant = ints[0].clone();
        for pd in divisors(&constant) {
            for qd in divisors(&lead) {
                for sign in [1i64, -1] {
                    let cand = Rat::new(pd.clone() * BigInt::from(sign), qd.clone());
                    if eval_poly(&p, &cand).is_zero() {
                        roots.push(cand.clone());
                        p = deflate(&p, &cand);
                        continue 'deflate;
                    }
                }
            }
        }
        return None;
    }
    Some(roots)
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() {
        return vec![BigInt::zero()];
    }
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            out.push(&n / &d);
        }
        d += 1;
    }
    out.sort();
    out.dedup();
    out
}

fn eval_poly(p: &[Rat], x: &Rat) -> Rat {
    let mut acc = Rat::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn deflate(p: &[Rat], root: &Rat) -> Vec<Rat> {
    // synthetic division by (x - root)
    let n = p.len();
    let mut q = vec![Rat::zero(); n - 1];
    let mut carry = Rat::zero();
    for k in (1..n).rev() {
        carry = &p[k] + &carry * root;
        q[k - 1] = carry.clone();
    }
    q
}

/// Twist exponents (rank 1) or residue endomorphisms (rank r > 1). The
/// datum at infinity is always the negated sum, maintained by construction.
#[derive(Debug, Clone)]
pub enum ExponentData {
    Rank1 { alphas: Vec<CRat> },
    Residues { rank: usize, matrices: Vec<CMat> },
}

impl ExponentData {
    pub fn rank1(alphas: Vec<CRat>) -> ExponentData {
        ExponentData::Rank1 { alphas }
    }

    pub fn rank1_real(alphas: &[Rat]) -> ExponentData {
        ExponentData::Rank1 {
            alphas: alphas.iter().map(|a| CRat::from_rat(a.clone())).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            ExponentData::Rank1 { .. } => 1,
            ExponentData::Residues { rank, .. } => *rank,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ExponentData::Rank1 { alphas } => alphas.len(),
            ExponentData::Residues { matrices, .. } => matrices.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn alphas(&self) -> Option<&[CRat]> {
        match self {
            ExponentData::Rank1 { alphas } => Some(alphas),
            _ => None,
        }
    }

    /// `α_{N+1} = −Σ_j α_j`.
    pub fn alpha_infinity(&self) -> Option<CRat> {
        self.alphas()
            .map(|a| -a.iter().fold(CRat::zero(), |acc, x| acc + x))
    }

    /// `P_{N+1} = −Σ_j P_j`.
    pub fn residue_infinity(&self) -> Option<CMat> {
        match self {
            ExponentData::Residues { rank, matrices } => {
                let mut s = CMat::zero(*rank);
                for m in matrices {
                    s = s.add(m);
                }
                Some(s.neg())
            }
            _ => None,
        }
    }

    /// Restriction to a subset of hyperplanes (used for slices).
    pub fn restrict(&self, kept: &[usize]) -> ExponentData {
        match self {
            ExponentData::Rank1 { alphas } => ExponentData::Rank1 {
                alphas: kept.iter().map(|&j| alphas[j].clone()).collect(),
            },
            ExponentData::Residues { rank, matrices } => ExponentData::Residues {
                rank: *rank,
                matrices: kept.iter().map(|&j| matrices[j].clone()).collect(),
            },
        }
    }
}

/// Verdict of the flatness test `∇² = 0`.
#[derive(Debug, Clone)]
pub struct FlatnessReport {
    pub flat: bool,
    /// First violating (maximal subfamily, member position within it).
    pub certificate: Option<(Vec<usize>, usize)>,
}

/// `∇² = 0` iff for every codimension-2 maximal subfamily the commutators
/// `[P_ν, P_{j_1} + … + P_{j_q}]` vanish. Scalars always commute.
pub fn check_flatness<K: Scalar>(
    a: &Arrangement<K>,
    e: &ExponentData,
) -> Result<FlatnessReport, ConnectionError> {
    if e.len() != a.len() {
        return Err(ConnectionError::Length {
            expected: a.len(),
            got: e.len(),
        });
    }
    let matrices = match e {
        ExponentData::Rank1 { .. } => {
            return Ok(FlatnessReport {
                flat: true,
                certificate: None,
            })
        }
        ExponentData::Residues { matrices, .. } => matrices,
    };
    let mut affine = a.clone();
    affine.include_infinity = false;
    for flat in flats_up_to_codim2(&affine) {
        if flat.codim != 2 {
            continue;
        }
        let mut sum = CMat::zero(e.rank());
        for &j in &flat.closure {
            sum = sum.add(&matrices[j]);
        }
        for (pos, &j) in flat.closure.iter().enumerate() {
            if !matrices[j].commutator(&sum).is_zero() {
                return Ok(FlatnessReport {
                    flat: false,
                    certificate: Some((flat.closure.clone(), pos)),
                });
            }
        }
    }
    Ok(FlatnessReport {
        flat: true,
        certificate: None,
    })
}

/// Why an exponent datum fails genericity.
#[derive(Debug, Clone)]
pub enum GenericityViolation {
    /// Condition (1): an eigenvalue of `P_j` (or `α_j` itself) is an integer.
    IntegerEigenvalue { hyperplane: HRef, value: Rat },
    /// Condition (2): a degenerate maximal subfamily whose exponent sum has
    /// an integer eigenvalue.
    IntegerSubfamilySum { subfamily: Vec<HRef>, value: Rat },
}

impl fmt::Display for GenericityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenericityViolation::IntegerEigenvalue { hyperplane, value } => {
                write!(f, "integer eigenvalue {value} at {hyperplane}")
            }
            GenericityViolation::IntegerSubfamilySum { subfamily, value } => {
                let names: Vec<String> = subfamily.iter().map(|h| h.to_string()).collect();
                write!(
                    f,
                    "integer eigenvalue {value} of the sum over {{{}}}",
                    names.join(", ")
                )
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum GenericityVerdict {
    Generic,
    NotGeneric(GenericityViolation),
    /// Rank > 1 with eigenvalues outside ℚ: integrality is not decided.
    Undecided(String),
}

impl GenericityVerdict {
    pub fn is_generic(&self) -> bool {
        matches!(self, GenericityVerdict::Generic)
    }
}

/// Genericity over any exact field: (1) the exponent at every hyperplane
/// including infinity is non-integral; (2) for every maximal subfamily of
/// the projectivized arrangement with codimension < cardinality, the summed
/// exponent is non-integral. An empty arrangement on a point is vacuously
/// generic.
pub fn is_generic<K: Scalar>(a: &Arrangement<K>, e: &ExponentData) -> GenericityVerdict {
    if e.len() != a.len() {
        return GenericityVerdict::Undecided(format!(
            "exponent data length {} does not match arrangement size {}",
            e.len(),
            a.len()
        ));
    }
    if a.is_empty() && a.dim == 0 {
        return GenericityVerdict::Generic;
    }
    let n_affine = a.len();

    // integer eigenvalues at one scan index (affine hyperplanes, then infinity)
    let integer_eigs_at = |idx: usize| -> Result<Option<Rat>, String> {
        match e {
            ExponentData::Rank1 { alphas } => {
                let alpha = if idx == n_affine {
                    e.alpha_infinity().expect("rank 1")
                } else {
                    alphas[idx].clone()
                };
                Ok(alpha.is_integer().then(|| alpha.re))
            }
            ExponentData::Residues { matrices, .. } => {
                let m = if idx == n_affine {
                    e.residue_infinity().expect("rank > 1")
                } else {
                    matrices[idx].clone()
                };
                m.rational_eigenvalues()
                    .map(|ev| ev.into_iter().find(|x| x.denom().is_one()))
                    .ok_or_else(|| {
                        format!("eigenvalues of the residue at scan index {idx} are not rational")
                    })
            }
        }
    };

    // condition (1)
    for idx in 0..=n_affine {
        match integer_eigs_at(idx) {
            Ok(Some(v)) => {
                return GenericityVerdict::NotGeneric(GenericityViolation::IntegerEigenvalue {
                    hyperplane: HRef::from_scan_index(idx, n_affine),
                    value: v,
                })
            }
            Ok(None) => {}
            Err(reason) => return GenericityVerdict::Undecided(reason),
        }
    }

    // condition (2): degenerate maximal subfamilies of the coned arrangement
    let mut projective = a.clone();
    projective.include_infinity = true;
    for flat in flats_up_to_codim2(&projective) {
        if flat.closure.len() <= flat.codim {
            continue;
        }
        let subfamily: Vec<HRef> = flat
            .closure
            .iter()
            .map(|&idx| HRef::from_scan_index(idx, n_affine))
            .collect();
        match e {
            ExponentData::Rank1 { alphas } => {
                let mut sum = CRat::zero();
                for &idx in &flat.closure {
                    let alpha = if idx == n_affine {
                        e.alpha_infinity().expect("rank 1")
                    } else {
                        alphas[idx].clone()
                    };
                    sum = sum + &alpha;
                }
                if sum.is_integer() {
                    return GenericityVerdict::NotGeneric(
                        GenericityViolation::IntegerSubfamilySum {
                            subfamily,
                            value: sum.re,
                        },
                    );
                }
            }
            ExponentData::Residues { rank, matrices } => {
                let mut sum = CMat::zero(*rank);
                for &idx in &flat.closure {
                    let m = if idx == n_affine {
                        e.residue_infinity().expect("rank > 1")
                    } else {
                        matrices[idx].clone()
                    };
                    sum = sum.add(&m);
                }
                match sum.rational_eigenvalues() {
                    Some(ev) => {
                        if let Some(v) = ev.into_iter().find(|x| x.denom().is_one()) {
                            return GenericityVerdict::NotGeneric(
                                GenericityViolation::IntegerSubfamilySum { subfamily, value: v },
                            );
                        }
                    }
                    None => {
                        return GenericityVerdict::Undecided(
                            "subfamily sum has eigenvalues outside ℚ".into(),
                        )
                    }
                }
            }
        }
    }
    GenericityVerdict::Generic
}

/// Asymptotic genericity with respect to a linear phase: the induced
/// connection on the slice `{f = R}` is generic for sufficiently large R,
/// realized exactly by running the genericity scan over ℚ(R) at symbolic R.
pub fn is_asymptotically_generic(
    a: &Arrangement<Rat>,
    e: &ExponentData,
    f: &AffineFunctional<Rat>,
) -> Result<GenericityVerdict, ConnectionError> {
    let lifted: Arrangement<RatFn> = a.map(RatFn::from_rat);
    let f_lifted: AffineFunctional<RatFn> = f.map(RatFn::from_rat);
    let slice = slice_arrangement(&lifted, &f_lifted, &RatFn::var())?;
    let induced = e.restrict(&slice.kept);
    Ok(is_generic(&slice.arrangement, &induced))
}

/// The factors `d_j = exp(2πiα_j) − 1` (floating complex).
#[derive(Debug, Clone)]
pub struct MonodromyFactors {
    pub d: Vec<Complex64>,
}

pub fn monodromy_factors(e: &ExponentData) -> Result<MonodromyFactors, ConnectionError> {
    let ExponentData::Rank1 { alphas } = e else {
        return Err(ConnectionError::NotRankOne);
    };
    let mut d = Vec::with_capacity(alphas.len());
    for (j, alpha) in alphas.iter().enumerate() {
        if alpha.is_integer() {
            return Err(ConnectionError::IntegerExponent { index: j });
        }
        d.push(exp_2pi_i(alpha) - Complex64::new(1.0, 0.0));
    }
    Ok(MonodromyFactors { d })
}

/// `exp(2πi α)` for a complex rational α.
pub fn exp_2pi_i(alpha: &CRat) -> Complex64 {
    let z = alpha.to_c64();
    let modulus = (-2.0 * std::f64::consts::PI * z.im).exp();
    let angle = 2.0 * std::f64::consts::PI * z.re;
    Complex64::from_polar(modulus, angle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rat, rat_i};
    use crate::geometry::arrangement_from_rows;

    fn kummer_arrangement() -> Arrangement<Rat> {
        arrangement_from_rows(1, &[vec![0, 1], vec![-1, 1]])
    }

    fn cr(n: i64, d: i64) -> CRat {
        CRat::from_rat(rat(n, d))
    }

    #[test]
    fn infinity_exponent_is_negated_sum() {
        let e = ExponentData::rank1(vec![cr(1, 2), cr(1, 3)]);
        assert_eq!(e.alpha_infinity().unwrap(), cr(-5, 6));
        let total = e.alphas().unwrap().iter().fold(CRat::zero(), |a, x| a + x)
            + &e.alpha_infinity().unwrap();
        assert!(total.is_zero());
    }

    #[test]
    fn flatness_rank1_always() {
        let a = kummer_arrangement();
        let e = ExponentData::rank1(vec![cr(7, 3), cr(-2, 5)]);
        assert!(check_flatness(&a, &e).unwrap().flat);
    }

    #[test]
    fn flatness_rank2_commutator() {
        // two hyperplanes through the origin in the plane share a codim-2 flat
        let a = arrangement_from_rows(2, &[vec![0, 1, 0], vec![0, 0, 1]]);
        let p1 = CMat::from_rows(vec![
            vec![cr(1, 3), CRat::zero()],
            vec![CRat::zero(), cr(2, 3)],
        ]);
        let p2 = CMat::from_rows(vec![
            vec![CRat::zero(), cr(1, 5)],
            vec![CRat::zero(), CRat::zero()],
        ]);
        let e = ExponentData::Residues {
            rank: 2,
            matrices: vec![p1.clone(), p2],
        };
        let report = check_flatness(&a, &e).unwrap();
        assert!(!report.flat);
        assert!(report.certificate.is_some());

        // commuting diagonals are flat
        let q2 = CMat::from_rows(vec![
            vec![cr(1, 5), CRat::zero()],
            vec![CRat::zero(), cr(1, 7)],
        ]);
        let e = ExponentData::Residues {
            rank: 2,
            matrices: vec![p1, q2],
        };
        assert!(check_flatness(&a, &e).unwrap().flat);
    }

    #[test]
    fn generic_kummer() {
        let a = kummer_arrangement();
        let e = ExponentData::rank1(vec![cr(1, 2), cr(1, 3)]);
        assert!(is_generic(&a, &e).is_generic());
    }

    #[test]
    fn integer_exponent_certificate() {
        let a = kummer_arrangement();
        let e = ExponentData::rank1(vec![CRat::from_int(2), cr(1, 3)]);
        match is_generic(&a, &e) {
            GenericityVerdict::NotGeneric(GenericityViolation::IntegerEigenvalue {
                hyperplane,
                ..
            }) => assert_eq!(hyperplane, HRef::Affine(0)),
            v => panic!("expected integer-eigenvalue violation, got {v:?}"),
        }
    }

    #[test]
    fn parallel_lines_infinity_subfamily() {
        // parallel lines t1 = 0 and t1 = 1: the coned flat shared with
        // infinity has q = 3 > codim = 2 and its sum telescopes to 0 ∈ ℤ,
        // so two parallel lines alone are never generic. With α = (1/2, 1/2)
        // the scan already trips on α_∞ = −1; with α = (1/4, 1/3) the
        // subfamily condition is the only violation.
        let a = arrangement_from_rows(2, &[vec![0, 1, 0], vec![-1, 1, 0]]);
        let e = ExponentData::rank1(vec![cr(1, 2), cr(1, 2)]);
        assert!(!is_generic(&a, &e).is_generic());

        let e = ExponentData::rank1(vec![cr(1, 4), cr(1, 3)]);
        match is_generic(&a, &e) {
            GenericityVerdict::NotGeneric(GenericityViolation::IntegerSubfamilySum {
                subfamily,
                value,
            }) => {
                assert_eq!(value, rat_i(0));
                assert!(subfamily.contains(&HRef::Infinity));
                assert_eq!(subfamily.len(), 3);
            }
            v => panic!("expected subfamily violation, got {v:?}"),
        }
    }

    #[test]
    fn asymptotic_genericity() {
        // Kummer config: slice is a point, vacuously generic
        let a = kummer_arrangement();
        let e = ExponentData::rank1(vec![cr(1, 2), cr(1, 3)]);
        let f = AffineFunctional::new(vec![rat_i(0), rat_i(1)]).unwrap();
        assert!(is_asymptotically_generic(&a, &e, &f).unwrap().is_generic());

        // 3 generic lines with f = t1: generic iff α_j and Σα_j ∉ ℤ
        let t = arrangement_from_rows(2, &[vec![0, 0, 1], vec![1, -1, -1], vec![0, 1, -1]]);
        let f = AffineFunctional::new(vec![rat_i(0), rat_i(1), rat_i(0)]).unwrap();
        let good = ExponentData::rank1(vec![cr(1, 2), cr(1, 3), cr(1, 5)]);
        assert!(is_asymptotically_generic(&t, &good, &f)
            .unwrap()
            .is_generic());
        // α₁+α₂+α₃ = 1 fails on the slice's infinity
        let bad = ExponentData::rank1(vec![cr(1, 2), cr(1, 3), cr(1, 6)]);
        match is_asymptotically_generic(&t, &bad, &f).unwrap() {
            GenericityVerdict::NotGeneric(GenericityViolation::IntegerEigenvalue {
                hyperplane,
                ..
            }) => assert_eq!(hyperplane, HRef::Infinity),
            v => panic!("expected infinity violation, got {v:?}"),
        }
    }

    #[test]
    fn imaginary_perturbation_never_creates_violation() {
        // perturbing an α_j by a non-real imaginary part makes every sum
        // containing it non-real, so a generic datum stays generic
        let t = arrangement_from_rows(2, &[vec![0, 0, 1], vec![1, -1, -1], vec![0, 1, -1]]);
        let base = vec![cr(1, 2), cr(1, 3), cr(1, 5)];
        assert!(is_generic(&t, &ExponentData::rank1(base.clone())).is_generic());
        for j in 0..base.len() {
            let mut perturbed = base.clone();
            perturbed[j] = CRat::new(perturbed[j].re.clone(), rat(1, 7));
            assert!(
                is_generic(&t, &ExponentData::rank1(perturbed)).is_generic(),
                "perturbing α_{j} created a violation"
            );
        }
    }

    #[test]
    fn monodromy_values() {
        let e = ExponentData::rank1(vec![cr(1, 2), cr(1, 4), cr(1, 3)]);
        let m = monodromy_factors(&e).unwrap();
        assert!((m.d[0] - Complex64::new(-2.0, 0.0)).norm() < 1e-15);
        assert!((m.d[1] - Complex64::new(-1.0, 1.0)).norm() < 1e-15);
        let expected = Complex64::new(-1.5, 0.75f64.sqrt());
        assert!((m.d[2] - expected).norm() < 1e-15);
        // conjugate symmetry for real α
        let d_neg = monodromy_factors(&ExponentData::rank1(vec![cr(-1, 3)]))
            .unwrap()
            .d[0];
        let d_pos = monodromy_factors(&ExponentData::rank1(vec![cr(1, 3)]))
            .unwrap()
            .d[0];
        assert!((d_neg - d_pos.conj()).norm() < 1e-15);
        // integer α rejected
        let bad = ExponentData::rank1(vec![CRat::from_int(1)]);
        assert!(matches!(
            monodromy_factors(&bad),
            Err(ConnectionError::IntegerExponent { index: 0 })
        ));
    }

    #[test]
    fn rational_eigenvalue_path() {
        // triangular P with eigenvalues 1/2 and 2 (integer 2 fails genericity)
        let p = CMat::from_rows(vec![
            vec![cr(1, 2), cr(1, 1)],
            vec![CRat::zero(), cr(2, 1)],
        ]);
        let ev = p.rational_eigenvalues().unwrap();
        assert!(ev.contains(&rat(1, 2)) && ev.contains(&rat_i(2)));
        let a = arrangement_from_rows(1, &[vec![0, 1]]);
        let e = ExponentData::Residues {
            rank: 2,
            matrices: vec![p],
        };
        assert!(matches!(
            is_generic(&a, &e),
            GenericityVerdict::NotGeneric(GenericityViolation::IntegerEigenvalue { .. })
        ));
        // irrational eigenvalues: undecided, not guessed
        let q = CMat::from_rows(vec![
            vec![CRat::zero(), cr(2, 1)],
            vec![cr(1, 1), CRat::zero()],
        ]);
        let e = ExponentData::Residues {
            rank: 2,
            matrices: vec![q],
        };
        assert!(matches!(is_generic(&a, &e), GenericityVerdict::Undecided(_)));
    }
}
