//! Rapid-decay homology bases. For a linear phase the basis is the bounded
//! chambers plus, for each bounded chamber of the slice `{f = R}` at
//! symbolic-generic R, the unbounded ambient chamber containing it,
//! truncated at `{Re f < R}`. For the quadratic phase `f = Σ t_i²` it is
//! all bounded chambers plus every unbounded chamber truncated by the ball.
//! Contributions exist only in degree n; other degrees are empty.

use crate::chambers::{enumerate_chambers, Chamber, ChamberCensus, ChambersError};
use crate::connection::{
    is_asymptotically_generic, is_generic, ConnectionError, ExponentData, GenericityVerdict,
};
use crate::field::{rat_i, Rat, RatFn, Scalar};
use crate::geometry::{
    is_boolean_through_origin, slice_arrangement, vertices, AffineFunctional, Arrangement,
    BooleanMode, GeometryError, SignVector,
};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RdBasisError {
    #[error("connection is not generic: {0}")]
    NotGeneric(String),
    #[error("connection is not asymptotically generic: {0}")]
    NotAsymptoticallyGeneric(String),
    #[error("genericity undecided: {0}")]
    GenericityUndecided(String),
    #[error("central linear parts are not Boolean")]
    NotBoolean,
    #[error("exponent at {hyperplane} is an integer")]
    IntegerExponent { hyperplane: String },
    #[error(
        "two bounded slice chambers map to ambient chamber {ambient_id}; truncation is ambiguous"
    )]
    AmbiguousTruncation { ambient_id: usize },
    #[error("lifted slice chamber has sign vector {sign} not realized by any ambient chamber")]
    MissingAmbientChamber { sign: String },
    #[error("threshold R = {r} is too small to truncate chamber {chamber}")]
    RadiusTooSmall { r: String, chamber: usize },
    #[error("rank cross-check failed: basis rank {basis_rank} != {b_arrangement} + {fiber_rank}")]
    RankMismatch {
        basis_rank: usize,
        b_arrangement: usize,
        fiber_rank: usize,
    },
    #[error(transparent)]
    Chambers(#[from] ChambersError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Connection(#[from] ConnectionError),
}

/// Phase of the elementary irregular connection `∇ − df∧`.
#[derive(Debug, Clone)]
pub enum Phase {
    /// Regular connection (no exponential factor).
    None,
    /// Linear phase `f = c_0 + c·t`.
    Linear(AffineFunctional<Rat>),
    /// The fixed positive definite quadratic `f = Σ_i t_i²`.
    Quadratic,
}

/// Threshold specification for the truncation `{Re f < R}`.
#[derive(Debug, Clone)]
pub enum RadiusSpec {
    /// `2·(1 + max |f|)` over the arrangement vertices, then doubled until
    /// every truncated chamber admits an interior point; stability under
    /// doubling is checkable via [`linear_basis_stable_under_doubling`].
    Auto,
    Explicit(Rat),
}

#[derive(Debug, Clone)]
pub struct PhaseSpec {
    pub phase: Phase,
    pub radius: RadiusSpec,
}

impl PhaseSpec {
    pub fn none() -> Self {
        PhaseSpec {
            phase: Phase::None,
            radius: RadiusSpec::Auto,
        }
    }

    pub fn linear(f: AffineFunctional<Rat>) -> Self {
        PhaseSpec {
            phase: Phase::Linear(f),
            radius: RadiusSpec::Auto,
        }
    }

    pub fn quadratic() -> Self {
        PhaseSpec {
            phase: Phase::Quadratic,
            radius: RadiusSpec::Auto,
        }
    }

    pub fn with_radius(mut self, r: Rat) -> Self {
        self.radius = RadiusSpec::Explicit(r);
        self
    }
}

/// Resolved truncation data shared by the truncated basis elements.
#[derive(Debug, Clone)]
pub struct Truncation {
    pub phase: Phase,
    pub radius: Rat,
}

/// An unbounded chamber intersected with `{Re f < R}`.
#[derive(Debug, Clone)]
pub struct TruncatedChamber {
    pub chamber: Chamber<Rat>,
    /// An exact point inside the truncated region.
    pub interior_point: Vec<Rat>,
}

/// Basis of the rapid-decay homology in the concentration degree n.
#[derive(Debug, Clone)]
pub struct RdBasis {
    /// Concentration degree (the ambient dimension).
    pub degree: usize,
    pub bounded: Vec<Chamber<Rat>>,
    pub truncated: Vec<TruncatedChamber>,
    pub truncation: Option<Truncation>,
    /// Hypersphere-theorem hypotheses not reducible to exact rank checks.
    pub assumed: Vec<String>,
}

impl RdBasis {
    pub fn rank(&self) -> usize {
        self.bounded.len() + self.truncated.len()
    }

    /// Homology vanishes away from the concentration degree.
    pub fn rank_in_degree(&self, p: usize) -> usize {
        if p == self.degree {
            self.rank()
        } else {
            0
        }
    }

    pub fn basis_in_degree(&self, p: usize) -> (Vec<&Chamber<Rat>>, Vec<&TruncatedChamber>) {
        if p == self.degree {
            (
                self.bounded.iter().collect(),
                self.truncated.iter().collect(),
            )
        } else {
            (Vec::new(), Vec::new())
        }
    }
}

fn require_generic(a: &Arrangement<Rat>, e: &ExponentData) -> Result<(), RdBasisError> {
    match is_generic(a, e) {
        GenericityVerdict::Generic => Ok(()),
        GenericityVerdict::NotGeneric(v) => Err(RdBasisError::NotGeneric(v.to_string())),
        GenericityVerdict::Undecided(r) => Err(RdBasisError::GenericityUndecided(r)),
    }
}

/// Default numeric threshold for a linear phase.
pub fn default_radius_linear(a: &Arrangement<Rat>, f: &AffineFunctional<Rat>) -> Rat {
    let mut max = Rat::zero();
    for v in vertices(a) {
        let val = Signed::abs(&f.eval(&v));
        if val > max {
            max = val;
        }
    }
    rat_i(2) * (Rat::one() + max)
}

/// Default numeric threshold for the quadratic phase.
pub fn default_radius_quadratic(a: &Arrangement<Rat>) -> Rat {
    let mut max = Rat::zero();
    for v in vertices(a) {
        let norm2: Rat = v.iter().map(|x| x * x).sum();
        if norm2 > max {
            max = norm2;
        }
    }
    rat_i(2) * (Rat::one() + max)
}

/// Basis for a linear phase. Preconditions: generic and asymptotically
/// generic. The truncated members come from the bounded chambers of the
/// symbolic-generic slice; each must select a distinct unbounded ambient
/// chamber (a collision is reported, not resolved).
pub fn rd_basis_linear(
    a: &Arrangement<Rat>,
    e: &ExponentData,
    f: &AffineFunctional<Rat>,
    radius: &RadiusSpec,
) -> Result<RdBasis, RdBasisError> {
    require_generic(a, e)?;
    match is_asymptotically_generic(a, e, f)? {
        GenericityVerdict::Generic => {}
        GenericityVerdict::NotGeneric(v) => {
            return Err(RdBasisError::NotAsymptoticallyGeneric(v.to_string()))
        }
        GenericityVerdict::Undecided(r) => return Err(RdBasisError::GenericityUndecided(r)),
    }

    let census = enumerate_chambers(a)?;
    let bounded: Vec<Chamber<Rat>> =
        census.chambers.iter().filter(|c| c.bounded).cloned().collect();

    // bounded chambers of the slice at symbolic-generic R
    let lifted: Arrangement<RatFn> = a.map(RatFn::from_rat);
    let f_sym: AffineFunctional<RatFn> = f.map(RatFn::from_rat);
    let slice = slice_arrangement(&lifted, &f_sym, &RatFn::var())?;
    let slice_census = enumerate_chambers(&slice.arrangement)?;

    // locate the ambient chamber of each bounded slice chamber by lifting
    // its witness and reading the ambient sign vector at R → ∞
    let mut selected: BTreeMap<usize, Vec<RatFn>> = BTreeMap::new();
    for sc in slice_census.bounded() {
        let embedded = slice.chart.embed(&sc.witness);
        let sign = lifted.sign_vector_at(&embedded)?;
        debug_assert!(sign.is_zero_free());
        let ambient = census
            .by_sign(&sign)
            .ok_or_else(|| RdBasisError::MissingAmbientChamber {
                sign: sign.to_string(),
            })?;
        debug_assert!(
            !ambient.bounded,
            "slice witnesses at symbolic R cannot land in bounded chambers"
        );
        if selected.insert(ambient.id, embedded).is_some() {
            return Err(RdBasisError::AmbiguousTruncation {
                ambient_id: ambient.id,
            });
        }
    }

    // resolve a numeric R and interior points strictly inside {f < R}
    let mut r = match radius {
        RadiusSpec::Auto => default_radius_linear(a, f),
        RadiusSpec::Explicit(r) => r.clone(),
    };
    let explicit = matches!(radius, RadiusSpec::Explicit(_));
    let mut truncated = Vec::new();
    'retry: for attempt in 0..64 {
        truncated.clear();
        for (&ambient_id, embedded) in &selected {
            let chamber = census
                .chambers
                .iter()
                .find(|c| c.id == ambient_id)
                .expect("selected from census")
                .clone();
            // evaluate the symbolic point slightly inside the truncation wall
            let r_inner = &r * Rat::new(255.into(), 256.into());
            let point: Vec<Rat> = embedded.iter().map(|x| x.eval(&r_inner)).collect();
            if a.sign_vector_at(&point)? != chamber.sign {
                if explicit || attempt + 1 == 64 {
                    return Err(RdBasisError::RadiusTooSmall {
                        r: crate::field::rat_to_string(&r),
                        chamber: ambient_id,
                    });
                }
                r = &r * rat_i(2);
                continue 'retry;
            }
            truncated.push(TruncatedChamber {
                chamber,
                interior_point: point,
            });
        }
        break;
    }

    Ok(RdBasis {
        degree: a.dim,
        bounded,
        truncated,
        truncation: Some(Truncation {
            phase: Phase::Linear(f.clone()),
            radius: r,
        }),
        assumed: Vec::new(),
    })
}

/// Basis for the quadratic phase `f = Σ t_i²`: all bounded chambers plus
/// every unbounded chamber truncated by `{Σ t_i² < R}`. Preconditions: the
/// central linear parts are Boolean and every exponent (infinity included)
/// is non-integral. Sphere tangency to flats is excluded exactly; the
/// remaining normal-crossing hypotheses at infinity are recorded as
/// assumed.
pub fn rd_basis_quadratic(
    a: &Arrangement<Rat>,
    e: &ExponentData,
    radius: &RadiusSpec,
) -> Result<RdBasis, RdBasisError> {
    if !is_boolean_through_origin(a, BooleanMode::LinearParts) {
        return Err(RdBasisError::NotBoolean);
    }
    match e {
        ExponentData::Rank1 { alphas } => {
            for (j, alpha) in alphas.iter().enumerate() {
                if alpha.is_integer() {
                    return Err(RdBasisError::IntegerExponent {
                        hyperplane: format!("j={}", j + 1),
                    });
                }
            }
            if e.alpha_infinity().expect("rank 1").is_integer() {
                return Err(RdBasisError::IntegerExponent {
                    hyperplane: "infinity".into(),
                });
            }
        }
        ExponentData::Residues { .. } => {
            // eigenvalue integrality for matrices follows the genericity path
            require_generic(a, e)?;
        }
    }

    let census = enumerate_chambers(a)?;
    let mut r = match radius {
        RadiusSpec::Auto => default_radius_quadratic(a),
        RadiusSpec::Explicit(r) => r.clone(),
    };
    let explicit = matches!(radius, RadiusSpec::Explicit(_));

    // exact tangency exclusion: R may not equal dist²(0, F) for any flat F
    let tangency_radii = flat_distance_squares(a);
    if explicit {
        if tangency_radii.contains(&r) {
            return Err(RdBasisError::RadiusTooSmall {
                r: crate::field::rat_to_string(&r),
                chamber: usize::MAX,
            });
        }
    } else {
        while tangency_radii.contains(&r) {
            r = &r * rat_i(2);
        }
    }

    let bounded: Vec<Chamber<Rat>> =
        census.chambers.iter().filter(|c| c.bounded).cloned().collect();
    let mut truncated = Vec::new();
    for c in census.unbounded() {
        let point = match ball_interior_point(a, c, &r) {
            Some(p) => p,
            None => {
                if explicit {
                    return Err(RdBasisError::RadiusTooSmall {
                        r: crate::field::rat_to_string(&r),
                        chamber: c.id,
                    });
                }
                // grow R until the chamber's witness lies inside the ball
                let norm2: Rat = c.witness.iter().map(|x| x * x).sum();
                while r <= norm2 || tangency_radii.contains(&r) {
                    r = &r * rat_i(2);
                }
                ball_interior_point(a, c, &r).ok_or(RdBasisError::RadiusTooSmall {
                    r: crate::field::rat_to_string(&r),
                    chamber: c.id,
                })?
            }
        };
        truncated.push(TruncatedChamber {
            chamber: c.clone(),
            interior_point: point,
        });
    }

    Ok(RdBasis {
        degree: a.dim,
        bounded,
        truncated,
        truncation: Some(Truncation {
            phase: Phase::Quadratic,
            radius: r,
        }),
        assumed: vec![
            "normal crossing of the divisor traces on the quadric at infinity (not exactly decidable)"
                .to_string(),
        ],
    })
}

/// The squared distances from the origin to every flat (sphere tangency
/// radii), exact. Flats are intersections of independent subsets of ≤ n
/// hyperplanes.
fn flat_distance_squares(a: &Arrangement<Rat>) -> Vec<Rat> {
    let n = a.dim;
    let idx: Vec<usize> = (0..a.len()).collect();
    let mut out = Vec::new();
    for size in 1..=n.min(a.len()) {
        for subset in crate::util::subsets(&idx, size) {
            let rows: Vec<Vec<Rat>> = subset
                .iter()
                .map(|&j| a.hyperplanes[j].normal().to_vec())
                .collect();
            if crate::geometry::rank(&rows) < size {
                continue;
            }
            // minimize |p|² on the flat: p = Aᵀλ with (A Aᵀ) λ = −a_0
            let mut gram = vec![vec![Rat::zero(); size]; size];
            for i in 0..size {
                for j in 0..size {
                    gram[i][j] = rows[i]
                        .iter()
                        .zip(&rows[j])
                        .map(|(x, y)| x * y)
                        .sum::<Rat>();
                }
            }
            let rhs: Vec<Rat> = subset
                .iter()
                .map(|&j| -a.hyperplanes[j].constant().clone())
                .collect();
            let Some(lambda) = crate::geometry::solve_square(&gram, &rhs) else {
                continue;
            };
            let mut p = vec![Rat::zero(); n];
            for (i, row) in rows.iter().enumerate() {
                for (k, c) in row.iter().enumerate() {
                    p[k] += c * &lambda[i];
                }
            }
            let d2: Rat = p.iter().map(|x| x * x).sum();
            if !out.contains(&d2) {
                out.push(d2);
            }
        }
    }
    out
}

/// An exact point of the chamber strictly inside the ball `{|t|² < R}`,
/// obtained from the witness or by shrinking it toward a chamber vertex.
fn ball_interior_point(a: &Arrangement<Rat>, c: &Chamber<Rat>, r: &Rat) -> Option<Vec<Rat>> {
    let norm2 = |p: &[Rat]| -> Rat { p.iter().map(|x| x * x).sum() };
    if &norm2(&c.witness) < r {
        return Some(c.witness.clone());
    }
    // vertices of the chamber closure are arrangement vertices satisfying
    // all chamber inequalities weakly
    for v in vertices(a) {
        let ok = a
            .evaluate_all(&v)
            .ok()?
            .iter()
            .zip(&c.sign.0)
            .all(|(val, s)| match s {
                crate::field::Sign::Pos => val >= &Rat::zero(),
                crate::field::Sign::Neg => val <= &Rat::zero(),
                crate::field::Sign::Zero => false,
            });
        if !ok || &norm2(&v) >= r {
            continue;
        }
        // slide from the vertex toward the witness until strictly interior
        let mut tau = Rat::new(1.into(), 2.into());
        for _ in 0..64 {
            let p: Vec<Rat> = v
                .iter()
                .zip(&c.witness)
                .map(|(a_, b)| a_ + (b - a_) * &tau)
                .collect();
            if &norm2(&p) < r && a.sign_vector_at(&p).ok()? == c.sign {
                return Some(p);
            }
            tau /= rat_i(2);
        }
    }
    None
}

/// Builds the basis for any phase kind (`Phase::None` keeps only the
/// bounded chambers: the regular, locally finite case).
pub fn rd_basis(
    a: &Arrangement<Rat>,
    e: &ExponentData,
    spec: &PhaseSpec,
) -> Result<RdBasis, RdBasisError> {
    match &spec.phase {
        Phase::None => {
            require_generic(a, e)?;
            let bounded = enumerate_chambers(a)?
                .chambers
                .into_iter()
                .filter(|c| c.bounded)
                .collect();
            Ok(RdBasis {
                degree: a.dim,
                bounded,
                truncated: Vec::new(),
                truncation: None,
                assumed: Vec::new(),
            })
        }
        Phase::Linear(f) => rd_basis_linear(a, e, f, &spec.radius),
        Phase::Quadratic => rd_basis_quadratic(a, e, &spec.radius),
    }
}

/// Both sides of the rank identity.
#[derive(Debug, Clone)]
pub struct RankReport {
    pub basis_rank: usize,
    pub b_arrangement: usize,
    /// `b(slice)` for a linear phase, the hypersphere count `M` for the
    /// quadratic phase, `0` with no phase.
    pub fiber_rank: usize,
    pub pass: bool,
}

/// Verifies `rank = b(A) + b(fiber)`; a mismatch is a hard failure (it
/// indicates a bug, not an input problem).
pub fn rank_cross_check(
    a: &Arrangement<Rat>,
    e: &ExponentData,
    spec: &PhaseSpec,
) -> Result<RankReport, RdBasisError> {
    let basis = rd_basis(a, e, spec)?;
    let b_arrangement = basis.bounded.len();
    let fiber_rank = match &spec.phase {
        Phase::None => 0,
        Phase::Linear(f) => {
            let lifted: Arrangement<RatFn> = a.map(RatFn::from_rat);
            let f_sym: AffineFunctional<RatFn> = f.map(RatFn::from_rat);
            let slice = slice_arrangement(&lifted, &f_sym, &RatFn::var())?;
            enumerate_chambers(&slice.arrangement)?.n_bounded
        }
        Phase::Quadratic => {
            crate::chambers::schlafli_bounded_count(a.len() as u64, a.dim as u64) as usize
        }
    };
    let basis_rank = basis.rank();
    if basis_rank != b_arrangement + fiber_rank {
        return Err(RdBasisError::RankMismatch {
            basis_rank,
            b_arrangement,
            fiber_rank,
        });
    }
    // the quadratic rank must also equal the full census size
    if matches!(spec.phase, Phase::Quadratic) {
        let total = enumerate_chambers(a)?.n_total;
        if basis_rank != total {
            return Err(RdBasisError::RankMismatch {
                basis_rank,
                b_arrangement,
                fiber_rank: total - b_arrangement,
            });
        }
    }
    Ok(RankReport {
        basis_rank,
        b_arrangement,
        fiber_rank,
        pass: true,
    })
}

/// Stability of the linear basis under doubling a numeric R: the truncated
/// sign-vector set from the slice at R must match the one at 2R.
pub fn linear_basis_stable_under_doubling(
    a: &Arrangement<Rat>,
    f: &AffineFunctional<Rat>,
    r: &Rat,
) -> Result<bool, RdBasisError> {
    let signs_at = |rv: &Rat| -> Result<Vec<SignVector>, RdBasisError> {
        let slice = slice_arrangement(a, f, rv)?;
        let census = enumerate_chambers(&slice.arrangement)?;
        let mut out = Vec::new();
        for sc in census.bounded() {
            let embedded = slice.chart.embed(&sc.witness);
            out.push(a.sign_vector_at(&embedded)?);
        }
        out.sort();
        Ok(out)
    };
    Ok(signs_at(r)? == signs_at(&(r * rat_i(2)))?)
}

/// The ambient census, exposed for report generation.
pub fn ambient_census(a: &Arrangement<Rat>) -> Result<ChamberCensus<Rat>, RdBasisError> {
    Ok(enumerate_chambers(a)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rat, CRat};
    use crate::geometry::arrangement_from_rows;

    fn cr(n: i64, d: i64) -> CRat {
        CRat::from_rat(rat(n, d))
    }

    fn kummer() -> (Arrangement<Rat>, ExponentData, AffineFunctional<Rat>) {
        let a = arrangement_from_rows(1, &[vec![0, 1], vec![-1, 1]]);
        let e = ExponentData::rank1(vec![cr(1, 2), cr(1, 3)]);
        let f = AffineFunctional::new(vec![rat_i(0), rat_i(1)]).unwrap();
        (a, e, f)
    }

    #[test]
    fn kummer_linear_rank_two() {
        let (a, e, f) = kummer();
        let basis = rd_basis_linear(&a, &e, &f, &RadiusSpec::Auto).unwrap();
        assert_eq!(basis.rank(), 2);
        assert_eq!(basis.bounded.len(), 1);
        assert_eq!(basis.bounded[0].sign, SignVector::parse("+-").unwrap());
        assert_eq!(basis.truncated.len(), 1);
        assert_eq!(
            basis.truncated[0].chamber.sign,
            SignVector::parse("++").unwrap()
        );
        let trunc = basis.truncation.as_ref().unwrap();
        let p = &basis.truncated[0].interior_point;
        assert!(f.eval(p) < trunc.radius);
    }

    #[test]
    fn three_points_linear_rank_three() {
        // {t=0, t=1, t=2} with f = t: two bounded intervals plus the slice
        // point in (2, ∞)
        let a = arrangement_from_rows(1, &[vec![0, 1], vec![-1, 1], vec![-2, 1]]);
        let e = ExponentData::rank1(vec![cr(1, 2), cr(1, 3), cr(1, 5)]);
        let f = AffineFunctional::new(vec![rat_i(0), rat_i(1)]).unwrap();
        let basis = rd_basis_linear(&a, &e, &f, &RadiusSpec::Auto).unwrap();
        assert_eq!(basis.bounded.len(), 2);
        assert_eq!(basis.truncated.len(), 1);
        assert_eq!(
            basis.truncated[0].chamber.sign,
            SignVector::parse("+++").unwrap()
        );
        assert_eq!(basis.rank(), 3);
    }

    #[test]
    fn three_lines_linear_rank_three() {
        let a = arrangement_from_rows(2, &[vec![0, 0, 1], vec![1, -1, -1], vec![0, 1, -1]]);
        let e = ExponentData::rank1(vec![cr(1, 2), cr(1, 3), cr(1, 5)]);
        let f = AffineFunctional::new(vec![rat_i(0), rat_i(1), rat_i(0)]).unwrap();
        let basis = rd_basis_linear(&a, &e, &f, &RadiusSpec::Auto).unwrap();
        assert_eq!(basis.bounded.len(), 1);
        assert_eq!(basis.truncated.len(), 2);
        assert_eq!(basis.rank(), 3);
        let report = rank_cross_check(&a, &e, &PhaseSpec::linear(f)).unwrap();
        assert!(report.pass);
        assert_eq!(report.fiber_rank, 2);
    }

    #[test]
    fn quadratic_ranks() {
        // {t=0, t=1}: 1 bounded + 2 unbounded = 3
        let a = arrangement_from_rows(1, &[vec![0, 1], vec![-1, 1]]);
        let e = ExponentData::rank1(vec![cr(1, 2), cr(1, 3)]);
        let basis = rd_basis_quadratic(&a, &e, &RadiusSpec::Auto).unwrap();
        assert_eq!(basis.rank(), 3);
        assert_eq!(basis.bounded.len(), 1);
        assert_eq!(basis.truncated.len(), 2);

        // 3 generic lines: 7 = 1 + 6
        let t = arrangement_from_rows(2, &[vec![0, 1, 0], vec![0, 0, 1], vec![1, -1, -1]]);
        let e3 = ExponentData::rank1(vec![cr(1, 2), cr(1, 3), cr(1, 5)]);
        let basis = rd_basis_quadratic(&t, &e3, &RadiusSpec::Auto).unwrap();
        assert_eq!(basis.rank(), 7);
        let report = rank_cross_check(&t, &e3, &PhaseSpec::quadratic()).unwrap();
        assert!(report.pass);
        assert_eq!(report.fiber_rank, 6);

        // 4 generic lines: 11 = 3 + 8
        let q = arrangement_from_rows(
            2,
            &[vec![0, 1, 0], vec![0, 0, 1], vec![1, -1, -1], vec![3, -1, -2]],
        );
        let e4 = ExponentData::rank1(vec![cr(1, 2), cr(1, 3), cr(1, 5), cr(1, 7)]);
        let basis = rd_basis_quadratic(&q, &e4, &RadiusSpec::Auto).unwrap();
        assert_eq!(basis.rank(), 11);
        assert_eq!(basis.bounded.len(), 3);
        assert_eq!(basis.truncated.len(), 8);
    }

    #[test]
    fn degree_concentration() {
        let (a, e, f) = kummer();
        let basis = rd_basis_linear(&a, &e, &f, &RadiusSpec::Auto).unwrap();
        assert_eq!(basis.rank_in_degree(1), 2);
        assert_eq!(basis.rank_in_degree(0), 0);
        assert_eq!(basis.rank_in_degree(2), 0);
        let (b, t) = basis.basis_in_degree(0);
        assert!(b.is_empty() && t.is_empty());
    }

    #[test]
    fn genericity_gate() {
        let a = arrangement_from_rows(1, &[vec![0, 1], vec![-1, 1]]);
        let e = ExponentData::rank1(vec![CRat::from_int(1), cr(1, 3)]);
        let f = AffineFunctional::new(vec![rat_i(0), rat_i(1)]).unwrap();
        assert!(matches!(
            rd_basis_linear(&a, &e, &f, &RadiusSpec::Auto),
            Err(RdBasisError::NotGeneric(_))
        ));
        // quadratic with non-Boolean linear parts
        let p = arrangement_from_rows(2, &[vec![0, 1, 0], vec![-1, 1, 0]]);
        let e2 = ExponentData::rank1(vec![cr(1, 2), cr(1, 3)]);
        assert!(matches!(
            rd_basis_quadratic(&p, &e2, &RadiusSpec::Auto),
            Err(RdBasisError::NotBoolean)
        ));
    }

    #[test]
    fn stability_under_doubling() {
        let (a, _, f) = kummer();
        let r = default_radius_linear(&a, &f);
        assert!(linear_basis_stable_under_doubling(&a, &f, &r).unwrap());
        let t = arrangement_from_rows(2, &[vec![0, 0, 1], vec![1, -1, -1], vec![0, 1, -1]]);
        let ft = AffineFunctional::new(vec![rat_i(0), rat_i(1), rat_i(0)]).unwrap();
        let rt = default_radius_linear(&t, &ft);
        assert!(linear_basis_stable_under_doubling(&t, &ft, &rt).unwrap());
    }

    #[test]
    fn kummer_rank_cross_check() {
        let (a, e, f) = kummer();
        let report = rank_cross_check(&a, &e, &PhaseSpec::linear(f)).unwrap();
        assert_eq!(report.basis_rank, 2);
        assert_eq!(report.b_arrangement, 1);
        assert_eq!(report.fiber_rank, 1);
    }
}
