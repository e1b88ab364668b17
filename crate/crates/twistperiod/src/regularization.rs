//! Regularized twisted cycles: a (possibly divergent) chamber cycle is
//! replaced by a compact chain `σ + Σ_J ∏_{j∈J} (1/d_j) · (face_J × ∏ S_j)`
//! in the same twisted homology class. Loops wind once positively (the
//! argument of the wall form increases by 2π) and every coefficient is
//! exactly `± ∏ 1/d_j`; the signs come from requiring the twisted boundary
//! to vanish and are pinned by the convergent-case calibration tests.
//!
//! Walls whose exponent is an integer carry no loop (the local system is
//! single-valued there); such walls are kept as plain boundaries, which is
//! valid exactly when the integrand extends across them.

use crate::chambers::Chamber;
use crate::connection::{ConnectionError, ExponentData};
use crate::field::{rat_i, rat_to_f64, Rat, Scalar, Sign};
use crate::geometry::{
    is_boolean_through_origin, vertices, Arrangement, BooleanMode, GeometryError,
};
use crate::rdbasis::{Phase, TruncatedChamber};
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RegError {
    #[error("regularization requires rank 1 twist data")]
    NotRankOne,
    #[error("arrangement is not in general position")]
    NotGeneralPosition,
    #[error("parametrized cells are available for n ∈ {{1, 2}} only (got n = {0})")]
    UnsupportedDimension(usize),
    #[error("chamber has no interior feature gap; cannot pick a loop radius")]
    NoFeatureGap,
    #[error("truncated region is still unbounded; the phase does not decay on this chamber")]
    UnboundedAfterTruncation,
    #[error("chamber {0} is bounded; use regularize_bounded")]
    NotUnbounded(usize),
    #[error("chamber {0} is unbounded; use regularize_truncated")]
    NotBounded(usize),
    #[error(transparent)]
    Connection(#[from] ConnectionError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Concrete parametrization of one product cell. Parameters run over
/// `[0,1]` per axis; loop angles are scaled internally to `[0, 2π]`.
#[derive(Debug, Clone)]
pub enum CellGeometry {
    /// `z(s) = start + s (end − start)`.
    Segment { start: Complex64, end: Complex64 },
    /// Full positive loop `z(θ) = center + (anchor − center) e^{iθ}` around
    /// the hyperplane `wall`.
    Loop {
        center: Complex64,
        anchor: Complex64,
        wall: usize,
    },
    /// Partial arc `z(u) = center + (anchor − center) e^{i u sweep}`.
    CircArc {
        center: Complex64,
        anchor: Complex64,
        sweep: f64,
    },
    /// Duffy-mapped triangle `z(u,v) = v0 + u((1−v) w1 + v w2)` in ℝ² ⊂ ℂ².
    Triangle {
        v0: [f64; 2],
        w1: [f64; 2],
        w2: [f64; 2],
    },
    /// Circular sector of the origin-centered circle of radius `rho`, fanned
    /// from `apex`: `z(u,v) = apex + u (q(v) − apex)`,
    /// `q(v) = rho (cos, sin)(phi0 + v dphi)`.
    Sector {
        apex: [f64; 2],
        rho: f64,
        phi0: f64,
        dphi: f64,
    },
    /// Wall edge times loop:
    /// `z(s,θ) = x0 + s e + (e^{iθ} − 1) c (v0 + s (v1 − v0))`,
    /// with `a_w·v0 = a_w·v1 = 1` so the wall form winds exactly once.
    EdgeLoop {
        x0: [f64; 2],
        e: [f64; 2],
        c: f64,
        v0: [f64; 2],
        v1: [f64; 2],
        wall: usize,
    },
    /// Corner torus `z(θ_i,θ_j) = x + (e^{iθ_i}−1) c_i u_i + (e^{iθ_j}−1) c_j u_j`.
    Torus {
        x: [f64; 2],
        c_first: f64,
        u_first: [f64; 2],
        c_second: f64,
        u_second: [f64; 2],
        wall_first: usize,
        wall_second: usize,
    },
}

impl CellGeometry {
    pub fn dim(&self) -> usize {
        match self {
            CellGeometry::Segment { .. }
            | CellGeometry::Loop { .. }
            | CellGeometry::CircArc { .. } => 1,
            _ => 2,
        }
    }

    /// Parameter axes that are periodic loops (trapezoid quadrature).
    pub fn loop_axes(&self) -> Vec<bool> {
        match self {
            CellGeometry::Segment { .. } | CellGeometry::CircArc { .. } => vec![false],
            CellGeometry::Loop { .. } => vec![true],
            CellGeometry::Triangle { .. } | CellGeometry::Sector { .. } => vec![false, false],
            CellGeometry::EdgeLoop { .. } => vec![false, true],
            CellGeometry::Torus { .. } => vec![true, true],
        }
    }

    /// Point of the cell at the given parameters (each in `[0,1]`).
    pub fn point(&self, params: &[f64]) -> Vec<Complex64> {
        let tau = 2.0 * std::f64::consts::PI;
        match self {
            CellGeometry::Segment { start, end } => {
                vec![start + params[0] * (end - start)]
            }
            CellGeometry::Loop { center, anchor, .. } => {
                let rot = Complex64::from_polar(1.0, tau * params[0]);
                vec![center + (anchor - center) * rot]
            }
            CellGeometry::CircArc {
                center,
                anchor,
                sweep,
            } => {
                let rot = Complex64::from_polar(1.0, sweep * params[0]);
                vec![center + (anchor - center) * rot]
            }
            CellGeometry::Triangle { v0, w1, w2 } => {
                let (u, v) = (params[0], params[1]);
                (0..2)
                    .map(|i| Complex64::new(v0[i] + u * ((1.0 - v) * w1[i] + v * w2[i]), 0.0))
                    .collect()
            }
            CellGeometry::Sector {
                apex,
                rho,
                phi0,
                dphi,
            } => {
                let (u, v) = (params[0], params[1]);
                let phi = phi0 + v * dphi;
                let q = [rho * phi.cos(), rho * phi.sin()];
                (0..2)
                    .map(|i| Complex64::new(apex[i] + u * (q[i] - apex[i]), 0.0))
                    .collect()
            }
            CellGeometry::EdgeLoop { x0, e, c, v0, v1, .. } => {
                let (s, th) = (params[0], tau * params[1]);
                let w = Complex64::from_polar(1.0, th) - Complex64::new(1.0, 0.0);
                (0..2)
                    .map(|i| {
                        Complex64::new(x0[i] + s * e[i], 0.0)
                            + w * *c * (v0[i] + s * (v1[i] - v0[i]))
                    })
                    .collect()
            }
            CellGeometry::Torus {
                x,
                c_first,
                u_first,
                c_second,
                u_second,
                ..
            } => {
                let wi = Complex64::from_polar(1.0, tau * params[0]) - Complex64::new(1.0, 0.0);
                let wj = Complex64::from_polar(1.0, tau * params[1]) - Complex64::new(1.0, 0.0);
                (0..2)
                    .map(|i| {
                        Complex64::new(x[i], 0.0)
                            + wi * *c_first * u_first[i]
                            + wj * *c_second * u_second[i]
                    })
                    .collect()
            }
        }
    }

    /// Complex Jacobian determinant of the parametrization (including the
    /// angle scalings) at the given parameters.
    pub fn jacobian(&self, params: &[f64]) -> Complex64 {
        let tau = 2.0 * std::f64::consts::PI;
        let i_unit = Complex64::new(0.0, 1.0);
        match self {
            CellGeometry::Segment { start, end } => end - start,
            CellGeometry::Loop { center, anchor, .. } => {
                let rot = Complex64::from_polar(1.0, tau * params[0]);
                i_unit * tau * (anchor - center) * rot
            }
            CellGeometry::CircArc {
                center,
                anchor,
                sweep,
            } => {
                let rot = Complex64::from_polar(1.0, sweep * params[0]);
                i_unit * *sweep * (anchor - center) * rot
            }
            CellGeometry::Triangle { w1, w2, .. } => {
                let det = w1[0] * w2[1] - w1[1] * w2[0];
                Complex64::new(params[0] * det, 0.0)
            }
            CellGeometry::Sector {
                apex,
                rho,
                phi0,
                dphi,
            } => {
                let (u, v) = (params[0], params[1]);
                let phi = phi0 + v * dphi;
                let q = [rho * phi.cos(), rho * phi.sin()];
                let dq = [-rho * dphi * phi.sin(), rho * dphi * phi.cos()];
                let du = [q[0] - apex[0], q[1] - apex[1]];
                Complex64::new(u * (du[0] * dq[1] - du[1] * dq[0]), 0.0)
            }
            CellGeometry::EdgeLoop { e, c, v0, v1, .. } => {
                let (s, th) = (params[0], tau * params[1]);
                let rot = Complex64::from_polar(1.0, th);
                let w = rot - Complex64::new(1.0, 0.0);
                let dv = [v1[0] - v0[0], v1[1] - v0[1]];
                let vs = [v0[0] + s * dv[0], v0[1] + s * dv[1]];
                let col_s = [
                    Complex64::new(e[0], 0.0) + w * *c * dv[0],
                    Complex64::new(e[1], 0.0) + w * *c * dv[1],
                ];
                let col_t = [
                    i_unit * tau * rot * *c * vs[0],
                    i_unit * tau * rot * *c * vs[1],
                ];
                col_s[0] * col_t[1] - col_s[1] * col_t[0]
            }
            CellGeometry::Torus {
                c_first,
                u_first,
                c_second,
                u_second,
                ..
            } => {
                let ri = Complex64::from_polar(1.0, tau * params[0]);
                let rj = Complex64::from_polar(1.0, tau * params[1]);
                let col_i = [
                    i_unit * tau * ri * *c_first * u_first[0],
                    i_unit * tau * ri * *c_first * u_first[1],
                ];
                let col_j = [
                    i_unit * tau * rj * *c_second * u_second[0],
                    i_unit * tau * rj * *c_second * u_second[1],
                ];
                col_i[0] * col_j[1] - col_i[1] * col_j[0]
            }
        }
    }
}

/// A parametrized product cell with branch data: the basepoint is the image
/// of the zero parameter vector and `base_args[j]` is the continuous
/// argument of `l_j` there (0 on the positive side, π on the negative).
#[derive(Debug, Clone)]
pub struct ProductCell {
    pub id: usize,
    pub geometry: CellGeometry,
    pub orientation: i8,
    pub basepoint: Vec<Complex64>,
    pub base_args: Vec<f64>,
}

/// One term `coefficient · cell` of a twisted chain; the coefficient is
/// `sign · ∏_{j ∈ loop_walls} 1/d_j`, kept in factored form so its product
/// with `∏ d_j` is exactly ±1.
#[derive(Debug, Clone)]
pub struct ChainTerm {
    pub sign: i8,
    pub loop_walls: Vec<usize>,
    pub coefficient: Complex64,
    pub cell: ProductCell,
}

#[derive(Debug, Clone)]
pub struct TwistedChain {
    pub dim: usize,
    pub epsilon: Rat,
    pub terms: Vec<ChainTerm>,
    /// Monodromy factors `d_j` for the ambient hyperplanes (zero entries
    /// mark integer exponents, which never receive loops).
    pub d: Vec<Complex64>,
    pub warnings: Vec<String>,
}

impl TwistedChain {
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }
}

/// How far an unbounded (truncated) chain runs before it is cut off.
#[derive(Debug, Clone, Copy)]
pub enum CutoffSpec {
    /// Stop exactly at the basis truncation `{Re f = R}`.
    AtRadius,
    /// Extend until the integrand tail (bounded via the phase decay) drops
    /// below the tolerance; used when the chain is built for integration.
    AdaptiveTail { tol: f64 },
    /// User-supplied cutoff, needed when the phase does not decay on the
    /// chamber (flagged in the warnings).
    Explicit { at: f64 },
}

/// Base argument of `l_j` on the chamber: 0 on the positive side, π on the
/// negative side.
fn base_args_for(sign: &crate::geometry::SignVector) -> Vec<f64> {
    sign.0
        .iter()
        .map(|s| match s {
            Sign::Pos => 0.0,
            Sign::Neg => std::f64::consts::PI,
            Sign::Zero => unreachable!("chamber signs are zero-free"),
        })
        .collect()
}

fn alphas_rank1(e: &ExponentData) -> Result<&[crate::field::CRat], RegError> {
    e.alphas().ok_or(RegError::NotRankOne)
}

/// ε default: a tenth of the smallest feature gap of the chamber, as an
/// exact rational that satisfies `(10 ε)² ≤ gap²`.
fn epsilon_for(feature_gap_sq: &Rat) -> Rat {
    let est = rat_to_f64(feature_gap_sq).sqrt() / 10.0;
    let mut eps = Rat::from_float(est).filter(|r| r > &Rat::zero()).unwrap_or_else(|| rat_i(1) / rat_i(1000));
    let hundred = rat_i(100);
    while &eps * &eps * &hundred > *feature_gap_sq {
        eps /= rat_i(2);
    }
    eps
}

// ---------------------------------------------------------------------------
// 1-D construction
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct LineChamber {
    left: Option<(usize, Rat)>,
    right: Option<(usize, Rat)>,
}

fn line_chamber_structure(a: &Arrangement<Rat>, c: &Chamber<Rat>) -> LineChamber {
    let mut left: Option<(usize, Rat)> = None;
    let mut right: Option<(usize, Rat)> = None;
    for (j, h) in a.hyperplanes.iter().enumerate() {
        let root = -h.constant() / &h.coeffs[1];
        // chamber lies right of the root iff sign(a₁)·s_j = +
        let rightward = h.coeffs[1].sign() == c.sign.0[j];
        if rightward {
            if left.as_ref().map(|(_, r)| &root > r).unwrap_or(true) {
                left = Some((j, root));
            }
        } else if right.as_ref().map(|(_, r)| &root < r).unwrap_or(true) {
            right = Some((j, root));
        }
    }
    LineChamber { left, right }
}

/// Minimal squared gap between the wall roots and every other hyperplane
/// point on the line.
fn line_feature_gap_sq(a: &Arrangement<Rat>, walls: &[&Rat]) -> Result<Rat, RegError> {
    let mut best: Option<Rat> = None;
    let roots: Vec<Rat> = a
        .hyperplanes
        .iter()
        .map(|h| -h.constant() / &h.coeffs[1])
        .collect();
    for w in walls {
        for r in &roots {
            if r == *w {
                continue;
            }
            let d = *w - r;
            let d2 = &d * &d;
            if best.as_ref().map(|b| &d2 < b).unwrap_or(true) {
                best = Some(d2);
            }
        }
    }
    best.ok_or(RegError::NoFeatureGap)
}

fn c64(r: &Rat) -> Complex64 {
    Complex64::new(rat_to_f64(r), 0.0)
}

struct ChainBuilder {
    terms: Vec<ChainTerm>,
    d: Vec<Complex64>,
    next_id: usize,
}

impl ChainBuilder {
    fn new(d: Vec<Complex64>) -> Self {
        ChainBuilder {
            terms: Vec::new(),
            d,
            next_id: 0,
        }
    }

    fn push(
        &mut self,
        sign: i8,
        loop_walls: Vec<usize>,
        geometry: CellGeometry,
        base_args: Vec<f64>,
    ) {
        let basepoint = geometry.point(&vec![0.0; geometry.dim()]);
        let mut coefficient = Complex64::new(sign as f64, 0.0);
        for &w in &loop_walls {
            coefficient /= self.d[w];
        }
        self.terms.push(ChainTerm {
            sign,
            loop_walls,
            coefficient,
            cell: ProductCell {
                id: self.next_id,
                geometry,
                orientation: 1,
                basepoint,
                base_args,
            },
        });
        self.next_id += 1;
    }
}

/// Vertices of a bounded 2-D chamber in counterclockwise order (for
/// plotting and region construction).
pub fn bounded_chamber_polygon(
    a: &Arrangement<Rat>,
    c: &Chamber<Rat>,
) -> Result<Vec<[f64; 2]>, RegError> {
    let ps = polygon_structure(a, c)?;
    Ok(ps.verts.iter().map(|(v, _, _)| to_f2(v)).collect())
}

/// Regularizes a bounded chamber into a compact twisted chain representing
/// the same homology class.
pub fn regularize_bounded(
    c: &Chamber<Rat>,
    a: &Arrangement<Rat>,
    e: &ExponentData,
) -> Result<TwistedChain, RegError> {
    regularize_bounded_scaled(c, a, e, &Rat::one())
}

/// Same construction with the loop radius scaled by `eps_scale ∈ (0, 1]`
/// relative to the default; used by the ε-independence checks.
pub fn regularize_bounded_scaled(
    c: &Chamber<Rat>,
    a: &Arrangement<Rat>,
    e: &ExponentData,
    eps_scale: &Rat,
) -> Result<TwistedChain, RegError> {
    if c.sign.len() != a.len() {
        return Err(RegError::Geometry(GeometryError::SignLength {
            expected: a.len(),
            got: c.sign.len(),
        }));
    }
    if !c.bounded {
        return Err(RegError::NotBounded(c.id));
    }
    let alphas = alphas_rank1(e)?;
    if !is_boolean_through_origin(a, BooleanMode::Coned) {
        return Err(RegError::NotGeneralPosition);
    }
    let d = monodromy_factors_lenient(alphas);
    match a.dim {
        1 => regularize_interval(c, a, alphas, d, eps_scale),
        2 => regularize_polygon(c, a, alphas, d, eps_scale),
        n => Err(RegError::UnsupportedDimension(n)),
    }
}

/// `d_j` for every hyperplane, with integer-exponent entries left at zero;
/// loops are only attached to non-integer walls, so those entries are never
/// divided by.
fn monodromy_factors_lenient(alphas: &[crate::field::CRat]) -> Vec<Complex64> {
    alphas
        .iter()
        .map(|alpha| {
            if alpha.is_integer() {
                Complex64::new(0.0, 0.0)
            } else {
                crate::connection::exp_2pi_i(alpha) - Complex64::new(1.0, 0.0)
            }
        })
        .collect()
}

fn regularize_interval(
    c: &Chamber<Rat>,
    a: &Arrangement<Rat>,
    alphas: &[crate::field::CRat],
    d: Vec<Complex64>,
    eps_scale: &Rat,
) -> Result<TwistedChain, RegError> {
    let lc = line_chamber_structure(a, c);
    let (lw, lroot) = lc.left.ok_or(RegError::NotBounded(c.id))?;
    let (rw, rroot) = lc.right.ok_or(RegError::NotBounded(c.id))?;
    let gap_sq = {
        let len = &rroot - &lroot;
        let mut g = line_feature_gap_sq(a, &[&lroot, &rroot]).unwrap_or_else(|_| &len * &len);
        let l2 = &len * &len;
        if l2 < g {
            g = l2;
        }
        g
    };
    let eps = epsilon_for(&gap_sq) * eps_scale;
    let base = base_args_for(&c.sign);

    let left_loop = !alphas[lw].is_integer();
    let right_loop = !alphas[rw].is_integer();
    let seg_start = if left_loop { &lroot + &eps } else { lroot.clone() };
    let seg_end = if right_loop { &rroot - &eps } else { rroot.clone() };

    let mut b = ChainBuilder::new(d);
    b.push(
        1,
        Vec::new(),
        CellGeometry::Segment {
            start: c64(&seg_start),
            end: c64(&seg_end),
        },
        base.clone(),
    );
    if left_loop {
        b.push(
            1,
            vec![lw],
            CellGeometry::Loop {
                center: c64(&lroot),
                anchor: c64(&seg_start),
                wall: lw,
            },
            base.clone(),
        );
    }
    if right_loop {
        b.push(
            -1,
            vec![rw],
            CellGeometry::Loop {
                center: c64(&rroot),
                anchor: c64(&seg_end),
                wall: rw,
            },
            base,
        );
    }
    Ok(TwistedChain {
        dim: 1,
        epsilon: eps,
        terms: b.terms,
        d: b.d,
        warnings: Vec::new(),
    })
}

// ---------------------------------------------------------------------------
// 2-D construction
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct PolygonStructure {
    /// counterclockwise vertices, each with its (incoming, outgoing) walls
    verts: Vec<(Vec<Rat>, usize, usize)>,
}

/// Face structure of a bounded 2-D chamber: vertices in ccw order and the
/// wall carried by each boundary edge.
fn polygon_structure(
    a: &Arrangement<Rat>,
    c: &Chamber<Rat>,
) -> Result<PolygonStructure, RegError> {
    let mut verts: Vec<(Vec<Rat>, Vec<usize>)> = Vec::new();
    for v in vertices(a) {
        let vals = a.evaluate_all(&v)?;
        let mut active = Vec::new();
        let mut ok = true;
        for (j, val) in vals.iter().enumerate() {
            match val.sign() {
                Sign::Zero => active.push(j),
                s if s == c.sign.0[j] => {}
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            if active.len() != 2 {
                return Err(RegError::NotGeneralPosition);
            }
            verts.push((v, active));
        }
    }
    if verts.len() < 3 {
        return Err(RegError::NotGeneralPosition);
    }
    // sort counterclockwise around the witness with an exact comparator
    let wx = &c.witness[0];
    let wy = &c.witness[1];
    let zero = Rat::zero();
    let quadrant = |dx: &Rat, dy: &Rat| -> u8 {
        match (dx >= &zero, dy >= &zero) {
            (true, true) => 0,
            (false, true) => 1,
            (false, false) => 2,
            (true, false) => 3,
        }
    };
    verts.sort_by(|(p, _), (q, _)| {
        let (px, py) = (&p[0] - wx, &p[1] - wy);
        let (qx, qy) = (&q[0] - wx, &q[1] - wy);
        let (qp, qq) = (quadrant(&px, &py), quadrant(&qx, &qy));
        if qp != qq {
            return qp.cmp(&qq);
        }
        let cross = &px * &qy - &py * &qx;
        use std::cmp::Ordering;
        match cross.sign() {
            Sign::Pos => Ordering::Less,
            Sign::Neg => Ordering::Greater,
            Sign::Zero => Ordering::Equal,
        }
    });
    let m = verts.len();
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let (_, prev_active) = &verts[(i + m - 1) % m];
        let (v, active) = &verts[i];
        let (_, next_active) = &verts[(i + 1) % m];
        let incoming = *active
            .iter()
            .find(|j| prev_active.contains(j))
            .ok_or(RegError::NotGeneralPosition)?;
        let outgoing = *active
            .iter()
            .find(|j| next_active.contains(j))
            .ok_or(RegError::NotGeneralPosition)?;
        if incoming == outgoing {
            return Err(RegError::NotGeneralPosition);
        }
        out.push((v.clone(), incoming, outgoing));
    }
    Ok(PolygonStructure { verts: out })
}

fn max_norm(v: &[Rat]) -> Rat {
    let mut m = Rat::zero();
    for x in v {
        let ax = Signed::abs(x);
        if ax > m {
            m = ax;
        }
    }
    m
}

fn rot90(a: &[Rat]) -> Vec<Rat> {
    vec![-a[1].clone(), a[0].clone()]
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dual direction for wall `w` at a corner shared with another constraint:
/// orthogonal to the other normal and scaled to `a_w·u = 1`.
fn corner_dual(a: &Arrangement<Rat>, w: usize, other_normal: &[Rat]) -> Vec<Rat> {
    let u0 = rot90(other_normal);
    let scale = dot(a.hyperplanes[w].normal(), &u0);
    debug_assert!(!scale.is_zero(), "general position gives independent normals");
    u0.iter().map(|x| x / &scale).collect()
}

fn to_f2(v: &[Rat]) -> [f64; 2] {
    [rat_to_f64(&v[0]), rat_to_f64(&v[1])]
}

/// Feature gap of a 2-D chamber: min over pairwise vertex distances and
/// distances from each vertex to every hyperplane not through it.
fn polygon_feature_gap_sq(a: &Arrangement<Rat>, ps: &PolygonStructure) -> Result<Rat, RegError> {
    let mut best: Option<Rat> = None;
    let mut consider = |d2: Rat| {
        if !d2.is_zero() && best.as_ref().map(|b| &d2 < b).unwrap_or(true) {
            best = Some(d2);
        }
    };
    for i in 0..ps.verts.len() {
        for j in i + 1..ps.verts.len() {
            let dx = &ps.verts[i].0[0] - &ps.verts[j].0[0];
            let dy = &ps.verts[i].0[1] - &ps.verts[j].0[1];
            consider(&dx * &dx + &dy * &dy);
        }
        let (v, wi, wo) = &ps.verts[i];
        for (k, h) in a.hyperplanes.iter().enumerate() {
            if k == *wi || k == *wo {
                continue;
            }
            let val = h.eval(v)?;
            let n2 = dot(h.normal(), h.normal());
            consider(&val * &val / n2);
        }
    }
    best.ok_or(RegError::NoFeatureGap)
}

fn regularize_polygon(
    c: &Chamber<Rat>,
    a: &Arrangement<Rat>,
    alphas: &[crate::field::CRat],
    d: Vec<Complex64>,
    eps_scale: &Rat,
) -> Result<TwistedChain, RegError> {
    let ps = polygon_structure(a, c)?;
    let gap_sq = polygon_feature_gap_sq(a, &ps)?;
    let eps = epsilon_for(&gap_sq) * eps_scale;
    let base = base_args_for(&c.sign);
    let m = ps.verts.len();

    // offset corner per vertex: l_i = target_i, l_j = target_j with
    // target = sign·ε·‖a‖∞ for loop walls and 0 for plain (integer) walls
    let offset_target = |w: usize| -> Rat {
        if alphas[w].is_integer() {
            Rat::zero()
        } else {
            let scale = max_norm(a.hyperplanes[w].normal());
            &eps * scale * rat_i(c.sign.0[w].factor())
        }
    };
    let mut sigma: Vec<Vec<Rat>> = Vec::with_capacity(m);
    for (_, wi, wo) in &ps.verts {
        let rows = vec![
            a.hyperplanes[*wi].normal().to_vec(),
            a.hyperplanes[*wo].normal().to_vec(),
        ];
        let rhs = vec![
            offset_target(*wi) - a.hyperplanes[*wi].constant(),
            offset_target(*wo) - a.hyperplanes[*wo].constant(),
        ];
        let corner =
            crate::geometry::solve_square(&rows, &rhs).ok_or(RegError::NotGeneralPosition)?;
        sigma.push(corner);
    }

    let mut b = ChainBuilder::new(d);

    // σ: fan triangulation from the centroid of the offset polygon
    let centroid: Vec<Rat> = {
        let mut cx = Rat::zero();
        let mut cy = Rat::zero();
        for v in &sigma {
            cx += &v[0];
            cy += &v[1];
        }
        let n = rat_i(m as i64);
        vec![cx / &n, cy / n]
    };
    let c0 = to_f2(&centroid);
    for i in 0..m {
        let p = to_f2(&sigma[i]);
        let q = to_f2(&sigma[(i + 1) % m]);
        b.push(
            1,
            Vec::new(),
            CellGeometry::Triangle {
                v0: c0,
                w1: [p[0] - c0[0], p[1] - c0[1]],
                w2: [q[0] - c0[0], q[1] - c0[1]],
            },
            base.clone(),
        );
    }

    // edge × loop cells along σ's ccw boundary; the edge of wall w runs
    // from corner i to corner i+1 with w = outgoing(i) = incoming(i+1)
    for i in 0..m {
        let w = ps.verts[i].2;
        debug_assert_eq!(w, ps.verts[(i + 1) % m].1);
        if alphas[w].is_integer() {
            continue;
        }
        let x0 = &sigma[i];
        let x1 = &sigma[(i + 1) % m];
        let v_start = corner_dual(a, w, a.hyperplanes[ps.verts[i].1].normal());
        let v_end = corner_dual(a, w, a.hyperplanes[ps.verts[(i + 1) % m].2].normal());
        let c_val = a.hyperplanes[w].eval(x0)?;
        debug_assert_eq!(c_val, a.hyperplanes[w].eval(x1)?);
        b.push(
            1,
            vec![w],
            CellGeometry::EdgeLoop {
                x0: to_f2(x0),
                e: [
                    rat_to_f64(&(&x1[0] - &x0[0])),
                    rat_to_f64(&(&x1[1] - &x0[1])),
                ],
                c: rat_to_f64(&c_val),
                v0: to_f2(&v_start),
                v1: to_f2(&v_end),
                wall: w,
            },
            base.clone(),
        );
    }

    // corner torus cells, incoming wall first in the orientation
    for i in 0..m {
        let (_, wi, wo) = &ps.verts[i];
        if alphas[*wi].is_integer() || alphas[*wo].is_integer() {
            continue;
        }
        let x = &sigma[i];
        let u_in = corner_dual(a, *wi, a.hyperplanes[*wo].normal());
        let u_out = corner_dual(a, *wo, a.hyperplanes[*wi].normal());
        let c_in = a.hyperplanes[*wi].eval(x)?;
        let c_out = a.hyperplanes[*wo].eval(x)?;
        b.push(
            1,
            vec![*wi, *wo],
            CellGeometry::Torus {
                x: to_f2(x),
                c_first: rat_to_f64(&c_in),
                u_first: to_f2(&u_in),
                c_second: rat_to_f64(&c_out),
                u_second: to_f2(&u_out),
                wall_first: *wi,
                wall_second: *wo,
            },
            base.clone(),
        );
    }

    Ok(TwistedChain {
        dim: 2,
        epsilon: eps,
        terms: b.terms,
        d: b.d,
        warnings: Vec::new(),
    })
}

// ---------------------------------------------------------------------------
// Truncated (unbounded) chambers
// ---------------------------------------------------------------------------

/// Regularizes an unbounded chamber along its arrangement walls only; the
/// truncation facet `{Re f = R}` carries no loop (the exponential factor is
/// single-valued there).
pub fn regularize_truncated(
    tc: &TruncatedChamber,
    phase: &Phase,
    radius: &Rat,
    a: &Arrangement<Rat>,
    e: &ExponentData,
    cutoff: CutoffSpec,
) -> Result<TwistedChain, RegError> {
    regularize_truncated_scaled(tc, phase, radius, a, e, cutoff, &Rat::one())
}

/// Truncated construction with the loop radius scaled by `eps_scale`.
pub fn regularize_truncated_scaled(
    tc: &TruncatedChamber,
    phase: &Phase,
    radius: &Rat,
    a: &Arrangement<Rat>,
    e: &ExponentData,
    cutoff: CutoffSpec,
    eps_scale: &Rat,
) -> Result<TwistedChain, RegError> {
    let alphas = alphas_rank1(e)?;
    if tc.chamber.bounded {
        return Err(RegError::NotUnbounded(tc.chamber.id));
    }
    if !is_boolean_through_origin(a, BooleanMode::Coned) {
        return Err(RegError::NotGeneralPosition);
    }
    let d = monodromy_factors_lenient(alphas);
    match a.dim {
        1 => truncate_line(tc, phase, radius, a, alphas, d, cutoff, eps_scale),
        2 => truncate_plane(tc, phase, radius, a, alphas, d, cutoff, eps_scale),
        n => Err(RegError::UnsupportedDimension(n)),
    }
}

#[allow(clippy::too_many_arguments)]
fn truncate_line(
    tc: &TruncatedChamber,
    phase: &Phase,
    radius: &Rat,
    a: &Arrangement<Rat>,
    alphas: &[crate::field::CRat],
    d: Vec<Complex64>,
    cutoff: CutoffSpec,
    eps_scale: &Rat,
) -> Result<TwistedChain, RegError> {
    let c = &tc.chamber;
    let lc = line_chamber_structure(a, c);
    let mut warnings = Vec::new();
    let (wall, dir): (Option<(usize, Rat)>, f64) = match (&lc.left, &lc.right) {
        (Some((w, r)), None) => (Some((*w, r.clone())), 1.0),
        (None, Some((w, r))) => (Some((*w, r.clone())), -1.0),
        (None, None) => (None, 1.0),
        (Some(_), Some(_)) => return Err(RegError::NotUnbounded(c.id)),
    };
    let anchor_pt = wall
        .as_ref()
        .map(|(_, r)| r.clone())
        .unwrap_or_else(|| tc.interior_point[0].clone());

    // homological truncation point, when the phase actually cuts the ray
    let radius_cut: Option<f64> = match phase {
        Phase::Linear(f) => {
            let c1 = rat_to_f64(&f.coeffs[1]);
            let c0 = rat_to_f64(&f.coeffs[0]);
            if c1 * dir > 0.0 {
                Some((rat_to_f64(radius) - c0) / c1)
            } else {
                warnings
                    .push("chain extends where Re f decreases; e^{-f} grows along it".to_string());
                None
            }
        }
        Phase::Quadratic => Some(dir * rat_to_f64(radius).sqrt()),
        Phase::None => {
            warnings.push("no phase: unbounded chain has no decay".to_string());
            None
        }
    };
    let decay_rate: Option<f64> = match phase {
        Phase::Linear(f) => {
            let rate = rat_to_f64(&f.coeffs[1]) * dir;
            (rate > 0.0).then_some(rate)
        }
        Phase::Quadratic => Some(1.0),
        Phase::None => None,
    };
    let end: f64 = match cutoff {
        CutoffSpec::AtRadius => radius_cut.ok_or(RegError::UnboundedAfterTruncation)?,
        CutoffSpec::Explicit { at } => at,
        CutoffSpec::AdaptiveTail { tol } => {
            let rate = decay_rate.ok_or(RegError::UnboundedAfterTruncation)?;
            let start = rat_to_f64(&anchor_pt);
            match phase {
                // |e^{−t²}| tail: T² ≥ ln(1/tol) + margin
                Phase::Quadratic => dir * (tol.recip().ln() + 8.0).sqrt().max(start.abs() + 1.0),
                _ => start + dir * ((tol.recip().ln() + 8.0) / rate).max(1.0),
            }
        }
    };

    let mut b = ChainBuilder::new(d);
    match wall {
        Some((w, root)) => {
            let gap_sq = line_feature_gap_sq(a, &[&root]).unwrap_or_else(|_| rat_i(1));
            let eps = epsilon_for(&gap_sq) * eps_scale;
            let has_loop = !alphas[w].is_integer();
            let start = if has_loop {
                if dir > 0.0 {
                    &root + &eps
                } else {
                    &root - &eps
                }
            } else {
                root.clone()
            };
            let base = base_args_for(&c.sign);
            b.push(
                1,
                Vec::new(),
                CellGeometry::Segment {
                    start: c64(&start),
                    end: Complex64::new(end, 0.0),
                },
                base.clone(),
            );
            if has_loop {
                // the loop sits at the chain start, as in the bounded case
                b.push(
                    if dir > 0.0 { 1 } else { -1 },
                    vec![w],
                    CellGeometry::Loop {
                        center: c64(&root),
                        anchor: c64(&start),
                        wall: w,
                    },
                    base,
                );
            }
            Ok(TwistedChain {
                dim: 1,
                epsilon: eps,
                terms: b.terms,
                d: b.d,
                warnings,
            })
        }
        None => {
            // full line (no walls): only the quadratic phase decays both ways
            if !matches!(phase, Phase::Quadratic) {
                return Err(RegError::UnboundedAfterTruncation);
            }
            let base = base_args_for(&c.sign);
            b.push(
                1,
                Vec::new(),
                CellGeometry::Segment {
                    start: Complex64::new(-end.abs(), 0.0),
                    end: Complex64::new(end.abs(), 0.0),
                },
                base,
            );
            Ok(TwistedChain {
                dim: 1,
                epsilon: rat_i(0),
                terms: b.terms,
                d: b.d,
                warnings,
            })
        }
    }
}

/// Boundary pieces of the truncated region in ccw order.
enum BoundaryPiece {
    WallEdge {
        wall: usize,
        from: [f64; 2],
        to: [f64; 2],
        dual_from: [f64; 2],
        dual_to: [f64; 2],
        level: f64,
    },
    Plain {
        from: [f64; 2],
        to: [f64; 2],
    },
    Arc {
        rho: f64,
        phi_from: f64,
        phi_to: f64,
    },
}

#[allow(clippy::too_many_arguments)]
fn truncate_plane(
    tc: &TruncatedChamber,
    phase: &Phase,
    radius: &Rat,
    a: &Arrangement<Rat>,
    alphas: &[crate::field::CRat],
    d: Vec<Complex64>,
    cutoff: CutoffSpec,
    eps_scale: &Rat,
) -> Result<TwistedChain, RegError> {
    let c = &tc.chamber;
    let mut warnings = Vec::new();
    let (r_eff, is_disk) = match (phase, cutoff) {
        (Phase::Quadratic, CutoffSpec::AtRadius) => (rat_to_f64(radius), true),
        (Phase::Quadratic, CutoffSpec::AdaptiveTail { tol }) => {
            ((tol.recip().ln() + 8.0).max(rat_to_f64(radius)), true)
        }
        (Phase::Quadratic, CutoffSpec::Explicit { at }) => (at, true),
        (Phase::Linear(_), CutoffSpec::AtRadius) => (rat_to_f64(radius), false),
        (Phase::Linear(f), CutoffSpec::AdaptiveTail { tol }) => {
            let norm = f.coeffs[1..]
                .iter()
                .map(|x| rat_to_f64(x).powi(2))
                .sum::<f64>()
                .sqrt();
            (
                rat_to_f64(radius).max(rat_to_f64(&f.eval(&tc.interior_point)))
                    + (tol.recip().ln() + 8.0) * norm,
                false,
            )
        }
        (Phase::Linear(_), CutoffSpec::Explicit { at }) => (at, false),
        (Phase::None, _) => return Err(RegError::UnboundedAfterTruncation),
    };

    let coeff_f: Vec<[f64; 3]> = a
        .hyperplanes
        .iter()
        .map(|h| {
            [
                rat_to_f64(&h.coeffs[0]),
                rat_to_f64(&h.coeffs[1]),
                rat_to_f64(&h.coeffs[2]),
            ]
        })
        .collect();
    let eval_f =
        |j: usize, p: [f64; 2]| coeff_f[j][0] + coeff_f[j][1] * p[0] + coeff_f[j][2] * p[1];
    let signs: Vec<f64> = c.sign.0.iter().map(|s| s.factor() as f64).collect();
    let phase_f = |p: [f64; 2]| -> f64 {
        match phase {
            Phase::Linear(f) => {
                rat_to_f64(&f.coeffs[0])
                    + rat_to_f64(&f.coeffs[1]) * p[0]
                    + rat_to_f64(&f.coeffs[2]) * p[1]
            }
            Phase::Quadratic => p[0] * p[0] + p[1] * p[1],
            Phase::None => 0.0,
        }
    };
    let tol_in = 1e-9;
    let inside = |p: [f64; 2]| -> bool {
        (0..a.len()).all(|j| signs[j] * eval_f(j, p) > -tol_in) && phase_f(p) < r_eff + tol_in
    };

    // region vertices: wall∩wall inside the truncation, wall∩truncation
    let mut region_pts: Vec<([f64; 2], Vec<usize>)> = Vec::new();
    for v in vertices(a) {
        let vals = a.evaluate_all(&v)?;
        let mut active = Vec::new();
        let mut ok = true;
        for (j, val) in vals.iter().enumerate() {
            match val.sign() {
                Sign::Zero => active.push(j),
                s if s == c.sign.0[j] => {}
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        let p = to_f2(&v);
        if ok && phase_f(p) < r_eff {
            region_pts.push((p, active));
        }
    }
    for j in 0..a.len() {
        let [a0, a1, a2] = coeff_f[j];
        match phase {
            Phase::Quadratic => {
                let n2 = a1 * a1 + a2 * a2;
                let disc = r_eff * n2 - a0 * a0;
                if disc <= 0.0 {
                    continue;
                }
                let base = [-a0 * a1 / n2, -a0 * a2 / n2];
                let t = disc.sqrt() / n2;
                for s in [-1.0, 1.0] {
                    let p = [base[0] + s * t * (-a2), base[1] + s * t * a1];
                    if inside(p) {
                        region_pts.push((p, vec![j]));
                    }
                }
            }
            Phase::Linear(f) => {
                let f0 = rat_to_f64(&f.coeffs[0]);
                let f1 = rat_to_f64(&f.coeffs[1]);
                let f2 = rat_to_f64(&f.coeffs[2]);
                let det = a1 * f2 - a2 * f1;
                if det.abs() < 1e-12 {
                    continue;
                }
                let rhs = [-a0, r_eff - f0];
                let p = [
                    (rhs[0] * f2 - a2 * rhs[1]) / det,
                    (a1 * rhs[1] - rhs[0] * f1) / det,
                ];
                if inside(p) {
                    region_pts.push((p, vec![j]));
                }
            }
            Phase::None => {}
        }
    }
    if region_pts.len() < 2 {
        return Err(RegError::UnboundedAfterTruncation);
    }
    let anchor = to_f2(&tc.interior_point);
    region_pts.sort_by(|(p, _), (q, _)| {
        let pa = (p[1] - anchor[1]).atan2(p[0] - anchor[0]);
        let qa = (q[1] - anchor[1]).atan2(q[0] - anchor[0]);
        pa.partial_cmp(&qa).unwrap()
    });
    let n_pts = region_pts.len();

    // loop radius from the exact chamber features
    let gap_sq = {
        let mut best: Option<Rat> = None;
        for v in vertices(a) {
            for h in &a.hyperplanes {
                let val = h.eval(&v)?;
                if val.is_zero() {
                    continue;
                }
                let n2 = dot(h.normal(), h.normal());
                let d2 = &val * &val / n2;
                if best.as_ref().map(|b| &d2 < b).unwrap_or(true) {
                    best = Some(d2);
                }
            }
        }
        best.unwrap_or_else(|| rat_i(1))
    };
    let eps = epsilon_for(&gap_sq) * eps_scale;
    let eps_f = rat_to_f64(&eps);
    let base = base_args_for(&c.sign);

    let mut pieces: Vec<BoundaryPiece> = Vec::new();
    for i in 0..n_pts {
        let (p, pa) = &region_pts[i];
        let (q, qa) = &region_pts[(i + 1) % n_pts];
        let shared: Vec<usize> = pa.iter().filter(|j| qa.contains(j)).copied().collect();
        if let Some(&w) = shared.first() {
            let has_loop = !alphas[w].is_integer();
            let norm_inf = rat_to_f64(&max_norm(a.hyperplanes[w].normal()));
            let level = if has_loop {
                signs[w] * eps_f * norm_inf
            } else {
                0.0
            };
            let [_, a1, a2] = coeff_f[w];
            let n2 = a1 * a1 + a2 * a2;
            let shift = |pt: [f64; 2]| -> [f64; 2] {
                let delta = (level - eval_f(w, pt)) / n2;
                [pt[0] + delta * a1, pt[1] + delta * a2]
            };
            let (pf, qf) = (shift(*p), shift(*q));
            let other_grad = |pt: [f64; 2], act: &Vec<usize>| -> [f64; 2] {
                if let Some(&o) = act.iter().find(|&&o| o != w) {
                    [coeff_f[o][1], coeff_f[o][2]]
                } else {
                    match phase {
                        Phase::Quadratic => [2.0 * pt[0], 2.0 * pt[1]],
                        Phase::Linear(f) => {
                            [rat_to_f64(&f.coeffs[1]), rat_to_f64(&f.coeffs[2])]
                        }
                        Phase::None => [a2, -a1],
                    }
                }
            };
            let dual = |g: [f64; 2]| -> [f64; 2] {
                let u = [-g[1], g[0]];
                let s = a1 * u[0] + a2 * u[1];
                [u[0] / s, u[1] / s]
            };
            let du_from = dual(other_grad(*p, pa));
            let du_to = dual(other_grad(*q, qa));
            if has_loop {
                pieces.push(BoundaryPiece::WallEdge {
                    wall: w,
                    from: pf,
                    to: qf,
                    dual_from: du_from,
                    dual_to: du_to,
                    level,
                });
            } else {
                pieces.push(BoundaryPiece::Plain { from: pf, to: qf });
            }
        } else if is_disk {
            let phi_from = (p[1]).atan2(p[0]);
            let mut phi_to = (q[1]).atan2(q[0]);
            while phi_to <= phi_from {
                phi_to += 2.0 * std::f64::consts::PI;
            }
            pieces.push(BoundaryPiece::Arc {
                rho: r_eff.sqrt(),
                phi_from,
                phi_to,
            });
        } else {
            pieces.push(BoundaryPiece::Plain { from: *p, to: *q });
        }
    }

    let mut b = ChainBuilder::new(d);
    for piece in &pieces {
        match piece {
            BoundaryPiece::WallEdge { from, to, .. } | BoundaryPiece::Plain { from, to } => {
                b.push(
                    1,
                    Vec::new(),
                    CellGeometry::Triangle {
                        v0: anchor,
                        w1: [from[0] - anchor[0], from[1] - anchor[1]],
                        w2: [to[0] - anchor[0], to[1] - anchor[1]],
                    },
                    base.clone(),
                );
            }
            BoundaryPiece::Arc {
                rho,
                phi_from,
                phi_to,
            } => {
                b.push(
                    1,
                    Vec::new(),
                    CellGeometry::Sector {
                        apex: anchor,
                        rho: *rho,
                        phi0: *phi_from,
                        dphi: phi_to - phi_from,
                    },
                    base.clone(),
                );
            }
        }
    }
    for piece in &pieces {
        if let BoundaryPiece::WallEdge {
            wall,
            from,
            to,
            dual_from,
            dual_to,
            level,
        } = piece
        {
            b.push(
                1,
                vec![*wall],
                CellGeometry::EdgeLoop {
                    x0: *from,
                    e: [to[0] - from[0], to[1] - from[1]],
                    c: *level,
                    v0: *dual_from,
                    v1: *dual_to,
                    wall: *wall,
                },
                base.clone(),
            );
        }
    }
    for i in 0..pieces.len() {
        let this = &pieces[i];
        let next = &pieces[(i + 1) % pieces.len()];
        if let (
            BoundaryPiece::WallEdge {
                wall: wi,
                to,
                dual_to,
                level: li,
                ..
            },
            BoundaryPiece::WallEdge {
                wall: wj,
                from,
                dual_from,
                level: lj,
                ..
            },
        ) = (this, next)
        {
            if wi == wj {
                continue;
            }
            debug_assert!((to[0] - from[0]).abs() + (to[1] - from[1]).abs() < 1e-7);
            b.push(
                1,
                vec![*wi, *wj],
                CellGeometry::Torus {
                    x: *to,
                    c_first: *li,
                    u_first: *dual_to,
                    c_second: *lj,
                    u_second: *dual_from,
                    wall_first: *wi,
                    wall_second: *wj,
                },
                base.clone(),
            );
        }
    }

    if matches!(phase, Phase::Linear(_)) {
        warnings.push(
            "linear truncation in the plane keeps the {Re f = R} facet as a plain boundary"
                .to_string(),
        );
    }
    Ok(TwistedChain {
        dim: 2,
        epsilon: eps,
        terms: b.terms,
        d: b.d,
        warnings,
    })
}

/// Rotates the start point of every full loop by `phi0`, inserting the
/// compensating arc cells that keep the chain in the same twisted class:
/// `(1/d)·Loop_x = (1/d)·Loop_y − Arc(x → y)` for `y = x` rotated by φ₀.
pub fn rotate_loop_starts(chain: &TwistedChain, a: &Arrangement<Rat>, phi0: f64) -> TwistedChain {
    let coeff_f: Vec<Vec<f64>> = a
        .hyperplanes
        .iter()
        .map(|h| h.coeffs.iter().map(rat_to_f64).collect())
        .collect();
    let eval_c = |j: usize, z: &[Complex64]| -> Complex64 {
        let mut acc = Complex64::new(coeff_f[j][0], 0.0);
        for (c, x) in coeff_f[j][1..].iter().zip(z) {
            acc += c * x;
        }
        acc
    };
    let mut out_terms: Vec<ChainTerm> = Vec::new();
    let mut next_id = 0usize;
    for term in &chain.terms {
        match &term.cell.geometry {
            CellGeometry::Loop { center, anchor, wall } => {
                let rotated = center + (anchor - center) * Complex64::from_polar(1.0, phi0);
                // transport base args along the arc from anchor to rotated
                let steps = 64;
                let mut args = term.cell.base_args.clone();
                let mut prev: Vec<Complex64> = term.cell.basepoint.clone();
                for k in 1..=steps {
                    let th = phi0 * (k as f64) / (steps as f64);
                    let z = vec![center + (anchor - center) * Complex64::from_polar(1.0, th)];
                    for (j, arg) in args.iter_mut().enumerate() {
                        let num = eval_c(j, &z);
                        let den = eval_c(j, &prev);
                        *arg += (num / den).arg();
                    }
                    prev = z;
                }
                out_terms.push(ChainTerm {
                    sign: -term.sign,
                    loop_walls: Vec::new(),
                    coefficient: -term.coefficient,
                    cell: ProductCell {
                        id: next_id,
                        geometry: CellGeometry::CircArc {
                            center: *center,
                            anchor: *anchor,
                            sweep: phi0,
                        },
                        orientation: 1,
                        basepoint: term.cell.basepoint.clone(),
                        base_args: term.cell.base_args.clone(),
                    },
                });
                next_id += 1;
                out_terms.push(ChainTerm {
                    sign: term.sign,
                    loop_walls: term.loop_walls.clone(),
                    coefficient: term.coefficient,
                    cell: ProductCell {
                        id: next_id,
                        geometry: CellGeometry::Loop {
                            center: *center,
                            anchor: rotated,
                            wall: *wall,
                        },
                        orientation: term.cell.orientation,
                        basepoint: vec![rotated],
                        base_args: args,
                    },
                });
                next_id += 1;
            }
            _ => {
                let mut t = term.clone();
                t.cell.id = next_id;
                next_id += 1;
                out_terms.push(t);
            }
        }
    }
    TwistedChain {
        dim: chain.dim,
        epsilon: chain.epsilon.clone(),
        terms: out_terms,
        d: chain.d.clone(),
        warnings: chain.warnings.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chambers::enumerate_chambers;
    use crate::field::{rat, CRat};
    use crate::geometry::arrangement_from_rows;
    use crate::rdbasis::{rd_basis_linear, rd_basis_quadratic, RadiusSpec};

    fn cr(n: i64, den: i64) -> CRat {
        CRat::from_rat(rat(n, den))
    }

    #[test]
    fn interval_chain_structure() {
        let a = arrangement_from_rows(1, &[vec![0, 1], vec![-1, 1]]);
        let e = ExponentData::rank1(vec![cr(1, 2), cr(1, 3)]);
        let census = enumerate_chambers(&a).unwrap();
        let chamber = census.bounded().next().unwrap();
        let chain = regularize_bounded(chamber, &a, &e).unwrap();
        assert_eq!(chain.term_count(), 3);
        // σ + (1/d₁)·loop@0 − (1/d₂)·loop@1
        assert_eq!(chain.terms[0].loop_walls.len(), 0);
        assert_eq!(chain.terms[1].sign, 1);
        assert_eq!(chain.terms[1].loop_walls, vec![0]);
        assert_eq!(chain.terms[2].sign, -1);
        assert_eq!(chain.terms[2].loop_walls, vec![1]);
        // coefficient · ∏ d = ±1 exactly in the factored representation
        for t in &chain.terms {
            let mut prod = t.coefficient;
            for &w in &t.loop_walls {
                prod *= chain.d[w];
            }
            assert!((prod - Complex64::new(t.sign as f64, 0.0)).norm() < 1e-14);
        }
        // α = 1/2 gives 1/d = −1/2
        assert!((chain.terms[1].coefficient - Complex64::new(-0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn integer_wall_has_no_loop() {
        // exponents (1/2, 2): the right wall is single-valued, so the chain
        // is a segment reaching the wall exactly plus one loop on the left
        let a = arrangement_from_rows(1, &[vec![0, 1], vec![-1, 1]]);
        let e = ExponentData::rank1(vec![cr(1, 2), CRat::from_int(2)]);
        let census = enumerate_chambers(&a).unwrap();
        let chamber = census.bounded().next().unwrap();
        let chain = regularize_bounded(chamber, &a, &e).unwrap();
        assert_eq!(chain.term_count(), 2);
        let CellGeometry::Segment { end, .. } = &chain.terms[0].cell.geometry else {
            panic!("first term is σ");
        };
        assert!((end.re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn triangle_chain_has_seven_terms() {
        let a = arrangement_from_rows(2, &[vec![0, 1, 0], vec![0, 0, 1], vec![1, -1, -1]]);
        let e = ExponentData::rank1(vec![cr(1, 2), cr(1, 3), cr(1, 5)]);
        let census = enumerate_chambers(&a).unwrap();
        let chamber = census.bounded().next().unwrap();
        let chain = regularize_bounded(chamber, &a, &e).unwrap();
        let count_kind = |pred: fn(&CellGeometry) -> bool| {
            chain
                .terms
                .iter()
                .filter(|t| pred(&t.cell.geometry))
                .count()
        };
        // σ (fanned into 3 triangles) + 3 edge loops + 3 corner tori
        assert_eq!(count_kind(|g| matches!(g, CellGeometry::Triangle { .. })), 3);
        assert_eq!(count_kind(|g| matches!(g, CellGeometry::EdgeLoop { .. })), 3);
        assert_eq!(count_kind(|g| matches!(g, CellGeometry::Torus { .. })), 3);
        for t in &chain.terms {
            assert_eq!(t.sign, 1);
            assert!(t.loop_walls.len() <= 2);
        }
    }

    #[test]
    fn edge_loop_winds_its_wall_exactly() {
        let a = arrangement_from_rows(2, &[vec![0, 1, 0], vec![0, 0, 1], vec![1, -1, -1]]);
        let e = ExponentData::rank1(vec![cr(1, 2), cr(1, 3), cr(1, 5)]);
        let census = enumerate_chambers(&a).unwrap();
        let chamber = census.bounded().next().unwrap();
        let chain = regularize_bounded(chamber, &a, &e).unwrap();
        let coeffs: Vec<Vec<f64>> = a
            .hyperplanes
            .iter()
            .map(|h| h.coeffs.iter().map(rat_to_f64).collect())
            .collect();
        let eval = |j: usize, z: &[Complex64]| -> Complex64 {
            Complex64::new(coeffs[j][0], 0.0) + coeffs[j][1] * z[0] + coeffs[j][2] * z[1]
        };
        for t in &chain.terms {
            if let CellGeometry::EdgeLoop { .. } = t.cell.geometry {
                let w = t.loop_walls[0];
                for &s in &[0.0, 0.3, 0.9] {
                    let z0 = t.cell.geometry.point(&[s, 0.0]);
                    let l0 = eval(w, &z0);
                    for &th in &[0.25, 0.5, 0.75] {
                        let z = t.cell.geometry.point(&[s, th]);
                        let l = eval(w, &z);
                        let expected =
                            l0 * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * th);
                        assert!((l - expected).norm() < 1e-12, "wall form must wind in θ");
                    }
                }
            }
        }
    }

    #[test]
    fn kummer_truncated_chain() {
        let a = arrangement_from_rows(1, &[vec![0, 1], vec![-1, 1]]);
        let e = ExponentData::rank1(vec![cr(1, 2), cr(1, 3)]);
        let f = crate::geometry::AffineFunctional::new(vec![rat_i(0), rat_i(1)]).unwrap();
        let basis = rd_basis_linear(&a, &e, &f, &RadiusSpec::Explicit(rat_i(10))).unwrap();
        let tc = &basis.truncated[0];
        let chain = regularize_truncated(
            tc,
            &Phase::Linear(f),
            &rat_i(10),
            &a,
            &e,
            CutoffSpec::AtRadius,
        )
        .unwrap();
        assert_eq!(chain.term_count(), 2);
        let CellGeometry::Segment { start, end } = &chain.terms[0].cell.geometry else {
            panic!("σ first");
        };
        assert!((end.re - 10.0).abs() < 1e-12);
        assert!(start.re > 1.0 && start.re < 1.5);
        assert_eq!(chain.terms[1].loop_walls, vec![1]);
        assert_eq!(chain.terms[1].sign, 1);
    }

    #[test]
    fn quadratic_truncation_cuts_at_sqrt() {
        let a = arrangement_from_rows(1, &[vec![0, 1], vec![-1, 1]]);
        let e = ExponentData::rank1(vec![cr(1, 2), cr(1, 3)]);
        let basis = rd_basis_quadratic(&a, &e, &RadiusSpec::Explicit(rat_i(25))).unwrap();
        let right = basis
            .truncated
            .iter()
            .find(|t| t.chamber.sign == crate::geometry::SignVector::parse("++").unwrap())
            .unwrap();
        let chain = regularize_truncated(
            right,
            &Phase::Quadratic,
            &rat_i(25),
            &a,
            &e,
            CutoffSpec::AtRadius,
        )
        .unwrap();
        let CellGeometry::Segment { end, .. } = &chain.terms[0].cell.geometry else {
            panic!("σ first");
        };
        assert!((end.re - 5.0).abs() < 1e-12);
    }

    #[test]
    fn leftward_chamber_flags_growth() {
        // chamber (−∞, 0) with f = t: e^{−f} grows along the chain
        let a = arrangement_from_rows(1, &[vec![0, 1], vec![-1, 1]]);
        let e = ExponentData::rank1(vec![cr(1, 2), cr(1, 3)]);
        let census = enumerate_chambers(&a).unwrap();
        let left = census
            .chambers
            .iter()
            .find(|c| c.sign == crate::geometry::SignVector::parse("--").unwrap())
            .unwrap();
        let tc = TruncatedChamber {
            chamber: left.clone(),
            interior_point: vec![rat(-1, 1)],
        };
        let f = crate::geometry::AffineFunctional::new(vec![rat_i(0), rat_i(1)]).unwrap();
        let chain = regularize_truncated(
            &tc,
            &Phase::Linear(f),
            &rat_i(10),
            &a,
            &e,
            CutoffSpec::Explicit { at: -30.0 },
        )
        .unwrap();
        assert!(!chain.warnings.is_empty());
        let CellGeometry::Segment { start, end } = &chain.terms[0].cell.geometry else {
            panic!("σ first");
        };
        assert!((end.re + 30.0).abs() < 1e-12);
        assert!(start.re < 0.0 && start.re > -0.5);
    }
}
