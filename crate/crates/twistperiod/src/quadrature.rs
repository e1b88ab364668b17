//! Numerical integration of twisted integrands `∏ l_j^{α_j} e^{−f} ω` over
//! product cells. Segments use Gauss–Legendre, loops use the periodic
//! trapezoid rule (spectrally accurate), and the multivalued factor is
//! always evaluated by continuous-argument transport from the cell
//! basepoint, never by a principal branch.

use crate::connection::ExponentData;
use crate::field::{rat_to_f64, CRat, Rat};
use crate::geometry::Arrangement;
use crate::rdbasis::Phase;
use crate::regularization::{CellGeometry, ProductCell, TwistedChain};
use crate::util::KahanSum;
use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("argument transport step underflow (cell too close to hyperplane {hyperplane})")]
    StepUnderflow { hyperplane: usize },
    #[error("integration path touches hyperplane {hyperplane}")]
    OnHyperplane { hyperplane: usize },
    #[error("node doubling did not converge at m = {max_nodes}: last deltas {deltas:?}")]
    NonConvergence { max_nodes: usize, deltas: Vec<f64> },
    #[error("the phase does not decay along the requested direction")]
    NonDecayingDirection,
    #[error("ray crosses the branch locus of hyperplane {hyperplane}")]
    RayHitsBranchPoint { hyperplane: usize },
    #[error("singular ray start unsupported: {0}")]
    UnsupportedSingularity(String),
    #[error("twist data must have rank 1 for integration")]
    NotRankOne,
}

/// One monomial of the algebraic n-form: `coeff · ∏_j l_j^{powers_j} dt`.
#[derive(Debug, Clone)]
pub struct FormTerm {
    pub coeff: Complex64,
    pub powers: Vec<i64>,
}

impl FormTerm {
    pub fn new(coeff: Complex64, powers: Vec<i64>) -> Self {
        FormTerm { coeff, powers }
    }

    /// The constant form `c · dt`.
    pub fn constant(coeff: Complex64, n_hyperplanes: usize) -> Self {
        FormTerm {
            coeff,
            powers: vec![0; n_hyperplanes],
        }
    }
}

#[derive(Debug, Clone)]
enum PhaseF {
    None,
    Linear(Vec<f64>),
    Quadratic,
}

/// Floating view of the arrangement, exponents, phase, and form. Integer
/// exponents are folded into the form term powers at construction so the
/// transported twist only involves genuinely multivalued factors.
#[derive(Debug, Clone)]
pub struct TwistedIntegrand {
    pub dim: usize,
    coeffs: Vec<Vec<f64>>,
    alphas: Vec<Complex64>,
    alphas_exact: Vec<CRat>,
    /// hyperplanes with non-integer exponents: their arguments are tracked
    tracked: Vec<usize>,
    form: Vec<FormTerm>,
    phase: PhaseF,
}

impl TwistedIntegrand {
    pub fn new(
        a: &Arrangement<Rat>,
        e: &ExponentData,
        phase: &Phase,
        form: Vec<FormTerm>,
    ) -> Result<Self, QuadError> {
        let alphas_exact = e.alphas().ok_or(QuadError::NotRankOne)?.to_vec();
        let coeffs: Vec<Vec<f64>> = a
            .hyperplanes
            .iter()
            .map(|h| h.coeffs.iter().map(rat_to_f64).collect())
            .collect();
        let tracked: Vec<usize> = alphas_exact
            .iter()
            .enumerate()
            .filter(|(_, al)| !al.is_integer())
            .map(|(j, _)| j)
            .collect();
        // fold integer exponents into every form term so single-valued
        // factors never split into 0^k · 0^{−k}
        let mut folded = form;
        for t in &mut folded {
            assert_eq!(t.powers.len(), a.len(), "form powers must match arrangement");
            for (j, al) in alphas_exact.iter().enumerate() {
                if al.is_integer() {
                    let k = rat_to_f64(&al.re).round() as i64;
                    t.powers[j] += k;
                }
            }
        }
        let phase_f = match phase {
            Phase::None => PhaseF::None,
            Phase::Linear(f) => PhaseF::Linear(f.coeffs.iter().map(rat_to_f64).collect()),
            Phase::Quadratic => PhaseF::Quadratic,
        };
        Ok(TwistedIntegrand {
            dim: a.dim,
            coeffs,
            alphas: alphas_exact.iter().map(|x| x.to_c64()).collect(),
            alphas_exact,
            tracked,
            form: folded,
            phase: phase_f,
        })
    }

    pub fn n_hyperplanes(&self) -> usize {
        self.coeffs.len()
    }

    pub fn tracked(&self) -> &[usize] {
        &self.tracked
    }

    fn l(&self, j: usize, z: &[Complex64]) -> Complex64 {
        let row = &self.coeffs[j];
        let mut acc = Complex64::new(row[0], 0.0);
        for (c, x) in row[1..].iter().zip(z) {
            acc += c * x;
        }
        acc
    }

    fn phase_factor(&self, z: &[Complex64]) -> Complex64 {
        match &self.phase {
            PhaseF::None => Complex64::new(1.0, 0.0),
            PhaseF::Linear(c) => {
                let mut f = Complex64::new(c[0], 0.0);
                for (ci, x) in c[1..].iter().zip(z) {
                    f += ci * x;
                }
                (-f).exp()
            }
            PhaseF::Quadratic => {
                let f: Complex64 = z.iter().map(|x| x * x).sum();
                (-f).exp()
            }
        }
    }

    /// Integrand value at `z` with transported arguments `args` (full-length
    /// slice; only tracked positions are read).
    pub fn value(&self, z: &[Complex64], args: &[f64]) -> Complex64 {
        let ls: Vec<Complex64> = (0..self.coeffs.len()).map(|j| self.l(j, z)).collect();
        let mut form = Complex64::new(0.0, 0.0);
        for term in &self.form {
            let mut v = term.coeff;
            for (j, &p) in term.powers.iter().enumerate() {
                if p != 0 {
                    v *= ls[j].powi(p as i32);
                }
            }
            form += v;
        }
        let mut twist_exp = Complex64::new(0.0, 0.0);
        for &j in &self.tracked {
            let log_l = Complex64::new(ls[j].norm().ln(), args[j]);
            twist_exp += self.alphas[j] * log_l;
        }
        form * twist_exp.exp() * self.phase_factor(z)
    }

    /// Transports the tracked arguments along the straight parameter path
    /// `from → to` on the cell, subdividing until every wall form turns by
    /// less than π/2 per step.
    pub fn transport(
        &self,
        geometry: &CellGeometry,
        from: &[f64],
        to: &[f64],
        args: &mut [f64],
    ) -> Result<(), QuadError> {
        self.transport_rec(geometry, from, to, args, 0)
    }

    fn transport_rec(
        &self,
        geometry: &CellGeometry,
        from: &[f64],
        to: &[f64],
        args: &mut [f64],
        depth: usize,
    ) -> Result<(), QuadError> {
        let zf = geometry.point(from);
        let zt = geometry.point(to);
        let mut deltas = Vec::with_capacity(self.tracked.len());
        let mut ok = true;
        for &j in &self.tracked {
            let lf = self.l(j, &zf);
            let lt = self.l(j, &zt);
            if lf.norm() == 0.0 || lt.norm() == 0.0 {
                return Err(QuadError::OnHyperplane { hyperplane: j });
            }
            let delta = (lt / lf).arg();
            if delta.abs() >= std::f64::consts::FRAC_PI_2 {
                ok = false;
                break;
            }
            deltas.push((j, delta));
        }
        if ok {
            for (j, delta) in deltas {
                args[j] += delta;
            }
            return Ok(());
        }
        if depth > 48 {
            return Err(QuadError::StepUnderflow {
                hyperplane: *self.tracked.first().unwrap_or(&0),
            });
        }
        let mid: Vec<f64> = from.iter().zip(to).map(|(a, b)| 0.5 * (a + b)).collect();
        self.transport_rec(geometry, from, &mid, args, depth + 1)?;
        self.transport_rec(geometry, &mid, to, args, depth + 1)
    }
}

// ---------------------------------------------------------------------------
// Node rules
// ---------------------------------------------------------------------------

/// Gauss–Legendre nodes and weights on (0, 1), cached per order.
pub fn gauss_legendre_01(m: usize) -> (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<Mutex<HashMap<usize, (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&m) {
        return hit.clone();
    }
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for k in 0..m {
        // Tricomi initial guess, then Newton on P_m
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_eval(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[m - 1 - k] = 0.5 * (x + 1.0);
        weights[m - 1 - k] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    cache
        .lock()
        .unwrap()
        .insert(m, (nodes.clone(), weights.clone()));
    (nodes, weights)
}

fn legendre_eval(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[derive(Debug, Clone, Copy)]
enum AxisRule {
    Gauss,
    /// Trapezoid sampling with exact twisted Fourier moments: the loop
    /// integrand is `e^{2πiαx}·G(x)` with `G` 1-periodic, so the integral
    /// is `Σ_k ĝ_k ν(α+k)` with `ν(β) = (e^{2πiβ}−1)/(2πiβ)`. A plain
    /// trapezoid weight would be first-order here; the moment correction
    /// restores spectral accuracy.
    Filon { wall: usize },
}

fn axis_rules(g: &CellGeometry) -> Vec<AxisRule> {
    match g {
        CellGeometry::Segment { .. } | CellGeometry::CircArc { .. } => vec![AxisRule::Gauss],
        CellGeometry::Loop { wall, .. } => vec![AxisRule::Filon { wall: *wall }],
        CellGeometry::Triangle { .. } | CellGeometry::Sector { .. } => {
            vec![AxisRule::Gauss, AxisRule::Gauss]
        }
        CellGeometry::EdgeLoop { wall, .. } => {
            vec![AxisRule::Gauss, AxisRule::Filon { wall: *wall }]
        }
        CellGeometry::Torus {
            wall_first,
            wall_second,
            ..
        } => vec![
            AxisRule::Filon { wall: *wall_first },
            AxisRule::Filon { wall: *wall_second },
        ],
    }
}

fn rule_nodes(rule: AxisRule, m: usize) -> Vec<f64> {
    match rule {
        AxisRule::Gauss => gauss_legendre_01(m).0,
        AxisRule::Filon { .. } => (0..m).map(|k| k as f64 / m as f64).collect(),
    }
}

/// `ν(β) = ∫₀¹ e^{2πiβx} dx`.
fn nu(beta: Complex64) -> Complex64 {
    if beta.norm() < 1e-8 {
        return Complex64::new(1.0, 0.0) + Complex64::new(0.0, std::f64::consts::PI) * beta;
    }
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    ((two_pi_i * beta).exp() - 1.0) / (two_pi_i * beta)
}

/// Reduces sampled values along one axis according to its rule.
fn reduce_axis(rule: AxisRule, values: &[Complex64], alphas: &[Complex64]) -> Complex64 {
    let m = values.len();
    match rule {
        AxisRule::Gauss => {
            let (_, weights) = gauss_legendre_01(m);
            values.iter().zip(&weights).map(|(v, w)| v * w).sum()
        }
        AxisRule::Filon { wall } => {
            let alpha = alphas[wall];
            let k_lo = -((m / 2) as i64);
            let k_hi = ((m - 1) / 2) as i64;
            let mut total = Complex64::new(0.0, 0.0);
            for k in k_lo..=k_hi {
                let beta = alpha + k as f64;
                let mut coeff = Complex64::new(0.0, 0.0);
                for (j, v) in values.iter().enumerate() {
                    let x = j as f64 / m as f64;
                    let rot = (Complex64::new(0.0, -2.0 * std::f64::consts::PI) * beta * x).exp();
                    coeff += v * rot;
                }
                coeff /= m as f64;
                total += coeff * nu(beta);
            }
            total
        }
    }
}

// ---------------------------------------------------------------------------
// Cell and chain integration
// ---------------------------------------------------------------------------

/// Tensor quadrature over one product cell: `m` Gauss–Legendre nodes per
/// segment factor, `m` trapezoid nodes per loop factor, with transported
/// branch arguments.
pub fn integrate_cell(
    integrand: &TwistedIntegrand,
    cell: &ProductCell,
    m: usize,
) -> Result<Complex64, QuadError> {
    let rules = axis_rules(&cell.geometry);
    let orient = Complex64::new(cell.orientation as f64, 0.0);
    match rules.len() {
        1 => {
            let nodes = rule_nodes(rules[0], m);
            let mut args = cell.base_args.clone();
            let mut prev = vec![0.0];
            let mut values = Vec::with_capacity(nodes.len());
            for x in &nodes {
                let here = vec![*x];
                integrand.transport(&cell.geometry, &prev, &here, &mut args)?;
                let z = cell.geometry.point(&here);
                let jac = cell.geometry.jacobian(&here);
                values.push(integrand.value(&z, &args) * jac);
                prev = here;
            }
            Ok(reduce_axis(rules[0], &values, &integrand.alphas) * orient)
        }
        2 => {
            let n0 = rule_nodes(rules[0], m);
            let n1 = rule_nodes(rules[1], m);
            // transport along axis 0 at axis1 = 0, then up each column
            let mut col_args: Vec<Vec<f64>> = Vec::with_capacity(n0.len());
            let mut args = cell.base_args.clone();
            let mut prev = vec![0.0, 0.0];
            for x in &n0 {
                let here = vec![*x, 0.0];
                integrand.transport(&cell.geometry, &prev, &here, &mut args)?;
                col_args.push(args.clone());
                prev = here;
            }
            let mut rows = Vec::with_capacity(n0.len());
            for (ix, x) in n0.iter().enumerate() {
                let mut cargs = col_args[ix].clone();
                let mut cprev = vec![*x, 0.0];
                let mut values = Vec::with_capacity(n1.len());
                for y in &n1 {
                    let here = vec![*x, *y];
                    integrand.transport(&cell.geometry, &cprev, &here, &mut cargs)?;
                    let z = cell.geometry.point(&here);
                    let jac = cell.geometry.jacobian(&here);
                    values.push(integrand.value(&z, &cargs) * jac);
                    cprev = here;
                }
                rows.push(reduce_axis(rules[1], &values, &integrand.alphas));
            }
            Ok(reduce_axis(rules[0], &rows, &integrand.alphas) * orient)
        }
        _ => unreachable!("cells are 1- or 2-dimensional"),
    }
}

/// Period value with a mesh-refinement error estimate.
#[derive(Debug, Clone)]
pub struct PeriodReport {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub cells_evaluated: usize,
    pub nodes_used: usize,
}

/// Sums coefficient-weighted cell integrals, doubling the per-factor node
/// count until two successive totals agree to the target relative error.
/// Cell integrals are independent tasks reduced in cell order, so the total
/// is bit-stable regardless of scheduling.
pub fn integrate_chain(
    integrand: &TwistedIntegrand,
    chain: &TwistedChain,
    target_rel_err: f64,
) -> Result<PeriodReport, QuadError> {
    let max_m = 1usize << 13;
    let mut m = 16usize;
    let mut prev_vals: Option<Vec<Complex64>> = None;
    let mut prev_total: Option<Complex64> = None;
    loop {
        let vals: Result<Vec<Complex64>, QuadError> = chain
            .terms
            .par_iter()
            .map(|t| integrate_cell(integrand, &t.cell, m))
            .collect();
        let vals = vals?;
        let mut kahan = KahanSum::new();
        for (t, v) in chain.terms.iter().zip(&vals) {
            kahan.add(t.coefficient * v);
        }
        let total = kahan.total();
        if let Some(pt) = prev_total {
            let delta = (total - pt).norm();
            if delta <= target_rel_err * total.norm().max(f64::MIN_POSITIVE) {
                let nodes_per_cell: usize = chain
                    .terms
                    .iter()
                    .map(|t| m.pow(t.cell.geometry.dim() as u32))
                    .sum();
                return Ok(PeriodReport {
                    value: total,
                    abs_error_estimate: delta,
                    cells_evaluated: chain.terms.len(),
                    nodes_used: nodes_per_cell,
                });
            }
        }
        if 2 * m > max_m {
            let deltas = match &prev_vals {
                Some(pv) => vals.iter().zip(pv).map(|(a, b)| (a - b).norm()).collect(),
                None => Vec::new(),
            };
            return Err(QuadError::NonConvergence {
                max_nodes: max_m,
                deltas,
            });
        }
        prev_vals = Some(vals);
        prev_total = Some(total);
        m *= 2;
    }
}

// ---------------------------------------------------------------------------
// Unbounded tails
// ---------------------------------------------------------------------------

/// Integrates the twisted integrand along the real ray `start + u·dir`,
/// `u ∈ [0, ∞)`, by adaptive truncation with the neglected tail bounded
/// below 1e−16. The phase must decay along the direction. A start point on
/// one hyperplane with rational real exponent is handled by an exact power
/// substitution; tracked hyperplanes may not be crossed by the ray.
pub fn integrate_unbounded_tail(
    integrand: &TwistedIntegrand,
    start: &[f64],
    dir: &[f64],
    target_rel_err: f64,
) -> Result<Complex64, QuadError> {
    let n = integrand.dim;
    assert_eq!(start.len(), n);
    assert_eq!(dir.len(), n);

    // decay: Re f(start + u·dir) = a + b·u (+ c·u² for the quadratic phase)
    let (rate_lin, rate_quad) = match &integrand.phase {
        PhaseF::None => return Err(QuadError::NonDecayingDirection),
        PhaseF::Linear(c) => {
            let b: f64 = c[1..].iter().zip(dir).map(|(ci, di)| ci * di).sum();
            if b <= 0.0 {
                return Err(QuadError::NonDecayingDirection);
            }
            (b, 0.0)
        }
        PhaseF::Quadratic => {
            let b: f64 = 2.0 * start.iter().zip(dir).map(|(s, d)| s * d).sum::<f64>();
            let c: f64 = dir.iter().map(|d| d * d).sum();
            if c <= 0.0 {
                return Err(QuadError::NonDecayingDirection);
            }
            (b, c)
        }
    };

    // per-hyperplane restriction to the ray: l_j(u) = v_j + u·g_j (real)
    let line: Vec<(f64, f64)> = (0..integrand.coeffs.len())
        .map(|j| {
            let row = &integrand.coeffs[j];
            let v = row[0] + row[1..].iter().zip(start).map(|(c, s)| c * s).sum::<f64>();
            let g: f64 = row[1..].iter().zip(dir).map(|(c, d)| c * d).sum();
            (v, g)
        })
        .collect();

    // polynomial growth bound for the truncation estimate
    let mut growth: f64 = 0.0;
    for (j, al) in integrand.alphas.iter().enumerate() {
        if line[j].1 != 0.0 {
            let max_p = integrand
                .form
                .iter()
                .map(|t| t.powers[j])
                .max()
                .unwrap_or(0) as f64;
            growth += (al.re + max_p).max(0.0);
        }
    }
    // T with rate·T − growth·ln(1+T) ≥ ln(1/tol) + margin
    let tol = 1e-16f64;
    let needed = tol.recip().ln() + 8.0;
    let mut t_cut = 1.0f64;
    loop {
        let g = rate_lin * t_cut + rate_quad * t_cut * t_cut - growth * (1.0 + t_cut).ln();
        if g >= needed || t_cut > 1e6 {
            break;
        }
        t_cut *= 2.0;
    }

    // singular start: exactly one tracked hyperplane may vanish at u = 0
    let mut singular: Option<(usize, i64)> = None;
    for &j in &integrand.tracked {
        let (v, g) = line[j];
        if v == 0.0 {
            if singular.is_some() {
                return Err(QuadError::UnsupportedSingularity(
                    "multiple hyperplanes vanish at the ray start".into(),
                ));
            }
            let alpha = &integrand.alphas_exact[j];
            if !alpha.im.is_zero() {
                return Err(QuadError::UnsupportedSingularity(format!(
                    "hyperplane {j} has non-real exponent at the singular start"
                )));
            }
            if g == 0.0 {
                return Err(QuadError::OnHyperplane { hyperplane: j });
            }
            let q_big = alpha.re.denom();
            let q: i64 = q_big.try_into().unwrap_or(i64::MAX);
            if !(1..=64).contains(&q) {
                return Err(QuadError::UnsupportedSingularity(format!(
                    "exponent denominator {q} out of range"
                )));
            }
            singular = Some((j, q));
        } else {
            // tracked hyperplanes must keep their sign on (0, T]
            if g != 0.0 {
                let root = -v / g;
                if root > 0.0 && root <= t_cut {
                    return Err(QuadError::RayHitsBranchPoint { hyperplane: j });
                }
            }
        }
    }

    // constant branch arguments along a real non-crossing ray
    let u_probe = 0.5f64.min(t_cut / 2.0);
    let mut args = vec![0.0; integrand.coeffs.len()];
    for &j in &integrand.tracked {
        let (v, g) = line[j];
        let val = v + u_probe * g;
        args[j] = if val >= 0.0 { 0.0 } else { std::f64::consts::PI };
    }

    let point_at = |u: f64| -> Vec<Complex64> {
        start
            .iter()
            .zip(dir)
            .map(|(s, d)| Complex64::new(s + u * d, 0.0))
            .collect()
    };

    // geometric panels [0,1], [1,2], [2,4], … up to T
    let mut cuts = vec![0.0f64, 1.0f64.min(t_cut)];
    while *cuts.last().unwrap() < t_cut {
        let last = *cuts.last().unwrap();
        cuts.push((2.0 * last).min(t_cut));
    }

    let eval_panel = |a: f64, b: f64, m: usize, smooth_pow: Option<i64>| -> Complex64 {
        let (nodes, weights) = gauss_legendre_01(m);
        let mut acc = Complex64::new(0.0, 0.0);
        match smooth_pow {
            None => {
                for (x, w) in nodes.iter().zip(&weights) {
                    let u = a + (b - a) * x;
                    let z = point_at(u);
                    acc += w * (b - a) * integrand.value(&z, &args);
                }
            }
            Some(q) => {
                // u = b·w^q turns the algebraic start singularity analytic
                debug_assert_eq!(a, 0.0);
                let qf = q as f64;
                for (x, w) in nodes.iter().zip(&weights) {
                    let u = b * x.powi(q as i32);
                    let du = b * qf * x.powi((q - 1) as i32);
                    let z = point_at(u);
                    acc += w * du * integrand.value(&z, &args);
                }
            }
        }
        acc
    };

    let mut m = 16usize;
    let mut prev: Option<Complex64> = None;
    loop {
        let mut kahan = KahanSum::new();
        for win in cuts.windows(2) {
            let (a, b) = (win[0], win[1]);
            let smooth = if a == 0.0 { singular.map(|(_, q)| q) } else { None };
            kahan.add(eval_panel(a, b, m, smooth));
        }
        let total = kahan.total();
        if let Some(p) = prev {
            let delta = (total - p).norm();
            if delta <= target_rel_err * total.norm().max(f64::MIN_POSITIVE) {
                return Ok(total);
            }
        }
        if 2 * m > (1 << 13) {
            return Err(QuadError::NonConvergence {
                max_nodes: 1 << 13,
                deltas: vec![(total - prev.unwrap_or(total)).norm()],
            });
        }
        prev = Some(total);
        m *= 2;
    }
}

// ---------------------------------------------------------------------------
// Independent oracle quadrature
// ---------------------------------------------------------------------------

/// Tanh-sinh quadrature on (a, b) for integrands with integrable endpoint
/// singularities. Independent of the Gauss–Legendre/trapezoid machinery; it
/// serves as the direct-quadrature oracle in calibration tests.
pub fn tanh_sinh<F: Fn(f64, f64, f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> (Complex64, f64) {
    // the integrand receives (t, t−a, b−t) with the endpoint distances
    // computed from the transform, so algebraic singularities keep full
    // precision arbitrarily close to the endpoints
    let half = 0.5 * (b - a);
    let t_max = 6.1;
    let mut prev: Option<Complex64> = None;
    let mut best = Complex64::new(0.0, 0.0);
    let mut err = f64::INFINITY;
    for level in 2..=12u32 {
        let h = 1.0 / (1u64 << level) as f64;
        let steps = (t_max / h) as i64;
        let mut sum = Complex64::new(0.0, 0.0);
        for k in -steps..=steps {
            let t = k as f64 * h;
            let u = std::f64::consts::FRAC_PI_2 * t.sinh();
            let e2u = (-2.0 * u.abs()).exp();
            let one_minus_abs_x = 2.0 * e2u / (1.0 + e2u); // 1 − |tanh u|
            if one_minus_abs_x < 1e-280 {
                continue;
            }
            // 1/cosh²u = 4 e^{−2|u|}/(1+e^{−2|u|})²
            let sech2 = 4.0 * e2u / ((1.0 + e2u) * (1.0 + e2u));
            let w = std::f64::consts::FRAC_PI_2 * t.cosh() * sech2;
            if !w.is_finite() || w < 1e-300 {
                continue;
            }
            let (one_plus_x, one_minus_x) = if u >= 0.0 {
                (2.0 - one_minus_abs_x, one_minus_abs_x)
            } else {
                (one_minus_abs_x, 2.0 - one_minus_abs_x)
            };
            let dist_a = half * one_plus_x;
            let dist_b = half * one_minus_x;
            let point = a + dist_a;
            let v = f(point, dist_a, dist_b);
            if v.is_finite() {
                sum += w * v;
            }
        }
        let total = sum * h * half;
        if let Some(p) = prev {
            err = (total - p).norm();
            best = total;
            if err <= tol * total.norm().max(1e-300) {
                return (best, err);
            }
        } else {
            best = total;
        }
        prev = Some(total);
    }
    (best, err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chambers::enumerate_chambers;
    use crate::field::{rat, rat_i};
    use crate::geometry::arrangement_from_rows;
    use crate::regularization::regularize_bounded;

    fn cr(n: i64, den: i64) -> CRat {
        CRat::from_rat(rat(n, den))
    }

    fn beta_chain() -> (Arrangement<Rat>, ExponentData, TwistedChain) {
        let a = arrangement_from_rows(1, &[vec![0, 1], vec![1, -1]]);
        let e = ExponentData::rank1(vec![cr(1, 2), cr(1, 2)]);
        let census = enumerate_chambers(&a).unwrap();
        let chamber = census.bounded().next().unwrap().clone();
        let chain = regularize_bounded(&chamber, &a, &e).unwrap();
        (a, e, chain)
    }

    #[test]
    fn gauss_legendre_exactness() {
        // a degree-9 polynomial is integrated exactly by 5 nodes
        let (nodes, weights) = gauss_legendre_01(5);
        let integral: f64 = nodes.iter().zip(&weights).map(|(x, w)| w * x.powi(9)).sum();
        assert!((integral - 0.1).abs() < 1e-14);
        let total: f64 = weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn plain_interval_integral() {
        // all α integers: ∫₀¹ dt = 1
        let a = arrangement_from_rows(1, &[vec![0, 1], vec![1, -1]]);
        let e = ExponentData::rank1(vec![CRat::from_int(0), CRat::from_int(0)]);
        let integrand = TwistedIntegrand::new(
            &a,
            &e,
            &Phase::None,
            vec![FormTerm::constant(Complex64::new(1.0, 0.0), 2)],
        )
        .unwrap();
        let cell = ProductCell {
            id: 0,
            geometry: CellGeometry::Segment {
                start: Complex64::new(0.0, 0.0),
                end: Complex64::new(1.0, 0.0),
            },
            orientation: 1,
            basepoint: vec![Complex64::new(0.0, 0.0)],
            base_args: vec![0.0, 0.0],
        };
        let v = integrate_cell(&integrand, &cell, 32).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn beta_half_half_is_pi() {
        // regularized ∫₀¹ t^{−1/2}(1−t)^{−1/2} dt = B(1/2,1/2) = π
        let (a, e, chain) = beta_chain();
        let integrand = TwistedIntegrand::new(
            &a,
            &e,
            &Phase::None,
            vec![FormTerm::new(Complex64::new(1.0, 0.0), vec![-1, -1])],
        )
        .unwrap();
        let report = integrate_chain(&integrand, &chain, 1e-10).unwrap();
        assert!(
            (report.value - Complex64::new(std::f64::consts::PI, 0.0)).norm() < 1e-8,
            "got {}",
            report.value
        );
        assert_eq!(report.cells_evaluated, 3);
    }

    #[test]
    fn loop_scaling_with_positive_exponent() {
        // |∮| ~ ε^{α} · ε for constant form: halving ε scales by 2^{−3/2}
        let a = arrangement_from_rows(1, &[vec![0, 1], vec![1, -1]]);
        let e = ExponentData::rank1(vec![cr(1, 2), cr(1, 2)]);
        let integrand = TwistedIntegrand::new(
            &a,
            &e,
            &Phase::None,
            vec![FormTerm::constant(Complex64::new(1.0, 0.0), 2)],
        )
        .unwrap();
        let loop_at = |eps: f64| ProductCell {
            id: 0,
            geometry: CellGeometry::Loop {
                center: Complex64::new(0.0, 0.0),
                anchor: Complex64::new(eps, 0.0),
                wall: 0,
            },
            orientation: 1,
            basepoint: vec![Complex64::new(eps, 0.0)],
            base_args: vec![0.0, 0.0],
        };
        let v1 = integrate_cell(&integrand, &loop_at(1e-2), 128).unwrap();
        let v2 = integrate_cell(&integrand, &loop_at(5e-3), 128).unwrap();
        let ratio = v2.norm() / v1.norm();
        assert!((ratio - 0.5f64.powf(1.5)).abs() < 0.02, "ratio {ratio}");
    }

    #[test]
    fn monodromy_around_loop() {
        // transporting around the full loop multiplies the twist by e^{2πiα}
        for (num, den) in [(1i64, 2i64), (1, 3), (1, 4)] {
            let a = arrangement_from_rows(1, &[vec![0, 1], vec![1, -1]]);
            let e = ExponentData::rank1(vec![cr(num, den), cr(1, 5)]);
            let integrand = TwistedIntegrand::new(
                &a,
                &e,
                &Phase::None,
                vec![FormTerm::constant(Complex64::new(1.0, 0.0), 2)],
            )
            .unwrap();
            let geometry = CellGeometry::Loop {
                center: Complex64::new(0.0, 0.0),
                anchor: Complex64::new(0.25, 0.0),
                wall: 0,
            };
            let mut args = vec![0.0, 0.0];
            let mut prev = vec![0.0];
            for k in 1..=4 {
                let here = vec![k as f64 / 4.0];
                integrand
                    .transport(&geometry, &prev, &here, &mut args)
                    .unwrap();
                prev = here;
            }
            let z = geometry.point(&[1.0]);
            let v_end = integrand.value(&z, &args);
            let v_start = integrand.value(&z, &[0.0, 0.0]);
            let expected = crate::connection::exp_2pi_i(&cr(num, den));
            assert!(
                (v_end / v_start - expected).norm() < 1e-12,
                "monodromy mismatch for {num}/{den}"
            );
        }
    }

    #[test]
    fn chain_linear_in_form_coefficients() {
        let (a, e, chain) = beta_chain();
        let make = |c: Complex64| {
            TwistedIntegrand::new(&a, &e, &Phase::None, vec![FormTerm::new(c, vec![-1, -1])])
                .unwrap()
        };
        let one = integrate_chain(&make(Complex64::new(1.0, 0.0)), &chain, 1e-10)
            .unwrap()
            .value;
        let scaled = integrate_chain(&make(Complex64::new(-2.5, 0.5)), &chain, 1e-10)
            .unwrap()
            .value;
        assert!((scaled - Complex64::new(-2.5, 0.5) * one).norm() < 1e-12 * one.norm());
    }

    #[test]
    fn tail_integrals() {
        // ∫₀^∞ e^{−t} dt = 1
        let a = arrangement_from_rows(1, &[vec![0, 1]]);
        let e = ExponentData::rank1(vec![CRat::from_int(0)]);
        let f = crate::geometry::AffineFunctional::new(vec![rat_i(0), rat_i(1)]).unwrap();
        let integrand = TwistedIntegrand::new(
            &a,
            &e,
            &Phase::Linear(f.clone()),
            vec![FormTerm::constant(Complex64::new(1.0, 0.0), 1)],
        )
        .unwrap();
        let v = integrate_unbounded_tail(&integrand, &[0.0], &[1.0], 1e-11).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-10, "got {v}");

        // ∫₀^∞ t^{−1/2} e^{−t} dt = Γ(1/2) = √π (singular start)
        let e2 = ExponentData::rank1(vec![cr(1, 2)]);
        let integrand2 = TwistedIntegrand::new(
            &a,
            &e2,
            &Phase::Linear(f.clone()),
            vec![FormTerm::new(Complex64::new(1.0, 0.0), vec![-1])],
        )
        .unwrap();
        let v2 = integrate_unbounded_tail(&integrand2, &[0.0], &[1.0], 1e-11).unwrap();
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert!((v2 - Complex64::new(sqrt_pi, 0.0)).norm() < 1e-9, "got {v2}");

        // decreasing phase direction is rejected
        assert!(matches!(
            integrate_unbounded_tail(&integrand, &[0.0], &[-1.0], 1e-10),
            Err(QuadError::NonDecayingDirection)
        ));
    }

    #[test]
    fn tanh_sinh_oracle_matches_beta() {
        // direct singular-endpoint quadrature: B(1/2,1/2) = π
        let (v, _) = tanh_sinh(
            |_, da, db| Complex64::new(1.0 / (da * db).sqrt(), 0.0),
            0.0,
            1.0,
            1e-12,
        );
        assert!((v.re - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn node_doubling_monotone() {
        let (a, e, chain) = beta_chain();
        let integrand = TwistedIntegrand::new(
            &a,
            &e,
            &Phase::None,
            vec![FormTerm::new(Complex64::new(1.0, 0.0), vec![-1, -1])],
        )
        .unwrap();
        let total_at = |m: usize| -> Complex64 {
            chain
                .terms
                .iter()
                .map(|t| t.coefficient * integrate_cell(&integrand, &t.cell, m).unwrap())
                .sum()
        };
        let mut deltas = Vec::new();
        let mut prev = total_at(32);
        for k in [64usize, 128, 256, 512] {
            let cur = total_at(k);
            deltas.push((cur - prev).norm());
            prev = cur;
        }
        for w in deltas.windows(2) {
            assert!(w[1] <= w[0] * 1.5 + 1e-15, "doubling deltas {deltas:?}");
        }
    }
}
