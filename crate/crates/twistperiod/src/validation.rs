//! Independent special-function oracles and classical identity checks:
//! Lanczos Gamma/Beta, the Gauss and Kummer hypergeometric series, the
//! Euler/Kummer integral representations against regularized chains, the
//! first-order ODE systems of the period vectors, and the confluence limit.

use crate::chambers::enumerate_chambers;
use crate::connection::ExponentData;
use crate::field::{rat, rat_i, rat_to_f64, CRat, Rat};
use crate::geometry::{AffineFunctional, Arrangement, GeometryError, Hyperplane};
use crate::quadrature::{
    integrate_chain, integrate_unbounded_tail, FormTerm, QuadError, TwistedIntegrand,
};
use crate::rdbasis::Phase;
use crate::regularization::{regularize_bounded, RegError, TwistedChain};
use num_complex::Complex64;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ValidationError {
    #[error("series parameter out of range: {0}")]
    SeriesOutOfRange(String),
    #[error("gamma pole at non-positive integer {0}")]
    GammaPole(String),
    #[error("series did not converge within the term budget")]
    SeriesDiverged,
    #[error("integral exponent {0} at a wall needs a regular integrand (value ≥ 1)")]
    IntegerWallExponent(String),
    #[error("no bounded chamber between 0 and 1 (unexpected arrangement)")]
    MissingUnitChamber,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Reg(#[from] RegError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Chambers(#[from] crate::chambers::ChambersError),
}

// ---------------------------------------------------------------------------
// Gamma and Beta
// ---------------------------------------------------------------------------

/// Lanczos coefficients for g = 7 (9 terms).
const LANCZOS_G: f64 = 7.0;
const LANCZOS_P: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Γ(z) by the Lanczos approximation with the reflection formula for
/// Re z < 1/2. Relative accuracy ~1e−13 on the validation strip.
pub fn gamma(z: Complex64) -> Complex64 {
    let pi = std::f64::consts::PI;
    if z.re < 0.5 {
        // Γ(z)Γ(1−z) = π / sin(πz)
        let s = (pi * z).sin();
        return pi / (s * gamma(Complex64::new(1.0, 0.0) - z));
    }
    let zm1 = z - 1.0;
    let mut acc = Complex64::new(LANCZOS_P[0], 0.0);
    for (i, &p) in LANCZOS_P.iter().enumerate().skip(1) {
        acc += p / (zm1 + i as f64);
    }
    let t = zm1 + LANCZOS_G + 0.5;
    (2.0 * pi).sqrt() * t.powc(zm1 + 0.5) * (-t).exp() * acc
}

/// `B(a, b) = Γ(a)Γ(b)/Γ(a+b)`.
pub fn beta_fn(a: Complex64, b: Complex64) -> Complex64 {
    gamma(a) * gamma(b) / gamma(a + b)
}

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

// ---------------------------------------------------------------------------
// Hypergeometric series
// ---------------------------------------------------------------------------

/// Parameters of the hypergeometric family.
#[derive(Debug, Clone, Copy)]
pub struct HgParams {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
    pub x: Complex64,
}

const SERIES_STOP: f64 = 1e-17;
const SERIES_MAX_TERMS: usize = 100_000;

/// Gauss series `₂F₁(α, β; γ; x) = Σ (α)_k (β)_k / ((γ)_k k!) x^k`, with
/// Pochhammer factors maintained by recurrence. Requires |x| < 0.9.
pub fn gauss_2f1(p: &HgParams) -> Result<Complex64, ValidationError> {
    if p.x.norm() >= 0.9 {
        return Err(ValidationError::SeriesOutOfRange(format!(
            "|x| = {} ≥ 0.9",
            p.x.norm()
        )));
    }
    if is_nonpositive_integer(p.gamma) {
        return Err(ValidationError::GammaPole(format!("γ = {}", p.gamma)));
    }
    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    for k in 0..SERIES_MAX_TERMS {
        let kf = k as f64;
        term *= (p.alpha + kf) * (p.beta + kf) / ((p.gamma + kf) * (kf + 1.0)) * p.x;
        sum += term;
        if term.norm() < SERIES_STOP * sum.norm().max(f64::MIN_POSITIVE) {
            return Ok(sum);
        }
    }
    Err(ValidationError::SeriesDiverged)
}

/// Kummer series `₁F₁(a; c; z) = Σ (a)_k / ((c)_k k!) z^k` (entire in z).
pub fn kummer_1f1(a: Complex64, c: Complex64, z: Complex64) -> Result<Complex64, ValidationError> {
    if is_nonpositive_integer(c) {
        return Err(ValidationError::GammaPole(format!("c = {c}")));
    }
    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    for k in 0..SERIES_MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        if term.norm() < SERIES_STOP * sum.norm().max(f64::MIN_POSITIVE) {
            return Ok(sum);
        }
    }
    Err(ValidationError::SeriesDiverged)
}

// ---------------------------------------------------------------------------
// Integral representations against regularized chains
// ---------------------------------------------------------------------------

/// Exact rational parameters for the integral verifications.
#[derive(Debug, Clone)]
pub struct EulerParams {
    pub alpha: Rat,
    pub beta: Rat,
    pub gamma: Rat,
    pub x: Rat,
}

impl EulerParams {
    pub fn new(alpha: Rat, beta: Rat, gamma: Rat, x: Rat) -> Self {
        EulerParams {
            alpha,
            beta,
            gamma,
            x,
        }
    }

    fn to_hg(&self) -> HgParams {
        HgParams {
            alpha: c64r(&self.alpha),
            beta: c64r(&self.beta),
            gamma: c64r(&self.gamma),
            x: c64r(&self.x),
        }
    }
}

fn c64r(r: &Rat) -> Complex64 {
    Complex64::new(rat_to_f64(r), 0.0)
}

/// Two-sided comparison of a period against its oracle.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub period: Complex64,
    pub oracle: Complex64,
    pub relative_residual: f64,
}

impl ResidualReport {
    fn new(period: Complex64, oracle: Complex64) -> Self {
        ResidualReport {
            period,
            oracle,
            relative_residual: (period - oracle).norm() / oracle.norm().max(f64::MIN_POSITIVE),
        }
    }
}

/// A wall exponent is usable if it is non-integral (a loop regularizes it)
/// or an integer ≥ 1 (the integrand extends across the wall).
fn check_wall_exponent(name: &str, e: &Rat) -> Result<(), ValidationError> {
    if e.denom().is_one() && e < &Rat::one() {
        return Err(ValidationError::IntegerWallExponent(format!("{name} = {e}")));
    }
    Ok(())
}

/// The arrangement `{t, 1−t}` (plus `1−xt` when x ≠ 0) with exponents
/// `(α, γ−α, −β)`, its unit-interval chamber regularized.
fn unit_interval_chain(
    p: &EulerParams,
    with_euler_factor: bool,
) -> Result<(Arrangement<Rat>, ExponentData, TwistedChain), ValidationError> {
    let mut rows: Vec<Vec<Rat>> = vec![
        vec![rat_i(0), rat_i(1)],
        vec![rat_i(1), rat_i(-1)],
    ];
    let mut alphas = vec![
        CRat::from_rat(p.alpha.clone()),
        CRat::from_rat(&p.gamma - &p.alpha),
    ];
    if with_euler_factor && !p.x.is_zero() {
        rows.push(vec![rat_i(1), -p.x.clone()]);
        alphas.push(CRat::from_rat(-p.beta.clone()));
    }
    let hyperplanes: Vec<Hyperplane<Rat>> = rows
        .into_iter()
        .enumerate()
        .map(|(j, coeffs)| Hyperplane::new(coeffs, format!("A{}", j + 1)).expect("valid"))
        .collect();
    let a = Arrangement::new(1, hyperplanes)?;
    let e = ExponentData::rank1(alphas);

    let census = enumerate_chambers(&a)?;
    let witness = vec![rat(1, 2)];
    let sign = a.sign_vector_at(&witness)?;
    let chamber = census
        .by_sign(&sign)
        .ok_or(ValidationError::MissingUnitChamber)?;
    if !chamber.bounded {
        return Err(ValidationError::MissingUnitChamber);
    }
    let chain = regularize_bounded(chamber, &a, &e)?;
    Ok((a, e, chain))
}

/// Compares the regularized Euler integral
/// `∫ t^{α−1}(1−t)^{γ−α−1}(1−xt)^{−β} dt` over the unit-interval cycle with
/// `B(α, γ−α)·₂F₁(α, β; γ; x)`.
pub fn verify_euler_integral(p: &EulerParams) -> Result<ResidualReport, ValidationError> {
    check_wall_exponent("α", &p.alpha)?;
    check_wall_exponent("γ−α", &(&p.gamma - &p.alpha))?;
    let (a, e, chain) = unit_interval_chain(p, true)?;
    let n = a.len();
    let mut powers = vec![0i64; n];
    powers[0] = -1;
    powers[1] = -1;
    let integrand = TwistedIntegrand::new(
        &a,
        &e,
        &Phase::None,
        vec![FormTerm::new(Complex64::new(1.0, 0.0), powers)],
    )?;
    let report = integrate_chain(&integrand, &chain, 1e-10)?;
    let hg = p.to_hg();
    let oracle = beta_fn(hg.alpha, hg.gamma - hg.alpha) * gauss_2f1(&hg)?;
    Ok(ResidualReport::new(report.value, oracle))
}

/// Kummer check: (i) the bounded cycle reproduces
/// `B(α, γ−α)·₁F₁(α; γ; −x)`; (ii) the unbounded ray `[0, ∞)` is finite and
/// the 2×2 period matrix against `{dt/(t(1−t)), dt/t}` has |det| above the
/// stated threshold (numerical rank 2).
#[derive(Debug, Clone)]
pub struct KummerReport {
    pub bounded: ResidualReport,
    pub unbounded_value: Complex64,
    pub period_matrix: [[Complex64; 2]; 2],
    pub det: Complex64,
}

pub fn verify_kummer_integral(
    alpha: &Rat,
    gamma_p: &Rat,
    x: &Rat,
) -> Result<KummerReport, ValidationError> {
    check_wall_exponent("α", alpha)?;
    check_wall_exponent("γ−α", &(gamma_p - alpha))?;
    if x <= &Rat::zero() {
        return Err(ValidationError::SeriesOutOfRange(
            "the Kummer tail needs x > 0".into(),
        ));
    }
    let p = EulerParams::new(alpha.clone(), rat_i(0), gamma_p.clone(), rat_i(0));
    let (a, e, chain) = unit_interval_chain(&p, false)?;
    let f = AffineFunctional::new(vec![rat_i(0), x.clone()])?;
    let phase = Phase::Linear(f);

    let form1 = vec![FormTerm::new(Complex64::new(1.0, 0.0), vec![-1, -1])];
    let form2 = vec![FormTerm::new(Complex64::new(1.0, 0.0), vec![-1, 0])];
    let i11 = TwistedIntegrand::new(&a, &e, &phase, form1.clone())?;
    let i12 = TwistedIntegrand::new(&a, &e, &phase, form2.clone())?;

    let bounded1 = integrate_chain(&i11, &chain, 1e-10)?.value;
    let bounded2 = integrate_chain(&i12, &chain, 1e-10)?.value;
    let unbounded1 = integrate_unbounded_tail(&i11, &[0.0], &[1.0], 1e-10)?;
    let unbounded2 = integrate_unbounded_tail(&i12, &[0.0], &[1.0], 1e-10)?;

    let af = c64r(alpha);
    let gf = c64r(gamma_p);
    let oracle = beta_fn(af, gf - af) * kummer_1f1(af, gf, -c64r(x))?;
    let det = bounded1 * unbounded2 - bounded2 * unbounded1;
    Ok(KummerReport {
        bounded: ResidualReport::new(bounded1, oracle),
        unbounded_value: unbounded1,
        period_matrix: [[bounded1, bounded2], [unbounded1, unbounded2]],
        det,
    })
}

// ---------------------------------------------------------------------------
// ODE residuals
// ---------------------------------------------------------------------------

/// Which first-order system the period vector is checked against.
#[derive(Debug, Clone)]
pub enum OdeSystem {
    /// `d/dx (z₁, z₂) = [[ (γ−α−β)/(x−1), (β−γ)/(x−1) ], [ (γ−α)/x, −γ/x ]]`
    Gauss { alpha: Rat, beta: Rat, gamma: Rat },
    /// `d/dx (y₁, y₂) = [[ −1, 1 ], [ (γ−α)/x, −γ/x ]]`
    Kummer {
        alpha: Rat,
        gamma: Rat,
        cycle: KummerCycle,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KummerCycle {
    Bounded,
    Unbounded,
}

/// Period vector `(∫ Φ ω₁, ∫ Φ ω₂)` at parameter x, with
/// `ω₁ = dt/(t(1−t))`, `ω₂ = dt/t`.
fn period_vector(system: &OdeSystem, x: &Rat) -> Result<[Complex64; 2], ValidationError> {
    match system {
        OdeSystem::Gauss { alpha, beta, gamma } => {
            let p = EulerParams::new(alpha.clone(), beta.clone(), gamma.clone(), x.clone());
            let (a, e, chain) = unit_interval_chain(&p, true)?;
            let n = a.len();
            let mut pw1 = vec![0i64; n];
            pw1[0] = -1;
            pw1[1] = -1;
            let mut pw2 = vec![0i64; n];
            pw2[0] = -1;
            let i1 = TwistedIntegrand::new(
                &a,
                &e,
                &Phase::None,
                vec![FormTerm::new(Complex64::new(1.0, 0.0), pw1)],
            )?;
            let i2 = TwistedIntegrand::new(
                &a,
                &e,
                &Phase::None,
                vec![FormTerm::new(Complex64::new(1.0, 0.0), pw2)],
            )?;
            Ok([
                integrate_chain(&i1, &chain, 1e-11)?.value,
                integrate_chain(&i2, &chain, 1e-11)?.value,
            ])
        }
        OdeSystem::Kummer {
            alpha,
            gamma,
            cycle,
        } => {
            let p = EulerParams::new(alpha.clone(), rat_i(0), gamma.clone(), rat_i(0));
            let (a, e, chain) = unit_interval_chain(&p, false)?;
            let f = AffineFunctional::new(vec![rat_i(0), x.clone()])?;
            let phase = Phase::Linear(f);
            let i1 = TwistedIntegrand::new(
                &a,
                &e,
                &phase,
                vec![FormTerm::new(Complex64::new(1.0, 0.0), vec![-1, -1])],
            )?;
            let i2 = TwistedIntegrand::new(
                &a,
                &e,
                &phase,
                vec![FormTerm::new(Complex64::new(1.0, 0.0), vec![-1, 0])],
            )?;
            match cycle {
                KummerCycle::Bounded => Ok([
                    integrate_chain(&i1, &chain, 1e-11)?.value,
                    integrate_chain(&i2, &chain, 1e-11)?.value,
                ]),
                KummerCycle::Unbounded => Ok([
                    integrate_unbounded_tail(&i1, &[0.0], &[1.0], 1e-11)?,
                    integrate_unbounded_tail(&i2, &[0.0], &[1.0], 1e-11)?,
                ]),
            }
        }
    }
}

fn ode_matrix(system: &OdeSystem, x: f64) -> [[Complex64; 2]; 2] {
    let c = |v: f64| Complex64::new(v, 0.0);
    match system {
        OdeSystem::Gauss { alpha, beta, gamma } => {
            let (af, bf, gf) = (rat_to_f64(alpha), rat_to_f64(beta), rat_to_f64(gamma));
            [
                [c((gf - af - bf) / (x - 1.0)), c((bf - gf) / (x - 1.0))],
                [c((gf - af) / x), c(-gf / x)],
            ]
        }
        OdeSystem::Kummer { alpha, gamma, .. } => {
            let (af, gf) = (rat_to_f64(alpha), rat_to_f64(gamma));
            [
                [c(-1.0), c(1.0)],
                [c((gf - af) / x), c(-gf / x)],
            ]
        }
    }
}

/// Relative residual `‖dZ/dx − M(x₀)Z(x₀)‖ / ‖M(x₀)Z(x₀)‖` with the
/// derivative from the 5-point Richardson stencil at spacing h.
pub fn ode_residual(system: &OdeSystem, x0: &Rat, h: &Rat) -> Result<f64, ValidationError> {
    let xm2 = x0 - h * rat_i(2);
    let xm1 = x0 - h;
    let xp1 = x0 + h;
    let xp2 = x0 + h * rat_i(2);
    let zm2 = period_vector(system, &xm2)?;
    let zm1 = period_vector(system, &xm1)?;
    let zp1 = period_vector(system, &xp1)?;
    let zp2 = period_vector(system, &xp2)?;
    let z0 = period_vector(system, x0)?;
    let hf = rat_to_f64(h);
    let x0f = rat_to_f64(x0);
    let m = ode_matrix(system, x0f);
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for i in 0..2 {
        let dz = (zm2[i] - 8.0 * zm1[i] + 8.0 * zp1[i] - zp2[i]) / (12.0 * hf);
        let mz = m[i][0] * z0[0] + m[i][1] * z0[1];
        num += (dz - mz).norm_sqr();
        den += mz.norm_sqr();
    }
    Ok((num / den.max(f64::MIN_POSITIVE)).sqrt())
}

// ---------------------------------------------------------------------------
// Confluence
// ---------------------------------------------------------------------------

/// Gaps between the Gauss-side period at `(β, x) = (1/ε, −ε x̃)` and the
/// Kummer-side period, along a decreasing ε sequence. The limit statement
/// is qualitative: the report records the gaps, no rate is asserted.
#[derive(Debug, Clone)]
pub struct ConfluenceReport {
    pub epsilons: Vec<Rat>,
    pub gaps: Vec<f64>,
    pub kummer_value: Complex64,
}

impl ConfluenceReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.gaps.windows(2).all(|w| w[1] < w[0])
    }
}

pub fn confluence_check(
    alpha: &Rat,
    gamma_p: &Rat,
    x_tilde: &Rat,
    epsilons: &[Rat],
) -> Result<ConfluenceReport, ValidationError> {
    // Kummer-side period over the bounded cycle
    let p0 = EulerParams::new(alpha.clone(), rat_i(0), gamma_p.clone(), rat_i(0));
    let (a, e, chain) = unit_interval_chain(&p0, false)?;
    let f = AffineFunctional::new(vec![rat_i(0), x_tilde.clone()])?;
    let ik = TwistedIntegrand::new(
        &a,
        &e,
        &Phase::Linear(f),
        vec![FormTerm::new(Complex64::new(1.0, 0.0), vec![-1, -1])],
    )?;
    let kummer_value = integrate_chain(&ik, &chain, 1e-10)?.value;

    let mut gaps = Vec::with_capacity(epsilons.len());
    for eps in epsilons {
        assert!(eps > &Rat::zero(), "ε must be positive");
        // Gauss side with β = 1/ε and x = −ε·x̃, evaluated through the
        // integral representation (the series would need extreme β)
        let beta = Rat::one() / eps;
        let x = -(eps * x_tilde);
        let p = EulerParams::new(alpha.clone(), beta, gamma_p.clone(), x);
        let (ag, eg, chain_g) = unit_interval_chain(&p, true)?;
        let n = ag.len();
        let mut powers = vec![0i64; n];
        powers[0] = -1;
        powers[1] = -1;
        let ig = TwistedIntegrand::new(
            &ag,
            &eg,
            &Phase::None,
            vec![FormTerm::new(Complex64::new(1.0, 0.0), powers)],
        )?;
        let gauss_value = integrate_chain(&ig, &chain_g, 1e-10)?.value;
        gaps.push((gauss_value - kummer_value).norm());
    }
    Ok(ConfluenceReport {
        epsilons: epsilons.to_vec(),
        gaps,
        kummer_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn gamma_special_values() {
        assert!((gamma(c(0.5)) - c(std::f64::consts::PI.sqrt())).norm() < 1e-13);
        assert!((gamma(c(4.0)) - c(6.0)).norm() < 1e-13);
        assert!((gamma(c(1.0)) - c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn gamma_functional_equations() {
        // recurrence Γ(z+1) = zΓ(z) and reflection Γ(z)Γ(1−z) = π/sin(πz)
        for &(re, im) in &[(0.3, 0.0), (1.7, 0.4), (2.5, -1.2), (0.9, 2.0)] {
            let z = Complex64::new(re, im);
            let lhs = gamma(z + 1.0);
            let rhs = z * gamma(z);
            assert!((lhs - rhs).norm() < 1e-13 * rhs.norm(), "recurrence at {z}");
            let refl = gamma(z) * gamma(Complex64::new(1.0, 0.0) - z);
            let expected = std::f64::consts::PI / (std::f64::consts::PI * z).sin();
            assert!(
                (refl - expected).norm() < 1e-12 * expected.norm(),
                "reflection at {z}"
            );
        }
    }

    #[test]
    fn series_basic_values() {
        let p = HgParams {
            alpha: c(0.7),
            beta: c(-0.3),
            gamma: c(1.9),
            x: c(0.0),
        };
        assert_eq!(gauss_2f1(&p).unwrap(), c(1.0));
        // ₂F₁(1,1;2;x) = −log(1−x)/x at x = 1/2
        let p = HgParams {
            alpha: c(1.0),
            beta: c(1.0),
            gamma: c(2.0),
            x: c(0.5),
        };
        let v = gauss_2f1(&p).unwrap();
        assert!((v - c(2.0 * 2.0f64.ln())).norm() < 1e-14);
        // ₁F₁(1;2;z) = (e^z − 1)/z at z = 1
        let v = kummer_1f1(c(1.0), c(2.0), c(1.0)).unwrap();
        assert!((v - c(std::f64::consts::E - 1.0)).norm() < 1e-14);
        assert_eq!(kummer_1f1(c(0.5), c(1.5), c(0.0)).unwrap(), c(1.0));
        // preconditions
        let bad = HgParams {
            alpha: c(1.0),
            beta: c(1.0),
            gamma: c(2.0),
            x: c(0.95),
        };
        assert!(gauss_2f1(&bad).is_err());
        assert!(kummer_1f1(c(1.0), c(-2.0), c(1.0)).is_err());
    }

    #[test]
    fn contiguous_relations() {
        // c·M(a; c; z) − c·M(a−1; c; z) − z·M(a; c+1; z) = 0
        let (a, cc, z) = (c(0.7), c(1.3), Complex64::new(0.8, 0.3));
        let lhs = cc * kummer_1f1(a, cc, z).unwrap()
            - cc * kummer_1f1(a - 1.0, cc, z).unwrap()
            - z * kummer_1f1(a, cc + 1.0, z).unwrap();
        assert!(lhs.norm() < 1e-12, "Kummer contiguous: {lhs}");

        // F(a,b;c;x) − F(a−1,b;c;x) − (bx/c)·F(a,b+1;c+1;x) = 0
        let (a, b, cc, x) = (c(0.7), c(0.4), c(1.3), Complex64::new(0.35, 0.1));
        let f = |al, be, ga| {
            gauss_2f1(&HgParams {
                alpha: al,
                beta: be,
                gamma: ga,
                x,
            })
            .unwrap()
        };
        let lhs = f(a, b, cc) - f(a - 1.0, b, cc) - (b * x / cc) * f(a, b + 1.0, cc + 1.0);
        assert!(lhs.norm() < 1e-12, "Gauss contiguous: {lhs}");
    }

    #[test]
    fn euler_integral_reference_point() {
        // (α, β, γ, x) = (1/2, 1/3, 3/2, 1/4)
        let p = EulerParams::new(rat(1, 2), rat(1, 3), rat(3, 2), rat(1, 4));
        let r = verify_euler_integral(&p).unwrap();
        assert!(r.relative_residual < 1e-8, "residual {}", r.relative_residual);
    }

    #[test]
    fn euler_integral_beta_case() {
        // β = 0: the integral is B(α, γ−α) and ₂F₁ = 1
        let p = EulerParams::new(rat(1, 2), rat_i(0), rat(3, 2), rat(1, 4));
        let r = verify_euler_integral(&p).unwrap();
        assert!(r.relative_residual < 1e-10, "residual {}", r.relative_residual);
    }

    #[test]
    fn euler_integral_regularized_only() {
        // α = −1/2 diverges as a naive integral; the regularized cycle
        // matches the analytically continued B·₂F₁
        let p = EulerParams::new(rat(-1, 2), rat(1, 3), rat(3, 2), rat(1, 4));
        let r = verify_euler_integral(&p).unwrap();
        assert!(r.relative_residual < 1e-8, "residual {}", r.relative_residual);
    }

    #[test]
    fn kummer_integral_reference_point() {
        let r = verify_kummer_integral(&rat(1, 2), &rat(3, 2), &rat_i(1)).unwrap();
        assert!(
            r.bounded.relative_residual < 1e-8,
            "residual {}",
            r.bounded.relative_residual
        );
        assert!(r.det.norm() > 1e-10, "period matrix rank 2, det {}", r.det);
        // x → 0 limit: value/B → 1
        let r0 = verify_kummer_integral(&rat(1, 2), &rat(3, 2), &rat(1, 1000)).unwrap();
        let b = beta_fn(c(0.5), c(1.0));
        assert!((r0.bounded.period / b - c(1.0)).norm() < 1e-2);
    }

    #[test]
    fn ode_residual_gauss() {
        let system = OdeSystem::Gauss {
            alpha: rat(1, 2),
            beta: rat(1, 3),
            gamma: rat(3, 2),
        };
        let r = ode_residual(&system, &rat(1, 4), &rat(1, 1000)).unwrap();
        assert!(r < 1e-6, "Gauss ODE residual {r}");
    }

    #[test]
    fn ode_residual_kummer_both_cycles() {
        let bounded = OdeSystem::Kummer {
            alpha: rat(1, 2),
            gamma: rat(3, 2),
            cycle: KummerCycle::Bounded,
        };
        let r = ode_residual(&bounded, &rat_i(1), &rat(1, 1000)).unwrap();
        assert!(r < 1e-6, "Kummer bounded ODE residual {r}");
        let unbounded = OdeSystem::Kummer {
            alpha: rat(1, 2),
            gamma: rat(3, 2),
            cycle: KummerCycle::Unbounded,
        };
        let r = ode_residual(&unbounded, &rat_i(1), &rat(1, 1000)).unwrap();
        assert!(r < 1e-6, "Kummer unbounded ODE residual {r}");
    }

    #[test]
    fn ode_residual_fourth_order() {
        let system = OdeSystem::Gauss {
            alpha: rat(1, 2),
            beta: rat(1, 3),
            gamma: rat(3, 2),
        };
        let r1 = ode_residual(&system, &rat(1, 4), &rat(1, 250)).unwrap();
        let r2 = ode_residual(&system, &rat(1, 4), &rat(1, 500)).unwrap();
        // O(h⁴): halving h gains ~16×; allow slack for quadrature noise
        assert!(r2 < r1 / 8.0, "h-halving: {r1} → {r2}");
    }

    #[test]
    fn pointwise_confluence_limit() {
        // (1 + ε x̃ t)^{−1/ε} → e^{−x̃ t}; at ε = 1/256, t = x̃ = 1
        let eps = 1.0 / 256.0;
        let lhs = (1.0f64 + eps).powf(-1.0 / eps);
        let rel = ((lhs - (-1.0f64).exp()) / (-1.0f64).exp()).abs();
        assert!(rel < 3e-3, "pointwise gap {rel}");
    }

    #[test]
    fn confluence_gaps_decrease() {
        let eps: Vec<Rat> = vec![rat(1, 16), rat(1, 64), rat(1, 256)];
        let report = confluence_check(&rat(1, 2), &rat(3, 2), &rat_i(1), &eps).unwrap();
        assert!(
            report.strictly_decreasing(),
            "gaps {:?} should strictly decrease",
            report.gaps
        );
    }
}
