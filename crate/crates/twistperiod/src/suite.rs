//! Built-in verification battery: independent oracles (brute-force scans,
//! closed-form counts, series identities) exercised against the library,
//! one pass/fail line per criterion. Run it via `twistperiod verify-suite`
//! or through the `acceptance` integration test.

use crate::chambers::{
    enumerate_chambers, general_position_bounded, general_position_total, morse_critical_points,
    schlafli_bounded_count,
};
use crate::connection::{is_asymptotically_generic, is_generic, ExponentData};
use crate::field::{rat, rat_i, rat_to_f64, CRat, Rat, Sign};
use crate::geometry::{
    sign_vector_feasible, AffineFunctional, Arrangement, Hyperplane, SignVector,
};
use crate::quadrature::{integrate_chain, FormTerm, TwistedIntegrand};
use crate::rdbasis::{rank_cross_check, Phase, PhaseSpec, RadiusSpec};
use crate::regularization::{
    regularize_bounded_scaled, regularize_truncated_scaled, rotate_loop_starts, CellGeometry,
    CutoffSpec,
};
use crate::validation::{
    confluence_check, ode_residual, verify_euler_integral, verify_kummer_integral, EulerParams,
    KummerCycle, OdeSystem,
};
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub mod oracles {
    use super::*;

    /// Exhaustive 2^N sign-vector feasibility scan; the independent oracle
    /// for chamber enumeration. Returns realized zero-free sign vectors in
    /// lexicographic order.
    pub fn brute_force_chambers(a: &Arrangement<Rat>) -> Vec<SignVector> {
        use rayon::prelude::*;
        let n = a.len();
        let mut out: Vec<SignVector> = (0..(1u32 << n))
            .into_par_iter()
            .filter_map(|mask| {
                let signs: Vec<Sign> = (0..n)
                    .map(|j| {
                        if mask & (1 << j) != 0 {
                            Sign::Pos
                        } else {
                            Sign::Neg
                        }
                    })
                    .collect();
                let sv = SignVector(signs);
                sign_vector_feasible(a, &sv)
                    .expect("valid sign vector")
                    .map(|_| sv)
            })
            .collect();
        out.sort();
        out
    }

    /// Random arrangement with small integer coefficients; hyperplanes are
    /// pairwise distinct as projective covectors by construction.
    pub fn random_arrangement(rng: &mut ChaCha8Rng, dim: usize, count: usize) -> Arrangement<Rat> {
        let mut hyperplanes: Vec<Hyperplane<Rat>> = Vec::new();
        let mut guard = 0;
        while hyperplanes.len() < count {
            guard += 1;
            assert!(guard < 10_000, "random arrangement generation stalled");
            let coeffs: Vec<Rat> = (0..=dim).map(|_| rat_i(rng.gen_range(-6..=6))).collect();
            if coeffs[1..].iter().all(|c| c.is_zero()) {
                continue;
            }
            let label = format!("A{}", hyperplanes.len() + 1);
            let h = Hyperplane::new(coeffs, label).expect("nonzero normal");
            let mut trial = hyperplanes.clone();
            trial.push(h);
            if Arrangement::new(dim, trial.clone()).is_ok() {
                hyperplanes = trial;
            }
        }
        Arrangement::new(dim, hyperplanes).expect("distinct by construction")
    }

    /// Random arrangement in general position (coned Boolean check passes).
    pub fn random_general_position(
        rng: &mut ChaCha8Rng,
        dim: usize,
        count: usize,
    ) -> Arrangement<Rat> {
        loop {
            let a = random_arrangement(rng, dim, count);
            if crate::geometry::is_boolean_through_origin(&a, crate::geometry::BooleanMode::Coned)
            {
                return a;
            }
        }
    }

    /// Random non-integer rational exponent in [−3/2, 3/2].
    pub fn random_exponent(rng: &mut ChaCha8Rng) -> Rat {
        loop {
            let q = rng.gen_range(2..=5i64);
            let p = rng.gen_range(-(3 * q) / 2..=(3 * q) / 2);
            let r = rat(p, q);
            if !r.denom().is_one() {
                return r;
            }
        }
    }

    /// Exact brute-force count of the arcs into which N lines cut a large
    /// circle: an independent check of the hypersphere chamber count in the
    /// plane. Returns `None` when the circle is too small or degenerate
    /// incidences occur (caller retries with a bigger radius).
    ///
    /// Arcs on a circle equal the number of line-circle intersection points
    /// provided those points are pairwise distinct; both facts are decided
    /// by exact rational predicates (discriminants and shared-point tests).
    pub fn circle_arc_count(a: &Arrangement<Rat>, r_squared: &Rat) -> Option<usize> {
        assert_eq!(a.dim, 2);
        let mut points = 0usize;
        for h in &a.hyperplanes {
            // line c0 + c1 x + c2 y = 0 meets x² + y² = R² iff
            // c0² < R²(c1² + c2²)
            let c0 = &h.coeffs[0];
            let c1 = &h.coeffs[1];
            let c2 = &h.coeffs[2];
            let norm2 = c1 * c1 + c2 * c2;
            let disc = r_squared * &norm2 - c0 * c0;
            if disc <= Rat::zero() {
                return None; // line misses or is tangent: R too small
            }
            points += 2;
        }
        // a shared intersection point of two lines lying exactly on the
        // circle would merge two arcs; detect and reject
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                let rows = vec![
                    a.hyperplanes[i].normal().to_vec(),
                    a.hyperplanes[j].normal().to_vec(),
                ];
                if crate::geometry::rank(&rows) < 2 {
                    continue;
                }
                let rhs = vec![
                    -a.hyperplanes[i].constant().clone(),
                    -a.hyperplanes[j].constant().clone(),
                ];
                if let Some(p) = crate::geometry::solve_square(&rows, &rhs) {
                    let norm = &p[0] * &p[0] + &p[1] * &p[1];
                    if &norm == r_squared {
                        return None;
                    }
                }
            }
        }
        Some(points)
    }
}

pub use oracles::brute_force_chambers;

/// Seeded RNG so every verification run is reproducible.
pub fn suite_rng(salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x7769_7374 ^ salt)
}

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub name: String,
    pub pass: bool,
    pub details: String,
}

impl CriterionResult {
    pub fn new(name: &str, pass: bool, details: String) -> Self {
        CriterionResult {
            name: name.to_string(),
            pass,
            details,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "[{}] {} — {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.details
        )
    }
}

fn fail(name: &str, details: String) -> CriterionResult {
    CriterionResult::new(name, false, details)
}

fn pass(name: &str, details: String) -> CriterionResult {
    CriterionResult::new(name, true, details)
}

/// Criterion 1: incremental enumeration matches the 2^N brute-force scan on
/// 50 random rational arrangements with n ≤ 3, N ≤ 8.
pub fn criterion_chamber_oracle() -> CriterionResult {
    let name = "chamber oracle equivalence";
    let mut rng = suite_rng(1);
    for instance in 0..50 {
        let dim = rng.gen_range(1..=3usize);
        let count = rng.gen_range(1..=8usize);
        let a = oracles::random_arrangement(&mut rng, dim, count);
        let census = match enumerate_chambers(&a) {
            Ok(c) => c,
            Err(e) => return fail(name, format!("enumeration failed: {e}")),
        };
        let incremental: Vec<SignVector> =
            census.chambers.iter().map(|c| c.sign.clone()).collect();
        let brute = oracles::brute_force_chambers(&a);
        if incremental != brute {
            return fail(
                name,
                format!(
                    "mismatch on instance {instance}: incremental {} vs brute-force {}",
                    incremental.len(),
                    brute.len()
                ),
            );
        }
    }
    pass(name, "50/50 random arrangements agree with the 2^N scan".into())
}

/// Criterion 2: exact general-position counts on 20 random instances.
pub fn criterion_general_position_counts() -> CriterionResult {
    let name = "general-position counts";
    let mut rng = suite_rng(2);
    for instance in 0..20 {
        let dim = rng.gen_range(1..=3usize);
        let count = rng.gen_range(dim + 1..=8usize);
        let a = oracles::random_general_position(&mut rng, dim, count);
        let census = match enumerate_chambers(&a) {
            Ok(c) => c,
            Err(e) => return fail(name, format!("enumeration failed: {e}")),
        };
        let want_total = general_position_total(count as u64, dim as u64);
        let want_bounded = general_position_bounded(count as u64, dim as u64);
        if census.n_total as u128 != want_total || census.n_bounded as u128 != want_bounded {
            return fail(
                name,
                format!(
                    "instance {instance} (n={dim}, N={count}): got ({}, {}), formulas ({}, {})",
                    census.n_total, census.n_bounded, want_total, want_bounded
                ),
            );
        }
    }
    pass(
        name,
        "n_total = Σ C(N,i) and n_bounded = C(N−1,n) on 20/20 instances".into(),
    )
}

/// Criterion 3: the hypersphere count M(N,2) = 2N against exact brute-force
/// arc counting on a circle, N = 2..6, plus formula spot values.
pub fn criterion_schlafli() -> CriterionResult {
    let name = "Schläfli hypersphere count";
    if schlafli_bounded_count(3, 2) != 6 || schlafli_bounded_count(1, 1) != 2 {
        return fail(name, "closed-form spot values are wrong".into());
    }
    let mut rng = suite_rng(3);
    for count in 2..=6usize {
        let a = oracles::random_general_position(&mut rng, 2, count);
        // grow the circle until every line cuts it cleanly
        let mut r2 = rat_i(100);
        let mut arcs = None;
        for _ in 0..40 {
            arcs = oracles::circle_arc_count(&a, &r2);
            if arcs.is_some() {
                break;
            }
            r2 *= rat_i(4);
        }
        let Some(arcs) = arcs else {
            return fail(name, format!("no valid circle found for N={count}"));
        };
        let m = schlafli_bounded_count(count as u64, 2);
        if arcs as u128 != m || m != 2 * count as u128 {
            return fail(
                name,
                format!("N={count}: arcs {arcs}, formula {m}, expected {}", 2 * count),
            );
        }
    }
    pass(name, "arc counts equal M(N,2) = 2N for N = 2..6 (exact)".into())
}

fn generic_exponents(
    rng: &mut ChaCha8Rng,
    a: &Arrangement<Rat>,
    f: Option<&AffineFunctional<Rat>>,
) -> Option<ExponentData> {
    for _ in 0..200 {
        let alphas: Vec<CRat> = (0..a.len())
            .map(|_| CRat::from_rat(oracles::random_exponent(rng)))
            .collect();
        let e = ExponentData::rank1(alphas);
        if !is_generic(a, &e).is_generic() {
            continue;
        }
        if let Some(f) = f {
            match is_asymptotically_generic(a, &e, f) {
                Ok(v) if v.is_generic() => return Some(e),
                _ => continue,
            }
        }
        return Some(e);
    }
    None
}

/// Criterion 4: rank identities. Linear rank = b(A) + b(slice), quadratic
/// rank = n_total = b(A) + M(N,n); the Kummer configuration has rank 2.
pub fn criterion_rank_identities() -> CriterionResult {
    let name = "rank identities";
    let mut rng = suite_rng(4);

    // Kummer, rank 2
    let kummer = crate::geometry::arrangement_from_rows(1, &[vec![0, 1], vec![-1, 1]]);
    let e = ExponentData::rank1(vec![CRat::from_rat(rat(1, 2)), CRat::from_rat(rat(1, 3))]);
    let f = AffineFunctional::new(vec![rat_i(0), rat_i(1)]).unwrap();
    match rank_cross_check(&kummer, &e, &PhaseSpec::linear(f)) {
        Ok(r) if r.basis_rank == 2 => {}
        Ok(r) => return fail(name, format!("Kummer rank {} ≠ 2", r.basis_rank)),
        Err(e) => return fail(name, format!("Kummer cross-check failed: {e}")),
    }

    // random linear-phase instances (slice enumeration runs over ℚ(R))
    let mut linear_checked = 0;
    for _ in 0..40 {
        if linear_checked >= 5 {
            break;
        }
        let dim = rng.gen_range(1..=2usize);
        let count = rng.gen_range(dim + 1..=5usize);
        let a = oracles::random_general_position(&mut rng, dim, count);
        let mut fc: Vec<Rat> = vec![rat_i(0)];
        for _ in 0..dim {
            fc.push(rat_i(rng.gen_range(-3..=3)));
        }
        let Ok(f) = AffineFunctional::new(fc) else {
            continue;
        };
        let Some(e) = generic_exponents(&mut rng, &a, Some(&f)) else {
            continue;
        };
        match rank_cross_check(&a, &e, &PhaseSpec::linear(f)) {
            Ok(r) if r.pass => linear_checked += 1,
            Ok(_) => return fail(name, "linear rank mismatch".into()),
            Err(crate::rdbasis::RdBasisError::RankMismatch { .. }) => {
                return fail(name, "linear rank mismatch".into())
            }
            Err(_) => continue, // degenerate draw (e.g. ambiguous truncation)
        }
    }
    if linear_checked < 5 {
        return fail(name, format!("only {linear_checked}/5 linear instances checked"));
    }

    // random quadratic instances: rank = n_total = b + M
    let mut quad_checked = 0;
    for _ in 0..40 {
        if quad_checked >= 5 {
            break;
        }
        let dim = rng.gen_range(1..=3usize);
        let count = rng.gen_range(dim + 1..=6usize);
        let a = oracles::random_general_position(&mut rng, dim, count);
        let Some(e) = generic_exponents(&mut rng, &a, None) else {
            continue;
        };
        match rank_cross_check(&a, &e, &PhaseSpec::quadratic()) {
            Ok(r) if r.pass => {
                let total = enumerate_chambers(&a).unwrap().n_total;
                if r.basis_rank != total {
                    return fail(name, "quadratic rank ≠ census total".into());
                }
                quad_checked += 1;
            }
            Ok(_) | Err(crate::rdbasis::RdBasisError::RankMismatch { .. }) => {
                return fail(name, "quadratic rank mismatch".into())
            }
            Err(_) => continue,
        }
    }
    if quad_checked < 5 {
        return fail(name, format!("only {quad_checked}/5 quadratic instances checked"));
    }
    pass(
        name,
        "Kummer rank 2; 5 linear and 5 quadratic random instances match b(A) + b(fiber)".into(),
    )
}

/// Criterion 5: one Morse critical point per bounded chamber, strictly
/// interior, with gradient norm below 1e−12, on 10 instances.
pub fn criterion_morse() -> CriterionResult {
    let name = "Morse critical points";
    let mut rng = suite_rng(5);
    let mut checked = 0;
    while checked < 10 {
        let dim = rng.gen_range(1..=2usize);
        let count = rng.gen_range(dim + 1..=6usize);
        let a = oracles::random_general_position(&mut rng, dim, count);
        let census = enumerate_chambers(&a).unwrap();
        if census.n_bounded == 0 {
            continue;
        }
        let eta: Vec<Rat> = (0..a.len()).map(|_| rat_i(rng.gen_range(1..=4))).collect();
        let pts = match morse_critical_points(&a, &eta) {
            Ok(p) => p,
            Err(e) => return fail(name, format!("Newton failed: {e}")),
        };
        if pts.len() != census.n_bounded {
            return fail(
                name,
                format!("{} critical points for {} bounded chambers", pts.len(), census.n_bounded),
            );
        }
        // interior + converged-gradient checks
        let coeffs: Vec<Vec<f64>> = a
            .hyperplanes
            .iter()
            .map(|h| h.coeffs.iter().map(rat_to_f64).collect())
            .collect();
        let eta_f: Vec<f64> = eta.iter().map(rat_to_f64).collect();
        for (point, id) in &pts {
            let chamber = census.chambers.iter().find(|c| c.id == *id).unwrap();
            let mut grad = vec![0.0; dim];
            for (j, row) in coeffs.iter().enumerate() {
                let val =
                    row[0] + row[1..].iter().zip(point).map(|(c, x)| c * x).sum::<f64>();
                if val * chamber.sign.0[j].factor() as f64 <= 0.0 {
                    return fail(name, format!("critical point escapes chamber {id}"));
                }
                for i in 0..dim {
                    grad[i] += eta_f[j] * row[1 + i] / val;
                }
            }
            let gn = grad.iter().map(|x| x * x).sum::<f64>().sqrt();
            if gn >= 1e-12 {
                return fail(name, format!("gradient norm {gn:.2e} at chamber {id}"));
            }
        }
        checked += 1;
    }
    pass(name, "10/10 instances: count = n_bounded, interior, ‖∇F‖ < 1e−12".into())
}

/// Criterion 6: Euler ₂F₁ integral, reference point, regularized-only
/// negative exponent, and a 10-point random sweep, all below 1e−8.
pub fn criterion_euler() -> CriterionResult {
    let name = "Euler integral (2F1)";
    let reference = EulerParams::new(rat(1, 2), rat(1, 3), rat(3, 2), rat(1, 4));
    match verify_euler_integral(&reference) {
        Ok(r) if r.relative_residual < 1e-8 => {}
        Ok(r) => return fail(name, format!("reference residual {:.2e}", r.relative_residual)),
        Err(e) => return fail(name, format!("reference failed: {e}")),
    }
    let negative = EulerParams::new(rat(-1, 2), rat(1, 3), rat(3, 2), rat(1, 4));
    match verify_euler_integral(&negative) {
        Ok(r) if r.relative_residual < 1e-8 => {}
        Ok(r) => return fail(name, format!("negative-exponent residual {:.2e}", r.relative_residual)),
        Err(e) => return fail(name, format!("negative-exponent case failed: {e}")),
    }
    let mut rng = suite_rng(6);
    let mut worst: f64 = 0.0;
    let mut swept = 0;
    while swept < 10 {
        let alpha = oracles::random_exponent(&mut rng);
        let gamma_minus_alpha = oracles::random_exponent(&mut rng);
        let gamma = &alpha + &gamma_minus_alpha;
        let beta = rat(rng.gen_range(-3..=3), 2);
        let x = rat(rng.gen_range(-4..=4i64), 8);
        let p = EulerParams::new(alpha, beta, gamma, x);
        match verify_euler_integral(&p) {
            Ok(r) => {
                worst = worst.max(r.relative_residual);
                if r.relative_residual >= 1e-8 {
                    return fail(
                        name,
                        format!("sweep residual {:.2e} at {:?}", r.relative_residual, p),
                    );
                }
                swept += 1;
            }
            Err(_) => continue, // e.g. γ hit a pole; redraw
        }
    }
    pass(
        name,
        format!("reference, analytic continuation, and 10-point sweep ≤ {worst:.2e} (< 1e−8)"),
    )
}

/// Criterion 7: Kummer ₁F₁ bounded-cycle residual and period-matrix rank.
pub fn criterion_kummer() -> CriterionResult {
    let name = "Kummer integral (1F1)";
    match verify_kummer_integral(&rat(1, 2), &rat(3, 2), &rat_i(1)) {
        Ok(r) => {
            if r.bounded.relative_residual >= 1e-8 {
                return fail(name, format!("residual {:.2e}", r.bounded.relative_residual));
            }
            if r.det.norm() <= 1e-10 {
                return fail(name, format!("period matrix |det| = {:.2e}", r.det.norm()));
            }
            pass(
                name,
                format!(
                    "residual {:.2e} < 1e−8, |det| = {:.2e} > 1e−10",
                    r.bounded.relative_residual,
                    r.det.norm()
                ),
            )
        }
        Err(e) => fail(name, format!("verification failed: {e}")),
    }
}

/// Criterion 8: both ODE systems satisfied to 1e−6 via 5-point Richardson
/// at h = 1e−3, with the O(h⁴) decay observed under halving.
pub fn criterion_ode() -> CriterionResult {
    let name = "ODE systems";
    let gauss = OdeSystem::Gauss {
        alpha: rat(1, 2),
        beta: rat(1, 3),
        gamma: rat(3, 2),
    };
    let h = rat(1, 1000);
    let rg = match ode_residual(&gauss, &rat(1, 4), &h) {
        Ok(r) => r,
        Err(e) => return fail(name, format!("Gauss system failed: {e}")),
    };
    if rg >= 1e-6 {
        return fail(name, format!("Gauss residual {rg:.2e}"));
    }
    for cycle in [KummerCycle::Bounded, KummerCycle::Unbounded] {
        let system = OdeSystem::Kummer {
            alpha: rat(1, 2),
            gamma: rat(3, 2),
            cycle,
        };
        match ode_residual(&system, &rat_i(1), &h) {
            Ok(r) if r < 1e-6 => {}
            Ok(r) => return fail(name, format!("Kummer {cycle:?} residual {r:.2e}")),
            Err(e) => return fail(name, format!("Kummer {cycle:?} failed: {e}")),
        }
    }
    // O(h⁴): halving h should gain roughly 16×; demand at least 8×
    let r1 = ode_residual(&gauss, &rat(1, 4), &rat(1, 250)).unwrap_or(f64::INFINITY);
    let r2 = ode_residual(&gauss, &rat(1, 4), &rat(1, 500)).unwrap_or(f64::INFINITY);
    if !(r2 < r1 / 8.0) {
        return fail(name, format!("no O(h⁴) decay: {r1:.2e} → {r2:.2e}"));
    }
    pass(
        name,
        format!("Gauss {rg:.2e} and Kummer (both cycles) < 1e−6; halving gains {:.1}×", r1 / r2),
    )
}

/// Criterion 9: loop transport reproduces multiplication by exp(2πiα)
/// within 1e−12 for α ∈ {1/2, 1/3, 1/4}.
pub fn criterion_monodromy() -> CriterionResult {
    let name = "monodromy/branch transport";
    let mut worst: f64 = 0.0;
    for den in [2i64, 3, 4] {
        let a = crate::geometry::arrangement_from_rows(1, &[vec![0, 1], vec![1, -1]]);
        let e = ExponentData::rank1(vec![
            CRat::from_rat(rat(1, den)),
            CRat::from_rat(rat(1, 5)),
        ]);
        let integrand = TwistedIntegrand::new(
            &a,
            &e,
            &Phase::None,
            vec![FormTerm::constant(Complex64::new(1.0, 0.0), 2)],
        )
        .expect("rank 1");
        let geometry = CellGeometry::Loop {
            center: Complex64::new(0.0, 0.0),
            anchor: Complex64::new(0.25, 0.0),
            wall: 0,
        };
        let mut args = vec![0.0, 0.0];
        let mut prev = vec![0.0];
        for k in 1..=8 {
            let here = vec![k as f64 / 8.0];
            if integrand.transport(&geometry, &prev, &here, &mut args).is_err() {
                return fail(name, "transport failed".into());
            }
            prev = here;
        }
        let z = geometry.point(&[1.0]);
        let ratio = integrand.value(&z, &args) / integrand.value(&z, &[0.0, 0.0]);
        let expected = crate::connection::exp_2pi_i(&CRat::from_rat(rat(1, den)));
        let err = (ratio - expected).norm();
        worst = worst.max(err);
        if err >= 1e-12 {
            return fail(name, format!("α = 1/{den}: transport error {err:.2e}"));
        }
    }
    pass(name, format!("worst transport error {worst:.2e} < 1e−12"))
}

/// Criterion 10: regularized-chain integrals are invariant under ε → ε/2
/// and under loop start-angle changes, within 10× the quadrature tolerance.
pub fn criterion_regularization_robustness() -> CriterionResult {
    let name = "regularization robustness";
    let tol = 1e-10;
    let bound = 10.0 * 1e-9; // 10× the practical chain accuracy at tol 1e−10

    // 1-D bounded chain (Beta type)
    let a = crate::geometry::arrangement_from_rows(1, &[vec![0, 1], vec![1, -1]]);
    let e = ExponentData::rank1(vec![CRat::from_rat(rat(1, 2)), CRat::from_rat(rat(1, 3))]);
    let census = enumerate_chambers(&a).unwrap();
    let chamber = census.bounded().next().unwrap().clone();
    let integrand = TwistedIntegrand::new(
        &a,
        &e,
        &Phase::None,
        vec![FormTerm::new(Complex64::new(1.0, 0.0), vec![-1, -1])],
    )
    .unwrap();
    let chain_full = regularize_bounded_scaled(&chamber, &a, &e, &Rat::one()).unwrap();
    let chain_half = regularize_bounded_scaled(&chamber, &a, &e, &rat(1, 2)).unwrap();
    let chain_rot = rotate_loop_starts(&chain_full, &a, 1.25);
    let v_full = integrate_chain(&integrand, &chain_full, tol).unwrap().value;
    let v_half = integrate_chain(&integrand, &chain_half, tol).unwrap().value;
    let v_rot = integrate_chain(&integrand, &chain_rot, tol).unwrap().value;
    let d_eps = (v_full - v_half).norm() / v_full.norm();
    let d_rot = (v_full - v_rot).norm() / v_full.norm();
    if d_eps >= bound || d_rot >= bound {
        return fail(name, format!("1-D drift: ε {d_eps:.2e}, rotation {d_rot:.2e}"));
    }

    // 1-D truncated chain with the linear phase
    let f = AffineFunctional::new(vec![rat_i(0), rat_i(1)]).unwrap();
    let basis = crate::rdbasis::rd_basis_linear(&a, &e, &f, &RadiusSpec::Auto).unwrap();
    let t = basis.truncation.as_ref().unwrap();
    let tc = &basis.truncated[0];
    let phase = Phase::Linear(f.clone());
    let integrand_k = TwistedIntegrand::new(
        &a,
        &e,
        &phase,
        vec![FormTerm::new(Complex64::new(1.0, 0.0), vec![-1, -1])],
    )
    .unwrap();
    let cut = CutoffSpec::AdaptiveTail { tol: 1e-16 };
    let tr_full =
        regularize_truncated_scaled(tc, &phase, &t.radius, &a, &e, cut, &Rat::one()).unwrap();
    let tr_half =
        regularize_truncated_scaled(tc, &phase, &t.radius, &a, &e, cut, &rat(1, 2)).unwrap();
    let w_full = integrate_chain(&integrand_k, &tr_full, tol).unwrap().value;
    let w_half = integrate_chain(&integrand_k, &tr_half, tol).unwrap().value;
    let d_trunc = (w_full - w_half).norm() / w_full.norm();
    if d_trunc >= bound {
        return fail(name, format!("truncated-chain ε drift {d_trunc:.2e}"));
    }

    // 2-D bounded chain (triangle), at the 2-D tolerance
    let t2 = crate::geometry::arrangement_from_rows(
        2,
        &[vec![0, 1, 0], vec![0, 0, 1], vec![1, -1, -1]],
    );
    let e2 = ExponentData::rank1(vec![
        CRat::from_rat(rat(1, 2)),
        CRat::from_rat(rat(1, 3)),
        CRat::from_rat(rat(1, 5)),
    ]);
    let census2 = enumerate_chambers(&t2).unwrap();
    let tri = census2.bounded().next().unwrap().clone();
    let i2 = TwistedIntegrand::new(
        &t2,
        &e2,
        &Phase::None,
        vec![FormTerm::new(Complex64::new(1.0, 0.0), vec![-1, -1, -1])],
    )
    .unwrap();
    let c_full = regularize_bounded_scaled(&tri, &t2, &e2, &Rat::one()).unwrap();
    let c_half = regularize_bounded_scaled(&tri, &t2, &e2, &rat(1, 2)).unwrap();
    let u_full = integrate_chain(&i2, &c_full, 1e-8).unwrap().value;
    let u_half = integrate_chain(&i2, &c_half, 1e-8).unwrap().value;
    let d2 = (u_full - u_half).norm() / u_full.norm();
    if d2 >= 10.0 * 1e-6 {
        return fail(name, format!("2-D ε drift {d2:.2e}"));
    }
    pass(
        name,
        format!("drifts: 1-D ε {d_eps:.1e}, rotation {d_rot:.1e}, truncated {d_trunc:.1e}, 2-D {d2:.1e}"),
    )
}

/// Criterion 11: the confluence gap strictly decreases along
/// ε = 1/16, 1/64, 1/256 for (α, γ, x̃) = (1/2, 3/2, 1).
pub fn criterion_confluence() -> CriterionResult {
    let name = "confluence";
    let eps = vec![rat(1, 16), rat(1, 64), rat(1, 256)];
    match confluence_check(&rat(1, 2), &rat(3, 2), &rat_i(1), &eps) {
        Ok(report) => {
            if report.strictly_decreasing() {
                pass(name, format!("gaps {:?} strictly decrease", report.gaps))
            } else {
                fail(name, format!("gaps {:?} do not decrease", report.gaps))
            }
        }
        Err(e) => fail(name, format!("confluence check failed: {e}")),
    }
}

/// Criterion 12: CLI end-to-end. The Kummer job exits 0 with a complete
/// report; a genericity-violating job exits 3 naming the hyperplane.
pub fn criterion_cli() -> CriterionResult {
    let name = "CLI end-to-end";
    let job = crate::cli::JobSpec {
        dim: 1,
        hyperplanes: vec![vec!["0".into(), "1".into()], vec!["-1".into(), "1".into()]],
        exponents: vec![["1/2".into(), "0".into()], ["1/3".into(), "0".into()]],
        phase: crate::cli::PhaseJson {
            kind: "linear".into(),
            f: Some(vec!["0".into(), "1".into()]),
            r: Some("auto".into()),
        },
        form: vec![crate::cli::FormJson {
            coeff: ["1".into(), "0".into()],
            powers: vec![-1, -1],
        }],
        tasks: vec![
            "chambers".into(),
            "basis".into(),
            "periods".into(),
            "verify".into(),
        ],
    };
    let (report, _, outcome) = crate::cli::run(&job, false, 1e-9);
    if outcome.is_err() || report.exit != 0 {
        return fail(name, format!("Kummer job failed: {:?}", report.error));
    }
    let complete = report.census.is_some()
        && report.basis.as_ref().map(|b| b.rank) == Some(2)
        && report.periods.as_ref().map(|p| p.len()) == Some(2)
        && report.verify.is_some();
    if !complete {
        return fail(name, "Kummer report is incomplete".into());
    }

    let mut bad = job.clone();
    bad.exponents[0] = ["1".into(), "0".into()];
    let (report, _, _) = crate::cli::run(&bad, false, 1e-9);
    if report.exit != crate::cli::EXIT_PRECONDITION {
        return fail(name, format!("expected exit 3, got {}", report.exit));
    }
    let reason = report.error.map(|e| e.reason).unwrap_or_default();
    if !(reason.contains("genericity") && reason.contains("j=1")) {
        return fail(name, format!("certificate does not name j=1: {reason}"));
    }
    pass(name, "Kummer job exits 0 with rank-2 report; α₁ = 1 exits 3 naming j=1".into())
}

/// The full battery in criterion order.
pub fn run_all() -> Vec<CriterionResult> {
    vec![
        criterion_chamber_oracle(),
        criterion_general_position_counts(),
        criterion_schlafli(),
        criterion_rank_identities(),
        criterion_morse(),
        criterion_euler(),
        criterion_kummer(),
        criterion_ode(),
        criterion_monodromy(),
        criterion_regularization_robustness(),
        criterion_confluence(),
        criterion_cli(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::time::Instant;

    #[test]
    fn chamber_oracle_criterion_runs_in_budget() {
        let t0 = Instant::now();
        let r = criterion_chamber_oracle();
        let dt = t0.elapsed();
        println!("{} ({:.2?})", r.line(), dt);
        assert!(r.pass, "{}", r.details);
        assert!(dt.as_secs_f64() < 30.0, "over budget: {dt:.2?}");
    }
}
