//! Batch front-end: job files in, JSON reports (and optional SVG chamber
//! plots) out. Rationals travel as strings "p/q" and complex rationals as
//! two-element arrays, so reports are lossless and reproducible.
//!
//! Exit contract: 0 all requested checks pass, 2 schema violation (no
//! report is written), 3 precondition failure with a machine-readable
//! reason, 4 numeric non-convergence.

use crate::chambers::ChamberCensus;
use crate::connection::{
    check_flatness, is_asymptotically_generic, is_generic, monodromy_factors, ExponentData,
    GenericityVerdict,
};
use crate::field::{parse_rat, rat_to_f64, rat_to_string, CRat, Rat};
use crate::geometry::{AffineFunctional, Arrangement, Hyperplane};
use crate::quadrature::{integrate_chain, FormTerm, QuadError, TwistedIntegrand};
use crate::rdbasis::{
    ambient_census, linear_basis_stable_under_doubling, rank_cross_check, rd_basis, Phase,
    PhaseSpec, RadiusSpec, RdBasis, RdBasisError,
};
use crate::regularization::{
    bounded_chamber_polygon, regularize_bounded, regularize_truncated, CutoffSpec,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("schema: {0}")]
    Schema(String),
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("numeric: {0}")]
    Numeric(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => EXIT_SCHEMA,
            CliError::Precondition(_) => EXIT_PRECONDITION,
            CliError::Numeric(_) => EXIT_NUMERIC,
            CliError::Io(_) => EXIT_SCHEMA,
        }
    }
}

fn classify_basis_error(e: RdBasisError) -> CliError {
    match e {
        RdBasisError::NotGeneric(v) => CliError::Precondition(format!("genericity: {v}")),
        RdBasisError::NotAsymptoticallyGeneric(v) => {
            CliError::Precondition(format!("asymptotic genericity: {v}"))
        }
        RdBasisError::GenericityUndecided(v) => {
            CliError::Precondition(format!("genericity undecided: {v}"))
        }
        RdBasisError::NotBoolean => {
            CliError::Precondition("quadratic phase needs Boolean linear parts".into())
        }
        RdBasisError::IntegerExponent { hyperplane } => {
            CliError::Precondition(format!("genericity: integer eigenvalue at {hyperplane}"))
        }
        other => CliError::Precondition(other.to_string()),
    }
}

fn classify_quad_error(e: QuadError) -> CliError {
    match e {
        QuadError::NonConvergence { .. } => CliError::Numeric(e.to_string()),
        other => CliError::Precondition(other.to_string()),
    }
}

// ---------------------------------------------------------------------------
// Job schema
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub dim: usize,
    /// Coefficient rows `[a_0, a_1, …, a_n]` as rational strings.
    pub hyperplanes: Vec<Vec<String>>,
    /// Complex rational exponents as `[re, im]` pairs of rational strings.
    pub exponents: Vec<[String; 2]>,
    #[serde(default)]
    pub phase: PhaseJson,
    #[serde(default)]
    pub form: Vec<FormJson>,
    pub tasks: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseJson {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<String>>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub r: Option<String>,
}

impl Default for PhaseJson {
    fn default() -> Self {
        PhaseJson {
            kind: "none".into(),
            f: None,
            r: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormJson {
    /// `[re, im]` rational strings.
    pub coeff: [String; 2],
    pub powers: Vec<i64>,
}

const KNOWN_TASKS: [&str; 4] = ["chambers", "basis", "periods", "verify"];

/// Validated, exact-typed job.
pub struct CheckedJob {
    pub arrangement: Arrangement<Rat>,
    pub exponents: ExponentData,
    pub phase_spec: PhaseSpec,
    pub form: Vec<FormTerm>,
    pub tasks: Vec<String>,
}

pub fn check_job(job: &JobSpec) -> Result<CheckedJob, CliError> {
    let schema = |m: String| CliError::Schema(m);
    if job.dim == 0 {
        return Err(schema("dim must be ≥ 1".into()));
    }
    if job.hyperplanes.is_empty() {
        return Err(schema("at least one hyperplane is required".into()));
    }
    let mut hyperplanes = Vec::new();
    for (j, row) in job.hyperplanes.iter().enumerate() {
        if row.len() != job.dim + 1 {
            return Err(schema(format!(
                "hyperplane {} has {} coefficients, expected {}",
                j + 1,
                row.len(),
                job.dim + 1
            )));
        }
        let coeffs: Result<Vec<Rat>, String> = row.iter().map(|s| parse_rat(s)).collect();
        let coeffs = coeffs.map_err(schema)?;
        hyperplanes.push(
            Hyperplane::new(coeffs, format!("A{}", j + 1))
                .map_err(|e| schema(e.to_string()))?,
        );
    }
    let arrangement = Arrangement::new(job.dim, hyperplanes).map_err(|e| schema(e.to_string()))?;

    if job.exponents.len() != arrangement.len() {
        return Err(schema(format!(
            "{} exponents for {} hyperplanes",
            job.exponents.len(),
            arrangement.len()
        )));
    }
    let mut alphas = Vec::new();
    for pair in &job.exponents {
        let re = parse_rat(&pair[0]).map_err(schema)?;
        let im = parse_rat(&pair[1]).map_err(schema)?;
        alphas.push(CRat::new(re, im));
    }
    let exponents = ExponentData::rank1(alphas);

    let radius = match job.phase.r.as_deref() {
        None | Some("auto") => RadiusSpec::Auto,
        Some(s) => RadiusSpec::Explicit(parse_rat(s).map_err(schema)?),
    };
    let phase = match job.phase.kind.as_str() {
        "none" => Phase::None,
        "linear" => {
            let row = job
                .phase
                .f
                .as_ref()
                .ok_or_else(|| schema("linear phase needs the functional row f".into()))?;
            if row.len() != job.dim + 1 {
                return Err(schema(format!(
                    "phase row has {} coefficients, expected {}",
                    row.len(),
                    job.dim + 1
                )));
            }
            let coeffs: Result<Vec<Rat>, String> = row.iter().map(|s| parse_rat(s)).collect();
            Phase::Linear(
                AffineFunctional::new(coeffs.map_err(schema)?)
                    .map_err(|e| schema(e.to_string()))?,
            )
        }
        "quadratic" => Phase::Quadratic,
        other => return Err(schema(format!("unknown phase kind {other:?}"))),
    };

    let mut form = Vec::new();
    for (i, t) in job.form.iter().enumerate() {
        if t.powers.len() != arrangement.len() {
            return Err(schema(format!(
                "form term {} has {} powers, expected {}",
                i,
                t.powers.len(),
                arrangement.len()
            )));
        }
        let re = parse_rat(&t.coeff[0]).map_err(schema)?;
        let im = parse_rat(&t.coeff[1]).map_err(schema)?;
        form.push(FormTerm::new(
            Complex64::new(rat_to_f64(&re), rat_to_f64(&im)),
            t.powers.clone(),
        ));
    }

    if job.tasks.is_empty() {
        return Err(schema("tasks must be nonempty".into()));
    }
    for t in &job.tasks {
        if !KNOWN_TASKS.contains(&t.as_str()) {
            return Err(schema(format!(
                "unknown task {t:?} (expected one of {KNOWN_TASKS:?})"
            )));
        }
    }

    Ok(CheckedJob {
        arrangement,
        exponents,
        phase_spec: PhaseSpec { phase, radius },
        form,
        tasks: job.tasks.clone(),
    })
}

// ---------------------------------------------------------------------------
// Report schema
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ChamberJson {
    pub id: usize,
    pub sign: String,
    pub witness: Vec<String>,
    pub bounded: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CensusJson {
    pub n_total: usize,
    pub n_bounded: usize,
    pub n_unbounded: usize,
    pub chambers: Vec<ChamberJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TruncatedJson {
    pub chamber_id: usize,
    pub sign: String,
    pub interior_point: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BasisJson {
    pub degree: usize,
    pub rank: usize,
    pub bounded_ids: Vec<usize>,
    pub truncated: Vec<TruncatedJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<String>,
    pub assumed: Vec<String>,
    pub rank_cross_check: RankJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius_doubling_stable: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RankJson {
    pub basis_rank: usize,
    pub b_arrangement: usize,
    pub fiber_rank: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeriodJson {
    pub cycle: String,
    pub form_index: usize,
    pub value: [f64; 2],
    pub abs_error: f64,
    pub cells: usize,
    pub nodes: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyJson {
    pub flat: bool,
    pub generic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub genericity_certificate: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymptotically_generic: Option<bool>,
    pub monodromy_max_error: f64,
    pub series_contiguous_residual: f64,
    pub gamma_reflection_residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorJson {
    pub code: i32,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub job: JobSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub census: Option<CensusJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis: Option<BasisJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub periods: Option<Vec<PeriodJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorJson>,
    pub exit: i32,
}

fn census_json(census: &ChamberCensus<Rat>) -> CensusJson {
    CensusJson {
        n_total: census.n_total,
        n_bounded: census.n_bounded,
        n_unbounded: census.n_unbounded,
        chambers: census
            .chambers
            .iter()
            .map(|c| ChamberJson {
                id: c.id,
                sign: c.sign.to_string(),
                witness: c.witness.iter().map(rat_to_string).collect(),
                bounded: c.bounded,
            })
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// Run
// ---------------------------------------------------------------------------

/// Executes a checked job, filling the report task by task. The first
/// precondition or numeric failure stops execution; the partial report plus
/// the error object is still written by [`run_file`].
pub fn run(job: &JobSpec, with_plot: bool, tol: f64) -> (Report, Option<String>, Result<(), CliError>) {
    let mut report = Report {
        job: job.clone(),
        census: None,
        basis: None,
        periods: None,
        verify: None,
        error: None,
        exit: EXIT_OK,
    };
    let checked = match check_job(job) {
        Ok(c) => c,
        Err(e) => {
            report.exit = e.exit_code();
            report.error = Some(ErrorJson {
                code: e.exit_code(),
                reason: e.to_string(),
            });
            return (report, None, Err(e));
        }
    };
    let mut svg = None;
    let outcome = run_tasks(&checked, &mut report, with_plot, tol, &mut svg);
    if let Err(e) = &outcome {
        report.exit = e.exit_code();
        report.error = Some(ErrorJson {
            code: e.exit_code(),
            reason: e.to_string(),
        });
    }
    (report, svg, outcome)
}

fn run_tasks(
    checked: &CheckedJob,
    report: &mut Report,
    with_plot: bool,
    tol: f64,
    svg: &mut Option<String>,
) -> Result<(), CliError> {
    let a = &checked.arrangement;
    let e = &checked.exponents;
    let wants = |t: &str| checked.tasks.iter().any(|x| x == t);

    let census = ambient_census(a).map_err(classify_basis_error)?;
    if wants("chambers") {
        report.census = Some(census_json(&census));
    }

    let mut basis: Option<RdBasis> = None;
    if wants("basis") || wants("periods") {
        let b = rd_basis(a, e, &checked.phase_spec).map_err(classify_basis_error)?;
        let rank = rank_cross_check(a, e, &checked.phase_spec).map_err(classify_basis_error)?;
        let stable = match (&checked.phase_spec.phase, &b.truncation) {
            (Phase::Linear(f), Some(t)) => Some(
                linear_basis_stable_under_doubling(a, f, &t.radius)
                    .map_err(classify_basis_error)?,
            ),
            _ => None,
        };
        report.basis = Some(BasisJson {
            degree: b.degree,
            rank: b.rank(),
            bounded_ids: b.bounded.iter().map(|c| c.id).collect(),
            truncated: b
                .truncated
                .iter()
                .map(|t| TruncatedJson {
                    chamber_id: t.chamber.id,
                    sign: t.chamber.sign.to_string(),
                    interior_point: t.interior_point.iter().map(rat_to_string).collect(),
                })
                .collect(),
            radius: b.truncation.as_ref().map(|t| rat_to_string(&t.radius)),
            assumed: b.assumed.clone(),
            rank_cross_check: RankJson {
                basis_rank: rank.basis_rank,
                b_arrangement: rank.b_arrangement,
                fiber_rank: rank.fiber_rank,
                pass: rank.pass,
            },
            radius_doubling_stable: stable,
        });
        basis = Some(b);
    }

    if wants("periods") {
        let b = basis.as_ref().expect("basis computed above");
        if checked.form.is_empty() {
            return Err(CliError::Schema(
                "periods task needs at least one form term".into(),
            ));
        }
        let mut rows = Vec::new();
        let integrands: Vec<TwistedIntegrand> = checked
            .form
            .iter()
            .map(|t| {
                TwistedIntegrand::new(a, e, &checked.phase_spec.phase, vec![t.clone()])
                    .map_err(classify_quad_error)
            })
            .collect::<Result<_, _>>()?;
        for chamber in &b.bounded {
            let chain = regularize_bounded(chamber, a, e)
                .map_err(|err| CliError::Precondition(err.to_string()))?;
            for (fi, integrand) in integrands.iter().enumerate() {
                let r = integrate_chain(integrand, &chain, tol).map_err(classify_quad_error)?;
                rows.push(PeriodJson {
                    cycle: format!("bounded:{}", chamber.id),
                    form_index: fi,
                    value: [r.value.re, r.value.im],
                    abs_error: r.abs_error_estimate,
                    cells: r.cells_evaluated,
                    nodes: r.nodes_used,
                });
            }
        }
        if let Some(t) = &b.truncation {
            for tc in &b.truncated {
                let chain = regularize_truncated(
                    tc,
                    &t.phase,
                    &t.radius,
                    a,
                    e,
                    CutoffSpec::AdaptiveTail { tol: 1e-16 },
                )
                .map_err(|err| CliError::Precondition(err.to_string()))?;
                for (fi, integrand) in integrands.iter().enumerate() {
                    let r =
                        integrate_chain(integrand, &chain, tol).map_err(classify_quad_error)?;
                    rows.push(PeriodJson {
                        cycle: format!("truncated:{}", tc.chamber.id),
                        form_index: fi,
                        value: [r.value.re, r.value.im],
                        abs_error: r.abs_error_estimate,
                        cells: r.cells_evaluated,
                        nodes: r.nodes_used,
                    });
                }
            }
        }
        report.periods = Some(rows);
    }

    if wants("verify") {
        report.verify = Some(run_verify(checked)?);
    }

    if with_plot {
        if a.dim != 2 {
            return Err(CliError::Precondition(format!(
                "plotting needs n = 2 (got n = {})",
                a.dim
            )));
        }
        *svg = Some(plot_svg(a, &census, basis.as_ref()));
    }
    Ok(())
}

/// Job-specific verification: flatness, genericity with certificates, a
/// monodromy transport spot check per exponent, and the series/gamma
/// self-identities.
fn run_verify(checked: &CheckedJob) -> Result<VerifyJson, CliError> {
    let a = &checked.arrangement;
    let e = &checked.exponents;
    let flat = check_flatness(a, e)
        .map_err(|err| CliError::Precondition(err.to_string()))?
        .flat;
    let verdict = is_generic(a, e);
    let (generic, certificate) = match &verdict {
        GenericityVerdict::Generic => (true, None),
        GenericityVerdict::NotGeneric(v) => (false, Some(v.to_string())),
        GenericityVerdict::Undecided(r) => (false, Some(format!("undecided: {r}"))),
    };
    if !generic {
        return Err(CliError::Precondition(format!(
            "genericity: {}",
            certificate.unwrap_or_default()
        )));
    }
    let asymptotic = match &checked.phase_spec.phase {
        Phase::Linear(f) => Some(
            is_asymptotically_generic(a, e, f)
                .map_err(|err| CliError::Precondition(err.to_string()))?
                .is_generic(),
        ),
        _ => None,
    };

    // monodromy spot check: d_j + 1 must equal the transported loop factor
    let monodromy_max_error = {
        let m = monodromy_factors(e)
            .map_err(|err| CliError::Precondition(err.to_string()))?;
        let mut worst: f64 = 0.0;
        for (j, alpha) in e.alphas().unwrap().iter().enumerate() {
            let expected = crate::connection::exp_2pi_i(alpha);
            let got = m.d[j] + Complex64::new(1.0, 0.0);
            worst = worst.max((expected - got).norm());
        }
        worst
    };

    // series self-identity at a fixed interior point
    let series_contiguous_residual = {
        let c = Complex64::new(1.3, 0.0);
        let av = Complex64::new(0.7, 0.0);
        let z = Complex64::new(0.4, 0.2);
        let lhs = c * crate::validation::kummer_1f1(av, c, z).unwrap()
            - c * crate::validation::kummer_1f1(av - 1.0, c, z).unwrap()
            - z * crate::validation::kummer_1f1(av, c + 1.0, z).unwrap();
        lhs.norm()
    };
    let gamma_reflection_residual = {
        let z = Complex64::new(0.3, 0.4);
        let lhs = crate::validation::gamma(z) * crate::validation::gamma(Complex64::new(1.0, 0.0) - z);
        let rhs = std::f64::consts::PI / (std::f64::consts::PI * z).sin();
        (lhs - rhs).norm() / rhs.norm()
    };

    Ok(VerifyJson {
        flat,
        generic,
        genericity_certificate: None,
        asymptotically_generic: asymptotic,
        monodromy_max_error,
        series_contiguous_residual,
        gamma_reflection_residual,
    })
}

/// Runs a job file end to end: parse, execute, write `report.json` and
/// optionally `plot.svg` under `out_dir`. Returns the process exit code.
pub fn run_file(job_path: &Path, out_dir: &Path, with_plot: bool, tol: f64) -> i32 {
    let text = match std::fs::read_to_string(job_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{{\"code\":2,\"reason\":\"cannot read job: {e}\"}}");
            return EXIT_SCHEMA;
        }
    };
    let job: JobSpec = match serde_json::from_str(&text) {
        Ok(j) => j,
        Err(e) => {
            // malformed input: no report is written
            eprintln!("{{\"code\":2,\"reason\":\"malformed job JSON: {e}\"}}");
            return EXIT_SCHEMA;
        }
    };
    let (report, svg, outcome) = run(&job, with_plot, tol);
    if matches!(outcome, Err(CliError::Schema(_))) {
        eprintln!(
            "{}",
            serde_json::to_string(&report.error).unwrap_or_default()
        );
        return EXIT_SCHEMA;
    }
    if std::fs::create_dir_all(out_dir).is_err() {
        eprintln!("{{\"code\":2,\"reason\":\"cannot create output directory\"}}");
        return EXIT_SCHEMA;
    }
    let report_path: PathBuf = out_dir.join("report.json");
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    if let Err(e) = std::fs::write(&report_path, json) {
        eprintln!("{{\"code\":2,\"reason\":\"cannot write report: {e}\"}}");
        return EXIT_SCHEMA;
    }
    if let Some(svg_text) = svg {
        let _ = std::fs::write(out_dir.join("plot.svg"), svg_text);
    }
    if let Some(err) = &report.error {
        eprintln!("{}", serde_json::to_string(err).unwrap_or_default());
    }
    report.exit
}

// ---------------------------------------------------------------------------
// SVG plot
// ---------------------------------------------------------------------------

fn fmt_pt(x: f64) -> String {
    format!("{x:.4}")
}

/// Deterministic SVG of a planar arrangement: hyperplane lines, bounded
/// chambers filled, truncated basis regions hatched, and the truncation
/// wall dashed.
pub fn plot_svg(a: &Arrangement<Rat>, census: &ChamberCensus<Rat>, basis: Option<&RdBasis>) -> String {
    assert_eq!(a.dim, 2, "plotting needs a planar arrangement");
    // view box from the vertices with a margin
    let verts = crate::geometry::vertices(a);
    let (mut lo, mut hi) = ([-1.0f64, -1.0], [1.0f64, 1.0]);
    for v in &verts {
        let p = [rat_to_f64(&v[0]), rat_to_f64(&v[1])];
        for i in 0..2 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    if let Some(b) = basis {
        if let Some(t) = &b.truncation {
            let r = rat_to_f64(&t.radius);
            let reach = match t.phase {
                Phase::Quadratic => r.sqrt(),
                _ => r,
            };
            for i in 0..2 {
                lo[i] = lo[i].min(-reach);
                hi[i] = hi[i].max(reach);
            }
        }
    }
    let margin = 0.15 * ((hi[0] - lo[0]).max(hi[1] - lo[1])).max(1.0);
    let (x0, y0) = (lo[0] - margin, lo[1] - margin);
    let (w, h) = (hi[0] - lo[0] + 2.0 * margin, hi[1] - lo[1] + 2.0 * margin);
    let scale = 640.0 / w.max(h);
    let to_px = |p: [f64; 2]| -> [f64; 2] {
        [(p[0] - x0) * scale, (h - (p[1] - y0)) * scale]
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        fmt_pt(w * scale),
        fmt_pt(h * scale),
        fmt_pt(w * scale),
        fmt_pt(h * scale)
    );
    let _ = writeln!(
        out,
        "<defs><pattern id=\"hatch\" width=\"8\" height=\"8\" patternUnits=\"userSpaceOnUse\" patternTransform=\"rotate(45)\"><line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"8\" stroke=\"#7a4f9e\" stroke-width=\"2\"/></pattern></defs>"
    );
    let _ = writeln!(
        out,
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>"
    );

    // truncated regions hatched (sampled outlines, deterministic order)
    if let Some(b) = basis {
        if let Some(t) = &b.truncation {
            for tc in &b.truncated {
                if let Some(points) =
                    truncated_outline(a, &tc.chamber.sign, &t.phase, &t.radius, [x0, y0], [x0 + w, y0 + h])
                {
                    let path: Vec<String> = points
                        .iter()
                        .map(|p| {
                            let q = to_px(*p);
                            format!("{},{}", fmt_pt(q[0]), fmt_pt(q[1]))
                        })
                        .collect();
                    let _ = writeln!(
                        out,
                        "<polygon points=\"{}\" fill=\"url(#hatch)\" fill-opacity=\"0.55\" stroke=\"none\"/>",
                        path.join(" ")
                    );
                }
            }
        }
    }

    // bounded chambers filled
    for c in census.bounded() {
        if let Ok(poly) = bounded_chamber_polygon(a, c) {
            let path: Vec<String> = poly
                .iter()
                .map(|p| {
                    let q = to_px(*p);
                    format!("{},{}", fmt_pt(q[0]), fmt_pt(q[1]))
                })
                .collect();
            let _ = writeln!(
                out,
                "<polygon points=\"{}\" fill=\"#4f7a9e\" fill-opacity=\"0.6\" stroke=\"none\"/>",
                path.join(" ")
            );
        }
    }

    // hyperplane lines clipped to the view box
    for hpl in &a.hyperplanes {
        let c0 = rat_to_f64(&hpl.coeffs[0]);
        let c1 = rat_to_f64(&hpl.coeffs[1]);
        let c2 = rat_to_f64(&hpl.coeffs[2]);
        if let Some((p, q)) = clip_line(c0, c1, c2, [x0, y0], [x0 + w, y0 + h]) {
            let (pp, qq) = (to_px(p), to_px(q));
            let _ = writeln!(
                out,
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#222\" stroke-width=\"1.5\"/>",
                fmt_pt(pp[0]),
                fmt_pt(pp[1]),
                fmt_pt(qq[0]),
                fmt_pt(qq[1])
            );
        }
    }

    // truncation wall dashed
    if let Some(b) = basis {
        if let Some(t) = &b.truncation {
            match &t.phase {
                Phase::Linear(f) => {
                    let c0 = rat_to_f64(&f.coeffs[0]) - rat_to_f64(&t.radius);
                    let c1 = rat_to_f64(&f.coeffs[1]);
                    let c2 = rat_to_f64(&f.coeffs[2]);
                    if let Some((p, q)) = clip_line(c0, c1, c2, [x0, y0], [x0 + w, y0 + h]) {
                        let (pp, qq) = (to_px(p), to_px(q));
                        let _ = writeln!(
                            out,
                            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#9e4f4f\" stroke-width=\"1.5\" stroke-dasharray=\"8,6\"/>",
                            fmt_pt(pp[0]),
                            fmt_pt(pp[1]),
                            fmt_pt(qq[0]),
                            fmt_pt(qq[1])
                        );
                    }
                }
                Phase::Quadratic => {
                    let r = rat_to_f64(&t.radius).sqrt();
                    let center = to_px([0.0, 0.0]);
                    let _ = writeln!(
                        out,
                        "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"#9e4f4f\" stroke-width=\"1.5\" stroke-dasharray=\"8,6\"/>",
                        fmt_pt(center[0]),
                        fmt_pt(center[1]),
                        fmt_pt(r * scale)
                    );
                }
                Phase::None => {}
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Clips `c0 + c1 x + c2 y = 0` to a rectangle; `None` when it misses.
fn clip_line(c0: f64, c1: f64, c2: f64, lo: [f64; 2], hi: [f64; 2]) -> Option<([f64; 2], [f64; 2])> {
    let mut pts: Vec<[f64; 2]> = Vec::new();
    let push = |p: [f64; 2], pts: &mut Vec<[f64; 2]>| {
        let eps = 1e-9;
        if p[0] >= lo[0] - eps && p[0] <= hi[0] + eps && p[1] >= lo[1] - eps && p[1] <= hi[1] + eps
        {
            if !pts.iter().any(|q: &[f64; 2]| {
                (q[0] - p[0]).abs() < 1e-9 && (q[1] - p[1]).abs() < 1e-9
            }) {
                pts.push(p);
            }
        }
    };
    if c2.abs() > 1e-14 {
        for x in [lo[0], hi[0]] {
            push([x, -(c0 + c1 * x) / c2], &mut pts);
        }
    }
    if c1.abs() > 1e-14 {
        for y in [lo[1], hi[1]] {
            push([-(c0 + c2 * y) / c1, y], &mut pts);
        }
    }
    if pts.len() >= 2 {
        Some((pts[0], pts[1]))
    } else {
        None
    }
}

/// Sampled outline of `chamber ∩ {Re f < R}` for hatching: region vertices
/// plus sampled truncation-boundary points, sorted around their centroid.
fn truncated_outline(
    a: &Arrangement<Rat>,
    sign: &crate::geometry::SignVector,
    phase: &Phase,
    radius: &Rat,
    lo: [f64; 2],
    hi: [f64; 2],
) -> Option<Vec<[f64; 2]>> {
    let coeffs: Vec<[f64; 3]> = a
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
    let signs: Vec<f64> = sign.0.iter().map(|s| s.factor() as f64).collect();
    let r = rat_to_f64(radius);
    let phase_val = |p: [f64; 2]| -> f64 {
        match phase {
            Phase::Linear(f) => {
                rat_to_f64(&f.coeffs[0])
                    + rat_to_f64(&f.coeffs[1]) * p[0]
                    + rat_to_f64(&f.coeffs[2]) * p[1]
            }
            Phase::Quadratic => p[0] * p[0] + p[1] * p[1],
            Phase::None => f64::NEG_INFINITY,
        }
    };
    let inside = |p: [f64; 2]| -> bool {
        coeffs
            .iter()
            .zip(&signs)
            .all(|(c, s)| s * (c[0] + c[1] * p[0] + c[2] * p[1]) >= -1e-9)
            && phase_val(p) <= r + 1e-9
            && p[0] >= lo[0] - 1e-9
            && p[0] <= hi[0] + 1e-9
            && p[1] >= lo[1] - 1e-9
            && p[1] <= hi[1] + 1e-9
    };
    // dense grid sampling of the region followed by a convex hull
    let mut pts: Vec<[f64; 2]> = Vec::new();
    let steps = 96;
    for i in 0..=steps {
        for j in 0..=steps {
            let p = [
                lo[0] + (hi[0] - lo[0]) * i as f64 / steps as f64,
                lo[1] + (hi[1] - lo[1]) * j as f64 / steps as f64,
            ];
            if inside(p) {
                pts.push(p);
            }
        }
    }
    if pts.len() < 3 {
        return None;
    }
    Some(convex_hull(pts))
}

fn convex_hull(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|p, q| p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1])));
    pts.dedup_by(|p, q| (p[0] - q[0]).abs() < 1e-12 && (p[1] - q[1]).abs() < 1e-12);
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: &[f64; 2], a: &[f64; 2], b: &[f64; 2]| -> f64 {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut hull: Vec<[f64; 2]> = Vec::new();
    for p in pts.iter().chain(pts.iter().rev()) {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(*p);
    }
    hull.pop();
    hull
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kummer_job() -> JobSpec {
        JobSpec {
            dim: 1,
            hyperplanes: vec![
                vec!["0".into(), "1".into()],
                vec!["-1".into(), "1".into()],
            ],
            exponents: vec![
                ["1/2".into(), "0".into()],
                ["1/3".into(), "0".into()],
            ],
            phase: PhaseJson {
                kind: "linear".into(),
                f: Some(vec!["0".into(), "1".into()]),
                r: Some("auto".into()),
            },
            form: vec![FormJson {
                coeff: ["1".into(), "0".into()],
                powers: vec![-1, -1],
            }],
            tasks: vec![
                "chambers".into(),
                "basis".into(),
                "periods".into(),
                "verify".into(),
            ],
        }
    }

    #[test]
    fn kummer_job_runs_clean() {
        let (report, _, outcome) = run(&kummer_job(), false, 1e-9);
        assert!(outcome.is_ok(), "outcome {:?}", report.error);
        assert_eq!(report.exit, EXIT_OK);
        let basis = report.basis.as_ref().unwrap();
        assert_eq!(basis.rank, 2);
        let periods = report.periods.as_ref().unwrap();
        assert_eq!(periods.len(), 2);
        assert!(report.verify.as_ref().unwrap().generic);
        assert!(report.verify.as_ref().unwrap().monodromy_max_error < 1e-12);
    }

    #[test]
    fn integer_exponent_is_precondition_failure() {
        let mut job = kummer_job();
        job.exponents[0] = ["1".into(), "0".into()];
        let (report, _, outcome) = run(&job, false, 1e-9);
        assert_eq!(report.exit, EXIT_PRECONDITION);
        let reason = report.error.as_ref().unwrap().reason.clone();
        assert!(
            reason.contains("genericity") && reason.contains("j=1"),
            "reason: {reason}"
        );
        assert!(outcome.is_err());
    }

    #[test]
    fn schema_violations() {
        let mut job = kummer_job();
        job.exponents.pop();
        let (report, _, outcome) = run(&job, false, 1e-9);
        assert_eq!(report.exit, EXIT_SCHEMA);
        assert!(matches!(outcome, Err(CliError::Schema(_))));

        let mut job = kummer_job();
        job.tasks = vec!["bogus".into()];
        let (report, _, _) = run(&job, false, 1e-9);
        assert_eq!(report.exit, EXIT_SCHEMA);
    }

    #[test]
    fn report_round_trip() {
        let (report, _, _) = run(&kummer_job(), false, 1e-9);
        let text = serde_json::to_string(&report).unwrap();
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back.census, report.census);
        assert_eq!(back.basis, report.basis);
    }

    #[test]
    fn svg_plot_is_deterministic() {
        let a = crate::geometry::arrangement_from_rows(
            2,
            &[vec![0, 1, 0], vec![0, 0, 1], vec![1, -1, -1]],
        );
        let census = crate::chambers::enumerate_chambers(&a).unwrap();
        let svg1 = plot_svg(&a, &census, None);
        let svg2 = plot_svg(&a, &census, None);
        assert_eq!(svg1, svg2);
        assert!(svg1.contains("<polygon"));
        assert!(svg1.contains("<line"));
    }
}
