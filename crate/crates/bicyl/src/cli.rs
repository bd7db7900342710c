//! Command implementations behind the `bicyl` binary: single reduced-case
//! evaluations, δ-sweeps, QMC estimation for arbitrary cylinder pairs, and
//! self-validation against tabulated reference values.
//!
//! Everything here is I/O-free: commands take parsed options and return the
//! rendered output, so the binary stays a thin argument-parsing shell and
//! the tests can exercise the exact same paths.

use serde::{Deserialize, Serialize};

use crate::analytic::{approx_area, approx_volume, reduced_area, reduced_volume, relative_error_pct};
use crate::error::{Error, Result};
use crate::geometry::{Cylinder, Vec3};
use crate::qmc::{estimate_intersection_area, estimate_intersection_volume, estimate_reduced, QmcSpec};
use crate::quadrature::QuadratureSpec;

// ── Reference values for self-validation ────────────────────────────
//
// Independently tabulated values of the reduced volume and surface area on
// the canonical depth grid (3-decimal precision), with the corresponding
// relative errors of the closed-form approximations in percent.

pub const REFERENCE_DELTAS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
pub const REFERENCE_VOLUMES: [f64; 9] = [
    0.015, 0.056, 0.120, 0.199, 0.290, 0.387, 0.481, 0.567, 0.635,
];
pub const REFERENCE_AREAS: [f64; 9] = [
    0.612, 1.190, 1.732, 2.232, 2.688, 3.093, 3.440, 3.719, 3.916,
];
pub const REFERENCE_VOLUME_ERR_PCT: [f64; 9] =
    [-9.4, -12.8, -14.8, -15.4, -14.8, -12.9, -9.9, -6.3, -2.4];
pub const REFERENCE_AREA_ERR_PCT: [f64; 9] =
    [-2.2, -3.8, -4.9, -5.3, -5.2, -4.6, -3.6, -2.3, -0.9];

/// Absolute tolerance covering the 3-decimal rounding of the reference
/// volume/area entries.
pub const REFERENCE_VALUE_TOL: f64 = 5e-4;
/// Tolerance on the approximation error rows, in percentage points.
pub const REFERENCE_ERR_TOL_PP: f64 = 0.1;

// ── Output formatting ───────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Human,
    Csv,
    Json,
}

/// Formats with `sig` significant digits, decimal point, no locale.
pub fn fmt_sig(x: f64, sig: i32) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if exp >= sig || exp < -9 {
        format!("{:.*e}", (sig - 1) as usize, x)
    } else {
        format!("{:.*}", (sig - 1 - exp).max(0) as usize, x)
    }
}

fn round_sig6(x: f64) -> f64 {
    fmt_sig(x, 6).parse().expect("fmt_sig emits valid floats")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| fmt_sig(x, 6)).unwrap_or_default()
}

// ── Sweep rows ──────────────────────────────────────────────────────

/// One δ sample of a sweep: exact values, approximations, signed relative
/// errors in percent, and optional QMC estimates.
///
/// The error columns are undefined at δ = 0 (the exact values vanish) and
/// are emitted as empty CSV fields / JSON nulls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub delta: f64,
    pub v_exact: f64,
    pub a_exact: f64,
    pub v_approx: f64,
    pub a_approx: f64,
    pub v_err_pct: Option<f64>,
    pub a_err_pct: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_qmc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_qmc: Option<f64>,
}

impl SweepRow {
    /// Evaluates one δ; QMC estimates are included when `qmc` is given.
    pub fn compute(delta: f64, qspec: &QuadratureSpec, qmc: Option<&QmcSpec>) -> Result<SweepRow> {
        let v_exact = reduced_volume(delta, qspec)?.value;
        let a_exact = reduced_area(delta, qspec)?.value;
        let v_approx = approx_volume(delta)?;
        let a_approx = approx_area(delta)?;
        let (v_qmc, a_qmc) = match qmc {
            Some(spec) => {
                let (v, a) = estimate_reduced(delta, 1.0, spec)?;
                (Some(v), Some(a))
            }
            None => (None, None),
        };
        Ok(SweepRow {
            delta,
            v_exact,
            a_exact,
            v_approx,
            a_approx,
            v_err_pct: relative_error_pct(v_exact, v_approx),
            a_err_pct: relative_error_pct(a_exact, a_approx),
            v_qmc,
            a_qmc,
        })
    }

    /// Copy with every value rounded to 6 significant digits, so CSV and
    /// JSON encode identical numbers.
    fn rounded(&self) -> SweepRow {
        SweepRow {
            delta: round_sig6(self.delta),
            v_exact: round_sig6(self.v_exact),
            a_exact: round_sig6(self.a_exact),
            v_approx: round_sig6(self.v_approx),
            a_approx: round_sig6(self.a_approx),
            v_err_pct: self.v_err_pct.map(round_sig6),
            a_err_pct: self.a_err_pct.map(round_sig6),
            v_qmc: self.v_qmc.map(round_sig6),
            a_qmc: self.a_qmc.map(round_sig6),
        }
    }

    fn has_qmc(&self) -> bool {
        self.v_qmc.is_some()
    }
}

pub fn csv_header(with_qmc: bool) -> &'static str {
    if with_qmc {
        "delta,v_exact,a_exact,v_approx,a_approx,v_err_pct,a_err_pct,v_qmc,a_qmc"
    } else {
        "delta,v_exact,a_exact,v_approx,a_approx,v_err_pct,a_err_pct"
    }
}

fn csv_row(row: &SweepRow) -> String {
    let mut fields = vec![
        fmt_sig(row.delta, 6),
        fmt_sig(row.v_exact, 6),
        fmt_sig(row.a_exact, 6),
        fmt_sig(row.v_approx, 6),
        fmt_sig(row.a_approx, 6),
        fmt_opt(row.v_err_pct),
        fmt_opt(row.a_err_pct),
    ];
    if row.has_qmc() {
        fields.push(fmt_opt(row.v_qmc));
        fields.push(fmt_opt(row.a_qmc));
    }
    fields.join(",")
}

/// Renders rows as CSV (LF line endings) or a JSON array of row objects
/// carrying the same field names and 6-significant-digit values.
pub fn render_rows(rows: &[SweepRow], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let rounded: Vec<SweepRow> = rows.iter().map(SweepRow::rounded).collect();
            let mut out =
                serde_json::to_string_pretty(&rounded).expect("sweep rows serialize");
            out.push('\n');
            out
        }
        _ => {
            let with_qmc = rows.first().map_or(false, SweepRow::has_qmc);
            let mut out = String::from(csv_header(with_qmc));
            out.push('\n');
            for row in rows {
                out.push_str(&csv_row(row));
                out.push('\n');
            }
            out
        }
    }
}

// ── reduced ─────────────────────────────────────────────────────────

pub fn run_reduced(
    delta: f64,
    qspec: &QuadratureSpec,
    qmc: Option<&QmcSpec>,
    format: OutputFormat,
) -> Result<String> {
    let row = SweepRow::compute(delta, qspec, qmc)?;
    match format {
        OutputFormat::Human => {
            let mut out = String::new();
            out.push_str(&format!("delta     = {:.6}\n", row.delta));
            out.push_str(&format!("v_exact   = {:.6}\n", row.v_exact));
            out.push_str(&format!("a_exact   = {:.6}\n", row.a_exact));
            out.push_str(&format!("v_approx  = {:.6}\n", row.v_approx));
            out.push_str(&format!("a_approx  = {:.6}\n", row.a_approx));
            match (row.v_err_pct, row.a_err_pct) {
                (Some(v), Some(a)) => {
                    out.push_str(&format!("v_err_pct = {v:.2}\n"));
                    out.push_str(&format!("a_err_pct = {a:.2}\n"));
                }
                _ => {
                    out.push_str("v_err_pct = n/a\n");
                    out.push_str("a_err_pct = n/a\n");
                }
            }
            if let (Some(v), Some(a)) = (row.v_qmc, row.a_qmc) {
                out.push_str(&format!("v_qmc     = {v:.6}\n"));
                out.push_str(&format!("a_qmc     = {a:.6}\n"));
            }
            Ok(out)
        }
        other => Ok(render_rows(&[row], other)),
    }
}

// ── sweep ───────────────────────────────────────────────────────────

pub fn sweep_deltas(from: f64, to: f64, steps: u32) -> Result<Vec<f64>> {
    if !(from.is_finite() && to.is_finite()) {
        return Err(Error::NonFinite("sweep range"));
    }
    if steps < 2 {
        return Err(Error::InvalidParameter(format!(
            "steps {steps} must be at least 2"
        )));
    }
    if !(0.0..=1.0).contains(&from) || !(0.0..=1.0).contains(&to) || from >= to {
        return Err(Error::InvalidParameter(format!(
            "sweep range [{from}, {to}] must satisfy 0 <= from < to <= 1"
        )));
    }
    let step = (to - from) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i == steps - 1 {
                to
            } else {
                from + i as f64 * step
            }
        })
        .collect())
}

pub fn run_sweep(
    from: f64,
    to: f64,
    steps: u32,
    qspec: &QuadratureSpec,
    qmc: Option<&QmcSpec>,
    format: OutputFormat,
) -> Result<String> {
    let rows = sweep_deltas(from, to, steps)?
        .into_iter()
        .map(|delta| SweepRow::compute(delta, qspec, qmc))
        .collect::<Result<Vec<_>>>()?;
    Ok(render_rows(&rows, format))
}

// ── estimate ────────────────────────────────────────────────────────

/// One cylinder pair of an estimation batch, each cylinder encoded as
/// `[ax, ay, az, bx, by, bz, r]`.
#[derive(Debug, Clone, Copy, Deserialize)]
pub struct CylinderPairSpec {
    pub c1: [f64; 7],
    pub c2: [f64; 7],
}

/// Parses the CLI encoding `ax,ay,az,bx,by,bz,r`.
pub fn parse_cylinder(field: &str, text: &str) -> Result<Cylinder> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 7 {
        return Err(Error::InvalidParameter(format!(
            "{field}: expected 7 comma-separated reals (ax,ay,az,bx,by,bz,r), got {}",
            parts.len()
        )));
    }
    let mut vals = [0.0f64; 7];
    for (i, p) in parts.iter().enumerate() {
        vals[i] = p.trim().parse().map_err(|_| {
            Error::InvalidParameter(format!("{field}: `{p}` is not a number"))
        })?;
    }
    cylinder_from_array(field, &vals)
}

pub fn cylinder_from_array(field: &str, vals: &[f64; 7]) -> Result<Cylinder> {
    Cylinder::new(
        Vec3::new(vals[0], vals[1], vals[2]),
        Vec3::new(vals[3], vals[4], vals[5]),
        vals[6],
    )
    .map_err(|e| Error::InvalidParameter(format!("{field}: {e}")))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EstimateReport {
    pub v_est: f64,
    pub v_hit_fraction: f64,
    pub a_est: f64,
    pub a_hit_fraction_c1: f64,
    pub a_hit_fraction_c2: f64,
    pub n_samples: u64,
}

pub fn estimate_pair(c1: &Cylinder, c2: &Cylinder, spec: &QmcSpec) -> Result<EstimateReport> {
    let vol = estimate_intersection_volume(c1, c2, spec)?;
    let area = estimate_intersection_area(c1, c2, spec)?;
    Ok(EstimateReport {
        v_est: vol.value,
        v_hit_fraction: vol.hit_fraction,
        a_est: area.value,
        a_hit_fraction_c1: area.hit_fraction_c1,
        a_hit_fraction_c2: area.hit_fraction_c2,
        n_samples: vol.n_used,
    })
}

fn rounded_report(r: &EstimateReport) -> EstimateReport {
    EstimateReport {
        v_est: round_sig6(r.v_est),
        v_hit_fraction: round_sig6(r.v_hit_fraction),
        a_est: round_sig6(r.a_est),
        a_hit_fraction_c1: round_sig6(r.a_hit_fraction_c1),
        a_hit_fraction_c2: round_sig6(r.a_hit_fraction_c2),
        n_samples: r.n_samples,
    }
}

pub fn run_estimate(
    pairs: &[(Cylinder, Cylinder)],
    spec: &QmcSpec,
    format: OutputFormat,
) -> Result<String> {
    let reports = pairs
        .iter()
        .map(|(c1, c2)| estimate_pair(c1, c2, spec))
        .collect::<Result<Vec<_>>>()?;
    match format {
        OutputFormat::Json => {
            let rounded: Vec<EstimateReport> = reports.iter().map(rounded_report).collect();
            let mut out =
                serde_json::to_string_pretty(&rounded).expect("estimate reports serialize");
            out.push('\n');
            Ok(out)
        }
        _ => {
            let mut out = String::new();
            for (i, r) in reports.iter().enumerate() {
                if reports.len() > 1 {
                    out.push_str(&format!("# pair {}\n", i + 1));
                }
                out.push_str(&format!(
                    "V_est = {}  (hit fraction {}, n = {})\n",
                    fmt_sig(r.v_est, 6),
                    fmt_sig(r.v_hit_fraction, 6),
                    r.n_samples
                ));
                out.push_str(&format!(
                    "A_est = {}  (f1 {}, f2 {}, n = {} per surface)\n",
                    fmt_sig(r.a_est, 6),
                    fmt_sig(r.a_hit_fraction_c1, 6),
                    fmt_sig(r.a_hit_fraction_c2, 6),
                    r.n_samples
                ));
            }
            Ok(out)
        }
    }
}

// ── validate ────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy)]
pub struct ValidateOptions {
    pub log2_samples: u32,
    pub seed: u64,
    pub threads: usize,
    /// Multiplier applied to every tolerance. Exists so the failure path
    /// can be exercised; 1.0 in normal operation.
    pub tol_scale: f64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            log2_samples: 20,
            seed: 1,
            threads: 1,
            tol_scale: 1.0,
        }
    }
}

struct CheckList {
    lines: Vec<String>,
    all_passed: bool,
}

impl CheckList {
    fn new() -> Self {
        CheckList {
            lines: Vec::new(),
            all_passed: true,
        }
    }

    fn check(&mut self, name: &str, observed: f64, expected: f64, tol: f64) {
        let delta = observed - expected;
        let passed = delta.abs() <= tol;
        self.all_passed &= passed;
        self.lines.push(format!(
            "{} {name}: observed {} expected {} (delta {:+.2e}, tol {:.1e})",
            if passed { "PASS" } else { "FAIL" },
            fmt_sig(observed, 6),
            fmt_sig(expected, 6),
            delta,
            tol,
        ));
    }
}

/// Runs the reference-table, closed-form, and QMC-vs-quadrature checks.
/// Returns the per-check report and whether every check passed.
pub fn run_validate(opts: &ValidateOptions) -> Result<(String, bool)> {
    let qspec = QuadratureSpec::default();
    let scale = opts.tol_scale;
    let mut checks = CheckList::new();

    // Reference-table oracle rows, one per tabulated depth.
    for (i, &delta) in REFERENCE_DELTAS.iter().enumerate() {
        let v = reduced_volume(delta, &qspec)?.value;
        let a = reduced_area(delta, &qspec)?.value;
        checks.check(
            &format!("v_exact(delta={delta})"),
            v,
            REFERENCE_VOLUMES[i],
            REFERENCE_VALUE_TOL * scale,
        );
        checks.check(
            &format!("a_exact(delta={delta})"),
            a,
            REFERENCE_AREAS[i],
            REFERENCE_VALUE_TOL * scale,
        );
        let v_err = relative_error_pct(v, approx_volume(delta)?).expect("v > 0 on grid");
        let a_err = relative_error_pct(a, approx_area(delta)?).expect("a > 0 on grid");
        checks.check(
            &format!("v_err_pct(delta={delta})"),
            v_err,
            REFERENCE_VOLUME_ERR_PCT[i],
            REFERENCE_ERR_TOL_PP * scale,
        );
        checks.check(
            &format!("a_err_pct(delta={delta})"),
            a_err,
            REFERENCE_AREA_ERR_PCT[i],
            REFERENCE_ERR_TOL_PP * scale,
        );
    }

    // Closed forms and the quadrature path right next to them.
    checks.check(
        "v_exact(delta=1) closed form",
        reduced_volume(1.0, &qspec)?.value,
        2.0 / 3.0,
        0.0,
    );
    checks.check(
        "a_exact(delta=1) closed form",
        reduced_area(1.0, &qspec)?.value,
        4.0,
        0.0,
    );
    let near_one = 1.0 - 1e-9;
    checks.check(
        "v_exact quadrature path near delta=1",
        reduced_volume(near_one, &qspec)?.value,
        2.0 / 3.0,
        1e-6 * scale,
    );
    checks.check(
        "a_exact quadrature path near delta=1",
        reduced_area(near_one, &qspec)?.value,
        4.0,
        1e-6 * scale,
    );

    // QMC cross-checks against the quadrature values. The tolerance is
    // calibrated for 2^20 samples and widened as 1/sqrt(n) below that.
    let qmc = QmcSpec {
        log2_samples: opts.log2_samples,
        scramble_seed: Some(opts.seed),
        threads: opts.threads,
        ..Default::default()
    };
    qmc.validate()?;
    let widen = 2f64.powf((20.0 - opts.log2_samples as f64) / 2.0).max(1.0);
    let rel_tol = 0.015 * widen * scale;
    for delta in [0.25, 0.5, 0.75, 1.0] {
        let (v_est, a_est) = estimate_reduced(delta, 1.0, &qmc)?;
        let v_ref = reduced_volume(delta, &qspec)?.value;
        let a_ref = reduced_area(delta, &qspec)?.value;
        checks.check(
            &format!("v_qmc(delta={delta})"),
            v_est,
            v_ref,
            rel_tol * v_ref,
        );
        checks.check(
            &format!("a_qmc(delta={delta})"),
            a_est,
            a_ref,
            rel_tol * a_ref,
        );
    }

    let mut report = checks.lines.join("\n");
    report.push('\n');
    report.push_str(if checks.all_passed {
        "validation: all checks passed\n"
    } else {
        "validation: FAILED\n"
    });
    Ok((report, checks.all_passed))
}
