use crate::{
    Cli, Command, ConstantArgs, FamilyArg, LimitArgs, MethodArg, OutputArgs, ProfileArgs, Suite, TableArgs, VerifyArgs,
    EXIT_ADMISSIBILITY, EXIT_SOLVER, EXIT_USAGE, EXIT_VERIFY,
};
use gn_sharp::closed_forms::{closed_constant_1d, dpd_constant};
use gn_sharp::solver::{best_constant, best_constant_numeric, extremal_profile};
use gn_sharp::verify::{self, Bump, SampleFamily};
use gn_sharp::{BestConstantResult, Error, ExtReal, ParamSet, RadialProfile, ShootingConfig, Support};
use gn_sharp_cli::output::{opt_sci, sci, to_csv, to_json, ErrorInfo, Format, RunRecord, Timestamps};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::HashSet;
use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

/// A finished payload in all three renderings.
struct Rendered {
    results: Value,
    csv: String,
    text: String,
    exit: i32,
}

struct Failure {
    info: ErrorInfo,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { info: error_info(&e) }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { info: ErrorInfo { kind: "Usage".into(), message: msg.into(), exit_code: EXIT_USAGE } }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Admissibility(_) => "Admissibility",
        Error::Domain(_) => "Domain",
        Error::FamilyMismatch(_) => "FamilyMismatch",
        Error::SobolevCritical => "SobolevCritical",
        Error::Bracket(_) => "Bracket",
        Error::NonConvergence(_) => "NonConvergence",
        Error::ExtrapolationDivergence(_) => "ExtrapolationDivergence",
        Error::NonIntegrable(_) => "NonIntegrable",
        Error::InsufficientTail(_) => "InsufficientTail",
        Error::Precondition(_) => "Precondition",
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_solver_failure() {
        EXIT_SOLVER
    } else {
        EXIT_ADMISSIBILITY
    }
}

fn error_info(e: &Error) -> ErrorInfo {
    ErrorInfo { kind: error_kind(e).into(), message: e.to_string(), exit_code: exit_code(e) }
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

pub fn run(cli: Cli) -> i32 {
    let started = now_ms();
    let (record, out, result) = match cli.command {
        Command::Constant(a) => {
            let rec = RunRecord::new("constant", Some(a.params.params()), a.config.config(), None);
            let res = cmd_constant(&a);
            (rec, a.output, res)
        }
        Command::Profile(a) => {
            let rec = RunRecord::new("profile", Some(a.params.params()), a.config.config(), None);
            let res = cmd_profile(&a);
            (rec, a.output, res)
        }
        Command::Verify(a) => {
            let params = verify_params(&a).ok();
            let rec = RunRecord::new("verify", params, a.config.config(), Some(a.seed));
            let res = cmd_verify(&a);
            (rec, a.output, res)
        }
        Command::Limit(a) => {
            let rec = RunRecord::new("limit", Some(ParamSet::infinite(a.d, a.p, a.q)), ShootingConfig::default(), None);
            let res = cmd_limit(&a);
            (rec, a.output, res)
        }
        Command::Table(a) => {
            let rec = RunRecord::new("table", None, a.config.config(), None);
            let res = cmd_table(&a);
            (rec, a.output, res)
        }
    };
    finish(record, started, &out, result)
}

fn finish(mut rec: RunRecord, started: u64, out: &OutputArgs, result: Result<Rendered, Failure>) -> i32 {
    let (exit, csv, text) = match result {
        Ok(r) => {
            rec.results = r.results;
            (r.exit, r.csv, r.text)
        }
        Err(f) => {
            eprintln!("error: {}", f.info.message);
            let exit = f.info.exit_code;
            rec.error = Some(f.info);
            (exit, String::new(), String::new())
        }
    };
    if !out.no_timestamps {
        rec.timestamps = Some(Timestamps { started_unix_ms: started, finished_unix_ms: now_ms() });
    }
    let payload = match out.format {
        Format::Json => to_json(&rec),
        Format::Csv => csv,
        Format::Text => text,
    };
    let written = match &out.out {
        Some(path) => std::fs::write(path, payload.as_bytes()),
        None => {
            print!("{payload}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return EXIT_USAGE;
    }
    exit
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

fn compute_constant(params: &ParamSet, method: MethodArg, cfg: &ShootingConfig) -> Result<BestConstantResult, Error> {
    match method {
        MethodArg::Auto => best_constant(params, cfg),
        MethodArg::Numeric => best_constant_numeric(params, cfg),
        MethodArg::Closed if params.d == 1 => closed_constant_1d(params),
        MethodArg::Closed => dpd_constant(params),
    }
}

const CONSTANT_HEADER: [&str; 10] = ["d", "p", "q", "m", "theta", "m_c", "c", "beta", "method", "err_estimate"];

fn constant_cells(ps: &ParamSet, r: &BestConstantResult) -> Vec<String> {
    vec![
        ps.d.to_string(),
        sci(ps.p),
        sci(ps.q),
        m_cell(ps.m),
        sci(r.theta),
        sci(r.m_c),
        sci(r.c),
        opt_sci(r.beta),
        format!("{:?}", r.method),
        sci(r.err_estimate),
    ]
}

fn m_cell(m: ExtReal) -> String {
    match m {
        ExtReal::Finite(v) => sci(v),
        ExtReal::Infinite => "inf".into(),
    }
}

fn cmd_constant(a: &ConstantArgs) -> Result<Rendered, Failure> {
    let ps = a.params.params();
    let r = compute_constant(&ps, a.method, &a.config.config())?;
    let mut results = to_value(&r);
    results["regime"] = to_value(&ps.regime());
    let mut text = format!("parameters    {ps}\n");
    let _ = writeln!(text, "theta         {}", sci(r.theta));
    let _ = writeln!(text, "M_c           {}", sci(r.m_c));
    let _ = writeln!(text, "C             {}", sci(r.c));
    if let Some(b) = r.beta {
        let _ = writeln!(text, "beta          {}", sci(b));
    }
    let _ = writeln!(text, "method        {:?}", r.method);
    let _ = writeln!(text, "err_estimate  {}", sci(r.err_estimate));
    Ok(Rendered { results, csv: to_csv(&CONSTANT_HEADER, &[constant_cells(&ps, &r)]), text, exit: 0 })
}

/// Where u first drops below `frac` of its peak, by doubling.
fn decay_end(prof: &RadialProfile, frac: f64) -> f64 {
    let floor = frac * prof.peak;
    let mut r = 1.0;
    while prof.value(r) > floor && r < 1e8 {
        r *= 2.0;
    }
    r
}

fn cmd_profile(a: &ProfileArgs) -> Result<Rendered, Failure> {
    let ps = a.params.params();
    let prof = extremal_profile(&ps, &a.config.config())?;
    let r_end = match (a.r_end, prof.support) {
        (Some(e), _) if e > 0.0 && e.is_finite() => e,
        (Some(e), _) => return Err(usage(format!("--r-end must be positive, got {e}"))),
        (None, Support::Finite { radius }) => radius,
        (None, Support::Infinite { .. }) => decay_end(&prof, 1e-6),
    };
    let n = a.points as usize;
    let rs: Vec<f64> = if n == 1 { vec![0.0] } else { (0..n).map(|i| r_end * i as f64 / (n - 1) as f64).collect() };
    let us: Vec<f64> = rs.iter().map(|&r| prof.value(r)).collect();
    let support = match prof.support {
        Support::Finite { radius } => format!("finite R={}", sci(radius)),
        Support::Infinite { decay } => format!("infinite {decay:?}"),
    };
    let mut text = String::new();
    let _ = writeln!(text, "# gn-sharp profile");
    let _ = writeln!(text, "# parameters: {ps}");
    let _ = writeln!(text, "# family: {}", prof.family_tag());
    let _ = writeln!(text, "# alpha: {}", sci(prof.peak));
    let _ = writeln!(text, "# support: {support}");
    let _ = writeln!(text, "# coefficients: {:?}", prof.coefficients());
    let _ = writeln!(text, "# columns: r u");
    for (r, u) in rs.iter().zip(&us) {
        let _ = writeln!(text, "{} {}", sci(*r), sci(*u));
    }
    let rows: Vec<Vec<String>> = rs.iter().zip(&us).map(|(r, u)| vec![sci(*r), sci(*u)]).collect();
    let results = json!({
        "family": prof.family_tag(),
        "alpha": prof.peak,
        "support": to_value(&prof.support),
        "coefficients": to_value(&prof.coefficients()),
        "r_end": r_end,
        "r": rs,
        "u": us,
    });
    Ok(Rendered { results, csv: to_csv(&["r", "u"], &rows), text, exit: 0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
struct Check {
    suite: &'static str,
    name: String,
    status: Status,
    value: Option<f64>,
    tolerance: Option<f64>,
    note: Option<String>,
    detail: Option<Value>,
}

impl Check {
    fn new(suite: &'static str, name: &str, passed: bool, value: f64, tolerance: f64) -> Self {
        Check {
            suite,
            name: name.into(),
            status: if passed { Status::Pass } else { Status::Fail },
            value: Some(value),
            tolerance: Some(tolerance),
            note: None,
            detail: None,
        }
    }

    fn skipped(suite: &'static str, name: &str, why: &str) -> Self {
        Check {
            suite,
            name: name.into(),
            status: Status::Skipped,
            value: None,
            tolerance: None,
            note: Some(why.into()),
            detail: None,
        }
    }

    fn with_detail(mut self, d: Value) -> Self {
        self.detail = Some(d);
        self
    }

    fn with_note(mut self, n: impl Into<String>) -> Self {
        self.note = Some(n.into());
        self
    }
}

fn verify_params(a: &VerifyArgs) -> Result<ParamSet, Failure> {
    if a.suite == Suite::Nash {
        return Ok(ParamSet::new(a.d, a.p, a.q.unwrap_or(0.0), a.m.and_then(|m| m.finite()).unwrap_or(1.0)));
    }
    match (a.q, a.m) {
        (Some(q), Some(m)) => Ok(ParamSet { d: a.d, p: a.p, q, m }),
        _ => Err(usage("--q and --m are required for this suite")),
    }
}

fn family(f: FamilyArg) -> SampleFamily {
    match f {
        FamilyArg::Gaussian => SampleFamily::Gaussian,
        FamilyArg::CompactPoly => SampleFamily::CompactPoly,
        FamilyArg::Tent => SampleFamily::Tent,
        FamilyArg::Mixed => SampleFamily::Mixed,
    }
}

/// A few seeded bumps for the checks that hold for arbitrary test functions.
fn side_bumps(ps: &ParamSet, seed: u64, n: usize) -> Result<Vec<Bump>, Error> {
    let s = verify::check_inequality(SampleFamily::Mixed, n, ps, 0.0, seed.wrapping_add(1))?;
    Ok(s.into_iter().map(|v| v.descriptor).collect())
}

const IDENTITY_TOL: f64 = 1e-8;
const FUNCTIONAL_TOL: f64 = 1e-6;

fn suite_inequality(ps: &ParamSet, a: &VerifyArgs, cfg: &ShootingConfig) -> Result<Vec<Check>, Error> {
    let bc = best_constant(ps, cfg)?;
    let samples = verify::check_inequality(family(a.family), a.samples, ps, bc.c, a.seed)?;
    let min_slack = samples.iter().map(|s| s.slack).fold(f64::INFINITY, f64::min);
    let rel = if samples.is_empty() { 0.0 } else { min_slack / bc.c };
    let random = Check::new("inequality", "random_slack", rel >= -1e-8, rel, -1e-8)
        .with_note(format!("min slack / C over {} samples", samples.len()))
        .with_detail(to_value(&samples));
    let prof = extremal_profile(ps, cfg)?;
    let (_, ratio) = verify::ratio(&prof, ps)?;
    let err = (ratio - bc.c).abs() / bc.c;
    let extremal = Check::new("inequality", "extremal_attains_c", err <= 1e-6, err, 1e-6)
        .with_detail(json!({ "ratio": ratio, "c": bc.c }));
    Ok(vec![random, extremal])
}

fn suite_energy(ps: &ParamSet, cfg: &ShootingConfig) -> Result<Vec<Check>, Error> {
    let prof = extremal_profile(ps, cfg)?;
    let e = verify::energy_report(&prof)?;
    let mut out = Vec::new();
    if ps.d == 1 {
        out.push(Check::new("energy", "first_integral", e.h_variation <= IDENTITY_TOL, e.h_variation, IDENTITY_TOL));
    } else {
        out.push(Check::new(
            "energy",
            "dissipation",
            e.dissipation_residual <= IDENTITY_TOL,
            e.dissipation_residual,
            IDENTITY_TOL,
        ));
    }
    let tol = FUNCTIONAL_TOL * e.scale;
    if let Some(f) = e.f_value {
        out.push(Check::new("energy", "pohozaev_f", f.abs() <= tol, f, tol));
        let c = e.contact_term;
        out.push(Check::new("energy", "contact_angle", c <= tol, c, tol));
    }
    if let Some(g) = e.g_value {
        out.push(Check::new("energy", "pohozaev_g", g.abs() <= tol, g, tol));
        let flux = verify::flux_identity_check(&prof)?;
        let worst = flux.max_rel_residual.max(flux.origin_rel_residual);
        out.push(Check::new("energy", "flux_identity", worst <= 1e-6, worst, 1e-6).with_detail(to_value(&flux)));
    }
    Ok(out)
}

fn suite_decay(ps: &ParamSet, cfg: &ShootingConfig) -> Result<Vec<Check>, Error> {
    let prof = extremal_profile(ps, cfg)?;
    Ok(vec![match verify::decay_check(&prof) {
        Ok(r) => {
            let note = match r.r_star {
                Some((rs, true)) => format!("envelope from r_* = {}", sci(rs)),
                Some((rs, false)) => format!("envelope from fallback r_* = {} (first r with u < 1)", sci(rs)),
                None => "least-squares fit over the last decade".into(),
            };
            let (value, tol) = match r.kind {
                verify::DecayKind::ExponentialEnvelope => (r.fitted, 0.0),
                _ => (r.rel_err, 0.05),
            };
            Check::new("decay", "decay_law", r.passed, value, tol).with_note(note).with_detail(to_value(&r))
        }
        Err(Error::InsufficientTail(why)) => Check::skipped("decay", "decay_law", &why),
        Err(e) => return Err(e),
    }])
}

fn suite_strauss(ps: &ParamSet, a: &VerifyArgs, cfg: &ShootingConfig) -> Result<Vec<Check>, Error> {
    if ps.d < 2 {
        return Ok(vec![Check::skipped("strauss", "strauss_bound", "needs d ≥ 2")]);
    }
    let prof = extremal_profile(ps, cfg)?;
    let mut worst = verify::strauss_bound_check(&prof, ps, 20)?.max_ratio;
    for b in side_bumps(ps, a.seed, 10)? {
        worst = worst.max(verify::strauss_bound_check(&b, ps, 20)?.max_ratio);
    }
    Ok(vec![Check::new("strauss", "strauss_bound", worst <= 1.0, worst, 1.0)
        .with_note("largest |u(r)| / bound(r) over 20 radii per function")])
}

fn suite_scaling(ps: &ParamSet, a: &VerifyArgs, cfg: &ShootingConfig) -> Result<Vec<Check>, Error> {
    if ps.m.is_infinite() {
        return Ok(vec![Check::skipped("scaling", "scaling_reduction", "needs finite m")]);
    }
    let prof = extremal_profile(ps, cfg)?;
    let mut reports = vec![verify::scaling_reduction_check(&prof, ps)?];
    for b in side_bumps(ps, a.seed, 5)? {
        reports.push(verify::scaling_reduction_check(&b, ps)?);
    }
    let worst = reports.iter().map(|r| r.rel_err.max(r.scaling_err)).fold(0.0, f64::max);
    Ok(vec![Check::new("scaling", "scaling_reduction", worst <= 1e-6, worst, 1e-6).with_detail(to_value(&reports))])
}

fn suite_nash(a: &VerifyArgs, cfg: &ShootingConfig, explicit: bool) -> Result<Vec<Check>, Error> {
    if a.p != 2.0 {
        if explicit {
            return Err(Error::Precondition("the nash suite needs p = 2".into()));
        }
        return Ok(vec![Check::skipped("nash", "nash_eigenvalue", "needs p = 2")]);
    }
    let r = verify::nash_eigen_check(&ParamSet::new(a.d, 2.0, 0.0, 1.0), cfg)?;
    Ok(vec![Check::new("nash", "nash_eigenvalue", r.passed, r.rel_err, 1e-6).with_detail(to_value(&r))])
}

fn cmd_verify(a: &VerifyArgs) -> Result<Rendered, Failure> {
    let ps = verify_params(a)?;
    let cfg = a.config.config();
    gn_sharp::params::validate(&ps)?;
    let wants = |s: Suite| a.suite == s || a.suite == Suite::All;
    let mut checks = Vec::new();
    if wants(Suite::Inequality) {
        checks.extend(suite_inequality(&ps, a, &cfg)?);
    }
    if wants(Suite::Energy) {
        checks.extend(suite_energy(&ps, &cfg)?);
    }
    if wants(Suite::Decay) {
        checks.extend(suite_decay(&ps, &cfg)?);
    }
    if wants(Suite::Strauss) {
        checks.extend(suite_strauss(&ps, a, &cfg)?);
    }
    if wants(Suite::Scaling) {
        checks.extend(suite_scaling(&ps, a, &cfg)?);
    }
    if wants(Suite::Nash) {
        checks.extend(suite_nash(a, &cfg, a.suite == Suite::Nash)?);
    }
    let failed = checks.iter().filter(|c| c.status == Status::Fail).count();
    let mut text = String::new();
    let rows: Vec<Vec<String>> = checks
        .iter()
        .map(|c| {
            let status = format!("{:?}", c.status).to_lowercase();
            let _ = writeln!(
                text,
                "{:<7} {:<10} {:<20} value {:<24} tol {}",
                status,
                c.suite,
                c.name,
                opt_sci(c.value),
                opt_sci(c.tolerance)
            );
            vec![
                c.suite.to_string(),
                c.name.clone(),
                status,
                opt_sci(c.value),
                opt_sci(c.tolerance),
                c.note.clone().unwrap_or_default(),
            ]
        })
        .collect();
    let _ = writeln!(text, "{} checks, {} failed", checks.len(), failed);
    let results = json!({ "passed": failed == 0, "failed": failed, "checks": to_value(&checks) });
    Ok(Rendered {
        results,
        csv: to_csv(&["suite", "check", "status", "value", "tolerance", "note"], &rows),
        text,
        exit: if failed == 0 { 0 } else { EXIT_VERIFY },
    })
}

fn cmd_limit(a: &LimitArgs) -> Result<Rendered, Failure> {
    if a.d != 1 {
        return Err(Error::Precondition(format!("the m → ∞ study is only available for d = 1, got d = {}", a.d)).into());
    }
    if a.m_list.iter().any(|m| !m.is_finite()) || a.m_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(usage("--m-list must be finite and strictly increasing"));
    }
    let report = verify::limit_study(a.p, a.q, &a.m_list, a.threshold)?;
    let mut text =
        format!("p = {}, q = {}: C_inf = {}, R_inf = {}\n", a.p, a.q, sci(report.c_inf), opt_sci(report.radius_inf));
    let _ =
        writeln!(text, "{:>8} {:>24} {:>24} {:>24} {:>24}", "m", "C_m", "|C_m - C_inf|", "|R_m - R_inf|", "sup gap");
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            let _ = writeln!(
                text,
                "{:>8} {:>24} {:>24} {:>24} {:>24}",
                r.m,
                sci(r.c),
                sci(r.c_gap),
                opt_sci(r.radius_gap),
                sci(r.sup_gap)
            );
            vec![sci(r.m), sci(r.c), sci(r.c_gap), opt_sci(r.radius), opt_sci(r.radius_gap), sci(r.sup_gap)]
        })
        .collect();
    let _ = writeln!(text, "final gaps below {}: {}", a.threshold, report.passed);
    Ok(Rendered {
        results: to_value(&report),
        csv: to_csv(&["m", "c", "c_gap", "radius", "radius_gap", "sup_gap"], &rows),
        text,
        exit: 0,
    })
}

fn parse_tuple(s: &str) -> Result<ParamSet, Failure> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || usage(format!("--tuple expects \"d,p,q,m\", got {s:?}"));
    if parts.len() != 4 {
        return Err(bad());
    }
    Ok(ParamSet {
        d: parts[0].parse().map_err(|_| bad())?,
        p: parts[1].parse().map_err(|_| bad())?,
        q: parts[2].parse().map_err(|_| bad())?,
        m: ExtReal::parse(parts[3]).map_err(|_| bad())?,
    })
}

fn table_rows(a: &TableArgs) -> Result<Vec<ParamSet>, Failure> {
    let given = [!a.d.is_empty(), !a.p.is_empty(), !a.q.is_empty(), !a.m.is_empty()];
    let mut rows = Vec::new();
    if given.iter().any(|&g| g) {
        if !given.iter().all(|&g| g) {
            return Err(usage("a sweep needs all of --d, --p, --q and --m"));
        }
        for &d in &a.d {
            for &p in &a.p {
                for &q in &a.q {
                    for &m in &a.m {
                        rows.push(ParamSet { d, p, q, m });
                    }
                }
            }
        }
    }
    for t in &a.tuples {
        rows.push(parse_tuple(t)?);
    }
    if rows.is_empty() {
        return Err(usage("nothing to tabulate: give a sweep or --tuple"));
    }
    let key = |ps: &ParamSet| (ps.d, ps.p.to_bits(), ps.q.to_bits(), ps.m.finite().map(f64::to_bits));
    let mut seen = HashSet::new();
    rows.retain(|ps| seen.insert(key(ps)));
    Ok(rows)
}

#[derive(Serialize)]
struct TableRow {
    params: ParamSet,
    result: Option<BestConstantResult>,
    error: Option<ErrorInfo>,
}

fn cmd_table(a: &TableArgs) -> Result<Rendered, Failure> {
    let rows = table_rows(a)?;
    let cfg = a.config.config();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.parallel as usize)
        .build()
        .map_err(|e| usage(format!("cannot start {} workers: {e}", a.parallel)))?;
    let computed: Vec<TableRow> = pool.install(|| {
        rows.par_iter()
            .map(|ps| match compute_constant(ps, a.method, &cfg) {
                Ok(r) => TableRow { params: *ps, result: Some(r), error: None },
                Err(e) => TableRow { params: *ps, result: None, error: Some(error_info(&e)) },
            })
            .collect()
    });
    let failures = computed.iter().filter(|r| r.error.is_some()).count();
    let exit =
        if failures == computed.len() { computed[0].error.as_ref().map_or(EXIT_SOLVER, |e| e.exit_code) } else { 0 };
    let mut header = CONSTANT_HEADER.to_vec();
    header.push("error");
    let mut text = String::new();
    let csv_rows: Vec<Vec<String>> = computed
        .iter()
        .map(|row| {
            let ps = &row.params;
            match (&row.result, &row.error) {
                (Some(r), _) => {
                    let _ = writeln!(text, "{ps}  C = {}  ({:?})", sci(r.c), r.method);
                    let mut cells = constant_cells(ps, r);
                    cells.push(String::new());
                    cells
                }
                (None, e) => {
                    let msg = e.as_ref().map(|e| format!("{}: {}", e.kind, e.message)).unwrap_or_default();
                    let _ = writeln!(text, "{ps}  error: {msg}");
                    let mut cells = vec![ps.d.to_string(), sci(ps.p), sci(ps.q), m_cell(ps.m)];
                    cells.extend(std::iter::repeat_n(String::new(), 6));
                    cells.push(msg);
                    cells
                }
            }
        })
        .collect();
    let results = json!({ "rows": to_value(&computed), "failed": failures });
    Ok(Rendered { results, csv: to_csv(&header, &csv_rows), text, exit })
}
