use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use thiserror::Error;

use super::metric_file::{load_metric, LoadError};
use crate::expr::{EvalError, ParseError, Point};
use crate::geometry::{sample_points, Geometry, GeometryError, MetricSpec, SamplingError, VectorFieldSpec};
use crate::relativity::{
    classify_snapshots, conformal_fit, dust_vacuum_check, em_distribution_check, energy_momentum_at, fluid_at,
    fluid_trace_residual, matter_inheritance_check, nabla_energy_momentum_at, ricci_recurrence_fit, snapshots,
    t_codazzi_residual, t_parallel_residual, t_semisymmetry_residual, ClassificationRecord, ConfigError,
    FieldEquationConfig, Implication, SymmetryFields, Tolerance,
};
use crate::wstar::{self, krupka_decompose, Evaluator, Residual, Snapshot};

/// Every check name with a one-line description, in report order.
pub const CHECKS: &[(&str, &str)] = &[
    ("inverse_metric", "g g^-1 = I"),
    ("metric_compatibility", "nabla g = 0"),
    ("riemann_symmetries", "antisymmetry, pair symmetry and first Bianchi of R_ijkl"),
    ("second_bianchi", "cyclic sum of nabla R_ijkl"),
    ("contracted_bianchi", "nabla_h R^h_jkl = nabla_l R_jk - nabla_k R_jl"),
    ("weyl_traceless", "all traces of the Weyl tensor vanish"),
    ("wstar_contraction", "g^il W*_ijkl = n/(n-1) (R_jk - R g_jk / n)"),
    ("wstar_divergence", "direct nabla_h W*^h_jkl against the displayed formula"),
    ("wstar_bianchi", "second-Bianchi-type identity for W*"),
    ("wstar_semisymmetry_contraction", "[nabla, nabla] W*_jk = (4/3) [nabla, nabla] R_jk"),
    ("weyl_divergence", "direct div C against the standard factorization"),
    ("krupka", "traceless decomposition of W*^i_klm by linear solve"),
    ("krupka_closed_forms", "displayed C, D, E coefficients against the linear solve"),
    ("fluid_trace", "R = 4 Lambda + k (mu - 3p) wherever T reads as a fluid"),
    ("ricci_flat", "R_jk = 0"),
    ("einstein", "R_jk = (R/n) g_jk"),
    ("constant_scalar_curvature", "dR = 0"),
    ("codazzi", "nabla_l R_jk = nabla_k R_jl"),
    ("ricci_recurrent", "nabla_m R_jk = b_m R_jk"),
    ("ricci_semisymmetric", "[nabla, nabla] R_jk = 0"),
    ("wstar_semisymmetric", "[nabla, nabla] W*_ijkl = 0"),
    ("wstar_flat", "W*_ijkl = 0"),
    ("wstar_divergence_free", "nabla_h W*^h_jkl = 0"),
    ("wstar_parallel", "nabla W*_ijkl = 0"),
    ("wstar_cyclic", "cyclic sum of nabla W*_ijkl = 0"),
    ("t_semisymmetric", "[nabla, nabla] T_ij = 0"),
    ("t_codazzi", "nabla_l T_jk = nabla_k T_jl"),
    ("t_parallel", "nabla T_ij = 0"),
    ("perfect_fluid", "T_ij = (mu + p) u_i u_j + p g_ij"),
    ("em_distribution", "under R_ij = k T_ij: W*-symmetric implies nabla T = 0"),
    ("fluid_relations", "W*-flat: mu + p = 0, mu - 3p constant, nabla T = 0"),
    ("dust_vacuum", "dust on a W*-flat space-time is vacuum"),
    ("conformal", "L_xi g = 2 phi g (needs --xi)"),
    ("matter_inheritance", "L_xi T = 2 phi T (needs --xi)"),
    ("theorem_consistency", "independently computed flags agree pairwise"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Table,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CheckSelection {
    All,
    Named(Vec<String>),
}

impl CheckSelection {
    /// `all` or a comma-separated list of names.
    pub fn parse(text: &str) -> Result<Self, RunError> {
        if text.trim() == "all" {
            return Ok(CheckSelection::All);
        }
        let names: Vec<String> = text.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
        if names.is_empty() {
            return Err(RunError::Usage("empty check list".into()));
        }
        for n in &names {
            if !CHECKS.iter().any(|(c, _)| c == n) {
                return Err(RunError::UnknownCheck(n.clone()));
            }
        }
        Ok(CheckSelection::Named(names))
    }

    fn names(&self) -> Vec<&str> {
        match self {
            CheckSelection::All => CHECKS.iter().map(|(c, _)| *c).collect(),
            CheckSelection::Named(v) => v.iter().map(String::as_str).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Catalog name or metric file path.
    pub metric: String,
    pub checks: CheckSelection,
    pub points: usize,
    pub seed: u64,
    pub tolerance: Tolerance,
    pub field: FieldEquationConfig,
    pub format: OutputFormat,
    pub timestamp: bool,
    /// Vector field components for the symmetry checks.
    pub xi: Option<String>,
}

impl RunConfig {
    pub fn new(metric: &str) -> Self {
        RunConfig {
            metric: metric.to_string(),
            checks: CheckSelection::All,
            points: 32,
            seed: 42,
            tolerance: Tolerance::default(),
            field: FieldEquationConfig::default(),
            format: OutputFormat::Json,
            timestamp: true,
            xi: None,
        }
    }

    pub fn validate(&self) -> Result<(), RunError> {
        if self.points == 0 {
            return Err(RunError::Usage("points must be at least 1".into()));
        }
        let Tolerance { atol, rtol } = self.tolerance;
        if !(atol > 0.0 && atol.is_finite() && rtol > 0.0 && rtol.is_finite()) {
            return Err(RunError::Usage("atol and rtol must be positive".into()));
        }
        FieldEquationConfig::new(self.field.k, self.field.lambda)?;
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Usage(String),
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("vector field: {0}")]
    VectorField(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("point: {0}")]
    Point(String),
}

impl RunError {
    /// 2 for bad input, 3 for evaluation failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_)
            | RunError::UnknownCheck(_)
            | RunError::Config(_)
            | RunError::Load(_)
            | RunError::VectorField(_)
            | RunError::Point(_) => 2,
            RunError::Geometry(_) | RunError::Sampling(_) | RunError::Eval(_) => 3,
        }
    }
}

impl From<ParseError> for RunError {
    fn from(e: ParseError) -> Self {
        RunError::VectorField(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::NotApplicable => "not-applicable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    pub max_residual: f64,
    pub tolerance: f64,
    /// Coordinates of the point with the largest excess over its tolerance.
    pub worst_point: Vec<f64>,
    pub points_evaluated: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub metric: String,
    pub dimension: usize,
    pub seed: u64,
    pub points: usize,
    pub tolerances: Tolerance,
    pub k: f64,
    pub lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub checks: Vec<CheckResult>,
}

impl CheckReport {
    pub fn any_failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "metric {} (dim {}), {} points, seed {}, atol {:e}, rtol {:e}, k {}, lambda {}\n",
            self.metric, self.dimension, self.points, self.seed, self.tolerances.atol, self.tolerances.rtol, self.k, self.lambda
        );
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        out += &format!("{:width$}  {:14}  {:>12}  {:>12}  reason\n", "check", "status", "residual", "tolerance");
        for c in &self.checks {
            out += &format!(
                "{:width$}  {:14}  {:>12.3e}  {:>12.3e}  {}\n",
                c.name,
                c.status.label(),
                c.max_residual,
                c.tolerance,
                c.reason.as_deref().unwrap_or("")
            );
        }
        out
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Table => self.to_table(),
        }
    }
}

pub fn unix_time() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Everything the checks share: the compiled evaluator, the seeded points
/// and one snapshot per point.
pub struct Session {
    pub metric: MetricSpec,
    pub evaluator: Evaluator,
    pub points: Vec<Point>,
    pub snapshots: Vec<Snapshot>,
}

impl Session {
    pub fn open(cfg: &RunConfig) -> Result<Self, RunError> {
        cfg.validate()?;
        let metric = load_metric(&cfg.metric)?;
        Session::from_metric(metric, cfg.points, cfg.seed)
    }

    pub fn from_metric(metric: MetricSpec, points: usize, seed: u64) -> Result<Self, RunError> {
        let geo = Arc::new(Geometry::new(metric.clone())?);
        let pts = sample_points(&geo, points, seed)?;
        let evaluator = Evaluator::new(geo)?;
        let snaps = snapshots(&evaluator, &pts)?;
        Ok(Session { metric, evaluator, points: pts, snapshots: snaps })
    }

    pub fn classify(&self, cfg: &RunConfig) -> Result<ClassificationRecord, RunError> {
        Ok(classify_snapshots(&self.evaluator, &self.points, &self.snapshots, &cfg.field, &cfg.tolerance)?)
    }
}

struct Judge<'a> {
    points: &'a [Point],
    tol: Tolerance,
}

impl Judge<'_> {
    /// Pass iff every applicable point is within tolerance; the reported
    /// point is the one furthest over (or closest to) its bound.
    fn points(&self, name: &str, rs: &[Option<Residual>], na: &str) -> CheckResult {
        let mut worst: Option<(usize, Residual, f64)> = None;
        let mut ok = true;
        let mut count = 0;
        for (k, r) in rs.iter().enumerate() {
            let Some(r) = r else { continue };
            count += 1;
            let bound = self.tol.bound(r.scale);
            let pass = self.tol.accepts(r);
            ok &= pass;
            let excess = if r.value.is_nan() { f64::INFINITY } else { r.value - bound };
            if worst.as_ref().is_none_or(|(_, w, b)| excess > w.value - b) {
                worst = Some((k, *r, bound));
            }
        }
        match worst {
            None => CheckResult {
                name: name.to_string(),
                status: Status::NotApplicable,
                max_residual: 0.0,
                tolerance: 0.0,
                worst_point: vec![],
                points_evaluated: 0,
                reason: Some(na.to_string()),
            },
            Some((k, r, bound)) => CheckResult {
                name: name.to_string(),
                status: if ok { Status::Pass } else { Status::Fail },
                max_residual: r.value,
                tolerance: bound,
                worst_point: self.points[k].coords.clone(),
                points_evaluated: count,
                reason: None,
            },
        }
    }

    fn all(&self, name: &str, rs: Vec<Residual>) -> CheckResult {
        let rs: Vec<Option<Residual>> = rs.into_iter().map(Some).collect();
        self.points(name, &rs, "")
    }
}

fn with_reason(mut c: CheckResult, reason: String) -> CheckResult {
    c.reason = Some(match c.reason.take() {
        Some(r) if !r.is_empty() => format!("{r}; {reason}"),
        _ => reason,
    });
    c
}

fn fold_max(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

/// Runs the selected checks on a prepared session.
pub fn run_session(session: &Session, cfg: &RunConfig) -> Result<CheckReport, RunError> {
    let judge = Judge { points: &session.points, tol: cfg.tolerance };
    let xi = match &cfg.xi {
        Some(text) => {
            let v = VectorFieldSpec::parse(&session.metric, text)?;
            if v.dim() != session.metric.dim() {
                return Err(RunError::VectorField(format!(
                    "{} components for dimension {}",
                    v.dim(),
                    session.metric.dim()
                )));
            }
            Some(SymmetryFields::new(session.evaluator.geometry(), &v, &cfg.field)?)
        }
        None => None,
    };
    let mut checks = Vec::new();
    for name in cfg.checks.names() {
        checks.push(run_one(name, session, cfg, &judge, xi.as_ref())?);
    }
    Ok(CheckReport {
        metric: session.metric.name().to_string(),
        dimension: session.metric.dim(),
        seed: cfg.seed,
        points: session.points.len(),
        tolerances: cfg.tolerance,
        k: cfg.field.k,
        lambda: cfg.field.lambda,
        timestamp: cfg.timestamp.then(unix_time),
        checks,
    })
}

/// Loads the metric, samples points and runs every selected check.
pub fn run_checks(cfg: &RunConfig) -> Result<CheckReport, RunError> {
    if let CheckSelection::Named(v) = &cfg.checks {
        for n in v {
            if !CHECKS.iter().any(|(c, _)| c == n) {
                return Err(RunError::UnknownCheck(n.clone()));
            }
        }
    }
    let session = Session::open(cfg)?;
    run_session(&session, cfg)
}

fn run_one(
    name: &str,
    session: &Session,
    cfg: &RunConfig,
    judge: &Judge,
    xi: Option<&SymmetryFields>,
) -> Result<CheckResult, RunError> {
    let snaps = &session.snapshots;
    let fc = &cfg.field;
    let tol = &cfg.tolerance;
    let each = |f: &dyn Fn(&Snapshot) -> Residual| judge.all(name, snaps.iter().map(f).collect());
    let four = snaps.first().is_some_and(|s| s.dim() == 4);
    let result = match name {
        "inverse_metric" => each(&wstar::inverse_residual),
        "metric_compatibility" => each(&wstar::metric_compatibility_residual),
        "riemann_symmetries" => each(&wstar::riemann_symmetry_residual),
        "second_bianchi" => each(&wstar::second_bianchi_residual),
        "contracted_bianchi" => each(&wstar::contracted_bianchi_residual),
        "weyl_traceless" => each(&wstar::weyl_traceless_residual),
        "wstar_contraction" => each(&wstar::wstar_contraction_residual),
        "wstar_divergence" => {
            let c = each(&wstar::divergence_residual);
            let corrected = fold_max(snaps.iter().map(|s| wstar::divergence_corrected_residual(s).value));
            with_reason(c, format!("route with 1/(2(n-1)) differs by {corrected:.3e}"))
        }
        "wstar_bianchi" => each(&|s| wstar::wstar_bianchi_residual(s).identity),
        "wstar_semisymmetry_contraction" => each(&|s| wstar::wstar_semisymmetry_residual(s).contraction),
        "weyl_divergence" => {
            let rs: Vec<Residual> = snaps
                .iter()
                .map(|s| {
                    let w = wstar::weyl_divergence_crosscheck(s);
                    if tol.accepts(&wstar::codazzi_residual(s)) {
                        w.standard_gap.max(w.direct)
                    } else {
                        w.standard_gap
                    }
                })
                .collect();
            let printed = fold_max(snaps.iter().map(|s| wstar::weyl_divergence_crosscheck(s).printed_gap.value));
            with_reason(judge.all(name, rs), format!("displayed closed form differs by {printed:.3e}"))
        }
        "krupka" | "krupka_closed_forms" if !four => judge.points(name, &[], "needs dimension 4"),
        "krupka" => {
            let mut rs = Vec::new();
            for s in snaps {
                let r = krupka_decompose(s).map_err(|e| RunError::Usage(e.to_string()))?;
                let scale = 1.0 + s.wstar_mixed.max_abs();
                rs.push(match &r.oracle {
                    Ok(o) => Some(Residual::new(o.reconstruction_residual(&s.wstar_mixed).max(o.trace_residual()), scale)),
                    Err(_) => Some(Residual::new(f64::INFINITY, scale)),
                });
            }
            judge.points(name, &rs, "")
        }
        "krupka_closed_forms" => {
            let mut rs = Vec::new();
            let mut c_max: f64 = 0.0;
            for s in snaps {
                let r = krupka_decompose(s).map_err(|e| RunError::Usage(e.to_string()))?;
                c_max = c_max.max(r.printed_c());
                rs.push(r.closed_form_gap().map(|g| Residual::new(g, 1.0 + s.wstar_mixed.max_abs())));
            }
            with_reason(judge.points(name, &rs, "trace system singular"), format!("max|C| from the 1/33 forms {c_max:.3e}"))
        }
        "fluid_trace" => {
            let rs: Vec<Option<Residual>> = snaps
                .iter()
                .map(|s| fluid_at(s, fc).ok().map(|f| fluid_trace_residual(s, &f, fc)))
                .collect();
            judge.points(name, &rs, "no perfect-fluid reading at any point")
        }
        "ricci_flat" => each(&|s| Residual::new(s.curv.ricci.max_abs(), 1.0 + s.curv.riemann.max_abs())),
        "einstein" => each(&wstar::einstein_residual),
        "constant_scalar_curvature" => each(&wstar::scalar_gradient),
        "codazzi" => each(&wstar::codazzi_residual),
        "ricci_recurrent" => {
            let mut rs = Vec::new();
            let mut closed: Option<f64> = Some(0.0);
            for p in &session.points {
                match ricci_recurrence_fit(&session.evaluator, p, 1e-4)? {
                    Some(f) => {
                        closed = closed.zip(f.closedness).map(|(a, b)| a.max(b));
                        rs.push(Some(f.fit));
                    }
                    None => rs.push(None),
                }
            }
            if rs.iter().any(Option::is_none) {
                judge.points(name, &[], "Ricci vanishes at a sampled point")
            } else {
                let c = judge.points(name, &rs, "");
                match closed {
                    Some(v) => with_reason(c, format!("closedness of b {v:.3e}")),
                    None => c,
                }
            }
        }
        "ricci_semisymmetric" => each(&wstar::ricci_semisymmetry_residual),
        "wstar_semisymmetric" => each(&|s| wstar::wstar_semisymmetry_residual(s).wstar),
        "wstar_flat" => each(&wstar::wstar_flat_residual),
        "wstar_divergence_free" => each(&wstar::divergence_norm),
        "wstar_parallel" => {
            let c = each(&wstar::wstar_symmetry_residual);
            if c.status == Status::Pass {
                let gap = fold_max(snaps.iter().map(|s| wstar::ricci_symmetry_gap(s).value));
                with_reason(c, format!("max|nabla_m R_jk - g_jk nabla_m R / n| = {gap:.3e}"))
            } else {
                c
            }
        }
        "wstar_cyclic" => each(&|s| wstar::wstar_bianchi_residual(s).cyclic),
        "t_semisymmetric" => each(&|s| t_semisymmetry_residual(s, fc)),
        "t_codazzi" => each(&|s| t_codazzi_residual(s, fc)),
        "t_parallel" => each(&|s| t_parallel_residual(s, fc)),
        "perfect_fluid" => {
            let mut rs = Vec::new();
            let mut first_err = None;
            for s in snaps {
                match fluid_at(s, fc) {
                    Ok(f) => {
                        let t = energy_momentum_at(s, fc);
                        let unit = (f.u_norm(&s.curv.g_inv) + 1.0).abs();
                        rs.push(Some(Residual::new(f.residual.max(unit), 1.0 + t.max_abs())));
                    }
                    Err(e) => {
                        first_err.get_or_insert(e.to_string());
                        rs.push(None);
                    }
                }
            }
            let c = judge.points(name, &rs, first_err.as_deref().unwrap_or(""));
            match (&first_err, c.status) {
                (Some(e), Status::Pass | Status::Fail) => {
                    let mut c = with_reason(c, format!("no fluid reading at some points: {e}"));
                    c.status = Status::Fail;
                    c
                }
                _ => c,
            }
        }
        "em_distribution" => {
            let ems: Vec<_> = snaps.iter().map(|s| em_distribution_check(s, fc)).collect();
            let rs: Vec<Option<Residual>> = ems
                .iter()
                .map(|e| tol.accepts(&e.wstar_symmetry).then_some(e.nabla_t))
                .collect();
            let plus = fold_max(ems.iter().map(|e| e.plus_convention));
            let minus = fold_max(ems.iter().map(|e| e.minus_convention));
            let trace = fold_max(ems.iter().map(|e| e.trace.abs()));
            let c = judge.points(name, &rs, "not W*-symmetric at any point");
            with_reason(c, format!("max|T| {trace:.3e}, max|R - kT| {plus:.3e}, max|R + kT| {minus:.3e}"))
        }
        "fluid_relations" => {
            let flat = snaps.iter().all(|s| tol.accepts(&wstar::wstar_flat_residual(s)));
            let fluids: Vec<_> = snaps.iter().map(|s| fluid_at(s, fc).ok()).collect();
            if !flat {
                judge.points(name, &[], "not W*-flat")
            } else if fluids.iter().all(Option::is_none) {
                judge.points(name, &[], "no perfect-fluid reading at any point")
            } else {
                let invariants: Vec<f64> = fluids.iter().flatten().map(|f| f.mu - 3.0 * f.p).collect();
                let lo = invariants.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = invariants.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let spread = hi - lo;
                let rs: Vec<Option<Residual>> = snaps
                    .iter()
                    .zip(&fluids)
                    .map(|(s, f)| {
                        f.as_ref().map(|f| {
                            let nt = nabla_energy_momentum_at(s, fc).max_abs();
                            let v = (f.mu + f.p).abs().max(nt).max(spread);
                            Residual::new(v, 1.0 + f.mu.abs() + f.p.abs())
                        })
                    })
                    .collect();
                with_reason(judge.points(name, &rs, ""), format!("mu - 3p spread {spread:.3e}"))
            }
        }
        "dust_vacuum" => {
            let status = dust_vacuum_check(snaps, fc, tol);
            let (status, reason) = match status {
                Implication::Holds => (Status::Pass, None),
                Implication::NotApplicable(r) => (Status::NotApplicable, Some(r)),
                Implication::Violated(r) => (Status::Fail, Some(r)),
            };
            CheckResult {
                name: name.to_string(),
                status,
                max_residual: 0.0,
                tolerance: tol.atol,
                worst_point: vec![],
                points_evaluated: snaps.len(),
                reason,
            }
        }
        "conformal" | "matter_inheritance" if xi.is_none() => judge.points(name, &[], "needs --xi"),
        "conformal" => {
            let sf = xi.expect("checked");
            let mut rs = Vec::new();
            let mut phis = Vec::new();
            for (s, p) in snaps.iter().zip(&session.points) {
                let fit = conformal_fit(&sf.lie_metric.eval(p)?, &s.curv.g, &s.curv.g_inv);
                phis.push(fit.phi);
                rs.push(fit.residual);
            }
            let lo = phis.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = phis.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            with_reason(judge.all(name, rs), format!("phi in [{lo:.6}, {hi:.6}]"))
        }
        "matter_inheritance" => {
            let sf = xi.expect("checked");
            let flat = snaps.iter().all(|s| tol.accepts(&wstar::wstar_flat_residual(s)));
            let mut rs = Vec::new();
            let mut degenerate = 0;
            let mut phi_gap: f64 = 0.0;
            for (s, p) in snaps.iter().zip(&session.points) {
                let fit = matter_inheritance_check(&sf.lie_t.eval(p)?, &sf.t.eval(p)?);
                let conf = conformal_fit(&sf.lie_metric.eval(p)?, &s.curv.g, &s.curv.g_inv);
                let mut r = fit.residual;
                match fit.phi {
                    None => degenerate += 1,
                    Some(phi) if flat => {
                        let gap = (phi - conf.phi).abs();
                        phi_gap = phi_gap.max(gap);
                        if tol.accepts(&conf.residual) {
                            r = r.max(Residual::new(gap, 1.0 + conf.phi.abs()));
                        }
                    }
                    Some(_) => {}
                }
                rs.push(r);
            }
            let mut c = judge.all(name, rs);
            if degenerate > 0 {
                c = with_reason(c, format!("T = 0 at {degenerate} points, any phi_T fits there"));
            }
            if flat {
                c = with_reason(c, format!("W*-flat: |phi_T - phi| up to {phi_gap:.3e}"));
            }
            c
        }
        "theorem_consistency" => {
            let rec = session.classify(cfg)?;
            let bad: Vec<String> = rec
                .pairings
                .iter()
                .filter(|p| !p.holds)
                .map(|p| format!("{} ({})", p.name, p.detail))
                .collect();
            CheckResult {
                name: name.to_string(),
                status: if bad.is_empty() { Status::Pass } else { Status::Fail },
                max_residual: bad.len() as f64,
                tolerance: 0.0,
                worst_point: vec![],
                points_evaluated: snaps.len(),
                reason: (!bad.is_empty()).then(|| format!("violated: {}", bad.join(", "))),
            }
        }
        other => return Err(RunError::UnknownCheck(other.to_string())),
    };
    Ok(result)
}
