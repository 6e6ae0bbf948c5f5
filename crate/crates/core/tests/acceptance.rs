//! One PASS/FAIL line per acceptance criterion over the five catalog
//! metrics, 32 points each, seed 42. Exits non-zero if any line fails.

use std::process::ExitCode;
use std::sync::Arc;

use wstar::cli::{catalog_metric, run_checks, CheckSelection, RunConfig, Session, CATALOG};
use wstar::expr::{differentiate, evaluate};
use wstar::geometry::{
    commutator_from_second_derivative, commutator_via_ricci_identity, sample_points, CompiledFields, Geometry,
    PointTensor,
};
use wstar::relativity::{
    classify_snapshots, fluid_at, fluid_trace_residual, ClassificationRecord, FieldEquationConfig, Tolerance,
};
use wstar::wstar::{self as ws, krupka_decompose, Residual, Snapshot};

const POINTS: usize = 32;
const SEED: u64 = 42;

struct Line {
    name: &'static str,
    pass: bool,
    detail: String,
}

/// Largest `value/scale` per metric.
fn ratios(sessions: &[Session], f: impl Fn(&Snapshot) -> Option<Residual>) -> Vec<(String, f64)> {
    sessions
        .iter()
        .map(|s| {
            let worst = s
                .snapshots
                .iter()
                .filter_map(&f)
                .map(|r| r.value / r.scale)
                .fold(0.0_f64, |m, x| if x.is_nan() { f64::INFINITY } else { m.max(x) });
            (s.metric.name().to_string(), worst)
        })
        .collect()
}

fn relative_identity(name: &'static str, sessions: &[Session], rel: f64, f: impl Fn(&Snapshot) -> Option<Residual>) -> Line {
    let per = ratios(sessions, f);
    let bad: Vec<String> = per.iter().filter(|(_, r)| *r > rel).map(|(m, r)| format!("{m} {r:.3e}")).collect();
    let worst = per.iter().map(|(_, r)| *r).fold(0.0, f64::max);
    Line {
        name,
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("worst residual/scale {worst:.3e} (limit {rel:e})")
        } else {
            format!("residual/scale over {rel:e} on {}", bad.join(", "))
        },
    }
}

fn krupka(sessions: &[Session]) -> Line {
    let mut recon: f64 = 0.0;
    let mut gaps: Vec<(String, f64)> = Vec::new();
    let mut c_max: f64 = 0.0;
    for s in sessions {
        let mut gap: f64 = 0.0;
        for snap in &s.snapshots {
            let r = krupka_decompose(snap).expect("dimension 4");
            let o = r.oracle.as_ref().expect("trace system is regular");
            recon = recon.max(o.reconstruction_residual(&snap.wstar_mixed)).max(o.trace_residual());
            c_max = c_max.max(r.printed_c());
            gap = gap.max(r.closed_form_gap().unwrap_or(f64::INFINITY));
        }
        gaps.push((s.metric.name().to_string(), gap));
    }
    let bad: Vec<String> = gaps.iter().filter(|(_, g)| *g > 1e-8).map(|(m, g)| format!("{m} {g:.3e}")).collect();
    Line {
        name: "traceless decomposition of W*",
        pass: recon <= 1e-8 && c_max <= 1e-8 && bad.is_empty(),
        detail: format!(
            "reconstruction/trace {recon:.3e}, max|C| {c_max:.3e}, closed forms vs linear solve: {} (limit 1e-8)",
            if bad.is_empty() { "agree".to_string() } else { bad.join(", ") }
        ),
    }
}

fn pairings(records: &[ClassificationRecord]) -> Line {
    const NAMES: [&str; 6] = [
        "codazzi_iff_divergence_free",
        "einstein_iff_contraction_zero",
        "flat_implies_constant_scalar",
        "flat_implies_t_parallel",
        "flat_implies_lambda_like_fluid",
        "t_semisymmetric_iff_ricci_semisymmetric",
    ];
    let mut bad = Vec::new();
    let mut count = 0;
    for r in records {
        for p in r.pairings.iter().filter(|p| NAMES.contains(&p.name)) {
            count += 1;
            if !p.holds {
                bad.push(format!("{} on {} ({})", p.name, r.metric, p.detail));
            }
        }
    }
    Line {
        name: "theorem consistency",
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{count} pairings agree")
        } else {
            format!("{} of {count} pairings disagree: {}", bad.len(), bad.join("; "))
        },
    }
}

fn session<'a>(sessions: &'a [Session], name: &str) -> &'a Session {
    sessions.iter().find(|s| s.metric.name() == name).expect("catalog metric")
}

fn catalog_regressions(sessions: &[Session], records: &[ClassificationRecord]) -> Line {
    let cfg = FieldEquationConfig::default();
    let mut failures = Vec::new();
    let mut check = |ok: bool, what: String| {
        if !ok {
            failures.push(what);
        }
    };

    let flat = session(sessions, "minkowski");
    let flat_max = flat
        .snapshots
        .iter()
        .map(|s| {
            let c = &s.curv;
            [
                &c.christoffel,
                &c.curvature_operator,
                &c.riemann,
                &c.ricci,
                &s.wstar,
                &s.wstar_mixed,
                &s.wstar_contraction,
                &s.weyl,
                &s.nabla_metric,
                &s.nabla_riemann,
                &s.nabla_wstar,
            ]
            .iter()
            .map(|t| t.max_abs())
            .fold(c.scalar.abs(), f64::max)
        })
        .fold(0.0, f64::max);
    check(flat_max <= 1e-12, format!("minkowski max tensor {flat_max:.3e}"));

    let bh = session(sessions, "schwarzschild");
    for s in &bh.snapshots {
        let scale = 1.0 + s.curv.riemann.max_abs();
        let ric = s.curv.ricci.max_abs();
        check(ric <= 1e-8 * scale, format!("schwarzschild Ricci {ric:.3e}"));
        let gap = s.wstar.max_abs_diff(&s.curv.riemann).unwrap();
        check(gap <= 1e-9, format!("schwarzschild |W* - R| {gap:.3e}"));
        let div = ws::divergence_direct(s).max_abs();
        check(div <= 1e-8, format!("schwarzschild div W* {div:.3e}"));
    }

    let ds = session(sessions, "desitter_flat");
    let ds_rec = records.iter().find(|r| r.metric == "desitter_flat").unwrap();
    check(ds_rec.einstein.holds, "de Sitter not Einstein".into());
    for s in &ds.snapshots {
        check((s.curv.scalar - 12.0).abs() <= 1e-6, format!("de Sitter R = {}", s.curv.scalar));
        let c = s.wstar_contraction.max_abs();
        check(c <= 1e-9, format!("de Sitter W*_jk {c:.3e}"));
        let w = fluid_at(s, &cfg).ok().and_then(|f| f.w);
        check(w.is_some_and(|w| (w + 1.0).abs() <= 1e-6), format!("de Sitter w = {w:?}"));
    }

    let dust = session(sessions, "flrw_dust");
    let p = dust.metric.point(vec![1.0, 0.3, -0.2, 0.7]);
    let snap = dust.evaluator.at(&p).unwrap();
    let f = fluid_at(&snap, &cfg).unwrap();
    check(f.p.abs() <= 1e-5, format!("dust p = {}", f.p));
    check((f.mu - 4.0 / 3.0).abs() <= 1e-5, format!("dust mu = {}", f.mu));

    let pert = session(sessions, "perturbed_flat");
    let pert_rec = records.iter().find(|r| r.metric == "perturbed_flat").unwrap();
    check(!pert_rec.einstein.holds, "perturbed_flat is Einstein".into());
    let pair = pert.snapshots.iter().map(ws::wstar_pair_gap).fold(0.0, f64::max);
    check(pair > 1e-6, format!("perturbed_flat pair gap {pair:.3e}"));

    Line {
        name: "catalog regressions",
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("minkowski {flat_max:.1e}, dust mu {:.9}, p {:.1e}, perturbed pair gap {pair:.3e}", f.mu, f.p)
        } else {
            failures.join("; ")
        },
    }
}

fn oracle_equivalences(sessions: &[Session]) -> Line {
    let mut fd_worst = (0.0_f64, String::from("-"));
    for s in sessions {
        let m = &s.metric;
        let n = m.dim();
        for p in s.points.iter().take(8) {
            for i in 0..n {
                for j in i..n {
                    let g = m.component(i, j);
                    for a in 0..n {
                        let sym = evaluate(&differentiate(g, a), p).unwrap();
                        let h = 1e-5 * p.coords[a].abs().max(1.0);
                        let fd = (evaluate(g, &p.shifted(a, h)).unwrap() - evaluate(g, &p.shifted(a, -h)).unwrap())
                            / (2.0 * h);
                        let excess = (sym - fd).abs() / 1e-6_f64.max(1e-5 * sym.abs());
                        if excess > fd_worst.0 {
                            fd_worst = (excess, m.name().to_string());
                        }
                    }
                }
            }
        }
    }

    let geo = Arc::new(Geometry::new(catalog_metric("perturbed_flat").unwrap()).unwrap());
    let nn = geo.covariant_derivative(&geo.covariant_derivative(geo.ricci()));
    let compiled = CompiledFields::new(&[&nn]);
    let mut commutator: f64 = 0.0;
    for p in sample_points(&geo, 8, SEED).unwrap() {
        let nn = compiled.eval(&p).unwrap().remove(0);
        let direct = commutator_from_second_derivative(&nn);
        let c = geo.at(&p).unwrap();
        let via: PointTensor = commutator_via_ricci_identity(&c.ricci, &c.curvature_operator).unwrap();
        commutator = commutator.max(direct.max_abs_diff(&via).unwrap());
    }

    let inverse = sessions
        .iter()
        .flat_map(|s| s.snapshots.iter().map(|x| ws::inverse_residual(x).value))
        .fold(0.0, f64::max);

    Line {
        name: "oracle equivalences",
        pass: fd_worst.0 <= 1.0 && commutator <= 1e-6 && inverse <= 1e-10,
        detail: format!(
            "finite differences at {:.3e} of tolerance ({}), Ricci identity vs double derivative {commutator:.3e}, g g^-1 {inverse:.3e}",
            fd_worst.0, fd_worst.1
        ),
    }
}

fn determinism() -> Line {
    let mut differing = Vec::new();
    for name in CATALOG {
        let mut cfg = RunConfig::new(name);
        cfg.checks = CheckSelection::All;
        cfg.timestamp = false;
        let a = run_checks(&cfg).unwrap().to_json();
        let b = run_checks(&cfg).unwrap().to_json();
        if a != b {
            differing.push(name);
        }
    }
    Line {
        name: "determinism",
        pass: differing.is_empty(),
        detail: if differing.is_empty() {
            format!("{} metrics, byte-identical reports", CATALOG.len())
        } else {
            format!("reports differ on {}", differing.join(", "))
        },
    }
}

fn main() -> ExitCode {
    let sessions: Vec<Session> = CATALOG
        .iter()
        .map(|name| Session::from_metric(catalog_metric(name).unwrap(), POINTS, SEED).unwrap())
        .collect();
    let cfg = FieldEquationConfig::default();
    let tol = Tolerance::default();
    let records: Vec<ClassificationRecord> = sessions
        .iter()
        .map(|s| classify_snapshots(&s.evaluator, &s.points, &s.snapshots, &cfg, &tol).unwrap())
        .collect();

    let lines = vec![
        relative_identity("contraction of W*", &sessions, 1e-9, |s| Some(ws::wstar_contraction_residual(s))),
        relative_identity("divergence of W*", &sessions, 1e-6, |s| Some(ws::divergence_residual(s))),
        relative_identity("Bianchi-type identity for W*", &sessions, 1e-6, |s| {
            Some(ws::wstar_bianchi_residual(s).identity)
        }),
        relative_identity("semi-symmetry contraction", &sessions, 1e-7, |s| {
            Some(ws::wstar_semisymmetry_residual(s).contraction)
        }),
        relative_identity("trace of the field equation", &sessions, 1e-7, |s| {
            fluid_at(s, &cfg).ok().map(|f| fluid_trace_residual(s, &f, &cfg))
        }),
        krupka(&sessions),
        pairings(&records),
        catalog_regressions(&sessions, &records),
        oracle_equivalences(&sessions),
        determinism(),
    ];

    let mut failed = 0;
    for l in &lines {
        println!("{} {}: {}", if l.pass { "PASS" } else { "FAIL" }, l.name, l.detail);
        failed += usize::from(!l.pass);
    }
    println!("{} of {} criteria pass", lines.len() - failed, lines.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
