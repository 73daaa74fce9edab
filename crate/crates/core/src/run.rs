//! Dispatch from a validated configuration to the verification routines.

use crate::config::{Check, RunConfig};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, ExecPolicy};
use crate::geometry::{norm, GeometryKind};
use crate::pathspace::CylinderFunctional;
use crate::report::{
    decay_table, equiv_table, identity_table, mc_table, write_report, Field, Format, Table,
};
use crate::rng::{path_stream, StreamPurpose};
use crate::sde::{simulate_bm, simulate_bridge, PathKind};
use crate::verify::{
    endpoint_decay_check, flat_bridge_second_moment, girsanov_check, ibp_check_many,
    identity_suite, radial_law_check, random_sample_points, representation_equiv_check,
    McReport, McSettings,
};

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const THRESHOLD: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const FAILURE_BUDGET: i32 = 3;
    /// I/O and numerical errors outside the failure budget.
    pub const OTHER: i32 = 4;
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub check: Check,
    pub passed: bool,
    /// Labels of the comparisons that missed their threshold.
    pub failures: Vec<String>,
    /// Written to `output.json`.
    pub summary: Table,
    /// Written to `output.csv`.
    pub table: Table,
    /// Written to `output.path_dump` (the `simulate` check only).
    pub paths: Option<Table>,
}

/// Runs the configured check and writes the configured outputs.
pub fn run_experiment(config: &RunConfig) -> Result<RunOutcome> {
    run_experiment_with(config, ExecPolicy::default())
}

pub fn run_experiment_with(config: &RunConfig, policy: ExecPolicy) -> Result<RunOutcome> {
    let outcome = evaluate(config, policy)?;
    let out = &config.output;
    if let Some(p) = &out.json {
        write_report(&outcome.summary, Format::Json, p)?;
    }
    if let Some(p) = &out.csv {
        write_report(&outcome.table, Format::Csv, p)?;
    }
    if let (Some(p), Some(t)) = (&out.path_dump, &outcome.paths) {
        write_report(t, Format::Csv, p)?;
    }
    Ok(outcome)
}

/// Runs the configured check without touching the file system.
pub fn evaluate(config: &RunConfig, policy: ExecPolicy) -> Result<RunOutcome> {
    let geom = &config.geometry;
    let sim = &config.simulation;
    let exp = &config.experiment;
    let settings = McSettings::new(sim.paths, sim.grid.clone(), sim.seed).with_policy(policy);
    let label = geom.label();
    let flat = matches!(geom.kind(), GeometryKind::Euclidean);

    let mc = |check: Check, reports: Vec<McReport>| {
        let failures = reports.iter().filter(|r| !r.passed()).map(|r| r.label.clone()).collect();
        let t = mc_table(&label, &reports);
        outcome(check, failures, t.clone(), t, None)
    };

    match exp.check {
        Check::Ibp => Ok(mc(Check::Ibp, ibp_check_many(geom, &sim.x0, &exp.combos, &settings)?)),
        Check::Girsanov => {
            let mut reports = Vec::new();
            for g in &exp.functionals {
                for &t in &exp.t {
                    let rep = girsanov_check(geom, &sim.x0, t, g, &settings)?;
                    let tn = sim.grid.t(sim.grid.node_for(t)?);
                    if flat && is_dist2_at(g, tn, &sim.grid) {
                        let exact = flat_bridge_second_moment(geom.dim(), sim.x0.radius(), tn);
                        reports.push(
                            rep.weighted
                                .rhs_against(format!("flat bridge E[r^2] t={tn} vs exact"), exact),
                        );
                    }
                    reports.push(rep.weighted);
                    reports.push(rep.martingale);
                }
            }
            Ok(mc(Check::Girsanov, reports))
        }
        Check::Radial => {
            let reps = radial_law_check(geom, &sim.x0, &exp.t, &settings)?;
            let mut reports = Vec::with_capacity(reps.len());
            for (j, pair) in reps.chunks(2).enumerate() {
                reports.extend_from_slice(pair);
                if flat {
                    let tn = sim.grid.t(sim.grid.node_for(exp.t[j])?);
                    let exact = flat_bridge_second_moment(geom.dim(), sim.x0.radius(), tn);
                    reports.push(pair[1].lhs_against(format!("flat bridge E[r^2] t={tn} vs exact"), exact));
                    reports.push(pair[1].rhs_against(format!("flat bessel E[r^2] t={tn} vs exact"), exact));
                }
            }
            Ok(mc(Check::Radial, reports))
        }
        Check::Decay => {
            let mut tables = Vec::new();
            let mut failures = Vec::new();
            let mut summary = Table::new(["direction", "pinned", "expectation", "passed"]);
            for h in &exp.directions {
                let d = endpoint_decay_check(geom, &sim.x0, h, &exp.t, &settings)?;
                let (expectation, ok) = if h.is_pinned() {
                    ("decreasing", d.passes())
                } else {
                    ("no decay", d.no_decay())
                };
                if !ok {
                    failures.push(format!("decay h={}: expected {expectation}", h.key()));
                }
                summary.push(vec![h.key().into(), h.is_pinned().into(), expectation.into(), ok.into()]);
                tables.push(d);
            }
            Ok(outcome(Check::Decay, failures, summary, decay_table(&tables), None))
        }
        Check::Identities => {
            let points = random_sample_points(geom.dim(), exp.points, exp.r_min, exp.r_max, sim.seed);
            let rep = identity_suite(geom, &points, &exp.taus)?;
            let mut checks: Vec<&str> = Vec::new();
            for r in &rep.rows {
                if !checks.contains(&r.check) {
                    checks.push(r.check);
                }
            }
            let mut summary = Table::new(["geometry", "check", "count", "worst_rel_err", "tol", "passed"]);
            let mut failures = Vec::new();
            for c in checks {
                let rows: Vec<_> = rep.rows.iter().filter(|r| r.check == c).collect();
                let ok = rows.iter().all(|r| r.passed);
                if !ok {
                    failures.push(format!("identity {c}"));
                }
                summary.push(vec![
                    label.clone().into(),
                    c.into(),
                    rows.len().into(),
                    rep.worst(c).into(),
                    rows[0].tol.into(),
                    ok.into(),
                ]);
            }
            Ok(outcome(Check::Identities, failures, summary, identity_table(&rep), None))
        }
        Check::Equiv => {
            let mut tables = Vec::new();
            let mut failures = Vec::new();
            let mut summary = Table::new(["direction", "halvings", "monotone", "residual_monotone"]);
            for h in &exp.directions {
                let e = representation_equiv_check(geom, &sim.x0, h, exp.halvings, &settings)?;
                if !e.monotone() {
                    failures.push(format!("equiv h={}: gap not decreasing", h.key()));
                }
                summary.push(vec![
                    h.key().into(),
                    exp.halvings.into(),
                    e.monotone().into(),
                    e.residual_monotone().into(),
                ]);
                tables.push(e);
            }
            Ok(outcome(Check::Equiv, failures, summary, equiv_table(&tables), None))
        }
        Check::Simulate => simulate(config, policy),
    }
}

fn outcome(check: Check, failures: Vec<String>, summary: Table, table: Table, paths: Option<Table>) -> RunOutcome {
    RunOutcome {
        check,
        passed: failures.is_empty(),
        failures,
        summary,
        table,
        paths,
    }
}

/// `dist2(s)` with `s` snapping to the same node as `t`.
fn is_dist2_at(g: &CylinderFunctional, t: f64, grid: &crate::sde::TimeGrid) -> bool {
    match g {
        CylinderFunctional::Dist2 { t: s } => grid.nearest_node(*s) == grid.nearest_node(t),
        _ => false,
    }
}

fn simulate(config: &RunConfig, policy: ExecPolicy) -> Result<RunOutcome> {
    let geom = &config.geometry;
    let sim = &config.simulation;
    let exp = &config.experiment;
    let n = geom.dim();
    let (purpose, kind) = match exp.process {
        PathKind::Bridge => (StreamPurpose::Bridge, PathKind::Bridge),
        PathKind::Free => (StreamPurpose::Free, PathKind::Free),
    };
    let results = map_indexed(sim.paths, policy, |i| {
        let mut rng = path_stream(sim.seed, purpose, i as u64);
        match kind {
            PathKind::Bridge => simulate_bridge(geom, &sim.x0, &sim.grid, &mut rng),
            PathKind::Free => simulate_bm(geom, &sim.x0, &sim.grid, &mut rng),
        }
    });

    let mut columns = vec!["path".to_string(), "t".to_string()];
    columns.extend((1..=n).map(|i| format!("x_{i}")));
    columns.push("r".into());
    if exp.frames {
        for a in 1..=n {
            columns.extend((1..=n).map(|k| format!("u_{k}{a}")));
        }
    }
    let mut dump = Table::new(columns);
    let mut summary = Table::new(["path", "status", "r_end", "max_frame_defect"]);
    let mut failures = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(path) => {
                for k in 0..path.len() {
                    let x = path.point(k);
                    let mut row: Vec<Field> = vec![i.into(), path.grid().t(k).into()];
                    row.extend(x.iter().map(|&v| Field::Num(v)));
                    row.push(norm(x).into());
                    if exp.frames {
                        row.extend(path.frame(k).iter().map(|&v| Field::Num(v)));
                    }
                    dump.push(row);
                }
                let last = path.point(path.len() - 1);
                summary.push(vec![
                    i.into(),
                    "ok".into(),
                    norm(last).into(),
                    path.max_orthonormality_defect(geom).into(),
                ]);
            }
            Err(e @ Error::Simulation { .. }) => {
                failures.push(format!("path {i}: {e}"));
                summary.push(vec![i.into(), e.to_string().into(), f64::NAN.into(), f64::NAN.into()]);
            }
            Err(e) => return Err(e),
        }
    }
    if failures.len() as f64 > crate::verify::FAILURE_BUDGET * sim.paths as f64 {
        return Err(Error::FailureBudget {
            failed: failures.len(),
            total: sim.paths,
        });
    }
    let table = summary.clone();
    Ok(RunOutcome {
        check: Check::Simulate,
        passed: true,
        failures: Vec::new(),
        summary,
        table,
        paths: Some(dump),
    })
}

/// Exit status for a finished (or aborted) run.
pub fn exit_code(result: &Result<RunOutcome>) -> i32 {
    match result {
        Ok(o) if o.passed => exit::PASS,
        Ok(_) => exit::THRESHOLD,
        Err(Error::Config(_) | Error::InvalidInput(_) | Error::DimensionMismatch { .. }) => exit::CONFIG,
        Err(Error::DegeneratePoint { .. }) => exit::CONFIG,
        Err(Error::FailureBudget { .. }) => exit::FAILURE_BUDGET,
        Err(_) => exit::OTHER,
    }
}

/// One-line JSON status record for a finished (or aborted) run.
pub fn status_json(check: Check, result: &Result<RunOutcome>) -> String {
    let code = exit_code(result);
    let mut t = Table::new(["check", "status", "exit_code", "failures", "error"]);
    let (status, failures, error) = match result {
        Ok(o) if o.passed => ("pass", String::new(), String::new()),
        Ok(o) => ("fail", o.failures.join("; "), String::new()),
        Err(e) => ("error", String::new(), e.to_string()),
    };
    t.push(vec![
        check.name().into(),
        status.into(),
        (code as u64).into(),
        failures.into(),
        error.into(),
    ]);
    t.render(Format::Json)
}
