//! Acceptance battery. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::Instant;

use polebridge::exec::with_jobs;
use polebridge::geometry::{hyperbolic_phi_closed_form, ChartPoint, GeometryModel};
use polebridge::pathspace::{CmDirection, CylinderFunctional};
use polebridge::report::{decay_table, mc_table, Field, Format, Table};
use polebridge::sde::{make_time_grid, Refinement, TimeGrid};
use polebridge::verify::{
    divergence_mean_check, endpoint_decay_check, flat_bridge_second_moment, girsanov_check,
    ibp_check, ibp_check_many, identity_suite, oracles::fd_laplacian, radial_law_check,
    random_sample_points, representation_equiv_check, IbpCombo, McReport, McSettings,
    Z_THRESHOLD,
};
use polebridge::Result;

const PATHS: usize = 50_000;

struct Outcome {
    passed: bool,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            passed: true,
            details: Vec::new(),
        }
    }

    fn expect(&mut self, ok: bool, detail: String) {
        self.passed &= ok;
        self.details.push(format!("{} {detail}", if ok { "ok  " } else { "FAIL" }));
    }

    fn note(&mut self, detail: String) {
        self.details.push(format!("     {detail}"));
    }

    fn mc(&mut self, r: &McReport) {
        self.expect(
            r.passed(),
            format!(
                "{}: lhs {:.6} rhs {:.6} se {:.2e} z {:+.2}",
                r.label, r.lhs, r.rhs, r.se_diff, r.z
            ),
        );
    }
}

fn grid(steps: usize) -> TimeGrid {
    make_time_grid(steps, 1e-4, Refinement::DEFAULT).unwrap()
}

fn start(n: usize) -> ChartPoint {
    let mut x = vec![0.0; n];
    x[0] = 1.0;
    ChartPoint::new(x)
}

fn euclidean(n: usize) -> GeometryModel {
    GeometryModel::euclidean(n).unwrap()
}

fn hyperbolic(n: usize, c: f64) -> GeometryModel {
    GeometryModel::hyperbolic(n, c).unwrap()
}

fn identity_criterion() -> Result<Outcome> {
    let mut o = Outcome::new();
    let geoms = [
        euclidean(1),
        euclidean(2),
        euclidean(3),
        hyperbolic(2, 1.0),
        hyperbolic(3, 1.0),
        hyperbolic(3, 0.5),
    ];
    for g in &geoms {
        let pts = random_sample_points(g.dim(), 50, 0.1, 4.0, 2024);
        let rep = identity_suite(g, &pts, &[0.1, 0.5, 1.0])?;
        let pde = rep.worst("pde_identity");
        let pde_fd = rep.worst("pde_identity_fd");
        let phi_fd = rep.worst("phi_fd");
        o.expect(
            rep.passed() && pde <= 1e-8 && pde_fd <= 1e-5 && phi_fd <= 1e-5,
            format!(
                "{}: {} checks, worst PDE {pde:.1e} (closed) {pde_fd:.1e} (fd), Φ vs fd {phi_fd:.1e}",
                g.label(),
                rep.rows.len()
            ),
        );
        for f in rep.failures().iter().take(3) {
            o.note(format!("{f:?}"));
        }
    }

    let h3 = hyperbolic(3, 1.0);
    let worst = (1..=40)
        .map(|i| 0.1 * i as f64)
        .map(|r| (hyperbolic_phi_closed_form(3, 1.0, r) + 0.5).abs().max((h3.phi(r) + 0.5).abs()))
        .fold(0.0, f64::max);
    o.expect(worst <= 1e-12, format!("Φ(H³, c=1) = −0.5: worst deviation {worst:.1e} over r ∈ (0, 4]"));

    let h2 = hyperbolic(2, 1.0);
    let closed = hyperbolic_phi_closed_form(2, 1.0, 1.0);
    let inv_sqrt_j = |y: &[f64]| (-0.5 * h2.radial_terms(polebridge::geometry::norm(y)).log_j).exp();
    let fd = 0.5 * (0.5 * h2.radial_terms(1.0).log_j).exp() * fd_laplacian(&h2, &inv_sqrt_j, &[1.0, 0.0])?;
    o.expect(
        (closed + 0.159491).abs() <= 1e-5 && (fd + 0.159491).abs() <= 1e-5 && (h2.phi(1.0) - closed).abs() <= 1e-12,
        format!("Φ(H², c=1, r=1): closed {closed:.7} fd {fd:.7} (target −0.159491 ± 1e-5)"),
    );
    Ok(o)
}

fn flat_ibp_criterion() -> Result<Outcome> {
    let mut o = Outcome::new();
    let g = euclidean(2);
    let combo = IbpCombo::parse("coord(1,1,0.5)", "one", "sine(1,1)", 2)?;
    let settings = McSettings::new(PATHS, grid(2000), 17);
    let coarse = ibp_check(&g, &start(2), &combo, &settings)?;
    let fine = ibp_check(&g, &start(2), &combo, &settings.clone().refined(1))?;
    o.expect(
        (coarse.lhs - 0.450158).abs() < 1e-6 && coarse.se_lhs < 1e-12,
        format!("lhs = {:.9} (deterministic, se {:.1e}); target 0.450158", coarse.lhs, coarse.se_lhs),
    );
    o.mc(&coarse);
    let combined = coarse.se_rhs.hypot(fine.se_rhs);
    let shift = (fine.rhs - coarse.rhs).abs();
    o.expect(
        shift < combined,
        format!(
            "halved dt ({} → {} steps, same Brownian paths): rhs {:.6} → {:.6}, |Δ| {shift:.2e} < combined SE {combined:.2e}",
            coarse.grid.steps, fine.grid.steps, coarse.rhs, fine.rhs
        ),
    );
    Ok(o)
}

const CURVED_COMBOS: [(&str, &str, &str); 6] = [
    ("coord(1,1,0.5)", "one", "sine(1,1)"),
    ("dist2(0.5)", "bump(0.5)", "sine(1,1)"),
    ("coord(1,2,0.25)", "dist2(0.75)", "sine(1,2)"),
    ("bump(0.75)", "coord(1,1,0.25)", "sine(2,1)"),
    ("prod(coord(1,1,0.25),coord(1,2,0.5))", "one", "sine(1,2)"),
    ("dist2(0.25)", "one", "sine(2,2)"),
];

fn curved_ibp_criterion() -> Result<Outcome> {
    let mut o = Outcome::new();
    for n in [2, 3] {
        let g = hyperbolic(n, 1.0);
        let combos = CURVED_COMBOS
            .iter()
            .map(|(f, gg, h)| IbpCombo::parse(f, gg, h, n))
            .collect::<Result<Vec<_>>>()?;
        let mut any_seed = false;
        for seed in [7, 11] {
            let reps = ibp_check_many(&g, &start(n), &combos, &McSettings::new(PATHS, grid(1000), seed))?;
            let over3 = reps.iter().filter(|r| r.z.abs() >= Z_THRESHOLD).count();
            let over2 = reps.iter().filter(|r| r.z.abs() > 2.0).count();
            let seed_ok = over3 == 0 && over2 <= 1;
            o.note(format!(
                "{} seed {seed}: {} of 6 with |z| ≥ 3, {} in (2, 3] → {}",
                g.label(),
                over3,
                over2,
                if seed_ok { "pass" } else { "fail" }
            ));
            for r in &reps {
                o.note(format!("  {}: lhs {:.5} rhs {:.5} z {:+.2}", r.label, r.lhs, r.rhs, r.z));
            }
            if seed_ok {
                any_seed = true;
                break;
            }
        }
        o.expect(any_seed, format!("{}: all six combinations pass on a fixed seed", g.label()));
    }
    Ok(o)
}

fn divergence_criterion() -> Result<Outcome> {
    let mut o = Outcome::new();
    for g in [euclidean(2), hyperbolic(2, 1.0), hyperbolic(3, 1.0)] {
        let n = g.dim();
        let h = CmDirection::parse("sine(1,1)", n)?;
        let r = divergence_mean_check(&g, &start(n), &h, &McSettings::new(PATHS, grid(1000), 23))?;
        o.expect(
            r.passed(),
            format!("{}: E[div h] = {:+.5} ± {:.5} (z {:+.2})", g.label(), r.lhs, r.se_lhs, r.z),
        );
    }
    Ok(o)
}

fn radial_criterion() -> Result<Outcome> {
    let mut o = Outcome::new();
    let slices = [0.25, 0.5, 0.75];
    for g in [euclidean(2), hyperbolic(3, 1.0)] {
        let n = g.dim();
        let settings = McSettings::new(PATHS, grid(1000), 31);
        let reps = radial_law_check(&g, &start(n), &slices, &settings)?;
        for r in &reps {
            o.mc(r);
        }
        if g.is_flat() {
            let second = reps
                .iter()
                .find(|r| r.label.contains("E[r^2] t=0.5 "))
                .expect("slice 0.5 present");
            let exact = flat_bridge_second_moment(2, 1.0, 0.5);
            o.mc(&second.lhs_against(format!("bridge E[r²] at t=0.5 vs {exact}"), exact));
            o.mc(&second.rhs_against(format!("bessel E[r²] at t=0.5 vs {exact}"), exact));
        }
    }
    Ok(o)
}

fn girsanov_criterion() -> Result<Outcome> {
    let mut o = Outcome::new();
    for g in [euclidean(2), hyperbolic(2, 1.0)] {
        let f = CylinderFunctional::parse("dist2(0.5)", 2)?;
        let rep = girsanov_check(&g, &start(2), 0.5, &f, &McSettings::new(PATHS, grid(1000), 41))?;
        o.mc(&rep.martingale);
        o.mc(&rep.weighted);
        if g.is_flat() {
            o.mc(&rep.weighted.rhs_against("flat bridge E[r²_0.5] vs 0.75", 0.75));
        }
    }
    Ok(o)
}

fn decay_criterion() -> Result<Outcome> {
    let mut o = Outcome::new();
    let ts = [0.9, 0.99, 0.999];
    for g in [euclidean(2), hyperbolic(2, 1.0)] {
        let settings = McSettings::new(20_000, grid(1000), 53);
        let pinned = endpoint_decay_check(&g, &start(2), &CmDirection::parse("sine(1,1)", 2)?, &ts, &settings)?;
        let ramp = endpoint_decay_check(&g, &start(2), &CmDirection::parse("ramp(1)", 2)?, &ts, &settings)?;
        let fmt = |t: &polebridge::verify::DecayTable| {
            t.rows
                .iter()
                .map(|r| format!("m({}) = {:.3e} ± {:.1e}", r.t, r.m, r.se))
                .collect::<Vec<_>>()
                .join(", ")
        };
        o.expect(pinned.passes(), format!("{} sine(1,1): {}", g.label(), fmt(&pinned)));
        o.expect(ramp.no_decay(), format!("{} ramp(1) control: {}", g.label(), fmt(&ramp)));
    }
    Ok(o)
}

fn equiv_criterion() -> Result<Outcome> {
    let mut o = Outcome::new();
    for g in [euclidean(2), hyperbolic(2, 1.0)] {
        let h = CmDirection::parse("sine(1,1)", 2)?;
        let settings = McSettings::new(5_000, grid(250), 61);
        let t = representation_equiv_check(&g, &start(2), &h, 3, &settings)?;
        let gaps: Vec<String> = t.rows.iter().map(|r| format!("{}: {:.4e}", r.steps, r.mean_gap)).collect();
        o.expect(t.monotone(), format!("{} mean gap {}", g.label(), gaps.join(", ")));
        let res: Vec<String> = t
            .rows
            .iter()
            .map(|r| format!("{:.2e}", r.mean_residual))
            .collect();
        o.note(format!(
            "boundary term E|Y| {:.4e}; gap with boundary removed {}",
            t.rows[t.rows.len() - 1].mean_boundary,
            res.join(", ")
        ));
    }
    Ok(o)
}

/// Report text with the wall-clock column zeroed.
fn stable(mut table: Table) -> String {
    if let Some(c) = table.columns.iter().position(|c| c == "wall_time") {
        for row in &mut table.rows {
            row[c] = Field::Num(0.0);
        }
    }
    table.render(Format::Json) + &table.render(Format::Csv)
}

fn determinism_criterion() -> Result<Outcome> {
    let mut o = Outcome::new();
    let g = hyperbolic(2, 1.0);
    let combos = CURVED_COMBOS[..3]
        .iter()
        .map(|(f, gg, h)| IbpCombo::parse(f, gg, h, 2))
        .collect::<Result<Vec<_>>>()?;
    let settings = McSettings::new(3_000, grid(400), 71);
    let h = CmDirection::parse("sine(1,1)", 2)?;
    let run = |jobs: usize| -> Result<String> {
        with_jobs(Some(jobs), || {
            let mut reports = ibp_check_many(&g, &start(2), &combos, &settings)?;
            reports.extend(radial_law_check(&g, &start(2), &[0.5], &settings)?);
            let decay = endpoint_decay_check(&g, &start(2), &h, &[0.9, 0.99], &settings)?;
            Ok(stable(mc_table(&g.label(), &reports)) + &stable(decay_table(&[decay])))
        })
    };
    let reference = run(1)?;
    for jobs in [1, 4, 8] {
        let again = run(jobs)?;
        o.expect(
            again == reference,
            format!("{jobs} worker(s): {} bytes, identical to the 1-worker run", again.len()),
        );
    }
    Ok(o)
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 9] = [
        ("identity suite", identity_criterion),
        ("flat closed-form IBP", flat_ibp_criterion),
        ("curved IBP battery", curved_ibp_criterion),
        ("divergence mean zero", divergence_criterion),
        ("radial law", radial_criterion),
        ("Girsanov", girsanov_criterion),
        ("endpoint decay", decay_criterion),
        ("representation equivalence", equiv_criterion),
        ("determinism", determinism_criterion),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = i + 1;
        if only.is_some_and(|k| k != id) {
            continue;
        }
        let t0 = Instant::now();
        let result = f();
        let secs = t0.elapsed().as_secs_f64();
        match result {
            Ok(out) => {
                println!(
                    "criterion {id} {name}: {} ({secs:.1} s)",
                    if out.passed { "PASS" } else { "FAIL" }
                );
                for d in &out.details {
                    println!("    {d}");
                }
                failed += usize::from(!out.passed);
            }
            Err(e) => {
                println!("criterion {id} {name}: FAIL ({secs:.1} s): {e}");
                failed += 1;
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        std::process::exit(1);
    }
}
