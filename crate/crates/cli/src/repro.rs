//! Reference checks: spectral-locus hull, two example targets, and the
//! checkpoint direction whose LP optimum beats the best two-transition color.

use std::path::PathBuf;

use ocs_core::hull::{nonconvexity_report, DEFAULT_COLLINEARITY_EPS};
use ocs_core::probe::{direction_to_target, Prober};
use ocs_core::schrodinger::compare_with;
use ocs_core::{SphericalDirection, Tristimulus};
use serde::Serialize;
use serde_json::json;

use crate::config::{CliError, CliResult, Context, IlluminantSpec, RunConfig};
use crate::output::emit_json;

const CHECKPOINT: (f64, f64) = (1.478858, 0.371322);
const CHECKPOINT_TARGET: [f64; 3] = [50.03731, 50.36132, 50.94838];
const CHECKPOINT_LP: [f64; 3] = [51.79069, 69.37875, 99.99523];
const CHECKPOINT_TWO: [f64; 3] = [51.79066, 69.37828, 99.99402];
const CHECKPOINT_DELTA: f64 = 1.29e-3;

#[derive(Debug, Serialize)]
struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn check(name: &'static str, pass: bool, detail: String) -> Check {
    Check { name, pass, detail }
}

fn run_checks(ctx: &Context) -> CliResult<Vec<Check>> {
    let mut out = Vec::new();

    let r = nonconvexity_report(&ctx.cmf, DEFAULT_COLLINEARITY_EPS)?;
    let count = r.hull.hull_indices.len();
    let blue = r.hull.nonconvex_ranges.iter().any(|g| g.bracket_low_nm <= 435.0 && g.bracket_high_nm >= 453.0);
    out.push(check(
        "hull-count",
        count == 161 && blue,
        format!("{count} hull points of {}, blue pocket present: {blue}", r.points.len()),
    ));
    let gap = r
        .hull
        .nonconvex_ranges
        .iter()
        .filter(|g| g.first_nm > 574.0 && g.last_nm < 650.0)
        .map(|g| g.max_gap)
        .fold(0.0, f64::max);
    out.push(check("hull-gap", (2e-5..=2e-4).contains(&gap), format!("largest gap above 574 nm {gap:.3e}")));

    let mut prober = Prober::new(&ctx.wcmf, ctx.config.solver);
    for (name, target, want) in [
        ("two-transition-target", [10.0, 40.0, 30.0], 2),
        ("four-transition-target", [49.1, 40.3, 25.0], 4),
    ] {
        let p = prober.probe_target(Tristimulus::from_array(target))?;
        out.push(check(
            name,
            p.is_optimal() && p.profile.count == want,
            format!("{:?}: {} transitions ({:?}), want {want}", target, p.profile.count, p.profile.kind),
        ));
    }

    let dir = SphericalDirection::new(CHECKPOINT.0, CHECKPOINT.1)?;
    let target = direction_to_target(&ctx.wcmf, dir);
    let c = compare_with(&mut prober, dir)?;
    let e_t = target.max_abs_diff(Tristimulus::from_array(CHECKPOINT_TARGET));
    let e_lp = c.xyz_lp.max_abs_diff(Tristimulus::from_array(CHECKPOINT_LP));
    let e_two = c.xyz_two.max_abs_diff(Tristimulus::from_array(CHECKPOINT_TWO));
    let rel = (c.delta_distance - CHECKPOINT_DELTA).abs() / CHECKPOINT_DELTA;
    out.push(check(
        "checkpoint-direction",
        e_t <= 1e-4 && e_lp <= 1e-3 && e_two <= 1e-3 && rel <= 0.05 && c.lp_transitions > 2,
        format!(
            "target {target}, LP {} with {} transitions, two-transition {}, delta {:.4e}",
            c.xyz_lp, c.lp_transitions, c.xyz_two, c.delta_distance
        ),
    ));
    Ok(out)
}

pub fn run(cfg: RunConfig, illum: &IlluminantSpec, out_dir: Option<PathBuf>) -> CliResult<()> {
    let ctx = Context::load(cfg, illum)?;
    let checks = run_checks(&ctx)?;
    for c in &checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    println!("repro: {} of {} checks passed", checks.len() - failed, checks.len());
    if let Some(dir) = out_dir {
        let doc = json!({
            "provenance": ctx.provenance("repro", json!({})),
            "checks": checks,
            "passed": failed == 0,
        });
        emit_json(Some(&dir.join("repro.json")), &doc)?;
    }
    if failed > 0 {
        return Err(CliError::verify(format!("{failed} reference check(s) failed")));
    }
    Ok(())
}
