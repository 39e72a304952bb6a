use std::path::{Path, PathBuf};
use std::time::Instant;

use ocs_core::atlas::{
    build_difference_map, build_transition_map, chromaticity_regions, ocs_slice, Axis, Hemisphere, Pixel,
};
use ocs_core::hull::nonconvexity_report;
use ocs_core::probe::{direction_to_target, Prober};
use ocs_core::render::{render_map_annotated, write_file, Palette};
use ocs_core::schrodinger::{compare_with, two_transition_optimal};
use ocs_core::spectral::illuminant_to_csv;
use ocs_core::synth::{smoothest_spectrum, ChromaticityTarget};
use ocs_core::{SphericalDirection, Tristimulus};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{munsell_table, CliError, CliResult, Context, IlluminantSpec, RunConfig};
use crate::output::{emit_csv, emit_json, print_stdout, provenance_comment, sibling};

pub fn hull(cfg: RunConfig, illum: &IlluminantSpec, eps: f64, out: Option<PathBuf>) -> CliResult<()> {
    let ctx = Context::load(cfg, illum)?;
    let r = nonconvexity_report(&ctx.cmf, eps)?;
    let wl = |idx: &[usize]| idx.iter().map(|&k| r.points[k].wavelength_nm).collect::<Vec<f64>>();
    let doc = json!({
        "provenance": ctx.provenance("hull", json!({"eps": eps})),
        "points": r.points.len(),
        "skipped_nm": r.skipped_nm,
        "hull_count": r.hull.hull_indices.len(),
        "hull_indices": r.hull.hull_indices,
        "hull_wavelengths": wl(&r.hull.hull_indices),
        "boundary_wavelengths": wl(&r.hull.boundary_indices),
        "interior_wavelengths": wl(&r.hull.interior_indices),
        "gaps": r.hull.gaps,
        "nonconvex_ranges": r.hull.nonconvex_ranges,
        "max_gap": r.max_gap,
    });
    emit_json(out.as_deref(), &doc)
}

fn ray_target(ctx: &Context, target: Option<[f64; 3]>, dir: Option<(f64, f64)>) -> CliResult<Tristimulus> {
    match (target, dir) {
        (Some(t), _) => Ok(Tristimulus::from_array(t)),
        (None, Some((theta, phi))) => Ok(direction_to_target(&ctx.wcmf, SphericalDirection::new(theta, phi)?)),
        (None, None) => Err(CliError::usage("one of --target or --dir is required")),
    }
}

fn ray_args(target: Option<[f64; 3]>, dir: Option<(f64, f64)>) -> Value {
    json!({"target": target, "dir": dir})
}

fn write_rho(out: &Path, provenance: &Value, ctx: &Context, columns: &[(&str, &[f64])]) -> CliResult<()> {
    let header = std::iter::once("wavelength_nm").chain(columns.iter().map(|c| c.0)).collect::<Vec<_>>().join(",");
    let rows: Vec<String> = ctx
        .cmf
        .grid()
        .wavelengths()
        .enumerate()
        .map(|(k, w)| {
            let mut row = w.to_string();
            for (_, v) in columns {
                row.push_str(&format!(",{:.17e}", v[k]));
            }
            row
        })
        .collect();
    emit_csv(&sibling(out, ".rho.csv"), provenance, &header, &rows)
}

pub fn probe(
    cfg: RunConfig,
    illum: &IlluminantSpec,
    target: Option<[f64; 3]>,
    dir: Option<(f64, f64)>,
    out: Option<PathBuf>,
) -> CliResult<()> {
    let ctx = Context::load(cfg, illum)?;
    let xyz = ray_target(&ctx, target, dir)?;
    let mut prober = Prober::new(&ctx.wcmf, ctx.config.solver);
    let p = prober.probe_target(xyz)?;
    if !p.is_optimal() {
        return Err(CliError::verify(format!("ray LP ended with status {:?}", p.solver_status)));
    }
    let prov = ctx.provenance("probe", ray_args(target, dir));
    let doc = json!({
        "provenance": prov,
        "origin": p.origin,
        "xyz_targ": p.xyz_targ,
        "direction": p.direction,
        "c": p.c,
        "distance": p.distance(),
        "xyz_opt": p.xyz_opt,
        "status": p.solver_status,
        "iterations": p.iterations,
        "profile": p.profile,
        "relevelled_bins": p.relevelled_bins,
        "rho": p.rho.values,
    });
    emit_json(out.as_deref(), &doc)?;
    if let Some(out) = &out {
        write_rho(out, &prov, &ctx, &[("rho", &p.rho.values)])?;
    }
    Ok(())
}

pub fn two_trans(
    cfg: RunConfig,
    illum: &IlluminantSpec,
    target: Option<[f64; 3]>,
    dir: Option<(f64, f64)>,
    out: Option<PathBuf>,
) -> CliResult<()> {
    let ctx = Context::load(cfg, illum)?;
    let xyz = ray_target(&ctx, target, dir)?;
    let s = two_transition_optimal(&ctx.wcmf, xyz)?;
    let rho = s.reflectance(ctx.wcmf.len());
    let prov = ctx.provenance("two-trans", ray_args(target, dir));
    let doc = json!({
        "provenance": prov,
        "xyz_targ": xyz,
        "distance": s.c * (xyz - ctx.wcmf.gray50()).norm(),
        "solution": s,
        "rho": rho,
    });
    emit_json(out.as_deref(), &doc)?;
    if let Some(out) = &out {
        write_rho(out, &prov, &ctx, &[("rho", &rho)])?;
    }
    Ok(())
}

/// Uniform on the sphere.
fn random_direction(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let theta = rng.random_range(0.0..std::f64::consts::TAU);
    let phi = (1.0 - 2.0 * rng.random::<f64>()).clamp(-1.0, 1.0).acos();
    (theta, phi)
}

pub fn compare(
    cfg: RunConfig,
    illum: &IlluminantSpec,
    mut dirs: Vec<(f64, f64)>,
    random: usize,
    seed: u64,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
) -> CliResult<()> {
    let ctx = Context::load(cfg, illum)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    dirs.extend((0..random).map(|_| random_direction(&mut rng)));
    if dirs.is_empty() {
        return Err(CliError::usage("give at least one --dir or --random N"));
    }
    let mut prober = Prober::new(&ctx.wcmf, ctx.config.solver);
    let records = dirs
        .iter()
        .map(|&(t, p)| compare_with(&mut prober, SphericalDirection::new(t, p)?))
        .collect::<Result<Vec<_>, _>>()?;
    let prov = ctx.provenance("compare", json!({"dirs": dirs.len(), "random": random, "seed": seed}));
    if let Some(csv) = &csv {
        let rows: Vec<String> = records
            .iter()
            .map(|r| {
                format!(
                    "{},{},{:.17e},{:.17e},{:.17e},{},{},{}",
                    r.direction.theta,
                    r.direction.phi,
                    r.c_lp,
                    r.c_two,
                    r.delta_distance,
                    r.lp_transitions,
                    kebab(&r.lp_kind),
                    kebab(&r.two.kind)
                )
            })
            .collect();
        emit_csv(csv, &prov, "theta,phi,c_lp,c_two,delta_distance,lp_transitions,lp_kind,two_kind", &rows)?;
    }
    emit_json(out.as_deref(), &json!({"provenance": prov, "records": records}))
}

fn kebab<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

pub struct MapJob {
    pub hemisphere: Hemisphere,
    pub size: usize,
    pub out_dir: PathBuf,
    pub name: Option<String>,
}

/// Transition map, or difference map when `delta` holds the palette range.
pub fn map(cfg: RunConfig, illum: &IlluminantSpec, job: &MapJob, delta: Option<(f64, f64)>) -> CliResult<()> {
    let ctx = Context::load(cfg, illum)?;
    let command = if delta.is_some() { "diff-map" } else { "map" };
    let t0 = Instant::now();
    let m = match delta {
        Some(_) => build_difference_map(&ctx.wcmf, job.hemisphere, job.size, &ctx.config.solver)?,
        None => build_transition_map(&ctx.wcmf, job.hemisphere, job.size, &ctx.config.solver)?,
    };
    let seconds = t0.elapsed().as_secs_f64();
    let palette = match delta {
        Some((floor, ceil)) => Palette::Delta { floor, ceil },
        None => Palette::TransitionCount,
    };
    let stem = job.name.clone().unwrap_or_else(|| format!("{command}-{}", job.hemisphere));
    let prov = ctx.provenance(command, json!({"hemisphere": job.hemisphere, "size": job.size}));
    let base = job.out_dir.join(&stem);
    let files = render_map_annotated(&m, &palette, &base, &[provenance_comment(&prov)])?;
    let components: Vec<usize> = m.components(4).iter().map(Vec::len).collect();
    let deltas: Vec<f64> = m.probed().map(|p| p.delta).filter(|d| d.is_finite()).collect();
    let sidecar = json!({
        "provenance": prov,
        "raster": m.raster,
        "in_disk": m.in_disk,
        "failures": m.failures,
        "odd_counts": m.odd_counts,
        "histogram": m.histogram(),
        "fraction_at_most_2": m.fraction_at_most(2),
        "high_count_regions": components,
        "max_delta": deltas.iter().copied().fold(f64::NAN, f64::max),
        "min_delta": deltas.iter().copied().fold(f64::NAN, f64::min),
        "palette": palette.describe(),
        "seconds": seconds,
        "threads": rayon::current_num_threads(),
        "files": files,
    });
    let json_path = job.out_dir.join(format!("{stem}.json"));
    emit_json(Some(&json_path), &sidecar)?;
    let failed = m.pixels.iter().filter(|p| matches!(p, Pixel::Failed)).count();
    println!(
        "{}: {} in-disk pixels, {failed} failed, {:.1}% with at most 2 transitions, {seconds:.1} s",
        json_path.display(),
        m.in_disk,
        100.0 * m.fraction_at_most(2)
    );
    Ok(())
}

pub fn regions(
    cfg: RunConfig,
    illum: &IlluminantSpec,
    size: usize,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
) -> CliResult<()> {
    let ctx = Context::load(cfg, illum)?;
    let r = chromaticity_regions(&ctx.wcmf, size, &ctx.config.solver)?;
    let prov = ctx.provenance("regions", json!({"size": size}));
    if let Some(csv) = &csv {
        let rows: Vec<String> = r
            .points
            .iter()
            .map(|p| format!("{:.17e},{:.17e},{},{},{},{},{}", p.x, p.y, p.count, kebab(&p.kind), p.hemisphere, p.px, p.py))
            .collect();
        emit_csv(csv, &prov, "x,y,count,kind,hemisphere,px,py", &rows)?;
    }
    emit_json(out.as_deref(), &json!({"provenance": prov, "report": r}))
}

pub fn slice(
    cfg: RunConfig,
    illum: &IlluminantSpec,
    axis: Axis,
    level: f64,
    samples: usize,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
) -> CliResult<()> {
    let ctx = Context::load(cfg, illum)?;
    let s = ocs_slice(&ctx.wcmf, axis, level, samples, &ctx.config.solver)?;
    let prov = ctx.provenance("slice", json!({"axis": axis, "level": level, "samples": samples}));
    if let Some(csv) = &csv {
        let rows: Vec<String> = s
            .samples
            .iter()
            .map(|p| {
                let [x, y, z] = p.xyz_opt.to_array();
                format!("{:.17e},{x:.17e},{y:.17e},{z:.17e},{:.17e},{:.17e},{},{}", p.angle, p.c, p.c_two, p.count, kebab(&p.kind))
            })
            .collect();
        emit_csv(csv, &prov, "angle,x,y,z,c,c_two,count,kind", &rows)?;
    }
    emit_json(out.as_deref(), &json!({"provenance": prov, "slice": s}))
}

pub fn make_illuminant(
    cfg: RunConfig,
    xy: Option<(f64, f64)>,
    label: Option<String>,
    munsell: Option<String>,
    out: Option<PathBuf>,
) -> CliResult<()> {
    // Only the CMF table is needed; the illuminant is what is being made.
    let mut ctx = Context::load(cfg, &IlluminantSpec::EqualEnergy)?;
    let target = match (xy, &munsell) {
        (Some((x, y)), _) => ChromaticityTarget::new(x, y, label.clone().unwrap_or_else(|| format!("x={x} y={y}")))?,
        (None, Some(name)) => {
            let table = munsell_table(ctx.config.munsell_data.as_deref(), &mut ctx.data)?;
            let mut t = table.lookup(name)?.target()?;
            if let Some(l) = &label {
                t.label = l.clone();
            }
            t
        }
        (None, None) => return Err(CliError::usage("give --x and --y, or --munsell")),
    };
    let s = smoothest_spectrum(&ctx.cmf, &target)?;
    let prov = ctx.provenance(
        "make-illuminant",
        json!({"target": target, "min_value": s.min_value, "residual": s.residual, "roughness": s.roughness}),
    );
    let text = format!("# {}\n{}", provenance_comment(&prov), illuminant_to_csv(&s.illuminant));
    match &out {
        Some(path) => write_file(path, text.as_bytes())?,
        None => print_stdout(&text),
    }
    if s.has_negative() {
        eprintln!("warning: smoothest spectrum dips to {:.4} (relative to its maximum)", s.min_value);
    }
    Ok(())
}
