use ocs_core::atlas::{
    build_difference_map, build_transition_map, chromaticity_regions, ocs_slice, Axis, Hemisphere,
};
use ocs_core::hull::{chromaticity, convex_hull, hull_contains, DEFAULT_COLLINEARITY_EPS};
use ocs_core::render::{grid_csv, render_map, render_map_annotated, GridField, Palette};
use ocs_core::spectral::resample_cmf;
use ocs_core::{CmfSet, Error, SolverConfig, TransitionKind, WeightedCmf};

fn ee(step: f64) -> WeightedCmf {
    WeightedCmf::equal_energy(&resample_cmf(&CmfSet::cie1931_2deg(), step).unwrap())
}

#[test]
fn upper_map_is_mostly_two_transition() {
    let w = ee(5.0);
    let m = build_transition_map(&w, Hemisphere::Upper, 32, &SolverConfig::default()).unwrap();
    assert_eq!(m.failures, 0);
    // odd counts come from step-like optima whose first and last runs differ
    assert!(m.odd_counts * 20 < m.in_disk, "{}", m.odd_counts);
    assert!(m.fraction_at_most(2) > 0.9, "{:?}", m.histogram());
    for p in m.probed().filter(|p| p.count > 2) {
        assert_eq!(p.kind, TransitionKind::TypeIILike);
    }
}

#[test]
fn pole_neighborhood_has_few_transitions() {
    let w = ee(10.0);
    let m = build_transition_map(&w, Hemisphere::Upper, 16, &SolverConfig::default()).unwrap();
    for (px, py) in [(7, 7), (7, 8), (8, 7), (8, 8)] {
        let p = m.get(px, py).probe().unwrap();
        assert!(p.count == 0 || p.count == 2, "{}", p.count);
        assert!(p.xyz_opt.z > w.gray50().z);
    }
}

#[test]
fn difference_map_symmetry_and_sign() {
    let w = ee(10.0);
    let cfg = SolverConfig::default();
    let up = build_difference_map(&w, Hemisphere::Upper, 32, &cfg).unwrap();
    let down = build_difference_map(&w, Hemisphere::Lower, 32, &cfg).unwrap();
    let mut compared = 0;
    for py in 0..32 {
        for px in 0..32 {
            let Some(a) = up.get(px, py).probe() else { continue };
            let (qx, qy) = up.raster.antipodal_pixel(px, py);
            let b = down.get(qx, qy).probe().unwrap();
            assert!((a.delta - b.delta).abs() <= 1e-9, "({px},{py}) {} {}", a.delta, b.delta);
            assert!((a.c - b.c).abs() <= 1e-9 * a.c, "({px},{py}) {} {}", a.c, b.c);
            assert_eq!(a.count, b.count);
            compared += 1;
        }
    }
    assert!(compared > 700);
    for p in up.probed().chain(down.probed()) {
        assert!(p.delta >= -1e-9, "{}", p.delta);
        if p.count == 2 {
            assert!(p.delta.abs() <= 1e-8, "{}", p.delta);
        } else if p.count > 2 {
            assert!(p.delta > 0.0, "count {} delta {}", p.count, p.delta);
        }
    }
}

#[test]
fn regions_lie_inside_spectral_locus() {
    let w = ee(10.0);
    let cmf = resample_cmf(&CmfSet::cie1931_2deg(), 10.0).unwrap();
    let chroma = chromaticity(&cmf);
    let hull = convex_hull(&chroma.points, DEFAULT_COLLINEARITY_EPS).unwrap();
    let r = chromaticity_regions(&w, 32, &SolverConfig::default()).unwrap();
    assert!(!r.points.is_empty());
    assert!(r.points.iter().all(|p| p.count > 2));
    for p in &r.points {
        assert!(hull_contains(&chroma.points, &hull, p.x, p.y, 1e-9), "{p:?}");
    }
    let (x, y) = r.illuminant_xy;
    assert!((x - 1.0 / 3.0).abs() < 0.01 && (y - 1.0 / 3.0).abs() < 0.01);
}

#[test]
fn map_output_is_deterministic() {
    let w = ee(10.0);
    let cfg = SolverConfig::default();
    let a = build_transition_map(&w, Hemisphere::Lower, 24, &cfg).unwrap();
    let b = build_transition_map(&w, Hemisphere::Lower, 24, &cfg).unwrap();
    assert_eq!(grid_csv(&a, GridField::Count), grid_csv(&b, GridField::Count));
    assert_eq!(grid_csv(&a, GridField::C), grid_csv(&b, GridField::C));
}

#[test]
fn rendered_files() {
    let w = ee(10.0);
    let m = build_difference_map(&w, Hemisphere::Upper, 16, &SolverConfig::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = render_map(&m, &Palette::TransitionCount, dir.path().join("upper")).unwrap();
    let bytes = std::fs::read(&out.image).unwrap();
    assert_eq!(bytes.len(), "P6\n16 16\n255\n".len() + 3 * 256);
    assert_eq!(out.grids.len(), 3);
    let csv = std::fs::read_to_string(&out.grids[0]).unwrap();
    assert_eq!(csv.lines().count(), 16);

    let notes = vec!["size 16".to_string(), "two\nlines".to_string()];
    let ann = render_map_annotated(&m, &Palette::TransitionCount, dir.path().join("ann"), &notes).unwrap();
    let bytes = std::fs::read(&ann.image).unwrap();
    let header = "P6\n# size 16\n# two lines\n16 16\n255\n";
    assert_eq!(&bytes[..header.len()], header.as_bytes());
    assert_eq!(&bytes[header.len()..], &std::fs::read(&out.image).unwrap()["P6\n16 16\n255\n".len()..]);
    let csv = std::fs::read_to_string(&ann.grids[2]).unwrap();
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 16);
}

#[test]
fn small_raster_is_rejected() {
    let w = ee(10.0);
    assert!(matches!(
        build_transition_map(&w, Hemisphere::Upper, 8, &SolverConfig::default()),
        Err(Error::Argument(_))
    ));
}

fn segments_cross(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> bool {
    let orient = |p: (f64, f64), q: (f64, f64), r: (f64, f64)| (q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0);
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

#[test]
fn y_slice_is_planar_and_simple() {
    let w = ee(5.0);
    let s = ocs_slice(&w, Axis::Y, 50.0, 120, &SolverConfig::default()).unwrap();
    assert_eq!(s.samples.len(), 120);
    for smp in &s.samples {
        assert!((smp.xyz_opt.y - 50.0).abs() <= 3e-9, "{}", smp.xyz_opt.y);
        assert!(smp.c >= smp.c_two - 1e-9 * smp.c);
        if smp.count == 2 {
            assert!((smp.c - smp.c_two).abs() <= 1e-8 * smp.c);
        }
    }
    // polygon in the (Z, X) plane
    let pts: Vec<(f64, f64)> = s.samples.iter().map(|p| (p.xyz_opt.z, p.xyz_opt.x)).collect();
    let n = pts.len();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            assert!(!segments_cross(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]), "edges {i} {j}");
        }
    }
}

#[test]
fn slice_near_black_is_small() {
    let w = ee(10.0);
    let s = ocs_slice(&w, Axis::Y, 1e-3, 36, &SolverConfig::default()).unwrap();
    for smp in &s.samples {
        assert!(smp.xyz_opt.norm() < 0.1, "{}", smp.xyz_opt);
    }
    assert!(matches!(ocs_slice(&w, Axis::Y, 0.0, 36, &SolverConfig::default()), Err(Error::Argument(_))));
    assert!(matches!(ocs_slice(&w, Axis::X, 200.0, 36, &SolverConfig::default()), Err(Error::Argument(_))));
}
