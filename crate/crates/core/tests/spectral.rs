use ocs_core::spectral::{
    illuminant_to_csv, load_cmf, load_illuminant, normalize_illuminant, weight_cmf, CmfSet, Illuminant,
};
use ocs_core::Error;

#[test]
fn bundled_table_loads_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cmf.csv");
    std::fs::write(&path, CmfSet::cie1931_2deg_source()).unwrap();
    let cmf = load_cmf(&path, None).unwrap();
    assert_eq!(cmf, CmfSet::cie1931_2deg());
    let grid = *cmf.grid();
    assert!(load_cmf(&path, Some(&grid)).is_ok());
}

#[test]
fn missing_file_is_an_io_error() {
    let err = load_cmf("/nonexistent/cmf.csv", None).unwrap_err();
    assert!(matches!(err, Error::Io { .. }), "{err}");
}

#[test]
fn illuminant_round_trip_and_normalization() {
    let cmf = CmfSet::cie1931_2deg();
    let power: Vec<f64> = (0..cmf.len()).map(|k| 0.5 + (k as f64 / 100.0).sin().abs()).collect();
    let illum = Illuminant::new(*cmf.grid(), power).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("illum.csv");
    std::fs::write(&path, illuminant_to_csv(&illum)).unwrap();
    let back = load_illuminant(&path).unwrap();
    for (a, b) in back.power().iter().zip(illum.power()) {
        assert!((a - b).abs() <= 1e-15 * b.abs());
    }
    let norm = normalize_illuminant(&back, &cmf).unwrap();
    let w = weight_cmf(&cmf, &norm).unwrap();
    assert!((w.white_point().y - 100.0).abs() < 1e-9);
    assert!(matches!(weight_cmf(&cmf, &back), Err(Error::Argument(_))));
}
