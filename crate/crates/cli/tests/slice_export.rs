use cylspec::manufactured::HeatSolution;
use cylspec::{GridField, GridSpec};
use cylspec_cli::export::{export_slice_csv, write_slice_csv, Plane};
use cylspec_cli::{Error, FieldData};

fn rows(field: &GridField, plane: Plane, res: usize) -> Vec<(f64, f64, f64)> {
    let coeffs = cylspec::TransformPlan::new(*field.spec()).analyze(field).unwrap();
    let mut buf = Vec::new();
    write_slice_csv(&coeffs, plane, res, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("coord1,coord2,value"));
    lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (v[0], v[1], v[2])
        })
        .collect()
}

#[test]
fn constant_field_gives_constant_column() {
    let spec = GridSpec::new(9, 7, 8).unwrap();
    let f = GridField::from_fn(spec, |_, _, _| 2.5);
    for plane in [Plane::Z(0.3), Plane::Theta(1.0), Plane::R(0.7)] {
        let r = rows(&f, plane, 6);
        assert_eq!(r.len(), 36);
        assert!(r.iter().all(|&(_, _, v)| (v - 2.5).abs() < 1e-13));
    }
}

#[test]
fn radius_on_theta_slice() {
    let spec = GridSpec::new(9, 5, 8).unwrap();
    // r itself is not smooth at the axis; x = r cos θ is, and equals r on θ = 0
    let f = GridField::from_fn(spec, |r, _, th| r * th.cos());
    for (r, _, v) in rows(&f, Plane::Theta(0.0), 11) {
        assert!((v - r).abs() < 1e-13, "{r} {v}");
    }
}

#[test]
fn heat_solution_slice_matches_analytic() {
    let spec = GridSpec::new(12, 9, 8).unwrap();
    let sol = HeatSolution::with_tilt(1.0, 0.5);
    let f = GridField::from_fn(spec, |r, z, th| sol.value(r, z, th, 0.0));
    for (r, th, v) in rows(&f, Plane::Z(0.25), 17) {
        assert!((v - sol.value(r, 0.25, th, 0.0)).abs() < 1e-10);
    }
    for (th, z, v) in rows(&f, Plane::R(0.5), 17) {
        assert!((v - sol.value(0.5, z, th, 0.0)).abs() < 1e-10);
    }
}

#[test]
fn out_of_range_planes_are_rejected() {
    let spec = GridSpec::new(5, 5, 4).unwrap();
    let f = FieldData::Grid(GridField::zeros(spec));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    for plane in [Plane::Z(1.5), Plane::R(-0.1), Plane::Theta(f64::NAN)] {
        assert!(matches!(export_slice_csv(&f, plane, 4, &path), Err(Error::OutOfRange(_))));
    }
    export_slice_csv(&f, Plane::Z(-1.0), 4, &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 17);
}

#[test]
fn plane_parsing() {
    assert_eq!("z=0.5".parse::<Plane>().unwrap(), Plane::Z(0.5));
    assert_eq!("theta = 1".parse::<Plane>().unwrap(), Plane::Theta(1.0));
    assert_eq!("r=0".parse::<Plane>().unwrap(), Plane::R(0.0));
    assert!("x=1".parse::<Plane>().is_err());
    assert!("z".parse::<Plane>().is_err());
}
