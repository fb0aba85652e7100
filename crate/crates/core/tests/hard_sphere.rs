use std::f64::consts::PI;

use colldec::decoherence::{
    analyze, f_infinity, f_infinity_hard_sphere, f_of_r_reduced, lambda_hard_sphere,
    lambda_quadrature,
};
use colldec::scattering::CrossSectionTable;
use colldec::{BathParams, ParticleParams, PhysicalConstants, QuadSpec, ScatteringModel};

fn nat() -> PhysicalConstants {
    PhysicalConstants::natural()
}

fn bath(m: f64, t: f64, n: f64) -> BathParams {
    BathParams::new(m, t, n, &nat()).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn lambda_scaling_laws() {
    let p = ParticleParams::new(1.0, 1.0).unwrap();
    let base = lambda_hard_sphere(&bath(1.0, 1.0, 1.0), &p, &nat());
    assert!(
        rel(
            lambda_hard_sphere(&bath(1.0, 1.0, 3.0), &p, &nat()),
            3.0 * base
        ) < 1e-14
    );
    assert!(
        rel(
            lambda_hard_sphere(&bath(4.0, 1.0, 1.0), &p, &nat()),
            2.0 * base
        ) < 1e-14
    );
    assert!(
        rel(
            lambda_hard_sphere(&bath(1.0, 4.0, 1.0), &p, &nat()),
            8.0 * base
        ) < 1e-14
    );
    let p2 = ParticleParams::new(1.0, 2.0).unwrap();
    assert!(
        rel(
            lambda_hard_sphere(&bath(1.0, 1.0, 1.0), &p2, &nat()),
            4.0 * base
        ) < 1e-14
    );
    let h2 = PhysicalConstants::new(2.0, 1.0).unwrap();
    let b2 = BathParams::new(1.0, 1.0, 1.0, &h2).unwrap();
    assert!(rel(lambda_hard_sphere(&b2, &p, &h2), 0.25 * base) < 1e-14);
}

#[test]
fn quadrature_follows_the_same_scaling() {
    let spec = QuadSpec::default();
    let model = ScatteringModel::hard_sphere(0.7);
    let p = ParticleParams::new(1.0, 0.7).unwrap();
    for (m, t, n) in [(1.0, 1.0, 1.0), (3.0, 0.2, 5.0), (0.01, 40.0, 1e-3)] {
        let b = bath(m, t, n);
        let q = lambda_quadrature(&model, &b, &nat(), &spec).unwrap().value;
        assert!(rel(q, lambda_hard_sphere(&b, &p, &nat())) < 1e-8);
        let f = f_infinity(&model, &b, &nat(), &spec).unwrap().value;
        assert!(rel(f, f_infinity_hard_sphere(&b, &p)) < 1e-8);
    }
}

#[test]
fn curve_respects_bounds_and_limits() {
    let b = bath(1.0, 1.0, 1.0);
    let model = ScatteringModel::hard_sphere(1.0);
    let rs: Vec<f64> = (0..25)
        .map(|i| 0.05 * 1.35f64.powi(i))
        .chain([0.0])
        .collect();
    let res = analyze(&model, &b, &nat(), &rs, &QuadSpec::default()).unwrap();
    res.check_bounds().unwrap();
    let lambda = res.lambda.value;
    let small = &res.curve[0];
    assert!(rel(small.f, lambda * small.r * small.r) < 1e-2);
    let large = &res.curve[24];
    assert!(
        rel(large.f, res.f_infinity.value) < 0.01,
        "{} at R = {}",
        large.f,
        large.r
    );
    assert_eq!(res.curve[25].f, 0.0);
}

fn table(q_max: f64, nq: usize, nt: usize, f2: impl Fn(f64, f64) -> f64) -> CrossSectionTable {
    let q: Vec<f64> = (0..nq)
        .map(|i| q_max * i as f64 / (nq - 1) as f64)
        .collect();
    let theta: Vec<f64> = (0..nt).map(|j| PI * j as f64 / (nt - 1) as f64).collect();
    let mut v = Vec::with_capacity(nq * nt);
    for &qi in &q {
        for &t in &theta {
            v.push(f2(qi, t));
        }
    }
    CrossSectionTable::new(q, theta, v).unwrap()
}

#[test]
fn constant_table_reproduces_the_hard_sphere() {
    let a = 1.3;
    let b = bath(1.0, 1.0, 1.0);
    let tab = ScatteringModel::Tabulated(table(20.0, 11, 7, |_, _| a * a / 4.0));
    let hs = ScatteringModel::hard_sphere(a);
    let spec = QuadSpec::default();
    let lt = lambda_quadrature(&tab, &b, &nat(), &spec).unwrap().value;
    let lh = lambda_quadrature(&hs, &b, &nat(), &spec).unwrap().value;
    assert!(rel(lt, lh) < 1e-8);
    for r in [0.1, 1.0, 10.0] {
        let ft = f_of_r_reduced(&tab, &b, &nat(), r, &spec).unwrap().value;
        let fh = f_of_r_reduced(&hs, &b, &nat(), r, &spec).unwrap().value;
        assert!(rel(ft, fh) < 1e-8, "R = {r}");
    }
}

#[test]
fn forward_peaked_table() {
    // |f|^2 = c (1 + cos theta): the same total cross section as c, but
    // momentum transfer weighted by 2/3
    let c = 0.5;
    let b = bath(1.0, 1.0, 2.0);
    let tab = ScatteringModel::Tabulated(table(20.0, 3, 721, |_, t| c * (1.0 + t.cos())));
    let iso = ScatteringModel::Tabulated(table(20.0, 3, 3, |_, _| c));
    let spec = QuadSpec::default();
    let lt = lambda_quadrature(&tab, &b, &nat(), &spec).unwrap().value;
    let li = lambda_quadrature(&iso, &b, &nat(), &spec).unwrap().value;
    assert!(rel(lt, 2.0 / 3.0 * li) < 1e-5, "{}", lt / li);
    let ft = f_infinity(&tab, &b, &nat(), &spec).unwrap().value;
    let fi = f_infinity(&iso, &b, &nat(), &spec).unwrap().value;
    assert!(rel(ft, fi) < 1e-5);
}

#[test]
fn table_must_cover_the_thermal_range() {
    let b = bath(1.0, 1.0, 1.0);
    let short = ScatteringModel::Tabulated(table(5.0, 3, 3, |_, _| 1.0));
    assert!(lambda_quadrature(&short, &b, &nat(), &QuadSpec::default()).is_err());
}

#[test]
fn empty_bath_gives_zero_rates() {
    let b = bath(1.0, 1.0, 0.0);
    let model = ScatteringModel::hard_sphere(1.0);
    let spec = QuadSpec::default();
    assert_eq!(
        lambda_quadrature(&model, &b, &nat(), &spec).unwrap().value,
        0.0
    );
    assert_eq!(
        f_of_r_reduced(&model, &b, &nat(), 3.0, &spec)
            .unwrap()
            .value,
        0.0
    );
}
