//! Closed form against the geometric oracle on the worked examples.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use trianglecf::oracle::{
    area_integral_check, fd_derivatives, gamma_oracle, PlacedTriangle, DEFAULT_TOL,
};
use trianglecf::{eval_profile, Correlation, Interval, ShapeCase, Triangle};

fn setup(a: f64, b: f64, c: f64) -> (Correlation, PlacedTriangle) {
    let m = Triangle::from_sides(a, b, c).unwrap();
    (Correlation::new(m).unwrap(), PlacedTriangle::from_metrics(&m))
}

/// Distance from `r` to the nearest ladder point.
fn clearance(cf: &Correlation, r: f64) -> f64 {
    cf.ladder()
        .points
        .iter()
        .map(|p| (p - r).abs())
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn case_a_curvature_matches_oracle_second_difference() {
    let (cf, t) = setup(1.0, 1.5, 1.611);
    assert_eq!(cf.case(), ShapeCase::A);
    let step = 1e-4 * cf.metrics().c;
    for iv in Interval::ALL {
        if cf.ladder().width(iv) <= 20.0 * step {
            continue;
        }
        let (lo, hi) = cf.ladder().bounds(iv);
        let r = 0.5 * (lo + hi);
        let (_, fd2) = fd_derivatives(&t, r, step).unwrap();
        let exact = cf.second_derivative(r).unwrap();
        assert_relative_eq!(fd2, exact, max_relative = 1e-5);
    }
}

#[test]
fn case_b_slope_matches_oracle_difference() {
    let (cf, t) = setup(1.0, 1.06, 1.127);
    assert_eq!(cf.case(), ShapeCase::B);
    let c = cf.metrics().c;
    let step = 1e-4 * c;
    let mut checked = 0;
    for k in 0..50 {
        let r = c * (k as f64 + 0.5) / 50.0;
        if clearance(&cf, r) < 10.0 * step {
            continue;
        }
        // γ' ~ (c - r)² near c, so the step² error is removed by Richardson
        let (coarse, _) = fd_derivatives(&t, r, step).unwrap();
        let (fine, _) = fd_derivatives(&t, r, 0.5 * step).unwrap();
        let fd1 = (4.0 * fine - coarse) / 3.0;
        let exact = cf.first_derivative(r).unwrap();
        assert_relative_eq!(fd1, exact, max_relative = 1e-5);
        checked += 1;
    }
    assert!(checked >= 45, "{checked}");
}

#[test]
fn equilateral_quarter_radius() {
    let (cf, t) = setup(1.0, 1.0, 1.0);
    let o = gamma_oracle(&t, 0.25, DEFAULT_TOL).unwrap();
    assert!((cf.correlation(0.25).unwrap() - o).abs() <= 1e-7);
}

#[test]
fn reference_triangles_on_200_point_grid() {
    for s in [[1.0, 1.5, 1.611], [1.0, 1.06, 1.127], [1.0, 1.5, 2.239], [1.0, 1.5, 2.470]] {
        let (cf, t) = setup(s[0], s[1], s[2]);
        let c = cf.metrics().c;
        for k in 0..=200 {
            let r = c * k as f64 / 200.0;
            let o = gamma_oracle(&t, r, DEFAULT_TOL).unwrap();
            let g = cf.correlation(r).unwrap();
            assert!((g - o).abs() <= 1e-7, "{s:?} r={r}: {g} vs {o}");
        }
    }
}

#[test]
fn oracle_slope_and_curvature_near_origin() {
    let (cf, t) = setup(1.0, 1.5, 2.239);
    let m = *cf.metrics();
    let step = 1e-4 * m.c;
    let (fd1, _) = fd_derivatives(&t, 2.0 * step, step).unwrap();
    assert_relative_eq!(fd1, -m.perimeter / (PI * m.area), max_relative = 1e-3);
    let (_, fd2) = fd_derivatives(&t, 0.5 * m.h_c, step).unwrap();
    assert_relative_eq!(
        fd2,
        cf.constants().a_const / (2.0 * PI * m.area),
        max_relative = 1e-5
    );
}

#[test]
fn halving_the_step_quarters_the_defect() {
    let (cf, t) = setup(1.0, 1.5, 1.611);
    let c = cf.metrics().c;
    let (lo, hi) = cf.ladder().bounds(Interval::IV);
    let r = 0.5 * (lo + hi);
    let exact = cf.first_derivative(r).unwrap();
    let d_coarse = (fd_derivatives(&t, r, 1e-3 * c).unwrap().0 - exact).abs();
    let d_fine = (fd_derivatives(&t, r, 5e-4 * c).unwrap().0 - exact).abs();
    let ratio = d_coarse / d_fine;
    assert!((3.5..4.5).contains(&ratio), "{ratio}");
}

#[test]
fn oracle_area_integrals() {
    let cases = [
        ([1.0, 1.0, 1.0], 3f64.sqrt() / 4.0),
        ([3.0, 4.0, 5.0], 6.0),
        ([1.0, 1.5, 2.470], Triangle::from_sides(1.0, 1.5, 2.470).unwrap().area),
    ];
    for (s, area) in cases {
        let (_, t) = setup(s[0], s[1], s[2]);
        let got = area_integral_check(&t, 1e-7).unwrap();
        assert_relative_eq!(got, area, max_relative = 1e-6);
    }
}

#[test]
fn case_c_profile_shape() {
    let (cf, _) = setup(1.0, 1.5, 2.239);
    let c = cf.metrics().c;
    let grid: Vec<f64> = (0..512).map(|k| c * k as f64 / 511.0).collect();
    let rows = eval_profile(cf.metrics(), &grid).unwrap();
    assert_eq!(rows.len(), 512);
    for w in rows.windows(2) {
        assert!(w[1].r > w[0].r);
        assert!(w[1].gamma <= w[0].gamma);
    }
    assert_eq!(rows[0].gamma, 1.0);
    assert_eq!(rows[511].gamma, 0.0);
    // a single local blow-up of |γ'''|, just above h_c
    let h_c = cf.metrics().h_c;
    let peak = rows
        .iter()
        .filter_map(|v| v.d3.map(|d| (v.r, d.abs())))
        .fold((0.0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    assert!(peak.0 > h_c && peak.0 < h_c + 2.0 * c / 511.0, "{peak:?}");
}
