//! Formula-free reference values of γ(r).
//!
//! γ(r) is computed straight from its definition: the area of the triangle
//! intersected with a copy of itself shifted by `r·(cos φ, sin φ)`, averaged
//! over directions and divided by the area. The overlap of two convex
//! polygons is found by half-plane clipping and the angular average by
//! adaptive quadrature. Nothing here depends on the closed forms in
//! [`crate::cf_eval`] or [`crate::omega`].

use std::f64::consts::PI;

use crate::error::QuadratureError;
use crate::geometry::TriangleMetrics;
use crate::quadrature::{integrate, integrate_with_breakpoints, QuadratureOptions};

pub type Point = [f64; 2];

/// Default absolute tolerance of the angular average.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Tolerance used for the samples behind finite differences.
const FD_TOL: f64 = 1e-14;

/// A triangle with concrete vertex coordinates, counter-clockwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacedTriangle {
    vertices: [Point; 3],
    area: f64,
    diameter: f64,
}

impl PlacedTriangle {
    /// Canonical placement: `C` at the origin, `B` at `(a, 0)`, `A` above the
    /// x-axis at distance `b` from `C`.
    pub fn from_metrics(m: &TriangleMetrics<f64>) -> Self {
        let c = [0.0, 0.0];
        let b = [m.a, 0.0];
        let a = [m.b * m.gamma_ang.cos(), m.b * m.gamma_ang.sin()];
        Self::from_vertices([c, b, a])
    }

    /// Any three non-collinear points; orientation is normalized to CCW.
    pub fn from_vertices(mut vertices: [Point; 3]) -> Self {
        let mut signed = signed_area(&vertices);
        if signed < 0.0 {
            vertices.swap(1, 2);
            signed = -signed;
        }
        let diameter = (0..3)
            .map(|i| dist(vertices[i], vertices[(i + 1) % 3]))
            .fold(0.0, f64::max);
        Self {
            vertices,
            area: signed,
            diameter,
        }
    }

    pub fn vertices(&self) -> [Point; 3] {
        self.vertices
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Pairwise vertex distances in ascending order.
    pub fn side_lengths(&self) -> [f64; 3] {
        let v = &self.vertices;
        let mut s = [dist(v[0], v[1]), dist(v[1], v[2]), dist(v[2], v[0])];
        s.sort_by(f64::total_cmp);
        s
    }

    /// Rotates by `angle` about the origin, then translates by `shift`.
    pub fn moved(&self, angle: f64, shift: Point) -> Self {
        let (s, c) = angle.sin_cos();
        let v = self
            .vertices
            .map(|p| [c * p[0] - s * p[1] + shift[0], s * p[0] + c * p[1] + shift[1]]);
        Self::from_vertices(v)
    }

    /// Radii at which the set of [`Self::crossing_angles`] changes: the
    /// extreme distances from each vertex to each edge, plus `0` and the
    /// diameter, sorted and deduplicated.
    fn critical_radii(&self) -> Vec<f64> {
        let v = &self.vertices;
        let mut out = Vec::new();
        for p in v {
            for k in 0..3 {
                let (q0, q1) = (v[k], v[(k + 1) % 3]);
                out.push(dist(*p, q0));
                let dir = [q1[0] - q0[0], q1[1] - q0[1]];
                let t = ((p[0] - q0[0]) * dir[0] + (p[1] - q0[1]) * dir[1])
                    / (dir[0] * dir[0] + dir[1] * dir[1]);
                if t > 0.0 && t < 1.0 {
                    out.push(dist(*p, [q0[0] + t * dir[0], q0[1] + t * dir[1]]));
                }
            }
        }
        out.retain(|&x| x > 0.0 && x < self.diameter);
        out.extend([0.0, self.diameter]);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Angles in `[0, π]` at which `r e_φ` crosses a segment where a vertex
    /// of the moved copy lies on an edge of the fixed one. The overlap area is
    /// smooth in `φ` between consecutive angles, and its support is bounded by
    /// them. Includes both ends of the range.
    fn crossing_angles(&self, r: f64) -> Vec<f64> {
        let v = &self.vertices;
        let mut out = vec![0.0, PI];
        for p in v {
            for k in 0..3 {
                // d = q - p for q on edge k
                let s = [v[k][0] - p[0], v[k][1] - p[1]];
                let e = [v[(k + 1) % 3][0] - p[0], v[(k + 1) % 3][1] - p[1]];
                let dir = [e[0] - s[0], e[1] - s[1]];
                // |s + t dir|² = r²
                let qa = dir[0] * dir[0] + dir[1] * dir[1];
                let qb = 2.0 * (s[0] * dir[0] + s[1] * dir[1]);
                let qc = s[0] * s[0] + s[1] * s[1] - r * r;
                let disc = qb * qb - 4.0 * qa * qc;
                if disc < 0.0 {
                    continue;
                }
                let root = disc.sqrt();
                for t in [(-qb - root) / (2.0 * qa), (-qb + root) / (2.0 * qa)] {
                    if (0.0..=1.0).contains(&t) {
                        let d = [s[0] + t * dir[0], s[1] + t * dir[1]];
                        out.push(d[1].atan2(d[0]).rem_euclid(PI));
                    }
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

fn dist(p: Point, q: Point) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    let mut twice = 0.0;
    for i in 0..n {
        let p = v[i];
        let q = v[(i + 1) % n];
        twice += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * twice
}

/// Fixed-capacity polygon buffer; a triangle clipped by three half-planes
/// never exceeds six vertices.
#[derive(Clone, Copy)]
struct Poly {
    pts: [Point; 8],
    len: usize,
}

impl Poly {
    fn push(&mut self, p: Point) {
        self.pts[self.len] = p;
        self.len += 1;
    }

    fn as_slice(&self) -> &[Point] {
        &self.pts[..self.len]
    }
}

/// Keeps the part of `poly` left of the directed line `p → q`.
fn clip(poly: &Poly, p: Point, q: Point, eps: f64) -> Poly {
    let mut out = Poly {
        pts: [[0.0; 2]; 8],
        len: 0,
    };
    let n = poly.len;
    if n == 0 {
        return out;
    }
    let (ex, ey) = (q[0] - p[0], q[1] - p[1]);
    let norm = ex.hypot(ey);
    let side = |v: Point| (ex * (v[1] - p[1]) - ey * (v[0] - p[0])) / norm;
    for i in 0..n {
        let s = poly.pts[i];
        let e = poly.pts[(i + 1) % n];
        let ds = side(s);
        let de = side(e);
        if ds >= -eps {
            out.push(s);
        }
        // proper crossing only; on-edge points were kept above
        if (ds > eps && de < -eps) || (ds < -eps && de > eps) {
            let t = ds / (ds - de);
            out.push([s[0] + t * (e[0] - s[0]), s[1] + t * (e[1] - s[1])]);
        }
    }
    out
}

/// Area of `t ∩ (t + displacement)`.
pub fn intersection_area(t: &PlacedTriangle, displacement: Point) -> f64 {
    let [dx, dy] = displacement;
    if !(dx.is_finite() && dy.is_finite()) || dx.hypot(dy) >= t.diameter {
        return 0.0;
    }
    let eps = 1e-12 * t.diameter;
    let mut poly = Poly {
        pts: [[0.0; 2]; 8],
        len: 0,
    };
    for v in t.vertices {
        poly.push(v);
    }
    let shifted = t.vertices.map(|v| [v[0] + dx, v[1] + dy]);
    for i in 0..3 {
        poly = clip(&poly, shifted[i], shifted[(i + 1) % 3], eps);
        if poly.len < 3 {
            return 0.0;
        }
    }
    signed_area(poly.as_slice()).max(0.0)
}

/// `γ(r) = (1/π) ∫₀^π |t ∩ (t + r e_φ)| dφ / S` to absolute tolerance `tol`.
pub fn gamma_oracle(t: &PlacedTriangle, r: f64, tol: f64) -> Result<f64, QuadratureError> {
    if r == 0.0 {
        return Ok(1.0);
    }
    if r >= t.diameter {
        return Ok(0.0);
    }
    let scale = PI * t.area;
    // Narrow support near r = c can fall between quadrature nodes, so every
    // angle where the overlap polygon changes combinatorially seeds a panel.
    let points = t.crossing_angles(r);
    let est = integrate_with_breakpoints(
        |phi| {
            let (s, c) = phi.sin_cos();
            intersection_area(t, [r * c, r * s])
        },
        &points,
        QuadratureOptions {
            abs_tol: tol * scale,
            rel_tol: 0.0,
            max_subdivisions: 20_000,
        },
    )?;
    Ok((est.value / scale).clamp(0.0, 1.0))
}

/// Central-difference estimates `(γ'(r), γ''(r))` from oracle samples at
/// `r - step`, `r`, `r + step`.
pub fn fd_derivatives(
    t: &PlacedTriangle,
    r: f64,
    step: f64,
) -> Result<(f64, f64), QuadratureError> {
    let lo = gamma_oracle(t, r - step, FD_TOL)?;
    let mid = gamma_oracle(t, r, FD_TOL)?;
    let hi = gamma_oracle(t, r + step, FD_TOL)?;
    Ok(((hi - lo) / (2.0 * step), (hi - 2.0 * mid + lo) / (step * step)))
}

/// `∫₀^c 2πr γ_oracle(r) dr`, which equals the area for any figure.
pub fn area_integral_check(t: &PlacedTriangle, tol: f64) -> Result<f64, QuadratureError> {
    let inner = (tol * 1e-3).max(1e-13);
    let mut failure = None;
    let mut total = 0.0;
    for w in t.critical_radii().windows(2) {
        let est = integrate(
            |r| match gamma_oracle(t, r, inner) {
                Ok(g) => 2.0 * PI * r * g,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            },
            w[0],
            w[1],
            QuadratureOptions {
                abs_tol: 1e-2 * tol * t.area(),
                rel_tol: tol,
                max_subdivisions: 2000,
            },
        )?;
        total += est.value;
    }
    match failure {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn placed(a: f64, b: f64, c: f64) -> PlacedTriangle {
        PlacedTriangle::from_metrics(&TriangleMetrics::from_sides(a, b, c).unwrap())
    }

    #[test]
    fn placement_reproduces_metrics() {
        for s in [[1.0, 1.5, 1.611], [1.0, 1.5, 2.47], [3.0, 4.0, 5.0], [2.0, 2.0, 2.0]] {
            let m = TriangleMetrics::from_sides(s[0], s[1], s[2]).unwrap();
            let t = PlacedTriangle::from_metrics(&m);
            assert_relative_eq!(t.area(), m.area, max_relative = 1e-12);
            let got = t.side_lengths();
            for (x, y) in got.iter().zip(m.sides()) {
                assert_relative_eq!(*x, y, max_relative = 1e-12);
            }
            assert_eq!(t.diameter(), got[2]);
        }
    }

    #[test]
    fn orientation_normalized() {
        let cw = PlacedTriangle::from_vertices([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]);
        assert_eq!(cw.area(), 0.5);
    }

    #[test]
    fn area_examples() {
        let unit = PlacedTriangle::from_vertices([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(intersection_area(&unit, [0.0, 0.0]), 0.5);
        assert_relative_eq!(intersection_area(&unit, [0.5, 0.0]), 0.125, max_relative = 1e-15);
        assert_relative_eq!(intersection_area(&unit, [0.0, -0.5]), 0.125, max_relative = 1e-15);
        assert_eq!(intersection_area(&unit, [2f64.sqrt(), 0.0]), 0.0);
        assert_eq!(intersection_area(&unit, [1.0, 1.0]), 0.0);
        assert_relative_eq!(intersection_area(&unit, [-0.8, 0.9]), 0.005, max_relative = 1e-12);
        assert_eq!(intersection_area(&unit, [1.0, 0.5]), 0.0);
    }

    #[test]
    fn area_brute_force_pixel_count() {
        // Count grid cells of t that also lie in t + d.
        let t = placed(1.0, 1.5, 1.611);
        let d = [0.31, 0.17];
        let inside = |p: Point, shift: Point| {
            let v = t.vertices();
            (0..3).all(|i| {
                let a = [v[i][0] + shift[0], v[i][1] + shift[1]];
                let b = [v[(i + 1) % 3][0] + shift[0], v[(i + 1) % 3][1] + shift[1]];
                (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) >= 0.0
            })
        };
        let n = 1500;
        let (x0, x1, y0, y1) = (-0.2, 1.8, -0.1, 1.6);
        let (hx, hy) = ((x1 - x0) / n as f64, (y1 - y0) / n as f64);
        let mut count = 0usize;
        for i in 0..n {
            for j in 0..n {
                let p = [x0 + (i as f64 + 0.5) * hx, y0 + (j as f64 + 0.5) * hy];
                if inside(p, [0.0, 0.0]) && inside(p, d) {
                    count += 1;
                }
            }
        }
        let brute = count as f64 * hx * hy;
        let exact = intersection_area(&t, d);
        assert!((brute - exact).abs() < 2e-3 * t.area(), "{brute} vs {exact}");
    }

    #[test]
    fn oracle_endpoints() {
        let t = placed(1.0, 1.5, 2.47);
        assert_eq!(gamma_oracle(&t, 0.0, 1e-9).unwrap(), 1.0);
        assert_eq!(gamma_oracle(&t, 2.47, 1e-9).unwrap(), 0.0);
        assert_eq!(gamma_oracle(&t, 5.0, 1e-9).unwrap(), 0.0);
        // narrow angular support just below the diameter is still found
        let g = gamma_oracle(&t, 0.95 * 2.47, 1e-12).unwrap();
        assert!(g > 0.0 && g < 1e-4, "{g}");
    }

    #[test]
    fn oracle_slope_at_origin() {
        let m = TriangleMetrics::from_sides(1.0, 1.5, 1.611).unwrap();
        let t = PlacedTriangle::from_metrics(&m);
        let step = 1e-4 * m.c;
        let (d1, _) = fd_derivatives(&t, 2.0 * step, step).unwrap();
        let expected = -m.perimeter / (PI * m.area);
        // γ'' ≈ O(1) shifts the slope at r = 2·step by about 2·step·γ''
        assert!((d1 - expected).abs() < 1e-3 * expected.abs(), "{d1} vs {expected}");
    }

    #[test]
    fn oracle_curvature_in_first_interval() {
        let m = TriangleMetrics::from_sides(1.0, 1.5, 1.611).unwrap();
        let t = PlacedTriangle::from_metrics(&m);
        let step = 1e-4 * m.c;
        let (_, d2) = fd_derivatives(&t, 0.5 * m.h_c, step).unwrap();
        let vertex_sum: f64 = [m.alpha, m.beta, m.gamma_ang]
            .iter()
            .map(|&psi| (PI - psi) / psi.tan() + 1.0)
            .sum();
        let expected = vertex_sum / (2.0 * PI * m.area);
        assert!((d2 - expected).abs() < 1e-5 * expected.abs().max(1.0), "{d2} vs {expected}");
    }

    #[test]
    fn rigid_motion_invariance() {
        let t = placed(1.0, 1.06, 1.127);
        let r = 0.43;
        let reference = gamma_oracle(&t, r, 1e-11).unwrap();
        let motions = [
            (0.3, [1.0, -2.0]),
            (1.1, [0.0, 0.0]),
            (2.0, [5.0, 5.0]),
            (-0.7, [-3.0, 0.2]),
            (3.0, [0.1, 0.1]),
            (4.4, [10.0, -7.0]),
            (5.5, [0.0, 2.5]),
            (-2.2, [1e-3, 0.0]),
            (0.01, [-8.0, -8.0]),
            (6.0, [2.0, 3.0]),
        ];
        for (angle, shift) in motions {
            let g = gamma_oracle(&t.moved(angle, shift), r, 1e-11).unwrap();
            assert!((g - reference).abs() < 1e-10, "{angle}: {g} vs {reference}");
        }
    }

    #[test]
    fn normalization_integral() {
        let t = placed(3.0, 4.0, 5.0);
        let v = area_integral_check(&t, 1e-7).unwrap();
        assert!((v - 6.0).abs() < 1e-6 * 6.0, "{v}");
    }

    #[test]
    fn normalization_integral_splits_at_critical_radii() {
        let t = placed(3.4220741896779874, 8.8355103578412795, 9.3058255745020411);
        let v = area_integral_check(&t, 1e-8).unwrap();
        assert!((v / t.area() - 1.0).abs() < 1e-10, "{v}");
        let radii = t.critical_radii();
        assert_eq!(radii.first(), Some(&0.0));
        assert_eq!(radii.last(), Some(&t.diameter()));
        assert!(radii.windows(2).all(|w| w[0] < w[1]));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn triangle() -> impl Strategy<Value = PlacedTriangle> {
            (0.2f64..5.0, 0.2f64..5.0, 0.2f64..5.0).prop_filter_map("triangle", |(x, y, z)| {
                TriangleMetrics::from_sides(x, y, z)
                    .ok()
                    .map(|m| PlacedTriangle::from_metrics(&m))
            })
        }

        proptest! {
            #[test]
            fn central_symmetry(t in triangle(), dx in -5.0f64..5.0, dy in -5.0f64..5.0) {
                let p = intersection_area(&t, [dx, dy]);
                let n = intersection_area(&t, [-dx, -dy]);
                prop_assert!((p - n).abs() <= 1e-12 * t.area());
                prop_assert!(p >= 0.0 && p <= t.area() * (1.0 + 1e-12));
            }

            #[test]
            fn monotone_along_ray(t in triangle(), phi in 0.0f64..(2.0 * PI), s in 0.0f64..1.0, u in 0.0f64..1.0) {
                let (lo, hi) = if s < u { (s, u) } else { (u, s) };
                let dir = [phi.cos() * t.diameter(), phi.sin() * t.diameter()];
                let near = intersection_area(&t, [dir[0] * lo, dir[1] * lo]);
                let far = intersection_area(&t, [dir[0] * hi, dir[1] * hi]);
                prop_assert!(far <= near + 1e-12 * t.area());
            }
        }
    }
}
