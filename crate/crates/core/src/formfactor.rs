//! Hankel transform of γ: the planar form factor
//! `F(q) = 2π ∫₀^c γ(r) r J₀(qr) dr`, with `F(0) = S`.

use std::f64::consts::PI;

use crate::cf_eval::CorrelationFunction;
use crate::error::{Error, EvalError};
use crate::quadrature::{integrate_with_breakpoints, QuadratureOptions};

/// Bessel function of the first kind, order zero.
///
/// Evaluates `J₀(x) = (1/π) ∫₀^π cos(x sin θ) dθ` with the midpoint rule.
/// The integrand is smooth and π-periodic, so the rule converges
/// geometrically once the node count exceeds about `x/2`; the aliasing error
/// is bounded by `2|J_{2N}(x)|`.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if !x.is_finite() {
        return if x.is_nan() { f64::NAN } else { 0.0 };
    }
    let n = (0.5 * x + 4.0 * x.cbrt()).ceil() as usize + 24;
    let h = PI / n as f64;
    let sum: f64 = (0..n)
        .map(|k| (x * ((k as f64 + 0.5) * h).sin()).cos())
        .sum();
    sum / n as f64
}

/// `F(q)` for one triangle, integrated to `rel_tol` of the area.
pub fn form_factor(
    cf: &CorrelationFunction<f64>,
    q: f64,
    rel_tol: f64,
) -> Result<f64, Error> {
    if !(q >= 0.0) || !q.is_finite() {
        return Err(crate::error::DomainError {
            function: "form_factor",
            value: q,
            detail: "q must be finite and non-negative",
        }
        .into());
    }
    let c = cf.metrics().c;
    let area = cf.metrics().area;

    // Ladder points plus a node every half period of J₀(qr).
    let mut points: Vec<f64> = cf.ladder().points.to_vec();
    let periods = (q * c / PI).ceil() as usize;
    points.extend((1..periods).map(|k| k as f64 * c / periods as f64));
    points.sort_by(f64::total_cmp);
    points.dedup();

    let mut failure: Option<EvalError> = None;
    let est = integrate_with_breakpoints(
        |r| match cf.correlation(r) {
            Ok(g) => 2.0 * PI * r * g * bessel_j0(q * r),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        &points,
        QuadratureOptions {
            abs_tol: rel_tol * area,
            rel_tol: 0.0,
            max_subdivisions: 4000,
        },
    )?;
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(est.value),
    }
}

/// `(q, F(q))` for every `q` in `grid`.
pub fn form_factor_table(
    cf: &CorrelationFunction<f64>,
    grid: &[f64],
    rel_tol: f64,
) -> Result<Vec<(f64, f64)>, Error> {
    grid.iter()
        .map(|&q| form_factor(cf, q, rel_tol).map(|f| (q, f)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TriangleMetrics;

    #[test]
    fn j0_reference_values() {
        // 30-digit reference values
        let table = [
            (0.0, 1.0),
            (0.5, 0.938_469_807_240_812_904_2),
            (1.0, 0.765_197_686_557_966_551_4),
            (-1.0, 0.765_197_686_557_966_551_4),
            (10.0, -0.245_935_764_451_348_335_2),
            (37.5, 0.071_722_705_110_602_229_32),
            (100.0, 0.019_985_850_304_223_122_42),
            (1000.0, 0.024_786_686_152_420_174_56),
        ];
        for (x, want) in table {
            let got = bessel_j0(x);
            assert!((got - want).abs() < 1e-13, "J0({x}) = {got}, want {want}");
        }
        // first zero
        assert!(bessel_j0(2.404_825_557_695_773).abs() < 1e-14);
    }

    #[test]
    fn forward_value_is_area() {
        let cf = CorrelationFunction::new(TriangleMetrics::from_sides(1.0, 1.0, 1.0).unwrap()).unwrap();
        let f0 = form_factor(&cf, 0.0, 1e-10).unwrap();
        let s = 3f64.sqrt() / 4.0;
        assert!((f0 - s).abs() < 1e-6 * s);
        let f1 = form_factor(&cf, 1.0, 1e-10).unwrap();
        assert!(f1 < f0 && f1 > 0.0);
        let far = form_factor(&cf, 50.0, 1e-10).unwrap();
        assert!(far.abs() < f0 / 100.0);
        assert!(form_factor(&cf, -1.0, 1e-10).is_err());
    }
}
