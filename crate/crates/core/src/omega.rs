//! The special-function tower behind the closed forms.
//!
//! * `Ω₂(x)   = -2x√(1-x²) - 2 arccos x`, for `0 <= x <= 1`
//! * `Ω₁(h,x) = 2h√(x²-h²)/x - 2x arccos(h/x)`, the x-primitive of `Ω₂(h/x)`
//! * `Ω(h,x)  = -πx²/2 + 3h√(x²-h²) + (x²+2h²) arcsin(h/x)`, the x-primitive of `Ω₁(h,x)`
//!
//! Arguments that overshoot a branch point by less than `1e-9` (relative) are
//! clamped; anything further out is a [`DomainError`].

use crate::error::DomainError;
use crate::geometry::TriangleMetrics;
use crate::scalar::Real;

const CLAMP_TOL: f64 = 1e-9;

fn domain_err<T: Real>(function: &'static str, value: T, detail: &'static str) -> DomainError {
    DomainError {
        function,
        value: value.to_f64_lossy(),
        detail,
    }
}

/// Clamps the ratio `h/x` into `[0, 1]`, rejecting `x < h` beyond tolerance.
fn ratio<T: Real>(function: &'static str, h: T, x: T) -> Result<T, DomainError> {
    if !(h > T::zero()) || !h.is_finite() || !x.is_finite() {
        return Err(domain_err(function, h, "height must be positive and finite"));
    }
    if x < h * (T::one() - T::rel_tol(CLAMP_TOL)) {
        return Err(domain_err(function, x, "requires x >= h"));
    }
    Ok((h / x).min(T::one()))
}

/// `√(x² - h²)` computed as `√((x-h)(x+h))`, zero when `x <= h`.
#[inline]
fn leg<T: Real>(h: T, x: T) -> T {
    ((x - h) * (x + h)).max(T::zero()).sqrt()
}

/// `Ω₂(x)`; takes values in `[-π, 0]` and increases monotonically.
pub fn omega2<T: Real>(x: T) -> Result<T, DomainError> {
    let tol = T::rel_tol(CLAMP_TOL);
    if !(x >= -tol && x <= T::one() + tol) {
        return Err(domain_err("omega2", x, "requires 0 <= x <= 1"));
    }
    let x = x.max(T::zero()).min(T::one());
    if x == T::one() {
        return Ok(T::zero());
    }
    let two = T::lit(2.0);
    let root = ((T::one() - x) * (T::one() + x)).sqrt();
    Ok(-two * x * root - two * x.acos())
}

/// `Ω₂(h/x) - Ω₂(h/x0)` for `h < x <= x0`, where `gap = x0 - x` is passed
/// separately so that the difference keeps full relative precision as
/// `gap → 0`.
pub fn omega2_increment<T: Real>(h: T, x: T, x0: T, gap: T) -> Result<T, DomainError> {
    if !(h >= T::zero() && h < x && gap >= T::zero()) {
        return Err(domain_err("omega2_increment", x, "requires 0 <= h < x <= x0"));
    }
    let (u, u0) = (h / x, h / x0);
    let du = h * gap / (x * x0);
    let su = ((T::one() - u) * (T::one() + u)).sqrt();
    let s0 = ((T::one() - u0) * (T::one() + u0)).sqrt();
    let sum = u + u0;
    // u·√(1-u²) - u0·√(1-u0²)
    let a = du * su - u0 * du * sum / (su + s0);
    // arccos u0 - arccos u
    let b = (du * sum / (u * s0 + u0 * su)).atan2(u * u0 + su * s0);
    let two = T::lit(2.0);
    Ok(two * (b - a))
}

/// `dΩ₂/dx = 4x²/√(1-x²)`, unbounded as `x → 1`.
pub fn omega2_derivative<T: Real>(x: T) -> Result<T, DomainError> {
    if !(x >= T::zero() && x < T::one()) {
        return Err(domain_err("omega2_derivative", x, "requires 0 <= x < 1"));
    }
    let root = ((T::one() - x) * (T::one() + x)).sqrt();
    Ok(T::lit(4.0) * x * x / root)
}

/// `Ω₁(h, x)`, non-positive for `x >= h` and zero at `x = h`.
pub fn omega1<T: Real>(h: T, x: T) -> Result<T, DomainError> {
    ratio("omega1", h, x)?;
    if x <= h {
        return Ok(T::zero());
    }
    let two = T::lit(2.0);
    let l = leg(h, x);
    // arccos(h/x), without rounding h/x first
    Ok(two * h * l / x - two * x * l.atan2(h))
}

/// `Ω(h, x)`, equal to `πh²` at `x = h`.
pub fn omega_cap<T: Real>(h: T, x: T) -> Result<T, DomainError> {
    ratio("omega_cap", h, x)?;
    if x <= h {
        return Ok(T::PI() * h * h);
    }
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let l = leg(h, x);
    Ok(-T::PI() * x * x * half + three * h * l + (x * x + two * h * h) * h.atan2(l))
}

/// `Ω₁(h, r) - Ω₁(h, p)`.
pub fn omega1_diff<T: Real>(h: T, r: T, p: T) -> Result<T, DomainError> {
    if r == p {
        // still validate the argument
        omega1(h, r)?;
        return Ok(T::zero());
    }
    Ok(omega1(h, r)? - omega1(h, p)?)
}

/// `Ω(h, r) - Ω(h, p) - Ω₁(h, p)(r - p)`: vanishes with its first r-derivative at `r = p`.
pub fn omega_cap_diff<T: Real>(h: T, r: T, p: T) -> Result<T, DomainError> {
    if r == p {
        omega_cap(h, r)?;
        return Ok(T::zero());
    }
    Ok(omega_cap(h, r)? - omega_cap(h, p)? - omega1(h, p)? * (r - p))
}

/// The three angle combinations and the pairwise cotangent sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularConstants<T> {
    /// `3 + Σ (π-ψ) cot ψ`
    pub a_const: T,
    /// `(π-2α)cot α + (π-2β)cot β + 2(1 + γ cot γ)`
    pub b_const: T,
    /// `4 + 2(π-2α)cot α + π cot β + π cot γ`
    pub c_const: T,
    pub c_ab: T,
    pub c_ag: T,
    pub c_bg: T,
}

impl<T: Real> AngularConstants<T> {
    pub fn new(m: &TriangleMetrics<T>) -> Self {
        let pi = T::PI();
        let one = T::one();
        let two = T::lit(2.0);
        let (al, be, ga) = (m.alpha, m.beta, m.gamma_ang);
        let (cot_a, cot_b, cot_g) = (cot(al), cot(be), cot(ga));
        Self {
            a_const: T::lit(3.0) + (pi - al) * cot_a + (pi - be) * cot_b + (pi - ga) * cot_g,
            b_const: (pi - two * al) * cot_a + (pi - two * be) * cot_b + two * (one + ga * cot_g),
            c_const: T::lit(4.0) + two * (pi - two * al) * cot_a + pi * cot_b + pi * cot_g,
            c_ab: cot_a + cot_b,
            c_ag: cot_a + cot_g,
            c_bg: cot_b + cot_g,
        }
    }
}

/// Shorthand for [`AngularConstants::new`].
pub fn angular_constants<T: Real>(m: &TriangleMetrics<T>) -> AngularConstants<T> {
    AngularConstants::new(m)
}

fn cot<T: Real>(x: T) -> T {
    x.cos() / x.sin()
}
