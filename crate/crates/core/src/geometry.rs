//! Triangle canonicalization, shape-case classification and the radial
//! breakpoint ladder.
//!
//! Sides are always renamed so that `a <= b <= c`. The vertex opposite side
//! `a` is `A` (angle `alpha`), and so on; `h_a` is the altitude dropped from
//! `A` onto `a`. With this naming `h_c <= h_b <= h_a` and
//! `alpha <= beta <= gamma`.

use std::fmt;

use crate::error::GeometryError;
use crate::scalar::Real;

/// Three raw side lengths in any order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideTriple<T> {
    sides: [T; 3],
}

impl<T: Real> SideTriple<T> {
    /// Validates positivity and the strict triangle inequality.
    ///
    /// Collinear input (`a + b - c <= 1e-12 c` after sorting) is rejected.
    pub fn new(s1: T, s2: T, s3: T) -> Result<Self, GeometryError> {
        for s in [s1, s2, s3] {
            if !s.is_finite() || s <= T::zero() {
                return Err(GeometryError::NonPositiveSide(s.to_f64_lossy()));
            }
        }
        let [a, b, c] = sorted([s1, s2, s3]);
        if a + b - c <= T::rel_tol(1e-12) * c {
            return Err(GeometryError::NonTriangle(
                s1.to_f64_lossy(),
                s2.to_f64_lossy(),
                s3.to_f64_lossy(),
            ));
        }
        Ok(Self { sides: [s1, s2, s3] })
    }

    pub fn as_array(&self) -> [T; 3] {
        self.sides
    }

    /// The sides in ascending order.
    pub fn sorted(&self) -> [T; 3] {
        sorted(self.sides)
    }
}

fn sorted<T: Real>(mut s: [T; 3]) -> [T; 3] {
    // Total order is fine: NaN has been rejected already.
    s.sort_by(|x, y| x.partial_cmp(y).expect("finite sides"));
    s
}

/// Canonically ordered description of a triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleMetrics<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    /// Angle opposite `a`, radians.
    pub alpha: T,
    /// Angle opposite `b`, radians.
    pub beta: T,
    /// Angle opposite `c`, radians. The largest of the three.
    pub gamma_ang: T,
    pub h_a: T,
    pub h_b: T,
    pub h_c: T,
    /// Area `S`.
    pub area: T,
    /// Perimeter `L`.
    pub perimeter: T,
}

/// Computes the ordered metrics with Heron's formula and atan2-based angles.
///
/// The result depends only on the multiset of sides, so any permutation of
/// the input yields a bit-identical value.
pub fn derive_metrics<T: Real>(sides: SideTriple<T>) -> TriangleMetrics<T> {
    let [a, b, c] = sides.sorted();
    let two = T::lit(2.0);
    let four = T::lit(4.0);

    // Kahan's cancellation-safe arrangement of Heron's formula, written for
    // x >= y >= z.
    let (x, y, z) = (c, b, a);
    let radicand = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z));
    let area = radicand.max(T::zero()).sqrt() / four;

    // tan(angle) = 4S / (adjacent² sum - opposite²)
    let alpha = (four * area).atan2(b * b + c * c - a * a);
    let beta = (four * area).atan2(a * a + c * c - b * b);
    let gamma_ang = (four * area).atan2(a * a + b * b - c * c);

    TriangleMetrics {
        a,
        b,
        c,
        alpha,
        beta,
        gamma_ang,
        h_a: two * area / a,
        h_b: two * area / b,
        h_c: two * area / c,
        area,
        perimeter: a + b + c,
    }
}

impl<T: Real> TriangleMetrics<T> {
    /// Shorthand for `derive_metrics(SideTriple::new(..)?)`.
    pub fn from_sides(s1: T, s2: T, s3: T) -> Result<Self, GeometryError> {
        Ok(derive_metrics(SideTriple::new(s1, s2, s3)?))
    }

    pub fn sides(&self) -> [T; 3] {
        [self.a, self.b, self.c]
    }

    pub fn heights(&self) -> [T; 3] {
        [self.h_a, self.h_b, self.h_c]
    }

    /// Same triangle with every length multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Result<Self, GeometryError> {
        Self::from_sides(self.a * factor, self.b * factor, self.c * factor)
    }

    /// Largest chord of the figure, i.e. the support of the correlation function.
    pub fn diameter(&self) -> T {
        self.c
    }

    pub fn height(&self, which: Height) -> T {
        match which {
            Height::A => self.h_a,
            Height::B => self.h_b,
            Height::C => self.h_c,
        }
    }
}

/// Names one of the three altitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Height {
    A,
    B,
    C,
}

impl Height {
    pub const ALL: [Height; 3] = [Height::A, Height::B, Height::C];

    pub fn name(self) -> &'static str {
        match self {
            Height::A => "h_a",
            Height::B => "h_b",
            Height::C => "h_c",
        }
    }
}

/// The four orderings of sides against heights.
///
/// | case | ordering                     | largest angle |
/// |------|------------------------------|---------------|
/// | A    | h_c < h_b < a < h_a < b < c  | acute         |
/// | B    | h_c < h_b < h_a < a < b < c  | acute         |
/// | C    | h_c < h_b < a < h_a < b < c  | obtuse        |
/// | D    | h_c < h_b < h_a < a < b < c  | obtuse        |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShapeCase {
    A,
    B,
    C,
    D,
}

impl ShapeCase {
    pub const ALL: [ShapeCase; 4] = [ShapeCase::A, ShapeCase::B, ShapeCase::C, ShapeCase::D];

    pub fn tag(self) -> &'static str {
        match self {
            ShapeCase::A => "A",
            ShapeCase::B => "B",
            ShapeCase::C => "C",
            ShapeCase::D => "D",
        }
    }

    pub fn is_obtuse(self) -> bool {
        matches!(self, ShapeCase::C | ShapeCase::D)
    }

    /// True when the shortest side is not longer than the largest height.
    pub fn short_side_below_height(self) -> bool {
        matches!(self, ShapeCase::A | ShapeCase::C)
    }

    /// Heights whose foot lands inside the opposite side. Only these produce
    /// `(r - h)^(-1/2)` singularities in the third derivative.
    pub fn spiking_heights(self) -> &'static [Height] {
        match self {
            ShapeCase::A | ShapeCase::B => &[Height::A, Height::B, Height::C],
            ShapeCase::C | ShapeCase::D => &[Height::C],
        }
    }
}

impl fmt::Display for ShapeCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Classifies the triangle.
///
/// A right angle (within `1e-12 π`) counts as acute, and `|h_a - a| <= 1e-12 a`
/// counts as `a < h_a`. Either tie collapses one interval to zero width, so
/// the choice only affects labeling.
pub fn classify<T: Real>(m: &TriangleMetrics<T>) -> ShapeCase {
    let obtuse = m.gamma_ang - T::FRAC_PI_2() > T::rel_tol(1e-12) * T::PI();
    let short_below = m.a < m.h_a || (m.h_a - m.a).abs() <= T::rel_tol(1e-12) * m.a;
    match (obtuse, short_below) {
        (false, true) => ShapeCase::A,
        (false, false) => ShapeCase::B,
        (true, true) => ShapeCase::C,
        (true, false) => ShapeCase::D,
    }
}

/// One of the six radial intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Interval {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

impl Interval {
    pub const ALL: [Interval; 6] = [
        Interval::I,
        Interval::II,
        Interval::III,
        Interval::IV,
        Interval::V,
        Interval::VI,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn roman(self) -> &'static str {
        match self {
            Interval::I => "I",
            Interval::II => "II",
            Interval::III => "III",
            Interval::IV => "IV",
            Interval::V => "V",
            Interval::VI => "VI",
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.roman())
    }
}

/// What a ladder point is: the origin, a height, or a side length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BreakpointKind {
    Origin,
    Height(Height),
    SideA,
    SideB,
    SideC,
}

impl BreakpointKind {
    pub fn name(self) -> &'static str {
        match self {
            BreakpointKind::Origin => "0",
            BreakpointKind::Height(h) => h.name(),
            BreakpointKind::SideA => "a",
            BreakpointKind::SideB => "b",
            BreakpointKind::SideC => "c",
        }
    }
}

/// The seven ascending radii `[0, x1, .., x5, c]` bounding intervals I..VI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreakpointLadder<T> {
    pub points: [T; 7],
    pub kinds: [BreakpointKind; 7],
}

impl<T: Real> BreakpointLadder<T> {
    /// `[lo, hi]` bounds of an interval.
    pub fn bounds(&self, interval: Interval) -> (T, T) {
        let i = interval.index();
        (self.points[i], self.points[i + 1])
    }

    pub fn width(&self, interval: Interval) -> T {
        let (lo, hi) = self.bounds(interval);
        hi - lo
    }

    /// Interval whose half-open span `[lo, hi)` contains `r`. Zero-width
    /// intervals never match. `None` outside `[0, c)`.
    pub fn locate(&self, r: T) -> Option<Interval> {
        if !(r >= T::zero()) || r >= self.points[6] {
            return None;
        }
        Interval::ALL
            .into_iter()
            .rev()
            .find(|&iv| self.points[iv.index()] <= r && r < self.points[iv.index() + 1])
    }

    pub fn labels(&self) -> [Interval; 6] {
        Interval::ALL
    }
}

/// Builds the ladder for a classified triangle.
///
/// Cases A and C use `[0, h_c, h_b, a, h_a, b, c]`, cases B and D use
/// `[0, h_c, h_b, h_a, a, b, c]`. Points are forced non-decreasing so that a
/// tie resolved by [`classify`] yields a zero-width interval rather than a
/// negative one.
pub fn breakpoints<T: Real>(m: &TriangleMetrics<T>, case: ShapeCase) -> BreakpointLadder<T> {
    use BreakpointKind as K;
    let (raw, kinds) = if case.short_side_below_height() {
        (
            [T::zero(), m.h_c, m.h_b, m.a, m.h_a, m.b, m.c],
            [
                K::Origin,
                K::Height(Height::C),
                K::Height(Height::B),
                K::SideA,
                K::Height(Height::A),
                K::SideB,
                K::SideC,
            ],
        )
    } else {
        (
            [T::zero(), m.h_c, m.h_b, m.h_a, m.a, m.b, m.c],
            [
                K::Origin,
                K::Height(Height::C),
                K::Height(Height::B),
                K::Height(Height::A),
                K::SideA,
                K::SideB,
                K::SideC,
            ],
        )
    };
    let mut points = raw;
    for i in 1..7 {
        points[i] = points[i].max(points[i - 1]);
    }
    BreakpointLadder { points, kinds }
}
