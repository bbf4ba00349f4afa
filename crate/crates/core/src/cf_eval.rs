//! Piecewise closed-form evaluation of the correlation function γ(r) and its
//! first three derivatives.
//!
//! On every interval of the breakpoint ladder the second derivative has the
//! shape
//!
//! ```text
//! γ''(r) = [ Σ k·c(·,·)·Ω₂(h/r) + K ] / D,     D ∈ {2πS, 4πS}, K ∈ {𝒜, ℬ, 𝒞}
//! ```
//!
//! and only the term list, `K` and `D` change between intervals and cases.
//! Those tables are stored as data ([`IntervalFormula`]). γ' and γ follow by
//! integrating each term inward from `r = c`, where γ and γ' vanish:
//! `Ω₂(h/r)` integrates to an `Ω₁` difference and then to an `ω̂` difference,
//! the constant to a linear and then quadratic term. The values at every
//! breakpoint are cached in [`BoundaryConstants`], so a single evaluation
//! only touches one interval.
//!
//! Where γ is small (it falls off like (c - r)³ near `c`) the closed form is a
//! remainder of much larger terms. There γ and γ' are instead taken as
//! Kronrod sums of `∫ (s - r) γ''(s) ds` and `-∫ γ''(s) ds` over `[r, c]`, on
//! panels graded so that γ'' is analytic on each; on the last interval γ'' is
//! written as Ω₂ increments against its zero at `c`.

use crate::error::{DomainError, EvalError};
use crate::geometry::{
    breakpoints, classify, BreakpointLadder, Height, Interval, ShapeCase,
    TriangleMetrics,
};
use crate::omega::{
    omega1_diff, omega2, omega2_derivative, omega2_increment, omega_cap_diff, AngularConstants,
};
use crate::quadrature::{WGK, XGK};
use crate::scalar::Real;

/// Closed-form values of γ below this are recomputed by integrating γ''.
const TAIL_SWITCH: f64 = 1e-2;
/// Graded panels allowed before falling back to the closed form.
const MAX_TAIL_PANELS: usize = 48;

/// Which pairwise cotangent sum multiplies a term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pair {
    AlphaBeta,
    AlphaGamma,
    BetaGamma,
}

/// Which angular constant sits in the numerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstantKind {
    A,
    B,
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Denominator {
    TwoPiS,
    FourPiS,
}

/// `multiplicity · c(pair) · Ω₂(height / r)`
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Term {
    pub height: Height,
    pub pair: Pair,
    pub multiplicity: u8,
}

const fn term(height: Height, pair: Pair, multiplicity: u8) -> Term {
    Term {
        height,
        pair,
        multiplicity,
    }
}

const NO_TERMS: &[Term] = &[];
const HC: &[Term] = &[term(Height::C, Pair::AlphaBeta, 1)];
const HC_HB: &[Term] = &[
    term(Height::C, Pair::AlphaBeta, 1),
    term(Height::B, Pair::AlphaGamma, 1),
];
const HC_HA_HB: &[Term] = &[
    term(Height::C, Pair::AlphaBeta, 1),
    term(Height::A, Pair::BetaGamma, 1),
    term(Height::B, Pair::AlphaGamma, 1),
];
const HC_2HA_HB: &[Term] = &[
    term(Height::C, Pair::AlphaBeta, 1),
    term(Height::A, Pair::BetaGamma, 2),
    term(Height::B, Pair::AlphaGamma, 1),
];
const HB_HA: &[Term] = &[
    term(Height::B, Pair::AlphaGamma, 1),
    term(Height::A, Pair::BetaGamma, 1),
];

/// The second-derivative formula of one interval in one shape case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IntervalFormula {
    pub interval: Interval,
    pub terms: &'static [Term],
    pub constant: ConstantKind,
    pub denominator: Denominator,
}

impl IntervalFormula {
    pub fn has_height(&self, h: Height) -> bool {
        self.terms.iter().any(|t| t.height == h)
    }

    /// Same expression, ignoring which interval it is attached to.
    pub fn same_expression(&self, other: &IntervalFormula) -> bool {
        self.terms == other.terms
            && self.constant == other.constant
            && self.denominator == other.denominator
    }
}

/// Looks up the γ'' table entry for `interval` in `case`.
pub fn interval_formula(case: ShapeCase, interval: Interval) -> IntervalFormula {
    use ConstantKind as K;
    use Denominator::{FourPiS, TwoPiS};
    use Interval::*;
    use ShapeCase as S;

    let (terms, constant, denominator) = match (interval, case) {
        (I, _) => (NO_TERMS, K::A, TwoPiS),
        (II, _) => (HC, K::A, TwoPiS),
        (III, S::A | S::B) => (HC_HB, K::A, TwoPiS),
        (III, S::C | S::D) => (HC, K::A, TwoPiS),
        (IV, S::A | S::C) => (HC_HB, K::C, FourPiS),
        (IV, S::B) => (HC_HA_HB, K::A, TwoPiS),
        (IV, S::D) => (HC, K::A, TwoPiS),
        (V, S::A | S::B) => (HC_2HA_HB, K::C, FourPiS),
        (V, S::C | S::D) => (HC_HB, K::C, FourPiS),
        (VI, _) => (HB_HA, K::B, FourPiS),
    };
    IntervalFormula {
        interval,
        terms,
        constant,
        denominator,
    }
}

/// γ' and γ at each of the seven ladder points, chained inward from
/// `γ'(c) = γ(c) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryConstants<T> {
    pub d1: [T; 7],
    pub gamma: [T; 7],
}

/// γ and its derivatives at one radius. `d3` is `None` where the third
/// derivative is not defined (ladder points and active singular heights).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CFValue<T> {
    pub r: T,
    pub gamma: T,
    pub d1: T,
    pub d2: T,
    pub d3: Option<T>,
}

/// γ, γ' and γ'' of a single closed form evaluated at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormValue<T> {
    pub gamma: T,
    pub d1: T,
    pub d2: T,
}

/// Correlation function of one triangle with its integration constants cached.
///
/// Construction is `O(1)`; every evaluation afterwards is a pure read.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationFunction<T> {
    metrics: TriangleMetrics<T>,
    case: ShapeCase,
    constants: AngularConstants<T>,
    ladder: BreakpointLadder<T>,
    formulas: [IntervalFormula; 6],
    boundary: BoundaryConstants<T>,
}

impl<T: Real> CorrelationFunction<T> {
    /// Classifies `metrics` and chains the integration constants.
    pub fn new(metrics: TriangleMetrics<T>) -> Result<Self, EvalError> {
        Self::with_case(metrics, classify(&metrics))
    }

    /// Uses the given case instead of classifying. The case must match
    /// [`classify`] for the results to be meaningful.
    pub fn with_case(metrics: TriangleMetrics<T>, case: ShapeCase) -> Result<Self, EvalError> {
        let formulas = Interval::ALL.map(|iv| interval_formula(case, iv));
        let mut cf = Self {
            metrics,
            case,
            constants: AngularConstants::new(&metrics),
            ladder: breakpoints(&metrics, case),
            formulas,
            boundary: BoundaryConstants {
                d1: [T::zero(); 7],
                gamma: [T::zero(); 7],
            },
        };
        cf.boundary = cf.chain()?;
        Ok(cf)
    }

    fn chain(&self) -> Result<BoundaryConstants<T>, EvalError> {
        let mut d1 = [T::zero(); 7];
        let mut gamma = [T::zero(); 7];
        let p = &self.ladder.points;
        for i in (0..6).rev() {
            let (lo, hi) = (p[i], p[i + 1]);
            if lo == hi {
                d1[i] = d1[i + 1];
                gamma[i] = gamma[i + 1];
                continue;
            }
            let f = &self.formulas[i];
            d1[i] = d1[i + 1] + self.first_increment(f, lo, hi)?;
            gamma[i] = gamma[i + 1] + d1[i + 1] * (lo - hi) + self.value_increment(f, lo, hi)?;
        }
        Ok(BoundaryConstants { d1, gamma })
    }

    pub fn metrics(&self) -> &TriangleMetrics<T> {
        &self.metrics
    }

    pub fn case(&self) -> ShapeCase {
        self.case
    }

    pub fn constants(&self) -> &AngularConstants<T> {
        &self.constants
    }

    pub fn ladder(&self) -> &BreakpointLadder<T> {
        &self.ladder
    }

    pub fn boundary_constants(&self) -> &BoundaryConstants<T> {
        &self.boundary
    }

    pub fn formula(&self, interval: Interval) -> &IntervalFormula {
        &self.formulas[interval.index()]
    }

    fn pair(&self, pair: Pair) -> T {
        match pair {
            Pair::AlphaBeta => self.constants.c_ab,
            Pair::AlphaGamma => self.constants.c_ag,
            Pair::BetaGamma => self.constants.c_bg,
        }
    }

    fn constant(&self, kind: ConstantKind) -> T {
        match kind {
            ConstantKind::A => self.constants.a_const,
            ConstantKind::B => self.constants.b_const,
            ConstantKind::C => self.constants.c_const,
        }
    }

    fn denominator(&self, d: Denominator) -> T {
        let k = match d {
            Denominator::TwoPiS => T::lit(2.0),
            Denominator::FourPiS => T::lit(4.0),
        };
        k * T::PI() * self.metrics.area
    }

    fn weight(&self, t: &Term) -> T {
        T::lit(f64::from(t.multiplicity)) * self.pair(t.pair)
    }

    fn second_closed(&self, f: &IntervalFormula, r: T) -> Result<T, DomainError> {
        let mut sum = self.constant(f.constant);
        for t in f.terms {
            sum = sum + self.weight(t) * omega2(self.metrics.height(t.height) / r)?;
        }
        Ok(sum / self.denominator(f.denominator))
    }

    /// `∫_p^r γ''` for the closed form `f`.
    fn first_increment(&self, f: &IntervalFormula, r: T, p: T) -> Result<T, DomainError> {
        let mut sum = self.constant(f.constant) * (r - p);
        for t in f.terms {
            sum = sum + self.weight(t) * omega1_diff(self.metrics.height(t.height), r, p)?;
        }
        Ok(sum / self.denominator(f.denominator))
    }

    /// `∫_p^r (r - s) γ''(s) ds` for the closed form `f`.
    fn value_increment(&self, f: &IntervalFormula, r: T, p: T) -> Result<T, DomainError> {
        let dr = r - p;
        let mut sum = self.constant(f.constant) * dr * dr * T::lit(0.5);
        for t in f.terms {
            sum = sum + self.weight(t) * omega_cap_diff(self.metrics.height(t.height), r, p)?;
        }
        Ok(sum / self.denominator(f.denominator))
    }

    fn third_closed(&self, f: &IntervalFormula, r: T) -> Result<T, EvalError> {
        let guard = T::rel_tol(1e-12) * self.metrics.c;
        let mut sum = T::zero();
        for t in f.terms {
            let h = self.metrics.height(t.height);
            if r - h <= guard {
                return Err(EvalError::SingularPoint {
                    r: r.to_f64_lossy(),
                    height: h.to_f64_lossy(),
                });
            }
            let x = h / r;
            // d/dr Ω₂(h/r) = Ω₂'(h/r) · (-h/r²)
            sum = sum - self.weight(t) * omega2_derivative(x)? * h / (r * r);
        }
        Ok(sum / self.denominator(f.denominator))
    }

    /// γ'' on the last non-degenerate interval as a sum of Ω₂ increments
    /// relative to `c`, where γ'' vanishes. `gap = c - s`.
    fn tail_second(&self, f: &IntervalFormula, s: T, gap: T) -> Result<T, DomainError> {
        let c = self.metrics.c;
        let mut sum = T::zero();
        for t in f.terms {
            let h = self.metrics.height(t.height);
            sum = sum + self.weight(t) * omega2_increment(h, s, c, gap)?;
        }
        Ok(sum / self.denominator(f.denominator))
    }

    /// `(γ'(r), γ(r))` as `(-∫_r^c γ'', ∫_r^c (s - r) γ''(s) ds)`, summed by
    /// 21-point Kronrod panels. An interval whose lower end is an active
    /// height is integrated in `τ` with `s = lo + τ²`, which removes the
    /// `√(s - h)` branch there. Panels are never wider than their distance to
    /// the nearest remaining singularity. `None` when that takes more than
    /// [`MAX_TAIL_PANELS`] panels.
    fn tail_integrals(&self, r: T) -> Result<Option<(T, T)>, DomainError> {
        let guard = T::rel_tol(1e-12) * self.metrics.c;
        let p = &self.ladder.points;
        let last = (0..6).rev().find(|&i| p[i] < p[i + 1]);
        let (mut first, mut value) = (T::zero(), T::zero());
        let mut panels = 0;
        for i in 0..6 {
            let (lo, hi) = (p[i], p[i + 1]);
            if !(lo < hi) || hi <= r {
                continue;
            }
            let f = &self.formulas[i];
            let terminal = Some(i) == last;
            let heights = f.terms.iter().map(|t| self.metrics.height(t.height));
            let rooted = heights.clone().any(|h| (h - lo).abs() <= guard);
            let below = heights
                .filter(|&h| h < lo - guard)
                .fold(T::neg_infinity(), T::max);
            let start = r.max(lo);
            let (mut a, end) = if rooted {
                ((start - lo).sqrt(), (hi - lo).sqrt())
            } else {
                (start, hi)
            };
            while a < end {
                if panels == MAX_TAIL_PANELS {
                    return Ok(None);
                }
                let reach = if rooted {
                    (a * a + (lo - below)).sqrt()
                } else {
                    a - below
                };
                let b = if reach >= end - a { end } else { a + reach };
                let half = (b - a) * T::lit(0.5);
                for (k, (&x, &w)) in XGK.iter().zip(WGK.iter()).enumerate() {
                    let w = T::lit(w) * half;
                    let n = if k == 10 { 1 } else { 2 };
                    for sign in [-T::one(), T::one()].into_iter().take(n) {
                        let x = sign * T::lit(x);
                        let v = a + half * (T::one() + x);
                        // end - v, kept accurate near the top of the interval
                        let to_end = (end - b) + half * (T::one() - x);
                        let (s, jacobian, gap) = if rooted {
                            (lo + v * v, T::lit(2.0) * v, to_end * (end + v))
                        } else {
                            (v, T::one(), to_end)
                        };
                        let g2 = if terminal {
                            self.tail_second(f, s, gap)?
                        } else {
                            self.second_closed(f, s)?
                        };
                        let wj = w * jacobian * g2;
                        first = first + wj;
                        value = value + wj * (s - r);
                    }
                }
                panels += 1;
                a = b;
            }
        }
        Ok(Some((-first, value)))
    }

    /// Closed form at `r`, with γ and γ' replaced by [`Self::tail_integrals`]
    /// where the closed form is a small remainder of larger terms.
    fn refined(&self, interval: Interval, r: T) -> Result<ClosedFormValue<T>, EvalError> {
        let mut v = self.closed_form(interval, r)?;
        if v.gamma.abs() < T::lit(TAIL_SWITCH) {
            if let Some((d1, gamma)) = self.tail_integrals(r)? {
                v.gamma = gamma;
                v.d1 = d1;
            }
        }
        Ok(v)
    }

    /// Evaluates the closed form attached to `interval` at `r`, using that
    /// interval's chained constants. `r` may lie outside the interval as long
    /// as every Ω argument stays in its domain; this gives the one-sided
    /// limits at breakpoints.
    pub fn closed_form(&self, interval: Interval, r: T) -> Result<ClosedFormValue<T>, EvalError> {
        let i = interval.index();
        let f = &self.formulas[i];
        let hi = self.ladder.points[i + 1];
        let d1_hi = self.boundary.d1[i + 1];
        let g_hi = self.boundary.gamma[i + 1];
        Ok(ClosedFormValue {
            gamma: g_hi + d1_hi * (r - hi) + self.value_increment(f, r, hi)?,
            d1: d1_hi + self.first_increment(f, r, hi)?,
            d2: self.second_closed(f, r)?,
        })
    }

    fn check_radius(r: T) -> Result<(), EvalError> {
        if r >= T::zero() {
            Ok(())
        } else {
            Err(DomainError {
                function: "correlation",
                value: r.to_f64_lossy(),
                detail: "radius must be non-negative",
            }
            .into())
        }
    }

    /// γ(r). Exactly 1 at the origin and 0 from `c` on.
    pub fn correlation(&self, r: T) -> Result<T, EvalError> {
        Self::check_radius(r)?;
        if r == T::zero() {
            return Ok(T::one());
        }
        match self.ladder.locate(r) {
            None => Ok(T::zero()),
            Some(iv) => {
                let v = self.refined(iv, r)?.gamma;
                Ok(v.max(T::zero()).min(T::one()))
            }
        }
    }

    /// γ'(r); the value at 0 is the right limit `-L/(πS)`.
    pub fn first_derivative(&self, r: T) -> Result<T, EvalError> {
        Self::check_radius(r)?;
        match self.ladder.locate(r) {
            None => Ok(T::zero()),
            Some(iv) => Ok(self.refined(iv, r)?.d1.min(T::zero())),
        }
    }

    /// γ''(r), right limit at breakpoints (so `𝒜/(2πS)` at 0).
    pub fn second_derivative(&self, r: T) -> Result<T, EvalError> {
        Self::check_radius(r)?;
        match self.ladder.locate(r) {
            None => Ok(T::zero()),
            Some(iv) => Ok(self.second_closed(&self.formulas[iv.index()], r)?),
        }
    }

    /// γ'''(r). Fails with [`EvalError::SingularPoint`] within `1e-12 c` above
    /// a height whose Ω₂ term is active at `r`.
    pub fn third_derivative(&self, r: T) -> Result<T, EvalError> {
        Self::check_radius(r)?;
        match self.ladder.locate(r) {
            None => Ok(T::zero()),
            Some(iv) => self.third_closed(&self.formulas[iv.index()], r),
        }
    }

    /// True when `r` sits (within `1e-12 c`) on a ladder point in `(0, c]`.
    pub fn is_breakpoint(&self, r: T) -> bool {
        let guard = T::rel_tol(1e-12) * self.metrics.c;
        self.ladder.points[1..]
            .iter()
            .any(|&p| (r - p).abs() <= guard)
    }

    pub fn evaluate(&self, r: T) -> Result<CFValue<T>, EvalError> {
        let d3 = if self.is_breakpoint(r) {
            None
        } else {
            match self.third_derivative(r) {
                Ok(v) => Some(v),
                Err(EvalError::SingularPoint { .. }) => None,
                Err(e) => return Err(e),
            }
        };
        Ok(CFValue {
            r,
            gamma: self.correlation(r)?,
            d1: self.first_derivative(r)?,
            d2: self.second_derivative(r)?,
            d3,
        })
    }

    /// One [`CFValue`] per grid point, in grid order.
    pub fn profile(&self, grid: &[T]) -> Result<Vec<CFValue<T>>, EvalError> {
        grid.iter().map(|&r| self.evaluate(r)).collect()
    }

    /// Heights at which an Ω₂ term switches on, i.e. where γ''' blows up
    /// like `(r - h)^(-1/2)`.
    pub fn singular_heights(&self) -> Vec<Height> {
        let guard = T::rel_tol(1e-12) * self.metrics.c;
        Height::ALL
            .into_iter()
            .filter(|&h| {
                // the term switches on at the lower end of the first
                // non-degenerate interval that carries it
                let first = Interval::ALL.into_iter().find(|&iv| {
                    self.ladder.width(iv) > T::zero() && self.formulas[iv.index()].has_height(h)
                });
                first.is_some_and(|iv| {
                    (self.ladder.bounds(iv).0 - self.metrics.height(h)).abs() <= guard
                })
            })
            .collect()
    }
}

/// Builds the cached constants for `(m, case)`.
pub fn chain_constants<T: Real>(
    m: &TriangleMetrics<T>,
    case: ShapeCase,
) -> Result<BoundaryConstants<T>, EvalError> {
    Ok(*CorrelationFunction::with_case(*m, case)?.boundary_constants())
}

pub fn second_derivative<T: Real>(
    m: &TriangleMetrics<T>,
    case: ShapeCase,
    r: T,
) -> Result<T, EvalError> {
    CorrelationFunction::with_case(*m, case)?.second_derivative(r)
}

pub fn first_derivative<T: Real>(
    m: &TriangleMetrics<T>,
    case: ShapeCase,
    r: T,
) -> Result<T, EvalError> {
    CorrelationFunction::with_case(*m, case)?.first_derivative(r)
}

pub fn correlation<T: Real>(m: &TriangleMetrics<T>, case: ShapeCase, r: T) -> Result<T, EvalError> {
    CorrelationFunction::with_case(*m, case)?.correlation(r)
}

pub fn third_derivative<T: Real>(
    m: &TriangleMetrics<T>,
    case: ShapeCase,
    r: T,
) -> Result<T, EvalError> {
    CorrelationFunction::with_case(*m, case)?.third_derivative(r)
}

/// Batch evaluation over `grid` with one set of cached constants.
pub fn eval_profile<T: Real>(
    m: &TriangleMetrics<T>,
    grid: &[T],
) -> Result<Vec<CFValue<T>>, EvalError> {
    CorrelationFunction::new(*m)?.profile(grid)
}
