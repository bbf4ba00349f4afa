//! Seeded random triangles for property suites.
//!
//! Sides are drawn uniformly from `[0.1, 10]` and non-triangles rejected.
//! One draw in ten is replaced by a near-right or near-isoceles triangle so
//! that the classification tie rules get exercised.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::SideTriple;

const SIDE_RANGE: (f64, f64) = (0.1, 10.0);
const INJECT_RATE: f64 = 0.1;

/// `n` side triples, deterministic for a given seed.
pub fn random_triangles(n: usize, seed: u64) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let candidate = if rng.gen_bool(INJECT_RATE) {
            if rng.gen_bool(0.5) {
                near_right(&mut rng)
            } else {
                near_isoceles(&mut rng)
            }
        } else {
            let mut side = || rng.gen_range(SIDE_RANGE.0..=SIDE_RANGE.1);
            [side(), side(), side()]
        };
        if SideTriple::new(candidate[0], candidate[1], candidate[2]).is_ok() {
            out.push(candidate);
        }
    }
    out
}

/// Relative perturbation: exactly zero a third of the time, otherwise tiny.
fn nudge<R: Rng>(rng: &mut R) -> f64 {
    match rng.gen_range(0..3) {
        0 => 0.0,
        1 => rng.gen_range(-1e-12..1e-12),
        _ => rng.gen_range(-1e-8..1e-8),
    }
}

fn near_right<R: Rng>(rng: &mut R) -> [f64; 3] {
    let a = rng.gen_range(SIDE_RANGE.0..=SIDE_RANGE.1);
    let b = rng.gen_range(SIDE_RANGE.0..=SIDE_RANGE.1);
    let c = a.hypot(b) * (1.0 + nudge(rng));
    [a, b, c]
}

fn near_isoceles<R: Rng>(rng: &mut R) -> [f64; 3] {
    let a = rng.gen_range(SIDE_RANGE.0..=SIDE_RANGE.1);
    let c = rng.gen_range(SIDE_RANGE.0..(2.0 * a).min(SIDE_RANGE.1));
    [a, a * (1.0 + nudge(rng)), c]
}
