#![allow(dead_code)]

use quateq::{EquationCoefficients, Quaternion, SolutionSet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Finite members verbatim, or `n` samples of an infinite set.
pub fn members(set: &SolutionSet, n: usize, seed: u64) -> Vec<Quaternion> {
    set.sample(n, &mut rng(seed))
}

/// Residual of `x` relative to `scale · max(1, |x|²)`.
pub fn relative_residual(c: &EquationCoefficients, x: Quaternion) -> f64 {
    c.residual(x) / c.residual_scale(x)
}

/// Same kind and the same members, up to `tol · scale · max(1, |x|)`.
pub fn sets_equal(a: &SolutionSet, b: &SolutionSet, tol: f64, scale: f64) -> bool {
    if a.kind() != b.kind() {
        return false;
    }
    let close =
        |x: Quaternion, set: &SolutionSet| set.distance(x) <= tol * scale * x.modulus().max(1.0);
    match (a, b) {
        (SolutionSet::Empty, SolutionSet::Empty) => true,
        (SolutionSet::Circle(ca), SolutionSet::Circle(cb)) => {
            (ca.radius - cb.radius).abs() <= tol * scale * ca.radius.max(1.0)
                && members(a, 16, 0).into_iter().all(|x| close(x, b))
                && members(b, 16, 0).into_iter().all(|x| close(x, a))
        }
        (
            SolutionSet::ThreeSphere {
                center: c1,
                radius: r1,
            },
            SolutionSet::ThreeSphere {
                center: c2,
                radius: r2,
            },
        ) => {
            (*c1 - *c2).modulus() <= tol * scale * c1.modulus().max(1.0)
                && (r1 - r2).abs() <= tol * scale * r1.max(1.0)
        }
        _ => {
            a.points().into_iter().all(|x| close(x, b))
                && b.points().into_iter().all(|x| close(x, a))
        }
    }
}
