//! Seeded instance generators for tests and benchmarks.
//!
//! Circles and 3-spheres of solutions only occur on measure-zero subsets of
//! coefficient space, so random sampling never reaches them; the generators
//! here build such instances directly.

use rand::Rng;

use crate::geometry::{bisector_plane, ANTIPODAL_TOL};
use crate::quaternion::{Quaternion, Vector3};
use crate::solver::{reduce_nonreal, EquationCoefficients};

pub fn uniform_quaternion<R: Rng + ?Sized>(rng: &mut R, half_width: f64) -> Quaternion {
    Quaternion::new(
        rng.gen_range(-half_width..=half_width),
        rng.gen_range(-half_width..=half_width),
        rng.gen_range(-half_width..=half_width),
        rng.gen_range(-half_width..=half_width),
    )
}

fn uniform_vector<R: Rng + ?Sized>(rng: &mut R, half_width: f64, min_norm: f64) -> Vector3 {
    loop {
        let v = uniform_quaternion(rng, half_width).vector();
        if v.norm() >= min_norm {
            return v;
        }
    }
}

/// Components uniform in `[-2, 2]`, redrawing `P` while `|P| < 0.1`.
pub fn random_coefficients<R: Rng + ?Sized>(rng: &mut R) -> EquationCoefficients {
    let p = loop {
        let p = uniform_quaternion(rng, 2.0);
        if p.modulus() >= 0.1 {
            break p;
        }
    };
    EquationCoefficients {
        p,
        q: uniform_quaternion(rng, 2.0),
        r: uniform_quaternion(rng, 2.0),
        s: uniform_quaternion(rng, 2.0),
    }
}

/// Real `P`, arbitrary `Q`, `R = Q*` and real `S` chosen so that the
/// solutions form a 3-sphere of radius in `[0.25, 2]`.
pub fn three_sphere_instance<R: Rng + ?Sized>(rng: &mut R) -> EquationCoefficients {
    let p0 = loop {
        let p0: f64 = rng.gen_range(-2.0..=2.0);
        if p0.abs() >= 0.25 {
            break p0;
        }
    };
    let q = uniform_quaternion(rng, 2.0);
    let radius: f64 = rng.gen_range(0.25..=2.0);
    // ρ = s0/p0 + |Q|²/p0² = radius²
    let s0 = p0 * (radius * radius - q.norm_sq() / (p0 * p0));
    EquationCoefficients {
        p: Quaternion::real(p0),
        q,
        r: q.conjugate(),
        s: Quaternion::real(s0),
    }
}

/// Non-real `P` with a circle of solutions.
///
/// Picks `s̃` and `s̃0 = p0 |s̃| / |p|`, a vector `R̃` orthogonal to the
/// bisector plane of `(p, s̃)` and an arbitrary `Q`, then back-solves
/// `R = (Q* P - R̃ (P - P*)) (P*)⁻¹` and `S` from the definition of `S̃`.
pub fn circle_instance<R: Rng + ?Sized>(rng: &mut R) -> EquationCoefficients {
    let p0: f64 = rng.gen_range(-2.0..=2.0);
    let p_vec = uniform_vector(rng, 2.0, 0.3);
    let p = Quaternion::from_parts(p0, p_vec);
    let s_vec = uniform_vector(rng, 2.0, 0.3);
    let s_tilde = Quaternion::from_parts(p0 * s_vec.norm() / p_vec.norm(), s_vec);

    let plane = bisector_plane(p_vec, s_vec, ANTIPODAL_TOL).expect("non-zero vectors");
    let raw = uniform_quaternion(rng, 2.0);
    let (a, b) = plane.coordinates(raw);
    let r_tilde = raw - plane.point(a, b);

    let q = uniform_quaternion(rng, 2.0);
    let d = p - p.conjugate();
    let r = (q.conjugate() * p - r_tilde * d) * p.conjugate().inverse().expect("P ≠ 0");

    let partial = EquationCoefficients {
        p,
        q,
        r,
        s: Quaternion::ZERO,
    };
    let correction = reduce_nonreal(&partial).expect("non-real P").s_tilde;
    EquationCoefficients {
        s: s_tilde - correction,
        ..partial
    }
}

/// Unit quaternion in a generic direction, for perturbation checks.
pub fn generic_direction<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    crate::solver::random_unit(rng)
}
