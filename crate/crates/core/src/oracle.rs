//! Numerical cross-check that never touches the closed form.
//!
//! The quaternion equation is four real quadratic equations in the four
//! components of `X`. [`newton_multistart`] runs damped Gauss-Newton from
//! seeded random starts inside an a-priori bound on the solutions and
//! clusters whatever converges; [`verify_solution_set`] compares that
//! against a [`SolutionSet`].
//!
//! The start box comes from `|X P X*| = |P| |X|²`: any solution satisfies
//! `|P| |X|² <= |S| + (|Q| + |R|) |X|`, hence
//! `|X| <= (|Q| + |R|)/|P| + sqrt(|S|/|P|)`. The default half-width is four
//! times that bound plus a margin of 4.

use nalgebra::{Matrix4, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::quaternion::Quaternion;
use crate::solver::{EquationCoefficients, SolutionSet};

/// Residual bound, relative to [`EquationCoefficients::residual_scale`], that
/// closed-form members and reported roots must meet.
pub const MEMBER_RESIDUAL_TOL: f64 = 1e-8;

/// Samples drawn from circles and spheres when verifying them.
pub const INFINITE_SET_SAMPLES: usize = 64;

const MAX_HALVINGS: usize = 30;
const POLISH_STEPS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub n_starts: usize,
    /// Half-width of the start cube; `None` derives it from the coefficients.
    pub box_scale: Option<f64>,
    pub newton_tol: f64,
    pub max_iters: usize,
    pub cluster_radius: f64,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            n_starts: 400,
            box_scale: None,
            newton_tol: 1e-12,
            max_iters: 80,
            cluster_radius: 1e-6,
            seed: 0,
        }
    }
}

impl OracleConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn box_scale_for(&self, c: &EquationCoefficients) -> f64 {
        self.box_scale.unwrap_or_else(|| default_box_scale(c))
    }
}

/// `4 (1 + sqrt(|S|/|P|) + (|Q| + |R|)/|P|)`.
pub fn default_box_scale(c: &EquationCoefficients) -> f64 {
    let p = c.p.modulus();
    4.0 * (1.0 + (c.s.modulus() / p).sqrt() + (c.q.modulus() + c.r.modulus()) / p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Match,
    ExtraRoot,
    MissingRoot,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub roots: Vec<Quaternion>,
    #[serde(serialize_with = "finite_or_null")]
    pub max_residual: f64,
    /// Outcome of comparing against a closed-form set, when one was given.
    pub verdict: Option<Verdict>,
}

fn finite_or_null<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

/// The four real components of `X P X* + X Q + R X* - S` at `X = v`.
pub fn real_system(c: &EquationCoefficients, v: [f64; 4]) -> [f64; 4] {
    c.defect(Quaternion::from_array(v)).to_array()
}

/// Analytic Jacobian of [`real_system`], row-major: `J[i][j] = ∂F_i/∂x_j`.
///
/// The derivative along `H` is `H P X* + X P H* + H Q + R H*`.
pub fn jacobian(c: &EquationCoefficients, v: [f64; 4]) -> [[f64; 4]; 4] {
    let x = Quaternion::from_array(v);
    let xp = x * c.p;
    let pxc = c.p * x.conjugate();
    let basis = [Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::K];
    let mut jac = [[0.0; 4]; 4];
    for (j, h) in basis.iter().enumerate() {
        let hc = h.conjugate();
        let col = (*h * pxc + xp * hc + *h * c.q + c.r * hc).to_array();
        for (i, row) in jac.iter_mut().enumerate() {
            row[j] = col[i];
        }
    }
    jac
}

fn to_matrix(jac: &[[f64; 4]; 4]) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| jac[i][j])
}

/// Minimum-norm least-squares Newton step `J⁺ F`.
fn newton_step(c: &EquationCoefficients, x: Quaternion, f: Quaternion) -> Option<Quaternion> {
    let jac = to_matrix(&jacobian(c, x.to_array()));
    let svd = jac.svd(true, true);
    let cutoff = svd.singular_values.max() * 1e-12;
    let rhs = Vector4::from(f.to_array());
    let step = svd.solve(&rhs, cutoff).ok()?;
    let q = Quaternion::new(step[0], step[1], step[2], step[3]);
    q.is_finite().then_some(q)
}

#[derive(Debug, Clone, Copy)]
struct NewtonOutcome {
    point: Quaternion,
    residual: f64,
    converged: bool,
}

/// Damped Newton from `start`: each step is halved up to 30 times until the
/// residual decreases.
fn damped_newton(c: &EquationCoefficients, start: Quaternion, cfg: &OracleConfig) -> NewtonOutcome {
    let mut x = start;
    let mut f = c.defect(x);
    let mut r = f.modulus();
    let mut polish = 0;
    for _ in 0..cfg.max_iters {
        if r <= cfg.newton_tol * c.residual_scale(x) {
            if polish == POLISH_STEPS || r == 0.0 {
                break;
            }
            polish += 1;
        }
        let Some(step) = newton_step(c, x, f) else {
            break;
        };
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let trial = x - step * t;
            let ft = c.defect(trial);
            let rt = ft.modulus();
            if rt < r {
                x = trial;
                f = ft;
                r = rt;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    NewtonOutcome {
        point: x,
        residual: r,
        converged: r <= cfg.newton_tol * c.residual_scale(x),
    }
}

/// Greedy clustering in ascending residual order; each representative is the
/// lowest-residual member of its cluster.
fn cluster(mut found: Vec<(Quaternion, f64)>, radius: f64) -> Vec<(Quaternion, f64)> {
    found.sort_by(|a, b| {
        a.1.total_cmp(&b.1).then_with(|| {
            a.0.to_array()
                .partial_cmp(&b.0.to_array())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    let mut reps: Vec<(Quaternion, f64)> = Vec::new();
    for (x, r) in found {
        if reps.iter().all(|(rep, _)| (x - *rep).modulus() > radius) {
            reps.push((x, r));
        }
    }
    reps
}

fn start_points(c: &EquationCoefficients, cfg: &OracleConfig) -> Vec<Quaternion> {
    let half = cfg.box_scale_for(c);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.n_starts)
        .map(|_| {
            Quaternion::new(
                rng.gen_range(-half..=half),
                rng.gen_range(-half..=half),
                rng.gen_range(-half..=half),
                rng.gen_range(-half..=half),
            )
        })
        .collect()
}

/// Seeded multistart Newton; returns clustered roots without a verdict.
pub fn newton_multistart(c: &EquationCoefficients, cfg: &OracleConfig) -> Result<OracleReport> {
    if !(c.p.modulus() > 0.0) {
        return Err(Error::InvalidCoefficients("P must be non-zero".into()));
    }
    let starts = start_points(c, cfg);
    // collect preserves start order, so the result does not depend on scheduling
    let outcomes: Vec<NewtonOutcome> = starts
        .par_iter()
        .map(|s| damped_newton(c, *s, cfg))
        .collect();
    let converged = outcomes
        .into_iter()
        .filter(|o| o.converged)
        .map(|o| (o.point, o.residual))
        .collect();
    let reps = cluster(converged, cfg.cluster_radius);
    let max_residual = reps.iter().map(|(_, r)| *r).fold(0.0, f64::max);
    let mut roots: Vec<Quaternion> = reps.into_iter().map(|(x, _)| x).collect();
    roots.sort_by(|a, b| {
        a.to_array()
            .partial_cmp(&b.to_array())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(OracleReport {
        roots,
        max_residual,
        verdict: None,
    })
}

/// Checks a closed-form set against the oracle.
///
/// * every member (or 64 samples of an infinite set) must have residual
///   within `1e-8` of its scale, otherwise the verdict is `Inconclusive`;
/// * every multistart root must lie within `10 · cluster_radius` of the set,
///   otherwise `ExtraRoot`;
/// * Newton seeded at each finite member must converge back onto it,
///   otherwise `MissingRoot`.
pub fn verify_solution_set(
    c: &EquationCoefficients,
    set: &SolutionSet,
    cfg: &OracleConfig,
) -> Result<OracleReport> {
    let mut report = newton_multistart(c, cfg)?;
    let reach = 10.0 * cfg.cluster_radius;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
    let members = set.sample(INFINITE_SET_SAMPLES, &mut rng);
    let members_ok = members
        .iter()
        .all(|x| c.residual(*x) <= MEMBER_RESIDUAL_TOL * c.residual_scale(*x));

    let extra = report.roots.iter().any(|x| !(set.distance(*x) <= reach));
    let missing = set.is_finite()
        && set.points().iter().any(|m| {
            let out = damped_newton(c, *m, cfg);
            !(out.converged && (out.point - *m).modulus() <= reach)
        });

    report.verdict = Some(if extra {
        Verdict::ExtraRoot
    } else if missing {
        Verdict::MissingRoot
    } else if !members_ok {
        Verdict::Inconclusive
    } else {
        Verdict::Match
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::random_coefficients;

    const ONE: Quaternion = Quaternion::ONE;
    const I: Quaternion = Quaternion::I;
    const ZERO: Quaternion = Quaternion::ZERO;

    fn coeffs(p: Quaternion, q: Quaternion, r: Quaternion, s: Quaternion) -> EquationCoefficients {
        EquationCoefficients::new(p, q, r, s).unwrap()
    }

    #[test]
    fn system_values() {
        assert_eq!(
            real_system(&coeffs(ONE, ONE, ONE, -ONE), [-1.0, 0.0, 0.0, 0.0]),
            [0.0; 4]
        );
        assert_eq!(
            real_system(&coeffs(ONE, ZERO, ZERO, -ONE), [0.0; 4]),
            [1.0, 0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn jacobian_of_modulus_term() {
        let jac = jacobian(&coeffs(ONE, ZERO, ZERO, ZERO), [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(jac[0], [2.0, 0.0, 0.0, 0.0]);
        for row in &jac[1..] {
            assert_eq!(*row, [0.0; 4]);
        }
    }

    #[test]
    fn jacobian_at_origin_is_linear_part() {
        // X i X* + X + X* linearises to H + H* = 2 h0 at the origin
        let jac = jacobian(&coeffs(I, ONE, ONE, ZERO), [0.0; 4]);
        assert_eq!(jac, [[2.0, 0.0, 0.0, 0.0], [0.0; 4], [0.0; 4], [0.0; 4]]);
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = 1e-6;
        for _ in 0..50 {
            let c = random_coefficients(&mut rng);
            let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
            let jac = jacobian(&c, v);
            for j in 0..4 {
                let (mut plus, mut minus) = (v, v);
                plus[j] += h;
                minus[j] -= h;
                let (fp, fm) = (real_system(&c, plus), real_system(&c, minus));
                for i in 0..4 {
                    let fd = (fp[i] - fm[i]) / (2.0 * h);
                    assert!(
                        (fd - jac[i][j]).abs() < 1e-6,
                        "entry ({i},{j}): {fd} vs {}",
                        jac[i][j]
                    );
                }
            }
        }
    }

    #[test]
    fn sphere_roots_lie_on_sphere() {
        let c = coeffs(ONE, ONE, ONE, ZERO);
        let report = newton_multistart(&c, &OracleConfig::with_seed(3)).unwrap();
        assert!(!report.roots.is_empty());
        for x in &report.roots {
            assert!(((*x + ONE).modulus() - 1.0).abs() <= 1e-8);
        }
    }

    #[test]
    fn no_roots_for_empty_case() {
        let c = coeffs(ONE, ZERO, ZERO, -ONE);
        let report = newton_multistart(&c, &OracleConfig::with_seed(3)).unwrap();
        assert!(report.roots.is_empty());
        assert_eq!(report.max_residual, 0.0);
    }

    #[test]
    fn multistart_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let c = random_coefficients(&mut rng);
        let cfg = OracleConfig::with_seed(42);
        let a = newton_multistart(&c, &cfg).unwrap();
        let b = newton_multistart(&c, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn point_roots_clustered() {
        let c = coeffs(ONE, ONE, ONE, -ONE);
        let report = newton_multistart(&c, &OracleConfig::with_seed(1)).unwrap();
        assert_eq!(report.roots.len(), 1);
        assert!((report.roots[0] + ONE).modulus() < 1e-5);
    }

    #[test]
    fn verdicts() {
        let cfg = OracleConfig::with_seed(5);
        let circle = coeffs(I, ONE, ONE, -I);
        let set = crate::solver::solve(&circle, &Default::default()).unwrap();
        assert_eq!(
            verify_solution_set(&circle, &set, &cfg).unwrap().verdict,
            Some(Verdict::Match)
        );

        let empty = coeffs(ONE, ONE, ONE, I);
        assert_eq!(
            verify_solution_set(&empty, &SolutionSet::Empty, &cfg)
                .unwrap()
                .verdict,
            Some(Verdict::Match)
        );

        // claiming nothing where -1 solves the equation
        let point = coeffs(ONE, ONE, ONE, -ONE);
        assert_eq!(
            verify_solution_set(&point, &SolutionSet::Empty, &cfg)
                .unwrap()
                .verdict,
            Some(Verdict::ExtraRoot)
        );
        // a wrong extra member is not re-found by Newton
        let bogus = SolutionSet::TwoPoints(-ONE, ONE * 3.0);
        assert_eq!(
            verify_solution_set(&point, &bogus, &cfg).unwrap().verdict,
            Some(Verdict::MissingRoot)
        );
    }

    #[test]
    fn report_json() {
        let report = OracleReport {
            roots: vec![ONE],
            max_residual: 0.0,
            verdict: Some(Verdict::ExtraRoot),
        };
        let v = serde_json::to_value(&report).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"roots": [[1.0, 0.0, 0.0, 0.0]], "max_residual": 0.0, "verdict": "extra_root"})
        );
    }
}
