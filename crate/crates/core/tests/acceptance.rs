//! Exit criteria. Runs every criterion, prints one PASS/FAIL line for each
//! and exits non-zero if any failed.

mod common;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3, FRAC_PI_6};
use std::time::{Duration, Instant};

use nalgebra::Matrix4;
use quateq::generators::{
    circle_instance, generic_direction, random_coefficients, three_sphere_instance,
    uniform_quaternion,
};
use quateq::{
    bisector_plane, jacobian, real_system, solve, verify_solution_set, EquationCoefficients,
    OracleConfig, Quaternion, SolutionSet, SolverConfig, Verdict,
};
use rand::Rng;

use common::{members, relative_residual, rng, sets_equal};

const ONE: Quaternion = Quaternion::ONE;
const I: Quaternion = Quaternion::I;
const J: Quaternion = Quaternion::J;
const K: Quaternion = Quaternion::K;
const ZERO: Quaternion = Quaternion::ZERO;

struct Outcome {
    failures: Vec<String>,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Self {
            failures: Vec::new(),
            detail: String::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn within(&mut self, elapsed: Duration, limit: Duration) {
        self.check(elapsed < limit, || {
            format!("runtime {elapsed:.2?} exceeds {limit:?}")
        });
    }
}

fn coeffs(p: Quaternion, q: Quaternion, r: Quaternion, s: Quaternion) -> EquationCoefficients {
    EquationCoefficients::new(p, q, r, s).unwrap()
}

fn golden_examples() -> Outcome {
    let mut out = Outcome::new();
    let start = Instant::now();
    let cfg = SolverConfig::default();
    let tol = 1e-10;
    let expect = |out: &mut Outcome, name: &str, c: EquationCoefficients, want: SolutionSet| {
        let got = solve(&c, &cfg).unwrap();
        out.check(sets_equal(&got, &want, tol, 1.0), || {
            format!("{name}: got {got:?}, want {want:?}")
        });
    };

    expect(
        &mut out,
        "(1,0,0,-1)",
        coeffs(ONE, ZERO, ZERO, -ONE),
        SolutionSet::Empty,
    );
    expect(
        &mut out,
        "(1,1,1,-1)",
        coeffs(ONE, ONE, ONE, -ONE),
        SolutionSet::Point(-ONE),
    );
    expect(
        &mut out,
        "(1,1,1,0)",
        coeffs(ONE, ONE, ONE, ZERO),
        SolutionSet::ThreeSphere {
            center: -ONE,
            radius: 1.0,
        },
    );
    expect(
        &mut out,
        "(1,1,1,i)",
        coeffs(ONE, ONE, ONE, I),
        SolutionSet::Empty,
    );

    for theta in [FRAC_PI_6, FRAC_PI_2] {
        for s_hat in [I, J, (I + K) * FRAC_1_SQRT_2] {
            let c = coeffs(ONE, ONE, -ONE, ONE + s_hat * (2.0 * theta.sin()));
            let plus = s_hat * theta.sin() + theta.cos();
            let minus = s_hat * theta.sin() - theta.cos();
            let want = if theta == FRAC_PI_2 {
                SolutionSet::Point(s_hat)
            } else {
                SolutionSet::TwoPoints(plus, minus)
            };
            expect(
                &mut out,
                &format!("(1,1,-1,1+2sin({theta:.4})·{s_hat})"),
                c,
                want,
            );
        }
    }
    expect(
        &mut out,
        "(1,1,-1,1+3j)",
        coeffs(ONE, ONE, -ONE, ONE + J * 3.0),
        SolutionSet::Empty,
    );
    expect(
        &mut out,
        "(i,1,1,0)",
        coeffs(I, ONE, ONE, ZERO),
        SolutionSet::Point(ZERO),
    );
    expect(
        &mut out,
        "(i,1,1,1)",
        coeffs(I, ONE, ONE, ONE),
        SolutionSet::Empty,
    );

    let circle = solve(&coeffs(I, ONE, ONE, -I), &cfg).unwrap();
    match &circle {
        SolutionSet::Circle(c) => {
            out.check((c.radius - 1.0).abs() <= tol, || {
                format!("(i,1,1,-i): radius {}", c.radius)
            });
            out.check(c.center.modulus() <= tol, || {
                format!("(i,1,1,-i): center {}", c.center)
            });
            for x in members(&circle, 64, 0) {
                let in_jk = x.w.abs() <= tol
                    && x.x.abs() <= tol
                    && (x.y * x.y + x.z * x.z - 1.0).abs() <= tol;
                out.check(in_jk, || {
                    format!("(i,1,1,-i): sample {x} not on the unit circle of span{{j,k}}")
                });
            }
        }
        other => out.check(false, || format!("(i,1,1,-i): got {other:?}")),
    }
    expect(
        &mut out,
        "(i,1,1,1-i)",
        coeffs(I, ONE, ONE, ONE - I),
        SolutionSet::Empty,
    );
    for phi0 in [0.0, FRAC_PI_3] {
        let c = coeffs(I, ONE, ONE, I + 2.0 * f64::cos(phi0));
        let a = I * phi0.sin() + phi0.cos();
        let b = -I * phi0.sin() + phi0.cos();
        let want = if phi0 == 0.0 {
            SolutionSet::Point(ONE)
        } else {
            SolutionSet::TwoPoints(a, b)
        };
        expect(&mut out, &format!("(i,1,1,2cos({phi0:.4})+i)"), c, want);
    }
    out.within(start.elapsed(), Duration::from_secs(1));
    out.detail = format!("17 instances in {:.2?}", start.elapsed());
    out
}

fn residual_suite() -> Outcome {
    let mut out = Outcome::new();
    let start = Instant::now();
    let cfg = SolverConfig::default();
    let mut rng = rng(2024);
    let mut worst: f64 = 0.0;
    let mut checked = 0usize;
    for n in 0..10_000u64 {
        let c = random_coefficients(&mut rng);
        let set = solve(&c, &cfg).unwrap();
        for x in members(&set, 64, n) {
            let r = relative_residual(&c, x);
            worst = worst.max(r);
            checked += 1;
            out.check(r <= 1e-8, || {
                format!("instance {n} ({}): residual {r:e} at {x}", set.kind())
            });
        }
    }
    out.within(start.elapsed(), Duration::from_secs(30));
    out.detail = format!(
        "{checked} members, worst relative residual {worst:.2e}, {:.2?}",
        start.elapsed()
    );
    out
}

fn oracle_cross_validation() -> Outcome {
    let mut out = Outcome::new();
    let start = Instant::now();
    let cfg = SolverConfig::default();
    let mut rng = rng(77);
    let mut instances: Vec<(&str, EquationCoefficients)> = Vec::new();
    instances.extend((0..200).map(|_| ("random", random_coefficients(&mut rng))));
    instances.extend((0..50).map(|_| ("three_sphere", three_sphere_instance(&mut rng))));
    instances.extend((0..50).map(|_| ("circle", circle_instance(&mut rng))));
    let mut matched = 0;
    for (n, (label, c)) in instances.iter().enumerate() {
        let set = solve(c, &cfg).unwrap();
        let report = verify_solution_set(c, &set, &OracleConfig::with_seed(n as u64)).unwrap();
        if report.verdict == Some(Verdict::Match) {
            matched += 1;
        }
        out.check(report.verdict == Some(Verdict::Match), || {
            format!(
                "{label} #{n}: {} -> {:?} (oracle roots {:?})",
                set.kind(),
                report.verdict,
                report.roots
            )
        });
    }
    out.within(start.elapsed(), Duration::from_secs(300));
    out.detail = format!(
        "{matched}/{} Match, {:.2?}",
        instances.len(),
        start.elapsed()
    );
    out
}

fn degeneracy_classification() -> Outcome {
    let mut out = Outcome::new();
    let cfg = SolverConfig::default();
    let mut rng = rng(31);
    let mut classified = 0;
    let mut flipped = 0;
    for n in 0..100 {
        let (c, want) = if n % 2 == 0 {
            (three_sphere_instance(&mut rng), "three_sphere")
        } else {
            (circle_instance(&mut rng), "circle")
        };
        let set = solve(&c, &cfg).unwrap();
        if set.kind() == want {
            classified += 1;
        }
        out.check(set.kind() == want, || {
            format!("#{n}: expected {want}, got {set:?}")
        });
        let perturbed = EquationCoefficients {
            s: c.s + generic_direction(&mut rng) * 1e-3,
            ..c
        };
        let after = solve(&perturbed, &cfg).unwrap();
        if after.is_finite() {
            flipped += 1;
        }
        out.check(after.is_finite(), || {
            format!("#{n}: perturbed {want} stayed {}", after.kind())
        });
    }
    out.detail =
        format!("{classified}/100 classified, {flipped}/100 collapse under 1e-3 perturbation");
    out
}

fn algebraic_identities() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = rng(99);
    for _ in 0..10_000 {
        let a = uniform_quaternion(&mut rng, 10.0);
        let b = uniform_quaternion(&mut rng, 10.0);
        let (ma, mb) = (a.modulus(), b.modulus());
        let mult = ((a * b).modulus() - ma * mb).abs();
        out.check(mult <= 1e-12 * ma * mb, || {
            format!("multiplicativity: {a} {b} off by {mult:e}")
        });
        let anti = ((a * b).conjugate() - b.conjugate() * a.conjugate()).modulus();
        out.check(anti <= 1e-13 * ma * mb, || {
            format!("anti-homomorphism: {a} {b} off by {anti:e}")
        });
        let (x0, x1, x2, x3) = a.extract_components();
        let got = Quaternion::new(x0, x1, x2, x3);
        let err = (got - a).modulus();
        out.check(err <= 1e-14 + 1e-14 * ma, || {
            format!("extract_components: {a} -> {got}")
        });
    }

    let random_vector = |rng: &mut rand_chacha::ChaCha8Rng| loop {
        let v = uniform_quaternion(rng, 3.0).vector();
        if v.norm() > 1e-3 {
            return v;
        }
    };
    for _ in 0..1_000 {
        let (p, s) = (random_vector(&mut rng), random_vector(&mut rng));
        let plane = bisector_plane(p, s, 1e-7).unwrap();
        for a in [-1.5, -0.5, 0.5, 2.0] {
            for b in [-2.0, -0.25, 0.75, 1.0] {
                let r = plane.residual(plane.point(a, b));
                out.check(r <= 1e-10 * (a.abs() + b.abs()), || {
                    format!("bisector residual {r:e} for {p:?}, {s:?}")
                });
            }
        }
        // rank of V ↦ V p̂ - ŝ V on the basis 1, i, j, k
        let (ph, sh) = (plane.p_hat.to_quaternion(), plane.s_hat.to_quaternion());
        if (ph + sh).modulus() > 1e-6 && (ph - sh).modulus() > 1e-6 {
            let basis = [ONE, I, J, K];
            let m = Matrix4::from_fn(|i, j| (basis[j] * ph - sh * basis[j]).to_array()[i]);
            let rank = m.singular_values().iter().filter(|sv| **sv > 1e-8).count();
            out.check(rank == 2, || format!("rank {rank} for {p:?}, {s:?}"));
        }
    }

    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for _ in 0..1_000 {
        let c = random_coefficients(&mut rng);
        let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
        let jac = jacobian(&c, v);
        for j in 0..4 {
            let (mut plus, mut minus) = (v, v);
            plus[j] += h;
            minus[j] -= h;
            let (fp, fm) = (real_system(&c, plus), real_system(&c, minus));
            for i in 0..4 {
                worst = worst.max(((fp[i] - fm[i]) / (2.0 * h) - jac[i][j]).abs());
            }
        }
    }
    out.check(worst <= 1e-6, || {
        format!("jacobian vs finite differences: {worst:e}")
    });
    out.detail = format!("jacobian max finite-difference error {worst:.2e}");
    out
}

fn symmetry_suite() -> Outcome {
    let mut out = Outcome::new();
    let cfg = SolverConfig::default();
    let mut rng = rng(4242);
    for n in 0..1_000 {
        let c = random_coefficients(&mut rng);
        let base = solve(&c, &cfg).unwrap();
        let scale = c.scale();

        let lambda = rng.gen_range(0.1..10.0) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let scaled = solve(&c.scaled(lambda), &cfg).unwrap();
        out.check(sets_equal(&base, &scaled, 1e-9, scale), || {
            format!("#{n} scaling by {lambda}: {base:?} vs {scaled:?}")
        });

        let conj = solve(&c.conjugated(), &cfg).unwrap();
        out.check(sets_equal(&base, &conj, 1e-9, scale), || {
            format!("#{n} conjugation: {base:?} vs {conj:?}")
        });
    }
    out.detail = "1000 instances".into();
    out
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 6] = [
        ("golden examples", golden_examples),
        ("residual property suite", residual_suite),
        ("oracle cross-validation", oracle_cross_validation),
        ("degeneracy classification", degeneracy_classification),
        ("algebraic identity suite", algebraic_identities),
        ("symmetry suite", symmetry_suite),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = run();
        let status = if outcome.failures.is_empty() {
            "PASS"
        } else {
            "FAIL"
        };
        println!("[{status}] {name}: {}", outcome.detail);
        for f in outcome.failures.iter().take(10) {
            println!("       {f}");
        }
        if outcome.failures.len() > 10 {
            println!("       ... {} more", outcome.failures.len() - 10);
        }
        if !outcome.failures.is_empty() {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
