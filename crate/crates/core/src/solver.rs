//! Closed-form solution of `X P X* + X Q + R X* = S`.
//!
//! For real `P = p0` the translation `Y = X + (Q* + R)/2p0` turns the equation
//! into a 3-sphere `|Y|² = ρ` cut by the affine set `vect(Y (Q - R*)) = s̃`.
//! For non-real `P` the translation `Z = X + (R - Q*)(P - P*)⁻¹` turns it into
//! the circle `Z p Z* = s̃` cut by the hyperplane `<Z, R̃> = const`.
//!
//! Every exact equality the case analysis depends on is decided with the
//! relative tolerance [`SolverConfig::eps_class`], scaled by the magnitude
//! of the terms that make up the quantity being tested and never by less
//! than `max(1, |P|, |Q|, |R|, |S|)`.

use rand::Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{
    intersect_circle_hyperplane, solution_circle, CircleHyperplane, CircleOrOrigin, Hyperplane,
    SolutionCircle,
};
use crate::quaternion::Quaternion;

pub const DEFAULT_EPS_CLASS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Relative tolerance for every exact-equality test of the case analysis.
    pub eps_class: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            eps_class: DEFAULT_EPS_CLASS,
        }
    }
}

impl SolverConfig {
    pub fn new(eps_class: f64) -> Self {
        Self { eps_class }
    }
}

/// The coefficients `(P, Q, R, S)`, with `P ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquationCoefficients {
    pub p: Quaternion,
    pub q: Quaternion,
    pub r: Quaternion,
    pub s: Quaternion,
}

impl EquationCoefficients {
    pub fn new(p: Quaternion, q: Quaternion, r: Quaternion, s: Quaternion) -> Result<Self> {
        let c = Self { p, q, r, s };
        c.validate()?;
        Ok(c)
    }

    pub fn from_arrays(p: [f64; 4], q: [f64; 4], r: [f64; 4], s: [f64; 4]) -> Result<Self> {
        Self::new(
            Quaternion::from_array(p),
            Quaternion::from_array(q),
            Quaternion::from_array(r),
            Quaternion::from_array(s),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.p, self.q, self.r, self.s]
            .iter()
            .all(|c| c.is_finite())
        {
            return Err(Error::InvalidCoefficients("non-finite component".into()));
        }
        if self.p.modulus() == 0.0 {
            return Err(Error::InvalidCoefficients("P must be non-zero".into()));
        }
        Ok(())
    }

    /// `max(1, |P|, |Q|, |R|, |S|)`.
    pub fn scale(&self) -> f64 {
        [self.p, self.q, self.r, self.s]
            .iter()
            .fold(1.0_f64, |m, c| m.max(c.modulus()))
    }

    /// Left-hand side minus right-hand side at `x`.
    #[inline]
    pub fn defect(&self, x: Quaternion) -> Quaternion {
        let xc = x.conjugate();
        x * self.p * xc + x * self.q + self.r * xc - self.s
    }

    /// `|X P X* + X Q + R X* - S|`.
    #[inline]
    pub fn residual(&self, x: Quaternion) -> f64 {
        self.defect(x).modulus()
    }

    /// Tolerance scale for a candidate `x`: `scale · max(1, |x|²)`.
    pub fn residual_scale(&self, x: Quaternion) -> f64 {
        self.scale() * x.norm_sq().max(1.0)
    }

    /// Coefficients multiplied by the real number `lambda`.
    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            p: self.p * lambda,
            q: self.q * lambda,
            r: self.r * lambda,
            s: self.s * lambda,
        }
    }

    /// The termwise conjugated equation `X P* X* + X R* + Q* X* = S*`,
    /// which has the same solutions.
    pub fn conjugated(&self) -> Self {
        Self {
            p: self.p.conjugate(),
            q: self.r.conjugate(),
            r: self.q.conjugate(),
            s: self.s.conjugate(),
        }
    }
}

/// `|X P X* + X Q + R X* - S|`.
pub fn residual(c: &EquationCoefficients, x: Quaternion) -> f64 {
    c.residual(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Real,
    Nonreal,
}

/// Real branch iff `|vect(P)| <= eps |P|`.
pub fn classify_p(c: &EquationCoefficients, eps: f64) -> Result<Branch> {
    let p_norm = c.p.modulus();
    if !(p_norm > 0.0) {
        return Err(Error::InvalidCoefficients("P must be non-zero".into()));
    }
    if c.p.vector_part().modulus() <= eps * p_norm {
        Ok(Branch::Real)
    } else {
        Ok(Branch::Nonreal)
    }
}

/// The solution set of the equation.
#[derive(Debug, Clone, PartialEq)]
pub enum SolutionSet {
    Empty,
    Point(Quaternion),
    TwoPoints(Quaternion, Quaternion),
    Circle(SolutionCircle),
    ThreeSphere { center: Quaternion, radius: f64 },
}

impl SolutionSet {
    pub fn kind(&self) -> &'static str {
        match self {
            SolutionSet::Empty => "empty",
            SolutionSet::Point(_) => "point",
            SolutionSet::TwoPoints(..) => "two_points",
            SolutionSet::Circle(_) => "circle",
            SolutionSet::ThreeSphere { .. } => "three_sphere",
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(
            self,
            SolutionSet::Empty | SolutionSet::Point(_) | SolutionSet::TwoPoints(..)
        )
    }

    /// Members of a finite set; empty for circles and spheres.
    pub fn points(&self) -> Vec<Quaternion> {
        match *self {
            SolutionSet::Point(x) => vec![x],
            SolutionSet::TwoPoints(a, b) => vec![a, b],
            _ => Vec::new(),
        }
    }

    /// Euclidean distance from `x` to the set (`inf` for the empty set).
    pub fn distance(&self, x: Quaternion) -> f64 {
        match self {
            SolutionSet::Empty => f64::INFINITY,
            SolutionSet::Point(a) => (x - *a).modulus(),
            SolutionSet::TwoPoints(a, b) => (x - *a).modulus().min((x - *b).modulus()),
            SolutionSet::Circle(c) => c.distance(x),
            SolutionSet::ThreeSphere { center, radius } => ((x - *center).modulus() - radius).abs(),
        }
    }

    /// Up to `n` members: finite sets verbatim, circles at equispaced angles,
    /// spheres along uniformly distributed directions drawn from `rng`.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<Quaternion> {
        match self {
            SolutionSet::Circle(c) => (0..n)
                .map(|k| c.point(std::f64::consts::TAU * k as f64 / n as f64))
                .collect(),
            SolutionSet::ThreeSphere { center, radius } => (0..n)
                .map(|_| *center + random_unit(rng) * *radius)
                .collect(),
            _ => self.points(),
        }
    }

    /// Same members with `offset` added.
    pub fn translated(self, offset: Quaternion) -> Self {
        match self {
            SolutionSet::Empty => SolutionSet::Empty,
            SolutionSet::Point(x) => SolutionSet::Point(x + offset),
            SolutionSet::TwoPoints(a, b) => SolutionSet::TwoPoints(a + offset, b + offset),
            SolutionSet::Circle(c) => SolutionSet::Circle(c.translated(offset)),
            SolutionSet::ThreeSphere { center, radius } => SolutionSet::ThreeSphere {
                center: center + offset,
                radius,
            },
        }
    }
}

/// Uniform direction on the unit 3-sphere (normalised Gaussian 4-vector).
pub(crate) fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    loop {
        let mut g = [0.0; 4];
        for v in g.iter_mut() {
            // Box-Muller
            let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
            let u2: f64 = rng.gen();
            *v = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
        }
        if let Some(u) = Quaternion::from_array(g).normalized() {
            return u;
        }
    }
}

impl Serialize for SolutionSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SolutionSet::Circle(c) => {
                let mut st = serializer.serialize_struct("SolutionSet", 4)?;
                st.serialize_field("kind", self.kind())?;
                st.serialize_field("center", &c.center)?;
                st.serialize_field("radius", &c.radius)?;
                st.serialize_field("frame", &[c.plane.e1, c.plane.e2])?;
                st.end()
            }
            SolutionSet::ThreeSphere { center, radius } => {
                let mut st = serializer.serialize_struct("SolutionSet", 3)?;
                st.serialize_field("kind", self.kind())?;
                st.serialize_field("center", center)?;
                st.serialize_field("radius", radius)?;
                st.end()
            }
            _ => {
                let mut st = serializer.serialize_struct("SolutionSet", 2)?;
                st.serialize_field("kind", self.kind())?;
                st.serialize_field("members", &self.points())?;
                st.end()
            }
        }
    }
}

/// The translated system for real `P = p0`:
/// `p0 |Y|² + Y Q̃ - Q̃* Y* = S̃` with `Y = X + shift`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedRealForm {
    pub p0: f64,
    pub q_tilde: Quaternion,
    pub s_tilde: Quaternion,
    pub rho: f64,
    pub shift: Quaternion,
    /// `ρ |Q - R*|² - |s̃|²`; `None` when `|Q - R*|` is within the default
    /// class tolerance of zero.
    pub delta: Option<f64>,
    // magnitudes used by the zero tests
    s0_mag: f64,
    s_vec_mag: f64,
}

impl ReducedRealForm {
    /// `Q - R* = 2 Q̃`.
    #[inline]
    pub fn q_minus_r_conj(&self) -> Quaternion {
        self.q_tilde * 2.0
    }

    /// Residual of the translated equation at `y`.
    pub fn residual(&self, y: Quaternion) -> f64 {
        let lhs = Quaternion::real(self.p0 * y.norm_sq()) + y * self.q_tilde
            - self.q_tilde.conjugate() * y.conjugate();
        (lhs - self.s_tilde).modulus()
    }
}

/// Translation and constants of the real-`P` reduction. Uses only the scalar
/// part of `P`.
pub fn reduce_real(c: &EquationCoefficients) -> Result<ReducedRealForm> {
    let p0 = c.p.w;
    if p0 == 0.0 {
        return Err(Error::InvalidCoefficients(
            "scalar part of P must be non-zero in the real branch".into(),
        ));
    }
    let qc_plus_r = c.q.conjugate() + c.r;
    let diff = c.q - c.r.conjugate();
    let rq = c.r * c.q;
    let shift = qc_plus_r / (2.0 * p0);
    let quad = qc_plus_r.norm_sq() / (4.0 * p0);
    // S̃ = S + |Q*+R|²/4p0 + (RQ - Q*R*)/2p0
    let s_tilde = c.s + quad + (rq - c.q.conjugate() * c.r.conjugate()) / (2.0 * p0);
    let rho = s_tilde.w / p0;
    let scale = c.scale();
    let delta = if diff.modulus() > DEFAULT_EPS_CLASS * scale {
        Some(rho * diff.norm_sq() - s_tilde.vector_part().norm_sq())
    } else {
        None
    };
    Ok(ReducedRealForm {
        p0,
        q_tilde: diff * 0.5,
        s_tilde,
        rho,
        shift,
        delta,
        s0_mag: scale.max(c.s.w.abs() + quad.abs()),
        s_vec_mag: scale.max(c.s.vector_part().modulus() + rq.modulus() / p0.abs()),
    })
}

/// Case analysis for real `P`.
pub fn solve_real_p(c: &EquationCoefficients, cfg: &SolverConfig) -> Result<SolutionSet> {
    c.validate()?;
    let red = reduce_real(c)?;
    let eps = cfg.eps_class;
    let s_vec = red.s_tilde.vector_part();
    let s_vec_zero = s_vec.modulus() <= eps * red.s_vec_mag;
    let back = -red.shift;

    if red.s_tilde.w.abs() <= eps * red.s0_mag {
        // ρ = 0: only Y = 0, which needs s̃ = 0
        return Ok(if s_vec_zero {
            SolutionSet::Point(back)
        } else {
            SolutionSet::Empty
        });
    }
    if red.rho < 0.0 {
        return Ok(SolutionSet::Empty);
    }
    let diff = red.q_minus_r_conj();
    if diff.modulus() <= eps * c.scale() {
        return Ok(if s_vec_zero {
            SolutionSet::ThreeSphere {
                center: back,
                radius: red.rho.sqrt(),
            }
        } else {
            SolutionSet::Empty
        });
    }
    // Y (Q - R*) = ξ + s̃ with ξ² = Δ
    let s_sq = s_vec.norm_sq();
    let diff_sq = diff.norm_sq();
    let delta = red.rho * diff_sq - s_sq;
    let diff_inv = diff.inverse()?;
    if delta.abs() <= eps * (red.rho * diff_sq + s_sq) {
        return Ok(SolutionSet::Point(s_vec * diff_inv + back));
    }
    if delta < 0.0 {
        return Ok(SolutionSet::Empty);
    }
    let root = delta.sqrt();
    let plus = (s_vec + root) * diff_inv + back;
    let minus = (s_vec - root) * diff_inv + back;
    Ok(SolutionSet::TwoPoints(plus, minus))
}

/// The translated system for non-real `P`:
/// `Z P Z* + Z R̃* + R̃ Z* = S̃` with `Z = X + shift`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedNonrealForm {
    pub p: Quaternion,
    pub r_tilde: Quaternion,
    pub s_tilde: Quaternion,
    pub shift: Quaternion,
    /// `(s̃0 |p| - p0 |s̃|) / 2|p|`.
    pub hyperplane_offset: f64,
    s_mag: f64,
    r_mag: f64,
}

impl ReducedNonrealForm {
    pub fn residual(&self, z: Quaternion) -> f64 {
        let zc = z.conjugate();
        let lhs = z * self.p * zc + z * self.r_tilde.conjugate() + self.r_tilde * zc;
        (lhs - self.s_tilde).modulus()
    }

    pub fn hyperplane(&self) -> Hyperplane {
        Hyperplane {
            normal: self.r_tilde,
            offset: self.hyperplane_offset,
        }
    }
}

/// Translation and constants of the non-real-`P` reduction.
pub fn reduce_nonreal(c: &EquationCoefficients) -> Result<ReducedNonrealForm> {
    let (p, q, r, s) = (c.p, c.q, c.r, c.s);
    let pc = p.conjugate();
    let qc = q.conjugate();
    let rc = r.conjugate();
    let d = p - pc;
    let d_inv = d.inverse().map_err(|_| {
        Error::InvalidCoefficients(
            "vector part of P must be non-zero in the non-real branch".into(),
        )
    })?;
    let d_sq = d.norm_sq();

    let r_tilde = (qc * p - r * pc) * d_inv;
    let shift = (r - qc) * d_inv;
    let s_tilde = s + (qc * p * rc + r * pc * q) / d_sq + r * (pc - p) * q / d_sq
        - qc * pc * q / d_sq
        - r * pc * rc / d_sq;

    let p_vec_norm = p.vector_part().modulus();
    let s_vec_norm = s_tilde.vector_part().modulus();
    let hyperplane_offset = (s_tilde.w * p_vec_norm - p.w * s_vec_norm) / (2.0 * p_vec_norm);

    let (pn, qn, rn) = (p.modulus(), q.modulus(), r.modulus());
    let d_norm = d_sq.sqrt();
    let scale = c.scale();
    let s_mag =
        s.modulus() + (2.0 * qn * pn * rn + rn * d_norm * qn + qn * qn * pn + rn * rn * pn) / d_sq;
    Ok(ReducedNonrealForm {
        p,
        r_tilde,
        s_tilde,
        shift,
        hyperplane_offset,
        s_mag: scale.max(s_mag),
        r_mag: scale.max((qn + rn) * pn / d_norm),
    })
}

/// Case analysis for non-real `P`.
pub fn solve_nonreal_p(c: &EquationCoefficients, cfg: &SolverConfig) -> Result<SolutionSet> {
    c.validate()?;
    let red = reduce_nonreal(c)?;
    let eps = cfg.eps_class;
    let back = -red.shift;
    let s_vec = red.s_tilde.vector();

    if red.s_tilde.modulus() <= eps * red.s_mag {
        return Ok(SolutionSet::Point(back));
    }
    if s_vec.norm() <= eps * red.s_mag {
        return Ok(SolutionSet::Empty);
    }
    let circle = match solution_circle(c.p.vector(), s_vec, 0.0)? {
        CircleOrOrigin::Circle(circle) => circle,
        CircleOrOrigin::Origin => unreachable!("s̃ is non-zero here"),
    };
    let (n1, n2) = circle.plane.coordinates(red.r_tilde);
    let perp_tol = eps * red.r_mag;
    if n1.abs() <= perp_tol && n2.abs() <= perp_tol {
        // the whole plane is parallel to the hyperplane; it contains the
        // circle iff it passes through the origin
        let p_vec_norm = c.p.vector_part().modulus();
        let offset_mag = red.s_mag.max(c.p.w.abs() * s_vec.norm() / p_vec_norm);
        return Ok(if red.hyperplane_offset.abs() <= eps * offset_mag {
            SolutionSet::Circle(circle.translated(back))
        } else {
            SolutionSet::Empty
        });
    }
    let found = intersect_circle_hyperplane(&circle, &red.hyperplane(), eps);
    Ok(match found {
        CircleHyperplane::Contained => SolutionSet::Circle(circle.translated(back)),
        CircleHyperplane::Points(pts) => match pts.as_slice() {
            [] => SolutionSet::Empty,
            [z] => SolutionSet::Point(*z + back),
            [a, b, ..] => SolutionSet::TwoPoints(*a + back, *b + back),
        },
    })
}

/// Full solution set, dispatching on whether `P` is real.
pub fn solve(c: &EquationCoefficients, cfg: &SolverConfig) -> Result<SolutionSet> {
    c.validate()?;
    match classify_p(c, cfg.eps_class)? {
        Branch::Real => solve_real_p(c, cfg),
        Branch::Nonreal => solve_nonreal_p(c, cfg),
    }
}
