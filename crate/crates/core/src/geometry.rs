//! Four-dimensional geometry behind the solution sets: the bisector 2-plane
//! of two pure vectors, the circle solving `X p X* = s`, and the
//! sphere/line and circle/hyperplane intersections.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::quaternion::{Quaternion, Vector3};

/// Below this value of `|p̂ + ŝ|` the bisector plane is built from the
/// orthogonal complement of `p̂` instead of from `(p̂ + ŝ)/|p̂ + ŝ|`.
pub const ANTIPODAL_TOL: f64 = 1e-7;

/// Relative width of the band in which a quadratic discriminant counts as zero.
pub const TANGENCY_TOL: f64 = 1e-10;

/// The 2-plane of quaternions `V` with `V p̂ - ŝ V = 0`, carried as an
/// orthonormal frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectorPlane {
    pub e1: Quaternion,
    pub e2: Quaternion,
    pub p_hat: Vector3,
    pub s_hat: Vector3,
}

impl BisectorPlane {
    /// `a e1 + b e2`.
    #[inline]
    pub fn point(&self, a: f64, b: f64) -> Quaternion {
        self.e1 * a + self.e2 * b
    }

    /// Orthogonal projection of `v` onto the plane.
    ///
    /// The operator `V ↦ -ŝ V p̂` is a symmetric involution whose +1
    /// eigenspace is the plane, so `(V - ŝ V p̂) / 2` is the projector.
    pub fn project(&self, v: Quaternion) -> Quaternion {
        project_bisector(self.p_hat, self.s_hat, v)
    }

    /// Norm of `V p̂ - ŝ V`.
    pub fn residual(&self, v: Quaternion) -> f64 {
        bisector_residual(self.p_hat, self.s_hat, v)
    }

    /// Chart coordinates `(<v,e1>, <v,e2>)`.
    #[inline]
    pub fn coordinates(&self, v: Quaternion) -> (f64, f64) {
        (v.dot4(self.e1), v.dot4(self.e2))
    }
}

/// A circle `center + radius (e1 cos φ + e2 sin φ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionCircle {
    pub plane: BisectorPlane,
    pub radius: f64,
    pub center: Quaternion,
}

impl SolutionCircle {
    pub fn translated(self, offset: Quaternion) -> Self {
        Self {
            center: self.center + offset,
            ..self
        }
    }

    #[inline]
    pub fn point(&self, phi: f64) -> Quaternion {
        circle_point(self, phi)
    }

    /// Euclidean distance from `x` to the circle, computed through the chart.
    pub fn distance(&self, x: Quaternion) -> f64 {
        let d = x - self.center;
        let (a, b) = self.plane.coordinates(d);
        let off_plane = d - self.plane.point(a, b);
        let radial = a.hypot(b) - self.radius;
        off_plane.modulus().hypot(radial)
    }
}

/// Result of [`solution_circle`]: either a genuine circle or the origin
/// alone when `s` vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CircleOrOrigin {
    Circle(SolutionCircle),
    Origin,
}

/// The affine line `ξ ↦ point + ξ direction`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineLine {
    pub point: Quaternion,
    pub direction: Quaternion,
}

impl AffineLine {
    pub fn new(point: Quaternion, direction: Quaternion) -> Result<Self> {
        if !(direction.modulus() > 0.0) {
            return Err(Error::DegenerateDirection);
        }
        Ok(Self { point, direction })
    }

    #[inline]
    pub fn at(&self, xi: f64) -> Quaternion {
        self.point + self.direction * xi
    }
}

/// The hyperplane `{Z : <Z, normal> = offset}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperplane {
    pub normal: Quaternion,
    pub offset: f64,
}

impl Hyperplane {
    #[inline]
    pub fn signed_residual(&self, z: Quaternion) -> f64 {
        z.dot4(self.normal) - self.offset
    }
}

/// Outcome of intersecting a circle with a hyperplane.
#[derive(Debug, Clone, PartialEq)]
pub enum CircleHyperplane {
    /// The whole circle lies in the hyperplane.
    Contained,
    /// Zero, one or two points, in descending chart parameter.
    Points(Vec<Quaternion>),
}

fn project_bisector(p_hat: Vector3, s_hat: Vector3, v: Quaternion) -> Quaternion {
    let (p, s) = (p_hat.to_quaternion(), s_hat.to_quaternion());
    (v - s * v * p) * 0.5
}

fn bisector_residual(p_hat: Vector3, s_hat: Vector3, v: Quaternion) -> f64 {
    (v * p_hat.to_quaternion() - s_hat.to_quaternion() * v).modulus()
}

fn unit(v: Vector3) -> Result<Vector3> {
    let n = v.norm();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(v.scale(1.0 / n))
}

/// Orthonormal pair spanning the complement of the unit vector `n` in R^3.
fn complement_basis(n: Vector3) -> (Vector3, Vector3) {
    let ax = [n.x.abs(), n.y.abs(), n.z.abs()];
    let axis = if ax[0] <= ax[1] && ax[0] <= ax[2] {
        Vector3::new(1.0, 0.0, 0.0)
    } else if ax[1] <= ax[2] {
        Vector3::new(0.0, 1.0, 0.0)
    } else {
        Vector3::new(0.0, 0.0, 1.0)
    };
    let a = axis - n.scale(axis.dot(n));
    let a = a.scale(1.0 / a.norm());
    let b = n.cross(a);
    (a, b.scale(1.0 / b.norm()))
}

fn gram_schmidt(e1: Quaternion, v: Quaternion) -> Quaternion {
    let w = v - e1 * v.dot4(e1);
    w / w.modulus()
}

/// The bisector plane of the nonzero pure vectors `p` and `s`.
///
/// For `|p̂ + ŝ| > tol` the frame is `u = (p̂+ŝ)/|p̂+ŝ|` and `u p̂`
/// (projected back onto the plane and re-orthogonalised). Otherwise it is the orthogonal complement of `p̂` in
/// the pure vectors, projected onto the exact solution space of
/// `V p̂ = ŝ V` so that nearly antipodal inputs still get an accurate frame.
pub fn bisector_plane(p: Vector3, s: Vector3, tol: f64) -> Result<BisectorPlane> {
    let p_hat = unit(p)?;
    let s_hat = unit(s)?;
    let sum = p_hat + s_hat;
    let sum_norm = sum.norm();
    let (e1, e2) = if sum_norm > tol {
        // u p̂ - ŝ u = |ŝ|² - |p̂|² only vanishes to rounding, which is
        // amplified by 1/|p̂ + ŝ|; one projection removes it
        let u = sum.scale(1.0 / sum_norm).to_quaternion();
        let u = project_bisector(p_hat, s_hat, u);
        let e1 = u / u.modulus();
        let w = project_bisector(p_hat, s_hat, e1 * p_hat.to_quaternion());
        (e1, gram_schmidt(e1, w))
    } else {
        let (a, b) = complement_basis(p_hat);
        let a = project_bisector(p_hat, s_hat, a.to_quaternion());
        let e1 = a / a.modulus();
        let b = project_bisector(p_hat, s_hat, b.to_quaternion());
        (e1, gram_schmidt(e1, b))
    };
    Ok(BisectorPlane {
        e1,
        e2,
        p_hat,
        s_hat,
    })
}

/// The solution set of `X p X* = s`: a circle of radius `sqrt(|s|/|p|)` about
/// the origin in the bisector plane, or the origin alone when
/// `|s| <= tol |p|`.
pub fn solution_circle(p: Vector3, s: Vector3, tol: f64) -> Result<CircleOrOrigin> {
    let p_norm = p.norm();
    if !(p_norm > 0.0) {
        return Err(Error::ZeroVector);
    }
    let s_norm = s.norm();
    if s_norm <= tol * p_norm {
        return Ok(CircleOrOrigin::Origin);
    }
    let plane = bisector_plane(p, s, ANTIPODAL_TOL)?;
    Ok(CircleOrOrigin::Circle(SolutionCircle {
        plane,
        radius: (s_norm / p_norm).sqrt(),
        center: Quaternion::ZERO,
    }))
}

#[inline]
pub fn circle_point(c: &SolutionCircle, phi: f64) -> Quaternion {
    let (sin, cos) = phi.sin_cos();
    c.center + (c.plane.e1 * cos + c.plane.e2 * sin) * c.radius
}

/// Real roots of `a ξ² + 2 b ξ + c = 0` (`a > 0`), largest first.
///
/// A discriminant within `tol · scale` of zero yields the double root.
fn half_quadratic_roots(a: f64, b: f64, c: f64, scale: f64, tol: f64) -> Vec<f64> {
    let disc = b * b - a * c;
    if disc.abs() <= tol * scale {
        return vec![-b / a];
    }
    if disc < 0.0 {
        return Vec::new();
    }
    let root = disc.sqrt();
    let q = -(b + b.signum() * root);
    let (r1, r2) = (q / a, c / q);
    if r1 >= r2 {
        vec![r1, r2]
    } else {
        vec![r2, r1]
    }
}

/// Points of `line` on the 3-sphere `|Y|² = rho`, with the default
/// tangency band.
pub fn intersect_sphere_line(rho: f64, line: &AffineLine) -> Result<Vec<Quaternion>> {
    intersect_sphere_line_with_tol(rho, line, TANGENCY_TOL)
}

/// Solves `|B + ξ A|² = rho` for real `ξ` and returns `B + ξ A`, larger `ξ`
/// first.
pub fn intersect_sphere_line_with_tol(
    rho: f64,
    line: &AffineLine,
    tol: f64,
) -> Result<Vec<Quaternion>> {
    let a = line.direction.norm_sq();
    if !(a > 0.0) {
        return Err(Error::DegenerateDirection);
    }
    if rho < 0.0 {
        return Ok(Vec::new());
    }
    let b = line.direction.dot4(line.point);
    let b_sq = line.point.norm_sq();
    let c = b_sq - rho;
    let scale = b * b + a * (b_sq + rho.abs());
    Ok(half_quadratic_roots(a, b, c, scale, tol)
        .into_iter()
        .map(|xi| line.at(xi))
        .collect())
}

/// Intersects `c` with the hyperplane `h` in the chart
/// `Z = center + a e1 + b e2`.
///
/// When both `<e1, n>` and `<e2, n>` are within `tol |n|` of zero the plane
/// of the circle is parallel to the hyperplane, and the answer is
/// `Contained` or empty depending on the center. Otherwise the hyperplane
/// cuts the chart in a line that meets the circle in 0, 1 or 2 points.
pub fn intersect_circle_hyperplane(
    c: &SolutionCircle,
    h: &Hyperplane,
    tol: f64,
) -> CircleHyperplane {
    let n_norm = h.normal.modulus();
    let (n1, n2) = c.plane.coordinates(h.normal);
    let rhs = -h.signed_residual(c.center);
    if n1.abs() <= tol * n_norm && n2.abs() <= tol * n_norm {
        let slack = tol * n_norm.max(f64::MIN_POSITIVE) * (c.center.modulus() + c.radius).max(1.0);
        return if rhs.abs() <= slack {
            CircleHyperplane::Contained
        } else {
            CircleHyperplane::Points(Vec::new())
        };
    }
    // a n1 + b n2 = rhs, parameterised as foot + ξ (-n2, n1)/m
    let m_sq = n1 * n1 + n2 * n2;
    let m = m_sq.sqrt();
    let foot = (rhs * n1 / m_sq, rhs * n2 / m_sq);
    let dir = (-n2 / m, n1 / m);
    let r_sq = c.radius * c.radius;
    let foot_sq = rhs * rhs / m_sq;
    // ξ² + 2·0·ξ + (|foot|² - r²) = 0
    let roots = half_quadratic_roots(1.0, 0.0, foot_sq - r_sq, r_sq + foot_sq, tol);
    CircleHyperplane::Points(
        roots
            .into_iter()
            .map(|xi| {
                let (a, b) = (foot.0 + xi * dir.0, foot.1 + xi * dir.1);
                c.center + c.plane.point(a, b)
            })
            .collect(),
    )
}

impl Serialize for SolutionCircle {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("SolutionCircle", 3)?;
        st.serialize_field("center", &self.center)?;
        st.serialize_field("radius", &self.radius)?;
        st.serialize_field("frame", &[self.plane.e1, self.plane.e2])?;
        st.end()
    }
}
