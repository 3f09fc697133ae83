//! Double-precision quaternion arithmetic.
//!
//! Quaternions are scalar-first `[w, x, y, z]` values with `w` the real part
//! and `(x, y, z)` the coefficients of `i`, `j`, `k`. All operations are pure;
//! component equality (`PartialEq`) is exact, and [`Quaternion::approx_eq`]
//! is the tolerance comparator used by property tests.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// `inverse` refuses anything whose squared modulus is below this floor.
pub const INVERSE_FLOOR: f64 = 1e-300;

/// A real quaternion `w + x i + y j + z k`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// A pure vector quaternion `x i + y j + z k`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vector3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    /// The real quaternion `w`.
    #[inline]
    pub const fn real(w: f64) -> Self {
        Self::new(w, 0.0, 0.0, 0.0)
    }

    #[inline]
    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    #[inline]
    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    /// Builds `scalar + vector`.
    #[inline]
    pub fn from_parts(scalar: f64, vector: Vector3) -> Self {
        Self::new(scalar, vector.x, vector.y, vector.z)
    }

    #[inline]
    pub fn conjugate(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// Euclidean length in R^4.
    #[inline]
    pub fn modulus(self) -> f64 {
        // hypot-style accumulation avoids overflow for huge components
        let m = self
            .w
            .abs()
            .max(self.x.abs())
            .max(self.y.abs())
            .max(self.z.abs());
        if m == 0.0 || !m.is_finite() {
            return m;
        }
        let (w, x, y, z) = (self.w / m, self.x / m, self.y / m, self.z / m);
        m * (w * w + x * x + y * y + z * z).sqrt()
    }

    /// `conjugate(self) / norm_sq(self)`, the two-sided inverse.
    pub fn inverse(self) -> Result<Self> {
        let n = self.norm_sq();
        if !(n >= INVERSE_FLOOR) {
            return Err(Error::ZeroDivisor);
        }
        Ok(self.conjugate() / n)
    }

    #[inline]
    pub fn scalar_part(self) -> f64 {
        self.w
    }

    /// The vector part as a quaternion with zero scalar part.
    #[inline]
    pub fn vector_part(self) -> Self {
        Self::new(0.0, self.x, self.y, self.z)
    }

    #[inline]
    pub fn vector(self) -> Vector3 {
        Vector3::new(self.x, self.y, self.z)
    }

    /// Euclidean scalar product on R^4.
    #[inline]
    pub fn dot4(self, other: Self) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn is_real(self) -> bool {
        self.x == 0.0 && self.y == 0.0 && self.z == 0.0
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Unit quaternion in the direction of `self`, or `None` for zero input.
    pub fn normalized(self) -> Option<Self> {
        let m = self.modulus();
        if m > 0.0 && m.is_finite() {
            Some(self / m)
        } else {
            None
        }
    }

    /// Componentwise comparison with a mixed absolute/relative tolerance.
    pub fn approx_eq(self, other: Self, tol: f64) -> bool {
        let scale = 1.0_f64.max(self.modulus()).max(other.modulus());
        (self - other).modulus() <= tol * scale
    }

    /// Recovers the four real components using only quaternion products:
    ///
    /// ```text
    /// x0 =     (X - iXi - jXj - kXk) / 4
    /// x1 = i (-X + iXi - jXj - kXk) / 4
    /// x2 = j (-X - iXi + jXj - kXk) / 4
    /// x3 = k (-X - iXi - jXj + kXk) / 4
    /// ```
    ///
    /// Each right-hand side evaluates to a real quaternion; its scalar part
    /// is returned.
    pub fn extract_components(self) -> (f64, f64, f64, f64) {
        let (i, j, k) = (Self::I, Self::J, Self::K);
        let ixi = i * self * i;
        let jxj = j * self * j;
        let kxk = k * self * k;
        let x0 = (self - ixi - jxj - kxk) * 0.25;
        let x1 = i * (-self + ixi - jxj - kxk) * 0.25;
        let x2 = j * (-self - ixi + jxj - kxk) * 0.25;
        let x3 = k * (-self - ixi - jxj + kxk) * 0.25;
        (x0.w, x1.w, x2.w, x3.w)
    }
}

impl Vector3 {
    pub const ZERO: Vector3 = Vector3::new(0.0, 0.0, 0.0);

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn to_quaternion(self) -> Quaternion {
        Quaternion::new(0.0, self.x, self.y, self.z)
    }

    #[inline]
    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn cross(self, other: Self) -> Self {
        Self::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.to_quaternion().modulus()
    }

    #[inline]
    pub fn scale(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl From<Vector3> for Quaternion {
    fn from(v: Vector3) -> Self {
        v.to_quaternion()
    }
}

impl From<f64> for Quaternion {
    fn from(w: f64) -> Self {
        Quaternion::real(w)
    }
}

/// Splits the product of two pure vectors as `xy = -<x,y> + x × y`.
///
/// Returns `(-<x,y>, x × y)` after checking the identity against the full
/// quaternion product. Intended for tests; panics if the identity fails.
pub fn vec_mul_identity_check(a: Vector3, b: Vector3) -> (f64, Vector3) {
    let scalar = -a.dot(b);
    let cross = a.cross(b);
    let prod = a.to_quaternion() * b.to_quaternion();
    let expected = Quaternion::from_parts(scalar, cross);
    let scale = a.norm() * b.norm();
    assert!(
        (prod - expected).modulus() <= 1e-14 * scale.max(f64::MIN_POSITIVE),
        "pure vector product {prod:?} does not split as {expected:?}"
    );
    (scalar, cross)
}

impl Mul for Quaternion {
    type Output = Quaternion;

    #[inline]
    fn mul(self, b: Quaternion) -> Quaternion {
        let a = self;
        Quaternion::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;

    #[inline]
    fn mul(self, s: f64) -> Quaternion {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;

    #[inline]
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Div<f64> for Quaternion {
    type Output = Quaternion;

    #[inline]
    fn div(self, s: f64) -> Quaternion {
        Quaternion::new(self.w / s, self.x / s, self.y / s, self.z / s)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;

    #[inline]
    fn add(self, b: Quaternion) -> Quaternion {
        Quaternion::new(self.w + b.w, self.x + b.x, self.y + b.y, self.z + b.z)
    }
}

impl Add<f64> for Quaternion {
    type Output = Quaternion;

    #[inline]
    fn add(self, s: f64) -> Quaternion {
        Quaternion::new(self.w + s, self.x, self.y, self.z)
    }
}

impl Sub<f64> for Quaternion {
    type Output = Quaternion;

    #[inline]
    fn sub(self, s: f64) -> Quaternion {
        Quaternion::new(self.w - s, self.x, self.y, self.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;

    #[inline]
    fn sub(self, b: Quaternion) -> Quaternion {
        Quaternion::new(self.w - b.w, self.x - b.x, self.y - b.y, self.z - b.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;

    #[inline]
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl AddAssign for Quaternion {
    #[inline]
    fn add_assign(&mut self, b: Quaternion) {
        *self = *self + b;
    }
}

impl SubAssign for Quaternion {
    #[inline]
    fn sub_assign(&mut self, b: Quaternion) {
        *self = *self - b;
    }
}

impl Sub for Vector3 {
    type Output = Vector3;

    fn sub(self, o: Vector3) -> Vector3 {
        Vector3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Add for Vector3 {
    type Output = Vector3;

    fn add(self, o: Vector3) -> Vector3 {
        Vector3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:+}i {:+}j {:+}k", self.w, self.x, self.y, self.z)
    }
}

impl Serialize for Quaternion {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_array().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Quaternion {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        <[f64; 4]>::deserialize(deserializer).map(Quaternion::from_array)
    }
}
