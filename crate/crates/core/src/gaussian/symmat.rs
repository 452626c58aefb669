use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::Scalar;

/// Symmetric 2x2 matrix `[[a, b], [b, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymMat2<T> {
    pub a: T,
    pub b: T,
    pub d: T,
}

impl<T: Scalar> SymMat2<T> {
    pub fn new(a: T, b: T, d: T) -> Self {
        Self { a, b, d }
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::one())
    }

    pub fn diag(a: T, d: T) -> Self {
        Self::new(a, T::zero(), d)
    }

    /// Symmetric part of a general row-major 2x2 matrix.
    pub fn from_rows(m: [[T; 2]; 2]) -> Self {
        Self::new(m[0][0], (m[0][1] + m[1][0]) * T::lit(0.5), m[1][1])
    }

    pub fn to_rows(&self) -> [[T; 2]; 2] {
        [[self.a, self.b], [self.b, self.d]]
    }

    pub fn trace(&self) -> T {
        self.a + self.d
    }

    pub fn det(&self) -> T {
        self.a * self.d - self.b * self.b
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.d.is_finite()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.trace() > T::zero() && self.det() > T::zero()
    }

    pub fn scale(&self, k: T) -> Self {
        Self::new(self.a * k, self.b * k, self.d * k)
    }

    /// `self * self`.
    pub fn square(&self) -> Self {
        Self::new(
            self.a * self.a + self.b * self.b,
            self.b * (self.a + self.d),
            self.b * self.b + self.d * self.d,
        )
    }

    /// `tr(self * other)`, the Frobenius inner product.
    pub fn frob_dot(&self, other: &Self) -> T {
        self.a * other.a + T::lit(2.0) * self.b * other.b + self.d * other.d
    }

    pub fn frobenius_sq(&self) -> T {
        self.frob_dot(self)
    }

    pub fn frobenius(&self) -> T {
        self.frobenius_sq().sqrt()
    }

    /// General product `self * other`, row-major.
    pub fn mul_mat(&self, other: &Self) -> [[T; 2]; 2] {
        [
            [
                self.a * other.a + self.b * other.b,
                self.a * other.b + self.b * other.d,
            ],
            [
                self.b * other.a + self.d * other.b,
                self.b * other.b + self.d * other.d,
            ],
        ]
    }

    /// `self * inner * self`, symmetric by construction.
    pub fn congruence(&self, inner: &Self) -> Self {
        let m = self.mul_mat(inner);
        let (a, b, d) = (self.a, self.b, self.d);
        Self::new(
            m[0][0] * a + m[0][1] * b,
            (m[0][0] * b + m[0][1] * d + m[1][0] * a + m[1][1] * b) * T::lit(0.5),
            m[1][0] * b + m[1][1] * d,
        )
    }

    /// `||self * other - other * self||_F^2`.
    ///
    /// The commutator of two symmetric matrices is antisymmetric with a single
    /// free entry, so the norm is `2 c^2`.
    pub fn commutator_norm_sq(&self, other: &Self) -> T {
        let c = other.b * (self.a - self.d) - self.b * (other.a - other.d);
        T::lit(2.0) * c * c
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det == T::zero() || !det.is_finite() {
            return None;
        }
        Some(Self::new(self.d / det, -self.b / det, self.a / det))
    }
}

impl<T: Scalar> Add for SymMat2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.a + rhs.a, self.b + rhs.b, self.d + rhs.d)
    }
}

impl<T: Scalar> Sub for SymMat2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.a - rhs.a, self.b - rhs.b, self.d - rhs.d)
    }
}

impl<T: Scalar> Mul<T> for SymMat2<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        self.scale(k)
    }
}

/// Principal square root of a symmetric positive-definite 2x2 matrix.
///
/// Uses `sqrt(M) = (M + sqrt(det M) I) / sqrt(tr M + 2 sqrt(det M))`, which is
/// smooth everywhere on the SPD cone, including at repeated eigenvalues.
pub fn sqrtm_spd2<T: Scalar>(m: &SymMat2<T>) -> Result<SymMat2<T>> {
    let (trace, det) = (m.trace(), m.det());
    if !(trace > T::zero() && det > T::zero()) || !m.is_finite() {
        return Err(Error::NotSpd {
            trace: trace.to_f64_lossy(),
            det: det.to_f64_lossy(),
        });
    }
    Ok(sqrtm_with_det_root(m, det.sqrt()))
}

/// Same closed form with `sqrt(det M)` supplied by the caller, for products
/// whose determinant is known exactly from their factors.
pub(crate) fn sqrtm_with_det_root<T: Scalar>(m: &SymMat2<T>, det_root: T) -> SymMat2<T> {
    let t = (m.trace() + T::lit(2.0) * det_root).sqrt();
    SymMat2::new((m.a + det_root) / t, m.b / t, (m.d + det_root) / t)
}
