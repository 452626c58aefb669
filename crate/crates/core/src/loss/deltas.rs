use crate::error::{Error, Result};
use crate::geometry::{BoxParams, OrientedBox};
use crate::Scalar;

/// Knee of the smooth-L1 loss used when no other value is configured.
pub const SMOOTH_L1_BETA: f64 = 1.0 / 9.0;

/// Box offsets relative to an anchor:
/// `((x - xa)/wa, (y - ya)/ha, ln(w/wa), ln(h/ha), theta - theta_a)`.
///
/// The angle offset is a plain difference; it is never wrapped.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RegressionDelta<T> {
    pub tx: T,
    pub ty: T,
    pub tw: T,
    pub th: T,
    pub ttheta: T,
}

impl<T: Scalar> RegressionDelta<T> {
    pub fn new(tx: T, ty: T, tw: T, th: T, ttheta: T) -> Self {
        Self {
            tx,
            ty,
            tw,
            th,
            ttheta,
        }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn to_array(&self) -> [T; 5] {
        [self.tx, self.ty, self.tw, self.th, self.ttheta]
    }

    pub fn from_array(a: [T; 5]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// Applies the offsets to `anchor` without normalizing the result.
    pub fn apply_raw(&self, anchor: &BoxParams<T>) -> BoxParams<T> {
        BoxParams::new(
            anchor.x + self.tx * anchor.w,
            anchor.y + self.ty * anchor.h,
            anchor.w * self.tw.exp(),
            anchor.h * self.th.exp(),
            anchor.theta + self.ttheta,
        )
    }
}

/// Encodes raw parameters against raw anchor parameters.
pub fn encode_params<T: Scalar>(p: &BoxParams<T>, anchor: &BoxParams<T>) -> RegressionDelta<T> {
    RegressionDelta::new(
        (p.x - anchor.x) / anchor.w,
        (p.y - anchor.y) / anchor.h,
        (p.w / anchor.w).ln(),
        (p.h / anchor.h).ln(),
        p.theta - anchor.theta,
    )
}

pub fn encode_deltas<T: Scalar>(
    b: &OrientedBox<T>,
    anchor: &OrientedBox<T>,
) -> Result<RegressionDelta<T>> {
    if b.convention() != anchor.convention() {
        return Err(Error::ConventionMismatch);
    }
    Ok(encode_params(&b.params(), &anchor.params()))
}

/// Inverse of [`encode_deltas`]; the result is normalized into the anchor's
/// convention, so out-of-range angles are folded back.
pub fn decode_deltas<T: Scalar>(
    d: &RegressionDelta<T>,
    anchor: &OrientedBox<T>,
) -> Result<OrientedBox<T>> {
    if !d.is_finite() {
        return Err(Error::NonFinite("regression delta"));
    }
    d.apply_raw(&anchor.params()).to_box(anchor.convention())
}

#[inline]
fn smooth_l1_term<T: Scalar>(e: T, beta: T) -> T {
    let a = e.abs();
    if a < beta {
        T::lit(0.5) * e * e / beta
    } else {
        a - T::lit(0.5) * beta
    }
}

/// Sum over the five components of the smooth-L1 penalty with knee `beta`.
/// A non-positive `beta` degenerates to plain L1.
pub fn smooth_l1<T: Scalar>(pred: &RegressionDelta<T>, target: &RegressionDelta<T>, beta: T) -> T {
    let beta = beta.max(T::zero());
    pred.to_array()
        .iter()
        .zip(target.to_array())
        .map(|(&p, t)| smooth_l1_term(p - t, beta))
        .sum()
}

/// Gradient of [`smooth_l1`] with respect to `pred` (`sign(e)` on the linear
/// part, 0 at `e = 0`).
pub fn smooth_l1_gradient<T: Scalar>(
    pred: &RegressionDelta<T>,
    target: &RegressionDelta<T>,
    beta: T,
) -> [T; 5] {
    let beta = beta.max(T::zero());
    let (p, t) = (pred.to_array(), target.to_array());
    std::array::from_fn(|i| {
        let e = p[i] - t[i];
        if e.abs() < beta {
            e / beta
        } else if e == T::zero() {
            T::zero()
        } else {
            e.signum()
        }
    })
}
