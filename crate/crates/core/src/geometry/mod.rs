//! Oriented boxes in two angle conventions, with exact rotated IoU.

mod iou;
mod literal;
mod polygon;

pub use iou::{monte_carlo_iou, monte_carlo_iou_estimate, rotated_iou, McEstimate};
pub use literal::{format_box_literal, format_number, parse_box_file, parse_box_literal};
pub use polygon::{clip_convex, ConvexPolygon, Point2};

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::Scalar;

/// Angle parameterization of an oriented box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Convention {
    /// `theta` in `[-pi/2, 0)`, measured from the x-axis to the `w` edge.
    #[default]
    OpenCv,
    /// `theta` in `[-pi/2, pi/2)`, measured to the long edge; `w >= h`.
    LongEdge,
}

impl Convention {
    pub fn other(self) -> Self {
        match self {
            Convention::OpenCv => Convention::LongEdge,
            Convention::LongEdge => Convention::OpenCv,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Convention::OpenCv => "oc",
            Convention::LongEdge => "le",
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "oc" | "opencv" => Ok(Convention::OpenCv),
            "le" | "long_edge" | "longedge" => Ok(Convention::LongEdge),
            other => Err(Error::BoxLiteral {
                literal: other.to_string(),
                reason: "convention must be `oc` or `le`".into(),
            }),
        }
    }
}

/// Raw five-parameter box `(x, y, w, h, theta)` with no range constraints.
///
/// This is what a regressor outputs before any normalization: extents may be in
/// either order and the angle may be anywhere on the real line. Gaussian
/// conversion and delta encoding accept it directly; [`BoxParams::to_box`]
/// normalizes it into a convention.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoxParams<T> {
    pub x: T,
    pub y: T,
    pub w: T,
    pub h: T,
    pub theta: T,
}

impl<T: Scalar> BoxParams<T> {
    pub fn new(x: T, y: T, w: T, h: T, theta: T) -> Self {
        Self { x, y, w, h, theta }
    }

    pub fn to_box(&self, convention: Convention) -> Result<OrientedBox<T>> {
        make_box(self.x, self.y, self.w, self.h, self.theta, convention)
    }

    pub fn to_array(&self) -> [T; 5] {
        [self.x, self.y, self.w, self.h, self.theta]
    }

    pub fn from_array(p: [T; 5]) -> Self {
        Self::new(p[0], p[1], p[2], p[3], p[4])
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// A rotated rectangle normalized into one of the two angle conventions.
///
/// Constructed only through [`make_box`] (or conversions built on it), so
/// `w > 0`, `h > 0`, the angle lies in the convention's range, and long-edge
/// boxes have `w >= h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedBox<T> {
    x: T,
    y: T,
    w: T,
    h: T,
    theta: T,
    convention: Convention,
}

impl<T: Scalar> OrientedBox<T> {
    pub fn x(&self) -> T {
        self.x
    }
    pub fn y(&self) -> T {
        self.y
    }
    pub fn w(&self) -> T {
        self.w
    }
    pub fn h(&self) -> T {
        self.h
    }
    /// Angle in radians.
    pub fn theta(&self) -> T {
        self.theta
    }
    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn params(&self) -> BoxParams<T> {
        BoxParams::new(self.x, self.y, self.w, self.h, self.theta)
    }

    pub fn center(&self) -> Point2<T> {
        Point2::new(self.x, self.y)
    }

    pub fn area(&self) -> T {
        self.w * self.h
    }

    /// Closed-set membership test.
    pub fn contains(&self, p: Point2<T>) -> bool {
        let (s, c) = self.theta.sin_cos();
        let dx = p.x - self.x;
        let dy = p.y - self.y;
        let u = dx * c + dy * s;
        let v = dy * c - dx * s;
        let half = T::lit(0.5);
        u.abs() <= self.w * half && v.abs() <= self.h * half
    }

    pub fn translated(&self, dx: T, dy: T) -> Result<Self> {
        make_box(
            self.x + dx,
            self.y + dy,
            self.w,
            self.h,
            self.theta,
            self.convention,
        )
    }

    /// Rotates the box by `phi` radians about the point `pivot`.
    pub fn rotated_about(&self, pivot: Point2<T>, phi: T) -> Result<Self> {
        let (s, c) = phi.sin_cos();
        let dx = self.x - pivot.x;
        let dy = self.y - pivot.y;
        make_box(
            pivot.x + c * dx - s * dy,
            pivot.y + s * dx + c * dy,
            self.w,
            self.h,
            self.theta + phi,
            self.convention,
        )
    }

    fn sort_key(&self) -> [T; 6] {
        let conv = match self.convention {
            Convention::OpenCv => T::zero(),
            Convention::LongEdge => T::one(),
        };
        [self.x, self.y, self.w, self.h, self.theta, conv]
    }

    /// Lexicographic order on the stored fields; used to make binary
    /// operations independent of argument order.
    pub(crate) fn field_cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.sort_key(), other.sort_key());
        for (u, v) in a.iter().zip(b.iter()) {
            match u.partial_cmp(v) {
                Some(Ordering::Equal) | None => continue,
                Some(ord) => return ord,
            }
        }
        Ordering::Equal
    }
}

/// Maps `theta` into `[lo, lo + period)`.
pub(crate) fn wrap_angle<T: Scalar>(theta: T, lo: T, period: T) -> T {
    let mut t = theta - period * ((theta - lo) / period).floor();
    if t >= lo + period {
        t = t - period;
    }
    if t < lo {
        t = t + period;
    }
    t
}

/// Builds a box and normalizes it into `convention`.
///
/// Long-edge boxes get their extents ordered (`w >= h`, swapping and turning
/// by 90 degrees when needed) and the angle reduced modulo pi. OpenCV boxes have
/// the angle reduced modulo pi into `[-pi/2, pi/2)`; anything in `[0, pi/2)`
/// is folded into range by exchanging the edges and subtracting 90 degrees.
pub fn make_box<T: Scalar>(
    x: T,
    y: T,
    w: T,
    h: T,
    theta: T,
    convention: Convention,
) -> Result<OrientedBox<T>> {
    if ![x, y, w, h, theta].iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("box parameters"));
    }
    if w <= T::zero() || h <= T::zero() {
        return Err(Error::NonPositiveExtent {
            w: w.to_f64_lossy(),
            h: h.to_f64_lossy(),
        });
    }
    let half_pi = T::FRAC_PI_2();
    let pi = T::PI();
    let (mut w, mut h, mut theta) = (w, h, theta);
    match convention {
        Convention::LongEdge => {
            if w < h {
                std::mem::swap(&mut w, &mut h);
                theta = theta - half_pi;
            }
            theta = wrap_angle(theta, -half_pi, pi);
        }
        Convention::OpenCv => {
            theta = wrap_angle(theta, -half_pi, pi);
            if theta >= T::zero() {
                std::mem::swap(&mut w, &mut h);
                theta = theta - half_pi;
                if theta >= T::zero() {
                    // theta was within rounding of pi/2
                    theta = -half_pi;
                }
            }
        }
    }
    Ok(OrientedBox {
        x,
        y,
        w,
        h,
        theta,
        convention,
    })
}

/// Re-expresses a box in the other (or the same) convention.
///
/// OpenCV to long-edge keeps the parameters when `w >= h` (squares included)
/// and otherwise exchanges the edges and adds 90 degrees. Long-edge to OpenCV
/// keeps the parameters for angles in `[-pi/2, 0)` and otherwise exchanges the
/// edges and subtracts 90 degrees.
pub fn convert_convention<T: Scalar>(b: &OrientedBox<T>, target: Convention) -> OrientedBox<T> {
    let half_pi = T::FRAC_PI_2();
    let (w, h, theta) = match (b.convention, target) {
        (from, to) if from == to => return *b,
        (Convention::OpenCv, Convention::LongEdge) => {
            if b.w >= b.h {
                (b.w, b.h, b.theta)
            } else {
                (b.h, b.w, b.theta + half_pi)
            }
        }
        (Convention::LongEdge, Convention::OpenCv) => {
            if b.theta < T::zero() {
                (b.w, b.h, b.theta)
            } else {
                (b.h, b.w, b.theta - half_pi)
            }
        }
        _ => unreachable!(),
    };
    make_box(b.x, b.y, w, h, theta, target).expect("conversion of a valid box stays valid")
}

/// The four corners of the box, counter-clockwise.
pub fn box_vertices<T: Scalar>(b: &OrientedBox<T>) -> ConvexPolygon<T> {
    let (s, c) = b.theta.sin_cos();
    let half = T::lit(0.5);
    let (hw, hh) = (b.w * half, b.h * half);
    let corner = |u: T, v: T| Point2::new(b.x + c * u - s * v, b.y + s * u + c * v);
    ConvexPolygon::from_ccw_unchecked(vec![
        corner(hw, hh),
        corner(-hw, hh),
        corner(-hw, -hh),
        corner(hw, -hh),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const DEG: f64 = std::f64::consts::PI / 180.0;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn make_box_keeps_in_range_opencv_box() {
        let b = make_box(0.0, 0.0, 10.0, 70.0, -25.0 * DEG, Convention::OpenCv).unwrap();
        assert_eq!((b.w(), b.h()), (10.0, 70.0));
        assert_eq!(b.theta(), -25.0 * DEG);
    }

    #[test]
    fn make_box_long_edge_identity_and_swap() {
        let b = make_box(0.0, 0.0, 4.0, 2.0, 0.0, Convention::LongEdge).unwrap();
        assert_eq!(b.params(), BoxParams::new(0.0, 0.0, 4.0, 2.0, 0.0));

        let b = make_box(0.0, 0.0, 2.0, 4.0, 0.0, Convention::LongEdge).unwrap();
        assert_eq!((b.w(), b.h()), (4.0, 2.0));
        assert!(close(b.theta(), -std::f64::consts::FRAC_PI_2, 1e-15));
    }

    #[test]
    fn make_box_folds_out_of_range_opencv_angle() {
        // -115 deg is outside [-90, 0): same rectangle as (10, 70, -25 deg)
        let b = make_box(0.0, 0.0, 70.0, 10.0, -115.0 * DEG, Convention::OpenCv).unwrap();
        assert_eq!((b.w(), b.h()), (10.0, 70.0));
        assert!(close(b.theta(), -25.0 * DEG, 1e-12));
    }

    #[test]
    fn make_box_rejects_bad_input() {
        assert!(matches!(
            make_box(0.0, 0.0, 0.0, 1.0, 0.0, Convention::OpenCv),
            Err(Error::NonPositiveExtent { .. })
        ));
        assert!(matches!(
            make_box(0.0, 0.0, 1.0, -1.0, 0.0, Convention::LongEdge),
            Err(Error::NonPositiveExtent { .. })
        ));
        assert!(matches!(
            make_box(f64::NAN, 0.0, 1.0, 1.0, 0.0, Convention::OpenCv),
            Err(Error::NonFinite(_))
        ));
        assert!(matches!(
            make_box(0.0, 0.0, 1.0, 1.0, f64::INFINITY, Convention::OpenCv),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn convert_examples() {
        let b = make_box(0.0, 0.0, 70.0, 10.0, -90.0 * DEG, Convention::OpenCv).unwrap();
        let le = convert_convention(&b, Convention::LongEdge);
        assert_eq!(le.params(), b.params());
        assert_eq!(le.convention(), Convention::LongEdge);

        let b = make_box(0.0, 0.0, 10.0, 70.0, -25.0 * DEG, Convention::OpenCv).unwrap();
        let le = convert_convention(&b, Convention::LongEdge);
        assert_eq!((le.w(), le.h()), (70.0, 10.0));
        assert!(close(le.theta(), 65.0 * DEG, 1e-12));
    }

    #[test]
    fn square_long_edge_tie_keeps_angle() {
        let b = make_box(0.0, 0.0, 3.0, 3.0, -30.0 * DEG, Convention::OpenCv).unwrap();
        let le = convert_convention(&b, Convention::LongEdge);
        assert_eq!(le.params(), b.params());
    }

    #[test]
    fn vertices_of_axis_aligned_square() {
        let b = make_box(0.0, 0.0, 2.0, 2.0, 0.0, Convention::LongEdge).unwrap();
        let p = box_vertices(&b);
        let expected = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)];
        for (v, e) in p.vertices().iter().zip(expected) {
            assert!(close(v.x, e.0, 1e-15) && close(v.y, e.1, 1e-15));
        }
    }

    #[test]
    fn vertices_of_rotated_square_sit_on_axes() {
        let b = make_box(
            0.0,
            0.0,
            2.0,
            2.0,
            std::f64::consts::FRAC_PI_4,
            Convention::LongEdge,
        )
        .unwrap();
        for v in box_vertices(&b).vertices() {
            assert!(close(v.x.hypot(v.y), 2f64.sqrt(), 1e-12));
            assert!(v.x.abs() < 1e-12 || v.y.abs() < 1e-12);
        }
    }

    #[test]
    fn vertices_centroid_and_area() {
        let b = make_box(1.0, 2.0, 4.0, 2.0, 0.0, Convention::LongEdge).unwrap();
        let p = box_vertices(&b);
        let c = p.centroid();
        assert!(close(c.x, 1.0, 1e-12) && close(c.y, 2.0, 1e-12));
        assert!(close(p.area(), 8.0, 1e-12));
    }

    fn any_box() -> impl Strategy<Value = OrientedBox<f64>> {
        (
            -50.0..50.0f64,
            -50.0..50.0f64,
            0.5..100.0f64,
            0.5..100.0f64,
            -10.0..10.0f64,
            any::<bool>(),
        )
            .prop_map(|(x, y, w, h, t, le)| {
                let conv = if le {
                    Convention::LongEdge
                } else {
                    Convention::OpenCv
                };
                make_box(x, y, w, h, t, conv).unwrap()
            })
    }

    fn same_vertex_set(a: &ConvexPolygon<f64>, b: &ConvexPolygon<f64>, tol: f64) -> bool {
        a.vertices().iter().all(|p| {
            b.vertices()
                .iter()
                .any(|q| (p.x - q.x).abs() <= tol && (p.y - q.y).abs() <= tol)
        }) && a.len() == b.len()
    }

    proptest! {
        #[test]
        fn normalized_boxes_satisfy_invariants(b in any_box()) {
            let half_pi = std::f64::consts::FRAC_PI_2;
            prop_assert!(b.w() > 0.0 && b.h() > 0.0);
            match b.convention() {
                Convention::OpenCv => prop_assert!(b.theta() >= -half_pi && b.theta() < 0.0),
                Convention::LongEdge => {
                    prop_assert!(b.theta() >= -half_pi && b.theta() < half_pi);
                    prop_assert!(b.w() >= b.h());
                }
            }
        }

        #[test]
        fn conversion_preserves_rectangle(b in any_box()) {
            let c = convert_convention(&b, b.convention().other());
            let scale = b.w().max(b.h()).max(b.x().abs()).max(b.y().abs());
            prop_assert!(same_vertex_set(&box_vertices(&b), &box_vertices(&c), 1e-12 * scale.max(1.0)));
        }

        #[test]
        fn conversion_round_trips_non_square(b in any_box()) {
            prop_assume!((b.w() - b.h()).abs() > 1e-6);
            let back = convert_convention(&convert_convention(&b, b.convention().other()), b.convention());
            prop_assert!(close(back.w(), b.w(), 1e-12));
            prop_assert!(close(back.h(), b.h(), 1e-12));
            prop_assert!(close(back.theta(), b.theta(), 1e-12));
            prop_assert_eq!(back.x(), b.x());
        }

        #[test]
        fn vertices_are_ccw_with_correct_edges(b in any_box()) {
            let p = box_vertices(&b);
            prop_assert!(p.signed_area() > 0.0);
            let v = p.vertices();
            let e0 = (v[1].x - v[0].x).hypot(v[1].y - v[0].y);
            let e1 = (v[2].x - v[1].x).hypot(v[2].y - v[1].y);
            let scale = b.w().max(b.h()).max(1.0);
            prop_assert!(close(e0, b.w(), 1e-12 * scale));
            prop_assert!(close(e1, b.h(), 1e-12 * scale));
            let c = p.centroid();
            prop_assert!(close(c.x, b.x(), 1e-12 * scale.max(b.x().abs())));
            prop_assert!(close(c.y, b.y(), 1e-12 * scale.max(b.y().abs())));
        }
    }
}
