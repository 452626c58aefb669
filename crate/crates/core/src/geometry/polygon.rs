use crate::error::{Error, Result};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point2<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    fn coincides(&self, other: &Self, eps: T) -> bool {
        (self.x - other.x).abs() <= eps && (self.y - other.y).abs() <= eps
    }
}

/// `(b - a) x (p - a)`: positive when `p` lies left of the directed line `a -> b`.
#[inline]
fn orient<T: Scalar>(a: Point2<T>, b: Point2<T>, p: Point2<T>) -> T {
    (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)
}

/// Convex polygon with counter-clockwise vertices, or the empty polygon.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvexPolygon<T> {
    vertices: Vec<Point2<T>>,
}

impl<T: Scalar> ConvexPolygon<T> {
    pub fn empty() -> Self {
        Self {
            vertices: Vec::new(),
        }
    }

    /// Validates and normalizes a vertex list.
    ///
    /// Consecutive vertices closer than the geometric tolerance are merged and a
    /// clockwise list is reversed. Lists that collapse to less than three
    /// vertices or to zero area give the empty polygon.
    pub fn new(vertices: Vec<Point2<T>>) -> Result<Self> {
        if vertices
            .iter()
            .any(|p| !p.x.is_finite() || !p.y.is_finite())
        {
            return Err(Error::NonFinite("polygon vertex"));
        }
        let mut poly = Self::cleaned(vertices);
        if poly.signed_area() < T::zero() {
            poly.vertices.reverse();
        }
        let eps = T::geom_eps();
        let n = poly.vertices.len();
        for i in 0..n {
            let (a, b, c) = (
                poly.vertices[i],
                poly.vertices[(i + 1) % n],
                poly.vertices[(i + 2) % n],
            );
            if orient(a, b, c) < -eps {
                return Err(Error::InvalidSpec("polygon is not convex".into()));
            }
        }
        Ok(poly)
    }

    pub(crate) fn from_ccw_unchecked(vertices: Vec<Point2<T>>) -> Self {
        Self { vertices }
    }

    fn cleaned(mut vertices: Vec<Point2<T>>) -> Self {
        let eps = T::geom_eps();
        vertices.dedup_by(|b, a| a.coincides(b, eps));
        while vertices.len() > 1 && vertices[0].coincides(vertices.last().unwrap(), eps) {
            vertices.pop();
        }
        let poly = Self { vertices };
        if poly.vertices.len() < 3 || poly.signed_area().abs() < eps {
            Self::empty()
        } else {
            poly
        }
    }

    pub fn vertices(&self) -> &[Point2<T>] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Shoelace area, positive for counter-clockwise order.
    pub fn signed_area(&self) -> T {
        let n = self.vertices.len();
        if n < 3 {
            return T::zero();
        }
        let mut acc = T::zero();
        for i in 0..n {
            let (p, q) = (self.vertices[i], self.vertices[(i + 1) % n]);
            acc = acc + (p.x * q.y - q.x * p.y);
        }
        acc * T::lit(0.5)
    }

    pub fn area(&self) -> T {
        self.signed_area().abs()
    }

    /// Area centroid. Falls back to the vertex mean for degenerate input.
    pub fn centroid(&self) -> Point2<T> {
        let n = self.vertices.len();
        if n == 0 {
            return Point2::new(T::zero(), T::zero());
        }
        // shift to the first vertex to limit cancellation
        let o = self.vertices[0];
        let (mut cx, mut cy, mut a2) = (T::zero(), T::zero(), T::zero());
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            let (px, py, qx, qy) = (p.x - o.x, p.y - o.y, q.x - o.x, q.y - o.y);
            let cross = px * qy - qx * py;
            cx = cx + (px + qx) * cross;
            cy = cy + (py + qy) * cross;
            a2 = a2 + cross;
        }
        if a2.abs() <= T::geom_eps() {
            let k = T::lit(n as f64);
            let sx = self.vertices.iter().map(|p| p.x).sum::<T>();
            let sy = self.vertices.iter().map(|p| p.y).sum::<T>();
            return Point2::new(sx / k, sy / k);
        }
        let k = T::lit(3.0) * a2;
        Point2::new(o.x + cx / k, o.y + cy / k)
    }
}

/// Intersection of two convex counter-clockwise polygons.
///
/// The subject is clipped against the half-plane left of each clip edge in
/// turn. Points on an edge count as inside. The result is cleaned with the
/// geometric tolerance, so touching polygons give the empty polygon.
pub fn clip_convex<T: Scalar>(
    subject: &ConvexPolygon<T>,
    clip: &ConvexPolygon<T>,
) -> ConvexPolygon<T> {
    if subject.is_empty() || clip.is_empty() {
        return ConvexPolygon::empty();
    }
    let mut output = subject.vertices.clone();
    let m = clip.vertices.len();
    for i in 0..m {
        if output.is_empty() {
            break;
        }
        let a = clip.vertices[i];
        let b = clip.vertices[(i + 1) % m];
        let input = std::mem::take(&mut output);
        let n = input.len();
        for j in 0..n {
            let p = input[j];
            let q = input[(j + 1) % n];
            let dp = orient(a, b, p);
            let dq = orient(a, b, q);
            let p_in = dp >= T::zero();
            let q_in = dq >= T::zero();
            if p_in {
                output.push(p);
            }
            if p_in != q_in {
                let t = dp / (dp - dq);
                output.push(Point2::new(p.x + (q.x - p.x) * t, p.y + (q.y - p.y) * t));
            }
        }
    }
    ConvexPolygon::cleaned(output)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(x0: f64, y0: f64, s: f64) -> ConvexPolygon<f64> {
        ConvexPolygon::new(vec![
            Point2::new(x0, y0),
            Point2::new(x0 + s, y0),
            Point2::new(x0 + s, y0 + s),
            Point2::new(x0, y0 + s),
        ])
        .unwrap()
    }

    #[test]
    fn self_intersection_is_identity() {
        let s = square(0.0, 0.0, 1.0);
        let r = clip_convex(&s, &s);
        assert!((r.area() - 1.0).abs() < 1e-12);
        assert_eq!(r.len(), 4);
    }

    #[test]
    fn half_overlap() {
        let r = clip_convex(&square(0.0, 0.0, 1.0), &square(0.5, 0.0, 1.0));
        assert!((r.area() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn disjoint_and_touching_are_empty() {
        assert!(clip_convex(&square(0.0, 0.0, 1.0), &square(3.0, 0.0, 1.0)).is_empty());
        assert!(clip_convex(&square(0.0, 0.0, 1.0), &square(1.0, 0.0, 1.0)).is_empty());
        assert!(clip_convex(&square(0.0, 0.0, 1.0), &square(1.0, 1.0, 1.0)).is_empty());
    }

    #[test]
    fn clockwise_input_is_reversed() {
        let p = ConvexPolygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 0.0),
        ])
        .unwrap();
        assert!(p.signed_area() > 0.0);
    }

    #[test]
    fn duplicate_vertices_are_merged() {
        let p = ConvexPolygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1e-12),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
            Point2::new(0.0, 0.0),
        ])
        .unwrap();
        assert_eq!(p.len(), 4);
    }

    #[test]
    fn non_convex_rejected() {
        let r = ConvexPolygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(1.0, 0.5),
            Point2::new(2.0, 2.0),
            Point2::new(0.0, 2.0),
        ]);
        assert!(r.is_err());
    }

    #[test]
    fn degenerate_lists_are_empty() {
        let line = ConvexPolygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(2.0, 0.0),
        ])
        .unwrap();
        assert!(line.is_empty());
        assert_eq!(line.area(), 0.0);
    }
}
