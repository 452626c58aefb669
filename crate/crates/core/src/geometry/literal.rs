//! Text form of a box: `x,y,w,h,theta_deg[,oc|le]`.
//!
//! Angles are written in degrees and the convention defaults to `oc`.
//! Whitespace is ignored; in multi-line input `#` starts a comment.

use super::{make_box, Convention, OrientedBox};
use crate::error::{Error, Result};
use crate::Scalar;

pub fn parse_box_literal<T: Scalar>(text: &str) -> Result<OrientedBox<T>> {
    let bad = |reason: &str| Error::BoxLiteral {
        literal: text.to_string(),
        reason: reason.to_string(),
    };
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let fields: Vec<&str> = compact.split(',').collect();
    if !(5..=6).contains(&fields.len()) {
        return Err(bad("expected 5 numbers and an optional convention"));
    }
    let mut nums = [0.0f64; 5];
    for (slot, field) in nums.iter_mut().zip(&fields) {
        *slot = field
            .parse::<f64>()
            .map_err(|_| bad(&format!("`{field}` is not a number")))?;
    }
    let convention = match fields.get(5) {
        Some(tag) => tag
            .parse::<Convention>()
            .map_err(|_| bad("convention must be `oc` or `le`"))?,
        None => Convention::OpenCv,
    };
    let [x, y, w, h, deg] = nums;
    make_box(
        T::lit(x),
        T::lit(y),
        T::lit(w),
        T::lit(h),
        T::lit(deg.to_radians()),
        convention,
    )
}

/// Parses one box per non-empty line, skipping `#` comments.
pub fn parse_box_file<T: Scalar>(text: &str) -> Result<Vec<OrientedBox<T>>> {
    text.lines()
        .map(|line| line.split('#').next().unwrap_or("").trim())
        .filter(|line| !line.is_empty())
        .map(parse_box_literal)
        .collect()
}

/// Fixed six-decimal rendering with trailing zeros removed (`65`, `0.5`, `-1.25`).
pub fn format_number(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s.as_str()
    };
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

pub fn format_box_literal<T: Scalar>(b: &OrientedBox<T>) -> String {
    let p = b.params();
    let nums = [p.x, p.y, p.w, p.h].map(|v| format_number(v.to_f64_lossy()));
    format!(
        "{},{},{},{},{},{}",
        nums[0],
        nums[1],
        nums[2],
        nums[3],
        format_number(p.theta.to_f64_lossy().to_degrees()),
        b.convention()
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_default_convention() {
        let b: OrientedBox<f64> = parse_box_literal(" 0, 0, 10, 70, -25 ").unwrap();
        assert_eq!(b.convention(), Convention::OpenCv);
        assert_eq!((b.w(), b.h()), (10.0, 70.0));
        assert!((b.theta() - (-25f64).to_radians()).abs() < 1e-15);
    }

    #[test]
    fn parses_long_edge_tag() {
        let b: OrientedBox<f64> = parse_box_literal("1,2,4,2,30,le").unwrap();
        assert_eq!(b.convention(), Convention::LongEdge);
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_box_literal::<f64>("1,2,3").is_err());
        assert!(parse_box_literal::<f64>("1,2,3,4,x").is_err());
        assert!(parse_box_literal::<f64>("1,2,3,4,5,zz").is_err());
        assert!(matches!(
            parse_box_literal::<f64>("0,0,0,1,0"),
            Err(Error::NonPositiveExtent { .. })
        ));
    }

    #[test]
    fn file_with_comments() {
        let text = "# fixtures\n0,0,70,10,-90  # anchor\n\n0,0,10,70,-25,oc\n";
        let boxes: Vec<OrientedBox<f64>> = parse_box_file(text).unwrap();
        assert_eq!(boxes.len(), 2);
    }

    #[test]
    fn formats_compactly() {
        let b: OrientedBox<f64> = parse_box_literal("0,0,70,10,65,le").unwrap();
        assert_eq!(format_box_literal(&b), "0,0,70,10,65,le");
        assert_eq!(format_number(-0.0000001), "0");
        assert_eq!(format_number(2.5), "2.5");
    }
}
