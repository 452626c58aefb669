//! The three boundary / square-like fixtures.
//!
//! Each case pairs an anchor and a ground truth with the "way1" prediction:
//! the short geometric move from the anchor onto the ground truth, expressed
//! as raw (unwrapped) regression offsets. Smooth L1 compares those offsets with
//! the encoded ground truth; the GWD loss compares the decoded boxes.

use std::f64::consts::PI;

use crate::error::Result;
use crate::geometry::{make_box, rotated_iou, BoxParams, Convention, OrientedBox};
use crate::loss::{
    decode_deltas, encode_deltas, encode_params, gwd_loss, smooth_l1, LossConfig, RegressionDelta,
    SMOOTH_L1_BETA,
};

const DEG: f64 = PI / 180.0;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCase {
    pub name: &'static str,
    pub anchor: OrientedBox<f64>,
    pub ground_truth: OrientedBox<f64>,
    pub way1: RegressionDelta<f64>,
}

impl BoundaryCase {
    /// The way1 prediction decoded (and normalized) against the anchor.
    pub fn prediction(&self) -> Result<OrientedBox<f64>> {
        decode_deltas(&self.way1, &self.anchor)
    }
}

fn fixture(x: f64, y: f64, w: f64, h: f64, deg: f64, conv: Convention) -> OrientedBox<f64> {
    make_box(x, y, w, h, deg * DEG, conv).expect("valid fixture")
}

/// Case 1: long-edge; the prediction is the ground truth with edges
/// exchanged and the angle shifted by -90 degrees.
/// Case 2: OpenCV; anchor `(0,0,70,10,-90)`, ground truth `(0,0,10,70,-25)`,
/// way1 turns the anchor by -25 degrees to `(0,0,70,10,-115)`.
/// Case 3: long-edge, near-square; anchor `(0,0,45,44,0)`, ground truth
/// `(0,0,45,43,-60)`, way1 turns the anchor by +30 degrees.
pub fn boundary_fixtures() -> Vec<BoundaryCase> {
    let le = Convention::LongEdge;
    let oc = Convention::OpenCv;

    let anchor1 = fixture(0.0, 0.0, 70.0, 10.0, -90.0, le);
    let gt1 = fixture(0.0, 0.0, 70.0, 10.0, -25.0, le);
    let exchanged = BoxParams::new(gt1.x(), gt1.y(), gt1.h(), gt1.w(), gt1.theta() - PI / 2.0);

    vec![
        BoundaryCase {
            name: "case1",
            anchor: anchor1,
            ground_truth: gt1,
            way1: encode_params(&exchanged, &anchor1.params()),
        },
        BoundaryCase {
            name: "case2",
            anchor: fixture(0.0, 0.0, 70.0, 10.0, -90.0, oc),
            ground_truth: fixture(0.0, 0.0, 10.0, 70.0, -25.0, oc),
            way1: RegressionDelta::new(0.0, 0.0, 0.0, 0.0, -25.0 * DEG),
        },
        BoundaryCase {
            name: "case3",
            anchor: fixture(0.0, 0.0, 45.0, 44.0, 0.0, le),
            ground_truth: fixture(0.0, 0.0, 45.0, 43.0, -60.0, le),
            way1: RegressionDelta::new(0.0, 0.0, 0.0, 0.0, 30.0 * DEG),
        },
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryRow {
    pub case: String,
    pub loss: String,
    pub value: f64,
    /// IoU of the way1 prediction with the ground truth.
    pub iou: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryReport {
    pub rows: Vec<BoundaryRow>,
    pub loss: LossConfig<f64>,
}

impl BoundaryReport {
    pub fn value(&self, case: &str, loss: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.case == case && r.loss == loss)
            .map(|r| r.value)
    }

    pub fn iou(&self, case: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.case == case).map(|r| r.iou)
    }

    pub fn gwd_column(&self) -> String {
        self.loss.column_name()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["case", "loss", "value", "iou"])?;
        for r in &self.rows {
            w.write_record([
                r.case.clone(),
                r.loss.clone(),
                r.value.to_string(),
                r.iou.to_string(),
            ])?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| crate::Error::Csv(e.into_error().into()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Evaluates the fixtures with the default GWD loss (sqrt, tau = 2, fitted)
/// and the default smooth-L1 knee.
pub fn run_boundary_cases() -> BoundaryReport {
    run_boundary_cases_with(&LossConfig::default(), SMOOTH_L1_BETA)
        .expect("built-in fixtures are valid")
}

pub fn run_boundary_cases_with(cfg: &LossConfig<f64>, beta: f64) -> Result<BoundaryReport> {
    let mut rows = Vec::new();
    for case in boundary_fixtures() {
        let pred = case.prediction()?;
        let iou = rotated_iou(&pred, &case.ground_truth);
        let target = encode_deltas(&case.ground_truth, &case.anchor)?;
        rows.push(BoundaryRow {
            case: case.name.into(),
            loss: "smooth_l1".into(),
            value: smooth_l1(&case.way1, &target, beta),
            iou,
        });
        rows.push(BoundaryRow {
            case: case.name.into(),
            loss: cfg.column_name(),
            value: gwd_loss(&pred, &case.ground_truth, cfg),
            iou,
        });
    }
    Ok(BoundaryReport { rows, loss: *cfg })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_predictions_fold_onto_expected_boxes() {
        let cases = boundary_fixtures();
        let p1 = cases[0].prediction().unwrap();
        assert!((p1.theta() - cases[0].ground_truth.theta()).abs() < 1e-12);
        let p2 = cases[1].prediction().unwrap();
        assert_eq!((p2.w(), p2.h()), (10.0, 70.0));
        let p3 = cases[2].prediction().unwrap();
        assert!((p3.theta() - 30.0 * DEG).abs() < 1e-12);
    }

    #[test]
    fn case1_and_case2_gwd_sits_on_floor() {
        let r = run_boundary_cases();
        let floor = r.loss.floor();
        let col = r.gwd_column();
        for case in ["case1", "case2"] {
            assert!(
                (r.value(case, &col).unwrap() - floor).abs() < 1e-9,
                "{case}"
            );
            assert!(r.value(case, "smooth_l1").unwrap() > 1.0, "{case}");
            assert!((r.iou(case).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn gwd_is_symmetric_in_roles() {
        let cfg = LossConfig::default();
        for case in boundary_fixtures() {
            let pred = case.prediction().unwrap();
            let a = gwd_loss(&pred, &case.ground_truth, &cfg);
            let b = gwd_loss(&case.ground_truth, &pred, &cfg);
            assert!((a - b).abs() < 1e-9);
            let a = gwd_loss(&case.anchor, &case.ground_truth, &cfg);
            let b = gwd_loss(&case.ground_truth, &case.anchor, &cfg);
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn report_csv_has_six_rows() {
        let csv = run_boundary_cases().to_csv().unwrap();
        assert_eq!(csv.lines().count(), 7);
    }
}
