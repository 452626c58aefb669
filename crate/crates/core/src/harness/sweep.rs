use std::fmt;

use super::table::Table;
use crate::error::{Error, Result};
use crate::gaussian::{gwd_squared, Gaussian2};
use crate::geometry::{rotated_iou, BoxParams, Convention, OrientedBox};
use crate::loss::{encode_params, smooth_l1, LossConfig, RegressionDelta, SMOOTH_L1_BETA};
use crate::{LossForm, Transform};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    /// Copy of the base box rotated by the swept angle (degrees).
    AngleDiff,
    /// Both boxes reshaped to the swept `w/h` ratio at the base box's area;
    /// the copy is rotated by a fixed relative angle.
    AspectRatio,
    /// Copy translated by the swept distance along a fixed direction.
    CenterShift,
}

impl SweepKind {
    pub fn parameter_name(self) -> &'static str {
        match self {
            SweepKind::AngleDiff => "angle_deg",
            SweepKind::AspectRatio => "aspect_ratio",
            SweepKind::CenterShift => "center_shift",
        }
    }
}

impl std::str::FromStr for SweepKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "angle" | "angle_diff" => Ok(SweepKind::AngleDiff),
            "aspect" | "aspect_ratio" => Ok(SweepKind::AspectRatio),
            "shift" | "center_shift" => Ok(SweepKind::CenterShift),
            other => Err(Error::InvalidSpec(format!("unknown sweep kind `{other}`"))),
        }
    }
}

/// One evaluated column of a sweep table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LossColumn {
    Gwd(LossConfig<f64>),
    /// Smooth L1 on unwrapped deltas of the copy relative to the reference.
    SmoothL1,
    /// `1 - IoU`.
    IouLoss,
}

impl LossColumn {
    pub fn name(&self) -> String {
        match self {
            LossColumn::Gwd(cfg) => cfg.column_name(),
            LossColumn::SmoothL1 => "smooth_l1".into(),
            LossColumn::IouLoss => "iou_loss".into(),
        }
    }
}

impl fmt::Display for LossColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LossColumn::Gwd(cfg) => write!(f, "{cfg}"),
            LossColumn::SmoothL1 => f.write_str("smooth_l1"),
            LossColumn::IouLoss => f.write_str("iou"),
        }
    }
}

impl std::str::FromStr for LossColumn {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "smooth_l1" | "smoothl1" => Ok(LossColumn::SmoothL1),
            "iou" | "iou_loss" => Ok(LossColumn::IouLoss),
            other => Ok(LossColumn::Gwd(other.parse()?)),
        }
    }
}

/// Columns used when a sweep does not list its own.
pub fn default_loss_columns() -> Vec<LossColumn> {
    let fitted = |t, tau| LossColumn::Gwd(LossConfig::fitted(t, tau).expect("tau >= 1"));
    vec![
        fitted(Transform::Sqrt, 1.0),
        fitted(Transform::Sqrt, 2.0),
        fitted(Transform::Log, 1.0),
        LossColumn::Gwd(LossConfig::new(Transform::Log, 1.0, LossForm::Direct).expect("valid")),
        LossColumn::SmoothL1,
        LossColumn::IouLoss,
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub base_box: OrientedBox<f64>,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub losses: Vec<LossColumn>,
    /// Relative angle of the aspect-ratio sweep, radians.
    pub relative_angle: f64,
    /// Direction of the center-shift sweep, radians from the x-axis.
    pub shift_direction: f64,
    pub beta: f64,
}

impl SweepSpec {
    /// Defaults: base box `(0,0,40,10,0)` long-edge; angle 0..90 degrees;
    /// aspect ratio 1..16 at the base area (400) with a 15 degree relative
    /// angle; shift along +x up to three box diagonals; 200 grid points.
    pub fn default_for(kind: SweepKind) -> Self {
        let base_box: OrientedBox<f64> =
            crate::geometry::make_box(0.0, 0.0, 40.0, 10.0, 0.0, Convention::LongEdge)
                .expect("valid fixture");
        let (start, stop) = match kind {
            SweepKind::AngleDiff => (0.0, 90.0),
            SweepKind::AspectRatio => (1.0, 16.0),
            SweepKind::CenterShift => (0.0, 3.0 * base_box.w().hypot(base_box.h())),
        };
        Self {
            kind,
            base_box,
            start,
            stop,
            steps: 200,
            losses: default_loss_columns(),
            relative_angle: 15f64.to_radians(),
            shift_direction: 0.0,
            beta: SMOOTH_L1_BETA,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSpec(m.to_string()));
        if self.steps < 2 {
            return bad("sweep needs at least 2 steps");
        }
        if self.start >= self.stop || !self.start.is_finite() || !self.stop.is_finite() {
            return bad("sweep range needs start < stop");
        }
        if self.kind == SweepKind::AspectRatio && self.start <= 0.0 {
            return bad("aspect ratios must be positive");
        }
        if self.losses.is_empty() {
            return bad("sweep needs at least one loss column");
        }
        if !self.relative_angle.is_finite()
            || !self.shift_direction.is_finite()
            || !self.beta.is_finite()
        {
            return bad("non-finite sweep setting");
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let n = self.steps - 1;
        (0..self.steps)
            .map(|i| {
                if i == n {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / n as f64
                }
            })
            .collect()
    }

    /// Reference and moved copy for one grid value, as raw parameters.
    fn pair_at(&self, value: f64) -> (BoxParams<f64>, BoxParams<f64>) {
        let base = self.base_box.params();
        match self.kind {
            SweepKind::AngleDiff => {
                let moved = BoxParams {
                    theta: base.theta + value.to_radians(),
                    ..base
                };
                (base, moved)
            }
            SweepKind::AspectRatio => {
                let area = base.w * base.h;
                let (w, h) = ((area * value).sqrt(), (area / value).sqrt());
                let reference = BoxParams { w, h, ..base };
                let moved = BoxParams {
                    theta: base.theta + self.relative_angle,
                    ..reference
                };
                (reference, moved)
            }
            SweepKind::CenterShift => {
                let (s, c) = self.shift_direction.sin_cos();
                let moved = BoxParams {
                    x: base.x + value * c,
                    y: base.y + value * s,
                    ..base
                };
                (base, moved)
            }
        }
    }
}

/// Evaluates every configured loss over the sweep grid.
///
/// Columns: the swept parameter, one per loss, then `iou`.
pub fn run_sweep(spec: &SweepSpec) -> Result<Table> {
    spec.validate()?;
    let mut header = vec![spec.kind.parameter_name().to_string()];
    header.extend(spec.losses.iter().map(LossColumn::name));
    header.push("iou".into());
    let mut table = Table::new(header);
    let convention = spec.base_box.convention();
    for value in spec.grid() {
        let (reference, moved) = spec.pair_at(value);
        let (ref_box, moved_box) = (reference.to_box(convention)?, moved.to_box(convention)?);
        let iou = rotated_iou(&moved_box, &ref_box);
        let d2 = gwd_squared(
            &Gaussian2::from_params(&moved)?,
            &Gaussian2::from_params(&reference)?,
        );
        let mut row = vec![value];
        for loss in &spec.losses {
            row.push(match loss {
                LossColumn::Gwd(cfg) => cfg.apply(d2),
                LossColumn::SmoothL1 => smooth_l1(
                    &encode_params(&moved, &reference),
                    &RegressionDelta::zero(),
                    spec.beta,
                ),
                LossColumn::IouLoss => 1.0 - iou,
            });
        }
        row.push(iou);
        table.push_row(row);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn floor_of(cfg: &LossConfig<f64>) -> f64 {
        cfg.floor()
    }

    #[test]
    fn angle_sweep_starts_at_floor() {
        let spec = SweepSpec::default_for(SweepKind::AngleDiff);
        let t = run_sweep(&spec).unwrap();
        assert_eq!(t.rows().len(), 200);
        let first = &t.rows()[0];
        for (k, loss) in spec.losses.iter().enumerate() {
            let expected = match loss {
                LossColumn::Gwd(cfg) => floor_of(cfg),
                _ => 0.0,
            };
            assert!((first[k + 1] - expected).abs() < 1e-12, "{}", loss.name());
        }
        assert!((first.last().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn square_quarter_turn_is_at_floor() {
        let mut spec = SweepSpec::default_for(SweepKind::AngleDiff);
        spec.base_box =
            crate::geometry::make_box(0.0, 0.0, 20.0, 20.0, 0.0, Convention::LongEdge).unwrap();
        spec.losses = vec![LossColumn::Gwd(LossConfig::default())];
        let t = run_sweep(&spec).unwrap();
        let last = t.rows().last().unwrap();
        assert!((last[1] - LossConfig::<f64>::default().floor()).abs() < 1e-6);
        assert!((last[2] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut spec = SweepSpec::default_for(SweepKind::CenterShift);
        spec.steps = 1;
        assert!(run_sweep(&spec).is_err());
        let mut spec = SweepSpec::default_for(SweepKind::CenterShift);
        spec.stop = spec.start;
        assert!(run_sweep(&spec).is_err());
        let mut spec = SweepSpec::default_for(SweepKind::AspectRatio);
        spec.start = 0.0;
        assert!(run_sweep(&spec).is_err());
    }

    #[test]
    fn loss_column_parsing() {
        assert_eq!(
            "smooth_l1".parse::<LossColumn>().unwrap(),
            LossColumn::SmoothL1
        );
        assert_eq!("iou".parse::<LossColumn>().unwrap(), LossColumn::IouLoss);
        assert_eq!(
            "transform=sqrt tau=2 form=fitted"
                .parse::<LossColumn>()
                .unwrap(),
            LossColumn::Gwd(LossConfig::default())
        );
        assert!("bogus".parse::<LossColumn>().is_err());
    }

    #[test]
    fn grid_hits_both_ends() {
        let spec = SweepSpec::default_for(SweepKind::AspectRatio);
        let g = spec.grid();
        assert_eq!((g[0], *g.last().unwrap()), (1.0, 16.0));
    }
}
