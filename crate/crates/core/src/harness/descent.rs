//! Single-box gradient descent from an anchor towards a ground truth.
//!
//! GWD losses descend on `[x, y, ln w, ln h, theta]` so the extents stay
//! positive; smooth L1 descends on the five regression offsets.

use std::fmt;

use super::table::Table;
use crate::error::{Error, Result};
use crate::gaussian::{gwd_gradient_params, gwd_squared, Gaussian2};
use crate::geometry::{rotated_iou, BoxParams, Convention, OrientedBox};
use crate::loss::{
    decode_deltas, encode_deltas, smooth_l1, smooth_l1_gradient, LossConfig, RegressionDelta,
    SMOOTH_L1_BETA,
};

/// Default step size for GWD losses.
pub const DEFAULT_GWD_LR: f64 = 0.0005;
/// Default step size for smooth L1.
pub const DEFAULT_SMOOTH_L1_LR: f64 = 0.05;
pub const DEFAULT_MAX_ITERS: usize = 5000;
pub const DEFAULT_RECORD_EVERY: usize = 50;

const STALL_WINDOW: usize = 50;
const STALL_TOLERANCE: f64 = 1e-10;
/// Distance above the loss floor treated as having reached it.
const FLOOR_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DescentLoss {
    Gwd(LossConfig<f64>),
    SmoothL1 { beta: f64 },
}

impl DescentLoss {
    pub fn smooth_l1() -> Self {
        DescentLoss::SmoothL1 {
            beta: SMOOTH_L1_BETA,
        }
    }

    pub fn default_learning_rate(&self) -> f64 {
        match self {
            DescentLoss::Gwd(_) => DEFAULT_GWD_LR,
            DescentLoss::SmoothL1 { .. } => DEFAULT_SMOOTH_L1_LR,
        }
    }

    fn floor(&self) -> f64 {
        match self {
            DescentLoss::Gwd(cfg) => cfg.floor(),
            DescentLoss::SmoothL1 { .. } => 0.0,
        }
    }
}

impl fmt::Display for DescentLoss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DescentLoss::Gwd(cfg) => write!(f, "{cfg}"),
            DescentLoss::SmoothL1 { beta } => write!(f, "smooth_l1 beta={beta}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentSpec {
    pub anchor: OrientedBox<f64>,
    pub ground_truth: OrientedBox<f64>,
    pub loss: DescentLoss,
    pub learning_rate: f64,
    pub max_iters: usize,
    pub record_every: usize,
}

impl DescentSpec {
    /// Starts from the OpenCV boundary fixture: anchor `(0,0,70,10,-90)`,
    /// ground truth `(0,0,10,70,-25)`, with the loss's default step size.
    pub fn boundary_case2(loss: DescentLoss) -> Self {
        let deg = std::f64::consts::PI / 180.0;
        let oc = Convention::OpenCv;
        Self {
            anchor: crate::geometry::make_box(0.0, 0.0, 70.0, 10.0, -90.0 * deg, oc)
                .expect("valid fixture"),
            ground_truth: crate::geometry::make_box(0.0, 0.0, 10.0, 70.0, -25.0 * deg, oc)
                .expect("valid fixture"),
            learning_rate: loss.default_learning_rate(),
            loss,
            max_iters: DEFAULT_MAX_ITERS,
            record_every: DEFAULT_RECORD_EVERY,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSpec(m.to_string()));
        if self.learning_rate <= 0.0 || !self.learning_rate.is_finite() {
            return bad("learning rate must be positive");
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1");
        }
        if self.record_every == 0 {
            return bad("record_every must be at least 1");
        }
        if self.anchor.convention() != self.ground_truth.convention() {
            return Err(Error::ConventionMismatch);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Iterate {
    pub step: usize,
    pub bbox: OrientedBox<f64>,
    pub loss: f64,
    pub iou: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The loss reached its floor (within 1e-12).
    Converged,
    /// Improvement over the last 50 steps fell below 1e-10.
    Stalled,
    MaxIters,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub iterates: Vec<Iterate>,
    pub stop_reason: StopReason,
}

impl Trajectory {
    pub fn last(&self) -> &Iterate {
        self.iterates.last().expect("trajectory is never empty")
    }

    pub fn final_iou(&self) -> f64 {
        self.last().iou
    }

    /// Columns: step, x, y, w, h, theta_deg, loss, iou.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["step", "x", "y", "w", "h", "theta_deg", "loss", "iou"]);
        for it in &self.iterates {
            let b = &it.bbox;
            t.push_row(vec![
                it.step as f64,
                b.x(),
                b.y(),
                b.w(),
                b.h(),
                b.theta().to_degrees(),
                it.loss,
                it.iou,
            ]);
        }
        t
    }
}

/// Optimizer state: the point being descended on and how to read it.
enum State {
    Gwd {
        cfg: LossConfig<f64>,
        p: BoxParams<f64>,
        target: Gaussian2<f64>,
    },
    SmoothL1 {
        beta: f64,
        t: RegressionDelta<f64>,
        target: RegressionDelta<f64>,
    },
}

impl State {
    fn current_box(&self, anchor: &OrientedBox<f64>) -> Result<OrientedBox<f64>> {
        match self {
            State::Gwd { p, .. } => p.to_box(anchor.convention()),
            State::SmoothL1 { t, .. } => decode_deltas(t, anchor),
        }
    }

    fn loss(&self) -> Result<f64> {
        match self {
            State::Gwd { cfg, p, target } => {
                Ok(cfg.apply(gwd_squared(&Gaussian2::from_params(p)?, target)))
            }
            State::SmoothL1 { beta, t, target } => Ok(smooth_l1(t, target, *beta)),
        }
    }

    fn step(&mut self, lr: f64, gt: &BoxParams<f64>) -> Result<()> {
        match self {
            State::Gwd { cfg, p, target } => {
                let d2 = gwd_squared(&Gaussian2::from_params(p)?, target);
                let g = gwd_gradient_params(p, gt).map(|v| lr * cfg.derivative(d2) * v);
                // a step on ln w is a multiplicative step on w
                p.x -= g[0];
                p.y -= g[1];
                p.w *= (-g[2] * p.w).exp();
                p.h *= (-g[3] * p.h).exp();
                p.theta -= g[4];
            }
            State::SmoothL1 { beta, t, target } => {
                let g = smooth_l1_gradient(t, target, *beta);
                let mut a = t.to_array();
                for i in 0..5 {
                    a[i] -= lr * g[i];
                }
                *t = RegressionDelta::from_array(a);
            }
        }
        Ok(())
    }

    fn is_finite(&self) -> bool {
        match self {
            State::Gwd { p, .. } => p.is_finite() && p.w > 0.0 && p.h > 0.0,
            State::SmoothL1 { t, .. } => t.is_finite(),
        }
    }
}

/// Plain constant-step gradient descent.
///
/// Stops when the loss reaches its floor, when it improved by less than
/// 1e-10 over the last 50 steps, or after `max_iters` updates. Every
/// `record_every`-th iterate is kept, plus the final one.
pub fn run_descent(spec: &DescentSpec) -> Result<Trajectory> {
    spec.validate()?;
    let anchor = &spec.anchor;
    let gt = &spec.ground_truth;
    let gt_params = gt.params();
    let mut state = match spec.loss {
        DescentLoss::Gwd(cfg) => State::Gwd {
            cfg,
            p: anchor.params(),
            target: Gaussian2::from_params(&gt_params)?,
        },
        DescentLoss::SmoothL1 { beta } => State::SmoothL1 {
            beta,
            t: RegressionDelta::zero(),
            target: encode_deltas(gt, anchor)?,
        },
    };
    let floor = spec.loss.floor();

    let evaluate = |state: &State, step: usize| -> Result<Iterate> {
        let loss = state.loss().map_err(|_| Error::Diverged { step })?;
        if !state.is_finite() || !loss.is_finite() {
            return Err(Error::Diverged { step });
        }
        let bbox = state
            .current_box(anchor)
            .map_err(|_| Error::Diverged { step })?;
        Ok(Iterate {
            step,
            bbox,
            loss,
            iou: rotated_iou(&bbox, gt),
        })
    };

    let mut iterates = Vec::new();
    let mut history = Vec::with_capacity(spec.max_iters + 1);
    let mut step = 0;
    let stop_reason = loop {
        let current = evaluate(&state, step)?;
        history.push(current.loss);
        let reason = if current.loss - floor <= FLOOR_TOLERANCE {
            Some(StopReason::Converged)
        } else if step >= STALL_WINDOW
            && history[step - STALL_WINDOW] - current.loss < STALL_TOLERANCE
        {
            Some(StopReason::Stalled)
        } else if step == spec.max_iters {
            Some(StopReason::MaxIters)
        } else {
            None
        };
        if reason.is_some() || step % spec.record_every == 0 {
            iterates.push(current);
        }
        if let Some(r) = reason {
            break r;
        }
        state
            .step(spec.learning_rate, &gt_params)
            .map_err(|_| Error::Diverged { step })?;
        step += 1;
    };
    Ok(Trajectory {
        iterates,
        stop_reason,
    })
}
