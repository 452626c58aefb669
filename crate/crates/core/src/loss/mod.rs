//! GWD-based regression losses alongside the smooth-L1 baseline on encoded deltas.

mod deltas;

pub use deltas::{
    decode_deltas, encode_deltas, encode_params, smooth_l1, smooth_l1_gradient, RegressionDelta,
    SMOOTH_L1_BETA,
};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gaussian::{box_to_gaussian, gwd_squared};
use crate::geometry::OrientedBox;
use crate::Scalar;

/// Nonlinearity applied to the squared distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transform {
    /// `f(d^2) = d`.
    Sqrt,
    /// `f(d^2) = ln(1 + d^2)`; shifted so that `f(0) = 0`.
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LossForm {
    /// `d^2` itself.
    Raw,
    /// `1 - 1 / (tau + f(d^2))`.
    Fitted,
    /// `f(d^2)`.
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossConfig<T> {
    transform: Transform,
    tau: T,
    form: LossForm,
}

impl<T: Scalar> Default for LossConfig<T> {
    /// `sqrt`, `tau = 2`, fitted form.
    fn default() -> Self {
        Self {
            transform: Transform::Sqrt,
            tau: T::lit(2.0),
            form: LossForm::Fitted,
        }
    }
}

impl<T: Scalar> LossConfig<T> {
    pub fn new(transform: Transform, tau: T, form: LossForm) -> Result<Self> {
        if !tau.is_finite() {
            return Err(Error::InvalidLossConfig("tau must be finite".into()));
        }
        if form == LossForm::Fitted && tau < T::one() {
            return Err(Error::InvalidLossConfig(format!(
                "fitted form needs tau >= 1, got {tau}"
            )));
        }
        Ok(Self {
            transform,
            tau,
            form,
        })
    }

    pub fn fitted(transform: Transform, tau: T) -> Result<Self> {
        Self::new(transform, tau, LossForm::Fitted)
    }

    pub fn transform(&self) -> Transform {
        self.transform
    }
    pub fn tau(&self) -> T {
        self.tau
    }
    pub fn form(&self) -> LossForm {
        self.form
    }

    fn f(&self, d2: T) -> T {
        match self.transform {
            Transform::Sqrt => d2.sqrt(),
            Transform::Log => d2.ln_1p(),
        }
    }

    fn f_prime(&self, d2: T) -> T {
        match self.transform {
            Transform::Sqrt if d2 > T::zero() => T::lit(0.5) / d2.sqrt(),
            // the cone tip has no derivative; 0 is the minimizing subgradient
            Transform::Sqrt => T::zero(),
            Transform::Log => T::one() / (T::one() + d2),
        }
    }

    /// Loss as a function of the (nonnegative) squared distance.
    pub fn apply(&self, d2: T) -> T {
        let d2 = d2.max(T::zero());
        match self.form {
            LossForm::Raw => d2,
            LossForm::Direct => self.f(d2),
            LossForm::Fitted => T::one() - T::one() / (self.tau + self.f(d2)),
        }
    }

    /// `d loss / d (d^2)`.
    pub fn derivative(&self, d2: T) -> T {
        let d2 = d2.max(T::zero());
        match self.form {
            LossForm::Raw => T::one(),
            LossForm::Direct => self.f_prime(d2),
            LossForm::Fitted => {
                let denom = self.tau + self.f(d2);
                self.f_prime(d2) / (denom * denom)
            }
        }
    }

    /// Value at a perfect prediction: `1 - 1/tau` for the fitted form, else 0.
    pub fn floor(&self) -> T {
        self.apply(T::zero())
    }

    /// Short identifier used for table columns, e.g. `gwd_sqrt_tau2_fitted`.
    pub fn column_name(&self) -> String {
        let t = match self.transform {
            Transform::Sqrt => "sqrt",
            Transform::Log => "log",
        };
        let form = match self.form {
            LossForm::Raw => return "gwd_raw".to_string(),
            LossForm::Fitted => "fitted",
            LossForm::Direct => return format!("gwd_{t}_direct"),
        };
        let tau = crate::geometry::format_number(self.tau.to_f64_lossy()).replace('.', "p");
        format!("gwd_{t}_tau{tau}_{form}")
    }
}

impl<T: Scalar> fmt::Display for LossConfig<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = match self.transform {
            Transform::Sqrt => "sqrt",
            Transform::Log => "log",
        };
        let form = match self.form {
            LossForm::Raw => "raw",
            LossForm::Fitted => "fitted",
            LossForm::Direct => "direct",
        };
        write!(f, "transform={t} tau={} form={form}", self.tau)
    }
}

impl<T: Scalar> FromStr for LossConfig<T> {
    type Err = Error;

    /// Parses `transform=sqrt|log tau=<float> form=raw|fitted|direct`; fields
    /// separated by whitespace or commas, any order, missing fields default.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidLossConfig(msg);
        let defaults = Self::default();
        let (mut transform, mut tau, mut form) = (defaults.transform, defaults.tau, defaults.form);
        for item in s
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
        {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got `{item}`")))?;
            match key.trim() {
                "transform" => {
                    transform = match value.trim() {
                        "sqrt" => Transform::Sqrt,
                        "log" => Transform::Log,
                        v => return Err(bad(format!("unknown transform `{v}`"))),
                    }
                }
                "tau" => {
                    let v: f64 = value
                        .trim()
                        .parse()
                        .map_err(|_| bad(format!("bad tau `{value}`")))?;
                    tau = T::lit(v);
                }
                "form" => {
                    form = match value.trim() {
                        "raw" => LossForm::Raw,
                        "fitted" => LossForm::Fitted,
                        "direct" => LossForm::Direct,
                        v => return Err(bad(format!("unknown form `{v}`"))),
                    }
                }
                k => return Err(bad(format!("unknown key `{k}`"))),
            }
        }
        Self::new(transform, tau, form)
    }
}

/// Weights of the detection objective. Only the regression term is evaluated
/// here; `lambda2` (classification) is carried for configuration parity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionWeights<T> {
    lambda1: T,
    lambda2: T,
}

impl<T: Scalar> Default for RegressionWeights<T> {
    fn default() -> Self {
        Self {
            lambda1: T::one(),
            lambda2: T::lit(2.0),
        }
    }
}

impl<T: Scalar> RegressionWeights<T> {
    pub fn new(lambda1: T, lambda2: T) -> Result<Self> {
        if !(lambda1 > T::zero() && lambda2 > T::zero())
            || !lambda1.is_finite()
            || !lambda2.is_finite()
        {
            return Err(Error::InvalidLossConfig(
                "weights must be positive and finite".into(),
            ));
        }
        Ok(Self { lambda1, lambda2 })
    }
    pub fn lambda1(&self) -> T {
        self.lambda1
    }
    pub fn lambda2(&self) -> T {
        self.lambda2
    }
}

pub fn gwd_loss<T: Scalar>(pred: &OrientedBox<T>, gt: &OrientedBox<T>, cfg: &LossConfig<T>) -> T {
    cfg.apply(gwd_squared(&box_to_gaussian(pred), &box_to_gaussian(gt)))
}

/// `lambda1` times the mean GWD loss over (prediction, ground truth) pairs,
/// all treated as foreground.
pub fn regression_objective<T: Scalar>(
    pairs: &[(OrientedBox<T>, OrientedBox<T>)],
    cfg: &LossConfig<T>,
    weights: &RegressionWeights<T>,
) -> Result<T> {
    if pairs.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let total: T = pairs.iter().map(|(p, g)| gwd_loss(p, g, cfg)).sum();
    Ok(weights.lambda1 * total / T::lit(pairs.len() as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_box, Convention};
    use proptest::prelude::*;

    fn lb(x: f64, y: f64, w: f64, h: f64, t: f64) -> OrientedBox<f64> {
        make_box(x, y, w, h, t, Convention::LongEdge).unwrap()
    }

    fn cfg(t: Transform, tau: f64, form: LossForm) -> LossConfig<f64> {
        LossConfig::new(t, tau, form).unwrap()
    }

    #[test]
    fn fitted_examples() {
        let b = lb(1.0, 1.0, 5.0, 2.0, 0.2);
        assert_eq!(
            gwd_loss(&b, &b, &cfg(Transform::Sqrt, 1.0, LossForm::Fitted)),
            0.0
        );
        assert_eq!(
            gwd_loss(&b, &b, &cfg(Transform::Sqrt, 2.0, LossForm::Fitted)),
            0.5
        );
        // d^2 = 4 from a pure mean shift
        let a = lb(0.0, 0.0, 4.0, 2.0, 0.0);
        let shifted = lb(2.0, 0.0, 4.0, 2.0, 0.0);
        let v = gwd_loss(&a, &shifted, &cfg(Transform::Sqrt, 2.0, LossForm::Fitted));
        assert!((v - 0.75).abs() < 1e-15);
    }

    #[test]
    fn raw_and_direct_forms() {
        assert_eq!(cfg(Transform::Sqrt, 1.0, LossForm::Raw).apply(9.0), 9.0);
        assert_eq!(cfg(Transform::Sqrt, 1.0, LossForm::Direct).apply(9.0), 3.0);
        assert!((cfg(Transform::Log, 1.0, LossForm::Direct).apply(3.0) - 4f64.ln()).abs() < 1e-15);
        assert_eq!(cfg(Transform::Log, 1.0, LossForm::Direct).apply(0.0), 0.0);
    }

    #[test]
    fn tau_below_one_rejected_for_fitted() {
        assert!(LossConfig::new(Transform::Sqrt, 0.5, LossForm::Fitted).is_err());
        assert!(LossConfig::new(Transform::Sqrt, 0.5, LossForm::Direct).is_ok());
        assert!(LossConfig::new(Transform::Sqrt, f64::NAN, LossForm::Raw).is_err());
    }

    #[test]
    fn parse_and_display() {
        let c: LossConfig<f64> = "transform=log tau=3 form=fitted".parse().unwrap();
        assert_eq!(c, cfg(Transform::Log, 3.0, LossForm::Fitted));
        let back: LossConfig<f64> = c.to_string().parse().unwrap();
        assert_eq!(back, c);
        let c: LossConfig<f64> = "form=direct,transform=sqrt".parse().unwrap();
        assert_eq!(c.form(), LossForm::Direct);
        assert!("transform=cube".parse::<LossConfig<f64>>().is_err());
        assert!("tau=0.5".parse::<LossConfig<f64>>().is_err());
        assert!("tau".parse::<LossConfig<f64>>().is_err());
    }

    #[test]
    fn column_names() {
        assert_eq!(
            LossConfig::<f64>::default().column_name(),
            "gwd_sqrt_tau2_fitted"
        );
        assert_eq!(
            cfg(Transform::Log, 1.5, LossForm::Fitted).column_name(),
            "gwd_log_tau1p5_fitted"
        );
    }

    #[test]
    fn objective_is_weighted_mean() {
        let a = lb(0.0, 0.0, 4.0, 2.0, 0.0);
        let b = lb(2.0, 0.0, 4.0, 2.0, 0.0);
        let c = cfg(Transform::Sqrt, 1.0, LossForm::Fitted);
        let w1 = RegressionWeights::default();
        assert_eq!(regression_objective(&[(a, a)], &c, &w1).unwrap(), 0.0);
        let l = gwd_loss(&b, &a, &c);
        let mean = regression_objective(&[(b, a), (a, a)], &c, &w1).unwrap();
        assert!((mean - l / 2.0).abs() < 1e-15);
        let w2 = RegressionWeights::new(2.0, 2.0).unwrap();
        assert!(
            (regression_objective(&[(b, a), (a, a)], &c, &w2).unwrap() - 2.0 * mean).abs() < 1e-15
        );
        assert!(matches!(
            regression_objective(&[], &c, &w1),
            Err(Error::EmptyBatch)
        ));
        assert!(RegressionWeights::new(0.0, 1.0).is_err());
    }

    fn any_cfg() -> impl Strategy<Value = LossConfig<f64>> {
        (any::<bool>(), 1.0..6.0f64, 0..3u8).prop_map(|(log, tau, form)| {
            let t = if log { Transform::Log } else { Transform::Sqrt };
            let f = [LossForm::Raw, LossForm::Fitted, LossForm::Direct][form as usize];
            LossConfig::new(t, tau, f).unwrap()
        })
    }

    proptest! {
        #[test]
        fn monotone_in_distance(c in any_cfg(), a in 0.0..1e4f64, b in 0.0..1e4f64) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(c.apply(lo) <= c.apply(hi));
        }

        #[test]
        fn fitted_range(tau in 1.0..10.0f64, d2 in 0.0..1e6f64, log in any::<bool>()) {
            let t = if log { Transform::Log } else { Transform::Sqrt };
            let c = LossConfig::fitted(t, tau).unwrap();
            let v = c.apply(d2);
            prop_assert!(v >= 1.0 - 1.0 / tau - 1e-15 && v < 1.0);
        }

        #[test]
        fn derivative_matches_difference_quotient(c in any_cfg(), d2 in 0.1..100.0f64) {
            let h = 1e-6 * d2;
            let fd = (c.apply(d2 + h) - c.apply(d2 - h)) / (2.0 * h);
            let an = c.derivative(d2);
            prop_assert!((fd - an).abs() <= 1e-6 * an.abs().max(1e-3));
        }
    }
}
