//! Built-in invariant suite behind the `selftest` verb. Seeded, so the
//! report is identical on every run.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gaussian::{
    box_to_gaussian, gwd_gradient, gwd_squared, gwd_squared_commutative, Gaussian2, SymMat2,
};
use crate::geometry::{convert_convention, make_box, BoxParams, Convention, OrientedBox};

const SEED: u64 = 0x6777_6473;
const BOXES: usize = 10_000;
const GRADIENT_PAIRS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SelfTestReport {
    pub checks: Vec<CheckResult>,
}

impl SelfTestReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for SelfTestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {}: {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        writeln!(f, "{passed}/{} checks passed", self.checks.len())
    }
}

fn random_params(rng: &mut ChaCha8Rng) -> BoxParams<f64> {
    BoxParams::new(
        rng.gen_range(-50.0..50.0),
        rng.gen_range(-50.0..50.0),
        rng.gen_range(1.0..100.0),
        rng.gen_range(1.0..100.0),
        rng.gen_range(-PI..PI),
    )
}

fn random_box(rng: &mut ChaCha8Rng) -> OrientedBox<f64> {
    let conv = if rng.gen_bool(0.5) {
        Convention::OpenCv
    } else {
        Convention::LongEdge
    };
    random_params(rng)
        .to_box(conv)
        .expect("sampled extents are positive")
}

fn root_gap(a: &SymMat2<f64>, b: &SymMat2<f64>) -> f64 {
    (a.a - b.a)
        .abs()
        .max((a.b - b.b).abs())
        .max((a.d - b.d).abs())
}

fn root_of(p: &BoxParams<f64>) -> SymMat2<f64> {
    Gaussian2::from_params(p)
        .expect("valid parameters")
        .sigma_root()
}

/// Exchanging the edges together with a quarter turn leaves the covariance
/// root unchanged.
fn edge_exchange(rng: &mut ChaCha8Rng) -> CheckResult {
    let worst = (0..BOXES)
        .map(|_| {
            let p = random_params(rng);
            let swapped = BoxParams::new(p.x, p.y, p.h, p.w, p.theta - FRAC_PI_2);
            root_gap(&root_of(&p), &root_of(&swapped))
        })
        .fold(0.0, f64::max);
    CheckResult {
        name: "edge exchange",
        passed: worst <= 1e-12,
        detail: format!("{BOXES} boxes, max root difference {worst:.3e}"),
    }
}

/// A half turn leaves the covariance root unchanged.
fn angle_period(rng: &mut ChaCha8Rng) -> CheckResult {
    let worst = (0..BOXES)
        .map(|_| {
            let p = random_params(rng);
            root_gap(
                &root_of(&p),
                &root_of(&BoxParams {
                    theta: p.theta + PI,
                    ..p
                }),
            )
        })
        .fold(0.0, f64::max);
    CheckResult {
        name: "angle period",
        passed: worst <= 1e-12,
        detail: format!("{BOXES} boxes, max root difference {worst:.3e}"),
    }
}

/// The long-edge ambiguity of near-square boxes vanishes as the edges meet:
/// the distance between a box and its quarter-turned copy shrinks with the
/// edge gap.
fn square_ladder(rng: &mut ChaCha8Rng) -> CheckResult {
    let theta = rng.gen_range(-FRAC_PI_2..FRAC_PI_2);
    let ladder: Vec<f64> = [10.0, 1.0, 0.1, 0.01]
        .iter()
        .map(|gap| {
            let p = BoxParams::new(0.0, 0.0, 1.0 + gap, 1.0, theta);
            let q = BoxParams {
                theta: theta - FRAC_PI_2,
                ..p
            };
            gwd_squared(
                &Gaussian2::from_params(&p).unwrap(),
                &Gaussian2::from_params(&q).unwrap(),
            )
        })
        .collect();
    let decreasing = ladder.windows(2).all(|w| w[1] < w[0]);
    let last = *ladder.last().unwrap();
    CheckResult {
        name: "near-square ladder",
        passed: decreasing && last < 1e-4,
        detail: format!(
            "gaps 10/1/0.1/0.01 give {}",
            ladder
                .iter()
                .map(|v| format!("{v:.3e}"))
                .collect::<Vec<_>>()
                .join(" > ")
        ),
    }
}

/// Axis-aligned pairs reduce to the closed-form centre/extent distance.
fn axis_aligned_reduction(rng: &mut ChaCha8Rng) -> CheckResult {
    let mut worst: f64 = 0.0;
    for _ in 0..BOXES {
        let mut axis_box = || {
            let conv = if rng.gen_bool(0.5) {
                Convention::OpenCv
            } else {
                Convention::LongEdge
            };
            let k = rng.gen_range(-2i32..2) as f64;
            make_box(
                rng.gen_range(-50.0..50.0),
                rng.gen_range(-50.0..50.0),
                rng.gen_range(1.0..100.0),
                rng.gen_range(1.0..100.0),
                k * FRAC_PI_2,
                conv,
            )
            .expect("sampled extents are positive")
        };
        let (b1, b2) = (axis_box(), axis_box());
        let general = gwd_squared(&box_to_gaussian(&b1), &box_to_gaussian(&b2));
        let closed = gwd_squared_commutative(&b1, &b2).expect("axis-aligned");
        worst = worst.max((general - closed).abs());
    }
    CheckResult {
        name: "axis-aligned reduction",
        passed: worst <= 1e-9,
        detail: format!("{BOXES} pairs, max difference {worst:.3e}"),
    }
}

/// Analytic gradient against central differences on the raw parameters.
fn gradient_check(rng: &mut ChaCha8Rng) -> CheckResult {
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    while checked < GRADIENT_PAIRS {
        let (b1, b2) = (random_box(rng), random_box(rng));
        let separated = |b: &OrientedBox<f64>| (b.w() - b.h()).abs() > 0.01 * b.w().max(b.h());
        if !separated(&b1) || !separated(&b2) {
            continue;
        }
        checked += 1;
        let g2 = box_to_gaussian(&b2);
        let analytic = gwd_gradient(&b1, &b2);
        let p = b1.params().to_array();
        for (i, &a) in analytic.iter().enumerate() {
            let h = 1e-6 * p[i].abs().max(1.0);
            let eval = |delta: f64| {
                let mut q = p;
                q[i] += delta;
                gwd_squared(
                    &Gaussian2::from_params(&BoxParams::from_array(q)).unwrap(),
                    &g2,
                )
            };
            let fd = (eval(h) - eval(-h)) / (2.0 * h);
            worst = worst.max((a - fd).abs() / a.abs().max(fd.abs()).max(1.0));
        }
    }
    CheckResult {
        name: "gradient",
        passed: worst <= 1e-5,
        detail: format!("{GRADIENT_PAIRS} pairs, max relative error {worst:.3e}"),
    }
}

/// Converting either box's convention does not change the distance.
fn convention_independence(rng: &mut ChaCha8Rng) -> CheckResult {
    let mut worst: f64 = 0.0;
    for _ in 0..BOXES {
        let (b1, b2) = (random_box(rng), random_box(rng));
        let base = gwd_squared(&box_to_gaussian(&b1), &box_to_gaussian(&b2));
        let c1 = convert_convention(&b1, b1.convention().other());
        let c2 = convert_convention(&b2, b2.convention().other());
        for (u, v) in [(&c1, &b2), (&b1, &c2), (&c1, &c2)] {
            let d = gwd_squared(&box_to_gaussian(u), &box_to_gaussian(v));
            worst = worst.max((d - base).abs() / base.max(1.0));
        }
    }
    CheckResult {
        name: "convention independence",
        passed: worst <= 1e-9,
        detail: format!("{BOXES} pairs, max relative difference {worst:.3e}"),
    }
}

pub fn run_selftest() -> SelfTestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let checks = vec![
        edge_exchange(&mut rng),
        angle_period(&mut rng),
        square_ladder(&mut rng),
        axis_aligned_reduction(&mut rng),
        gradient_check(&mut rng),
        convention_independence(&mut rng),
    ];
    SelfTestReport { checks }
}
