use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gwd_core::geometry::{format_box_literal, parse_box_literal};
use gwd_core::harness::{load_config, run_config, run_selftest, ExperimentKind};
use gwd_core::{
    box_to_gaussian, convert_convention, gwd_loss, gwd_squared, rotated_iou, Convention, Error,
    LossConfig, LossForm, OrientedBox, Transform,
};

/// Rotated boxes as Gaussians: one-shot computations and loss experiments.
///
/// Boxes are written `x,y,w,h,theta_deg[,oc|le]` (OpenCV convention by default).
#[derive(Debug, Parser)]
#[command(name = "gwd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact IoU of two rotated boxes.
    Iou {
        #[arg(value_parser = parse_box, allow_hyphen_values = true)]
        a: OrientedBox<f64>,
        #[arg(value_parser = parse_box, allow_hyphen_values = true)]
        b: OrientedBox<f64>,
    },
    /// Squared Gaussian Wasserstein distance of two boxes.
    Gwd {
        #[arg(value_parser = parse_box, allow_hyphen_values = true)]
        a: OrientedBox<f64>,
        #[arg(value_parser = parse_box, allow_hyphen_values = true)]
        b: OrientedBox<f64>,
    },
    /// GWD loss of a prediction against a ground truth.
    Loss {
        #[arg(value_parser = parse_box, allow_hyphen_values = true)]
        pred: OrientedBox<f64>,
        #[arg(value_parser = parse_box, allow_hyphen_values = true)]
        gt: OrientedBox<f64>,
        #[arg(long, value_enum, default_value_t = TransformArg::Sqrt)]
        transform: TransformArg,
        #[arg(long, default_value_t = 2.0)]
        tau: f64,
        #[arg(long, value_enum, default_value_t = FormArg::Fitted)]
        form: FormArg,
    },
    /// Rewrites a box in the other angle convention.
    Convert {
        #[arg(value_parser = parse_box, allow_hyphen_values = true)]
        bbox: OrientedBox<f64>,
        #[arg(long, value_enum)]
        to: ConventionArg,
    },
    /// Runs the sweep sections of a config file.
    Sweep(RunArgs),
    /// Runs the boundary sections of a config file.
    Boundary(RunArgs),
    /// Runs the descent sections of a config file.
    Descent(RunArgs),
    /// Runs the built-in invariant checks.
    Selftest,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TransformArg {
    Sqrt,
    Log,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormArg {
    Raw,
    Fitted,
    Direct,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConventionArg {
    Oc,
    Le,
}

fn parse_box(s: &str) -> Result<OrientedBox<f64>, String> {
    parse_box_literal(s).map_err(|e| e.to_string())
}

fn fixed(v: f64) -> String {
    format!("{v:.6}")
}

fn run_experiments(args: &RunArgs, kind: ExperimentKind) -> Result<String, Error> {
    let config = load_config(&args.config)?;
    let written = run_config(&config, &args.out, Some(kind))?;
    Ok(written
        .iter()
        .map(|p| format!("{}\n", p.display()))
        .collect())
}

/// Returns the text for standard output and whether the command succeeded.
fn execute(command: Command) -> Result<(String, bool), Error> {
    let line = |s: String| Ok((s + "\n", true));
    match command {
        Command::Iou { a, b } => line(fixed(rotated_iou(&a, &b))),
        Command::Gwd { a, b } => line(fixed(gwd_squared(
            &box_to_gaussian(&a),
            &box_to_gaussian(&b),
        ))),
        Command::Loss {
            pred,
            gt,
            transform,
            tau,
            form,
        } => {
            let transform = match transform {
                TransformArg::Sqrt => Transform::Sqrt,
                TransformArg::Log => Transform::Log,
            };
            let form = match form {
                FormArg::Raw => LossForm::Raw,
                FormArg::Fitted => LossForm::Fitted,
                FormArg::Direct => LossForm::Direct,
            };
            let cfg = LossConfig::new(transform, tau, form)?;
            line(fixed(gwd_loss(&pred, &gt, &cfg)))
        }
        Command::Convert { bbox, to } => {
            let target = match to {
                ConventionArg::Oc => Convention::OpenCv,
                ConventionArg::Le => Convention::LongEdge,
            };
            line(format_box_literal(&convert_convention(&bbox, target)))
        }
        Command::Sweep(args) => Ok((run_experiments(&args, ExperimentKind::Sweep)?, true)),
        Command::Boundary(args) => Ok((run_experiments(&args, ExperimentKind::Boundary)?, true)),
        Command::Descent(args) => Ok((run_experiments(&args, ExperimentKind::Descent)?, true)),
        Command::Selftest => {
            let report = run_selftest();
            Ok((report.to_string(), report.all_passed()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok((out, ok)) => {
            print!("{out}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        // a malformed config file is a usage problem, like a malformed argument
        Err(e @ Error::Config { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
