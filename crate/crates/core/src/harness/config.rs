//! Experiment config files.
//!
//! ```text
//! # comment
//! [angle]
//! experiment = sweep
//! kind = angle
//! base = 0,0,40,10,0,le
//! losses = transform=sqrt tau=2 form=fitted; smooth_l1; iou
//!
//! [case2_gwd]
//! experiment = descent
//! anchor = 0,0,70,10,-90,oc
//! gt = 0,0,10,70,-25,oc
//! loss = transform=sqrt tau=2 form=fitted
//! ```
//!
//! Each section writes `<name>.csv` (and `<name>.svg` for sweeps and
//! descents) into the output directory. Angles are in degrees.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::boundary::run_boundary_cases_with;
use super::descent::{run_descent, DescentLoss, DescentSpec};
use super::sweep::{run_sweep, LossColumn, SweepKind, SweepSpec};
use super::table::{emit_csv, emit_svg};
use crate::error::{Error, Result};
use crate::geometry::parse_box_literal;
use crate::loss::{LossConfig, SMOOTH_L1_BETA};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Sweep,
    Boundary,
    Descent,
}

impl FromStr for ExperimentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sweep" => Ok(ExperimentKind::Sweep),
            "boundary" => Ok(ExperimentKind::Boundary),
            "descent" => Ok(ExperimentKind::Descent),
            other => Err(Error::InvalidSpec(format!("unknown experiment `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    Sweep(SweepSpec),
    Boundary { loss: LossConfig<f64>, beta: f64 },
    Descent(DescentSpec),
}

impl Experiment {
    pub fn kind(&self) -> ExperimentKind {
        match self {
            Experiment::Sweep(_) => ExperimentKind::Sweep,
            Experiment::Boundary { .. } => ExperimentKind::Boundary,
            Experiment::Descent(_) => ExperimentKind::Descent,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub experiment: Experiment,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct HarnessConfig {
    pub sections: Vec<Section>,
}

struct RawSection {
    name: String,
    line: usize,
    keys: BTreeMap<String, (usize, String)>,
}

impl RawSection {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.keys.remove(key)
    }

    fn parse<T>(&mut self, key: &str, f: impl FnOnce(&str) -> Result<T>) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => f(&v).map(Some).map_err(|e| Error::Config {
                line,
                reason: format!("{key}: {e}"),
            }),
        }
    }

    fn require<T>(&mut self, key: &str, f: impl FnOnce(&str) -> Result<T>) -> Result<T> {
        let line = self.line;
        self.parse(key, f)?.ok_or_else(|| Error::Config {
            line,
            reason: format!("missing key `{key}`"),
        })
    }

    fn finish(self) -> Result<()> {
        match self.keys.into_iter().next() {
            None => Ok(()),
            Some((k, (line, _))) => Err(Error::Config {
                line,
                reason: format!("unknown key `{k}`"),
            }),
        }
    }
}

fn number(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::InvalidSpec(format!("`{s}` is not a finite number")))
}

fn count(s: &str) -> Result<usize> {
    s.parse::<usize>()
        .map_err(|_| Error::InvalidSpec(format!("`{s}` is not a non-negative integer")))
}

fn descent_loss(s: &str, beta: f64) -> Result<DescentLoss> {
    match s {
        "smooth_l1" | "smoothl1" => Ok(DescentLoss::SmoothL1 { beta }),
        other => Ok(DescentLoss::Gwd(other.parse()?)),
    }
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn split_sections(text: &str) -> Result<Vec<RawSection>> {
    let mut sections: Vec<RawSection> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .map(str::trim)
                .filter(|n| valid_name(n))
                .ok_or_else(|| Error::Config {
                    line,
                    reason: "section header must be `[name]` with [A-Za-z0-9_-]".into(),
                })?;
            if sections.iter().any(|s| s.name == name) {
                return Err(Error::Config {
                    line,
                    reason: format!("duplicate section `{name}`"),
                });
            }
            sections.push(RawSection {
                name: name.into(),
                line,
                keys: BTreeMap::new(),
            });
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
            line,
            reason: "expected `key = value`".into(),
        })?;
        let section = sections.last_mut().ok_or_else(|| Error::Config {
            line,
            reason: "key outside of a section".into(),
        })?;
        let key = key.trim().to_string();
        if section
            .keys
            .insert(key.clone(), (line, value.trim().to_string()))
            .is_some()
        {
            return Err(Error::Config {
                line,
                reason: format!("duplicate key `{key}`"),
            });
        }
    }
    Ok(sections)
}

fn build_sweep(raw: &mut RawSection) -> Result<SweepSpec> {
    let kind: SweepKind = raw.require("kind", str::parse)?;
    let mut spec = SweepSpec::default_for(kind);
    if let Some(b) = raw.parse("base", parse_box_literal)? {
        spec.base_box = b;
        if kind == SweepKind::CenterShift {
            spec.stop = 3.0 * b.w().hypot(b.h());
        }
    }
    if let Some(v) = raw.parse("start", number)? {
        spec.start = v;
    }
    if let Some(v) = raw.parse("stop", number)? {
        spec.stop = v;
    }
    if let Some(v) = raw.parse("steps", count)? {
        spec.steps = v;
    }
    if let Some(v) = raw.parse("losses", |s| {
        s.split(';')
            .map(str::parse)
            .collect::<Result<Vec<LossColumn>>>()
    })? {
        spec.losses = v;
    }
    if let Some(v) = raw.parse("relative_angle", number)? {
        spec.relative_angle = v.to_radians();
    }
    if let Some(v) = raw.parse("direction", number)? {
        spec.shift_direction = v.to_radians();
    }
    if let Some(v) = raw.parse("beta", number)? {
        spec.beta = v;
    }
    let line = raw.line;
    spec.validate().map_err(|e| Error::Config {
        line,
        reason: e.to_string(),
    })?;
    Ok(spec)
}

fn build_descent(raw: &mut RawSection) -> Result<DescentSpec> {
    let beta = raw.parse("beta", number)?.unwrap_or(SMOOTH_L1_BETA);
    let loss = raw
        .parse("loss", |s| descent_loss(s, beta))?
        .unwrap_or(DescentLoss::Gwd(LossConfig::default()));
    let mut spec = DescentSpec::boundary_case2(loss);
    if let Some(b) = raw.parse("anchor", parse_box_literal)? {
        spec.anchor = b;
    }
    if let Some(b) = raw.parse("gt", parse_box_literal)? {
        spec.ground_truth = b;
    }
    if let Some(v) = raw.parse("lr", number)? {
        spec.learning_rate = v;
    }
    if let Some(v) = raw.parse("iters", count)? {
        spec.max_iters = v;
    }
    if let Some(v) = raw.parse("record_every", count)? {
        spec.record_every = v;
    }
    let line = raw.line;
    spec.validate().map_err(|e| Error::Config {
        line,
        reason: e.to_string(),
    })?;
    Ok(spec)
}

pub fn parse_config(text: &str) -> Result<HarnessConfig> {
    let mut sections = Vec::new();
    for mut raw in split_sections(text)? {
        let kind: ExperimentKind = raw.require("experiment", str::parse)?;
        let experiment = match kind {
            ExperimentKind::Sweep => Experiment::Sweep(build_sweep(&mut raw)?),
            ExperimentKind::Descent => Experiment::Descent(build_descent(&mut raw)?),
            ExperimentKind::Boundary => Experiment::Boundary {
                loss: raw.parse("loss", str::parse)?.unwrap_or_default(),
                beta: raw.parse("beta", number)?.unwrap_or(SMOOTH_L1_BETA),
            },
        };
        let name = raw.name.clone();
        raw.finish()?;
        sections.push(Section { name, experiment });
    }
    Ok(HarnessConfig { sections })
}

pub fn load_config(path: &Path) -> Result<HarnessConfig> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs every section (or only those of `only`'s kind) and returns the
/// files written, in order.
pub fn run_config(
    config: &HarnessConfig,
    out_dir: &Path,
    only: Option<ExperimentKind>,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for section in &config.sections {
        if only.is_some_and(|k| k != section.experiment.kind()) {
            continue;
        }
        let csv = out_dir.join(format!("{}.csv", section.name));
        let svg = out_dir.join(format!("{}.svg", section.name));
        match &section.experiment {
            Experiment::Sweep(spec) => {
                let table = run_sweep(spec)?;
                emit_csv(&table, &csv)?;
                emit_svg(&table, &svg)?;
                written.extend([csv, svg]);
            }
            Experiment::Descent(spec) => {
                let table = run_descent(spec)?.to_table();
                emit_csv(&table, &csv)?;
                emit_svg(&table.select(&["step", "loss", "iou"]), &svg)?;
                written.extend([csv, svg]);
            }
            Experiment::Boundary { loss, beta } => {
                write_text(&csv, &run_boundary_cases_with(loss, *beta)?.to_csv()?)?;
                written.push(csv);
            }
        }
    }
    Ok(written)
}
