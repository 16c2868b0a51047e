//! Experiment configuration: TOML text with every section optional except
//! where a command needs it. Unknown keys are rejected.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Label copied into every output.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Worker threads; never part of the digest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default)]
    pub group: GroupConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minus: Option<FamilyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plus: Option<FamilyConfig>,
    #[serde(default)]
    pub potential: PotentialConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine: Option<EngineConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<CountConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equidist: Option<EquidistConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limitset: Option<LimitsetConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selftest: Option<SelftestConfig>,
}

fn default_seed() -> u64 {
    1
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, tag = "preset", rename_all = "kebab-case")]
pub enum GroupConfig {
    Modular,
    /// Rank-2 Schottky group with radius-`radius` circles at `±center`, `±center·i`.
    SchottkySymmetric { center: f64, radius: f64 },
    /// Real unimodular matrices `[a, b, c, d]` acting on the upper half-plane.
    Matrices { generators: Vec<[f64; 4]> },
}

impl Default for GroupConfig {
    fn default() -> Self {
        GroupConfig::Modular
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "kebab-case")]
pub enum FamilyConfig {
    /// Horoball at infinity of height `level`, stabilized by `z ↦ z + period`.
    Cusp {
        #[serde(default = "one")]
        level: f64,
        #[serde(default = "one")]
        period: f64,
    },
    /// Axis of a hyperbolic matrix, with optional extra stabilizer matrices.
    Axis {
        matrix: [f64; 4],
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        extra: Vec<[f64; 4]>,
    },
    /// Orbit of the point `(x, y)` with finite stabilizer generators.
    Point {
        x: f64,
        y: f64,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        stabilizer: Vec<[f64; 4]>,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "kebab-case")]
pub enum PotentialConfig {
    Zero,
    Constant { sigma: f64 },
}

impl Default for PotentialConfig {
    fn default() -> Self {
        PotentialConfig::Zero
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EngineConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_bodies: Option<usize>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CountConfig {
    pub t_max: f64,
    /// Defaults to 24 evenly spaced points in `(t_max/2, t_max]`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub t_grid: Vec<f64>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EquidistConfig {
    /// Range of the perpendiculars whose feet and endpoint pairs are tested.
    pub t_max: f64,
    #[serde(default = "eight")]
    pub bins: usize,
    /// Flow times of the pushforward check (modular cusp only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flow_times: Vec<f64>,
    #[serde(default = "samples")]
    pub samples: usize,
}

fn eight() -> usize {
    8
}

fn samples() -> usize {
    100_000
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LimitsetConfig {
    /// Pieces of diameter at least `1/t_enumerated` are enumerated.
    pub t_enumerated: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub t_grid: Vec<f64>,
    /// Letter whose axis is translated around.
    #[serde(default)]
    pub letter: u16,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    /// Radius of the orbit ball for the comparison exponent; none skips it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbital_radius: Option<f64>,
    /// Caps of the orbit ball, defaults 10⁷ elements and words of length 4096.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_elements: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_word_len: Option<u32>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SelftestConfig {
    /// Criteria to run, all when empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub only: Vec<u32>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map(|s| line_col(text, s.start)).unzip();
            CliError::Config { key: unknown_key(e.message()), message: e.message().trim().to_string(), line, column }
        })?;
        cfg.validate(text)?;
        Ok(cfg)
    }

    /// Canonical TOML text: fixed section order and defaults spelled out.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical text without the worker count.
    pub fn digest(&self) -> String {
        let mut c = self.clone();
        c.workers = None;
        let h = Sha256::digest(c.canonical().as_bytes());
        h.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn validate(&self, text: &str) -> Result<(), CliError> {
        let range = |section: &str, key: &str, message: String| {
            let (line, column) = locate(text, section, key).unzip();
            Err(CliError::Config { key: Some(key.to_string()), message, line, column })
        };
        if self.workers == Some(0) {
            return range("", "workers", "workers must be at least 1".into());
        }
        match &self.group {
            GroupConfig::SchottkySymmetric { center, radius } => {
                if !(*radius > 0.0) {
                    return range("group", "radius", "radius must be positive".into());
                }
                if !(*center > 2f64.sqrt() * radius) {
                    return range("group", "center", "circles overlap; need center > √2·radius".into());
                }
            }
            GroupConfig::Matrices { generators } => {
                if generators.is_empty() {
                    return range("group", "generators", "at least one generator is required".into());
                }
                for m in generators {
                    if ((m[0] * m[3] - m[1] * m[2]) - 1.0).abs() > 1e-9 {
                        return range("group", "generators", format!("matrix {m:?} does not have determinant 1"));
                    }
                }
            }
            GroupConfig::Modular => {}
        }
        for (section, fam) in [("minus", &self.minus), ("plus", &self.plus)] {
            match fam {
                Some(FamilyConfig::Cusp { level, period }) => {
                    if !(*level > 0.0) {
                        return range(section, "level", "level must be positive".into());
                    }
                    if !(*period > 0.0) {
                        return range(section, "period", "period must be positive".into());
                    }
                }
                Some(FamilyConfig::Axis { matrix, .. }) => {
                    if !((matrix[0] + matrix[3]).abs() > 2.0) {
                        return range(section, "matrix", "axis matrix must be hyperbolic".into());
                    }
                }
                Some(FamilyConfig::Point { y, .. }) => {
                    if !(*y > 0.0) {
                        return range(section, "y", "point must lie in the upper half-plane".into());
                    }
                }
                None => {}
            }
        }
        if let Some(c) = &self.count {
            if !(c.t_max > 0.0) || !c.t_max.is_finite() {
                return range("count", "t_max", format!("t_max must be positive, got {}", c.t_max));
            }
            if c.t_grid.iter().any(|t| !(*t > 0.0) || *t > c.t_max) {
                return range("count", "t_grid", "grid points must lie in (0, t_max]".into());
            }
        }
        if let Some(e) = &self.equidist {
            if !(e.t_max > 0.0) || !e.t_max.is_finite() {
                return range("equidist", "t_max", format!("t_max must be positive, got {}", e.t_max));
            }
            if e.bins == 0 {
                return range("equidist", "bins", "bins must be positive".into());
            }
            if e.samples == 0 {
                return range("equidist", "samples", "samples must be positive".into());
            }
            if e.flow_times.iter().any(|t| !(*t >= 0.0)) {
                return range("equidist", "flow_times", "flow times must be nonnegative".into());
            }
        }
        if let Some(l) = &self.limitset {
            if !(l.t_enumerated > 0.0) || !l.t_enumerated.is_finite() {
                return range("limitset", "t_enumerated", "t_enumerated must be positive".into());
            }
            if l.t_grid.iter().any(|t| !(*t > 0.0) || *t > l.t_enumerated) {
                return range("limitset", "t_grid", "grid points must lie in (0, t_enumerated]".into());
            }
            if l.resolution.is_some_and(|r| r == 0 || r > orthocount_core::limitset::MAX_RESOLUTION) {
                return range("limitset", "resolution", "resolution must lie in 1..=4096".into());
            }
            if l.orbital_radius.is_some_and(|r| !(r > 0.0)) {
                return range("limitset", "orbital_radius", "orbital_radius must be positive".into());
            }
            if l.max_elements == Some(0) {
                return range("limitset", "max_elements", "max_elements must be positive".into());
            }
            if l.max_word_len == Some(0) {
                return range("limitset", "max_word_len", "max_word_len must be positive".into());
            }
        }
        if let Some(s) = &self.selftest {
            if s.only.iter().any(|k| !(1..=9).contains(k)) {
                return range("selftest", "only", "criteria are numbered 1 to 9".into());
            }
        }
        Ok(())
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

/// Line and column of `key = ...` inside `[section]` (top level for "").
fn locate(text: &str, section: &str, key: &str) -> Option<(usize, usize)> {
    let mut current = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_start();
        if let Some(rest) = line.strip_prefix('[') {
            current = rest.split(']').next().unwrap_or("").trim().to_string();
            continue;
        }
        if current == section {
            if let Some(rest) = line.strip_prefix(key) {
                if rest.trim_start().starts_with('=') {
                    return Some((i + 1, raw.len() - line.len() + 1));
                }
            }
        }
    }
    None
}

fn unknown_key(message: &str) -> Option<String> {
    let rest = message.split("unknown field `").nth(1)?;
    Some(rest.split('`').next()?.to_string())
}
