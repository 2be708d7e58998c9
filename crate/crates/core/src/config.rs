//! Suite configuration: a versioned TOML file with scalar settings, optional
//! per-identity tolerances, an optional parameter grid and explicit cases.
//!
//! ```toml
//! version = 1
//! seed = 42
//! n_points = 100
//! n_tangents = 8
//!
//! [tolerances]
//! default = 1e-10
//! "2.6.ix" = 1e-10
//!
//! [grid]
//! p = [1, 2, 3]
//! q = [2, 3, 4]
//! nu = ["plus", "minus", "alternating", "alternating-minus"]
//! eps = ["plus", "minus", "alternating", "alternating-minus"]
//! R = [0.5, 1.0, 2.0]
//! radius_pairs = [[1.0, 1.0], [0.5, 2.0], [2.0, 0.5]]
//!
//! [[case]]
//! p = 1
//! q = 2
//! nu = [1]
//! eps = [1, -1]
//! r = 1.0
//! r3 = 1.0
//! ```
//!
//! Grid cases come first, expanded with `p` outermost and `radius_pairs`
//! innermost; explicit `[[case]]` entries follow in file order. A radius pair
//! `(r, r3)` is rescaled so that `r^2 + r3^2 = R^2`. Without `radius_pairs`
//! the grid yields hypersphere-only cases.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::Result as GeomResult;
use crate::geometry::{BlockSwap, Sign};
use crate::submanifold::{Hypersphere, ProductOfSpheres};
use crate::verification::{Tolerances, CHAIN_ID, CODIM1_IDS, CODIM2_IDS, DEFAULT_TOL, EXAMPLE1_IDS, EXAMPLE2_IDS};

pub const CONFIG_VERSION: u32 = 1;

/// The grid exercised by the acceptance suite.
pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format `{other}` (expected json or csv)")),
        }
    }
}

/// Parameters of one verification case.
///
/// Either `R` alone (hypersphere only) or `r` and `r3` (product of spheres,
/// with the enclosing hypersphere of radius `sqrt(r^2 + r3^2)`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseDescriptor {
    pub p: usize,
    pub q: usize,
    pub nu: Vec<Sign>,
    pub eps: Vec<Sign>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub big_r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r3: Option<f64>,
}

impl CaseDescriptor {
    pub fn structure(&self) -> GeomResult<BlockSwap> {
        BlockSwap::new(self.nu.clone(), self.eps.clone())
    }

    pub fn product(&self) -> GeomResult<Option<ProductOfSpheres>> {
        match (self.r, self.r3) {
            (Some(r), Some(r3)) => ProductOfSpheres::new(self.p, self.q, r, r3).map(Some),
            _ => Ok(None),
        }
    }

    pub fn sphere(&self) -> GeomResult<Hypersphere> {
        let dim = 2 * self.p + self.q;
        match (self.big_r, self.r, self.r3) {
            (_, Some(r), Some(r3)) => Hypersphere::new(dim, r.hypot(r3)),
            (Some(big_r), _, _) => Hypersphere::new(dim, big_r),
            _ => Err(crate::error::Error::invalid("R", "missing radius")),
        }
    }

    fn validate(&self, at: &str) -> Result<(), ConfigError> {
        let field = |name: &str| format!("{at}.{name}");
        if self.p == 0 {
            return Err(ConfigError::field(field("p"), "must be at least 1"));
        }
        if self.q == 0 {
            return Err(ConfigError::field(field("q"), "must be at least 1"));
        }
        if self.nu.len() != self.p {
            return Err(ConfigError::field(
                field("nu"),
                format!("has {} signs but p = {}", self.nu.len(), self.p),
            ));
        }
        if self.eps.len() != self.q {
            return Err(ConfigError::field(
                field("eps"),
                format!("has {} signs but q = {}", self.eps.len(), self.q),
            ));
        }
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::field(field(name), format!("must be positive and finite, got {v}")))
            }
        };
        match (self.big_r, self.r, self.r3) {
            (Some(big_r), None, None) => positive("R", big_r),
            (None, Some(r), Some(r3)) => {
                positive("r", r)?;
                positive("r3", r3)?;
                if self.q < 2 {
                    return Err(ConfigError::field(field("q"), "product cases need q >= 2"));
                }
                Ok(())
            }
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                Err(ConfigError::field(field("R"), "give either R or (r, r3), not both"))
            }
            _ => Err(ConfigError::field(at.to_string(), "needs R or both r and r3")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub n_points: usize,
    pub n_tangents: usize,
    pub tolerances: Tolerances,
    pub cases: Vec<CaseDescriptor>,
    pub output: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    /// TOML syntax or type error; the message carries line and column.
    Syntax(String),
    Field { field: String, message: String },
}

impl ConfigError {
    fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Field {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Syntax(msg) => write!(f, "config parse error: {msg}"),
            ConfigError::Field { field, message } => write!(f, "config field `{field}`: {message}"),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignPattern {
    Plus,
    Minus,
    /// `+1, -1, +1, ...`
    Alternating,
    /// `-1, +1, -1, ...`
    AlternatingMinus,
}

impl SignPattern {
    pub fn expand(self, len: usize) -> Vec<Sign> {
        (0..len)
            .map(|k| match self {
                SignPattern::Plus => Sign::Plus,
                SignPattern::Minus => Sign::Minus,
                SignPattern::Alternating if k % 2 == 0 => Sign::Plus,
                SignPattern::Alternating => Sign::Minus,
                SignPattern::AlternatingMinus if k % 2 == 0 => Sign::Minus,
                SignPattern::AlternatingMinus => Sign::Plus,
            })
            .collect()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    p: Vec<usize>,
    q: Vec<usize>,
    nu: Vec<SignPattern>,
    eps: Vec<SignPattern>,
    #[serde(rename = "R")]
    big_r: Vec<f64>,
    #[serde(default)]
    radius_pairs: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    version: u32,
    seed: u64,
    #[serde(default = "default_points")]
    n_points: usize,
    #[serde(default = "default_tangents")]
    n_tangents: usize,
    #[serde(default)]
    format: Option<Format>,
    #[serde(default)]
    output: Option<PathBuf>,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    grid: Option<RawGrid>,
    #[serde(default, rename = "case")]
    cases: Vec<CaseDescriptor>,
}

fn default_points() -> usize {
    100
}

fn default_tangents() -> usize {
    8
}

fn known_identity(id: &str) -> bool {
    CODIM1_IDS.contains(&id)
        || CODIM2_IDS.contains(&id)
        || EXAMPLE1_IDS.contains(&id)
        || EXAMPLE2_IDS.contains(&id)
        || id == CHAIN_ID
}

fn expand_grid(grid: &RawGrid) -> Result<Vec<CaseDescriptor>, ConfigError> {
    if let Some(pairs) = &grid.radius_pairs {
        for (k, [r, r3]) in pairs.iter().enumerate() {
            if !(*r > 0.0 && r.is_finite() && *r3 > 0.0 && r3.is_finite()) {
                return Err(ConfigError::field(
                    format!("grid.radius_pairs[{k}]"),
                    "radii must be positive and finite",
                ));
            }
        }
    }
    let mut out = Vec::new();
    for &p in &grid.p {
        for &q in &grid.q {
            for nu in &grid.nu {
                for eps in &grid.eps {
                    for &big_r in &grid.big_r {
                        let base = CaseDescriptor {
                            p,
                            q,
                            nu: nu.expand(p),
                            eps: eps.expand(q),
                            big_r: Some(big_r),
                            r: None,
                            r3: None,
                        };
                        match &grid.radius_pairs {
                            None => out.push(base),
                            Some(pairs) => {
                                for &[r, r3] in pairs {
                                    let scale = big_r / r.hypot(r3);
                                    out.push(CaseDescriptor {
                                        big_r: None,
                                        r: Some(r * scale),
                                        r3: Some(r3 * scale),
                                        ..base.clone()
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    for (k, case) in out.iter().enumerate() {
        case.validate(&format!("grid[{k}]"))?;
    }
    Ok(out)
}

impl SuiteConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
        if raw.version != CONFIG_VERSION {
            return Err(ConfigError::field(
                "version",
                format!("unsupported version {} (expected {CONFIG_VERSION})", raw.version),
            ));
        }
        if raw.n_points == 0 {
            return Err(ConfigError::field("n_points", "must be at least 1"));
        }
        if raw.n_tangents == 0 {
            return Err(ConfigError::field("n_tangents", "must be at least 1"));
        }
        let mut tolerances = Tolerances::uniform(DEFAULT_TOL);
        if let Some(&d) = raw.tolerances.get("default") {
            tolerances = Tolerances::uniform(d);
        }
        for (key, &tol) in &raw.tolerances {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(ConfigError::field(
                    format!("tolerances.{key}"),
                    format!("must be positive and finite, got {tol}"),
                ));
            }
            if key == "default" {
                continue;
            }
            if !known_identity(key) {
                return Err(ConfigError::field(format!("tolerances.{key}"), "unknown identity id"));
            }
            tolerances = tolerances.with_override(key.clone(), tol);
        }
        let mut cases = match &raw.grid {
            Some(grid) => expand_grid(grid)?,
            None => Vec::new(),
        };
        for (k, case) in raw.cases.iter().enumerate() {
            case.validate(&format!("case[{k}]"))?;
        }
        cases.extend(raw.cases);
        Ok(SuiteConfig {
            seed: raw.seed,
            n_points: raw.n_points,
            n_tangents: raw.n_tangents,
            tolerances,
            cases,
            output: raw.output,
            format: raw.format.unwrap_or_default(),
        })
    }

    pub fn default_suite() -> Self {
        Self::parse(DEFAULT_CONFIG).expect("bundled config is valid")
    }
}
