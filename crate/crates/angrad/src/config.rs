//! JSON experiment configuration.

use std::fmt;
use std::path::{Path, PathBuf};

use angrad_core::{RuleKind, StepsizeRule};
use serde::Deserialize;

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    QuadRandom,
    Pro2,
    Laplace,
    Uncon,
    Box,
    /// Five BB1 iterations on `diag{1, κ}` with and without the monotone step.
    Termination,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::QuadRandom => "quad-random",
            Suite::Pro2 => "pro2",
            Suite::Laplace => "laplace",
            Suite::Uncon => "uncon",
            Suite::Box => "box",
            Suite::Termination => "termination",
        }
    }

    fn is_quadratic(self) -> bool {
        !matches!(self, Suite::Uncon | Suite::Box)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Start {
    /// Every entry 10.
    Tens,
    /// Entries uniform in `[−10, 10]`, one draw per seed.
    Uniform,
}

/// Accepts `1e4` as well as `[1e4, 1e5]`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSpec {
    pub kind: String,
    #[serde(default)]
    pub tau1: Option<f64>,
    #[serde(default)]
    pub tau2: Option<f64>,
}

/// A resolved method: the stepsize rule and its column label.
#[derive(Debug, Clone, PartialEq)]
pub struct Method {
    pub rule: StepsizeRule,
    pub id: String,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id)
    }
}

fn parse_kind(s: &str) -> Option<RuleKind> {
    let upper = s.to_ascii_uppercase().replace('_', "-");
    if upper == "BB1-DZ-BASELINE" {
        return Some(RuleKind::Bb1DzBaseline);
    }
    RuleKind::parse(&upper)
}

impl MethodSpec {
    pub fn resolve(&self) -> Result<Method> {
        let kind = parse_kind(&self.kind)
            .ok_or_else(|| BenchError::Config(format!("unknown method kind `{}`", self.kind)))?;
        if !kind.is_adaptive() {
            if self.tau1.is_some() || self.tau2.is_some() {
                return Err(BenchError::Config(format!("{} takes no tau parameters", kind.name())));
            }
            return Ok(Method { rule: StepsizeRule::plain(kind), id: kind.name().to_string() });
        }
        let (Some(t1), Some(t2)) = (self.tau1, self.tau2) else {
            return Err(BenchError::Config(format!("{} needs tau1 and tau2", kind.name())));
        };
        let rule = StepsizeRule::new(kind, t1, t2)
            .map_err(|e| BenchError::Config(format!("{}: {e}", kind.name())))?;
        Ok(Method { rule, id: format!("{}({t1},{t2})", kind.name()) })
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub methods: Vec<MethodSpec>,
    #[serde(default)]
    pub n: Option<usize>,
    /// Condition numbers; for `termination` the values of `λ` in `diag{1, λ}`.
    #[serde(default)]
    pub kappa: Option<OneOrMany<f64>>,
    /// `log10 κ` for `pro2`, an alternative to `kappa`.
    #[serde(default)]
    pub ncond: Option<OneOrMany<f64>>,
    /// Interior nodes per axis for `laplace`.
    #[serde(default, rename = "N")]
    pub grid: Option<OneOrMany<usize>>,
    /// Spectral sets for `quad-random` (default 1 to 5).
    #[serde(default)]
    pub sets: Option<Vec<u8>>,
    /// Laplace variants `"a"` and/or `"b"` (default `"a"`).
    #[serde(default)]
    pub variants: Option<Vec<String>>,
    /// Starting point for `pro2` (default uniform).
    #[serde(default)]
    pub start: Option<Start>,
    #[serde(default)]
    pub eps: Vec<f64>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    pub max_iter: usize,
    pub output_dir: PathBuf,
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SuiteConfig = serde_json::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn resolved_methods(&self) -> Result<Vec<Method>> {
        self.methods.iter().map(MethodSpec::resolve).collect()
    }

    pub fn start(&self) -> Start {
        self.start.unwrap_or(Start::Uniform)
    }

    /// Condition numbers, taken from `kappa` or `10^ncond`.
    pub fn kappas(&self) -> Vec<f64> {
        match (&self.kappa, &self.ncond) {
            (Some(k), _) => k.to_vec(),
            (None, Some(nc)) => nc.to_vec().into_iter().map(|c| 10f64.powf(c)).collect(),
            _ => Vec::new(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.n.unwrap_or(1000)
    }

    pub fn tolerances(&self) -> Vec<f64> {
        if self.eps.is_empty() && matches!(self.suite, Suite::Uncon | Suite::Box) {
            vec![1e-6]
        } else {
            self.eps.clone()
        }
    }

    /// Deterministic suites run once with seed 0 when none are listed.
    pub fn seed_list(&self) -> Vec<u64> {
        if self.seeds.is_empty() {
            vec![0]
        } else {
            self.seeds.clone()
        }
    }

    fn validate(&self) -> Result<()> {
        let err = |m: &str| Err(BenchError::Config(format!("{}: {m}", self.suite.name())));
        if self.methods.is_empty() {
            return err("method list is empty");
        }
        if self.max_iter == 0 {
            return err("max_iter must be positive");
        }
        let methods = self.resolved_methods()?;
        for m in &methods {
            let k = m.rule.kind();
            if self.suite.is_quadratic() && k == RuleKind::Bb1DzBaseline {
                return err("BB1-DZ needs the uncon or box suite");
            }
            if !self.suite.is_quadratic() && k.requires_quadratic() {
                return Err(BenchError::Config(format!(
                    "{}: {} needs a quadratic suite",
                    self.suite.name(),
                    k.name()
                )));
            }
            if !self.suite.is_quadratic() && k == RuleKind::Bb2 {
                return err("BB2 is not available for general objectives");
            }
        }
        if self.suite != Suite::Termination {
            let eps = self.tolerances();
            if eps.is_empty() {
                return err("eps list is empty");
            }
            if eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
                return err("eps values must be positive");
            }
        }
        let random = match self.suite {
            Suite::QuadRandom | Suite::Termination => true,
            Suite::Pro2 => self.start() == Start::Uniform,
            _ => false,
        };
        if random && self.seeds.is_empty() {
            return err("seeds are required");
        }
        match self.suite {
            Suite::QuadRandom => {
                if self.kappas().is_empty() {
                    return err("kappa is required");
                }
                if let Some(sets) = &self.sets {
                    if sets.is_empty() || sets.iter().any(|s| !(1..=5).contains(s)) {
                        return err("sets must be drawn from 1..=5");
                    }
                }
            }
            Suite::Pro2 => {
                if self.n.is_none() {
                    return err("n is required");
                }
                if self.kappas().is_empty() {
                    return err("kappa or ncond is required");
                }
            }
            Suite::Laplace => {
                if self.grid.is_none() {
                    return err("N is required");
                }
                for v in self.variants.iter().flatten() {
                    if !matches!(v.to_ascii_lowercase().as_str(), "a" | "b") {
                        return err("variants are `a` or `b`");
                    }
                }
            }
            Suite::Termination => {
                if self.kappas().iter().any(|l| !(*l > 1.0)) || self.kappas().is_empty() {
                    return err("kappa lists the values of lambda, each above 1");
                }
            }
            Suite::Uncon | Suite::Box => {
                if self.dimension() < 2 || self.dimension() % 2 == 1 {
                    return err("n must be even and at least 2");
                }
            }
        }
        if self.kappas().iter().any(|k| !(*k > 1.0 && k.is_finite())) {
            return err("condition numbers must exceed 1");
        }
        Ok(())
    }
}
