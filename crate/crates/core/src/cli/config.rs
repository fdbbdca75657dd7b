//! `key = value` configuration files and the resolved experiment configuration.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::geometry::{Domain, Primitive};
use crate::quadrature::CubatureSpec;
use crate::young::{KernelSpec, TheoremCase, YoungFunction};

/// Entries of a configuration file in file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub entries: Vec<(String, String)>,
}

fn split_top_level(line: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut quoted, mut start) = (0i32, false, 0);
    for (i, ch) in line.char_indices() {
        match ch {
            '"' => quoted = !quoted,
            '(' if !quoted => depth += 1,
            ')' if !quoted => depth -= 1,
            ',' if !quoted && depth == 0 => {
                parts.push(&line[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&line[start..]);
    parts
}

impl ConfigFile {
    /// Parses `key = value` lines; `#` starts a comment, several pairs may share a line
    /// separated by top-level commas, and values may be double-quoted.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut first = true;
            for part in split_top_level(line) {
                let Some((k, v)) = part.split_once('=') else {
                    // continuation of a comma-separated list value
                    match entries.last_mut() {
                        Some((_, value)) if !first => {
                            let value: &mut String = value;
                            value.push(',');
                            value.push_str(part.trim());
                            continue;
                        }
                        _ => {
                            return Err(Error::Invalid(format!(
                                "config line {}: expected key = value, got '{raw}'",
                                n + 1
                            )))
                        }
                    }
                };
                first = false;
                let key = k.trim().replace('-', "_");
                let value = v.trim().trim_matches('"').to_string();
                if key.is_empty() {
                    return Err(Error::Invalid(format!("config line {}: empty key", n + 1)));
                }
                entries.push((key, value));
            }
        }
        Ok(ConfigFile { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    /// Last value given for `key`.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Every value given for `key`, in order.
    pub fn all(&self, key: &str) -> Vec<&str> {
        self.entries.iter().filter(|(k, _)| k == key).map(|(_, v)| v.as_str()).collect()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| k.as_str())
    }
}

/// Which pipeline to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    YoungInspect,
    KernelCheck,
    Rearrange,
    Seminorm,
    Counterexample,
    Compare,
    Classify,
}

impl Subcommand {
    pub fn label(self) -> &'static str {
        match self {
            Subcommand::YoungInspect => "young inspect",
            Subcommand::KernelCheck => "kernel check",
            Subcommand::Rearrange => "rearrange",
            Subcommand::Seminorm => "seminorm",
            Subcommand::Counterexample => "counterexample",
            Subcommand::Compare => "compare",
            Subcommand::Classify => "classify",
        }
    }
}

/// Raw overrides from the command line; `None` defers to the config file, then the default.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub domain: Option<String>,
    pub young: Option<String>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub c: Option<f64>,
    pub young_table: Option<PathBuf>,
    pub s: Option<f64>,
    pub kernel: Option<String>,
    pub dim: Option<usize>,
    pub resolution: Option<usize>,
    pub levels: Option<usize>,
    pub diag_depth: Option<usize>,
    pub truncation_radius: Option<f64>,
    pub tolerance: Option<f64>,
    pub threads: Option<usize>,
    pub epsilons: Option<String>,
    pub pass_factor: Option<f64>,
    pub ball_case: Option<bool>,
    pub case: Option<u8>,
    pub corpus: Vec<PathBuf>,
    pub input: Option<PathBuf>,
    pub region: Option<String>,
    pub r_max: Option<f64>,
    pub out: Option<PathBuf>,
}

const KNOWN_KEYS: &[&str] = &[
    "domain",
    "piece",
    "young",
    "p",
    "q",
    "c",
    "young_table",
    "s",
    "kernel",
    "dim",
    "resolution",
    "levels",
    "diag_depth",
    "truncation_radius",
    "tolerance",
    "threads",
    "epsilons",
    "pass_factor",
    "ball_case",
    "case",
    "corpus",
    "input",
    "region",
    "r_max",
    "out",
];

/// Integration region for the `seminorm` subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionChoice {
    Domain,
    FullSpace,
    Cross,
}

impl RegionChoice {
    fn parse(text: &str) -> Result<Self> {
        match text {
            "domain" => Ok(RegionChoice::Domain),
            "full" | "fullspace" | "full_space" => Ok(RegionChoice::FullSpace),
            "cross" => Ok(RegionChoice::Cross),
            other => Err(Error::Invalid(format!("unknown region '{other}' (domain, full, cross)"))),
        }
    }

    fn label(self) -> &'static str {
        match self {
            RegionChoice::Domain => "domain",
            RegionChoice::FullSpace => "full",
            RegionChoice::Cross => "cross",
        }
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub command: Subcommand,
    pub domain: Option<Domain>,
    pub young_name: String,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub c: Option<f64>,
    pub young_table: Option<PathBuf>,
    pub s: f64,
    pub kernel: String,
    pub dim: usize,
    pub resolution: usize,
    pub levels: usize,
    pub diag_depth: usize,
    pub truncation_radius: Option<f64>,
    pub tolerance: f64,
    pub threads: Option<usize>,
    pub epsilons: Option<Vec<f64>>,
    pub pass_factor: f64,
    pub ball_case: Option<bool>,
    pub case: TheoremCase,
    pub corpus: Vec<PathBuf>,
    pub input: Option<PathBuf>,
    pub region: RegionChoice,
    pub r_max: f64,
    pub out: PathBuf,
}

fn pick<T: std::str::FromStr>(cli: Option<T>, file: &ConfigFile, key: &str) -> Result<Option<T>> {
    if cli.is_some() {
        return Ok(cli);
    }
    match file.get(key) {
        None => Ok(None),
        Some(v) => {
            v.parse::<T>().map(Some).map_err(|_| Error::Invalid(format!("config key '{key}': cannot parse '{v}'")))
        }
    }
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| Error::Invalid(format!("cannot parse number '{t}' in list"))))
        .collect()
}

impl ExperimentConfig {
    /// Command line first, then the config file, then the documented default.
    pub fn resolve(command: Subcommand, cli: Overrides, file: &ConfigFile) -> Result<Self> {
        if let Some(unknown) = file.keys().find(|k| !KNOWN_KEYS.contains(k)) {
            return Err(Error::Invalid(format!("unknown config key '{unknown}'")));
        }
        let domain = match cli.domain.or_else(|| file.get("domain").map(str::to_string)) {
            Some(text) => Some(text.parse::<Domain>()?),
            None => {
                let pieces = file.all("piece");
                if pieces.is_empty() {
                    None
                } else {
                    Some(Domain::new(pieces.iter().map(|p| p.parse::<Primitive>()).collect::<Result<_>>()?)?)
                }
            }
        };
        let dim_override = pick(cli.dim, file, "dim")?;
        let dim = match (&domain, dim_override) {
            (Some(d), Some(n)) if d.dim() != n => {
                return Err(Error::Invalid(format!("dim = {n} conflicts with a {}-dimensional domain", d.dim())))
            }
            (Some(d), _) => d.dim(),
            (None, Some(n)) => n,
            (None, None) => 1,
        };
        let resolution = pick(cli.resolution, file, "resolution")?.unwrap_or(if dim == 1 { 256 } else { 48 });
        let epsilons = match cli.epsilons.or_else(|| file.get("epsilons").map(str::to_string)) {
            Some(text) => Some(parse_list(&text)?),
            None => None,
        };
        let case = TheoremCase::try_from(pick(cli.case, file, "case")?.unwrap_or(1))?;
        let corpus = if cli.corpus.is_empty() {
            file.all("corpus").into_iter().map(PathBuf::from).collect()
        } else {
            cli.corpus
        };
        let region = RegionChoice::parse(&pick(cli.region, file, "region")?.unwrap_or_else(|| "domain".into()))?;
        let config = ExperimentConfig {
            command,
            domain,
            young_name: pick(cli.young, file, "young")?.unwrap_or_else(|| "tp".into()),
            p: pick(cli.p, file, "p")?,
            q: pick(cli.q, file, "q")?,
            c: pick(cli.c, file, "c")?,
            young_table: pick(cli.young_table, file, "young_table")?,
            s: pick(cli.s, file, "s")?.unwrap_or(0.5),
            kernel: pick(cli.kernel, file, "kernel")?.unwrap_or_else(|| "fractional".into()),
            dim,
            resolution,
            levels: pick(cli.levels, file, "levels")?.unwrap_or(2),
            diag_depth: pick(cli.diag_depth, file, "diag_depth")?.unwrap_or(2),
            truncation_radius: pick(cli.truncation_radius, file, "truncation_radius")?,
            tolerance: pick(cli.tolerance, file, "tolerance")?.unwrap_or(1e-9),
            threads: pick(cli.threads, file, "threads")?,
            epsilons,
            pass_factor: pick(cli.pass_factor, file, "pass_factor")?.unwrap_or(3.0),
            ball_case: pick(cli.ball_case, file, "ball_case")?,
            case,
            corpus,
            input: pick(cli.input, file, "input")?,
            region,
            r_max: pick(cli.r_max, file, "r_max")?.unwrap_or(100.0),
            out: pick(cli.out, file, "out")?.unwrap_or_else(|| PathBuf::from("out")),
        };
        config.cubature()?;
        Ok(config)
    }

    pub fn cubature(&self) -> Result<CubatureSpec> {
        let spec = CubatureSpec {
            base_resolution: self.resolution,
            refinement_levels: self.levels,
            diag_split_depth: self.diag_depth,
            truncation_radius: self.truncation_radius,
            tolerance: self.tolerance,
            threads: self.threads,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn require_domain(&self) -> Result<&Domain> {
        self.domain
            .as_ref()
            .ok_or_else(|| Error::Invalid("a domain is required (--domain or `piece =` lines in --config)".into()))
    }

    /// The selected Young function with per-family parameter defaults.
    pub fn young(&self) -> Result<YoungFunction> {
        match self.young_name.as_str() {
            "tp" | "power" => YoungFunction::scaled_power(self.c.unwrap_or(1.0), self.p.unwrap_or(2.0)),
            "power_log" => YoungFunction::power_log(self.p.unwrap_or(3.0)),
            "power_over_log" => YoungFunction::power_over_log(self.p.unwrap_or(2.0)),
            "double_phase" => YoungFunction::double_phase(self.q.unwrap_or(2.0), self.p.unwrap_or(3.0)),
            "tabulated" => {
                let path = self
                    .young_table
                    .as_ref()
                    .ok_or_else(|| Error::Invalid("young = tabulated needs young_table = FILE".into()))?;
                let points = super::io::read_table(path)?;
                YoungFunction::tabulated(&points, None, None)
            }
            other => Err(Error::Invalid(format!(
                "unknown Young function '{other}' (tp, power_log, power_over_log, double_phase, tabulated)"
            ))),
        }
    }

    /// `fractional` (M = r^s, N = r^N), `constant` (M = 1) or `linear` (M = r).
    pub fn kernel(&self) -> Result<KernelSpec> {
        let n = self.dim as i32;
        match self.kernel.as_str() {
            "fractional" => KernelSpec::fractional(self.s, self.dim),
            "constant" => Ok(KernelSpec::general(
                "constant",
                std::sync::Arc::new(|_| 1.0),
                std::sync::Arc::new(move |r: f64| r.powi(n)),
            )),
            "linear" => Ok(KernelSpec::general(
                "linear",
                std::sync::Arc::new(|r| r),
                std::sync::Arc::new(move |r: f64| r.powi(n)),
            )),
            other => Err(Error::Invalid(format!("unknown kernel '{other}' (fractional, constant, linear)"))),
        }
    }

    /// Every setting that affects numbers, in config-file syntax.
    pub fn echo(&self) -> Vec<(String, String)> {
        let opt = |v: Option<f64>| v.map_or_else(|| "default".to_string(), |x| x.to_string());
        let mut out = vec![
            ("command".to_string(), self.command.label().to_string()),
            ("domain".into(), self.domain.as_ref().map_or_else(|| "none".into(), |d| d.to_string())),
            ("young".into(), self.young_name.clone()),
            ("p".into(), opt(self.p)),
            ("q".into(), opt(self.q)),
            ("c".into(), opt(self.c)),
            (
                "young_table".into(),
                self.young_table.as_ref().map_or_else(|| "none".into(), |p| p.display().to_string()),
            ),
            ("s".into(), self.s.to_string()),
            ("kernel".into(), self.kernel.clone()),
            ("dim".into(), self.dim.to_string()),
            ("resolution".into(), self.resolution.to_string()),
            ("levels".into(), self.levels.to_string()),
            ("diag_depth".into(), self.diag_depth.to_string()),
            ("truncation_radius".into(), opt(self.truncation_radius)),
            ("tolerance".into(), self.tolerance.to_string()),
            (
                "epsilons".into(),
                self.epsilons.as_ref().map_or_else(
                    || "default".into(),
                    |e| e.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
                ),
            ),
            ("pass_factor".into(), self.pass_factor.to_string()),
            ("ball_case".into(), self.ball_case.map_or_else(|| "auto".into(), |b| b.to_string())),
            ("case".into(), (self.case as u8).to_string()),
            ("region".into(), self.region.label().into()),
            ("r_max".into(), self.r_max.to_string()),
        ];
        for path in &self.corpus {
            out.push(("corpus".into(), path.display().to_string()));
        }
        if let Some(input) = &self.input {
            out.push(("input".into(), input.display().to_string()));
        }
        out
    }
}
