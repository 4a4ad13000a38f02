//! Experiment configuration files and the driver behind the `fracdiff` binary.
//!
//! Configuration is line-oriented `key = value` with `#` comments:
//!
//! ```text
//! preset = custom
//! alpha = 0.3, 0.7
//! final_time = 1
//! cells = 128
//! tau_list = 1/50, 1/100, 1/200
//! coeff.kind = power
//! coeff.scale = 1
//! coeff.exponent = 1.01
//! w0.kind = chi
//! w0.a = 0.5
//! w0.b = 1
//! source.kind = chi
//! source.exponent = 0.1
//! source.a = 0
//! source.b = 0.5
//! output = results.csv
//! ```
//!
//! Presets (`table1`, `table2`, `table3`, `oracle`) accept only `alpha` and
//! `output`. A custom temporal study gives `cells` and `tau_list`, a custom
//! spatial study `steps` and `h_list`. Numbers may be written as fractions
//! `p/q`; `alpha`, `tau_list` and `h_list` take comma-separated lists.
use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use crate::experiments::{
    halving_counts, oracle_study, presets, render_console, spatial_study, temporal_study,
    write_csv, RateTable,
};
use crate::fem1d::PiecewiseFn;
use crate::solver::{CoefficientLaw, ProblemSpec, SourceTerm, TimeProfile};
use crate::{Error, Result};

const KNOWN_KEYS: &[&str] = &[
    "preset",
    "alpha",
    "final_time",
    "cells",
    "steps",
    "tau_list",
    "h_list",
    "coeff.kind",
    "coeff.scale",
    "coeff.exponent",
    "w0.kind",
    "w0.a",
    "w0.b",
    "w0.mode",
    "w0.smooth",
    "source.kind",
    "source.exponent",
    "source.a",
    "source.b",
    "output",
];

/// A validation problem, tied to a line of the configuration when known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PresetName {
    Table1,
    Table2,
    Table3,
    Oracle,
    Custom,
}

impl PresetName {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "table1" => Some(PresetName::Table1),
            "table2" => Some(PresetName::Table2),
            "table3" => Some(PresetName::Table3),
            "oracle" => Some(PresetName::Oracle),
            "custom" => Some(PresetName::Custom),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PresetName::Table1 => "table1",
            PresetName::Table2 => "table2",
            PresetName::Table3 => "table3",
            PresetName::Oracle => "oracle",
            PresetName::Custom => "custom",
        }
    }

    fn default_alphas(&self) -> &'static [f64] {
        match self {
            PresetName::Table1 => &presets::TABLE1_ALPHAS,
            PresetName::Table2 => &presets::TABLE2_ALPHAS,
            PresetName::Table3 => &presets::TABLE3_ALPHAS,
            PresetName::Oracle => &presets::ORACLE_ALPHAS,
            PresetName::Custom => &[],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Sweep {
    Temporal { cells: usize, taus: Vec<f64> },
    Spatial { steps: usize, hs: Vec<f64> },
}

/// Fully validated custom study (one problem per α).
#[derive(Clone, Debug, PartialEq)]
pub struct CustomStudy {
    pub final_time: f64,
    pub coefficient: CoefficientLaw<f64>,
    pub w0: PiecewiseFn<f64>,
    pub source: SourceTerm<f64>,
    pub sweep: Sweep,
}

impl CustomStudy {
    pub fn problem(&self, alpha: f64) -> Result<ProblemSpec<f64>> {
        ProblemSpec::new(
            alpha,
            self.final_time,
            self.coefficient,
            self.w0.clone(),
            self.source.clone(),
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub preset: PresetName,
    pub alphas: Vec<f64>,
    pub custom: Option<CustomStudy>,
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug)]
struct Entry {
    line: usize,
    value: String,
}

struct Parser {
    entries: BTreeMap<String, Entry>,
    errors: Vec<ConfigError>,
}

fn parse_number(text: &str) -> Option<f64> {
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p: f64 = p.trim().parse().ok()?;
        let q: f64 = q.trim().parse().ok()?;
        if q == 0.0 {
            return None;
        }
        return Some(p / q).filter(|v| v.is_finite());
    }
    text.parse::<f64>().ok().filter(|v| v.is_finite())
}

impl Parser {
    fn new(text: &str) -> Self {
        let mut entries = BTreeMap::new();
        let mut errors = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                errors.push(ConfigError {
                    line: Some(line),
                    message: format!("expected `key = value`, got {content:?}"),
                });
                continue;
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                errors.push(ConfigError {
                    line: Some(line),
                    message: format!("unknown key `{key}`"),
                });
                continue;
            }
            if let Some(prev) = entries.get(&key) {
                let prev: &Entry = prev;
                errors.push(ConfigError {
                    line: Some(line),
                    message: format!("duplicate key `{key}` (first set on line {})", prev.line),
                });
                continue;
            }
            entries.insert(key, Entry { line, value });
        }
        Parser { entries, errors }
    }

    fn error(&mut self, line: Option<usize>, message: impl Into<String>) {
        self.errors.push(ConfigError {
            line,
            message: message.into(),
        });
    }

    fn line_of(&self, key: &str) -> Option<usize> {
        self.entries.get(key).map(|e| e.line)
    }

    fn text(&self, key: &str) -> Option<String> {
        self.entries.get(key).map(|e| e.value.clone())
    }

    fn number(&mut self, key: &str) -> Option<f64> {
        let entry = self.entries.get(key)?.clone();
        match parse_number(&entry.value) {
            Some(v) => Some(v),
            None => {
                self.error(
                    Some(entry.line),
                    format!("`{key}`: malformed number {:?}", entry.value),
                );
                None
            }
        }
    }

    fn required_number(&mut self, key: &str, context: &str) -> Option<f64> {
        if !self.entries.contains_key(key) {
            self.error(None, format!("`{key}` is required {context}"));
            return None;
        }
        self.number(key)
    }

    fn list(&mut self, key: &str) -> Option<Vec<f64>> {
        let entry = self.entries.get(key)?.clone();
        let mut out = Vec::new();
        let mut ok = true;
        for item in entry.value.split(',') {
            match parse_number(item) {
                Some(v) => out.push(v),
                None => {
                    self.error(
                        Some(entry.line),
                        format!("`{key}`: malformed number {:?}", item.trim()),
                    );
                    ok = false;
                }
            }
        }
        ok.then_some(out)
    }

    fn count(&mut self, key: &str) -> Option<usize> {
        let entry = self.entries.get(key)?.clone();
        match entry.value.parse::<usize>() {
            Ok(v) => Some(v),
            Err(_) => {
                self.error(
                    Some(entry.line),
                    format!(
                        "`{key}`: expected a positive integer, got {:?}",
                        entry.value
                    ),
                );
                None
            }
        }
    }

    fn flag(&mut self, key: &str) -> Option<bool> {
        let entry = self.entries.get(key)?.clone();
        match entry.value.as_str() {
            "true" | "yes" | "1" => Some(true),
            "false" | "no" | "0" => Some(false),
            other => {
                self.error(
                    Some(entry.line),
                    format!("`{key}`: expected true or false, got {other:?}"),
                );
                None
            }
        }
    }
}

fn check_alpha(parser: &mut Parser, alphas: &[f64]) {
    let line = parser.line_of("alpha");
    for &a in alphas {
        if !(a > 0.0 && a <= 1.0) {
            parser.error(line, format!("alpha must lie in (0,1], got {a}"));
        }
    }
}

fn parse_interval(parser: &mut Parser, prefix: &str) -> Option<PiecewiseFn<f64>> {
    let a_key = format!("{prefix}.a");
    let b_key = format!("{prefix}.b");
    let a = parser.required_number(&a_key, &format!("for {prefix}.kind = chi"));
    let b = parser.required_number(&b_key, &format!("for {prefix}.kind = chi"));
    let (a, b) = (a?, b?);
    match PiecewiseFn::characteristic(a, b) {
        Ok(f) => Some(f),
        Err(e) => {
            let line = parser.line_of(&a_key).or(parser.line_of(&b_key));
            parser.error(line, format!("{prefix}: {e}"));
            None
        }
    }
}

fn parse_coefficient(parser: &mut Parser) -> Option<CoefficientLaw<f64>> {
    let kind = parser.text("coeff.kind");
    let line = parser.line_of("coeff.kind");
    let scale = parser.number("coeff.scale").unwrap_or(1.0);
    if !(scale >= 0.0) {
        parser.error(
            parser.line_of("coeff.scale"),
            "coeff.scale must be nonnegative",
        );
    }
    match kind.as_deref() {
        None => {
            parser.error(None, "`coeff.kind` is required for preset = custom");
            None
        }
        Some("constant") => Some(CoefficientLaw::constant(scale)),
        Some("power") => {
            let exponent = parser.required_number("coeff.exponent", "for coeff.kind = power")?;
            if !(exponent >= 0.0) {
                parser.error(
                    parser.line_of("coeff.exponent"),
                    "coeff.exponent must be nonnegative",
                );
                return None;
            }
            Some(CoefficientLaw::power(scale, exponent))
        }
        Some(other) => {
            parser.error(
                line,
                format!("coeff.kind must be constant or power, got {other:?}"),
            );
            None
        }
    }
}

fn parse_initial(parser: &mut Parser) -> Option<PiecewiseFn<f64>> {
    let kind = parser.text("w0.kind").unwrap_or_else(|| "zero".into());
    let smooth = parser.flag("w0.smooth");
    let w0 = match kind.as_str() {
        "zero" => PiecewiseFn::zero(),
        "chi" => parse_interval(parser, "w0")?,
        "sine" => {
            let mode = parser.required_number("w0.mode", "for w0.kind = sine")?;
            if !(mode >= 1.0 && mode.fract() == 0.0 && mode <= u32::MAX as f64) {
                parser.error(
                    parser.line_of("w0.mode"),
                    "w0.mode must be a positive integer",
                );
                return None;
            }
            PiecewiseFn::sine(mode as u32)
        }
        other => {
            parser.error(
                parser.line_of("w0.kind"),
                format!("w0.kind must be zero, chi or sine, got {other:?}"),
            );
            return None;
        }
    };
    let w0 = match smooth {
        Some(flag) => w0.with_smooth(flag),
        None => w0,
    };
    if w0.is_smooth() && !w0.has_derivative() {
        parser.error(
            parser.line_of("w0.smooth"),
            "w0.smooth = true needs a continuous initial datum (Ritz projection)",
        );
        return None;
    }
    Some(w0)
}

fn parse_source(parser: &mut Parser) -> Option<SourceTerm<f64>> {
    let kind = parser.text("source.kind").unwrap_or_else(|| "zero".into());
    match kind.as_str() {
        "zero" => Some(SourceTerm::zero()),
        "chi" => {
            let exponent = parser.number("source.exponent").unwrap_or(0.0);
            if !(exponent >= 0.0) {
                parser.error(
                    parser.line_of("source.exponent"),
                    "source.exponent must be nonnegative",
                );
                return None;
            }
            let space = parse_interval(parser, "source")?;
            Some(SourceTerm::separable(
                TimeProfile::power(1.0, exponent),
                space,
            ))
        }
        other => {
            parser.error(
                parser.line_of("source.kind"),
                format!("source.kind must be zero or chi, got {other:?}"),
            );
            None
        }
    }
}

fn check_halving(parser: &mut Parser, key: &str, values: &[f64], span: f64) {
    if let Err(e) = halving_counts(key, values, span) {
        parser.error(parser.line_of(key), e.to_string());
    }
}

fn parse_custom(parser: &mut Parser) -> Option<CustomStudy> {
    let final_time = parser.required_number("final_time", "for preset = custom");
    if let Some(t) = final_time {
        if !(t > 0.0) {
            parser.error(parser.line_of("final_time"), "final_time must be positive");
        }
    }
    let coefficient = parse_coefficient(parser);
    let w0 = parse_initial(parser);
    let source = parse_source(parser);

    let has_temporal =
        parser.entries.contains_key("tau_list") || parser.entries.contains_key("cells");
    let has_spatial = parser.entries.contains_key("h_list") || parser.entries.contains_key("steps");
    let sweep = match (has_temporal, has_spatial) {
        (true, false) => {
            let cells = parser.count("cells");
            if !parser.entries.contains_key("cells") {
                parser.error(None, "`cells` is required with tau_list");
            }
            if !parser.entries.contains_key("tau_list") {
                parser.error(None, "`tau_list` is required with cells");
            }
            let taus = parser.list("tau_list");
            if let Some(c) = cells {
                if c < 2 {
                    parser.error(parser.line_of("cells"), "cells must be at least 2");
                }
            }
            if let (Some(t), Some(taus)) = (final_time, &taus) {
                if t > 0.0 {
                    check_halving(parser, "tau_list", taus, t);
                }
            }
            Some(Sweep::Temporal {
                cells: cells?,
                taus: taus?,
            })
        }
        (false, true) => {
            let steps = parser.count("steps");
            if !parser.entries.contains_key("steps") {
                parser.error(None, "`steps` is required with h_list");
            }
            if !parser.entries.contains_key("h_list") {
                parser.error(None, "`h_list` is required with steps");
            }
            let hs = parser.list("h_list");
            if steps == Some(0) {
                parser.error(parser.line_of("steps"), "steps must be at least 1");
            }
            if let Some(hs) = &hs {
                check_halving(parser, "h_list", hs, 1.0);
                if hs.iter().any(|&h| h > 0.5) {
                    parser.error(
                        parser.line_of("h_list"),
                        "h_list entries must be at most 1/2",
                    );
                }
            }
            Some(Sweep::Spatial {
                steps: steps?,
                hs: hs?,
            })
        }
        (true, true) => {
            parser.error(
                None,
                "give either cells + tau_list or steps + h_list, not both",
            );
            None
        }
        (false, false) => {
            parser.error(
                None,
                "custom study needs cells + tau_list or steps + h_list",
            );
            None
        }
    };
    Some(CustomStudy {
        final_time: final_time?,
        coefficient: coefficient?,
        w0: w0?,
        source: source?,
        sweep: sweep?,
    })
}

/// Parses and validates a configuration document, reporting every problem
/// found rather than stopping at the first.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut parser = Parser::new(text);

    let preset = match parser.text("preset") {
        None => {
            parser.error(
                None,
                "preset or full custom spec required (set `preset = ...`)",
            );
            None
        }
        Some(name) => match PresetName::parse(&name) {
            Some(p) => Some(p),
            None => {
                parser.error(
                    parser.line_of("preset"),
                    format!("unknown preset {name:?} (table1, table2, table3, oracle, custom)"),
                );
                None
            }
        },
    };

    let alphas = parser.list("alpha");
    if let Some(a) = &alphas {
        check_alpha(&mut parser, a);
        if a.is_empty() {
            parser.error(parser.line_of("alpha"), "alpha list is empty");
        }
    }

    let output = parser.text("output").map(PathBuf::from);

    let mut custom = None;
    match preset {
        Some(PresetName::Custom) => {
            if alphas.is_none() && !parser.entries.contains_key("alpha") {
                parser.error(None, "`alpha` is required for preset = custom");
            }
            custom = parse_custom(&mut parser);
        }
        Some(_) => {
            let extra: Vec<(String, usize)> = parser
                .entries
                .iter()
                .filter(|(k, _)| !matches!(k.as_str(), "preset" | "alpha" | "output"))
                .map(|(k, e)| (k.clone(), e.line))
                .collect();
            for (key, line) in extra {
                parser.error(
                    Some(line),
                    format!("`{key}` only applies to preset = custom"),
                );
            }
        }
        None => {}
    }

    if !parser.errors.is_empty() {
        parser.errors.sort_by_key(|e| e.line.unwrap_or(usize::MAX));
        return Err(Error::Config(parser.errors));
    }
    let preset = preset.expect("validated");
    let alphas = alphas.unwrap_or_else(|| preset.default_alphas().to_vec());
    Ok(ExperimentConfig {
        preset,
        alphas,
        custom,
        output,
    })
}

impl ExperimentConfig {
    pub fn preset(name: PresetName) -> Self {
        ExperimentConfig {
            preset: name,
            alphas: name.default_alphas().to_vec(),
            custom: None,
            output: None,
        }
    }
}

/// Tables and console rendering produced by [`run`].
#[derive(Clone, Debug)]
pub struct RunReport {
    pub tables: Vec<RateTable<f64>>,
    pub console: String,
}

/// Runs every study described by `config`. Nothing is written unless all of
/// them succeed; the CSV then goes to `config.output` when set.
pub fn run(config: &ExperimentConfig) -> Result<RunReport> {
    let mut tables = Vec::new();
    let mut summary = String::new();
    match config.preset {
        PresetName::Table1 => {
            for &a in &config.alphas {
                tables.push(presets::table1_study(a)?);
            }
        }
        PresetName::Table2 => {
            for &a in &config.alphas {
                tables.push(presets::table2_study(a)?);
            }
        }
        PresetName::Table3 => {
            for &a in &config.alphas {
                tables.push(presets::table3_study(a)?);
            }
        }
        PresetName::Oracle => {
            use std::fmt::Write as _;
            for &a in &config.alphas {
                for (kind, setup, sweep) in [
                    (
                        "temporal",
                        presets::oracle_setup(a)?,
                        presets::oracle_temporal(),
                    ),
                    (
                        "spatial",
                        presets::oracle_spatial_setup(a)?,
                        presets::oracle_spatial(),
                    ),
                ] {
                    let report = oracle_study(&setup, &sweep, format!("oracle {kind} alpha={a}"))?;
                    let worst = report.max_nodal.errors.iter().cloned().fold(0.0, f64::max);
                    let _ = writeln!(
                        summary,
                        "oracle {kind} alpha={a}: max nodal error vs closed form {worst:.3E}"
                    );
                    tables.push(report.l2);
                    tables.push(report.max_nodal);
                }
            }
        }
        PresetName::Custom => {
            let custom = config
                .custom
                .as_ref()
                .ok_or_else(|| Error::invalid("custom preset without a custom study"))?;
            for &a in &config.alphas {
                let spec = custom.problem(a)?;
                let table = match &custom.sweep {
                    Sweep::Temporal { cells, taus } => {
                        temporal_study(&spec, *cells, taus, format!("custom alpha={a}"))?
                    }
                    Sweep::Spatial { steps, hs } => {
                        let tau = custom.final_time / *steps as f64;
                        spatial_study(&spec, tau, hs, format!("custom alpha={a}"))?
                    }
                };
                tables.push(table);
            }
        }
    }
    if let Some(path) = &config.output {
        write_tables(path, &tables)?;
    }
    let mut console = render_console(&tables);
    console.push_str(&summary);
    Ok(RunReport { tables, console })
}

fn write_tables(path: &Path, tables: &[RateTable<f64>]) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut buf = Vec::new();
    write_csv(tables, &mut buf)?;
    fs::write(path, buf).map_err(io_err)
}
