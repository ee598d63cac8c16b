//! `scma` command-line front end.
//!
//! Every command reads an optional TOML config, resolves defaults and the
//! seed, writes its artifacts into `--out-dir` and finishes with
//! `manifest.toml`: the fully resolved config, loadable again via `--config`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::codebook::{
    build_from_design, fit_design_point, load_codebooks, reference_codebooks, reference_template,
    save_codebooks, CodebookSet, DEFAULT_ENUMERATION_CAP, REFERENCE_IDS,
};
use crate::error::{Error, Result};
use crate::exec;
use crate::link::{ber_sweep, SweepConfig};
use crate::metrics::{self, Aggregation, ExactOptions, MetricsReport, MonteCarloOptions};
use crate::optimizer::{ga_optimize, DesignPoint, GaConfig, OptimizationResult};
use crate::rng;
use crate::signature::{energy_target, SignatureTemplate, BUILTIN_TEMPLATES};

#[derive(Debug, Parser)]
#[command(name = "scma", version, about = "Power-imbalanced SCMA codebook design")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Directory for artifacts (created if missing).
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,

    /// Overrides the config seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Describe a signature template.
    Info {
        #[arg(long, default_value = "S4x6")]
        template: String,
    },
    /// Build codebooks from a design point or reference id.
    Build,
    /// MED and MPD of a codebook set.
    Metrics {
        /// Reference codebook id (overrides the config source).
        #[arg(long, conflicts_with = "codebook")]
        reference: Option<String>,
        /// Codebook JSON file (overrides the config source).
        #[arg(long)]
        codebook: Option<PathBuf>,
    },
    /// GA search for the best design point.
    Optimize,
    /// BER sweep.
    Simulate,
}

/// Where a command takes its codebooks from. Exactly one of `reference`,
/// `path` or the design fields must be given.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodebookSource {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub template: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(rename = "E", skip_serializing_if = "Option::is_none")]
    pub energies: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
}

impl CodebookSource {
    pub fn load(&self) -> Result<CodebookSet> {
        let design = self.template.is_some()
            || self.order.is_some()
            || self.energies.is_some()
            || self.phi.is_some()
            || self.omega.is_some();
        match (&self.reference, &self.path, design) {
            (Some(id), None, false) => reference_codebooks(id),
            (None, Some(path), false) => load_codebooks(path),
            (None, None, true) => {
                let missing = |what: &str| Error::Config(format!("codebook design needs `{what}`"));
                let template = SignatureTemplate::builtin(self.template.as_deref().ok_or_else(|| missing("template"))?)?;
                let order = self.order.ok_or_else(|| missing("order"))?;
                let point = DesignPoint {
                    energies: self.energies.clone().ok_or_else(|| missing("E"))?,
                    phases: self.phi.clone().ok_or_else(|| missing("phi"))?,
                    omega: self.omega.ok_or_else(|| missing("omega"))?,
                };
                build_from_design(&template, order, &point)
            }
            (None, None, false) => Err(Error::Config(
                "no codebook source: set `reference`, `path` or a design point in [codebook]".into(),
            )),
            _ => Err(Error::Config(
                "[codebook] takes exactly one of `reference`, `path` or a design point".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MedSetting {
    #[default]
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsSettings {
    pub med: MedSetting,
    /// Exact enumeration needs strictly fewer than `cap` points.
    pub cap: u64,
    #[serde(rename = "Q")]
    pub samples: usize,
    pub t_max: usize,
    pub aggregation: Aggregation,
}

impl Default for MetricsSettings {
    fn default() -> Self {
        Self {
            med: MedSetting::Exact,
            cap: DEFAULT_ENUMERATION_CAP,
            samples: 5000,
            t_max: 20,
            aggregation: Aggregation::RunningMin,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeSettings {
    pub template: String,
    pub order: usize,
    #[serde(flatten)]
    pub ga: GaConfig,
}

impl Default for OptimizeSettings {
    fn default() -> Self {
        Self {
            template: "S4x6".into(),
            order: 4,
            ga: GaConfig::default(),
        }
    }
}

/// Bookkeeping written into manifests; ignored on input.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunInfo {
    pub command: String,
    pub version: String,
    pub outputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eb_definition: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Top-level seed; generated and recorded when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub codebook: CodebookSource,
    pub metrics: MetricsSettings,
    pub optimize: OptimizeSettings,
    pub simulate: SweepConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run: Option<RunInfo>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let threads = cli.threads;
    exec::with_threads(threads, move || dispatch(cli))
}

fn dispatch(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cfg.run = None;
    let seed = cli.seed.or(cfg.seed).unwrap_or_else(rng::entropy_seed);
    cfg.seed = Some(seed);
    let out = cli.out_dir.as_path();
    match cli.command {
        Command::Info { template } => {
            print!("{}", info_report(&template)?);
            Ok(())
        }
        Command::Build => cmd_build(cfg, out),
        Command::Metrics { reference, codebook } => {
            if reference.is_some() || codebook.is_some() {
                cfg.codebook = CodebookSource {
                    reference,
                    path: codebook,
                    ..Default::default()
                };
            }
            cmd_metrics(cfg, out)
        }
        Command::Optimize => cmd_optimize(cfg, out),
        Command::Simulate => cmd_simulate(cfg, out),
    }
}

/// Dimensions, indicator matrix, girth and overload of a template.
pub fn info_report(name: &str) -> Result<String> {
    let t = SignatureTemplate::builtin(name)?;
    let ind = t.indicator();
    let mut s = String::new();
    let _ = writeln!(s, "template {}", t.name());
    let _ = writeln!(s, "K = {} resources, J = {} users, d_f = {}", t.resources(), t.users(), t.df());
    let _ = writeln!(s, "overload = {:.0}%", 100.0 * t.overload());
    match ind.girth() {
        Some(g) => {
            let _ = writeln!(s, "girth = {g}");
        }
        None => {
            let _ = writeln!(s, "girth = none (acyclic)");
        }
    }
    let _ = writeln!(s, "indicator:");
    for row in ind.to_rows() {
        let cells: Vec<String> = row.iter().map(u8::to_string).collect();
        let _ = writeln!(s, "  {}", cells.join(" "));
    }
    let _ = writeln!(s, "weights:");
    for k in 0..t.resources() {
        let cells: Vec<String> = (0..t.users())
            .map(|j| match t.at(k, j) {
                0 => "0".to_string(),
                w => format!("z{w}"),
            })
            .collect();
        let _ = writeln!(s, "  {}", cells.join(" "));
    }
    Ok(s)
}

fn write_manifest(out: &Path, mut cfg: RunConfig, command: &str, outputs: &[&str], eb: Option<String>) -> Result<()> {
    let mut listed: Vec<String> = outputs.iter().map(|s| s.to_string()).collect();
    listed.push("manifest.toml".into());
    cfg.run = Some(RunInfo {
        command: command.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        outputs: listed,
        eb_definition: eb,
    });
    fs::write(out.join("manifest.toml"), cfg.to_toml()?)?;
    Ok(())
}

fn cmd_build(cfg: RunConfig, out: &Path) -> Result<()> {
    fs::create_dir_all(out)?;
    let set = cfg.codebook.load()?;
    save_codebooks(&set, out.join("codebooks.json"))?;
    write_manifest(out, cfg, "build", &["codebooks.json"], None)?;
    println!(
        "wrote {} codebooks (M = {}, K = {}) to {}",
        set.dims().users,
        set.dims().order,
        set.dims().resources,
        out.join("codebooks.json").display()
    );
    Ok(())
}

/// MED and MPD of `set` per `settings`; fits a design point when the set has
/// a template but no recorded design.
pub fn compute_metrics(set: &CodebookSet, settings: &MetricsSettings, seed: u64) -> Result<MetricsReport> {
    let med = match settings.med {
        MedSetting::Exact => metrics::med_exact_with(
            set,
            ExactOptions {
                cap: settings.cap,
                ..Default::default()
            },
        )?,
        MedSetting::MonteCarlo => {
            let mut opts = MonteCarloOptions::new(settings.samples, settings.t_max, seed);
            opts.aggregation = settings.aggregation;
            metrics::med_monte_carlo(set, opts)?
        }
    };
    let mut mpd = metrics::system_mpd(set)?;
    let mut fitted = None;
    if let (Some(name), None) = (set.template(), set.design_point()) {
        let t = SignatureTemplate::builtin(name)?;
        let d = set.dims();
        let fit = fit_design_point(set, &t)?;
        let point = fit.design_point(energy_target(d.order, d.users, d.resources))?;
        mpd.closed_form = Some(metrics::gamma_mpd_closed_form(&t, &point.energies, d.order, point.omega)?);
        fitted = Some(point);
    }
    Ok(MetricsReport { med, mpd, fitted })
}

fn cmd_metrics(cfg: RunConfig, out: &Path) -> Result<()> {
    fs::create_dir_all(out)?;
    let set = cfg.codebook.load()?;
    let report = compute_metrics(&set, &cfg.metrics, cfg.seed.unwrap_or_default())?;
    fs::write(out.join("metrics.json"), serde_json::to_string_pretty(&report)? + "\n")?;
    write_manifest(out, cfg, "metrics", &["metrics.json"], None)?;
    println!("med = {:.6}", report.med.value);
    println!("mpd = {:.6}", report.mpd.system);
    if let Some(cf) = report.mpd.closed_form {
        println!("mpd (closed form) = {cf:.6}");
    }
    Ok(())
}

/// `generation,best_med,best_mpd,feasible_count`; `best_med` is empty
/// until a feasible individual exists.
pub fn convergence_csv(result: &OptimizationResult) -> String {
    let mut s = String::from("generation,best_med,best_mpd,feasible_count\n");
    for h in &result.history {
        let med = h.best_med.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(s, "{},{},{},{}", h.generation, med, h.best_mpd, h.feasible_count);
    }
    s
}

fn cmd_optimize(mut cfg: RunConfig, out: &Path) -> Result<()> {
    fs::create_dir_all(out)?;
    let seed = cfg.seed.unwrap_or_default();
    cfg.optimize.ga.seed = seed;
    let settings = &cfg.optimize;
    let template = SignatureTemplate::builtin(&settings.template)?;
    let result = match ga_optimize(settings.order, &template, &settings.ga) {
        Ok(r) => r,
        Err(Error::Infeasible(report)) => {
            fs::write(out.join("infeasible.json"), serde_json::to_string_pretty(&report)? + "\n")?;
            write_manifest(out, cfg, "optimize", &["infeasible.json"], None)?;
            return Err(Error::Infeasible(report));
        }
        Err(e) => return Err(e),
    };
    let set = build_from_design(&template, settings.order, &result.best)?;
    save_codebooks(&set, out.join("codebooks.json"))?;
    fs::write(out.join("result.json"), serde_json::to_string_pretty(&result)? + "\n")?;
    fs::write(out.join("convergence.csv"), convergence_csv(&result))?;
    println!("best med = {:.6}, mpd = {:.6}", result.best_med, result.best_mpd);
    write_manifest(out, cfg, "optimize", &["codebooks.json", "result.json", "convergence.csv"], None)
}

#[derive(Serialize)]
struct BerSidecar<'a> {
    config: &'a RunConfig,
    curve: &'a crate::link::BerCurve,
}

fn cmd_simulate(mut cfg: RunConfig, out: &Path) -> Result<()> {
    fs::create_dir_all(out)?;
    cfg.simulate.seed = cfg.seed.unwrap_or_default();
    let set = cfg.codebook.load()?;
    let curve = ber_sweep(&set, &cfg.simulate)?;
    fs::write(out.join("ber.csv"), curve.to_csv())?;
    let sidecar = BerSidecar {
        config: &cfg,
        curve: &curve,
    };
    fs::write(out.join("ber.json"), serde_json::to_string_pretty(&sidecar)? + "\n")?;
    print!("{}", curve.to_csv());
    write_manifest(
        out,
        cfg,
        "simulate",
        &["ber.csv", "ber.json"],
        Some(crate::link::EB_DEFINITION.to_string()),
    )
}

/// Known template and reference names, for help output.
pub fn known_names() -> String {
    let refs: Vec<String> = REFERENCE_IDS
        .iter()
        .map(|id| match reference_template(id) {
            Ok(t) => format!("{id} ({})", t.name()),
            Err(_) => id.to_string(),
        })
        .collect();
    format!("templates: {}; references: {}", BUILTIN_TEMPLATES.join(", "), refs.join(", "))
}
