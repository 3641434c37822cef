//! Command line harness: condition audits, identity sweeps, PIC1 extraction,
//! flow runs and a summary report over stored manifests.

pub mod manifest;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use areaflow::audit::{audit, Condition};
use areaflow::curvature::{chi_ic1_with, FrameSearch};
use areaflow::flow::{run, FlowCase, FlowConfig};
use areaflow::model::ModelSpace;
use areaflow::oracle::sweep::{run_suite, Suite, DEFAULT_SAMPLES};
use areaflow::oracle::DEFAULT_C0;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

pub use manifest::{load_manifests, persist, to_json, RunManifest, Timing};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const SPACE_HELP: &str = "Space spec kind:dim:scale. Kinds: sphere (radius), fubini (holomorphic \
sectional maximum), torus (period), const (sectional curvature). custom:dim:kappa=..,tau=..[,ric_min=..,\
ric_max=..,scal_min=..,scal_max=..,ric3=..,chi=..,L=..] takes bounds inline";

#[derive(Debug, Parser)]
#[command(
    name = "areaflow",
    version,
    about = "Curvature audits, identity sweeps and flow runs for area non-increasing maps"
)]
pub struct Cli {
    /// Output directory
    #[arg(long, global = true, env = "AREAFLOW_OUT", default_value = "out")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate curvature conditions on a pair of model spaces
    Audit(AuditArgs),
    /// Seeded sweeps of the pointwise identities and bounds
    VerifyIdentities(VerifyArgs),
    /// Extract chi_IC1 of a model space by frame search
    Pic1(Pic1Args),
    /// Integrate the graph flow from a TOML config
    Flow(FlowArgs),
    /// Summarize the manifests in the output directory
    Report,
}

#[derive(Debug, Args, Serialize)]
pub struct AuditArgs {
    #[arg(long = "m", help = SPACE_HELP)]
    pub m: String,
    #[arg(long = "n", help = SPACE_HELP)]
    pub n: String,
    /// Comma separated: A,B,C,D,E,F,Thm1_i,Thm1_ii
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "A,B,C,D,E,F,Thm1_i,Thm1_ii"
    )]
    pub conditions: Vec<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    /// Samples per suite
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub sweep: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma separated suite names; all when omitted
    #[arg(long, value_delimiter = ',')]
    pub suites: Vec<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct Pic1Args {
    #[arg(long, help = SPACE_HELP)]
    pub space: String,
    /// Random frame starts
    #[arg(long, default_value_t = FrameSearch::default().starts)]
    pub starts: usize,
    #[arg(long, default_value_t = FrameSearch::default().seed)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseArg {
    Torus,
    Equivariant,
}

impl From<CaseArg> for FlowCase {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::Torus => FlowCase::Torus,
            CaseArg::Equivariant => FlowCase::Equivariant,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct FlowArgs {
    #[arg(long, value_enum)]
    pub case: CaseArg,
    /// TOML file with dims, grid, cfl or dt, t_end, sample_dt, [initial] and [background]
    #[arg(long)]
    pub config: PathBuf,
}

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    /// bad input: specs, config files, names
    Usage(String),
    /// a computation or IO step failed
    Error(String),
    /// the suite ran but some checks failed
    Checks(Box<RunManifest>),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Error(_) | Failure::Checks(_) => EXIT_FAILED,
        }
    }

    pub fn diagnostics(&self, command: &str) -> Value {
        match self {
            Failure::Usage(e) => json!({ "command": command, "usage_error": e }),
            Failure::Error(e) => json!({ "command": command, "error": e }),
            Failure::Checks(m) => {
                let failed: Vec<&String> = m
                    .checks
                    .iter()
                    .filter(|(_, ok)| !**ok)
                    .map(|(k, _)| k)
                    .collect();
                json!({ "command": command, "failed_checks": failed, "abort": m.abort })
            }
        }
    }
}

fn io_err(e: std::io::Error) -> Failure {
    Failure::Error(e.to_string())
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn failed<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Error(e.to_string())
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

/// Writes the manifest and timing sidecar, then turns failed checks into a failure.
fn finish(dir: &Path, mut manifest: RunManifest, started: Instant) -> Result<RunManifest, Failure> {
    let timing = Timing {
        command: manifest.command.clone(),
        wall_seconds: started.elapsed().as_secs_f64(),
    };
    let timing_name = format!("{}.timing.json", manifest.command);
    persist(dir, &timing_name, &to_json(&timing)).map_err(io_err)?;
    manifest.outputs.sort();
    persist(dir, &manifest.file_name(), &to_json(&manifest)).map_err(io_err)?;
    if manifest.passed {
        Ok(manifest)
    } else {
        Err(Failure::Checks(Box::new(manifest)))
    }
}

fn cmd_audit(dir: &Path, args: &AuditArgs) -> Result<RunManifest, Failure> {
    let started = Instant::now();
    let sm: ModelSpace = args.m.parse().map_err(usage)?;
    let sn: ModelSpace = args.n.parse().map_err(usage)?;
    let conditions: Vec<Condition> = args
        .conditions
        .iter()
        .map(|c| c.parse())
        .collect::<Result<_, _>>()
        .map_err(usage)?;
    let mut manifest = RunManifest::new("audit", to_value(args));
    for c in conditions {
        let report = audit(&sm, &sn, c).map_err(failed)?;
        let name = format!("audit_{}.json", c.tag());
        persist(dir, &name, &to_json(&report)).map_err(io_err)?;
        manifest.outputs.push(name);
    }
    finish(dir, manifest, started)
}

fn cmd_verify(dir: &Path, args: &VerifyArgs) -> Result<RunManifest, Failure> {
    let started = Instant::now();
    let suites: Vec<Suite> = if args.suites.is_empty() {
        Suite::ALL.to_vec()
    } else {
        args.suites
            .iter()
            .map(|s| s.parse())
            .collect::<Result<_, _>>()
            .map_err(usage)?
    };
    let mut manifest = RunManifest::new("verify-identities", to_value(args));
    manifest.seeds.push(args.seed);
    let mut c0 = DEFAULT_C0;
    let mut summaries = Vec::new();
    for s in suites {
        let summary = run_suite(s, args.sweep, args.seed).map_err(failed)?;
        if let Some(&v) = summary.chosen_constants.get("c0") {
            c0 = c0.max(v);
        }
        manifest.check(s.name(), summary.passed);
        summaries.push(summary);
    }
    manifest.constants.insert("c0".into(), c0);
    let name = "identities.json".to_string();
    persist(dir, &name, &to_json(&summaries)).map_err(io_err)?;
    manifest.outputs.push(name);
    finish(dir, manifest, started)
}

#[derive(Serialize)]
struct Pic1Result {
    space: String,
    chi_ic1: f64,
    mu: f64,
    grad_norm: f64,
    /// `dim × 4`, row by row
    frame: Vec<Vec<f64>>,
}

fn cmd_pic1(dir: &Path, args: &Pic1Args) -> Result<RunManifest, Failure> {
    let started = Instant::now();
    let space: ModelSpace = args.space.parse().map_err(usage)?;
    let (r, g) = space.curvature_at().map_err(failed)?;
    let search = FrameSearch {
        starts: args.starts,
        seed: args.seed,
        ..FrameSearch::default()
    };
    let ext = chi_ic1_with(&r, &g, &search).map_err(failed)?;
    let result = Pic1Result {
        space: args.space.clone(),
        chi_ic1: ext.value,
        mu: ext.mu,
        grad_norm: ext.grad_norm,
        frame: ext
            .frame
            .row_iter()
            .map(|row| row.iter().copied().collect())
            .collect(),
    };
    let mut manifest = RunManifest::new("pic1", to_value(args));
    manifest.seeds.push(args.seed);
    manifest.constants.insert("chi_ic1".into(), ext.value);
    let name = "pic1.json".to_string();
    persist(dir, &name, &to_json(&result)).map_err(io_err)?;
    manifest.outputs.push(name);
    finish(dir, manifest, started)
}

/// Parses a flow config, taking the case from the command line when the file omits it.
pub fn load_flow_config(text: &str, case: FlowCase) -> Result<FlowConfig, Failure> {
    let mut table: toml::Table = text.parse().map_err(usage)?;
    let case_value = toml::Value::try_from(case).map_err(usage)?;
    match table.get("case") {
        None => {
            table.insert("case".into(), case_value);
        }
        Some(v) if *v == case_value => {}
        Some(v) => {
            return Err(Failure::Usage(format!(
                "config case {v} disagrees with --case"
            )))
        }
    }
    let cfg: FlowConfig = table.try_into().map_err(usage)?;
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn cmd_flow(dir: &Path, args: &FlowArgs) -> Result<RunManifest, Failure> {
    let started = Instant::now();
    let text = fs::read_to_string(&args.config)
        .map_err(|e| Failure::Usage(format!("{}: {e}", args.config.display())))?;
    let cfg = load_flow_config(&text, args.case.into())?;
    let out = run(&cfg).map_err(failed)?;
    let mut manifest = RunManifest::new("flow", to_value(&cfg));
    let eps = 5.0 * out.h * out.h;
    manifest.constants.insert("a".into(), out.growth_rate);
    manifest.constants.insert("c0".into(), DEFAULT_C0);
    manifest.constants.insert("eps_disc".into(), eps);
    if let Some(a) = out.smallest_monotone_rate {
        manifest
            .constants
            .insert("smallest_monotone_rate".into(), a);
    }
    manifest.check("completed", out.abort.is_none());
    manifest.check("monotone", out.series.worst_drop(out.growth_rate) <= eps);
    let s = &out.series;
    let lambda_ok = s
        .m_of_t
        .iter()
        .zip(&s.lambda_max)
        .all(|(m, l)| *m <= 0.0 || *l <= 2.0 / m);
    manifest.check("lambda_bound", lambda_ok);
    manifest.abort = out.abort.clone();
    let summary = json!({
        "steps": out.steps,
        "final_time": out.final_time,
        "h": out.h,
        "growth_rate": out.growth_rate,
        "smallest_monotone_rate": out.smallest_monotone_rate,
        "worst_drop": s.worst_drop(out.growth_rate),
        "samples": s.len(),
        "abort": out.abort,
    });
    for (name, body) in [("flow.csv", s.to_csv()), ("flow.json", to_json(&summary))] {
        persist(dir, name, &body).map_err(io_err)?;
        manifest.outputs.push(name.to_string());
    }
    finish(dir, manifest, started)
}

fn cmd_report(dir: &Path) -> Result<RunManifest, Failure> {
    let manifests = load_manifests(dir).map_err(io_err)?;
    if manifests.is_empty() {
        return Err(Failure::Error(format!("no manifests in {}", dir.display())));
    }
    let mut report = RunManifest::new("report", json!({ "dir": dir }));
    let mut rows = BTreeMap::new();
    for (file, m) in manifests.iter().filter(|(_, m)| m.command != "report") {
        println!("{:<34} {}", file, if m.passed { "pass" } else { "FAIL" });
        report.check(&m.command, m.passed);
        rows.insert(
            file.clone(),
            json!({ "command": m.command, "passed": m.passed, "checks": m.checks }),
        );
    }
    persist(dir, "report.json", &to_json(&rows)).map_err(io_err)?;
    report.outputs.push("report.json".into());
    report.outputs.sort();
    persist(dir, &report.file_name(), &to_json(&report)).map_err(io_err)?;
    if report.passed {
        Ok(report)
    } else {
        Err(Failure::Checks(Box::new(report)))
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Audit(_) => "audit",
            Command::VerifyIdentities(_) => "verify-identities",
            Command::Pic1(_) => "pic1",
            Command::Flow(_) => "flow",
            Command::Report => "report",
        }
    }
}

/// Runs a parsed command.
pub fn execute(cli: &Cli) -> Result<RunManifest, Failure> {
    let dir = cli.out.as_path();
    match &cli.command {
        Command::Audit(a) => cmd_audit(dir, a),
        Command::VerifyIdentities(a) => cmd_verify(dir, a),
        Command::Pic1(a) => cmd_pic1(dir, a),
        Command::Flow(a) => cmd_flow(dir, a),
        Command::Report => cmd_report(dir),
    }
}

/// Parses `args` (program name first), runs, prints, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(m) => {
            println!(
                "{}",
                serde_json::to_string(
                    &json!({ "command": m.command, "passed": true, "outputs": m.outputs })
                )
                .expect("json")
            );
            EXIT_OK
        }
        Err(f) => {
            eprintln!("{}", f.diagnostics(cli.command.name()));
            f.exit_code()
        }
    }
}
