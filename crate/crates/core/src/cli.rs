//! Command-line front end of the `leh` binary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::classify::{classify, classify_grid, nonexistence_witness, Interval, Verdict};
use crate::construction::{construct, CaseId, GRID_POINTS, GRID_R_MIN};
use crate::error::{Error, Result};
use crate::exponent::{ExponentPairPQ, HardyParams};
use crate::iteration::{claim1_check, iterate, Variant, DEFAULT_CAP};
use crate::report::{
    grid_csv, grid_svg, trace_csv, ClassifyRecord, IterateRecord, PlotRecord, VerifyRecord,
    SCHEMA_VERSION,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;

/// Plot output prefix when none is given.
pub const DEFAULT_PLOT_PREFIX: &str = "leh-plot";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Classify,
    Iterate,
    Verify,
    Plot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// A complete run, as parsed from flags or read from `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub n: u32,
    pub mu1: f64,
    pub mu2: f64,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub q: Option<f64>,
    /// `lo..hi`
    #[serde(default)]
    pub p_range: Option<String>,
    #[serde(default)]
    pub q_range: Option<String>,
    #[serde(default)]
    pub res: Option<usize>,
    #[serde(default)]
    pub variant: Option<Variant>,
    #[serde(default)]
    pub cap: Option<usize>,
    #[serde(default)]
    pub case: Option<String>,
    #[serde(default)]
    pub grid_points: Option<usize>,
    #[serde(default)]
    pub r_min: Option<f64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Vec<Format>,
}

#[derive(Debug, Parser)]
#[command(
    name = "leh",
    version,
    about = "Lane-Emden systems with Hardy potentials: regions, certificates, constructions"
)]
pub struct Cli {
    /// Read the whole run from a JSON file instead of flags.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Sub>,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Verdict, citation and margin at one point.
    Classify(PointArgs),
    /// Exponent bootstrap trace.
    Iterate {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, value_enum, default_value = "plain")]
        variant: VariantArg,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Also write the trace as CSV next to the JSON output.
        #[arg(long, value_delimiter = ',')]
        format: Vec<Format>,
    },
    /// Build, scale and check one construction.
    Verify {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, value_name = "C1..C8")]
        case: String,
        #[arg(long, default_value_t = GRID_POINTS)]
        grid_points: usize,
        #[arg(long, default_value_t = GRID_R_MIN, allow_hyphen_values = true)]
        r_min: f64,
    },
    /// Classify a grid and write CSV/SVG/JSON.
    Plot {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long = "p-range", visible_alias = "p", value_name = "LO..HI")]
        p_range: String,
        #[arg(long = "q-range", visible_alias = "q", value_name = "LO..HI")]
        q_range: String,
        #[arg(long, default_value_t = 400)]
        res: usize,
        /// Output path prefix; extensions are appended per format.
        #[arg(long, default_value = DEFAULT_PLOT_PREFIX)]
        out: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "csv,svg")]
        format: Vec<Format>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VariantArg {
    Plain,
    Clamped,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Plain => Variant::Plain,
            VariantArg::Clamped => Variant::Clamped,
        }
    }
}

#[derive(Debug, Args)]
pub struct SystemArgs {
    #[arg(long = "N", value_name = "N")]
    pub n: u32,
    #[arg(long, allow_hyphen_values = true)]
    pub mu1: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub mu2: f64,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub p: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub q: f64,
    /// Write the JSON record here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    fn base(command: Command, s: &SystemArgs) -> Self {
        RunConfig {
            command,
            n: s.n,
            mu1: s.mu1,
            mu2: s.mu2,
            p: None,
            q: None,
            p_range: None,
            q_range: None,
            res: None,
            variant: None,
            cap: None,
            case: None,
            grid_points: None,
            r_min: None,
            out: None,
            format: Vec::new(),
        }
    }

    fn point(command: Command, a: &PointArgs) -> Self {
        RunConfig {
            p: Some(a.p),
            q: Some(a.q),
            out: a.out.clone(),
            ..Self::base(command, &a.system)
        }
    }

    pub fn from_sub(sub: &Sub) -> Self {
        match sub {
            Sub::Classify(a) => Self::point(Command::Classify, a),
            Sub::Iterate {
                point,
                variant,
                cap,
                format,
            } => RunConfig {
                variant: Some((*variant).into()),
                cap: Some(*cap),
                format: format.clone(),
                ..Self::point(Command::Iterate, point)
            },
            Sub::Verify {
                point,
                case,
                grid_points,
                r_min,
            } => RunConfig {
                case: Some(case.clone()),
                grid_points: Some(*grid_points),
                r_min: Some(*r_min),
                ..Self::point(Command::Verify, point)
            },
            Sub::Plot {
                system,
                p_range,
                q_range,
                res,
                out,
                format,
            } => RunConfig {
                p_range: Some(p_range.clone()),
                q_range: Some(q_range.clone()),
                res: Some(*res),
                out: Some(out.clone()),
                format: format.clone(),
                ..Self::base(Command::Plot, system)
            },
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::invalid(format!("bad config {}: {e}", path.display())))
    }

    fn params(&self) -> Result<HardyParams> {
        HardyParams::new(self.n, self.mu1, self.mu2)
    }

    fn pq(&self) -> Result<ExponentPairPQ> {
        match (self.p, self.q) {
            (Some(p), Some(q)) => ExponentPairPQ::new(p, q),
            _ => Err(Error::invalid(format!("{:?} needs p and q", self.command))),
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents)
        .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Inconsistent(format!("serialization: {e}")))?
        + "\n";
    match out {
        Some(path) => write_file(path, &text),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Error::invalid(format!("stdout: {e}"))),
    }
}

fn with_extension(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// Executes a run; records go to `out` paths or to `stdout`.
pub fn run(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let params = cfg.params()?;
    match cfg.command {
        Command::Classify => {
            let pq = cfg.pq()?;
            let class = classify(&params, &pq);
            let witness = match class.verdict {
                Verdict::Nonexistence => Some(nonexistence_witness(&params, &pq)?),
                _ => None,
            };
            let rec = ClassifyRecord::new(&params, pq.p, pq.q, &class, witness);
            emit_json(&rec, cfg.out.as_deref(), stdout)
        }
        Command::Iterate => {
            let pq = cfg.pq()?;
            let variant = cfg.variant.unwrap_or(Variant::Plain);
            let cap = cfg.cap.unwrap_or(DEFAULT_CAP);
            let trace = iterate(&params, &pq, cap, variant)?;
            let claim1_holds = claim1_check(&trace, &pq).ok();
            if cfg.format.contains(&Format::Csv) {
                let base = cfg
                    .out
                    .as_deref()
                    .ok_or_else(|| Error::invalid("CSV trace output needs --out"))?;
                write_file(&with_extension(base, "csv"), &trace_csv(&trace))?;
            }
            let rec = IterateRecord {
                schema_version: SCHEMA_VERSION.into(),
                kind: "iterate".into(),
                params: (&params).into(),
                p: pq.p,
                q: pq.q,
                variant,
                cap,
                trace,
                claim1_holds,
            };
            emit_json(&rec, cfg.out.as_deref(), stdout)
        }
        Command::Verify => {
            let pq = cfg.pq()?;
            let case: CaseId = cfg
                .case
                .as_deref()
                .ok_or_else(|| Error::invalid("verify needs --case"))?
                .parse()?;
            let (candidate, report) = construct(
                case,
                &params,
                &pq,
                cfg.grid_points.unwrap_or(GRID_POINTS),
                cfg.r_min.unwrap_or(GRID_R_MIN),
            )?;
            let rec = VerifyRecord {
                schema_version: SCHEMA_VERSION.into(),
                kind: "verify".into(),
                params: (&params).into(),
                p: pq.p,
                q: pq.q,
                case,
                candidate,
                report,
            };
            emit_json(&rec, cfg.out.as_deref(), stdout)
        }
        Command::Plot => {
            let range = |r: &Option<String>, axis: &str| -> Result<Interval> {
                r.as_deref()
                    .ok_or_else(|| Error::invalid(format!("plot needs a {axis} range")))?
                    .parse()
            };
            let p_range = range(&cfg.p_range, "p")?;
            let q_range = range(&cfg.q_range, "q")?;
            let res = cfg.res.ok_or_else(|| Error::invalid("plot needs --res"))?;
            let out = cfg.out.as_deref().unwrap_or(Path::new(DEFAULT_PLOT_PREFIX));
            let grid = classify_grid(&params, p_range, q_range, res)?;
            let mut formats = if cfg.format.is_empty() {
                vec![Format::Csv, Format::Svg]
            } else {
                cfg.format.clone()
            };
            formats.sort();
            formats.dedup();
            for f in formats {
                match f {
                    Format::Csv => write_file(&with_extension(out, "csv"), &grid_csv(&grid))?,
                    Format::Svg => write_file(&with_extension(out, "svg"), &grid_svg(&grid)?)?,
                    Format::Json => emit_json(
                        &PlotRecord::new(&grid),
                        Some(&with_extension(out, "json")),
                        stdout,
                    )?,
                }
            }
            Ok(())
        }
    }
}

/// Parses `args`, runs, and maps the outcome to an exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    EXIT_OK
                }
                _ => EXIT_INVALID,
            };
        }
    };
    let cfg = match (&cli.config, &cli.command) {
        (Some(path), None) => RunConfig::load(path),
        (None, Some(sub)) => Ok(RunConfig::from_sub(sub)),
        (Some(_), Some(_)) => Err(Error::invalid(
            "give either --config or a subcommand, not both",
        )),
        (None, None) => Err(Error::invalid(
            "missing subcommand (classify, iterate, verify, plot)",
        )),
    };
    match cfg.and_then(|c| run(&c, stdout)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_internal() {
                EXIT_INTERNAL
            } else {
                EXIT_INVALID
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = main_with(
            std::iter::once("leh").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn classify_example() {
        let (code, out, _) = run_args(&[
            "classify", "--N", "5", "--mu1", "-2", "--mu2", "0", "--p", "2", "--q", "4",
        ]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["verdict"], "Nonexistence");
        assert_eq!(v["citation"], "T1.ii");
        assert!((v["margin"].as_f64().unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(v["schema_version"], "1");
        assert_eq!(v["witness"]["witness"]["mechanism"], "iteration");
    }

    #[test]
    fn validation_errors_exit_one() {
        assert_eq!(
            run_args(&[
                "classify", "--N", "5", "--mu1", "-3", "--mu2", "0", "--p", "2", "--q", "4"
            ])
            .0,
            1
        );
        assert_eq!(
            run_args(&[
                "classify", "--N", "5", "--mu1", "-2", "--mu2", "0", "--p", "0", "--q", "4"
            ])
            .0,
            1
        );
        assert_eq!(run_args(&["classify", "--N", "2"]).0, 1);
        assert_eq!(run_args(&[]).0, 1);
        assert_eq!(run_args(&["--help"]).0, 0);
    }

    #[test]
    fn iterate_example() {
        let (code, out, _) = run_args(&[
            "iterate",
            "--N",
            "5",
            "--mu1",
            "-2",
            "--mu2",
            "-2",
            "--p",
            "2.5",
            "--q",
            "3.5",
            "--variant",
            "clamped",
        ]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["trace"]["outcome"]["kind"], "CrossedTau2");
        assert_eq!(v["trace"]["outcome"]["step"], 2);
    }

    #[test]
    fn config_file_runs() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        fs::write(
            &path,
            r#"{"command": "classify", "n": 5, "mu1": -2, "mu2": 0, "p": 2, "q": 6}"#,
        )
        .unwrap();
        let (code, out, _) = run_args(&["--config", path.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(out.contains("\"T1.i\""));
        fs::write(&path, r#"{"command": "classify", "n": 5}"#).unwrap();
        assert_eq!(run_args(&["--config", path.to_str().unwrap()]).0, 1);
    }

    #[test]
    fn unwritable_output_exits_one() {
        let (code, _, err) = run_args(&[
            "plot",
            "--N",
            "5",
            "--mu1",
            "-2",
            "--mu2",
            "0",
            "--p",
            "0.1..8",
            "--q",
            "0.1..8",
            "--res",
            "4",
            "--out",
            "/nonexistent-dir/x/plot",
        ]);
        assert_eq!(code, 1, "{err}");
    }
}
