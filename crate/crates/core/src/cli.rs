//! The `paraboloid` command line: read a scene, run one command over it and
//! print the report. Data goes to stdout, logs to stderr.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::area::{MeshSpec, MonteCarloOptions, DEFAULT_SAMPLES, DEFAULT_SEED};
use crate::report::{build_report, emit_report, Command, Format, RunSettings};
use crate::scene::{parse_document, AngleUnit, FocalDoc, Scene, Tolerances};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum CommandArg {
    /// Perspectives and projections of every point.
    Project,
    /// Section through the focus carrying each segment's image.
    Classify,
    /// Lengths of each segment's images.
    Length,
    /// Areas of rectangles, cylindrical patches and annular sectors.
    Area,
    /// Every result against its oracle; exits 1 if any residual is out of bound.
    Validate,
}

/// Metric properties of the paraboloidal double projection.
#[derive(Debug, Clone, Parser)]
#[command(name = "paraboloid", version)]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: CommandArg,
    /// Scene file (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    pub scene: Option<PathBuf>,
    /// Override the scene's focal parameter.
    #[arg(long, global = true, value_name = "F")]
    pub focal: Option<f64>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: FormatArg,
    /// Initial mesh resolution in nodes.
    #[arg(long, global = true, value_name = "ROWSxCOLS", value_parser = parse_mesh, default_value = "64x64")]
    pub mesh: (usize, usize),
    /// Override the relative tolerance of geometric predicates.
    #[arg(long = "tol-rel", global = true, value_name = "X")]
    pub tol_rel: Option<f64>,
    /// Read the scene's angles as degrees.
    #[arg(long, global = true)]
    pub degrees: bool,
    /// Seed of the Monte-Carlo oracle.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Samples drawn by the Monte-Carlo oracle.
    #[arg(long = "mc-samples", global = true, value_name = "N", default_value_t = DEFAULT_SAMPLES)]
    pub mc_samples: u64,
}

fn parse_mesh(s: &str) -> Result<(usize, usize), String> {
    let (r, c) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected ROWSxCOLS, got '{s}'"))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad mesh size '{t}': {e}"));
    let (rows, cols) = (parse(r)?, parse(c)?);
    if rows < 2 || cols < 2 {
        return Err("mesh needs at least 2x2 nodes".into());
    }
    Ok((rows, cols))
}

impl CliConfig {
    fn command(&self) -> Command {
        match self.command {
            CommandArg::Project => Command::Project,
            CommandArg::Classify => Command::Classify,
            CommandArg::Length => Command::Length,
            CommandArg::Area => Command::Area,
            CommandArg::Validate => Command::Validate,
        }
    }

    fn settings(&self) -> RunSettings {
        RunSettings {
            mesh: MeshSpec { rows: self.mesh.0, cols: self.mesh.1, ..MeshSpec::default() },
            monte_carlo: MonteCarloOptions { samples: self.mc_samples, seed: self.seed },
        }
    }

    /// Reads the scene and applies the command-line overrides.
    pub fn load_scene(&self) -> Result<Scene, String> {
        let path = self.scene.as_ref().ok_or("--scene PATH is required")?;
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let mut doc = parse_document(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        if let Some(f) = self.focal {
            let tolerances = doc.focal.and_then(|fd| fd.tolerances);
            doc.focal = Some(FocalDoc { f, tolerances });
        }
        if let Some(rel) = self.tol_rel {
            if let Some(fd) = doc.focal.as_mut() {
                let abs = fd.tolerances.and_then(|t| t.abs);
                fd.tolerances = Some(Tolerances { rel: Some(rel), abs });
            }
        }
        if self.degrees {
            doc.angle_unit = AngleUnit::Degrees;
        }
        Scene::from_document(doc).map_err(|e| format!("{}: {e}", path.display()))
    }
}

/// Runs the parsed configuration, writing the report to `out` and
/// diagnostics to `err`. Returns the process exit status.
pub fn run(config: &CliConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let scene = match config.load_scene() {
        Ok(s) => s,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}\n\nUsage: paraboloid --scene PATH <COMMAND>  (see --help)");
            return EXIT_USAGE;
        }
    };
    let command = config.command();
    log::info!("running {command:?} over {} entities", scene.entities.len());
    let report = build_report(&scene, command, &config.settings());
    let format = match config.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    if let Err(e) = out.write_all(emit_report(&report, format).as_bytes()).and_then(|_| out.flush()) {
        let _ = writeln!(err, "error: cannot write report: {e}");
        return EXIT_USAGE;
    }
    if command == Command::Validate && !report.passed() {
        for e in report.entities.iter().filter(|e| !e.passed()) {
            log::warn!("{} ({}) failed validation", e.id, e.entity);
        }
        return EXIT_VALIDATION;
    }
    EXIT_OK
}

/// Parses `args` (including the program name) and runs them.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match CliConfig::try_parse_from(args) {
        Ok(config) => run(&config, out, err),
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                EXIT_USAGE
            } else {
                let _ = write!(out, "{}", e.render());
                EXIT_OK
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_argument() {
        assert_eq!(parse_mesh("128x64"), Ok((128, 64)));
        assert!(parse_mesh("1x5").is_err());
        assert!(parse_mesh("64").is_err());
    }

    #[test]
    fn missing_scene_is_usage_error() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = main_with_args(["paraboloid", "validate", "--scene", "/nonexistent/scene.json"], &mut out, &mut err);
        assert_eq!(code, EXIT_USAGE);
        assert!(String::from_utf8(err).unwrap().contains("Usage"));
        let code = main_with_args(["paraboloid", "frobnicate"], &mut Vec::new(), &mut Vec::new());
        assert_eq!(code, EXIT_USAGE);
    }
}
