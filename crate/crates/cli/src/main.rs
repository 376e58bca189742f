//! `ncad`: JSON front end for ncad-core.
//!
//! Exit codes: 0 success, 1 mathematical negative, 2 usage, I/O or schema error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use ncad_core::derivations::{inner_solve, jd_table};
use ncad_core::diffcalc::{delta_eval, delta_sym};
use ncad_core::exactalg::{parse_scalar, scalar};
use ncad_core::integrate::{
    check_integrability, integrability_samples, integrate_higher_with, integrate_order1_with,
    integrate_poly, SampleConfig,
};
use ncad_core::json::{self, MatrixJson, MlmJson, PointJson, PointsJson, PolyJson, TableJson};
use ncad_core::{suite, NcError, NcFn, NcFunction, NcPolynomial, PointMatrix, Scalar};

#[derive(Parser, Debug)]
#[command(
    name = "ncad",
    version,
    about = "Exact calculus and antiderivatives of free nc functions"
)]
struct Cli {
    /// Write the JSON result here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a polynomial at a point tuple.
    Eval {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        points: PathBuf,
    },
    /// jΔ of a polynomial, symbolically or at a point tuple.
    Delta {
        #[arg(long)]
        slot: usize,
        #[arg(long)]
        poly: PathBuf,
        #[arg(long, requires = "points")]
        numeric: bool,
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// Integrability of F_0..F_k.
    Check {
        #[arg(long = "F", value_delimiter = ',', required = true)]
        f: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        base: Vec<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Antiderivative of F_0..F_k at base points.
    Integrate {
        #[arg(long)]
        slot_count: usize,
        #[arg(long = "F", value_delimiter = ',', required = true)]
        f: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', required = true)]
        base: Vec<PathBuf>,
        /// Scalar constant of integration, order 0 only.
        #[arg(long)]
        c: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Symbolic antiderivative in one slot.
    IntegratePoly {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        slot: usize,
    },
    /// Derivation table of F at base points and its inner witness.
    Derivation {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        base: Vec<PathBuf>,
        #[arg(long, default_value_t = 0)]
        slot: usize,
        #[arg(long)]
        c: Option<String>,
    },
    /// Run the seeded property suite.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
    Nc(NcError),
    /// A check ran and came out negative; the report is the output.
    Negative(serde_json::Value),
}

impl From<NcError> for Failure {
    fn from(e: NcError) -> Self {
        Failure::Nc(e)
    }
}

type Outcome = std::result::Result<serde_json::Value, Failure>;

fn read(path: &Path) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load_poly(path: &Path) -> std::result::Result<NcPolynomial, Failure> {
    Ok(json::parse_poly(&read(path)?)?)
}

fn load_point(path: &Path) -> std::result::Result<PointMatrix, Failure> {
    Ok(json::parse_point(&read(path)?)?)
}

/// A `{"x","z"}` tuple, or a single point standing for `x = [point]`.
fn load_points(path: &Path) -> std::result::Result<(Vec<PointMatrix>, Vec<PointMatrix>), Failure> {
    let text = read(path)?;
    if let Ok(tuple) = json::from_str::<PointsJson>(&text) {
        return Ok(tuple.decode()?);
    }
    let p = json::from_str::<PointJson>(&text)?;
    Ok((vec![PointMatrix::try_from(&p)?], Vec::new()))
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("JSON values always serialize")
}

fn sample_config(seed: Option<u64>) -> SampleConfig {
    let mut cfg = SampleConfig::default();
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg
}

fn sources(paths: &[PathBuf]) -> std::result::Result<Vec<NcFn>, Failure> {
    paths
        .iter()
        .map(|p| load_poly(p).map(|q| Arc::new(q) as NcFn))
        .collect()
}

fn parse_c(c: Option<&str>) -> std::result::Result<Scalar, Failure> {
    Ok(c.map(parse_scalar)
        .transpose()?
        .unwrap_or_else(|| scalar(0)))
}

fn run(cmd: &Command) -> Outcome {
    match cmd {
        Command::Eval { poly, points } => {
            let p = load_poly(poly)?;
            let (xs, zs) = load_points(points)?;
            Ok(to_value(&MatrixJson::from(&p.eval(&xs, &zs)?)))
        }
        Command::Delta {
            slot,
            poly,
            numeric,
            points,
        } => {
            let p = load_poly(poly)?;
            match (numeric, points) {
                (true, Some(points)) => {
                    let (xs, zs) = load_points(points)?;
                    Ok(to_value(&MatrixJson::from(&delta_eval(
                        &p, *slot, &xs, &zs,
                    )?)))
                }
                (false, Some(_)) => Err(Failure::Usage("--points requires --numeric".into())),
                _ => Ok(to_value(&PolyJson::from(&delta_sym(&p, *slot)?))),
            }
        }
        Command::Check { f, base, seed } => {
            let fs = sources(f)?;
            let ys = base
                .iter()
                .map(|p| load_point(p))
                .collect::<Result<Vec<_>, _>>()?;
            let samples = integrability_samples(
                &fs,
                (!ys.is_empty()).then_some(ys.as_slice()),
                &sample_config(*seed),
            )?;
            let report = check_integrability(&fs, &samples)?;
            let v = to_value(&report);
            if report.passed {
                Ok(v)
            } else {
                Err(Failure::Negative(v))
            }
        }
        Command::Integrate {
            slot_count,
            f,
            base,
            c,
            seed,
        } => {
            if f.len() != slot_count + 1 || base.len() != slot_count + 1 {
                return Err(Failure::Usage(format!(
                    "--slot-count {slot_count} needs {} F files and base points",
                    slot_count + 1
                )));
            }
            if *slot_count > 0 && c.is_some() {
                return Err(Failure::Usage("--c applies to --slot-count 0 only".into()));
            }
            let fs = sources(f)?;
            let ys = base
                .iter()
                .map(|p| load_point(p))
                .collect::<Result<Vec<_>, _>>()?;
            let cfg = sample_config(*seed);
            let anti = if *slot_count == 0 {
                integrate_order1_with(fs[0].clone(), &ys[0], &parse_c(c.as_deref())?, &cfg)?
            } else {
                integrate_higher_with(fs, &ys, &cfg)?
            };
            let base_value = match anti.base_value().as_matrix() {
                Some(m) => to_value(&MatrixJson::from(m)),
                None => to_value(&MlmJson::from(anti.base_value())),
            };
            Ok(json!({
                "order": anti.order(),
                "base": anti.base_points().iter().map(PointJson::from).collect::<Vec<_>>(),
                "base_value": base_value,
                "integrability": to_value(anti.integrability()),
                "recipe": anti.recipe(),
            }))
        }
        Command::IntegratePoly { poly, slot } => {
            let p = load_poly(poly)?;
            Ok(to_value(&PolyJson::from(&integrate_poly(&p, *slot)?)))
        }
        Command::Derivation {
            poly,
            base,
            slot,
            c,
        } => {
            let f = load_poly(poly)?;
            let ys = base
                .iter()
                .map(|p| load_point(p))
                .collect::<Result<Vec<_>, _>>()?;
            let table = jd_table(&f, &ys, *slot)?;
            let n = inner_solve(&table, &parse_c(c.as_deref())?)?;
            Ok(json!({
                "table": to_value(&TableJson::from(&table)),
                "inner": to_value(&MlmJson::from(&n)),
            }))
        }
        Command::Selftest { seed } => {
            let reports = suite::selftest(*seed)?;
            for r in &reports {
                eprintln!(
                    "{:<36} {:>5} {:>6}",
                    r.name,
                    if r.passed { "pass" } else { "FAIL" },
                    r.cases
                );
            }
            let passed = reports.iter().all(|r| r.passed);
            let v = json!({ "seed": seed, "passed": passed, "checks": to_value(&reports) });
            if passed {
                Ok(v)
            } else {
                Err(Failure::Negative(v))
            }
        }
    }
}

fn emit(output: Option<&Path>, value: &serde_json::Value) -> std::result::Result<(), String> {
    let text = json::to_string(value);
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn error_value(kind: &str, detail: &str) -> serde_json::Value {
    json!({ "error": kind, "detail": detail })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            let detail = e.to_string();
            let detail = detail
                .lines()
                .next()
                .unwrap_or_default()
                .trim_start_matches("error: ");
            let _ = emit(None, &error_value("Usage", detail));
            return ExitCode::from(2);
        }
    };
    let output = cli.output.as_deref();
    let (value, code) = match run(&cli.command) {
        Ok(v) => (v, 0),
        Err(Failure::Negative(v)) => (v, 1),
        Err(Failure::Nc(e)) => {
            eprintln!("ncad: {e}");
            let code = if e.is_mathematical() { 1 } else { 2 };
            (error_value(e.kind(), &e.to_string()), code)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("ncad: {msg}");
            (error_value("Usage", &msg), 2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("ncad: {msg}");
            (error_value("Io", &msg), 2)
        }
    };
    if let Err(msg) = emit(output, &value) {
        eprintln!("ncad: {msg}");
        let _ = emit(None, &error_value("Io", &msg));
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
