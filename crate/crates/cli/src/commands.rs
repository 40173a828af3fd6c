use std::path::{Path, PathBuf};

use lerchz_core::census::{self, CensusReport};
use lerchz_core::io::{self, Catalog, TrajectoryFile, LIBRARY_VERSION};
use lerchz_core::trajectory::StepControl;
use lerchz_core::{
    detect_line_crossings, ds_derivative, fe_grid, fe_residual, lerch, locate_zeros, trace_L_zero, trace_Lprime_zero,
    Kind, Params, PrecisionPolicy, RectBox, SPoint,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::{parse_point, CensusArgs, Command, EvalArgs, FeCheckArgs, Failure, Format, ScanLineArgs, TraceArgs, ZerosArgs};

type Outcome = Result<(), Failure>;

pub(crate) fn run(command: &Command) -> Outcome {
    let config = serde_json::to_value(command).map_err(|e| Failure::usage(e.to_string()))?;
    match command {
        Command::Eval(a) => eval(a, config),
        Command::Zeros(a) => zeros(a, config),
        Command::Trace(a) => trace(a, config),
        Command::Census(a) => census_cmd(a, config),
        Command::ScanLine(a) => scan_line(a, config),
        Command::FeCheck(a) => fe_check(a, config),
    }
}

/// Every JSON report: the library version and the run configuration, then the result.
#[derive(Serialize)]
struct Report<T: Serialize> {
    library_version: &'static str,
    config: serde_json::Value,
    result: T,
}

fn report_json<T: Serialize>(config: serde_json::Value, result: T) -> Result<String, Failure> {
    Ok(io::to_json(&Report { library_version: LIBRARY_VERSION, config, result })?)
}

/// CSV preceded by `#` lines naming the library version and the configuration.
fn with_csv_header(config: &serde_json::Value, csv: &str) -> String {
    format!("# lerchz {LIBRARY_VERSION}\n# config: {config}\n{csv}")
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => Ok(io::write_atomic(path, text.as_bytes())?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn params(lambda: f64, alpha: Option<f64>) -> Result<Params, Failure> {
    Ok(Params::new(lambda, alpha.unwrap_or(lambda))?)
}

fn eval(a: &EvalArgs, config: serde_json::Value) -> Outcome {
    let params = params(a.lambda, a.alpha)?;
    let s = parse_point(&a.s)?;
    let mut policy = PrecisionPolicy::default();
    if let Some(tol) = a.tol {
        policy.target_tol = tol;
    }
    policy.validate()?;
    let result = match a.derivative {
        0 => lerch(params, s, &policy)?,
        1 | 2 => ds_derivative(params, s, a.derivative, &policy)?,
        n => return Err(Failure::usage(format!("--derivative {n} is not 0, 1 or 2"))),
    };
    if a.json {
        return emit(None, &report_json(config, result)?);
    }
    println!("# lerchz {LIBRARY_VERSION}");
    println!("# config: {config}");
    println!("value        {} {} {}i", io::fmt17(result.value.re), if result.value.im < 0.0 { '-' } else { '+' }, io::fmt17(result.value.im.abs()));
    println!("err_estimate {:.3e}", result.err_estimate);
    println!("method       {:?}", result.method);
    Ok(())
}

fn zeros(a: &ZerosArgs, config: serde_json::Value) -> Outcome {
    let params = params(a.lambda, a.alpha)?;
    let rect: RectBox = a.rect.parse()?;
    let policy = PrecisionPolicy::default();
    let records = locate_zeros(&rect, a.kind, params, &policy)?;
    let catalog = Catalog::new(params, rect, a.kind, policy, config.clone(), records);
    let text = match a.format {
        Format::Json => catalog.to_json()?,
        Format::Csv => with_csv_header(&config, &catalog.to_csv()?),
    };
    emit(a.out.as_deref(), &text)?;
    let residuals = catalog.records.iter().map(|r| r.residual);
    let min = residuals.clone().fold(f64::INFINITY, f64::min);
    let max = residuals.fold(0.0, f64::max);
    let summary = if catalog.records.is_empty() {
        format!("0 zeros of {} in {rect}", a.kind)
    } else {
        format!("{} zeros of {} in {rect}; residual min {min:.3e}, max {max:.3e}", catalog.records.len(), a.kind)
    };
    if a.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

fn plot_path(a: &TraceArgs) -> PathBuf {
    a.plot.clone().unwrap_or_else(|| a.out.with_extension("csv"))
}

fn trace(a: &TraceArgs, config: serde_json::Value) -> Outcome {
    let start = parse_point(&a.start)?;
    let ctrl = StepControl { h_init: a.h_init, h_min: a.h_min, ..StepControl::default() };
    ctrl.validate()?;
    let policy = PrecisionPolicy::default();
    let traced = match a.kind {
        Kind::L => trace_L_zero(a.lambda_from, start, a.lambda_to, &ctrl, &policy),
        Kind::Lprime => trace_Lprime_zero(a.lambda_from, start, a.lambda_to, &ctrl, &policy),
    };
    let (trajectory, truncated) = match traced {
        Ok(t) => (t, None),
        Err(failure) if failure.partial.samples.is_empty() => return Err(failure.error.into()),
        Err(failure) => (failure.partial, Some(failure.error.to_string())),
    };
    let crossings = detect_line_crossings(&trajectory);
    let file = TrajectoryFile::new(config.clone(), trajectory, &crossings, truncated.clone());
    io::write_atomic(&a.out, io::to_json(&file)?.as_bytes())?;
    let plot = plot_path(a);
    io::write_atomic(&plot, with_csv_header(&config, &file.plot_csv()?).as_bytes())?;
    let samples = &file.trajectory.samples;
    let last = samples.last().expect("a trajectory has its start sample");
    println!("{} samples, lambda {} -> {}, end {}", samples.len(), samples[0].lambda, last.lambda, last.position);
    for c in &file.crossings {
        println!("crosses sigma = 1/2 at lambda = {:.6}, t = {:.6}", c.lambda, c.position.t);
    }
    println!("wrote {} and {}", a.out.display(), plot.display());
    match truncated {
        Some(reason) => Err(Failure::truncated(format!("TRUNCATED at lambda = {}: {reason}", last.lambda))),
        None => Ok(()),
    }
}

fn census_cmd(a: &CensusArgs, config: serde_json::Value) -> Outcome {
    let params = Params::equal(a.lambda)?;
    let policy = PrecisionPolicy::default();
    let report: CensusReport = census::census(params, a.t, a.u, a.eta, a.sigma1, &policy)?;
    emit(a.out.as_deref(), &report_json(config, &report)?)?;
    let say = |line: String| if a.out.is_some() { println!("{line}") } else { eprintln!("{line}") };
    say(format!("window {} < t < {}, left box {}", a.t, a.t + a.u, report.rect));
    say(format!("L zeros left of the line: {} ({} on it, {} off it)", report.count_L, report.near_line.len(), report.off_line.len()));
    say(format!("L' zeros up to sigma = {}: {}", a.sigma1, report.count_Lprime));
    say(format!(
        "strictly left: L {}, L' {}, difference {}",
        report.count_L_left, report.count_Lprime_left, report.left_difference
    ));
    say(format!("main terms: L {:.3}, L' {:.3}", report.main_term_L, report.main_term_Lprime));
    for p in report.pairs.off_line() {
        say(format!("pair {} ~ {} (mismatch {:.3e})", p.rho.location, p.partner_nearest.location, p.mismatch));
    }
    Ok(())
}

fn scan_line(a: &ScanLineArgs, config: serde_json::Value) -> Outcome {
    let params = Params::equal(a.lambda)?;
    let zeros = match &a.zeros {
        Some(path) => Catalog::read_json(path)?.records,
        None => Vec::new(),
    };
    let policy = PrecisionPolicy::default();
    let rows = census::line_scan(params, a.sigma, a.t_from, a.t_to, a.step, &zeros, &policy)?;
    let text = match a.format {
        Format::Csv => with_csv_header(&config, &io::line_scan_csv(&rows)?),
        Format::Json => report_json(config, &rows)?,
    };
    emit(a.out.as_deref(), &text)?;
    let evaluated = rows.iter().filter(|r| r.re_log_derivative.is_some()).count();
    eprintln!("{} rows, {} evaluated, {} skipped near zeros", rows.len(), evaluated, rows.len() - evaluated);
    Ok(())
}

#[derive(Serialize)]
struct FePoint {
    s: SPoint,
    residual: f64,
}

#[derive(Serialize)]
struct FeReport {
    params: Params,
    points: Vec<FePoint>,
    max_residual: f64,
    threshold: f64,
    pass: bool,
}

fn fe_check(a: &FeCheckArgs, config: serde_json::Value) -> Outcome {
    let params = params(a.lambda, a.alpha)?;
    let policy = PrecisionPolicy::default();
    let points = fe_grid()
        .into_par_iter()
        .map(|s| fe_residual(params, s, &policy).map(|residual| FePoint { s, residual }))
        .collect::<Result<Vec<_>, _>>()?;
    let max_residual = points.iter().map(|p| p.residual).fold(0.0, f64::max);
    let pass = max_residual < a.threshold;
    let report = FeReport { params, points, max_residual, threshold: a.threshold, pass };
    emit(a.out.as_deref(), &report_json(config, &report)?)?;
    let line = format!("max residual {max_residual:.3e} over {} points", report.points.len());
    if a.out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    if pass {
        Ok(())
    } else {
        Err(Failure::numeric(format!("{line} exceeds {:.1e}", a.threshold)))
    }
}
