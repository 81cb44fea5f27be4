use std::fmt::Write as _;

use serde::Serialize;
use vie_core::coeff::Coefficient;
use vie_core::expr::Equation;
use vie_core::oracle::{self, Sample};
use vie_core::picard::{self, SolveMode, SolveReport};
use vie_core::polynomialize::{assemble, AugmentedSystem, PolyConfig};
use vie_core::series::Series;

use crate::config::{parse_step, parse_window, CompareArgs, Format, Loaded, RunConfig, DEFAULT_ORACLE_PRECISION};
use crate::error::CliError;

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Output(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn no_csv(command: &str) -> CliError {
    CliError::Usage(format!("{command} has no csv output; use text or json"))
}

fn exact_or_sci(c: &Coefficient, sig: usize) -> String {
    match c {
        Coefficient::Rational(_) => c.to_string(),
        Coefficient::Float(_) => c.to_scientific(sig),
    }
}

#[derive(Serialize)]
struct CheckRecord {
    label: String,
    lower: String,
    phi: String,
    terms: Vec<CheckTerm>,
}

#[derive(Serialize)]
struct CheckTerm {
    f: String,
    kernel: String,
}

pub fn check(loaded: &Loaded) -> Result<String, CliError> {
    let eq = &loaded.equation;
    match loaded.config.format {
        Format::Json => json(&CheckRecord {
            label: eq.label.clone(),
            lower: eq.lower.to_string(),
            phi: eq.phi.to_string(),
            terms: eq
                .terms
                .iter()
                .map(|k| CheckTerm {
                    f: k.f.to_string(),
                    kernel: k.kernel.to_string(),
                })
                .collect(),
        }),
        Format::Csv => Err(no_csv("check")),
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "equation: {}", eq.label);
            let _ = writeln!(out, "source: {}", loaded.config.input.describe());
            let _ = writeln!(out, "phi(t) = {}", eq.phi);
            match eq.terms.as_slice() {
                [] => {
                    let _ = writeln!(out, "no integral term");
                }
                [only] => {
                    let _ = writeln!(out, "separable: f(t) = {}", only.f);
                    let _ = writeln!(out, "kernel: k(s, y) = {}", only.kernel);
                }
                many => {
                    for (i, k) in many.iter().enumerate() {
                        let _ = writeln!(out, "separable: f{}(t) = {}", i + 1, k.f);
                        let _ = writeln!(out, "kernel: k{}(s, y) = {}", i + 1, k.kernel);
                    }
                }
            }
            if !eq.terms.is_empty() {
                let _ = writeln!(out, "lower limit: {}", eq.lower);
            }
            Ok(out)
        }
    }
}

pub fn system(loaded: &Loaded) -> Result<AugmentedSystem, CliError> {
    let cfg = &loaded.config;
    let poly = PolyConfig {
        digits: cfg.precision,
        backend: cfg.backend,
        ..PolyConfig::default()
    };
    Ok(assemble(&loaded.equation, &poly)?)
}

pub fn show_system(loaded: &Loaded) -> Result<String, CliError> {
    let sys = system(loaded)?;
    match loaded.config.format {
        Format::Text => Ok(sys.render_text()),
        Format::Json => json(&sys.to_record()),
        Format::Csv => Err(no_csv("show-system")),
    }
}

fn run(cfg: &RunConfig, sys: &AugmentedSystem) -> Result<SolveReport, CliError> {
    let mode = match cfg.iters {
        Some(k) => SolveMode::FixedIters(k),
        None => SolveMode::stabilize(cfg.order),
    };
    Ok(picard::solve(sys, cfg.order, mode)?)
}

fn trace_text(report: &SolveReport) -> String {
    report
        .trace
        .iter()
        .map(|d| d.map_or("-".to_string(), |d| d.to_string()))
        .collect::<Vec<_>>()
        .join(" ")
}

fn steps(n: usize) -> String {
    if n == 1 {
        "1 step".into()
    } else {
        format!("{n} steps")
    }
}

fn summary(eq: &Equation, cfg: &RunConfig, report: &SolveReport) -> String {
    format!(
        "{}: order {}, {}, {} backend",
        eq.label,
        cfg.order,
        steps(report.iterations),
        report.y().backend()
    )
}

pub fn solve(loaded: &Loaded) -> Result<String, CliError> {
    let cfg = &loaded.config;
    let sys = system(loaded)?;
    let report = run(cfg, &sys)?;
    match cfg.format {
        Format::Json => json(&report.to_record(&loaded.equation.label, cfg.timing)),
        Format::Csv => {
            let mut out = String::from("degree,coefficient,rounded\n");
            let rec = report.y().to_record();
            for (j, (c, r)) in rec.coeffs.iter().zip(report.y().round_coeffs(cfg.places)).enumerate() {
                let _ = writeln!(out, "{j},{c},{r}");
            }
            Ok(out)
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "{}", summary(&loaded.equation, cfg, &report));
            let _ = writeln!(out, "stable degree trace: {}", trace_text(&report));
            let _ = writeln!(out, "y(t) = {}", report.y().to_poly_string(cfg.places));
            Ok(out)
        }
    }
}

#[derive(Serialize)]
struct SampleRecord {
    t: String,
    series: String,
    reference: Option<String>,
    error: Option<String>,
    oracle: Option<String>,
    oracle_error: Option<String>,
}

#[derive(Serialize)]
struct CompareRecord {
    label: String,
    order: usize,
    iterations: usize,
    window: [String; 2],
    samples: Vec<SampleRecord>,
    max_error: Option<String>,
    oracle_step: Option<String>,
    max_oracle_error: Option<String>,
}

const SIG: usize = 12;
const ERR_SIG: usize = 4;

pub fn compare(loaded: &Loaded, args: &CompareArgs) -> Result<String, CliError> {
    let cfg = &loaded.config;
    let eq = &loaded.equation;
    let (lo, hi) = parse_window(&args.window, &eq.lower)?;
    let reference = cfg.reference(&args.reference)?;
    let step = args.oracle_h.as_deref().map(parse_step).transpose()?;
    if reference.is_none() && step.is_none() {
        return Err(CliError::Usage(
            "nothing to compare against: give --reference or --oracle-h".into(),
        ));
    }
    let sys = system(loaded)?;
    let report = run(cfg, &sys)?;
    let series: &Series = report.y();
    let points = oracle::sample_points(&lo, &hi, args.samples);

    let against_ref: Option<Vec<Sample>> = reference
        .as_ref()
        .map(|r| oracle::reference_errors(series, r, &points, cfg.precision))
        .transpose()?;
    let grid = match &step {
        Some(h) if hi > eq.lower => Some(oracle::trapezoid_solve(eq, h, &hi, DEFAULT_ORACLE_PRECISION)?),
        _ => None,
    };
    let against_grid = grid
        .as_ref()
        .map(|g| oracle::grid_errors(series, g, &points))
        .transpose()?;
    let max_ref = against_ref.as_ref().and_then(|s| oracle::max_error(s).cloned());
    let max_grid = grid
        .as_ref()
        .map(|g| oracle::compare(series, g, &lo, &hi))
        .transpose()?;

    let rows: Vec<SampleRecord> = points
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let r = against_ref.as_ref().map(|s| &s[i]);
            let g = against_grid.as_ref().map(|s| &s[i]);
            let series_value = r.or(g).map(|s| s.series.to_scientific(SIG)).unwrap_or_default();
            SampleRecord {
                t: decimal(t),
                series: series_value,
                reference: r.map(|s| s.reference.to_scientific(SIG)),
                error: r.map(|s| s.error.to_scientific(ERR_SIG)),
                oracle: g.map(|s| s.reference.to_scientific(SIG)),
                oracle_error: g.map(|s| s.error.to_scientific(ERR_SIG)),
            }
        })
        .collect();

    let record = CompareRecord {
        label: eq.label.clone(),
        order: cfg.order,
        iterations: report.iterations,
        window: [decimal(&lo), decimal(&hi)],
        samples: rows,
        max_error: max_ref.map(|e| e.to_scientific(ERR_SIG)),
        oracle_step: step.as_ref().map(decimal),
        max_oracle_error: max_grid.map(|e| e.to_scientific(ERR_SIG)),
    };

    match cfg.format {
        Format::Json => json(&record),
        Format::Csv => {
            let mut out = String::from("t,series,reference,error,oracle,oracle_error\n");
            for r in &record.samples {
                let o = |x: &Option<String>| x.clone().unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.t,
                    r.series,
                    o(&r.reference),
                    o(&r.error),
                    o(&r.oracle),
                    o(&r.oracle_error)
                );
            }
            Ok(out)
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "{}", summary(eq, cfg, &report));
            let _ = writeln!(out, "window: {}..{}", record.window[0], record.window[1]);
            let mut header = format!("{:<8} {:>20}", "t", "series");
            if reference.is_some() {
                header.push_str(&format!(" {:>20} {:>11}", "reference", "error"));
            }
            if grid.is_some() {
                header.push_str(&format!(" {:>20} {:>11}", "oracle", "oracle_err"));
            }
            let _ = writeln!(out, "{}", header.trim_end());
            for r in &record.samples {
                let mut line = format!("{:<8} {:>20}", r.t, r.series);
                if let (Some(v), Some(e)) = (&r.reference, &r.error) {
                    line.push_str(&format!(" {v:>20} {e:>11}"));
                }
                if let (Some(v), Some(e)) = (&r.oracle, &r.oracle_error) {
                    line.push_str(&format!(" {v:>20} {e:>11}"));
                }
                let _ = writeln!(out, "{line}");
            }
            if let Some(e) = &record.max_error {
                let _ = writeln!(out, "max error vs reference: {e}");
            }
            if let (Some(e), Some(h)) = (&record.max_oracle_error, &record.oracle_step) {
                let _ = writeln!(out, "max error vs trapezoid (h = {h}, all nodes in window): {e}");
            }
            Ok(out)
        }
    }
}

fn decimal(q: &num_rational::BigRational) -> String {
    let text = Coefficient::Rational(q.clone()).round_to_places(12);
    match text.split_once('.') {
        Some((int, frac)) => {
            let frac = frac.trim_end_matches('0');
            if frac.is_empty() {
                int.to_string()
            } else {
                format!("{int}.{frac}")
            }
        }
        None => text,
    }
}

#[derive(Serialize)]
struct ResidualRecord {
    label: String,
    iterations: usize,
    stable_degree: i64,
    components: Vec<ResidualComponent>,
}

#[derive(Serialize)]
struct ResidualComponent {
    name: String,
    coeffs: Vec<String>,
}

pub fn residual(loaded: &Loaded) -> Result<String, CliError> {
    let cfg = &loaded.config;
    let sys = system(loaded)?;
    let report = run(cfg, &sys)?;
    let res = picard::residual(&sys, &report.state)?;
    let names: Vec<String> = std::iter::once("y".to_string())
        .chain(sys.variables.iter().map(|v| format!("v{}", v.index)))
        .collect();
    let record = ResidualRecord {
        label: loaded.equation.label.clone(),
        iterations: report.iterations,
        stable_degree: report.state.stable_degree.map_or(-1, |d| d as i64),
        components: names
            .iter()
            .zip(&res)
            .map(|(n, s)| ResidualComponent {
                name: n.clone(),
                coeffs: s.coeffs().iter().map(|c| exact_or_sci(c, 6)).collect(),
            })
            .collect(),
    };
    match cfg.format {
        Format::Json => json(&record),
        Format::Csv => {
            let mut out = String::from("component,degree,value\n");
            for c in &record.components {
                for (j, v) in c.coeffs.iter().enumerate() {
                    let _ = writeln!(out, "{},{j},{v}", c.name);
                }
            }
            Ok(out)
        }
        Format::Text => {
            let mut out = String::new();
            let stable = report.state.stable_degree.map_or("none".to_string(), |d| d.to_string());
            let _ = writeln!(
                out,
                "{}: residual after {} (stable degree {stable})",
                record.label,
                steps(record.iterations)
            );
            for c in &record.components {
                let _ = writeln!(out, "{}: {}", c.name, c.coeffs.join(", "));
            }
            Ok(out)
        }
    }
}
