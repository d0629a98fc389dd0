use std::error::Error as StdError;
use std::f64::consts::PI;
use std::fmt::Write as _;

use qgraph::ambarzumian::{check_conditions, DEFAULT_TOL as CHECK_TOL};
use qgraph::asymptotics::{trace_average, TraceAverageReport};
use qgraph::secular::{compute_spectrum, EigenvalueList, SpectrumRequest, SpectrumTarget};
use qgraph::{fem, fixtures, Error, MetricGraph};
use serde_json::json;

use crate::output::{emit, num, write_atomic};
use crate::{CheckArgs, DemoArgs, DemoName, Format, Method, Outcome, SpectrumArgs, TraceAvgArgs};

type CmdResult = Result<Outcome, Box<dyn StdError>>;

fn outcome(certified: bool) -> Outcome {
    if certified {
        Outcome::Certified
    } else {
        Outcome::Uncertified
    }
}

fn truncated(list: &EigenvalueList, target: SpectrumTarget) -> Vec<f64> {
    let mut values = list.expanded();
    if let SpectrumTarget::Count(n) = target {
        values.truncate(n);
    }
    values
}

fn spectrum_csv(method: Method, secular: &[f64], fem: &[f64]) -> String {
    let cell = |v: Option<&f64>| v.map_or(String::new(), |x| num(*x));
    let mut out = String::new();
    match method {
        Method::Secular | Method::Fem => {
            out.push_str("n,lambda\n");
            let values = if method == Method::Secular { secular } else { fem };
            for (i, v) in values.iter().enumerate() {
                let _ = writeln!(out, "{i},{}", num(*v));
            }
        }
        Method::Both => {
            out.push_str("n,secular,fem,difference\n");
            for i in 0..secular.len().max(fem.len()) {
                let (s, f) = (secular.get(i), fem.get(i));
                let diff = match (s, f) {
                    (Some(s), Some(f)) => num(f - s),
                    _ => String::new(),
                };
                let _ = writeln!(out, "{i},{},{},{diff}", cell(s), cell(f));
            }
        }
    }
    out
}

pub fn spectrum(a: &SpectrumArgs) -> CmdResult {
    let g = MetricGraph::load(&a.graph)?;
    let target = match (a.count, a.lambda_max) {
        (Some(n), None) => SpectrumTarget::Count(n),
        (None, Some(x)) => SpectrumTarget::LambdaMax(x),
        _ => return Err("exactly one of --count and --lambda-max is required".into()),
    };
    let req = SpectrumRequest { target, ..SpectrumRequest::count(1) }.with_tol(a.tol);
    let secular = match a.method {
        Method::Fem => None,
        _ => Some(compute_spectrum(&g, &req)?),
    };
    let fem_values = match a.method {
        Method::Secular => Vec::new(),
        _ => match target {
            SpectrumTarget::Count(0) => Vec::new(),
            SpectrumTarget::Count(n) => fem::lowest_eigenvalues(&g, a.mesh_size, n)?,
            SpectrumTarget::LambdaMax(x) => fem::eigenvalues_below(&g, a.mesh_size, x)?,
        },
    };
    let secular_values = secular.as_ref().map(|l| truncated(l, target)).unwrap_or_default();
    let certified = secular.as_ref().map_or(true, |l| l.certified);

    let report = match a.out.format {
        Format::Csv => spectrum_csv(a.method, &secular_values, &fem_values),
        Format::Json => {
            let mut doc = json!({ "tol": a.tol, "certified": certified });
            if let Some(list) = &secular {
                doc["secular"] = serde_json::to_value(list)?;
            }
            if a.method != Method::Secular {
                doc["fem"] = json!({ "mesh_size": a.mesh_size, "values": fem_values });
            }
            serde_json::to_string_pretty(&doc)? + "\n"
        }
    };
    emit(a.out.output.as_deref(), &report)?;
    Ok(outcome(certified))
}

fn plot_data(r: &TraceAverageReport) -> String {
    let mut out = String::from("# N S_N\n");
    for (i, s) in r.partial_averages.iter().enumerate() {
        let _ = writeln!(out, "{} {}", i + 1, num(*s));
    }
    out
}

pub fn trace_avg(a: &TraceAvgArgs) -> CmdResult {
    let g = MetricGraph::load(&a.graph)?;
    let report = match trace_average(&g, a.count, a.tol) {
        Ok(r) => r,
        Err(Error::UncertifiedSpectrum { found, expected }) => {
            eprintln!(
                "flagged: spectrum incomplete ({found} eigenvalues found, Weyl estimate {expected}); no report written"
            );
            return Ok(Outcome::Uncertified);
        }
        Err(e) => return Err(e.into()),
    };
    let text = match a.out.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json() + "\n",
    };
    emit(a.out.output.as_deref(), &text)?;
    if let Some(plot) = &a.plot {
        write_atomic(plot, &plot_data(&report))?;
    }
    eprintln!(
        "N = {}: S_N = {:.10}, extrapolated = {:.10}, rhs = {:.10}, residual = {:.3e}",
        report.n_used,
        report.partial_averages[report.n_used - 1],
        report.extrapolated,
        report.rhs,
        report.residual
    );
    Ok(Outcome::Certified)
}

pub fn check(a: &CheckArgs) -> CmdResult {
    let g = MetricGraph::load(&a.graph)?;
    let v = check_conditions(&g, a.tol)?;
    let json = serde_json::to_string_pretty(&v)? + "\n";
    let line = format!(
        "verdict: {:?} (Phi1 = {:.12}, Phi2 = {:.12})",
        v.conclusion, v.phi1, v.phi2
    );
    match &a.output {
        Some(path) => {
            write_atomic(path, &json)?;
            println!("{line}");
        }
        None => {
            print!("{json}");
            eprintln!("{line}");
        }
    }
    Ok(Outcome::Certified)
}

const DEMO_TOL: f64 = 1e-10;

pub fn demo(a: &DemoArgs) -> CmdResult {
    let (fixture, file) = match a.name {
        DemoName::Counterexample => (fixtures::counterexample(), "counterexample.json"),
        DemoName::Star3 => (fixtures::star3(-1.0), "star3.json"),
        DemoName::Interval => (fixtures::interval(1.0), "interval.json"),
    };
    std::fs::create_dir_all(&a.dir)?;
    let path = a.dir.join(file);
    write_atomic(&path, &(fixture.to_spec().to_json() + "\n"))?;
    let g = MetricGraph::load(&path)?;
    println!("graph written to {}", path.display());
    match a.name {
        DemoName::Counterexample => demo_counterexample(&g),
        DemoName::Star3 => demo_star3(&g),
        DemoName::Interval => demo_interval(&g),
    }
}

fn verdict_lines(g: &MetricGraph) -> Result<(), Box<dyn StdError>> {
    print!("{}", check_conditions(g, CHECK_TOL)?.summary());
    Ok(())
}

fn demo_counterexample(g: &MetricGraph) -> CmdResult {
    println!("interval [0, 1/2], q(x) = 2/(1+x)^2, sigma = -1 at x = 0 and 2/3 at x = 1/2");
    let list = compute_spectrum(g, &SpectrumRequest::count(21).with_tol(DEMO_TOL))?;
    let values = truncated(&list, SpectrumTarget::Count(21));
    println!("{:>3}  {:>24}  {:>24}  {:>10}", "n", "lambda_n", "(2 n pi)^2", "error");
    let mut worst: f64 = 0.0;
    for (n, v) in values.iter().enumerate() {
        let want = (2.0 * n as f64 * PI).powi(2);
        let err = if n == 0 { v.abs() } else { (v - want).abs() / want };
        worst = worst.max(err);
        println!("{n:>3}  {v:>24.12}  {want:>24.12}  {err:>10.2e}");
    }
    let matches = worst <= 1e-6;
    println!(
        "first 21 eigenvalues match the Neumann spectrum within 1e-6: {}",
        if matches { "yes" } else { "no" }
    );
    let r = trace_average(g, 20, DEMO_TOL)?;
    println!(
        "trace average N = 20: S_N = {:.3e}, rhs = {:.3e}",
        r.partial_averages[19], r.rhs
    );
    verdict_lines(g)?;
    Ok(outcome(list.certified))
}

fn demo_star3(g: &MetricGraph) -> CmdResult {
    println!("unit 3-star, q = 0, sigma = -1 at the centre, standard conditions at the leaves");
    let list = compute_spectrum(g, &SpectrumRequest::count(6).with_tol(DEMO_TOL))?;
    println!("{:>3}  {:>24}  {:>4}", "i", "lambda", "mult");
    for (i, (v, m)) in list.values.iter().zip(&list.multiplicities).enumerate() {
        println!("{i:>3}  {v:>24.12}  {m:>4}");
    }
    let lambda0 = list.values[0];
    println!(
        "ground state {:.12} is {} the free ground state 0",
        lambda0,
        if lambda0 < 0.0 { "below" } else { "not below" }
    );
    let r = trace_average(g, 50, DEMO_TOL)?;
    println!(
        "trace average N = 50: Cesaro = {:.6}, extrapolated = {:.6}, rhs = {:.6}",
        r.cesaro[49], r.extrapolated, r.rhs
    );
    verdict_lines(g)?;
    Ok(outcome(list.certified))
}

fn demo_interval(g: &MetricGraph) -> CmdResult {
    println!("unit interval, q = 0, standard (Neumann) conditions");
    let list = compute_spectrum(g, &SpectrumRequest::count(8).with_tol(DEMO_TOL))?;
    println!("{:>3}  {:>24}  {:>24}  {:>10}", "n", "lambda_n", "(n pi)^2", "abs error");
    for (n, v) in truncated(&list, SpectrumTarget::Count(8)).iter().enumerate() {
        let want = (n as f64 * PI).powi(2);
        println!("{n:>3}  {v:>24.12}  {want:>24.12}  {:>10.2e}", (v - want).abs());
    }
    verdict_lines(g)?;
    Ok(outcome(list.certified))
}
