//! Command-line front end. [`run`] parses arguments, executes one
//! subcommand and returns the process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | usage or input error |
//! | 2 | capacity exceeded |
//! | 3 | a check found a violation |

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::arith::{gcd_u128, jacobi_divisor_sum, primes_up_to, rho, ExactInt};
use crate::densities::{density_row, lower_bound_sum, DensityVariant, Exponent};
use crate::empirical::{
    bound_value, count_solutions, ratio_scan, DyadicTuple7, Variant, DEFAULT_CELL_BUDGET,
};
use crate::enumeration::{
    count, count_star, naive_height_counts, naive_points, torsor_tuples, CountReport, Method,
    StarMethod, NAIVE_LIMIT,
};
use crate::error::{Error, Result};
use crate::index::Pair;
use crate::lattice::{
    check_ellipse_bound_random, check_plane_bound_random, count_primitive_on_plane,
    divisibility_lattice_det, primitive_plane_bound, PlaneBoxQuery, DEFAULT_CELL_BUDGET as CELLS,
};
use crate::surface::CayleyPoint;
use crate::torsor::{check_quadratic_identity, decompose, reconstruct, v_matrix, validate};

pub const SCAN_NOTE: &str =
    "the limiting constant of N(B)/(B (ln B)^6) is not determined at this scale";

#[derive(Parser, Debug)]
#[command(name = "cayley", version, about = "Integral points on the Cayley cubic")]
struct Cli {
    /// Output format; tables default to csv, decompose to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write results here instead of standard output.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    /// Cap on worker threads.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Include elapsed time in count reports.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Naive,
    Torsor,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Naive => Method::Naive,
            MethodArg::Torsor => Method::Torsor,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// N(B) for one height bound.
    Count {
        #[arg(long = "max-b")]
        max_b: f64,
        #[arg(long, value_enum, default_value = "torsor")]
        method: MethodArg,
        /// Also report N*(B).
        #[arg(long)]
        star: bool,
    },
    /// N(B) and the growth ratio along a ladder of heights.
    Scan {
        #[arg(long, value_delimiter = ',', required = true)]
        ladder: Vec<f64>,
        #[arg(long, value_enum, default_value = "torsor")]
        method: MethodArg,
    },
    /// Torsor coordinates of a primitive point of U.
    Decompose {
        #[arg(allow_negative_numbers = true, num_args = 4, required = true)]
        x: Vec<ExactInt>,
    },
    /// Round trips, identities and oracle equivalence up to a height.
    Verify {
        #[arg(long = "max-b")]
        max_b: u32,
    },
    /// Local densities against their residue-count oracles.
    Densities {
        #[arg(long = "p-max")]
        p_max: u64,
        /// Also compare the special density with this exponent.
        #[arg(long)]
        special: Option<u32>,
    },
    /// rho(q; a, b) by direct scan and by the Jacobi-symbol sum.
    Rho {
        #[arg(long)]
        q: u64,
        #[arg(long, allow_negative_numbers = true)]
        a: ExactInt,
        #[arg(long, allow_negative_numbers = true)]
        b: ExactInt,
        /// Fail unless the two evaluations agree (odd q, hcf(ab, q) = 1).
        #[arg(long)]
        check: bool,
    },
    /// Primitive points on a plane in a box against their bound.
    Lemma6(Lemma6Args),
    /// Lattice points in an ellipse against their bound.
    Lemma7 {
        #[arg(long)]
        random: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Exact counters for the dyadic divisor equations.
    Lemma34(Lemma34Args),
    /// The squarefree lower-bound sum.
    Lowerbound {
        #[arg(long)]
        b: f64,
        #[arg(long, default_value = "1/84")]
        delta: Exponent,
    },
    /// Index of the divisibility lattice for moduli m1..m4.
    LatticeDet {
        #[arg(num_args = 4, required = true)]
        m: Vec<u64>,
    },
}

#[derive(Args, Debug)]
#[group(required = true)]
struct Lemma6Args {
    #[arg(long, conflicts_with_all = ["v", "h"], requires = "seed")]
    random: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, requires = "h")]
    v: Option<Vec<i64>>,
    #[arg(long, value_delimiter = ',', requires = "v")]
    h: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct Lemma34Args {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    which: u8,
    #[arg(long, value_delimiter = ',', conflicts_with = "random")]
    k: Option<Vec<f64>>,
    #[arg(long, requires = "seed", required_unless_present = "k")]
    random: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 10_000)]
    budget: u128,
}

/// Tabular output with a JSON twin.
struct Report {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    json: Value,
    comments: Vec<String>,
    violation: bool,
}

impl Report {
    fn new(header: Vec<&'static str>, json: Value) -> Self {
        Report {
            header,
            rows: Vec::new(),
            json,
            comments: Vec::new(),
            violation: false,
        }
    }

    fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string(&self.json)
                    .map_err(|e| Error::Internal(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| Error::Internal(e.to_string());
                w.write_record(&self.header).map_err(io)?;
                for r in &self.rows {
                    w.write_record(r).map_err(io)?;
                }
                let mut s = String::from_utf8(w.into_inner().map_err(|e| Error::Internal(e.to_string()))?)
                    .map_err(|e| Error::Internal(e.to_string()))?;
                for c in &self.comments {
                    s.push_str("# ");
                    s.push_str(c);
                    s.push('\n');
                }
                Ok(s)
            }
        }
    }
}

/// `%.12g`-style rendering.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    let trim = |s: String| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-5..12).contains(&exp) {
        trim(format!("{:.*}", (11 - exp) as usize, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mant.to_string()), exp.abs())
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn real_json(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

fn count_rows(reports: &[CountReport], timing: bool) -> (Vec<&'static str>, Vec<Vec<String>>, Value) {
    let mut header = vec!["B", "N", "Nstar", "ratio", "method"];
    if timing {
        header.push("elapsed_seconds");
    }
    let mut rows = Vec::new();
    let mut json = Vec::new();
    for r in reports {
        let mut r = r.clone();
        if !timing {
            r.elapsed_seconds = None;
        }
        let mut row = vec![
            fmt_real(r.b),
            r.n.to_string(),
            opt(r.nstar),
            r.ratio.map(fmt_real).unwrap_or_default(),
            r.method.name().to_string(),
        ];
        if let Some(t) = r.elapsed_seconds {
            row.push(fmt_real(t));
        }
        rows.push(row);
        json.push(serde_json::to_value(&r).expect("plain data"));
    }
    (header, rows, Value::Array(json))
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::Capacity { .. } => 2,
        _ => 1,
    }
}

/// Parses `argv` (program name first), runs one subcommand and returns the
/// exit code. Diagnostics go to standard error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            if !e.use_stderr() {
                let _ = e.print();
                return 0;
            }
            let text = e.render().to_string();
            eprint!("{text}");
            if !text.contains("Usage:") {
                eprintln!("\n{}", Cli::command().render_usage());
            }
            return 1;
        }
    };
    let started = Instant::now();
    let result = match cli.workers {
        Some(0) => Err(Error::InvalidInput("--workers must be positive".into())),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Internal(e.to_string()))
            .and_then(|pool| pool.install(|| execute(&cli))),
        None => execute(&cli),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return error_code(&e);
        }
    };
    let format = cli.format.unwrap_or(match cli.command {
        Command::Decompose { .. } => Format::Json,
        _ => Format::Csv,
    });
    let text = match report.render(format) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return 1;
    }
    if cli.timing {
        eprintln!("elapsed: {:.3}s", started.elapsed().as_secs_f64());
    }
    if report.violation {
        eprintln!("check failed: violations detected");
        3
    } else {
        0
    }
}

fn execute(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Count { max_b, method, star } => {
            let method = Method::from(*method);
            let mut r = count(*max_b, method)?;
            if *star {
                let how = match method {
                    Method::Naive => StarMethod::Direct,
                    Method::Torsor => StarMethod::Convolution,
                };
                r.nstar = Some(count_star(*max_b, how)?);
            }
            let (header, rows, json) = count_rows(&[r], cli.timing);
            let mut rep = Report::new(header, json[0].clone());
            rep.rows = rows;
            Ok(rep)
        }
        Command::Scan { ladder, method } => {
            let reports = crate::densities::ratio_report(ladder, Method::from(*method))?;
            let (header, rows, json) = count_rows(&reports, cli.timing);
            let monotone = reports.windows(2).all(|w| w[0].n <= w[1].n || w[0].b > w[1].b);
            let mut rep = Report::new(header, json!({ "reports": json, "note": SCAN_NOTE }));
            rep.rows = rows;
            rep.comments.push(format!("note: {SCAN_NOTE}"));
            rep.violation = !monotone;
            Ok(rep)
        }
        Command::Decompose { x } => {
            let p = CayleyPoint::new(x[0], x[1], x[2], x[3]);
            let d = decompose(&p)?;
            let j = d.to_json()?;
            let mut header = vec!["sign", "y1", "y2", "y3", "y4"];
            header.extend(["z12", "z13", "z14", "z23", "z24", "z34"]);
            header.extend(["A1", "A2", "A3", "A4", "B1", "B2", "B3", "B4", "P"]);
            header.extend(["v12", "v13", "v14", "v23", "v24", "v34"]);
            let mut row = vec![d.sign.to_string()];
            row.extend(j.y.iter().map(|v| v.to_string()));
            row.extend(d.coords.z.iter().map(|v| v.to_string()));
            row.extend(j.a.iter().chain(&j.b).map(|v| v.to_string()));
            row.push(j.p.to_string());
            row.extend(v_matrix(&d.coords)?.iter().map(|v| v.to_string()));
            let mut rep = Report::new(header, serde_json::to_value(&j).expect("plain data"));
            rep.rows.push(row);
            Ok(rep)
        }
        Command::Verify { max_b } => verify(*max_b),
        Command::Densities { p_max, special } => {
            if *p_max < 2 {
                return Err(Error::InvalidInput("--p-max must be at least 2".into()));
            }
            let header = vec!["p", "variant", "e", "density_formula", "density_bruteforce", "equal"];
            let mut rep = Report::new(header, Value::Null);
            let mut rows = Vec::new();
            for p in primes_up_to(*p_max) {
                rows.push(density_row(p, DensityVariant::Generic)?);
                if let Some(e) = special {
                    rows.push(density_row(p, DensityVariant::Special(*e))?);
                }
            }
            for r in &rows {
                rep.rows.push(vec![
                    r.p.to_string(),
                    r.variant.to_string(),
                    opt(r.e),
                    r.density_formula.clone(),
                    r.density_bruteforce.clone(),
                    u8::from(r.equal).to_string(),
                ]);
            }
            rep.violation = rows.iter().any(|r| !r.equal);
            rep.json = serde_json::to_value(&rows).expect("plain data");
            Ok(rep)
        }
        Command::Rho { q, a, b, check } => {
            if *q == 0 {
                return Err(Error::InvalidInput("--q must be positive".into()));
            }
            let direct = rho(*q, *a, *b);
            let jac = jacobi_divisor_sum(*q, *a, *b);
            let mut rep = Report::new(
                vec!["q", "a", "b", "rho_direct", "jacobi_sum"],
                json!({ "q": q, "a": a, "b": b, "rho_direct": direct, "jacobi_sum": jac }),
            );
            rep.rows.push(vec![
                q.to_string(),
                a.to_string(),
                b.to_string(),
                direct.to_string(),
                jac.to_string(),
            ]);
            if *check {
                let ab = (a.unsigned_abs() % *q as u128) * (b.unsigned_abs() % *q as u128);
                if q % 2 == 0 || gcd_u128(ab, *q as u128) != 1 {
                    return Err(Error::InvalidInput(
                        "--check needs odd q with hcf(ab, q) = 1".into(),
                    ));
                }
                rep.violation = direct as i64 != jac;
            }
            Ok(rep)
        }
        Command::Lemma6(args) => lemma6(args),
        Command::Lemma7 { random, seed } => {
            let c = check_ellipse_bound_random(*random, *seed)?;
            let mut rep = Report::new(
                vec!["trials", "violations", "max_ratio"],
                serde_json::to_value(&c).expect("plain data"),
            );
            rep.rows.push(vec![
                c.trials.to_string(),
                c.violations.to_string(),
                fmt_real(c.max_ratio),
            ]);
            rep.violation = c.violations > 0;
            Ok(rep)
        }
        Command::Lemma34(args) => lemma34(args),
        Command::Lowerbound { b, delta } => {
            let v = lower_bound_sum(*b, *delta)?;
            let d = format!("{}/{}", delta.num, delta.den);
            let mut rep = Report::new(
                vec!["B", "delta", "sum"],
                json!({ "B": b, "delta": d, "sum": real_json(v) }),
            );
            rep.rows.push(vec![fmt_real(*b), d, fmt_real(v)]);
            Ok(rep)
        }
        Command::LatticeDet { m } => {
            let m4 = [m[0], m[1], m[2], m[3]];
            let det = divisibility_lattice_det(m4)?;
            let mut rep = Report::new(
                vec!["m1", "m2", "m3", "m4", "det"],
                json!({ "m": m4, "det": det }),
            );
            let mut row: Vec<String> = m4.iter().map(|v| v.to_string()).collect();
            row.push(det.to_string());
            rep.rows.push(row);
            Ok(rep)
        }
    }
}

fn lemma6(args: &Lemma6Args) -> Result<Report> {
    if let Some(n) = args.random {
        let seed = args.seed.expect("clap requires --seed");
        let c = check_plane_bound_random(n, seed)?;
        let mut rep = Report::new(
            vec!["trials", "violations", "max_ratio"],
            serde_json::to_value(&c).expect("plain data"),
        );
        rep.rows.push(vec![
            c.trials.to_string(),
            c.violations.to_string(),
            fmt_real(c.max_ratio),
        ]);
        rep.violation = c.violations > 0;
        return Ok(rep);
    }
    let (v, h) = match (&args.v, &args.h) {
        (Some(v), Some(h)) => (v, h),
        _ => return Err(Error::InvalidInput("give --random or both --v and --h".into())),
    };
    if v.len() != 3 || h.len() != 3 {
        return Err(Error::InvalidInput("--v and --h take three comma-separated values".into()));
    }
    let q = PlaneBoxQuery::new([v[0], v[1], v[2]], [h[0], h[1], h[2]])?;
    let count = count_primitive_on_plane(&q, CELLS)?;
    let bound = primitive_plane_bound(&q);
    let mut rep = Report::new(
        vec!["v1", "v2", "v3", "h1", "h2", "h3", "count", "bound"],
        json!({ "v": v, "h": h, "count": count, "bound": real_json(bound) }),
    );
    let mut row: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    row.extend(h.iter().map(|&x| fmt_real(x)));
    row.push(count.to_string());
    row.push(fmt_real(bound));
    rep.rows.push(row);
    rep.violation = count as f64 > bound;
    Ok(rep)
}

fn lemma34(args: &Lemma34Args) -> Result<Report> {
    let variant: Variant = args.which.to_string().parse()?;
    let mut header = vec!["variant", "K1", "K2", "K3", "K4", "K5", "K6", "K7"];
    header.extend(["count", "bound_value", "ratio"]);
    let row = |k: &[f64; 7], count: u64, bound: f64| {
        let mut r = vec![variant.to_string()];
        r.extend(k.iter().map(|&x| fmt_real(x)));
        r.push(count.to_string());
        r.push(fmt_real(bound));
        r.push(fmt_real(count as f64 / bound));
        r
    };
    if let Some(k) = &args.k {
        if k.len() != 7 {
            return Err(Error::InvalidInput("--k takes seven comma-separated values".into()));
        }
        let t = DyadicTuple7::new([k[0], k[1], k[2], k[3], k[4], k[5], k[6]])?;
        let count = count_solutions(variant, &t, DEFAULT_CELL_BUDGET)?;
        let bound = bound_value(variant, &t);
        let mut rep = Report::new(
            header,
            json!({
                "variant": variant, "K": t.bases(), "count": count,
                "bound_value": real_json(bound), "ratio": real_json(count as f64 / bound)
            }),
        );
        rep.rows.push(row(&t.bases(), count, bound));
        return Ok(rep);
    }
    let trials = args.random.expect("clap requires --k or --random");
    let seed = args.seed.expect("clap requires --seed");
    let scan = ratio_scan(variant, trials, seed, args.budget)?;
    let mut rep = Report::new(header, serde_json::to_value(&scan).expect("plain data"));
    for r in &scan.rows {
        rep.rows.push(row(&r.k, r.count, r.bound_value));
    }
    rep.comments
        .push(format!("max_ratio: {}", scan.max_ratio.map(fmt_real).unwrap_or_default()));
    Ok(rep)
}

fn verify(max_b: u32) -> Result<Report> {
    let b = max_b as f64;
    if b < 1.0 || b > NAIVE_LIMIT {
        return Err(if b < 1.0 {
            Error::InvalidInput("--max-b must be at least 1".into())
        } else {
            Error::capacity("verify", format!("--max-b exceeds {NAIVE_LIMIT}"))
        });
    }
    let mut checks: Vec<(&'static str, u64, u64)> = Vec::new();

    let hist = naive_height_counts(b, false)?;
    let mut running = 0;
    let mut bad = 0;
    for h in 1..=max_b as usize {
        running += hist[h];
        if count(h as f64, Method::Torsor)?.n != running {
            bad += 1;
        }
    }
    checks.push(("oracle_equivalence", max_b as u64, bad));

    let points = naive_points(b)?;
    let mut bad = 0;
    for x in &points {
        let ok = decompose(x)
            .and_then(|d| Ok(d.sign == 1 && reconstruct(&d.coords)? == *x))
            .unwrap_or(false);
        bad += u64::from(!ok);
    }
    checks.push(("round_trip_points", points.len() as u64, bad));

    let tuples = torsor_tuples(b)?;
    let (mut rt, mut eq, mut pair, mut quad) = (0, 0, 0, 0);
    for t in &tuples {
        let ok = reconstruct(t)
            .and_then(|x| decompose(&x))
            .map(|d| d.sign == 1 && d.coords == *t)
            .unwrap_or(false);
        rt += u64::from(!ok);
        eq += u64::from(!validate(t).is_empty());
        let pairs_ok = v_matrix(t)
            .map(|v| {
                Pair::ALL
                    .iter()
                    .filter(|p| p.contains(0))
                    .all(|p| v[p.index()] + v[p.complement().index()] == 0)
            })
            .unwrap_or(false);
        pair += u64::from(!pairs_ok);
        quad += u64::from(!check_quadratic_identity(t).unwrap_or(false));
    }
    let n = tuples.len() as u64;
    checks.push(("round_trip_tuples", n, rt));
    checks.push(("torsor_equation", n, eq));
    checks.push(("v_pairings", n, pair));
    checks.push(("quadratic_identity", n, quad));

    let mut rep = Report::new(vec!["check", "cases", "failures"], Value::Null);
    rep.json = Value::Array(
        checks
            .iter()
            .map(|(c, n, f)| json!({ "check": c, "cases": n, "failures": f }))
            .collect(),
    );
    for (c, n, f) in &checks {
        rep.rows.push(vec![c.to_string(), n.to_string(), f.to_string()]);
    }
    rep.violation = checks.iter().any(|c| c.2 > 0);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_real(184.0 / 3.0), "61.3333333333");
        assert_eq!(fmt_real(10000.0), "10000");
        assert_eq!(fmt_real(0.125), "0.125");
        assert_eq!(fmt_real(1e-7), "1e-07");
        assert_eq!(fmt_real(2.5e13), "2.5e+13");
        assert_eq!(fmt_real(0.0001234), "0.0001234");
        assert_eq!(fmt_real(-3.0), "-3");
        assert_eq!(fmt_real(999999999999.5), "1e+12");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["cayley", "count", "--max-b"]), 1);
        assert_eq!(run(["cayley", "--help"]), 0);
        assert_eq!(run(["cayley", "bogus"]), 1);
        assert_eq!(run(["cayley", "count", "--max-b", "1000", "--method", "naive"]), 2);
        assert_eq!(run(["cayley", "decompose", "1", "1", "1", "1"]), 1);
        assert_eq!(run(["cayley", "rho", "--q", "9", "--a", "1", "--b", "1", "--check"]), 0);
    }
}
