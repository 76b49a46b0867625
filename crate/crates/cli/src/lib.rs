//! Command-line front end. `main` forwards to [`run`]; tests call [`run_in`]
//! with a modified identity catalog.

use std::io::Write;
use std::path::PathBuf;

use abundancy::arith::{self, fraction_string, parse_ratio, Natural, Ratio};
use abundancy::bounds::{self, BoundsError, SpoofReport};
use abundancy::harness::{self, ReportFormat, ScanConfig, ScanReport};
use abundancy::ratfunc::{identity, Identity, IdentityTag};
use abundancy::real::significant_digits;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::One;
use serde_json::{json, Map, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Exact bounds on I(q^k) + I(n^2) for numbers of the form q^k n^2.
#[derive(Debug, Parser)]
#[command(name = "abundancy", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print L(q), U(q) and, when given k or n, g, f and the improved lower bound.
    Bounds(BoundsArgs),
    /// Check every symbolic identity.
    Verify {
        #[arg(long)]
        json: bool,
    },
    /// Solve for the crossover exponent K and check K < log_q(2n^2/rho).
    SolveK(SolveKArgs),
    /// Sweep a parameter grid and write a report.
    Scan(ScanArgs),
    /// Evaluate the five-member chain for a number with a designated pseudo-prime.
    SpoofCheck(SpoofArgs),
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub q: String,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub n: Option<String>,
    /// Lower bound on sigma(n^2)/q^k used by the improved bound (integer or a/b).
    #[arg(long, default_value = "1")]
    pub rho: String,
    /// Also render each value to this many significant digits.
    #[arg(long, value_name = "N")]
    pub decimal: Option<usize>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SolveKArgs {
    #[arg(long)]
    pub q: String,
    #[arg(long)]
    pub n: String,
    /// Lower bound on sigma(n^2)/q^k; the best known value is 3375.
    #[arg(long, default_value = "1")]
    pub rho: String,
    #[arg(long, default_value_t = 50)]
    pub digits: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Grid configuration (JSON). The built-in default grid when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Report path; overrides the config. The report goes to stdout when no path is set.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SpoofArgs {
    /// Use 3^2 7^2 11^2 13^2 22021 with pseudo-prime 22021.
    #[arg(long, conflicts_with_all = ["m", "factors"])]
    pub descartes: bool,
    #[arg(long, conflicts_with = "factors")]
    pub m: Option<String>,
    /// Comma-separated factors such as 3^2,7^2,22021.
    #[arg(long)]
    pub factors: Option<String>,
    /// The factor to treat as prime.
    #[arg(long, required_unless_present = "descartes")]
    pub pseudo: Option<String>,
    #[arg(long)]
    pub json: bool,
}

/// Everything the commands read besides their arguments.
pub struct Context {
    pub catalog: Vec<Identity>,
}

impl Default for Context {
    fn default() -> Self {
        Context { catalog: IdentityTag::ALL.iter().map(|&t| identity(t)).collect() }
    }
}

struct UsageError(String);

type CmdResult = Result<i32, UsageError>;

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_in(&Context::default(), args, out, err)
}

pub fn run_in<I, T>(ctx: &Context, args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Bounds(a) => cmd_bounds(&a, out),
        Command::Verify { json } => cmd_verify(ctx, json, out),
        Command::SolveK(a) => cmd_solve_k(&a, out),
        Command::Scan(a) => cmd_scan(&a, out),
        Command::SpoofCheck(a) => cmd_spoof_check(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn io(e: std::io::Error) -> UsageError {
    usage(format!("write failed: {e}"))
}

fn parse_natural(name: &str, s: &str) -> Result<Natural, UsageError> {
    s.trim().parse().map_err(|_| usage(format!("--{name}: not a natural number: {s:?}")))
}

fn parse_rho(s: &str) -> Result<Ratio, UsageError> {
    let r = parse_ratio(s).ok_or_else(|| usage(format!("--rho: not a rational number: {s:?}")))?;
    if r <= Ratio::from_integer(0.into()) {
        return Err(usage(format!("--rho must be positive, got {s}")));
    }
    Ok(r)
}

fn parse_q(s: &str) -> Result<Natural, UsageError> {
    let q = parse_natural("q", s)?;
    if q < Natural::from(5u32) {
        return Err(usage(format!("q = {q} must be at least 5")));
    }
    if !arith::is_prime(&q) {
        return Err(usage(format!("q = {q} is not prime")));
    }
    if &q % 4u32 != Natural::one() {
        return Err(usage(format!("q = {q} is not 1 mod 4")));
    }
    Ok(q)
}

fn parse_n(s: &str) -> Result<Natural, UsageError> {
    let n = parse_natural("n", s)?;
    if n < Natural::one() {
        return Err(usage("n must be positive"));
    }
    Ok(n)
}

fn cmd_bounds(a: &BoundsArgs, out: &mut dyn Write) -> CmdResult {
    let q = parse_q(&a.q)?;
    let rho = parse_rho(&a.rho)?;
    let n = a.n.as_deref().map(parse_n).transpose()?;
    if a.k == Some(0) {
        return Err(usage("k must be positive"));
    }
    if a.decimal == Some(0) {
        return Err(usage("--decimal needs at least one digit"));
    }

    let mut rows: Vec<(&str, Ratio)> = vec![("L", bounds::l_bound(&q)), ("U", bounds::u_bound(&q))];
    if let Some(k) = a.k {
        rows.push(("g", bounds::g_of_k(&q, k)));
        rows.push(("f", bounds::f_of_k(&q, k)));
    }
    let mut flags: Vec<(&str, bool)> = Vec::new();
    if let Some(n) = &n {
        let l1 = bounds::l1(&q, n);
        rows.push(("l1", l1.value));
        flags.push(("l1_admissible", l1.admissible));
        if !rho.is_one() {
            let lr = bounds::l_rho(&q, n, &rho);
            rows.push(("l_rho", lr.value));
            flags.push(("l_rho_admissible", lr.admissible));
        }
        if let Some(k) = a.k {
            let t = bounds::validate_euler(&q, k, n);
            flags.push(("euler_form", t.valid.all()));
        }
    }

    if a.json {
        let mut obj = Map::new();
        obj.insert("q".into(), json!(q.to_string()));
        if let Some(k) = a.k {
            obj.insert("k".into(), json!(k));
        }
        if let Some(n) = &n {
            obj.insert("n".into(), json!(n.to_string()));
            obj.insert("rho".into(), json!(fraction_string(&rho)));
        }
        for (name, v) in &rows {
            obj.insert((*name).into(), json!(fraction_string(v)));
        }
        if let Some(d) = a.decimal {
            let dec: Map<String, Value> =
                rows.iter().map(|(name, v)| ((*name).to_string(), json!(significant_digits(v, d)))).collect();
            obj.insert("decimal".into(), Value::Object(dec));
        }
        for (name, v) in &flags {
            obj.insert((*name).into(), json!(v));
        }
        writeln!(out, "{}", Value::Object(obj)).map_err(io)?;
    } else {
        for (name, v) in &rows {
            match a.decimal {
                Some(d) => writeln!(out, "{name} = {} ~ {}", fraction_string(v), significant_digits(v, d)),
                None => writeln!(out, "{name} = {}", fraction_string(v)),
            }
            .map_err(io)?;
        }
        for (name, v) in &flags {
            writeln!(out, "{name} = {v}").map_err(io)?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_verify(ctx: &Context, json: bool, out: &mut dyn Write) -> CmdResult {
    let report = harness::verify_identities(&ctx.catalog);
    if json {
        out.write_all(report.to_json().as_bytes()).map_err(io)?;
    } else {
        for r in &report.records {
            let status = if r.outcome == harness::Outcome::Pass { "PASS" } else { "FAIL" };
            writeln!(out, "{status} {}", r.check).map_err(io)?;
        }
    }
    Ok(if report.summary.failed == 0 { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_solve_k(a: &SolveKArgs, out: &mut dyn Write) -> CmdResult {
    let q = parse_q(&a.q)?;
    let n = parse_n(&a.n)?;
    let rho = parse_rho(&a.rho)?;
    if a.digits == 0 || a.digits > 80 {
        return Err(usage("--digits must be between 1 and 80"));
    }
    let ks = bounds::solve_k(&q, &n, &rho).map_err(|e| usage(e.to_string()))?;
    let window = arith::ratio_from(&(&n * &n * 2u32)) / arith::ratio_from(&(&q + 1u32));
    let k_text = ks.k.to_significant(a.digits);
    let rhs_text = ks.bound_rhs.to_significant(a.digits);
    let verdict = if ks.bound_holds { "PASS" } else { "FAIL" };
    let lo = format!("{q}^{}", ks.k_max + 1);
    let hi = format!("{q}^{}", ks.k_max + 2);
    if a.json {
        let v = json!({
            "q": q.to_string(),
            "n": n.to_string(),
            "rho": fraction_string(&ks.rho),
            "admissible": ks.admissible,
            "target": fraction_string(&ks.target),
            "K": k_text,
            "k_max": ks.k_max,
            "bound_rhs": rhs_text,
            "bracket": ks.bracket_holds(),
            "bound_holds": ks.bound_holds,
        });
        writeln!(out, "{v}").map_err(io)?;
    } else {
        if !ks.admissible {
            writeln!(
                out,
                "INADMISSIBLE: rho = {} is outside [1, 2n^2/(q+1)) = [1, {})",
                fraction_string(&ks.rho),
                fraction_string(&window)
            )
            .map_err(io)?;
        }
        writeln!(out, "q^(K+1) = {}", fraction_string(&ks.target)).map_err(io)?;
        writeln!(out, "K = {k_text}").map_err(io)?;
        writeln!(out, "k_max = {}", ks.k_max).map_err(io)?;
        let bracket = if ks.bracket_holds() { "holds" } else { "FAILS" };
        writeln!(out, "bracket {lo} <= q^(K+1) < {hi} {bracket}").map_err(io)?;
        writeln!(out, "bound_rhs = {rhs_text}").map_err(io)?;
        writeln!(out, "K < bound_rhs: {verdict}").map_err(io)?;
    }
    Ok(if !ks.admissible || (ks.bound_holds && ks.bracket_holds()) { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_scan(a: &ScanArgs, out: &mut dyn Write) -> CmdResult {
    let mut cfg = match &a.config {
        Some(path) => ScanConfig::from_path(path).map_err(|e| usage(e.to_string()))?,
        None => ScanConfig::default_grid(),
    };
    if a.workers.is_some() {
        cfg.workers = a.workers;
    }
    let mut target = cfg.output.take().map(|o| (o.path, o.format));
    if let Some(path) = &a.output {
        let format = target.as_ref().map(|t| t.1).unwrap_or_default();
        target = Some((path.clone(), format));
    }
    let format: ReportFormat = a.format.map(Into::into).or(target.as_ref().map(|t| t.1)).unwrap_or_default();
    let report: ScanReport = harness::run_scan(&cfg).map_err(|e| usage(e.to_string()))?;
    let s = report.summary;
    match target {
        Some((path, _)) => {
            report.write(&path, format).map_err(|e| usage(e.to_string()))?;
            writeln!(
                out,
                "total {} passed {} failed {} inadmissible {} -> {}",
                s.total,
                s.passed,
                s.failed,
                s.inadmissible,
                path.display()
            )
            .map_err(io)?;
        }
        None => out.write_all(report.render(format).as_bytes()).map_err(io)?,
    }
    Ok(if s.failed == 0 { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn parse_factors(s: &str) -> Result<Vec<(Natural, u32)>, UsageError> {
    s.split(',')
        .map(|part| {
            let part = part.trim();
            let (base, exp) = match part.split_once('^') {
                Some((b, e)) => (b, e.trim().parse::<u32>().map_err(|_| usage(format!("bad exponent in {part:?}")))?),
                None => (part, 1),
            };
            let base = parse_natural("factors", base)?;
            if base < Natural::from(2u32) || exp == 0 {
                return Err(usage(format!("bad factor {part:?}")));
            }
            Ok((base, exp))
        })
        .collect()
}

fn cmd_spoof_check(a: &SpoofArgs, out: &mut dyn Write) -> CmdResult {
    let result = if a.descartes {
        let pseudo = Natural::from(bounds::DESCARTES_PSEUDO_PRIME);
        bounds::spoof_check(&bounds::descartes_number(), &pseudo)
    } else {
        let pseudo = parse_natural("pseudo", a.pseudo.as_deref().unwrap_or_default())?;
        match (&a.m, &a.factors) {
            (Some(m), None) => bounds::spoof_check(&parse_natural("m", m)?, &pseudo),
            (None, Some(f)) => bounds::spoof_check_factors(&parse_factors(f)?, &pseudo),
            _ => return Err(usage("give exactly one of --descartes, --m or --factors")),
        }
    };
    let rep = result.map_err(|e: BoundsError| usage(e.to_string()))?;
    if a.json {
        writeln!(out, "{}", spoof_json(&rep)).map_err(io)?;
    } else {
        write_spoof(&rep, out).map_err(io)?;
    }
    Ok(if rep.chain_holds() { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn spoof_json(rep: &SpoofReport) -> Value {
    let members: Vec<Value> = rep
        .members
        .iter()
        .map(|(name, v)| json!({ "name": name, "value": fraction_string(v) }))
        .collect();
    json!({
        "m": rep.m.to_string(),
        "q": rep.q.to_string(),
        "k": rep.k,
        "n": rep.n.to_string(),
        "n_squared": rep.n_squared.to_string(),
        "sigma_q_pretend": rep.sigma_q_pretend.to_string(),
        "sigma_n_squared": rep.sigma_n_squared.to_string(),
        "members": members,
        "chain_holds": rep.chain_holds(),
        "gcd_formula": rep.gcd_formula.to_string(),
        "gcd_formula_matches": rep.gcd_formula_matches(),
        "pseudo_perfect": rep.pseudo_perfect,
    })
}

fn write_spoof(rep: &SpoofReport, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "m = {}", rep.m)?;
    writeln!(out, "q = {} (treated as prime), k = {}, n = {}, n^2 = {}", rep.q, rep.k, rep.n, rep.n_squared)?;
    writeln!(out, "sigma(q^k) = {} (as if q were prime), sigma(n^2) = {}", rep.sigma_q_pretend, rep.sigma_n_squared)?;
    let head = &rep.members[0].1;
    for (i, (name, v)) in rep.members.iter().enumerate() {
        let mark = if i == 0 {
            String::new()
        } else if v == head {
            "  == [1]".to_string()
        } else {
            "  != [1]".to_string()
        };
        writeln!(out, "[{}] {name} = {}{mark}", i + 1, fraction_string(v))?;
    }
    let gmark = if rep.gcd_formula_matches() { "==" } else { "!=" };
    writeln!(out, "q*sigma(n^2) - 2(q-1)n^2 = {}  {gmark} [3]", rep.gcd_formula)?;
    writeln!(out, "sigma(q^k)*sigma(n^2) = 2m: {}", rep.pseudo_perfect)?;
    writeln!(out, "chain: {}", if rep.chain_holds() { "all equal" } else { "NOT all equal" })
}
