//! Grid sweeps over `(q, k, n, rho)` with machine-readable reports.
//!
//! Each suite depends on a subset of the four parameters and is evaluated
//! once per distinct value of that subset. Work units run on a rayon pool
//! and are merged back in canonical order, so the report does not depend on
//! the number of workers.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, fraction_string, parse_ratio, ratio_from, Natural, Ratio};
use crate::bounds;
use crate::ratfunc::{identity, Assignment, Identity, IdentityTag, RatFuncError, Var};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("config JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("I/O on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("thread pool: {0}")]
    Pool(String),
}

fn config_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Sandwich,
    FailedSandwich,
    ImprovedLower,
    Monotonicity,
    FprimePositivity,
    KBound,
    Chain,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Sandwich,
        Suite::FailedSandwich,
        Suite::ImprovedLower,
        Suite::Monotonicity,
        Suite::FprimePositivity,
        Suite::KBound,
        Suite::Chain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Sandwich => "sandwich",
            Suite::FailedSandwich => "failed-sandwich",
            Suite::ImprovedLower => "improved-lower",
            Suite::Monotonicity => "monotonicity",
            Suite::FprimePositivity => "fprime-positivity",
            Suite::KBound => "k-bound",
            Suite::Chain => "chain",
        }
    }

    // which of (k, n, rho) the suite reads; q is always used
    fn uses(self) -> (bool, bool, bool) {
        match self {
            Suite::Sandwich | Suite::Monotonicity | Suite::FprimePositivity => (true, false, false),
            Suite::FailedSandwich => (false, false, false),
            Suite::ImprovedLower | Suite::KBound => (false, true, true),
            Suite::Chain => (true, true, true),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| config_err(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(config_err(format!("unknown report format {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputSpec {
    pub path: PathBuf,
    #[serde(default)]
    pub format: ReportFormat,
}

/// A number given either as a JSON integer or as a decimal/fraction string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberSpec {
    Int(u64),
    Text(String),
}

impl NumberSpec {
    fn natural(&self) -> Result<Natural, HarnessError> {
        match self {
            NumberSpec::Int(v) => Ok(Natural::from(*v)),
            NumberSpec::Text(s) => s
                .trim()
                .parse()
                .map_err(|_| config_err(format!("not a natural number: {s:?}"))),
        }
    }

    fn ratio(&self) -> Result<Ratio, HarnessError> {
        match self {
            NumberSpec::Int(v) => Ok(ratio_from(&Natural::from(*v))),
            NumberSpec::Text(s) => {
                parse_ratio(s).ok_or_else(|| config_err(format!("not a rational number: {s:?}")))
            }
        }
    }
}

impl From<u64> for NumberSpec {
    fn from(v: u64) -> Self {
        NumberSpec::Int(v)
    }
}

/// Raw scan configuration as read from JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    #[serde(alias = "q")]
    pub q_set: Vec<NumberSpec>,
    #[serde(alias = "k")]
    pub k_set: Vec<u32>,
    #[serde(alias = "n")]
    pub n_set: Vec<NumberSpec>,
    #[serde(alias = "rho")]
    pub rho_set: Vec<NumberSpec>,
    /// All suites when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suites: Option<Vec<Suite>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl ScanConfig {
    pub fn default_grid() -> Self {
        let nums = |v: &[u64]| v.iter().map(|&x| NumberSpec::Int(x)).collect();
        ScanConfig {
            q_set: nums(&[5, 13, 17, 29, 37, 41, 53]),
            k_set: vec![1, 5, 9, 13],
            n_set: nums(&[3, 9, 15, 21, 3003]),
            rho_set: nums(&[1, 2, 3375]),
            suites: None,
            output: None,
            workers: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    /// Parses, checks and canonicalizes the grid (sorted, deduplicated).
    pub fn validate(&self) -> Result<Grid, HarnessError> {
        if self.q_set.is_empty() {
            return Err(config_err("q_set is empty"));
        }
        if self.k_set.is_empty() {
            return Err(config_err("k_set is empty"));
        }
        if self.n_set.is_empty() {
            return Err(config_err("n_set is empty"));
        }
        if self.rho_set.is_empty() {
            return Err(config_err("rho_set is empty"));
        }
        let mut q: Vec<Natural> = self.q_set.iter().map(NumberSpec::natural).collect::<Result<_, _>>()?;
        for x in &q {
            if !arith::is_prime(x) {
                return Err(config_err(format!("q = {x} is not prime")));
            }
            if x % 4u32 != Natural::one() {
                return Err(config_err(format!("q = {x} is not 1 mod 4")));
            }
        }
        let mut k = self.k_set.clone();
        if k.contains(&0) {
            return Err(config_err("k must be positive"));
        }
        let mut n: Vec<Natural> = self.n_set.iter().map(NumberSpec::natural).collect::<Result<_, _>>()?;
        for x in &n {
            if x.is_even() {
                return Err(config_err(format!("n = {x} is not odd")));
            }
        }
        let mut rho: Vec<Ratio> = self.rho_set.iter().map(NumberSpec::ratio).collect::<Result<_, _>>()?;
        for x in &rho {
            if *x <= Ratio::zero() {
                return Err(config_err(format!("rho = {x} is not positive")));
            }
        }
        let mut suites = self.suites.clone().unwrap_or_else(|| Suite::ALL.to_vec());
        if suites.is_empty() {
            return Err(config_err("suites is empty"));
        }
        if self.workers == Some(0) {
            return Err(config_err("workers must be positive"));
        }
        q.sort();
        q.dedup();
        k.sort();
        k.dedup();
        n.sort();
        n.dedup();
        rho.sort();
        rho.dedup();
        suites.sort();
        suites.dedup();
        Ok(Grid { q, k, n, rho, suites })
    }
}

/// A validated, canonically ordered grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    pub q: Vec<Natural>,
    pub k: Vec<u32>,
    pub n: Vec<Natural>,
    pub rho: Vec<Ratio>,
    pub suites: Vec<Suite>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Inadmissible,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Inadmissible => "inadmissible",
        })
    }
}

/// One check at one point. Parameters a suite does not read are empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckRecord {
    pub point_q: String,
    pub point_k: String,
    pub point_n: String,
    pub point_rho: String,
    pub suite: String,
    pub check: String,
    pub outcome: Outcome,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub inadmissible: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanReport {
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonEntry {
    Record(CheckRecord),
    Summary { summary: Summary },
}

pub const CSV_HEADER: [&str; 9] =
    ["point_q", "point_k", "point_n", "point_rho", "suite", "check", "outcome", "lhs", "rhs"];

impl ScanReport {
    pub fn from_records(records: Vec<CheckRecord>) -> Self {
        let mut summary = Summary { total: records.len(), ..Summary::default() };
        for r in &records {
            match r.outcome {
                Outcome::Pass => summary.passed += 1,
                Outcome::Fail => summary.failed += 1,
                Outcome::Inadmissible => summary.inadmissible += 1,
            }
        }
        ScanReport { records, summary }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.outcome == Outcome::Fail)
    }

    /// JSON array of records with a trailing `{"summary": ...}` object.
    pub fn to_json(&self) -> String {
        let mut entries: Vec<JsonEntry> =
            self.records.iter().cloned().map(JsonEntry::Record).collect();
        entries.push(JsonEntry::Summary { summary: self.summary });
        let mut s = serde_json::to_string_pretty(&entries).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let entries: Vec<JsonEntry> = serde_json::from_str(text)?;
        let mut records = Vec::new();
        let mut summary = None;
        for e in entries {
            match e {
                JsonEntry::Record(r) if summary.is_none() => records.push(r),
                JsonEntry::Summary { summary: s } if summary.is_none() => summary = Some(s),
                _ => return Err(config_err("report entries after the summary")),
            }
        }
        let summary = summary.ok_or_else(|| config_err("report has no summary"))?;
        let report = ScanReport::from_records(records);
        if report.summary != summary {
            return Err(config_err("report summary does not match its records"));
        }
        Ok(report)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for r in &self.records {
            w.serialize(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8")
    }

    pub fn from_csv(text: &str) -> Result<Vec<CheckRecord>, HarnessError> {
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        if rd.headers()?.iter().ne(CSV_HEADER) {
            return Err(config_err("unexpected CSV header"));
        }
        Ok(rd.deserialize().collect::<Result<_, _>>()?)
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => self.to_json(),
            ReportFormat::Csv => self.to_csv(),
        }
    }

    pub fn write(&self, path: &Path, format: ReportFormat) -> Result<(), HarnessError> {
        std::fs::write(path, self.render(format))
            .map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })
    }
}

#[derive(Debug, Clone)]
struct Point {
    q: Natural,
    k: Option<u32>,
    n: Option<Natural>,
    rho: Option<Ratio>,
}

struct Rows<'a> {
    point: &'a Point,
    suite: Suite,
    out: Vec<CheckRecord>,
}

impl<'a> Rows<'a> {
    fn new(point: &'a Point, suite: Suite) -> Self {
        Rows { point, suite, out: Vec::new() }
    }

    fn push(&mut self, check: impl Into<String>, outcome: Outcome, lhs: String, rhs: String) {
        let p = self.point;
        self.out.push(CheckRecord {
            point_q: p.q.to_string(),
            point_k: p.k.map(|k| k.to_string()).unwrap_or_default(),
            point_n: p.n.as_ref().map(|n| n.to_string()).unwrap_or_default(),
            point_rho: p.rho.as_ref().map(fraction_string).unwrap_or_default(),
            suite: self.suite.name().to_string(),
            check: check.into(),
            outcome,
            lhs,
            rhs,
        });
    }

    fn cmp(&mut self, check: &str, held: bool, lhs: &Ratio, rhs: &Ratio) {
        let outcome = if held { Outcome::Pass } else { Outcome::Fail };
        self.push(check, outcome, fraction_string(lhs), fraction_string(rhs));
    }

    fn inadmissible(&mut self, check: &str, lhs: &Ratio, rhs: &Ratio) {
        self.push(check, Outcome::Inadmissible, fraction_string(lhs), fraction_string(rhs));
    }
}

fn int(v: i64) -> Ratio {
    Ratio::from_integer(v.into())
}

fn big(v: BigInt) -> Ratio {
    Ratio::from_integer(v)
}

// records an inadmissible row and returns false when q^k n^2 cannot be of
// Euler form because q divides n
fn coprime_guard(q: &Natural, n: &Natural, rows: &mut Rows) -> bool {
    let g = q.gcd(n);
    if g.is_one() {
        return true;
    }
    rows.inadmissible("gcd(q,n)=1", &ratio_from(&g), &int(1));
    false
}

fn eval_sandwich(p: &Point, rows: &mut Rows) {
    let k = p.k.expect("sandwich reads k");
    let l = bounds::l_bound(&p.q);
    let u = bounds::u_bound(&p.q);
    let g = bounds::g_of_k(&p.q, k);
    rows.cmp("L<g", l < g, &l, &g);
    rows.cmp("g<=U", g <= u, &g, &u);
    rows.cmp("g=U iff k=1", (g == u) == (k == 1), &g, &u);
}

fn eval_failed_sandwich(p: &Point, rows: &mut Rows) {
    let (lo, hi) = bounds::deficiency_product_interval(&p.q);
    let l = bounds::l_bound(&p.q);
    let u = bounds::u_bound(&p.q);
    rows.cmp("lower<L", lo < l, &lo, &l);
    rows.cmp("U<upper", u < hi, &u, &hi);
}

fn eval_monotonicity(p: &Point, rows: &mut Rows) {
    let k = p.k.expect("monotonicity reads k");
    let g = bounds::g_of_k(&p.q, k);
    let g_next = bounds::g_of_k(&p.q, k + 1);
    rows.cmp("g(k+1)<g(k)", g_next < g, &g_next, &g);
    let f = bounds::f_of_k(&p.q, k);
    let sum = &f + &g;
    rows.cmp("f+g=3", sum == int(3), &sum, &int(3));
}

fn eval_fprime(p: &Point, rows: &mut Rows) {
    let k = p.k.expect("fprime reads k");
    let num = bounds::f_prime_numerator(&p.q, k);
    let held = num > BigInt::zero();
    rows.cmp("numerator>0", held, &big(num), &int(0));
}

fn eval_improved_lower(p: &Point, grid: &Grid, rows: &mut Rows) {
    let (q, n, rho) = (&p.q, p.n.as_ref().expect("n"), p.rho.as_ref().expect("rho"));
    let l = bounds::l_bound(q);
    let u = bounds::u_bound(q);
    if !coprime_guard(q, n, rows) {
        return;
    }
    let lr = bounds::l_rho(q, n, rho);
    if !lr.admissible {
        let window = ratio_from(&(n * n * 2u32)) / ratio_from(&(q + 1u32));
        rows.inadmissible("rho<2n^2/(q+1)", rho, &window);
        return;
    }
    let v = &lr.value;
    rows.cmp("L<l_rho", l < *v, &l, v);
    rows.cmp("l_rho<U", *v < u, v, &u);
    let pf = bounds::l_rho_partial_fractions(q, n, rho);
    rows.cmp("l_rho=partial-fractions", pf == *v, v, &pf);
    let gap = &u - v;
    let factored = bounds::u_minus_l_rho_factored(q, n, rho);
    rows.cmp("g(1)-l_rho=factored", gap == factored, &gap, &factored);
    let excess = v - &l;
    let excess_form = bounds::l_rho_excess(q, n, rho);
    rows.cmp("l_rho-L=factored", excess == excess_form, &excess, &excess_form);
    for other in grid.rho.iter().filter(|r| *r > rho) {
        let lo = bounds::l_rho(q, n, other);
        if lo.admissible {
            let check = format!("l_rho<=l_rho'[{}]", fraction_string(other));
            rows.cmp(&check, *v <= lo.value, v, &lo.value);
        }
    }
}

fn eval_k_bound(p: &Point, rows: &mut Rows) {
    let (q, n, rho) = (&p.q, p.n.as_ref().expect("n"), p.rho.as_ref().expect("rho"));
    if !coprime_guard(q, n, rows) {
        return;
    }
    let ks = bounds::solve_k(q, n, rho).expect("validated grid values");
    if !ks.admissible {
        let window = ratio_from(&(n * n * 2u32)) / ratio_from(&(q + 1u32));
        rows.inadmissible("rho<2n^2/(q+1)", rho, &window);
        return;
    }
    let qr = ratio_from(q);
    let low = num_traits::pow(qr.clone(), (ks.k_max + 1) as usize);
    let high = &low * &qr;
    rows.cmp("q^(k_max+1)<=q^(K+1)", low <= ks.target, &low, &ks.target);
    rows.cmp("q^(K+1)<q^(k_max+2)", ks.target < high, &ks.target, &high);
    let limit = &qr * ks.two_n2_over_rho();
    rows.cmp("K<log_q(2n^2/rho)", ks.bound_holds, &ks.target, &limit);
    let floor = ks.floor_k();
    rows.cmp("k_max<=floor(K)", ks.k_max <= floor, &int(ks.k_max), &int(floor));
}

fn eval_chain(p: &Point, sigma_n2: &Natural, catalog: &[Identity], rows: &mut Rows) {
    let (q, k, n, rho) =
        (&p.q, p.k.expect("k"), p.n.as_ref().expect("n"), p.rho.as_ref().expect("rho"));
    if !coprime_guard(q, n, rows) {
        return;
    }
    let mut at: Assignment = BTreeMap::new();
    at.insert(Var::Q, ratio_from(q));
    at.insert(Var::X, ratio_from(&q.pow(k)));
    at.insert(Var::N, ratio_from(&(n * n)));
    at.insert(Var::R, rho.clone());
    at.insert(Var::S, ratio_from(sigma_n2));
    for ident in catalog {
        let check = ident.tag.to_string();
        match chain_values(ident, &at) {
            Ok((first, mismatch)) => match mismatch {
                None => rows.cmp(&check, true, &first, &first),
                Some(other) => rows.cmp(&check, false, &first, &other),
            },
            Err(e) => {
                let outcome = if matches!(e, RatFuncError::Pole) { Outcome::Inadmissible } else { Outcome::Fail };
                rows.push(check, outcome, "pole".into(), "pole".into());
            }
        }
    }
}

// first member of the first chain, and the first member anywhere that differs
// from the head of its own chain
fn chain_values(ident: &Identity, at: &Assignment) -> Result<(Ratio, Option<Ratio>), RatFuncError> {
    let mut first = None;
    for chain in &ident.chains {
        let head = chain[0].eval(at)?;
        first.get_or_insert_with(|| head.clone());
        for e in &chain[1..] {
            let v = e.eval(at)?;
            if v != head {
                return Ok((head, Some(v)));
            }
        }
    }
    Ok((first.unwrap_or_else(Ratio::zero), None))
}

struct Task {
    suite: Suite,
    point: Point,
}

fn tasks(grid: &Grid) -> Vec<Task> {
    let mut out = Vec::new();
    for &suite in &grid.suites {
        let (uk, un, ur) = suite.uses();
        let ks: Vec<Option<u32>> =
            if uk { grid.k.iter().copied().map(Some).collect() } else { vec![None] };
        let ns: Vec<Option<Natural>> =
            if un { grid.n.iter().cloned().map(Some).collect() } else { vec![None] };
        let rs: Vec<Option<Ratio>> =
            if ur { grid.rho.iter().cloned().map(Some).collect() } else { vec![None] };
        for q in &grid.q {
            for k in &ks {
                for n in &ns {
                    for rho in &rs {
                        let point = Point { q: q.clone(), k: *k, n: n.clone(), rho: rho.clone() };
                        out.push(Task { suite, point });
                    }
                }
            }
        }
    }
    out
}

fn evaluate(
    task: &Task,
    grid: &Grid,
    sigmas: &BTreeMap<Natural, Natural>,
    catalog: &[Identity],
) -> Vec<CheckRecord> {
    let mut rows = Rows::new(&task.point, task.suite);
    let p = &task.point;
    match task.suite {
        Suite::Sandwich => eval_sandwich(p, &mut rows),
        Suite::FailedSandwich => eval_failed_sandwich(p, &mut rows),
        Suite::Monotonicity => eval_monotonicity(p, &mut rows),
        Suite::FprimePositivity => eval_fprime(p, &mut rows),
        Suite::ImprovedLower => eval_improved_lower(p, grid, &mut rows),
        Suite::KBound => eval_k_bound(p, &mut rows),
        Suite::Chain => {
            let n = p.n.as_ref().expect("n");
            eval_chain(p, &sigmas[n], catalog, &mut rows)
        }
    }
    rows.out
}

/// Runs every selected suite over the grid with the configured worker count
/// (rayon's default when unset).
pub fn run_scan(cfg: &ScanConfig) -> Result<ScanReport, HarnessError> {
    let grid = cfg.validate()?;
    run_grid(&grid, cfg.workers)
}

pub fn run_grid(grid: &Grid, workers: Option<usize>) -> Result<ScanReport, HarnessError> {
    let catalog: Vec<Identity> = if grid.suites.contains(&Suite::Chain) {
        IdentityTag::ALL.iter().map(|&t| identity(t)).collect()
    } else {
        Vec::new()
    };
    let mut sigmas = BTreeMap::new();
    if grid.suites.contains(&Suite::Chain) {
        for n in &grid.n {
            let s = arith::sigma(&(n * n)).map_err(|e| config_err(e.to_string()))?;
            sigmas.insert(n.clone(), s);
        }
    }
    let work = tasks(grid);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| HarnessError::Pool(e.to_string()))?;
    let chunks: Vec<Vec<CheckRecord>> = pool.install(|| {
        work.par_iter().map(|t| evaluate(t, grid, &sigmas, &catalog)).collect()
    });
    Ok(ScanReport::from_records(chunks.into_iter().flatten().collect()))
}

/// Runs the scan and writes the report to `cfg.output` when one is given.
pub fn run_scan_to_output(cfg: &ScanConfig) -> Result<ScanReport, HarnessError> {
    let report = run_scan(cfg)?;
    if let Some(out) = &cfg.output {
        report.write(&out.path, out.format)?;
    }
    Ok(report)
}

/// Symbolic check of the full identity catalog, one record per tag.
pub fn verify_all_identities() -> ScanReport {
    let catalog: Vec<Identity> = IdentityTag::ALL.iter().map(|&t| identity(t)).collect();
    verify_identities(&catalog)
}

/// Symbolic check of the given identities. A failing record carries the
/// first nonzero cross-multiplied residual as its `lhs`.
pub fn verify_identities(catalog: &[Identity]) -> ScanReport {
    let records = catalog
        .iter()
        .map(|ident| {
            let residuals = ident.residuals();
            let bad = residuals.iter().find(|r| !r.is_zero());
            CheckRecord {
                point_q: String::new(),
                point_k: String::new(),
                point_n: String::new(),
                point_rho: String::new(),
                suite: "identities".to_string(),
                check: ident.tag.to_string(),
                outcome: if bad.is_none() { Outcome::Pass } else { Outcome::Fail },
                lhs: bad.map(|r| r.to_string()).unwrap_or_else(|| "0".to_string()),
                rhs: "0".to_string(),
            }
        })
        .collect();
    ScanReport::from_records(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(q: u64, k: u32, n: u64, rho: u64) -> ScanConfig {
        ScanConfig {
            q_set: vec![q.into()],
            k_set: vec![k],
            n_set: vec![n.into()],
            rho_set: vec![rho.into()],
            suites: None,
            output: None,
            workers: Some(1),
        }
    }

    #[test]
    fn single_point_has_no_failures() {
        let rep = run_scan(&small(5, 1, 3, 1)).unwrap();
        assert!(rep.summary.total > 0);
        assert_eq!(rep.summary.failed, 0, "{:?}", rep.failures().collect::<Vec<_>>());
        assert_eq!(rep.summary.inadmissible, 0);
    }

    #[test]
    fn n_one_is_inadmissible_not_failed() {
        let mut cfg = small(5, 1, 1, 1);
        cfg.suites = Some(vec![Suite::ImprovedLower]);
        let rep = run_scan(&cfg).unwrap();
        assert_eq!(rep.summary.failed, 0);
        assert_eq!(rep.summary.inadmissible, 1);
        assert_eq!(rep.records[0].lhs, "1/1");
        assert_eq!(rep.records[0].rhs, "1/3");
    }

    #[test]
    fn config_errors() {
        let mut cfg = small(5, 1, 3, 1);
        cfg.q_set.clear();
        assert!(matches!(run_scan(&cfg), Err(HarnessError::Config(_))));
        assert!(run_scan(&small(7, 1, 3, 1)).is_err());
        assert!(run_scan(&small(9, 1, 3, 1)).is_err());
        assert!(run_scan(&small(5, 1, 4, 1)).is_err());
        assert!(run_scan(&small(5, 0, 3, 1)).is_err());
        assert!(run_scan(&small(5, 1, 3, 0)).is_err());
    }

    #[test]
    fn config_json_forms() {
        let cfg = ScanConfig::from_json(
            r#"{"q_set": [5, "13"], "k_set": [1], "n_set": ["3"], "rho_set": ["3/2", 1],
                "suites": ["sandwich", "k-bound"], "output": {"path": "r.csv", "format": "csv"}}"#,
        )
        .unwrap();
        let grid = cfg.validate().unwrap();
        assert_eq!(grid.rho, vec![int(1), Ratio::new(3.into(), 2.into())]);
        assert_eq!(grid.suites, vec![Suite::Sandwich, Suite::KBound]);
        assert_eq!(cfg.output.unwrap().format, ReportFormat::Csv);
        assert!(ScanConfig::from_json(r#"{"q_set": [5]}"#).is_err());
        assert!(ScanConfig::from_json(r#"{"q_set":[5],"k_set":[1],"n_set":[3],"rho_set":[1],"suites":["nope"]}"#).is_err());
    }

    #[test]
    fn identities_all_pass() {
        let rep = verify_all_identities();
        assert_eq!(rep.summary.total, 14);
        assert_eq!(rep.summary.passed, 14);
    }

    #[test]
    fn report_round_trips() {
        let rep = run_scan(&small(13, 5, 9, 2)).unwrap();
        assert_eq!(ScanReport::from_json(&rep.to_json()).unwrap(), rep);
        assert_eq!(ScanReport::from_csv(&rep.to_csv()).unwrap(), rep.records);
        assert!(rep.to_csv().starts_with("point_q,point_k,point_n,point_rho,suite,check,outcome,lhs,rhs\n"));
    }
}
