//! One line per acceptance criterion. Runs without the libtest harness so
//! the lines are always printed; exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use abundancy::arith::{self, Natural, Ratio};
use abundancy::bounds;
use abundancy::harness::{self, Outcome, ScanConfig, ScanReport, Suite};
use abundancy::ratfunc::{verify_identity, IdentityTag};
use num_bigint::BigInt;
use num_integer::Integer;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn nat(v: u64) -> Natural {
    Natural::from(v)
}

fn r(n: i64, d: i64) -> Ratio {
    Ratio::new(n.into(), d.into())
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn grid_suites(suites: &[Suite]) -> Result<ScanReport, String> {
    let cfg = ScanConfig { suites: Some(suites.to_vec()), ..ScanConfig::default_grid() };
    harness::run_scan(&cfg).map_err(|e| e.to_string())
}

fn no_failures(rep: &ScanReport) -> Result<(), String> {
    match rep.failures().next() {
        None => Ok(()),
        Some(f) => Err(format!(
            "{} failures, first: {} {} at q={} k={} n={} rho={} ({} vs {})",
            rep.summary.failed, f.suite, f.check, f.point_q, f.point_k, f.point_n, f.point_rho, f.lhs, f.rhs
        )),
    }
}

fn symbolic_suite() -> Verdict {
    let t = Instant::now();
    let failed: Vec<String> =
        IdentityTag::ALL.iter().filter(|&&tag| !verify_identity(tag)).map(|t| t.to_string()).collect();
    let elapsed = t.elapsed();
    ensure(failed.is_empty(), format!("failing tags: {}", failed.join(", ")))?;
    ensure(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!("14/14 tags are zero polynomials in {elapsed:.2?}"))
}

fn deficiency_identity() -> Verdict {
    let t = Instant::now();
    let fast: Vec<Natural> = (0..=90_000u64)
        .map(|x| if x == 0 { nat(0) } else { arith::sigma(&nat(x)).unwrap() })
        .collect();
    let mut pairs = 0usize;
    for u in 1..=300u64 {
        for v in u..=300u64 {
            if u.gcd(&v) != 1 {
                continue;
            }
            pairs += 1;
            let ways: [fn(u64, &[Natural]) -> Natural; 2] = [
                |x: u64, f: &[Natural]| f[x as usize].clone(),
                |x: u64, _: &[Natural]| arith::sigma_oracle(&nat(x)).unwrap(),
            ];
            for sigma in ways {
                let sg = |x: u64| BigInt::from(sigma(x, &fast));
                let d = |x: u64| 2 * BigInt::from(x) - sg(x);
                let s = |x: u64| sg(x) - BigInt::from(x);
                if d(u) * d(v) - d(u * v) != 2 * s(u) * s(v) {
                    return Err(format!("fails at u={u}, v={v}"));
                }
            }
            if fast[(u * v) as usize] != arith::sigma_oracle(&nat(u * v)).unwrap() {
                return Err(format!("sigma disagrees at {}", u * v));
            }
        }
    }
    let elapsed = t.elapsed();
    ensure(elapsed < Duration::from_secs(30), format!("took {elapsed:?}"))?;
    Ok(format!("{pairs} unordered coprime pairs, both sigma methods, 0 exceptions in {elapsed:.2?}"))
}

fn l_and_u_at_five() -> Verdict {
    let five = nat(5);
    let l = bounds::l_bound(&five);
    let u = bounds::u_bound(&five);
    let g1 = bounds::g_of_k(&five, 1);
    ensure(l == r(57, 20), format!("L(5) = {l}"))?;
    ensure(u == r(43, 15), format!("U(5) = {u}"))?;
    ensure(g1 == u, format!("g(5,1) = {g1}"))?;
    ensure((2..40).all(|k| bounds::g_of_k(&five, k) < u), "g(5,k) = U(5) for some k > 1")?;
    Ok("L(5) = 57/20, U(5) = g(5,1) = 43/15, equality only at k = 1".into())
}

fn sandwich_and_monotonicity() -> Verdict {
    let rep = grid_suites(&[Suite::Sandwich, Suite::Monotonicity, Suite::FailedSandwich])?;
    no_failures(&rep)?;
    for q in [5u64, 13, 17, 29, 37, 41, 53] {
        let q = nat(q);
        let (lo, hi) = bounds::deficiency_product_interval(&q);
        ensure(lo < bounds::l_bound(&q) && bounds::u_bound(&q) < hi, format!("interval at q={q}"))?;
    }
    Ok(format!("{} exact comparisons, 0 failures", rep.summary.passed))
}

fn improved_lower() -> Verdict {
    let rep = grid_suites(&[Suite::ImprovedLower])?;
    no_failures(&rep)?;
    let checks = |name: &str| {
        rep.records.iter().filter(|c| c.check.starts_with(name) && c.outcome == Outcome::Pass).count()
    };
    ensure(checks("g(1)-l_rho=factored") > 0, "no admissible points")?;
    ensure(checks("l_rho<=l_rho'") > 0, "no rho pairs compared")?;
    Ok(format!(
        "{} admissible points, {} rho-monotonicity pairs, {} inadmissible rows flagged",
        checks("g(1)-l_rho=factored"),
        checks("l_rho<=l_rho'"),
        rep.summary.inadmissible
    ))
}

fn k_solver() -> Verdict {
    let t = Instant::now();
    let ks = bounds::solve_k(&nat(5), &nat(3), &r(1, 1)).map_err(|e| e.to_string())?;
    let per_point = t.elapsed();
    ensure(ks.target == r(73, 1), format!("target {}", ks.target))?;
    let k50 = ks.k.to_significant(50);
    ensure(k50 == "1.6658123360966042630274808669902745238209378561882", format!("K = {k50}"))?;
    ensure(r(25, 1) <= ks.target && ks.target < r(125, 1) && ks.k_max == 1, "bracket")?;
    ensure(ks.bracket_holds(), "bracket_holds")?;
    let rhs = ks.bound_rhs.to_significant(50);
    ensure(rhs == "1.7958889470453636409392392873060701381191307318261", format!("log_5 18 = {rhs}"))?;
    ensure(ks.bound_holds && ks.k < ks.bound_rhs, "K < log_5 18")?;

    let t = Instant::now();
    let big = bounds::solve_k(&nat(5), &nat(3003), &r(3375, 1)).map_err(|e| e.to_string())?;
    let big_time = t.elapsed();
    ensure(big.admissible && big.bound_holds && big.bracket_holds() && big.k_max == 5, "(5, 3003, 3375)")?;

    let rep = grid_suites(&[Suite::KBound])?;
    no_failures(&rep)?;
    let slowest = per_point.max(big_time);
    ensure(slowest < Duration::from_secs(1), format!("a point took {slowest:?}"))?;
    Ok(format!(
        "K(5,3,1) to 50 digits, 5^2 <= 73 < 5^3, k_max(5,3003,3375) = 5, {} grid checks, slowest point {slowest:.2?}",
        rep.summary.passed
    ))
}

fn descartes_spoof() -> Verdict {
    let m = bounds::descartes_number();
    ensure(m == nat(198_585_576_189), format!("m = {m}"))?;
    let q = nat(22021);
    let rep = bounds::spoof_check(&m, &q).map_err(|e| e.to_string())?;

    // recompute every member from the divisor-enumeration oracle
    let n2 = &m / &q;
    let s_n2 = arith::sigma_oracle(&n2).unwrap();
    let s_q = &q + 1u32; // q treated as prime
    let i = |v: &Natural| BigInt::from(v.clone());
    let expect = [
        Ratio::new(i(&s_n2), i(&q)),
        Ratio::new(2 * i(&n2), i(&s_q)),
        Ratio::from_integer(i(&n2.gcd(&s_n2))),
        Ratio::new(2 * i(&n2) - i(&s_n2), i(&s_q) - i(&q)),
        Ratio::new(2 * (i(&s_n2) - i(&n2)), 2 * i(&q) - i(&s_q)),
    ];
    for (k, ((name, got), want)) in rep.members.iter().zip(&expect).enumerate() {
        ensure(got == want, format!("member {} ({name}): {got} vs oracle {want}", k + 1))?;
    }
    ensure(expect.iter().all(|v| *v == expect[0]), "oracle members differ")?;
    let gcd_value: BigInt = i(&q) * i(&s_n2) - 2 * (i(&q) - 1) * i(&n2);
    ensure(Ratio::from_integer(gcd_value.clone()) == expect[0], format!("q*sigma(n^2) - 2(q-1)n^2 = {gcd_value}"))?;
    ensure(rep.gcd_formula == gcd_value && rep.pseudo_perfect, "report disagrees")?;
    ensure(expect[0].is_integer() && expect[0].numer() == &BigInt::from(819), "value is not 819")?;
    Ok("five members all 819 and q*sigma(n^2) - 2(q-1)n^2 = 819 (oracle sigma)".into())
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for (i, (workers, format)) in
        [("1", "json"), ("8", "json"), ("1", "json"), ("1", "csv"), ("4", "csv"), ("8", "csv")].iter().enumerate()
    {
        let path = dir.path().join(format!("r{i}.{format}"));
        let args = ["abundancy", "scan", "--workers", workers, "--format", format, "--output", path.to_str().unwrap()];
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = abundancy_cli::run(args, &mut out, &mut err);
        ensure(code == 0, format!("scan exited {code}: {}", String::from_utf8_lossy(&err)))?;
        outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    ensure(outputs[0] == outputs[1] && outputs[1] == outputs[2], "JSON reports differ")?;
    ensure(outputs[3] == outputs[4] && outputs[4] == outputs[5], "CSV reports differ")?;
    Ok(format!(
        "JSON ({} bytes) and CSV ({} bytes) byte-identical across runs and 1/4/8 workers",
        outputs[0].len(),
        outputs[3].len()
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("symbolic identity suite", symbolic_suite),
        ("D(u)D(v) - D(uv) = 2s(u)s(v) for coprime u, v <= 300", deficiency_identity),
        ("L(5) = 57/20 and U(5) = g(5,1) = 43/15", l_and_u_at_five),
        ("sandwich, monotonicity and the wider deficiency interval", sandwich_and_monotonicity),
        ("improved lower bound l_rho", improved_lower),
        ("exponent solver", k_solver),
        ("Descartes spoof chain", descartes_spoof),
        ("scan determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
