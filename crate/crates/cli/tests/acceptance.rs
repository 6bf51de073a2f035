//! End-to-end checks, one line per criterion. Runs without the libtest harness
//! so the lines are always printed.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fivesq::arith::modular::{gcd_u64, SqrtTable};
use fivesq::arith::{crt_intersect, primes_up_to, CrtLimits, CrtOutcome, ResidueClass};
use fivesq::ec::FpCurve;
use fivesq::generator::{fixtures, progression_terms, quartic_p, sequence_point, verify_table, GenRecord};
use fivesq::local::verify_local_via_points;
use fivesq::mw::{derive_symbol_constraints, equality_classes, phi, MwTable, SymbolConstraint};
use fivesq::pipeline::{run_sieve, SieveConfig};
use fivesq::quintic::{for_each_point_mod_p, normalize_ap, ApQuintuple};
use fivesq::ternary::{
    rank_zero_certificate, representation_count, TernaryForm, E0_FIRST, E0_SECOND, E2_FIRST, E2_SECOND,
};

type Check = Result<String, String>;

fn bin(args: &[&str]) -> Result<Output, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_fivesq"))
        .args(args)
        .output()
        .map_err(|e| format!("spawn: {e}"))?;
    if !out.status.success() {
        return Err(format!(
            "fivesq {} exited with {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    Ok(out)
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, budget: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t <= budget, || format!("took {:.1}s, budget {}s", t.as_secs_f64(), budget.as_secs()))
}

fn mw_table_rows() -> Check {
    let start = Instant::now();
    let out = stdout(&bin(&["mwtable", "--qmax", "30", "--omax", "20"])?);
    let want = [
        "q=7 O=6 M+={±1} M-={3}",
        "q=11 O=8 M+={±1} M-={±3}",
        "q=13 O=6 M+={±1} M-={3}",
        "q=17 O=6 M+={±1,3} M-={}",
        "q=19 O=8 M+={±1} M-={±3}",
        "q=23 O=3 M+={0,±1} M-={}",
        "q=29 O=16 M+={±1} M-={±3,±5,±7}",
    ];
    let got: Vec<&str> = out.lines().collect();
    ensure(got == want, || format!("got {got:?}"))?;
    within(start, Duration::from_secs(60))?;
    Ok(format!("{} rows exact", want.len()))
}

fn symbol_constraints() -> Check {
    let start = Instant::now();
    let cs = derive_symbol_constraints(3000, 200).map_err(|e| e.to_string())?;
    let unary = |q| cs.contains(&SymbolConstraint::Unary { q, symbol: 1 });
    for q in [17, 23, 41, 281] {
        ensure(unary(q), || format!("missing (D/{q})=1"))?;
    }
    ensure(cs.contains(&SymbolConstraint::Equal { p: 7, q: 13 }), || "missing (D/7)=(D/13)".into())?;
    let classes = equality_classes(&cs);
    ensure(classes.iter().any(|c| [11, 19, 241].iter().all(|q| c.contains(q))), || {
        "11, 19, 241 not in one equality class".into()
    })?;
    let implication = SymbolConstraint::Implies { if_q: 29, if_symbol: 1, then_q: 11, then_symbol: 1 };
    ensure(cs.contains(&implication), || "missing (D/29)=1 => (D/11)=1".into())?;
    within(start, Duration::from_secs(600))?;
    Ok(format!("{} constraints derived", cs.len()))
}

fn desk_sieve(dir: &Path) -> Check {
    let start = Instant::now();
    let table = dir.join("table.json");
    let table_s = table.to_str().ok_or("path")?;
    bin(&["mwtable", "--qmax", "10000", "--omax", "60", "--out", table_s])?;
    let out = stdout(&bin(&["sieve", "--min", "1", "--max", "10000000", "--mwtable", table_s, "--jobs", "8"])?);
    let survivors: BTreeSet<u64> = out
        .lines()
        .skip(1)
        .filter_map(|l| l.split(',').next()?.parse().ok())
        .collect();
    ensure(survivors.contains(&409) && survivors.contains(&4_688_329), || {
        format!("409 or 4688329 missing from {survivors:?}")
    })?;
    let extra: Vec<u64> = survivors.iter().copied().filter(|d| ![409, 4_688_329].contains(d)).collect();
    for d in &extra {
        let ds = d.to_string();
        eprintln!("audit trail for {d}:");
        for stages in ["local", "local,mw", "local,mw,divisor", "local,mw,divisor,ternary"] {
            let rows = stdout(&bin(&[
                "sieve", "--min", &ds, "--max", &ds, "--stages", stages, "--mwtable", table_s, "--emit", "all",
            ])?);
            eprintln!("  {stages}: {}", rows.lines().nth(1).unwrap_or("(not squarefree)"));
        }
        eprint!("{}", stdout(&bin(&["ternary", "--d", &ds])?));
    }
    ensure(extra.is_empty(), || format!("extra survivors {extra:?}"))?;
    within(start, Duration::from_secs(3600))?;
    Ok("survivors exactly {409, 4688329}".into())
}

fn generator_tables(dir: &Path) -> Check {
    let start = Instant::now();
    let path = dir.join("gen.jsonl");
    bin(&["generate", "--n", "5", "--factor-budget-ms", "10000", "--out", path.to_str().ok_or("path")?])?;
    let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    let records: Vec<GenRecord> =
        text.lines().map(serde_json::from_str).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let fx = fixtures().map_err(|e| e.to_string())?;
    ensure(records.len() == 5, || format!("{} records", records.len()))?;
    for rec in &records {
        let f = fx.iter().find(|f| f.n == rec.n).ok_or("fixture missing")?;
        ensure(rec.d == f.d, || format!("n={}: D={} expected {}", rec.n, rec.d, f.d_text))?;
        ensure(rec.ap.roots[3] == BigInt::from(1), || format!("n={}: w != 1", rec.n))?;
    }
    let first: Vec<BigInt> = [49, 169, 289, 409, 529].map(BigInt::from).to_vec();
    ensure(records[0].ap.terms.to_vec() == first, || format!("n=1 terms {:?}", records[0].ap.terms))?;
    for c in verify_table(8).map_err(|e| e.to_string())?.into_iter().filter(|c| c.n >= 6) {
        ensure(c.d_divides_square && c.w_is_one, || format!("n={}: {c:?}", c.n))?;
    }
    within(start, Duration::from_secs(120))?;
    Ok("D_1..D_5 match, D_6..D_8 satisfy D w^2 = Q(a, b)".into())
}

fn point_search() -> Check {
    let out = stdout(&bin(&["search", "--d", "409", "--height", "30"])?);
    let mut want = BTreeSet::new();
    for s in 0..16u32 {
        let sg = |bit: u32, v: i64| if s >> bit & 1 == 1 { -v } else { v };
        want.insert(format!("[{}:{}:{}:1:{}]", sg(0, 7), sg(1, 13), sg(2, 17), sg(3, 23)));
    }
    let got: BTreeSet<String> = out.lines().map(str::to_owned).collect();
    ensure(got == want, || format!("got {got:?}"))?;
    for line in &got {
        let x: Vec<BigInt> = line
            .trim_matches(['[', ']'])
            .split(':')
            .map(|v| v.parse().map_err(|e| format!("{v}: {e}")))
            .collect::<Result<_, _>>()?;
        let pt = ApQuintuple { x: x.try_into().map_err(|_| "arity")?, d: BigInt::from(409) };
        ensure(pt.is_on_curve(), || format!("{line} off the curve"))?;
    }
    Ok("16 points, all on C_409".into())
}

fn local_consistency() -> Check {
    let mut checked = 0;
    for d in [1i64, 409, 2521] {
        let report = verify_local_via_points(&BigInt::from(d), 96).map_err(|e| e.to_string())?;
        for c in report.primes.iter().filter(|c| !c.divides_d) {
            let p = c.p as f64;
            ensure(c.points > 0, || format!("C_{d}(F_{}) empty", c.p))?;
            ensure((c.points as f64 - (p + 1.0)).abs() <= 10.0 * p.sqrt(), || {
                format!("D={d} p={} count {} outside the window", c.p, c.points)
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (D, p) pairs"))
}

/// Smallest eigenvalue of the symmetric matrix of the form.
fn min_eigenvalue(f: &TernaryForm) -> f64 {
    let m = [
        [f.a as f64, f.f as f64 / 2.0, f.e as f64 / 2.0],
        [f.f as f64 / 2.0, f.b as f64, f.d as f64 / 2.0],
        [f.e as f64 / 2.0, f.d as f64 / 2.0, f.c as f64],
    ];
    let p1 = m[0][1].powi(2) + m[0][2].powi(2) + m[1][2].powi(2);
    let q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
    let p2 = (0..3).map(|i| (m[i][i] - q).powi(2)).sum::<f64>() + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    if p == 0.0 {
        return q;
    }
    let b: Vec<Vec<f64>> =
        (0..3).map(|i| (0..3).map(|j| (m[i][j] - if i == j { q } else { 0.0 }) / p).collect()).collect();
    let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let phi = (det / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
    q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos()
}

fn naive_count(f: &TernaryForm, n: u64) -> u64 {
    let r = ((n as f64 / (min_eigenvalue(f) * 0.999)).sqrt()) as i64 + 1;
    let mut count = 0;
    for x in -r..=r {
        for y in -r..=r {
            for z in -r..=r {
                if f.eval(x, y, z) == n as i128 {
                    count += 1;
                }
            }
        }
    }
    count
}

fn ternary_certificates() -> Check {
    for d in [409u64, 2521, 4_688_329] {
        let c = rank_zero_certificate(d).map_err(|e| e.to_string())?;
        ensure(!c.excludes && c.e0_diff == 0 && c.e2_diff == 0, || format!("D={d}: {c:?}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut pairs = 0;
    while pairs < 50 {
        let form = match rng.next_u64() % 6 {
            0 => E0_FIRST,
            1 => E0_SECOND,
            2 => E2_FIRST,
            3 => E2_SECOND,
            _ => {
                let mut c = |lo: i64, hi: i64| lo + (rng.next_u64() % (hi - lo + 1) as u64) as i64;
                match TernaryForm::new(c(1, 30), c(1, 30), c(1, 30), c(-10, 10), c(-10, 10), c(-10, 10)) {
                    Ok(f) if min_eigenvalue(&f) >= 0.5 => f,
                    _ => continue,
                }
            }
        };
        let n = 1 + rng.next_u64() % 9999;
        let fast = representation_count(&form, n).map_err(|e| e.to_string())?;
        let slow = naive_count(&form, n);
        ensure(fast == slow, || format!("{form:?} at {n}: {fast} vs {slow}"))?;
        pairs += 1;
    }
    Ok("409, 2521, 4688329 not excluded; 50 random counts agree".into())
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd_u64(a, b) * b
}

fn property_suites(dir: &Path) -> Check {
    let table = MwTable::build(2000, 200).map_err(|e| e.to_string())?;
    for r in &table.records {
        let s: BTreeSet<u64> = r.m_plus.iter().copied().collect();
        ensure(s.contains(&(1 % r.order)), || format!("1 not in M+ at q={}", r.q))?;
        for set in [&r.m_plus, &r.m_minus] {
            ensure(set.iter().all(|&k| set.contains(&((r.order - k) % r.order))), || {
                format!("asymmetric set at q={}", r.q)
            })?;
        }
    }
    for q in primes_up_to(200).into_iter().filter(|&q| q > 5) {
        let curve = FpCurve::new(q, 8, 12, 0).map_err(|e| e.to_string())?;
        let sqrt = SqrtTable::new(q);
        let mut off = 0;
        for d in 1..5 {
            for_each_point_mod_p(d, &sqrt, |pt| off += usize::from(!curve.contains(&phi(&pt, q))));
        }
        ensure(off == 0, || format!("phi leaves E1 at q={q}"))?;
    }
    for n in 0..=12 {
        let (t, z) = sequence_point(n).map_err(|e| e.to_string())?;
        ensure(&z * &z == quartic_p(&t), || format!("z^2 != p(t) at n={n}"))?;
        if (1..=4).contains(&n) {
            let d = fixtures().map_err(|e| e.to_string())?.into_iter().find(|f| f.n == n).ok_or("fixture")?.d;
            let once = normalize_ap(&progression_terms(&t, &z), &d).map_err(|e| e.to_string())?;
            ensure(once.point().is_on_curve(), || format!("normalized point off C_D at n={n}"))?;
            let again =
                normalize_ap(&once.terms.clone().map(BigRational::from_integer), &d).map_err(|e| e.to_string())?;
            ensure(again == once, || format!("normalization not idempotent at n={n}"))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut cases = 0;
    while cases < 200 {
        let classes: Vec<ResidueClass> = (0..1 + rng.next_u64() % 4)
            .map(|_| {
                let m = 1 + rng.next_u64() % 40;
                ResidueClass::new(m, (0..rng.next_u64() % 6).map(|_| rng.next_u64() % m).collect::<Vec<_>>())
            })
            .collect();
        let l = classes.iter().fold(1, |acc, c| lcm(acc, c.modulus));
        if l > 100_000 {
            continue;
        }
        let brute: Vec<u128> =
            (0..l).filter(|x| classes.iter().all(|c| c.residues.contains(&(x % c.modulus)))).map(u128::from).collect();
        let ok = match crt_intersect(&classes, &CrtLimits::default()) {
            CrtOutcome::Empty { .. } => brute.is_empty(),
            CrtOutcome::Residues { residues, .. } => residues == brute,
            CrtOutcome::Inconclusive { .. } => false,
        };
        ensure(ok, || format!("CRT disagrees with enumeration on {classes:?}"))?;
        cases += 1;
    }
    let sieve_table = MwTable::build(2000, 60).map_err(|e| e.to_string())?;
    let config = |jobs| {
        let mut c = SieveConfig::new(1, 300_000);
        c.jobs = jobs;
        c.chunk_size = 20_000;
        c.emit_all = true;
        c
    };
    let one = run_sieve(&config(1), Some(&sieve_table)).map_err(|e| e.to_string())?;
    let eight = run_sieve(&config(8), Some(&sieve_table)).map_err(|e| e.to_string())?;
    ensure(one.verdicts == eight.verdicts && one.stats == eight.stats, || "1 vs 8 jobs differ".into())?;
    let mut resumed = config(4);
    resumed.checkpoint = Some(dir.join("cp.json"));
    resumed.stop_after_chunks = Some(3);
    let report = loop {
        let r = run_sieve(&resumed, Some(&sieve_table)).map_err(|e| e.to_string())?;
        if r.complete {
            break r;
        }
    };
    ensure(report.verdicts == one.verdicts && report.stats == one.stats, || "resume differs".into())?;
    Ok("M-sets, phi, psi, normalization, CRT, jobs and resume".into())
}

fn main() {
    let dir = tempfile::tempdir().expect("tempdir");
    let checks: [(&str, &dyn Fn() -> Check); 8] = [
        ("MW table reproduction", &mw_table_rows),
        ("symbol constraints q <= 3000", &symbol_constraints),
        ("desk-scale sieve 1..10^7", &|| desk_sieve(dir.path())),
        ("generator vs tables", &|| generator_tables(dir.path())),
        ("point search D=409 H=30", &point_search),
        ("local consistency and Weil window", &local_consistency),
        ("ternary certificates and oracle", &ternary_certificates),
        ("property suites", &|| property_suites(dir.path())),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let t = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail} ({t:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why} ({t:.1}s)", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
