//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use mbasimp::boolfunc::{quine_mccluskey, TruthTable};
use mbasimp::expr::{canonicalize, metric_value, parse, print, Expr, Metric, MetricOrder, Name, Width};
use mbasimp::harness::{run_dataset, write_report, DatasetEntry, ReportFormat, ReportOptions, RunConfig};
use mbasimp::linear::{
    decompose_with_negations, result_vector, simplify_linear, simplify_result_vector, LinearConfig, ResultVector,
};
use mbasimp::pipeline::{simplify_general, SimplifyConfig};
use mbasimp::sample;
use mbasimp::verify::{check, exhaustive_equivalence, random_equivalence, OutcomeClass, VerifyConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const W: Width = Width::W64;

// Pinned thresholds.
const WORKED_SUITE_LIMIT: Duration = Duration::from_secs(5);
const LINEAR_CASES: usize = 500;
const LINEAR_IDENTICAL_MIN: f64 = 0.95;
const LINEAR_MEDIAN_LIMIT_MS: f64 = 50.0;
const PRODUCT_CASES: usize = 200;
const PRODUCT_EQUIVALENT_MIN: f64 = 0.95;
const PRODUCT_IDENTICAL_MIN: f64 = 0.80;
const FUZZ_CASES: usize = 10_000;
const FUZZ_DEPTH: usize = 6;
const QM_RANDOM_T4: usize = 1000;
const SOUNDNESS_SAMPLES: usize = 1000;

fn p(s: &str) -> Expr {
    parse(s, W).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn names(vs: &[&str]) -> Vec<Name> {
    vs.iter().map(|v| Name::from(*v)).collect()
}

fn rv(vals: &[i64], vars: &[&str]) -> ResultVector {
    ResultVector::new(names(vars), vals.iter().map(|&v| W.from_i64(v)).collect(), W)
}

fn general(e: &Expr) -> Expr {
    simplify_general(e, &SimplifyConfig::default()).expr
}

/// Maps `f` over `items` on all cores, keeping the order.
fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let chunk = items.len().div_ceil(threads).max(1);
    std::thread::scope(|s| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<_>>())).collect();
        handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
    })
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    match xs.len() {
        0 => 0.0,
        n if n % 2 == 1 => xs[n / 2],
        n => (xs[n / 2 - 1] + xs[n / 2]) / 2.0,
    }
}

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, n: usize, ok: bool, detail: String) {
        println!("criterion {n}: {} {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failures += 1;
        }
    }
}

/// Every simplification performed, as (input, output) pairs for the
/// soundness and idempotence checks.
#[derive(Default)]
struct Corpus {
    general: Vec<(Expr, Expr)>,
    linear: Vec<(Expr, Expr)>,
}

fn worked_examples(corpus: &mut Corpus) -> (bool, String) {
    let start = Instant::now();
    let mut failed = Vec::new();
    let mut expect = |name: &str, ok: bool| {
        if !ok {
            failed.push(name.to_string());
        }
    };
    let lin = LinearConfig::default();
    let mut linear = |s: &str| {
        let e = p(s);
        let out = simplify_linear(&e, &lin);
        corpus.linear.push((e, out.clone()));
        out
    };

    // result vector and the expected linear simplification
    let e4 = "2*((y&~z)|(x&(y|~z)))-(x^y^z)";
    let xyz = names(&["x", "y", "z"]);
    let target = rv(&[0, 1, 1, 2, -1, 0, 0, 1], &["x", "y", "z"]);
    expect("e4 vector", result_vector(&p(e4), &xyz, W).unwrap() == target);
    expect("x+y-z vector", result_vector(&p("x+y-z"), &xyz, W).unwrap() == target);
    expect("e4 -> x+y-z", print(&linear(e4), W) == "x+y-z");

    // decompositions with negated terms
    let contains = |vals: &[i64], want: &[&str]| {
        let found: HashSet<Expr> =
            decompose_with_negations(&rv(vals, &["x", "y"])).iter().map(|lc| canonicalize(&lc.to_expr(W))).collect();
        want.iter().all(|s| found.contains(&canonicalize(&p(s))))
    };
    expect("(2,2,1,4)", contains(&[2, 2, 1, 4], &["-(~x&y)-2*~(x&y)", "-3*(~x&y)-2*~y"]));
    expect("(-1,0,1,0)", contains(&[-1, 0, 1, 0], &["2*(x|y)+~x"]));
    expect("(4,9,9,3)", contains(&[4, 9, 9, 3], &["~(x&y)-5*~(x^y)"]));

    // variable partitions
    let out = linear("4*(y&z)+2*(x&z)+2*(x&y)-4*(x&y&z)-2*y-2*z+a+b-(a&b)");
    expect("partition", canonicalize(&out) == canonicalize(&p("(a|b)-2*(~x&(y^z))")));

    // Quine-McCluskey and the refined form
    let tt = TruthTable::new([0, 1, 1, 0, 0, 1, 1, 0].iter().map(|&b| b == 1).collect()).unwrap();
    let dnf = quine_mccluskey(&tt, &xyz, W).unwrap();
    expect("qm dnf", canonicalize(&dnf) == canonicalize(&p("(x&~y)|(~x&y)")));
    let f = rv(&[0, 1, 1, 0, 0, 1, 1, 0], &["x", "y", "z"]);
    expect("x^y", print(&simplify_result_vector(&f, &lin), W) == "x^y");

    // general pipeline
    let mut gen = |s: &str, want: &str| {
        let e = p(s);
        let out = general(&e);
        corpus.general.push((e, out.clone()));
        expect(s, out == canonicalize(&p(want)));
    };
    gen("(x|3)&~(x|3)", "0");
    gen("-x*~(x|z)-y*~(x|z)-x*(x&~z)-y*(x&~z)-x*z-y*z", "x+y");
    gen("((-x)^y)-2*((~-x)&y)", "-x-y");
    gen("~x+~(y-1)+2+((-(~x+1)-1)|(-(~(y-1))-1))", "-x|-y");
    gen("(-~(x|y)+(x|~y))*(-(x^y)-~(x^y))+(-2*~(y|x)+~x+~(y^x))*(-~y-y)", "x+y");
    gen("(-~(x|y)+(x|~y))**(-(x^y)-~(x^y))+(-2*~(y|x)+~x+~(y^x))**(-~y-y)", "x+y");

    // e3 is not reducible to a linear MBA: the linear result is refuted
    let e3 = "(x&y)*(x|y)+(x&~y)*(~x&y)";
    let out = linear(e3);
    expect("e3 linear", print(&out, W) == "x&y");
    let outcome = check(&out, &p(e3), &VerifyConfig::default());
    let cx = outcome.counterexample.map(|c| c.assignment);
    expect(
        "e3 refuted",
        outcome.class == OutcomeClass::Unproven && cx == Some(vec![("x".to_string(), 1), ("y".to_string(), 2)]),
    );

    let elapsed = start.elapsed();
    expect("runtime", elapsed < WORKED_SUITE_LIMIT);
    let detail = format!("({:.2} s, limit {:?})", elapsed.as_secs_f64(), WORKED_SUITE_LIMIT);
    if failed.is_empty() {
        (true, detail)
    } else {
        (false, format!("{detail}; failed: {}", failed.join(", ")))
    }
}

fn linear_completeness(corpus: &mut Corpus) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cases: Vec<(Expr, Expr)> = (0..LINEAR_CASES)
        .map(|i| {
            let vars = if i % 2 == 0 { names(&["x", "y"]) } else { names(&["x", "y", "z"]) };
            sample::linear_mba(&mut rng, &vars, W)
        })
        .collect();
    let cfg = LinearConfig::default();
    let verify = VerifyConfig::default();
    let results = par_map(&cases, |(e, gt)| {
        let start = Instant::now();
        let out = simplify_linear(e, &cfg);
        let ms = start.elapsed().as_secs_f64() * 1e3;
        let w4 = Width::new(4).unwrap();
        let equal = exhaustive_equivalence(&out.at_width(w4), &e.at_width(w4), w4).is_none()
            && random_equivalence(&out, e, W, 10_000, 7).is_none();
        let class = check(&out, gt, &verify).class;
        (out, ms, equal, class)
    });
    let identical = results.iter().filter(|r| r.3 == OutcomeClass::Identical).count();
    let unequal = results.iter().filter(|r| !r.2 || r.3 == OutcomeClass::Unproven).count();
    let med = median(results.iter().map(|r| r.1).collect());
    let rate = identical as f64 / LINEAR_CASES as f64;
    for ((e, _), r) in cases.into_iter().zip(&results) {
        corpus.linear.push((e, r.0.clone()));
    }
    let ok = unequal == 0 && rate >= LINEAR_IDENTICAL_MIN && med < LINEAR_MEDIAN_LIMIT_MS;
    (
        ok,
        format!(
            "(identical {:.1}% >= {:.0}%, not equivalent {unequal}, median {med:.3} ms < {LINEAR_MEDIAN_LIMIT_MS} ms)",
            rate * 100.0,
            LINEAR_IDENTICAL_MIN * 100.0
        ),
    )
}

fn reducible_nonlinear(corpus: &mut Corpus) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cases: Vec<(Expr, Expr)> = (0..PRODUCT_CASES)
        .map(|i| {
            let vars = if i % 2 == 0 { names(&["x", "y"]) } else { names(&["x", "y", "z"]) };
            sample::product_with_one(&mut rng, &vars, W)
        })
        .collect();
    let verify = VerifyConfig::default();
    let results = par_map(&cases, |(e, gt)| {
        let out = general(e);
        let class = check(&out, gt, &verify).class;
        (out, class)
    });
    let identical = results.iter().filter(|r| r.1 == OutcomeClass::Identical).count();
    let good = results.iter().filter(|r| r.1 != OutcomeClass::Unproven).count();
    for ((e, _), r) in cases.into_iter().zip(&results) {
        corpus.general.push((e, r.0.clone()));
    }
    let (good_rate, id_rate) = (good as f64 / PRODUCT_CASES as f64, identical as f64 / PRODUCT_CASES as f64);
    (
        good_rate >= PRODUCT_EQUIVALENT_MIN && id_rate >= PRODUCT_IDENTICAL_MIN,
        format!(
            "(equivalent or better {:.1}% >= {:.0}%, identical {:.1}% >= {:.0}%)",
            good_rate * 100.0,
            PRODUCT_EQUIVALENT_MIN * 100.0,
            id_rate * 100.0,
            PRODUCT_IDENTICAL_MIN * 100.0
        ),
    )
}

/// The reduced-width stage of the verifier: exhaustive at 4 bits, then a
/// random sample at full width.
fn refuted(input: &Expr, output: &Expr) -> bool {
    let w4 = Width::new(4).unwrap();
    exhaustive_equivalence(&output.at_width(w4), &input.at_width(w4), w4).is_some()
        || random_equivalence(output, input, W, SOUNDNESS_SAMPLES, 11).is_some()
}

fn soundness(corpus: &mut Corpus) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let all = names(&["x", "y", "z", "w"]);
    let fuzz: Vec<Expr> = (0..FUZZ_CASES)
        .map(|_| {
            let t = rng.gen_range(1..=4);
            sample::fuzz(&mut rng, &all[..t], FUZZ_DEPTH, W)
        })
        .collect();
    let start = Instant::now();
    let outputs = par_map(&fuzz, general);
    let fuzz_secs = start.elapsed().as_secs_f64();
    let pairs: Vec<(Expr, Expr)> =
        corpus.general.iter().chain(&corpus.linear).cloned().chain(fuzz.into_iter().zip(outputs)).collect();
    // e3's linear result is wrong by design and excluded
    let e3 = p("(x&y)*(x|y)+(x&~y)*(~x&y)");
    let bad: Vec<String> = par_map(&pairs, |(i, o)| (*i != e3 && refuted(i, o)).then(|| print(i, W)))
        .into_iter()
        .flatten()
        .collect();
    let detail = format!("({} simplifications, {} violations, fuzz {fuzz_secs:.1} s)", pairs.len(), bad.len());
    if let Some(first) = bad.first() {
        return (false, format!("{detail}; first: {first}"));
    }
    (true, detail)
}

/// Splits a DNF into its terms' literal sets; `None` if it is not a DNF.
fn dnf_terms(e: &Expr) -> Option<Vec<Vec<(String, bool)>>> {
    fn literal(e: &Expr) -> Option<(String, bool)> {
        match e {
            Expr::Var(v) => Some((v.to_string(), true)),
            Expr::Not(inner) => match inner.as_ref() {
                Expr::Var(v) => Some((v.to_string(), false)),
                _ => None,
            },
            _ => None,
        }
    }
    fn term(e: &Expr) -> Option<Vec<(String, bool)>> {
        match e {
            Expr::And(ls) => ls.iter().map(literal).collect(),
            _ => literal(e).map(|l| vec![l]),
        }
    }
    match e {
        Expr::Or(ts) => ts.iter().map(term).collect(),
        _ => term(e).map(|t| vec![t]),
    }
}

fn qm_table(tt: &TruthTable, vars: &[Name]) -> Result<(), String> {
    let out = quine_mccluskey(tt, vars, W).map_err(|e| e.to_string())?;
    let back = TruthTable::from_expr(&out, vars).map_err(|e| e.to_string())?;
    if &back != tt {
        return Err(format!("{} does not reproduce its table", print(&out, W)));
    }
    if let Some(c) = tt.is_const() {
        let want = if c { Expr::Const(W.minus_one()) } else { Expr::Const(0) };
        return if out == want { Ok(()) } else { Err(format!("constant table gave {}", print(&out, W))) };
    }
    let terms = dnf_terms(&out).ok_or_else(|| format!("{} is not a DNF", print(&out, W)))?;
    for (i, a) in terms.iter().enumerate() {
        for (j, b) in terms.iter().enumerate() {
            // a term whose literals include all of another's is absorbed by it
            if i != j && b.iter().all(|l| a.contains(l)) {
                return Err(format!("{}: a term is absorbable", print(&out, W)));
            }
        }
    }
    Ok(())
}

fn quine_mccluskey_oracle() -> (bool, String) {
    let v3 = names(&["x", "y", "z"]);
    let v4 = names(&["x", "y", "z", "w"]);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut errors: Vec<String> = (0..256u64).filter_map(|i| qm_table(&TruthTable::from_index(3, i), &v3).err()).collect();
    errors.extend(
        (0..QM_RANDOM_T4).filter_map(|_| qm_table(&TruthTable::from_index(4, rng.gen_range(0..1 << 16)), &v4).err()),
    );
    let detail = format!("(256 tables for t=3, {QM_RANDOM_T4} for t=4, {} errors)", errors.len());
    match errors.first() {
        Some(e) => (false, format!("{detail}; first: {e}")),
        None => (true, detail),
    }
}

/// Values of every 2-variable bitwise function on 0/1 inputs: bit 0 is the
/// function, the higher bits repeat its value at (0,0).
fn bitwise_vectors() -> Vec<[i64; 4]> {
    (0..16)
        .map(|f: usize| {
            let high = if f & 1 == 1 { -2 } else { 0 };
            std::array::from_fn(|i| high + (f >> i & 1) as i64)
        })
        .filter(|v| *v != [0; 4])
        .collect()
}

fn add(a: [i64; 4], b: [i64; 4], k: i64) -> [i64; 4] {
    std::array::from_fn(|i| a[i] + k * b[i])
}

/// Fewest terms `Σ c_i·v_i` reaching each target, by enumerating up to three
/// terms with bounded coefficients. Four terms always suffice.
fn term_minimum(targets: &[[i64; 4]]) -> Vec<usize> {
    let vs = bitwise_vectors();
    let coefs: Vec<i64> = (-12..=12).filter(|&c| c != 0).collect();
    let small: Vec<i64> = (-5..=5).filter(|&c| c != 0).collect();
    let mut reach: [HashSet<[i64; 4]>; 4] = Default::default();
    reach[0].insert([0; 4]);
    for v in &vs {
        for &c in &coefs {
            reach[1].insert(add([0; 4], *v, c));
        }
    }
    for (i, a) in vs.iter().enumerate() {
        for b in &vs[i + 1..] {
            for &c in &coefs {
                for &d in &coefs {
                    reach[2].insert(add(add([0; 4], *a, c), *b, d));
                }
            }
        }
    }
    let wanted: HashSet<[i64; 4]> = targets.iter().copied().collect();
    for (i, a) in vs.iter().enumerate() {
        for (j, b) in vs.iter().enumerate().skip(i + 1) {
            for c in &vs[j + 1..] {
                for &x in &small {
                    for &y in &small {
                        for &z in &small {
                            let s = add(add(add([0; 4], *a, x), *b, y), *c, z);
                            if wanted.contains(&s) {
                                reach[3].insert(s);
                            }
                        }
                    }
                }
            }
        }
    }
    targets.iter().map(|t| (0..4).find(|&k| reach[k].contains(t)).unwrap_or(4)).collect()
}

fn term_count_optimality() -> (bool, String) {
    let vals = [-2i64, -1, 0, 1, 2];
    let targets: Vec<[i64; 4]> =
        (0..625).map(|n: usize| std::array::from_fn(|i| vals[n / 5usize.pow(i as u32) % 5])).collect();
    let best = term_minimum(&targets);
    let cfg = LinearConfig { metric: MetricOrder::with_primary(Metric::TermCount), ..LinearConfig::default() };
    let mut worse = Vec::new();
    for (t, &min) in targets.iter().zip(&best) {
        let out = simplify_result_vector(&rv(t, &["x", "y"]), &cfg);
        let terms = if out == Expr::Const(0) { 0 } else { metric_value(&out, Metric::TermCount, W) };
        if terms != min {
            worse.push(format!("{t:?}: {} ({terms} terms, minimum {min})", print(&out, W)));
        }
    }
    let detail = format!("(625 vectors, {} off the minimum)", worse.len());
    match worse.first() {
        Some(w) => (false, format!("{detail}; first: {w}")),
        None => (true, detail),
    }
}

fn report_bytes(entries: &[DatasetEntry], parallel: bool) -> Vec<u8> {
    let cfg = RunConfig { parallel, ..RunConfig::default() };
    let (records, summary) = run_dataset(entries, &cfg);
    let mut out = Vec::new();
    write_report(&records, &summary, &mut out, ReportOptions { format: ReportFormat::Csv, timing: false }).unwrap();
    out
}

fn idempotence(corpus: &Corpus) -> (bool, String) {
    let inputs: Vec<&Expr> = corpus.general.iter().chain(&corpus.linear).map(|(i, _)| i).collect();
    let not_fixed: Vec<String> = par_map(&inputs, |e| {
        let once = general(e);
        (general(&once) != once).then(|| print(e, W))
    })
    .into_iter()
    .flatten()
    .collect();
    let entries: Vec<DatasetEntry> = corpus
        .general
        .iter()
        .take(120)
        .enumerate()
        .map(|(i, (e, o))| DatasetEntry { complex: print(e, W), ground_truth: print(o, W), line: i + 1 })
        .collect();
    let first = report_bytes(&entries, true);
    let same = first == report_bytes(&entries, true) && first == report_bytes(&entries, false);
    let detail = format!("({} inputs, {} not fixed points, reports identical: {same})", inputs.len(), not_fixed.len());
    match not_fixed.first() {
        Some(e) => (false, format!("{detail}; first: {e}")),
        None => (same, detail),
    }
}

fn main() {
    let mut report = Report { failures: 0 };
    let mut corpus = Corpus::default();
    let (ok, d) = worked_examples(&mut corpus);
    report.line(1, ok, d);
    let (ok, d) = linear_completeness(&mut corpus);
    report.line(2, ok, d);
    let (ok, d) = reducible_nonlinear(&mut corpus);
    report.line(3, ok, d);
    let (ok, d) = soundness(&mut corpus);
    report.line(4, ok, d);
    let (ok, d) = quine_mccluskey_oracle();
    report.line(5, ok, d);
    let (ok, d) = term_count_optimality();
    report.line(6, ok, d);
    let (ok, d) = idempotence(&corpus);
    report.line(7, ok, d);
    if report.failures > 0 {
        eprintln!("{} acceptance criteria failed", report.failures);
        std::process::exit(1);
    }
}
