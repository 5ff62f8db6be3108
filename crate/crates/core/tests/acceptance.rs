//! End-to-end acceptance run: one PASS/FAIL line per criterion.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use proptest::strategy::Strategy;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use mereology::cli::{class_types_figure, types_figure};
use mereology::formula::{Formula, TheoryMode};
use mereology::models::{ModelHandle, Realization};
use mereology::oracle::{
    bounded_eval_set, generate_corpus, stabilized_decide_class, CorpusConfig, CLASS_WINDOW, SET_RUNGS,
};
use mereology::qe::decide;
use mereology::saturation::{
    back_and_forth, characteristic, check_criterion, splitting_fragment, verify_partial_iso, BackAndForth,
    Evidence, Verdict, FRAGMENT_BOUND,
};
use mereology::sizesets::Card;

const CLASS: TheoryMode = TheoryMode::ClassMereology;
const SET: TheoryMode = TheoryMode::SetMereology;

const CORPUS_SEED: u64 = 2024;
const CLASS_CORPUS: usize = 500;
const SET_CORPUS: usize = 300;
const CLASS_UNSTABLE_MAX: f64 = 0.02;
const CLASS_BUDGET: Duration = Duration::from_secs(60);
const SET_BUDGET: Duration = Duration::from_secs(120);
const ISO_STEPS: usize = 200;
const ISO_BUDGET: Duration = Duration::from_secs(30);
const CHAR_ISO_STEPS: usize = 100;
const SAMPLE_SEED: u64 = 8;
const SAMPLE_SIZE: usize = 200;
const PROPERTY_CASES: u32 = 1000;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Agreement {
    agree: usize,
    disagree: Vec<String>,
    unstable: Vec<String>,
    elapsed: Duration,
}

fn agreement(corpus: &[Formula], mode: TheoryMode) -> Result<Agreement, String> {
    let start = Instant::now();
    let mut a = Agreement {
        agree: 0,
        disagree: Vec::new(),
        unstable: Vec::new(),
        elapsed: Duration::ZERO,
    };
    for f in corpus {
        let d = decide(f, mode).map_err(|e| format!("decide {f}: {e}"))?;
        let o = match mode {
            CLASS => stabilized_decide_class(f, &CLASS_WINDOW),
            SET => bounded_eval_set(f, &BTreeMap::new(), &SET_RUNGS),
        }
        .map_err(|e| format!("oracle {f}: {e}"))?;
        match o.verdict {
            Some(v) if v == d => a.agree += 1,
            Some(_) => a.disagree.push(format!("{f} decide={d} oracle={:?}", o.values)),
            None => a.unstable.push(format!("{f} decide={d} oracle={:?}", o.values)),
        }
    }
    a.elapsed = start.elapsed();
    Ok(a)
}

fn criterion_1() -> Outcome {
    let corpus = generate_corpus(&CorpusConfig::new(CLASS, CLASS_CORPUS, CORPUS_SEED));
    let a = agreement(&corpus, CLASS)?;
    for u in &a.unstable {
        println!("  unstable (class): {u}");
    }
    ensure(a.disagree.is_empty(), || format!("disagreements: {:?}", a.disagree))?;
    let rate = a.unstable.len() as f64 / corpus.len() as f64;
    ensure(rate < CLASS_UNSTABLE_MAX, || format!("unstable rate {rate:.4}"))?;
    ensure(a.elapsed < CLASS_BUDGET, || format!("took {:?}", a.elapsed))?;
    Ok(format!(
        "{} agree, 0 disagree, {} unstable of {} in {:.1}s",
        a.agree,
        a.unstable.len(),
        corpus.len(),
        a.elapsed.as_secs_f64()
    ))
}

fn criterion_2() -> Outcome {
    let corpus = generate_corpus(&CorpusConfig::new(SET, SET_CORPUS, CORPUS_SEED));
    let a = agreement(&corpus, SET)?;
    for u in &a.unstable {
        println!("  unstable (set): {u}");
    }
    ensure(a.disagree.is_empty(), || format!("disagreements: {:?}", a.disagree))?;
    ensure(a.elapsed < SET_BUDGET, || format!("took {:?}", a.elapsed))?;
    Ok(format!(
        "{} agree, 0 disagree, {} unstable of {} in {:.1}s",
        a.agree,
        a.unstable.len(),
        corpus.len(),
        a.elapsed.as_secs_f64()
    ))
}

fn criterion_3() -> Outcome {
    let mut checked = 0;
    for (mode, size) in [(CLASS, CLASS_CORPUS), (SET, SET_CORPUS)] {
        for f in generate_corpus(&CorpusConfig::new(mode, size, CORPUS_SEED)) {
            let pos = decide(&f, mode).map_err(|e| e.to_string())?;
            let neg = decide(&Formula::not(f.clone()), mode).map_err(|e| e.to_string())?;
            ensure(pos != neg, || format!("{mode}: {f} and its negation both {pos}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} sentences, 0 violations"))
}

fn criterion_4() -> Outcome {
    let inf = Card::Inf;
    let fin = Card::Fin;
    // Cell masks a = 1, b = 2, c = 4; entry 0 is the exterior.
    let expected = [inf, inf, fin(2), fin(3), fin(17), fin(0), inf, fin(5)];
    let tuple = types_figure().map_err(|e| e.to_string())?;
    let sizes = ModelHandle::COLUMNS.cell_sizes(&tuple).map_err(|e| e.to_string())?;
    ensure(sizes == expected, || format!("columns figure {sizes:?}"))?;
    let mut class_expected = expected;
    class_expected[0] = fin(57);
    let tuple = class_types_figure().map_err(|e| e.to_string())?;
    let sizes = ModelHandle::SATURATED_BA.cell_sizes(&tuple).map_err(|e| e.to_string())?;
    ensure(sizes == class_expected, || format!("saturated algebra figure {sizes:?}"))?;
    Ok("(abc,b,a,c,ab,bc,ac) = (5,2,inf,17,3,inf,0), exterior inf in columns and 57 in ba-sat".into())
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let r = back_and_forth(&ModelHandle::COLUMNS, &ModelHandle::COLUMNS_PERM, ISO_STEPS).map_err(|e| e.to_string())?;
    let iso = match r {
        BackAndForth::Iso(p) => p,
        BackAndForth::Obstruction(o) => return Err(o.to_string()),
    };
    verify_partial_iso(&iso).map_err(|e| format!("verifier: {e}"))?;
    let elapsed = start.elapsed();
    ensure(iso.pairs.len() == ISO_STEPS, || format!("{} pairs", iso.pairs.len()))?;
    ensure(elapsed < ISO_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("{} verified pairs in {:.1}s", iso.pairs.len(), elapsed.as_secs_f64()))
}

fn criterion_6() -> Outcome {
    let prime = check_criterion(&ModelHandle::PRIME, 1).map_err(|e| e.to_string())?;
    ensure(
        prime.verdict == Verdict::NotSaturated && prime.evidence == Evidence::NoInfiniteElements,
        || format!("prime: {prime}"),
    )?;
    let m = ModelHandle::AMORPHOUS;
    let report = check_criterion(&m, 1).map_err(|e| e.to_string())?;
    let u = match (&report.verdict, &report.evidence) {
        (
            Verdict::NotSaturated,
            Evidence::UnsplittableInfinite {
                u,
                fragments,
                realization: Realization::Unrealizable { .. },
            },
        ) if fragments.len() == FRAGMENT_BOUND as usize && fragments.iter().all(|(_, ok)| *ok) => u.clone(),
        _ => return Err(format!("amorphous: {report}")),
    };
    let env = BTreeMap::from([("u".to_string(), u.clone())]);
    for k in 1..=FRAGMENT_BOUND {
        let ok = m.eval(&splitting_fragment("u", "x", k), &env).map_err(|e| e.to_string())?;
        ensure(ok, || format!("fragment k={k} fails"))?;
    }
    let split = m
        .realize_type(&[u], &[(Card::Fin(0), Card::Inf), (Card::Inf, Card::Inf)])
        .map_err(|e| e.to_string())?;
    ensure(matches!(split, Realization::Unrealizable { .. }), || format!("split realized: {split:?}"))?;
    let r = back_and_forth(&ModelHandle::COLUMNS, &m, ISO_STEPS).map_err(|e| e.to_string())?;
    let o = match r {
        BackAndForth::Obstruction(o) => o,
        BackAndForth::Iso(p) => return Err(format!("no obstruction in {} pairs", p.pairs.len())),
    };
    Ok(format!(
        "prime has no infinite elements; amorphous fragments k<={FRAGMENT_BOUND} realized, split unrealizable; obstruction at step {}",
        o.step
    ))
}

fn criterion_7() -> Outcome {
    for n in 1..=5u32 {
        let c = characteristic(&ModelHandle::characteristic(n));
        ensure(c == Card::Fin(n as u64), || format!("char{n} has characteristic {c}"))?;
    }
    let two = ModelHandle::characteristic(2);
    let three = ModelHandle::characteristic(3);
    match back_and_forth(&two, &two, CHAR_ISO_STEPS).map_err(|e| e.to_string())? {
        BackAndForth::Iso(p) => {
            verify_partial_iso(&p).map_err(|e| format!("verifier: {e}"))?;
            ensure(p.pairs.len() == CHAR_ISO_STEPS, || format!("{} pairs", p.pairs.len()))?;
            ensure(characteristic(&p.left) == characteristic(&p.right), || "characteristic differs".into())?;
        }
        BackAndForth::Obstruction(o) => return Err(format!("char2 ~ char2: {o}")),
    }
    let step = match back_and_forth(&two, &three, ISO_STEPS).map_err(|e| e.to_string())? {
        BackAndForth::Obstruction(o) => o.step,
        BackAndForth::Iso(p) => return Err(format!("char2 ~ char3: no obstruction in {} pairs", p.pairs.len())),
    };
    Ok(format!(
        "char1..char5 = 1..5; char2 ~ char2 verified for {CHAR_ISO_STEPS} steps; char2 vs char3 obstructed at step {step}"
    ))
}

fn criterion_8() -> Outcome {
    let corpus = generate_corpus(&CorpusConfig::new(SET, SAMPLE_SIZE, SAMPLE_SEED));
    let none = BTreeMap::new();
    for f in &corpus {
        let p = ModelHandle::PRIME.eval(f, &none).map_err(|e| e.to_string())?;
        let c = ModelHandle::COLUMNS.eval(f, &none).map_err(|e| e.to_string())?;
        let d = decide(f, SET).map_err(|e| e.to_string())?;
        ensure(p == c && c == d, || format!("{f}: prime={p} columns={c} decide={d}"))?;
    }
    Ok(format!("{} sentences, prime = columns = decide", corpus.len()))
}

fn run_property<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> common::Check,
) -> Result<(), String> {
    let config = Config {
        cases: PROPERTY_CASES,
        failure_persistence: None,
        ..Config::default()
    };
    let rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    TestRunner::new_with_rng(config, rng)
        .run(&strategy, test)
        .map_err(|e| format!("{name}: {e}"))
}

fn criterion_9() -> Outcome {
    use common::*;
    run_property("size sets", (size_set(), size_set(), size_set()), |(a, b, c)| {
        check_size_sets(&a, &b, &c)
    })?;
    run_property("parser round trip", formula(true), |f| check_round_trip(&f))?;
    run_property("eventually periodic sets", (epset(), epset()), |(a, b)| check_epset_ops(&a, &b))?;
    Ok(format!(
        "{PROPERTY_CASES} cases each: size-set closure and sumset algebra, parser round trip, EPSet Boolean ops"
    ))
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut failed = Vec::new();
    for (id, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {id}: PASS: {detail}"),
            Err(why) => {
                println!("criterion {id}: FAIL: {why}");
                failed.push(id);
            }
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
