//! Acceptance suite: one line per criterion, nonzero exit on any failure.

mod common;

use cgmt_core::bits::block_len;
use cgmt_core::construct::{
    approx_subset, baire_intersect, besicovitch_extract, dense_monotone_min, interpolate_subset, lebesgue_path,
    pruned_approx_subset, verify_extraction, BesicovitchConfig, DensityTarget, MonotoneFn, OpenCode,
};
use cgmt_core::gadgets::{build_gadget, check_gadget, tau, GadgetKind, InjectionTable, RangeTauTree};
use cgmt_core::trees::{AutomaticTree, Instrumented};
use cgmt_core::{
    htilde, htilde_bruteforce, validate_code, AlgebraicWeight, BitString, Builtin, CodePrefix, DagCode, Dyadic,
    Error, SubtreeCodePrefix, TreeSource, TruncatedTree,
};
use common::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use std::time::{Duration, Instant};

const SEED: u64 = 0x5eed_2024;
const C1_TRIALS: usize = 200;
const C1_LIMIT: Duration = Duration::from_secs(30);
const C3_TRIALS: usize = 500;
const C3_LIMIT: Duration = Duration::from_secs(60);
const C4_TRIALS: usize = 100;
const C4_DEPTH: u32 = 28;
const C5_STAGES: u32 = 7;
const C5_HORIZON: u32 = 64;
const C5_LIMIT: Duration = Duration::from_secs(300);
const C6_DEPTH: u32 = 64;
const C6_CAP: u32 = 80;
const C7_TABLES: usize = 20;
const C7_HORIZON: usize = 64;
const C9_OPENS: usize = 8;
const C9_CAP: u64 = 100_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rng(salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ salt)
}

fn full_code(m: u32) -> SubtreeCodePrefix {
    validate_code(&CodePrefix::new(vec![true; block_len(m) as usize]), &Builtin::Full, false).unwrap()
}

fn truncate_code(nu: &SubtreeCodePrefix, b: u32) -> SubtreeCodePrefix {
    let entries = nu.prefix().entries()[..block_len(b) as usize].to_vec();
    validate_code(&CodePrefix::new(entries), &Builtin::Full, false).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut mismatches = 0;
    let mut oracle_checked = 0;
    for _ in 0..C1_TRIALS {
        let m = r.gen_range(0..=6);
        let n = r.gen_range(0..=2);
        let s = ex(EXPONENTS[r.gen_range(0..EXPONENTS.len())]);
        let nu = random_marking(&mut r, m, 0.6);
        let dp = htilde(&nu, s, n).value;
        let brute = htilde_bruteforce(&nu, s, n).unwrap().value;
        if dp != brute {
            mismatches += 1;
        }
        if m <= 3 && m >= n {
            oracle_checked += 1;
            if antichain_min(&level_marks(&nu, m), m, s, n) != dp {
                mismatches += 1;
            }
        }
    }
    let t = start.elapsed();
    outcome(
        mismatches == 0 && t < C1_LIMIT,
        format!("{C1_TRIALS} markings, {oracle_checked} also enumerated, {mismatches} mismatches, {t:.2?}"),
    )
}

fn criterion_2() -> Outcome {
    let mut bad = Vec::new();
    let mut checked = 0;
    for n in 0..=4u32 {
        for m in n..=6u32 {
            let nu = full_code(m);
            for (s, expect) in [("1/2", None), ("2/3", None), ("1", Some(AlgebraicWeight::one()))] {
                let s = ex(s);
                let expect = expect.unwrap_or_else(|| s.level_cover(n));
                let dp = htilde(&nu, s, n).value;
                let brute = htilde_bruteforce(&nu, s, n).unwrap().value;
                let enumerated = (m <= 3).then(|| antichain_min(&level_marks(&nu, m), m, s, n));
                checked += 1;
                if dp != expect || brute != expect || enumerated.is_some_and(|e| e != expect) {
                    bad.push(format!("n={n} m={m} s={s}"));
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("{checked} (n, block, s) cases, failures: {bad:?}"))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut r = rng(3);
    let mut failures = Vec::new();
    for trial in 0..C3_TRIALS {
        let m = r.gen_range(1..=6);
        let n = r.gen_range(0..=2.min(m));
        let s = ex(EXPONENTS[r.gen_range(0..EXPONENTS.len())]);
        let nu = random_marking(&mut r, m, 0.55);
        let v = htilde(&nu, s, n).value;
        for b in 0..m {
            if htilde(&truncate_code(&nu, b), s, n).value < v {
                failures.push(format!("trial {trial}: prefix monotonicity at block {b}"));
            }
        }
        if m > n && v > htilde(&nu, s, n + 1).value {
            failures.push(format!("trial {trial}: delta monotonicity"));
        }
        let mut entries = nu.prefix().entries().to_vec();
        for i in 1..block_len(m - 1) as usize {
            if entries[(i - 1) / 2] && r.gen_bool(0.5) {
                entries[i] = true;
            }
        }
        let twin = validate_code(&CodePrefix::new(entries), &Builtin::Full, false).unwrap();
        if htilde(&twin, s, n).value != v {
            failures.push(format!("trial {trial}: top-block determinism"));
        }
        let count = level_marks(&nu, m).len() as i64;
        for k in 0..=m {
            let lebesgue = AlgebraicWeight::from_dyadic(Dyadic::new(count, m));
            if htilde(&nu, ex("1"), k).value != lebesgue {
                failures.push(format!("trial {trial}: s = 1 count formula at n = {k}"));
            }
        }
    }
    let t = start.elapsed();
    outcome(
        failures.is_empty() && t < C3_LIMIT,
        format!("{C3_TRIALS} instances, {} failures {:?}, {t:.2?}", failures.len(), failures.first()),
    )
}

fn random_automatic<R: Rng>(r: &mut R) -> AutomaticTree {
    let states = r.gen_range(2..=5);
    let sink = states - 1;
    let transitions = (0..states)
        .map(|q| if q == sink { [sink, sink] } else { [r.gen_range(0..states), r.gen_range(0..states)] })
        .collect();
    let accepting = (0..states).map(|q| q != sink).collect();
    AutomaticTree::new(0, transitions, accepting).unwrap()
}

fn random_source<R: Rng>(r: &mut R) -> Box<dyn TreeSource> {
    match r.gen_range(0..5) {
        0 => Box::new(Builtin::Full),
        1 => Box::new(if r.gen_bool(0.5) { Builtin::BranchLeft } else { Builtin::BranchRight }),
        2 => {
            let e = r.gen_range(1..=5);
            let num = r.gen_range(1..=(1i64 << e));
            Box::new(Builtin::dyadic(&Dyadic::new(num, e)).unwrap())
        }
        3 => Box::new(random_automatic(r)),
        _ => {
            let nu = random_marking(r, 5, 0.7);
            let marks: Vec<BitString> = (0..block_len(5))
                .filter(|&i| nu.prefix().entries()[i as usize])
                .map(cgmt_core::bits::string_at)
                .collect();
            Box::new(TruncatedTree::new(5, marks).unwrap())
        }
    }
}

fn criterion_4() -> Outcome {
    let mut r = rng(4);
    let mut produced = 0;
    let mut no_stable = 0;
    let mut failures = Vec::new();
    let mut trial = 0;
    let mut attempted = 0;
    while attempted < C4_TRIALS {
        trial += 1;
        let src = random_source(&mut r);
        let s = ex(["1/2", "2/3", "1"][r.gen_range(0..3)]);
        let n = r.gen_range(0..=2);
        let ambient = DagCode::ambient(src.as_ref(), C4_DEPTH, false).unwrap();
        if ambient.root().is_none() {
            continue;
        }
        let certified = json_dag_value(&ambient, C4_DEPTH, s, n);
        if certified.is_zero() {
            continue;
        }
        let frac = Dyadic::new(r.gen_range(1..=16i64), 4);
        let c = certified.mul_dyadic(&frac);
        let eps = AlgebraicWeight::from_dyadic(Dyadic::pow2_neg(r.gen_range(2..=6)));
        attempted += 1;
        match approx_subset(src.as_ref(), s, n, &c, &eps, C4_DEPTH) {
            Ok(out) => {
                produced += 1;
                let upper = &c + &eps;
                let (lo, hi) = out.window;
                for k in lo..=hi {
                    let v = json_dag_value(&out.code, k, s, n);
                    if v < c || v >= upper {
                        failures.push(format!("trial {trial}: block {k} outside the bracket"));
                    }
                }
                if !within_ambient(&out.code, src.as_ref()) {
                    failures.push(format!("trial {trial}: not a subtree"));
                }
                for k in 0..=n {
                    if out.code.level_strings(k, 64) != ambient.level_strings(k, 64) {
                        failures.push(format!("trial {trial}: prefix changed at level {k}"));
                    }
                }
            }
            Err(Error::NoStableIndex { .. }) => no_stable += 1,
            Err(e) => failures.push(format!("trial {trial}: unexpected {e}")),
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{C4_TRIALS} instances, {produced} certified, NoStableIndex rate {no_stable}/{C4_TRIALS}, failures {:?}",
            failures.first()
        ),
    )
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let cfg = BesicovitchConfig { horizon: C5_HORIZON, ..Default::default() };
    let c = AlgebraicWeight::one();
    let s = ex("1/2");
    let ex_ = match besicovitch_extract(&Builtin::Full, s, &c, 0, C5_STAGES, &cfg) {
        Ok(x) => x,
        Err(e) => return outcome(false, format!("pipeline failed: {e}")),
    };
    let mut failures = Vec::new();
    for cert in &ex_.certificates {
        let n = cert.stage;
        let d = &c + &AlgebraicWeight::from_dyadic(Dyadic::pow2_neg(n));
        for (code, own) in [(&cert.code, true), (&ex_.code, false)] {
            for l in &cert.lower_checks {
                let v = json_dag_value(code, l.block, s, 0);
                if v < c || (own && v != l.value) {
                    failures.push(format!("stage {n}: lower at block {}", l.block));
                }
            }
            let u = &cert.upper_witness;
            let v = json_dag_value(code, u.block, s, n);
            if v >= d || v != u.value {
                failures.push(format!("stage {n}: upper at block {}", u.block));
            }
        }
    }
    let library = verify_extraction(&ex_).iter().all(|&b| b);
    let t = start.elapsed();
    let blocks: Vec<u32> = ex_.certificates.iter().map(|c| c.upper_witness.block).collect();
    outcome(
        ex_.certificates.len() == C5_STAGES as usize && failures.is_empty() && library && t < C5_LIMIT,
        format!(
            "{} certificates, upper blocks {blocks:?}, independent failures {:?}, library recheck {library}, {t:.2?}",
            ex_.certificates.len(),
            failures.first()
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut failures = Vec::new();
    for c in ["1/2", "1/4", "3/4"] {
        let cd: Dyadic = c.parse().unwrap();
        let tree = Builtin::dyadic(&cd).unwrap();
        match lebesgue_path(&tree, &cd, C6_DEPTH, C6_CAP) {
            Ok(x) => {
                if x.len() != C6_DEPTH as usize || !(0..=x.len()).all(|k| tree.member(&x.prefix(k))) {
                    failures.push(format!("c = {c}: path leaves the tree"));
                }
            }
            Err(e) => failures.push(format!("c = {c}: {e}")),
        }
    }
    let half = Builtin::dyadic(&"1/2".parse().unwrap()).unwrap();
    let lie = lebesgue_path(&half, &"3/4".parse().unwrap(), C6_DEPTH, C6_CAP);
    let caught = matches!(lie, Err(Error::PromiseViolated { .. }));
    outcome(failures.is_empty() && caught, format!("failures {failures:?}, false promise caught: {caught}"))
}

fn criterion_7() -> Outcome {
    let mut r = rng(7);
    let mut failures = Vec::new();
    for t in 0..C7_TABLES {
        let mut pool: Vec<u64> = (0..2 * C7_HORIZON as u64).collect();
        pool.shuffle(&mut r);
        pool.truncate(C7_HORIZON);
        let table = InjectionTable::new(pool).unwrap();
        for kind in [GadgetKind::RangeTauTree, GadgetKind::SeparableRange, GadgetKind::BctcColumn, GadgetKind::SMMin] {
            match build_gadget(kind, &table, C7_HORIZON as u32) {
                Ok(g) => {
                    let report = check_gadget(&g, &table);
                    if !report.ok() {
                        failures.push(format!("table {t} {kind:?}: mismatches {:?}", report.mismatches));
                    }
                    if kind == GadgetKind::RangeTauTree {
                        let tree = RangeTauTree { table: Arc::new(table.clone()) };
                        let seq = g.sequence.clone().unwrap_or_default();
                        for n in 0..C7_HORIZON as u32 {
                            let hit = seq.iter().any(|x| tau(n).is_prefix_of(x));
                            let in_path = seq.iter().all(|x| {
                                let mut y = x.clone();
                                while y.len() < C7_HORIZON {
                                    y.push(false);
                                }
                                tree.member(&y)
                            });
                            if hit == table.in_range(n as u64) || !in_path {
                                failures.push(format!("table {t}: tau equivalence at n = {n}"));
                            }
                        }
                    }
                }
                Err(e) => failures.push(format!("table {t} {kind:?}: {e}")),
            }
        }
    }
    outcome(failures.is_empty(), format!("{C7_TABLES} tables x 4 gadgets, failures {:?}", failures.first()))
}

fn criterion_8() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    let base = Builtin::dyadic(&"3/4".parse().unwrap()).unwrap();
    let s = ex("1/2");
    let c = w("1/2");
    let eps = w("1/8");

    let src = Instrumented::new(base.clone());
    let out = approx_subset(&src, s, 1, &c, &eps, 14);
    let ok = out.is_ok() && src.extendible_calls() == 0 && src.member_calls() > 0;
    pass &= ok;
    notes.push(format!("approx_subset member={} extendible={}", src.member_calls(), src.extendible_calls()));

    src.reset();
    let z = DagCode::ambient(&src, 14, false).unwrap();
    let out = interpolate_subset(&z, 1, s, 1, &c, &eps, 4);
    let ok = out.is_ok() && src.extendible_calls() == 0;
    pass &= ok;
    notes.push(format!("interpolate_subset extendible={}", src.extendible_calls()));

    src.reset();
    let plain = pruned_approx_subset(&base, s, 1, &c, &eps, 14).unwrap();
    let jump = pruned_approx_subset(&src, s, 1, &c, &eps, 14).unwrap();
    pass &= plain == jump && src.extendible_calls() > 0;
    notes.push(format!("pruned_approx_subset extendible={}", src.extendible_calls()));

    src.reset();
    let ones = |x: &BitString| x.bits().iter().filter(|&&b| b).count() >= 2;
    let opens: Vec<OpenCode> = vec![&ones];
    let plain = baire_intersect(&base, &opens, &BitString::empty(), 10, 1000).unwrap();
    let jump = baire_intersect(&src, &opens, &BitString::empty(), 10, 1000).unwrap();
    pass &= plain == jump && src.extendible_calls() > 0;
    notes.push(format!("baire_intersect extendible={}", src.extendible_calls()));

    src.reset();
    let f = MonotoneFn::new(|x: &BitString| AlgebraicWeight::from_dyadic(Dyadic::pow2_neg(x.len() as u32)));
    let none = |_: &BitString, _: &AlgebraicWeight| None;
    let target = DensityTarget::new(AlgebraicWeight::zero());
    let plain = dense_monotone_min(&base, &f, &target, &none, 4, 8, 1000).unwrap();
    let jump = dense_monotone_min(&src, &f, &target, &none, 4, 8, 1000).unwrap();
    pass &= plain == jump && src.extendible_calls() > 0;
    notes.push(format!("dense_monotone_min extendible={}", src.extendible_calls()));

    src.reset();
    let cfg = BesicovitchConfig { horizon: 14, ..Default::default() };
    let plain = besicovitch_extract(&base, s, &c, 0, 3, &cfg).unwrap();
    let jump = besicovitch_extract(&src, s, &c, 0, 3, &cfg).unwrap();
    pass &= plain.certificates == jump.certificates && src.extendible_calls() > 0 && src.member_calls() == 0;
    notes.push(format!(
        "besicovitch_extract member={} extendible={}",
        src.member_calls(),
        src.extendible_calls()
    ));
    outcome(pass, notes.join("; "))
}

fn criterion_9() -> Outcome {
    let mut r = rng(9);
    let tree = Builtin::dyadic(&"3/4".parse().unwrap()).unwrap();
    let words: Vec<BitString> = (0..C9_OPENS)
        .map(|_| {
            let len = r.gen_range(1..=3);
            BitString::from_bits((0..len).map(|_| r.gen_bool(0.5)).collect())
        })
        .collect();
    let contains = |x: &BitString, w: &BitString| (0..=x.len().saturating_sub(w.len())).any(|i| {
        x.len() >= w.len() && (0..w.len()).all(|j| x.bit(i + j) == w.bit(j))
    });
    let preds: Vec<Box<dyn Fn(&BitString) -> bool + Sync>> = words
        .iter()
        .map(|w| {
            let w = w.clone();
            Box::new(move |x: &BitString| contains(x, &w)) as Box<dyn Fn(&BitString) -> bool + Sync>
        })
        .collect();
    let opens: Vec<OpenCode> = preds.iter().map(|b| b.as_ref()).collect();
    let result = baire_intersect(&tree, &opens, &BitString::empty(), 32, C9_CAP);
    let (met, inside) = match &result {
        Ok(res) => (
            words.iter().all(|w| (0..=res.path.len()).any(|k| contains(&res.path.prefix(k), w))),
            (0..=res.path.len()).all(|k| tree.member(&res.path.prefix(k))),
        ),
        Err(_) => (false, false),
    };
    let empty = |_: &BitString| false;
    let mut with_empty = opens.clone();
    with_empty.push(&empty);
    let caught = matches!(
        baire_intersect(&tree, &with_empty, &BitString::empty(), 32, C9_CAP),
        Err(Error::DensityViolated { stage, .. }) if stage == C9_OPENS as u32
    );
    outcome(
        met && inside && caught,
        format!("words {:?}, every code met: {met}, path in tree: {inside}, empty code caught: {caught}",
            words.iter().map(|w| w.to_string()).collect::<Vec<_>>()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("DP equals brute force", criterion_1),
        ("closed forms", criterion_2),
        ("monotonicity suite", criterion_3),
        ("interpolation brackets", criterion_4),
        ("Besicovitch stages 0..6", criterion_5),
        ("Lebesgue path", criterion_6),
        ("gadget equivalences", criterion_7),
        ("oracle discipline", criterion_8),
        ("Baire intersection", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("criterion {}: {} - {} ({})", i + 1, if o.pass { "PASS" } else { "FAIL" }, name, o.detail);
    }
    println!("acceptance: {}/9 passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
