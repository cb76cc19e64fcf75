use crate::report::{sequence_csv, ReportDocument};
use crate::{CliError, CliResult, Common, Format, Outcome};
use cgmt_core::construct::besicovitch::check_certificate;
use cgmt_core::measure::{htilde_value, measure_sequence, verify_cover_code};
use cgmt_core::trees::marking_from_choices;
use cgmt_core::{
    approx_subset, baire_intersect, besicovitch_extract, build_gadget, check_gadget, htilde, htilde_bruteforce,
    htilde_code, interpolate_subset, lebesgue_path, parse_spec, pruned_approx_subset, thinify, AlgebraicWeight, BesicovitchConfig,
    BitString, CoverSet, DagCode, Dyadic, Error, Exponent, Extraction, GadgetKind, InjectionTable, MeasureValue,
    SpecSource, ThinParams,
};
use cgmt_core::construct::{verify_extraction, OpenCode};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde_json::{json, Map, Value};
use std::path::Path;

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    serde_json::from_str(&read(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())).into())
}

/// A spec file when the path exists, otherwise a builtin name.
fn load_tree(spec: &str) -> CliResult<SpecSource> {
    let path = Path::new(spec);
    if path.is_file() {
        Ok(parse_spec(&read(path)?)?)
    } else {
        Ok(parse_spec(spec)?)
    }
}

/// A bare DAG code, or a report carrying one at `results.code` or
/// `results.extraction.code`.
fn load_code(path: &Path) -> CliResult<DagCode> {
    let v: Value = read_json(path)?;
    let node = v
        .pointer("/results/extraction/code")
        .or_else(|| v.pointer("/results/code"))
        .unwrap_or(&v)
        .clone();
    serde_json::from_value(node).map_err(|e| Error::Parse(format!("{}: not a DAG code: {e}", path.display())).into())
}

/// A code from `path`, checked against `--tree` when one is given.
fn load_checked_code(c: &Common, path: &Path) -> CliResult<DagCode> {
    let code = load_code(path)?;
    if let Some(spec) = &c.tree {
        let ambient = DagCode::ambient(&load_tree(spec)?, code.depth(), false)?;
        code.validate(&ambient, false)?;
    }
    Ok(code)
}

fn exponent(c: &Common) -> CliResult<Exponent> {
    Ok(c.s.parse()?)
}

fn weight(flag: &str, v: &Option<String>, default: Option<&str>) -> CliResult<AlgebraicWeight> {
    match v.as_deref().or(default) {
        Some(text) => Ok(text.parse()?),
        None => Err(CliError::Usage(format!("--{flag} is required"))),
    }
}

fn inputs(pairs: Vec<(&str, Value)>) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn emit(c: &Common, doc: ReportDocument) -> CliResult<String> {
    match c.format {
        Format::Json => Ok(doc.to_json()),
        Format::Csv => Err(CliError::Usage(format!("{} has no CSV form; CSV covers measure sequences only", doc.command))),
    }
}

fn done(text: String) -> Outcome {
    Outcome { text, failure: None }
}

fn value_row(mv: &MeasureValue, with_cover: bool) -> Value {
    let mut row = json!({
        "block": mv.at_block,
        "value": mv.value,
        "cover_size": mv.witness.as_ref().map(|w| w.strings.len()),
    });
    if with_cover {
        row["cover"] = json!(mv.witness);
    }
    row
}

pub fn measure(c: &Common, code: Option<&Path>, with_cover: bool) -> CliResult<Outcome> {
    let s = exponent(c)?;
    let (seq, source) = match code {
        Some(path) => {
            let code = load_checked_code(c, path)?;
            let top = c.depth.unwrap_or(code.depth()).min(code.depth());
            let seq: Vec<MeasureValue> = (0..=top).map(|k| htilde_code(&code, k, s, c.n)).collect();
            (seq, json!({ "code": path.display().to_string() }))
        }
        None => {
            let src = load_tree(c.tree_name())?;
            let blocks: Vec<u32> = (0..=c.depth.unwrap_or(8)).collect();
            (measure_sequence(&src, s, c.n, &blocks)?, json!({ "tree": c.tree }))
        }
    };
    if c.format == Format::Csv {
        let rows: Vec<(u32, String, String)> =
            seq.iter().map(|m| (m.at_block, m.value.ring_literal(), m.value.decimal(30))).collect();
        return Ok(done(sequence_csv(&rows)));
    }
    let results = json!({
        "sequence": seq.iter().map(|m| value_row(m, with_cover)).collect::<Vec<_>>(),
        "final": seq.last().map(|m| &m.value),
    });
    let doc = ReportDocument::new(
        "measure",
        inputs(vec![("source", source), ("s", json!(c.s)), ("n", json!(c.n)), ("depth", json!(c.depth))]),
        results,
        None,
    );
    Ok(done(emit(c, doc)?))
}

pub fn cover_verify(c: &Common, cover: Option<&Path>, cert: Option<&Path>, code: Option<&Path>) -> CliResult<Outcome> {
    if let Some(path) = cert {
        return recheck_certificates(c, path);
    }
    let Some(path) = cover else {
        return Err(CliError::Usage("cover-verify needs --cover or --certificate".into()));
    };
    let s = exponent(c)?;
    let cover: CoverSet = read_json(path)?;
    let k = c.depth.unwrap_or(cover.m);
    let (code, source) = match code {
        Some(p) => (load_checked_code(c, p)?, json!({ "code": p.display().to_string() })),
        None => (DagCode::ambient(&load_tree(c.tree_name())?, k, false)?, json!({ "tree": c.tree })),
    };
    let w = verify_cover_code(&cover, &code, k, cover.n, s)?;
    let minimum = htilde_value(&code, k, s, cover.n);
    let results = json!({
        "valid": true,
        "weight": w,
        "minimum": minimum,
        "optimal": w == minimum,
    });
    let doc = ReportDocument::new(
        "cover-verify",
        inputs(vec![("cover", json!(path.display().to_string())), ("source", source), ("s", json!(c.s)), ("block", json!(k))]),
        results,
        None,
    );
    Ok(done(emit(c, doc)?))
}

fn recheck_certificates(c: &Common, path: &Path) -> CliResult<Outcome> {
    let v: Value = read_json(path)?;
    let node = v.pointer("/results/extraction").cloned().unwrap_or(v);
    let ex: Extraction =
        serde_json::from_value(node).map_err(|e| Error::Parse(format!("{}: not an extraction: {e}", path.display())))?;
    let chained = verify_extraction(&ex);
    let mut rows = Vec::new();
    let mut all = true;
    for (cert, chain_ok) in ex.certificates.iter().zip(&chained) {
        let u = &cert.upper_witness;
        let own = check_certificate(&cert.code, cert, ex.s, &ex.c, ex.n0);
        let recomputed = htilde_code(&ex.code, u.block, ex.s, cert.stage);
        let cover_weight = recomputed
            .witness
            .as_ref()
            .and_then(|w| verify_cover_code(w, &ex.code, u.block, cert.stage, ex.s).ok());
        let cover_ok = cover_weight.as_ref() == Some(&u.value);
        let ok = own && *chain_ok && cover_ok && recomputed.value == u.value;
        all &= ok;
        rows.push(json!({
            "stage": cert.stage,
            "upper_block": u.block,
            "upper": recomputed.value,
            "d": cert.d,
            "lower": cert.lower_checks.iter().map(|l| htilde_value(&ex.code, l.block, ex.s, ex.n0)).collect::<Vec<_>>(),
            "certificate_holds": own,
            "final_code_holds": chain_ok,
            "cover_reproduces_upper": cover_ok,
            "verdict": ok,
        }));
    }
    let doc = ReportDocument::new(
        "cover-verify",
        inputs(vec![("certificate", json!(path.display().to_string()))]),
        json!({ "certificates": rows, "all_verified": all }),
        None,
    );
    let text = emit(c, doc)?;
    let failure = (!all).then(|| CliError::Mismatch("a certificate verdict did not reproduce".into()));
    Ok(Outcome { text, failure })
}

pub fn extract(c: &Common, pruned: bool) -> CliResult<Outcome> {
    let s = exponent(c)?;
    let src = load_tree(c.tree_name())?;
    let target = weight("c", &c.c, None)?;
    let eps = weight("eps", &c.eps, Some("1/2^4"))?;
    let depth = c.depth.unwrap_or(16);
    let out = match (pruned, c.window) {
        (true, _) => pruned_approx_subset(&src, s, c.n, &target, &eps, depth)?,
        (false, None) => approx_subset(&src, s, c.n, &target, &eps, depth)?,
        (false, Some(w)) => {
            let code = DagCode::ambient(&src, depth, false)?;
            interpolate_subset(&code, c.n, s, c.n, &target, &eps, w)?
        }
    };
    let name = if pruned { "extract-pruned" } else { "extract" };
    let doc = ReportDocument::new(
        name,
        inputs(vec![
            ("tree", json!(c.tree_name())),
            ("s", json!(c.s)),
            ("n", json!(c.n)),
            ("c", json!(target)),
            ("eps", json!(eps)),
            ("depth", json!(depth)),
            ("window", json!(c.window)),
        ]),
        json!(out),
        None,
    );
    Ok(done(emit(c, doc)?))
}

pub fn thin(c: &Common, code: Option<&Path>) -> CliResult<Outcome> {
    let s = exponent(c)?;
    let (z, source) = match code {
        Some(p) => (load_checked_code(c, p)?, json!({ "code": p.display().to_string() })),
        None => (DagCode::ambient(&load_tree(c.tree_name())?, c.depth.unwrap_or(24), true)?, json!({ "tree": c.tree })),
    };
    let lower = htilde_value(&z, z.depth(), s, 0);
    let target = match &c.c {
        Some(t) => t.parse()?,
        None => lower,
    };
    let theta = weight("theta", &c.theta, Some("1/2^6"))?;
    let params = ThinParams { s, n: c.n, n0: 0, c: target.clone(), theta: theta.clone() };
    let out = thinify(&z, c.n, &params)?;
    let doc = ReportDocument::new(
        "thin",
        inputs(vec![
            ("source", source),
            ("s", json!(c.s)),
            ("n", json!(c.n)),
            ("c", json!(target)),
            ("theta", json!(theta)),
            ("depth", json!(z.depth())),
        ]),
        json!(out),
        None,
    );
    Ok(done(emit(c, doc)?))
}

pub fn besicovitch(c: &Common) -> CliResult<Outcome> {
    let s = exponent(c)?;
    let src = load_tree(c.tree_name())?;
    let target = weight("c", &c.c, Some("1"))?;
    let stages = c.stages.unwrap_or(6);
    let defaults = BesicovitchConfig::default();
    let config = BesicovitchConfig {
        horizon: c.depth.unwrap_or(defaults.horizon),
        budget: c.cap.unwrap_or(defaults.budget),
        ..defaults
    };
    let ex = besicovitch_extract(&src, s, &target, c.n, stages, &config)?;
    let verified = verify_extraction(&ex);
    let all = verified.iter().all(|&b| b);
    let doc = ReportDocument::new(
        "besicovitch",
        inputs(vec![
            ("tree", json!(c.tree_name())),
            ("s", json!(c.s)),
            ("n0", json!(c.n)),
            ("c", json!(target)),
            ("stages", json!(stages)),
            ("config", json!(config)),
        ]),
        json!({ "extraction": ex, "verified": verified, "all_verified": all }),
        None,
    );
    let text = emit(c, doc)?;
    let failure = (!all).then(|| CliError::Mismatch("a certificate failed its recheck".into()));
    Ok(Outcome { text, failure })
}

pub fn lebesgue(c: &Common) -> CliResult<Outcome> {
    let src = load_tree(c.tree_name())?;
    let Some(text) = &c.c else {
        return Err(CliError::Usage("--c is required".into()));
    };
    let measure: Dyadic = text.parse()?;
    let depth = c.depth.unwrap_or(64);
    let cap = match c.cap {
        Some(v) => u32::try_from(v).map_err(|_| CliError::Usage("--cap is too large".into()))?,
        None => depth + 16,
    };
    let path = lebesgue_path(&src, &measure, depth, cap)?;
    let doc = ReportDocument::new(
        "lebesgue-path",
        inputs(vec![("tree", json!(c.tree_name())), ("c", json!(measure)), ("depth", json!(depth)), ("cap", json!(cap))]),
        json!({ "path": path, "length": path.len() }),
        None,
    );
    Ok(done(emit(c, doc)?))
}

fn contains_word(x: &BitString, w: &BitString) -> bool {
    x.len() >= w.len() && (0..=x.len() - w.len()).any(|i| (0..w.len()).all(|j| x.bit(i + j) == w.bit(j)))
}

pub fn baire(c: &Common) -> CliResult<Outcome> {
    let src = load_tree(c.tree_name())?;
    let count = c.stages.unwrap_or(8);
    let depth = c.depth.unwrap_or(32);
    let cap = c.cap.unwrap_or(100_000);
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let words: Vec<BitString> = (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=3);
            BitString::from_bits((0..len).map(|_| rng.gen_bool(0.5)).collect())
        })
        .collect();
    let preds: Vec<Box<dyn Fn(&BitString) -> bool + Sync>> = words
        .iter()
        .map(|w| {
            let w = w.clone();
            Box::new(move |x: &BitString| contains_word(x, &w)) as Box<dyn Fn(&BitString) -> bool + Sync>
        })
        .collect();
    let opens: Vec<OpenCode> = preds.iter().map(|p| p.as_ref()).collect();
    let out = baire_intersect(&src, &opens, &BitString::empty(), depth as usize, cap)?;
    let met: Vec<bool> = words.iter().map(|w| contains_word(&out.path, w)).collect();
    let all = met.iter().all(|&b| b);
    let doc = ReportDocument::new(
        "baire",
        inputs(vec![("tree", json!(c.tree_name())), ("codes", json!(count)), ("depth", json!(depth)), ("cap", json!(cap))]),
        json!({ "words": words, "result": out, "met": met }),
        Some(c.seed),
    );
    let text = emit(c, doc)?;
    let failure = (!all).then(|| CliError::Mismatch("the path misses an open code".into()));
    Ok(Outcome { text, failure })
}

fn random_table(rng: &mut ChaCha8Rng, h: usize) -> InjectionTable {
    let mut pool: Vec<u64> = (0..2 * h as u64).collect();
    pool.shuffle(rng);
    pool.truncate(h);
    InjectionTable::new(pool).expect("distinct")
}

pub fn gadget(c: &Common, kind: &str, table: Option<&str>, horizon: usize) -> CliResult<Outcome> {
    let kinds: Vec<GadgetKind> = if kind == "all" { GadgetKind::ALL.to_vec() } else { vec![GadgetKind::parse(kind)?] };
    let (table, seed) = match table {
        Some(text) => {
            let values = text
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| t.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad table entry {t:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            (InjectionTable::new(values)?, None)
        }
        None => (random_table(&mut ChaCha8Rng::seed_from_u64(c.seed), horizon), Some(c.seed)),
    };
    let depth = c.depth.unwrap_or(table.horizon() as u32);
    let mut reports = Vec::new();
    let mut all = true;
    for k in kinds {
        let g = build_gadget(k, &table, depth)?;
        let r = check_gadget(&g, &table);
        all &= r.ok();
        reports.push(json!({ "report": r, "path": g.path }));
    }
    let doc = ReportDocument::new(
        "gadget",
        inputs(vec![("kind", json!(kind)), ("table", json!(table)), ("depth", json!(depth))]),
        json!({ "gadgets": reports, "all_match": all }),
        seed,
    );
    let text = emit(c, doc)?;
    let failure = (!all).then(|| CliError::Mismatch("a gadget decoding disagrees with range membership".into()));
    Ok(Outcome { text, failure })
}

pub fn verify_suite(c: &Common, trials: u32) -> CliResult<Outcome> {
    const EXPONENTS: [&str; 4] = ["1/2", "2/3", "1", "3/2"];
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let mut mismatches = Vec::new();
    let mut per_exponent = Map::new();
    for t in 0..trials {
        let depth = rng.gen_range(1..=6u32);
        let n = rng.gen_range(0..=2u32);
        let label = EXPONENTS[rng.gen_range(0..EXPONENTS.len())];
        let s: Exponent = label.parse().expect("literal exponent");
        let keep = rng.gen_range(0.3..0.9);
        let nu = marking_from_choices(depth, |_| rng.gen_bool(keep))?;
        let dp = htilde(&nu, s, n);
        let oracle = htilde_bruteforce(&nu, s, n)?;
        let witness_ok = dp.witness.as_ref().is_some_and(|w| w.weight(s) == dp.value);
        if dp.value != oracle.value || !witness_ok {
            mismatches.push(json!({
                "trial": t, "depth": depth, "n": n, "s": label,
                "dp": dp.value, "oracle": oracle.value, "witness_weight_matches": witness_ok,
            }));
        }
        let slot = per_exponent.entry(label.to_string()).or_insert(json!(0));
        *slot = json!(slot.as_u64().unwrap_or(0) + 1);
    }
    let ok = mismatches.is_empty();
    let doc = ReportDocument::new(
        "verify-suite",
        inputs(vec![("trials", json!(trials))]),
        json!({ "trials": trials, "per_exponent": per_exponent, "mismatches": mismatches, "all_match": ok }),
        Some(c.seed),
    );
    let text = emit(c, doc)?;
    let failure = (!ok).then(|| CliError::Mismatch("dynamic program and oracle disagree".into()));
    Ok(Outcome { text, failure })
}
