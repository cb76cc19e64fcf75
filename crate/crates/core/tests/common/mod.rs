//! Test-side oracles written independently of the library's dynamic program.
#![allow(dead_code)]

use cgmt_core::bits::{block_len, string_at};
use cgmt_core::trees::marking_from_choices;
use cgmt_core::{AlgebraicWeight, BitString, DagCode, Exponent, Forest, SubtreeCodePrefix, TreeSource};
use rand::Rng;
use serde_json::Value;
use std::collections::{BTreeSet, HashMap};

pub const EXPONENTS: [&str; 4] = ["1/2", "2/3", "1", "3/2"];

pub fn ex(s: &str) -> Exponent {
    s.parse().unwrap()
}

pub fn w(s: &str) -> AlgebraicWeight {
    s.parse().unwrap()
}

pub fn bs(s: &str) -> BitString {
    s.parse().unwrap()
}

/// A validated random marking of the full tree through `depth`.
pub fn random_marking<R: Rng>(rng: &mut R, depth: u32, keep: f64) -> SubtreeCodePrefix {
    marking_from_choices(depth, |_| rng.gen_bool(keep)).unwrap()
}

/// Marked strings of length `m`.
pub fn level_marks(nu: &SubtreeCodePrefix, m: u32) -> BTreeSet<BitString> {
    let lo = block_len(m) - (1u64 << m);
    (lo..block_len(m)).filter(|&i| nu.prefix().entries()[i as usize]).map(string_at).collect()
}

/// Minimum s-weight over every antichain of strings with lengths in [n, m]
/// covering `targets` (all of length m). Exponential; m ≤ 4.
pub fn antichain_min(targets: &BTreeSet<BitString>, m: u32, s: Exponent, n: u32) -> AlgebraicWeight {
    assert!(m <= 4);
    let candidates: Vec<BitString> = (n..=m).flat_map(BitString::all_of_length).collect();
    let mut best: Option<AlgebraicWeight> = None;
    let mut chosen: Vec<BitString> = Vec::new();
    fn go(
        i: usize,
        cands: &[BitString],
        chosen: &mut Vec<BitString>,
        targets: &BTreeSet<BitString>,
        s: Exponent,
        best: &mut Option<AlgebraicWeight>,
    ) {
        if i == cands.len() {
            if targets.iter().all(|t| chosen.iter().any(|c| c.is_prefix_of(t))) {
                let wt: AlgebraicWeight = chosen.iter().map(|c| s.pow2_neg(c.len() as u32)).sum();
                if best.as_ref().map_or(true, |b| wt < *b) {
                    *best = Some(wt);
                }
            }
            return;
        }
        go(i + 1, cands, chosen, targets, s, best);
        let c = &cands[i];
        if chosen.iter().all(|x| !x.compatible(c)) {
            chosen.push(c.clone());
            go(i + 1, cands, chosen, targets, s, best);
            chosen.pop();
        }
    }
    go(0, &candidates, &mut chosen, targets, s, &mut best);
    best.unwrap()
}

/// H̃^s_n read from the serialized DAG, through block `k`.
pub fn json_dag_value(code: &DagCode, k: u32, s: Exponent, n: u32) -> AlgebraicWeight {
    let v: Value = serde_json::to_value(code).unwrap();
    let depth = v["depth"].as_u64().unwrap() as u32;
    let k = k.min(depth);
    if k < n {
        return s.level_cover(n);
    }
    let nodes: Vec<[Option<usize>; 2]> = v["nodes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| {
            let a = p.as_array().unwrap();
            [a[0].as_u64().map(|x| x as usize), a[1].as_u64().map(|x| x as usize)]
        })
        .collect();
    let Some(root) = v["root"].as_u64() else {
        return AlgebraicWeight::zero();
    };
    let mut memo: HashMap<(usize, u32), AlgebraicWeight> = HashMap::new();
    fn f(
        id: usize,
        level: u32,
        k: u32,
        n: u32,
        s: Exponent,
        nodes: &[[Option<usize>; 2]],
        memo: &mut HashMap<(usize, u32), AlgebraicWeight>,
    ) -> AlgebraicWeight {
        if level == k {
            return s.pow2_neg(k);
        }
        if let Some(x) = memo.get(&(id, level)) {
            return x.clone();
        }
        let below: AlgebraicWeight =
            nodes[id].iter().flatten().map(|&c| f(c, level + 1, k, n, s, nodes, memo)).sum();
        let here = s.pow2_neg(level);
        let out = if level >= n && below.signum() > 0 && here < below { here } else { below };
        memo.insert((id, level), out.clone());
        out
    }
    f(root as usize, 0, k, n, s, &nodes, &mut memo)
}

/// Every string marked by `code` is a member of `src`.
pub fn within_ambient(code: &DagCode, src: &dyn TreeSource) -> bool {
    let mut f = Forest::new();
    let ours = f.import(code);
    let amb = f.ambient(src, code.depth(), false).unwrap();
    f.subset(ours, amb)
}
