//! Exact premeasures H̃^s_n by a min-weight prefix-cover dynamic program.

use crate::bits::BitString;
use crate::dag::{DagCode, Forest, NodeId, NodeStore};
use crate::error::{Error, Result};
use crate::trees::{SubtreeCodePrefix, TreeSource, TruncatedTree};
use crate::weights::{weight_of_strings, AlgebraicWeight, Exponent};
use serde::{Deserialize, Serialize};
use num_traits::Zero;
use std::collections::{BTreeSet, HashMap, HashSet};

/// Largest block accepted by the brute-force oracle.
pub const BRUTEFORCE_MAX_BLOCK: u32 = 7;

/// Witness covers larger than this are not materialized.
pub const WITNESS_LIMIT: usize = 1 << 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverSet {
    pub strings: Vec<BitString>,
    pub n: u32,
    pub m: u32,
}

impl CoverSet {
    pub fn new(mut strings: Vec<BitString>, n: u32, m: u32) -> Self {
        strings.sort_by(|a, b| a.length_lex_cmp(b));
        strings.dedup();
        CoverSet { strings, n, m }
    }

    pub fn weight(&self, s: Exponent) -> AlgebraicWeight {
        weight_of_strings(&self.strings, s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureValue {
    pub value: AlgebraicWeight,
    pub witness: Option<CoverSet>,
    pub at_block: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureBracket {
    pub lower: AlgebraicWeight,
    pub lower_block: u32,
    pub upper: AlgebraicWeight,
    pub upper_block: u32,
}

/// Memoized evaluator of H̃^s_n at a fixed block `k`.
///
/// Memo entries are keyed by node id and level, so one evaluator must only be
/// used with a single node store. Reusing it across codes that share a
/// [`Forest`] reuses every shared subresult.
pub struct Premeasure {
    s: Exponent,
    n: u32,
    k: u32,
    level_weight: Vec<AlgebraicWeight>,
    memo: HashMap<(NodeId, u32), AlgebraicWeight>,
}

impl Premeasure {
    pub fn new(s: Exponent, n: u32, k: u32) -> Self {
        let level_weight = (0..=k).map(|l| s.pow2_neg(l)).collect();
        Premeasure { s, n, k, level_weight, memo: HashMap::new() }
    }

    pub fn block(&self) -> u32 {
        self.k
    }

    /// Value for the code rooted at `root`, read through block `k`.
    pub fn value<S: NodeStore>(&mut self, store: &S, root: Option<NodeId>) -> AlgebraicWeight {
        if self.k < self.n {
            return self.s.level_cover(self.n);
        }
        match root {
            None => AlgebraicWeight::zero(),
            Some(r) => self.node_value(store, r, 0),
        }
    }

    fn node_value<S: NodeStore>(&mut self, store: &S, id: NodeId, level: u32) -> AlgebraicWeight {
        if level == self.k {
            return self.level_weight[level as usize].clone();
        }
        if let Some(v) = self.memo.get(&(id, level)) {
            return v.clone();
        }
        let mut sum = AlgebraicWeight::zero();
        for b in [false, true] {
            if let Some(c) = store.child(id, b) {
                sum = &sum + &self.node_value(store, c, level + 1);
            }
        }
        let v = if level < self.n || sum.is_zero() {
            sum
        } else {
            sum.min(self.level_weight[level as usize].clone())
        };
        self.memo.insert((id, level), v.clone());
        v
    }

    /// A minimum cover, preferring the shallow string on ties. `None` when the
    /// cover would exceed `limit` strings.
    pub fn witness<S: NodeStore>(&mut self, store: &S, root: Option<NodeId>, limit: usize) -> Option<CoverSet> {
        if self.k < self.n {
            let count = 1usize.checked_shl(self.n).filter(|&c| c <= limit)?;
            let strings = (0..count as u64).map(|r| BitString::from_rank(self.n, r)).collect();
            return Some(CoverSet::new(strings, self.n, self.n));
        }
        let mut out = Vec::new();
        if let Some(r) = root {
            let _ = self.node_value(store, r, 0);
            let mut stack = vec![(r, BitString::empty())];
            while let Some((id, s)) = stack.pop() {
                let level = s.len() as u32;
                if level >= self.n {
                    let v = self.node_value(store, id, level);
                    if v.is_zero() {
                        continue;
                    }
                    if level == self.k || v == self.level_weight[level as usize] {
                        out.push(s);
                        if out.len() > limit {
                            return None;
                        }
                        continue;
                    }
                }
                for b in [true, false] {
                    if let Some(c) = store.child(id, b) {
                        stack.push((c, s.child(b)));
                    }
                }
            }
        }
        Some(CoverSet::new(out, self.n, self.k))
    }
}

/// H̃^s_n of a code read through block `k` (k ≤ code depth).
pub fn htilde_code(code: &DagCode, k: u32, s: Exponent, n: u32) -> MeasureValue {
    let k = k.min(code.depth());
    let mut p = Premeasure::new(s, n, k);
    let value = p.value(code, code.root());
    let witness = p.witness(code, code.root(), WITNESS_LIMIT);
    MeasureValue { value, witness, at_block: k }
}

/// Value only, without witness recovery.
pub fn htilde_value(code: &DagCode, k: u32, s: Exponent, n: u32) -> AlgebraicWeight {
    let k = k.min(code.depth());
    Premeasure::new(s, n, k).value(code, code.root())
}

/// H̃^s_n of a validated code prefix or restriction marking, at its largest
/// complete block.
pub fn htilde(nu: &SubtreeCodePrefix, s: Exponent, n: u32) -> MeasureValue {
    let Some(m) = nu.block().filter(|&m| m >= n) else {
        let mut p = Premeasure::new(s, n, 0);
        let witness = p.witness(&Forest::new(), None, WITNESS_LIMIT);
        return MeasureValue { value: s.level_cover(n), witness, at_block: nu.block().unwrap_or(0) };
    };
    let mut f = Forest::new();
    let root = f.from_code_prefix(nu.prefix(), m);
    let mut p = Premeasure::new(s, n, m);
    let value = p.value(&f, root);
    let witness = p.witness(&f, root, WITNESS_LIMIT);
    MeasureValue { value, witness, at_block: m }
}

/// Independent oracle: explicit cover sets chosen by "cover here or delegate
/// to both children" over all strings, compared by their recomputed weight.
pub fn htilde_bruteforce(nu: &SubtreeCodePrefix, s: Exponent, n: u32) -> Result<MeasureValue> {
    let block = nu.block().unwrap_or(0);
    if block > BRUTEFORCE_MAX_BLOCK {
        return Err(Error::DepthTooLarge { depth: block, max: BRUTEFORCE_MAX_BLOCK });
    }
    if nu.block().is_none() || block < n {
        let cover: Vec<BitString> = BitString::all_of_length(n).collect();
        let value = weight_of_strings(&cover, s);
        return Ok(MeasureValue { value, witness: Some(CoverSet::new(cover, n, n)), at_block: block });
    }
    let leaves: Vec<BitString> = BitString::all_of_length(block).filter(|l| nu.marks(l)).collect();
    fn best(sigma: &BitString, leaves: &[BitString], n: u32, m: u32, s: Exponent) -> Vec<BitString> {
        let below: Vec<BitString> = leaves.iter().filter(|l| sigma.is_prefix_of(l)).cloned().collect();
        if below.is_empty() {
            return Vec::new();
        }
        let mut options: Vec<Vec<BitString>> = Vec::new();
        if sigma.len() as u32 >= n {
            options.push(vec![sigma.clone()]);
        }
        if (sigma.len() as u32) < m {
            let mut both = best(&sigma.child(false), &below, n, m, s);
            both.extend(best(&sigma.child(true), &below, n, m, s));
            options.push(both);
        }
        options.into_iter().min_by(|a, b| weight_of_strings(a, s).cmp(&weight_of_strings(b, s))).unwrap()
    }
    let cover = best(&BitString::empty(), &leaves, n, block, s);
    let value = weight_of_strings(&cover, s);
    Ok(MeasureValue { value, witness: Some(CoverSet::new(cover, n, block)), at_block: block })
}

/// Checks that `cover` is a 2^{-n}-cover of the depth-level members of `t`
/// and returns its s-weight.
pub fn verify_delta_cover(cover: &CoverSet, t: &TruncatedTree, n: u32, s: Exponent) -> Result<AlgebraicWeight> {
    if let Some(w) = cover.strings.iter().find(|c| (c.len() as u32) < n) {
        return Err(Error::LengthViolation { witness: w.clone() });
    }
    let set: HashSet<&BitString> = cover.strings.iter().collect();
    for leaf in t.level(t.depth()) {
        if !(0..=leaf.len()).any(|k| set.contains(&leaf.prefix(k))) {
            return Err(Error::NotACover { witness: leaf });
        }
    }
    Ok(cover.weight(s))
}

/// Cover check against a DAG code read through block `k`.
pub fn verify_cover_code(cover: &CoverSet, code: &DagCode, k: u32, n: u32, s: Exponent) -> Result<AlgebraicWeight> {
    if let Some(w) = cover.strings.iter().find(|c| (c.len() as u32) < n) {
        return Err(Error::LengthViolation { witness: w.clone() });
    }
    let k = k.min(code.depth());
    let set: HashSet<&BitString> = cover.strings.iter().collect();
    let mut interior: HashSet<BitString> = HashSet::new();
    for c in &cover.strings {
        for l in 0..c.len() {
            interior.insert(c.prefix(l));
        }
    }
    let mut f = Forest::new();
    let root = f.import(code);
    let mut stack: Vec<(NodeId, BitString)> = root.map(|r| (r, BitString::empty())).into_iter().collect();
    let mut uncovered: Option<BitString> = None;
    while let Some((id, sigma)) = stack.pop() {
        if set.contains(&sigma) {
            continue;
        }
        let level = sigma.len() as u32;
        if !interior.contains(&sigma) {
            let t = f.truncate(Some(id), k - level);
            if !f.count_level(t, k - level).is_zero() {
                let witness = first_leaf(&f, id, sigma, k);
                if uncovered.as_ref().map_or(true, |u| witness.length_lex_cmp(u).is_lt()) {
                    uncovered = Some(witness);
                }
            }
            continue;
        }
        for b in [true, false] {
            if let Some(c) = f.child(id, b) {
                stack.push((c, sigma.child(b)));
            }
        }
    }
    match uncovered {
        Some(w) => Err(Error::NotACover { witness: w }),
        None => Ok(cover.weight(s)),
    }
}

fn first_leaf(f: &Forest, id: NodeId, sigma: BitString, k: u32) -> BitString {
    fn rec(f: &Forest, id: NodeId, s: &mut BitString, k: u32) -> bool {
        if s.len() as u32 == k {
            return true;
        }
        for b in [false, true] {
            if let Some(c) = f.child(id, b) {
                s.push(b);
                if rec(f, c, s, k) {
                    return true;
                }
                s.pop();
            }
        }
        false
    }
    let mut s = sigma;
    rec(f, id, &mut s, k);
    s
}

/// H̃^s_n of the source's tree at each requested block.
pub fn measure_sequence(src: &dyn TreeSource, s: Exponent, n: u32, blocks: &[u32]) -> Result<Vec<MeasureValue>> {
    if blocks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("blocks must be strictly increasing".into()));
    }
    let Some(&top) = blocks.last() else { return Ok(Vec::new()) };
    let code = DagCode::ambient(src, top, false)?;
    Ok(blocks.iter().map(|&k| htilde_code(&code, k, s, n)).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompareReport {
    pub verified: bool,
    /// Least block of the first code that beats every block of the second.
    pub k: Option<u32>,
    pub horizon: u32,
    pub label: String,
}

/// Finite-horizon check of ∃k ∀m ≤ horizon: H̃(zE^{≤k}) < H̃(zF^{≤m}) + ε.
pub fn compare_measures(
    z_e: &DagCode,
    z_f: &DagCode,
    s: Exponent,
    n: u32,
    eps: &AlgebraicWeight,
    horizon: u32,
) -> Result<CompareReport> {
    if horizon > z_e.depth() || horizon > z_f.depth() {
        return Err(Error::HorizonExceeded { needed: horizon, horizon: z_e.depth().min(z_f.depth()) });
    }
    let floor = (0..=horizon)
        .map(|m| htilde_value(z_f, m, s, n))
        .min()
        .expect("nonempty range");
    let bound = &floor + eps;
    let k = (0..=horizon).find(|&k| htilde_value(z_e, k, s, n) < bound);
    Ok(CompareReport { verified: k.is_some(), k, horizon, label: "verified to horizon".into() })
}

/// All marked strings of a small code, for tests and diagnostics.
pub fn marked_set(code: &DagCode, k: u32) -> BTreeSet<BitString> {
    let mut out = BTreeSet::new();
    for l in 0..=k.min(code.depth()) {
        out.extend(code.level_strings(l, usize::MAX));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::CodePrefix;
    use crate::trees::{validate_code, Builtin};

    fn ex(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    fn w(s: &str) -> AlgebraicWeight {
        s.parse().unwrap()
    }

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn code_of(marked: &[&str], block: u32) -> SubtreeCodePrefix {
        let strings: Vec<BitString> = marked.iter().map(|m| bs(m)).collect();
        let p = CodePrefix::from_marked(block, &strings).unwrap();
        validate_code(&p, &Builtin::Full, false).unwrap()
    }

    #[test]
    fn empty_prefix_uses_level_cover() {
        let nu = SubtreeCodePrefix::unchecked(CodePrefix::new(vec![]), false);
        assert_eq!(htilde(&nu, ex("1/2"), 2).value, w("2"));
    }

    #[test]
    fn full_block_two_at_half() {
        let nu = code_of(&["", "0", "1", "00", "01", "10", "11"], 2);
        let v = htilde(&nu, ex("1/2"), 1);
        assert_eq!(v.value, w("2:0,2"));
        let cover: Vec<String> = v.witness.unwrap().strings.iter().map(|s| s.to_plain()).collect();
        assert_eq!(cover, ["0", "1"]);
    }

    #[test]
    fn hand_computed_lebesgue_value() {
        let nu = code_of(&["", "0", "00", "01"], 2);
        assert_eq!(htilde(&nu, ex("1"), 0).value, w("1/2"));
        assert_eq!(htilde_bruteforce(&nu, ex("1"), 0).unwrap().value, w("1/2"));
    }

    #[test]
    fn bruteforce_depth_guard_and_empty() {
        let big = SubtreeCodePrefix::unchecked(CodePrefix::new(vec![true; 255]), false);
        assert_eq!(htilde_bruteforce(&big, ex("1"), 0).unwrap().value, w("1"));
        let huge = SubtreeCodePrefix::unchecked(CodePrefix::new(vec![true; 511]), false);
        assert!(matches!(htilde_bruteforce(&huge, ex("1"), 0), Err(Error::DepthTooLarge { .. })));
        let r = crate::trees::restrict(&code_of(&["", "0", "00"], 2), &bs("1"));
        assert!(htilde_bruteforce(&r, ex("1"), 0).unwrap().value.is_zero());
        assert!(htilde(&r, ex("1"), 0).value.is_zero());
    }

    #[test]
    fn single_leaf_lebesgue() {
        let nu = code_of(&["", "1", "10", "101"], 3);
        assert_eq!(htilde(&nu, ex("1"), 0).value, w("1/8"));
    }

    #[test]
    fn delta_cover_checks() {
        let t = TruncatedTree::from_source(&Builtin::Full, 2);
        let full = CoverSet::new(vec![bs("0"), bs("1")], 1, 2);
        assert_eq!(verify_delta_cover(&full, &t, 1, ex("1/2")).unwrap(), w("2:0,2"));
        let root = CoverSet::new(vec![BitString::empty()], 0, 2);
        assert_eq!(
            verify_delta_cover(&root, &t, 1, ex("1")),
            Err(Error::LengthViolation { witness: BitString::empty() })
        );
        let half = CoverSet::new(vec![bs("0")], 1, 2);
        assert_eq!(verify_delta_cover(&half, &t, 1, ex("1")), Err(Error::NotACover { witness: bs("10") }));
    }

    #[test]
    fn dag_cover_checks_agree() {
        let code = DagCode::ambient(&Builtin::Full, 2, false).unwrap();
        let half = CoverSet::new(vec![bs("0")], 1, 2);
        assert_eq!(verify_cover_code(&half, &code, 2, 1, ex("1")), Err(Error::NotACover { witness: bs("10") }));
        let deep = htilde_code(&DagCode::ambient(&Builtin::Full, 40, false).unwrap(), 40, ex("1/2"), 3);
        let cover = deep.witness.unwrap();
        assert_eq!(cover.strings.len(), 8);
        let full40 = DagCode::ambient(&Builtin::Full, 40, false).unwrap();
        assert_eq!(verify_cover_code(&cover, &full40, 40, 3, ex("1/2")).unwrap(), deep.value);
    }

    #[test]
    fn sequences_for_builtins() {
        let seq = measure_sequence(&Builtin::Full, ex("1/2"), 2, &[2, 10, 40]).unwrap();
        assert!(seq.iter().all(|v| v.value == w("2")));
        let left = measure_sequence(&Builtin::BranchLeft, ex("1"), 0, &[1, 5, 30]).unwrap();
        assert!(left.iter().all(|v| v.value == w("1/2")));
        let one = measure_sequence(&Builtin::Full, ex("1"), 3, &[3, 9]).unwrap();
        assert!(one.iter().all(|v| v.value == w("1")));
    }

    #[test]
    fn comparison_verdicts() {
        let full = DagCode::ambient(&Builtin::Full, 6, false).unwrap();
        let left = DagCode::ambient(&Builtin::BranchLeft, 6, false).unwrap();
        let eps = w("1/4");
        assert!(compare_measures(&full, &full, ex("1"), 0, &eps, 6).unwrap().verified);
        assert!(compare_measures(&left, &full, ex("1"), 0, &eps, 6).unwrap().verified);
        assert!(!compare_measures(&full, &left, ex("1"), 0, &eps, 6).unwrap().verified);
    }
}
