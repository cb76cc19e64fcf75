//! Interpolation: a subtree whose premeasure lands in [c, c + ε) on a window
//! of blocks.
//!
//! Y_0 keeps the prefix through level n′ and one lexicographically least
//! surviving branch per level-n′ node down to level m. Y(γ) adds back every
//! level-m subtree of the input at or left of the cut string γ. Values are
//! monotone in γ, so the least qualifying cut per block is found by a bitwise
//! descent, and the largest of those cuts is the only candidate that can work
//! on the whole window.

use crate::bits::BitString;
use crate::dag::{DagCode, Forest, NodeId, NodeStore};
use crate::error::{Error, Result};
use crate::measure::{MeasureBracket, Premeasure};
use crate::weights::{AlgebraicWeight, Dyadic, Exponent};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Counts premeasure evaluations against a cap.
#[derive(Clone, Debug)]
pub struct Budget {
    pub used: u64,
    pub cap: u64,
    pub stage: u32,
}

impl Budget {
    pub fn new(cap: u64, stage: u32) -> Self {
        Budget { used: 0, cap, stage }
    }

    pub fn unlimited() -> Self {
        Budget::new(u64::MAX, 0)
    }

    pub fn spend(&mut self, n: u64) -> Result<()> {
        self.used = self.used.saturating_add(n);
        if self.used > self.cap {
            Err(Error::BudgetExceeded { stage: self.stage })
        } else {
            Ok(())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Target {
    pub s: Exponent,
    pub n: u32,
    pub c: AlgebraicWeight,
    pub eps: AlgebraicWeight,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Selection {
    /// The input already met the bracket.
    Identity,
    /// Y_0.
    Base,
    /// Y(γ) for the recorded cut string.
    Cut(BitString),
}

#[derive(Clone, Debug)]
pub struct Interpolated {
    pub root: Option<NodeId>,
    pub m: u32,
    pub window: (u32, u32),
    pub selection: Selection,
    /// Number of level-m subtrees added to Y_0.
    pub index: BigUint,
    /// Number of level-m subtrees available to add.
    pub total: BigUint,
    pub bracket: MeasureBracket,
    /// Target actually used (differs from the request when c = 0).
    pub c: AlgebraicWeight,
    pub eps: AlgebraicWeight,
}

/// Smallest m ≥ n′ with 2^{-sm} < ε and K·2^{-sm} < c + ε.
pub fn stable_level(s: Exponent, k_count: &BigUint, prefix_depth: u32, c: &AlgebraicWeight, eps: &AlgebraicWeight) -> Option<u32> {
    if eps.signum() <= 0 || s.is_zero() {
        return None;
    }
    let bound = c + eps;
    let k = AlgebraicWeight::from_dyadic(Dyadic::from_int(num_bigint::BigInt::from(k_count.clone())));
    let mut m = prefix_depth;
    loop {
        let w = s.pow2_neg(m);
        if w < *eps && &k * &w < bound {
            return Some(m);
        }
        m += 1;
    }
}

struct Sweep<'a> {
    forest: &'a mut Forest,
    y0: Option<NodeId>,
    zp: Option<NodeId>,
}

impl Sweep<'_> {
    /// Y(γ): Y_0 plus the level-m subtrees of the input at or left of γ.
    fn cut(&mut self, gamma: &BitString) -> Option<NodeId> {
        self.cut_at(self.y0, self.zp, gamma.bits())
    }

    fn cut_at(&mut self, y: Option<NodeId>, z: Option<NodeId>, rest: &[bool]) -> Option<NodeId> {
        let Some((&g, tail)) = rest.split_first() else {
            return self.forest.union(y, z);
        };
        let yc = |f: &Forest, b: bool| y.and_then(|id| f.child(id, b));
        let zc = |f: &Forest, b: bool| z.and_then(|id| f.child(id, b));
        let (y0, y1) = (yc(self.forest, false), yc(self.forest, true));
        let (z0, z1) = (zc(self.forest, false), zc(self.forest, true));
        let (zero, one) = if g {
            (self.forest.union(y0, z0), self.cut_at(y1, z1, tail))
        } else {
            (self.cut_at(y0, z0, tail), y1)
        };
        if zero.is_none() && one.is_none() && y.is_none() {
            return None;
        }
        Some(self.forest.node(zero, one))
    }
}

fn lex_least(forest: &mut Forest, id: NodeId, height: u32, memo: &mut HashMap<(NodeId, u32), NodeId>) -> NodeId {
    if height == 0 {
        return id;
    }
    if let Some(&hit) = memo.get(&(id, height)) {
        return hit;
    }
    let out = if let Some(c) = forest.child(id, false) {
        let sub = lex_least(forest, c, height - 1, memo);
        forest.node(Some(sub), None)
    } else {
        let c = forest.child(id, true).expect("band-pruned node has a child");
        let sub = lex_least(forest, c, height - 1, memo);
        forest.node(None, Some(sub))
    };
    memo.insert((id, height), out);
    out
}

/// Y_0: copy through level n′, then one lex-least surviving path to level m
/// per level-n′ node, then the input's subtree above that level-m node.
fn build_y0(forest: &mut Forest, z: Option<NodeId>, prefix_depth: u32, m: u32) -> Option<NodeId> {
    fn rec(
        f: &mut Forest,
        z: NodeId,
        level: u32,
        prefix_depth: u32,
        m: u32,
        memo: &mut HashMap<(NodeId, u32), NodeId>,
        paths: &mut HashMap<(NodeId, u32), NodeId>,
    ) -> NodeId {
        if let Some(&hit) = memo.get(&(z, level)) {
            return hit;
        }
        let out = if level == prefix_depth {
            match f.band_prune(Some(z), m - level) {
                Some(p) => lex_least(f, p, m - level, paths),
                None => f.leaf(),
            }
        } else {
            let [c0, c1] = f.children(z);
            let zero = (c0 != crate::dag::NIL).then(|| rec(f, c0, level + 1, prefix_depth, m, memo, paths));
            let one = (c1 != crate::dag::NIL).then(|| rec(f, c1, level + 1, prefix_depth, m, memo, paths));
            f.node(zero, one)
        };
        memo.insert((z, level), out);
        out
    }
    let z = z?;
    Some(rec(forest, z, 0, prefix_depth, m, &mut HashMap::new(), &mut HashMap::new()))
}

fn values(evals: &mut [Premeasure], forest: &Forest, root: Option<NodeId>, budget: &mut Budget) -> Result<Vec<AlgebraicWeight>> {
    budget.spend(evals.len() as u64)?;
    Ok(evals.iter_mut().map(|p| p.value(forest, root)).collect())
}

fn bracket_of(vals: &[AlgebraicWeight], lo: u32, hi: u32) -> MeasureBracket {
    MeasureBracket {
        lower: vals.last().cloned().unwrap_or_default(),
        lower_block: hi,
        upper: vals.first().cloned().unwrap_or_default(),
        upper_block: lo,
    }
}

/// Interpolate inside a forest. `z` is a code through block `depth` whose
/// prefix through `prefix_depth` must be preserved. The verification window
/// is [m, m + window], or [m, depth] when `window` is `None`.
pub fn interpolate_in(
    forest: &mut Forest,
    z: Option<NodeId>,
    depth: u32,
    prefix_depth: u32,
    target: &Target,
    window: Option<u32>,
    budget: &mut Budget,
) -> Result<Interpolated> {
    let Target { s, n, c, eps } = target.clone();
    if s.is_zero() {
        return Err(Error::InvalidArgument("interpolation needs s > 0".into()));
    }
    if c.signum() < 0 {
        return Err(Error::InvalidArgument("target c must be non-negative".into()));
    }
    if prefix_depth < n || prefix_depth > depth {
        return Err(Error::InvalidArgument(format!(
            "prefix depth {prefix_depth} must lie in [{n}, {depth}]"
        )));
    }
    let deepest = Premeasure::new(s, n, depth).value(forest, z);
    budget.spend(1)?;
    if deepest < c {
        return Err(Error::PreconditionMeasure { block: depth, value: deepest.decimal(30) });
    }
    if c.is_zero() {
        if deepest.is_zero() {
            let b = MeasureBracket { lower: deepest.clone(), lower_block: depth, upper: deepest.clone(), upper_block: depth };
            return Ok(Interpolated {
                root: z,
                m: depth,
                window: (depth, depth),
                selection: Selection::Identity,
                index: BigUint::default(),
                total: BigUint::default(),
                bracket: b,
                c,
                eps,
            });
        }
        let half = eps.mul_dyadic(&Dyadic::new(1, 1));
        let d = half.min(deepest);
        let shifted = Target { s, n, c: d.clone(), eps: &eps - &d };
        return interpolate_in(forest, z, depth, prefix_depth, &shifted, window, budget);
    }
    let k_count = forest.count_level(z, prefix_depth);
    let wlen = window.unwrap_or(0);
    let Some(m) = stable_level(s, &k_count, prefix_depth, &c, &eps) else {
        return Err(Error::NoStableIndex { window: wlen });
    };
    let hi = match window {
        Some(w) => m + w,
        None => depth,
    };
    if hi > depth || m > depth {
        return Err(Error::HorizonExceeded { needed: hi.max(m), horizon: depth });
    }
    let mut evals: Vec<Premeasure> = (m..=hi).map(|k| Premeasure::new(s, n, k)).collect();
    let upper = &c + &eps;
    let in_bracket = |v: &[AlgebraicWeight]| v.iter().all(|x| *x >= c && *x < upper);

    let zvals = values(&mut evals, forest, z, budget)?;
    if in_bracket(&zvals) {
        return Ok(Interpolated {
            root: z,
            m,
            window: (m, hi),
            selection: Selection::Identity,
            index: BigUint::default(),
            total: BigUint::default(),
            bracket: bracket_of(&zvals, m, hi),
            c,
            eps,
        });
    }

    let zp = forest.band_prune(z, m);
    let y0 = build_y0(forest, z, prefix_depth, m);
    let base_count = forest.count_level(y0, m);
    let everything = forest.union(y0, zp);
    let total = forest.count_level(everything, m) - &base_count;
    let y0vals = values(&mut evals, forest, y0, budget)?;
    if in_bracket(&y0vals) {
        return Ok(Interpolated {
            root: y0,
            m,
            window: (m, hi),
            selection: Selection::Base,
            index: BigUint::default(),
            total,
            bracket: bracket_of(&y0vals, m, hi),
            c,
            eps,
        });
    }

    let mut sweep = Sweep { forest, y0, zp };
    // Least cut per block; None stands for Y_0 itself.
    let mut best: Option<BitString> = None;
    for (i, p) in evals.iter_mut().enumerate() {
        if y0vals[i] >= c {
            continue;
        }
        let mut prefix = BitString::empty();
        for level in 0..m {
            let mut probe = prefix.child(false);
            while probe.len() < m as usize {
                probe.push(true);
            }
            let root = sweep.cut(&probe);
            budget.spend(1)?;
            if p.value(sweep.forest, root) >= c {
                prefix.push(false);
            } else {
                prefix.push(true);
            }
            debug_assert_eq!(prefix.len(), level as usize + 1);
        }
        if best.as_ref().map_or(true, |b| prefix > *b) {
            best = Some(prefix);
        }
    }
    let gamma = best.expect("some block needed additions");
    let root = sweep.cut(&gamma);
    let vals = values(&mut evals, sweep.forest, root, budget)?;
    if !in_bracket(&vals) {
        return Err(Error::NoStableIndex { window: hi - m });
    }
    let index = sweep.forest.count_level(root, m) - &base_count;
    Ok(Interpolated {
        root,
        m,
        window: (m, hi),
        selection: Selection::Cut(gamma),
        index,
        total,
        bracket: bracket_of(&vals, m, hi),
        c,
        eps,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterpolationResult {
    pub code: DagCode,
    pub bracket: MeasureBracket,
    pub m: u32,
    pub window: (u32, u32),
    pub selection: Selection,
    pub index: String,
    pub total: String,
    pub c: AlgebraicWeight,
    pub eps: AlgebraicWeight,
}

impl InterpolationResult {
    pub(crate) fn from_parts(forest: &Forest, depth: u32, it: Interpolated) -> Self {
        InterpolationResult {
            code: forest.export(it.root, depth),
            bracket: it.bracket,
            m: it.m,
            window: it.window,
            selection: it.selection,
            index: it.index.to_string(),
            total: it.total.to_string(),
            c: it.c,
            eps: it.eps,
        }
    }
}

/// Interpolate a code `z` that extends its own prefix through `prefix_depth`,
/// verifying on [m, m + window].
pub fn interpolate_subset(
    z: &DagCode,
    prefix_depth: u32,
    s: Exponent,
    n: u32,
    c: &AlgebraicWeight,
    eps: &AlgebraicWeight,
    window: u32,
) -> Result<InterpolationResult> {
    let mut forest = Forest::new();
    let root = forest.import(z);
    let target = Target { s, n, c: c.clone(), eps: eps.clone() };
    let it = interpolate_in(&mut forest, root, z.depth(), prefix_depth, &target, Some(window), &mut Budget::unlimited())?;
    Ok(InterpolationResult::from_parts(&forest, z.depth(), it))
}

/// Approximate-measure subset of a source's tree through block `depth`,
/// certified on every block from m to `depth`. Uses membership only.
pub fn approx_subset(
    src: &dyn crate::trees::TreeSource,
    s: Exponent,
    n: u32,
    c: &AlgebraicWeight,
    eps: &AlgebraicWeight,
    depth: u32,
) -> Result<InterpolationResult> {
    let mut forest = Forest::new();
    let root = forest.ambient(src, depth, false)?;
    let target = Target { s, n, c: c.clone(), eps: eps.clone() };
    let it = interpolate_in(&mut forest, root, depth, n, &target, None, &mut Budget::unlimited())?;
    Ok(InterpolationResult::from_parts(&forest, depth, it))
}

/// As [`approx_subset`], starting from the pruned tree; the output satisfies
/// the pruned child condition below `depth`.
pub fn pruned_approx_subset(
    src: &dyn crate::trees::TreeSource,
    s: Exponent,
    n: u32,
    c: &AlgebraicWeight,
    eps: &AlgebraicWeight,
    depth: u32,
) -> Result<InterpolationResult> {
    let mut forest = Forest::new();
    let root = forest.ambient(src, depth, true)?;
    if root.is_none() {
        return Err(Error::NotExtendible { at: BitString::empty() });
    }
    let target = Target { s, n, c: c.clone(), eps: eps.clone() };
    let it = interpolate_in(&mut forest, root, depth, n, &target, None, &mut Budget::unlimited())?;
    let out = InterpolationResult::from_parts(&forest, depth, it);
    let ambient = forest.export(root, depth);
    out.code.validate(&ambient, true)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{htilde_value, marked_set};
    use crate::trees::Builtin;

    fn w(s: &str) -> AlgebraicWeight {
        s.parse().unwrap()
    }

    fn ex(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    #[test]
    fn full_tree_lebesgue_half() {
        let z = DagCode::ambient(&Builtin::Full, 12, false).unwrap();
        let r = interpolate_subset(&z, 0, ex("1"), 0, &w("1/2"), &w("1/4"), 4).unwrap();
        for k in r.window.0..=r.window.1 {
            let v = htilde_value(&r.code, k, ex("1"), 0);
            assert!(v >= w("1/2") && v < w("3/4"), "block {k}: {v:?}");
        }
        let all = marked_set(&r.code, 12);
        assert!(all.iter().all(|s| z.marks(s)));
    }

    #[test]
    fn identity_when_already_in_bracket() {
        let z = DagCode::ambient(&Builtin::BranchLeft, 10, false).unwrap();
        let r = interpolate_subset(&z, 0, ex("1"), 0, &w("1/2"), &w("1/8"), 3).unwrap();
        assert_eq!(r.selection, Selection::Identity);
        assert_eq!(r.code, z);
    }

    #[test]
    fn zero_target_lands_below_eps() {
        let z = DagCode::ambient(&Builtin::Full, 12, false).unwrap();
        let r = interpolate_subset(&z, 0, ex("1"), 0, &AlgebraicWeight::zero(), &w("1/4"), 2).unwrap();
        let v = htilde_value(&r.code, r.window.1, ex("1"), 0);
        assert!(v.signum() > 0 && v < w("1/4"));
    }

    #[test]
    fn precondition_and_argument_errors() {
        let z = DagCode::ambient(&Builtin::BranchLeft, 8, false).unwrap();
        assert!(matches!(
            interpolate_subset(&z, 0, ex("1"), 0, &w("3/4"), &w("1/8"), 2),
            Err(Error::PreconditionMeasure { .. })
        ));
        assert!(matches!(
            interpolate_subset(&z, 0, ex("0"), 0, &w("1/4"), &w("1/8"), 2),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            interpolate_subset(&z, 0, ex("1"), 0, &w("1/4"), &AlgebraicWeight::zero(), 2),
            Err(Error::NoStableIndex { .. })
        ));
        assert!(matches!(
            interpolate_subset(&z, 0, ex("1"), 0, &w("1/4"), &w("1/2^20"), 2),
            Err(Error::HorizonExceeded { .. })
        ));
    }

    #[test]
    fn approx_half_dimension() {
        let r = approx_subset(&Builtin::Full, ex("1/2"), 1, &w("1"), &w("1/8"), 24).unwrap();
        for k in r.window.0..=24 {
            let v = htilde_value(&r.code, k, ex("1/2"), 1);
            assert!(v >= w("1") && v < w("9/8"));
        }
        let p = pruned_approx_subset(&Builtin::Full, ex("1/2"), 1, &w("1"), &w("1/8"), 24).unwrap();
        let amb = DagCode::ambient(&Builtin::Full, 24, true).unwrap();
        assert!(p.code.validate(&amb, true).is_ok());
    }
}
