//! Thinning: make every length-n branch carry level-(n+1) premeasure at most
//! 2^{-ns} + θ while keeping the level-n0 lower bound.

use super::interpolate::{interpolate_in, Budget, Target};
use crate::bits::BitString;
use crate::dag::{DagCode, Forest, NodeId};
use crate::error::{Error, Result};
use crate::measure::{CoverSet, Premeasure, WITNESS_LIMIT};
use crate::weights::{AlgebraicWeight, Exponent};
use serde::{Deserialize, Serialize};

/// H̃^s_{n+1}(Z_τ) ≤ 2^{-ns} + θ at block `block`.
pub fn thin_test(z: &DagCode, s: Exponent, n: u32, tau: &BitString, theta: &AlgebraicWeight, block: u32) -> bool {
    let mut f = Forest::new();
    let root = f.import(z);
    thin_in(&mut f, root, s, n, tau, theta, block.min(z.depth()))
}

pub(crate) fn thin_in(f: &mut Forest, z: Option<NodeId>, s: Exponent, n: u32, tau: &BitString, theta: &AlgebraicWeight, block: u32) -> bool {
    let r = f.restrict(z, tau);
    let v = Premeasure::new(s, n + 1, block).value(f, r);
    v <= &s.pow2_neg(n) + theta
}

fn level_strings(f: &Forest, root: Option<NodeId>, n: u32) -> Vec<BitString> {
    use crate::dag::NodeStore;
    let mut out = Vec::new();
    let mut stack: Vec<(NodeId, BitString)> = root.map(|r| (r, BitString::empty())).into_iter().collect();
    while let Some((id, s)) = stack.pop() {
        if s.len() as u32 == n {
            out.push(s);
            continue;
        }
        for b in [true, false] {
            if let Some(c) = f.child(id, b) {
                stack.push((c, s.child(b)));
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct Thinned {
    pub root: Option<NodeId>,
    pub replaced: Vec<BitString>,
    pub kept: Vec<BitString>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThinParams {
    pub s: Exponent,
    pub n: u32,
    pub n0: u32,
    pub c: AlgebraicWeight,
    pub theta: AlgebraicWeight,
}

/// Thinify inside a forest, preserving the prefix through `prefix_depth`.
pub fn thinify_in(
    f: &mut Forest,
    z: Option<NodeId>,
    depth: u32,
    prefix_depth: u32,
    p: &ThinParams,
    budget: &mut Budget,
) -> Result<Thinned> {
    if p.s.is_zero() {
        return Err(Error::InvalidArgument("thinning needs s > 0".into()));
    }
    if p.n0 > p.n {
        return Err(Error::InvalidArgument("thinning level must be at least n0".into()));
    }
    let branch_prefix = prefix_depth.max(p.n + 1);
    if branch_prefix > depth {
        return Err(Error::HorizonExceeded { needed: branch_prefix, horizon: depth });
    }
    let thin_value = p.s.pow2_neg(p.n);
    let mut result = f.truncate(z, prefix_depth.min(depth));
    let mut replaced = Vec::new();
    let mut kept = Vec::new();
    for tau in level_strings(f, z, p.n) {
        let branch = f.restrict(z, &tau);
        budget.spend(1)?;
        if thin_in(f, z, p.s, p.n, &tau, &p.theta, depth) {
            result = f.union(result, branch);
            kept.push(tau);
            continue;
        }
        let target = Target { s: p.s, n: p.n + 1, c: thin_value.clone(), eps: p.theta.clone() };
        let it = interpolate_in(f, branch, depth, branch_prefix, &target, None, budget)?;
        result = f.union(result, it.root);
        replaced.push(tau);
    }
    for tau in replaced.iter().chain(&kept) {
        if !thin_in(f, result, p.s, p.n, tau, &p.theta, depth) {
            return Err(Error::NoStableIndex { window: 0 });
        }
    }
    let lower = Premeasure::new(p.s, p.n0, depth).value(f, result);
    if lower < p.c {
        return Err(Error::PreconditionMeasure { block: depth, value: lower.decimal(30) });
    }
    Ok(Thinned { root: result, replaced, kept })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThinResult {
    pub code: DagCode,
    pub replaced: Vec<BitString>,
    pub kept: Vec<BitString>,
    pub lower: AlgebraicWeight,
}

/// Thinify a code that extends its own prefix through `prefix_depth`.
pub fn thinify(z: &DagCode, prefix_depth: u32, p: &ThinParams) -> Result<ThinResult> {
    let mut f = Forest::new();
    let root = f.import(z);
    let t = thinify_in(&mut f, root, z.depth(), prefix_depth, p, &mut Budget::unlimited())?;
    let lower = Premeasure::new(p.s, p.n0, z.depth()).value(&f, t.root);
    Ok(ThinResult { code: f.export(t.root, z.depth()), replaced: t.replaced, kept: t.kept, lower })
}

/// Cover replacement: start from a cover `u` of `y` at block `k` and swap each
/// length-n string σ for a minimum level-(n+1) cover of Y_σ. The result is a
/// 2^{-(n+1)}-cover of `y` with weight at most W(u) + t·θ when Y is θ-thin,
/// where t counts the swapped strings.
pub fn replace_cover(y: &DagCode, u: &CoverSet, s: Exponent, n: u32, k: u32) -> Option<(CoverSet, usize)> {
    let mut f = Forest::new();
    let root = f.import(y);
    let mut out = Vec::new();
    let mut swapped = 0;
    for sigma in &u.strings {
        if sigma.len() as u32 != n {
            out.push(sigma.clone());
            continue;
        }
        swapped += 1;
        let r = f.restrict(root, sigma);
        let mut p = Premeasure::new(s, n + 1, k);
        out.extend(p.witness(&f, r, WITNESS_LIMIT)?.strings);
    }
    Some((CoverSet::new(out, n + 1, k), swapped))
}
