//! Hash-consed subtree codes.
//!
//! A node id stands for a finite prefix-closed set of strings containing the
//! empty string; its two slots hold the subtrees above `0` and `1`, or [`NIL`].
//! Structurally equal subtrees share one id, so codes whose trees repeat
//! (full cylinders, regular trees, long uniform paths) stay small at any depth.

use crate::bits::{check_depth, string_at, BitString, CodePrefix};
use crate::error::{Error, Result};
use crate::trees::TreeSource;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::HashMap;

pub type NodeId = u32;
pub const NIL: NodeId = u32::MAX;

fn opt(id: NodeId) -> Option<NodeId> {
    (id != NIL).then_some(id)
}

fn raw(id: Option<NodeId>) -> NodeId {
    id.unwrap_or(NIL)
}

/// Read access to child slots.
pub trait NodeStore {
    fn children(&self, id: NodeId) -> [NodeId; 2];

    fn child(&self, id: NodeId, b: bool) -> Option<NodeId> {
        opt(self.children(id)[b as usize])
    }

    /// The node reached by following `s`, if every prefix is marked.
    fn walk(&self, root: Option<NodeId>, s: &BitString) -> Option<NodeId> {
        let mut cur = root?;
        for &b in s.bits() {
            cur = self.child(cur, b)?;
        }
        Some(cur)
    }
}

#[derive(Default)]
pub struct Forest {
    nodes: Vec<[NodeId; 2]>,
    index: HashMap<[NodeId; 2], NodeId>,
    union_memo: HashMap<(NodeId, NodeId), NodeId>,
    truncate_memo: HashMap<(NodeId, u32), NodeId>,
    count_memo: HashMap<(NodeId, u32), BigUint>,
    band_memo: HashMap<(NodeId, u32), NodeId>,
    height_memo: HashMap<NodeId, u32>,
}

impl NodeStore for Forest {
    fn children(&self, id: NodeId) -> [NodeId; 2] {
        self.nodes[id as usize]
    }
}

impl Forest {
    pub fn new() -> Self {
        Forest::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&mut self, zero: Option<NodeId>, one: Option<NodeId>) -> NodeId {
        let key = [raw(zero), raw(one)];
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let id = self.nodes.len() as NodeId;
        assert!(id != NIL, "forest exhausted");
        self.nodes.push(key);
        self.index.insert(key, id);
        id
    }

    pub fn leaf(&mut self) -> NodeId {
        self.node(None, None)
    }

    /// The full binary tree of the given height.
    pub fn full(&mut self, height: u32) -> NodeId {
        let mut id = self.leaf();
        for _ in 0..height {
            id = self.node(Some(id), Some(id));
        }
        id
    }

    /// A single path spelling `s`, ending in `top` (a leaf when `None`).
    pub fn path(&mut self, s: &BitString, top: Option<NodeId>) -> NodeId {
        let mut id = top.unwrap_or_else(|| self.leaf());
        for &b in s.bits().iter().rev() {
            id = if b { self.node(None, Some(id)) } else { self.node(Some(id), None) };
        }
        id
    }

    /// Code of the members (or, with `pruned`, the extendible nodes) of a
    /// source through level `depth`.
    pub fn ambient(&mut self, src: &dyn TreeSource, depth: u32, pruned: bool) -> Result<Option<NodeId>> {
        let mut memo: HashMap<(u64, u32), Option<NodeId>> = HashMap::new();
        let mut s = BitString::empty();
        self.ambient_rec(src, depth, pruned, &mut s, &mut memo)
    }

    fn ambient_rec(
        &mut self,
        src: &dyn TreeSource,
        depth: u32,
        pruned: bool,
        s: &mut BitString,
        memo: &mut HashMap<(u64, u32), Option<NodeId>>,
    ) -> Result<Option<NodeId>> {
        let inside = if pruned {
            src.extendible(s).ok_or_else(|| {
                Error::InvalidArgument("pruned ambient code needs an extendibility oracle".into())
            })?
        } else {
            src.member(s)
        };
        if !inside {
            return Ok(None);
        }
        let level = s.len() as u32;
        let class = src.node_class(s);
        if let Some(c) = class {
            if let Some(&hit) = memo.get(&(c, level)) {
                return Ok(hit);
            }
        }
        let id = if level == depth {
            self.leaf()
        } else {
            s.push(false);
            let zero = self.ambient_rec(src, depth, pruned, s, memo)?;
            s.pop();
            s.push(true);
            let one = self.ambient_rec(src, depth, pruned, s, memo)?;
            s.pop();
            self.node(zero, one)
        };
        if let Some(c) = class {
            memo.insert((c, level), Some(id));
        }
        Ok(Some(id))
    }

    /// Marks of a flat code prefix through `block`. Unreachable marks are dropped.
    pub fn from_code_prefix(&mut self, p: &CodePrefix, block: u32) -> Option<NodeId> {
        fn rec(f: &mut Forest, p: &CodePrefix, i: u64, level: u32, block: u32) -> Option<NodeId> {
            if !p.get(i).unwrap_or(false) {
                return None;
            }
            if level == block {
                return Some(f.leaf());
            }
            let zero = rec(f, p, 2 * i + 1, level + 1, block);
            let one = rec(f, p, 2 * i + 2, level + 1, block);
            Some(f.node(zero, one))
        }
        rec(self, p, 0, 0, block)
    }

    /// Drop everything above `height`.
    pub fn truncate(&mut self, id: Option<NodeId>, height: u32) -> Option<NodeId> {
        let id = id?;
        if let Some(&hit) = self.truncate_memo.get(&(id, height)) {
            return Some(hit);
        }
        let out = if height == 0 {
            self.leaf()
        } else {
            let [z, o] = self.children(id);
            let z = self.truncate(opt(z), height - 1);
            let o = self.truncate(opt(o), height - 1);
            self.node(z, o)
        };
        self.truncate_memo.insert((id, height), out);
        Some(out)
    }

    pub fn union(&mut self, a: Option<NodeId>, b: Option<NodeId>) -> Option<NodeId> {
        let (a, b) = match (a, b) {
            (None, x) | (x, None) => return x,
            (Some(a), Some(b)) => (a, b),
        };
        if a == b {
            return Some(a);
        }
        let key = (a.min(b), a.max(b));
        if let Some(&hit) = self.union_memo.get(&key) {
            return Some(hit);
        }
        let [a0, a1] = self.children(a);
        let [b0, b1] = self.children(b);
        let z = self.union(opt(a0), opt(b0));
        let o = self.union(opt(a1), opt(b1));
        let out = self.node(z, o);
        self.union_memo.insert(key, out);
        Some(out)
    }

    /// Z_τ: marks compatible with τ.
    pub fn restrict(&mut self, id: Option<NodeId>, tau: &BitString) -> Option<NodeId> {
        self.restrict_from(id, tau.bits())
    }

    fn restrict_from(&mut self, id: Option<NodeId>, tau: &[bool]) -> Option<NodeId> {
        let id = id?;
        let Some((&b, rest)) = tau.split_first() else {
            return Some(id);
        };
        let sub = self.child(id, b);
        let kept = self.restrict_from(sub, rest);
        Some(if b { self.node(None, kept) } else { self.node(kept, None) })
    }

    /// Number of marked strings exactly `height` levels above the node.
    pub fn count_level(&mut self, id: Option<NodeId>, height: u32) -> BigUint {
        let Some(id) = id else { return BigUint::zero() };
        if height == 0 {
            return BigUint::one();
        }
        if let Some(hit) = self.count_memo.get(&(id, height)) {
            return hit.clone();
        }
        let [z, o] = self.children(id);
        let v = self.count_level(opt(z), height - 1) + self.count_level(opt(o), height - 1);
        self.count_memo.insert((id, height), v.clone());
        v
    }

    /// Keep nodes below `height` only if they have a marked descendant exactly
    /// `height` levels up; everything from that level on is kept unchanged.
    pub fn band_prune(&mut self, id: Option<NodeId>, height: u32) -> Option<NodeId> {
        let id = id?;
        if height == 0 {
            return Some(id);
        }
        if let Some(&hit) = self.band_memo.get(&(id, height)) {
            return opt(hit);
        }
        let [z, o] = self.children(id);
        let z = self.band_prune(opt(z), height - 1);
        let o = self.band_prune(opt(o), height - 1);
        let out = if z.is_none() && o.is_none() { None } else { Some(self.node(z, o)) };
        self.band_memo.insert((id, height), raw(out));
        out
    }

    /// Longest marked string length above the node.
    pub fn height(&mut self, id: NodeId) -> u32 {
        if let Some(&h) = self.height_memo.get(&id) {
            return h;
        }
        let [z, o] = self.children(id);
        let hz = opt(z).map(|c| self.height(c) + 1).unwrap_or(0);
        let ho = opt(o).map(|c| self.height(c) + 1).unwrap_or(0);
        let h = hz.max(ho);
        self.height_memo.insert(id, h);
        h
    }

    /// Whether every string marked by `a` is marked by `b`.
    pub fn subset(&self, a: Option<NodeId>, b: Option<NodeId>) -> bool {
        fn rec(f: &Forest, a: NodeId, b: NodeId, memo: &mut HashMap<(NodeId, NodeId), bool>) -> bool {
            if a == b {
                return true;
            }
            if let Some(&v) = memo.get(&(a, b)) {
                return v;
            }
            let [a0, a1] = f.children(a);
            let [b0, b1] = f.children(b);
            let ok = [(a0, b0), (a1, b1)].iter().all(|&(x, y)| match (opt(x), opt(y)) {
                (None, _) => true,
                (Some(_), None) => false,
                (Some(x), Some(y)) => rec(f, x, y, memo),
            });
            memo.insert((a, b), ok);
            ok
        }
        match (a, b) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => rec(self, a, b, &mut HashMap::new()),
        }
    }

    /// Copy a self-contained code into this forest.
    pub fn import(&mut self, code: &DagCode) -> Option<NodeId> {
        let mut map: Vec<NodeId> = Vec::with_capacity(code.nodes.len());
        for &[z, o] in &code.nodes {
            let z = opt(z).map(|c| map[c as usize]);
            let o = opt(o).map(|c| map[c as usize]);
            let id = self.node(z, o);
            map.push(id);
        }
        code.root.map(|r| map[r as usize])
    }

    /// A self-contained copy of the nodes reachable from `root`, children first.
    pub fn export(&self, root: Option<NodeId>, depth: u32) -> DagCode {
        let mut order: Vec<NodeId> = Vec::new();
        let mut map: HashMap<NodeId, NodeId> = HashMap::new();
        if let Some(r) = root {
            let mut stack = vec![(r, false)];
            while let Some((id, expanded)) = stack.pop() {
                if map.contains_key(&id) {
                    continue;
                }
                if expanded {
                    map.insert(id, order.len() as NodeId);
                    order.push(id);
                    continue;
                }
                stack.push((id, true));
                for c in self.children(id) {
                    if c != NIL && !map.contains_key(&c) {
                        stack.push((c, false));
                    }
                }
            }
        }
        let nodes = order
            .iter()
            .map(|&id| {
                let [z, o] = self.children(id);
                [opt(z).map_or(NIL, |c| map[&c]), opt(o).map_or(NIL, |c| map[&c])]
            })
            .collect();
        DagCode { depth, root: root.map(|r| map[&r]), nodes }
    }
}

/// A tree code through block `depth`, stored as a self-contained DAG.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DagCode {
    depth: u32,
    root: Option<NodeId>,
    nodes: Vec<[NodeId; 2]>,
}

impl NodeStore for DagCode {
    fn children(&self, id: NodeId) -> [NodeId; 2] {
        self.nodes[id as usize]
    }
}

impl DagCode {
    /// Code of a source's tree (or pruned tree) through block `depth`.
    pub fn ambient(src: &dyn TreeSource, depth: u32, pruned: bool) -> Result<DagCode> {
        let mut f = Forest::new();
        let root = f.ambient(src, depth, pruned)?;
        Ok(f.export(root, depth))
    }

    pub fn from_code_prefix(p: &CodePrefix) -> Result<DagCode> {
        let block = p
            .complete_block()
            .ok_or_else(|| Error::InvalidArgument("code prefix has no complete block".into()))?;
        let mut f = Forest::new();
        let root = f.from_code_prefix(p, block);
        Ok(f.export(root, block))
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn root(&self) -> Option<NodeId> {
        self.root
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn marks(&self, s: &BitString) -> bool {
        s.len() as u32 <= self.depth && self.walk(self.root, s).is_some()
    }

    /// The same marks cut at a shallower block.
    pub fn truncated(&self, block: u32) -> DagCode {
        let mut f = Forest::new();
        let r = f.import(self);
        let t = f.truncate(r, block.min(self.depth));
        f.export(t, block.min(self.depth))
    }

    /// Flat code prefix through `block`.
    pub fn to_code_prefix(&self, block: u32) -> Result<CodePrefix> {
        check_depth(block)?;
        let block = block.min(self.depth);
        let len = crate::bits::block_len(block);
        let mut entries = vec![false; len as usize];
        let mut stack: Vec<(NodeId, u64)> = self.root.map(|r| (r, 0u64)).into_iter().collect();
        while let Some((id, i)) = stack.pop() {
            entries[i as usize] = true;
            if string_at(i).len() as u32 == block {
                continue;
            }
            for b in [false, true] {
                if let Some(c) = self.child(id, b) {
                    stack.push((c, crate::bits::child_index(i, b)));
                }
            }
        }
        Ok(CodePrefix::new(entries))
    }

    /// Marked strings of length `k` in lexicographic order, up to `limit`.
    pub fn level_strings(&self, k: u32, limit: usize) -> Vec<BitString> {
        let mut out = Vec::new();
        let mut stack: Vec<(NodeId, BitString)> = self.root.map(|r| (r, BitString::empty())).into_iter().collect();
        while let Some((id, s)) = stack.pop() {
            if out.len() >= limit {
                break;
            }
            if s.len() as u32 == k {
                out.push(s);
                continue;
            }
            for b in [true, false] {
                if let Some(c) = self.child(id, b) {
                    stack.push((c, s.child(b)));
                }
            }
        }
        out
    }

    pub fn level_count(&self, k: u32) -> BigUint {
        let mut f = Forest::new();
        let r = f.import(self);
        f.count_level(r, k)
    }

    /// Code conditions relative to an ambient code of at least the same depth:
    /// marks lie in the ambient tree, every level through `depth` is marked,
    /// and, if `pruned`, every marked node below `depth` has a marked child.
    pub fn validate(&self, ambient: &DagCode, pruned: bool) -> Result<()> {
        let mut f = Forest::new();
        let a = f.import(ambient);
        let a = f.truncate(a, self.depth);
        let z = f.import(self);
        let Some(root) = z else {
            return Err(Error::Condition3 { block: 0 });
        };
        if !f.subset(z, a) {
            let w = self.first_outside(ambient);
            return Err(Error::Condition2 { witness: w });
        }
        let h = f.height(root);
        if h < self.depth {
            return Err(Error::Condition3 { block: h + 1 });
        }
        if pruned {
            if let Some(w) = self.dead_end() {
                return Err(Error::PrunedViolation { witness: w });
            }
        }
        Ok(())
    }

    fn first_outside(&self, ambient: &DagCode) -> BitString {
        let mut stack = vec![(self.root.unwrap(), ambient.root, BitString::empty())];
        let mut best: Option<BitString> = None;
        let mut seen = std::collections::HashSet::new();
        while let Some((z, a, s)) = stack.pop() {
            let Some(a) = a else {
                if best.as_ref().map_or(true, |b| s.length_lex_cmp(b).is_lt()) {
                    best = Some(s);
                }
                continue;
            };
            if !seen.insert((z, a)) {
                continue;
            }
            for b in [false, true] {
                if let Some(zc) = self.child(z, b) {
                    stack.push((zc, ambient.child(a, b), s.child(b)));
                }
            }
        }
        best.unwrap_or_default()
    }

    fn dead_end(&self) -> Option<BitString> {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![(self.root?, BitString::empty())];
        while let Some((id, s)) = stack.pop() {
            if (s.len() as u32) >= self.depth || !seen.insert((id, s.len())) {
                continue;
            }
            let [z, o] = self.children(id);
            if z == NIL && o == NIL {
                return Some(s);
            }
            for b in [true, false] {
                if let Some(c) = self.child(id, b) {
                    stack.push((c, s.child(b)));
                }
            }
        }
        None
    }
}

#[derive(Serialize, Deserialize)]
struct DagRepr {
    depth: u32,
    root: Option<NodeId>,
    nodes: Vec<[Option<NodeId>; 2]>,
}

impl Serialize for DagCode {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DagRepr {
            depth: self.depth,
            root: self.root,
            nodes: self.nodes.iter().map(|&[z, o]| [opt(z), opt(o)]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DagCode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let r = DagRepr::deserialize(deserializer)?;
        let n = r.nodes.len() as NodeId;
        let mut nodes = Vec::with_capacity(r.nodes.len());
        for (i, [z, o]) in r.nodes.into_iter().enumerate() {
            for c in [z, o].into_iter().flatten() {
                if c >= i as NodeId {
                    return Err(serde::de::Error::custom("DAG nodes must list children before parents"));
                }
            }
            nodes.push([raw(z), raw(o)]);
        }
        if r.root.is_some_and(|x| x >= n) {
            return Err(serde::de::Error::custom("DAG root out of range"));
        }
        Ok(DagCode { depth: r.depth, root: r.root, nodes })
    }
}
